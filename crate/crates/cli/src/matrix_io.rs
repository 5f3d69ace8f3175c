//! Plain-text matrix files.
//!
//! The first line holds `rows cols`; each following line holds one matrix
//! row as `re im` pairs in scientific notation with 17 significant digits.
//! Blank lines and lines starting with `#` are ignored.

use std::fmt::Write as _;
use std::path::Path;

use lindbladlab::{ComplexMatrix, C64};

use crate::error::{CliError, Result};

pub fn format_matrix(m: &ComplexMatrix) -> String {
    let mut out = format!("{} {}\n", m.rows(), m.cols());
    for i in 0..m.rows() {
        let row: Vec<String> = (0..m.cols())
            .map(|j| {
                let z = m.get(i, j);
                format!("{:.16e} {:.16e}", z.re, z.im)
            })
            .collect();
        let _ = writeln!(out, "{}", row.join(" "));
    }
    out
}

pub fn save_matrix(m: &ComplexMatrix, path: &Path) -> Result<()> {
    std::fs::write(path, format_matrix(m)).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))
}

/// Tokens of a line with their 1-based starting columns.
fn tokens(line: &str) -> Vec<(usize, &str)> {
    let mut out = Vec::new();
    let mut start = None;
    for (i, c) in line.char_indices() {
        match (c.is_whitespace(), start) {
            (false, None) => start = Some(i),
            (true, Some(s)) => {
                out.push((s + 1, &line[s..i]));
                start = None;
            }
            _ => {}
        }
    }
    if let Some(s) = start {
        out.push((s + 1, &line[s..]));
    }
    out
}

pub fn parse_matrix(text: &str, file: &Path) -> Result<ComplexMatrix> {
    let err = |line: usize, column: usize, message: String| CliError::Parse {
        file: file.to_path_buf(),
        line,
        column,
        message,
    };
    let mut lines = text
        .lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l))
        .filter(|(_, l)| !l.trim().is_empty() && !l.trim_start().starts_with('#'));

    let (hline, header) = lines.next().ok_or_else(|| err(1, 1, "missing `rows cols` header".into()))?;
    let head = tokens(header);
    if head.len() != 2 {
        return Err(err(hline, 1, format!("header must be `rows cols`, found {} fields", head.len())));
    }
    let mut shape = [0usize; 2];
    for (k, &(col, tok)) in head.iter().enumerate() {
        shape[k] = tok
            .parse()
            .ok()
            .filter(|&n: &usize| n > 0)
            .ok_or_else(|| err(hline, col, format!("expected a positive integer, found `{tok}`")))?;
    }
    let [rows, cols] = shape;

    let mut entries = Vec::with_capacity(rows * cols);
    let mut seen = 0;
    for (lineno, line) in lines {
        if seen == rows {
            return Err(err(lineno, 1, format!("more than the declared {rows} rows")));
        }
        let toks = tokens(line);
        if toks.len() != 2 * cols {
            return Err(err(
                lineno,
                toks.get(2 * cols).map_or(line.len() + 1, |t| t.0),
                format!("row has {} values, expected {} (`re im` for each of {cols} columns)", toks.len(), 2 * cols),
            ));
        }
        for pair in toks.chunks(2) {
            let mut parts = [0.0f64; 2];
            for (k, &(col, tok)) in pair.iter().enumerate() {
                parts[k] = tok
                    .parse::<f64>()
                    .ok()
                    .filter(|x| x.is_finite())
                    .ok_or_else(|| err(lineno, col, format!("invalid number `{tok}`")))?;
            }
            entries.push(C64::new(parts[0], parts[1]));
        }
        seen += 1;
    }
    if seen < rows {
        return Err(err(text.lines().count().max(1), 1, format!("found {seen} rows, expected {rows}")));
    }
    Ok(ComplexMatrix::new(rows, cols, entries)?)
}

pub fn load_matrix(path: &Path) -> Result<ComplexMatrix> {
    let text = std::fs::read_to_string(path).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
    parse_matrix(&text, path)
}

/// Requirements a matrix file must meet for the slot it fills.
#[derive(Clone, Copy, Debug)]
pub struct Slot {
    pub name: &'static str,
    pub dim: usize,
    pub hermitian: bool,
}

pub fn load_slot(path: &Path, slot: Slot) -> Result<ComplexMatrix> {
    let m = load_matrix(path)?;
    let fail = |message: String| CliError::Matrix {
        file: path.to_path_buf(),
        message,
    };
    if !m.is_square() {
        return Err(fail(format!("{} must be square, got {}x{}", slot.name, m.rows(), m.cols())));
    }
    if m.rows() != slot.dim {
        return Err(fail(format!("{} must be {}x{}, got {}x{}", slot.name, slot.dim, slot.dim, m.rows(), m.cols())));
    }
    if slot.hermitian {
        let dev = m.max_abs_diff(&m.adjoint());
        if dev > 1e-12 * m.max_abs().max(1.0) {
            return Err(fail(format!("{} must be hermitian (deviation {dev:e})", slot.name)));
        }
    }
    Ok(m)
}
