//! JSON analysis reports.
//!
//! Fields that do not apply to a scenario are present and `null`. Timings
//! live in their own section so that reports can be compared for
//! determinism with [`AnalysisReport::without_timings`].

use std::collections::BTreeMap;
use std::fmt::Write as _;

use lindbladlab::ComplexMatrix;
use serde::{Deserialize, Serialize};

use crate::config::{Scenario, Tolerances};

pub const SCHEMA_VERSION: &str = "lindbladlab.report/1";

/// Every verdict a report can carry.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Verdict {
    Unique,
    NotUnique,
    Inconclusive,
    Inapplicable,
    Product,
    NotProduct,
    Holds,
    Violated,
    PreconditionsUnmet,
    GibbsStationary,
    NotStationary,
    Pass,
    Fail,
}

impl Verdict {
    pub fn as_str(self) -> &'static str {
        match self {
            Verdict::Unique => "unique",
            Verdict::NotUnique => "not-unique",
            Verdict::Inconclusive => "inconclusive",
            Verdict::Inapplicable => "inapplicable",
            Verdict::Product => "product",
            Verdict::NotProduct => "not-product",
            Verdict::Holds => "holds",
            Verdict::Violated => "violated",
            Verdict::PreconditionsUnmet => "preconditions-unmet",
            Verdict::GibbsStationary => "gibbs-stationary",
            Verdict::NotStationary => "not-stationary",
            Verdict::Pass => "pass",
            Verdict::Fail => "fail",
        }
    }
}

/// Row-major real and imaginary parts.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MatrixJson {
    pub rows: usize,
    pub cols: usize,
    pub re: Vec<f64>,
    pub im: Vec<f64>,
}

impl From<&ComplexMatrix> for MatrixJson {
    fn from(m: &ComplexMatrix) -> Self {
        let entries = m.row_major();
        MatrixJson {
            rows: m.rows(),
            cols: m.cols(),
            re: entries.iter().map(|z| z.re).collect(),
            im: entries.iter().map(|z| z.im).collect(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum SystemEcho {
    Chain {
        length: usize,
        beta: f64,
        epsilon: f64,
        compare_epsilon: f64,
    },
    Explicit {
        dim_a: usize,
        dim_b: usize,
        dissipator: String,
        beta: Option<f64>,
    },
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Verdicts {
    pub frigerio: Option<Verdict>,
    pub theorem23: Option<Verdict>,
    pub yoshida: Option<Verdict>,
    pub product: Option<Verdict>,
    pub sepzero: Option<Verdict>,
    pub gibbs: Option<Verdict>,
    pub cptp: Option<Verdict>,
    pub decomposition: Option<Verdict>,
}

impl Verdicts {
    pub fn iter(&self) -> impl Iterator<Item = (&'static str, Verdict)> + '_ {
        [
            ("frigerio", self.frigerio),
            ("theorem23", self.theorem23),
            ("yoshida", self.yoshida),
            ("product", self.product),
            ("sepzero", self.sepzero),
            ("gibbs", self.gibbs),
            ("cptp", self.cptp),
            ("decomposition", self.decomposition),
        ]
        .into_iter()
        .filter_map(|(k, v)| v.map(|v| (k, v)))
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SepzeroJson {
    pub residual_a: f64,
    pub residual_b: f64,
    pub residual_ab: f64,
    pub min_eigenvalue: f64,
    pub commutator_residual: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CptpJson {
    pub t: f64,
    pub trace_deviation: f64,
    pub min_choi_eigenvalue: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DecompositionJson {
    pub nullspace_dim: usize,
    pub center_dimension: usize,
    pub support_dimension: usize,
    pub transient_discarded: bool,
    pub closure_residual: f64,
    pub adjoint_residual: f64,
    /// Trace of each center projection.
    pub block_ranks: Vec<usize>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ChainJson {
    pub analytic_residual: f64,
    pub max_support_deviation: f64,
    pub epsilon_deviation: f64,
    pub compare_epsilon: f64,
    pub gibbs_residual: f64,
    pub clauses: [bool; 5],
    pub passed: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepPoint {
    pub length: usize,
    pub beta: f64,
    pub epsilon: f64,
    pub stationary_dimension: usize,
    pub theorem23: Verdict,
    pub chain: ChainJson,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Timings {
    pub total_seconds: f64,
    pub stages: BTreeMap<String, f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AnalysisReport {
    pub schema_version: String,
    pub scenario: Scenario,
    pub seed: u64,
    pub system: SystemEcho,
    pub tolerances: Tolerances,
    pub stationary_dimension: Option<usize>,
    /// `‖L ρ_max‖_F`.
    pub stationary_residual: Option<f64>,
    pub maximal_support_state: Option<MatrixJson>,
    pub min_eigenvalue: Option<f64>,
    pub faithful: Option<bool>,
    pub product_residual: Option<f64>,
    pub marginal_deviation: Option<f64>,
    pub verdicts: Verdicts,
    pub commutant_dimension: Option<usize>,
    pub bulk_dimension: Option<usize>,
    pub yoshida_dimension: Option<usize>,
    pub sepzero: Option<SepzeroJson>,
    pub gibbs_residual: Option<f64>,
    pub interaction_norm: Option<f64>,
    pub cptp: Option<CptpJson>,
    pub decomposition_blocks: Option<usize>,
    pub decomposition: Option<DecompositionJson>,
    pub chain: Option<ChainJson>,
    pub sweep: Option<Vec<SweepPoint>>,
    /// Why a test was recorded as inapplicable.
    pub notes: Vec<String>,
    pub timings: Timings,
}

impl AnalysisReport {
    pub fn new(scenario: Scenario, seed: u64, system: SystemEcho, tolerances: Tolerances) -> Self {
        AnalysisReport {
            schema_version: SCHEMA_VERSION.to_string(),
            scenario,
            seed,
            system,
            tolerances,
            stationary_dimension: None,
            stationary_residual: None,
            maximal_support_state: None,
            min_eigenvalue: None,
            faithful: None,
            product_residual: None,
            marginal_deviation: None,
            verdicts: Verdicts::default(),
            commutant_dimension: None,
            bulk_dimension: None,
            yoshida_dimension: None,
            sepzero: None,
            gibbs_residual: None,
            interaction_norm: None,
            cptp: None,
            decomposition_blocks: None,
            decomposition: None,
            chain: None,
            sweep: None,
            notes: Vec::new(),
            timings: Timings::default(),
        }
    }

    pub fn without_timings(&self) -> Self {
        AnalysisReport {
            timings: Timings::default(),
            ..self.clone()
        }
    }

    /// True if any test, including sweep points, was inapplicable.
    pub fn has_inapplicable(&self) -> bool {
        self.verdicts.iter().any(|(_, v)| v == Verdict::Inapplicable)
            || self
                .sweep
                .iter()
                .flatten()
                .any(|p| p.theorem23 == Verdict::Inapplicable)
    }

    /// Every number in the report, for the finiteness invariant.
    pub fn numbers(&self) -> Vec<f64> {
        let mut out = vec![self.timings.total_seconds];
        out.extend(self.timings.stages.values());
        let t = &self.tolerances;
        out.extend([t.null_space, t.stationary, t.product, t.gibbs, t.cptp, t.positivity]);
        match &self.system {
            SystemEcho::Chain {
                beta,
                epsilon,
                compare_epsilon,
                ..
            } => out.extend([*beta, *epsilon, *compare_epsilon]),
            SystemEcho::Explicit { beta, .. } => out.extend(*beta),
        }
        out.extend(
            [
                self.stationary_residual,
                self.min_eigenvalue,
                self.product_residual,
                self.marginal_deviation,
                self.gibbs_residual,
                self.interaction_norm,
            ]
            .into_iter()
            .flatten(),
        );
        if let Some(m) = &self.maximal_support_state {
            out.extend(&m.re);
            out.extend(&m.im);
        }
        if let Some(s) = &self.sepzero {
            out.extend([s.residual_a, s.residual_b, s.residual_ab, s.min_eigenvalue, s.commutator_residual]);
        }
        if let Some(c) = &self.cptp {
            out.extend([c.t, c.trace_deviation, c.min_choi_eigenvalue]);
        }
        if let Some(d) = &self.decomposition {
            out.extend([d.closure_residual, d.adjoint_residual]);
        }
        let chain_numbers = |c: &ChainJson| {
            [
                c.analytic_residual,
                c.max_support_deviation,
                c.epsilon_deviation,
                c.compare_epsilon,
                c.gibbs_residual,
            ]
        };
        out.extend(self.chain.iter().flat_map(chain_numbers));
        for p in self.sweep.iter().flatten() {
            out.extend([p.beta, p.epsilon]);
            out.extend(chain_numbers(&p.chain));
        }
        out
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("report serialization cannot fail");
        s.push('\n');
        s
    }

    pub fn from_json(text: &str) -> serde_json::Result<Self> {
        serde_json::from_str(text)
    }

    /// Human-readable digest.
    pub fn summary(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(s, "scenario: {}", self.scenario);
        match &self.system {
            SystemEcho::Chain {
                length, beta, epsilon, ..
            } => {
                let _ = writeln!(s, "system: XX chain, length {length}, beta {beta}, epsilon {epsilon}");
            }
            SystemEcho::Explicit {
                dim_a,
                dim_b,
                dissipator,
                ..
            } => {
                let _ = writeln!(s, "system: explicit {dim_a}x{dim_b}, {dissipator} dissipator");
            }
        }
        let mut line = |label: &str, value: Option<String>| {
            if let Some(v) = value {
                let _ = writeln!(s, "{label}: {v}");
            }
        };
        line("stationary dimension", self.stationary_dimension.map(|d| d.to_string()));
        line("stationary residual", self.stationary_residual.map(|x| format!("{x:.3e}")));
        line("min eigenvalue", self.min_eigenvalue.map(|x| format!("{x:.3e}")));
        line("product residual", self.product_residual.map(|x| format!("{x:.3e}")));
        line("gibbs residual", self.gibbs_residual.map(|x| format!("{x:.3e}")));
        line("decomposition blocks", self.decomposition_blocks.map(|d| d.to_string()));
        if let Some(c) = &self.chain {
            line("chain reproduction", Some(if c.passed { "pass" } else { "fail" }.into()));
        }
        if let Some(points) = &self.sweep {
            let passed = points.iter().filter(|p| p.chain.passed).count();
            line("sweep", Some(format!("{passed}/{} points pass", points.len())));
        }
        for (name, v) in self.verdicts.iter() {
            line(&format!("verdict {name}"), Some(v.as_str().into()));
        }
        for note in &self.notes {
            line("note", Some(note.clone()));
        }
        line("wall time", Some(format!("{:.3}s", self.timings.total_seconds)));
        s
    }
}
