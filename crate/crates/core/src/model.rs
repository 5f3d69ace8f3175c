//! Lindbladian generators with boundary-local dissipation.
//!
//! A generator is assembled from a [`HamiltonianDecomposition`] and a
//! [`JumpSet`] (Lamb shift `K` plus jump operators `L_α`):
//!
//! ```text
//! L(ρ) = -i[H + K, ρ] + Σ_α ( L_α ρ L_α† - ½ {L_α† L_α, ρ} )
//! ```

use crate::error::{Error, Result};
use crate::tensor::{
    anticommutator, apply_superoperator, commutator, kron, matrix_exp, partial_trace, require_square, ComplexMatrix,
    CompositeDims, Subsystem, C64, I, ONE, ZERO,
};

/// Hermiticity tolerance for model inputs, relative to `max(1, max|h|)`.
pub const HERMITIAN_TOL: f64 = 1e-12;

fn check_hermitian(m: &ComplexMatrix, what: &'static str) -> Result<()> {
    require_square(m)?;
    let deviation = m.max_abs_diff(&m.adjoint());
    if deviation > HERMITIAN_TOL * m.max_abs().max(1.0) {
        return Err(Error::NotHermitian { what, deviation });
    }
    Ok(())
}

/// `H = H_A ⊗ I + H_AB + I ⊗ H_B` with `Tr_A H_AB = Tr_B H_AB = 0`.
///
/// The scalar part of `H` is carried by `h_a`; `h_b` is traceless.
#[derive(Clone, Debug)]
pub struct HamiltonianDecomposition {
    pub h_total: ComplexMatrix,
    pub h_a: ComplexMatrix,
    pub h_b: ComplexMatrix,
    pub h_ab: ComplexMatrix,
    pub dims: CompositeDims,
}

impl HamiltonianDecomposition {
    /// Treats `h` as a Hamiltonian on a single system (`dim_b = 1`).
    pub fn local(h: &ComplexMatrix) -> Result<Self> {
        decompose_hamiltonian(h, CompositeDims::local(h.rows())?)
    }

    /// `h_a ⊗ I + h_ab + I ⊗ h_b`.
    pub fn recompose(&self) -> ComplexMatrix {
        let ia = ComplexMatrix::identity(self.dims.dim_a);
        let ib = ComplexMatrix::identity(self.dims.dim_b);
        &(&kron(&self.h_a, &ib) + &self.h_ab) + &kron(&ia, &self.h_b)
    }

    pub fn interaction_norm(&self) -> f64 {
        self.h_ab.frobenius_norm()
    }
}

pub fn decompose_hamiltonian(h: &ComplexMatrix, dims: CompositeDims) -> Result<HamiltonianDecomposition> {
    check_hermitian(h, "hamiltonian")?;
    if h.rows() != dims.total() {
        return Err(Error::DimensionMismatch(format!(
            "hamiltonian of size {} for dims ({}, {})",
            h.rows(),
            dims.dim_a,
            dims.dim_b
        )));
    }
    let (da, db) = (dims.dim_a, dims.dim_b);
    let ia = ComplexMatrix::identity(da);
    let ib = ComplexMatrix::identity(db);
    let scalar = h.trace() / (da * db) as f64;

    let h_a = partial_trace(h, dims, Subsystem::A)?.scale_real(1.0 / db as f64);
    let h_b = &partial_trace(h, dims, Subsystem::B)?.scale_real(1.0 / da as f64) - &ib.scale(scalar);
    let h_ab = &(h - &kron(&h_a, &ib)) - &kron(&ia, &h_b);

    Ok(HamiltonianDecomposition {
        h_total: h.clone(),
        h_a: h_a.hermitian_part(),
        h_b: h_b.hermitian_part(),
        h_ab: h_ab.hermitian_part(),
        dims,
    })
}

/// Lamb-shift operator `K` together with the jump operators `L_α`.
#[derive(Clone, Debug)]
pub struct JumpSet {
    k: ComplexMatrix,
    jumps: Vec<ComplexMatrix>,
}

impl JumpSet {
    pub fn new(k: ComplexMatrix, jumps: Vec<ComplexMatrix>) -> Result<Self> {
        check_hermitian(&k, "lamb shift")?;
        let d = k.rows();
        for l in &jumps {
            if l.rows() != d || l.cols() != d {
                return Err(Error::DimensionMismatch(format!(
                    "jump operator {}x{} with lamb shift of size {d}",
                    l.rows(),
                    l.cols()
                )));
            }
        }
        Ok(Self { k, jumps })
    }

    /// Jump operators with `K = 0`.
    pub fn from_jumps(dim: usize, jumps: Vec<ComplexMatrix>) -> Result<Self> {
        Self::new(ComplexMatrix::zeros(dim, dim), jumps)
    }

    pub fn empty(dim: usize) -> Self {
        Self {
            k: ComplexMatrix::zeros(dim, dim),
            jumps: Vec::new(),
        }
    }

    pub fn dim(&self) -> usize {
        self.k.rows()
    }

    pub fn lamb_shift(&self) -> &ComplexMatrix {
        &self.k
    }

    pub fn jumps(&self) -> &[ComplexMatrix] {
        &self.jumps
    }

    pub fn is_empty(&self) -> bool {
        self.jumps.is_empty()
    }

    /// `Σ_α L_α† L_α`.
    pub fn decay_operator(&self) -> ComplexMatrix {
        let d = self.dim();
        self.jumps
            .iter()
            .fold(ComplexMatrix::zeros(d, d), |acc, l| &acc + &(&l.adjoint() * l))
    }
}

/// `K̂ ⊗ I_B` and `L̂_α ⊗ I_B`.
pub fn lift_local(local: &JumpSet, dims: CompositeDims) -> Result<JumpSet> {
    if local.dim() != dims.dim_a {
        return Err(Error::DimensionMismatch(format!(
            "local jump set of dimension {} for dim_a = {}",
            local.dim(),
            dims.dim_a
        )));
    }
    let ib = ComplexMatrix::identity(dims.dim_b);
    JumpSet::new(
        kron(&local.k, &ib),
        local.jumps.iter().map(|l| kron(l, &ib)).collect(),
    )
}

/// Jump operators `√rate · ρ̂^{1/2} |i⟩⟨j|` whose dissipator is the reset
/// map `X ↦ rate · (Tr[X] ρ̂ − X)`.
pub fn reset_dissipator_jumps(rho_hat: &ComplexMatrix, rate: f64) -> Result<JumpSet> {
    if !(rate > 0.0 && rate.is_finite()) {
        return Err(Error::InvalidParameter(format!("reset rate must be positive, got {rate}")));
    }
    if !rho_hat.is_density(1e-10) {
        return Err(Error::NotDensityMatrix("reset target"));
    }
    let d = rho_hat.rows();
    let root = rho_hat.sqrt_psd(1e-10)?.scale_real(rate.sqrt());
    let mut jumps = Vec::with_capacity(d * d);
    for i in 0..d {
        for j in 0..d {
            jumps.push(ComplexMatrix::from_fn(d, d, |r, c| if c == j { root.get(r, i) } else { ZERO }));
        }
    }
    JumpSet::from_jumps(d, jumps)
}

/// Direct evaluation of `-i[K, ρ] + Σ (L ρ L† − ½{L†L, ρ})`.
pub fn apply_dissipator(jumps: &JumpSet, rho: &ComplexMatrix) -> Result<ComplexMatrix> {
    let d = jumps.dim();
    if rho.rows() != d || rho.cols() != d {
        return Err(Error::DimensionMismatch(format!(
            "density matrix {}x{} for jump set of dimension {d}",
            rho.rows(),
            rho.cols()
        )));
    }
    let mut out = commutator(&jumps.k, rho).scale(-I);
    for l in &jumps.jumps {
        let ld = l.adjoint();
        out = &out + &(&(&(l * rho) * &ld) - &anticommutator(&(&ld * l), rho).scale_real(0.5));
    }
    Ok(out)
}

/// Full generator as a `d² × d²` superoperator on column-stacked operators.
#[derive(Clone, Debug)]
pub struct Liouvillian {
    pub matrix: ComplexMatrix,
    pub dims: CompositeDims,
    pub hamiltonian: HamiltonianDecomposition,
    pub jumps: JumpSet,
}

impl Liouvillian {
    /// Hilbert-space dimension `d`.
    pub fn dim(&self) -> usize {
        self.dims.total()
    }

    /// `L(ρ)` via the superoperator matrix.
    pub fn apply(&self, rho: &ComplexMatrix) -> Result<ComplexMatrix> {
        apply_superoperator(&self.matrix, rho)
    }

    /// `L(ρ)` evaluated directly from `H`, `K` and the jumps.
    pub fn apply_direct(&self, rho: &ComplexMatrix) -> Result<ComplexMatrix> {
        let unitary = commutator(&self.hamiltonian.h_total, rho).scale(-I);
        Ok(&unitary + &apply_dissipator(&self.jumps, rho)?)
    }

    /// Superoperator of the Heisenberg-picture generator `L†`.
    pub fn adjoint_matrix(&self) -> ComplexMatrix {
        self.matrix.adjoint()
    }

    /// `H + K`.
    pub fn effective_hamiltonian(&self) -> ComplexMatrix {
        &self.hamiltonian.h_total + self.jumps.lamb_shift()
    }
}

/// `I ⊗ a`, i.e. the superoperator of `X ↦ a X`.
pub(crate) fn left_multiplication(a: &ComplexMatrix) -> ComplexMatrix {
    let n = a.rows();
    ComplexMatrix::from_fn(n * n, n * n, |r, c| {
        if r / n == c / n {
            a.get(r % n, c % n)
        } else {
            ZERO
        }
    })
}

/// `bᵀ ⊗ I`, i.e. the superoperator of `X ↦ X b`.
pub(crate) fn right_multiplication(b: &ComplexMatrix) -> ComplexMatrix {
    let n = b.rows();
    ComplexMatrix::from_fn(n * n, n * n, |r, c| {
        if r % n == c % n {
            b.get(c / n, r / n)
        } else {
            ZERO
        }
    })
}

/// Superoperator of `X ↦ [g, X]`.
pub(crate) fn adjoint_action(g: &ComplexMatrix) -> ComplexMatrix {
    &left_multiplication(g) - &right_multiplication(g)
}

pub fn assemble_liouvillian(hdec: &HamiltonianDecomposition, jumps: &JumpSet) -> Result<Liouvillian> {
    let d = hdec.dims.total();
    crate::check_dim(d)?;
    if jumps.dim() != d {
        return Err(Error::DimensionMismatch(format!(
            "jump set of dimension {} for a hamiltonian of dimension {d}",
            jumps.dim()
        )));
    }
    let hk = &hdec.h_total + &jumps.k;
    let mut matrix = adjoint_action(&hk).scale(-I);
    if !jumps.is_empty() {
        let decay = jumps.decay_operator().scale_real(0.5);
        matrix = &matrix - &(&left_multiplication(&decay) + &right_multiplication(&decay));
        for l in &jumps.jumps {
            matrix = &matrix + &kron(&l.conj(), l);
        }
    }
    Ok(Liouvillian {
        matrix,
        dims: hdec.dims,
        hamiltonian: hdec.clone(),
        jumps: jumps.clone(),
    })
}

/// Outcome of the complete-positivity and trace-preservation check of
/// `exp(t L)`.
#[derive(Clone, Debug)]
pub struct CptpReport {
    pub t: f64,
    pub passed: bool,
    /// `max |Tr E(|i⟩⟨j|) − δ_ij|`.
    pub trace_deviation: f64,
    pub min_choi_eigenvalue: f64,
}

/// Choi matrix `Σ_ij |i⟩⟨j| ⊗ E(|i⟩⟨j|)` of a channel given by its
/// superoperator matrix.
pub fn choi_matrix(channel: &ComplexMatrix) -> Result<ComplexMatrix> {
    require_square(channel)?;
    let n2 = channel.rows();
    let d = (n2 as f64).sqrt().round() as usize;
    if d * d != n2 {
        return Err(Error::NotPerfectSquare(n2));
    }
    Ok(ComplexMatrix::from_fn(n2, n2, |r, c| {
        let (i, k) = (r / d, r % d);
        let (j, l) = (c / d, c % d);
        channel.get(k + l * d, i + j * d)
    }))
}

pub fn cptp_check(liou: &Liouvillian, t: f64, tol: f64) -> Result<CptpReport> {
    if !(t > 0.0 && t.is_finite()) {
        return Err(Error::InvalidParameter(format!("evolution time must be positive, got {t}")));
    }
    let d = liou.dim();
    let channel = matrix_exp(&liou.matrix.scale_real(t))?;
    let mut trace_deviation: f64 = 0.0;
    for i in 0..d {
        for j in 0..d {
            let col = i + j * d;
            let tr: C64 = (0..d).map(|k| channel.get(k + k * d, col)).sum();
            let want = if i == j { ONE } else { ZERO };
            trace_deviation = trace_deviation.max((tr - want).norm());
        }
    }
    let min_choi_eigenvalue = choi_matrix(&channel)?.min_eigenvalue()?;
    Ok(CptpReport {
        t,
        passed: trace_deviation <= tol && min_choi_eigenvalue >= -tol,
        trace_deviation,
        min_choi_eigenvalue,
    })
}
