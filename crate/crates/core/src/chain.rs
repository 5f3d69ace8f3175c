//! Boundary-driven XX spin chain.
//!
//! Spin picture: site 1 is the most significant tensor factor, `|1⟩` is the
//! occupied state and `a = |0⟩⟨1|` on each site. For nearest-neighbour
//! hopping the Jordan–Wigner strings cancel, so
//! `H = Σ_j (a_j† a_{j+1} + a_{j+1}† a_j)` just swaps adjacent occupations.
//! The first site is reset to `ρ̂_A ∝ diag(1, e^{-β})` at rate `ε`.

use crate::error::{Error, Result};
use crate::model::{
    assemble_liouvillian, decompose_hamiltonian, lift_local, reset_dissipator_jumps, HamiltonianDecomposition,
    JumpSet, Liouvillian,
};
use crate::steady::{gibbs_nogo, SteadyStateAnalysis};
use crate::tensor::{ComplexMatrix, CompositeDims, DEFAULT_NULL_TOL, ONE, ZERO};
use crate::uniqueness::{theorem23_verdict, Theorem23Verdict};

/// `‖L(ρ̄)‖_F` accepted for the closed-form steady state.
pub const ANALYTIC_TOL: f64 = 1e-9;

/// Frobenius agreement required between computed and closed-form states.
pub const STATE_TOL: f64 = 1e-8;

/// Gibbs residual above which the Gibbs state counts as rejected.
pub const GIBBS_REJECT: f64 = 1e-3;

fn check_length(length: usize, min: usize) -> Result<usize> {
    if length < min {
        return Err(Error::InvalidParameter(format!("chain length must be at least {min}, got {length}")));
    }
    let dim = 1usize
        .checked_shl(length as u32)
        .filter(|_| length < usize::BITS as usize)
        .ok_or(Error::DimensionCap {
            dim: usize::MAX,
            cap: crate::dim_cap(),
        })?;
    crate::check_dim(dim)?;
    Ok(dim)
}

fn occupation(b: usize, site: usize, length: usize) -> usize {
    (b >> (length - site)) & 1
}

/// `Σ_j (a_j† a_{j+1} + h.c.)` on `ℓ` sites, with hopping `s` on the first
/// bond and 1 elsewhere.
pub fn xx_chain_hamiltonian_scaled(length: usize, first_bond: f64) -> Result<ComplexMatrix> {
    let dim = check_length(length, 2)?;
    let mut entries = vec![ZERO; dim * dim];
    for b in 0..dim {
        for j in 1..length {
            if occupation(b, j, length) != occupation(b, j + 1, length) {
                let flipped = b ^ (1 << (length - j)) ^ (1 << (length - j - 1));
                let t = if j == 1 { first_bond } else { 1.0 };
                entries[flipped * dim + b] += ONE * t;
            }
        }
    }
    ComplexMatrix::new(dim, dim, entries)
}

pub fn xx_chain_hamiltonian(length: usize) -> Result<ComplexMatrix> {
    xx_chain_hamiltonian_scaled(length, 1.0)
}

/// `N = Σ_j a_j† a_j`, diagonal with the population count of each basis state.
pub fn number_operator(length: usize) -> Result<ComplexMatrix> {
    let dim = check_length(length, 1)?;
    let counts: Vec<f64> = (0..dim).map(|b| b.count_ones() as f64).collect();
    Ok(ComplexMatrix::from_real_diagonal(&counts))
}

/// `diag(1, e^{-β}) / (1 + e^{-β})`.
pub fn site_target(beta: f64) -> Result<ComplexMatrix> {
    if !(beta >= 0.0 && beta.is_finite()) {
        return Err(Error::InvalidParameter(format!("beta must be finite and nonnegative, got {beta}")));
    }
    let w = (-beta).exp();
    Ok(ComplexMatrix::from_real_diagonal(&[1.0 / (1.0 + w), w / (1.0 + w)]))
}

/// `e^{-βN} / (1 + e^{-β})^ℓ`.
pub fn analytic_steady_state(length: usize, beta: f64) -> Result<ComplexMatrix> {
    let dim = check_length(length, 1)?;
    let site = site_target(beta)?;
    let (p0, p1) = (site.get(0, 0).re, site.get(1, 1).re);
    let diag: Vec<f64> = (0..dim)
        .map(|b| {
            let n = b.count_ones() as i32;
            p1.powi(n) * p0.powi(length as i32 - n)
        })
        .collect();
    Ok(ComplexMatrix::from_real_diagonal(&diag))
}

#[derive(Clone, Debug)]
pub struct ChainModel {
    pub length: usize,
    pub beta: f64,
    pub epsilon: f64,
    pub hamiltonian: ComplexMatrix,
    pub number_op: ComplexMatrix,
    /// Reset jumps on site 1 alone.
    pub local_jumps: JumpSet,
    /// The same jumps lifted to the whole chain.
    pub boundary_jumps: JumpSet,
    pub rho_hat_a: ComplexMatrix,
    /// Site 1 against the rest.
    pub dims: CompositeDims,
}

impl ChainModel {
    pub fn decomposition(&self) -> Result<HamiltonianDecomposition> {
        decompose_hamiltonian(&self.hamiltonian, self.dims)
    }

    pub fn liouvillian(&self) -> Result<Liouvillian> {
        assemble_liouvillian(&self.decomposition()?, &self.boundary_jumps)
    }
}

/// XX chain with its first site reset to [`site_target`] at rate `epsilon`.
///
/// `beta = 0` is accepted: the target is then maximally mixed.
pub fn boundary_reset_model(length: usize, beta: f64, epsilon: f64) -> Result<ChainModel> {
    if !(epsilon > 0.0 && epsilon.is_finite()) {
        return Err(Error::InvalidParameter(format!("epsilon must be positive, got {epsilon}")));
    }
    let hamiltonian = xx_chain_hamiltonian(length)?;
    let number_op = number_operator(length)?;
    let rho_hat_a = site_target(beta)?;
    let dims = CompositeDims::new(2, 1 << (length - 1))?;
    let local_jumps = reset_dissipator_jumps(&rho_hat_a, epsilon)?;
    let boundary_jumps = lift_local(&local_jumps, dims)?;
    Ok(ChainModel {
        length,
        beta,
        epsilon,
        hamiltonian,
        number_op,
        local_jumps,
        boundary_jumps,
        rho_hat_a,
        dims,
    })
}

#[derive(Clone, Debug)]
pub struct ChainReproduction {
    pub length: usize,
    pub beta: f64,
    pub epsilon: f64,
    pub compare_epsilon: f64,
    /// `‖L(ρ̄)‖_F` for the closed-form state.
    pub analytic_residual: f64,
    pub stationary_dimension: usize,
    /// `‖ρ_max − ρ̄‖_F`.
    pub max_support_deviation: f64,
    pub theorem23: Theorem23Verdict,
    /// `‖ρ_max(ε) − ρ_max(ε')‖_F`.
    pub epsilon_deviation: f64,
    pub gibbs_residual: f64,
    pub clauses: [bool; 5],
}

impl ChainReproduction {
    pub fn passed(&self) -> bool {
        self.clauses.iter().all(|&c| c)
    }
}

/// Runs the full chain pipeline at `(length, beta, epsilon)` and checks
/// the closed-form steady state, its uniqueness, its independence of the
/// reset rate (against `compare_epsilon`) and that it is not a Gibbs state.
///
/// At `beta = 0` the steady state is maximally mixed and therefore equal
/// to the Gibbs state, so the last clause instead requires a vanishing
/// Gibbs residual.
pub fn reproduce_chain(length: usize, beta: f64, epsilon: f64, compare_epsilon: f64) -> Result<ChainReproduction> {
    let model = boundary_reset_model(length, beta, epsilon)?;
    let hdec = model.decomposition()?;
    let liou = assemble_liouvillian(&hdec, &model.boundary_jumps)?;
    let analytic = analytic_steady_state(length, beta)?;
    let analytic_residual = liou.apply(&analytic)?.frobenius_norm();

    let analysis = SteadyStateAnalysis::new(&liou, DEFAULT_NULL_TOL)?;
    let stationary_dimension = analysis.kernel_dimension();
    let rho = analysis.maximal_support_state()?;
    let max_support_deviation = rho.distance(&analytic);

    let theorem23 = theorem23_verdict(&hdec, &model.local_jumps)?.verdict;

    let other = boundary_reset_model(length, beta, compare_epsilon)?.liouvillian()?;
    let rho_other = SteadyStateAnalysis::new(&other, DEFAULT_NULL_TOL)?.maximal_support_state()?;
    let epsilon_deviation = rho.distance(&rho_other);

    let gibbs_residual = gibbs_nogo(&hdec, &model.local_jumps, beta, ANALYTIC_TOL)?.residual;
    let gibbs_ok = if beta > 0.0 {
        gibbs_residual > GIBBS_REJECT
    } else {
        gibbs_residual <= ANALYTIC_TOL
    };

    let clauses = [
        analytic_residual <= ANALYTIC_TOL,
        max_support_deviation <= STATE_TOL,
        theorem23 == Theorem23Verdict::UniquePositiveDefinite,
        epsilon_deviation <= STATE_TOL,
        gibbs_ok,
    ];
    Ok(ChainReproduction {
        length,
        beta,
        epsilon,
        compare_epsilon,
        analytic_residual,
        stationary_dimension,
        max_support_deviation,
        theorem23,
        epsilon_deviation,
        gibbs_residual,
        clauses,
    })
}
