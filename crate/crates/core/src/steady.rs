//! Stationary states of a Liouvillian.
//!
//! The mean ergodic projector is built spectrally: with `V` an orthonormal
//! basis of `ker L` and `W` one of `ker L†`, the projection onto the kernel
//! along the range is `P = V (W†V)⁻¹ W†`. The zero eigenvalue is semisimple
//! exactly when `W†V` is invertible.

use faer::Mat;

use crate::error::{Error, Result};
use crate::model::{assemble_liouvillian, lift_local, HamiltonianDecomposition, JumpSet, Liouvillian};
use crate::tensor::{
    commutator, devectorize, hermitian_basis, hs_inner, hermitian_parts, kernel_pair, kron, partial_trace, solve, vectorize,
    ComplexMatrix, CompositeDims, Subsystem, C64, DEFAULT_NULL_TOL,
};

/// Frobenius tolerance for `‖L(ρ)‖` on a trace-one stationary state.
pub const STATIONARY_TOL: f64 = 1e-8;

/// Smallest singular value of `W†V` accepted as a semisimple zero eigenvalue.
const SEMISIMPLE_TOL: f64 = 1e-8;

/// Candidates whose component outside the current span is smaller than
/// this (relative to their norm) are discarded as dependent.
const INDEPENDENCE_TOL: f64 = 1e-6;

#[derive(Clone, Debug)]
pub struct StationaryBasis {
    /// Complex dimension of `ker L`.
    pub dimension: usize,
    /// Linearly independent stationary density matrices, maximal-support
    /// state first.
    pub states: Vec<ComplexMatrix>,
    /// Orthonormal kernel vectors, devectorized.
    pub raw_kernel: Vec<ComplexMatrix>,
}

/// Kernel data of one generator, shared by the projector, the
/// maximal-support state and the stationary basis.
#[derive(Clone, Debug)]
pub struct SteadyStateAnalysis {
    dim: usize,
    right: Mat<C64>,
    left: Mat<C64>,
    /// `(W†V)⁻¹ W†`, so that `P = right · coeffs`.
    coeffs: Mat<C64>,
    overlap: f64,
}

impl SteadyStateAnalysis {
    pub fn new(liou: &Liouvillian, tol: f64) -> Result<Self> {
        Self::from_superoperator(&liou.matrix, tol)
    }

    pub fn from_superoperator(matrix: &ComplexMatrix, tol: f64) -> Result<Self> {
        let n2 = matrix.rows();
        let dim = (n2 as f64).sqrt().round() as usize;
        if dim * dim != n2 || !matrix.is_square() {
            return Err(Error::NotPerfectSquare(n2));
        }
        let (right, left) = kernel_pair(matrix.as_faer(), tol)?;
        if right.ncols() == 0 {
            return Err(Error::NoStationaryState);
        }
        let gram = left.adjoint() * &right;
        let overlap = gram
            .singular_values()
            .map_err(|e| Error::Decomposition(format!("{e:?}")))?
            .last()
            .copied()
            .unwrap_or(0.0);
        if overlap <= SEMISIMPLE_TOL {
            return Err(Error::NonSemisimpleZero(overlap));
        }
        let coeffs = solve(gram.as_ref(), left.adjoint().to_owned().as_ref());
        Ok(Self {
            dim,
            right,
            left,
            coeffs,
            overlap,
        })
    }

    /// Orthonormal basis of `ker L†` as columns of vectorized operators.
    pub(crate) fn left_kernel(&self) -> &Mat<C64> {
        &self.left
    }

    pub fn kernel_dimension(&self) -> usize {
        self.right.ncols()
    }

    /// Smallest singular value of `W†V`; bounded away from zero for a
    /// semisimple zero eigenvalue.
    pub fn kernel_range_overlap(&self) -> f64 {
        self.overlap
    }

    pub fn raw_kernel(&self) -> Vec<ComplexMatrix> {
        let n2 = self.dim * self.dim;
        (0..self.right.ncols())
            .map(|j| devectorize(&(0..n2).map(|i| self.right[(i, j)]).collect::<Vec<_>>()).expect("square length"))
            .collect()
    }

    /// `P(x)`.
    pub fn project(&self, x: &ComplexMatrix) -> ComplexMatrix {
        let v = vectorize(x);
        let col = Mat::from_fn(v.len(), 1, |i, _| v[i]);
        let out = &self.right * (&self.coeffs * &col);
        devectorize(&(0..v.len()).map(|i| out[(i, 0)]).collect::<Vec<_>>()).expect("square length")
    }

    /// `P` as a `d² × d²` superoperator.
    pub fn projector(&self) -> ComplexMatrix {
        ComplexMatrix::from_faer(&self.right * &self.coeffs)
    }

    /// `P(I/d)`.
    pub fn maximal_support_state(&self) -> Result<ComplexMatrix> {
        let mixed = ComplexMatrix::identity(self.dim).scale_real(1.0 / self.dim as f64);
        let rho = self.project(&mixed).hermitian_part();
        if !rho.is_density(STATIONARY_TOL) {
            return Err(Error::NoStationaryState);
        }
        Ok(rho)
    }

    pub fn stationary_basis(&self) -> Result<StationaryBasis> {
        let raw_kernel = self.raw_kernel();
        let dimension = raw_kernel.len();
        let mut candidates = vec![self.maximal_support_state()?];
        for h in hermitian_basis(&hermitian_parts(&raw_kernel), INDEPENDENCE_TOL) {
            let eig = h.eigh()?;
            let n = self.dim;
            let part = |sign: f64| {
                let w: Vec<f64> = eig.values.iter().map(|&x| (sign * x).max(0.0)).collect();
                let u = &eig.vectors;
                &ComplexMatrix::from_fn(n, n, |i, j| u.get(i, j) * w[j]) * &u.adjoint()
            };
            for sign in [1.0, -1.0] {
                let p = self.project(&part(sign)).hermitian_part();
                let t = p.trace().re;
                if t > INDEPENDENCE_TOL {
                    candidates.push(p.scale_real(1.0 / t));
                }
            }
        }

        let mut states: Vec<ComplexMatrix> = Vec::new();
        let mut ortho: Vec<ComplexMatrix> = Vec::new();
        for c in candidates {
            if states.len() == dimension {
                break;
            }
            if !c.is_density(STATIONARY_TOL) {
                continue;
            }
            let mut r = c.clone();
            for q in &ortho {
                let k = hs_inner(q, &r)?;
                r = &r - &q.scale(k);
            }
            let norm = r.frobenius_norm();
            if norm > INDEPENDENCE_TOL * c.frobenius_norm() {
                ortho.push(r.scale_real(1.0 / norm));
                states.push(c);
            }
        }
        if states.is_empty() {
            return Err(Error::NoStationaryState);
        }
        Ok(StationaryBasis {
            dimension,
            states,
            raw_kernel,
        })
    }
}

pub fn stationary_basis(liou: &Liouvillian, tol: f64) -> Result<StationaryBasis> {
    SteadyStateAnalysis::new(liou, tol)?.stationary_basis()
}

pub fn mean_ergodic_projector(liou: &Liouvillian) -> Result<ComplexMatrix> {
    Ok(SteadyStateAnalysis::new(liou, DEFAULT_NULL_TOL)?.projector())
}

pub fn maximal_support_state(liou: &Liouvillian) -> Result<ComplexMatrix> {
    SteadyStateAnalysis::new(liou, DEFAULT_NULL_TOL)?.maximal_support_state()
}

/// Marginals of a composite state and the distance to their product.
#[derive(Clone, Debug)]
pub struct ProductFactorization {
    pub rho_a: ComplexMatrix,
    pub rho_b: ComplexMatrix,
    /// `‖ρ̄ − ρ_a ⊗ ρ_b‖_F`.
    pub residual: f64,
}

#[derive(Clone, Debug)]
pub struct ProductCheck {
    pub factorization: ProductFactorization,
    pub is_product: bool,
    /// `‖Tr_B ρ̄ − ρ̂_A‖_F`.
    pub marginal_deviation: f64,
    pub marginal_matches: bool,
}

impl ProductCheck {
    /// Product form with the expected first marginal.
    pub fn passed(&self) -> bool {
        self.is_product && self.marginal_matches
    }
}

pub fn product_factor_check(
    rho_bar: &ComplexMatrix,
    dims: CompositeDims,
    rho_hat_a: &ComplexMatrix,
    tol: f64,
) -> Result<ProductCheck> {
    if rho_hat_a.rows() != dims.dim_a || rho_hat_a.cols() != dims.dim_a {
        return Err(Error::DimensionMismatch(format!(
            "target marginal of size {} for dim_a = {}",
            rho_hat_a.rows(),
            dims.dim_a
        )));
    }
    let rho_a = partial_trace(rho_bar, dims, Subsystem::A)?;
    let rho_b = partial_trace(rho_bar, dims, Subsystem::B)?;
    let residual = rho_bar.distance(&kron(&rho_a, &rho_b));
    let marginal_deviation = rho_a.distance(rho_hat_a);
    Ok(ProductCheck {
        is_product: residual <= tol,
        marginal_matches: marginal_deviation <= tol,
        marginal_deviation,
        factorization: ProductFactorization { rho_a, rho_b, residual },
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SepzeroVerdict {
    /// Preconditions hold and all three commutators vanish.
    Holds,
    /// Preconditions hold but some commutator exceeds the tolerance.
    Violated,
    PreconditionsUnmet,
}

#[derive(Clone, Debug)]
pub struct SepzeroDiagnostics {
    /// `‖[ρ_A, H_A]‖_F` with `ρ_A = Tr_B ρ̄ / Tr ρ̄`.
    pub residual_a: f64,
    /// `‖[ρ_B, H_B]‖_F` with `ρ_B = Tr_A ρ̄ / Tr ρ̄`.
    pub residual_b: f64,
    /// `‖[ρ̄, H_AB]‖_F`.
    pub residual_ab: f64,
    pub min_eigenvalue: f64,
    /// `‖[ρ̄, H]‖_F`.
    pub commutator_residual: f64,
    pub product_residual: f64,
    pub verdict: SepzeroVerdict,
}

/// Commutator consequences of a positive definite product stationary state
/// that commutes with `H`.
pub fn sepzero_diagnostics(
    rho_bar: &ComplexMatrix,
    hdec: &HamiltonianDecomposition,
    tol: f64,
) -> Result<SepzeroDiagnostics> {
    let dims = hdec.dims;
    if rho_bar.rows() != dims.total() || rho_bar.cols() != dims.total() {
        return Err(Error::DimensionMismatch(format!(
            "state of size {} for total dimension {}",
            rho_bar.rows(),
            dims.total()
        )));
    }
    let tr = rho_bar.trace().re;
    let rho_a = partial_trace(rho_bar, dims, Subsystem::A)?.scale_real(1.0 / tr);
    let rho_b = partial_trace(rho_bar, dims, Subsystem::B)?.scale_real(1.0 / tr);
    let min_eigenvalue = rho_bar.min_eigenvalue()?;
    let commutator_residual = commutator(rho_bar, &hdec.h_total).frobenius_norm();
    let product_residual = rho_bar.scale_real(1.0 / tr).distance(&kron(&rho_a, &rho_b));

    let residual_a = commutator(&rho_a, &hdec.h_a).frobenius_norm();
    let residual_b = commutator(&rho_b, &hdec.h_b).frobenius_norm();
    let residual_ab = commutator(rho_bar, &hdec.h_ab).frobenius_norm();

    if min_eigenvalue <= tol {
        log::warn!("stationary state is singular (min eigenvalue {min_eigenvalue:e}); commutator identities need not hold");
    }
    let verdict = if min_eigenvalue <= tol || product_residual > tol || commutator_residual > tol {
        SepzeroVerdict::PreconditionsUnmet
    } else if residual_a.max(residual_b).max(residual_ab) <= tol {
        SepzeroVerdict::Holds
    } else {
        SepzeroVerdict::Violated
    };
    Ok(SepzeroDiagnostics {
        residual_a,
        residual_b,
        residual_ab,
        min_eigenvalue,
        commutator_residual,
        product_residual,
        verdict,
    })
}

/// Generator of a local jump set alone (no Hamiltonian).
pub(crate) fn local_generator(local: &JumpSet) -> Result<Liouvillian> {
    let zero = ComplexMatrix::zeros(local.dim(), local.dim());
    assemble_liouvillian(&HamiltonianDecomposition::local(&zero)?, local)
}

/// Unique stationary state of an ergodic local dissipator.
pub fn local_steady_state(local: &JumpSet, tol: f64) -> Result<ComplexMatrix> {
    let analysis = SteadyStateAnalysis::new(&local_generator(local)?, tol)?;
    match analysis.kernel_dimension() {
        1 => analysis.maximal_support_state(),
        k => Err(Error::NotErgodic(k)),
    }
}

/// `e^{-βH} / Z`, evaluated with the spectrum shifted for stability.
pub fn gibbs_state(h: &ComplexMatrix, beta: f64) -> Result<ComplexMatrix> {
    let emin = h.min_eigenvalue()?;
    let unnormalized = h.hermitian_function(|x| (-beta * (x - emin)).exp())?;
    Ok(unnormalized.trace_normalized().hermitian_part())
}

#[derive(Clone, Debug)]
pub struct GibbsNoGo {
    pub beta: f64,
    /// `‖L(ρ_β)‖_F`.
    pub residual: f64,
    pub gibbs_stationary: bool,
    /// `‖H_AB‖_F`.
    pub interaction_norm: f64,
    pub interaction_vanishes: bool,
    /// Stationary state of the local dissipator.
    pub rho_hat_a: ComplexMatrix,
}

/// Tests whether `e^{-βH}/Z` is stationary under `-i[H, ·] + D_A ⊗ I_B`.
pub fn gibbs_nogo(hdec: &HamiltonianDecomposition, local: &JumpSet, beta: f64, tol: f64) -> Result<GibbsNoGo> {
    if !beta.is_finite() {
        return Err(Error::InvalidParameter(format!("beta must be finite, got {beta}")));
    }
    let rho_hat_a = local_steady_state(local, DEFAULT_NULL_TOL)?;
    let lifted = lift_local(local, hdec.dims)?;
    let liou = assemble_liouvillian(hdec, &lifted)?;
    let rho_beta = gibbs_state(&hdec.h_total, beta)?;
    let residual = liou.apply_direct(&rho_beta)?.frobenius_norm();
    let interaction_norm = hdec.interaction_norm();
    Ok(GibbsNoGo {
        beta,
        residual,
        gibbs_stationary: residual <= tol,
        interaction_norm,
        interaction_vanishes: interaction_norm <= tol,
        rho_hat_a,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{reset_dissipator_jumps, JumpSet};
    use crate::random;
    use crate::tensor::{pauli, ZERO};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn qubit(h: ComplexMatrix, jumps: JumpSet) -> Liouvillian {
        assemble_liouvillian(&HamiltonianDecomposition::local(&h).unwrap(), &jumps).unwrap()
    }

    fn zero_qubit() -> Liouvillian {
        qubit(ComplexMatrix::zeros(2, 2), JumpSet::empty(2))
    }

    fn dephasing() -> Liouvillian {
        qubit(ComplexMatrix::zeros(2, 2), JumpSet::from_jumps(2, vec![pauli::z()]).unwrap())
    }

    fn target() -> ComplexMatrix {
        ComplexMatrix::from_real_diagonal(&[0.7, 0.3])
    }

    fn reset_qubit() -> Liouvillian {
        qubit(ComplexMatrix::zeros(2, 2), reset_dissipator_jumps(&target(), 1.0).unwrap())
    }

    #[test]
    fn zero_generator_has_full_kernel() {
        let b = stationary_basis(&zero_qubit(), DEFAULT_NULL_TOL).unwrap();
        assert_eq!(b.dimension, 4);
        assert_eq!(b.states.len(), 4);
        let p = mean_ergodic_projector(&zero_qubit()).unwrap();
        assert!(p.max_abs_diff(&ComplexMatrix::identity(4)) < 1e-12);
    }

    #[test]
    fn reset_qubit_is_ergodic() {
        let b = stationary_basis(&reset_qubit(), DEFAULT_NULL_TOL).unwrap();
        assert_eq!(b.dimension, 1);
        assert!(b.states[0].max_abs_diff(&target()) < 1e-12);
        let analysis = SteadyStateAnalysis::new(&reset_qubit(), DEFAULT_NULL_TOL).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for _ in 0..10 {
            let rho = random::density(2, &mut rng);
            assert!(analysis.project(&rho).max_abs_diff(&target()) < 1e-12);
        }
    }

    #[test]
    fn dephasing_keeps_diagonal_states() {
        let b = stationary_basis(&dephasing(), DEFAULT_NULL_TOL).unwrap();
        assert_eq!(b.dimension, 2);
        assert_eq!(b.states.len(), 2);
        for s in &b.states {
            assert!(s.get(0, 1).norm() < 1e-12);
            assert!(s.is_density(1e-12));
        }
        let max = maximal_support_state(&dephasing()).unwrap();
        assert!(max.max_abs_diff(&ComplexMatrix::identity(2).scale_real(0.5)) < 1e-12);
        let gap = &max.scale_real(2.0) - &ComplexMatrix::unit(2, 0, 0);
        assert!(gap.max_abs_diff(&ComplexMatrix::from_real_diagonal(&[0.0, 1.0])) < 1e-12);
        assert!(gap.is_psd(1e-12));
    }

    #[test]
    fn projector_properties() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let dims = CompositeDims::new(2, 2).unwrap();
        let h = HamiltonianDecomposition::local(&random::hermitian(4, &mut rng)).unwrap();
        let jumps = JumpSet::from_jumps(4, vec![random::ginibre(4, &mut rng)]).unwrap();
        let liou = assemble_liouvillian(&h, &jumps).unwrap();
        let _ = dims;
        let p = mean_ergodic_projector(&liou).unwrap();
        assert!((&p * &p).max_abs_diff(&p) < 1e-9);
        assert!((&liou.matrix * &p).max_abs() < 1e-9);
        assert!((&p * &liou.matrix).max_abs() < 1e-9);
        let analysis = SteadyStateAnalysis::new(&liou, DEFAULT_NULL_TOL).unwrap();
        for _ in 0..20 {
            let rho = random::density(4, &mut rng);
            let out = analysis.project(&rho);
            assert!(out.is_density(1e-9));
            assert!(analysis.project(&out).max_abs_diff(&out) < 1e-10);
        }
    }

    #[test]
    fn product_check_examples() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let dims = CompositeDims::new(2, 3).unwrap();
        let ra = random::density(2, &mut rng);
        let rb = random::density(3, &mut rng);
        let check = product_factor_check(&kron(&ra, &rb), dims, &ra, 1e-12).unwrap();
        assert!(check.passed());
        assert!(check.factorization.residual <= 1e-13);

        let dims = CompositeDims::new(2, 2).unwrap();
        let s = std::f64::consts::FRAC_1_SQRT_2;
        let phi = [C64::new(s, 0.0), ZERO, ZERO, C64::new(s, 0.0)];
        let bell = ComplexMatrix::outer(&phi, &phi);
        let half = ComplexMatrix::identity(2).scale_real(0.5);
        let check = product_factor_check(&bell, dims, &half, 1e-8).unwrap();
        assert!(!check.is_product);
        assert!(check.marginal_matches);
        assert!((check.factorization.residual - 3f64.sqrt() / 2.0).abs() < 1e-14);
    }

    #[test]
    fn sepzero_on_commuting_product() {
        let mut rng = ChaCha8Rng::seed_from_u64(13);
        let dims = CompositeDims::new(2, 3).unwrap();
        let ha = random::hermitian(2, &mut rng);
        let hb0 = random::hermitian(3, &mut rng);
        let hb = &hb0 - &ComplexMatrix::identity(3).scale(hb0.trace() / 3.0);
        let h = &kron(&ha, &ComplexMatrix::identity(3)) + &kron(&ComplexMatrix::identity(2), &hb);
        let hdec = crate::model::decompose_hamiltonian(&h, dims).unwrap();
        let rho = kron(&gibbs_state(&ha, 0.8).unwrap(), &gibbs_state(&hb, 0.8).unwrap());
        let diag = sepzero_diagnostics(&rho, &hdec, 1e-12).unwrap();
        assert_eq!(diag.verdict, SepzeroVerdict::Holds, "{diag:?}");
        assert!(diag.residual_a.max(diag.residual_b).max(diag.residual_ab) <= 1e-12);

        let noisy = random::density(6, &mut rng);
        let diag = sepzero_diagnostics(&noisy, &hdec, 1e-9).unwrap();
        assert_eq!(diag.verdict, SepzeroVerdict::PreconditionsUnmet);
    }

    #[test]
    fn gibbs_examples() {
        let mut rng = ChaCha8Rng::seed_from_u64(19);
        let dims = CompositeDims::new(2, 2).unwrap();
        let ha = random::hermitian(2, &mut rng);
        let h = &kron(&ha, &ComplexMatrix::identity(2)) + &kron(&ComplexMatrix::identity(2), &pauli::z());
        let hdec = crate::model::decompose_hamiltonian(&h, dims).unwrap();
        let beta = 0.9;
        let local = reset_dissipator_jumps(&gibbs_state(&ha, beta).unwrap(), 1.0).unwrap();
        let rep = gibbs_nogo(&hdec, &local, beta, 1e-10).unwrap();
        assert!(rep.residual <= 1e-10 && rep.gibbs_stationary && rep.interaction_vanishes);

        let hxx = kron(&pauli::x(), &pauli::x());
        let hdec = crate::model::decompose_hamiltonian(&hxx, dims).unwrap();
        let mixed = reset_dissipator_jumps(&ComplexMatrix::identity(2).scale_real(0.5), 1.0).unwrap();
        let rep = gibbs_nogo(&hdec, &mixed, 0.0, 1e-12).unwrap();
        assert!(rep.residual <= 1e-12);

        let dephase = JumpSet::from_jumps(2, vec![pauli::z()]).unwrap();
        assert!(matches!(gibbs_nogo(&hdec, &dephase, 1.0, 1e-10), Err(Error::NotErgodic(2))));
    }
}
