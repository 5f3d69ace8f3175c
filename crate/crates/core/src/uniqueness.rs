//! Uniqueness of stationary states: commutant tests, product closure and
//! the ergodic decomposition of the stationary manifold.

use faer::Mat;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::error::{Error, Result};
use crate::model::{HamiltonianDecomposition, JumpSet, Liouvillian};
use crate::steady::{local_steady_state, SteadyStateAnalysis};
use crate::tensor::{
    columns, commutator, devectorize, from_columns, hermitian_basis, hermitian_parts, kron, null_space_floor, null_space_mat, vectorize,
    ComplexMatrix, CompositeDims, C64, DEFAULT_NULL_TOL, I, ONE,
};

/// Commutator residual accepted for commutant elements.
pub const COMMUTANT_TOL: f64 = 1e-9;

/// Minimal eigenvalue below which a stationary state counts as singular.
pub const POSITIVITY_TOL: f64 = 1e-10;

/// Residual accepted when testing closure of `ker L†` under products.
pub const ALGEBRA_TOL: f64 = 1e-8;

/// Rank cut for unit-normalized candidates in the product closure.
const CLOSURE_RANK_TOL: f64 = 1e-8;

/// Minimum eigenvalue gap separating blocks of a generic center element.
const CENTER_GAP_TOL: f64 = 1e-6;

const MAX_CENTER_ATTEMPTS: usize = 32;

#[derive(Clone, Debug)]
pub struct CommutantResult {
    pub dimension: usize,
    /// Hilbert–Schmidt orthonormal basis of the commutant.
    pub basis: Vec<ComplexMatrix>,
    /// Generators after closing under adjoints.
    pub generators: Vec<ComplexMatrix>,
}

impl CommutantResult {
    /// Largest `‖[G, X]‖_F` over generators and basis elements.
    pub fn max_residual(&self) -> f64 {
        let mut worst: f64 = 0.0;
        for g in &self.generators {
            for x in &self.basis {
                worst = worst.max(commutator(g, x).frobenius_norm());
            }
        }
        worst
    }

    /// A hermitian, traceless, unit-norm commutant element, if the
    /// commutant is larger than the scalars.
    pub fn witness(&self) -> Option<ComplexMatrix> {
        let d = self.generators.first()?.rows();
        let eye = ComplexMatrix::identity(d);
        hermitian_parts(&self.basis)
            .into_iter()
            .map(|h| &h - &eye.scale(h.trace() / d as f64))
            .max_by(|a, b| a.frobenius_norm().total_cmp(&b.frobenius_norm()))
            .filter(|h| h.frobenius_norm() > 1e-6)
            .map(|h| h.scale_real(1.0 / h.frobenius_norm()))
    }
}

/// Column `vec(X)` for each orthonormal column of `basis`, devectorized.
fn operators(basis: &Mat<C64>) -> Vec<ComplexMatrix> {
    columns(basis.as_ref())
        .iter()
        .map(|v| devectorize(v).expect("square length"))
        .collect()
}

/// `{X : [G, X] = 0}` for a hermitian `g`, read off its spectrum: the
/// singular vectors of `X ↦ [g, X]` are `|u_i⟩⟨u_j|` with singular value
/// `|λ_i − λ_j|`.
fn hermitian_commutant(g: &ComplexMatrix, tol: f64) -> Result<Mat<C64>> {
    let eig = g.eigh()?;
    let d = g.rows();
    let spread = eig.values[d - 1] - eig.values[0];
    let u = &eig.vectors;
    let pairs: Vec<(usize, usize)> = (0..d)
        .flat_map(|i| (0..d).map(move |j| (i, j)))
        .filter(|&(i, j)| (eig.values[i] - eig.values[j]).abs() <= tol * spread)
        .collect();
    // vec(|u_i⟩⟨u_j|)[r + c·d] = u[r, i] · conj(u[c, j])
    Ok(Mat::from_fn(d * d, pairs.len(), |k, p| {
        let (i, j) = pairs[p];
        u.get(k % d, i) * u.get(k / d, j).conj()
    }))
}

fn spectral_norm(g: &ComplexMatrix) -> Result<f64> {
    let s = g
        .as_faer()
        .singular_values()
        .map_err(|e| Error::Decomposition(format!("{e:?}")))?;
    Ok(s.first().copied().unwrap_or(0.0))
}

/// Commutant of a set of operators, closed under adjoints first.
///
/// The joint kernel of `X ↦ [G_i, X]` is reduced one generator at a
/// time: the kernel of each map restricted to the current subspace, with
/// the singular-value cut taken relative to `2‖G_i‖`.
pub fn commutant(generators: &[ComplexMatrix], tol: f64) -> Result<CommutantResult> {
    let Some(first) = generators.first() else {
        return Err(Error::InvalidParameter("commutant of an empty generator list".into()));
    };
    let d = first.rows();
    let mut closed: Vec<ComplexMatrix> = Vec::with_capacity(2 * generators.len());
    for g in generators {
        if !g.is_square() || g.rows() != d {
            return Err(Error::DimensionMismatch(format!(
                "generator {}x{} in a set of dimension {d}",
                g.rows(),
                g.cols()
            )));
        }
        closed.push(g.clone());
        let gd = g.adjoint();
        if g.max_abs_diff(&gd) > 1e-14 * g.max_abs().max(1.0) {
            closed.push(gd);
        }
    }

    let start = closed.iter().position(|g| g.max_abs_diff(&g.adjoint()) <= 1e-14 * g.max_abs().max(1.0));
    let mut basis = match start {
        Some(k) => hermitian_commutant(&closed[k].hermitian_part(), tol)?,
        None => Mat::identity(d * d, d * d),
    };
    for (k, g) in closed.iter().enumerate() {
        if Some(k) == start || basis.ncols() == 0 {
            continue;
        }
        let scale = 2.0 * spectral_norm(g)?;
        if scale == 0.0 {
            continue;
        }
        let images: Vec<Vec<C64>> = operators(&basis).iter().map(|x| vectorize(&commutator(g, x))).collect();
        let image = from_columns(d * d, &images);
        let smax = image
            .singular_values()
            .map_err(|e| Error::Decomposition(format!("{e:?}")))?
            .first()
            .copied()
            .unwrap_or(0.0);
        // null_space_mat cuts relative to σ_max of its argument; rescale so
        // the cut is relative to the norm of the full map instead.
        let rel = if smax > 0.0 { (tol * scale / smax).min(1.0) } else { 1.0 };
        let kernel = null_space_mat(image.as_ref(), rel);
        basis = &basis * &kernel;
    }

    Ok(CommutantResult {
        dimension: basis.ncols(),
        basis: operators(&basis),
        generators: closed,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum UniquenessVerdict {
    Unique,
    NotUnique,
    /// The test's precondition fails.
    Inapplicable,
}

#[derive(Clone, Debug)]
pub struct FrigerioReport {
    pub verdict: UniquenessVerdict,
    /// Smallest eigenvalue of the maximal-support state.
    pub min_eigenvalue: f64,
    pub commutant_dimension: Option<usize>,
    pub witness: Option<ComplexMatrix>,
}

/// Commutant test on `{K + H} ∪ {L_α} ∪ {L_α†}`, valid when a positive
/// definite stationary state exists.
pub fn frigerio_uniqueness(liou: &Liouvillian) -> Result<FrigerioReport> {
    let rho = SteadyStateAnalysis::new(liou, DEFAULT_NULL_TOL)?.maximal_support_state()?;
    frigerio_with_state(liou, &rho)
}

/// As [`frigerio_uniqueness`], reusing a known maximal-support state.
pub fn frigerio_with_state(liou: &Liouvillian, max_support: &ComplexMatrix) -> Result<FrigerioReport> {
    let min_eigenvalue = max_support.min_eigenvalue()?;
    if min_eigenvalue <= POSITIVITY_TOL {
        return Ok(FrigerioReport {
            verdict: UniquenessVerdict::Inapplicable,
            min_eigenvalue,
            commutant_dimension: None,
            witness: None,
        });
    }
    let mut gens = vec![liou.effective_hamiltonian()];
    gens.extend(liou.jumps.jumps().iter().cloned());
    let comm = commutant(&gens, DEFAULT_NULL_TOL)?;
    let unique = comm.dimension == 1;
    Ok(FrigerioReport {
        verdict: if unique {
            UniquenessVerdict::Unique
        } else {
            UniquenessVerdict::NotUnique
        },
        min_eigenvalue,
        commutant_dimension: Some(comm.dimension),
        witness: if unique { None } else { comm.witness() },
    })
}

/// Traceless hermitian `X_B` with `[H, I_A ⊗ X_B] = 0`, as an orthonormal
/// basis. Empty exactly when the bulk condition for uniqueness holds.
pub fn bulk_commutant_solver(h: &ComplexMatrix, dims: CompositeDims, tol: f64) -> Result<Vec<ComplexMatrix>> {
    let d = dims.total();
    if !h.is_square() || h.rows() != d {
        return Err(Error::DimensionMismatch(format!(
            "hamiltonian of size {} for dims ({}, {})",
            h.rows(),
            dims.dim_a,
            dims.dim_b
        )));
    }
    let db = dims.dim_b;
    let ia = ComplexMatrix::identity(dims.dim_a);
    let cols: Vec<Vec<C64>> = (0..db * db)
        .map(|idx| {
            let e = ComplexMatrix::unit(db, idx % db, idx / db);
            vectorize(&commutator(h, &kron(&ia, &e)))
        })
        .collect();
    let map = from_columns(d * d, &cols);
    let kernel = operators(&null_space_floor(map.as_ref(), tol, h.frobenius_norm()));
    let eye = ComplexMatrix::identity(db);
    let traceless: Vec<ComplexMatrix> = hermitian_parts(&kernel)
        .into_iter()
        .map(|x| &x - &eye.scale(x.trace() / db as f64))
        .collect();
    Ok(hermitian_basis(&traceless, 1e-8))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Theorem23Verdict {
    UniquePositiveDefinite,
    NotUnique,
    Inapplicable,
}

#[derive(Clone, Debug)]
pub struct Theorem23Report {
    pub verdict: Theorem23Verdict,
    pub bulk_dimension: Option<usize>,
    pub witness: Option<ComplexMatrix>,
    /// `‖[H_B, X_B]‖_F` for the witness.
    pub witness_hb_residual: Option<f64>,
    /// `‖[H_AB, I_A ⊗ X_B]‖_F` for the witness.
    pub witness_hab_residual: Option<f64>,
    /// Why the test does not apply, if it does not.
    pub reason: Option<String>,
}

impl Theorem23Report {
    fn inapplicable(reason: String) -> Self {
        Self {
            verdict: Theorem23Verdict::Inapplicable,
            bulk_dimension: None,
            witness: None,
            witness_hb_residual: None,
            witness_hab_residual: None,
            reason: Some(reason),
        }
    }

    /// Both commutators of the witness vanish, as they must when the bulk
    /// condition fails.
    pub fn witness_consistent(&self) -> bool {
        match (self.witness_hb_residual, self.witness_hab_residual) {
            (Some(a), Some(b)) => a <= COMMUTANT_TOL && b <= COMMUTANT_TOL,
            _ => true,
        }
    }
}

/// Bulk commutant criterion for a lifted ergodic local dissipator with
/// positive definite stationary state.
pub fn theorem23_verdict(hdec: &HamiltonianDecomposition, local: &JumpSet) -> Result<Theorem23Report> {
    if local.dim() != hdec.dims.dim_a {
        return Err(Error::DimensionMismatch(format!(
            "local jump set of dimension {} for dim_a = {}",
            local.dim(),
            hdec.dims.dim_a
        )));
    }
    let rho_hat = match local_steady_state(local, DEFAULT_NULL_TOL) {
        Ok(rho) => rho,
        Err(Error::NotErgodic(k)) => {
            return Ok(Theorem23Report::inapplicable(format!(
                "local dissipator has a {k}-dimensional stationary space"
            )))
        }
        Err(e) => return Err(e),
    };
    let min = rho_hat.min_eigenvalue()?;
    if min <= POSITIVITY_TOL {
        return Ok(Theorem23Report::inapplicable(format!(
            "local stationary state is singular (min eigenvalue {min:e})"
        )));
    }
    let basis = bulk_commutant_solver(&hdec.h_total, hdec.dims, DEFAULT_NULL_TOL)?;
    if basis.is_empty() {
        return Ok(Theorem23Report {
            verdict: Theorem23Verdict::UniquePositiveDefinite,
            bulk_dimension: Some(0),
            witness: None,
            witness_hb_residual: None,
            witness_hab_residual: None,
            reason: None,
        });
    }
    let x = basis[0].clone();
    let ia = ComplexMatrix::identity(hdec.dims.dim_a);
    Ok(Theorem23Report {
        verdict: Theorem23Verdict::NotUnique,
        bulk_dimension: Some(basis.len()),
        witness_hb_residual: Some(commutator(&hdec.h_b, &x).frobenius_norm()),
        witness_hab_residual: Some(commutator(&hdec.h_ab, &kron(&ia, &x)).frobenius_norm()),
        witness: Some(x),
        reason: None,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum YoshidaVerdict {
    /// Products of the generators span every operator.
    UniqueSufficient,
    Inconclusive,
}

#[derive(Clone, Debug)]
pub struct YoshidaReport {
    pub verdict: YoshidaVerdict,
    /// Dimension of the generated algebra.
    pub dimension: usize,
    pub rounds: usize,
}

/// Linear span of products of `{H + K − (i/2) Σ L†L} ∪ {L_α}` and the
/// identity, grown by left multiplication until it stops growing.
pub fn yoshida_check(liou: &Liouvillian) -> Result<YoshidaReport> {
    let d = liou.dim();
    let n2 = d * d;
    let g0 = &liou.effective_hamiltonian() - &liou.jumps.decay_operator().scale(I * 0.5);
    let mut gens = vec![g0];
    gens.extend(liou.jumps.jumps().iter().cloned());
    gens.retain(|g| g.max_abs() > 0.0);

    let eye = vectorize(&ComplexMatrix::identity(d));
    let norm = (d as f64).sqrt();
    let mut span: Mat<C64> = Mat::from_fn(n2, 1, |i, _| eye[i] / norm);
    let mut newest = operators(&span);
    let mut rounds = 0;
    while span.ncols() < n2 && rounds < 2 * n2 && !newest.is_empty() {
        rounds += 1;
        let mut cands: Vec<Vec<C64>> = Vec::new();
        for g in &gens {
            for x in &newest {
                let y = g * x;
                let f = y.frobenius_norm();
                if f > 0.0 {
                    cands.push(vectorize(&y.scale_real(1.0 / f)));
                }
            }
        }
        if cands.is_empty() {
            break;
        }
        let mut c = from_columns(n2, &cands);
        for _ in 0..2 {
            let proj = &span * (span.adjoint() * &c);
            c -= proj;
        }
        let qr = c.col_piv_qr();
        let r = qr.R();
        let k = r.nrows().min(r.ncols());
        let rank = (0..k).take_while(|&i| r[(i, i)].norm() > CLOSURE_RANK_TOL).count();
        if rank == 0 {
            break;
        }
        let q = qr.compute_thin_Q();
        let mut fresh = Mat::from_fn(n2, rank, |i, j| q[(i, j)]);
        let proj = &span * (span.adjoint() * &fresh);
        fresh -= proj;
        let fresh = fresh.qr().compute_thin_Q();
        let old = span.ncols();
        span = Mat::from_fn(n2, old + rank, |i, j| if j < old { span[(i, j)] } else { fresh[(i, j - old)] });
        newest = operators(&fresh);
    }
    let dimension = span.ncols();
    Ok(YoshidaReport {
        verdict: if dimension == n2 {
            YoshidaVerdict::UniqueSufficient
        } else {
            YoshidaVerdict::Inconclusive
        },
        dimension,
        rounds,
    })
}

#[derive(Clone, Debug)]
pub struct ErgodicDecomposition {
    /// Dimension of `ker L†` (on the support of the maximal-support state).
    pub nullspace_dim: usize,
    pub is_algebra: bool,
    /// Largest residual of the product and adjoint closure test.
    pub closure_residual: f64,
    pub center_dimension: usize,
    /// Mutually orthogonal projections; they sum to the support projection
    /// of the maximal-support state (the identity when it is faithful).
    pub center_projections: Vec<ComplexMatrix>,
    /// `P(P_j / Tr P_j)` for each block.
    pub block_states: Vec<ComplexMatrix>,
    /// Largest `‖L†(P_j)‖_F`, evaluated on the support.
    pub adjoint_residual: f64,
    /// Dimension of the support of the maximal-support state.
    pub support_dimension: usize,
    pub transient_discarded: bool,
}

impl ErgodicDecomposition {
    pub fn blocks(&self) -> usize {
        self.center_projections.len()
    }

    /// Distance of `state` from `Σ_j Tr[P_j state] ω_j`, the form every
    /// stationary state takes when each block carries a single state.
    pub fn block_form_residual(&self, state: &ComplexMatrix) -> f64 {
        let d = state.rows();
        let mut model = ComplexMatrix::zeros(d, d);
        for (p, omega) in self.center_projections.iter().zip(&self.block_states) {
            let weight = (p * state).trace();
            model = &model + &omega.scale(weight);
        }
        state.distance(&model)
    }
}

/// `(Qᵀ ⊗ Q†) S (Q̄ ⊗ Q)` for an isometry `Q`: the superoperator of
/// `Y ↦ Q† S(Q Y Q†) Q`.
fn compress(superop: &ComplexMatrix, q: &ComplexMatrix) -> ComplexMatrix {
    let left = kron(&q.transpose(), &q.adjoint());
    let right = kron(&q.conj(), q);
    &(&left * superop) * &right
}

fn coordinates(basis: &Mat<C64>, x: &ComplexMatrix) -> (Vec<C64>, f64) {
    let v = vectorize(x);
    let k = basis.ncols();
    let coeffs: Vec<C64> = (0..k)
        .map(|j| (0..v.len()).map(|i| basis[(i, j)].conj() * v[i]).sum())
        .collect();
    let mut r2 = 0.0;
    for (i, &vi) in v.iter().enumerate() {
        let fit: C64 = (0..k).map(|j| basis[(i, j)] * coeffs[j]).sum();
        r2 += (vi - fit).norm_sqr();
    }
    (coeffs, r2.sqrt())
}

/// Center and block structure of the stationary manifold.
pub fn ergodic_decomposition(liou: &Liouvillian, seed: u64) -> Result<ErgodicDecomposition> {
    let d = liou.dim();
    let full = SteadyStateAnalysis::new(liou, DEFAULT_NULL_TOL)?;
    let rho = full.maximal_support_state()?;
    let eig = rho.eigh()?;
    let support: Vec<usize> = (0..d).filter(|&i| eig.values[i] > POSITIVITY_TOL).collect();
    let transient_discarded = support.len() < d;
    let q = ComplexMatrix::from_fn(d, support.len(), |i, j| eig.vectors.get(i, support[j]));
    let (matrix, r) = if transient_discarded {
        (compress(&liou.matrix, &q), support.len())
    } else {
        (liou.matrix.clone(), d)
    };
    let analysis = SteadyStateAnalysis::from_superoperator(&matrix, DEFAULT_NULL_TOL)?;
    let cbasis = analysis.left_kernel().clone();
    let algebra = operators(&cbasis);
    let k = algebra.len();

    let mut closure_residual: f64 = 0.0;
    for a in &algebra {
        closure_residual = closure_residual.max(coordinates(&cbasis, &a.adjoint()).1);
        for b in &algebra {
            closure_residual = closure_residual.max(coordinates(&cbasis, &(a * b)).1);
        }
    }
    if closure_residual > ALGEBRA_TOL {
        return Err(Error::NotAnAlgebra(closure_residual));
    }

    // Center: coefficient vectors c with [Σ c_i C_i, C_j] = 0 for all j.
    let mut rows: Vec<Vec<C64>> = vec![Vec::with_capacity(k * r * r); k];
    for (i, ci) in algebra.iter().enumerate() {
        for cj in &algebra {
            rows[i].extend(vectorize(&commutator(ci, cj)));
        }
    }
    let system = Mat::from_fn(k * r * r, k, |row, col| rows[col][row]);
    // Commutators of unit-norm elements: cut on an absolute scale.
    let coeffs = null_space_floor(system.as_ref(), ALGEBRA_TOL, 1.0);
    let center: Vec<ComplexMatrix> = operators(&(&cbasis * &coeffs));
    let hermitian_center = hermitian_basis(&hermitian_parts(&center), 1e-8);
    let m = hermitian_center.len();

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut projections: Option<Vec<ComplexMatrix>> = None;
    for _ in 0..MAX_CENTER_ATTEMPTS {
        let mut z = ComplexMatrix::zeros(r, r);
        for h in &hermitian_center {
            let w: f64 = StandardNormal.sample(&mut rng);
            z = &z + &h.scale_real(w);
        }
        let ez = z.eigh()?;
        let mut clusters: Vec<Vec<usize>> = vec![vec![0]];
        let mut min_gap = f64::INFINITY;
        for i in 1..r {
            let gap = ez.values[i] - ez.values[i - 1];
            if gap > CENTER_GAP_TOL {
                min_gap = min_gap.min(gap);
                clusters.push(vec![i]);
            } else {
                clusters.last_mut().expect("nonempty").push(i);
            }
        }
        if clusters.len() != m || min_gap < 100.0 * CENTER_GAP_TOL {
            continue;
        }
        let u = &ez.vectors;
        projections = Some(
            clusters
                .iter()
                .map(|idx| {
                    let b = ComplexMatrix::from_fn(r, idx.len(), |i, j| u.get(i, idx[j]));
                    &b * &b.adjoint()
                })
                .collect(),
        );
        break;
    }
    let Some(projections) = projections else {
        return Err(Error::Decomposition(format!(
            "no generic center element separated {m} blocks"
        )));
    };

    let adjoint = matrix.adjoint();
    let mut adjoint_residual: f64 = 0.0;
    let mut block_states = Vec::with_capacity(m);
    let mut center_projections = Vec::with_capacity(m);
    for p in &projections {
        let lp = crate::tensor::apply_superoperator(&adjoint, p)?;
        adjoint_residual = adjoint_residual.max(lp.frobenius_norm());
        let omega = analysis.project(&p.scale(ONE / p.trace())).hermitian_part();
        if transient_discarded {
            block_states.push(&(&q * &omega) * &q.adjoint());
            center_projections.push(&(&q * p) * &q.adjoint());
        } else {
            block_states.push(omega);
            center_projections.push(p.clone());
        }
    }
    Ok(ErgodicDecomposition {
        nullspace_dim: k,
        is_algebra: true,
        closure_residual,
        center_dimension: m,
        center_projections,
        block_states,
        adjoint_residual,
        support_dimension: r,
        transient_discarded,
    })
}
