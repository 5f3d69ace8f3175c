//! Random operators for property tests and randomized scenario suites.

use rand::Rng;
use rand_distr::StandardNormal;

use crate::tensor::{ComplexMatrix, C64};

fn normal<R: Rng + ?Sized>(rng: &mut R) -> f64 {
    rng.sample(StandardNormal)
}

/// Complex Ginibre matrix with i.i.d. standard normal real and imaginary parts.
pub fn ginibre<R: Rng + ?Sized>(n: usize, rng: &mut R) -> ComplexMatrix {
    ComplexMatrix::from_fn(n, n, |_, _| C64::new(normal(rng), normal(rng)))
}

/// Random hermitian matrix `(G + G†)/2`.
pub fn hermitian<R: Rng + ?Sized>(n: usize, rng: &mut R) -> ComplexMatrix {
    ginibre(n, rng).hermitian_part()
}

/// Full-rank random density matrix `G G† / Tr(G G†)`.
pub fn density<R: Rng + ?Sized>(n: usize, rng: &mut R) -> ComplexMatrix {
    let g = ginibre(n, rng);
    (&g * &g.adjoint()).hermitian_part().trace_normalized()
}

/// Haar-distributed unitary via QR of a Ginibre matrix with the phases of
/// `R` divided out.
pub fn unitary<R: Rng + ?Sized>(n: usize, rng: &mut R) -> ComplexMatrix {
    let g = ginibre(n, rng);
    let qr = g.as_faer().qr();
    let q = qr.compute_Q();
    let r = qr.R();
    let phases: Vec<C64> = (0..n)
        .map(|i| {
            let d = r[(i, i)];
            if d.norm() > 0.0 {
                d / d.norm()
            } else {
                C64::new(1.0, 0.0)
            }
        })
        .collect();
    ComplexMatrix::from_fn(n, n, |i, j| q[(i, j)] * phases[j])
}
