#![allow(dead_code)]

use lindbladlab::model::{assemble_liouvillian, decompose_hamiltonian, lift_local, reset_dissipator_jumps};
use lindbladlab::random;
use lindbladlab::steady::gibbs_state;
use lindbladlab::tensor::{kron, ComplexMatrix, CompositeDims};
use lindbladlab::{HamiltonianDecomposition, JumpSet, Liouvillian};
use rand::Rng;
use rand_chacha::ChaCha8Rng;

/// A random bipartite test system. `local` is set when the dissipator is
/// the lift of a jump set on the first factor.
pub struct RandomSystem {
    pub family: &'static str,
    pub hdec: HamiltonianDecomposition,
    pub local: Option<JumpSet>,
    pub liou: Liouvillian,
}

pub const FAMILIES: usize = 6;

fn lifted(family: &'static str, h: &ComplexMatrix, dims: CompositeDims, local: JumpSet) -> RandomSystem {
    let hdec = decompose_hamiltonian(h, dims).unwrap();
    let liou = assemble_liouvillian(&hdec, &lift_local(&local, dims).unwrap()).unwrap();
    RandomSystem {
        family,
        hdec,
        local: Some(local),
        liou,
    }
}

fn product_hamiltonian(ha: &ComplexMatrix, hb: &ComplexMatrix) -> ComplexMatrix {
    let ia = ComplexMatrix::identity(ha.rows());
    let ib = ComplexMatrix::identity(hb.rows());
    &kron(ha, &ib) + &kron(&ia, hb)
}

/// `H` commuting with `I ⊗ X_B` for a random two-outcome `X_B`.
fn bulk_symmetric(da: usize, db: usize, rng: &mut ChaCha8Rng) -> ComplexMatrix {
    let u = random::unitary(db, rng);
    let split = rng.random_range(1..db);
    let projector = |range: std::ops::Range<usize>| {
        let v = ComplexMatrix::from_fn(db, range.len(), |i, j| u.get(i, range.start + j));
        &v * &v.adjoint()
    };
    let p1 = projector(0..split);
    let p2 = projector(split..db);
    let mut h = kron(&random::hermitian(da, rng), &p1);
    h = &h + &kron(&random::hermitian(da, rng), &p2);
    let hb = &(&(&p1 * &random::hermitian(db, rng)) * &p1) + &(&(&p2 * &random::hermitian(db, rng)) * &p2);
    &h + &kron(&ComplexMatrix::identity(da), &hb)
}

/// System number `index` draws from family `index % FAMILIES`:
///
/// 0. lifted reset, random `H`
/// 1. lifted reset, `H_AB = 0`
/// 2. lifted reset, `H` with a bulk symmetry
/// 3. lifted random local jumps, random `H`
/// 4. global hermitian jumps, `H = 0` and one jump
/// 5. global hermitian jumps, random `H`
pub fn random_system(index: usize, rng: &mut ChaCha8Rng) -> RandomSystem {
    let da = 2;
    let db = [2, 3, 4][(index / FAMILIES) % 3];
    let dims = CompositeDims::new(da, db).unwrap();
    let d = da * db;
    let rate = rng.random_range(0.2..2.0);
    match index % FAMILIES {
        0 => {
            let target = random::density(da, rng);
            let h = random::hermitian(d, rng);
            lifted("reset", &h, dims, reset_dissipator_jumps(&target, rate).unwrap())
        }
        1 => {
            let target = random::density(da, rng);
            let h = product_hamiltonian(&random::hermitian(da, rng), &random::hermitian(db, rng));
            lifted("reset-noninteracting", &h, dims, reset_dissipator_jumps(&target, rate).unwrap())
        }
        2 => {
            let target = random::density(da, rng);
            let h = bulk_symmetric(da, db, rng);
            lifted("reset-symmetric", &h, dims, reset_dissipator_jumps(&target, rate).unwrap())
        }
        3 => {
            let count = rng.random_range(1..3);
            let jumps = (0..count).map(|_| random::ginibre(da, rng)).collect();
            let local = JumpSet::new(random::hermitian(da, rng).scale_real(0.3), jumps).unwrap();
            lifted("local-jumps", &random::hermitian(d, rng), dims, local)
        }
        k => {
            let (h, count) = if k == 4 {
                (ComplexMatrix::zeros(d, d), 1)
            } else {
                (random::hermitian(d, rng), rng.random_range(1..3))
            };
            let jumps = (0..count).map(|_| random::hermitian(d, rng)).collect();
            let hdec = decompose_hamiltonian(&h, dims).unwrap();
            let liou = assemble_liouvillian(&hdec, &JumpSet::from_jumps(d, jumps).unwrap()).unwrap();
            RandomSystem {
                family: if k == 4 { "dephasing-global" } else { "hermitian-global" },
                hdec,
                local: None,
                liou,
            }
        }
    }
}

/// Hamiltonian conserving `N = N_A ⊗ I + I ⊗ N_B` together with the
/// product state `ρ̂_A ⊗ ρ_B ∝ e^{-λN}`.
pub struct ConservingSystem {
    pub hdec: HamiltonianDecomposition,
    pub rho_hat_a: ComplexMatrix,
    pub rho_b: ComplexMatrix,
    pub liou: Liouvillian,
}

fn integer_observable(n: usize, max: i32, rng: &mut ChaCha8Rng) -> (ComplexMatrix, Vec<i32>) {
    let levels: Vec<i32> = (0..n).map(|_| rng.random_range(0..=max)).collect();
    let u = random::unitary(n, rng);
    let diag = ComplexMatrix::from_real_diagonal(&levels.iter().map(|&x| x as f64).collect::<Vec<_>>());
    (&(&u * &diag) * &u.adjoint(), levels)
}

pub fn conserving_system(db: usize, rng: &mut ChaCha8Rng) -> ConservingSystem {
    let da = 2;
    let dims = CompositeDims::new(da, db).unwrap();
    let (na, _) = integer_observable(da, 1, rng);
    let (nb, _) = integer_observable(db, 2, rng);
    let n = product_hamiltonian(&na, &nb);
    let eig = n.eigh().unwrap();
    let d = da * db;
    let r = random::hermitian(d, rng);
    // H = Σ_n Q_n R Q_n over the eigenspaces of N.
    let mut h = ComplexMatrix::zeros(d, d);
    let mut start = 0;
    while start < d {
        let mut end = start + 1;
        while end < d && (eig.values[end] - eig.values[start]).abs() < 0.5 {
            end += 1;
        }
        let v = ComplexMatrix::from_fn(d, end - start, |i, j| eig.vectors.get(i, start + j));
        let q = &v * &v.adjoint();
        h = &h + &(&(&q * &r) * &q);
        start = end;
    }
    let h = h.hermitian_part();
    let lambda = rng.random_range(0.3..1.5);
    let rho_hat_a = gibbs_state(&na, lambda).unwrap();
    let rho_b = gibbs_state(&nb, lambda).unwrap();
    let rate = rng.random_range(0.2..2.0);
    let hdec = decompose_hamiltonian(&h, dims).unwrap();
    let local = reset_dissipator_jumps(&rho_hat_a, rate).unwrap();
    let liou = assemble_liouvillian(&hdec, &lift_local(&local, dims).unwrap()).unwrap();
    ConservingSystem {
        hdec,
        rho_hat_a,
        rho_b,
        liou,
    }
}
