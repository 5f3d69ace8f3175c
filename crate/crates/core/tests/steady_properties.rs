mod common;

use lindbladlab::model::{assemble_liouvillian, decompose_hamiltonian, lift_local, reset_dissipator_jumps};
use lindbladlab::random;
use lindbladlab::steady::{product_factor_check, SteadyStateAnalysis, STATIONARY_TOL};
use lindbladlab::tensor::{commutator, CompositeDims};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

#[test]
fn every_generator_has_a_stationary_state() {
    let mut rng = ChaCha8Rng::seed_from_u64(101);
    for i in 0..60 {
        let sys = common::random_system(i, &mut rng);
        let basis = SteadyStateAnalysis::new(&sys.liou, 1e-10).unwrap().stationary_basis().unwrap();
        assert!(basis.dimension >= 1);
        assert!(!basis.states.is_empty());
        for s in &basis.states {
            assert!(s.is_density(1e-8), "{}: not a density matrix", sys.family);
            assert!(sys.liou.apply(s).unwrap().frobenius_norm() <= STATIONARY_TOL);
        }
    }
}

#[test]
fn maximal_support_dominates_every_state() {
    let mut rng = ChaCha8Rng::seed_from_u64(102);
    for i in 0..60 {
        let sys = common::random_system(i, &mut rng);
        let analysis = SteadyStateAnalysis::new(&sys.liou, 1e-10).unwrap();
        let max = analysis.maximal_support_state().unwrap();
        let d = sys.liou.dim() as f64;
        for s in analysis.stationary_basis().unwrap().states {
            assert!((&max.scale_real(d) - &s).min_eigenvalue().unwrap() >= -1e-8);
        }
    }
}

#[test]
fn projector_is_idempotent_and_positive() {
    let mut rng = ChaCha8Rng::seed_from_u64(103);
    let sys = common::random_system(4, &mut rng);
    let analysis = SteadyStateAnalysis::new(&sys.liou, 1e-10).unwrap();
    let p = analysis.projector();
    assert!((&p * &p).max_abs_diff(&p) <= 1e-9);
    assert!((&sys.liou.matrix * &p).max_abs() <= 1e-9);
    assert!((&p * &sys.liou.matrix).max_abs() <= 1e-9);
    for _ in 0..100 {
        let rho = random::density(sys.liou.dim(), &mut rng);
        let out = analysis.project(&rho);
        assert!(out.is_density(1e-9));
    }
}

#[test]
fn commuting_states_of_lifted_reset_are_products() {
    let mut rng = ChaCha8Rng::seed_from_u64(104);
    for _ in 0..30 {
        let sys = common::conserving_system(3, &mut rng);
        for s in SteadyStateAnalysis::new(&sys.liou, 1e-10).unwrap().stationary_basis().unwrap().states {
            if commutator(&s, &sys.hdec.h_total).frobenius_norm() <= 1e-10 {
                let check = product_factor_check(&s, sys.hdec.dims, &sys.rho_hat_a, 1e-8).unwrap();
                assert!(check.passed(), "{check:?}");
            }
        }
    }
}

#[test]
fn non_commuting_states_are_not_products_with_the_target() {
    let mut rng = ChaCha8Rng::seed_from_u64(105);
    let dims = CompositeDims::new(2, 3).unwrap();
    let mut seen = 0;
    for _ in 0..30 {
        let target = random::density(2, &mut rng);
        let hdec = decompose_hamiltonian(&random::hermitian(6, &mut rng), dims).unwrap();
        let local = reset_dissipator_jumps(&target, 1.0).unwrap();
        let liou = assemble_liouvillian(&hdec, &lift_local(&local, dims).unwrap()).unwrap();
        let rho = SteadyStateAnalysis::new(&liou, 1e-10).unwrap().maximal_support_state().unwrap();
        if commutator(&rho, &hdec.h_total).frobenius_norm() > 1e-6 {
            seen += 1;
            assert!(!product_factor_check(&rho, dims, &target, 1e-8).unwrap().passed());
        }
    }
    assert!(seen > 20);
}
