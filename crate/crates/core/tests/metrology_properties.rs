use qfim_dim::basis::gellmann_basis;
use qfim_dim::linalg::{self, CMatrix};
use qfim_dim::metrology::{
    collective_generators, error_propagation_qfi_lb, multiparam_precision_floor, qcrb_trace_bound, EstimationScenario,
};
use qfim_dim::qfim::qfi;
use qfim_dim::random::{haar_unitary, random_bounded_schmidt_mixture, random_mixed_state};
use qfim_dim::witnesses::{full_report, optimize_local_bases};
use qfim_dim::Error;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn random_hermitian<R: Rng>(d: usize, rng: &mut R) -> CMatrix {
    let u = haar_unitary(d, rng);
    let diag = CMatrix::from_fn(d, d, |i, j| if i == j { linalg::c(rng.gen_range(-1.0..1.0), 0.0) } else { linalg::ZERO });
    let h = &u * diag * u.adjoint();
    (&h + h.adjoint()).scale(0.5)
}

#[test]
fn error_propagation_never_beats_qfi() {
    let mut rng = ChaCha8Rng::seed_from_u64(31);
    let mut evaluated = 0;
    while evaluated < 200 {
        let d = rng.gen_range(2..=6);
        let rho = random_mixed_state(&[d], rng.gen_range(1..=d), &mut rng).unwrap();
        let (h, o) = (random_hermitian(d, &mut rng), random_hermitian(d, &mut rng));
        match error_propagation_qfi_lb(&rho, &h, &o) {
            Ok(lb) => {
                assert!(lb <= qfi(&rho, &h).unwrap() + 1e-8);
                evaluated += 1;
            }
            Err(Error::UndefinedSensitivity(_)) => {}
            Err(e) => panic!("{e}"),
        }
    }
}

#[test]
fn inverse_trace_dominates_trace_bound() {
    let mut rng = ChaCha8Rng::seed_from_u64(32);
    for _ in 0..100 {
        let d = rng.gen_range(2..=3);
        let rho = random_mixed_state(&[d, d], rng.gen_range(1..=d * d), &mut rng).unwrap();
        let k = rng.gen_range(1..=3);
        let gens: Vec<CMatrix> = (0..k).map(|_| random_hermitian(d * d, &mut rng)).collect();
        let rep = qcrb_trace_bound(&EstimationScenario::new(gens, rho, None).unwrap()).unwrap();
        assert!(rep.inverse_trace >= rep.trace_bound - 1e-8 * rep.trace_bound.max(1.0));
        assert!(rep.trace_bound <= rep.pseudo_inverse_trace + 1e-8 * rep.trace_bound.max(1.0) || rep.rank < k);
    }
}

#[test]
fn precision_floor_holds_for_bounded_schmidt_number() {
    let mut rng = ChaCha8Rng::seed_from_u64(33);
    let mut trials = 0;
    while trials < 100 {
        let d = rng.gen_range(2..=4);
        let r = rng.gen_range(1..=d);
        let rho = random_bounded_schmidt_mixture(d, r, rng.gen_range(1..=3), &mut rng).unwrap();
        let g = gellmann_basis(d, false).unwrap();
        let certified = full_report(&rho, &g, &g).unwrap().certified_min_schmidt_number;
        assert!(certified <= r);
        let (oa, ob) = optimize_local_bases(&rho, &g, &g).unwrap();
        let gens = collective_generators(&oa, &ob).unwrap();
        let k = gens.len() as f64;
        let scenario = EstimationScenario::new(gens, rho, None).unwrap();
        let rep = qcrb_trace_bound(&scenario).unwrap();
        assert!((rep.trace_bound - k * k / rep.fisher_sum).abs() <= 1e-9 * rep.trace_bound);
        let floor = multiparam_precision_floor(d, r).unwrap();
        assert!(rep.trace_bound >= floor - 1e-8, "d={d} r={r}: {} < {floor}", rep.trace_bound);
        trials += 1;
    }
}

#[test]
fn mes_reaches_the_floor() {
    for d in 2..=5 {
        let rho = qfim_dim::mes_state(d, d).unwrap().to_density();
        let g = gellmann_basis(d, false).unwrap();
        let gens = collective_generators(&g, &g.conjugate()).unwrap();
        let rep = qcrb_trace_bound(&EstimationScenario::new(gens, rho, None).unwrap()).unwrap();
        assert!((rep.trace_bound - multiparam_precision_floor(d, d).unwrap()).abs() <= 1e-8);
    }
}
