use proptest::prelude::*;
use qfim_dim::basis::{complete, gellmann_basis};
use qfim_dim::linalg::{self, eigvals_sym, kron, max_abs_diff_real, CMatrix};
use qfim_dim::qfim::{covariance_matrix, qfi, qfim, qfim_pure};
use qfim_dim::random::{haar_state, haar_unitary, random_mixed_state, random_orthogonal};
use qfim_dim::states::DensityMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn local_ops(da: usize, db: usize) -> Vec<CMatrix> {
    let ga = gellmann_basis(da, false).unwrap();
    let gb = gellmann_basis(db, false).unwrap();
    let mut ops = ga.lift_left(db);
    ops.extend(gb.lift_right(da));
    ops
}

fn random_hermitian<R: Rng>(d: usize, rng: &mut R) -> CMatrix {
    let u = haar_unitary(d, rng);
    let diag = CMatrix::from_fn(d, d, |i, j| if i == j { linalg::c(rng.gen_range(-2.0..2.0), 0.0) } else { linalg::ZERO });
    let h = &u * diag * u.adjoint();
    (&h + h.adjoint()).scale(0.5)
}

#[test]
fn pure_state_qfim_is_four_covariance() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for trial in 0..200 {
        let da = 2 + trial % 3;
        let db = 2 + (trial / 3) % 3;
        let psi = haar_state(&[da, db], &mut rng).unwrap();
        let ops = local_ops(da, db);
        let f = qfim(&psi.to_density(), &ops).unwrap();
        let g = covariance_matrix(&psi.to_density(), &ops).unwrap();
        assert!(max_abs_diff_real(&f, &(g * 4.0)) <= 1e-8, "trial {trial}");
        let fp = qfim_pure(&psi, &ops).unwrap();
        assert!(max_abs_diff_real(&f, &fp) <= 1e-8);
    }
}

#[test]
fn qfim_is_convex() {
    let mut rng = ChaCha8Rng::seed_from_u64(12);
    for _ in 0..100 {
        let (da, db) = (rng.gen_range(2..=3), rng.gen_range(2..=3));
        let r1 = random_mixed_state(&[da, db], rng.gen_range(1..=da * db), &mut rng).unwrap();
        let r2 = random_mixed_state(&[da, db], rng.gen_range(1..=da * db), &mut rng).unwrap();
        let p: f64 = rng.gen();
        let mix = DensityMatrix::mixture(&[(p, &r1), (1.0 - p, &r2)]).unwrap();
        let ops = local_ops(da, db);
        let gap = qfim(&r1, &ops).unwrap() * p + qfim(&r2, &ops).unwrap() * (1.0 - p) - qfim(&mix, &ops).unwrap();
        let min = eigvals_sym(&gap).iter().cloned().fold(f64::INFINITY, f64::min);
        assert!(min >= -1e-8, "{min}");
    }
}

#[test]
fn qfim_below_four_covariance_for_mixed_states() {
    let mut rng = ChaCha8Rng::seed_from_u64(13);
    for _ in 0..100 {
        let (da, db) = (rng.gen_range(2..=3), rng.gen_range(2..=4));
        let rho = random_mixed_state(&[da, db], rng.gen_range(1..=da * db), &mut rng).unwrap();
        let ops = local_ops(da, db);
        let gap = covariance_matrix(&rho, &ops).unwrap() * 4.0 - qfim(&rho, &ops).unwrap();
        let min = eigvals_sym(&gap).iter().cloned().fold(f64::INFINITY, f64::min);
        assert!(min >= -1e-8, "{min}");
    }
}

#[test]
fn qfi_is_additive_on_products() {
    let mut rng = ChaCha8Rng::seed_from_u64(14);
    for _ in 0..100 {
        let (da, db) = (rng.gen_range(2..=3), rng.gen_range(2..=3));
        let ra = random_mixed_state(&[da], rng.gen_range(1..=da), &mut rng).unwrap();
        let rb = random_mixed_state(&[db], rng.gen_range(1..=db), &mut rng).unwrap();
        let prod = DensityMatrix::new(kron(ra.matrix(), rb.matrix()), vec![da, db]).unwrap();
        let (a, b) = (random_hermitian(da, &mut rng), random_hermitian(db, &mut rng));
        let h = kron(&a, &linalg::identity(db)) + kron(&linalg::identity(da), &b);
        let lhs = qfi(&prod, &h).unwrap();
        let rhs = qfi(&ra, &a).unwrap() + qfi(&rb, &b).unwrap();
        assert!((lhs - rhs).abs() <= 1e-8, "{lhs} vs {rhs}");
    }
}

#[test]
fn maximally_mixed_and_identity_generators_carry_nothing() {
    let rho = DensityMatrix::maximally_mixed(&[3, 2]).unwrap();
    let f = qfim(&rho, &local_ops(3, 2)).unwrap();
    assert!(f.iter().all(|x| x.abs() < 1e-12));
    let full = complete(&gellmann_basis(2, false).unwrap()).unwrap();
    let psi = haar_state(&[2], &mut ChaCha8Rng::seed_from_u64(1)).unwrap();
    let f = qfim(&psi.to_density(), full.elements()).unwrap();
    assert!(f.row(0).iter().all(|x| x.abs() < 1e-12));
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(100))]

    #[test]
    fn orthogonal_recombination_rotates_the_qfim(seed in any::<u64>(), da in 2usize..=3, db in 2usize..=3, rank in 1usize..=4) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let rho = random_mixed_state(&[da, db], rank, &mut rng).unwrap();
        let ops = local_ops(da, db);
        let o = random_orthogonal(ops.len(), &mut rng);
        let mixed: Vec<CMatrix> = (0..ops.len())
            .map(|i| ops.iter().enumerate().fold(CMatrix::zeros(da * db, da * db), |acc, (k, g)| acc + g.scale(o[(i, k)])))
            .collect();
        let f = qfim(&rho, &ops).unwrap();
        let f_rot = qfim(&rho, &mixed).unwrap();
        prop_assert!(max_abs_diff_real(&f_rot, &(&o * f * o.transpose())) <= 1e-8);
    }

    #[test]
    fn qfi_is_nonnegative_and_bounded_by_spread(seed in any::<u64>(), d in 2usize..=5) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let rho = random_mixed_state(&[d], rng.gen_range(1..=d), &mut rng).unwrap();
        let h = random_hermitian(d, &mut rng);
        let (lo, hi) = linalg::spectral_extremes(&h);
        let v = qfi(&rho, &h).unwrap();
        prop_assert!(v >= -1e-10);
        prop_assert!(v <= (hi - lo).powi(2) + 1e-8);
    }
}
