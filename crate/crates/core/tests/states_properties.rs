use proptest::prelude::*;
use qfim_dim::basis::{gellmann_basis, matrix_unit_basis, tensor_product_basis};
use qfim_dim::linalg::{commutator, max_abs_diff, CMatrix, I};
use qfim_dim::random::{haar_state, random_mixed_state};
use qfim_dim::spin::spin_operators;
use qfim_dim::state_file::{parse_state, to_json, StateData};
use qfim_dim::states::{
    ghz_state, mes_state, partial_trace, product_zero_state, rho_s, schmidt_decompose, seven_qubit_state, Bipartition,
};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

#[test]
fn generated_bases_are_orthonormal() {
    for d in 2..=7 {
        for basis in [gellmann_basis(d, true).unwrap(), gellmann_basis(d, false).unwrap(), matrix_unit_basis(d).unwrap()] {
            let gram = basis.gram();
            let id = nalgebra::DMatrix::<f64>::identity(basis.len(), basis.len());
            assert!((gram - id).abs().max() <= 1e-10, "d={d}");
        }
    }
    let a = gellmann_basis(2, true).unwrap();
    let b = gellmann_basis(3, true).unwrap();
    let t = tensor_product_basis(&[&a, &b]).unwrap();
    assert!(t.is_complete());
}

#[test]
fn spin_commutators_up_to_five() {
    for twice in 1..=10 {
        let j = twice as f64 / 2.0;
        let (x, y, z) = spin_operators(j).unwrap();
        assert!(max_abs_diff(&commutator(&x, &y), &z.scale(1.0).map(|v| v * I)) <= 1e-10);
        assert!(max_abs_diff(&commutator(&y, &z), &x.map(|v| v * I)) <= 1e-10);
        assert!(max_abs_diff(&commutator(&z, &x), &y.map(|v| v * I)) <= 1e-10);
    }
}

#[test]
fn factory_states_are_valid_and_round_trip() {
    let states: Vec<StateData> = vec![
        StateData::Pure(mes_state(4, 3).unwrap()),
        StateData::Pure(ghz_state(3, 3).unwrap()),
        StateData::Pure(seven_qubit_state()),
        StateData::Pure(product_zero_state(3, 2).unwrap()),
        StateData::Mixed(rho_s([0.5, 0.3, 0.2]).unwrap()),
    ];
    for s in &states {
        let back = parse_state(&to_json(s)).unwrap();
        assert!(max_abs_diff(back.to_density().matrix(), s.to_density().matrix()) <= 1e-12);
        let rho = s.to_density();
        assert!((rho.matrix().trace().re - 1.0).abs() <= 1e-10);
        assert!(rho.eigenvalues().iter().all(|&l| l >= -1e-10));
    }
}

#[test]
fn seven_qubit_cut_ranks() {
    let psi = seven_qubit_state();
    let factor_cut = Bipartition::new(7, &[0, 1, 2]).unwrap();
    assert_eq!(schmidt_decompose(&psi, &factor_cut).unwrap().rank(), 1);
    let inner = Bipartition::new(7, &[0, 1, 3]).unwrap();
    assert_eq!(schmidt_decompose(&psi, &inner).unwrap().rank(), 4);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(100))]

    #[test]
    fn partial_traces_compose(seed in any::<u64>(), rank in 1usize..=6) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let rho = random_mixed_state(&[2, 3, 2], rank, &mut rng).unwrap();
        let step = partial_trace(&partial_trace(&rho, &[0, 2]).unwrap(), &[0]).unwrap();
        let direct = partial_trace(&rho, &[0]).unwrap();
        prop_assert!(max_abs_diff(step.matrix(), direct.matrix()) <= 1e-12);
    }

    #[test]
    fn schmidt_coefficients_sum_to_one(seed in any::<u64>(), n in 2usize..=4, party_bits in 1usize..8) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let psi = haar_state(&vec![2; n], &mut rng).unwrap();
        let party: Vec<usize> = (0..n).filter(|i| party_bits >> i & 1 == 1).collect();
        prop_assume!(!party.is_empty() && party.len() < n);
        let cut = Bipartition::new(n, &party).unwrap();
        let sd = schmidt_decompose(&psi, &cut).unwrap();
        let total: f64 = sd.coefficients.iter().sum();
        prop_assert!((total - 1.0).abs() <= 1e-10);
        prop_assert!(sd.coefficients.windows(2).all(|w| w[0] >= w[1]));
        let ordered = qfim_dim::linalg::permute_vector(psi.amplitudes(), psi.dims(), &cut.ordering());
        prop_assert!((sd.reconstruct() - ordered).norm() <= 1e-10);
    }
}

#[test]
fn pure_density_is_rank_one() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let psi = haar_state(&[3, 2], &mut rng).unwrap();
    let rho = psi.to_density();
    assert!((rho.purity() - 1.0).abs() <= 1e-10);
    let m: &CMatrix = rho.matrix();
    assert!(max_abs_diff(&(m * m), m) <= 1e-10);
}
