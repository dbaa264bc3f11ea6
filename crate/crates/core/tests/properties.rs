mod common;

use proptest::prelude::*;

use gaussbound::circuit::{self, CircuitElement, OpticalCircuit};
use gaussbound::gaussian::{self, CovarianceMatrix, SymplecticTransform};
use gaussbound::{bound_family, linalg};

fn holds(check: common::Check) -> Result<(), TestCaseError> {
    check.map_err(TestCaseError::fail)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn symplectic_maps_preserve_sigma_and_validity(seed in any::<u64>()) {
        holds(common::symplectic_preserves_sigma(seed))?;
    }

    #[test]
    fn partial_transpose_is_an_involution(seed in any::<u64>()) {
        holds(common::ppt_involution(seed))?;
    }

    #[test]
    fn two_mode_ppt_agrees_with_sdp(seed in any::<u64>()) {
        holds(common::two_mode_ppt_matches_sdp(seed))?;
    }

    #[test]
    fn williamson_reconstructs(seed in any::<u64>()) {
        holds(common::williamson_round_trip(seed))?;
    }

    #[test]
    fn pure_states_have_unit_spectrum(seed in any::<u64>()) {
        holds(common::pure_state_spectrum(seed))?;
    }

    #[test]
    fn symplectic_spectrum_is_invariant(seed in any::<u64>()) {
        holds(common::symplectic_eigenvalue_invariance(seed))?;
    }

    #[test]
    fn euler_reconstructs(seed in any::<u64>()) {
        holds(common::euler_round_trip(seed))?;
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(100))]

    #[test]
    fn product_states_are_ppt(seed in any::<u64>()) {
        holds(common::product_state_is_ppt(seed))?;
    }

    #[test]
    fn mesh_compiles_back_to_unitary(seed in any::<u64>()) {
        holds(common::compile_loop(seed))?;
    }

    #[test]
    fn passive_circuits_preserve_photon_number(seed in any::<u64>()) {
        holds(common::passive_preserves_photon_number(seed))?;
    }

    #[test]
    fn family_commutes_with_sign_symmetry(seed in any::<u64>()) {
        let params = common::family_draw(&mut common::rng(seed));
        let g = bound_family::construct(&params).unwrap();
        prop_assert!(bound_family::commutes_with_sign_symmetry(&g));
    }

    #[test]
    fn squeezer_on_vacuum(tau in 0.2f64..5.0, mode in 0usize..3) {
        let c = OpticalCircuit::new(3, vec![CircuitElement::Squeezer { mode, r: -tau.ln() }]).unwrap();
        let out = circuit::simulate(&c, &CovarianceMatrix::vacuum(3)).unwrap();
        for j in 0..3 {
            let (q, p) = if j == mode { (tau * tau, 1.0 / (tau * tau)) } else { (1.0, 1.0) };
            prop_assert!((out.matrix()[(2 * j, 2 * j)] - q).abs() <= 1e-12 * q.max(1.0));
            prop_assert!((out.matrix()[(2 * j + 1, 2 * j + 1)] - p).abs() <= 1e-12 * p.max(1.0));
        }
    }

    #[test]
    fn squeezer_transform_is_symplectic(r in proptest::collection::vec(-2.0f64..2.0, 1..5)) {
        let s = SymplecticTransform::squeezers(&r);
        prop_assert!(s.symplectic_error() <= 1e-10 * linalg::max_abs(s.matrix()).powi(2));
        let g = gaussian::apply_symplectic(&s, &CovarianceMatrix::vacuum(r.len())).unwrap();
        prop_assert!(gaussian::is_valid_covariance(&g, g.default_tol()).holds);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(50))]

    #[test]
    fn local_symplectics_keep_the_class(seed in any::<u64>()) {
        holds(common::local_symplectic_invariance(seed))?;
    }

    #[test]
    fn added_noise_keeps_separable_states_separable(seed in any::<u64>()) {
        holds(common::noise_does_not_create_entanglement(seed))?;
    }
}

#[test]
fn tau_and_inverse_tau_classify_alike() {
    common::tau_inversion_symmetry().unwrap();
}
