use dgc_core::gaussian::{equicorr_hazard_gradient, equicorr_survival, EquicorrSpec, ExtReal, QuadratureConfig};
use dgc_core::intensity::intensity_report;
use dgc_core::model::{ModelConfig, PortfolioState, BANK};
use proptest::prelude::*;

fn finite(z: &[f64]) -> Vec<ExtReal> {
    z.iter().map(|&x| ExtReal::Finite(x)).collect()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn orthant_is_a_positively_dependent_probability(
        z in prop::collection::vec(-4.0f64..4.0, 1..5),
        rho in 0.0f64..0.95,
    ) {
        let q = QuadratureConfig::default();
        let spec = EquicorrSpec::new(z.len(), rho, 1.0).unwrap();
        let p = equicorr_survival(&finite(&z), &spec, &q).unwrap();
        prop_assert!(p > 0.0 && p <= 1.0);
        let marginals: Vec<f64> = z.iter().map(|&x| dgc_core::gaussian::std_normal_survival(x)).collect();
        let min = marginals.iter().cloned().fold(1.0, f64::min);
        let product: f64 = marginals.iter().product();
        // Slepian: between the independent product and the comonotone minimum
        prop_assert!(p <= min * (1.0 + 1e-9));
        prop_assert!(p >= product * (1.0 - 1e-9));

        let mut raised = z.clone();
        raised[0] += 0.5;
        let lower = equicorr_survival(&finite(&raised), &spec, &q).unwrap();
        prop_assert!(lower <= p * (1.0 + 1e-12));
        let psi = equicorr_hazard_gradient(&finite(&z), 0, &spec, &q).unwrap();
        prop_assert!(psi > 0.0);
    }

    #[test]
    fn intensities_nonnegative_and_azema_in_unit_interval(
        rho in 0.0f64..0.9,
        t in 0.05f64..8.0,
        m in prop::collection::vec(-1.5f64..1.5, 4),
        defaulted in any::<bool>(),
        residual in -2.0f64..0.5,
    ) {
        let config = ModelConfig::new(rho, 0.25, vec![0.02, 0.01, 0.03, 0.015]).unwrap();
        let mut state = PortfolioState::at(t, m);
        if defaulted {
            state.defaults[2] = Some(dgc_core::model::DefaultRecord { tau: 0.5 * t, residual: Some(residual) });
        }
        let report = intensity_report(&config, &state).unwrap();
        prop_assert!(report.azema > 0.0 && report.azema <= 1.0);
        for n in &report.names {
            prop_assert!(n.gamma_g >= 0.0 && n.gamma_g.is_finite());
            prop_assert!(n.gamma_f_bar.unwrap_or(0.0) >= 0.0);
            prop_assert!(n.gamma_f_tilde.unwrap_or(0.0) >= 0.0);
            prop_assert!(n.beta_g.is_finite() && n.beta_f_bar.is_finite() && n.beta_f_tilde.is_finite());
        }
        if defaulted {
            prop_assert_eq!(report.names[2].gamma_g, 0.0);
        }
    }

    #[test]
    fn calibration_inverts(t in 0.001f64..80.0, lambda in 0.001f64..0.2) {
        let config = ModelConfig::new(0.3, 0.25, vec![lambda, 0.01, 0.01]).unwrap();
        let x = config.h_finite(BANK, t);
        let back = config.h_inverse(BANK, x);
        prop_assert!((back - t).abs() <= 1e-8 * t.max(1.0), "{} vs {}", back, t);
    }

    #[test]
    fn state_json_round_trips(
        t in 0.0f64..10.0,
        m in prop::collection::vec(-3.0f64..3.0, 3),
        residual in -3.0f64..3.0,
    ) {
        let config = ModelConfig::three_name(0.4, 0.01);
        let mut state = PortfolioState::at(t + 0.1, m);
        state.defaults[0] = Some(dgc_core::model::DefaultRecord { tau: t, residual: Some(residual) });
        let back = PortfolioState::from_json(&state.to_json(), &config).unwrap();
        prop_assert_eq!(back, state);
    }
}
