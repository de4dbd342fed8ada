use std::f64::consts::{PI, TAU};

use num_complex::Complex64;
use proptest::prelude::*;
use trifringe_core::fit::{fit_fringe, FitModelParams};
use trifringe_core::fock::apply_mode_transform;
use trifringe_core::metrology::unit_peak_sensitivity;
use trifringe_core::*;

fn convention() -> impl Strategy<Value = SplitterConvention> {
    prop_oneof![Just(SplitterConvention::SymmetricPhase), Just(SplitterConvention::RealAsymmetric)]
}

/// Random state with at most `max_total` photons and norm ≤ 1.
fn state(max_total: usize) -> impl Strategy<Value = TwoModeState> {
    let n = (max_total + 1) * (max_total + 2) / 2;
    prop::collection::vec((-1.0f64..1.0, -1.0f64..1.0), n).prop_map(move |raw| {
        let mut entries = Vec::new();
        let mut k = 0;
        for a in 0..=max_total {
            for b in 0..=(max_total - a) {
                entries.push(((a, b), Complex64::new(raw[k].0, raw[k].1)));
                k += 1;
            }
        }
        let norm: f64 = entries.iter().map(|(_, c)| c.norm_sqr()).sum::<f64>().sqrt();
        let entries: Vec<_> = entries.into_iter().map(|(i, c)| (i, c / norm.max(1e-3))).collect();
        make_state(DEFAULT_N_MAX, &entries).unwrap()
    })
}

fn max_diff(a: &TwoModeState, b: &TwoModeState) -> f64 {
    a.iter()
        .zip(b.iter())
        .map(|((_, x), (_, y))| (x - y).norm())
        .fold(0.0, f64::max)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn splitter_matrix_is_unitary(t in 0.0f64..=1.0, conv in convention()) {
        let m = BeamSplitterSpec::new(t, conv).unwrap().matrix();
        let p = m.adjoint().then_after(&m);
        let id = ModeMatrix::identity();
        for i in 0..2 {
            for j in 0..2 {
                prop_assert!((p.0[i][j] - id.0[i][j]).norm() < 1e-12);
            }
        }
    }

    #[test]
    fn splitter_preserves_norm_and_photon_number(st in state(DEFAULT_N_MAX), t in 0.0f64..=1.0, conv in convention()) {
        let bs = BeamSplitterSpec::new(t, conv).unwrap();
        let out = apply_beam_splitter(&st, &bs);
        prop_assert!((out.norm_sq() - st.norm_sq()).abs() < 1e-12);
        for n in 0..=DEFAULT_N_MAX {
            prop_assert!((out.sector_norm_sq(n) - st.sector_norm_sq(n)).abs() < 1e-12);
        }
        // no amplitude appears in a sector the input did not populate
        for n in 0..=DEFAULT_N_MAX {
            if st.sector_norm_sq(n) == 0.0 {
                prop_assert_eq!(out.sector_norm_sq(n), 0.0);
            }
        }
    }

    #[test]
    fn splitter_inverse_restores_state(st in state(DEFAULT_N_MAX), t in 0.0f64..=1.0, conv in convention()) {
        let m = BeamSplitterSpec::new(t, conv).unwrap().matrix();
        let back = apply_mode_transform(&apply_mode_transform(&st, &m), &m.adjoint());
        prop_assert!(max_diff(&back, &st) < 1e-12);
    }

    #[test]
    fn phase_is_additive(st in state(4), a in -PI..PI, b in -PI..PI) {
        let two = apply_phase(&apply_phase(&st, a, Arm::Second), b, Arm::Second);
        let one = apply_phase(&st, a + b, Arm::Second);
        prop_assert!(max_diff(&two, &one) < 1e-12);
        prop_assert!((one.norm_sq() - st.norm_sq()).abs() < 1e-12);
    }

    #[test]
    fn oracle_rate_is_periodic_and_non_negative(alpha_sq in 0.0f64..0.5, s in 0.0f64..0.2, phi in -PI..PI, theta in -PI..PI) {
        let src = SourceParams::new(alpha_sq.sqrt(), theta, s, 0.0, Expansion::LowOrder).unwrap();
        let fringe = OracleFringe::new(&src, &MziSettings::default()).unwrap();
        let r = fringe.rate(phi);
        prop_assert!(r >= 0.0);
        prop_assert!((fringe.rate(phi + TAU) - r).abs() <= 1e-12 * r.max(1e-300));
    }

    #[test]
    fn corrected_model_matches_oracle(alpha_sq in 0.001f64..0.5, s in 0.0f64..0.15, theta in -PI..PI, psi in -PI..PI, phi in -PI..PI) {
        for expansion in [Expansion::LowOrder, Expansion::Exact] {
            let src = SourceParams::new(alpha_sq.sqrt(), theta, s, psi, expansion).unwrap();
            let oracle = three_photon_rate_oracle(&src, &MziSettings::default().at_phase(phi)).unwrap();
            let coeffs = analytic_coefficients(&src, ModelForm::Corrected);
            let model = three_photon_rate_analytic(&coeffs, phi);
            let peak = coeffs.a + coeffs.b.abs() + coeffs.c.abs() + coeffs.d.abs();
            prop_assert!((oracle - model).abs() <= 1e-10 * peak, "{oracle} vs {model}");
        }
    }

    #[test]
    fn fourier_recovers_coefficients(alpha_sq in 0.003f64..0.47, s in 0.01f64..0.1) {
        let src = SourceParams::calibrated(alpha_sq, s, Expansion::LowOrder).unwrap();
        let coeffs = analytic_coefficients(&src, ModelForm::Corrected);
        let scan = FringeScan::sample(64, ScanKind::ModelRate, |p| three_photon_rate_analytic(&coeffs, p)).unwrap();
        let fc = fourier_components(&scan).unwrap();
        let h = coeffs.signed_harmonics();
        prop_assert!((fc.c0 - h[0]).abs() < 1e-12 * h[0]);
        for k in 1..=3 {
            prop_assert!((fc.harmonic(k) - Complex64::new(h[k], 0.0)).norm() < 1e-12 * h[0]);
            prop_assert!(fc.harmonic(k).norm() <= 2.0 * fc.c0 * (1.0 + 1e-12));
        }
    }

    #[test]
    fn normalization_is_idempotent(alpha_sq in 0.003f64..0.47, s in 0.0f64..0.1) {
        let src = SourceParams::calibrated(alpha_sq, s, Expansion::LowOrder).unwrap();
        let raw = OracleFringe::new(&src, &MziSettings::default()).unwrap().scan(90).unwrap();
        let once = normalize_fringe(&raw).unwrap();
        let twice = normalize_fringe(&once).unwrap();
        prop_assert!((once.integral().unwrap() - 1.0).abs() < 1e-12);
        for (a, b) in once.values().iter().zip(twice.values()) {
            prop_assert!((a - b).abs() <= 1e-12 * a.max(1.0));
        }
    }

    #[test]
    fn visibility_is_scale_invariant(alpha_sq in 0.003f64..0.47, s in 0.0f64..0.1, k in 1e-3f64..1e3) {
        let src = SourceParams::calibrated(alpha_sq, s, Expansion::LowOrder).unwrap();
        let raw = OracleFringe::new(&src, &MziSettings::default()).unwrap().scan(72).unwrap();
        let v = visibility(&raw).unwrap();
        prop_assert!((0.0..=1.0).contains(&v));
        prop_assert!((visibility(&raw.scaled(k).unwrap()).unwrap() - v).abs() < 1e-12);
    }

    #[test]
    fn unit_peak_sensitivity_ignores_scale(alpha_sq in 0.003f64..0.47, k in 1e-3f64..1e3) {
        let src = SourceParams::calibrated(alpha_sq, 0.05, Expansion::LowOrder).unwrap();
        let coeffs = analytic_coefficients(&src, ModelForm::Corrected);
        let a = unit_peak_sensitivity(|p| three_photon_rate_analytic(&coeffs, p), 128).unwrap();
        let b = unit_peak_sensitivity(|p| k * three_photon_rate_analytic(&coeffs, p), 128).unwrap();
        prop_assert!((a.min_value - b.min_value).abs() < 1e-6 * a.min_value);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn noiseless_self_fit(y in 0.2f64..5.0, phi1 in -0.5f64..0.5, scale in 1e-6f64..1e3) {
        let form = ModelForm::Corrected;
        let truth = FitModelParams::ideal(scale, y, phi1, form).unwrap();
        let scan = FringeScan::sample(120, ScanKind::ModelRate, |p| fit_model_eval(&truth, p, form)).unwrap();
        let fit = fit_fringe(&scan, form, None).unwrap();
        prop_assert!(fit.converged);
        prop_assert!((fit.params.y / y - 1.0).abs() < 1e-6, "y {} vs {}", fit.params.y, y);
        let dphi = wrap_phase(fit.params.phi1 - phi1);
        prop_assert!(dphi.abs() < 1e-6 || (y - 1.0).abs() < 1e-3, "phi1 {} vs {}", fit.params.phi1, phi1);
        prop_assert!(fit.objective_trace.windows(2).all(|w| w[1] <= w[0]));
    }
}

#[test]
fn hong_ou_mandel_dip() {
    let one_one = make_state(DEFAULT_N_MAX, &[((1, 1), Complex64::new(1.0, 0.0))]).unwrap();
    for conv in SplitterConvention::ALL {
        let out = apply_beam_splitter(&one_one, &BeamSplitterSpec::balanced(conv));
        assert!(project_photon_numbers(&out, 1, 1).unwrap() < 1e-24);
        assert!((project_photon_numbers(&out, 2, 0).unwrap() - 0.5).abs() < 1e-12);
    }
}

#[test]
fn no_coherent_light_no_three_photon_rate() {
    for expansion in [Expansion::LowOrder, Expansion::Exact] {
        let src = SourceParams::new(0.0, 0.0, 0.1, 0.0, expansion).unwrap();
        for settings in [
            MziSettings::default(),
            MziSettings::with_convention(SplitterConvention::RealAsymmetric, Port::G),
        ] {
            let fringe = OracleFringe::new(&src, &settings).unwrap();
            for phi in phase_grid(36) {
                assert_eq!(fringe.rate(phi), 0.0);
            }
        }
    }
}

#[test]
fn fit_errors_shrink_with_exposure() {
    let src = SourceParams::from_ratio(1.19, 0.06, Expansion::LowOrder).unwrap();
    let settings = MziSettings::default();
    let phases = phase_grid(90);
    let peak = OracleFringe::new(&src, &settings).unwrap().scan(720).unwrap().max_value();
    let mut last = f64::INFINITY;
    for counts in [1e3, 1e4, 1e5] {
        let mut total = 0.0;
        for seed in 0..8 {
            let scan = synthetic_scan(&src, &settings, &phases, counts / peak, seed).unwrap();
            total += fit_fringe(&scan, ModelForm::Corrected, None).unwrap().std_errors.y;
        }
        assert!(total < last, "{total} after {last}");
        last = total;
    }
}
