use num_complex::Complex64;
use ostbc_precoder::channel::{draw_paths, realize, LinkConfig, Polarization};
use ostbc_precoder::montecarlo::{db_to_linear, run_sweep, stream_rng, ModePolicy, SweepConfig};
use ostbc_precoder::ostbc::{CodeName, OstbcCode};
use ostbc_precoder::precoder::{
    interference_power, structure_residual, transmit_power, Binding, LinkMode, MinVarianceDesign,
    QForm,
};
use ostbc_precoder::verify::{random_instance, random_link_instance};
use ostbc_precoder::ComplexMat64;
use proptest::prelude::*;

fn code() -> impl Strategy<Value = CodeName> {
    prop_oneof![Just(CodeName::C2), Just(CodeName::C4)]
}

fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn unitary_property(name in code(), parts in prop::collection::vec(-3.0f64..3.0, 8)) {
        let c = OstbcCode::<f64>::new(name);
        let s: Vec<Complex64> = (0..c.k).map(|i| Complex64::new(parts[2 * i], parts[2 * i + 1])).collect();
        let x = c.encode(&s).unwrap();
        let energy: f64 = s.iter().map(|z| z.norm_sqr()).sum();
        let target = ComplexMat64::identity(c.n_t, c.n_t).map(|z| z * (c.unitary_constant() * energy));
        prop_assert!((&x * x.adjoint() - target).norm() <= 1e-10);
    }

    #[test]
    fn structure_and_gate(name in code(), seed in any::<u64>()) {
        let inputs = random_instance(&mut stream_rng(seed, 0, 0), name, QForm::Corrected);
        let d = MinVarianceDesign::new(&inputs).unwrap();
        let sol = d.solve(inputs.p_tmax, inputs.eta);
        prop_assert!(structure_residual(&inputs.a, &inputs.r_s, &sol.w, sol.alpha) <= 1e-8);

        let p = transmit_power(&sol.w, inputs.rho_sr, inputs.n_t);
        let q = interference_power(&sol.w, d.regularized_interference_correlation(), inputs.rho_sr, inputs.n_t);
        prop_assert!(p <= inputs.p_tmax * (1.0 + 1e-9));
        prop_assert!(q <= inputs.eta * (1.0 + 1e-9));
        let tight = match sol.binding {
            Binding::PowerLimited => rel(p, inputs.p_tmax),
            Binding::InterferenceLimited => rel(q, inputs.eta),
        };
        prop_assert!(tight <= 1e-9);
    }

    #[test]
    fn two_regime_law(name in code(), seed in any::<u64>()) {
        let inputs = random_instance(&mut stream_rng(seed, 0, 0), name, QForm::Corrected);
        let d = MinVarianceDesign::new(&inputs).unwrap();
        // Power at which the two gate branches meet.
        let knee = inputs.eta * d.delta() / d.tr_q();
        let snr = |p: f64| {
            let s = d.solve(p, inputs.eta);
            (s.snr_est, s.binding)
        };
        let (a, ba) = snr(knee / 8.0);
        let (b, bb) = snr(knee / 2.0);
        prop_assert_eq!((ba, bb), (Binding::PowerLimited, Binding::PowerLimited));
        prop_assert!(rel(b, 4.0 * a) <= 1e-9);
        let (c, bc) = snr(knee * 2.0);
        let (e, be) = snr(knee * 100.0);
        prop_assert_eq!((bc, be), (Binding::InterferenceLimited, Binding::InterferenceLimited));
        prop_assert!(rel(e, c) <= 1e-12);
        prop_assert!(c >= b);
    }

    #[test]
    fn detector_decouples_symbols(name in code(), seed in any::<u64>(), n_r in 1usize..4) {
        let (inputs, heq) = random_link_instance(&mut stream_rng(seed, 0, 0), name, n_r, QForm::Corrected);
        let d = MinVarianceDesign::new(&inputs).unwrap();
        let am = inputs.a.matrix();
        let map = am.tr_mul(&heq.transpose()) * &heq * d.w(1.0) * am;
        let diag = map.diagonal();
        prop_assert!(diag.min() > 0.0);
        prop_assert!(rel(diag.min(), diag.max()) <= 1e-8);
        let mut off = map.clone();
        off.fill_diagonal(0.0);
        prop_assert!(off.amax() <= 1e-8 * diag.max());
    }

    #[test]
    fn channel_is_deterministic(seed in any::<u64>(), n_path in 1usize..6, tilt in 0.0f64..1.5) {
        let cfg = LinkConfig::new(2, 2, n_path, 8.0);
        let draw = || {
            let paths = draw_paths(&cfg, &mut stream_rng(seed, 1, 0));
            realize(&paths, Polarization::V, Polarization::H, tilt, &cfg).h
        };
        prop_assert_eq!(draw(), draw());
    }
}

fn small_sweep(seed: u64, spl_paths: usize, eta_db: f64) -> SweepConfig {
    let mut cfg = SweepConfig::new(
        CodeName::C2,
        LinkConfig::new(2, 1, 2, 8.0),
        LinkConfig::new(2, 2, spl_paths, 8.0),
        (0..9).map(|i| -20.0 + 7.5 * i as f64).collect(),
        eta_db,
    );
    cfg.n_channel = 6;
    cfg.n_tilt = 4;
    cfg.n_corr_samples = 100;
    cfg.seed = seed;
    cfg
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn sweep_respects_cap_and_is_monotone(seed in any::<u64>(), spl_paths in 1usize..5, eta_db in -10.0f64..10.0) {
        let cfg = small_sweep(seed, spl_paths, eta_db);
        let r = run_sweep(&cfg).unwrap();
        let eta = db_to_linear(eta_db);
        for p in &r.points {
            prop_assert!(p.policy.max_interference <= eta * (1.0 + 1e-6));
            prop_assert!(p.policy.mean_interference <= eta * (1.0 + 1e-6));
        }
        let snr = r.snr_db();
        prop_assert!(snr.windows(2).all(|w| w[1] >= w[0] - 1e-12));
        let frac = r.frac_interference_limited();
        prop_assert!(frac.windows(2).all(|w| w[1] >= w[0]));
        prop_assert_eq!(run_sweep(&cfg).unwrap(), r);
    }

    #[test]
    fn selection_dominates_fixed_modes(seed in any::<u64>()) {
        let cfg = small_sweep(seed, 3, 0.0);
        let best = run_sweep(&cfg).unwrap();
        for m in LinkMode::ALL {
            let mut fixed = cfg.clone();
            fixed.policy = ModePolicy::Fixed(m);
            let f = run_sweep(&fixed).unwrap();
            for (b, p) in best.points.iter().zip(&f.points) {
                prop_assert!(b.policy.snr_db >= p.policy.snr_db - 1e-9);
            }
        }
    }
}
