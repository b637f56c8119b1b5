use proptest::prelude::*;

use ris_sop::analytic::closed_form_sop;
use ris_sop::channel::best_user_cdf;
use ris_sop::experiments::{load_config, parse_csv, resolved_config, write_csv, CurvePoint, SweepRange, SweepVariable};
use ris_sop::model::path_loss_ratio;
use ris_sop::relay::{sop_relay, RelayBudget};
use ris_sop::{
    clt_params, derive_geometry, evaluate, simulate_scheduling, ChannelMode, EveMixture, LinkBudget, Method, Scenario,
    Scheme, SopCurve, SopQuery, SweepSpec, TrialBatch,
};

/// Rounding slack for comparisons between two closed-form evaluations.
fn slack(a: f64, b: f64) -> f64 {
    1e-9 * a.abs().max(b.abs()) + 1e-14
}

fn closed(s: &Scenario, db: f64, scheme: Scheme) -> f64 {
    let q = SopQuery { scenario: s, p_over_n0: s.p_over_n0(db), scheme, method: Method::ClosedForm };
    evaluate(&q).unwrap()
}

fn fig2(n: u32, m: u32, l: u32) -> Scenario {
    Scenario { n, m, l, ..Scenario::default() }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn best_user_cdf_is_a_cdf(n in 16u32..1200, m in 1u32..12, db in -10.0f64..80.0, x1 in 0.0f64..50.0, dx in 0.0f64..50.0) {
        let s = fig2(n, m, 1);
        let b = LinkBudget::new(&s, s.p_over_n0(db)).unwrap();
        let clt = clt_params(n, s.eta).unwrap();
        let f1 = best_user_cdf(x1, b.gbar_u, &clt, m).unwrap();
        let f2 = best_user_cdf(x1 + dx, b.gbar_u, &clt, m).unwrap();
        prop_assert!((0.0..=1.0).contains(&f1) && (0.0..=1.0).contains(&f2));
        prop_assert!(f1 <= f2);
        // The best of more users is stochastically larger.
        let more = best_user_cdf(x1, b.gbar_u, &clt, m + 1).unwrap();
        prop_assert!(more <= f1);
    }

    #[test]
    fn eve_mixture_is_a_distribution(l in 1u32..20, lam in 1e-6f64..1e6, x1 in 0.0f64..10.0, dx in 0.0f64..10.0) {
        let mix = EveMixture::new(l, lam).unwrap();
        let (a, b) = (x1 * lam, (x1 + dx) * lam);
        let (fa, fb) = (mix.cdf(a), mix.cdf(b));
        prop_assert!((0.0..=1.0).contains(&fa) && fa <= fb + 1e-15);
        prop_assert!(mix.pdf(a) >= 0.0);
        // Max of l exponentials: F = (1 − e^{−x/λ})^l.
        let want = (-(-a / lam).exp_m1()).powi(l as i32);
        prop_assert!((fa - want).abs() <= 1e-12);
    }

    #[test]
    fn closed_form_sop_is_bounded(n in 16u32..1200, m in 1u32..8, l in 1u32..8, db in -10.0f64..90.0) {
        let s = fig2(n, m, l);
        let b = LinkBudget::new(&s, s.p_over_n0(db)).unwrap();
        let clt = clt_params(n, s.eta).unwrap();
        let (sop, br) = closed_form_sop(&b, &clt, m, l).unwrap();
        prop_assert!((0.0..=1.0).contains(&sop));
        prop_assert!(br.raw_sop >= -1e-3 && br.raw_sop <= 1.0 + 1e-3, "raw {}", br.raw_sop);
        let os = closed(&s, db, Scheme::OS);
        prop_assert!((0.0..=1.0).contains(&os));
        prop_assert!(os <= sop + slack(os, sop), "OS {os} > SS {sop}");
    }

    #[test]
    fn sop_monotone_in_users_eves_and_elements(n in 32u32..1024, m in 1u32..8, l in 1u32..8, db in 0.0f64..80.0) {
        for scheme in [Scheme::SS, Scheme::OS] {
            let base = closed(&fig2(n, m, l), db, scheme);
            let more_m = closed(&fig2(n, m + 1, l), db, scheme);
            let more_l = closed(&fig2(n, m, l + 1), db, scheme);
            let more_n = closed(&fig2(2 * n, m, l), db, scheme);
            prop_assert!(more_m <= base + slack(more_m, base), "{scheme} M: {more_m} > {base}");
            prop_assert!(more_l + slack(more_l, base) >= base, "{scheme} L: {more_l} < {base}");
            prop_assert!(more_n <= base + slack(more_n, base), "{scheme} N: {more_n} > {base}");
        }
    }

    #[test]
    fn single_user_paths_coincide(n in 16u32..1200, l in 1u32..8, db in -10.0f64..90.0) {
        let s = fig2(n, 1, l);
        let ss = closed(&s, db, Scheme::SS);
        prop_assert_eq!(ss.to_bits(), closed(&s, db, Scheme::SingleUser).to_bits());
        prop_assert_eq!(ss.to_bits(), closed(&s, db, Scheme::OS).to_bits());
    }

    #[test]
    fn best_pair_is_ss_with_km_users(k in 1u32..4, m in 1u32..4, l in 1u32..4, db in 0.0f64..80.0) {
        let pair = Scenario { k, ..fig2(256, m, l) };
        let ss = fig2(256, k * m, l);
        prop_assert_eq!(closed(&pair, db, Scheme::BestPair).to_bits(), closed(&ss, db, Scheme::SS).to_bits());
    }

    #[test]
    fn relay_direct_link_never_hurts(f in 0.5e9f64..5e9, m in 1u32..8, l in 1u32..8, db in -10.0f64..80.0, r_th in 0.1f64..2.0) {
        let s = Scenario { f, m, l, r_th, ..Scenario::default() };
        let rb = RelayBudget::new(&s, s.p_over_n0(db)).unwrap();
        let dl = sop_relay(&rb, m, l, true).unwrap();
        let ndl = sop_relay(&rb, m, l, false).unwrap();
        prop_assert!((0.0..=1.0).contains(&dl) && (0.0..=1.0).contains(&ndl));
        prop_assert!(dl <= ndl + 1e-12, "DL {dl} > NDL {ndl}");
    }

    #[test]
    fn geometry_recovers_plane_layout(
        sr in 1.0f64..500.0, rs in 1.0f64..500.0, su in 1.0f64..1500.0,
        ru in 1.0f64..500.0, se in 1.0f64..1500.0, re in 1.0f64..500.0,
    ) {
        let s = Scenario { delta_sr: sr, delta_rs: rs, delta_su: su, delta_ru: ru, delta_se: se, delta_re: re, ..Scenario::default() };
        let g = derive_geometry(&s).unwrap();
        prop_assert!((g.d_sr * g.cos_inc - rs).abs() <= 1e-9 * rs);
        prop_assert!((g.d_ru * g.cos_ref_u - ru).abs() <= 1e-9 * ru);
        prop_assert!((g.d_re * g.cos_ref_e - re).abs() <= 1e-9 * re);
        prop_assert!((g.d_sr.powi(2) - sr * sr - rs * rs).abs() <= 1e-9 * g.d_sr.powi(2));
        let b = LinkBudget::with_geometry(&s, &g, 1e12).unwrap();
        let ratio = b.zeta_su / b.zeta_se;
        prop_assert!((path_loss_ratio(&g) - ratio).abs() <= 1e-12 * ratio);
    }

    #[test]
    fn wilson_interval_brackets_estimate(trials in 1u64..1_000_000, frac in 0.0f64..=1.0) {
        let outages = ((trials as f64) * frac).round() as u64;
        let b = TrialBatch { trials, outages, seed: 0, scheme: Scheme::SS, mode: ChannelMode::ExactProduct };
        let (lo, hi) = b.wilson95();
        prop_assert!(0.0 <= lo && lo <= b.estimate() && b.estimate() <= hi && hi <= 1.0);
    }
}

fn curve_strategy() -> impl Strategy<Value = SopCurve> {
    (
        proptest::sample::select(Scheme::ALL.to_vec()),
        proptest::sample::select(Method::ALL.to_vec()),
        proptest::collection::vec(
            (-1e3f64..1e3, 0.0f64..=1.0, proptest::option::of((0.0f64..0.5, 0.5f64..1.0))),
            1..20,
        ),
        any::<u64>(),
        "[0-9a-f]{16}",
    )
        .prop_map(|(scheme, method, pts, seed, scenario_hash)| SopCurve {
            scheme,
            method,
            variable: SweepVariable::PowerDb,
            points: pts.into_iter().map(|(x, sop, ci)| CurvePoint { x, sop, ci }).collect(),
            seed,
            scenario_hash,
        })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn csv_round_trip(curves in proptest::collection::vec(curve_strategy(), 1..5)) {
        let mut a = Vec::new();
        write_csv(&curves, &mut a).unwrap();
        let parsed = parse_csv(&a[..]).unwrap();
        // Twelve significant digits survive; a second pass is byte-stable.
        let mut b = Vec::new();
        write_csv(&parsed, &mut b).unwrap();
        prop_assert_eq!(&a, &b);
        let flat = |cs: &[SopCurve]| cs.iter().flat_map(|c| c.points.clone()).collect::<Vec<_>>();
        for (p, q) in flat(&curves).iter().zip(flat(&parsed)) {
            prop_assert!((p.sop - q.sop).abs() <= 1e-11 * p.sop.abs().max(1e-300));
            prop_assert!((p.x - q.x).abs() <= 1e-11 * p.x.abs());
        }
        prop_assert_eq!(flat(&curves).len(), flat(&parsed).len());
    }

    #[test]
    fn config_round_trip(
        n in 1u32..4096, m in 1u32..20, l in 1u32..20, eta in 0.01f64..=1.0, f in 1e8f64..1e11,
        start in -20.0f64..40.0, span in 0.0f64..60.0, step in 0.5f64..10.0, seed in 0u64..=i64::MAX as u64,
        trials in 1000u64..10_000_000,
    ) {
        let spec = SweepSpec {
            scenario: Scenario { n, m, l, eta, f, ..Scenario::default() },
            range: SweepRange { start, stop: start + span, step },
            schemes: vec![Scheme::SS, Scheme::OS, Scheme::RelayDL],
            methods: vec![Method::ClosedForm, Method::MonteCarlo],
            mc_trials: trials,
            seed,
            ..SweepSpec::default()
        };
        let back = load_config(&resolved_config(&spec)).unwrap();
        prop_assert_eq!(back, spec);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(6))]

    #[test]
    fn monte_carlo_independent_of_worker_count(seed in any::<u64>(), db in 20.0f64..50.0, surrogate in any::<bool>()) {
        let s = fig2(64, 3, 2);
        let p = s.p_over_n0(db);
        let mode = if surrogate { ChannelMode::CltSurrogate } else { ChannelMode::ExactProduct };
        let run = |threads: usize| {
            let pool = rayon::ThreadPoolBuilder::new().num_threads(threads).build().unwrap();
            pool.install(|| simulate_scheduling(&s, p, Scheme::SS, mode, 5000, seed).unwrap().outages)
        };
        prop_assert_eq!(run(1), run(3));
    }
}
