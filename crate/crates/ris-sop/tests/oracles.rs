//! Reference values computed at 40 significant digits with an arbitrary
//! precision library and frozen here.

use ris_sop::analytic::closed_form_sop;
use ris_sop::channel::{best_user_cdf, user_snr_z, QModel};
use ris_sop::model::direct_path_loss;
use ris_sop::special::{erfcx, exp_times_q, q_approx3, q_exact};
use ris_sop::{clt_params, LinkBudget, Scenario};

fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs()
}

#[test]
fn erfcx_reference_values() {
    let table = [
        (-5.0, 144009798674.66104041),
        (-1.0, 5.0089800807622834663),
        (0.5, 0.61569034419292587487),
        (1.0, 0.42758357615580700441),
        (5.0, 0.11070463773306862637),
        (10.0, 0.056140992743822585858),
        (26.0, 0.021683584850562906616),
        (30.0, 0.018795888861416751497),
        (100.0, 0.0056416137829894329036),
        (1e4, 0.000056418958072680841152),
    ];
    for (x, want) in table {
        assert!(rel(erfcx(x), want) < 1e-13, "erfcx({x}) = {} want {want}", erfcx(x));
    }
}

#[test]
fn q_at_five_percent_quantile() {
    assert!(rel(q_exact(1.6448536269514722), 0.050000000000000053101) < 1e-14);
}

#[test]
fn log_of_exp_times_q() {
    let table = [
        (0.0, 1.6448536269514722, -2.995732273553989931),
        (1000.0, 45.0, -17.22609424195237073),
        (50000.0, 316.3, -29.52063965869960313),
        (-20.0, -3.0, -20.00135080996474819),
        (200.0, -1.5, 199.930856544387766),
        (123456.5, 500.0, -1550.633550631586865),
    ];
    for (a, b, want) in table {
        let got = exp_times_q(a, b);
        assert!(!got.overflow);
        // Large exponents cancel inside; 1e-12 relative on the log is what double input allows.
        assert!(rel(got.ln_value, want) < 1e-12, "ln(e^{a} Q({b})) = {} want {want}", got.ln_value);
    }
}

#[test]
fn indirect_path_losses_default_geometry() {
    let b = LinkBudget::new(&Scenario::default(), 1.0).unwrap();
    assert!(rel(b.zeta_su, 4.5428459280129027441e-18) < 1e-12);
    assert!(rel(b.zeta_se, 1.2812546010462802667e-16) < 1e-12);
}

#[test]
fn direct_path_loss_at_70_m() {
    let wl = Scenario::default().wavelength();
    assert!(rel(direct_path_loss(wl, 70.0, 3.0).unwrap(), 4.148275260308637369e-10) < 1e-12);
}

#[test]
fn clt_moments_n64() {
    let c = clt_params(64, 0.8).unwrap();
    assert!(rel(c.mu_u, 40.212385965949353) < 1e-14);
    assert!(rel(c.sigma_u, 3.9615417116586368) < 1e-14);
    // Q(−μ/σ) differs from 1 by about 1.6e-24, below double resolution.
    assert_eq!(c.xi, 1.0);
}

#[test]
fn q_approx_error_bound_on_grid() {
    let worst =
        (0..=80_000).map(|i| f64::from(i) * 1e-4).map(|x| (q_approx3(x) - q_exact(x)).abs()).fold(0.0, f64::max);
    assert!(worst <= 1.0 / 12.0 + 1e-12, "max |Q~ - Q| = {worst}");
    assert!((worst - 1.0 / 12.0).abs() < 1e-12, "the bound is attained at x = 0");
}

#[test]
fn vanishing_eavesdropper_limit() {
    // A very distant eavesdropper leaves only the user's own outage P(Γ_U < ρ − 1).
    for m in [1u32, 4] {
        let s = Scenario { n: 64, m, l: 3, delta_se: 1e6, ..Scenario::default() };
        let p = s.p_over_n0(30.0);
        let b = LinkBudget::new(&s, p).unwrap();
        assert!(b.lambda_e < 1e-6 * (b.rho - 1.0));
        let clt = clt_params(s.n, s.eta).unwrap();
        let (sop, _) = closed_form_sop(&b, &clt, m, s.l).unwrap();
        let exact = best_user_cdf(b.rho - 1.0, b.gbar_u, &clt, m).unwrap();
        assert!(exact > 1e-3 && exact < 0.999, "pick a point with non-trivial outage, got {exact}");
        // The closed form carries the three-exponential Q, so its limit uses the same Q.
        let z = user_snr_z(b.rho - 1.0, b.gbar_u, &clt);
        let approx = (1.0 - QModel::ThreeExp.q(z)).powi(m as i32);
        assert!(rel(sop, approx) < 1e-6, "M={m}: {sop} vs {approx}");
    }
}
