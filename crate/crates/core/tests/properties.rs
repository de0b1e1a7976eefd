use proptest::prelude::*;

use zeno::decay::{
    classify_zeno, effective_rate, log_grid, rate_curve, wigner_weisskopf_rate, zeno_time,
    Reference,
};
use zeno::numerics::{FixedPointSpec, QuadratureSpec};
use zeno::renormalization::{eta_map, solve_renormalization, RenormalizedSystem, SystemConfig};
use zeno::spectral::BathSpectrum;
use zeno::survival::{survival_curve, PROBABILITY_SLACK};

fn system(alpha: f64, omega0: f64, gamma: f64) -> SystemConfig {
    SystemConfig::new(
        omega0,
        BathSpectrum::with_unit_center(alpha, gamma).unwrap(),
    )
    .unwrap()
}

fn renorm(sys: &SystemConfig) -> RenormalizedSystem {
    solve_renormalization(sys, &QuadratureSpec::default(), &FixedPointSpec::default()).unwrap()
}

#[test]
fn eta_monotone_on_grid() {
    let alphas = [0.0, 0.01, 0.02, 0.05, 0.1];
    let omegas = [0.2, 0.5, 1.0, 1.5, 2.0];
    let eta: Vec<Vec<f64>> = alphas
        .iter()
        .map(|&a| {
            omegas
                .iter()
                .map(|&w| renorm(&system(a, w, 0.4)).eta)
                .collect()
        })
        .collect();
    for i in 0..alphas.len() {
        for j in 0..omegas.len() {
            if i > 0 {
                assert!(eta[i][j] <= eta[i - 1][j], "alpha step at {i},{j}");
            }
            if j > 0 {
                assert!(eta[i][j] >= eta[i][j - 1], "omega0 step at {i},{j}");
            }
        }
    }
}

#[test]
fn classification_stable_under_refinement() {
    let q = QuadratureSpec::default();
    for w in [0.5, 1.5] {
        let sys = system(0.02, w, 0.4);
        let r = renorm(&sys);
        let g0 = wigner_weisskopf_rate(&sys);
        for rsys in [None, Some(&r)] {
            let coarse_taus: Vec<f64> = log_grid(1e-3, 1e2, 100)
                .into_iter()
                .map(|x| x / g0)
                .collect();
            let fine_taus: Vec<f64> = log_grid(1e-3, 1e2, 199)
                .into_iter()
                .map(|x| x / g0)
                .collect();
            let coarse = classify_zeno(
                &rate_curve(&sys, rsys, &coarse_taus, &q).unwrap(),
                Reference::Gamma0,
            );
            let fine = classify_zeno(
                &rate_curve(&sys, rsys, &fine_taus, &q).unwrap(),
                Reference::Gamma0,
            );
            assert_eq!(coarse.windows.len(), fine.windows.len());
            let spacing = |t: f64| {
                let i = coarse_taus
                    .partition_point(|&x| x < t)
                    .clamp(1, coarse_taus.len() - 1);
                coarse_taus[i] - coarse_taus[i - 1]
            };
            for (a, b) in coarse.windows.iter().zip(&fine.windows) {
                assert!(
                    (a.tau_lo - b.tau_lo).abs() < spacing(a.tau_lo),
                    "omega0 {w}"
                );
                assert!(
                    (a.tau_hi - b.tau_hi).abs() < spacing(a.tau_hi),
                    "omega0 {w}"
                );
            }
        }
    }
}

#[test]
fn survival_short_time_law() {
    // (1 - P(τ))/τ² → 1/τ_Z², extracted by Richardson extrapolation in τ².
    let q = QuadratureSpec::default();
    for w in [0.2, 1.5] {
        let sys = system(0.02, w, 0.4);
        let r = renorm(&sys);
        for rsys in [None, Some(&r)] {
            let curve = survival_curve(&sys, rsys, 0.2, &q, Some(1e-3)).unwrap();
            let coefficient = |tau: f64| {
                let i = (tau / 1e-3).round() as usize;
                let t = curve.taus[i];
                let x = curve.amplitudes[i];
                (1.0 - x.norm_sqr()) / (t * t)
            };
            let (c1, c2) = (coefficient(0.2), coefficient(0.1));
            let extrapolated = (4.0 * c2 - c1) / 3.0;
            let tz = zeno_time(&sys, rsys, &q).unwrap();
            assert!(
                (extrapolated * tz * tz - 1.0).abs() < 0.01,
                "omega0 {w}: {extrapolated} vs {}",
                1.0 / (tz * tz)
            );
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn rate_is_nonnegative(alpha in 0.0f64..0.1, omega0 in 0.05f64..3.0, gamma in 0.05f64..1.5, log_tau in -4.0f64..2.5) {
        let sys = system(alpha, omega0, gamma);
        let q = QuadratureSpec::default();
        let tau = 10f64.powf(log_tau);
        prop_assert!(effective_rate(tau, &sys, None, &q).unwrap() >= 0.0);
        let r = renorm(&sys);
        prop_assert!(effective_rate(tau, &sys, Some(&r), &q).unwrap() >= 0.0);
    }

    #[test]
    fn renormalization_meets_its_residual(alpha in 0.0f64..0.1, omega0 in 0.05f64..3.0, gamma in 0.05f64..1.5) {
        let sys = system(alpha, omega0, gamma);
        let fp = FixedPointSpec::default();
        let q = QuadratureSpec::default();
        let r = solve_renormalization(&sys, &q, &fp).unwrap();
        prop_assert!(r.eta > 0.0 && r.eta <= 1.0);
        prop_assert!((eta_map(r.eta, &sys, &q).unwrap() - r.eta).abs() <= fp.tol);
        prop_assert!((r.omega_a - r.eta * omega0).abs() <= 1e-15 * omega0);
    }

    #[test]
    fn survival_probability_stays_in_unit_interval(alpha in 0.0f64..0.05, omega0 in 0.1f64..2.0, full in any::<bool>()) {
        let sys = system(alpha, omega0, 0.4);
        let r = renorm(&sys);
        let curve = survival_curve(&sys, full.then_some(&r), 8.0, &QuadratureSpec::default(), None).unwrap();
        prop_assert_eq!(curve.probabilities[0], 1.0);
        prop_assert!(curve.max_clamp <= PROBABILITY_SLACK);
        prop_assert!(curve.probabilities.iter().all(|&p| p > 0.0 && p <= 1.0));
    }
}
