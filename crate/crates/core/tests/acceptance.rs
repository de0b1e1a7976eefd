//! Acceptance suite: one PASS/FAIL line per criterion, nonzero exit on any
//! failure.

use std::f64::consts::PI;
use std::process::ExitCode;
use std::time::Instant;

use zeno::decay::{
    classify_zeno, classify_zeno_refined, effective_rate, log_grid, rate_curve,
    wigner_weisskopf_rate, zeno_time, RateCurve, Reference, ZenoClassification,
};
use zeno::numerics::{integrate_windowed, FixedPointSpec, QuadratureSpec, WindowDomain};
use zeno::renormalization::{
    solve_renormalization, solve_renormalization_by_bisection, RenormalizedSystem, SystemConfig,
};
use zeno::spectral::{g_of_omega, g_prime, BathSpectrum};
use zeno::survival::{rate_from_survival, survival_curve};

const ALPHA: f64 = 0.02;
const GAMMA_WIDTH: f64 = 0.4;
const FIGURE_OMEGA0: [f64; 3] = [0.2, 0.5, 1.5];
const ALL_OMEGA0: [f64; 4] = [0.2, 0.5, 1.0, 1.5];

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

fn system(alpha: f64, omega0: f64) -> SystemConfig {
    SystemConfig::new(
        omega0,
        BathSpectrum::with_unit_center(alpha, GAMMA_WIDTH).unwrap(),
    )
    .unwrap()
}

fn renorm(sys: &SystemConfig) -> RenormalizedSystem {
    solve_renormalization(sys, &QuadratureSpec::default(), &FixedPointSpec::default()).unwrap()
}

fn check(ok: bool, detail: String) -> Outcome {
    if ok {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn curve_over_gamma0_tau(
    sys: &SystemConfig,
    rsys: Option<&RenormalizedSystem>,
    n: usize,
) -> RateCurve {
    let g0 = wigner_weisskopf_rate(sys);
    let taus: Vec<f64> = log_grid(1e-3, 1e2, n).into_iter().map(|x| x / g0).collect();
    rate_curve(sys, rsys, &taus, &QuadratureSpec::default()).unwrap()
}

fn refined(
    curve: &RateCurve,
    sys: &SystemConfig,
    rsys: Option<&RenormalizedSystem>,
) -> ZenoClassification {
    let q = QuadratureSpec::default();
    classify_zeno_refined(curve, Reference::Gamma0, |t| {
        effective_rate(t, sys, rsys, &q)
    })
    .unwrap()
}

fn dephasing_normalization() -> Outcome {
    let spec = QuadratureSpec {
        tail_tol: 1e-9,
        ..QuadratureSpec::default()
    };
    let mut worst: f64 = 0.0;
    for tau in [0.1, 1.0, 10.0] {
        let total = integrate_windowed(|_| 1.0, 0.0, tau, WindowDomain::WholeLine, &spec)
            .map_err(|e| e.to_string())?;
        worst = worst.max((total - 1.0).abs());
    }
    check(
        worst <= 1e-6,
        format!("max |∫F - 1| = {worst:.2e} (limit 1e-6)"),
    )
}

fn eta_limits_and_monotonicity() -> Outcome {
    let q = QuadratureSpec::default();
    let fp = FixedPointSpec::default();
    let mut worst_agreement: f64 = 0.0;
    for w in ALL_OMEGA0 {
        let free = renorm(&system(0.0, w)).eta;
        if free != 1.0 {
            return Err(format!("eta(alpha=0, omega0={w}) = {free}"));
        }
        let mut previous = free;
        for a in [0.01, 0.02, 0.05, 0.1] {
            let sys = system(a, w);
            let it = solve_renormalization(&sys, &q, &fp).map_err(|e| e.to_string())?;
            let bis =
                solve_renormalization_by_bisection(&sys, &q, &fp).map_err(|e| e.to_string())?;
            worst_agreement = worst_agreement.max((it.eta - bis.eta).abs());
            if it.eta >= previous {
                return Err(format!("eta not decreasing at alpha={a}, omega0={w}"));
            }
            previous = it.eta;
        }
    }
    check(
        worst_agreement <= 1e-11,
        format!("eta(0)=1, strictly decreasing; iteration vs bisection max diff {worst_agreement:.2e} (limit 1e-11)"),
    )
}

fn zeno_time_ordering() -> Outcome {
    let q = QuadratureSpec::default();
    let (low, high) = (system(ALPHA, 0.2), system(ALPHA, 1.5));
    let rwa = zeno_time(&low, None, &q).unwrap();
    let full_low = zeno_time(&low, Some(&renorm(&low)), &q).unwrap();
    let full_high = zeno_time(&high, Some(&renorm(&high)), &q).unwrap();

    // Closed form of ∫G for a Lorentzian-like peak: arctangent of the
    // quadratic's discriminant.
    let b = 2.0 - GAMMA_WIDTH * GAMMA_WIDTH;
    let c = (1.0 - b * b / 4.0).sqrt();
    let oracle = (0.25 * ALPHA * (PI / 2.0 + (0.5 * b / c).atan()) / c).powf(-0.5);
    let rel = (rwa / oracle - 1.0).abs();
    let quoted = (oracle / 5.349 - 1.0).abs();
    check(
        full_low > rwa && rwa > full_high && rel <= 5e-3 && quoted <= 5e-3,
        format!(
            "tau_Z: full(0.2)={full_low:.4} > rwa={rwa:.4} > full(1.5)={full_high:.4}; oracle {oracle:.6}, rel {rel:.1e}, vs 5.349 {quoted:.1e}"
        ),
    )
}

fn short_time_law() -> Outcome {
    let q = QuadratureSpec::default();
    let mut worst: f64 = 0.0;
    for w in ALL_OMEGA0 {
        let sys = system(ALPHA, w);
        let r = renorm(&sys);
        for rsys in [None, Some(&r)] {
            let (t1, t2) = (1e-4, 1e-2);
            let slope = (effective_rate(t2, &sys, rsys, &q).unwrap()
                - effective_rate(t1, &sys, rsys, &q).unwrap())
                / (t2 - t1);
            let tz = zeno_time(&sys, rsys, &q).unwrap();
            worst = worst.max((slope * tz * tz - 1.0).abs());
        }
    }
    check(
        worst <= 0.01,
        format!("max |slope·tau_Z² - 1| = {worst:.2e} over 4 omega0 x 2 modes (limit 1e-2)"),
    )
}

fn long_time_limit() -> Outcome {
    let q = QuadratureSpec::default();
    let mut worst: f64 = 0.0;
    let mut parts = Vec::new();
    for w in FIGURE_OMEGA0 {
        let sys = system(ALPHA, w);
        let r = renorm(&sys);
        let rwa = effective_rate(200.0, &sys, None, &q).unwrap()
            / (2.0 * PI * g_of_omega(w, sys.spectrum()).unwrap());
        let m = r.modulated(sys.spectrum());
        let full = effective_rate(200.0, &sys, Some(&r), &q).unwrap()
            / (2.0 * PI * g_prime(r.omega_a, &m).unwrap());
        worst = worst.max((rwa - 1.0).abs()).max((full - 1.0).abs());
        parts.push(format!("{w}: rwa {rwa:.4}, full {full:.4}"));
    }
    check(
        worst <= 0.05,
        format!("gamma(200)/asymptote [{}] (limit 5%)", parts.join("; ")),
    )
}

fn pure_zeno_at_low_frequency() -> Outcome {
    let sys = system(ALPHA, 0.2);
    let r = renorm(&sys);
    let curve = curve_over_gamma0_tau(&sys, Some(&r), 200);
    let peak = curve.gammas.iter().fold(0.0f64, |m, g| m.max(*g)) / curve.gamma_asym;
    let asym = classify_zeno(&curve, Reference::GammaAsym);
    let g0 = classify_zeno(&curve, Reference::Gamma0);
    check(
        peak < 1.0 && asym.pure_qze && g0.pure_qze,
        format!(
            "max gamma_full/gamma_asym = {peak:.5}; pure_qze (asym ref) = {}, (gamma0 ref) = {}",
            asym.pure_qze, g0.pure_qze
        ),
    )
}

fn weak_window_at_half_frequency() -> Outcome {
    let sys = system(ALPHA, 0.5);
    let r = renorm(&sys);
    let full = refined(&curve_over_gamma0_tau(&sys, Some(&r), 200), &sys, Some(&r));
    let rwa = refined(&curve_over_gamma0_tau(&sys, None, 200), &sys, None);
    let [w] = full.windows.as_slice() else {
        return Err(format!(
            "expected one FULL window, found {}",
            full.windows.len()
        ));
    };
    let Some(onset) = rwa.windows.first() else {
        return Err("no RWA anti-Zeno window".into());
    };
    let (lo, hi, on) = (w.gamma0_tau_lo, w.gamma0_tau_hi, onset.gamma0_tau_lo);
    let within2 = |x: f64, target: f64| x >= target / 2.0 && x <= target * 2.0;
    let overlaps = lo < 0.58 && hi > 0.24;
    check(
        overlaps && within2(lo, 0.24) && within2(hi, 0.58) && within2(on, 0.09),
        format!("FULL window {lo:.4}..{hi:.4} vs 0.24..0.58; RWA onset {on:.4} vs 0.09 (factor 2)"),
    )
}

fn wider_window_above_resonance() -> Outcome {
    let sys = system(ALPHA, 1.5);
    let r = renorm(&sys);
    let full = refined(&curve_over_gamma0_tau(&sys, Some(&r), 200), &sys, Some(&r));
    let rwa = refined(&curve_over_gamma0_tau(&sys, None, 200), &sys, None);
    let ([f], [w]) = (full.windows.as_slice(), rwa.windows.as_slice()) else {
        return Err(format!(
            "window counts: full {}, rwa {}",
            full.windows.len(),
            rwa.windows.len()
        ));
    };
    let describe = |x: &zeno::decay::ZenoWindow| {
        format!(
            "{:.4}..{:.4}{}",
            x.gamma0_tau_lo,
            x.gamma0_tau_hi,
            if x.open_hi { "+" } else { "" }
        )
    };
    check(
        f.strictly_contains(w),
        format!(
            "FULL {} strictly contains RWA {} (gamma0 ref)",
            describe(f),
            describe(w)
        ),
    )
}

fn resonance_agreement() -> Outcome {
    let q = QuadratureSpec::default();
    let sys = system(ALPHA, 1.0);
    let r = renorm(&sys);
    let taus = log_grid(1e-3, 1e2, 50);
    let rwa = rate_curve(&sys, None, &taus, &q).unwrap();
    let full = rate_curve(&sys, Some(&r), &taus, &q).unwrap();
    let (worst, at) = rwa
        .gammas
        .iter()
        .zip(&full.gammas)
        .zip(&taus)
        .map(|((a, b), t)| ((b / a - 1.0).abs(), *t))
        .fold((0.0, 0.0), |m, x| if x.0 > m.0 { x } else { m });
    check(
        worst <= 0.05,
        format!("max |full/rwa - 1| = {worst:.4} at tau = {at:.3} (limit 5%)"),
    )
}

fn survival_oracle_equivalence() -> Outcome {
    let q = QuadratureSpec::default();
    let sys = system(0.005, 0.2);
    let r = renorm(&sys);
    let g0 = wigner_weisskopf_rate(&sys);
    let t_max = 1.0 / g0;
    let coarse = survival_curve(&sys, Some(&r), t_max, &q, None).map_err(|e| e.to_string())?;
    let h = coarse.taus[1];
    let fine =
        survival_curve(&sys, Some(&r), t_max, &q, Some(h / 2.0)).map_err(|e| e.to_string())?;

    let rates = rate_from_survival(&coarse);
    let stride = (rates.taus.len() / 400).max(1);
    let mut worst: f64 = 0.0;
    let mut count = 0;
    for (i, (&t, &g)) in rates.taus.iter().zip(&rates.gammas).enumerate() {
        let x = g0 * t;
        if !(0.1..=1.0).contains(&x) || (i % stride != 0 && i + 1 != rates.taus.len()) {
            continue;
        }
        let pert = effective_rate(t, &sys, Some(&r), &q).unwrap();
        worst = worst.max((g / pert - 1.0).abs());
        count += 1;
    }
    let (pc, pf) = (
        *coarse.probabilities.last().unwrap(),
        *fine.probabilities.last().unwrap(),
    );
    let halving = (pf / pc - 1.0).abs();
    check(
        worst <= 0.05 && halving < 1e-3 && count > 100,
        format!(
            "max |gamma_volterra/gamma_pert - 1| = {worst:.2e} over {count} points; grid halving dP/P = {halving:.1e} (limits 5%, 0.1%)"
        ),
    )
}

fn modulation_sign() -> Outcome {
    let omegas: Vec<f64> = (1..=200).map(|i| 3.0 * i as f64 / 200.0).collect();
    for w0 in FIGURE_OMEGA0 {
        let sys = system(ALPHA, w0);
        let r = renorm(&sys);
        let m = r.modulated(sys.spectrum());
        for &w in &omegas {
            let diff = g_prime(w, &m).unwrap() - g_of_omega(w, sys.spectrum()).unwrap();
            let expected = r.omega_a - w;
            let agrees = if expected == 0.0 {
                diff == 0.0
            } else {
                diff.signum() == expected.signum() && diff != 0.0
            };
            if !agrees {
                return Err(format!("omega0={w0}: sign mismatch at omega={w}"));
            }
        }
    }
    check(
        true,
        "sign(G'-G) = sign(omega_a-omega) on 200 points x 3 parameter sets".into(),
    )
}

fn main() -> ExitCode {
    let criteria: [Criterion; 11] = [
        ("dephasing normalization", dephasing_normalization),
        ("eta limits and monotonicity", eta_limits_and_monotonicity),
        ("Zeno-time ordering", zeno_time_ordering),
        ("short-time law", short_time_law),
        ("long-time limit", long_time_limit),
        ("pure Zeno regime at omega0=0.2", pure_zeno_at_low_frequency),
        (
            "weak anti-Zeno window at omega0=0.5",
            weak_window_at_half_frequency,
        ),
        (
            "wider anti-Zeno window at omega0=1.5",
            wider_window_above_resonance,
        ),
        ("resonance agreement at omega0=1", resonance_agreement),
        ("Volterra vs perturbative rate", survival_oracle_equivalence),
        ("spectrum modulation sign", modulation_sign),
    ];
    let mut failures = 0;
    for (i, (name, run)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let outcome = run();
        let secs = start.elapsed().as_secs_f64();
        match outcome {
            Ok(detail) => println!("criterion {:>2} PASS  {name}: {detail} [{secs:.1}s]", i + 1),
            Err(detail) => {
                failures += 1;
                println!("criterion {:>2} FAIL  {name}: {detail} [{secs:.1}s]", i + 1);
            }
        }
    }
    println!(
        "acceptance: {} passed, {failures} failed",
        criteria.len() - failures
    );
    if failures == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
