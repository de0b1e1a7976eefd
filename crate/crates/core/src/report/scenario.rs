use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use rayon::prelude::*;

use super::config::{AlphaSelection, ModeSelection, Scenario, ScenarioConfig, TauGrid};
use super::ReportError;
use crate::decay::{
    classify_zeno_refined, effective_rate, rate_curve, wigner_weisskopf_rate, zeno_time, Reference,
};
use crate::renormalization::{solve_renormalization, RenormalizedSystem, SystemConfig};
use crate::spectral::{g_of_omega, g_prime, modulation_factor, BathSpectrum};
use crate::survival::{rate_from_survival, survival_curve};
use crate::Error;

/// CSV body: header plus rows of optional numbers (`None` prints empty).
#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    pub header: &'static str,
    pub rows: Vec<Vec<Option<f64>>>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunOutput {
    pub path: PathBuf,
    pub table: Table,
    /// One-line human readable result.
    pub summary: String,
}

/// Computes the scenario, writes its CSV and returns the summary.
pub fn run_scenario(cfg: &ScenarioConfig) -> Result<RunOutput, ReportError> {
    let (table, summary) = match cfg.scenario {
        Scenario::Eta => eta_sweep(cfg)?,
        Scenario::ZenoTime => zeno_time_sweep(cfg)?,
        Scenario::Rate => rate_scenario(cfg)?,
        Scenario::Spectrum => spectrum_scenario(cfg)?,
        Scenario::Survival => survival_scenario(cfg)?,
    };
    write_atomic(&cfg.out, &render_csv(cfg, &table))?;
    Ok(RunOutput {
        path: cfg.out.clone(),
        table,
        summary: format!("{summary} -> {}", cfg.out.display()),
    })
}

pub fn render_csv(cfg: &ScenarioConfig, table: &Table) -> String {
    let mut out = format!("# {}\n{}\n", cfg.command_line(), table.header);
    for row in &table.rows {
        for (i, cell) in row.iter().enumerate() {
            if i > 0 {
                out.push(',');
            }
            if let Some(v) = cell {
                format_number(&mut out, *v);
            }
        }
        out.push('\n');
    }
    out
}

fn format_number(out: &mut String, v: f64) {
    if v.is_finite() {
        write!(out, "{v:.11e}").unwrap();
    } else if v.is_nan() {
        out.push_str("nan");
    } else if v > 0.0 {
        out.push_str("inf");
    } else {
        out.push_str("-inf");
    }
}

/// Writes to a sibling temporary file and renames it over `path`.
pub fn write_atomic(path: &Path, contents: &str) -> Result<(), ReportError> {
    let io = |source| ReportError::Io {
        path: path.to_path_buf(),
        source,
    };
    let name = path.file_name().ok_or_else(|| {
        io(std::io::Error::new(
            std::io::ErrorKind::InvalidInput,
            "not a file path",
        ))
    })?;
    let tmp = path.with_file_name(format!(
        ".{}.{}.tmp",
        name.to_string_lossy(),
        std::process::id()
    ));
    std::fs::write(&tmp, contents).map_err(io)?;
    std::fs::rename(&tmp, path).map_err(|e| {
        let _ = std::fs::remove_file(&tmp);
        io(e)
    })
}

fn system(alpha: f64, omega0: f64, gamma_width: f64) -> Result<SystemConfig, ReportError> {
    let bath = BathSpectrum::with_unit_center(alpha, gamma_width)
        .map_err(|e| ReportError::Config(e.to_string()))?;
    SystemConfig::new(omega0, bath).map_err(|e| ReportError::Config(e.to_string()))
}

fn single_alpha(cfg: &ScenarioConfig) -> f64 {
    match cfg.alpha {
        AlphaSelection::Single(a) => a,
        AlphaSelection::Grid(g) => g.min,
    }
}

fn single_omega0(cfg: &ScenarioConfig) -> f64 {
    cfg.omega0.points()[0]
}

fn renormalize(
    cfg: &ScenarioConfig,
    sys: &SystemConfig,
) -> Result<RenormalizedSystem, ReportError> {
    Ok(solve_renormalization(sys, &cfg.quad, &cfg.fixed_point)?)
}

/// `τ_Z`, infinite for a decoupled system.
fn zeno_time_or_inf(
    sys: &SystemConfig,
    rsys: Option<&RenormalizedSystem>,
    cfg: &ScenarioConfig,
) -> Result<f64, ReportError> {
    match zeno_time(sys, rsys, &cfg.quad) {
        Err(Error::InfiniteZenoTime) => Ok(f64::INFINITY),
        other => Ok(other?),
    }
}

fn eta_sweep(cfg: &ScenarioConfig) -> Result<(Table, String), ReportError> {
    let alphas = match cfg.alpha {
        AlphaSelection::Single(a) => vec![a],
        AlphaSelection::Grid(g) => g.points(),
    };
    let cases: Vec<(f64, f64)> = cfg
        .omega0
        .points()
        .into_iter()
        .flat_map(|w| alphas.iter().map(move |&a| (a, w)))
        .collect();
    let rows = cases
        .par_iter()
        .map(|&(a, w)| {
            let r = renormalize(cfg, &system(a, w, cfg.gamma_width)?)?;
            Ok(vec![
                Some(a),
                Some(w),
                Some(r.eta),
                Some(r.omega_a),
                Some(r.energy_shift),
                Some(r.self_energy),
                Some(r.ground_energy),
            ])
        })
        .collect::<Result<Vec<_>, ReportError>>()?;

    let etas = rows.iter().filter_map(|r| r[2]);
    let (lo, hi) = etas.fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), e| {
        (lo.min(e), hi.max(e))
    });
    let summary = format!("eta: {} points, eta in [{lo:.6}, {hi:.6}]", rows.len());
    Ok((
        Table {
            header: "alpha,omega0,eta,omega_a,energy_shift,self_energy,ground_energy",
            rows,
        },
        summary,
    ))
}

fn zeno_time_sweep(cfg: &ScenarioConfig) -> Result<(Table, String), ReportError> {
    let alpha = single_alpha(cfg);
    let omegas = cfg.omega0.points();
    let rwa_tz = if cfg.mode.rwa() {
        Some(zeno_time_or_inf(
            &system(alpha, omegas[0], cfg.gamma_width)?,
            None,
            cfg,
        )?)
    } else {
        None
    };
    let rows = omegas
        .par_iter()
        .map(|&w| {
            let sys = system(alpha, w, cfg.gamma_width)?;
            let (full, eta) = if cfg.mode.full() {
                let r = renormalize(cfg, &sys)?;
                (Some(zeno_time_or_inf(&sys, Some(&r), cfg)?), Some(r.eta))
            } else {
                (None, None)
            };
            Ok(vec![Some(w), rwa_tz, full, eta])
        })
        .collect::<Result<Vec<_>, ReportError>>()?;

    let mut summary = format!("zeno-time: alpha={alpha} {} points", rows.len());
    if let Some(tz) = rwa_tz {
        write!(summary, " tau_z_rwa={tz:.6}").unwrap();
        if cfg.mode.full() {
            let crossing = rows.windows(2).find_map(|p| {
                let (w0, f0) = (p[0][0]?, p[0][2]? - tz);
                let (w1, f1) = (p[1][0]?, p[1][2]? - tz);
                (f0.signum() != f1.signum()).then(|| w0 + (w1 - w0) * f0 / (f0 - f1))
            });
            match crossing {
                Some(w) => write!(summary, " full crosses rwa at omega0={w:.4}").unwrap(),
                None => summary.push_str(" full does not cross rwa"),
            }
        }
    }
    Ok((
        Table {
            header: "omega0,tau_z_rwa,tau_z_full,eta",
            rows,
        },
        summary,
    ))
}

fn describe_windows(label: &str, windows: &[crate::decay::ZenoWindow]) -> String {
    if windows.is_empty() {
        return format!(" aqze_{label}=none");
    }
    let parts: Vec<String> = windows
        .iter()
        .map(|w| {
            format!(
                "{}{:.4}..{:.4}{}",
                if w.open_lo { "<" } else { "" },
                w.gamma0_tau_lo,
                w.gamma0_tau_hi,
                if w.open_hi { "+" } else { "" }
            )
        })
        .collect();
    format!(" aqze_{label}={}", parts.join(";"))
}

fn rate_scenario(cfg: &ScenarioConfig) -> Result<(Table, String), ReportError> {
    let (alpha, omega0) = (single_alpha(cfg), single_omega0(cfg));
    let sys = system(alpha, omega0, cfg.gamma_width)?;
    let r = renormalize(cfg, &sys)?;
    let gamma0 = wigner_weisskopf_rate(&sys);
    let taus = match cfg.tau_grid {
        TauGrid::Tau(g) => g.points(),
        TauGrid::Gamma0Tau(g) => {
            if !(gamma0 > 0.0) {
                return Err(ReportError::Config(
                    "gamma0 vanishes, so the default gamma0*tau grid is undefined; pass --tau-grid"
                        .into(),
                ));
            }
            g.scaled(1.0 / gamma0).points()
        }
    };

    let mut summary = format!(
        "rate: alpha={alpha} omega0={omega0} gamma0={gamma0:.6e} eta={:.6} tau_z_rwa={:.6} tau_z_full={:.6}",
        r.eta,
        zeno_time_or_inf(&sys, None, cfg)?,
        zeno_time_or_inf(&sys, Some(&r), cfg)?
    );
    let mut columns: [Option<Vec<f64>>; 2] = [None, None];
    for (slot, (label, rsys, wanted)) in [
        ("rwa", None, cfg.mode.rwa()),
        ("full", Some(&r), cfg.mode.full()),
    ]
    .into_iter()
    .enumerate()
    {
        if !wanted {
            continue;
        }
        let curve = rate_curve(&sys, rsys, &taus, &cfg.quad)?;
        if gamma0 > 0.0 {
            let classes = classify_zeno_refined(&curve, Reference::Gamma0, |t| {
                effective_rate(t, &sys, rsys, &cfg.quad)
            })?;
            summary += &describe_windows(label, &classes.windows);
        }
        columns[slot] = Some(curve.gammas);
    }

    let ratio = |g: f64| (gamma0 > 0.0).then(|| g / gamma0);
    let rows = taus
        .iter()
        .enumerate()
        .map(|(i, &t)| {
            let rwa = columns[0].as_ref().map(|c| c[i]);
            let full = columns[1].as_ref().map(|c| c[i]);
            vec![
                Some(t),
                Some(gamma0 * t),
                rwa,
                full,
                rwa.and_then(ratio),
                full.and_then(ratio),
            ]
        })
        .collect();
    Ok((
        Table {
            header:
                "tau,gamma0_tau,gamma_rwa,gamma_full,gamma_rwa_over_gamma0,gamma_full_over_gamma0",
            rows,
        },
        summary,
    ))
}

fn spectrum_scenario(cfg: &ScenarioConfig) -> Result<(Table, String), ReportError> {
    let (alpha, omega0) = (single_alpha(cfg), single_omega0(cfg));
    let sys = system(alpha, omega0, cfg.gamma_width)?;
    let r = renormalize(cfg, &sys)?;
    let m = r.modulated(sys.spectrum());
    let rows = cfg
        .omega_grid
        .points()
        .into_iter()
        .map(|w| {
            Ok(vec![
                Some(w),
                Some(g_of_omega(w, sys.spectrum())?),
                Some(modulation_factor(w, r.omega_a)?),
                Some(g_prime(w, &m)?),
            ])
        })
        .collect::<Result<Vec<_>, Error>>()?;
    let summary = format!(
        "spectrum: alpha={alpha} omega0={omega0} eta={:.6} omega_a={:.6} gamma0={:.6e} tau_z_rwa={:.6} tau_z_full={:.6}",
        r.eta,
        r.omega_a,
        wigner_weisskopf_rate(&sys),
        zeno_time_or_inf(&sys, None, cfg)?,
        zeno_time_or_inf(&sys, Some(&r), cfg)?
    );
    Ok((
        Table {
            header: "omega,g,f_factor,g_prime",
            rows,
        },
        summary,
    ))
}

fn survival_scenario(cfg: &ScenarioConfig) -> Result<(Table, String), ReportError> {
    let (alpha, omega0) = (single_alpha(cfg), single_omega0(cfg));
    let sys = system(alpha, omega0, cfg.gamma_width)?;
    let r = renormalize(cfg, &sys)?;
    let rsys = (cfg.mode != ModeSelection::Rwa).then_some(&r);
    let curve = survival_curve(&sys, rsys, cfg.t_max, &cfg.quad, cfg.grid_step)?;
    let rates = rate_from_survival(&curve);

    let rows: Vec<Vec<Option<f64>>> = curve
        .taus
        .iter()
        .zip(&curve.amplitudes)
        .zip(&curve.probabilities)
        .enumerate()
        .map(|(i, ((&t, x), &p))| {
            let gamma = if i == 0 {
                None
            } else {
                Some(rates.gammas[i - 1])
            };
            vec![Some(t), Some(x.re), Some(x.im), Some(p), gamma]
        })
        .collect();
    let summary = format!(
        "survival: mode={} alpha={alpha} omega0={omega0} gamma0={:.6e} eta={:.6} tau_z={:.6} steps={} p_end={:.9} gamma_eff_end={:.6e}",
        curve.mode,
        curve.gamma0,
        r.eta,
        zeno_time_or_inf(&sys, rsys, cfg)?,
        curve.taus.len() - 1,
        curve.probabilities.last().copied().unwrap_or(1.0),
        rates.gammas.last().copied().unwrap_or(0.0),
    );
    Ok((
        Table {
            header: "tau,re_x,im_x,p,gamma_eff",
            rows,
        },
        summary,
    ))
}
