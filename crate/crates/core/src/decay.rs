//! Effective decay rates `γ(τ)` after a measurement interval `τ`, the Zeno
//! time, and classification of Zeno (QZE) versus anti-Zeno (AQZE) intervals.
//!
//! `γ(τ) = 2π ∫₀^∞ S(ω) F(ω − ω_c; τ) dω` with `S = G`, `ω_c = ω₀` under the
//! RWA and `S = G′`, `ω_c = ω_a` with the anti-rotating terms kept. Passing a
//! [`RenormalizedSystem`] selects the latter.

use std::f64::consts::PI;

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::numerics::{integrate_windowed, QuadratureSpec, WindowDomain};
use crate::renormalization::{RenormalizedSystem, SystemConfig};
use crate::spectral::{spectral_moment, SpectralDensity};
use crate::Mode;

#[derive(Debug, Clone, PartialEq)]
pub struct RateCurve {
    pub mode: Mode,
    pub taus: Vec<f64>,
    pub gammas: Vec<f64>,
    /// Weisskopf-Wigner rate `2πG(ω₀)`.
    pub gamma0: f64,
    /// Long-time limit: `2πG(ω₀)` for RWA, `2πG′(ω_a)` otherwise.
    pub gamma_asym: f64,
}

/// Rate a curve is compared against when looking for anti-Zeno intervals.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Reference {
    /// `γ₀ = 2πG(ω₀)`, the normalization of the usual `γ₀τ` axes.
    #[default]
    Gamma0,
    /// The curve's own long-time rate.
    GammaAsym,
}

impl Reference {
    pub fn rate(self, curve: &RateCurve) -> f64 {
        match self {
            Reference::Gamma0 => curve.gamma0,
            Reference::GammaAsym => curve.gamma_asym,
        }
    }
}

/// A maximal interval on which `γ(τ)` exceeds the reference rate.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ZenoWindow {
    pub tau_lo: f64,
    pub tau_hi: f64,
    /// `γ₀·tau_lo`
    pub gamma0_tau_lo: f64,
    /// `γ₀·tau_hi`
    pub gamma0_tau_hi: f64,
    /// The window starts at the first grid point, so its true start may be earlier.
    pub open_lo: bool,
    /// The window reaches the last grid point, so its true end may be later.
    pub open_hi: bool,
}

impl ZenoWindow {
    /// `self` covers `other` and is not identical to it.
    pub fn strictly_contains(&self, other: &ZenoWindow) -> bool {
        self.tau_lo <= other.tau_lo
            && self.tau_hi >= other.tau_hi
            && (self.tau_lo < other.tau_lo || self.tau_hi > other.tau_hi)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ZenoClassification {
    pub windows: Vec<ZenoWindow>,
    pub reference: f64,
    /// No anti-Zeno window anywhere on the grid.
    pub pure_qze: bool,
}

pub fn wigner_weisskopf_rate(cfg: &SystemConfig) -> f64 {
    2.0 * PI * cfg.spectrum().density(cfg.omega0())
}

/// `2π ∫₀^∞ S(ω) F(ω − center; τ) dω` for an arbitrary spectrum.
pub fn windowed_rate<S: SpectralDensity + ?Sized>(
    spectrum: &S,
    center: f64,
    tau: f64,
    quad: &QuadratureSpec,
) -> Result<f64> {
    let v = integrate_windowed(
        |w| spectrum.density(w),
        center,
        tau,
        WindowDomain::PositiveAxis,
        quad,
    )?;
    Ok(2.0 * PI * v.max(0.0))
}

pub fn effective_rate(
    tau: f64,
    cfg: &SystemConfig,
    rsys: Option<&RenormalizedSystem>,
    quad: &QuadratureSpec,
) -> Result<f64> {
    if !(tau.is_finite() && tau > 0.0) {
        return Err(Error::domain(format!("tau must be > 0, got {tau}")));
    }
    match rsys {
        None => windowed_rate(cfg.spectrum(), cfg.omega0(), tau, quad),
        Some(r) => windowed_rate(&r.modulated(cfg.spectrum()), r.omega_a, tau, quad),
    }
}

pub fn mode_of(rsys: Option<&RenormalizedSystem>) -> Mode {
    if rsys.is_some() {
        Mode::Full
    } else {
        Mode::Rwa
    }
}

/// Long-time rate of the selected mode.
pub fn asymptotic_rate(cfg: &SystemConfig, rsys: Option<&RenormalizedSystem>) -> f64 {
    match rsys {
        None => wigner_weisskopf_rate(cfg),
        Some(r) => 2.0 * PI * r.modulated(cfg.spectrum()).density(r.omega_a),
    }
}

/// `effective_rate` over a strictly increasing grid of positive times.
/// Grid points are evaluated in parallel; the result does not depend on
/// scheduling.
pub fn rate_curve(
    cfg: &SystemConfig,
    rsys: Option<&RenormalizedSystem>,
    tau_grid: &[f64],
    quad: &QuadratureSpec,
) -> Result<RateCurve> {
    check_grid(tau_grid)?;
    let gammas = tau_grid
        .par_iter()
        .map(|&t| effective_rate(t, cfg, rsys, quad))
        .collect::<Result<Vec<_>>>()?;
    Ok(RateCurve {
        mode: mode_of(rsys),
        taus: tau_grid.to_vec(),
        gammas,
        gamma0: wigner_weisskopf_rate(cfg),
        gamma_asym: asymptotic_rate(cfg, rsys),
    })
}

pub(crate) fn check_grid(taus: &[f64]) -> Result<()> {
    if taus.is_empty() {
        return Err(Error::domain("tau grid is empty"));
    }
    if taus.iter().any(|t| !(t.is_finite() && *t > 0.0)) {
        return Err(Error::domain("tau grid must be positive and finite"));
    }
    if taus.windows(2).any(|w| !(w[0] < w[1])) {
        return Err(Error::domain("tau grid must be strictly increasing"));
    }
    Ok(())
}

/// `τ_Z = (∫₀^∞ S(ω) dω)^{−1/2}`: the time scale of the initial quadratic
/// decay `P(τ) ≈ 1 − τ²/τ_Z²`.
pub fn zeno_time(
    cfg: &SystemConfig,
    rsys: Option<&RenormalizedSystem>,
    quad: &QuadratureSpec,
) -> Result<f64> {
    if cfg.spectrum().alpha() == 0.0 {
        return Err(Error::InfiniteZenoTime);
    }
    let moment = match rsys {
        None => spectral_moment(cfg.spectrum(), quad)?,
        Some(r) => spectral_moment(&r.modulated(cfg.spectrum()), quad)?,
    };
    if !(moment > 0.0) {
        return Err(Error::InfiniteZenoTime);
    }
    Ok(moment.powf(-0.5))
}

/// Anti-Zeno windows with crossings interpolated linearly in `ln τ` between
/// grid points.
pub fn classify_zeno(curve: &RateCurve, reference: Reference) -> ZenoClassification {
    let reference = reference.rate(curve);
    let windows = find_windows(curve, reference, |lo, hi, g_lo, g_hi| {
        let (a, b) = (lo.ln(), hi.ln());
        let frac = (reference - g_lo) / (g_hi - g_lo);
        Ok((a + frac * (b - a)).exp())
    })
    .expect("interpolation cannot fail");
    ZenoClassification {
        pure_qze: windows.is_empty(),
        windows,
        reference,
    }
}

/// Anti-Zeno windows with each crossing refined by bisection on `rate`
/// (normally [`effective_rate`] for the curve's configuration) between the
/// bracketing grid points.
pub fn classify_zeno_refined<F>(
    curve: &RateCurve,
    reference: Reference,
    rate: F,
) -> Result<ZenoClassification>
where
    F: Fn(f64) -> Result<f64>,
{
    let reference = reference.rate(curve);
    let windows = find_windows(curve, reference, |lo, hi, g_lo, _| {
        let above_lo = g_lo > reference;
        let (mut a, mut b) = (lo, hi);
        for _ in 0..60 {
            let mid = (a * b).sqrt();
            if !(a < mid && mid < b) || (b - a) <= 1e-10 * b {
                break;
            }
            if (rate(mid)? > reference) == above_lo {
                a = mid;
            } else {
                b = mid;
            }
        }
        Ok((a * b).sqrt())
    })?;
    Ok(ZenoClassification {
        pure_qze: windows.is_empty(),
        windows,
        reference,
    })
}

fn find_windows<C>(curve: &RateCurve, reference: f64, mut crossing: C) -> Result<Vec<ZenoWindow>>
where
    C: FnMut(f64, f64, f64, f64) -> Result<f64>,
{
    let taus = &curve.taus;
    let gammas = &curve.gammas;
    let n = taus.len().min(gammas.len());
    let mut windows = Vec::new();
    let mut start: Option<(f64, bool)> = None;

    for i in 0..n {
        let above = gammas[i] > reference;
        match (above, start) {
            (true, None) => {
                start = Some(if i == 0 {
                    (taus[0], true)
                } else {
                    (
                        crossing(taus[i - 1], taus[i], gammas[i - 1], gammas[i])?,
                        false,
                    )
                });
            }
            (false, Some((lo, open_lo))) => {
                let hi = crossing(taus[i - 1], taus[i], gammas[i - 1], gammas[i])?;
                windows.push(window(curve.gamma0, lo, hi, open_lo, false));
                start = None;
            }
            _ => {}
        }
    }
    if let Some((lo, open_lo)) = start {
        windows.push(window(curve.gamma0, lo, taus[n - 1], open_lo, true));
    }
    Ok(windows)
}

fn window(gamma0: f64, lo: f64, hi: f64, open_lo: bool, open_hi: bool) -> ZenoWindow {
    ZenoWindow {
        tau_lo: lo,
        tau_hi: hi,
        gamma0_tau_lo: gamma0 * lo,
        gamma0_tau_hi: gamma0 * hi,
        open_lo,
        open_hi,
    }
}

/// `n` points spaced evenly in `ln τ` between `lo` and `hi` inclusive.
pub fn log_grid(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    if n == 1 {
        return vec![lo];
    }
    let (a, b) = (lo.ln(), hi.ln());
    (0..n)
        .map(|i| {
            if i == 0 {
                lo
            } else if i == n - 1 {
                hi
            } else {
                (a + (b - a) * i as f64 / (n - 1) as f64).exp()
            }
        })
        .collect()
}
