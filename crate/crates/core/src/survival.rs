//! Survival amplitude `x(τ)` of the excited state in the one-boson sector.
//!
//! The amplitude is the inverse Laplace transform of
//! `1 / (p + iω̃ + Σ(p))` with self-energy `Σ(p) = ∫₀^∞ S(ω)/(p + iω) dω`
//! (`S = G`, `ω̃ = ω₀` under the RWA; `S = G′`, `ω̃ = ω_a` otherwise). Since
//! `Σ(p)` is the Laplace transform of the memory kernel
//! `K(t) = ∫₀^∞ S(ω) e^{−iωt} dω`, that resolvent is exactly the solution of
//!
//! ```text
//! ẋ(t) = −iω̃·x(t) − ∫₀ᵗ K(t−s) x(s) ds,    x(0) = 1,
//! ```
//!
//! which is what this module integrates in the time domain. No contour in the
//! complex `p` plane is ever evaluated.

use std::f64::consts::PI;

use num_complex::Complex64;
use rayon::prelude::*;

use crate::decay::{asymptotic_rate, mode_of, wigner_weisskopf_rate, RateCurve};
use crate::error::{Error, Result};
use crate::numerics::quadrature::kronrod21_rule;
use crate::numerics::{
    integrate_partition, integrate_semi_infinite_from, volterra_solve_sampled, QuadratureSpec,
    SemiInfiniteMap,
};
use crate::renormalization::{RenormalizedSystem, SystemConfig};
use crate::spectral::{spectral_moment, SpectralDensity};
use crate::Mode;

/// Fraction of the total spectral weight allowed above the frequency cutoff
/// of the sampled kernel used for time stepping.
pub const KERNEL_TAIL_FRACTION: f64 = 1e-6;

/// Tolerated excess of `|x|²` over 1 before it is treated as an error rather
/// than rounding.
pub const PROBABILITY_SLACK: f64 = 1e-10;

#[derive(Debug, Clone, PartialEq)]
pub struct SurvivalCurve {
    pub mode: Mode,
    /// Uniform grid starting at 0.
    pub taus: Vec<f64>,
    pub amplitudes: Vec<Complex64>,
    /// `|x|²`, clamped into `(0, 1]`.
    pub probabilities: Vec<f64>,
    pub gamma0: f64,
    pub gamma_asym: f64,
    /// Largest amount by which a raw `|x|²` exceeded 1 before clamping.
    pub max_clamp: f64,
}

fn kernel_spectrum<'a>(
    cfg: &'a SystemConfig,
    rsys: Option<&RenormalizedSystem>,
) -> (Box<dyn SpectralDensity + 'a>, f64) {
    match rsys {
        None => (Box::new(*cfg.spectrum()), cfg.omega0()),
        Some(r) => (Box::new(r.modulated(cfg.spectrum())), r.omega_a),
    }
}

/// `K(t) = ∫₀^∞ S(ω) e^{−iωt} dω` at a single time, by
/// [`kernel_by_panels`] (exact moment at `t = 0`).
pub fn memory_kernel(
    t: f64,
    cfg: &SystemConfig,
    rsys: Option<&RenormalizedSystem>,
    quad: &QuadratureSpec,
) -> Result<Complex64> {
    if !(t.is_finite() && t >= 0.0) {
        return Err(Error::domain(format!("kernel time must be >= 0, got {t}")));
    }
    let (s, _) = kernel_spectrum(cfg, rsys);
    if t == 0.0 {
        return Ok(Complex64::new(spectral_moment(&*s, quad)?, 0.0));
    }
    kernel_by_panels(&*s, t, quad)
}

/// Cosine and sine transforms of the spectrum truncated at the smallest
/// `W = 4·scale·2^m` with `∫_W^∞ S ≤ quad.tail_tol`, integrated adaptively
/// without any knowledge of the oscillation. The truncation bounds the error
/// by `tail_tol`, so the cost grows like `t/tail_tol^{1/2}`; meant as an
/// independent check on [`kernel_by_panels`] at moderate `t`.
pub fn kernel_by_transform<S: SpectralDensity + ?Sized>(
    s: &S,
    t: f64,
    quad: &QuadratureSpec,
) -> Result<Complex64> {
    if !(t.is_finite() && t >= 0.0) {
        return Err(Error::domain(format!("kernel time must be >= 0, got {t}")));
    }
    if t == 0.0 {
        return Ok(Complex64::new(spectral_moment(s, quad)?, 0.0));
    }
    let mut cutoff = 4.0 * quad.scale;
    while integrate_semi_infinite_from(|w| s.density(w), cutoff, SemiInfiniteMap::Rational, quad)?
        .value
        > quad.tail_tol
    {
        cutoff *= 2.0;
        if cutoff > 1e9 * quad.scale {
            return Err(Error::non_convergent(
                "memory kernel",
                "spectral tail too heavy",
            ));
        }
    }
    let mut points: Vec<f64> = (-8..=12)
        .map(|k| quad.scale * 2f64.powi(k))
        .filter(|&w| w < cutoff)
        .collect();
    points.insert(0, 0.0);
    points.push(cutoff);
    let spec = QuadratureSpec {
        abs_tol: quad.abs_tol.max(quad.tail_tol),
        max_subdivisions: quad.max_subdivisions.max(400_000),
        ..*quad
    };
    let re = integrate_partition(|w| s.density(w) * (w * t).cos(), &points, &spec)?.value;
    let im = integrate_partition(|w| -s.density(w) * (w * t).sin(), &points, &spec)?.value;
    Ok(Complex64::new(re, im))
}

/// Cells at every half period `π/t` up to a cutoff `W`, with the remainder
/// `∫_W^∞` taken from two terms of its integration-by-parts expansion. `W`
/// grows until the bound `2|S′(W)|/t²` on the neglected part is below
/// `quad.tail_tol`; the bound assumes `|S′|` decreases beyond `4·scale`.
pub fn kernel_by_panels<S: SpectralDensity + ?Sized>(
    s: &S,
    t: f64,
    quad: &QuadratureSpec,
) -> Result<Complex64> {
    if !(t > 0.0) {
        return Err(Error::domain("panel kernel needs t > 0"));
    }
    let scale = quad.scale;
    let half_period = PI / t;
    let derivative = |w: f64| {
        let h = 1e-4 * w;
        (s.density(w + h) - s.density(w - h)) / (2.0 * h)
    };

    let mut cutoff = 4.0 * scale;
    while 2.0 * derivative(cutoff).abs() / (t * t) > quad.tail_tol {
        cutoff *= 2.0;
        if cutoff / half_period > 4e6 {
            return Err(Error::non_convergent(
                "memory kernel",
                format!("tail bound not reached below cutoff {cutoff:.3e} at t = {t}"),
            ));
        }
    }

    let n_half = (cutoff / half_period).floor() as usize;
    let mut points: Vec<f64> = (0..=n_half).map(|k| k as f64 * half_period).collect();
    points.extend(
        (-8..=12)
            .map(|k| scale * 2f64.powi(k))
            .filter(|&w| w < cutoff),
    );
    points.push(cutoff);
    points.sort_by(f64::total_cmp);
    points.dedup_by(|b, a| (*b - *a).abs() <= 1e-12 * cutoff);

    let spec = QuadratureSpec {
        max_subdivisions: quad.max_subdivisions.max(points.len()),
        ..*quad
    };
    let re = integrate_partition(|w| s.density(w) * (w * t).cos(), &points, &spec)?.value;
    let im = integrate_partition(|w| -s.density(w) * (w * t).sin(), &points, &spec)?.value;

    let it = Complex64::new(0.0, t);
    let tail =
        Complex64::cis(-cutoff * t) * (s.density(cutoff) / it + derivative(cutoff) / (it * it));
    Ok(Complex64::new(re, im) + tail)
}

/// `K(n·h)` for `n = 0..=n_steps`, computed together from one fixed set of
/// quadrature nodes.
///
/// The spectrum is cut at the smallest `W = 4·scale·2^m` above which at most
/// [`KERNEL_TAIL_FRACTION`] of its weight lies; `[0, W]` is covered by
/// 21-point Kronrod panels no wider than `8/t_max`, which resolves
/// `e^{−iωt}` up to the last sample. Nodes are split into fixed chunks that
/// run in parallel and are summed in order, so the result is reproducible.
pub fn sample_kernel(
    cfg: &SystemConfig,
    rsys: Option<&RenormalizedSystem>,
    grid_step: f64,
    n_steps: usize,
    quad: &QuadratureSpec,
) -> Result<Vec<Complex64>> {
    if !(grid_step.is_finite() && grid_step > 0.0) {
        return Err(Error::domain(format!(
            "grid step must be positive, got {grid_step}"
        )));
    }
    let (s, _) = kernel_spectrum(cfg, rsys);
    let s = &*s;
    let total = spectral_moment(s, quad)?;
    if total == 0.0 {
        return Ok(vec![Complex64::new(0.0, 0.0); n_steps + 1]);
    }

    let scale = quad.scale;
    let mut cutoff = 4.0 * scale;
    loop {
        let tail = integrate_semi_infinite_from(
            |w| s.density(w),
            cutoff,
            SemiInfiniteMap::Rational,
            quad,
        )?
        .value;
        if tail <= KERNEL_TAIL_FRACTION * total {
            break;
        }
        cutoff *= 2.0;
        if cutoff > 1e8 * scale {
            return Err(Error::non_convergent(
                "kernel sampling",
                "spectral tail too heavy",
            ));
        }
    }

    let t_max = grid_step * n_steps as f64;
    let width_limit = if t_max > 0.0 {
        8.0 / t_max
    } else {
        f64::INFINITY
    };
    let width = (0.1 * scale).min(width_limit);
    let n_panels = (cutoff / width).ceil() as usize;
    let width = cutoff / n_panels as f64;

    let (x, wt) = kronrod21_rule();
    let mut nodes = Vec::with_capacity(n_panels * 21);
    for p in 0..n_panels {
        let mid = (p as f64 + 0.5) * width;
        for (xi, wi) in x.iter().zip(&wt) {
            let w = mid + 0.5 * width * xi;
            nodes.push((w, 0.5 * width * wi * s.density(w)));
        }
    }

    const CHUNK: usize = 2048;
    const RESEED: usize = 256;
    let partials: Vec<Vec<Complex64>> = nodes
        .par_chunks(CHUNK)
        .map(|chunk| {
            let mut acc = vec![Complex64::new(0.0, 0.0); n_steps + 1];
            for &(w, weight) in chunk {
                let step = Complex64::cis(-w * grid_step);
                let mut phase = Complex64::new(1.0, 0.0);
                for (n, a) in acc.iter_mut().enumerate() {
                    if n % RESEED == 0 {
                        phase = Complex64::cis(-w * grid_step * n as f64);
                    }
                    *a += weight * phase;
                    phase *= step;
                }
            }
            acc
        })
        .collect();

    let mut kernel = vec![Complex64::new(0.0, 0.0); n_steps + 1];
    for part in &partials {
        for (k, p) in kernel.iter_mut().zip(part) {
            *k += p;
        }
    }
    Ok(kernel)
}

/// Default time step `0.05 / max(ω̃, Ω + Γ)`.
pub fn auto_grid_step(cfg: &SystemConfig, rsys: Option<&RenormalizedSystem>) -> f64 {
    let free = rsys.map_or(cfg.omega0(), |r| r.omega_a);
    let bath = cfg.spectrum();
    0.05 / free.max(bath.omega_c() + bath.gamma_width())
}

/// Survival curve on `[0, t_max]`. The step is `grid_step` (or
/// [`auto_grid_step`]) shrunk slightly so that `t_max` is a grid point.
pub fn survival_curve(
    cfg: &SystemConfig,
    rsys: Option<&RenormalizedSystem>,
    t_max: f64,
    quad: &QuadratureSpec,
    grid_step: Option<f64>,
) -> Result<SurvivalCurve> {
    if !(t_max.is_finite() && t_max > 0.0) {
        return Err(Error::domain(format!("t_max must be > 0, got {t_max}")));
    }
    let requested = grid_step.unwrap_or_else(|| auto_grid_step(cfg, rsys));
    if !(requested.is_finite() && requested > 0.0) {
        return Err(Error::domain(format!(
            "grid step must be positive, got {requested}"
        )));
    }
    let n_steps = (t_max / requested).ceil().max(1.0) as usize;
    let h = t_max / n_steps as f64;
    let (_, free) = kernel_spectrum(cfg, rsys);

    // Cheap guard before the expensive kernel sampling.
    if free * h > crate::numerics::volterra::MAX_PHASE_PER_STEP {
        return Err(Error::StepTooCoarse {
            product: free * h,
            limit: crate::numerics::volterra::MAX_PHASE_PER_STEP,
        });
    }

    let kernel = sample_kernel(cfg, rsys, h, n_steps, quad)?;
    let amplitudes = volterra_solve_sampled(&kernel, free, h)?;

    let mut max_clamp: f64 = 0.0;
    let probabilities = amplitudes
        .iter()
        .enumerate()
        .map(|(n, x)| {
            let p = x.norm_sqr();
            if p > 1.0 {
                max_clamp = max_clamp.max(p - 1.0);
                if p - 1.0 > PROBABILITY_SLACK {
                    log::warn!("survival probability {p} exceeds 1 at step {n}; clamped");
                }
                1.0
            } else if p <= 0.0 {
                log::warn!("survival probability {p} not positive at step {n}; clamped");
                f64::MIN_POSITIVE
            } else {
                p
            }
        })
        .collect();

    Ok(SurvivalCurve {
        mode: mode_of(rsys),
        taus: (0..=n_steps).map(|n| n as f64 * h).collect(),
        amplitudes,
        probabilities,
        gamma0: wigner_weisskopf_rate(cfg),
        gamma_asym: asymptotic_rate(cfg, rsys),
        max_clamp,
    })
}

/// `γ(τ) = −ln P(τ) / τ` at every grid point except `τ = 0`.
pub fn rate_from_survival(curve: &SurvivalCurve) -> RateCurve {
    let (taus, gammas) = curve
        .taus
        .iter()
        .zip(&curve.probabilities)
        .filter(|(t, _)| **t > 0.0)
        .map(|(&t, &p)| (t, -p.ln() / t))
        .unzip();
    RateCurve {
        mode: curve.mode,
        taus,
        gammas,
        gamma0: curve.gamma0,
        gamma_asym: curve.gamma_asym,
    }
}
