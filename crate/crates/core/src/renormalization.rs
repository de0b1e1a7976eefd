//! Scalar outcomes of the unitary transformation that absorbs the
//! anti-rotating terms: the displacement weights `ξ(ω)`, the self-consistent
//! factor `η`, the renormalized transition `ω_a = ηω₀`, and the ground-state
//! energetics.

use crate::error::{Error, Result};
use crate::numerics::{bisect_fixed_point, fixed_point::BRACKET_FLOOR, integrate_semi_infinite};
use crate::numerics::{solve_fixed_point, FixedPointMethod, FixedPointSpec, QuadratureSpec};
use crate::spectral::{BathSpectrum, ModulatedSpectrum, SpectralDensity};

/// A bare two-level transition `ω₀` coupled to a bath.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SystemConfig {
    omega0: f64,
    spectrum: BathSpectrum,
}

impl SystemConfig {
    pub fn new(omega0: f64, spectrum: BathSpectrum) -> Result<Self> {
        if !(omega0.is_finite() && omega0 > 0.0) {
            return Err(Error::domain(format!("omega0 must be > 0, got {omega0}")));
        }
        Ok(SystemConfig { omega0, spectrum })
    }

    pub fn omega0(&self) -> f64 {
        self.omega0
    }

    pub fn spectrum(&self) -> &BathSpectrum {
        &self.spectrum
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RenormalizedSystem {
    pub eta: f64,
    pub omega_a: f64,
    /// `(η − 1)·ω₀`
    pub energy_shift: f64,
    /// Bath-induced term of the ground energy, `∫₀^∞ (G(ω)/ω)·ξ(2 − ξ) dω`.
    pub self_energy: f64,
    /// `−½ηω₀ − self_energy`
    pub ground_energy: f64,
    /// `|η − eta_map(η)|` at the returned `η`.
    pub residual: f64,
    pub method: FixedPointMethod,
}

impl RenormalizedSystem {
    /// `G′` for this transition frequency.
    pub fn modulated(&self, bath: &BathSpectrum) -> ModulatedSpectrum {
        ModulatedSpectrum::new(*bath, self.omega_a).expect("omega_a is positive by construction")
    }
}

/// `ξ(ω) = ω / (ω + ω_a)`.
pub fn xi(omega: f64, omega_a: f64) -> Result<f64> {
    if !(omega >= 0.0) {
        return Err(Error::domain(format!("xi needs omega >= 0, got {omega}")));
    }
    if !(omega_a.is_finite() && omega_a > 0.0) {
        return Err(Error::domain(format!(
            "xi needs omega_a > 0, got {omega_a}"
        )));
    }
    if omega.is_infinite() {
        return Ok(1.0);
    }
    Ok(omega / (omega + omega_a))
}

/// One application of the self-consistency condition,
/// `η ↦ exp(−2∫₀^∞ G(ω) / (ω + η·ω₀)² dω)`.
pub fn eta_map(eta_trial: f64, cfg: &SystemConfig, quad: &QuadratureSpec) -> Result<f64> {
    if !(eta_trial > 0.0 && eta_trial <= 1.0) {
        return Err(Error::domain(format!(
            "eta trial must lie in (0, 1], got {eta_trial}"
        )));
    }
    let bath = cfg.spectrum;
    if bath.alpha() == 0.0 {
        return Ok(1.0);
    }
    let shifted = eta_trial * cfg.omega0;
    let exponent = integrate_semi_infinite(
        |w| {
            let d = w + shifted;
            bath.density(w) / (d * d)
        },
        quad,
    )?;
    Ok((-2.0 * exponent).exp())
}

/// Self-consistent `η` by damped iteration from the RWA value `η = 1`, plus
/// the derived energies.
pub fn solve_renormalization(
    cfg: &SystemConfig,
    quad: &QuadratureSpec,
    fp: &FixedPointSpec,
) -> Result<RenormalizedSystem> {
    let sol = solve_fixed_point(|e| eta_map(e.clamp(BRACKET_FLOOR, 1.0), cfg, quad), 1.0, fp)?;
    finish(cfg, quad, sol.value, sol.residual, sol.method)
}

/// Same fixed point found by bisection alone, for cross-checking.
pub fn solve_renormalization_by_bisection(
    cfg: &SystemConfig,
    quad: &QuadratureSpec,
    fp: &FixedPointSpec,
) -> Result<RenormalizedSystem> {
    let sol = bisect_fixed_point(|e| eta_map(e, cfg, quad), BRACKET_FLOOR, 1.0, fp)?;
    finish(cfg, quad, sol.value, sol.residual, sol.method)
}

fn finish(
    cfg: &SystemConfig,
    quad: &QuadratureSpec,
    eta: f64,
    residual: f64,
    method: FixedPointMethod,
) -> Result<RenormalizedSystem> {
    if !(eta > 0.0 && eta <= 1.0) {
        return Err(Error::non_convergent(
            "renormalization",
            format!("eta = {eta} outside (0, 1]"),
        ));
    }
    let omega0 = cfg.omega0;
    let omega_a = eta * omega0;
    let self_energy = self_energy(cfg.spectrum(), omega_a, quad)?;
    Ok(RenormalizedSystem {
        eta,
        omega_a,
        energy_shift: (eta - 1.0) * omega0,
        self_energy,
        ground_energy: -0.5 * eta * omega0 - self_energy,
        residual,
        method,
    })
}

/// `∫₀^∞ (G(ω)/ω)·ξ(ω)(2 − ξ(ω)) dω` with `ξ` evaluated at `omega_a`.
pub fn self_energy(bath: &BathSpectrum, omega_a: f64, quad: &QuadratureSpec) -> Result<f64> {
    if bath.alpha() == 0.0 {
        return Ok(0.0);
    }
    integrate_semi_infinite(
        |w| {
            let x = w / (w + omega_a);
            bath.density_over_omega(w) * x * (2.0 - x)
        },
        quad,
    )
}
