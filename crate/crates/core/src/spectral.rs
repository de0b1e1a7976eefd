//! Bath spectra and the dephasing window.
//!
//! Frequencies are in units of the spectral centre `Ω` (so `omega_c` is 1
//! unless a caller deliberately rescales). Sums over bath modes
//! `Σ_k g_k² h(ω_k)` are evaluated in the continuum as `4∫₀^∞ G(ω) h(ω) dω`,
//! which follows from `G(ω) = ¼ Σ_k g_k² δ(ω − ω_k)`.

use crate::error::{Error, Result};
use crate::numerics::{integrate_semi_infinite, quadrature::sinc2_window, QuadratureSpec};

/// A spectral density that can be sampled on `ω ≥ 0`.
///
/// Implementations return 0 for negative frequencies: bath modes have
/// positive frequencies only.
pub trait SpectralDensity: Sync {
    fn density(&self, omega: f64) -> f64;
}

impl<T: SpectralDensity + ?Sized> SpectralDensity for &T {
    fn density(&self, omega: f64) -> f64 {
        (**self).density(omega)
    }
}

/// Peaked interacting spectrum
/// `G(ω) = ½αωΩ⁴ / ((ω² − Ω²)² + Γ²ω²)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BathSpectrum {
    alpha: f64,
    omega_c: f64,
    gamma_width: f64,
}

impl BathSpectrum {
    pub fn new(alpha: f64, omega_c: f64, gamma_width: f64) -> Result<Self> {
        if !(alpha.is_finite() && alpha >= 0.0) {
            return Err(Error::domain(format!("alpha must be >= 0, got {alpha}")));
        }
        if !(omega_c.is_finite() && omega_c > 0.0) {
            return Err(Error::domain(format!("omega_c must be > 0, got {omega_c}")));
        }
        if !(gamma_width.is_finite() && gamma_width > 0.0) {
            return Err(Error::domain(format!(
                "gamma_width must be > 0, got {gamma_width}"
            )));
        }
        if gamma_width >= 2.0 * omega_c {
            return Err(Error::domain(format!(
                "gamma_width {gamma_width} must be below 2*omega_c for a single spectral peak"
            )));
        }
        Ok(BathSpectrum {
            alpha,
            omega_c,
            gamma_width,
        })
    }

    /// Spectrum in the natural units `Ω = 1`.
    pub fn with_unit_center(alpha: f64, gamma_width: f64) -> Result<Self> {
        Self::new(alpha, 1.0, gamma_width)
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn omega_c(&self) -> f64 {
        self.omega_c
    }

    pub fn gamma_width(&self) -> f64 {
        self.gamma_width
    }

    /// `G(ω)/ω`, finite at `ω = 0` where it equals `α/2`.
    pub(crate) fn density_over_omega(&self, omega: f64) -> f64 {
        let w2 = omega * omega;
        let c2 = self.omega_c * self.omega_c;
        let d = w2 - c2;
        0.5 * self.alpha * c2 * c2 / (d * d + self.gamma_width * self.gamma_width * w2)
    }
}

impl SpectralDensity for BathSpectrum {
    fn density(&self, omega: f64) -> f64 {
        if omega <= 0.0 {
            return 0.0;
        }
        omega * self.density_over_omega(omega)
    }
}

/// `G(ω)`; negative frequencies are a domain error.
pub fn g_of_omega(omega: f64, s: &BathSpectrum) -> Result<f64> {
    if !(omega >= 0.0) {
        return Err(Error::domain(format!(
            "G(omega) needs omega >= 0, got {omega}"
        )));
    }
    Ok(s.density(omega))
}

/// Anti-rotating modulation `f(ω) = (2ω_a)² / (ω + ω_a)²`.
pub fn modulation_factor(omega: f64, omega_a: f64) -> Result<f64> {
    if !(omega_a.is_finite() && omega_a > 0.0) {
        return Err(Error::domain(format!("omega_a must be > 0, got {omega_a}")));
    }
    if !(omega >= 0.0) {
        return Err(Error::domain(format!(
            "modulation needs omega >= 0, got {omega}"
        )));
    }
    Ok(modulation_unchecked(omega, omega_a))
}

#[inline]
fn modulation_unchecked(omega: f64, omega_a: f64) -> f64 {
    let r = 2.0 * omega_a / (omega + omega_a);
    r * r
}

/// `G′(ω) = G(ω)·f(ω)`: the bath spectrum as seen by the renormalized
/// transition at `ω_a = ηω₀`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ModulatedSpectrum {
    base: BathSpectrum,
    omega_a: f64,
}

impl ModulatedSpectrum {
    pub fn new(base: BathSpectrum, omega_a: f64) -> Result<Self> {
        if !(omega_a.is_finite() && omega_a > 0.0) {
            return Err(Error::domain(format!("omega_a must be > 0, got {omega_a}")));
        }
        Ok(ModulatedSpectrum { base, omega_a })
    }

    pub fn base(&self) -> &BathSpectrum {
        &self.base
    }

    pub fn omega_a(&self) -> f64 {
        self.omega_a
    }

    pub fn factor(&self, omega: f64) -> f64 {
        if omega == self.omega_a {
            return 1.0;
        }
        modulation_unchecked(omega, self.omega_a)
    }
}

impl SpectralDensity for ModulatedSpectrum {
    fn density(&self, omega: f64) -> f64 {
        if omega <= 0.0 {
            return 0.0;
        }
        self.base.density(omega) * self.factor(omega)
    }
}

pub fn g_prime(omega: f64, m: &ModulatedSpectrum) -> Result<f64> {
    if !(omega >= 0.0) {
        return Err(Error::domain(format!(
            "G'(omega) needs omega >= 0, got {omega}"
        )));
    }
    Ok(m.density(omega))
}

/// Dephasing window `F(Δ; τ) = 2 sin²(Δτ/2) / (π τ Δ²)`.
///
/// Peaks at `τ/2π` for `Δ = 0` and integrates to 1 over the real line.
pub fn dephasing(delta: f64, tau: f64) -> Result<f64> {
    if !(tau.is_finite() && tau > 0.0) {
        return Err(Error::domain(format!("dephasing needs tau > 0, got {tau}")));
    }
    if !delta.is_finite() {
        return Err(Error::domain("dephasing offset must be finite"));
    }
    Ok(sinc2_window(delta, tau))
}

/// Total weight `∫₀^∞ S(ω) dω` of a spectrum.
pub fn spectral_moment<S: SpectralDensity + ?Sized>(s: &S, quad: &QuadratureSpec) -> Result<f64> {
    integrate_semi_infinite(|w| s.density(w), quad)
}
