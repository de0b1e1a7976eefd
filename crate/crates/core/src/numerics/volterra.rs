//! Product-integration stepping for the memory-kernel equation
//!
//! ```text
//! ẋ(t) = −iω·x(t) − ∫₀ᵗ K(t−s) x(s) ds,    x(0) = 1
//! ```
//!
//! The free phase is removed first: with `x = e^{−iωt}·y` the equation becomes
//! `ẏ = −∫₀ᵗ K̃(t−s) y(s) ds` with `K̃(u) = K(u)·e^{iωu}`. That equation is
//! stepped with the implicit trapezoidal rule in time and trapezoidal weights
//! in the convolution, which is second order in the step and leaves free
//! evolution exact.

use num_complex::Complex64;

use crate::error::{Error, Result};

/// Largest `|ω|·h` accepted by the stepper.
pub const MAX_PHASE_PER_STEP: f64 = 0.5;

/// Solve on the grid `t_n = n·grid_step`, `n = 0..=n_steps`, sampling `kernel`
/// at the same points.
pub fn volterra_step<K>(
    kernel: K,
    frequency: f64,
    grid_step: f64,
    n_steps: usize,
) -> Result<Vec<Complex64>>
where
    K: Fn(f64) -> Complex64,
{
    check_step(frequency, grid_step)?;
    let samples: Vec<Complex64> = (0..=n_steps)
        .map(|n| kernel(n as f64 * grid_step))
        .collect();
    volterra_solve_sampled(&samples, frequency, grid_step)
}

/// As [`volterra_step`] with the kernel already sampled at `n·grid_step`;
/// returns one amplitude per kernel sample.
pub fn volterra_solve_sampled(
    kernel: &[Complex64],
    frequency: f64,
    grid_step: f64,
) -> Result<Vec<Complex64>> {
    check_step(frequency, grid_step)?;
    if kernel.is_empty() {
        return Err(Error::domain("kernel needs at least the t = 0 sample"));
    }
    if kernel
        .iter()
        .any(|k| !(k.re.is_finite() && k.im.is_finite()))
    {
        return Err(Error::domain("kernel samples must be finite"));
    }

    let h = grid_step;
    let rotated: Vec<Complex64> = kernel
        .iter()
        .enumerate()
        .map(|(n, k)| k * Complex64::cis(frequency * n as f64 * h))
        .collect();

    let y = trapezoid_march(&rotated, h);
    Ok(y.iter()
        .enumerate()
        .map(|(n, v)| v * Complex64::cis(-frequency * n as f64 * h))
        .collect())
}

fn check_step(frequency: f64, grid_step: f64) -> Result<()> {
    if !(grid_step.is_finite() && grid_step > 0.0) {
        return Err(Error::domain(format!(
            "grid step must be positive, got {grid_step}"
        )));
    }
    if !frequency.is_finite() {
        return Err(Error::domain("frequency must be finite"));
    }
    let product = frequency.abs() * grid_step;
    if product > MAX_PHASE_PER_STEP {
        return Err(Error::StepTooCoarse {
            product,
            limit: MAX_PHASE_PER_STEP,
        });
    }
    Ok(())
}

// y_{n+1} = y_n − h/2·(I_n + I_{n+1}), I_n = trapezoid of ∫₀^{t_n} K(t_n−s) y(s) ds.
fn trapezoid_march(k: &[Complex64], h: f64) -> Vec<Complex64> {
    let n_points = k.len();
    let mut y = Vec::with_capacity(n_points);
    y.push(Complex64::new(1.0, 0.0));
    let denom = 1.0 + 0.25 * h * h * k[0];
    let mut integral = Complex64::new(0.0, 0.0);

    for n in 0..n_points - 1 {
        let m = n + 1;
        // Part of I_{m} that does not involve y_m.
        let mut known = 0.5 * k[m] * y[0];
        for j in 1..m {
            known += k[m - j] * y[j];
        }
        known *= h;

        let next = (y[n] - 0.5 * h * (integral + known)) / denom;
        integral = known + 0.5 * h * k[0] * next;
        y.push(next);
    }
    y
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn free_evolution_is_exact() {
        let omega = 3.0;
        let h = 0.1;
        let x = volterra_step(|_| Complex64::new(0.0, 0.0), omega, h, 1000).unwrap();
        for (n, v) in x.iter().enumerate() {
            let exact = Complex64::cis(-omega * n as f64 * h);
            assert!((v - exact).norm() < 1e-12);
            assert!((v.norm() - 1.0).abs() < 1e-14);
        }
    }

    fn oscillator_error(c: f64, h: f64, t_end: f64) -> f64 {
        let n = (t_end / h).round() as usize;
        let x = volterra_step(|_| Complex64::new(c, 0.0), 0.0, h, n).unwrap();
        x.iter()
            .enumerate()
            .map(|(i, v)| (v - Complex64::new((c.sqrt() * i as f64 * h).cos(), 0.0)).norm())
            .fold(0.0, f64::max)
    }

    #[test]
    fn constant_kernel_matches_cosine() {
        // ẋ = −c∫x  ⇔  ẍ = −c x, x(0) = 1, ẋ(0) = 0.
        let err = oscillator_error(2.0, 0.01, 10.0);
        assert!(err < 1e-3, "{err}");
    }

    #[test]
    fn second_order_convergence() {
        let e1 = oscillator_error(2.0, 0.04, 10.0);
        let e2 = oscillator_error(2.0, 0.02, 10.0);
        let e3 = oscillator_error(2.0, 0.01, 10.0);
        for ratio in [e1 / e2, e2 / e3] {
            assert!((ratio - 4.0).abs() < 0.4, "ratio {ratio}");
        }
    }

    #[test]
    fn coarse_step_is_rejected() {
        let err = volterra_step(|_| Complex64::new(0.0, 0.0), 10.0, 0.1, 10);
        assert!(matches!(err, Err(Error::StepTooCoarse { .. })));
    }

    #[test]
    fn output_length_matches_samples() {
        let x = volterra_solve_sampled(&[Complex64::new(0.1, 0.0); 7], 0.2, 0.1).unwrap();
        assert_eq!(x.len(), 7);
        assert_eq!(x[0], Complex64::new(1.0, 0.0));
    }
}
