//! Scalar fixed points `x = map(x)` on `(0, 1]`.

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FixedPointSpec {
    /// Residual bound `|x − map(x)|` accepted at return.
    pub tol: f64,
    pub max_iters: usize,
    /// Mixing weight `d` in `x ← (1−d)·x + d·map(x)`.
    pub damping: f64,
}

impl Default for FixedPointSpec {
    fn default() -> Self {
        FixedPointSpec {
            tol: 1e-12,
            max_iters: 200,
            damping: 1.0,
        }
    }
}

impl FixedPointSpec {
    pub fn validate(&self) -> Result<()> {
        if !(self.tol.is_finite() && self.tol > 0.0) {
            return Err(Error::domain("fixed-point tol must be positive"));
        }
        if self.max_iters == 0 {
            return Err(Error::domain("fixed-point max_iters must be >= 1"));
        }
        if !(self.damping > 0.0 && self.damping <= 1.0) {
            return Err(Error::domain("fixed-point damping must lie in (0, 1]"));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FixedPointMethod {
    DampedIteration,
    Bisection,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FixedPoint {
    pub value: f64,
    /// `|value − map(value)|` at return.
    pub residual: f64,
    pub iterations: usize,
    pub method: FixedPointMethod,
}

/// Lower end of the bisection bracket on `(0, 1]`.
pub const BRACKET_FLOOR: f64 = 1e-12;

/// Number of consecutive non-decreasing residuals treated as oscillation.
const STALL_LIMIT: usize = 3;

/// Damped iteration from `x0`, falling back to bisection of `x − map(x)`
/// over `[BRACKET_FLOOR, 1]` when the residual stops shrinking or the
/// iteration budget runs out.
pub fn solve_fixed_point<M>(map: M, x0: f64, spec: &FixedPointSpec) -> Result<FixedPoint>
where
    M: Fn(f64) -> Result<f64>,
{
    spec.validate()?;
    if !x0.is_finite() {
        return Err(Error::domain("fixed-point start must be finite"));
    }

    let mut x = x0;
    let mut last_residual = f64::INFINITY;
    let mut stalls = 0;
    for iter in 0..spec.max_iters {
        let mx = map(x)?;
        let residual = (mx - x).abs();
        if residual <= spec.tol {
            return Ok(FixedPoint {
                value: x,
                residual,
                iterations: iter,
                method: FixedPointMethod::DampedIteration,
            });
        }
        if !residual.is_finite() {
            break;
        }
        if residual >= last_residual {
            stalls += 1;
            if stalls >= STALL_LIMIT {
                log::debug!("fixed-point iteration stalled at x = {x}; bisecting");
                break;
            }
        } else {
            stalls = 0;
        }
        last_residual = residual;
        x = (1.0 - spec.damping) * x + spec.damping * mx;
    }

    bisect_fixed_point(&map, BRACKET_FLOOR, 1.0, spec)
}

/// Bisection on `g(x) = x − map(x)` over `[lo, hi]`; requires a sign change.
pub fn bisect_fixed_point<M>(map: M, lo: f64, hi: f64, spec: &FixedPointSpec) -> Result<FixedPoint>
where
    M: Fn(f64) -> Result<f64>,
{
    spec.validate()?;
    if !(lo < hi) {
        return Err(Error::domain("bisection bracket must satisfy lo < hi"));
    }
    let g = |x: f64| map(x).map(|m| x - m);
    let (mut a, mut b) = (lo, hi);
    let (mut ga, gb) = (g(a)?, g(b)?);
    for (x, gx) in [(a, ga), (b, gb)] {
        if gx.abs() <= spec.tol {
            return Ok(FixedPoint {
                value: x,
                residual: gx.abs(),
                iterations: 0,
                method: FixedPointMethod::Bisection,
            });
        }
    }
    if ga.signum() == gb.signum() {
        return Err(Error::non_convergent(
            "fixed-point solve",
            format!("no sign change of x - map(x) on [{lo}, {hi}]"),
        ));
    }

    // Enough halvings to shrink any bracket in (0, 1] to machine resolution.
    let budget = spec.max_iters.max(200);
    for iter in 1..=budget {
        let mid = 0.5 * (a + b);
        let gm = g(mid)?;
        if gm.abs() <= spec.tol {
            return Ok(FixedPoint {
                value: mid,
                residual: gm.abs(),
                iterations: iter,
                method: FixedPointMethod::Bisection,
            });
        }
        if !(a < mid && mid < b) {
            break;
        }
        if gm.signum() == ga.signum() {
            a = mid;
            ga = gm;
        } else {
            b = mid;
        }
    }
    Err(Error::non_convergent(
        "fixed-point solve",
        format!(
            "bracket [{a}, {b}] collapsed without meeting tol {}",
            spec.tol
        ),
    ))
}
