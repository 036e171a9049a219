//! Scalar fixed-point iteration.

use thiserror::Error;

pub const DEFAULT_TOL: f64 = 1e-9;
pub const DEFAULT_MAX_ITER: usize = 100_000;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum FixedPointError {
    #[error(
        "fixed-point iteration did not converge within {max_iter} steps (last iterate {last})"
    )]
    NonConvergence { max_iter: usize, last: f64 },
    #[error("fixed-point iteration produced a non-finite value after {steps} steps")]
    Diverged { steps: usize },
}

/// Iterates `x <- f(x)` from `x0` and returns the first iterate `x` with
/// `|f(x) - x| <= tol`.
///
/// Panics if `tol <= 0` or `max_iter == 0`.
pub fn fixed_point<F>(mut f: F, x0: f64, tol: f64, max_iter: usize) -> Result<f64, FixedPointError>
where
    F: FnMut(f64) -> f64,
{
    assert!(tol > 0.0, "tolerance must be positive");
    assert!(max_iter >= 1, "max_iter must be at least 1");
    let mut x = x0;
    for step in 0..max_iter {
        let next = f(x);
        if !next.is_finite() {
            return Err(FixedPointError::Diverged { steps: step + 1 });
        }
        if (next - x).abs() <= tol {
            return Ok(x);
        }
        x = next;
    }
    Err(FixedPointError::NonConvergence { max_iter, last: x })
}
