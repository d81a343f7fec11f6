//! Bracketed scalar root finding.

use crate::error::{Error, Result};

/// Shared iteration budget across nested root searches.
#[derive(Debug)]
pub(crate) struct Budget {
    remaining: usize,
}

impl Budget {
    pub(crate) fn new(max_iterations: usize) -> Self {
        Budget {
            remaining: max_iterations,
        }
    }

    fn spend(&mut self) -> Result<()> {
        if self.remaining == 0 {
            return Err(Error::SolverFailure(
                "iteration budget exhausted before convergence".into(),
            ));
        }
        self.remaining -= 1;
        Ok(())
    }
}

/// Finds `x` in `[lo, hi]` with `f(x) ≈ 0`, given `f(lo) < 0 < f(hi)`.
///
/// The bracket always keeps a sign change. Steps use false position with
/// the Illinois weighting and fall back to plain bisection whenever the
/// bracket fails to halve over two steps. Stops when `|f| <= tol` or the
/// bracket can no longer be split in floating point.
pub(crate) fn find_root<F>(
    mut f: F,
    mut lo: f64,
    mut hi: f64,
    mut f_lo: f64,
    mut f_hi: f64,
    tol: f64,
    budget: &mut Budget,
) -> Result<f64>
where
    F: FnMut(f64) -> f64,
{
    debug_assert!(f_lo < 0.0 && f_hi > 0.0);
    let mut side = 0i8;
    let mut width_before = hi - lo;
    let mut bisect_next = false;
    let mut step = 0usize;
    loop {
        budget.spend()?;
        let mut x = if bisect_next {
            0.5 * (lo + hi)
        } else {
            (lo * f_hi - hi * f_lo) / (f_hi - f_lo)
        };
        if !(x > lo && x < hi) {
            x = 0.5 * (lo + hi);
        }
        if !(x > lo && x < hi) {
            // bracket exhausted
            return Ok(if -f_lo <= f_hi { lo } else { hi });
        }
        let fx = f(x);
        if !fx.is_finite() {
            return Err(Error::SolverFailure(format!("non-finite residual at {x}")));
        }
        if fx.abs() <= tol {
            return Ok(x);
        }
        if fx < 0.0 {
            lo = x;
            f_lo = fx;
            if side == -1 {
                f_hi *= 0.5;
            }
            side = -1;
        } else {
            hi = x;
            f_hi = fx;
            if side == 1 {
                f_lo *= 0.5;
            }
            side = 1;
        }
        step += 1;
        if step.is_multiple_of(2) {
            let width = hi - lo;
            bisect_next = width > 0.5 * width_before;
            width_before = width;
        } else {
            bisect_next = false;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn finds_linear_root_quickly() {
        let mut budget = Budget::new(100);
        let x = find_root(|x| 3.0 * x - 1.0, 0.0, 1.0, -1.0, 2.0, 1e-15, &mut budget).unwrap();
        assert!((x - 1.0 / 3.0).abs() < 1e-15);
        assert!(budget.remaining > 90);
    }

    #[test]
    fn handles_kinked_monotone_functions() {
        let f = |x: f64| if x < 0.7 { x - 0.9 } else { 50.0 * (x - 0.7) - 0.2 };
        let mut budget = Budget::new(10_000);
        let x = find_root(f, 0.0, 1.0, f(0.0), f(1.0), 1e-14, &mut budget).unwrap();
        assert!((x - 0.704).abs() < 1e-13, "{x}");
    }

    #[test]
    fn step_function_collapses_bracket() {
        let f = |x: f64| if x < 0.25 { -1.0 } else { 1.0 };
        let mut budget = Budget::new(10_000);
        let x = find_root(f, 0.0, 1.0, -1.0, 1.0, 0.0, &mut budget).unwrap();
        assert!((x - 0.25).abs() < 1e-15);
    }

    #[test]
    fn exhausted_budget_is_a_failure() {
        let mut budget = Budget::new(3);
        let f = |x: f64| x.powi(9) - 1e-30;
        let err = find_root(f, 0.0, 1.0, f(0.0), f(1.0), 0.0, &mut budget).unwrap_err();
        assert!(matches!(err, Error::SolverFailure(_)));
    }
}
