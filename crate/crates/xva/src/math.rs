//! Small numerical utilities: quadrature, root bracketing, normal functions.

use crate::error::{Result, XvaError};
use statrs::distribution::{ContinuousCDF, Normal};

/// Composite trapezoid rule over an arbitrary (strictly increasing) grid.
///
/// `times` and `values` must have equal length >= 2. Returns
/// `sum 0.5 * (v[i] + v[i+1]) * (t[i+1] - t[i])`.
pub fn trapezoid(times: &[f64], values: &[f64]) -> f64 {
    debug_assert_eq!(times.len(), values.len());
    let mut acc = 0.0;
    for i in 1..times.len() {
        acc += 0.5 * (values[i] + values[i - 1]) * (times[i] - times[i - 1]);
    }
    acc
}

/// Standard normal cumulative distribution function.
pub fn norm_cdf(x: f64) -> f64 {
    // Unit normal is a fixed, valid parameterization; unwrap cannot fail.
    let n = Normal::new(0.0, 1.0).unwrap();
    n.cdf(x)
}

/// Standard normal quantile (inverse CDF). `p` must lie in (0, 1).
pub fn norm_inv_cdf(p: f64) -> f64 {
    let n = Normal::new(0.0, 1.0).unwrap();
    n.inverse_cdf(p)
}

/// Bisection root search on `f` over `[lo, hi]`.
///
/// Requires a sign change on the bracket. Iterates until the bracket width
/// falls below `xtol` (or 200 iterations). Returns the bracket midpoint.
/// The caller's closure may be expensive; 200 iterations is far beyond the
/// ~60 needed to exhaust f64 resolution on any practical bracket.
pub fn bisect<F: FnMut(f64) -> f64>(
    mut f: F,
    mut lo: f64,
    mut hi: f64,
    xtol: f64,
    context: &str,
) -> Result<f64> {
    let flo = f(lo);
    let fhi = f(hi);
    if flo == 0.0 {
        return Ok(lo);
    }
    if fhi == 0.0 {
        return Ok(hi);
    }
    if flo.signum() == fhi.signum() {
        return Err(XvaError::numerical(format!(
            "{context}: no sign change on bracket [{lo}, {hi}] (f = {flo:.6e}, {fhi:.6e})"
        )));
    }
    let mut flo = flo;
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if hi - lo < xtol {
            return Ok(mid);
        }
        let fmid = f(mid);
        if fmid == 0.0 {
            return Ok(mid);
        }
        if fmid.signum() == flo.signum() {
            lo = mid;
            flo = fmid;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

/// Sample mean and standard error of the mean.
///
/// Returns `(mean, se)` with `se = sample_sd / sqrt(n)`; `se = 0` for n < 2.
pub fn mean_and_se(samples: &[f64]) -> (f64, f64) {
    let n = samples.len();
    if n == 0 {
        return (0.0, 0.0);
    }
    let mean = samples.iter().sum::<f64>() / n as f64;
    if n < 2 {
        return (mean, 0.0);
    }
    let var = samples.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n as f64 - 1.0);
    (mean, (var / n as f64).sqrt())
}
