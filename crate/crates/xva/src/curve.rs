//! Discount curve with log-linear discount-factor interpolation.
//!
//! The curve stores continuously-compounded zero rates at pillar times and
//! interpolates `zero * time` linearly between pillars, which makes the log
//! discount factor piecewise linear (piecewise-constant instantaneous
//! forwards). Beyond the last pillar the zero rate is extrapolated flat;
//! before the first pillar the first zero rate applies. Times are year
//! fractions (ACT/365-fixed).

use crate::error::{Result, XvaError};
use serde::{Deserialize, Serialize};

/// Continuously-compounded zero curve, pillar-based.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct DiscountCurve {
    /// `(time, zero_rate)` pillars, times strictly increasing and positive.
    pillars: Vec<(f64, f64)>,
}

impl DiscountCurve {
    /// Build a curve from `(time, zero_rate)` pillars.
    ///
    /// Requires at least one pillar, strictly increasing positive times and
    /// finite rates.
    pub fn new(pillars: Vec<(f64, f64)>) -> Result<Self> {
        if pillars.is_empty() {
            return Err(XvaError::input("curve: at least one pillar is required"));
        }
        let mut prev = 0.0;
        for &(t, r) in &pillars {
            if !t.is_finite() || !r.is_finite() {
                return Err(XvaError::input(format!(
                    "curve: non-finite pillar ({t}, {r})"
                )));
            }
            if t <= prev {
                return Err(XvaError::input(format!(
                    "curve: pillar times must be strictly increasing and positive (got {t} after {prev})"
                )));
            }
            prev = t;
        }
        Ok(DiscountCurve { pillars })
    }

    /// Flat curve at a single continuously-compounded rate.
    pub fn flat(rate: f64) -> Self {
        // A single distant pillar plus flat extrapolation on both sides
        // makes the rate global.
        DiscountCurve {
            pillars: vec![(1.0, rate)],
        }
    }

    /// The `(time, zero_rate)` pillars.
    pub fn pillars(&self) -> &[(f64, f64)] {
        &self.pillars
    }

    /// `zero_rate(t) * t`, the negative log discount factor.
    fn rt(&self, t: f64) -> f64 {
        if t <= 0.0 {
            return 0.0;
        }
        let p = &self.pillars;
        let (t0, r0) = p[0];
        if t <= t0 {
            return r0 * t;
        }
        let (tn, rn) = p[p.len() - 1];
        if t >= tn {
            return rn * t;
        }
        // Linear interpolation of r*t between the bracketing pillars.
        let i = p.partition_point(|&(pt, _)| pt < t);
        let (ta, ra) = p[i - 1];
        let (tb, rb) = p[i];
        let w = (t - ta) / (tb - ta);
        ra * ta * (1.0 - w) + rb * tb * w
    }

    /// Discount factor `exp(-zero(t) * t)`; equals 1 at `t <= 0`.
    pub fn discount_factor(&self, t: f64) -> f64 {
        (-self.rt(t)).exp()
    }

    /// Continuously-compounded zero rate at `t` (> 0).
    pub fn zero_rate(&self, t: f64) -> f64 {
        if t <= 0.0 {
            return self.instantaneous_forward(0.0);
        }
        self.rt(t) / t
    }

    /// Continuously-compounded forward rate over `[t1, t2]`, `t2 > t1`.
    pub fn forward_rate(&self, t1: f64, t2: f64) -> f64 {
        debug_assert!(t2 > t1);
        (self.rt(t2) - self.rt(t1)) / (t2 - t1)
    }

    /// Instantaneous forward rate `f(0, t) = d(zero*t)/dt`, right-continuous
    /// at pillars (piecewise constant between them).
    pub fn instantaneous_forward(&self, t: f64) -> f64 {
        let p = &self.pillars;
        let (t0, r0) = p[0];
        if t < t0 {
            return r0;
        }
        let (tn, rn) = p[p.len() - 1];
        if t >= tn {
            return rn;
        }
        let i = p.partition_point(|&(pt, _)| pt <= t);
        let (ta, ra) = p[i - 1];
        let (tb, rb) = p[i];
        (rb * tb - ra * ta) / (tb - ta)
    }

    /// New curve with every pillar zero rate shifted by `delta` (parallel
    /// bump; flat extrapolation regions shift with their pillars).
    pub fn bumped(&self, delta: f64) -> Self {
        DiscountCurve {
            pillars: self.pillars.iter().map(|&(t, r)| (t, r + delta)).collect(),
        }
    }
}
