//! Vanilla fixed-for-floating interest-rate swaps on a single curve.
//!
//! Both legs share one payment schedule (generated backwards from maturity,
//! short stub at the front if needed). The floating leg is valued by the
//! floating-rate-note identity: once the current period's rate is fixed at the
//! period start `s_k`, the leg is worth `P(t, e_k) / P(s_k, e_k) - P(t, T)`,
//! so a path only needs to remember one number per period — the zero-coupon
//! bond price observed at the fixing time. Cashflows falling exactly on the
//! valuation time are treated as already paid.

use crate::curve::DiscountCurve;
use crate::error::{Result, XvaError};
use crate::hullwhite::{BondCoeff, HullWhite};
use serde::{Deserialize, Serialize};

/// Matching tolerance for schedule times vs grid times (both are exact
/// arithmetic on year fractions, so this only absorbs float noise).
const TIME_EPS: f64 = 1e-9;

/// Which side of the swap we hold.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum SwapDirection {
    /// Pay fixed, receive floating.
    #[serde(alias = "Pay", alias = "pay", alias = "payer")]
    Payer,
    /// Receive fixed, pay floating.
    #[serde(alias = "Rec", alias = "rec", alias = "receiver")]
    Receiver,
}

impl SwapDirection {
    /// +1 for payer (long rates), -1 for receiver.
    pub fn sign(self) -> f64 {
        match self {
            SwapDirection::Payer => 1.0,
            SwapDirection::Receiver => -1.0,
        }
    }

    /// Short column label used in report output.
    pub fn label(self) -> &'static str {
        match self {
            SwapDirection::Payer => "Pay",
            SwapDirection::Receiver => "Rec",
        }
    }
}

/// One accrual period: rate fixes at `start`, pays at `end`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Period {
    pub start: f64,
    pub end: f64,
    pub accrual: f64,
}

/// A fixed-for-floating swap. Times are year fractions from the valuation
/// date; both legs pay `payments_per_year` times a year.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(rename_all = "camelCase", deny_unknown_fields)]
pub struct Swap {
    pub notional: f64,
    pub fixed_rate: f64,
    #[serde(default)]
    pub start: f64,
    pub maturity: f64,
    #[serde(default = "default_payments_per_year")]
    pub payments_per_year: u32,
    pub direction: SwapDirection,
}

fn default_payments_per_year() -> u32 {
    2
}

impl Swap {
    pub fn validate(&self) -> Result<()> {
        if !(self.notional > 0.0) || !self.notional.is_finite() {
            return Err(XvaError::input(format!(
                "swap: notional must be positive (got {})",
                self.notional
            )));
        }
        if !self.fixed_rate.is_finite() {
            return Err(XvaError::input("swap: fixed rate must be finite"));
        }
        if !(self.start >= 0.0) || !self.start.is_finite() {
            return Err(XvaError::input(format!(
                "swap: start must be non-negative (got {})",
                self.start
            )));
        }
        if !(self.maturity > self.start + TIME_EPS) || !self.maturity.is_finite() {
            return Err(XvaError::input(format!(
                "swap: maturity ({}) must exceed start ({})",
                self.maturity, self.start
            )));
        }
        if ![1, 2, 4, 12].contains(&self.payments_per_year) {
            return Err(XvaError::input(format!(
                "swap: payments per year must be one of 1, 2, 4, 12 (got {})",
                self.payments_per_year
            )));
        }
        Ok(())
    }

    /// Payment schedule, generated backwards from maturity in steps of
    /// `1/payments_per_year`; any leftover becomes a short first period.
    pub fn schedule(&self) -> Result<Vec<Period>> {
        self.validate()?;
        let step = 1.0 / self.payments_per_year as f64;
        let mut ends = Vec::new();
        let mut e = self.maturity;
        while e > self.start + TIME_EPS {
            ends.push(e);
            e -= step;
        }
        ends.reverse();
        let mut periods = Vec::with_capacity(ends.len());
        let mut s = self.start;
        for e in ends {
            periods.push(Period {
                start: s,
                end: e,
                accrual: e - s,
            });
            s = e;
        }
        Ok(periods)
    }

    /// Deterministic valuation on a curve at time `t`, taking the current
    /// floating fixing from the same curve. This is exactly what the pathwise
    /// pricer degenerates to when rate volatility is zero.
    pub fn value_on_curve(&self, curve: &DiscountCurve, t: f64) -> Result<f64> {
        let periods = self.schedule()?;
        if t >= self.maturity - TIME_EPS {
            return Ok(0.0);
        }
        let df_t = curve.discount_factor(t);
        let df = |u: f64| curve.discount_factor(u) / df_t;
        let fixed: f64 = periods
            .iter()
            .filter(|p| p.end > t + TIME_EPS)
            .map(|p| p.accrual * df(p.end))
            .sum::<f64>()
            * self.fixed_rate;
        let float = if t < self.start - TIME_EPS {
            df(self.start) - df(self.maturity)
        } else {
            let k = periods
                .iter()
                .position(|p| p.end > t + TIME_EPS)
                .expect("t < maturity implies a current period");
            let p = &periods[k];
            let inv_fix = curve.discount_factor(p.start) / curve.discount_factor(p.end);
            inv_fix * df(p.end) - df(self.maturity)
        };
        Ok(self.direction.sign() * self.notional * (float - fixed))
    }
}

/// Fair fixed rate at time 0 for a swap running `start -> maturity` with
/// `payments_per_year` payments: floating-leg value over the fixed annuity.
pub fn par_rate(
    curve: &DiscountCurve,
    start: f64,
    maturity: f64,
    payments_per_year: u32,
) -> Result<f64> {
    let probe = Swap {
        notional: 1.0,
        fixed_rate: 0.0,
        start,
        maturity,
        payments_per_year,
        direction: SwapDirection::Payer,
    };
    let annuity: f64 = probe
        .schedule()?
        .iter()
        .map(|p| p.accrual * curve.discount_factor(p.end))
        .sum();
    if annuity <= 0.0 {
        return Err(XvaError::numerical("swap::par_rate: non-positive annuity"));
    }
    Ok((curve.discount_factor(start) - curve.discount_factor(maturity)) / annuity)
}

/// What the floating leg looks like at one grid time.
#[derive(Debug)]
enum FloatSlot {
    /// Past maturity: nothing left.
    Expired,
    /// Before the swap starts: no fixing yet, pure forward.
    Forward { start: BondCoeff, mat: BondCoeff },
    /// Inside accrual period `period`: current coupon uses that period's
    /// recorded fixing.
    InPeriod {
        period: usize,
        end: BondCoeff,
        mat: BondCoeff,
    },
}

#[derive(Debug)]
struct TimeSlot {
    /// Remaining fixed coupons: (accrual, bond coefficients to payment date).
    fixed: Vec<(f64, BondCoeff)>,
    float: FloatSlot,
}

/// Precomputed pathwise valuer for one swap on one simulation grid: all
/// affine bond coefficients are computed once and reused on every path.
#[derive(Debug)]
pub struct SwapPricer {
    signed_notional: f64,
    fixed_rate: f64,
    slots: Vec<TimeSlot>,
    /// Per period: grid index of its fixing time (sorted ascending).
    fixing_grid_idx: Vec<usize>,
    /// Per period: bond coefficients for `P(s_k, e_k)` at the fixing time.
    fixing_coeff: Vec<BondCoeff>,
}

impl SwapPricer {
    pub fn new(swap: &Swap, hw: &HullWhite, curve: &DiscountCurve, times: &[f64]) -> Result<Self> {
        let periods = swap.schedule()?;

        let mut fixing_grid_idx = Vec::with_capacity(periods.len());
        let mut fixing_coeff = Vec::with_capacity(periods.len());
        for p in &periods {
            let idx = times
                .iter()
                .position(|&t| (t - p.start).abs() < TIME_EPS)
                .ok_or_else(|| {
                    XvaError::input(format!(
                        "swap: floating fixing time {} is not on the simulation grid",
                        p.start
                    ))
                })?;
            fixing_grid_idx.push(idx);
            fixing_coeff.push(hw.bond_coeff(curve, p.start, p.end));
        }

        let mut slots = Vec::with_capacity(times.len());
        for &t in times {
            if t >= swap.maturity - TIME_EPS {
                slots.push(TimeSlot {
                    fixed: Vec::new(),
                    float: FloatSlot::Expired,
                });
                continue;
            }
            let fixed: Vec<(f64, BondCoeff)> = periods
                .iter()
                .filter(|p| p.end > t + TIME_EPS)
                .map(|p| (p.accrual, hw.bond_coeff(curve, t, p.end)))
                .collect();
            let mat = hw.bond_coeff(curve, t, swap.maturity);
            let float = if t < swap.start - TIME_EPS {
                FloatSlot::Forward {
                    start: hw.bond_coeff(curve, t, swap.start),
                    mat,
                }
            } else {
                let k = periods
                    .iter()
                    .position(|p| p.end > t + TIME_EPS)
                    .expect("t < maturity implies a current period");
                FloatSlot::InPeriod {
                    period: k,
                    end: hw.bond_coeff(curve, t, periods[k].end),
                    mat,
                }
            };
            slots.push(TimeSlot { fixed, float });
        }

        Ok(SwapPricer {
            signed_notional: swap.direction.sign() * swap.notional,
            fixed_rate: swap.fixed_rate,
            slots,
            fixing_grid_idx,
            fixing_coeff,
        })
    }

    /// Add this swap's value along one path into `out` (one entry per grid
    /// time). `short_rates` is the path's short-rate row on the same grid.
    pub fn accumulate_path_values(&self, short_rates: &[f64], out: &mut [f64]) {
        debug_assert_eq!(short_rates.len(), self.slots.len());
        debug_assert_eq!(out.len(), self.slots.len());
        let n_periods = self.fixing_coeff.len();
        let mut inv_fix = vec![1.0f64; n_periods];
        let mut next_fixing = 0usize;
        for (i, slot) in self.slots.iter().enumerate() {
            while next_fixing < n_periods && self.fixing_grid_idx[next_fixing] == i {
                inv_fix[next_fixing] = 1.0 / self.fixing_coeff[next_fixing].price(short_rates[i]);
                next_fixing += 1;
            }
            let r = short_rates[i];
            let float = match &slot.float {
                FloatSlot::Expired => {
                    continue; // value is exactly zero
                }
                FloatSlot::Forward { start, mat } => start.price(r) - mat.price(r),
                FloatSlot::InPeriod { period, end, mat } => {
                    inv_fix[*period] * end.price(r) - mat.price(r)
                }
            };
            let fixed: f64 = slot
                .fixed
                .iter()
                .map(|(accrual, coeff)| accrual * coeff.price(r))
                .sum::<f64>()
                * self.fixed_rate;
            out[i] += self.signed_notional * (float - fixed);
        }
    }
}
