//! Regulatory capital formulas: standardized market risk (maturity method),
//! IRB risk weights, counterparty-credit-risk capital, the standardized CVA
//! capital charge (full and per-counterparty approximation), the
//! internal-model regulatory CVA with its spread sensitivity, and the
//! composition of all three capital terms into a lifetime profile.

use crate::error::{Result, XvaError};
use crate::exposure::{next_quarterly_reset, DiscountStats, NettingSetExposure};
use crate::market::{CapitalConfig, CounterpartyProfile};
use crate::math::{norm_cdf, norm_inv_cdf};
use crate::swap::Swap;
use std::collections::HashMap;

const TIME_EPS: f64 = 1e-9;

// ---------------------------------------------------------------------------
// Standardized market risk: the maturity-method ladder
// ---------------------------------------------------------------------------

/// A signed bond-equivalent position for the maturity ladder: positive
/// notional = long. Swaps decompose into a fixed-coupon bond position at the
/// swap's residual maturity and an opposite floating position at the time to
/// the next rate reset.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BondPosition {
    pub maturity: f64,
    /// Annual coupon as a decimal; the 3% threshold selects the band column.
    pub coupon: f64,
    /// Signed notional: positive long, negative short.
    pub notional: f64,
}

/// Risk weight per ladder row. Rows 13 and 14 are reachable only through the
/// low-coupon column.
const ROW_WEIGHTS: [f64; 15] = [
    0.0000, 0.0020, 0.0040, 0.0070, 0.0125, 0.0175, 0.0225, 0.0275, 0.0325, 0.0375, 0.0450,
    0.0525, 0.0600, 0.0800, 0.1250,
];

/// Upper maturity bounds (exclusive) per row for coupons >= 3%.
const HIGH_COUPON_UPPER: [f64; 13] = [
    1.0 / 12.0,
    0.25,
    0.5,
    1.0,
    2.0,
    3.0,
    4.0,
    5.0,
    7.0,
    10.0,
    15.0,
    20.0,
    f64::INFINITY,
];

/// Upper maturity bounds (exclusive) per row for coupons < 3%.
const LOW_COUPON_UPPER: [f64; 15] = [
    1.0 / 12.0,
    0.25,
    0.5,
    1.0,
    1.9,
    2.8,
    3.6,
    4.3,
    5.7,
    7.3,
    9.3,
    10.6,
    12.0,
    20.0,
    f64::INFINITY,
];

/// Zone of a ladder row: zone 1 covers the sub-year rows, zone 2 the next
/// three, zone 3 the rest.
fn zone_of(row: usize) -> usize {
    match row {
        0..=3 => 0,
        4..=6 => 1,
        _ => 2,
    }
}

fn row_for(maturity: f64, coupon: f64) -> usize {
    let bounds: &[f64] = if coupon >= 0.03 {
        &HIGH_COUPON_UPPER
    } else {
        &LOW_COUPON_UPPER
    };
    bounds
        .iter()
        .position(|&hi| maturity < hi)
        .expect("last bound is infinite")
}

/// Standardized market-risk capital charge of a set of bond-equivalent
/// positions under the maturity method.
///
/// Positions identical in maturity and coupon are net against each other
/// first (matched amounts in the same issue carry no charge — this is what
/// makes an exactly mirrored portfolio free of market-risk capital). The
/// remainder is slotted into risk-weighted maturity bands; the charge is the
/// sum of a 10% vertical disallowance per band, horizontal disallowances of
/// 40%/30%/30% within zones 1/2/3, 40% between adjacent zones, 100% between
/// zones 1 and 3, and 100% of the residual net open position.
pub fn market_risk_std(positions: &[BondPosition]) -> f64 {
    // Step 0: exact netting of same-issue positions.
    let mut netted: HashMap<(u64, u64), (f64, f64)> = HashMap::new(); // -> (net, gross)
    for p in positions {
        let e = netted
            .entry((p.maturity.to_bits(), p.coupon.to_bits()))
            .or_insert((0.0, 0.0));
        e.0 += p.notional;
        e.1 += p.notional.abs();
    }

    // Step 1: weighted longs and shorts per row.
    let mut longs = [0.0f64; 15];
    let mut shorts = [0.0f64; 15];
    for ((m_bits, c_bits), (net, gross)) in netted {
        if net.abs() <= 1e-12 * gross {
            continue;
        }
        let row = row_for(f64::from_bits(m_bits), f64::from_bits(c_bits));
        let weighted = net * ROW_WEIGHTS[row];
        if weighted >= 0.0 {
            longs[row] += weighted;
        } else {
            shorts[row] += -weighted;
        }
    }

    // Step 2: 10% vertical disallowance on the matched part of each band.
    let mut charge = 0.0;
    let mut zone_long = [0.0f64; 3];
    let mut zone_short = [0.0f64; 3];
    for row in 0..15 {
        charge += 0.10 * longs[row].min(shorts[row]);
        let net = longs[row] - shorts[row];
        let z = zone_of(row);
        if net >= 0.0 {
            zone_long[z] += net;
        } else {
            zone_short[z] += -net;
        }
    }

    // Step 3: horizontal disallowance within each zone.
    const ZONE_DISALLOW: [f64; 3] = [0.40, 0.30, 0.30];
    let mut zone_net = [0.0f64; 3];
    for z in 0..3 {
        let matched = zone_long[z].min(zone_short[z]);
        charge += ZONE_DISALLOW[z] * matched;
        zone_net[z] = zone_long[z] - zone_short[z];
    }

    // Step 4: disallowances between zones — adjacent pairs at 40%, then the
    // outer pair at 100%.
    let mut cross = |a: usize, b: usize, factor: f64, zone_net: &mut [f64; 3]| {
        if zone_net[a] * zone_net[b] < 0.0 {
            let matched = zone_net[a].abs().min(zone_net[b].abs());
            charge += factor * matched;
            let sa = zone_net[a].signum();
            zone_net[a] -= sa * matched;
            zone_net[b] += sa * matched;
        }
    };
    cross(0, 1, 0.40, &mut zone_net);
    cross(1, 2, 0.40, &mut zone_net);
    cross(0, 2, 1.00, &mut zone_net);

    // Step 5: residual open position at 100%.
    charge + (zone_net[0] + zone_net[1] + zone_net[2]).abs()
}

/// The two ladder positions of a swap at time `t`: the fixed leg at residual
/// maturity with the swap coupon (long for a receiver, short for a payer)
/// and the floating leg at the time to the next quarterly reset with a zero
/// coupon, in the opposite direction.
pub fn swap_ladder_positions(swap: &Swap, t: f64) -> Vec<BondPosition> {
    if t >= swap.maturity - TIME_EPS {
        return Vec::new();
    }
    let sign = swap.direction.sign(); // +1 payer: short fixed, long floating
    vec![
        BondPosition {
            maturity: swap.maturity - t,
            coupon: swap.fixed_rate,
            notional: -sign * swap.notional,
        },
        BondPosition {
            maturity: next_quarterly_reset(t).min(swap.maturity - t),
            coupon: 0.0,
            notional: sign * swap.notional,
        },
    ]
}

/// Deterministic market-risk capital at each grid time for a swap portfolio:
/// `capital_ratio * 12.5 * ladder charge` on the rolled-down positions.
pub fn market_risk_profile(swaps: &[Swap], times: &[f64], cfg: &CapitalConfig) -> Vec<f64> {
    times
        .iter()
        .map(|&t| {
            let positions: Vec<BondPosition> = swaps
                .iter()
                .flat_map(|s| swap_ladder_positions(s, t))
                .collect();
            cfg.capital_ratio * 12.5 * market_risk_std(&positions)
        })
        .collect()
}

// ---------------------------------------------------------------------------
// IRB risk weight
// ---------------------------------------------------------------------------

/// Foundation-IRB unsecured senior loss-given-default.
pub const FIRB_LGD: f64 = 0.45;

/// Internal-ratings-based capital weight for one exposure: asset correlation
/// and maturity adjustment per the published wholesale formula, with the PD
/// floored at 3 basis points. `maturity` should already be the effective
/// maturity (clamped to [1, 5] by `effective_maturity_irb`).
pub fn irb_weight(pd: f64, lgd: f64, maturity: f64) -> Result<f64> {
    if !(0.0..=1.0).contains(&lgd) {
        return Err(XvaError::input(format!(
            "irb weight: lgd must lie in [0, 1] (got {lgd})"
        )));
    }
    if !(pd > 0.0 && pd < 1.0) {
        return Err(XvaError::input(format!(
            "irb weight: pd must lie in (0, 1) (got {pd})"
        )));
    }
    let pd = pd.max(0.0003);
    let denom = 1.0 - (-50.0f64).exp();
    let decay = 1.0 - (-50.0 * pd).exp();
    let rho = 0.12 * decay / denom + 0.24 * (1.0 - decay) / denom;
    let b = {
        let x = 0.11852 - 0.05478 * pd.ln();
        x * x
    };
    let q = norm_cdf(norm_inv_cdf(pd) / (1.0 - rho).sqrt()
        + norm_inv_cdf(0.999) * (rho / (1.0 - rho)).sqrt());
    Ok(lgd * (q - pd) * (1.0 + (maturity - 2.5) * b) / (1.0 - 1.5 * b))
}

/// Notional-weighted effective maturity clamped to [1, 5] (credit-risk
/// flavor). `trades` are (residual maturity, notional) pairs.
pub fn effective_maturity_irb(trades: &[(f64, f64)]) -> Result<f64> {
    Ok(weighted_maturity(trades)?.clamp(1.0, 5.0))
}

/// Notional-weighted effective maturity floored at 1 but uncapped above
/// (CVA-capital flavor).
pub fn effective_maturity_cva(trades: &[(f64, f64)]) -> Result<f64> {
    Ok(weighted_maturity(trades)?.max(1.0))
}

fn weighted_maturity(trades: &[(f64, f64)]) -> Result<f64> {
    let total: f64 = trades.iter().map(|&(_, n)| n).sum();
    if !(total > 0.0) {
        return Err(XvaError::input(
            "effective maturity: total notional must be positive",
        ));
    }
    Ok(trades.iter().map(|&(m, n)| m * n).sum::<f64>() / total)
}

// ---------------------------------------------------------------------------
// Counterparty credit risk capital
// ---------------------------------------------------------------------------

/// CCR capital: `capital_ratio * 12.5 * risk_weight * EAD`. At the 8%
/// minimum ratio this is exactly `risk_weight * EAD`.
pub fn ccr_capital(ead: f64, risk_weight: f64, capital_ratio: f64) -> Result<f64> {
    if ead < 0.0 {
        return Err(XvaError::input(format!(
            "ccr capital: EAD must be non-negative (got {ead})"
        )));
    }
    Ok(capital_ratio * 12.5 * risk_weight * ead)
}

// ---------------------------------------------------------------------------
// Standardized CVA capital charge
// ---------------------------------------------------------------------------

/// Regulatory maturity discount applied to EAD: `(1 - e^{-0.05 M}) / (0.05 M)`.
pub fn reg_maturity_discount(maturity: f64) -> f64 {
    let x = 0.05 * maturity;
    if x.abs() < 1e-12 {
        1.0
    } else {
        -(-x).exp_m1() / x
    }
}

/// One counterparty's inputs to the standardized CVA charge. `ead` is raw
/// (the regulatory maturity discount is applied internally); the single-name
/// hedge notional `hedge_notional` is taken as already discounted.
#[derive(Debug, Clone, Copy)]
pub struct CvaChargeEntry {
    pub weight: f64,
    pub maturity: f64,
    pub ead: f64,
    pub hedge_maturity: f64,
    pub hedge_notional: f64,
}

impl CvaChargeEntry {
    pub fn unhedged(weight: f64, maturity: f64, ead: f64) -> Self {
        CvaChargeEntry {
            weight,
            maturity,
            ead,
            hedge_maturity: 1.0,
            hedge_notional: 0.0,
        }
    }

    fn net_term(&self) -> f64 {
        self.maturity * self.ead * reg_maturity_discount(self.maturity)
            - self.hedge_maturity * self.hedge_notional
    }
}

/// Full standardized CVA capital charge over all counterparties (index
/// hedges out of scope):
/// `2.33 sqrt(h) sqrt[(sum 0.5 w_i d_i)^2 + sum 0.75 w_i^2 d_i^2]` with
/// `d_i = M_i EAD_i^disc - M_i^h B_i`.
pub fn cva_capital_std_full(entries: &[CvaChargeEntry], horizon: f64) -> f64 {
    let systematic: f64 = entries.iter().map(|e| 0.5 * e.weight * e.net_term()).sum();
    let idiosyncratic: f64 = entries
        .iter()
        .map(|e| {
            let d = e.net_term();
            0.75 * e.weight * e.weight * d * d
        })
        .sum();
    2.33 * horizon.sqrt() * (systematic * systematic + idiosyncratic).sqrt()
}

/// Per-counterparty additive approximation of the standardized CVA charge,
/// accurate for large portfolios: `(2.33/2) sqrt(h) w M EAD^disc`.
pub fn cva_capital_std_large_n(weight: f64, maturity: f64, ead: f64, horizon: f64) -> f64 {
    0.5 * 2.33 * horizon.sqrt() * weight * maturity * reg_maturity_discount(maturity) * ead
}

// ---------------------------------------------------------------------------
// Internal-model regulatory CVA and its spread sensitivity
// ---------------------------------------------------------------------------

/// Regulatory CVA from a discretized exposure profile: survival probabilities
/// from market spreads with `exp(-s t / LGD)`, loss fraction `lgd_mkt`,
/// trapezoid on the discounted expected exposure.
pub fn regulatory_cva(
    spreads: &[f64],
    times: &[f64],
    lgd_mkt: f64,
    ee: &[f64],
    df: &[f64],
) -> Result<f64> {
    let n = times.len();
    if spreads.len() != n || ee.len() != n || df.len() != n {
        return Err(XvaError::input(
            "regulatory cva: spreads, times, EE and discount grids must have equal length",
        ));
    }
    if !(lgd_mkt > 0.0 && lgd_mkt <= 1.0) {
        return Err(XvaError::input("regulatory cva: LGD must lie in (0, 1]"));
    }
    let surv = |i: usize| (-spreads[i] * times[i] / lgd_mkt).exp();
    let mut total = 0.0;
    for i in 1..n {
        let default_prob = (surv(i - 1) - surv(i)).max(0.0);
        total += default_prob * 0.5 * (ee[i - 1] * df[i - 1] + ee[i] * df[i]);
    }
    Ok(lgd_mkt * total)
}

/// Regulatory credit-spread sensitivity of the CVA above at interior bucket
/// `i`: `0.0001 t_i exp(-s_i t_i / LGD) (EE_{i-1} D_{i-1} + EE_{i+1} D_{i+1}) / 2`.
pub fn regulatory_cs01(
    spreads: &[f64],
    times: &[f64],
    lgd_mkt: f64,
    ee: &[f64],
    df: &[f64],
    i: usize,
) -> Result<f64> {
    let n = times.len();
    if spreads.len() != n || ee.len() != n || df.len() != n {
        return Err(XvaError::input(
            "regulatory cs01: spreads, times, EE and discount grids must have equal length",
        ));
    }
    if i == 0 || i + 1 >= n {
        return Err(XvaError::input(format!(
            "regulatory cs01: bucket {i} must be interior to the grid"
        )));
    }
    Ok(0.0001
        * times[i]
        * (-spreads[i] * times[i] / lgd_mkt).exp()
        * 0.5
        * (ee[i - 1] * df[i - 1] + ee[i + 1] * df[i + 1]))
}

// ---------------------------------------------------------------------------
// Lifetime capital profile
// ---------------------------------------------------------------------------

/// Expected regulatory capital through time for one counterparty netting set
/// plus the (portfolio-level) market-risk term attributed to it. Plain
/// vectors are expectations E[K]; `_d` vectors are E[D K] and `_rd` vectors
/// E[D r K], which the valuation-adjustment integrals consume.
#[derive(Debug, Clone)]
pub struct CapitalProfile {
    pub times: Vec<f64>,
    pub k_mr: Vec<f64>,
    pub k_ccr: Vec<f64>,
    pub k_cva: Vec<f64>,
    pub k_mr_d: Vec<f64>,
    pub k_ccr_d: Vec<f64>,
    pub k_cva_d: Vec<f64>,
    pub k_mr_rd: Vec<f64>,
    pub k_ccr_rd: Vec<f64>,
    pub k_cva_rd: Vec<f64>,
}

impl CapitalProfile {
    pub fn k_total(&self, i: usize) -> f64 {
        self.k_mr[i] + self.k_ccr[i] + self.k_cva[i]
    }

    /// E[D K_total] at grid index `i`.
    pub fn k_total_d(&self, i: usize) -> f64 {
        self.k_mr_d[i] + self.k_ccr_d[i] + self.k_cva_d[i]
    }

    /// A profile of zeros on `times` (no capital attributed).
    pub fn zeros(times: &[f64]) -> Self {
        let z = vec![0.0; times.len()];
        CapitalProfile {
            times: times.to_vec(),
            k_mr: z.clone(),
            k_ccr: z.clone(),
            k_cva: z.clone(),
            k_mr_d: z.clone(),
            k_ccr_d: z.clone(),
            k_cva_d: z.clone(),
            k_mr_rd: z.clone(),
            k_ccr_rd: z.clone(),
            k_cva_rd: z,
        }
    }
}

/// Compose the lifetime capital profile for one counterparty netting set.
///
/// * market risk: deterministic ladder charge on `mr_swaps` (typically the
///   whole book — trade plus hedges — when the attribution puts the net
///   ladder on this counterparty; empty when attributed elsewhere);
/// * counterparty credit risk: risk-weighted CEM EAD, linear in EAD so the
///   discounted expectations reuse the EAD expectations pathwise;
/// * CVA capital: per-counterparty standardized approximation on the CEM EAD
///   with the uncapped effective maturity recomputed at each grid time; zero
///   for exempt counterparties.
pub fn capital_profile(
    exposure: &NettingSetExposure,
    stats: &DiscountStats,
    set_swaps: &[Swap],
    mr_swaps: &[Swap],
    cpty: &CounterpartyProfile,
    cfg: &CapitalConfig,
) -> Result<CapitalProfile> {
    cfg.validate()?;
    let times = &exposure.times;
    let n = times.len();
    if stats.d_bar.len() != n {
        return Err(XvaError::input(
            "capital profile: exposure and discount grids must match",
        ));
    }

    let k_mr = market_risk_profile(mr_swaps, times, cfg);
    let k_mr_d: Vec<f64> = (0..n).map(|i| k_mr[i] * stats.d_bar[i]).collect();
    let k_mr_rd: Vec<f64> = (0..n).map(|i| k_mr[i] * stats.rd_bar[i]).collect();

    // CCR and CVA capital are linear in EAD, so E[D K] = coeff * E[D EAD].
    let ccr_coeff = cfg.capital_ratio * 12.5 * cpty.ccr_weight;
    let mut cva_coeff = vec![0.0f64; n];
    if !cpty.domicile_exempt_cva_capital {
        for (i, &t) in times.iter().enumerate() {
            let residual: Vec<(f64, f64)> = set_swaps
                .iter()
                .filter(|s| s.maturity > t + TIME_EPS)
                .map(|s| (s.maturity - t, s.notional))
                .collect();
            if residual.is_empty() {
                continue;
            }
            let m = effective_maturity_cva(&residual)?;
            cva_coeff[i] =
                0.5 * 2.33 * cfg.horizon.sqrt() * cpty.cva_weight * m * reg_maturity_discount(m);
        }
    }

    let scale = |coeff: &dyn Fn(usize) -> f64, base: &[f64]| -> Vec<f64> {
        (0..n).map(|i| coeff(i) * base[i]).collect()
    };

    Ok(CapitalProfile {
        times: times.clone(),
        k_ccr: scale(&|_| ccr_coeff, &exposure.ead_cem),
        k_ccr_d: scale(&|_| ccr_coeff, &exposure.ead_cem_d),
        k_ccr_rd: scale(&|_| ccr_coeff, &exposure.ead_cem_rd),
        k_cva: scale(&|i| cva_coeff[i], &exposure.ead_cem),
        k_cva_d: scale(&|i| cva_coeff[i], &exposure.ead_cem_d),
        k_cva_rd: scale(&|i| cva_coeff[i], &exposure.ead_cem_rd),
        k_mr,
        k_mr_d,
        k_mr_rd,
    })
}
