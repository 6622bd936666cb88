//! Expected-exposure and exposure-at-default profiles per netting set.
//!
//! A netting set is valued pathwise on the simulation grid; exposures and the
//! three regulatory EAD measures are averaged across paths. Collateralized
//! sets model a perfect, instantaneous CSA: exposure and EAD are identically
//! zero and only the collateral balance `E[D V]` (which prices the collateral
//! spread) is tracked.
//!
//! Reductions run over fixed-size path chunks folded in index order, so every
//! statistic is bit-identical for a fixed seed regardless of thread count.

use crate::curve::DiscountCurve;
use crate::error::{Result, XvaError};
use crate::hullwhite::{HullWhite, PathSet};
use crate::swap::{Swap, SwapPricer};

/// Paths per reduction chunk; fixed so results do not depend on thread count.
const CHUNK: usize = 4096;

/// Matching tolerance for grid/schedule comparisons.
const TIME_EPS: f64 = 1e-9;

/// A group of trades facing one counterparty under one (possibly absent) CSA.
#[derive(Debug, Clone)]
pub struct NettingSet {
    pub id: String,
    pub collateralized: bool,
    pub swaps: Vec<Swap>,
}

impl NettingSet {
    pub fn total_notional(&self) -> f64 {
        self.swaps.iter().map(|s| s.notional).sum()
    }

    pub fn last_maturity(&self) -> f64 {
        self.swaps.iter().map(|s| s.maturity).fold(0.0, f64::max)
    }
}

// ---------------------------------------------------------------------------
// Current-exposure-method EAD
// ---------------------------------------------------------------------------

/// Interest-rate add-on fraction of notional by residual maturity.
pub fn cem_addon_fraction(residual_maturity: f64) -> f64 {
    if residual_maturity <= 1.0 {
        0.0
    } else if residual_maturity <= 5.0 {
        0.005
    } else {
        0.015
    }
}

/// Current-exposure-method EAD for one netting set state.
///
/// `values` are the per-trade mark-to-markets, `addons` the per-trade gross
/// add-on amounts (fraction x notional). The net add-on scales the gross
/// add-on by `0.4 + 0.6 * NGR` where `NGR = net⁺ / gross⁺`; with no positive
/// gross exposure there is nothing to net against, so NGR defaults to 1 and
/// the full add-on is kept (an at-the-money single trade must carry its whole
/// add-on). With `floor_value` the replacement cost enters as `net⁺`
/// (exposure semantics); without it the raw `net + addon` is floored at zero
/// as a whole.
pub fn ead_cem(values: &[f64], addons: &[f64], floor_value: bool) -> f64 {
    debug_assert_eq!(values.len(), addons.len());
    let net: f64 = values.iter().sum();
    let gross: f64 = values.iter().map(|v| v.max(0.0)).sum();
    let a_gross: f64 = addons.iter().sum();
    let ngr = if gross > 1e-300 { net.max(0.0) / gross } else { 1.0 };
    let a_net = 0.4 * a_gross + 0.6 * ngr * a_gross;
    if floor_value {
        net.max(0.0) + a_net
    } else {
        (net + a_net).max(0.0)
    }
}

// ---------------------------------------------------------------------------
// Standardized-method EAD
// ---------------------------------------------------------------------------

/// Supervisory credit conversion factor for interest-rate hedging sets.
pub const STD_CCF_RATES: f64 = 0.002;

/// One signed duration-weighted risk position assigned to a hedging set.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RiskPosition {
    pub hedging_set: HedgingSet,
    /// Signed modified duration x notional.
    pub amount: f64,
}

/// Hedging sets for a single-currency rates book: duration buckets.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum HedgingSet {
    UnderOneYear,
    OneToFiveYears,
    OverFiveYears,
}

impl HedgingSet {
    pub fn for_duration(duration: f64) -> Self {
        if duration < 1.0 {
            HedgingSet::UnderOneYear
        } else if duration <= 5.0 {
            HedgingSet::OneToFiveYears
        } else {
            HedgingSet::OverFiveYears
        }
    }
}

/// The deterministic leg of the standardized EAD: sum over hedging sets of
/// `|net risk position| * CCF`.
pub fn std_risk_addon(positions: &[RiskPosition], ccf: f64) -> f64 {
    let mut per_set = [0.0f64; 3];
    for p in positions {
        let idx = match p.hedging_set {
            HedgingSet::UnderOneYear => 0,
            HedgingSet::OneToFiveYears => 1,
            HedgingSet::OverFiveYears => 2,
        };
        per_set[idx] += p.amount;
    }
    per_set.iter().map(|x| x.abs() * ccf).sum()
}

/// Standardized-method EAD: `1.4 * max(net value - collateral, sum over
/// hedging sets of |net risk position| * CCF)`.
pub fn ead_standardized(
    net_value: f64,
    collateral: f64,
    positions: &[RiskPosition],
    ccf: f64,
) -> f64 {
    1.4 * (net_value - collateral).max(std_risk_addon(positions, ccf))
}

/// Duration-weighted risk positions of one swap at time `t`, evaluated on the
/// base curve. The fixed leg enters as a coupon-bond position (Macaulay
/// duration under continuous compounding, principal at maturity); the
/// floating leg as a short-dated position with duration equal to the time to
/// its next quarterly reset. Payer-fixed swaps are short the fixed leg and
/// long the floating leg.
pub fn swap_risk_positions(swap: &Swap, curve: &DiscountCurve, t: f64) -> Result<Vec<RiskPosition>> {
    if t >= swap.maturity - TIME_EPS {
        return Ok(Vec::new());
    }
    let df_t = curve.discount_factor(t);
    let mut pv = 0.0;
    let mut weighted = 0.0;
    for p in swap.schedule()? {
        if p.end <= t + TIME_EPS {
            continue;
        }
        let df = curve.discount_factor(p.end) / df_t;
        pv += swap.fixed_rate * p.accrual * df;
        weighted += swap.fixed_rate * p.accrual * df * (p.end - t);
    }
    let df_mat = curve.discount_factor(swap.maturity) / df_t;
    pv += df_mat;
    weighted += df_mat * (swap.maturity - t);
    let fixed_duration = weighted / pv;

    let float_duration = next_quarterly_reset(t).min(swap.maturity - t);

    let sign = swap.direction.sign(); // payer: short fixed (+1 -> -N), long float
    Ok(vec![
        RiskPosition {
            hedging_set: HedgingSet::for_duration(fixed_duration),
            amount: -sign * fixed_duration * swap.notional,
        },
        RiskPosition {
            hedging_set: HedgingSet::for_duration(float_duration),
            amount: sign * float_duration * swap.notional,
        },
    ])
}

/// Time from `t` to the next quarterly reset anchor strictly after `t`.
pub fn next_quarterly_reset(t: f64) -> f64 {
    let k = (t / 0.25 + TIME_EPS).floor() + 1.0;
    k * 0.25 - t
}

// ---------------------------------------------------------------------------
// Internal-model EAD (effective EPE)
// ---------------------------------------------------------------------------

/// Effective EPE over the window starting at grid index `lo`: the running
/// maximum of EE, averaged over `[t_lo, min(t_lo + 1, t_end)]`, times 1.4.
pub fn ead_imm_window(times: &[f64], ee: &[f64], lo: usize) -> f64 {
    debug_assert_eq!(times.len(), ee.len());
    let t_lo = times[lo];
    let horizon = (t_lo + 1.0).min(*times.last().unwrap());
    if horizon <= t_lo + TIME_EPS {
        return 1.4 * ee[lo];
    }
    let mut running_max = ee[lo];
    let mut acc = 0.0;
    let mut span = 0.0;
    for k in lo + 1..times.len() {
        if times[k] > horizon + TIME_EPS {
            break;
        }
        running_max = running_max.max(ee[k]);
        let dt = times[k] - times[k - 1];
        acc += running_max * dt;
        span += dt;
    }
    if span <= 0.0 {
        return 1.4 * ee[lo];
    }
    1.4 * acc / span
}

// ---------------------------------------------------------------------------
// Profile construction
// ---------------------------------------------------------------------------

/// Monte Carlo exposure statistics for one netting set on the path grid.
/// Discounted quantities use the pathwise bank-account discount factor.
#[derive(Debug, Clone)]
pub struct NettingSetExposure {
    pub times: Vec<f64>,
    pub n_paths: usize,
    /// E[D V⁺] (>= 0).
    pub epe_d: Vec<f64>,
    /// E[D V⁻] (<= 0).
    pub ene_d: Vec<f64>,
    /// Undiscounted E[V⁺].
    pub ee: Vec<f64>,
    /// E[D V] — also the discounted collateral balance when collateralized.
    pub ev_d: Vec<f64>,
    /// E[EAD] under the current exposure method.
    pub ead_cem: Vec<f64>,
    /// E[D EAD] under the current exposure method.
    pub ead_cem_d: Vec<f64>,
    /// E[D r EAD] under the current exposure method.
    pub ead_cem_rd: Vec<f64>,
    /// E[EAD] under the standardized method.
    pub ead_std: Vec<f64>,
    /// Internal-model EAD: 1.4 x effective EPE over a rolling 1-year window.
    pub ead_imm: Vec<f64>,
    /// Standard errors of the Monte Carlo means above.
    pub se_epe_d: Vec<f64>,
    pub se_ene_d: Vec<f64>,
    pub se_ead_cem: Vec<f64>,
    pub se_ead_std: Vec<f64>,
}

/// Path-set statistics independent of any portfolio: E[D] and E[r D].
#[derive(Debug, Clone)]
pub struct DiscountStats {
    pub d_bar: Vec<f64>,
    pub rd_bar: Vec<f64>,
}

pub fn discount_stats(paths: &PathSet) -> DiscountStats {
    let n_times = paths.n_times();
    let mut d_bar = vec![0.0; n_times];
    let mut rd_bar = vec![0.0; n_times];
    for p in 0..paths.n_paths {
        let d = paths.discount_row(p);
        let r = paths.short_rate_row(p);
        for i in 0..n_times {
            d_bar[i] += d[i];
            rd_bar[i] += r[i] * d[i];
        }
    }
    let inv = 1.0 / paths.n_paths as f64;
    d_bar.iter_mut().for_each(|x| *x *= inv);
    rd_bar.iter_mut().for_each(|x| *x *= inv);
    DiscountStats { d_bar, rd_bar }
}

/// Running sums for one chunk of paths.
struct ChunkSums {
    epe_d: Vec<f64>,
    ene_d: Vec<f64>,
    ee: Vec<f64>,
    ev_d: Vec<f64>,
    ead_cem: Vec<f64>,
    ead_cem_d: Vec<f64>,
    ead_cem_rd: Vec<f64>,
    ead_std: Vec<f64>,
    sq_epe_d: Vec<f64>,
    sq_ene_d: Vec<f64>,
    sq_ead_cem: Vec<f64>,
    sq_ead_std: Vec<f64>,
}

impl ChunkSums {
    fn zeros(n: usize) -> Self {
        ChunkSums {
            epe_d: vec![0.0; n],
            ene_d: vec![0.0; n],
            ee: vec![0.0; n],
            ev_d: vec![0.0; n],
            ead_cem: vec![0.0; n],
            ead_cem_d: vec![0.0; n],
            ead_cem_rd: vec![0.0; n],
            ead_std: vec![0.0; n],
            sq_epe_d: vec![0.0; n],
            sq_ene_d: vec![0.0; n],
            sq_ead_cem: vec![0.0; n],
            sq_ead_std: vec![0.0; n],
        }
    }

    fn add_into(&self, total: &mut ChunkSums) {
        for (dst, src) in [
            (&mut total.epe_d, &self.epe_d),
            (&mut total.ene_d, &self.ene_d),
            (&mut total.ee, &self.ee),
            (&mut total.ev_d, &self.ev_d),
            (&mut total.ead_cem, &self.ead_cem),
            (&mut total.ead_cem_d, &self.ead_cem_d),
            (&mut total.ead_cem_rd, &self.ead_cem_rd),
            (&mut total.ead_std, &self.ead_std),
            (&mut total.sq_epe_d, &self.sq_epe_d),
            (&mut total.sq_ene_d, &self.sq_ene_d),
            (&mut total.sq_ead_cem, &self.sq_ead_cem),
            (&mut total.sq_ead_std, &self.sq_ead_std),
        ] {
            for (a, b) in dst.iter_mut().zip(src) {
                *a += b;
            }
        }
    }
}

/// Build the exposure profile of one netting set from simulated paths.
pub fn build_exposure(
    set: &NettingSet,
    hw: &HullWhite,
    curve: &DiscountCurve,
    paths: &PathSet,
    cem_floor: bool,
    threads: usize,
) -> Result<NettingSetExposure> {
    let times = &paths.times;
    let n_times = times.len();
    let n_paths = paths.n_paths;

    if set.swaps.is_empty() {
        return Err(XvaError::input(format!(
            "exposure: netting set {:?} has no trades",
            set.id
        )));
    }

    let pricers: Vec<SwapPricer> = set
        .swaps
        .iter()
        .map(|s| SwapPricer::new(s, hw, curve, times))
        .collect::<Result<_>>()?;

    if set.collateralized {
        // Perfect CSA: exposure and EAD vanish; only the collateral balance
        // E[D V] survives (it prices the collateral spread).
        let mut ev_d = vec![0.0; n_times];
        let mut values = vec![0.0; n_times];
        for p in 0..n_paths {
            values.iter_mut().for_each(|x| *x = 0.0);
            for pricer in &pricers {
                pricer.accumulate_path_values(paths.short_rate_row(p), &mut values);
            }
            let d = paths.discount_row(p);
            for i in 0..n_times {
                ev_d[i] += d[i] * values[i];
            }
        }
        let inv = 1.0 / n_paths as f64;
        ev_d.iter_mut().for_each(|x| *x *= inv);
        let zeros = vec![0.0; n_times];
        return Ok(NettingSetExposure {
            times: times.clone(),
            n_paths,
            epe_d: zeros.clone(),
            ene_d: zeros.clone(),
            ee: zeros.clone(),
            ev_d,
            ead_cem: zeros.clone(),
            ead_cem_d: zeros.clone(),
            ead_cem_rd: zeros.clone(),
            ead_std: zeros.clone(),
            ead_imm: zeros.clone(),
            se_epe_d: zeros.clone(),
            se_ene_d: zeros.clone(),
            se_ead_cem: zeros.clone(),
            se_ead_std: zeros,
        });
    }

    // Deterministic per-time inputs shared across paths.
    let n_trades = set.swaps.len();
    let mut addons = vec![0.0f64; n_times * n_trades]; // time-major
    for (i, &t) in times.iter().enumerate() {
        for (j, s) in set.swaps.iter().enumerate() {
            let residual = s.maturity - t;
            addons[i * n_trades + j] = if residual > TIME_EPS {
                cem_addon_fraction(residual) * s.notional
            } else {
                0.0
            };
        }
    }
    let mut std_addon = vec![0.0f64; n_times];
    for (i, &t) in times.iter().enumerate() {
        let mut positions = Vec::with_capacity(2 * n_trades);
        for s in &set.swaps {
            positions.extend(swap_risk_positions(s, curve, t)?);
        }
        // Only the add-on leg of the standardized EAD is deterministic; the
        // value leg of the max is pathwise.
        std_addon[i] = std_risk_addon(&positions, STD_CCF_RATES);
    }

    let n_chunks = n_paths.div_ceil(CHUNK);
    let mut partials: Vec<ChunkSums> = (0..n_chunks).map(|_| ChunkSums::zeros(n_times)).collect();

    let workers = threads.max(1).min(n_chunks);
    let chunks_per_worker = n_chunks.div_ceil(workers);
    std::thread::scope(|scope| {
        let pricers = &pricers;
        let addons = &addons;
        let std_addon = &std_addon;
        for (wi, block) in partials.chunks_mut(chunks_per_worker).enumerate() {
            scope.spawn(move || {
                let mut trade_values = vec![0.0f64; n_trades * n_times];
                let mut scratch = vec![0.0f64; n_trades];
                for (bi, sums) in block.iter_mut().enumerate() {
                    let chunk_idx = wi * chunks_per_worker + bi;
                    let first = chunk_idx * CHUNK;
                    let last = (first + CHUNK).min(n_paths);
                    for p in first..last {
                        trade_values.iter_mut().for_each(|x| *x = 0.0);
                        let rates = paths.short_rate_row(p);
                        for (j, pricer) in pricers.iter().enumerate() {
                            pricer.accumulate_path_values(
                                rates,
                                &mut trade_values[j * n_times..(j + 1) * n_times],
                            );
                        }
                        let d_row = paths.discount_row(p);
                        accumulate_path(
                            sums,
                            &trade_values,
                            rates,
                            d_row,
                            addons,
                            std_addon,
                            &mut scratch,
                            n_times,
                            cem_floor,
                        );
                    }
                }
            });
        }
    });

    let mut total = ChunkSums::zeros(n_times);
    for part in &partials {
        part.add_into(&mut total);
    }

    let n = n_paths as f64;
    let mean = |v: &[f64]| -> Vec<f64> { v.iter().map(|x| x / n).collect() };
    let se = |sums: &[f64], sq: &[f64]| -> Vec<f64> {
        sums.iter()
            .zip(sq)
            .map(|(&s, &s2)| {
                if n_paths < 2 {
                    return 0.0;
                }
                let m = s / n;
                let var = ((s2 - n * m * m) / (n - 1.0)).max(0.0);
                (var / n).sqrt()
            })
            .collect()
    };

    let ee = mean(&total.ee);
    let ead_imm = (0..n_times)
        .map(|i| ead_imm_window(times, &ee, i))
        .collect();

    Ok(NettingSetExposure {
        times: times.clone(),
        n_paths,
        se_epe_d: se(&total.epe_d, &total.sq_epe_d),
        se_ene_d: se(&total.ene_d, &total.sq_ene_d),
        se_ead_cem: se(&total.ead_cem, &total.sq_ead_cem),
        se_ead_std: se(&total.ead_std, &total.sq_ead_std),
        epe_d: mean(&total.epe_d),
        ene_d: mean(&total.ene_d),
        ee,
        ev_d: mean(&total.ev_d),
        ead_cem: mean(&total.ead_cem),
        ead_cem_d: mean(&total.ead_cem_d),
        ead_cem_rd: mean(&total.ead_cem_rd),
        ead_std: mean(&total.ead_std),
        ead_imm,
    })
}

#[allow(clippy::too_many_arguments)]
fn accumulate_path(
    sums: &mut ChunkSums,
    trade_values: &[f64],
    rates: &[f64],
    discounts: &[f64],
    addons: &[f64],
    std_addon: &[f64],
    values: &mut [f64],
    n_times: usize,
    cem_floor: bool,
) {
    let n_trades = values.len();
    for i in 0..n_times {
        let mut net = 0.0;
        for j in 0..n_trades {
            let v = trade_values[j * n_times + i];
            values[j] = v;
            net += v;
        }
        let d = discounts[i];
        let pos = net.max(0.0);
        let neg = net.min(0.0);
        sums.epe_d[i] += d * pos;
        sums.ene_d[i] += d * neg;
        sums.ee[i] += pos;
        sums.ev_d[i] += d * net;
        let ead_c = ead_cem(values, &addons[i * n_trades..(i + 1) * n_trades], cem_floor);
        sums.ead_cem[i] += ead_c;
        sums.ead_cem_d[i] += d * ead_c;
        sums.ead_cem_rd[i] += d * rates[i] * ead_c;
        let ead_s = 1.4 * net.max(std_addon[i]);
        sums.ead_std[i] += ead_s;
        sums.sq_epe_d[i] += (d * pos) * (d * pos);
        sums.sq_ene_d[i] += (d * neg) * (d * neg);
        sums.sq_ead_cem[i] += ead_c * ead_c;
        sums.sq_ead_std[i] += ead_s * ead_s;
    }
}
