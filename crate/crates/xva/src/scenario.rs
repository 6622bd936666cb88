//! Hedging studies on a single client swap, and a portfolio pricer with
//! per-counterparty attribution.
//!
//! Three studies are supported. `Naked` prices the client swap alone in an
//! uncollateralized netting set. `BackToBack` adds an equal-notional mirror
//! trade with a perfectly collateralized hedge counterparty: the book value
//! and the market-risk capital ladder cancel exactly, while the client-set
//! adjustments are unchanged and the hedge contributes only its collateral
//! balance. `Ir01Flat` sizes the mirror trade so the rate sensitivity of the
//! all-in deal price is zero at inception; the residual market-risk capital
//! of the imperfectly offsetting pair is kept.
//!
//! Rate sensitivity convention: the quantity driven to zero is the IR01 of
//! the client-facing deal price, i.e. risk-free book value *minus* the
//! adjustment total (adjustments are negative costs, so the charge adds to
//! the price). IR01 is quoted in bp of client notional per 1 bp parallel
//! shift of the zero curve, computed by central difference with common
//! random numbers across the three curves.

use crate::capital::capital_profile;
use crate::capital::CapitalProfile;
use crate::error::{Result, XvaError};
use crate::exposure::{
    build_exposure, discount_stats, DiscountStats, NettingSet, NettingSetExposure,
};
use crate::market::{
    time_grid, CapitalConfig, CounterpartyProfile, IssuerParams, MarketFile, PortfolioEntry,
    RatingsTable,
};
use crate::math::bisect;
use crate::swap::{Swap, SwapDirection};
use crate::xva::{integrate_xva, XvaBreakdown};
use std::cell::RefCell;
use std::collections::HashMap;
use std::fmt::Write as _;

/// Parallel zero-curve shift used for central-difference IR01 (1 bp).
pub const CURVE_BUMP: f64 = 1e-4;

/// Residual IR01 below which the matched-notional hedge is accepted as
/// already flat and the multiplier is returned as exactly 1.
const FLAT_IR01_TOL: f64 = 1e-12;

/// Bracket-width tolerance for the hedge-multiplier bisection.
const HEDGE_XTOL: f64 = 1e-9;

const DIRECTIONS: [SwapDirection; 2] = [SwapDirection::Payer, SwapDirection::Receiver];

/// Which hedging study to run.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ScenarioKind {
    /// Client swap alone, no hedge.
    Naked,
    /// Equal-notional collateralized mirror hedge.
    BackToBack,
    /// Mirror hedge sized so the all-in deal-price IR01 is zero.
    Ir01Flat,
}

impl ScenarioKind {
    pub fn parse(name: &str) -> Result<Self> {
        match name {
            "naked" => Ok(ScenarioKind::Naked),
            "backToBack" => Ok(ScenarioKind::BackToBack),
            "ir01Flat" => Ok(ScenarioKind::Ir01Flat),
            other => Err(XvaError::input(format!(
                "unknown scenario {other:?}; expected naked, backToBack, or ir01Flat"
            ))),
        }
    }

    pub fn label(self) -> &'static str {
        match self {
            ScenarioKind::Naked => "naked",
            ScenarioKind::BackToBack => "backToBack",
            ScenarioKind::Ir01Flat => "ir01Flat",
        }
    }
}

/// Full configuration of one scenario run. Rows are produced for every
/// combination of `phis` x {Payer, Receiver} x `ratings`, in that loop order.
#[derive(Debug, Clone)]
pub struct ScenarioRequest {
    pub kind: ScenarioKind,
    /// Client trade template; its `direction` field is ignored because both
    /// directions are always swept.
    pub swap: Swap,
    pub phis: Vec<f64>,
    /// Rating buckets to price against, resolved in `table`.
    pub ratings: Vec<String>,
    pub table: RatingsTable,
    pub market: MarketFile,
    pub n_paths: usize,
    pub steps_per_year: u32,
    pub threads: usize,
    pub issuer: IssuerParams,
    pub capital: CapitalConfig,
    /// Search bracket for the rate-flattening hedge multiplier.
    pub hedge_bracket: (f64, f64),
}

impl ScenarioRequest {
    /// Default setup: 10-year semiannual swap at the 2.7% par coupon of the
    /// default flat market, notional 100, all built-in rating buckets,
    /// capital-offset fractions 0, 0.5, and 1.
    pub fn new(kind: ScenarioKind) -> Self {
        let table = RatingsTable::builtin();
        let ratings = table.names().iter().map(|s| s.to_string()).collect();
        ScenarioRequest {
            kind,
            swap: Swap {
                notional: 100.0,
                fixed_rate: 0.027,
                start: 0.0,
                maturity: 10.0,
                payments_per_year: 2,
                direction: SwapDirection::Payer,
            },
            phis: vec![0.0, 0.5, 1.0],
            ratings,
            table,
            market: MarketFile::default_market(),
            n_paths: 10_000,
            steps_per_year: 12,
            threads: 1,
            issuer: IssuerParams::default(),
            capital: CapitalConfig::default(),
            hedge_bracket: (0.5, 2.0),
        }
    }
}

/// One output row of a scenario run.
#[derive(Debug, Clone)]
pub struct ScenarioRow {
    pub phi: f64,
    pub direction: SwapDirection,
    pub rating: String,
    /// Client notional the bp columns are quoted against.
    pub notional: f64,
    /// Adjustments in currency on the base curve.
    pub breakdown: XvaBreakdown,
    /// Deal-price rate sensitivity, bp of notional per 1 bp shift.
    pub ir01_bp: f64,
    /// Only for the rate-flattening study: hedge notional in excess of the
    /// matched-notional hedge, in percent.
    pub hedge_change_pct: Option<f64>,
}

impl ScenarioRow {
    fn bp(&self, value: f64) -> f64 {
        value / self.notional * 1e4
    }

    pub fn cva_bp(&self) -> f64 {
        self.bp(self.breakdown.cva)
    }

    pub fn dva_bp(&self) -> f64 {
        self.bp(self.breakdown.dva)
    }

    /// Funding column quoted in the capital-blind grouping, which keeps it
    /// independent of the capital-offset fraction.
    pub fn fca_bp(&self) -> f64 {
        self.bp(self.breakdown.fca_prime)
    }

    pub fn kva_mr_bp(&self) -> f64 {
        self.bp(self.breakdown.kva_mr)
    }

    pub fn kva_ccr_bp(&self) -> f64 {
        self.bp(self.breakdown.kva_ccr)
    }

    pub fn kva_cva_bp(&self) -> f64 {
        self.bp(self.breakdown.kva_cva)
    }

    /// All-in adjustment total. Identical under both term groupings, so when
    /// capital offsets funding (phi > 0) it is *not* the sum of the displayed
    /// funding and capital columns, which mix the two groupings.
    pub fn total_bp(&self) -> f64 {
        self.bp(self.breakdown.total())
    }
}

/// Scenario results plus enough context to render them.
#[derive(Debug, Clone)]
pub struct ScenarioTable {
    pub kind: ScenarioKind,
    pub rows: Vec<ScenarioRow>,
}

impl ScenarioTable {
    /// Render as CSV. Numeric cells use fixed 6-decimal formatting so reruns
    /// of the same configuration are byte-identical.
    pub fn to_csv(&self) -> String {
        let mut out = String::from(
            "phi,swap,rating,cva_bp,dva_bp,fca_bp,kva_mr_bp,kva_ccr_bp,kva_cva_bp,total_bp,ir01_bp",
        );
        if self.kind == ScenarioKind::Ir01Flat {
            out.push_str(",hedge_change_pct");
        }
        out.push('\n');
        for r in &self.rows {
            let _ = write!(
                out,
                "{},{},{},{:.6},{:.6},{:.6},{:.6},{:.6},{:.6},{:.6},{:.6}",
                fmt_phi(r.phi),
                r.direction.label(),
                r.rating,
                r.cva_bp(),
                r.dva_bp(),
                r.fca_bp(),
                r.kva_mr_bp(),
                r.kva_ccr_bp(),
                r.kva_cva_bp(),
                r.total_bp(),
                r.ir01_bp,
            );
            if let Some(h) = r.hedge_change_pct {
                let _ = write!(out, ",{h:.6}");
            }
            out.push('\n');
        }
        out
    }
}

/// Render a phi value without trailing zeros ("0", "0.5", "1").
fn fmt_phi(phi: f64) -> String {
    let s = format!("{phi:.6}");
    let trimmed = s.trim_end_matches('0').trim_end_matches('.');
    if trimmed.is_empty() {
        "0".to_string()
    } else {
        trimmed.to_string()
    }
}

/// Exposure and time-zero value of the client swap in one direction on one
/// curve.
struct DirData {
    exposure: NettingSetExposure,
    value0: f64,
}

/// Everything scenario rows need from one curve: path statistics and the
/// client exposure for both swap directions. Indexed [Payer, Receiver].
struct CurveData {
    stats: DiscountStats,
    dirs: [DirData; 2],
}

/// The mirror trade: same schedule and coupon, opposite direction, `mult`
/// times the client notional. Identical maturity and coupon make its
/// maturity-ladder positions net exactly against the client trade.
fn mirror_hedge(primary: &Swap, mult: f64) -> Swap {
    Swap {
        notional: primary.notional * mult,
        direction: match primary.direction {
            SwapDirection::Payer => SwapDirection::Receiver,
            SwapDirection::Receiver => SwapDirection::Payer,
        },
        ..primary.clone()
    }
}

/// Run one hedging study.
pub fn run_scenario(req: &ScenarioRequest) -> Result<ScenarioTable> {
    req.swap.validate()?;
    req.issuer.validate()?;
    req.capital.validate()?;
    if req.phis.is_empty() {
        return Err(XvaError::input("scenario: at least one phi value is required"));
    }
    for &phi in &req.phis {
        if !(0.0..=1.0).contains(&phi) || !phi.is_finite() {
            return Err(XvaError::input(format!(
                "scenario: phi must lie in [0, 1] (got {phi})"
            )));
        }
    }
    if req.ratings.is_empty() {
        return Err(XvaError::input("scenario: at least one rating is required"));
    }
    if req.n_paths == 0 {
        return Err(XvaError::input("scenario: path count must be positive"));
    }
    let (blo, bhi) = req.hedge_bracket;
    if req.kind == ScenarioKind::Ir01Flat && !(blo > 0.0 && bhi > blo) {
        return Err(XvaError::input(format!(
            "scenario: hedge bracket must satisfy 0 < lo < hi (got [{blo}, {bhi}])"
        )));
    }

    // Resolve every rating before simulating so bad input fails fast.
    let profiles: Vec<CounterpartyProfile> = req
        .ratings
        .iter()
        .map(|r| Ok(CounterpartyProfile::from_rating(format!("client-{r}"), req.table.get(r)?)))
        .collect::<Result<_>>()?;

    let hw = req.market.model()?;
    let base = req.market.curve()?;
    let grid = time_grid(req.swap.maturity, req.steps_per_year)?;

    // Base curve first, then up- and down-bumped. The same seed reuses the
    // driving noise on all three, so sensitivities difference away most of
    // the Monte Carlo error. Paths are dropped curve by curve; only the
    // exposure profiles are kept.
    let curves = [base.clone(), base.bumped(CURVE_BUMP), base.bumped(-CURVE_BUMP)];
    let mut data: Vec<CurveData> = Vec::with_capacity(3);
    for curve in &curves {
        let paths = hw.simulate(curve, &grid, req.n_paths, req.market.seed, req.threads)?;
        let stats = discount_stats(&paths);
        let mut dirs = Vec::with_capacity(2);
        for dir in DIRECTIONS {
            let primary = Swap { direction: dir, ..req.swap.clone() };
            let set = NettingSet {
                id: format!("client-{}", dir.label()),
                collateralized: false,
                swaps: vec![primary.clone()],
            };
            let exposure =
                build_exposure(&set, &hw, curve, &paths, req.capital.cem_floor, req.threads)?;
            let value0 = primary.value_on_curve(curve, 0.0)?;
            dirs.push(DirData { exposure, value0 });
        }
        let mut it = dirs.into_iter();
        data.push(CurveData {
            stats,
            dirs: [it.next().expect("payer data"), it.next().expect("receiver data")],
        });
    }

    let mut rows = Vec::with_capacity(req.phis.len() * 2 * profiles.len());
    for &phi in &req.phis {
        for (di, dir) in DIRECTIONS.iter().enumerate() {
            for cpty in &profiles {
                rows.push(scenario_row(req, &data, di, *dir, cpty, phi)?);
            }
        }
    }
    Ok(ScenarioTable { kind: req.kind, rows })
}

fn scenario_row(
    req: &ScenarioRequest,
    data: &[CurveData],
    di: usize,
    dir: SwapDirection,
    cpty: &CounterpartyProfile,
    phi: f64,
) -> Result<ScenarioRow> {
    let primary = Swap { direction: dir, ..req.swap.clone() };
    let notional = primary.notional;

    // Adjustments on curve `ci` with an optional mirror hedge of `mult` times
    // the client notional. The hedge counterparty is perfectly collateralized,
    // so it contributes only its ladder positions (market-risk netting) and
    // its collateral balance; credit, funding, and default-exposure capital
    // stay with the client set.
    let breakdown_on = |ci: usize, mult: Option<f64>| -> Result<XvaBreakdown> {
        let cd = &data[ci];
        let dd = &cd.dirs[di];
        let mut mr_swaps = vec![primary.clone()];
        let mut collateral: Option<Vec<f64>> = None;
        if let Some(m) = mult {
            mr_swaps.push(mirror_hedge(&primary, m));
            // Hedge value is -m x client value pathwise, and a perfect CSA
            // tracks it one for one.
            collateral = Some(dd.exposure.ev_d.iter().map(|v| -m * v).collect());
        }
        let profile = capital_profile(
            &dd.exposure,
            &cd.stats,
            std::slice::from_ref(&primary),
            &mr_swaps,
            cpty,
            &req.capital,
        )?;
        integrate_xva(
            &dd.exposure,
            &profile,
            collateral.as_deref(),
            cpty,
            &req.issuer,
            req.capital.cost_of_capital,
            phi,
        )
    };

    // Deal price on curve `ci`: risk-free book value minus the adjustment
    // total. The book is the client trade plus the mirror hedge, which nets
    // to (1 - mult) times the client value.
    let price_on = |ci: usize, mult: Option<f64>| -> Result<f64> {
        let book = match mult {
            None => data[ci].dirs[di].value0,
            Some(m) => (1.0 - m) * data[ci].dirs[di].value0,
        };
        Ok(book - breakdown_on(ci, mult)?.total())
    };

    // Central-difference IR01 in bp of notional per 1 bp shift.
    let ir01 = |mult: Option<f64>| -> Result<f64> {
        let slope = (price_on(1, mult)? - price_on(2, mult)?) / (2.0 * CURVE_BUMP);
        Ok(slope * 1e-4 / notional * 1e4)
    };

    let (mult, hedge_change_pct) = match req.kind {
        ScenarioKind::Naked => (None, None),
        ScenarioKind::BackToBack => (Some(1.0), None),
        ScenarioKind::Ir01Flat => {
            let at_par = ir01(Some(1.0))?;
            let m = if at_par.abs() <= FLAT_IR01_TOL {
                1.0
            } else {
                // The bisection closure cannot return a Result; park the
                // first failure here and surface it afterwards.
                let failure: RefCell<Option<XvaError>> = RefCell::new(None);
                let objective = |m: f64| -> f64 {
                    if failure.borrow().is_some() {
                        return f64::NAN;
                    }
                    match ir01(Some(m)) {
                        Ok(v) => v,
                        Err(e) => {
                            *failure.borrow_mut() = Some(e);
                            f64::NAN
                        }
                    }
                };
                let (lo, hi) = req.hedge_bracket;
                let solved = bisect(objective, lo, hi, HEDGE_XTOL, "scenario: hedge multiplier");
                if let Some(e) = failure.into_inner() {
                    return Err(e);
                }
                solved?
            };
            (Some(m), Some((m - 1.0) * 100.0))
        }
    };

    let breakdown = breakdown_on(0, mult)?;
    let ir01_bp = ir01(mult)?;
    Ok(ScenarioRow {
        phi,
        direction: dir,
        rating: cpty.rating.clone(),
        notional,
        breakdown,
        ir01_bp,
        hedge_change_pct,
    })
}

// ---------------------------------------------------------------------------
// Portfolio pricing
// ---------------------------------------------------------------------------

/// Configuration of a portfolio pricing run.
#[derive(Debug, Clone)]
pub struct PriceRequest {
    pub entries: Vec<PortfolioEntry>,
    pub table: RatingsTable,
    pub market: MarketFile,
    /// Rating applied to counterparties whose trades don't carry one.
    pub default_rating: Option<String>,
    /// Fraction of capital assumed usable as funding collateral.
    pub phi: f64,
    pub n_paths: usize,
    pub steps_per_year: u32,
    pub threads: usize,
    pub issuer: IssuerParams,
    pub capital: CapitalConfig,
}

impl PriceRequest {
    pub fn new(entries: Vec<PortfolioEntry>) -> Self {
        PriceRequest {
            entries,
            table: RatingsTable::builtin(),
            market: MarketFile::default_market(),
            default_rating: None,
            phi: 0.0,
            n_paths: 10_000,
            steps_per_year: 12,
            threads: 1,
            issuer: IssuerParams::default(),
            capital: CapitalConfig::default(),
        }
    }
}

/// One counterparty netting set's share of a portfolio run.
#[derive(Debug, Clone)]
pub struct CounterpartyResult {
    pub id: String,
    pub rating: String,
    pub collateralized: bool,
    /// Sum of trade notionals in the set.
    pub notional: f64,
    pub breakdown: XvaBreakdown,
    pub exposure: NettingSetExposure,
    pub capital: CapitalProfile,
}

/// Per-counterparty results on a common time grid.
#[derive(Debug, Clone)]
pub struct PriceReport {
    pub times: Vec<f64>,
    pub results: Vec<CounterpartyResult>,
}

impl PriceReport {
    /// Portfolio totals; adjustments are additive across netting sets.
    pub fn totals(&self) -> XvaBreakdown {
        let mut acc = XvaBreakdown {
            phi: self.results.first().map_or(0.0, |r| r.breakdown.phi),
            cva: 0.0,
            dva: 0.0,
            fca: 0.0,
            colva: 0.0,
            kva_mr: 0.0,
            kva_ccr: 0.0,
            kva_cva: 0.0,
            fca_prime: 0.0,
            kva_mr_prime: 0.0,
            kva_ccr_prime: 0.0,
            kva_cva_prime: 0.0,
        };
        for r in &self.results {
            let b = &r.breakdown;
            acc.cva += b.cva;
            acc.dva += b.dva;
            acc.fca += b.fca;
            acc.colva += b.colva;
            acc.kva_mr += b.kva_mr;
            acc.kva_ccr += b.kva_ccr;
            acc.kva_cva += b.kva_cva;
            acc.fca_prime += b.fca_prime;
            acc.kva_mr_prime += b.kva_mr_prime;
            acc.kva_ccr_prime += b.kva_ccr_prime;
            acc.kva_cva_prime += b.kva_cva_prime;
        }
        acc
    }
}

/// Price a multi-trade portfolio: one netting set per counterparty, one
/// shared simulation, per-set capital and adjustments.
///
/// Trades group by `counterparty_id` in first-seen order. A set is treated
/// as perfectly collateralized only if every one of its trades is flagged
/// collateralized; mixing flags within a set is rejected. Market-risk
/// capital is attributed per set from the set's own trades.
pub fn price_portfolio(req: &PriceRequest) -> Result<PriceReport> {
    if req.entries.is_empty() {
        return Err(XvaError::input("portfolio: no trades"));
    }
    if !(0.0..=1.0).contains(&req.phi) || !req.phi.is_finite() {
        return Err(XvaError::input(format!(
            "portfolio: phi must lie in [0, 1] (got {})",
            req.phi
        )));
    }
    if req.n_paths == 0 {
        return Err(XvaError::input("portfolio: path count must be positive"));
    }
    req.issuer.validate()?;
    req.capital.validate()?;

    let mut order: Vec<&str> = Vec::new();
    let mut groups: HashMap<&str, Vec<&PortfolioEntry>> = HashMap::new();
    for e in &req.entries {
        let key = e.counterparty_id.as_str();
        if !groups.contains_key(key) {
            order.push(key);
        }
        groups.entry(key).or_default().push(e);
    }

    let horizon = req
        .entries
        .iter()
        .map(|e| e.maturity_years)
        .fold(f64::NEG_INFINITY, f64::max);
    let grid = time_grid(horizon, req.steps_per_year)?;
    let hw = req.market.model()?;
    let curve = req.market.curve()?;
    let paths = hw.simulate(&curve, &grid, req.n_paths, req.market.seed, req.threads)?;
    let stats = discount_stats(&paths);

    let mut results = Vec::with_capacity(order.len());
    for id in order {
        let entries = &groups[id];

        let n_coll = entries.iter().filter(|e| e.collateralized).count();
        let collateralized = if n_coll == 0 {
            false
        } else if n_coll == entries.len() {
            true
        } else {
            return Err(XvaError::input(format!(
                "portfolio: counterparty {id:?} mixes collateralized and \
                 uncollateralized trades in one netting set"
            )));
        };

        let mut explicit: Option<&str> = None;
        for e in entries.iter() {
            if let Some(r) = e.rating.as_deref() {
                match explicit {
                    None => explicit = Some(r),
                    Some(prev) if prev == r => {}
                    Some(prev) => {
                        return Err(XvaError::input(format!(
                            "portfolio: counterparty {id:?} has conflicting ratings \
                             {prev:?} and {r:?}"
                        )))
                    }
                }
            }
        }
        let rating = explicit
            .or(req.default_rating.as_deref())
            .ok_or_else(|| {
                XvaError::input(format!(
                    "portfolio: counterparty {id:?} has no rating; set one on a trade \
                     or provide a default"
                ))
            })?
            .to_string();
        let cpty = CounterpartyProfile::from_rating(id, req.table.get(&rating)?);

        let swaps: Vec<Swap> = entries.iter().map(|e| e.to_swap()).collect::<Result<_>>()?;
        let set = NettingSet {
            id: id.to_string(),
            collateralized,
            swaps: swaps.clone(),
        };
        let exposure = build_exposure(&set, &hw, &curve, &paths, req.capital.cem_floor, req.threads)?;
        let capital = capital_profile(&exposure, &stats, &swaps, &swaps, &cpty, &req.capital)?;
        let collateral_d = collateralized.then(|| exposure.ev_d.clone());
        let breakdown = integrate_xva(
            &exposure,
            &capital,
            collateral_d.as_deref(),
            &cpty,
            &req.issuer,
            req.capital.cost_of_capital,
            req.phi,
        )?;
        let notional = entries.iter().map(|e| e.notional).sum();
        results.push(CounterpartyResult {
            id: id.to_string(),
            rating,
            collateralized,
            notional,
            breakdown,
            exposure,
            capital,
        });
    }
    Ok(PriceReport { times: grid, results })
}
