//! Market data, counterparty/issuer credit parameters, capital configuration,
//! and the JSON file formats the command-line tool consumes.

use crate::curve::DiscountCurve;
use crate::error::{Result, XvaError};
use crate::hullwhite::HullWhite;
use crate::swap::{Swap, SwapDirection};
use serde::{Deserialize, Serialize};

/// Rating-keyed regulatory weights, shipped as a versioned JSON data file and
/// overridable at runtime.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RatingsTable {
    pub version: u32,
    pub ratings: Vec<RatingRow>,
}

/// One rating bucket: flat CDS spread, standardized counterparty-credit risk
/// weight, standardized CVA-capital weight, and assumed recovery.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(rename_all = "camelCase", deny_unknown_fields)]
pub struct RatingRow {
    pub rating: String,
    /// Flat CDS spread (decimal per year, e.g. 0.0075 = 75 bp).
    pub spread: f64,
    /// Counterparty-credit risk weight (0.2 / 0.5 / 1.0 / 1.5).
    pub ccr_risk_weight: f64,
    /// CVA-capital weight per rating (e.g. 0.007 = 0.7%).
    pub cva_risk_weight: f64,
    /// Assumed recovery rate on counterparty default.
    #[serde(default = "default_recovery")]
    pub recovery: f64,
}

fn default_recovery() -> f64 {
    0.4
}

const BUILTIN_RATINGS: &str = include_str!("../data/ratings_v1.json");

impl RatingsTable {
    /// The table compiled into the library (version 1).
    pub fn builtin() -> Self {
        serde_json::from_str(BUILTIN_RATINGS).expect("embedded ratings table is valid")
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let table: RatingsTable = serde_json::from_str(text)
            .map_err(|e| XvaError::input(format!("ratings table: {e}")))?;
        table.validate()?;
        Ok(table)
    }

    fn validate(&self) -> Result<()> {
        if self.ratings.is_empty() {
            return Err(XvaError::input("ratings table: no rating rows"));
        }
        for r in &self.ratings {
            if !(r.spread >= 0.0) || !(r.ccr_risk_weight > 0.0) || !(r.cva_risk_weight > 0.0) {
                return Err(XvaError::input(format!(
                    "ratings table: non-positive weight or negative spread for {}",
                    r.rating
                )));
            }
            if !(0.0..1.0).contains(&r.recovery) {
                return Err(XvaError::input(format!(
                    "ratings table: recovery for {} must lie in [0, 1)",
                    r.rating
                )));
            }
        }
        Ok(())
    }

    pub fn get(&self, rating: &str) -> Result<&RatingRow> {
        self.ratings.iter().find(|r| r.rating == rating).ok_or_else(|| {
            let known: Vec<&str> = self.ratings.iter().map(|r| r.rating.as_str()).collect();
            XvaError::input(format!(
                "unknown rating {rating:?}; known ratings: {}",
                known.join(", ")
            ))
        })
    }

    /// Rating names in table order.
    pub fn names(&self) -> Vec<&str> {
        self.ratings.iter().map(|r| r.rating.as_str()).collect()
    }
}

/// Credit and regulatory parameters for one counterparty netting set.
#[derive(Debug, Clone)]
pub struct CounterpartyProfile {
    pub id: String,
    pub rating: String,
    /// Flat CDS spread (decimal per year).
    pub cds_spread: f64,
    /// Recovery rate on counterparty default.
    pub recovery: f64,
    /// Standardized counterparty-credit risk weight.
    pub ccr_weight: f64,
    /// Standardized CVA-capital weight.
    pub cva_weight: f64,
    /// If true, the counterparty is exempt from CVA capital.
    pub domicile_exempt_cva_capital: bool,
}

impl CounterpartyProfile {
    pub fn from_rating(id: impl Into<String>, row: &RatingRow) -> Self {
        CounterpartyProfile {
            id: id.into(),
            rating: row.rating.clone(),
            cds_spread: row.spread,
            recovery: row.recovery,
            ccr_weight: row.ccr_risk_weight,
            cva_weight: row.cva_risk_weight,
            domicile_exempt_cva_capital: false,
        }
    }

    /// Default intensity implied by the flat spread: `spread / (1 - recovery)`.
    pub fn hazard(&self) -> f64 {
        self.cds_spread / (1.0 - self.recovery)
    }
}

/// Funding parameters of the issuing bank.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct IssuerParams {
    /// Flat issuer spread (decimal per year).
    pub funding_spread: f64,
    /// Issuer recovery rate.
    pub recovery: f64,
    /// If true the quoted spread is the default intensity itself; otherwise it
    /// is the bond spread and the intensity is `spread / (1 - recovery)`.
    pub spread_is_lambda: bool,
    /// Spread paid on posted collateral over the risk-free rate.
    pub collateral_spread: f64,
}

impl Default for IssuerParams {
    fn default() -> Self {
        IssuerParams {
            funding_spread: 0.01,
            recovery: 0.4,
            spread_is_lambda: false,
            collateral_spread: 0.0,
        }
    }
}

impl IssuerParams {
    pub fn validate(&self) -> Result<()> {
        if !(0.0..1.0).contains(&self.recovery) {
            return Err(XvaError::input("issuer: recovery must lie in [0, 1)"));
        }
        if !(self.funding_spread >= 0.0) {
            return Err(XvaError::input("issuer: funding spread must be >= 0"));
        }
        Ok(())
    }

    /// Issuer default intensity `lambda_B`.
    pub fn hazard(&self) -> f64 {
        if self.spread_is_lambda {
            self.funding_spread
        } else {
            self.funding_spread / (1.0 - self.recovery)
        }
    }

    /// Bond spread `(1 - R_B) * lambda_B` (reproduces the input when
    /// `spread_is_lambda` is false).
    pub fn bond_spread(&self) -> f64 {
        (1.0 - self.recovery) * self.hazard()
    }
}

/// Capital-cost configuration shared by all counterparties.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct CapitalConfig {
    /// Minimum capital ratio (RWA multiplier is `12.5 * capital_ratio`).
    pub capital_ratio: f64,
    /// Return demanded on held capital per year.
    pub cost_of_capital: f64,
    /// Capital horizon in years for the CVA charge.
    pub horizon: f64,
    /// If false, the current-exposure-method EAD keeps its raw replacement
    /// cost `V + addon` without flooring `V` at zero.
    pub cem_floor: bool,
}

impl Default for CapitalConfig {
    fn default() -> Self {
        CapitalConfig {
            capital_ratio: 0.08,
            cost_of_capital: 0.10,
            horizon: 1.0,
            cem_floor: true,
        }
    }
}

impl CapitalConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.capital_ratio > 0.0) {
            return Err(XvaError::input("capital config: capital ratio must be > 0"));
        }
        if !(self.cost_of_capital >= 0.0) {
            return Err(XvaError::input("capital config: cost of capital must be >= 0"));
        }
        if !(self.horizon > 0.0) {
            return Err(XvaError::input("capital config: horizon must be > 0"));
        }
        Ok(())
    }
}

/// Parsed market input file: `{curve: [[t, zeroRate], ...], hw: {a, sigma}, seed}`.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MarketFile {
    pub curve: Vec<(f64, f64)>,
    pub hw: HwParams,
    #[serde(default = "default_seed")]
    pub seed: u64,
}

#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct HwParams {
    pub a: f64,
    pub sigma: f64,
}

fn default_seed() -> u64 {
    42
}

impl MarketFile {
    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| XvaError::input(format!("market file: {e}")))
    }

    pub fn curve(&self) -> Result<DiscountCurve> {
        DiscountCurve::new(self.curve.clone())
    }

    pub fn model(&self) -> Result<HullWhite> {
        HullWhite::new(self.hw.a, self.hw.sigma)
    }

    /// The default environment: flat curve calibrated so the 10-year
    /// semiannual par rate is exactly 2.7%, with standard model parameters.
    pub fn default_market() -> Self {
        MarketFile {
            curve: vec![(1.0, default_flat_rate())],
            hw: HwParams { a: 0.05, sigma: 0.01 },
            seed: default_seed(),
        }
    }
}

/// Continuously-compounded flat zero rate at which a semiannual fixed leg
/// pays par 2.7%: `2 ln(1.0135)`.
pub fn default_flat_rate() -> f64 {
    2.0 * 1.0135f64.ln()
}

/// One trade row of the portfolio input file.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(rename_all = "camelCase", deny_unknown_fields)]
pub struct PortfolioEntry {
    pub id: String,
    pub counterparty_id: String,
    pub notional: f64,
    pub fixed_rate: f64,
    pub maturity_years: f64,
    #[serde(default = "default_freq")]
    pub freq: u32,
    pub direction: SwapDirection,
    #[serde(default)]
    pub collateralized: bool,
    /// Optional per-counterparty rating override; falls back to the run-level
    /// rating choice when absent.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub rating: Option<String>,
}

fn default_freq() -> u32 {
    2
}

impl PortfolioEntry {
    pub fn to_swap(&self) -> Result<Swap> {
        let swap = Swap {
            notional: self.notional,
            fixed_rate: self.fixed_rate,
            start: 0.0,
            maturity: self.maturity_years,
            payments_per_year: self.freq,
            direction: self.direction,
        };
        swap.validate()?;
        Ok(swap)
    }
}

/// Parse a portfolio file: a JSON list of trade rows.
pub fn portfolio_from_json(text: &str) -> Result<Vec<PortfolioEntry>> {
    let entries: Vec<PortfolioEntry> =
        serde_json::from_str(text).map_err(|e| XvaError::input(format!("portfolio file: {e}")))?;
    if entries.is_empty() {
        return Err(XvaError::input("portfolio file: no trades"));
    }
    for e in &entries {
        e.to_swap()?;
    }
    Ok(entries)
}

/// Uniform time grid from 0 to `maturity` with `steps_per_year` points per
/// year; the final point lands exactly on `maturity`.
pub fn time_grid(maturity: f64, steps_per_year: u32) -> Result<Vec<f64>> {
    if !(maturity > 0.0) || !maturity.is_finite() {
        return Err(XvaError::input(format!(
            "time grid: maturity must be positive (got {maturity})"
        )));
    }
    if steps_per_year == 0 {
        return Err(XvaError::input("time grid: steps per year must be positive"));
    }
    let h = 1.0 / steps_per_year as f64;
    let n = (maturity / h - 1e-9).ceil().max(1.0) as usize;
    let mut grid: Vec<f64> = (0..n).map(|i| i as f64 * h).collect();
    grid.push(maturity);
    Ok(grid)
}
