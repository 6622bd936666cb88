//! Lifetime valuation adjustments for interest-rate swap portfolios.
//!
//! This crate prices the all-in cost of holding uncollateralized derivative
//! positions: counterparty credit (CVA), own default (DVA), unsecured funding
//! (FCA), collateral remuneration (COLVA), and the cost of regulatory capital
//! (KVA) split into market-risk, counterparty-default, and credit-spread
//! components. Everything is quoted as a signed adjustment to the risk-free
//! book value — costs negative, benefits positive.
//!
//! The pieces fit together as a pipeline:
//!
//! 1. [`curve`] bootstraps a deterministic discount curve from zero rates;
//!    [`hullwhite`] simulates a one-factor mean-reverting short rate exactly
//!    on a date grid, calibrated to reprice that curve.
//! 2. [`swap`] values fixed-for-floating swaps on each path from affine bond
//!    coefficients, recording floating fixings as paths cross them.
//! 3. [`exposure`] reduces pathwise netting-set values to expected-exposure
//!    profiles and regulatory exposure-at-default profiles (current exposure
//!    method, standardized method, and effective-EPE).
//! 4. [`capital`] turns exposure and trade data into a lifetime regulatory
//!    capital profile: maturity-ladder market risk, counterparty default
//!    risk, and the standardized credit-spread-volatility charge.
//! 5. [`xva`] integrates exposure and capital against survival and discount
//!    weights into the adjustment breakdown.
//! 6. [`pde`] solves the same pricing problem for a single equity-style
//!    underlying with a finite-difference scheme and cross-checks it against
//!    quadrature Monte Carlo — an independent oracle for the integration
//!    logic.
//! 7. [`scenario`] runs the packaged studies (unhedged, back-to-back hedge,
//!    rate-flattening hedge) and prices multi-counterparty portfolios.
//!
//! Simulation is deterministic: results depend only on the configuration and
//! seed, never on thread count, because each path owns a counter-based RNG
//! stream and reductions fold partial sums in a fixed chunk order.

pub mod capital;
pub mod curve;
pub mod error;
pub mod exposure;
pub mod hullwhite;
pub mod market;
pub mod math;
pub mod pde;
pub mod scenario;
pub mod swap;
pub mod xva;

pub use capital::{
    capital_profile, ccr_capital, cva_capital_std_full, cva_capital_std_large_n,
    effective_maturity_cva, effective_maturity_irb, irb_weight, market_risk_profile,
    market_risk_std, reg_maturity_discount, regulatory_cs01, regulatory_cva,
    swap_ladder_positions, BondPosition, CapitalProfile, CvaChargeEntry,
};
pub use curve::DiscountCurve;
pub use error::{Result, XvaError};
pub use exposure::{
    build_exposure, discount_stats, ead_cem, DiscountStats, NettingSet, NettingSetExposure,
};
pub use hullwhite::{HullWhite, PathSet};
pub use market::{
    default_flat_rate, portfolio_from_json, time_grid, CapitalConfig, CounterpartyProfile,
    HwParams, IssuerParams, MarketFile, PortfolioEntry, RatingRow, RatingsTable,
};
pub use pde::{
    black_scholes_call, cross_check, solve as solve_pde, CapitalRule, CollateralRule, CrossCheck,
    PdeProblem, PdeSolution,
};
pub use scenario::{
    price_portfolio, run_scenario, CounterpartyResult, PriceReport, PriceRequest, ScenarioKind,
    ScenarioRequest, ScenarioRow, ScenarioTable, CURVE_BUMP,
};
pub use swap::{par_rate, Swap, SwapDirection, SwapPricer};
pub use xva::{integrate_xva, XvaBreakdown};
