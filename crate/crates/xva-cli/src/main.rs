//! Command-line front end for the `xva` pricing library.
//!
//! Four subcommands cover the library surface:
//!
//! * `price`     — per-counterparty valuation adjustments for a portfolio.
//! * `scenario`  — the standard single-trade scenario tables (naked,
//!   back-to-back, rate-flattened hedge).
//! * `pde-check` — cross-validation of the finite-difference engine against
//!   quadrature over simulated exposures.
//! * `capital`   — standalone regulatory-capital profiles per counterparty.
//!
//! Exit codes: 0 success, 2 configuration error (bad flags, unreadable or
//! invalid input files), 3 numerical failure. Runs are deterministic: the
//! same configuration and seed produce byte-identical output. The
//! `XVA_THREADS` environment variable caps the worker count.

use std::fmt::Write as _;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use xva::{
    cross_check, solve_pde, CapitalConfig, CapitalRule, IssuerParams, MarketFile, PdeProblem,
    PriceRequest, RatingsTable, ScenarioKind, ScenarioRequest, XvaError,
};

#[derive(Parser)]
#[command(
    name = "xva",
    version,
    about = "Valuation adjustments (CVA, DVA, FCA, COLVA, KVA) for interest-rate swap portfolios"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Price a portfolio: one row of adjustments per counterparty, plus totals.
    Price(PriceArgs),
    /// Emit a scenario table sweeping direction and rating for one trade.
    Scenario(ScenarioArgs),
    /// Cross-validate the finite-difference engine against quadrature.
    PdeCheck(PdeCheckArgs),
    /// Emit regulatory-capital profiles per counterparty.
    Capital(CapitalArgs),
}

/// Flags shared by every simulation-backed subcommand.
#[derive(Args)]
struct EngineArgs {
    /// Market file (JSON: curve pillars, short-rate model, seed). Defaults
    /// to the documented flat market when omitted.
    #[arg(long, value_name = "FILE")]
    market: Option<PathBuf>,

    /// Rating table override (JSON). Defaults to the built-in four-bucket
    /// table.
    #[arg(long, value_name = "FILE")]
    ratings: Option<PathBuf>,

    /// Monte Carlo path count.
    #[arg(long, default_value_t = 10_000)]
    paths: usize,

    /// Simulation grid step in months (must divide 12).
    #[arg(long, default_value_t = 1, value_name = "MONTHS")]
    grid_months: u32,

    /// RNG seed override (defaults to the market file's seed).
    #[arg(long)]
    seed: Option<u64>,

    /// Worker threads (capped by XVA_THREADS; defaults to the smaller of 8
    /// and the machine's parallelism).
    #[arg(long)]
    threads: Option<usize>,

    /// Issuer funding spread (continuously compounded, per year).
    #[arg(long, default_value_t = 0.01)]
    funding_spread: f64,

    /// Issuer recovery rate.
    #[arg(long, default_value_t = 0.4)]
    issuer_recovery: f64,

    /// Treat the funding spread directly as the issuer hazard rate.
    #[arg(long)]
    spread_is_lambda: bool,

    /// Spread earned/paid on posted collateral balances, per year.
    #[arg(long, default_value_t = 0.0)]
    collateral_spread: f64,

    /// Cost of capital gamma_K, per year.
    #[arg(long, default_value_t = 0.10)]
    gamma_k: f64,

    /// Capital ratio applied to risk-weighted assets.
    #[arg(long, default_value_t = 0.08)]
    capital_ratio: f64,

    /// Capital horizon in years.
    #[arg(long, default_value_t = 1.0)]
    horizon: f64,

    /// Drop the floor that keeps the current-exposure EAD nonnegative.
    #[arg(long)]
    no_cem_floor: bool,

    /// Write output to this file instead of stdout.
    #[arg(long, value_name = "FILE")]
    output: Option<PathBuf>,
}

#[derive(Args)]
struct PriceArgs {
    #[command(flatten)]
    engine: EngineArgs,

    /// Portfolio file (JSON array of trades).
    #[arg(long, value_name = "FILE")]
    portfolio: PathBuf,

    /// Fraction of capital treated as usable funding collateral.
    #[arg(long, default_value_t = 0.0)]
    phi: f64,

    /// Rating for counterparties whose trades don't carry one.
    #[arg(long, value_name = "RATING")]
    default_rating: Option<String>,

    /// Also write per-counterparty exposure profiles to this CSV file.
    #[arg(long, value_name = "FILE")]
    exposure_out: Option<PathBuf>,
}

#[derive(Args)]
struct ScenarioArgs {
    #[command(flatten)]
    engine: EngineArgs,

    /// Scenario kind: naked, backToBack, or ir01Flat.
    #[arg(long = "scenario", default_value = "naked", value_name = "KIND")]
    kind: String,

    /// Comma-separated capital-as-collateral fractions, each in [0, 1].
    #[arg(long, default_value = "0,0.5,1", value_name = "LIST")]
    phi: String,

    /// Client trade notional.
    #[arg(long, default_value_t = 100.0)]
    notional: f64,

    /// Client trade fixed rate.
    #[arg(long, default_value_t = 0.027)]
    coupon: f64,

    /// Client trade maturity in years.
    #[arg(long, default_value_t = 10.0)]
    maturity: f64,

    /// Fixed/floating payment frequency per year (1, 2, 4, or 12).
    #[arg(long, default_value_t = 2)]
    freq: u32,
}

#[derive(Args)]
struct PdeCheckArgs {
    /// Comma-separated capital-as-collateral fractions to test.
    #[arg(long, default_value = "0,1", value_name = "LIST")]
    phi: String,

    /// Quadrature path count.
    #[arg(long, default_value_t = 40_000)]
    paths: usize,

    /// Use every n-th finite-difference time step in the quadrature.
    #[arg(long, default_value_t = 4)]
    stride: usize,

    /// RNG seed for the quadrature sampler.
    #[arg(long, default_value_t = 42)]
    seed: u64,

    /// Write the report to this file instead of stdout.
    #[arg(long, value_name = "FILE")]
    output: Option<PathBuf>,
}

#[derive(Args)]
struct CapitalArgs {
    #[command(flatten)]
    engine: EngineArgs,

    /// Portfolio file (JSON array of trades).
    #[arg(long, value_name = "FILE")]
    portfolio: PathBuf,

    /// Rating for counterparties whose trades don't carry one.
    #[arg(long, value_name = "RATING")]
    default_rating: Option<String>,
}

/// A failed run, split by exit code: configuration problems exit 2,
/// numerical problems exit 3.
enum Failure {
    Config(String),
    Numerical(String),
}

impl From<XvaError> for Failure {
    fn from(e: XvaError) -> Self {
        match e {
            XvaError::InvalidInput(msg) => Failure::Config(msg),
            XvaError::Numerical(msg) => Failure::Numerical(msg),
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Price(args) => run_price(args),
        Command::Scenario(args) => run_scenario_cmd(args),
        Command::PdeCheck(args) => run_pde_check(args),
        Command::Capital(args) => run_capital(args),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Config(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
        Err(Failure::Numerical(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(3)
        }
    }
}

// ---------------------------------------------------------------------------
// Shared plumbing
// ---------------------------------------------------------------------------

fn read_file(path: &std::path::Path) -> Result<String, Failure> {
    std::fs::read_to_string(path).map_err(|e| {
        Failure::Config(format!("cannot read {}: {e}", path.display()))
    })
}

fn write_output(text: &str, path: Option<&std::path::Path>) -> Result<(), Failure> {
    match path {
        Some(p) => std::fs::write(p, text).map_err(|e| {
            Failure::Config(format!("cannot write {}: {e}", p.display()))
        }),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

/// Resolve the worker count: explicit flag, else min(8, machine parallelism),
/// then capped by the XVA_THREADS environment variable when it is set.
fn resolve_threads(requested: Option<usize>) -> Result<usize, Failure> {
    let base = match requested {
        Some(0) => {
            return Err(Failure::Config("--threads must be at least 1".into()));
        }
        Some(n) => n,
        None => std::thread::available_parallelism()
            .map(|n| n.get())
            .unwrap_or(1)
            .min(8),
    };
    let capped = match std::env::var("XVA_THREADS") {
        Ok(raw) => {
            let cap: usize = raw.trim().parse().map_err(|_| {
                Failure::Config(format!(
                    "XVA_THREADS must be a positive integer, got {raw:?}"
                ))
            })?;
            if cap == 0 {
                return Err(Failure::Config(
                    "XVA_THREADS must be a positive integer, got \"0\"".into(),
                ));
            }
            base.min(cap)
        }
        Err(_) => base,
    };
    Ok(capped.max(1))
}

fn parse_phi_list(raw: &str) -> Result<Vec<f64>, Failure> {
    let mut out = Vec::new();
    for piece in raw.split(',') {
        let piece = piece.trim();
        let value: f64 = piece.parse().map_err(|_| {
            Failure::Config(format!("invalid phi value {piece:?} in list {raw:?}"))
        })?;
        out.push(value);
    }
    if out.is_empty() {
        return Err(Failure::Config("phi list is empty".into()));
    }
    Ok(out)
}

struct EngineSetup {
    market: MarketFile,
    table: RatingsTable,
    steps_per_year: u32,
    threads: usize,
    issuer: IssuerParams,
    capital: CapitalConfig,
}

fn build_engine(args: &EngineArgs) -> Result<EngineSetup, Failure> {
    let market = match &args.market {
        Some(path) => {
            let mut m = MarketFile::from_json(&read_file(path)?)?;
            if let Some(seed) = args.seed {
                m.seed = seed;
            }
            m
        }
        None => {
            let mut m = MarketFile::default_market();
            if let Some(seed) = args.seed {
                m.seed = seed;
            }
            m
        }
    };
    let table = match &args.ratings {
        Some(path) => RatingsTable::from_json(&read_file(path)?)?,
        None => RatingsTable::builtin(),
    };
    if args.grid_months == 0 || args.grid_months > 12 || 12 % args.grid_months != 0 {
        return Err(Failure::Config(format!(
            "--grid-months must be one of 1, 2, 3, 4, 6, 12; got {}",
            args.grid_months
        )));
    }
    let issuer = IssuerParams {
        funding_spread: args.funding_spread,
        recovery: args.issuer_recovery,
        spread_is_lambda: args.spread_is_lambda,
        collateral_spread: args.collateral_spread,
    };
    issuer.validate()?;
    let capital = CapitalConfig {
        capital_ratio: args.capital_ratio,
        cost_of_capital: args.gamma_k,
        horizon: args.horizon,
        cem_floor: !args.no_cem_floor,
    };
    capital.validate()?;
    Ok(EngineSetup {
        market,
        table,
        steps_per_year: 12 / args.grid_months,
        threads: resolve_threads(args.threads)?,
        issuer,
        capital,
    })
}

// ---------------------------------------------------------------------------
// price
// ---------------------------------------------------------------------------

fn run_price(args: PriceArgs) -> Result<(), Failure> {
    let setup = build_engine(&args.engine)?;
    let entries = xva::portfolio_from_json(&read_file(&args.portfolio)?)?;
    if args.engine.paths == 0 {
        return Err(Failure::Config("--paths must be at least 1".into()));
    }

    let mut request = PriceRequest::new(entries);
    request.table = setup.table;
    request.market = setup.market;
    request.default_rating = args.default_rating.clone();
    request.phi = args.phi;
    request.n_paths = args.engine.paths;
    request.steps_per_year = setup.steps_per_year;
    request.threads = setup.threads;
    request.issuer = setup.issuer;
    request.capital = setup.capital;

    let report = xva::price_portfolio(&request)?;

    let mut csv = String::from(
        "counterparty,rating,collateralized,notional,cva_bp,dva_bp,fca_bp,colva_bp,\
         kva_mr_bp,kva_ccr_bp,kva_cva_bp,total_bp\n",
    );
    let mut push_row = |name: &str,
                        rating: &str,
                        collateralized: &str,
                        notional: f64,
                        b: &xva::XvaBreakdown| {
        let bp = 1e4 / notional;
        let _ = writeln!(
            csv,
            "{name},{rating},{collateralized},{notional:.6},{:.6},{:.6},{:.6},{:.6},{:.6},{:.6},{:.6},{:.6}",
            b.cva * bp,
            b.dva * bp,
            b.fca_prime * bp,
            b.colva * bp,
            b.kva_mr * bp,
            b.kva_ccr * bp,
            b.kva_cva * bp,
            b.total() * bp,
        );
    };
    let mut total_notional = 0.0;
    for r in &report.results {
        push_row(
            &r.id,
            &r.rating,
            if r.collateralized { "yes" } else { "no" },
            r.notional,
            &r.breakdown,
        );
        total_notional += r.notional;
    }
    push_row("TOTAL", "-", "-", total_notional, &report.totals());
    write_output(&csv, args.engine.output.as_deref())?;

    if let Some(path) = &args.exposure_out {
        let mut profile = String::from(
            "counterparty,time,epe,ene,eadCEM,eadStd,eadIMM,se_epe,se_ene,se_eadCEM,se_eadStd\n",
        );
        for r in &report.results {
            let e = &r.exposure;
            for (i, &t) in e.times.iter().enumerate() {
                let _ = writeln!(
                    profile,
                    "{},{t:.6},{:.6},{:.6},{:.6},{:.6},{:.6},{:.6},{:.6},{:.6},{:.6}",
                    r.id,
                    e.epe_d[i],
                    e.ene_d[i],
                    e.ead_cem[i],
                    e.ead_std[i],
                    e.ead_imm[i],
                    e.se_epe_d[i],
                    e.se_ene_d[i],
                    e.se_ead_cem[i],
                    e.se_ead_std[i],
                );
            }
        }
        std::fs::write(path, profile).map_err(|e| {
            Failure::Config(format!("cannot write {}: {e}", path.display()))
        })?;
    }
    Ok(())
}

// ---------------------------------------------------------------------------
// scenario
// ---------------------------------------------------------------------------

fn run_scenario_cmd(args: ScenarioArgs) -> Result<(), Failure> {
    let setup = build_engine(&args.engine)?;
    let kind = ScenarioKind::parse(&args.kind)?;
    if args.engine.paths < 1000 {
        return Err(Failure::Config(format!(
            "scenario tables need --paths of at least 1000, got {}",
            args.engine.paths
        )));
    }

    let mut request = ScenarioRequest::new(kind);
    request.swap.notional = args.notional;
    request.swap.fixed_rate = args.coupon;
    request.swap.maturity = args.maturity;
    request.swap.payments_per_year = args.freq;
    request.phis = parse_phi_list(&args.phi)?;
    request.ratings = setup.table.names().iter().map(|s| s.to_string()).collect();
    request.table = setup.table;
    request.market = setup.market;
    request.n_paths = args.engine.paths;
    request.steps_per_year = setup.steps_per_year;
    request.threads = setup.threads;
    request.issuer = setup.issuer;
    request.capital = setup.capital;

    let table = xva::run_scenario(&request)?;
    write_output(&table.to_csv(), args.engine.output.as_deref())
}

// ---------------------------------------------------------------------------
// pde-check
// ---------------------------------------------------------------------------

fn run_pde_check(args: PdeCheckArgs) -> Result<(), Failure> {
    let phis = parse_phi_list(&args.phi)?;

    // Fixed benchmark: 5y at-the-money call, 25% vol, 2% rates, 1% default
    // intensities on both names, 40% recoveries, constant capital at 2% of
    // notional, 10% cost of capital.
    let mut report = String::from(
        "phi,u_pde,u_quadrature,u_se,clean_pde,clean_quadrature,clean_se,verdict\n",
    );
    let mut worst: Option<String> = None;
    for &phi in &phis {
        let mut problem = PdeProblem::european_call(100.0, 100.0, 5.0, 0.25, 0.02, 201, 200);
        problem.lambda_b = 0.01;
        problem.lambda_c = 0.01;
        problem.recovery_b = 0.4;
        problem.recovery_c = 0.4;
        problem.cost_of_capital = 0.10;
        problem.capital = CapitalRule::Constant(2.0);
        problem.phi = phi;
        let solution = solve_pde(&problem)?;
        let check = cross_check(&problem, &solution, args.paths, args.stride, args.seed)?;
        let gap = (check.u_quadrature - check.u_pde).abs();
        let tolerance = (1e-3 * check.u_pde.abs()).max(3.0 * check.u_se);
        let ok = gap <= tolerance;
        let _ = writeln!(
            report,
            "{},{:.6},{:.6},{:.6},{:.6},{:.6},{:.6},{}",
            fmt_phi(phi),
            check.u_pde,
            check.u_quadrature,
            check.u_se,
            check.clean_pde,
            check.clean_quadrature,
            check.clean_se,
            if ok { "ok" } else { "FAIL" },
        );
        if !ok && worst.is_none() {
            worst = Some(format!(
                "pde: cross-check disagrees at phi={}: |{:.6e} - {:.6e}| = {gap:.3e} \
                 exceeds max(1e-3 rel, 3 se) = {tolerance:.3e}",
                fmt_phi(phi),
                check.u_pde,
                check.u_quadrature,
            ));
        }
    }
    write_output(&report, args.output.as_deref())?;
    match worst {
        Some(msg) => Err(Failure::Numerical(msg)),
        None => Ok(()),
    }
}

/// Shortest-round-trip float formatting: 0, 0.5, 1 rather than 0.000000.
fn fmt_phi(phi: f64) -> String {
    format!("{phi}")
}

// ---------------------------------------------------------------------------
// capital
// ---------------------------------------------------------------------------

fn run_capital(args: CapitalArgs) -> Result<(), Failure> {
    let setup = build_engine(&args.engine)?;
    let entries = xva::portfolio_from_json(&read_file(&args.portfolio)?)?;
    if args.engine.paths == 0 {
        return Err(Failure::Config("--paths must be at least 1".into()));
    }

    let mut request = PriceRequest::new(entries);
    request.table = setup.table;
    request.market = setup.market;
    request.default_rating = args.default_rating.clone();
    request.n_paths = args.engine.paths;
    request.steps_per_year = setup.steps_per_year;
    request.threads = setup.threads;
    request.issuer = setup.issuer;
    request.capital = setup.capital;

    let report = xva::price_portfolio(&request)?;

    let mut csv = String::from("counterparty,time_years,k_mr,k_ccr,k_cva,k_total\n");
    for r in &report.results {
        let k = &r.capital;
        for (i, &t) in k.times.iter().enumerate() {
            let _ = writeln!(
                csv,
                "{},{t:.6},{:.6},{:.6},{:.6},{:.6}",
                r.id,
                k.k_mr[i],
                k.k_ccr[i],
                k.k_cva[i],
                k.k_total(i),
            );
        }
    }
    write_output(&csv, args.engine.output.as_deref())
}
