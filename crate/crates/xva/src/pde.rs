//! Finite-difference verification engine on an equity underlying.
//!
//! Solves the augmented backward PDE for the adjusted value `Vhat` of a
//! European claim when both parties can default, funding is raised through
//! issued bonds, collateral earns a spread, and regulatory capital is held
//! at a cost but may partly fund the position:
//!
//! ```text
//! 0 = dVhat/dt + 1/2 sigma^2 S^2 d2Vhat/dS2 - (gamma_S - q_S) S dVhat/dS
//!     - (r + lambda_B + lambda_C) Vhat
//!     + g_C lambda_C + g_B lambda_B - eps_h lambda_B
//!     - s_X X - gamma_K K + r phi K
//! ```
//!
//! with terminal condition `Vhat(T, S) = H(S)`. The close-outs are the
//! standard bilateral forms `g_B = (V-X)^+ + R_B (V-X)^- + X` and
//! `g_C = R_C (V-X)^+ + (V-X)^- + X`, and the issuer-default hedge error of
//! the no-shortfall funding strategy is `eps_h = (1-R_B) ((V-X)^+ - phi K)`.
//!
//! The clean value `V` (plain Black-Scholes discounting, no sources) is
//! solved first on the same grid; the adjustment is `U = Vhat - V`. A
//! Monte Carlo quadrature of the equivalent expectation integrals over
//! simulated equity paths ([`cross_check`]) provides an independent value
//! of `U` with a standard error, closing the loop between the two engines.
//!
//! Scheme: Crank-Nicolson (theta = 1/2) on a uniform grid in `x = ln S`
//! with two fully implicit startup steps to damp the payoff kink, central
//! differences inside, and linear-value boundaries (`d2Vhat/dS2 = 0`) at
//! both edges. The spot always sits exactly on a grid node so values are
//! read off without interpolation error.

use crate::error::{Result, XvaError};
use crate::math::{mean_and_se, trapezoid};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

/// Regulatory capital as a pluggable rule `K(t, V, dV/dS)`.
#[derive(Debug, Clone, Copy)]
pub enum CapitalRule {
    /// No capital held.
    Zero,
    /// A fixed capital amount, independent of the trade state.
    Constant(f64),
    /// Capital proportional to the positive clean value, `K = scale * V^+`
    /// (the shape of a risk-weighted exposure charge).
    ScaledPositiveValue(f64),
}

impl CapitalRule {
    fn evaluate(&self, _t: f64, value: f64, _dv_ds: f64) -> f64 {
        match *self {
            CapitalRule::Zero => 0.0,
            CapitalRule::Constant(k0) => k0,
            CapitalRule::ScaledPositiveValue(scale) => scale * value.max(0.0),
        }
    }
}

/// Collateral account rule.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CollateralRule {
    /// Uncollateralized: X = 0.
    Zero,
    /// Perfect continuous collateralization: X tracks the clean value.
    TrackValue,
}

impl CollateralRule {
    fn evaluate(&self, value: f64) -> f64 {
        match self {
            CollateralRule::Zero => 0.0,
            CollateralRule::TrackValue => value,
        }
    }
}

/// Full problem description for one solve.
pub struct PdeProblem {
    /// Terminal payoff H(S).
    pub payoff: Box<dyn Fn(f64) -> f64 + Send + Sync>,
    pub spot: f64,
    pub maturity: f64,
    /// Lognormal volatility of the underlying.
    pub sigma: f64,
    /// Risk-free short rate r.
    pub rate: f64,
    /// Stock repo rate q_S (risk-neutral drift is q_S - dividend_yield).
    pub repo_rate: f64,
    /// Stock dividend yield gamma_S.
    pub dividend_yield: f64,
    /// Issuer default intensity lambda_B.
    pub lambda_b: f64,
    /// Counterparty default intensity lambda_C.
    pub lambda_c: f64,
    pub recovery_b: f64,
    pub recovery_c: f64,
    /// Fraction of capital usable as funding, phi in [0, 1].
    pub phi: f64,
    /// Cost of capital gamma_K.
    pub cost_of_capital: f64,
    /// Spread s_X paid on the collateral balance.
    pub collateral_spread: f64,
    pub capital: CapitalRule,
    pub collateral: CollateralRule,
    /// Number of spatial nodes (>= 3).
    pub n_space: usize,
    /// Number of time steps (>= 1).
    pub n_time: usize,
    /// Half-width of the log-space grid in units of sigma * sqrt(T).
    pub width_stds: f64,
}

impl PdeProblem {
    /// Problem with every credit/funding/capital feature switched off; set
    /// the public fields to enable them.
    pub fn new(
        payoff: Box<dyn Fn(f64) -> f64 + Send + Sync>,
        spot: f64,
        maturity: f64,
        sigma: f64,
        rate: f64,
        n_space: usize,
        n_time: usize,
    ) -> Self {
        PdeProblem {
            payoff,
            spot,
            maturity,
            sigma,
            rate,
            repo_rate: rate,
            dividend_yield: 0.0,
            lambda_b: 0.0,
            lambda_c: 0.0,
            recovery_b: 0.4,
            recovery_c: 0.4,
            phi: 0.0,
            cost_of_capital: 0.0,
            collateral_spread: 0.0,
            capital: CapitalRule::Zero,
            collateral: CollateralRule::Zero,
            n_space,
            n_time,
            width_stds: 6.0,
        }
    }

    pub fn european_call(
        spot: f64,
        strike: f64,
        maturity: f64,
        sigma: f64,
        rate: f64,
        n_space: usize,
        n_time: usize,
    ) -> Self {
        Self::new(
            Box::new(move |s| (s - strike).max(0.0)),
            spot,
            maturity,
            sigma,
            rate,
            n_space,
            n_time,
        )
    }

    fn validate(&self) -> Result<()> {
        if !(self.spot > 0.0 && self.spot.is_finite()) {
            return Err(XvaError::input("pde: spot must be positive"));
        }
        if !(self.maturity > 0.0 && self.maturity.is_finite()) {
            return Err(XvaError::input("pde: maturity must be positive"));
        }
        if !(self.sigma > 0.0 && self.sigma.is_finite()) {
            return Err(XvaError::input("pde: sigma must be positive"));
        }
        if self.n_space < 3 {
            return Err(XvaError::input("pde: need at least 3 spatial nodes"));
        }
        if self.n_time < 1 {
            return Err(XvaError::input("pde: need at least 1 time step"));
        }
        if !(self.width_stds > 0.0) {
            return Err(XvaError::input("pde: grid width must be positive"));
        }
        for (name, v) in [
            ("recoveryB", self.recovery_b),
            ("recoveryC", self.recovery_c),
            ("phi", self.phi),
        ] {
            if !(0.0..=1.0).contains(&v) {
                return Err(XvaError::input(format!("pde: {name} must lie in [0, 1]")));
            }
        }
        for (name, v) in [
            ("lambdaB", self.lambda_b),
            ("lambdaC", self.lambda_c),
        ] {
            if !(v >= 0.0 && v.is_finite()) {
                return Err(XvaError::input(format!("pde: {name} must be non-negative")));
            }
        }
        for (name, v) in [
            ("rate", self.rate),
            ("repoRate", self.repo_rate),
            ("dividendYield", self.dividend_yield),
            ("costOfCapital", self.cost_of_capital),
            ("collateralSpread", self.collateral_spread),
        ] {
            if !v.is_finite() {
                return Err(XvaError::input(format!("pde: {name} must be finite")));
            }
        }
        Ok(())
    }

    /// Risk-neutral drift of ln S.
    fn log_drift(&self) -> f64 {
        self.repo_rate - self.dividend_yield - 0.5 * self.sigma * self.sigma
    }
}

/// Grids at valuation time plus the stored clean-value surface used by the
/// Monte Carlo cross-check.
pub struct PdeSolution {
    /// Spatial nodes in S.
    pub s: Vec<f64>,
    /// Time levels from 0 to maturity.
    pub times: Vec<f64>,
    /// Clean value at time 0.
    pub v: Vec<f64>,
    /// Adjusted value at time 0.
    pub v_hat: Vec<f64>,
    /// Adjustment U = Vhat - V at time 0.
    pub u: Vec<f64>,
    /// Index of the node that sits exactly at the spot.
    pub spot_index: usize,
    x0: f64,
    dx: f64,
    /// Clean values on all time levels, level-major.
    v_levels: Vec<f64>,
}

impl PdeSolution {
    pub fn clean_at_spot(&self) -> f64 {
        self.v[self.spot_index]
    }

    pub fn adjusted_at_spot(&self) -> f64 {
        self.v_hat[self.spot_index]
    }

    pub fn adjustment_at_spot(&self) -> f64 {
        self.u[self.spot_index]
    }

    fn n_space(&self) -> usize {
        self.s.len()
    }

    fn clean_level(&self, level: usize) -> &[f64] {
        let n = self.n_space();
        &self.v_levels[level * n..(level + 1) * n]
    }

    /// Clean value and an S-delta estimate at log-coordinate `x` on a stored
    /// time level, by linear interpolation.
    fn interp_clean(&self, level: usize, x: f64) -> (f64, f64) {
        let vals = self.clean_level(level);
        let n = self.n_space();
        let pos = (x - self.x0) / self.dx;
        let i = (pos.floor() as isize).clamp(0, n as isize - 2) as usize;
        let w = (pos - i as f64).clamp(0.0, 1.0);
        let v = vals[i] * (1.0 - w) + vals[i + 1] * w;
        let dv_ds = (vals[i + 1] - vals[i]) / self.dx / x.exp();
        (v, dv_ds)
    }
}

/// Tridiagonal operator `A` (lower/diag/upper bands) for the spatial part of
/// the PDE, including the discount term.
struct Operator {
    lower: Vec<f64>,
    diag: Vec<f64>,
    upper: Vec<f64>,
}

impl Operator {
    /// Build the log-space operator with discount rate `rho`. Boundary rows
    /// impose zero second derivative in S (value linear in S), which in log
    /// space leaves only the drift term with a one-sided difference.
    fn build(problem: &PdeProblem, dx: f64, rho: f64, n: usize) -> Operator {
        let sigma2 = problem.sigma * problem.sigma;
        let nu = problem.log_drift();
        let carry = problem.repo_rate - problem.dividend_yield;
        let mut lower = vec![0.0; n];
        let mut diag = vec![0.0; n];
        let mut upper = vec![0.0; n];
        for i in 1..n - 1 {
            lower[i] = 0.5 * sigma2 / (dx * dx) - nu / (2.0 * dx);
            diag[i] = -sigma2 / (dx * dx) - rho;
            upper[i] = 0.5 * sigma2 / (dx * dx) + nu / (2.0 * dx);
        }
        diag[0] = -carry / dx - rho;
        upper[0] = carry / dx;
        lower[n - 1] = -carry / dx;
        diag[n - 1] = carry / dx - rho;
        Operator { lower, diag, upper }
    }

    fn apply(&self, v: &[f64], out: &mut [f64]) {
        let n = v.len();
        out[0] = self.diag[0] * v[0] + self.upper[0] * v[1];
        for i in 1..n - 1 {
            out[i] = self.lower[i] * v[i - 1] + self.diag[i] * v[i] + self.upper[i] * v[i + 1];
        }
        out[n - 1] = self.lower[n - 1] * v[n - 2] + self.diag[n - 1] * v[n - 1];
    }
}

/// Solve `(I - theta dt A) x = rhs` with the Thomas algorithm.
fn solve_step(
    op: &Operator,
    theta_dt: f64,
    rhs: &[f64],
    scratch_c: &mut [f64],
    scratch_d: &mut [f64],
    out: &mut [f64],
) -> Result<()> {
    let n = rhs.len();
    let a = |i: usize| -theta_dt * op.lower[i];
    let b = |i: usize| 1.0 - theta_dt * op.diag[i];
    let c = |i: usize| -theta_dt * op.upper[i];

    let mut beta = b(0);
    if beta.abs() < 1e-300 {
        return Err(XvaError::numerical("pde: singular tridiagonal system"));
    }
    scratch_c[0] = c(0) / beta;
    scratch_d[0] = rhs[0] / beta;
    for i in 1..n {
        beta = b(i) - a(i) * scratch_c[i - 1];
        if beta.abs() < 1e-300 {
            return Err(XvaError::numerical("pde: singular tridiagonal system"));
        }
        scratch_c[i] = if i + 1 < n { c(i) / beta } else { 0.0 };
        scratch_d[i] = (rhs[i] - a(i) * scratch_d[i - 1]) / beta;
    }
    out[n - 1] = scratch_d[n - 1];
    for i in (0..n - 1).rev() {
        out[i] = scratch_d[i] - scratch_c[i] * out[i + 1];
    }
    Ok(())
}

const PICARD_TOL: f64 = 1e-10;
const PICARD_MAX_SWEEPS: usize = 20;

/// Number of fully implicit startup steps damping the payoff kink before
/// Crank-Nicolson takes over.
const STARTUP_IMPLICIT_STEPS: usize = 2;

pub fn solve(problem: &PdeProblem) -> Result<PdeSolution> {
    problem.validate()?;
    let n = problem.n_space;
    let m = problem.n_time;
    let t_mat = problem.maturity;
    let dt = t_mat / m as f64;
    let x0 = problem.spot.ln();

    // Uniform log-space grid containing the spot exactly; wide enough to
    // cover both diffusion and drift over the full horizon.
    let half_width = problem.width_stds * problem.sigma * t_mat.sqrt()
        + problem.log_drift().abs() * t_mat;
    let dx = 2.0 * half_width / (n - 1) as f64;
    let spot_index = (n - 1) / 2;
    let x_grid: Vec<f64> = (0..n).map(|i| x0 + (i as f64 - spot_index as f64) * dx).collect();
    let s_grid: Vec<f64> = x_grid.iter().map(|x| x.exp()).collect();
    let times: Vec<f64> = (0..=m).map(|j| t_mat * j as f64 / m as f64).collect();

    let terminal: Vec<f64> = s_grid.iter().map(|&s| (problem.payoff)(s)).collect();
    if terminal.iter().any(|v| !v.is_finite()) {
        return Err(XvaError::input("pde: payoff must be finite on the grid"));
    }

    // First sweep: clean value, discounted at r, no sources; every level is
    // stored because the sources of the second sweep and the Monte Carlo
    // cross-check both read it.
    let op_clean = Operator::build(problem, dx, problem.rate, n);
    let mut v_levels = vec![0.0; (m + 1) * n];
    v_levels[m * n..].copy_from_slice(&terminal);
    {
        let mut rhs = vec![0.0; n];
        let mut sc = vec![0.0; n];
        let mut sd = vec![0.0; n];
        let mut out = vec![0.0; n];
        for j in (0..m).rev() {
            let steps_done = m - 1 - j;
            let theta = if steps_done < STARTUP_IMPLICIT_STEPS { 1.0 } else { 0.5 };
            let (head, tail) = v_levels.split_at_mut((j + 1) * n);
            let known = &tail[..n];
            op_clean.apply(known, &mut rhs);
            for i in 0..n {
                rhs[i] = known[i] + (1.0 - theta) * dt * rhs[i];
            }
            solve_step(&op_clean, theta * dt, &rhs, &mut sc, &mut sd, &mut out)?;
            head[j * n..(j + 1) * n].copy_from_slice(&out);
        }
    }

    // Source of the adjusted-value equation at one node, from the clean value.
    let lgd_b = 1.0 - problem.recovery_b;
    let source_at = |t: f64, v: f64, dv_ds: f64| -> f64 {
        let x = problem.collateral.evaluate(v);
        let vmx = v - x;
        let g_b = vmx.max(0.0) + problem.recovery_b * vmx.min(0.0) + x;
        let g_c = problem.recovery_c * vmx.max(0.0) + vmx.min(0.0) + x;
        let k = problem.capital.evaluate(t, v, dv_ds);
        let eps_h = lgd_b * (vmx.max(0.0) - problem.phi * k);
        g_c * problem.lambda_c + g_b * problem.lambda_b - eps_h * problem.lambda_b
            - problem.collateral_spread * x
            - problem.cost_of_capital * k
            + problem.rate * problem.phi * k
    };
    let source_level = |j: usize, out: &mut [f64]| {
        let vals = &v_levels[j * n..(j + 1) * n];
        let t = times[j];
        for i in 0..n {
            let dv_dx = if i == 0 {
                (vals[1] - vals[0]) / dx
            } else if i == n - 1 {
                (vals[n - 1] - vals[n - 2]) / dx
            } else {
                (vals[i + 1] - vals[i - 1]) / (2.0 * dx)
            };
            out[i] = source_at(t, vals[i], dv_dx / s_grid[i]);
        }
    };

    // Second sweep: adjusted value, discounted at r + lambda_B + lambda_C,
    // with the close-out/funding/capital sources. The sources depend on the
    // stored clean value, so the per-step iteration converges immediately;
    // the loop guards pluggable rules whose sources might feed back.
    let rho_hat = problem.rate + problem.lambda_b + problem.lambda_c;
    let op_hat = Operator::build(problem, dx, rho_hat, n);
    let mut v_hat = terminal.clone();
    {
        let mut applied = vec![0.0; n];
        let mut rhs = vec![0.0; n];
        let mut sc = vec![0.0; n];
        let mut sd = vec![0.0; n];
        let mut next = vec![0.0; n];
        let mut src_known = vec![0.0; n];
        let mut src_unknown = vec![0.0; n];
        for j in (0..m).rev() {
            let steps_done = m - 1 - j;
            let theta = if steps_done < STARTUP_IMPLICIT_STEPS { 1.0 } else { 0.5 };
            op_hat.apply(&v_hat, &mut applied);
            source_level(j + 1, &mut src_known);
            let mut current = v_hat.clone();
            let mut converged = false;
            for _ in 0..PICARD_MAX_SWEEPS {
                source_level(j, &mut src_unknown);
                for i in 0..n {
                    rhs[i] = v_hat[i]
                        + (1.0 - theta) * dt * (applied[i] + src_known[i])
                        + theta * dt * src_unknown[i];
                }
                solve_step(&op_hat, theta * dt, &rhs, &mut sc, &mut sd, &mut next)?;
                let diff = current
                    .iter()
                    .zip(&next)
                    .map(|(a, b)| (a - b).abs())
                    .fold(0.0_f64, f64::max);
                current.copy_from_slice(&next);
                if diff <= PICARD_TOL {
                    converged = true;
                    break;
                }
            }
            if !converged {
                return Err(XvaError::numerical(
                    "pde: source iteration did not converge",
                ));
            }
            v_hat.copy_from_slice(&current);
        }
    }

    let v0 = v_levels[..n].to_vec();
    let u: Vec<f64> = v_hat.iter().zip(&v0).map(|(vh, v)| vh - v).collect();
    Ok(PdeSolution {
        s: s_grid,
        times,
        v: v0,
        v_hat,
        u,
        spot_index,
        x0: x_grid[0],
        dx,
        v_levels,
    })
}

/// Monte Carlo quadrature of the adjustment integrals on simulated equity
/// paths, reading the clean value off the stored PDE surface.
#[derive(Debug, Clone, Copy)]
pub struct CrossCheck {
    /// Adjustment at the spot from the finite-difference solve.
    pub u_pde: f64,
    /// The same adjustment from quadrature over simulated exposures.
    pub u_quadrature: f64,
    /// Standard error of the quadrature estimate.
    pub u_se: f64,
    pub cva: f64,
    pub dva: f64,
    pub fca: f64,
    pub colva: f64,
    pub kva: f64,
    /// Clean value re-derived from the terminal payoff, with its error.
    pub clean_pde: f64,
    pub clean_quadrature: f64,
    pub clean_se: f64,
    pub n_paths: usize,
}

impl CrossCheck {
    /// Gap between the two engines in units of the quadrature standard error.
    pub fn gap_in_se(&self) -> f64 {
        if self.u_se == 0.0 {
            if self.u_quadrature == self.u_pde { 0.0 } else { f64::INFINITY }
        } else {
            (self.u_quadrature - self.u_pde).abs() / self.u_se
        }
    }
}

/// Run the quadrature cross-check: simulate `n_paths` equity paths, build
/// per-path adjustment integrals on every `stride`-th PDE time level, and
/// compare their mean against the PDE adjustment at the spot.
pub fn cross_check(
    problem: &PdeProblem,
    solution: &PdeSolution,
    n_paths: usize,
    stride: usize,
    seed: u64,
) -> Result<CrossCheck> {
    if n_paths < 2 {
        return Err(XvaError::input("pde: cross-check needs at least 2 paths"));
    }
    if stride == 0 {
        return Err(XvaError::input("pde: cross-check stride must be positive"));
    }
    let m = solution.times.len() - 1;
    let mut levels: Vec<usize> = (0..=m).step_by(stride).collect();
    if *levels.last().unwrap() != m {
        levels.push(m);
    }
    let times: Vec<f64> = levels.iter().map(|&j| solution.times[j]).collect();
    let n_obs = levels.len();

    let r = problem.rate;
    let lam = problem.lambda_b + problem.lambda_c;
    let lgd_b = 1.0 - problem.recovery_b;
    let lgd_c = 1.0 - problem.recovery_c;
    let nu = problem.log_drift();
    let sig = problem.sigma;
    // Deterministic weights: discount, joint survival, and the trapezoid is
    // taken per path so each path yields one sample of every integral.
    let disc_surv: Vec<f64> = times.iter().map(|&t| (-(r + lam) * t).exp()).collect();

    let mut u_samples = Vec::with_capacity(n_paths);
    let mut cva_s = Vec::with_capacity(n_paths);
    let mut dva_s = Vec::with_capacity(n_paths);
    let mut fca_s = Vec::with_capacity(n_paths);
    let mut colva_s = Vec::with_capacity(n_paths);
    let mut kva_s = Vec::with_capacity(n_paths);
    let mut clean_samples = Vec::with_capacity(n_paths);

    let mut pos = vec![0.0; n_obs];
    let mut neg = vec![0.0; n_obs];
    let mut cap = vec![0.0; n_obs];
    let mut col = vec![0.0; n_obs];

    for path in 0..n_paths {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(path as u64);
        let mut x = problem.spot.ln();
        for k in 0..n_obs {
            if k > 0 {
                let dt = times[k] - times[k - 1];
                let z: f64 = StandardNormal.sample(&mut rng);
                x += nu * dt + sig * dt.sqrt() * z;
            }
            let (v, dv_ds) = solution.interp_clean(levels[k], x);
            let xc = problem.collateral.evaluate(v);
            let vmx = v - xc;
            let k_cap = problem.capital.evaluate(times[k], v, dv_ds);
            pos[k] = disc_surv[k] * vmx.max(0.0);
            neg[k] = disc_surv[k] * vmx.min(0.0);
            cap[k] = disc_surv[k] * k_cap;
            col[k] = disc_surv[k] * xc;
        }
        // Terminal clean-value sample: discounted payoff at the simulated
        // endpoint (independent check of the first sweep).
        let s_end = x.exp();
        clean_samples.push((-r * problem.maturity).exp() * (problem.payoff)(s_end));

        let cva = -lgd_c * problem.lambda_c * trapezoid(&times, &pos);
        let dva = -lgd_b * problem.lambda_b * trapezoid(&times, &neg);
        let fca = -lgd_b
            * problem.lambda_b
            * (trapezoid(&times, &pos) - problem.phi * trapezoid(&times, &cap));
        let colva = -problem.collateral_spread * trapezoid(&times, &col);
        let kva = -(problem.cost_of_capital - r * problem.phi) * trapezoid(&times, &cap);
        cva_s.push(cva);
        dva_s.push(dva);
        fca_s.push(fca);
        colva_s.push(colva);
        kva_s.push(kva);
        u_samples.push(cva + dva + fca + colva + kva);
    }

    let (u_mean, u_se) = mean_and_se(&u_samples);
    let (clean_mean, clean_se) = mean_and_se(&clean_samples);
    let mean = |v: &[f64]| v.iter().sum::<f64>() / v.len() as f64;
    Ok(CrossCheck {
        u_pde: solution.adjustment_at_spot(),
        u_quadrature: u_mean,
        u_se,
        cva: mean(&cva_s),
        dva: mean(&dva_s),
        fca: mean(&fca_s),
        colva: mean(&colva_s),
        kva: mean(&kva_s),
        clean_pde: solution.clean_at_spot(),
        clean_quadrature: clean_mean,
        clean_se,
        n_paths,
    })
}

/// Black-Scholes price of a European call carried at `carry = repo - dividend`.
pub fn black_scholes_call(
    spot: f64,
    strike: f64,
    maturity: f64,
    sigma: f64,
    rate: f64,
    carry: f64,
) -> f64 {
    let fwd = spot * (carry * maturity).exp();
    let sd = sigma * maturity.sqrt();
    let d1 = ((fwd / strike).ln() + 0.5 * sd * sd) / sd;
    let d2 = d1 - sd;
    (-rate * maturity).exp() * (fwd * crate::math::norm_cdf(d1) - strike * crate::math::norm_cdf(d2))
}
