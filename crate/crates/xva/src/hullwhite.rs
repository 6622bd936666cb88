//! One-factor Hull-White short-rate model fitted to an initial discount curve.
//!
//! Dynamics: `dr = (theta(t) - a*r) dt + sigma dW` with `theta` chosen so the
//! model reprices the input curve exactly. Internally the mean-reverting
//! deviation `x(t) = r(t) - alpha(t)` is simulated with its exact Gaussian
//! transition, jointly with the integral `int x du`, so bank-account discount
//! factors are exact in distribution on any grid (no Euler bias): the
//! martingale identity `E[exp(-int_0^t r)] = P(0,t)` holds up to Monte Carlo
//! noise only.

use crate::curve::DiscountCurve;
use crate::error::{Result, XvaError};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

/// Hull-White parameters: mean reversion `a` (> 0) and absolute rate
/// volatility `sigma` (>= 0, units 1/sqrt(year)).
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct HullWhite {
    pub a: f64,
    pub sigma: f64,
}

impl HullWhite {
    pub fn new(a: f64, sigma: f64) -> Result<Self> {
        if !(a > 0.0) || !a.is_finite() {
            return Err(XvaError::input(format!(
                "hull-white: mean reversion a must be positive (got {a})"
            )));
        }
        if !(sigma >= 0.0) || !sigma.is_finite() {
            return Err(XvaError::input(format!(
                "hull-white: sigma must be non-negative (got {sigma})"
            )));
        }
        Ok(HullWhite { a, sigma })
    }

    /// `B(t, T) = (1 - exp(-a (T-t))) / a`.
    pub fn b_factor(&self, t: f64, maturity: f64) -> f64 {
        -(-self.a * (maturity - t)).exp_m1() / self.a
    }

    /// Drift-fit correction `alpha(t) = f(0,t) + sigma^2/(2a^2) (1-e^{-at})^2`;
    /// the simulated short rate is `alpha(t) + x(t)`.
    pub fn alpha(&self, curve: &DiscountCurve, t: f64) -> f64 {
        let one_me = -(-self.a * t).exp_m1();
        curve.instantaneous_forward(t)
            + self.sigma * self.sigma / (2.0 * self.a * self.a) * one_me * one_me
    }

    /// `Lambda(t) = int_0^t sigma^2/(2a^2) (1-e^{-au})^2 du`, the deterministic
    /// part of the accumulated drift correction.
    fn lambda(&self, t: f64) -> f64 {
        let a = self.a;
        let b1 = -(-a * t).exp_m1() / a;
        let b2 = -(-2.0 * a * t).exp_m1() / (2.0 * a);
        self.sigma * self.sigma / (2.0 * a * a) * (t - 2.0 * b1 + b2)
    }

    /// Affine zero-coupon bond coefficients at observation time `t` for bond
    /// maturity `T`: price = `exp(ln_a - b * r_t)`.
    pub fn bond_coeff(&self, curve: &DiscountCurve, t: f64, maturity: f64) -> BondCoeff {
        debug_assert!(maturity >= t);
        let b = self.b_factor(t, maturity);
        let ln_a = (curve.discount_factor(maturity) / curve.discount_factor(t)).ln()
            + b * curve.instantaneous_forward(t)
            - self.sigma * self.sigma / (4.0 * self.a)
                * (-(-2.0 * self.a * t).exp_m1())
                * b
                * b;
        BondCoeff { ln_a, b }
    }

    /// Zero-coupon bond price `P(t, T)` given the short rate at `t`.
    pub fn zero_coupon_bond(
        &self,
        curve: &DiscountCurve,
        t: f64,
        short_rate: f64,
        maturity: f64,
    ) -> f64 {
        self.bond_coeff(curve, t, maturity).price(short_rate)
    }

    /// Simulate `n_paths` short-rate paths on `grid` (which must start at 0
    /// and be strictly increasing), fitted to `curve`, using `threads`
    /// workers. Path `i` depends only on `(seed, i)`: results are identical
    /// for any `n_paths >= i+1` and any thread count.
    pub fn simulate(
        &self,
        curve: &DiscountCurve,
        grid: &[f64],
        n_paths: usize,
        seed: u64,
        threads: usize,
    ) -> Result<PathSet> {
        if grid.len() < 2 || grid[0] != 0.0 {
            return Err(XvaError::input(
                "hull-white: simulation grid must start at 0 and have at least 2 points",
            ));
        }
        for w in grid.windows(2) {
            if w[1] <= w[0] {
                return Err(XvaError::input(
                    "hull-white: simulation grid must be strictly increasing",
                ));
            }
        }
        if n_paths == 0 {
            return Err(XvaError::input("hull-white: n_paths must be positive"));
        }

        let n_times = grid.len();
        let steps = StepParams::precompute(self, curve, grid);

        let mut short_rate = vec![0.0f64; n_paths * n_times];
        let mut discount = vec![0.0f64; n_paths * n_times];

        let threads = threads.max(1).min(n_paths);
        let chunk_paths = n_paths.div_ceil(threads);
        std::thread::scope(|scope| {
            let steps = &steps;
            let sr_chunks = short_rate.chunks_mut(chunk_paths * n_times);
            let d_chunks = discount.chunks_mut(chunk_paths * n_times);
            for (ci, (sr, d)) in sr_chunks.zip(d_chunks).enumerate() {
                scope.spawn(move || {
                    let first_path = ci * chunk_paths;
                    let paths_here = sr.len() / n_times;
                    for p in 0..paths_here {
                        simulate_one_path(
                            steps,
                            seed,
                            (first_path + p) as u64,
                            &mut sr[p * n_times..(p + 1) * n_times],
                            &mut d[p * n_times..(p + 1) * n_times],
                        );
                    }
                });
            }
        });

        Ok(PathSet {
            times: grid.to_vec(),
            n_paths,
            short_rate,
            discount,
        })
    }
}

/// Precomputed affine bond coefficients: price = `exp(ln_a - b * r)`.
#[derive(Debug, Clone, Copy)]
pub struct BondCoeff {
    pub ln_a: f64,
    pub b: f64,
}

impl BondCoeff {
    #[inline]
    pub fn price(&self, short_rate: f64) -> f64 {
        (self.ln_a - self.b * short_rate).exp()
    }
}

/// Per-step constants of the exact `(x, int x)` Gaussian transition.
struct StepParams {
    /// Per time point: alpha(t_i).
    alpha: Vec<f64>,
    /// Per time point: ln P(0, t_i) - Lambda(t_i); the path-dependent part of
    /// ln D is subtracted from this.
    base_log_df: Vec<f64>,
    /// Per step i (transition t_{i-1} -> t_i), see `simulate_one_path`.
    decay: Vec<f64>,
    sd_x: Vec<f64>,
    mean_i_coeff: Vec<f64>,
    c1: Vec<f64>,
    c2: Vec<f64>,
}

impl StepParams {
    fn precompute(hw: &HullWhite, curve: &DiscountCurve, grid: &[f64]) -> Self {
        let a = hw.a;
        let s2 = hw.sigma * hw.sigma;
        let n = grid.len();
        let mut p = StepParams {
            alpha: Vec::with_capacity(n),
            base_log_df: Vec::with_capacity(n),
            decay: vec![0.0; n],
            sd_x: vec![0.0; n],
            mean_i_coeff: vec![0.0; n],
            c1: vec![0.0; n],
            c2: vec![0.0; n],
        };
        for (i, &t) in grid.iter().enumerate() {
            p.alpha.push(hw.alpha(curve, t));
            p.base_log_df
                .push(curve.discount_factor(t).ln() - hw.lambda(t));
            if i == 0 {
                continue;
            }
            let dt = t - grid[i - 1];
            let e = (-a * dt).exp();
            let one_me = -(-a * dt).exp_m1();
            let b = one_me / a;
            let var_x = s2 * (-(-2.0 * a * dt).exp_m1()) / (2.0 * a);
            let var_i = s2 / (a * a) * (dt - 2.0 * b + (-(-2.0 * a * dt).exp_m1()) / (2.0 * a));
            let cov = s2 / (2.0 * a * a) * one_me * one_me;
            p.decay[i] = e;
            p.sd_x[i] = var_x.sqrt();
            p.mean_i_coeff[i] = b;
            if var_x > 0.0 {
                p.c1[i] = cov / var_x.sqrt();
                p.c2[i] = (var_i - cov * cov / var_x).max(0.0).sqrt();
            } else {
                p.c1[i] = 0.0;
                p.c2[i] = var_i.max(0.0).sqrt();
            }
        }
        p
    }
}

fn simulate_one_path(steps: &StepParams, seed: u64, path: u64, sr: &mut [f64], d: &mut [f64]) {
    // Independent substream per path: same key, per-path stream counter, so
    // path i is identical for any total path count.
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(path);
    let n = sr.len();
    let mut x = 0.0f64;
    let mut cum_ix = 0.0f64; // int_0^{t_i} x du
    sr[0] = steps.alpha[0];
    d[0] = 1.0;
    for i in 1..n {
        let z1: f64 = StandardNormal.sample(&mut rng);
        let z2: f64 = StandardNormal.sample(&mut rng);
        let i_step = x * steps.mean_i_coeff[i] + steps.c1[i] * z1 + steps.c2[i] * z2;
        x = x * steps.decay[i] + steps.sd_x[i] * z1;
        cum_ix += i_step;
        sr[i] = steps.alpha[i] + x;
        d[i] = (steps.base_log_df[i] - cum_ix).exp();
    }
}

/// Simulated short-rate paths and pathwise bank-account discount factors on a
/// common grid. Storage is path-major: entry for `(path, time)` sits at
/// `path * n_times + time`.
#[derive(Debug, Clone)]
pub struct PathSet {
    pub times: Vec<f64>,
    pub n_paths: usize,
    short_rate: Vec<f64>,
    discount: Vec<f64>,
}

impl PathSet {
    #[inline]
    pub fn n_times(&self) -> usize {
        self.times.len()
    }

    /// Short rate on `path` at grid index `i`.
    #[inline]
    pub fn short_rate(&self, path: usize, i: usize) -> f64 {
        self.short_rate[path * self.times.len() + i]
    }

    /// Bank-account discount factor `exp(-int_0^{t_i} r du)` on `path`.
    #[inline]
    pub fn discount(&self, path: usize, i: usize) -> f64 {
        self.discount[path * self.times.len() + i]
    }

    /// Full short-rate row for one path.
    #[inline]
    pub fn short_rate_row(&self, path: usize) -> &[f64] {
        let n = self.times.len();
        &self.short_rate[path * n..(path + 1) * n]
    }

    /// Full discount-factor row for one path.
    #[inline]
    pub fn discount_row(&self, path: usize) -> &[f64] {
        let n = self.times.len();
        &self.discount[path * n..(path + 1) * n]
    }
}
