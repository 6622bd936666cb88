//! End-to-end acceptance checks. Each test covers one numbered check and
//! prints a single `check NN: PASS/FAIL` line (visible with
//! `cargo test -- --nocapture`, and always visible on failure).
//!
//! Three checks carry a `_known_mismatch` suffix: they assert documented
//! target bands exactly as stated even though the engine's measured values
//! fall outside them. Those tests are expected to stay red; companion
//! `_supplement_` tests pin the exact laws the engine does satisfy.

mod common;

use std::time::Instant;

use xva::{
    black_scholes_call, cross_check, cva_capital_std_full, cva_capital_std_large_n, ead_cem,
    integrate_xva, irb_weight, market_risk_std, regulatory_cs01, regulatory_cva, run_scenario,
    solve_pde, swap_ladder_positions, CapitalConfig, CapitalProfile, CapitalRule,
    CounterpartyProfile, CvaChargeEntry, DiscountCurve, HullWhite, IssuerParams, MarketFile,
    NettingSetExposure, PdeProblem, RatingRow, RatingsTable, ScenarioKind, ScenarioRequest,
    ScenarioRow, ScenarioTable, Swap, SwapDirection, XvaBreakdown,
};

use common::{norm_cdf, norm_inv_cdf, SplitMix64};

// ---------------------------------------------------------------------------
// Reporting and shared fixtures
// ---------------------------------------------------------------------------

/// Print one summary line for the check, then panic if anything failed.
fn conclude(id: u32, failures: Vec<String>, detail: String) {
    if failures.is_empty() {
        println!("check {id:02}: PASS — {detail}");
    } else {
        println!("check {id:02}: FAIL — {detail}");
        for f in &failures {
            println!("  - {f}");
        }
        panic!("check {id:02} failed:\n{}", failures.join("\n"));
    }
}

fn test_threads() -> usize {
    std::thread::available_parallelism()
        .map(|n| n.get().min(8))
        .unwrap_or(1)
}

fn payer_10y() -> Swap {
    Swap {
        notional: 100.0,
        fixed_rate: 0.027,
        start: 0.0,
        maturity: 10.0,
        payments_per_year: 2,
        direction: SwapDirection::Payer,
    }
}

/// Smooth, hand-built exposure profile on a 5-year semiannual grid. Used by
/// the collapse and affinity checks, which exercise the integrator alone.
fn synthetic_exposure() -> NettingSetExposure {
    let times: Vec<f64> = (0..=10).map(|i| i as f64 * 0.5).collect();
    let n = times.len();
    let w = |t: f64| (1.0 - t / 5.0).max(0.0);
    let epe_d: Vec<f64> = times
        .iter()
        .map(|&t| (3.0 + 0.5 * (1.3 * t).sin()) * w(t) * (-0.02 * t).exp())
        .collect();
    let ene_d: Vec<f64> = times
        .iter()
        .map(|&t| -(2.2 + 0.3 * (0.9 * t).cos()) * w(t) * (-0.02 * t).exp())
        .collect();
    let ev_d: Vec<f64> = (0..n).map(|i| epe_d[i] + ene_d[i]).collect();
    let ee: Vec<f64> = times
        .iter()
        .zip(&epe_d)
        .map(|(&t, &e)| e * (1.0 + 0.02 * t))
        .collect();
    let ead: Vec<f64> = times
        .iter()
        .map(|&t| (4.0 + 0.3 * (1.1 * t).cos()) * w(t))
        .collect();
    let ead_d: Vec<f64> = times
        .iter()
        .zip(&ead)
        .map(|(&t, &e)| e * (-0.027 * t).exp())
        .collect();
    let ead_rd: Vec<f64> = ead_d.iter().map(|&e| e * 0.027).collect();
    NettingSetExposure {
        times,
        n_paths: 10_000,
        epe_d,
        ene_d,
        ee,
        ev_d,
        ead_cem: ead.clone(),
        ead_cem_d: ead_d,
        ead_cem_rd: ead_rd,
        ead_std: ead.iter().map(|&e| e * 1.1).collect(),
        ead_imm: ead.iter().map(|&e| e * 1.2).collect(),
        se_epe_d: vec![0.0; n],
        se_ene_d: vec![0.0; n],
        se_ead_cem: vec![0.0; n],
        se_ead_std: vec![0.0; n],
    }
}

fn synthetic_capital(times: &[f64]) -> CapitalProfile {
    let mut cap = CapitalProfile::zeros(times);
    for (i, &t) in times.iter().enumerate() {
        let w = (1.0 - t / 5.0).max(0.0);
        let d = (-0.027 * t).exp();
        cap.k_mr[i] = (2.5 + 0.2 * t.sin()) * w;
        cap.k_ccr[i] = 1.1 * w;
        cap.k_cva[i] = (0.7 + 0.1 * t.cos()) * w;
        cap.k_mr_d[i] = cap.k_mr[i] * d;
        cap.k_ccr_d[i] = cap.k_ccr[i] * d;
        cap.k_cva_d[i] = cap.k_cva[i] * d;
        cap.k_mr_rd[i] = cap.k_mr_d[i] * 0.027;
        cap.k_ccr_rd[i] = cap.k_ccr_d[i] * 0.027;
        cap.k_cva_rd[i] = cap.k_cva_d[i] * 0.027;
    }
    cap
}

fn test_cpty() -> CounterpartyProfile {
    CounterpartyProfile {
        id: "test".into(),
        rating: "TEST".into(),
        cds_spread: 0.02,
        recovery: 0.4,
        ccr_weight: 1.0,
        cva_weight: 0.01,
        domicile_exempt_cva_capital: false,
    }
}

fn find_row<'a>(table: &'a ScenarioTable, phi: f64, dir: &str, rating: &str) -> &'a ScenarioRow {
    table
        .rows
        .iter()
        .find(|r| r.phi == phi && r.direction.label() == dir && r.rating == rating)
        .unwrap_or_else(|| panic!("missing row phi={phi} dir={dir} rating={rating}"))
}

// ---------------------------------------------------------------------------
// check 01 — backward solver vs simulated quadrature on a vanilla call
// ---------------------------------------------------------------------------

#[test]
fn check_01_pde_against_quadrature() {
    let start = Instant::now();
    let mut failures = Vec::new();
    let mut notes = Vec::new();

    for &phi in &[0.0, 1.0] {
        let mut problem = PdeProblem::european_call(100.0, 100.0, 5.0, 0.25, 0.02, 201, 200);
        problem.lambda_b = 0.01;
        problem.lambda_c = 0.01;
        problem.recovery_b = 0.4;
        problem.recovery_c = 0.4;
        problem.phi = phi;
        problem.cost_of_capital = 0.10;
        problem.capital = CapitalRule::Constant(2.0);

        let solution = solve_pde(&problem).expect("solver");
        let check = cross_check(&problem, &solution, 40_000, 4, 42).expect("cross-check");

        let gap = (check.u_quadrature - check.u_pde).abs();
        let tol = (1e-3 * check.u_pde.abs()).max(3.0 * check.u_se);
        if !(gap <= tol) {
            failures.push(format!(
                "phi={phi}: |{:.6} - {:.6}| = {gap:.2e} > tol {tol:.2e}",
                check.u_quadrature, check.u_pde
            ));
        }
        // The clean layer must agree too (and with the closed form).
        let clean_gap = (check.clean_quadrature - check.clean_pde).abs();
        let clean_tol = (1e-3 * check.clean_pde.abs()).max(3.0 * check.clean_se);
        if !(clean_gap <= clean_tol) {
            failures.push(format!(
                "phi={phi}: clean gap {clean_gap:.2e} > tol {clean_tol:.2e}"
            ));
        }
        let bs = black_scholes_call(100.0, 100.0, 5.0, 0.25, 0.02, 0.02);
        if (check.clean_pde - bs).abs() > 1e-3 * bs {
            failures.push(format!(
                "phi={phi}: clean grid value {:.6} vs closed form {bs:.6}",
                check.clean_pde
            ));
        }
        notes.push(format!(
            "phi={phi}: grid {:.6}, simulated {:.6} ± {:.6}",
            check.u_pde, check.u_quadrature, check.u_se
        ));
    }

    let elapsed = start.elapsed();
    if elapsed.as_secs_f64() > 60.0 {
        failures.push(format!("took {:.1}s > 60s budget", elapsed.as_secs_f64()));
    }
    notes.push(format!("{:.1}s", elapsed.as_secs_f64()));
    conclude(1, failures, notes.join("; "));
}

// ---------------------------------------------------------------------------
// check 02 — each adjustment collapses to zero when its driver is switched off
// ---------------------------------------------------------------------------

#[test]
fn check_02_degenerate_collapses() {
    const TOL: f64 = 1e-10;
    let mut failures = Vec::new();

    let exposure = synthetic_exposure();
    let capital = synthetic_capital(&exposure.times);
    let issuer = IssuerParams {
        funding_spread: 0.01,
        recovery: 0.4,
        spread_is_lambda: false,
        collateral_spread: 0.015,
    };

    // Riskless counterparty: no default leg, so no CVA.
    let mut riskless = test_cpty();
    riskless.cds_spread = 0.0;
    let b = integrate_xva(&exposure, &capital, None, &riskless, &issuer, 0.10, 0.5).unwrap();
    if b.cva.abs() > TOL {
        failures.push(format!("zero counterparty spread left cva = {:.3e}", b.cva));
    }

    // Riskless issuer: own-default benefit and funding cost both vanish.
    let free_funding = IssuerParams {
        funding_spread: 0.0,
        ..issuer
    };
    let b = integrate_xva(&exposure, &capital, None, &test_cpty(), &free_funding, 0.10, 0.5).unwrap();
    for (name, v) in [("dva", b.dva), ("fca", b.fca), ("fca_prime", b.fca_prime)] {
        if v.abs() > TOL {
            failures.push(format!("zero issuer spread left {name} = {v:.3e}"));
        }
    }

    // Free capital at phi = 0: every capital carry term vanishes.
    let b = integrate_xva(&exposure, &capital, None, &test_cpty(), &issuer, 0.0, 0.0).unwrap();
    for (name, v) in [
        ("kva_mr", b.kva_mr),
        ("kva_ccr", b.kva_ccr),
        ("kva_cva", b.kva_cva),
        ("kva", b.kva()),
        ("kva_prime", b.kva_prime()),
    ] {
        if v.abs() > TOL {
            failures.push(format!("zero cost of capital left {name} = {v:.3e}"));
        }
    }

    // Zero collateral balance: no collateral carry, spread notwithstanding.
    let zeros = vec![0.0; exposure.times.len()];
    let b = integrate_xva(
        &exposure,
        &capital,
        Some(&zeros),
        &test_cpty(),
        &issuer,
        0.10,
        0.5,
    )
    .unwrap();
    if b.colva.abs() > TOL {
        failures.push(format!("zero collateral balance left colva = {:.3e}", b.colva));
    }
    let b = integrate_xva(&exposure, &capital, None, &test_cpty(), &issuer, 0.10, 0.5).unwrap();
    if b.colva.abs() > TOL {
        failures.push(format!("uncollateralized set has colva = {:.3e}", b.colva));
    }

    // Mirrored book with every adjustment driver off: all columns exactly 0.
    let mut req = ScenarioRequest::new(ScenarioKind::BackToBack);
    req.table = RatingsTable {
        version: 1,
        ratings: vec![RatingRow {
            rating: "OFF".into(),
            spread: 0.0,
            ccr_risk_weight: 0.0,
            cva_risk_weight: 0.0,
            recovery: 0.4,
        }],
    };
    req.ratings = vec!["OFF".into()];
    req.phis = vec![0.0, 0.5, 1.0];
    req.n_paths = 1000;
    req.steps_per_year = 4;
    req.threads = test_threads();
    req.issuer = IssuerParams {
        funding_spread: 0.0,
        recovery: 0.4,
        spread_is_lambda: false,
        collateral_spread: 0.0,
    };
    req.capital = CapitalConfig {
        cost_of_capital: 0.0,
        ..CapitalConfig::default()
    };
    let table = run_scenario(&req).unwrap();
    assert_eq!(table.rows.len(), 6);
    for row in &table.rows {
        let b = &row.breakdown;
        for (name, v) in [
            ("cva", b.cva),
            ("dva", b.dva),
            ("fca", b.fca),
            ("colva", b.colva),
            ("kva_mr", b.kva_mr),
            ("kva_ccr", b.kva_ccr),
            ("kva_cva", b.kva_cva),
            ("fca_prime", b.fca_prime),
            ("kva_mr_prime", b.kva_mr_prime),
            ("kva_ccr_prime", b.kva_ccr_prime),
            ("kva_cva_prime", b.kva_cva_prime),
            ("ir01_bp", row.ir01_bp),
        ] {
            if v.abs() > TOL {
                failures.push(format!(
                    "disabled mirrored book, phi={} {}: {name} = {v:.3e}",
                    row.phi,
                    row.direction.label()
                ));
            }
        }
    }

    conclude(2, failures, "five switch-off collapses at 1e-10".into());
}

// ---------------------------------------------------------------------------
// check 03 — funding/capital regrouping leaves the sum unchanged
// ---------------------------------------------------------------------------

#[test]
fn check_03_regrouping_identity() {
    let mut failures = Vec::new();
    let mut n_rows = 0usize;

    for kind in [
        ScenarioKind::Naked,
        ScenarioKind::BackToBack,
        ScenarioKind::Ir01Flat,
    ] {
        let mut req = ScenarioRequest::new(kind);
        req.n_paths = 1500;
        req.steps_per_year = 4;
        req.threads = test_threads();
        let table = run_scenario(&req).unwrap();
        for row in &table.rows {
            n_rows += 1;
            let b = &row.breakdown;
            let lhs = b.fca + b.kva();
            let rhs = b.fca_prime + b.kva_prime();
            let gap = (lhs - rhs).abs();
            if gap > 1e-12 * lhs.abs().max(1.0) {
                failures.push(format!(
                    "{} phi={} {} {}: {lhs:.15e} vs {rhs:.15e}",
                    kind.label(),
                    row.phi,
                    row.direction.label(),
                    row.rating
                ));
            }
        }
    }

    conclude(
        3,
        failures,
        format!("both groupings agree to 1e-12 on {n_rows} rows"),
    );
}

// ---------------------------------------------------------------------------
// check 04 — capital formulas against independent brute-force recomputation
// ---------------------------------------------------------------------------

fn irb_weight_brute(pd: f64, lgd: f64, maturity: f64) -> f64 {
    let pd = pd.max(0.0003);
    let denom = 1.0 - (-50.0f64).exp();
    let frac = (1.0 - (-50.0 * pd).exp()) / denom;
    let rho = 0.12 * frac + 0.24 * (1.0 - frac);
    let b = (0.11852 - 0.05478 * pd.ln()).powi(2);
    let q = norm_cdf(
        norm_inv_cdf(pd) / (1.0 - rho).sqrt() + norm_inv_cdf(0.999) * (rho / (1.0 - rho)).sqrt(),
    );
    lgd * (q - pd) * (1.0 + (maturity - 2.5) * b) / (1.0 - 1.5 * b)
}

fn cva_std_brute(entries: &[CvaChargeEntry], horizon: f64) -> f64 {
    let disc = |m: f64| {
        let x = 0.05 * m;
        if x.abs() < 1e-12 {
            1.0
        } else {
            (1.0 - (-x).exp()) / x
        }
    };
    let d: Vec<f64> = entries
        .iter()
        .map(|e| e.maturity * e.ead * disc(e.maturity) - e.hedge_maturity * e.hedge_notional)
        .collect();
    let sys: f64 = entries
        .iter()
        .zip(&d)
        .map(|(e, &di)| 0.5 * e.weight * di)
        .sum();
    let idio: f64 = entries
        .iter()
        .zip(&d)
        .map(|(e, &di)| 0.75 * e.weight * e.weight * di * di)
        .sum();
    2.33 * horizon.sqrt() * (sys * sys + idio).sqrt()
}

fn regulatory_cva_brute(spreads: &[f64], times: &[f64], lgd: f64, ee: &[f64], df: &[f64]) -> f64 {
    let surv = |i: usize| (-spreads[i] * times[i] / lgd).exp();
    let mut total = 0.0;
    for i in 1..times.len() {
        let dp = (surv(i - 1) - surv(i)).max(0.0);
        total += dp * 0.5 * (ee[i - 1] * df[i - 1] + ee[i] * df[i]);
    }
    lgd * total
}

fn regulatory_cs01_brute(
    spreads: &[f64],
    times: &[f64],
    lgd: f64,
    ee: &[f64],
    df: &[f64],
    i: usize,
) -> f64 {
    0.0001 * times[i] * (-spreads[i] * times[i] / lgd).exp() * 0.5
        * (ee[i - 1] * df[i - 1] + ee[i + 1] * df[i + 1])
}

fn ead_cem_brute(values: &[f64], addons: &[f64], floor_value: bool) -> f64 {
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

#[test]
fn check_04_capital_oracles_brute_force() {
    const N_CASES: usize = 25;
    let mut failures = Vec::new();
    let mut rng = SplitMix64(0x0404_0404);
    let close = |a: f64, b: f64| (a - b).abs() <= 1e-10 * a.abs().max(1.0);

    for case in 0..N_CASES {
        // Wholesale capital weight.
        let pd = rng.range(1e-5, 0.5);
        let lgd = rng.range(0.0, 1.0);
        let m = rng.range(0.5, 30.0);
        let got = irb_weight(pd, lgd, m).unwrap();
        let want = irb_weight_brute(pd, lgd, m);
        if !close(got, want) {
            failures.push(format!("irb case {case}: {got:.15e} vs {want:.15e}"));
        }

        // Standardized credit-valuation capital, full portfolio form.
        let n_entries = 1 + (rng.next_u64() % 8) as usize;
        let entries: Vec<CvaChargeEntry> = (0..n_entries)
            .map(|_| CvaChargeEntry {
                weight: rng.range(0.003, 0.1),
                maturity: rng.range(0.5, 20.0),
                ead: rng.range(0.0, 100.0),
                hedge_maturity: rng.range(0.5, 20.0),
                hedge_notional: rng.range(0.0, 50.0),
            })
            .collect();
        let horizon = rng.range(0.25, 2.0);
        let got = cva_capital_std_full(&entries, horizon);
        let want = cva_std_brute(&entries, horizon);
        if !close(got, want) {
            failures.push(format!("cva-std case {case}: {got:.15e} vs {want:.15e}"));
        }

        // Spread-based expected-loss charge and its bucket sensitivity.
        let n = 3 + (rng.next_u64() % 10) as usize;
        let mut t = 0.0;
        let times: Vec<f64> = (0..n)
            .map(|_| {
                t += rng.range(0.1, 1.5);
                t
            })
            .collect();
        let spreads: Vec<f64> = (0..n).map(|_| rng.range(0.0005, 0.05)).collect();
        let ee: Vec<f64> = (0..n).map(|_| rng.range(0.0, 10.0)).collect();
        let df: Vec<f64> = times.iter().map(|&t| (-rng.range(0.0, 0.05) * t).exp()).collect();
        let lgd_mkt = rng.range(0.2, 0.9);
        let got = regulatory_cva(&spreads, &times, lgd_mkt, &ee, &df).unwrap();
        let want = regulatory_cva_brute(&spreads, &times, lgd_mkt, &ee, &df);
        if !close(got, want) {
            failures.push(format!("reg-cva case {case}: {got:.15e} vs {want:.15e}"));
        }
        let i = 1 + (rng.next_u64() as usize) % (n - 2).max(1);
        let i = i.min(n - 2);
        let got = regulatory_cs01(&spreads, &times, lgd_mkt, &ee, &df, i).unwrap();
        let want = regulatory_cs01_brute(&spreads, &times, lgd_mkt, &ee, &df, i);
        if !close(got, want) {
            failures.push(format!("reg-cs01 case {case}: {got:.15e} vs {want:.15e}"));
        }

        // Netted current-exposure EAD, floored and unfloored.
        let n_trades = 1 + (rng.next_u64() % 6) as usize;
        let values: Vec<f64> = (0..n_trades).map(|_| rng.range(-10.0, 10.0)).collect();
        let addons: Vec<f64> = (0..n_trades).map(|_| rng.range(0.0, 5.0)).collect();
        for floor in [true, false] {
            let got = ead_cem(&values, &addons, floor);
            let want = ead_cem_brute(&values, &addons, floor);
            if !close(got, want) {
                failures.push(format!("ead case {case} floor={floor}: {got:.15e} vs {want:.15e}"));
            }
        }
    }

    conclude(
        4,
        failures,
        format!("five formula families, {N_CASES} randomized cases each, 1e-10"),
    );
}

// ---------------------------------------------------------------------------
// check 05 — additive approximation of the portfolio CVA charge
// ---------------------------------------------------------------------------

fn charge_ratio(n: usize) -> f64 {
    const W: f64 = 0.008;
    const M: f64 = 5.0;
    const EAD: f64 = 10.0;
    let entries: Vec<CvaChargeEntry> = (0..n)
        .map(|_| CvaChargeEntry::unhedged(W, M, EAD))
        .collect();
    let full = cva_capital_std_full(&entries, 1.0);
    let additive = n as f64 * cva_capital_std_large_n(W, M, EAD, 1.0);
    full / additive
}

/// The documented convergence target asserts the portfolio/additive ratio is
/// within 1% of 1 at 50 identical names. The exact ratio is sqrt(1 + 3/N)
/// (see the supplement test), which first enters the 1% band at N = 150, so
/// the N = 50 clause fails by construction and is kept red deliberately.
#[test]
fn check_05_additive_charge_convergence_known_mismatch() {
    let mut failures = Vec::new();

    let r1 = charge_ratio(1);
    if (r1 - 2.0).abs() > 1e-12 {
        failures.push(format!("single-name ratio {r1:.15} != 2"));
    }

    let r5000 = charge_ratio(5000);
    if (r5000 - 1.0).abs() > 1e-3 {
        failures.push(format!("ratio at N=5000 is {r5000:.6}, not within 0.1%"));
    }

    let r50 = charge_ratio(50);
    if (r50 - 1.0).abs() > 0.01 {
        failures.push(format!(
            "ratio at N=50 is {r50:.6}; |ratio - 1| = {:.6} > 0.01",
            (r50 - 1.0).abs()
        ));
    }

    conclude(
        5,
        failures,
        format!("ratios: N=1 {r1:.6}, N=50 {r50:.6}, N=5000 {r5000:.6}"),
    );
}

/// The exact law behind check 05: with N identical unhedged names the
/// portfolio charge over the additive form is sqrt(1 + 3/N); the 1% band is
/// entered at N = 150 and not before.
#[test]
fn check_05_supplement_exact_ratio_law() {
    for n in [1usize, 2, 5, 10, 50, 149, 150, 1000] {
        let want = (1.0 + 3.0 / n as f64).sqrt();
        let got = charge_ratio(n);
        assert!(
            (got - want).abs() <= 1e-12 * want,
            "N={n}: ratio {got:.15} vs sqrt(1+3/N) {want:.15}"
        );
    }
    assert!(charge_ratio(149) - 1.0 > 0.01, "N=149 should miss the 1% band");
    assert!(charge_ratio(150) - 1.0 <= 0.01, "N=150 should meet the 1% band");
}

// ---------------------------------------------------------------------------
// check 06 — standardized market-risk charge of one swap's ladder
// ---------------------------------------------------------------------------

#[test]
fn check_06_market_risk_ladder_charge() {
    let mut failures = Vec::new();

    let swap = payer_10y();
    let charge = market_risk_std(&swap_ladder_positions(&swap, 0.0));
    // 5.25% of a notional of 100.
    if (charge - 5.25).abs() > 1e-12 {
        failures.push(format!("10y ladder charge {charge:.15}, expected 5.25"));
    }

    let mirror = Swap {
        direction: SwapDirection::Receiver,
        ..payer_10y()
    };
    let mut positions = swap_ladder_positions(&swap, 0.0);
    positions.extend(swap_ladder_positions(&mirror, 0.0));
    let netted = market_risk_std(&positions);
    if netted != 0.0 {
        failures.push(format!("mirrored pair nets to {netted:.3e}, expected exactly 0"));
    }

    conclude(6, failures, format!("charge {charge:.6} on 100 notional; mirror nets to 0"));
}

// ---------------------------------------------------------------------------
// check 07 — headline scenario table at the pinned configuration
// ---------------------------------------------------------------------------

/// The CVA target bands come from a study whose discount curve is not part
/// of the published configuration; under the flat default curve both payer
/// and receiver land near the geometric mean of that study's asymmetric
/// pair, ~1.5x outside every ±30% payer band. Re-tuning the curve to match is
/// explicitly out of scope, so clause (a)'s bands stay red by design. The
/// level (b), ratio (c), monotonicity, and sign clauses all pass.
#[test]
fn check_07_headline_table_known_mismatch() {
    let mut failures = Vec::new();

    let mut req = ScenarioRequest::new(ScenarioKind::Naked);
    req.phis = vec![0.0, 1.0];
    req.n_paths = 100_000;
    req.steps_per_year = 12;
    req.threads = test_threads();

    let start = Instant::now();
    let table = run_scenario(&req).unwrap();
    let elapsed = start.elapsed().as_secs_f64();
    if elapsed > 300.0 {
        failures.push(format!("run took {elapsed:.1}s > 300s"));
    }
    assert_eq!(table.rows.len(), 16);

    // (a) payer CVA levels and monotonicity across the credit spectrum.
    let ratings = ["AAA", "A", "BB", "CCC"];
    let targets = [-4.0, -10.0, -31.0, -68.0];
    let mut payer_cva = Vec::new();
    for (rating, target) in ratings.iter().zip(targets) {
        let row = find_row(&table, 0.0, "Pay", rating);
        let got = row.cva_bp();
        payer_cva.push(got);
        let (lo, hi) = (1.3 * target, 0.7 * target);
        if !(lo <= got && got <= hi) {
            failures.push(format!(
                "payer cva {rating}: {got:.4} bp outside [{lo:.1}, {hi:.1}]"
            ));
        }
    }
    for w in payer_cva.windows(2) {
        if !(w[0] > w[1]) {
            failures.push(format!("payer cva not strictly decreasing: {payer_cva:?}"));
        }
    }

    // (b) market-risk capital carry level for the strongest name.
    let aaa0 = find_row(&table, 0.0, "Pay", "AAA");
    let kva_mr0 = aaa0.kva_mr_bp();
    if !(kva_mr0 <= -262.0 * 0.85 && kva_mr0 >= -262.0 * 1.15) {
        failures.push(format!("kva_mr at phi=0: {kva_mr0:.4} bp outside -262 ±15%"));
    }

    // (c) capital-offset effect on the same column.
    let aaa1 = find_row(&table, 1.0, "Pay", "AAA");
    let ratio = aaa1.breakdown.kva_mr / aaa0.breakdown.kva_mr;
    if !(ratio >= 0.702 - 0.05 && ratio <= 0.702 + 0.05) {
        failures.push(format!("kva_mr phi=1/phi=0 ratio {ratio:.4} outside 0.702 ± 0.05"));
    }

    // (d) sign pattern on every row.
    for row in &table.rows {
        let b = &row.breakdown;
        let ctx = format!("phi={} {} {}", row.phi, row.direction.label(), row.rating);
        for (name, v, positive) in [
            ("cva", b.cva, false),
            ("dva", b.dva, true),
            ("fca_prime", b.fca_prime, false),
            ("kva_mr", b.kva_mr, false),
            ("kva_ccr", b.kva_ccr, false),
            ("kva_cva", b.kva_cva, false),
            ("total", b.total(), false),
        ] {
            if positive != (v > 0.0) || v == 0.0 {
                failures.push(format!("{ctx}: {name} = {v:.6e} has the wrong sign"));
            }
        }
        let want_positive = row.direction.label() == "Pay";
        if want_positive != (row.ir01_bp > 0.0) || row.ir01_bp == 0.0 {
            failures.push(format!("{ctx}: ir01 = {:.6e} has the wrong sign", row.ir01_bp));
        }
    }

    conclude(
        7,
        failures,
        format!(
            "payer cva {:?} bp; kva_mr {kva_mr0:.2} bp, offset ratio {ratio:.4}; {elapsed:.1}s",
            payer_cva.iter().map(|v| (v * 100.0).round() / 100.0).collect::<Vec<_>>()
        ),
    );
}

// ---------------------------------------------------------------------------
// check 08 — rate-flattening hedge study
// ---------------------------------------------------------------------------

#[test]
fn check_08_flattening_hedge_study() {
    let mut failures = Vec::new();

    let mut req = ScenarioRequest::new(ScenarioKind::Ir01Flat);
    req.phis = vec![0.0, 1.0];
    req.n_paths = 20_000;
    req.steps_per_year = 12;
    req.threads = test_threads();
    let table = run_scenario(&req).unwrap();
    assert_eq!(table.rows.len(), 16);

    for row in &table.rows {
        let ctx = format!("phi={} {} {}", row.phi, row.direction.label(), row.rating);
        if row.ir01_bp.abs() > 1e-6 {
            failures.push(format!("{ctx}: residual ir01 {:.3e} bp", row.ir01_bp));
        }
        match row.hedge_change_pct {
            Some(h) if h > 0.0 => {}
            Some(h) => failures.push(format!("{ctx}: hedge change {h:.6}% not positive")),
            None => failures.push(format!("{ctx}: hedge change column missing")),
        }
    }

    // Within each (phi, direction) block the hedge adjustment grows with the
    // counterparty's riskiness.
    let ratings = ["AAA", "A", "BB", "CCC"];
    for &phi in &[0.0, 1.0] {
        for dir in ["Pay", "Rec"] {
            let changes: Vec<f64> = ratings
                .iter()
                .map(|r| find_row(&table, phi, dir, r).hedge_change_pct.unwrap())
                .collect();
            for w in changes.windows(2) {
                if !(w[1] > w[0]) {
                    failures.push(format!(
                        "phi={phi} {dir}: hedge changes not strictly increasing: {changes:?}"
                    ));
                }
            }
        }
    }

    conclude(
        8,
        failures,
        "hedged books re-flatten to < 1e-6 bp; hedge grows with riskiness".into(),
    );
}

// ---------------------------------------------------------------------------
// check 09 — capital-grouped carry is affine in the offset fraction
// ---------------------------------------------------------------------------

#[test]
fn check_09_offset_affinity() {
    let mut failures = Vec::new();

    let exposure = synthetic_exposure();
    let capital = synthetic_capital(&exposure.times);
    let cpty = test_cpty();
    let issuer = IssuerParams::default();

    let at = |phi: f64| -> XvaBreakdown {
        integrate_xva(&exposure, &capital, None, &cpty, &issuer, 0.10, phi).unwrap()
    };
    let (b0, b5, b1) = (at(0.0), at(0.5), at(1.0));

    let (k0, k5, k1) = (b0.kva_prime(), b5.kva_prime(), b1.kva_prime());
    let scale = k0.abs().max(k1.abs()).max(1.0);
    let bend = (k5 - 0.5 * (k0 + k1)).abs();
    if bend > 1e-10 * scale {
        failures.push(format!(
            "midpoint off the chord by {bend:.3e} (values {k0:.12e}, {k5:.12e}, {k1:.12e})"
        ));
    }
    if (k1 - k0).abs() <= 1e-12 * scale {
        failures.push("offset fraction has no effect; affinity check is vacuous".into());
    }

    // The companion grouping keeps the funding leg free of the offset
    // fraction entirely.
    if b0.fca_prime != b5.fca_prime || b0.fca_prime != b1.fca_prime {
        failures.push(format!(
            "fca_prime varies with phi: {:.12e}, {:.12e}, {:.12e}",
            b0.fca_prime, b5.fca_prime, b1.fca_prime
        ));
    }

    conclude(
        9,
        failures,
        format!("kva_prime chord {k0:.6} -> {k5:.6} -> {k1:.6}"),
    );
}

// ---------------------------------------------------------------------------
// check 10 — simulated discounting is a martingale; error scaling with paths
// ---------------------------------------------------------------------------

fn terminal_discount_se(curve: &DiscountCurve, hw: &HullWhite, n_paths: usize) -> f64 {
    let grid = [0.0, 10.0];
    let paths = hw.simulate(curve, &grid, n_paths, 7, test_threads()).unwrap();
    let mut sum = 0.0;
    let mut sum_sq = 0.0;
    for p in 0..n_paths {
        let d = paths.discount(p, 1);
        sum += d;
        sum_sq += d * d;
    }
    let n = n_paths as f64;
    let mean = sum / n;
    ((sum_sq / n - mean * mean).max(0.0) / (n - 1.0)).sqrt()
}

/// The scaling clause asserts that doubling the path count halves the
/// standard error within 20%. Doubling shrinks it by 1/sqrt(2) ≈ 0.707,
/// outside [0.4, 0.6] for any correct estimator, so that clause stays red;
/// the supplement shows quadrupling does halve it.
#[test]
fn check_10_martingale_and_se_scaling_known_mismatch() {
    let mut failures = Vec::new();

    let market = MarketFile::default_market();
    let curve = market.curve().unwrap();
    let hw = market.model().unwrap();

    // (i) Pathwise discounting reproduces today's curve at every grid date.
    let grid: Vec<f64> = (0..=20).map(|i| i as f64 * 0.5).collect();
    let n_paths = 200_000;
    let paths = hw.simulate(&curve, &grid, n_paths, 42, test_threads()).unwrap();
    let mut worst = 0.0f64;
    for (i, &t) in grid.iter().enumerate().skip(1) {
        let mut sum = 0.0;
        let mut sum_sq = 0.0;
        for p in 0..n_paths {
            let d = paths.discount(p, i);
            sum += d;
            sum_sq += d * d;
        }
        let n = n_paths as f64;
        let mean = sum / n;
        let se = ((sum_sq / n - mean * mean).max(0.0) / (n - 1.0)).sqrt();
        let gap = (mean - curve.discount_factor(t)).abs();
        worst = worst.max(gap / se);
        if gap > 3.0 * se {
            failures.push(format!(
                "t={t}: mean discount {mean:.8} vs curve {:.8} (gap {gap:.2e} > 3se {:.2e})",
                curve.discount_factor(t),
                3.0 * se
            ));
        }
    }

    // (ii) Error scaling when the path count doubles.
    let se_50 = terminal_discount_se(&curve, &hw, 50_000);
    let se_100 = terminal_discount_se(&curve, &hw, 100_000);
    let ratio = se_100 / se_50;
    if !(0.4..=0.6).contains(&ratio) {
        failures.push(format!(
            "doubling paths scaled the standard error by {ratio:.4}, outside [0.4, 0.6]"
        ));
    }

    conclude(
        10,
        failures,
        format!("worst martingale gap {worst:.2}se; doubling ratio {ratio:.4}"),
    );
}

/// Quadrupling the path count halves the standard error (the 1/sqrt(n) law
/// behind check 10's scaling clause).
#[test]
fn check_10_supplement_se_scaling_four_x() {
    let market = MarketFile::default_market();
    let curve = market.curve().unwrap();
    let hw = market.model().unwrap();
    let se_50 = terminal_discount_se(&curve, &hw, 50_000);
    let se_200 = terminal_discount_se(&curve, &hw, 200_000);
    let ratio = se_200 / se_50;
    assert!(
        (0.4..=0.6).contains(&ratio),
        "quadrupling paths scaled the standard error by {ratio:.4}, outside [0.4, 0.6]"
    );
}
