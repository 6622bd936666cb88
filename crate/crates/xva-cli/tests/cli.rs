//! End-to-end tests of the `xva` binary: exit codes, output schemas, and
//! run-to-run determinism.

use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn bin() -> Command {
    let mut c = Command::new(env!("CARGO_BIN_EXE_xva"));
    // Isolate from the ambient environment; individual tests opt back in.
    c.env_remove("XVA_THREADS");
    c
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("spawn xva")
}

fn stderr_of(out: &Output) -> String {
    String::from_utf8_lossy(&out.stderr).into_owned()
}

fn write_portfolio(dir: &Path) -> PathBuf {
    let path = dir.join("portfolio.json");
    std::fs::write(
        &path,
        r#"[
  {"id": "t1", "counterpartyId": "acme", "notional": 100.0, "fixedRate": 0.027,
   "maturityYears": 5.0, "direction": "payer", "rating": "A"},
  {"id": "t2", "counterpartyId": "acme", "notional": 50.0, "fixedRate": 0.02,
   "maturityYears": 3.0, "direction": "receiver", "rating": "A"},
  {"id": "t3", "counterpartyId": "zen", "notional": 80.0, "fixedRate": 0.03,
   "maturityYears": 4.0, "direction": "payer", "rating": "BB", "collateralized": true}
]"#,
    )
    .unwrap();
    path
}

const SCENARIO_HEADER: &str =
    "phi,swap,rating,cva_bp,dva_bp,fca_bp,kva_mr_bp,kva_ccr_bp,kva_cva_bp,total_bp,ir01_bp";

#[test]
fn missing_market_file_exits_2_and_names_the_path() {
    let out = run(&[
        "scenario",
        "--market",
        "/no/such/market.json",
        "--paths",
        "1000",
    ]);
    assert_eq!(out.status.code(), Some(2));
    let err = stderr_of(&out);
    assert!(
        err.contains("/no/such/market.json"),
        "stderr should name the missing file: {err}"
    );
}

#[test]
fn bad_flag_values_exit_2() {
    // Fewer paths than the scenario floor.
    let out = run(&["scenario", "--paths", "999"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr_of(&out).contains("1000"));

    // A grid step that does not divide the year.
    let out = run(&["scenario", "--paths", "1000", "--grid-months", "5"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr_of(&out).contains("grid-months"));

    // A capital-offset fraction outside [0, 1].
    let out = run(&[
        "scenario",
        "--paths",
        "1000",
        "--grid-months",
        "6",
        "--phi",
        "0,1.5",
    ]);
    assert_eq!(out.status.code(), Some(2));

    // An unparseable phi list.
    let out = run(&["scenario", "--paths", "1000", "--phi", "0,zebra"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr_of(&out).contains("zebra"));

    // Unknown flags are a usage error (clap exits 2 natively).
    let out = run(&["scenario", "--does-not-exist"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn thread_env_is_validated() {
    let out = bin()
        .args(["scenario", "--paths", "1000", "--grid-months", "6"])
        .env("XVA_THREADS", "abc")
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr_of(&out).contains("XVA_THREADS"));

    let out = bin()
        .args(["scenario", "--paths", "1000", "--grid-months", "6"])
        .env("XVA_THREADS", "0")
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr_of(&out).contains("XVA_THREADS"));
}

#[test]
fn scenario_table_shape_and_determinism() {
    let dir = tempfile::tempdir().unwrap();
    let out_a = dir.path().join("a.csv");
    let out_b = dir.path().join("b.csv");
    let out_c = dir.path().join("c.csv");

    let args = |path: &Path| {
        vec![
            "scenario".to_string(),
            "--scenario".into(),
            "naked".into(),
            "--phi".into(),
            "0,1".into(),
            "--paths".into(),
            "1000".into(),
            "--grid-months".into(),
            "6".into(),
            "--output".into(),
            path.display().to_string(),
        ]
    };

    let st = bin().args(args(&out_a)).status().unwrap();
    assert!(st.success());
    let st = bin().args(args(&out_b)).status().unwrap();
    assert!(st.success());
    // A thread cap must not change a single byte.
    let st = bin().args(args(&out_c)).env("XVA_THREADS", "3").status().unwrap();
    assert!(st.success());

    let a = std::fs::read(&out_a).unwrap();
    assert_eq!(a, std::fs::read(&out_b).unwrap(), "reruns must be byte-identical");
    assert_eq!(a, std::fs::read(&out_c).unwrap(), "thread count must not change output");

    let text = String::from_utf8(a).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], SCENARIO_HEADER);
    assert_eq!(lines.len(), 17, "header plus 2 phis x 2 directions x 4 ratings");
    assert!(lines[1].starts_with("0,Pay,AAA,"));
    assert!(lines[16].starts_with("1,Rec,CCC,"));
    for row in &lines[1..] {
        assert_eq!(row.split(',').count(), 11, "11 columns in {row:?}");
    }
}

#[test]
fn other_scenario_kinds_have_the_expected_shape() {
    let dir = tempfile::tempdir().unwrap();

    let flat = dir.path().join("flat.csv");
    let st = bin()
        .args([
            "scenario",
            "--scenario",
            "ir01Flat",
            "--phi",
            "0",
            "--paths",
            "1000",
            "--grid-months",
            "6",
            "--output",
        ])
        .arg(&flat)
        .status()
        .unwrap();
    assert!(st.success());
    let text = std::fs::read_to_string(&flat).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], format!("{SCENARIO_HEADER},hedge_change_pct"));
    assert_eq!(lines.len(), 9, "header plus 1 phi x 2 directions x 4 ratings");

    let b2b = dir.path().join("b2b.csv");
    let st = bin()
        .args([
            "scenario",
            "--scenario",
            "backToBack",
            "--phi",
            "0.5",
            "--paths",
            "1000",
            "--grid-months",
            "6",
            "--output",
        ])
        .arg(&b2b)
        .status()
        .unwrap();
    assert!(st.success());
    let text = std::fs::read_to_string(&b2b).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], SCENARIO_HEADER);
    assert_eq!(lines.len(), 9);
    assert!(lines[1].starts_with("0.5,Pay,AAA,"));
}

#[test]
fn price_and_capital_flows() {
    let dir = tempfile::tempdir().unwrap();
    let portfolio = write_portfolio(dir.path());

    let price_csv = dir.path().join("price.csv");
    let exposure_csv = dir.path().join("exposure.csv");
    let st = bin()
        .args(["price", "--paths", "500", "--grid-months", "6", "--portfolio"])
        .arg(&portfolio)
        .args(["--phi", "0.5", "--output"])
        .arg(&price_csv)
        .arg("--exposure-out")
        .arg(&exposure_csv)
        .status()
        .unwrap();
    assert!(st.success());

    let text = std::fs::read_to_string(&price_csv).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(
        lines[0],
        "counterparty,rating,collateralized,notional,cva_bp,dva_bp,fca_bp,colva_bp,\
         kva_mr_bp,kva_ccr_bp,kva_cva_bp,total_bp"
    );
    assert_eq!(lines.len(), 4, "two counterparties plus a TOTAL row");
    assert!(lines.iter().any(|l| l.starts_with("acme,A,no,150.000000,")));
    assert!(lines.iter().any(|l| l.starts_with("zen,BB,yes,80.000000,")));
    assert!(lines[3].starts_with("TOTAL,-,-,230.000000,"));

    let text = std::fs::read_to_string(&exposure_csv).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(
        lines[0],
        "counterparty,time,epe,ene,eadCEM,eadStd,eadIMM,se_epe,se_ene,se_eadCEM,se_eadStd"
    );
    assert!(lines.len() > 10);
    for row in &lines[1..] {
        assert_eq!(row.split(',').count(), 11, "11 columns in {row:?}");
    }

    let capital_csv = dir.path().join("capital.csv");
    let st = bin()
        .args(["capital", "--paths", "500", "--grid-months", "6", "--portfolio"])
        .arg(&portfolio)
        .arg("--output")
        .arg(&capital_csv)
        .status()
        .unwrap();
    assert!(st.success());
    let text = std::fs::read_to_string(&capital_csv).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], "counterparty,time_years,k_mr,k_ccr,k_cva,k_total");
    assert!(lines.len() > 10);
    for row in &lines[1..] {
        assert_eq!(row.split(',').count(), 6, "6 columns in {row:?}");
    }
}

#[test]
fn pde_check_reports_agreement() {
    let dir = tempfile::tempdir().unwrap();
    let report = dir.path().join("pde.csv");
    let st = bin()
        .args([
            "pde-check",
            "--paths",
            "4000",
            "--stride",
            "8",
            "--output",
        ])
        .arg(&report)
        .status()
        .unwrap();
    assert!(st.success());
    let text = std::fs::read_to_string(&report).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(
        lines[0],
        "phi,u_pde,u_quadrature,u_se,clean_pde,clean_quadrature,clean_se,verdict"
    );
    assert_eq!(lines.len(), 3, "header plus one row per phi");
    assert!(lines[1].starts_with("0,"));
    assert!(lines[2].starts_with("1,"));
    for row in &lines[1..] {
        assert!(row.ends_with(",ok"), "cross-check should agree: {row:?}");
    }
}
