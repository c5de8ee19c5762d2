use std::fs;
use std::path::PathBuf;
use std::process::Command;

use parahoric::cli::{
    run_with, AdmResult, Certificate, EkorResult, FibersResult, LatticeResult, NewtonResult,
    Report, SigmaResultRecord,
};
use parahoric::conformance::{ConformanceReport, Status};
use parahoric::lattice::Stratum;
use serde::de::DeserializeOwned;

fn call_env(args: &[&str], env_config: Option<PathBuf>) -> (i32, String, String) {
    let mut out = Vec::new();
    let mut err = Vec::new();
    let argv = std::iter::once("parahoric").chain(args.iter().copied());
    let code = run_with(argv, env_config, &mut out, &mut err);
    (
        code,
        String::from_utf8(out).unwrap(),
        String::from_utf8(err).unwrap(),
    )
}

fn call(args: &[&str]) -> (i32, String, String) {
    call_env(args, None)
}

fn json<T: DeserializeOwned>(args: &[&str]) -> (i32, T) {
    let mut full = args.to_vec();
    full.extend(["--format", "json"]);
    let (code, out, err) = call(&full);
    let parsed = serde_json::from_str(&out).unwrap_or_else(|e| panic!("{e}: {out} {err}"));
    (code, parsed)
}

#[test]
fn adm_json_has_thirteen_records_and_round_trips() {
    let (code, r): (_, Report<AdmResult>) = json(&["adm"]);
    assert_eq!(code, 0);
    assert_eq!(r.schema_version, 1);
    assert_eq!(r.result.records.len(), 13);
    let again: Report<AdmResult> =
        serde_json::from_str(&serde_json::to_string(&r).unwrap()).unwrap();
    assert_eq!(again, r);
}

#[test]
fn adm_basic_only_has_eleven_records() {
    let (_, r): (_, Report<AdmResult>) = json(&["adm", "--basic-only"]);
    assert_eq!(r.result.records.len(), 11);
    assert!(r
        .result
        .records
        .iter()
        .all(|x| x.basic && x.newton == "(0, 0)"));
}

#[test]
fn adm_csv_to_file_has_header() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("f.csv");
    let (code, out, _) = call(&["adm", "--format", "csv", "--out", path.to_str().unwrap()]);
    assert_eq!(code, 0);
    assert!(out.is_empty());
    let text = fs::read_to_string(&path).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("element,length,support,basic,newton"));
    assert_eq!(lines.count(), 13);
}

#[test]
fn ekor_levels() {
    let (_, r): (_, Report<EkorResult>) = json(&["ekor", "--level", "paramodular"]);
    assert_eq!(r.result.records.len(), 4);
    assert!(r.result.reference.unwrap().missing.is_empty());
    assert!(r.convention.is_some());
    let (_, r): (_, Report<EkorResult>) = json(&["ekor", "--level", "iwahori"]);
    assert_eq!(r.result.records.len(), 11);
    let (_, r): (_, Report<EkorResult>) = json(&["ekor", "--K", "s0,s2"]);
    assert_eq!(r.result.records.len(), 4);
}

#[test]
fn ekor_siegel_notes_discrepancy() {
    let (code, out, _) = call(&["ekor", "--level", "siegel"]);
    assert_eq!(code, 0);
    assert!(out.contains("KNOWN_DISCREPANCY"), "{out}");
}

#[test]
fn usage_errors_exit_two() {
    assert_eq!(call(&["ekor", "--level", "hyperspecial"]).0, 2);
    assert_eq!(call(&["newton", "--w", "s3 t"]).0, 2);
    assert_eq!(call(&["adm", "--mu", "1/2,3/2"]).0, 2);
    assert_eq!(call(&["adm", "--format", "xml"]).0, 2);
    assert_eq!(call(&["lattice", "fibers", "--stratum", "type7"]).0, 2);
    assert_eq!(call(&["closure", "--w", "s0 s1 s2 s1 s0 t"]).0, 2);
}

#[test]
fn paramodular_fibers_report_multi_valued() {
    let (code, r): (_, Report<FibersResult>) =
        json(&["fibers", "--from", "iwahori", "--to", "paramodular"]);
    assert_eq!(code, 3);
    assert_eq!(r.result.rows.len(), 4);
    let defects: Vec<&str> = r
        .result
        .defects
        .iter()
        .map(|d| d.element.as_str())
        .collect();
    assert_eq!(defects.len(), 2);
    assert!(defects.contains(&"s0 s1 s0 t"));
    let (_, _, err) = call(&["fibers", "--to", "paramodular"]);
    assert!(err.contains("MULTI_VALUED"));
}

#[test]
fn sigma_k_and_newton() {
    let (code, r): (_, Report<SigmaResultRecord>) =
        json(&["sigma-k", "--w", "s0 t", "--K", "s0,s2"]);
    assert_eq!(code, 0);
    assert_eq!(r.result.value, Ok(vec!["t".to_string()]));
    let (code, r): (_, Report<SigmaResultRecord>) =
        json(&["sigma-k", "--w", "s0 s1 s0 t", "--level", "paramodular"]);
    assert_eq!(code, 3);
    assert_eq!(r.result.value.unwrap().len(), 2);
    let (_, r): (_, Report<NewtonResult>) = json(&["newton", "--w", "s0 s1 s0 t"]);
    assert_eq!(r.result.newton, "(0, 0)");
}

#[test]
fn lattice_superspecial_with_certificate() {
    let dir = tempfile::tempdir().unwrap();
    let cert = dir.path().join("cert.json");
    let (code, r): (_, Report<LatticeResult>) = json(&[
        "lattice",
        "fibers",
        "--p",
        "3",
        "--j",
        "2",
        "--stratum",
        "superspecial",
        "--certificate",
        cert.to_str().unwrap(),
    ]);
    assert_eq!(code, 0);
    assert_eq!(r.result.points[0].count, 100);
    let c: Certificate = serde_json::from_str(&fs::read_to_string(&cert).unwrap()).unwrap();
    assert_eq!(c.stratum, Stratum::Superspecial);
    assert_eq!(c.webs[0].pairs.len(), 100);
    assert!(c.webs[0]
        .pairs
        .iter()
        .all(|p| p.inclusions.len() == 8 && p.inclusions.iter().all(|i| i.index == 1)));

    let text = dir.path().join("cert.txt");
    let (code, _, _) = call(&[
        "lattice",
        "fibers",
        "--stratum",
        "superspecial",
        "--certificate",
        text.to_str().unwrap(),
    ]);
    assert_eq!(code, 0);
    let body = fs::read_to_string(&text).unwrap();
    assert!(body.starts_with("certificate v1 p=3 j=2 Q=9"));
    assert_eq!(
        body.lines().filter(|l| l.starts_with("  pair ")).count(),
        100
    );
    assert_eq!(
        body.lines().filter(|l| l.ends_with(" index 1")).count(),
        800
    );
}

#[test]
fn lattice_type02_and_exhaustion() {
    let (_, r): (_, Report<LatticeResult>) = json(&["lattice", "fibers", "--stratum", "type02"]);
    assert_eq!(r.result.points[0].count, 19);
    let (code, _, err) = call(&[
        "lattice",
        "fibers",
        "--p",
        "3",
        "--j",
        "3",
        "--stratum",
        "type2",
        "--budget",
        "500",
    ]);
    assert_eq!(code, 4);
    assert!(err.contains("500"), "{err}");
}

#[test]
fn lattice_output_is_deterministic() {
    let args = [
        "lattice",
        "fibers",
        "--stratum",
        "type02",
        "--seed",
        "11",
        "--sample",
        "2",
        "--format",
        "json",
    ];
    assert_eq!(call(&args).1, call(&args).1);
}

#[test]
fn config_file_and_flag_precedence() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("parahoric.conf");
    fs::write(&cfg, "format = json\nseed = 11\n").unwrap();
    let (_, out, _) = call_env(&["newton", "--w", "t"], Some(cfg.clone()));
    assert!(out.trim_start().starts_with('{'));
    let (_, out, _) = call_env(
        &["newton", "--w", "t", "--format", "text"],
        Some(cfg.clone()),
    );
    assert!(out.starts_with("element"));
    let (_, out, _) = call(&[
        "--config",
        cfg.to_str().unwrap(),
        "lattice",
        "fibers",
        "--stratum",
        "ss",
    ]);
    let r: Report<LatticeResult> = serde_json::from_str(&out).unwrap();
    assert_eq!(r.result.seed, 11);
    fs::write(&cfg, "convention = sideways\n").unwrap();
    assert_eq!(call_env(&["ekor", "--level", "iwahori"], Some(cfg)).0, 2);
}

#[test]
fn conformance_without_lattice() {
    let (code, r): (_, ConformanceReport) = json(&["conformance", "--no-lattice"]);
    assert_eq!(code, 1);
    assert_eq!(r.exit_code, 1);
    assert_eq!(r.tables[0].status, Status::Match);
    assert_eq!(r.tables[1].status, Status::Match);
    assert_eq!(r.convention.to_string(), "left:s-w-sigma:twisted");
}

#[test]
fn binary_reports_exit_codes() {
    let bin = env!("CARGO_BIN_EXE_parahoric");
    let status = |args: &[&str]| Command::new(bin).args(args).output().unwrap();
    let ok = status(&["ekor", "--level", "paramodular"]);
    assert_eq!(ok.status.code(), Some(0));
    assert_eq!(String::from_utf8_lossy(&ok.stdout).lines().count(), 5);
    assert_eq!(status(&["frobnicate"]).status.code(), Some(2));
    assert_eq!(
        status(&["fibers", "--to", "paramodular"]).status.code(),
        Some(3)
    );
    let help = status(&["--help"]);
    assert_eq!(help.status.code(), Some(0));
    assert!(String::from_utf8_lossy(&help.stdout).contains("conformance"));
}
