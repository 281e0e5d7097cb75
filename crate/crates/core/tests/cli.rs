use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use sqrtnot_noise::cli::{CSV_COLUMNS, CSV_HEADER};
use sqrtnot_noise::smatrix::{GateParameter, Lead};
use sqrtnot_noise::sweep::evaluate;
use sqrtnot_noise::transport::constants::{ELEMENTARY_CHARGE, PLANCK};

fn sqrtnot(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_sqrtnot"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn field(report: &str, prefix: &str) -> f64 {
    let line = report
        .lines()
        .find(|l| l.trim_start().starts_with(prefix))
        .unwrap_or_else(|| panic!("no line starting with {prefix:?} in\n{report}"));
    line.trim_start()[prefix.len()..]
        .split_whitespace()
        .next()
        .unwrap()
        .parse()
        .unwrap()
}

#[test]
fn gate_reports_resonance() {
    let o = sqrtnot(&["gate", "--kappa", "0"]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    for (prefix, want) in [
        ("P_A =", 0.0),
        ("P_B =", 0.0),
        ("P_C =", 0.5),
        ("P_D =", 0.5),
        ("fidelity F =", 1.0),
        ("S_DD =", 0.25),
        ("S_CD =", 0.25),
    ] {
        assert!((field(&text, prefix) - want).abs() < 1e-12, "{prefix}");
    }
    assert!(text.contains("unitarity deviation"));
    assert!(text.contains("scattering matrix"));
}

#[test]
fn gate_si_noise_at_zero_temperature() {
    let o = sqrtnot(&["gate", "--kappa", "0", "--bias-voltage", "1e-5", "--temperature", "0"]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    let si_line = text
        .lines()
        .find(|l| l.starts_with("S_DD =") && l.ends_with("A^2/Hz"))
        .unwrap();
    let si: f64 = si_line.split_whitespace().nth(2).unwrap().parse().unwrap();
    let want = 0.25 * ELEMENTARY_CHARGE.powi(3) * 1e-5 / PLANCK;
    assert!((si / want - 1.0).abs() < 1e-6, "{si} vs {want}");
}

#[test]
fn gate_without_kappa_is_usage_error() {
    let o = sqrtnot(&["gate"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("Usage"));
}

#[test]
fn unknown_subcommand_is_usage_error() {
    assert_eq!(sqrtnot(&["frobnicate"]).status.code(), Some(2));
    assert_eq!(sqrtnot(&["gate", "--kappa", "nan"]).status.code(), Some(2));
}

fn parse_csv(text: &str) -> Vec<Vec<f64>> {
    text.lines()
        .skip(1)
        .map(|l| l.split(',').map(|x| x.parse().unwrap()).collect())
        .collect()
}

#[test]
fn sweep_csv_contract() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("sweep.csv");
    let o = sqrtnot(&[
        "sweep",
        "--range",
        "-10",
        "10",
        "--points",
        "2001",
        "--output",
        path.to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let bytes = fs::read(&path).unwrap();
    let text = String::from_utf8(bytes).unwrap();
    assert!(!text.contains('\r'));
    assert!(text.ends_with('\n'));
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines.len(), 2002);
    assert_eq!(lines[0], CSV_HEADER);
    assert!(lines.iter().all(|l| !l.ends_with(',')));
    assert!(lines[1001].starts_with(
        "0.000000000000,0.000000000000,0.000000000000,0.500000000000,0.500000000000,\
         1.000000000000,0.250000000000,0.250000000000,"
    ));

    let rows = parse_csv(&text);
    let tol = 10f64.powi(-12 + 2);
    for row in &rows {
        assert_eq!(row.len(), 10);
        let sum: f64 = row[1..5].iter().sum();
        assert!((sum - 1.0).abs() <= tol);
    }
}

#[test]
fn sweep_csv_recomputes_from_kappa() {
    for precision in [6usize, 12] {
        let o = sqrtnot(&[
            "sweep",
            "--range",
            "-3",
            "4",
            "--points",
            "71",
            "--precision",
            &precision.to_string(),
        ]);
        assert_eq!(o.status.code(), Some(0));
        let tol = 10f64.powi(-(precision as i32) + 2);
        for row in parse_csv(&stdout(&o)) {
            let r = evaluate(GateParameter::new(row[0]).unwrap(), Lead::A).unwrap();
            let want = [
                r.probabilities[0],
                r.probabilities[1],
                r.probabilities[2],
                r.probabilities[3],
                r.fidelity,
                r.s_dd,
                r.s_cd,
                r.unitarity_dev,
                r.norm_error,
            ];
            for (got, w) in row[1..].iter().zip(want) {
                assert!((got - w).abs() <= tol, "kappa {}: {got} vs {w}", row[0]);
            }
        }
    }
}

#[test]
fn sweep_writes_one_svg_per_column() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("out.csv");
    let o = sqrtnot(&["sweep", "--points", "201", "--plot", "-o", path.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    for column in CSV_COLUMNS {
        let svg = fs::read_to_string(dir.path().join(format!("{column}.svg"))).unwrap();
        assert!(svg.starts_with("<svg"), "{column}");
        assert!(svg.contains(">kappa<") && svg.contains(&format!(">{column}<")));
        let points = svg.lines().find(|l| l.starts_with("<polyline")).unwrap();
        assert_eq!(points.matches(',').count(), 201);
    }
}

#[test]
fn sweep_unwritable_output() {
    let o = sqrtnot(&["sweep", "--output", "/proc/definitely/not/here.csv"]);
    assert_ne!(o.status.code(), Some(0));
    assert_eq!(o.status.code(), Some(3));
}

#[test]
fn extrema_default_report() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("features.csv");
    let o = sqrtnot(&["extrema", "--output", path.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    assert!(text.contains("S_DD maxima: 2"));
    assert!(text.contains("|S_CD| maxima: 1"));
    assert!(text.contains("F maxima: 1"));
    assert!(text.contains("P_D = 1/2 roots: 2"));

    let csv = fs::read_to_string(&path).unwrap();
    let find = |curve: &str, kind: &str| -> Vec<(f64, f64)> {
        csv.lines()
            .skip(1)
            .map(|l| l.split(',').collect::<Vec<_>>())
            .filter(|f| f[0] == curve && f[1] == kind)
            .map(|f| (f[2].parse().unwrap(), f[3].parse().unwrap()))
            .collect()
    };
    let cd = find("|S_CD|", "maximum");
    assert_eq!(cd.len(), 1);
    assert!(cd[0].0.abs() < 1e-9 && (cd[0].1 - 0.25).abs() < 1e-9);
    let f = find("F", "maximum");
    assert!(f[0].0.abs() < 1e-9 && (f[0].1 - 1.0).abs() < 1e-9);
    // Every S_DD maximum is a half-transmission root.
    let roots = find("P_D - 1/2", "root");
    for (k, _) in find("S_DD", "maximum") {
        assert!(roots.iter().any(|(r, _)| (r - k).abs() < 1e-8), "{k}");
    }
}

#[test]
fn verify_passes_by_default() {
    let o = sqrtnot(&["verify"]);
    let text = stdout(&o);
    assert_eq!(o.status.code(), Some(0), "{text}");
    assert!(!text.contains("[FAIL]"));
    assert!(text.lines().filter(|l| l.starts_with("[PASS]")).count() >= 15);
}

#[test]
fn verify_is_deterministic() {
    let args = ["verify", "--seed", "42", "--electrons", "200000", "--scan-points", "100000"];
    let a = sqrtnot(&args);
    let b = sqrtnot(&args);
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(a.stdout, b.stdout);
}

#[test]
fn verify_detects_corrupt_matrix() {
    let o = sqrtnot(&["verify", "--inject-corrupt", "--electrons", "10000", "--scan-points", "100000"]);
    assert_eq!(o.status.code(), Some(1));
    let text = stdout(&o);
    let conservation = text.lines().find(|l| l.contains("conservation")).unwrap();
    assert!(conservation.starts_with("[FAIL]"));
}

#[test]
fn relative_paths_resolve_against_cwd() {
    let dir = tempfile::tempdir().unwrap();
    let o = Command::new(env!("CARGO_BIN_EXE_sqrtnot"))
        .current_dir(dir.path())
        .args(["sweep", "--points", "11", "--plot", "-o", "rel.csv"])
        .output()
        .unwrap();
    assert_eq!(o.status.code(), Some(0));
    assert!(Path::new(&dir.path().join("rel.csv")).exists());
    assert!(dir.path().join("S_DD.svg").exists());
}
