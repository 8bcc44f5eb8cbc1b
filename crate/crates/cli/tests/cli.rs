use std::fs;
use std::process::{Command, Output};

use serde_json::Value;
use xxz_core::algebra::{Gradation, ModelParams};
use xxz_core::lattice::{hamiltonian, HamiltonianRoute};
use xxz_core::tensor::rel_residual;

fn xxz(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_xxz"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("exited normally")
}

#[test]
fn verify_at_a_generic_point_passes_with_a_json_report() {
    let out = xxz(&["verify", "--mu", "0.3", "--m", "0.7", "--zeta", "0.2", "--n", "3"]);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    let report: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(report["pass"], true);
    let entries = report["entries"].as_array().unwrap();
    assert!(!entries.is_empty());
    // chain-independent checks carry no N
    assert!(entries
        .iter()
        .all(|e| e["params"]["N"] == 3 || e["params"]["N"].is_null()));
    assert!(entries.iter().any(|e| e["params"]["N"] == 3));
}

#[test]
fn build_writes_a_four_by_four_hamiltonian_file() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("h.json");
    let out = xxz(&[
        "build",
        "--object",
        "hamiltonian",
        "--n",
        "2",
        "--mu",
        "0.3",
        "--m",
        "0.7",
        "--zeta",
        "0.2",
        "--out",
        path.to_str().unwrap(),
    ]);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    let doc: Value = serde_json::from_str(&fs::read_to_string(&path).unwrap()).unwrap();
    assert_eq!(doc["dim"], 4);
    let data = doc["data"].as_array().unwrap();
    assert_eq!(data.len(), 16);
    assert!(data.iter().all(|z| z.as_array().unwrap().len() == 2));
    assert_eq!(doc["metadata"]["object"], "hamiltonian");
    assert_eq!(doc["metadata"]["params"]["N"], 2);

    // the file parses back and agrees with the Hamiltonian assembled from
    // Pauli matrices
    match xxz_core::export::parse(&fs::read_to_string(&path).unwrap()).unwrap() {
        xxz_core::export::Exported::Matrix(h, _) => {
            let p = ModelParams::new(0.3, 0.7, 0.2, 2, Gradation::Homogeneous).unwrap();
            let pauli = hamiltonian(&p, HamiltonianRoute::Pauli).unwrap();
            assert!(rel_residual(&h, &pauli) < 1e-12);
        }
        other => panic!("expected a dense matrix, got {other:?}"),
    }
}

#[test]
fn symbolic_build_writes_laurent_terms() {
    let out = xxz(&["build", "--object", "r", "--n", "1"]);
    assert_eq!(code(&out), 0);
    let doc: Value = serde_json::from_slice(&out.stdout).unwrap();
    let degrees: Vec<i64> = doc["terms"]
        .as_array()
        .unwrap()
        .iter()
        .map(|t| t["degree"].as_i64().unwrap())
        .collect();
    assert_eq!(degrees, [-1, 1]);
    assert!(doc["metadata"].get("lambda").is_none());
}

#[test]
fn singular_boundary_fails_only_the_hamiltonian_checks() {
    let out = xxz(&[
        "verify",
        "--mu",
        "0.3",
        "--m",
        "0.7",
        "--zeta=-0.35",
        "--n",
        "2",
        "--lambda-samples",
        "3",
    ]);
    assert_eq!(code(&out), 1);
    let report: Value = serde_json::from_slice(&out.stdout).unwrap();
    let failing: Vec<&str> = report["entries"]
        .as_array()
        .unwrap()
        .iter()
        .filter(|e| e["pass"] == false && e["role"] == "mandatory")
        .map(|e| e["check_name"].as_str().unwrap())
        .collect();
    assert_eq!(failing, ["hamiltonian_charge_commutation", "hamiltonian_routes"]);
    assert!(String::from_utf8_lossy(&out.stderr).contains("singular normalization"));
}

#[test]
fn usage_errors_exit_with_two() {
    for args in [
        &["verify", "--no-such-flag"][..],
        &["verify", "--n", "0"],
        &["verify", "--checks", "nonsense"],
        &["verify", "--format", "xml"],
        &["build", "--object", "widget"],
        &["build", "--object", "r", "--mu", "0"],
        &[],
    ] {
        assert_eq!(code(&xxz(args)), 2, "{args:?}");
    }
    assert_eq!(code(&xxz(&["--help"])), 0);
}

#[test]
fn markdown_format_and_config_file() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("suite.toml");
    fs::write(
        &cfg,
        "mu = 0.4\nm = 0.9\nzeta = 0.1\nn = \"1-2\"\nchecks = [\"symmetry\"]\nformat = \"md\"\n",
    )
    .unwrap();
    let out = xxz(&["verify", "--config", cfg.to_str().unwrap()]);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    let md = String::from_utf8(out.stdout).unwrap();
    assert!(md.contains("| check | N | case |"));
    assert!(md.contains("symmetry"));
    assert!(!md.contains("yang_baxter"));

    // flags override the file
    let out = xxz(&[
        "verify",
        "--config",
        cfg.to_str().unwrap(),
        "--format",
        "json",
        "--n",
        "1",
    ]);
    let report: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert!(report["entries"]
        .as_array()
        .unwrap()
        .iter()
        .all(|e| e["params"]["N"] == 1));

    fs::write(&cfg, "sites = [1]\n").unwrap();
    assert_eq!(code(&xxz(&["verify", "--config", cfg.to_str().unwrap()])), 2);
}

#[test]
fn spectrum_writes_clustered_csv() {
    let out = xxz(&["spectrum", "--n", "2"]);
    assert_eq!(code(&out), 0);
    let csv = String::from_utf8(out.stdout).unwrap();
    let mut lines = csv.lines();
    assert_eq!(lines.next(), Some("operator,cluster,multiplicity,re,im"));
    let rows: Vec<Vec<&str>> = lines.map(|l| l.split(',').collect()).collect();
    assert_eq!(rows.iter().filter(|r| r[0] == "hamiltonian").count(), 4);
    assert_eq!(rows.iter().filter(|r| r[0] == "q1").count(), 4);
    // multiplicities are consistent with the number of rows in each cluster
    for r in &rows {
        let same = rows.iter().filter(|s| s[0] == r[0] && s[1] == r[1]).count();
        assert_eq!(same.to_string(), r[2]);
    }
}

#[test]
fn sweep_reports_one_row_per_grid_point() {
    let out = xxz(&[
        "sweep",
        "--mu",
        "0.3,0.6",
        "--zeta=-0.2:0.2:3",
        "--checks",
        "symmetry",
        "--n",
        "2",
    ]);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    let csv = String::from_utf8(out.stdout).unwrap();
    assert_eq!(csv.lines().count(), 1 + 2 * 3);
    assert!(csv.lines().skip(1).all(|l| l.ends_with(",true")));
}
