//! Acceptance criteria for the verification engine.
//!
//! Runs as a plain binary (no libtest harness) so that the one-line verdict
//! per criterion is always visible. Exits non-zero if any criterion fails.

use std::process::ExitCode;
use std::time::{Duration, Instant};

use xxz_core::verify::{run_suite, ReportEntry, Role, SuiteConfig, VerificationReport};

/// Default base tolerance; the suite's exact class is `BASE / 100`.
const BASE: f64 = 1e-10;

type Outcome = Result<String, String>;

fn config(checks: &[&str], sites: std::ops::RangeInclusive<usize>) -> SuiteConfig {
    SuiteConfig {
        sites: sites.collect(),
        checks: checks.iter().map(|s| (*s).to_owned()).collect(),
        tolerance: BASE,
        ..Default::default()
    }
}

fn run(cfg: &SuiteConfig) -> Result<(VerificationReport, Duration), String> {
    let start = Instant::now();
    let report = run_suite(cfg).map_err(|e| e.to_string())?;
    Ok((report, start.elapsed()))
}

fn describe(e: &ReportEntry) -> String {
    let p = &e.params;
    format!(
        "{} (mu={:.4}, m={:.4}, zeta={:.4}, N={:?}, case={:?}, gradation={:?}): {}",
        e.check_name,
        p.mu,
        p.m,
        p.zeta,
        p.n,
        p.case,
        p.gradation,
        e.message.as_deref().unwrap_or("")
    )
}

/// Every entry of `name` has a residual strictly below `limit`.
fn require_below(report: &VerificationReport, name: &str, limit: f64) -> Outcome {
    let entries: Vec<_> = report.entries_named(name).collect();
    if entries.is_empty() {
        return Err(format!("{name}: no entries"));
    }
    if let Some(bad) = entries.iter().find(|e| e.residual.is_none_or(|r| !(r < limit))) {
        return Err(format!("{name} above {limit:e}: {}", describe(bad)));
    }
    Ok(format!(
        "{name} max {:.2e} < {limit:e} over {} entries",
        report.max_residual(name),
        entries.len()
    ))
}

fn require_all(parts: Vec<Outcome>) -> Outcome {
    let mut ok = Vec::new();
    for p in parts {
        ok.push(p?);
    }
    Ok(ok.join("; "))
}

fn within(elapsed: Duration, limit: Duration, what: &str) -> Outcome {
    if elapsed < limit {
        Ok(format!("{what} in {:.2}s", elapsed.as_secs_f64()))
    } else {
        Err(format!(
            "{what} took {:.2}s, limit {}s",
            elapsed.as_secs_f64(),
            limit.as_secs()
        ))
    }
}

fn yang_baxter() -> Outcome {
    // 20 λ-samples per entry become 100 numeric pairs plus 20 coefficient-level checks
    let (report, elapsed) = run(&config(&["yang_baxter"], 1..=1))?;
    require_all(vec![
        require_below(&report, "yang_baxter", 1e-12),
        within(elapsed, Duration::from_secs(1), "20 draws x 2 gradations"),
    ])
}

fn reflection() -> Outcome {
    let (report, _) = run(&config(&["reflection_equation", "k_matrix_identification"], 1..=1))?;
    require_all(vec![
        require_below(&report, "reflection_equation", 1e-10),
        require_below(&report, "k_matrix_identification", 1e-12),
    ])
}

fn blob_algebra() -> Outcome {
    let (report, _) = run(&config(&["blob_relations"], 1..=6))?;
    require_below(&report, "blob_relations", 1e-12)
}

fn quantum_algebra() -> Outcome {
    let (report, _) = run(&config(&["uq_relations"], 1..=1))?;
    require_below(&report, "uq_relations", 1e-12)
}

fn transfer_commutativity() -> Outcome {
    let (report, _) = run(&config(&["transfer_commutativity"], 1..=5))?;
    let at_six = SuiteConfig {
        draws: 1,
        ..config(&["transfer_commutativity"], 6..=6)
    };
    let (report6, elapsed) = run(&at_six)?;
    require_all(vec![
        require_below(&report, "transfer_commutativity", 1e-10),
        require_below(&report6, "transfer_commutativity", 1e-10),
        within(
            elapsed,
            Duration::from_secs(30),
            "N=6, cases I/II/III, both gradations, 20 pairs",
        ),
    ])
}

fn charge_routes() -> Outcome {
    let names = [
        "charge_towers",
        "charges_homogeneous_extraction",
        "charges_principal_extraction",
    ];
    let (report, _) = run(&config(&names, 1..=4))?;
    require_all(names.iter().map(|n| require_below(&report, n, 1e-10)).collect())
}

fn intertwiners() -> Outcome {
    let names = ["intertwiner_k", "intertwiner_l", "intertwiner_t"];
    let (report, _) = run(&config(&names, 1..=3))?;
    require_all(names.iter().map(|n| require_below(&report, n, 1e-10)).collect())
}

fn exchange() -> Outcome {
    let (report, _) = run(&config(&["exchange_relations"], 1..=4))?;
    require_below(&report, "exchange_relations", 1e-10)
}

fn symmetry() -> Outcome {
    let (report, _) = run(&config(&["symmetry"], 1..=5))?;
    require_below(&report, "symmetry", 1e-10)
}

fn hamiltonian() -> Outcome {
    let names = [
        "hamiltonian_routes",
        "hamiltonian_charge_commutation",
        "blob_charge_commutation",
    ];
    let (report, _) = run(&config(&names, 1..=6))?;
    require_all(vec![
        require_below(&report, "hamiltonian_routes", 1e-9),
        require_below(&report, "hamiltonian_charge_commutation", 1e-10),
        require_below(&report, "blob_charge_commutation", 1e-10),
    ])
}

fn braid() -> Outcome {
    let (report, _) = run(&config(&["cylinder_braid"], 1..=3))?;
    require_below(&report, "cylinder_braid", 1e-10)
}

fn controls() -> Outcome {
    let names = ["control_perturbed_x1", "control_perturbed_m"];
    let (report, _) = run(&config(&names, 1..=4))?;
    let mut out = Vec::new();
    for name in names {
        let entries: Vec<_> = report.entries_named(name).collect();
        if entries.is_empty() {
            return Err(format!("{name}: no entries"));
        }
        if let Some(bad) = entries.iter().find(|e| e.residual.is_none_or(|r| !(r > 1e-4))) {
            return Err(format!("{name} not detected: {}", describe(bad)));
        }
        let min = entries.iter().filter_map(|e| e.residual).fold(f64::INFINITY, f64::min);
        out.push(format!("{name} min {min:.2e} > 1e-4"));
    }
    if !report.pass {
        return Err("controls were not counted as passing detections".into());
    }
    Ok(out.join("; "))
}

fn determinism_and_runtime() -> Outcome {
    let cfg = SuiteConfig::default();
    let (first, elapsed) = run(&cfg)?;
    let (second, _) = run(&cfg)?;
    if first != second || first.to_json() != second.to_json() {
        return Err("two runs with the same seed differ".into());
    }
    if !first.pass {
        let bad: Vec<_> = first.failures().take(3).map(describe).collect();
        return Err(format!("default suite failed: {}", bad.join(" | ")));
    }
    let informational: Vec<_> = first
        .entries
        .iter()
        .filter(|e| e.role == Role::Informational && !e.pass)
        .map(|e| e.check_name.as_str())
        .collect::<std::collections::BTreeSet<_>>()
        .into_iter()
        .collect();
    let note = if informational.is_empty() {
        String::new()
    } else {
        format!("; informational non-zero: {}", informational.join(", "))
    };
    within(
        elapsed,
        Duration::from_secs(120),
        &format!("default suite, {} entries, identical reruns", first.entries.len()),
    )
    .map(|s| s + &note)
}

fn main() -> ExitCode {
    let criteria: [(&str, fn() -> Outcome); 13] = [
        ("Yang-Baxter equation", yang_baxter),
        ("reflection equation and K identification", reflection),
        ("blob algebra relations", blob_algebra),
        ("quantum affine algebra relations", quantum_algebra),
        ("transfer matrix commutativity", transfer_commutativity),
        ("charge route independence", charge_routes),
        ("intertwiners", intertwiners),
        ("exchange relations", exchange),
        ("boundary symmetry cases I/II/III", symmetry),
        ("Hamiltonian routes and commutation", hamiltonian),
        ("cylinder braid relation", braid),
        ("deliberate-breakage controls", controls),
        ("determinism and runtime", determinism_and_runtime),
    ];
    let mut failed = 0;
    for (i, (title, check)) in criteria.iter().enumerate() {
        match check() {
            Ok(detail) => println!("PASS criterion {:>2}: {title} — {detail}", i + 1),
            Err(detail) => {
                failed += 1;
                println!("FAIL criterion {:>2}: {title} — {detail}", i + 1);
            }
        }
    }
    println!("acceptance: {} passed, {failed} failed", criteria.len() - failed);
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
