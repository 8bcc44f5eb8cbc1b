use std::fmt::Write as _;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::algebra::Gradation;
use crate::lattice::LeftCase;

/// Parameters an entry was computed at. Fields that a check does not
/// depend on are `None`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EntryParams {
    pub mu: f64,
    pub m: f64,
    pub zeta: f64,
    #[serde(rename = "N")]
    pub n: Option<usize>,
    pub case: Option<LeftCase>,
    pub gradation: Option<Gradation>,
}

/// How an entry contributes to the overall verdict.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Role {
    /// Must stay below tolerance.
    Mandatory,
    /// Deliberately broken identity; must stay *above* its threshold.
    Control,
    /// Reported only, never affects the verdict.
    Informational,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ReportEntry {
    pub check_name: String,
    pub params: EntryParams,
    /// Spectral parameters used, as `[re, im]`.
    pub lambda_samples: Vec<[f64; 2]>,
    /// `None` when the objects could not be constructed; see `message`.
    pub residual: Option<f64>,
    pub tolerance: f64,
    pub pass: bool,
    pub role: Role,
    /// Worst sub-relation, or the construction error.
    pub message: Option<String>,
}

/// A check/chain-length combination that was not run and why.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Skipped {
    pub check_name: String,
    #[serde(rename = "N")]
    pub n: usize,
    pub reason: String,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct VerificationReport {
    pub suite_version: String,
    pub seed: u64,
    pub tolerance: f64,
    pub pass: bool,
    pub entries: Vec<ReportEntry>,
    pub skipped: Vec<Skipped>,
}

impl VerificationReport {
    pub fn new(seed: u64, tolerance: f64, mut entries: Vec<ReportEntry>, mut skipped: Vec<Skipped>) -> Self {
        entries.sort_by(|a, b| {
            a.check_name
                .cmp(&b.check_name)
                .then_with(|| {
                    param_key(&a.params)
                        .partial_cmp(&param_key(&b.params))
                        .expect("finite parameters")
                })
                .then_with(|| a.params.case.cmp(&b.params.case))
                .then_with(|| a.params.gradation.cmp(&b.params.gradation))
        });
        skipped.sort_by(|a, b| a.check_name.cmp(&b.check_name).then(a.n.cmp(&b.n)));
        skipped.dedup();
        let pass = entries.iter().all(|e| e.pass || e.role == Role::Informational);
        Self {
            suite_version: env!("CARGO_PKG_VERSION").to_owned(),
            seed,
            tolerance,
            pass,
            entries,
            skipped,
        }
    }

    pub fn failures(&self) -> impl Iterator<Item = &ReportEntry> {
        self.entries.iter().filter(|e| !e.pass && e.role != Role::Informational)
    }

    pub fn entries_named<'a>(&'a self, name: &'a str) -> impl Iterator<Item = &'a ReportEntry> + 'a {
        self.entries.iter().filter(move |e| e.check_name == name)
    }

    /// Largest residual among entries of one check (constructive failures count as ∞).
    pub fn max_residual(&self, name: &str) -> f64 {
        self.entries_named(name)
            .map(|e| e.residual.unwrap_or(f64::INFINITY))
            .fold(0.0, f64::max)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report is serializable")
    }

    pub fn to_markdown(&self) -> String {
        let mut out = String::new();
        let verdict = if self.pass { "PASS" } else { "FAIL" };
        let _ = writeln!(out, "# Verification report\n");
        let _ = writeln!(
            out,
            "suite {} · seed {} · tolerance {:e} · **{verdict}** ({} entries, {} failed)\n",
            self.suite_version,
            self.seed,
            self.tolerance,
            self.entries.len(),
            self.failures().count()
        );
        let _ = writeln!(
            out,
            "| check | N | case | gradation | mu | m | zeta | residual | tolerance | role | pass |"
        );
        let _ = writeln!(out, "|---|---|---|---|---|---|---|---|---|---|---|");
        for e in &self.entries {
            let p = &e.params;
            let opt = |s: Option<String>| s.unwrap_or_else(|| "-".into());
            let _ = writeln!(
                out,
                "| {} | {} | {} | {} | {:.6} | {:.6} | {:.6} | {} | {:.0e} | {:?} | {} |",
                e.check_name,
                opt(p.n.map(|n| n.to_string())),
                opt(p.case.map(|c| c.to_string())),
                opt(p.gradation.map(|g| g.to_string())),
                p.mu,
                p.m,
                p.zeta,
                e.residual.map_or_else(|| "error".into(), |r| format!("{r:.3e}")),
                e.tolerance,
                e.role,
                if e.pass { "yes" } else { "**no**" },
            );
        }
        if !self.skipped.is_empty() {
            let _ = writeln!(out, "\n## Skipped\n");
            for s in &self.skipped {
                let _ = writeln!(out, "- {} at N={}: {}", s.check_name, s.n, s.reason);
            }
        }
        out
    }
}

fn param_key(p: &EntryParams) -> (f64, f64, f64, usize) {
    (p.mu, p.m, p.zeta, p.n.unwrap_or(0))
}

pub(crate) fn lambda_pair(z: Complex64) -> [f64; 2] {
    [z.re, z.im]
}
