use serde::{Deserialize, Serialize};

use crate::algebra::{Gradation, ModelParams};
use crate::error::{Error, Result};
use crate::exec::Execution;
use crate::lattice::LeftCase;

use super::CHECK_NAMES;

/// Everything that determines a suite run. Identical configs give identical
/// reports.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SuiteConfig {
    /// Fixed anisotropy; drawn per parameter draw when absent.
    pub mu: Option<f64>,
    /// Fixed boundary parameter `m`; drawn when absent.
    pub m: Option<f64>,
    /// Fixed boundary parameter `ζ`; drawn when absent.
    pub zeta: Option<f64>,
    /// Number of random parameter draws (ignored when μ, m and ζ are all fixed).
    pub draws: usize,
    /// Spectral-parameter samples per entry.
    pub lambda_samples: usize,
    /// Chain lengths to test.
    pub sites: Vec<usize>,
    pub cases: Vec<LeftCase>,
    pub gradations: Vec<Gradation>,
    /// Base relative tolerance; per-check classes scale it.
    pub tolerance: f64,
    pub seed: u64,
    /// Check-name filter; an item selects a check whose name equals it or
    /// starts with `item_`. Empty selects everything.
    pub checks: Vec<String>,
    pub execution: Execution,
}

impl Default for SuiteConfig {
    fn default() -> Self {
        Self {
            mu: None,
            m: None,
            zeta: None,
            draws: 20,
            lambda_samples: 20,
            sites: vec![1, 2, 3, 4],
            cases: LeftCase::ALL.to_vec(),
            gradations: vec![Gradation::Homogeneous, Gradation::Principal],
            tolerance: 1e-10,
            seed: 20_240_601,
            checks: Vec::new(),
            execution: Execution::default(),
        }
    }
}

impl SuiteConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.tolerance > 0.0 && self.tolerance.is_finite()) {
            return Err(Error::Config(format!(
                "tolerance must be positive, got {}",
                self.tolerance
            )));
        }
        if self.sites.is_empty() || self.sites.contains(&0) {
            return Err(Error::Config(
                "sites must be a non-empty list of positive chain lengths".into(),
            ));
        }
        if self.draws == 0 || self.lambda_samples == 0 {
            return Err(Error::Config("draws and lambda_samples must be positive".into()));
        }
        if self.cases.is_empty() || self.gradations.is_empty() {
            return Err(Error::Config("cases and gradations must be non-empty".into()));
        }
        for item in &self.checks {
            if !CHECK_NAMES.iter().any(|name| selects(item, name)) {
                return Err(Error::Unknown {
                    kind: "check",
                    value: item.clone(),
                });
            }
        }
        if let Some(mu) = self.mu {
            ModelParams::new(
                mu,
                self.m.unwrap_or(0.5),
                self.zeta.unwrap_or(0.1),
                1,
                Gradation::Homogeneous,
            )?;
        }
        Ok(())
    }

    /// Whether every model parameter is pinned, i.e. a single parameter point.
    pub fn is_fixed_point(&self) -> bool {
        self.mu.is_some() && self.m.is_some() && self.zeta.is_some()
    }

    pub fn selects(&self, check: &str) -> bool {
        self.checks.is_empty() || self.checks.iter().any(|item| selects(item, check))
    }
}

fn selects(item: &str, check: &str) -> bool {
    check == item || check.strip_prefix(item).is_some_and(|rest| rest.starts_with('_'))
}
