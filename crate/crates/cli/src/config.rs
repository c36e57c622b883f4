use std::path::Path;

use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

use hyperdelta::delta::{validate_factorization, AffineFactorization, IntegrationConfig, TestFunction};
use hyperdelta::horn::HornConfig;
use hyperdelta::verify::VerifyConfig;

use crate::CliError;

pub fn load<T: DeserializeOwned>(path: &Path) -> Result<T, CliError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::Config(format!("cannot read {}: {e}", path.display())))?;
    serde_json::from_str(&text).map_err(|e| CliError::Config(format!("{}: {e}", path.display())))
}

/// One `P`, `Q` pair. Without an explicit test function a unit Gaussian
/// centred at `(u, v)` is used.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct VerifyCase {
    #[serde(default)]
    pub name: Option<String>,
    #[serde(default = "one")]
    pub a: f64,
    pub u: Vec<f64>,
    #[serde(default = "one")]
    pub b: f64,
    pub v: Vec<f64>,
    #[serde(default)]
    pub test_function: Option<TestFunction>,
}

fn one() -> f64 {
    1.0
}

impl VerifyCase {
    pub fn label(&self, index: usize) -> String {
        self.name.clone().unwrap_or_else(|| format!("case{}", index + 1))
    }

    pub fn test_function(&self) -> Result<TestFunction, CliError> {
        let phi = match &self.test_function {
            Some(t) => t.clone(),
            None => TestFunction::gaussian(self.u.iter().chain(&self.v).copied().collect(), 1.0)
                .map_err(|e| CliError::Config(e.to_string()))?,
        };
        phi.validated().map_err(|e| CliError::Config(e.to_string()))
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct VerifyFile {
    pub seed: u64,
    pub cases: Vec<VerifyCase>,
    #[serde(default)]
    pub settings: VerifyConfig,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FactorSpec {
    pub gradient: Vec<f64>,
    #[serde(default)]
    pub offset: f64,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct IntegrateFile {
    pub seed: u64,
    pub factors: Vec<FactorSpec>,
    pub test_function: TestFunction,
    #[serde(default)]
    pub integration: IntegrationConfig,
}

impl IntegrateFile {
    pub fn factorization(&self) -> Result<AffineFactorization, CliError> {
        let raw = self.factors.iter().map(|f| (f.gradient.clone(), f.offset)).collect();
        validate_factorization(raw).map_err(|e| CliError::Config(e.to_string()))
    }
}

pub type HornFile = HornConfig;
