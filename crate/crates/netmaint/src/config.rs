//! TOML configuration files.
//!
//! ```toml
//! [customers]
//! n = 2
//! a = [2.0, 2.0]
//! w = [[0.0, 1.0], [1.0, 0.0]]
//!
//! [customers.b]
//! kind = "constant"          # values: one entry per customer
//! values = [3.0, 3.0]
//! # kind = "matrix"          # values: N rows of T entries
//! # kind = "scaled"          # base (N) x profile (T): b_i(t) = base_i * profile_t
//!
//! [units]
//! mu = [12.0]
//! sigma = [1.4]
//! cost = [20.48]
//! q_max = [4.0]
//!
//! [horizon]
//! t_count = 30
//! alpha = 0.1
//! k_scenarios = 193
//! rng_seed = 1
//! ```

use std::fs;
use std::path::{Path, PathBuf};

use nalgebra::{DMatrix, DVector};
use netmaint_core::{CustomerNetwork, Horizon, UnitFleet};
use serde::{Deserialize, Serialize};

#[derive(Debug, thiserror::Error)]
pub enum ConfigError {
    #[error("cannot read {}: {source}", .path.display())]
    Read { path: PathBuf, source: std::io::Error },
    #[error("cannot write {}: {source}", .path.display())]
    Write { path: PathBuf, source: std::io::Error },
    #[error("malformed config: {0}")]
    Parse(#[from] toml::de::Error),
    #[error("cannot encode config: {0}")]
    Encode(#[from] toml::ser::Error),
    #[error("{0}")]
    Invalid(#[from] netmaint_core::Error),
}

impl ConfigError {
    pub fn category(&self) -> &'static str {
        match self {
            ConfigError::Read { .. } | ConfigError::Write { .. } => "io",
            ConfigError::Parse(_) | ConfigError::Encode(_) => "config",
            ConfigError::Invalid(e) => e.category(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConfigFile {
    pub customers: CustomersSection,
    pub units: UnitsSection,
    pub horizon: HorizonSection,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CustomersSection {
    pub n: usize,
    pub a: Vec<f64>,
    pub w: Vec<Vec<f64>>,
    pub b: Demand,
}

/// Linear utility coefficients over the horizon.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase", deny_unknown_fields)]
pub enum Demand {
    Constant { values: Vec<f64> },
    Matrix { values: Vec<Vec<f64>> },
    Scaled { base: Vec<f64>, profile: Vec<f64> },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct UnitsSection {
    pub mu: Vec<f64>,
    pub sigma: Vec<f64>,
    pub cost: Vec<f64>,
    pub q_max: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct HorizonSection {
    pub t_count: usize,
    pub alpha: f64,
    pub k_scenarios: usize,
    pub rng_seed: u64,
}

/// Validated contents of a config file.
#[derive(Debug, Clone, PartialEq)]
pub struct Config {
    pub network: CustomerNetwork,
    pub fleet: UnitFleet,
    pub horizon: Horizon,
}

fn mismatch(what: &'static str, expected: usize, found: usize) -> netmaint_core::Error {
    netmaint_core::Error::DimensionMismatch { what, expected, found }
}

impl ConfigFile {
    pub fn validate(&self) -> Result<Config, netmaint_core::Error> {
        let horizon = Horizon::new(self.horizon.t_count, self.horizon.alpha, self.horizon.k_scenarios, self.horizon.rng_seed)?;
        let c = &self.customers;
        let (n, t_count) = (c.n, horizon.t_count);
        if c.a.len() != n {
            return Err(mismatch("a", n, c.a.len()));
        }
        if c.w.len() != n {
            return Err(mismatch("w rows", n, c.w.len()));
        }
        if let Some(row) = c.w.iter().find(|row| row.len() != n) {
            return Err(mismatch("w columns", n, row.len()));
        }
        let b = match &c.b {
            Demand::Constant { values } => {
                if values.len() != n {
                    return Err(mismatch("b", n, values.len()));
                }
                DMatrix::from_fn(n, t_count, |i, _| values[i])
            }
            Demand::Matrix { values } => {
                if values.len() != n {
                    return Err(mismatch("b rows", n, values.len()));
                }
                if let Some(row) = values.iter().find(|row| row.len() != t_count) {
                    return Err(mismatch("b columns (t_count)", t_count, row.len()));
                }
                DMatrix::from_fn(n, t_count, |i, t| values[i][t])
            }
            Demand::Scaled { base, profile } => {
                if base.len() != n {
                    return Err(mismatch("b base", n, base.len()));
                }
                if profile.len() != t_count {
                    return Err(mismatch("b profile (t_count)", t_count, profile.len()));
                }
                DMatrix::from_fn(n, t_count, |i, t| base[i] * profile[t])
            }
        };
        let w = DMatrix::from_fn(n, n, |i, l| c.w[i][l]);
        let network = CustomerNetwork::new(DVector::from_column_slice(&c.a), b, w)?;
        let u = &self.units;
        let fleet = UnitFleet::new(u.mu.clone(), u.sigma.clone(), u.cost.clone(), u.q_max.clone())?;
        Ok(Config { network, fleet, horizon })
    }

    /// File contents for a validated configuration. `b` is written as a
    /// matrix unless it is constant over the horizon.
    pub fn from_config(config: &Config) -> Self {
        let net = &config.network;
        let n = net.n();
        let b = net.b();
        let constant = (0..n).all(|i| (0..b.ncols()).all(|t| b[(i, t)] == b[(i, 0)]));
        let demand = if constant {
            Demand::Constant { values: (0..n).map(|i| b[(i, 0)]).collect() }
        } else {
            Demand::Matrix { values: (0..n).map(|i| (0..b.ncols()).map(|t| b[(i, t)]).collect()).collect() }
        };
        let fleet = &config.fleet;
        ConfigFile {
            customers: CustomersSection {
                n,
                a: net.a().iter().copied().collect(),
                w: (0..n).map(|i| (0..n).map(|l| net.w()[(i, l)]).collect()).collect(),
                b: demand,
            },
            units: UnitsSection {
                mu: fleet.mu().to_vec(),
                sigma: fleet.sigma().to_vec(),
                cost: fleet.cost().to_vec(),
                q_max: fleet.q_max().to_vec(),
            },
            horizon: HorizonSection {
                t_count: config.horizon.t_count,
                alpha: config.horizon.alpha,
                k_scenarios: config.horizon.k_scenarios,
                rng_seed: config.horizon.rng_seed,
            },
        }
    }
}

pub fn parse_config(text: &str) -> Result<Config, ConfigError> {
    let file: ConfigFile = toml::from_str(text)?;
    Ok(file.validate()?)
}

pub fn load_config(path: &Path) -> Result<Config, ConfigError> {
    let text = fs::read_to_string(path).map_err(|source| ConfigError::Read { path: path.to_owned(), source })?;
    parse_config(&text)
}

pub fn config_to_string(config: &Config) -> Result<String, ConfigError> {
    Ok(toml::to_string(&ConfigFile::from_config(config))?)
}

pub fn write_config(config: &Config, path: &Path) -> Result<(), ConfigError> {
    let text = config_to_string(config)?;
    fs::write(path, text).map_err(|source| ConfigError::Write { path: path.to_owned(), source })
}
