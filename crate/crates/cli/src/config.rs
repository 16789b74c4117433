//! JSON run configuration.
//!
//! ```json
//! {
//!   "n": 2, "A0": [[0.5, 0.2], [0.3, 0.4]], "l0": [0.2, 0.3],
//!   "b0": 0.5, "beta": 3.3, "kappa": 0.5, "T": 10, "dt": 0.1,
//!   "wage_mode": "differential",
//!   "paths": [{ "target": "A11", "kind": "innovator", "frontier": 0.4 }, ...]
//! }
//! ```
//!
//! `A0` may be nested rows or a flat row-major list. Coefficients without a
//! path stay constant. A follower without an explicit `leader` follows the
//! first innovator of the same family (`A` entries or `l` entries).

use std::collections::BTreeMap;
use std::path::Path;

use okidyn_core::diffusion::{Coefficient, CoefficientPath, DiffusionSchedule, PathKind};
use okidyn_core::dynamics::{SimConfig, WageMode};
use okidyn_core::perron::DEFAULT_TOL;
use okidyn_core::SquareMatrix;
use serde::{Deserialize, Serialize};

use crate::error::{CliError, Result};

/// The reference two-sector experiment, as shipped in `configs/table1.json`.
pub const TABLE1_JSON: &str = include_str!("../configs/table1.json");

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum MatrixSpec {
    Rows(Vec<Vec<f64>>),
    Flat(Vec<f64>),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum KindSpec {
    Innovator,
    Follower,
    Constant,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PathSpec {
    pub target: Coefficient,
    pub kind: KindSpec,
    pub frontier: Option<f64>,
    pub kappa: Option<f64>,
    pub leader: Option<Coefficient>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConfigFile {
    pub n: usize,
    #[serde(rename = "A0")]
    pub a0: MatrixSpec,
    pub l0: Vec<f64>,
    pub b0: f64,
    pub beta: f64,
    pub kappa: f64,
    #[serde(rename = "T")]
    pub horizon: f64,
    pub dt: f64,
    #[serde(default)]
    pub wage_mode: WageMode,
    #[serde(default)]
    pub paths: Vec<PathSpec>,
    pub tol: Option<f64>,
}

fn invalid(msg: impl Into<String>) -> CliError {
    CliError::Validation(msg.into())
}

impl ConfigFile {
    pub fn into_sim_config(self) -> Result<SimConfig> {
        let n = self.n;
        let a0 = match self.a0 {
            MatrixSpec::Rows(rows) => {
                if rows.len() != n {
                    return Err(invalid(format!("A0 has {} rows, n = {n}", rows.len())));
                }
                SquareMatrix::from_rows(&rows)
            }
            MatrixSpec::Flat(flat) => SquareMatrix::from_row_major(n, flat),
        }
        .map_err(|e| invalid(format!("A0: {e}")))?;
        if self.l0.len() != n {
            return Err(invalid(format!("l0 has {} entries, n = {n}", self.l0.len())));
        }
        if !(self.kappa > 0.0 && self.kappa.is_finite()) {
            return Err(invalid(format!("kappa must be positive, got {}", self.kappa)));
        }

        let initial = |c: Coefficient| -> Result<f64> {
            match c {
                Coefficient::A(i, j) if i < n && j < n => Ok(a0[(i, j)]),
                Coefficient::L(j) if j < n => Ok(self.l0[j]),
                _ => Err(invalid(format!("path target {c} outside a {n}-sector economy"))),
            }
        };
        let mut seen = BTreeMap::new();
        for spec in &self.paths {
            if seen.insert(spec.target, spec.kind).is_some() {
                return Err(invalid(format!("duplicate path for {}", spec.target)));
            }
        }
        let default_leader = |c: Coefficient| {
            seen.iter()
                .filter(|(_, k)| **k == KindSpec::Innovator)
                .map(|(id, _)| *id)
                .find(|id| matches!((id, c), (Coefficient::A(..), Coefficient::A(..)) | (Coefficient::L(_), Coefficient::L(_))))
        };

        let mut schedule = DiffusionSchedule::constant(&a0, &self.l0).map_err(|e| invalid(e.to_string()))?;
        for spec in &self.paths {
            let start = initial(spec.target)?;
            let kappa = spec.kappa.unwrap_or(self.kappa);
            let frontier = spec.frontier.unwrap_or(start);
            let kind = match spec.kind {
                KindSpec::Innovator => PathKind::Innovator,
                KindSpec::Constant => PathKind::Constant,
                KindSpec::Follower => {
                    let leader = spec.leader.or_else(|| default_leader(spec.target)).ok_or_else(|| {
                        invalid(format!("follower {} has no innovator to follow", spec.target))
                    })?;
                    PathKind::Follower { leader }
                }
            };
            let path = CoefficientPath {
                initial: start,
                frontier,
                kappa,
                kind,
            };
            schedule = schedule
                .with_path(spec.target, path)
                .map_err(|e| invalid(e.to_string()))?;
        }

        let config = SimConfig {
            schedule,
            b0: self.b0,
            beta: self.beta,
            horizon: self.horizon,
            dt: self.dt,
            wage_mode: self.wage_mode,
            tol: self.tol.unwrap_or(DEFAULT_TOL),
        };
        config.validate().map_err(|e| invalid(e.to_string()))?;
        Ok(config)
    }
}

pub fn parse_config(text: &str, origin: &Path) -> Result<SimConfig> {
    let file: ConfigFile = serde_json::from_str(text).map_err(|e| CliError::Parse {
        path: origin.to_path_buf(),
        message: e.to_string(),
    })?;
    file.into_sim_config()
}

pub fn load_config(path: &Path) -> Result<SimConfig> {
    let text = std::fs::read_to_string(path).map_err(|source| CliError::ReadConfig {
        path: path.to_path_buf(),
        source,
    })?;
    parse_config(&text, path)
}

pub fn table1() -> SimConfig {
    parse_config(TABLE1_JSON, Path::new("table1.json")).expect("bundled config is valid")
}
