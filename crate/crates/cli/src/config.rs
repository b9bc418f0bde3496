//! On-disk run configuration (TOML, `schema_version = 1`).
//!
//! ```toml
//! schema_version = 1
//!
//! [experiment]
//! seed = 1
//! replications = 1000
//!
//! [network]
//! rho_p = 0.01
//! alpha = 4.0
//! c = 50.0
//! link_density = 1.0        # pi rho_p r_t^2; or give r_t directly
//! branches = [2, 4, 8, 16]
//!
//! [[model]]
//! kind = "hc1"
//! h_over_rt = 0.5           # or h
//!
//! [output]
//! csv = "hc1_sweep.csv"
//! svg = "hc1_sweep.svg"
//! ```
//!
//! Model tables: `independent`; `hc1` / `hc2` with `h` or `h_over_rt`;
//! `cellular` with `rho_c` or `rho_c_over_rho_p`, `kappa`, optional
//! `power_control` and `cell_edge` (places the transmitter on the corner of
//! its cell, overriding the link length); `boolean` with `h` or `h_over_rt`
//! and `rho_b` or `coverage` (`rho_b pi h^2`). Every model may override `c`.

use std::f64::consts::PI;
use std::fmt;
use std::path::{Path, PathBuf};

use netsim::pointproc::{rho_c_for_cell_edge, HexLattice};
use netsim::{ActivationModel, ExperimentSpec, NetworkConfig};
use serde::Deserialize;

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq)]
pub struct ConfigError {
    pub line: Option<usize>,
    pub message: String,
}

impl fmt::Display for ConfigError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.line {
            Some(line) => write!(f, "line {line}: {}", self.message),
            None => f.write_str(&self.message),
        }
    }
}

impl std::error::Error for ConfigError {}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub schema_version: u32,
    #[serde(default)]
    pub experiment: ExperimentSection,
    pub network: NetworkSection,
    #[serde(rename = "model")]
    pub models: Vec<ModelSection>,
    #[serde(default)]
    pub output: OutputSection,
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentSection {
    #[serde(default)]
    pub seed: u64,
    #[serde(default = "default_replications")]
    pub replications: usize,
}

impl Default for ExperimentSection {
    fn default() -> Self {
        Self { seed: 0, replications: default_replications() }
    }
}

fn default_replications() -> usize {
    1000
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NetworkSection {
    pub rho_p: f64,
    pub alpha: f64,
    #[serde(default = "default_c")]
    pub c: f64,
    pub r_t: Option<f64>,
    pub link_density: Option<f64>,
    pub branches: Vec<usize>,
}

fn default_c() -> f64 {
    50.0
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(tag = "kind", deny_unknown_fields)]
pub enum ModelSection {
    #[serde(rename = "independent")]
    Independent { c: Option<f64> },
    #[serde(rename = "hc1")]
    HardCoreI { h: Option<f64>, h_over_rt: Option<f64>, c: Option<f64> },
    #[serde(rename = "hc2")]
    HardCoreII { h: Option<f64>, h_over_rt: Option<f64>, c: Option<f64> },
    #[serde(rename = "cellular")]
    Cellular {
        rho_c: Option<f64>,
        rho_c_over_rho_p: Option<f64>,
        kappa: u32,
        #[serde(default)]
        power_control: bool,
        #[serde(default)]
        cell_edge: bool,
        c: Option<f64>,
    },
    #[serde(rename = "boolean")]
    Boolean {
        rho_b: Option<f64>,
        coverage: Option<f64>,
        h: Option<f64>,
        h_over_rt: Option<f64>,
        c: Option<f64>,
    },
}

#[derive(Debug, Clone, Default, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputSection {
    pub csv: Option<PathBuf>,
    pub svg: Option<PathBuf>,
}

/// 1-based line of the first `key =` assignment, searching from the
/// `nth` occurrence of `[[model]]` when given.
fn line_of(text: &str, key: &str, model_index: Option<usize>) -> Option<usize> {
    let mut lines = text.lines().enumerate();
    if let Some(nth) = model_index {
        let mut seen = 0;
        for (_, line) in lines.by_ref() {
            if line.trim() == "[[model]]" {
                if seen == nth {
                    break;
                }
                seen += 1;
            }
        }
    }
    lines
        .find(|(_, line)| {
            let t = line.trim_start();
            t.strip_prefix(key).is_some_and(|rest| rest.trim_start().starts_with('='))
        })
        .map(|(i, _)| i + 1)
}

/// Config keys that can produce a validation message.
fn culprit_keys(message: &str) -> &'static [&'static str] {
    const TABLE: [(&str, &[&str]); 7] = [
        ("radius h", &["h", "h_over_rt"]),
        ("rho_c", &["rho_c", "rho_c_over_rho_p"]),
        ("rho_b", &["rho_b", "coverage"]),
        ("alpha", &["alpha"]),
        ("rho_p", &["rho_p"]),
        ("r_t", &["r_t", "link_density", "cell_edge"]),
        ("c must", &["c"]),
    ];
    TABLE.iter().find(|(needle, _)| message.contains(needle)).map_or(&[], |(_, keys)| keys)
}

fn pick(a: Option<f64>, b: Option<f64>, names: (&str, &str)) -> Result<f64, String> {
    match (a, b) {
        (Some(v), None) | (None, Some(v)) => Ok(v),
        (Some(_), Some(_)) => Err(format!("give only one of `{}` and `{}`", names.0, names.1)),
        (None, None) => Err(format!("one of `{}` or `{}` is required", names.0, names.1)),
    }
}

impl RunConfig {
    pub fn parse(text: &str) -> Result<Self, ConfigError> {
        let config: RunConfig = toml::from_str(text).map_err(|e| {
            let mut line = e.span().map(|s| text[..s.start].matches('\n').count() + 1);
            // table-level errors point at the header; prefer the offending key
            let unknown = e.message().strip_prefix("unknown field `").and_then(|r| r.split('`').next());
            if let (Some(start), Some(key)) = (line, unknown) {
                let rest = text.lines().skip(start - 1).collect::<Vec<_>>().join("\n");
                if let Some(offset) = line_of(&rest, key, None) {
                    line = Some(start + offset - 1);
                }
            }
            ConfigError { line, message: e.message().to_string() }
        })?;
        config.check(text)?;
        Ok(config)
    }

    pub fn load(path: &Path) -> Result<Self, ConfigError> {
        let text = std::fs::read_to_string(path).map_err(|e| ConfigError {
            line: None,
            message: format!("cannot read {}: {e}", path.display()),
        })?;
        Self::parse(&text)
    }

    fn check(&self, text: &str) -> Result<(), ConfigError> {
        let at = |key: &str, model: Option<usize>, message: String| ConfigError {
            line: line_of(text, key, model).or_else(|| line_of(text, key, None)),
            message,
        };
        if self.schema_version != SCHEMA_VERSION {
            return Err(at(
                "schema_version",
                None,
                format!("unsupported schema_version {}; expected {SCHEMA_VERSION}", self.schema_version),
            ));
        }
        if self.experiment.replications == 0 {
            return Err(at("replications", None, "replications must be >= 1".into()));
        }
        if self.network.branches.is_empty() || self.network.branches.contains(&0) {
            return Err(at("branches", None, "branches must be a non-empty list of positive integers".into()));
        }
        if self.models.is_empty() {
            return Err(ConfigError { line: None, message: "at least one [[model]] table is required".into() });
        }
        self.link_length().map_err(|m| {
            let key = if self.network.r_t.is_some() { "r_t" } else { "link_density" };
            at(key, None, m)
        })?;
        for (i, model) in self.models.iter().enumerate() {
            let configs = self.points_for(model).map_err(|(key, m)| at(key, Some(i), m))?;
            for cfg in configs {
                cfg.validate().map_err(|e| {
                    let message = e.to_string();
                    let line = culprit_keys(&message)
                        .iter()
                        .find_map(|key| line_of(text, key, Some(i)).or_else(|| line_of(text, key, None)))
                        .or_else(|| line_of(text, "kind", Some(i)));
                    ConfigError { line, message }
                })?;
            }
        }
        Ok(())
    }

    fn link_length(&self) -> Result<f64, String> {
        let net = &self.network;
        let r_t = match (net.r_t, net.link_density) {
            (Some(r), None) => r,
            (None, Some(d)) if d > 0.0 && net.rho_p > 0.0 => (d / (PI * net.rho_p)).sqrt(),
            (None, Some(d)) => return Err(format!("link_density must be > 0, got {d}")),
            (Some(_), Some(_)) => return Err("give only one of `r_t` and `link_density`".into()),
            (None, None) => return Err("one of `r_t` or `link_density` is required".into()),
        };
        if !(r_t.is_finite() && r_t > 0.0) {
            return Err(format!("r_t must be > 0, got {r_t}"));
        }
        Ok(r_t)
    }

    /// Network configuration for one model at every branch count.
    fn points_for(&self, model: &ModelSection) -> Result<Vec<NetworkConfig>, (&'static str, String)> {
        let net = &self.network;
        let mut r_t = self.link_length().map_err(|m| ("r_t", m))?;
        let h_of = |h: Option<f64>, h_over_rt: Option<f64>, r_t: f64| -> Result<f64, (&'static str, String)> {
            pick(h, h_over_rt.map(|k| k * r_t), ("h", "h_over_rt")).map_err(|m| ("h", m))
        };
        let (activation, c) = match *model {
            ModelSection::Independent { c } => (ActivationModel::Independent, c),
            ModelSection::HardCoreI { h, h_over_rt, c } => {
                (ActivationModel::HardCoreI { h: h_of(h, h_over_rt, r_t)? }, c)
            }
            ModelSection::HardCoreII { h, h_over_rt, c } => {
                (ActivationModel::HardCoreII { h: h_of(h, h_over_rt, r_t)? }, c)
            }
            ModelSection::Cellular { rho_c, rho_c_over_rho_p, kappa, power_control, cell_edge, c } => {
                let rho_c = pick(rho_c, rho_c_over_rho_p.map(|k| k * net.rho_p), ("rho_c", "rho_c_over_rho_p"))
                    .map_err(|m| ("rho_c", m))?;
                if cell_edge {
                    let lattice = HexLattice::new(rho_c, kappa).map_err(|e| ("kappa", e.to_string()))?;
                    r_t = lattice.circumradius();
                    debug_assert!((rho_c_for_cell_edge(r_t) - rho_c).abs() <= 1e-12 * rho_c);
                }
                (ActivationModel::Cellular { rho_c, kappa, power_control }, c)
            }
            ModelSection::Boolean { rho_b, coverage, h, h_over_rt, c } => {
                let h = h_of(h, h_over_rt, r_t)?;
                let rho_b = pick(rho_b, coverage.map(|k| k / (PI * h * h)), ("rho_b", "coverage"))
                    .map_err(|m| ("rho_b", m))?;
                (ActivationModel::Boolean { rho_b, h }, c)
            }
        };
        let c = c.unwrap_or(net.c);
        Ok(net
            .branches
            .iter()
            .map(|&n_branches| NetworkConfig {
                rho_p: net.rho_p,
                alpha: net.alpha,
                n_branches,
                c,
                r_t,
                model: activation.clone(),
            })
            .collect())
    }

    /// Sweep points, models in file order and branch counts within each model.
    pub fn points(&self) -> Vec<NetworkConfig> {
        self.models
            .iter()
            .flat_map(|m| self.points_for(m).expect("validated at parse time"))
            .collect()
    }

    pub fn experiment(&self, seed: Option<u64>, replications: Option<usize>) -> ExperimentSpec {
        ExperimentSpec {
            points: self.points(),
            replications: replications.unwrap_or(self.experiment.replications),
            master_seed: seed.unwrap_or(self.experiment.seed),
        }
    }
}
