//! Network geometry and interferer activation models.
//!
//! A realization places `n = round(pi * rho_p * R^2)` potential interferers
//! uniformly in a disk of radius `R = sqrt(c * N / (pi * rho_p))` around the
//! representative receiver at the origin, then decides which of them transmit
//! according to one of the activation models below. The representative
//! transmitter sits at `(r_t, 0)`.

mod grid;
pub mod lattice;

use std::f64::consts::PI;
use std::io::{self, Write};

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use grid::GridIndex;

pub use lattice::{
    hex_lattice_band0, rho_c_for_cell_edge, schedule_cellular, BaseStationLattice,
    CellularSchedule, HexLattice, Site, SUPPORTED_REUSE,
};

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct Point {
    pub x: f64,
    pub y: f64,
}

impl Point {
    pub const ORIGIN: Point = Point { x: 0.0, y: 0.0 };

    pub fn new(x: f64, y: f64) -> Self {
        Self { x, y }
    }

    pub fn norm(&self) -> f64 {
        self.x.hypot(self.y)
    }

    pub fn distance(&self, other: &Point) -> f64 {
        (self.x - other.x).hypot(self.y - other.y)
    }
}

/// Rule deciding which potential interferers transmit.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", deny_unknown_fields)]
pub enum ActivationModel {
    /// Every potential interferer transmits.
    #[serde(rename = "independent")]
    Independent,
    /// Nodes with any other node (or the representative transmitter) closer
    /// than `h` are silenced.
    #[serde(rename = "hc1")]
    HardCoreI { h: f64 },
    /// A node transmits only if its mark is lower than every node closer than
    /// `h`, and it is at least `h` from the representative transmitter.
    #[serde(rename = "hc2")]
    HardCoreII { h: f64 },
    /// TDMA uplink on a hexagonal lattice with reuse factor `kappa`: the
    /// lowest-mark mobile of each band-0 cell (other than the origin cell)
    /// transmits, optionally inverting the path loss to its base station.
    #[serde(rename = "cellular")]
    Cellular {
        rho_c: f64,
        kappa: u32,
        #[serde(default)]
        power_control: bool,
    },
    /// Nodes within `h` of one of the uniformly placed cluster centers
    /// (density `rho_b`) transmit.
    #[serde(rename = "boolean")]
    Boolean { rho_b: f64, h: f64 },
}

impl ActivationModel {
    pub fn tag(&self) -> &'static str {
        match self {
            Self::Independent => "independent",
            Self::HardCoreI { .. } => "hc1",
            Self::HardCoreII { .. } => "hc2",
            Self::Cellular { .. } => "cellular",
            Self::Boolean { .. } => "boolean",
        }
    }

    /// Compact `key=value;...` description, free of commas.
    pub fn params_label(&self) -> String {
        match self {
            Self::Independent => String::new(),
            Self::HardCoreI { h } | Self::HardCoreII { h } => format!("h={h}"),
            Self::Cellular { rho_c, kappa, power_control } => {
                format!("rho_c={rho_c};kappa={kappa};power_control={power_control}")
            }
            Self::Boolean { rho_b, h } => format!("rho_b={rho_b};h={h}"),
        }
    }

    pub fn power_control(&self) -> bool {
        matches!(self, Self::Cellular { power_control: true, .. })
    }

    fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::InvalidConfig(msg));
        match *self {
            Self::Independent => Ok(()),
            Self::HardCoreI { h } | Self::HardCoreII { h } => {
                if h.is_finite() && h >= 0.0 {
                    Ok(())
                } else {
                    bad(format!("hard-core radius h must be >= 0, got {h}"))
                }
            }
            Self::Cellular { rho_c, kappa, .. } => {
                if !(rho_c.is_finite() && rho_c > 0.0) {
                    return bad(format!("base-station density rho_c must be > 0, got {rho_c}"));
                }
                if !SUPPORTED_REUSE.contains(&kappa) {
                    return Err(Error::UnsupportedReuse { kappa });
                }
                Ok(())
            }
            Self::Boolean { rho_b, h } => {
                if !(rho_b.is_finite() && rho_b >= 0.0) {
                    return bad(format!("cluster density rho_b must be >= 0, got {rho_b}"));
                }
                if !(h.is_finite() && h >= 0.0) {
                    return bad(format!("cluster radius h must be >= 0, got {h}"));
                }
                Ok(())
            }
        }
    }
}

/// Physical and model parameters of one simulated network.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NetworkConfig {
    /// Density of potential interferers per unit area.
    pub rho_p: f64,
    /// Path-loss exponent, strictly greater than 2.
    pub alpha: f64,
    /// Number of receive diversity branches `N`.
    pub n_branches: usize,
    /// Ratio `n / N` of potential interferers to branches.
    pub c: f64,
    /// Length of the representative link.
    pub r_t: f64,
    pub model: ActivationModel,
}

impl NetworkConfig {
    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::InvalidConfig(msg));
        if !(self.alpha.is_finite() && self.alpha > 2.0) {
            return bad(format!("path-loss exponent alpha must be > 2, got {}", self.alpha));
        }
        if !(self.rho_p.is_finite() && self.rho_p > 0.0) {
            return bad(format!("rho_p must be > 0, got {}", self.rho_p));
        }
        if self.n_branches == 0 {
            return bad("number of branches N must be >= 1".into());
        }
        if !(self.c.is_finite() && self.c > 0.0) {
            return bad(format!("c must be > 0, got {}", self.c));
        }
        if !(self.r_t.is_finite() && self.r_t > 0.0) {
            return bad(format!("link length r_t must be > 0, got {}", self.r_t));
        }
        self.model.validate()
    }

    /// Network radius `R = sqrt(c N / (pi rho_p))`.
    pub fn radius(&self) -> f64 {
        (self.c * self.n_branches as f64 / (PI * self.rho_p)).sqrt()
    }

    /// Number of potential interferers, `round(pi rho_p R^2)`.
    pub fn potential_count(&self) -> usize {
        let r = self.radius();
        (PI * self.rho_p * r * r).round() as usize
    }

    pub fn transmitter(&self) -> Point {
        Point::new(self.r_t, 0.0)
    }

    /// Transmit power of the representative transmitter. Under cellular power
    /// control it inverts the path loss to the origin base station.
    pub fn tx_power(&self) -> f64 {
        if self.model.power_control() {
            self.r_t.powf(self.alpha)
        } else {
            1.0
        }
    }

    pub fn with_branches(&self, n_branches: usize) -> Self {
        Self { n_branches, ..self.clone() }
    }
}

/// One draw of the network: positions, marks and the resulting activation.
#[derive(Debug, Clone, PartialEq)]
pub struct Realization {
    pub positions: Vec<Point>,
    /// Contention marks; empty for models that do not use them.
    pub marks: Vec<f64>,
    pub active: Vec<bool>,
    /// Transmit power of each node, 0 for inactive ones.
    pub power_weight: Vec<f64>,
    /// Distance to the serving base station (cellular model only).
    pub serving_distance: Option<Vec<f64>>,
}

impl Realization {
    pub fn len(&self) -> usize {
        self.positions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.positions.is_empty()
    }

    pub fn active_count(&self) -> usize {
        self.active.iter().filter(|&&a| a).count()
    }

    pub fn active_indices(&self) -> impl Iterator<Item = usize> + '_ {
        self.active.iter().enumerate().filter(|(_, &a)| a).map(|(i, _)| i)
    }

    /// Received-power weights `P_i r_i^{-alpha}` of the active nodes, in index order.
    pub fn received_weights(&self, alpha: f64) -> Vec<f64> {
        self.active_indices()
            .map(|i| self.power_weight[i] * self.positions[i].norm().powf(-alpha))
            .collect()
    }

    /// Debug dump with columns `x,y,mark,active,power_weight,serving_distance`.
    /// Missing marks and serving distances are written as empty fields.
    pub fn write_csv<W: Write>(&self, mut out: W) -> io::Result<()> {
        writeln!(out, "x,y,mark,active,power_weight,serving_distance")?;
        for (i, p) in self.positions.iter().enumerate() {
            let mark = self.marks.get(i).map(|m| m.to_string()).unwrap_or_default();
            let serving = self
                .serving_distance
                .as_ref()
                .map(|s| s[i].to_string())
                .unwrap_or_default();
            writeln!(
                out,
                "{},{},{},{},{},{}",
                p.x,
                p.y,
                mark,
                u8::from(self.active[i]),
                self.power_weight[i],
                serving
            )?;
        }
        Ok(())
    }
}

/// `count` points uniform in the disk of the given radius about the origin.
pub fn uniform_in_disk<R: Rng + ?Sized>(radius: f64, count: usize, rng: &mut R) -> Vec<Point> {
    (0..count)
        .map(|_| {
            let r = radius * rng.random::<f64>().sqrt();
            let theta = 2.0 * PI * rng.random::<f64>();
            Point::new(r * theta.cos(), r * theta.sin())
        })
        .collect()
}

/// The `n` potential-interferer positions of a network.
pub fn sample_potential_interferers<R: Rng + ?Sized>(
    config: &NetworkConfig,
    rng: &mut R,
) -> Vec<Point> {
    uniform_in_disk(config.radius(), config.potential_count(), rng)
}

/// i.i.d. uniform marks on `[0, 1)`.
pub fn sample_marks<R: Rng + ?Sized>(count: usize, rng: &mut R) -> Vec<f64> {
    (0..count).map(|_| rng.random::<f64>()).collect()
}

/// HC-I activation: a node is silenced if the representative transmitter or
/// any other node lies strictly closer than `h`.
pub fn thin_hc1(positions: &[Point], x_t: Point, h: f64) -> Vec<bool> {
    if h <= 0.0 {
        return vec![true; positions.len()];
    }
    let index = GridIndex::new(positions, h);
    positions
        .iter()
        .enumerate()
        .map(|(i, p)| {
            if p.distance(&x_t) < h {
                return false;
            }
            let mut crowded = false;
            index.for_each_within(positions, p, h, Some(i), |_, _| crowded = true);
            !crowded
        })
        .collect()
}

/// HC-II activation: a node transmits if it is at least `h` from the
/// representative transmitter and its mark beats every node strictly closer
/// than `h`. Equal marks are resolved in favor of the lower index.
pub fn thin_hc2(positions: &[Point], marks: &[f64], x_t: Point, h: f64) -> Vec<bool> {
    assert_eq!(positions.len(), marks.len(), "one mark per position");
    if h <= 0.0 {
        return vec![true; positions.len()];
    }
    let index = GridIndex::new(positions, h);
    positions
        .iter()
        .enumerate()
        .map(|(i, p)| {
            if p.distance(&x_t) < h {
                return false;
            }
            let mut dominated = false;
            index.for_each_within(positions, p, h, Some(i), |j, _| {
                if (marks[j], j) < (marks[i], i) {
                    dominated = true;
                }
            });
            !dominated
        })
        .collect()
}

/// Boolean cluster activation: a node transmits if some center lies strictly
/// within distance `h`.
pub fn activate_boolean(positions: &[Point], centers: &[Point], h: f64) -> Vec<bool> {
    if h <= 0.0 || centers.is_empty() {
        return vec![false; positions.len()];
    }
    let index = GridIndex::new(centers, h);
    positions
        .iter()
        .map(|p| {
            let mut covered = false;
            index.for_each_within(centers, p, h, None, |_, _| covered = true);
            covered
        })
        .collect()
}

/// Draws a complete realization of the configured network.
pub fn realize<R: Rng + ?Sized>(config: &NetworkConfig, rng: &mut R) -> Result<Realization> {
    config.validate()?;
    let positions = sample_potential_interferers(config, rng);
    let n = positions.len();
    let x_t = config.transmitter();
    let mut marks = Vec::new();
    let mut serving_distance = None;

    let active = match config.model {
        ActivationModel::Independent => vec![true; n],
        ActivationModel::HardCoreI { h } => thin_hc1(&positions, x_t, h),
        ActivationModel::HardCoreII { h } => {
            marks = sample_marks(n, rng);
            thin_hc2(&positions, &marks, x_t, h)
        }
        ActivationModel::Cellular { rho_c, kappa, .. } => {
            marks = sample_marks(n, rng);
            let lattice = HexLattice::new(rho_c, kappa)?;
            let schedule = schedule_cellular(&positions, &marks, &lattice);
            serving_distance = Some(schedule.serving_distance);
            schedule.active
        }
        ActivationModel::Boolean { rho_b, h } => {
            let radius = config.radius();
            let m = (PI * rho_b * radius * radius).round() as usize;
            let centers = uniform_in_disk(radius, m, rng);
            activate_boolean(&positions, &centers, h)
        }
    };

    let power_weight = active
        .iter()
        .enumerate()
        .map(|(i, &on)| match (on, &serving_distance) {
            (false, _) => 0.0,
            (true, Some(serving)) if config.model.power_control() => {
                serving[i].powf(config.alpha)
            }
            (true, _) => 1.0,
        })
        .collect();

    Ok(Realization { positions, marks, active, power_weight, serving_distance })
}
