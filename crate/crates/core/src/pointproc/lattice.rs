//! Hexagonal base-station lattice, frequency-reuse coloring and TDMA
//! scheduling for the cellular uplink model.
//!
//! Sites are `p * a1 + q * a2` with `a1 = d (sqrt(3)/2, 1/2)` and
//! `a2 = d (0, 1)`. With this orientation the Voronoi cell of every site has a
//! vertex straight along the positive x-axis, so a transmitter at `(r, 0)` with
//! `r = d / sqrt(3)` sits at a corner of the origin cell.

use std::collections::HashMap;
use std::f64::consts::PI;

use super::Point;
use crate::error::{Error, Result};

pub const SUPPORTED_REUSE: [u32; 4] = [1, 3, 4, 7];

const SQRT3: f64 = 1.732_050_807_568_877_2;

/// Base-station density that places a transmitter at distance `r_t` on the
/// corner of its hexagonal cell.
pub fn rho_c_for_cell_edge(r_t: f64) -> f64 {
    2.0 / (3.0 * SQRT3 * r_t * r_t)
}

/// Analytic description of the lattice; no site list is materialized.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HexLattice {
    spacing: f64,
    kappa: u32,
    generator: (i64, i64),
}

impl HexLattice {
    pub fn new(rho_c: f64, kappa: u32) -> Result<Self> {
        if !(rho_c.is_finite() && rho_c > 0.0) {
            return Err(Error::InvalidConfig(format!("rho_c must be > 0, got {rho_c}")));
        }
        // (i, j) with i^2 + ij + j^2 = kappa
        let generator = match kappa {
            1 => (1, 0),
            3 => (1, 1),
            4 => (2, 0),
            7 => (2, 1),
            _ => return Err(Error::UnsupportedReuse { kappa }),
        };
        // cell area (sqrt(3)/2) d^2 = 1 / rho_c
        let spacing = (2.0 / (SQRT3 * rho_c)).sqrt();
        Ok(Self { spacing, kappa, generator })
    }

    /// Nearest-neighbor distance between sites.
    pub fn spacing(&self) -> f64 {
        self.spacing
    }

    pub fn kappa(&self) -> u32 {
        self.kappa
    }

    /// Distance from a site to the corners of its cell.
    pub fn circumradius(&self) -> f64 {
        self.spacing / SQRT3
    }

    pub fn density(&self) -> f64 {
        2.0 / (SQRT3 * self.spacing * self.spacing)
    }

    pub fn site_position(&self, (p, q): (i64, i64)) -> Point {
        let d = self.spacing;
        let (p, q) = (p as f64, q as f64);
        Point::new(p * d * SQRT3 / 2.0, (p / 2.0 + q) * d)
    }

    /// Nearest site and the distance to it. Candidates are the sites of the
    /// lattice rhombus containing the point plus one ring around it; ties are
    /// resolved toward the lexicographically smaller index.
    pub fn nearest_site(&self, point: &Point) -> ((i64, i64), f64) {
        let d = self.spacing;
        let fp = point.x / (d * SQRT3 / 2.0);
        let fq = point.y / d - fp / 2.0;
        let (p0, q0) = (fp.floor() as i64, fq.floor() as i64);
        let mut best = ((p0, q0), f64::INFINITY);
        for p in p0 - 1..=p0 + 2 {
            for q in q0 - 1..=q0 + 2 {
                let dist = point.distance(&self.site_position((p, q)));
                if dist < best.1 {
                    best = ((p, q), dist);
                }
            }
        }
        best
    }

    /// Whether the site belongs to the reuse sublattice through the origin.
    pub fn is_band0(&self, (p, q): (i64, i64)) -> bool {
        let (i, j) = self.generator;
        let k = self.kappa as i64;
        ((i + j) * p + j * q).rem_euclid(k) == 0 && (i * q - j * p).rem_euclid(k) == 0
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Site {
    pub index: (i64, i64),
    pub position: Point,
}

/// Materialized lattice covering a disk of radius `extent`.
#[derive(Debug, Clone, PartialEq)]
pub struct BaseStationLattice {
    pub lattice: HexLattice,
    pub rho_c: f64,
    pub extent: f64,
    pub sites: Vec<Site>,
    pub band0_sites: Vec<Site>,
}

/// All lattice sites within `extent` of the origin, and the band-0 subset.
pub fn hex_lattice_band0(rho_c: f64, kappa: u32, extent: f64) -> Result<BaseStationLattice> {
    let lattice = HexLattice::new(rho_c, kappa)?;
    if !(extent.is_finite() && extent >= 0.0) {
        return Err(Error::InvalidConfig(format!("lattice extent must be >= 0, got {extent}")));
    }
    let d = lattice.spacing();
    let p_max = (extent / (d * SQRT3 / 2.0)).ceil() as i64 + 1;
    let q_max = (2.0 * extent / d).ceil() as i64 + 2;
    let mut sites = Vec::new();
    for p in -p_max..=p_max {
        for q in -q_max..=q_max {
            let position = lattice.site_position((p, q));
            if position.norm() <= extent {
                sites.push(Site { index: (p, q), position });
            }
        }
    }
    let band0_sites = sites.iter().copied().filter(|s| lattice.is_band0(s.index)).collect();
    Ok(BaseStationLattice { lattice, rho_c, extent, sites, band0_sites })
}

impl BaseStationLattice {
    /// Lattice large enough that every mobile in a disk of radius `radius`
    /// finds its true nearest site among the generated ones.
    pub fn covering(rho_c: f64, kappa: u32, radius: f64) -> Result<Self> {
        let spacing = HexLattice::new(rho_c, kappa)?.spacing();
        hex_lattice_band0(rho_c, kappa, radius + 3.0 * spacing)
    }

    /// Cell area implied by the generated site count over the covered disk.
    pub fn empirical_cell_area(&self) -> f64 {
        PI * self.extent * self.extent / self.sites.len() as f64
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CellularSchedule {
    pub active: Vec<bool>,
    /// Distance from every mobile to its nearest base station.
    pub serving_distance: Vec<f64>,
}

/// Assigns each mobile to its nearest base station and activates the
/// lowest-mark occupant of every band-0 cell except the origin cell, whose
/// slot belongs to the representative transmitter.
pub fn schedule_cellular(positions: &[Point], marks: &[f64], lattice: &HexLattice) -> CellularSchedule {
    assert_eq!(positions.len(), marks.len(), "one mark per position");
    let mut serving_distance = Vec::with_capacity(positions.len());
    let mut winners: HashMap<(i64, i64), usize> = HashMap::new();
    for (i, p) in positions.iter().enumerate() {
        let (site, dist) = lattice.nearest_site(p);
        serving_distance.push(dist);
        if site == (0, 0) || !lattice.is_band0(site) {
            continue;
        }
        winners
            .entry(site)
            .and_modify(|w| {
                if marks[i] < marks[*w] {
                    *w = i;
                }
            })
            .or_insert(i);
    }
    let mut active = vec![false; positions.len()];
    for &i in winners.values() {
        active[i] = true;
    }
    CellularSchedule { active, serving_distance }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn spacing_matches_density() {
        let lat = HexLattice::new(0.001, 3).unwrap();
        let d = lat.spacing();
        assert!((SQRT3 / 2.0 * d * d - 1000.0).abs() < 1e-9);
        assert!((lat.density() - 0.001).abs() < 1e-15);
    }

    #[test]
    fn cell_edge_density() {
        let r_t = 7.5;
        let lat = HexLattice::new(rho_c_for_cell_edge(r_t), 1).unwrap();
        assert!((lat.circumradius() - r_t).abs() < 1e-12);
        // the corner along +x is equidistant from three sites
        let corner = Point::new(r_t, 0.0);
        let d0 = corner.norm();
        let d1 = corner.distance(&lat.site_position((1, 0)));
        let d2 = corner.distance(&lat.site_position((1, -1)));
        assert!((d0 - d1).abs() < 1e-9 && (d0 - d2).abs() < 1e-9);
    }

    #[test]
    fn unsupported_reuse_lists_values() {
        let err = HexLattice::new(0.001, 5).unwrap_err();
        assert_eq!(err, Error::UnsupportedReuse { kappa: 5 });
        assert!(err.to_string().contains("1, 3, 4, 7"));
    }

    #[test]
    fn kappa_one_uses_every_site() {
        let bs = hex_lattice_band0(0.001, 1, 500.0).unwrap();
        assert_eq!(bs.sites.len(), bs.band0_sites.len());
        assert!(bs.sites.iter().any(|s| s.index == (0, 0)));
    }

    #[test]
    fn reuse_fraction_and_spacing() {
        for kappa in SUPPORTED_REUSE {
            let bs = hex_lattice_band0(0.001, kappa, 3000.0).unwrap();
            let frac = bs.band0_sites.len() as f64 / bs.sites.len() as f64;
            assert!((frac - 1.0 / kappa as f64).abs() < 0.01, "kappa {kappa}: {frac}");
            assert!(bs.band0_sites.iter().any(|s| s.index == (0, 0)));
            // band-0 sites form a lattice with spacing sqrt(kappa) d
            let d = bs.lattice.spacing();
            let nearest = bs
                .band0_sites
                .iter()
                .filter(|s| s.index != (0, 0))
                .map(|s| s.position.norm())
                .fold(f64::INFINITY, f64::min);
            assert!((nearest - (kappa as f64).sqrt() * d).abs() < 1e-9, "kappa {kappa}");
        }
        let bs = hex_lattice_band0(0.001, 3, 3000.0).unwrap();
        assert!((bs.empirical_cell_area() - 1000.0).abs() / 1000.0 < 0.01);
    }

    #[test]
    fn nearest_site_matches_brute_force() {
        use rand::{Rng, SeedableRng};
        let bs = hex_lattice_band0(0.002, 7, 400.0).unwrap();
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(5);
        for _ in 0..2000 {
            let p = Point::new(rng.random_range(-250.0..250.0), rng.random_range(-250.0..250.0));
            let (site, dist) = bs.lattice.nearest_site(&p);
            let brute = bs
                .sites
                .iter()
                .map(|s| p.distance(&s.position))
                .fold(f64::INFINITY, f64::min);
            assert!((dist - brute).abs() < 1e-9);
            assert!((bs.lattice.site_position(site).distance(&p) - dist).abs() < 1e-12);
        }
    }

    #[test]
    fn single_occupant_and_foreign_band() {
        let lat = HexLattice::new(0.001, 3).unwrap();
        // (1,1) is band 0 for kappa = 3, (1,0) is not
        assert!(lat.is_band0((1, 1)) && !lat.is_band0((1, 0)));
        let positions = [lat.site_position((1, 1)), lat.site_position((1, 0)), Point::new(1.0, 1.0)];
        let sched = schedule_cellular(&positions, &[0.5, 0.1, 0.2], &lat);
        assert_eq!(sched.active, vec![true, false, false]);
        assert!(sched.serving_distance[0] < 1e-9);
    }

    #[test]
    fn lowest_mark_wins_cell() {
        let lat = HexLattice::new(0.001, 1).unwrap();
        let center = lat.site_position((2, 0));
        let positions = [center, Point::new(center.x + 3.0, center.y), Point::new(center.x, center.y - 2.0)];
        let sched = schedule_cellular(&positions, &[0.6, 0.3, 0.9], &lat);
        assert_eq!(sched.active, vec![false, true, false]);
    }
}
