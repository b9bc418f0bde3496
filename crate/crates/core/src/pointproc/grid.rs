use std::collections::HashMap;

use super::Point;

/// Uniform bucket grid for fixed-radius neighbor queries.
pub(crate) struct GridIndex {
    cell: f64,
    buckets: HashMap<(i64, i64), Vec<usize>>,
}

impl GridIndex {
    /// `cell` must be positive; queries are exact for any radius up to `cell`.
    pub(crate) fn new(points: &[Point], cell: f64) -> Self {
        debug_assert!(cell > 0.0);
        let mut buckets: HashMap<(i64, i64), Vec<usize>> = HashMap::with_capacity(points.len());
        for (i, p) in points.iter().enumerate() {
            buckets.entry(Self::key(p, cell)).or_default().push(i);
        }
        Self { cell, buckets }
    }

    fn key(p: &Point, cell: f64) -> (i64, i64) {
        ((p.x / cell).floor() as i64, (p.y / cell).floor() as i64)
    }

    /// Calls `visit(j, distance)` for every indexed point other than `skip` at
    /// distance strictly less than `radius` from `center`.
    pub(crate) fn for_each_within(
        &self,
        points: &[Point],
        center: &Point,
        radius: f64,
        skip: Option<usize>,
        mut visit: impl FnMut(usize, f64),
    ) {
        let (kx, ky) = Self::key(center, self.cell);
        for dx in -1..=1 {
            for dy in -1..=1 {
                if let Some(bucket) = self.buckets.get(&(kx + dx, ky + dy)) {
                    for &j in bucket {
                        if Some(j) == skip {
                            continue;
                        }
                        let d = center.distance(&points[j]);
                        if d < radius {
                            visit(j, d);
                        }
                    }
                }
            }
        }
    }
}
