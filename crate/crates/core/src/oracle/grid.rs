use rayon::prelude::*;

use crate::error::{guard, invalid, Result};

pub const DEFAULT_RESOLUTION: usize = 64;
pub const MAX_GRID_POINTS: u128 = 100_000_000;

/// A product of probability simplices sampled at all points `k / resolution`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GridSpec {
    /// number of vertices of each simplex
    pub dims: Vec<usize>,
    pub resolution: usize,
    pub max_points: u128,
}

impl Default for GridSpec {
    fn default() -> Self {
        Self {
            dims: Vec::new(),
            resolution: DEFAULT_RESOLUTION,
            max_points: MAX_GRID_POINTS,
        }
    }
}

pub(crate) fn binomial(n: u128, k: u128) -> u128 {
    let k = k.min(n - k.min(n));
    (0..k).fold(1u128, |acc, i| acc.saturating_mul(n - i) / (i + 1))
}

/// Number of grid points on one simplex with `k` vertices.
pub fn simplex_points(k: usize, resolution: usize) -> u128 {
    if k == 0 {
        return 0;
    }
    binomial((resolution + k - 1) as u128, (k - 1) as u128)
}

impl GridSpec {
    pub fn new(dims: Vec<usize>, resolution: usize) -> Self {
        Self {
            dims,
            resolution,
            ..Self::default()
        }
    }

    pub fn with_dims(&self, dims: Vec<usize>) -> Self {
        Self { dims, ..self.clone() }
    }

    pub fn point_count(&self) -> u128 {
        self.dims
            .iter()
            .map(|&k| simplex_points(k, self.resolution))
            .fold(1u128, u128::saturating_mul)
    }

    /// Total simplex dimension `sum (k - 1)`.
    pub fn dimension(&self) -> usize {
        self.dims.iter().map(|k| k.saturating_sub(1)).sum()
    }

    pub fn check(&self) -> Result<()> {
        if self.resolution == 0 || self.dims.contains(&0) {
            return Err(invalid("grid needs a positive resolution and non-empty simplices"));
        }
        let n = self.point_count();
        if n > self.max_points {
            return Err(guard(format!("grid of {n} points exceeds {}", self.max_points)));
        }
        Ok(())
    }
}

/// All compositions of `resolution` into `k` parts, lexicographic.
pub fn compositions(k: usize, resolution: usize) -> Vec<Vec<u32>> {
    fn rec(k: usize, left: u32, prefix: &mut Vec<u32>, out: &mut Vec<Vec<u32>>) {
        if k == 1 {
            prefix.push(left);
            out.push(prefix.clone());
            prefix.pop();
            return;
        }
        for c in (0..=left).rev() {
            prefix.push(c);
            rec(k - 1, left - c, prefix, out);
            prefix.pop();
        }
    }
    let mut out = Vec::new();
    rec(k, resolution as u32, &mut Vec::with_capacity(k), &mut out);
    out
}

/// The current grid point handed to the objective.
pub struct GridPoint<'a> {
    index: &'a [usize],
    tables: &'a [Vec<Vec<u32>>],
    resolution: f64,
}

impl GridPoint<'_> {
    /// Position of simplex `s` in the enumeration of [`compositions`].
    pub fn index(&self, s: usize) -> usize {
        self.index[s]
    }

    pub fn counts(&self, s: usize) -> &[u32] {
        &self.tables[s][self.index[s]]
    }

    pub fn coords(&self, s: usize) -> Vec<f64> {
        self.counts(s).iter().map(|&c| c as f64 / self.resolution).collect()
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct GridResult {
    pub value: f64,
    pub point: Vec<Vec<f64>>,
    pub evaluations: u128,
}

/// Exhaustive maximization over the grid. Ties go to the first point in
/// enumeration order.
pub fn grid_maximize<F>(spec: &GridSpec, objective: F) -> Result<GridResult>
where
    F: Fn(&GridPoint) -> f64 + Sync,
{
    spec.check()?;
    let tables: Vec<Vec<Vec<u32>>> = spec.dims.iter().map(|&k| compositions(k, spec.resolution)).collect();
    let sizes: Vec<usize> = tables.iter().map(Vec::len).collect();
    let resolution = spec.resolution as f64;
    let first = sizes.first().copied().unwrap_or(1);
    let best = (0..first)
        .into_par_iter()
        .map(|lead| {
            let mut index = vec![0usize; sizes.len()];
            if !index.is_empty() {
                index[0] = lead;
            }
            let mut best_value = f64::NEG_INFINITY;
            let mut best_index = index.clone();
            loop {
                let point = GridPoint {
                    index: &index,
                    tables: &tables,
                    resolution,
                };
                let v = objective(&point);
                if v > best_value {
                    best_value = v;
                    best_index.copy_from_slice(&index);
                }
                let mut pos = sizes.len();
                loop {
                    if pos <= 1 {
                        return (best_value, best_index);
                    }
                    pos -= 1;
                    index[pos] += 1;
                    if index[pos] < sizes[pos] {
                        break;
                    }
                    index[pos] = 0;
                }
            }
        })
        .reduce_with(|a, b| if b.0 > a.0 { b } else { a })
        .expect("grid is non-empty");
    let point = best
        .1
        .iter()
        .zip(&tables)
        .map(|(&i, t)| t[i].iter().map(|&c| c as f64 / resolution).collect())
        .collect();
    Ok(GridResult {
        value: best.0,
        point,
        evaluations: spec.point_count(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn composition_counts() {
        assert_eq!(compositions(2, 64).len(), 65);
        assert_eq!(compositions(3, 64).len(), 2145);
        assert_eq!(simplex_points(3, 64), 2145);
        assert!(compositions(3, 5).iter().all(|c| c.iter().sum::<u32>() == 5));
    }

    #[test]
    fn linear_objective_hits_a_vertex() {
        let spec = GridSpec::new(vec![4], 16);
        let w = [0.3, 0.9, 0.1, 0.5];
        let r = grid_maximize(&spec, |p| p.coords(0).iter().zip(&w).map(|(a, b)| a * b).sum()).unwrap();
        assert_eq!(r.point[0], vec![0.0, 1.0, 0.0, 0.0]);
        assert!((r.value - 0.9).abs() < 1e-15);
    }

    #[test]
    fn binary_entropy_peaks_at_half() {
        let spec = GridSpec::new(vec![2], 64);
        let r = grid_maximize(&spec, |p| crate::prob::entropy_of(&p.coords(0))).unwrap();
        assert!((r.value - 1.0).abs() < 1e-3);
        assert_eq!(r.point[0], vec![0.5, 0.5]);
    }

    #[test]
    fn product_grid_and_ties() {
        let spec = GridSpec::new(vec![2, 2], 4);
        assert_eq!(spec.point_count(), 25);
        // constant objective: first point wins
        let r = grid_maximize(&spec, |_| 1.0).unwrap();
        assert_eq!(r.point, vec![vec![1.0, 0.0], vec![1.0, 0.0]]);
        let r = grid_maximize(&spec, |p| -(p.coords(0)[0] - 0.25).abs() - (p.coords(1)[1] - 0.75).abs()).unwrap();
        assert_eq!(r.point, vec![vec![0.25, 0.75], vec![0.25, 0.75]]);
    }

    #[test]
    fn finer_grid_is_never_worse() {
        let f = |p: &GridPoint| {
            let a = p.coords(0);
            let b = p.coords(1);
            (a[0] * 2.3 - b[1]).sin() + a[1] * b[2]
        };
        let coarse = grid_maximize(&GridSpec::new(vec![2, 3], 64), f).unwrap();
        let fine = grid_maximize(&GridSpec::new(vec![2, 3], 128), f).unwrap();
        assert!(fine.value >= coarse.value - 1e-12);
    }

    #[test]
    fn guard_rejects_oversized_grids() {
        let spec = GridSpec::new(vec![3, 3, 3], 64);
        assert!(spec.point_count() > MAX_GRID_POINTS);
        assert!(grid_maximize(&spec, |_| 0.0).is_err());
    }
}
