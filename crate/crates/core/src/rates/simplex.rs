use rand::Rng;

use crate::rng;

/// Euclidean projection of `v` onto the probability simplex, in place.
pub(crate) fn project(v: &mut [f64]) {
    let mut sorted = v.to_vec();
    sorted.sort_by(|a, b| b.total_cmp(a));
    let mut cumulative = 0.0;
    let mut theta = 0.0;
    for (i, &s) in sorted.iter().enumerate() {
        cumulative += s;
        let t = (cumulative - 1.0) / (i + 1) as f64;
        if s - t > 0.0 {
            theta = t;
        }
    }
    v.iter_mut().for_each(|x| *x = (*x - theta).max(0.0));
}

/// Projects each consecutive block of `width` entries.
pub(crate) fn project_blocks(v: &mut [f64], width: usize) {
    v.chunks_mut(width).for_each(project);
}

/// Dirichlet(1) point on each block.
pub(crate) fn random_blocks<R: Rng + ?Sized>(r: &mut R, blocks: usize, width: usize) -> Vec<f64> {
    (0..blocks).flat_map(|_| rng::dirichlet_ones(r, width)).collect()
}
