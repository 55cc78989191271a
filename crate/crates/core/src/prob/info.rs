//! Entropy and mutual-information functionals, in bits, with the conventions
//! `0 log 0 = 0` and `0 log (0/q) = 0`.

use super::pmf::{JointPmf, Pmf};
use crate::error::{dim, invalid, Result};

pub(crate) fn entropy_of(probs: &[f64]) -> f64 {
    -probs
        .iter()
        .filter(|&&p| p > 0.0)
        .map(|&p| p * p.log2())
        .sum::<f64>()
}

pub fn entropy(p: &Pmf) -> f64 {
    entropy_of(p.probs())
}

/// `h2(q) = -q log2 q - (1-q) log2 (1-q)`.
pub fn binary_entropy(q: f64) -> Result<f64> {
    if !(0.0..=1.0).contains(&q) {
        return Err(invalid(format!("binary entropy argument {q} outside [0,1]")));
    }
    Ok(h2(q))
}

/// Unchecked [`binary_entropy`] for callers that already validated `q`.
pub(crate) fn h2(q: f64) -> f64 {
    // evaluate on the smaller mass so that h2(q) and h2(1-q) share one code path
    let m = q.min(1.0 - q);
    entropy_of(&[m, 1.0 - m])
}

/// `I(X;Y)` of a two-axis joint.
pub fn mutual_information(j: &JointPmf) -> Result<f64> {
    let sizes = j.sizes();
    if sizes.len() != 2 {
        return Err(dim(format!("mutual information needs 2 axes, got {}", sizes.len())));
    }
    let (nx, ny) = (sizes[0], sizes[1]);
    let p = j.probs();
    let mut px = vec![0.0; nx];
    let mut py = vec![0.0; ny];
    for x in 0..nx {
        for y in 0..ny {
            px[x] += p[x * ny + y];
            py[y] += p[x * ny + y];
        }
    }
    let mut total = 0.0;
    for x in 0..nx {
        for y in 0..ny {
            let pxy = p[x * ny + y];
            if pxy > 0.0 {
                total += pxy * (pxy / (px[x] * py[y])).log2();
            }
        }
    }
    Ok(total)
}

/// `I(X;Y|Z)` of a three-axis joint ordered `(X, Y, Z)`.
pub fn conditional_mutual_information(j: &JointPmf) -> Result<f64> {
    let sizes = j.sizes();
    if sizes.len() != 3 {
        return Err(dim(format!(
            "conditional mutual information needs 3 axes, got {}",
            sizes.len()
        )));
    }
    let (nx, ny, nz) = (sizes[0], sizes[1], sizes[2]);
    let p = j.probs();
    let at = |x: usize, y: usize, z: usize| p[(x * ny + y) * nz + z];
    let mut pz = vec![0.0; nz];
    let mut pxz = vec![0.0; nx * nz];
    let mut pyz = vec![0.0; ny * nz];
    for x in 0..nx {
        for y in 0..ny {
            for z in 0..nz {
                let v = at(x, y, z);
                pz[z] += v;
                pxz[x * nz + z] += v;
                pyz[y * nz + z] += v;
            }
        }
    }
    let mut total = 0.0;
    for x in 0..nx {
        for y in 0..ny {
            for z in 0..nz {
                let v = at(x, y, z);
                if v > 0.0 {
                    total += v * (v * pz[z] / (pxz[x * nz + z] * pyz[y * nz + z])).log2();
                }
            }
        }
    }
    Ok(total)
}
