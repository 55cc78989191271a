use crate::channel::StateChannel;
use crate::error::{Error, Result};
use crate::prob::{mutual_information, JointPmf, Pmf};
use crate::rates::report::{Argument, SolveReport};

pub(crate) struct BaOutcome {
    pub input: Vec<f64>,
    /// `sum_d weight_d I(input; W_d)`
    pub value: f64,
    /// `max_x c(x)`, an upper bound on the weighted capacity
    pub upper: f64,
    pub iterations: usize,
}

/// `I(p; W)` in bits for an `nx x ny` row-stochastic matrix.
pub(crate) fn input_mutual_information(p: &[f64], w: &[f64], ny: usize) -> f64 {
    let mut q = vec![0.0; ny];
    for (x, &px) in p.iter().enumerate() {
        for y in 0..ny {
            q[y] += px * w[x * ny + y];
        }
    }
    let mut total = 0.0;
    for (x, &px) in p.iter().enumerate() {
        if px == 0.0 {
            continue;
        }
        for y in 0..ny {
            let wxy = w[x * ny + y];
            if wxy > 0.0 {
                total += px * wxy * (wxy / q[y]).log2();
            }
        }
    }
    total
}

/// Blahut-Arimoto for `max_p sum_d weight_d I(p; W_d)`, which is the capacity
/// of the composite channel `x -> (d, y)`. Stops when the duality gap
/// `max_x c(x) - sum_x p(x) c(x)` falls below `tol`.
pub(crate) fn weighted_capacity(
    nx: usize,
    ny: usize,
    channels: &[(f64, &[f64])],
    tol: f64,
    max_iterations: usize,
) -> std::result::Result<BaOutcome, BaOutcome> {
    let mut p = vec![1.0 / nx as f64; nx];
    let mut q = vec![0.0; ny];
    let mut c = vec![0.0; nx];
    let mut iterations = 0;
    loop {
        c.iter_mut().for_each(|v| *v = 0.0);
        for &(weight, w) in channels {
            if weight == 0.0 {
                continue;
            }
            q.iter_mut().for_each(|v| *v = 0.0);
            for x in 0..nx {
                for y in 0..ny {
                    q[y] += p[x] * w[x * ny + y];
                }
            }
            for x in 0..nx {
                let mut div = 0.0;
                for y in 0..ny {
                    let wxy = w[x * ny + y];
                    if wxy > 0.0 {
                        div += wxy * (wxy / q[y]).log2();
                    }
                }
                c[x] += weight * div;
            }
        }
        let value: f64 = p.iter().zip(&c).map(|(pi, ci)| pi * ci).sum();
        let upper = c.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let outcome = |p: &[f64]| BaOutcome {
            input: p.to_vec(),
            value,
            upper,
            iterations,
        };
        if upper - value < tol {
            return Ok(outcome(&p));
        }
        if iterations >= max_iterations {
            return Err(outcome(&p));
        }
        let shift = upper;
        let mut total = 0.0;
        for x in 0..nx {
            p[x] *= (c[x] - shift).exp2();
            total += p[x];
        }
        p.iter_mut().for_each(|v| *v /= total);
        iterations += 1;
    }
}

pub const NO_SI_TOLERANCE: f64 = 1e-9;
const NO_SI_MAX_ITERATIONS: usize = 1_000_000;

/// Capacity of the state-averaged channel, which is what an encoder without
/// usable state knowledge can achieve.
pub fn no_si_capacity(channel: &StateChannel) -> Result<SolveReport> {
    let (nx, ny) = (channel.nx(), channel.ny());
    let avg = channel.averaged();
    let ba = weighted_capacity(nx, ny, &[(1.0, &avg)], NO_SI_TOLERANCE, NO_SI_MAX_ITERATIONS).map_err(|o| {
        Error::NonConvergence {
            iterations: o.iterations,
            gap: o.upper - o.value,
        }
    })?;
    let input = Pmf::new(ba.input.clone())?;
    let joint = JointPmf::from_fn(vec![("X", nx), ("Y", ny)], |i| input.get(i[0]) * avg[i[0] * ny + i[1]])?;
    let value = mutual_information(&joint)?;
    let mut report = SolveReport::new("no_si", value, Argument::Input(input), "blahut_arimoto");
    report.iterations = ba.iterations;
    report.convergence_gap = (ba.upper - value).max(0.0);
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::prob::h2;

    #[test]
    fn xor_channel_capacity_is_one_minus_h2() {
        for p in [0.0, 0.1, 0.25, 0.4] {
            let r = no_si_capacity(&StateChannel::xor(p).unwrap()).unwrap();
            assert!((r.value - (1.0 - h2(p))).abs() < 1e-9, "p={p}: {}", r.value);
            assert!(r.convergence_gap < NO_SI_TOLERANCE);
        }
    }

    #[test]
    fn uniform_state_erases_the_input() {
        let r = no_si_capacity(&StateChannel::xor(0.5).unwrap()).unwrap();
        assert!(r.value.abs() < 1e-12);
    }

    #[test]
    fn noiseless_ternary_channel() {
        let rows = vec![vec![1.0, 0.0, 0.0], vec![0.0, 1.0, 0.0], vec![0.0, 0.0, 1.0]];
        let ch = StateChannel::state_blind(3, &rows, Pmf::uniform(2)).unwrap();
        assert!((no_si_capacity(&ch).unwrap().value - 3f64.log2()).abs() < 1e-9);
    }

    #[test]
    fn z_channel_capacity() {
        // Z channel with crossover 1/2 has capacity log2(5/4)
        let ch = StateChannel::state_blind(2, &[vec![1.0, 0.0], vec![0.5, 0.5]], Pmf::uniform(1)).unwrap();
        let r = no_si_capacity(&ch).unwrap();
        assert!((r.value - (1.25f64).log2()).abs() < 1e-8);
    }

    #[test]
    fn composite_channel_splits_into_weighted_terms() {
        let a = [0.9, 0.1, 0.2, 0.8];
        let b = [0.6, 0.4, 0.0, 1.0];
        let ba = weighted_capacity(2, 2, &[(0.3, &a), (0.7, &b)], 1e-12, 100_000).ok().unwrap();
        let direct = 0.3 * input_mutual_information(&ba.input, &a, 2) + 0.7 * input_mutual_information(&ba.input, &b, 2);
        assert!((direct - ba.value).abs() < 1e-12);
        assert!(ba.upper >= ba.value);
    }
}
