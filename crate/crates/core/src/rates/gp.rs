use rayon::prelude::*;

use crate::channel::{aux_state_pmf, product_pair_pmf, synced_pair_pmf, StateChannel};
use crate::error::{invalid, Result};
use crate::oracle::{self, CertTarget, GridSpec};
use crate::prob::{mutual_information, JointPmf};
use crate::rates::blahut::weighted_capacity;
use crate::rates::report::{Argument, SolveReport};
use crate::rates::simplex::{project_blocks, random_blocks};
use crate::rates::AuxDistribution;
use crate::rng;

const LOG_FLOOR: f64 = 1e-300;

/// Settings for the multi-start local searches.
#[derive(Clone, Debug, PartialEq)]
pub struct SearchConfig {
    pub starts: usize,
    pub seed: u64,
    pub max_iterations: usize,
    /// Auxiliary alphabet size; `None` uses `nx * ns`.
    pub aux_cardinality: Option<usize>,
    /// Attempt grid certification when the instance is small enough.
    pub certify: bool,
}

impl Default for SearchConfig {
    fn default() -> Self {
        Self {
            starts: 64,
            seed: 0,
            max_iterations: 5000,
            aux_cardinality: None,
            certify: true,
        }
    }
}

/// `I(U;Y) - I(U;S)` for the joint `P_S(s) P(u,x|s) W(y|x,s)`.
pub fn gp_objective(channel: &StateChannel, aux: &AuxDistribution) -> Result<f64> {
    aux.check(channel)?;
    let (ns, nu, nx, ny) = (channel.ns(), aux.nu(), channel.nx(), channel.ny());
    let joint = JointPmf::from_fn(vec![("S", ns), ("U", nu), ("X", nx), ("Y", ny)], |i| {
        channel.prior().get(i[0]) * aux.get(i[0], i[1], i[2]) * channel.prob(i[2], i[0], i[3])
    })?;
    let uy = mutual_information(&joint.marginalize(&["U", "Y"])?)?;
    let us = mutual_information(&joint.marginalize(&["U", "S"])?)?;
    Ok(uy - us)
}

/// `(1/D) I_p1(U;Y) + ((D-1)/D) I_p2(U;Y) - I(U;A)`.
pub fn theorem1_objective(channel: &StateChannel, d_size: usize, aux: &AuxDistribution) -> Result<f64> {
    if d_size == 0 {
        return Err(invalid("delay set size must be at least 1"));
    }
    let alpha = 1.0 / d_size as f64;
    let i1 = mutual_information(&synced_pair_pmf(channel, aux)?)?;
    let i2 = if d_size > 1 {
        mutual_information(&product_pair_pmf(channel, aux)?)?
    } else {
        0.0
    };
    let ua = mutual_information(&aux_state_pmf(channel, aux)?)?;
    Ok(alpha * i1 + (1.0 - alpha) * i2 - ua)
}

/// Array form of the objective with its analytic gradient.
struct Problem {
    na: usize,
    nu: usize,
    nx: usize,
    ny: usize,
    alpha: f64,
    pa: Vec<f64>,
    /// `W(y|x,a)` at `[(x * na + a) * ny + y]`
    w: Vec<f64>,
    /// state-averaged `[x * ny + y]`
    wbar: Vec<f64>,
}

struct Workspace {
    p1: Vec<f64>,
    p2: Vec<f64>,
    pua: Vec<f64>,
    g1: Vec<f64>,
    g2: Vec<f64>,
    g3: Vec<f64>,
}

fn mi_and_kernel(joint: &[f64], rows: usize, cols: usize, kernel: &mut [f64]) -> f64 {
    let mut pr = vec![0.0; rows];
    let mut pc = vec![0.0; cols];
    for r in 0..rows {
        for c in 0..cols {
            let v = joint[r * cols + c];
            pr[r] += v;
            pc[c] += v;
        }
    }
    let mut total = 0.0;
    for r in 0..rows {
        for c in 0..cols {
            let v = joint[r * cols + c];
            let ratio = v.max(LOG_FLOOR) / (pr[r] * pc[c]).max(LOG_FLOOR);
            let l = ratio.log2();
            kernel[r * cols + c] = l;
            if v > 0.0 {
                total += v * l;
            }
        }
    }
    total
}

impl Problem {
    fn new(channel: &StateChannel, d_size: usize, nu: usize) -> Self {
        let (na, nx, ny) = (channel.ns(), channel.nx(), channel.ny());
        let mut w = vec![0.0; nx * na * ny];
        for x in 0..nx {
            for a in 0..na {
                w[(x * na + a) * ny..(x * na + a + 1) * ny].copy_from_slice(channel.row(x, a));
            }
        }
        Self {
            na,
            nu,
            nx,
            ny,
            alpha: 1.0 / d_size as f64,
            pa: channel.prior().probs().to_vec(),
            w,
            wbar: channel.averaged(),
        }
    }

    fn workspace(&self) -> Workspace {
        let uy = self.nu * self.ny;
        Workspace {
            p1: vec![0.0; uy],
            p2: vec![0.0; uy],
            pua: vec![0.0; self.nu * self.na],
            g1: vec![0.0; uy],
            g2: vec![0.0; uy],
            g3: vec![0.0; self.nu * self.na],
        }
    }

    fn evaluate(&self, q: &[f64], ws: &mut Workspace) -> f64 {
        let (na, nu, nx, ny) = (self.na, self.nu, self.nx, self.ny);
        ws.p1.iter_mut().for_each(|v| *v = 0.0);
        ws.p2.iter_mut().for_each(|v| *v = 0.0);
        ws.pua.iter_mut().for_each(|v| *v = 0.0);
        for a in 0..na {
            let pa = self.pa[a];
            for u in 0..nu {
                for x in 0..nx {
                    let m = pa * q[(a * nu + u) * nx + x];
                    if m == 0.0 {
                        continue;
                    }
                    ws.pua[u * na + a] += m;
                    for y in 0..ny {
                        ws.p1[u * ny + y] += m * self.w[(x * na + a) * ny + y];
                        ws.p2[u * ny + y] += m * self.wbar[x * ny + y];
                    }
                }
            }
        }
        let i1 = mi_and_kernel(&ws.p1, nu, ny, &mut ws.g1);
        let i2 = if self.alpha < 1.0 {
            mi_and_kernel(&ws.p2, nu, ny, &mut ws.g2)
        } else {
            0.0
        };
        let i3 = mi_and_kernel(&ws.pua, nu, na, &mut ws.g3);
        self.alpha * i1 + (1.0 - self.alpha) * i2 - i3
    }

    /// Gradient at the point last passed to `evaluate`.
    fn gradient(&self, ws: &Workspace, grad: &mut [f64]) {
        let (na, nu, nx, ny) = (self.na, self.nu, self.nx, self.ny);
        for a in 0..na {
            let pa = self.pa[a];
            for u in 0..nu {
                for x in 0..nx {
                    let mut s1 = 0.0;
                    let mut s2 = 0.0;
                    for y in 0..ny {
                        s1 += self.w[(x * na + a) * ny + y] * ws.g1[u * ny + y];
                        s2 += self.wbar[x * ny + y] * ws.g2[u * ny + y];
                    }
                    let s2 = if self.alpha < 1.0 { s2 } else { 0.0 };
                    grad[(a * nu + u) * nx + x] =
                        pa * (self.alpha * s1 + (1.0 - self.alpha) * s2 - ws.g3[u * na + a]);
                }
            }
        }
    }

    /// Projected gradient ascent with Armijo backtracking.
    fn ascend(&self, mut q: Vec<f64>, max_iterations: usize) -> (Vec<f64>, f64, usize) {
        let width = self.nu * self.nx;
        let mut ws = self.workspace();
        let mut grad = vec![0.0; q.len()];
        let mut cand = vec![0.0; q.len()];
        let mut f = self.evaluate(&q, &mut ws);
        let mut step = 1.0;
        let mut iterations = 0;
        let mut stalls = 0;
        while iterations < max_iterations {
            iterations += 1;
            self.gradient(&ws, &mut grad);
            let mut accepted = None;
            while step > 1e-14 {
                for i in 0..q.len() {
                    cand[i] = q[i] + step * grad[i];
                }
                project_blocks(&mut cand, width);
                let slope: f64 = grad.iter().zip(cand.iter().zip(&q)).map(|(g, (c, o))| g * (c - o)).sum();
                let fc = self.evaluate(&cand, &mut ws);
                if fc >= f + 1e-4 * slope {
                    accepted = Some((fc, slope));
                    break;
                }
                step *= 0.5;
            }
            let Some((fc, slope)) = accepted else {
                break;
            };
            std::mem::swap(&mut q, &mut cand);
            let gain = fc - f;
            f = fc;
            step = (step * 2.0).min(1e4);
            if gain < 1e-15 && slope < 1e-15 {
                stalls += 1;
                if stalls >= 3 {
                    break;
                }
            } else {
                stalls = 0;
            }
        }
        (q, f, iterations)
    }
}

struct SearchOutcome {
    aux: AuxDistribution,
    iterations: usize,
    gap: f64,
}

fn search(channel: &StateChannel, d_size: usize, cfg: &SearchConfig) -> Result<SearchOutcome> {
    if cfg.starts == 0 {
        return Err(invalid("search needs at least one start"));
    }
    let nu = cfg.aux_cardinality.unwrap_or_else(|| AuxDistribution::default_cardinality(channel));
    if nu == 0 || nu > AuxDistribution::default_cardinality(channel) {
        return Err(invalid(format!("auxiliary cardinality {nu} outside 1..={}", AuxDistribution::default_cardinality(channel))));
    }
    let problem = Problem::new(channel, d_size, nu);
    let (na, nx, ny) = (problem.na, problem.nx, problem.ny);
    let width = nu * nx;

    // start 0: U = X independent of the state, with the capacity-achieving input
    // of the averaged channel; the remaining starts are Dirichlet(1)
    let warm = {
        let avg = channel.averaged();
        let input = match weighted_capacity(nx, ny, &[(1.0, &avg)], 1e-12, 100_000) {
            Ok(o) | Err(o) => o.input,
        };
        let mut q = vec![0.0; na * width];
        for a in 0..na {
            for x in 0..nx.min(nu) {
                q[a * width + x * nx + x] = input[x];
            }
        }
        project_blocks(&mut q, width);
        q
    };
    let results: Vec<(Vec<f64>, f64, usize)> = (0..cfg.starts)
        .into_par_iter()
        .map(|k| {
            let start = if k == 0 {
                warm.clone()
            } else {
                let mut r = rng::substream(cfg.seed, &[0x5354, k as u64]);
                random_blocks(&mut r, na, width)
            };
            problem.ascend(start, cfg.max_iterations)
        })
        .collect();
    let mut best = 0;
    for (k, r) in results.iter().enumerate() {
        if r.1 > results[best].1 {
            best = k;
        }
    }
    let iterations = results.iter().map(|r| r.2).sum();
    let (q, f_best, _) = &results[best];
    let second = results
        .iter()
        .enumerate()
        .filter(|(k, _)| *k != best)
        .map(|(_, r)| r.1)
        .fold(f64::NEG_INFINITY, f64::max);
    let aux = AuxDistribution::new(nu, nx, na, q.clone())?;
    let gap = if second.is_finite() { (f_best - second).max(0.0) } else { 0.0 };
    Ok(SearchOutcome { aux, iterations, gap })
}

fn finish(mut report: SolveReport, target: CertTarget, cfg: &SearchConfig) -> SolveReport {
    if cfg.certify {
        let spec = GridSpec::default();
        if oracle::grid_applicable(&target, &spec) {
            report.certification = oracle::certify(&target, &report, &spec);
        }
    }
    report
}

/// Synchronous capacity `max I(U;Y) - I(U;S)` by multi-start local ascent.
///
/// The objective is not concave in `P(u,x|s)`, so the result is a lower bound
/// unless the certification field reports agreement with the grid oracle.
/// `convergence_gap` holds the spread between the best and runner-up start.
pub fn gp_capacity(channel: &StateChannel, cfg: &SearchConfig) -> Result<SolveReport> {
    let out = search(channel, 1, cfg)?;
    let value = gp_objective(channel, &out.aux)?;
    let mut report = SolveReport::new("gp", value, Argument::Aux(out.aux), "multistart_projected_ascent");
    report.iterations = out.iterations;
    report.convergence_gap = out.gap;
    Ok(finish(report, CertTarget::Gp(channel.clone()), cfg))
}

/// Achievable rate for a delay set of size `d_size`, maximized like [`gp_capacity`].
pub fn agp_theorem1_rate(channel: &StateChannel, d_size: usize, cfg: &SearchConfig) -> Result<SolveReport> {
    if d_size == 0 {
        return Err(invalid("delay set size must be at least 1"));
    }
    let out = search(channel, d_size, cfg)?;
    let value = theorem1_objective(channel, d_size, &out.aux)?;
    let mut report = SolveReport::new("agp_t1", value, Argument::Aux(out.aux), "multistart_projected_ascent");
    report.iterations = out.iterations;
    report.convergence_gap = out.gap;
    Ok(finish(report, CertTarget::Theorem1(channel.clone(), d_size), cfg))
}

/// With feedback the delay can be learned and reported back, after which
/// ordinary synchronous coding applies; the capacity is the synchronous one.
pub fn agp_feedback_capacity(channel: &StateChannel, cfg: &SearchConfig) -> Result<SolveReport> {
    let mut report = gp_capacity(channel, cfg)?;
    report.quantity = "feedback".to_string();
    report.method = "feedback=synchronous_gp".to_string();
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::prob::Pmf;
    use crate::rates::no_si_capacity;

    fn quick() -> SearchConfig {
        SearchConfig {
            starts: 16,
            certify: false,
            ..SearchConfig::default()
        }
    }

    #[test]
    fn xor_compensation_reaches_one_bit() {
        let ch = StateChannel::xor(0.5).unwrap();
        let aux = AuxDistribution::deterministic(2, 2, 2, |_, _| 0.5, |u, a| u ^ a).unwrap();
        assert!((gp_objective(&ch, &aux).unwrap() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn constant_auxiliary_is_worthless() {
        let ch = StateChannel::noisy_xor(0.3, 0.1).unwrap();
        let aux = AuxDistribution::deterministic(1, 2, 2, |_, _| 1.0, |_, a| a).unwrap();
        assert!(gp_objective(&ch, &aux).unwrap().abs() < 1e-12);
    }

    #[test]
    fn array_form_matches_public_evaluators() {
        let ch = StateChannel::noisy_xor(0.3, 0.1).unwrap();
        let mut r = rng::stream(5);
        for d in 1..=3 {
            let p = Problem::new(&ch, d, 4);
            let mut ws = p.workspace();
            for _ in 0..20 {
                let q = random_blocks(&mut r, 2, 8);
                let aux = AuxDistribution::new(4, 2, 2, q.clone()).unwrap();
                let fast = p.evaluate(&q, &mut ws);
                assert!((fast - theorem1_objective(&ch, d, &aux).unwrap()).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn gradient_matches_finite_differences() {
        let ch = StateChannel::noisy_xor(0.2, 0.15).unwrap();
        let p = Problem::new(&ch, 2, 3);
        let mut ws = p.workspace();
        let mut r = rng::stream(1);
        let q = random_blocks(&mut r, 2, 6);
        p.evaluate(&q, &mut ws);
        let mut g = vec![0.0; q.len()];
        p.gradient(&ws, &mut g);
        // directional derivative along a tangent direction within slice 0
        let mut dir = vec![0.0; q.len()];
        dir[0] = 1.0;
        dir[3] = -1.0;
        let h = 1e-6;
        let shift = |s: f64| q.iter().zip(&dir).map(|(a, b)| a + s * b).collect::<Vec<_>>();
        let numeric = (p.evaluate(&shift(h), &mut ws) - p.evaluate(&shift(-h), &mut ws)) / (2.0 * h);
        let analytic: f64 = g.iter().zip(&dir).map(|(a, b)| a * b).sum();
        assert!((numeric - analytic).abs() < 1e-6, "{numeric} vs {analytic}");
    }

    #[test]
    fn gp_capacity_of_xor_is_one() {
        let r = gp_capacity(&StateChannel::xor(0.5).unwrap(), &quick()).unwrap();
        assert!((r.value - 1.0).abs() < 1e-6, "{}", r.value);
        let Argument::Aux(aux) = &r.argument else { panic!() };
        assert!((gp_objective(&StateChannel::xor(0.5).unwrap(), aux).unwrap() - r.value).abs() < 1e-10);
    }

    #[test]
    fn useless_channel_has_zero_capacity() {
        let ch = StateChannel::state_blind(2, &[vec![0.3, 0.7], vec![0.3, 0.7]], Pmf::uniform(2)).unwrap();
        assert!(gp_capacity(&ch, &quick()).unwrap().value.abs() < 1e-6);
        assert!(agp_feedback_capacity(&ch, &quick()).unwrap().value.abs() < 1e-6);
    }

    #[test]
    fn state_blind_feedback_equals_no_si() {
        let ch = StateChannel::state_blind(2, &[vec![0.9, 0.1], vec![0.25, 0.75]], Pmf::bernoulli(0.4).unwrap()).unwrap();
        let fb = agp_feedback_capacity(&ch, &quick()).unwrap();
        assert_eq!(fb.method, "feedback=synchronous_gp");
        assert!((fb.value - no_si_capacity(&ch).unwrap().value).abs() < 1e-6);
    }

    #[test]
    fn theorem1_on_xor_is_one_over_d() {
        let ch = StateChannel::xor(0.5).unwrap();
        for d in 1..=3 {
            let r = agp_theorem1_rate(&ch, d, &quick()).unwrap();
            assert!((r.value - 1.0 / d as f64).abs() < 1e-3, "D={d}: {}", r.value);
        }
    }

    #[test]
    fn ordering_chain() {
        for (p, q) in [(0.3, 0.1), (0.5, 0.05), (0.15, 0.2)] {
            let ch = StateChannel::noisy_xor(p, q).unwrap();
            let nosi = no_si_capacity(&ch).unwrap().value;
            let t1 = agp_theorem1_rate(&ch, 2, &quick()).unwrap();
            let gp = gp_capacity(&ch, &quick()).unwrap().value;
            let Argument::Aux(aux) = &t1.argument else { panic!() };
            assert!(nosi <= t1.value + 1e-6);
            assert!(t1.value <= gp_objective(&ch, aux).unwrap() + 1e-12);
            assert!(t1.value <= gp + 1e-6);
        }
    }

    #[test]
    fn cardinality_bound_is_enforced() {
        let ch = StateChannel::xor(0.5).unwrap();
        let cfg = SearchConfig {
            aux_cardinality: Some(5),
            ..quick()
        };
        assert!(gp_capacity(&ch, &cfg).is_err());
        let aux = AuxDistribution::from_fn(5, 2, 2, |_, _, _| 1.0).unwrap();
        assert!(gp_objective(&ch, &aux).is_err());
    }
}
