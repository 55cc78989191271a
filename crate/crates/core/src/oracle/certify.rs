use crate::channel::{window_symbols, DelaySet, StateChannel};
use crate::error::{guard, Result};
use crate::oracle::grid::{compositions, grid_maximize, GridResult, GridSpec};
use crate::rates::{CertStatus, Certification, SolveReport};

pub const CERTIFY_TOLERANCE: f64 = 5e-3;
/// Largest total simplex dimension for which solvers certify on their own.
pub const AUTO_CERTIFY_DIMENSION: usize = 8;

/// The maximization a report claims to have solved.
#[derive(Clone, Debug)]
pub enum CertTarget {
    Gp(StateChannel),
    Theorem1(StateChannel, usize),
    NoSi(StateChannel),
    Acsitr(StateChannel, DelaySet),
    Compound(Vec<StateChannel>),
}

fn plogp(p: f64) -> f64 {
    if p > 0.0 {
        -p * p.log2()
    } else {
        0.0
    }
}

/// `I(X;Y)` for input `px` through rows `w[x][y]`, as `H(Y) - H(Y|X)`.
fn information(px: &[f64], w: &[f64], ny: usize) -> f64 {
    let mut hy = 0.0;
    for y in 0..ny {
        hy += plogp(px.iter().enumerate().map(|(x, p)| p * w[x * ny + y]).sum());
    }
    let hyx: f64 = px
        .iter()
        .enumerate()
        .map(|(x, p)| p * w[x * ny..(x + 1) * ny].iter().map(|&v| plogp(v)).sum::<f64>())
        .sum();
    hy - hyx
}

/// Auxiliary alphabet used by the grid: `min(nx * ns, ny + ns - 1)`. With a
/// deterministic input map `x = f(u, a)` this covers the synchronous problem.
fn grid_aux_size(channel: &StateChannel) -> usize {
    (channel.nx() * channel.ns()).min(channel.ny() + channel.ns() - 1)
}

fn multisets(n: usize, k: usize) -> Vec<Vec<usize>> {
    fn rec(n: usize, k: usize, from: usize, prefix: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if prefix.len() == k {
            out.push(prefix.clone());
            return;
        }
        for i in from..n {
            prefix.push(i);
            rec(n, k, i, prefix, out);
            prefix.pop();
        }
    }
    let mut out = Vec::new();
    rec(n, k, 0, &mut Vec::new(), &mut out);
    out
}

fn grid_shape(target: &CertTarget, spec: &GridSpec) -> (GridSpec, u128) {
    match target {
        CertTarget::Gp(ch) | CertTarget::Theorem1(ch, _) => {
            let nu = grid_aux_size(ch);
            let functions = (ch.nx() as u128).pow(ch.ns() as u32);
            let sets = crate::oracle::grid::binomial(functions + nu as u128 - 1, nu as u128);
            (spec.with_dims(vec![nu; ch.ns()]), sets)
        }
        CertTarget::NoSi(ch) => (spec.with_dims(vec![ch.nx()]), 1),
        CertTarget::Acsitr(ch, delays) => {
            let nv = (ch.ns() as u128).pow(delays.size() as u32);
            let dims = if nv > 64 { vec![ch.nx(); 65] } else { vec![ch.nx(); nv as usize] };
            (spec.with_dims(dims), 1)
        }
        CertTarget::Compound(chs) => {
            let ch = &chs[0];
            (spec.with_dims(vec![ch.nx(); ch.ns()]), 1)
        }
    }
}

/// Total number of objective evaluations the grid oracle needs.
pub fn grid_cost(target: &CertTarget, spec: &GridSpec) -> u128 {
    let (shape, repeats) = grid_shape(target, spec);
    shape.point_count().saturating_mul(repeats)
}

/// True when a solver should certify itself against the grid.
pub fn grid_applicable(target: &CertTarget, spec: &GridSpec) -> bool {
    let (shape, _) = grid_shape(target, spec);
    shape.dimension() <= AUTO_CERTIFY_DIMENSION && grid_cost(target, spec) <= spec.max_points
}

/// Grid maximum of the objective behind `target`.
pub fn grid_value(target: &CertTarget, spec: &GridSpec) -> Result<GridResult> {
    let cost = grid_cost(target, spec);
    if cost > spec.max_points {
        return Err(guard(format!("grid oracle needs {cost} evaluations, budget {}", spec.max_points)));
    }
    match target {
        CertTarget::Gp(ch) => auxiliary_grid(ch, 1, spec),
        CertTarget::Theorem1(ch, d) => auxiliary_grid(ch, *d, spec),
        CertTarget::NoSi(ch) => {
            let avg = ch.averaged();
            let ny = ch.ny();
            grid_maximize(&spec.with_dims(vec![ch.nx()]), |p| information(&p.coords(0), &avg, ny))
        }
        CertTarget::Acsitr(ch, delays) => {
            let ns = ch.ns();
            let nv = ns.pow(delays.size() as u32);
            let contexts: Vec<(f64, Vec<Vec<f64>>)> = (0..nv)
                .map(|v| {
                    let w = window_symbols(v, ns, delays.size());
                    let weight = w.iter().map(|&s| ch.prior().get(s)).product();
                    let members = delays.iter().map(|d| ch.state_slice(w[delays.window_position(d)])).collect();
                    (weight, members)
                })
                .collect();
            maximin_grid(ch.nx(), ch.ny(), &contexts, spec)
        }
        CertTarget::Compound(chs) => {
            let first = &chs[0];
            let contexts: Vec<(f64, Vec<Vec<f64>>)> = (0..first.ns())
                .map(|s| (first.prior().get(s), chs.iter().map(|c| c.state_slice(s)).collect()))
                .collect();
            maximin_grid(first.nx(), first.ny(), &contexts, spec)
        }
    }
}

/// `max over P(x|c) of min_m sum_c P(c) I(P(.|c); W_{c,m})`.
fn maximin_grid(nx: usize, ny: usize, contexts: &[(f64, Vec<Vec<f64>>)], spec: &GridSpec) -> Result<GridResult> {
    let shape = spec.with_dims(vec![nx; contexts.len()]);
    let points: Vec<Vec<f64>> = compositions(nx, spec.resolution)
        .iter()
        .map(|c| c.iter().map(|&k| k as f64 / spec.resolution as f64).collect())
        .collect();
    let members = contexts.first().map_or(0, |c| c.1.len());
    // table[c][m][point]
    let table: Vec<Vec<Vec<f64>>> = contexts
        .iter()
        .map(|(weight, ws)| {
            ws.iter()
                .map(|w| points.iter().map(|p| weight * information(p, w, ny)).collect())
                .collect()
        })
        .collect();
    grid_maximize(&shape, |p| {
        let mut worst = f64::INFINITY;
        for m in 0..members {
            let v: f64 = (0..contexts.len()).map(|c| table[c][m][p.index(c)]).sum();
            worst = worst.min(v);
        }
        worst
    })
}

/// Grid over `P(u|a)` with a deterministic input map per auxiliary symbol,
/// evaluating `(1/D)(H1(Y) - H1(U,Y)) + ((D-1)/D)(H2(Y) - H2(U,Y)) + H(U|A)`.
fn auxiliary_grid(ch: &StateChannel, d_size: usize, spec: &GridSpec) -> Result<GridResult> {
    let (ns, nx, ny) = (ch.ns(), ch.nx(), ch.ny());
    let nu = grid_aux_size(ch);
    let res = spec.resolution;
    let alpha = 1.0 / d_size as f64;
    let shape = spec.with_dims(vec![nu; ns]);
    let nf = nx.pow(ns as u32);
    let column = |f: usize, a: usize| (f / nx.pow(a as u32)) % nx;
    let avg = ch.averaged();
    let prior = ch.prior().probs().to_vec();

    // per column map f and per vector (k_0..k_{ns-1}) of grid counts of one u
    let keys = (res + 1).pow(ns as u32);
    let mut h1 = vec![0.0; nf * keys];
    let mut h2 = vec![0.0; nf * keys];
    let mut c1 = vec![0.0; nf * keys * ny];
    let mut c2 = vec![0.0; nf * keys * ny];
    for f in 0..nf {
        for key in 0..keys {
            let mut cell1 = vec![0.0; ny];
            let mut cell2 = vec![0.0; ny];
            let mut rest = key;
            for a in 0..ns {
                let k = rest % (res + 1);
                rest /= res + 1;
                let m = prior[a] * k as f64 / res as f64;
                let x = column(f, a);
                for y in 0..ny {
                    cell1[y] += m * ch.prob(x, a, y);
                    cell2[y] += m * avg[x * ny + y];
                }
            }
            h1[f * keys + key] = cell1.iter().map(|&p| plogp(p)).sum();
            h2[f * keys + key] = cell2.iter().map(|&p| plogp(p)).sum();
            c1[(f * keys + key) * ny..][..ny].copy_from_slice(&cell1);
            c2[(f * keys + key) * ny..][..ny].copy_from_slice(&cell2);
        }
    }
    let comps = compositions(nu, res);
    let comp_entropy: Vec<f64> = comps
        .iter()
        .map(|c| c.iter().map(|&k| plogp(k as f64 / res as f64)).sum())
        .collect();
    let stride: Vec<usize> = (0..ns).map(|a| (res + 1).pow(a as u32)).collect();

    let mut best: Option<GridResult> = None;
    for set in multisets(nf, nu) {
        let result = grid_maximize(&shape, |p| {
            let mut cond = 0.0;
            for a in 0..ns {
                cond += prior[a] * comp_entropy[p.index(a)];
            }
            let mut joint1 = 0.0;
            let mut joint2 = 0.0;
            let mut y1 = [0.0f64; 16];
            let mut y2 = [0.0f64; 16];
            for (u, &f) in set.iter().enumerate() {
                let mut key = 0;
                for a in 0..ns {
                    key += p.counts(a)[u] as usize * stride[a];
                }
                let at = f * keys + key;
                joint1 += h1[at];
                joint2 += h2[at];
                for y in 0..ny {
                    y1[y] += c1[at * ny + y];
                    y2[y] += c2[at * ny + y];
                }
            }
            let hy1: f64 = y1[..ny].iter().map(|&p| plogp(p)).sum();
            let mut value = alpha * (hy1 - joint1) + cond;
            if alpha < 1.0 {
                let hy2: f64 = y2[..ny].iter().map(|&p| plogp(p)).sum();
                value += (1.0 - alpha) * (hy2 - joint2);
            }
            value
        })?;
        if best.as_ref().is_none_or(|b| result.value > b.value) {
            best = Some(result);
        }
    }
    let mut best = best.expect("at least one column multiset");
    best.evaluations = grid_cost(&CertTarget::Gp(ch.clone()), spec);
    Ok(best)
}

/// Compares a solver report with the grid oracle at tolerance 5e-3. A report
/// already marked as failed stays failed.
pub fn certify(target: &CertTarget, report: &SolveReport, spec: &GridSpec) -> Certification {
    let previous_failure = report.certification.status == CertStatus::Failed;
    if let CertTarget::Gp(ch) | CertTarget::Theorem1(ch, _) = target {
        if ch.ny() > 16 {
            return Certification::uncertified("output alphabet too large for the grid oracle");
        }
    }
    if let CertTarget::Compound(chs) = target {
        if chs.is_empty() {
            return Certification::uncertified("empty family");
        }
    }
    match grid_value(target, spec) {
        Err(e) => {
            let mut c = Certification::uncertified(e.to_string());
            if previous_failure {
                c.status = CertStatus::Failed;
            }
            c
        }
        Ok(grid) => {
            let delta = (grid.value - report.value).abs();
            let status = if delta <= CERTIFY_TOLERANCE && !previous_failure {
                CertStatus::Certified
            } else {
                CertStatus::Failed
            };
            Certification {
                status,
                grid_value: Some(grid.value),
                delta: Some(delta),
                note: format!("resolution {}", spec.resolution),
            }
        }
    }
}
