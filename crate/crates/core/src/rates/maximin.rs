use crate::channel::{window_symbols, DelaySet, StateChannel};
use crate::error::{dim, invalid, Error, Result};
use crate::prob::{conditional_mutual_information, normalized, JointPmf};
use crate::rates::blahut::{input_mutual_information, weighted_capacity};
use crate::rates::report::{Argument, SolveReport};

/// Strategy letter law `P(x|v)`, one row per context `v`.
#[derive(Clone, Debug, PartialEq)]
pub struct StrategyPmf {
    nv: usize,
    nx: usize,
    table: Vec<f64>,
}

impl StrategyPmf {
    pub fn new(nv: usize, nx: usize, table: Vec<f64>) -> Result<Self> {
        if nv == 0 || nx == 0 {
            return Err(invalid("empty strategy alphabet"));
        }
        if table.len() != nv * nx {
            return Err(dim(format!("strategy table has {} entries, expected {}", table.len(), nv * nx)));
        }
        let mut rows = Vec::with_capacity(table.len());
        for (v, row) in table.chunks(nx).enumerate() {
            rows.extend(normalized(row.to_vec(), &format!("strategy row v={v}"))?);
        }
        Ok(Self { nv, nx, table: rows })
    }

    pub fn uniform(nv: usize, nx: usize) -> Self {
        Self {
            nv,
            nx,
            table: vec![1.0 / nx as f64; nv * nx],
        }
    }

    pub fn nv(&self) -> usize {
        self.nv
    }

    pub fn nx(&self) -> usize {
        self.nx
    }

    pub fn row(&self, v: usize) -> &[f64] {
        &self.table[v * self.nx..(v + 1) * self.nx]
    }

    pub fn get(&self, v: usize, x: usize) -> f64 {
        self.table[v * self.nx + x]
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct MaximinConfig {
    pub max_outer: usize,
    pub gap_tolerance: f64,
    pub inner_tolerance: f64,
    pub inner_max_iterations: usize,
}

/// Stalled inner solves with a gap under this fraction of `gap_tolerance` are accepted.
const STALL_FRACTION: f64 = 0.01;

impl Default for MaximinConfig {
    fn default() -> Self {
        Self {
            max_outer: 2000,
            gap_tolerance: 1e-6,
            inner_tolerance: 1e-10,
            inner_max_iterations: 200_000,
        }
    }
}

/// A context `c` with probability `weight`, under which member `d` of the
/// family acts as the `nx x ny` matrix `channels[d]`.
struct Context {
    weight: f64,
    channels: Vec<Vec<f64>>,
}

struct Family {
    nx: usize,
    ny: usize,
    members: usize,
    contexts: Vec<Context>,
}

struct Inner {
    strategy: Vec<Vec<f64>>,
    /// `f_d` at `strategy`
    values: Vec<f64>,
    /// upper bound on `max_p sum_d lambda_d f_d(p)`
    upper: f64,
    iterations: usize,
}

struct MaximinOutcome {
    strategy: Vec<Vec<f64>>,
    upper: f64,
    lower: f64,
    iterations: usize,
}

impl Family {
    fn values(&self, strategy: &[Vec<f64>]) -> Vec<f64> {
        let mut out = vec![0.0; self.members];
        for (ctx, p) in self.contexts.iter().zip(strategy) {
            for (d, w) in ctx.channels.iter().enumerate() {
                out[d] += ctx.weight * input_mutual_information(p, w, self.ny);
            }
        }
        out
    }

    fn solve(&self, lambda: &[f64], cfg: &MaximinConfig) -> Result<Inner> {
        let mut strategy = Vec::with_capacity(self.contexts.len());
        let mut upper = 0.0;
        let mut iterations = 0;
        for ctx in &self.contexts {
            if ctx.weight == 0.0 {
                strategy.push(vec![1.0 / self.nx as f64; self.nx]);
                continue;
            }
            let weighted: Vec<(f64, &[f64])> = lambda.iter().copied().zip(ctx.channels.iter().map(Vec::as_slice)).collect();
            let ba = match weighted_capacity(self.nx, self.ny, &weighted, cfg.inner_tolerance, cfg.inner_max_iterations) {
                Ok(o) => o,
                Err(o) if o.upper - o.value <= STALL_FRACTION * cfg.gap_tolerance => o,
                Err(o) => {
                    return Err(Error::NonConvergence {
                        iterations: o.iterations,
                        gap: o.upper - o.value,
                    })
                }
            };
            upper += ctx.weight * ba.upper;
            iterations += ba.iterations;
            strategy.push(ba.input);
        }
        let values = self.values(&strategy);
        Ok(Inner {
            strategy,
            values,
            upper,
            iterations,
        })
    }

    /// Multiplicative weights on the family members with an exact inner
    /// Blahut-Arimoto step. The base step `sqrt(ln D / max_outer)` is doubled
    /// after each step that lowers the dual value and halved otherwise.
    fn maximin(&self, cfg: &MaximinConfig) -> Result<MaximinOutcome> {
        let m = self.members;
        let mut lambda = vec![1.0 / m as f64; m];
        let mut inner = self.solve(&lambda, cfg)?;
        let mut iterations = inner.iterations;
        let min_of = |v: &[f64]| v.iter().copied().fold(f64::INFINITY, f64::min);

        let mut upper = inner.upper;
        let mut lower = min_of(&inner.values);
        let mut best = inner.strategy.clone();
        if m > 1 {
            // the vertex duals are upper bounds as well
            for d in 0..m {
                let mut e = vec![0.0; m];
                e[d] = 1.0;
                let vertex = self.solve(&e, cfg)?;
                iterations += vertex.iterations;
                upper = upper.min(vertex.upper);
            }
        }
        let mut average: Vec<Vec<f64>> = inner.strategy.clone();
        let mut accepted = 1.0;
        let mut eta = ((m as f64).ln() / cfg.max_outer as f64).sqrt();
        let mut outer = 0;
        while upper - lower >= cfg.gap_tolerance && outer < cfg.max_outer && m > 1 {
            outer += 1;
            let mut trial: Vec<f64> = lambda
                .iter()
                .zip(&inner.values)
                .map(|(l, f)| l * (-eta * f).exp())
                .collect();
            let total: f64 = trial.iter().sum();
            trial.iter_mut().for_each(|l| *l /= total);
            let next = self.solve(&trial, cfg)?;
            iterations += next.iterations;
            upper = upper.min(next.upper);
            let next_min = min_of(&next.values);
            if next_min > lower {
                lower = next_min;
                best = next.strategy.clone();
            }
            let dual_old: f64 = lambda.iter().zip(&inner.values).map(|(l, f)| l * f).sum();
            let dual_new: f64 = trial.iter().zip(&next.values).map(|(l, f)| l * f).sum();
            if dual_new <= dual_old {
                lambda = trial;
                inner = next;
                accepted += 1.0;
                for (avg, p) in average.iter_mut().zip(&inner.strategy) {
                    for (a, v) in avg.iter_mut().zip(p) {
                        *a += (v - *a) / accepted;
                    }
                }
                let avg_min = min_of(&self.values(&average));
                if avg_min > lower {
                    lower = avg_min;
                    best = average.clone();
                }
                eta *= 2.0;
            } else {
                eta *= 0.5;
            }
        }
        if upper - lower >= cfg.gap_tolerance {
            return Err(Error::NonConvergence {
                iterations: outer,
                gap: upper - lower,
            });
        }
        Ok(MaximinOutcome {
            strategy: best,
            upper,
            lower,
            iterations,
        })
    }
}

fn acsitr_family(channel: &StateChannel, delays: &DelaySet) -> Family {
    let ns = channel.ns();
    let width = delays.size();
    let nv = ns.pow(width as u32);
    let contexts = (0..nv)
        .map(|v| {
            let symbols = window_symbols(v, ns, width);
            let weight = symbols.iter().map(|&s| channel.prior().get(s)).product();
            let channels = delays
                .iter()
                .map(|d| channel.state_slice(symbols[delays.window_position(d)]))
                .collect();
            Context { weight, channels }
        })
        .collect();
    Family {
        nx: channel.nx(),
        ny: channel.ny(),
        members: width,
        contexts,
    }
}

pub(crate) fn window_count(channel: &StateChannel, delays: &DelaySet) -> Result<usize> {
    let width = u32::try_from(delays.size()).map_err(|_| invalid("delay set too large"))?;
    channel
        .ns()
        .checked_pow(width)
        .filter(|&n| n <= 1 << 20)
        .ok_or_else(|| invalid("window alphabet too large"))
}

/// `I_d(X;Y|V)` with `V` the product-law window and `Y` driven by `s_{i-d}`.
pub fn acsitr_objective(channel: &StateChannel, delays: &DelaySet, strat: &StrategyPmf, d: i64) -> Result<f64> {
    if !delays.contains(d) {
        return Err(invalid(format!("delay {d} not in {delays}")));
    }
    let nv = window_count(channel, delays)?;
    if strat.nv() != nv || strat.nx() != channel.nx() {
        return Err(dim(format!(
            "strategy over ({}, {}) but the window alphabet is {nv} and nx = {}",
            strat.nv(),
            strat.nx(),
            channel.nx()
        )));
    }
    let ns = channel.ns();
    let width = delays.size();
    let pos = delays.window_position(d);
    let windows: Vec<Vec<usize>> = (0..nv).map(|v| window_symbols(v, ns, width)).collect();
    let joint = JointPmf::from_fn(vec![("X", channel.nx()), ("Y", channel.ny()), ("V", nv)], |i| {
        let w = &windows[i[2]];
        let pv: f64 = w.iter().map(|&s| channel.prior().get(s)).product();
        pv * strat.get(i[2], i[0]) * channel.prob(i[0], w[pos], i[1])
    })?;
    conditional_mutual_information(&joint)
}

/// `max_{P(x|v)} min_d I_d(X;Y|V)`, certified by the dual gap.
pub fn acsitr_capacity(channel: &StateChannel, delays: &DelaySet, cfg: &MaximinConfig) -> Result<SolveReport> {
    let nv = window_count(channel, delays)?;
    let family = acsitr_family(channel, delays);
    let out = family.maximin(cfg)?;
    let table: Vec<f64> = out.strategy.concat();
    let strat = StrategyPmf::new(nv, channel.nx(), table)?;
    let value = delays
        .iter()
        .map(|d| acsitr_objective(channel, delays, &strat, d))
        .collect::<Result<Vec<_>>>()?
        .into_iter()
        .fold(f64::INFINITY, f64::min);
    let mut report = SolveReport::new("acsitr", value, Argument::Strategy(strat), "mw_blahut_arimoto");
    report.iterations = out.iterations;
    report.convergence_gap = (out.upper - value).max(out.upper - out.lower).max(0.0);
    Ok(report)
}

/// `I_theta(X;Y|S)` for one member of a compound family.
pub fn compound_member_objective(member: &StateChannel, strat: &StrategyPmf) -> Result<f64> {
    if strat.nv() != member.ns() || strat.nx() != member.nx() {
        return Err(dim("strategy does not match channel alphabets"));
    }
    let joint = JointPmf::from_fn(vec![("X", member.nx()), ("Y", member.ny()), ("S", member.ns())], |i| {
        member.prior().get(i[2]) * strat.get(i[2], i[0]) * member.prob(i[0], i[2], i[1])
    })?;
    conditional_mutual_information(&joint)
}

/// `max_{P(x|s)} min_theta I_theta(X;Y|S)` over a family sharing alphabets and prior.
pub fn compound_capacity(channels: &[StateChannel], cfg: &MaximinConfig) -> Result<SolveReport> {
    let first = channels.first().ok_or_else(|| invalid("empty channel family"))?;
    for c in channels {
        if !c.same_alphabets(first) {
            return Err(dim("compound family members have different alphabets"));
        }
        if c.prior() != first.prior() {
            return Err(invalid("compound family members have different state priors"));
        }
    }
    let family = Family {
        nx: first.nx(),
        ny: first.ny(),
        members: channels.len(),
        contexts: (0..first.ns())
            .map(|s| Context {
                weight: first.prior().get(s),
                channels: channels.iter().map(|c| c.state_slice(s)).collect(),
            })
            .collect(),
    };
    let out = family.maximin(cfg)?;
    let strat = StrategyPmf::new(first.ns(), first.nx(), out.strategy.concat())?;
    let value = channels
        .iter()
        .map(|c| compound_member_objective(c, &strat))
        .collect::<Result<Vec<_>>>()?
        .into_iter()
        .fold(f64::INFINITY, f64::min);
    let mut report = SolveReport::new("compound", value, Argument::Strategy(strat), "mw_blahut_arimoto");
    report.iterations = out.iterations;
    report.convergence_gap = (out.upper - value).max(out.upper - out.lower).max(0.0);
    Ok(report)
}
