//! Strategy-codebook scheme when the encoder sees the states and the channel
//! sees them with a delay known to the decoder.
//!
//! Each message owns a strategy word: for every position and every window
//! value `v`, an input drawn from `P(x|v)`. Both ends know the window
//! sequence, so the encoder sends the entry matching `v_i` and the decoder
//! tests conditional typicality of `(x, y)` given the windows under the law
//! for the true delay.

use rand::Rng;

use super::code::{draw_environment, drive, simulate_code, BlockCode, Encoded, McConfig, Observation, Outcome, Setting, Verdict};
use super::ensemble::{any_competitor_passes, restricted_multinomial, typical_range, LnFactorial};
use super::report::TrialReport;
use super::scheme::{check_epsilon, message_count, CodeMode, MAX_EXPLICIT_MESSAGES};
use crate::channel::{window_symbols, DelaySet, StateChannel};
use crate::error::{dim, guard, invalid, Result};
use crate::rates::StrategyPmf;
use crate::rng;

pub const ACSITR_DEFAULT_EPSILON: f64 = 0.1;
/// Largest explicit strategy codebook, in stored input symbols.
pub const MAX_STRATEGY_ENTRIES: f64 = (1u64 << 28) as f64;
const ENSEMBLE_STREAM: u64 = 0x454e;

#[derive(Clone, Debug, PartialEq)]
pub struct AcsitrConfig {
    pub strategy: StrategyPmf,
    pub n: usize,
    pub rate: f64,
    pub delays: DelaySet,
    pub epsilon: f64,
    pub mode: CodeMode,
}

impl AcsitrConfig {
    pub fn new(strategy: StrategyPmf, delays: DelaySet, n: usize, rate: f64) -> Self {
        Self {
            strategy,
            n,
            rate,
            delays,
            epsilon: ACSITR_DEFAULT_EPSILON,
            mode: CodeMode::Auto,
        }
    }
}

/// Channel and window tables shared by the explicit and ensemble decoders.
#[derive(Clone, Debug)]
struct Tables {
    nx: usize,
    ny: usize,
    nv: usize,
    /// `P(x|v)` at `v * nx + x`
    strategy: Vec<f64>,
    /// `W(y | x, window entry for delay d)` at `((rank(d) * nv + v) * nx + x) * ny + y`
    kernel: Vec<f64>,
    delays: DelaySet,
    epsilon: f64,
}

impl Tables {
    fn new(channel: &StateChannel, cfg: &AcsitrConfig) -> Result<Self> {
        check_epsilon(cfg.epsilon)?;
        let (ns, nx, ny) = (channel.ns(), channel.nx(), channel.ny());
        let width = cfg.delays.size();
        let nv = u32::try_from(width)
            .ok()
            .and_then(|w| ns.checked_pow(w))
            .filter(|&v| v <= 1 << 20)
            .ok_or_else(|| invalid("window alphabet too large"))?;
        if cfg.strategy.nv() != nv || cfg.strategy.nx() != nx {
            return Err(dim(format!("strategy over ({}, {}) for windows {nv} and nx = {nx}", cfg.strategy.nv(), cfg.strategy.nx())));
        }
        if cfg.delays.d_min().max(cfg.delays.d_max()) >= cfg.n {
            return Err(invalid("delays must be shorter than the block"));
        }
        let strategy = (0..nv).flat_map(|v| cfg.strategy.row(v).to_vec()).collect();
        let mut kernel = vec![0.0; width * nv * nx * ny];
        for d in cfg.delays.iter() {
            let pos = cfg.delays.window_position(d);
            for v in 0..nv {
                let s = window_symbols(v, ns, width)[pos];
                for x in 0..nx {
                    let base = ((cfg.delays.rank(d) * nv + v) * nx + x) * ny;
                    kernel[base..base + ny].copy_from_slice(channel.row(x, s));
                }
            }
        }
        Ok(Self {
            nx,
            ny,
            nv,
            strategy,
            kernel,
            delays: cfg.delays,
            epsilon: cfg.epsilon,
        })
    }

    fn cell(&self, v: usize, x: usize, y: usize) -> usize {
        (v * self.nx + x) * self.ny + y
    }

    /// Positions whose channel state lies inside the block.
    fn tested(obs: &Observation) -> Vec<usize> {
        let n = obs.delays.len() as i64;
        (0..n)
            .filter(|&i| (0..n).contains(&(i - obs.delays[i as usize])))
            .map(|i| i as usize)
            .collect()
    }

    /// Expected cell counts `sum_i P(x|v_i) W(y|x, v_i at d_i)` over tested positions.
    fn expected(&self, obs: &Observation, tested: &[usize]) -> Vec<f64> {
        let mut e = vec![0.0; self.nv * self.nx * self.ny];
        for &i in tested {
            let v = obs.v[i];
            let rank = self.delays.rank(obs.delays[i]);
            for x in 0..self.nx {
                let px = self.strategy[v * self.nx + x];
                if px == 0.0 {
                    continue;
                }
                let base = ((rank * self.nv + v) * self.nx + x) * self.ny;
                for y in 0..self.ny {
                    e[self.cell(v, x, y)] += px * self.kernel[base + y];
                }
            }
        }
        e
    }

    fn typical(&self, counts: &[usize], expected: &[f64], n_t: usize) -> bool {
        if n_t == 0 {
            return false;
        }
        let slack = self.epsilon * n_t as f64;
        counts.iter().zip(expected).all(|(&c, &e)| {
            if e <= 0.0 {
                c == 0
            } else {
                (c as f64 - e).abs() <= slack + 1e-9
            }
        })
    }

    fn counts(&self, x: impl Fn(usize) -> usize, y: &[usize], obs: &Observation, tested: &[usize]) -> Vec<usize> {
        let mut c = vec![0usize; self.nv * self.nx * self.ny];
        for &i in tested {
            c[self.cell(obs.v[i], x(i), y[i])] += 1;
        }
        c
    }
}

/// Explicit strategy codebook.
#[derive(Clone, Debug)]
pub struct AcsitrCode {
    tables: Tables,
    n: usize,
    messages: usize,
    /// `book[(m * n + i) * nv + v]`
    book: Vec<u8>,
}

impl AcsitrCode {
    pub fn random(channel: &StateChannel, cfg: &AcsitrConfig, seed: u64) -> Result<Self> {
        let tables = Tables::new(channel, cfg)?;
        let m = message_count(cfg.n, cfg.rate)?;
        if m > MAX_EXPLICIT_MESSAGES || m * (cfg.n * tables.nv) as f64 > MAX_STRATEGY_ENTRIES || tables.nx > 256 {
            return Err(guard(format!("explicit strategy codebook with {m:.3e} messages exceeds the simulator limits")));
        }
        let mut r = rng::stream(seed);
        let (nv, nx) = (tables.nv, tables.nx);
        let book = (0..m as usize * cfg.n * nv)
            .map(|j| rng::categorical(&mut r, &tables.strategy[(j % nv) * nx..(j % nv + 1) * nx]) as u8)
            .collect();
        Ok(Self {
            tables,
            n: cfg.n,
            messages: m as usize,
            book,
        })
    }

    fn entry(&self, m: usize, i: usize, v: usize) -> usize {
        self.book[(m * self.n + i) * self.tables.nv + v] as usize
    }
}

impl BlockCode for AcsitrCode {
    fn n(&self) -> usize {
        self.n
    }

    fn nx(&self) -> usize {
        self.tables.nx
    }

    fn messages(&self) -> usize {
        self.messages
    }

    fn encode(&self, m: usize, obs: &Observation) -> Encoded {
        let x: Vec<usize> = (0..self.n).map(|i| self.entry(m, i, obs.v[i])).collect();
        Encoded::deterministic(&x, self.tables.nx, false)
    }

    fn decode(&self, y: &[usize], obs: &Observation, _: i64, probe: usize) -> Verdict {
        let tested = Tables::tested(obs);
        let expected = self.tables.expected(obs, &tested);
        let passing: Vec<usize> = (0..self.messages)
            .filter(|&m| {
                let c = self.tables.counts(|i| self.entry(m, i, obs.v[i]), y, obs, &tested);
                self.tables.typical(&c, &expected, tested.len())
            })
            .collect();
        Verdict::from_passing(&passing, probe)
    }
}

fn ensemble_trial(channel: &StateChannel, cfg: &AcsitrConfig, t: &Tables, m: f64, d: i64, jitter: Option<usize>, ts: u64) -> Result<Outcome> {
    let env = draw_environment(channel, &Setting::Acsitr(cfg.delays), cfg.n, d, jitter, ts)?;
    let obs = &env.obs;
    let mut r = rng::substream(ts, &[ENSEMBLE_STREAM]);
    let x: Vec<usize> = obs
        .v
        .iter()
        .map(|&v| rng::categorical(&mut r, &t.strategy[v * t.nx..(v + 1) * t.nx]))
        .collect();
    let y = channel.transmit(&x, &env.channel_states, rng::derive(ts, &[ENSEMBLE_STREAM, 1]))?;
    let tested = Tables::tested(obs);
    let expected = t.expected(obs, &tested);
    let true_passes = t.typical(&t.counts(|i| x[i], &y, obs, &tested), &expected, tested.len());
    // a competitor's entries at the realized windows are i.i.d. P(x|v_i) and
    // independent of y, so its cell counts are independent multinomials per (v, y)
    let n_t = tested.len();
    let mut class = vec![0usize; t.nv * t.ny];
    for &i in &tested {
        class[obs.v[i] * t.ny + y[i]] += 1;
    }
    let lf = LnFactorial::new(n_t);
    let mut q = if n_t == 0 { 0.0 } else { 1.0 };
    'classes: for v in 0..t.nv {
        for yv in 0..t.ny {
            let count = class[v * t.ny + yv];
            let mut ranges = Vec::with_capacity(t.nx);
            for xv in 0..t.nx {
                match typical_range(expected[t.cell(v, xv, yv)], n_t, t.epsilon, count) {
                    Some(rg) => ranges.push(rg),
                    None => {
                        q = 0.0;
                        break 'classes;
                    }
                }
            }
            q *= restricted_multinomial(count, &t.strategy[v * t.nx..(v + 1) * t.nx], &ranges, &lf);
            if q == 0.0 {
                break 'classes;
            }
        }
    }
    let other = r.random::<f64>() < any_competitor_passes(q, m - 1.0);
    Ok(Outcome {
        error: !true_passes || other,
        e1: false,
        e2: !true_passes,
        e3: other,
    })
}

/// Monte Carlo error rate of the strategy-codebook scheme.
pub fn acsitr_simulate(channel: &StateChannel, cfg: &AcsitrConfig, mc: &McConfig) -> Result<TrialReport> {
    let tables = Tables::new(channel, cfg)?;
    let m = message_count(cfg.n, cfg.rate)?;
    let explicit_ok = m * (cfg.n * tables.nv) as f64 <= MAX_STRATEGY_ENTRIES;
    let mode = cfg.mode.resolve(m, mc.trials, explicit_ok)?;
    let setting = Setting::Acsitr(cfg.delays);
    let per_delay = match mode {
        CodeMode::Explicit => simulate_code(channel, &setting, mc, |seed| AcsitrCode::random(channel, cfg, seed))?,
        _ => drive(mc, &cfg.delays, |_| Ok(()), |_, d, ts| ensemble_trial(channel, cfg, &tables, m, d, mc.jitter, ts))?,
    };
    let mut report = TrialReport::new("acsitr", cfg.n, cfg.rate, "custom", mc.seed)
        .param("delays", cfg.delays)
        .param("epsilon", cfg.epsilon)
        .param("mode", mode)
        .param("refresh", mc.refresh);
    if let Some(d) = mc.delay {
        report = report.param("fixed_delay", d);
    }
    if let Some(j) = mc.jitter {
        report = report.param("jitter", j);
    }
    report.per_delay = per_delay;
    Ok(report)
}
