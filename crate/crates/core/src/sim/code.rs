use std::collections::BTreeMap;

use rand::Rng;
use rayon::prelude::*;

use super::report::DelayTally;
use crate::channel::{shifted_states, v_sequence_with_fill, DelaySet, StateChannel};
use crate::error::{guard, invalid, Result};
use crate::rng;

const S_STREAM: u64 = 1;
const SIDE_STREAM: u64 = 2;
const CHANNEL_FILL_STREAM: u64 = 3;
const X_STREAM: u64 = 4;
const Y_STREAM: u64 = 5;
const M_STREAM: u64 = 6;
const D_STREAM: u64 = 7;
const JITTER_STREAM: u64 = 8;
const CODE_STREAM: u64 = 0x434f;
const TRIAL_STREAM: u64 = 0x5452;

/// Enumeration budget of [`exact_error_oracle`].
pub const EXACT_ORACLE_BUDGET: u64 = 1 << 28;

/// Who sees what.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Setting {
    /// The encoder sees `s` shifted by an unknown delay; the channel uses `s`.
    Agp(DelaySet),
    /// The encoder sees `s`; the channel uses `s` shifted by an unknown delay
    /// and both ends share the window sequence.
    Acsitr(DelaySet),
}

impl Setting {
    pub fn delays(&self) -> &DelaySet {
        match self {
            Setting::Agp(d) | Setting::Acsitr(d) => d,
        }
    }
}

/// Side information available to the two ends in one trial.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Observation {
    /// The encoder's state view: delayed states under AGP, the states themselves under ACSITR.
    pub a: Vec<usize>,
    /// Window indices shared by both ends (ACSITR only).
    pub v: Vec<usize>,
    /// Channel delay at each position (ACSITR only, known to the decoder).
    pub delays: Vec<i64>,
}

/// Per-position input laws chosen by the encoder, `n * nx` entries.
#[derive(Clone, Debug, PartialEq)]
pub struct Encoded {
    pub laws: Vec<f64>,
    pub covering_failed: bool,
}

impl Encoded {
    pub fn deterministic(x: &[usize], nx: usize, covering_failed: bool) -> Self {
        let mut laws = vec![0.0; x.len() * nx];
        for (i, &xi) in x.iter().enumerate() {
            laws[i * nx + xi] = 1.0;
        }
        Self { laws, covering_failed }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Verdict {
    pub decoded: Option<usize>,
    /// the transmitted message passes the decoder's test
    pub probe_passes: bool,
    /// some other message passes the decoder's test
    pub other_passes: bool,
}

impl Verdict {
    /// Unique-passer rule over a list of passing messages.
    pub fn from_passing(passing: &[usize], probe: usize) -> Self {
        Self {
            decoded: (passing.len() == 1).then(|| passing[0]),
            probe_passes: passing.contains(&probe),
            other_passes: passing.iter().any(|&m| m != probe),
        }
    }
}

/// A fixed block code. `probe` is used only for bookkeeping of error events;
/// the decision never depends on it.
pub trait BlockCode: Sync {
    fn n(&self) -> usize;
    fn nx(&self) -> usize;
    fn messages(&self) -> usize;
    fn encode(&self, m: usize, obs: &Observation) -> Encoded;
    fn decode(&self, y: &[usize], obs: &Observation, d: i64, probe: usize) -> Verdict;
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub struct Outcome {
    pub error: bool,
    pub e1: bool,
    pub e2: bool,
    pub e3: bool,
}

impl Outcome {
    pub fn from_verdict(v: &Verdict, m: usize, covering_failed: bool) -> Self {
        Self {
            error: v.decoded != Some(m),
            e1: covering_failed,
            e2: !v.probe_passes,
            e3: v.other_passes,
        }
    }

    fn tally(&self) -> DelayTally {
        DelayTally {
            trials: 1,
            errors: self.error as u64,
            e1: self.e1 as u64,
            e2: self.e2 as u64,
            e3: self.e3 as u64,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct McConfig {
    pub trials: u64,
    pub seed: u64,
    /// trials per codebook; a fresh codebook is drawn for every block
    pub refresh: u64,
    /// fixed true delay; drawn uniformly from the delay set when `None`
    pub delay: Option<i64>,
    /// ACSITR only: redraw the delay every this many symbols
    pub jitter: Option<usize>,
}

impl McConfig {
    pub fn new(trials: u64, seed: u64) -> Self {
        Self {
            trials,
            seed,
            refresh: 100,
            delay: None,
            jitter: None,
        }
    }
}

/// Channel-side realization of one trial.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Environment {
    pub obs: Observation,
    pub channel_states: Vec<usize>,
}

fn out_of_range(pattern: &[i64]) -> usize {
    let n = pattern.len() as i64;
    (0..n).filter(|&i| !(0..n).contains(&(i - pattern[i as usize]))).count()
}

/// `t_i = s_{i - pattern_i}`, out-of-range positions taken from `fill` in order.
fn pattern_states(s: &[usize], pattern: &[i64], fill: &[usize]) -> Vec<usize> {
    let n = s.len() as i64;
    let mut next = fill.iter();
    (0..n)
        .map(|i| {
            let src = i - pattern[i as usize];
            if (0..n).contains(&src) {
                s[src as usize]
            } else {
                *next.next().expect("fill length matches out-of-range count")
            }
        })
        .collect()
}

/// Filler lengths `(encoder side, channel)` for a delay pattern.
fn fill_lengths(setting: &Setting, pattern: &[i64]) -> (usize, usize) {
    match setting {
        Setting::Agp(_) => (pattern[0].unsigned_abs() as usize, 0),
        Setting::Acsitr(ds) => (ds.d_min() + ds.d_max(), out_of_range(pattern)),
    }
}

fn environment_from(
    channel: &StateChannel,
    setting: &Setting,
    s: &[usize],
    pattern: &[i64],
    side_fill: &[usize],
    channel_fill: &[usize],
) -> Result<Environment> {
    match setting {
        Setting::Agp(_) => {
            let a = shifted_states(s, pattern[0], side_fill)?;
            Ok(Environment {
                obs: Observation {
                    a,
                    v: Vec::new(),
                    delays: Vec::new(),
                },
                channel_states: s.to_vec(),
            })
        }
        Setting::Acsitr(ds) => {
            let (left, right) = side_fill.split_at(ds.d_max());
            let v = v_sequence_with_fill(s, ds, left.to_vec(), right.to_vec())?.indices(channel.ns());
            Ok(Environment {
                obs: Observation {
                    a: s.to_vec(),
                    v,
                    delays: pattern.to_vec(),
                },
                channel_states: pattern_states(s, pattern, channel_fill),
            })
        }
    }
}

/// Delay at each position: constant `d`, or with jitter `d` on the first
/// sub-block and fresh uniform draws on the others.
fn delay_pattern(setting: &Setting, n: usize, d: i64, jitter: Option<usize>, seed: u64) -> Result<Vec<i64>> {
    match (setting, jitter) {
        (_, None) => Ok(vec![d; n]),
        (Setting::Agp(_), Some(_)) => Err(invalid("delay jitter is only modelled in the ACSITR setting")),
        (Setting::Acsitr(ds), Some(len)) => {
            if len == 0 {
                return Err(invalid("jitter sub-block length must be positive"));
            }
            let all: Vec<i64> = ds.iter().collect();
            let mut r = rng::stream(seed);
            let mut pattern = Vec::with_capacity(n);
            let mut current = d;
            for i in 0..n {
                if i > 0 && i % len == 0 {
                    current = all[r.random_range(0..all.len())];
                }
                pattern.push(current);
            }
            Ok(pattern)
        }
    }
}

/// Draws the states, fillers and (with jitter) delay pattern of one trial.
pub fn draw_environment(
    channel: &StateChannel,
    setting: &Setting,
    n: usize,
    d: i64,
    jitter: Option<usize>,
    seed: u64,
) -> Result<Environment> {
    check_delay(setting, n, d)?;
    let pattern = delay_pattern(setting, n, d, jitter, rng::derive(seed, &[JITTER_STREAM]))?;
    let s = channel.sample_states(n, rng::derive(seed, &[S_STREAM]));
    let (side, ch) = fill_lengths(setting, &pattern);
    let side_fill = channel.sample_states(side, rng::derive(seed, &[SIDE_STREAM]));
    let channel_fill = channel.sample_states(ch, rng::derive(seed, &[CHANNEL_FILL_STREAM]));
    environment_from(channel, setting, &s, &pattern, &side_fill, &channel_fill)
}

fn check_delay(setting: &Setting, n: usize, d: i64) -> Result<()> {
    let ds = setting.delays();
    if !ds.contains(d) {
        return Err(invalid(format!("true delay {d} outside delay set {ds}")));
    }
    if ds.d_min().max(ds.d_max()) >= n {
        return Err(invalid(format!("delays {ds} not shorter than block length {n}")));
    }
    Ok(())
}

pub(crate) fn sample_inputs(laws: &[f64], nx: usize, seed: u64) -> Vec<usize> {
    let mut r = rng::stream(seed);
    laws.chunks(nx).map(|row| rng::categorical(&mut r, row)).collect()
}

/// Runs one trial of a fixed code.
pub fn run_code_trial<C: BlockCode>(
    channel: &StateChannel,
    setting: &Setting,
    code: &C,
    m: usize,
    d: i64,
    jitter: Option<usize>,
    seed: u64,
) -> Result<Outcome> {
    let env = draw_environment(channel, setting, code.n(), d, jitter, seed)?;
    let enc = code.encode(m, &env.obs);
    let x = sample_inputs(&enc.laws, code.nx(), rng::derive(seed, &[X_STREAM]));
    let y = channel.transmit(&x, &env.channel_states, rng::derive(seed, &[Y_STREAM]))?;
    let verdict = code.decode(&y, &env.obs, d, m);
    Ok(Outcome::from_verdict(&verdict, m, enc.covering_failed))
}

/// Parallel, seed-deterministic trial loop. `build` makes the per-block state
/// (typically a codebook) and `trial` runs one trial given the true delay and
/// the trial seed.
pub(crate) fn drive<S, B, T>(cfg: &McConfig, delays: &DelaySet, build: B, trial: T) -> Result<BTreeMap<i64, DelayTally>>
where
    B: Fn(u64) -> Result<S> + Sync,
    T: Fn(&S, i64, u64) -> Result<Outcome> + Sync,
{
    if cfg.trials == 0 {
        return Err(invalid("trial count must be positive"));
    }
    if let Some(d) = cfg.delay {
        if !delays.contains(d) {
            return Err(invalid(format!("true delay {d} outside delay set {delays}")));
        }
    }
    let refresh = if cfg.refresh == 0 { cfg.trials } else { cfg.refresh };
    let blocks = cfg.trials.div_ceil(refresh);
    let all: Vec<i64> = delays.iter().collect();
    let partial: Vec<Result<BTreeMap<i64, DelayTally>>> = (0..blocks)
        .into_par_iter()
        .map(|b| {
            let state = build(rng::derive(cfg.seed, &[CODE_STREAM, if cfg.refresh == 0 { 0 } else { b }]))?;
            let mut out: BTreeMap<i64, DelayTally> = BTreeMap::new();
            for t in b * refresh..((b + 1) * refresh).min(cfg.trials) {
                let ts = rng::derive(cfg.seed, &[TRIAL_STREAM, t]);
                let d = cfg
                    .delay
                    .unwrap_or_else(|| all[rng::stream(rng::derive(ts, &[D_STREAM])).random_range(0..all.len())]);
                let o = trial(&state, d, ts)?;
                out.entry(d).or_default().merge(&o.tally());
            }
            Ok(out)
        })
        .collect();
    let mut merged: BTreeMap<i64, DelayTally> = BTreeMap::new();
    for p in partial {
        for (d, t) in p? {
            merged.entry(d).or_default().merge(&t);
        }
    }
    Ok(merged)
}

/// Message index for a trial, uniform over `messages`.
pub(crate) fn draw_message(messages: usize, trial_seed: u64) -> usize {
    rng::stream(rng::derive(trial_seed, &[M_STREAM])).random_range(0..messages)
}

/// Monte Carlo error rate of codes produced by `build` (one per block seed).
pub fn simulate_code<C, F>(
    channel: &StateChannel,
    setting: &Setting,
    cfg: &McConfig,
    build: F,
) -> Result<BTreeMap<i64, DelayTally>>
where
    C: BlockCode,
    F: Fn(u64) -> Result<C> + Sync,
{
    drive(cfg, setting.delays(), build, |code, d, ts| {
        let m = draw_message(code.messages(), ts);
        run_code_trial(channel, setting, code, m, d, cfg.jitter, ts)
    })
}

/// Exact error probabilities of a fixed code.
#[derive(Clone, Debug, PartialEq)]
pub struct ExactError {
    /// error probability given each true delay, messages uniform
    pub per_delay: BTreeMap<i64, f64>,
    /// average over a uniform true delay
    pub average: f64,
    pub leaves: u64,
}

fn all_sequences(alphabet: usize, len: usize) -> impl Iterator<Item = Vec<usize>> {
    let total = alphabet.pow(len as u32);
    (0..total).map(move |mut idx| {
        let mut v = vec![0; len];
        for slot in v.iter_mut() {
            *slot = idx % alphabet;
            idx /= alphabet;
        }
        v
    })
}

/// Enumerates messages, states, fillers, inputs and outputs of a fixed code
/// and sums the probability of a decoding error, pruning zero-probability
/// branches. Fails with a guard error past [`EXACT_ORACLE_BUDGET`] leaves.
pub fn exact_error_oracle<C: BlockCode>(channel: &StateChannel, setting: &Setting, code: &C) -> Result<ExactError> {
    let n = code.n();
    let nx = code.nx();
    let ns = channel.ns();
    let prior = channel.prior().probs();
    let seq_prob = |seq: &[usize]| seq.iter().map(|&s| prior[s]).product::<f64>();
    let mut per_delay = BTreeMap::new();
    let mut leaves = 0u64;
    for d in setting.delays().iter() {
        check_delay(setting, n, d)?;
        let pattern = vec![d; n];
        let (side, ch) = fill_lengths(setting, &pattern);
        let outer = (code.messages() as f64) * (ns as f64).powi((n + side + ch) as i32);
        if outer > EXACT_ORACLE_BUDGET as f64 {
            return Err(guard(format!("exact enumeration needs {outer:.3e} outer cases")));
        }
        let mut err = 0.0;
        for m in 0..code.messages() {
            for s in all_sequences(ns, n) {
                let ps = seq_prob(&s);
                if ps == 0.0 {
                    continue;
                }
                for sf in all_sequences(ns, side) {
                    let psf = ps * seq_prob(&sf);
                    if psf == 0.0 {
                        continue;
                    }
                    for cf in all_sequences(ns, ch) {
                        let p0 = psf * seq_prob(&cf);
                        if p0 == 0.0 {
                            continue;
                        }
                        let env = environment_from(channel, setting, &s, &pattern, &sf, &cf)?;
                        let enc = code.encode(m, &env.obs);
                        let mut y = vec![0; n];
                        let mut walk = Walk {
                            channel,
                            laws: &enc.laws,
                            nx,
                            t: &env.channel_states,
                            leaves: &mut leaves,
                        };
                        err += p0
                            * walk.error_mass(0, &mut y, &mut |y: &[usize]| {
                                code.decode(y, &env.obs, d, m).decoded != Some(m)
                            })?;
                    }
                }
            }
        }
        per_delay.insert(d, err / code.messages() as f64);
    }
    let average = per_delay.values().sum::<f64>() / per_delay.len() as f64;
    Ok(ExactError {
        per_delay,
        average,
        leaves,
    })
}

struct Walk<'a> {
    channel: &'a StateChannel,
    laws: &'a [f64],
    nx: usize,
    t: &'a [usize],
    leaves: &'a mut u64,
}

impl Walk<'_> {
    fn error_mass(&mut self, i: usize, y: &mut [usize], is_error: &mut dyn FnMut(&[usize]) -> bool) -> Result<f64> {
        if i == y.len() {
            *self.leaves += 1;
            if *self.leaves > EXACT_ORACLE_BUDGET {
                return Err(guard("exact enumeration exceeded its leaf budget"));
            }
            return Ok(if is_error(y) { 1.0 } else { 0.0 });
        }
        let ny = self.channel.ny();
        // marginal of y_i after summing out x_i
        let mut py = vec![0.0; ny];
        for x in 0..self.nx {
            let px = self.laws[i * self.nx + x];
            if px > 0.0 {
                for (yy, &w) in self.channel.row(x, self.t[i]).iter().enumerate() {
                    py[yy] += px * w;
                }
            }
        }
        let mut total = 0.0;
        for (yy, &p) in py.iter().enumerate() {
            if p > 0.0 {
                y[i] = yy;
                total += p * self.error_mass(i + 1, y, is_error)?;
            }
        }
        Ok(total)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Uncoded transmission of one bit repeated over the block, decoded by
    /// majority; no side information is used.
    struct Repetition {
        n: usize,
    }

    impl BlockCode for Repetition {
        fn n(&self) -> usize {
            self.n
        }
        fn nx(&self) -> usize {
            2
        }
        fn messages(&self) -> usize {
            2
        }
        fn encode(&self, m: usize, _: &Observation) -> Encoded {
            Encoded::deterministic(&vec![m; self.n], 2, false)
        }
        fn decode(&self, y: &[usize], _: &Observation, _: i64, probe: usize) -> Verdict {
            let ones = y.iter().filter(|&&b| b == 1).count();
            let passing: Vec<usize> = if 2 * ones > y.len() { vec![1] } else { vec![0] };
            Verdict::from_passing(&passing, probe)
        }
    }

    fn bsc(q: f64) -> StateChannel {
        StateChannel::state_blind(2, &[vec![1.0 - q, q], vec![q, 1.0 - q]], crate::prob::Pmf::uniform(2)).unwrap()
    }

    #[test]
    fn repetition_code_oracle_matches_binomial_tail() {
        let ch = bsc(0.2);
        let setting = Setting::Agp(DelaySet::synchronous());
        let ex = exact_error_oracle(&ch, &setting, &Repetition { n: 3 }).unwrap();
        // message 1 fails with >= 2 flips; message 0 also fails on ties, none at n = 3
        let tail = 3.0 * 0.2f64.powi(2) * 0.8 + 0.2f64.powi(3);
        assert!((ex.average - tail).abs() < 1e-12);
    }

    #[test]
    fn monte_carlo_agrees_with_oracle_and_is_reproducible() {
        let ch = bsc(0.2);
        let setting = Setting::Agp(DelaySet::new(0, 1));
        let code = Repetition { n: 5 };
        let ex = exact_error_oracle(&ch, &setting, &code).unwrap();
        let cfg = McConfig::new(20_000, 3);
        let run = || simulate_code(&ch, &setting, &cfg, |_| Ok(Repetition { n: 5 })).unwrap();
        let a = run();
        assert_eq!(a, run());
        let mut total = DelayTally::default();
        a.values().for_each(|t| total.merge(t));
        let se = (ex.average * (1.0 - ex.average) / 20_000.0).sqrt();
        assert!((total.error_rate() - ex.average).abs() < 4.0 * se);
    }

    #[test]
    fn environment_layouts() {
        let ch = StateChannel::xor(0.5).unwrap();
        let ds = DelaySet::new(0, 1);
        let s = [1, 0, 1, 1];
        let agp = environment_from(&ch, &Setting::Agp(ds), &s, &[1; 4], &[0], &[]).unwrap();
        assert_eq!(agp.obs.a, vec![0, 1, 0, 1]);
        assert_eq!(agp.channel_states, s.to_vec());
        let ac = environment_from(&ch, &Setting::Acsitr(ds), &s, &[1; 4], &[0], &[1]).unwrap();
        assert_eq!(ac.channel_states, vec![1, 1, 0, 1]);
        // windows (s_{i-1}, s_i)
        assert_eq!(ac.obs.v, vec![1, 2, 1, 3]);
    }

    #[test]
    fn jitter_patterns() {
        let ds = DelaySet::new(0, 1);
        let p = delay_pattern(&Setting::Acsitr(ds), 12, 1, Some(4), 9).unwrap();
        assert!(p[..4].iter().all(|&d| d == 1));
        assert!(p.iter().all(|&d| ds.contains(d)));
        assert!(delay_pattern(&Setting::Agp(ds), 12, 1, Some(4), 9).is_err());
        assert_eq!(pattern_states(&[5, 6, 7], &[1, 0, 1], &[9]), vec![9, 6, 6]);
    }
}
