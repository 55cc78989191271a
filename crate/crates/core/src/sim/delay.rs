//! Training-based delay estimation.
//!
//! Blind receiver (encoder sees delayed states): the training block has one
//! segment per candidate delay, segment `k` sending `f(a_{i + d_k})`. Only the
//! segment matching the true delay puts the input in step with the channel
//! state, so the decoder picks the segment whose outputs are most likely under
//! the synchronized output law against the unsynchronized one.
//!
//! Receiver knowing the states (channel sees delayed states): the training
//! block sends `f(s_i)` and the decoder maximizes the likelihood of `y` over
//! the shift applied to `s`.

use super::code::{draw_environment, drive, McConfig, Outcome, Setting};
use super::layout::SegmentLayout;
use super::report::TrialReport;
use crate::channel::{DelaySet, StateChannel};
use crate::error::{dim, invalid, Result};
use crate::rng;

/// Total-variation distance below which the two output laws are treated as equal.
pub const INDISTINGUISHABLE_TV: f64 = 1e-12;
const Y_STREAM: u64 = 0x59;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TrainingPlan {
    pub segment_len: usize,
    pub delays: DelaySet,
    /// training input `f(state)` for each state symbol
    pub map: Vec<usize>,
}

impl TrainingPlan {
    pub fn new(segment_len: usize, delays: DelaySet, map: Vec<usize>) -> Self {
        Self {
            segment_len,
            delays,
            map,
        }
    }

    pub fn len(&self) -> usize {
        self.segment_len * self.delays.size()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    fn check_map(&self, channel: &StateChannel) -> Result<()> {
        if self.map.len() != channel.ns() || self.map.iter().any(|&x| x >= channel.nx()) {
            return Err(dim("training map must send every state symbol to an input symbol"));
        }
        if self.delays.d_min().max(self.delays.d_max()) >= self.len() {
            return Err(invalid("training block must be longer than the largest delay"));
        }
        Ok(())
    }

    fn check(&self, channel: &StateChannel) -> Result<SegmentLayout> {
        self.check_map(channel)?;
        if self.delays.d_min().max(self.delays.d_max()) >= self.segment_len {
            return Err(invalid("training segments must be longer than the largest delay"));
        }
        SegmentLayout::new(self.len(), &self.delays)
    }

    /// Inputs for a blind receiver: segment `k` compensates delay `d_k`.
    pub fn blind_inputs(&self, channel: &StateChannel, a: &[usize]) -> Result<Vec<usize>> {
        let layout = self.check(channel)?;
        if a.len() != self.len() {
            return Err(dim(format!("view of length {} for a training block of {}", a.len(), self.len())));
        }
        Ok((0..self.len()).map(|i| layout.compensation(i).map_or(0, |j| self.map[a[j]])).collect())
    }

    /// Inputs when the receiver knows the states.
    pub fn known_state_inputs(&self, s: &[usize]) -> Vec<usize> {
        s.iter().map(|&si| self.map[si]).collect()
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct DelayEstimate {
    /// `None` when the training carries no information about the delay
    pub d_hat: Option<i64>,
    /// score of every candidate delay, in delay order
    pub scores: Vec<(i64, f64)>,
    pub indistinguishable: bool,
}

/// Output laws `(q_sync, q_async)` of the blind training signal.
pub fn training_output_laws(channel: &StateChannel, map: &[usize]) -> (Vec<f64>, Vec<f64>) {
    let (ns, ny) = (channel.ns(), channel.ny());
    let prior = channel.prior().probs();
    let mut sync = vec![0.0; ny];
    let mut asyn = vec![0.0; ny];
    for s in 0..ns {
        for (y, &w) in channel.row(map[s], s).iter().enumerate() {
            sync[y] += prior[s] * w;
        }
        for a in 0..ns {
            for (y, &w) in channel.row(map[a], s).iter().enumerate() {
                asyn[y] += prior[s] * prior[a] * w;
            }
        }
    }
    (sync, asyn)
}

fn log_ratio(num: f64, den: f64) -> f64 {
    match (num > 0.0, den > 0.0) {
        (true, true) => num.ln() - den.ln(),
        (true, false) => f64::INFINITY,
        (false, true) => f64::NEG_INFINITY,
        (false, false) => 0.0,
    }
}

/// Highest score; ties go to the smaller `|d|`, then the smaller `d`.
fn pick(scores: &[(i64, f64)]) -> i64 {
    scores
        .iter()
        .copied()
        .max_by(|(da, sa), (db, sb)| {
            sa.total_cmp(sb)
                .then_with(|| db.abs().cmp(&da.abs()))
                .then_with(|| db.cmp(da))
        })
        .map(|(d, _)| d)
        .expect("delay sets are never empty")
}

/// Estimates the delay from a received training block. With `s = None` the
/// receiver is blind; otherwise it knows the state block the training was
/// keyed to.
pub fn estimate_delay(channel: &StateChannel, plan: &TrainingPlan, y: &[usize], s: Option<&[usize]>) -> Result<DelayEstimate> {
    plan.check_map(channel)?;
    if y.len() != plan.len() {
        return Err(dim(format!("training output of length {} for a plan of {}", y.len(), plan.len())));
    }
    match s {
        None => {
            let layout = plan.check(channel)?;
            let (sync, asyn) = training_output_laws(channel, &plan.map);
            let tv = 0.5 * sync.iter().zip(&asyn).map(|(a, b)| (a - b).abs()).sum::<f64>();
            let scores: Vec<(i64, f64)> = (0..layout.segments())
                .map(|k| {
                    let llr = layout
                        .valid_positions(k)
                        .iter()
                        .map(|&i| log_ratio(sync[y[i]], asyn[y[i]]))
                        .sum();
                    (layout.delay_of(k), llr)
                })
                .collect();
            let indistinguishable = tv < INDISTINGUISHABLE_TV;
            Ok(DelayEstimate {
                d_hat: (!indistinguishable).then(|| pick(&scores)),
                scores,
                indistinguishable,
            })
        }
        Some(s) => {
            if s.len() != y.len() {
                return Err(dim("state block and training output differ in length"));
            }
            let x = plan.known_state_inputs(s);
            let avg = channel.averaged();
            let ny = channel.ny();
            let n = y.len() as i64;
            let scores: Vec<(i64, f64)> = plan
                .delays
                .iter()
                .map(|d| {
                    let ll = (0..n)
                        .map(|i| {
                            let src = i - d;
                            let (xi, yi) = (x[i as usize], y[i as usize]);
                            let p = if (0..n).contains(&src) {
                                channel.prob(xi, s[src as usize], yi)
                            } else {
                                avg[xi * ny + yi]
                            };
                            if p > 0.0 {
                                p.ln()
                            } else {
                                f64::NEG_INFINITY
                            }
                        })
                        .sum();
                    (d, ll)
                })
                .collect();
            let indistinguishable = channel.ignores_state();
            Ok(DelayEstimate {
                d_hat: (!indistinguishable).then(|| pick(&scores)),
                scores,
                indistinguishable,
            })
        }
    }
}

/// Monte Carlo success rate of the delay estimator; errors count wrong or
/// missing estimates.
pub fn delay_simulate(channel: &StateChannel, plan: &TrainingPlan, knows_states: bool, mc: &McConfig) -> Result<TrialReport> {
    if knows_states {
        plan.check_map(channel)?;
    } else {
        plan.check(channel)?;
    }
    let setting = if knows_states {
        Setting::Acsitr(plan.delays)
    } else {
        Setting::Agp(plan.delays)
    };
    if mc.jitter.is_some() {
        return Err(invalid("delay estimation assumes one delay per training block"));
    }
    let per_delay = drive(mc, &plan.delays, |_| Ok(()), |_, d, ts| {
        let env = draw_environment(channel, &setting, plan.len(), d, None, ts)?;
        let (x, s) = if knows_states {
            (plan.known_state_inputs(&env.obs.a), Some(env.obs.a.as_slice()))
        } else {
            (plan.blind_inputs(channel, &env.obs.a)?, None)
        };
        let y = channel.transmit(&x, &env.channel_states, rng::derive(ts, &[Y_STREAM]))?;
        let est = estimate_delay(channel, plan, &y, s)?;
        Ok(Outcome {
            error: est.d_hat != Some(d),
            ..Outcome::default()
        })
    })?;
    let mut report = TrialReport::new("delay", plan.len(), 0.0, "custom", mc.seed)
        .param("segment_len", plan.segment_len)
        .param("delays", plan.delays)
        .param("receiver", if knows_states { "knows_states" } else { "blind" });
    if let Some(d) = mc.delay {
        report = report.param("fixed_delay", d);
    }
    report.per_delay = per_delay;
    Ok(report)
}
