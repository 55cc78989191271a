//! Segment scheme for the binary channel `Y = X xor S` whose encoder sees the
//! state sequence with an unknown delay.
//!
//! The block is cut into one segment per candidate delay. Segment `k` sends
//! `x_i = u_i xor a_{i + d_k}`, which cancels the state exactly when the true
//! delay is `d_k`. Positions whose compensation index leaves the block send
//! symbol 0 and are ignored by the decoder. Given the true delay, the decoder
//! asks for exact agreement with `u` on the aligned segment and for joint
//! typicality with the independent-pair law on every other segment. When the
//! state is deterministic that law is deterministic too and the test becomes
//! exact agreement everywhere.

use rand::Rng;

use super::code::{draw_environment, drive, simulate_code, BlockCode, Encoded, McConfig, Observation, Outcome, Setting, Verdict};
use super::ensemble::{any_competitor_passes, restricted_multinomial, typical_range, LnFactorial};
use super::layout::SegmentLayout;
use super::report::TrialReport;
use super::scheme::{check_epsilon, message_count, CodeMode};
use crate::channel::{DelaySet, StateChannel};
use crate::error::{guard, invalid, Result};
use crate::prob::counts_typical;
use crate::rng;

pub const BSAGP_DEFAULT_EPSILON: f64 = 0.25;
const ENSEMBLE_STREAM: u64 = 0x454e;

#[derive(Clone, Debug, PartialEq)]
pub struct BsagpConfig {
    pub p: f64,
    pub n: usize,
    pub rate: f64,
    pub delays: DelaySet,
    pub epsilon: f64,
    pub mode: CodeMode,
}

impl BsagpConfig {
    pub fn new(p: f64, n: usize, rate: f64) -> Self {
        Self {
            p,
            n,
            rate,
            delays: DelaySet::new(0, 1),
            epsilon: BSAGP_DEFAULT_EPSILON,
            mode: CodeMode::Auto,
        }
    }

    fn validate(&self) -> Result<(StateChannel, SegmentLayout, f64)> {
        let channel = StateChannel::xor(self.p)?;
        let layout = SegmentLayout::new(self.n, &self.delays)?;
        if self.delays.d_min().max(self.delays.d_max()) >= layout.segment_len() {
            return Err(invalid("delays must be shorter than a segment"));
        }
        check_epsilon(self.epsilon)?;
        if self.rate >= 1.0 {
            return Err(invalid(format!("rate {} must be below 1 bit per symbol", self.rate)));
        }
        Ok((channel, layout, message_count(self.n, self.rate)?))
    }

    /// `P(u, y)` on a misaligned segment, index `2u + y`.
    fn product_law(&self) -> [f64; 4] {
        let theta = 2.0 * self.p * (1.0 - self.p);
        [0.5 * (1.0 - theta), 0.5 * theta, 0.5 * theta, 0.5 * (1.0 - theta)]
    }
}

/// Explicit BS-AGP codebook of `u64`-packed binary codewords.
#[derive(Clone, Debug)]
pub struct BsagpCode {
    layout: SegmentLayout,
    words: Vec<u64>,
    masks: Vec<u64>,
    product: [f64; 4],
    epsilon: f64,
}

impl BsagpCode {
    /// Codewords with i.i.d. uniform bits.
    pub fn random(cfg: &BsagpConfig, seed: u64) -> Result<Self> {
        let (_, _, m) = cfg.validate()?;
        if cfg.n > 64 || m > super::scheme::MAX_EXPLICIT_MESSAGES {
            return Err(guard(format!("explicit BS-AGP codebook needs n <= 64 and at most 2^26 words, got n = {} and {m:.3e}", cfg.n)));
        }
        let mut r = rng::stream(seed);
        let keep = if cfg.n == 64 { u64::MAX } else { (1u64 << cfg.n) - 1 };
        let words = (0..m as usize).map(|_| r.random::<u64>() & keep).collect();
        Self::with_codewords(cfg, words)
    }

    pub fn with_codewords(cfg: &BsagpConfig, words: Vec<u64>) -> Result<Self> {
        let (_, layout, _) = cfg.validate()?;
        if cfg.n > 64 || words.is_empty() {
            return Err(invalid("explicit BS-AGP codebook needs n <= 64 and at least one word"));
        }
        let masks = (0..layout.segments()).map(|k| layout.valid_mask(k)).collect();
        Ok(Self {
            layout,
            words,
            masks,
            product: cfg.product_law(),
            epsilon: cfg.epsilon,
        })
    }

    pub fn words(&self) -> &[u64] {
        &self.words
    }

    fn passes(&self, u: u64, y: u64, aligned: usize) -> bool {
        let exact_everywhere = self.product[1] == 0.0;
        (0..self.masks.len()).all(|k| {
            let mask = self.masks[k];
            if k == aligned || exact_everywhere {
                (u ^ y) & mask == 0
            } else {
                pair_typical(u, y, mask, &self.product, self.epsilon)
            }
        })
    }
}

fn pair_typical(u: u64, y: u64, mask: u64, law: &[f64; 4], eps: f64) -> bool {
    let total = mask.count_ones() as usize;
    if total == 0 {
        return true;
    }
    let c11 = (u & y & mask).count_ones() as usize;
    let c10 = (u & !y & mask).count_ones() as usize;
    let c01 = (!u & y & mask).count_ones() as usize;
    let c00 = total - c11 - c10 - c01;
    counts_typical(&[c00, c01, c10, c11], total, law, eps)
}

fn pack(bits: &[usize]) -> u64 {
    bits.iter().enumerate().fold(0, |w, (i, &b)| w | ((b as u64 & 1) << i))
}

fn encode_bits(layout: &SegmentLayout, u: impl Fn(usize) -> usize, a: &[usize]) -> Vec<usize> {
    (0..layout.n())
        .map(|i| layout.compensation(i).map_or(0, |j| u(i) ^ a[j]))
        .collect()
}

impl BlockCode for BsagpCode {
    fn n(&self) -> usize {
        self.layout.n()
    }

    fn nx(&self) -> usize {
        2
    }

    fn messages(&self) -> usize {
        self.words.len()
    }

    fn encode(&self, m: usize, obs: &Observation) -> Encoded {
        let w = self.words[m];
        let x = encode_bits(&self.layout, |i| (w >> i & 1) as usize, &obs.a);
        Encoded::deterministic(&x, 2, false)
    }

    fn decode(&self, y: &[usize], _: &Observation, d: i64, probe: usize) -> Verdict {
        let Some(aligned) = self.layout.segment_of_delay(d) else {
            return Verdict::from_passing(&[], probe);
        };
        let yw = pack(y);
        let passing: Vec<usize> = (0..self.words.len()).filter(|&m| self.passes(self.words[m], yw, aligned)).collect();
        Verdict::from_passing(&passing, probe)
    }
}

/// Probability that an independent uniform word passes the misaligned-segment
/// test against the received bits on `positions`.
fn uniform_pair_typical_prob(y: &[usize], positions: &[usize], law: &[f64; 4], eps: f64, lf: &LnFactorial) -> f64 {
    let total = positions.len();
    if total == 0 {
        return 1.0;
    }
    let ones = positions.iter().filter(|&&i| y[i] == 1).count();
    let mut prob = 1.0;
    for (yv, count) in [(0, total - ones), (1, ones)] {
        let ranges: Option<Vec<(usize, usize)>> = (0..2)
            .map(|u| typical_range(total as f64 * law[2 * u + yv], total, eps, count))
            .collect();
        let Some(ranges) = ranges else { return 0.0 };
        prob *= restricted_multinomial(count, &[0.5, 0.5], &ranges, lf);
    }
    prob
}

fn ensemble_trial(cfg: &BsagpConfig, channel: &StateChannel, layout: &SegmentLayout, m: f64, d: i64, ts: u64) -> Result<Outcome> {
    let setting = Setting::Agp(cfg.delays);
    let env = draw_environment(channel, &setting, cfg.n, d, None, ts)?;
    let mut r = rng::substream(ts, &[ENSEMBLE_STREAM]);
    let u: Vec<usize> = (0..cfg.n).map(|_| r.random_range(0..2)).collect();
    let x = encode_bits(layout, |i| u[i], &env.obs.a);
    let y = channel.transmit(&x, &env.channel_states, rng::derive(ts, &[ENSEMBLE_STREAM, 1]))?;
    let aligned = layout.segment_of_delay(d).expect("delay checked by environment");
    let law = cfg.product_law();
    let lf = LnFactorial::new(layout.segment_len());
    let mut true_passes = true;
    let mut q = 1.0;
    let exact_everywhere = law[1] == 0.0;
    for k in 0..layout.segments() {
        let pos = layout.valid_positions(k);
        if k == aligned || exact_everywhere {
            true_passes &= pos.iter().all(|&i| u[i] == y[i]);
            q *= 0.5f64.powi(pos.len() as i32);
        } else {
            let counts = pos.iter().fold([0usize; 4], |mut c, &i| {
                c[2 * u[i] + y[i]] += 1;
                c
            });
            true_passes &= pos.is_empty() || counts_typical(&counts, pos.len(), &law, cfg.epsilon);
            q *= uniform_pair_typical_prob(&y, &pos, &law, cfg.epsilon, &lf);
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

/// Monte Carlo error rate of the BS-AGP scheme.
pub fn bsagp_simulate(cfg: &BsagpConfig, mc: &McConfig) -> Result<TrialReport> {
    let (channel, layout, m) = cfg.validate()?;
    if mc.jitter.is_some() {
        return Err(invalid("delay jitter is only modelled in the ACSITR setting"));
    }
    let mode = cfg.mode.resolve(m, mc.trials, cfg.n <= 64)?;
    let per_delay = match mode {
        CodeMode::Explicit => simulate_code(&channel, &Setting::Agp(cfg.delays), mc, |seed| BsagpCode::random(cfg, seed))?,
        _ => drive(mc, &cfg.delays, |_| Ok(()), |_, d, ts| ensemble_trial(cfg, &channel, &layout, m, d, ts))?,
    };
    let mut report = TrialReport::new("bsagp", cfg.n, cfg.rate, &format!("bsagp:p={}", cfg.p), mc.seed)
        .param("p", cfg.p)
        .param("delays", cfg.delays)
        .param("epsilon", cfg.epsilon)
        .param("mode", mode)
        .param("refresh", mc.refresh);
    if let Some(d) = mc.delay {
        report = report.param("fixed_delay", d);
    }
    report.per_delay = per_delay;
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sim::exact_error_oracle;

    #[test]
    fn aligned_segment_cancels_the_state() {
        let cfg = BsagpConfig::new(0.5, 8, 0.25);
        let code = BsagpCode::with_codewords(&cfg, vec![0b1011_0110]).unwrap();
        let ch = StateChannel::xor(0.5).unwrap();
        let setting = Setting::Agp(cfg.delays);
        for seed in 0..20 {
            let env = draw_environment(&ch, &setting, 8, 1, None, seed).unwrap();
            let x: Vec<usize> = code.encode(0, &env.obs).laws.chunks(2).map(|r| usize::from(r[1] == 1.0)).collect();
            let y = ch.transmit(&x, &env.channel_states, seed).unwrap();
            // second segment compensates d = 1, the last symbol is dropped
            assert_eq!(&y[4..7], &[1, 1, 0]);
        }
    }

    #[test]
    fn single_codeword_error_is_the_typicality_miss() {
        // with one word there are no competitors; only the misaligned test can fail
        let cfg = BsagpConfig::new(0.5, 8, 0.0);
        let code = BsagpCode::with_codewords(&cfg, vec![0]).unwrap();
        let ex = exact_error_oracle(&StateChannel::xor(0.5).unwrap(), &Setting::Agp(cfg.delays), &code).unwrap();
        assert!(ex.average > 0.0 && ex.average < 1.0);
    }

    #[test]
    fn uniform_pair_probability_matches_enumeration() {
        let law = BsagpConfig::new(0.3, 8, 0.2).product_law();
        let y = [0, 1, 1, 0, 0, 0, 1];
        let pos: Vec<usize> = (0..7).collect();
        let lf = LnFactorial::new(7);
        let exact = (0u64..128).filter(|&u| pair_typical(u, pack(&y), 0x7f, &law, 0.2)).count() as f64 / 128.0;
        assert!((uniform_pair_typical_prob(&y, &pos, &law, 0.2, &lf) - exact).abs() < 1e-12);
    }

    #[test]
    fn explicit_and_ensemble_modes_agree() {
        let mut cfg = BsagpConfig::new(0.5, 16, 0.25);
        let mc = McConfig::new(4000, 11);
        cfg.mode = CodeMode::Explicit;
        let ex = bsagp_simulate(&cfg, &mc).unwrap();
        cfg.mode = CodeMode::Ensemble;
        let en = bsagp_simulate(&cfg, &mc).unwrap();
        let gap = (ex.error_rate() - en.error_rate()).abs();
        assert!(gap < 2.0 * (ex.ci_halfwidth() + en.ci_halfwidth()), "{} vs {}", ex.error_rate(), en.error_rate());
    }

    #[test]
    fn invalid_configurations() {
        assert!(bsagp_simulate(&BsagpConfig::new(0.5, 9, 0.2), &McConfig::new(10, 0)).is_err());
        assert!(bsagp_simulate(&BsagpConfig::new(0.5, 8, 1.0), &McConfig::new(10, 0)).is_err());
        let mut cfg = BsagpConfig::new(0.5, 128, 0.4);
        cfg.mode = CodeMode::Explicit;
        assert!(matches!(bsagp_simulate(&cfg, &McConfig::new(10, 0)), Err(crate::Error::Guard(_))));
    }
}
