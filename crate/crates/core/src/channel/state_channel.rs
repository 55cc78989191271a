use std::fmt;
use std::str::FromStr;

use crate::error::{dim, invalid, Error, Result};
use crate::prob::{normalized, Pmf};
use crate::rng;

const FILL_STREAM: u64 = 0x46;
const NOISE_STREAM: u64 = 0x4e;

/// State-dependent discrete memoryless channel `W(y|x,s)` with i.i.d. states.
#[derive(Clone, Debug, PartialEq)]
pub struct StateChannel {
    nx: usize,
    ns: usize,
    ny: usize,
    /// rows ordered x-major then s; row `(x, s)` starts at `(x * ns + s) * ny`
    w: Vec<f64>,
    prior: Pmf,
}

impl StateChannel {
    pub fn new(nx: usize, ns: usize, ny: usize, w: Vec<f64>, prior: Pmf) -> Result<Self> {
        if nx == 0 || ns == 0 || ny == 0 {
            return Err(invalid("channel alphabets must be non-empty"));
        }
        if w.len() != nx * ns * ny {
            return Err(dim(format!(
                "transition table has {} entries, expected {}",
                w.len(),
                nx * ns * ny
            )));
        }
        if prior.alphabet_size() != ns {
            return Err(dim(format!(
                "state prior over {} symbols, channel has {ns} states",
                prior.alphabet_size()
            )));
        }
        let mut rows = Vec::with_capacity(w.len());
        for (r, chunk) in w.chunks(ny).enumerate() {
            let row = normalized(chunk.to_vec(), &format!("row (x={}, s={})", r / ns, r % ns))?;
            rows.extend(row);
        }
        Ok(Self {
            nx,
            ns,
            ny,
            w: rows,
            prior,
        })
    }

    pub fn from_fn(
        nx: usize,
        ns: usize,
        ny: usize,
        prior: Pmf,
        f: impl Fn(usize, usize, usize) -> f64,
    ) -> Result<Self> {
        let mut w = Vec::with_capacity(nx * ns * ny);
        for x in 0..nx {
            for s in 0..ns {
                for y in 0..ny {
                    w.push(f(x, s, y));
                }
            }
        }
        Self::new(nx, ns, ny, w, prior)
    }

    /// Binary channel `Y = X xor S` with `S ~ Bernoulli(p)`.
    pub fn xor(p: f64) -> Result<Self> {
        Self::from_fn(2, 2, 2, Pmf::bernoulli(p)?, |x, s, y| f64::from(u8::from(y == x ^ s)))
    }

    /// `Y = X xor S xor N` with `S ~ Bernoulli(p)` and independent `N ~ Bernoulli(q)`.
    pub fn noisy_xor(p: f64, q: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&q) {
            return Err(invalid(format!("noise probability {q} outside [0,1]")));
        }
        Self::from_fn(2, 2, 2, Pmf::bernoulli(p)?, |x, s, y| {
            if y == x ^ s {
                1.0 - q
            } else {
                q
            }
        })
    }

    /// Channel whose law does not depend on the state: `rows[x][y]`.
    pub fn state_blind(ny: usize, rows: &[Vec<f64>], prior: Pmf) -> Result<Self> {
        let nx = rows.len();
        if rows.iter().any(|r| r.len() != ny) {
            return Err(dim("state-blind rows of unequal length"));
        }
        let ns = prior.alphabet_size();
        Self::from_fn(nx, ns, ny, prior, |x, _, y| rows[x][y])
    }

    pub fn nx(&self) -> usize {
        self.nx
    }

    pub fn ns(&self) -> usize {
        self.ns
    }

    pub fn ny(&self) -> usize {
        self.ny
    }

    pub fn prior(&self) -> &Pmf {
        &self.prior
    }

    pub fn prob(&self, x: usize, s: usize, y: usize) -> f64 {
        self.w[(x * self.ns + s) * self.ny + y]
    }

    pub fn row(&self, x: usize, s: usize) -> &[f64] {
        let start = (x * self.ns + s) * self.ny;
        &self.w[start..start + self.ny]
    }

    /// Raw table, rows x-major then s.
    pub fn table(&self) -> &[f64] {
        &self.w
    }

    /// State-averaged DMC `sum_s P_S(s) W(y|x,s)` as `nx` rows of `ny`.
    pub fn averaged(&self) -> Vec<f64> {
        let mut out = vec![0.0; self.nx * self.ny];
        for x in 0..self.nx {
            for s in 0..self.ns {
                let ps = self.prior.get(s);
                for y in 0..self.ny {
                    out[x * self.ny + y] += ps * self.prob(x, s, y);
                }
            }
        }
        out
    }

    /// Channel of a single state, `nx` rows of `ny`.
    pub fn state_slice(&self, s: usize) -> Vec<f64> {
        (0..self.nx).flat_map(|x| self.row(x, s).to_vec()).collect()
    }

    /// True when `W(.|x,s)` does not depend on `s` (total variation below 1e-12).
    pub fn ignores_state(&self) -> bool {
        (0..self.nx).all(|x| {
            (1..self.ns).all(|s| {
                let tv: f64 = self
                    .row(x, 0)
                    .iter()
                    .zip(self.row(x, s))
                    .map(|(a, b)| (a - b).abs())
                    .sum();
                tv < 1e-12
            })
        })
    }

    pub fn same_alphabets(&self, other: &StateChannel) -> bool {
        self.nx == other.nx && self.ns == other.ns && self.ny == other.ny
    }

    /// `n` i.i.d. draws from the state prior.
    pub fn sample_states(&self, n: usize, seed: u64) -> Vec<usize> {
        let mut r = rng::stream(seed);
        (0..n)
            .map(|_| rng::categorical(&mut r, self.prior.probs()))
            .collect()
    }

    /// Memoryless transmission of `x` through state sequence `s`.
    pub fn transmit(&self, x: &[usize], s: &[usize], seed: u64) -> Result<Vec<usize>> {
        if x.len() != s.len() {
            return Err(dim(format!("input length {} vs state length {}", x.len(), s.len())));
        }
        self.check_symbols(x, s)?;
        let mut r = rng::substream(seed, &[NOISE_STREAM]);
        Ok(x.iter()
            .zip(s)
            .map(|(&xi, &si)| rng::categorical(&mut r, self.row(xi, si)))
            .collect())
    }

    /// Transmission where position `i` experiences state `s_{i-d}`. Positions
    /// whose shifted index leaves the block see fresh i.i.d. prior draws.
    pub fn transmit_with_delay(&self, x: &[usize], s: &[usize], d: i64, seed: u64) -> Result<Vec<usize>> {
        if x.len() != s.len() {
            return Err(dim(format!("input length {} vs state length {}", x.len(), s.len())));
        }
        let fill_len = (d.unsigned_abs() as usize).min(s.len());
        let fill = self.sample_states(fill_len, rng::derive(seed, &[FILL_STREAM]));
        let effective = shifted_states(s, d, &fill)?;
        self.transmit(x, &effective, seed)
    }

    fn check_symbols(&self, x: &[usize], s: &[usize]) -> Result<()> {
        if let Some(&bad) = x.iter().find(|&&v| v >= self.nx) {
            return Err(invalid(format!("input symbol {bad} outside alphabet")));
        }
        if let Some(&bad) = s.iter().find(|&&v| v >= self.ns) {
            return Err(invalid(format!("state symbol {bad} outside alphabet")));
        }
        Ok(())
    }
}

/// The sequence `t_i = s_{i-d}` (1-based), with the `|d|` positions whose
/// source index falls outside the block taken from `fill` in order.
pub fn shifted_states(s: &[usize], d: i64, fill: &[usize]) -> Result<Vec<usize>> {
    let n = s.len() as i64;
    let need = d.unsigned_abs().min(n as u64) as usize;
    if fill.len() != need {
        return Err(dim(format!("shift by {d} needs {need} filler symbols, got {}", fill.len())));
    }
    let mut next_fill = fill.iter();
    Ok((0..n)
        .map(|i| {
            let src = i - d;
            if (0..n).contains(&src) {
                s[src as usize]
            } else {
                *next_fill.next().expect("filler length checked")
            }
        })
        .collect())
}

/// The contiguous delay set `{-d_min, .., d_max}`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct DelaySet {
    d_min: usize,
    d_max: usize,
}

impl DelaySet {
    pub fn new(d_min: usize, d_max: usize) -> Self {
        Self { d_min, d_max }
    }

    /// `{0}`, the synchronous case.
    pub fn synchronous() -> Self {
        Self::new(0, 0)
    }

    pub fn d_min(&self) -> usize {
        self.d_min
    }

    pub fn d_max(&self) -> usize {
        self.d_max
    }

    pub fn size(&self) -> usize {
        self.d_min + self.d_max + 1
    }

    pub fn contains(&self, d: i64) -> bool {
        d >= -(self.d_min as i64) && d <= self.d_max as i64
    }

    pub fn iter(&self) -> impl Iterator<Item = i64> {
        -(self.d_min as i64)..=self.d_max as i64
    }

    /// 0-based position of the entry `s_{i-d}` inside the window
    /// `v_i = (s_{i-d_max}, .., s_{i+d_min})`.
    pub fn window_position(&self, d: i64) -> usize {
        debug_assert!(self.contains(d));
        (self.d_max as i64 - d) as usize
    }

    /// Rank of `d` in ascending order, `0..size()`.
    pub fn rank(&self, d: i64) -> usize {
        (d + self.d_min as i64) as usize
    }

    pub fn is_subset_of(&self, other: &DelaySet) -> bool {
        self.d_min <= other.d_min && self.d_max <= other.d_max
    }
}

impl fmt::Display for DelaySet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}..{}", -(self.d_min as i64), self.d_max)
    }
}

impl FromStr for DelaySet {
    type Err = Error;

    /// Parses `lo..hi` with `lo <= 0 <= hi`, e.g. `0..1` or `-1..1`.
    fn from_str(text: &str) -> Result<Self> {
        let (lo, hi) = text
            .split_once("..")
            .ok_or_else(|| invalid(format!("delay set {text:?} is not of the form lo..hi")))?;
        let lo: i64 = lo.trim().parse().map_err(|_| invalid(format!("bad delay bound {lo:?}")))?;
        let hi: i64 = hi.trim().parse().map_err(|_| invalid(format!("bad delay bound {hi:?}")))?;
        if lo > 0 || hi < 0 {
            return Err(invalid(format!("delay set {text} must contain 0")));
        }
        Ok(Self::new((-lo) as usize, hi as usize))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rows_are_normalized_or_rejected() {
        let bad = StateChannel::new(1, 1, 2, vec![0.5, 0.6], Pmf::uniform(1));
        assert!(bad.is_err());
        let ok = StateChannel::new(1, 1, 2, vec![0.5, 0.5 + 1e-10], Pmf::uniform(1)).unwrap();
        assert!((ok.row(0, 0).iter().sum::<f64>() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn point_mass_prior_gives_constant_states() {
        let ch = StateChannel::xor(1.0).unwrap();
        assert!(ch.sample_states(100, 1).iter().all(|&s| s == 1));
    }

    #[test]
    fn bernoulli_half_states_have_balanced_mean() {
        let ch = StateChannel::xor(0.5).unwrap();
        let s = ch.sample_states(100_000, 2);
        let mean = s.iter().sum::<usize>() as f64 / s.len() as f64;
        assert!((0.49..=0.51).contains(&mean));
    }

    #[test]
    fn sampling_is_deterministic_in_the_seed() {
        let ch = StateChannel::xor(0.3).unwrap();
        assert_eq!(ch.sample_states(500, 9), ch.sample_states(500, 9));
        assert_ne!(ch.sample_states(500, 9), ch.sample_states(500, 10));
    }

    #[test]
    fn xor_transmission() {
        let ch = StateChannel::xor(0.5).unwrap();
        assert_eq!(ch.transmit(&[0, 1], &[1, 1], 0).unwrap(), vec![1, 0]);
        assert!(ch.transmit(&[0, 1], &[1], 0).is_err());
    }

    #[test]
    fn noiseless_identity_channel() {
        let ch = StateChannel::state_blind(3, &[vec![1.0, 0.0, 0.0], vec![0.0, 1.0, 0.0], vec![0.0, 0.0, 1.0]], Pmf::uniform(2)).unwrap();
        let x = vec![2, 0, 1, 1, 0, 2];
        assert_eq!(ch.transmit(&x, &[0, 1, 0, 1, 1, 0], 4).unwrap(), x);
    }

    #[test]
    fn bsc_flip_rate_matches() {
        let ch = StateChannel::noisy_xor(0.0, 0.2).unwrap();
        let n = 100_000;
        let y = ch.transmit(&vec![0; n], &vec![0; n], 5).unwrap();
        let rate = y.iter().sum::<usize>() as f64 / n as f64;
        assert!((rate - 0.2).abs() < 0.01);
    }

    #[test]
    fn delayed_xor_uses_shifted_state() {
        let ch = StateChannel::xor(0.5).unwrap();
        let s = ch.sample_states(64, 3);
        let x: Vec<usize> = (0..64).map(|i| (i * 7 % 3) & 1).collect();
        let y = ch.transmit_with_delay(&x, &s, 1, 8).unwrap();
        for i in 1..64 {
            assert_eq!(y[i], x[i] ^ s[i - 1]);
        }
    }

    #[test]
    fn zero_delay_matches_plain_transmission() {
        let ch = StateChannel::noisy_xor(0.3, 0.1).unwrap();
        let s = ch.sample_states(1000, 1);
        let x = vec![1; 1000];
        assert_eq!(ch.transmit(&x, &s, 77).unwrap(), ch.transmit_with_delay(&x, &s, 0, 77).unwrap());
    }

    #[test]
    fn constant_states_make_delay_invisible_inside_the_block() {
        let ch = StateChannel::xor(1.0).unwrap();
        let s = vec![1; 32];
        let x: Vec<usize> = (0..32).map(|i| i % 2).collect();
        let y0 = ch.transmit(&x, &s, 1).unwrap();
        let y2 = ch.transmit_with_delay(&x, &s, 2, 1).unwrap();
        assert_eq!(y0[2..], y2[2..]);
    }

    #[test]
    fn delay_set_parsing_and_window() {
        let d: DelaySet = "-1..2".parse().unwrap();
        assert_eq!((d.d_min(), d.d_max(), d.size()), (1, 2, 4));
        assert_eq!(d.iter().collect::<Vec<_>>(), vec![-1, 0, 1, 2]);
        assert!(d.contains(-1) && !d.contains(3) && !d.contains(-2));
        assert_eq!(d.window_position(2), 0);
        assert_eq!(d.window_position(-1), 3);
        assert!("1..2".parse::<DelaySet>().is_err());
        assert_eq!(d.to_string(), "-1..2");
    }
}
