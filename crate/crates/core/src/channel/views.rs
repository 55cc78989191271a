use crate::channel::state_channel::{shifted_states, DelaySet};
use crate::error::{invalid, Result};
use crate::prob::Pmf;
use crate::rng;

/// The encoder's observation of a state sequence shifted by `d`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DelayedView {
    pub a: Vec<usize>,
    pub d: i64,
    /// Filler symbols, in the order they appear in `a`.
    pub z_fill: Vec<usize>,
}

/// `a_j = s_{j-d}` where defined, i.i.d. filler from `prior` elsewhere.
pub fn delayed_view(s: &[usize], d: i64, prior: &Pmf, seed: u64) -> Result<DelayedView> {
    if d.unsigned_abs() as usize >= s.len() {
        return Err(invalid(format!("delay {d} not smaller than block length {}", s.len())));
    }
    let mut r = rng::stream(seed);
    let z_fill: Vec<usize> = (0..d.unsigned_abs())
        .map(|_| rng::categorical(&mut r, prior.probs()))
        .collect();
    let a = shifted_states(s, d, &z_fill)?;
    Ok(DelayedView { a, d, z_fill })
}

/// Windows `v_i = (s_{i-d_max}, .., s_{i+d_min})` over a block.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct VSequence {
    pub v: Vec<Vec<usize>>,
    /// Filler for `s_{1-d_max} .. s_0`.
    pub left_fill: Vec<usize>,
    /// Filler for `s_{n+1} .. s_{n+d_min}`.
    pub right_fill: Vec<usize>,
}

impl VSequence {
    pub fn len(&self) -> usize {
        self.v.len()
    }

    pub fn is_empty(&self) -> bool {
        self.v.is_empty()
    }

    /// Mixed-radix index of window `i`, first entry most significant.
    pub fn index(&self, i: usize, ns: usize) -> usize {
        window_index(&self.v[i], ns)
    }

    pub fn indices(&self, ns: usize) -> Vec<usize> {
        self.v.iter().map(|w| window_index(w, ns)).collect()
    }
}

pub fn window_index(window: &[usize], ns: usize) -> usize {
    window.iter().fold(0, |acc, &s| acc * ns + s)
}

/// Inverse of [`window_index`] for windows of length `len`.
pub fn window_symbols(mut index: usize, ns: usize, len: usize) -> Vec<usize> {
    let mut out = vec![0; len];
    for slot in out.iter_mut().rev() {
        *slot = index % ns;
        index /= ns;
    }
    out
}

/// Builds the window sequence from an extended state sequence
/// `(left_fill, s, right_fill)`.
pub fn v_sequence_with_fill(
    s: &[usize],
    delays: &DelaySet,
    left_fill: Vec<usize>,
    right_fill: Vec<usize>,
) -> Result<VSequence> {
    if left_fill.len() != delays.d_max() || right_fill.len() != delays.d_min() {
        return Err(invalid("window filler lengths must be d_max and d_min"));
    }
    let ext: Vec<usize> = left_fill.iter().chain(s).chain(&right_fill).copied().collect();
    let width = delays.size();
    let v = (0..s.len()).map(|i| ext[i..i + width].to_vec()).collect();
    Ok(VSequence {
        v,
        left_fill,
        right_fill,
    })
}

pub fn build_v_sequence(s: &[usize], delays: &DelaySet, prior: &Pmf, seed: u64) -> Result<VSequence> {
    if s.is_empty() {
        return Err(invalid("empty state sequence"));
    }
    let mut r = rng::stream(seed);
    let mut draw = |k: usize| -> Vec<usize> { (0..k).map(|_| rng::categorical(&mut r, prior.probs())).collect() };
    let left = draw(delays.d_max());
    let right = draw(delays.d_min());
    v_sequence_with_fill(s, delays, left, right)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn zero_delay_view_is_identity() {
        let s = vec![0, 1, 1, 0, 1];
        let view = delayed_view(&s, 0, &Pmf::uniform(2), 1).unwrap();
        assert_eq!(view.a, s);
        assert!(view.z_fill.is_empty());
    }

    #[test]
    fn positive_and_negative_shifts() {
        let s = vec![3, 1, 4, 1, 5];
        let prior = Pmf::uniform(6);
        let up = delayed_view(&s, 1, &prior, 2).unwrap();
        assert_eq!(up.a[1..], s[..4]);
        assert_eq!(up.a[0], up.z_fill[0]);
        let down = delayed_view(&s, -1, &prior, 2).unwrap();
        assert_eq!(down.a[..4], s[1..]);
        assert_eq!(down.a[4], down.z_fill[0]);
        assert!(delayed_view(&s, 5, &prior, 2).is_err());
        assert!(delayed_view(&s, -5, &prior, 2).is_err());
    }

    #[test]
    fn delayed_view_marginal_is_prior() {
        let prior = Pmf::bernoulli(0.3).unwrap();
        let n = 100_000;
        let mut r = rng::stream(4);
        let s: Vec<usize> = (0..n).map(|_| rng::categorical(&mut r, prior.probs())).collect();
        for d in [-3, 0, 2] {
            let view = delayed_view(&s, d, &prior, 11).unwrap();
            let freq = view.a.iter().sum::<usize>() as f64 / n as f64;
            assert!((freq - 0.3).abs() < 0.01);
        }
    }

    #[test]
    fn singleton_window() {
        let s = vec![1, 0, 1];
        let v = build_v_sequence(&s, &DelaySet::synchronous(), &Pmf::uniform(2), 0).unwrap();
        assert_eq!(v.v, vec![vec![1], vec![0], vec![1]]);
    }

    #[test]
    fn two_delay_window() {
        let s = vec![0, 1, 1];
        let v = build_v_sequence(&s, &DelaySet::new(0, 1), &Pmf::uniform(2), 3).unwrap();
        let z = v.left_fill[0];
        assert_eq!(v.v, vec![vec![z, 0], vec![0, 1], vec![1, 1]]);
    }

    proptest! {
        #[test]
        fn windows_overlap_and_select_shifted_state(
            s in proptest::collection::vec(0usize..3, 1..40),
            d_min in 0usize..3,
            d_max in 0usize..3,
            seed in any::<u64>(),
        ) {
            let delays = DelaySet::new(d_min, d_max);
            let v = build_v_sequence(&s, &delays, &Pmf::uniform(3), seed).unwrap();
            let w = delays.size();
            for i in 1..s.len() {
                prop_assert_eq!(&v.v[i - 1][1..], &v.v[i][..w - 1]);
            }
            for d in delays.iter() {
                for i in 0..s.len() as i64 {
                    let src = i - d;
                    if (0..s.len() as i64).contains(&src) {
                        prop_assert_eq!(v.v[i as usize][delays.window_position(d)], s[src as usize]);
                    }
                }
            }
            for (i, win) in v.v.iter().enumerate() {
                prop_assert_eq!(window_symbols(v.index(i, 3), 3, w), win.clone());
            }
        }
    }
}
