//! Strong typicality.
//!
//! A sequence `x^n` is ε-strongly typical for `P` when, for every symbol `a`,
//! `|N(a|x^n)/n - P(a)| <= ε`, and additionally `N(a|x^n) = 0` for every `a`
//! with `P(a) = 0`. The tolerance is additive and per symbol; it is not
//! divided by the alphabet size. Joint typicality applies the same test to the
//! sequence of symbol tuples.

use super::pmf::{JointPmf, Pmf};
use crate::error::{dim, invalid, Result};

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TypicalityParams {
    epsilon: f64,
}

impl TypicalityParams {
    pub fn new(epsilon: f64) -> Result<Self> {
        if !(epsilon > 0.0) || !epsilon.is_finite() {
            return Err(invalid(format!("typicality epsilon must be positive, got {epsilon}")));
        }
        Ok(Self { epsilon })
    }

    pub fn epsilon(&self) -> f64 {
        self.epsilon
    }
}

impl Default for TypicalityParams {
    fn default() -> Self {
        Self { epsilon: 0.1 }
    }
}

/// Typicality test on a histogram of `n` symbols.
pub fn counts_typical(counts: &[usize], n: usize, probs: &[f64], epsilon: f64) -> bool {
    debug_assert_eq!(counts.len(), probs.len());
    if n == 0 {
        return false;
    }
    let n = n as f64;
    counts.iter().zip(probs).all(|(&c, &p)| {
        if p == 0.0 {
            c == 0
        } else {
            (c as f64 / n - p).abs() <= epsilon
        }
    })
}

pub fn is_strongly_typical(seq: &[usize], p: &Pmf, tp: &TypicalityParams) -> Result<bool> {
    if seq.is_empty() {
        return Err(invalid("typicality of an empty sequence"));
    }
    let mut counts = vec![0usize; p.alphabet_size()];
    for &a in seq {
        if a >= counts.len() {
            return Err(invalid(format!("symbol {a} outside alphabet of size {}", counts.len())));
        }
        counts[a] += 1;
    }
    Ok(counts_typical(&counts, seq.len(), p.probs(), tp.epsilon))
}

/// Joint typicality of `seqs` (one sequence per axis of `j`, equal lengths).
pub fn jointly_typical(seqs: &[&[usize]], j: &JointPmf, tp: &TypicalityParams) -> Result<bool> {
    let sizes = j.sizes();
    if seqs.len() != sizes.len() {
        return Err(dim(format!("{} sequences for a {}-axis pmf", seqs.len(), sizes.len())));
    }
    let n = seqs[0].len();
    if seqs.iter().any(|s| s.len() != n) {
        return Err(dim("jointly typical sequences differ in length"));
    }
    if n == 0 {
        return Err(invalid("typicality of an empty sequence"));
    }
    let mut counts = vec![0usize; j.probs().len()];
    for i in 0..n {
        let mut flat = 0;
        for (s, &size) in seqs.iter().zip(&sizes) {
            if s[i] >= size {
                return Err(invalid(format!("symbol {} outside alphabet of size {size}", s[i])));
            }
            flat = flat * size + s[i];
        }
        counts[flat] += 1;
    }
    Ok(counts_typical(&counts, n, j.probs(), tp.epsilon))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng;
    use proptest::prelude::*;
    use rand::Rng;

    fn tp(e: f64) -> TypicalityParams {
        TypicalityParams::new(e).unwrap()
    }

    #[test]
    fn exact_type_is_typical() {
        let p = Pmf::new(vec![0.25, 0.75]).unwrap();
        assert!(is_strongly_typical(&[0, 1, 1, 1], &p, &tp(1e-9)).unwrap());
    }

    #[test]
    fn zero_probability_symbol_breaks_typicality() {
        let p = Pmf::new(vec![0.0, 0.5, 0.5]).unwrap();
        let mut seq = vec![1; 50];
        seq.extend(vec![2; 49]);
        seq.push(0);
        assert!(!is_strongly_typical(&seq, &p, &tp(0.5)).unwrap());
    }

    #[test]
    fn rejects_empty_and_bad_params() {
        assert!(is_strongly_typical(&[], &Pmf::uniform(2), &tp(0.1)).is_err());
        assert!(TypicalityParams::new(0.0).is_err());
        assert!(TypicalityParams::new(-1.0).is_err());
    }

    #[test]
    fn iid_uniform_bits_are_typical_with_high_frequency() {
        let p = Pmf::uniform(2);
        let mut r = rng::stream(11);
        let hits = (0..2000)
            .filter(|_| {
                let seq: Vec<usize> = (0..100).map(|_| r.random_range(0..2)).collect();
                is_strongly_typical(&seq, &p, &tp(0.2)).unwrap()
            })
            .count();
        assert!(hits as f64 / 2000.0 > 0.99);
    }

    #[test]
    fn identity_pairs_against_identity_coupling() {
        let j = JointPmf::new(vec![("X", 2), ("Y", 2)], vec![0.5, 0.0, 0.0, 0.5]).unwrap();
        let x = [0, 1, 1, 0, 1, 0, 0, 1, 0, 1];
        assert!(jointly_typical(&[&x, &x], &j, &tp(0.1)).unwrap());
        let skew = [0, 0, 0, 0, 0, 0, 0, 0, 0, 1];
        assert!(!jointly_typical(&[&skew, &skew], &j, &tp(0.1)).unwrap());
    }

    #[test]
    fn independent_draws_fail_correlated_joint() {
        let j = JointPmf::new(vec![("X", 2), ("Y", 2)], vec![0.5, 0.0, 0.0, 0.5]).unwrap();
        let mut r = rng::stream(12);
        let fails = (0..2000)
            .filter(|_| {
                let x: Vec<usize> = (0..10).map(|_| r.random_range(0..2)).collect();
                let y: Vec<usize> = (0..10).map(|_| r.random_range(0..2)).collect();
                !jointly_typical(&[&x, &y], &j, &tp(0.1)).unwrap()
            })
            .count();
        assert!(fails as f64 / 2000.0 > 0.99);
    }

    #[test]
    fn single_axis_joint_matches_marginal_test() {
        let p = Pmf::new(vec![0.2, 0.3, 0.5]).unwrap();
        let j = JointPmf::new(vec![("X", 3)], p.probs().to_vec()).unwrap();
        let mut r = rng::stream(13);
        for _ in 0..200 {
            let seq: Vec<usize> = (0..20).map(|_| r.random_range(0..3)).collect();
            assert_eq!(
                jointly_typical(&[&seq], &j, &tp(0.1)).unwrap(),
                is_strongly_typical(&seq, &p, &tp(0.1)).unwrap()
            );
        }
    }

    #[test]
    fn length_mismatch_is_an_error() {
        let j = JointPmf::new(vec![("X", 2), ("Y", 2)], vec![0.25; 4]).unwrap();
        assert!(jointly_typical(&[&[0, 1], &[0]], &j, &tp(0.1)).is_err());
    }

    proptest! {
        #[test]
        fn typicality_ignores_order(mut seq in prop::collection::vec(0usize..3, 1..40), seed in any::<u64>()) {
            let p = Pmf::new(vec![0.2, 0.3, 0.5]).unwrap();
            let before = is_strongly_typical(&seq, &p, &tp(0.15)).unwrap();
            let mut r = rng::stream(seed);
            for i in (1..seq.len()).rev() {
                let k = r.random_range(0..=i);
                seq.swap(i, k);
            }
            prop_assert_eq!(before, is_strongly_typical(&seq, &p, &tp(0.15)).unwrap());
        }
    }
}
