//! Exact competitor-acceptance probabilities for random-coding ensembles.

/// `ln k!` for `k = 0..=n`.
pub(crate) struct LnFactorial(Vec<f64>);

impl LnFactorial {
    pub(crate) fn new(n: usize) -> Self {
        let mut t = vec![0.0; n + 1];
        for k in 1..=n {
            t[k] = t[k - 1] + (k as f64).ln();
        }
        Self(t)
    }

    pub(crate) fn get(&self, k: usize) -> f64 {
        self.0[k]
    }
}

/// Probability that `Multinomial(n, probs)` counts fall inside the inclusive
/// per-category ranges `ranges[c] = (lo, hi)`.
pub(crate) fn restricted_multinomial(n: usize, probs: &[f64], ranges: &[(usize, usize)], lf: &LnFactorial) -> f64 {
    // dp[c] = sum over partial count vectors totalling c of prod p^k / k!
    let mut dp = vec![0.0; n + 1];
    dp[0] = 1.0;
    for (&p, &(lo, hi)) in probs.iter().zip(ranges) {
        let mut next = vec![0.0; n + 1];
        let hi = hi.min(n);
        for (c, &mass) in dp.iter().enumerate() {
            if mass == 0.0 {
                continue;
            }
            for k in lo..=hi {
                if c + k > n {
                    break;
                }
                let term = if p == 0.0 {
                    if k == 0 {
                        1.0
                    } else {
                        0.0
                    }
                } else {
                    (k as f64 * p.ln() - lf.get(k)).exp()
                };
                next[c + k] += mass * term;
            }
        }
        dp = next;
    }
    (dp[n] * lf.get(n).exp()).min(1.0)
}

/// `1 - (1 - q)^competitors`: some competitor among `competitors` passes.
pub(crate) fn any_competitor_passes(q: f64, competitors: f64) -> f64 {
    if competitors <= 0.0 || q <= 0.0 {
        return 0.0;
    }
    if q >= 1.0 {
        return 1.0;
    }
    -(competitors * (-q).ln_1p()).exp_m1()
}

/// Inclusive count range allowed by the additive typicality rule
/// `|count / n_total - expected / n_total| <= eps`, with the zero-count rule
/// when `expected` is zero.
pub(crate) fn typical_range(expected: f64, n_total: usize, eps: f64, available: usize) -> Option<(usize, usize)> {
    if expected <= 0.0 {
        return Some((0, 0));
    }
    let slack = eps * n_total as f64;
    let lo = (expected - slack - 1e-9).ceil().max(0.0) as usize;
    let hi_f = (expected + slack + 1e-9).floor();
    if hi_f < 0.0 {
        return None;
    }
    let hi = (hi_f as usize).min(available);
    (lo <= hi).then_some((lo, hi))
}
