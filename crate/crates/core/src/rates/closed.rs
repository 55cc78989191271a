use crate::error::{guard, invalid, Result};
use crate::prob::h2;

/// Rate of the segment-compensation scheme on the binary XOR channel with
/// `Bernoulli(p)` state and two possible delays: `1 - h2(2p(1-p)) / 2`.
pub fn bsagp_closed_form(p: f64) -> Result<f64> {
    if !(0.0..=1.0).contains(&p) {
        return Err(invalid(format!("crossover probability {p} outside [0,1]")));
    }
    Ok(1.0 - 0.5 * h2(2.0 * p * (1.0 - p)))
}

pub const XOR_PROCESS_MAX_N: usize = 24;

#[derive(Clone, Debug, PartialEq)]
pub struct XorEntropyRate {
    /// `H(K_m | K^{m-1})` for `m = 1..=n_max`
    pub conditional: Vec<f64>,
    pub estimate: f64,
    /// `1 - estimate / 2`
    pub c_est: f64,
}

/// Block entropies of `K_i = S_i xor S_{i-1}` with i.i.d. `Bernoulli(p)` states,
/// by exhaustive enumeration of all `2^n_max` output words.
pub fn xor_process_entropy_rate(p: f64, n_max: usize) -> Result<XorEntropyRate> {
    if !(0.0..=1.0).contains(&p) {
        return Err(invalid(format!("state probability {p} outside [0,1]")));
    }
    if n_max < 2 {
        return Err(invalid("n_max must be at least 2"));
    }
    if n_max > XOR_PROCESS_MAX_N {
        return Err(guard(format!("n_max {n_max} exceeds enumeration budget {XOR_PROCESS_MAX_N}")));
    }
    let ps = [1.0 - p, p];
    let mut block = vec![0.0; n_max + 1];
    // forward[b] = P(k^m, S_m = b)
    fn walk(forward: [f64; 2], depth: usize, n_max: usize, ps: &[f64; 2], block: &mut [f64]) {
        let total = forward[0] + forward[1];
        if total <= 0.0 {
            return;
        }
        block[depth] -= total * total.log2();
        if depth == n_max {
            return;
        }
        for k in 0..2 {
            let next = [forward[k] * ps[0], forward[1 ^ k] * ps[1]];
            walk(next, depth + 1, n_max, ps, block);
        }
    }
    walk(ps, 0, n_max, &ps, &mut block);
    let conditional: Vec<f64> = (1..=n_max).map(|m| block[m] - block[m - 1]).collect();
    let estimate = *conditional.last().expect("n_max >= 2");
    Ok(XorEntropyRate {
        conditional,
        estimate,
        c_est: 1.0 - 0.5 * estimate,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn closed_form_values() {
        assert_eq!(bsagp_closed_form(0.5).unwrap(), 0.5);
        assert_eq!(bsagp_closed_form(0.0).unwrap(), 1.0);
        assert_eq!(bsagp_closed_form(1.0).unwrap(), 1.0);
        assert!((bsagp_closed_form(0.1).unwrap() - 0.6600).abs() < 1e-3);
        assert!((bsagp_closed_form(0.25).unwrap() - 0.5228).abs() < 1e-3);
        assert!(bsagp_closed_form(1.5).is_err());
    }

    #[test]
    fn uniform_states_give_an_iid_process() {
        let r = xor_process_entropy_rate(0.5, 12).unwrap();
        assert!(r.conditional.iter().all(|&h| h == 1.0));
        assert_eq!(r.c_est, 0.5);
    }

    #[test]
    fn constant_states_give_zero_entropy() {
        let r = xor_process_entropy_rate(0.0, 10).unwrap();
        assert!(r.conditional.iter().all(|&h| h == 0.0));
        assert_eq!(r.c_est, 1.0);
    }

    #[test]
    fn first_symbol_is_bernoulli_2pq() {
        let r = xor_process_entropy_rate(0.25, 4).unwrap();
        assert!((r.conditional[0] - h2(0.375)).abs() < 1e-12);
    }

    #[test]
    fn conditional_entropies_decrease() {
        for p in [0.05, 0.25, 0.4] {
            let r = xor_process_entropy_rate(p, 14).unwrap();
            for w in r.conditional.windows(2) {
                assert!(w[1] <= w[0] + 1e-12);
            }
        }
    }

    #[test]
    fn strict_gap_over_closed_form() {
        let r = xor_process_entropy_rate(0.25, 16).unwrap();
        assert!(r.c_est > bsagp_closed_form(0.25).unwrap() + 1e-3);
    }

    #[test]
    fn budget_guard() {
        assert!(xor_process_entropy_rate(0.3, 25).is_err());
        assert!(xor_process_entropy_rate(0.3, 1).is_err());
    }
}
