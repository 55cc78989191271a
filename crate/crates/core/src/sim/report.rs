use std::collections::BTreeMap;
use std::fmt::Write as _;

use crate::rates::sig12;

const Z95: f64 = 1.959_963_984_540_054;

/// Error counts for trials that experienced one true delay.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct DelayTally {
    pub trials: u64,
    pub errors: u64,
    /// covering failures at the encoder
    pub e1: u64,
    /// the transmitted message fails its own test
    pub e2: u64,
    /// some other message passes the test
    pub e3: u64,
}

impl DelayTally {
    pub fn merge(&mut self, other: &DelayTally) {
        self.trials += other.trials;
        self.errors += other.errors;
        self.e1 += other.e1;
        self.e2 += other.e2;
        self.e3 += other.e3;
    }

    pub fn error_rate(&self) -> f64 {
        if self.trials == 0 {
            0.0
        } else {
            self.errors as f64 / self.trials as f64
        }
    }

    /// Half-width of the 95% Wilson score interval.
    pub fn ci_halfwidth(&self) -> f64 {
        wilson_halfwidth(self.errors, self.trials)
    }
}

pub fn wilson_halfwidth(errors: u64, trials: u64) -> f64 {
    if trials == 0 {
        return 0.0;
    }
    let n = trials as f64;
    let p = errors as f64 / n;
    let z2 = Z95 * Z95;
    Z95 / (1.0 + z2 / n) * (p * (1.0 - p) / n + z2 / (4.0 * n * n)).sqrt()
}

/// Monte Carlo outcome of a coding scheme, conditioned on the realized delay.
#[derive(Clone, Debug, PartialEq)]
pub struct TrialReport {
    pub scheme: String,
    pub n: usize,
    pub rate: f64,
    pub channel: String,
    pub seed: u64,
    /// every other parameter needed to reproduce the run
    pub params: Vec<(String, String)>,
    pub per_delay: BTreeMap<i64, DelayTally>,
}

pub const CSV_HEADER: [&str; 14] = [
    "scheme", "n", "rate", "channel", "d_true", "trials", "errors", "err_rate", "ci_halfwidth", "seed", "e1", "e2", "e3",
    "params",
];

impl TrialReport {
    pub fn new(scheme: &str, n: usize, rate: f64, channel: &str, seed: u64) -> Self {
        Self {
            scheme: scheme.to_string(),
            n,
            rate,
            channel: channel.to_string(),
            seed,
            params: Vec::new(),
            per_delay: BTreeMap::new(),
        }
    }

    pub fn param(mut self, key: &str, value: impl ToString) -> Self {
        self.params.push((key.to_string(), value.to_string()));
        self
    }

    pub fn record(&mut self, d: i64, tally: &DelayTally) {
        self.per_delay.entry(d).or_default().merge(tally);
    }

    pub fn total(&self) -> DelayTally {
        let mut t = DelayTally::default();
        self.per_delay.values().for_each(|v| t.merge(v));
        t
    }

    pub fn trials(&self) -> u64 {
        self.total().trials
    }

    pub fn errors(&self) -> u64 {
        self.total().errors
    }

    pub fn error_rate(&self) -> f64 {
        self.total().error_rate()
    }

    pub fn ci_halfwidth(&self) -> f64 {
        self.total().ci_halfwidth()
    }

    fn params_field(&self) -> String {
        let mut out = String::new();
        for (i, (k, v)) in self.params.iter().enumerate() {
            if i > 0 {
                out.push(';');
            }
            let _ = write!(out, "{k}={v}");
        }
        out
    }

    /// One row per realized delay followed by an `all` row.
    pub fn csv_rows(&self) -> Vec<Vec<String>> {
        let params = self.params_field();
        let row = |d: String, t: &DelayTally| {
            vec![
                self.scheme.clone(),
                self.n.to_string(),
                sig12(self.rate),
                self.channel.clone(),
                d,
                t.trials.to_string(),
                t.errors.to_string(),
                sig12(t.error_rate()),
                sig12(t.ci_halfwidth()),
                self.seed.to_string(),
                t.e1.to_string(),
                t.e2.to_string(),
                t.e3.to_string(),
                params.clone(),
            ]
        };
        let mut rows: Vec<Vec<String>> = self.per_delay.iter().map(|(d, t)| row(d.to_string(), t)).collect();
        rows.push(row("all".to_string(), &self.total()));
        rows
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn wilson_interval_values() {
        assert_eq!(wilson_halfwidth(0, 0), 0.0);
        // p = 0.5, n = 100: about 0.0962
        assert!((wilson_halfwidth(50, 100) - 0.0962).abs() < 1e-3);
        assert!(wilson_halfwidth(0, 1000) > 0.0);
    }

    #[test]
    fn tallies_merge_and_rows_echo_parameters() {
        let mut r = TrialReport::new("bsagp", 64, 0.4, "bsagp:p=0.5", 7).param("epsilon", 0.25);
        r.record(0, &DelayTally { trials: 10, errors: 1, ..Default::default() });
        r.record(1, &DelayTally { trials: 5, errors: 2, ..Default::default() });
        r.record(0, &DelayTally { trials: 10, errors: 0, ..Default::default() });
        assert_eq!(r.trials(), 25);
        assert_eq!(r.errors(), 3);
        let rows = r.csv_rows();
        assert_eq!(rows.len(), 3);
        assert_eq!(rows[2][4], "all");
        assert_eq!(rows[0][5], "20");
        assert_eq!(rows[0][13], "epsilon=0.25");
        assert!(rows.iter().all(|row| row.len() == CSV_HEADER.len()));
    }
}
