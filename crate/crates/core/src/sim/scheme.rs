use std::fmt;
use std::str::FromStr;

use crate::error::{guard, invalid, Error, Result};

/// Largest codebook materialized by the explicit simulators.
pub const MAX_EXPLICIT_MESSAGES: f64 = (1u64 << 26) as f64;
/// `Auto` mode stays explicit while `messages * trials` is below this.
pub const AUTO_EXPLICIT_WORK: f64 = (1u64 << 30) as f64;

/// How a random-coding simulator handles competing codewords.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum CodeMode {
    /// Explicit when the codebook and the work are small, ensemble otherwise.
    #[default]
    Auto,
    /// Draw and store the whole codebook, decode against every codeword.
    Explicit,
    /// Draw only the transmitted codeword; competitors pass the decoder's test
    /// independently with a probability computed exactly from the received block.
    Ensemble,
}

impl CodeMode {
    pub(crate) fn resolve(self, messages: f64, trials: u64, explicit_ok: bool) -> Result<CodeMode> {
        match self {
            CodeMode::Explicit if !explicit_ok || messages > MAX_EXPLICIT_MESSAGES => Err(guard(format!(
                "explicit codebook of {messages:.3e} messages exceeds the simulator limits"
            ))),
            CodeMode::Auto => Ok(
                if explicit_ok && messages <= MAX_EXPLICIT_MESSAGES && messages * trials as f64 <= AUTO_EXPLICIT_WORK {
                    CodeMode::Explicit
                } else {
                    CodeMode::Ensemble
                },
            ),
            m => Ok(m),
        }
    }
}

impl fmt::Display for CodeMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            CodeMode::Auto => "auto",
            CodeMode::Explicit => "explicit",
            CodeMode::Ensemble => "ensemble",
        })
    }
}

impl FromStr for CodeMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "auto" => Ok(CodeMode::Auto),
            "explicit" => Ok(CodeMode::Explicit),
            "ensemble" => Ok(CodeMode::Ensemble),
            _ => Err(invalid(format!("unknown code mode {s:?}"))),
        }
    }
}

/// `ceil(2^(n * rate))` as a float; may exceed any integer type.
pub fn message_count(n: usize, rate: f64) -> Result<f64> {
    if !(rate >= 0.0) || !rate.is_finite() {
        return Err(invalid(format!("rate must be finite and non-negative, got {rate}")));
    }
    Ok((n as f64 * rate).exp2().ceil())
}

pub(crate) fn check_epsilon(eps: f64) -> Result<()> {
    if !(eps > 0.0) || !eps.is_finite() {
        return Err(invalid(format!("typicality epsilon must be positive, got {eps}")));
    }
    Ok(())
}
