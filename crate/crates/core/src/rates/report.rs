use std::fmt;

use crate::prob::Pmf;
use crate::rates::{AuxDistribution, CompoundAuxBundle, StrategyPmf};

/// Formats with 12 significant digits.
pub fn sig12(x: f64) -> String {
    if x == 0.0 || !x.is_finite() {
        return format!("{x}");
    }
    let magnitude = x.abs().log10().floor() as i32;
    let decimals = (11 - magnitude).max(0) as usize;
    format!("{x:.decimals$}")
}

/// The maximizing distribution returned by a solver.
#[derive(Clone, Debug, PartialEq)]
pub enum Argument {
    Input(Pmf),
    Aux(AuxDistribution),
    Strategy(StrategyPmf),
    Bundle(CompoundAuxBundle),
    None,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CertStatus {
    NotAttempted,
    Certified,
    Failed,
    Uncertified,
}

impl fmt::Display for CertStatus {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            CertStatus::NotAttempted => "not_attempted",
            CertStatus::Certified => "certified",
            CertStatus::Failed => "failed",
            CertStatus::Uncertified => "uncertified",
        })
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Certification {
    pub status: CertStatus,
    pub grid_value: Option<f64>,
    pub delta: Option<f64>,
    pub note: String,
}

impl Certification {
    pub fn not_attempted() -> Self {
        Self {
            status: CertStatus::NotAttempted,
            grid_value: None,
            delta: None,
            note: String::new(),
        }
    }

    pub fn uncertified(note: impl Into<String>) -> Self {
        Self {
            status: CertStatus::Uncertified,
            grid_value: None,
            delta: None,
            note: note.into(),
        }
    }
}

/// Outcome of a rate or capacity computation.
#[derive(Clone, Debug, PartialEq)]
pub struct SolveReport {
    pub quantity: String,
    pub value: f64,
    pub argument: Argument,
    pub iterations: usize,
    pub convergence_gap: f64,
    pub method: String,
    pub certification: Certification,
}

impl SolveReport {
    pub fn new(quantity: &str, value: f64, argument: Argument, method: &str) -> Self {
        Self {
            quantity: quantity.to_string(),
            value,
            argument,
            iterations: 0,
            convergence_gap: 0.0,
            method: method.to_string(),
            certification: Certification::not_attempted(),
        }
    }

    /// Flat `key=value` record on one line.
    pub fn to_record(&self) -> String {
        let mut out = format!(
            "quantity={} value={} iterations={} gap={:.3e} method={} certification={}",
            self.quantity,
            sig12(self.value),
            self.iterations,
            self.convergence_gap,
            self.method,
            self.certification.status
        );
        if let Some(g) = self.certification.grid_value {
            out.push_str(&format!(" grid_value={}", sig12(g)));
        }
        if let Some(d) = self.certification.delta {
            out.push_str(&format!(" grid_delta={d:.3e}"));
        }
        out
    }
}

impl fmt::Display for SolveReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_record())
    }
}
