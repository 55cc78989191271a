//! Monte Carlo and exact evaluation of the random-coding schemes.

mod acsitr;
mod bsagp;
mod code;
mod delay;
mod ensemble;
mod layout;
mod report;
mod scheme;
mod segment_ts;

pub use code::{
    draw_environment, exact_error_oracle, run_code_trial, simulate_code, BlockCode, Encoded, Environment, ExactError,
    McConfig, Observation, Outcome, Setting, Verdict, EXACT_ORACLE_BUDGET,
};
pub use acsitr::{acsitr_simulate, AcsitrCode, AcsitrConfig, ACSITR_DEFAULT_EPSILON, MAX_STRATEGY_ENTRIES};
pub use bsagp::{bsagp_simulate, BsagpCode, BsagpConfig, BSAGP_DEFAULT_EPSILON};
pub use delay::{delay_simulate, estimate_delay, training_output_laws, DelayEstimate, TrainingPlan, INDISTINGUISHABLE_TV};
pub use layout::SegmentLayout;
pub use report::{wilson_halfwidth, DelayTally, TrialReport, CSV_HEADER};
pub use scheme::{message_count, CodeMode, AUTO_EXPLICIT_WORK, MAX_EXPLICIT_MESSAGES};
pub use segment_ts::{segment_ts_simulate, xor_compensating_aux, SegmentTsCode, SegmentTsConfig, MAX_SEGMENT_TS_WORDS};
