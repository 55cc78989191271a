//! Finite-alphabet probability primitives.

mod info;
mod pmf;
mod typical;

pub use info::{binary_entropy, conditional_mutual_information, entropy, mutual_information};
pub(crate) use info::h2;
#[cfg(test)]
pub(crate) use info::entropy_of;
pub use pmf::{Axis, JointPmf, Pmf, RENORMALIZE_TOL};
pub(crate) use pmf::normalized;
pub use typical::{counts_typical, is_strongly_typical, jointly_typical, TypicalityParams};
