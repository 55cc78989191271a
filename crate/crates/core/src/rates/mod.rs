mod aux;
mod blahut;
mod bundle;
mod closed;
mod gp;
mod maximin;
mod report;
mod simplex;

pub use aux::AuxDistribution;
pub use blahut::{no_si_capacity, NO_SI_TOLERANCE};
pub use bundle::{
    theorem2_rate_eval, theorem2_rate_search, theorem2_terms, theorem3_rate_eval, theorem3_rate_search,
    theorem3_subset_terms, BundleCardinalities, CompoundAuxBundle, MAX_BUNDLE_WIDTH,
};
pub use closed::{bsagp_closed_form, xor_process_entropy_rate, XorEntropyRate, XOR_PROCESS_MAX_N};
pub use gp::{agp_feedback_capacity, agp_theorem1_rate, gp_capacity, gp_objective, theorem1_objective, SearchConfig};
pub use maximin::{
    acsitr_capacity, acsitr_objective, compound_capacity, compound_member_objective, MaximinConfig, StrategyPmf,
};
pub use report::{sig12, Argument, CertStatus, Certification, SolveReport};

