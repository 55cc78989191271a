use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};

use crate::channel::DelaySet;
use crate::sim::CodeMode;

#[derive(Debug, Parser)]
#[command(name = "asyncsi", version, about = "Rates and coding simulations for channels with delayed state information")]
pub struct Cli {
    /// Write CSV here instead of stdout.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,

    /// Worker threads; defaults to all cores.
    #[arg(long, global = true, env = "ASYNCSI_THREADS")]
    pub threads: Option<usize>,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Compute capacities and achievable rates.
    Rates(RatesArgs),
    /// Rate comparison for the binary XOR channel over a grid of state biases.
    Fig4(Fig4Args),
    /// Achievable rate against the number of possible delays.
    Fig5(Fig5Args),
    /// Monte Carlo simulation of a coding scheme.
    #[command(subcommand)]
    Simulate(SimulateCommand),
    /// Check a solver value against the exhaustive grid oracle.
    Certify(CertifyArgs),
}

#[derive(Debug, Args, Clone)]
pub struct ChannelArgs {
    /// Channel spec file, or `bsagp:p=<real>` for the XOR channel with Bernoulli(p) state.
    #[arg(long)]
    pub channel: String,

    /// Delay set `lo..hi` (must contain 0); overrides the spec file.
    #[arg(long, allow_hyphen_values = true)]
    pub delays: Option<DelaySet>,
}

#[derive(Debug, Args, Clone)]
pub struct SearchArgs {
    #[arg(long, default_value_t = 64)]
    pub starts: usize,

    #[arg(long, default_value_t = 0)]
    pub seed: u64,

    /// Skip automatic grid certification.
    #[arg(long)]
    pub no_certify: bool,
}

#[derive(Debug, Args)]
pub struct RatesArgs {
    #[command(flatten)]
    pub channel: ChannelArgs,

    /// One or more of gp, agp_t1, theorem2, theorem3, acsitr, no_si, feedback, closed_form.
    #[arg(long = "quantity", required = true, num_args = 1.., value_delimiter = ',')]
    pub quantities: Vec<String>,

    #[command(flatten)]
    pub search: SearchArgs,
}

#[derive(Debug, Args)]
pub struct Fig4Args {
    /// State biases; defaults to 0.05, 0.10, .., 0.45.
    #[arg(long, value_delimiter = ',')]
    pub p: Vec<f64>,

    /// Run the GP solver per row instead of the known value 1.
    #[arg(long)]
    pub solve_gp: bool,
}

#[derive(Debug, Args)]
pub struct Fig5Args {
    #[arg(long, default_value_t = 4)]
    pub d_max: usize,

    #[arg(long, default_value_t = 0.5)]
    pub p: f64,

    #[command(flatten)]
    pub search: SearchArgs,
}

#[derive(Debug, Args, Clone)]
pub struct TrialArgs {
    #[arg(long)]
    pub trials: u64,

    #[arg(long)]
    pub seed: u64,

    /// Trials per drawn codebook; 0 keeps one codebook for the whole run.
    #[arg(long, default_value_t = 100)]
    pub refresh: u64,

    /// Fix the true delay instead of drawing it uniformly.
    #[arg(long, allow_hyphen_values = true)]
    pub delay: Option<i64>,
}

#[derive(Debug, Subcommand)]
pub enum SimulateCommand {
    /// Segment scheme on the binary XOR channel.
    Bsagp {
        #[arg(long)]
        p: f64,
        #[arg(long)]
        n: usize,
        #[arg(long)]
        rate: f64,
        #[arg(long, default_value = "0..1", allow_hyphen_values = true)]
        delays: DelaySet,
        #[arg(long, default_value_t = crate::sim::BSAGP_DEFAULT_EPSILON)]
        epsilon: f64,
        #[arg(long, default_value = "auto")]
        mode: CodeMode,
        #[command(flatten)]
        trials: TrialArgs,
    },
    /// Strategy codebook with states known at both ends.
    Acsitr {
        #[command(flatten)]
        channel: ChannelArgs,
        #[arg(long)]
        n: usize,
        #[arg(long)]
        rate: f64,
        #[arg(long, default_value_t = crate::sim::ACSITR_DEFAULT_EPSILON)]
        epsilon: f64,
        /// `uniform` or `solver` (the maximin strategy).
        #[arg(long, default_value = "solver")]
        strategy: String,
        #[arg(long, default_value = "auto")]
        mode: CodeMode,
        /// Redraw the delay every this many symbols.
        #[arg(long)]
        jitter: Option<usize>,
        #[command(flatten)]
        trials: TrialArgs,
    },
    /// Binning with segment time sharing.
    SegmentTs {
        #[command(flatten)]
        channel: ChannelArgs,
        #[arg(long)]
        n: usize,
        #[arg(long)]
        rate: f64,
        #[arg(long)]
        bin_rate: f64,
        #[arg(long, default_value_t = 0.1)]
        epsilon: f64,
        /// `solver` (the two-delay rate maximizer) or `xor` (uniform u, x = u xor a).
        #[arg(long, default_value = "solver")]
        aux: String,
        #[command(flatten)]
        trials: TrialArgs,
    },
    /// Training-based delay estimation.
    Delay {
        #[command(flatten)]
        channel: ChannelArgs,
        #[arg(long)]
        segment_len: usize,
        /// Training input for each state symbol; identity by default.
        #[arg(long, value_delimiter = ',')]
        map: Vec<usize>,
        /// The receiver knows the state block.
        #[arg(long)]
        knows_states: bool,
        #[command(flatten)]
        trials: TrialArgs,
    },
}

#[derive(Debug, Args)]
pub struct CertifyArgs {
    #[command(flatten)]
    pub channel: ChannelArgs,

    /// One of gp, agp_t1, acsitr, no_si, feedback.
    #[arg(long)]
    pub quantity: String,

    #[arg(long, default_value_t = crate::oracle::DEFAULT_RESOLUTION)]
    pub resolution: usize,

    #[command(flatten)]
    pub search: SearchArgs,
}
