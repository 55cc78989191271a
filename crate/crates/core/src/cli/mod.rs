//! Command-line front end. Every command writes CSV with a fixed header and a
//! trailing `command` column holding the arguments that reproduce the row.
//!
//! Exit codes: 0 success, 1 other failure, 2 spec or usage error, 3 guard
//! violation or uncertifiable instance, 4 failed certification.

mod args;

use std::io::Write;
use std::path::Path;

use clap::Parser;

pub use args::{Cli, Command, SimulateCommand};
use args::{CertifyArgs, ChannelArgs, Fig4Args, Fig5Args, RatesArgs, SearchArgs, TrialArgs};

use crate::channel::{load_channel_spec, DelaySet, StateChannel};
use crate::error::{invalid, Error, Result};
use crate::oracle::{self, CertTarget, GridSpec};
use crate::rates::{
    acsitr_capacity, agp_feedback_capacity, agp_theorem1_rate, bsagp_closed_form, gp_capacity, no_si_capacity, sig12,
    theorem2_rate_search, theorem3_rate_search, Argument, BundleCardinalities, CertStatus, MaximinConfig, SearchConfig,
    SolveReport, StrategyPmf,
};
use crate::sim::{
    acsitr_simulate, bsagp_simulate, delay_simulate, segment_ts_simulate, xor_compensating_aux, AcsitrConfig,
    BsagpConfig, McConfig, SegmentTsConfig, TrainingPlan, TrialReport, CSV_HEADER,
};

pub const EXIT_OK: i32 = 0;
pub const EXIT_OTHER: i32 = 1;
pub const EXIT_SPEC: i32 = 2;
pub const EXIT_GUARD: i32 = 3;
pub const EXIT_CERTIFICATION: i32 = 4;

pub const RATES_HEADER: [&str; 13] = [
    "quantity", "channel", "delays", "value", "method", "iterations", "gap", "certification", "grid_value", "grid_delta",
    "seed", "starts", "command",
];
pub const FIG4_HEADER: [&str; 5] = ["p", "no_si", "r_l", "gp", "command"];
pub const FIG5_HEADER: [&str; 7] = ["d_size", "inverse", "solver", "gap", "certification", "grid_value", "command"];
pub const CERTIFY_HEADER: [&str; 10] = [
    "quantity", "channel", "delays", "value", "grid_value", "grid_delta", "status", "resolution", "note", "command",
];

pub const QUANTITIES: [&str; 8] = ["gp", "agp_t1", "theorem2", "theorem3", "acsitr", "no_si", "feedback", "closed_form"];

/// A resolved `--channel` argument.
#[derive(Clone, Debug)]
pub struct ChannelChoice {
    pub channel: StateChannel,
    pub delays: DelaySet,
    pub id: String,
    /// state bias of the `bsagp:p=` shorthand
    pub bsagp_p: Option<f64>,
}

/// Parses `bsagp:p=<real>` or loads a spec file; `delays` overrides the file.
pub fn resolve_channel(text: &str, delays: Option<DelaySet>) -> Result<ChannelChoice> {
    if let Some(rest) = text.strip_prefix("bsagp:") {
        let p: f64 = rest
            .strip_prefix("p=")
            .and_then(|v| v.parse().ok())
            .ok_or_else(|| Error::Spec(format!("built-in channel {text:?} must look like bsagp:p=<real>")))?;
        let channel = StateChannel::xor(p).map_err(|e| Error::Spec(e.to_string()))?;
        return Ok(ChannelChoice {
            channel,
            delays: delays.unwrap_or(DelaySet::new(0, 1)),
            id: text.to_string(),
            bsagp_p: Some(p),
        });
    }
    let (channel, file_delays) = load_channel_spec(Path::new(text))?;
    Ok(ChannelChoice {
        channel,
        delays: delays.unwrap_or(file_delays),
        id: text.to_string(),
        bsagp_p: None,
    })
}

fn channel_of(a: &ChannelArgs) -> Result<ChannelChoice> {
    resolve_channel(&a.channel, a.delays)
}

fn search_config(a: &SearchArgs) -> SearchConfig {
    SearchConfig {
        starts: a.starts,
        seed: a.seed,
        certify: !a.no_certify,
        ..SearchConfig::default()
    }
}

fn mc_config(t: &TrialArgs) -> McConfig {
    McConfig {
        trials: t.trials,
        seed: t.seed,
        refresh: t.refresh,
        delay: t.delay,
        jitter: None,
    }
}

/// Solves one named quantity.
pub fn solve_quantity(quantity: &str, choice: &ChannelChoice, cfg: &SearchConfig) -> Result<SolveReport> {
    let ch = &choice.channel;
    let d_size = choice.delays.size();
    let grid = GridSpec::new(Vec::new(), oracle::DEFAULT_RESOLUTION);
    let grid_checked = |mut report: SolveReport, target: CertTarget| {
        if cfg.certify && oracle::grid_applicable(&target, &grid) {
            report.certification = oracle::certify(&target, &report, &grid);
        }
        report
    };
    match quantity {
        "gp" => gp_capacity(ch, cfg),
        "agp_t1" => agp_theorem1_rate(ch, d_size, cfg),
        "theorem2" => {
            if d_size != 2 {
                return Err(invalid("theorem2 needs a delay set of size 2"));
            }
            theorem2_rate_search(ch, BundleCardinalities::default(), cfg)
        }
        "theorem3" => theorem3_rate_search(ch, d_size, BundleCardinalities::default(), cfg),
        "acsitr" => Ok(grid_checked(
            acsitr_capacity(ch, &choice.delays, &MaximinConfig::default())?,
            CertTarget::Acsitr(ch.clone(), choice.delays),
        )),
        "no_si" => Ok(grid_checked(no_si_capacity(ch)?, CertTarget::NoSi(ch.clone()))),
        "feedback" => agp_feedback_capacity(ch, cfg),
        "closed_form" => {
            let p = choice
                .bsagp_p
                .ok_or_else(|| invalid("closed_form is defined for the bsagp:p=<real> channel only"))?;
            if d_size != 2 {
                return Err(invalid("closed_form is defined for delay sets of size 2"));
            }
            Ok(SolveReport::new("closed_form", bsagp_closed_form(p)?, Argument::None, "closed_form"))
        }
        other => Err(invalid(format!("unknown quantity {other:?}; expected one of {}", QUANTITIES.join(", ")))),
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Fig4Row {
    pub p: f64,
    pub no_si: f64,
    pub r_l: f64,
    pub gp: f64,
}

pub fn default_fig4_grid() -> Vec<f64> {
    (1..=9).map(|k| k as f64 * 0.05).collect()
}

/// Rates of the binary XOR channel: no state information (Blahut-Arimoto),
/// the delayed-state segment scheme (closed form) and synchronous GP.
pub fn fig4_rows(ps: &[f64], solve_gp: bool) -> Result<Vec<Fig4Row>> {
    ps.iter()
        .map(|&p| {
            if !(p > 0.0 && p < 1.0) {
                return Err(invalid(format!("p = {p} outside (0, 1)")));
            }
            let ch = StateChannel::xor(p)?;
            let gp = if solve_gp {
                gp_capacity(&ch, &SearchConfig::default())?.value
            } else {
                1.0
            };
            Ok(Fig4Row {
                p,
                no_si: no_si_capacity(&ch)?.value,
                r_l: bsagp_closed_form(p)?,
                gp,
            })
        })
        .collect()
}

#[derive(Clone, Debug)]
pub struct Fig5Row {
    pub d_size: usize,
    pub inverse: f64,
    pub report: SolveReport,
}

pub const FIG5_MAX_D: usize = 8;

pub fn fig5_rows(d_max: usize, p: f64, cfg: &SearchConfig) -> Result<Vec<Fig5Row>> {
    if d_max == 0 || d_max > FIG5_MAX_D {
        return Err(invalid(format!("d_max must be in 1..={FIG5_MAX_D}")));
    }
    let ch = StateChannel::xor(p)?;
    (1..=d_max)
        .map(|d| {
            Ok(Fig5Row {
                d_size: d,
                inverse: 1.0 / d as f64,
                report: agp_theorem1_rate(&ch, d, cfg)?,
            })
        })
        .collect()
}

fn exit_code(e: &Error) -> i32 {
    match e {
        Error::Spec(_) => EXIT_SPEC,
        Error::Guard(_) => EXIT_GUARD,
        _ => EXIT_OTHER,
    }
}

fn opt(x: Option<f64>) -> String {
    x.map(sig12).unwrap_or_default()
}

fn opt_sci(x: Option<f64>) -> String {
    x.map(|v| format!("{v:.3e}")).unwrap_or_default()
}

struct Output {
    rows: Vec<Vec<String>>,
    header: Vec<&'static str>,
    code: i32,
}

impl Output {
    fn new(header: &[&'static str]) -> Self {
        Self {
            rows: Vec::new(),
            header: header.to_vec(),
            code: EXIT_OK,
        }
    }
}

fn trial_output(report: &TrialReport, command: &str) -> Output {
    let mut header = CSV_HEADER.to_vec();
    header.push("command");
    let mut out = Output::new(&header);
    for mut row in report.csv_rows() {
        row.push(command.to_string());
        out.rows.push(row);
    }
    out
}

fn rates(a: &RatesArgs, command: &str) -> Result<Output> {
    let choice = channel_of(&a.channel)?;
    let cfg = search_config(&a.search);
    let mut out = Output::new(&RATES_HEADER);
    for q in &a.quantities {
        let r = solve_quantity(q, &choice, &cfg)?;
        if r.certification.status == CertStatus::Failed {
            out.code = EXIT_CERTIFICATION;
        }
        out.rows.push(vec![
            r.quantity.clone(),
            choice.id.clone(),
            choice.delays.to_string(),
            sig12(r.value),
            r.method.clone(),
            r.iterations.to_string(),
            format!("{:.3e}", r.convergence_gap),
            r.certification.status.to_string(),
            opt(r.certification.grid_value),
            opt_sci(r.certification.delta),
            cfg.seed.to_string(),
            cfg.starts.to_string(),
            command.to_string(),
        ]);
    }
    Ok(out)
}

fn fig4(a: &Fig4Args, command: &str) -> Result<Output> {
    let ps = if a.p.is_empty() { default_fig4_grid() } else { a.p.clone() };
    let mut out = Output::new(&FIG4_HEADER);
    for r in fig4_rows(&ps, a.solve_gp)? {
        out.rows.push(vec![sig12(r.p), sig12(r.no_si), sig12(r.r_l), sig12(r.gp), command.to_string()]);
    }
    Ok(out)
}

fn fig5(a: &Fig5Args, command: &str) -> Result<Output> {
    let mut out = Output::new(&FIG5_HEADER);
    for r in fig5_rows(a.d_max, a.p, &search_config(&a.search))? {
        if r.report.certification.status == CertStatus::Failed {
            out.code = EXIT_CERTIFICATION;
        }
        out.rows.push(vec![
            r.d_size.to_string(),
            sig12(r.inverse),
            sig12(r.report.value),
            format!("{:.3e}", r.report.convergence_gap),
            r.report.certification.status.to_string(),
            opt(r.report.certification.grid_value),
            command.to_string(),
        ]);
    }
    Ok(out)
}

fn simulate(c: &SimulateCommand, command: &str) -> Result<Output> {
    let report = match c {
        SimulateCommand::Bsagp {
            p,
            n,
            rate,
            delays,
            epsilon,
            mode,
            trials,
        } => {
            let cfg = BsagpConfig {
                p: *p,
                n: *n,
                rate: *rate,
                delays: *delays,
                epsilon: *epsilon,
                mode: *mode,
            };
            bsagp_simulate(&cfg, &mc_config(trials))?
        }
        SimulateCommand::Acsitr {
            channel,
            n,
            rate,
            epsilon,
            strategy,
            mode,
            jitter,
            trials,
        } => {
            let choice = channel_of(channel)?;
            let strat = match strategy.as_str() {
                "uniform" => {
                    let nv = choice.channel.ns().pow(choice.delays.size() as u32);
                    StrategyPmf::uniform(nv, choice.channel.nx())
                }
                "solver" => match acsitr_capacity(&choice.channel, &choice.delays, &MaximinConfig::default())?.argument {
                    Argument::Strategy(s) => s,
                    _ => unreachable!("maximin solver returns a strategy"),
                },
                other => return Err(invalid(format!("unknown strategy {other:?}; expected uniform or solver"))),
            };
            let mut cfg = AcsitrConfig::new(strat, choice.delays, *n, *rate);
            cfg.epsilon = *epsilon;
            cfg.mode = *mode;
            let mut mc = mc_config(trials);
            mc.jitter = *jitter;
            let mut r = acsitr_simulate(&choice.channel, &cfg, &mc)?.param("strategy", strategy);
            r.channel = choice.id;
            r
        }
        SimulateCommand::SegmentTs {
            channel,
            n,
            rate,
            bin_rate,
            epsilon,
            aux,
            trials,
        } => {
            let choice = channel_of(channel)?;
            let aux_dist = match aux.as_str() {
                "xor" => xor_compensating_aux()?,
                "solver" => {
                    let cfg = SearchConfig {
                        certify: false,
                        seed: trials.seed,
                        ..SearchConfig::default()
                    };
                    match agp_theorem1_rate(&choice.channel, choice.delays.size(), &cfg)?.argument {
                        Argument::Aux(a) => a,
                        _ => unreachable!("auxiliary search returns an auxiliary law"),
                    }
                }
                other => return Err(invalid(format!("unknown auxiliary {other:?}; expected solver or xor"))),
            };
            let mut cfg = SegmentTsConfig::new(aux_dist, *n, *rate, *bin_rate, *epsilon);
            cfg.delays = choice.delays;
            let mut r = segment_ts_simulate(&choice.channel, &cfg, &mc_config(trials))?.param("aux", aux);
            r.channel = choice.id;
            r
        }
        SimulateCommand::Delay {
            channel,
            segment_len,
            map,
            knows_states,
            trials,
        } => {
            let choice = channel_of(channel)?;
            let map = if map.is_empty() {
                if choice.channel.nx() < choice.channel.ns() {
                    return Err(invalid("identity training map needs nx >= ns; pass --map"));
                }
                (0..choice.channel.ns()).collect()
            } else {
                map.clone()
            };
            let plan = TrainingPlan::new(*segment_len, choice.delays, map);
            let mut r = delay_simulate(&choice.channel, &plan, *knows_states, &mc_config(trials))?;
            r.channel = choice.id;
            r
        }
    };
    Ok(trial_output(&report, command))
}

fn certify_cmd(a: &CertifyArgs, command: &str) -> Result<Output> {
    let choice = channel_of(&a.channel)?;
    let mut cfg = search_config(&a.search);
    cfg.certify = false;
    let ch = choice.channel.clone();
    let target = match a.quantity.as_str() {
        "gp" | "feedback" => CertTarget::Gp(ch),
        "agp_t1" => CertTarget::Theorem1(ch, choice.delays.size()),
        "acsitr" => CertTarget::Acsitr(ch, choice.delays),
        "no_si" => CertTarget::NoSi(ch),
        other => return Err(invalid(format!("no grid oracle for quantity {other:?}"))),
    };
    let report = solve_quantity(&a.quantity, &choice, &cfg)?;
    let spec = GridSpec::new(Vec::new(), a.resolution);
    let c = oracle::certify(&target, &report, &spec);
    let mut out = Output::new(&CERTIFY_HEADER);
    out.code = match c.status {
        CertStatus::Certified => EXIT_OK,
        CertStatus::Failed => EXIT_CERTIFICATION,
        _ => EXIT_GUARD,
    };
    out.rows.push(vec![
        a.quantity.clone(),
        choice.id,
        choice.delays.to_string(),
        sig12(report.value),
        opt(c.grid_value),
        opt_sci(c.delta),
        c.status.to_string(),
        a.resolution.to_string(),
        c.note,
        command.to_string(),
    ]);
    Ok(out)
}

fn write_csv(out: &Output, sink: &mut dyn Write) -> Result<()> {
    let mut w = csv::Writer::from_writer(sink);
    let io = |e: csv::Error| Error::Io(std::io::Error::other(e));
    w.write_record(&out.header).map_err(io)?;
    for row in &out.rows {
        w.write_record(row).map_err(io)?;
    }
    w.flush()?;
    Ok(())
}

/// Runs the CLI on `argv` (program name first) and returns the exit code.
/// CSV goes to `stdout` unless `--out` is given; diagnostics go to `stderr`.
pub fn run<I, S>(argv: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = S>,
    S: Into<String>,
{
    let argv: Vec<String> = argv.into_iter().map(Into::into).collect();
    let cli = match Cli::try_parse_from(&argv) {
        Ok(c) => c,
        Err(e) => {
            let _ = write!(stderr, "{e}");
            return if e.use_stderr() { EXIT_SPEC } else { EXIT_OK };
        }
    };
    if let Some(t) = cli.threads {
        // a second configuration attempt in the same process is harmless
        let _ = rayon::ThreadPoolBuilder::new().num_threads(t).build_global();
    }
    let command = argv.iter().skip(1).cloned().collect::<Vec<_>>().join(" ");
    let result = match &cli.command {
        Command::Rates(a) => rates(a, &command),
        Command::Fig4(a) => fig4(a, &command),
        Command::Fig5(a) => fig5(a, &command),
        Command::Simulate(c) => simulate(c, &command),
        Command::Certify(a) => certify_cmd(a, &command),
    };
    let out = match result {
        Ok(o) => o,
        Err(e) => {
            let _ = writeln!(stderr, "error: {e}");
            return exit_code(&e);
        }
    };
    let written = match &cli.out {
        Some(path) => std::fs::File::create(path)
            .map_err(Error::from)
            .and_then(|mut f| write_csv(&out, &mut f)),
        None => write_csv(&out, stdout),
    };
    if let Err(e) = written {
        let _ = writeln!(stderr, "error: {e}");
        return EXIT_OTHER;
    }
    out.code
}

#[cfg(test)]
mod tests {
    use super::*;

    fn run_str(args: &[&str]) -> (i32, String, String) {
        let mut out = Vec::new();
        let mut err = Vec::new();
        let code = run(std::iter::once("asyncsi").chain(args.iter().copied()), &mut out, &mut err);
        (code, String::from_utf8(out).unwrap(), String::from_utf8(err).unwrap())
    }

    #[test]
    fn closed_form_and_no_si_rows() {
        let (code, out, _) = run_str(&["rates", "--channel", "bsagp:p=0.5", "--delays", "0..1", "--quantity", "closed_form,no_si"]);
        assert_eq!(code, 0);
        let lines: Vec<&str> = out.lines().collect();
        assert!(lines[0].starts_with("quantity,channel"));
        assert!(lines[1].starts_with("closed_form,bsagp:p=0.5,0..1,0.500000000000,"));
        assert!(lines[2].starts_with("no_si,"));
        // the command contains a comma, so the field is quoted
        assert!(lines[2].ends_with("\"rates --channel bsagp:p=0.5 --delays 0..1 --quantity closed_form,no_si\""));
    }

    #[test]
    fn exit_codes() {
        assert_eq!(run_str(&["rates", "--channel", "bsagp:q=1", "--quantity", "gp"]).0, EXIT_SPEC);
        assert_eq!(run_str(&["rates", "--channel", "/nonexistent.toml", "--quantity", "gp"]).0, EXIT_SPEC);
        assert_eq!(run_str(&["rates", "--channel", "bsagp:p=0.5", "--quantity", "bogus"]).0, EXIT_OTHER);
        assert_eq!(run_str(&["bogus"]).0, EXIT_SPEC);
        let (code, _, err) = run_str(&[
            "simulate", "bsagp", "--p", "0.5", "--n", "128", "--rate", "0.4", "--trials", "1", "--seed", "1", "--mode", "explicit",
        ]);
        assert_eq!(code, EXIT_GUARD, "{err}");
    }

    #[test]
    fn simulation_is_reproducible_and_echoes_parameters() {
        let args = ["simulate", "bsagp", "--p", "0.5", "--n", "16", "--rate", "0.25", "--trials", "200", "--seed", "3"];
        let (code, a, _) = run_str(&args);
        assert_eq!(code, 0);
        assert_eq!(a, run_str(&args).1);
        assert!(a.contains("epsilon=0.25;mode=explicit"));
        assert_eq!(a.lines().count(), 4);
    }

    #[test]
    fn negative_delays_parse() {
        let (code, out, err) = run_str(&[
            "simulate", "delay", "--channel", "bsagp:p=0.5", "--delays", "-1..1", "--segment-len", "8", "--trials", "50", "--seed", "1",
            "--delay", "-1",
        ]);
        assert_eq!(code, 0, "{err}");
        assert!(out.lines().nth(1).unwrap().starts_with("delay,24,0,bsagp:p=0.5,-1,50,"));
    }

    #[test]
    fn fig4_ordering() {
        for r in fig4_rows(&default_fig4_grid(), false).unwrap() {
            assert!(r.no_si < r.r_l && r.r_l < r.gp);
        }
    }
}
