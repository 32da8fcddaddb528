//! Command-line front end. `run` is the whole program minus process setup,
//! so it can be driven from tests.

use std::ffi::OsString;
use std::io::Write;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::Value;

use crate::bijections::verify_injection_sets;
use crate::closed_form::{
    convergence_report, expectation_alpha_ladder, prob_c1, prob_c2,
    prob_d1, prob_d2, AlphaExpectationRecursion,
};
use crate::enumerate::{enum_event_probability_with, enumerate_paths, EnumConfig, EventSpec};
use crate::error::{precondition, Error, Result};
use crate::moments::{lemma_growth_report, MomentMode, MomentRequest};
use crate::montecarlo::{
    biased_walk_summary, estimate_expectation, estimate_sites_once, estimate_tail, limsup_probe,
    tail_slope_report,
};
use crate::rational::ExactRational;
use crate::report::{Cell, Format, Report};
use crate::rng::entropy_seed;

pub const ENV_THREADS: &str = "RAREWALK_THREADS";
pub const ENV_OUT_DIR: &str = "RAREWALK_OUT_DIR";

#[derive(Debug, Parser)]
#[command(name = "rarewalk", version, about = "Rarely visited edges of the simple random walk on Z")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,

    #[command(flatten)]
    pub common: Common,
}

#[derive(Debug, Args)]
pub struct Common {
    /// Output format.
    #[arg(long, global = true, value_enum, default_value = "csv")]
    pub format: Format,

    /// Output file (default: standard output, or RAREWALK_OUT_DIR/<command>.<format>).
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,

    /// Worker threads; 0 uses every core.
    #[arg(long, global = true, env = ENV_THREADS)]
    pub threads: Option<usize>,

    /// Master seed for stochastic commands; drawn from entropy when absent.
    #[arg(long, global = true)]
    pub seed: Option<u64>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Route {
    Recursion,
    Ladder,
    Both,
    MonteCarlo,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Stat {
    AlphaDist,
    MeanAlpha,
    MeanF1,
    Moment,
    Tail,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Side {
    Plus,
    Full,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Mode {
    Exact,
    Floating,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// E alpha(n) by the increment recursion, the ladder sum, or simulation.
    Expect {
        #[arg(long)]
        n: u64,
        #[arg(long, value_enum, default_value = "both")]
        route: Route,
        /// Emit every m in 1..=n instead of n alone.
        #[arg(long)]
        all: bool,
        /// Replicas for --route monte-carlo.
        #[arg(long, default_value_t = 100_000)]
        replicas: u64,
    },
    /// Exhaustive statistics over all 2^n paths.
    Enumerate {
        #[arg(long)]
        n: u32,
        #[arg(long, value_enum, default_value = "alpha-dist")]
        stat: Stat,
        /// Order for --stat moment.
        #[arg(long, default_value_t = 1)]
        k: u64,
        /// Threshold for --stat tail (strict: alpha > threshold).
        #[arg(long, default_value_t = 1.0, allow_negative_numbers = true)]
        threshold: f64,
        /// Largest n accepted.
        #[arg(long, default_value_t = crate::enumerate::DEFAULT_CAP)]
        cap: u32,
    },
    /// Exact probabilities of the path events C1, C2, D1 and D2.
    Events {
        #[arg(long)]
        t: u64,
        /// Emit every index in 1..=t.
        #[arg(long)]
        through: bool,
        /// Cross-check against enumeration (t <= 24).
        #[arg(long)]
        verify: bool,
        /// Emit the scaled-limit convergence table up to t instead.
        #[arg(long)]
        convergence: bool,
    },
    /// Binomial moments E binom(alpha(n), k).
    Moments {
        #[arg(long, default_value_t = 1)]
        n: u64,
        #[arg(long, default_value_t = 1)]
        k: u64,
        #[arg(long, value_enum, default_value = "full")]
        side: Side,
        #[arg(long, value_enum, default_value = "exact")]
        mode: Mode,
        /// Cross-check against enumeration (n <= 24).
        #[arg(long)]
        verify: bool,
        /// Growth table for k = round(a ln n) over --n-list instead.
        #[arg(long)]
        growth: bool,
        #[arg(long, value_delimiter = ',', default_values_t = [100u64, 1000, 10000])]
        n_list: Vec<u64>,
        #[arg(long, default_value_t = 0.5, allow_negative_numbers = true)]
        a: f64,
        #[arg(long, default_value_t = 0.25, allow_negative_numbers = true)]
        epsilon: f64,
    },
    /// Exhaustive certification of the path bijections.
    BijectionCheck {
        #[arg(long = "n-plus-1")]
        n_plus_1: u32,
    },
    /// P(alpha(n) > a (ln n)^2) with a Clopper-Pearson interval.
    Tail {
        #[arg(long)]
        n: u64,
        #[arg(long, allow_negative_numbers = true)]
        a: f64,
        #[arg(long, default_value_t = 100_000)]
        replicas: u64,
    },
    /// Tail estimates over a grid of n with the fitted exponent.
    TailSlope {
        #[arg(long, value_delimiter = ',', default_values_t = [1024u64, 16384, 262144])]
        n_grid: Vec<u64>,
        #[arg(long, default_value_t = 0.25, allow_negative_numbers = true)]
        a: f64,
        #[arg(long, default_value_t = 100_000)]
        replicas: u64,
    },
    /// Per-replica max of alpha(n) / (ln n)^2 over n_min <= n <= horizon.
    Limsup {
        #[arg(long)]
        horizon: u64,
        #[arg(long, default_value_t = 2)]
        n_min: u64,
        #[arg(long, default_value_t = 100)]
        replicas: u64,
    },
    /// Mean number of sites visited exactly once.
    Sites {
        #[arg(long)]
        n: u64,
        #[arg(long, default_value_t = 100_000)]
        replicas: u64,
    },
    /// Exploratory: statistics of the walk with P(step = +1) = p.
    Biased {
        #[arg(long)]
        n: u64,
        #[arg(long, allow_negative_numbers = true)]
        p: f64,
        #[arg(long, default_value_t = 0.25, allow_negative_numbers = true)]
        a: f64,
        #[arg(long, default_value_t = 100_000)]
        replicas: u64,
    },
}

impl Command {
    fn name(&self) -> &'static str {
        match self {
            Command::Expect { .. } => "expect",
            Command::Enumerate { .. } => "enumerate",
            Command::Events { .. } => "events",
            Command::Moments { .. } => "moments",
            Command::BijectionCheck { .. } => "bijection-check",
            Command::Tail { .. } => "tail",
            Command::TailSlope { .. } => "tail-slope",
            Command::Limsup { .. } => "limsup",
            Command::Sites { .. } => "sites",
            Command::Biased { .. } => "biased",
        }
    }

    fn stochastic(&self) -> bool {
        match self {
            Command::Expect { route, .. } => *route == Route::MonteCarlo,
            Command::Tail { .. }
            | Command::TailSlope { .. }
            | Command::Limsup { .. }
            | Command::Sites { .. }
            | Command::Biased { .. } => true,
            _ => false,
        }
    }
}

fn exact_cells(r: &ExactRational) -> (Cell, Cell) {
    (r.into(), r.to_f64().into())
}

fn expect_rows(rep: &mut Report, n: u64, route: Route, all: bool) -> Result<()> {
    if n < 1 {
        return precondition("expect", "n must be >= 1");
    }
    let ns: Vec<u64> = if all { (1..=n).collect() } else { vec![n] };
    let mut rec = AlphaExpectationRecursion::new();
    for m in ns {
        let recursion = if matches!(route, Route::Recursion | Route::Both) {
            while rec.n() < m {
                rec.advance();
            }
            Some(rec.value())
        } else {
            None
        };
        let ladder = if matches!(route, Route::Ladder | Route::Both) {
            Some(expectation_alpha_ladder(m)?)
        } else {
            None
        };
        let agree = match (&recursion, &ladder) {
            (Some(a), Some(b)) => Cell::Bool(a == b),
            _ => Cell::Null,
        };
        for (name, v) in [("recursion", recursion), ("ladder", ladder)] {
            if let Some(v) = v {
                let (e, f) = exact_cells(&v);
                rep.push(vec![m.into(), name.into(), e, f, Cell::Null, agree.clone()]);
            }
        }
    }
    Ok(())
}

fn enumerate_report(n: u32, stat: Stat, k: u64, threshold: f64, cap: u32) -> Result<Report> {
    let cfg = EnumConfig::with_cap(cap)?;
    let summary = enumerate_paths(n, &cfg)?;
    let mut rep = Report::new("enumerate", &["n", "stat", "key", "exact", "value"]);
    rep.meta("paths", 1u64 << n);
    let mut push = |stat: &str, key: Cell, r: &ExactRational| {
        let (e, f) = exact_cells(r);
        rep.push(vec![n.into(), stat.into(), key, e, f]);
    };
    match stat {
        Stat::AlphaDist => {
            for (alpha, p) in summary.distribution_alpha() {
                push("alpha_dist", alpha.into(), &p);
            }
        }
        Stat::MeanAlpha => push("mean_alpha", Cell::Null, &summary.expectation_alpha()),
        Stat::MeanF1 => push("mean_f1", Cell::Null, &summary.expectation_f1()),
        Stat::Moment => {
            if k < 1 {
                return precondition("enumerate", "k must be >= 1");
            }
            push("moment_alpha", k.into(), &summary.moment_alpha_k(k));
            push("moment_alpha_plus", k.into(), &summary.moment_alpha_plus_k(k));
            push("moment_alpha_minus", k.into(), &summary.moment_alpha_minus_k(k));
        }
        Stat::Tail => push("tail_alpha", threshold.into(), &summary.tail_alpha(threshold)),
    }
    Ok(rep)
}

fn events_report(t: u64, through: bool, verify: bool, convergence: bool) -> Result<Report> {
    if convergence {
        let conv = convergence_report(t)?;
        let mut rep = Report::new(
            "events",
            &["t", "t_p_c2", "sqrt_t_p_d1", "sqrt_t_p_d2", "t_p_c1", "exact"],
        );
        rep.meta("view", "convergence");
        let names = ["limit_t_p_c2", "limit_sqrt_t_p_d1", "limit_sqrt_t_p_d2", "limit_t_p_c1"];
        for (name, v) in names.iter().zip(conv.limits) {
            rep.meta(name, v);
        }
        for r in conv.rows {
            rep.push(vec![
                r.t.into(),
                r.t_p_c2.into(),
                r.sqrt_t_p_d1.into(),
                r.sqrt_t_p_d2.into(),
                r.t_p_c1.into(),
                r.exact.into(),
            ]);
        }
        return Ok(rep);
    }
    if t < 1 {
        return precondition("events", "t must be >= 1");
    }
    if verify && t > crate::enumerate::DEFAULT_CAP as u64 {
        return precondition(
            "events",
            format!("--verify needs t <= {}", crate::enumerate::DEFAULT_CAP),
        );
    }
    let mut rep = Report::new("events", &["t", "event", "exact", "value", "enum_exact", "agree"]);
    rep.meta("view", "probabilities");
    let ts: Vec<u64> = if through { (1..=t).collect() } else { vec![t] };
    for t in ts {
        let rows: [(&str, ExactRational, EventSpec); 4] = [
            ("C1", prob_c1(t)?, EventSpec::C1 { t }),
            ("C2", prob_c2(t)?, EventSpec::C2 { t }),
            ("D1", prob_d1(t), EventSpec::D1 { t }),
            ("D2_gap", prob_d2(t)?, EventSpec::D2 { r: 0, t }),
        ];
        for (name, p, spec) in rows {
            let (e, f) = exact_cells(&p);
            let (enum_cell, agree) = if verify {
                let q = enum_event_probability_with(&spec, t as u32, &EnumConfig::default())?;
                (Cell::from(&q), Cell::Bool(q == p))
            } else {
                (Cell::Null, Cell::Null)
            };
            rep.push(vec![t.into(), name.into(), e, f, enum_cell, agree]);
        }
    }
    Ok(rep)
}

#[allow(clippy::too_many_arguments)]
fn moments_report(
    n: u64,
    k: u64,
    side: Side,
    mode: Mode,
    verify: bool,
    growth: bool,
    n_list: &[u64],
    a: f64,
    epsilon: f64,
) -> Result<Report> {
    if growth {
        let g = lemma_growth_report(n_list, a, epsilon)?;
        let mut rep = Report::new(
            "moments",
            &["n", "k", "moment", "lower", "upper", "ratio", "in_band"],
        );
        rep.meta("view", "growth").meta("a", a).meta("epsilon", epsilon);
        for r in g.rows {
            rep.push(vec![
                r.n.into(),
                r.k.into(),
                r.moment.into(),
                r.lower.into(),
                r.upper.into(),
                r.ratio.into(),
                r.in_band.into(),
            ]);
        }
        return Ok(rep);
    }
    let req = MomentRequest {
        n,
        k,
        mode: match mode {
            Mode::Exact => MomentMode::Exact,
            Mode::Floating => MomentMode::Floating,
        },
    };
    let value = match side {
        Side::Plus => req.alpha_k_plus()?,
        Side::Full => req.alpha_k()?,
    };
    let exact = match &value {
        crate::moments::MomentValue::Exact(r) => Some(r.clone()),
        crate::moments::MomentValue::Floating(_) => None,
    };
    let (enum_cell, agree) = if verify {
        if n > crate::enumerate::DEFAULT_CAP as u64 {
            return precondition(
                "moments",
                format!("--verify needs n <= {}", crate::enumerate::DEFAULT_CAP),
            );
        }
        let s = enumerate_paths(n as u32, &EnumConfig::default())?;
        let q = match side {
            Side::Plus => s.moment_alpha_plus_k(k),
            Side::Full => s.moment_alpha_k(k),
        };
        let agree = match &exact {
            Some(r) => *r == q,
            None => (value.to_f64() - q.to_f64()).abs() <= 1e-9 * q.to_f64().max(1.0),
        };
        (Cell::from(&q), Cell::Bool(agree))
    } else {
        (Cell::Null, Cell::Null)
    };
    let mut rep = Report::new(
        "moments",
        &["n", "k", "side", "mode", "exact", "value", "enum_exact", "agree"],
    );
    rep.meta("view", "moment");
    rep.push(vec![
        n.into(),
        k.into(),
        match side {
            Side::Plus => "plus",
            Side::Full => "full",
        }
        .into(),
        match mode {
            Mode::Exact => "exact",
            Mode::Floating => "floating",
        }
        .into(),
        exact.as_ref().into(),
        value.to_f64().into(),
        enum_cell,
        agree,
    ]);
    Ok(rep)
}

fn bijection_report(n_plus_1: u32) -> Result<(Report, bool)> {
    let b = verify_injection_sets(n_plus_1)?;
    let mut rep = Report::new("bijection-check", &["length", "claim", "counts", "pass"]);
    rep.meta("n_plus_1", n_plus_1).meta("all_pass", b.all_pass);
    for c in b.claims {
        let counts: Vec<String> = c.counts.iter().map(|(k, v)| format!("{k}={v}")).collect();
        rep.push(vec![c.length.into(), c.name.into(), counts.join(";").into(), c.pass.into()]);
    }
    Ok((rep, b.all_pass))
}

fn stochastic_report(cmd: &Command, seed: u64) -> Result<Report> {
    match *cmd {
        Command::Expect { n, replicas, .. } => {
            let e = estimate_expectation(n, replicas, seed)?;
            let mut rep = expect_header();
            rep.meta("replicas", replicas);
            rep.push(vec![
                n.into(),
                "monte_carlo".into(),
                Cell::Null,
                e.mean.into(),
                e.std_error.into(),
                Cell::Null,
            ]);
            Ok(rep)
        }
        Command::Tail { n, a, replicas } => {
            let t = estimate_tail(n, a, replicas, seed)?;
            let mut rep = Report::new(
                "tail",
                &["n", "a", "threshold", "hits", "replicas", "p_hat", "ci_low", "ci_high"],
            );
            rep.meta("replicas", replicas).meta("log_base", "e").meta("confidence", 0.95);
            rep.push(vec![
                t.n.into(),
                t.a.into(),
                t.threshold.into(),
                t.hits.into(),
                t.replicas.into(),
                t.p_hat.into(),
                t.ci_low.into(),
                t.ci_high.into(),
            ]);
            Ok(rep)
        }
        Command::TailSlope {
            ref n_grid,
            a,
            replicas,
        } => {
            let s = tail_slope_report(n_grid, a, replicas, seed)?;
            let mut rep = Report::new(
                "tail-slope",
                &[
                    "n", "threshold", "hits", "replicas", "p_hat", "ci_low", "ci_high",
                    "log_ratio", "flagged",
                ],
            );
            rep.meta("replicas", replicas)
                .meta("a", a)
                .meta("log_base", "e")
                .meta("target_slope", s.target_slope)
                .meta("fitted_slope", s.fitted_slope.map_or(Value::Null, Value::from));
            for r in s.rows {
                rep.push(vec![
                    r.tail.n.into(),
                    r.tail.threshold.into(),
                    r.tail.hits.into(),
                    r.tail.replicas.into(),
                    r.tail.p_hat.into(),
                    r.tail.ci_low.into(),
                    r.tail.ci_high.into(),
                    r.log_ratio.into(),
                    r.flagged.into(),
                ]);
            }
            Ok(rep)
        }
        Command::Limsup {
            horizon,
            n_min,
            replicas,
        } => {
            let p = limsup_probe(horizon, n_min, replicas, seed)?;
            let mut rep = Report::new("limsup", &["kind", "key", "value", "at_n"]);
            rep.meta("replicas", replicas)
                .meta("horizon", horizon)
                .meta("n_min", n_min)
                .meta("log_base", "e")
                .meta("reference_bracket", vec![p.bracket.0, p.bracket.1]);
            for (i, (m, at)) in p.maxima.iter().zip(&p.argmax).enumerate() {
                rep.push(vec!["replica".into(), (i as u64).into(), (*m).into(), (*at).into()]);
            }
            for (q, v) in p.quantiles {
                rep.push(vec!["quantile".into(), q.into(), v.into(), Cell::Null]);
            }
            Ok(rep)
        }
        Command::Sites { n, replicas } => {
            let e = estimate_sites_once(n, replicas, seed)?;
            let exact = if n <= 20 {
                Some(enumerate_paths(n as u32, &EnumConfig::default())?.expectation_f1())
            } else {
                None
            };
            let mut rep = Report::new(
                "sites",
                &["n", "replicas", "mean_f1", "std_error", "enum_exact"],
            );
            rep.meta("replicas", replicas);
            rep.push(vec![
                n.into(),
                replicas.into(),
                e.mean.into(),
                e.std_error.into(),
                exact.as_ref().into(),
            ]);
            Ok(rep)
        }
        Command::Biased { n, p, a, replicas } => {
            let s = biased_walk_summary(n, p, a, replicas, seed)?;
            let mut rep = Report::new(
                "biased",
                &[
                    "n", "p", "replicas", "mean_alpha", "std_error", "ci_low", "ci_high",
                    "mean_alpha_plus", "mean_alpha_minus", "frac_plus_side", "frac_minus_side",
                    "tail_threshold", "tail_hits", "tail_p_hat", "tail_ci_low", "tail_ci_high",
                ],
            );
            rep.meta("replicas", replicas).meta("exploratory", true).meta("a", a);
            rep.push(vec![
                n.into(),
                p.into(),
                replicas.into(),
                s.mean_alpha.into(),
                s.std_error.into(),
                s.ci_low.into(),
                s.ci_high.into(),
                s.mean_alpha_plus.into(),
                s.mean_alpha_minus.into(),
                s.frac_plus_side.into(),
                s.frac_minus_side.into(),
                s.tail.threshold.into(),
                s.tail.hits.into(),
                s.tail.p_hat.into(),
                s.tail.ci_low.into(),
                s.tail.ci_high.into(),
            ]);
            Ok(rep)
        }
        _ => unreachable!("not a stochastic command"),
    }
}

fn expect_header() -> Report {
    Report::new("expect", &["n", "route", "exact", "value", "std_error", "agree"])
}

/// Builds the report for a parsed command. Returns the report and whether
/// the run succeeded (a failed certification still emits its report).
fn build(cmd: &Command, seed: Option<u64>) -> Result<(Report, bool)> {
    if cmd.stochastic() {
        let seed = seed.expect("seed resolved before dispatch");
        return Ok((stochastic_report(cmd, seed)?, true));
    }
    let rep = match *cmd {
        Command::Expect { n, route, all, .. } => {
            let mut rep = expect_header();
            expect_rows(&mut rep, n, route, all)?;
            rep
        }
        Command::Enumerate {
            n,
            stat,
            k,
            threshold,
            cap,
        } => enumerate_report(n, stat, k, threshold, cap)?,
        Command::Events {
            t,
            through,
            verify,
            convergence,
        } => events_report(t, through, verify, convergence)?,
        Command::Moments {
            n,
            k,
            side,
            mode,
            verify,
            growth,
            ref n_list,
            a,
            epsilon,
        } => moments_report(n, k, side, mode, verify, growth, n_list, a, epsilon)?,
        Command::BijectionCheck { n_plus_1 } => return bijection_report(n_plus_1),
        _ => unreachable!("stochastic commands handled above"),
    };
    Ok((rep, true))
}

fn output_path(common: &Common, cmd: &Command) -> Option<PathBuf> {
    let dir = std::env::var_os(ENV_OUT_DIR).map(PathBuf::from);
    let ext = match common.format {
        Format::Csv => "csv",
        Format::Json => "json",
    };
    match (&common.out, dir) {
        (Some(p), Some(d)) if p.is_relative() => Some(d.join(p)),
        (Some(p), _) => Some(p.clone()),
        (None, Some(d)) => Some(d.join(format!("{}.{ext}", cmd.name()))),
        (None, None) => None,
    }
}

fn unix_time() -> u64 {
    std::time::SystemTime::now()
        .duration_since(std::time::UNIX_EPOCH)
        .map_or(0, |d| d.as_secs())
}

/// Parses `args` (program name first), runs the command and writes the
/// report. Returns the process exit code: 0 success, 1 failed certification
/// or I/O error, 2 usage or precondition error.
pub fn run<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let text = e.render().to_string();
            let sink: &mut dyn Write = if e.use_stderr() { stderr } else { stdout };
            let _ = sink.write_all(text.as_bytes());
            return code;
        }
    };
    let common = &cli.common;
    let seed = if cli.command.stochastic() {
        Some(common.seed.unwrap_or_else(|| {
            let s = entropy_seed();
            let _ = writeln!(stderr, "note: no --seed given; drew seed {s}");
            s
        }))
    } else {
        None
    };
    let pool = match rayon::ThreadPoolBuilder::new()
        .num_threads(common.threads.unwrap_or(0))
        .build()
    {
        Ok(p) => p,
        Err(e) => {
            let _ = writeln!(stderr, "error: cannot start worker pool: {e}");
            return 1;
        }
    };
    log::info!("running {} on {} threads", cli.command.name(), pool.current_num_threads());
    let built = pool.install(|| build(&cli.command, seed));
    let (mut rep, ok) = match built {
        Ok(r) => r,
        Err(e @ (Error::Precondition { .. } | Error::Refused { .. })) => {
            let _ = writeln!(stderr, "error: {e}");
            return 2;
        }
        Err(e) => {
            let _ = writeln!(stderr, "error: {e}");
            return 1;
        }
    };
    if let Some(s) = seed {
        let source = if common.seed.is_some() { "argument" } else { "entropy" };
        rep.meta("seed", s).meta("seed_source", source);
    }
    rep.meta("threads", pool.current_num_threads() as u64)
        .meta("generated_unix", unix_time());
    let text = rep.render(common.format);
    let written = match output_path(common, &cli.command) {
        Some(path) => std::fs::write(&path, text).map(|_| {
            let _ = writeln!(stderr, "wrote {}", path.display());
        }),
        None => stdout.write_all(text.as_bytes()),
    };
    if let Err(e) = written {
        let _ = writeln!(stderr, "error: {e}");
        return 1;
    }
    if !ok {
        let _ = writeln!(stderr, "error: certification failed; see report");
        return 1;
    }
    0
}
