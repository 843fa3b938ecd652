//! The `nullcover` command line.
//!
//! Exit codes: 0 success, 1 usage, 2 bad input, 3 budget exceeded,
//! 4 verification failure.

use std::ffi::OsString;
use std::fmt::Write as _;
use std::io::{Read, Write};
use std::path::{Path, PathBuf};
use std::time::Duration;

use clap::{Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::json;

use crate::bounds::{
    full_report, near_zero_bound_from, near_zero_points, prime_rank_prob_bound, table_bounds, NearZeroMode,
};
use crate::budget::Budget;
use crate::cube::ZeroMatrix;
use crate::dnf::{minimize, verify_dnf, Objective, SolveMode, Verification};
use crate::ensemble::{
    concentration_stats, prime_rank_frequency, rank_profile, run_layer_experiment, run_length_experiment,
    EnsembleConfig,
};
use crate::error::Error;
use crate::implicant::{enumerate_primes_with, rank_histogram};
use crate::io::report::{self, fmt_histogram, fmt_real};
use crate::io::{emit_pla, emit_zero_matrix, parse_nelson_cnf, parse_pla, parse_zero_matrix, DEFAULT_EXPANSION_CAP};

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 1;
pub const EXIT_INPUT: i32 = 2;
pub const EXIT_BUDGET: i32 = 3;
pub const EXIT_VERIFY: i32 = 4;

#[derive(Parser, Debug)]
#[command(name = "nullcover", version, about = "DNF minimization for Boolean functions given by their zeros")]
struct Cli {
    /// Master seed for experiments.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// Wall-clock budget per expensive step, in milliseconds.
    #[arg(long, global = true, env = "NULLCOVER_BUDGET_MS")]
    budget_ms: Option<u64>,
    #[arg(long, global = true, value_enum, default_value_t = Format::Csv)]
    format: Format,
    /// Worker threads for experiments (default: all cores).
    #[arg(long, global = true)]
    threads: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Format {
    Csv,
    Jsonl,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// List the prime implicants as PLA, with their rank histogram.
    Primes { input: PathBuf },
    /// Shortest (length) or minimal (rank) DNF as PLA.
    Minimize {
        #[arg(long, value_enum, default_value_t = ObjectiveArg::Length)]
        objective: ObjectiveArg,
        #[arg(long, value_enum, default_value_t = ModeArg::Exact)]
        mode: ModeArg,
        input: PathBuf,
    },
    /// Known length bounds at (n, k).
    Bounds {
        #[arg(long)]
        n: u64,
        #[arg(long)]
        k: u64,
        /// Slack constants for the prime-rank window; either one adds the
        /// extra rows.
        #[arg(long)]
        c1: Option<f64>,
        #[arg(long)]
        c2: Option<f64>,
    },
    /// Near-zero points and the lower bounds they give.
    Theta { input: PathBuf },
    /// Convert a DIMACS CNF into a zero-matrix file.
    Nelson {
        input: PathBuf,
        #[arg(long, default_value_t = DEFAULT_EXPANSION_CAP)]
        cap: usize,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Random-function experiments.
    Experiment {
        #[arg(value_enum)]
        kind: ExperimentKind,
        #[arg(long)]
        n: usize,
        #[arg(long, default_value_t = 1)]
        k: usize,
        #[arg(long, default_value_t = 100)]
        samples: usize,
        /// Layer weight (default: middle layer).
        #[arg(long)]
        w: Option<usize>,
        /// Draw only functions without adjacent zeros.
        #[arg(long)]
        no_adjacent: bool,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Check that a PLA realizes the function.
    Verify { input: PathBuf, dnf: PathBuf },
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum ObjectiveArg {
    Length,
    Rank,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum ModeArg {
    Exact,
    Greedy,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum ExperimentKind {
    RankProb,
    Length,
    Concentration,
    Layer,
}

enum Failure {
    Usage(String),
    Input(String),
    Budget(String),
    Verify(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        if e.is_budget() {
            Failure::Budget(e.to_string())
        } else {
            Failure::Input(e.to_string())
        }
    }
}

type Out = std::result::Result<String, Failure>;

/// Runs the command line with `args` (program name first).
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    run_with(args, &mut std::io::stdout().lock(), &mut std::io::stderr().lock())
}

pub fn run_with<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let text = e.render().to_string();
            let _ = if code == EXIT_OK {
                stdout.write_all(text.as_bytes())
            } else {
                stderr.write_all(text.as_bytes())
            };
            return code;
        }
    };
    let result = match cli.threads {
        Some(t) => match rayon::ThreadPoolBuilder::new().num_threads(t).build() {
            Ok(pool) => pool.install(|| dispatch(&cli)),
            Err(e) => Err(Failure::Usage(e.to_string())),
        },
        None => dispatch(&cli),
    };
    match result {
        Ok(text) => {
            if stdout.write_all(text.as_bytes()).is_err() {
                return EXIT_INPUT;
            }
            EXIT_OK
        }
        Err(f) => {
            let (code, msg, to_stdout) = match f {
                Failure::Usage(m) => (EXIT_USAGE, m, false),
                Failure::Input(m) => (EXIT_INPUT, m, false),
                Failure::Budget(m) => (EXIT_BUDGET, m, false),
                Failure::Verify(m) => (EXIT_VERIFY, m, true),
            };
            let _ = if to_stdout {
                writeln!(stdout, "{msg}")
            } else {
                writeln!(stderr, "nullcover: {msg}")
            };
            code
        }
    }
}

fn read_input(path: &Path) -> std::result::Result<String, Failure> {
    let mut text = String::new();
    let res = if path == Path::new("-") {
        std::io::stdin().read_to_string(&mut text).map(|_| ())
    } else {
        std::fs::read_to_string(path).map(|t| text = t)
    };
    res.map_err(|e| Failure::Input(format!("{}: {e}", path.display())))?;
    Ok(text)
}

fn read_matrix(path: &Path) -> std::result::Result<ZeroMatrix, Failure> {
    parse_zero_matrix(&read_input(path)?).map_err(|e| Failure::Input(format!("{}: {e}", path.display())))
}

fn budget(cli: &Cli) -> Budget {
    Budget::default().with_time_limit(cli.budget_ms.map(Duration::from_millis))
}

fn jsonl<T: Serialize>(v: &T) -> String {
    report::to_jsonl(std::slice::from_ref(v))
}

fn dispatch(cli: &Cli) -> Out {
    match &cli.command {
        Command::Primes { input } => primes(cli, input),
        Command::Minimize {
            objective,
            mode,
            input,
        } => minimize_cmd(cli, *objective, *mode, input),
        Command::Bounds { n, k, c1, c2 } => {
            let report = if c1.is_some() || c2.is_some() {
                full_report(*n, *k, c1.unwrap_or(0.0), c2.unwrap_or(0.0))?
            } else {
                table_bounds(*n, *k)?
            };
            Ok(match cli.format {
                Format::Csv => report::bounds_csv(&report),
                Format::Jsonl => report::to_jsonl(&report.entries),
            })
        }
        Command::Theta { input } => theta(cli, input),
        Command::Nelson { input, cap, out } => {
            let m = parse_nelson_cnf(&read_input(input)?, *cap)
                .map_err(|e| Failure::from(e).with_path(input))?;
            emit(out.as_deref(), emit_zero_matrix(&m))
        }
        Command::Experiment {
            kind,
            n,
            k,
            samples,
            w,
            no_adjacent,
            out,
        } => {
            let mut cfg = EnsembleConfig::new(*n, *k, *samples, cli.seed);
            cfg.filter_no_adjacent_zeros = *no_adjacent;
            cfg.budget = budget(cli);
            let text = match kind {
                ExperimentKind::RankProb => rank_prob(cli, &cfg)?,
                ExperimentKind::Length => {
                    let run = run_length_experiment(&cfg)?;
                    match cli.format {
                        Format::Csv => report::length_csv(&run),
                        Format::Jsonl => report::to_jsonl(&run.records),
                    }
                }
                ExperimentKind::Concentration => concentration(cli, &cfg)?,
                ExperimentKind::Layer => {
                    let rec = run_layer_experiment(*n, w.unwrap_or(*n / 2), &cfg.budget)?;
                    match cli.format {
                        Format::Csv => report::layer_csv(std::slice::from_ref(&rec)),
                        Format::Jsonl => jsonl(&rec),
                    }
                }
            };
            emit(out.as_deref(), text)
        }
        Command::Verify { input, dnf } => {
            let m = read_matrix(input)?;
            let d = parse_pla(&read_input(dnf)?).map_err(|e| Failure::Input(format!("{}: {e}", dnf.display())))?;
            match verify_dnf(&m, &d)? {
                Verification::Valid => Ok("valid\n".into()),
                Verification::MissedOne(p) => Err(Failure::Verify(format!("missed-one {p}"))),
                Verification::CoversZero { cube, row } => Err(Failure::Verify(format!(
                    "covers-zero cube {cube} ({}) row {row} ({})",
                    d.cubes()[cube],
                    m.row(row)
                ))),
            }
        }
    }
}

impl Failure {
    fn with_path(self, path: &Path) -> Self {
        match self {
            Failure::Input(m) => Failure::Input(format!("{}: {m}", path.display())),
            other => other,
        }
    }
}

/// Writes to `out` if given (returning nothing to print), else returns the
/// text.
fn emit(out: Option<&Path>, text: String) -> Out {
    match out {
        Some(p) => {
            std::fs::write(p, text).map_err(|e| Failure::Input(format!("{}: {e}", p.display())))?;
            Ok(String::new())
        }
        None => Ok(text),
    }
}

fn primes(cli: &Cli, input: &Path) -> Out {
    let m = read_matrix(input)?;
    let primes = enumerate_primes_with(&m, &budget(cli))?;
    let hist = rank_histogram(&primes);
    Ok(match cli.format {
        Format::Csv => {
            let dnf = crate::cube::Dnf::new(m.n(), primes.primes().to_vec())?;
            format!("# rank histogram {}\n{}", fmt_histogram(&hist), emit_pla(&dnf))
        }
        Format::Jsonl => jsonl(&json!({
            "n": m.n(),
            "k": m.k(),
            "primes": primes.iter().map(|c| c.to_string()).collect::<Vec<_>>(),
            "rank_histogram": hist,
        })),
    })
}

fn minimize_cmd(cli: &Cli, objective: ObjectiveArg, mode: ModeArg, input: &Path) -> Out {
    let m = read_matrix(input)?;
    let objective = match objective {
        ObjectiveArg::Length => Objective::Length,
        ObjectiveArg::Rank => Objective::Rank,
    };
    let mode = match mode {
        ModeArg::Exact => SolveMode::Exact,
        ModeArg::Greedy => SolveMode::Greedy,
    };
    let r = minimize(&m, objective, mode, &budget(cli))?;
    let c = &r.certificate;
    let lp = num_traits::ToPrimitive::to_f64(&c.lp_bound).unwrap_or(f64::NAN);
    let pla = emit_pla(&r.dnf);
    Ok(match cli.format {
        Format::Csv => {
            let mut s = String::new();
            let _ = writeln!(s, "# objective {}", report_label(objective));
            let _ = writeln!(s, "# value {}", r.value);
            let _ = writeln!(s, "# lp_bound {} ({})", c.lp_bound, fmt_real(lp));
            let _ = writeln!(s, "# near_zero_bound {}", c.near_zero_bound);
            let _ = writeln!(s, "# optimal {}", c.optimal);
            let _ = writeln!(s, "# fallback {}", c.fallback);
            s + &pla
        }
        Format::Jsonl => jsonl(&json!({
            "objective": objective,
            "mode": mode,
            "value": r.value,
            "lp_bound": c.lp_bound.to_string(),
            "lp_bound_f64": lp,
            "near_zero_bound": c.near_zero_bound,
            "optimal": c.optimal,
            "fallback": c.fallback,
            "pla": pla,
        })),
    })
}

fn report_label(o: Objective) -> &'static str {
    match o {
        Objective::Length => "length",
        Objective::Rank => "rank",
    }
}

fn theta(cli: &Cli, input: &Path) -> Out {
    let m = read_matrix(input)?;
    let b = budget(cli);
    let t = near_zero_points(&m);
    let primes = enumerate_primes_with(&m, &b)?;
    let counting = near_zero_bound_from(&m, &primes, NearZeroMode::Counting, &b)?;
    let exact = near_zero_bound_from(&m, &primes, NearZeroMode::ExactCover, &b)?;
    let strs = |v: &[crate::cube::Point]| v.iter().map(|p| p.to_string()).collect::<Vec<_>>();
    Ok(match cli.format {
        Format::Csv => {
            let mut s = String::new();
            for (name, set) in [("theta", &t.points), ("theta0", &t.theta0), ("theta1", &t.theta1)] {
                let _ = writeln!(s, "{name} {}", set.len());
                for p in set {
                    let _ = writeln!(s, "{p}");
                }
            }
            let _ = writeln!(s, "counting_bound {}", counting.value);
            let degraded = if exact.degraded { " degraded" } else { "" };
            let _ = writeln!(s, "exact_cover_bound {}{degraded}", exact.value);
            s
        }
        Format::Jsonl => jsonl(&json!({
            "theta": strs(&t.points),
            "theta0": strs(&t.theta0),
            "theta1": strs(&t.theta1),
            "counting_bound": counting.value,
            "exact_cover_bound": exact.value,
            "degraded": exact.degraded,
        })),
    })
}

fn rank_prob(cli: &Cli, cfg: &EnsembleConfig) -> std::result::Result<String, Failure> {
    let profile = rank_profile(cfg)?;
    let rows: Vec<_> = (0..=cfg.n)
        .map(|d| {
            let bound = prime_rank_prob_bound(cfg.n as u64, cfg.k as u64, d as u64).ok();
            (prime_rank_frequency(&profile, d), bound)
        })
        .collect();
    Ok(match cli.format {
        Format::Csv => report::rank_prob_csv(cfg.n, cfg.k, &rows),
        Format::Jsonl => {
            let objs: Vec<_> = rows
                .iter()
                .map(|(e, b)| json!({"n": cfg.n, "k": cfg.k, "estimate": e, "bound": b}))
                .collect();
            report::to_jsonl(&objs)
        }
    })
}

fn concentration(cli: &Cli, cfg: &EnsembleConfig) -> std::result::Result<String, Failure> {
    let run = run_length_experiment(cfg)?;
    let mut rows = Vec::new();
    let exact: Vec<u64> = run.records.iter().filter_map(|r| r.exact_length).collect();
    let greedy: Vec<u64> = run.records.iter().filter_map(|r| r.greedy_length).collect();
    for (name, v) in [("exact_length", exact), ("greedy_length", greedy)] {
        if !v.is_empty() {
            rows.push((name, concentration_stats(&v)?));
        }
    }
    Ok(match cli.format {
        Format::Csv => report::concentration_csv(cfg.n, cfg.k, &rows),
        Format::Jsonl => {
            let objs: Vec<_> = rows
                .iter()
                .map(|(m, c)| json!({"n": cfg.n, "k": cfg.k, "measure": m, "stats": c}))
                .collect();
            report::to_jsonl(&objs)
        }
    })
}
