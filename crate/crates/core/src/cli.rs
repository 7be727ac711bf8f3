//! Command-line front end.
//!
//! Exit codes: `0` success or a clean report, `1` violations found (or an
//! unresolved classification), `2` usage or input error.

use std::fmt::Display;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::de::DeserializeOwned;
use serde::Serialize;

use crate::context::{
    classify_algebra, dynamics_unitary_ambient, third_context_witness, AlgebraClass, Context,
};
use crate::effect::{Effect, Model, State};
use crate::error::{Error, Result};
use crate::harness::algebra::{Algebra, Fault};
use crate::harness::generate::random_context;
use crate::harness::rng::{stream_id, CounterRng};
use crate::harness::{emit_report, run_suite, ReportFormat, Suite};
use crate::sequential::{conditional_expectation, conditional_probability, seq_product, Measurement};

const DEFAULT_SEED: u64 = 42;

#[derive(Debug, Parser)]
#[command(name = "effectalg", version, about = "Convex sequential effect algebras: products, conditioning, contexts and law checks")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum ModelArg {
    Classical,
    Hilbert,
}

impl ModelArg {
    fn with_dim(self, dim: usize) -> Result<Model> {
        let name = match self {
            ModelArg::Classical => "classical",
            ModelArg::Hilbert => "hilbert",
        };
        Model::parse(name, dim)
    }
}

#[derive(Debug, Args)]
struct ModelOpts {
    #[arg(long, value_enum, default_value = "hilbert")]
    model: ModelArg,
    /// Dimension `d` (hilbert) or number of outcomes `n` (classical).
    #[arg(long, default_value_t = 2)]
    dim: usize,
    /// Defaults to `$EFFECTALG_SEED`, then 42.
    #[arg(long)]
    seed: Option<u64>,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Run a suite of randomized law checks.
    Check {
        #[command(flatten)]
        opts: ModelOpts,
        #[arg(long, default_value_t = 1000)]
        trials: u64,
        /// Axiom tolerance.
        #[arg(long)]
        tol: Option<f64>,
        #[arg(long, default_value = "all")]
        suite: String,
        /// Write the JSON report here.
        #[arg(long)]
        json: Option<PathBuf>,
        /// Inject a fault: clipped-sum, symmetrized-product, raw-product or unnormalized-context.
        #[arg(long)]
        fault: Option<String>,
    },
    /// Sequential product `a∘b`.
    Seqprod {
        #[arg(long)]
        a: PathBuf,
        #[arg(long)]
        b: PathBuf,
    },
    /// Conditional expectation of `b` given a sharp measurement.
    Condexp {
        #[arg(long)]
        state: PathBuf,
        #[arg(long)]
        b: PathBuf,
        #[arg(long)]
        measurement: PathBuf,
    },
    /// Conditional probability `ω(b|a)`.
    Condprob {
        #[arg(long)]
        state: PathBuf,
        #[arg(long)]
        a: PathBuf,
        #[arg(long)]
        b: PathBuf,
    },
    /// Classify a model from sampled evidence.
    Classify {
        #[command(flatten)]
        opts: ModelOpts,
        /// Sample budget.
        #[arg(long, default_value_t = 200)]
        trials: usize,
    },
    /// Third context from two disjoint ones, read from files or drawn at random.
    Witness {
        #[command(flatten)]
        opts: ModelOpts,
        #[arg(long, requires = "b")]
        a: Option<PathBuf>,
        #[arg(long, requires = "a")]
        b: Option<PathBuf>,
    },
    /// Unitary `Σ_j e^{iθ_j t} a_j` generated by a context.
    Dynamics {
        #[command(flatten)]
        opts: ModelOpts,
        /// Context file; the standard basis otherwise.
        #[arg(long)]
        a: Option<PathBuf>,
        /// Comma-separated angles, one per atom; random otherwise.
        #[arg(long, value_delimiter = ',', allow_negative_numbers = true)]
        theta: Vec<f64>,
        #[arg(long, default_value_t = 1.0, allow_negative_numbers = true)]
        time: f64,
    },
}

enum Failure {
    Usage(String),
    Violations,
}

impl<E: Display> From<E> for Failure
where
    E: Into<Error>,
{
    fn from(e: E) -> Self {
        Failure::Usage(e.to_string())
    }
}

fn seed_or_env(seed: Option<u64>) -> std::result::Result<u64, Failure> {
    if let Some(s) = seed {
        return Ok(s);
    }
    match std::env::var("EFFECTALG_SEED") {
        Ok(v) => v
            .trim()
            .parse()
            .map_err(|_| Failure::Usage(format!("EFFECTALG_SEED `{v}` is not an unsigned integer"))),
        Err(_) => Ok(DEFAULT_SEED),
    }
}

fn read_json<T: DeserializeOwned>(path: &Path) -> std::result::Result<T, Failure> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Failure::Usage(format!("{}: {e}", path.display())))?;
    serde_json::from_str(&text).map_err(|e| Failure::Usage(format!("{}: {e}", path.display())))
}

fn print_json<T: Serialize>(out: &mut dyn Write, value: &T) -> std::result::Result<(), Failure> {
    let text = serde_json::to_string_pretty(value).map_err(Error::from)?;
    writeln!(out, "{text}").map_err(Error::from)?;
    Ok(())
}

fn run(cli: Cli, out: &mut dyn Write) -> std::result::Result<(), Failure> {
    match cli.command {
        Command::Check { opts, trials, tol, suite, json, fault } => {
            let model = opts.model.with_dim(opts.dim)?;
            let seed = seed_or_env(opts.seed)?;
            let suite = Suite::parse(&suite)?;
            if let Some(t) = tol {
                if !(t.is_finite() && t > 0.0) {
                    return Err(Failure::Usage(format!("tolerance {t} must be positive")));
                }
            }
            let alg = match fault {
                None => Algebra::new(model),
                Some(name) => Algebra::with_fault(
                    model,
                    Fault::parse(&name).ok_or_else(|| Failure::Usage(format!("unknown fault `{name}`")))?,
                ),
            };
            let report = run_suite(suite, &alg, trials, seed, tol);
            if let Some(path) = json {
                emit_report(&report, &path, ReportFormat::Json)?;
            }
            write!(out, "{}", report.to_text()).map_err(Error::from)?;
            if report.is_clean() {
                Ok(())
            } else {
                Err(Failure::Violations)
            }
        }
        Command::Seqprod { a, b } => {
            let a: Effect = read_json(&a)?;
            let b: Effect = read_json(&b)?;
            print_json(out, &seq_product(&a, &b)?)
        }
        Command::Condexp { state, b, measurement } => {
            let omega: State = read_json(&state)?;
            let b: Effect = read_json(&b)?;
            let m: Measurement = read_json(&measurement)?;
            print_json(out, &conditional_expectation(&omega, &b, &m)?)
        }
        Command::Condprob { state, a, b } => {
            let omega: State = read_json(&state)?;
            let a: Effect = read_json(&a)?;
            let b: Effect = read_json(&b)?;
            let p = conditional_probability(&omega, &a, &b)?;
            print_json(out, &serde_json::json!({ "probability": p }))
        }
        Command::Classify { opts, trials } => {
            let model = opts.model.with_dim(opts.dim)?;
            let c = classify_algebra(model, trials, seed_or_env(opts.seed)?);
            print_json(out, &c)?;
            if c.class == AlgebraClass::Unresolved {
                return Err(Failure::Violations);
            }
            Ok(())
        }
        Command::Witness { opts, a, b } => {
            let (ca, cb): (Context, Context) = match (a, b) {
                (Some(a), Some(b)) => (read_json(&a)?, read_json(&b)?),
                _ => {
                    let model = opts.model.with_dim(opts.dim)?;
                    let mut rng = CounterRng::new(seed_or_env(opts.seed)?, stream_id("witness"));
                    (random_context(model, &mut rng), random_context(model, &mut rng))
                }
            };
            print_json(out, &third_context_witness(&ca, &cb)?)
        }
        Command::Dynamics { opts, a, theta, time } => {
            let ctx: Context = match a {
                Some(path) => read_json(&path)?,
                None => Context::standard(opts.model.with_dim(opts.dim)?),
            };
            let theta = if theta.is_empty() {
                let mut rng = CounterRng::new(seed_or_env(opts.seed)?, stream_id("dynamics"));
                (0..ctx.len())
                    .map(|_| rng.uniform(-std::f64::consts::PI, std::f64::consts::PI))
                    .collect()
            } else {
                theta
            };
            let u = dynamics_unitary_ambient(&ctx, &theta, time)?;
            print_json(
                out,
                &serde_json::json!({
                    "theta": theta,
                    "time": time,
                    "unitary": u,
                    "unitarity_defect": u.unitarity_defect(),
                }),
            )
        }
    }
}

/// Parses `args` (program name first), runs the command and returns the exit code.
pub fn cli_main<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let text = e.render().to_string();
            if e.use_stderr() {
                let _ = write!(err, "{text}");
                return 2;
            }
            let _ = write!(out, "{text}");
            return 0;
        }
    };
    match run(cli, out) {
        Ok(()) => 0,
        Err(Failure::Violations) => 1,
        Err(Failure::Usage(msg)) => {
            let _ = writeln!(err, "error: {msg}");
            2
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn call(args: &[&str]) -> (i32, String, String) {
        let mut out = Vec::new();
        let mut err = Vec::new();
        let argv = std::iter::once("effectalg").chain(args.iter().copied());
        let code = cli_main(argv, &mut out, &mut err);
        (code, String::from_utf8(out).unwrap(), String::from_utf8(err).unwrap())
    }

    #[test]
    fn usage_errors_exit_two() {
        assert_eq!(call(&["check", "--model", "bogus"]).0, 2);
        assert_eq!(call(&["check", "--suite", "nope", "--trials", "1"]).0, 2);
        assert_eq!(call(&["check", "--fault", "nope", "--trials", "1"]).0, 2);
        assert_eq!(call(&["frobnicate"]).0, 2);
        assert_eq!(call(&["seqprod", "--a", "/nonexistent", "--b", "/nonexistent"]).0, 2);
    }

    #[test]
    fn help_exits_zero() {
        let (code, out, _) = call(&["--help"]);
        assert_eq!(code, 0);
        assert!(out.contains("check"));
    }

    #[test]
    fn dynamics_prints_a_unitary() {
        let (code, out, err) = call(&["dynamics", "--dim", "3", "--theta", "0.5,-1,2", "--time", "0.3"]);
        assert_eq!(code, 0, "{err}");
        let v: serde_json::Value = serde_json::from_str(&out).unwrap();
        assert!(v["unitarity_defect"].as_f64().unwrap() < 1e-12);
    }

    #[test]
    fn classify_trivial() {
        let (code, out, _) = call(&["classify", "--model", "classical", "--dim", "1"]);
        assert_eq!(code, 0);
        assert!(out.contains("trivial"));
    }
}
