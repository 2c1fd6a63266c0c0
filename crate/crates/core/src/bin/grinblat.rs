//! Command-line front end.
//!
//! Exit codes: 0 success or matched, 1 proven none or nothing found,
//! 2 error (including an invalid matching in `verify`), 64 usage error.

use std::io::{Read, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use grinblat::construct::{solve, ConstructOptions, DEFAULT_N_MIN, PROOF_CONSTANT};
use grinblat::experiment::{run_experiment, ExperimentConfig};
use grinblat::gen::{gen_lower_bound_family, gen_planted_concentrated, gen_random_hypothesis};
use grinblat::io::{parse_instance, parse_matching, write_instance, write_matching};
use grinblat::oracle::exact::{exact_solve, ExactOutcome};
use grinblat::oracle::search::{search_unmatchable, SearchParams};
use grinblat::{verify_matching, ConstructError, Instance};

#[derive(Parser)]
#[command(name = "grinblat", version, about = "Rainbow matchings for families of equivalence relations")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Constructive solver; reads an instance from FILE or stdin.
    Solve {
        file: Option<PathBuf>,
        /// Constant added to the kernel bound ceil(16n/5).
        #[arg(long, default_value_t = PROOF_CONSTANT)]
        c: u64,
        /// Instances with fewer relations are solved exactly.
        #[arg(long, default_value_t = DEFAULT_N_MIN)]
        nmin: usize,
        /// Node budget for exact fallbacks.
        #[arg(long, default_value_t = 50_000_000)]
        budget: u64,
        /// Print one JSON line per extension step to stderr.
        #[arg(long)]
        telemetry: bool,
    },
    /// Exact backtracking solver.
    Exact {
        file: Option<PathBuf>,
        #[arg(long, default_value_t = 100_000_000)]
        budget: u64,
    },
    /// Checks a matching against an instance.
    Verify { instance: PathBuf, matching: PathBuf },
    /// Writes a generated instance to stdout.
    Gen {
        #[command(subcommand)]
        family: Family,
    },
    /// Searches for an instance with no rainbow matching.
    Search {
        n: usize,
        kernel_target: usize,
        #[arg(long, default_value_t = 12)]
        max_ground: usize,
        #[arg(long, default_value_t = 100_000_000)]
        budget: u64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Runs an experiment config (TOML) and writes the per-trial CSV.
    Experiment {
        config: PathBuf,
        /// Per-trial CSV destination; stdout when absent.
        #[arg(long)]
        out: Option<PathBuf>,
        /// Per-cell summary CSV destination; stderr when absent.
        #[arg(long)]
        summary: Option<PathBuf>,
    },
}

#[derive(Subcommand)]
enum Family {
    /// n identical relations of n-1 triples.
    LowerBound { n: usize },
    /// Random classes of sizes 2 and 3 with every kernel at least ceil(16n/5)+c+slack.
    Random {
        n: usize,
        #[arg(long, default_value_t = PROOF_CONSTANT)]
        c: u64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 0)]
        slack: usize,
    },
    /// Instance whose first relation is concentrated on a planted matching.
    Planted {
        n: usize,
        #[arg(long, default_value_t = PROOF_CONSTANT)]
        c: u64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Also write the planted matching of the other relations here.
        #[arg(long)]
        matching: Option<PathBuf>,
    },
}

struct Fail(u8, String);

impl<E: std::fmt::Display> From<E> for Fail {
    fn from(e: E) -> Self {
        Fail(2, e.to_string())
    }
}

fn read_input(path: Option<&Path>) -> Result<Vec<u8>, Fail> {
    let mut buf = Vec::new();
    match path {
        Some(p) if p != Path::new("-") => {
            buf = std::fs::read(p).map_err(|e| Fail(2, format!("{}: {e}", p.display())))?;
        }
        _ => {
            std::io::stdin().read_to_end(&mut buf)?;
        }
    }
    Ok(buf)
}

fn read_instance(path: Option<&Path>) -> Result<Instance, Fail> {
    let bytes = read_input(path)?;
    parse_instance(&bytes)
        .map_err(|e| Fail(2, format!("{}: {e}", path.map_or("<stdin>".into(), |p| p.display().to_string()))))
}

fn emit(text: &str) -> Result<(), Fail> {
    let mut out = std::io::stdout().lock();
    out.write_all(text.as_bytes())?;
    out.flush()?;
    Ok(())
}

fn run(cmd: Cmd) -> Result<u8, Fail> {
    match cmd {
        Cmd::Solve { file, c, nmin, budget, telemetry } => {
            let inst = read_instance(file.as_deref())?;
            let opts = ConstructOptions { c, n_min: nmin, exact_budget: budget };
            match solve(&inst, &opts) {
                Ok(rep) => {
                    if telemetry {
                        let mut err = std::io::stderr().lock();
                        for s in &rep.steps {
                            writeln!(err, "{}", serde_json::to_string(s)?)?;
                        }
                    }
                    emit(&write_matching(&rep.matching))?;
                    Ok(0)
                }
                Err(ConstructError::NoMatching) => {
                    eprintln!("no rainbow matching");
                    Ok(1)
                }
                Err(e) => Err(Fail(2, e.to_string())),
            }
        }
        Cmd::Exact { file, budget } => {
            let inst = read_instance(file.as_deref())?;
            let r = exact_solve(&inst, budget);
            match r.outcome {
                ExactOutcome::Matched(m) => {
                    emit(&write_matching(&m))?;
                    Ok(0)
                }
                ExactOutcome::ProvenNone => {
                    eprintln!("proven none after {} nodes", r.nodes);
                    Ok(1)
                }
                ExactOutcome::BudgetExhausted => Err(Fail(2, format!("budget exhausted after {} nodes", r.nodes))),
            }
        }
        Cmd::Verify { instance, matching } => {
            let inst = read_instance(Some(&instance))?;
            let bytes = read_input(Some(&matching))?;
            let m = parse_matching(&bytes).map_err(|e| Fail(2, format!("{}: {e}", matching.display())))?;
            match verify_matching(&inst, &m).violation {
                None => {
                    emit("valid\n")?;
                    Ok(0)
                }
                Some(v) => Err(Fail(2, format!("invalid matching: {v}"))),
            }
        }
        Cmd::Gen { family } => {
            let inst = match family {
                Family::LowerBound { n } => {
                    if n < 2 {
                        return Err(Fail(64, "lower-bound family needs n >= 2".into()));
                    }
                    gen_lower_bound_family(n)
                }
                Family::Random { n, c, seed, slack } => {
                    if n == 0 {
                        return Err(Fail(64, "n must be positive".into()));
                    }
                    gen_random_hypothesis(n, c, seed, slack)
                }
                Family::Planted { n, c, seed, matching } => {
                    if n < DEFAULT_N_MIN {
                        return Err(Fail(64, format!("planted instances need n >= {DEFAULT_N_MIN}")));
                    }
                    let p = gen_planted_concentrated(n, c, seed);
                    if let Some(path) = matching {
                        std::fs::write(&path, write_matching(&p.sub))
                            .map_err(|e| Fail(2, format!("{}: {e}", path.display())))?;
                    }
                    p.instance
                }
            };
            emit(&write_instance(&inst))?;
            Ok(0)
        }
        Cmd::Search { n, kernel_target, max_ground, budget, seed } => {
            if n == 0 {
                return Err(Fail(64, "n must be positive".into()));
            }
            let r = search_unmatchable(&SearchParams { n, kernel_target, max_ground, budget, seed });
            match r.witness {
                Some(w) => {
                    emit(&write_instance(&w))?;
                    Ok(0)
                }
                None => {
                    let how = if r.exhaustive { "exhaustive" } else { "budget reached" };
                    eprintln!("none found ({how}, {} nodes)", r.nodes);
                    Ok(1)
                }
            }
        }
        Cmd::Experiment { config, out, summary } => {
            let text = std::fs::read_to_string(&config).map_err(|e| Fail(2, format!("{}: {e}", config.display())))?;
            let cfg = ExperimentConfig::from_toml(&text)?;
            let report = run_experiment(&cfg)?;
            match out {
                Some(p) => std::fs::write(&p, report.to_csv()).map_err(|e| Fail(2, format!("{}: {e}", p.display())))?,
                None => emit(&report.to_csv())?,
            }
            match summary {
                Some(p) => {
                    std::fs::write(&p, report.summary_csv()).map_err(|e| Fail(2, format!("{}: {e}", p.display())))?
                }
                None => eprint!("{}", report.summary_csv()),
            }
            for e in &report.errors {
                eprintln!("error: {e}");
            }
            Ok(if report.errors.is_empty() { 0 } else { 2 })
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 64 } else { 0 });
        }
    };
    match run(cli.cmd) {
        Ok(code) => ExitCode::from(code),
        Err(Fail(code, msg)) => {
            eprintln!("grinblat: {msg}");
            ExitCode::from(code)
        }
    }
}
