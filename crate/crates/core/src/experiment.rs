//! Experiment runner: sweeps over `(generator, n, c)` cells with seeded
//! trials, producing a per-trial CSV and a per-cell summary CSV.
//!
//! Trials are numbered in cell order (generators, then `n`, then `c`, then
//! trial within the cell) and trial `k` uses seed `derive_seed(master_seed, k)`.

use std::collections::BTreeMap;
use std::time::Instant;

use serde::{Deserialize, Serialize};

use crate::construct::telemetry::Phase;
use crate::construct::{extend_matching, solve, ConstructOptions, DEFAULT_N_MIN, PROOF_CONSTANT};
use crate::error::{ConfigError, ConstructError};
use crate::gen::{gen_planted_concentrated, gen_random_hypothesis};
use crate::relations::{verify_matching, Instance};
use crate::seed::derive_seed;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Generator {
    /// [`gen_random_hypothesis`], solved from scratch by [`solve`].
    Uniform,
    /// [`gen_planted_concentrated`], extended from the planted sub-matching.
    Planted,
}

impl Generator {
    pub fn name(self) -> &'static str {
        match self {
            Generator::Uniform => "uniform",
            Generator::Planted => "planted",
        }
    }
}

fn default_generators() -> Vec<Generator> {
    vec![Generator::Uniform]
}
fn default_c() -> Vec<u64> {
    vec![PROOF_CONSTANT]
}
fn default_n_min() -> usize {
    DEFAULT_N_MIN
}
fn default_budget() -> u64 {
    ConstructOptions::default().exact_budget
}
fn default_timing() -> bool {
    true
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub master_seed: u64,
    /// Trials per cell.
    pub trials: usize,
    pub n: Vec<usize>,
    #[serde(default = "default_c")]
    pub c: Vec<u64>,
    #[serde(default = "default_generators")]
    pub generators: Vec<Generator>,
    /// Extra kernel elements for the uniform generator.
    #[serde(default)]
    pub slack: usize,
    /// Record wall time; with `false` the `wall_nanos` column is 0 and the
    /// report is byte-reproducible.
    #[serde(default = "default_timing")]
    pub timing: bool,
    #[serde(default = "default_n_min")]
    pub n_min: usize,
    #[serde(default = "default_budget")]
    pub exact_budget: u64,
}

impl ExperimentConfig {
    pub fn from_toml(text: &str) -> Result<Self, ConfigError> {
        let cfg: ExperimentConfig = toml::from_str(text).map_err(|e| ConfigError::Parse(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        if self.n.contains(&0) {
            return Err(ConfigError::Invalid("n values must be positive".into()));
        }
        if self.n_min == 0 {
            return Err(ConfigError::Invalid("n_min must be positive".into()));
        }
        if self.generators.contains(&Generator::Planted) {
            if let Some(&n) = self.n.iter().find(|&&n| n < self.n_min.max(DEFAULT_N_MIN)) {
                return Err(ConfigError::Invalid(format!(
                    "planted generator needs n >= {}, got {n}",
                    self.n_min.max(DEFAULT_N_MIN)
                )));
            }
        }
        Ok(())
    }

    fn options(&self, c: u64) -> ConstructOptions {
        ConstructOptions { c, n_min: self.n_min, exact_budget: self.exact_budget }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Outcome {
    Matched,
    ProvenNone,
    LogicError,
    Budget,
}

impl Outcome {
    pub fn name(self) -> &'static str {
        match self {
            Outcome::Matched => "matched",
            Outcome::ProvenNone => "proven-none",
            Outcome::LogicError => "logic-error",
            Outcome::Budget => "budget",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct TrialRow {
    pub seed: u64,
    pub n: usize,
    pub c: u64,
    pub generator: &'static str,
    pub min_kernel: usize,
    pub outcome: &'static str,
    pub phase_reached: &'static str,
    pub branch: String,
    pub wall_nanos: u128,
    pub node_count: u64,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RunReport {
    pub rows: Vec<TrialRow>,
    /// Set when a trial produced an error other than budget exhaustion or a
    /// proven absence; the message names the seed.
    pub errors: Vec<String>,
}

#[derive(Clone, Copy)]
struct Trial {
    generator: Generator,
    n: usize,
    c: u64,
    seed: u64,
}

fn trials(cfg: &ExperimentConfig) -> Vec<Trial> {
    let mut out = Vec::new();
    for &generator in &cfg.generators {
        for &n in &cfg.n {
            for &c in &cfg.c {
                for _ in 0..cfg.trials {
                    let seed = derive_seed(cfg.master_seed, out.len() as u64);
                    out.push(Trial { generator, n, c, seed });
                }
            }
        }
    }
    out
}

fn outcome_of(e: &ConstructError) -> Outcome {
    match e {
        ConstructError::NoMatching => Outcome::ProvenNone,
        ConstructError::FallbackExhausted { .. } => Outcome::Budget,
        _ => Outcome::LogicError,
    }
}

fn run_trial(cfg: &ExperimentConfig, t: Trial) -> (TrialRow, Option<String>) {
    let opts = cfg.options(t.c);
    let start = Instant::now();
    let (inst, result): (Instance, Result<_, ConstructError>) = match t.generator {
        Generator::Uniform => {
            let inst = gen_random_hypothesis(t.n, t.c, t.seed, cfg.slack);
            let r = solve(&inst, &opts).map(|rep| {
                let nodes = rep.steps.iter().map(|s| s.exact_nodes).sum();
                let phase = rep.phase_reached();
                let branch = rep
                    .steps
                    .iter()
                    .rev()
                    .find(|s| s.phase_reached == phase)
                    .map(|s| s.branch.name())
                    .unwrap_or_default();
                (rep.matching, phase, branch, nodes)
            });
            (inst, r)
        }
        Generator::Planted => {
            let p = gen_planted_concentrated(t.n, t.c, t.seed);
            let r = extend_matching(&p.instance, &p.sub, p.new_rel, &opts)
                .map(|ext| (ext.matching, ext.log.phase_reached, ext.log.branch.name(), ext.log.exact_nodes));
            (p.instance, r)
        }
    };
    let wall = if cfg.timing { start.elapsed().as_nanos() } else { 0 };
    let min_kernel = inst.min_kernel().unwrap_or(0);
    let mut row = TrialRow {
        seed: t.seed,
        n: t.n,
        c: t.c,
        generator: t.generator.name(),
        min_kernel,
        outcome: "",
        phase_reached: "",
        branch: String::new(),
        wall_nanos: wall,
        node_count: 0,
    };
    let mut err = None;
    match result {
        Ok((m, phase, branch, nodes)) => {
            if let Some(v) = verify_matching(&inst, &m).violation {
                row.outcome = Outcome::LogicError.name();
                err = Some(format!("seed {}: returned matching invalid: {v}", t.seed));
            } else {
                row.outcome = Outcome::Matched.name();
            }
            row.phase_reached = phase.name();
            row.branch = branch;
            row.node_count = nodes;
        }
        Err(e) => {
            let o = outcome_of(&e);
            row.outcome = o.name();
            if let ConstructError::FallbackExhausted { nodes } = e {
                row.node_count = nodes;
            }
            if o == Outcome::LogicError {
                err = Some(format!("seed {}: {e}", t.seed));
            }
        }
    }
    (row, err)
}

/// Thread count from `GRINBLAT_THREADS`; unset, unparsable or 0 means auto.
pub fn thread_cap() -> usize {
    std::env::var("GRINBLAT_THREADS").ok().and_then(|v| v.trim().parse().ok()).unwrap_or(0)
}

pub fn run_experiment(cfg: &ExperimentConfig) -> Result<RunReport, ConfigError> {
    cfg.validate()?;
    let list = trials(cfg);
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(thread_cap())
        .build()
        .map_err(|e| ConfigError::Invalid(format!("thread pool: {e}")))?;
    let results: Vec<(TrialRow, Option<String>)> = pool.install(|| {
        use rayon::prelude::*;
        list.par_iter().map(|&t| run_trial(cfg, t)).collect()
    });
    let mut rows = Vec::with_capacity(results.len());
    let mut errors = Vec::new();
    for (r, e) in results {
        rows.push(r);
        errors.extend(e);
    }
    Ok(RunReport { rows, errors })
}

impl RunReport {
    pub fn to_csv(&self) -> String {
        let mut w = csv::Writer::from_writer(Vec::new());
        if self.rows.is_empty() {
            w.write_record([
                "seed",
                "n",
                "c",
                "generator",
                "min_kernel",
                "outcome",
                "phase_reached",
                "branch",
                "wall_nanos",
                "node_count",
            ])
            .expect("in-memory csv");
        }
        for r in &self.rows {
            w.serialize(r).expect("in-memory csv");
        }
        String::from_utf8(w.into_inner().expect("in-memory csv")).expect("csv is utf-8")
    }

    /// One line per `(generator, n, c)` cell: outcome counts, success rate
    /// and how many trials reached each phase as their deepest.
    pub fn summary_csv(&self) -> String {
        let phases = [
            Phase::Exact,
            Phase::DirectPair,
            Phase::Track,
            Phase::Scheme2,
            Phase::FiveHeavy,
            Phase::Scheme3,
            Phase::Lucky,
            Phase::Final,
        ];
        let mut cells: BTreeMap<(&str, usize, u64), Vec<&TrialRow>> = BTreeMap::new();
        for r in &self.rows {
            cells.entry((r.generator, r.n, r.c)).or_default().push(r);
        }
        let mut w = csv::Writer::from_writer(Vec::new());
        let mut header: Vec<String> =
            ["generator", "n", "c", "trials", "matched", "proven_none", "logic_error", "budget", "success_rate"]
                .iter()
                .map(|s| s.to_string())
                .collect();
        header.extend(phases.iter().map(|p| format!("phase_{}", p.name())));
        w.write_record(&header).expect("in-memory csv");
        for ((g, n, c), rows) in cells {
            let count = |o: Outcome| rows.iter().filter(|r| r.outcome == o.name()).count();
            let matched = count(Outcome::Matched);
            let mut rec = vec![
                g.to_string(),
                n.to_string(),
                c.to_string(),
                rows.len().to_string(),
                matched.to_string(),
                count(Outcome::ProvenNone).to_string(),
                count(Outcome::LogicError).to_string(),
                count(Outcome::Budget).to_string(),
                format!("{:.4}", matched as f64 / rows.len() as f64),
            ];
            for p in phases {
                rec.push(rows.iter().filter(|r| r.phase_reached == p.name()).count().to_string());
            }
            w.write_record(&rec).expect("in-memory csv");
        }
        String::from_utf8(w.into_inner().expect("in-memory csv")).expect("csv is utf-8")
    }
}
