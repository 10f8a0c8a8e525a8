//! Config-driven Monte Carlo experiment runner.
//!
//! Determinism contract: each replication `i` draws from an independent
//! ChaCha8 substream keyed by `(seed, stream = i)`, and worker results are
//! merged in replication order. The output is therefore byte-identical for
//! any worker count, and a replication's panel does not depend on which
//! procedures are enabled (the panel is drawn before any procedure-specific
//! randomness).

use std::ops::Range;
use std::thread;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::dist::{DistSpec, GroupModel};
use crate::error::{Error, Result};
use crate::metrics::SimulationSummary;
use crate::procedure::{
    run_random, run_strike_replace, run_struck, Group, PanelSampler, Procedure,
};
use crate::solver::{solve, EquilibriumTable};

/// Default experiment seed; presets pin it so goldens are stable.
pub const DEFAULT_SEED: u64 = 0x5EED_0001;

/// A tail-count threshold: absolute, or a percentile of the pooled
/// population distribution written `"p10"` / `"p2.5"`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum ThresholdSpec {
    Absolute(f64),
    Percentile(String),
}

impl ThresholdSpec {
    fn resolve(&self, pooled: &crate::dist::MixtureDistribution) -> Result<ResolvedThreshold> {
        match self {
            ThresholdSpec::Absolute(c) => {
                if !(0.0..=1.0).contains(c) {
                    return Err(Error::InvalidConfig(format!(
                        "thresholds: absolute threshold {c} outside [0,1]"
                    )));
                }
                Ok(ResolvedThreshold { label: format!("{c}"), c: *c })
            }
            ThresholdSpec::Percentile(s) => {
                let pct: f64 = s
                    .strip_prefix('p')
                    .and_then(|rest| rest.parse().ok())
                    .ok_or_else(|| {
                        Error::InvalidConfig(format!(
                            "thresholds: expected \"p<percent>\" or a number, got {s:?}"
                        ))
                    })?;
                if !(0.0..=100.0).contains(&pct) {
                    return Err(Error::InvalidConfig(format!(
                        "thresholds: percentile {pct} outside [0,100]"
                    )));
                }
                Ok(ResolvedThreshold {
                    label: s.clone(),
                    c: pooled.quantile(pct / 100.0)?,
                })
            }
        }
    }
}

/// A threshold after percentile resolution.
#[derive(Debug, Clone, PartialEq)]
pub struct ResolvedThreshold {
    pub label: String,
    pub c: f64,
}

/// Group model as configured.
#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct GroupModelSpec {
    pub r: f64,
    pub dist_a: DistSpec,
    pub dist_b: DistSpec,
}

impl GroupModelSpec {
    pub fn build(&self) -> Result<GroupModel> {
        GroupModel::new(self.r, self.dist_a.build()?, self.dist_b.build()?)
    }
}

fn default_seed() -> u64 {
    DEFAULT_SEED
}

fn default_workers() -> usize {
    1
}

/// One simulation experiment: procedures to run, game parameters, group
/// model, replication count, and seeding.
#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub procedures: Vec<Procedure>,
    pub j: usize,
    pub d: usize,
    pub p: usize,
    pub group_model: GroupModelSpec,
    pub n_sims: u64,
    #[serde(default = "default_seed")]
    pub seed: u64,
    #[serde(default)]
    pub thresholds: Vec<ThresholdSpec>,
    #[serde(default = "default_workers")]
    pub workers: usize,
}

impl ExperimentConfig {
    /// Parse a JSON config, reporting the offending field path on errors.
    pub fn from_json(text: &str) -> Result<Self> {
        let de = &mut serde_json::Deserializer::from_str(text);
        let cfg: ExperimentConfig = serde_path_to_error::deserialize(de).map_err(|e| {
            Error::InvalidConfig(format!("at {}: {}", e.path(), e.inner()))
        })?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        if self.procedures.is_empty() {
            return Err(Error::InvalidConfig("procedures: list is empty".into()));
        }
        if self.n_sims == 0 {
            return Err(Error::InvalidConfig("n_sims: must be at least 1".into()));
        }
        if self.j == 0 {
            return Err(Error::InvalidConfig("j: must be at least 1".into()));
        }
        if self.j > u8::MAX as usize {
            return Err(Error::InvalidConfig(format!("j: {} too large", self.j)));
        }
        let uses_challenges = self
            .procedures
            .iter()
            .any(|p| matches!(p, Procedure::Struck | Procedure::StrikeReplace));
        if uses_challenges && (self.d == 0 || self.p == 0) {
            return Err(Error::InvalidConfig(
                "d, p: challenge procedures require d >= 1 and p >= 1".into(),
            ));
        }
        if self.workers == 0 {
            return Err(Error::InvalidConfig("workers: must be at least 1".into()));
        }
        Ok(())
    }
}

/// Everything a finished experiment exposes for reporting.
pub struct ExperimentResult {
    pub thresholds: Vec<ResolvedThreshold>,
    pub median: f64,
    pub table: Option<EquilibriumTable>,
    pub summaries: Vec<(Procedure, SimulationSummary)>,
}

/// One row of the optional per-jury trace.
#[derive(Debug, Clone)]
pub struct TraceRow {
    pub sim_id: u64,
    pub procedure: Procedure,
    pub seat_index: usize,
    pub c: f64,
    pub group: Group,
}

/// Run the configured experiment. Deterministic given `(config, seed)`
/// regardless of `workers`.
pub fn run_experiment(cfg: &ExperimentConfig) -> Result<ExperimentResult> {
    run_experiment_inner(cfg, false).map(|(res, _)| res)
}

/// Like [`run_experiment`], additionally collecting per-jury trace rows in
/// replication order. Intended for small runs.
pub fn run_experiment_traced(cfg: &ExperimentConfig) -> Result<(ExperimentResult, Vec<TraceRow>)> {
    run_experiment_inner(cfg, true)
}

fn run_experiment_inner(
    cfg: &ExperimentConfig,
    want_trace: bool,
) -> Result<(ExperimentResult, Vec<TraceRow>)> {
    cfg.validate()?;
    let gm = cfg.group_model.build()?;
    let pooled = gm.pooled();
    let mut thresholds: Vec<ResolvedThreshold> = cfg
        .thresholds
        .iter()
        .map(|t| t.resolve(&pooled))
        .collect::<Result<_>>()?;
    thresholds.sort_by(|a, b| a.c.partial_cmp(&b.c).unwrap());
    let threshold_cs: Vec<f64> = thresholds.iter().map(|t| t.c).collect();
    let median = pooled.quantile(0.5)?;
    let table = if cfg.procedures.contains(&Procedure::StrikeReplace) {
        Some(solve(&pooled, cfg.j, cfg.d, cfg.p))
    } else {
        None
    };

    let workers = cfg.workers.min(cfg.n_sims.max(1) as usize).max(1);
    let chunk = cfg.n_sims.div_ceil(workers as u64);
    let ranges: Vec<Range<u64>> = (0..workers as u64)
        .map(|w| (w * chunk).min(cfg.n_sims)..((w + 1) * chunk).min(cfg.n_sims))
        .filter(|r| !r.is_empty())
        .collect();

    let chunk_results: Vec<(Vec<SimulationSummary>, Vec<TraceRow>)> = thread::scope(|scope| {
        let handles: Vec<_> = ranges
            .iter()
            .map(|range| {
                let range = range.clone();
                let gm = &gm;
                let table = table.as_ref();
                let threshold_cs = &threshold_cs;
                scope.spawn(move || {
                    run_range(cfg, gm, table, threshold_cs, median, range, want_trace)
                })
            })
            .collect();
        handles.into_iter().map(|h| h.join().expect("worker panicked")).collect()
    });

    let mut summaries: Vec<(Procedure, SimulationSummary)> = cfg
        .procedures
        .iter()
        .map(|&p| {
            Ok((
                p,
                SimulationSummary::new(cfg.j, threshold_cs.clone(), median)?,
            ))
        })
        .collect::<Result<_>>()?;
    let mut traces = Vec::new();
    for (chunk_summaries, chunk_traces) in chunk_results {
        for ((_, total), part) in summaries.iter_mut().zip(chunk_summaries.iter()) {
            total.merge(part);
        }
        traces.extend(chunk_traces);
    }

    Ok((
        ExperimentResult {
            thresholds,
            median,
            table,
            summaries,
        },
        traces,
    ))
}

fn run_range(
    cfg: &ExperimentConfig,
    gm: &GroupModel,
    table: Option<&EquilibriumTable>,
    threshold_cs: &[f64],
    median: f64,
    range: Range<u64>,
    want_trace: bool,
) -> (Vec<SimulationSummary>, Vec<TraceRow>) {
    let n = cfg.j + cfg.d + cfg.p;
    let sampler = PanelSampler::new(gm);
    let mut summaries: Vec<SimulationSummary> = cfg
        .procedures
        .iter()
        .map(|_| {
            SimulationSummary::new(cfg.j, threshold_cs.to_vec(), median)
                .expect("validated config")
        })
        .collect();
    let mut traces = Vec::new();
    for rep in range {
        let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
        rng.set_stream(rep);
        let panel = sampler.draw(n, &mut rng);
        for (proc, summary) in cfg.procedures.iter().zip(summaries.iter_mut()) {
            let outcome = match proc {
                Procedure::Struck => run_struck(&panel, cfg.j, cfg.d, cfg.p),
                Procedure::StrikeReplace => {
                    run_strike_replace(&panel, table.expect("table solved for S&R"))
                }
                Procedure::Random => run_random(&panel, cfg.j, &mut rng),
            };
            if want_trace {
                for (seat, juror) in outcome.selected.iter().enumerate() {
                    traces.push(TraceRow {
                        sim_id: rep,
                        procedure: *proc,
                        seat_index: seat,
                        c: juror.c,
                        group: juror.group,
                    });
                }
            }
            summary.accumulate(&outcome);
        }
    }
    (summaries, traces)
}
