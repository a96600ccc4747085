//! Seed fan-out and result files.

use std::fs::{self, File};
use std::io::BufWriter;
use std::path::PathBuf;

use rayon::prelude::*;

use pa_core::baseline::run_eps_greedy_principal;
use pa_core::cipa::{run_cipa_with, CipaConfig};
use pa_core::geometry::SamplerConfig;
use pa_core::ipa::{regret_curve, run_ipa};
use pa_core::rng::derive_seed;

use crate::config::{Algorithm, ExperimentConfig, Setting};
use crate::error::{HarnessError, Result};
use crate::oracle::oracle_ucb_run;
use crate::plot::emit_plot;
use crate::summary::{summarize, write_per_seed, Summary};

/// Environment variable overriding the number of worker threads.
pub const WORKERS_ENV: &str = "PA_SIM_WORKERS";

/// Cumulative expected-regret curves of one algorithm, one per seed, in
/// seed order.
#[derive(Debug, Clone, PartialEq)]
pub struct RunCurves {
    pub algorithm: Algorithm,
    pub seeds: Vec<u64>,
    pub curves: Vec<Vec<f64>>,
}

impl RunCurves {
    pub fn horizon(&self) -> usize {
        self.curves.iter().map(Vec::len).max().unwrap_or(0)
    }

    /// Cumulative regret at round `t` (1-based) for every seed.
    pub fn at(&self, t: usize) -> Vec<f64> {
        self.curves.iter().map(|c| c[t - 1]).collect()
    }
}

#[derive(Debug, Clone)]
pub struct ExperimentOutput {
    pub runs: Vec<RunCurves>,
    pub summary: Summary,
    pub files: Vec<PathBuf>,
}

/// Worker count from `PA_SIM_WORKERS`, else the available parallelism.
pub fn worker_count() -> Result<usize> {
    match std::env::var(WORKERS_ENV) {
        Ok(v) => match v.trim().parse::<usize>() {
            Ok(n) if n > 0 => Ok(n),
            _ => Err(HarnessError::Config(format!("{WORKERS_ENV} must be a positive integer, got `{v}`"))),
        },
        Err(_) => Ok(std::thread::available_parallelism().map_or(1, |n| n.get())),
    }
}

fn run_one(cfg: &ExperimentConfig, alg: Algorithm, seed: u64) -> Result<Vec<f64>> {
    let t = cfg.horizon;
    Ok(match alg {
        Algorithm::IpaUcb | Algorithm::IpaEpsGreedy => {
            let inst = cfg.mab_instance()?;
            let sub = cfg.subroutine(alg).expect("ipa variants carry a subroutine");
            let mut policy = sub.build(inst.k(), t);
            let traj = run_ipa(&inst, policy.as_mut(), t, seed, cfg.tie)?;
            regret_curve(&traj, &inst)?
        }
        Algorithm::OracleUcb => {
            let inst = cfg.mab_instance()?;
            regret_curve(&oracle_ucb_run(&inst, t, seed)?, &inst)?
        }
        Algorithm::EpsGreedy => {
            let inst = cfg.mab_instance()?;
            let traj = run_eps_greedy_principal(&inst, t, seed, cfg.eps_greedy.into(), cfg.tie)?;
            regret_curve(&traj, &inst)?
        }
        Algorithm::Cipa => {
            let inst = cfg.contextual_instance(seed)?;
            let ccfg = CipaConfig {
                base_offer: cfg.cipa.base_offer,
                sampler: SamplerConfig {
                    samples: cfg.cipa.samples,
                    ..SamplerConfig::default()
                },
                tie: cfg.tie,
            };
            run_cipa_with(&inst, t, seed, &ccfg)?.regret_curve()
        }
    })
}

/// Runs every algorithm on every seed, in memory. Results do not depend on
/// the worker count.
pub fn simulate(cfg: &ExperimentConfig) -> Result<Vec<RunCurves>> {
    cfg.validate()?;
    // surface instance problems once, before fanning out
    match cfg.setting {
        Setting::Mab => {
            cfg.mab_instance()?;
        }
        Setting::Contextual => {
            cfg.contextual_instance(cfg.seeds.base)?;
        }
    }
    let seeds: Vec<u64> = (0..cfg.seeds.count as u64).map(|i| derive_seed(cfg.seeds.base, i)).collect();
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(worker_count()?)
        .build()
        .map_err(|e| HarnessError::Config(format!("worker pool: {e}")))?;
    cfg.algorithms
        .iter()
        .map(|&alg| {
            let curves = pool.install(|| {
                seeds
                    .par_iter()
                    .map(|&s| run_one(cfg, alg, s))
                    .collect::<Result<Vec<_>>>()
            })?;
            Ok(RunCurves {
                algorithm: alg,
                seeds: seeds.clone(),
                curves,
            })
        })
        .collect()
}

fn create(path: &PathBuf) -> Result<BufWriter<File>> {
    File::create(path)
        .map(BufWriter::new)
        .map_err(|e| HarnessError::io(path, e))
}

/// Runs the experiment and writes `<stem>.csv` per algorithm, `summary.csv`
/// and, if enabled, `regret.svg` into the output directory.
pub fn run_experiment(cfg: &ExperimentConfig) -> Result<ExperimentOutput> {
    let dir = &cfg.output_dir;
    fs::create_dir_all(dir).map_err(|e| HarnessError::io(dir, e))?;
    let runs = simulate(cfg)?;
    let mut files = Vec::new();
    for run in &runs {
        let path = dir.join(format!("{}.csv", run.algorithm.file_stem()));
        write_per_seed(run, create(&path)?)?;
        files.push(path);
    }
    let summary = summarize(&runs);
    let path = dir.join("summary.csv");
    summary.write_csv(create(&path)?)?;
    files.push(path);
    if cfg.plot {
        let path = dir.join("regret.svg");
        fs::write(&path, emit_plot(&summary)?).map_err(|e| HarnessError::io(&path, e))?;
        files.push(path);
    }
    Ok(ExperimentOutput { runs, summary, files })
}
