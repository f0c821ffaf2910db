//! Running configured experiments and writing their output files.
//!
//! Every CSV file opens with `# `-prefixed comment lines holding the resolved
//! configuration, followed by a header row. Fields are comma separated,
//! numbers use `.` as decimal point and the shortest round-trip form, and
//! lines end in `\n`. Rows come out in a fixed order, so identical inputs give
//! byte-identical files.
//!
//! | kind           | files                                                   |
//! |----------------|---------------------------------------------------------|
//! | `single-run`   | `<label>_series.csv`, plus `_moments.csv` and `_histogram.csv` when `moments_tail` is set |
//! | `ensemble`     | `<label>_summary.csv`                                   |
//! | `sweep2d`      | `<label>_sweep.csv`                                     |
//! | `size-sweep`   | `<label>_size_sweep.csv`                                |
//! | `snapshot-run` | `<label>_series.csv`, `<label>_snapshot_t<t>.txt`       |
//!
//! Plans containing runs with dynamic categories also get
//! `<plan>_theory.csv`, comparing simulated learner counts to the stationary
//! expectation.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};
use std::sync::Arc;

use rayon::prelude::*;

use crate::category::expected_counts;
use crate::config::{ExperimentConfig, ExperimentKind};
use crate::engine::{run, run_ensemble, MetricsSeries};
use crate::error::{Error, Result};
use crate::rng::run_seeds;
use crate::stats::{histogram, moments, population_std, range, relative_error, tail_mean};

/// Simulated against expected learner counts for one configuration.
#[derive(Clone, Debug, PartialEq)]
pub struct TheoryRow {
    pub label: String,
    pub n: usize,
    pub p: f64,
    pub q: f64,
    pub expected_learners: f64,
    pub expected_profiteers: f64,
    pub simulated_learners: f64,
    pub relative_error: f64,
}

/// Files written by one experiment.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct ExperimentOutput {
    pub files: Vec<PathBuf>,
    pub theory: Option<TheoryRow>,
}

fn comment_block(cfg: &ExperimentConfig) -> String {
    cfg.to_toml()
        .lines()
        .map(|line| format!("# {line}\n").replace("# \n", "#\n"))
        .collect()
}

fn write_file(path: &Path, body: &str) -> Result<PathBuf> {
    fs::write(path, body).map_err(|e| Error::io(path, e))?;
    Ok(path.to_path_buf())
}

fn finite(x: f64, what: &str) -> Result<f64> {
    if x.is_finite() {
        Ok(x)
    } else {
        Err(Error::Undefined(format!("{what} is not finite")))
    }
}

/// Create `dir` if needed and prove a file can be written there.
pub fn ensure_writable(dir: &Path) -> Result<()> {
    fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    let probe = dir.join(".memsdg-write-check");
    fs::write(&probe, b"").map_err(|e| Error::io(&probe, e))?;
    fs::remove_file(&probe).map_err(|e| Error::io(&probe, e))
}

fn theory_row(cfg: &ExperimentConfig, simulated: f64) -> Result<Option<TheoryRow>> {
    let params = cfg.build_params()?;
    if !params.transition.is_dynamic() {
        return Ok(None);
    }
    let n = cfg.network.spec().n();
    let (learners, profiteers) = expected_counts(params.transition, n)?;
    Ok(Some(TheoryRow {
        label: cfg.label.clone(),
        n,
        p: cfg.params.p,
        q: cfg.params.q,
        expected_learners: learners,
        expected_profiteers: profiteers,
        simulated_learners: simulated,
        relative_error: relative_error(simulated, learners)?,
    }))
}

fn series_csv(cfg: &ExperimentConfig, series: &MetricsSeries) -> String {
    let mut out = comment_block(cfg);
    out.push_str("t,f_c,learner_count\n");
    for r in &series.records {
        let _ = writeln!(out, "{},{},{}", r.t, r.f_c(), r.learners);
    }
    out
}

fn single_run(cfg: &ExperimentConfig, snapshots: bool) -> Result<ExperimentOutput> {
    let params = cfg.build_params()?;
    let seed = run_seeds(cfg.master_seed, 1)[0];
    let net = Arc::new(cfg.network.spec().build(seed)?);
    let times: BTreeSet<u64> = if snapshots {
        cfg.snapshot_times.iter().copied().collect()
    } else {
        BTreeSet::new()
    };
    let (series, snaps) = run(net, &params, seed, cfg.steps, &times)?;

    let mut files = vec![write_file(
        &cfg.out.join(format!("{}_series.csv", cfg.label)),
        &series_csv(cfg, &series),
    )?];
    for snap in &snaps {
        files.push(write_file(
            &cfg.out
                .join(format!("{}_snapshot_t{}.txt", cfg.label, snap.t)),
            &snap.to_text()?,
        )?);
    }

    let learners = series.learner_counts();
    if let Some(mt) = cfg.moments_tail {
        let window = &learners[learners.len() - mt..];
        let profiteers: Vec<f64> = window
            .iter()
            .map(|&l| series.records[0].n as f64 - l)
            .collect();
        let mut body = comment_block(cfg);
        body.push_str("population,mean,std,skewness,kurtosis\n");
        for (name, sample) in [("learners", window), ("profiteers", &profiteers[..])] {
            let m = moments(sample)?;
            let _ = writeln!(
                body,
                "{name},{},{},{},{}",
                m.mean, m.std, m.skewness, m.kurtosis
            );
        }
        files.push(write_file(
            &cfg.out.join(format!("{}_moments.csv", cfg.label)),
            &body,
        )?);

        let counts: Vec<i64> = window.iter().map(|&l| l as i64).collect();
        let mut body = comment_block(cfg);
        body.push_str("learner_count,probability\n");
        for (k, prob) in histogram(&counts)? {
            let _ = writeln!(body, "{k},{prob}");
        }
        files.push(write_file(
            &cfg.out.join(format!("{}_histogram.csv", cfg.label)),
            &body,
        )?);
    }

    let simulated = tail_mean(&learners, cfg.tail)?;
    Ok(ExperimentOutput {
        files,
        theory: theory_row(cfg, simulated)?,
    })
}

fn ensemble(cfg: &ExperimentConfig) -> Result<ExperimentOutput> {
    let params = cfg.build_params()?;
    let seeds = run_seeds(cfg.master_seed, cfg.seeds);
    let summary = run_ensemble(&cfg.network.spec(), &params, &seeds, cfg.steps, cfg.tail)?;
    let mut body = comment_block(cfg);
    body.push_str("seed,mean_fc,mean_learners\n");
    for r in &summary.runs {
        let _ = writeln!(body, "{},{},{}", r.seed, r.mean_fc, r.mean_learners);
    }
    let _ = writeln!(body, "mean,{},{}", summary.mean_fc, summary.mean_learners);
    let file = write_file(&cfg.out.join(format!("{}_summary.csv", cfg.label)), &body)?;
    Ok(ExperimentOutput {
        files: vec![file],
        theory: theory_row(cfg, summary.mean_learners)?,
    })
}

fn sweep(cfg: &ExperimentConfig) -> Result<ExperimentOutput> {
    let (ax, ay) = (cfg.axes[0], cfg.axes[1]);
    let cells: Vec<(f64, f64)> = ax
        .values()
        .into_iter()
        .flat_map(|x| ay.values().into_iter().map(move |y| (x, y)))
        .collect();
    let seeds = run_seeds(cfg.master_seed, cfg.seeds);
    let spec = cfg.network.spec();
    let means = cells
        .par_iter()
        .map(|&(x, y)| {
            let params = cfg.cell_params(x, y).build()?;
            let summary = run_ensemble(&spec, &params, &seeds, cfg.steps, cfg.tail)?;
            finite(summary.mean_fc, "sweep cell mean")
        })
        .collect::<Result<Vec<f64>>>()?;

    let mut body = comment_block(cfg);
    let _ = writeln!(body, "{},{},mean_fc", ax.name.name(), ay.name.name());
    for (&(x, y), fc) in cells.iter().zip(&means) {
        let _ = writeln!(body, "{x},{y},{fc}");
    }
    let file = write_file(&cfg.out.join(format!("{}_sweep.csv", cfg.label)), &body)?;
    Ok(ExperimentOutput {
        files: vec![file],
        theory: None,
    })
}

fn size_sweep(cfg: &ExperimentConfig) -> Result<ExperimentOutput> {
    let params = cfg.build_params()?;
    let seeds = run_seeds(cfg.master_seed, cfg.seeds);
    let mut rows = Vec::with_capacity(cfg.sizes.len());
    for &size in &cfg.sizes {
        let spec = cfg.network.with_size(size).spec();
        let summary = run_ensemble(&spec, &params, &seeds, cfg.steps, cfg.tail)?;
        rows.push((spec.n(), finite(summary.mean_fc, "size sweep mean")?));
    }
    let means: Vec<f64> = rows.iter().map(|r| r.1).collect();
    let (spread, std) = (range(&means), population_std(&means));

    let mut body = comment_block(cfg);
    body.push_str("label,n,mean_fc,range,std\n");
    for (n, fc) in rows {
        let _ = writeln!(body, "{},{n},{fc},{spread},{std}", cfg.label);
    }
    let file = write_file(
        &cfg.out.join(format!("{}_size_sweep.csv", cfg.label)),
        &body,
    )?;
    Ok(ExperimentOutput {
        files: vec![file],
        theory: None,
    })
}

/// Validate, check the output directory, and run one configuration.
pub fn run_experiment(cfg: &ExperimentConfig) -> Result<ExperimentOutput> {
    cfg.validate()?;
    ensure_writable(&cfg.out)?;
    execute(cfg)
}

fn execute(cfg: &ExperimentConfig) -> Result<ExperimentOutput> {
    match cfg.kind {
        ExperimentKind::SingleRun => single_run(cfg, false),
        ExperimentKind::SnapshotRun => single_run(cfg, true),
        ExperimentKind::Ensemble => ensemble(cfg),
        ExperimentKind::Sweep2d => sweep(cfg),
        ExperimentKind::SizeSweep => size_sweep(cfg),
    }
}

/// Run several configurations as one named plan.
///
/// All configurations are validated and every output directory is checked
/// before the first simulation starts. Returns the written files in order.
pub fn run_plan(name: &str, cfgs: &[ExperimentConfig]) -> Result<Vec<PathBuf>> {
    for cfg in cfgs {
        cfg.validate()?;
    }
    let dirs: BTreeSet<&Path> = cfgs.iter().map(|c| c.out.as_path()).collect();
    for dir in &dirs {
        ensure_writable(dir)?;
    }

    let mut files = Vec::new();
    let mut theory: BTreeMap<&Path, Vec<(&ExperimentConfig, TheoryRow)>> = BTreeMap::new();
    for cfg in cfgs {
        let out = execute(cfg)?;
        files.extend(out.files);
        if let Some(row) = out.theory {
            theory
                .entry(cfg.out.as_path())
                .or_default()
                .push((cfg, row));
        }
    }

    for (dir, rows) in theory {
        let mut body = String::new();
        for (cfg, _) in &rows {
            let _ = writeln!(body, "# [{}]", cfg.label);
            body.push_str(&comment_block(cfg));
        }
        body.push_str(
            "label,n,p,q,expected_learners,expected_profiteers,simulated_learners,relative_error\n",
        );
        for (_, r) in &rows {
            let _ = writeln!(
                body,
                "{},{},{},{},{},{},{},{}",
                r.label,
                r.n,
                r.p,
                r.q,
                r.expected_learners,
                r.expected_profiteers,
                r.simulated_learners,
                r.relative_error
            );
        }
        files.push(write_file(&dir.join(format!("{name}_theory.csv")), &body)?);
    }
    Ok(files)
}
