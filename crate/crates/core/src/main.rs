use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use memsdg::config::{
    preset, ExperimentConfig, ExperimentKind, NetKind, Overrides, SweepAxis, PRESETS,
};
use memsdg::experiment::run_plan;
use memsdg::{Error, Result};

/// Memory-based snowdrift game with profiteer and learner agents.
#[derive(Parser, Debug)]
#[command(name = "memsdg", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Run a preset or configuration as written (default kind: ensemble).
    Run {
        /// Override the experiment kind.
        #[arg(long, value_parser = parse_kind)]
        kind: Option<ExperimentKind>,
        #[command(flatten)]
        common: Common,
    },
    /// Two-parameter sweep of mean cooperation.
    Sweep(Common),
    /// Single lattice run with strategy snapshots.
    Snapshot(Common),
    /// Mean cooperation across network sizes.
    SizeSweep(Common),
    /// List preset names.
    Presets,
}

#[derive(Args, Debug)]
struct Common {
    /// TOML configuration file.
    #[arg(long, conflicts_with = "preset")]
    config: Option<PathBuf>,
    /// Named preset, optionally with a `-desk` suffix.
    #[arg(long)]
    preset: Option<String>,
    /// Master seed.
    #[arg(long)]
    seed: Option<u64>,
    /// Number of independent runs.
    #[arg(long)]
    seeds: Option<usize>,
    #[arg(long)]
    steps: Option<u64>,
    /// Rounds at the end of each run that are averaged.
    #[arg(long)]
    tail: Option<usize>,
    /// Output directory.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long)]
    label: Option<String>,

    #[arg(long)]
    r: Option<f64>,
    #[arg(long)]
    beta: Option<f64>,
    /// Memory length.
    #[arg(long)]
    m: Option<usize>,
    #[arg(long)]
    kappa: Option<f64>,
    #[arg(long)]
    alpha: Option<f64>,
    #[arg(long)]
    gamma: Option<f64>,
    #[arg(long)]
    epsilon: Option<f64>,
    /// Learner to profiteer switching probability.
    #[arg(long)]
    p: Option<f64>,
    /// Profiteer to learner switching probability.
    #[arg(long)]
    q: Option<f64>,

    #[arg(long, value_parser = parse_net)]
    net: Option<NetKind>,
    #[arg(long)]
    side: Option<usize>,
    #[arg(long)]
    n: Option<usize>,
    #[arg(long)]
    ring_degree: Option<usize>,
    #[arg(long)]
    rewire_prob: Option<f64>,

    /// Sweep axis as name:min:max:points; give twice.
    #[arg(long, value_parser = parse_axis)]
    axis: Vec<SweepAxis>,
    /// Comma-separated lattice sides or small-world node counts.
    #[arg(long, value_delimiter = ',')]
    sizes: Vec<usize>,
    /// Comma-separated snapshot times.
    #[arg(long, value_delimiter = ',')]
    snapshot_times: Vec<u64>,
}

fn parse_kind(s: &str) -> std::result::Result<ExperimentKind, String> {
    toml::Value::String(s.into())
        .try_into()
        .map_err(|_| format!("unknown kind `{s}`"))
}

fn parse_net(s: &str) -> std::result::Result<NetKind, String> {
    s.parse().map_err(|e: Error| e.to_string())
}

fn parse_axis(s: &str) -> std::result::Result<SweepAxis, String> {
    s.parse().map_err(|e: Error| e.to_string())
}

impl Common {
    fn overrides(&self) -> Overrides {
        Overrides {
            master_seed: self.seed,
            seeds: self.seeds,
            steps: self.steps,
            tail: self.tail,
            out: self.out.clone(),
            label: self.label.clone(),
            r: self.r,
            beta: self.beta,
            m: self.m,
            kappa: self.kappa,
            alpha: self.alpha,
            gamma: self.gamma,
            epsilon: self.epsilon,
            p: self.p,
            q: self.q,
            net: self.net,
            side: self.side,
            n: self.n,
            ring_degree: self.ring_degree,
            rewire_prob: self.rewire_prob,
            axes: self.axis.clone(),
            sizes: self.sizes.clone(),
            snapshot_times: self.snapshot_times.clone(),
        }
    }

    fn load(&self) -> Result<(String, Vec<ExperimentConfig>)> {
        if let Some(name) = &self.preset {
            return Ok((name.clone(), preset(name)?));
        }
        let cfg = match &self.config {
            Some(path) => {
                let text = std::fs::read_to_string(path).map_err(|e| Error::Io {
                    path: path.clone(),
                    source: e,
                })?;
                ExperimentConfig::from_toml(&text)?
            }
            None => ExperimentConfig::default(),
        };
        Ok((String::new(), vec![cfg]))
    }
}

fn resolve(
    common: &Common,
    kind: Option<ExperimentKind>,
    forced: bool,
) -> Result<(String, Vec<ExperimentConfig>)> {
    let (mut name, mut cfgs) = common.load()?;
    let overrides = common.overrides();
    for cfg in &mut cfgs {
        overrides.apply(cfg);
        if let Some(kind) = kind {
            if forced || cfg.kind == ExperimentKind::Ensemble || cfg.kind == kind {
                cfg.kind = kind;
            } else {
                return Err(Error::Config {
                    field: "kind".into(),
                    reason: format!("`{}` is a {} experiment, not {kind}", cfg.label, cfg.kind),
                });
            }
        }
        cfg.validate()?;
    }
    if name.is_empty() {
        name = cfgs[0].label.clone();
    }
    Ok((name, cfgs))
}

fn execute(cli: Cli) -> Result<()> {
    let (name, cfgs) = match &cli.command {
        Command::Presets => {
            for name in PRESETS {
                println!("{name}\t{name}-desk");
            }
            return Ok(());
        }
        Command::Run { kind, common } => resolve(common, *kind, true)?,
        Command::Sweep(c) => resolve(c, Some(ExperimentKind::Sweep2d), false)?,
        Command::Snapshot(c) => resolve(c, Some(ExperimentKind::SnapshotRun), false)?,
        Command::SizeSweep(c) => resolve(c, Some(ExperimentKind::SizeSweep), false)?,
    };
    for path in run_plan(&name, &cfgs)? {
        println!("{}", path.display());
    }
    Ok(())
}

fn main() -> ExitCode {
    match execute(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("memsdg: {e}");
            ExitCode::FAILURE
        }
    }
}
