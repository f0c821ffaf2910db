//! Experiment configuration: TOML schema, validation, presets and overrides.
//!
//! An empty document is a valid configuration; every key falls back to the
//! defaults below and unknown keys are rejected.
//!
//! ```toml
//! label = "demo"
//! kind = "sweep2d"          # single-run | ensemble | sweep2d | size-sweep | snapshot-run
//! steps = 5000
//! tail = 500
//! seeds = 20
//! master_seed = 42
//! out = "out"
//!
//! [network]
//! kind = "lattice"          # lattice | ws
//! side = 50
//!
//! [params]
//! r = 0.6
//! beta = 0.5
//! m = 5
//!
//! [[axes]]
//! name = "p"
//! min = 0.0
//! max = 1.0
//! points = 11
//!
//! [[axes]]
//! name = "q"
//! min = 0.0
//! max = 1.0
//! points = 11
//! ```

use std::fmt;
use std::path::PathBuf;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::engine::{ParamValues, Params};
use crate::error::{Error, Result};
use crate::topology::NetworkSpec;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ExperimentKind {
    SingleRun,
    #[default]
    Ensemble,
    Sweep2d,
    SizeSweep,
    SnapshotRun,
}

impl fmt::Display for ExperimentKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let name = match self {
            ExperimentKind::SingleRun => "single-run",
            ExperimentKind::Ensemble => "ensemble",
            ExperimentKind::Sweep2d => "sweep2d",
            ExperimentKind::SizeSweep => "size-sweep",
            ExperimentKind::SnapshotRun => "snapshot-run",
        };
        f.write_str(name)
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum NetKind {
    #[default]
    Lattice,
    Ws,
}

impl FromStr for NetKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "lattice" => Ok(NetKind::Lattice),
            "ws" => Ok(NetKind::Ws),
            other => Err(Error::config(
                "network.kind",
                format!("expected `lattice` or `ws`, got `{other}`"),
            )),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct NetworkConfig {
    pub kind: NetKind,
    pub side: usize,
    pub n: usize,
    pub ring_degree: usize,
    pub rewire_prob: f64,
}

impl Default for NetworkConfig {
    fn default() -> Self {
        NetworkConfig {
            kind: NetKind::Lattice,
            side: 50,
            n: 2500,
            ring_degree: 4,
            rewire_prob: 0.2,
        }
    }
}

impl NetworkConfig {
    pub fn spec(&self) -> NetworkSpec {
        match self.kind {
            NetKind::Lattice => NetworkSpec::Lattice { side: self.side },
            NetKind::Ws => NetworkSpec::SmallWorld {
                n: self.n,
                ring_degree: self.ring_degree,
                rewire_prob: self.rewire_prob,
            },
        }
    }

    /// Same network family at another size: lattice side or small-world node count.
    pub fn with_size(&self, size: usize) -> Self {
        let mut out = *self;
        match self.kind {
            NetKind::Lattice => out.side = size,
            NetKind::Ws => out.n = size,
        }
        out
    }

    fn validate(&self) -> Result<()> {
        match self.kind {
            NetKind::Lattice if self.side < 2 => Err(Error::config(
                "network.side",
                format!("must be at least 2, got {}", self.side),
            )),
            NetKind::Ws if self.ring_degree == 0 || !self.ring_degree.is_multiple_of(2) => {
                Err(Error::config(
                    "network.ring_degree",
                    format!("must be even and positive, got {}", self.ring_degree),
                ))
            }
            NetKind::Ws if self.n <= self.ring_degree => Err(Error::config(
                "network.n",
                format!(
                    "must exceed ring_degree {}, got {}",
                    self.ring_degree, self.n
                ),
            )),
            NetKind::Ws if !(0.0..=1.0).contains(&self.rewire_prob) => Err(Error::config(
                "network.rewire_prob",
                format!("must lie in [0, 1], got {}", self.rewire_prob),
            )),
            _ => Ok(()),
        }
    }
}

/// Parameters a sweep axis may vary.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub enum SweepParam {
    P,
    Q,
    M,
    Beta,
    Alpha,
    Gamma,
    Epsilon,
    R,
}

impl SweepParam {
    pub fn name(self) -> &'static str {
        match self {
            SweepParam::P => "p",
            SweepParam::Q => "q",
            SweepParam::M => "M",
            SweepParam::Beta => "beta",
            SweepParam::Alpha => "alpha",
            SweepParam::Gamma => "gamma",
            SweepParam::Epsilon => "epsilon",
            SweepParam::R => "r",
        }
    }

    pub fn apply(self, values: &mut ParamValues, x: f64) {
        match self {
            SweepParam::P => values.p = x,
            SweepParam::Q => values.q = x,
            SweepParam::M => values.m = x.round() as usize,
            SweepParam::Beta => values.beta = x,
            SweepParam::Alpha => values.alpha = x,
            SweepParam::Gamma => values.gamma = x,
            SweepParam::Epsilon => values.epsilon = x,
            SweepParam::R => values.r = x,
        }
    }
}

impl FromStr for SweepParam {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Ok(match s {
            "p" => SweepParam::P,
            "q" => SweepParam::Q,
            "M" | "m" => SweepParam::M,
            "beta" => SweepParam::Beta,
            "alpha" => SweepParam::Alpha,
            "gamma" => SweepParam::Gamma,
            "epsilon" => SweepParam::Epsilon,
            "r" => SweepParam::R,
            other => {
                return Err(Error::config(
                    "axes.name",
                    format!(
                        "unknown parameter `{other}`; expected one of p, q, M, beta, alpha, gamma, epsilon, r"
                    ),
                ))
            }
        })
    }
}

impl TryFrom<String> for SweepParam {
    type Error = Error;

    fn try_from(s: String) -> Result<Self> {
        s.parse()
    }
}

impl From<SweepParam> for String {
    fn from(p: SweepParam) -> String {
        p.name().to_string()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepAxis {
    pub name: SweepParam,
    pub min: f64,
    pub max: f64,
    pub points: usize,
}

impl SweepAxis {
    /// Evenly spaced grid from `min` to `max` inclusive.
    pub fn values(&self) -> Vec<f64> {
        if self.points == 1 {
            return vec![self.min];
        }
        let span = self.max - self.min;
        let last = (self.points - 1) as f64;
        (0..self.points)
            .map(|k| {
                if k + 1 == self.points {
                    self.max
                } else {
                    self.min + span * k as f64 / last
                }
            })
            .collect()
    }
}

impl FromStr for SweepAxis {
    type Err = Error;

    /// `name:min:max:points`, e.g. `p:0:1:11`.
    fn from_str(s: &str) -> Result<Self> {
        let parts: Vec<&str> = s.split(':').collect();
        let [name, min, max, points] = parts.as_slice() else {
            return Err(Error::config(
                "axes",
                format!("expected name:min:max:points, got `{s}`"),
            ));
        };
        let num = |field: &str, v: &str| {
            v.parse::<f64>()
                .map_err(|_| Error::config(format!("axes.{field}"), format!("not a number: `{v}`")))
        };
        Ok(SweepAxis {
            name: name.parse()?,
            min: num("min", min)?,
            max: num("max", max)?,
            points: points
                .parse()
                .map_err(|_| Error::config("axes.points", format!("not an integer: `{points}`")))?,
        })
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ExperimentConfig {
    pub label: String,
    pub kind: ExperimentKind,
    pub steps: u64,
    pub tail: usize,
    pub seeds: usize,
    pub master_seed: u64,
    /// Length of the learner-count tail summarised by moments and a histogram.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub moments_tail: Option<usize>,
    pub snapshot_times: Vec<u64>,
    pub sizes: Vec<usize>,
    #[serde(skip_serializing)]
    pub out: PathBuf,
    pub network: NetworkConfig,
    pub params: ParamValues,
    pub axes: Vec<SweepAxis>,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        ExperimentConfig {
            label: "run".into(),
            kind: ExperimentKind::Ensemble,
            steps: 5000,
            tail: 500,
            seeds: 20,
            master_seed: 42,
            moments_tail: None,
            snapshot_times: vec![1, 10, 100, 1000],
            sizes: Vec::new(),
            out: PathBuf::from("out"),
            network: NetworkConfig::default(),
            params: ParamValues::default(),
            axes: Vec::new(),
        }
    }
}

fn param_error(e: Error) -> Error {
    match e {
        Error::InvalidParameter { name, reason } => Error::config(format!("params.{name}"), reason),
        other => other,
    }
}

impl ExperimentConfig {
    /// Deserialize without validating.
    pub fn from_toml(text: &str) -> Result<Self> {
        toml::from_str(text).map_err(|e| {
            let reason = e.message().to_string();
            let field = e
                .span()
                .and_then(|span| text.get(..span.start))
                .map(|prefix| format!("line {}", prefix.lines().count().max(1)))
                .unwrap_or_else(|| "config".into());
            Error::config(field, reason)
        })
    }

    /// The configuration as TOML, without the output directory.
    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("config serializes")
    }

    pub fn build_params(&self) -> Result<Params> {
        self.params.build().map_err(param_error)
    }

    pub fn validate(&self) -> Result<()> {
        if self.label.is_empty()
            || !self
                .label
                .chars()
                .all(|c| c.is_ascii_alphanumeric() || matches!(c, '_' | '-' | '.'))
        {
            return Err(Error::config(
                "label",
                format!(
                    "must be non-empty and use only [A-Za-z0-9_.-], got `{}`",
                    self.label
                ),
            ));
        }
        self.build_params()?;
        self.network.validate()?;
        if self.steps == 0 {
            return Err(Error::config("steps", "must be at least 1"));
        }
        if self.tail == 0 || self.tail as u64 > self.steps {
            return Err(Error::config(
                "tail",
                format!("must lie in [1, steps = {}], got {}", self.steps, self.tail),
            ));
        }
        if self.seeds == 0 {
            return Err(Error::config("seeds", "must be at least 1"));
        }
        if let Some(mt) = self.moments_tail {
            if mt < 4 || mt as u64 > self.steps {
                return Err(Error::config(
                    "moments_tail",
                    format!("must lie in [4, steps = {}], got {mt}", self.steps),
                ));
            }
        }

        match self.kind {
            ExperimentKind::Sweep2d => self.validate_axes()?,
            _ if !self.axes.is_empty() => {
                return Err(Error::config(
                    "axes",
                    format!("sweep axes given for a {} experiment", self.kind),
                ))
            }
            _ => {}
        }
        if self.kind == ExperimentKind::SizeSweep {
            if self.sizes.is_empty() {
                return Err(Error::config("sizes", "size sweep needs at least one size"));
            }
            for &size in &self.sizes {
                self.network
                    .with_size(size)
                    .validate()
                    .map_err(|e| Error::config("sizes", e.to_string()))?;
            }
        }
        if self.kind == ExperimentKind::SnapshotRun {
            if self.network.kind != NetKind::Lattice {
                return Err(Error::config(
                    "network.kind",
                    "snapshots need a square lattice",
                ));
            }
            if self.snapshot_times.is_empty() {
                return Err(Error::config("snapshot_times", "need at least one time"));
            }
            if let Some(&t) = self.snapshot_times.iter().find(|&&t| t > self.steps) {
                return Err(Error::config(
                    "snapshot_times",
                    format!("time {t} exceeds steps = {}", self.steps),
                ));
            }
        }
        Ok(())
    }

    fn validate_axes(&self) -> Result<()> {
        if self.axes.len() != 2 {
            return Err(Error::config(
                "axes",
                format!(
                    "a 2-D sweep needs exactly two axes, got {}",
                    self.axes.len()
                ),
            ));
        }
        if self.axes[0].name == self.axes[1].name {
            return Err(Error::config("axes", "the two axes must differ"));
        }
        for axis in &self.axes {
            if axis.points < 2 {
                return Err(Error::config(
                    "axes.points",
                    format!("axis {} needs at least 2 points", axis.name.name()),
                ));
            }
            if axis.min.is_nan() || axis.max.is_nan() || axis.min > axis.max {
                return Err(Error::config(
                    "axes.min",
                    format!("axis {} has min > max", axis.name.name()),
                ));
            }
            for x in axis.values() {
                let mut values = self.params;
                axis.name.apply(&mut values, x);
                values.build().map_err(|e| {
                    Error::config(
                        format!("axes.{}", axis.name.name()),
                        format!("grid value {x}: {e}"),
                    )
                })?;
            }
        }
        Ok(())
    }

    /// Parameter values at one sweep cell.
    pub fn cell_params(&self, x: f64, y: f64) -> ParamValues {
        let mut values = self.params;
        self.axes[0].name.apply(&mut values, x);
        self.axes[1].name.apply(&mut values, y);
        values
    }
}

/// Parse and validate a TOML configuration.
pub fn parse_config(text: &str) -> Result<ExperimentConfig> {
    let cfg = ExperimentConfig::from_toml(text)?;
    cfg.validate()?;
    Ok(cfg)
}

/// Command-line values that replace configuration entries.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct Overrides {
    pub master_seed: Option<u64>,
    pub seeds: Option<usize>,
    pub steps: Option<u64>,
    pub tail: Option<usize>,
    pub out: Option<PathBuf>,
    pub label: Option<String>,
    pub r: Option<f64>,
    pub beta: Option<f64>,
    pub m: Option<usize>,
    pub kappa: Option<f64>,
    pub alpha: Option<f64>,
    pub gamma: Option<f64>,
    pub epsilon: Option<f64>,
    pub p: Option<f64>,
    pub q: Option<f64>,
    pub net: Option<NetKind>,
    pub side: Option<usize>,
    pub n: Option<usize>,
    pub ring_degree: Option<usize>,
    pub rewire_prob: Option<f64>,
    pub axes: Vec<SweepAxis>,
    pub sizes: Vec<usize>,
    pub snapshot_times: Vec<u64>,
}

impl Overrides {
    pub fn apply(&self, cfg: &mut ExperimentConfig) {
        fn set<T: Clone>(slot: &mut T, v: &Option<T>) {
            if let Some(v) = v {
                *slot = v.clone();
            }
        }
        set(&mut cfg.master_seed, &self.master_seed);
        set(&mut cfg.seeds, &self.seeds);
        set(&mut cfg.steps, &self.steps);
        set(&mut cfg.tail, &self.tail);
        set(&mut cfg.out, &self.out);
        set(&mut cfg.label, &self.label);
        set(&mut cfg.params.r, &self.r);
        set(&mut cfg.params.beta, &self.beta);
        set(&mut cfg.params.m, &self.m);
        set(&mut cfg.params.kappa, &self.kappa);
        set(&mut cfg.params.alpha, &self.alpha);
        set(&mut cfg.params.gamma, &self.gamma);
        set(&mut cfg.params.epsilon, &self.epsilon);
        set(&mut cfg.params.p, &self.p);
        set(&mut cfg.params.q, &self.q);
        set(&mut cfg.network.kind, &self.net);
        set(&mut cfg.network.side, &self.side);
        set(&mut cfg.network.n, &self.n);
        set(&mut cfg.network.ring_degree, &self.ring_degree);
        set(&mut cfg.network.rewire_prob, &self.rewire_prob);
        if !self.axes.is_empty() {
            cfg.axes = self.axes.clone();
        }
        if !self.sizes.is_empty() {
            cfg.sizes = self.sizes.clone();
        }
        if !self.snapshot_times.is_empty() {
            cfg.snapshot_times = self.snapshot_times.clone();
        }
    }
}

/// Names accepted by [`preset`]; each also has a `-desk` flavour.
pub const PRESETS: &[&str] = &[
    "fig2", "table1", "table2", "fig3", "fig4", "fig5", "fig6", "fig7", "fig8", "fig9",
];

const PQ_PAIRS: [(f64, f64); 3] = [(0.8, 0.5), (0.5, 0.5), (0.5, 0.8)];

fn with(f: impl FnOnce(&mut ExperimentConfig)) -> ExperimentConfig {
    let mut cfg = ExperimentConfig::default();
    f(&mut cfg);
    cfg
}

fn axis(name: SweepParam, min: f64, max: f64, points: usize) -> SweepAxis {
    SweepAxis {
        name,
        min,
        max,
        points,
    }
}

fn both_networks(base: ExperimentConfig) -> Vec<ExperimentConfig> {
    [(NetKind::Lattice, "sl"), (NetKind::Ws, "ws")]
        .into_iter()
        .map(|(kind, tag)| {
            let mut cfg = base.clone();
            cfg.network.kind = kind;
            cfg.label = format!("{}_{tag}", base.label);
            cfg
        })
        .collect()
}

fn pq_label(prefix: &str, p: f64, q: f64) -> String {
    format!("{prefix}_p{p}_q{q}")
}

fn full_preset(name: &str) -> Option<Vec<ExperimentConfig>> {
    use SweepParam::*;
    let unit = |name| axis(name, 0.0, 1.0, 11);
    let cfgs = match name {
        "fig2" => PQ_PAIRS
            .iter()
            .map(|&(p, q)| {
                with(|c| {
                    c.label = pq_label("fig2", p, q);
                    c.kind = ExperimentKind::SingleRun;
                    c.tail = 1000;
                    c.params.p = p;
                    c.params.q = q;
                })
            })
            .collect(),
        "table1" => PQ_PAIRS
            .iter()
            .map(|&(p, q)| {
                with(|c| {
                    c.label = pq_label("table1", p, q);
                    c.kind = ExperimentKind::Ensemble;
                    c.tail = 1000;
                    c.params.p = p;
                    c.params.q = q;
                })
            })
            .collect(),
        "table2" => PQ_PAIRS
            .iter()
            .map(|&(p, q)| {
                with(|c| {
                    c.label = pq_label("table2", p, q);
                    c.kind = ExperimentKind::SingleRun;
                    c.tail = 1000;
                    c.moments_tail = Some(4000);
                    c.params.p = p;
                    c.params.q = q;
                })
            })
            .collect(),
        "fig3" => both_networks(with(|c| {
            c.label = "fig3".into();
            c.kind = ExperimentKind::Sweep2d;
            c.params.r = 0.6;
            c.params.beta = 0.5;
            c.params.m = 5;
            c.axes = vec![unit(P), unit(Q)];
        })),
        "fig4" | "fig5" => both_networks(with(|c| {
            c.label = name.into();
            c.kind = ExperimentKind::Sweep2d;
            c.params.r = 0.3;
            (c.params.p, c.params.q) = if name == "fig4" {
                (0.5, 0.5)
            } else {
                (1.0, 0.0)
            };
            c.axes = vec![unit(Beta), axis(M, 1.0, 15.0, 15)];
        })),
        "fig6" => both_networks(with(|c| {
            c.label = "fig6".into();
            c.kind = ExperimentKind::Sweep2d;
            c.params.r = 0.5;
            c.params.beta = 0.5;
            c.params.m = 5;
            c.axes = vec![unit(Alpha), unit(Gamma)];
        })),
        "fig7" => both_networks(with(|c| {
            c.label = "fig7".into();
            c.kind = ExperimentKind::Sweep2d;
            c.params.p = 0.4;
            c.params.q = 0.8;
            c.params.beta = 0.5;
            c.params.m = 5;
            c.axes = vec![unit(Epsilon), unit(R)];
        })),
        "fig8" => [(0.9, 0.3), (0.9, 0.5), (0.1, 0.5)]
            .iter()
            .map(|&(beta, r)| {
                with(|c| {
                    c.label = format!("fig8_beta{beta}_r{r}");
                    c.kind = ExperimentKind::SnapshotRun;
                    c.seeds = 1;
                    c.params.p = 1.0;
                    c.params.q = 0.0;
                    c.params.m = 10;
                    c.params.beta = beta;
                    c.params.r = r;
                })
            })
            .collect(),
        "fig9" => {
            let memory_sets = [(5usize, 0.3), (10, 0.6), (15, 0.9)].map(|(m, beta)| {
                with(|c| {
                    c.label = format!("fig9_M{m}_beta{beta}");
                    c.params.m = m;
                    c.params.beta = beta;
                    c.params.p = 1.0;
                    c.params.q = 0.0;
                    c.params.r = 0.5;
                })
            });
            let game_sets = [(0.2, 0.3), (0.5, 0.6), (0.8, 0.9)].map(|(r, p)| {
                with(|c| {
                    c.label = format!("fig9_r{r}_p{p}");
                    c.params.r = r;
                    c.params.p = p;
                    c.params.q = 0.5;
                    c.params.beta = 0.6;
                    c.params.m = 10;
                })
            });
            memory_sets
                .into_iter()
                .chain(game_sets)
                .flat_map(|mut c| {
                    c.kind = ExperimentKind::SizeSweep;
                    let mut sl = c.clone();
                    sl.label = format!("{}_sl", c.label);
                    sl.network.kind = NetKind::Lattice;
                    sl.sizes = vec![20, 30, 40, 50];
                    c.label = format!("{}_ws", c.label);
                    c.network.kind = NetKind::Ws;
                    c.sizes = vec![400, 900, 1600, 2500];
                    [sl, c]
                })
                .collect()
        }
        _ => return None,
    };
    Some(cfgs)
}

/// Shrink a configuration to something that finishes in seconds.
fn desk(mut cfg: ExperimentConfig) -> ExperimentConfig {
    cfg.network.side = cfg.network.side.min(20);
    cfg.network.n = cfg.network.n.min(400);
    cfg.steps = cfg.steps.min(1000);
    cfg.tail = cfg.tail.min(200);
    cfg.seeds = cfg.seeds.min(2);
    cfg.moments_tail = cfg.moments_tail.map(|t| t.min(800));
    for a in &mut cfg.axes {
        a.points = 3;
    }
    cfg.sizes = match cfg.network.kind {
        NetKind::Lattice if !cfg.sizes.is_empty() => vec![10, 15, 20],
        NetKind::Ws if !cfg.sizes.is_empty() => vec![100, 225, 400],
        _ => cfg.sizes,
    };
    cfg
}

/// The configurations a named preset expands to, in execution order.
pub fn preset(name: &str) -> Result<Vec<ExperimentConfig>> {
    let (base, is_desk) = match name.strip_suffix("-desk") {
        Some(base) => (base, true),
        None => (name, false),
    };
    let cfgs = full_preset(base).ok_or_else(|| {
        Error::config(
            "preset",
            format!(
                "unknown preset `{name}`; known: {} (each also as <name>-desk)",
                PRESETS.join(", ")
            ),
        )
    })?;
    Ok(if is_desk {
        cfgs.into_iter().map(desk).collect()
    } else {
        cfgs
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_config_is_all_defaults() {
        let cfg = parse_config("").unwrap();
        assert_eq!(cfg.network.kind, NetKind::Lattice);
        assert_eq!(cfg.network.side, 50);
        assert_eq!(cfg.steps, 5000);
        assert_eq!(cfg.tail, 500);
        assert_eq!(cfg.seeds, 20);
        assert_eq!(cfg.master_seed, 42);
        assert_eq!(cfg.params.epsilon, 0.1);
        assert_eq!(cfg.params.kappa, 0.1);
        assert_eq!(cfg.kind, ExperimentKind::Ensemble);
    }

    #[test]
    fn out_of_range_r() {
        let err = parse_config("[params]\nr = 1.5\n").unwrap_err();
        match err {
            Error::Config { field, .. } => assert_eq!(field, "params.r"),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn unknown_sweep_parameter() {
        let text = r#"
kind = "sweep2d"
[[axes]]
name = "kappa2"
min = 0.0
max = 1.0
points = 3
"#;
        let err = parse_config(text).unwrap_err().to_string();
        assert!(err.contains("kappa2"), "{err}");
        assert!("kappa2".parse::<SweepParam>().is_err());
    }

    #[test]
    fn unknown_keys_rejected() {
        let err = parse_config("stepz = 3\n").unwrap_err().to_string();
        assert!(err.contains("stepz"), "{err}");
        assert!(parse_config("[params]\nkappa2 = 0.3\n").is_err());
        assert!(parse_config("steps = \"many\"\n").is_err());
    }

    #[test]
    fn sweep_validation() {
        let base = "kind = \"sweep2d\"\n";
        assert!(parse_config(base).is_err());
        let two = format!(
            "{base}[[axes]]\nname = \"p\"\nmin = 0.0\nmax = 1.0\npoints = 3\n\
             [[axes]]\nname = \"q\"\nmin = 0.0\nmax = 1.0\npoints = 3\n"
        );
        let cfg = parse_config(&two).unwrap();
        assert_eq!(cfg.axes[0].values(), vec![0.0, 0.5, 1.0]);
        assert!(parse_config(&two.replace("points = 3", "points = 1")).is_err());
        assert!(parse_config(&two.replace("max = 1.0", "max = 1.5")).is_err());
        let same = two.replace("name = \"q\"", "name = \"p\"");
        assert!(parse_config(&same).is_err());
        let stray = "[[axes]]\nname = \"p\"\nmin = 0.0\nmax = 1.0\npoints = 3\n";
        assert!(parse_config(stray).is_err());
    }

    #[test]
    fn other_validation() {
        assert!(parse_config("tail = 6000\n").is_err());
        assert!(parse_config("seeds = 0\n").is_err());
        assert!(parse_config("steps = 0\n").is_err());
        assert!(parse_config("label = \"a b\"\n").is_err());
        assert!(parse_config("[network]\nkind = \"ws\"\nring_degree = 3\n").is_err());
        assert!(parse_config("[network]\nkind = \"ws\"\nn = 4\n").is_err());
        assert!(parse_config("[network]\nside = 1\n").is_err());
        assert!(parse_config("kind = \"size-sweep\"\n").is_err());
        assert!(parse_config("kind = \"size-sweep\"\nsizes = [1]\n").is_err());
        assert!(parse_config("kind = \"snapshot-run\"\n[network]\nkind = \"ws\"\n").is_err());
        assert!(parse_config("kind = \"snapshot-run\"\nsteps = 10\ntail = 5\n").is_err());
        assert!(parse_config("moments_tail = 2\n").is_err());
    }

    #[test]
    fn axis_from_flag() {
        let a: SweepAxis = "M:1:15:15".parse().unwrap();
        assert_eq!(a.name, SweepParam::M);
        assert_eq!(a.values().len(), 15);
        assert_eq!(a.values()[14], 15.0);
        assert!("p:0:1".parse::<SweepAxis>().is_err());
        assert!("z:0:1:3".parse::<SweepAxis>().is_err());
    }

    #[test]
    fn overrides_replace_fields() {
        let mut cfg = ExperimentConfig::default();
        let o = Overrides {
            r: Some(0.25),
            net: Some(NetKind::Ws),
            n: Some(900),
            seeds: Some(3),
            ..Overrides::default()
        };
        o.apply(&mut cfg);
        assert_eq!(cfg.params.r, 0.25);
        assert_eq!(
            cfg.network.spec(),
            NetworkSpec::SmallWorld {
                n: 900,
                ring_degree: 4,
                rewire_prob: 0.2
            }
        );
        assert_eq!(cfg.seeds, 3);
        cfg.validate().unwrap();
    }

    #[test]
    fn presets_are_valid() {
        for name in PRESETS {
            for flavour in [name.to_string(), format!("{name}-desk")] {
                let cfgs = preset(&flavour).unwrap();
                assert!(!cfgs.is_empty());
                for c in &cfgs {
                    c.validate()
                        .unwrap_or_else(|e| panic!("{flavour}/{}: {e}", c.label));
                }
                let mut labels: Vec<_> = cfgs.iter().map(|c| c.label.clone()).collect();
                labels.sort();
                labels.dedup();
                assert_eq!(labels.len(), cfgs.len(), "{flavour}");
            }
        }
        assert!(preset("fig99").is_err());
    }

    #[test]
    fn preset_parameters() {
        let t1 = preset("table1").unwrap();
        assert_eq!(t1.len(), 3);
        assert!(t1
            .iter()
            .all(|c| c.steps == 5000 && c.tail == 1000 && c.network.side == 50));
        let f8 = preset("fig8").unwrap();
        assert!(f8
            .iter()
            .all(|c| c.params.p == 1.0 && c.params.q == 0.0 && c.params.m == 10));
        assert_eq!(f8[0].snapshot_times, vec![1, 10, 100, 1000]);
    }

    #[test]
    fn toml_round_trip() {
        let cfg = preset("fig3").unwrap().remove(0);
        let back = ExperimentConfig::from_toml(&cfg.to_toml()).unwrap();
        assert_eq!(
            ExperimentConfig {
                out: cfg.out.clone(),
                ..back
            },
            cfg
        );
    }
}
