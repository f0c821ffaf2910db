//! Trajectories and ensembles.
//!
//! One call to [`SimState::step`] runs five phases in order, each reading
//! the population as it stood when that phase began:
//!
//! 1. play: every agent plays every neighbour and stores the round payoff;
//! 2. utility: every agent's discounted memory payoff is evaluated;
//! 3. strategy: next strategies are computed for all agents against the same
//!    pre-update strategy vector, then applied together;
//! 4. category: every agent takes one step of the learner/profiteer chain;
//! 5. the clock advances and a metrics record is taken.
//!
//! Random draws come from a single stream in a fixed order. Initialisation
//! draws one `bool` per agent for the strategy (`true` cooperates), then one
//! `bool` per agent for the category (`true` is a learner). In the strategy
//! phase agents are visited by ascending id: a profiteer draws a neighbour
//! index with `gen_range` and then one `f64` for the Fermi test; a learner
//! draws one `f64` for the explore test and, when exploring or facing an
//! exact tie, one `bool` for the action. The category phase draws one `f64`
//! per agent, again by ascending id.

use std::collections::BTreeSet;
use std::sync::Arc;

use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::agents::{
    coin, fermi_adopt, q_select, q_update, state_index, AgentState, Category, FermiParams,
    QLearnParams, QTable, Transition,
};
use crate::category::{step_category, TransitionParams};
use crate::error::{Error, Result};
use crate::game::{
    memory_payoff, round_payoff, MemoryParams, PayoffHistory, PayoffParams, Strategy,
};
use crate::rng::{sim_rng, SimRng};
use crate::stats::tail_mean;
use crate::topology::{Network, NetworkSpec};

/// Validated model constants.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Params {
    pub payoff: PayoffParams,
    pub memory: MemoryParams,
    pub fermi: FermiParams,
    pub qlearn: QLearnParams,
    pub transition: TransitionParams,
    /// Initial value of every Q-table entry.
    pub q_init: f64,
}

/// Raw parameter values as they appear in configuration files.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ParamValues {
    pub r: f64,
    pub m: usize,
    pub beta: f64,
    pub kappa: f64,
    pub alpha: f64,
    pub gamma: f64,
    pub epsilon: f64,
    pub p: f64,
    pub q: f64,
    pub q_init: f64,
}

impl Default for ParamValues {
    fn default() -> Self {
        ParamValues {
            r: 0.5,
            m: 5,
            beta: 0.5,
            kappa: 0.1,
            alpha: 0.8,
            gamma: 0.2,
            epsilon: 0.1,
            p: 0.5,
            q: 0.5,
            q_init: 0.0,
        }
    }
}

impl ParamValues {
    pub fn build(&self) -> Result<Params> {
        if !self.q_init.is_finite() {
            return Err(Error::param("q_init", "must be finite"));
        }
        Ok(Params {
            payoff: PayoffParams::new(self.r)?,
            memory: MemoryParams::new(self.m, self.beta)?,
            fermi: FermiParams::new(self.kappa)?,
            qlearn: QLearnParams::new(self.alpha, self.gamma, self.epsilon)?,
            transition: TransitionParams::new(self.p, self.q)?,
            q_init: self.q_init,
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct MetricsRecord {
    pub t: u64,
    pub cooperators: usize,
    pub learners: usize,
    pub n: usize,
}

impl MetricsRecord {
    /// Fraction of agents playing cooperate.
    pub fn f_c(&self) -> f64 {
        self.cooperators as f64 / self.n as f64
    }

    pub fn profiteers(&self) -> usize {
        self.n - self.learners
    }
}

/// One record per step, in time order.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct MetricsSeries {
    pub records: Vec<MetricsRecord>,
}

impl MetricsSeries {
    pub fn len(&self) -> usize {
        self.records.len()
    }

    pub fn is_empty(&self) -> bool {
        self.records.is_empty()
    }

    pub fn f_c(&self) -> Vec<f64> {
        self.records.iter().map(MetricsRecord::f_c).collect()
    }

    pub fn learner_counts(&self) -> Vec<f64> {
        self.records.iter().map(|r| r.learners as f64).collect()
    }

    pub fn profiteer_counts(&self) -> Vec<f64> {
        self.records.iter().map(|r| r.profiteers() as f64).collect()
    }
}

/// Strategy vector at time `t`.
#[derive(Clone, Debug, PartialEq)]
pub struct Snapshot {
    pub t: u64,
    pub side: Option<usize>,
    pub strategies: Vec<Strategy>,
}

impl Snapshot {
    /// `t=<t> side=<side>` followed by `side` rows of `C`/`D`, each ending in `\n`.
    pub fn to_text(&self) -> Result<String> {
        let side = self
            .side
            .ok_or_else(|| Error::InvalidState("text snapshots need a square lattice".into()))?;
        let mut out = format!("t={} side={}\n", self.t, side);
        out.reserve(side * (side + 1));
        for row in self.strategies.chunks(side) {
            out.extend(row.iter().map(|s| s.to_char()));
            out.push('\n');
        }
        Ok(out)
    }
}

/// Everything needed to continue one trajectory.
#[derive(Clone, Debug, PartialEq)]
pub struct SimState {
    net: Arc<Network>,
    agents: Vec<AgentState>,
    t: u64,
    rng: SimRng,
    scratch: Scratch,
}

#[derive(Clone, Debug, Default, PartialEq)]
struct Scratch {
    strategies: Vec<Strategy>,
    utilities: Vec<f64>,
    next: Vec<Strategy>,
}

/// Fresh population: coin-toss strategies and categories, empty memories,
/// constant Q-tables, no pending transitions.
pub fn init(net: Arc<Network>, params: &Params, seed: u64) -> SimState {
    let mut rng = sim_rng(seed);
    let n = net.n();
    let strategies: Vec<Strategy> = (0..n).map(|_| coin(&mut rng)).collect();
    let categories: Vec<Category> = (0..n)
        .map(|_| {
            if rng.gen::<bool>() {
                Category::Learner
            } else {
                Category::Profiteer
            }
        })
        .collect();
    let rows = net.max_degree();
    let agents = strategies
        .into_iter()
        .zip(categories)
        .map(|(strategy, category)| AgentState {
            strategy,
            category,
            hist: PayoffHistory::new(params.memory.m()),
            qtable: QTable::new(rows, params.q_init),
            last: None,
        })
        .collect();
    SimState {
        net,
        agents,
        t: 0,
        rng,
        scratch: Scratch::default(),
    }
}

impl SimState {
    pub fn t(&self) -> u64 {
        self.t
    }

    pub fn network(&self) -> &Network {
        &self.net
    }

    pub fn agents(&self) -> &[AgentState] {
        &self.agents
    }

    pub fn strategies(&self) -> Vec<Strategy> {
        self.agents.iter().map(|a| a.strategy).collect()
    }

    pub fn cooperators(&self) -> usize {
        self.agents
            .iter()
            .filter(|a| a.strategy.is_cooperate())
            .count()
    }

    pub fn learners(&self) -> usize {
        self.agents
            .iter()
            .filter(|a| a.category == Category::Learner)
            .count()
    }

    pub fn record(&self) -> MetricsRecord {
        MetricsRecord {
            t: self.t,
            cooperators: self.cooperators(),
            learners: self.learners(),
            n: self.agents.len(),
        }
    }

    pub fn snapshot(&self) -> Snapshot {
        Snapshot {
            t: self.t,
            side: self.net.side(),
            strategies: self.strategies(),
        }
    }

    /// Advance one round and return the record taken at its end.
    pub fn step(&mut self, params: &Params) -> Result<MetricsRecord> {
        let net = Arc::clone(&self.net);
        let n = net.n();
        let Scratch {
            strategies,
            utilities,
            next,
        } = &mut self.scratch;
        strategies.clear();
        strategies.extend(self.agents.iter().map(|a| a.strategy));

        for (i, agent) in self.agents.iter_mut().enumerate() {
            let pi = round_payoff(&net, i, strategies, params.payoff)?;
            agent.hist.push_round(pi);
        }

        utilities.clear();
        for agent in &self.agents {
            utilities.push(memory_payoff(&agent.hist, params.memory)?);
        }

        next.clear();
        next.resize(n, Strategy::Defect);
        for (i, agent) in self.agents.iter_mut().enumerate() {
            next[i] = match agent.category {
                Category::Profiteer => {
                    let nb = net.neighbors(i)?;
                    if nb.is_empty() {
                        return Err(Error::InvalidState(format!("node {i} has no neighbours")));
                    }
                    let j = nb[self.rng.gen_range(0..nb.len())];
                    agent.last = None;
                    fermi_adopt(
                        strategies[i],
                        utilities[i],
                        strategies[j],
                        utilities[j],
                        params.fermi,
                        &mut self.rng,
                    )
                }
                Category::Learner => {
                    let state = state_index(i, &net, strategies)?;
                    if let Some(prev) = agent.last {
                        q_update(
                            &mut agent.qtable,
                            prev.state,
                            prev.action,
                            utilities[i],
                            state,
                            params.qlearn,
                        )?;
                    }
                    let action = q_select(&agent.qtable, state, params.qlearn, &mut self.rng)?;
                    agent.last = Some(Transition { state, action });
                    action
                }
            };
        }
        for (agent, &s) in self.agents.iter_mut().zip(next.iter()) {
            agent.strategy = s;
        }

        for agent in &mut self.agents {
            agent.category = step_category(agent.category, params.transition, &mut self.rng);
        }

        self.t += 1;
        Ok(self.record())
    }
}

/// Free-function form of [`SimState::step`].
pub fn step(state: &mut SimState, params: &Params) -> Result<MetricsRecord> {
    state.step(params)
}

/// Initialise from `seed`, advance `steps` rounds, and capture snapshots
/// whenever the clock hits one of `snapshot_times`.
pub fn run(
    net: Arc<Network>,
    params: &Params,
    seed: u64,
    steps: u64,
    snapshot_times: &BTreeSet<u64>,
) -> Result<(MetricsSeries, Vec<Snapshot>)> {
    if steps == 0 {
        return Err(Error::param("steps", "must be at least 1"));
    }
    let mut state = init(net, params, seed);
    let mut series = MetricsSeries {
        records: Vec::with_capacity(steps as usize),
    };
    let mut snapshots = Vec::new();
    if snapshot_times.contains(&0) {
        snapshots.push(state.snapshot());
    }
    for _ in 0..steps {
        let record = state.step(params)?;
        series.records.push(record);
        if snapshot_times.contains(&record.t) {
            snapshots.push(state.snapshot());
        }
    }
    Ok((series, snapshots))
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct RunSummary {
    pub seed: u64,
    pub mean_fc: f64,
    pub mean_learners: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct EnsembleSummary {
    /// In seed order.
    pub runs: Vec<RunSummary>,
    pub mean_fc: f64,
    pub mean_learners: f64,
}

impl EnsembleSummary {
    /// Sample standard error of the per-run cooperation means.
    pub fn fc_standard_error(&self) -> f64 {
        let k = self.runs.len();
        if k < 2 {
            return 0.0;
        }
        let var = self
            .runs
            .iter()
            .map(|r| (r.mean_fc - self.mean_fc).powi(2))
            .sum::<f64>()
            / (k - 1) as f64;
        (var / k as f64).sqrt()
    }
}

/// Independent runs, one per seed, executed in parallel.
///
/// Small-world graphs are rebuilt from every seed; a lattice is built once
/// and shared.
pub fn run_ensemble(
    spec: &NetworkSpec,
    params: &Params,
    seeds: &[u64],
    steps: u64,
    tail: usize,
) -> Result<EnsembleSummary> {
    if seeds.is_empty() {
        return Err(Error::param("seeds", "ensemble needs at least one seed"));
    }
    if tail == 0 || tail as u64 > steps {
        return Err(Error::param(
            "tail",
            format!("must lie in [1, steps = {steps}], got {tail}"),
        ));
    }
    let shared = if spec.is_random() {
        None
    } else {
        Some(Arc::new(spec.build(0)?))
    };
    let none = BTreeSet::new();
    let runs = seeds
        .par_iter()
        .map(|&seed| {
            let net = match &shared {
                Some(net) => Arc::clone(net),
                None => Arc::new(spec.build(seed)?),
            };
            let (series, _) = run(net, params, seed, steps, &none)?;
            Ok(RunSummary {
                seed,
                mean_fc: tail_mean(&series.f_c(), tail)?,
                mean_learners: tail_mean(&series.learner_counts(), tail)?,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let k = runs.len() as f64;
    let mean_fc = runs.iter().map(|r| r.mean_fc).sum::<f64>() / k;
    let mean_learners = runs.iter().map(|r| r.mean_learners).sum::<f64>() / k;
    Ok(EnsembleSummary {
        runs,
        mean_fc,
        mean_learners,
    })
}
