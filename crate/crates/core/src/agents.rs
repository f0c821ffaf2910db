//! Strategy update rules and per-agent state.
//!
//! Profiteers imitate a uniformly chosen neighbour with the Fermi
//! probability. Learners keep a Q-table whose rows are indexed by the number
//! of cooperating neighbours and whose columns are the two actions.

use rand::Rng;

use crate::error::{Error, Result};
use crate::game::{memory_payoff, MemoryParams, PayoffHistory, Strategy};
use crate::topology::Network;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Category {
    Profiteer,
    Learner,
}

/// Fermi noise `κ`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct FermiParams {
    kappa: f64,
}

impl FermiParams {
    pub fn new(kappa: f64) -> Result<Self> {
        if !(kappa > 0.0 && kappa.is_finite()) {
            return Err(Error::param(
                "kappa",
                format!("must be positive, got {kappa}"),
            ));
        }
        Ok(FermiParams { kappa })
    }

    pub fn kappa(&self) -> f64 {
        self.kappa
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct QLearnParams {
    alpha: f64,
    gamma: f64,
    epsilon: f64,
}

impl QLearnParams {
    pub fn new(alpha: f64, gamma: f64, epsilon: f64) -> Result<Self> {
        for (name, v) in [("alpha", alpha), ("gamma", gamma), ("epsilon", epsilon)] {
            if !(0.0..=1.0).contains(&v) {
                return Err(Error::param(name, format!("must lie in [0, 1], got {v}")));
            }
        }
        Ok(QLearnParams {
            alpha,
            gamma,
            epsilon,
        })
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn gamma(&self) -> f64 {
        self.gamma
    }

    pub fn epsilon(&self) -> f64 {
        self.epsilon
    }
}

/// Action values, one `[cooperate, defect]` row per cooperating-neighbour count.
#[derive(Clone, Debug, PartialEq)]
pub struct QTable {
    rows: Vec<[f64; 2]>,
}

impl QTable {
    /// Table for agents of degree at most `max_degree`, every entry `init`.
    pub fn new(max_degree: usize, init: f64) -> Self {
        QTable {
            rows: vec![[init; 2]; max_degree + 1],
        }
    }

    pub fn states(&self) -> usize {
        self.rows.len()
    }

    pub fn row(&self, state: usize) -> Result<[f64; 2]> {
        self.rows.get(state).copied().ok_or_else(|| {
            Error::param(
                "state",
                format!(
                    "state {state} outside Q-table with {} rows",
                    self.rows.len()
                ),
            )
        })
    }

    pub fn get(&self, state: usize, action: Strategy) -> Result<f64> {
        Ok(self.row(state)?[action.index()])
    }

    pub fn set(&mut self, state: usize, action: Strategy, value: f64) -> Result<()> {
        let n = self.rows.len();
        let row = self
            .rows
            .get_mut(state)
            .ok_or_else(|| Error::param("state", format!("state {state} outside {n} rows")))?;
        row[action.index()] = value;
        Ok(())
    }
}

/// The `(S_t, A_t)` pair a learner still owes a Q-update for.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Transition {
    pub state: usize,
    pub action: Strategy,
}

#[derive(Clone, Debug, PartialEq)]
pub struct AgentState {
    pub strategy: Strategy,
    pub category: Category,
    pub hist: PayoffHistory,
    pub qtable: QTable,
    pub last: Option<Transition>,
}

/// Probability that an agent with utility `u_i` adopts the strategy of a
/// neighbour with utility `u_j`.
pub fn fermi_prob(u_i: f64, u_j: f64, fp: FermiParams) -> f64 {
    let p = 1.0 / (1.0 + ((u_i - u_j) / fp.kappa).exp());
    if p.is_nan() {
        // Only reachable with infinite utilities of equal sign.
        0.5
    } else {
        p.clamp(0.0, 1.0)
    }
}

/// One Fermi imitation decision against an already chosen neighbour.
///
/// Consumes exactly one `f64` draw.
pub fn fermi_adopt<R: Rng + ?Sized>(
    own: Strategy,
    own_u: f64,
    other: Strategy,
    other_u: f64,
    fp: FermiParams,
    rng: &mut R,
) -> Strategy {
    if rng.gen::<f64>() < fermi_prob(own_u, other_u, fp) {
        other
    } else {
        own
    }
}

/// Profiteer update of node `i`: pick a uniform neighbour `j`, then adopt
/// `s_j` with the Fermi probability of the two memory payoffs.
pub fn fermi_update<R: Rng + ?Sized>(
    i: usize,
    net: &Network,
    agents: &[AgentState],
    mp: MemoryParams,
    fp: FermiParams,
    rng: &mut R,
) -> Result<Strategy> {
    let nb = net.neighbors(i)?;
    if nb.is_empty() {
        return Err(Error::InvalidState(format!(
            "node {i} has no neighbours to imitate"
        )));
    }
    let j = nb[rng.gen_range(0..nb.len())];
    let u_i = memory_payoff(&agents[i].hist, mp)?;
    let u_j = memory_payoff(&agents[j].hist, mp)?;
    Ok(fermi_adopt(
        agents[i].strategy,
        u_i,
        agents[j].strategy,
        u_j,
        fp,
        rng,
    ))
}

/// Number of cooperators among the neighbours of `i`.
pub fn state_index(i: usize, net: &Network, strategies: &[Strategy]) -> Result<usize> {
    Ok(net
        .neighbors(i)?
        .iter()
        .filter(|&&j| strategies[j].is_cooperate())
        .count())
}

/// Epsilon-greedy action for `state`.
///
/// Draws one `f64` for the explore test, plus one `bool` when exploring or
/// when the two Q-values tie exactly.
pub fn q_select<R: Rng + ?Sized>(
    qt: &QTable,
    state: usize,
    qp: QLearnParams,
    rng: &mut R,
) -> Result<Strategy> {
    let [q_c, q_d] = qt.row(state)?;
    let explore = rng.gen::<f64>() < qp.epsilon;
    let action = if explore || q_c == q_d {
        coin(rng)
    } else if q_c > q_d {
        Strategy::Cooperate
    } else {
        Strategy::Defect
    };
    Ok(action)
}

/// `Q[s][a] += α (reward + γ max_a' Q[s'][a'] - Q[s][a])`.
pub fn q_update(
    qt: &mut QTable,
    state: usize,
    action: Strategy,
    reward: f64,
    next_state: usize,
    qp: QLearnParams,
) -> Result<()> {
    let [n_c, n_d] = qt.row(next_state)?;
    let current = qt.get(state, action)?;
    let target = reward + qp.gamma * n_c.max(n_d);
    qt.set(state, action, current + qp.alpha * (target - current))
}

/// Fair coin on strategies: `true` is cooperation.
pub(crate) fn coin<R: Rng + ?Sized>(rng: &mut R) -> Strategy {
    if rng.gen::<bool>() {
        Strategy::Cooperate
    } else {
        Strategy::Defect
    }
}
