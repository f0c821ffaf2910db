//! Snowdrift payoffs and the discounted payoff memory.

use std::collections::VecDeque;

use crate::error::{Error, Result};
use crate::topology::Network;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Strategy {
    Cooperate,
    Defect,
}

impl Strategy {
    pub fn is_cooperate(self) -> bool {
        self == Strategy::Cooperate
    }

    /// `'C'` or `'D'`.
    pub fn to_char(self) -> char {
        match self {
            Strategy::Cooperate => 'C',
            Strategy::Defect => 'D',
        }
    }

    /// Column index in a Q-table row.
    pub fn index(self) -> usize {
        match self {
            Strategy::Cooperate => 0,
            Strategy::Defect => 1,
        }
    }

    pub fn from_index(index: usize) -> Self {
        if index == 0 {
            Strategy::Cooperate
        } else {
            Strategy::Defect
        }
    }
}

/// Cost-to-benefit ratio `r` of the snowdrift game.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PayoffParams {
    r: f64,
}

impl PayoffParams {
    pub fn new(r: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&r) {
            return Err(Error::param("r", format!("must lie in [0, 1], got {r}")));
        }
        Ok(PayoffParams { r })
    }

    pub fn r(&self) -> f64 {
        self.r
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct MemoryParams {
    m: usize,
    beta: f64,
}

impl MemoryParams {
    pub fn new(m: usize, beta: f64) -> Result<Self> {
        if m == 0 {
            return Err(Error::param("m", "memory length must be at least 1"));
        }
        if !(0.0..=1.0).contains(&beta) {
            return Err(Error::param(
                "beta",
                format!("must lie in [0, 1], got {beta}"),
            ));
        }
        Ok(MemoryParams { m, beta })
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn beta(&self) -> f64 {
        self.beta
    }
}

/// Payoff to `mine` when facing `theirs`: R = 1, S = 1 - r, T = 1 + r, P = 0.
pub fn pair_payoff(mine: Strategy, theirs: Strategy, pp: PayoffParams) -> f64 {
    use Strategy::*;
    match (mine, theirs) {
        (Cooperate, Cooperate) => 1.0,
        (Cooperate, Defect) => 1.0 - pp.r,
        (Defect, Cooperate) => 1.0 + pp.r,
        (Defect, Defect) => 0.0,
    }
}

/// Total payoff of node `i` from one game against each of its neighbours.
pub fn round_payoff(
    net: &Network,
    i: usize,
    strategies: &[Strategy],
    pp: PayoffParams,
) -> Result<f64> {
    let mine = strategies[i];
    Ok(net
        .neighbors(i)?
        .iter()
        .map(|&j| pair_payoff(mine, strategies[j], pp))
        .sum())
}

/// The last `m` raw round payoffs of one agent, oldest first.
#[derive(Clone, Debug, PartialEq)]
pub struct PayoffHistory {
    capacity: usize,
    rounds: VecDeque<f64>,
}

impl PayoffHistory {
    pub fn new(capacity: usize) -> Self {
        PayoffHistory {
            capacity,
            rounds: VecDeque::with_capacity(capacity),
        }
    }

    pub fn len(&self) -> usize {
        self.rounds.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rounds.is_empty()
    }

    pub fn capacity(&self) -> usize {
        self.capacity
    }

    /// Stored payoffs in chronological order.
    pub fn iter(&self) -> impl DoubleEndedIterator<Item = f64> + '_ {
        self.rounds.iter().copied()
    }

    /// Append the newest round, evicting the oldest once the window is full.
    pub fn push_round(&mut self, pi: f64) {
        if self.capacity == 0 {
            return;
        }
        if self.rounds.len() == self.capacity {
            self.rounds.pop_front();
        }
        self.rounds.push_back(pi);
    }
}

/// `U = Σ_a β^a · Π[newest - a]` over the stored window, clipped to `m`.
///
/// Evaluated oldest to newest with one accumulator in Horner form, so
/// `β = 0` yields the newest payoff exactly and `β = 1` the plain sum.
pub fn memory_payoff(hist: &PayoffHistory, mp: MemoryParams) -> Result<f64> {
    if hist.is_empty() {
        return Err(Error::InvalidState(
            "memory payoff of an empty history".into(),
        ));
    }
    let skip = hist.len().saturating_sub(mp.m);
    Ok(hist
        .iter()
        .skip(skip)
        .fold(0.0, |acc, pi| acc * mp.beta + pi))
}
