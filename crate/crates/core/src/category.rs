//! Learner/profiteer switching as a two-state Markov chain.
//!
//! A learner becomes a profiteer with probability `p` each round and a
//! profiteer becomes a learner with probability `q`. Switching never looks at
//! payoffs, so the learner share of a population relaxes to `q / (p + q)`
//! whatever the game does.

use rand::Rng;

pub use crate::agents::Category;
use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TransitionParams {
    p: f64,
    q: f64,
}

impl TransitionParams {
    pub fn new(p: f64, q: f64) -> Result<Self> {
        for (name, v) in [("p", p), ("q", q)] {
            if !(0.0..=1.0).contains(&v) {
                return Err(Error::param(name, format!("must lie in [0, 1], got {v}")));
            }
        }
        Ok(TransitionParams { p, q })
    }

    /// Learner to profiteer.
    pub fn p(&self) -> f64 {
        self.p
    }

    /// Profiteer to learner.
    pub fn q(&self) -> f64 {
        self.q
    }

    /// Row-stochastic matrix over (learner, profiteer).
    pub fn matrix(&self) -> [[f64; 2]; 2] {
        [[1.0 - self.p, self.p], [self.q, 1.0 - self.q]]
    }

    /// True when both directions of switching can happen.
    pub fn is_dynamic(&self) -> bool {
        self.p > 0.0 && self.q > 0.0
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct StationaryDist {
    pub pi_learner: f64,
    pub pi_profiteer: f64,
}

/// Advance one agent's category by one round. Consumes one `f64` draw.
pub fn step_category<R: Rng + ?Sized>(c: Category, tp: TransitionParams, rng: &mut R) -> Category {
    let u = rng.gen::<f64>();
    match c {
        Category::Learner if u < tp.p => Category::Profiteer,
        Category::Profiteer if u < tp.q => Category::Learner,
        other => other,
    }
}

pub fn stationary(tp: TransitionParams) -> Result<StationaryDist> {
    let total = tp.p + tp.q;
    if total == 0.0 {
        return Err(Error::UndefinedStationary);
    }
    let pi_learner = tp.q / total;
    Ok(StationaryDist {
        pi_learner,
        pi_profiteer: 1.0 - pi_learner,
    })
}

/// Expected `(learners, profiteers)` in a population of `n` at stationarity.
pub fn expected_counts(tp: TransitionParams, n: usize) -> Result<(f64, f64)> {
    let dist = stationary(tp)?;
    let n = n as f64;
    let learners = n * dist.pi_learner;
    Ok((learners, n - learners))
}
