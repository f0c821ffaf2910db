//! Memory-based spatial snowdrift game with two kinds of agents.
//!
//! Every agent sits on a node of a [`topology::Network`] and plays the
//! snowdrift game with all of its neighbours each round. An agent's utility
//! is a geometrically discounted sum of its last `M` round payoffs. Agents
//! are either *profiteers*, who imitate a random neighbour through the Fermi
//! rule, or *learners*, who pick actions from an epsilon-greedy Q-table
//! indexed by the number of cooperating neighbours. Each round every agent
//! independently switches category through a two-state Markov chain, so the
//! learner share converges to `q / (p + q)`.
//!
//! The crate is organised bottom-up:
//!
//! * [`topology`] builds periodic square lattices and Watts-Strogatz graphs.
//! * [`game`] holds the payoff matrix and the payoff memory.
//! * [`agents`] implements the Fermi and Q-learning update rules.
//! * [`category`] is the learner/profiteer Markov chain and its theory.
//! * [`engine`] runs synchronous trajectories and seeded ensembles.
//! * [`stats`] computes tail means, relative errors and moments.
//! * [`config`] and [`experiment`] drive the command-line tool.

pub mod agents;
pub mod category;
pub mod config;
pub mod engine;
pub mod error;
pub mod experiment;
pub mod game;
pub mod rng;
pub mod stats;
pub mod topology;

pub use error::{Error, Result};
