//! Interaction networks.
//!
//! Two families are supported: the periodic square lattice with a von
//! Neumann neighbourhood and the Watts-Strogatz small-world graph. Both are
//! stored as compressed adjacency lists with every neighbour list sorted in
//! ascending node order, so iteration order is stable across calls and runs.

use rand::Rng;

use crate::error::{Error, Result};
use crate::rng::network_rng;

/// Redraws allowed per rewired edge before the original edge is kept.
const MAX_REWIRE_RETRIES: usize = 256;

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum NetworkKind {
    SquareLattice {
        side: usize,
    },
    SmallWorld {
        ring_degree: usize,
        rewire_prob: f64,
    },
}

/// Immutable undirected graph without self-loops or multi-edges.
#[derive(Clone, Debug, PartialEq)]
pub struct Network {
    kind: NetworkKind,
    offsets: Vec<usize>,
    targets: Vec<usize>,
}

impl Network {
    fn from_lists(kind: NetworkKind, mut lists: Vec<Vec<usize>>) -> Self {
        let mut offsets = Vec::with_capacity(lists.len() + 1);
        let mut targets = Vec::new();
        offsets.push(0);
        for list in &mut lists {
            list.sort_unstable();
            list.dedup();
            targets.extend_from_slice(list);
            offsets.push(targets.len());
        }
        Network {
            kind,
            offsets,
            targets,
        }
    }

    pub fn n(&self) -> usize {
        self.offsets.len() - 1
    }

    pub fn kind(&self) -> NetworkKind {
        self.kind
    }

    /// Side length for lattices, `None` for small-world graphs.
    pub fn side(&self) -> Option<usize> {
        match self.kind {
            NetworkKind::SquareLattice { side } => Some(side),
            NetworkKind::SmallWorld { .. } => None,
        }
    }

    /// Neighbour set of node `i`, sorted ascending.
    pub fn neighbors(&self, i: usize) -> Result<&[usize]> {
        if i >= self.n() {
            return Err(Error::param(
                "node",
                format!("node {i} out of range for network of {} nodes", self.n()),
            ));
        }
        Ok(&self.targets[self.offsets[i]..self.offsets[i + 1]])
    }

    pub fn degree(&self, i: usize) -> usize {
        self.offsets[i + 1] - self.offsets[i]
    }

    pub fn max_degree(&self) -> usize {
        (0..self.n()).map(|i| self.degree(i)).max().unwrap_or(0)
    }

    /// Number of undirected edges.
    pub fn edge_count(&self) -> usize {
        self.targets.len() / 2
    }
}

/// Recipe for building a network, possibly from a seed.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum NetworkSpec {
    Lattice {
        side: usize,
    },
    SmallWorld {
        n: usize,
        ring_degree: usize,
        rewire_prob: f64,
    },
}

impl NetworkSpec {
    /// Node count the built network will have.
    pub fn n(&self) -> usize {
        match *self {
            NetworkSpec::Lattice { side } => side * side,
            NetworkSpec::SmallWorld { n, .. } => n,
        }
    }

    /// Lattices ignore the seed; small-world graphs rewire from its network stream.
    pub fn build(&self, seed: u64) -> Result<Network> {
        match *self {
            NetworkSpec::Lattice { side } => gen_square_lattice(side),
            NetworkSpec::SmallWorld {
                n,
                ring_degree,
                rewire_prob,
            } => gen_small_world(n, ring_degree, rewire_prob, &mut network_rng(seed)),
        }
    }

    pub fn is_random(&self) -> bool {
        matches!(self, NetworkSpec::SmallWorld { .. })
    }
}

/// Periodic `side × side` lattice; node `(x, y)` has id `y * side + x`.
pub fn gen_square_lattice(side: usize) -> Result<Network> {
    if side < 2 {
        return Err(Error::param(
            "side",
            format!("must be at least 2, got {side}"),
        ));
    }
    let n = side * side;
    let lists = (0..n)
        .map(|id| {
            let (x, y) = (id % side, id / side);
            let left = (x + side - 1) % side;
            let right = (x + 1) % side;
            let up = (y + side - 1) % side;
            let down = (y + 1) % side;
            vec![
                y * side + left,
                y * side + right,
                up * side + x,
                down * side + x,
            ]
        })
        .collect();
    Ok(Network::from_lists(
        NetworkKind::SquareLattice { side },
        lists,
    ))
}

/// Watts-Strogatz graph: a ring where each node links to its `ring_degree / 2`
/// clockwise neighbours, after which every clockwise edge has its far end
/// moved to a uniform random node with probability `rewire_prob`.
///
/// Targets that would create a self-loop or a duplicate edge are redrawn; an
/// edge that finds no valid target within a bounded number of draws stays
/// where it was. The edge count is therefore always `n * ring_degree / 2`.
pub fn gen_small_world<R: Rng + ?Sized>(
    n: usize,
    ring_degree: usize,
    rewire_prob: f64,
    rng: &mut R,
) -> Result<Network> {
    if ring_degree == 0 || !ring_degree.is_multiple_of(2) {
        return Err(Error::param(
            "ring_degree",
            format!("must be even and positive, got {ring_degree}"),
        ));
    }
    if n <= ring_degree {
        return Err(Error::param(
            "n",
            format!("must exceed ring_degree {ring_degree}, got {n}"),
        ));
    }
    if !(0.0..=1.0).contains(&rewire_prob) {
        return Err(Error::param(
            "rewire_prob",
            format!("must lie in [0, 1], got {rewire_prob}"),
        ));
    }

    let half = ring_degree / 2;
    let mut lists: Vec<Vec<usize>> = (0..n)
        .map(|i| {
            (1..=half)
                .flat_map(|d| [(i + d) % n, (i + n - d) % n])
                .collect()
        })
        .collect();

    for d in 1..=half {
        for i in 0..n {
            if rng.gen::<f64>() >= rewire_prob {
                continue;
            }
            let old = (i + d) % n;
            let target = (0..MAX_REWIRE_RETRIES)
                .map(|_| rng.gen_range(0..n))
                .find(|&w| w != i && !lists[i].contains(&w));
            if let Some(w) = target {
                remove(&mut lists[i], old);
                remove(&mut lists[old], i);
                lists[i].push(w);
                lists[w].push(i);
            }
        }
    }

    Ok(Network::from_lists(
        NetworkKind::SmallWorld {
            ring_degree,
            rewire_prob,
        },
        lists,
    ))
}

fn remove(list: &mut Vec<usize>, value: usize) {
    if let Some(pos) = list.iter().position(|&v| v == value) {
        list.swap_remove(pos);
    }
}
