use std::fmt;
use std::str::FromStr;

use num_bigint::{BigInt, RandBigInt};
use num_traits::One;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{Configuration, Graph, GraphError};

/// Graph families used by the experiments.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Family {
    Cycle,
    /// Every vertex has degree 3 except one of degree 4 or 5; 3-connected.
    NearThreeRegular,
    Complete,
}

impl Family {
    pub fn name(self) -> &'static str {
        match self {
            Family::Cycle => "cycle",
            Family::NearThreeRegular => "near3regular",
            Family::Complete => "complete",
        }
    }
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Family {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "cycle" => Ok(Family::Cycle),
            "near3regular" => Ok(Family::NearThreeRegular),
            "complete" => Ok(Family::Complete),
            other => Err(format!("unknown graph family `{other}` (expected cycle, near3regular or complete)")),
        }
    }
}

const MAX_PAIRING_ATTEMPTS: usize = 100_000;

/// Generates a member of `family` on `n` vertices. Only the near-3-regular
/// family is random; it is deterministic given `seed`.
pub fn generate_graph(family: Family, n: usize, seed: u64) -> Result<Graph, GraphError> {
    let infeasible = || GraphError::InfeasibleFamily { family: family.name().to_string(), n };
    match family {
        Family::Cycle if n >= 3 => Ok(cycle(n)),
        Family::Complete if n >= 3 => Ok(complete(n)),
        Family::NearThreeRegular => near_three_regular(n, seed).ok_or_else(infeasible),
        _ => Err(infeasible()),
    }
}

/// Degree sequence: `n - 1` vertices of degree 3 and one hub whose degree
/// (4 or 5) is fixed by parity. Sampled with the pairing model, rejecting
/// until the result is simple and 3-connected.
fn near_three_regular(n: usize, seed: u64) -> Option<Graph> {
    let hub_degree = if (3 * (n.checked_sub(1)?)) % 2 == 0 { 4 } else { 5 };
    if n < 5 || hub_degree > n - 1 {
        return None;
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let hub = rng.gen_range(0..n);
    let mut stubs = Vec::with_capacity(3 * n + 2);
    for v in 0..n {
        let d = if v == hub { hub_degree } else { 3 };
        stubs.extend(std::iter::repeat_n(v, d));
    }
    for _ in 0..MAX_PAIRING_ATTEMPTS {
        stubs.shuffle(&mut rng);
        let pairs = stubs.chunks(2).map(|p| (p[0], p[1]));
        let Ok(g) = Graph::new(n, pairs) else { continue };
        if g.is_k_connected(3) {
            return Some(g);
        }
    }
    None
}

pub fn cycle(n: usize) -> Graph {
    Graph::new(n, (0..n).map(|i| (i, (i + 1) % n))).expect("n >= 3")
}

pub fn complete(n: usize) -> Graph {
    Graph::new(n, (0..n).flat_map(|i| (i + 1..n).map(move |j| (i, j)))).expect("complete graph is simple")
}

pub fn complete_bipartite(a: usize, b: usize) -> Graph {
    Graph::new(a + b, (0..a).flat_map(|i| (0..b).map(move |j| (i, a + j)))).expect("simple")
}

/// Hub 0 joined to every vertex of the rim cycle `1..=k`.
pub fn wheel(k: usize) -> Graph {
    let rim = (0..k).map(|i| (1 + i, 1 + (i + 1) % k));
    Graph::new(k + 1, rim.chain((1..=k).map(|i| (0, i)))).expect("k >= 3")
}

/// `C_k x K_2`.
pub fn prism(k: usize) -> Graph {
    let outer = (0..k).map(|i| (i, (i + 1) % k));
    let inner = (0..k).map(|i| (k + i, k + (i + 1) % k));
    let spokes = (0..k).map(|i| (i, k + i));
    Graph::new(2 * k, outer.chain(inner).chain(spokes)).expect("k >= 3")
}

pub fn cube() -> Graph {
    let edges = (0..8usize).flat_map(|v| (0..3).map(move |b| (v, v ^ (1 << b)))).filter(|&(a, b)| a < b);
    Graph::new(8, edges).expect("simple")
}

pub fn petersen() -> Graph {
    let outer = (0..5).map(|i| (i, (i + 1) % 5));
    let inner = (0..5).map(|i| (5 + i, 5 + (i + 2) % 5));
    let spokes = (0..5).map(|i| (i, 5 + i));
    Graph::new(10, outer.chain(inner).chain(spokes)).expect("simple")
}

/// Each coordinate independently uniform on `{1, ..., 2^bits}`.
pub fn sample_configuration(n: usize, bits: u32, seed: u64) -> Configuration<BigInt> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let hi = BigInt::one() << bits;
    let positions = (0..n).map(|_| rng.gen_bigint_range(&BigInt::one(), &(&hi + 1u32))).collect();
    Configuration::new(positions)
}
