//! Seeded random instances. ChaCha8 is pinned so a seed gives the same
//! instance on every platform.

use rand::seq::index::sample;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use tpwalk_core::reduction::{reduce_to_transportation, Arc, Capacity, Network};
use tpwalk_core::{Edge, TransportationInstance};

pub const GENERATION_RETRIES: usize = 1000;

#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
pub enum GenerationError {
    #[error("need at least one supply and one demand")]
    EmptySide,
    #[error("margin bound {bound} is below {needed}, the fewest units that give every node a positive margin")]
    BoundTooSmall { bound: i64, needed: i64 },
    #[error("no suitable instance after {0} attempts")]
    GenerationFailed(usize),
}

/// Splits `total` into `parts` positive integers, uniformly over compositions.
fn composition(rng: &mut ChaCha8Rng, total: i64, parts: usize) -> Vec<i64> {
    let mut cuts: Vec<i64> = sample(rng, (total - 1) as usize, parts - 1)
        .into_iter()
        .map(|c| c as i64 + 1)
        .collect();
    cuts.sort_unstable();
    let mut out = Vec::with_capacity(parts);
    let mut prev = 0;
    for c in cuts.into_iter().chain([total]) {
        out.push(c - prev);
        prev = c;
    }
    out
}

/// A balanced, non-degenerate `n1 × n2` instance whose total (and hence
/// every margin) is at most `margin_bound`.
pub fn gen_random(seed: u64, n1: usize, n2: usize, margin_bound: i64) -> Result<TransportationInstance, GenerationError> {
    if n1 == 0 || n2 == 0 {
        return Err(GenerationError::EmptySide);
    }
    let needed = n1.max(n2) as i64;
    if margin_bound < needed {
        return Err(GenerationError::BoundTooSmall { bound: margin_bound, needed });
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for _ in 0..GENERATION_RETRIES {
        let total = rng.gen_range(needed..=margin_bound);
        let u = composition(&mut rng, total, n1);
        let v = composition(&mut rng, total, n2);
        let inst = TransportationInstance::full(u, v).expect("compositions are positive and balanced");
        if inst.check_nondegenerate().holds {
            return Ok(inst);
        }
    }
    Err(GenerationError::GenerationFailed(GENERATION_RETRIES))
}

/// Same as [`gen_random`] without the non-degeneracy filter.
pub fn gen_random_any(seed: u64, n1: usize, n2: usize, margin_bound: i64) -> Result<TransportationInstance, GenerationError> {
    if n1 == 0 || n2 == 0 {
        return Err(GenerationError::EmptySide);
    }
    let needed = n1.max(n2) as i64;
    if margin_bound < needed {
        return Err(GenerationError::BoundTooSmall { bound: margin_bound, needed });
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let total = rng.gen_range(needed..=margin_bound);
    let u = composition(&mut rng, total, n1);
    let v = composition(&mut rng, total, n2);
    Ok(TransportationInstance::full(u, v).expect("compositions are positive and balanced"))
}

/// A random network with `n` nodes and `m` finite-capacity arcs whose
/// excesses come from a random feasible flow, so the polytope is never
/// empty. Retries until every reduced supply margin is positive.
pub fn gen_random_network(seed: u64, n: usize, m: usize, capacity_bound: i64) -> Result<Network, GenerationError> {
    if n < 2 || m == 0 {
        return Err(GenerationError::EmptySide);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for _ in 0..GENERATION_RETRIES {
        let mut excess = vec![0i64; n];
        let mut arcs = Vec::with_capacity(m);
        for _ in 0..m {
            let tail = rng.gen_range(1..=n);
            let head = (tail - 1 + rng.gen_range(1..n)) % n + 1;
            let cap = rng.gen_range(1..=capacity_bound.max(1));
            let flow = rng.gen_range(0..=cap);
            excess[tail - 1] += flow;
            excess[head - 1] -= flow;
            arcs.push(Arc::new(tail, head, Capacity::Finite(cap)));
        }
        let net = Network::new(excess, arcs).expect("flow-induced excesses balance");
        if reduce_to_transportation(&net).is_ok() {
            return Ok(net);
        }
    }
    Err(GenerationError::GenerationFailed(GENERATION_RETRIES))
}

/// Northwest-corner rule visiting demands in `order`: a feasible spanning
/// tree of the full polytope, strictly positive when the margins are
/// non-degenerate.
pub fn corner_tree(inst: &TransportationInstance, order: &[usize]) -> Vec<Edge> {
    let mut u = inst.supplies().to_vec();
    let mut v: Vec<i64> = order.iter().map(|&j| inst.demands()[j - 1]).collect();
    let (mut i, mut k) = (0, 0);
    let mut edges = Vec::with_capacity(inst.tree_size());
    loop {
        edges.push(Edge::new(i + 1, order[k]));
        let x = u[i].min(v[k]);
        u[i] -= x;
        v[k] -= x;
        if i + 1 == u.len() && k + 1 == v.len() {
            return edges;
        }
        if (u[i] == 0 && i + 1 < u.len()) || k + 1 == v.len() {
            i += 1;
        } else {
            k += 1;
        }
    }
}

/// Two starting vertices for a generated instance: the northwest-corner tree
/// (`O`) and the same rule with the demands reversed (`F`).
pub fn corner_trees(inst: &TransportationInstance) -> (Vec<Edge>, Vec<Edge>) {
    let forward: Vec<usize> = (1..=inst.demand_count()).collect();
    let backward: Vec<usize> = forward.iter().rev().copied().collect();
    (corner_tree(inst, &forward), corner_tree(inst, &backward))
}
