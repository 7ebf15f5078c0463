//! Capacitated network-flow polytopes as faces of transportation polytopes.
//!
//! Each arc `a = (i, j)` with capacity `c_a` is split by a new node: the
//! original nodes become supplies with margin `b_i + Σ_{head(f)=i} c_f`, every
//! arc becomes a demand with margin `c_a`, and only the pairs
//! `(tail(a), a)` and `(head(a), a)` are allowed. A network flow `x` maps to
//! `y_{tail(a),a} = x_a`, `y_{head(a),a} = c_a - x_a`.

use alloc::collections::{BTreeMap, BTreeSet, VecDeque};
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use crate::instance::{Edge, InstanceError, TransportationInstance};
use crate::tree::FlowedTree;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Capacity {
    Finite(i64),
    Infinite,
}

impl Capacity {
    pub fn finite(self) -> Option<i64> {
        match self {
            Capacity::Finite(c) => Some(c),
            Capacity::Infinite => None,
        }
    }
}

impl fmt::Display for Capacity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Capacity::Finite(c) => write!(f, "{c}"),
            Capacity::Infinite => f.write_str("inf"),
        }
    }
}

/// Directed arc between 1-based node indices.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Arc {
    pub tail: usize,
    pub head: usize,
    pub capacity: Capacity,
}

impl Arc {
    pub fn new(tail: usize, head: usize, capacity: Capacity) -> Self {
        Arc { tail, head, capacity }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
pub enum ReductionError {
    #[error("network has no nodes")]
    Empty,
    #[error("arc {arc} is a self-loop")]
    SelfLoop { arc: usize },
    #[error("arc {arc} references node {node}, but there are {nodes} nodes")]
    NodeOutOfRange { arc: usize, node: usize, nodes: usize },
    #[error("excesses sum to {0}, not zero")]
    Unbalanced(i64),
    #[error("arc {arc} has non-positive capacity {capacity}")]
    NonPositiveCapacity { arc: usize, capacity: i64 },
    #[error("infinite-capacity arcs contain a directed cycle; the polyhedron is unbounded")]
    UnboundedNetwork,
    #[error("arc {arc} still has infinite capacity")]
    InfiniteCapacity { arc: usize },
    #[error("reduced supply margin at node {node} is {value}, not positive")]
    NonPositiveMargin { node: usize, value: i64 },
    #[error("infeasible flow: {0}")]
    InfeasibleFlow(&'static str),
    #[error("arithmetic overflow")]
    Overflow,
    #[error(transparent)]
    Instance(#[from] InstanceError),
}

/// Directed graph with integer node excesses and arc capacities. Parallel
/// arcs are allowed and stay distinct.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Network {
    excess: Vec<i64>,
    arcs: Vec<Arc>,
}

impl Network {
    pub fn new(excess: Vec<i64>, arcs: Vec<Arc>) -> Result<Self, ReductionError> {
        let n = excess.len();
        if n == 0 {
            return Err(ReductionError::Empty);
        }
        for (k, a) in arcs.iter().enumerate() {
            for node in [a.tail, a.head] {
                if node == 0 || node > n {
                    return Err(ReductionError::NodeOutOfRange { arc: k + 1, node, nodes: n });
                }
            }
            if a.tail == a.head {
                return Err(ReductionError::SelfLoop { arc: k + 1 });
            }
            if let Capacity::Finite(c) = a.capacity {
                if c <= 0 {
                    return Err(ReductionError::NonPositiveCapacity { arc: k + 1, capacity: c });
                }
            }
        }
        let sum = excess
            .iter()
            .try_fold(0i64, |s, &b| s.checked_add(b))
            .ok_or(ReductionError::Overflow)?;
        if sum != 0 {
            return Err(ReductionError::Unbalanced(sum));
        }
        Ok(Network { excess, arcs })
    }

    pub fn excess(&self) -> &[i64] {
        &self.excess
    }

    pub fn arcs(&self) -> &[Arc] {
        &self.arcs
    }

    pub fn node_count(&self) -> usize {
        self.excess.len()
    }

    pub fn arc_count(&self) -> usize {
        self.arcs.len()
    }

    /// `m + n - 1`, the bound on the diameter of the flow polytope.
    pub fn diameter_bound(&self) -> usize {
        self.arcs.len() + self.excess.len() - 1
    }

    fn finite_capacities(&self) -> Result<Vec<i64>, ReductionError> {
        self.arcs
            .iter()
            .enumerate()
            .map(|(k, a)| a.capacity.finite().ok_or(ReductionError::InfiniteCapacity { arc: k + 1 }))
            .collect()
    }

    /// Whether `x` satisfies `0 <= x <= c` and flow conservation
    /// `out(i) - in(i) = b_i`.
    pub fn is_feasible_flow(&self, x: &[i64]) -> bool {
        if x.len() != self.arcs.len() {
            return false;
        }
        let mut net = vec![0i128; self.node_count()];
        for (a, &xa) in self.arcs.iter().zip(x) {
            if xa < 0 || a.capacity.finite().is_some_and(|c| xa > c) {
                return false;
            }
            net[a.tail - 1] += xa as i128;
            net[a.head - 1] -= xa as i128;
        }
        net.iter().zip(&self.excess).all(|(&got, &b)| got == b as i128)
    }
}

/// True iff the infinite-capacity arcs contain no directed cycle.
pub fn check_bounded(net: &Network) -> bool {
    let n = net.node_count();
    let mut indegree = vec![0usize; n];
    let mut out = vec![Vec::new(); n];
    for a in net.arcs.iter().filter(|a| a.capacity == Capacity::Infinite) {
        out[a.tail - 1].push(a.head - 1);
        indegree[a.head - 1] += 1;
    }
    let mut queue: VecDeque<usize> = (0..n).filter(|&x| indegree[x] == 0).collect();
    let mut removed = 0;
    while let Some(x) = queue.pop_front() {
        removed += 1;
        for &w in &out[x] {
            indegree[w] -= 1;
            if indegree[w] == 0 {
                queue.push_back(w);
            }
        }
    }
    removed == n
}

/// `1 + Σ max(b_i, 0) + Σ finite capacities`: strictly above any feasible
/// arc flow of a bounded network.
pub fn infinite_capacity_stand_in(net: &Network) -> Result<i64, ReductionError> {
    let positive = net.excess.iter().filter(|&&b| b > 0);
    let finite = net.arcs.iter().filter_map(|a| a.capacity.finite());
    positive
        .chain(finite.collect::<Vec<_>>().iter())
        .try_fold(1i64, |s, &x| s.checked_add(x))
        .ok_or(ReductionError::Overflow)
}

/// Replaces every infinite capacity by [`infinite_capacity_stand_in`]. The
/// feasible set is unchanged.
pub fn finite_capacitate(net: &Network) -> Result<Network, ReductionError> {
    if !check_bounded(net) {
        return Err(ReductionError::UnboundedNetwork);
    }
    let big = infinite_capacity_stand_in(net)?;
    let arcs = net
        .arcs
        .iter()
        .map(|a| Arc { capacity: Capacity::Finite(a.capacity.finite().unwrap_or(big)), ..*a })
        .collect();
    Ok(Network { excess: net.excess.clone(), arcs })
}

/// A network together with its transportation face.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ReductionMap {
    network: Network,
    instance: TransportationInstance,
    capacities: Vec<i64>,
}

/// Builds the face of `TP(û, c)` isomorphic to the flow polytope of `net`.
/// Arc `k` (1-based) becomes demand `k`; node `i` becomes supply `i`.
pub fn reduce_to_transportation(net: &Network) -> Result<ReductionMap, ReductionError> {
    let capacities = net.finite_capacities()?;
    let (n, m) = (net.node_count(), net.arc_count());
    let mut supplies = net.excess.clone();
    for (a, &c) in net.arcs.iter().zip(&capacities) {
        let slot = &mut supplies[a.head - 1];
        *slot = slot.checked_add(c).ok_or(ReductionError::Overflow)?;
    }
    if let Some((i, &value)) = supplies.iter().enumerate().find(|&(_, &u)| u <= 0) {
        return Err(ReductionError::NonPositiveMargin { node: i + 1, value });
    }
    if m == 0 {
        // Every excess is positive and sums to zero: impossible.
        return Err(ReductionError::InfeasibleFlow("network has no arcs"));
    }
    let allowed: BTreeSet<Edge> = net
        .arcs
        .iter()
        .enumerate()
        .flat_map(|(k, a)| [Edge::new(a.tail, k + 1), Edge::new(a.head, k + 1)])
        .collect();
    let forbidden = (1..=n)
        .flat_map(|i| (1..=m).map(move |j| Edge::new(i, j)))
        .filter(|e| !allowed.contains(e));
    let instance = TransportationInstance::new(supplies, capacities.clone(), forbidden)?;
    Ok(ReductionMap { network: net.clone(), instance, capacities })
}

impl ReductionMap {
    pub fn network(&self) -> &Network {
        &self.network
    }

    pub fn instance(&self) -> &TransportationInstance {
        &self.instance
    }

    /// Demand index of arc `arc` (both 1-based).
    pub fn arc_to_demand(&self, arc: usize) -> usize {
        arc
    }

    /// `(arc, tail edge, head edge)` for every arc.
    pub fn arc_table(&self) -> impl Iterator<Item = (usize, Edge, Edge)> + '_ {
        self.network
            .arcs
            .iter()
            .enumerate()
            .map(|(k, a)| (k + 1, Edge::new(a.tail, k + 1), Edge::new(a.head, k + 1)))
    }

    pub fn map_flow_forward(&self, x: &[i64]) -> Result<BTreeMap<Edge, i64>, ReductionError> {
        if !self.network.is_feasible_flow(x) {
            return Err(ReductionError::InfeasibleFlow("network flow violates capacity or conservation"));
        }
        let mut y = BTreeMap::new();
        for ((_, tail, head), (&xa, &c)) in self.arc_table().zip(x.iter().zip(&self.capacities)) {
            y.insert(tail, xa);
            y.insert(head, c - xa);
        }
        Ok(y)
    }

    /// Inverse of [`map_flow_forward`](Self::map_flow_forward). Missing
    /// entries of `y` are zero.
    pub fn map_flow_backward(&self, y: &BTreeMap<Edge, i64>) -> Result<Vec<i64>, ReductionError> {
        let inst = &self.instance;
        let mut rows = vec![0i128; inst.supply_count()];
        let mut cols = vec![0i128; inst.demand_count()];
        for (&e, &val) in y {
            if val < 0 {
                return Err(ReductionError::InfeasibleFlow("negative transportation entry"));
            }
            if val == 0 {
                continue;
            }
            if !inst.is_allowed(e) {
                return Err(ReductionError::InfeasibleFlow("flow on a forbidden pair"));
            }
            rows[e.supply - 1] += val as i128;
            cols[e.demand - 1] += val as i128;
        }
        let margins_met = rows.iter().zip(inst.supplies()).all(|(&r, &u)| r == u as i128)
            && cols.iter().zip(inst.demands()).all(|(&c, &v)| c == v as i128);
        if !margins_met {
            return Err(ReductionError::InfeasibleFlow("transportation margins not met"));
        }
        let x: Vec<i64> = self
            .arc_table()
            .map(|(_, tail, _)| y.get(&tail).copied().unwrap_or(0))
            .collect();
        debug_assert!(self.network.is_feasible_flow(&x));
        Ok(x)
    }

    /// Network flow of a vertex of the face.
    pub fn tree_to_flow(&self, tree: &FlowedTree) -> Result<Vec<i64>, ReductionError> {
        let y: BTreeMap<Edge, i64> = tree.flows().iter().map(|(&e, &f)| (e, f)).collect();
        self.map_flow_backward(&y)
    }
}

/// Outcome of the block-matrix check.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct IncidenceCheck {
    pub holds: bool,
    /// `(b + T_G c, -c)`: supply margins followed by negated capacities.
    pub b_hat: Vec<i64>,
}

type Matrix = Vec<Vec<i64>>;

fn zeros(rows: usize, cols: usize) -> Matrix {
    vec![vec![0; cols]; rows]
}

fn multiply(a: &Matrix, b: &Matrix) -> Matrix {
    let (rows, inner, cols) = (a.len(), b.len(), b.first().map_or(0, Vec::len));
    let mut out = zeros(rows, cols);
    for r in 0..rows {
        for k in 0..inner {
            if a[r][k] != 0 {
                for c in 0..cols {
                    out[r][c] += a[r][k] * b[k][c];
                }
            }
        }
    }
    out
}

/// Checks `[[I, T_G], [0, -I]] · [[Φ_G, 0], [I, I]] = Φ_Ĝ` entry by entry,
/// where `Φ_G` has `+1` at tails and `-1` at heads, `T_G` has `+1` at heads,
/// and `Ĝ` is the split network whose first `m` arcs run `tail(a) → a` and
/// last `m` arcs run `head(a) → a`. Also returns `b̂ = [[I, T_G], [0, -I]] · (b, c)`.
///
/// Infinite capacities are replaced by the same stand-in as
/// [`finite_capacitate`] for the right-hand side.
pub fn verify_incidence_identity(net: &Network) -> Result<IncidenceCheck, ReductionError> {
    let (n, m) = (net.node_count(), net.arc_count());
    let big = infinite_capacity_stand_in(net)?;
    let caps: Vec<i64> = net.arcs.iter().map(|a| a.capacity.finite().unwrap_or(big)).collect();

    let mut phi = zeros(n, m);
    let mut t = zeros(n, m);
    for (k, a) in net.arcs.iter().enumerate() {
        phi[a.tail - 1][k] += 1;
        phi[a.head - 1][k] -= 1;
        t[a.head - 1][k] += 1;
    }

    let mut left = zeros(n + m, n + m);
    for i in 0..n {
        left[i][i] = 1;
        left[i][n..].copy_from_slice(&t[i]);
    }
    for k in 0..m {
        left[n + k][n + k] = -1;
    }
    let mut right = zeros(n + m, 2 * m);
    for i in 0..n {
        right[i][..m].copy_from_slice(&phi[i]);
    }
    for k in 0..m {
        right[n + k][k] = 1;
        right[n + k][m + k] = 1;
    }
    let product = multiply(&left, &right);

    let mut direct = zeros(n + m, 2 * m);
    for (k, a) in net.arcs.iter().enumerate() {
        direct[a.tail - 1][k] += 1;
        direct[n + k][k] -= 1;
        direct[a.head - 1][m + k] += 1;
        direct[n + k][m + k] -= 1;
    }

    let rhs: Matrix = net.excess.iter().chain(&caps).map(|&x| vec![x]).collect();
    let b_hat: Vec<i64> = multiply(&left, &rhs).into_iter().map(|row| row[0]).collect();

    let mut expected = net.excess.clone();
    for (a, &c) in net.arcs.iter().zip(&caps) {
        expected[a.head - 1] += c;
    }
    expected.extend(caps.iter().map(|&c| -c));

    Ok(IncidenceCheck { holds: product == direct && b_hat == expected, b_hat })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn fin(tail: usize, head: usize, c: i64) -> Arc {
        Arc::new(tail, head, Capacity::Finite(c))
    }

    fn four_node_network() -> Network {
        // a, b, c, d = 1..4
        Network::new(
            vec![20, 0, 0, -20],
            vec![fin(1, 2, 10), fin(1, 3, 20), fin(2, 3, 5), fin(2, 4, 30), fin(3, 2, 15), fin(3, 4, 10)],
        )
        .unwrap()
    }

    #[test]
    fn network_validation() {
        assert_eq!(Network::new(vec![], vec![]), Err(ReductionError::Empty));
        assert_eq!(Network::new(vec![1, -1], vec![fin(1, 1, 1)]), Err(ReductionError::SelfLoop { arc: 1 }));
        assert_eq!(Network::new(vec![1, 0], vec![fin(1, 2, 1)]), Err(ReductionError::Unbalanced(1)));
        assert!(matches!(Network::new(vec![1, -1], vec![fin(1, 3, 1)]), Err(ReductionError::NodeOutOfRange { .. })));
        assert!(matches!(Network::new(vec![1, -1], vec![fin(1, 2, 0)]), Err(ReductionError::NonPositiveCapacity { .. })));
    }

    #[test]
    fn boundedness() {
        assert!(check_bounded(&four_node_network()));
        let cycle = Network::new(
            vec![0, 0],
            vec![Arc::new(1, 2, Capacity::Infinite), Arc::new(2, 1, Capacity::Infinite)],
        )
        .unwrap();
        assert!(!check_bounded(&cycle));
        assert_eq!(finite_capacitate(&cycle), Err(ReductionError::UnboundedNetwork));
        let single = Network::new(vec![3, -3], vec![Arc::new(1, 2, Capacity::Infinite)]).unwrap();
        assert!(check_bounded(&single));
    }

    #[test]
    fn capacitating() {
        let f = four_node_network();
        assert_eq!(finite_capacitate(&f).unwrap(), f);
        let single = Network::new(vec![3, -3], vec![Arc::new(1, 2, Capacity::Infinite)]).unwrap();
        assert_eq!(finite_capacitate(&single).unwrap().arcs()[0].capacity, Capacity::Finite(4));
        let mut arcs = f.arcs().to_vec();
        arcs[3].capacity = Capacity::Infinite;
        let open = Network::new(f.excess().to_vec(), arcs).unwrap();
        assert_eq!(finite_capacitate(&open).unwrap().arcs()[3].capacity, Capacity::Finite(81));
    }

    #[test]
    fn four_node_network_reduction() {
        let r = reduce_to_transportation(&four_node_network()).unwrap();
        assert_eq!(r.instance().supplies(), &[20, 25, 25, 20]);
        assert_eq!(r.instance().demands(), &[10, 20, 5, 30, 15, 10]);
        assert_eq!(r.instance().allowed_edges().count(), 12);
        assert_eq!(r.network().diameter_bound(), 9);
    }

    #[test]
    fn single_arc_reduction_and_mapping() {
        let net = Network::new(vec![1, -1], vec![fin(1, 2, 2)]).unwrap();
        let r = reduce_to_transportation(&net).unwrap();
        assert_eq!(r.instance().supplies(), &[1, 1]);
        assert_eq!(r.instance().demands(), &[2]);
        assert!(!r.instance().is_face());
        let y = r.map_flow_forward(&[1]).unwrap();
        assert_eq!(y, BTreeMap::from([(Edge::new(1, 1), 1), (Edge::new(2, 1), 1)]));
        assert_eq!(r.map_flow_backward(&y).unwrap(), vec![1]);
        assert!(matches!(r.map_flow_forward(&[2]), Err(ReductionError::InfeasibleFlow(_))));
    }

    #[test]
    fn tight_capacity_keeps_margins_positive() {
        let net = Network::new(vec![2, 0, -2], vec![fin(1, 2, 2), fin(2, 3, 3), fin(1, 3, 1)]).unwrap();
        let r = reduce_to_transportation(&net).unwrap();
        assert_eq!(r.instance().supplies(), &[2, 2, 2]);
        // A sink whose incoming capacity equals its demand gets margin zero.
        let tight = Network::new(vec![3, -3], vec![fin(1, 2, 3)]).unwrap();
        assert_eq!(
            reduce_to_transportation(&tight),
            Err(ReductionError::NonPositiveMargin { node: 2, value: 0 })
        );
    }

    #[test]
    fn non_positive_margin_is_reported() {
        let net = Network::new(vec![1, 0, -1], vec![fin(1, 3, 2), fin(1, 2, 1), fin(2, 3, 1)]).unwrap();
        assert_eq!(reduce_to_transportation(&net).unwrap().instance().supplies(), &[1, 1, 2]);
        let dead = Network::new(vec![1, 0, -1], vec![fin(1, 3, 1), fin(2, 1, 1)]).unwrap();
        assert_eq!(
            reduce_to_transportation(&dead),
            Err(ReductionError::NonPositiveMargin { node: 2, value: 0 })
        );
    }

    #[test]
    fn zero_flow_saturates_head_edges() {
        let net = Network::new(vec![0, 0, 0], vec![fin(1, 2, 3), fin(2, 3, 1), fin(3, 1, 2)]).unwrap();
        let r = reduce_to_transportation(&net).unwrap();
        let y = r.map_flow_forward(&[0, 0, 0]).unwrap();
        for (_, tail, head) in r.arc_table() {
            assert_eq!(y[&tail], 0);
            assert_eq!(y[&head], r.instance().demands()[head.demand - 1]);
        }
    }

    #[test]
    fn four_node_network_round_trip() {
        let r = reduce_to_transportation(&four_node_network()).unwrap();
        // ab, ac, bc, bd, cb, cd
        for x in [[10, 10, 0, 10, 0, 10], [0, 20, 0, 10, 10, 10], [5, 15, 5, 15, 15, 5]] {
            let y = r.map_flow_forward(&x).unwrap();
            assert_eq!(r.map_flow_backward(&y).unwrap(), x);
        }
    }

    #[test]
    fn four_node_network_identity() {
        let check = verify_incidence_identity(&four_node_network()).unwrap();
        assert!(check.holds);
        assert_eq!(check.b_hat, vec![20, 25, 25, 20, -10, -20, -5, -30, -15, -10]);
        let single = Network::new(vec![1, -1], vec![fin(1, 2, 2)]).unwrap();
        assert_eq!(verify_incidence_identity(&single).unwrap(), IncidenceCheck { holds: true, b_hat: vec![1, 1, -2] });
    }

    fn flow_network() -> impl Strategy<Value = (Network, Vec<i64>)> {
        (2usize..=6, 1usize..=10)
            .prop_flat_map(|(n, m)| {
                let arc = (1..=n, 1..=n - 1, 1i64..=9, 0i64..=9);
                (Just(n), proptest::collection::vec(arc, m))
            })
            .prop_map(|(n, raw)| {
                let mut arcs = Vec::new();
                let mut x = Vec::new();
                let mut excess = vec![0i64; n];
                for (tail, offset, cap, flow) in raw {
                    let head = (tail - 1 + offset) % n + 1;
                    let flow = flow.min(cap);
                    arcs.push(fin(tail, head, cap));
                    x.push(flow);
                    excess[tail - 1] += flow;
                    excess[head - 1] -= flow;
                }
                (Network::new(excess, arcs).unwrap(), x)
            })
    }

    proptest! {
        #[test]
        fn identity_holds_on_random_networks((net, _) in flow_network()) {
            prop_assert!(verify_incidence_identity(&net).unwrap().holds);
        }

        #[test]
        fn flow_maps_invert((net, x) in flow_network()) {
            let r = reduce_to_transportation(&net);
            prop_assume!(r.is_ok());
            let r = r.unwrap();
            let y = r.map_flow_forward(&x).unwrap();
            let total: i64 = y.values().sum();
            prop_assert_eq!(total, r.instance().total());
            prop_assert_eq!(r.map_flow_backward(&y).unwrap(), x);
        }
    }
}
