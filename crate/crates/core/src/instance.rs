//! Transportation instances: margins, forbidden edges and validation.

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

/// An edge `{supply, demand}` of the complete bipartite graph `K_{N1,N2}`.
///
/// Both indices are 1-based. The derived ordering is lexicographic on
/// `(supply, demand)`, which gives every edge set a canonical iteration order.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Edge {
    pub supply: usize,
    pub demand: usize,
}

impl Edge {
    pub const fn new(supply: usize, demand: usize) -> Self {
        Edge { supply, demand }
    }

    /// 0-based supply slot.
    #[inline]
    pub(crate) fn s(self) -> usize {
        self.supply - 1
    }

    /// 0-based demand slot.
    #[inline]
    pub(crate) fn d(self) -> usize {
        self.demand - 1
    }
}

impl fmt::Display for Edge {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({},{})", self.supply, self.demand)
    }
}

/// A node of the bipartite graph, 1-based on either side.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Node {
    Supply(usize),
    Demand(usize),
}

impl fmt::Display for Node {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Node::Supply(i) => write!(f, "s{i}"),
            Node::Demand(j) => write!(f, "d{j}"),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
pub enum InstanceError {
    #[error("instance needs at least one supply and one demand node")]
    Empty,
    #[error("margin {node} is {value}; margins must be positive")]
    NonPositiveMargin { node: Node, value: i64 },
    #[error("total supply {supply} differs from total demand {demand}")]
    Unbalanced { supply: i64, demand: i64 },
    #[error("margin total overflows 64-bit integers")]
    Overflow,
    #[error("forbidden edge {0} is outside the {1}x{2} bipartite graph")]
    EdgeOutOfRange(Edge, usize, usize),
    #[error("allowed edges do not connect all {0} nodes")]
    DisconnectedAllowedGraph(usize),
}

/// Summary produced by [`TransportationInstance::validate`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ValidationReport {
    pub supply_count: usize,
    pub demand_count: usize,
    pub total: i64,
    pub forbidden_count: usize,
    pub allowed_edge_count: usize,
    pub is_face: bool,
}

/// Outcome of the subset-sum non-degeneracy test.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Nondegeneracy {
    pub holds: bool,
    /// The criterion is exact only for full polytopes; on faces it is a
    /// sufficient-looking test that pivots still have to confirm at runtime.
    pub heuristic: bool,
    /// 1-based supply and demand subsets with equal sums, if any.
    pub witness: Option<(Vec<usize>, Vec<usize>)>,
}

/// Margins `u`, `v` and a set of forbidden edges describing a face of
/// `TP(u, v)`. An empty forbidden set is the full polytope.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TransportationInstance {
    supplies: Vec<i64>,
    demands: Vec<i64>,
    forbidden: BTreeSet<Edge>,
}

impl TransportationInstance {
    /// Builds an instance and runs [`validate`](Self::validate) on it.
    pub fn new(
        supplies: Vec<i64>,
        demands: Vec<i64>,
        forbidden: impl IntoIterator<Item = Edge>,
    ) -> Result<Self, InstanceError> {
        let inst = TransportationInstance {
            supplies,
            demands,
            forbidden: forbidden.into_iter().collect(),
        };
        inst.validate()?;
        Ok(inst)
    }

    /// Full polytope shortcut.
    pub fn full(supplies: Vec<i64>, demands: Vec<i64>) -> Result<Self, InstanceError> {
        Self::new(supplies, demands, [])
    }

    pub fn supplies(&self) -> &[i64] {
        &self.supplies
    }

    pub fn demands(&self) -> &[i64] {
        &self.demands
    }

    pub fn forbidden(&self) -> &BTreeSet<Edge> {
        &self.forbidden
    }

    pub fn supply_count(&self) -> usize {
        self.supplies.len()
    }

    pub fn demand_count(&self) -> usize {
        self.demands.len()
    }

    /// `N1 + N2`.
    pub fn node_count(&self) -> usize {
        self.supplies.len() + self.demands.len()
    }

    /// Number of edges of every spanning tree, `N1 + N2 - 1`.
    pub fn tree_size(&self) -> usize {
        self.node_count() - 1
    }

    pub fn total(&self) -> i64 {
        self.supplies.iter().sum()
    }

    pub fn is_face(&self) -> bool {
        !self.forbidden.is_empty()
    }

    pub fn contains_edge(&self, e: Edge) -> bool {
        (1..=self.supplies.len()).contains(&e.supply) && (1..=self.demands.len()).contains(&e.demand)
    }

    pub fn is_allowed(&self, e: Edge) -> bool {
        self.contains_edge(e) && !self.forbidden.contains(&e)
    }

    /// All non-forbidden edges in canonical order.
    pub fn allowed_edges(&self) -> impl Iterator<Item = Edge> + '_ {
        let n2 = self.demands.len();
        (1..=self.supplies.len())
            .flat_map(move |s| (1..=n2).map(move |d| Edge::new(s, d)))
            .filter(move |e| !self.forbidden.contains(e))
    }

    pub fn margin(&self, node: Node) -> i64 {
        match node {
            Node::Supply(i) => self.supplies[i - 1],
            Node::Demand(j) => self.demands[j - 1],
        }
    }

    /// Checks positivity, balance, forbidden-edge ranges and connectivity
    /// of the allowed bipartite graph.
    pub fn validate(&self) -> Result<ValidationReport, InstanceError> {
        let (n1, n2) = (self.supplies.len(), self.demands.len());
        if n1 == 0 || n2 == 0 {
            return Err(InstanceError::Empty);
        }
        for (i, &u) in self.supplies.iter().enumerate() {
            if u <= 0 {
                return Err(InstanceError::NonPositiveMargin { node: Node::Supply(i + 1), value: u });
            }
        }
        for (j, &v) in self.demands.iter().enumerate() {
            if v <= 0 {
                return Err(InstanceError::NonPositiveMargin { node: Node::Demand(j + 1), value: v });
            }
        }
        let supply = checked_sum(&self.supplies)?;
        let demand = checked_sum(&self.demands)?;
        if supply != demand {
            return Err(InstanceError::Unbalanced { supply, demand });
        }
        for &e in &self.forbidden {
            if !self.contains_edge(e) {
                return Err(InstanceError::EdgeOutOfRange(e, n1, n2));
            }
        }

        let mut dsu = Dsu::new(n1 + n2);
        let mut allowed = 0;
        for e in self.allowed_edges() {
            allowed += 1;
            dsu.union(e.s(), n1 + e.d());
        }
        if dsu.components != 1 {
            return Err(InstanceError::DisconnectedAllowedGraph(n1 + n2));
        }

        Ok(ValidationReport {
            supply_count: n1,
            demand_count: n2,
            total: supply,
            forbidden_count: self.forbidden.len(),
            allowed_edge_count: allowed,
            is_face: self.is_face(),
        })
    }

    /// Subset-sum test: the polytope is non-degenerate iff no non-empty
    /// proper supply subset has the same sum as a non-empty proper demand
    /// subset.
    ///
    /// With positive margins a subset is non-empty and proper exactly when
    /// its sum lies strictly between `0` and the total, so the test reduces
    /// to intersecting the two sets of reachable subset sums. Those sets are
    /// built sparsely and never hold more than `min(total, 2^N)` entries.
    pub fn check_nondegenerate(&self) -> Nondegeneracy {
        let total = self.total();
        let supply_sums = subset_sums(&self.supplies);
        let demand_sums = subset_sums(&self.demands);
        let common = supply_sums
            .keys()
            .copied()
            .find(|&s| s > 0 && s < total && demand_sums.contains_key(&s));
        Nondegeneracy {
            holds: common.is_none(),
            heuristic: self.is_face(),
            witness: common.map(|s| (backtrack(&supply_sums, s), backtrack(&demand_sums, s))),
        }
    }
}

fn checked_sum(xs: &[i64]) -> Result<i64, InstanceError> {
    xs.iter()
        .try_fold(0i64, |acc, &x| acc.checked_add(x))
        .ok_or(InstanceError::Overflow)
}

/// Reachable subset sums, each mapped to the (0-based item, previous sum)
/// that first produced it.
fn subset_sums(items: &[i64]) -> BTreeMap<i64, Option<(usize, i64)>> {
    let mut sums = BTreeMap::new();
    sums.insert(0, None);
    for (k, &x) in items.iter().enumerate() {
        let fresh: Vec<(i64, i64)> = sums
            .keys()
            .map(|&s| (s + x, s))
            .filter(|(t, _)| !sums.contains_key(t))
            .collect();
        for (t, s) in fresh {
            sums.insert(t, Some((k, s)));
        }
    }
    sums
}

// Items along a backtrack path have strictly decreasing indices, so the
// recovered subset has no repeats.
fn backtrack(sums: &BTreeMap<i64, Option<(usize, i64)>>, mut s: i64) -> Vec<usize> {
    let mut picked = Vec::new();
    while let Some(&Some((k, prev))) = sums.get(&s) {
        picked.push(k + 1);
        s = prev;
    }
    picked.reverse();
    picked
}

/// Plain union-find with path halving.
pub(crate) struct Dsu {
    parent: Vec<usize>,
    pub(crate) components: usize,
}

impl Dsu {
    pub(crate) fn new(n: usize) -> Self {
        Dsu { parent: (0..n).collect(), components: n }
    }

    pub(crate) fn find(&mut self, mut x: usize) -> usize {
        while self.parent[x] != x {
            self.parent[x] = self.parent[self.parent[x]];
            x = self.parent[x];
        }
        x
    }

    /// Returns false if `a` and `b` were already joined.
    pub(crate) fn union(&mut self, a: usize, b: usize) -> bool {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra == rb {
            return false;
        }
        self.parent[ra] = rb;
        self.components -= 1;
        true
    }
}

/// Bipartite adjacency over nodes `0..N1` (supplies) and `N1..N1+N2`
/// (demands), one `(neighbor, edge)` list per node.
pub(crate) fn adjacency<'a>(
    n1: usize,
    n2: usize,
    edges: impl IntoIterator<Item = &'a Edge>,
) -> Vec<Vec<(usize, Edge)>> {
    let mut adj = vec![Vec::new(); n1 + n2];
    for &e in edges {
        adj[e.s()].push((n1 + e.d(), e));
        adj[n1 + e.d()].push((e.s(), e));
    }
    adj
}
