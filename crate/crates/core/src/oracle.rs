//! Brute-force ground truth for small instances: every vertex, the full
//! 1-skeleton, exact distances, critical pairs and the Hirsch bound.

use alloc::collections::{BTreeMap, BTreeSet, VecDeque};
use alloc::vec;
use alloc::vec::Vec;

use crate::instance::{Edge, TransportationInstance};
use crate::maxflow::FlowNetwork;
use crate::tree::{FlowedTree, VertexStatus};

pub const DEFAULT_BUDGET: usize = 1_000_000;

#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
pub enum OracleError {
    #[error("more than {0} spanning trees to enumerate")]
    BudgetExceeded(usize),
    #[error("instance is degenerate: tree {} carries a zero flow", show_edges(.0))]
    DegenerateInstance(Vec<Edge>),
    #[error("tree is not a vertex of this polytope")]
    VertexNotFound,
    #[error("polytope has no vertices")]
    EmptyPolytope,
    #[error("skeleton is disconnected")]
    DisconnectedSkeleton,
    #[error("diameter {diameter} exceeds the Hirsch bound {bound}")]
    BoundViolation { diameter: usize, bound: usize },
}

fn show_edges(edges: &[Edge]) -> alloc::string::String {
    use core::fmt::Write;
    let mut out = alloc::string::String::new();
    for (k, e) in edges.iter().enumerate() {
        let _ = write!(out, "{}{e}", if k > 0 { " " } else { "" });
    }
    out
}

/// Union-find with undo, for backtracking over edge subsets.
struct RollbackDsu {
    parent: Vec<usize>,
    size: Vec<usize>,
    history: Vec<Option<usize>>,
}

impl RollbackDsu {
    fn new(n: usize) -> Self {
        RollbackDsu { parent: (0..n).collect(), size: vec![1; n], history: Vec::new() }
    }

    fn find(&self, mut x: usize) -> usize {
        while self.parent[x] != x {
            x = self.parent[x];
        }
        x
    }

    fn union(&mut self, a: usize, b: usize) -> bool {
        let (mut ra, mut rb) = (self.find(a), self.find(b));
        if ra == rb {
            return false;
        }
        if self.size[ra] > self.size[rb] {
            core::mem::swap(&mut ra, &mut rb);
        }
        self.parent[ra] = rb;
        self.size[rb] += self.size[ra];
        self.history.push(Some(ra));
        true
    }

    fn undo(&mut self) {
        if let Some(Some(ra)) = self.history.pop() {
            let rb = self.parent[ra];
            self.size[rb] -= self.size[ra];
            self.parent[ra] = ra;
        }
    }
}

struct TreeEnumerator<'a> {
    edges: &'a [(usize, usize)],
    nodes: usize,
    budget: usize,
    seen: usize,
    dsu: RollbackDsu,
    chosen: Vec<usize>,
}

impl TreeEnumerator<'_> {
    /// True if the chosen edges plus `edges[from..]` still span every node.
    fn can_still_connect(&self, from: usize) -> bool {
        let mut parent: Vec<usize> = (0..self.nodes).map(|x| self.dsu.find(x)).collect();
        fn root(p: &mut [usize], mut x: usize) -> usize {
            while p[x] != x {
                p[x] = p[p[x]];
                x = p[x];
            }
            x
        }
        let mut components = parent.iter().enumerate().filter(|&(x, &r)| x == r).count();
        for &(a, b) in &self.edges[from..] {
            let (ra, rb) = (root(&mut parent, a), root(&mut parent, b));
            if ra != rb {
                parent[ra] = rb;
                components -= 1;
                if components == 1 {
                    return true;
                }
            }
        }
        components == 1
    }

    fn run(&mut self, at: usize, visit: &mut dyn FnMut(&[usize]) -> Result<(), OracleError>) -> Result<(), OracleError> {
        if self.chosen.len() + 1 == self.nodes {
            self.seen += 1;
            if self.seen > self.budget {
                return Err(OracleError::BudgetExceeded(self.budget));
            }
            return visit(&self.chosen);
        }
        if at == self.edges.len() || self.edges.len() - at < self.nodes - 1 - self.chosen.len() {
            return Ok(());
        }
        let (a, b) = self.edges[at];
        if self.dsu.union(a, b) {
            self.chosen.push(at);
            let r = self.run(at + 1, visit);
            self.chosen.pop();
            self.dsu.undo();
            r?;
        }
        if self.can_still_connect(at + 1) {
            self.run(at + 1, visit)?;
        }
        Ok(())
    }
}

/// Calls `visit` with every spanning tree of the allowed graph.
pub fn for_each_spanning_tree(
    inst: &TransportationInstance,
    budget: usize,
    mut visit: impl FnMut(Vec<Edge>) -> Result<(), OracleError>,
) -> Result<usize, OracleError> {
    let n1 = inst.supply_count();
    let allowed: Vec<Edge> = inst.allowed_edges().collect();
    let pairs: Vec<(usize, usize)> = allowed.iter().map(|e| (e.supply - 1, n1 + e.demand - 1)).collect();
    let mut walker = TreeEnumerator {
        edges: &pairs,
        nodes: inst.node_count(),
        budget,
        seen: 0,
        dsu: RollbackDsu::new(inst.node_count()),
        chosen: Vec::new(),
    };
    walker.run(0, &mut |idx| visit(idx.iter().map(|&k| allowed[k]).collect()))?;
    Ok(walker.seen)
}

/// `N1^(N2-1) * N2^(N1-1)`, saturating.
pub fn spanning_tree_count_full(n1: usize, n2: usize) -> u128 {
    let pow = |b: usize, e: usize| (b as u128).checked_pow(e as u32).unwrap_or(u128::MAX);
    pow(n1, n2 - 1).saturating_mul(pow(n2, n1 - 1))
}

/// All vertices: spanning trees of the allowed graph with strictly positive
/// flow. A tree with a zero flow and no negative flow signals degeneracy.
pub fn enumerate_vertices(inst: &TransportationInstance, budget: usize) -> Result<Vec<FlowedTree>, OracleError> {
    if !inst.is_face()
        && spanning_tree_count_full(inst.supply_count(), inst.demand_count()) > budget as u128
    {
        return Err(OracleError::BudgetExceeded(budget));
    }
    let mut vertices = Vec::new();
    for_each_spanning_tree(inst, budget, |edges| {
        let tree = inst.flows_on_tree(edges).expect("enumerated edges form an allowed spanning tree");
        match tree.vertex_status() {
            VertexStatus::NonDegenerate => vertices.push(tree),
            VertexStatus::Degenerate => return Err(OracleError::DegenerateInstance(tree.key())),
            VertexStatus::Infeasible => {}
        }
        Ok(())
    })?;
    Ok(vertices)
}

/// Vertices plus their adjacency.
#[derive(Clone, Debug)]
pub struct SkeletonGraph {
    vertices: Vec<FlowedTree>,
    adjacency: Vec<Vec<usize>>,
    index: BTreeMap<Vec<Edge>, usize>,
}

/// Two vertices are adjacent iff their edge sets differ in exactly one
/// edge. Rather than comparing all pairs, every tree is bucketed under each
/// of its "tree minus one edge" keys; trees sharing a bucket are neighbors.
pub fn build_skeleton(vertices: Vec<FlowedTree>) -> SkeletonGraph {
    let mut buckets: BTreeMap<Vec<Edge>, Vec<usize>> = BTreeMap::new();
    let mut index = BTreeMap::new();
    for (k, t) in vertices.iter().enumerate() {
        let key = t.key();
        for skip in 0..key.len() {
            let mut sub = key.clone();
            sub.remove(skip);
            buckets.entry(sub).or_default().push(k);
        }
        index.insert(key, k);
    }
    let mut adjacency = vec![Vec::new(); vertices.len()];
    for members in buckets.values() {
        for (x, &a) in members.iter().enumerate() {
            for &b in &members[x + 1..] {
                adjacency[a].push(b);
                adjacency[b].push(a);
            }
        }
    }
    for list in &mut adjacency {
        list.sort_unstable();
        list.dedup();
    }
    SkeletonGraph { vertices, adjacency, index }
}

impl SkeletonGraph {
    pub fn vertices(&self) -> &[FlowedTree] {
        &self.vertices
    }

    pub fn len(&self) -> usize {
        self.vertices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vertices.is_empty()
    }

    pub fn neighbors(&self, v: usize) -> &[usize] {
        &self.adjacency[v]
    }

    pub fn edge_count(&self) -> usize {
        self.adjacency.iter().map(Vec::len).sum::<usize>() / 2
    }

    pub fn index_of(&self, tree: &FlowedTree) -> Option<usize> {
        self.index.get(&tree.key()).copied()
    }

    pub fn index_of_edges(&self, edges: &[Edge]) -> Option<usize> {
        let mut key = edges.to_vec();
        key.sort_unstable();
        self.index.get(&key).copied()
    }

    /// Hop counts from `source`; `None` marks unreachable vertices.
    pub fn bfs(&self, source: usize) -> Vec<Option<usize>> {
        let mut dist = vec![None; self.vertices.len()];
        dist[source] = Some(0);
        let mut queue = VecDeque::from([source]);
        while let Some(x) = queue.pop_front() {
            let dx = dist[x].expect("queued vertices are reached");
            for &w in &self.adjacency[x] {
                if dist[w].is_none() {
                    dist[w] = Some(dx + 1);
                    queue.push_back(w);
                }
            }
        }
        dist
    }

    pub fn distance(&self, a: &FlowedTree, b: &FlowedTree) -> Result<usize, OracleError> {
        let ia = self.index_of(a).ok_or(OracleError::VertexNotFound)?;
        let ib = self.index_of(b).ok_or(OracleError::VertexNotFound)?;
        self.bfs(ia)[ib].ok_or(OracleError::DisconnectedSkeleton)
    }

    /// Largest BFS eccentricity over all sources.
    pub fn diameter(&self) -> Result<usize, OracleError> {
        let mut best = 0;
        for s in 0..self.vertices.len() {
            for d in self.bfs(s) {
                best = best.max(d.ok_or(OracleError::DisconnectedSkeleton)?);
            }
        }
        Ok(best)
    }
}

/// Critical pairs of a full polytope: `y_ij` has minimum `max(0, u_i + v_j - T)`
/// over `TP(u, v)`, so the edge is forced positive iff `u_i + v_j > T`.
pub fn critical_pairs_closed_form(inst: &TransportationInstance) -> BTreeSet<Edge> {
    let total = inst.total();
    let mut out = BTreeSet::new();
    for (i, &u) in inst.supplies().iter().enumerate() {
        for (j, &v) in inst.demands().iter().enumerate() {
            if u + v > total {
                out.insert(Edge::new(i + 1, j + 1));
            }
        }
    }
    out
}

/// Max-flow feasibility of the face with the allowed edges filtered by `keep`.
fn feasible_with(inst: &TransportationInstance, keep: impl Fn(Edge) -> bool) -> bool {
    let (n1, n2) = (inst.supply_count(), inst.demand_count());
    let (source, sink) = (n1 + n2, n1 + n2 + 1);
    let total = inst.total();
    let mut g = FlowNetwork::new(n1 + n2 + 2);
    for (i, &u) in inst.supplies().iter().enumerate() {
        g.add_arc(source, i, u);
    }
    for (j, &v) in inst.demands().iter().enumerate() {
        g.add_arc(n1 + j, sink, v);
    }
    for e in inst.allowed_edges().filter(|&e| keep(e)) {
        g.add_arc(e.supply - 1, n1 + e.demand - 1, total);
    }
    g.max_flow(source, sink) == total
}

/// Whether the face has any feasible point.
pub fn is_feasible(inst: &TransportationInstance) -> bool {
    feasible_with(inst, |_| true)
}

/// An allowed edge is critical iff forcing its flow to zero leaves the face
/// infeasible.
pub fn critical_pairs_by_feasibility(inst: &TransportationInstance) -> BTreeSet<Edge> {
    inst.allowed_edges()
        .filter(|&e| !feasible_with(inst, |x| x != e))
        .collect()
}

/// Closed form on full polytopes, max-flow test on faces.
pub fn critical_pairs(inst: &TransportationInstance) -> BTreeSet<Edge> {
    if inst.is_face() {
        critical_pairs_by_feasibility(inst)
    } else {
        critical_pairs_closed_form(inst)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct InstanceAnalysis {
    pub supply_count: usize,
    pub demand_count: usize,
    pub vertex_count: usize,
    pub skeleton_edges: usize,
    pub critical: BTreeSet<Edge>,
    pub mu: usize,
    /// Edges positive in at least one vertex.
    pub usable_edges: usize,
    pub dimension: usize,
    pub facet_count: usize,
    pub hirsch_bound: usize,
    pub diameter: usize,
}

/// Enumerates the polytope and assembles its combinatorial data. Fails with
/// [`OracleError::BoundViolation`] if the diameter ever exceeds
/// `N1 + N2 - 1 - mu`.
pub fn analyze(inst: &TransportationInstance, budget: usize) -> Result<InstanceAnalysis, OracleError> {
    let vertices = enumerate_vertices(inst, budget)?;
    if vertices.is_empty() {
        return Err(OracleError::EmptyPolytope);
    }
    analyze_skeleton(inst, &build_skeleton(vertices))
}

/// [`analyze`] on an already built skeleton.
pub fn analyze_skeleton(inst: &TransportationInstance, skeleton: &SkeletonGraph) -> Result<InstanceAnalysis, OracleError> {
    let usable: BTreeSet<Edge> = skeleton.vertices().iter().flat_map(|t| t.edges()).collect();
    let critical = critical_pairs(inst);
    let mu = critical.len();
    let rank = inst.tree_size();
    let dimension = usable.len() - rank;
    let facet_count = usable.len() - mu;
    let hirsch_bound = rank - mu;
    let diameter = skeleton.diameter()?;
    if diameter > hirsch_bound {
        return Err(OracleError::BoundViolation { diameter, bound: hirsch_bound });
    }
    Ok(InstanceAnalysis {
        supply_count: inst.supply_count(),
        demand_count: inst.demand_count(),
        vertex_count: skeleton.len(),
        skeleton_edges: skeleton.edge_count(),
        critical,
        mu,
        usable_edges: usable.len(),
        dimension,
        facet_count,
        hirsch_bound,
        diameter,
    })
}
