//! Spanning trees with exact flows, vertex tests and pivots.

use alloc::collections::{BTreeMap, BTreeSet, VecDeque};
use alloc::vec;
use alloc::vec::Vec;

use crate::instance::{adjacency, Dsu, Edge, TransportationInstance};

#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
pub enum TreeError {
    #[error("edge {0} is outside the instance")]
    EdgeOutOfRange(Edge),
    #[error("edge {0} is forbidden in this face")]
    UsesForbiddenEdge(Edge),
    #[error("{edges} edges on {nodes} nodes do not form a spanning tree")]
    NotASpanningTree { edges: usize, nodes: usize },
    #[error("entering edge {0} is already in the tree")]
    EdgeAlreadyPresent(Edge),
    #[error("entering edge {0} is forbidden in this face")]
    ForbiddenEdge(Edge),
    #[error("tree does not belong to this instance")]
    ShapeMismatch,
    #[error("tree carries a non-positive flow and is not a non-degenerate vertex")]
    NotAVertex,
    #[error("pivot on {enter} is degenerate: leaving candidates {candidates:?} at step {theta}")]
    DegeneratePivot { enter: Edge, candidates: Vec<Edge>, theta: i64 },
}

/// Sign pattern of the flows on a tree.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum VertexStatus {
    /// Some flow is negative: not a feasible point.
    Infeasible,
    /// Feasible, but some tree edge carries zero flow.
    Degenerate,
    /// All flows strictly positive.
    NonDegenerate,
}

/// A spanning tree of the allowed bipartite graph together with the unique
/// flow on it that meets every margin. Flows may be negative; the tree is a
/// polytope vertex only when they are not.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct FlowedTree {
    supply_count: usize,
    demand_count: usize,
    flows: BTreeMap<Edge, i64>,
}

impl FlowedTree {
    pub fn supply_count(&self) -> usize {
        self.supply_count
    }

    pub fn demand_count(&self) -> usize {
        self.demand_count
    }

    /// Tree edges in canonical order.
    pub fn edges(&self) -> impl Iterator<Item = Edge> + '_ {
        self.flows.keys().copied()
    }

    pub fn edge_set(&self) -> BTreeSet<Edge> {
        self.flows.keys().copied().collect()
    }

    /// Sorted edge list; two trees of one instance are equal iff their keys are.
    pub fn key(&self) -> Vec<Edge> {
        self.flows.keys().copied().collect()
    }

    pub fn flows(&self) -> &BTreeMap<Edge, i64> {
        &self.flows
    }

    pub fn flow(&self, e: Edge) -> Option<i64> {
        self.flows.get(&e).copied()
    }

    pub fn contains(&self, e: Edge) -> bool {
        self.flows.contains_key(&e)
    }

    pub fn len(&self) -> usize {
        self.flows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.flows.is_empty()
    }

    pub fn vertex_status(&self) -> VertexStatus {
        let min = self.flows.values().copied().min().unwrap_or(0);
        match min {
            m if m < 0 => VertexStatus::Infeasible,
            0 => VertexStatus::Degenerate,
            _ => VertexStatus::NonDegenerate,
        }
    }

    /// Feasible point of the polytope, i.e. all flows non-negative.
    pub fn is_vertex(&self) -> bool {
        self.vertex_status() != VertexStatus::Infeasible
    }

    pub fn is_strictly_positive(&self) -> bool {
        self.vertex_status() == VertexStatus::NonDegenerate
    }

    /// Number of edges present in `self` but not in `other`.
    pub fn edge_difference(&self, other: &FlowedTree) -> usize {
        self.flows.keys().filter(|e| !other.flows.contains_key(e)).count()
    }

    fn adjacency(&self) -> Vec<Vec<(usize, Edge)>> {
        adjacency(self.supply_count, self.demand_count, self.flows.keys())
    }
}

/// Result of a single pivot.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PivotOutcome {
    pub tree: FlowedTree,
    pub enter: Edge,
    pub leave: Edge,
    /// Amount shifted around the cycle.
    pub theta: i64,
}

impl TransportationInstance {
    /// Computes the flow on a spanning tree by repeatedly peeling leaves:
    /// a leaf's remaining margin must travel along its only edge.
    pub fn flows_on_tree(
        &self,
        edges: impl IntoIterator<Item = Edge>,
    ) -> Result<FlowedTree, TreeError> {
        let edges: BTreeSet<Edge> = edges.into_iter().collect();
        for &e in &edges {
            if !self.contains_edge(e) {
                return Err(TreeError::EdgeOutOfRange(e));
            }
            if self.forbidden().contains(&e) {
                return Err(TreeError::UsesForbiddenEdge(e));
            }
        }
        let (n1, n2) = (self.supply_count(), self.demand_count());
        let nodes = n1 + n2;
        let not_tree = TreeError::NotASpanningTree { edges: edges.len(), nodes };
        if edges.len() + 1 != nodes {
            return Err(not_tree);
        }
        let mut dsu = Dsu::new(nodes);
        for e in &edges {
            if !dsu.union(e.s(), n1 + e.d()) {
                return Err(not_tree);
            }
        }

        let adj = adjacency(n1, n2, &edges);
        let mut residual: Vec<i64> = self.supplies().iter().chain(self.demands()).copied().collect();
        let mut degree: Vec<usize> = adj.iter().map(Vec::len).collect();
        let mut done = vec![false; nodes];
        let mut leaves: VecDeque<usize> = (0..nodes).filter(|&x| degree[x] == 1).collect();
        let mut flows = BTreeMap::new();

        while let Some(leaf) = leaves.pop_front() {
            if done[leaf] || degree[leaf] != 1 {
                continue;
            }
            let &(other, e) = adj[leaf]
                .iter()
                .find(|(w, _)| !done[*w])
                .expect("leaf keeps one live edge");
            let y = residual[leaf];
            flows.insert(e, y);
            residual[other] -= y;
            done[leaf] = true;
            degree[other] -= 1;
            if degree[other] == 1 {
                leaves.push_back(other);
            }
        }
        debug_assert_eq!(flows.len(), edges.len());
        Ok(FlowedTree { supply_count: n1, demand_count: n2, flows })
    }

    /// Inserts `enter`, shifts flow around the unique cycle (up on `enter`,
    /// alternating down/up along the tree path) and drops the edge whose flow
    /// reaches zero first.
    ///
    /// A tie between leaving candidates, or a zero step, means the pivot does
    /// not move to a distinct adjacent vertex and is reported as
    /// [`TreeError::DegeneratePivot`].
    pub fn pivot(&self, tree: &FlowedTree, enter: Edge) -> Result<PivotOutcome, TreeError> {
        self.check_shape(tree)?;
        if !self.contains_edge(enter) {
            return Err(TreeError::EdgeOutOfRange(enter));
        }
        if self.forbidden().contains(&enter) {
            return Err(TreeError::ForbiddenEdge(enter));
        }
        if tree.contains(enter) {
            return Err(TreeError::EdgeAlreadyPresent(enter));
        }
        if !tree.is_vertex() {
            return Err(TreeError::NotAVertex);
        }

        let path = tree_path(tree, enter);
        // path[0] touches the demand end of `enter` and is decreased; signs alternate.
        let decreased = path.iter().step_by(2);
        let theta = decreased.clone().map(|e| tree.flows[e]).min().expect("cycle has a decreased edge");
        let candidates: Vec<Edge> = decreased.copied().filter(|e| tree.flows[e] == theta).collect();
        if candidates.len() != 1 || theta == 0 {
            return Err(TreeError::DegeneratePivot { enter, candidates, theta });
        }
        let leave = candidates[0];

        let mut flows = tree.flows.clone();
        for (k, e) in path.iter().enumerate() {
            let y = flows.get_mut(e).expect("path edge in tree");
            if k % 2 == 0 {
                *y -= theta;
            } else {
                *y += theta;
            }
        }
        flows.remove(&leave);
        flows.insert(enter, theta);
        Ok(PivotOutcome {
            tree: FlowedTree { flows, ..*tree },
            enter,
            leave,
            theta,
        })
    }

    /// Pivots on every allowed edge outside `tree`, in canonical edge order.
    pub fn neighbors(&self, tree: &FlowedTree) -> Result<Vec<PivotOutcome>, TreeError> {
        self.allowed_edges()
            .filter(|e| !tree.contains(*e))
            .map(|e| self.pivot(tree, e))
            .collect()
    }

    fn check_shape(&self, tree: &FlowedTree) -> Result<(), TreeError> {
        if tree.supply_count != self.supply_count() || tree.demand_count != self.demand_count() {
            return Err(TreeError::ShapeMismatch);
        }
        Ok(())
    }
}


/// Tree path from the demand end of `enter` to its supply end, listed from
/// the demand side.
fn tree_path(tree: &FlowedTree, enter: Edge) -> Vec<Edge> {
    let n1 = tree.supply_count;
    let adj = tree.adjacency();
    let (start, goal) = (n1 + enter.d(), enter.s());
    let mut via: Vec<Option<(usize, Edge)>> = vec![None; adj.len()];
    let mut seen = vec![false; adj.len()];
    let mut queue = VecDeque::from([start]);
    seen[start] = true;
    while let Some(x) = queue.pop_front() {
        if x == goal {
            break;
        }
        for &(w, e) in &adj[x] {
            if !seen[w] {
                seen[w] = true;
                via[w] = Some((x, e));
                queue.push_back(w);
            }
        }
    }
    // Walk back from the supply end, then flip so the demand end comes first.
    let mut path = Vec::new();
    let mut x = goal;
    while let Some((prev, e)) = via[x] {
        path.push(e);
        x = prev;
    }
    path.reverse();
    path
}

#[cfg(test)]
mod tests {
    use super::*;

    fn e(s: usize, d: usize) -> Edge {
        Edge::new(s, d)
    }

    fn flows_of(t: &FlowedTree) -> Vec<(Edge, i64)> {
        t.flows().iter().map(|(&e, &y)| (e, y)).collect()
    }

    fn five_three() -> TransportationInstance {
        TransportationInstance::full(vec![5, 3], vec![4, 2, 2]).unwrap()
    }

    #[test]
    fn five_three_left_flows() {
        let t = five_three().flows_on_tree([e(1, 1), e(1, 2), e(2, 2), e(2, 3)]).unwrap();
        assert_eq!(flows_of(&t), vec![(e(1, 1), 4), (e(1, 2), 1), (e(2, 2), 1), (e(2, 3), 2)]);
        assert_eq!(t.vertex_status(), VertexStatus::NonDegenerate);
    }

    #[test]
    fn single_edge_tree() {
        let inst = TransportationInstance::full(vec![5], vec![5]).unwrap();
        let t = inst.flows_on_tree([e(1, 1)]).unwrap();
        assert_eq!(flows_of(&t), vec![(e(1, 1), 5)]);
        assert!(t.is_vertex());
        assert!(inst.neighbors(&t).unwrap().is_empty());
    }

    #[test]
    fn three_three_origin_flows() {
        let inst = TransportationInstance::full(vec![3, 3], vec![2, 2, 2]).unwrap();
        let t = inst.flows_on_tree([e(1, 1), e(1, 2), e(2, 2), e(2, 3)]).unwrap();
        assert_eq!(flows_of(&t), vec![(e(1, 1), 2), (e(1, 2), 1), (e(2, 2), 1), (e(2, 3), 2)]);
    }

    #[test]
    fn infeasible_tree_is_not_a_vertex() {
        // y11 = 5 forces y21 = -1 at demand 1.
        let t = five_three().flows_on_tree([e(2, 1), e(2, 2), e(2, 3), e(1, 1)]).unwrap();
        assert_eq!(t.flow(e(1, 1)), Some(5));
        assert_eq!(t.flow(e(2, 1)), Some(-1));
        assert!(!t.is_vertex());
        assert_eq!(t.vertex_status(), VertexStatus::Infeasible);
    }

    #[test]
    fn rejects_non_trees() {
        let inst = five_three();
        assert!(matches!(
            inst.flows_on_tree([e(1, 1), e(1, 2), e(2, 2)]),
            Err(TreeError::NotASpanningTree { edges: 3, nodes: 5 })
        ));
        // four edges but with a cycle, demand 3 isolated
        assert!(matches!(
            inst.flows_on_tree([e(1, 1), e(1, 2), e(2, 1), e(2, 2)]),
            Err(TreeError::NotASpanningTree { .. })
        ));
        assert_eq!(inst.flows_on_tree([e(3, 1)]), Err(TreeError::EdgeOutOfRange(e(3, 1))));
        let face = TransportationInstance::new(vec![5, 3], vec![4, 2, 2], [e(1, 2)]).unwrap();
        assert_eq!(
            face.flows_on_tree([e(1, 1), e(1, 2), e(2, 2), e(2, 3)]),
            Err(TreeError::UsesForbiddenEdge(e(1, 2)))
        );
    }

    #[test]
    fn five_three_pivot() {
        let inst = five_three();
        let left = inst.flows_on_tree([e(1, 1), e(1, 2), e(2, 2), e(2, 3)]).unwrap();
        let out = inst.pivot(&left, e(2, 1)).unwrap();
        assert_eq!(out.leave, e(2, 2));
        assert_eq!(flows_of(&out.tree), vec![(e(1, 1), 3), (e(1, 2), 2), (e(2, 1), 1), (e(2, 3), 2)]);
        assert_eq!(out.tree.edge_difference(&left), 1);
    }

    #[test]
    fn three_three_first_pivot() {
        let inst = TransportationInstance::full(vec![3, 3], vec![2, 2, 2]).unwrap();
        let origin = inst.flows_on_tree([e(1, 1), e(1, 2), e(2, 2), e(2, 3)]).unwrap();
        let out = inst.pivot(&origin, e(1, 3)).unwrap();
        assert_eq!(out.leave, e(1, 2));
        assert_eq!(flows_of(&out.tree), vec![(e(1, 1), 2), (e(1, 3), 1), (e(2, 2), 2), (e(2, 3), 1)]);
        assert_eq!(inst.neighbors(&origin).unwrap().len(), 2);
    }

    #[test]
    fn degenerate_pivot_is_an_error() {
        let inst = TransportationInstance::full(vec![2, 2], vec![1, 2, 1]).unwrap();
        let t = inst.flows_on_tree([e(1, 1), e(1, 2), e(2, 2), e(2, 3)]).unwrap();
        assert!(t.flows().values().all(|&y| y == 1));
        match inst.pivot(&t, e(2, 1)) {
            Err(TreeError::DegeneratePivot { enter, candidates, theta }) => {
                assert_eq!(enter, e(2, 1));
                assert_eq!(candidates, vec![e(1, 1), e(2, 2)]);
                assert_eq!(theta, 1);
            }
            other => panic!("expected degenerate pivot, got {other:?}"),
        }
    }

    #[test]
    fn pivot_argument_errors() {
        let inst = five_three();
        let t = inst.flows_on_tree([e(1, 1), e(1, 2), e(2, 2), e(2, 3)]).unwrap();
        assert_eq!(inst.pivot(&t, e(1, 1)), Err(TreeError::EdgeAlreadyPresent(e(1, 1))));
        let face = TransportationInstance::new(vec![5, 3], vec![4, 2, 2], [e(2, 1)]).unwrap();
        assert_eq!(face.pivot(&t, e(2, 1)), Err(TreeError::ForbiddenEdge(e(2, 1))));
        let bad = inst.flows_on_tree([e(2, 1), e(2, 2), e(2, 3), e(1, 1)]).unwrap();
        assert_eq!(inst.pivot(&bad, e(1, 2)), Err(TreeError::NotAVertex));
    }

    #[test]
    fn five_three_neighbors() {
        let inst = five_three();
        let left = inst.flows_on_tree([e(1, 1), e(1, 2), e(2, 2), e(2, 3)]).unwrap();
        let ns = inst.neighbors(&left).unwrap();
        let entered: Vec<Edge> = ns.iter().map(|o| o.enter).collect();
        assert_eq!(entered, vec![e(1, 3), e(2, 1)]);
        assert!(ns.iter().all(|o| o.tree.is_strictly_positive()));
    }

    mod props {
        use super::*;
        use proptest::prelude::*;

        /// A balanced instance plus a random spanning tree (Prüfer-free:
        /// random attachment order) of `K_{n1,n2}`.
        fn instance_and_tree() -> impl Strategy<Value = (TransportationInstance, Vec<Edge>)> {
            (1usize..5, 1usize..5)
                .prop_flat_map(|(n1, n2)| {
                    (
                        prop::collection::vec(1i64..20, n1),
                        prop::collection::vec(1i64..20, n2),
                        prop::collection::vec(any::<u32>(), n1 + n2),
                    )
                })
                .prop_map(|(mut u, mut v, picks)| {
                    let (su, sv): (i64, i64) = (u.iter().sum(), v.iter().sum());
                    if su > sv {
                        *v.last_mut().unwrap() += su - sv;
                    } else {
                        *u.last_mut().unwrap() += sv - su;
                    }
                    let (n1, n2) = (u.len(), v.len());
                    // attach nodes one by one to an already placed node of the other side
                    let mut placed_s = vec![1usize];
                    let mut placed_d: Vec<usize> = Vec::new();
                    let mut edges = Vec::new();
                    let mut order: Vec<(bool, usize)> =
                        (2..=n1).map(|i| (true, i)).chain((1..=n2).map(|j| (false, j))).collect();
                    // demands first guarantees supplies always find a partner
                    order.sort_by_key(|&(is_s, _)| is_s);
                    for (k, (is_s, idx)) in order.into_iter().enumerate() {
                        let p = picks[k] as usize;
                        if is_s {
                            let d = placed_d[p % placed_d.len()];
                            edges.push(Edge::new(idx, d));
                            placed_s.push(idx);
                        } else {
                            let s = placed_s[p % placed_s.len()];
                            edges.push(Edge::new(s, idx));
                            placed_d.push(idx);
                        }
                    }
                    (TransportationInstance::full(u, v).unwrap(), edges)
                })
        }

        /// Northwest-corner starting tree; always a feasible basis.
        fn northwest_corner(inst: &TransportationInstance) -> Vec<Edge> {
            let (mut u, mut v) = (inst.supplies().to_vec(), inst.demands().to_vec());
            let (mut i, mut j) = (0, 0);
            let mut edges = Vec::new();
            loop {
                edges.push(Edge::new(i + 1, j + 1));
                let x = u[i].min(v[j]);
                u[i] -= x;
                v[j] -= x;
                if i + 1 == u.len() && j + 1 == v.len() {
                    return edges;
                }
                if (u[i] == 0 && i + 1 < u.len()) || j + 1 == v.len() {
                    i += 1;
                } else {
                    j += 1;
                }
            }
        }

        proptest! {
            #[test]
            fn flows_meet_every_margin((inst, edges) in instance_and_tree()) {
                let t = inst.flows_on_tree(edges).unwrap();
                let mut row = vec![0i64; inst.supply_count()];
                let mut col = vec![0i64; inst.demand_count()];
                for (e, &y) in t.flows() {
                    row[e.supply - 1] += y;
                    col[e.demand - 1] += y;
                }
                prop_assert_eq!(row.as_slice(), inst.supplies());
                prop_assert_eq!(col.as_slice(), inst.demands());
            }

            #[test]
            fn pivots_conserve_margins_and_reverse((inst, _) in instance_and_tree(), picks in prop::collection::vec(any::<usize>(), 1..8)) {
                let mut t = inst.flows_on_tree(northwest_corner(&inst)).unwrap();
                prop_assume!(t.is_strictly_positive());
                let outside: Vec<Edge> = inst.allowed_edges().filter(|e| !t.contains(*e)).collect();
                prop_assume!(!outside.is_empty());
                // a short random walk, checking every pivot on the way
                for pick in picks {
                    let outside: Vec<Edge> = inst.allowed_edges().filter(|e| !t.contains(*e)).collect();
                    let enter = outside[pick % outside.len()];
                    match inst.pivot(&t, enter) {
                        Ok(out) => {
                            let recomputed = inst.flows_on_tree(out.tree.edges()).unwrap();
                            prop_assert_eq!(&recomputed, &out.tree);
                            prop_assert!(out.tree.is_strictly_positive());
                            prop_assert_eq!(out.tree.edge_difference(&t), 1);
                            let back = inst.pivot(&out.tree, out.leave).unwrap();
                            prop_assert_eq!(back.leave, enter);
                            prop_assert_eq!(&back.tree, &t);
                            t = out.tree;
                        }
                        Err(TreeError::DegeneratePivot { candidates, theta, .. }) => {
                            prop_assert!(candidates.len() > 1 || theta == 0)
                        }
                        Err(other) => prop_assert!(false, "unexpected {:?}", other),
                    }
                }
            }
        }
    }
}
