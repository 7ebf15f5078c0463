//! The shading walk between two vertices of a non-degenerate transportation
//! polytope (or one of its faces).
//!
//! Edges of the final tree `F` are labelled `+`/`-` alternately along paths
//! from a chosen demand node `delta*`. The walk repeatedly picks a supply
//! node `sigma` and shades one of its `F`-edges, inserting it first when the
//! current tree lacks it: unshaded `-` edges go first (lowest demand index),
//! the single `+` edge last. Shaded edges are never removed again, so every
//! `F`-edge is inserted at most once and the number of pivots stays within
//! `N1 + N2 - 1 - mu`.

use alloc::collections::{BTreeMap, BTreeSet, VecDeque};
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use crate::instance::{Edge, Node, TransportationInstance};
use crate::tree::{FlowedTree, TreeError};

pub mod diagnostics;
mod replay;

pub use diagnostics::{
    check_no_plus_only_demand, check_shading_order, check_sin, check_uno, diagnose,
    well_connected_components, Component, Diagnostics, Property, UnoVerdict,
};
pub use replay::{verify_log, StepLog, TraceFailure, TraceVerdict, WalkLog};

#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
pub enum WalkError {
    #[error(transparent)]
    Tree(#[from] TreeError),
    #[error("demand index {0} is out of range")]
    DemandIndexOutOfRange(usize),
    #[error("supply index {0} is out of range")]
    SupplyIndexOutOfRange(usize),
    #[error("{0} tree is not a non-degenerate vertex of the instance")]
    NonVertexInput(&'static str),
    #[error("iteration {iteration}: pivot would delete shaded edge {edge}")]
    ShadedEdgeDeleted { iteration: usize, edge: Edge },
    #[error("demand node {0} has no shaded minus edge to continue from")]
    NoMinusEdge(usize),
    #[error("supply node {0} has no unshaded final-tree edge left")]
    NoEdgeToShade(usize),
    #[error("iteration {iteration}: {property} check failed")]
    InvariantViolated { iteration: usize, property: Property },
    #[error("walk stopped without reaching the final tree fully shaded")]
    WrongTermination,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Sign {
    Plus,
    Minus,
}

impl fmt::Display for Sign {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Sign::Plus => "+",
            Sign::Minus => "-",
        })
    }
}

/// `+`/`-` labels on the edges of the final tree.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EdgeLabeling {
    star_demand: usize,
    labels: BTreeMap<Edge, Sign>,
}

impl EdgeLabeling {
    pub fn star_demand(&self) -> usize {
        self.star_demand
    }

    pub fn label(&self, e: Edge) -> Option<Sign> {
        self.labels.get(&e).copied()
    }

    pub fn iter(&self) -> impl Iterator<Item = (Edge, Sign)> + '_ {
        self.labels.iter().map(|(&e, &s)| (e, s))
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn contains(&self, e: Edge) -> bool {
        self.labels.contains_key(&e)
    }

    /// Final-tree edges at a supply node, by increasing demand index.
    pub fn edges_at_supply(&self, supply: usize) -> impl Iterator<Item = (Edge, Sign)> + '_ {
        self.labels
            .range(Edge::new(supply, 0)..=Edge::new(supply, usize::MAX))
            .map(|(&e, &s)| (e, s))
    }

    /// The unique `+` edge at a supply node.
    pub fn plus_edge(&self, supply: usize) -> Option<Edge> {
        self.edges_at_supply(supply).find(|&(_, s)| s == Sign::Plus).map(|(e, _)| e)
    }

    /// The unique `-` edge at a demand node; `None` for `delta*`.
    pub fn minus_edge(&self, demand: usize) -> Option<Edge> {
        self.iter()
            .find(|&(e, s)| e.demand == demand && s == Sign::Minus)
            .map(|(e, _)| e)
    }
}

/// Labels the edges of `final_tree` by breadth-first search from
/// `star_demand`: edges at odd depth get `+`, even depth `-`.
pub fn label_edges(final_tree: &FlowedTree, star_demand: usize) -> Result<EdgeLabeling, WalkError> {
    let (n1, n2) = (final_tree.supply_count(), final_tree.demand_count());
    if !(1..=n2).contains(&star_demand) {
        return Err(WalkError::DemandIndexOutOfRange(star_demand));
    }
    let adj = crate::instance::adjacency(n1, n2, final_tree.flows().keys());
    let root = n1 + star_demand - 1;
    let mut depth = vec![usize::MAX; n1 + n2];
    depth[root] = 0;
    let mut labels = BTreeMap::new();
    let mut queue = VecDeque::from([root]);
    while let Some(x) = queue.pop_front() {
        for &(w, e) in &adj[x] {
            if depth[w] == usize::MAX {
                depth[w] = depth[x] + 1;
                labels.insert(e, if depth[w] % 2 == 1 { Sign::Plus } else { Sign::Minus });
                queue.push_back(w);
            }
        }
    }
    Ok(EdgeLabeling { star_demand, labels })
}

/// A partially shaded tree in the middle of a walk.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct WalkState {
    pub current: FlowedTree,
    pub shaded: BTreeSet<Edge>,
    pub labeling: EdgeLabeling,
    pub current_supply: usize,
}

impl WalkState {
    pub fn new(current: FlowedTree, labeling: EdgeLabeling, current_supply: usize) -> Self {
        WalkState { current, shaded: BTreeSet::new(), labeling, current_supply }
    }

    pub fn is_shaded(&self, e: Edge) -> bool {
        self.shaded.contains(&e)
    }

    /// Supply nodes: their `+` edge is shaded. Demand nodes: no unshaded
    /// edge of the current tree touches them.
    pub fn is_well_connected(&self, node: Node) -> bool {
        match node {
            Node::Supply(i) => self.labeling.plus_edge(i).is_some_and(|e| self.is_shaded(e)),
            Node::Demand(j) => self
                .current
                .edges()
                .filter(|e| e.demand == j)
                .all(|e| self.is_shaded(e)),
        }
    }

    pub fn is_fully_shaded(&self) -> bool {
        self.shaded.len() == self.labeling.len() && self.labeling.iter().all(|(e, _)| self.is_shaded(e))
    }

    /// Shaded edges lie in both the current and the final tree.
    pub fn is_consistent(&self) -> bool {
        self.shaded.iter().all(|&e| self.current.contains(e) && self.labeling.contains(e))
    }

    /// The edge the walk shades next at `current_supply`.
    fn next_edge(&self) -> Result<(Edge, Sign), WalkError> {
        let sigma = self.current_supply;
        let unshaded: Vec<(Edge, Sign)> =
            self.labeling.edges_at_supply(sigma).filter(|&(e, _)| !self.is_shaded(e)).collect();
        let pick = |sign: Sign| unshaded.iter().copied().find(|&(_, s)| s == sign);
        pick(Sign::Minus)
            .or_else(|| pick(Sign::Plus))
            .ok_or(WalkError::NoEdgeToShade(sigma))
    }
}

/// Picks the supply node for the next iteration from the demand node
/// `delta_prime` touched by the last one: the partner of an unshaded edge at
/// `delta_prime` if there is one (lowest supply index), otherwise the supply
/// end of its `-` edge.
pub fn find_new_supply(state: &WalkState, delta_prime: usize) -> Result<usize, WalkError> {
    if let Some(e) = state
        .current
        .edges()
        .find(|e| e.demand == delta_prime && !state.is_shaded(*e))
    {
        return Ok(e.supply);
    }
    match state.labeling.minus_edge(delta_prime) {
        Some(e) if state.is_shaded(e) => Ok(e.supply),
        _ => Err(WalkError::NoMinusEdge(delta_prime)),
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Action {
    ShadeOnly,
    InsertAndShade,
}

impl fmt::Display for Action {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Action::ShadeOnly => "shade",
            Action::InsertAndShade => "insert",
        })
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct IterationRecord {
    /// 1-based.
    pub iteration: usize,
    pub supply: usize,
    pub edge: Edge,
    pub sign: Sign,
    pub action: Action,
    pub leaving: Option<Edge>,
    pub delta_prime: usize,
    /// Supply node chosen for the following iteration; `None` on the last one.
    pub next_supply: Option<usize>,
    /// Current tree after this iteration.
    pub tree: FlowedTree,
    /// Checks on the state this iteration started from (verify mode only).
    pub diagnostics: Option<Diagnostics>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct WalkOptions {
    pub star_demand: usize,
    pub initial_supply: usize,
    /// Run the structural checks before every iteration and fail on the
    /// first violation.
    pub verify: bool,
}

impl Default for WalkOptions {
    fn default() -> Self {
        WalkOptions { star_demand: 1, initial_supply: 1, verify: false }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct WalkTrace {
    pub instance: TransportationInstance,
    pub origin: FlowedTree,
    pub final_tree: FlowedTree,
    pub labeling: EdgeLabeling,
    pub initial_supply: usize,
    pub iterations: Vec<IterationRecord>,
    pub pivot_count: usize,
    /// Outcome of the property check on the terminal state (verify mode only).
    pub terminal: Option<UnoVerdict>,
}

impl WalkTrace {
    /// Trees visited on the skeleton: the origin, then one per insertion.
    pub fn vertices(&self) -> impl Iterator<Item = &FlowedTree> + '_ {
        core::iter::once(&self.origin).chain(
            self.iterations
                .iter()
                .filter(|r| r.action == Action::InsertAndShade)
                .map(|r| &r.tree),
        )
    }

    pub fn log(&self) -> WalkLog {
        WalkLog {
            star_demand: self.labeling.star_demand(),
            initial_supply: self.initial_supply,
            origin: self.origin.key(),
            final_edges: self.final_tree.key(),
            steps: self
                .iterations
                .iter()
                .map(|r| StepLog {
                    action: r.action,
                    edge: r.edge,
                    leaving: r.leaving,
                    delta_prime: r.delta_prime,
                    next_supply: r.next_supply,
                })
                .collect(),
        }
    }
}

fn check_vertex(
    inst: &TransportationInstance,
    tree: &FlowedTree,
    which: &'static str,
) -> Result<(), WalkError> {
    match inst.flows_on_tree(tree.edges()) {
        Ok(t) if &t == tree && t.is_strictly_positive() => Ok(()),
        _ => Err(WalkError::NonVertexInput(which)),
    }
}

/// Runs the walk from `origin` to `final_tree`.
pub fn hirsch_walk(
    inst: &TransportationInstance,
    origin: &FlowedTree,
    final_tree: &FlowedTree,
    options: &WalkOptions,
) -> Result<WalkTrace, WalkError> {
    check_vertex(inst, origin, "origin")?;
    check_vertex(inst, final_tree, "final")?;
    if !(1..=inst.supply_count()).contains(&options.initial_supply) {
        return Err(WalkError::SupplyIndexOutOfRange(options.initial_supply));
    }
    let labeling = label_edges(final_tree, options.star_demand)?;
    let star = options.star_demand;
    let mut state = WalkState::new(origin.clone(), labeling, options.initial_supply);
    let mut iterations = Vec::with_capacity(inst.tree_size());
    let mut pivot_count = 0;
    let mut finished = false;

    for iteration in 1..=inst.tree_size() {
        let diagnostics = if options.verify {
            let d = diagnose(&state, state.current_supply);
            if let Some(property) = d.first_failure() {
                return Err(WalkError::InvariantViolated { iteration, property });
            }
            Some(d)
        } else {
            None
        };

        let sigma = state.current_supply;
        let (edge, sign) = state.next_edge()?;
        let (action, leaving, delta_prime) = if state.current.contains(edge) {
            (Action::ShadeOnly, None, edge.demand)
        } else {
            let out = inst.pivot(&state.current, edge)?;
            if state.is_shaded(out.leave) {
                return Err(WalkError::ShadedEdgeDeleted { iteration, edge: out.leave });
            }
            state.current = out.tree;
            pivot_count += 1;
            (Action::InsertAndShade, Some(out.leave), out.leave.demand)
        };
        state.shaded.insert(edge);

        finished = state
            .current
            .edges()
            .filter(|e| e.demand == star)
            .all(|e| state.is_shaded(e));
        let next_supply = if finished { None } else { Some(find_new_supply(&state, delta_prime)?) };

        iterations.push(IterationRecord {
            iteration,
            supply: sigma,
            edge,
            sign,
            action,
            leaving,
            delta_prime,
            next_supply,
            tree: state.current.clone(),
            diagnostics,
        });
        match next_supply {
            Some(s) => state.current_supply = s,
            None => break,
        }
    }

    if !finished || !state.is_fully_shaded() || state.current != *final_tree {
        return Err(WalkError::WrongTermination);
    }
    let terminal = if options.verify {
        let verdict = check_uno(&state);
        if verdict != UnoVerdict::Terminal {
            return Err(WalkError::InvariantViolated {
                iteration: iterations.len() + 1,
                property: Property::Uno,
            });
        }
        Some(verdict)
    } else {
        None
    };

    Ok(WalkTrace {
        instance: inst.clone(),
        origin: origin.clone(),
        final_tree: final_tree.clone(),
        labeling: state.labeling,
        initial_supply: options.initial_supply,
        iterations,
        pivot_count,
        terminal,
    })
}

/// Pivot counts for every `(delta*, sigma0)` choice.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ExhaustiveSummary {
    /// `(star_demand, initial_supply, pivot_count)` in index order.
    pub runs: Vec<(usize, usize, usize)>,
    pub min_pivots: usize,
    pub max_pivots: usize,
}

impl ExhaustiveSummary {
    /// First choice attaining the minimum.
    pub fn best(&self) -> (usize, usize) {
        let &(d, s, _) = self.runs.iter().find(|r| r.2 == self.min_pivots).expect("at least one run");
        (d, s)
    }
}

pub fn exhaustive_walks(
    inst: &TransportationInstance,
    origin: &FlowedTree,
    final_tree: &FlowedTree,
    verify: bool,
) -> Result<ExhaustiveSummary, WalkError> {
    let mut runs = Vec::new();
    for star_demand in 1..=inst.demand_count() {
        for initial_supply in 1..=inst.supply_count() {
            let options = WalkOptions { star_demand, initial_supply, verify };
            let trace = hirsch_walk(inst, origin, final_tree, &options)?;
            runs.push((star_demand, initial_supply, trace.pivot_count));
        }
    }
    let min_pivots = runs.iter().map(|r| r.2).min().unwrap_or(0);
    let max_pivots = runs.iter().map(|r| r.2).max().unwrap_or(0);
    Ok(ExhaustiveSummary { runs, min_pivots, max_pivots })
}

#[cfg(test)]
mod tests;
