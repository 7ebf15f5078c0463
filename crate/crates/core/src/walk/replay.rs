//! Independent replay of a recorded walk.

use alloc::collections::BTreeSet;
use alloc::vec::Vec;
use core::fmt;

use super::Action;
use crate::instance::{Edge, TransportationInstance};
use crate::oracle::critical_pairs;

/// One iteration as written to a trace file.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct StepLog {
    pub action: Action,
    pub edge: Edge,
    pub leaving: Option<Edge>,
    pub delta_prime: usize,
    pub next_supply: Option<usize>,
}

/// Edge-level record of a walk: enough to rebuild every tree.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct WalkLog {
    pub star_demand: usize,
    pub initial_supply: usize,
    pub origin: Vec<Edge>,
    pub final_edges: Vec<Edge>,
    pub steps: Vec<StepLog>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum TraceFailure {
    /// Origin or final edge list is not a non-degenerate vertex.
    BadEndpoint(&'static str),
    /// The tree claimed after an insertion is not a vertex adjacent to the
    /// previous one.
    NotAdjacent { step: usize },
    ShadedEdgeDeleted { step: usize, edge: Edge },
    NotInFinalTree { step: usize, edge: Edge },
    AlreadyShaded { step: usize, edge: Edge },
    /// Shade-only step on an edge missing from the current tree, or an
    /// insertion of an edge that is already present.
    WrongAction { step: usize, edge: Edge },
    /// Recorded `delta'` does not match the edge that was shaded or deleted.
    DeltaMismatch { step: usize },
    /// The replay does not end at the final tree with every edge shaded.
    WrongEnd,
    LengthExceeded { pivots: usize, bound: usize },
}

impl fmt::Display for TraceFailure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            TraceFailure::BadEndpoint(which) => write!(f, "BadEndpoint({which})"),
            TraceFailure::NotAdjacent { step } => write!(f, "NotAdjacent(step {step})"),
            TraceFailure::ShadedEdgeDeleted { step, edge } => {
                write!(f, "ShadedEdgeDeleted(step {step}, {edge})")
            }
            TraceFailure::NotInFinalTree { step, edge } => write!(f, "NotInFinalTree(step {step}, {edge})"),
            TraceFailure::AlreadyShaded { step, edge } => write!(f, "AlreadyShaded(step {step}, {edge})"),
            TraceFailure::WrongAction { step, edge } => write!(f, "WrongAction(step {step}, {edge})"),
            TraceFailure::DeltaMismatch { step } => write!(f, "DeltaMismatch(step {step})"),
            TraceFailure::WrongEnd => f.write_str("WrongEnd"),
            TraceFailure::LengthExceeded { pivots, bound } => {
                write!(f, "LengthExceeded({pivots} > {bound})")
            }
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum TraceVerdict {
    Pass { pivots: usize, bound: usize },
    Fail(TraceFailure),
}

impl TraceVerdict {
    pub fn is_pass(&self) -> bool {
        matches!(self, TraceVerdict::Pass { .. })
    }
}

impl fmt::Display for TraceVerdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            TraceVerdict::Pass { pivots, bound } => write!(f, "PASS ({pivots} pivots, bound {bound})"),
            TraceVerdict::Fail(reason) => write!(f, "FAIL({reason})"),
        }
    }
}

/// Rebuilds every tree of `log` from edge swaps alone and checks that each
/// insertion lands on an adjacent vertex, that shaded edges survive, that the
/// walk ends at the final tree fully shaded, and that the pivot count stays
/// within `N1 + N2 - 1 - mu`.
///
/// Adjacency is tested by recomputing the flows of the swapped tree rather
/// than by running a pivot, so the check does not reuse the walk's own
/// pivot routine.
pub fn verify_log(inst: &TransportationInstance, log: &WalkLog) -> TraceVerdict {
    use TraceFailure::*;
    let fail = TraceVerdict::Fail;

    let vertex = |edges: &[Edge]| {
        inst.flows_on_tree(edges.iter().copied())
            .ok()
            .filter(|t| t.is_strictly_positive())
    };
    let Some(mut current) = vertex(&log.origin) else {
        return fail(BadEndpoint("origin"));
    };
    let Some(final_tree) = vertex(&log.final_edges) else {
        return fail(BadEndpoint("final"));
    };
    let final_set = final_tree.edge_set();
    let mut shaded = BTreeSet::new();
    let mut pivots = 0;

    for (k, step) in log.steps.iter().enumerate() {
        let n = k + 1;
        let e = step.edge;
        if !final_set.contains(&e) {
            return fail(NotInFinalTree { step: n, edge: e });
        }
        if shaded.contains(&e) {
            return fail(AlreadyShaded { step: n, edge: e });
        }
        match step.action {
            Action::ShadeOnly => {
                if !current.contains(e) || step.leaving.is_some() {
                    return fail(WrongAction { step: n, edge: e });
                }
                if step.delta_prime != e.demand {
                    return fail(DeltaMismatch { step: n });
                }
            }
            Action::InsertAndShade => {
                let Some(leave) = step.leaving else {
                    return fail(WrongAction { step: n, edge: e });
                };
                if current.contains(e) {
                    return fail(WrongAction { step: n, edge: e });
                }
                if shaded.contains(&leave) {
                    return fail(ShadedEdgeDeleted { step: n, edge: leave });
                }
                if !current.contains(leave) {
                    return fail(NotAdjacent { step: n });
                }
                let swapped: Vec<Edge> = current.edges().filter(|&x| x != leave).chain([e]).collect();
                match vertex(&swapped) {
                    Some(next) => current = next,
                    None => return fail(NotAdjacent { step: n }),
                }
                if step.delta_prime != leave.demand {
                    return fail(DeltaMismatch { step: n });
                }
                pivots += 1;
            }
        }
        shaded.insert(e);
    }

    if current != final_tree || shaded != final_set {
        return fail(WrongEnd);
    }
    let bound = inst.tree_size() - critical_pairs(inst).len();
    if pivots > bound {
        return fail(LengthExceeded { pivots, bound });
    }
    TraceVerdict::Pass { pivots, bound }
}
