use alloc::collections::BTreeSet;
use alloc::vec;
use alloc::vec::Vec;

use super::*;
use crate::oracle::{build_skeleton, enumerate_vertices, DEFAULT_BUDGET};

fn e(s: usize, d: usize) -> Edge {
    Edge::new(s, d)
}

fn example() -> (TransportationInstance, FlowedTree, FlowedTree) {
    let inst = TransportationInstance::full(vec![3, 3], vec![2, 2, 2]).unwrap();
    let o = inst.flows_on_tree([e(1, 1), e(1, 2), e(2, 2), e(2, 3)]).unwrap();
    let f = inst.flows_on_tree([e(1, 2), e(1, 3), e(2, 1), e(2, 2)]).unwrap();
    (inst, o, f)
}

fn labeling_invariants(l: &EdgeLabeling, tree: &FlowedTree) {
    for s in 1..=tree.supply_count() {
        assert_eq!(l.edges_at_supply(s).filter(|&(_, x)| x == Sign::Plus).count(), 1, "supply {s}");
    }
    for d in 1..=tree.demand_count() {
        let minus = l.iter().filter(|&(e, x)| e.demand == d && x == Sign::Minus).count();
        assert_eq!(minus, usize::from(d != l.star_demand()), "demand {d}");
    }
}

#[test]
fn final_tree_labels() {
    let (_, _, f) = example();
    let l = label_edges(&f, 1).unwrap();
    assert_eq!(l.label(e(2, 1)), Some(Sign::Plus));
    assert_eq!(l.label(e(2, 2)), Some(Sign::Minus));
    assert_eq!(l.label(e(1, 2)), Some(Sign::Plus));
    assert_eq!(l.label(e(1, 3)), Some(Sign::Minus));
    assert_eq!(l.len(), 4);
    labeling_invariants(&l, &f);
    assert_eq!(label_edges(&f, 4), Err(WalkError::DemandIndexOutOfRange(4)));
}

#[test]
fn star_labels_are_all_plus() {
    let inst = TransportationInstance::full(vec![1, 2, 3], vec![6]).unwrap();
    let t = inst.flows_on_tree([e(1, 1), e(2, 1), e(3, 1)]).unwrap();
    let l = label_edges(&t, 1).unwrap();
    assert!(l.iter().all(|(_, s)| s == Sign::Plus));
}

#[test]
fn path_labels_alternate() {
    // delta* - sigma1 - delta2 - sigma2
    let inst = TransportationInstance::full(vec![3, 2], vec![2, 3]).unwrap();
    let t = inst.flows_on_tree([e(1, 1), e(1, 2), e(2, 2)]).unwrap();
    let l = label_edges(&t, 1).unwrap();
    assert_eq!(l.label(e(1, 1)), Some(Sign::Plus));
    assert_eq!(l.label(e(1, 2)), Some(Sign::Minus));
    assert_eq!(l.label(e(2, 2)), Some(Sign::Plus));
    labeling_invariants(&l, &t);
}

#[test]
fn golden_walk() {
    let (inst, o, f) = example();
    let opts = WalkOptions { verify: true, ..WalkOptions::default() };
    let trace = hirsch_walk(&inst, &o, &f, &opts).unwrap();
    assert_eq!(trace.iterations.len(), 4);
    assert_eq!(trace.pivot_count, 3);
    let steps: Vec<_> = trace
        .iterations
        .iter()
        .map(|r| (r.supply, r.edge, r.action, r.leaving, r.delta_prime, r.next_supply))
        .collect();
    assert_eq!(
        steps,
        vec![
            (1, e(1, 3), Action::InsertAndShade, Some(e(1, 2)), 2, Some(2)),
            (2, e(2, 2), Action::ShadeOnly, None, 2, Some(2)),
            (2, e(2, 1), Action::InsertAndShade, Some(e(2, 3)), 3, Some(1)),
            (1, e(1, 2), Action::InsertAndShade, Some(e(1, 1)), 1, None),
        ]
    );
    assert_eq!(trace.iterations.last().unwrap().tree, f);
    assert_eq!(trace.terminal, Some(UnoVerdict::Terminal));
    assert!(trace.iterations.iter().all(|r| r.diagnostics.as_ref().is_some_and(Diagnostics::passed)));
    let vs: Vec<_> = trace.vertices().collect();
    assert_eq!(vs.len(), 4);
    for w in vs.windows(2) {
        assert_eq!(w[0].edge_difference(w[1]), 1);
    }
}

#[test]
fn walk_to_itself_only_shades() {
    let (inst, o, _) = example();
    let trace = hirsch_walk(&inst, &o, &o, &WalkOptions { verify: true, ..Default::default() }).unwrap();
    assert_eq!(trace.pivot_count, 0);
    assert_eq!(trace.iterations.len(), inst.tree_size());
    assert!(trace.iterations.iter().all(|r| r.action == Action::ShadeOnly));
}

#[test]
fn bad_inputs_are_rejected() {
    let (inst, o, f) = example();
    let bad = inst.flows_on_tree([e(2, 1), e(2, 2), e(2, 3), e(1, 1)]).unwrap();
    assert_eq!(hirsch_walk(&inst, &bad, &f, &WalkOptions::default()), Err(WalkError::NonVertexInput("origin")));
    assert_eq!(hirsch_walk(&inst, &o, &bad, &WalkOptions::default()), Err(WalkError::NonVertexInput("final")));
    let opts = WalkOptions { initial_supply: 3, ..Default::default() };
    assert_eq!(hirsch_walk(&inst, &o, &f, &opts), Err(WalkError::SupplyIndexOutOfRange(3)));
    let opts = WalkOptions { star_demand: 0, ..Default::default() };
    assert_eq!(hirsch_walk(&inst, &o, &f, &opts), Err(WalkError::DemandIndexOutOfRange(0)));
}

/// State of the example walk after `k` iterations.
fn state_after(k: usize) -> WalkState {
    let (inst, o, f) = example();
    let trace = hirsch_walk(&inst, &o, &f, &WalkOptions::default()).unwrap();
    let mut state = WalkState::new(o, label_edges(&f, 1).unwrap(), 1);
    for r in &trace.iterations[..k] {
        state.current = r.tree.clone();
        state.shaded.insert(r.edge);
        state.current_supply = r.next_supply.unwrap_or(r.supply);
    }
    state
}

#[test]
fn new_supply_choices() {
    assert_eq!(find_new_supply(&state_after(1), 2), Ok(2));
    assert_eq!(find_new_supply(&state_after(2), 2), Ok(2));
    assert_eq!(find_new_supply(&state_after(3), 3), Ok(1));
    // demand 1 is delta*: no minus edge once its edges are all shaded
    assert_eq!(find_new_supply(&state_after(4), 1), Err(WalkError::NoMinusEdge(1)));
}

#[test]
fn unshaded_tree_components() {
    let s = state_after(0);
    let comps = well_connected_components(&s);
    assert_eq!(comps.len(), 5);
    assert!(comps.iter().all(|c| c.nodes.len() == 1 && c.open == c.nodes));
    assert_eq!(check_uno(&s), UnoVerdict::Holds);
    for sigma in 1..=2 {
        assert!(check_sin(&s, sigma));
    }
}

#[test]
fn components_after_two_iterations() {
    let s = state_after(2);
    assert!(s.is_well_connected(Node::Demand(2)));
    assert!(!s.is_well_connected(Node::Supply(1)));
    assert!(!s.is_well_connected(Node::Supply(2)));
    let comps = well_connected_components(&s);
    let joined: Vec<_> = comps.iter().filter(|c| c.nodes.len() > 1).collect();
    assert_eq!(joined.len(), 1);
    assert_eq!(joined[0].nodes, vec![Node::Supply(2), Node::Demand(2)]);
    assert_eq!(joined[0].open, vec![Node::Supply(2)]);
    assert_eq!(check_uno(&s), UnoVerdict::Holds);
}

#[test]
fn every_intermediate_state_satisfies_the_checks() {
    for k in 0..4 {
        let s = state_after(k);
        assert_eq!(check_uno(&s), UnoVerdict::Holds, "after {k}");
        assert!(check_sin(&s, s.current_supply), "after {k}");
        assert!(diagnose(&s, s.current_supply).passed(), "after {k}");
    }
}

#[test]
fn final_state_is_terminal() {
    let s = state_after(4);
    let comps = well_connected_components(&s);
    assert_eq!(comps.len(), 1);
    assert!(comps[0].open.is_empty());
    assert_eq!(check_uno(&s), UnoVerdict::Terminal);
}

#[test]
fn two_open_nodes_violate_uno() {
    // Supply 1 carries the + edge (1,1) and - edges (1,2), (1,3); demands 2
    // and 3 keep unshaded edges to supplies 2 and 3.
    let inst = TransportationInstance::full(vec![3, 1, 1], vec![1, 2, 2]).unwrap();
    let f = inst.flows_on_tree([e(1, 1), e(1, 2), e(1, 3), e(2, 2), e(3, 3)]).unwrap();
    let mut s = WalkState::new(f.clone(), label_edges(&f, 1).unwrap(), 1);
    s.shaded.extend([e(1, 1), e(1, 2), e(1, 3)]);
    match check_uno(&s) {
        UnoVerdict::Violated(c) => {
            assert_eq!(c.open, vec![Node::Demand(2), Node::Demand(3)]);
            assert!(c.nodes.contains(&Node::Supply(1)));
        }
        other => panic!("expected a violation, got {other:?}"),
    }
}

#[test]
fn shaded_plus_edge_at_odd_rank_breaks_sin() {
    let (_, _, f) = example();
    let mut s = WalkState::new(f.clone(), label_edges(&f, 1).unwrap(), 2);
    s.shaded.insert(e(2, 1));
    assert!(!check_sin(&s, 2));
    assert!(!check_sin(&s, 3));
}

#[test]
fn shading_order_and_plus_only_demands() {
    let (_, _, f) = example();
    let mut s = WalkState::new(f.clone(), label_edges(&f, 1).unwrap(), 1);
    s.shaded.insert(e(1, 2));
    // + edge at supply 1 shaded while (1,3) is not
    assert!(!check_shading_order(&s));
    s.shaded.insert(e(2, 1));
    // demand 1 only touches (2,1), a shaded + edge
    assert!(!check_no_plus_only_demand(&s));
    let diag = diagnose(&s, 1);
    assert!(!diag.shading_order && !diag.no_plus_only_demand);
    assert!(diag.first_failure().is_some());
}

#[test]
fn recorded_log_replays() {
    let (inst, o, f) = example();
    let trace = hirsch_walk(&inst, &o, &f, &WalkOptions::default()).unwrap();
    let log = trace.log();
    assert_eq!(verify_log(&inst, &log), TraceVerdict::Pass { pivots: 3, bound: 4 });

    let mut tampered = log.clone();
    tampered.steps[0].leaving = Some(e(1, 1));
    assert_eq!(verify_log(&inst, &tampered), TraceVerdict::Fail(TraceFailure::NotAdjacent { step: 1 }));

    let mut short = log.clone();
    short.steps.pop();
    assert_eq!(verify_log(&inst, &short), TraceVerdict::Fail(TraceFailure::WrongEnd));

    let mut twice = log;
    twice.steps[1].edge = e(1, 3);
    assert!(matches!(verify_log(&inst, &twice), TraceVerdict::Fail(TraceFailure::AlreadyShaded { .. })));
}

#[test]
fn exhaustive_choices_on_the_example() {
    let (inst, o, f) = example();
    let summary = exhaustive_walks(&inst, &o, &f, true).unwrap();
    assert_eq!(summary.runs.len(), 6);
    assert_eq!(summary.min_pivots, 3);
    assert!(summary.max_pivots <= 4);
}

#[test]
fn all_pairs_on_a_three_by_four_instance() {
    let inst = TransportationInstance::full(vec![7, 9, 13], vec![4, 6, 8, 11]).unwrap();
    assert!(inst.check_nondegenerate().holds);
    let sk = build_skeleton(enumerate_vertices(&inst, DEFAULT_BUDGET).unwrap());
    let bound = inst.tree_size() - crate::oracle::critical_pairs(&inst).len();
    let step = (sk.len() / 12).max(1);
    for a in (0..sk.len()).step_by(step) {
        let dist = sk.bfs(a);
        for b in (0..sk.len()).step_by(step) {
            let (o, f) = (&sk.vertices()[a], &sk.vertices()[b]);
            let trace = hirsch_walk(&inst, o, f, &WalkOptions { verify: true, ..Default::default() }).unwrap();
            assert!(trace.pivot_count <= bound);
            assert!(trace.pivot_count >= dist[b].unwrap());
            let missing: BTreeSet<Edge> = f.edge_set().difference(&o.edge_set()).copied().collect();
            assert!(trace.pivot_count >= missing.len());
            assert!(verify_log(&inst, &trace.log()).is_pass());
        }
    }
}
