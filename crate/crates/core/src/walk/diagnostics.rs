//! Structural checks on partially shaded trees: well-connected components,
//! the unique-open-node property and the supply-node insertion property.

use alloc::collections::{BTreeMap, VecDeque};
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use super::{Sign, WalkState};
use crate::instance::{adjacency, Dsu, Node};

/// A well-connected component and its open nodes.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Component {
    /// Supplies first, then demands, each ascending.
    pub nodes: Vec<Node>,
    pub open: Vec<Node>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum UnoVerdict {
    /// Every component has exactly one open node.
    Holds,
    /// Fully shaded final tree: one component, no open node.
    Terminal,
    /// First offending component.
    Violated(Component),
}

impl UnoVerdict {
    pub fn is_ok(&self) -> bool {
        !matches!(self, UnoVerdict::Violated(_))
    }
}

/// Named checks, used when reporting a failed diagnostic.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Property {
    /// Shaded edges sit in both the current and the final tree.
    Consistency,
    Uno,
    Sin,
    /// No shaded `+` edge at a supply node that still has final-tree edges to shade.
    ShadingOrder,
    /// No demand node touched only by shaded `+` edges.
    NoPlusOnlyDemand,
}

impl fmt::Display for Property {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Property::Consistency => "shaded-subset",
            Property::Uno => "UNO",
            Property::Sin => "SIN",
            Property::ShadingOrder => "shading-order",
            Property::NoPlusOnlyDemand => "no-plus-only-demand",
        })
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Diagnostics {
    pub consistent: bool,
    pub uno: UnoVerdict,
    pub sin: bool,
    pub shading_order: bool,
    pub no_plus_only_demand: bool,
}

impl Diagnostics {
    pub fn first_failure(&self) -> Option<Property> {
        if !self.consistent {
            Some(Property::Consistency)
        } else if !self.uno.is_ok() {
            Some(Property::Uno)
        } else if !self.sin {
            Some(Property::Sin)
        } else if !self.shading_order {
            Some(Property::ShadingOrder)
        } else if !self.no_plus_only_demand {
            Some(Property::NoPlusOnlyDemand)
        } else {
            None
        }
    }

    pub fn passed(&self) -> bool {
        self.first_failure().is_none()
    }
}

/// Runs every check on `state`, with SIN evaluated at `sigma`.
pub fn diagnose(state: &WalkState, sigma: usize) -> Diagnostics {
    Diagnostics {
        consistent: state.is_consistent(),
        uno: check_uno(state),
        sin: check_sin(state, sigma),
        shading_order: check_shading_order(state),
        no_plus_only_demand: check_no_plus_only_demand(state),
    }
}

fn slot(n1: usize, node: Node) -> usize {
    match node {
        Node::Supply(i) => i - 1,
        Node::Demand(j) => n1 + j - 1,
    }
}

fn node_at(n1: usize, slot: usize) -> Node {
    if slot < n1 {
        Node::Supply(slot + 1)
    } else {
        Node::Demand(slot - n1 + 1)
    }
}

/// Components joined by well-connected edges (shaded edges with at least
/// one well-connected end). Nodes touching no such edge are singletons.
pub fn well_connected_components(state: &WalkState) -> Vec<Component> {
    let (n1, n2) = (state.current.supply_count(), state.current.demand_count());
    let nodes: Vec<Node> = (0..n1 + n2).map(|k| node_at(n1, k)).collect();
    let well: Vec<bool> = nodes.iter().map(|&x| state.is_well_connected(x)).collect();

    let mut dsu = Dsu::new(n1 + n2);
    for &e in &state.shaded {
        let (a, b) = (e.s(), n1 + e.d());
        if well[a] || well[b] {
            dsu.union(a, b);
        }
    }
    let mut groups: BTreeMap<usize, Component> = BTreeMap::new();
    let mut order = Vec::new();
    for (k, &x) in nodes.iter().enumerate() {
        let root = dsu.find(k);
        let comp = groups.entry(root).or_insert_with(|| {
            order.push(root);
            Component { nodes: Vec::new(), open: Vec::new() }
        });
        comp.nodes.push(x);
        if !well[k] {
            comp.open.push(x);
        }
    }
    order.into_iter().map(|r| groups.remove(&r).expect("grouped")).collect()
}

pub fn check_uno(state: &WalkState) -> UnoVerdict {
    let components = well_connected_components(state);
    if state.is_fully_shaded()
        && components.len() == 1
        && components[0].open.is_empty()
    {
        return UnoVerdict::Terminal;
    }
    match components.into_iter().find(|c| c.open.len() != 1) {
        Some(c) => UnoVerdict::Violated(c),
        None => UnoVerdict::Holds,
    }
}

/// Every edge at odd distance rank from `sigma` in the current tree (the
/// edges at `sigma` having rank 1) must be unshaded, or a shaded `-` edge
/// whose demand end is well-connected.
pub fn check_sin(state: &WalkState, sigma: usize) -> bool {
    let (n1, n2) = (state.current.supply_count(), state.current.demand_count());
    if !(1..=n1).contains(&sigma) {
        return false;
    }
    let adj = adjacency(n1, n2, state.current.flows().keys());
    let root = slot(n1, Node::Supply(sigma));
    let mut depth = vec![usize::MAX; n1 + n2];
    depth[root] = 0;
    let mut queue = VecDeque::from([root]);
    while let Some(x) = queue.pop_front() {
        for &(w, e) in &adj[x] {
            if depth[w] != usize::MAX {
                continue;
            }
            depth[w] = depth[x] + 1;
            queue.push_back(w);
            if depth[w] % 2 == 1 && state.is_shaded(e) {
                let ok = state.labeling.label(e) == Some(Sign::Minus)
                    && state.is_well_connected(Node::Demand(e.demand));
                if !ok {
                    return false;
                }
            }
        }
    }
    true
}

/// A supply node whose `+` edge is shaded must have every final-tree edge
/// shaded already.
pub fn check_shading_order(state: &WalkState) -> bool {
    (1..=state.current.supply_count()).all(|s| match state.labeling.plus_edge(s) {
        Some(plus) if state.is_shaded(plus) => {
            state.labeling.edges_at_supply(s).all(|(e, _)| state.is_shaded(e))
        }
        _ => true,
    })
}

pub fn check_no_plus_only_demand(state: &WalkState) -> bool {
    (1..=state.current.demand_count()).all(|d| {
        !state
            .current
            .edges()
            .filter(|e| e.demand == d)
            .all(|e| state.is_shaded(e) && state.labeling.label(e) == Some(Sign::Plus))
    })
}
