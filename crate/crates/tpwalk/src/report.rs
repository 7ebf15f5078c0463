//! Human-readable tables and JSON documents for every command.

use std::fmt::Write as _;

use serde_json::{json, Value};
use tpwalk_core::oracle::InstanceAnalysis;
use tpwalk_core::reduction::ReductionMap;
use tpwalk_core::walk::{Diagnostics, ExhaustiveSummary, TraceVerdict, UnoVerdict, WalkTrace};
use tpwalk_core::{Edge, FlowedTree, TransportationInstance};

use crate::search::SharpSearchResult;

#[derive(Clone, Copy, Debug, PartialEq, Eq, clap::ValueEnum)]
pub enum Format {
    Table,
    Json,
}

#[derive(Clone, Debug)]
pub struct Report {
    pub json: Value,
    pub table: String,
}

impl Report {
    pub fn render(&self, format: Format) -> String {
        match format {
            Format::Table => self.table.clone(),
            Format::Json => {
                let mut s = serde_json::to_string_pretty(&self.json).expect("reports serialize");
                s.push('\n');
                s
            }
        }
    }
}

fn pair(e: Edge) -> Value {
    json!([e.supply, e.demand])
}

fn pairs(edges: impl IntoIterator<Item = Edge>) -> Value {
    Value::Array(edges.into_iter().map(pair).collect())
}

fn tree_json(t: &FlowedTree) -> Value {
    Value::Array(t.flows().iter().map(|(e, f)| json!([e.supply, e.demand, f])).collect())
}

fn edges_text(edges: impl IntoIterator<Item = Edge>) -> String {
    edges.into_iter().map(|e| e.to_string()).collect::<Vec<_>>().join(" ")
}

fn margins_text(xs: &[i64]) -> String {
    xs.iter().map(i64::to_string).collect::<Vec<_>>().join(", ")
}

fn instance_json(inst: &TransportationInstance) -> Value {
    json!({
        "supplies": inst.supplies(),
        "demands": inst.demands(),
        "forbidden_edges": pairs(inst.forbidden().iter().copied()),
    })
}

fn instance_line(inst: &TransportationInstance) -> String {
    let mut s = format!(
        "{}x{} instance, u = ({}), v = ({})",
        inst.supply_count(),
        inst.demand_count(),
        margins_text(inst.supplies()),
        margins_text(inst.demands()),
    );
    if inst.is_face() {
        let _ = write!(s, ", {} forbidden edges", inst.forbidden().len());
    }
    s
}

fn uno_text(v: &UnoVerdict) -> String {
    match v {
        UnoVerdict::Holds => "holds".into(),
        UnoVerdict::Terminal => "terminal".into(),
        UnoVerdict::Violated(c) => format!("violated ({} open)", c.open.len()),
    }
}

fn yes(b: bool) -> &'static str {
    if b {
        "ok"
    } else {
        "FAIL"
    }
}

fn checks_json(d: &Diagnostics) -> Value {
    json!({
        "consistent": d.consistent,
        "uno": uno_text(&d.uno),
        "sin": d.sin,
        "shading_order": d.shading_order,
        "no_plus_only_demand": d.no_plus_only_demand,
    })
}

pub fn walk_report(trace: &WalkTrace, mu: usize) -> Report {
    let inst = &trace.instance;
    let bound = inst.tree_size() - mu;
    let verify = trace.iterations.iter().any(|r| r.diagnostics.is_some());
    let iterations: Vec<Value> = trace
        .iterations
        .iter()
        .map(|r| {
            let mut v = json!({
                "iteration": r.iteration,
                "supply": r.supply,
                "edge": pair(r.edge),
                "sign": r.sign.to_string(),
                "action": r.action.to_string(),
                "leaving": r.leaving.map(pair),
                "delta_prime": r.delta_prime,
                "next_supply": r.next_supply,
                "tree": tree_json(&r.tree),
            });
            if let Some(d) = &r.diagnostics {
                v["checks"] = checks_json(d);
            }
            v
        })
        .collect();
    let json = json!({
        "instance": instance_json(inst),
        "star_demand": trace.labeling.star_demand(),
        "initial_supply": trace.initial_supply,
        "origin": tree_json(&trace.origin),
        "final": tree_json(&trace.final_tree),
        "iterations": iterations,
        "iteration_count": trace.iterations.len(),
        "pivot_count": trace.pivot_count,
        "mu": mu,
        "hirsch_bound": bound,
        "within_bound": trace.pivot_count <= bound,
        "terminal": trace.terminal.as_ref().map(uno_text),
    });

    let mut t = String::new();
    let _ = writeln!(t, "{}", instance_line(inst));
    let _ = writeln!(t, "origin  {}", edges_text(trace.origin.edges()));
    let _ = writeln!(t, "final   {}", edges_text(trace.final_tree.edges()));
    let _ = writeln!(t, "delta*  {}   sigma0 {}", trace.labeling.star_demand(), trace.initial_supply);
    let _ = write!(t, "{:>4}  {:>5}  {:<8} {:>4}  {:<6}  {:<8} {:>6}  {:>4}", "iter", "sigma", "edge", "sign", "action", "leaving", "delta'", "next");
    if verify {
        let _ = write!(t, "  {:<10} {:<4} {:<5}", "uno", "sin", "order");
    }
    t.push('\n');
    for r in &trace.iterations {
        let _ = write!(
            t,
            "{:>4}  {:>5}  {:<8} {:>4}  {:<6}  {:<8} {:>6}  {:>4}",
            r.iteration,
            r.supply,
            r.edge.to_string(),
            r.sign.to_string(),
            r.action.to_string(),
            r.leaving.map_or("-".into(), |e| e.to_string()),
            r.delta_prime,
            r.next_supply.map_or("-".into(), |s| s.to_string()),
        );
        if let Some(d) = &r.diagnostics {
            let order = d.shading_order && d.no_plus_only_demand;
            let _ = write!(t, "  {:<10} {:<4} {:<5}", uno_text(&d.uno), yes(d.sin), yes(order));
        }
        t.push('\n');
    }
    let _ = writeln!(
        t,
        "{} iterations, {} pivots; Hirsch bound {} (mu = {}): {}",
        trace.iterations.len(),
        trace.pivot_count,
        bound,
        mu,
        if trace.pivot_count <= bound { "within bound" } else { "BOUND EXCEEDED" },
    );
    if let Some(v) = &trace.terminal {
        let _ = writeln!(t, "final state: {}", uno_text(v));
    }
    Report { json, table: t }
}

pub fn exhaustive_report(inst: &TransportationInstance, summary: &ExhaustiveSummary, mu: usize) -> Report {
    let bound = inst.tree_size() - mu;
    let (d, s) = summary.best();
    let json = json!({
        "instance": instance_json(inst),
        "runs": summary.runs.iter().map(|&(d, s, p)| json!({"star_demand": d, "initial_supply": s, "pivot_count": p})).collect::<Vec<_>>(),
        "min_pivots": summary.min_pivots,
        "max_pivots": summary.max_pivots,
        "best": {"star_demand": d, "initial_supply": s},
        "mu": mu,
        "hirsch_bound": bound,
    });
    let mut t = String::new();
    let _ = writeln!(t, "{}", instance_line(inst));
    let _ = writeln!(t, "{:>6}  {:>6}  {:>6}", "delta*", "sigma0", "pivots");
    for &(d, s, p) in &summary.runs {
        let _ = writeln!(t, "{d:>6}  {s:>6}  {p:>6}");
    }
    let _ = writeln!(
        t,
        "minimum {} pivots (delta* = {d}, sigma0 = {s}), maximum {}; Hirsch bound {bound}",
        summary.min_pivots, summary.max_pivots
    );
    Report { json, table: t }
}

/// `network_bound` is `m + n - 1` when the instance came from a network.
pub fn analysis_report(inst: &TransportationInstance, a: &InstanceAnalysis, network_bound: Option<usize>, full: bool) -> Report {
    let mut json = json!({
        "instance": instance_json(inst),
        "vertex_count": a.vertex_count,
        "skeleton_edges": a.skeleton_edges,
        "critical_pairs": pairs(a.critical.iter().copied()),
        "mu": a.mu,
        "dimension": a.dimension,
        "facet_count": a.facet_count,
        "hirsch_bound": a.hirsch_bound,
        "diameter": a.diameter,
        "within_bound": a.diameter <= a.hirsch_bound,
    });
    if let Some(b) = network_bound {
        json["network_bound"] = json!(b);
        json["within_network_bound"] = json!(a.diameter <= b);
    }
    let mut t = String::new();
    let _ = writeln!(t, "{}", instance_line(inst));
    if full {
        let _ = writeln!(t, "vertices        {}", a.vertex_count);
        let _ = writeln!(t, "skeleton edges  {}", a.skeleton_edges);
        let _ = writeln!(t, "critical pairs  {} {}", a.mu, edges_text(a.critical.iter().copied()));
        let _ = writeln!(t, "dimension       {}", a.dimension);
        let _ = writeln!(t, "facets          {}", a.facet_count);
    }
    let _ = writeln!(t, "Hirsch bound    {}", a.hirsch_bound);
    let _ = writeln!(t, "diameter        {}", a.diameter);
    if let Some(b) = network_bound {
        let _ = writeln!(t, "m + n - 1       {b}");
    }
    let _ = writeln!(t, "bound check     {}", if a.diameter <= a.hirsch_bound { "ok" } else { "VIOLATED" });
    Report { json, table: t }
}

pub fn reduction_report(r: &ReductionMap) -> Report {
    let inst = r.instance();
    let net = r.network();
    let table_rows: Vec<Value> = r
        .arc_table()
        .map(|(arc, tail, head)| {
            let a = net.arcs()[arc - 1];
            json!({
                "arc": arc,
                "tail": a.tail,
                "head": a.head,
                "capacity": a.capacity.finite(),
                "demand": r.arc_to_demand(arc),
                "tail_edge": pair(tail),
                "head_edge": pair(head),
            })
        })
        .collect();
    let json = json!({
        "nodes": net.node_count(),
        "arcs": net.arc_count(),
        "supplies": inst.supplies(),
        "demands": inst.demands(),
        "allowed_edges": pairs(inst.allowed_edges()),
        "arc_to_demand": table_rows,
        "diameter_bound": net.diameter_bound(),
    });
    let mut t = String::new();
    let _ = writeln!(t, "network: {} nodes, {} arcs", net.node_count(), net.arc_count());
    let _ = writeln!(t, "u = ({})", margins_text(inst.supplies()));
    let _ = writeln!(t, "v = ({})", margins_text(inst.demands()));
    let _ = writeln!(t, "{:>4}  {:>9}  {:>8}  {:>6}  {:<8} {:<8}", "arc", "tail>head", "capacity", "demand", "tail", "head");
    for (arc, tail, head) in r.arc_table() {
        let a = net.arcs()[arc - 1];
        let _ = writeln!(
            t,
            "{:>4}  {:>9}  {:>8}  {:>6}  {:<8} {:<8}",
            arc,
            format!("{}>{}", a.tail, a.head),
            a.capacity.to_string(),
            r.arc_to_demand(arc),
            tail.to_string(),
            head.to_string(),
        );
    }
    let _ = writeln!(t, "{} allowed edges; diameter bound m + n - 1 = {}", inst.allowed_edges().count(), net.diameter_bound());
    Report { json, table: t }
}

pub fn verify_report(verdict: &TraceVerdict) -> Report {
    let json = match verdict {
        TraceVerdict::Pass { pivots, bound } => json!({"verdict": "PASS", "pivots": pivots, "bound": bound}),
        TraceVerdict::Fail(reason) => json!({"verdict": "FAIL", "reason": reason.to_string()}),
    };
    Report { json, table: format!("{verdict}\n") }
}

pub fn search_report(r: &SharpSearchResult) -> Report {
    let best = r.best.as_ref().map(|(inst, a)| {
        json!({
            "instance": instance_json(inst),
            "diameter": a.diameter,
            "mu": a.mu,
            "hirsch_bound": a.hirsch_bound,
            "vertex_count": a.vertex_count,
        })
    });
    let json = json!({
        "tried": r.tried,
        "target": r.target,
        "reached_target": r.reached_target(),
        "elapsed_seconds": r.elapsed.as_secs_f64(),
        "best": best,
    });
    let mut t = String::new();
    let _ = writeln!(t, "tried {} instances in {:.1}s", r.tried, r.elapsed.as_secs_f64());
    match &r.best {
        Some((inst, a)) => {
            let _ = writeln!(t, "best: {}", instance_line(inst));
            let _ = writeln!(
                t,
                "diameter {} (mu = {}, Hirsch bound {}, target N1 + N2 - 1 = {}){}",
                a.diameter,
                a.mu,
                a.hirsch_bound,
                r.target,
                if r.reached_target() { ": target reached" } else { "" },
            );
        }
        None => {
            let _ = writeln!(t, "no instance examined");
        }
    }
    Report { json, table: t }
}
