//! Command-line front end. Exit codes: 0 success, 1 domain error or
//! rejected trace, 2 usage error, 3 internal defect (a walk invariant or the
//! diameter bound failed).

use std::fs;
use std::io::{self, Read, Write};
use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Duration;

use clap::{Args, Parser, Subcommand};
use tpwalk_core::oracle::{analyze, OracleError, DEFAULT_BUDGET};
use tpwalk_core::reduction::{check_bounded, finite_capacitate, reduce_to_transportation, ReductionError};
use tpwalk_core::walk::{exhaustive_walks, hirsch_walk, verify_log, TraceVerdict, WalkError, WalkOptions};
use tpwalk_core::{oracle, FlowedTree, TransportationInstance};

use crate::instances::{
    corner_trees, gen_random, gen_random_network, parse_instance, serialize_instance, DocumentBody, InstanceDocument,
};
use crate::report::{self, Format, Report};
use crate::search::{sharp_search, SharpSearchOptions};
use crate::trace::{parse_log, write_log};

#[derive(Debug, Parser)]
#[command(name = "tpwalk", version, about = "Hirsch walks and skeleton diameters of transportation polytopes")]
pub struct Cli {
    /// Report format.
    #[arg(long, global = true, value_enum, default_value_t = Format::Table)]
    pub format: Format,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Walk from one vertex to another, shading edges of the target tree.
    Walk(WalkArgs),
    /// Exact diameter of the polytope and the Hirsch bound.
    Diameter(AnalyzeArgs),
    /// Vertex count, critical pairs, dimension, facets, diameter, bound.
    Analyze(AnalyzeArgs),
    /// Replay a trace file against an instance.
    Verify(VerifyArgs),
    /// Turn a capacitated network into a face of a transportation polytope.
    Reduce(ReduceArgs),
    /// Generate a seeded random instance or network.
    Gen(GenArgs),
    /// Search random instances for diameter N1 + N2 - 1.
    SharpSearch(SearchArgs),
}

#[derive(Debug, Args)]
pub struct WalkArgs {
    /// Instance document (`-` for standard input).
    pub instance: PathBuf,
    /// Name of the starting tree in the document.
    #[arg(long, default_value = "O")]
    pub origin: String,
    /// Name of the target tree in the document.
    #[arg(long = "final", default_value = "F")]
    pub final_tree: String,
    #[arg(long, default_value_t = 1)]
    pub star_demand: usize,
    #[arg(long, default_value_t = 1)]
    pub initial_supply: usize,
    /// Try every (star demand, initial supply) pair and report pivot counts.
    #[arg(long)]
    pub exhaustive: bool,
    /// Check the component properties before every iteration.
    #[arg(long)]
    pub verify: bool,
    /// Write the line-oriented trace here.
    #[arg(long)]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct AnalyzeArgs {
    /// Instance or network document (`-` for standard input).
    pub instance: PathBuf,
    /// Give up after this many spanning trees.
    #[arg(long, default_value_t = DEFAULT_BUDGET)]
    pub budget: usize,
    /// Also write the report here.
    #[arg(long)]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct VerifyArgs {
    /// Trace file (`-` for standard input).
    pub trace: PathBuf,
    /// Instance document.
    pub instance: PathBuf,
    /// Also write the verdict here.
    #[arg(long)]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct ReduceArgs {
    /// Network document (`-` for standard input).
    pub network: PathBuf,
    /// Write the reduced transportation document here.
    #[arg(long)]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct GenArgs {
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// `N1xN2`, or `NODESxARCS` with --network.
    #[arg(long, value_parser = parse_dims)]
    pub dims: (usize, usize),
    /// Upper bound on the margin total (transportation) or on capacities (network).
    #[arg(long, default_value_t = 20)]
    pub margin_bound: i64,
    /// Generate a capacitated network instead.
    #[arg(long)]
    pub network: bool,
    /// Write the document here instead of standard output.
    #[arg(long)]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct SearchArgs {
    /// `N1xN2`.
    #[arg(long, value_parser = parse_dims)]
    pub dims: (usize, usize),
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Seconds to search.
    #[arg(long, default_value_t = 10.0)]
    pub time_budget: f64,
    /// Stop after this many instances.
    #[arg(long)]
    pub max_instances: Option<usize>,
    #[arg(long, default_value_t = 30)]
    pub margin_bound: i64,
    #[arg(long, default_value_t = DEFAULT_BUDGET)]
    pub budget: usize,
    /// Write the best instance document here.
    #[arg(long)]
    pub output: Option<PathBuf>,
}

fn parse_dims(s: &str) -> Result<(usize, usize), String> {
    let (a, b) = s.split_once(['x', 'X']).ok_or_else(|| format!("`{s}` is not of the form AxB"))?;
    let a: usize = a.trim().parse().map_err(|_| format!("bad count `{a}`"))?;
    let b: usize = b.trim().parse().map_err(|_| format!("bad count `{b}`"))?;
    if a == 0 || b == 0 {
        return Err("dimensions must be positive".into());
    }
    Ok((a, b))
}

#[derive(Debug)]
pub enum CliError {
    Domain(String),
    Internal(String),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Domain(_) => 1,
            CliError::Internal(_) => 3,
        }
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Domain(m) => write!(f, "error: {m}"),
            CliError::Internal(m) => write!(f, "internal error: {m}"),
        }
    }
}

fn domain(e: impl std::fmt::Display) -> CliError {
    CliError::Domain(e.to_string())
}

fn walk_error(e: WalkError) -> CliError {
    match e {
        WalkError::ShadedEdgeDeleted { .. }
        | WalkError::InvariantViolated { .. }
        | WalkError::WrongTermination
        | WalkError::NoMinusEdge(_)
        | WalkError::NoEdgeToShade(_) => CliError::Internal(e.to_string()),
        other => domain(other),
    }
}

fn oracle_error(e: OracleError) -> CliError {
    match e {
        OracleError::BoundViolation { .. } | OracleError::DisconnectedSkeleton => CliError::Internal(e.to_string()),
        other => domain(other),
    }
}

fn read_input(path: &PathBuf) -> Result<String, CliError> {
    if path.as_os_str() == "-" {
        let mut s = String::new();
        io::stdin().read_to_string(&mut s).map_err(|e| domain(format!("standard input: {e}")))?;
        Ok(s)
    } else {
        fs::read_to_string(path).map_err(|e| domain(format!("{}: {e}", path.display())))
    }
}

fn write_file(path: &PathBuf, text: &str) -> Result<(), CliError> {
    fs::write(path, text).map_err(|e| domain(format!("{}: {e}", path.display())))
}

fn read_document(path: &PathBuf) -> Result<InstanceDocument, CliError> {
    parse_instance(&read_input(path)?).map_err(|e| domain(format!("{}: {e}", path.display())))
}

fn transportation(doc: &InstanceDocument) -> Result<&TransportationInstance, CliError> {
    doc.as_transportation()
        .ok_or_else(|| domain("expected a transportation document; run `tpwalk reduce` on networks first"))
}

fn named_tree(inst: &TransportationInstance, doc: &InstanceDocument, name: &str) -> Result<FlowedTree, CliError> {
    let edges = doc.trees.get(name).ok_or_else(|| domain(format!("document has no tree named `{name}`")))?;
    let tree = inst.flows_on_tree(edges.iter().copied()).map_err(|e| domain(format!("tree `{name}`: {e}")))?;
    if !tree.is_strictly_positive() {
        return Err(domain(format!("tree `{name}` is not a non-degenerate vertex (some flow is not positive)")));
    }
    Ok(tree)
}

/// Output of a successful command: text for standard output and an exit code.
pub struct Outcome {
    pub stdout: String,
    pub code: u8,
}

fn ok(stdout: String) -> Outcome {
    Outcome { stdout, code: 0 }
}

pub fn execute(cli: &Cli) -> Result<Outcome, CliError> {
    let format = cli.format;
    match &cli.command {
        Command::Walk(args) => cmd_walk(args, format),
        Command::Diameter(args) => cmd_analyze(args, format, false),
        Command::Analyze(args) => cmd_analyze(args, format, true),
        Command::Verify(args) => cmd_verify(args, format),
        Command::Reduce(args) => cmd_reduce(args, format),
        Command::Gen(args) => cmd_gen(args),
        Command::SharpSearch(args) => cmd_sharp_search(args, format),
    }
}

fn cmd_walk(args: &WalkArgs, format: Format) -> Result<Outcome, CliError> {
    let doc = read_document(&args.instance)?;
    let inst = transportation(&doc)?;
    let origin = named_tree(inst, &doc, &args.origin)?;
    let target = named_tree(inst, &doc, &args.final_tree)?;
    let mu = oracle::critical_pairs(inst).len();
    if args.exhaustive {
        let summary = exhaustive_walks(inst, &origin, &target, args.verify).map_err(walk_error)?;
        if summary.max_pivots > inst.tree_size() - mu {
            return Err(CliError::Internal(format!("a walk took {} pivots, above the bound", summary.max_pivots)));
        }
        return Ok(ok(report::exhaustive_report(inst, &summary, mu).render(format)));
    }
    let options = WalkOptions { star_demand: args.star_demand, initial_supply: args.initial_supply, verify: args.verify };
    let trace = hirsch_walk(inst, &origin, &target, &options).map_err(walk_error)?;
    if trace.pivot_count > inst.tree_size() - mu {
        return Err(CliError::Internal(format!("walk took {} pivots, above the bound", trace.pivot_count)));
    }
    if let Some(path) = &args.output {
        write_file(path, &write_log(&trace.log()))?;
    }
    Ok(ok(report::walk_report(&trace, mu).render(format)))
}

fn cmd_analyze(args: &AnalyzeArgs, format: Format, full: bool) -> Result<Outcome, CliError> {
    let doc = read_document(&args.instance)?;
    let (inst, network_bound) = match &doc.body {
        DocumentBody::Transportation(inst) => (inst.clone(), None),
        DocumentBody::Network { network, .. } => {
            let finite = finite_capacitate(network).map_err(domain)?;
            let r = reduce_to_transportation(&finite).map_err(domain)?;
            (r.instance().clone(), Some(network.diameter_bound()))
        }
    };
    let a = analyze(&inst, args.budget).map_err(oracle_error)?;
    if let Some(b) = network_bound {
        if a.diameter > b {
            return Err(CliError::Internal(format!("diameter {} exceeds m + n - 1 = {b}", a.diameter)));
        }
    }
    let text = report::analysis_report(&inst, &a, network_bound, full).render(format);
    if let Some(path) = &args.output {
        write_file(path, &text)?;
    }
    Ok(ok(text))
}

fn cmd_verify(args: &VerifyArgs, format: Format) -> Result<Outcome, CliError> {
    let log = parse_log(&read_input(&args.trace)?).map_err(domain)?;
    let doc = read_document(&args.instance)?;
    let verdict = verify_log(transportation(&doc)?, &log);
    let text = report::verify_report(&verdict).render(format);
    if let Some(path) = &args.output {
        write_file(path, &text)?;
    }
    let code = match verdict {
        TraceVerdict::Pass { .. } => 0,
        TraceVerdict::Fail(_) => 1,
    };
    Ok(Outcome { stdout: text, code })
}

fn cmd_reduce(args: &ReduceArgs, format: Format) -> Result<Outcome, CliError> {
    let doc = read_document(&args.network)?;
    let network = doc
        .as_network()
        .ok_or_else(|| domain("expected a network document"))?;
    if !check_bounded(network) {
        return Err(domain(ReductionError::UnboundedNetwork));
    }
    let finite = finite_capacitate(network).map_err(domain)?;
    let r = reduce_to_transportation(&finite).map_err(domain)?;
    let reduced = serialize_instance(&InstanceDocument::transportation(r.instance().clone()));
    let mut rep: Report = report::reduction_report(&r);
    match &args.output {
        Some(path) => write_file(path, &reduced)?,
        None => {
            rep.json["document"] = serde_json::from_str(&reduced).expect("canonical documents are JSON");
            rep.table.push('\n');
            rep.table.push_str(&reduced);
        }
    }
    Ok(ok(rep.render(format)))
}

fn cmd_gen(args: &GenArgs) -> Result<Outcome, CliError> {
    let (a, b) = args.dims;
    let doc = if args.network {
        InstanceDocument::network(gen_random_network(args.seed, a, b, args.margin_bound).map_err(domain)?)
    } else {
        let inst = gen_random(args.seed, a, b, args.margin_bound).map_err(domain)?;
        let (o, f) = corner_trees(&inst);
        InstanceDocument::transportation(inst).with_tree("O", o).with_tree("F", f)
    };
    let text = serialize_instance(&doc);
    match &args.output {
        Some(path) => {
            write_file(path, &text)?;
            Ok(ok(String::new()))
        }
        None => Ok(ok(text)),
    }
}

fn cmd_sharp_search(args: &SearchArgs, format: Format) -> Result<Outcome, CliError> {
    let opts = SharpSearchOptions {
        supplies: args.dims.0,
        demands: args.dims.1,
        seed: args.seed,
        time_budget: Duration::from_secs_f64(args.time_budget.max(0.0)),
        max_instances: args.max_instances,
        margin_bound: args.margin_bound,
        vertex_budget: args.budget,
    };
    let result = sharp_search(&opts).map_err(|e| match e {
        crate::search::SearchError::Oracle(o) => oracle_error(o),
        other => domain(other),
    })?;
    if let (Some(path), Some((inst, _))) = (&args.output, &result.best) {
        write_file(path, &serialize_instance(&InstanceDocument::transportation(inst.clone())))?;
    }
    Ok(ok(report::search_report(&result).render(format)))
}

/// Parses `std::env::args`, runs the command and maps failures to exit codes.
pub fn main() -> ExitCode {
    let cli = Cli::parse();
    match execute(&cli) {
        Ok(out) => {
            let mut stdout = io::stdout().lock();
            let _ = stdout.write_all(out.stdout.as_bytes());
            let _ = stdout.flush();
            ExitCode::from(out.code)
        }
        Err(e) => {
            eprintln!("{e}");
            ExitCode::from(e.exit_code())
        }
    }
}
