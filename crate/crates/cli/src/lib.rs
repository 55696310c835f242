//! Batch commands over suppressed tables: audit, plan, gadget and oracle.
//!
//! Every command produces a [`CommandResult`]; the binary prints either its
//! JSON report or its text rendering and exits with its code.

use std::collections::BTreeSet;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use tablelock::augment::{self, AugmentError, PlanOutcome, SearchLimits, SuppressionPlan, Target};
use tablelock::flow::{self, FlowError};
use tablelock::gadgets::{self, GadgetError, Variant};
use tablelock::graph::{EdgeKey, MixedGraph, Side, Vertex};
use tablelock::oracle::{InvariantClass, Limits, Oracle, OracleError};
use tablelock::rational::format_rational;
use tablelock::security::{self, SecurityError};
use tablelock::table::{build_graphs, parse_table, to_dot, validate, Labels, Table};

pub const EXIT_OK: i32 = 0;
pub const EXIT_NOT_MET: i32 = 1;
pub const EXIT_INPUT: i32 = 2;
pub const EXIT_LIMIT: i32 = 3;

/// Outcome of one command. `exit_code` is 0 exactly when the requested
/// predicate holds or the requested artifact was produced.
#[derive(Clone, Debug, PartialEq)]
pub struct CommandResult {
    pub exit_code: i32,
    pub report: Value,
    pub human_text: String,
}

impl CommandResult {
    fn new(exit_code: i32, report: Value, human_text: String) -> Self {
        CommandResult { exit_code, report, human_text }
    }

    fn error(exit_code: i32, command: &str, message: impl Into<String>) -> Self {
        let message = message.into();
        let kind = if exit_code == EXIT_LIMIT { "limit" } else { "input" };
        CommandResult::new(
            exit_code,
            json!({"command": command, "error": {"kind": kind, "message": message}}),
            format!("error: {message}\n"),
        )
    }
}

#[derive(Parser, Debug)]
#[command(name = "tablelock", version, about = "Audit and plan cell suppression in two-dimensional tables")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    /// Print the JSON report.
    #[arg(long, global = true, conflicts_with = "text")]
    pub json: bool,
    /// Print the text summary (the default).
    #[arg(long, global = true)]
    pub text: bool,
    /// Backtracking nodes the enumeration oracle may visit.
    #[arg(long, global = true, env = "TABLELOCK_ENUM_BUDGET", default_value_t = Limits::default().enum_budget)]
    pub enum_budget: u64,
    /// Most published cells the exact plan search accepts.
    #[arg(long, global = true, env = "TABLELOCK_SEARCH_LIMIT", default_value_t = SearchLimits::default().max_candidates)]
    pub search_limit: usize,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Report all four protection levels of a table.
    Audit(AuditArgs),
    /// Find published cells to suppress so that a protection level holds.
    Plan(PlanArgs),
    /// Build a planning instance from a hitting set instance.
    Gadget(GadgetArgs),
    /// Query the assignment oracle directly.
    Oracle(OracleArgs),
}

#[derive(Args, Debug)]
pub struct AuditArgs {
    pub table: PathBuf,
    /// Check sets of up to this many rows or columns.
    #[arg(long, default_value_t = 2)]
    pub k: usize,
    /// Cross-check every level against the assignment oracle.
    #[arg(long)]
    pub oracle: bool,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum TargetArg {
    Cells,
    Sets,
    Table,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Mode {
    Exact,
    Greedy,
}

#[derive(Args, Debug)]
pub struct PlanArgs {
    pub table: PathBuf,
    #[arg(long, value_enum)]
    pub target: TargetArg,
    /// Set size for `--target sets`.
    #[arg(long, default_value_t = 1)]
    pub k: usize,
    #[arg(long, value_enum, default_value_t = Mode::Exact)]
    pub mode: Mode,
    /// Decide whether at most this many extra cells suffice (always exact).
    #[arg(long)]
    pub budget: Option<usize>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum VariantArg {
    CellOrSets,
    Table,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Emit {
    Graph,
    Table,
}

#[derive(Args, Debug)]
pub struct GadgetArgs {
    pub spec: PathBuf,
    /// Overrides the variant named in the spec; `cell-or-sets` if neither.
    #[arg(long, value_enum)]
    pub variant: Option<VariantArg>,
    #[arg(long, value_enum, default_value_t = Emit::Graph)]
    pub emit: Emit,
    /// Directory for the generated files; without it they go in the report.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct OracleArgs {
    #[command(subcommand)]
    pub query: OracleQuery,
}

#[derive(Subcommand, Debug)]
pub enum OracleQuery {
    /// Exact range of suppressed cells over all real feasible assignments.
    CellRange {
        table: PathBuf,
        /// Row label; give with `--col` to query one cell.
        #[arg(long, requires = "col")]
        row: Option<String>,
        #[arg(long, requires = "row")]
        col: Option<String>,
    },
    /// Basis of every linear invariant, from enumerated integer assignments.
    InvariantSpace { table: PathBuf },
}

pub fn run(cli: &Cli) -> CommandResult {
    let limits = Limits { enum_budget: cli.enum_budget, ..Limits::default() };
    let search = SearchLimits { max_candidates: cli.search_limit, ..SearchLimits::default() };
    match &cli.command {
        Command::Audit(a) => cmd_audit(a, &limits),
        Command::Plan(p) => cmd_plan(p, &search),
        Command::Gadget(g) => cmd_gadget(g),
        Command::Oracle(o) => cmd_oracle(&o.query, &limits),
    }
}

fn load_table(command: &str, path: &Path) -> Result<Table, CommandResult> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CommandResult::error(EXIT_INPUT, command, format!("cannot read {}: {e}", path.display())))?;
    let table = parse_table(&text)
        .map_err(|e| CommandResult::error(EXIT_INPUT, command, format!("{}: {e}", path.display())))?;
    let issues = validate(&table);
    if !issues.is_ok() {
        let mut r = CommandResult::error(
            EXIT_INPUT,
            command,
            format!("{}: {}", path.display(), issues.errors.iter().map(|i| i.message.as_str()).collect::<Vec<_>>().join("; ")),
        );
        r.report["validation"] = serde_json::to_value(&issues).expect("issues serialize");
        return Err(r);
    }
    Ok(table)
}

fn security_error(command: &str, e: SecurityError) -> CommandResult {
    match e {
        SecurityError::SetTooLarge { .. } => CommandResult::error(EXIT_LIMIT, command, e.to_string()),
        _ => CommandResult::error(EXIT_INPUT, command, e.to_string()),
    }
}

fn oracle_error(command: &str, e: OracleError) -> CommandResult {
    match e {
        OracleError::BudgetExceeded(_) | OracleError::LimitExceeded { .. } => {
            CommandResult::error(EXIT_LIMIT, command, e.to_string())
        }
        _ => CommandResult::error(EXIT_INPUT, command, e.to_string()),
    }
}

fn augment_error(command: &str, e: AugmentError) -> CommandResult {
    match e {
        AugmentError::TooManyCandidates { .. } | AugmentError::NodeLimit(_) => {
            CommandResult::error(EXIT_LIMIT, command, e.to_string())
        }
        _ => CommandResult::error(EXIT_INPUT, command, e.to_string()),
    }
}

fn cell_json(labels: &Labels, k: EdgeKey) -> Value {
    let (r, c) = labels.cell(k);
    json!([r, c])
}

fn cell_text(labels: &Labels, k: EdgeKey) -> String {
    let (r, c) = labels.cell(k);
    format!("({r}, {c})")
}

fn all_levels_hold(r: &security::AuditReport) -> bool {
    r.level1.all_protected
        && r.level2.all_protected
        && r.level3.iter().all(|s| s.verdict.holds)
        && r.level4.verdict.holds
}

fn cmd_audit(args: &AuditArgs, limits: &Limits) -> CommandResult {
    let t = match load_table("audit", &args.table) {
        Ok(t) => t,
        Err(r) => return r,
    };
    let (_, h) = build_graphs(&t);
    let report = match security::audit(&h, args.k) {
        Ok(r) => r,
        Err(e) => return security_error("audit", e),
    };
    let labels = t.labels();
    let holds = all_levels_hold(&report);
    let mut json = json!({
        "command": "audit",
        "k": args.k,
        "suppressed": h.edge_count(),
        "protected": holds,
        "levels": report.to_json(labels),
    });
    let mut text = report.render_text(labels);
    if args.oracle {
        let check = match oracle_cross_check(&t, &report, limits) {
            Ok(c) => c,
            Err(e) => return oracle_error("audit", e),
        };
        let mismatches = check["mismatches"].as_array().map_or(0, Vec::len);
        if mismatches > 0 {
            let mut r = CommandResult::error(
                EXIT_INPUT,
                "audit",
                format!("internal inconsistency: {mismatches} oracle mismatches"),
            );
            r.report["oracle"] = check;
            return r;
        }
        let _ = writeln!(
            text,
            "oracle: {} assignments enumerated, all levels agree",
            check["assignments"].as_u64().unwrap_or(0)
        );
        json["oracle"] = check;
    }
    CommandResult::new(if holds { EXIT_OK } else { EXIT_NOT_MET }, json, text)
}

/// Compares each level with its definition, evaluated on enumerated
/// assignments.
fn oracle_cross_check(
    t: &Table,
    report: &security::AuditReport,
    limits: &Limits,
) -> Result<Value, OracleError> {
    let labels = t.labels();
    let oracle = Oracle::new(t, limits)?;
    let mut mismatches = Vec::new();

    let mut invariant = Vec::new();
    for &c in oracle.cells() {
        if oracle.is_invariant_cell(c)? {
            invariant.push(c);
        }
    }
    if invariant != report.level1.unprotected_cells {
        mismatches.push(json!({
            "level": 1,
            "invariant_cells": invariant.iter().map(|&k| cell_json(labels, k)).collect::<Vec<_>>(),
        }));
    }

    for level in &report.level3 {
        let mut all = true;
        for side in [Side::Row, Side::Col] {
            let n = if side == Side::Row { t.rows() } else { t.cols() };
            for set in subsets(n, level.k) {
                let set: Vec<Vertex> = set.into_iter().map(|index| Vertex { side, index }).collect();
                all &= oracle.set_protected(&set, InvariantClass::Linear)?;
            }
        }
        if all != level.verdict.holds {
            mismatches.push(json!({"level": 3, "k": level.k, "oracle": all}));
        }
    }

    let table = oracle.table_protected()?;
    if table != report.level4.verdict.holds {
        mismatches.push(json!({"level": 4, "oracle": table}));
    }
    Ok(json!({
        "assignments": oracle.assignments().len(),
        "invariant_cells": invariant.iter().map(|&k| cell_json(labels, k)).collect::<Vec<_>>(),
        "table_protected": table,
        "mismatches": mismatches,
    }))
}

/// Nonempty subsets of `0..n` with at most `k` members.
fn subsets(n: usize, k: usize) -> Vec<Vec<usize>> {
    let mut out: Vec<Vec<usize>> = vec![vec![]];
    for i in 0..n {
        let grown: Vec<Vec<usize>> = out
            .iter()
            .filter(|s| s.len() < k)
            .map(|s| {
                let mut s = s.clone();
                s.push(i);
                s
            })
            .collect();
        out.extend(grown);
    }
    out.retain(|s| !s.is_empty());
    out
}

fn target_of(args: &PlanArgs) -> Target {
    match args.target {
        TargetArg::Cells => Target::Cells,
        TargetArg::Sets => Target::Sets(args.k),
        TargetArg::Table => Target::Table,
    }
}

fn plan_report(t: &Table, h: &MixedGraph, plan: &SuppressionPlan, audit_k: usize) -> Result<(Value, String), SecurityError> {
    let labels = t.labels();
    let after = plan.apply(h);
    let audit = security::audit(&after, audit_k)?;
    let cells: Vec<String> = plan.cells().iter().map(|&k| cell_text(labels, k)).collect();
    let mut text = format!(
        "target {}: suppress {} more cell{}{}\n",
        plan.target.name(),
        plan.cost(),
        if plan.cost() == 1 { "" } else { "s" },
        if plan.optimal { " (minimum)" } else { "" },
    );
    if !cells.is_empty() {
        let _ = writeln!(text, "cells: {}", cells.join(", "));
    }
    text.push_str("after the plan:\n");
    text.push_str(&audit.render_text(labels));
    let json = json!({
        "plan": plan.to_json(labels),
        "audit_after": audit.to_json(labels),
        "table_after": t.with_suppressed(&plan.cells()).to_json(),
    });
    Ok((json, text))
}

fn cmd_plan(args: &PlanArgs, limits: &SearchLimits) -> CommandResult {
    let t = match load_table("plan", &args.table) {
        Ok(t) => t,
        Err(r) => return r,
    };
    if args.target == TargetArg::Sets && args.k == 0 {
        return CommandResult::error(EXIT_INPUT, "plan", "--k must be at least 1");
    }
    let (total, h) = build_graphs(&t);
    let target = target_of(args);
    let outcome = match args.budget {
        Some(p) => augment::decide(&total, &h, target, p, limits)
            .map(|plan| plan.map_or(PlanOutcome::Infeasible, PlanOutcome::Found)),
        None => match args.mode {
            Mode::Exact => augment::exact_plan(&total, &h, target, limits),
            Mode::Greedy => augment::greedy_plan(&total, &h, target, limits),
        },
    };
    let outcome = match outcome {
        Ok(o) => o,
        Err(e) => return augment_error("plan", e),
    };
    let mut json = json!({
        "command": "plan",
        "target": target.name(),
        "mode": if args.budget.is_some() { "decide" } else if args.mode == Mode::Exact { "exact" } else { "greedy" },
        "budget": args.budget,
    });
    let audit_k = if let Target::Sets(k) = target { k } else { 1 };
    match outcome {
        PlanOutcome::Found(plan) => {
            let (extra, text) = match plan_report(&t, &h, &plan, audit_k) {
                Ok(r) => r,
                Err(e) => return security_error("plan", e),
            };
            json["found"] = json!(true);
            for (k, v) in extra.as_object().expect("object") {
                json[k] = v.clone();
            }
            CommandResult::new(EXIT_OK, json, text)
        }
        PlanOutcome::Infeasible => {
            json["found"] = json!(false);
            let text = match args.budget {
                Some(p) => format!("target {}: no plan with at most {p} more cells\n", target.name()),
                None => format!("target {}: no set of published cells reaches it\n", target.name()),
            };
            CommandResult::new(EXIT_NOT_MET, json, text)
        }
    }
}

fn gadget_error(e: GadgetError) -> CommandResult {
    CommandResult::error(EXIT_INPUT, "gadget", e.to_string())
}

fn cmd_gadget(args: &GadgetArgs) -> CommandResult {
    let text = match std::fs::read_to_string(&args.spec) {
        Ok(s) => s,
        Err(e) => return CommandResult::error(EXIT_INPUT, "gadget", format!("cannot read {}: {e}", args.spec.display())),
    };
    let (hs, named) = match gadgets::parse_gadget_spec(&text) {
        Ok(r) => r,
        Err(e) => return gadget_error(e),
    };
    let variant = match args.variant {
        Some(VariantArg::CellOrSets) => Variant::CellOrSets,
        Some(VariantArg::Table) => Variant::Table,
        None => named.unwrap_or(Variant::CellOrSets),
    };
    let g = gadgets::build_gadget(&hs, variant);

    let mut vertex_map = serde_json::Map::new();
    for (i, s) in hs.universe.iter().enumerate() {
        vertex_map.insert(g.labels.rows[i + 1].clone(), json!(s));
    }
    for (j, set) in hs.family.iter().enumerate() {
        vertex_map.insert(g.labels.cols[j + 1].clone(), json!(hs.names(set)));
    }
    let meta = json!({
        "variant": variant,
        "p": g.p,
        "targets": g.targets().iter().map(Target::name).collect::<Vec<_>>(),
        "vertex_map": vertex_map,
    });

    let mut files: Vec<(String, String)> =
        vec![("gadget.json".into(), serde_json::to_string_pretty(&meta).expect("json") + "\n")];
    match args.emit {
        Emit::Graph => {
            files.push(("total.dot".into(), to_dot(&g.total, &g.labels, "total")));
            files.push(("suppressed.dot".into(), to_dot(&g.suppressed, &g.labels, "suppressed")));
        }
        Emit::Table => match g.to_table() {
            Ok(t) => files.push(("table.json".into(), serde_json::to_string_pretty(&t.to_json()).expect("json") + "\n")),
            Err(e) => return CommandResult::error(EXIT_INPUT, "gadget", e.to_string()),
        },
    }

    let mut report = json!({"command": "gadget", "gadget": meta});
    let mut human = format!(
        "gadget with {} rows and {} columns, {} suppressed cells, budget p = {}\n",
        g.labels.rows.len(),
        g.labels.cols.len(),
        g.suppressed.edge_count(),
        g.p
    );
    match &args.out {
        Some(dir) => {
            if let Err(e) = std::fs::create_dir_all(dir) {
                return CommandResult::error(EXIT_INPUT, "gadget", format!("cannot create {}: {e}", dir.display()));
            }
            let mut written = Vec::new();
            for (name, body) in &files {
                let path = dir.join(name);
                if let Err(e) = std::fs::write(&path, body) {
                    return CommandResult::error(EXIT_INPUT, "gadget", format!("cannot write {}: {e}", path.display()));
                }
                let _ = writeln!(human, "wrote {}", path.display());
                written.push(path.display().to_string());
            }
            report["files"] = json!(written);
        }
        None => {
            let mut artifacts = serde_json::Map::new();
            for (name, body) in &files {
                let _ = write!(human, "--- {name}\n{body}");
                artifacts.insert(name.clone(), json!(body));
            }
            report["artifacts"] = Value::Object(artifacts);
        }
    }
    CommandResult::new(EXIT_OK, report, human)
}

fn flow_error(e: FlowError) -> CommandResult {
    CommandResult::error(EXIT_INPUT, "oracle", e.to_string())
}

fn cmd_oracle(query: &OracleQuery, limits: &Limits) -> CommandResult {
    match query {
        OracleQuery::CellRange { table, row, col } => {
            let t = match load_table("oracle", table) {
                Ok(t) => t,
                Err(r) => return r,
            };
            let labels = t.labels();
            let wanted = match (row, col) {
                (Some(r), Some(c)) => {
                    let (Some(rv), Some(cv)) = (labels.find(r), labels.find(c)) else {
                        return CommandResult::error(EXIT_INPUT, "oracle", format!("no cell ({r}, {c})"));
                    };
                    if rv.side != Side::Row || cv.side != Side::Col {
                        return CommandResult::error(EXIT_INPUT, "oracle", format!("({r}, {c}) is not a row and a column"));
                    }
                    let key = EdgeKey::new(rv.index, cv.index);
                    if let Err(e) = flow::cell_range(&t, key) {
                        return flow_error(e);
                    }
                    Some(key)
                }
                _ => None,
            };
            let ranges = match flow::cell_ranges(&t) {
                Ok(r) => r,
                Err(e) => return flow_error(e),
            };
            let mut rows = Vec::new();
            let mut text = String::new();
            for (k, lo, hi) in ranges.into_iter().filter(|(k, _, _)| wanted.is_none_or(|w| w == *k)) {
                let invariant = lo == hi;
                let _ = writeln!(
                    text,
                    "{}: [{lo}, {hi}]{}",
                    cell_text(labels, k),
                    if invariant { " invariant" } else { "" }
                );
                rows.push(json!({
                    "cell": cell_json(labels, k),
                    "min": lo.to_string(),
                    "max": hi.to_string(),
                    "invariant": invariant,
                }));
            }
            CommandResult::new(EXIT_OK, json!({"command": "oracle", "query": "cell_range", "ranges": rows}), text)
        }
        OracleQuery::InvariantSpace { table } => {
            let t = match load_table("oracle", table) {
                Ok(t) => t,
                Err(r) => return r,
            };
            let space = match Oracle::new(&t, limits).and_then(|o| o.invariant_space().map(|s| (o.assignments().len(), s))) {
                Ok(s) => s,
                Err(e) => return oracle_error("oracle", e),
            };
            let (count, space) = space;
            let labels = t.labels();
            let mut text = format!(
                "{} suppressed cells, {count} integer assignments, {} independent invariants\n",
                space.cells.len(),
                space.dimension()
            );
            let basis: Vec<Value> = space
                .basis
                .iter()
                .map(|v| {
                    let terms: Vec<(EdgeKey, String)> = space
                        .cells
                        .iter()
                        .zip(v)
                        .filter(|(_, q)| **q != tablelock::rational::zero())
                        .map(|(&k, q)| (k, format_rational(q)))
                        .collect();
                    let line: Vec<String> = terms.iter().map(|(k, q)| format!("{q}*{}", cell_text(labels, *k))).collect();
                    let _ = writeln!(text, "  {}", line.join(" + "));
                    Value::Array(terms.iter().map(|(k, q)| json!([cell_json(labels, *k), q])).collect())
                })
                .collect();
            let fixed: BTreeSet<String> = space
                .basis
                .iter()
                .filter(|v| v.iter().filter(|q| **q != tablelock::rational::zero()).count() == 1)
                .filter_map(|v| v.iter().position(|q| *q != tablelock::rational::zero()))
                .map(|i| cell_text(labels, space.cells[i]))
                .collect();
            CommandResult::new(
                EXIT_OK,
                json!({
                    "command": "oracle",
                    "query": "invariant_space",
                    "cells": space.cells.iter().map(|&k| cell_json(labels, k)).collect::<Vec<_>>(),
                    "assignments": count,
                    "dimension": space.dimension(),
                    "basis": basis,
                    "single_cell_invariants": fixed,
                }),
                text,
            )
        }
    }
}
