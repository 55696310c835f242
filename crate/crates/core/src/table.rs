//! Tables with suppressed cells, their file format, and their two graphs.
//!
//! A table publishes every unsuppressed cell value, a lower and upper bound
//! for every cell, and all row and column sums. [`build_graphs`] turns it
//! into the *total graph* (one edge per cell) and the *suppressed graph*
//! (one edge per suppressed cell). Each edge is oriented by where the cell's
//! value sits inside its bounds:
//!
//! | value                 | edge                      |
//! |-----------------------|---------------------------|
//! | strictly inside       | undirected                |
//! | equal to lower bound  | row vertex -> col vertex  |
//! | equal to upper bound  | col vertex -> row vertex  |
//!
//! [`table_from_graphs`] goes the other way.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::graph::{Edge, EdgeKey, MixedGraph, Orientation, Side, Vertex};
use crate::rational::{self, format_rational, is_integer, parse_rational, rational_to_json, Rational};

/// Cell bounds. `None` stands for an infinite bound on that side.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Bounds {
    lower: Option<Rational>,
    upper: Option<Rational>,
}

impl Bounds {
    /// Fails unless `upper > lower`; equal bounds would publish the value.
    pub fn new(lower: Option<Rational>, upper: Option<Rational>) -> Option<Self> {
        if let (Some(l), Some(u)) = (&lower, &upper) {
            if u <= l {
                return None;
            }
        }
        Some(Bounds { lower, upper })
    }

    pub fn finite(lower: Rational, upper: Rational) -> Option<Self> {
        Bounds::new(Some(lower), Some(upper))
    }

    pub fn lower(&self) -> Option<&Rational> {
        self.lower.as_ref()
    }

    pub fn upper(&self) -> Option<&Rational> {
        self.upper.as_ref()
    }

    pub fn is_finite(&self) -> bool {
        self.lower.is_some() && self.upper.is_some()
    }

    pub fn contains(&self, v: &Rational) -> bool {
        self.lower.as_ref().is_none_or(|l| l <= v) && self.upper.as_ref().is_none_or(|u| v <= u)
    }

    /// Edge orientation for a cell holding `value`.
    pub fn orientation_of(&self, value: &Rational) -> Orientation {
        if self.lower.as_ref() == Some(value) {
            Orientation::RowToCol
        } else if self.upper.as_ref() == Some(value) {
            Orientation::ColToRow
        } else {
            Orientation::Undirected
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Cell {
    pub row: usize,
    pub col: usize,
    pub value: Rational,
    pub bounds: Bounds,
    pub suppressed: bool,
}

impl Cell {
    pub fn key(&self) -> EdgeKey {
        EdgeKey::new(self.row, self.col)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Arithmetic {
    Integer,
    Rational,
}

/// Row and column names as they appear in the input file.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Labels {
    pub rows: Vec<String>,
    pub cols: Vec<String>,
}

impl Labels {
    /// `R1..Rn` and `C1..Cm`.
    pub fn numbered(rows: usize, cols: usize) -> Self {
        Labels {
            rows: (1..=rows).map(|i| format!("R{i}")).collect(),
            cols: (1..=cols).map(|j| format!("C{j}")).collect(),
        }
    }

    pub fn vertex(&self, v: Vertex) -> &str {
        match v.side {
            Side::Row => &self.rows[v.index],
            Side::Col => &self.cols[v.index],
        }
    }

    pub fn cell(&self, key: EdgeKey) -> (String, String) {
        (self.rows[key.row].clone(), self.cols[key.col].clone())
    }

    pub fn find(&self, label: &str) -> Option<Vertex> {
        if let Some(i) = self.rows.iter().position(|r| r == label) {
            return Some(Vertex::row(i));
        }
        self.cols.iter().position(|c| c == label).map(Vertex::col)
    }
}

/// A published table: a dense grid of cells plus margins.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Table {
    labels: Labels,
    cells: Vec<Cell>,
    row_sums: Vec<Rational>,
    col_sums: Vec<Rational>,
    arithmetic: Arithmetic,
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum TableError {
    #[error("syntax error at line {line}, column {column}: {message}")]
    Syntax { line: usize, column: usize, message: String },
    #[error("duplicate label {0:?}")]
    DuplicateLabel(String),
    #[error("unknown {side} label {label:?}")]
    UnknownLabel { side: &'static str, label: String },
    #[error("duplicate cell ({row}, {col})")]
    DuplicateCell { row: String, col: String },
    #[error("missing cell ({row}, {col})")]
    MissingCell { row: String, col: String },
    #[error("missing margin: {0}")]
    MissingMargin(String),
    #[error("non-numeric {field} in {location}: {text}")]
    NonNumeric { location: String, field: &'static str, text: String },
    #[error("degenerate bounds at ({row}, {col}): upper bound must exceed lower bound")]
    DegenerateBounds { row: String, col: String },
    #[error("the total graph is not complete bipartite")]
    TotalNotComplete,
    #[error("suppressed edge {0} is missing from the total graph")]
    SuppressedEdgeMissing(EdgeKey),
    #[error("edge {0} is oriented differently in the two graphs")]
    OrientationMismatch(EdgeKey),
    #[error("graphs have different vertex sets")]
    VertexMismatch,
    #[error("label lists do not match the graph size")]
    LabelMismatch,
}

impl Table {
    /// Assembles a table from a row-major cell grid.
    pub fn new(
        labels: Labels,
        cells: Vec<Cell>,
        row_sums: Vec<Rational>,
        col_sums: Vec<Rational>,
        arithmetic: Arithmetic,
    ) -> Result<Self, TableError> {
        let (r, c) = (labels.rows.len(), labels.cols.len());
        if row_sums.len() != r {
            return Err(TableError::MissingMargin(format!("expected {r} row sums, got {}", row_sums.len())));
        }
        if col_sums.len() != c {
            return Err(TableError::MissingMargin(format!("expected {c} column sums, got {}", col_sums.len())));
        }
        let mut grid: Vec<Option<Cell>> = vec![None; r * c];
        for cell in cells {
            if cell.row >= r || cell.col >= c {
                return Err(TableError::LabelMismatch);
            }
            let slot = &mut grid[cell.row * c + cell.col];
            if slot.is_some() {
                let (row, col) = labels.cell(cell.key());
                return Err(TableError::DuplicateCell { row, col });
            }
            *slot = Some(cell);
        }
        let mut dense = Vec::with_capacity(r * c);
        for (i, slot) in grid.into_iter().enumerate() {
            match slot {
                Some(cell) => dense.push(cell),
                None => {
                    let (row, col) = labels.cell(EdgeKey::new(i / c, i % c));
                    return Err(TableError::MissingCell { row, col });
                }
            }
        }
        Ok(Table { labels, cells: dense, row_sums, col_sums, arithmetic })
    }

    /// Like [`Table::new`] but with margins computed from the cell values.
    pub fn with_computed_margins(
        labels: Labels,
        cells: Vec<Cell>,
        arithmetic: Arithmetic,
    ) -> Result<Self, TableError> {
        let (r, c) = (labels.rows.len(), labels.cols.len());
        let mut row_sums = vec![rational::zero(); r];
        let mut col_sums = vec![rational::zero(); c];
        for cell in &cells {
            if cell.row < r && cell.col < c {
                row_sums[cell.row] += &cell.value;
                col_sums[cell.col] += &cell.value;
            }
        }
        Table::new(labels, cells, row_sums, col_sums, arithmetic)
    }

    pub fn rows(&self) -> usize {
        self.labels.rows.len()
    }

    pub fn cols(&self) -> usize {
        self.labels.cols.len()
    }

    pub fn labels(&self) -> &Labels {
        &self.labels
    }

    pub fn arithmetic(&self) -> Arithmetic {
        self.arithmetic
    }

    pub fn cell(&self, key: EdgeKey) -> &Cell {
        &self.cells[key.row * self.cols() + key.col]
    }

    /// Cells in row-major order.
    pub fn cells(&self) -> &[Cell] {
        &self.cells
    }

    pub fn row_sums(&self) -> &[Rational] {
        &self.row_sums
    }

    pub fn col_sums(&self) -> &[Rational] {
        &self.col_sums
    }

    /// Suppressed cells in row-major order.
    pub fn suppressed_cells(&self) -> Vec<EdgeKey> {
        self.cells.iter().filter(|c| c.suppressed).map(Cell::key).collect()
    }

    /// Margin minus the published cells of that row or column: what the
    /// suppressed cells of the line must add up to.
    pub fn residual(&self, v: Vertex) -> Rational {
        let (total, cells): (&Rational, Box<dyn Iterator<Item = &Cell>>) = match v.side {
            Side::Row => (&self.row_sums[v.index], Box::new(self.cells.iter().filter(move |c| c.row == v.index))),
            Side::Col => (&self.col_sums[v.index], Box::new(self.cells.iter().filter(move |c| c.col == v.index))),
        };
        let published: Rational = cells.filter(|c| !c.suppressed).map(|c| c.value.clone()).sum();
        total - published
    }

    /// A copy with the given cells additionally suppressed.
    pub fn with_suppressed(&self, extra: &[EdgeKey]) -> Table {
        let mut t = self.clone();
        let cols = t.cols();
        for k in extra {
            t.cells[k.row * cols + k.col].suppressed = true;
        }
        t
    }

    /// Every finite bound, value and margin is an integer.
    pub fn all_integral(&self) -> bool {
        self.cells.iter().all(|c| {
            is_integer(&c.value)
                && c.bounds.lower().is_none_or(is_integer)
                && c.bounds.upper().is_none_or(is_integer)
        }) && self.row_sums.iter().chain(&self.col_sums).all(is_integer)
    }

    pub fn to_json(&self) -> Value {
        let cells: Vec<Value> = self
            .cells
            .iter()
            .map(|c| {
                json!({
                    "row": self.labels.rows[c.row],
                    "col": self.labels.cols[c.col],
                    "value": rational_to_json(&c.value),
                    "lower": c.bounds.lower().map_or(json!("-inf"), rational_to_json),
                    "upper": c.bounds.upper().map_or(json!("inf"), rational_to_json),
                    "suppressed": c.suppressed,
                })
            })
            .collect();
        json!({
            "rows": self.labels.rows,
            "cols": self.labels.cols,
            "arithmetic": self.arithmetic,
            "cells": cells,
            "row_sums": self.row_sums.iter().map(rational_to_json).collect::<Vec<_>>(),
            "col_sums": self.col_sums.iter().map(rational_to_json).collect::<Vec<_>>(),
        })
    }
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct TableFile {
    rows: Vec<String>,
    cols: Vec<String>,
    cells: Vec<CellFile>,
    #[serde(default)]
    row_sums: Option<Vec<Value>>,
    #[serde(default)]
    col_sums: Option<Vec<Value>>,
    #[serde(default)]
    arithmetic: Option<Arithmetic>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct CellFile {
    row: String,
    col: String,
    value: Value,
    lower: Value,
    upper: Value,
    suppressed: bool,
}

fn number(v: &Value, location: &str, field: &'static str) -> Result<Rational, TableError> {
    let text = match v {
        Value::Number(n) => n.to_string(),
        Value::String(s) => s.clone(),
        other => other.to_string(),
    };
    let bad = || TableError::NonNumeric { location: location.to_string(), field, text: text.clone() };
    match v {
        Value::Number(_) | Value::String(_) => parse_rational(&text).map_err(|_| bad()),
        _ => Err(bad()),
    }
}

fn bound(v: &Value, infinite: &str, location: &str, field: &'static str) -> Result<Option<Rational>, TableError> {
    if v.as_str() == Some(infinite) {
        return Ok(None);
    }
    number(v, location, field).map(Some)
}

fn label_index(labels: &[String]) -> Result<BTreeMap<&str, usize>, TableError> {
    let mut out = BTreeMap::new();
    for (i, l) in labels.iter().enumerate() {
        if out.insert(l.as_str(), i).is_some() {
            return Err(TableError::DuplicateLabel(l.clone()));
        }
    }
    Ok(out)
}

/// Parses a table file (UTF-8 JSON). Values are kept exactly as written.
pub fn parse_table(text: &str) -> Result<Table, TableError> {
    let file: TableFile = serde_json::from_str(text).map_err(|e| TableError::Syntax {
        line: e.line(),
        column: e.column(),
        message: e.to_string(),
    })?;
    let row_ix = label_index(&file.rows)?;
    let col_ix = label_index(&file.cols)?;
    if file.rows.iter().any(|r| col_ix.contains_key(r.as_str())) {
        let shared = file.rows.iter().find(|r| col_ix.contains_key(r.as_str())).unwrap();
        return Err(TableError::DuplicateLabel(shared.clone()));
    }
    let mut cells = Vec::with_capacity(file.cells.len());
    let mut seen = BTreeSet::new();
    for cf in &file.cells {
        let row = *row_ix
            .get(cf.row.as_str())
            .ok_or_else(|| TableError::UnknownLabel { side: "row", label: cf.row.clone() })?;
        let col = *col_ix
            .get(cf.col.as_str())
            .ok_or_else(|| TableError::UnknownLabel { side: "column", label: cf.col.clone() })?;
        if !seen.insert((row, col)) {
            return Err(TableError::DuplicateCell { row: cf.row.clone(), col: cf.col.clone() });
        }
        let loc = format!("cell ({}, {})", cf.row, cf.col);
        let value = number(&cf.value, &loc, "value")?;
        let lower = bound(&cf.lower, "-inf", &loc, "lower")?;
        let upper = bound(&cf.upper, "inf", &loc, "upper")?;
        let bounds = Bounds::new(lower, upper)
            .ok_or_else(|| TableError::DegenerateBounds { row: cf.row.clone(), col: cf.col.clone() })?;
        cells.push(Cell { row, col, value, bounds, suppressed: cf.suppressed });
    }
    let labels = Labels { rows: file.rows.clone(), cols: file.cols.clone() };

    let margins = |given: &Option<Vec<Value>>, what: &'static str, names: &[String]| -> Result<Option<Vec<Rational>>, TableError> {
        let Some(list) = given else { return Ok(None) };
        if list.len() != names.len() {
            return Err(TableError::MissingMargin(format!(
                "{what} lists {} entries for {} labels",
                list.len(),
                names.len()
            )));
        }
        list.iter()
            .zip(names)
            .map(|(v, name)| number(v, &format!("{what} {name}"), "sum"))
            .collect::<Result<Vec<_>, _>>()
            .map(Some)
    };
    let row_sums = margins(&file.row_sums, "row_sums", &file.rows)?;
    let col_sums = margins(&file.col_sums, "col_sums", &file.cols)?;

    let provisional = Table::with_computed_margins(labels, cells, Arithmetic::Rational)?;
    let Table { labels, cells, row_sums: computed_rows, col_sums: computed_cols, .. } = provisional;
    let mut table = Table {
        labels,
        cells,
        row_sums: row_sums.unwrap_or(computed_rows),
        col_sums: col_sums.unwrap_or(computed_cols),
        arithmetic: Arithmetic::Rational,
    };
    table.arithmetic = match file.arithmetic {
        Some(a) => a,
        None if table.all_integral() => Arithmetic::Integer,
        None => Arithmetic::Rational,
    };
    Ok(table)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Issue {
    pub location: String,
    pub code: &'static str,
    pub message: String,
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct ValidationReport {
    pub errors: Vec<Issue>,
    pub warnings: Vec<Issue>,
}

impl ValidationReport {
    pub fn is_ok(&self) -> bool {
        self.errors.is_empty()
    }
}

/// Checks margins, bounds and the arithmetic mode. Never fails; problems are
/// reported as data.
pub fn validate(t: &Table) -> ValidationReport {
    let mut report = ValidationReport::default();
    let labels = &t.labels;
    for c in &t.cells {
        let (row, col) = labels.cell(c.key());
        let location = format!("cell ({row}, {col})");
        if !c.bounds.contains(&c.value) {
            report.errors.push(Issue {
                location: location.clone(),
                code: "value_out_of_bounds",
                message: format!("value out of bounds: {} not in {}", format_rational(&c.value), bounds_text(&c.bounds)),
            });
        }
        if t.arithmetic == Arithmetic::Integer {
            let integral = is_integer(&c.value)
                && c.bounds.lower().is_none_or(is_integer)
                && c.bounds.upper().is_none_or(is_integer);
            if !integral {
                report.errors.push(Issue {
                    location,
                    code: "non_integer",
                    message: "non-integer value or bound in integer mode".to_string(),
                });
            }
        }
    }
    for (side, sums, names) in [(Side::Row, &t.row_sums, &labels.rows), (Side::Col, &t.col_sums, &labels.cols)] {
        let word = if side == Side::Row { "row" } else { "column" };
        for (i, expected) in sums.iter().enumerate() {
            let line: Rational = t
                .cells
                .iter()
                .filter(|c| if side == Side::Row { c.row == i } else { c.col == i })
                .map(|c| c.value.clone())
                .sum();
            if &line != expected {
                report.errors.push(Issue {
                    location: format!("{word} {}", names[i]),
                    code: "margin_mismatch",
                    message: format!(
                        "margin mismatch {word} {}: cells add to {}, sum says {}",
                        names[i],
                        format_rational(&line),
                        format_rational(expected)
                    ),
                });
            }
            if t.arithmetic == Arithmetic::Integer && !is_integer(expected) {
                report.errors.push(Issue {
                    location: format!("{word} {}", names[i]),
                    code: "non_integer",
                    message: "non-integer sum in integer mode".to_string(),
                });
            }
            let suppressed = t
                .cells
                .iter()
                .filter(|c| c.suppressed && if side == Side::Row { c.row == i } else { c.col == i })
                .count();
            if suppressed == 1 {
                report.warnings.push(Issue {
                    location: format!("{word} {}", names[i]),
                    code: "single_suppressed_cell",
                    message: format!("{word} {} has exactly one suppressed cell; its value is implied by the sum", names[i]),
                });
            }
        }
    }
    if t.cells.iter().any(|c| !c.bounds.is_finite()) {
        report.warnings.push(Issue {
            location: "table".to_string(),
            code: "infinite_bounds",
            message: "infinite bounds present; enumeration checks are unavailable".to_string(),
        });
    }
    report
}

fn bounds_text(b: &Bounds) -> String {
    format!(
        "[{}, {}]",
        b.lower().map_or("-inf".to_string(), format_rational),
        b.upper().map_or("inf".to_string(), format_rational)
    )
}

/// The total graph (every cell) and the suppressed graph (suppressed cells).
/// Assumes `validate(t)` reported no errors.
pub fn build_graphs(t: &Table) -> (MixedGraph, MixedGraph) {
    let total = MixedGraph::complete(t.rows(), t.cols(), |r, c| {
        let cell = t.cell(EdgeKey::new(r, c));
        cell.bounds.orientation_of(&cell.value)
    });
    let suppressed = MixedGraph::from_edges(
        t.rows(),
        t.cols(),
        t.cells.iter().filter(|c| c.suppressed).map(|c| Edge::new(c.row, c.col, c.bounds.orientation_of(&c.value))),
    )
    .expect("cells are unique per position");
    (total, suppressed)
}

/// Realizes a table whose total and suppressed graphs are the given ones.
///
/// Every cell gets bounds `[0, 2]` and value 1 (undirected), 0 (row to
/// column) or 2 (column to row); margins are the resulting line sums.
pub fn table_from_graphs(total: &MixedGraph, suppressed: &MixedGraph) -> Result<Table, TableError> {
    table_from_graphs_with_labels(total, suppressed, Labels::numbered(total.rows(), total.cols()))
}

pub fn table_from_graphs_with_labels(
    total: &MixedGraph,
    suppressed: &MixedGraph,
    labels: Labels,
) -> Result<Table, TableError> {
    if suppressed.rows() != total.rows() || suppressed.cols() != total.cols() {
        return Err(TableError::VertexMismatch);
    }
    if labels.rows.len() != total.rows() || labels.cols.len() != total.cols() {
        return Err(TableError::LabelMismatch);
    }
    if !total.is_complete_bipartite() {
        return Err(TableError::TotalNotComplete);
    }
    for e in suppressed.edges() {
        match total.orientation(e.key()) {
            None => return Err(TableError::SuppressedEdgeMissing(e.key())),
            Some(o) if o != e.orientation => return Err(TableError::OrientationMismatch(e.key())),
            Some(_) => {}
        }
    }
    let bounds = Bounds::finite(rational::int(0), rational::int(2)).expect("0 < 2");
    let cells = total
        .edges()
        .map(|e| Cell {
            row: e.row,
            col: e.col,
            value: rational::int(match e.orientation {
                Orientation::Undirected => 1,
                Orientation::RowToCol => 0,
                Orientation::ColToRow => 2,
            }),
            bounds: bounds.clone(),
            suppressed: suppressed.contains(e.key()),
        })
        .collect();
    Table::with_computed_margins(labels, cells, Arithmetic::Integer)
}

/// Graphviz rendering: rows as boxes, columns as ellipses, directed edges as
/// arrows and undirected edges as plain lines.
pub fn to_dot(g: &MixedGraph, labels: &Labels, name: &str) -> String {
    let id = |v: Vertex| match v.side {
        Side::Row => format!("\"r:{}\"", escape(labels.vertex(v))),
        Side::Col => format!("\"c:{}\"", escape(labels.vertex(v))),
    };
    let mut out = String::new();
    let _ = writeln!(out, "digraph \"{}\" {{", escape(name));
    for v in g.vertices() {
        let shape = if v.side == Side::Row { "box" } else { "ellipse" };
        let _ = writeln!(out, "  {} [label=\"{}\", shape={shape}];", id(v), escape(labels.vertex(v)));
    }
    for e in g.edges() {
        let (r, c) = (id(Vertex::row(e.row)), id(Vertex::col(e.col)));
        let _ = match e.orientation {
            Orientation::Undirected => writeln!(out, "  {r} -> {c} [dir=none];"),
            Orientation::RowToCol => writeln!(out, "  {r} -> {c};"),
            Orientation::ColToRow => writeln!(out, "  {c} -> {r};"),
        };
    }
    out.push_str("}\n");
    out
}

fn escape(s: &str) -> String {
    s.replace('\\', "\\\\").replace('"', "\\\"")
}
