use std::fmt::Write as _;

use serde_json::{json, Value};

use super::{ComponentFailure, SetFailure, Verdict};
use crate::graph::{EdgeKey, Side, Vertex};
use crate::table::Labels;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CellLevel {
    pub all_protected: bool,
    pub unprotected_cells: Vec<EdgeKey>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LineFailure {
    pub vertex: Vertex,
    pub reason: SetFailure,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LineLevel {
    pub all_protected: bool,
    pub unprotected: Vec<LineFailure>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SetsLevel {
    pub k: usize,
    pub verdict: Verdict,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TableLevel {
    pub verdict: Verdict,
}

/// Result of [`audit`](super::audit).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AuditReport {
    pub level1: CellLevel,
    pub level2: LineLevel,
    pub level3: Vec<SetsLevel>,
    pub level4: TableLevel,
    pub hierarchy_notes: Vec<String>,
}

fn names(labels: &Labels, vs: &[Vertex]) -> Vec<String> {
    vs.iter().map(|&v| labels.vertex(v).to_string()).collect()
}

fn cell(labels: &Labels, k: EdgeKey) -> Value {
    let (r, c) = labels.cell(k);
    json!([r, c])
}

fn side_name(side: Side) -> &'static str {
    match side {
        Side::Row => "rows",
        Side::Col => "cols",
    }
}

fn failure_json(labels: &Labels, f: &ComponentFailure) -> Value {
    match f {
        ComponentFailure::NotStronglyConnected { component } => {
            json!({"kind": "not_strongly_connected", "component": names(labels, component)})
        }
        ComponentFailure::SizeDeficiency { component, side, size, needed } => json!({
            "kind": "size_deficiency",
            "component": names(labels, component),
            "side": side_name(*side),
            "size": size,
            "needed": needed,
        }),
        ComponentFailure::SideCut(w) => json!({
            "kind": "side_cut",
            "side": side_name(w.side),
            "vertices": names(labels, &w.vertices),
            "component": names(labels, &w.component),
            "isolated": names(labels, &w.isolated),
        }),
        ComponentFailure::Incomplete { component, missing } => json!({
            "kind": "incomplete",
            "component": names(labels, component),
            "missing": missing.iter().map(|&k| cell(labels, k)).collect::<Vec<_>>(),
        }),
    }
}

fn set_failure_json(labels: &Labels, f: &SetFailure) -> Value {
    match f {
        SetFailure::EdgeLeavesComponent { vertex, edge } => json!({
            "kind": "edge_leaves_component",
            "vertex": labels.vertex(*vertex),
            "cell": cell(labels, *edge),
        }),
        SetFailure::VertexCut { cut, component } => json!({
            "kind": "vertex_cut",
            "cut": names(labels, cut),
            "component": names(labels, component),
        }),
        SetFailure::SingleEdge { vertex } => json!({"kind": "single_edge", "vertex": labels.vertex(*vertex)}),
    }
}

fn verdict_json(labels: &Labels, v: &Verdict) -> Value {
    json!({
        "holds": v.holds,
        "failures": v.failures.iter().map(|f| failure_json(labels, f)).collect::<Vec<_>>(),
    })
}

fn describe_failure(labels: &Labels, f: &ComponentFailure) -> String {
    let list = |vs: &[Vertex]| names(labels, vs).join(", ");
    match f {
        ComponentFailure::NotStronglyConnected { component } => {
            format!("component {{{}}} is not strongly connected", list(component))
        }
        ComponentFailure::SizeDeficiency { component, side, size, needed } => format!(
            "component {{{}}} has {size} {} but needs {needed}",
            list(component),
            side_name(*side)
        ),
        ComponentFailure::SideCut(w) => format!(
            "{} {{{}}} disconnect {{{}}} from the rest of their component",
            if w.side == Side::Row { "rows" } else { "columns" },
            list(&w.vertices),
            list(&w.isolated)
        ),
        ComponentFailure::Incomplete { missing, .. } => {
            let pairs: Vec<String> = missing
                .iter()
                .map(|&k| {
                    let (r, c) = labels.cell(k);
                    format!("({r},{c})")
                })
                .collect();
            format!("missing pairs {}", pairs.join(", "))
        }
    }
}

fn describe_set_failure(labels: &Labels, f: &SetFailure) -> String {
    match f {
        SetFailure::EdgeLeavesComponent { edge, .. } => {
            let (r, c) = labels.cell(*edge);
            format!("cell ({r},{c}) is outside its strong component")
        }
        SetFailure::VertexCut { cut, .. } => format!("{{{}}} is a vertex cut", names(labels, cut).join(", ")),
        SetFailure::SingleEdge { .. } => "exactly one suppressed cell".to_string(),
    }
}

impl AuditReport {
    pub fn to_json(&self, labels: &Labels) -> Value {
        json!({
            "level1": {
                "all_protected": self.level1.all_protected,
                "unprotected_cells": self.level1.unprotected_cells.iter().map(|&k| cell(labels, k)).collect::<Vec<_>>(),
            },
            "level2": {
                "all_protected": self.level2.all_protected,
                "unprotected": self.level2.unprotected.iter().map(|l| json!({
                    "line": labels.vertex(l.vertex),
                    "side": side_name(l.vertex.side),
                    "reason": set_failure_json(labels, &l.reason),
                })).collect::<Vec<_>>(),
            },
            "level3": self.level3.iter().map(|s| {
                let mut v = verdict_json(labels, &s.verdict);
                v["k"] = json!(s.k);
                v
            }).collect::<Vec<_>>(),
            "level4": verdict_json(labels, &self.level4.verdict),
            "hierarchy_notes": self.hierarchy_notes,
        })
    }

    /// One row per level, then the reasons behind every failure.
    pub fn render_text(&self, labels: &Labels) -> String {
        let mut rows: Vec<(String, String, bool)> = vec![
            ("all cells".into(), "strongly connected, bridge-free".into(), self.level1.all_protected),
            (
                "all rows and columns".into(),
                "strongly connected, bipartite-2-connected".into(),
                self.level2.all_protected,
            ),
        ];
        for s in &self.level3 {
            rows.push((
                format!("all sets of {} rows or {} columns", s.k, s.k),
                format!("strongly connected, bipartite-{}-connected", s.k + 1),
                s.verdict.holds,
            ));
        }
        rows.push((
            "the whole table".into(),
            "strongly connected, bipartite-complete".into(),
            self.level4.verdict.holds,
        ));

        let header = ("Level of data security", "Graph connectivity", "Result");
        let w1 = rows.iter().map(|r| r.0.len()).max().unwrap_or(0).max(header.0.len());
        let w2 = rows.iter().map(|r| r.1.len()).max().unwrap_or(0).max(header.1.len());
        let mut out = String::new();
        let _ = writeln!(out, "{:w1$} | {:w2$} | {}", header.0, header.1, header.2);
        let _ = writeln!(out, "{}-+-{}-+-{}", "-".repeat(w1), "-".repeat(w2), "-".repeat(header.2.len()));
        for (level, conn, ok) in &rows {
            let _ = writeln!(out, "{level:w1$} | {conn:w2$} | {}", if *ok { "protected" } else { "NOT protected" });
        }

        let mut details = Vec::new();
        if !self.level1.unprotected_cells.is_empty() {
            let cells: Vec<String> = self
                .level1
                .unprotected_cells
                .iter()
                .map(|&k| {
                    let (r, c) = labels.cell(k);
                    format!("({r},{c})")
                })
                .collect();
            details.push(format!("unprotected cells: {}", cells.join(", ")));
        }
        for l in &self.level2.unprotected {
            let kind = if l.vertex.side == Side::Row { "row" } else { "column" };
            details.push(format!(
                "unprotected {kind} {}: {}",
                labels.vertex(l.vertex),
                describe_set_failure(labels, &l.reason)
            ));
        }
        for s in &self.level3 {
            for f in &s.verdict.failures {
                details.push(format!("k={}: {}", s.k, describe_failure(labels, f)));
            }
        }
        for f in &self.level4.verdict.failures {
            details.push(format!("table: {}", describe_failure(labels, f)));
        }
        if !details.is_empty() {
            out.push('\n');
            for d in details {
                let _ = writeln!(out, "{d}");
            }
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use crate::graph::fixtures::sample;
    use crate::security::audit;
    use crate::table::Labels;

    fn labels() -> Labels {
        Labels { rows: vec!["1".into(), "2".into(), "3".into()], cols: vec!["a".into(), "b".into(), "c".into()] }
    }

    #[test]
    fn json_names_sample_failures() {
        let report = audit(&sample(), 2).unwrap().to_json(&labels());
        assert_eq!(report["level3"][1]["failures"][0]["vertices"], serde_json::json!(["a", "b"]));
        assert_eq!(report["level3"][1]["failures"][0]["isolated"], serde_json::json!(["1"]));
        assert_eq!(report["level4"]["failures"][0]["missing"], serde_json::json!([["1", "c"], ["3", "a"]]));
    }

    #[test]
    fn text_has_one_row_per_level() {
        let text = audit(&sample(), 2).unwrap().render_text(&labels());
        assert!(text.starts_with("Level of data security"));
        assert!(text.contains("all sets of 2 rows or 2 columns"));
        assert!(text.contains("k=2: columns {a, b} disconnect {1}"));
        assert!(text.contains("table: missing pairs (1,c), (3,a)"));
    }
}
