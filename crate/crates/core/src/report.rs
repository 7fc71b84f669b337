//! Rendering of anomaly reports as a text table, JSON, or DOT graphs.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::str::FromStr;

use crate::detect::AnomalyReport;
use crate::graph::Graph;
use crate::matching::{Element, OperationKind};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum OutputFormat {
    Text,
    Json,
    Dot,
}

impl FromStr for OutputFormat {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        match s.to_ascii_lowercase().as_str() {
            "text" => Ok(OutputFormat::Text),
            "json" => Ok(OutputFormat::Json),
            "dot" => Ok(OutputFormat::Dot),
            other => Err(format!("unknown output format {other:?}")),
        }
    }
}

/// Renders `reports` in `format`. DOT output draws `normative` (when given)
/// and one graph per report in pattern coordinates.
pub fn emit_report(reports: &[AnomalyReport], normative: Option<&Graph>, format: OutputFormat) -> String {
    match format {
        OutputFormat::Text => text_table(reports),
        OutputFormat::Json => {
            let mut out = serde_json::to_string_pretty(reports).expect("reports serialize");
            out.push('\n');
            out
        }
        OutputFormat::Dot => dot(reports, normative),
    }
}

pub fn parse_json_reports(text: &str) -> Result<Vec<AnomalyReport>, serde_json::Error> {
    serde_json::from_str(text)
}

fn text_table(reports: &[AnomalyReport]) -> String {
    let mut out = String::new();
    if reports.is_empty() {
        out.push_str("no anomalies reported\n");
        return out;
    }
    let _ = writeln!(
        out,
        "{:>4}  {:<4} {:>8}  {:>10}  {:>4}  {:>4}  deviation",
        "rank", "alg", "example", "score", "cost", "freq"
    );
    for (i, r) in reports.iter().enumerate() {
        let ops: Vec<String> = r.deviation.iter().map(ToString::to_string).collect();
        let mixed = if r.mixed { " (mixed)" } else { "" };
        let _ = writeln!(
            out,
            "{:>4}  {:<4} {:>8}  {:>10.6}  {:>4}  {:>4}  {}{}",
            i + 1,
            r.algorithm.to_string(),
            r.example,
            r.score,
            r.cost,
            r.frequency,
            ops.join("; "),
            mixed
        );
    }
    out
}

fn quote(s: &str) -> String {
    let mut q = String::with_capacity(s.len() + 2);
    q.push('"');
    for c in s.chars() {
        if c == '"' || c == '\\' {
            q.push('\\');
        }
        q.push(c);
    }
    q.push('"');
    q
}

const MARK: &str = "anomaly=true, color=red, penwidth=2";

fn dot(reports: &[AnomalyReport], normative: Option<&Graph>) -> String {
    let mut out = String::new();
    if let Some(p) = normative {
        let _ = writeln!(out, "digraph normative {{");
        for v in &p.vertices {
            let _ = writeln!(out, "  n{} [label={}];", v.id, quote(v.label.as_str()));
        }
        for e in &p.edges {
            let _ = writeln!(out, "  n{} -> n{} [label={}];", e.src, e.dst, quote(e.label.as_str()));
        }
        out.push_str("}\n");
    }
    for (rank, r) in reports.iter().enumerate() {
        anomaly_graph(&mut out, rank + 1, r, normative);
    }
    out
}

/// One report drawn over the normative pattern. Every deviation op marks
/// exactly one node or edge.
fn anomaly_graph(out: &mut String, rank: usize, r: &AnomalyReport, normative: Option<&Graph>) {
    // Node id -> (label, marked); edges as (src, dst, label, marked).
    let mut nodes: BTreeMap<u32, (String, bool)> = BTreeMap::new();
    let mut edges: Vec<(u32, u32, String, bool)> = Vec::new();
    if let Some(p) = normative {
        for v in &p.vertices {
            nodes.insert(v.id, (v.label.to_string(), false));
        }
        for e in &p.edges {
            edges.push((e.src, e.dst, e.label.to_string(), false));
        }
    }
    let label = |l: &Option<crate::graph::Label>| l.as_ref().map(|l| l.to_string()).unwrap_or_default();
    for op in &r.deviation {
        match (&op.element, op.operation) {
            (Element::Vertex { id }, kind) => {
                let shown = match kind {
                    OperationKind::Relabel => format!("{} -> {}", label(&op.old_label), label(&op.new_label)),
                    OperationKind::Missing => format!("missing {}", label(&op.old_label)),
                    OperationKind::Insertion => label(&op.new_label),
                };
                nodes.insert(*id, (shown, true));
            }
            (Element::Edge { src, dst }, OperationKind::Insertion) => {
                for id in [*src, *dst] {
                    nodes
                        .entry(id)
                        .or_insert_with(|| (label(&op.endpoint_label), false));
                }
                edges.push((*src, *dst, format!("+ {}", label(&op.new_label)), true));
            }
            (Element::Edge { src, dst }, kind) => {
                let old = label(&op.old_label);
                let shown = match kind {
                    OperationKind::Relabel => format!("{old} -> {}", label(&op.new_label)),
                    _ => format!("missing {old}"),
                };
                let slot = edges
                    .iter()
                    .position(|(s, d, l, m)| s == src && d == dst && *l == old && !m);
                match slot {
                    Some(i) => edges[i] = (*src, *dst, shown, true),
                    None => edges.push((*src, *dst, shown, true)),
                }
                for id in [*src, *dst] {
                    nodes.entry(id).or_insert_with(|| (String::new(), false));
                }
            }
        }
    }
    let _ = writeln!(out, "digraph anomaly_{rank}_example_{} {{", r.example);
    let _ = writeln!(
        out,
        "  graph [label={}];",
        quote(&format!("{} example {} score {:.6}", r.algorithm, r.example, r.score))
    );
    for (id, (l, marked)) in &nodes {
        if *marked {
            let _ = writeln!(out, "  n{id} [label={}, {MARK}];", quote(l));
        } else {
            let _ = writeln!(out, "  n{id} [label={}];", quote(l));
        }
    }
    for (s, d, l, marked) in &edges {
        if *marked {
            let _ = writeln!(out, "  n{s} -> n{d} [label={}, {MARK}];", quote(l));
        } else {
            let _ = writeln!(out, "  n{s} -> n{d} [label={}];", quote(l));
        }
    }
    out.push_str("}\n");
}
