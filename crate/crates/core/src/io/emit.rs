//! Tree output: JSON (readable back for verification), DOT and indented text.
//!
//! Variable numbers in the readable JSON fields are 1-based, as on the command
//! line. Each node also carries its full chart state under `chart`, `tracked`
//! and `patch`, which is what [`read_tree`] rebuilds the tree from.

use std::fmt::Write as _;
use std::str::FromStr;

use serde_json::{json, Map, Value};

use crate::chart::Chart;
use crate::driver::{Node, NodeKind, PipelineGoal, ResolutionTree, Status};
use crate::error::{Error, Result};
use crate::field::{fmt_q, parse_q};
use crate::invariant::{GammaTriple, InvariantComponent, InvariantValue};
use crate::io::parse::generator_str;
use crate::stratum::Stratum;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Format {
    Json,
    Dot,
    Text,
}

impl FromStr for Format {
    type Err = Error;

    fn from_str(s: &str) -> Result<Format> {
        match s {
            "json" => Ok(Format::Json),
            "dot" => Ok(Format::Dot),
            "text" => Ok(Format::Text),
            _ => Err(Error::Input(format!("unknown format {s:?}; expected json, dot or text"))),
        }
    }
}

fn one_based(s: Stratum) -> Vec<usize> {
    s.iter().map(|i| i + 1).collect()
}

fn enum_name<T: serde::Serialize>(v: &T) -> String {
    match serde_json::to_value(v) {
        Ok(Value::String(s)) => s,
        other => panic!("unit enum expected, got {other:?}"),
    }
}

/// Object keys sorted at every level, whatever map type serde_json was built with.
fn sorted(v: Value) -> Value {
    match v {
        Value::Object(m) => {
            let mut kv: Vec<(String, Value)> = m.into_iter().collect();
            kv.sort_by(|a, b| a.0.cmp(&b.0));
            Value::Object(kv.into_iter().map(|(k, v)| (k, sorted(v))).collect::<Map<_, _>>())
        }
        Value::Array(a) => Value::Array(a.into_iter().map(sorted).collect()),
        other => other,
    }
}

fn to_value<T: serde::Serialize>(v: &T) -> Value {
    serde_json::to_value(v).expect("tree state serializes")
}

/// The readable summary of a chart, shared by emission and cross-checking.
fn summary(ch: &Chart) -> Map<String, Value> {
    let mut m = Map::new();
    m.insert("exceptional_var".into(), json!(ch.lineage.as_ref().map(|l| l.var + 1)));
    m.insert("ideal".into(), json!(ch.ideal.gens.iter().map(|g| generator_str(g, ch)).collect::<Vec<_>>()));
    m.insert("mpart".into(), json!(ch.ideal.mpart.iter().map(fmt_q).collect::<Vec<_>>()));
    m.insert("E".into(), json!(ch.e_x().iter().map(|d| d.label.clone()).collect::<Vec<_>>()));
    m.insert("H".into(), json!(ch.h().iter().map(|d| d.label.clone()).collect::<Vec<_>>()));
    m
}

fn node_json(n: &Node) -> Value {
    let mut m = summary(&n.chart);
    m.insert("id".into(), json!(n.id));
    m.insert("parent".into(), json!(n.parent));
    m.insert("kind".into(), json!(enum_name(&n.kind)));
    m.insert("center".into(), json!(n.center.map(one_based)));
    m.insert("status".into(), json!(enum_name(&n.status)));
    m.insert(
        "max_invariant".into(),
        json!(n.max_invariant.as_ref().map(|v| v.components.iter().map(|c| c.to_string()).collect::<Vec<_>>())),
    );
    m.insert("pass".into(), json!(n.pass));
    m.insert("control".into(), json!(fmt_q(&n.control)));
    m.insert("step".into(), json!(n.step));
    m.insert("children".into(), json!(n.children));
    m.insert("chart".into(), to_value(&n.chart));
    m.insert("tracked".into(), to_value(&n.tracked));
    m.insert("patch".into(), to_value(&n.patch));
    Value::Object(m)
}

/// The JSON document for a tree, before printing.
pub fn tree_json(tree: &ResolutionTree) -> Value {
    sorted(json!({
        "nodes": tree.nodes.iter().map(node_json).collect::<Vec<_>>(),
        "root": 0,
        "meta": {
            "char": tree.characteristic,
            "goal": enum_name(&tree.goal),
            "steps": tree.steps,
            "chart_blowups": tree.chart_blowups,
            "budget": tree.budget,
        },
    }))
}

/// Pretty JSON with sorted keys and a trailing newline.
pub fn json_string(v: &Value) -> String {
    let mut s = serde_json::to_string_pretty(&sorted(v.clone())).expect("json prints");
    s.push('\n');
    s
}

fn dot_escape(s: &str) -> String {
    s.replace('\\', "\\\\").replace('"', "\\\"")
}

fn edge_label(tree: &ResolutionTree, n: &Node) -> String {
    match n.kind {
        NodeKind::Blowup => {
            let p = &tree.nodes[n.parent.expect("blow-up charts have a parent")];
            let var = n.chart.lineage.as_ref().map_or(0, |l| l.var);
            p.chart.vars[var].display_name()
        }
        NodeKind::Restart => "restart".into(),
        NodeKind::Patch => "patch".into(),
        NodeKind::Root => "root".into(),
    }
}

fn dot(tree: &ResolutionTree) -> String {
    let mut s = String::from("digraph resolution {\n  node [shape=box, fontname=\"monospace\"];\n");
    for n in &tree.nodes {
        let mut label = format!("{} {:?}", n.id, n.status);
        if let Some(v) = &n.max_invariant {
            let _ = write!(label, "\\nt = {}", dot_escape(&v.to_string()));
        }
        let _ = writeln!(s, "  n{} [label=\"{label}\"];", n.id);
    }
    for n in &tree.nodes {
        if let Some(p) = n.parent {
            let _ = writeln!(s, "  n{p} -> n{} [label=\"{}\"];", n.id, dot_escape(&edge_label(tree, n)));
        }
    }
    s.push_str("}\n");
    s
}

fn text(tree: &ResolutionTree) -> String {
    let mut s = format!(
        "char {} goal {:?} steps {} chart blow-ups {}\n",
        tree.characteristic, tree.goal, tree.steps, tree.chart_blowups
    );
    let mut stack = vec![(0usize, 0usize)];
    while let Some((k, depth)) = stack.pop() {
        let Some(n) = tree.nodes.get(k) else { continue };
        let ch = &n.chart;
        let gens: Vec<String> = ch.ideal.gens.iter().map(|g| generator_str(g, ch)).collect();
        let mono: Vec<String> = ch
            .ideal
            .mpart
            .iter()
            .enumerate()
            .filter(|(_, e)| **e != num_traits::Zero::zero())
            .map(|(i, e)| format!("{}^{}", ch.vars[i].display_name(), fmt_q(e)))
            .collect();
        let _ = write!(s, "{:indent$}{} {}", "", n.id, edge_label(tree, n), indent = 2 * depth);
        let _ = write!(s, " [{:?}]", n.status);
        if let Some(z) = n.center {
            let _ = write!(s, " center {z}");
        }
        if let Some(v) = &n.max_invariant {
            let _ = write!(s, " t = {v}");
        }
        let m = if mono.is_empty() { String::new() } else { format!("{} * ", mono.join("*")) };
        let _ = writeln!(s, ": {m}<{}>", gens.join(", "));
        stack.extend(n.children.iter().rev().map(|&c| (c, depth + 1)));
    }
    s
}

pub fn emit_tree(tree: &ResolutionTree, format: Format) -> String {
    match format {
        Format::Json => json_string(&tree_json(tree)),
        Format::Dot => dot(tree),
        Format::Text => text(tree),
    }
}

fn bad(msg: impl Into<String>) -> Error {
    Error::Input(format!("tree file: {}", msg.into()))
}

fn parse_component(s: &str) -> Option<InvariantComponent> {
    if s == "inf" {
        return Some(InvariantComponent::Inf);
    }
    if let Some(body) = s.strip_prefix("G(").and_then(|r| r.strip_suffix(')')) {
        let (head, rho) = body.split_once('[')?;
        let rho = rho.strip_suffix(']')?;
        let mut parts = head.split(',').map(str::trim);
        let negp = parts.next()?.parse().ok()?;
        let w = parse_q(parts.next()?)?;
        let rho = if rho.trim().is_empty() {
            Vec::new()
        } else {
            rho.split(',').map(|r| r.trim().parse().ok()).collect::<Option<Vec<u32>>>()?
        };
        return Some(InvariantComponent::gamma(GammaTriple { negp, w, rho }));
    }
    parse_q(s).map(InvariantComponent::fin)
}

fn field<'a>(o: &'a Map<String, Value>, k: &str, id: usize) -> Result<&'a Value> {
    o.get(k).ok_or_else(|| bad(format!("node {id} lacks `{k}`")))
}

fn decode<T: serde::de::DeserializeOwned>(v: &Value, what: &str) -> Result<T> {
    serde_json::from_value(v.clone()).map_err(|e| bad(format!("{what}: {e}")))
}

fn read_node(v: &Value, k: usize) -> Result<Node> {
    let o = v.as_object().ok_or_else(|| bad(format!("node {k} is not an object")))?;
    let id: usize = decode(field(o, "id", k)?, "id")?;
    if id != k {
        return Err(bad(format!("node at position {k} has id {id}")));
    }
    let chart: Chart = decode(field(o, "chart", k)?, "chart")?;
    let center = match decode::<Option<Vec<usize>>>(field(o, "center", k)?, "center")? {
        None => None,
        Some(v) => {
            if v.iter().any(|&i| i == 0 || i > chart.dim()) {
                return Err(bad(format!("node {k}: center {v:?} out of range")));
            }
            Some(Stratum::from_indices(v.iter().map(|i| i - 1)))
        }
    };
    let max_invariant = match decode::<Option<Vec<String>>>(field(o, "max_invariant", k)?, "max_invariant")? {
        None => None,
        Some(cs) => Some(InvariantValue {
            components: cs
                .iter()
                .map(|c| parse_component(c).ok_or_else(|| bad(format!("node {k}: bad invariant component {c:?}"))))
                .collect::<Result<_>>()?,
        }),
    };
    let control: String = decode(field(o, "control", k)?, "control")?;
    Ok(Node {
        id,
        parent: decode(field(o, "parent", k)?, "parent")?,
        kind: decode(field(o, "kind", k)?, "kind")?,
        tracked: decode(field(o, "tracked", k)?, "tracked")?,
        control: parse_q(&control).ok_or_else(|| bad(format!("node {k}: bad control {control:?}")))?,
        pass: decode(field(o, "pass", k)?, "pass")?,
        center,
        max_invariant,
        step: decode(field(o, "step", k)?, "step")?,
        status: decode::<Status>(field(o, "status", k)?, "status")?,
        children: decode(field(o, "children", k)?, "children")?,
        patch: decode(field(o, "patch", k)?, "patch")?,
        chart,
    })
}

/// Rebuilds a tree from its JSON form. Returns the tree and the readable fields
/// that disagree with the chart state they summarize.
pub fn read_tree(text: &str) -> Result<(ResolutionTree, Vec<String>)> {
    let doc: Value = serde_json::from_str(text).map_err(|e| bad(e.to_string()))?;
    let meta = doc.get("meta").ok_or_else(|| bad("missing `meta`"))?;
    let get = |k: &str| meta.get(k).ok_or_else(|| bad(format!("meta lacks `{k}`")));
    let raw = doc.get("nodes").and_then(Value::as_array).ok_or_else(|| bad("missing `nodes`"))?;
    if raw.is_empty() {
        return Err(bad("no nodes"));
    }
    let nodes = raw.iter().enumerate().map(|(k, v)| read_node(v, k)).collect::<Result<Vec<_>>>()?;
    for n in &nodes {
        let in_range = |k: usize| k < nodes.len();
        if n.parent.is_some_and(|p| !in_range(p) || !nodes[p].children.contains(&n.id)) {
            return Err(bad(format!("node {}: parent link is inconsistent", n.id)));
        }
        if n.children.iter().any(|&c| !in_range(c) || nodes[c].parent != Some(n.id)) {
            return Err(bad(format!("node {}: child links are inconsistent", n.id)));
        }
        if (n.id == 0) != n.parent.is_none() {
            return Err(bad("node 0 must be the only root"));
        }
        if n.chart.dim() != n.tracked.dim() || n.chart.ideal.dim() != n.chart.dim() {
            return Err(bad(format!("node {}: dimensions disagree", n.id)));
        }
    }
    let tree = ResolutionTree {
        characteristic: decode(get("char")?, "char")?,
        goal: decode::<PipelineGoal>(get("goal")?, "goal")?,
        budget: decode(get("budget")?, "budget")?,
        steps: decode(get("steps")?, "steps")?,
        chart_blowups: decode(get("chart_blowups")?, "chart_blowups")?,
        nodes,
    };
    let mut problems = Vec::new();
    for (n, v) in tree.nodes.iter().zip(raw) {
        for (k, want) in summary(&n.chart) {
            if v.get(&k) != Some(&want) {
                problems.push(format!("node {}: `{k}` does not match the chart", n.id));
            }
        }
        if n.chart.characteristic != tree.characteristic {
            problems.push(format!("node {}: characteristic differs from the tree", n.id));
        }
    }
    Ok((tree, problems))
}
