//! Graphviz export.

use std::fmt::Write as _;

use crate::canon::canonicalize;
use crate::graph::{Label, NodeId, TermGraph};
use crate::rewriting::Rule;
use crate::text::rule_order;

fn escape(l: &Label) -> String {
    let mut s = String::new();
    for c in l.to_string().chars() {
        if "|{}<>\"\\ ".contains(c) {
            s.push('\\');
        }
        s.push(c);
    }
    s
}

fn record(g: &TermGraph, n: NodeId, name: &str, extra: &str, indent: &str) -> String {
    let mut label = escape(g.label(n));
    for i in 0..g.succ(n).len() {
        let _ = write!(label, "|<p{i}> {i}");
    }
    format!("{indent}{name} [label=\"{label}\"{extra}];\n")
}

/// One record node per graph node, in canonical order; edges leave from
/// the port of their successor index and carry it as label.
pub fn graph_to_dot(name: &str, g: &TermGraph) -> String {
    let c = canonicalize(g);
    let mut out = format!("digraph \"{name}\" {{\n  node [shape=record];\n");
    for n in c.nodes() {
        let extra = if n == c.root() { ", peripheries=2" } else { "" };
        out.push_str(&record(&c, n, &format!("n{n}"), extra, "  "));
    }
    for n in c.nodes() {
        for (i, &m) in c.succ(n).iter().enumerate() {
            let _ = writeln!(out, "  n{n}:p{i} -> n{m} [label=\"{i}\"];");
        }
    }
    out.push_str("}\n");
    out
}

/// Left-hand side nodes in one cluster, the remaining nodes in another;
/// both roots are drawn with a double border.
pub fn rule_to_dot(r: &Rule) -> String {
    let g = r.graph();
    let order = rule_order(r);
    let mut id = vec![0; g.len()];
    for (k, &n) in order.iter().enumerate() {
        id[n] = k;
    }
    let in_lhs = r.lhs_nodes();
    let mut out = format!("digraph \"{}\" {{\n  node [shape=record];\n", r.name());
    for (side, keep) in [("lhs", true), ("rhs", false)] {
        let _ = writeln!(out, "  subgraph cluster_{side} {{\n    label=\"{side}\";");
        for &n in order.iter().filter(|&&n| in_lhs[n] == keep) {
            let extra = if n == r.lhs() || n == r.rhs() { ", peripheries=2" } else { "" };
            out.push_str(&record(g, n, &format!("n{}", id[n]), extra, "    "));
        }
        out.push_str("  }\n");
    }
    for &n in &order {
        for (i, &m) in g.succ(n).iter().enumerate() {
            let _ = writeln!(out, "  n{}:p{i} -> n{} [label=\"{i}\"];", id[n], id[m]);
        }
    }
    let _ = writeln!(out, "  lhs [shape=plaintext];\n  rhs [shape=plaintext];");
    let _ = writeln!(out, "  lhs -> n{};\n  rhs -> n{};", id[r.lhs()], id[r.rhs()]);
    out.push_str("}\n");
    out
}
