//! DOT renderings. Plain digraphs print arcs labeled with index and
//! parameter; Hasse diagrams print elements bottom-up.

use std::collections::HashSet;

use dpoly::graph::ArcParamDigraph;
use dpoly::RatVector;

/// Digraph with arc labels `a<index>: <lambda>`; arcs in `bold` render
/// emphasized (used to highlight bicycle supports).
pub fn graph(name: &str, d: &ArcParamDigraph, bold: &HashSet<usize>) -> String {
    let mut s = format!("digraph {name} {{\n  rankdir=LR;\n  node [shape=circle];\n");
    for v in 1..=d.n() {
        s.push_str(&format!("  {v};\n"));
    }
    for (i, a) in d.arcs().iter().enumerate() {
        let style = if bold.contains(&i) { ", style=bold, color=red" } else { "" };
        s.push_str(&format!(
            "  {} -> {} [label=\"a{}: {}\"{}];\n",
            a.tail, a.head, i, a.lambda, style
        ));
    }
    s.push_str("}\n");
    s
}

fn vector_label(v: &RatVector) -> String {
    let entries: Vec<String> = v.iter().map(|x| x.to_string()).collect();
    format!("({})", entries.join(", "))
}

/// Hasse diagram: one box per element, cover edges drawn upward.
pub fn hasse(elements: &[RatVector], covers: &[(usize, usize)]) -> String {
    let mut s = String::from("digraph hasse {\n  rankdir=BT;\n  node [shape=box];\n");
    for (i, e) in elements.iter().enumerate() {
        s.push_str(&format!("  e{} [label=\"{}\"];\n", i, vector_label(e)));
    }
    for &(lo, hi) in covers {
        s.push_str(&format!("  e{lo} -> e{hi};\n"));
    }
    s.push_str("}\n");
    s
}
