//! Graphviz rendering: one cluster per tree, solid labelled edges for `⇝`,
//! dashed edges for `∼`. A symmetric pair is drawn once without arrowheads.

use std::fmt::Write as _;

use etl_core::{Frame, HistoryId};

fn quote(s: &str) -> String {
    format!("\"{}\"", s.replace('\\', "\\\\").replace('"', "\\\""))
}

fn node(h: HistoryId) -> String {
    format!("h{}", h.index())
}

pub fn render(frame: &Frame) -> String {
    let mut out = String::from("digraph frame {\n  node [shape=circle];\n");
    for t in 0..frame.tree_count() {
        let _ = writeln!(out, "  subgraph cluster_{t} {{");
        let _ = writeln!(out, "    label={};", quote(frame.root_name(t)));
        for h in frame.histories().filter(|&h| frame.tree_of(h) == t) {
            let shape = if frame.is_root(h) { ", shape=doublecircle" } else { "" };
            let _ = writeln!(
                out,
                "    {} [label={}{shape}];",
                node(h),
                quote(&frame.display(h).to_string())
            );
        }
        for h in frame.histories().filter(|&h| frame.tree_of(h) == t) {
            for e in frame.events() {
                if let Some(he) = frame.extend(h, e) {
                    let _ = writeln!(
                        out,
                        "    {} -> {} [label={}];",
                        node(h),
                        node(he),
                        quote(frame.event_name(e))
                    );
                }
            }
        }
        out.push_str("  }\n");
    }
    for (a, b) in frame.access_pairs() {
        let mutual = frame.accessible(b, a);
        if mutual && b < a {
            continue;
        }
        let dir = if mutual { ", dir=none" } else { "" };
        let _ = writeln!(
            out,
            "  {} -> {} [style=dashed, constraint=false{dir}];",
            node(a),
            node(b)
        );
    }
    out.push_str("}\n");
    out
}
