//! DOT rendering of the data-flow graph with areas and findings overlaid.
//!
//! Palette: physical areas are dashed grey clusters, logical areas share one
//! of eight pastel fill colors, and cells with findings get a red outline and
//! their codes in the label.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt::Write as _;

use gridaudit_core::{
    build_graph, CellAddress, CellKind, Diagnostic, LogicalArea, PhysicalArea, SpreadsheetProgram,
};

const PALETTE: [&str; 8] = [
    "#a6cee3", "#b2df8a", "#fdbf6f", "#cab2d6", "#ffff99", "#fb9a99", "#8dd3c7", "#d9d9d9",
];
const FINDING_COLOR: &str = "#d62728";

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Resolution {
    Cell,
    Area,
}

fn escape(s: &str) -> String {
    s.replace('\\', "\\\\").replace('"', "\\\"")
}

fn codes_by_cell(diagnostics: &[Diagnostic]) -> BTreeMap<CellAddress, BTreeSet<String>> {
    let mut out: BTreeMap<CellAddress, BTreeSet<String>> = BTreeMap::new();
    for d in diagnostics {
        out.entry(d.location()).or_default().insert(d.code.to_string());
    }
    out
}

fn header(out: &mut String) {
    out.push_str("digraph sheet {\n");
    out.push_str("  node [shape=box, style=filled, fillcolor=white, fontname=\"Helvetica\"];\n");
}

fn finding_attrs(codes: Option<&BTreeSet<String>>) -> (String, String) {
    match codes {
        Some(c) if !c.is_empty() => (
            format!("\\n{}", c.iter().cloned().collect::<Vec<_>>().join("\\n")),
            format!(", color=\"{FINDING_COLOR}\", penwidth=2"),
        ),
        _ => (String::new(), String::new()),
    }
}

pub fn render(
    program: &SpreadsheetProgram,
    physical: &[PhysicalArea],
    logical: &[LogicalArea],
    diagnostics: &[Diagnostic],
    resolution: Resolution,
) -> String {
    match resolution {
        Resolution::Cell => render_cells(program, physical, logical, diagnostics),
        Resolution::Area => render_areas(program, physical, logical, diagnostics),
    }
}

fn render_cells(
    program: &SpreadsheetProgram,
    physical: &[PhysicalArea],
    logical: &[LogicalArea],
    diagnostics: &[Diagnostic],
) -> String {
    let graph = build_graph(program);
    let codes = codes_by_cell(diagnostics);
    let mut nodes: BTreeSet<CellAddress> = graph.nodes().collect();
    nodes.extend(program.cells().map(|(a, _)| a));
    nodes.extend(codes.keys().copied());

    let fill: BTreeMap<CellAddress, &str> = logical
        .iter()
        .enumerate()
        .flat_map(|(i, l)| l.members.iter().map(move |m| (*m, PALETTE[i % PALETTE.len()])))
        .collect();

    // DOT clusters cannot overlap; a cell goes to the first area covering it.
    let mut cluster_of: BTreeMap<CellAddress, usize> = BTreeMap::new();
    for (i, p) in physical.iter().enumerate() {
        for c in p.rect.cells() {
            if nodes.contains(&c) {
                cluster_of.entry(c).or_insert(i);
            }
        }
    }

    let mut out = String::new();
    header(&mut out);
    for (i, p) in physical.iter().enumerate() {
        let members: Vec<_> = cluster_of.iter().filter(|(_, k)| **k == i).map(|(c, _)| *c).collect();
        if members.is_empty() {
            continue;
        }
        let _ = writeln!(out, "  subgraph cluster_{i} {{");
        let _ = writeln!(
            out,
            "    label=\"{} {} -> {}\"; style=dashed; color=\"#7f7f7f\";",
            p.function, p.rect, p.consumer
        );
        for m in members {
            let _ = writeln!(out, "    \"{m}\";");
        }
        out.push_str("  }\n");
    }
    for n in &nodes {
        let kind = program.kind(*n);
        let detail = match program.get(*n).formula() {
            Some(e) => escape(&format!("={e}")),
            None => kind.to_string(),
        };
        let (extra_label, outline) = finding_attrs(codes.get(n));
        let style = if kind == CellKind::Empty { ", style=\"filled,dashed\"" } else { "" };
        let color = fill.get(n).copied().unwrap_or("white");
        let _ = writeln!(
            out,
            "  \"{n}\" [label=\"{n}\\n{detail}{extra_label}\", fillcolor=\"{color}\"{style}{outline}];"
        );
    }
    for (from, to) in graph.edges() {
        let _ = writeln!(out, "  \"{from}\" -> \"{to}\";");
    }
    out.push_str("}\n");
    out
}

fn render_areas(
    program: &SpreadsheetProgram,
    physical: &[PhysicalArea],
    logical: &[LogicalArea],
    diagnostics: &[Diagnostic],
) -> String {
    let graph = build_graph(program);
    let mut nodes: BTreeSet<CellAddress> = graph.nodes().collect();
    nodes.extend(program.cells().map(|(a, _)| a));
    nodes.extend(diagnostics.iter().map(|d| d.location()));

    // Physical areas take precedence, then logical areas, then the cell.
    let mut group: BTreeMap<CellAddress, String> = BTreeMap::new();
    let mut labels: BTreeMap<String, (String, &str)> = BTreeMap::new();
    for (i, p) in physical.iter().enumerate() {
        let id = format!("P{}", i + 1);
        let mut used = false;
        for c in p.rect.cells() {
            if nodes.contains(&c) && !group.contains_key(&c) {
                group.insert(c, id.clone());
                used = true;
            }
        }
        if used {
            labels.insert(id, (format!("{} {} -> {}", p.function, p.rect, p.consumer), "white"));
        }
    }
    for (i, l) in logical.iter().enumerate() {
        let id = format!("L{}", i + 1);
        let mut used = false;
        for m in &l.members {
            if !group.contains_key(m) {
                group.insert(*m, id.clone());
                used = true;
            }
        }
        if used {
            labels.insert(
                id,
                (format!("copies {} ({})", l.hull, l.members.len()), PALETTE[i % PALETTE.len()]),
            );
        }
    }
    for n in &nodes {
        if !group.contains_key(n) {
            let id = n.to_string();
            group.insert(*n, id.clone());
            labels.insert(id.clone(), (format!("{id}\\n{}", program.kind(*n)), "white"));
        }
    }

    let mut codes: BTreeMap<String, BTreeSet<String>> = BTreeMap::new();
    for d in diagnostics {
        codes.entry(group[&d.location()].clone()).or_default().insert(d.code.to_string());
    }
    let edges: BTreeSet<(&String, &String)> = graph
        .edges()
        .map(|(a, b)| (&group[&a], &group[&b]))
        .filter(|(a, b)| a != b)
        .collect();

    let mut out = String::new();
    header(&mut out);
    for (id, (label, color)) in &labels {
        let (extra_label, outline) = finding_attrs(codes.get(id));
        let _ = writeln!(
            out,
            "  \"{id}\" [label=\"{label}{extra_label}\", fillcolor=\"{color}\"{outline}];"
        );
    }
    for (a, b) in edges {
        let _ = writeln!(out, "  \"{a}\" -> \"{b}\";");
    }
    out.push_str("}\n");
    out
}
