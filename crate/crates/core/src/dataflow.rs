//! Cell dependency graph.
//!
//! An edge `u -> v` means formula `v` reads `u`, directly or through a range.
//! Ranges contribute one edge per covered cell, empty cells included.

use std::collections::{BTreeMap, BTreeSet, VecDeque};

use thiserror::Error;

use crate::address::CellAddress;
use crate::sheet::SpreadsheetProgram;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("cyclic dependency: {}", render_cycle(.cycle))]
pub struct CyclicDependency {
    /// One witness cycle; each cell feeds the next, the last feeds the first.
    pub cycle: Vec<CellAddress>,
}

fn render_cycle(cycle: &[CellAddress]) -> String {
    let mut parts: Vec<String> = cycle.iter().map(|a| a.to_string()).collect();
    if let Some(first) = cycle.first() {
        parts.push(first.to_string());
    }
    parts.join(" -> ")
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct DependencyGraph {
    /// referenced cell -> formula cells reading it
    dependents: BTreeMap<CellAddress, BTreeSet<CellAddress>>,
    /// formula cell -> cells it reads
    precedents: BTreeMap<CellAddress, BTreeSet<CellAddress>>,
    nodes: BTreeSet<CellAddress>,
}

pub fn build_graph(program: &SpreadsheetProgram) -> DependencyGraph {
    let mut g = DependencyGraph::default();
    for (addr, _) in program.cells() {
        g.nodes.insert(addr);
    }
    for (v, expr) in program.formulas() {
        for u in expr.referenced_cells() {
            g.nodes.insert(u);
            g.dependents.entry(u).or_default().insert(v);
            g.precedents.entry(v).or_default().insert(u);
        }
    }
    g
}

impl DependencyGraph {
    /// Non-empty cells plus every referenced empty cell, row-major.
    pub fn nodes(&self) -> impl Iterator<Item = CellAddress> + '_ {
        self.nodes.iter().copied()
    }

    pub fn contains(&self, a: CellAddress) -> bool {
        self.nodes.contains(&a)
    }

    /// `(referenced, referencing)` pairs, ordered by the referencing cell.
    pub fn edges(&self) -> impl Iterator<Item = (CellAddress, CellAddress)> + '_ {
        self.precedents
            .iter()
            .flat_map(|(v, us)| us.iter().map(move |u| (*u, *v)))
    }

    pub fn edge_count(&self) -> usize {
        self.precedents.values().map(BTreeSet::len).sum()
    }

    pub fn direct_precedents(&self, a: CellAddress) -> impl Iterator<Item = CellAddress> + '_ {
        self.precedents.get(&a).into_iter().flatten().copied()
    }

    pub fn direct_dependents(&self, a: CellAddress) -> impl Iterator<Item = CellAddress> + '_ {
        self.dependents.get(&a).into_iter().flatten().copied()
    }

    pub fn precedents(&self, a: CellAddress, transitive: bool) -> BTreeSet<CellAddress> {
        if transitive {
            self.closure(a, |x| self.direct_precedents(x).collect())
        } else {
            self.direct_precedents(a).collect()
        }
    }

    pub fn dependents(&self, a: CellAddress, transitive: bool) -> BTreeSet<CellAddress> {
        if transitive {
            self.closure(a, |x| self.direct_dependents(x).collect())
        } else {
            self.direct_dependents(a).collect()
        }
    }

    fn closure(
        &self,
        start: CellAddress,
        step: impl Fn(CellAddress) -> Vec<CellAddress>,
    ) -> BTreeSet<CellAddress> {
        let mut seen = BTreeSet::new();
        let mut stack = step(start);
        while let Some(x) = stack.pop() {
            if seen.insert(x) {
                stack.extend(step(x));
            }
        }
        seen
    }

    /// Breadth-first distance of every transitive precedent of `a`.
    pub fn precedent_distances(&self, a: CellAddress) -> BTreeMap<CellAddress, usize> {
        let mut dist = BTreeMap::new();
        let mut queue = VecDeque::from([(a, 0usize)]);
        while let Some((x, d)) = queue.pop_front() {
            for p in self.direct_precedents(x) {
                if p != a && !dist.contains_key(&p) {
                    dist.insert(p, d + 1);
                    queue.push_back((p, d + 1));
                }
            }
        }
        dist
    }

    /// Kahn's algorithm with a row-major ready set, so the order is fully
    /// determined by the graph.
    pub fn topo_order(&self) -> Result<Vec<CellAddress>, CyclicDependency> {
        let (order, rest) = self.partial_order();
        if rest.is_empty() {
            Ok(order)
        } else {
            Err(CyclicDependency {
                cycle: self.find_cycle(&rest),
            })
        }
    }

    /// Topological order of every cell not on or downstream of a cycle,
    /// plus the remaining cells.
    pub fn partial_order(&self) -> (Vec<CellAddress>, BTreeSet<CellAddress>) {
        let mut indegree: BTreeMap<CellAddress, usize> =
            self.nodes.iter().map(|n| (*n, 0)).collect();
        for (v, us) in &self.precedents {
            *indegree.get_mut(v).expect("node") = us.len();
        }
        let mut ready: BTreeSet<CellAddress> = indegree
            .iter()
            .filter(|(_, d)| **d == 0)
            .map(|(n, _)| *n)
            .collect();
        let mut order = Vec::with_capacity(self.nodes.len());
        while let Some(n) = ready.pop_first() {
            order.push(n);
            for v in self.direct_dependents(n) {
                let d = indegree.get_mut(&v).expect("node");
                *d -= 1;
                if *d == 0 {
                    ready.insert(v);
                }
            }
        }
        let placed: BTreeSet<_> = order.iter().copied().collect();
        let rest = self.nodes.difference(&placed).copied().collect();
        (order, rest)
    }

    /// Some cycle inside `rest`, the set of cells Kahn's algorithm could not
    /// place, rotated to begin at its smallest cell.
    pub fn find_cycle(&self, rest: &BTreeSet<CellAddress>) -> Vec<CellAddress> {
        // Every node in `rest` has a precedent in `rest`, so walking
        // backwards must revisit a node.
        let start = *rest.first().expect("non-empty");
        let mut path = vec![start];
        let mut pos = BTreeMap::from([(start, 0usize)]);
        let mut x = start;
        loop {
            let p = self
                .direct_precedents(x)
                .find(|p| rest.contains(p))
                .expect("unplaced node has an unplaced precedent");
            if let Some(&i) = pos.get(&p) {
                let mut cycle: Vec<_> = path[i..].to_vec();
                // path runs against the edges; flip it and rotate to the minimum.
                cycle.reverse();
                let m = cycle
                    .iter()
                    .enumerate()
                    .min_by_key(|(_, a)| **a)
                    .map(|(i, _)| i)
                    .unwrap_or(0);
                cycle.rotate_left(m);
                return cycle;
            }
            pos.insert(p, path.len());
            path.push(p);
            x = p;
        }
    }

    /// Every cell that sits on some cycle (strongly connected with itself).
    pub fn cyclic_cells(&self) -> BTreeSet<CellAddress> {
        let (_, rest) = self.partial_order();
        rest.iter()
            .copied()
            .filter(|a| self.precedents(*a, true).contains(a))
            .collect()
    }
}

pub fn topo_order(g: &DependencyGraph) -> Result<Vec<CellAddress>, CyclicDependency> {
    g.topo_order()
}

pub fn precedents(g: &DependencyGraph, a: CellAddress, transitive: bool) -> BTreeSet<CellAddress> {
    g.precedents(a, transitive)
}

pub fn dependents(g: &DependencyGraph, a: CellAddress, transitive: bool) -> BTreeSet<CellAddress> {
    g.dependents(a, transitive)
}
