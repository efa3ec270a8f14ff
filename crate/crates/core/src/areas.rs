//! Physical areas (ranges consumed by grouping functions) and logical areas
//! (cells whose formulas are copies of one another).

use std::collections::{BTreeMap, HashMap};

use serde::Serialize;

use crate::address::{CellAddress, RangeRef, Rect};
use crate::formula::Function;
use crate::normalize::{normalize, skeleton, NormalizedExpr, Skeleton};
use crate::sheet::{CellKind, SpreadsheetProgram};

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct PhysicalArea {
    pub rect: Rect,
    #[serde(skip)]
    pub range: RangeRef,
    pub consumer: CellAddress,
    pub function: Function,
    /// Most frequent kind among covered non-empty cells; `None` when every
    /// covered cell is empty. Ties go to the earlier of constant, input,
    /// formula, label.
    pub majority_type: Option<CellKind>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LogicalArea {
    /// Row-major, at least two.
    pub members: Vec<CellAddress>,
    pub key: NormalizedExpr,
    pub hull: Rect,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StructuralGroup {
    pub members: Vec<CellAddress>,
    pub key: Skeleton,
}

fn majority_type(program: &SpreadsheetProgram, rect: &Rect) -> Option<CellKind> {
    let mut counts: BTreeMap<CellKind, usize> = BTreeMap::new();
    for a in rect.cells() {
        let k = program.kind(a);
        if k != CellKind::Empty {
            *counts.entry(k).or_default() += 1;
        }
    }
    // BTreeMap iterates in tie-break order; keep the first maximum.
    counts
        .into_iter()
        .fold(None, |best: Option<(CellKind, usize)>, (k, n)| match best {
            Some((_, m)) if m >= n => best,
            _ => Some((k, n)),
        })
        .map(|(k, _)| k)
}

/// One area per range argument, ordered by consumer then occurrence.
pub fn infer_physical_areas(program: &SpreadsheetProgram) -> Vec<PhysicalArea> {
    let mut out = Vec::new();
    for (consumer, expr) in program.formulas() {
        for (function, range) in expr.grouping_ranges() {
            let rect = range.rect();
            out.push(PhysicalArea {
                rect,
                range: *range,
                consumer,
                function,
                majority_type: majority_type(program, &rect),
            });
        }
    }
    out
}

fn group_by<K: std::hash::Hash + Eq>(
    program: &SpreadsheetProgram,
    key: impl Fn(CellAddress, &crate::formula::Expr) -> K,
) -> Vec<(K, Vec<CellAddress>)> {
    let mut groups: HashMap<K, Vec<CellAddress>> = HashMap::new();
    for (a, e) in program.formulas() {
        groups.entry(key(a, e)).or_default().push(a);
    }
    let mut out: Vec<_> = groups.into_iter().filter(|(_, m)| m.len() >= 2).collect();
    // members are pushed in row-major order, so the first member orders groups
    out.sort_by_key(|(_, m)| m[0]);
    out
}

/// Groups formula cells by exact normalized-formula equality.
pub fn infer_logical_areas(program: &SpreadsheetProgram) -> Vec<LogicalArea> {
    group_by(program, |a, e| normalize(e, a))
        .into_iter()
        .map(|(key, members)| LogicalArea {
            hull: Rect::hull(members.iter().copied()).expect("non-empty"),
            members,
            key,
        })
        .collect()
}

/// Groups formula cells whose formulas share a skeleton.
pub fn structural_groups(program: &SpreadsheetProgram) -> Vec<StructuralGroup> {
    group_by(program, |a, e| skeleton(&normalize(e, a)))
        .into_iter()
        .map(|(key, members)| StructuralGroup { members, key })
        .collect()
}
