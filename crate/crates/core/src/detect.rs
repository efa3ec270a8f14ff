//! Static fault detectors.
//!
//! | code | finding |
//! |------|---------|
//! | `D1_BLANK_REF` | a formula reads an empty cell, directly or through a range |
//! | `D2_WRONG_TYPE_IN_RANGE` | a label sits inside a grouping range |
//! | `D3_INCORRECT_RANGE` | a same-typed cell sits just past the end of a range |
//! | `D4_AREA_MIXUP` | two ranges overlap, or a long `+` chain replaces a grouping function |
//! | `D5_CONSTANT_OVERWRITE` | a value interrupts a run of copied formulas |
//! | `D6_COPY_MISREFERENCE` | one copy differs from its siblings only in `$` markers or literals |
//! | `G_CYCLE` | cells on a dependency cycle (needs an evaluation result) |
//! | `G_DIV_ZERO` | division by zero at run time (needs an evaluation result) |
//!
//! Everything is a warning except `G_CYCLE`.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt;

use serde::{Serialize, Serializer};

use crate::address::{column_name, CellAddress, Rect};
use crate::areas::{infer_logical_areas, infer_physical_areas, structural_groups, PhysicalArea};
use crate::eval::{EvalResult, RuntimeDiagnosticKind};
use crate::formula::{BinaryOp, Expr, Function, RefUse};
use crate::normalize::{differs_only_in_modes_or_literals, normalize, NormalizedExpr};
use crate::sheet::{CellContent, CellKind, SpreadsheetProgram};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Code {
    BlankRef,
    WrongTypeInRange,
    IncorrectRange,
    AreaMixup,
    ConstantOverwrite,
    CopyMisreference,
    Cycle,
    DivZero,
}

impl Code {
    pub const ALL: [Code; 8] = [
        Code::BlankRef,
        Code::WrongTypeInRange,
        Code::IncorrectRange,
        Code::AreaMixup,
        Code::ConstantOverwrite,
        Code::CopyMisreference,
        Code::Cycle,
        Code::DivZero,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            Code::BlankRef => "D1_BLANK_REF",
            Code::WrongTypeInRange => "D2_WRONG_TYPE_IN_RANGE",
            Code::IncorrectRange => "D3_INCORRECT_RANGE",
            Code::AreaMixup => "D4_AREA_MIXUP",
            Code::ConstantOverwrite => "D5_CONSTANT_OVERWRITE",
            Code::CopyMisreference => "D6_COPY_MISREFERENCE",
            Code::Cycle => "G_CYCLE",
            Code::DivZero => "G_DIV_ZERO",
        }
    }

    pub fn severity(self) -> Severity {
        match self {
            Code::Cycle => Severity::Error,
            _ => Severity::Warning,
        }
    }
}

impl fmt::Display for Code {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl Serialize for Code {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.serialize_str(self.as_str())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Severity {
    Warning,
    Error,
}

impl fmt::Display for Severity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Severity::Warning => "warning",
            Severity::Error => "error",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Serialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum RelatedArea {
    Physical {
        rect: Rect,
        consumer: CellAddress,
        function: Function,
    },
    Logical {
        hull: Rect,
        members: Vec<CellAddress>,
    },
}

impl RelatedArea {
    fn physical(a: &PhysicalArea) -> Self {
        RelatedArea::Physical {
            rect: a.rect,
            consumer: a.consumer,
            function: a.function,
        }
    }

    fn logical(hull: Rect, members: &[CellAddress]) -> Self {
        RelatedArea::Logical {
            hull,
            members: members.to_vec(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Serialize)]
pub struct Diagnostic {
    pub code: Code,
    pub severity: Severity,
    /// The flagged location first, then related cells.
    pub subjects: Vec<CellAddress>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub area: Option<RelatedArea>,
    pub message: String,
}

impl Diagnostic {
    fn new(code: Code, subjects: Vec<CellAddress>, area: Option<RelatedArea>, message: String) -> Self {
        debug_assert!(!subjects.is_empty());
        Diagnostic {
            code,
            severity: code.severity(),
            subjects,
            area,
            message,
        }
    }

    /// The flagged cell.
    pub fn location(&self) -> CellAddress {
        self.subjects[0]
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DetectorConfig {
    /// Minimum number of terms for the `+` chain trigger of `D4_AREA_MIXUP`.
    pub chain_min_terms: usize,
}

impl Default for DetectorConfig {
    fn default() -> Self {
        DetectorConfig { chain_min_terms: 3 }
    }
}

fn formula_text(program: &SpreadsheetProgram, a: CellAddress) -> String {
    match program.get(a) {
        CellContent::Formula(e) => format!("={e}"),
        other => other.to_string(),
    }
}

fn join(cells: &[CellAddress]) -> String {
    cells.iter().map(|c| c.to_string()).collect::<Vec<_>>().join(", ")
}

/// D1: one warning per (formula, empty cell) pair.
pub fn detect_blank_ref(program: &SpreadsheetProgram) -> Vec<Diagnostic> {
    let areas = infer_physical_areas(program);
    let mut out = Vec::new();
    for (host, expr) in program.formulas() {
        let mut seen = BTreeSet::new();
        for r in expr.references() {
            match r {
                RefUse::Cell(c) => {
                    let u = c.address();
                    if program.kind(u) == CellKind::Empty && seen.insert(u) {
                        out.push(Diagnostic::new(
                            Code::BlankRef,
                            vec![u, host],
                            None,
                            format!("{host} reads empty cell {u}; arithmetic treats it as 0"),
                        ));
                    }
                }
                RefUse::Range(range) => {
                    let rect = range.rect();
                    let area = areas
                        .iter()
                        .find(|a| a.consumer == host && a.range == *range)
                        .map(RelatedArea::physical);
                    for u in rect.cells() {
                        if program.kind(u) == CellKind::Empty && seen.insert(u) {
                            out.push(Diagnostic::new(
                                Code::BlankRef,
                                vec![u, host],
                                area.clone(),
                                format!("range {rect} read by {host} includes empty cell {u}"),
                            ));
                        }
                    }
                }
            }
        }
    }
    out
}

/// D2: one warning per label covered by at least one grouping range.
pub fn detect_wrong_type_in_range(program: &SpreadsheetProgram) -> Vec<Diagnostic> {
    let areas = infer_physical_areas(program);
    let mut hits: BTreeMap<CellAddress, Vec<&PhysicalArea>> = BTreeMap::new();
    for area in &areas {
        for u in area.rect.cells() {
            if program.kind(u) == CellKind::Label {
                hits.entry(u).or_default().push(area);
            }
        }
    }
    hits.into_iter()
        .map(|(label, covering)| {
            let text = match program.get(label) {
                CellContent::Label(t) => t.clone(),
                _ => unreachable!(),
            };
            let first = covering[0];
            let mut subjects = vec![label];
            for a in &covering {
                if !subjects.contains(&a.consumer) {
                    subjects.push(a.consumer);
                }
            }
            Diagnostic::new(
                Code::WrongTypeInRange,
                subjects,
                Some(RelatedArea::physical(first)),
                format!(
                    "label {text:?} at {label} lies inside {} range {} of {}; it is skipped now, \
                     but editing it to a number (e.g. 1 instead of {text:?}) would silently join the aggregate",
                    first.function, first.rect, first.consumer
                ),
            )
        })
        .collect()
}

/// Cells just past each end of the range along its long axis. Ranges at
/// least as tall as they are wide count as column ranges.
fn extension_cells(rect: &Rect) -> Vec<CellAddress> {
    let (tl, br) = (rect.top_left, rect.bottom_right);
    let mut out = Vec::new();
    if rect.height() >= rect.width() {
        for col in tl.col..=br.col {
            if tl.row > 1 {
                out.push(CellAddress::new(col, tl.row - 1));
            }
            out.extend(CellAddress::checked(col as i64, br.row as i64 + 1));
        }
    } else {
        for row in tl.row..=br.row {
            if tl.col > 1 {
                out.push(CellAddress::new(tl.col - 1, row));
            }
            out.extend(CellAddress::checked(br.col as i64 + 1, row as i64));
        }
    }
    out
}

/// D3: a non-empty cell adjoining the end of a range with the range's
/// majority type, which the consumer does not read anyway.
pub fn detect_incorrect_range(program: &SpreadsheetProgram) -> Vec<Diagnostic> {
    let mut out = Vec::new();
    for area in infer_physical_areas(program) {
        let Some(majority) = area.majority_type else {
            continue;
        };
        let read: BTreeSet<CellAddress> = program
            .get(area.consumer)
            .formula()
            .map(|e| e.referenced_cells().into_iter().collect())
            .unwrap_or_default();
        for cell in extension_cells(&area.rect) {
            if cell == area.consumer || read.contains(&cell) {
                continue;
            }
            if program.kind(cell) == majority {
                out.push(Diagnostic::new(
                    Code::IncorrectRange,
                    vec![cell, area.consumer],
                    Some(RelatedArea::physical(&area)),
                    format!(
                        "{majority} cell {cell} adjoins {} range {} of {} but is not part of it",
                        area.function, area.rect, area.consumer
                    ),
                ));
            }
        }
    }
    out
}

/// Leaves of a formula made only of `+` over plain references.
fn plus_chain(expr: &Expr) -> Option<Vec<CellAddress>> {
    match expr {
        Expr::Reference(r) => Some(vec![r.address()]),
        Expr::Binary {
            op: BinaryOp::Add,
            left,
            right,
        } => {
            let mut l = plus_chain(left)?;
            l.extend(plus_chain(right)?);
            Some(l)
        }
        _ => None,
    }
}

/// D4: overlapping ranges, and long `+` chains along one row or column.
pub fn detect_area_mixup(program: &SpreadsheetProgram, config: &DetectorConfig) -> Vec<Diagnostic> {
    let mut out = Vec::new();
    let areas = infer_physical_areas(program);
    for (i, x) in areas.iter().enumerate() {
        for y in &areas[i + 1..] {
            if x.rect == y.rect {
                continue;
            }
            if let Some(overlap) = x.rect.intersection(&y.rect) {
                let mut subjects = vec![x.consumer];
                if y.consumer != x.consumer {
                    subjects.push(y.consumer);
                }
                out.push(Diagnostic::new(
                    Code::AreaMixup,
                    subjects,
                    Some(RelatedArea::physical(x)),
                    format!(
                        "{} range {} of {} and {} range {} of {} overlap in {overlap}",
                        x.function, x.rect, x.consumer, y.function, y.rect, y.consumer
                    ),
                ));
            }
        }
    }
    for (host, expr) in program.formulas() {
        let Some(terms) = plus_chain(expr) else {
            continue;
        };
        if terms.len() < config.chain_min_terms {
            continue;
        }
        let line = if terms.iter().all(|t| t.col == terms[0].col) {
            format!("column {}", column_name(terms[0].col))
        } else if terms.iter().all(|t| t.row == terms[0].row) {
            format!("row {}", terms[0].row)
        } else {
            continue;
        };
        let mut subjects = vec![host];
        subjects.extend(terms.iter().copied().filter(|t| *t != host));
        out.push(Diagnostic::new(
            Code::AreaMixup,
            subjects,
            None,
            format!(
                "{host} adds {} cells of {line} one by one ({}); \
                 a grouping function over a range keeps the total in step when cells move or are added",
                terms.len(),
                join(&terms)
            ),
        ));
    }
    out
}

/// D5: constants or inputs strictly inside the straight-line hull of a
/// logical area with three or more members, as long as they are fewer than
/// the members themselves (a sporadic interruption, not an interleaved
/// layout).
pub fn detect_constant_overwrite(program: &SpreadsheetProgram) -> Vec<Diagnostic> {
    let mut out = Vec::new();
    for area in infer_logical_areas(program) {
        if area.members.len() < 3 || (area.hull.width() > 1 && area.hull.height() > 1) {
            continue;
        }
        let strangers: Vec<CellAddress> = area
            .hull
            .cells()
            .filter(|c| !area.members.contains(c))
            .filter(|c| matches!(program.kind(*c), CellKind::Constant | CellKind::Input))
            .collect();
        if strangers.len() >= area.members.len() {
            continue;
        }
        let sample = formula_text(program, area.members[0]);
        for s in strangers {
            out.push(Diagnostic::new(
                Code::ConstantOverwrite,
                vec![s],
                Some(RelatedArea::logical(area.hull, &area.members)),
                format!(
                    "{} {s} interrupts {} copies of {sample} (in {}) across {}; \
                     a formula may have been overwritten with a value",
                    program.kind(s),
                    area.members.len(),
                    area.members[0],
                    area.hull
                ),
            ));
        }
    }
    out
}

/// D6: within a group of structurally identical formulas, members that
/// differ from a strict-majority copy only in `$` markers or literal values.
pub fn detect_copy_misreference(program: &SpreadsheetProgram) -> Vec<Diagnostic> {
    let mut out = Vec::new();
    for group in structural_groups(program) {
        let n = group.members.len();
        if n < 3 {
            continue;
        }
        let mut parts: HashMap<NormalizedExpr, Vec<CellAddress>> = HashMap::new();
        for &m in &group.members {
            let e = program.get(m).formula().expect("formula member");
            parts.entry(normalize(e, m)).or_default().push(m);
        }
        let Some((major_key, major)) = parts.iter().find(|(_, ms)| ms.len() * 2 > n) else {
            continue;
        };
        let hull = Rect::hull(major.iter().copied()).expect("non-empty");
        let mut minority: Vec<CellAddress> = parts
            .iter()
            .filter(|(k, _)| *k != major_key && differs_only_in_modes_or_literals(major_key, k))
            .flat_map(|(_, ms)| ms.iter().copied())
            .collect();
        minority.sort();
        for m in minority {
            out.push(Diagnostic::new(
                Code::CopyMisreference,
                vec![m],
                Some(RelatedArea::logical(hull, major)),
                format!(
                    "{m} ({}) differs from {} sibling copies like {} ({}) only in absolute/relative markers or constants",
                    formula_text(program, m),
                    major.len(),
                    major[0],
                    formula_text(program, major[0])
                ),
            ));
        }
    }
    out
}

/// `G_CYCLE` (one per strongly connected component) and `G_DIV_ZERO` from an
/// evaluation result.
pub fn runtime_diagnostics(result: &EvalResult) -> Vec<Diagnostic> {
    let mut out = Vec::new();
    let mut cycles = BTreeSet::new();
    for d in &result.diagnostics {
        match &d.kind {
            RuntimeDiagnosticKind::Cycle { cycle } => {
                if cycles.insert(cycle.clone()) {
                    out.push(Diagnostic::new(
                        Code::Cycle,
                        cycle.clone(),
                        None,
                        format!("cells {} depend on each other in a cycle", join(cycle)),
                    ));
                }
            }
            RuntimeDiagnosticKind::DivByZero => out.push(Diagnostic::new(
                Code::DivZero,
                vec![d.cell],
                None,
                format!("{} divides by zero", d.cell),
            )),
            _ => {}
        }
    }
    out
}

pub fn detect_all(program: &SpreadsheetProgram, eval: Option<&EvalResult>) -> Vec<Diagnostic> {
    detect_all_with(program, eval, &DetectorConfig::default())
}

/// Every detector, sorted by code, then location, then the rest.
pub fn detect_all_with(
    program: &SpreadsheetProgram,
    eval: Option<&EvalResult>,
    config: &DetectorConfig,
) -> Vec<Diagnostic> {
    let mut out = detect_blank_ref(program);
    out.extend(detect_wrong_type_in_range(program));
    out.extend(detect_incorrect_range(program));
    out.extend(detect_area_mixup(program, config));
    out.extend(detect_constant_overwrite(program));
    out.extend(detect_copy_misreference(program));
    if let Some(r) = eval {
        out.extend(runtime_diagnostics(r));
    }
    out.sort();
    out.dedup();
    out
}
