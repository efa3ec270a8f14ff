//! Spreadsheet programs, instances and the `.sheet` text format.
//!
//! ```text
//! ; comment
//! A2 = "1. Quarter"     label
//! B4 = #140             constant, fixed by the author of the sheet
//! B5 = ?200             input cell with default value 200
//! B12 = =SUM(B2:B10)    formula
//! ```

use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use serde::Serialize;
use thiserror::Error;

use crate::address::{parse_address, CellAddress};
use crate::formula::{parse_formula, Expr, FormulaError};

#[derive(Debug, Clone, PartialEq)]
pub enum CellContent {
    Empty,
    Constant(f64),
    /// Input cell with its default value.
    Input(f64),
    Formula(Expr),
    Label(String),
}

/// The kind of a cell's content without its payload.
///
/// The declaration order is the tie-break order used for area majority types.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum CellKind {
    Constant,
    Input,
    Formula,
    Label,
    Empty,
}

impl CellKind {
    pub fn name(self) -> &'static str {
        match self {
            CellKind::Constant => "constant",
            CellKind::Input => "input",
            CellKind::Formula => "formula",
            CellKind::Label => "label",
            CellKind::Empty => "empty",
        }
    }
}

impl fmt::Display for CellKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl CellContent {
    pub fn kind(&self) -> CellKind {
        match self {
            CellContent::Empty => CellKind::Empty,
            CellContent::Constant(_) => CellKind::Constant,
            CellContent::Input(_) => CellKind::Input,
            CellContent::Formula(_) => CellKind::Formula,
            CellContent::Label(_) => CellKind::Label,
        }
    }

    pub fn formula(&self) -> Option<&Expr> {
        match self {
            CellContent::Formula(e) => Some(e),
            _ => None,
        }
    }
}

impl fmt::Display for CellContent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CellContent::Empty => Ok(()),
            CellContent::Constant(v) => write!(f, "#{v}"),
            CellContent::Input(v) => write!(f, "?{v}"),
            CellContent::Formula(e) => write!(f, "={e}"),
            CellContent::Label(t) => write!(f, "\"{t}\""),
        }
    }
}

/// Formulas, constants and layout without concrete input values.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct SpreadsheetProgram {
    cells: BTreeMap<CellAddress, CellContent>,
}

impl SpreadsheetProgram {
    pub fn new() -> Self {
        Self::default()
    }

    /// Inserts or replaces a cell. Storing `Empty` removes the cell.
    pub fn set(&mut self, addr: CellAddress, content: CellContent) {
        if content == CellContent::Empty {
            self.cells.remove(&addr);
        } else {
            self.cells.insert(addr, content);
        }
    }

    pub fn with(mut self, addr: CellAddress, content: CellContent) -> Self {
        self.set(addr, content);
        self
    }

    pub fn get(&self, addr: CellAddress) -> &CellContent {
        const EMPTY: CellContent = CellContent::Empty;
        self.cells.get(&addr).unwrap_or(&EMPTY)
    }

    pub fn kind(&self, addr: CellAddress) -> CellKind {
        self.get(addr).kind()
    }

    /// Non-empty cells in row-major order.
    pub fn cells(&self) -> impl Iterator<Item = (CellAddress, &CellContent)> {
        self.cells.iter().map(|(a, c)| (*a, c))
    }

    pub fn formulas(&self) -> impl Iterator<Item = (CellAddress, &Expr)> {
        self.cells
            .iter()
            .filter_map(|(a, c)| c.formula().map(|e| (*a, e)))
    }

    pub fn inputs(&self) -> impl Iterator<Item = (CellAddress, f64)> + '_ {
        self.cells.iter().filter_map(|(a, c)| match c {
            CellContent::Input(v) => Some((*a, *v)),
            _ => None,
        })
    }

    pub fn len(&self) -> usize {
        self.cells.len()
    }

    pub fn is_empty(&self) -> bool {
        self.cells.is_empty()
    }

    /// `(max col, max row)` over stored cells; `(0, 0)` for an empty program.
    pub fn extent(&self) -> (u32, u32) {
        self.cells
            .keys()
            .fold((0, 0), |(c, r), a| (c.max(a.col), r.max(a.row)))
    }

    pub fn count_by_kind(&self) -> BTreeMap<CellKind, usize> {
        let mut out = BTreeMap::new();
        for c in self.cells.values() {
            *out.entry(c.kind()).or_insert(0) += 1;
        }
        out
    }

    /// Text in `.sheet` format; [`load_program`] reads it back unchanged.
    pub fn render(&self) -> String {
        let mut out = String::new();
        for (a, c) in &self.cells {
            out.push_str(&format!("{a} = {c}\n"));
        }
        out
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum LoadError {
    #[error("line {line}: malformed line: {reason}")]
    MalformedLine { line: usize, reason: String },
    #[error("line {line}: duplicate cell {address}")]
    DuplicateCell { line: usize, address: CellAddress },
    #[error("line {line}: cell {address}: {source}")]
    Formula {
        line: usize,
        address: CellAddress,
        #[source]
        source: FormulaError,
    },
}

impl LoadError {
    pub fn line(&self) -> usize {
        match self {
            LoadError::MalformedLine { line, .. }
            | LoadError::DuplicateCell { line, .. }
            | LoadError::Formula { line, .. } => *line,
        }
    }
}

/// Optional sign, digits with at most one decimal point, at least one digit.
pub(crate) fn parse_number(text: &str) -> Option<f64> {
    let body = text.strip_prefix(['+', '-']).unwrap_or(text);
    let mut digits = 0;
    let mut dots = 0;
    for b in body.bytes() {
        match b {
            b'0'..=b'9' => digits += 1,
            b'.' => dots += 1,
            _ => return None,
        }
    }
    if digits == 0 || dots > 1 {
        return None;
    }
    text.parse().ok()
}

fn parse_content(text: &str) -> Result<CellContent, String> {
    let mut chars = text.chars();
    match chars.next() {
        Some('#') => parse_number(chars.as_str().trim())
            .map(CellContent::Constant)
            .ok_or_else(|| format!("bad constant `{text}`")),
        Some('?') => parse_number(chars.as_str().trim())
            .map(CellContent::Input)
            .ok_or_else(|| format!("bad input default `{text}`")),
        Some('"') if text.len() >= 2 && text.ends_with('"') => {
            Ok(CellContent::Label(text[1..text.len() - 1].to_string()))
        }
        Some('"') => Err("unterminated label".to_string()),
        Some('=') => unreachable!("formulas handled by caller"),
        _ => Err(format!("unrecognized content `{text}`")),
    }
}

pub fn load_program(text: &str) -> Result<SpreadsheetProgram, LoadError> {
    let mut program = SpreadsheetProgram::new();
    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        let trimmed = raw.trim();
        if trimmed.is_empty() || trimmed.starts_with(';') {
            continue;
        }
        let malformed = |reason: String| LoadError::MalformedLine { line, reason };
        let (addr_text, content_text) = trimmed
            .split_once('=')
            .ok_or_else(|| malformed("expected `ADDR = CONTENT`".into()))?;
        let address = parse_address(addr_text.trim()).map_err(|e| malformed(e.to_string()))?;
        let content_text = content_text.trim();
        let content = if let Some(f) = content_text.strip_prefix('=') {
            let expr = parse_formula(f).map_err(|source| LoadError::Formula {
                line,
                address,
                source,
            })?;
            CellContent::Formula(expr)
        } else {
            parse_content(content_text).map_err(malformed)?
        };
        if program.cells.contains_key(&address) {
            return Err(LoadError::DuplicateCell { line, address });
        }
        program.set(address, content);
    }
    Ok(program)
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("{0} is not an input cell")]
pub struct NotAnInputCell(pub CellAddress);

/// A program with every input cell bound to a value. Unbound inputs read
/// their default; bindings equal to the default are not stored, so two
/// instances with the same effective inputs compare equal.
#[derive(Debug, Clone, PartialEq)]
pub struct SpreadsheetInstance {
    program: Arc<SpreadsheetProgram>,
    bindings: BTreeMap<CellAddress, f64>,
}

impl SpreadsheetInstance {
    pub fn program(&self) -> &SpreadsheetProgram {
        &self.program
    }

    pub fn shared_program(&self) -> &Arc<SpreadsheetProgram> {
        &self.program
    }

    pub fn bindings(&self) -> &BTreeMap<CellAddress, f64> {
        &self.bindings
    }

    /// Effective value of an input cell.
    pub fn input_value(&self, addr: CellAddress) -> Option<f64> {
        match self.program.get(addr) {
            CellContent::Input(default) => Some(self.bindings.get(&addr).copied().unwrap_or(*default)),
            _ => None,
        }
    }

    /// A new instance with one input changed; `self` is untouched.
    pub fn with_input(&self, addr: CellAddress, value: f64) -> Result<Self, NotAnInputCell> {
        let mut next = self.clone();
        next.bind(addr, value)?;
        Ok(next)
    }

    fn bind(&mut self, addr: CellAddress, value: f64) -> Result<(), NotAnInputCell> {
        match self.program.get(addr) {
            CellContent::Input(default) => {
                if default.to_bits() == value.to_bits() {
                    self.bindings.remove(&addr);
                } else {
                    self.bindings.insert(addr, value);
                }
                Ok(())
            }
            _ => Err(NotAnInputCell(addr)),
        }
    }
}

pub fn instantiate<I>(
    program: impl Into<Arc<SpreadsheetProgram>>,
    bindings: I,
) -> Result<SpreadsheetInstance, NotAnInputCell>
where
    I: IntoIterator<Item = (CellAddress, f64)>,
{
    let mut inst = SpreadsheetInstance {
        program: program.into(),
        bindings: BTreeMap::new(),
    };
    for (a, v) in bindings {
        inst.bind(a, v)?;
    }
    Ok(inst)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn a(s: &str) -> CellAddress {
        parse_address(s).unwrap()
    }

    #[test]
    fn loads_constant_and_formula() {
        let p = load_program("B4 = #140\nB12 = =SUM(B2:B10)\n").unwrap();
        assert_eq!(p.get(a("B4")), &CellContent::Constant(140.0));
        assert_eq!(p.kind(a("B12")), CellKind::Formula);
        assert_eq!(p.len(), 2);
        assert_eq!(p.extent(), (2, 12));
    }

    #[test]
    fn empty_file() {
        let p = load_program("").unwrap();
        assert!(p.is_empty());
        assert_eq!(p.extent(), (0, 0));
        let p = load_program("; only a comment\n\n   \n").unwrap();
        assert!(p.is_empty());
    }

    #[test]
    fn duplicate_cell() {
        let err = load_program("A1 = #1\nA1 = #2\n").unwrap_err();
        assert_eq!(
            err,
            LoadError::DuplicateCell {
                line: 2,
                address: a("A1")
            }
        );
    }

    #[test]
    fn all_content_kinds() {
        let p = load_program(
            "A1 = \"1. Quarter\"\nA2 = #-1.5\nA3 = ?+2\nA4 = =A2*A3\nA5 = \"\"\nA6 = \"1\"\n",
        )
        .unwrap();
        assert_eq!(p.get(a("A1")), &CellContent::Label("1. Quarter".into()));
        assert_eq!(p.get(a("A2")), &CellContent::Constant(-1.5));
        assert_eq!(p.get(a("A3")), &CellContent::Input(2.0));
        assert_eq!(p.get(a("A5")), &CellContent::Label(String::new()));
        // quoted numbers stay labels
        assert_eq!(p.get(a("A6")), &CellContent::Label("1".into()));
    }

    #[test]
    fn malformed_lines() {
        for (text, line) in [
            ("A1 #1", 1),
            ("\n1A = #1", 2),
            ("A1 = 5", 1),
            ("A1 = #1,000", 1),
            ("A1 = #", 1),
            ("A1 = #1e5", 1),
            ("A1 = \"open", 1),
            ("A1 = ?x", 1),
        ] {
            let err = load_program(text).unwrap_err();
            assert!(matches!(err, LoadError::MalformedLine { .. }), "{text:?}: {err}");
            assert_eq!(err.line(), line);
        }
    }

    #[test]
    fn formula_errors_are_annotated() {
        let err = load_program("A1 = #1\nB2 = =1+2\n").unwrap_err();
        assert_eq!(
            err,
            LoadError::Formula {
                line: 2,
                address: a("B2"),
                source: FormulaError::NoReference
            }
        );
        assert_eq!(err.to_string(), "line 2: cell B2: formula contains no cell reference");
    }

    #[test]
    fn instantiate_and_bind() {
        let p = load_program("A1 = ?5\nA2 = ?1\nB12 = =A1+A2\nC1 = #3").unwrap();
        let i = instantiate(p.clone(), []).unwrap();
        assert_eq!(i.input_value(a("A1")), Some(5.0));
        let j = instantiate(p.clone(), [(a("A1"), 7.0)]).unwrap();
        assert_eq!(j.input_value(a("A1")), Some(7.0));
        assert_eq!(
            instantiate(p.clone(), [(a("B12"), 1.0)]).unwrap_err(),
            NotAnInputCell(a("B12"))
        );
    }

    #[test]
    fn with_input_is_persistent() {
        let p = load_program("A1 = ?5\nA2 = ?1\nC1 = #3").unwrap();
        let i = instantiate(p, [(a("A2"), 9.0)]).unwrap();
        let j = i.with_input(a("A1"), 6.0).unwrap();
        assert_eq!(j.input_value(a("A2")), Some(9.0));
        assert_eq!(j.input_value(a("A1")), Some(6.0));
        assert_eq!(i.input_value(a("A1")), Some(5.0));
        assert!(Arc::ptr_eq(i.shared_program(), j.shared_program()));
        assert_eq!(i.with_input(a("A2"), 9.0).unwrap(), i);
        assert_eq!(i.with_input(a("A1"), 5.0).unwrap(), i);
        assert_eq!(i.with_input(a("C1"), 1.0).unwrap_err(), NotAnInputCell(a("C1")));
    }

    fn arb_content() -> impl Strategy<Value = CellContent> {
        prop_oneof![
            (-1e6f64..1e6).prop_map(CellContent::Constant),
            (-1e6f64..1e6).prop_map(CellContent::Input),
            "[ -~]{0,12}".prop_map(CellContent::Label),
            crate::formula::tests::arb_expr()
                .prop_filter("needs a reference", |e| !e.references().is_empty())
                .prop_map(CellContent::Formula),
        ]
    }

    proptest! {
        #[test]
        fn render_round_trip(cells in prop::collection::btree_map((1u32..30, 1u32..30), arb_content(), 0..20)) {
            let mut p = SpreadsheetProgram::new();
            for ((c, r), content) in cells {
                p.set(CellAddress::new(c, r), content);
            }
            prop_assert_eq!(load_program(&p.render()).unwrap(), p);
        }
    }
}
