//! Interval testing: evaluate a program over input ranges, then compare the
//! concrete value `d`, the user's expected interval `E` and the computed
//! bounding interval `B` of every formula cell.

use std::collections::BTreeMap;
use std::fmt;

use serde::Serialize;
use thiserror::Error;

use crate::address::{parse_address, CellAddress};
use crate::dataflow::{build_graph, CyclicDependency};
use crate::eval::{eval_instance, Value};
use crate::formula::Expr;
use crate::interval::{iv_aggregate, iv_binop, Interval, IntervalError};
use crate::sheet::{parse_number, CellContent, CellKind, SpreadsheetInstance, SpreadsheetProgram};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub enum IntervalFault {
    DivisorContainsZero,
    EmptyAggregate,
    TypeError,
    Propagated,
}

impl From<IntervalError> for IntervalFault {
    fn from(e: IntervalError) -> Self {
        match e {
            IntervalError::DivisorContainsZero => IntervalFault::DivisorContainsZero,
            IntervalError::EmptyAggregate => IntervalFault::EmptyAggregate,
        }
    }
}

impl fmt::Display for IntervalFault {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Debug::fmt(self, f)
    }
}

/// The interval counterpart of [`Value`].
#[derive(Debug, Clone, PartialEq)]
pub enum IntervalValue {
    Interval(Interval),
    Blank,
    Text,
    Fault(IntervalFault),
}

impl IntervalValue {
    pub fn as_interval(&self) -> Option<Interval> {
        match self {
            IntervalValue::Interval(i) => Some(*i),
            _ => None,
        }
    }
}

impl fmt::Display for IntervalValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            IntervalValue::Interval(i) => i.fmt(f),
            IntervalValue::Blank => f.write_str("<blank>"),
            IntervalValue::Text => f.write_str("<text>"),
            IntervalValue::Fault(k) => write!(f, "#{k}"),
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct IntervalSpec {
    pub input_ranges: BTreeMap<CellAddress, Interval>,
    pub expected: BTreeMap<CellAddress, Interval>,
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SpecError {
    #[error("line {line}: {reason}")]
    MalformedLine { line: usize, reason: String },
    #[error("line {line}: {address} annotated twice")]
    Duplicate { line: usize, address: CellAddress },
    #[error("{0} is not an input cell")]
    NotAnInputCell(CellAddress),
    #[error("{0} is not a formula cell")]
    NotAFormulaCell(CellAddress),
}

impl IntervalSpec {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn with_input(mut self, addr: CellAddress, range: Interval) -> Self {
        self.input_ranges.insert(addr, range);
        self
    }

    pub fn with_expected(mut self, addr: CellAddress, range: Interval) -> Self {
        self.expected.insert(addr, range);
        self
    }

    /// Checks that every annotated cell has the right kind in `program`.
    pub fn validate(&self, program: &SpreadsheetProgram) -> Result<(), SpecError> {
        if let Some(a) = self.input_ranges.keys().find(|a| program.kind(**a) != CellKind::Input) {
            return Err(SpecError::NotAnInputCell(*a));
        }
        if let Some(a) = self.expected.keys().find(|a| program.kind(**a) != CellKind::Formula) {
            return Err(SpecError::NotAFormulaCell(*a));
        }
        Ok(())
    }

    pub fn render(&self) -> String {
        let mut out = String::new();
        for (a, i) in &self.input_ranges {
            out.push_str(&format!("input {a} in [{}, {}]\n", i.lo(), i.hi()));
        }
        for (a, i) in &self.expected {
            out.push_str(&format!("expect {a} in [{}, {}]\n", i.lo(), i.hi()));
        }
        out
    }
}

fn parse_bracket(text: &str) -> Result<Interval, String> {
    let inner = text
        .strip_prefix('[')
        .and_then(|t| t.strip_suffix(']'))
        .ok_or_else(|| format!("expected `[lo, hi]`, found `{text}`"))?;
    let (lo, hi) = inner
        .split_once(',')
        .ok_or_else(|| format!("expected `[lo, hi]`, found `{text}`"))?;
    let num = |s: &str| parse_number(s.trim()).ok_or_else(|| format!("bad number `{}`", s.trim()));
    let (lo, hi) = (num(lo)?, num(hi)?);
    Interval::new(lo, hi).map_err(|e| e.to_string())
}

/// Parses an `.intervals` annotation file.
pub fn parse_interval_spec(text: &str) -> Result<IntervalSpec, SpecError> {
    let mut spec = IntervalSpec::new();
    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        let body = raw.split(';').next().unwrap_or("").trim();
        if body.is_empty() {
            continue;
        }
        let malformed = |reason: String| SpecError::MalformedLine { line, reason };
        let mut words = body.split_whitespace();
        let keyword = words.next().unwrap_or_default();
        let addr = words.next().ok_or_else(|| malformed("missing cell address".into()))?;
        if words.next() != Some("in") {
            return Err(malformed("expected `in` after the address".into()));
        }
        let bracket: String = words.collect();
        let address = parse_address(addr).map_err(|e| malformed(e.to_string()))?;
        let range = parse_bracket(&bracket).map_err(malformed)?;
        let target = match keyword {
            "input" => &mut spec.input_ranges,
            "expect" => &mut spec.expected,
            other => return Err(malformed(format!("unknown directive `{other}`"))),
        };
        if target.insert(address, range).is_some() {
            return Err(SpecError::Duplicate { line, address });
        }
    }
    Ok(spec)
}

struct IntervalEval<'a> {
    values: &'a BTreeMap<CellAddress, IntervalValue>,
}

impl IntervalEval<'_> {
    fn read(&self, at: CellAddress) -> IntervalValue {
        self.values.get(&at).cloned().unwrap_or(IntervalValue::Blank)
    }

    fn collect(&self, at: CellAddress, items: &mut Vec<Interval>, fault: &mut Option<IntervalFault>) {
        match self.read(at) {
            IntervalValue::Interval(i) => items.push(i),
            IntervalValue::Blank | IntervalValue::Text => {}
            IntervalValue::Fault(_) => {
                fault.get_or_insert(IntervalFault::Propagated);
            }
        }
    }

    // Mirrors the concrete evaluator case for case, so that degenerate
    // inputs reproduce its results exactly.
    fn scalar(&self, e: &Expr) -> Result<Interval, IntervalFault> {
        match e {
            Expr::Number(v) => Ok(Interval::degenerate(*v)),
            Expr::Reference(r) => match self.read(r.address()) {
                IntervalValue::Interval(i) => Ok(i),
                IntervalValue::Blank => Ok(Interval::degenerate(0.0)),
                IntervalValue::Text => Err(IntervalFault::TypeError),
                IntervalValue::Fault(_) => Err(IntervalFault::Propagated),
            },
            Expr::Range(_) => Err(IntervalFault::TypeError),
            Expr::Negate(inner) => self.scalar(inner).map(std::ops::Neg::neg),
            Expr::Binary { op, left, right } => {
                let l = self.scalar(left);
                let r = self.scalar(right);
                Ok(iv_binop(*op, l?, r?)?)
            }
            Expr::Call { function, args } => {
                let mut items = Vec::new();
                let mut fault = None;
                for arg in args {
                    match arg {
                        Expr::Range(r) => r.rect().cells().for_each(|at| self.collect(at, &mut items, &mut fault)),
                        Expr::Reference(r) => self.collect(r.address(), &mut items, &mut fault),
                        other => match self.scalar(other) {
                            Ok(i) => items.push(i),
                            Err(k) => {
                                fault.get_or_insert(k);
                            }
                        },
                    }
                }
                if let Some(k) = fault {
                    return Err(k);
                }
                // SUM/MIN/MAX of nothing are 0 in the concrete evaluator.
                if items.is_empty() && *function != crate::formula::Function::Avg {
                    return Ok(Interval::degenerate(0.0));
                }
                Ok(iv_aggregate(*function, &items)?)
            }
        }
    }
}

fn eval_with(
    program: &SpreadsheetProgram,
    spec: &IntervalSpec,
    input_default: impl Fn(CellAddress) -> f64,
) -> Result<BTreeMap<CellAddress, IntervalValue>, CyclicDependency> {
    let order = build_graph(program).topo_order()?;
    let mut values = BTreeMap::new();
    for a in order {
        let v = match program.get(a) {
            CellContent::Empty => continue,
            CellContent::Constant(v) => IntervalValue::Interval(Interval::degenerate(*v)),
            CellContent::Input(_) => IntervalValue::Interval(
                spec.input_ranges
                    .get(&a)
                    .copied()
                    .unwrap_or_else(|| Interval::degenerate(input_default(a))),
            ),
            CellContent::Label(_) => IntervalValue::Text,
            CellContent::Formula(e) => match (IntervalEval { values: &values }).scalar(e) {
                Ok(i) => IntervalValue::Interval(i),
                Err(k) => IntervalValue::Fault(k),
            },
        };
        values.insert(a, v);
    }
    Ok(values)
}

/// Bounding intervals of every non-empty cell. Inputs without a range use
/// their default value.
pub fn eval_intervals(
    program: &SpreadsheetProgram,
    spec: &IntervalSpec,
) -> Result<BTreeMap<CellAddress, IntervalValue>, CyclicDependency> {
    eval_with(program, spec, |a| match program.get(a) {
        CellContent::Input(v) => *v,
        _ => unreachable!(),
    })
}

/// Like [`eval_intervals`], but inputs without a range use the instance's
/// bound value.
pub fn eval_intervals_for(
    inst: &SpreadsheetInstance,
    spec: &IntervalSpec,
) -> Result<BTreeMap<CellAddress, IntervalValue>, CyclicDependency> {
    eval_with(inst.program(), spec, |a| inst.input_value(a).expect("input"))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub enum Verdict {
    NoSymptom,
    /// `d` lies outside `E`.
    SymptomValueOutside,
    /// `E` is not contained in `B`.
    SymptomModelMismatch,
    SymptomBoth,
    /// No expected interval was given.
    NotJudged,
}

impl Verdict {
    pub fn is_symptom(self) -> bool {
        matches!(
            self,
            Verdict::SymptomValueOutside | Verdict::SymptomModelMismatch | Verdict::SymptomBoth
        )
    }
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Debug::fmt(self, f)
    }
}

/// Verdict plus an explanation when `d` or `B` is not a plain interval.
pub fn judge_with_reason(d: &Value, e: &Interval, b: &IntervalValue) -> (Verdict, Option<String>) {
    if let Value::Fault(k) = d {
        return (Verdict::SymptomBoth, Some(format!("computed value is a fault ({k})")));
    }
    let outside = match d.as_number() {
        Some(v) => !e.contains(v),
        None => true,
    };
    let (mismatch, reason) = match b {
        IntervalValue::Interval(bi) => (!e.is_subset_of(bi), None),
        other => (true, Some(format!("bounding interval is {other}"))),
    };
    let verdict = match (outside, mismatch) {
        (false, false) => Verdict::NoSymptom,
        (true, false) => Verdict::SymptomValueOutside,
        (false, true) => Verdict::SymptomModelMismatch,
        (true, true) => Verdict::SymptomBoth,
    };
    (verdict, reason)
}

pub fn judge(d: &Value, e: &Interval, b: &IntervalValue) -> Verdict {
    judge_with_reason(d, e, b).0
}

#[derive(Debug, Clone, PartialEq)]
pub struct TestRecord {
    pub cell: CellAddress,
    pub d: Value,
    pub b: IntervalValue,
    pub e: Option<Interval>,
    pub verdict: Verdict,
    pub reason: Option<String>,
    /// Transitive precedents, symptomatic ones first, then nearest first.
    pub suspects: Vec<CellAddress>,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct TestReport {
    /// One record per formula cell, row-major.
    pub records: Vec<TestRecord>,
}

impl TestReport {
    pub fn record(&self, cell: CellAddress) -> Option<&TestRecord> {
        self.records.iter().find(|r| r.cell == cell)
    }

    pub fn symptoms(&self) -> impl Iterator<Item = &TestRecord> {
        self.records.iter().filter(|r| r.verdict.is_symptom())
    }

    pub fn has_symptoms(&self) -> bool {
        self.symptoms().next().is_some()
    }
}

pub fn run_interval_test(inst: &SpreadsheetInstance, spec: &IntervalSpec) -> Result<TestReport, CyclicDependency> {
    let concrete = eval_instance(inst)?;
    let bounds = eval_intervals_for(inst, spec)?;
    let graph = build_graph(inst.program());

    let mut records: Vec<TestRecord> = inst
        .program()
        .formulas()
        .map(|(cell, _)| {
            let d = concrete.value(cell);
            let b = bounds[&cell].clone();
            let e = spec.expected.get(&cell).copied();
            let (verdict, reason) = match &e {
                Some(e) => judge_with_reason(&d, e, &b),
                None => (Verdict::NotJudged, None),
            };
            TestRecord {
                cell,
                d,
                b,
                e,
                verdict,
                reason,
                suspects: Vec::new(),
            }
        })
        .collect();

    let symptomatic: BTreeMap<CellAddress, bool> =
        records.iter().map(|r| (r.cell, r.verdict.is_symptom())).collect();
    for r in records.iter_mut().filter(|r| r.verdict.is_symptom()) {
        let mut suspects: Vec<(bool, usize, CellAddress)> = graph
            .precedent_distances(r.cell)
            .into_iter()
            .map(|(p, dist)| (!symptomatic.get(&p).copied().unwrap_or(false), dist, p))
            .collect();
        suspects.sort();
        r.suspects = suspects.into_iter().map(|(_, _, p)| p).collect();
    }
    Ok(TestReport { records })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sheet::{instantiate, load_program};

    fn a(s: &str) -> CellAddress {
        parse_address(s).unwrap()
    }

    fn iv(lo: f64, hi: f64) -> Interval {
        Interval::new(lo, hi).unwrap()
    }

    #[test]
    fn verdict_table() {
        let b = IntervalValue::Interval(iv(0.0, 10.0));
        assert_eq!(judge(&Value::Number(5.0), &iv(4.0, 6.0), &b), Verdict::NoSymptom);
        assert_eq!(judge(&Value::Number(7.0), &iv(4.0, 6.0), &b), Verdict::SymptomValueOutside);
        assert_eq!(judge(&Value::Number(5.0), &iv(4.0, 12.0), &b), Verdict::SymptomModelMismatch);
        assert_eq!(judge(&Value::Number(13.0), &iv(4.0, 12.0), &b), Verdict::SymptomBoth);
    }

    #[test]
    fn judge_edges() {
        let b = IntervalValue::Interval(iv(4.0, 6.0));
        // closed endpoints
        assert_eq!(judge(&Value::Number(4.0), &iv(4.0, 6.0), &b), Verdict::NoSymptom);
        assert_eq!(judge(&Value::Number(6.0), &iv(4.0, 6.0), &b), Verdict::NoSymptom);
        let fault_b = IntervalValue::Fault(IntervalFault::DivisorContainsZero);
        let (v, reason) = judge_with_reason(&Value::Number(5.0), &iv(4.0, 6.0), &fault_b);
        assert_eq!(v, Verdict::SymptomModelMismatch);
        assert!(reason.unwrap().contains("DivisorContainsZero"));
        let (v, reason) = judge_with_reason(&Value::Fault(crate::eval::FaultKind::DivByZero), &iv(4.0, 6.0), &b);
        assert_eq!(v, Verdict::SymptomBoth);
        assert!(reason.unwrap().contains("fault"));
    }

    #[test]
    fn spec_parsing() {
        let spec = parse_interval_spec(
            "; ranges\ninput B4 in [126, 154]\n  expect B12 in [900,1200] ; trailing\n\ninput B5 in [ -1.5 , 2 ]\n",
        )
        .unwrap();
        assert_eq!(spec.input_ranges[&a("B4")], iv(126.0, 154.0));
        assert_eq!(spec.input_ranges[&a("B5")], iv(-1.5, 2.0));
        assert_eq!(spec.expected[&a("B12")], iv(900.0, 1200.0));
        assert_eq!(parse_interval_spec(&spec.render()).unwrap(), spec);
    }

    #[test]
    fn spec_errors() {
        let line = |t: &str| match parse_interval_spec(t) {
            Err(SpecError::MalformedLine { line, .. }) => line,
            other => panic!("{other:?}"),
        };
        assert_eq!(line("input A1 in [1, 2]\nexpect A2 [1, 2]"), 2);
        assert_eq!(line("assume A1 in [1, 2]"), 1);
        assert_eq!(line("input A1 in [3, 2]"), 1);
        assert_eq!(line("input A1 in [x, 2]"), 1);
        assert_eq!(line("input 1A in [1, 2]"), 1);
        assert_eq!(line("input A1 in 1, 2"), 1);
        assert!(matches!(
            parse_interval_spec("input A1 in [1,2]\ninput A1 in [1,3]"),
            Err(SpecError::Duplicate { line: 2, .. })
        ));

        let p = load_program("A1 = ?1\nA2 = \"x\"\nA3 = =A1*2").unwrap();
        let spec = parse_interval_spec("expect A2 in [1,2]").unwrap();
        assert_eq!(spec.validate(&p), Err(SpecError::NotAFormulaCell(a("A2"))));
        let spec = parse_interval_spec("input A3 in [1,2]").unwrap();
        assert_eq!(spec.validate(&p), Err(SpecError::NotAnInputCell(a("A3"))));
        let spec = parse_interval_spec("input A1 in [1,2]\nexpect A3 in [1,2]").unwrap();
        assert_eq!(spec.validate(&p), Ok(()));
    }

    const QUARTERS_INPUTS: &str = "B2 = \"1. Quarter\"\nB4 = ?140\nB5 = ?200\nB6 = ?170\nB7 = \"2. Quarter\"\nB8 = ?180\nB9 = ?230\nB10 = ?100\nB12 = =SUM(B2:B10)";

    #[test]
    fn quarters_bands() {
        let p = load_program(QUARTERS_INPUTS).unwrap();
        let spec = parse_interval_spec(
            "input B4 in [126, 154]\ninput B5 in [180, 220]\ninput B6 in [153, 187]\ninput B8 in [162, 198]\ninput B9 in [207, 253]\ninput B10 in [90, 110]",
        )
        .unwrap();
        let b = eval_intervals(&p, &spec).unwrap();
        assert_eq!(b[&a("B12")], IntervalValue::Interval(iv(918.0, 1122.0)));
        let degenerate = eval_intervals(&p, &IntervalSpec::new()).unwrap();
        assert_eq!(degenerate[&a("B12")], IntervalValue::Interval(iv(1020.0, 1020.0)));
    }

    #[test]
    fn divisor_range_with_zero() {
        let p = load_program("A1 = ?1\nA2 = =10/A1\nA3 = =A2+1").unwrap();
        let spec = IntervalSpec::new().with_input(a("A1"), iv(-1.0, 1.0));
        let b = eval_intervals(&p, &spec).unwrap();
        assert_eq!(b[&a("A2")], IntervalValue::Fault(IntervalFault::DivisorContainsZero));
        assert_eq!(b[&a("A3")], IntervalValue::Fault(IntervalFault::Propagated));
    }

    #[test]
    fn mirrors_blank_and_text_handling() {
        let p = load_program("A1 = \"t\"\nA3 = =A2+1\nA4 = =SUM(A1:A2)\nA5 = =AVG(A1:A2)\nA6 = =A1*2\nA7 = =MAX(A1:A2)").unwrap();
        let b = eval_intervals(&p, &IntervalSpec::new()).unwrap();
        assert_eq!(b[&a("A3")], IntervalValue::Interval(iv(1.0, 1.0)));
        assert_eq!(b[&a("A4")], IntervalValue::Interval(iv(0.0, 0.0)));
        assert_eq!(b[&a("A5")], IntervalValue::Fault(IntervalFault::EmptyAggregate));
        assert_eq!(b[&a("A6")], IntervalValue::Fault(IntervalFault::TypeError));
        assert_eq!(b[&a("A7")], IntervalValue::Interval(iv(0.0, 0.0)));
        let d = eval_instance(&instantiate(p, []).unwrap()).unwrap();
        assert_eq!(d.value(a("A4")), Value::Number(0.0));
        assert_eq!(d.value(a("A7")), Value::Number(0.0));
    }

    #[test]
    fn cycle_is_an_error() {
        let p = load_program("A1 = =A2\nA2 = =A1").unwrap();
        assert!(eval_intervals(&p, &IntervalSpec::new()).is_err());
        assert!(run_interval_test(&instantiate(p, []).unwrap(), &IntervalSpec::new()).is_err());
    }

    fn sales_appended() -> SpreadsheetInstance {
        let p = load_program(
            "A1 = \"Item\"\nB1 = \"Region\"\nC1 = \"Sales\"\nC2 = ?500\nC3 = ?1000\nC4 = ?300\nC5 = ?600\nC6 = ?900\nC7 = ?600\nA8 = \"Total\"\nC8 = =SUM(C2:C6)",
        )
        .unwrap();
        instantiate(p, []).unwrap()
    }

    #[test]
    fn sales_appended_value_outside() {
        let inst = sales_appended();
        let mut spec = IntervalSpec::new().with_expected(a("C8"), iv(3500.0, 4500.0));
        for c in ["C2", "C3", "C4", "C5", "C6", "C7"] {
            spec = spec.with_input(a(c), iv(0.0, 2000.0));
        }
        let report = run_interval_test(&inst, &spec).unwrap();
        let r = report.record(a("C8")).unwrap();
        assert_eq!(r.d, Value::Number(3300.0));
        assert_eq!(r.verdict, Verdict::SymptomValueOutside);
        let names: Vec<_> = r.suspects.iter().map(|s| s.to_string()).collect();
        assert_eq!(names, ["C2", "C3", "C4", "C5", "C6"]);
        assert!(report.has_symptoms());
    }

    #[test]
    fn sales_appended_degenerate_inputs_flag_both() {
        // With every input fixed, B collapses to [3300, 3300], which cannot
        // contain E.
        let spec = IntervalSpec::new().with_expected(a("C8"), iv(3500.0, 4500.0));
        let report = run_interval_test(&sales_appended(), &spec).unwrap();
        assert_eq!(report.record(a("C8")).unwrap().verdict, Verdict::SymptomBoth);
    }

    #[test]
    fn suspects_symptomatic_first() {
        let p = load_program("A1 = ?1\nA2 = =A1*2\nB1 = ?5\nB2 = =B1+A2\nB3 = =B2+1").unwrap();
        let inst = instantiate(p, []).unwrap();
        let spec = IntervalSpec::new()
            .with_expected(a("B3"), iv(100.0, 100.0))
            .with_expected(a("A2"), iv(50.0, 60.0));
        let report = run_interval_test(&inst, &spec).unwrap();
        let names: Vec<_> = report.record(a("B3")).unwrap().suspects.iter().map(|s| s.to_string()).collect();
        // A2 is symptomatic and goes first; the rest by distance then position.
        assert_eq!(names, ["A2", "B2", "B1", "A1"]);
        assert!(report.record(a("B2")).unwrap().suspects.is_empty());
    }

    #[test]
    fn degenerate_expectations_all_clear() {
        let p = load_program(QUARTERS_INPUTS).unwrap();
        let inst = instantiate(p, []).unwrap();
        let d = eval_instance(&inst).unwrap();
        let mut spec = IntervalSpec::new();
        for (cell, _) in inst.program().formulas() {
            let v = d.value(cell).as_number().unwrap();
            spec = spec.with_expected(cell, Interval::degenerate(v));
        }
        let report = run_interval_test(&inst, &spec).unwrap();
        assert!(report.records.iter().all(|r| r.verdict == Verdict::NoSymptom));

        let report = run_interval_test(&inst, &IntervalSpec::new()).unwrap();
        assert!(report
            .records
            .iter()
            .all(|r| r.verdict == Verdict::NotJudged && r.suspects.is_empty()));
    }

    #[test]
    fn unlisted_inputs_follow_instance() {
        let p = load_program("A1 = ?1\nA2 = =A1*3").unwrap();
        let inst = instantiate(p, [(a("A1"), 4.0)]).unwrap();
        let b = eval_intervals_for(&inst, &IntervalSpec::new()).unwrap();
        assert_eq!(b[&a("A2")], IntervalValue::Interval(iv(12.0, 12.0)));
    }
}
