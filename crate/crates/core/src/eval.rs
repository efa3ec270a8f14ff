//! Concrete evaluation of spreadsheet instances.
//!
//! Scalar arithmetic reads an empty cell as 0 and a label as a type error.
//! Grouping functions skip empty and label cells instead. Every coercion or
//! skip is recorded as a [`RuntimeDiagnostic`] on the formula cell.
//!
//! A fault raised inside a formula keeps its kind (`=A1/(A1-A1)` is
//! `DivByZero`); reading a cell whose value is a fault yields `Propagated`.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use serde::Serialize;

use crate::address::CellAddress;
use crate::dataflow::{build_graph, CyclicDependency, DependencyGraph};
use crate::formula::{BinaryOp, Expr, Function};
use crate::sheet::{CellContent, SpreadsheetInstance};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub enum FaultKind {
    DivByZero,
    TypeError,
    Cycle,
    Propagated,
}

impl fmt::Display for FaultKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Debug::fmt(self, f)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Value {
    Number(f64),
    Blank,
    Text(String),
    Fault(FaultKind),
}

impl Value {
    pub fn as_number(&self) -> Option<f64> {
        match self {
            Value::Number(v) => Some(*v),
            _ => None,
        }
    }

    /// Bitwise equality for numbers (`-0.0 != 0.0`), structural otherwise.
    pub fn same_bits(&self, other: &Value) -> bool {
        match (self, other) {
            (Value::Number(a), Value::Number(b)) => a.to_bits() == b.to_bits(),
            _ => self == other,
        }
    }
}

impl fmt::Display for Value {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Value::Number(v) => write!(f, "{v}"),
            Value::Blank => f.write_str("<blank>"),
            Value::Text(t) => write!(f, "{t:?}"),
            Value::Fault(k) => write!(f, "#{k}"),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum SkippedKind {
    Blank,
    Text,
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub enum RuntimeDiagnosticKind {
    /// An empty cell was read as 0 in scalar arithmetic.
    BlankInArithmetic { read: CellAddress },
    /// A grouping function skipped a non-numeric cell.
    SkippedNonNumeric { skipped: CellAddress, kind: SkippedKind },
    /// A label was read in scalar arithmetic.
    TypeError { read: CellAddress },
    DivByZero,
    /// The cell lies on a dependency cycle; `cycle` is its strongly connected
    /// component in row-major order.
    Cycle { cycle: Vec<CellAddress> },
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub struct RuntimeDiagnostic {
    pub cell: CellAddress,
    pub kind: RuntimeDiagnosticKind,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct EvalResult {
    /// Value of every non-empty cell of the program.
    pub values: BTreeMap<CellAddress, Value>,
    /// Sorted by cell, then kind.
    pub diagnostics: Vec<RuntimeDiagnostic>,
}

impl EvalResult {
    pub fn value(&self, addr: CellAddress) -> Value {
        self.values.get(&addr).cloned().unwrap_or(Value::Blank)
    }
}

/// Value of a non-formula cell.
fn base_value(inst: &SpreadsheetInstance, addr: CellAddress) -> Option<Value> {
    match inst.program().get(addr) {
        CellContent::Empty => Some(Value::Blank),
        CellContent::Constant(v) => Some(Value::Number(*v)),
        CellContent::Input(_) => Some(Value::Number(inst.input_value(addr).expect("input"))),
        CellContent::Label(t) => Some(Value::Text(t.clone())),
        CellContent::Formula(_) => None,
    }
}

struct FormulaEval<'a, F: Fn(CellAddress) -> Value> {
    host: CellAddress,
    read: &'a F,
    diags: &'a mut Vec<RuntimeDiagnostic>,
}

impl<F: Fn(CellAddress) -> Value> FormulaEval<'_, F> {
    fn note(&mut self, kind: RuntimeDiagnosticKind) {
        self.diags.push(RuntimeDiagnostic {
            cell: self.host,
            kind,
        });
    }

    fn scalar(&mut self, e: &Expr) -> Result<f64, FaultKind> {
        match e {
            Expr::Number(v) => Ok(*v),
            Expr::Reference(r) => {
                let at = r.address();
                match (self.read)(at) {
                    Value::Number(v) => Ok(v),
                    Value::Blank => {
                        self.note(RuntimeDiagnosticKind::BlankInArithmetic { read: at });
                        Ok(0.0)
                    }
                    Value::Text(_) => {
                        self.note(RuntimeDiagnosticKind::TypeError { read: at });
                        Err(FaultKind::TypeError)
                    }
                    Value::Fault(_) => Err(FaultKind::Propagated),
                }
            }
            // The parser only admits ranges as grouping arguments.
            Expr::Range(_) => Err(FaultKind::TypeError),
            Expr::Negate(inner) => self.scalar(inner).map(|v| -v),
            Expr::Binary { op, left, right } => {
                let l = self.scalar(left);
                let r = self.scalar(right);
                let (l, r) = (l?, r?);
                match op {
                    BinaryOp::Add => Ok(l + r),
                    BinaryOp::Sub => Ok(l - r),
                    BinaryOp::Mul => Ok(l * r),
                    BinaryOp::Div => {
                        if r == 0.0 {
                            self.note(RuntimeDiagnosticKind::DivByZero);
                            Err(FaultKind::DivByZero)
                        } else {
                            Ok(l / r)
                        }
                    }
                }
            }
            Expr::Call { function, args } => {
                let mut items = Vec::new();
                let mut fault = None;
                for arg in args {
                    match arg {
                        Expr::Range(r) => {
                            for at in r.rect().cells() {
                                self.collect_cell(at, &mut items, &mut fault);
                            }
                        }
                        Expr::Reference(r) => self.collect_cell(r.address(), &mut items, &mut fault),
                        other => match self.scalar(other) {
                            Ok(v) => items.push(v),
                            Err(k) => {
                                fault.get_or_insert(k);
                            }
                        },
                    }
                }
                if let Some(k) = fault {
                    return Err(k);
                }
                aggregate(*function, &items).ok_or_else(|| {
                    self.note(RuntimeDiagnosticKind::DivByZero);
                    FaultKind::DivByZero
                })
            }
        }
    }

    fn collect_cell(&mut self, at: CellAddress, items: &mut Vec<f64>, fault: &mut Option<FaultKind>) {
        match (self.read)(at) {
            Value::Number(v) => items.push(v),
            Value::Blank => self.note(RuntimeDiagnosticKind::SkippedNonNumeric {
                skipped: at,
                kind: SkippedKind::Blank,
            }),
            Value::Text(_) => self.note(RuntimeDiagnosticKind::SkippedNonNumeric {
                skipped: at,
                kind: SkippedKind::Text,
            }),
            Value::Fault(_) => {
                fault.get_or_insert(FaultKind::Propagated);
            }
        }
    }
}

/// Aggregates numeric items left to right. `None` only for AVG of nothing.
pub(crate) fn aggregate(function: Function, items: &[f64]) -> Option<f64> {
    let fold = |f: fn(f64, f64) -> f64| match items.split_first() {
        None => 0.0,
        Some((first, rest)) => rest.iter().fold(*first, |acc, x| f(acc, *x)),
    };
    match function {
        Function::Sum => Some(fold(|a, b| a + b)),
        Function::Avg if items.is_empty() => None,
        Function::Avg => Some(fold(|a, b| a + b) / items.len() as f64),
        Function::Min => Some(fold(f64::min)),
        Function::Max => Some(fold(f64::max)),
        Function::Count => Some(items.len() as f64),
    }
}

fn eval_formula(
    host: CellAddress,
    expr: &Expr,
    read: &impl Fn(CellAddress) -> Value,
    diags: &mut Vec<RuntimeDiagnostic>,
) -> Value {
    let mut ev = FormulaEval { host, read, diags };
    match ev.scalar(expr) {
        Ok(v) => Value::Number(v),
        Err(k) => Value::Fault(k),
    }
}

/// Evaluation state shared by single-cell queries on one instance.
#[derive(Debug, Clone)]
pub struct EvalMemo {
    graph: DependencyGraph,
    values: BTreeMap<CellAddress, Value>,
    diagnostics: Vec<RuntimeDiagnostic>,
}

impl EvalMemo {
    pub fn new(inst: &SpreadsheetInstance) -> Self {
        EvalMemo {
            graph: build_graph(inst.program()),
            values: BTreeMap::new(),
            diagnostics: Vec::new(),
        }
    }

    pub fn graph(&self) -> &DependencyGraph {
        &self.graph
    }

    /// Values computed so far.
    pub fn values(&self) -> &BTreeMap<CellAddress, Value> {
        &self.values
    }

    pub fn diagnostics(&self) -> &[RuntimeDiagnostic] {
        &self.diagnostics
    }

    fn read(&self, inst: &SpreadsheetInstance, at: CellAddress) -> Value {
        self.values
            .get(&at)
            .cloned()
            .or_else(|| base_value(inst, at))
            .expect("precedent evaluated before its dependent")
    }

    fn compute(&mut self, inst: &SpreadsheetInstance, addr: CellAddress) {
        let value = match inst.program().get(addr) {
            CellContent::Formula(expr) => {
                let mut diags = Vec::new();
                let v = eval_formula(addr, expr, &|at| self.read(inst, at), &mut diags);
                self.diagnostics.extend(diags);
                v
            }
            _ => base_value(inst, addr).expect("non-formula"),
        };
        self.values.insert(addr, value);
    }
}

/// Value of one cell, evaluating only its transitive precedents.
pub fn eval_cell(
    inst: &SpreadsheetInstance,
    addr: CellAddress,
    memo: &mut EvalMemo,
) -> Result<Value, CyclicDependency> {
    if let Some(v) = memo.values.get(&addr) {
        return Ok(v.clone());
    }
    let mut in_progress = BTreeSet::new();
    let mut stack = vec![(addr, false)];
    while let Some((x, expanded)) = stack.pop() {
        if memo.values.contains_key(&x) {
            continue;
        }
        if expanded {
            in_progress.remove(&x);
            memo.compute(inst, x);
            continue;
        }
        if inst.program().get(x).formula().is_none() {
            memo.compute(inst, x);
            continue;
        }
        if !in_progress.insert(x) {
            return Err(cycle_through(&memo.graph, addr));
        }
        stack.push((x, true));
        let pending: Vec<_> = memo
            .graph
            .direct_precedents(x)
            .filter(|p| !memo.values.contains_key(p))
            .collect();
        for p in pending.into_iter().rev() {
            if in_progress.contains(&p) {
                return Err(cycle_through(&memo.graph, addr));
            }
            stack.push((p, false));
        }
    }
    Ok(memo.values[&addr].clone())
}

fn cycle_through(g: &DependencyGraph, addr: CellAddress) -> CyclicDependency {
    let (_, rest) = g.partial_order();
    let mut cone = g.precedents(addr, true);
    cone.insert(addr);
    let stuck: BTreeSet<_> = rest.intersection(&cone).copied().collect();
    CyclicDependency {
        cycle: g.find_cycle(&stuck),
    }
}

fn finish(values: BTreeMap<CellAddress, Value>, mut diagnostics: Vec<RuntimeDiagnostic>, inst: &SpreadsheetInstance) -> EvalResult {
    diagnostics.sort();
    diagnostics.dedup();
    let values = values
        .into_iter()
        .filter(|(a, _)| inst.program().kind(*a) != crate::sheet::CellKind::Empty)
        .collect();
    EvalResult { values, diagnostics }
}

/// Evaluates every cell in dependency order. Fails on any cycle.
pub fn eval_instance(inst: &SpreadsheetInstance) -> Result<EvalResult, CyclicDependency> {
    let mut memo = EvalMemo::new(inst);
    let order = memo.graph.topo_order()?;
    for a in order {
        memo.compute(inst, a);
    }
    Ok(finish(memo.values, memo.diagnostics, inst))
}

/// Like [`eval_instance`], but cells on a cycle evaluate to
/// `Fault(Cycle)` (with a `Cycle` diagnostic) and everything else is still
/// computed.
pub fn eval_instance_lenient(inst: &SpreadsheetInstance) -> EvalResult {
    let mut memo = EvalMemo::new(inst);
    let (order, rest) = memo.graph.partial_order();
    for a in order {
        memo.compute(inst, a);
    }
    if !rest.is_empty() {
        let g = &memo.graph;
        let cyclic = g.cyclic_cells();
        for &c in &cyclic {
            let mut scc: Vec<_> = g
                .precedents(c, true)
                .intersection(&g.dependents(c, true))
                .copied()
                .collect();
            scc.sort();
            memo.diagnostics.push(RuntimeDiagnostic {
                cell: c,
                kind: RuntimeDiagnosticKind::Cycle { cycle: scc },
            });
            memo.values.insert(c, Value::Fault(FaultKind::Cycle));
        }
        for a in rest {
            if !cyclic.contains(&a) {
                let _ = eval_cell(inst, a, &mut memo);
            }
        }
    }
    finish(memo.values, memo.diagnostics, inst)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::address::parse_address;
    use crate::sheet::{instantiate, load_program};

    fn a(s: &str) -> CellAddress {
        parse_address(s).unwrap()
    }

    fn inst(text: &str) -> SpreadsheetInstance {
        instantiate(load_program(text).unwrap(), []).unwrap()
    }

    const QUARTERS: &str = "\
A4 = \"January\"
A5 = \"February\"
A6 = \"March\"
A8 = \"April\"
A9 = \"May\"
A10 = \"June\"
A12 = \"1. Sum\"
B2 = \"1. Quarter\"
B4 = #140
B5 = #200
B6 = #170
B7 = \"2. Quarter\"
B8 = #180
B9 = #230
B10 = #100
B12 = =SUM(B2:B10)
";

    #[test]
    fn quarters_sum_skips_labels_and_blank() {
        let r = eval_instance(&inst(QUARTERS)).unwrap();
        // 140 + 200 + 170 + 180 + 230 + 100
        assert_eq!(r.value(a("B12")), Value::Number(1020.0));
        let skipped: Vec<_> = r
            .diagnostics
            .iter()
            .filter_map(|d| match d.kind {
                RuntimeDiagnosticKind::SkippedNonNumeric { skipped, kind } => Some((skipped.to_string(), kind)),
                _ => None,
            })
            .collect();
        assert_eq!(
            skipped,
            [
                ("B2".to_string(), SkippedKind::Text),
                ("B3".to_string(), SkippedKind::Blank),
                ("B7".to_string(), SkippedKind::Text)
            ]
        );
        assert!(r.diagnostics.iter().all(|d| d.cell == a("B12")));
        // every non-empty cell covered, nothing else
        assert_eq!(r.values.len(), 16);
        assert_eq!(r.value(a("B2")), Value::Text("1. Quarter".into()));
    }

    #[test]
    fn sales_two_each_total() {
        let r = eval_instance(&inst("C2 = ?500\nC3 = ?1000\nC4 = ?600\nC5 = ?900\nC6 = =SUM(C2:C5)")).unwrap();
        assert_eq!(r.value(a("C6")), Value::Number(3000.0));
    }

    #[test]
    fn subtotals_subtotals() {
        let r = eval_instance(&inst(
            "C3 = #500\nC4 = #1000\nC5 = #900\nD6 = =SUM(C3:C5)\nC7 = #600\nC8 = #900\nC9 = #1000\nD10 = =SUM(C7:C9)\nD11 = =D6+D10",
        ))
        .unwrap();
        assert_eq!(r.value(a("D6")), Value::Number(2400.0));
        assert_eq!(r.value(a("D10")), Value::Number(2500.0));
        assert_eq!(r.value(a("D11")), Value::Number(4900.0));
    }

    #[test]
    fn division_by_zero() {
        let r = eval_instance(&inst("A1 = #1\nA2 = =A1/(A1-A1)\nA3 = =A2+1")).unwrap();
        assert_eq!(r.value(a("A2")), Value::Fault(FaultKind::DivByZero));
        assert_eq!(r.value(a("A3")), Value::Fault(FaultKind::Propagated));
        assert_eq!(
            r.diagnostics,
            [RuntimeDiagnostic {
                cell: a("A2"),
                kind: RuntimeDiagnosticKind::DivByZero
            }]
        );
    }

    #[test]
    fn blank_and_text_in_arithmetic() {
        let r = eval_instance(&inst("A1 = \"x\"\nB1 = =C1+1\nB2 = =A1*2\nB3 = =C1\nB4 = =-A1")).unwrap();
        assert_eq!(r.value(a("B1")), Value::Number(1.0));
        assert_eq!(r.value(a("B2")), Value::Fault(FaultKind::TypeError));
        assert_eq!(r.value(a("B3")), Value::Number(0.0));
        assert_eq!(r.value(a("B4")), Value::Fault(FaultKind::TypeError));
        assert!(r.diagnostics.contains(&RuntimeDiagnostic {
            cell: a("B1"),
            kind: RuntimeDiagnosticKind::BlankInArithmetic { read: a("C1") }
        }));
    }

    #[test]
    fn grouping_functions() {
        let src = "A1 = #4\nA2 = \"t\"\nA4 = #-2\nA5 = #10\n\
                   B1 = =SUM(A1:A5)\nB2 = =AVG(A1:A5)\nB3 = =MIN(A1:A5)\nB4 = =MAX(A1:A5)\nB5 = =COUNT(A1:A5)\n\
                   B6 = =AVG(A2:A3)\nB7 = =SUM(A2:A3)\nB8 = =MAX(A1,A4,7)\nB9 = =COUNT(A2,A1)\nB10 = =SUM(A1:A1,B2*2)";
        let r = eval_instance(&inst(src)).unwrap();
        let n = |s: &str| r.value(a(s));
        assert_eq!(n("B1"), Value::Number(12.0));
        assert_eq!(n("B2"), Value::Number(4.0));
        assert_eq!(n("B3"), Value::Number(-2.0));
        assert_eq!(n("B4"), Value::Number(10.0));
        assert_eq!(n("B5"), Value::Number(3.0));
        assert_eq!(n("B6"), Value::Fault(FaultKind::DivByZero));
        assert_eq!(n("B7"), Value::Number(0.0));
        assert_eq!(n("B8"), Value::Number(7.0));
        assert_eq!(n("B9"), Value::Number(1.0));
        assert_eq!(n("B10"), Value::Number(12.0));
    }

    #[test]
    fn fault_in_range_propagates() {
        let r = eval_instance(&inst("A1 = #0\nA2 = =1/A1\nA3 = =SUM(A1:A2)\nA4 = =COUNT(A2)")).unwrap();
        assert_eq!(r.value(a("A3")), Value::Fault(FaultKind::Propagated));
        assert_eq!(r.value(a("A4")), Value::Fault(FaultKind::Propagated));
    }

    #[test]
    fn cycles() {
        let i = inst("A1 = =B1\nB1 = =A1\nC1 = #2\nC2 = =C1*2\nD1 = =A1+1");
        let err = eval_instance(&i).unwrap_err();
        assert_eq!(err.cycle, vec![a("A1"), a("B1")]);
        let mut memo = EvalMemo::new(&i);
        assert_eq!(eval_cell(&i, a("D1"), &mut memo).unwrap_err().cycle, vec![a("A1"), a("B1")]);
        let mut memo = EvalMemo::new(&i);
        assert_eq!(eval_cell(&i, a("C2"), &mut memo).unwrap(), Value::Number(4.0));

        let r = eval_instance_lenient(&i);
        assert_eq!(r.value(a("A1")), Value::Fault(FaultKind::Cycle));
        assert_eq!(r.value(a("B1")), Value::Fault(FaultKind::Cycle));
        assert_eq!(r.value(a("D1")), Value::Fault(FaultKind::Propagated));
        assert_eq!(r.value(a("C2")), Value::Number(4.0));
        let cycles: Vec<_> = r
            .diagnostics
            .iter()
            .filter(|d| matches!(d.kind, RuntimeDiagnosticKind::Cycle { .. }))
            .map(|d| d.cell)
            .collect();
        assert_eq!(cycles, [a("A1"), a("B1")]);
    }

    #[test]
    fn eval_cell_agrees() {
        let i = inst(QUARTERS);
        let full = eval_instance(&i).unwrap();
        let mut memo = EvalMemo::new(&i);
        assert_eq!(eval_cell(&i, a("B12"), &mut memo).unwrap(), full.value(a("B12")));
        assert_eq!(eval_cell(&i, a("Z99"), &mut memo).unwrap(), Value::Blank);
        let p = load_program("A1 = ?5\nA2 = =A1*2").unwrap();
        let i = instantiate(p, [(a("A1"), 7.0)]).unwrap();
        let mut memo = EvalMemo::new(&i);
        assert_eq!(eval_cell(&i, a("A1"), &mut memo).unwrap(), Value::Number(7.0));
        assert_eq!(eval_cell(&i, a("A2"), &mut memo).unwrap(), Value::Number(14.0));
    }
}
