//! Static analysis and interval testing for spreadsheet programs.
//!
//! A `.sheet` file is loaded into a [`SpreadsheetProgram`]; binding its input
//! cells gives a [`SpreadsheetInstance`] that can be evaluated. On top of
//! that sit area inference ([`areas`]), the fault detectors ([`detect`]) and
//! interval testing ([`oracle`]).

pub mod address;
pub mod areas;
pub mod dataflow;
pub mod detect;
pub mod eval;
pub mod formula;
pub mod interval;
pub mod normalize;
pub mod oracle;
pub mod sheet;
#[cfg(feature = "testing")]
pub mod testing;

pub use address::{parse_address, CellAddress, CellRef, MalformedAddress, RangeRef, Rect};
pub use areas::{infer_logical_areas, infer_physical_areas, structural_groups, LogicalArea, PhysicalArea};
pub use dataflow::{build_graph, CyclicDependency, DependencyGraph};
pub use detect::{detect_all, detect_all_with, Code, DetectorConfig, Diagnostic, RelatedArea, Severity};
pub use eval::{eval_cell, eval_instance, eval_instance_lenient, EvalMemo, EvalResult, FaultKind, Value};
pub use formula::{parse_formula, BinaryOp, Expr, FormulaError, Function};
pub use interval::{iv_aggregate, iv_binop, Interval, IntervalError};
pub use normalize::{normalize, NormalizedExpr};
pub use oracle::{
    eval_intervals, eval_intervals_for, judge, parse_interval_spec, run_interval_test, IntervalFault, IntervalSpec,
    IntervalValue, SpecError, TestRecord, TestReport, Verdict,
};
pub use sheet::{instantiate, load_program, CellContent, CellKind, LoadError, SpreadsheetInstance, SpreadsheetProgram};
