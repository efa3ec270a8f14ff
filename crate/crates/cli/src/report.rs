//! Report assembly and rendering.
//!
//! JSON goes through `serde_json::Value`, whose maps keep keys sorted, so the
//! rendering is canonical: same report, same bytes.

use std::fmt::Write as _;

use gridaudit_core::{
    CellAddress, CellKind, Diagnostic, Interval, IntervalValue, LogicalArea, PhysicalArea, Severity,
    SpreadsheetProgram, TestRecord, TestReport, Value,
};
use serde_json::{json, Map, Value as Json};
use sha2::{Digest, Sha256};

pub const SCHEMA_ID: &str = "gridaudit-report/1";

/// An input file as named on the command line, with its digest.
#[derive(Debug, Clone)]
pub struct InputFile {
    pub path: String,
    pub sha256: String,
}

impl InputFile {
    pub fn new(path: &str, bytes: &[u8]) -> Self {
        InputFile {
            path: path.to_string(),
            sha256: hex::encode(Sha256::digest(bytes)),
        }
    }
}

#[derive(Debug, Clone, Default)]
pub struct Report {
    pub command: String,
    pub inputs: Vec<InputFile>,
    pub summary: Option<Summary>,
    pub physical: Option<Vec<PhysicalArea>>,
    pub logical: Option<Vec<LogicalArea>>,
    pub diagnostics: Option<Vec<Diagnostic>>,
    pub test: Option<TestReport>,
}

#[derive(Debug, Clone)]
pub struct Summary {
    pub counts: Vec<(CellKind, usize)>,
    pub total: usize,
}

impl Summary {
    pub fn of(program: &SpreadsheetProgram) -> Self {
        let by_kind = program.count_by_kind();
        let counts = [CellKind::Constant, CellKind::Input, CellKind::Formula, CellKind::Label]
            .into_iter()
            .map(|k| (k, by_kind.get(&k).copied().unwrap_or(0)))
            .collect();
        Summary {
            counts,
            total: program.len(),
        }
    }
}

fn cells(list: &[CellAddress]) -> Json {
    list.iter().map(|a| Json::String(a.to_string())).collect()
}

fn number(v: f64) -> Json {
    // Non-finite values have no JSON number form.
    serde_json::Number::from_f64(v).map_or(Json::Null, Json::Number)
}

fn value_json(v: &Value) -> Json {
    match v {
        Value::Number(x) => json!({"kind": "number", "value": number(*x)}),
        Value::Blank => json!({"kind": "blank"}),
        Value::Text(t) => json!({"kind": "text", "value": t}),
        Value::Fault(k) => json!({"kind": "fault", "fault": k.to_string()}),
    }
}

fn interval_json(i: &Interval) -> Json {
    json!({"lo": number(i.lo()), "hi": number(i.hi())})
}

fn bound_json(b: &IntervalValue) -> Json {
    match b {
        IntervalValue::Interval(i) => json!({"kind": "interval", "lo": number(i.lo()), "hi": number(i.hi())}),
        IntervalValue::Blank => json!({"kind": "blank"}),
        IntervalValue::Text => json!({"kind": "text"}),
        IntervalValue::Fault(k) => json!({"kind": "fault", "fault": k.to_string()}),
    }
}

fn record_json(r: &TestRecord) -> Json {
    json!({
        "cell": r.cell.to_string(),
        "d": value_json(&r.d),
        "e": r.e.as_ref().map_or(Json::Null, interval_json),
        "b": bound_json(&r.b),
        "verdict": r.verdict.to_string(),
        "reason": r.reason,
        "suspects": cells(&r.suspects),
    })
}

impl Report {
    pub fn to_json(&self) -> Json {
        let mut root = Map::new();
        root.insert("schema".into(), json!(SCHEMA_ID));
        root.insert(
            "tool".into(),
            json!({"name": "gridaudit", "version": env!("CARGO_PKG_VERSION")}),
        );
        root.insert("command".into(), json!(self.command));
        root.insert(
            "inputs".into(),
            self.inputs
                .iter()
                .map(|f| json!({"path": f.path, "sha256": f.sha256}))
                .collect(),
        );
        if let Some(s) = &self.summary {
            let mut counts = Map::new();
            for (k, n) in &s.counts {
                counts.insert(k.name().to_string(), json!(n));
            }
            root.insert("summary".into(), json!({"cells": counts, "total": s.total}));
        }
        if self.physical.is_some() || self.logical.is_some() {
            let physical: Vec<Json> = self
                .physical
                .iter()
                .flatten()
                .map(|p| serde_json::to_value(p).expect("serializable"))
                .collect();
            let logical: Vec<Json> = self
                .logical
                .iter()
                .flatten()
                .map(|l| json!({"members": cells(&l.members), "hull": l.hull.to_string()}))
                .collect();
            root.insert("areas".into(), json!({"physical": physical, "logical": logical}));
        }
        if let Some(ds) = &self.diagnostics {
            root.insert("diagnostics".into(), serde_json::to_value(ds).expect("serializable"));
        }
        if let Some(t) = &self.test {
            root.insert(
                "test".into(),
                json!({
                    "records": t.records.iter().map(record_json).collect::<Vec<_>>(),
                    "symptoms": t.symptoms().count(),
                }),
            );
        }
        Json::Object(root)
    }

    pub fn render_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(&self.to_json()).expect("serializable");
        s.push('\n');
        s
    }

    pub fn render_text(&self) -> String {
        let mut out = String::new();
        let path = self.inputs.first().map_or("", |f| f.path.as_str());
        if let Some(s) = &self.summary {
            let parts: Vec<String> = s.counts.iter().map(|(k, n)| format!("{n} {k}")).collect();
            let _ = writeln!(out, "{path}: {} cells ({})", s.total, parts.join(", "));
        }
        if let Some(physical) = &self.physical {
            let _ = writeln!(out, "physical areas: {}", physical.len());
            for p in physical {
                let majority = p.majority_type.map_or("empty".to_string(), |k| k.to_string());
                let _ = writeln!(out, "  {:<12} {} -> {} ({majority})", p.rect.to_string(), p.function, p.consumer);
            }
        }
        if let Some(logical) = &self.logical {
            let _ = writeln!(out, "logical areas: {}", logical.len());
            for l in logical {
                let members: Vec<_> = l.members.iter().map(|m| m.to_string()).collect();
                let _ = writeln!(out, "  {:<12} {}", l.hull.to_string(), members.join(", "));
            }
        }
        if let Some(ds) = &self.diagnostics {
            for d in ds {
                let _ = writeln!(out, "{}[{}] {}: {}", d.severity, d.code, d.location(), d.message);
            }
            let errors = ds.iter().filter(|d| d.severity == Severity::Error).count();
            let _ = writeln!(
                out,
                "{} finding(s): {errors} error(s), {} warning(s)",
                ds.len(),
                ds.len() - errors
            );
        }
        if let Some(t) = &self.test {
            for r in &t.records {
                let e = r.e.map_or("-".to_string(), |e| e.to_string());
                let _ = write!(out, "{:<6} d={}  E={e}  B={}  {}", r.cell.to_string(), r.d, r.b, r.verdict);
                if let Some(reason) = &r.reason {
                    let _ = write!(out, " ({reason})");
                }
                if !r.suspects.is_empty() {
                    let s: Vec<_> = r.suspects.iter().map(|a| a.to_string()).collect();
                    let _ = write!(out, "  suspects: {}", s.join(", "));
                }
                out.push('\n');
            }
            let judged = t.records.iter().filter(|r| r.e.is_some()).count();
            let _ = writeln!(
                out,
                "{} formula cell(s), {judged} judged, {} with symptoms",
                t.records.len(),
                t.symptoms().count()
            );
        }
        out
    }
}
