//! Trace files: a line-oriented text format and a JSON equivalent.
//!
//! ```text
//! processes p1 p2 p3
//! objects x y
//! values v1 v2
//! op a p1 2 5 write x ival=v1 oval=_
//! op b p1 10 14 read x ival=_ oval=v1
//! vis a b
//! ar a b
//! ```
//!
//! Timestamps are decimals or `num/den` rationals; `_` is the empty value and
//! `undef` the undefined one. `#` starts a comment. Parse → serialize → parse
//! is the identity on structures.

pub mod gen;

use crate::history::{
    AbstractExecution, ExecError, History, HistoryError, MetaParams, OpId, OpType, OpVal,
    Operation, Time, Violation,
};
use serde::{Deserialize, Serialize};
use std::collections::BTreeSet;
use thiserror::Error;

/// A parsed trace: a bare history, or an abstract execution when the file
/// carries `vis`/`ar` lines.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Trace {
    History(History),
    Exec(AbstractExecution),
}

impl Trace {
    pub fn history(&self) -> &History {
        match self {
            Trace::History(h) => h,
            Trace::Exec(x) => &x.history,
        }
    }

    pub fn as_exec(&self) -> Option<&AbstractExecution> {
        match self {
            Trace::Exec(x) => Some(x),
            Trace::History(_) => None,
        }
    }
}

#[derive(Debug, Error)]
pub enum TraceError {
    #[error("line {0}: {1}")]
    Syntax(usize, String),
    #[error(transparent)]
    History(#[from] HistoryError),
    #[error(transparent)]
    Exec(#[from] ExecError),
    #[error("invalid history: {}", format_violations(.0))]
    Invalid(Vec<Violation>),
    #[error("json: {0}")]
    Json(#[from] serde_json::Error),
}

fn format_violations(vs: &[Violation]) -> String {
    vs.iter()
        .map(|v| v.to_string())
        .collect::<Vec<_>>()
        .join("; ")
}

/// Parses and validates a text trace.
pub fn parse_trace(text: &str) -> Result<Trace, TraceError> {
    let trace = parse_trace_unvalidated(text)?;
    let violations = trace.history().validate();
    if !violations.is_empty() {
        return Err(TraceError::Invalid(violations));
    }
    Ok(trace)
}

/// Parses without running the history validator; used by `validate` to
/// report violations instead of failing.
pub fn parse_trace_unvalidated(text: &str) -> Result<Trace, TraceError> {
    let mut processes: Option<Vec<String>> = None;
    let mut objects: Option<Vec<String>> = None;
    let mut values: Option<Vec<String>> = None;
    struct RawOp {
        line: usize,
        id: String,
        proc: String,
        stime: Time,
        rtime: Time,
        kind: OpType,
        obj: String,
        ival: String,
        oval: String,
    }
    let mut raw_ops: Vec<RawOp> = Vec::new();
    let mut vis_lines: Vec<(usize, String, String)> = Vec::new();
    let mut ar_lines: Vec<(usize, String, String)> = Vec::new();

    for (ix, line) in text.lines().enumerate() {
        let lineno = ix + 1;
        let line = line.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let mut parts = line.split_whitespace();
        let head = parts.next().unwrap();
        let rest: Vec<&str> = parts.collect();
        let err = |msg: &str| TraceError::Syntax(lineno, msg.to_string());
        match head {
            "processes" | "objects" | "values" => {
                let list = rest.iter().map(|s| s.to_string()).collect();
                let slot = match head {
                    "processes" => &mut processes,
                    "objects" => &mut objects,
                    _ => &mut values,
                };
                if slot.is_some() {
                    return Err(err(&format!("duplicate `{head}` header")));
                }
                *slot = Some(list);
            }
            "op" => {
                if rest.len() != 8 {
                    return Err(err(
                        "expected `op <id> <proc> <stime> <rtime> <read|write> <obj> ival=<v|_> oval=<v|_|undef>`",
                    ));
                }
                let kind = match rest[4] {
                    "read" => OpType::Read,
                    "write" => OpType::Write,
                    other => return Err(err(&format!("unknown operation type `{other}`"))),
                };
                let ival = rest[6]
                    .strip_prefix("ival=")
                    .ok_or_else(|| err("expected `ival=...`"))?;
                let oval = rest[7]
                    .strip_prefix("oval=")
                    .ok_or_else(|| err("expected `oval=...`"))?;
                raw_ops.push(RawOp {
                    line: lineno,
                    id: rest[0].to_string(),
                    proc: rest[1].to_string(),
                    stime: Time::parse(rest[2]).map_err(|e| err(&e.to_string()))?,
                    rtime: Time::parse(rest[3]).map_err(|e| err(&e.to_string()))?,
                    kind,
                    obj: rest[5].to_string(),
                    ival: ival.to_string(),
                    oval: oval.to_string(),
                });
            }
            "vis" | "ar" => {
                if rest.len() != 2 {
                    return Err(err(&format!("expected `{head} <id> <id>`")));
                }
                let entry = (lineno, rest[0].to_string(), rest[1].to_string());
                if head == "vis" {
                    vis_lines.push(entry);
                } else {
                    ar_lines.push(entry);
                }
            }
            other => return Err(err(&format!("unknown directive `{other}`"))),
        }
    }

    let meta = MetaParams::new(
        processes.unwrap_or_default(),
        objects.unwrap_or_default(),
        values.unwrap_or_else(|| vec!["v1".to_string()]),
    )
    .map_err(HistoryError::from)?;

    let mut ops = Vec::new();
    for raw in raw_ops {
        let err = |msg: String| TraceError::Syntax(raw.line, msg);
        let proc = meta
            .proc_id(&raw.proc)
            .ok_or_else(|| err(format!("unknown process `{}`", raw.proc)))?;
        let obj = meta
            .obj_id(&raw.obj)
            .ok_or_else(|| err(format!("unknown object `{}`", raw.obj)))?;
        let parse_val = |s: &str, allow_undef: bool| -> Result<OpVal, TraceError> {
            match s {
                "_" => Ok(OpVal::Empty),
                "undef" if allow_undef => Ok(OpVal::Undef),
                name => meta
                    .val_id(name)
                    .map(OpVal::Val)
                    .ok_or_else(|| err(format!("unknown value `{name}`"))),
            }
        };
        let ival = parse_val(&raw.ival, false)?;
        let oval = parse_val(&raw.oval, true)?;
        ops.push(Operation {
            id: OpId::new(raw.id),
            proc,
            stime: raw.stime,
            rtime: raw.rtime,
            kind: raw.kind,
            obj,
            ival,
            oval,
        });
    }
    let history = History::new(meta, ops)?;

    if vis_lines.is_empty() && ar_lines.is_empty() {
        return Ok(Trace::History(history));
    }
    let resolve = |lines: Vec<(usize, String, String)>| -> Result<BTreeSet<(usize, usize)>, TraceError> {
        let mut out = BTreeSet::new();
        for (lineno, a, b) in lines {
            let a = history
                .index_of(&OpId::new(a.clone()))
                .ok_or_else(|| TraceError::Syntax(lineno, format!("unknown operation `{a}`")))?;
            let b = history
                .index_of(&OpId::new(b.clone()))
                .ok_or_else(|| TraceError::Syntax(lineno, format!("unknown operation `{b}`")))?;
            out.insert((a, b));
        }
        Ok(out)
    };
    let vis = resolve(vis_lines)?;
    let ar = resolve(ar_lines)?;
    Ok(Trace::Exec(AbstractExecution::new(history, vis, ar)?))
}

fn val_str(meta: &MetaParams, v: OpVal) -> String {
    match v {
        OpVal::Empty => "_".to_string(),
        OpVal::Undef => "undef".to_string(),
        OpVal::Val(id) => meta.values[id.0].clone(),
    }
}

/// Canonical text serialization.
pub fn serialize_trace(trace: &Trace) -> String {
    let h = trace.history();
    let meta = h.meta();
    let mut out = String::new();
    out.push_str(&format!("processes {}\n", meta.processes.join(" ")));
    out.push_str(&format!("objects {}\n", meta.objects.join(" ")));
    out.push_str(&format!("values {}\n", meta.values.join(" ")));
    for op in h.ops() {
        out.push_str(&format!(
            "op {} {} {} {} {} {} ival={} oval={}\n",
            op.id,
            meta.processes[op.proc.0],
            op.stime,
            op.rtime,
            op.kind,
            meta.objects[op.obj.0],
            val_str(meta, op.ival),
            val_str(meta, op.oval),
        ));
    }
    if let Trace::Exec(x) = trace {
        for &(a, b) in &x.vis {
            out.push_str(&format!("vis {} {}\n", h.op(a).id, h.op(b).id));
        }
        for &(a, b) in &x.ar {
            out.push_str(&format!("ar {} {}\n", h.op(a).id, h.op(b).id));
        }
    }
    out
}

#[derive(Debug, Serialize, Deserialize)]
struct TraceJson {
    processes: Vec<String>,
    objects: Vec<String>,
    values: Vec<String>,
    ops: Vec<OpJson>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    vis: Vec<(String, String)>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    ar: Vec<(String, String)>,
}

#[derive(Debug, Serialize, Deserialize)]
struct OpJson {
    id: String,
    proc: String,
    stime: String,
    rtime: String,
    #[serde(rename = "type")]
    kind: String,
    obj: String,
    ival: String,
    oval: String,
}

/// JSON form of the same structure; accepted wherever the text format is.
pub fn to_json(trace: &Trace) -> String {
    let h = trace.history();
    let meta = h.meta();
    let ops = h
        .ops()
        .iter()
        .map(|op| OpJson {
            id: op.id.0.clone(),
            proc: meta.processes[op.proc.0].clone(),
            stime: op.stime.to_string(),
            rtime: op.rtime.to_string(),
            kind: op.kind.to_string(),
            obj: meta.objects[op.obj.0].clone(),
            ival: val_str(meta, op.ival),
            oval: val_str(meta, op.oval),
        })
        .collect();
    let (vis, ar) = match trace {
        Trace::History(_) => (Vec::new(), Vec::new()),
        Trace::Exec(x) => {
            let name = |ix: usize| h.op(ix).id.0.clone();
            (
                x.vis.iter().map(|&(a, b)| (name(a), name(b))).collect(),
                x.ar.iter().map(|&(a, b)| (name(a), name(b))).collect(),
            )
        }
    };
    serde_json::to_string_pretty(&TraceJson {
        processes: meta.processes.clone(),
        objects: meta.objects.clone(),
        values: meta.values.clone(),
        ops,
        vis,
        ar,
    })
    .expect("trace serialization cannot fail")
}

pub fn from_json(text: &str) -> Result<Trace, TraceError> {
    let raw: TraceJson = serde_json::from_str(text)?;
    // Reuse the text-path resolution by rendering to the line format.
    let mut lines = String::new();
    lines.push_str(&format!("processes {}\n", raw.processes.join(" ")));
    lines.push_str(&format!("objects {}\n", raw.objects.join(" ")));
    lines.push_str(&format!("values {}\n", raw.values.join(" ")));
    for op in &raw.ops {
        lines.push_str(&format!(
            "op {} {} {} {} {} {} ival={} oval={}\n",
            op.id, op.proc, op.stime, op.rtime, op.kind, op.obj, op.ival, op.oval
        ));
    }
    for (a, b) in &raw.vis {
        lines.push_str(&format!("vis {a} {b}\n"));
    }
    for (a, b) in &raw.ar {
        lines.push_str(&format!("ar {a} {b}\n"));
    }
    parse_trace(&lines)
}

/// Dispatches on a leading `{` to accept either format.
pub fn parse_any(text: &str) -> Result<Trace, TraceError> {
    if text.trim_start().starts_with('{') {
        from_json(text)
    } else {
        parse_trace(text)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const FIG1: &str = "\
processes p1 p2 p3
objects x y
values v1 v2
op a p1 2 5 write x ival=v1 oval=_
op b p1 10 14 read x ival=_ oval=v1
op c p1 15.5 18 read x ival=_ oval=v2
op d p2 3 7 write x ival=v2 oval=_
op e p2 12 17 read x ival=_ oval=v2
op f p3 8 11 write y ival=v1 oval=_
";

    #[test]
    fn parses_fig1_text() {
        let t = parse_trace(FIG1).unwrap();
        let h = t.history();
        assert_eq!(h.len(), 6);
        assert_eq!(h.by_id(&OpId::new("c")).unwrap().stime, Time::new(31, 2));
        assert_eq!(*h, crate::testutil::fig1());
    }

    #[test]
    fn empty_file_is_an_empty_history() {
        // Headers absent: values get a default singleton universe, but the
        // processes/objects lists must be present for any op to parse.
        let t = parse_trace("processes p1\nobjects x\nvalues v1\n").unwrap();
        assert!(t.history().is_empty());
    }

    #[test]
    fn text_round_trip() {
        let t = parse_trace(FIG1).unwrap();
        let s = serialize_trace(&t);
        let t2 = parse_trace(&s).unwrap();
        assert_eq!(t, t2);
    }

    #[test]
    fn json_round_trip() {
        let t = parse_trace(FIG1).unwrap();
        let j = to_json(&t);
        let t2 = parse_any(&j).unwrap();
        assert_eq!(t, t2);
    }

    #[test]
    fn relation_lines_build_an_execution() {
        let text = "\
processes p1 p2
objects x
values v1
op a p1 1 2 write x ival=v1 oval=_
op b p2 3 4 read x ival=_ oval=v1
vis a b
ar a b
";
        let t = parse_trace(text).unwrap();
        let x = t.as_exec().unwrap();
        assert!(x.vis.contains(&(0, 1)));
        assert!(x.is_real_time());
        let s = serialize_trace(&t);
        assert_eq!(parse_trace(&s).unwrap(), t);
    }

    #[test]
    fn syntax_errors_carry_line_numbers() {
        let text = "processes p1\nobjects x\nvalues v1\nop broken\n";
        match parse_trace(text) {
            Err(TraceError::Syntax(4, _)) => {}
            other => panic!("expected syntax error on line 4, got {other:?}"),
        }
    }

    #[test]
    fn invalid_histories_are_rejected() {
        let text = "\
processes p1
objects x
values v1
op a p1 5 5 write x ival=v1 oval=_
";
        assert!(matches!(parse_trace(text), Err(TraceError::Invalid(_))));
        assert!(parse_trace_unvalidated(text).is_ok());
    }
}
