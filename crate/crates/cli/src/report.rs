//! Deterministic JSON and CSV report writers.

use std::io::Write;

use hardy_core::catalog::VerificationReport;
use hardy_core::prober::{OpenProblemE, SweepResult};
use serde::Serialize;
use serde_json::{json, Map, Value};

use crate::config::RunConfig;
use crate::CliError;

pub const REPORT_VERSION: &str = "1";

/// Column order of the flat CSV projection for report rows.
pub const REPORT_COLUMNS: [&str; 17] = [
    "case_id", "link", "model", "function", "lhs", "rhs", "ratio", "constant", "deficit", "margin", "slack",
    "lhs_error", "rhs_error", "residual", "r_star", "pass", "error",
];

/// Column order of the CSV projection for sharpness sweeps, one row per point.
pub const SWEEP_COLUMNS: [&str; 14] = [
    "case_id", "model", "parameter", "value", "lhs", "rhs", "ratio", "deficit", "slack", "pass", "limit", "target",
    "relative_gap", "error",
];

/// One entry of the `results` array.
#[derive(Clone, Debug)]
pub enum Row {
    Report {
        report: VerificationReport,
        links: Vec<VerificationReport>,
        open_problem: Option<OpenProblemE>,
        pass: bool,
    },
    Sweep {
        sweep: SweepResult,
        pass: bool,
    },
    Failed {
        case_id: String,
        model: String,
        function: String,
        error: String,
    },
}

impl Row {
    pub fn pass(&self) -> bool {
        match self {
            Row::Report { pass, .. } | Row::Sweep { pass, .. } => *pass,
            Row::Failed { .. } => false,
        }
    }

    fn to_json(&self) -> Result<Value, CliError> {
        Ok(match self {
            Row::Report {
                report,
                links,
                open_problem,
                pass,
            } => {
                let mut v = report_json(report)?;
                let obj = v.as_object_mut().expect("report serializes to an object");
                if !links.is_empty() {
                    let ls = links.iter().map(report_json).collect::<Result<Vec<_>, _>>()?;
                    obj.insert("links".into(), Value::Array(ls));
                }
                if let Some(e) = open_problem {
                    let mut ev = to_value(e)?;
                    ev.as_object_mut()
                        .expect("object")
                        .insert("pass".into(), Value::Bool(open_problem_holds(e)));
                    obj.insert("open_problem_e".into(), ev);
                }
                obj.insert("pass".into(), Value::Bool(*pass));
                obj.insert("error".into(), Value::Null);
                v
            }
            Row::Sweep { sweep, pass } => {
                let mut v = to_value(sweep)?;
                let obj = v.as_object_mut().expect("object");
                obj.insert("all_points_hold".into(), Value::Bool(sweep.all_points_hold()));
                obj.insert("pass".into(), Value::Bool(*pass));
                obj.insert("error".into(), Value::Null);
                v
            }
            Row::Failed {
                case_id,
                model,
                function,
                error,
            } => json!({
                "case_id": case_id,
                "model": model,
                "function": function,
                "pass": false,
                "error": error,
            }),
        })
    }
}

pub fn open_problem_holds(e: &OpenProblemE) -> bool {
    e.value >= e.lower_bound - e.slack
}

fn to_value<T: Serialize>(v: &T) -> Result<Value, CliError> {
    serde_json::to_value(v).map_err(|e| CliError::Io(e.to_string()))
}

fn report_json(r: &VerificationReport) -> Result<Value, CliError> {
    let mut v = to_value(r)?;
    let obj = v.as_object_mut().expect("object");
    obj.insert(
        "error_estimates".into(),
        json!({ "lhs": finite(r.lhs_error), "rhs": finite(r.rhs_error) }),
    );
    Ok(v)
}

fn finite(x: f64) -> Value {
    serde_json::Number::from_f64(x).map(Value::Number).unwrap_or(Value::Null)
}

pub fn document(config: &RunConfig, rows: &[Row]) -> Result<Value, CliError> {
    let results = rows.iter().map(Row::to_json).collect::<Result<Vec<_>, _>>()?;
    let mut top = Map::new();
    top.insert("version".into(), Value::String(REPORT_VERSION.into()));
    top.insert("config".into(), to_value(config)?);
    top.insert("results".into(), Value::Array(results));
    Ok(Value::Object(top))
}

/// Pretty JSON with sorted keys and every float in `{:.16e}` form.
pub fn write_json<W: Write>(out: &mut W, v: &Value) -> std::io::Result<()> {
    emit(out, v, 0)?;
    out.write_all(b"\n")
}

fn emit<W: Write>(out: &mut W, v: &Value, depth: usize) -> std::io::Result<()> {
    let pad = |d: usize| "  ".repeat(d);
    match v {
        Value::Null => out.write_all(b"null"),
        Value::Bool(b) => write!(out, "{b}"),
        Value::Number(n) => match (n.as_u64(), n.as_i64(), n.as_f64()) {
            (Some(u), _, _) if !n.is_f64() => write!(out, "{u}"),
            (_, Some(i), _) if !n.is_f64() => write!(out, "{i}"),
            (_, _, Some(f)) => write!(out, "{}", fmt_f64(f)),
            _ => write!(out, "{n}"),
        },
        Value::String(s) => write!(out, "{}", Value::String(s.clone())),
        Value::Array(a) if a.is_empty() => out.write_all(b"[]"),
        Value::Array(a) => {
            out.write_all(b"[\n")?;
            for (i, x) in a.iter().enumerate() {
                out.write_all(pad(depth + 1).as_bytes())?;
                emit(out, x, depth + 1)?;
                out.write_all(if i + 1 < a.len() { b",\n" } else { b"\n" })?;
            }
            write!(out, "{}]", pad(depth))
        }
        Value::Object(m) if m.is_empty() => out.write_all(b"{}"),
        Value::Object(m) => {
            out.write_all(b"{\n")?;
            let mut keys: Vec<&String> = m.keys().collect();
            keys.sort();
            for (i, k) in keys.iter().enumerate() {
                write!(out, "{}{}: ", pad(depth + 1), Value::String((*k).clone()))?;
                emit(out, &m[*k], depth + 1)?;
                out.write_all(if i + 1 < keys.len() { b",\n" } else { b"\n" })?;
            }
            write!(out, "{}}}", pad(depth))
        }
    }
}

/// 17 significant digits, enough to round-trip any f64.
pub fn fmt_f64(x: f64) -> String {
    if x.is_finite() {
        format!("{x:.16e}")
    } else {
        "null".into()
    }
}

fn opt(x: Option<f64>) -> String {
    x.map(fmt_f64).unwrap_or_default()
}

fn report_record(r: &VerificationReport, pass: bool) -> Vec<String> {
    vec![
        r.case_id.to_string(),
        r.link.map(|l| l.to_string()).unwrap_or_default(),
        r.model.clone(),
        r.function.clone(),
        fmt_f64(r.lhs),
        fmt_f64(r.rhs),
        fmt_f64(r.ratio),
        fmt_f64(r.constant),
        fmt_f64(r.deficit),
        fmt_f64(r.margin),
        fmt_f64(r.slack),
        fmt_f64(r.lhs_error),
        fmt_f64(r.rhs_error),
        opt(r.residual),
        opt(r.r_star),
        pass.to_string(),
        String::new(),
    ]
}

pub fn write_csv<W: Write>(out: W, rows: &[Row]) -> Result<(), CliError> {
    let io = |e: csv::Error| CliError::Io(e.to_string());
    let mut w = csv::Writer::from_writer(out);
    let sweeps = rows.iter().any(|r| matches!(r, Row::Sweep { .. }));
    if sweeps {
        w.write_record(SWEEP_COLUMNS).map_err(io)?;
    } else {
        w.write_record(REPORT_COLUMNS).map_err(io)?;
    }
    for row in rows {
        match row {
            Row::Report { report, links, pass, .. } => {
                w.write_record(report_record(report, *pass)).map_err(io)?;
                for l in links {
                    w.write_record(report_record(l, l.pass)).map_err(io)?;
                }
            }
            Row::Sweep { sweep, .. } => {
                for pt in &sweep.points {
                    w.write_record([
                        sweep.case_id.to_string(),
                        sweep.model.clone(),
                        sweep.parameter.clone(),
                        fmt_f64(pt.value),
                        fmt_f64(pt.lhs),
                        fmt_f64(pt.rhs),
                        opt(pt.ratio),
                        fmt_f64(pt.deficit),
                        fmt_f64(pt.slack),
                        pt.pass.to_string(),
                        fmt_f64(sweep.limit),
                        fmt_f64(sweep.target),
                        fmt_f64(sweep.relative_gap),
                        pt.error.clone().unwrap_or_default(),
                    ])
                    .map_err(io)?;
                }
            }
            Row::Failed {
                case_id,
                model,
                function,
                error,
            } => {
                let mut rec = vec![String::new(); if sweeps { SWEEP_COLUMNS.len() } else { REPORT_COLUMNS.len() }];
                rec[0] = case_id.clone();
                if sweeps {
                    rec[1] = model.clone();
                    rec[9] = "false".into();
                } else {
                    rec[2] = model.clone();
                    rec[3] = function.clone();
                    rec[15] = "false".into();
                }
                *rec.last_mut().expect("nonempty") = error.clone();
                w.write_record(&rec).map_err(io)?;
            }
        }
    }
    w.flush().map_err(|e| CliError::Io(e.to_string()))
}
