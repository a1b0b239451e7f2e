//! Artifact writers: trace CSV, verdict JSON, summary JSON, split-report
//! JSON. All float formatting uses the shortest representation that
//! round-trips exactly, so repeated runs produce byte-identical files.

use crate::comb_geometry::SplitReport;
use crate::complex_core::unwrap_argument_lossy;
use crate::radial_probe::{AeStatistics, RadialTrace, TraceKind, TraceVerdict};
use serde_json::{json, Map, Value};
use std::io::Write;
use std::path::Path;

/// Shortest decimal representation that parses back to the same f64
/// (Rust's `Display` for floats guarantees the round trip).
pub fn fmt_f64(x: f64) -> String {
    if x == 0.0 && x.is_sign_negative() {
        // normalize -0.0 so artifacts do not depend on sign-of-zero noise
        return "0".to_string();
    }
    format!("{}", x)
}

/// Write traces as CSV with columns
/// `theta,eps,re,im,modulus,arg_unwrapped`; the unwrapped argument is
/// continuous per trace (best effort across fast cycles).
pub fn write_trace_csv(path: &Path, traces: &[RadialTrace]) -> std::io::Result<()> {
    let mut out = String::from("theta,eps,re,im,modulus,arg_unwrapped\n");
    for trace in traces {
        let args = unwrap_argument_lossy(&trace.values);
        for (i, &eps) in trace.schedule.iter().enumerate() {
            let v = trace.values[i];
            out.push_str(&format!(
                "{},{},{},{},{},{}\n",
                fmt_f64(trace.theta),
                fmt_f64(eps),
                fmt_f64(v.re),
                fmt_f64(v.im),
                fmt_f64(v.norm()),
                fmt_f64(args[i]),
            ));
        }
    }
    write_atomic(path, out.as_bytes())
}

fn verdict_value(v: &TraceVerdict) -> Value {
    let mut m = Map::new();
    m.insert("theta".into(), json!(v.theta));
    m.insert("kind".into(), json!(v.kind.label()));
    m.insert("tail_diameter".into(), json!(v.tail_diameter));
    m.insert("window".into(), json!(v.window));
    if let TraceKind::Converged { limit } = &v.kind {
        m.insert("limit".into(), json!([limit.re, limit.im]));
    }
    Value::Object(m)
}

pub fn write_verdicts_json(path: &Path, verdicts: &[TraceVerdict]) -> std::io::Result<()> {
    let value = Value::Array(verdicts.iter().map(verdict_value).collect());
    write_json(path, &value)
}

pub fn stats_value(stats: &AeStatistics) -> Value {
    json!({
        "total": stats.total,
        "converged": stats.converged,
        "oscillating": stats.oscillating,
        "inconclusive": stats.inconclusive,
        "min_modulus": nan_to_null(stats.min_modulus),
        "median_modulus": nan_to_null(stats.median_modulus),
        "unimodular_fraction": nan_to_null(stats.unimodular_fraction),
    })
}

fn nan_to_null(x: f64) -> Value {
    if x.is_nan() {
        Value::Null
    } else {
        json!(x)
    }
}

pub fn split_report_value(report: &SplitReport, stable: bool) -> Value {
    let mut adjacency = Map::new();
    for (id, slits) in &report.adjacency {
        adjacency.insert(id.to_string(), json!(slits));
    }
    json!({
        "components": report.components,
        "adjacency": Value::Object(adjacency),
        "grid": report.grid,
        "even_component": report.even_component.map(|(id, t)| json!({"component": id, "threshold": t})),
        "odd_component": report.odd_component.map(|(id, t)| json!({"component": id, "threshold": t})),
        "pass": report.pass,
        "stable": stable,
    })
}

/// Serialize with sorted keys (serde_json's default map is ordered) and a
/// trailing newline.
pub fn write_json(path: &Path, value: &Value) -> std::io::Result<()> {
    let mut text = serde_json::to_string_pretty(value)?.into_bytes();
    text.push(b'\n');
    write_atomic(path, &text)
}

fn write_atomic(path: &Path, bytes: &[u8]) -> std::io::Result<()> {
    if let Some(dir) = path.parent() {
        std::fs::create_dir_all(dir)?;
    }
    let mut f = std::fs::File::create(path)?;
    f.write_all(bytes)?;
    f.flush()
}
