//! Report emission and the report schema.
//!
//! A report is one JSON object per analysis with sorted keys and every float
//! written as `{:.16e}` (17 significant digits). Non-finite values become
//! `null`. The top-level keys are:
//!
//! | key | type |
//! |---|---|
//! | `schema` | the string `formlab-report/1` |
//! | `scenario` | string |
//! | `analysis` | one of the analysis names |
//! | `status` | `completed`, `no_convergence` or `error` |
//! | `error` | string or null |
//! | `seed` | integer |
//! | `grid` | object with `dim`, `side`, `inner_fraction` |
//! | `levels` | array of level objects |
//!
//! Each level has `points` (integer), `spacing` (number), `result` (object),
//! `quantities` (object of numbers or nulls) and `sidecars` (array of file
//! names of binary witness fields in the same directory).

use std::collections::BTreeMap;
use std::io::{self, Write};

use serde::Serialize;
use serde_json::ser::Formatter;
use serde_json::{json, Map, Value};

use crate::scenario::ANALYSES;

pub const SCHEMA: &str = "formlab-report/1";

pub const STATUSES: [&str; 3] = ["completed", "no_convergence", "error"];

struct FixedFloats;

impl Formatter for FixedFloats {
    fn write_f64<W: ?Sized + Write>(&mut self, writer: &mut W, value: f64) -> io::Result<()> {
        write!(writer, "{value:.16e}")
    }

    fn write_f32<W: ?Sized + Write>(&mut self, writer: &mut W, value: f32) -> io::Result<()> {
        self.write_f64(writer, value as f64)
    }
}

/// Serializes `value` with sorted keys and 17 significant digits.
pub fn to_json_bytes<T: Serialize>(value: &T) -> serde_json::Result<Vec<u8>> {
    // Going through `Value` sorts the keys and maps non-finite floats to null.
    let value = serde_json::to_value(value)?;
    let mut out = Vec::new();
    let mut ser = serde_json::Serializer::with_formatter(&mut out, FixedFloats);
    value.serialize(&mut ser)?;
    out.push(b'\n');
    Ok(out)
}

/// Finite values only; everything else maps to `null`.
pub fn number(v: f64) -> Value {
    serde_json::Number::from_f64(v).map_or(Value::Null, Value::Number)
}

#[derive(Debug, Clone)]
pub struct LevelReport {
    pub points: usize,
    pub spacing: f64,
    pub result: Value,
    pub quantities: BTreeMap<String, f64>,
    pub sidecars: Vec<String>,
}

impl LevelReport {
    pub fn to_value(&self) -> Value {
        let quantities: Map<String, Value> = self.quantities.iter().map(|(k, v)| (k.clone(), number(*v))).collect();
        json!({
            "points": self.points,
            "spacing": number(self.spacing),
            "result": self.result,
            "quantities": quantities,
            "sidecars": self.sidecars,
        })
    }
}

/// CSV trace of one quantity: `points,spacing,value`, one row per level.
pub fn csv_trace(levels: &[LevelReport], quantity: &str) -> String {
    let mut out = String::from("points,spacing,value\n");
    for l in levels {
        if let Some(v) = l.quantities.get(quantity) {
            out.push_str(&format!("{},{:.16e},{:.16e}\n", l.points, l.spacing, v));
        }
    }
    out
}

/// Checks a parsed report against the schema above.
pub fn validate(report: &Value) -> Result<(), Vec<String>> {
    let mut errs = Vec::new();
    let Some(obj) = report.as_object() else {
        return Err(vec!["report is not an object".into()]);
    };
    let keys = ["analysis", "error", "grid", "levels", "scenario", "schema", "seed", "status"];
    for k in keys {
        if !obj.contains_key(k) {
            errs.push(format!("missing key `{k}`"));
        }
    }
    for k in obj.keys() {
        if !keys.contains(&k.as_str()) {
            errs.push(format!("unexpected key `{k}`"));
        }
    }
    if obj.get("schema").and_then(Value::as_str) != Some(SCHEMA) {
        errs.push(format!("`schema` must be \"{SCHEMA}\""));
    }
    if obj.get("scenario").is_some_and(|v| !v.is_string()) {
        errs.push("`scenario` must be a string".into());
    }
    match obj.get("analysis").and_then(Value::as_str) {
        Some(a) if ANALYSES.contains(&a) => {}
        _ => errs.push("`analysis` must name a known analysis".into()),
    }
    match obj.get("status").and_then(Value::as_str) {
        Some(s) if STATUSES.contains(&s) => {}
        _ => errs.push("`status` must be completed, no_convergence or error".into()),
    }
    if obj.get("error").is_some_and(|v| !(v.is_null() || v.is_string())) {
        errs.push("`error` must be a string or null".into());
    }
    if obj.get("seed").is_some_and(|v| !v.is_u64()) {
        errs.push("`seed` must be a nonnegative integer".into());
    }
    match obj.get("grid").and_then(Value::as_object) {
        Some(g) => {
            if !g.get("dim").is_some_and(Value::is_u64) {
                errs.push("`grid.dim` must be an integer".into());
            }
            for k in ["side", "inner_fraction"] {
                if !g.get(k).is_some_and(Value::is_number) {
                    errs.push(format!("`grid.{k}` must be a number"));
                }
            }
        }
        None => errs.push("`grid` must be an object".into()),
    }
    match obj.get("levels").and_then(Value::as_array) {
        Some(levels) => {
            for (i, l) in levels.iter().enumerate() {
                validate_level(i, l, &mut errs);
            }
        }
        None => errs.push("`levels` must be an array".into()),
    }
    if errs.is_empty() {
        Ok(())
    } else {
        Err(errs)
    }
}

fn validate_level(i: usize, level: &Value, errs: &mut Vec<String>) {
    let Some(l) = level.as_object() else {
        errs.push(format!("levels[{i}] is not an object"));
        return;
    };
    if !l.get("points").is_some_and(Value::is_u64) {
        errs.push(format!("levels[{i}].points must be an integer"));
    }
    if !l.get("spacing").is_some_and(Value::is_number) {
        errs.push(format!("levels[{i}].spacing must be a number"));
    }
    if !l.get("result").is_some_and(Value::is_object) {
        errs.push(format!("levels[{i}].result must be an object"));
    }
    match l.get("quantities").and_then(Value::as_object) {
        Some(q) => {
            if q.values().any(|v| !(v.is_number() || v.is_null())) {
                errs.push(format!("levels[{i}].quantities must hold numbers or nulls"));
            }
        }
        None => errs.push(format!("levels[{i}].quantities must be an object")),
    }
    match l.get("sidecars").and_then(Value::as_array) {
        Some(s) if s.iter().all(Value::is_string) => {}
        _ => errs.push(format!("levels[{i}].sidecars must be an array of strings")),
    }
}
