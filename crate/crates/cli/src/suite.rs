//! Manifest runs: `{"entries": [{"command", "problem", "flags"}]}` with
//! problem paths relative to the manifest.

use std::path::Path;
use std::time::Instant;

use serde_json::{json, Map, Value};

use crate::commands::{run, Command, Flags};
use crate::problem::load_problem;
use crate::report::{digest, num};

fn merge(base: &Flags, entry: Flags) -> Flags {
    Flags {
        seed: entry.seed.or(base.seed),
        directions: entry.directions.or(base.directions),
        tol_width: entry.tol_width.or(base.tol_width),
        alpha: entry.alpha.or(base.alpha),
        trials: entry.trials.or(base.trials),
    }
}

fn malformed(index: usize, msg: String) -> (Value, i32) {
    (json!({"index": index, "exit_code": 2, "error": {"kind": "MalformedEntry", "message": msg}}), 2)
}

fn run_entry(index: usize, entry: &Value, dir: &Path, base: &Flags) -> (Value, i32) {
    let Some(obj) = entry.as_object() else {
        return malformed(index, "entry must be an object".into());
    };
    if let Some(k) = obj.keys().find(|k| !["command", "problem", "flags"].contains(&k.as_str())) {
        return malformed(index, format!("unknown field {k}"));
    }
    let Some(name) = obj.get("command").and_then(Value::as_str) else {
        return malformed(index, "missing command".into());
    };
    let Some(cmd) = Command::parse(name) else {
        return malformed(index, format!("unknown command {name}"));
    };
    let flags = match Flags::from_json(obj.get("flags").unwrap_or(&Value::Null)) {
        Ok(f) => merge(base, f),
        Err(e) => return malformed(index, e),
    };
    let problem_path = match obj.get("problem") {
        None | Some(Value::Null) => None,
        Some(Value::String(p)) => Some(p.clone()),
        Some(_) => return malformed(index, "problem must be a path".into()),
    };
    let loaded = problem_path.as_ref().map(|p| load_problem(&dir.join(p))).transpose();
    let (report, code) = match &loaded {
        Ok(p) => run(cmd, Ok(p.as_ref()), &flags),
        Err(e) => run(cmd, Err(e.clone()), &flags),
    };
    let mut out = Map::new();
    out.insert("index".into(), json!(index));
    out.insert("command".into(), json!(name));
    out.insert("problem".into(), json!(problem_path));
    out.insert("exit_code".into(), json!(code));
    out.insert("report".into(), report);
    (Value::Object(out), code)
}

/// Exit code 2 if any entry is malformed or has bad input, otherwise 1 if
/// any theorem invariant was violated, otherwise 3 on solver shortfalls,
/// otherwise 0. Negative verdicts alone do not fail a suite.
pub fn run_suite(path: &Path, base: &Flags) -> (Value, i32) {
    let start = Instant::now();
    let mut top = Map::new();
    top.insert("command".into(), json!("suite"));
    let parsed = std::fs::read(path)
        .map_err(|e| format!("cannot read {}: {e}", path.display()))
        .and_then(|bytes| {
            let v: Value = serde_json::from_slice(&bytes)
                .map_err(|e| format!("parse error at line {}, column {}: {e}", e.line(), e.column()))?;
            Ok((bytes, v))
        });
    let (bytes, root) = match parsed {
        Ok(x) => x,
        Err(msg) => {
            top.insert("error".into(), json!({"kind": "ManifestError", "message": msg}));
            top.insert("exit_code".into(), json!(2));
            return (Value::Object(top), 2);
        }
    };
    top.insert("inputs_digest".into(), json!(digest(&[b"suite", &bytes, base.to_json().to_string().as_bytes()])));
    let entries = match root.get("entries") {
        Some(Value::Array(a)) => a.clone(),
        _ => {
            top.insert("error".into(), json!({"kind": "ManifestError", "message": "expected {\"entries\": [...]}"}));
            top.insert("exit_code".into(), json!(2));
            return (Value::Object(top), 2);
        }
    };
    let dir = path.parent().unwrap_or(Path::new("."));
    let results: Vec<(Value, i32)> = entries.iter().enumerate().map(|(i, e)| run_entry(i, e, dir, base)).collect();

    let mut counts = [0usize; 4];
    let mut violations = Vec::new();
    let mut failed_entries = Vec::new();
    for (i, (v, code)) in results.iter().enumerate() {
        counts[(*code).clamp(0, 3) as usize] += 1;
        if *code == 2 {
            failed_entries.push(i);
        }
        if let Some(Value::Array(vs)) = v.get("report").and_then(|r| r.get("theorem_violations")) {
            for x in vs {
                violations.push(json!(format!("entry {i}: {}", x.as_str().unwrap_or(""))));
            }
        }
    }
    let code = if counts[2] > 0 {
        2
    } else if !violations.is_empty() {
        1
    } else if counts[3] > 0 {
        3
    } else {
        0
    };
    top.insert(
        "summary".into(),
        json!({
            "entries": results.len(),
            "exit_0": counts[0],
            "exit_1": counts[1],
            "exit_2": counts[2],
            "exit_3": counts[3],
            "input_errors": failed_entries,
        }),
    );
    top.insert("theorem_violations".into(), Value::Array(violations));
    top.insert("entries".into(), Value::Array(results.into_iter().map(|(v, _)| v).collect()));
    top.insert("exit_code".into(), json!(code));
    top.insert("wall_time_s".into(), num(start.elapsed().as_secs_f64()));
    (Value::Object(top), code)
}
