//! Problem files: named matrices, subspaces built from them, states, and
//! free-form parameters.

use std::collections::BTreeMap;
use std::path::Path;

use num_complex::Complex64;
use peakstate::algebra::{make_subspace, OperatorSubspace};
use peakstate::linalg::CMat;
use peakstate::states::{DensityState, PureState};
use peakstate::{CVec, Error};
use serde_json::{Map, Value};

/// Vectors whose norm is off by more than this get a warning on load.
pub const RENORMALIZE_WARN: f64 = 1e-6;

#[derive(Debug, Clone, thiserror::Error)]
pub enum ProblemError {
    #[error("cannot read {path}: {msg}")]
    Io { path: String, msg: String },
    #[error("parse error at line {line}, column {column}: {msg}")]
    Parse { line: usize, column: usize, msg: String },
    #[error("{field}: {msg}")]
    Schema { field: String, msg: String },
    #[error("{field}: unresolved reference \"{name}\"")]
    Unresolved { field: String, name: String },
    #[error("dimension mismatch at {field}: {msg}")]
    DimensionMismatch { field: String, msg: String },
}

impl ProblemError {
    pub fn kind(&self) -> &'static str {
        match self {
            ProblemError::Io { .. } => "Io",
            ProblemError::Parse { .. } => "ParseError",
            ProblemError::Schema { .. } => "SchemaError",
            ProblemError::Unresolved { .. } => "UnresolvedReference",
            ProblemError::DimensionMismatch { .. } => "DimensionMismatch",
        }
    }
}

fn schema(field: impl Into<String>, msg: impl Into<String>) -> ProblemError {
    ProblemError::Schema { field: field.into(), msg: msg.into() }
}

#[derive(Debug, Clone)]
pub struct SubspaceDecl {
    pub basis: Vec<String>,
    pub unital: bool,
    pub algebra: bool,
    pub space: OperatorSubspace,
}

#[derive(Debug, Clone)]
pub enum StateDecl {
    Vector(PureState),
    Density(DensityState),
}

impl StateDecl {
    pub fn density(&self) -> DensityState {
        match self {
            StateDecl::Vector(p) => p.density(),
            StateDecl::Density(d) => d.clone(),
        }
    }
}

#[derive(Debug, Clone)]
pub struct Problem {
    pub dim: usize,
    pub matrices: BTreeMap<String, CMat>,
    pub subspaces: BTreeMap<String, SubspaceDecl>,
    pub states: BTreeMap<String, StateDecl>,
    pub params: Map<String, Value>,
    pub warnings: Vec<String>,
    /// Raw file contents, hashed into report digests.
    pub bytes: Vec<u8>,
}

pub fn load_problem(path: &Path) -> Result<Problem, ProblemError> {
    let bytes = std::fs::read(path).map_err(|e| ProblemError::Io { path: path.display().to_string(), msg: e.to_string() })?;
    parse_problem(bytes)
}

pub fn parse_problem(bytes: Vec<u8>) -> Result<Problem, ProblemError> {
    let root: Value = serde_json::from_slice(&bytes)
        .map_err(|e| ProblemError::Parse { line: e.line(), column: e.column(), msg: e.to_string() })?;
    let obj = root.as_object().ok_or_else(|| schema("<root>", "expected a JSON object"))?;
    for key in obj.keys() {
        if !["dim", "matrices", "subspaces", "states", "params"].contains(&key.as_str()) {
            return Err(schema(key.clone(), "unknown top-level field"));
        }
    }
    let dim = obj
        .get("dim")
        .and_then(Value::as_u64)
        .filter(|&d| d >= 1)
        .ok_or_else(|| schema("dim", "expected a positive integer"))? as usize;

    let mut matrices = BTreeMap::new();
    for (name, v) in object_field(obj, "matrices")? {
        let field = format!("matrices.{name}");
        let m = parse_matrix(v, &field)?;
        if m.nrows() != dim {
            return Err(ProblemError::DimensionMismatch {
                field,
                msg: format!("matrix is {0}x{0} but dim is {dim}", m.nrows()),
            });
        }
        matrices.insert(name.clone(), m);
    }

    let mut subspaces = BTreeMap::new();
    for (name, v) in object_field(obj, "subspaces")? {
        let field = format!("subspaces.{name}");
        let decl = v.as_object().ok_or_else(|| schema(&field, "expected an object"))?;
        let basis: Vec<String> = match decl.get("basis") {
            Some(Value::Array(a)) => a
                .iter()
                .enumerate()
                .map(|(i, x)| {
                    x.as_str().map(str::to_owned).ok_or_else(|| schema(format!("{field}.basis[{i}]"), "expected a matrix name"))
                })
                .collect::<Result<_, _>>()?,
            _ => return Err(schema(format!("{field}.basis"), "expected an array of matrix names")),
        };
        let unital = bool_field(decl, "unital", &field)?.unwrap_or(true);
        let algebra = bool_field(decl, "algebra", &field)?.unwrap_or(false);
        let mut mats = Vec::with_capacity(basis.len());
        for (i, b) in basis.iter().enumerate() {
            let m = matrices
                .get(b)
                .ok_or_else(|| ProblemError::Unresolved { field: format!("{field}.basis[{i}]"), name: b.clone() })?;
            mats.push(m.clone());
        }
        if mats.is_empty() && !unital {
            return Err(schema(format!("{field}.basis"), "empty basis in a non-unital subspace"));
        }
        if mats.is_empty() {
            mats.push(peakstate::linalg::eye(dim));
        }
        let space = make_subspace(&mats, unital).map_err(|e| schema(&field, e.to_string()))?;
        if algebra && !space.algebra_closed {
            return Err(schema(format!("{field}.algebra"), "declared an algebra, but the span is not closed under products"));
        }
        subspaces.insert(name.clone(), SubspaceDecl { basis, unital, algebra, space });
    }

    let mut warnings = Vec::new();
    let mut states = BTreeMap::new();
    for (name, v) in object_field(obj, "states")? {
        let field = format!("states.{name}");
        let decl = v.as_object().ok_or_else(|| schema(&field, "expected an object"))?;
        let state = match (decl.get("vector"), decl.get("density")) {
            (Some(vec), None) => {
                let vf = format!("{field}.vector");
                let arr = vec.as_array().ok_or_else(|| schema(&vf, "expected an array of [re, im] entries"))?;
                if arr.len() != dim {
                    return Err(ProblemError::DimensionMismatch { field: vf, msg: format!("length {} but dim is {dim}", arr.len()) });
                }
                let entries =
                    arr.iter().enumerate().map(|(i, x)| parse_complex(x, &format!("{vf}[{i}]"))).collect::<Result<Vec<_>, _>>()?;
                let v = CVec::from_vec(entries);
                let norm = v.norm();
                if (norm - 1.0).abs() > RENORMALIZE_WARN {
                    warnings.push(format!("{vf}: renormalized from norm {norm:.12e}"));
                }
                StateDecl::Vector(PureState::new(v).map_err(|e| schema(&vf, e.to_string()))?)
            }
            (None, Some(d)) => {
                let df = format!("{field}.density");
                let m = parse_matrix(d, &df)?;
                if m.nrows() != dim {
                    return Err(ProblemError::DimensionMismatch {
                        field: df,
                        msg: format!("matrix is {0}x{0} but dim is {dim}", m.nrows()),
                    });
                }
                StateDecl::Density(DensityState::new(m).map_err(|e| schema(&df, e.to_string()))?)
            }
            _ => return Err(schema(&field, "expected exactly one of \"vector\" or \"density\"")),
        };
        states.insert(name.clone(), state);
    }

    let params = match obj.get("params") {
        None => Map::new(),
        Some(Value::Object(m)) => m.clone(),
        Some(_) => return Err(schema("params", "expected an object")),
    };
    Ok(Problem { dim, matrices, subspaces, states, params, warnings, bytes })
}

fn object_field<'a>(obj: &'a Map<String, Value>, key: &str) -> Result<Vec<(&'a String, &'a Value)>, ProblemError> {
    match obj.get(key) {
        None => Ok(vec![]),
        Some(Value::Object(m)) => Ok(m.iter().collect()),
        Some(_) => Err(schema(key, "expected an object keyed by name")),
    }
}

fn bool_field(obj: &Map<String, Value>, key: &str, field: &str) -> Result<Option<bool>, ProblemError> {
    match obj.get(key) {
        None => Ok(None),
        Some(Value::Bool(b)) => Ok(Some(*b)),
        Some(_) => Err(schema(format!("{field}.{key}"), "expected true or false")),
    }
}

/// `[re, im]`, or a bare real number.
pub fn parse_complex(v: &Value, field: &str) -> Result<Complex64, ProblemError> {
    let z = match v {
        Value::Number(x) => x.as_f64().map(|re| Complex64::new(re, 0.0)),
        Value::Array(a) if a.len() == 2 => match (a[0].as_f64(), a[1].as_f64()) {
            (Some(re), Some(im)) => Some(Complex64::new(re, im)),
            _ => None,
        },
        _ => None,
    };
    z.filter(|z| z.re.is_finite() && z.im.is_finite())
        .ok_or_else(|| schema(field, "expected a complex entry [re, im]"))
}

/// Row-major array of rows; must be square.
pub fn parse_matrix(v: &Value, field: &str) -> Result<CMat, ProblemError> {
    let rows = v.as_array().ok_or_else(|| schema(field, "expected an array of rows"))?;
    let n = rows.len();
    if n == 0 {
        return Err(ProblemError::DimensionMismatch { field: field.into(), msg: "matrix has no rows".into() });
    }
    let mut m = CMat::zeros(n, n);
    for (i, row) in rows.iter().enumerate() {
        let row = row.as_array().ok_or_else(|| schema(format!("{field}[{i}]"), "expected an array of entries"))?;
        if row.len() != n {
            return Err(ProblemError::DimensionMismatch {
                field: field.into(),
                msg: format!("row {i} has {} entries in a matrix with {n} rows; matrices must be square", row.len()),
            });
        }
        for (j, x) in row.iter().enumerate() {
            m[(i, j)] = parse_complex(x, &format!("{field}[{i}][{j}]"))?;
        }
    }
    Ok(m)
}

/// Maps errors from the numerical layer that stem from the data itself.
pub fn is_input_error(e: &Error) -> bool {
    matches!(e, Error::InvalidInput(_) | Error::DimensionMismatch(_) | Error::HypothesisFailed(_))
}
