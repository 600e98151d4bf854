//! JSON encoding for reports. Numbers are rounded to 12 significant digits
//! so that reruns compare byte for byte.

use num_complex::Complex64;
use peakstate::linalg::CMat;
use peakstate::states::{DensityState, PureState};
use peakstate::Tolerances;
use serde_json::{json, Map, Value};
use sha2::{Digest, Sha256};

pub const SIGNIFICANT_DIGITS: usize = 12;

pub fn num(x: f64) -> Value {
    if x.is_nan() {
        return Value::String("NaN".into());
    }
    if x.is_infinite() {
        return Value::String(if x > 0.0 { "Infinity" } else { "-Infinity" }.into());
    }
    let rounded: f64 = format!("{:.*e}", SIGNIFICANT_DIGITS - 1, x).parse().unwrap_or(x);
    // avoid "-0.0"
    json!(if rounded == 0.0 { 0.0 } else { rounded })
}

pub fn nums(xs: &[f64]) -> Value {
    Value::Array(xs.iter().map(|&x| num(x)).collect())
}

pub fn complex(z: Complex64) -> Value {
    json!([num(z.re), num(z.im)])
}

pub fn matrix(m: &CMat) -> Value {
    Value::Array((0..m.nrows()).map(|i| Value::Array((0..m.ncols()).map(|j| complex(m[(i, j)])).collect())).collect())
}

pub fn density(s: &DensityState) -> Value {
    matrix(s.rho())
}

/// The phase is fixed so the first entry of largest modulus is real
/// positive; that keeps vectors reproducible.
pub fn vector(p: &PureState) -> Value {
    let v = p.xi();
    let k = (0..v.len()).fold(0, |k, i| if v[i].norm() > v[k].norm() + 1e-12 { i } else { k });
    let phase = if v[k].norm() > 0.0 { v[k].conj() / v[k].norm() } else { Complex64::new(1.0, 0.0) };
    Value::Array(v.iter().map(|z| complex(z * phase)).collect())
}

pub fn tolerances(t: &Tolerances) -> Value {
    let mut m = Map::new();
    for (k, v) in t.entries() {
        m.insert(k.to_string(), num(v));
    }
    Value::Object(m)
}

pub fn digest(parts: &[&[u8]]) -> String {
    let mut h = Sha256::new();
    for p in parts {
        h.update((p.len() as u64).to_le_bytes());
        h.update(p);
    }
    h.finalize().iter().map(|b| format!("{b:02x}")).collect()
}
