//! JSON map descriptions.
//!
//! Every document is an object with a `"kind"` tag. Complex scalars are
//! two-element arrays `[re, im]`, complex vectors are arrays of those.
//!
//! | kind                  | fields                                         | shape       |
//! |-----------------------|------------------------------------------------|-------------|
//! | `poly`                | `n`, `m`, `terms: [{"alpha": [..], "coef": [..]}]` | `C^n -> C^m` |
//! | `mobius_scalar`       | `z0`                                           | `C -> C`    |
//! | `mobius_quotient`     | `a_abs`, `theta`                               | `C -> C`    |
//! | `line_embed`          | `p`, `q`                                       | `C -> C^n`  |
//! | `linear_functional`   | `u`                                            | `C^n -> C`  |
//! | `scalar_times_vector` | `beta`                                         | `C -> C^m`  |
//! | `affine_scalar`       | `r` (real), `c`                                | `C -> C`    |
//! | `pipeline`            | `stages: [..]` applied first to last          |             |
//!
//! Polynomial terms are emitted in lexicographic multi-index order.

use serde_json::{json, Map, Value};

use crate::complex::{CScalar, CVector};
use crate::error::{Error, Result};
use crate::holomap::{
    AffineScalar, HoloMap, LineEmbed, LinearFunctional, MobiusDisk, MobiusQuotient, Pipeline,
    PolyMap, ScalarTimesVector,
};

pub fn scalar_to_json(z: CScalar) -> Value {
    json!([z.re, z.im])
}

pub fn vector_to_json(v: &CVector) -> Value {
    Value::Array(v.iter().map(|&z| scalar_to_json(z)).collect())
}

pub fn scalar_from_json(v: &Value, path: &str) -> Result<CScalar> {
    let arr = v
        .as_array()
        .filter(|a| a.len() == 2)
        .ok_or_else(|| Error::schema(path, "expected a complex scalar [re, im]"))?;
    let re = finite_number(&arr[0], &format!("{path}/0"))?;
    let im = finite_number(&arr[1], &format!("{path}/1"))?;
    Ok(CScalar::new(re, im))
}

pub fn vector_from_json(v: &Value, path: &str) -> Result<CVector> {
    let arr = v
        .as_array()
        .ok_or_else(|| Error::schema(path, "expected an array of complex scalars"))?;
    if arr.is_empty() {
        return Err(Error::schema(path, "vector must be nonempty"));
    }
    let entries = arr
        .iter()
        .enumerate()
        .map(|(j, z)| scalar_from_json(z, &format!("{path}/{j}")))
        .collect::<Result<Vec<_>>>()?;
    CVector::new(entries).map_err(|e| Error::schema(path, e.to_string()))
}

fn finite_number(v: &Value, path: &str) -> Result<f64> {
    v.as_f64()
        .filter(|x| x.is_finite())
        .ok_or_else(|| Error::schema(path, "expected a finite number"))
}

fn field<'a>(obj: &'a Map<String, Value>, key: &str, path: &str) -> Result<&'a Value> {
    obj.get(key)
        .ok_or_else(|| Error::schema(format!("{path}/{key}"), "missing field"))
}

fn dim(obj: &Map<String, Value>, key: &str, path: &str) -> Result<usize> {
    let p = format!("{path}/{key}");
    field(obj, key, path)?
        .as_u64()
        .filter(|&d| d >= 1)
        .map(|d| d as usize)
        .ok_or_else(|| Error::schema(p, "expected a positive integer"))
}

fn reject_unknown(obj: &Map<String, Value>, allowed: &[&str], path: &str) -> Result<()> {
    for key in obj.keys() {
        if key != "kind" && !allowed.contains(&key.as_str()) {
            return Err(Error::schema(format!("{path}/{key}"), "unknown field"));
        }
    }
    Ok(())
}

fn with_path<T>(r: Result<T>, path: &str) -> Result<T> {
    r.map_err(|e| match e {
        Error::Schema { .. } => e,
        other => Error::schema(path, other.to_string()),
    })
}

/// Parses a map description from a JSON string.
pub fn parse_spec_str(doc: &str) -> Result<HoloMap> {
    let value: Value =
        serde_json::from_str(doc).map_err(|e| Error::schema("", format!("invalid JSON: {e}")))?;
    parse_spec(&value)
}

pub fn parse_spec(doc: &Value) -> Result<HoloMap> {
    parse_at(doc, "")
}

fn parse_at(doc: &Value, path: &str) -> Result<HoloMap> {
    let obj = doc
        .as_object()
        .ok_or_else(|| Error::schema(path, "expected an object"))?;
    let kind = field(obj, "kind", path)?
        .as_str()
        .ok_or_else(|| Error::schema(format!("{path}/kind"), "expected a string"))?;
    match kind {
        "poly" => {
            reject_unknown(obj, &["n", "m", "terms"], path)?;
            let n = dim(obj, "n", path)?;
            let m = dim(obj, "m", path)?;
            let tpath = format!("{path}/terms");
            let terms = field(obj, "terms", path)?
                .as_array()
                .ok_or_else(|| Error::schema(&tpath, "expected an array"))?;
            let mut parsed = Vec::with_capacity(terms.len());
            for (k, term) in terms.iter().enumerate() {
                let kpath = format!("{tpath}/{k}");
                let tobj = term
                    .as_object()
                    .ok_or_else(|| Error::schema(&kpath, "expected an object"))?;
                for key in tobj.keys() {
                    if key != "alpha" && key != "coef" {
                        return Err(Error::schema(format!("{kpath}/{key}"), "unknown field"));
                    }
                }
                let apath = format!("{kpath}/alpha");
                let alpha = field(tobj, "alpha", &kpath)?
                    .as_array()
                    .ok_or_else(|| Error::schema(&apath, "expected an array"))?
                    .iter()
                    .enumerate()
                    .map(|(j, a)| {
                        a.as_u64()
                            .and_then(|x| u32::try_from(x).ok())
                            .ok_or_else(|| {
                                Error::schema(
                                    format!("{apath}/{j}"),
                                    "expected a non-negative integer",
                                )
                            })
                    })
                    .collect::<Result<Vec<u32>>>()?;
                if alpha.len() != n {
                    return Err(Error::schema(
                        apath,
                        format!("multi-index has length {}, expected n = {n}", alpha.len()),
                    ));
                }
                let cpath = format!("{kpath}/coef");
                let coef = vector_from_json(field(tobj, "coef", &kpath)?, &cpath)?;
                if coef.dim() != m {
                    return Err(Error::schema(
                        cpath,
                        format!("coefficient has dimension {}, expected m = {m}", coef.dim()),
                    ));
                }
                parsed.push((alpha, coef));
            }
            with_path(PolyMap::new(n, m, parsed).map(HoloMap::Poly), &tpath)
        }
        "mobius_scalar" => {
            reject_unknown(obj, &["z0"], path)?;
            let zpath = format!("{path}/z0");
            let z0 = scalar_from_json(field(obj, "z0", path)?, &zpath)?;
            with_path(MobiusDisk::new(z0).map(HoloMap::Mobius), &zpath)
        }
        "mobius_quotient" => {
            reject_unknown(obj, &["a_abs", "theta"], path)?;
            let a_abs = finite_number(field(obj, "a_abs", path)?, &format!("{path}/a_abs"))?;
            let theta = finite_number(field(obj, "theta", path)?, &format!("{path}/theta"))?;
            with_path(
                MobiusQuotient::new(a_abs, theta).map(HoloMap::MobiusQuotient),
                &format!("{path}/a_abs"),
            )
        }
        "line_embed" => {
            reject_unknown(obj, &["p", "q"], path)?;
            let p = vector_from_json(field(obj, "p", path)?, &format!("{path}/p"))?;
            let q = vector_from_json(field(obj, "q", path)?, &format!("{path}/q"))?;
            with_path(
                LineEmbed::new(p, q).map(HoloMap::LineEmbed),
                &format!("{path}/q"),
            )
        }
        "linear_functional" => {
            reject_unknown(obj, &["u"], path)?;
            let u = vector_from_json(field(obj, "u", path)?, &format!("{path}/u"))?;
            Ok(HoloMap::LinearFunctional(LinearFunctional::new(u)))
        }
        "scalar_times_vector" => {
            reject_unknown(obj, &["beta"], path)?;
            let beta = vector_from_json(field(obj, "beta", path)?, &format!("{path}/beta"))?;
            Ok(HoloMap::ScalarTimesVector(ScalarTimesVector::new(beta)))
        }
        "affine_scalar" => {
            reject_unknown(obj, &["r", "c"], path)?;
            let r = finite_number(field(obj, "r", path)?, &format!("{path}/r"))?;
            let c = scalar_from_json(field(obj, "c", path)?, &format!("{path}/c"))?;
            with_path(
                AffineScalar::new(r, c).map(HoloMap::AffineScalar),
                &format!("{path}/r"),
            )
        }
        "pipeline" => {
            reject_unknown(obj, &["stages"], path)?;
            let spath = format!("{path}/stages");
            let stages = field(obj, "stages", path)?
                .as_array()
                .ok_or_else(|| Error::schema(&spath, "expected an array"))?
                .iter()
                .enumerate()
                .map(|(k, s)| parse_at(s, &format!("{spath}/{k}")))
                .collect::<Result<Vec<_>>>()?;
            with_path(Pipeline::new(stages).map(HoloMap::Pipeline), &spath)
        }
        other => Err(Error::schema(
            format!("{path}/kind"),
            format!("unknown kind {other:?}"),
        )),
    }
}

pub fn emit_spec(f: &HoloMap) -> Value {
    match f {
        HoloMap::Poly(p) => json!({
            "kind": "poly",
            "n": p.n(),
            "m": p.m(),
            "terms": p.terms().map(|(alpha, coef)| json!({
                "alpha": alpha,
                "coef": vector_to_json(coef),
            })).collect::<Vec<_>>(),
        }),
        HoloMap::Mobius(m) => json!({"kind": "mobius_scalar", "z0": scalar_to_json(m.z0())}),
        HoloMap::MobiusQuotient(m) => json!({
            "kind": "mobius_quotient",
            "a_abs": m.a_abs(),
            "theta": m.theta(),
        }),
        HoloMap::LineEmbed(l) => json!({
            "kind": "line_embed",
            "p": vector_to_json(l.p()),
            "q": vector_to_json(l.q()),
        }),
        HoloMap::LinearFunctional(l) => {
            json!({"kind": "linear_functional", "u": vector_to_json(l.u())})
        }
        HoloMap::ScalarTimesVector(s) => {
            json!({"kind": "scalar_times_vector", "beta": vector_to_json(s.beta())})
        }
        HoloMap::AffineScalar(a) => json!({
            "kind": "affine_scalar",
            "r": a.r(),
            "c": scalar_to_json(a.c()),
        }),
        HoloMap::Pipeline(p) => json!({
            "kind": "pipeline",
            "stages": p.stages().iter().map(emit_spec).collect::<Vec<_>>(),
        }),
    }
}

pub fn emit_spec_string(f: &HoloMap) -> String {
    emit_spec(f).to_string()
}
