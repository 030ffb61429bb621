//! File formats: bodies, sample sets, point lists, polynomials and integer
//! matrices as JSON; result tables as CSV.

use std::fmt::Write as _;
use std::path::Path;
use std::sync::Arc;

use num_bigint::BigInt;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::convex_body::ConvexBody;
use crate::error::{Error, Result};
use crate::exact_field::{parse_rational, QuadExt};
use crate::extremal::{SampleCloud, SampleDescriptor, WeightSpec, WeightedSampleSet};
use crate::lattice_algebra::IntMatrix;
use crate::sparse_poly::SparsePolynomial;

/// `x` with 15 significant digits in the style of C's `%.15g`.
pub fn fmt_g15(x: f64) -> String {
    const DIGITS: i32 = 15;
    if x.is_nan() {
        return "nan".into();
    }
    if x.is_infinite() {
        return if x > 0.0 { "inf".into() } else { "-inf".into() };
    }
    if x == 0.0 {
        return if x.is_sign_negative() { "-0".into() } else { "0".into() };
    }
    let sci = format!("{:.*e}", (DIGITS - 1) as usize, x);
    let (mantissa, exp) = sci.split_once('e').expect("exponent present");
    let exp: i32 = exp.parse().expect("integer exponent");
    if exp < -4 || exp >= DIGITS {
        let m = trim_zeros(mantissa);
        let sign = if exp < 0 { '-' } else { '+' };
        format!("{m}e{sign}{:02}", exp.abs())
    } else {
        let decimals = (DIGITS - 1 - exp).max(0) as usize;
        trim_zeros(&format!("{x:.decimals$}")).to_string()
    }
}

fn trim_zeros(s: &str) -> &str {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.')
    } else {
        s
    }
}

/// `re,im` with both parts in [`fmt_g15`].
pub fn fmt_complex(z: Complex64) -> String {
    format!("{},{}", fmt_g15(z.re), fmt_g15(z.im))
}

fn read_json(path: &Path) -> Result<Value> {
    let text = std::fs::read_to_string(path)?;
    Ok(serde_json::from_str(&text)?)
}

fn parse_err(what: &str, v: &Value) -> Error {
    Error::Parse(format!("{what}: unexpected {v}"))
}

// ---- bodies ----------------------------------------------------------------

#[derive(Serialize, Deserialize)]
struct BodyFile {
    n: usize,
    #[serde(default = "default_radicand")]
    radicand: u32,
    vertices: Vec<Vec<Value>>,
}

fn default_radicand() -> u32 {
    2
}

/// A coordinate is `"p/q"`, an integer, or a pair `["a", "b"]` meaning
/// `a + b√d`.
fn parse_coordinate(v: &Value, radicand: u32) -> Result<QuadExt> {
    let rat = |v: &Value| match v {
        Value::String(s) => parse_rational(s),
        Value::Number(n) if n.is_i64() => Ok(crate::exact_field::rational_from_int(n.as_i64().unwrap())),
        other => Err(parse_err("rational", other)),
    };
    match v {
        Value::Array(pair) if pair.len() == 2 => QuadExt::new(rat(&pair[0])?, rat(&pair[1])?, radicand),
        other => Ok(QuadExt::rational(rat(other)?)),
    }
}

pub fn parse_body(json: &str) -> Result<ConvexBody> {
    let file: BodyFile = serde_json::from_str(json)?;
    let vertices = file
        .vertices
        .iter()
        .map(|v| v.iter().map(|c| parse_coordinate(c, file.radicand)).collect::<Result<Vec<_>>>())
        .collect::<Result<Vec<_>>>()?;
    ConvexBody::new(file.n, file.radicand, vertices)
}

pub fn read_body(path: &Path) -> Result<ConvexBody> {
    parse_body(&std::fs::read_to_string(path)?)
}

pub fn body_to_json(body: &ConvexBody) -> String {
    let vertices: Vec<Vec<Value>> = body
        .vertices()
        .iter()
        .map(|v| v.iter().map(|c| serde_json::json!(c.to_pair_strings())).collect())
        .collect();
    let file = BodyFile { n: body.dim_ambient(), radicand: body.radicand(), vertices };
    serde_json::to_string_pretty(&file).expect("serializable")
}

// ---- points ----------------------------------------------------------------

/// A complex number is `[re, im]`, a bare real, or a string `"a+bi"`.
fn parse_complex_value(v: &Value) -> Result<Complex64> {
    match v {
        Value::Number(n) => Ok(Complex64::new(n.as_f64().ok_or_else(|| parse_err("number", v))?, 0.0)),
        Value::Array(pair) if pair.len() == 2 => {
            let f = |x: &Value| x.as_f64().ok_or_else(|| parse_err("number", x));
            Ok(Complex64::new(f(&pair[0])?, f(&pair[1])?))
        }
        Value::String(s) => parse_complex(s),
        other => Err(parse_err("complex number", other)),
    }
}

/// Parses `a`, `bi`, `a+bi`, `a-bi` (also with `j`).
pub fn parse_complex(s: &str) -> Result<Complex64> {
    let t: String = s.chars().filter(|c| !c.is_whitespace()).collect();
    let bad = || Error::Parse(format!("complex number {s:?}"));
    let num = |x: &str| -> Result<f64> {
        match x {
            "" | "+" => Ok(1.0),
            "-" => Ok(-1.0),
            _ => x.parse::<f64>().map_err(|_| bad()),
        }
    };
    if t.is_empty() {
        return Err(bad());
    }
    let Some(body) = t.strip_suffix('i').or_else(|| t.strip_suffix('j')) else {
        return Ok(Complex64::new(t.parse().map_err(|_| bad())?, 0.0));
    };
    // split at the last sign that is not part of an exponent
    let bytes = body.as_bytes();
    let split = (1..bytes.len())
        .rev()
        .find(|&k| (bytes[k] == b'+' || bytes[k] == b'-') && !matches!(bytes[k - 1], b'e' | b'E'));
    match split {
        Some(k) => Ok(Complex64::new(body[..k].parse().map_err(|_| bad())?, num(&body[k..])?)),
        None => Ok(Complex64::new(0.0, num(body)?)),
    }
}

/// Comma-separated complex coordinates, e.g. `2,3+0.5i`.
pub fn parse_point(s: &str) -> Result<Vec<Complex64>> {
    s.split(',').map(parse_complex).collect()
}

/// A list of points, each a list of complex numbers; `{"points": [...]}` is
/// accepted too.
pub fn parse_points(json: &str) -> Result<Vec<Vec<Complex64>>> {
    let v: Value = serde_json::from_str(json)?;
    points_from_value(&v)
}

fn points_from_value(v: &Value) -> Result<Vec<Vec<Complex64>>> {
    let list = match v {
        Value::Object(o) => o.get("points").ok_or_else(|| parse_err("point list", v))?,
        other => other,
    };
    let Value::Array(items) = list else {
        return Err(parse_err("point list", list));
    };
    items
        .iter()
        .map(|p| match p {
            Value::Array(coords) => coords.iter().map(parse_complex_value).collect(),
            other => Err(parse_err("point", other)),
        })
        .collect()
}

pub fn read_points(path: &Path) -> Result<Vec<Vec<Complex64>>> {
    points_from_value(&read_json(path)?)
}

fn points_to_value(points: &[Vec<Complex64>]) -> Value {
    Value::Array(
        points
            .iter()
            .map(|p| Value::Array(p.iter().map(|c| serde_json::json!([c.re, c.im])).collect()))
            .collect(),
    )
}

// ---- sample sets -----------------------------------------------------------

#[derive(Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
enum WeightFile {
    Constant { value: f64 },
    Table { values: Vec<Option<f64>> },
}

#[derive(Serialize, Deserialize)]
struct SampleFile {
    kind: String,
    #[serde(default)]
    n: Option<usize>,
    #[serde(default)]
    count: Option<usize>,
    #[serde(default)]
    radius: Option<f64>,
    #[serde(default)]
    weight: Option<WeightFile>,
    #[serde(default)]
    points: Option<Value>,
    #[serde(default)]
    certification_points: Option<Value>,
}

/// `null` in a weight table stands for `+∞`.
fn weight_spec(file: Option<WeightFile>) -> WeightSpec {
    match file {
        None => WeightSpec::Constant(0.0),
        Some(WeightFile::Constant { value }) => WeightSpec::Constant(value),
        Some(WeightFile::Table { values }) => {
            WeightSpec::Table(values.into_iter().map(|v| v.unwrap_or(f64::INFINITY)).collect())
        }
    }
}

pub fn parse_sample_set(json: &str) -> Result<WeightedSampleSet> {
    let file: SampleFile = serde_json::from_str(json)?;
    let weight = weight_spec(file.weight);
    let radius = file.radius.unwrap_or(1.0);
    let missing = |f: &str| Error::Parse(format!("{} sample set needs \"{f}\"", file.kind));
    let set = match file.kind.as_str() {
        "torus" => WeightedSampleSet::torus_with_radius(
            file.n.ok_or_else(|| missing("n"))?,
            file.count.unwrap_or(32),
            radius,
            weight,
        )?,
        "circle" => {
            if file.n.is_some_and(|n| n != 1) {
                return Err(Error::InvalidSamples("circle sample sets have n = 1".into()));
            }
            WeightedSampleSet::circle(file.count.unwrap_or(256), radius, weight)?
        }
        "explicit" => {
            let points = points_from_value(file.points.as_ref().ok_or_else(|| missing("points"))?)?;
            let weights = match weight {
                WeightSpec::Constant(c) => vec![c; points.len()],
                WeightSpec::Table(v) => v,
            };
            WeightedSampleSet::explicit(points, weights)?
        }
        other => return Err(Error::Parse(format!("unknown sample kind {other:?}"))),
    };
    match file.certification_points {
        None => Ok(set),
        Some(v) => {
            let points = points_from_value(&v)?;
            let c = match set.weight() {
                WeightSpec::Constant(c) => *c,
                WeightSpec::Table(v) if v.windows(2).all(|w| w[0] == w[1]) => v[0],
                WeightSpec::Table(_) => {
                    return Err(Error::InvalidSamples("certification points need a constant weight".into()))
                }
            };
            let cloud = SampleCloud::new(points.clone(), vec![c; points.len()])?;
            set.with_certification(cloud)
        }
    }
}

pub fn read_sample_set(path: &Path) -> Result<WeightedSampleSet> {
    parse_sample_set(&std::fs::read_to_string(path)?)
}

pub fn sample_set_to_json(set: &WeightedSampleSet) -> String {
    let weight = match set.weight() {
        WeightSpec::Constant(c) => WeightFile::Constant { value: *c },
        WeightSpec::Table(v) => {
            WeightFile::Table { values: v.iter().map(|q| q.is_finite().then_some(*q)).collect() }
        }
    };
    let mut file = SampleFile {
        kind: String::new(),
        n: Some(set.n()),
        count: None,
        radius: None,
        weight: Some(weight),
        points: None,
        certification_points: None,
    };
    match *set.descriptor() {
        SampleDescriptor::Torus { per_axis, radius, .. } => {
            file.kind = "torus".into();
            file.count = Some(per_axis);
            file.radius = Some(radius);
        }
        SampleDescriptor::Circle { count, radius } => {
            file.kind = "circle".into();
            file.count = Some(count);
            file.radius = Some(radius);
        }
        SampleDescriptor::Explicit => {
            file.kind = "explicit".into();
            file.count = Some(set.len());
            file.points = Some(points_to_value(&set.cloud().points));
        }
    }
    if set.has_explicit_certification() {
        file.certification_points = Some(points_to_value(&set.certification_cloud().points));
    }
    serde_json::to_string_pretty(&file).expect("serializable")
}

// ---- polynomials and matrices ----------------------------------------------

#[derive(Serialize, Deserialize)]
struct TermFile {
    alpha: Vec<u32>,
    re: f64,
    im: f64,
}

#[derive(Serialize, Deserialize)]
struct PolyFile {
    m: u32,
    terms: Vec<TermFile>,
}

pub fn parse_polynomial(json: &str, body: Arc<ConvexBody>) -> Result<SparsePolynomial> {
    let file: PolyFile = serde_json::from_str(json)?;
    SparsePolynomial::new(body, file.m, file.terms.into_iter().map(|t| (t.alpha, Complex64::new(t.re, t.im))))
}

pub fn polynomial_to_json(p: &SparsePolynomial) -> String {
    let terms = p.terms().iter().map(|(a, c)| TermFile { alpha: a.clone(), re: c.re, im: c.im }).collect();
    serde_json::to_string_pretty(&PolyFile { m: p.degree(), terms }).expect("serializable")
}

/// Row list of integers (numbers or decimal strings for large entries).
pub fn parse_int_matrix(json: &str) -> Result<IntMatrix> {
    let v: Value = serde_json::from_str(json)?;
    let rows = match &v {
        Value::Object(o) => o.get("rows").ok_or_else(|| parse_err("matrix", &v))?,
        other => other,
    };
    let Value::Array(rows) = rows else {
        return Err(parse_err("matrix", rows));
    };
    let parsed = rows
        .iter()
        .map(|r| match r {
            Value::Array(xs) => xs
                .iter()
                .map(|x| match x {
                    Value::Number(n) if n.is_i64() => Ok(BigInt::from(n.as_i64().unwrap())),
                    Value::String(s) => s.parse::<BigInt>().map_err(|_| parse_err("integer", x)),
                    other => Err(parse_err("integer", other)),
                })
                .collect::<Result<Vec<_>>>(),
            other => Err(parse_err("matrix row", other)),
        })
        .collect::<Result<Vec<_>>>()?;
    IntMatrix::from_rows(&parsed)
}

pub fn read_int_matrix(path: &Path) -> Result<IntMatrix> {
    parse_int_matrix(&std::fs::read_to_string(path)?)
}

// ---- CSV -------------------------------------------------------------------

/// One row of a results table.
#[derive(Clone, Debug, PartialEq)]
pub struct ResultRow {
    pub z: Vec<Complex64>,
    pub m: u32,
    pub log_phi_raw: f64,
    pub log_phi_certified: f64,
    /// `NaN` (printed `nan`) when there is no oracle.
    pub oracle_v: f64,
    pub err: f64,
}

/// Header `z_re_1,z_im_1,…,m,log_phi_raw,log_phi_certified,oracle_V,err`
/// and one LF-terminated line per row.
pub fn results_csv(n: usize, rows: &[ResultRow]) -> String {
    let mut out = String::new();
    for j in 1..=n {
        let _ = write!(out, "z_re_{j},z_im_{j},");
    }
    out.push_str("m,log_phi_raw,log_phi_certified,oracle_V,err\n");
    for r in rows {
        for c in &r.z {
            let _ = write!(out, "{},", fmt_complex(*c));
        }
        let _ = writeln!(
            out,
            "{},{},{},{},{}",
            r.m,
            fmt_g15(r.log_phi_raw),
            fmt_g15(r.log_phi_certified),
            fmt_g15(r.oracle_v),
            fmt_g15(r.err)
        );
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn g15_format() {
        assert_eq!(fmt_g15(0.0), "0");
        assert_eq!(fmt_g15(1.0), "1");
        assert_eq!(fmt_g15(-2.5), "-2.5");
        assert_eq!(fmt_g15(std::f64::consts::LN_2), "0.693147180559945");
        assert_eq!(fmt_g15(1e-5), "1e-05");
        assert_eq!(fmt_g15(0.0001), "0.0001");
        assert_eq!(fmt_g15(1e15), "1e+15");
        assert_eq!(fmt_g15(123456789012345.0), "123456789012345");
        assert_eq!(fmt_g15(9.656_854_249_492_38), "9.65685424949238");
        assert_eq!(fmt_g15(f64::INFINITY), "inf");
    }

    #[test]
    fn complex_parsing() {
        assert_eq!(parse_complex("2").unwrap(), Complex64::new(2.0, 0.0));
        assert_eq!(parse_complex("1.5-2i").unwrap(), Complex64::new(1.5, -2.0));
        assert_eq!(parse_complex("-i").unwrap(), Complex64::new(0.0, -1.0));
        assert_eq!(parse_complex("1e-3+2e+2i").unwrap(), Complex64::new(1e-3, 200.0));
        assert_eq!(parse_complex("3i").unwrap(), Complex64::new(0.0, 3.0));
        assert!(parse_complex("abc").is_err());
        assert_eq!(parse_point("2,3").unwrap().len(), 2);
    }

    #[test]
    fn body_round_trip() {
        let json = r#"{"n":2,"radicand":2,"vertices":[[["0","0"],["0","0"]],[["1","0"],["0","1"]]]}"#;
        let body = parse_body(json).unwrap();
        assert!(!body.is_rational());
        let again = parse_body(&body_to_json(&body)).unwrap();
        assert_eq!(again.vertices(), body.vertices());
        let plain = parse_body(r#"{"n":1,"radicand":3,"vertices":[["0"],["3/2"]]}"#).unwrap();
        assert!(plain.is_rational());
    }

    #[test]
    fn sample_sets() {
        let s = parse_sample_set(r#"{"kind":"circle","count":16,"radius":1.0,"weight":{"kind":"constant","value":0.7}}"#)
            .unwrap();
        assert_eq!(s.len(), 16);
        let t = parse_sample_set(r#"{"kind":"torus","n":2,"count":4}"#).unwrap();
        assert_eq!(t.len(), 16);
        let e = parse_sample_set(
            r#"{"kind":"explicit","n":1,"points":[[[1,0]],[[0,1]]],"weight":{"kind":"table","values":[0.5,null]}}"#,
        )
        .unwrap();
        assert_eq!(e.cloud().weights, vec![0.5, f64::INFINITY]);
        for set in [s, t, e] {
            let back = parse_sample_set(&sample_set_to_json(&set)).unwrap();
            assert_eq!(back.cloud(), set.cloud());
        }
        let k = crate::extremal::kronecker_torus(2, 4, 8, 0.0).unwrap();
        let back = parse_sample_set(&sample_set_to_json(&k)).unwrap();
        assert_eq!(back.certification_cloud(), k.certification_cloud());
    }

    #[test]
    fn polynomial_round_trip() {
        let body = Arc::new(ConvexBody::simplex(2));
        let p = parse_polynomial(r#"{"m":2,"terms":[{"alpha":[1,1],"re":1.0,"im":-2.0}]}"#, body.clone()).unwrap();
        let q = parse_polynomial(&polynomial_to_json(&p), body).unwrap();
        assert_eq!(p.terms(), q.terms());
    }

    #[test]
    fn matrices() {
        let m = parse_int_matrix(r#"[[1,2],["-3","40000000000000000000000"]]"#).unwrap();
        assert_eq!(m.rows(), 2);
        assert!(parse_int_matrix(r#"[[1,2],[3]]"#).is_err());
    }

    #[test]
    fn csv_layout() {
        let rows = vec![ResultRow {
            z: vec![Complex64::new(2.0, 0.0)],
            m: 8,
            log_phi_raw: 0.5,
            log_phi_certified: 0.25,
            oracle_v: f64::NAN,
            err: f64::NAN,
        }];
        assert_eq!(
            results_csv(1, &rows),
            "z_re_1,z_im_1,m,log_phi_raw,log_phi_certified,oracle_V,err\n2,0,8,0.5,0.25,nan,nan\n"
        );
    }
}
