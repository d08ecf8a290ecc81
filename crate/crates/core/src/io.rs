//! Chain files, pose strings and solution reports.
//!
//! A chain file is a JSON document
//!
//! ```json
//! { "name": "example",
//!   "joints": [ { "type": "R", "theta_deg": "*", "d": 0, "a": 0.1, "alpha_deg": 90 }, … ] }
//! ```
//!
//! with exactly six rows; `"*"` marks the joint variable. Angles are degrees,
//! lengths are dimensionless.

use std::fmt::Write as _;
use std::path::Path;
use std::time::Duration;

use serde::Serialize;
use serde_json::{json, Map, Value};
use thiserror::Error;

use crate::chain::{ChainError, ChainSpec, DhRow, JointType};
use crate::quat::{DualQuaternion, QuatError, StudyPoint};
use crate::solver::IkOutput;

#[derive(Debug, Error)]
pub enum IoError {
    #[error("cannot read {path}: {source}")]
    Read { path: String, source: std::io::Error },
    #[error("invalid JSON: {0}")]
    Json(String),
    #[error("schema error at {location}: {message}")]
    Schema { location: String, message: String },
    #[error("normalization error: {0}")]
    Normalization(String),
    #[error(transparent)]
    Chain(ChainError),
    #[error("invalid pose: {0}")]
    Pose(String),
    #[error("pose is not on the Study quadric (residual {residual:e} > tolerance {tolerance:e})")]
    NotOnStudyQuadric { residual: f64, tolerance: f64 },
    #[error(transparent)]
    Quat(#[from] QuatError),
}

impl IoError {
    fn schema(row: Option<usize>, field: &str, message: impl Into<String>) -> Self {
        let location = match row {
            Some(r) => format!("joints[{}].{field}", r),
            None => field.to_string(),
        };
        IoError::Schema { location, message: message.into() }
    }
}

pub fn parse_chain(path: impl AsRef<Path>) -> Result<ChainSpec<f64>, IoError> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path)
        .map_err(|source| IoError::Read { path: path.display().to_string(), source })?;
    parse_chain_str(&text)
}

pub fn parse_chain_str(text: &str) -> Result<ChainSpec<f64>, IoError> {
    let doc: Value = serde_json::from_str(text).map_err(|e| IoError::Json(e.to_string()))?;
    let obj = doc.as_object().ok_or_else(|| IoError::schema(None, "$", "expected an object"))?;
    for key in obj.keys() {
        if key != "joints" && key != "name" {
            return Err(IoError::schema(None, key, "unknown field"));
        }
    }
    let name = match obj.get("name") {
        None | Some(Value::Null) => None,
        Some(Value::String(s)) => Some(s.clone()),
        Some(_) => return Err(IoError::schema(None, "name", "expected a string")),
    };
    let rows = obj
        .get("joints")
        .and_then(Value::as_array)
        .ok_or_else(|| IoError::schema(None, "joints", "expected an array of 6 rows"))?;
    if rows.len() != 6 {
        return Err(IoError::schema(None, "joints", format!("expected 6 rows, found {}", rows.len())));
    }
    let mut out = Vec::with_capacity(6);
    for (i, row) in rows.iter().enumerate() {
        out.push(parse_row(i, row)?);
    }
    let chain = ChainSpec::new([out[0], out[1], out[2], out[3], out[4], out[5]]).map_err(|e| match e {
        ChainError::NotNormalized(m) => IoError::Normalization(m),
        other => IoError::Chain(other),
    })?;
    Ok(match name {
        Some(n) => chain.with_name(n),
        None => chain,
    })
}

enum Field {
    Star,
    Num(f64),
}

fn field(i: usize, row: &Map<String, Value>, key: &str, star_ok: bool) -> Result<Field, IoError> {
    match row.get(key) {
        None => Err(IoError::schema(Some(i), key, "missing")),
        Some(Value::String(s)) if s == "*" && star_ok => Ok(Field::Star),
        Some(Value::Number(n)) => n
            .as_f64()
            .filter(|x| x.is_finite())
            .map(Field::Num)
            .ok_or_else(|| IoError::schema(Some(i), key, "not a finite number")),
        Some(_) if star_ok => Err(IoError::schema(Some(i), key, "expected a number or \"*\"")),
        Some(_) => Err(IoError::schema(Some(i), key, "expected a number")),
    }
}

fn parse_row(i: usize, v: &Value) -> Result<DhRow<f64>, IoError> {
    let row = v.as_object().ok_or_else(|| IoError::schema(Some(i), "", "expected an object"))?;
    for key in row.keys() {
        if !["type", "theta_deg", "d", "a", "alpha_deg"].contains(&key.as_str()) {
            return Err(IoError::schema(Some(i), key, "unknown field"));
        }
    }
    let joint = match row.get("type").and_then(Value::as_str) {
        Some("R") => JointType::Revolute,
        Some("P") => JointType::Prismatic,
        _ => return Err(IoError::schema(Some(i), "type", "expected \"R\" or \"P\"")),
    };
    let theta = field(i, row, "theta_deg", true)?;
    let d = field(i, row, "d", true)?;
    let num = |f: Field, key: &str| match f {
        Field::Num(x) => Ok(x),
        Field::Star => Err(IoError::schema(Some(i), key, "\"*\" not allowed here")),
    };
    let a = num(field(i, row, "a", false)?, "a")?;
    let alpha = num(field(i, row, "alpha_deg", false)?, "alpha_deg")?;
    let (theta, d) = match (joint, theta, d) {
        (JointType::Revolute, Field::Star, Field::Num(d)) => (None, Some(d)),
        (JointType::Prismatic, Field::Num(t), Field::Star) => (Some(t), None),
        (JointType::Revolute, _, _) => {
            return Err(IoError::schema(Some(i), "theta_deg", "a revolute joint needs theta_deg = \"*\" and a numeric d"))
        }
        (JointType::Prismatic, _, _) => {
            return Err(IoError::schema(Some(i), "d", "a prismatic joint needs d = \"*\" and a numeric theta_deg"))
        }
    };
    DhRow::new(i + 1, joint, theta, d, a, alpha).map_err(IoError::Chain)
}

fn number(x: f64) -> Value {
    // Integral values print without a fractional part, as they usually appear in files.
    if x.fract() == 0.0 && x.abs() < 1e15 && !(x == 0.0 && x.is_sign_negative()) {
        json!(x as i64)
    } else {
        json!(x)
    }
}

/// Chain file text for `chain`; parsing it gives back the same rows.
pub fn emit_chain(chain: &ChainSpec<f64>) -> String {
    let joints: Vec<Value> = chain
        .rows()
        .iter()
        .map(|r| {
            let star = || Value::String("*".into());
            json!({
                "type": r.joint().letter().to_string(),
                "theta_deg": r.theta_deg().map_or_else(star, number),
                "d": r.d().map_or_else(star, number),
                "a": number(r.a()),
                "alpha_deg": number(r.alpha_deg()),
            })
        })
        .collect();
    let mut doc = Map::new();
    if let Some(n) = chain.name() {
        doc.insert("name".into(), Value::String(n.into()));
    }
    doc.insert("joints".into(), Value::Array(joints));
    let mut s = serde_json::to_string_pretty(&Value::Object(doc)).expect("serializable");
    s.push('\n');
    s
}

/// A parsed pose with its distance from the Study quadric.
#[derive(Debug, Clone, PartialEq)]
pub struct PoseInput {
    /// Pose projected onto the quadric.
    pub point: StudyPoint<f64>,
    /// Study residual of the raw input.
    pub residual: f64,
    /// Size of the projection relative to the largest coordinate.
    pub correction: f64,
}

/// Parses 8 Study coordinates `x0,…,x3,y0,…,y3`, or a row-major homogeneous
/// matrix of 12 (3×4) or 16 (4×4) entries.
pub fn parse_pose(arg: &str, tolerance: f64) -> Result<PoseInput, IoError> {
    let vals: Vec<f64> = arg
        .split(|c: char| c == ',' || c.is_whitespace())
        .filter(|s| !s.is_empty())
        .map(|s| s.parse::<f64>().map_err(|_| IoError::Pose(format!("'{s}' is not a number"))))
        .collect::<Result<_, _>>()?;
    if vals.iter().any(|v| !v.is_finite()) {
        return Err(IoError::Pose("non-finite value".into()));
    }
    let raw = match vals.len() {
        8 => StudyPoint::new(std::array::from_fn(|i| vals[i]))?,
        12 | 16 => {
            let mut m = [[0.0; 4]; 4];
            for (k, v) in vals.iter().enumerate() {
                m[k / 4][k % 4] = *v;
            }
            if vals.len() == 12 {
                m[3] = [0.0, 0.0, 0.0, 1.0];
            }
            StudyPoint::from_dual_quaternion(&DualQuaternion::from_matrix(&m)?)?
        }
        n => return Err(IoError::Pose(format!("expected 8, 12 or 16 numbers, found {n}"))),
    };
    let residual = raw.study_residual();
    if residual > tolerance {
        return Err(IoError::NotOnStudyQuadric { residual, tolerance });
    }
    let (point, correction) = raw.project_to_quadric()?;
    Ok(PoseInput { point, residual, correction })
}

pub fn format_pose(p: &StudyPoint<f64>) -> String {
    p.coords().iter().map(|c| format!("{c}")).collect::<Vec<_>>().join(",")
}

#[derive(Debug, Clone, Serialize, PartialEq)]
pub struct SolutionEntry {
    /// Degrees for revolute joints, lengths for prismatic ones.
    pub joints: [f64; 6],
    pub residual: f64,
}

#[derive(Debug, Clone, Serialize, PartialEq)]
pub struct ReportMeta {
    pub families: String,
    pub subset: Vec<usize>,
    pub dropped_form: usize,
    pub f_degrees: [usize; 2],
    pub g_degrees: [usize; 2],
    pub gcd_degree: usize,
    pub resultant_degree: usize,
    pub u_roots: Vec<f64>,
    pub candidates: usize,
    pub rejected: usize,
    pub pose_correction: f64,
    pub notes: Vec<String>,
}

/// Output document `{ "solutions": [...], "meta": {...} }`. Timing is left out so
/// that repeated runs serialize identically.
#[derive(Debug, Clone, Serialize, PartialEq)]
pub struct SolutionReport {
    pub solutions: Vec<SolutionEntry>,
    pub meta: ReportMeta,
}

impl SolutionReport {
    pub fn new(out: &IkOutput<f64>) -> Self {
        let m = &out.meta;
        Self {
            solutions: out
                .solutions
                .iter()
                .map(|s| SolutionEntry { joints: s.external, residual: s.residual })
                .collect(),
            meta: ReportMeta {
                families: m.families(),
                subset: m.subset.clone(),
                dropped_form: m.dropped_form,
                f_degrees: [m.f_degrees.0, m.f_degrees.1],
                g_degrees: [m.g_degrees.0, m.g_degrees.1],
                gcd_degree: m.gcd_degree,
                resultant_degree: m.resultant_degree_bound,
                u_roots: m.u_roots.clone(),
                candidates: m.candidates,
                rejected: m.rejected,
                pose_correction: m.pose_correction,
                notes: m.notes.clone(),
            },
        }
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("serializable");
        s.push('\n');
        s
    }

    pub fn to_table(&self, chain: &ChainSpec<f64>, elapsed: Option<Duration>) -> String {
        let mut s = String::new();
        let header: Vec<String> = chain
            .rows()
            .iter()
            .enumerate()
            .map(|(i, r)| match r.joint() {
                JointType::Revolute => format!("θ{} (deg)", i + 1),
                JointType::Prismatic => format!("d{}", i + 1),
            })
            .collect();
        let _ = write!(s, "{:>3}", "#");
        for h in &header {
            let _ = write!(s, " {:>13}", h);
        }
        let _ = writeln!(s, " {:>10}", "residual");
        for (k, sol) in self.solutions.iter().enumerate() {
            let _ = write!(s, "{:>3}", k + 1);
            for v in sol.joints {
                let _ = write!(s, " {:>13.6}", v);
            }
            let _ = writeln!(s, " {:>10.2e}", sol.residual);
        }
        let m = &self.meta;
        let _ = writeln!(
            s,
            "{} solution(s); families {}; dropped form {}; resultant degree ≤ {}",
            self.solutions.len(),
            m.families,
            m.dropped_form,
            m.resultant_degree
        );
        if m.pose_correction > 0.0 {
            let _ = writeln!(s, "pose projected onto the Study quadric (relative correction {:.2e})", m.pose_correction);
        }
        if let Some(t) = elapsed {
            let _ = writeln!(s, "time {:.3} ms", t.as_secs_f64() * 1e3);
        }
        s
    }
}
