//! JSON file formats for scenarios and linkages.
//!
//! Scenario numbers are exact when written as JSON integers or as `"a/b"`
//! strings, and real when written with a fraction or exponent.

use std::fmt;
use std::str::FromStr;

use hingekit_core::linkage::{Edge, Linkage, Vertex, VertexLabel};
use hingekit_core::scalar::Rational;
use hingekit_core::scenario::{AxisSpec, Coord, FrameSpec, LegSpec, Scenario, ScenarioKind};
use serde::de::{self, Visitor};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

/// A malformed or invalid input file.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum FormatError {
    #[error("{path}: {message} at line {line}, column {column}")]
    Syntax { path: String, line: usize, column: usize, message: String },

    #[error("{0}")]
    Semantic(#[from] hingekit_core::Error),
}

impl FormatError {
    pub fn core(&self) -> Option<&hingekit_core::Error> {
        match self {
            FormatError::Semantic(e) => Some(e),
            FormatError::Syntax { .. } => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
struct Num(Coord);

impl Serialize for Num {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        match &self.0 {
            Coord::Real(x) => s.serialize_f64(*x),
            Coord::Exact(q) => {
                if q.is_integer() {
                    if let Ok(i) = q.numer().to_string().parse::<i64>() {
                        return s.serialize_i64(i);
                    }
                }
                s.serialize_str(&q.to_string())
            }
        }
    }
}

struct NumVisitor;

impl Visitor<'_> for NumVisitor {
    type Value = Num;

    fn expecting(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("a number or a rational string \"a/b\"")
    }

    fn visit_i64<E: de::Error>(self, v: i64) -> Result<Num, E> {
        Ok(Num(Coord::Exact(Rational::from_integer(v.into()))))
    }

    fn visit_u64<E: de::Error>(self, v: u64) -> Result<Num, E> {
        Ok(Num(Coord::Exact(Rational::from_integer(v.into()))))
    }

    fn visit_f64<E: de::Error>(self, v: f64) -> Result<Num, E> {
        if !v.is_finite() {
            return Err(E::custom("non-finite number"));
        }
        Ok(Num(Coord::Real(v)))
    }

    fn visit_str<E: de::Error>(self, v: &str) -> Result<Num, E> {
        match Rational::from_str(v.trim()) {
            Ok(q) => Ok(Num(Coord::Exact(q))),
            Err(_) => Err(E::custom(format!("invalid rational `{v}`"))),
        }
    }
}

impl<'de> Deserialize<'de> for Num {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        d.deserialize_any(NumVisitor)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
enum Kind {
    Chain,
    Cycle,
    Platform,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct AxisFile {
    origin: Vec<Num>,
    dirs: Vec<Vec<Num>>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct FrameFile {
    origin: Vec<Num>,
    #[serde(default)]
    vecs: Vec<Vec<Num>>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct LegFile {
    p: Vec<Num>,
    q: Vec<Num>,
}

fn is_false(b: &bool) -> bool {
    !*b
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct ScenarioFile {
    kind: Kind,
    d: usize,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    axes: Vec<AxisFile>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    end_frame: Option<FrameFile>,
    #[serde(default, skip_serializing_if = "is_false")]
    panel: bool,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    legs: Vec<LegFile>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    seed: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    tol: Option<f64>,
}

fn coords(xs: Vec<Num>) -> Vec<Coord> {
    xs.into_iter().map(|n| n.0).collect()
}

fn nums(xs: &[Coord]) -> Vec<Num> {
    xs.iter().cloned().map(Num).collect()
}

impl From<ScenarioFile> for Scenario {
    fn from(f: ScenarioFile) -> Self {
        Scenario {
            kind: match f.kind {
                Kind::Chain => ScenarioKind::Chain,
                Kind::Cycle => ScenarioKind::Cycle,
                Kind::Platform => ScenarioKind::Platform,
            },
            d: f.d,
            axes: f
                .axes
                .into_iter()
                .map(|a| AxisSpec { origin: coords(a.origin), dirs: a.dirs.into_iter().map(coords).collect() })
                .collect(),
            end_frame: f
                .end_frame
                .map(|e| FrameSpec { origin: coords(e.origin), vecs: e.vecs.into_iter().map(coords).collect() }),
            panel: f.panel,
            legs: f.legs.into_iter().map(|l| LegSpec { p: coords(l.p), q: coords(l.q) }).collect(),
            seed: f.seed,
            tol: f.tol,
        }
    }
}

impl From<&Scenario> for ScenarioFile {
    fn from(s: &Scenario) -> Self {
        ScenarioFile {
            kind: match s.kind {
                ScenarioKind::Chain => Kind::Chain,
                ScenarioKind::Cycle => Kind::Cycle,
                ScenarioKind::Platform => Kind::Platform,
            },
            d: s.d,
            axes: s
                .axes
                .iter()
                .map(|a| AxisFile { origin: nums(&a.origin), dirs: a.dirs.iter().map(|v| nums(v)).collect() })
                .collect(),
            end_frame: s
                .end_frame
                .as_ref()
                .map(|e| FrameFile { origin: nums(&e.origin), vecs: e.vecs.iter().map(|v| nums(v)).collect() }),
            panel: s.panel,
            legs: s.legs.iter().map(|l| LegFile { p: nums(&l.p), q: nums(&l.q) }).collect(),
            seed: s.seed,
            tol: s.tol,
        }
    }
}

fn syntax(path: String, e: serde_json::Error) -> FormatError {
    let message = e.to_string();
    // serde_json appends its own position; keep only the message
    let message = match message.rfind(" at line ") {
        Some(i) => message[..i].to_string(),
        None => message,
    };
    FormatError::Syntax { path, line: e.line(), column: e.column(), message }
}

fn parse_with_path<'a, T: Deserialize<'a>>(text: &'a str) -> Result<T, FormatError> {
    let mut de = serde_json::Deserializer::from_str(text);
    let value = serde_path_to_error::deserialize(&mut de).map_err(|e| {
        let path = e.path().to_string();
        syntax(path, e.into_inner())
    })?;
    de.end().map_err(|e| syntax(".".into(), e))?;
    Ok(value)
}

/// Parses and validates a scenario file.
pub fn parse_scenario(text: &str) -> Result<Scenario, FormatError> {
    let file: ScenarioFile = parse_with_path(text)?;
    let s = Scenario::from(file);
    if let Some(t) = s.tol {
        if !(t.is_finite() && t > 0.0) {
            return Err(FormatError::Semantic(hingekit_core::Error::Scenario {
                path: "tol".into(),
                source: Box::new(hingekit_core::Error::ScenarioParameters("tolerance must be positive".into())),
            }));
        }
    }
    s.to_model()?;
    Ok(s)
}

/// Writes a scenario as pretty-printed JSON.
pub fn emit_scenario(s: &Scenario) -> String {
    let mut out = serde_json::to_string_pretty(&ScenarioFile::from(s)).expect("scenario serializes");
    out.push('\n');
    out
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct VertexFile {
    label: String,
    coords: Vec<f64>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct EdgeFile {
    a: String,
    b: String,
    length: f64,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct LinkageFile {
    d: usize,
    n: usize,
    vertices: Vec<VertexFile>,
    edges: Vec<EdgeFile>,
}

fn label(s: &str, path: String) -> Result<VertexLabel, FormatError> {
    s.parse().map_err(|e| FormatError::Semantic(hingekit_core::Error::Scenario { path, source: Box::new(e) }))
}

/// Parses a linkage file. Labels must be well formed and every edge must
/// join listed vertices.
pub fn parse_linkage(text: &str) -> Result<Linkage, FormatError> {
    let f: LinkageFile = parse_with_path(text)?;
    let mut vertices = Vec::with_capacity(f.vertices.len());
    for (i, v) in f.vertices.into_iter().enumerate() {
        if v.coords.len() != f.d {
            return Err(FormatError::Semantic(hingekit_core::Error::Scenario {
                path: format!("vertices[{i}].coords"),
                source: Box::new(hingekit_core::Error::Dimension { expected: f.d, found: v.coords.len() }),
            }));
        }
        vertices.push(Vertex { label: label(&v.label, format!("vertices[{i}].label"))?, coords: v.coords });
    }
    let mut edges = Vec::with_capacity(f.edges.len());
    for (i, e) in f.edges.into_iter().enumerate() {
        let a = label(&e.a, format!("edges[{i}].a"))?;
        let b = label(&e.b, format!("edges[{i}].b"))?;
        for (end, l) in [("a", a), ("b", b)] {
            if !vertices.iter().any(|v| v.label == l) {
                return Err(FormatError::Semantic(hingekit_core::Error::Scenario {
                    path: format!("edges[{i}].{end}"),
                    source: Box::new(hingekit_core::Error::Provenance(format!("unknown vertex `{l}`"))),
                }));
            }
        }
        edges.push(Edge { a, b, length: e.length });
    }
    Ok(Linkage { d: f.d, n: f.n, vertices, edges })
}

pub fn emit_linkage(lk: &Linkage) -> String {
    let f = LinkageFile {
        d: lk.d,
        n: lk.n,
        vertices: lk
            .vertices
            .iter()
            .map(|v| VertexFile { label: v.label.to_string(), coords: v.coords.clone() })
            .collect(),
        edges: lk.edges.iter().map(|e| EdgeFile { a: e.a.to_string(), b: e.b.to_string(), length: e.length }).collect(),
    };
    let mut out = serde_json::to_string_pretty(&f).expect("linkage serializes");
    out.push('\n');
    out
}
