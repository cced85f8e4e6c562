//! Analysis results in human-readable and JSON form.

use std::fmt::Write as _;

use hingekit_core::analysis::{ExactVerdict, Verdict, Witness};
use hingekit_core::scalar::Rational;
use serde::Serialize;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Subject {
    EndpointMap,
    FrameMap,
    Cycle,
    Platform,
}

impl Subject {
    fn describe(self) -> &'static str {
        match self {
            Subject::EndpointMap => "end-point map",
            Subject::FrameMap => "end-frame map",
            Subject::Cycle => "cycle",
            Subject::Platform => "platform",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "type", rename_all = "lowercase")]
pub enum WitnessReport {
    Lines { point: Vec<f64>, directions: Vec<Vec<f64>> },
    Hyperplane { coefficients: Vec<f64> },
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Outcome {
    pub rank: usize,
    pub full_rank: usize,
    pub singular: bool,
    pub verdict: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub mobility: Option<usize>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub singular_values: Vec<f64>,
    /// Floats for numeric results, `"a/b"` strings for exact ones.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub conull: Option<Vec<serde_json::Value>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub witness: Option<WitnessReport>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Report {
    pub subject: Subject,
    pub d: usize,
    /// Joint angles of the analysed placement, for chains.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub theta: Option<Vec<f64>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub numeric: Option<Outcome>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub exact: Option<Outcome>,
}

fn word(subject: Subject, singular: bool, mobility: Option<usize>) -> &'static str {
    match subject {
        Subject::EndpointMap | Subject::FrameMap => {
            if singular {
                "singular"
            } else {
                "regular"
            }
        }
        Subject::Platform => {
            if singular {
                "flexible"
            } else {
                "rigid"
            }
        }
        Subject::Cycle => {
            if mobility.unwrap_or(0) > 0 {
                "flexible"
            } else {
                "rigid"
            }
        }
    }
}

fn phrase(subject: Subject, rank: usize, full: usize, singular: bool, mobility: Option<usize>) -> String {
    let rel = if rank < full { '<' } else { '=' };
    format!("{} (rank {rank} {rel} {full})", word(subject, singular, mobility))
}

fn rational_value(q: &Rational) -> serde_json::Value {
    if q.is_integer() {
        if let Ok(i) = q.numer().to_string().parse::<i64>() {
            return i.into();
        }
    }
    q.to_string().into()
}

pub fn numeric_outcome(subject: Subject, v: &Verdict) -> Outcome {
    Outcome {
        rank: v.rank,
        full_rank: v.full_rank,
        singular: v.singular,
        verdict: phrase(subject, v.rank, v.full_rank, v.singular, v.mobility),
        mobility: v.mobility,
        singular_values: v.certificate.singular_values.clone(),
        conull: v.certificate.conull.as_ref().map(|c| c.iter().map(|&x| x.into()).collect()),
        witness: v.witness.as_ref().map(|w| match w {
            Witness::Lines { point, directions } => WitnessReport::Lines {
                point: point.iter().copied().collect(),
                directions: directions.iter().map(|u| u.iter().copied().collect()).collect(),
            },
            Witness::Hyperplane(c) => WitnessReport::Hyperplane { coefficients: c.clone() },
        }),
    }
}

pub fn exact_outcome(subject: Subject, v: &ExactVerdict) -> Outcome {
    Outcome {
        rank: v.rank,
        full_rank: v.full_rank,
        singular: v.singular,
        verdict: phrase(subject, v.rank, v.full_rank, v.singular, v.mobility),
        mobility: v.mobility,
        singular_values: Vec::new(),
        conull: v.certificate.conull.as_ref().map(|c| c.iter().map(rational_value).collect()),
        witness: None,
    }
}

fn num(x: f64) -> String {
    let x = if x.abs() < 1e-12 { 0.0 } else { x };
    let s = format!("{x:.6e}");
    if s.starts_with("-0.000000e") {
        s[1..].to_string()
    } else {
        s
    }
}

fn list(xs: impl IntoIterator<Item = f64>) -> String {
    let parts: Vec<String> = xs.into_iter().map(num).collect();
    format!("({})", parts.join(", "))
}

fn value(v: &serde_json::Value) -> String {
    match v {
        serde_json::Value::Number(n) if n.is_f64() => num(n.as_f64().unwrap_or(f64::NAN)),
        serde_json::Value::String(s) => s.clone(),
        other => other.to_string(),
    }
}

fn outcome_text(out: &mut String, label: &str, prefix: &str, o: &Outcome) {
    let _ = writeln!(out, "{label}: {}", o.verdict);
    if let Some(m) = o.mobility {
        let _ = writeln!(out, "{prefix}mobility: {m}");
    }
    if !o.singular_values.is_empty() {
        let _ = writeln!(out, "{prefix}singular values: {}", list(o.singular_values.iter().copied()));
    }
    match (&o.conull, &o.witness) {
        (_, Some(WitnessReport::Hyperplane { .. })) | (None, _) => {}
        (Some(c), _) => {
            let parts: Vec<String> = c.iter().map(value).collect();
            let _ = writeln!(out, "{prefix}conull: ({})", parts.join(", "));
        }
    }
    match &o.witness {
        Some(WitnessReport::Lines { point, directions }) => {
            for u in directions {
                let _ = writeln!(
                    out,
                    "witness line: through {} direction {}",
                    list(point.iter().copied()),
                    list(u.iter().copied())
                );
            }
        }
        Some(WitnessReport::Hyperplane { coefficients }) => {
            let _ = writeln!(out, "witness hyperplane: {}", list(coefficients.iter().copied()));
        }
        None => {}
    }
}

impl Report {
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "{} in R^{}", self.subject.describe(), self.d);
        if let Some(t) = &self.theta {
            let _ = writeln!(out, "theta: {}", list(t.iter().copied()));
        }
        if let Some(o) = &self.numeric {
            outcome_text(&mut out, "numeric", "", o);
        }
        if let Some(o) = &self.exact {
            outcome_text(&mut out, "exact", "exact ", o);
        }
        out
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("report serializes");
        s.push('\n');
        s
    }
}
