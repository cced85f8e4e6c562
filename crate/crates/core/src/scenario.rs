//! Declarative scenarios (chains, cycles and platforms given by coordinate
//! lists) and the classical fixtures.
//!
//! Coordinates are either exact rationals or reals. A scenario whose data is
//! entirely rational can be analysed exactly.

use alloc::boxed::Box;
use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec;
use alloc::vec::Vec;

use nalgebra::DVector;
use num_traits::{One, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::analysis::Platform;
use crate::chain::Chain;
use crate::exterior::ExteriorVector;
use crate::geometry::{flat_plucker, Axis, Frame, RationalAxis};
use crate::linalg::exact_rank;
use crate::scalar::{int, ratio, Rational, Scalar};
use crate::{binomial, Error, Result};

/// A coordinate: exact when it came from an integer or a fraction.
#[derive(Debug, Clone, PartialEq)]
pub enum Coord {
    Exact(Rational),
    Real(f64),
}

impl Coord {
    pub fn to_f64(&self) -> f64 {
        match self {
            Coord::Exact(q) => q.to_f64(),
            Coord::Real(x) => *x,
        }
    }

    pub fn as_rational(&self) -> Option<&Rational> {
        match self {
            Coord::Exact(q) => Some(q),
            Coord::Real(_) => None,
        }
    }
}

impl From<Rational> for Coord {
    fn from(q: Rational) -> Self {
        Coord::Exact(q)
    }
}

impl From<f64> for Coord {
    fn from(x: f64) -> Self {
        Coord::Real(x)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct AxisSpec {
    pub origin: Vec<Coord>,
    pub dirs: Vec<Vec<Coord>>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct FrameSpec {
    pub origin: Vec<Coord>,
    pub vecs: Vec<Vec<Coord>>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct LegSpec {
    pub p: Vec<Coord>,
    pub q: Vec<Coord>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ScenarioKind {
    Chain,
    Cycle,
    Platform,
}

impl ScenarioKind {
    pub fn as_str(self) -> &'static str {
        match self {
            ScenarioKind::Chain => "chain",
            ScenarioKind::Cycle => "cycle",
            ScenarioKind::Platform => "platform",
        }
    }
}

/// A chain, cycle or platform as plain coordinate data.
///
/// For a chain, `axes` are `A_1..A_{n-1}` and `end_frame` sits on the last
/// body; for a cycle, `axes` are all `n` hinges; for a platform, `legs`
/// carries the bars.
#[derive(Debug, Clone, PartialEq)]
pub struct Scenario {
    pub kind: ScenarioKind,
    pub d: usize,
    pub axes: Vec<AxisSpec>,
    pub end_frame: Option<FrameSpec>,
    pub panel: bool,
    pub legs: Vec<LegSpec>,
    pub seed: Option<u64>,
    pub tol: Option<f64>,
}

/// A validated scenario ready for analysis.
#[derive(Debug, Clone, PartialEq)]
pub enum Model {
    Chain(Chain),
    Platform(Platform),
}

fn at(path: String, e: Error) -> Error {
    Error::Scenario { path, source: Box::new(e) }
}

fn reals(xs: &[Coord]) -> DVector<f64> {
    DVector::from_iterator(xs.len(), xs.iter().map(Coord::to_f64))
}

fn rationals(xs: &[Coord], path: &str) -> Result<Vec<Rational>> {
    xs.iter()
        .enumerate()
        .map(|(i, c)| {
            c.as_rational().cloned().ok_or_else(|| {
                Error::NotRational(format!("{path}[{i}] = {} is not given as an integer or fraction", c.to_f64()))
            })
        })
        .collect()
}

fn check_len(xs: &[Coord], d: usize, path: impl FnOnce() -> String) -> Result<()> {
    if xs.len() != d {
        return Err(at(path(), Error::Dimension { expected: d, found: xs.len() }));
    }
    Ok(())
}

impl Scenario {
    fn check_shape(&self) -> Result<()> {
        let d = self.d;
        if d < 2 {
            return Err(at("d".into(), Error::Dimension { expected: 2, found: d }));
        }
        match self.kind {
            ScenarioKind::Chain => {
                if self.axes.is_empty() {
                    return Err(at("axes".into(), Error::EmptyInput("a chain needs at least one axis")));
                }
                if self.end_frame.is_none() {
                    return Err(at("end_frame".into(), Error::EmptyInput("a chain needs an end frame")));
                }
            }
            ScenarioKind::Cycle => {
                if self.axes.len() < 2 {
                    return Err(at("axes".into(), Error::InvalidChain("a cycle needs at least two axes".into())));
                }
            }
            ScenarioKind::Platform => {
                if self.legs.len() != binomial(d + 1, 2) {
                    return Err(at(
                        "legs".into(),
                        Error::Dimension { expected: binomial(d + 1, 2), found: self.legs.len() },
                    ));
                }
            }
        }
        for (i, a) in self.axes.iter().enumerate() {
            check_len(&a.origin, d, || format!("axes[{i}].origin"))?;
            if a.dirs.len() != d - 2 {
                return Err(at(format!("axes[{i}].dirs"), Error::Dimension { expected: d - 2, found: a.dirs.len() }));
            }
            for (j, v) in a.dirs.iter().enumerate() {
                check_len(v, d, || format!("axes[{i}].dirs[{j}]"))?;
            }
        }
        if let Some(f) = &self.end_frame {
            check_len(&f.origin, d, || "end_frame.origin".into())?;
            if f.vecs.len() > d {
                return Err(at("end_frame.vecs".into(), Error::Dimension { expected: d, found: f.vecs.len() }));
            }
            for (j, v) in f.vecs.iter().enumerate() {
                check_len(v, d, || format!("end_frame.vecs[{j}]"))?;
            }
        }
        for (i, l) in self.legs.iter().enumerate() {
            check_len(&l.p, d, || format!("legs[{i}].p"))?;
            check_len(&l.q, d, || format!("legs[{i}].q"))?;
        }
        Ok(())
    }

    /// Hinges as orthonormalized axes.
    pub fn axes(&self) -> Result<Vec<Axis>> {
        self.check_shape()?;
        self.axes
            .iter()
            .enumerate()
            .map(|(i, a)| {
                Axis::new(reals(&a.origin), a.dirs.iter().map(|v| reals(v)).collect())
                    .map_err(|e| at(format!("axes[{i}]"), e))
            })
            .collect()
    }

    pub fn to_model(&self) -> Result<Model> {
        self.check_shape()?;
        match self.kind {
            ScenarioKind::Platform => {
                let legs = self.legs.iter().map(|l| (reals(&l.p), reals(&l.q))).collect();
                Platform::new(self.d, legs).map(Model::Platform).map_err(|e| at("legs".into(), e))
            }
            ScenarioKind::Chain | ScenarioKind::Cycle => {
                let axes = self.axes()?;
                let chain = if self.kind == ScenarioKind::Cycle {
                    Chain::cycle(axes).map_err(|e| at("axes".into(), e))?
                } else {
                    let f = self.end_frame.as_ref().expect("checked");
                    let frame = Frame::new(reals(&f.origin), f.vecs.iter().map(|v| reals(v)).collect())
                        .map_err(|e| at("end_frame".into(), e))?;
                    Chain::open(axes, frame).map_err(|e| at("end_frame".into(), e))?
                };
                let chain = if self.panel { chain.with_panels().map_err(|e| at("panel".into(), e))? } else { chain };
                Ok(Model::Chain(chain))
            }
        }
    }

    /// Hinges with exact coordinates; fails unless every coordinate is
    /// rational.
    pub fn exact_axes(&self) -> Result<Vec<RationalAxis>> {
        self.check_shape()?;
        self.axes
            .iter()
            .enumerate()
            .map(|(i, a)| {
                let origin = rationals(&a.origin, &format!("axes[{i}].origin"))?;
                let dirs = a
                    .dirs
                    .iter()
                    .enumerate()
                    .map(|(j, v)| rationals(v, &format!("axes[{i}].dirs[{j}]")))
                    .collect::<Result<Vec<_>>>()?;
                RationalAxis::new(origin, dirs).map_err(|e| at(format!("axes[{i}]"), e))
            })
            .collect()
    }

    /// Exact end frame `(origin, vecs)` of a chain.
    pub fn exact_frame(&self) -> Result<(Vec<Rational>, Vec<Vec<Rational>>)> {
        self.check_shape()?;
        let f = self.end_frame.as_ref().ok_or_else(|| at("end_frame".into(), Error::EmptyInput("no end frame")))?;
        let origin = rationals(&f.origin, "end_frame.origin")?;
        let vecs = f
            .vecs
            .iter()
            .enumerate()
            .map(|(j, v)| rationals(v, &format!("end_frame.vecs[{j}]")))
            .collect::<Result<Vec<_>>>()?;
        Ok((origin, vecs))
    }

    pub fn exact_legs(&self) -> Result<Vec<(Vec<Rational>, Vec<Rational>)>> {
        self.check_shape()?;
        self.legs
            .iter()
            .enumerate()
            .map(|(i, l)| Ok((rationals(&l.p, &format!("legs[{i}].p"))?, rationals(&l.q, &format!("legs[{i}].q"))?)))
            .collect()
    }
}

/// Names accepted by [`classical_scenario`].
pub const CLASSICAL_SCENARIOS: &[&str] = &[
    "twisted-cubic-tangents",
    "bricard-symmetric-six",
    "cyclohexane-panels",
    "desargues",
    "planar-arm",
    "generic-cycle",
    "generic-chain",
];

/// Parameters of a classical scenario. `values` holds the curve parameters
/// of `twisted-cubic-tangents`, the bar lengths of `planar-arm`, or the
/// off-perspective shift of `desargues`; `d` and `n` size the generic
/// scenarios.
#[derive(Debug, Clone, PartialEq)]
pub struct ScenarioParams {
    pub seed: u64,
    pub d: Option<usize>,
    pub n: Option<usize>,
    pub values: Vec<Rational>,
}

impl Default for ScenarioParams {
    fn default() -> Self {
        Self { seed: 1, d: None, n: None, values: Vec::new() }
    }
}

fn exact(xs: &[Rational]) -> Vec<Coord> {
    xs.iter().cloned().map(Coord::Exact).collect()
}

fn ints(xs: &[i64]) -> Vec<Rational> {
    xs.iter().map(|&x| int(x)).collect()
}

fn axis_spec(origin: &[Rational], dirs: &[Vec<Rational>]) -> AxisSpec {
    AxisSpec { origin: exact(origin), dirs: dirs.iter().map(|v| exact(v)).collect() }
}

fn base(kind: ScenarioKind, d: usize) -> Scenario {
    Scenario { kind, d, axes: Vec::new(), end_frame: None, panel: false, legs: Vec::new(), seed: None, tol: None }
}

/// Tangent lines of the twisted cubic `t ↦ (t, t², t³)` as 2-vectors
/// `(t, t², t³, 1) ∧ (1, 2t, 3t², 0)` in `Λ^2 R^4`.
pub fn twisted_cubic_tangents(ts: &[Rational]) -> Result<Vec<ExteriorVector<Rational>>> {
    check_distinct(ts)?;
    ts.iter()
        .map(|t| {
            let (point, dir) = cubic_tangent(t);
            flat_plucker(&point, &[dir])
        })
        .collect()
}

fn cubic_tangent(t: &Rational) -> (Vec<Rational>, Vec<Rational>) {
    let t2 = t * t;
    let t3 = &t2 * t;
    (vec![t.clone(), t2.clone(), t3], vec![Rational::one(), t * int(2), t2 * int(3)])
}

fn check_distinct(ts: &[Rational]) -> Result<()> {
    for i in 0..ts.len() {
        if ts[..i].contains(&ts[i]) {
            return Err(Error::ScenarioParameters(format!("duplicate curve parameter {}", ts[i])));
        }
    }
    Ok(())
}

/// Uniform rational in `[-4, 4]` with denominator 16.
fn random_coord(rng: &mut ChaCha8Rng) -> Rational {
    ratio(rng.random_range(-64..=64), 16)
}

fn random_point(rng: &mut ChaCha8Rng, d: usize) -> Vec<Rational> {
    (0..d).map(|_| random_coord(rng)).collect()
}

fn random_rational_axis(rng: &mut ChaCha8Rng, d: usize) -> (Vec<Rational>, Vec<Vec<Rational>>) {
    let origin = random_point(rng, d);
    loop {
        let dirs: Vec<Vec<Rational>> = (0..d - 2).map(|_| random_point(rng, d)).collect();
        if exact_rank(&dirs, d).0 == d - 2 {
            return (origin, dirs);
        }
    }
}

fn generic_dims(p: &ScenarioParams, d0: usize, n0: usize) -> Result<(usize, usize)> {
    let d = p.d.unwrap_or(d0);
    let n = p.n.unwrap_or(n0);
    if !(2..=7).contains(&d) {
        return Err(Error::ScenarioParameters(format!("dimension {d} outside 2..=7")));
    }
    if n < 2 {
        return Err(Error::ScenarioParameters(format!("need at least two bodies, got {n}")));
    }
    Ok((d, n))
}

/// Builds a named classical scenario. All coordinates are rational.
pub fn classical_scenario(name: &str, p: &ScenarioParams) -> Result<Scenario> {
    let mut rng = ChaCha8Rng::seed_from_u64(p.seed);
    let mut s = match name {
        "twisted-cubic-tangents" => {
            let ts = if p.values.is_empty() { ints(&[0, 1, -1, 2, -2, 3]) } else { p.values.clone() };
            check_distinct(&ts)?;
            if ts.len() < 2 {
                return Err(Error::ScenarioParameters("need at least two tangents".into()));
            }
            let mut s = base(ScenarioKind::Cycle, 3);
            s.axes = ts
                .iter()
                .map(|t| {
                    let (point, dir) = cubic_tangent(t);
                    axis_spec(&point, &[dir])
                })
                .collect();
            s
        }
        "bricard-symmetric-six" => {
            // three hinges and their images under the half-turn about the z-axis
            let half: Vec<_> = (0..3).map(|_| random_rational_axis(&mut rng, 3)).collect();
            let flip = |v: &[Rational]| vec![-v[0].clone(), -v[1].clone(), v[2].clone()];
            let mut s = base(ScenarioKind::Cycle, 3);
            s.axes = half.iter().map(|(o, dirs)| axis_spec(o, dirs)).collect();
            s.axes.extend(half.iter().map(|(o, dirs)| axis_spec(&flip(o), &[flip(&dirs[0])])));
            s.seed = Some(p.seed);
            s
        }
        "cyclohexane-panels" => {
            // chair ring: alternating heights; hinges along the six bonds
            let atoms: Vec<Vec<Rational>> = [[2, 0, 1], [1, 2, -1], [-1, 2, 1], [-2, 0, -1], [-1, -2, 1], [1, -2, -1]]
                .iter()
                .map(|a| ints(a))
                .collect();
            let mut s = base(ScenarioKind::Cycle, 3);
            s.axes = (0..6)
                .map(|i| {
                    let (a, b) = (&atoms[i], &atoms[(i + 1) % 6]);
                    let dir: Vec<Rational> = b.iter().zip(a).map(|(x, y)| x - y).collect();
                    axis_spec(a, &[dir])
                })
                .collect();
            s.panel = true;
            s
        }
        "desargues" => {
            // two triangles in perspective from (1, 1); `values[0]` shifts one vertex
            let shift = p.values.first().cloned().unwrap_or_else(Rational::zero);
            let ps = [[0, 0], [4, 0], [0, 4]];
            let mut qs: Vec<Vec<Rational>> = [[2, 2], [7, -1], [-2, 10]].iter().map(|q| ints(q)).collect();
            qs[0][0] += shift;
            let mut s = base(ScenarioKind::Platform, 2);
            s.legs = ps.iter().zip(&qs).map(|(p, q)| LegSpec { p: exact(&ints(p)), q: exact(q) }).collect();
            s
        }
        "planar-arm" => {
            let lengths = if p.values.is_empty() { ints(&[1, 1, 1]) } else { p.values.clone() };
            if lengths.iter().any(|l| *l <= Rational::zero()) {
                return Err(Error::ScenarioParameters("bar lengths must be positive".into()));
            }
            let mut s = base(ScenarioKind::Chain, 2);
            let mut x = Rational::zero();
            for l in &lengths {
                s.axes.push(axis_spec(&[x.clone(), Rational::zero()], &[]));
                x += l;
            }
            s.end_frame = Some(FrameSpec { origin: exact(&[x, Rational::zero()]), vecs: Vec::new() });
            s
        }
        "generic-cycle" => {
            let (d, n) = generic_dims(p, 3, 7)?;
            let mut s = base(ScenarioKind::Cycle, d);
            s.axes = (0..n).map(|_| random_rational_axis(&mut rng, d)).map(|(o, dirs)| axis_spec(&o, &dirs)).collect();
            s.seed = Some(p.seed);
            s
        }
        "generic-chain" => {
            let (d, n) = generic_dims(p, 3, 5)?;
            let mut s = base(ScenarioKind::Chain, d);
            s.axes =
                (0..n - 1).map(|_| random_rational_axis(&mut rng, d)).map(|(o, dirs)| axis_spec(&o, &dirs)).collect();
            s.end_frame = Some(FrameSpec { origin: exact(&random_point(&mut rng, d)), vecs: Vec::new() });
            s.seed = Some(p.seed);
            s
        }
        other => return Err(Error::UnknownScenario(other.to_string())),
    };
    if s.seed.is_none() && p.seed != 1 {
        s.seed = Some(p.seed);
    }
    Ok(s)
}
