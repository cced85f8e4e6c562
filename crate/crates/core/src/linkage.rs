//! Canonical bar-joint linkages of generic cycles.
//!
//! The `2n` vertices sit in a cyclic sequence. For odd `d = 2k + 1` these are
//! the feet of the common perpendiculars between consecutive lines
//! `l_j = A_j ∩ ... ∩ A_{j+k-1}`, in the order `foot-_j, foot+_j`. For even
//! `d = 2k` they are `p_j = A_j ∩ ... ∩ A_{j+k-1}` followed by `q_{j+1}`, the
//! projection of `p_{j+2}` onto `A_{j+1} ∩ ... ∩ A_{j+k-1}`. The simplex of
//! the body between `A_i` and `A_{i+1}` is the window of `d + 1` consecutive
//! vertices starting at position `2(i - k + 1)`; the linkage is the union of
//! the edges of these `n` simplices.
//!
//! In the plane the linkage degenerates to the polygon of joints.

use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;
use core::str::FromStr;

use nalgebra::{DMatrix, DVector};

use crate::chain::{closure_residual, forward_kinematics, Chain, Configuration};
use crate::geometry::{affine_intersection, common_perpendicular, project_affine, AffineSubspace, Axis};
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Role {
    FootMinus,
    FootPlus,
    P,
    Q,
    Joint,
}

impl Role {
    fn as_str(self) -> &'static str {
        match self {
            Role::FootMinus => "foot-",
            Role::FootPlus => "foot+",
            Role::P => "p",
            Role::Q => "q",
            Role::Joint => "joint",
        }
    }
}

/// Provenance of a vertex: the (1-based) index of the first axis of the
/// intersection it was built on, and its role there.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct VertexLabel {
    pub axis: usize,
    pub role: Role,
}

impl fmt::Display for VertexLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}", self.axis, self.role.as_str())
    }
}

impl FromStr for VertexLabel {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::Provenance(format!("malformed vertex label `{s}`"));
        let (axis, role) = s.split_once(':').ok_or_else(bad)?;
        let axis: usize = axis.parse().map_err(|_| bad())?;
        let role = match role {
            "foot-" => Role::FootMinus,
            "foot+" => Role::FootPlus,
            "p" => Role::P,
            "q" => Role::Q,
            "joint" => Role::Joint,
            _ => return Err(bad()),
        };
        if axis == 0 {
            return Err(bad());
        }
        Ok(VertexLabel { axis, role })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Vertex {
    pub label: VertexLabel,
    pub coords: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Edge {
    pub a: VertexLabel,
    pub b: VertexLabel,
    pub length: f64,
}

/// A weighted graph with a realization of its vertices in `R^d`.
#[derive(Debug, Clone, PartialEq)]
pub struct Linkage {
    pub d: usize,
    pub n: usize,
    pub vertices: Vec<Vertex>,
    pub edges: Vec<Edge>,
}

/// Edge lengths split into independent moduli and the lengths fixed by the
/// right angles of the canonical construction.
#[derive(Debug, Clone, PartialEq)]
pub struct Moduli {
    pub independent: Vec<Edge>,
    pub dependent: Vec<Edge>,
    pub note: &'static str,
}

impl Moduli {
    pub fn invariants(&self) -> Vec<f64> {
        self.independent.iter().map(|e| e.length).collect()
    }
}

fn half(d: usize) -> usize {
    if d % 2 == 1 {
        (d - 1) / 2
    } else {
        d / 2
    }
}

fn sequence_labels(d: usize, n: usize) -> Vec<VertexLabel> {
    if d == 2 {
        return (1..=n).map(|axis| VertexLabel { axis, role: Role::Joint }).collect();
    }
    let mut out = Vec::with_capacity(2 * n);
    for j in 0..n {
        if d % 2 == 1 {
            out.push(VertexLabel { axis: j + 1, role: Role::FootMinus });
            out.push(VertexLabel { axis: j + 1, role: Role::FootPlus });
        } else {
            out.push(VertexLabel { axis: j + 1, role: Role::P });
            out.push(VertexLabel { axis: (j + 1) % n + 1, role: Role::Q });
        }
    }
    out
}

/// Position pairs `(p, q)` of the edges, in emission order.
fn edge_positions(d: usize, n: usize) -> Vec<(usize, usize)> {
    if d == 2 {
        return (0..n).map(|i| (i, (i + 1) % n)).collect();
    }
    let len = 2 * n;
    let mut out = Vec::with_capacity((2 * d - 1) * n);
    for p in 0..len {
        for delta in 1..=d {
            if delta < d || p % 2 == 0 {
                out.push((p, (p + delta) % len));
            }
        }
    }
    out
}

impl Linkage {
    /// Vertex positions of the simplex of each body `B_{i+1}`, between
    /// `A_i` and `A_{i+1}`, for `i = 1..n`. Empty in the plane.
    pub fn simplex_positions(&self) -> Vec<Vec<usize>> {
        if self.d == 2 {
            return Vec::new();
        }
        let (n, d, k) = (self.n as isize, self.d as isize, half(self.d) as isize);
        (0..n)
            .map(|i| {
                let start = 2 * (i - k + 1);
                (0..=d).map(|t| (start + t).rem_euclid(2 * n) as usize).collect()
            })
            .collect()
    }

    /// Labels of each body simplex.
    pub fn simplices(&self) -> Vec<Vec<VertexLabel>> {
        self.simplex_positions().iter().map(|s| s.iter().map(|&p| self.vertices[p].label).collect()).collect()
    }

    /// Sign of `det[v_1 - v_0, ..., v_d - v_0]` for each simplex.
    pub fn simplex_orientations(&self) -> Vec<i8> {
        self.simplex_positions()
            .iter()
            .map(|s| {
                let det = simplex_matrix(&self.vertices, s).determinant();
                if det > 0.0 {
                    1
                } else if det < 0.0 {
                    -1
                } else {
                    0
                }
            })
            .collect()
    }

    pub fn vertex(&self, label: &VertexLabel) -> Option<&Vertex> {
        self.vertices.iter().find(|v| v.label == *label)
    }
}

fn simplex_matrix(vertices: &[Vertex], s: &[usize]) -> DMatrix<f64> {
    let d = vertices[s[0]].coords.len();
    let v0 = &vertices[s[0]].coords;
    DMatrix::from_fn(d, s.len() - 1, |r, c| vertices[s[c + 1]].coords[r] - v0[r])
}

fn window_axes(axes: &[Axis], start: usize, count: usize) -> Vec<AffineSubspace> {
    (0..count).map(|t| AffineSubspace::from(&axes[(start + t) % axes.len()])).collect()
}

fn generic_flat(axes: &[Axis], start: usize, count: usize, dim: usize) -> Result<AffineSubspace> {
    let non_generic = |reason: String| Error::NonGeneric { window: start + 1, reason };
    let cut = affine_intersection(&window_axes(axes, start, count))?;
    if cut.near_degenerate {
        return Err(non_generic(format!("intersection of {count} axes is ill-conditioned")));
    }
    let flat = cut.subspace.ok_or_else(|| non_generic(format!("{count} consecutive axes do not meet")))?;
    if flat.dim() != dim {
        return Err(non_generic(format!("{count} consecutive axes meet in dimension {}, expected {dim}", flat.dim())));
    }
    Ok(flat)
}

/// Canonical linkage of a generic cycle of `n > d` hinges in `R^d`.
pub fn cycle_to_linkage(axes: &[Axis], d: usize) -> Result<Linkage> {
    let n = axes.len();
    if let Some(a) = axes.iter().find(|a| a.dim() != d) {
        return Err(Error::Dimension { expected: d, found: a.dim() });
    }
    if n < 3 {
        return Err(Error::InvalidChain(format!("a linkage needs at least three axes, got {n}")));
    }
    if d == 2 {
        let vertices = sequence_labels(d, n)
            .into_iter()
            .zip(axes)
            .map(|(label, a)| Vertex { label, coords: a.origin().iter().copied().collect() })
            .collect();
        return finish(d, n, vertices);
    }
    if n <= d {
        return Err(Error::InvalidChain(format!("a canonical linkage in R^{d} needs more than {d} axes, got {n}")));
    }
    let k = half(d);
    let labels = sequence_labels(d, n);
    let mut coords: Vec<DVector<f64>> = Vec::with_capacity(2 * n);
    if d % 2 == 1 {
        let lines: Vec<AffineSubspace> = (0..n).map(|i| generic_flat(axes, i, k, 1)).collect::<Result<_>>()?;
        let mut minus = alloc::vec![DVector::zeros(d); n];
        let mut plus = alloc::vec![DVector::zeros(d); n];
        for j in 0..n {
            let (a, b) = (&lines[j], &lines[(j + 1) % n]);
            let (fa, fb) = common_perpendicular((&a.origin, &a.basis[0]), (&b.origin, &b.basis[0])).map_err(|e| {
                Error::NonGeneric { window: j + 1, reason: format!("lines {} and {}: {e}", j + 1, (j + 1) % n + 1) }
            })?;
            plus[j] = fa;
            minus[(j + 1) % n] = fb;
        }
        for j in 0..n {
            coords.push(minus[j].clone());
            coords.push(plus[j].clone());
        }
    } else {
        let points: Vec<DVector<f64>> =
            (0..n).map(|i| generic_flat(axes, i, k, 0).map(|f| f.origin)).collect::<Result<_>>()?;
        for j in 0..n {
            // q_{j+1}: projection of p_{j+2} onto the plane of k - 1 axes from A_{j+1}
            let i = (j + 1) % n;
            let plane = generic_flat(axes, i, k - 1, 2)?;
            coords.push(points[j].clone());
            coords.push(project_affine(&points[(i + 1) % n], &plane)?);
        }
    }
    let vertices = labels
        .into_iter()
        .zip(coords)
        .map(|(label, c)| Vertex { label, coords: c.iter().copied().collect() })
        .collect();
    let lk = finish(d, n, vertices)?;
    for (body, s) in lk.simplex_positions().iter().enumerate() {
        let m = simplex_matrix(&lk.vertices, s);
        let scale: f64 = m.column_iter().map(|c| c.norm()).product();
        if scale == 0.0 || m.determinant().abs() <= 1e-10 * scale {
            return Err(Error::DegenerateSimplex { body: body + 1 });
        }
    }
    Ok(lk)
}

fn finish(d: usize, n: usize, vertices: Vec<Vertex>) -> Result<Linkage> {
    let edges = edge_positions(d, n)
        .into_iter()
        .map(|(p, q)| {
            let (a, b) = (&vertices[p], &vertices[q]);
            let length = a.coords.iter().zip(&b.coords).map(|(x, y)| (x - y) * (x - y)).sum::<f64>();
            let length = libm::sqrt(length);
            Edge { a: a.label, b: b.label, length }
        })
        .collect::<Vec<_>>();
    if d > 2 {
        if let Some(e) = edges.iter().find(|e| e.length == 0.0) {
            let body = vertices.iter().position(|v| v.label == e.a).unwrap_or(0) / 2 + 1;
            return Err(Error::DegenerateSimplex { body });
        }
    }
    Ok(Linkage { d, n, vertices, edges })
}

/// Whether an edge closes a right triangle at a perpendicular foot or a
/// projection: `(foot-_j, foot-_{j+1})` and `(foot+_j, foot+_{j+1})` for odd
/// `d`; `(p_i, p_{i+1})` and `(p_{i-1}, p_{i+1})` for even `d`.
fn is_dependent(d: usize, n: usize, a: &VertexLabel, b: &VertexLabel) -> bool {
    let step = |x: usize, y: usize| (y + n - x) % n;
    let apart = |s: usize| step(a.axis, b.axis) == s || step(b.axis, a.axis) == s;
    match (a.role, b.role) {
        (Role::FootMinus, Role::FootMinus) | (Role::FootPlus, Role::FootPlus) if d % 2 == 1 => apart(1),
        (Role::P, Role::P) if d.is_multiple_of(2) => apart(1) || apart(2),
        _ => false,
    }
}

/// Splits the edge lengths of a canonical linkage into `(2d-3)n`
/// independent moduli and `2n` lengths fixed by right angles. In the plane
/// the moduli are the `n` side lengths.
pub fn moduli_invariants(lk: &Linkage) -> Result<Moduli> {
    let (d, n) = (lk.d, lk.n);
    let labels: Vec<VertexLabel> = lk.vertices.iter().map(|v| v.label).collect();
    if d < 2 || labels != sequence_labels(d, n) {
        return Err(Error::Provenance(String::from("vertex labels do not follow the canonical sequence")));
    }
    let expected: Vec<(VertexLabel, VertexLabel)> =
        edge_positions(d, n).into_iter().map(|(p, q)| (labels[p], labels[q])).collect();
    let found: Vec<(VertexLabel, VertexLabel)> = lk.edges.iter().map(|e| (e.a, e.b)).collect();
    if expected != found {
        return Err(Error::Provenance(String::from("edge set is not the canonical simplicial complex")));
    }
    if d == 2 {
        return Ok(Moduli {
            independent: lk.edges.clone(),
            dependent: Vec::new(),
            note: "planar polygon: the side lengths",
        });
    }
    let (dependent, independent): (Vec<Edge>, Vec<Edge>) =
        lk.edges.iter().cloned().partition(|e| is_dependent(d, n, &e.a, &e.b));
    if dependent.len() != 2 * n {
        return Err(Error::Provenance(format!("found {} right-angle edges, expected {}", dependent.len(), 2 * n)));
    }
    let note = if d % 2 == 1 {
        "dependent edges join consecutive feet on the same side; fixed by the common perpendiculars"
    } else {
        "dependent edges join p_i to p_{i+1} and p_{i-1} to p_{i+1}; fixed by the projections q_i"
    };
    Ok(Moduli { independent, dependent, note })
}

/// Canonical linkages of a cycle along a path of configurations on its
/// fiber, with the same labels throughout.
pub fn linkage_path(c: &Chain, path: &[Configuration], tol: f64) -> Result<Vec<Linkage>> {
    if !c.is_cycle() {
        return Err(Error::InvalidChain(String::from("linkages are defined for cycles")));
    }
    path.iter()
        .enumerate()
        .map(|(index, theta)| {
            let wrap = |e: Error| Error::PathPoint { index, source: alloc::boxed::Box::new(e) };
            let residual = closure_residual(c, theta).map_err(wrap)?.norm();
            if residual > tol {
                return Err(wrap(Error::NotOnFiber { residual, tol }));
            }
            let placed = forward_kinematics(c, theta).map_err(wrap)?.all_axes();
            cycle_to_linkage(&placed, c.dim()).map_err(wrap)
        })
        .collect()
}

/// Largest change of any edge length along the path, relative to its first
/// configuration.
pub fn check_linkage_invariance(c: &Chain, path: &[Configuration], tol: f64) -> Result<f64> {
    let linkages = linkage_path(c, path, tol)?;
    let Some(first) = linkages.first() else {
        return Ok(0.0);
    };
    let mut worst = 0.0f64;
    for lk in &linkages[1..] {
        for (e0, e) in first.edges.iter().zip(&lk.edges) {
            worst = worst.max((e.length - e0.length).abs());
        }
    }
    Ok(worst)
}
