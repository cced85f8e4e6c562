//! Affine geometry of `R^d` inside its projective completion: hinge axes,
//! isometries, rotations about axes, incidence and intersections.
//!
//! Homogeneous coordinates put the extra coordinate last: a point `x`
//! lifts to `(x, 1)` and a direction `v` to `(v, 0)`.

use alloc::vec::Vec;

use nalgebra::{DMatrix, DVector};

use crate::exterior::{top_pairing, wedge, ExteriorVector};
use crate::linalg::{self, numeric_rank};
use crate::scalar::{Rational, Scalar};
use crate::{Error, Result};

/// Orthonormality tolerance for axis and frame directions.
pub const ORTHONORMAL_TOL: f64 = 1e-12;

/// Relative singular-value level below which an intersection system is
/// flagged as near-degenerate.
pub const NEAR_DEGENERATE_TOL: f64 = 1e-10;

const INDEPENDENCE_TOL: f64 = 1e-10;

/// Gram–Schmidt with one re-orthogonalization pass. Returns `None` when a
/// vector is (numerically) dependent on its predecessors.
fn gram_schmidt(raw: &[DVector<f64>]) -> Option<Vec<DVector<f64>>> {
    let mut out: Vec<DVector<f64>> = Vec::with_capacity(raw.len());
    for v in raw {
        let scale = v.norm();
        if scale == 0.0 || !scale.is_finite() {
            return None;
        }
        let mut w = v.clone();
        for _ in 0..2 {
            for q in &out {
                let c = q.dot(&w);
                w -= q * c;
            }
        }
        let n = w.norm();
        if n <= INDEPENDENCE_TOL * scale {
            return None;
        }
        out.push(w / n);
    }
    Some(out)
}

/// Orthonormal basis of the orthogonal complement of an orthonormal family.
pub fn orthonormal_complement(basis: &[DVector<f64>], d: usize) -> Vec<DVector<f64>> {
    let mut current: Vec<DVector<f64>> = basis.to_vec();
    let mut out = Vec::new();
    while current.len() < d {
        // standard basis vector with the largest residual
        let mut best: Option<(f64, DVector<f64>)> = None;
        for j in 0..d {
            let mut w = DVector::zeros(d);
            w[j] = 1.0;
            for _ in 0..2 {
                for q in &current {
                    let c = q.dot(&w);
                    w -= q * c;
                }
            }
            let n = w.norm();
            if best.as_ref().is_none_or(|(bn, _)| n > *bn) {
                best = Some((n, w));
            }
        }
        let (n, w) = best.expect("d > 0");
        let u = w / n;
        current.push(u.clone());
        out.push(u);
    }
    out
}

fn det_of_columns(cols: &[&DVector<f64>]) -> f64 {
    let d = cols.len();
    DMatrix::from_fn(d, d, |i, j| cols[j][i]).determinant()
}

fn lift_point<T: Scalar>(p: &[T]) -> Vec<T> {
    let mut v = p.to_vec();
    v.push(T::one());
    v
}

fn lift_direction<T: Scalar>(u: &[T]) -> Vec<T> {
    let mut v = u.to_vec();
    v.push(T::zero());
    v
}

/// `lift(origin) ∧ lift0(dirs[0]) ∧ ...` in `Λ^{j+1} R^{d+1}`.
pub fn flat_plucker<T: Scalar, V: AsRef<[T]>>(origin: &[T], dirs: &[V]) -> Result<ExteriorVector<T>> {
    let d = origin.len();
    let mut cols = Vec::with_capacity(dirs.len() + 1);
    cols.push(lift_point(origin));
    for v in dirs {
        if v.as_ref().len() != d {
            return Err(Error::Dimension { expected: d, found: v.as_ref().len() });
        }
        cols.push(lift_direction(v.as_ref()));
    }
    wedge(d + 1, &cols)
}

/// A hinge: a codimension-two affine subspace of `R^d`, stored as an origin
/// point and an orthonormal basis of its `d - 2` directions. For `d = 2` the
/// axis is a point.
#[derive(Debug, Clone, PartialEq)]
pub struct Axis {
    origin: DVector<f64>,
    dirs: Vec<DVector<f64>>,
}

impl Axis {
    /// Orthonormalizes `raw_dirs` (Gram–Schmidt, order preserved).
    pub fn new(origin: DVector<f64>, raw_dirs: Vec<DVector<f64>>) -> Result<Self> {
        let d = origin.len();
        if d < 2 {
            return Err(Error::Dimension { expected: 2, found: d });
        }
        if raw_dirs.len() != d - 2 {
            return Err(Error::Dimension { expected: d - 2, found: raw_dirs.len() });
        }
        if let Some(v) = raw_dirs.iter().find(|v| v.len() != d) {
            return Err(Error::Dimension { expected: d, found: v.len() });
        }
        let dirs = gram_schmidt(&raw_dirs).ok_or(Error::DegenerateAxis)?;
        Ok(Self { origin, dirs })
    }

    pub fn from_slices(origin: &[f64], raw_dirs: &[&[f64]]) -> Result<Self> {
        Self::new(DVector::from_column_slice(origin), raw_dirs.iter().map(|v| DVector::from_column_slice(v)).collect())
    }

    pub fn dim(&self) -> usize {
        self.origin.len()
    }

    pub fn origin(&self) -> &DVector<f64> {
        &self.origin
    }

    pub fn dirs(&self) -> &[DVector<f64>] {
        &self.dirs
    }

    /// Oriented orthonormal basis `(u1, u2)` of the normal plane, with
    /// `det[dirs | u1 | u2] > 0`.
    pub fn normal_plane(&self) -> (DVector<f64>, DVector<f64>) {
        let d = self.dim();
        let comp = orthonormal_complement(&self.dirs, d);
        let (u1, mut u2) = (comp[0].clone(), comp[1].clone());
        let mut cols: Vec<&DVector<f64>> = self.dirs.iter().collect();
        cols.push(&u1);
        cols.push(&u2);
        if det_of_columns(&cols) < 0.0 {
            u2 = -u2;
        }
        (u1, u2)
    }

    /// Euclidean distance from `p` to the axis.
    pub fn distance_to(&self, p: &DVector<f64>) -> f64 {
        let mut w = p - &self.origin;
        for q in &self.dirs {
            let c = q.dot(&w);
            w -= q * c;
        }
        w.norm()
    }

    pub fn to_subspace(&self) -> AffineSubspace {
        AffineSubspace { origin: self.origin.clone(), basis: self.dirs.clone() }
    }
}

/// `make_axis`: an [`Axis`] from an origin and `d - 2` independent raw
/// directions.
pub fn make_axis(origin: DVector<f64>, raw_dirs: Vec<DVector<f64>>) -> Result<Axis> {
    Axis::new(origin, raw_dirs)
}

/// An axis given by rational data, not orthonormalized. Its Plücker point
/// agrees projectively (with positive scale) with that of the orthonormal
/// [`Axis`] built from the same data.
#[derive(Debug, Clone, PartialEq)]
pub struct RationalAxis {
    pub origin: Vec<Rational>,
    pub dirs: Vec<Vec<Rational>>,
}

impl RationalAxis {
    pub fn new(origin: Vec<Rational>, dirs: Vec<Vec<Rational>>) -> Result<Self> {
        let d = origin.len();
        if d < 2 {
            return Err(Error::Dimension { expected: 2, found: d });
        }
        if dirs.len() != d - 2 {
            return Err(Error::Dimension { expected: d - 2, found: dirs.len() });
        }
        if let Some(v) = dirs.iter().find(|v| v.len() != d) {
            return Err(Error::Dimension { expected: d, found: v.len() });
        }
        let (rank, _) = linalg::exact_rank(&dirs, d);
        if rank < dirs.len() {
            return Err(Error::DegenerateAxis);
        }
        Ok(Self { origin, dirs })
    }

    pub fn dim(&self) -> usize {
        self.origin.len()
    }

    pub fn plucker(&self) -> ExteriorVector<Rational> {
        flat_plucker(&self.origin, &self.dirs).expect("validated axis")
    }

    pub fn to_axis(&self) -> Result<Axis> {
        let f = |v: &[Rational]| DVector::from_iterator(v.len(), v.iter().map(Scalar::to_f64));
        Axis::new(f(&self.origin), self.dirs.iter().map(|v| f(v)).collect())
    }
}

/// A decomposable nonzero element of `Λ^{d-1} R^{d+1}` representing an
/// axis of `R^d`.
#[derive(Debug, Clone, PartialEq)]
pub struct PluckerPoint(ExteriorVector<f64>);

impl PluckerPoint {
    pub fn as_exterior(&self) -> &ExteriorVector<f64> {
        &self.0
    }

    pub fn into_exterior(self) -> ExteriorVector<f64> {
        self.0
    }

    /// Ambient dimension `d` of the affine space.
    pub fn dim(&self) -> usize {
        self.0.ambient() - 1
    }
}

/// `T = lift(M) ∧ lift0(v_1) ∧ ... ∧ lift0(v_{d-2})`.
pub fn axis_plucker(a: &Axis) -> PluckerPoint {
    PluckerPoint(flat_plucker(a.origin.as_slice(), &dir_slices(&a.dirs)).expect("validated axis"))
}

fn dir_slices(dirs: &[DVector<f64>]) -> Vec<&[f64]> {
    dirs.iter().map(|v| v.as_slice()).collect()
}

/// Plücker coordinates `lift(p) ∧ lift0(u)` of the line through `p` with
/// direction `u`.
pub fn line_plucker(p: &DVector<f64>, u: &DVector<f64>) -> Result<ExteriorVector<f64>> {
    if p.len() != u.len() {
        return Err(Error::Dimension { expected: p.len(), found: u.len() });
    }
    if u.iter().all(|x| *x == 0.0) {
        return Err(Error::DegenerateLine);
    }
    flat_plucker(p.as_slice(), &[u.as_slice()])
}

/// Projective incidence of a line with an axis: they meet in `R^d` or at
/// infinity. Tested as `|<line ∧ axis>| <= tol * |line| * |axis|`.
pub fn incident(line: &ExteriorVector<f64>, axis: &PluckerPoint, tol: f64) -> Result<bool> {
    if line.grade() != 2 {
        return Err(Error::Grade(alloc::format!("a line has grade 2, got {}", line.grade())));
    }
    let pairing = top_pairing(line, &axis.0)?;
    Ok(pairing.abs() <= tol * line.norm() * axis.0.norm())
}

/// Skew generator `J = u2 u1^T - u1 u2^T` of unit-speed rotation about the
/// axis; a point `p` moves with velocity `J (p - M)`.
pub fn rotation_generator(a: &Axis) -> DMatrix<f64> {
    let (u1, u2) = a.normal_plane();
    &u2 * u1.transpose() - &u1 * u2.transpose()
}

/// Rotation by `angle` about the axis, fixing it pointwise.
pub fn rotate_about(a: &Axis, angle: f64) -> Isometry {
    let d = a.dim();
    let j = rotation_generator(a);
    let j2 = &j * &j;
    let rot = DMatrix::identity(d, d) + &j * libm::sin(angle) + j2 * (1.0 - libm::cos(angle));
    let trans = &a.origin - &rot * &a.origin;
    Isometry { rot, trans }
}

/// Orientation-preserving isometry `x ↦ rot x + trans`.
#[derive(Debug, Clone, PartialEq)]
pub struct Isometry {
    rot: DMatrix<f64>,
    trans: DVector<f64>,
}

impl Isometry {
    pub fn identity(d: usize) -> Self {
        Self { rot: DMatrix::identity(d, d), trans: DVector::zeros(d) }
    }

    /// Checks `rot^T rot = I` (to `1e-9`) and `det rot > 0`.
    pub fn new(rot: DMatrix<f64>, trans: DVector<f64>) -> Result<Self> {
        let d = trans.len();
        if rot.shape() != (d, d) {
            return Err(Error::Dimension { expected: d, found: rot.nrows() });
        }
        let defect = (rot.transpose() * &rot - DMatrix::<f64>::identity(d, d)).amax();
        if defect > 1e-9 || rot.determinant() <= 0.0 {
            return Err(Error::InvalidChain(alloc::string::String::from(
                "rotation part must be orthogonal with positive determinant",
            )));
        }
        Ok(Self { rot, trans })
    }

    pub fn dim(&self) -> usize {
        self.trans.len()
    }

    pub fn rot(&self) -> &DMatrix<f64> {
        &self.rot
    }

    pub fn trans(&self) -> &DVector<f64> {
        &self.trans
    }

    /// `self ∘ inner`.
    pub fn compose(&self, inner: &Isometry) -> Isometry {
        Isometry { rot: &self.rot * &inner.rot, trans: &self.rot * &inner.trans + &self.trans }
    }

    pub fn inverse(&self) -> Isometry {
        let rt = self.rot.transpose();
        let trans = -(&rt * &self.trans);
        Isometry { rot: rt, trans }
    }

    pub fn apply<T: Transform>(&self, x: &T) -> Result<T> {
        x.transformed(self)
    }

    fn check_dim(&self, d: usize) -> Result<()> {
        if d != self.dim() {
            return Err(Error::Dimension { expected: self.dim(), found: d });
        }
        Ok(())
    }

    fn map_point(&self, p: &DVector<f64>) -> DVector<f64> {
        &self.rot * p + &self.trans
    }

    fn map_vector(&self, v: &DVector<f64>) -> DVector<f64> {
        &self.rot * v
    }
}

/// Objects an [`Isometry`] can move.
pub trait Transform: Sized {
    fn transformed(&self, iso: &Isometry) -> Result<Self>;
}

impl Transform for DVector<f64> {
    fn transformed(&self, iso: &Isometry) -> Result<Self> {
        iso.check_dim(self.len())?;
        Ok(iso.map_point(self))
    }
}

impl Transform for Axis {
    fn transformed(&self, iso: &Isometry) -> Result<Self> {
        iso.check_dim(self.dim())?;
        Ok(Axis { origin: iso.map_point(&self.origin), dirs: self.dirs.iter().map(|v| iso.map_vector(v)).collect() })
    }
}

impl Transform for Frame {
    fn transformed(&self, iso: &Isometry) -> Result<Self> {
        iso.check_dim(self.dim())?;
        Ok(Frame { origin: iso.map_point(&self.origin), vecs: self.vecs.iter().map(|v| iso.map_vector(v)).collect() })
    }
}

impl Transform for AffineSubspace {
    fn transformed(&self, iso: &Isometry) -> Result<Self> {
        iso.check_dim(self.origin.len())?;
        Ok(AffineSubspace {
            origin: iso.map_point(&self.origin),
            basis: self.basis.iter().map(|v| iso.map_vector(v)).collect(),
        })
    }
}

/// An orthonormal `k`-frame of `R^d` with an origin.
#[derive(Debug, Clone, PartialEq)]
pub struct Frame {
    origin: DVector<f64>,
    vecs: Vec<DVector<f64>>,
}

impl Frame {
    /// Orthonormalizes `raw_vecs` in order.
    pub fn new(origin: DVector<f64>, raw_vecs: Vec<DVector<f64>>) -> Result<Self> {
        let d = origin.len();
        if raw_vecs.len() > d {
            return Err(Error::Dimension { expected: d, found: raw_vecs.len() });
        }
        if let Some(v) = raw_vecs.iter().find(|v| v.len() != d) {
            return Err(Error::Dimension { expected: d, found: v.len() });
        }
        let vecs = gram_schmidt(&raw_vecs).ok_or(Error::DegenerateAxis)?;
        Ok(Self { origin, vecs })
    }

    pub fn point(origin: DVector<f64>) -> Self {
        Self { origin, vecs: Vec::new() }
    }

    /// The `(d-2)`-frame spanning an axis.
    pub fn from_axis(a: &Axis) -> Self {
        Self { origin: a.origin.clone(), vecs: a.dirs.clone() }
    }

    pub fn dim(&self) -> usize {
        self.origin.len()
    }

    pub fn k(&self) -> usize {
        self.vecs.len()
    }

    pub fn origin(&self) -> &DVector<f64> {
        &self.origin
    }

    pub fn vecs(&self) -> &[DVector<f64>] {
        &self.vecs
    }

    /// Origin followed by the frame vectors, as one vector of length
    /// `d (k + 1)`.
    pub fn to_vector(&self) -> DVector<f64> {
        let d = self.dim();
        let mut out = DVector::zeros(d * (self.k() + 1));
        out.rows_mut(0, d).copy_from(&self.origin);
        for (i, v) in self.vecs.iter().enumerate() {
            out.rows_mut(d * (i + 1), d).copy_from(v);
        }
        out
    }
}

/// An affine subspace: origin plus orthonormal direction basis.
#[derive(Debug, Clone, PartialEq)]
pub struct AffineSubspace {
    pub origin: DVector<f64>,
    pub basis: Vec<DVector<f64>>,
}

impl AffineSubspace {
    pub fn new(origin: DVector<f64>, raw_basis: Vec<DVector<f64>>) -> Result<Self> {
        let d = origin.len();
        if let Some(v) = raw_basis.iter().find(|v| v.len() != d) {
            return Err(Error::Dimension { expected: d, found: v.len() });
        }
        let basis = gram_schmidt(&raw_basis).ok_or(Error::DegenerateAxis)?;
        Ok(Self { origin, basis })
    }

    pub fn ambient(&self) -> usize {
        self.origin.len()
    }

    pub fn dim(&self) -> usize {
        self.basis.len()
    }
}

impl From<&Axis> for AffineSubspace {
    fn from(a: &Axis) -> Self {
        a.to_subspace()
    }
}

/// Result of intersecting affine subspaces.
#[derive(Debug, Clone, PartialEq)]
pub struct Intersection {
    /// `None` when the subspaces have no common point.
    pub subspace: Option<AffineSubspace>,
    /// Some informative singular value of the stacked constraint system is
    /// below `1e-10` of the largest.
    pub near_degenerate: bool,
}

/// Intersection of affine subspaces of a common `R^d`, by least squares on
/// the stacked normal-form constraints `N_j x = N_j origin_j`.
pub fn affine_intersection(subspaces: &[AffineSubspace]) -> Result<Intersection> {
    let first = subspaces.first().ok_or(Error::EmptyInput("affine_intersection needs a subspace"))?;
    let d = first.ambient();
    if let Some(s) = subspaces.iter().find(|s| s.ambient() != d) {
        return Err(Error::Dimension { expected: d, found: s.ambient() });
    }
    let mut rows: Vec<DVector<f64>> = Vec::new();
    let mut rhs: Vec<f64> = Vec::new();
    for s in subspaces {
        for nrm in orthonormal_complement(&s.basis, d) {
            rhs.push(nrm.dot(&s.origin));
            rows.push(nrm);
        }
    }
    if rows.is_empty() {
        return Ok(Intersection {
            subspace: Some(AffineSubspace {
                origin: first.origin.clone(),
                basis: (0..d).map(|i| DVector::from_fn(d, |j, _| if i == j { 1.0 } else { 0.0 })).collect(),
            }),
            near_degenerate: false,
        });
    }
    let n = DMatrix::from_fn(rows.len(), d, |i, j| rows[i][j]);
    let b = DVector::from_vec(rhs);
    let dims = rows.len().max(d) as f64;
    let structural = 1e-12 * dims;
    let nr = numeric_rank(&n, structural);
    let smax = nr.sigma_max();
    let near_degenerate = nr.singular_values[..nr.rank].iter().any(|&s| s < NEAR_DEGENERATE_TOL * smax);
    let x0 = linalg::pinv_solve(&n, &b, structural);
    let residual = (&n * &x0 - &b).norm();
    if residual > 1e-9 * (1.0 + b.norm()) {
        return Ok(Intersection { subspace: None, near_degenerate });
    }
    Ok(Intersection { subspace: Some(AffineSubspace { origin: x0, basis: nr.right_null }), near_degenerate })
}

/// Orthogonal projection of `p` onto `s`.
pub fn project_affine(p: &DVector<f64>, s: &AffineSubspace) -> Result<DVector<f64>> {
    if p.len() != s.ambient() {
        return Err(Error::Dimension { expected: s.ambient(), found: p.len() });
    }
    let w = p - &s.origin;
    let mut out = s.origin.clone();
    for b in &s.basis {
        out += b * b.dot(&w);
    }
    Ok(out)
}

/// Feet of the common perpendicular of two non-parallel lines `p_i + t u_i`.
pub fn common_perpendicular(
    l1: (&DVector<f64>, &DVector<f64>),
    l2: (&DVector<f64>, &DVector<f64>),
) -> Result<(DVector<f64>, DVector<f64>)> {
    let ((p1, u1), (p2, u2)) = (l1, l2);
    let d = p1.len();
    for v in [u1, p2, u2] {
        if v.len() != d {
            return Err(Error::Dimension { expected: d, found: v.len() });
        }
    }
    let (a, b, c) = (u1.dot(u1), u1.dot(u2), u2.dot(u2));
    if a == 0.0 || c == 0.0 {
        return Err(Error::DegenerateLine);
    }
    let det = a * c - b * b;
    if det <= 1e-12 * a * c {
        return Err(Error::ParallelLines);
    }
    // minimize |p1 + s u1 - p2 - t u2|^2
    let w = p1 - p2;
    let (e, f) = (u1.dot(&w), u2.dot(&w));
    let s = (b * f - c * e) / det;
    let t = (a * f - b * e) / det;
    Ok((p1 + u1 * s, p2 + u2 * t))
}

/// Dimension of the affine span of two axes.
pub fn affine_span_dim(a: &Axis, b: &Axis, tol: f64) -> usize {
    let d = a.dim();
    let mut cols: Vec<DVector<f64>> = a.dirs.clone();
    cols.extend(b.dirs.iter().cloned());
    cols.push(&b.origin - &a.origin);
    let m = DMatrix::from_fn(d, cols.len(), |i, j| cols[j][i]);
    numeric_rank(&m, tol).rank
}
