//! Serial chains and cycles of hinged bodies: forward kinematics on the
//! configuration torus, end-point and end-frame differentials, and
//! path-following on fibers of the closing map of a cycle.
//!
//! Chart: `θ = 0` is the reference placement. Body `B_{i+1}` is placed by
//! `g_{i+1} = g_i ∘ R(A_i, θ_i)`, rotations compounding from the fixed
//! first body outwards.

use alloc::string::String;
use alloc::vec::Vec;

use nalgebra::{DMatrix, DVector};

use crate::geometry::{
    affine_span_dim, axis_plucker, rotate_about, rotation_generator, Axis, Frame, Isometry, PluckerPoint,
};
use crate::linalg::{numeric_rank, pinv_solve};
use crate::{Error, Result, DEFAULT_RANK_TOL};

/// Default closure residual tolerance for fiber projection.
pub const DEFAULT_FIBER_TOL: f64 = 1e-10;

/// Iteration cap for Gauss–Newton fiber projection.
pub const MAX_PROJECTION_ITERATIONS: usize = 50;

/// A point of the configuration torus `(S^1)^{n-1}`, angles in radians.
#[derive(Debug, Clone, PartialEq)]
pub struct Configuration(Vec<f64>);

impl Configuration {
    pub fn new(angles: Vec<f64>) -> Self {
        Self(angles)
    }

    pub fn zeros(len: usize) -> Self {
        Self(alloc::vec![0.0; len])
    }

    pub fn angles(&self) -> &[f64] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn to_vector(&self) -> DVector<f64> {
        DVector::from_column_slice(&self.0)
    }
}

impl From<Vec<f64>> for Configuration {
    fn from(v: Vec<f64>) -> Self {
        Self(v)
    }
}

/// A chain of `n` bodies `B_1..B_n` joined by hinges `A_1..A_{n-1}` at
/// their reference placement, with a frame attached to `B_n`.
///
/// A cycle additionally stores the closing axis `A_n` joining `B_n` to the
/// fixed `B_1`; its end frame is the `(d-2)`-frame spanning `A_n`, so the
/// cycle's configuration space is the fiber of the end-frame map through
/// `θ = 0`.
#[derive(Debug, Clone, PartialEq)]
pub struct Chain {
    d: usize,
    ref_axes: Vec<Axis>,
    end_frame: Frame,
    closing_axis: Option<Axis>,
    panel: bool,
}

fn check_dims(axes: &[Axis], d: usize) -> Result<()> {
    match axes.iter().find(|a| a.dim() != d) {
        Some(a) => Err(Error::Dimension { expected: d, found: a.dim() }),
        None => Ok(()),
    }
}

impl Chain {
    /// An open chain; `axes` are `A_1..A_{n-1}`.
    pub fn open(axes: Vec<Axis>, end_frame: Frame) -> Result<Self> {
        let last = axes.last().ok_or_else(|| Error::InvalidChain(String::from("a chain needs at least one axis")))?;
        let d = end_frame.dim();
        check_dims(&axes, d)?;
        if end_frame.k() == 0 {
            let e = end_frame.origin();
            if last.distance_to(e) <= 1e-9 * (1.0 + e.norm()) {
                return Err(Error::InvalidChain(String::from("end point lies on the last axis")));
            }
        }
        Ok(Self { d, ref_axes: axes, end_frame, closing_axis: None, panel: false })
    }

    /// A cycle of `n = axes.len()` bodies; the last axis closes the cycle.
    pub fn cycle(mut axes: Vec<Axis>) -> Result<Self> {
        if axes.len() < 2 {
            return Err(Error::InvalidChain(String::from("a cycle needs at least two axes")));
        }
        let d = axes[0].dim();
        check_dims(&axes, d)?;
        let closing = axes.pop().expect("nonempty");
        Ok(Self { d, ref_axes: axes, end_frame: Frame::from_axis(&closing), closing_axis: Some(closing), panel: false })
    }

    /// Marks the chain as panel-and-hinge after checking that consecutive
    /// axes span at most a hyperplane.
    pub fn with_panels(mut self) -> Result<Self> {
        let all = self.all_axes();
        let pairs = if self.is_cycle() { all.len() } else { all.len() - 1 };
        for i in 0..pairs {
            let (a, b) = (&all[i], &all[(i + 1) % all.len()]);
            if affine_span_dim(a, b, 1e-9) > self.d - 1 {
                return Err(Error::InvalidChain(alloc::format!(
                    "axes {} and {} do not lie in a common panel",
                    i + 1,
                    (i + 1) % all.len() + 1
                )));
            }
        }
        self.panel = true;
        Ok(self)
    }

    pub fn dim(&self) -> usize {
        self.d
    }

    /// Number of bodies.
    pub fn bodies(&self) -> usize {
        self.ref_axes.len() + 1
    }

    /// Number of joint angles, `n - 1`.
    pub fn joints(&self) -> usize {
        self.ref_axes.len()
    }

    pub fn ref_axes(&self) -> &[Axis] {
        &self.ref_axes
    }

    pub fn end_frame(&self) -> &Frame {
        &self.end_frame
    }

    pub fn closing_axis(&self) -> Option<&Axis> {
        self.closing_axis.as_ref()
    }

    pub fn is_cycle(&self) -> bool {
        self.closing_axis.is_some()
    }

    pub fn is_panel(&self) -> bool {
        self.panel
    }

    /// `A_1..A_{n-1}`, followed by `A_n` for a cycle.
    pub fn all_axes(&self) -> Vec<Axis> {
        let mut v = self.ref_axes.clone();
        v.extend(self.closing_axis.iter().cloned());
        v
    }

    fn check_config(&self, theta: &Configuration) -> Result<()> {
        if theta.len() != self.joints() {
            return Err(Error::ConfigurationLength { expected: self.joints(), found: theta.len() });
        }
        Ok(())
    }
}

/// Positions of all axes, bodies and the end frame at a configuration.
#[derive(Debug, Clone, PartialEq)]
pub struct Placement {
    /// `A_1(θ)..A_{n-1}(θ)`; `A_1(θ) = A_1`.
    pub axes_at: Vec<Axis>,
    pub frame_at: Frame,
    /// `g_2..g_n`; body `B_1` stays put.
    pub body_isometries: Vec<Isometry>,
    /// The closing axis carried by `B_n`, for cycles.
    pub closing_axis_at: Option<Axis>,
}

impl Placement {
    /// All placed axes, including the closing axis of a cycle.
    pub fn all_axes(&self) -> Vec<Axis> {
        let mut v = self.axes_at.clone();
        v.extend(self.closing_axis_at.iter().cloned());
        v
    }
}

pub fn forward_kinematics(c: &Chain, theta: &Configuration) -> Result<Placement> {
    c.check_config(theta)?;
    let mut g = Isometry::identity(c.d);
    let mut bodies = Vec::with_capacity(c.joints());
    let mut axes = Vec::with_capacity(c.joints());
    for (axis, &angle) in c.ref_axes.iter().zip(theta.angles()) {
        axes.push(g.apply(axis)?);
        g = g.compose(&rotate_about(axis, angle));
        bodies.push(g.clone());
    }
    let frame = g.apply(&c.end_frame)?;
    let closing_axis = match &c.closing_axis {
        Some(a) => Some(g.apply(a)?),
        None => None,
    };
    Ok(Placement { axes_at: axes, frame_at: frame, body_isometries: bodies, closing_axis_at: closing_axis })
}

/// Position of the end point `e(θ)`.
pub fn endpoint(c: &Chain, theta: &Configuration) -> Result<DVector<f64>> {
    Ok(forward_kinematics(c, theta)?.frame_at.origin().clone())
}

/// Analytic differential of the end-point map: column `i` is
/// `J_i (e(θ) - M_i(θ))` for the rotation generator of `A_i(θ)`.
pub fn endpoint_jacobian(c: &Chain, theta: &Configuration) -> Result<DMatrix<f64>> {
    if c.end_frame.k() != 0 {
        return Err(Error::WrongMap { expected: 0, found: c.end_frame.k() });
    }
    let p = forward_kinematics(c, theta)?;
    let e = p.frame_at.origin();
    let mut jac = DMatrix::zeros(c.d, c.joints());
    for (i, a) in p.axes_at.iter().enumerate() {
        jac.set_column(i, &(rotation_generator(a) * (e - a.origin())));
    }
    Ok(jac)
}

/// Analytic differential of the end-frame map into `R^{d(k+1)}`
/// (origin, then frame vectors).
pub fn frame_jacobian(c: &Chain, theta: &Configuration) -> Result<DMatrix<f64>> {
    let p = forward_kinematics(c, theta)?;
    Ok(frame_jacobian_at(&p, c.d))
}

fn frame_jacobian_at(p: &Placement, d: usize) -> DMatrix<f64> {
    let k = p.frame_at.k();
    let mut jac = DMatrix::zeros(d * (k + 1), p.axes_at.len());
    for (i, a) in p.axes_at.iter().enumerate() {
        let j = rotation_generator(a);
        let mut col = DVector::zeros(d * (k + 1));
        col.rows_mut(0, d).copy_from(&(&j * (p.frame_at.origin() - a.origin())));
        for (m, v) in p.frame_at.vecs().iter().enumerate() {
            col.rows_mut(d * (m + 1), d).copy_from(&(&j * v));
        }
        jac.set_column(i, &col);
    }
    jac
}

/// Plücker points of the placed axes `A_i(θ)`: the infinitesimal rotations
/// spanning the image of the differential inside `Λ^{d-1} R^{d+1}`.
pub fn frame_columns(c: &Chain, theta: &Configuration) -> Result<Vec<PluckerPoint>> {
    Ok(forward_kinematics(c, theta)?.axes_at.iter().map(axis_plucker).collect())
}

/// Central-difference Jacobian of `f` at `theta`.
pub fn numerical_jacobian<F>(mut f: F, theta: &[f64], h: f64) -> DMatrix<f64>
where
    F: FnMut(&[f64]) -> DVector<f64>,
{
    let mut x = theta.to_vec();
    let mut cols = Vec::with_capacity(theta.len());
    for i in 0..theta.len() {
        x[i] = theta[i] + h;
        let fp = f(&x);
        x[i] = theta[i] - h;
        let fm = f(&x);
        x[i] = theta[i];
        cols.push((fp - fm) / (2.0 * h));
    }
    let rows = cols.first().map_or(0, |c| c.len());
    DMatrix::from_fn(rows, theta.len(), |i, j| cols[j][i])
}

/// End frame at `θ` minus the end frame at `θ = 0`, as a vector in
/// `R^{d(k+1)}`. For a cycle this vanishes exactly on its configuration
/// space.
pub fn closure_residual(c: &Chain, theta: &Configuration) -> Result<DVector<f64>> {
    let p = forward_kinematics(c, theta)?;
    Ok(p.frame_at.to_vector() - c.end_frame.to_vector())
}

/// Orthonormal basis of the kernel of the end-frame differential at `θ`.
pub fn closure_kernel(c: &Chain, theta: &Configuration, tol: f64) -> Result<Vec<DVector<f64>>> {
    let jac = frame_jacobian(c, theta)?;
    Ok(numeric_rank(&jac, tol).right_null)
}

fn require_cycle(c: &Chain) -> Result<()> {
    if !c.is_cycle() {
        return Err(Error::InvalidChain(String::from("fiber path-following needs a cycle")));
    }
    Ok(())
}

/// Moves `step` along a unit kernel direction and projects back onto the
/// fiber `{E_{d-2}(θ) = E_{d-2}(0)}` by Gauss–Newton with step halving.
pub fn flex_cycle(
    c: &Chain,
    theta: &Configuration,
    direction: &DVector<f64>,
    step: f64,
    tol: f64,
) -> Result<Configuration> {
    require_cycle(c)?;
    c.check_config(theta)?;
    if direction.len() != c.joints() {
        return Err(Error::ConfigurationLength { expected: c.joints(), found: direction.len() });
    }
    let residual = closure_residual(c, theta)?.norm();
    if residual > tol {
        return Err(Error::NotOnFiber { residual, tol });
    }
    let jac = frame_jacobian(c, theta)?;
    let nr = numeric_rank(&jac, DEFAULT_RANK_TOL);
    if nr.right_null.is_empty() {
        return Err(Error::RigidCycle);
    }
    if (direction.norm() - 1.0).abs() > 1e-8 || (&jac * direction).norm() > 1e-6 * nr.sigma_max().max(1.0) {
        return Err(Error::InvalidDirection);
    }
    project_to_fiber(c, theta.to_vector() + direction * step, tol)
}

/// Gauss–Newton projection of an arbitrary configuration onto the fiber
/// through `θ = 0`.
pub fn project_to_fiber(c: &Chain, start: DVector<f64>, tol: f64) -> Result<Configuration> {
    let mut x = start;
    let target = c.end_frame.to_vector();
    let eval = |x: &DVector<f64>| -> Result<(Placement, DVector<f64>)> {
        let p = forward_kinematics(c, &Configuration::new(x.iter().copied().collect()))?;
        let r = p.frame_at.to_vector() - &target;
        Ok((p, r))
    };
    let (mut placement, mut r) = eval(&x)?;
    for _ in 0..MAX_PROJECTION_ITERATIONS {
        let rn = r.norm();
        if rn <= tol {
            return Ok(Configuration::new(x.iter().copied().collect()));
        }
        let jac = frame_jacobian_at(&placement, c.d);
        let delta = -pinv_solve(&jac, &r, DEFAULT_RANK_TOL);
        let mut scale = 1.0;
        let mut accepted = false;
        for _ in 0..30 {
            let trial = &x + &delta * scale;
            let (p_t, r_t) = eval(&trial)?;
            if r_t.norm() < rn {
                x = trial;
                placement = p_t;
                r = r_t;
                accepted = true;
                break;
            }
            scale *= 0.5;
        }
        if !accepted {
            break;
        }
    }
    let residual = r.norm();
    if residual <= tol {
        return Ok(Configuration::new(x.iter().copied().collect()));
    }
    Err(Error::ProjectionFailure { iterations: MAX_PROJECTION_ITERATIONS, residual })
}

/// Follows the one-parameter family of the fiber for `steps` steps of size
/// `step`, starting at `start`. The direction at each step is the kernel
/// vector closest to the previous direction, so the path does not reverse.
/// Returns the path including `start`.
pub fn trace_flex(c: &Chain, start: &Configuration, steps: usize, step: f64, tol: f64) -> Result<Vec<Configuration>> {
    require_cycle(c)?;
    let mut path = alloc::vec![start.clone()];
    let mut previous: Option<DVector<f64>> = None;
    let mut theta = start.clone();
    for _ in 0..steps {
        let kernel = closure_kernel(c, &theta, DEFAULT_RANK_TOL)?;
        if kernel.is_empty() {
            return Err(Error::RigidCycle);
        }
        let dir = match &previous {
            Some(prev) => {
                let mut proj = DVector::zeros(prev.len());
                for k in &kernel {
                    proj += k * k.dot(prev);
                }
                if proj.norm() < 1e-12 {
                    kernel[0].clone()
                } else {
                    proj.normalize()
                }
            }
            None => {
                let k = &kernel[0];
                let lead = k.iter().copied().fold(0.0f64, |m, x| if x.abs() > m.abs() { x } else { m });
                if lead < 0.0 {
                    -k
                } else {
                    k.clone()
                }
            }
        };
        theta = flex_cycle(c, &theta, &dir, step, tol)?;
        path.push(theta.clone());
        previous = Some(dir);
    }
    Ok(path)
}
