//! Singularity verdicts with rank certificates: end-point and end-frame maps
//! of chains, mobility of cycles, and flexibility of platforms.
//!
//! Every verdict is a rank computation on Plücker points in
//! `Λ^{d-1} R^{d+1}` (hinges) or `Λ^2 R^{d+1}` (bars). A deficient rank
//! comes with a functional vanishing on the span: a hyperplane section of
//! the Grassmannian, or for end points the lines through `e(θ)` meeting
//! every axis.

use alloc::format;
use alloc::vec::Vec;

use nalgebra::{DMatrix, DVector};

use crate::chain::{endpoint_jacobian, forward_kinematics, Chain, Configuration};
use crate::exterior::{rank_of_span, rank_of_span_exact, top_pairing, wedge, ExteriorVector, RankCertificate};
use crate::geometry::{
    axis_plucker, flat_plucker, line_plucker, orthonormal_complement, Axis, Frame, PluckerPoint, RationalAxis,
};
use crate::linalg::{exact_rank, numeric_rank};
use crate::scalar::{Rational, Scalar};
use crate::{binomial, Error, Result};

pub use crate::scenario::{classical_scenario, twisted_cubic_tangents};

/// Geometric evidence for a singular verdict.
#[derive(Debug, Clone, PartialEq)]
pub enum Witness {
    /// Lines through `point` with the given unit directions, each
    /// projectively incident with every axis.
    Lines { point: DVector<f64>, directions: Vec<DVector<f64>> },
    /// Coefficients of a linear functional vanishing on every Plücker point.
    Hyperplane(Vec<f64>),
}

#[derive(Debug, Clone, PartialEq)]
pub struct Verdict {
    pub rank: usize,
    /// Generic rank of the map or family.
    pub full_rank: usize,
    pub singular: bool,
    pub certificate: RankCertificate<f64>,
    pub witness: Option<Witness>,
    /// Dimension of the space of infinitesimal motions, for cycles.
    pub mobility: Option<usize>,
}

/// Verdict computed in exact rational arithmetic.
#[derive(Debug, Clone, PartialEq)]
pub struct ExactVerdict {
    pub rank: usize,
    pub full_rank: usize,
    pub singular: bool,
    pub certificate: RankCertificate<Rational>,
    pub mobility: Option<usize>,
}

/// Two rigid bodies joined by `C(d+1, 2)` bars from `p` on the first body
/// to `q` on the second.
#[derive(Debug, Clone, PartialEq)]
pub struct Platform {
    d: usize,
    legs: Vec<(DVector<f64>, DVector<f64>)>,
}

impl Platform {
    pub fn new(d: usize, legs: Vec<(DVector<f64>, DVector<f64>)>) -> Result<Self> {
        check_legs(d, legs.iter().map(|(p, q)| (p.as_slice(), q.as_slice())))?;
        Ok(Self { d, legs })
    }

    pub fn dim(&self) -> usize {
        self.d
    }

    pub fn legs(&self) -> &[(DVector<f64>, DVector<f64>)] {
        &self.legs
    }
}

fn check_legs<'a, T: Scalar + 'a>(d: usize, legs: impl ExactSizeIterator<Item = (&'a [T], &'a [T])>) -> Result<()> {
    let want = binomial(d + 1, 2);
    if legs.len() != want {
        return Err(Error::Dimension { expected: want, found: legs.len() });
    }
    for (i, (p, q)) in legs.enumerate() {
        for x in [p, q] {
            if x.len() != d {
                return Err(Error::Dimension { expected: d, found: x.len() });
            }
        }
        if p == q {
            return Err(Error::DegenerateLeg { leg: i });
        }
    }
    Ok(())
}

fn lift<T: Scalar>(x: &[T]) -> Vec<T> {
    let mut v = x.to_vec();
    v.push(T::one());
    v
}

fn unit<T: Scalar>(d: usize, j: usize) -> Vec<T> {
    (0..d).map(|i| if i == j { T::one() } else { T::zero() }).collect()
}

/// `P[i][j] = <lift(e) ∧ lift0(e_j), α_i>`: row `i` is the linear form on
/// directions `ν` whose zero set gives lines through `e` incident with
/// axis `i`.
pub fn pairing_matrix(e: &DVector<f64>, axes: &[Axis]) -> Result<DMatrix<f64>> {
    let d = e.len();
    let lines: Vec<ExteriorVector<f64>> =
        (0..d).map(|j| line_plucker(e, &DVector::from_vec(unit(d, j)))).collect::<Result<_>>()?;
    let mut m = DMatrix::zeros(axes.len(), d);
    for (i, a) in axes.iter().enumerate() {
        if a.dim() != d {
            return Err(Error::Dimension { expected: d, found: a.dim() });
        }
        let alpha = axis_plucker(a);
        for (j, l) in lines.iter().enumerate() {
            m[(i, j)] = top_pairing(l, alpha.as_exterior())?;
        }
    }
    Ok(m)
}

/// Rank of the end-point differential against `d`. A deficient rank is
/// witnessed by the lines through `e(θ)` along the left null space, and
/// both the incidence of those lines and the rank of the dual pairing
/// matrix are checked against the verdict.
pub fn endpoint_singularity(c: &Chain, theta: &Configuration, tol: f64) -> Result<Verdict> {
    let jac = endpoint_jacobian(c, theta)?;
    let placement = forward_kinematics(c, theta)?;
    let e = placement.frame_at.origin().clone();
    let d = c.dim();
    let nr = numeric_rank(&jac, tol);
    let singular = nr.rank < d;

    let dual = numeric_rank(&pairing_matrix(&e, &placement.axes_at)?, tol);
    if dual.rank != nr.rank {
        return Err(Error::InternalConsistency(format!(
            "differential has rank {} but the incidence pairing has rank {}",
            nr.rank, dual.rank
        )));
    }

    let witness = if singular {
        let bound = 10.0 * nr.threshold.max(tol * nr.sigma_max()) + 1e-12;
        for nu in &nr.left_null {
            let line = line_plucker(&e, nu)?;
            for (i, a) in placement.axes_at.iter().enumerate() {
                let alpha = axis_plucker(a);
                let pairing = top_pairing(&line, alpha.as_exterior())?.abs();
                if pairing > bound * line.norm() * alpha.as_exterior().norm() {
                    return Err(Error::InternalConsistency(format!(
                        "witness line misses axis {} (pairing {pairing:e})",
                        i + 1
                    )));
                }
            }
        }
        Some(Witness::Lines { point: e, directions: nr.left_null.clone() })
    } else {
        None
    };
    let certificate = RankCertificate {
        rank: nr.rank,
        expected_rank: d,
        deficient: singular,
        conull: if singular { nr.left_null.first().map(|v| v.iter().copied().collect()) } else { None },
        singular_values: nr.singular_values,
    };
    Ok(Verdict { rank: certificate.rank, full_rank: d, singular, certificate, witness, mobility: None })
}

/// Plücker points of the `C(d-k, 2)` axes through the frame origin that
/// contain the frame and all but two vectors of an orthonormal basis of its
/// complement. They span the rotations fixing the frame.
pub fn stabilizer_pluckers(f: &Frame) -> Vec<PluckerPoint> {
    let (d, k) = (f.dim(), f.k());
    if k + 2 > d {
        return Vec::new();
    }
    let w = orthonormal_complement(f.vecs(), d);
    let mut out = Vec::with_capacity(binomial(d - k, 2));
    for a in 0..w.len() {
        for b in a + 1..w.len() {
            let mut dirs: Vec<&[f64]> = f.vecs().iter().map(|v| v.as_slice()).collect();
            dirs.extend(w.iter().enumerate().filter(|(c, _)| *c != a && *c != b).map(|(_, v)| v.as_slice()));
            let origin = f.origin();
            let axis = Axis::from_slices(origin.as_slice(), &dirs).expect("orthonormal directions");
            out.push(axis_plucker(&axis));
        }
    }
    out
}

fn rank_verdict(pluckers: Vec<ExteriorVector<f64>>, expected: usize, offset: usize, tol: f64) -> Result<Verdict> {
    let certificate = rank_of_span(&pluckers, expected, tol)?;
    let witness = certificate.conull.clone().map(Witness::Hyperplane);
    Ok(Verdict {
        rank: certificate.rank.saturating_sub(offset),
        full_rank: expected - offset,
        singular: certificate.deficient,
        certificate,
        witness,
        mobility: None,
    })
}

/// Rank of the end-frame differential: the placed axes together with the
/// stabilizer of the placed frame must span `Λ^{d-1} R^{d+1}`. The reported
/// rank subtracts the stabilizer dimension `C(d-k, 2)`.
pub fn frame_singularity(c: &Chain, theta: &Configuration, tol: f64) -> Result<Verdict> {
    let p = forward_kinematics(c, theta)?;
    let d = c.dim();
    let stab = stabilizer_pluckers(&p.frame_at);
    let offset = stab.len();
    let mut pts: Vec<ExteriorVector<f64>> = p.axes_at.iter().map(|a| axis_plucker(a).into_exterior()).collect();
    pts.extend(stab.into_iter().map(PluckerPoint::into_exterior));
    rank_verdict(pts, binomial(d + 1, 2), offset, tol)
}

fn common_dim(axes: &[Axis]) -> Result<usize> {
    if axes.len() < 2 {
        return Err(Error::InvalidChain(format!("a cycle needs at least two axes, got {}", axes.len())));
    }
    let d = axes[0].dim();
    match axes.iter().find(|a| a.dim() != d) {
        Some(a) => Err(Error::Dimension { expected: d, found: a.dim() }),
        None => Ok(d),
    }
}

/// Infinitesimal mobility `n - rank` of a cycle of hinges, from the rank
/// of its axis Plücker points. Singular when the rank is below
/// `C(d+1, 2)`.
pub fn cycle_mobility(axes: &[Axis], tol: f64) -> Result<Verdict> {
    let d = common_dim(axes)?;
    let pts = axes.iter().map(|a| axis_plucker(a).into_exterior()).collect();
    let mut v = rank_verdict(pts, binomial(d + 1, 2), 0, tol)?;
    v.mobility = Some(axes.len() - v.rank);
    Ok(v)
}

/// Bar lines `lift(p) ∧ lift(q)` in `Λ^2 R^{d+1}`; the platform is
/// infinitesimally flexible when they are dependent.
pub fn platform_flexibility(pf: &Platform, tol: f64) -> Result<Verdict> {
    let lines = pf
        .legs
        .iter()
        .map(|(p, q)| wedge(pf.d + 1, &[lift(p.as_slice()), lift(q.as_slice())]))
        .collect::<Result<Vec<_>>>()?;
    rank_verdict(lines, binomial(pf.d + 1, 2), 0, tol)
}

fn exact_verdict(certificate: RankCertificate<Rational>, offset: usize, mobility: Option<usize>) -> ExactVerdict {
    ExactVerdict {
        rank: certificate.rank.saturating_sub(offset),
        full_rank: certificate.expected_rank - offset,
        singular: certificate.deficient,
        certificate,
        mobility,
    }
}

fn common_dim_exact(axes: &[RationalAxis]) -> Result<usize> {
    let d = axes.first().ok_or(Error::EmptyInput("no axes"))?.dim();
    match axes.iter().find(|a| a.dim() != d) {
        Some(a) => Err(Error::Dimension { expected: d, found: a.dim() }),
        None => Ok(d),
    }
}

/// Exact counterpart of [`cycle_mobility`].
pub fn cycle_mobility_exact(axes: &[RationalAxis]) -> Result<ExactVerdict> {
    if axes.len() < 2 {
        return Err(Error::InvalidChain(format!("a cycle needs at least two axes, got {}", axes.len())));
    }
    let d = common_dim_exact(axes)?;
    let pts: Vec<_> = axes.iter().map(RationalAxis::plucker).collect();
    let cert = rank_of_span_exact(&pts, binomial(d + 1, 2))?;
    let mobility = axes.len() - cert.rank;
    Ok(exact_verdict(cert, 0, Some(mobility)))
}

/// Exact counterpart of [`platform_flexibility`].
pub fn platform_flexibility_exact(d: usize, legs: &[(Vec<Rational>, Vec<Rational>)]) -> Result<ExactVerdict> {
    check_legs(d, legs.iter().map(|(p, q)| (p.as_slice(), q.as_slice())))?;
    let lines = legs.iter().map(|(p, q)| wedge(d + 1, &[lift(p), lift(q)])).collect::<Result<Vec<_>>>()?;
    Ok(exact_verdict(rank_of_span_exact(&lines, binomial(d + 1, 2))?, 0, None))
}

/// Exact end-point verdict at the reference placement. The rank is that of
/// the pairing matrix, whose kernel holds the directions of lines through
/// `e` meeting every axis; the conull vector is one such direction.
pub fn endpoint_singularity_exact(axes: &[RationalAxis], e: &[Rational]) -> Result<ExactVerdict> {
    let d = e.len();
    if let Some(a) = axes.iter().find(|a| a.dim() != d) {
        return Err(Error::Dimension { expected: d, found: a.dim() });
    }
    let lines: Vec<ExteriorVector<Rational>> =
        (0..d).map(|j| flat_plucker(e, &[unit::<Rational>(d, j)])).collect::<Result<_>>()?;
    let mut rows = Vec::with_capacity(axes.len());
    for a in axes {
        let alpha = a.plucker();
        rows.push(lines.iter().map(|l| top_pairing(l, &alpha)).collect::<Result<Vec<_>>>()?);
    }
    let (rank, null) = exact_rank(&rows, d);
    let deficient = rank < d;
    let certificate = RankCertificate {
        rank,
        expected_rank: d,
        singular_values: Vec::new(),
        deficient,
        conull: if deficient { null } else { None },
    };
    Ok(exact_verdict(certificate, 0, None))
}

/// Exact end-frame verdict at the reference placement for a frame with
/// rational, independent (not necessarily orthonormal) vectors.
///
/// The stabilizer is spanned by `lift(o) ∧ e_1 ∧ ... ∧ e_k ∧ x` for all
/// wedges `x` of `d - 2 - k` standard basis vectors.
pub fn frame_singularity_exact(
    axes: &[RationalAxis],
    origin: &[Rational],
    vecs: &[Vec<Rational>],
) -> Result<ExactVerdict> {
    let d = origin.len();
    if let Some(a) = axes.iter().find(|a| a.dim() != d) {
        return Err(Error::Dimension { expected: d, found: a.dim() });
    }
    let k = vecs.len();
    let frame_wedge = wedge(d, vecs)?;
    if frame_wedge.is_zero() {
        return Err(Error::DegenerateAxis);
    }
    let mut pts: Vec<ExteriorVector<Rational>> = axes.iter().map(RationalAxis::plucker).collect();
    let offset = if k + 2 <= d { binomial(d - k, 2) } else { 0 };
    if k + 2 <= d {
        for mask in crate::combinatorics::subsets(d, d - 2 - k) {
            let mut dirs: Vec<Vec<Rational>> = vecs.to_vec();
            dirs.extend(crate::combinatorics::bits(mask).map(|i| unit(d, i)));
            let p = flat_plucker(origin, &dirs)?;
            if !p.is_zero() {
                pts.push(p);
            }
        }
    }
    let cert = rank_of_span_exact(&pts, binomial(d + 1, 2))?;
    Ok(exact_verdict(cert, offset, None))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::chain::{frame_jacobian, numerical_jacobian};
    use crate::scalar::int;
    use alloc::vec;

    fn v(x: &[f64]) -> DVector<f64> {
        DVector::from_column_slice(x)
    }

    fn planar_arm() -> Chain {
        let axes = [0.0, 1.0, 2.0].iter().map(|&x| Axis::from_slices(&[x, 0.0], &[]).unwrap()).collect();
        Chain::open(axes, Frame::point(v(&[3.0, 0.0]))).unwrap()
    }

    #[test]
    fn collinear_arm_witness_is_the_common_line() {
        let verdict = endpoint_singularity(&planar_arm(), &Configuration::zeros(3), 1e-10).unwrap();
        assert!(verdict.singular);
        assert_eq!((verdict.rank, verdict.full_rank), (1, 2));
        let Some(Witness::Lines { point, directions }) = verdict.witness else { panic!("no witness") };
        assert_eq!(point, v(&[3.0, 0.0]));
        assert_eq!(directions.len(), 1);
        assert!(directions[0][1].abs() < 1e-12 && (directions[0][0].abs() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn bent_arm_is_regular() {
        let verdict = endpoint_singularity(&planar_arm(), &Configuration::new(vec![0.3, 0.5, 0.0]), 1e-10).unwrap();
        assert!(!verdict.singular);
        assert!(verdict.witness.is_none());
        assert!(verdict.certificate.conull.is_none());
    }

    #[test]
    fn axes_meeting_a_line_through_the_end_point() {
        // four axes through points of the x-axis, end point on it
        let dirs = [[0.0, 1.0, 0.2], [0.3, 0.0, 1.0], [1.0, 1.0, 1.0], [0.0, 0.5, -1.0]];
        let axes = dirs
            .iter()
            .enumerate()
            .map(|(i, u)| Axis::from_slices(&[i as f64 - 1.5, 0.0, 0.0], &[u]).unwrap())
            .collect();
        let c = Chain::open(axes, Frame::point(v(&[5.0, 0.0, 0.0]))).unwrap();
        let verdict = endpoint_singularity(&c, &Configuration::zeros(4), 1e-10).unwrap();
        assert!(verdict.singular);
        let Some(Witness::Lines { directions, .. }) = verdict.witness else { panic!() };
        assert!((directions[0][0].abs() - 1.0).abs() < 1e-9);
    }

    #[test]
    fn stabilizer_counts() {
        let f3 = Frame::point(v(&[1.0, 2.0, 3.0]));
        assert_eq!(stabilizer_pluckers(&f3).len(), 3);
        let f = Frame::new(v(&[0.0; 4]), vec![v(&[1.0, 0.0, 0.0, 0.0]), v(&[0.0, 1.0, 0.0, 0.0])]).unwrap();
        let s = stabilizer_pluckers(&f);
        assert_eq!(s.len(), 1);
        let own = Axis::from_slices(&[0.0; 4], &[&[1.0, 0.0, 0.0, 0.0], &[0.0, 1.0, 0.0, 0.0]]).unwrap();
        let own = axis_plucker(&own);
        let r = rank_of_span(&[s[0].as_exterior().clone(), own.into_exterior()], 2, 1e-10).unwrap();
        assert_eq!(r.rank, 1);
        let f1 = Frame::new(v(&[0.0; 3]), vec![v(&[0.0, 0.0, 1.0]), v(&[1.0, 0.0, 0.0])]).unwrap();
        assert!(stabilizer_pluckers(&f1).is_empty());
    }

    #[test]
    fn frame_rank_matches_finite_differences() {
        let axes: Vec<Axis> = [
            ([0.0, 0.0, 0.0], [0.0, 0.3, 1.0]),
            ([1.0, 0.2, 0.0], [1.0, 0.0, 0.4]),
            ([0.5, 1.0, -0.3], [0.2, 1.0, 0.1]),
            ([-0.4, 0.7, 1.1], [1.0, -1.0, 0.5]),
            ([0.9, -0.6, 0.4], [0.3, 0.8, -1.0]),
        ]
        .iter()
        .map(|(o, u)| Axis::from_slices(o, &[u]).unwrap())
        .collect();
        let frame = Frame::new(v(&[2.0, 1.0, 0.5]), vec![v(&[0.0, 1.0, 1.0])]).unwrap();
        let c = Chain::open(axes, frame).unwrap();
        let theta = Configuration::new(vec![0.4, -1.2, 0.9, 2.0, -0.3]);
        let verdict = frame_singularity(&c, &theta, 1e-10).unwrap();
        assert_eq!(verdict.full_rank, 5);
        let fd = numerical_jacobian(
            |x| crate::chain::forward_kinematics(&c, &Configuration::new(x.to_vec())).unwrap().frame_at.to_vector(),
            theta.angles(),
            1e-5,
        );
        assert_eq!(numeric_rank(&fd, 1e-6).rank, verdict.rank);
        assert_eq!(numeric_rank(&frame_jacobian(&c, &theta).unwrap(), 1e-10).rank, verdict.rank);
    }

    #[test]
    fn frame_k0_agrees_with_endpoint() {
        let c = planar_arm();
        for theta in [vec![0.0, 0.0, 0.0], vec![0.1, 0.2, 0.3], vec![1.0, 0.0, 0.0]] {
            let t = Configuration::new(theta);
            let a = endpoint_singularity(&c, &t, 1e-10).unwrap();
            let b = frame_singularity(&c, &t, 1e-10).unwrap();
            assert_eq!(a.singular, b.singular);
            assert_eq!(a.rank, b.rank);
        }
    }

    #[test]
    fn platform_desargues() {
        let p = [[0.0, 0.0], [4.0, 0.0], [0.0, 4.0]];
        let o = [1.0, 1.0];
        let legs = p
            .iter()
            .map(|x| {
                let q = [o[0] + 2.0 * (x[0] - o[0]), o[1] + 2.0 * (x[1] - o[1])];
                (v(x), v(&q))
            })
            .collect();
        let verdict = platform_flexibility(&Platform::new(2, legs).unwrap(), 1e-10).unwrap();
        assert!(verdict.singular);
        assert_eq!(verdict.rank, 2);
        assert!(matches!(
            Platform::new(2, vec![(v(&[0.0, 0.0]), v(&[0.0, 0.0])); 3]),
            Err(Error::DegenerateLeg { leg: 0 })
        ));
    }

    #[test]
    fn exact_platform_perturbed() {
        let r = |a: i64| int(a);
        let mut legs = vec![
            (vec![r(0), r(0)], vec![r(-1), r(-1)]),
            (vec![r(4), r(0)], vec![r(7), r(-1)]),
            (vec![r(0), r(4)], vec![r(-1), r(7)]),
        ];
        assert_eq!(platform_flexibility_exact(2, &legs).unwrap().rank, 2);
        legs[0].1[0] += crate::scalar::ratio(1, 1000);
        let verdict = platform_flexibility_exact(2, &legs).unwrap();
        assert_eq!(verdict.rank, 3);
        assert!(!verdict.singular);
    }

    #[test]
    fn exact_endpoint_matches_float() {
        let axes = vec![
            RationalAxis::new(vec![int(0), int(0)], vec![]).unwrap(),
            RationalAxis::new(vec![int(1), int(0)], vec![]).unwrap(),
        ];
        let e = vec![int(3), int(0)];
        let verdict = endpoint_singularity_exact(&axes, &e).unwrap();
        assert_eq!(verdict.rank, 1);
        assert_eq!(verdict.certificate.conull.unwrap(), vec![int(1), int(0)]);
        let frame = frame_singularity_exact(&axes, &e, &[]).unwrap();
        assert_eq!((frame.rank, frame.full_rank, frame.singular), (1, 2, true));
    }

    #[test]
    fn exact_frame_with_skewed_vectors() {
        // k = 1 in R^3 with a non-unit frame vector: same verdict as float
        let ax = [([0, 0, 0], [0, 1, 3]), ([2, 1, 0], [1, 0, 2]), ([1, 3, -1], [1, 5, 1]), ([-2, 2, 3], [2, -3, 1])];
        let raxes: Vec<RationalAxis> = ax
            .iter()
            .map(|(o, u)| {
                RationalAxis::new(o.iter().map(|&x| int(x)).collect(), vec![u.iter().map(|&x| int(x)).collect()])
                    .unwrap()
            })
            .collect();
        let origin = vec![int(4), int(1), int(1)];
        let vecs = vec![vec![int(0), int(2), int(2)]];
        let exact = frame_singularity_exact(&raxes, &origin, &vecs).unwrap();
        let axes: Vec<Axis> = raxes.iter().map(|a| a.to_axis().unwrap()).collect();
        let frame = Frame::new(v(&[4.0, 1.0, 1.0]), vec![v(&[0.0, 2.0, 2.0])]).unwrap();
        let c = Chain::open(axes, frame).unwrap();
        let float = frame_singularity(&c, &Configuration::zeros(4), 1e-10).unwrap();
        assert_eq!((exact.rank, exact.full_rank, exact.singular), (float.rank, float.full_rank, float.singular));
    }

    #[test]
    fn mobility_counts() {
        let axes: Vec<Axis> = (0..7)
            .map(|i| {
                let t = i as f64;
                Axis::from_slices(&[t, t * t * 0.3, -t], &[&[1.0, 0.1 * t, libm::sin(t * 1.7)]]).unwrap()
            })
            .collect();
        let verdict = cycle_mobility(&axes, 1e-10).unwrap();
        assert_eq!((verdict.rank, verdict.mobility), (6, Some(1)));
        assert!(!verdict.singular);
        assert!(matches!(cycle_mobility(&axes[..1], 1e-10), Err(Error::InvalidChain(_))));
    }
}
