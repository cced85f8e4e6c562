//! Exterior algebra on `R^m` in dense lexicographic coordinates.
//!
//! A grade-`k` vector in ambient `m` stores `C(m, k)` coefficients, one per
//! k-subset of `{1..m}`. Subsets are ordered lexicographically by their
//! sorted element lists: for `m = 4, k = 2` the order is
//! `12, 13, 14, 23, 24, 34`. [`ExteriorVector::coeff`] and
//! [`ExteriorVector::index_of`] expose that bijection.

use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use nalgebra::DMatrix;

use crate::combinatorics::{self, binomial, bits, merge_sign, subsets};
use crate::linalg::{self, determinant};
use crate::scalar::{Rational, Scalar};
use crate::{Error, Result};

/// An element of `Λ^k R^m`.
#[derive(Debug, Clone, PartialEq)]
pub struct ExteriorVector<T = f64> {
    grade: usize,
    ambient: usize,
    coeffs: Vec<T>,
}

impl<T: Scalar> ExteriorVector<T> {
    pub fn new(grade: usize, ambient: usize, coeffs: Vec<T>) -> Result<Self> {
        if grade > ambient {
            return Err(Error::Grade(format!("grade {grade} exceeds ambient {ambient}")));
        }
        let expected = binomial(ambient, grade);
        if coeffs.len() != expected {
            return Err(Error::Dimension { expected, found: coeffs.len() });
        }
        Ok(Self { grade, ambient, coeffs })
    }

    pub fn zero(grade: usize, ambient: usize) -> Result<Self> {
        if grade > ambient {
            return Err(Error::Grade(format!("grade {grade} exceeds ambient {ambient}")));
        }
        Ok(Self { grade, ambient, coeffs: vec![T::zero(); binomial(ambient, grade)] })
    }

    /// The basis blade `e_{i1} ∧ ... ∧ e_{ik}` for strictly increasing
    /// zero-based indices.
    pub fn basis(ambient: usize, indices: &[usize]) -> Result<Self> {
        if indices.windows(2).any(|w| w[0] >= w[1]) || indices.iter().any(|&i| i >= ambient) {
            return Err(Error::Grade(format!("invalid basis blade {indices:?} in ambient {ambient}")));
        }
        let mut v = Self::zero(indices.len(), ambient)?;
        let mask = indices.iter().fold(0u32, |acc, &i| acc | (1 << i));
        v.coeffs[combinatorics::subset_index(ambient, mask)] = T::one();
        Ok(v)
    }

    pub fn grade(&self) -> usize {
        self.grade
    }

    pub fn ambient(&self) -> usize {
        self.ambient
    }

    pub fn coeffs(&self) -> &[T] {
        &self.coeffs
    }

    pub fn into_coeffs(self) -> Vec<T> {
        self.coeffs
    }

    /// Flat index of the subset given by strictly increasing zero-based
    /// indices.
    pub fn index_of(&self, indices: &[usize]) -> Option<usize> {
        if indices.len() != self.grade || indices.windows(2).any(|w| w[0] >= w[1]) {
            return None;
        }
        if indices.iter().any(|&i| i >= self.ambient) {
            return None;
        }
        let mask = indices.iter().fold(0u32, |acc, &i| acc | (1 << i));
        Some(combinatorics::subset_index(self.ambient, mask))
    }

    pub fn coeff(&self, indices: &[usize]) -> Option<&T> {
        self.index_of(indices).map(|i| &self.coeffs[i])
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|c| c.is_zero())
    }

    pub fn scale(&self, s: T) -> Self {
        Self {
            grade: self.grade,
            ambient: self.ambient,
            coeffs: self.coeffs.iter().map(|c| c.clone() * s.clone()).collect(),
        }
    }

    pub fn try_add(&self, other: &Self) -> Result<Self> {
        self.check_same_space(other)?;
        let coeffs = self.coeffs.iter().zip(&other.coeffs).map(|(a, b)| a.clone() + b.clone()).collect();
        Ok(Self { grade: self.grade, ambient: self.ambient, coeffs })
    }

    pub fn try_sub(&self, other: &Self) -> Result<Self> {
        self.try_add(&other.scale(-T::one()))
    }

    /// Euclidean inner product of coefficient vectors.
    pub fn dot(&self, other: &Self) -> Result<T> {
        self.check_same_space(other)?;
        Ok(self.coeffs.iter().zip(&other.coeffs).fold(T::zero(), |acc, (a, b)| acc + a.clone() * b.clone()))
    }

    /// Exterior product `self ∧ other`.
    pub fn wedge_with(&self, other: &Self) -> Result<Self> {
        if self.ambient != other.ambient {
            return Err(Error::Dimension { expected: self.ambient, found: other.ambient });
        }
        let m = self.ambient;
        let grade = self.grade + other.grade;
        let mut out = Self::zero(grade, m)
            .map_err(|_| Error::Grade(format!("grades {} + {} exceed ambient {m}", self.grade, other.grade)))?;
        let left = subsets(m, self.grade);
        let right = subsets(m, other.grade);
        for (i, &a) in left.iter().enumerate() {
            if self.coeffs[i].is_zero() {
                continue;
            }
            for (j, &b) in right.iter().enumerate() {
                if a & b != 0 || other.coeffs[j].is_zero() {
                    continue;
                }
                let term = self.coeffs[i].clone() * other.coeffs[j].clone();
                let k = combinatorics::subset_index(m, a | b);
                out.coeffs[k] =
                    if merge_sign(a, b) > 0 { out.coeffs[k].clone() + term } else { out.coeffs[k].clone() - term };
            }
        }
        Ok(out)
    }

    /// Applies the linear map `x ↦ A x` of `R^m` to this vector through its
    /// induced action on `Λ^k`.
    pub fn transform(&self, rows: &[Vec<T>]) -> Result<Self> {
        let m = self.ambient;
        if rows.len() != m || rows.iter().any(|r| r.len() != m) {
            return Err(Error::Dimension { expected: m, found: rows.len() });
        }
        let cols: Vec<Vec<T>> = (0..m).map(|j| rows.iter().map(|r| r[j].clone()).collect()).collect();
        let mut out = Self::zero(self.grade, m)?;
        for (i, &mask) in subsets(m, self.grade).iter().enumerate() {
            if self.coeffs[i].is_zero() {
                continue;
            }
            let images: Vec<Vec<T>> = bits(mask).map(|j| cols[j].clone()).collect();
            let w = wedge(m, &images)?.scale(self.coeffs[i].clone());
            out = out.try_add(&w)?;
        }
        Ok(out)
    }

    fn check_same_space(&self, other: &Self) -> Result<()> {
        if self.ambient != other.ambient {
            return Err(Error::Dimension { expected: self.ambient, found: other.ambient });
        }
        if self.grade != other.grade {
            return Err(Error::Grade(format!("grade {} vs {}", self.grade, other.grade)));
        }
        Ok(())
    }
}

impl ExteriorVector<f64> {
    pub fn norm(&self) -> f64 {
        libm::sqrt(self.coeffs.iter().map(|c| c * c).sum())
    }

    /// Exact rational copy of a float vector (each `f64` is a dyadic
    /// rational).
    pub fn to_rational(&self) -> ExteriorVector<Rational> {
        ExteriorVector {
            grade: self.grade,
            ambient: self.ambient,
            coeffs: self.coeffs.iter().map(|&c| Rational::from_float(c).expect("finite coefficient")).collect(),
        }
    }
}

impl ExteriorVector<Rational> {
    pub fn to_f64(&self) -> ExteriorVector<f64> {
        ExteriorVector {
            grade: self.grade,
            ambient: self.ambient,
            coeffs: self.coeffs.iter().map(Scalar::to_f64).collect(),
        }
    }
}

/// `v_1 ∧ ... ∧ v_j` for `j` vectors of length `m`. The coefficient on a
/// subset `S` is the determinant of rows `S` of the `m × j` matrix whose
/// columns are the inputs.
pub fn wedge<T: Scalar, V: AsRef<[T]>>(m: usize, vectors: &[V]) -> Result<ExteriorVector<T>> {
    let j = vectors.len();
    if j > m {
        return Err(Error::Grade(format!("cannot wedge {j} vectors in ambient {m}")));
    }
    for v in vectors {
        if v.as_ref().len() != m {
            return Err(Error::Dimension { expected: m, found: v.as_ref().len() });
        }
    }
    let coeffs = subsets(m, j)
        .into_iter()
        .map(|mask| {
            let rows: Vec<Vec<T>> =
                bits(mask).map(|r| vectors.iter().map(|v| v.as_ref()[r].clone()).collect()).collect();
            determinant(&rows)
        })
        .collect();
    Ok(ExteriorVector { grade: j, ambient: m, coeffs })
}

/// Coefficient of `a ∧ b` on `e_1 ∧ ... ∧ e_m`, for `grade(a) + grade(b) = m`.
pub fn top_pairing<T: Scalar>(a: &ExteriorVector<T>, b: &ExteriorVector<T>) -> Result<T> {
    if a.ambient != b.ambient {
        return Err(Error::Dimension { expected: a.ambient, found: b.ambient });
    }
    let m = a.ambient;
    if a.grade + b.grade != m {
        return Err(Error::Grade(format!(
            "pairing needs complementary grades, got {} + {} in ambient {m}",
            a.grade, b.grade
        )));
    }
    let full: u32 = if m == 32 { u32::MAX } else { (1u32 << m) - 1 };
    let mut acc = T::zero();
    for (i, &mask) in subsets(m, a.grade).iter().enumerate() {
        if a.coeffs[i].is_zero() {
            continue;
        }
        let comp = full & !mask;
        let j = combinatorics::subset_index(m, comp);
        let term = a.coeffs[i].clone() * b.coeffs[j].clone();
        acc = if merge_sign(mask, comp) > 0 { acc + term } else { acc - term };
    }
    Ok(acc)
}

/// Rank of the span of a family of exterior vectors, with a functional
/// vanishing on the span when the rank falls below `expected_rank`.
#[derive(Debug, Clone, PartialEq)]
pub struct RankCertificate<T = f64> {
    pub rank: usize,
    pub expected_rank: usize,
    /// Descending; empty for exact certificates.
    pub singular_values: Vec<f64>,
    pub deficient: bool,
    /// In float mode a unit vector; in exact mode a primitive integer
    /// vector. Present iff `deficient` and the span is a proper subspace.
    pub conull: Option<Vec<T>>,
}

impl RankCertificate<f64> {
    pub fn sigma_min(&self) -> f64 {
        self.singular_values.last().copied().unwrap_or(0.0)
    }
}

fn check_family<T: Scalar>(vs: &[ExteriorVector<T>]) -> Result<Option<(usize, usize)>> {
    let Some(first) = vs.first() else {
        return Ok(None);
    };
    for v in vs {
        if v.ambient != first.ambient {
            return Err(Error::Dimension { expected: first.ambient, found: v.ambient });
        }
        if v.grade != first.grade {
            return Err(Error::Grade(format!("mixed grades {} and {}", first.grade, v.grade)));
        }
    }
    Ok(Some((first.grade, first.ambient)))
}

/// Numerical rank of `span(vs)`: singular values above
/// `tol * sigma_max * max(#vectors, C(m, k))`.
pub fn rank_of_span(vs: &[ExteriorVector<f64>], expected_rank: usize, tol: f64) -> Result<RankCertificate<f64>> {
    let Some((_, _)) = check_family(vs)? else {
        return Ok(empty_certificate(expected_rank, 1.0));
    };
    let dim = vs[0].coeffs.len();
    let mat = DMatrix::from_fn(vs.len(), dim, |i, j| vs[i].coeffs[j]);
    let nr = linalg::numeric_rank(&mat, tol);
    let deficient = nr.rank < expected_rank;
    let conull = if deficient { nr.right_null.first().map(|v| v.iter().copied().collect()) } else { None };
    Ok(RankCertificate { rank: nr.rank, expected_rank, singular_values: nr.singular_values, deficient, conull })
}

/// Exact rank of `span(vs)` over the rationals.
pub fn rank_of_span_exact(vs: &[ExteriorVector<Rational>], expected_rank: usize) -> Result<RankCertificate<Rational>> {
    let Some((_, _)) = check_family(vs)? else {
        return Ok(empty_certificate(expected_rank, Rational::from_i64(1)));
    };
    let dim = vs[0].coeffs.len();
    let rows: Vec<Vec<Rational>> = vs.iter().map(|v| v.coeffs.clone()).collect();
    let (rank, null) = linalg::exact_rank(&rows, dim);
    let deficient = rank < expected_rank;
    Ok(RankCertificate {
        rank,
        expected_rank,
        singular_values: Vec::new(),
        deficient,
        conull: if deficient { null } else { None },
    })
}

// With no vectors there is no ambient to size a functional from; a
// one-entry placeholder marks the deficiency.
fn empty_certificate<T>(expected_rank: usize, unit: T) -> RankCertificate<T> {
    let deficient = expected_rank > 0;
    RankCertificate {
        rank: 0,
        expected_rank,
        singular_values: Vec::new(),
        deficient,
        conull: deficient.then(|| vec![unit]),
    }
}
