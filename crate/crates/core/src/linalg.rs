//! Small dense linear algebra: SVD-based numerical rank with null spaces,
//! determinants over any [`Scalar`], and exact fraction-free rank over the
//! rationals.

use alloc::vec;
use alloc::vec::Vec;

use nalgebra::{DMatrix, DVector};
use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use crate::scalar::{Rational, Scalar};

/// Numerical rank of a matrix, with orthonormal bases of both null spaces.
#[derive(Debug, Clone)]
pub struct NumericRank {
    pub rank: usize,
    /// The `min(rows, cols)` singular values, descending.
    pub singular_values: Vec<f64>,
    /// Absolute threshold `tol * sigma_max * max(rows, cols)`.
    pub threshold: f64,
    /// Basis of `{x : A x = 0}`, ordered by increasing singular value.
    pub right_null: Vec<DVector<f64>>,
    /// Basis of `{y : y^T A = 0}`, ordered by increasing singular value.
    pub left_null: Vec<DVector<f64>>,
}

impl NumericRank {
    pub fn sigma_min(&self) -> f64 {
        self.singular_values.last().copied().unwrap_or(0.0)
    }

    pub fn sigma_max(&self) -> f64 {
        self.singular_values.first().copied().unwrap_or(0.0)
    }
}

/// Right singular vectors and singular values of `a`, padded with zero rows
/// so that all `cols` right singular vectors are returned. Sorted by
/// descending singular value; the value list has `cols` entries.
fn full_right_svd(a: &DMatrix<f64>) -> (Vec<f64>, Vec<DVector<f64>>) {
    let (r, c) = a.shape();
    if c == 0 {
        return (Vec::new(), Vec::new());
    }
    let padded = if r < c {
        let mut p = DMatrix::zeros(c, c);
        p.view_mut((0, 0), (r, c)).copy_from(a);
        p
    } else {
        a.clone()
    };
    let svd = padded.svd(false, true);
    let v_t = svd.v_t.expect("requested V^T");
    let mut order: Vec<usize> = (0..svd.singular_values.len()).collect();
    order.sort_by(|&i, &j| svd.singular_values[j].total_cmp(&svd.singular_values[i]));
    let values = order.iter().map(|&i| svd.singular_values[i]).collect();
    let vectors = order.iter().map(|&i| v_t.row(i).transpose()).collect();
    (values, vectors)
}

/// Numerical rank: singular values above `tol * sigma_max * max(rows, cols)`.
pub fn numeric_rank(a: &DMatrix<f64>, tol: f64) -> NumericRank {
    let (r, c) = a.shape();
    let (values_r, right) = full_right_svd(a);
    let (_, left) = full_right_svd(&a.transpose());
    let k = r.min(c);
    let singular_values: Vec<f64> = values_r.iter().take(k).copied().collect();
    let sigma_max = singular_values.first().copied().unwrap_or(0.0);
    let threshold = tol * sigma_max * r.max(c) as f64;
    let rank = singular_values.iter().filter(|&&s| s > threshold && s > 0.0).count();
    let right_null = right.into_iter().skip(rank).rev().collect();
    let left_null = left.into_iter().skip(rank).rev().collect();
    NumericRank { rank, singular_values, threshold, right_null, left_null }
}

/// Moore–Penrose pseudo-inverse applied to `b`, with singular values below
/// `tol * sigma_max` discarded.
pub fn pinv_solve(a: &DMatrix<f64>, b: &DVector<f64>, tol: f64) -> DVector<f64> {
    let svd = a.clone().svd(true, true);
    let smax = svd.singular_values.iter().fold(0.0f64, |m, &s| m.max(s));
    let eps = tol * smax;
    let u = svd.u.as_ref().expect("U");
    let v_t = svd.v_t.as_ref().expect("V^T");
    let mut x = DVector::zeros(a.ncols());
    for (i, &s) in svd.singular_values.iter().enumerate() {
        if s > eps && s > 0.0 {
            let coeff = u.column(i).dot(b) / s;
            x += v_t.row(i).transpose() * coeff;
        }
    }
    x
}

/// Determinant by Gaussian elimination with partial pivoting. Exact over
/// [`Rational`].
#[allow(clippy::needless_range_loop)]
pub fn determinant<T: Scalar>(rows: &[Vec<T>]) -> T {
    let n = rows.len();
    let mut m: Vec<Vec<T>> = rows.to_vec();
    let mut det = T::one();
    for col in 0..n {
        let mut best = col;
        let mut best_w = m[col][col].pivot_weight();
        for (r, row) in m.iter().enumerate().skip(col + 1) {
            let w = row[col].pivot_weight();
            if w > best_w {
                best = r;
                best_w = w;
            }
        }
        if best_w == 0.0 {
            return T::zero();
        }
        if best != col {
            m.swap(best, col);
            det = -det;
        }
        let pivot = m[col][col].clone();
        det = det * pivot.clone();
        for r in col + 1..n {
            if m[r][col].is_zero() {
                continue;
            }
            let factor = m[r][col].clone() / pivot.clone();
            for c in col..n {
                let delta = factor.clone() * m[col][c].clone();
                m[r][c] = m[r][c].clone() - delta;
            }
        }
    }
    det
}

/// Exact rank of a rational matrix together with one primitive integer
/// vector of its right null space when the rank is below the column count.
///
/// Rows are cleared of denominators and reduced with Bareiss fraction-free
/// elimination; the null vector comes from rational back-substitution on
/// the resulting echelon form.
#[allow(clippy::needless_range_loop)]
pub fn exact_rank(rows: &[Vec<Rational>], cols: usize) -> (usize, Option<Vec<Rational>>) {
    let mut m: Vec<Vec<BigInt>> = rows.iter().map(|r| clear_denominators(r)).collect();
    let nrows = m.len();
    let mut pivots: Vec<usize> = Vec::new();
    let mut prev = BigInt::one();
    let mut row = 0;
    for col in 0..cols {
        if row == nrows {
            break;
        }
        let Some(p) = (row..nrows).find(|&r| !m[r][col].is_zero()) else {
            continue;
        };
        m.swap(row, p);
        let pivot = m[row][col].clone();
        for r in row + 1..nrows {
            let lead = m[r][col].clone();
            for c in col + 1..cols {
                let v = &m[r][c] * &pivot - &lead * &m[row][c];
                m[r][c] = v / &prev;
            }
            m[r][col] = BigInt::zero();
        }
        prev = pivot;
        pivots.push(col);
        row += 1;
    }
    let rank = pivots.len();
    if rank == cols {
        return (rank, None);
    }
    let free = (0..cols).find(|c| !pivots.contains(c)).expect("free column");
    let mut x: Vec<Rational> = vec![Rational::zero(); cols];
    x[free] = Rational::one();
    for (k, &pc) in pivots.iter().enumerate().rev() {
        let mut acc = Rational::zero();
        for c in pc + 1..cols {
            if !m[k][c].is_zero() {
                acc += Rational::from_integer(m[k][c].clone()) * &x[c];
            }
        }
        x[pc] = -acc / Rational::from_integer(m[k][pc].clone());
    }
    (rank, Some(primitive(&x)))
}

fn clear_denominators(row: &[Rational]) -> Vec<BigInt> {
    let l = row.iter().fold(BigInt::one(), |acc, q| acc.lcm(q.denom()));
    row.iter().map(|q| q.numer() * (&l / q.denom())).collect()
}

/// Scales a rational vector to coprime integers with a positive first
/// nonzero entry.
fn primitive(x: &[Rational]) -> Vec<Rational> {
    let ints = clear_denominators(x);
    let g = ints.iter().fold(BigInt::zero(), |acc, v| acc.gcd(v));
    if g.is_zero() {
        return x.to_vec();
    }
    let sign = match ints.iter().find(|v| !v.is_zero()) {
        Some(v) if v.is_negative() => -BigInt::one(),
        _ => BigInt::one(),
    };
    ints.iter().map(|v| Rational::from_integer(v / &g * &sign)).collect()
}
