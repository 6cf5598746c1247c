//! Small dense linear algebra over any [`Scalar`].
//!
//! The matrices in this crate are at most a few dozen rows wide, so a plain
//! row-major `Vec` is all that is needed. Symmetric eigenproblems use cyclic
//! Jacobi rotations; exact PSD splitting uses symmetric elimination.

use std::fmt;
use std::ops::{Index, IndexMut};

use num_traits::Float;

use crate::error::{Error, Result};
use crate::scalar::{is_negligible, RankTolerance, Scalar};

#[derive(Clone, PartialEq)]
pub struct Matrix<T> {
    rows: usize,
    cols: usize,
    data: Vec<T>,
}

impl<T: fmt::Debug> fmt::Debug for Matrix<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "Matrix {}x{} [", self.rows, self.cols)?;
        for r in 0..self.rows {
            writeln!(f, "  {:?}", &self.data[r * self.cols..(r + 1) * self.cols])?;
        }
        write!(f, "]")
    }
}

impl<T> Index<(usize, usize)> for Matrix<T> {
    type Output = T;

    fn index(&self, (r, c): (usize, usize)) -> &T {
        debug_assert!(r < self.rows && c < self.cols);
        &self.data[r * self.cols + c]
    }
}

impl<T> IndexMut<(usize, usize)> for Matrix<T> {
    fn index_mut(&mut self, (r, c): (usize, usize)) -> &mut T {
        debug_assert!(r < self.rows && c < self.cols);
        &mut self.data[r * self.cols + c]
    }
}

impl<T: Scalar> Matrix<T> {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            data: vec![T::zero(); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = T::one();
        }
        m
    }

    pub fn from_rows(rows: Vec<Vec<T>>) -> Result<Self> {
        let r = rows.len();
        let c = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|row| row.len() != c) {
            return Err(Error::Malformed("ragged matrix rows".into()));
        }
        Ok(Self {
            rows: r,
            cols: c,
            data: rows.into_iter().flatten().collect(),
        })
    }

    pub fn from_columns(rows: usize, columns: &[Vec<T>]) -> Self {
        let mut m = Self::zeros(rows, columns.len());
        for (c, col) in columns.iter().enumerate() {
            for (r, v) in col.iter().enumerate() {
                m[(r, c)] = v.clone();
            }
        }
        m
    }

    pub fn diagonal(entries: &[T]) -> Self {
        let mut m = Self::zeros(entries.len(), entries.len());
        for (i, v) in entries.iter().enumerate() {
            m[(i, i)] = v.clone();
        }
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn row(&self, r: usize) -> &[T] {
        &self.data[r * self.cols..(r + 1) * self.cols]
    }

    pub fn column(&self, c: usize) -> Vec<T> {
        (0..self.rows).map(|r| self[(r, c)].clone()).collect()
    }

    pub fn to_rows(&self) -> Vec<Vec<T>> {
        (0..self.rows).map(|r| self.row(r).to_vec()).collect()
    }

    pub fn transpose(&self) -> Self {
        let mut t = Self::zeros(self.cols, self.rows);
        for r in 0..self.rows {
            for c in 0..self.cols {
                t[(c, r)] = self[(r, c)].clone();
            }
        }
        t
    }

    pub fn mul(&self, other: &Self) -> Self {
        assert_eq!(self.cols, other.rows, "matrix product shape mismatch");
        let mut out = Self::zeros(self.rows, other.cols);
        for r in 0..self.rows {
            for k in 0..self.cols {
                let a = &self[(r, k)];
                if a.is_zero() {
                    continue;
                }
                for c in 0..other.cols {
                    let b = &other[(k, c)];
                    if b.is_zero() {
                        continue;
                    }
                    out[(r, c)] = out[(r, c)].clone() + a.clone() * b.clone();
                }
            }
        }
        out
    }

    pub fn mul_vec(&self, v: &[T]) -> Vec<T> {
        assert_eq!(self.cols, v.len(), "matrix-vector shape mismatch");
        (0..self.rows)
            .map(|r| dot(self.row(r), v))
            .collect()
    }

    pub fn add(&self, other: &Self) -> Self {
        self.zip_with(other, |a, b| a.clone() + b.clone())
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.zip_with(other, |a, b| a.clone() - b.clone())
    }

    pub fn scale(&self, s: &T) -> Self {
        self.map(|x| x.clone() * s.clone())
    }

    pub fn map<U: Scalar>(&self, f: impl Fn(&T) -> U) -> Matrix<U> {
        Matrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(f).collect(),
        }
    }

    fn zip_with(&self, other: &Self, f: impl Fn(&T, &T) -> T) -> Self {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        Self {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&other.data).map(|(a, b)| f(a, b)).collect(),
        }
    }

    /// Largest absolute entry, as `f64`.
    pub fn max_abs(&self) -> f64 {
        self.data.iter().map(|x| x.to_f64().abs()).fold(0.0, f64::max)
    }

    pub fn to_f64(&self) -> Matrix<f64> {
        self.map(|x| x.to_f64())
    }

    pub fn is_symmetric(&self, tol: f64) -> bool {
        self.is_square()
            && (0..self.rows).all(|r| {
                (r + 1..self.cols)
                    .all(|c| is_negligible(&(self[(r, c)].clone() - self[(c, r)].clone()), tol))
            })
    }
}

pub fn dot<T: Scalar>(a: &[T], b: &[T]) -> T {
    a.iter()
        .zip(b)
        .fold(T::zero(), |acc, (x, y)| acc + x.clone() * y.clone())
}

pub fn axpy<T: Scalar>(y: &mut [T], alpha: &T, x: &[T]) {
    for (yi, xi) in y.iter_mut().zip(x) {
        *yi = yi.clone() + alpha.clone() * xi.clone();
    }
}

/// Eigendecomposition of a real symmetric matrix by cyclic Jacobi rotations.
///
/// Returns eigenvalues in descending order together with the matching
/// orthonormal eigenvectors as columns.
pub fn symmetric_eigen<F: Scalar + Float>(a: &Matrix<F>) -> (Vec<F>, Matrix<F>) {
    assert!(a.is_square(), "eigendecomposition needs a square matrix");
    let n = a.rows();
    let mut m = a.clone();
    let mut v = Matrix::<F>::identity(n);
    let two = F::one() + F::one();
    let frob = m.data.iter().fold(F::zero(), |acc, x| acc + *x * *x).sqrt();
    let floor = <F as Float>::epsilon() * frob * F::from(1e-3).unwrap_or_else(F::zero);

    for _sweep in 0..100 {
        let mut off = F::zero();
        for p in 0..n {
            for q in p + 1..n {
                off = off + m[(p, q)] * m[(p, q)];
            }
        }
        if off.sqrt() <= floor || off.is_zero() {
            break;
        }
        for p in 0..n {
            for q in p + 1..n {
                let apq = m[(p, q)];
                if Float::abs(apq) <= floor {
                    continue;
                }
                let theta = (m[(q, q)] - m[(p, p)]) / (two * apq);
                let t = if theta.is_infinite() {
                    F::zero()
                } else {
                    let sign = if theta < F::zero() { -F::one() } else { F::one() };
                    sign / (Float::abs(theta) + (theta * theta + F::one()).sqrt())
                };
                let c = F::one() / (t * t + F::one()).sqrt();
                let s = t * c;
                for k in 0..n {
                    let (akp, akq) = (m[(k, p)], m[(k, q)]);
                    m[(k, p)] = c * akp - s * akq;
                    m[(k, q)] = s * akp + c * akq;
                }
                for k in 0..n {
                    let (apk, aqk) = (m[(p, k)], m[(q, k)]);
                    m[(p, k)] = c * apk - s * aqk;
                    m[(q, k)] = s * apk + c * aqk;
                }
                for k in 0..n {
                    let (vkp, vkq) = (v[(k, p)], v[(k, q)]);
                    v[(k, p)] = c * vkp - s * vkq;
                    v[(k, q)] = s * vkp + c * vkq;
                }
            }
        }
    }

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| {
        m[(j, j)]
            .partial_cmp(&m[(i, i)])
            .unwrap_or(std::cmp::Ordering::Equal)
    });
    let values: Vec<F> = order.iter().map(|&i| m[(i, i)]).collect();
    let mut vectors = Matrix::<F>::zeros(n, n);
    for (dst, &src) in order.iter().enumerate() {
        let mut col = v.column(src);
        normalize_sign(&mut col);
        for (r, x) in col.into_iter().enumerate() {
            vectors[(r, dst)] = x;
        }
    }
    (values, vectors)
}

/// Flips `v` so that its largest-magnitude entry (first on ties) is positive.
fn normalize_sign<T: Scalar>(v: &mut [T]) {
    let mut best = 0;
    let mut best_abs = -1.0;
    for (i, x) in v.iter().enumerate() {
        let a = x.to_f64().abs();
        if a > best_abs + 1e-12 * best_abs.abs().max(1.0) {
            best = i;
            best_abs = a;
        }
    }
    if !v.is_empty() && v[best] < T::zero() {
        for x in v.iter_mut() {
            *x = -x.clone();
        }
    }
}

/// One positive direction of a PSD split.
#[derive(Debug, Clone, PartialEq)]
pub struct PositiveDirection<T> {
    /// Coefficient vector; the directions are mutually orthogonal in the metric.
    pub vector: Vec<T>,
    /// Squared seminorm `vᵀ G v`, strictly positive.
    pub norm_sq: T,
    /// Dual vector: `dual · r` is the coefficient of `r` along `vector`.
    pub dual: Vec<T>,
}

/// Decomposition of a PSD matrix `G` into metric-orthogonal positive
/// directions and a basis of its kernel.
#[derive(Debug, Clone, PartialEq)]
pub struct PsdSplit<T> {
    pub size: usize,
    pub positive: Vec<PositiveDirection<T>>,
    pub null: Vec<Vec<T>>,
    /// Values at or below this count as zero (0 in exact mode).
    pub threshold: f64,
    /// Smallest eigenvalue (float) or pivot (exact) seen.
    pub min_value: f64,
    /// Largest eigenvalue (float) or pivot (exact) seen.
    pub max_value: f64,
}

impl<T: Scalar> PsdSplit<T> {
    pub fn rank(&self) -> usize {
        self.positive.len()
    }

    pub fn nullity(&self) -> usize {
        self.null.len()
    }

    /// Coordinates of `r` along the positive directions.
    pub fn coordinates(&self, r: &[T]) -> Vec<T> {
        self.positive.iter().map(|p| dot(&p.dual, r)).collect()
    }

    /// `rᵀ G r` evaluated through the split; null components contribute nothing.
    pub fn seminorm_sq(&self, r: &[T]) -> T {
        self.positive.iter().fold(T::zero(), |acc, p| {
            let a = dot(&p.dual, r);
            acc + p.norm_sq.clone() * a.clone() * a
        })
    }

    pub fn seminorm(&self, r: &[T]) -> f64 {
        self.seminorm_sq(r).to_f64().max(0.0).sqrt()
    }

    /// `aᵀ G b` evaluated through the split.
    pub fn inner(&self, a: &[T], b: &[T]) -> T {
        self.positive.iter().fold(T::zero(), |acc, p| {
            acc + p.norm_sq.clone() * dot(&p.dual, a) * dot(&p.dual, b)
        })
    }

    /// Generalized inverse `Σ v vᵀ / (vᵀ G v)` over positive directions. For
    /// floats this is the Moore-Penrose pseudo-inverse.
    pub fn pseudo_inverse(&self) -> Matrix<T> {
        let mut out = Matrix::<T>::zeros(self.size, self.size);
        for p in &self.positive {
            for r in 0..self.size {
                if p.vector[r].is_zero() {
                    continue;
                }
                let s = p.vector[r].clone() / p.norm_sq.clone();
                for c in 0..self.size {
                    out[(r, c)] = out[(r, c)].clone() + s.clone() * p.vector[c].clone();
                }
            }
        }
        out
    }
}

fn not_psd(eigenvalue: f64, tolerance: f64) -> Error {
    Error::NotPositiveSemidefinite {
        degree: usize::MAX,
        eigenvalue,
        tolerance,
    }
}

pub(crate) fn float_psd_split<F: Scalar + Float>(
    g: &Matrix<F>,
    tol: &RankTolerance,
) -> Result<PsdSplit<F>> {
    let n = g.rows();
    if n == 0 {
        return Ok(PsdSplit {
            size: 0,
            positive: Vec::new(),
            null: Vec::new(),
            threshold: tol.absolute,
            min_value: 0.0,
            max_value: 0.0,
        });
    }
    let (values, vectors) = symmetric_eigen(g);
    let lmax = values.iter().map(|v| Scalar::to_f64(v).abs()).fold(0.0, f64::max);
    let threshold = (n as f64 * F::EPSILON * lmax).max(tol.absolute);
    let psd_floor = threshold.max(tol.psd_relative * lmax.max(1.0));
    let min_value = values.iter().map(|v| Scalar::to_f64(v)).fold(f64::INFINITY, f64::min);
    if min_value < -psd_floor {
        return Err(not_psd(min_value, psd_floor));
    }
    let mut positive = Vec::new();
    let mut null = Vec::new();
    for (k, lambda) in values.iter().enumerate() {
        let u = vectors.column(k);
        if Scalar::to_f64(lambda) > threshold {
            positive.push(PositiveDirection {
                dual: u.clone(),
                vector: u,
                norm_sq: *lambda,
            });
        } else {
            null.push(u);
        }
    }
    Ok(PsdSplit {
        size: n,
        positive,
        null,
        threshold,
        min_value,
        max_value: lmax,
    })
}

/// Exact congruence diagonalization `Vᵀ G V = diag(d)` by symmetric
/// elimination. Zero pivots mark kernel directions; a negative pivot, or a
/// nonzero entry left in a zero-diagonal block, proves `G` is not PSD.
pub(crate) fn exact_psd_split<T: Scalar>(g: &Matrix<T>) -> Result<PsdSplit<T>> {
    let n = g.rows();
    let mut a = g.clone();
    let mut basis: Vec<Vec<T>> = (0..n)
        .map(|i| (0..n).map(|j| if i == j { T::one() } else { T::zero() }).collect())
        .collect();
    let mut remaining: Vec<usize> = (0..n).collect();
    let mut positive = Vec::new();
    let mut min_value = f64::INFINITY;
    let mut max_value: f64 = 0.0;

    while let Some(pos) = remaining.iter().position(|&p| !a[(p, p)].is_zero()) {
        let p = remaining.remove(pos);
        let pivot = a[(p, p)].clone();
        let pv = pivot.to_f64();
        min_value = min_value.min(pv);
        max_value = max_value.max(pv);
        if pivot < T::zero() {
            return Err(not_psd(pv, 0.0));
        }
        for &j in &remaining {
            let f = a[(j, p)].clone() / pivot.clone();
            if f.is_zero() {
                continue;
            }
            let vp = basis[p].clone();
            axpy(&mut basis[j], &(-f.clone()), &vp);
            for &k in &remaining {
                let update = f.clone() * a[(p, k)].clone();
                a[(j, k)] = a[(j, k)].clone() - update;
            }
        }
        for &j in &remaining {
            a[(j, p)] = T::zero();
            a[(p, j)] = T::zero();
        }
        let vector = basis[p].clone();
        let dual: Vec<T> = g
            .mul_vec(&vector)
            .into_iter()
            .map(|x| x / pivot.clone())
            .collect();
        positive.push(PositiveDirection {
            vector,
            norm_sq: pivot,
            dual,
        });
    }
    for &r in &remaining {
        for &c in &remaining {
            if !a[(r, c)].is_zero() {
                return Err(not_psd(-a[(r, c)].to_f64().abs(), 0.0));
            }
        }
    }
    if !remaining.is_empty() {
        min_value = min_value.min(0.0);
    }
    let null = remaining.into_iter().map(|r| basis[r].clone()).collect();
    Ok(PsdSplit {
        size: n,
        positive,
        null,
        threshold: 0.0,
        min_value: if min_value.is_finite() { min_value } else { 0.0 },
        max_value,
    })
}

/// Reduced row echelon form. Returns the reduced matrix and pivot columns.
/// Float pivots at or below `tol · max(1, max|m|)` count as zero.
pub fn rref<T: Scalar>(m: &Matrix<T>, tol: f64) -> (Matrix<T>, Vec<usize>) {
    let mut a = m.clone();
    let cutoff = tol * m.max_abs().max(1.0);
    let mut pivots = Vec::new();
    let mut row = 0;
    for col in 0..a.cols() {
        if row == a.rows() {
            break;
        }
        let candidate = if T::EXACT {
            (row..a.rows()).find(|&r| !a[(r, col)].is_zero())
        } else {
            (row..a.rows())
                .max_by(|&x, &y| {
                    a[(x, col)]
                        .to_f64()
                        .abs()
                        .partial_cmp(&a[(y, col)].to_f64().abs())
                        .unwrap_or(std::cmp::Ordering::Equal)
                })
                .filter(|&r| a[(r, col)].to_f64().abs() > cutoff)
        };
        let Some(p) = candidate else {
            for r in row..a.rows() {
                a[(r, col)] = T::zero();
            }
            continue;
        };
        if p != row {
            for c in 0..a.cols() {
                let tmp = a[(p, c)].clone();
                a[(p, c)] = a[(row, c)].clone();
                a[(row, c)] = tmp;
            }
        }
        let pivot = a[(row, col)].clone();
        for c in 0..a.cols() {
            a[(row, c)] = a[(row, c)].clone() / pivot.clone();
        }
        for r in 0..a.rows() {
            if r == row {
                continue;
            }
            let f = a[(r, col)].clone();
            if f.is_zero() {
                continue;
            }
            for c in 0..a.cols() {
                let update = f.clone() * a[(row, c)].clone();
                a[(r, c)] = a[(r, c)].clone() - update;
            }
            a[(r, col)] = T::zero();
        }
        pivots.push(col);
        row += 1;
    }
    for r in row..a.rows() {
        for c in 0..a.cols() {
            a[(r, c)] = T::zero();
        }
    }
    (a, pivots)
}

/// Basis of the right null space `{x : m x = 0}`.
pub fn nullspace<T: Scalar>(m: &Matrix<T>, tol: f64) -> Vec<Vec<T>> {
    let (r, pivots) = rref(m, tol);
    let free: Vec<usize> = (0..m.cols()).filter(|c| !pivots.contains(c)).collect();
    free.iter()
        .map(|&f| {
            let mut x = vec![T::zero(); m.cols()];
            x[f] = T::one();
            for (i, &p) in pivots.iter().enumerate() {
                x[p] = -r[(i, f)].clone();
            }
            x
        })
        .collect()
}
