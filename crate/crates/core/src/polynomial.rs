//! Sparse multivariate polynomials graded by total degree.
//!
//! Monomials are ordered graded-lexicographically: lower total degree first,
//! and within one degree `x_1` outranks `x_2`, and so on. For `d = 2` and
//! degree 2 the order is `x², xy, y²`. Every basis-indexed matrix in the
//! crate uses this order.

use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt;

use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// Exponent vector `(n_1, …, n_d)`.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct MultiIndex(Vec<u32>);

impl MultiIndex {
    pub fn new(entries: Vec<u32>) -> Self {
        assert!(!entries.is_empty(), "multi-index needs dimension >= 1");
        Self(entries)
    }

    pub fn zero(dim: usize) -> Self {
        Self::new(vec![0; dim])
    }

    /// The exponent vector of `x_i`.
    pub fn unit(dim: usize, i: usize) -> Self {
        let mut e = vec![0; dim];
        e[i] = 1;
        Self::new(e)
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn degree(&self) -> usize {
        self.0.iter().map(|&e| e as usize).sum()
    }

    pub fn entries(&self) -> &[u32] {
        &self.0
    }

    pub fn plus(&self, other: &MultiIndex) -> MultiIndex {
        debug_assert_eq!(self.dim(), other.dim());
        MultiIndex(self.0.iter().zip(&other.0).map(|(a, b)| a + b).collect())
    }

    /// `α + e_i`
    pub fn raise(&self, i: usize) -> MultiIndex {
        let mut e = self.0.clone();
        e[i] += 1;
        MultiIndex(e)
    }

    /// `α − e_i`, if that stays non-negative.
    pub fn lower(&self, i: usize) -> Option<MultiIndex> {
        (self.0[i] > 0).then(|| {
            let mut e = self.0.clone();
            e[i] -= 1;
            MultiIndex(e)
        })
    }

    /// Restriction to the listed coordinates.
    pub fn select(&self, coords: &[usize]) -> MultiIndex {
        MultiIndex(coords.iter().map(|&c| self.0[c]).collect())
    }

    /// Canonical symmetric-tensor squared norm `α! / |α|!`.
    pub fn weight<T: Scalar>(&self) -> T {
        // multinomial coefficient |α|! / α! built incrementally to stay small
        let mut multinomial = T::one();
        let mut running = 0i64;
        for &e in &self.0 {
            for k in 1..=e as i64 {
                running += 1;
                multinomial = multinomial * T::from_i64(running) / T::from_i64(k);
            }
        }
        T::one() / multinomial
    }
}

impl fmt::Debug for MultiIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?}", self.0)
    }
}

impl Ord for MultiIndex {
    fn cmp(&self, other: &Self) -> Ordering {
        self.degree()
            .cmp(&other.degree())
            .then_with(|| other.0.cmp(&self.0))
    }
}

impl PartialOrd for MultiIndex {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// All multi-indices of dimension `dim` and total degree `n`, graded-lex order.
pub fn monomials(dim: usize, n: usize) -> Vec<MultiIndex> {
    fn fill(prefix: &mut Vec<u32>, dim: usize, left: u32, out: &mut Vec<MultiIndex>) {
        if prefix.len() + 1 == dim {
            prefix.push(left);
            out.push(MultiIndex(prefix.clone()));
            prefix.pop();
            return;
        }
        for e in (0..=left).rev() {
            prefix.push(e);
            fill(prefix, dim, left - e, out);
            prefix.pop();
        }
    }
    assert!(dim >= 1);
    let mut out = Vec::new();
    fill(&mut Vec::with_capacity(dim), dim, n as u32, &mut out);
    out
}

/// All multi-indices of total degree at most `n`, graded-lex order.
pub fn monomials_up_to(dim: usize, n: usize) -> Vec<MultiIndex> {
    (0..=n).flat_map(|k| monomials(dim, k)).collect()
}

/// `d_n = C(n + d − 1, d − 1)`, the number of degree-`n` monomials.
pub fn count_monomials(dim: usize, n: usize) -> usize {
    let mut c: u128 = 1;
    for k in 1..dim as u128 {
        c = c * (n as u128 + k) / k;
    }
    c as usize
}

/// Sparse polynomial with real coefficients.
#[derive(Clone, PartialEq)]
pub struct Polynomial<T> {
    dim: usize,
    terms: BTreeMap<MultiIndex, T>,
}

impl<T: Scalar> fmt::Debug for Polynomial<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let parts: Vec<String> = self
            .terms
            .iter()
            .rev()
            .map(|(k, v)| format!("{v:?}*x^{k:?}"))
            .collect();
        write!(f, "{}", parts.join(" + "))
    }
}

impl<T: Scalar> Polynomial<T> {
    pub fn zero(dim: usize) -> Self {
        Self {
            dim,
            terms: BTreeMap::new(),
        }
    }

    pub fn constant(dim: usize, c: T) -> Self {
        Self::monomial(MultiIndex::zero(dim), c)
    }

    pub fn monomial(index: MultiIndex, c: T) -> Self {
        let mut p = Self::zero(index.dim());
        p.terms.insert(index, c);
        p.normalize();
        p
    }

    /// The coordinate function `x_i`.
    pub fn variable(dim: usize, i: usize) -> Self {
        Self::monomial(MultiIndex::unit(dim, i), T::one())
    }

    pub fn from_terms(dim: usize, terms: impl IntoIterator<Item = (MultiIndex, T)>) -> Result<Self> {
        let mut p = Self::zero(dim);
        for (k, v) in terms {
            if k.dim() != dim {
                return Err(Error::DimensionMismatch {
                    expected: dim,
                    found: k.dim(),
                });
            }
            let entry = p.terms.entry(k).or_insert_with(T::zero);
            *entry = entry.clone() + v;
        }
        p.normalize();
        Ok(p)
    }

    /// Builds `Σ coeffs[k] x^{basis[k]}`.
    pub fn from_dense(dim: usize, basis: &[MultiIndex], coeffs: &[T]) -> Self {
        debug_assert_eq!(basis.len(), coeffs.len());
        let mut p = Self::zero(dim);
        for (k, v) in basis.iter().zip(coeffs) {
            if !v.is_zero() {
                p.terms.insert(k.clone(), v.clone());
            }
        }
        p.normalize();
        p
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&MultiIndex, &T)> {
        self.terms.iter()
    }

    pub fn coefficient(&self, index: &MultiIndex) -> T {
        self.terms.get(index).cloned().unwrap_or_else(T::zero)
    }

    /// Total degree; `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.terms.keys().next_back().map(MultiIndex::degree)
    }

    /// Graded-lex leading term.
    pub fn leading_term(&self) -> Option<(&MultiIndex, &T)> {
        let top = self.degree()?;
        self.terms.iter().find(|(k, _)| k.degree() == top)
    }

    /// Drops zero coefficients; floats also drop entries below
    /// `1e-14 · max|coeff|`.
    fn normalize(&mut self) {
        if T::EXACT {
            self.terms.retain(|_, v| !v.is_zero());
        } else {
            let scale = self
                .terms
                .values()
                .map(|v| v.to_f64().abs())
                .fold(0.0, f64::max);
            let cutoff = 1e-14 * if scale > 0.0 { scale } else { 1.0 };
            self.terms.retain(|_, v| v.to_f64().abs() >= cutoff && !v.is_zero());
        }
    }

    fn check_dim(&self, other: &Self) -> Result<()> {
        if self.dim != other.dim {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                found: other.dim,
            });
        }
        Ok(())
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.check_dim(other)?;
        let mut out = self.clone();
        for (k, v) in &other.terms {
            let entry = out.terms.entry(k.clone()).or_insert_with(T::zero);
            *entry = entry.clone() + v.clone();
        }
        out.normalize();
        Ok(out)
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.add(&other.scale(&-T::one()))
    }

    pub fn scale(&self, c: &T) -> Self {
        let mut out = Self {
            dim: self.dim,
            terms: self
                .terms
                .iter()
                .map(|(k, v)| (k.clone(), v.clone() * c.clone()))
                .collect(),
        };
        out.normalize();
        out
    }

    pub fn mul(&self, other: &Self) -> Result<Self> {
        self.check_dim(other)?;
        let mut terms: BTreeMap<MultiIndex, T> = BTreeMap::new();
        for (a, u) in &self.terms {
            for (b, v) in &other.terms {
                let entry = terms.entry(a.plus(b)).or_insert_with(T::zero);
                *entry = entry.clone() + u.clone() * v.clone();
            }
        }
        let mut out = Self {
            dim: self.dim,
            terms,
        };
        out.normalize();
        Ok(out)
    }

    /// Multiplies by the monomial `x^β`.
    pub fn shift(&self, beta: &MultiIndex) -> Result<Self> {
        if beta.dim() != self.dim {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                found: beta.dim(),
            });
        }
        Ok(Self {
            dim: self.dim,
            terms: self
                .terms
                .iter()
                .map(|(k, v)| (k.plus(beta), v.clone()))
                .collect(),
        })
    }

    pub fn eval(&self, point: &[T]) -> Result<T> {
        if point.len() != self.dim {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                found: point.len(),
            });
        }
        Ok(self.terms.iter().fold(T::zero(), |acc, (k, v)| {
            acc + v.clone() * monomial_value(k, point)
        }))
    }

    /// Coefficients of the degree-`n` monomials, graded-lex order, zero padded.
    pub fn top_homogeneous(&self, n: usize) -> Result<Vec<T>> {
        if let Some(deg) = self.degree() {
            if deg > n {
                return Err(Error::DegreeTooHigh { degree: deg, limit: n });
            }
        }
        Ok(monomials(self.dim, n)
            .iter()
            .map(|k| self.coefficient(k))
            .collect())
    }

    /// Dense coefficient vector over `basis`; fails if a term is missing from it.
    pub fn to_dense(&self, basis: &[MultiIndex]) -> Result<Vec<T>> {
        let mut out = vec![T::zero(); basis.len()];
        for (k, v) in &self.terms {
            let pos = basis.iter().position(|b| b == k).ok_or(Error::DegreeTooHigh {
                degree: k.degree(),
                limit: basis.last().map_or(0, MultiIndex::degree),
            })?;
            out[pos] = v.clone();
        }
        Ok(out)
    }

    pub fn map<U: Scalar>(&self, f: impl Fn(&T) -> U) -> Polynomial<U> {
        let mut out = Polynomial {
            dim: self.dim,
            terms: self.terms.iter().map(|(k, v)| (k.clone(), f(v))).collect(),
        };
        out.normalize();
        out
    }
}

pub fn monomial_value<T: Scalar>(index: &MultiIndex, point: &[T]) -> T {
    let mut acc = T::one();
    for (x, &e) in point.iter().zip(index.entries()) {
        for _ in 0..e {
            acc = acc * x.clone();
        }
    }
    acc
}
