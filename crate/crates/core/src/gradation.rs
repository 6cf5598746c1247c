//! Graded orthogonal decomposition `𝒫_{N]} = 𝒫_0 ⊕ … ⊕ 𝒫_N` of a moment functional.
//!
//! Every polynomial of degree at most `N` is stored as a dense coefficient
//! vector over [`monomials_up_to`]. The degree-`n` level keeps its candidates
//! `c_α = x^α − P_{n−1]} x^α` as columns of a matrix, and degree-`n` coefficient
//! vectors `ξ` stand for `Σ_α ξ_α c_α`. Null directions of the Gram matrix are
//! kept explicitly instead of being discarded.

use std::collections::HashMap;

use crate::error::{Error, Result};
use crate::linalg::{Matrix, PsdSplit};
use crate::measures::{MomentCache, MomentFunctional};
use crate::polynomial::{count_monomials, monomials, monomials_up_to, MultiIndex, Polynomial};
use crate::scalar::Scalar;
use crate::Tolerances;

/// One degree of the gradation.
#[derive(Debug, Clone)]
pub struct DegreeBasis<T> {
    pub degree: usize,
    /// Degree-`n` monomials in graded-lex order; they index the candidates.
    pub monomials: Vec<MultiIndex>,
    /// `w(α) = α!/|α|!`
    pub weights: Vec<T>,
    /// Column `k` holds the coefficients of `c_α` over the full monomial basis.
    pub candidates: Matrix<T>,
    /// `G_n = (⟨c_α, c_β⟩)`
    pub gram: Matrix<T>,
    pub split: PsdSplit<T>,
    /// `G_n⁺ C_nᵀ H`: maps a dense polynomial to the coordinates of its `P_n` part.
    projector: Matrix<T>,
}

impl<T: Scalar> DegreeBasis<T> {
    /// `d_n`
    pub fn size(&self) -> usize {
        self.monomials.len()
    }

    pub fn rank(&self) -> usize {
        self.split.rank()
    }

    pub fn nullity(&self) -> usize {
        self.split.nullity()
    }

    /// `Ω_n = D_n⁻¹ G_n`
    pub fn omega(&self) -> Matrix<T> {
        let mut out = self.gram.clone();
        for r in 0..out.rows() {
            for c in 0..out.cols() {
                out[(r, c)] = out[(r, c)].clone() / self.weights[r].clone();
            }
        }
        out
    }
}

/// Which part of a polynomial [`GradationBasis::project`] keeps.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Projection {
    /// `P_n`
    Level,
    /// `P_{n]} = P_0 + … + P_n`
    UpTo,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DimensionRow {
    pub degree: usize,
    pub dimension: usize,
    pub rank: usize,
    pub nullity: usize,
}

#[derive(Debug, Clone)]
pub struct GradationBasis<T> {
    dim: usize,
    max_degree: usize,
    basis: Vec<MultiIndex>,
    positions: HashMap<MultiIndex, usize>,
    /// `H[a][b] = Λ(x^{a+b})` over the full basis.
    hankel: Matrix<T>,
    levels: Vec<DegreeBasis<T>>,
    tolerances: Tolerances,
}

/// [`build_gradations_with`] using default tolerances.
pub fn build_gradations<T: Scalar>(
    functional: &dyn MomentFunctional<T>,
    max_degree: usize,
) -> Result<GradationBasis<T>> {
    build_gradations_with(functional, max_degree, &Tolerances::default())
}

/// Builds degrees `0..=max_degree`. Needs moments up to degree `2·max_degree`.
pub fn build_gradations_with<T: Scalar>(
    functional: &dyn MomentFunctional<T>,
    max_degree: usize,
    tol: &Tolerances,
) -> Result<GradationBasis<T>> {
    let dim = functional.dimension();
    if functional.max_degree() < 2 * max_degree {
        return Err(Error::DepthExceeded {
            requested: 2 * max_degree,
            available: functional.max_degree(),
        });
    }
    let basis = monomials_up_to(dim, max_degree);
    let positions: HashMap<_, _> = basis.iter().cloned().enumerate().map(|(i, m)| (m, i)).collect();
    let size = basis.len();

    let mut cache = MomentCache::new(functional);
    let mut hankel = Matrix::<T>::zeros(size, size);
    for a in 0..size {
        for b in a..size {
            let m = cache.get(&basis[a].plus(&basis[b]))?;
            hankel[(a, b)] = m.clone();
            hankel[(b, a)] = m;
        }
    }

    let mut levels: Vec<DegreeBasis<T>> = Vec::with_capacity(max_degree + 1);
    let mut offset = 0;
    for n in 0..=max_degree {
        let mons = monomials(dim, n);
        let dn = mons.len();
        let mut cand = Matrix::<T>::zeros(size, dn);
        for k in 0..dn {
            cand[(offset + k, k)] = T::one();
        }
        let sweeps = if T::EXACT { 1 } else { 2 };
        for _ in 0..sweeps {
            for lower in &levels {
                let coords = lower.projector.mul(&cand);
                cand = cand.sub(&lower.candidates.mul(&coords));
            }
        }
        let ct = cand.transpose();
        let cth = ct.mul(&hankel);
        let gram = symmetrize(&cth.mul(&cand));
        let split = T::psd_split(&gram, &tol.rank_tolerance()).map_err(|e| match e {
            Error::NotPositiveSemidefinite {
                eigenvalue,
                tolerance,
                ..
            } => Error::NotPositiveSemidefinite {
                degree: n,
                eigenvalue,
                tolerance,
            },
            other => other,
        })?;
        let projector = split.pseudo_inverse().mul(&cth);
        let weights = mons.iter().map(MultiIndex::weight::<T>).collect();
        levels.push(DegreeBasis {
            degree: n,
            monomials: mons,
            weights,
            candidates: cand,
            gram,
            split,
            projector,
        });
        offset += dn;
    }

    Ok(GradationBasis {
        dim,
        max_degree,
        basis,
        positions,
        hankel,
        levels,
        tolerances: *tol,
    })
}

fn symmetrize<T: Scalar>(m: &Matrix<T>) -> Matrix<T> {
    if T::EXACT {
        return m.clone();
    }
    let half = T::from_ratio(1, 2);
    m.add(&m.transpose()).scale(&half)
}

impl<T: Scalar> GradationBasis<T> {
    pub fn dimension(&self) -> usize {
        self.dim
    }

    pub fn max_degree(&self) -> usize {
        self.max_degree
    }

    pub fn tolerances(&self) -> &Tolerances {
        &self.tolerances
    }

    /// All monomials of degree at most `N`; indexes dense polynomial vectors.
    pub fn monomial_basis(&self) -> &[MultiIndex] {
        &self.basis
    }

    pub fn position(&self, index: &MultiIndex) -> Option<usize> {
        self.positions.get(index).copied()
    }

    pub fn hankel(&self) -> &Matrix<T> {
        &self.hankel
    }

    pub fn level(&self, n: usize) -> &DegreeBasis<T> {
        &self.levels[n]
    }

    pub fn levels(&self) -> &[DegreeBasis<T>] {
        &self.levels
    }

    /// Dense coefficient vector of `f` over [`monomial_basis`](Self::monomial_basis).
    pub fn dense(&self, f: &Polynomial<T>) -> Result<Vec<T>> {
        if f.dim() != self.dim {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                found: f.dim(),
            });
        }
        if let Some(deg) = f.degree() {
            if deg > self.max_degree {
                return Err(Error::DegreeTooHigh {
                    degree: deg,
                    limit: self.max_degree,
                });
            }
        }
        f.to_dense(&self.basis)
    }

    pub fn polynomial(&self, dense: &[T]) -> Polynomial<T> {
        Polynomial::from_dense(self.dim, &self.basis, dense)
    }

    /// Polynomial `Σ_α ξ_α c_α` for degree-`n` coordinates `ξ`.
    pub fn level_polynomial(&self, n: usize, coords: &[T]) -> Polynomial<T> {
        self.polynomial(&self.levels[n].candidates.mul_vec(coords))
    }

    pub fn candidate_polynomials(&self, n: usize) -> Vec<Polynomial<T>> {
        let level = &self.levels[n];
        (0..level.size())
            .map(|k| self.polynomial(&level.candidates.column(k)))
            .collect()
    }

    /// Orthogonal basis of `𝒫_n`: the positive directions of `G_n`.
    pub fn ortho_basis(&self, n: usize) -> Vec<Polynomial<T>> {
        self.levels[n]
            .split
            .positive
            .iter()
            .map(|p| self.level_polynomial(n, &p.vector))
            .collect()
    }

    /// Zero-seminorm polynomials of degree `n`: the kernel of `G_n`.
    pub fn null_basis(&self, n: usize) -> Vec<Polynomial<T>> {
        self.levels[n]
            .split
            .null
            .iter()
            .map(|v| self.level_polynomial(n, v))
            .collect()
    }

    /// `Λ(f g)` for polynomials of degree at most `N`.
    pub fn inner(&self, f: &Polynomial<T>, g: &Polynomial<T>) -> Result<T> {
        let a = self.dense(f)?;
        let b = self.dense(g)?;
        Ok(crate::linalg::dot(&a, &self.hankel.mul_vec(&b)))
    }

    /// Degree-`n` coordinates of `P_n f`.
    pub fn level_coordinates(&self, f: &Polynomial<T>, n: usize) -> Result<Vec<T>> {
        let v = self.dense(f)?;
        Ok(self.levels[n].projector.mul_vec(&v))
    }

    pub fn project(&self, f: &Polynomial<T>, n: usize, target: Projection) -> Result<Polynomial<T>> {
        if n > self.max_degree {
            return Err(Error::DegreeTooHigh {
                degree: n,
                limit: self.max_degree,
            });
        }
        let v = self.dense(f)?;
        let range = match target {
            Projection::Level => n..=n,
            Projection::UpTo => 0..=n,
        };
        let mut out = vec![T::zero(); self.basis.len()];
        for k in range {
            let level = &self.levels[k];
            let part = level.candidates.mul_vec(&level.projector.mul_vec(&v));
            for (o, p) in out.iter_mut().zip(part) {
                *o = o.clone() + p;
            }
        }
        Ok(self.polynomial(&out))
    }

    pub fn dimension_table(&self) -> Vec<DimensionRow> {
        self.levels
            .iter()
            .map(|l| DimensionRow {
                degree: l.degree,
                dimension: count_monomials(self.dim, l.degree),
                rank: l.rank(),
                nullity: l.nullity(),
            })
            .collect()
    }
}
