//! Marginal functionals and one-dimensional Jacobi extraction.

use std::sync::Arc;

use crate::error::{Error, Result};
use crate::gradation::build_gradations_with;
use crate::linalg::Matrix;
use crate::measures::{Functional, JacobiPair1D, MomentFunctional};
use crate::polynomial::MultiIndex;
use crate::scalar::Scalar;
use crate::Tolerances;

/// Marginal of `source` on the coordinates `coords` (0-based, strictly increasing).
#[derive(Debug, Clone)]
pub struct MarginalSpec<T: Scalar> {
    pub source: Functional<T>,
    pub coords: Vec<usize>,
}

impl<T: Scalar> MarginalSpec<T> {
    pub fn new(source: Functional<T>, coords: Vec<usize>) -> Result<Self> {
        if coords.is_empty() {
            return Err(Error::Malformed("marginal needs at least one coordinate".into()));
        }
        if coords.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::Malformed("marginal coordinates must be strictly increasing".into()));
        }
        if let Some(&bad) = coords.iter().find(|&&c| c >= source.dimension()) {
            return Err(Error::Malformed(format!(
                "coordinate {} outside 1..={}",
                bad + 1,
                source.dimension()
            )));
        }
        Ok(Self { source, coords })
    }
}

#[derive(Debug, Clone)]
struct MarginalFunctional<T: Scalar> {
    spec: MarginalSpec<T>,
}

impl<T: Scalar> MarginalFunctional<T> {
    fn lift(&self, index: &MultiIndex) -> MultiIndex {
        let mut full = vec![0; self.spec.source.dimension()];
        for (&c, &e) in self.spec.coords.iter().zip(index.entries()) {
            full[c] = e;
        }
        MultiIndex::new(full)
    }
}

impl<T: Scalar> MomentFunctional<T> for MarginalFunctional<T> {
    fn dimension(&self) -> usize {
        self.spec.coords.len()
    }

    fn max_degree(&self) -> usize {
        self.spec.source.max_degree()
    }

    fn backend(&self) -> &'static str {
        "marginal"
    }

    fn raw_moment(&self, index: &MultiIndex) -> T {
        self.spec.source.raw_moment(&self.lift(index))
    }

    fn moment(&self, index: &MultiIndex) -> Result<T> {
        if index.dim() != self.dimension() {
            return Err(Error::DimensionMismatch {
                expected: self.dimension(),
                found: index.dim(),
            });
        }
        self.spec.source.moment(&self.lift(index))
    }
}

pub fn marginal_functional<T: Scalar>(spec: &MarginalSpec<T>) -> Functional<T> {
    if spec.coords.len() == spec.source.dimension() {
        return spec.source.clone();
    }
    Arc::new(MarginalFunctional { spec: spec.clone() })
}

/// Monic Stieltjes recursion on the moments of a one-dimensional functional.
/// Returns `ω_1..ω_depth` and `α_1..α_depth`; after `⟨p_n, p_n⟩` vanishes all
/// later entries are zero. Needs moments up to degree `2·depth`.
pub fn jacobi_1d<T: Scalar>(
    functional: &dyn MomentFunctional<T>,
    depth: usize,
    tol: &Tolerances,
) -> Result<JacobiPair1D<T>> {
    if functional.dimension() != 1 {
        return Err(Error::DimensionMismatch {
            expected: 1,
            found: functional.dimension(),
        });
    }
    let moments = (0..=2 * depth)
        .map(|k| functional.moment(&MultiIndex::new(vec![k as u32])))
        .collect::<Result<Vec<T>>>()?;
    // ⟨f, g⟩ = Σ f_i g_j m_{i+j}
    let inner = |f: &[T], g: &[T], shift: usize| {
        let mut acc = T::zero();
        for (i, a) in f.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in g.iter().enumerate() {
                acc = acc + a.clone() * b.clone() * moments[i + j + shift].clone();
            }
        }
        acc
    };
    let mut omega = vec![T::zero(); depth];
    let mut alpha = vec![T::zero(); depth];
    let mut prev: Vec<T> = Vec::new();
    let mut cur = vec![T::one()];
    let mut norm = T::one();
    for n in 0..depth {
        // α_{n+1} = ⟨x p_n, p_n⟩ / ⟨p_n, p_n⟩
        let a = inner(&cur, &cur, 1) / norm.clone();
        alpha[n] = a.clone();
        let mut next = vec![T::zero(); cur.len() + 1];
        for (k, c) in cur.iter().enumerate() {
            next[k + 1] = next[k + 1].clone() + c.clone();
            next[k] = next[k].clone() - a.clone() * c.clone();
        }
        if n >= 1 {
            let w = omega[n - 1].clone();
            for (k, c) in prev.iter().enumerate() {
                next[k] = next[k].clone() - w.clone() * c.clone();
            }
        }
        let next_norm = inner(&next, &next, 0);
        let v = next_norm.to_f64();
        if v < -tol.psd.max(tol.null) {
            return Err(Error::NotPositiveSemidefinite {
                degree: n + 1,
                eigenvalue: v,
                tolerance: tol.psd,
            });
        }
        let vanished = if T::EXACT { next_norm.is_zero() } else { v <= tol.null };
        if vanished {
            break;
        }
        omega[n] = next_norm.clone() / norm;
        norm = next_norm;
        prev = std::mem::replace(&mut cur, next);
    }
    JacobiPair1D::new(omega, alpha)
}

/// `Ω_n` of the marginal, built through its own gradation.
pub fn marginal_omega<T: Scalar>(spec: &MarginalSpec<T>, n: usize, tol: &Tolerances) -> Result<Matrix<T>> {
    let f = marginal_functional(spec);
    let g = build_gradations_with(f.as_ref(), n, tol)?;
    Ok(g.level(n).omega())
}
