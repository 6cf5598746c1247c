//! Moment functionals `Λ(x^α)` with several backends.

use std::collections::HashMap;
use std::f64::consts::PI;
use std::fmt::Debug;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::polynomial::{monomial_value, monomials_up_to, MultiIndex};
use crate::scalar::{is_negligible, Scalar};

/// Depth used when a backend has no natural limit and the caller gives none.
pub const DEFAULT_MAX_DEGREE: usize = 12;

/// Marker for backends whose moments exist at every degree.
pub const UNLIMITED: usize = usize::MAX;

/// Supplier of mixed moments of a probability measure on `ℝ^d`.
pub trait MomentFunctional<T: Scalar>: Debug + Send + Sync {
    fn dimension(&self) -> usize;

    /// Highest total degree whose moments are available; [`UNLIMITED`] if any.
    fn max_degree(&self) -> usize;

    /// Short backend tag for reports.
    fn backend(&self) -> &'static str;

    /// Moment without the depth check. Callers go through [`moment`](Self::moment).
    fn raw_moment(&self, index: &MultiIndex) -> T;

    fn moment(&self, index: &MultiIndex) -> Result<T> {
        if index.dim() != self.dimension() {
            return Err(Error::DimensionMismatch {
                expected: self.dimension(),
                found: index.dim(),
            });
        }
        if index.degree() > self.max_degree() {
            return Err(Error::DepthExceeded {
                requested: index.degree(),
                available: self.max_degree(),
            });
        }
        Ok(self.raw_moment(index))
    }
}

pub type Functional<T> = Arc<dyn MomentFunctional<T>>;

/// Memoizing wrapper used while assembling Gram matrices.
pub struct MomentCache<'a, T: Scalar> {
    functional: &'a dyn MomentFunctional<T>,
    cache: HashMap<MultiIndex, T>,
}

impl<'a, T: Scalar> MomentCache<'a, T> {
    pub fn new(functional: &'a dyn MomentFunctional<T>) -> Self {
        Self {
            functional,
            cache: HashMap::new(),
        }
    }

    pub fn get(&mut self, index: &MultiIndex) -> Result<T> {
        if let Some(v) = self.cache.get(index) {
            return Ok(v.clone());
        }
        let v = self.functional.moment(index)?;
        self.cache.insert(index.clone(), v.clone());
        Ok(v)
    }
}

/// Finite list of atoms with positive weights summing to one.
#[derive(Debug, Clone, PartialEq)]
pub struct DiscreteMeasure<T> {
    atoms: Vec<Vec<T>>,
    weights: Vec<T>,
}

impl<T: Scalar> DiscreteMeasure<T> {
    pub fn new(atoms: Vec<Vec<T>>, weights: Vec<T>) -> Result<Self> {
        if atoms.is_empty() {
            return Err(Error::InvalidMeasure("no atoms".into()));
        }
        if atoms.len() != weights.len() {
            return Err(Error::InvalidMeasure(format!(
                "{} atoms but {} weights",
                atoms.len(),
                weights.len()
            )));
        }
        let dim = atoms[0].len();
        if dim == 0 {
            return Err(Error::InvalidMeasure("atoms must have dimension >= 1".into()));
        }
        if let Some(bad) = atoms.iter().find(|a| a.len() != dim) {
            return Err(Error::DimensionMismatch {
                expected: dim,
                found: bad.len(),
            });
        }
        if weights.iter().any(|w| *w <= T::zero()) {
            return Err(Error::InvalidMeasure("weights must be positive".into()));
        }
        let total = weights.iter().fold(T::zero(), |acc, w| acc + w.clone());
        if !is_negligible(&(total.clone() - T::one()), 1e-12) {
            return Err(Error::InvalidMeasure(format!(
                "weights sum to {} instead of 1",
                total.to_f64()
            )));
        }
        for i in 0..atoms.len() {
            for j in i + 1..atoms.len() {
                let same = atoms[i]
                    .iter()
                    .zip(&atoms[j])
                    .all(|(a, b)| is_negligible(&(a.clone() - b.clone()), 0.0));
                if same {
                    return Err(Error::InvalidMeasure(format!("atoms {i} and {j} coincide")));
                }
            }
        }
        Ok(Self { atoms, weights })
    }

    /// Unit point mass.
    pub fn dirac(point: Vec<T>) -> Result<Self> {
        Self::new(vec![point], vec![T::one()])
    }

    pub fn dimension(&self) -> usize {
        self.atoms[0].len()
    }

    pub fn atoms(&self) -> &[Vec<T>] {
        &self.atoms
    }

    pub fn weights(&self) -> &[T] {
        &self.weights
    }

    pub fn len(&self) -> usize {
        self.atoms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.atoms.is_empty()
    }
}

#[derive(Debug, Clone)]
pub struct DiscreteFunctional<T> {
    measure: DiscreteMeasure<T>,
}

impl<T: Scalar> MomentFunctional<T> for DiscreteFunctional<T> {
    fn dimension(&self) -> usize {
        self.measure.dimension()
    }

    fn max_degree(&self) -> usize {
        UNLIMITED
    }

    fn backend(&self) -> &'static str {
        "discrete"
    }

    fn raw_moment(&self, index: &MultiIndex) -> T {
        self.measure
            .atoms
            .iter()
            .zip(&self.measure.weights)
            .fold(T::zero(), |acc, (a, w)| {
                acc + w.clone() * monomial_value(index, a)
            })
    }
}

/// `Λ(x^α) = Σ_i w_i a_i^α`.
pub fn discrete_functional<T: Scalar>(measure: DiscreteMeasure<T>) -> Functional<T> {
    Arc::new(DiscreteFunctional { measure })
}

/// Product of independent factors; coordinates are concatenated in order.
#[derive(Debug, Clone)]
pub struct ProductFunctional<T: Scalar> {
    factors: Vec<Functional<T>>,
    offsets: Vec<usize>,
    dim: usize,
}

impl<T: Scalar> MomentFunctional<T> for ProductFunctional<T> {
    fn dimension(&self) -> usize {
        self.dim
    }

    fn max_degree(&self) -> usize {
        self.factors.iter().map(|f| f.max_degree()).min().unwrap_or(UNLIMITED)
    }

    fn backend(&self) -> &'static str {
        "product"
    }

    fn raw_moment(&self, index: &MultiIndex) -> T {
        self.factors
            .iter()
            .zip(&self.offsets)
            .fold(T::one(), |acc, (f, &off)| {
                let sub = MultiIndex::new(index.entries()[off..off + f.dimension()].to_vec());
                acc * f.raw_moment(&sub)
            })
    }

    fn moment(&self, index: &MultiIndex) -> Result<T> {
        if index.dim() != self.dim {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                found: index.dim(),
            });
        }
        // each factor only needs its own sub-degree
        self.factors
            .iter()
            .zip(&self.offsets)
            .try_fold(T::one(), |acc, (f, &off)| {
                let sub = MultiIndex::new(index.entries()[off..off + f.dimension()].to_vec());
                Ok(acc * f.moment(&sub)?)
            })
    }
}

/// Product measure `μ_1 ⊗ … ⊗ μ_k`. Factors may have any dimension; the
/// result has the summed dimension.
pub fn product_functional<T: Scalar>(factors: Vec<Functional<T>>) -> Result<Functional<T>> {
    if factors.is_empty() {
        return Err(Error::InvalidMeasure("product needs at least one factor".into()));
    }
    let mut offsets = Vec::with_capacity(factors.len());
    let mut dim = 0;
    for f in &factors {
        offsets.push(dim);
        dim += f.dimension();
    }
    Ok(Arc::new(ProductFunctional {
        factors,
        offsets,
        dim,
    }))
}

/// Uniform measure on the unit circle, or on its upper half.
///
/// Moments come from equispaced trapezoid sums with `4·max_degree + 8` nodes,
/// which integrate trigonometric polynomials of the needed degree exactly.
/// The half circle integrates the exact Fourier coefficients over `[0, π]`.
#[derive(Debug, Clone)]
pub struct CircleFunctional {
    half: bool,
    max_degree: usize,
    cos: Vec<f64>,
    sin: Vec<f64>,
    /// `table[a][b] = Λ(x^a y^b)` for `a + b ≤ max_degree`
    table: Vec<Vec<f64>>,
}

impl CircleFunctional {
    pub fn new(half: bool, max_degree: usize) -> Self {
        let nodes = 4 * max_degree + 8;
        let (cos, sin) = (0..nodes)
            .map(|j| {
                let t = 2.0 * PI * j as f64 / nodes as f64;
                (t.cos(), t.sin())
            })
            .unzip();
        let mut c = Self {
            half,
            max_degree,
            cos,
            sin,
            table: Vec::new(),
        };
        c.table = (0..=max_degree as u32)
            .map(|a| (0..=max_degree as u32 - a).map(|b| c.quadrature(a, b)).collect())
            .collect();
        c
    }

    pub fn is_half(&self) -> bool {
        self.half
    }

    fn samples(&self, a: u32, b: u32) -> impl Iterator<Item = f64> + '_ {
        self.cos
            .iter()
            .zip(&self.sin)
            .map(move |(c, s)| c.powi(a as i32) * s.powi(b as i32))
    }

    /// `Λ(x^a y^b)` in double precision.
    pub fn moment_f64(&self, a: u32, b: u32) -> f64 {
        match self.table.get(a as usize).and_then(|row| row.get(b as usize)) {
            Some(v) => *v,
            None => self.quadrature(a, b),
        }
    }

    fn quadrature(&self, a: u32, b: u32) -> f64 {
        let n = self.cos.len() as f64;
        let mean = exact_sum(self.samples(a, b)) / n;
        if !self.half {
            return mean;
        }
        // ∫_0^π e^{ikθ} dθ vanishes for even k ≠ 0; odd k contribute 4/k · (1/N) Σ f_j sin(kθ_j)
        let degree = (a + b) as usize;
        let nodes = self.cos.len();
        let mut integral = PI * mean;
        for k in (1..=degree).step_by(2) {
            let s = exact_sum(
                self.samples(a, b)
                    .enumerate()
                    .map(|(j, f)| f * (2.0 * PI * (k * j % nodes) as f64 / nodes as f64).sin()),
            );
            integral += 4.0 / k as f64 * s / n;
        }
        integral / PI
    }
}

/// Correctly rounded sum of finite doubles (Shewchuk's non-overlapping partials).
fn exact_sum(values: impl Iterator<Item = f64>) -> f64 {
    let mut partials: Vec<f64> = Vec::new();
    for mut x in values {
        let mut kept = 0;
        for k in 0..partials.len() {
            let mut y = partials[k];
            if x.abs() < y.abs() {
                std::mem::swap(&mut x, &mut y);
            }
            let hi = x + y;
            let lo = y - (hi - x);
            if lo != 0.0 {
                partials[kept] = lo;
                kept += 1;
            }
            x = hi;
        }
        partials.truncate(kept);
        partials.push(x);
    }
    let Some(mut hi) = partials.pop() else {
        return 0.0;
    };
    let mut lo = 0.0;
    while let Some(y) = partials.pop() {
        let x = hi;
        hi = x + y;
        let yr = hi - x;
        lo = y - yr;
        if lo != 0.0 {
            break;
        }
    }
    // half-way case: round using the sign of the next partial
    if let Some(&next) = partials.last() {
        if (lo < 0.0 && next < 0.0) || (lo > 0.0 && next > 0.0) {
            let y = lo * 2.0;
            let x = hi + y;
            if y == x - hi {
                hi = x;
            }
        }
    }
    hi
}

impl<T: Scalar> MomentFunctional<T> for CircleFunctional {
    fn dimension(&self) -> usize {
        2
    }

    fn max_degree(&self) -> usize {
        self.max_degree
    }

    fn backend(&self) -> &'static str {
        if self.half {
            "half_circle"
        } else {
            "circle"
        }
    }

    fn raw_moment(&self, index: &MultiIndex) -> T {
        let e = index.entries();
        T::from_f64(self.moment_f64(e[0], e[1]))
    }
}

/// Circle (or half circle) functional reliable up to `max_degree`.
/// Only float scalar types are supported; the moments are quadrature values.
pub fn circle_functional<T: Scalar>(half: bool, max_degree: usize) -> Result<Functional<T>> {
    if T::EXACT {
        return Err(Error::Unsupported(
            "circle measures are quadrature-backed and need a float scalar mode".into(),
        ));
    }
    Ok(Arc::new(CircleFunctional::new(half, max_degree)))
}

/// Standard normal distribution on `ℝ`, `m_{2k} = (2k−1)!!`.
#[derive(Debug, Clone, Copy, Default)]
pub struct GaussianFunctional;

impl<T: Scalar> MomentFunctional<T> for GaussianFunctional {
    fn dimension(&self) -> usize {
        1
    }

    fn max_degree(&self) -> usize {
        UNLIMITED
    }

    fn backend(&self) -> &'static str {
        "gaussian"
    }

    fn raw_moment(&self, index: &MultiIndex) -> T {
        let k = index.degree() as i64;
        if k % 2 == 1 {
            return T::zero();
        }
        (1..k).step_by(2).fold(T::one(), |acc, j| acc * T::from_i64(j))
    }
}

pub fn gaussian_functional<T: Scalar>() -> Functional<T> {
    Arc::new(GaussianFunctional)
}

/// Explicit lookup table of moments up to a fixed depth.
#[derive(Debug, Clone)]
pub struct TableFunctional<T> {
    dim: usize,
    depth: usize,
    entries: HashMap<MultiIndex, T>,
}

impl<T: Scalar> TableFunctional<T> {
    pub fn new(dim: usize, entries: HashMap<MultiIndex, T>, depth: usize) -> Result<Self> {
        if dim == 0 {
            return Err(Error::InvalidMeasure("dimension must be >= 1".into()));
        }
        if let Some(k) = entries.keys().find(|k| k.dim() != dim) {
            return Err(Error::DimensionMismatch {
                expected: dim,
                found: k.dim(),
            });
        }
        match entries.get(&MultiIndex::zero(dim)) {
            Some(m0) if is_negligible(&(m0.clone() - T::one()), 1e-12) => {}
            Some(m0) => {
                return Err(Error::InvalidMeasure(format!(
                    "table is not normalized: Λ(1) = {}",
                    m0.to_f64()
                )))
            }
            None => return Err(Error::InvalidMeasure("table lacks the zeroth moment".into())),
        }
        if let Some(missing) = monomials_up_to(dim, depth)
            .into_iter()
            .find(|k| !entries.contains_key(k))
        {
            return Err(Error::InvalidMeasure(format!(
                "table lacks moment {missing:?} within depth {depth}"
            )));
        }
        Ok(Self {
            dim,
            depth,
            entries,
        })
    }

    pub fn depth(&self) -> usize {
        self.depth
    }
}

impl<T: Scalar> MomentFunctional<T> for TableFunctional<T> {
    fn dimension(&self) -> usize {
        self.dim
    }

    fn max_degree(&self) -> usize {
        self.depth
    }

    fn backend(&self) -> &'static str {
        "moments_table"
    }

    fn raw_moment(&self, index: &MultiIndex) -> T {
        self.entries.get(index).cloned().unwrap_or_else(T::zero)
    }
}

pub fn table_functional<T: Scalar>(
    dim: usize,
    entries: HashMap<MultiIndex, T>,
    depth: usize,
) -> Result<Functional<T>> {
    Ok(Arc::new(TableFunctional::new(dim, entries, depth)?))
}

/// One-dimensional Jacobi sequences `ω_1, ω_2, …` and `α_1, α_2, …`.
#[derive(Debug, Clone, PartialEq)]
pub struct JacobiPair1D<T> {
    pub omega: Vec<T>,
    pub alpha: Vec<T>,
}

impl<T: Scalar> JacobiPair1D<T> {
    pub fn new(omega: Vec<T>, alpha: Vec<T>) -> Result<Self> {
        if let Some(bad) = omega.iter().position(|w| *w < T::zero()) {
            return Err(Error::InvalidJacobi(format!(
                "ω_{} = {} is negative",
                bad + 1,
                omega[bad].to_f64()
            )));
        }
        Ok(Self { omega, alpha })
    }

    /// Index (1-based) of the first vanishing `ω`, if any.
    pub fn termination(&self) -> Option<usize> {
        self.omega.iter().position(|w| w.is_zero()).map(|p| p + 1)
    }

    /// `ω_n` (1-based); zero after termination.
    fn omega_at(&self, n: usize) -> Result<T> {
        if let Some(t) = self.termination() {
            if n >= t {
                return Ok(T::zero());
            }
        }
        self.omega
            .get(n - 1)
            .cloned()
            .ok_or_else(|| Error::InvalidJacobi(format!("ω_{n} is required but not supplied")))
    }

    /// `α_n` (1-based); zero once the level is unreachable after termination.
    fn alpha_at(&self, n: usize) -> Result<T> {
        if let Some(t) = self.termination() {
            if n > t {
                return Ok(T::zero());
            }
        }
        self.alpha
            .get(n - 1)
            .cloned()
            .ok_or_else(|| Error::InvalidJacobi(format!("α_{n} is required but not supplied")))
    }

    /// Monic orthogonal polynomials `p_0 … p_n` from the three-term
    /// recurrence, as coefficient vectors in ascending powers of `x`.
    pub fn monic_polynomials(&self, n: usize) -> Result<Vec<Vec<T>>> {
        let mut out: Vec<Vec<T>> = vec![vec![T::one()]];
        for k in 0..n {
            // p_{k+1} = (x − α_{k+1}) p_k − ω_k p_{k−1}
            let alpha = self.alpha_at(k + 1)?;
            let pk = &out[k];
            let mut next = vec![T::zero(); k + 2];
            for (j, c) in pk.iter().enumerate() {
                next[j + 1] = next[j + 1].clone() + c.clone();
                next[j] = next[j].clone() - alpha.clone() * c.clone();
            }
            if k >= 1 {
                let omega = self.omega_at(k)?;
                for (j, c) in out[k - 1].iter().enumerate() {
                    next[j] = next[j].clone() - omega.clone() * c.clone();
                }
            }
            out.push(next);
        }
        Ok(out)
    }
}

/// Moments `m_0 … m_depth` as vacuum expectations of the one-mode Fock
/// operator `A⁺ + A⁰ + A⁻` (unnormalized basis: `A⁺Φ_n = Φ_{n+1}`,
/// `A⁰Φ_n = α_{n+1}Φ_n`, `A⁻Φ_n = ω_nΦ_{n−1}`), which is similar to the
/// tridiagonal Jacobi matrix with off-diagonal `√ω` and needs no square roots.
pub fn jacobi_moments<T: Scalar>(j: &JacobiPair1D<T>, depth: usize) -> Result<Vec<T>> {
    let levels = depth / 2 + 1;
    let mut diag = Vec::with_capacity(levels);
    let mut lower = Vec::with_capacity(levels);
    for level in 0..levels {
        // level L is visited on a closed walk of length depth only if 2L ≤ depth,
        // and its diagonal is used only if 2L + 1 ≤ depth
        diag.push(if 2 * level < depth {
            j.alpha_at(level + 1)?
        } else {
            T::zero()
        });
        lower.push(if level >= 1 {
            j.omega_at(level)?
        } else {
            T::zero()
        });
    }
    let mut v = vec![T::zero(); levels];
    v[0] = T::one();
    let mut moments = vec![T::one()];
    for _ in 0..depth {
        let mut next = vec![T::zero(); levels];
        for l in 0..levels {
            if v[l].is_zero() {
                continue;
            }
            next[l] = next[l].clone() + diag[l].clone() * v[l].clone();
            if l + 1 < levels {
                next[l + 1] = next[l + 1].clone() + v[l].clone();
            }
            if l >= 1 {
                next[l - 1] = next[l - 1].clone() + lower[l].clone() * v[l].clone();
            }
        }
        v = next;
        moments.push(v[0].clone());
    }
    Ok(moments)
}

/// One-dimensional functional generated by Jacobi sequences, reliable up to `depth`.
pub fn jacobi_to_moments<T: Scalar>(j: &JacobiPair1D<T>, depth: usize) -> Result<Functional<T>> {
    let moments = jacobi_moments(j, depth)?;
    let entries = moments
        .into_iter()
        .enumerate()
        .map(|(k, m)| (MultiIndex::new(vec![k as u32]), m))
        .collect();
    table_functional(1, entries, depth)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::Rational;

    type Q = Rational;

    fn mi(e: &[u32]) -> MultiIndex {
        MultiIndex::new(e.to_vec())
    }

    fn q(n: i64, d: i64) -> Q {
        Q::from_ratio(n, d)
    }

    fn double_factorial(n: i64) -> f64 {
        (1..=n).rev().step_by(2).map(|k| k as f64).product()
    }

    #[test]
    fn circle_moment_examples() {
        let c = circle_functional::<f64>(false, 12).unwrap();
        assert!((c.moment(&mi(&[2, 0])).unwrap() - 0.5).abs() < 1e-15);
        assert!(c.moment(&mi(&[3, 1])).unwrap().abs() < 1e-15);
        assert!((c.moment(&mi(&[2, 2])).unwrap() - 0.125).abs() < 1e-15);
        assert!(c.moment(&mi(&[1, 0])).unwrap().abs() < 1e-15);
        assert!((c.moment(&mi(&[0, 0])).unwrap() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn half_circle_examples() {
        let h = circle_functional::<f64>(true, 12).unwrap();
        assert!((h.moment(&mi(&[0, 1])).unwrap() - 2.0 / PI).abs() < 1e-14);
        assert!((h.moment(&mi(&[0, 0])).unwrap() - 1.0).abs() < 1e-14);
        assert!(h.moment(&mi(&[1, 0])).unwrap().abs() < 1e-14);
        // ∫_0^π sin³ = 4/3
        assert!((h.moment(&mi(&[0, 3])).unwrap() - 4.0 / (3.0 * PI)).abs() < 1e-14);
        // ∫_0^π cos² sin = 2/3
        assert!((h.moment(&mi(&[2, 1])).unwrap() - 2.0 / (3.0 * PI)).abs() < 1e-14);
    }

    #[test]
    fn circle_depth_is_enforced() {
        let c = circle_functional::<f64>(false, 4).unwrap();
        assert!(matches!(
            c.moment(&mi(&[3, 2])),
            Err(Error::DepthExceeded {
                requested: 5,
                available: 4
            })
        ));
        assert!(circle_functional::<Q>(false, 4).is_err());
    }

    #[test]
    fn circle_even_moments_match_closed_form() {
        // Λ(x^{2a} y^{2b}) = (2a−1)!!(2b−1)!!/(2a+2b)!!
        let c = CircleFunctional::new(false, 24);
        for a in 0..6i64 {
            for b in 0..6i64 {
                let expected = double_factorial(2 * a - 1) * double_factorial(2 * b - 1)
                    / double_factorial(2 * a + 2 * b);
                let got = c.moment_f64(2 * a as u32, 2 * b as u32);
                assert!((got - expected).abs() < 1e-12, "a={a} b={b}");
            }
        }
    }

    #[test]
    fn discrete_examples() {
        let m = DiscreteMeasure::dirac(vec![q(2, 1), q(3, 1)]).unwrap();
        let f = discrete_functional(m);
        assert_eq!(f.moment(&mi(&[1, 1])).unwrap(), q(6, 1));

        let two = DiscreteMeasure::new(vec![vec![q(-1, 1)], vec![q(1, 1)]], vec![q(1, 2), q(1, 2)]).unwrap();
        assert_eq!(discrete_functional(two).moment(&mi(&[2])).unwrap(), q(1, 1));

        let three = DiscreteMeasure::new(
            vec![vec![q(0, 1)], vec![q(1, 1)], vec![q(2, 1)]],
            vec![q(1, 4), q(1, 2), q(1, 4)],
        )
        .unwrap();
        assert_eq!(discrete_functional(three).moment(&mi(&[1])).unwrap(), q(1, 1));

        let square = DiscreteMeasure::new(
            vec![
                vec![q(1, 1), q(1, 1)],
                vec![q(-1, 1), q(1, 1)],
                vec![q(-1, 1), q(-1, 1)],
                vec![q(1, 1), q(-1, 1)],
            ],
            vec![q(1, 4); 4],
        )
        .unwrap();
        assert_eq!(discrete_functional(square).moment(&mi(&[2, 2])).unwrap(), q(1, 1));
    }

    #[test]
    fn discrete_validation() {
        assert!(DiscreteMeasure::new(vec![vec![1.0]], vec![0.5, 0.5]).is_err());
        assert!(DiscreteMeasure::new(vec![vec![1.0], vec![1.0]], vec![0.5, 0.5]).is_err());
        assert!(DiscreteMeasure::new(vec![vec![1.0], vec![2.0]], vec![0.5, 0.6]).is_err());
        assert!(DiscreteMeasure::new(vec![vec![1.0], vec![2.0]], vec![1.5, -0.5]).is_err());
        assert!(DiscreteMeasure::new(vec![vec![1.0], vec![2.0, 1.0]], vec![0.5, 0.5]).is_err());
    }

    #[test]
    fn product_examples() {
        let coin = || {
            discrete_functional(
                DiscreteMeasure::new(vec![vec![q(-1, 1)], vec![q(1, 1)]], vec![q(1, 2), q(1, 2)]).unwrap(),
            )
        };
        let p = product_functional(vec![coin(), coin()]).unwrap();
        assert_eq!(p.moment(&mi(&[2, 2])).unwrap(), q(1, 1));
        assert_eq!(p.moment(&mi(&[0, 0])).unwrap(), q(1, 1));

        let g = product_functional::<Q>(vec![gaussian_functional(), gaussian_functional()]).unwrap();
        assert_eq!(g.moment(&mi(&[4, 2])).unwrap(), q(3, 1));
        assert_eq!(g.moment(&mi(&[3, 2])).unwrap(), q(0, 1));
        assert_eq!(g.moment(&mi(&[6, 0])).unwrap(), q(15, 1));
    }

    #[test]
    fn table_examples() {
        let entries: HashMap<_, _> = [(mi(&[0]), q(1, 1)), (mi(&[1]), q(0, 1)), (mi(&[2]), q(1, 1))]
            .into_iter()
            .collect();
        let t = table_functional(1, entries, 2).unwrap();
        assert_eq!(t.moment(&mi(&[2])).unwrap(), q(1, 1));
        assert!(matches!(t.moment(&mi(&[3])), Err(Error::DepthExceeded { .. })));

        let partial: HashMap<_, _> = [
            (mi(&[0, 0]), 1.0),
            (mi(&[1, 0]), 0.0),
            (mi(&[0, 1]), 0.0),
            (mi(&[2, 0]), 1.0),
            (mi(&[0, 2]), 1.0),
        ]
        .into_iter()
        .collect();
        assert!(table_functional(2, partial, 2).is_err());

        let unnormalized: HashMap<_, _> = [(mi(&[0]), 2.0)].into_iter().collect();
        assert!(table_functional(1, unnormalized, 0).is_err());
    }

    #[test]
    fn jacobi_examples() {
        let ones = JacobiPair1D::new(vec![q(1, 1); 4], vec![q(0, 1); 4]).unwrap();
        let m = jacobi_moments(&ones, 4).unwrap();
        assert_eq!(m[0], q(1, 1));
        assert_eq!(m[2], q(1, 1));
        // Catalan numbers for the semicircle law
        assert_eq!(m[4], q(2, 1));

        let arcsine = JacobiPair1D::new(
            vec![q(1, 2), q(1, 4), q(1, 4), q(1, 4), q(1, 4)],
            vec![q(0, 1); 6],
        )
        .unwrap();
        let m = jacobi_moments(&arcsine, 10).unwrap();
        assert_eq!(m[2], q(1, 2));
        // arcsine law: m_{2k} = C(2k, k) / 4^k
        assert_eq!(m[4], q(6, 16));
        assert_eq!(m[6], q(20, 64));
        assert_eq!(m[10], q(252, 1024));
        assert_eq!(m[7], q(0, 1));

        assert!(JacobiPair1D::new(vec![q(-1, 1)], vec![q(0, 1)]).is_err());
        let short = JacobiPair1D::new(vec![q(1, 1)], vec![q(0, 1)]).unwrap();
        assert!(jacobi_moments(&short, 6).is_err());
    }

    #[test]
    fn terminated_jacobi_pair() {
        // ω = {1, 0}: ½(δ_{-1} + δ_1)
        let j = JacobiPair1D::new(vec![q(1, 1), q(0, 1)], vec![q(0, 1), q(0, 1)]).unwrap();
        let m = jacobi_moments(&j, 9).unwrap();
        for (k, v) in m.iter().enumerate() {
            assert_eq!(*v, if k % 2 == 0 { q(1, 1) } else { q(0, 1) });
        }
        let f = jacobi_to_moments(&j, 9).unwrap();
        assert_eq!(f.max_degree(), 9);
    }

    #[test]
    fn hermite_gives_gaussian_moments() {
        let omega: Vec<Q> = (1..=6).map(|k| q(k, 1)).collect();
        let j = JacobiPair1D::new(omega, vec![q(0, 1); 7]).unwrap();
        let m = jacobi_moments(&j, 12).unwrap();
        for k in 0..=12usize {
            let expected: Q = GaussianFunctional.raw_moment(&mi(&[k as u32]));
            assert_eq!(m[k], expected);
        }
    }
}
