//! Interacting Fock space data: Gram matrices, form generators and the
//! creation / preservation / annihilation blocks of each coordinate.
//!
//! Degree-`n` vectors are coefficient vectors over the degree-`n` monomials
//! (graded-lex), standing for combinations of the candidates `c_α`. Block
//! shapes: `A⁺[i][n]` is `d_{n+1} × d_n`, `A⁰[i][n]` is `d_n × d_n` and
//! `A⁻[i][n]` is `d_{n−1} × d_n` (`A⁻[i][0]` is an empty `0 × 1` block).

use std::collections::HashMap;

use crate::error::{Error, Result};
use crate::gradation::GradationBasis;
use crate::linalg::{symmetric_eigen, Matrix, PsdSplit};
use crate::measures::{MomentCache, MomentFunctional};
use crate::polynomial::{monomials, MultiIndex};
use crate::scalar::Scalar;
use crate::Tolerances;

#[derive(Debug, Clone)]
pub struct FockData<T> {
    dim: usize,
    max_degree: usize,
    monomials: Vec<Vec<MultiIndex>>,
    weights: Vec<Vec<T>>,
    gram: Vec<Matrix<T>>,
    splits: Vec<PsdSplit<T>>,
    aplus: Vec<Vec<Matrix<T>>>,
    azero: Vec<Vec<Matrix<T>>>,
    aminus: Vec<Vec<Matrix<T>>>,
    tolerances: Tolerances,
}

/// Residuals of the three commutation relations for one pair `j < k` at one degree.
#[derive(Debug, Clone, PartialEq)]
pub struct CommutationEntry {
    pub j: usize,
    pub k: usize,
    pub degree: usize,
    pub cr1: f64,
    pub cr2: f64,
    pub cr3: f64,
    pub passed: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CommutationReport {
    pub entries: Vec<CommutationEntry>,
    pub tolerance: f64,
    pub passed: bool,
}

impl CommutationReport {
    pub fn max_residual(&self) -> f64 {
        self.entries
            .iter()
            .map(|e| e.cr1.max(e.cr2).max(e.cr3))
            .fold(0.0, f64::max)
    }

    pub fn failures(&self) -> impl Iterator<Item = &CommutationEntry> {
        self.entries.iter().filter(|e| !e.passed)
    }
}

/// Residual of an operator identity, measured column by column in the G-seminorm.
#[derive(Debug, Clone, Copy)]
struct Residual {
    value: f64,
    reference: f64,
    exact_zero: bool,
}

impl Residual {
    fn zero() -> Self {
        Self {
            value: 0.0,
            reference: 0.0,
            exact_zero: true,
        }
    }

    fn passes<T: Scalar>(&self, tol: f64) -> bool {
        if T::EXACT {
            self.exact_zero
        } else {
            self.value <= tol * self.reference.max(1.0)
        }
    }
}

/// Builds the Fock data of a measure from its gradation. Needs moments up to
/// degree `2N + 1`.
pub fn assemble_fock<T: Scalar>(
    g: &GradationBasis<T>,
    functional: &dyn MomentFunctional<T>,
) -> Result<FockData<T>> {
    let n_max = g.max_degree();
    let dim = g.dimension();
    if functional.max_degree() < 2 * n_max + 1 {
        return Err(Error::DepthExceeded {
            requested: 2 * n_max + 1,
            available: functional.max_degree(),
        });
    }
    let basis = g.monomial_basis();
    let mut cache = MomentCache::new(functional);
    let mut azero = Vec::with_capacity(dim);
    for i in 0..dim {
        let size = basis.len();
        let mut hi = Matrix::<T>::zeros(size, size);
        for a in 0..size {
            for b in a..size {
                let m = cache.get(&basis[a].plus(&basis[b]).raise(i))?;
                hi[(a, b)] = m.clone();
                hi[(b, a)] = m;
            }
        }
        let blocks = g
            .levels()
            .iter()
            .map(|level| {
                let b = level.candidates.transpose().mul(&hi).mul(&level.candidates);
                level.split.pseudo_inverse().mul(&b)
            })
            .collect();
        azero.push(blocks);
    }
    let gram = g.levels().iter().map(|l| l.gram.clone()).collect();
    let splits = g.levels().iter().map(|l| l.split.clone()).collect();
    let data = FockData::from_splits(dim, gram, splits, azero, *g.tolerances());

    let adj = data.adjointness_residual();
    if adj > data.tolerances.adj {
        return Err(Error::Consistency(format!(
            "metric adjointness residual {adj:e} exceeds {:e}",
            data.tolerances.adj
        )));
    }
    let sym = data.symmetry_residual();
    if sym > data.tolerances.adj {
        return Err(Error::Consistency(format!(
            "preservation blocks are not G-symmetric (residual {sym:e})"
        )));
    }
    Ok(data)
}

impl<T: Scalar> FockData<T> {
    /// Fock data from prescribed Gram matrices `G_0..G_N` and preservation
    /// blocks `azero[i][n]`; creation is canonical and annihilation is the
    /// metric adjoint.
    pub fn from_parts(
        dim: usize,
        gram: Vec<Matrix<T>>,
        azero: Vec<Vec<Matrix<T>>>,
        tol: Tolerances,
    ) -> Result<Self> {
        if dim == 0 || gram.is_empty() {
            return Err(Error::Malformed("need dimension >= 1 and at least G_0".into()));
        }
        let depth = gram.len() - 1;
        for (n, g) in gram.iter().enumerate() {
            let dn = monomials(dim, n).len();
            if g.rows() != dn || g.cols() != dn {
                return Err(Error::Malformed(format!(
                    "G_{n} is {}x{}, expected {dn}x{dn}",
                    g.rows(),
                    g.cols()
                )));
            }
        }
        if azero.len() != dim || azero.iter().any(|b| b.len() != depth + 1) {
            return Err(Error::Malformed(format!(
                "expected {dim} lists of {} preservation blocks",
                depth + 1
            )));
        }
        for (i, blocks) in azero.iter().enumerate() {
            for (n, b) in blocks.iter().enumerate() {
                let dn = gram[n].rows();
                if b.rows() != dn || b.cols() != dn {
                    return Err(Error::Malformed(format!(
                        "B_{{{}|{n}}} is {}x{}, expected {dn}x{dn}",
                        i + 1,
                        b.rows(),
                        b.cols()
                    )));
                }
            }
        }
        let mut splits = Vec::with_capacity(gram.len());
        for (n, g) in gram.iter().enumerate() {
            if !g.is_symmetric(tol.adj * g.max_abs().max(1.0)) {
                return Err(Error::Malformed(format!("G_{n} is not symmetric")));
            }
            let split = T::psd_split(g, &tol.rank_tolerance()).map_err(|e| match e {
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
            splits.push(split);
        }
        Ok(Self::from_splits(dim, gram, splits, azero, tol))
    }

    fn from_splits(
        dim: usize,
        gram: Vec<Matrix<T>>,
        splits: Vec<PsdSplit<T>>,
        azero: Vec<Vec<Matrix<T>>>,
        tolerances: Tolerances,
    ) -> Self {
        let max_degree = gram.len() - 1;
        let mons: Vec<Vec<MultiIndex>> = (0..=max_degree).map(|n| monomials(dim, n)).collect();
        let weights = mons
            .iter()
            .map(|level| level.iter().map(MultiIndex::weight::<T>).collect())
            .collect();
        let positions: Vec<HashMap<&MultiIndex, usize>> = mons
            .iter()
            .map(|level| level.iter().enumerate().map(|(k, m)| (m, k)).collect())
            .collect();
        let pinv: Vec<Matrix<T>> = splits.iter().map(PsdSplit::pseudo_inverse).collect();

        let mut aplus = Vec::with_capacity(dim);
        let mut aminus = Vec::with_capacity(dim);
        for i in 0..dim {
            let mut up = Vec::with_capacity(max_degree);
            let mut down = vec![Matrix::zeros(0, 1)];
            for n in 0..max_degree {
                let mut shift = Matrix::<T>::zeros(mons[n + 1].len(), mons[n].len());
                for (c, alpha) in mons[n].iter().enumerate() {
                    shift[(positions[n + 1][&alpha.raise(i)], c)] = T::one();
                }
                down.push(pinv[n].mul(&shift.transpose()).mul(&gram[n + 1]));
                up.push(shift);
            }
            aplus.push(up);
            aminus.push(down);
        }
        Self {
            dim,
            max_degree,
            monomials: mons,
            weights,
            gram,
            splits,
            aplus,
            azero,
            aminus,
            tolerances,
        }
    }

    pub fn dimension(&self) -> usize {
        self.dim
    }

    pub fn max_degree(&self) -> usize {
        self.max_degree
    }

    pub fn tolerances(&self) -> &Tolerances {
        &self.tolerances
    }

    pub fn monomials(&self, n: usize) -> &[MultiIndex] {
        &self.monomials[n]
    }

    pub fn weights(&self, n: usize) -> &[T] {
        &self.weights[n]
    }

    pub fn gram_of(&self, n: usize) -> &Matrix<T> {
        &self.gram[n]
    }

    pub fn split(&self, n: usize) -> &PsdSplit<T> {
        &self.splits[n]
    }

    pub fn rank(&self, n: usize) -> usize {
        self.splits[n].rank()
    }

    /// `Ω_n = D_n⁻¹ G_n`
    pub fn omega_matrix(&self, n: usize) -> Matrix<T> {
        let mut out = self.gram[n].clone();
        for r in 0..out.rows() {
            for c in 0..out.cols() {
                out[(r, c)] = out[(r, c)].clone() / self.weights[n][r].clone();
            }
        }
        out
    }

    /// Creation block `A_i⁺ : level n → n+1`, for `n < N`.
    pub fn aplus(&self, i: usize, n: usize) -> &Matrix<T> {
        &self.aplus[i][n]
    }

    /// Preservation block `A_i⁰ = B_{i|n}`.
    pub fn azero(&self, i: usize, n: usize) -> &Matrix<T> {
        &self.azero[i][n]
    }

    /// Annihilation block `A_i⁻ : level n → n−1`.
    pub fn aminus(&self, i: usize, n: usize) -> &Matrix<T> {
        &self.aminus[i][n]
    }

    pub fn azero_blocks(&self) -> &[Vec<Matrix<T>>] {
        &self.azero
    }

    pub fn grams(&self) -> &[Matrix<T>] {
        &self.gram
    }

    /// Replaces one preservation entry, keeping everything else. Used for
    /// fault injection.
    pub fn with_azero_entry(&self, i: usize, n: usize, r: usize, c: usize, value: T) -> Self {
        let mut out = self.clone();
        out.azero[i][n][(r, c)] = value;
        out
    }

    /// Nonzero eigenvalues of `Ω_n`, ascending, with multiplicity.
    pub fn nonzero_spectrum(&self, n: usize) -> Vec<f64> {
        let g = self.gram[n].to_f64();
        let w: Vec<f64> = self.weights[n].iter().map(Scalar::to_f64).collect();
        // D^{-1/2} G D^{-1/2} is symmetric and similar to D^{-1} G
        let s = Matrix::from_rows(
            (0..g.rows())
                .map(|r| {
                    (0..g.cols())
                        .map(|c| g[(r, c)] / (w[r] * w[c]).sqrt())
                        .collect()
                })
                .collect(),
        )
        .expect("square");
        let (values, _) = symmetric_eigen(&s);
        let lmax = values.iter().map(|v| v.abs()).fold(0.0, f64::max);
        let cutoff = (g.rows() as f64 * f64::EPSILON * lmax).max(self.tolerances.rank);
        let mut out: Vec<f64> = values.into_iter().filter(|&v| v > cutoff).collect();
        out.sort_by(|a, b| a.partial_cmp(b).unwrap_or(std::cmp::Ordering::Equal));
        out
    }

    /// Largest entrywise violation of `G_n A⁻[n+1] = (A⁺[n])ᵀ G_{n+1}`,
    /// relative to the size of the two sides.
    pub fn adjointness_residual(&self) -> f64 {
        let mut worst: f64 = 0.0;
        for i in 0..self.dim {
            for n in 0..self.max_degree {
                let left = self.gram[n].mul(&self.aminus[i][n + 1]);
                let right = self.aplus[i][n].transpose().mul(&self.gram[n + 1]);
                let scale = left.max_abs().max(right.max_abs()).max(1.0);
                worst = worst.max(left.sub(&right).max_abs() / scale);
            }
        }
        worst
    }

    /// Largest relative violation of `G_n A⁰ = (A⁰)ᵀ G_n`.
    pub fn symmetry_residual(&self) -> f64 {
        let mut worst: f64 = 0.0;
        for i in 0..self.dim {
            for n in 0..=self.max_degree {
                let ga = self.gram[n].mul(&self.azero[i][n]);
                let scale = ga.max_abs().max(1.0);
                worst = worst.max(ga.sub(&ga.transpose()).max_abs() / scale);
            }
        }
        worst
    }

    fn residual(&self, level: usize, terms: &[(bool, Matrix<T>)]) -> Residual {
        let Some((_, first)) = terms.first() else {
            return Residual::zero();
        };
        let mut sum = Matrix::<T>::zeros(first.rows(), first.cols());
        for (positive, m) in terms {
            sum = if *positive { sum.add(m) } else { sum.sub(m) };
        }
        let split = &self.splits[level];
        let mut out = Residual::zero();
        for c in 0..sum.cols() {
            let col = sum.column(c);
            let sq = split.seminorm_sq(&col);
            if !sq.is_zero() {
                out.exact_zero = false;
            }
            out.value = out.value.max(sq.to_f64().max(0.0).sqrt());
            let reference: f64 = terms.iter().map(|(_, m)| split.seminorm(&m.column(c))).sum();
            out.reference = out.reference.max(reference);
        }
        out
    }

    /// CR1–CR3 for every pair `j < k` and every degree `n ≤ N − 2`.
    pub fn check_commutation(&self) -> CommutationReport {
        let tol = self.tolerances.comm;
        let mut entries = Vec::new();
        let mut passed = true;
        let top = self.max_degree.saturating_sub(2);
        if self.max_degree >= 2 {
            for j in 0..self.dim {
                for k in j + 1..self.dim {
                    for n in 0..=top {
                        let (p, z, m) = (&self.aplus, &self.azero, &self.aminus);
                        let cr1 = self.residual(
                            n + 2,
                            &[
                                (true, p[j][n + 1].mul(&p[k][n])),
                                (false, p[k][n + 1].mul(&p[j][n])),
                            ],
                        );
                        let cr2 = self.residual(
                            n + 1,
                            &[
                                (true, p[j][n].mul(&z[k][n])),
                                (false, z[k][n + 1].mul(&p[j][n])),
                                (true, z[j][n + 1].mul(&p[k][n])),
                                (false, p[k][n].mul(&z[j][n])),
                            ],
                        );
                        let mut terms = vec![
                            (false, m[k][n + 1].mul(&p[j][n])),
                            (true, m[j][n + 1].mul(&p[k][n])),
                            (true, z[j][n].mul(&z[k][n])),
                            (false, z[k][n].mul(&z[j][n])),
                        ];
                        if n >= 1 {
                            terms.push((true, p[j][n - 1].mul(&m[k][n])));
                            terms.push((false, p[k][n - 1].mul(&m[j][n])));
                        }
                        let cr3 = self.residual(n, &terms);
                        let ok = cr1.passes::<T>(tol) && cr2.passes::<T>(tol) && cr3.passes::<T>(tol);
                        passed &= ok;
                        entries.push(CommutationEntry {
                            j,
                            k,
                            degree: n,
                            cr1: cr1.value,
                            cr2: cr2.value,
                            cr3: cr3.value,
                            passed: ok,
                        });
                    }
                }
            }
        }
        CommutationReport {
            entries,
            tolerance: tol,
            passed,
        }
    }

    /// `X_i = A_i⁺ + A_i⁰ + A_i⁻` on a state given per level `0..=N`.
    /// Mass pushed above level `N` is dropped.
    pub fn apply_x(&self, i: usize, state: &[Vec<T>]) -> Vec<Vec<T>> {
        let mut out: Vec<Vec<T>> = self.monomials.iter().map(|m| vec![T::zero(); m.len()]).collect();
        for (n, v) in state.iter().enumerate() {
            if v.iter().all(T::is_zero) {
                continue;
            }
            accumulate(&mut out[n], &self.azero[i][n].mul_vec(v));
            if n < self.max_degree {
                accumulate(&mut out[n + 1], &self.aplus[i][n].mul_vec(v));
            }
            if n >= 1 {
                accumulate(&mut out[n - 1], &self.aminus[i][n].mul_vec(v));
            }
        }
        out
    }

    pub fn vacuum(&self) -> Vec<Vec<T>> {
        let mut state: Vec<Vec<T>> = self.monomials.iter().map(|m| vec![T::zero(); m.len()]).collect();
        state[0][0] = T::one();
        state
    }

    /// `⟨Φ_0, X_1^{α_1} ⋯ X_d^{α_d} Φ_0⟩`, applying `X_d` first.
    pub fn vacuum_moment(&self, alpha: &MultiIndex) -> Result<T> {
        if alpha.dim() != self.dim {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                found: alpha.dim(),
            });
        }
        if alpha.degree() > self.max_degree {
            return Err(Error::DepthExceeded {
                requested: alpha.degree(),
                available: self.max_degree,
            });
        }
        let mut state = self.vacuum();
        for i in (0..self.dim).rev() {
            for _ in 0..alpha.entries()[i] {
                state = self.apply_x(i, &state);
            }
        }
        Ok(self.gram[0][(0, 0)].clone() * state[0][0].clone())
    }

    /// Largest G-seminorm of `(X_j X_k − X_k X_j) e` over basis vectors `e`
    /// on levels `≤ N − 2`, relative to the size of the two products.
    pub fn x_commutator_residual(&self, j: usize, k: usize) -> f64 {
        let mut worst: f64 = 0.0;
        for n in 0..=self.max_degree.saturating_sub(2) {
            for c in 0..self.monomials[n].len() {
                let mut e = self.vacuum();
                e[0][0] = T::zero();
                e[n][c] = T::one();
                let jk = self.apply_x(j, &self.apply_x(k, &e));
                let kj = self.apply_x(k, &self.apply_x(j, &e));
                let (mut diff, mut scale) = (0.0, 0.0);
                for (level, split) in self.splits.iter().enumerate() {
                    let d: Vec<T> = jk[level]
                        .iter()
                        .zip(&kj[level])
                        .map(|(a, b)| a.clone() - b.clone())
                        .collect();
                    diff += split.seminorm_sq(&d).to_f64().max(0.0);
                    scale += split.seminorm_sq(&jk[level]).to_f64().max(0.0);
                }
                worst = worst.max(diff.sqrt() / scale.sqrt().max(1.0));
            }
        }
        worst
    }

    /// Matrix of a block `level from → level to` in orthonormal bases of the
    /// positive parts of `G_from` and `G_to`.
    pub fn orthonormal_block(&self, block: &Matrix<T>, from: usize, to: usize) -> Matrix<f64> {
        let src = &self.splits[from].positive;
        let dst = &self.splits[to].positive;
        let mut out = Matrix::<f64>::zeros(dst.len(), src.len());
        for (p, s) in src.iter().enumerate() {
            let image = block.mul_vec(&s.vector);
            let ds = s.norm_sq.to_f64().sqrt();
            for (q, t) in dst.iter().enumerate() {
                let coeff = crate::linalg::dot(&t.dual, &image).to_f64();
                out[(q, p)] = coeff * t.norm_sq.to_f64().sqrt() / ds;
            }
        }
        out
    }
}

fn accumulate<T: Scalar>(dst: &mut [T], src: &[T]) {
    for (d, s) in dst.iter_mut().zip(src) {
        *d = d.clone() + s.clone();
    }
}
