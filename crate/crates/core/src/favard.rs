//! The reconstruction direction: prescribed Fock data is validated, and a
//! finitely supported measure is recovered by joint diagonalization.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::fock::{CommutationReport, FockData};
use crate::linalg::{symmetric_eigen, Matrix};
use crate::measures::DiscreteMeasure;
use crate::polynomial::monomials;
use crate::scalar::{snap_rational, Scalar};
use crate::Tolerances;

/// Prescribed Gram matrices `G_0..G_N` and preservation blocks `B_{i|n}`,
/// indexed like [`FockData`].
#[derive(Debug, Clone, PartialEq)]
pub struct FockInput<T> {
    pub dim: usize,
    pub gram: Vec<Matrix<T>>,
    /// `preservation[i][n] = B_{i+1|n}`
    pub preservation: Vec<Vec<Matrix<T>>>,
}

impl<T: Scalar> FockInput<T> {
    pub fn from_gram(dim: usize, gram: Vec<Matrix<T>>, preservation: Vec<Vec<Matrix<T>>>) -> Self {
        Self {
            dim,
            gram,
            preservation,
        }
    }

    /// Input given by form generators; `G_n = D_n Ω_n`.
    pub fn from_omega(
        dim: usize,
        omega: Vec<Matrix<T>>,
        preservation: Vec<Vec<Matrix<T>>>,
    ) -> Result<Self> {
        let mut gram = Vec::with_capacity(omega.len());
        for (n, om) in omega.into_iter().enumerate() {
            let weights: Vec<T> = monomials(dim, n).iter().map(|m| m.weight::<T>()).collect();
            if om.rows() != weights.len() {
                return Err(Error::Malformed(format!(
                    "Ω_{n} has {} rows, expected {}",
                    om.rows(),
                    weights.len()
                )));
            }
            let mut g = om;
            for r in 0..g.rows() {
                for c in 0..g.cols() {
                    g[(r, c)] = g[(r, c)].clone() * weights[r].clone();
                }
            }
            gram.push(g);
        }
        Ok(Self {
            dim,
            gram,
            preservation,
        })
    }

    /// Input with all preservation blocks zero.
    pub fn without_preservation(dim: usize, gram: Vec<Matrix<T>>) -> Self {
        let preservation = (0..dim)
            .map(|_| gram.iter().map(|g| Matrix::zeros(g.rows(), g.cols())).collect())
            .collect();
        Self {
            dim,
            gram,
            preservation,
        }
    }

    pub fn from_fock(f: &FockData<T>) -> Self {
        Self {
            dim: f.dimension(),
            gram: f.grams().to_vec(),
            preservation: f.azero_blocks().to_vec(),
        }
    }

    pub fn depth(&self) -> usize {
        self.gram.len().saturating_sub(1)
    }

    pub fn to_fock(&self, tol: Tolerances) -> Result<FockData<T>> {
        if let Some(g0) = self.gram.first() {
            if g0.rows() != 1 || g0.cols() != 1 || g0[(0, 0)] != T::one() {
                return Err(Error::Malformed("G_0 must be [1]".into()));
            }
        }
        FockData::from_parts(self.dim, self.gram.clone(), self.preservation.clone(), tol)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum WitnessKind {
    Creation,
    Preservation,
}

/// A null vector `ξ` of `G_n` whose image under `A_i⁺` or `A_i⁰` has positive norm.
#[derive(Debug, Clone, PartialEq)]
pub struct NullWitness {
    pub degree: usize,
    pub coordinate: usize,
    pub kind: WitnessKind,
    pub vector: Vec<f64>,
    pub seminorm: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ValidationReport {
    pub condition_i: bool,
    pub witnesses: Vec<NullWitness>,
    pub condition_ii: CommutationReport,
    pub hermiticity: bool,
    pub symmetry_residual: f64,
    pub adjointness_residual: f64,
    pub passed: bool,
}

/// Checks the prescribed data: null vectors stay null under creation and
/// preservation, the commutation relations hold, and each `B_{i|n}` is G-symmetric.
pub fn validate<T: Scalar>(fi: &FockInput<T>, tol: Tolerances) -> Result<ValidationReport> {
    Ok(validate_fock(&fi.to_fock(tol)?))
}

pub fn validate_fock<T: Scalar>(f: &FockData<T>) -> ValidationReport {
    let tol = *f.tolerances();
    let mut witnesses = Vec::new();
    for n in 0..=f.max_degree() {
        for xi in &f.split(n).null {
            for i in 0..f.dimension() {
                let mut check = |kind, image: Vec<T>, level: usize| {
                    let split = f.split(level);
                    let sq = split.seminorm_sq(&image);
                    let value = sq.to_f64().max(0.0).sqrt();
                    let norm = xi.iter().map(|x| x.to_f64().powi(2)).sum::<f64>().sqrt();
                    let bound = tol.comm * split.max_value.sqrt().max(1.0) * norm.max(1.0);
                    let bad = if T::EXACT { !sq.is_zero() } else { value > bound };
                    if bad {
                        witnesses.push(NullWitness {
                            degree: n,
                            coordinate: i,
                            kind,
                            vector: xi.iter().map(Scalar::to_f64).collect(),
                            seminorm: value,
                        });
                    }
                };
                if n < f.max_degree() {
                    check(WitnessKind::Creation, f.aplus(i, n).mul_vec(xi), n + 1);
                }
                check(WitnessKind::Preservation, f.azero(i, n).mul_vec(xi), n);
            }
        }
    }
    let symmetry_residual = f.symmetry_residual();
    let hermiticity = if T::EXACT {
        symmetry_residual == 0.0
    } else {
        symmetry_residual <= tol.adj
    };
    let condition_ii = f.check_commutation();
    let condition_i = witnesses.is_empty();
    ValidationReport {
        condition_i,
        passed: condition_i && hermiticity && condition_ii.passed,
        witnesses,
        condition_ii,
        hermiticity,
        symmetry_residual,
        adjointness_residual: f.adjointness_residual(),
    }
}

/// Output of [`reconstruct_discrete`].
#[derive(Debug, Clone)]
pub struct Reconstruction {
    pub measure: DiscreteMeasure<f64>,
    /// Per atom, each coordinate as `(p, q)` when within `1e−8` of a rational
    /// with denominator at most 64.
    pub snapped: Vec<Option<Vec<(i64, i64)>>>,
    /// First degree with `ρ_n = 0`.
    pub termination: usize,
    /// Number of random combinations tried; `None` if the sequential
    /// fallback was needed.
    pub attempts: Option<usize>,
}

const JOINT_TOL: f64 = 1e-8;
const MAX_ATTEMPTS: usize = 5;

/// Recovers the finitely supported measure behind validated Fock data.
pub fn reconstruct_discrete<T: Scalar>(
    fi: &FockInput<T>,
    tol: Tolerances,
    seed: u64,
) -> Result<Reconstruction> {
    reconstruct_fock(&fi.to_fock(tol)?, seed)
}

pub fn reconstruct_fock<T: Scalar>(f: &FockData<T>, seed: u64) -> Result<Reconstruction> {
    let report = validate_fock(f);
    if !report.condition_i || !report.hermiticity {
        return Err(Error::Consistency(
            "Fock data fails the null-vector or hermiticity conditions".into(),
        ));
    }
    if !report.condition_ii.passed {
        return Err(Error::CommutationViolated {
            residual: report.condition_ii.max_residual(),
        });
    }
    let top = f.max_degree();
    let termination = (0..=top)
        .find(|&n| f.rank(n) == 0)
        .ok_or(Error::NotFinitelySupported {
            depth: top,
            rank: f.rank(top),
        })?;

    let xs = quotient_operators(f, termination);
    let (vectors, attempts) = joint_eigenvectors(&xs, seed);
    let mut atoms: Vec<(Vec<f64>, f64)> = (0..vectors.cols())
        .map(|c| {
            let u = vectors.column(c);
            let point = xs.iter().map(|x| crate::linalg::dot(&u, &x.mul_vec(&u))).collect();
            (point, u[0] * u[0])
        })
        .collect();
    atoms.sort_by(|a, b| {
        a.0.iter()
            .zip(&b.0)
            .find(|(x, y)| (*x - *y).abs() > JOINT_TOL)
            .map_or(std::cmp::Ordering::Equal, |(x, y)| x.total_cmp(y))
    });
    let snapped = atoms
        .iter()
        .map(|(p, _)| {
            p.iter()
                .map(|&x| snap_rational(x, 64, JOINT_TOL))
                .collect::<Option<Vec<_>>>()
        })
        .collect();
    let (points, weights) = atoms.into_iter().unzip();
    Ok(Reconstruction {
        measure: DiscreteMeasure::new(points, weights)?,
        snapped,
        termination,
        attempts,
    })
}

/// Symmetric matrices of `X_1..X_d` on `⊕_{n<t} H_n` in orthonormal coordinates.
fn quotient_operators<T: Scalar>(f: &FockData<T>, levels: usize) -> Vec<Matrix<f64>> {
    let offsets: Vec<usize> = (0..=levels)
        .scan(0, |acc, n| {
            let o = *acc;
            if n < levels {
                *acc += f.rank(n);
            }
            Some(o)
        })
        .collect();
    let size = offsets[levels];
    let place = |m: &mut Matrix<f64>, block: &Matrix<f64>, row: usize, col: usize| {
        for r in 0..block.rows() {
            for c in 0..block.cols() {
                m[(row + r, col + c)] += block[(r, c)];
            }
        }
    };
    (0..f.dimension())
        .map(|i| {
            let mut x = Matrix::<f64>::zeros(size, size);
            for n in 0..levels {
                place(&mut x, &f.orthonormal_block(f.azero(i, n), n, n), offsets[n], offsets[n]);
                if n + 1 < levels {
                    place(&mut x, &f.orthonormal_block(f.aplus(i, n), n, n + 1), offsets[n + 1], offsets[n]);
                    place(&mut x, &f.orthonormal_block(f.aminus(i, n + 1), n + 1, n), offsets[n], offsets[n + 1]);
                }
            }
            x.add(&x.transpose()).scale(&0.5)
        })
        .collect()
}

fn off_diagonal_ok(xs: &[Matrix<f64>], u: &Matrix<f64>) -> bool {
    xs.iter().all(|x| {
        let d = u.transpose().mul(x).mul(u);
        let scale = x.max_abs().max(1.0);
        (0..d.rows()).all(|r| (0..d.cols()).all(|c| r == c || d[(r, c)].abs() <= JOINT_TOL * scale))
    })
}

/// Orthonormal joint eigenvectors (as columns) of commuting symmetric matrices.
fn joint_eigenvectors(xs: &[Matrix<f64>], seed: u64) -> (Matrix<f64>, Option<usize>) {
    let size = xs.first().map_or(0, Matrix::rows);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for attempt in 1..=MAX_ATTEMPTS {
        let mut y = Matrix::<f64>::zeros(size, size);
        for x in xs {
            let c: f64 = rng.gen_range(-1.0..1.0);
            y = y.add(&x.scale(&c));
        }
        let (_, u) = symmetric_eigen(&y);
        if off_diagonal_ok(xs, &u) {
            return (u, Some(attempt));
        }
    }
    (sequential_eigenvectors(xs, size), None)
}

/// Splits the space by the eigenvalue clusters of `X_1`, then refines each
/// cluster with `X_2`, and so on.
fn sequential_eigenvectors(xs: &[Matrix<f64>], size: usize) -> Matrix<f64> {
    let mut spaces = vec![Matrix::<f64>::identity(size)];
    for x in xs {
        let scale = x.max_abs().max(1.0);
        let mut next = Vec::new();
        for q in spaces {
            let (values, vecs) = symmetric_eigen(&q.transpose().mul(x).mul(&q));
            let rotated = q.mul(&vecs);
            let mut start = 0;
            for k in 1..=values.len() {
                if k == values.len() || (values[k - 1] - values[k]).abs() > JOINT_TOL * scale {
                    let cols: Vec<Vec<f64>> = (start..k).map(|c| rotated.column(c)).collect();
                    next.push(Matrix::from_columns(size, &cols));
                    start = k;
                }
            }
        }
        spaces = next;
    }
    let cols: Vec<Vec<f64>> = spaces
        .iter()
        .flat_map(|q| (0..q.cols()).map(|c| q.column(c)).collect::<Vec<_>>())
        .collect();
    Matrix::from_columns(size, &cols)
}

/// Result of the diagonal product check. `factors` holds `(ω, η)` when valid.
#[derive(Debug, Clone, PartialEq)]
pub struct DiagonalProduct<T> {
    pub valid: bool,
    pub factors: Option<(Vec<T>, Vec<T>)>,
    /// First `(n, n₁)` at which a condition failed.
    pub violation: Option<(usize, usize)>,
}

fn same<T: Scalar>(a: &T, b: &T) -> bool {
    if T::EXACT {
        a == b
    } else {
        let (x, y) = (a.to_f64(), b.to_f64());
        (x - y).abs() <= 1e-12 * x.abs().max(y.abs()).max(1.0)
    }
}

/// `d⁽ⁿ⁾_{n₁} = Π_{k≤n₁} ω_k · Π_{l≤n−n₁} η_l` for `n = 0..=depth`; row `n`
/// is indexed by the power `n₁` of `x_1`.
pub fn diagonal_table<T: Scalar>(omega: &[T], eta: &[T], depth: usize) -> Vec<Vec<T>> {
    let prod = |s: &[T], k: usize| s[..k].iter().fold(T::one(), |acc, v| acc * v.clone());
    (0..=depth)
        .map(|n| (0..=n).map(|n1| prod(omega, n1) * prod(eta, n - n1)).collect())
        .collect()
}

/// Checks whether a two-variable diagonal table has the product form and
/// extracts the factor sequences. `dtable[n][n₁]` is the Gram diagonal entry
/// of `x_1^{n₁} x_2^{n−n₁}` at degree `n`.
pub fn diagonal_product_check<T: Scalar>(dtable: &[Vec<T>]) -> Result<DiagonalProduct<T>> {
    for (n, row) in dtable.iter().enumerate() {
        if row.len() != n + 1 {
            return Err(Error::Malformed(format!("row {n} has {} entries, expected {}", row.len(), n + 1)));
        }
        if row.iter().any(|v| *v <= T::zero()) {
            return Err(Error::Malformed(format!("row {n} has a non-positive entry")));
        }
    }
    let invalid = |n, n1| {
        Ok(DiagonalProduct {
            valid: false,
            factors: None,
            violation: Some((n, n1)),
        })
    };
    if dtable.is_empty() {
        return Err(Error::Malformed("empty table".into()));
    }
    if !same(&dtable[0][0], &T::one()) {
        return invalid(0, 0);
    }
    let d = |n: usize, k: usize| dtable[n][k].clone();
    let depth = dtable.len() - 1;
    for n in 1..depth {
        for n1 in 0..n {
            // d(n, n1)/d(n−1, n1) = d(n+1, n1+1)/d(n, n1+1)
            if !same(&(d(n, n1) * d(n, n1 + 1)), &(d(n + 1, n1 + 1) * d(n - 1, n1))) {
                return invalid(n, n1);
            }
        }
        for n1 in 1..=n {
            // d(n+1, n1)/d(n, n1−1) = d(n, n1)/d(n−1, n1−1)
            if !same(&(d(n + 1, n1) * d(n - 1, n1 - 1)), &(d(n, n1) * d(n, n1 - 1))) {
                return invalid(n, n1);
            }
        }
    }
    let omega: Vec<T> = (1..=depth).map(|k| d(k, k) / d(k - 1, k - 1)).collect();
    let eta: Vec<T> = (1..=depth).map(|l| d(l, 0) / d(l - 1, 0)).collect();
    let rebuilt = diagonal_table(&omega, &eta, depth);
    for (n, row) in rebuilt.iter().enumerate() {
        for (n1, v) in row.iter().enumerate() {
            if !same(v, &dtable[n][n1]) {
                return invalid(n, n1);
            }
        }
    }
    Ok(DiagonalProduct {
        valid: true,
        factors: Some((omega, eta)),
        violation: None,
    })
}

/// Fock input with `G_n = diag(d⁽ⁿ⁾)` in graded-lex order and `B = 0`.
pub fn diagonal_fock_input<T: Scalar>(dtable: &[Vec<T>]) -> FockInput<T> {
    let gram = dtable
        .iter()
        .map(|row| {
            // graded-lex position k is the monomial x^{n−k} y^k
            let entries: Vec<T> = row.iter().rev().cloned().collect();
            Matrix::diagonal(&entries)
        })
        .collect();
    FockInput::without_preservation(2, gram)
}

/// Growth diagnostic `a_n = max_i ‖(I − P_{n]}) X_i² P_{n]}‖`.
#[derive(Debug, Clone, PartialEq)]
pub struct SelfAdjointnessReport {
    pub degrees: Vec<usize>,
    pub bounds: Vec<f64>,
    /// Fitted `p` in `a_n ≈ C nᵖ`; `None` when fewer than two positive bounds.
    pub exponent: Option<f64>,
    /// `Σ a_n^{−1/2}` looks divergent: `p ≤ 2` or some `a_n = 0`.
    pub divergent_sum: bool,
    pub note: &'static str,
}

pub const SELF_ADJOINTNESS_NOTE: &str =
    "finite-depth heuristic: a divergent flag is consistent with the growth hypothesis, not a proof";

pub fn self_adjointness_bound<T: Scalar>(
    f: &FockData<T>,
    degrees: &[usize],
) -> Result<SelfAdjointnessReport> {
    let mut bounds = Vec::with_capacity(degrees.len());
    for &n in degrees {
        if n + 2 > f.max_degree() {
            return Err(Error::DepthExceeded {
                requested: n + 2,
                available: f.max_degree(),
            });
        }
        let mut a: f64 = 0.0;
        for i in 0..f.dimension() {
            let ranks = [
                if n >= 1 { f.rank(n - 1) } else { 0 },
                f.rank(n),
                f.rank(n + 1),
                f.rank(n + 2),
            ];
            let mut m = Matrix::<f64>::zeros(ranks[2] + ranks[3], ranks[0] + ranks[1]);
            let mut put = |block: Matrix<f64>, row: usize, col: usize| {
                for r in 0..block.rows() {
                    for c in 0..block.cols() {
                        m[(row + r, col + c)] += block[(r, c)];
                    }
                }
            };
            let (p, z) = (|k| f.aplus(i, k), |k| f.azero(i, k));
            if n >= 1 {
                put(f.orthonormal_block(&p(n).mul(p(n - 1)), n - 1, n + 1), 0, 0);
            }
            let mixed = p(n).mul(z(n)).add(&z(n + 1).mul(p(n)));
            put(f.orthonormal_block(&mixed, n, n + 1), 0, ranks[0]);
            put(f.orthonormal_block(&p(n + 1).mul(p(n)), n, n + 2), ranks[2], ranks[0]);
            a = a.max(operator_norm(&m));
        }
        bounds.push(a);
    }
    let any_zero = bounds.iter().any(|&a| a <= f64::MIN_POSITIVE);
    let exponent = fit_exponent(degrees, &bounds);
    Ok(SelfAdjointnessReport {
        degrees: degrees.to_vec(),
        divergent_sum: any_zero || exponent.is_some_and(|p| p <= 2.0),
        bounds,
        exponent,
        note: SELF_ADJOINTNESS_NOTE,
    })
}

fn operator_norm(m: &Matrix<f64>) -> f64 {
    if m.rows() == 0 || m.cols() == 0 {
        return 0.0;
    }
    let (values, _) = symmetric_eigen(&m.transpose().mul(m));
    values.first().copied().unwrap_or(0.0).max(0.0).sqrt()
}

/// Least-squares slope of `ln a_n` against `ln n` over positive `n` and `a_n`.
fn fit_exponent(degrees: &[usize], bounds: &[f64]) -> Option<f64> {
    let pts: Vec<(f64, f64)> = degrees
        .iter()
        .zip(bounds)
        .filter(|(&n, &a)| n >= 1 && a > f64::MIN_POSITIVE)
        .map(|(&n, &a)| ((n as f64).ln(), a.ln()))
        .collect();
    if pts.len() < 2 {
        return None;
    }
    let k = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / k;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / k;
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    Some(sxy / sxx)
}
