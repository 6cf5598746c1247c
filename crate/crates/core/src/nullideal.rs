//! Deficiency rank, null polynomials and a linear-algebra minimal generator
//! set of the null ideal `𝒩 = {p : Λ(p²) = 0}`.

use crate::gradation::GradationBasis;
use crate::linalg::{nullspace, rref, Matrix};
use crate::polynomial::{count_monomials, monomials, MultiIndex, Polynomial};
use crate::scalar::Scalar;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RankSequence {
    pub ranks: Vec<usize>,
    /// `d_n = C(n + d − 1, d − 1)`
    pub dimensions: Vec<usize>,
    pub has_deficiency: bool,
    pub first_deficient: Option<usize>,
}

pub fn rank_sequence<T: Scalar>(g: &GradationBasis<T>) -> RankSequence {
    let ranks: Vec<usize> = g.levels().iter().map(|l| l.rank()).collect();
    let dimensions: Vec<usize> = (0..ranks.len())
        .map(|n| count_monomials(g.dimension(), n))
        .collect();
    let first_deficient = ranks.iter().zip(&dimensions).position(|(r, d)| r < d);
    RankSequence {
        has_deficiency: first_deficient.is_some(),
        ranks,
        dimensions,
        first_deficient,
    }
}

/// Rows of `m` reduced to echelon form with leading coefficient 1; zero rows dropped.
fn echelon_rows<T: Scalar>(rows: &[Vec<T>], tol: f64) -> Vec<Vec<T>> {
    if rows.is_empty() {
        return Vec::new();
    }
    let (r, pivots) = rref(&Matrix::from_rows(rows.to_vec()).expect("equal lengths"), tol);
    (0..pivots.len()).map(|k| r.row(k).to_vec()).collect()
}

/// Degree-`n` null polynomials, normalized to echelon form over the
/// candidate coordinates.
pub fn null_polynomials<T: Scalar>(g: &GradationBasis<T>, n: usize) -> Vec<Polynomial<T>> {
    let tol = g.tolerances().rank;
    echelon_rows(&g.level(n).split.null, tol)
        .iter()
        .map(|xi| g.level_polynomial(n, xi))
        .collect()
}

#[derive(Debug, Clone, PartialEq)]
pub struct Generator<T: Scalar> {
    pub degree: usize,
    /// Degree-`n` candidate coordinates.
    pub coordinates: Vec<T>,
    pub polynomial: Polynomial<T>,
}

/// How the kernel at one degree splits into inherited and new directions.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ReductionStep {
    pub degree: usize,
    pub kernel_dim: usize,
    pub inherited_dim: usize,
    pub new_generators: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct NullIdealBasis<T: Scalar> {
    pub dim: usize,
    pub generators: Vec<Generator<T>>,
    pub kernel_dims: Vec<usize>,
    pub reductions: Vec<ReductionStep>,
}

/// Kernel directions at each degree that are not top-degree parts of
/// `x^β f` for earlier generators `f`.
pub fn base_generators<T: Scalar>(g: &GradationBasis<T>) -> NullIdealBasis<T> {
    let tol = g.tolerances().rank;
    let dim = g.dimension();
    let mut generators: Vec<Generator<T>> = Vec::new();
    let mut kernel_dims = vec![g.level(0).nullity()];
    let mut reductions = Vec::new();
    for n in 1..=g.max_degree() {
        let kernel = &g.level(n).split.null;
        kernel_dims.push(kernel.len());
        if kernel.is_empty() {
            reductions.push(ReductionStep {
                degree: n,
                kernel_dim: 0,
                inherited_dim: 0,
                new_generators: 0,
            });
            continue;
        }
        let mut inherited: Vec<Vec<T>> = Vec::new();
        for f in &generators {
            for beta in monomials(dim, n - f.degree) {
                let shifted = f.polynomial.mul(&Polynomial::monomial(beta, T::one())).expect("same dimension");
                inherited.push(shifted.top_homogeneous(n).expect("degree n"));
            }
        }
        let inherited = echelon_rows(&inherited, tol);
        let fresh: Vec<Vec<T>> = if inherited.is_empty() {
            kernel.clone()
        } else {
            // combinations Σ c_k ξ_k of kernel vectors orthogonal to the inherited span
            let kt = Matrix::from_columns(kernel[0].len(), kernel);
            let ik = Matrix::from_rows(inherited.clone()).expect("equal lengths").mul(&kt);
            nullspace(&ik, tol)
                .iter()
                .map(|c| kt.mul_vec(c))
                .collect()
        };
        let fresh = echelon_rows(&fresh, tol);
        reductions.push(ReductionStep {
            degree: n,
            kernel_dim: kernel.len(),
            inherited_dim: inherited.len(),
            new_generators: fresh.len(),
        });
        for xi in fresh {
            generators.push(Generator {
                degree: n,
                polynomial: g.level_polynomial(n, &xi),
                coordinates: xi,
            });
        }
    }
    NullIdealBasis {
        dim,
        generators,
        kernel_dims,
        reductions,
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SupportMembership<T> {
    pub in_support: bool,
    pub residuals: Vec<T>,
}

/// `point ∈ S(𝒩)` within `tol`: every generator vanishes there.
pub fn support_membership<T: Scalar>(
    b: &NullIdealBasis<T>,
    point: &[T],
    tol: f64,
) -> crate::Result<SupportMembership<T>> {
    let residuals = b
        .generators
        .iter()
        .map(|g| g.polynomial.eval(point))
        .collect::<crate::Result<Vec<T>>>()?;
    Ok(SupportMembership {
        in_support: residuals.iter().all(|r| r.to_f64().abs() <= tol),
        residuals,
    })
}

/// Scales `p` so its graded-lex leading coefficient is 1.
pub fn monic<T: Scalar>(p: &Polynomial<T>) -> Polynomial<T> {
    match p.leading_term() {
        Some((_, c)) => p.scale(&(T::one() / c.clone())),
        None => p.clone(),
    }
}

/// Leading monomial of a generator, for reporting.
pub fn leading_monomial<T: Scalar>(p: &Polynomial<T>) -> Option<MultiIndex> {
    p.leading_term().map(|(k, _)| k.clone())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gradation::build_gradations;
    use crate::measures::{
        circle_functional, discrete_functional, gaussian_functional, product_functional,
        DiscreteMeasure,
    };
    use crate::scalar::Rational;

    type Q = Rational;

    fn q(n: i64, d: i64) -> Q {
        Q::from_ratio(n, d)
    }

    fn poly<T: Scalar>(terms: &[(&[u32], T)]) -> Polynomial<T> {
        Polynomial::from_terms(
            terms[0].0.len(),
            terms.iter().map(|(k, c)| (MultiIndex::new(k.to_vec()), c.clone())),
        )
        .unwrap()
    }

    fn four_points() -> DiscreteMeasure<Q> {
        let p = |a, b| vec![q(a, 1), q(b, 1)];
        DiscreteMeasure::new(vec![p(1, 1), p(-1, 1), p(-1, -1), p(1, -1)], vec![q(1, 4); 4]).unwrap()
    }

    fn assert_close(a: &Polynomial<f64>, b: &Polynomial<f64>, tol: f64) {
        let d = a.sub(b).unwrap();
        assert!(d.terms().all(|(_, v)| v.abs() <= tol), "{a:?} vs {b:?}");
    }

    #[test]
    fn circle_rank_and_generator() {
        let c = circle_functional::<f64>(false, 12).unwrap();
        let g = build_gradations(c.as_ref(), 5).unwrap();
        let rs = rank_sequence(&g);
        assert_eq!(rs.ranks, [1, 2, 2, 2, 2, 2]);
        assert_eq!(rs.first_deficient, Some(2));

        let circle = poly(&[(&[2, 0], 1.0), (&[0, 2], 1.0), (&[0, 0], -1.0)]);
        let null = null_polynomials(&g, 2);
        assert_eq!(null.len(), 1);
        assert_close(&monic(&null[0]), &circle, 1e-12);

        let b = base_generators(&g);
        assert_eq!(b.generators.len(), 1);
        assert_close(&monic(&b.generators[0].polynomial), &circle, 1e-12);
        assert!(b.reductions.iter().skip(2).all(|r| r.new_generators == 0));

        let on = support_membership(&b, &[0.7f64.cos(), 0.7f64.sin()], 1e-9).unwrap();
        assert!(on.in_support);
        let off = support_membership(&b, &[0.0, 0.0], 1e-9).unwrap();
        assert!(!off.in_support);
        assert!((off.residuals[0].abs() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn four_point_generators() {
        let f = discrete_functional(four_points());
        let g = build_gradations(f.as_ref(), 4).unwrap();
        let null = null_polynomials(&g, 2);
        let x2 = poly(&[(&[2, 0], q(1, 1)), (&[0, 0], q(-1, 1))]);
        let y2 = poly(&[(&[0, 2], q(1, 1)), (&[0, 0], q(-1, 1))]);
        assert_eq!(null, vec![x2.clone(), y2.clone()]);

        let b = base_generators(&g);
        let gens: Vec<_> = b.generators.iter().map(|g| g.polynomial.clone()).collect();
        assert_eq!(gens, vec![x2, y2]);
        for atom in four_points().atoms() {
            assert!(support_membership(&b, atom, 0.0).unwrap().in_support);
        }
        assert!(!support_membership(&b, &[q(0, 1), q(0, 1)], 1e-9).unwrap().in_support);
    }

    #[test]
    fn full_rank_has_no_generators() {
        let gg = product_functional::<Q>(vec![gaussian_functional(), gaussian_functional()]).unwrap();
        let g = build_gradations(gg.as_ref(), 3).unwrap();
        assert!(!rank_sequence(&g).has_deficiency);
        assert!(null_polynomials(&g, 2).is_empty());
        assert!(base_generators(&g).generators.is_empty());
    }

    #[test]
    fn generators_are_absorbed_upward() {
        let f = discrete_functional(four_points());
        let g = build_gradations(f.as_ref(), 4).unwrap();
        let b = base_generators(&g);
        for gen in &b.generators {
            for n in gen.degree..=4 {
                for beta in monomials(2, n - gen.degree) {
                    let shifted = gen.polynomial.mul(&Polynomial::monomial(beta, q(1, 1))).unwrap();
                    let top = shifted.top_homogeneous(n).unwrap();
                    assert!(g.level(n).gram.mul_vec(&top).iter().all(|v| *v == q(0, 1)));
                }
            }
        }
    }
}
