mod common;

use common::*;
use mvop_core::fock::assemble_fock;
use mvop_core::gradation::build_gradations;
use mvop_core::marginal::{jacobi_1d, marginal_functional, marginal_omega, MarginalSpec};
use mvop_core::measures::{
    circle_functional, discrete_functional, gaussian_functional, jacobi_moments,
    jacobi_to_moments, product_functional, Functional, JacobiPair1D, MomentFunctional,
};
use mvop_core::nullideal::{base_generators, null_polynomials, rank_sequence, support_membership};
use mvop_core::polynomial::{monomials, monomials_up_to, MultiIndex, Polynomial};
use mvop_core::{Scalar, Tolerances};
use nalgebra::DMatrix;
use proptest::prelude::*;

fn double_factorial(n: i64) -> f64 {
    if n <= 0 {
        1.0
    } else {
        (1..=n).rev().step_by(2).map(|k| k as f64).product()
    }
}

/// Numerical rank of the moment matrix over monomials of degree `≤ n`,
/// after scaling to unit diagonal.
fn brute_force_rank(f: &dyn MomentFunctional<f64>, n: usize) -> usize {
    let basis = monomials_up_to(f.dimension(), n);
    let k = basis.len();
    let h = DMatrix::from_fn(k, k, |r, c| f.moment(&basis[r].plus(&basis[c])).unwrap());
    let scaled = DMatrix::from_fn(k, k, |r, c| h[(r, c)] / (h[(r, r)] * h[(c, c)]).sqrt());
    let sv = scaled.singular_values();
    let top = sv.max();
    sv.iter().filter(|&&s| s > 1e-9 * top).count()
}

fn cylinder() -> Functional<f64> {
    product_functional(vec![circle_functional(false, 12).unwrap(), gaussian_functional()]).unwrap()
}

#[test]
fn sine_curve_matches_quadrature() {
    let rule = gauss_hermite(60);
    let quad = |a: i32, b: i32| rule.iter().map(|(x, w)| w * x.powi(a) * x.sin().powi(b)).sum::<f64>();
    assert!((quad(0, 0) - 1.0).abs() < 1e-13);
    assert!((quad(2, 0) - 1.0).abs() < 1e-12);
    let expected = (1.0 - (-2f64).exp()) / 2.0;
    assert!((quad(0, 2) - expected).abs() < 1e-13);
    let t = sine_curve_table(8);
    assert!((t.moment(&mi(&[0, 2])).unwrap() - expected).abs() < 1e-14);
    for k in monomials_up_to(2, 8) {
        let (a, b) = (k.entries()[0] as i32, k.entries()[1] as i32);
        assert!((t.moment(&k).unwrap() - quad(a, b)).abs() < 1e-10, "{k:?}");
    }
}

#[test]
fn every_backend_is_normalized() {
    let backends: Vec<Functional<f64>> = vec![
        circle_functional(false, 8).unwrap(),
        circle_functional(true, 8).unwrap(),
        gaussian_functional(),
        discrete_functional(to_float(&four_points())),
        cylinder(),
        sine_curve_table(4),
        jacobi_to_moments(&JacobiPair1D::new(vec![0.5, 0.25], vec![0.0, 0.0]).unwrap(), 4).unwrap(),
    ];
    for f in backends {
        let v = f.moment(&MultiIndex::zero(f.dimension())).unwrap();
        assert!((v - 1.0).abs() < 1e-14, "{}", f.backend());
    }
    assert!((circle_functional::<f64>(true, 4).unwrap().moment(&mi(&[0, 1])).unwrap()
        - 2.0 / std::f64::consts::PI)
        .abs()
        < 1e-14);
}

proptest! {
    #[test]
    fn circle_even_moments_closed_form(a in 0i64..=6, b in 0i64..=6) {
        prop_assume!(a + b <= 6);
        let c = circle_functional::<f64>(false, 14).unwrap();
        let v = c.moment(&mi(&[2 * a as u32, 2 * b as u32])).unwrap();
        let e = double_factorial(2 * a - 1) * double_factorial(2 * b - 1) / double_factorial(2 * a + 2 * b);
        prop_assert!((v - e).abs() <= 1e-12);
        let odd = c.moment(&mi(&[2 * a as u32 + 1, 2 * b as u32])).unwrap();
        prop_assert!(odd.abs() <= 1e-12);
    }

    #[test]
    fn products_factor(a in 0u32..6, b in 0u32..6, (_m, f) in rational_functional()) {
        let x = marginal_functional(&MarginalSpec::new(f.clone(), vec![0]).unwrap());
        let g = gaussian_functional::<Q>();
        let p = product_functional(vec![x.clone(), g.clone()]).unwrap();
        let v = p.moment(&mi(&[a, b])).unwrap();
        prop_assert_eq!(v, x.moment(&mi(&[a])).unwrap() * g.moment(&mi(&[b])).unwrap());
    }

    #[test]
    fn atoms_lie_on_the_null_variety((m, f) in rational_functional()) {
        let g = build_gradations(f.as_ref(), m.len()).unwrap();
        let b = base_generators(&g);
        for atom in m.atoms() {
            prop_assert!(support_membership(&b, atom, 1e-9).unwrap().in_support);
        }
        let rs = rank_sequence(&g);
        prop_assert_eq!(rs.has_deficiency, rs.first_deficient.is_some());
        if let Some(n) = rs.first_deficient {
            prop_assert!(!null_polynomials(&g, n).is_empty());
        }
        for gen in &b.generators {
            prop_assert_eq!(g.inner(&gen.polynomial, &gen.polynomial).unwrap(), q(0, 1));
            for n in gen.degree..=m.len() {
                for beta in monomials(2, n - gen.degree) {
                    let top = gen.polynomial.mul(&Polynomial::monomial(beta, q(1, 1))).unwrap().top_homogeneous(n).unwrap();
                    prop_assert!(g.level(n).gram.mul_vec(&top).iter().all(|v| *v == q(0, 1)));
                }
            }
        }
    }

    #[test]
    fn jacobi_round_trip(omega in prop::collection::vec((1i64..=9, 1i64..=4), 5), alpha in prop::collection::vec(-4i64..=4, 6)) {
        let omega: Vec<Q> = omega.into_iter().map(|(a, b)| q(a, b)).collect();
        let alpha: Vec<Q> = alpha.into_iter().map(|a| q(a, 2)).collect();
        let j = JacobiPair1D::new(omega.clone(), alpha.clone()).unwrap();
        let f = jacobi_to_moments(&j, 10).unwrap();
        let back = jacobi_1d(f.as_ref(), 5, &Tolerances::default()).unwrap();
        prop_assert_eq!(&back.omega, &omega);
        prop_assert_eq!(&back.alpha[..5], &alpha[..5]);
        let m = jacobi_moments(&back, 9).unwrap();
        for (k, v) in m.iter().enumerate() {
            prop_assert_eq!(v, &f.moment(&mi(&[k as u32])).unwrap());
        }
    }
}

#[test]
fn pushforward_curves_show_their_equation() {
    let circle = Polynomial::from_terms(2, [(mi(&[2, 0]), 1.0), (mi(&[0, 2]), 1.0), (mi(&[0, 0]), -1.0)]).unwrap();
    for half in [false, true] {
        let c = circle_functional::<f64>(half, 12).unwrap();
        let g = build_gradations(c.as_ref(), 5).unwrap();
        let rs = rank_sequence(&g);
        assert_eq!(rs.first_deficient, Some(2));
        let coords = g.level_coordinates(&circle, 2).unwrap();
        assert!(g.inner(&circle, &circle).unwrap().abs() < 1e-12);
        let null = null_polynomials(&g, 2);
        assert_eq!(null.len(), 1);
        let top = null[0].top_homogeneous(2).unwrap();
        let scaled = null[0].scale(&(1.0 / top[0]));
        let d = scaled.sub(&circle).unwrap();
        assert!(d.terms().all(|(_, v)| v.abs() < 1e-9), "{d:?}");
        assert_eq!(coords.len(), 3);
        for n in 1..=5 {
            assert_eq!(rs.ranks[n], 2);
        }
    }

    let f = discrete_functional(four_points());
    let g = build_gradations(f.as_ref(), 4).unwrap();
    let span: Vec<_> = null_polynomials(&g, 2);
    // x² − y² = (x² − 1) − (y² − 1)
    let target = Polynomial::from_terms(2, [(mi(&[2, 0]), q(1, 1)), (mi(&[0, 2]), q(-1, 1))]).unwrap();
    assert_eq!(span[0].sub(&span[1]).unwrap(), target);
}

#[test]
fn cylinder_ranks_agree_with_brute_force() {
    let f = cylinder();
    let g = build_gradations(f.as_ref(), 5).unwrap();
    let rs = rank_sequence(&g);
    let mut previous = 0;
    for n in 0..=4 {
        let cumulative = brute_force_rank(f.as_ref(), n);
        assert_eq!(rs.ranks[n], cumulative - previous, "degree {n}");
        assert_eq!(rs.ranks[n], 2 * n + 1);
        previous = cumulative;
    }
    let ratios: Vec<f64> = (2..=5).map(|n| rs.ranks[n] as f64 / rs.dimensions[n] as f64).collect();
    assert!(ratios.windows(2).all(|w| w[1] < w[0]), "{ratios:?}");
}

#[test]
fn full_rank_controls() {
    let gg = product_functional::<f64>(vec![gaussian_functional(), gaussian_functional()]).unwrap();
    let t = sine_curve_table(8);
    for f in [gg, t] {
        let g = build_gradations(f.as_ref(), 4).unwrap();
        let rs = rank_sequence(&g);
        assert!(!rs.has_deficiency, "{}", f.backend());
        for n in 0..=4 {
            assert!(null_polynomials(&g, n).is_empty());
            let smallest = g.level(n).split.min_value.to_f64();
            assert!(smallest > 10.0 * 1e-10, "{} degree {n}: {smallest}", f.backend());
        }
        assert!(base_generators(&g).generators.is_empty());
    }
}

#[test]
fn marginal_omega_is_product_of_jacobi_omegas() {
    let fixtures: Vec<(Functional<f64>, usize)> = vec![
        (circle_functional(false, 16).unwrap(), 0),
        (circle_functional(true, 16).unwrap(), 1),
        (discrete_functional(to_float(&skew_points())), 0),
        (cylinder(), 2),
    ];
    for (f, coord) in fixtures {
        let spec = MarginalSpec::new(f, vec![coord]).unwrap();
        let m = marginal_functional(&spec);
        let j = jacobi_1d(m.as_ref(), 5, &Tolerances::default()).unwrap();
        let mut prod = 1.0;
        for n in 1..=5 {
            prod *= j.omega[n - 1];
            let om = marginal_omega(&spec, n, &Tolerances::default()).unwrap();
            assert!((om[(0, 0)] - prod).abs() <= 1e-10, "n={n}: {} vs {prod}", om[(0, 0)]);
        }
    }
}

#[test]
fn arcsine_leading_coefficients() {
    let c = circle_functional::<f64>(false, 18).unwrap();
    let m = marginal_functional(&MarginalSpec::new(c, vec![0]).unwrap());
    let j = jacobi_1d(m.as_ref(), 8, &Tolerances::default()).unwrap();
    let monic = j.monic_polynomials(8).unwrap();
    // cos(n+1)θ = 2 cos θ cos nθ − cos(n−1)θ in powers of x = cos θ
    let mut cheb: Vec<Vec<f64>> = vec![vec![1.0], vec![0.0, 1.0]];
    for n in 1..8 {
        let mut next = vec![0.0; n + 2];
        for (k, v) in cheb[n].iter().enumerate() {
            next[k + 1] += 2.0 * v;
        }
        for (k, v) in cheb[n - 1].iter().enumerate() {
            next[k] -= v;
        }
        cheb.push(next);
    }
    for n in 1..=8 {
        let scale = 2f64.powi(n as i32 - 1);
        assert_eq!(monic[n].len(), n + 1);
        for (a, b) in monic[n].iter().zip(&cheb[n]) {
            assert!((a * scale - b).abs() <= 1e-10, "n={n}: {:?} vs {:?}", monic[n], cheb[n]);
        }
    }
    let arcsine = JacobiPair1D::new(vec![0.5, 0.25, 0.25, 0.25, 0.25, 0.25], vec![0.0; 7]).unwrap();
    let moments = jacobi_moments(&arcsine, 12).unwrap();
    for k in 0..=6u32 {
        let binom: f64 = (0..k).map(|j| (2 * k - j) as f64 / (j + 1) as f64).product();
        assert!((moments[2 * k as usize] - binom / 4f64.powi(k as i32)).abs() <= 1e-10);
        assert!((moments[2 * k as usize] - m.moment(&mi(&[2 * k])).unwrap()).abs() <= 1e-10);
    }
}

#[test]
fn identity_marginal_is_the_source() {
    let f = discrete_functional(skew_points());
    let m = marginal_functional(&MarginalSpec::new(f.clone(), vec![0, 1]).unwrap());
    for k in monomials_up_to(2, 6) {
        assert_eq!(m.moment(&k).unwrap(), f.moment(&k).unwrap());
    }
    let c = circle_functional::<f64>(false, 12).unwrap();
    let fock = assemble_fock(&build_gradations(c.as_ref(), 4).unwrap(), c.as_ref()).unwrap();
    assert!((fock.vacuum_moment(&mi(&[2, 2])).unwrap() - 0.125).abs() < 1e-12);
}
