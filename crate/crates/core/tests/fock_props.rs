mod common;

use common::*;
use mvop_core::fock::assemble_fock;
use mvop_core::gradation::build_gradations;
use mvop_core::measures::{
    circle_functional, discrete_functional, gaussian_functional, product_functional,
    DiscreteMeasure,
};
use mvop_core::polynomial::monomials_up_to;
use proptest::prelude::*;

fn swapped(m: &DiscreteMeasure<Q>) -> DiscreteMeasure<Q> {
    DiscreteMeasure::new(
        m.atoms().iter().map(|a| vec![a[1].clone(), a[0].clone()]).collect(),
        m.weights().to_vec(),
    )
    .unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(20))]

    #[test]
    fn measure_born_data_is_consistent((_m, f) in rational_functional()) {
        let g = build_gradations(f.as_ref(), 3).unwrap();
        let fock = assemble_fock(&g, f.as_ref()).unwrap();
        prop_assert_eq!(fock.adjointness_residual(), 0.0);
        prop_assert_eq!(fock.symmetry_residual(), 0.0);
        let report = fock.check_commutation();
        prop_assert!(report.passed);
        prop_assert_eq!(report.max_residual(), 0.0);
        prop_assert_eq!(fock.x_commutator_residual(0, 1), 0.0);
        for alpha in monomials_up_to(2, 3) {
            prop_assert_eq!(fock.vacuum_moment(&alpha).unwrap(), f.moment(&alpha).unwrap());
        }
    }

    #[test]
    fn spectrum_ignores_variable_order(m in rational_measure()) {
        let a = discrete_functional(to_float(&m));
        let b = discrete_functional(to_float(&swapped(&m)));
        let fa = assemble_fock(&build_gradations(a.as_ref(), 3).unwrap(), a.as_ref()).unwrap();
        let fb = assemble_fock(&build_gradations(b.as_ref(), 3).unwrap(), b.as_ref()).unwrap();
        for n in 0..=3 {
            let (sa, sb) = (fa.nonzero_spectrum(n), fb.nonzero_spectrum(n));
            prop_assert_eq!(sa.len(), sb.len());
            for (x, y) in sa.iter().zip(&sb) {
                prop_assert!((x - y).abs() <= 1e-10 * x.abs().max(1.0));
            }
        }
    }

    #[test]
    fn float_moment_round_trip(m in rational_measure()) {
        let f = discrete_functional(to_float(&m));
        let fock = assemble_fock(&build_gradations(f.as_ref(), 4).unwrap(), f.as_ref()).unwrap();
        prop_assert!(fock.check_commutation().passed);
        for alpha in monomials_up_to(2, 4) {
            let (v, e) = (fock.vacuum_moment(&alpha).unwrap(), f.moment(&alpha).unwrap());
            prop_assert!((v - e).abs() <= 1e-9 * e.abs().max(1.0));
        }
    }
}

#[test]
fn continuous_fixtures_round_trip() {
    let fixtures = vec![
        ("circle", circle_functional::<f64>(false, 14).unwrap()),
        ("half circle", circle_functional::<f64>(true, 14).unwrap()),
        (
            "gaussian pair",
            product_functional::<f64>(vec![gaussian_functional(), gaussian_functional()]).unwrap(),
        ),
    ];
    for (name, f) in fixtures {
        let fock = assemble_fock(&build_gradations(f.as_ref(), 6).unwrap(), f.as_ref()).unwrap();
        let report = fock.check_commutation();
        assert!(report.passed, "{name}: {}", report.max_residual());
        assert!(fock.x_commutator_residual(0, 1) <= 1e-10, "{name}");
        assert!(fock.adjointness_residual() <= 1e-10, "{name}");
        assert!(fock.symmetry_residual() <= 1e-10, "{name}");
        for alpha in monomials_up_to(2, 6) {
            let (v, e) = (fock.vacuum_moment(&alpha).unwrap(), f.moment(&alpha).unwrap());
            assert!((v - e).abs() <= 1e-9, "{name} {alpha:?}: {v} vs {e}");
        }
    }
}

#[test]
fn three_dimensional_product_commutes() {
    let f = product_functional::<Q>(vec![
        gaussian_functional(),
        discrete_functional(
            DiscreteMeasure::new(vec![vec![q(-1, 1)], vec![q(1, 1)]], vec![q(1, 2), q(1, 2)]).unwrap(),
        ),
        gaussian_functional(),
    ])
    .unwrap();
    let fock = assemble_fock(&build_gradations(f.as_ref(), 3).unwrap(), f.as_ref()).unwrap();
    assert!(fock.check_commutation().passed);
    for alpha in monomials_up_to(3, 3) {
        assert_eq!(fock.vacuum_moment(&alpha).unwrap(), f.moment(&alpha).unwrap());
    }
}
