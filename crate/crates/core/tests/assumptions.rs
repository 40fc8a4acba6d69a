use lirf::assumptions::{
    assumption3_probes, check_assumption3, check_c_positive, default_grid, nondeg_dimfree, nondeg_scalar, sgoi_nondeg,
    Jet, Status,
};
use lirf::rmt::{d1pos_expr, theta_matrix, xi_matrix, SgoiDecomposition};
use lirf::structure_fn::{catalog, lookup, StructureFunction};
use nalgebra::{DMatrix, SymmetricEigen};
use proptest::prelude::*;

fn min_eig(m: DMatrix<f64>) -> f64 {
    SymmetricEigen::new(m).eigenvalues.min()
}

fn pick(i: usize) -> StructureFunction {
    let all = catalog();
    all[i % all.len()].clone()
}

/// Four-term dimension-free expression from D, D′, D″ written out by hand.
fn dimfree_by_hand(d: f64, d1: f64, d2: f64, d1_0: f64, d2_0: f64, r: f64) -> f64 {
    d - d1 * d1 * r / d1_0 + d2 * d2 * r * r / d2_0 + (d1 - d1_0).powi(2) / (2.0 * d2_0)
}

#[test]
fn dimfree_examples() {
    let e = (-1f64).exp();
    let want = dimfree_by_hand(1.0 - e, e, -e, 1.0, -1.0, 1.0);
    let got = nondeg_dimfree(&lookup("exp1").unwrap(), 1.0).unwrap();
    assert!(want > 0.0 && (got - want).abs() < 1e-12 * want, "{got} vs {want}");

    // r + (1 − e^{−r}) at r = 2
    let e2 = (-2f64).exp();
    let want = dimfree_by_hand(2.0 + 1.0 - e2, 1.0 + e2, -e2, 2.0, -1.0, 2.0);
    let got = nondeg_dimfree(&lookup("linear-plus-exp").unwrap(), 2.0).unwrap();
    assert!(want > 0.0 && (got - want).abs() < 1e-12 * want, "{got} vs {want}");
}

#[test]
fn c_positive_for_exp1_at_unit_radius() {
    let f = lookup("exp1").unwrap();
    let rep = check_c_positive(&f, &[1.0]);
    assert!(rep.holds, "{rep:?}");
}

#[test]
fn sgoi_boundary_examples() {
    assert!(sgoi_nondeg(2, 1.0, 0.0, 0.0));
    assert!(!sgoi_nondeg(3, -0.5, 0.0, 0.0));
}

/// Whenever the first Assumption-3 inequality holds for a Bernstein field,
/// the dimension-free condition and the second inequality hold as well.
#[test]
fn first_inequality_implies_the_others_for_bernstein() {
    for f in catalog().into_iter().filter(|f| f.is_bernstein()) {
        for r in default_grid() {
            let [first, second, _] = assumption3_probes(&f, r).unwrap();
            if first.margin() > 0.0 {
                assert!(second.margin() > 0.0, "{} r={r}: {second:?}", f.name);
                assert!(nondeg_dimfree(&f, r).unwrap() > 0.0, "{} r={r}", f.name);
            }
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn dimfree_dominates_every_dimension(i in 0usize..64, u in -3.0f64..3.0) {
        let f = pick(i);
        let r = 10f64.powf(u);
        let j = Jet::new(&f, r).unwrap();
        let free = nondeg_dimfree(&f, r).unwrap();
        if free > 1e-9 * j.d.abs() {
            for n in 1..=10 {
                prop_assert!(nondeg_scalar(&f, n, r).unwrap() > 0.0, "{} r={r} N={n}", f.name);
            }
        }
    }

    #[test]
    fn assumption3_implies_c_positive(i in 0usize..64, u in -3.0f64..3.0) {
        let f = pick(i);
        let r = 10f64.powf(u);
        if check_assumption3(&f, &[r]).status == Status::Holds {
            let rep = check_c_positive(&f, &[r]);
            prop_assert!(rep.holds, "{} r={r}: {rep:?}", f.name);
        }
    }

    #[test]
    fn sgoi_formula_matches_theta_spectrum(n in 2usize..7, d1 in -1.0f64..2.0, d2 in -2.0f64..2.0, d3 in -2.0f64..2.0) {
        let m = min_eig(theta_matrix(n, d1, d2, d3));
        prop_assume!(m.abs() > 1e-9);
        prop_assert_eq!(sgoi_nondeg(n, d1, d2, d3), m > 0.0);
    }

    #[test]
    fn d1pos_is_sufficient(n in 2usize..7, d1 in 1e-3f64..3.0, d2 in -2.0f64..2.0, d3 in -1.0f64..3.0) {
        let dec = SgoiDecomposition::default_for(d1, d2);
        prop_assert_eq!(dec.vartheta, 0.0);
        if d1pos_expr(n, d1, d2, d3, dec.varsigma) > 1e-9 {
            prop_assert!(min_eig(xi_matrix(n, d1, d2, d3, dec)) > 0.0);
        }
    }
}
