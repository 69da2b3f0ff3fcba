mod common;

use num_bigint::BigInt;
use num_rational::BigRational;
use proptest::prelude::*;
use twistcohom::foliation::{positivity_gate, BasicTwist, LieAlgebraModel, MappingTorusModel};
use twistcohom::identities::{adjointness, bochner, d_squared, dirac_square, lie_derivative_formula, weitzenbock};
use twistcohom::report::euler_sum;
use twistcohom::{Error, TrigPoly};

fn cat_map() -> MappingTorusModel {
    MappingTorusModel::from_matrix([[2, 1], [1, 1]], 8).unwrap()
}

#[test]
fn accepted_matrices_have_reciprocal_eigenvalues() {
    for a in [[[2, 1], [1, 1]], [[3, 1], [2, 1]], [[5, 2], [2, 1]], [[1, 1], [1, 2]]] {
        let m = MappingTorusModel::from_matrix(a, 4).unwrap();
        let (l1, l2) = m.eigenvalues().unwrap();
        assert!(l1 > 1.0 && l2 < 1.0 && l2 > 0.0);
        assert!((l1 * l2 - 1.0).abs() < 1e-14);
        assert!((m.leaf_rate - l2.ln()).abs() < 1e-14);
    }
    assert!(matches!(
        MappingTorusModel::from_matrix([[1, 1], [0, 1]], 4),
        Err(Error::TraceTooSmall(2))
    ));
}

#[test]
fn operator_identities_on_the_suspension() {
    let m = cat_map();
    for (c, f) in [(0.3, None), (-0.5, Some(TrigPoly::sin(&[1], 0.2)))] {
        let mut twist = BasicTwist::new(c);
        if let Some(f) = f {
            twist = twist.with_potential(f);
        }
        let k = m.calculus(&twist).unwrap();
        assert!(d_squared(&k, 3) <= 1e-12);
        assert!(adjointness(&k, 3) <= 1e-12);
        assert!(dirac_square(&k, 3) <= 1e-10);
        assert!(weitzenbock(&k, 3) <= 1e-8);
        assert!(lie_derivative_formula(&k, 3) <= 1e-10);
        assert!(bochner(&k, 3, 20, 1, 4).residual <= 1e-8);
    }
}

#[test]
fn bochner_form_is_not_positive_on_hyperbolic_suspensions() {
    let m = cat_map();
    for c in [0.0, 0.3, -1.0] {
        let r = bochner(&m.calculus(&BasicTwist::new(c)).unwrap(), 3, 10, 2, 4);
        assert!(r.min_eigenvalues[0] < 0.0);
        assert!(!r.vanishing_verdict);
    }
}

#[test]
fn duality_between_top_and_bottom_degrees() {
    let m = cat_map();
    let kappa = m.leaf_rate;
    for c in m.scan_grid().into_iter().chain([0.0, kappa]) {
        let top = m.basic_twisted_betti(&BasicTwist::new(c), 1e-8).unwrap().dims[2];
        let bottom = m.basic_twisted_betti(&BasicTwist::new(kappa - c), 1e-8).unwrap().dims[0];
        assert_eq!(top, bottom, "c = {c}");
    }
}

#[test]
fn potentials_do_not_change_the_scan() {
    let m = cat_map();
    let f = TrigPoly::cos(&[1], 0.3);
    for c in [0.0, m.leaf_rate, 1.0, -2.0] {
        let plain = m.basic_twisted_betti(&BasicTwist::new(c), 1e-8).unwrap().dims;
        let gauged = m.basic_twisted_betti(&BasicTwist::new(c).with_potential(f.clone()), 1e-8);
        match gauged {
            Ok(s) => assert_eq!(s.dims, plain, "c = {c}"),
            Err(Error::CutoffInsufficient { radius, .. }) => {
                let wide = MappingTorusModel::from_matrix([[2, 1], [1, 1]], radius.ceil() as usize).unwrap();
                let s = wide
                    .basic_twisted_betti(&BasicTwist::new(c).with_potential(f.clone()), 1e-8)
                    .unwrap();
                assert_eq!(s.dims, plain, "c = {c}");
            }
            Err(e) => panic!("{e}"),
        }
    }
}

#[test]
fn isometric_flow_is_flat() {
    let m = MappingTorusModel::from_rates(vec![0.0], 0.0, 4).unwrap();
    let r = m.transverse_curvature(&[0.0, 1.0]).unwrap();
    assert!(r.sectional.iter().all(|e| e.value == 0.0));
    assert!(r.operator_eigenvalues.iter().all(|&e| e == 0.0));
    assert!(!positivity_gate(&r).verdict);
}

#[test]
fn lie_algebra_files() {
    let text = "# o(3)\n0 1 2 1\n1 2 0 1\n2 0 1 1\n";
    let m = LieAlgebraModel::parse(text).unwrap();
    assert_eq!(m, LieAlgebraModel::so3());
    assert!(LieAlgebraModel::parse("0 1 2 x\n").is_err());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn euler_sum_is_zero_for_every_class(c in -3.0f64..3.0) {
        let dims = cat_map().basic_twisted_betti(&BasicTwist::new(c), 1e-8).unwrap().dims;
        prop_assert_eq!(euler_sum(&dims), 0);
        prop_assert_eq!(dims, common::suspension_dims(&cat_map().rates, c, 8, 1e-9));
    }

    #[test]
    fn scaled_o3_curvature_is_quartic(n in 1i64..6, d in 1i64..6) {
        let s = BigRational::new(BigInt::from(n), BigInt::from(d));
        let r = LieAlgebraModel::so3().scaled(&s).biinvariant_curvature().unwrap();
        let expected = &s * &s / BigRational::from_integer(BigInt::from(4));
        let text = twistcohom::field::format_rational(&expected);
        prop_assert!(r.sectional.iter().all(|e| e.exact.as_deref() == Some(text.as_str())));
        prop_assert!(positivity_gate(&r).verdict);
    }

    #[test]
    fn curvature_ignores_the_twist(c in -5.0f64..5.0) {
        let r = MappingTorusModel::from_matrix([[3, 1], [2, 1]], 4).unwrap().transverse_curvature(&[c]).unwrap();
        prop_assert!(r.twist_residuals[0].residual <= 1e-12);
    }
}
