mod common;

use common::FactorKind;
use proptest::prelude::*;
use sasaki_herm_core::hermitian::{HermitianParams, ProductHermitianModel, ProductVector};
use sasaki_herm_core::tensor::{Endomorphism, TangentVector};

fn factor_kind() -> impl Strategy<Value = FactorKind> {
    prop_oneof![
        Just(FactorKind::Round),
        (-3.0..9.0f64).prop_map(FactorKind::SpaceForm),
        (0.3..3.0f64).prop_map(FactorKind::Deformed),
    ]
}

fn nonzero_b() -> impl Strategy<Value = f64> {
    (0.1..3.0f64, any::<bool>()).prop_map(|(b, neg)| if neg { -b } else { b })
}

fn model() -> impl Strategy<Value = ProductHermitianModel> {
    (1usize..=3, 1usize..=3, -3.0..3.0f64, nonzero_b(), factor_kind(), factor_kind()).prop_map(|(p, q, a, b, m, mp)| {
        ProductHermitianModel::build(&m.build(p), &mp.build(q), HermitianParams::new(a, b).unwrap()).unwrap()
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn product_structure_is_hermitian(model in model()) {
        let r = model.residuals().unwrap();
        prop_assert!(r.j_squared < 1e-12 && r.compatibility < 1e-11, "{r:?}");
        prop_assert!(r.curvature_symmetries < 1e-10 && r.ricci_trace < 1e-10, "{r:?}");
        prop_assert!(model.check_integrability() < 1e-12);
    }

    #[test]
    fn never_kahler(model in model()) {
        let p = model.params();
        let bound = (p.a() * p.a() + p.b() * p.b()).min(1.0);
        prop_assert!(model.check_not_kahler() >= bound - 1e-12);
    }

    #[test]
    fn reeb_ricci_value(model in model()) {
        let xi = model.xi_index();
        let a = model.params().a();
        let expected = 2.0 * model.p() as f64 + 2.0 * a * a * model.q() as f64;
        prop_assert!((model.ricci().get(xi, xi) - expected).abs() < 1e-10);
    }

    #[test]
    fn adapted_basis_is_orthonormal(model in model()) {
        let basis = model.adapted_orthonormal_basis();
        prop_assert_eq!(basis.len(), model.dim());
        for (i, u) in basis.iter().enumerate() {
            for (j, v) in basis.iter().enumerate() {
                let t = if i == j { 1.0 } else { 0.0 };
                prop_assert!((model.metric().eval(u, v) - t).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn ricci_star_matches_definition_for_round_factors(p in 1usize..=3, q in 1usize..=3, a in -2.0..2.0f64, b in nonzero_b()) {
        let model = ProductHermitianModel::build(&FactorKind::Round.build(p), &FactorKind::Round.build(q), HermitianParams::new(a, b).unwrap()).unwrap();
        let definitional = model.ricci_star_from_curvature().unwrap();
        prop_assert!(definitional.max_abs_diff(model.ricci_star()) < 1e-10);
    }
}

#[test]
fn complex_structure_on_reeb_fields() {
    let s3 = FactorKind::Round.build(1);
    let (a, b) = (0.5, 2.0);
    let model = ProductHermitianModel::build(&s3, &s3, HermitianParams::new(a, b).unwrap()).unwrap();
    let j = model.complex_structure();
    // ξ' = aξ + bJ̄ξ
    let xi = TangentVector::basis(6, model.xi_index());
    let xi_prime = TangentVector::basis(6, model.xi_prime_index());
    let jxi = j.apply(&xi);
    for k in 0..6 {
        let rebuilt = a * xi.components()[k] + b * jxi.components()[k];
        assert!((rebuilt - xi_prime.components()[k]).abs() < 1e-14);
    }
    assert!(j.compose(j).plus(&Endomorphism::identity(6)).max_abs() < 1e-14);
}

#[test]
fn product_vector_round_trip() {
    let v = ProductVector::new(
        TangentVector::new(vec![1.0, 2.0, 3.0]),
        TangentVector::new(vec![4.0, 5.0, 6.0, 7.0, 8.0]),
    );
    let flat = v.to_flat();
    assert_eq!(flat.components(), &[1.0, 2.0, 3.0, 4.0, 5.0, 6.0, 7.0, 8.0]);
    assert_eq!(ProductVector::from_flat(&flat, 3), v);
}

#[test]
fn rejects_degenerate_parameters() {
    assert!(HermitianParams::new(0.3, 0.0).is_err());
    assert!(HermitianParams::new(f64::NAN, 1.0).is_err());
    assert!(HermitianParams::new(0.0, f64::INFINITY).is_err());
}
