use proptest::prelude::*;
use wavelab_core::func::SmoothFn;
use wavelab_core::model::Model;
use wavelab_core::numerics::Matrix;
use wavelab_core::triple::{
    classify_domain, green_residual, mock_l0star, vishik_decompose,
    DomainElement, DOMAIN_TOL,
};

/// Random SPD matrix with a random splitting `K ⊕ V`.
fn mock_model() -> impl Strategy<Value = Model<f64>> {
    (2usize..6).prop_flat_map(|n| {
        (
            Just(n),
            1..n,
            prop::collection::vec(-1.0f64..1.0, n * n),
            prop::collection::vec(-1.0f64..1.0, n * n),
        )
            .prop_map(|(n, k, a, b)| {
                let a = Matrix::from_fn(n, n, |i, j| a[i * n + j]);
                let mut l = a.tr_mul(&a);
                for i in 0..n {
                    l[(i, i)] += 0.5;
                }
                // perturbed identity keeps the combined basis well conditioned
                let basis = Matrix::from_fn(n, n, |i, j| if i == j { 1.0 } else { 0.3 * b[i * n + j] });
                let kb = basis.select_cols(&(0..k).collect::<Vec<_>>());
                let vb = basis.select_cols(&(k..n).collect::<Vec<_>>());
                Model::mock(l, kb, vb).unwrap()
            })
    })
}

fn mock_with_pair() -> impl Strategy<Value = (Model<f64>, Vec<f64>, Vec<f64>)> {
    mock_model().prop_flat_map(|m| {
        let n = m.n_modes();
        (
            Just(m),
            prop::collection::vec(-2.0f64..2.0, n),
            prop::collection::vec(-2.0f64..2.0, n),
        )
    })
}

fn poly() -> impl Strategy<Value = DomainElement<f64>> {
    prop::collection::vec(-3.0f64..3.0, 1..7).prop_map(DomainElement::poly)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(100))]

    #[test]
    fn green_identity_mock((m, u, v) in mock_with_pair()) {
        let r = green_residual(&m, &DomainElement::Ambient(u), &DomainElement::Ambient(v)).unwrap();
        prop_assert!(r <= 1e-12, "residual {r}");
    }

    #[test]
    fn green_identity_interval(u in poly(), v in poly()) {
        let m = Model::<f64>::interval(8).unwrap();
        let r = green_residual(&m, &u, &v).unwrap();
        prop_assert!(r <= 1e-8, "residual {r}");
    }

    #[test]
    fn mock_decomposition_reconstructs_and_is_idempotent((m, u, _v) in mock_with_pair()) {
        let c = vishik_decompose(&m, &DomainElement::Ambient(u.clone())).unwrap();
        let back = m.to_ambient(&c.reconstruct()).unwrap();
        for (a, b) in back.iter().zip(&u) {
            prop_assert!((a - b).abs() < 1e-10);
        }
        let again = vishik_decompose(&m, &DomainElement::Ambient(back)).unwrap();
        for (a, b) in again.g.iter().zip(&c.g) {
            prop_assert!((a - b).abs() < 1e-10);
        }
        for (a, b) in again.h.k_part.iter().zip(&c.h.k_part) {
            prop_assert!((a - b).abs() < 1e-10);
        }
        prop_assert!(m.norm(&again.y0.sub(&c.y0)).unwrap() < 1e-10);
    }

    #[test]
    fn mock_l0star_annihilates_k((m, u, _v) in mock_with_pair()) {
        let kappa = &u[..m.k_dim()];
        let h = m.k_basis().unwrap().mul_vec(kappa);
        let l = mock_l0star(&m, &h).unwrap();
        prop_assert!(l.iter().all(|v| v.abs() < 1e-12));
    }

    #[test]
    fn interval_decomposition_properties(y in poly()) {
        let m = Model::<f64>::interval(256).unwrap();
        let c = vishik_decompose(&m, &y).unwrap();
        let DomainElement::Profile(f) = &y else { unreachable!() };
        let y_state = m.project_profile(f).unwrap();
        prop_assert!(m.norm(&c.reconstruct().sub(&y_state)).unwrap() < 1e-10);
        let y0 = c.y0_profile.clone().unwrap();
        for x in [0.0, 1.0] {
            let d = y0.derivs(x, 1);
            prop_assert!(d[0].abs() < 1e-10 && d[1].abs() < 1e-10);
        }
        // re-decomposing y₀ + w + h as a closed form returns the same pieces
        let again = vishik_decompose(&m, &DomainElement::Profile(SmoothFn::Sum(vec![
            y0, c.w_profile.clone().unwrap(), SmoothFn::Poly(vec![c.h.k_part[0], c.h.k_part[1] - c.h.k_part[0]]),
        ]))).unwrap();
        for (a, b) in again.g.iter().zip(&c.g) {
            prop_assert!((a - b).abs() < 1e-10);
        }
        let flags = classify_domain(&m, &y, DOMAIN_TOL).unwrap();
        prop_assert_eq!(flags.in_dom_l, m.k_norm(&c.h.k_part) <= DOMAIN_TOL);
    }
}
