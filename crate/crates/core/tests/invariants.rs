use bdm_aniso::fields::{catalog, random_bdm_member, FieldSpec};
use bdm_aniso::geometry::{map_element, piola_transform, reference_element, AffineMap, ElementGeometry, ElementKind};
use bdm_aniso::interpolation::BdmInterpolator;
use bdm_aniso::polyspace::MultiIndex;
use bdm_aniso::VectorField;
use proptest::prelude::*;

fn kind_strategy() -> impl Strategy<Value = ElementKind> {
    prop_oneof![Just(ElementKind::Triangle), Just(ElementKind::Tet), Just(ElementKind::Prism)]
}

/// Well-conditioned affine maps: diag(h) perturbed by a bounded shear.
fn map_strategy(kind: ElementKind) -> impl Strategy<Value = AffineMap> {
    let d = kind.dim();
    (
        prop::collection::vec(0.05f64..2.0, d),
        prop::collection::vec(-0.3f64..0.3, d * d),
        prop::collection::vec(-1.0f64..1.0, d),
    )
        .prop_map(move |(h, shear, shift)| {
            let rows: Vec<Vec<f64>> = (0..d)
                .map(|i| (0..d).map(|j| if i == j { h[i] } else { shear[i * d + j] * h[j] }).collect())
                .collect();
            AffineMap::new(d, &rows, &shift).expect("nonsingular")
        })
        .prop_filter("keep det away from zero", |m| {
            let cols = m.column_norms();
            m.det().abs() > 0.2 * cols.iter().product::<f64>()
        })
}

fn element_strategy() -> impl Strategy<Value = (ElementKind, AffineMap)> {
    kind_strategy().prop_flat_map(|kind| map_strategy(kind).prop_map(move |m| (kind, m)))
}

fn field_strategy() -> impl Strategy<Value = FieldSpec> {
    prop_oneof![
        Just(FieldSpec::Sin3),
        Just(FieldSpec::X1Only),
        (0.05f64..2.0).prop_map(|eps| FieldSpec::Layer { eps }),
    ]
}

fn rel_close(a: &[f64], b: &[f64], tol: f64) -> bool {
    let scale = a.iter().chain(b).fold(1e-300f64, |m, x| m.max(x.abs()));
    a.iter().zip(b).all(|(x, y)| (x - y).abs() <= tol * scale)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn interpolation_is_a_projection((kind, map) in element_strategy(), spec in field_strategy(), k in 1u32..=2) {
        let el = map_element(&reference_element(kind), &map).unwrap();
        let interp = BdmInterpolator::new(&el, k).unwrap();
        let v = catalog(&spec, kind.dim()).unwrap();
        let iv = interp.interpolate(&v).unwrap();
        let iiv = interp.interpolate(&iv).unwrap();
        prop_assert!(rel_close(iv.coefficients(), iiv.coefficients(), 1e-9));
    }

    #[test]
    fn dof_values_are_preserved((kind, map) in element_strategy(), spec in field_strategy(), k in 1u32..=2) {
        let el = map_element(&reference_element(kind), &map).unwrap();
        let interp = BdmInterpolator::new(&el, k).unwrap();
        let v = catalog(&spec, kind.dim()).unwrap();
        let iv = interp.interpolate(&v).unwrap();
        let a = interp.dof_values(&v).unwrap();
        let b = interp.dof_values(&iv).unwrap();
        prop_assert!(rel_close(&a, &b, 1e-9), "{a:?} vs {b:?}");
    }

    #[test]
    fn piola_equivariance((kind, map) in element_strategy(), spec in field_strategy(), k in 1u32..=2) {
        let reference = ElementGeometry::reference(kind);
        let el = map_element(&reference_element(kind), &map).unwrap();
        let vhat = catalog(&spec, kind.dim()).unwrap();
        let moved = BdmInterpolator::new(&reference, k).unwrap().interpolate(&vhat).unwrap().piola_transport(&el).unwrap();
        let direct = BdmInterpolator::new(&el, k).unwrap().interpolate(&piola_transform(&vhat, &map)).unwrap();
        prop_assert!(rel_close(moved.coefficients(), direct.coefficients(), 1e-9));
        let x = el.to_physical(&[0.2, 0.1, 0.3][..kind.dim()]);
        prop_assert!(rel_close(&moved.eval_vec(&x), &direct.eval_vec(&x), 1e-9));
    }

    #[test]
    fn members_are_reproduced((kind, map) in element_strategy(), seed in any::<u64>(), k in 1u32..=3) {
        let el = map_element(&reference_element(kind), &map).unwrap();
        let p = random_bdm_member(kind, k as i32, seed).unwrap();
        let v = piola_transform(&p, &map);
        let iv = BdmInterpolator::new(&el, k).unwrap().interpolate(&v).unwrap();
        for xhat in [[0.1, 0.2, 0.3], [0.5, 0.25, 0.9], [0.0, 0.0, 0.0]] {
            let x = el.to_physical(&xhat[..kind.dim()]);
            prop_assert!(rel_close(&iv.eval_vec(&x), &v.eval_vec(&x), 1e-8));
        }
    }

    #[test]
    fn interpolation_is_linear(kind in kind_strategy(), a in -3.0f64..3.0, eps in 0.1f64..1.0) {
        let el = ElementGeometry::reference(kind);
        let interp = BdmInterpolator::new(&el, 2).unwrap();
        let u = catalog(&FieldSpec::Sin3, kind.dim()).unwrap();
        let w = catalog(&FieldSpec::Layer { eps }, kind.dim()).unwrap();
        let combo = bdm_aniso::field::FnField::new(kind.dim(), |x: &[f64], out: &mut [f64]| {
            let (uu, ww) = (u.eval_vec(x), w.eval_vec(x));
            for i in 0..out.len() {
                out[i] = a * uu[i] + ww[i];
            }
        });
        let ic = interp.interpolate(&combo).unwrap();
        let (iu, iw) = (interp.interpolate(&u).unwrap(), interp.interpolate(&w).unwrap());
        let expect: Vec<f64> = iu.coefficients().iter().zip(iw.coefficients()).map(|(x, y)| a * x + y).collect();
        prop_assert!(rel_close(ic.coefficients(), &expect, 1e-10));
    }

    #[test]
    fn mixed_partials_commute(spec in field_strategy(), x in prop::array::uniform3(0.0f64..1.0), i in 0usize..3, j in 0usize..3, c in 0usize..3) {
        let f = catalog(&spec, 3).unwrap();
        let mut ij = [0u32; 3];
        ij[i] += 1;
        ij[j] += 1;
        // D_i D_j through the symbolic derivative chain against the combined partial
        let chain = f.component(c).derivative(i).derivative(j).value(&x);
        let direct = f.partial(c, &MultiIndex::new(ij.to_vec()), &x).unwrap();
        let swapped = f.component(c).derivative(j).derivative(i).value(&x);
        prop_assert!((chain - direct).abs() <= 1e-12 * direct.abs().max(1.0));
        prop_assert!((chain - swapped).abs() <= 1e-12 * chain.abs().max(1.0));
    }
}
