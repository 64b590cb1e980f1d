//! The contravariant Piola map carries BDM interpolants between elements:
//! interpolating the transported field gives the transported interpolant.

use bdm_aniso::fields::{catalog, FieldSpec};
use bdm_aniso::geometry::{map_element, piola_transform, reference_element, AffineMap, ElementGeometry, ElementKind};
use bdm_aniso::interpolation::interpolate;
use bdm_aniso::VectorField;

fn main() -> bdm_aniso::Result<()> {
    let ref_el = ElementGeometry::reference(ElementKind::Tet);
    let map = AffineMap::new(3, &[vec![2.0, 0.3, 0.0], vec![0.0, 0.5, 0.1], vec![0.0, 0.0, 0.05]], &[1.0, -1.0, 0.5])?;
    let el = map_element(&reference_element(ElementKind::Tet), &map)?;

    let vhat = catalog(&FieldSpec::Sin3, 3)?;
    let ivhat = interpolate(&vhat, &ref_el, 2)?;
    let transported = ivhat.piola_transport(&el)?;
    let iv = interpolate(&piola_transform(&vhat, &map), &el, 2)?;

    let mut worst: f64 = 0.0;
    for xhat in [[0.1, 0.1, 0.1], [0.5, 0.2, 0.1], [0.0, 0.0, 0.9]] {
        let x = el.to_physical(&xhat);
        for (a, b) in iv.eval_vec(&x).iter().zip(transported.eval_vec(&x)) {
            worst = worst.max((a - b).abs());
        }
    }
    println!("max |I(Pv) - P(Iv)| at sample points: {worst:.2e}");
    let coeff = iv.coefficients().iter().zip(transported.coefficients()).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
    println!("max coefficient difference: {coeff:.2e}");
    Ok(())
}
