//! Maximum angle and regular vertex along anisotropic families, and a
//! sliver that violates the maximum angle condition.

use bdm_aniso::geometry::{check_max_angle, check_regular_vertex, make_family, map_element, reference_element, AffineMap, ElementKind, FamilySpec};

fn main() -> bdm_aniso::Result<()> {
    for (name, kind) in [("needle", ElementKind::Tet), ("flat1", ElementKind::Prism), ("flat1", ElementKind::Triangle)] {
        let family = make_family(&FamilySpec::preset(name, kind, 0, 6)?)?;
        for el in family.iter().step_by(3) {
            let (v, det) = check_regular_vertex(el);
            println!(
                "{kind:<5} {name:<6} h={:?} max angle {:.1} deg, regular vertex {v} (det {det:.3})",
                el.h,
                check_max_angle(el)?.to_degrees()
            );
        }
    }
    // vertices (0,0), (1,0), (1/2, eps): the apex angle tends to 180 degrees
    for eps in [1e-1, 1e-2, 1e-3] {
        let map = AffineMap::new(2, &[vec![1.0, 0.5], vec![0.0, eps]], &[0.0, 0.0])?;
        let el = map_element(&reference_element(ElementKind::Triangle), &map)?;
        println!("sliver eps={eps:e}: max angle {:.2} deg, regular vertex det {:.2e}", check_max_angle(&el)?.to_degrees(), check_regular_vertex(&el).1);
    }
    Ok(())
}
