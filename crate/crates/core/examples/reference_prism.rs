//! The reference prism: facets with their outward normals, the DOF layout of
//! the BDM element and the conditioning of its DOF matrix.

use bdm_aniso::geometry::{reference_element, ElementGeometry, ElementKind};
use bdm_aniso::interpolation::{dof_set, BdmInterpolator, DofKind};

fn main() -> bdm_aniso::Result<()> {
    let prism = reference_element(ElementKind::Prism);
    for f in &prism.facets {
        println!("facet {:<3} {:?} normal {:?} area {:.4}", f.label, f.domain, f.normal, f.measure);
    }
    let el = ElementGeometry::reference(ElementKind::Prism);
    for k in 1..=3 {
        let dofs = dof_set(ElementKind::Prism, k)?;
        let facet = dofs.dofs.iter().filter(|d| matches!(d.kind, DofKind::FacetMoment { .. })).count();
        let interp = BdmInterpolator::new(&el, k)?;
        println!(
            "k={k}: {} dofs ({facet} facet, {} interior), space dim {}, sigma_min/sigma_max {:.3e}",
            dofs.count(),
            dofs.count() - facet,
            dofs.space().dimension(),
            interp.condition()
        );
    }
    Ok(())
}
