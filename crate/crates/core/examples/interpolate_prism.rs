//! Interpolate sin3 onto BDM_2 on a flat prism and report the L^p errors
//! next to the prism estimate's right-hand side.

use bdm_aniso::analysis::{estimate_report, NormSpec, PNorm, Theorem};
use bdm_aniso::fields::{catalog, FieldSpec};
use bdm_aniso::geometry::{ElementGeometry, ElementKind};
use bdm_aniso::interpolation::BdmInterpolator;
use bdm_aniso::VectorField;

fn main() -> bdm_aniso::Result<()> {
    let el = ElementGeometry::scaled(ElementKind::Prism, &[0.1, 0.2, 0.01])?;
    let v = catalog(&FieldSpec::Sin3, 3)?;
    let interp = BdmInterpolator::new(&el, 2)?;
    let iv = interp.interpolate(&v)?;

    let x = el.to_physical(&[0.2, 0.3, 0.5]);
    println!("v(x)  = {:?}", v.eval_vec(&x));
    println!("Iv(x) = {:?}", iv.eval_vec(&x));
    for p in [PNorm::Finite(1.0), PNorm::Finite(2.0), PNorm::Infinity] {
        let r = estimate_report(&interp, &v, Theorem::Prism, 2, &NormSpec::new(p))?;
        println!("p={p:<3}  error {:.3e}  rhs {:.3e}  ratio {:.3}", r.error, r.rhs, r.ratio.unwrap_or(f64::NAN));
    }
    Ok(())
}
