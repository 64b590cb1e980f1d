//! div ∘ I_k against the L² projection of div v: zero on simplices, not on
//! the prism. With `--write <path>` the seeded prism witness is saved as JSON.

use bdm_aniso::fields::{catalog, FieldSpec};
use bdm_aniso::geometry::{ElementGeometry, ElementKind};
use bdm_aniso::interpolation::{commuting_defect, search_counterexample};

fn main() -> bdm_aniso::Result<()> {
    let v = FieldSpec::Sin3;
    for kind in ElementKind::all() {
        let el = ElementGeometry::scaled(kind, &[1.0, 0.5, 0.25][..kind.dim()])?;
        for k in 1..=2 {
            let d = commuting_defect(&catalog(&v, kind.dim())?, &el, k)?;
            println!("{kind:<5} k={k} sin3 defect {d:.3e}");
        }
    }
    let witness = search_counterexample(ElementKind::Prism, 1, 42, 200, 1e-4)?.expect("a witness within 200 trials");
    println!("prism k=1 witness at trial {}: defect {:.4e}", witness.trial, witness.defect);

    let args: Vec<String> = std::env::args().collect();
    if let Some(i) = args.iter().position(|a| a == "--write") {
        let path = args.get(i + 1).expect("--write needs a path");
        std::fs::write(path, serde_json::to_string_pretty(&witness)? + "\n")?;
        println!("wrote {path}");
    }
    Ok(())
}
