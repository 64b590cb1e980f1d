//! Shrinking only h1 while h2 = h3 = 1: the error of x1-only still decays
//! like h1², and error/rhs stays bounded. Prints the CSV table.

use bdm_aniso::analysis::PNorm;
use bdm_aniso::experiment::{run, Experiment, ExperimentConfig, FamilyChoice, FieldChoice};
use bdm_aniso::fields::FieldSpec;
use bdm_aniso::geometry::ElementKind;

fn main() -> bdm_aniso::Result<()> {
    for kind in [ElementKind::Tet, ElementKind::Prism] {
        let config = ExperimentConfig {
            experiment: Some(Experiment::Converge),
            kind,
            k: 1,
            p: vec![PNorm::Finite(2.0), PNorm::Infinity],
            field: FieldChoice(FieldSpec::X1Only),
            family: FamilyChoice::Preset("flat1".into()),
            levels: Some(8),
            ..Default::default()
        };
        let out = run(&config)?;
        println!("{kind}:\n{}", out.table.to_csv()?);
        for c in &out.checks {
            println!("  {:<22} {:.3e} {}", c.name, c.value, if c.pass { "ok" } else { "FAIL" });
        }
    }
    Ok(())
}
