//! Single-component fields keep their structure under prism interpolation:
//! (f(x2, x3), 0, 0) goes to (q(x2, x3), 0, 0) and likewise for the others.

use bdm_aniso::experiment::{run, Experiment, ExperimentConfig};
use bdm_aniso::geometry::ElementKind;

fn main() -> bdm_aniso::Result<()> {
    for k in 1..=3 {
        let config = ExperimentConfig {
            experiment: Some(Experiment::Lemma1),
            kind: ElementKind::Prism,
            k,
            ..Default::default()
        };
        let out = run(&config)?;
        for c in &out.checks {
            println!("k={k} {:<22} {:.3e} {}", c.name, c.value, if c.pass { "ok" } else { "FAIL" });
        }
    }
    Ok(())
}
