//! Convergence of the L^p interpolation error on shrinking similar elements.
//! The fitted slope should be k + 1.

use bdm_aniso::analysis::PNorm;
use bdm_aniso::experiment::{run, Experiment, ExperimentConfig};
use bdm_aniso::geometry::ElementKind;

fn main() -> bdm_aniso::Result<()> {
    for kind in ElementKind::all() {
        for k in 1..=2 {
            let config = ExperimentConfig {
                experiment: Some(Experiment::Converge),
                kind,
                k,
                p: vec![PNorm::Finite(1.0), PNorm::Finite(2.0), PNorm::Infinity],
                first_level: 2,
                levels: Some(6),
                ..Default::default()
            };
            let out = run(&config)?;
            let slopes: Vec<String> = out.results["fits"]
                .as_array()
                .expect("fits")
                .iter()
                .map(|f| format!("{:.3}", f["fit"]["slope"].as_f64().unwrap_or(f64::NAN)))
                .collect();
            println!("{kind:<5} k={k} slopes (p=1,2,inf): {}", slopes.join(" "));
        }
    }
    Ok(())
}
