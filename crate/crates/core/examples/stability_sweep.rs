//! ‖I_k v‖ over the stability bound on prisms with aspect ratios up to 1e4.

use bdm_aniso::analysis::PNorm;
use bdm_aniso::experiment::{run, Experiment, ExperimentConfig};

fn main() -> bdm_aniso::Result<()> {
    let config = ExperimentConfig {
        experiment: Some(Experiment::Stability),
        k: 1,
        p: vec![PNorm::Finite(2.0), PNorm::Infinity],
        ..Default::default()
    };
    let out = run(&config)?;
    for g in out.results["groups"].as_array().expect("groups") {
        let ratios: Vec<String> = g["ratios"].as_array().unwrap().iter().map(|r| format!("{:.4}", r.as_f64().unwrap())).collect();
        println!(
            "{:<11} {:<7} p={:<4} [{}] spread {:.2} spearman {:+.2}",
            g["field"].as_str().unwrap(),
            g["pattern"].as_str().unwrap(),
            g["p"].as_f64().map_or("inf".to_string(), |p| p.to_string()),
            ratios.join(", "),
            g["spread"].as_f64().unwrap(),
            g["spearman"].as_f64().unwrap()
        );
    }
    Ok(())
}
