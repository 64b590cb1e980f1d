use std::path::PathBuf;
use std::process::ExitCode;

use bdm_aniso::analysis::PNorm;
use bdm_aniso::experiment::{run_to_dir, Experiment, ExperimentConfig, FamilyChoice, FieldChoice};
use bdm_aniso::geometry::ElementKind;
use bdm_aniso::Error;
use clap::Parser;

#[derive(Clone, Debug)]
struct PList(Vec<PNorm>);

/// Run a BDM interpolation study and write table.csv and summary.json.
#[derive(Parser, Debug)]
#[command(name = "bdm-aniso", version)]
struct Cli {
    /// unisolvence, reproduce, lemma1, commuting, converge, stability or geometry-check
    #[arg(value_parser = |s: &str| s.parse::<Experiment>().map_err(|e| e.to_string()))]
    experiment: Experiment,
    /// JSON config; flags given here override its entries
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    k: Option<u32>,
    #[arg(long)]
    m: Option<u32>,
    /// Comma-separated exponents, e.g. 1,2,inf
    #[arg(long, value_parser = |s: &str| PNorm::parse_list(s).map(PList).map_err(|e| e.to_string()))]
    p: Option<PList>,
    /// tri, tet or prism
    #[arg(long, value_parser = |s: &str| s.parse::<ElementKind>().map_err(|e| e.to_string()))]
    kind: Option<ElementKind>,
    /// iso, flat1, needle or custom:<json law>
    #[arg(long, value_parser = |s: &str| s.parse::<FamilyChoice>().map_err(|e| e.to_string()))]
    family: Option<FamilyChoice>,
    /// e.g. sin3, x1-only, layer(0.1)
    #[arg(long, value_parser = |s: &str| s.parse().map(FieldChoice).map_err(|e: Error| e.to_string()))]
    field: Option<FieldChoice>,
    /// Last level J
    #[arg(long)]
    levels: Option<usize>,
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long)]
    seed: Option<u64>,
}

fn configure(cli: Cli) -> Result<ExperimentConfig, Error> {
    let mut c = match &cli.config {
        Some(path) => ExperimentConfig::load(path)?,
        None => ExperimentConfig::default(),
    };
    c.experiment = Some(cli.experiment);
    if let Some(k) = cli.k {
        c.k = k;
    }
    if cli.m.is_some() {
        c.m = cli.m;
    }
    if let Some(p) = cli.p {
        c.p = p.0;
    }
    if let Some(kind) = cli.kind {
        c.kind = kind;
    }
    if let Some(f) = cli.family {
        c.family = f;
    }
    if let Some(f) = cli.field {
        c.field = f;
    }
    if cli.levels.is_some() {
        c.levels = cli.levels;
    }
    if cli.out.is_some() {
        c.out = cli.out;
    }
    if let Some(s) = cli.seed {
        c.seed = s;
    }
    Ok(c)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let config = match configure(cli) {
        Ok(c) => c,
        Err(e) => {
            eprintln!("bdm-aniso: {e}");
            return ExitCode::from(e.exit_code() as u8);
        }
    };
    let dir = config
        .out
        .clone()
        .unwrap_or_else(|| PathBuf::from("results").join(config.experiment.map_or("run", |e| e.name())));
    match run_to_dir(&config, &dir) {
        Ok(outcome) => {
            for c in &outcome.checks {
                eprintln!("{} {} = {:e} ({} {:e})", if c.pass { "pass" } else { "FAIL" }, c.name, c.value, c.relation, c.threshold);
            }
            eprintln!("wrote {}", dir.display());
            if outcome.passed() {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            }
        }
        Err(e) => {
            eprintln!("bdm-aniso: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
