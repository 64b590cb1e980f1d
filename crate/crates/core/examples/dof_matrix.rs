//! The DOF matrix of BDM_k on a reference element, row by row. With
//! `--write <path>` it is saved as JSON: {"kind", "k", "rows"}.

use bdm_aniso::geometry::{ElementGeometry, ElementKind};
use bdm_aniso::interpolation::BdmInterpolator;
use serde_json::json;

fn main() -> bdm_aniso::Result<()> {
    let args: Vec<String> = std::env::args().collect();
    let kind: ElementKind = args.get(1).map_or(Ok(ElementKind::Triangle), |s| s.parse())?;
    let interp = BdmInterpolator::new(&ElementGeometry::reference(kind), 1)?;
    let m = interp.matrix();
    let rows: Vec<Vec<f64>> = (0..m.nrows()).map(|i| m.row(i).iter().copied().collect()).collect();
    for r in &rows {
        let cells: Vec<String> = r.iter().map(|x| format!("{x:8.4}")).collect();
        println!("{}", cells.join(" "));
    }
    if let Some(i) = args.iter().position(|a| a == "--write") {
        let path = args.get(i + 1).expect("--write needs a path");
        let doc = json!({"kind": kind, "k": 1, "rows": rows});
        std::fs::write(path, serde_json::to_string_pretty(&doc)? + "\n")?;
        println!("wrote {path}");
    }
    Ok(())
}
