//! Runs a small custom sweep from a JSON config and writes its CSV and SVG.

use cgtomo::experiments::*;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let out = std::env::temp_dir().join("cgtomo-sweep");
    let json = format!(
        r#"{{
            "sigma_grid": [0.1, 0.5, 1.0, 1.5, 2.0],
            "inputs": [{{"nbar": 0, "r": 1, "phi": 0}}, {{"nbar": 1, "r": 1, "phi": 0}}],
            "methods": ["DirectKnown", "MLE", "DirectUnknown"],
            "seed": 7,
            "out_dir": {:?}
        }}"#,
        out
    );
    let cfg = SweepConfig::from_json(&json, Experiment::Custom)?;
    let result = run(&cfg)?;
    println!("{} records", result.records.len());
    for r in result.records.iter().filter(|r| r.sigma == 1.0) {
        println!(
            "  ({}, {}) {:<13} F {:.4} r_nc {:.4} y {:.4}",
            r.nbar1,
            r.r,
            r.method.label(),
            r.fidelity.unwrap_or(f64::NAN),
            r.nonclassicality.unwrap_or(f64::NAN),
            r.y.unwrap_or(f64::NAN)
        );
    }
    println!(
        "wrote {} and {}",
        result.csv_path.display(),
        result.svg_path.display()
    );
    Ok(())
}
