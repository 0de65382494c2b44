//! Runs four algorithms through the bench layer and prints their cost rows.

use qopt::bench::{cmd_run, Algorithm, RunMode, RunSpec};

fn main() -> qopt::Result<()> {
    let specs = [
        RunSpec::new(Algorithm::BnbGalperin, "sphere-2").param("epsilon", 0.01),
        RunSpec::new(Algorithm::LineSearch, "rosenbrock-2").param("direction", "bfgs"),
        RunSpec::new(Algorithm::NelderMead, "rosenbrock-2"),
        RunSpec::new(Algorithm::Sgd, "avg-quadratics-4-2").param("steps", 50),
    ];
    println!(
        "{:<14} {:>12} {:>14} {:>14} {:>10}",
        "algorithm", "measured", "classical", "quantum", "polylog"
    );
    for spec in specs {
        let report = cmd_run(&spec.with_mode(RunMode::Both))?;
        let row = report.cost_models.expect("cost row");
        println!(
            "{:<14} {:>12} {:>14.4e} {:>14.4e} {:>10}",
            row.algorithm,
            row.classical_measured.map_or("-".into(), |v| format!("{v:.0}")),
            row.classical_model,
            row.quantum_model,
            row.quantum_polylog.map_or("-".into(), |v| format!("{v:.2}")),
        );
    }
    Ok(())
}
