//! A small parameter sweep: Nelder-Mead over three functions and two seeds, as CSV.

use qopt::bench::{cmd_sweep, sweep_csv, SweepGrid};

fn main() -> qopt::Result<()> {
    let grid = SweepGrid::from_json(
        r#"{
            "base": {"algorithm": "nelder-mead", "mode": "both", "params": {"k_max": 500}},
            "axes": [
                {"field": "function", "values": ["sphere-3", "rosenbrock-2", "avg-quadratics-4-3"]},
                {"field": "seed", "values": [1, 2]}
            ]
        }"#,
    )?;
    print!("{}", sweep_csv(&cmd_sweep(&grid)));
    Ok(())
}
