//! Backtracking BFGS on Rosenbrock, classical and with emulated step-size search.

use qopt::corpus::corpus_lookup;
use qopt::line_search::{backtracking_descent, DirectionProvider, LineSearchConfig};
use qopt::quantum::Emulator;
use qopt::CountingOracle;

fn main() -> qopt::Result<()> {
    let f = corpus_lookup("rosenbrock-2")?;
    let cfg = LineSearchConfig {
        grad_tolerance: 1e-6,
        k_max: 500,
        ..LineSearchConfig::default()
    };

    let mut oracle = CountingOracle::new(f.clone());
    let (x, trace) = backtracking_descent(&mut oracle, &f.start(), &mut DirectionProvider::bfgs(2), &cfg, None)?;
    println!(
        "classical: x = {x:.6?}  k = {}  m_max = {}  queries = {}",
        trace.k(),
        trace.m_max(),
        oracle.eval_count()
    );
    for row in trace.rows.iter().step_by(10).take(6) {
        println!(
            "  iter {:>3}  f {:.3e}  eta {:.3e}  m0 {}",
            row.iter, row.f, row.eta, row.m0
        );
    }

    let mut oracle = CountingOracle::new(f.clone());
    let mut em = Emulator::seeded(7);
    let (x, trace) = backtracking_descent(
        &mut oracle,
        &f.start(),
        &mut DirectionProvider::bfgs(2),
        &cfg,
        Some(&mut em),
    )?;
    println!(
        "emulated:  x = {x:.6?}  k = {}  classical {}  emulated {}",
        trace.k(),
        trace.queries_classical(),
        trace.queries_quantum()
    );
    Ok(())
}
