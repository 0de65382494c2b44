//! Nelder-Mead on Rosenbrock in both modes. The step labels should agree; the
//! quantum run replaces each sort with emulated minimum finding.

use qopt::corpus::corpus_lookup;
use qopt::nelder_mead::{nm_cost_models, nm_minimize, nm_quantum_mode, InitialSimplex, NMConfig, StepLabel};
use qopt::quantum::Emulator;
use qopt::CountingOracle;

fn main() -> qopt::Result<()> {
    let f = corpus_lookup("rosenbrock-2")?;
    let cfg = NMConfig::default();
    let init = || InitialSimplex::Start {
        x0: vec![-1.2, 1.0],
        scale: Some(0.8),
    };

    let classical = nm_minimize(&mut CountingOracle::new(f.clone()), init(), &cfg)?;
    let mut em = Emulator::seeded(2);
    let quantum = nm_quantum_mode(&mut CountingOracle::new(f.clone()), init(), &cfg, &mut em, 1000)?;

    let count = |labels: &[StepLabel], want: StepLabel| labels.iter().filter(|l| **l == want).count();
    let st = &classical.stats;
    println!(
        "best {:.3e} at {:.6?} after k = {} (s = {})",
        classical.best_value, classical.best_point, st.k, st.s
    );
    for label in [
        StepLabel::Reflect,
        StepLabel::Expand,
        StepLabel::OutsideContract,
        StepLabel::InsideContract,
        StepLabel::Shrink,
    ] {
        println!("  {label:?}: {}", count(&st.step_labels, label));
    }
    println!(
        "labels identical: {}  quantum-side queries: {}  classical: {} vs {}",
        st.step_labels == quantum.stats.step_labels,
        quantum.stats.queries_quantum_emulated,
        st.queries_classical,
        quantum.stats.queries_classical
    );

    let (c, q) = nm_cost_models(st.k as f64, st.s as f64, 2.0, 1.0, (st.k as f64).log2());
    println!("cost model: classical {c:.0}  quantum {q:.0}");
    Ok(())
}
