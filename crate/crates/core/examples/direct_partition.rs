//! DIRECT on a shifted 2-D quadratic: per-iteration selections, then the final
//! partition as `d_j,f_center,selected` rows.

use qopt::direct::{potentially_optimal, trisect, PartitionState};
use qopt::{CountingOracle, Domain, ObjectiveFunction};

fn main() -> qopt::Result<()> {
    let f = ObjectiveFunction::new("shifted", 2, |x| (x[0] - 0.7).powi(2) + 2.0 * (x[1] - 0.2).powi(2))
        .with_domain(Domain::unit(2));
    let mut oracle = CountingOracle::new(f);
    let mut state = PartitionState::new(&mut oracle, 1e-4)?;

    for t in 1..=12 {
        let selected = potentially_optimal(&state);
        for &j in &selected {
            trisect(&mut state, j, &mut oracle)?;
        }
        println!(
            "t={t:<3} selected {:<3} rects {:<4} evals {:<4} f_min {:.3e}",
            selected.len(),
            state.rects().len(),
            state.evaluations(),
            state.f_min()
        );
    }
    println!("x_min = {:?}", state.x_min());

    let last = potentially_optimal(&state);
    let csv = state.scatter_csv(&last)?;
    for line in csv.lines().take(8) {
        println!("{line}");
    }
    Ok(())
}
