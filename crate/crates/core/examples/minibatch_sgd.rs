//! SGD on an average of four quadratics with the batch size chosen from an
//! accuracy target, plus the empirical failure rate of that batch size.

use qopt::corpus::corpus_lookup;
use qopt::minibatch::{
    minibatch_gradient, required_batch_size, sgd_minimize, BatchSize, GradAccuracySpec, SgdConfig, StepSchedule,
};

fn main() -> qopt::Result<()> {
    let f = corpus_lookup("avg-quadratics-4-2")?;
    let avg = f.averaged().expect("averaged family");
    let spec = GradAccuracySpec::new(0.1, 0.05)?;
    let k_b = required_batch_size(&spec, 2);
    println!("k_b = {k_b} for eps 0.1, delta 0.05");

    let x = [0.9, 0.1];
    let exact = f.analytic_gradient(&x).expect("analytic gradient");
    let trials = 2000;
    let mut misses = 0;
    for seed in 0..trials {
        let g = minibatch_gradient(avg, &x, k_b, seed, 0, 1e-6)?;
        let err = g
            .estimate
            .iter()
            .zip(&exact)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max);
        misses += (err > spec.epsilon) as u32;
    }
    println!(
        "failure fraction {:.4} over {trials} trials",
        misses as f64 / trials as f64
    );

    let cfg = SgdConfig::new(200, StepSchedule::Constant { eta: 1.0 }, BatchSize::FromSpec(spec)).with_seed(3);
    let tr = sgd_minimize(avg, &x, &cfg)?;
    for row in tr.rows.iter().step_by(40) {
        println!("t {:>3}  f {:.6}  x {:.4?}", row.t, row.f_probe, row.x);
    }
    println!(
        "x_final {:.4?}  minimiser {:.4?}  queries {}",
        tr.x_final,
        f.known_min().unwrap().0,
        tr.total_queries
    );
    Ok(())
}
