//! Query counts of the emulated search routines against their √N and √m laws.

use qopt::quantum::{durr_hoyer_min_emulated, lin_lin_first_hit_emulated, EmulatorConfig};
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn main() {
    let cfg = EmulatorConfig::default();
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let trials = 200;

    println!("minimum finding, eps = 0.01");
    for exp in (4..=12).step_by(2) {
        let n = 1usize << exp;
        let mut values: Vec<f64> = (0..n).map(|i| i as f64).collect();
        let (mut queries, mut ok) = (0u64, 0);
        for _ in 0..trials {
            values.shuffle(&mut rng);
            let (i, tally) = durr_hoyer_min_emulated(&values, 0.01, &cfg, &mut rng).expect("nonempty");
            queries += tally.oracle_queries;
            ok += (values[i] == 0.0) as u32;
        }
        let mean = queries as f64 / trials as f64;
        println!(
            "  N {n:>5}  mean {mean:>9.1}  mean/√N {:>6.1}  correct {ok}/{trials}",
            mean / (n as f64).sqrt()
        );
    }

    println!("first hit, N = 8192");
    for exp in (4..=12).step_by(2) {
        let m = 1usize << exp;
        let (mut queries, mut ok) = (0u64, 0);
        for _ in 0..trials {
            let (hit, tally) = lin_lin_first_hit_emulated(8192, |i| i >= m, &cfg, &mut rng);
            queries += tally.oracle_queries;
            ok += (hit == Some(m)) as u32;
        }
        let mean = queries as f64 / trials as f64;
        println!(
            "  m {m:>5}  mean {mean:>9.1}  mean/√m {:>6.1}  correct {ok}/{trials}",
            mean / (m as f64).sqrt()
        );
    }
}
