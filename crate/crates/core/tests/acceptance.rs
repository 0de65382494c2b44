//! Acceptance suite. Prints one PASS/FAIL line per criterion and exits
//! nonzero if any criterion fails or overruns its time limit.

mod common;

use std::time::{Duration, Instant};

use qopt::bench::{cmd_run, Algorithm, RunMode, RunSpec};
use qopt::bnb::{bnb_minimize, galperin_lower_bound, BnbConfig, DyadicRegion};
use qopt::corpus::{corpus_lookup, fig1, is_strictly_convex, manifest};
use qopt::direct::{direct_minimize, potentially_optimal, PartitionState};
use qopt::line_search::{armijo_m0, gould_interval, quantum_m0, Probe};
use qopt::minibatch::{minibatch_gradient, required_batch_size, GradAccuracySpec};
use qopt::nelder_mead::{
    nm_minimize, nm_minimize_observed, nm_quantum_mode, recompute_centroid, InitialSimplex, NMConfig, StepLabel,
};
use qopt::quantum::{
    durr_hoyer_min_emulated, gradient_table_costs, line_search_costs, nelder_mead_table_costs, table1_row,
    AlgorithmKind, AlgorithmStats, Emulator, EmulatorConfig,
};
use qopt::{CountingOracle, Domain, ObjectiveFunction};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use common::{loglog_slope, po_brute_force, random_quadratic, random_rects, scan_m0, wilson_lower};

type Check = std::result::Result<String, String>;

/// Name, time limit in seconds, body.
type Criterion = (&'static str, u64, fn() -> Check);

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> std::result::Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn figure_one() -> Check {
    let mut o = CountingOracle::new(fig1());
    let cases = [
        (0, 0, -3.0),
        (1, 0, -2.0),
        (2, 1, -1.25),
        (1, 1, -1.0),
        (3, 2, -0.8125),
        (3, 3, -0.75),
        (2, 0, -1.0),
    ];
    for (level, corner, want) in cases {
        let r = DyadicRegion::new(level, vec![corner], 2).map_err(|e| e.to_string())?;
        let got = galperin_lower_bound(&mut o, &r, 4.0).map_err(|e| e.to_string())?;
        ensure((got - want).abs() <= 1e-12, || {
            format!("{:?}: {got} != {want}", r.bounds(0))
        })?;
    }
    Ok("7/7 intervals exact".into())
}

fn epsilon_optimality() -> Check {
    let eps = 0.01;
    let mut bnb_runs = 0;
    let mut direct_runs = 0;
    for entry in manifest() {
        let f = corpus_lookup(&entry.name).unwrap();
        let fstar = entry
            .known_min_value
            .ok_or_else(|| format!("{} has no known minimum", entry.name))?;
        if let Some(k) = entry.lipschitz {
            let out = bnb_minimize(&mut CountingOracle::new(f.clone()), &BnbConfig::new(k, eps))
                .map_err(|e| format!("{}: {e}", entry.name))?;
            ensure(out.f_opt - fstar <= eps, || {
                format!("bnb {}: {} vs {fstar}", entry.name, out.f_opt)
            })?;
            bnb_runs += 1;
        }
        let out = direct_minimize(&mut CountingOracle::new(f), 1e-4, 200).map_err(|e| e.to_string())?;
        ensure(out.f_min - fstar <= 1e-2, || {
            format!("direct {}: {} vs {fstar}", entry.name, out.f_min)
        })?;
        direct_runs += 1;
    }
    Ok(format!(
        "bnb {bnb_runs} functions within {eps}, direct {direct_runs} within 1e-2"
    ))
}

fn direct_hull() -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(0xd1ec7);
    let mut agree = 0;
    for trial in 0..100 {
        let size = rng.gen_range(2..=200);
        let n = rng.gen_range(1..=3);
        let eps = [0.0, 1e-4, 0.1][trial % 3];
        let rects = random_rects(&mut rng, size, n);
        let want = po_brute_force(&rects, eps);
        let state = PartitionState::from_rects(rects, eps).map_err(|e| e.to_string())?;
        let got = potentially_optimal(&state);
        ensure(got == want, || {
            format!("trial {trial} (size {size}): {got:?} vs {want:?}")
        })?;
        agree += 1;
    }
    Ok(format!("{agree}/100 partitions agree"))
}

fn armijo_suite() -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(0xa53);
    let mut gould_samples = 0;
    for trial in 0..1000 {
        let n = rng.gen_range(1..=4);
        let (f, lip) = random_quadratic(&mut rng, n);
        let x: Vec<f64> = (0..n).map(|_| rng.gen_range(-2.0..2.0)).collect();
        let g = f.analytic_gradient(&x).unwrap();
        let mut d: Vec<f64> = g.iter().map(|v| -v + rng.gen_range(-0.3..0.3)).collect();
        let norm = d.iter().map(|v| v * v).sum::<f64>().sqrt();
        d.iter_mut().for_each(|v| *v /= norm);
        let ddf: f64 = g.iter().zip(&d).map(|(a, b)| a * b).sum();
        if ddf >= -1e-9 {
            continue;
        }
        let gamma = rng.gen_range(0.1..0.9);
        let beta = rng.gen_range(0.1..0.9);
        let mut oracle = CountingOracle::new(f.clone());
        let fx = f.value(&x);
        let probe = Probe { x: &x, fx, d: &d, ddf };
        let m0 = armijo_m0(&mut oracle, &probe, gamma, beta, 64).map_err(|e| e.to_string())?;
        let want = scan_m0(&f, &x, &d, ddf, gamma, beta, 64);
        ensure(Some(m0) == want, || format!("trial {trial}: m0 {m0} vs scan {want:?}"))?;
        ensure(oracle.eval_count() == m0 as u64 + 1, || {
            format!("trial {trial}: query count")
        })?;

        let upper = gould_interval(lip, ddf, beta, 1.0).map_err(|e| e.to_string())?;
        for _ in 0..5 {
            let eta = rng.gen::<f64>() * upper;
            let y: Vec<f64> = x.iter().zip(&d).map(|(a, b)| a + eta * b).collect();
            ensure(f.value(&y) <= fx + beta * eta * ddf, || {
                format!("trial {trial}: η={eta} in Gould interval fails")
            })?;
            gould_samples += 1;
        }

        let arg = lip / (2.0 * (1.0 - beta) * ddf.abs());
        let bound = (arg.ln() / (1.0 / gamma).ln()).ceil().max(0.0) + 1.0;
        ensure(m0 as f64 <= bound, || {
            format!("trial {trial}: m0 {m0} above bound {bound}")
        })?;
    }
    Ok(format!(
        "1000 instances match scan, {gould_samples} Gould samples sound"
    ))
}

fn random_start(rng: &mut ChaCha8Rng, f: &ObjectiveFunction) -> Vec<f64> {
    let d = f.domain();
    (0..f.dim())
        .map(|i| rng.gen_range(d.lower()[i]..d.upper()[i]))
        .collect()
}

fn nelder_mead_no_shrink() -> Check {
    let cfg = NMConfig {
        k_max: 5000,
        ..NMConfig::default()
    };
    let mut convex_runs = 0;
    for n in [2, 5, 10] {
        for name in [format!("sphere-{n}"), format!("avg-quadratics-4-{n}")] {
            ensure(is_strictly_convex(&name), || format!("{name} not flagged convex"))?;
            let f = corpus_lookup(&name).unwrap();
            for seed in 0..20 {
                let mut rng = ChaCha8Rng::seed_from_u64(seed);
                let x0 = random_start(&mut rng, &f);
                let out = nm_minimize(
                    &mut CountingOracle::new(f.clone()),
                    InitialSimplex::Start { x0, scale: None },
                    &cfg,
                )
                .map_err(|e| e.to_string())?;
                ensure(out.stats.s == 0, || {
                    format!("{name} seed {seed}: {} shrinks", out.stats.s)
                })?;
                convex_runs += 1;
            }
        }
    }

    let bumpy = ObjectiveFunction::new("bumpy-2", 2, |x| {
        x[0] * x[0] + x[1] * x[1] + 0.5 * (7.0 * x[0]).sin() * (7.0 * x[1]).sin()
    })
    .with_domain(Domain::cube(2, -2.0, 2.0));
    let nonconvex = [
        corpus_lookup("rosenbrock-2").unwrap(),
        corpus_lookup("rosenbrock-3").unwrap(),
        bumpy,
    ];
    let (mut steps, mut shrinks) = (0usize, 0usize);
    let mut worst_err = 0.0f64;
    for f in &nonconvex {
        for seed in 0..20 {
            let mut rng = ChaCha8Rng::seed_from_u64(100 + seed);
            let x0 = random_start(&mut rng, f);
            let scale = Some(rng.gen_range(0.05..1.0));
            let c = NMConfig {
                k_max: 400,
                ..NMConfig::default()
            };
            let mut bad = None;
            nm_minimize_observed(
                &mut CountingOracle::new(f.clone()),
                InitialSimplex::Start { x0, scale },
                &c,
                |s, label| {
                    let r = recompute_centroid(s.points(), s.worst());
                    let err = r
                        .iter()
                        .zip(s.centroid())
                        .map(|(a, b)| (a - b).abs())
                        .fold(0.0, f64::max);
                    worst_err = worst_err.max(err);
                    if err > 1e-9 || !s.is_consistent(|x| f.value(x), 1e-9) {
                        bad = Some(label);
                    }
                    steps += 1;
                    shrinks += usize::from(label == StepLabel::Shrink);
                },
            )
            .map_err(|e| e.to_string())?;
            ensure(bad.is_none(), || {
                format!("{} seed {seed}: invariant broken after {bad:?}", f.name())
            })?;
        }
    }
    ensure(shrinks > 0, || "no shrink step exercised".into())?;
    Ok(format!(
        "{convex_runs} convex runs with s = 0; {steps} non-convex steps ({shrinks} shrinks), max centroid error {worst_err:.1e}"
    ))
}

fn emulator_scaling() -> Check {
    let cfg = EmulatorConfig::default();
    let eps = 0.01;
    let sizes: Vec<usize> = (4..=12).map(|e| 1 << e).collect();
    let mut rng = ChaCha8Rng::seed_from_u64(0xe1);
    let mut dh_points = Vec::new();
    let (mut dh_ok, mut dh_total) = (0u64, 0u64);
    for &n in &sizes {
        let mut sum = 0u64;
        for _ in 0..200 {
            let values: Vec<f64> = (0..n).map(|_| rng.gen()).collect();
            let truth = (0..n).min_by(|a, b| values[*a].total_cmp(&values[*b])).unwrap();
            let (i, t) = durr_hoyer_min_emulated(&values, eps, &cfg, &mut rng).map_err(|e| e.to_string())?;
            sum += t.oracle_queries;
            dh_ok += u64::from(i == truth);
            dh_total += 1;
        }
        dh_points.push((n as f64, sum as f64 / 200.0));
    }
    let dh_slope = loglog_slope(&dh_points);

    let mut em = Emulator::seeded(0xe2);
    let mut ll_points = Vec::new();
    let (mut ll_ok, mut ll_total) = (0u64, 0u64);
    for &m in &sizes {
        let mut sum = 0u64;
        for _ in 0..200 {
            let (hit, t) = em.first_hit(1 << 13, |i| i + 1 >= m);
            sum += t.oracle_queries;
            ll_ok += u64::from(hit == Some(m - 1));
            ll_total += 1;
        }
        ll_points.push((m as f64, sum as f64 / 200.0));
    }
    let ll_slope = loglog_slope(&ll_points);
    let dh_lo = wilson_lower(dh_ok, dh_total);
    let ll_lo = wilson_lower(ll_ok, ll_total);
    ensure((dh_slope - 0.5).abs() <= 0.1, || {
        format!("min-finding slope {dh_slope:.3}")
    })?;
    ensure((ll_slope - 0.5).abs() <= 0.1, || {
        format!("first-hit slope {ll_slope:.3}")
    })?;
    ensure(dh_lo >= 1.0 - eps, || {
        format!("min-finding Wilson lower {dh_lo:.4} ({dh_ok}/{dh_total})")
    })?;
    ensure(ll_lo >= 0.99, || {
        format!("first-hit Wilson lower {ll_lo:.4} ({ll_ok}/{ll_total})")
    })?;
    Ok(format!(
        "slopes {dh_slope:.3} / {ll_slope:.3}; Wilson lower bounds {dh_lo:.4} / {ll_lo:.4}"
    ))
}

fn gradient_accuracy() -> Check {
    let f = corpus_lookup("avg-quadratics-4-2").unwrap();
    let avg = f.averaged().unwrap();
    let spec = GradAccuracySpec::new(0.1, 0.05).map_err(|e| e.to_string())?;
    let k_b = required_batch_size(&spec, avg.dim());
    let mut rng = ChaCha8Rng::seed_from_u64(0x9a);
    let mut failures = 0;
    for trial in 0..10_000u64 {
        let x: Vec<f64> = (0..avg.dim()).map(|_| rng.gen()).collect();
        let truth = avg.mean_gradient(&x).unwrap();
        let g = minibatch_gradient(avg, &x, k_b, trial, 0, 1e-6).map_err(|e| e.to_string())?;
        let err = g
            .estimate
            .iter()
            .zip(&truth)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max);
        failures += u32::from(err > 0.1);
    }
    let frac = failures as f64 / 10_000.0;
    ensure(frac <= 0.05, || format!("failure fraction {frac}"))?;
    Ok(format!("k_b = {k_b}, failure fraction {frac}"))
}

fn table1_consistency() -> Check {
    let runs = [
        RunSpec::new(Algorithm::BnbGalperin, "fig1").param("epsilon", 0.05),
        RunSpec::new(Algorithm::BnbGalperin, "sphere-2").param("epsilon", 0.1),
        RunSpec::new(Algorithm::LineSearch, "sphere-2").with_mode(RunMode::Both),
        RunSpec::new(Algorithm::LineSearch, "rosenbrock-2").param("k_max", 50),
        RunSpec::new(Algorithm::NelderMead, "sphere-3").with_mode(RunMode::Both),
        RunSpec::new(Algorithm::Sgd, "avg-quadratics-4-2").param("steps", 5),
    ];
    for spec in &runs {
        let r = cmd_run(spec).map_err(|e| e.to_string())?;
        let row = r.cost_models.as_ref().ok_or("missing cost row")?;
        let n = r.x_opt.as_ref().unwrap().len() as f64;
        let s = &r.stats;
        let (c, q) = match spec.algorithm {
            Algorithm::BnbGalperin => {
                let (t, d) = (s.t_min.unwrap() as f64, s.d.unwrap() as f64);
                (t * 2f64.powf(n), t.sqrt() * 2f64.powf(n) * d.powf(1.5))
            }
            Algorithm::LineSearch => {
                let (k, m, tau) = (s.k.unwrap() as f64, s.m_max.unwrap() as f64, s.tau_d.unwrap());
                (k * (tau + m), k * (tau + m.sqrt() * k.log2()))
            }
            Algorithm::NelderMead => {
                let (k, sh) = (s.k.unwrap() as f64, s.s.unwrap() as f64);
                ((sh + 1.0) * n + k, (sh + 1.0) * n.sqrt() * k.log2() + k)
            }
            _ => {
                let eps: f64 = 0.1;
                (n / (eps * eps), n.sqrt() / eps)
            }
        };
        ensure(row.classical_model == c && row.quantum_model == q, || {
            format!(
                "{}: ({}, {}) vs ({c}, {q})",
                row.algorithm, row.classical_model, row.quantum_model
            )
        })?;
    }

    // Crossover and worked examples.
    for n in [64u64, 256, 1024, 4096] {
        let tf = (n as f64).powf(1.5);
        let (c, q) = nelder_mead_table_costs(n, 0, n, tf);
        ensure(q < c, || format!("nelder-mead crossover fails at n = {n}"))?;
    }
    let (c, q) = line_search_costs(16, 256, 100.0, 100.0);
    ensure(
        c == 16.0 * (100.0 + 25600.0) && q == 16.0 * (100.0 + 16.0 * 4.0 * 100.0),
        || "line-search example".into(),
    )?;
    let (c, q) = gradient_table_costs(10_000, 1.0, 0.1);
    ensure(q < c, || "gradient crossover".into())?;
    let ones = |kind| AlgorithmStats {
        n: Some(1),
        tf: Some(1.0),
        t_min: Some(1),
        depth: Some(1),
        epsilon: Some(1.0),
        k: Some(1),
        m_max: Some(1),
        tau_d: Some(1.0),
        s: Some(1),
        ..AlgorithmStats::new(kind)
    };
    let first = table1_row(&ones(AlgorithmKind::Gradient)).map_err(|e| e.to_string())?;
    let again = table1_row(&ones(AlgorithmKind::Gradient)).map_err(|e| e.to_string())?;
    ensure(first.quantum_model.to_bits() == again.quantum_model.to_bits(), || {
        "formulas not pure".into()
    })?;
    Ok(format!(
        "{} benchmark runs reproduce their bodies; crossovers hold",
        runs.len()
    ))
}

fn quantum_fidelity() -> Check {
    let f = corpus_lookup("sphere-8").unwrap();
    let cfg = NMConfig {
        k_max: 400,
        ..NMConfig::default()
    };
    let mut identical = 0;
    for seed in 0..100u64 {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let x0 = random_start(&mut rng, &f);
        let init = InitialSimplex::Start { x0, scale: None };
        let classical =
            nm_minimize(&mut CountingOracle::new(f.clone()), init.clone(), &cfg).map_err(|e| e.to_string())?;
        let mut em = Emulator::seeded(seed);
        let quantum = nm_quantum_mode(&mut CountingOracle::new(f.clone()), init, &cfg, &mut em, cfg.k_max)
            .map_err(|e| e.to_string())?;
        identical += u32::from(classical.stats.step_labels == quantum.stats.step_labels);
    }
    ensure(identical >= 95, || {
        format!("only {identical}/100 label sequences identical")
    })?;

    let sq = ObjectiveFunction::new("x^2", 1, |x| x[0] * x[0]).with_domain(Domain::unbounded(1));
    let oracle = CountingOracle::new(sq);
    let probe = Probe {
        x: &[1.0],
        fx: 1.0,
        d: &[-4.0],
        ddf: -8.0,
    };
    let k = 10;
    let mut agree = 0u64;
    let mut em = Emulator::seeded(7);
    for _ in 0..1000 {
        let (m, _) = quantum_m0(&oracle, &probe, 0.5, 0.5, 64, &mut em, k).map_err(|e| e.to_string())?;
        agree += u64::from(m == 2);
    }
    let rate = agree as f64 / 1000.0;
    ensure(rate >= 0.99, || format!("quantum m0 agreement {rate}"))?;
    ensure(wilson_lower(agree, 1000) >= 1.0 - 1.0 / k as f64, || {
        "agreement below 1 − 1/k".into()
    })?;
    Ok(format!(
        "{identical}/100 identical label sequences; quantum m0 agreement {rate}"
    ))
}

fn main() {
    let criteria: [Criterion; 9] = [
        ("figure-1 lower bounds", 1, figure_one),
        ("epsilon-optimality on corpus", 10, epsilon_optimality),
        ("DIRECT hull vs brute force", 5, direct_hull),
        ("Armijo suite", 10, armijo_suite),
        ("Nelder-Mead no-shrink and centroid", 30, nelder_mead_no_shrink),
        ("emulator scaling and correctness", 60, emulator_scaling),
        ("minibatch gradient accuracy", 60, gradient_accuracy),
        ("Table 1 consistency", 1, table1_consistency),
        ("quantum-mode fidelity", 60, quantum_fidelity),
    ];
    let mut failed = 0;
    for (name, limit, check) in criteria {
        let start = Instant::now();
        let result = std::panic::catch_unwind(check).unwrap_or_else(|_| Err("panicked".into()));
        let elapsed = start.elapsed();
        let in_time = elapsed <= Duration::from_secs(limit);
        let (tag, detail) = match (&result, in_time) {
            (Ok(d), true) => ("PASS", d.clone()),
            (Ok(d), false) => ("FAIL", format!("over time limit; {d}")),
            (Err(e), _) => ("FAIL", e.clone()),
        };
        if tag == "FAIL" {
            failed += 1;
        }
        println!(
            "{tag}  {name:<36} {:>8.3} s / {limit} s  {detail}",
            elapsed.as_secs_f64()
        );
    }
    println!("acceptance: {} passed, {failed} failed", 9 - failed);
    if failed > 0 {
        std::process::exit(1);
    }
}
