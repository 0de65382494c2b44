//! Built-in test functions, addressed by stable names.
//!
//! | name                    | box            | K          | minimum            |
//! |-------------------------|----------------|------------|--------------------|
//! | `fig1`                  | `[0,1]`        | 4          | `f(1/3) = -1/3`    |
//! | `sphere-<n>`            | `[0,1]^n`      | `2√n`      | `f(0) = 0`         |
//! | `rosenbrock-<n>`        | `[-2,2]^n`     | none       | `f(1,…,1) = 0`     |
//! | `piecewise-linear-<n>`  | `[0,1]^n`      | `√n`       | `f(0.3,…) = 0`     |
//! | `avg-quadratics-<N>-<n>`| `[0,1]^n`      | `0.8/√n`   | mean of centres    |
//!
//! `avg-quadratics` components are `‖x - p_i‖² / (2n)` passed through the
//! affine range map onto `[1/10, 9/10]`, so every component stays inside
//! `[0.1, 0.5]` on the box and has `‖∇f_i‖∞ ≤ 0.8 / n ≤ 1`.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::minibatch::range_transform;
use crate::objective::{AveragedObjective, Domain, ObjectiveFunction};

const PIECEWISE_ANCHOR: f64 = 0.3;

/// One line of the machine-readable corpus manifest.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CorpusEntry {
    pub name: String,
    pub n: usize,
    pub lipschitz: Option<f64>,
    pub known_min_point: Option<Vec<f64>>,
    pub known_min_value: Option<f64>,
    pub strictly_convex: bool,
    pub analytic_gradient: bool,
}

/// Instances listed in the manifest. Family names accept any dimension.
pub const MANIFEST_NAMES: &[&str] = &[
    "fig1",
    "sphere-1",
    "sphere-2",
    "sphere-3",
    "rosenbrock-2",
    "rosenbrock-3",
    "piecewise-linear-1",
    "piecewise-linear-2",
    "piecewise-linear-3",
    "avg-quadratics-4-1",
    "avg-quadratics-4-2",
    "avg-quadratics-4-3",
];

pub fn corpus_lookup(name: &str) -> Result<ObjectiveFunction> {
    let unknown = || Error::UnknownFunction(name.to_string());
    if name == "fig1" {
        return Ok(fig1());
    }
    let parse = |s: &str| s.parse::<usize>().ok().filter(|v| *v >= 1);
    if let Some(rest) = name.strip_prefix("sphere-") {
        return parse(rest).map(sphere).ok_or_else(unknown);
    }
    if let Some(rest) = name.strip_prefix("rosenbrock-") {
        return parse(rest).filter(|n| *n >= 2).map(rosenbrock).ok_or_else(unknown);
    }
    if let Some(rest) = name.strip_prefix("piecewise-linear-") {
        return parse(rest).map(piecewise_linear).ok_or_else(unknown);
    }
    if let Some(rest) = name.strip_prefix("avg-quadratics-") {
        let (count, dim) = rest.split_once('-').ok_or_else(unknown)?;
        return match (parse(count), parse(dim)) {
            (Some(count), Some(dim)) => Ok(avg_quadratics(count, dim)),
            _ => Err(unknown()),
        };
    }
    Err(unknown())
}

pub fn is_strictly_convex(name: &str) -> bool {
    name.starts_with("sphere-") || name.starts_with("avg-quadratics-")
}

pub fn manifest() -> Vec<CorpusEntry> {
    MANIFEST_NAMES
        .iter()
        .map(|name| corpus_entry(name).expect("manifest names are registered"))
        .collect()
}

/// Manifest line for any registered name.
pub fn corpus_entry(name: &str) -> Result<CorpusEntry> {
    let f = corpus_lookup(name)?;
    Ok(CorpusEntry {
        name: name.to_string(),
        n: f.dim(),
        lipschitz: f.lipschitz(),
        known_min_point: f.known_min().map(|(p, _)| p.to_vec()),
        known_min_value: f.known_min().map(|(_, v)| v),
        strictly_convex: is_strictly_convex(name),
        analytic_gradient: f.has_gradient(),
    })
}

/// `3x² − 2x` on `[0, 1]`.
pub fn fig1() -> ObjectiveFunction {
    ObjectiveFunction::new("fig1", 1, |x| 3.0 * x[0] * x[0] - 2.0 * x[0])
        .with_lipschitz(4.0)
        .with_known_min(vec![1.0 / 3.0], -1.0 / 3.0)
        .with_gradient(|x| vec![6.0 * x[0] - 2.0])
        .with_hessian(|_| vec![6.0])
}

pub fn sphere(n: usize) -> ObjectiveFunction {
    ObjectiveFunction::new(format!("sphere-{n}"), n, |x| x.iter().map(|v| v * v).sum())
        .with_lipschitz(2.0 * (n as f64).sqrt())
        .with_known_min(vec![0.0; n], 0.0)
        .with_gradient(|x| x.iter().map(|v| 2.0 * v).collect())
        .with_hessian(move |_| diagonal(n, 2.0))
        .with_start(vec![1.0; n])
}

pub fn rosenbrock(n: usize) -> ObjectiveFunction {
    let start = (0..n).map(|i| if i % 2 == 0 { -1.2 } else { 1.0 }).collect();
    ObjectiveFunction::new(format!("rosenbrock-{n}"), n, |x| {
        x.windows(2)
            .map(|w| 100.0 * (w[1] - w[0] * w[0]).powi(2) + (1.0 - w[0]).powi(2))
            .sum()
    })
    .with_domain(Domain::cube(n, -2.0, 2.0))
    .with_known_min(vec![1.0; n], 0.0)
    .with_gradient(|x| {
        let n = x.len();
        let mut g = vec![0.0; n];
        for i in 0..n - 1 {
            let r = x[i + 1] - x[i] * x[i];
            g[i] += -400.0 * x[i] * r - 2.0 * (1.0 - x[i]);
            g[i + 1] += 200.0 * r;
        }
        g
    })
    .with_hessian(|x| {
        let n = x.len();
        let mut h = vec![0.0; n * n];
        for i in 0..n - 1 {
            h[i * n + i] += 1200.0 * x[i] * x[i] - 400.0 * x[i + 1] + 2.0;
            h[(i + 1) * n + i + 1] += 200.0;
            h[i * n + i + 1] += -400.0 * x[i];
            h[(i + 1) * n + i] += -400.0 * x[i];
        }
        h
    })
    .with_start(start)
}

/// `Σ |x_i − 0.3|`, whose Lipschitz constant is exactly `√n`.
pub fn piecewise_linear(n: usize) -> ObjectiveFunction {
    ObjectiveFunction::new(format!("piecewise-linear-{n}"), n, |x| {
        x.iter().map(|v| (v - PIECEWISE_ANCHOR).abs()).sum()
    })
    .with_lipschitz((n as f64).sqrt())
    .with_known_min(vec![PIECEWISE_ANCHOR; n], 0.0)
    .with_start(vec![0.9; n])
}

/// Quadratic centres for `avg-quadratics-<count>-<n>`; fixed per `(count, n)`.
pub fn avg_quadratic_centres(count: usize, n: usize) -> Vec<Vec<f64>> {
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed_0000 ^ ((count as u64) << 16) ^ n as u64);
    (0..count)
        .map(|_| (0..n).map(|_| rng.gen_range(0.2..0.8)).collect())
        .collect()
}

pub fn avg_quadratics(count: usize, n: usize) -> ObjectiveFunction {
    let centres = avg_quadratic_centres(count, n);
    let scale = 1.0 / (2.0 * n as f64);
    let components: Vec<_> = centres
        .iter()
        .enumerate()
        .map(|(i, p)| {
            let p = p.clone();
            let pg = p.clone();
            let raw = ObjectiveFunction::new(format!("quadratic-{i}"), n, move |x| {
                scale * x.iter().zip(&p).map(|(a, b)| (a - b).powi(2)).sum::<f64>()
            });
            // Raw components take values in [0, 1/2] ⊂ [0, 1] on the box.
            let g = range_transform(&raw, 0.0, 1.0).expect("nondegenerate range");
            g.with_gradient(move |x| x.iter().zip(&pg).map(|(a, b)| 0.8 * 2.0 * scale * (a - b)).collect())
                .with_hessian(move |_| diagonal(n, 0.8 * 2.0 * scale))
        })
        .collect();
    let centroid: Vec<f64> = (0..n)
        .map(|j| centres.iter().map(|p| p[j]).sum::<f64>() / count as f64)
        .collect();
    let avg = AveragedObjective::new(components).expect("nonempty");
    let min_value = avg.mean(&centroid);
    avg.into_objective(format!("avg-quadratics-{count}-{n}"))
        .with_lipschitz(0.8 / (n as f64).sqrt())
        .with_known_min(centroid, min_value)
        .with_hessian(move |_| diagonal(n, 0.8 * 2.0 * scale))
        .with_start(vec![1.0; n])
}

fn diagonal(n: usize, v: f64) -> Vec<f64> {
    let mut h = vec![0.0; n * n];
    for i in 0..n {
        h[i * n + i] = v;
    }
    h
}
