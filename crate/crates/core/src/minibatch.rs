//! Mini-batch gradients for averaged objectives `f = (1/N) Σ f_i`.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::objective::{finite_diff_gradient, AveragedObjective, CountingOracle, ObjectiveFunction, ProbeMode};

/// Failure probability used by the classical gradient cost model.
pub const COST_MODEL_DELTA: f64 = 0.01;

/// Default finite-difference step.
pub const DEFAULT_H: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GradAccuracySpec {
    /// ℓ∞ accuracy target.
    pub epsilon: f64,
    pub delta: f64,
    /// Bound on every per-sample partial derivative.
    pub bound_b: f64,
}

impl GradAccuracySpec {
    pub fn new(epsilon: f64, delta: f64) -> Result<Self> {
        Self::with_bound(epsilon, delta, 1.0)
    }

    pub fn with_bound(epsilon: f64, delta: f64, bound_b: f64) -> Result<Self> {
        if !(epsilon > 0.0) {
            return Err(Error::param("epsilon", "must be positive"));
        }
        if !(delta > 0.0 && delta < 1.0) {
            return Err(Error::param("delta", "must lie in (0, 1)"));
        }
        if !(bound_b > 0.0) {
            return Err(Error::param("bound_b", "must be positive"));
        }
        Ok(Self {
            epsilon,
            delta,
            bound_b,
        })
    }
}

/// `⌈2·B²·ε⁻²·ln(2n/δ)⌉`: Hoeffding per coordinate plus a union bound.
pub fn required_batch_size(spec: &GradAccuracySpec, n: usize) -> usize {
    let raw = 2.0 * spec.bound_b.powi(2) * (2.0 * n as f64 / spec.delta).ln() / (spec.epsilon * spec.epsilon);
    (raw.ceil() as usize).max(1)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SampledGradient {
    pub estimate: Vec<f64>,
    pub batch_size: usize,
    pub seed: u64,
    pub queries_charged: u64,
}

/// Generator for step `stream` of a run seeded with `seed`.
pub fn stream_rng(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

/// Averages `k_b` per-sample gradients drawn uniformly with replacement.
/// Uses analytic gradients only when every component has one.
pub fn minibatch_gradient(
    avg: &AveragedObjective,
    x: &[f64],
    k_b: usize,
    seed: u64,
    stream: u64,
    h: f64,
) -> Result<SampledGradient> {
    if k_b == 0 {
        return Err(Error::param("k_b", "batch size must be positive"));
    }
    let n = avg.dim();
    if x.len() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            got: x.len(),
        });
    }
    let analytic = avg.all_have_gradients();
    let mut rng = stream_rng(seed, stream);
    let mut acc = vec![0.0; n];
    let mut queries = 0u64;
    for _ in 0..k_b {
        let i = rng.gen_range(0..avg.len());
        let component = avg.component(i);
        let g = if analytic {
            queries += 1;
            component.analytic_gradient(x).expect("checked above")
        } else {
            let mut o = CountingOracle::new(component.clone());
            let g = finite_diff_gradient(&mut o, x, h, ProbeMode::Clamp)?;
            queries += o.eval_count();
            g
        };
        for (a, gi) in acc.iter_mut().zip(g) {
            *a += gi;
        }
    }
    acc.iter_mut().for_each(|a| *a /= k_b as f64);
    Ok(SampledGradient {
        estimate: acc,
        batch_size: k_b,
        seed,
        queries_charged: queries,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum StepSchedule {
    Constant {
        eta: f64,
    },
    /// `η₀ / t` for `t = 1, 2, …`.
    Decay {
        eta0: f64,
    },
}

impl StepSchedule {
    pub fn eta(&self, t: usize) -> f64 {
        match *self {
            StepSchedule::Constant { eta } => eta,
            StepSchedule::Decay { eta0 } => eta0 / t as f64,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum BatchSize {
    FromSpec(GradAccuracySpec),
    Fixed { k_b: usize },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SgdConfig {
    pub steps: usize,
    pub schedule: StepSchedule,
    pub batch: BatchSize,
    pub h: f64,
    pub seed: u64,
    /// Adds uniform noise in `[−e, e]` to every gradient coordinate, to probe
    /// how SGD behaves with ℓ∞-accurate but biased gradients.
    pub linf_perturbation: Option<f64>,
}

impl SgdConfig {
    pub fn new(steps: usize, schedule: StepSchedule, batch: BatchSize) -> Self {
        Self {
            steps,
            schedule,
            batch,
            h: DEFAULT_H,
            seed: 0,
            linf_perturbation: None,
        }
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SgdRow {
    pub t: usize,
    pub x: Vec<f64>,
    pub f_probe: f64,
    pub k_b: usize,
    pub queries: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SgdTrajectory {
    /// Row 0 is the start point; row `t` follows step `t`.
    pub rows: Vec<SgdRow>,
    pub x_final: Vec<f64>,
    pub total_queries: u64,
}

/// `x ← x − η_t·ĝ_t`. `f_probe` values are uncounted diagnostics.
pub fn sgd_minimize(avg: &AveragedObjective, x0: &[f64], config: &SgdConfig) -> Result<SgdTrajectory> {
    if config.steps == 0 {
        return Err(Error::param("steps", "need at least one step"));
    }
    let k_b = match config.batch {
        BatchSize::FromSpec(spec) => required_batch_size(&spec, avg.dim()),
        BatchSize::Fixed { k_b } => k_b,
    };
    let mut x = x0.to_vec();
    let mut rows = vec![SgdRow {
        t: 0,
        x: x.clone(),
        f_probe: avg.mean(&x),
        k_b,
        queries: 0,
    }];
    let mut total = 0;
    let mut noise = stream_rng(config.seed ^ 0x9e37_79b9_7f4a_7c15, 0);
    for t in 1..=config.steps {
        let g = minibatch_gradient(avg, &x, k_b, config.seed, t as u64, config.h)?;
        let eta = config.schedule.eta(t);
        for (xi, gi) in x.iter_mut().zip(&g.estimate) {
            let e = config.linf_perturbation.map_or(0.0, |e| noise.gen_range(-e..=e));
            *xi -= eta * (gi + e);
        }
        total += g.queries_charged;
        rows.push(SgdRow {
            t,
            x: x.clone(),
            f_probe: avg.mean(&x),
            k_b,
            queries: g.queries_charged,
        });
    }
    Ok(SgdTrajectory {
        rows,
        x_final: x,
        total_queries: total,
    })
}

/// Affine map of `[lo, hi]` onto `[1/10, 9/10]`.
pub fn range_transform(f: &ObjectiveFunction, lo: f64, hi: f64) -> Result<ObjectiveFunction> {
    if !(lo < hi) || !lo.is_finite() || !hi.is_finite() {
        return Err(Error::DegenerateRange { lo, hi });
    }
    let scale = 0.8 / (hi - lo);
    let map = move |v: f64| 0.1 + scale * (v - lo);
    let inner = f.clone();
    let mut g = ObjectiveFunction::new(f.name().to_string(), f.dim(), move |x| map(inner.value(x)))
        .with_domain(f.domain().clone())
        .with_start(f.start());
    if let Some(k) = f.lipschitz() {
        g = g.with_lipschitz(k * scale);
    }
    if let Some((p, v)) = f.known_min() {
        g = g.with_known_min(p.to_vec(), map(v));
    }
    if f.has_gradient() {
        let inner = f.clone();
        g = g.with_gradient(move |x| {
            inner
                .analytic_gradient(x)
                .expect("gradient present")
                .into_iter()
                .map(|d| d * scale)
                .collect()
        });
    }
    if f.has_hessian() {
        let inner = f.clone();
        g = g.with_hessian(move |x| {
            inner
                .analytic_hessian(x)
                .expect("hessian present")
                .into_iter()
                .map(|d| d * scale)
                .collect()
        });
    }
    if !f.extends_beyond_domain() {
        g = g.bounded_only();
    }
    Ok(g)
}

const FIRST_ORDER_H: f64 = 1e-5;
const SECOND_ORDER_H: f64 = 1e-3;
const BOUND_TOLERANCE: f64 = 1e-4;

/// Finite-difference estimates of `|∂_α f(x)|` for every multi-index with
/// `|α| ≤ order`, in a fixed order: `f`, then `∂_i`, then `∂_i∂_j` for `i ≤ j`.
pub fn derivative_estimates(f: &ObjectiveFunction, x: &[f64], order: usize) -> Vec<(usize, f64)> {
    let n = x.len();
    let at = |shift: &[(usize, f64)]| {
        let mut y = x.to_vec();
        for (i, d) in shift {
            y[*i] += d;
        }
        f.value(&y)
    };
    let mut out = vec![(0, f.value(x).abs())];
    if order >= 1 {
        let h = FIRST_ORDER_H;
        for i in 0..n {
            out.push((1, ((at(&[(i, h)]) - at(&[(i, -h)])) / (2.0 * h)).abs()));
        }
    }
    if order >= 2 {
        let h = SECOND_ORDER_H;
        for i in 0..n {
            for j in i..n {
                let v = if i == j {
                    (at(&[(i, h)]) - 2.0 * f.value(x) + at(&[(i, -h)])) / (h * h)
                } else {
                    (at(&[(i, h), (j, h)]) - at(&[(i, h), (j, -h)]) - at(&[(i, -h), (j, h)]) + at(&[(i, -h), (j, -h)]))
                        / (4.0 * h * h)
                };
                out.push((2, v.abs()));
            }
        }
    }
    out
}

/// Checks that every averaged derivative of order `≤ order` is bounded by the
/// largest component derivative (plus `1e-4`), and, when every component
/// satisfies `|∂_α f_i| ≤ c^k k^{k/2}` with `k = |α|`, that the average does too.
pub fn averaged_derivative_bound_check(avg: &AveragedObjective, x: &[f64], order: usize, c: f64) -> Result<bool> {
    if order > 2 {
        return Err(Error::param("order", "only orders up to 2 are estimated"));
    }
    let mean = avg.clone().into_objective("mean");
    let ours = derivative_estimates(&mean, x, order);
    let per_component: Vec<_> = avg
        .components()
        .iter()
        .map(|fi| derivative_estimates(fi, x, order))
        .collect();
    for (idx, (k, value)) in ours.iter().enumerate() {
        let max_i = per_component.iter().map(|e| e[idx].1).fold(0.0f64, f64::max);
        if *value > max_i + BOUND_TOLERANCE {
            return Ok(false);
        }
        let kf = *k as f64;
        let claim = c.powf(kf) * kf.powf(kf / 2.0);
        let claim = if *k == 0 { 1.0 } else { claim };
        if max_i <= claim && *value > claim + BOUND_TOLERANCE {
            return Ok(false);
        }
    }
    Ok(true)
}

/// `(quantum, classical)`: `√n·tf/ε` vs `n·tf·ε⁻²·ln(2n/δ)` with `δ = 0.01`.
pub fn quantum_gradient_cost(n: u64, tf: f64, epsilon: f64) -> (f64, f64) {
    let n_f = n as f64;
    (
        n_f.sqrt() * tf / epsilon,
        n_f * tf / (epsilon * epsilon) * (2.0 * n_f / COST_MODEL_DELTA).ln(),
    )
}
