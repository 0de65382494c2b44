//! Backtracking line search with pluggable descent directions.
//!
//! Each iteration picks a descent direction `d`, then the smallest `m` with
//! `f(x + γ^m d) ≤ f(x) + β γ^m D_d f(x)` (the Armijo condition), found either
//! by a linear scan or by the emulated first-hit search.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::objective::{dot, finite_diff_gradient, norm2, CountingOracle, ProbeMode};
use crate::quantum::{Emulator, QueryTally};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LineSearchConfig {
    pub gamma: f64,
    pub beta: f64,
    pub m_cap: u32,
    pub k_max: usize,
    pub grad_tolerance: f64,
    /// Finite-difference step used when `f` has no analytic gradient.
    pub fd_step: f64,
}

impl Default for LineSearchConfig {
    fn default() -> Self {
        Self {
            gamma: 0.5,
            beta: 0.5,
            m_cap: 64,
            k_max: 1000,
            grad_tolerance: 1e-6,
            fd_step: 1e-6,
        }
    }
}

impl LineSearchConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.gamma > 0.0 && self.gamma < 1.0) {
            return Err(Error::param("gamma", "must lie in (0, 1)"));
        }
        if !(self.beta > 0.0 && self.beta < 1.0) {
            return Err(Error::param("beta", "must lie in (0, 1)"));
        }
        if !(self.grad_tolerance >= 0.0) {
            return Err(Error::param("grad_tolerance", "must be nonnegative"));
        }
        if !(self.fd_step > 0.0) {
            return Err(Error::param("fd_step", "must be positive"));
        }
        Ok(())
    }
}

/// A point, its value, a direction and the directional derivative along it.
#[derive(Debug, Clone, Copy)]
pub struct Probe<'a> {
    pub x: &'a [f64],
    pub fx: f64,
    pub d: &'a [f64],
    pub ddf: f64,
}

impl Probe<'_> {
    fn point(&self, eta: f64) -> Vec<f64> {
        self.x.iter().zip(self.d).map(|(x, d)| x + eta * d).collect()
    }

    fn check(&self) -> Result<()> {
        if !(self.ddf < 0.0) {
            return Err(Error::Direction(format!(
                "directional derivative {} is not negative",
                self.ddf
            )));
        }
        Ok(())
    }
}

fn armijo_rhs(probe: &Probe, eta: f64, beta: f64) -> f64 {
    probe.fx + beta * eta * probe.ddf
}

/// `f(x + ηd) ≤ f(x) + βηD_d f`; one query.
pub fn armijo_holds(oracle: &mut CountingOracle, probe: &Probe, eta: f64, beta: f64) -> Result<bool> {
    probe.check()?;
    let v = oracle.evaluate_trial(&probe.point(eta))?.value;
    Ok(v <= armijo_rhs(probe, eta, beta))
}

fn scan_m0(oracle: &mut CountingOracle, probe: &Probe, gamma: f64, beta: f64, m_cap: u32) -> Result<(u32, f64)> {
    probe.check()?;
    for m in 0..=m_cap {
        let eta = gamma.powi(m as i32);
        let v = oracle.evaluate_trial(&probe.point(eta))?.value;
        if v <= armijo_rhs(probe, eta, beta) {
            return Ok((m, v));
        }
    }
    Err(Error::StepCap { cap: m_cap })
}

/// Smallest `m ≤ m_cap` satisfying the Armijo condition at `η = γ^m`, by a
/// linear scan costing `m₀ + 1` queries.
pub fn armijo_m0(oracle: &mut CountingOracle, probe: &Probe, gamma: f64, beta: f64, m_cap: u32) -> Result<u32> {
    scan_m0(oracle, probe, gamma, beta, m_cap).map(|(m, _)| m)
}

/// Number of first-hit runs allowed before falling back to a scan.
pub fn quantum_m0_runs(k: usize) -> u32 {
    ((2.0 * (k.max(2) as f64).log2()).ceil() as u32).max(2)
}

/// `m₀` from emulated first-hit searches over `m ∈ [0, m_cap]`: the first value
/// returned by two runs is accepted; after [`quantum_m0_runs`] runs without
/// agreement a classical scan decides. The oracle is not charged; emulator
/// charges (and any fallback scan) go into the returned tally.
pub fn quantum_m0(
    oracle: &CountingOracle,
    probe: &Probe,
    gamma: f64,
    beta: f64,
    m_cap: u32,
    emulator: &mut Emulator,
    k: usize,
) -> Result<(u32, QueryTally)> {
    probe.check()?;
    let f = oracle.function();
    let holds = |m: usize| {
        let eta = gamma.powi(m as i32);
        f.trial_value(&probe.point(eta)) <= armijo_rhs(probe, eta, beta)
    };
    let n = m_cap as usize + 1;
    let truth: Vec<bool> = (0..n).map(holds).collect();
    let Some(first) = truth.iter().position(|b| *b) else {
        return Err(Error::StepCap { cap: m_cap });
    };
    let mut tally = QueryTally::default();
    let mut seen: Vec<usize> = Vec::new();
    for _ in 0..quantum_m0_runs(k) {
        let (hit, t) = emulator.first_hit(n, |m| truth[m]);
        tally += t;
        if let Some(m) = hit {
            if seen.contains(&m) {
                return Ok((m as u32, tally));
            }
            seen.push(m);
        }
    }
    tally.oracle_queries += first as u64 + 1;
    Ok((first as u32, tally))
}

/// Upper end of the step interval on which the Armijo condition must hold when
/// the gradient is `L`-Lipschitz: `2(β − 1)·D_d f / (L‖d‖²)`.
pub fn gould_interval(lipschitz: f64, ddf: f64, beta: f64, d_norm: f64) -> Result<f64> {
    if !(lipschitz > 0.0) {
        return Err(Error::param("L", "gradient Lipschitz constant must be positive"));
    }
    if !(ddf < 0.0) {
        return Err(Error::param("ddf", "directional derivative must be negative"));
    }
    if !(d_norm > 0.0) {
        return Err(Error::param("d_norm", "direction must be nonzero"));
    }
    Ok(2.0 * (beta - 1.0) * ddf / (lipschitz * d_norm * d_norm))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum DirectionKind {
    SteepestDescent,
    Newton,
    Bfgs,
    Coordinate,
}

impl std::str::FromStr for DirectionKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "steepest" | "steepest-descent" => Ok(Self::SteepestDescent),
            "newton" => Ok(Self::Newton),
            "bfgs" => Ok(Self::Bfgs),
            "coordinate" => Ok(Self::Coordinate),
            other => Err(Error::param("direction", format!("unknown direction `{other}`"))),
        }
    }
}

/// Produces descent directions. BFGS keeps an inverse-curvature approximation.
#[derive(Debug, Clone)]
pub struct DirectionProvider {
    kind: DirectionKind,
    n: usize,
    inverse: Vec<f64>,
    previous: Option<(Vec<f64>, Vec<f64>)>,
    coordinate_tolerance: f64,
    last_tau: f64,
}

impl DirectionProvider {
    pub fn new(kind: DirectionKind, n: usize) -> Self {
        Self {
            kind,
            n,
            inverse: identity(n),
            previous: None,
            coordinate_tolerance: 0.0,
            last_tau: 0.0,
        }
    }

    pub fn steepest(n: usize) -> Self {
        Self::new(DirectionKind::SteepestDescent, n)
    }

    pub fn bfgs(n: usize) -> Self {
        Self::new(DirectionKind::Bfgs, n)
    }

    pub fn kind(&self) -> DirectionKind {
        self.kind
    }

    /// Row-major inverse-curvature approximation (BFGS only).
    pub fn curvature(&self) -> &[f64] {
        &self.inverse
    }

    /// Arithmetic cost of the most recent direction, in scalar operations.
    pub fn tau_model(&self) -> f64 {
        self.last_tau
    }

    fn steepest_dir(g: &[f64]) -> Vec<f64> {
        let norm = norm2(g);
        g.iter().map(|v| -v / norm).collect()
    }

    /// A descent direction at `x`, or `None` when the provider has nothing left
    /// to offer (coordinate mode with every partial below tolerance).
    pub fn direction(&mut self, oracle: &CountingOracle, x: &[f64], g: &[f64]) -> Result<Option<Vec<f64>>> {
        let n = self.n as f64;
        let d = match self.kind {
            DirectionKind::SteepestDescent => {
                self.last_tau = n;
                Self::steepest_dir(g)
            }
            DirectionKind::Coordinate => {
                self.last_tau = n;
                let tol = self.coordinate_tolerance;
                let Some(i) = g.iter().position(|v| v.abs() > tol) else {
                    return Ok(None);
                };
                let mut d = vec![0.0; self.n];
                d[i] = -g[i].signum();
                d
            }
            DirectionKind::Newton => {
                let h = oracle
                    .function()
                    .analytic_hessian(x)
                    .ok_or_else(|| Error::Direction("newton directions need a Hessian callback".into()))?;
                self.last_tau = n * n * n;
                let neg: Vec<f64> = g.iter().map(|v| -v).collect();
                match solve(h, neg, self.n) {
                    Some(d) if dot(&d, g) < 0.0 => d,
                    _ => Self::steepest_dir(g),
                }
            }
            DirectionKind::Bfgs => {
                if let Some((xp, gp)) = self.previous.take() {
                    let s: Vec<f64> = x.iter().zip(&xp).map(|(a, b)| a - b).collect();
                    let y: Vec<f64> = g.iter().zip(&gp).map(|(a, b)| a - b).collect();
                    bfgs_update(&mut self.inverse, &s, &y, self.n);
                }
                self.previous = Some((x.to_vec(), g.to_vec()));
                self.last_tau = n * n;
                let d = mat_vec(&self.inverse, g, self.n)
                    .into_iter()
                    .map(|v| -v)
                    .collect::<Vec<_>>();
                if dot(&d, g) < 0.0 {
                    d
                } else {
                    self.inverse = identity(self.n);
                    g.iter().map(|v| -v).collect()
                }
            }
        };
        Ok(Some(d))
    }
}

fn identity(n: usize) -> Vec<f64> {
    let mut m = vec![0.0; n * n];
    for i in 0..n {
        m[i * n + i] = 1.0;
    }
    m
}

fn mat_vec(m: &[f64], v: &[f64], n: usize) -> Vec<f64> {
    (0..n).map(|i| dot(&m[i * n..(i + 1) * n], v)).collect()
}

/// `H ← (I − ρsyᵀ)H(I − ρysᵀ) + ρssᵀ`, skipped when `sᵀy ≤ 0`.
pub fn bfgs_update(h: &mut [f64], s: &[f64], y: &[f64], n: usize) -> bool {
    let sy = dot(s, y);
    if !(sy > 0.0) {
        return false;
    }
    let rho = 1.0 / sy;
    let hy = mat_vec(h, y, n);
    let yhy = dot(y, &hy);
    // Expanded form: H − ρ(H y sᵀ + s yᵀ H) + (ρ² yᵀHy + ρ) s sᵀ.
    let c = rho * rho * yhy + rho;
    for i in 0..n {
        for j in 0..n {
            h[i * n + j] += -rho * (hy[i] * s[j] + s[i] * hy[j]) + c * s[i] * s[j];
        }
    }
    for i in 0..n {
        for j in i + 1..n {
            let avg = 0.5 * (h[i * n + j] + h[j * n + i]);
            h[i * n + j] = avg;
            h[j * n + i] = avg;
        }
    }
    true
}

/// Gaussian elimination with partial pivoting.
fn solve(mut a: Vec<f64>, mut b: Vec<f64>, n: usize) -> Option<Vec<f64>> {
    for col in 0..n {
        let piv = (col..n).max_by(|p, q| a[p * n + col].abs().total_cmp(&a[q * n + col].abs()))?;
        if a[piv * n + col].abs() < 1e-300 {
            return None;
        }
        if piv != col {
            for k in 0..n {
                a.swap(piv * n + k, col * n + k);
            }
            b.swap(piv, col);
        }
        for r in col + 1..n {
            let factor = a[r * n + col] / a[col * n + col];
            for k in col..n {
                a[r * n + k] -= factor * a[col * n + k];
            }
            b[r] -= factor * b[col];
        }
    }
    let mut x = vec![0.0; n];
    for i in (0..n).rev() {
        let s: f64 = (i + 1..n).map(|k| a[i * n + k] * x[k]).sum();
        x[i] = (b[i] - s) / a[i * n + i];
    }
    x.iter().all(|v| v.is_finite()).then_some(x)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IterationRecord {
    pub iter: usize,
    /// Accepted point after the step.
    pub x: Vec<f64>,
    pub d: Vec<f64>,
    pub ddf: f64,
    pub m0: u32,
    pub eta: f64,
    /// Value at the accepted point.
    pub f: f64,
    /// Direction cost: arithmetic work plus gradient queries.
    pub tau: f64,
    pub queries_classical: u64,
    pub queries_quantum: u64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum DescentStatus {
    /// Gradient norm at or below tolerance (including `∇f = 0`).
    Stationary,
    /// The direction provider had no descent direction to offer.
    NoDirection,
    IterationLimit,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IterationTrace {
    pub rows: Vec<IterationRecord>,
    pub status: DescentStatus,
    pub f_initial: f64,
    /// Queries spent before the first iteration (evaluating `f(x₀)`).
    pub initial_queries: u64,
    /// Gradient queries of the final, terminating check.
    pub terminal_queries: u64,
}

impl IterationTrace {
    pub fn k(&self) -> usize {
        self.rows.len()
    }

    pub fn m0_list(&self) -> Vec<u32> {
        self.rows.iter().map(|r| r.m0).collect()
    }

    pub fn m_max(&self) -> u32 {
        self.rows.iter().map(|r| r.m0).max().unwrap_or(0)
    }

    pub fn queries_classical(&self) -> u64 {
        self.initial_queries + self.terminal_queries + self.rows.iter().map(|r| r.queries_classical).sum::<u64>()
    }

    pub fn queries_quantum(&self) -> u64 {
        self.rows.iter().map(|r| r.queries_quantum).sum()
    }

    /// Mean direction cost per iteration (0 for an empty trace).
    pub fn mean_tau(&self) -> f64 {
        if self.rows.is_empty() {
            0.0
        } else {
            self.rows.iter().map(|r| r.tau).sum::<f64>() / self.rows.len() as f64
        }
    }

    pub fn rows_json(&self) -> serde_json::Value {
        serde_json::Value::Array(
            self.rows
                .iter()
                .map(|r| {
                    serde_json::json!({
                        "iter": r.iter,
                        "m0": r.m0,
                        "eta": r.eta,
                        "f": r.f,
                        "queries_classical": r.queries_classical,
                        "queries_quantum": r.queries_quantum,
                    })
                })
                .collect(),
        )
    }
}

fn gradient(oracle: &mut CountingOracle, x: &[f64], h: f64) -> Result<(Vec<f64>, u64)> {
    if let Some(g) = oracle.function().analytic_gradient(x) {
        return Ok((g, 0));
    }
    let before = oracle.eval_count();
    let g = finite_diff_gradient(oracle, x, h, ProbeMode::Clamp)?;
    Ok((g, oracle.eval_count() - before))
}

/// Backtracking descent from `x0`. With an emulator, step sizes come from
/// [`quantum_m0`] and only the accepted point is evaluated classically.
pub fn backtracking_descent(
    oracle: &mut CountingOracle,
    x0: &[f64],
    provider: &mut DirectionProvider,
    config: &LineSearchConfig,
    mut emulator: Option<&mut Emulator>,
) -> Result<(Vec<f64>, IterationTrace)> {
    config.validate()?;
    provider.coordinate_tolerance = config.grad_tolerance;
    let before = oracle.eval_count();
    let mut fx = oracle.evaluate(x0)?;
    let mut x = x0.to_vec();
    let mut trace = IterationTrace {
        rows: Vec::new(),
        status: DescentStatus::IterationLimit,
        f_initial: fx,
        initial_queries: oracle.eval_count() - before,
        terminal_queries: 0,
    };
    for iter in 0..config.k_max {
        let (g, grad_queries) = gradient(oracle, &x, config.fd_step)?;
        if norm2(&g) <= config.grad_tolerance {
            trace.terminal_queries = grad_queries;
            trace.status = DescentStatus::Stationary;
            return Ok((x, trace));
        }
        let Some(d) = provider.direction(oracle, &x, &g)? else {
            trace.terminal_queries = grad_queries;
            trace.status = DescentStatus::NoDirection;
            return Ok((x, trace));
        };
        let ddf = dot(&g, &d);
        let probe = Probe { x: &x, fx, d: &d, ddf };
        let step_start = oracle.eval_count();
        let (m0, f_new, quantum) = match emulator.as_deref_mut() {
            None => {
                let (m0, v) = scan_m0(oracle, &probe, config.gamma, config.beta, config.m_cap)?;
                (m0, v, 0)
            }
            Some(em) => {
                let (m0, tally) = quantum_m0(
                    oracle,
                    &probe,
                    config.gamma,
                    config.beta,
                    config.m_cap,
                    em,
                    config.k_max,
                )?;
                let eta = config.gamma.powi(m0 as i32);
                let v = oracle.evaluate_trial(&probe.point(eta))?.value;
                (m0, v, tally.oracle_queries)
            }
        };
        let eta = config.gamma.powi(m0 as i32);
        let x_new = probe.point(eta);
        let step_queries = oracle.eval_count() - step_start;
        trace.rows.push(IterationRecord {
            iter,
            x: x_new.clone(),
            d: d.clone(),
            ddf,
            m0,
            eta,
            f: f_new,
            tau: provider.tau_model() + grad_queries as f64,
            queries_classical: grad_queries + step_queries,
            queries_quantum: quantum,
        });
        x = x_new;
        fx = f_new;
    }
    Ok((x, trace))
}
