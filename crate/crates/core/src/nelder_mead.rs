//! Nelder-Mead simplex search.
//!
//! Index convention: `x₀` is the **worst** vertex, `x₁` the next-worst and
//! `x_n` the best, so `f(x₀) ≥ f(x₁) ≥ … ≥ f(x_n)`. The simplex keeps its
//! points in fixed slots and tracks which slot plays each role. Among equal
//! values the lower slot index counts as better.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::objective::CountingOracle;
use crate::quantum::{Emulator, QueryTally};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NMConfig {
    /// Reflection.
    pub alpha: f64,
    /// Expansion.
    pub beta: f64,
    /// Contraction.
    pub gamma: f64,
    /// Shrink.
    pub delta: f64,
    pub f_tolerance: f64,
    pub x_tolerance: f64,
    pub k_max: usize,
}

impl Default for NMConfig {
    fn default() -> Self {
        Self {
            alpha: 1.0,
            beta: 2.0,
            gamma: 0.5,
            delta: 0.5,
            f_tolerance: 1e-8,
            x_tolerance: 1e-8,
            k_max: 10_000,
        }
    }
}

impl NMConfig {
    pub fn new(alpha: f64, beta: f64, gamma: f64, delta: f64) -> Result<Self> {
        let c = Self {
            alpha,
            beta,
            gamma,
            delta,
            ..Self::default()
        };
        c.validate()?;
        Ok(c)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.alpha > 0.0) {
            return Err(Error::param("alpha", "must be positive"));
        }
        if !(self.beta > 1.0 && self.beta > self.alpha) {
            return Err(Error::param("beta", "must exceed both 1 and alpha"));
        }
        if !(self.gamma > 0.0 && self.gamma < 1.0) {
            return Err(Error::param("gamma", "must lie in (0, 1)"));
        }
        if !(self.delta > 0.0 && self.delta < 1.0) {
            return Err(Error::param("delta", "must lie in (0, 1)"));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum StepLabel {
    Reflect,
    Expand,
    OutsideContract,
    InsideContract,
    Shrink,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Simplex {
    points: Vec<Vec<f64>>,
    values: Vec<f64>,
    worst: usize,
    next_worst: usize,
    best: usize,
    point_sum: Vec<f64>,
    centroid: Vec<f64>,
}

/// `(f, index)` ordering; larger is worse.
fn worse(values: &[f64], a: usize, b: usize) -> bool {
    values[a].total_cmp(&values[b]).then(a.cmp(&b)).is_gt()
}

impl Simplex {
    /// Builds a simplex from points and their values, identifying roles classically.
    pub fn new(points: Vec<Vec<f64>>, values: Vec<f64>) -> Result<Self> {
        let n = points
            .first()
            .map(Vec::len)
            .ok_or(Error::Empty("simplex without points"))?;
        if n == 0 {
            return Err(Error::param("simplex", "zero-dimensional points"));
        }
        if points.len() != n + 1 {
            return Err(Error::DimensionMismatch {
                expected: n + 1,
                got: points.len(),
            });
        }
        if values.len() != points.len() || points.iter().any(|p| p.len() != n) {
            return Err(Error::param("simplex", "inconsistent point or value counts"));
        }
        let mut s = Self {
            point_sum: vec![0.0; n],
            centroid: vec![0.0; n],
            points,
            values,
            worst: 0,
            next_worst: 0,
            best: 0,
        };
        s.rebuild_sum();
        s.identify_classically();
        Ok(s)
    }

    /// Evaluates `points` (n + 1 queries) and builds the simplex.
    pub fn evaluate(points: Vec<Vec<f64>>, oracle: &mut CountingOracle) -> Result<Self> {
        let values = points
            .iter()
            .map(|p| oracle.evaluate_trial(p).map(|t| t.value))
            .collect::<Result<Vec<_>>>()?;
        Self::new(points, values)
    }

    /// `x₀` plus `scale·e_i` for each axis.
    pub fn right_angled(x0: &[f64], scale: f64) -> Vec<Vec<f64>> {
        let mut pts = vec![x0.to_vec()];
        for i in 0..x0.len() {
            let mut p = x0.to_vec();
            p[i] += scale;
            pts.push(p);
        }
        pts
    }

    pub fn dim(&self) -> usize {
        self.point_sum.len()
    }

    pub fn points(&self) -> &[Vec<f64>] {
        &self.points
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn worst(&self) -> usize {
        self.worst
    }

    pub fn next_worst(&self) -> usize {
        self.next_worst
    }

    pub fn best(&self) -> usize {
        self.best
    }

    pub fn point_sum(&self) -> &[f64] {
        &self.point_sum
    }

    pub fn centroid(&self) -> &[f64] {
        &self.centroid
    }

    pub fn best_point(&self) -> &[f64] {
        &self.points[self.best]
    }

    pub fn best_value(&self) -> f64 {
        self.values[self.best]
    }

    pub fn worst_value(&self) -> f64 {
        self.values[self.worst]
    }

    fn rebuild_sum(&mut self) {
        let n = self.dim();
        self.point_sum = (0..n).map(|j| self.points.iter().map(|p| p[j]).sum()).collect();
    }

    fn set_roles(&mut self, worst: usize, next_worst: usize, best: usize) {
        self.worst = worst;
        self.next_worst = next_worst;
        self.best = best;
        self.centroid = centroid_after_replace(self, worst);
    }

    fn identify_classically(&mut self) {
        let v = &self.values;
        let m = v.len();
        let mut worst = 0;
        let mut best = 0;
        for i in 1..m {
            if worse(v, i, worst) {
                worst = i;
            }
            if worse(v, best, i) {
                best = i;
            }
        }
        let mut next = if worst == 0 { 1 } else { 0 };
        for i in 0..m {
            if i != worst && worse(v, i, next) {
                next = i;
            }
        }
        self.set_roles(worst, next, best);
    }

    /// Roles via three emulated minimum-finding runs with failure probability
    /// `epsilon` each. Values are read from the cache; the returned tally is the
    /// emulator's charge.
    fn identify_quantum(&mut self, emulator: &mut Emulator, epsilon: f64) -> Result<QueryTally> {
        let m = self.values.len();
        let mut tally = QueryTally::default();
        let (best, t) = emulator.min_index(&self.values, epsilon)?;
        tally += t;
        // Reversed slots so that index ties resolve toward the higher slot.
        let negated: Vec<f64> = (0..m).map(|r| -self.values[m - 1 - r]).collect();
        let (r, t) = emulator.min_index(&negated, epsilon)?;
        tally += t;
        let worst = m - 1 - r;
        let mut excluded = negated;
        excluded[m - 1 - worst] = f64::INFINITY;
        let (r, t) = emulator.min_index(&excluded, epsilon)?;
        tally += t;
        let next_worst = m - 1 - r;
        self.set_roles(worst, next_worst, best);
        Ok(tally)
    }

    fn replace(&mut self, slot: usize, point: Vec<f64>, value: f64) {
        for (s, (new, old)) in self.point_sum.iter_mut().zip(point.iter().zip(&self.points[slot])) {
            *s += new - old;
        }
        self.points[slot] = point;
        self.values[slot] = value;
    }

    /// Cache coherence against raw values and centroid identity, for tests.
    pub fn is_consistent(&self, f: impl Fn(&[f64]) -> f64, tol: f64) -> bool {
        let coherent = self
            .points
            .iter()
            .zip(&self.values)
            .all(|(p, v)| f(p).to_bits() == v.to_bits());
        let recomputed = recompute_centroid(&self.points, self.worst);
        let centroid_ok = recomputed.iter().zip(&self.centroid).all(|(a, b)| (a - b).abs() <= tol);
        let ordered = self
            .values
            .iter()
            .all(|v| *v <= self.values[self.worst] && *v >= self.values[self.best]);
        coherent && centroid_ok && ordered
    }
}

/// Mean of every point except slot `exclude`, from scratch.
pub fn recompute_centroid(points: &[Vec<f64>], exclude: usize) -> Vec<f64> {
    let n = points[0].len();
    (0..n)
        .map(|j| {
            points
                .iter()
                .enumerate()
                .filter(|(i, _)| *i != exclude)
                .map(|(_, p)| p[j])
                .sum::<f64>()
                / n as f64
        })
        .collect()
}

/// `(point_sum − points[new_worst]) / n`, one pass.
pub fn centroid_after_replace(simplex: &Simplex, new_worst: usize) -> Vec<f64> {
    let n = simplex.dim() as f64;
    simplex
        .point_sum
        .iter()
        .zip(&simplex.points[new_worst])
        .map(|(s, w)| (s - w) / n)
        .collect()
}

/// Centroid of the shrunk simplex without the old worst: `δc + (1 − δ)x_n`.
pub fn centroid_after_shrink(centroid: &[f64], best: &[f64], delta: f64) -> Vec<f64> {
    centroid
        .iter()
        .zip(best)
        .map(|(c, b)| delta * c + (1.0 - delta) * b)
        .collect()
}

fn affine(c: &[f64], x: &[f64], t: f64) -> Vec<f64> {
    c.iter().zip(x).map(|(c, x)| c + t * (x - c)).collect()
}

enum Mode<'a> {
    Classical,
    Quantum { emulator: &'a mut Emulator, epsilon: f64 },
}

fn step_impl(
    s: &mut Simplex,
    oracle: &mut CountingOracle,
    config: &NMConfig,
    mode: &mut Mode,
) -> Result<(StepLabel, QueryTally)> {
    let c = s.centroid.clone();
    let x0 = s.points[s.worst].clone();
    let (f0, f1, fnb) = (s.values[s.worst], s.values[s.next_worst], s.values[s.best]);
    let worst = s.worst;
    let mut eval = |p: &[f64]| oracle.evaluate_trial(p).map(|t| t.value);

    let xr = affine(&c, &x0, -config.alpha);
    let fr = eval(&xr)?;
    let accepted = if fnb <= fr && fr < f1 {
        Some((xr, fr, StepLabel::Reflect))
    } else if fr < fnb {
        let xe = affine(&c, &xr, config.beta);
        let fe = eval(&xe)?;
        if fe < fr {
            Some((xe, fe, StepLabel::Expand))
        } else {
            Some((xr, fr, StepLabel::Reflect))
        }
    } else if f1 <= fr && fr < f0 {
        let xc = affine(&c, &xr, config.gamma);
        let fc = eval(&xc)?;
        (fc <= fr).then_some((xc, fc, StepLabel::OutsideContract))
    } else {
        let xc = affine(&c, &x0, config.gamma);
        let fc = eval(&xc)?;
        (fc < f0).then_some((xc, fc, StepLabel::InsideContract))
    };

    if let Some((p, v, label)) = accepted {
        s.replace(worst, p, v);
        s.identify_classically();
        return Ok((label, QueryTally::default()));
    }

    let best = s.best;
    let xb = s.points[best].clone();
    for i in 0..s.points.len() {
        if i == best {
            continue;
        }
        let p = affine(&xb, &s.points[i], config.delta);
        s.values[i] = match mode {
            Mode::Classical => oracle.evaluate_trial(&p)?.value,
            Mode::Quantum { .. } => oracle.function().trial_value(&p),
        };
        s.points[i] = p;
    }
    s.rebuild_sum();
    let tally = match mode {
        Mode::Classical => {
            s.identify_classically();
            QueryTally::default()
        }
        Mode::Quantum { emulator, epsilon } => s.identify_quantum(emulator, *epsilon)?,
    };
    Ok((StepLabel::Shrink, tally))
}

/// One iteration: exactly one of reflect, expand, outside/inside contraction
/// or shrink.
pub fn nm_step(simplex: &mut Simplex, oracle: &mut CountingOracle, config: &NMConfig) -> Result<StepLabel> {
    step_impl(simplex, oracle, config, &mut Mode::Classical).map(|(l, _)| l)
}

#[derive(Debug, Clone)]
pub enum InitialSimplex {
    Points(Vec<Vec<f64>>),
    /// Right-angled simplex at `x0`; `scale` defaults to 5% of the box diagonal.
    Start {
        x0: Vec<f64>,
        scale: Option<f64>,
    },
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct NMStats {
    pub k: usize,
    pub s: usize,
    pub step_labels: Vec<StepLabel>,
    pub queries_classical: u64,
    pub queries_quantum_emulated: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NMTraceRow {
    pub iter: usize,
    pub label: StepLabel,
    pub f_best: f64,
    pub f_worst: f64,
    pub queries_classical: u64,
    pub queries_quantum: u64,
}

#[derive(Debug, Clone)]
pub struct NMOutcome {
    pub best_point: Vec<f64>,
    pub best_value: f64,
    pub stats: NMStats,
    pub trace: Vec<NMTraceRow>,
    pub simplex: Simplex,
}

fn initial_points(oracle: &CountingOracle, initial: InitialSimplex) -> Vec<Vec<f64>> {
    match initial {
        InitialSimplex::Points(p) => p,
        InitialSimplex::Start { x0, scale } => {
            let domain = oracle.function().domain();
            let scale = scale.unwrap_or_else(|| {
                if domain.is_bounded() {
                    0.05 * domain.diagonal()
                } else {
                    0.05
                }
            });
            Simplex::right_angled(&x0, scale)
        }
    }
}

fn converged(s: &Simplex, config: &NMConfig) -> bool {
    let f_spread = s.worst_value() - s.best_value();
    let xb = s.best_point();
    let x_spread = s
        .points
        .iter()
        .flat_map(|p| p.iter().zip(xb).map(|(a, b)| (a - b).abs()))
        .fold(0.0, f64::max);
    f_spread <= config.f_tolerance || x_spread <= config.x_tolerance
}

fn run(
    oracle: &mut CountingOracle,
    initial: InitialSimplex,
    config: &NMConfig,
    mut mode: Mode,
    mut observer: impl FnMut(&Simplex, StepLabel),
) -> Result<NMOutcome> {
    config.validate()?;
    let points = initial_points(oracle, initial);
    if points.first().is_none_or(|p| p.len() != oracle.dim()) {
        return Err(Error::DimensionMismatch {
            expected: oracle.dim(),
            got: points.first().map_or(0, Vec::len),
        });
    }
    let before = oracle.eval_count();
    let mut stats = NMStats::default();
    let mut simplex = match &mut mode {
        Mode::Classical => Simplex::evaluate(points, oracle)?,
        Mode::Quantum { emulator, epsilon } => {
            let f = oracle.function();
            let values = points.iter().map(|p| f.trial_value(p)).collect();
            let mut s = Simplex::new(points, values)?;
            stats.queries_quantum_emulated += s.identify_quantum(emulator, *epsilon)?.oracle_queries;
            s
        }
    };
    stats.queries_classical = oracle.eval_count() - before;
    let mut trace = Vec::new();
    while stats.k < config.k_max && !converged(&simplex, config) {
        let q0 = oracle.eval_count();
        let (label, tally) = step_impl(&mut simplex, oracle, config, &mut mode)?;
        let qc = oracle.eval_count() - q0;
        stats.queries_classical += qc;
        stats.queries_quantum_emulated += tally.oracle_queries;
        if label == StepLabel::Shrink {
            stats.s += 1;
        }
        stats.step_labels.push(label);
        trace.push(NMTraceRow {
            iter: stats.k,
            label,
            f_best: simplex.best_value(),
            f_worst: simplex.worst_value(),
            queries_classical: qc,
            queries_quantum: tally.oracle_queries,
        });
        stats.k += 1;
        observer(&simplex, label);
    }
    Ok(NMOutcome {
        best_point: simplex.best_point().to_vec(),
        best_value: simplex.best_value(),
        stats,
        trace,
        simplex,
    })
}

pub fn nm_minimize(oracle: &mut CountingOracle, initial: InitialSimplex, config: &NMConfig) -> Result<NMOutcome> {
    run(oracle, initial, config, Mode::Classical, |_, _| {})
}

/// Like [`nm_minimize`], calling `observer` after every step.
pub fn nm_minimize_observed(
    oracle: &mut CountingOracle,
    initial: InitialSimplex,
    config: &NMConfig,
    observer: impl FnMut(&Simplex, StepLabel),
) -> Result<NMOutcome> {
    run(oracle, initial, config, Mode::Classical, observer)
}

/// Nelder-Mead whose sort step, at initialisation and after each shrink, uses
/// emulated minimum finding with failure probability `1/k_budget` per call.
/// Values at those points are not charged to the oracle.
pub fn nm_quantum_mode(
    oracle: &mut CountingOracle,
    initial: InitialSimplex,
    config: &NMConfig,
    emulator: &mut Emulator,
    k_budget: usize,
) -> Result<NMOutcome> {
    if k_budget < 2 {
        return Err(Error::param("k_budget", "must be at least 2"));
    }
    let epsilon = 1.0 / k_budget as f64;
    run(oracle, initial, config, Mode::Quantum { emulator, epsilon }, |_, _| {})
}

/// `(classical, quantum)`:
/// `(s+1)(n² + n·tf) + k(n + tf)` vs `(s+1)(n² + √n·tf·log_k) + k(n + tf)`.
pub fn nm_cost_models(k: f64, s: f64, n: f64, tf: f64, log_k: f64) -> (f64, f64) {
    let tail = k * (n + tf);
    (
        (s + 1.0) * (n * n + n * tf) + tail,
        (s + 1.0) * (n * n + n.sqrt() * tf * log_k) + tail,
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus::corpus_lookup;
    use crate::objective::{Domain, ObjectiveFunction};

    fn sphere2() -> CountingOracle {
        CountingOracle::new(corpus_lookup("sphere-2").unwrap())
    }

    #[test]
    fn outside_contraction_example() {
        let mut o = sphere2();
        let mut s = Simplex::evaluate(vec![vec![1.0, 1.0], vec![1.0, 0.0], vec![0.0, 0.0]], &mut o).unwrap();
        assert_eq!(s.worst(), 0);
        assert_eq!(s.centroid(), &[0.5, 0.0]);
        let label = nm_step(&mut s, &mut o, &NMConfig::default()).unwrap();
        assert_eq!(label, StepLabel::OutsideContract);
        assert_eq!(s.points()[0], vec![0.25, -0.5]);
        assert_eq!(s.values()[0], 0.3125);
        assert_eq!(o.eval_count(), 3 + 2);
        let f = o.function().clone();
        assert!(s.is_consistent(|x| f.value(x), 1e-9));
    }

    #[test]
    fn expansion_example() {
        let f = ObjectiveFunction::new("sum", 2, |x| x[0] + x[1]).with_domain(Domain::unbounded(2));
        let mut o = CountingOracle::new(f);
        let mut s = Simplex::evaluate(vec![vec![1.0, 1.0], vec![1.0, 0.0], vec![0.0, 1.0]], &mut o).unwrap();
        assert_eq!(s.centroid(), &[0.5, 0.5]);
        assert_eq!(
            nm_step(&mut s, &mut o, &NMConfig::default()).unwrap(),
            StepLabel::Expand
        );
        assert_eq!(s.points()[0], vec![-0.5, -0.5]);
    }

    #[test]
    fn plain_reflection_costs_one_query() {
        // Reflected point (0, -1.5) has value 2.25, between best 0 and next-worst 4.
        let f = ObjectiveFunction::new("sq", 2, |x| x[0] * x[0] + x[1] * x[1]).with_domain(Domain::unbounded(2));
        let mut o = CountingOracle::new(f);
        let pts = vec![vec![0.0, 0.0], vec![2.0, 0.0], vec![2.0, 1.5]];
        let mut s = Simplex::evaluate(pts, &mut o).unwrap();
        let before = o.eval_count();
        let label = nm_step(&mut s, &mut o, &NMConfig::default()).unwrap();
        assert_eq!(label, StepLabel::Reflect);
        assert_eq!(o.eval_count() - before, 1);
    }

    #[test]
    fn centroid_identities() {
        let mut o = sphere2();
        let s = Simplex::evaluate(vec![vec![1.0, 1.0], vec![1.0, 0.0], vec![0.2, 0.3]], &mut o).unwrap();
        let c = centroid_after_replace(&s, s.worst());
        let r = recompute_centroid(s.points(), s.worst());
        assert!(c.iter().zip(&r).all(|(a, b)| (a - b).abs() < 1e-12));

        let delta = 0.5;
        let xb = s.best_point().to_vec();
        let shrunk: Vec<Vec<f64>> = s
            .points()
            .iter()
            .enumerate()
            .map(|(i, p)| {
                if i == s.best() {
                    p.clone()
                } else {
                    affine(&xb, p, delta)
                }
            })
            .collect();
        let want = recompute_centroid(&shrunk, s.worst());
        let got = centroid_after_shrink(s.centroid(), &xb, delta);
        assert!(got.iter().zip(&want).all(|(a, b)| (a - b).abs() < 1e-12));
    }

    #[test]
    fn sphere5_converges_without_shrinking() {
        let mut o = CountingOracle::new(corpus_lookup("sphere-5").unwrap());
        let cfg = NMConfig {
            f_tolerance: 1e-6,
            ..NMConfig::default()
        };
        let out = nm_minimize(
            &mut o,
            InitialSimplex::Start {
                x0: vec![1.0; 5],
                scale: Some(0.5),
            },
            &cfg,
        )
        .unwrap();
        assert!(out.best_value <= 1e-3);
        assert_eq!(out.stats.s, 0);
        let bound = (out.stats.s + 1) * 6 + 2 * out.stats.k + 6;
        assert!(o.eval_count() as usize <= bound);
        assert_eq!(o.eval_count(), out.stats.queries_classical);
    }

    #[test]
    fn linear_one_dimensional_moves_left() {
        let f = ObjectiveFunction::new("x", 1, |x| x[0]).with_domain(Domain::unbounded(1));
        let mut o = CountingOracle::new(f);
        let cfg = NMConfig {
            k_max: 1,
            ..NMConfig::default()
        };
        let out = nm_minimize(&mut o, InitialSimplex::Points(vec![vec![0.0], vec![1.0]]), &cfg).unwrap();
        assert!(matches!(
            out.stats.step_labels[0],
            StepLabel::Reflect | StepLabel::Expand
        ));
        assert!(out.best_value < 0.0);
    }

    #[test]
    fn rosenbrock_improves() {
        let f = corpus_lookup("rosenbrock-2").unwrap();
        let start = f.value(&[-1.2, 1.0]);
        let mut o = CountingOracle::new(f);
        let cfg = NMConfig {
            k_max: 500,
            ..NMConfig::default()
        };
        let out = nm_minimize(
            &mut o,
            InitialSimplex::Start {
                x0: vec![-1.2, 1.0],
                scale: None,
            },
            &cfg,
        )
        .unwrap();
        assert!(out.best_value < start);
        assert_eq!(
            out.stats.s,
            out.stats
                .step_labels
                .iter()
                .filter(|l| **l == StepLabel::Shrink)
                .count()
        );
    }

    #[test]
    fn plateau_forces_shrink() {
        let f = ObjectiveFunction::new("flat", 2, |x| if x[0] + x[1] < 5.0 { 0.0 } else { 1.0 })
            .with_domain(Domain::unbounded(2));
        let raw = f.clone();
        let mut o = CountingOracle::new(f);
        let mut s = Simplex::evaluate(vec![vec![0.0, 0.0], vec![1.0, 0.0], vec![0.0, 1.0]], &mut o).unwrap();
        assert_eq!((s.best(), s.worst(), s.next_worst()), (0, 2, 1));
        assert_eq!(
            nm_step(&mut s, &mut o, &NMConfig::default()).unwrap(),
            StepLabel::Shrink
        );
        assert_eq!(s.points()[1], vec![0.5, 0.0]);
        assert_eq!(o.eval_count(), 3 + 2 + 2);
        assert!(s.is_consistent(|x| raw.value(x), 1e-12));
    }

    #[test]
    fn invariants_hold_every_step() {
        let f = ObjectiveFunction::new("bumpy", 2, |x| {
            x[0] * x[0] + x[1] * x[1] + 0.5 * (7.0 * x[0]).sin() * (7.0 * x[1]).sin()
        })
        .with_domain(Domain::unbounded(2));
        let raw = f.clone();
        let mut o = CountingOracle::new(f);
        let cfg = NMConfig {
            k_max: 300,
            ..NMConfig::default()
        };
        let mut checked = 0;
        let out = nm_minimize_observed(
            &mut o,
            InitialSimplex::Points(vec![vec![1.0, 1.0], vec![1.3, 1.0], vec![1.0, 1.3]]),
            &cfg,
            |s, _| {
                assert!(s.is_consistent(|x| raw.value(x), 1e-9));
                checked += 1;
            },
        )
        .unwrap();
        assert_eq!(checked, out.stats.k);
    }

    #[test]
    fn quantum_mode_two_vertices() {
        let f = ObjectiveFunction::new("x", 1, |x| (x[0] - 0.3).powi(2));
        let mut o = CountingOracle::new(f);
        let mut em = Emulator::seeded(4);
        let cfg = NMConfig {
            k_max: 40,
            ..NMConfig::default()
        };
        let out = nm_quantum_mode(
            &mut o,
            InitialSimplex::Points(vec![vec![0.9], vec![0.8]]),
            &cfg,
            &mut em,
            100,
        )
        .unwrap();
        assert!(out.best_value < 0.01);
        assert!(out.stats.queries_quantum_emulated > 0);
        assert_eq!(o.eval_count(), out.stats.queries_classical);
    }

    #[test]
    fn cost_model_examples() {
        assert_eq!(nm_cost_models(1.0, 0.0, 1.0, 1.0, 1.0), (4.0, 4.0));
        let (c, q) = nm_cost_models(100.0, 10.0, 1e4, 1e6, 7.0);
        assert!(q < c);
    }

    #[test]
    fn config_validation() {
        assert!(NMConfig::new(1.0, 0.9, 0.5, 0.5).is_err());
        assert!(NMConfig::new(2.0, 1.5, 0.5, 0.5).is_err());
        assert!(NMConfig::new(1.0, 2.0, 1.0, 0.5).is_err());
        assert!(NMConfig::new(1.0, 2.0, 0.5, 0.5).is_ok());
    }
}
