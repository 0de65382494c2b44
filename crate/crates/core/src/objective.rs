//! Objective functions, the query-counting oracle and finite-difference gradients.
//!
//! An [`ObjectiveFunction`] is an immutable, cheaply clonable description of
//! `f` over an axis-aligned box. Every algorithm in this crate reaches `f`
//! through a [`CountingOracle`], whose counter is the unit-cost proxy for
//! `T(f)`: one evaluation is one query.

use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};

pub type Evaluator = Arc<dyn Fn(&[f64]) -> f64 + Send + Sync>;
pub type GradientFn = Arc<dyn Fn(&[f64]) -> Vec<f64> + Send + Sync>;
/// Row-major `n × n` Hessian.
pub type HessianFn = Arc<dyn Fn(&[f64]) -> Vec<f64> + Send + Sync>;

/// Closed axis-aligned box. Bounds may be infinite.
#[derive(Debug, Clone, PartialEq, serde::Serialize)]
pub struct Domain {
    lower: Vec<f64>,
    upper: Vec<f64>,
}

impl Domain {
    pub fn new(lower: Vec<f64>, upper: Vec<f64>) -> Result<Self> {
        if lower.len() != upper.len() {
            return Err(Error::DimensionMismatch {
                expected: lower.len(),
                got: upper.len(),
            });
        }
        if lower.is_empty() {
            return Err(Error::param("domain", "zero-dimensional box"));
        }
        if lower.iter().zip(&upper).any(|(l, u)| !(l <= u)) {
            return Err(Error::param("domain", "lower bound exceeds upper bound"));
        }
        Ok(Self { lower, upper })
    }

    pub fn unit(n: usize) -> Self {
        Self {
            lower: vec![0.0; n],
            upper: vec![1.0; n],
        }
    }

    pub fn cube(n: usize, lo: f64, hi: f64) -> Self {
        Self {
            lower: vec![lo; n],
            upper: vec![hi; n],
        }
    }

    pub fn unbounded(n: usize) -> Self {
        Self::cube(n, f64::NEG_INFINITY, f64::INFINITY)
    }

    pub fn dim(&self) -> usize {
        self.lower.len()
    }

    pub fn lower(&self) -> &[f64] {
        &self.lower
    }

    pub fn upper(&self) -> &[f64] {
        &self.upper
    }

    pub fn width(&self, i: usize) -> f64 {
        self.upper[i] - self.lower[i]
    }

    pub fn is_bounded(&self) -> bool {
        self.lower.iter().chain(&self.upper).all(|v| v.is_finite())
    }

    /// Euclidean length of the box diagonal (infinite for unbounded boxes).
    pub fn diagonal(&self) -> f64 {
        (0..self.dim()).map(|i| self.width(i).powi(2)).sum::<f64>().sqrt()
    }

    pub fn center(&self) -> Vec<f64> {
        self.lower
            .iter()
            .zip(&self.upper)
            .map(|(l, u)| {
                if l.is_finite() && u.is_finite() {
                    0.5 * (l + u)
                } else if l.is_finite() {
                    *l
                } else if u.is_finite() {
                    *u
                } else {
                    0.0
                }
            })
            .collect()
    }

    /// First coordinate outside the box, if any.
    pub fn violation(&self, x: &[f64]) -> Option<usize> {
        x.iter()
            .enumerate()
            .find(|(i, v)| !(**v >= self.lower[*i] && **v <= self.upper[*i]))
            .map(|(i, _)| i)
    }

    pub fn contains(&self, x: &[f64]) -> bool {
        self.violation(x).is_none()
    }

    pub fn clamp(&self, x: &[f64]) -> Vec<f64> {
        x.iter()
            .enumerate()
            .map(|(i, v)| v.clamp(self.lower[i], self.upper[i]))
            .collect()
    }

    /// Maps unit-cube coordinates onto this box. Requires a bounded box.
    pub fn from_unit(&self, u: &[f64]) -> Vec<f64> {
        u.iter()
            .enumerate()
            .map(|(i, t)| self.lower[i] + t * self.width(i))
            .collect()
    }
}

/// `f` together with everything the algorithms may know about it.
#[derive(Clone)]
pub struct ObjectiveFunction {
    name: String,
    domain: Domain,
    evaluator: Evaluator,
    lipschitz: Option<f64>,
    known_min: Option<(Vec<f64>, f64)>,
    gradient: Option<GradientFn>,
    hessian: Option<HessianFn>,
    start: Option<Vec<f64>>,
    extends_beyond_domain: bool,
    averaged: Option<Arc<AveragedObjective>>,
}

impl fmt::Debug for ObjectiveFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("ObjectiveFunction")
            .field("name", &self.name)
            .field("dim", &self.dim())
            .field("lipschitz", &self.lipschitz)
            .field("known_min", &self.known_min)
            .field("analytic_gradient", &self.gradient.is_some())
            .finish()
    }
}

impl ObjectiveFunction {
    /// A function on the unit hypercube `[0,1]^n`.
    pub fn new<F>(name: impl Into<String>, dim: usize, evaluator: F) -> Self
    where
        F: Fn(&[f64]) -> f64 + Send + Sync + 'static,
    {
        Self {
            name: name.into(),
            domain: Domain::unit(dim),
            evaluator: Arc::new(evaluator),
            lipschitz: None,
            known_min: None,
            gradient: None,
            hessian: None,
            start: None,
            extends_beyond_domain: true,
            averaged: None,
        }
    }

    pub fn with_domain(mut self, domain: Domain) -> Self {
        assert_eq!(domain.dim(), self.dim(), "domain dimension mismatch");
        self.domain = domain;
        self
    }

    pub fn with_lipschitz(mut self, k: f64) -> Self {
        assert!(k >= 0.0, "Lipschitz constant must be nonnegative");
        self.lipschitz = Some(k);
        self
    }

    pub fn with_known_min(mut self, point: Vec<f64>, value: f64) -> Self {
        self.known_min = Some((point, value));
        self
    }

    pub fn with_gradient<G>(mut self, gradient: G) -> Self
    where
        G: Fn(&[f64]) -> Vec<f64> + Send + Sync + 'static,
    {
        self.gradient = Some(Arc::new(gradient));
        self
    }

    pub fn with_hessian<H>(mut self, hessian: H) -> Self
    where
        H: Fn(&[f64]) -> Vec<f64> + Send + Sync + 'static,
    {
        self.hessian = Some(Arc::new(hessian));
        self
    }

    pub fn with_start(mut self, start: Vec<f64>) -> Self {
        self.start = Some(start);
        self
    }

    /// Marks `f` as defined only on its box: trial points outside are clamped.
    pub fn bounded_only(mut self) -> Self {
        self.extends_beyond_domain = false;
        self
    }

    pub(crate) fn with_averaged(mut self, avg: Arc<AveragedObjective>) -> Self {
        self.averaged = Some(avg);
        self
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn dim(&self) -> usize {
        self.domain.dim()
    }

    pub fn domain(&self) -> &Domain {
        &self.domain
    }

    pub fn lipschitz(&self) -> Option<f64> {
        self.lipschitz
    }

    pub fn known_min(&self) -> Option<(&[f64], f64)> {
        self.known_min.as_ref().map(|(p, v)| (p.as_slice(), *v))
    }

    pub fn has_gradient(&self) -> bool {
        self.gradient.is_some()
    }

    pub fn has_hessian(&self) -> bool {
        self.hessian.is_some()
    }

    pub fn extends_beyond_domain(&self) -> bool {
        self.extends_beyond_domain
    }

    /// Suggested starting point for local methods; the box centre otherwise.
    pub fn start(&self) -> Vec<f64> {
        self.start.clone().unwrap_or_else(|| self.domain.center())
    }

    /// The component functions, when `f` is an average.
    pub fn averaged(&self) -> Option<&AveragedObjective> {
        self.averaged.as_deref()
    }

    /// Raw, uncounted evaluation. Algorithms go through [`CountingOracle`].
    pub fn value(&self, x: &[f64]) -> f64 {
        (self.evaluator)(x)
    }

    /// Uncounted evaluation of a trial point, clamped onto the box when `f`
    /// does not extend beyond it.
    pub fn trial_value(&self, x: &[f64]) -> f64 {
        if self.extends_beyond_domain || self.domain.contains(x) {
            self.value(x)
        } else {
            self.value(&self.domain.clamp(x))
        }
    }

    pub fn analytic_gradient(&self, x: &[f64]) -> Option<Vec<f64>> {
        self.gradient.as_ref().map(|g| g(x))
    }

    pub fn analytic_hessian(&self, x: &[f64]) -> Option<Vec<f64>> {
        self.hessian.as_ref().map(|h| h(x))
    }
}

/// Outcome of evaluating a trial point that may leave the box.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Trial {
    pub value: f64,
    /// The point was moved onto the box before evaluation.
    pub clamped: bool,
}

/// Wraps a function and counts every evaluation.
#[derive(Debug, Clone)]
pub struct CountingOracle {
    function: ObjectiveFunction,
    eval_count: u64,
}

impl CountingOracle {
    pub fn new(function: ObjectiveFunction) -> Self {
        Self {
            function,
            eval_count: 0,
        }
    }

    pub fn function(&self) -> &ObjectiveFunction {
        &self.function
    }

    pub fn dim(&self) -> usize {
        self.function.dim()
    }

    pub fn eval_count(&self) -> u64 {
        self.eval_count
    }

    pub fn reset(&mut self) {
        self.eval_count = 0;
    }

    fn check_dim(&self, x: &[f64]) -> Result<()> {
        if x.len() != self.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                got: x.len(),
            });
        }
        Ok(())
    }

    /// `f(x)` for `x` inside the closed domain box.
    pub fn evaluate(&mut self, x: &[f64]) -> Result<f64> {
        self.check_dim(x)?;
        if let Some(coordinate) = self.function.domain.violation(x) {
            return Err(Error::DomainViolation {
                point: x.to_vec(),
                coordinate,
            });
        }
        self.eval_count += 1;
        Ok(self.function.value(x))
    }

    /// Evaluates a trial point produced by a local method. Points outside the
    /// box are evaluated as-is when `f` extends beyond it, otherwise clamped.
    pub fn evaluate_trial(&mut self, x: &[f64]) -> Result<Trial> {
        self.check_dim(x)?;
        if self.function.domain.contains(x) || self.function.extends_beyond_domain {
            self.eval_count += 1;
            return Ok(Trial {
                value: self.function.value(x),
                clamped: false,
            });
        }
        let y = self.function.domain.clamp(x);
        self.eval_count += 1;
        Ok(Trial {
            value: self.function.value(&y),
            clamped: true,
        })
    }
}

/// How finite-difference probes that leave the box are handled.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum ProbeMode {
    /// Move probes onto the box and divide by the actual probe spacing.
    #[default]
    Clamp,
    /// Refuse probes outside the box.
    Strict,
}

/// Central-difference gradient; consumes exactly `2n` queries.
pub fn finite_diff_gradient(oracle: &mut CountingOracle, x: &[f64], h: f64, mode: ProbeMode) -> Result<Vec<f64>> {
    if !(h > 0.0) {
        return Err(Error::param("h", format!("step must be positive, got {h}")));
    }
    let n = oracle.dim();
    if x.len() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            got: x.len(),
        });
    }
    let domain = oracle.function().domain().clone();
    let mut grad = Vec::with_capacity(n);
    let mut probe = x.to_vec();
    for i in 0..n {
        let (mut hi, mut lo) = (x[i] + h, x[i] - h);
        match mode {
            ProbeMode::Clamp => {
                hi = hi.min(domain.upper()[i]);
                lo = lo.max(domain.lower()[i]);
            }
            ProbeMode::Strict => {
                if hi > domain.upper()[i] || lo < domain.lower()[i] {
                    return Err(Error::DomainViolation {
                        point: x.to_vec(),
                        coordinate: i,
                    });
                }
            }
        }
        probe[i] = hi;
        let f_hi = oracle.evaluate_trial(&probe)?.value;
        probe[i] = lo;
        let f_lo = oracle.evaluate_trial(&probe)?.value;
        probe[i] = x[i];
        let span = hi - lo;
        grad.push(if span > 0.0 { (f_hi - f_lo) / span } else { 0.0 });
    }
    Ok(grad)
}

/// `f(x) = (1/N) Σ f_i(x)` over components sharing one dimension.
#[derive(Clone)]
pub struct AveragedObjective {
    components: Vec<ObjectiveFunction>,
}

impl fmt::Debug for AveragedObjective {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("AveragedObjective")
            .field("len", &self.components.len())
            .field("dim", &self.dim())
            .finish()
    }
}

impl AveragedObjective {
    pub fn new(components: Vec<ObjectiveFunction>) -> Result<Self> {
        let first = components
            .first()
            .ok_or(Error::Empty("averaged objective needs at least one component"))?;
        let n = first.dim();
        if let Some(bad) = components.iter().find(|c| c.dim() != n) {
            return Err(Error::DimensionMismatch {
                expected: n,
                got: bad.dim(),
            });
        }
        Ok(Self { components })
    }

    pub fn len(&self) -> usize {
        self.components.len()
    }

    pub fn is_empty(&self) -> bool {
        self.components.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.components[0].dim()
    }

    pub fn components(&self) -> &[ObjectiveFunction] {
        &self.components
    }

    pub fn component(&self, i: usize) -> &ObjectiveFunction {
        &self.components[i]
    }

    pub fn mean(&self, x: &[f64]) -> f64 {
        self.components.iter().map(|c| c.value(x)).sum::<f64>() / self.components.len() as f64
    }

    pub fn all_have_gradients(&self) -> bool {
        self.components.iter().all(ObjectiveFunction::has_gradient)
    }

    /// Exact mean gradient, when every component has an analytic gradient.
    pub fn mean_gradient(&self, x: &[f64]) -> Option<Vec<f64>> {
        let mut acc = vec![0.0; self.dim()];
        for c in &self.components {
            for (a, g) in acc.iter_mut().zip(c.analytic_gradient(x)?) {
                *a += g;
            }
        }
        let n = self.components.len() as f64;
        acc.iter_mut().for_each(|a| *a /= n);
        Some(acc)
    }

    /// Packages the average as a plain objective on the first component's box.
    pub fn into_objective(self, name: impl Into<String>) -> ObjectiveFunction {
        let avg = Arc::new(self);
        let eval = Arc::clone(&avg);
        let mut f = ObjectiveFunction::new(name, avg.dim(), move |x| eval.mean(x))
            .with_domain(avg.components[0].domain().clone());
        if avg.all_have_gradients() {
            let grad = Arc::clone(&avg);
            f = f.with_gradient(move |x| grad.mean_gradient(x).expect("analytic gradients"));
        }
        f.with_averaged(avg)
    }
}

pub(crate) fn norm2(v: &[f64]) -> f64 {
    v.iter().map(|a| a * a).sum::<f64>().sqrt()
}

pub(crate) fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}
