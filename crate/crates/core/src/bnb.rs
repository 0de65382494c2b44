//! Lipschitz branch-and-bound over `q`-adic hypercubes (Galperin's rules).
//!
//! Regions are exact integer hypercubes `[c_i / q^k, (c_i + 1) / q^k]` of the
//! unit cube, mapped affinely onto the function's box. For a region at level
//! `k` with diagonal `D_k`:
//!
//! * branch: split into `q^n` children at level `k + 1`;
//! * lower bound: `max over corners of f(corner) − K·D_k`;
//! * upper bound: `min over corners of f(corner)`.
//!
//! The frontier is processed best-first by lower bound.

use std::cmp::Ordering;
use std::collections::{BinaryHeap, HashMap};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::objective::{CountingOracle, Domain};

/// Hypercube of side `q^{-level}` with integer corner coordinates.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct DyadicRegion {
    level: u32,
    corner: Vec<u64>,
    q: u64,
}

impl DyadicRegion {
    pub fn root(n: usize, q: u64) -> Self {
        assert!(q >= 2, "divisor base must be at least 2");
        Self {
            level: 0,
            corner: vec![0; n],
            q,
        }
    }

    pub fn new(level: u32, corner: Vec<u64>, q: u64) -> Result<Self> {
        if q < 2 {
            return Err(Error::param("q", "divisor base must be at least 2"));
        }
        let scale = q.checked_pow(level).ok_or(Error::DepthLimit { level })?;
        if corner.iter().any(|c| *c >= scale) {
            return Err(Error::param("corner", "corner outside [0, q^k)"));
        }
        Ok(Self { level, corner, q })
    }

    pub fn level(&self) -> u32 {
        self.level
    }

    pub fn corner(&self) -> &[u64] {
        &self.corner
    }

    pub fn q(&self) -> u64 {
        self.q
    }

    pub fn dim(&self) -> usize {
        self.corner.len()
    }

    /// `q^level`.
    pub fn scale(&self) -> u64 {
        self.q.pow(self.level)
    }

    pub fn side(&self) -> f64 {
        (self.q as f64).powi(-(self.level as i32))
    }

    /// `(lo, hi)` of coordinate `i` in unit-cube coordinates.
    pub fn bounds(&self, i: usize) -> (f64, f64) {
        let s = self.scale() as f64;
        (self.corner[i] as f64 / s, (self.corner[i] + 1) as f64 / s)
    }

    pub fn contains_unit(&self, u: &[f64]) -> bool {
        (0..self.dim()).all(|i| {
            let (lo, hi) = self.bounds(i);
            u[i] >= lo && u[i] <= hi
        })
    }

    /// Integer coordinates of the `2^n` extreme points at this level, in
    /// binary-counting order (bit `i` set means the upper face in dimension `i`).
    pub fn extreme_points(&self) -> Vec<Vec<u128>> {
        let n = self.dim();
        (0..1usize << n)
            .map(|mask| {
                (0..n)
                    .map(|i| self.corner[i] as u128 + ((mask >> i) & 1) as u128)
                    .collect()
            })
            .collect()
    }

    /// Unit-cube coordinates of an integer vertex at this level.
    pub fn vertex_unit(&self, vertex: &[u128]) -> Vec<f64> {
        let s = self.scale() as f64;
        vertex.iter().map(|v| *v as f64 / s).collect()
    }
}

/// The `q^n` children of `region`, in lexicographic order of offsets.
pub fn galperin_branch(region: &DyadicRegion) -> Result<Vec<DyadicRegion>> {
    let level = region.level + 1;
    let q = region.q;
    if q.checked_pow(level).is_none() {
        return Err(Error::DepthLimit { level });
    }
    let n = region.dim();
    let count = (q as usize)
        .checked_pow(n as u32)
        .ok_or(Error::param("q", "q^n children overflow"))?;
    let mut children = Vec::with_capacity(count);
    let mut offset = vec![0u64; n];
    for _ in 0..count {
        children.push(DyadicRegion {
            level,
            corner: region.corner.iter().zip(&offset).map(|(c, o)| c * q + o).collect(),
            q,
        });
        for o in offset.iter_mut().rev() {
            *o += 1;
            if *o < q {
                break;
            }
            *o = 0;
        }
    }
    Ok(children)
}

fn region_diagonal(domain: &Domain, region: &DyadicRegion) -> f64 {
    domain.diagonal() * region.side()
}

fn corner_point(domain: &Domain, region: &DyadicRegion, vertex: &[u128]) -> Vec<f64> {
    domain.from_unit(&region.vertex_unit(vertex))
}

fn require_bounded(domain: &Domain) -> Result<()> {
    if domain.is_bounded() {
        Ok(())
    } else {
        Err(Error::param("domain", "branch-and-bound needs a bounded box"))
    }
}

/// Galperin lower bound, evaluating all `2^n` extreme points.
pub fn galperin_lower_bound(oracle: &mut CountingOracle, region: &DyadicRegion, lipschitz: f64) -> Result<f64> {
    if !(lipschitz >= 0.0) {
        return Err(Error::param("K", "Lipschitz constant must be nonnegative"));
    }
    let domain = oracle.function().domain().clone();
    require_bounded(&domain)?;
    let mut best = f64::NEG_INFINITY;
    for v in region.extreme_points() {
        best = best.max(oracle.evaluate(&corner_point(&domain, region, &v))?);
    }
    Ok(best - lipschitz * region_diagonal(&domain, region))
}

/// Minimum over the extreme points and where it is attained. Ties go to the
/// first corner in binary-counting order.
pub fn galperin_upper_bound(oracle: &mut CountingOracle, region: &DyadicRegion) -> Result<(f64, Vec<f64>)> {
    let domain = oracle.function().domain().clone();
    require_bounded(&domain)?;
    let mut best: Option<(f64, Vec<f64>)> = None;
    for v in region.extreme_points() {
        let x = corner_point(&domain, region, &v);
        let fx = oracle.evaluate(&x)?;
        if best.as_ref().is_none_or(|(b, _)| fx < *b) {
            best = Some((fx, x));
        }
    }
    Ok(best.expect("a region has at least one extreme point"))
}

/// `√t_min · d^{3/2} · 2^n · tf`.
pub fn quantum_bnb_cost(t_min: u64, d: u64, n: u32, tf: f64) -> f64 {
    (t_min as f64).sqrt() * (d as f64).powf(1.5) * 2f64.powi(n as i32) * tf
}

/// `T_min · 2^n · tf`.
pub fn classical_bnb_cost(t_min: u64, n: u32, tf: f64) -> f64 {
    t_min as f64 * 2f64.powi(n as i32) * tf
}

#[derive(Debug, Clone)]
pub struct BnbConfig {
    pub lipschitz: f64,
    pub epsilon: f64,
    pub q: u64,
    /// Prune only when `L ≥ f_opt` instead of `L ≥ f_opt − ε`.
    pub strict: bool,
    pub max_nodes: usize,
    pub max_depth: u32,
}

impl BnbConfig {
    pub fn new(lipschitz: f64, epsilon: f64) -> Self {
        Self {
            lipschitz,
            epsilon,
            q: 2,
            strict: false,
            max_nodes: 1_000_000,
            max_depth: 64,
        }
    }

    pub fn with_q(mut self, q: u64) -> Self {
        self.q = q;
        self
    }

    pub fn strict(mut self, strict: bool) -> Self {
        self.strict = strict;
        self
    }

    pub fn with_max_nodes(mut self, max_nodes: usize) -> Self {
        self.max_nodes = max_nodes;
        self
    }

    fn validate(&self) -> Result<()> {
        if !(self.lipschitz >= 0.0) || !self.lipschitz.is_finite() {
            return Err(Error::param("K", "Lipschitz constant must be finite and nonnegative"));
        }
        if !(self.epsilon > 0.0) {
            return Err(Error::param("epsilon", "tolerance must be positive"));
        }
        if self.q < 2 {
            return Err(Error::param("q", "divisor base must be at least 2"));
        }
        if self.max_nodes == 0 {
            return Err(Error::param("max_nodes", "node budget must be positive"));
        }
        Ok(())
    }
}

/// One vertex of the search tree.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NodeRecord {
    pub level: u32,
    pub corner: Vec<u64>,
    #[serde(rename = "L")]
    pub lower: f64,
    pub upper: f64,
    pub parent_index: Option<usize>,
    /// Oracle evaluations spent at this node after memoisation.
    pub queries: u64,
    pub branched: bool,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct BnbStats {
    pub nodes_expanded: usize,
    pub max_depth: u32,
    pub t_min: usize,
    pub f_opt: f64,
    pub x_opt: Vec<f64>,
    pub tree_log: Vec<NodeRecord>,
    /// Lower bound of every branched node, in the order they were branched.
    pub expansion_order: Vec<f64>,
    /// `2^n` per node, as if no corner were shared.
    pub queries_raw: u64,
    pub queries_memoised: u64,
}

impl BnbStats {
    pub fn trace_json(&self) -> serde_json::Value {
        serde_json::to_value(&self.tree_log).expect("records serialise")
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct BnbOutcome {
    pub f_opt: f64,
    pub x_opt: Vec<f64>,
    pub stats: BnbStats,
}

/// Number of tree vertices with `L ≤ threshold`.
pub fn compute_tmin(stats: &BnbStats, threshold: f64) -> usize {
    stats.tree_log.iter().filter(|r| r.lower <= threshold).count()
}

/// Corner values shared between regions, keyed by the coarsest level at which
/// the vertex exists.
#[derive(Debug, Default)]
struct CornerCache {
    values: HashMap<(u32, Vec<u128>), f64>,
}

impl CornerCache {
    fn key(region: &DyadicRegion, vertex: &[u128]) -> (u32, Vec<u128>) {
        let q = region.q as u128;
        let mut level = region.level;
        let mut v = vertex.to_vec();
        while level > 0 && v.iter().all(|c| c % q == 0) {
            v.iter_mut().for_each(|c| *c /= q);
            level -= 1;
        }
        (level, v)
    }
}

struct Evaluated {
    lower: f64,
    upper: f64,
    argmin: Vec<f64>,
    queries: u64,
}

fn evaluate_region(
    oracle: &mut CountingOracle,
    cache: &mut CornerCache,
    domain: &Domain,
    region: &DyadicRegion,
    lipschitz: f64,
) -> Result<Evaluated> {
    let before = oracle.eval_count();
    let (mut hi, mut lo) = (f64::NEG_INFINITY, f64::INFINITY);
    let mut argmin = Vec::new();
    for v in region.extreme_points() {
        let key = CornerCache::key(region, &v);
        let x = corner_point(domain, region, &v);
        let fx = match cache.values.get(&key) {
            Some(fx) => *fx,
            None => {
                let fx = oracle.evaluate(&x)?;
                cache.values.insert(key, fx);
                fx
            }
        };
        hi = hi.max(fx);
        if fx < lo {
            lo = fx;
            argmin = x;
        }
    }
    Ok(Evaluated {
        lower: hi - lipschitz * region_diagonal(domain, region),
        upper: lo,
        argmin,
        queries: oracle.eval_count() - before,
    })
}

#[derive(Debug)]
struct Frontier {
    lower: f64,
    level: u32,
    corner: Vec<u64>,
    index: usize,
}

impl PartialEq for Frontier {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}

impl Eq for Frontier {}

impl PartialOrd for Frontier {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Frontier {
    // Reversed so that `BinaryHeap` pops the smallest (L, level, corner).
    fn cmp(&self, other: &Self) -> Ordering {
        other
            .lower
            .total_cmp(&self.lower)
            .then_with(|| other.level.cmp(&self.level))
            .then_with(|| other.corner.cmp(&self.corner))
    }
}

/// Best-first Lipschitz branch-and-bound; the result is within `ε` of the
/// minimum whenever `K` is a valid Lipschitz constant on the box.
pub fn bnb_minimize(oracle: &mut CountingOracle, config: &BnbConfig) -> Result<BnbOutcome> {
    config.validate()?;
    let domain = oracle.function().domain().clone();
    require_bounded(&domain)?;
    let n = domain.dim();
    let raw_per_node = 1u64 << n;
    let eps = config.epsilon;
    let pruned = |lower: f64, f_opt: f64| {
        if config.strict {
            lower >= f_opt
        } else {
            lower >= f_opt - eps
        }
    };

    let mut cache = CornerCache::default();
    let root = DyadicRegion::root(n, config.q);
    let ev = evaluate_region(oracle, &mut cache, &domain, &root, config.lipschitz)?;
    let mut f_opt = ev.upper;
    let mut x_opt = ev.argmin;
    let mut log = vec![NodeRecord {
        level: 0,
        corner: root.corner.clone(),
        lower: ev.lower,
        upper: ev.upper,
        parent_index: None,
        queries: ev.queries,
        branched: false,
    }];
    let mut expansion_order = Vec::new();
    let mut heap = BinaryHeap::new();
    if ev.upper - ev.lower > eps {
        heap.push(Frontier {
            lower: ev.lower,
            level: 0,
            corner: root.corner.clone(),
            index: 0,
        });
    }

    let finish = |log: Vec<NodeRecord>, expansion_order, f_opt: f64, x_opt: Vec<f64>| {
        let max_depth = log.iter().map(|r| r.level).max().unwrap_or(0);
        let queries_memoised = log.iter().map(|r| r.queries).sum();
        let mut stats = BnbStats {
            nodes_expanded: log.len(),
            max_depth,
            t_min: 0,
            f_opt,
            x_opt: x_opt.clone(),
            queries_raw: raw_per_node * log.len() as u64,
            queries_memoised,
            tree_log: log,
            expansion_order,
        };
        stats.t_min = compute_tmin(&stats, f_opt);
        BnbOutcome { f_opt, x_opt, stats }
    };

    while let Some(node) = heap.pop() {
        if pruned(node.lower, f_opt) {
            break;
        }
        let region = DyadicRegion {
            level: node.level,
            corner: node.corner,
            q: config.q,
        };
        if region.level + 1 > config.max_depth {
            return Err(Error::DepthLimit {
                level: region.level + 1,
            });
        }
        let children = galperin_branch(&region)?;
        if log.len() + children.len() > config.max_nodes {
            let partial = finish(log, expansion_order, f_opt, x_opt);
            return Err(Error::NodeBudget {
                budget: config.max_nodes,
                partial: Box::new(partial),
            });
        }
        log[node.index].branched = true;
        expansion_order.push(node.lower);
        for child in children {
            let ev = evaluate_region(oracle, &mut cache, &domain, &child, config.lipschitz)?;
            if ev.upper < f_opt {
                f_opt = ev.upper;
                x_opt = ev.argmin;
            }
            let index = log.len();
            log.push(NodeRecord {
                level: child.level,
                corner: child.corner.clone(),
                lower: ev.lower,
                upper: ev.upper,
                parent_index: Some(node.index),
                queries: ev.queries,
                branched: false,
            });
            if ev.upper - ev.lower > eps && !pruned(ev.lower, f_opt) {
                heap.push(Frontier {
                    lower: ev.lower,
                    level: child.level,
                    corner: child.corner,
                    index,
                });
            }
        }
    }
    Ok(finish(log, expansion_order, f_opt, x_opt))
}
