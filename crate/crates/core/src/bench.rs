//! Seeded single runs, parameter sweeps and the corpus listing behind the
//! `qopt-bench` binary.

use std::collections::BTreeMap;
use std::path::Path;
use std::str::FromStr;
use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::bnb::{bnb_minimize, BnbConfig};
use crate::corpus::{corpus_entry, corpus_lookup, manifest, CorpusEntry};
use crate::direct::{direct_minimize, DEFAULT_EPSILON};
use crate::error::{Error, Result};
use crate::line_search::{backtracking_descent, DirectionKind, DirectionProvider, IterationTrace, LineSearchConfig};
use crate::minibatch::{sgd_minimize, BatchSize, GradAccuracySpec, SgdConfig, StepSchedule, DEFAULT_H};
use crate::nelder_mead::{nm_minimize, nm_quantum_mode, InitialSimplex, NMConfig, NMOutcome};
use crate::objective::{CountingOracle, ObjectiveFunction};
use crate::quantum::{table1_row, AlgorithmKind, AlgorithmStats, CostRow, Emulator};

/// Environment variable naming an extra manifest file for `corpus`.
pub const CORPUS_ENV: &str = "QOPT_CORPUS_MANIFEST";

/// Function name accepted by the emulator-only algorithms.
pub const SYNTHETIC: &str = "synthetic";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Algorithm {
    BnbGalperin,
    Direct,
    LineSearch,
    NelderMead,
    Sgd,
    /// Emulated minimum finding over random values.
    DurrHoyer,
    /// Emulated first-hit search with the first marked index at `m − 1`.
    FirstHit,
}

impl Algorithm {
    pub const ALL: [Algorithm; 7] = [
        Algorithm::BnbGalperin,
        Algorithm::Direct,
        Algorithm::LineSearch,
        Algorithm::NelderMead,
        Algorithm::Sgd,
        Algorithm::DurrHoyer,
        Algorithm::FirstHit,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Algorithm::BnbGalperin => "bnb-galperin",
            Algorithm::Direct => "direct",
            Algorithm::LineSearch => "line-search",
            Algorithm::NelderMead => "nelder-mead",
            Algorithm::Sgd => "sgd",
            Algorithm::DurrHoyer => "durr-hoyer",
            Algorithm::FirstHit => "first-hit",
        }
    }

    /// Parameter names this algorithm accepts.
    pub fn params(self) -> &'static [&'static str] {
        match self {
            Algorithm::BnbGalperin => &["K", "epsilon", "max_nodes", "q", "strict"],
            Algorithm::Direct => &["T", "epsilon"],
            Algorithm::LineSearch => &["beta", "direction", "gamma", "grad_tolerance", "k_max", "m_cap"],
            Algorithm::NelderMead => &[
                "alpha",
                "beta",
                "delta",
                "f_tolerance",
                "gamma",
                "k_budget",
                "k_max",
                "scale",
                "x_tolerance",
            ],
            Algorithm::Sgd => &[
                "batch_delta",
                "batch_epsilon",
                "bound",
                "eta",
                "h",
                "k_b",
                "schedule",
                "steps",
            ],
            Algorithm::DurrHoyer => &["N", "epsilon", "trials"],
            Algorithm::FirstHit => &["N", "m", "trials"],
        }
    }
}

impl FromStr for Algorithm {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Algorithm::ALL
            .into_iter()
            .find(|a| a.name() == s)
            .ok_or_else(|| Error::InvalidSpec(format!("unknown algorithm `{s}`")))
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum RunMode {
    #[default]
    Classical,
    QuantumEmulated,
    Both,
}

impl RunMode {
    fn classical(self) -> bool {
        self != RunMode::QuantumEmulated
    }

    fn quantum(self) -> bool {
        self != RunMode::Classical
    }
}

impl FromStr for RunMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        serde_json::from_value(Value::String(s.to_string()))
            .map_err(|_| Error::InvalidSpec(format!("unknown mode `{s}`")))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunSpec {
    pub algorithm: Algorithm,
    pub function: String,
    #[serde(default)]
    pub params: BTreeMap<String, Value>,
    #[serde(default)]
    pub seed: u64,
    #[serde(default)]
    pub mode: RunMode,
}

impl RunSpec {
    pub fn new(algorithm: Algorithm, function: impl Into<String>) -> Self {
        Self {
            algorithm,
            function: function.into(),
            params: BTreeMap::new(),
            seed: 0,
            mode: RunMode::Classical,
        }
    }

    pub fn param(mut self, key: &str, value: impl Into<Value>) -> Self {
        self.params.insert(key.to_string(), value.into());
        self
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    pub fn with_mode(mut self, mode: RunMode) -> Self {
        self.mode = mode;
        self
    }

    pub fn from_value(v: Value) -> Result<Self> {
        let spec: Self = serde_json::from_value(v).map_err(|e| Error::InvalidSpec(e.to_string()))?;
        spec.validate()?;
        Ok(spec)
    }

    pub fn from_json(s: &str) -> Result<Self> {
        let v: Value = serde_json::from_str(s).map_err(|e| Error::InvalidSpec(e.to_string()))?;
        Self::from_value(v)
    }

    /// Checks parameter names against the algorithm's schema.
    pub fn validate(&self) -> Result<()> {
        let allowed = self.algorithm.params();
        if let Some(bad) = self.params.keys().find(|k| !allowed.contains(&k.as_str())) {
            return Err(Error::InvalidSpec(format!(
                "parameter `{bad}` is not accepted by {} (allowed: {})",
                self.algorithm.name(),
                allowed.join(", ")
            )));
        }
        Ok(())
    }
}

struct Params<'a>(&'a BTreeMap<String, Value>);

impl Params<'_> {
    fn bad(key: &str, want: &str) -> Error {
        Error::InvalidSpec(format!("parameter `{key}` must be {want}"))
    }

    fn opt_f64(&self, key: &str) -> Result<Option<f64>> {
        self.0
            .get(key)
            .map(|v| v.as_f64().ok_or_else(|| Self::bad(key, "a number")))
            .transpose()
    }

    fn f64(&self, key: &str, default: f64) -> Result<f64> {
        Ok(self.opt_f64(key)?.unwrap_or(default))
    }

    fn opt_u64(&self, key: &str) -> Result<Option<u64>> {
        self.0
            .get(key)
            .map(|v| v.as_u64().ok_or_else(|| Self::bad(key, "a nonnegative integer")))
            .transpose()
    }

    fn u64(&self, key: &str, default: u64) -> Result<u64> {
        Ok(self.opt_u64(key)?.unwrap_or(default))
    }

    fn usize(&self, key: &str, default: usize) -> Result<usize> {
        Ok(self.u64(key, default as u64)? as usize)
    }

    fn bool(&self, key: &str, default: bool) -> Result<bool> {
        self.0
            .get(key)
            .map_or(Ok(default), |v| v.as_bool().ok_or_else(|| Self::bad(key, "a boolean")))
    }

    fn str<'b>(&'b self, key: &str, default: &'b str) -> Result<&'b str> {
        self.0
            .get(key)
            .map_or(Ok(default), |v| v.as_str().ok_or_else(|| Self::bad(key, "a string")))
    }
}

/// Every statistic a run can produce; fields the algorithm does not define stay `None`.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct RunStats {
    pub t_min: Option<u64>,
    pub d: Option<u64>,
    pub nodes_expanded: Option<u64>,
    pub k: Option<u64>,
    pub s: Option<u64>,
    pub m0_list: Option<Vec<u32>>,
    pub m_max: Option<u64>,
    /// Mean direction cost per iteration.
    pub tau_d: Option<f64>,
    pub k_b: Option<u64>,
    pub emulator_size: Option<u64>,
    pub trials: Option<u64>,
    pub mean_queries: Option<f64>,
    pub success_rate: Option<f64>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct Queries {
    pub classical: Option<u64>,
    pub quantum_emulated: Option<u64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunReport {
    pub spec: RunSpec,
    pub f_opt: Option<f64>,
    pub x_opt: Option<Vec<f64>>,
    pub stats: RunStats,
    pub queries: Queries,
    pub cost_models: Option<CostRow>,
    pub wall_time_ms: f64,
}

impl RunReport {
    fn blank(spec: &RunSpec) -> Self {
        Self {
            spec: spec.clone(),
            f_opt: None,
            x_opt: None,
            stats: RunStats::default(),
            queries: Queries::default(),
            cost_models: None,
            wall_time_ms: 0.0,
        }
    }

    /// JSON with `wall_time_ms` zeroed, for determinism checks.
    pub fn canonical_json(&self) -> String {
        let mut r = self.clone();
        r.wall_time_ms = 0.0;
        serde_json::to_string(&r).expect("reports serialise")
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ErrorInfo {
    pub kind: String,
    pub message: String,
}

impl From<&Error> for ErrorInfo {
    fn from(e: &Error) -> Self {
        Self {
            kind: e.kind().to_string(),
            message: e.to_string(),
        }
    }
}

/// Process exit code for an error: 2 for bad input, 1 for runtime failures.
pub fn exit_code(e: &Error) -> i32 {
    if e.is_input_error() {
        2
    } else {
        1
    }
}

pub fn error_json(e: &Error) -> Value {
    serde_json::json!({ "error": ErrorInfo::from(e), "exit_code": exit_code(e) })
}

fn lookup(spec: &RunSpec) -> Result<ObjectiveFunction> {
    corpus_lookup(&spec.function)
}

fn unit_stats(kind: AlgorithmKind, n: usize) -> AlgorithmStats {
    AlgorithmStats {
        n: Some(n as u64),
        tf: Some(1.0),
        ..AlgorithmStats::new(kind)
    }
}

pub fn cmd_run(spec: &RunSpec) -> Result<RunReport> {
    spec.validate()?;
    let start = Instant::now();
    let p = Params(&spec.params);
    let mut report = RunReport::blank(spec);
    match spec.algorithm {
        Algorithm::BnbGalperin => run_bnb(spec, &p, &mut report)?,
        Algorithm::Direct => run_direct(spec, &p, &mut report)?,
        Algorithm::LineSearch => run_line_search(spec, &p, &mut report)?,
        Algorithm::NelderMead => run_nelder_mead(spec, &p, &mut report)?,
        Algorithm::Sgd => run_sgd(spec, &p, &mut report)?,
        Algorithm::DurrHoyer | Algorithm::FirstHit => run_emulator(spec, &p, &mut report)?,
    }
    report.wall_time_ms = start.elapsed().as_secs_f64() * 1e3;
    Ok(report)
}

fn run_bnb(spec: &RunSpec, p: &Params, r: &mut RunReport) -> Result<()> {
    let f = lookup(spec)?;
    let k = match p.opt_f64("K")? {
        Some(k) => k,
        None => f
            .lipschitz()
            .ok_or_else(|| Error::MissingLipschitz(spec.function.clone()))?,
    };
    let epsilon = p.f64("epsilon", 1e-3)?;
    let config = BnbConfig::new(k, epsilon)
        .with_q(p.u64("q", 2)?)
        .strict(p.bool("strict", false)?)
        .with_max_nodes(p.usize("max_nodes", 1_000_000)?);
    let n = f.dim();
    let mut oracle = CountingOracle::new(f);
    let out = bnb_minimize(&mut oracle, &config)?;
    let st = &out.stats;
    r.f_opt = Some(out.f_opt);
    r.x_opt = Some(out.x_opt.clone());
    r.stats.t_min = Some(st.t_min as u64);
    r.stats.d = Some(st.max_depth as u64);
    r.stats.nodes_expanded = Some(st.nodes_expanded as u64);
    r.queries.classical = Some(oracle.eval_count());
    r.cost_models = Some(table1_row(&AlgorithmStats {
        t_min: Some(st.t_min as u64),
        depth: Some(st.max_depth as u64),
        epsilon: Some(epsilon),
        classical_measured: Some(oracle.eval_count()),
        ..unit_stats(AlgorithmKind::BranchAndBound, n)
    })?);
    Ok(())
}

fn run_direct(spec: &RunSpec, p: &Params, r: &mut RunReport) -> Result<()> {
    let f = lookup(spec)?;
    let iterations = p.usize("T", 50)?;
    let mut oracle = CountingOracle::new(f);
    let out = direct_minimize(&mut oracle, p.f64("epsilon", DEFAULT_EPSILON)?, iterations)?;
    r.f_opt = Some(out.f_min);
    r.x_opt = Some(out.x_min);
    r.stats.k = Some(iterations as u64);
    r.queries.classical = Some(oracle.eval_count());
    Ok(())
}

fn run_line_search(spec: &RunSpec, p: &Params, r: &mut RunReport) -> Result<()> {
    let f = lookup(spec)?;
    let defaults = LineSearchConfig::default();
    let config = LineSearchConfig {
        gamma: p.f64("gamma", defaults.gamma)?,
        beta: p.f64("beta", defaults.beta)?,
        m_cap: p.u64("m_cap", defaults.m_cap as u64)? as u32,
        k_max: p.usize("k_max", defaults.k_max)?,
        grad_tolerance: p.f64("grad_tolerance", defaults.grad_tolerance)?,
        ..defaults
    };
    let kind: DirectionKind = p.str("direction", "bfgs")?.parse()?;
    let n = f.dim();
    let x0 = f.start();
    let run = |emulator: Option<&mut Emulator>| -> Result<(Vec<f64>, IterationTrace)> {
        let mut oracle = CountingOracle::new(f.clone());
        let mut provider = DirectionProvider::new(kind, n);
        backtracking_descent(&mut oracle, &x0, &mut provider, &config, emulator)
    };
    let classical = spec.mode.classical().then(|| run(None)).transpose()?;
    let quantum = if spec.mode.quantum() {
        let mut em = Emulator::seeded(spec.seed);
        Some(run(Some(&mut em))?)
    } else {
        None
    };
    let (x, trace) = classical.as_ref().or(quantum.as_ref()).expect("mode runs something");
    r.f_opt = Some(trace.rows.last().map_or(trace.f_initial, |row| row.f));
    r.x_opt = Some(x.clone());
    r.stats.k = Some(trace.k() as u64);
    r.stats.m0_list = Some(trace.m0_list());
    r.stats.m_max = Some(trace.m_max() as u64);
    r.stats.tau_d = Some(trace.mean_tau());
    r.queries.classical = Some(trace.queries_classical());
    r.queries.quantum_emulated = quantum.as_ref().map(|(_, t)| t.queries_quantum());
    r.cost_models = Some(table1_row(&AlgorithmStats {
        k: Some(trace.k() as u64),
        m_max: Some(trace.m_max() as u64),
        tau_d: r.stats.tau_d,
        classical_measured: r.queries.classical,
        quantum_emulated: r.queries.quantum_emulated,
        ..unit_stats(AlgorithmKind::LineSearch, n)
    })?);
    Ok(())
}

fn run_nelder_mead(spec: &RunSpec, p: &Params, r: &mut RunReport) -> Result<()> {
    let f = lookup(spec)?;
    let d = NMConfig::default();
    let config = NMConfig {
        alpha: p.f64("alpha", d.alpha)?,
        beta: p.f64("beta", d.beta)?,
        gamma: p.f64("gamma", d.gamma)?,
        delta: p.f64("delta", d.delta)?,
        f_tolerance: p.f64("f_tolerance", d.f_tolerance)?,
        x_tolerance: p.f64("x_tolerance", d.x_tolerance)?,
        k_max: p.usize("k_max", d.k_max)?,
    };
    let k_budget = p.usize("k_budget", config.k_max.max(2))?;
    let initial = InitialSimplex::Start {
        x0: f.start(),
        scale: p.opt_f64("scale")?,
    };
    let n = f.dim();
    let classical: Option<NMOutcome> = if spec.mode.classical() {
        Some(nm_minimize(
            &mut CountingOracle::new(f.clone()),
            initial.clone(),
            &config,
        )?)
    } else {
        None
    };
    let quantum = if spec.mode.quantum() {
        let mut em = Emulator::seeded(spec.seed);
        let mut oracle = CountingOracle::new(f.clone());
        Some(nm_quantum_mode(&mut oracle, initial, &config, &mut em, k_budget)?)
    } else {
        None
    };
    let out = classical.as_ref().or(quantum.as_ref()).expect("mode runs something");
    r.f_opt = Some(out.best_value);
    r.x_opt = Some(out.best_point.clone());
    r.stats.k = Some(out.stats.k as u64);
    r.stats.s = Some(out.stats.s as u64);
    r.queries.classical = Some(out.stats.queries_classical);
    r.queries.quantum_emulated = quantum.as_ref().map(|q| q.stats.queries_quantum_emulated);
    r.cost_models = Some(table1_row(&AlgorithmStats {
        k: Some(out.stats.k as u64),
        s: Some(out.stats.s as u64),
        classical_measured: r.queries.classical,
        quantum_emulated: r.queries.quantum_emulated,
        ..unit_stats(AlgorithmKind::NelderMead, n)
    })?);
    Ok(())
}

fn run_sgd(spec: &RunSpec, p: &Params, r: &mut RunReport) -> Result<()> {
    let f = lookup(spec)?;
    let avg = f
        .averaged()
        .ok_or_else(|| Error::InvalidSpec(format!("sgd needs an averaged objective, got `{}`", spec.function)))?;
    let eta = p.f64("eta", 0.5)?;
    let schedule = match p.str("schedule", "constant")? {
        "constant" => StepSchedule::Constant { eta },
        "decay" => StepSchedule::Decay { eta0: eta },
        other => return Err(Error::InvalidSpec(format!("unknown schedule `{other}`"))),
    };
    let epsilon = p.f64("batch_epsilon", 0.1)?;
    let batch = match p.opt_u64("k_b")? {
        Some(k_b) => BatchSize::Fixed { k_b: k_b as usize },
        None => BatchSize::FromSpec(GradAccuracySpec::with_bound(
            epsilon,
            p.f64("batch_delta", 0.05)?,
            p.f64("bound", 1.0)?,
        )?),
    };
    let steps = p.usize("steps", 100)?;
    let mut config = SgdConfig::new(steps, schedule, batch).with_seed(spec.seed);
    config.h = p.f64("h", DEFAULT_H)?;
    let traj = sgd_minimize(avg, &f.start(), &config)?;
    r.f_opt = Some(avg.mean(&traj.x_final));
    r.x_opt = Some(traj.x_final.clone());
    r.stats.k = Some(steps as u64);
    r.stats.k_b = traj.rows.first().map(|row| row.k_b as u64);
    r.queries.classical = Some(traj.total_queries);
    r.cost_models = Some(table1_row(&AlgorithmStats {
        epsilon: Some(epsilon),
        classical_measured: Some(traj.total_queries),
        ..unit_stats(AlgorithmKind::Gradient, f.dim())
    })?);
    Ok(())
}

fn run_emulator(spec: &RunSpec, p: &Params, r: &mut RunReport) -> Result<()> {
    if spec.function != SYNTHETIC {
        return Err(Error::InvalidSpec(format!(
            "{} runs on the `{SYNTHETIC}` instance family",
            spec.algorithm.name()
        )));
    }
    let trials = p.u64("trials", 200)?;
    if trials == 0 {
        return Err(Error::param("trials", "must be positive"));
    }
    let mut em = Emulator::seeded(spec.seed);
    let mut total = 0u64;
    let mut hits = 0u64;
    let size;
    match spec.algorithm {
        Algorithm::DurrHoyer => {
            size = p.usize("N", 256)?;
            let epsilon = p.f64("epsilon", 0.1)?;
            let mut values_rng = ChaCha8Rng::seed_from_u64(spec.seed ^ 0xd1b5_4a32_d192_ed03);
            for _ in 0..trials {
                let values: Vec<f64> = (0..size).map(|_| values_rng.gen()).collect();
                let truth = (0..size).min_by(|a, b| values[*a].total_cmp(&values[*b])).unwrap_or(0);
                let (idx, tally) = em.min_index(&values, epsilon)?;
                total += tally.oracle_queries;
                hits += u64::from(idx == truth);
            }
        }
        _ => {
            let m = p.usize("m", 64)?;
            if m == 0 {
                return Err(Error::param("m", "must be positive"));
            }
            size = p.usize("N", 4 * m)?;
            if size < m {
                return Err(Error::param("N", "must be at least m"));
            }
            for _ in 0..trials {
                let (hit, tally) = em.first_hit(size, |i| i + 1 >= m);
                total += tally.oracle_queries;
                hits += u64::from(hit == Some(m - 1));
            }
        }
    }
    r.stats.emulator_size = Some(size as u64);
    r.stats.trials = Some(trials);
    r.stats.mean_queries = Some(total as f64 / trials as f64);
    r.stats.success_rate = Some(hits as f64 / trials as f64);
    r.queries.classical = Some(size as u64 * trials);
    r.queries.quantum_emulated = Some(total);
    Ok(())
}

/// A cross product of spec deltas applied to `base`. The first axis varies slowest.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepGrid {
    pub base: serde_json::Map<String, Value>,
    #[serde(default)]
    pub axes: Vec<SweepAxis>,
}

/// `field` is `algorithm`, `function`, `seed`, `mode`, or a parameter name.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepAxis {
    pub field: String,
    pub values: Vec<Value>,
}

impl SweepGrid {
    pub fn from_json(s: &str) -> Result<Self> {
        serde_json::from_str(s).map_err(|e| Error::InvalidSpec(format!("grid file: {e}")))
    }

    /// Spec documents in grid order. A grid with no axes is empty.
    pub fn cells(&self) -> Vec<Value> {
        if self.axes.is_empty() || self.axes.iter().any(|a| a.values.is_empty()) {
            return Vec::new();
        }
        let total: usize = self.axes.iter().map(|a| a.values.len()).product();
        (0..total)
            .map(|mut i| {
                let mut picks = vec![0; self.axes.len()];
                for (j, axis) in self.axes.iter().enumerate().rev() {
                    picks[j] = i % axis.values.len();
                    i /= axis.values.len();
                }
                let mut cell = self.base.clone();
                for (axis, pick) in self.axes.iter().zip(picks) {
                    let v = axis.values[pick].clone();
                    match axis.field.as_str() {
                        "algorithm" | "function" | "seed" | "mode" => {
                            cell.insert(axis.field.clone(), v);
                        }
                        name => {
                            let params = cell
                                .entry("params")
                                .or_insert_with(|| Value::Object(Default::default()));
                            if let Value::Object(m) = params {
                                m.insert(name.to_string(), v);
                            }
                        }
                    }
                }
                Value::Object(cell)
            })
            .collect()
    }
}

#[derive(Debug, Clone)]
pub struct SweepCell {
    pub spec: Value,
    pub outcome: std::result::Result<RunReport, ErrorInfo>,
}

/// Runs every cell on a pool of scoped threads; results come back in grid order.
pub fn cmd_sweep(grid: &SweepGrid) -> Vec<SweepCell> {
    let cells = grid.cells();
    let workers = std::thread::available_parallelism()
        .map_or(1, |n| n.get())
        .min(cells.len().max(1));
    let run = |v: &Value| {
        RunSpec::from_value(v.clone())
            .and_then(|s| cmd_run(&s))
            .map_err(|e| ErrorInfo::from(&e))
    };
    let mut outcomes: Vec<Option<_>> = vec![None; cells.len()];
    std::thread::scope(|scope| {
        let handles: Vec<_> = (0..workers)
            .map(|w| {
                let cells = &cells;
                scope.spawn(move || {
                    (w..cells.len())
                        .step_by(workers)
                        .map(|i| (i, run(&cells[i])))
                        .collect::<Vec<_>>()
                })
            })
            .collect();
        for h in handles {
            for (i, o) in h.join().expect("sweep worker panicked") {
                outcomes[i] = Some(o);
            }
        }
    });
    cells
        .into_iter()
        .zip(outcomes)
        .map(|(spec, o)| SweepCell {
            spec,
            outcome: o.expect("every cell ran"),
        })
        .collect()
}

pub const CSV_COLUMNS: &[&str] = &[
    "status",
    "algorithm",
    "function",
    "seed",
    "mode",
    "params",
    "f_opt",
    "x_opt",
    "t_min",
    "d",
    "nodes_expanded",
    "k",
    "s",
    "m0_list",
    "m_max",
    "tau_d",
    "k_b",
    "emulator_size",
    "trials",
    "mean_queries",
    "success_rate",
    "queries_classical",
    "queries_quantum_emulated",
    "classical_model",
    "quantum_model",
    "quantum_polylog",
    "wall_time_ms",
    "error",
];

/// 17 significant digits.
pub fn fmt_f64(v: f64) -> String {
    format!("{v:.16e}")
}

fn opt<T: ToString>(v: Option<T>) -> String {
    v.map_or_else(String::new, |v| v.to_string())
}

fn optf(v: Option<f64>) -> String {
    v.map_or_else(String::new, fmt_f64)
}

fn report_record(r: &RunReport) -> Vec<String> {
    let s = &r.stats;
    let cost = r.cost_models.as_ref();
    vec![
        "ok".into(),
        r.spec.algorithm.name().into(),
        r.spec.function.clone(),
        r.spec.seed.to_string(),
        serde_json::to_value(r.spec.mode)
            .expect("mode")
            .as_str()
            .unwrap_or_default()
            .into(),
        serde_json::to_string(&r.spec.params).expect("params"),
        optf(r.f_opt),
        r.x_opt.as_ref().map_or_else(String::new, |x| {
            x.iter().map(|v| fmt_f64(*v)).collect::<Vec<_>>().join(";")
        }),
        opt(s.t_min),
        opt(s.d),
        opt(s.nodes_expanded),
        opt(s.k),
        opt(s.s),
        s.m0_list.as_ref().map_or_else(String::new, |m| {
            m.iter().map(u32::to_string).collect::<Vec<_>>().join(";")
        }),
        opt(s.m_max),
        optf(s.tau_d),
        opt(s.k_b),
        opt(s.emulator_size),
        opt(s.trials),
        optf(s.mean_queries),
        optf(s.success_rate),
        opt(r.queries.classical),
        opt(r.queries.quantum_emulated),
        optf(cost.map(|c| c.classical_model)),
        optf(cost.map(|c| c.quantum_model)),
        optf(cost.and_then(|c| c.quantum_polylog)),
        fmt_f64(r.wall_time_ms),
        String::new(),
    ]
}

fn error_record(spec: &Value, e: &ErrorInfo) -> Vec<String> {
    let field = |k: &str| match spec.get(k) {
        Some(Value::String(s)) => s.clone(),
        Some(v) => v.to_string(),
        None => String::new(),
    };
    let mut row = vec![String::new(); CSV_COLUMNS.len()];
    row[0] = "error".into();
    row[1] = field("algorithm");
    row[2] = field("function");
    row[3] = field("seed");
    row[4] = field("mode");
    row[5] = spec.get("params").map_or_else(String::new, Value::to_string);
    row[CSV_COLUMNS.len() - 1] = format!("{}: {}", e.kind, e.message);
    row
}

fn write_csv(rows: impl IntoIterator<Item = Vec<String>>) -> String {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(CSV_COLUMNS).expect("in-memory write");
    for row in rows {
        w.write_record(&row).expect("in-memory write");
    }
    String::from_utf8(w.into_inner().expect("flush")).expect("utf-8")
}

pub fn reports_csv(reports: &[RunReport]) -> String {
    write_csv(reports.iter().map(report_record))
}

pub fn sweep_csv(cells: &[SweepCell]) -> String {
    write_csv(cells.iter().map(|c| match &c.outcome {
        Ok(r) => report_record(r),
        Err(e) => error_record(&c.spec, e),
    }))
}

/// The built-in manifest plus any names listed (as a JSON string array) in `extra`.
pub fn cmd_corpus(extra: Option<&Path>) -> Result<Vec<CorpusEntry>> {
    let mut entries = manifest();
    if let Some(path) = extra {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::InvalidSpec(format!("cannot read {}: {e}", path.display())))?;
        let names: Vec<String> =
            serde_json::from_str(&text).map_err(|e| Error::InvalidSpec(format!("{}: {e}", path.display())))?;
        for name in names {
            if !entries.iter().any(|e| e.name == name) {
                entries.push(corpus_entry(&name)?);
            }
        }
    }
    Ok(entries)
}

pub fn corpus_text(entries: &[CorpusEntry]) -> String {
    let mut out = String::from("name\tn\tK\tmin\n");
    for e in entries {
        out.push_str(&format!(
            "{}\t{}\t{}\t{}\n",
            e.name,
            e.n,
            e.lipschitz.map_or("-".into(), |k| k.to_string()),
            e.known_min_value.map_or("-".into(), |v| v.to_string()),
        ));
    }
    out
}
