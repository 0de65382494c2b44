//! Classical versus quantum cost bodies for the four algorithm families.
//!
//! All formulas use unit constants and base-2 logarithms. Polylogarithmic
//! factors hidden by `Õ` are reported in a separate column.

use serde::{Deserialize, Serialize};

use crate::bnb::{classical_bnb_cost, quantum_bnb_cost};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum AlgorithmKind {
    BranchAndBound,
    LineSearch,
    NelderMead,
    Gradient,
}

impl AlgorithmKind {
    pub fn label(self) -> &'static str {
        match self {
            AlgorithmKind::BranchAndBound => "branch-and-bound",
            AlgorithmKind::LineSearch => "line-search",
            AlgorithmKind::NelderMead => "nelder-mead",
            AlgorithmKind::Gradient => "gradient",
        }
    }
}

/// Measured statistics for one run. Which fields are required depends on `kind`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AlgorithmStats {
    pub kind: AlgorithmKind,
    pub n: Option<u64>,
    pub tf: Option<f64>,
    pub t_min: Option<u64>,
    pub depth: Option<u64>,
    pub epsilon: Option<f64>,
    pub k: Option<u64>,
    pub m_max: Option<u64>,
    pub tau_d: Option<f64>,
    pub s: Option<u64>,
    pub classical_measured: Option<u64>,
    pub quantum_emulated: Option<u64>,
}

impl AlgorithmStats {
    pub fn new(kind: AlgorithmKind) -> Self {
        Self {
            kind,
            n: None,
            tf: None,
            t_min: None,
            depth: None,
            epsilon: None,
            k: None,
            m_max: None,
            tau_d: None,
            s: None,
            classical_measured: None,
            quantum_emulated: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CostRow {
    pub algorithm: String,
    pub classical_measured: Option<f64>,
    pub classical_model: f64,
    pub quantum_model: f64,
    pub quantum_polylog: Option<f64>,
    pub quantum_emulated: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CostReport {
    pub rows: Vec<CostRow>,
}

fn log2(x: f64) -> f64 {
    x.log2()
}

/// `(classical, quantum)` for a line search: `k(τ + m_max·tf)` vs
/// `k(τ + √m_max·log₂k·tf)`.
pub fn line_search_costs(k: u64, m_max: u64, tau_d: f64, tf: f64) -> (f64, f64) {
    let k_f = k as f64;
    let m = m_max as f64;
    (k_f * (tau_d + m * tf), k_f * (tau_d + m.sqrt() * log2(k_f) * tf))
}

/// `(classical, quantum)` Table 1 bodies for Nelder-Mead:
/// `((s+1)n + k)·tf` vs `((s+1)√n·log₂k + k)·tf`.
pub fn nelder_mead_table_costs(k: u64, s: u64, n: u64, tf: f64) -> (f64, f64) {
    let (k_f, s1, n_f) = (k as f64, (s + 1) as f64, n as f64);
    ((s1 * n_f + k_f) * tf, (s1 * n_f.sqrt() * log2(k_f) + k_f) * tf)
}

/// `(classical, quantum)` gradient bodies: `n·tf·ε⁻²` vs `√n·tf·ε⁻¹`.
pub fn gradient_table_costs(n: u64, tf: f64, epsilon: f64) -> (f64, f64) {
    let n_f = n as f64;
    (n_f * tf / (epsilon * epsilon), n_f.sqrt() * tf / epsilon)
}

/// `log₂ d · log₂(1/ε)`, each factor floored at 1.
pub fn bnb_polylog(depth: u64, epsilon: f64) -> f64 {
    log2((depth as f64).max(2.0)) * log2((1.0 / epsilon).max(2.0))
}

/// `(quantum, classical)` cost of choosing a coordinate direction:
/// `√n·log₂k·tf` vs `n·tf`.
pub fn grover_direction_cost(n: u64, k: u64, tf: f64) -> (f64, f64) {
    let n_f = n as f64;
    (n_f.sqrt() * log2(k as f64) * tf, n_f * tf)
}

fn need<T: Copy>(v: Option<T>, field: &str) -> Result<T> {
    v.ok_or_else(|| Error::MissingField(field.to_string()))
}

pub fn table1_row(stats: &AlgorithmStats) -> Result<CostRow> {
    let tf = need(stats.tf, "tf")?;
    let (classical_model, quantum_model, quantum_polylog) = match stats.kind {
        AlgorithmKind::BranchAndBound => {
            let t_min = need(stats.t_min, "t_min")?;
            let d = need(stats.depth, "depth")?;
            let n = need(stats.n, "n")?;
            let eps = need(stats.epsilon, "epsilon")?;
            (
                classical_bnb_cost(t_min, n as u32, tf),
                quantum_bnb_cost(t_min, d, n as u32, tf),
                Some(bnb_polylog(d, eps)),
            )
        }
        AlgorithmKind::LineSearch => {
            let k = need(stats.k, "k")?;
            let m_max = need(stats.m_max, "m_max")?;
            let tau = need(stats.tau_d, "tau_d")?;
            let (c, q) = line_search_costs(k, m_max, tau, tf);
            (c, q, None)
        }
        AlgorithmKind::NelderMead => {
            let k = need(stats.k, "k")?;
            let s = need(stats.s, "s")?;
            let n = need(stats.n, "n")?;
            let (c, q) = nelder_mead_table_costs(k, s, n, tf);
            (c, q, None)
        }
        AlgorithmKind::Gradient => {
            let n = need(stats.n, "n")?;
            let eps = need(stats.epsilon, "epsilon")?;
            let (c, q) = gradient_table_costs(n, tf, eps);
            (c, q, None)
        }
    };
    Ok(CostRow {
        algorithm: stats.kind.label().to_string(),
        classical_measured: stats.classical_measured.map(|v| v as f64),
        classical_model,
        quantum_model,
        quantum_polylog,
        quantum_emulated: stats.quantum_emulated.map(|v| v as f64),
    })
}

pub fn table1_report(measurements: &[AlgorithmStats]) -> Result<CostReport> {
    if measurements.is_empty() {
        return Err(Error::Empty("cost report needs at least one algorithm"));
    }
    let rows = measurements.iter().map(table1_row).collect::<Result<_>>()?;
    Ok(CostReport { rows })
}
