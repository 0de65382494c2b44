//! Query-level emulation of Grover-type subroutines.
//!
//! Nothing here simulates a quantum state. Each routine inspects its instance
//! classically (charged to [`QueryTally::classical_side_queries`]) and then
//! replays the exponential-search schedule with the exact per-round success
//! probability `sin²((2j + 1)θ)`, `sin θ = √(t/N)`, charging `j + 1` oracle
//! queries per round: `j` Grover iterations plus one verification.

use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EmulatorConfig {
    pub seed: u64,
    /// Growth factor of the exponential search, `λ > 1`.
    pub growth: f64,
    /// Budget constant multiplying `√N`.
    pub budget: f64,
    /// Failure probability used when the prefix search hands over to
    /// minimum finding.
    pub first_hit_epsilon: f64,
}

impl Default for EmulatorConfig {
    fn default() -> Self {
        Self {
            seed: 0,
            growth: 6.0 / 5.0,
            budget: 9.0,
            first_hit_epsilon: 0.01,
        }
    }
}

impl EmulatorConfig {
    pub fn with_seed(seed: u64) -> Self {
        Self {
            seed,
            ..Self::default()
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.growth > 1.0) {
            return Err(Error::param("growth", "must exceed 1"));
        }
        if !(self.budget > 0.0) {
            return Err(Error::param("budget", "must be positive"));
        }
        if !(self.first_hit_epsilon > 0.0 && self.first_hit_epsilon < 1.0) {
            return Err(Error::param("first_hit_epsilon", "must lie in (0, 1)"));
        }
        Ok(())
    }

    /// Constant hidden in the `O(√m)` cost of a first-hit search: the per-run
    /// budget times the minimum-finding repetitions (72 by default).
    pub fn amplification(&self) -> f64 {
        self.budget * repetitions(self.first_hit_epsilon) as f64
    }

    pub fn rng(&self) -> ChaCha8Rng {
        ChaCha8Rng::seed_from_u64(self.seed)
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct QueryTally {
    pub oracle_queries: u64,
    pub classical_side_queries: u64,
}

impl QueryTally {
    pub fn add(&mut self, other: QueryTally) {
        self.oracle_queries += other.oracle_queries;
        self.classical_side_queries += other.classical_side_queries;
    }
}

impl std::ops::AddAssign for QueryTally {
    fn add_assign(&mut self, rhs: Self) {
        self.add(rhs);
    }
}

/// `sin²((2j + 1)·arcsin √(t/N))`.
pub fn grover_success_probability(t: usize, n: usize, j: u64) -> f64 {
    if n == 0 || t == 0 {
        return 0.0;
    }
    let theta = (t as f64 / n as f64).sqrt().min(1.0).asin();
    ((2 * j + 1) as f64 * theta).sin().powi(2)
}

/// Exponential search over `n` items of which `t` are marked, stopping once
/// `budget` queries are spent. Returns the rank (in `0..t`) of the marked item
/// found, chosen uniformly.
fn exponential_search<R: Rng + ?Sized>(
    n: usize,
    t: usize,
    budget: f64,
    config: &EmulatorConfig,
    rng: &mut R,
    tally: &mut QueryTally,
) -> Option<usize> {
    let cap = (n as f64).sqrt().max(1.0);
    let mut m = 1.0f64;
    let mut spent = 0u64;
    while (spent as f64) < budget {
        let j = rng.gen_range(0..m.ceil() as u64);
        spent += j + 1;
        tally.oracle_queries += j + 1;
        if t > 0 && rng.gen::<f64>() < grover_success_probability(t, n, j) {
            return Some(rng.gen_range(0..t));
        }
        m = (config.growth * m).min(cap);
    }
    None
}

/// Grover search for any index with `predicate(i)`, `i < n`.
pub fn grover_search_emulated<P, R>(
    n: usize,
    predicate: P,
    config: &EmulatorConfig,
    rng: &mut R,
) -> (Option<usize>, QueryTally)
where
    P: Fn(usize) -> bool,
    R: Rng + ?Sized,
{
    let mut tally = QueryTally::default();
    if n == 0 {
        return (None, tally);
    }
    let marked: Vec<usize> = (0..n).filter(|i| predicate(*i)).collect();
    tally.classical_side_queries += n as u64;
    let budget = config.budget * (n as f64).sqrt();
    let found = exponential_search(n, marked.len(), budget, config, rng, &mut tally);
    (found.map(|r| marked[r]), tally)
}

/// Minimum finding by threshold descent. Ties are broken by lower index.
pub fn durr_hoyer_min_emulated<R: Rng + ?Sized>(
    values: &[f64],
    epsilon: f64,
    config: &EmulatorConfig,
    rng: &mut R,
) -> Result<(usize, QueryTally)> {
    let n = values.len();
    if n == 0 {
        return Err(Error::Empty("minimum finding over zero values"));
    }
    if !(epsilon > 0.0 && epsilon < 1.0) {
        return Err(Error::param("epsilon", "must lie in (0, 1)"));
    }
    let mut tally = QueryTally::default();
    if n == 1 {
        return Ok((0, tally));
    }
    // Sorting by (value, index) makes {i : key_i < key_y} the rank prefix
    // below y, so a uniformly random marked item is a uniform rank.
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|a, b| values[*a].total_cmp(&values[*b]).then(a.cmp(b)));
    let mut rank = vec![0usize; n];
    for (r, i) in order.iter().enumerate() {
        rank[*i] = r;
    }
    tally.classical_side_queries += n as u64;

    let runs = repetitions(epsilon);
    let run_budget = config.budget * (n as f64).sqrt();
    let mut best: Option<usize> = None;
    for _ in 0..runs {
        let mut y = rng.gen_range(0..n);
        let before = tally.oracle_queries;
        tally.oracle_queries += 1;
        loop {
            let spent = (tally.oracle_queries - before) as f64;
            if spent >= run_budget {
                break;
            }
            match exponential_search(n, rank[y], run_budget - spent, config, rng, &mut tally) {
                Some(r) => y = order[r],
                None => break,
            }
        }
        if best.is_none_or(|b| rank[y] < rank[b]) {
            best = Some(y);
        }
    }
    Ok((best.expect("at least one run"), tally))
}

/// `⌈log₂(1/ε)⌉ + 1`.
pub fn repetitions(epsilon: f64) -> u32 {
    (1.0 / epsilon).log2().ceil().max(0.0) as u32 + 1
}

/// First index with `predicate(i)` via a doubling prefix schedule.
pub fn lin_lin_first_hit_emulated<P, R>(
    n: usize,
    predicate: P,
    config: &EmulatorConfig,
    rng: &mut R,
) -> (Option<usize>, QueryTally)
where
    P: Fn(usize) -> bool,
    R: Rng + ?Sized,
{
    let mut tally = QueryTally::default();
    if n == 0 {
        return (None, tally);
    }
    let marked: Vec<bool> = (0..n).map(&predicate).collect();
    tally.classical_side_queries += n as u64;
    let marked_idx: Vec<usize> = (0..n).filter(|i| marked[*i]).collect();

    let mut prefix = 1usize;
    loop {
        let t = marked_idx.partition_point(|i| *i < prefix);
        let budget = config.budget * (prefix as f64).sqrt();
        if let Some(r) = exponential_search(prefix, t, budget, config, rng, &mut tally) {
            let hit = marked_idx[r];
            if hit == 0 {
                return (Some(0), tally);
            }
            let values: Vec<f64> = (0..=hit)
                .map(|i| if marked[i] { i as f64 } else { f64::INFINITY })
                .collect();
            let (m, inner) = durr_hoyer_min_emulated(&values, config.first_hit_epsilon, config, rng)
                .expect("nonempty prefix and valid epsilon");
            tally.oracle_queries += inner.oracle_queries;
            return (if marked[m] { Some(m) } else { Some(hit) }, tally);
        }
        if prefix == n {
            return (None, tally);
        }
        prefix = (prefix * 2).min(n);
    }
}

/// Bundles a configuration with its seeded generator.
#[derive(Debug, Clone)]
pub struct Emulator {
    config: EmulatorConfig,
    rng: ChaCha8Rng,
}

impl Emulator {
    pub fn new(config: EmulatorConfig) -> Result<Self> {
        config.validate()?;
        let rng = config.rng();
        Ok(Self { config, rng })
    }

    pub fn seeded(seed: u64) -> Self {
        Self::new(EmulatorConfig::with_seed(seed)).expect("default config is valid")
    }

    pub fn config(&self) -> &EmulatorConfig {
        &self.config
    }

    pub fn grover<P: Fn(usize) -> bool>(&mut self, n: usize, predicate: P) -> (Option<usize>, QueryTally) {
        grover_search_emulated(n, predicate, &self.config, &mut self.rng)
    }

    pub fn min_index(&mut self, values: &[f64], epsilon: f64) -> Result<(usize, QueryTally)> {
        durr_hoyer_min_emulated(values, epsilon, &self.config, &mut self.rng)
    }

    pub fn first_hit<P: Fn(usize) -> bool>(&mut self, n: usize, predicate: P) -> (Option<usize>, QueryTally) {
        lin_lin_first_hit_emulated(n, predicate, &self.config, &mut self.rng)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rng(seed: u64) -> ChaCha8Rng {
        ChaCha8Rng::seed_from_u64(seed)
    }

    #[test]
    fn success_probabilities_match_closed_forms() {
        assert!((grover_success_probability(1, 4, 1) - 1.0).abs() < 1e-12);
        assert!((grover_success_probability(1, 2, 0) - 0.5).abs() < 1e-12);
        assert!((grover_success_probability(7, 7, 0) - 1.0).abs() < 1e-12);
        assert_eq!(grover_success_probability(0, 9, 3), 0.0);
    }

    #[test]
    fn all_marked_succeeds_in_one_query() {
        let cfg = EmulatorConfig::default();
        for s in 0..20 {
            let (hit, tally) = grover_search_emulated(64, |_| true, &cfg, &mut rng(s));
            assert!(hit.is_some());
            assert_eq!(tally.oracle_queries, 1);
            assert_eq!(tally.classical_side_queries, 64);
        }
    }

    #[test]
    fn unmarked_search_respects_budget() {
        let cfg = EmulatorConfig::default();
        let n = 1024;
        let cap = (n as f64).sqrt();
        for s in 0..50 {
            let (hit, tally) = grover_search_emulated(n, |_| false, &cfg, &mut rng(s));
            assert!(hit.is_none());
            let q = tally.oracle_queries as f64;
            assert!(q >= 9.0 * cap && q <= 9.0 * cap + cap.ceil());
        }
    }

    #[test]
    fn found_index_is_marked() {
        let cfg = EmulatorConfig::default();
        for s in 0..100 {
            let (hit, _) = grover_search_emulated(100, |i| i % 17 == 3, &cfg, &mut rng(s));
            if let Some(i) = hit {
                assert_eq!(i % 17, 3);
            }
        }
    }

    #[test]
    fn single_value_needs_no_queries() {
        let (i, t) = durr_hoyer_min_emulated(&[4.2], 0.01, &EmulatorConfig::default(), &mut rng(1)).unwrap();
        assert_eq!(i, 0);
        assert_eq!(t.oracle_queries, 0);
        assert!(durr_hoyer_min_emulated(&[], 0.01, &EmulatorConfig::default(), &mut rng(1)).is_err());
        assert!(durr_hoyer_min_emulated(&[1.0, 2.0], 1.5, &EmulatorConfig::default(), &mut rng(1)).is_err());
    }

    #[test]
    fn three_values_minimum() {
        let cfg = EmulatorConfig::default();
        let mut r = rng(3);
        let hits = (0..2000)
            .filter(|_| durr_hoyer_min_emulated(&[3.0, 1.0, 2.0], 0.01, &cfg, &mut r).unwrap().0 == 1)
            .count();
        assert!(hits >= 1980, "{hits}");
    }

    #[test]
    fn ties_resolve_to_lower_index() {
        let cfg = EmulatorConfig::default();
        let mut r = rng(5);
        for _ in 0..200 {
            let (i, _) = durr_hoyer_min_emulated(&[2.0, 0.5, 0.5, 0.5], 0.01, &cfg, &mut r).unwrap();
            assert_eq!(i, 1);
        }
    }

    #[test]
    fn repetition_count() {
        assert_eq!(repetitions(0.5), 2);
        assert_eq!(repetitions(0.01), 8);
        assert_eq!(repetitions(0.25), 3);
    }

    #[test]
    fn first_hit_at_zero_is_cheap() {
        let cfg = EmulatorConfig::default();
        for s in 0..50 {
            let (m, t) = lin_lin_first_hit_emulated(4096, |_| true, &cfg, &mut rng(s));
            assert_eq!(m, Some(0));
            assert_eq!(t.oracle_queries, 1);
        }
    }

    #[test]
    fn first_hit_none_when_unmarked() {
        let cfg = EmulatorConfig::default();
        let (m, t) = lin_lin_first_hit_emulated(256, |_| false, &cfg, &mut rng(9));
        assert!(m.is_none());
        // Sum over prefixes 1..=256 of 9√P, plus per-prefix overshoot.
        let floor: f64 = (0..=8).map(|i| 9.0 * 2f64.powi(i).sqrt()).sum();
        assert!(t.oracle_queries as f64 >= floor);
        assert!((t.oracle_queries as f64) < 2.0 * floor);
    }

    #[test]
    fn first_hit_finds_first_index() {
        let cfg = EmulatorConfig::default();
        let mut r = rng(11);
        let ok = (0..300)
            .filter(|_| lin_lin_first_hit_emulated(1024, |i| i >= 57, &cfg, &mut r).0 == Some(57))
            .count();
        assert!(ok >= 295, "{ok}");
    }

    #[test]
    fn emulator_is_deterministic_per_seed() {
        let run = |seed| {
            let mut e = Emulator::seeded(seed);
            (0..20)
                .map(|k| {
                    e.min_index(&[5.0, 4.0, 3.0, 2.0, 1.0, 0.0, 7.0], 0.1)
                        .unwrap()
                        .1
                        .oracle_queries
                        + k
                })
                .collect::<Vec<_>>()
        };
        assert_eq!(run(42), run(42));
        assert!(Emulator::new(EmulatorConfig {
            growth: 1.0,
            ..EmulatorConfig::default()
        })
        .is_err());
    }
}
