//! DIRECT (dividing rectangles) over the unit cube, mapped onto the function's box.
//!
//! Rectangles are stored in unit coordinates. A rectangle with third counts
//! `t` has side `3^{-t_i}` in dimension `i` and centre-to-vertex distance
//! `d = ½·√Σ 3^{-2t_i}`.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::objective::{CountingOracle, Domain};

pub const DEFAULT_EPSILON: f64 = 1e-4;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DirectRect {
    /// Centre in unit-cube coordinates.
    pub center: Vec<f64>,
    pub third_counts: Vec<u32>,
    pub f_center: f64,
    #[serde(rename = "d_j")]
    pub d: f64,
}

impl DirectRect {
    pub fn new(center: Vec<f64>, third_counts: Vec<u32>, f_center: f64) -> Self {
        let d = center_to_vertex(&third_counts);
        Self {
            center,
            third_counts,
            f_center,
            d,
        }
    }

    pub fn side(&self, i: usize) -> f64 {
        3f64.powi(-(self.third_counts[i] as i32))
    }

    /// False once a split along a longest side would land on the centre itself
    /// in floating point.
    pub fn is_resolvable(&self) -> bool {
        let tmin = *self.third_counts.iter().min().expect("n ≥ 1");
        let delta = 3f64.powi(-(tmin as i32 + 1));
        (0..self.center.len())
            .filter(|&i| self.third_counts[i] == tmin)
            .all(|i| self.center[i] - delta != self.center[i] && self.center[i] + delta != self.center[i])
    }

    pub fn volume(&self) -> f64 {
        (0..self.center.len()).map(|i| self.side(i)).product()
    }
}

/// `½·√Σ 3^{-2t_i}`.
pub fn center_to_vertex(third_counts: &[u32]) -> f64 {
    0.5 * third_counts.iter().map(|t| 9f64.powi(-(*t as i32))).sum::<f64>().sqrt()
}

#[derive(Debug, Clone, Serialize)]
pub struct PartitionState {
    rects: Vec<DirectRect>,
    domain: Domain,
    f_min: f64,
    x_min: Vec<f64>,
    epsilon: f64,
    iteration: usize,
    evaluations: u64,
}

impl PartitionState {
    /// Samples the centre of the whole box.
    pub fn new(oracle: &mut CountingOracle, epsilon: f64) -> Result<Self> {
        if !(epsilon >= 0.0) {
            return Err(Error::param("epsilon", "must be nonnegative"));
        }
        let domain = oracle.function().domain().clone();
        if !domain.is_bounded() {
            return Err(Error::param("domain", "DIRECT needs a bounded box"));
        }
        let n = domain.dim();
        let center = vec![0.5; n];
        let x = domain.from_unit(&center);
        let f = oracle.evaluate(&x)?;
        Ok(Self {
            rects: vec![DirectRect::new(center, vec![0; n], f)],
            domain,
            f_min: f,
            x_min: x,
            epsilon,
            iteration: 0,
            evaluations: 1,
        })
    }

    /// Builds a state from explicit rectangles, e.g. to test selection.
    pub fn from_rects(rects: Vec<DirectRect>, epsilon: f64) -> Result<Self> {
        let first = rects.first().ok_or(Error::Empty("partition without rectangles"))?;
        let n = first.center.len();
        let best = rects
            .iter()
            .min_by(|a, b| a.f_center.total_cmp(&b.f_center))
            .expect("nonempty");
        Ok(Self {
            f_min: best.f_center,
            x_min: best.center.clone(),
            domain: Domain::unit(n),
            epsilon,
            iteration: 0,
            evaluations: rects.len() as u64,
            rects,
        })
    }

    pub fn rects(&self) -> &[DirectRect] {
        &self.rects
    }

    pub fn f_min(&self) -> f64 {
        self.f_min
    }

    /// Best centre found, in the function's coordinates.
    pub fn x_min(&self) -> &[f64] {
        &self.x_min
    }

    pub fn epsilon(&self) -> f64 {
        self.epsilon
    }

    pub fn iteration(&self) -> usize {
        self.iteration
    }

    /// Number of sampled centres, `m` in the usual description.
    pub fn evaluations(&self) -> u64 {
        self.evaluations
    }

    pub fn total_volume(&self) -> f64 {
        self.rects.iter().map(DirectRect::volume).sum()
    }

    pub fn snapshot_json(&self) -> serde_json::Value {
        serde_json::to_value(&self.rects).expect("rects serialise")
    }

    /// `d_j,f_center,selected` rows for a scatter of the partition.
    pub fn scatter_csv(&self, selected: &[usize]) -> Result<String> {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(["d_j", "f_center", "selected"])
            .map_err(|e| Error::param("csv", e.to_string()))?;
        for (j, r) in self.rects.iter().enumerate() {
            let flag = if selected.binary_search(&j).is_ok() { "1" } else { "0" };
            w.write_record([format!("{:.16e}", r.d), format!("{:.16e}", r.f_center), flag.into()])
                .map_err(|e| Error::param("csv", e.to_string()))?;
        }
        let bytes = w.into_inner().map_err(|e| Error::param("csv", e.to_string()))?;
        Ok(String::from_utf8(bytes).expect("ascii output"))
    }
}

/// Indices of the potentially optimal rectangles, ascending.
pub fn potentially_optimal(state: &PartitionState) -> Vec<usize> {
    // Group by the multiset of third counts, which fixes d exactly.
    let mut groups: BTreeMap<Vec<u32>, Vec<usize>> = BTreeMap::new();
    for (j, r) in state.rects.iter().enumerate() {
        let mut key = r.third_counts.clone();
        key.sort_unstable();
        groups.entry(key).or_default().push(j);
    }
    let mut levels: Vec<(f64, Vec<usize>)> = groups
        .into_values()
        .map(|members| (state.rects[members[0]].d, members))
        .collect();
    levels.sort_by(|a, b| a.0.total_cmp(&b.0));
    // Different multisets can still give the same distance.
    let mut merged: Vec<(f64, Vec<usize>)> = Vec::new();
    for (d, members) in levels {
        match merged.last_mut() {
            Some((last, m)) if *last == d => m.extend(members),
            _ => merged.push((d, members)),
        }
    }

    let points: Vec<(f64, f64, Vec<usize>)> = merged
        .into_iter()
        .map(|(d, members)| {
            let f = members
                .iter()
                .map(|j| state.rects[*j].f_center)
                .fold(f64::INFINITY, f64::min);
            let best = members.into_iter().filter(|j| state.rects[*j].f_center == f).collect();
            (d, f, best)
        })
        .collect();

    // Lower convex hull, left to right, keeping collinear points.
    let mut hull: Vec<usize> = Vec::new();
    for p in 0..points.len() {
        while hull.len() >= 2 {
            let (o, a) = (hull[hull.len() - 2], hull[hull.len() - 1]);
            let cross = (points[a].0 - points[o].0) * (points[p].1 - points[o].1)
                - (points[a].1 - points[o].1) * (points[p].0 - points[o].0);
            if cross < 0.0 {
                hull.pop();
            } else {
                break;
            }
        }
        hull.push(p);
    }

    let anchor = state.f_min - state.epsilon * state.f_min.abs();
    let slope = |a: usize, b: usize| (points[b].1 - points[a].1) / (points[b].0 - points[a].0);
    let mut out = Vec::new();
    for (h, &p) in hull.iter().enumerate() {
        let lo = if h > 0 {
            slope(hull[h - 1], p)
        } else {
            f64::NEG_INFINITY
        };
        let hi = if h + 1 < hull.len() {
            slope(p, hull[h + 1])
        } else {
            f64::INFINITY
        };
        if !(hi > 0.0 && lo <= hi) {
            continue;
        }
        let (d, f, _) = &points[p];
        if hi.is_infinite() || f - hi * d <= anchor {
            out.extend(points[p].2.iter().copied());
        }
    }
    out.sort_unstable();
    out
}

/// Splits rectangle `index` into thirds along each of its longest sides.
pub fn trisect(state: &mut PartitionState, index: usize, oracle: &mut CountingOracle) -> Result<()> {
    let rect = state.rects.get(index).ok_or(Error::RectIndex(index))?.clone();
    let tmin = *rect.third_counts.iter().min().expect("n ≥ 1");
    let delta = 3f64.powi(-(tmin as i32 + 1));
    let longest: Vec<usize> = (0..rect.center.len())
        .filter(|i| rect.third_counts[*i] == tmin)
        .collect();

    let mut samples = Vec::with_capacity(longest.len());
    for &i in &longest {
        let mut lo = rect.center.clone();
        lo[i] -= delta;
        let mut hi = rect.center.clone();
        hi[i] += delta;
        let f_lo = oracle.evaluate(&state.domain.from_unit(&lo))?;
        let f_hi = oracle.evaluate(&state.domain.from_unit(&hi))?;
        state.evaluations += 2;
        for (c, f) in [(&lo, f_lo), (&hi, f_hi)] {
            if f < state.f_min {
                state.f_min = f;
                state.x_min = state.domain.from_unit(c);
            }
        }
        samples.push((i, f_lo.min(f_hi), (lo, f_lo), (hi, f_hi)));
    }
    // Dimensions with the best sample keep the largest pieces.
    samples.sort_by(|a, b| a.1.total_cmp(&b.1).then(a.0.cmp(&b.0)));

    let mut counts = rect.third_counts.clone();
    for (i, _, (lo, f_lo), (hi, f_hi)) in samples {
        counts[i] += 1;
        state.rects.push(DirectRect::new(lo, counts.clone(), f_lo));
        state.rects.push(DirectRect::new(hi, counts.clone(), f_hi));
    }
    state.rects[index] = DirectRect::new(rect.center, counts, rect.f_center);
    Ok(())
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DirectIteration {
    pub t: usize,
    pub m: u64,
    pub f_min: f64,
    pub selected: Vec<usize>,
}

#[derive(Debug, Clone, Serialize)]
pub struct DirectOutcome {
    pub f_min: f64,
    pub x_min: Vec<f64>,
    pub history: Vec<DirectIteration>,
    pub state: PartitionState,
}

/// Runs `iterations` sweeps; each trisects every potentially optimal rectangle once.
pub fn direct_minimize(oracle: &mut CountingOracle, epsilon: f64, iterations: usize) -> Result<DirectOutcome> {
    if iterations == 0 {
        return Err(Error::param("T", "iteration limit must be at least 1"));
    }
    let mut state = PartitionState::new(oracle, epsilon)?;
    let mut history = Vec::with_capacity(iterations);
    for t in 1..=iterations {
        let mut selected = potentially_optimal(&state);
        selected.retain(|&j| state.rects[j].is_resolvable());
        for &j in &selected {
            trisect(&mut state, j, oracle)?;
        }
        state.iteration = t;
        history.push(DirectIteration {
            t,
            m: state.evaluations,
            f_min: state.f_min,
            selected,
        });
    }
    Ok(DirectOutcome {
        f_min: state.f_min,
        x_min: state.x_min.clone(),
        history,
        state,
    })
}
