//! Independent oracles shared by the integration tests.
#![allow(dead_code)]

use qopt::direct::DirectRect;
use qopt::{Domain, ObjectiveFunction};
use rand::Rng;

/// Lower end of the 95% Wilson score interval.
pub fn wilson_lower(successes: u64, trials: u64) -> f64 {
    let z = 1.959_963_984_540_054;
    let n = trials as f64;
    let p = successes as f64 / n;
    let z2 = z * z;
    (p + z2 / (2.0 * n) - z * (p * (1.0 - p) / n + z2 / (4.0 * n * n)).sqrt()) / (1.0 + z2 / n)
}

/// Least-squares slope of `ln y` against `ln x`.
pub fn loglog_slope(points: &[(f64, f64)]) -> f64 {
    let pts: Vec<(f64, f64)> = points.iter().map(|(x, y)| (x.ln(), y.ln())).collect();
    let n = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxy: f64 = pts.iter().map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = pts.iter().map(|(x, _)| (x - mx).powi(2)).sum();
    sxy / sxx
}

/// Brute-force selection: `j` qualifies iff some `K̃ > 0` puts it on or below
/// every other rect's line and at or below the anchor.
pub fn po_brute_force(rects: &[DirectRect], eps: f64) -> Vec<usize> {
    let f_min = rects.iter().map(|r| r.f_center).fold(f64::INFINITY, f64::min);
    let anchor = f_min - eps * f_min.abs();
    let mut out = Vec::new();
    'rect: for (j, rj) in rects.iter().enumerate() {
        let (mut lo, mut hi) = (f64::NEG_INFINITY, f64::INFINITY);
        for (i, ri) in rects.iter().enumerate() {
            if i == j {
                continue;
            }
            if ri.d == rj.d {
                if ri.f_center < rj.f_center {
                    continue 'rect;
                }
            } else if ri.d < rj.d {
                lo = lo.max((rj.f_center - ri.f_center) / (rj.d - ri.d));
            } else {
                hi = hi.min((ri.f_center - rj.f_center) / (ri.d - rj.d));
            }
        }
        if !(hi > 0.0 && lo <= hi) {
            continue;
        }
        if hi.is_infinite() || rj.f_center - hi * rj.d <= anchor {
            out.push(j);
        }
    }
    out
}

/// Random rectangles with repeated size classes and continuous values.
pub fn random_rects<R: Rng>(rng: &mut R, count: usize, n: usize) -> Vec<DirectRect> {
    (0..count)
        .map(|_| {
            let t: Vec<u32> = (0..n).map(|_| rng.gen_range(0..4)).collect();
            let c: Vec<f64> = (0..n).map(|_| rng.gen()).collect();
            DirectRect::new(c, t, rng.gen_range(-1.0..1.0))
        })
        .collect()
}

/// `½xᵀAx + bᵀx` with `A = MᵀM + I/10`; returns the function and the
/// Frobenius norm of `A`, an upper bound on its largest eigenvalue.
pub fn random_quadratic<R: Rng>(rng: &mut R, n: usize) -> (ObjectiveFunction, f64) {
    let m: Vec<f64> = (0..n * n).map(|_| rng.gen_range(-1.0..1.0)).collect();
    let mut a = vec![0.0; n * n];
    for i in 0..n {
        for j in 0..n {
            a[i * n + j] = (0..n).map(|k| m[k * n + i] * m[k * n + j]).sum::<f64>();
        }
        a[i * n + i] += 0.1;
    }
    let b: Vec<f64> = (0..n).map(|_| rng.gen_range(-1.0..1.0)).collect();
    let frob = a.iter().map(|v| v * v).sum::<f64>().sqrt();
    let (a2, b2) = (a.clone(), b.clone());
    let f = ObjectiveFunction::new("quadratic", n, move |x| {
        let mut s = 0.0;
        for i in 0..n {
            for j in 0..n {
                s += 0.5 * x[i] * a[i * n + j] * x[j];
            }
            s += b[i] * x[i];
        }
        s
    })
    .with_domain(Domain::unbounded(n))
    .with_gradient(move |x| {
        (0..n)
            .map(|i| (0..n).map(|j| a2[i * n + j] * x[j]).sum::<f64>() + b2[i])
            .collect()
    });
    (f, frob)
}

/// First `m` with `f(x + γ^m d) ≤ f(x) + βγ^m·Ddf`, by direct evaluation.
pub fn scan_m0(f: &ObjectiveFunction, x: &[f64], d: &[f64], ddf: f64, gamma: f64, beta: f64, cap: u32) -> Option<u32> {
    let fx = f.value(x);
    (0..=cap).find(|&m| {
        let eta = gamma.powi(m as i32);
        let y: Vec<f64> = x.iter().zip(d).map(|(a, b)| a + eta * b).collect();
        f.value(&y) <= fx + beta * eta * ddf
    })
}
