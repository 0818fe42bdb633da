//! Brute-force and closed-form reference routines for the test suites.
//!
//! Everything here deliberately avoids the solver paths it is used to check:
//! the γ reference solves the discretized linear program by convex-hull
//! duality instead of the golden-section reduction, and the Orlicz reference
//! maximizes the defining supremum directly instead of going through the
//! one-dimensional reduction.

use crate::cost::CostSpec;
use crate::error::{Error, Result};
use crate::measure::{DiscreteMeasure, VectorSample};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// `γ(p₁, p₀)` from the discretized constraint set: maximize `a + b` subject
/// to `a + b r_k <= min(r_k^{p₁}, r_k^{p₀})` on 10^4 log-spaced abscissae.
/// By linear-programming duality the optimum equals the lower convex hull of
/// the constraint graph evaluated at `r = 1`.
pub fn gamma_lp_reference(p1: f64, p0: f64) -> Result<f64> {
    if !(p0 >= 1.0) || p1 < p0 {
        return Err(Error::InvalidOrder {
            p_plus: p1,
            p_minus: p0,
        });
    }
    let n = 10_000usize;
    let mut pts: Vec<(f64, f64)> = Vec::with_capacity(n + 1);
    pts.push((0.0, 0.0));
    for k in 0..n {
        let r = 10f64.powf(-6.0 + 12.0 * k as f64 / (n - 1) as f64);
        pts.push((r, r.powf(p1).min(r.powf(p0))));
    }
    // lower convex hull (Andrew's monotone chain on sorted abscissae)
    let mut hull: Vec<(f64, f64)> = Vec::new();
    for p in pts {
        while hull.len() >= 2 {
            let a = hull[hull.len() - 2];
            let b = hull[hull.len() - 1];
            let cross = (b.0 - a.0) * (p.1 - a.1) - (b.1 - a.1) * (p.0 - a.0);
            if cross <= 0.0 {
                hull.pop();
            } else {
                break;
            }
        }
        hull.push(p);
    }
    let k = hull.partition_point(|p| p.0 < 1.0);
    if k == 0 || k >= hull.len() {
        return Ok(1.0);
    }
    let (x0, y0) = hull[k - 1];
    let (x1, y1) = hull[k];
    Ok(y0 + (y1 - y0) * (1.0 - x0) / (x1 - x0))
}

/// Direct maximization of `Σ λ_i <u_i, v_i>` over `Σ λ_i L*(v_i) <= 1` by
/// normalized gradient ascent on the scale-invariant ratio, with random
/// restarts. The problem is a linear objective over a convex set, so every
/// ascent limit is global; restarts only guard numerical stalls.
pub fn orlicz_norm_direct_max(
    u: &VectorSample,
    spec: &CostSpec,
    lam: &DiscreteMeasure,
    restarts: usize,
    iters: usize,
    seed: u64,
) -> Result<f64> {
    u.check_aligned(lam)?;
    let conj = spec.legendre()?;
    let dim = lam.dim();
    let n = lam.len();
    let w = lam.weights();
    let flat_u: Vec<f64> = u.values.iter().flatten().copied().collect();
    if flat_u.iter().all(|&v| v == 0.0) {
        return Ok(0.0);
    }
    let objective = |v: &[f64]| -> f64 {
        (0..n)
            .map(|i| {
                w[i] * (0..dim)
                    .map(|d| flat_u[i * dim + d] * v[i * dim + d])
                    .sum::<f64>()
            })
            .sum()
    };
    let lux = |v: &[f64]| crate::orlicz::luxemburg_flat(&conj, dim, v, w);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut best = 0.0f64;
    for restart in 0..restarts {
        let mut v: Vec<f64> = if restart == 0 {
            flat_u.clone()
        } else {
            (0..n * dim).map(|_| rng.gen_range(-1.0..1.0)).collect()
        };
        let nv = lux(&v)?;
        if nv == 0.0 {
            continue;
        }
        for x in v.iter_mut() {
            *x /= nv;
        }
        let mut val = objective(&v);
        let mut step = 0.5;
        let mut gbuf = vec![0.0f64; dim];
        for _ in 0..iters {
            // ascent on the ratio objective/||v||: at ||v|| = 1 its gradient
            // is λu - val * ∇||v||, with ∇||v|| = λ ∇L*(v) / Σ λ <∇L*(v), v>
            let mut grad_norm = vec![0.0f64; n * dim];
            let mut denom = 0.0;
            for i in 0..n {
                conj.gradient(&v[i * dim..(i + 1) * dim], &mut gbuf)?;
                for d in 0..dim {
                    grad_norm[i * dim + d] = w[i] * gbuf[d];
                    denom += w[i] * gbuf[d] * v[i * dim + d];
                }
            }
            if denom <= 0.0 {
                break;
            }
            let dir: Vec<f64> = (0..n * dim)
                .map(|j| w[j / dim] * flat_u[j] - val * grad_norm[j] / denom)
                .collect();
            let dn = dir.iter().map(|x| x * x).sum::<f64>().sqrt();
            if dn == 0.0 {
                break;
            }
            let mut improved = false;
            for _ in 0..40 {
                let cand: Vec<f64> = v
                    .iter()
                    .zip(&dir)
                    .map(|(x, d)| x + step * d / dn)
                    .collect();
                let nc = lux(&cand)?;
                if nc > 0.0 {
                    let cv = objective(&cand) / nc;
                    if cv > val {
                        v = cand.iter().map(|x| x / nc).collect();
                        val = cv;
                        step *= 1.4;
                        improved = true;
                        break;
                    }
                }
                step *= 0.5;
                if step < 1e-15 {
                    break;
                }
            }
            if !improved {
                break;
            }
        }
        best = best.max(val);
    }
    Ok(best)
}
