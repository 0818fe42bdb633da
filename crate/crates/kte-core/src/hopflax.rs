//! The infimum-convolution semigroup `Q_t f(x) = inf_y [f(y) + t L((x-y)/t)]`
//! on grids, with its semigroup, generator, and Hamilton-Jacobi residuals.
//!
//! Minimization is over grid nodes inside the ball `|x - y| <= t R_L(2M/t)`,
//! `M = sup |f|`; by the window bound that ball always contains the
//! unconstrained in-domain minimizer. Nodes whose ball is cut by the domain
//! boundary are flagged rather than rejected, and residual statistics are
//! taken over unflagged nodes.

use crate::cost::CostSpec;
use crate::error::{Error, Result};
use crate::grid::GridField;
#[cfg(test)]
use crate::grid::GridGeometry;
use crate::measure::DiscreteMeasure;
use rayon::prelude::*;

/// Result of a windowed minimization: the field plus a per-node flag marking
/// nodes whose search ball was clipped by the grid boundary.
#[derive(Debug, Clone)]
pub struct Windowed {
    pub field: GridField,
    pub clipped: Vec<bool>,
}

impl Windowed {
    pub fn any_clipped(&self) -> bool {
        self.clipped.iter().any(|&c| c)
    }
}

/// A field together with the set of nodes where its values are trustworthy
/// (interior, unclipped windows).
#[derive(Debug, Clone)]
pub struct MaskedField {
    pub field: GridField,
    pub valid: Vec<bool>,
}

impl MaskedField {
    /// Sup of |value| over valid nodes.
    pub fn sup(&self) -> f64 {
        self.field
            .values()
            .iter()
            .zip(&self.valid)
            .filter(|(_, &ok)| ok)
            .map(|(v, _)| v.abs())
            .fold(0.0, f64::max)
    }

    /// Quantile of |value| over valid nodes (`q` in [0,1]).
    pub fn quantile(&self, q: f64) -> f64 {
        let mut vals: Vec<f64> = self
            .field
            .values()
            .iter()
            .zip(&self.valid)
            .filter(|(_, &ok)| ok)
            .map(|(v, _)| v.abs())
            .collect();
        if vals.is_empty() {
            return 0.0;
        }
        vals.sort_by(|a, b| a.partial_cmp(b).unwrap());
        let k = ((vals.len() - 1) as f64 * q).round() as usize;
        vals[k]
    }

    pub fn valid_count(&self) -> usize {
        self.valid.iter().filter(|&&v| v).count()
    }
}

/// `Q_t f` by windowed minimization over grid nodes; ties go to the smallest
/// node index, so the result is independent of evaluation order.
pub fn inf_convolve(f: &GridField, spec: &CostSpec, t: f64) -> Result<Windowed> {
    if !(t > 0.0) {
        return Err(Error::PreconditionViolation("inf_convolve needs t > 0".into()));
    }
    let g = f.geometry();
    if spec.dim() != g.dim() {
        return Err(Error::DimMismatch(spec.dim(), g.dim()));
    }
    let m = f.max_abs();
    let r_win = t * spec.radius(2.0 * m / t)?;
    let k_max: Vec<isize> = g
        .axes
        .iter()
        .map(|a| (r_win / a.h + 1e-12).floor() as isize)
        .collect();
    let vals = f.values();
    let dim = g.dim();
    let out: Result<Vec<(f64, bool)>> = (0..g.len())
        .into_par_iter()
        .map(|idx| {
            let mi = g.multi_index(idx);
            let mut clipped = false;
            let mut lo = [0isize; 2];
            let mut hi = [0isize; 2];
            for d in 0..dim {
                let i = mi[d] as isize;
                let n = g.axes[d].n as isize;
                if i - k_max[d] < 0 || i + k_max[d] > n - 1 {
                    clipped = true;
                }
                lo[d] = (i - k_max[d]).max(0);
                hi[d] = (i + k_max[d]).min(n - 1);
            }
            let r2 = r_win * r_win * (1.0 + 1e-12);
            let mut best = f64::INFINITY;
            let mut dx = [0.0f64; 2];
            match dim {
                1 => {
                    let h = g.axes[0].h;
                    let i = mi[0] as isize;
                    for j in lo[0]..=hi[0] {
                        dx[0] = (i - j) as f64 * h / t;
                        let val = vals[j as usize] + t * spec.eval(&dx[..1])?;
                        if val < best {
                            best = val;
                        }
                    }
                }
                _ => {
                    let (h0, h1) = (g.axes[0].h, g.axes[1].h);
                    let (i0, i1) = (mi[0] as isize, mi[1] as isize);
                    let n1 = g.axes[1].n;
                    for j0 in lo[0]..=hi[0] {
                        let d0 = (i0 - j0) as f64 * h0;
                        for j1 in lo[1]..=hi[1] {
                            let d1 = (i1 - j1) as f64 * h1;
                            if d0 * d0 + d1 * d1 > r2 {
                                continue;
                            }
                            dx[0] = d0 / t;
                            dx[1] = d1 / t;
                            let val =
                                vals[j0 as usize * n1 + j1 as usize] + t * spec.eval(&dx[..2])?;
                            if val < best {
                                best = val;
                            }
                        }
                    }
                }
            }
            Ok((best, clipped))
        })
        .collect();
    let out = out?;
    let (values, clipped): (Vec<f64>, Vec<bool>) = out.into_iter().unzip();
    Ok(Windowed {
        field: GridField::new(g.clone(), values)?,
        clipped,
    })
}

/// `||Q_{t+s} f - Q_t (Q_s f)||_inf` over nodes where neither computation had
/// a clipped window.
pub fn semigroup_residual(f: &GridField, spec: &CostSpec, t: f64, s: f64) -> Result<f64> {
    let direct = inf_convolve(f, spec, t + s)?;
    let inner = inf_convolve(f, spec, s)?;
    let outer = inf_convolve(&inner.field, spec, t)?;
    let mut res = 0.0f64;
    for i in 0..direct.field.values().len() {
        if direct.clipped[i] || outer.clipped[i] {
            continue;
        }
        res = res.max((direct.field.values()[i] - outer.field.values()[i]).abs());
    }
    Ok(res)
}

/// The generator probe `(Q_eps f - f)/eps + L*(∇f)` at interior unclipped
/// nodes; tends to zero where `f` is differentiable.
pub fn generator_probe(f: &GridField, spec: &CostSpec, eps: f64) -> Result<MaskedField> {
    if !(eps > 0.0) {
        return Err(Error::PreconditionViolation("generator probe needs eps > 0".into()));
    }
    let conj = spec.legendre()?;
    let q = inf_convolve(f, spec, eps)?;
    let grad = f.gradient();
    let g = f.geometry();
    let mut values = vec![0.0; g.len()];
    let mut valid = vec![false; g.len()];
    for i in 0..g.len() {
        if q.clipped[i] || g.is_boundary(i) {
            continue;
        }
        let l_star = conj.eval_fast(grad.at(i))?;
        values[i] = (q.field.values()[i] - f.values()[i]) / eps + l_star;
        valid[i] = true;
    }
    Ok(MaskedField {
        field: GridField::new(g.clone(), values)?,
        valid,
    })
}

/// Hamilton-Jacobi residual `(Q_{t+dt} f - Q_{t-dt} f)/(2 dt) + L*(∇Q_t f)`
/// at interior unclipped nodes.
pub fn hj_residual(f: &GridField, spec: &CostSpec, t: f64, dt: f64) -> Result<MaskedField> {
    if !(t > dt && dt > 0.0) {
        return Err(Error::PreconditionViolation("hj_residual needs t > dt > 0".into()));
    }
    let conj = spec.legendre()?;
    let plus = inf_convolve(f, spec, t + dt)?;
    let minus = inf_convolve(f, spec, t - dt)?;
    let mid = inf_convolve(f, spec, t)?;
    let grad = mid.field.gradient();
    let g = f.geometry();
    let mut values = vec![0.0; g.len()];
    let mut valid = vec![false; g.len()];
    for i in 0..g.len() {
        if plus.clipped[i] || minus.clipped[i] || mid.clipped[i] || g.is_boundary(i) {
            continue;
        }
        let l_star = conj.eval_fast(grad.at(i))?;
        values[i] =
            (plus.field.values()[i] - minus.field.values()[i]) / (2.0 * dt) + l_star;
        valid[i] = true;
    }
    Ok(MaskedField {
        field: GridField::new(g.clone(), values)?,
        valid,
    })
}

/// Both sides of the interpolation identity
/// `∫ (Q_t f - f) dν = -∫_0^t ∫ L*(∇ Q_s f) dν ds`
/// with the time integral by trapezoid over `steps` slices.
#[derive(Debug, Clone)]
pub struct InterpolationCheck {
    pub lhs: f64,
    pub rhs: f64,
    pub gap: f64,
}

pub fn interpolation_check(
    f: &GridField,
    spec: &CostSpec,
    nu: &DiscreteMeasure,
    t: f64,
    steps: usize,
) -> Result<InterpolationCheck> {
    if steps == 0 || !(t > 0.0) {
        return Err(Error::PreconditionViolation(
            "interpolation check needs t > 0 and steps >= 1".into(),
        ));
    }
    let g = f.geometry();
    let w = nu.grid_weights(g)?;
    let conj = spec.legendre()?;
    let qt = inf_convolve(f, spec, t)?;
    let lhs: f64 = (0..g.len())
        .map(|i| w[i] * (qt.field.values()[i] - f.values()[i]))
        .sum();
    let mut slice_vals = Vec::with_capacity(steps + 1);
    for j in 0..=steps {
        let s = t * j as f64 / steps as f64;
        let qs = if j == 0 {
            f.clone()
        } else {
            inf_convolve(f, spec, s)?.field
        };
        let grad = qs.gradient();
        let mut acc = 0.0;
        for i in 0..g.len() {
            if w[i] > 0.0 {
                acc += w[i] * conj.eval_fast(grad.at(i))?;
            }
        }
        slice_vals.push(acc);
    }
    let xs: Vec<f64> = (0..=steps).map(|j| t * j as f64 / steps as f64).collect();
    let rhs = -crate::numerics::trapezoid(&xs, &slice_vals);
    Ok(InterpolationCheck {
        lhs,
        rhs,
        gap: (lhs - rhs).abs(),
    })
}

/// Integral of a grid field against node weights.
pub fn integrate(field: &GridField, weights: &[f64]) -> f64 {
    field
        .values()
        .iter()
        .zip(weights)
        .map(|(v, w)| v * w)
        .sum()
}
