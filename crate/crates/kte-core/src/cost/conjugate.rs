//! Legendre transforms `L*(y) = sup_x [<x,y> - L(x)]`.
//!
//! Power costs conjugate in closed form on the dual norm; radial costs reduce
//! to the scalar conjugate `V*` found by golden section on a bracketed
//! concave objective; black-box tables use the discrete Legendre-Fenchel
//! transform over the table, refusing arguments whose supremum is attained on
//! the table boundary.

use super::{CostKind, CostSpec, Norm};
use crate::error::{Error, Result};
use crate::expr::YoungExpr;
use crate::grid::GridField;
use crate::numerics::{golden_max, LogLogTable};
use std::sync::{Arc, OnceLock};

#[derive(Debug, Clone)]
pub enum ConjugateForm {
    /// `L*(y) = coeff * ||y||_*^q`
    Power { q: f64, coeff: f64, norm: Norm },
    /// `L*(y) = V*(|y|)`, golden section per evaluation
    Radial { v: YoungExpr },
    /// discrete Legendre-Fenchel transform over the sampled table
    Table { table: GridField },
}

/// Cached scalar conjugate for radial costs: `V*` and its maximizer
/// `s*(t) = argmax_s [s t - V(s)]` on log-log grids. `s*` is also `dV*/dt`.
#[derive(Debug)]
pub struct ConjugateTable {
    pub vstar: LogLogTable,
    pub smax: LogLogTable,
}

#[derive(Debug, Clone)]
pub struct ConjugateSpec {
    form: ConjugateForm,
    dim: usize,
    validity_radius: f64,
    cache: Arc<OnceLock<Option<ConjugateTable>>>,
}

impl ConjugateSpec {
    pub(crate) fn of(spec: &CostSpec) -> Result<Self> {
        let form = match spec.kind() {
            CostKind::Power { p, coeff, norm } => {
                if *p <= 1.0 {
                    return Err(Error::NotSuperlinear(
                        "p = 1 power cost has an infinite conjugate off the dual unit ball".into(),
                    ));
                }
                let q = p / (p - 1.0);
                let cc = (p - 1.0) * p.powf(-q) * coeff.powf(1.0 - q);
                ConjugateForm::Power {
                    q,
                    coeff: cc,
                    norm: norm.clone(),
                }
            }
            CostKind::Radial { v, .. } => {
                if v.exponent_range().1 <= 1.0 {
                    return Err(Error::NotSuperlinear(
                        "V is linear at infinity; V* is infinite beyond a bounded set".into(),
                    ));
                }
                ConjugateForm::Radial { v: v.clone() }
            }
            CostKind::BlackBox { table, .. } => ConjugateForm::Table {
                table: table.clone(),
            },
        };
        let validity_radius = match &form {
            ConjugateForm::Table { table } => table_validity_radius(table),
            _ => f64::INFINITY,
        };
        Ok(Self {
            form,
            dim: spec.dim(),
            validity_radius,
            cache: Arc::new(OnceLock::new()),
        })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn form(&self) -> &ConjugateForm {
        &self.form
    }

    /// Radius beyond which a table-backed conjugate refuses to extrapolate;
    /// infinite for the analytic forms.
    pub fn validity_radius(&self) -> f64 {
        self.validity_radius
    }

    pub fn eval(&self, y: &[f64]) -> Result<f64> {
        if y.len() != self.dim {
            return Err(Error::DimMismatch(y.len(), self.dim));
        }
        match &self.form {
            ConjugateForm::Power { q, coeff, norm } => Ok(coeff * norm.dual_eval(y).powf(*q)),
            ConjugateForm::Radial { v } => {
                let t = y.iter().map(|v| v * v).sum::<f64>().sqrt();
                Ok(scalar_conjugate(v, t).1)
            }
            ConjugateForm::Table { table } => {
                let g = table.geometry();
                let mut best = f64::NEG_INFINITY;
                let mut best_idx = 0usize;
                let mut p = vec![0.0; g.dim()];
                for idx in 0..g.len() {
                    g.point_into(idx, &mut p);
                    let v = p.iter().zip(y).map(|(a, b)| a * b).sum::<f64>() - table.values()[idx];
                    if v > best {
                        best = v;
                        best_idx = idx;
                    }
                }
                if g.is_boundary(best_idx) {
                    let t = y.iter().map(|v| v * v).sum::<f64>().sqrt();
                    return Err(Error::OutOfDomain {
                        reached: t,
                        covered: self.validity_radius,
                    });
                }
                Ok(best)
            }
        }
    }

    /// Fast evaluation for inner loops: identical to [`eval`](Self::eval) for
    /// power and table forms; radial forms use a cached log-log table of `V*`
    /// (built lazily, accurate to ~1e-6 relative) when the cost grows
    /// super-linearly at zero, else fall back to golden section.
    pub fn eval_fast(&self, y: &[f64]) -> Result<f64> {
        if let ConjugateForm::Radial { .. } = &self.form {
            if let Some(tab) = self.table_cache() {
                let t = y.iter().map(|v| v * v).sum::<f64>().sqrt();
                return Ok(if t == 0.0 { 0.0 } else { tab.vstar.eval(t) });
            }
        }
        self.eval(y)
    }

    /// Gradient of `L*`; writes into `out`. For radial forms this is the
    /// envelope formula `∇L*(y) = s*(|y|) y/|y|`.
    pub fn gradient(&self, y: &[f64], out: &mut [f64]) -> Result<()> {
        match &self.form {
            ConjugateForm::Power { q, coeff, norm } => match norm {
                Norm::Euclidean => {
                    let t = y.iter().map(|v| v * v).sum::<f64>().sqrt();
                    if t == 0.0 {
                        out.fill(0.0);
                    } else {
                        let s = coeff * q * t.powf(q - 2.0);
                        for (o, v) in out.iter_mut().zip(y) {
                            *o = s * v;
                        }
                    }
                }
                Norm::WeightedLp { exponent, weights } => {
                    let a = *exponent;
                    if a == 1.0 {
                        return self.gradient_fd(y, out);
                    }
                    let ap = a / (a - 1.0);
                    let nd = norm.dual_eval(y);
                    if nd == 0.0 {
                        out.fill(0.0);
                        return Ok(());
                    }
                    let lead = coeff * q * nd.powf(q - ap);
                    for i in 0..y.len() {
                        let t = (y[i].abs() / weights[i]).powf(ap - 1.0) / weights[i];
                        out[i] = lead * t * y[i].signum();
                    }
                }
            },
            ConjugateForm::Radial { v } => {
                let t = y.iter().map(|v| v * v).sum::<f64>().sqrt();
                if t == 0.0 {
                    out.fill(0.0);
                    return Ok(());
                }
                let s = match self.table_cache() {
                    Some(tab) => tab.smax.eval(t),
                    None => scalar_conjugate(v, t).0,
                };
                for (o, yv) in out.iter_mut().zip(y) {
                    *o = s * yv / t;
                }
            }
            ConjugateForm::Table { .. } => return self.gradient_fd(y, out),
        }
        Ok(())
    }

    fn gradient_fd(&self, y: &[f64], out: &mut [f64]) -> Result<()> {
        let mut probe = y.to_vec();
        let scale = 1.0 + y.iter().map(|v| v.abs()).fold(0.0, f64::max);
        let h = 1e-7 * scale;
        for i in 0..y.len() {
            probe[i] = y[i] + h;
            let up = self.eval(&probe)?;
            probe[i] = y[i] - h;
            let dn = self.eval(&probe)?;
            probe[i] = y[i];
            out[i] = (up - dn) / (2.0 * h);
        }
        Ok(())
    }

    /// `sup_{|θ|=1} L*(c θ)`, the Lipschitz-rate constant of Proposition 4.3.
    pub fn sup_on_sphere(&self, c: f64) -> Result<f64> {
        match &self.form {
            ConjugateForm::Power { q, coeff, norm } => {
                // max of the dual norm over the Euclidean sphere equals the
                // Euclidean radius of the primal unit ball
                let m = norm.unit_ball_euclidean_radius();
                Ok(coeff * (c * m).powf(*q))
            }
            ConjugateForm::Radial { .. } => self.eval(&radial_probe(self.dim, c)),
            ConjugateForm::Table { .. } => {
                let mut best = 0.0f64;
                for dir in super::sample_directions(self.dim) {
                    let y: Vec<f64> = dir.iter().map(|d| d * c).collect();
                    best = best.max(self.eval(&y)?);
                }
                Ok(best)
            }
        }
    }

    fn table_cache(&self) -> Option<&ConjugateTable> {
        self.cache
            .get_or_init(|| {
                let ConjugateForm::Radial { v } = &self.form else {
                    return None;
                };
                // near zero V ~ s^amin; V* vanishes on an interval unless
                // amin > 1, and the log-log table needs V* > 0 throughout
                if v.exponent_range().0 <= 1.0 {
                    return None;
                }
                let n = 8192usize;
                let mut ts = Vec::with_capacity(n + 1);
                let mut vs = Vec::with_capacity(n + 1);
                let mut ss = Vec::with_capacity(n + 1);
                for k in 0..=n {
                    let t = 10f64.powf(-9.0 + 18.0 * k as f64 / n as f64);
                    let (s, val) = scalar_conjugate(v, t);
                    ts.push(t);
                    vs.push(val.max(f64::MIN_POSITIVE));
                    ss.push(s.max(f64::MIN_POSITIVE));
                }
                for k in 1..=n {
                    if vs[k] <= vs[k - 1] {
                        vs[k] = vs[k - 1] * (1.0 + 1e-15);
                    }
                    if ss[k] <= ss[k - 1] {
                        ss[k] = ss[k - 1] * (1.0 + 1e-15);
                    }
                }
                Some(ConjugateTable {
                    vstar: LogLogTable::new(&ts, &vs),
                    smax: LogLogTable::new(&ts, &ss),
                })
            })
            .as_ref()
    }
}

/// `(argmax, V*(t))` for the scalar conjugate `V*(t) = sup_{s>=0} [s t - V(s)]`,
/// by doubling bracket and golden section to 1e-12 relative.
fn scalar_conjugate(v: &YoungExpr, t: f64) -> (f64, f64) {
    if t <= 0.0 {
        return (0.0, 0.0);
    }
    // V(s)/s <= V'(s), so once V(s)/s > t the maximizer lies below s
    let mut hi = 1.0f64;
    while v.eval(hi) / hi <= t && hi < 1e290 {
        hi *= 2.0;
    }
    let (s, val) = golden_max(|s| s * t - v.eval(s), 0.0, hi, 1e-12 * (1.0 + hi));
    if val > 0.0 {
        (s, val)
    } else {
        (0.0, 0.0)
    }
}

fn radial_probe(dim: usize, c: f64) -> Vec<f64> {
    let mut y = vec![0.0; dim];
    y[0] = c;
    y
}

fn table_validity_radius(table: &GridField) -> f64 {
    let g = table.geometry();
    let mut bound = f64::INFINITY;
    for idx in 0..g.len() {
        if !g.is_boundary(idx) {
            continue;
        }
        let mi = g.multi_index(idx);
        for (d, a) in g.axes.iter().enumerate() {
            let k = mi[d];
            let inward = if k == 0 {
                Some(1)
            } else if k == a.n - 1 {
                Some(k - 1)
            } else {
                None
            };
            if let Some(kin) = inward {
                let mut m = mi;
                m[d] = kin;
                let j = g.linear_index(m);
                bound = bound.min((table.values()[idx] - table.values()[j]).abs() / a.h);
            }
        }
    }
    bound
}
