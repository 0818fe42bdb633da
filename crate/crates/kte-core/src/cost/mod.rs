//! Convex cost functions `L` on R^n: evaluation, Legendre transforms, the
//! associated Young functions, sublevel radii, and Δ₂ diagnostics.
//!
//! Three kinds are supported. `Power` is `coeff * ||x||^p` for a selectable
//! norm; `Radial` is `V(|x|)` for a scalar Young function `V` from the
//! expression grammar in [`crate::expr`]; `BlackBox` is a sampled table with
//! multilinear interpolation, for stress tests and non-even costs.

mod conjugate;
mod young;

pub use conjugate::{ConjugateForm, ConjugateSpec};
pub use young::{gamma, one_sided_derivatives, scalar_young_scan, PhiForm, YoungProfile};

use crate::error::{Error, Result};
use crate::expr::{parse_young, YoungExpr};
use crate::grid::GridField;
use crate::numerics::bisect_root;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use std::sync::{Arc, OnceLock};

/// Norm selector for power costs.
#[derive(Debug, Clone, PartialEq)]
pub enum Norm {
    Euclidean,
    /// `||x|| = (Σ (w_i |x_i|)^a)^(1/a)` with `a >= 1`, `w_i > 0`.
    WeightedLp { exponent: f64, weights: Vec<f64> },
}

impl Norm {
    pub fn eval(&self, x: &[f64]) -> f64 {
        match self {
            Norm::Euclidean => x.iter().map(|v| v * v).sum::<f64>().sqrt(),
            Norm::WeightedLp { exponent, weights } => {
                let a = *exponent;
                if a == 1.0 {
                    x.iter().zip(weights).map(|(v, w)| w * v.abs()).sum()
                } else {
                    x.iter()
                        .zip(weights)
                        .map(|(v, w)| (w * v.abs()).powf(a))
                        .sum::<f64>()
                        .powf(1.0 / a)
                }
            }
        }
    }

    /// The dual norm `||y||_* = sup { <x,y> : ||x|| <= 1 }`.
    pub fn dual_eval(&self, y: &[f64]) -> f64 {
        match self {
            Norm::Euclidean => y.iter().map(|v| v * v).sum::<f64>().sqrt(),
            Norm::WeightedLp { exponent, weights } => {
                let a = *exponent;
                if a == 1.0 {
                    y.iter()
                        .zip(weights)
                        .map(|(v, w)| v.abs() / w)
                        .fold(0.0, f64::max)
                } else {
                    let q = a / (a - 1.0);
                    y.iter()
                        .zip(weights)
                        .map(|(v, w)| (v.abs() / w).powf(q))
                        .sum::<f64>()
                        .powf(1.0 / q)
                }
            }
        }
    }

    /// `max { |x|_2 : ||x|| <= 1 }`, the Euclidean radius of the unit ball.
    pub fn unit_ball_euclidean_radius(&self) -> f64 {
        match self {
            Norm::Euclidean => 1.0,
            Norm::WeightedLp { exponent, weights } => {
                let a = *exponent;
                if a <= 2.0 {
                    // extreme points sit on the axes
                    1.0 / weights.iter().cloned().fold(f64::INFINITY, f64::min)
                } else {
                    let t = 2.0 * a / (2.0 - a);
                    let s: f64 = weights.iter().map(|w| w.powf(t)).sum();
                    s.powf((a - 2.0) / (2.0 * a))
                }
            }
        }
    }

    fn validate(&self, dim: usize) -> Result<()> {
        if let Norm::WeightedLp { exponent, weights } = self {
            if !(*exponent >= 1.0) || !exponent.is_finite() {
                return Err(Error::InvalidSpec(format!(
                    "norm exponent {exponent} must be >= 1"
                )));
            }
            if weights.len() != dim {
                return Err(Error::DimMismatch(weights.len(), dim));
            }
            if weights.iter().any(|w| !(*w > 0.0) || !w.is_finite()) {
                return Err(Error::InvalidSpec("norm weights must be positive".into()));
            }
        }
        Ok(())
    }
}

/// Cost kinds; see the module docs.
#[derive(Debug, Clone)]
pub enum CostKind {
    Power { p: f64, coeff: f64, norm: Norm },
    Radial { v: YoungExpr, source: String },
    BlackBox { table: GridField, convex: bool },
}

/// A convex cost `L` with `L(0) = 0`, `L > 0` off the origin.
#[derive(Debug, Clone)]
pub struct CostSpec {
    kind: CostKind,
    dim: usize,
    profile: Arc<OnceLock<YoungProfile>>,
}

impl CostSpec {
    pub fn power(p: f64, dim: usize) -> Result<Self> {
        Self::power_with(p, 1.0, Norm::Euclidean, dim)
    }

    pub fn power_with(p: f64, coeff: f64, norm: Norm, dim: usize) -> Result<Self> {
        if !(p >= 1.0) || !p.is_finite() {
            return Err(Error::InvalidSpec(format!("power exponent {p} must be >= 1")));
        }
        if !(coeff > 0.0) || !coeff.is_finite() {
            return Err(Error::InvalidSpec(format!("coefficient {coeff} must be positive")));
        }
        norm.validate(dim)?;
        let spec = Self {
            kind: CostKind::Power { p, coeff, norm },
            dim,
            profile: Arc::new(OnceLock::new()),
        };
        spec.validate_invariants()?;
        Ok(spec)
    }

    pub fn radial(expr: &str, dim: usize) -> Result<Self> {
        let v = parse_young(expr)?;
        let spec = Self {
            kind: CostKind::Radial {
                v,
                source: expr.to_string(),
            },
            dim,
            profile: Arc::new(OnceLock::new()),
        };
        spec.validate_invariants()?;
        Ok(spec)
    }

    pub fn black_box(table: GridField, convex: bool) -> Result<Self> {
        let dim = table.geometry().dim();
        let spec = Self {
            kind: CostKind::BlackBox { table, convex },
            dim,
            profile: Arc::new(OnceLock::new()),
        };
        spec.validate_invariants()?;
        Ok(spec)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn kind(&self) -> &CostKind {
        &self.kind
    }

    /// Whether `L(x)/|x| -> infinity`; governs finiteness of `L*`.
    pub fn superlinear(&self) -> bool {
        match &self.kind {
            CostKind::Power { p, .. } => *p > 1.0,
            CostKind::Radial { v, .. } => v.exponent_range().1 > 1.0,
            // growth beyond the table is unknown; treat the sampled range as
            // authoritative and let conjugate evaluation police its domain
            CostKind::BlackBox { .. } => true,
        }
    }

    /// Evaluate `L(x)`. Exact for `Power`/`Radial`, multilinear interpolation
    /// for `BlackBox` (which errors outside its table).
    pub fn eval(&self, x: &[f64]) -> Result<f64> {
        if x.len() != self.dim {
            return Err(Error::DimMismatch(x.len(), self.dim));
        }
        match &self.kind {
            CostKind::Power { p, coeff, norm } => Ok(coeff * norm.eval(x).powf(*p)),
            CostKind::Radial { v, .. } => {
                let r = x.iter().map(|v| v * v).sum::<f64>().sqrt();
                Ok(v.eval(r))
            }
            CostKind::BlackBox { table, .. } => table.interpolate(x),
        }
    }

    /// `R_L(r) = sup { |x| : L(x) <= r }`, the search-window radius.
    pub fn radius(&self, r: f64) -> Result<f64> {
        if r < 0.0 {
            return Err(Error::PreconditionViolation("radius argument must be >= 0".into()));
        }
        if r == 0.0 {
            return Ok(0.0);
        }
        match &self.kind {
            CostKind::Power { p, coeff, norm } => {
                Ok((r / coeff).powf(1.0 / p) * norm.unit_ball_euclidean_radius())
            }
            CostKind::Radial { v, .. } => {
                // V^{-1}(r) by bisection on the increasing V
                let mut hi = 1.0;
                while v.eval(hi) < r {
                    hi *= 2.0;
                    if hi > 1e300 {
                        return Err(Error::Unbounded);
                    }
                }
                if v.eval(hi / 2.0) >= r {
                    // bracket down as well
                    let mut lo = hi / 2.0;
                    while lo > 1e-300 && v.eval(lo) > r {
                        lo /= 2.0;
                    }
                    return Ok(bisect_root(|s| v.eval(s) - r, lo, hi, 1e-13, 0.0, 200));
                }
                Ok(bisect_root(|s| v.eval(s) - r, hi / 2.0, hi, 1e-13, 0.0, 200))
            }
            CostKind::BlackBox { table, .. } => {
                let g = table.geometry();
                let mut best = 0.0f64;
                let mut best_idx = None;
                let mut p = vec![0.0; g.dim()];
                for idx in 0..g.len() {
                    if table.values()[idx] <= r {
                        g.point_into(idx, &mut p);
                        let nrm = p.iter().map(|v| v * v).sum::<f64>().sqrt();
                        if g.is_boundary(idx) {
                            return Err(Error::Unbounded);
                        }
                        if nrm > best {
                            best = nrm;
                            best_idx = Some(idx);
                        }
                    }
                }
                let Some(idx) = best_idx else { return Ok(0.0) };
                // one bisection refinement along the achieving ray
                g.point_into(idx, &mut p);
                let dir: Vec<f64> = p.iter().map(|v| v / best).collect();
                let cell = g.axes.iter().map(|a| a.h).fold(0.0f64, f64::max)
                    * (g.dim() as f64).sqrt();
                let eval_ray = |t: f64| -> f64 {
                    let q: Vec<f64> = dir.iter().map(|d| d * t).collect();
                    table.interpolate(&q).unwrap_or(f64::INFINITY)
                };
                let hi = best + cell;
                if eval_ray(hi) <= r {
                    return Ok(hi.min(best + cell));
                }
                Ok(bisect_root(|t| eval_ray(t) - r, best, hi, 1e-12, 0.0, 120))
            }
        }
    }

    /// Δ₂ diagnostic: sampled supremum of the directional-derivative ratio
    /// `L'(x; x) / L(x)`, which must not exceed `Φ'(1+)`.
    pub fn delta2_diagnostic(&self) -> Result<Delta2Report> {
        let p_plus = self.young_profile()?.p_plus;
        let dirs = sample_directions(self.dim);
        let radii: Vec<f64> = match &self.kind {
            CostKind::BlackBox { table, .. } => {
                let g = table.geometry();
                let rmax = g
                    .axes
                    .iter()
                    .map(|a| {
                        let (lo, hi) = a.span();
                        lo.abs().min(hi.abs())
                    })
                    .fold(f64::INFINITY, f64::min)
                    * 0.9;
                (0..40).map(|k| rmax * 10f64.powf(-3.0 * (1.0 - k as f64 / 39.0))).collect()
            }
            _ => (0..81).map(|k| 10f64.powf(-4.0 + 8.0 * k as f64 / 80.0)).collect(),
        };
        let eps = 1e-6;
        let mut sup = f64::NEG_INFINITY;
        let mut at = vec![0.0; self.dim];
        for dir in &dirs {
            for &r in &radii {
                let x: Vec<f64> = dir.iter().map(|d| d * r).collect();
                let xe: Vec<f64> = x.iter().map(|v| v * (1.0 + eps)).collect();
                let (lx, lxe) = match (self.eval(&x), self.eval(&xe)) {
                    (Ok(a), Ok(b)) => (a, b),
                    _ => continue,
                };
                if !(lx > 0.0) {
                    continue;
                }
                let ratio = (lxe - lx) / (eps * lx);
                if ratio > sup {
                    sup = ratio;
                    at.copy_from_slice(&x);
                }
            }
        }
        Ok(Delta2Report {
            sup_ratio: sup,
            p_plus,
            passes: sup <= p_plus * (1.0 + 1e-3),
            at,
        })
    }

    /// The associated Young profile (Φ, Ψ, p±, γ, the theorem constants),
    /// built once and cached.
    pub fn young_profile(&self) -> Result<&YoungProfile> {
        if let Some(p) = self.profile.get() {
            return Ok(p);
        }
        let built = YoungProfile::build(self)?;
        Ok(self.profile.get_or_init(|| built))
    }

    /// `Φ_L(r) = sup_x L(rx)/L(x)` by the per-kind strategy (exact power,
    /// ray scan for the others).
    pub fn young_phi(&self, r: f64) -> Result<f64> {
        young::young_phi(self, r)
    }

    /// `Ψ_L(r) = 1/Φ_L(1/r)`, with `Ψ(0) = 0`.
    pub fn young_psi(&self, r: f64) -> Result<f64> {
        if r == 0.0 {
            return Ok(0.0);
        }
        Ok(1.0 / self.young_phi(1.0 / r)?)
    }

    /// Legendre transform `L*`.
    pub fn legendre(&self) -> Result<ConjugateSpec> {
        ConjugateSpec::of(self)
    }

    /// Sampled-invariant validation run at construction.
    fn validate_invariants(&self) -> Result<()> {
        let mut rng = ChaCha8Rng::seed_from_u64(0x5eed);
        let probes = self.sample_points(&mut rng, 160);
        // L(0) = 0
        let zero = vec![0.0; self.dim];
        let l0 = self.eval(&zero)?;
        if l0.abs() > 1e-9 {
            return Err(Error::InvalidSpec(format!("L(0) = {l0}, expected 0")));
        }
        for x in &probes {
            let lx = self.eval(x)?;
            if !lx.is_finite() || lx <= 0.0 {
                return Err(Error::InvalidSpec(format!(
                    "L must be positive and finite off the origin, got {lx} at {x:?}"
                )));
            }
        }
        // sampled convexity
        for pair in probes.chunks(2) {
            if pair.len() < 2 {
                break;
            }
            let (x, y) = (&pair[0], &pair[1]);
            let (lx, ly) = (self.eval(x)?, self.eval(y)?);
            for &t in &[0.25, 0.5, 0.75] {
                let m: Vec<f64> = x
                    .iter()
                    .zip(y)
                    .map(|(a, b)| t * a + (1.0 - t) * b)
                    .collect();
                let lm = self.eval(&m)?;
                let bound = t * lx + (1.0 - t) * ly + 1e-9 * (1.0 + lx.abs() + ly.abs());
                if lm > bound {
                    return Err(Error::InvalidSpec(format!(
                        "convexity violated at t={t}: L(mid)={lm} > {bound}"
                    )));
                }
            }
        }
        // L(r x)/r non-decreasing along sampled rays
        for dir in sample_directions(self.dim) {
            let mut prev = 0.0f64;
            for k in 1..=12 {
                let r = self.ray_scale() * k as f64 / 12.0;
                let x: Vec<f64> = dir.iter().map(|d| d * r).collect();
                let Ok(lx) = self.eval(&x) else { continue };
                let ratio = lx / r;
                if ratio + 1e-9 * (1.0 + ratio.abs()) < prev {
                    return Err(Error::InvalidSpec(
                        "L(rx)/r must be non-decreasing along rays".into(),
                    ));
                }
                prev = prev.max(ratio);
            }
        }
        Ok(())
    }

    fn ray_scale(&self) -> f64 {
        match &self.kind {
            CostKind::BlackBox { table, .. } => {
                table
                    .geometry()
                    .axes
                    .iter()
                    .map(|a| {
                        let (lo, hi) = a.span();
                        lo.abs().min(hi.abs())
                    })
                    .fold(f64::INFINITY, f64::min)
                    * 0.9
            }
            _ => 8.0,
        }
    }

    fn sample_points(&self, rng: &mut ChaCha8Rng, count: usize) -> Vec<Vec<f64>> {
        let scale = self.ray_scale();
        (0..count)
            .map(|_| {
                (0..self.dim)
                    .map(|_| rng.gen_range(-scale..scale))
                    .collect()
            })
            .collect()
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(&CostSpecRepr::from(self)).expect("cost spec serializes")
    }

    pub fn from_json(src: &str) -> Result<Self> {
        let repr: CostSpecRepr = serde_json::from_str(src)?;
        repr.build()
    }
}

/// Outcome of the Δ₂ diagnostic; failure is reported, not raised.
#[derive(Debug, Clone, Serialize)]
pub struct Delta2Report {
    pub sup_ratio: f64,
    pub p_plus: f64,
    pub passes: bool,
    pub at: Vec<f64>,
}

pub(crate) fn sample_directions(dim: usize) -> Vec<Vec<f64>> {
    match dim {
        1 => vec![vec![1.0], vec![-1.0]],
        _ => (0..16)
            .map(|k| {
                let a = std::f64::consts::TAU * k as f64 / 16.0;
                vec![a.cos(), a.sin()]
            })
            .collect(),
    }
}

#[derive(Serialize, Deserialize)]
struct CostSpecRepr {
    kind: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    p: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    coeff: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    norm: Option<NormRepr>,
    #[serde(rename = "V", skip_serializing_if = "Option::is_none")]
    v: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    table: Option<TableRepr>,
    #[serde(skip_serializing_if = "Option::is_none")]
    convex: Option<bool>,
    dim: usize,
}

#[derive(Serialize, Deserialize)]
#[serde(untagged)]
enum NormRepr {
    Name(String),
    Weighted { exponent: f64, weights: Vec<f64> },
}

#[derive(Serialize, Deserialize)]
struct TableRepr {
    axes: Vec<crate::grid::Axis>,
    values: Vec<f64>,
}

impl CostSpecRepr {
    fn build(self) -> Result<CostSpec> {
        match self.kind.as_str() {
            "power" => {
                let p = self
                    .p
                    .ok_or_else(|| Error::InvalidSpec("power kind needs field p".into()))?;
                let norm = match self.norm {
                    None => Norm::Euclidean,
                    Some(NormRepr::Name(s)) if s == "euclidean" => Norm::Euclidean,
                    Some(NormRepr::Name(s)) => {
                        return Err(Error::InvalidSpec(format!("unknown norm {s:?}")))
                    }
                    Some(NormRepr::Weighted { exponent, weights }) => {
                        Norm::WeightedLp { exponent, weights }
                    }
                };
                CostSpec::power_with(p, self.coeff.unwrap_or(1.0), norm, self.dim)
            }
            "radial" => CostSpec::radial(
                &self
                    .v
                    .ok_or_else(|| Error::InvalidSpec("radial kind needs field V".into()))?,
                self.dim,
            ),
            "blackbox" => {
                let t = self
                    .table
                    .ok_or_else(|| Error::InvalidSpec("blackbox kind needs field table".into()))?;
                let geom = crate::grid::GridGeometry::new(t.axes)?;
                CostSpec::black_box(GridField::new(geom, t.values)?, self.convex.unwrap_or(true))
            }
            other => Err(Error::InvalidSpec(format!("unknown cost kind {other:?}"))),
        }
    }
}

impl From<&CostSpec> for CostSpecRepr {
    fn from(spec: &CostSpec) -> Self {
        let mut repr = CostSpecRepr {
            kind: String::new(),
            p: None,
            coeff: None,
            norm: None,
            v: None,
            table: None,
            convex: None,
            dim: spec.dim,
        };
        match &spec.kind {
            CostKind::Power { p, coeff, norm } => {
                repr.kind = "power".into();
                repr.p = Some(*p);
                if *coeff != 1.0 {
                    repr.coeff = Some(*coeff);
                }
                repr.norm = Some(match norm {
                    Norm::Euclidean => NormRepr::Name("euclidean".into()),
                    Norm::WeightedLp { exponent, weights } => NormRepr::Weighted {
                        exponent: *exponent,
                        weights: weights.clone(),
                    },
                });
            }
            CostKind::Radial { source, .. } => {
                repr.kind = "radial".into();
                repr.v = Some(source.clone());
            }
            CostKind::BlackBox { table, convex } => {
                repr.kind = "blackbox".into();
                repr.table = Some(TableRepr {
                    axes: table.geometry().axes.clone(),
                    values: table.values().to_vec(),
                });
                repr.convex = Some(*convex);
            }
        }
        repr
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::GridGeometry;

    #[test]
    fn power_eval_square() {
        let l = CostSpec::power(2.0, 1).unwrap();
        assert_eq!(l.eval(&[3.0]).unwrap(), 9.0);
        assert_eq!(l.eval(&[0.0]).unwrap(), 0.0);
    }

    #[test]
    fn radial_eval_quartic() {
        let l = CostSpec::radial("s^2 + s^4", 2).unwrap();
        // |x| = 1
        let v = l.eval(&[1.0, 0.0]).unwrap();
        assert!((v - 2.0).abs() < 1e-12);
        assert_eq!(l.eval(&[0.0, 0.0]).unwrap(), 0.0);
    }

    #[test]
    fn radius_of_power_and_radial() {
        let l = CostSpec::power(2.0, 1).unwrap();
        assert!((l.radius(4.0).unwrap() - 2.0).abs() < 1e-12);
        assert_eq!(l.radius(0.0).unwrap(), 0.0);
        let v = CostSpec::radial("s^2 + s^4", 1).unwrap();
        assert!((v.radius(2.0).unwrap() - 1.0).abs() < 1e-10);
    }

    #[test]
    fn radius_weighted_norm_matches_bruteforce() {
        for &(a, w0, w1) in &[(1.0, 1.0, 2.0), (1.5, 0.7, 1.3), (2.0, 0.5, 2.0), (4.0, 1.0, 1.0), (3.0, 0.8, 1.7)] {
            let norm = Norm::WeightedLp {
                exponent: a,
                weights: vec![w0, w1],
            };
            // brute force max |x|_2 over the unit sphere of the norm
            let mut best = 0.0f64;
            for k in 0..20000 {
                let ang = std::f64::consts::TAU * k as f64 / 20000.0;
                let dir = [ang.cos(), ang.sin()];
                let nd = norm.eval(&dir);
                best = best.max(1.0 / nd);
            }
            let got = norm.unit_ball_euclidean_radius();
            assert!(
                (got - best).abs() < 1e-6 * (1.0 + best),
                "a={a} w=({w0},{w1}): got {got}, brute {best}"
            );
        }
    }

    #[test]
    fn delta2_ratio_of_power_is_p() {
        for &p in &[1.5, 2.0, 3.0] {
            let l = CostSpec::power(p, 1).unwrap();
            let d = l.delta2_diagnostic().unwrap();
            assert!(d.passes, "p={p}");
            assert!((d.sup_ratio - p).abs() < 1e-4, "p={p}: {}", d.sup_ratio);
        }
    }

    #[test]
    fn delta2_ratio_of_quartic_radial_tends_to_four() {
        let l = CostSpec::radial("s^2 + s^4", 1).unwrap();
        let d = l.delta2_diagnostic().unwrap();
        assert!(d.passes);
        assert!((d.sup_ratio - 4.0).abs() < 1e-3, "{}", d.sup_ratio);
        // the reported supremum never exceeds Φ'(1+)
        assert!(d.sup_ratio <= d.p_plus * (1.0 + 1e-3));
    }

    #[test]
    fn blackbox_interpolates_and_guards_domain() {
        let g = GridGeometry::line_span(-2.0, 2.0, 401).unwrap();
        let table = GridField::from_fn(g, |x| x[0] * x[0]).unwrap();
        let l = CostSpec::black_box(table, true).unwrap();
        assert!((l.eval(&[1.0]).unwrap() - 1.0).abs() < 1e-9);
        assert!(matches!(l.eval(&[3.0]), Err(Error::OutOfDomain { .. })));
        // sublevel radius within the table
        assert!((l.radius(1.0).unwrap() - 1.0).abs() < 2e-2);
        assert!(matches!(l.radius(100.0), Err(Error::Unbounded)));
    }

    #[test]
    fn construction_rejects_bad_specs() {
        assert!(CostSpec::power(0.5, 1).is_err());
        assert!(CostSpec::radial("s^0.3", 1).is_err());
        // non-convex table
        let g = GridGeometry::line_span(-1.0, 1.0, 41).unwrap();
        let t = GridField::from_fn(g, |x| x[0].abs().sqrt()).unwrap();
        assert!(CostSpec::black_box(t, false).is_err());
    }

    #[test]
    fn json_round_trip() {
        let l = CostSpec::from_json(r#"{"kind":"power","p":2,"norm":"euclidean","dim":1}"#).unwrap();
        assert_eq!(l.eval(&[3.0]).unwrap(), 9.0);
        let r = CostSpec::from_json(r#"{"kind":"radial","V":"s^2+s^4","dim":2}"#).unwrap();
        let back = CostSpec::from_json(&r.to_json()).unwrap();
        assert_eq!(back.eval(&[1.0, 0.0]).unwrap(), r.eval(&[1.0, 0.0]).unwrap());
    }
}
