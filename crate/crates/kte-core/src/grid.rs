//! Uniform axis-aligned grids in dimension 1 or 2, with scalar and vector
//! fields sampled on their nodes.
//!
//! Interchange format for scalar fields is CSV: a header row holding the axis
//! parameters `axis0_origin,axis0_h,axis0_n[,axis1_origin,axis1_h,axis1_n]`,
//! followed by the values in row-major order (last axis fastest).

use crate::error::{Error, Result};
use serde::{Deserialize, Serialize};
use std::io::{BufRead, Write};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Axis {
    pub origin: f64,
    pub h: f64,
    pub n: usize,
}

impl Axis {
    pub fn span(&self) -> (f64, f64) {
        (self.origin, self.origin + self.h * (self.n - 1) as f64)
    }
}

/// Geometry of a uniform grid: one axis per spatial dimension.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GridGeometry {
    pub axes: Vec<Axis>,
}

impl GridGeometry {
    pub fn new(axes: Vec<Axis>) -> Result<Self> {
        if axes.is_empty() || axes.len() > 2 {
            return Err(Error::InvalidGrid(format!(
                "dimension {} not supported (must be 1 or 2)",
                axes.len()
            )));
        }
        for a in &axes {
            if !(a.h > 0.0) || !a.h.is_finite() {
                return Err(Error::InvalidGrid(format!("spacing {} must be positive", a.h)));
            }
            if a.n < 2 {
                return Err(Error::InvalidGrid("each axis needs at least 2 nodes".into()));
            }
        }
        Ok(Self { axes })
    }

    pub fn line(origin: f64, h: f64, n: usize) -> Result<Self> {
        Self::new(vec![Axis { origin, h, n }])
    }

    /// 1D grid with `n` nodes spanning `[lo, hi]` inclusive.
    pub fn line_span(lo: f64, hi: f64, n: usize) -> Result<Self> {
        Self::line(lo, (hi - lo) / (n - 1) as f64, n)
    }

    pub fn square_span(lo: f64, hi: f64, n: usize) -> Result<Self> {
        let h = (hi - lo) / (n - 1) as f64;
        Self::new(vec![Axis { origin: lo, h, n }, Axis { origin: lo, h, n }])
    }

    pub fn dim(&self) -> usize {
        self.axes.len()
    }

    pub fn len(&self) -> usize {
        self.axes.iter().map(|a| a.n).product()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn min_h(&self) -> f64 {
        self.axes.iter().map(|a| a.h).fold(f64::INFINITY, f64::min)
    }

    /// Multi-index of a linear node index (row-major, last axis fastest).
    pub fn multi_index(&self, idx: usize) -> [usize; 2] {
        match self.dim() {
            1 => [idx, 0],
            _ => {
                let n1 = self.axes[1].n;
                [idx / n1, idx % n1]
            }
        }
    }

    pub fn linear_index(&self, mi: [usize; 2]) -> usize {
        match self.dim() {
            1 => mi[0],
            _ => mi[0] * self.axes[1].n + mi[1],
        }
    }

    /// Coordinates of node `idx`, written into `out[..dim]`.
    pub fn point_into(&self, idx: usize, out: &mut [f64]) {
        let mi = self.multi_index(idx);
        for (d, a) in self.axes.iter().enumerate() {
            out[d] = a.origin + a.h * mi[d] as f64;
        }
    }

    pub fn point(&self, idx: usize) -> Vec<f64> {
        let mut p = vec![0.0; self.dim()];
        self.point_into(idx, &mut p);
        p
    }

    pub fn is_boundary(&self, idx: usize) -> bool {
        let mi = self.multi_index(idx);
        self.axes
            .iter()
            .enumerate()
            .any(|(d, a)| mi[d] == 0 || mi[d] == a.n - 1)
    }

    /// Linear index of the node nearest to `x`, if `x` lies on the grid
    /// (within `tol` in units of the spacing); used to pin measures to nodes.
    pub fn node_at(&self, x: &[f64], tol: f64) -> Option<usize> {
        if x.len() != self.dim() {
            return None;
        }
        let mut mi = [0usize; 2];
        for (d, a) in self.axes.iter().enumerate() {
            let t = (x[d] - a.origin) / a.h;
            let k = t.round();
            if (t - k).abs() > tol || k < 0.0 || k as usize >= a.n {
                return None;
            }
            mi[d] = k as usize;
        }
        Some(self.linear_index(mi))
    }
}

/// Scalar field sampled on a uniform grid.
///
/// The bounds `sup |f|`, `inf f` and the Lipschitz estimate
/// (max adjacent difference over spacing) are computed at construction.
#[derive(Debug, Clone, PartialEq)]
pub struct GridField {
    geom: GridGeometry,
    values: Vec<f64>,
    max_abs: f64,
    min_value: f64,
    lip: f64,
}

impl GridField {
    pub fn new(geom: GridGeometry, values: Vec<f64>) -> Result<Self> {
        if values.len() != geom.len() {
            return Err(Error::LengthMismatch(values.len(), geom.len()));
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidGrid("field values must be finite".into()));
        }
        let max_abs = values.iter().fold(0.0f64, |m, v| m.max(v.abs()));
        let min_value = values.iter().fold(f64::INFINITY, |m, &v| m.min(v));
        let lip = lip_estimate(&geom, &values);
        Ok(Self {
            geom,
            values,
            max_abs,
            min_value,
            lip,
        })
    }

    pub fn from_fn(geom: GridGeometry, f: impl Fn(&[f64]) -> f64) -> Result<Self> {
        let mut buf = vec![0.0; geom.dim()];
        let values = (0..geom.len())
            .map(|i| {
                geom.point_into(i, &mut buf);
                f(&buf)
            })
            .collect();
        Self::new(geom, values)
    }

    pub fn geometry(&self) -> &GridGeometry {
        &self.geom
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    /// `M = sup |f|`
    pub fn max_abs(&self) -> f64 {
        self.max_abs
    }

    pub fn min_value(&self) -> f64 {
        self.min_value
    }

    /// Max adjacent difference divided by the spacing.
    pub fn lip_estimate(&self) -> f64 {
        self.lip
    }

    /// Multilinear interpolation. `x` must lie inside the grid box.
    pub fn interpolate(&self, x: &[f64]) -> Result<f64> {
        let g = &self.geom;
        if x.len() != g.dim() {
            return Err(Error::DimMismatch(x.len(), g.dim()));
        }
        let mut base = [0usize; 2];
        let mut frac = [0.0f64; 2];
        for (d, a) in g.axes.iter().enumerate() {
            let t = (x[d] - a.origin) / a.h;
            let slack = 1e-9;
            if t < -slack || t > (a.n - 1) as f64 + slack {
                let (lo, hi) = a.span();
                return Err(Error::OutOfDomain {
                    reached: x[d],
                    covered: lo.abs().max(hi.abs()),
                });
            }
            let t = t.clamp(0.0, (a.n - 1) as f64);
            let k = (t.floor() as usize).min(a.n - 2);
            base[d] = k;
            frac[d] = t - k as f64;
        }
        match g.dim() {
            1 => {
                let k = base[0];
                Ok(self.values[k] * (1.0 - frac[0]) + self.values[k + 1] * frac[0])
            }
            _ => {
                let v = |i, j| self.values[g.linear_index([i, j])];
                let (fx, fy) = (frac[0], frac[1]);
                let (i, j) = (base[0], base[1]);
                Ok(v(i, j) * (1.0 - fx) * (1.0 - fy)
                    + v(i + 1, j) * fx * (1.0 - fy)
                    + v(i, j + 1) * (1.0 - fx) * fy
                    + v(i + 1, j + 1) * fx * fy)
            }
        }
    }

    /// Central-difference gradient, one-sided at the boundary.
    pub fn gradient(&self) -> GridVectorField {
        let g = &self.geom;
        let dim = g.dim();
        let mut out = vec![0.0; g.len() * dim];
        for idx in 0..g.len() {
            let mi = g.multi_index(idx);
            for (d, a) in g.axes.iter().enumerate() {
                let k = mi[d];
                let up = |mi: [usize; 2], v: usize| {
                    let mut m = mi;
                    m[d] = v;
                    g.linear_index(m)
                };
                let der = if k == 0 {
                    (self.values[up(mi, 1)] - self.values[idx]) / a.h
                } else if k == a.n - 1 {
                    (self.values[idx] - self.values[up(mi, k - 1)]) / a.h
                } else {
                    (self.values[up(mi, k + 1)] - self.values[up(mi, k - 1)]) / (2.0 * a.h)
                };
                out[idx * dim + d] = der;
            }
        }
        GridVectorField {
            geom: g.clone(),
            dim,
            values: out,
        }
    }

    /// Adjoint of [`GridField::gradient`] viewed as a linear map on node
    /// values: given per-node covectors `c`, returns `Gᵀc`.
    pub fn gradient_adjoint(geom: &GridGeometry, c: &GridVectorField) -> Vec<f64> {
        let dim = geom.dim();
        let mut out = vec![0.0; geom.len()];
        for idx in 0..geom.len() {
            let mi = geom.multi_index(idx);
            for (d, a) in geom.axes.iter().enumerate() {
                let k = mi[d];
                let w = c.values[idx * dim + d];
                let up = |v: usize| {
                    let mut m = mi;
                    m[d] = v;
                    geom.linear_index(m)
                };
                if k == 0 {
                    out[up(1)] += w / a.h;
                    out[idx] -= w / a.h;
                } else if k == a.n - 1 {
                    out[idx] += w / a.h;
                    out[up(k - 1)] -= w / a.h;
                } else {
                    out[up(k + 1)] += w / (2.0 * a.h);
                    out[up(k - 1)] -= w / (2.0 * a.h);
                }
            }
        }
        out
    }

    pub fn write_csv<W: Write>(&self, mut w: W) -> Result<()> {
        let header: Vec<String> = self
            .geom
            .axes
            .iter()
            .flat_map(|a| vec![format!("{}", a.origin), format!("{}", a.h), format!("{}", a.n)])
            .collect();
        writeln!(w, "{}", header.join(","))?;
        match self.geom.dim() {
            1 => {
                for v in &self.values {
                    writeln!(w, "{v}")?;
                }
            }
            _ => {
                let n1 = self.geom.axes[1].n;
                for row in self.values.chunks(n1) {
                    let line: Vec<String> = row.iter().map(|v| format!("{v}")).collect();
                    writeln!(w, "{}", line.join(","))?;
                }
            }
        }
        Ok(())
    }

    pub fn read_csv<R: BufRead>(r: R) -> Result<Self> {
        let mut lines = r.lines();
        let header = lines
            .next()
            .ok_or_else(|| Error::InvalidGrid("empty CSV".into()))??;
        let nums: Vec<f64> = header
            .split(',')
            .map(|t| t.trim().parse::<f64>())
            .collect::<std::result::Result<_, _>>()
            .map_err(|e| Error::InvalidGrid(format!("bad CSV header: {e}")))?;
        if nums.len() != 3 && nums.len() != 6 {
            return Err(Error::InvalidGrid(format!(
                "CSV header must hold 3 or 6 axis parameters, got {}",
                nums.len()
            )));
        }
        let axes = nums
            .chunks(3)
            .map(|c| Axis {
                origin: c[0],
                h: c[1],
                n: c[2] as usize,
            })
            .collect();
        let geom = GridGeometry::new(axes)?;
        let mut values = Vec::with_capacity(geom.len());
        for line in lines {
            let line = line?;
            for tok in line.split(',') {
                let tok = tok.trim();
                if tok.is_empty() {
                    continue;
                }
                values.push(
                    tok.parse::<f64>()
                        .map_err(|e| Error::InvalidGrid(format!("bad CSV value: {e}")))?,
                );
            }
        }
        Self::new(geom, values)
    }
}

fn lip_estimate(geom: &GridGeometry, values: &[f64]) -> f64 {
    let mut lip = 0.0f64;
    for idx in 0..geom.len() {
        let mi = geom.multi_index(idx);
        for (d, a) in geom.axes.iter().enumerate() {
            if mi[d] + 1 < a.n {
                let mut m = mi;
                m[d] += 1;
                let j = geom.linear_index(m);
                lip = lip.max((values[j] - values[idx]).abs() / a.h);
            }
        }
    }
    lip
}

/// Vector field on grid nodes (`dim` components per node, node-major layout).
#[derive(Debug, Clone, PartialEq)]
pub struct GridVectorField {
    geom: GridGeometry,
    dim: usize,
    values: Vec<f64>,
}

impl GridVectorField {
    pub fn new(geom: GridGeometry, dim: usize, values: Vec<f64>) -> Result<Self> {
        if values.len() != geom.len() * dim {
            return Err(Error::LengthMismatch(values.len(), geom.len() * dim));
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidGrid("vector field values must be finite".into()));
        }
        Ok(Self { geom, dim, values })
    }

    pub fn geometry(&self) -> &GridGeometry {
        &self.geom
    }

    pub fn vec_dim(&self) -> usize {
        self.dim
    }

    pub fn at(&self, idx: usize) -> &[f64] {
        &self.values[idx * self.dim..(idx + 1) * self.dim]
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn values_mut(&mut self) -> &mut [f64] {
        &mut self.values
    }

    /// Multilinear interpolation of each component at `x`.
    pub fn interpolate(&self, x: &[f64], out: &mut [f64]) -> Result<()> {
        // component-wise reuse of the scalar rule via a temporary view
        let g = &self.geom;
        if x.len() != g.dim() {
            return Err(Error::DimMismatch(x.len(), g.dim()));
        }
        let mut base = [0usize; 2];
        let mut frac = [0.0f64; 2];
        for (d, a) in g.axes.iter().enumerate() {
            let t = (x[d] - a.origin) / a.h;
            if t < -1e-9 || t > (a.n - 1) as f64 + 1e-9 {
                let (lo, hi) = a.span();
                return Err(Error::OutOfDomain {
                    reached: x[d],
                    covered: lo.abs().max(hi.abs()),
                });
            }
            let t = t.clamp(0.0, (a.n - 1) as f64);
            let k = (t.floor() as usize).min(a.n - 2);
            base[d] = k;
            frac[d] = t - k as f64;
        }
        for c in 0..self.dim {
            let v = |mi: [usize; 2]| self.values[g.linear_index(mi) * self.dim + c];
            out[c] = match g.dim() {
                1 => {
                    v([base[0], 0]) * (1.0 - frac[0]) + v([base[0] + 1, 0]) * frac[0]
                }
                _ => {
                    let (fx, fy) = (frac[0], frac[1]);
                    let (i, j) = (base[0], base[1]);
                    v([i, j]) * (1.0 - fx) * (1.0 - fy)
                        + v([i + 1, j]) * fx * (1.0 - fy)
                        + v([i, j + 1]) * (1.0 - fx) * fy
                        + v([i + 1, j + 1]) * fx * fy
                }
            };
        }
        Ok(())
    }
}
