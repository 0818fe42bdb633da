//! Finitely supported probability measures and vector samples aligned with
//! their support.
//!
//! Interchange format: `{"dim": n, "points": [[...], ...], "weights": [...]}`.

use crate::error::{Error, Result};
use crate::grid::GridGeometry;
use serde::{Deserialize, Serialize};

pub const MASS_TOL: f64 = 1e-12;

/// A finitely supported probability measure: distinct support points and
/// positive weights summing to 1 (within 1e-12).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "MeasureRepr", into = "MeasureRepr")]
pub struct DiscreteMeasure {
    dim: usize,
    points: Vec<Vec<f64>>,
    weights: Vec<f64>,
}

#[derive(Serialize, Deserialize, Clone)]
struct MeasureRepr {
    dim: usize,
    points: Vec<Vec<f64>>,
    weights: Vec<f64>,
}

impl TryFrom<MeasureRepr> for DiscreteMeasure {
    type Error = Error;
    fn try_from(r: MeasureRepr) -> Result<Self> {
        DiscreteMeasure::new_with_dim(r.dim, r.points, r.weights)
    }
}

impl From<DiscreteMeasure> for MeasureRepr {
    fn from(m: DiscreteMeasure) -> Self {
        MeasureRepr {
            dim: m.dim,
            points: m.points,
            weights: m.weights,
        }
    }
}

impl DiscreteMeasure {
    pub fn new(points: Vec<Vec<f64>>, weights: Vec<f64>) -> Result<Self> {
        let dim = points.first().map(|p| p.len()).ok_or_else(|| {
            Error::InvalidMeasure("a measure needs at least one support point".into())
        })?;
        Self::new_with_dim(dim, points, weights)
    }

    fn new_with_dim(dim: usize, points: Vec<Vec<f64>>, weights: Vec<f64>) -> Result<Self> {
        if points.len() != weights.len() {
            return Err(Error::LengthMismatch(points.len(), weights.len()));
        }
        if points.is_empty() {
            return Err(Error::InvalidMeasure("empty support".into()));
        }
        for p in &points {
            if p.len() != dim {
                return Err(Error::DimMismatch(p.len(), dim));
            }
            if p.iter().any(|v| !v.is_finite()) {
                return Err(Error::InvalidMeasure("support points must be finite".into()));
            }
        }
        if weights.iter().any(|w| !(*w > 0.0) || !w.is_finite()) {
            return Err(Error::InvalidMeasure("weights must be strictly positive".into()));
        }
        let total: f64 = weights.iter().sum();
        if (total - 1.0).abs() > MASS_TOL {
            return Err(Error::InvalidMeasure(format!(
                "weights sum to {total}, expected 1 within {MASS_TOL:e}"
            )));
        }
        // pairwise distinct support
        let mut sorted: Vec<usize> = (0..points.len()).collect();
        sorted.sort_by(|&a, &b| {
            points[a]
                .partial_cmp(&points[b])
                .unwrap_or(std::cmp::Ordering::Equal)
        });
        for w in sorted.windows(2) {
            if points[w[0]] == points[w[1]] {
                return Err(Error::InvalidMeasure(format!(
                    "duplicate support point {:?}",
                    points[w[0]]
                )));
            }
        }
        Ok(Self {
            dim,
            points,
            weights,
        })
    }

    pub fn dirac(point: Vec<f64>) -> Result<Self> {
        Self::new(vec![point], vec![1.0])
    }

    /// Normalizes raw nonnegative masses (dropping zero-mass points is the
    /// caller's business; zeros here are an error).
    pub fn normalized(points: Vec<Vec<f64>>, raw: Vec<f64>) -> Result<Self> {
        let total: f64 = raw.iter().sum();
        if !(total > 0.0) {
            return Err(Error::InvalidMeasure("total mass must be positive".into()));
        }
        Self::new(points, raw.into_iter().map(|w| w / total).collect())
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn points(&self) -> &[Vec<f64>] {
        &self.points
    }

    pub fn point(&self, i: usize) -> &[f64] {
        &self.points[i]
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    /// Measure supported on every node of a grid, with the given weights.
    pub fn on_grid(grid: &GridGeometry, weights: Vec<f64>) -> Result<Self> {
        if weights.len() != grid.len() {
            return Err(Error::LengthMismatch(weights.len(), grid.len()));
        }
        let points = (0..grid.len()).map(|i| grid.point(i)).collect();
        Self::new(points, weights)
    }

    /// Node weights of a grid-supported measure; errors if any support point
    /// misses the grid. Nodes not in the support get weight 0.
    pub fn grid_weights(&self, grid: &GridGeometry) -> Result<Vec<f64>> {
        let mut w = vec![0.0; grid.len()];
        for (p, &wi) in self.points.iter().zip(&self.weights) {
            let idx = grid.node_at(p, 1e-9).ok_or_else(|| {
                Error::PreconditionViolation(format!("support point {p:?} is not a grid node"))
            })?;
            w[idx] += wi;
        }
        Ok(w)
    }

    /// The measure of `X - Y` for independent `X ~ self`, `Y ~ other`
    /// (support `{x_i - y_j}`, weights `w_i v_j`; exact duplicates merged).
    /// This orientation matches the convolution bounds, whose right-hand
    /// sides integrate `u(x - y)`.
    pub fn convolve_minus(&self, other: &DiscreteMeasure) -> Result<Self> {
        if self.dim != other.dim {
            return Err(Error::DimMismatch(self.dim, other.dim));
        }
        let mut entries: Vec<(Vec<f64>, f64)> = Vec::with_capacity(self.len() * other.len());
        for (x, &wx) in self.points.iter().zip(&self.weights) {
            for (y, &wy) in other.points.iter().zip(&other.weights) {
                let p: Vec<f64> = x.iter().zip(y).map(|(a, b)| a - b).collect();
                entries.push((p, wx * wy));
            }
        }
        entries.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap_or(std::cmp::Ordering::Equal));
        let mut points = Vec::new();
        let mut weights: Vec<f64> = Vec::new();
        for (p, w) in entries {
            if points.last() == Some(&p) {
                *weights.last_mut().unwrap() += w;
            } else {
                points.push(p);
                weights.push(w);
            }
        }
        let total: f64 = weights.iter().sum();
        for w in &mut weights {
            *w /= total;
        }
        Self::new(points, weights)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("measure serializes")
    }

    pub fn from_json(src: &str) -> Result<Self> {
        Ok(serde_json::from_str(src)?)
    }
}

/// Values of a vector-valued function sampled on a measure's support.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VectorSample {
    pub values: Vec<Vec<f64>>,
}

impl VectorSample {
    pub fn new(values: Vec<Vec<f64>>) -> Result<Self> {
        for v in &values {
            if v.iter().any(|x| !x.is_finite()) {
                return Err(Error::InvalidMeasure("sample values must be finite".into()));
            }
        }
        Ok(Self { values })
    }

    pub fn scalar(values: Vec<f64>) -> Self {
        Self {
            values: values.into_iter().map(|v| vec![v]).collect(),
        }
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn check_aligned(&self, m: &DiscreteMeasure) -> Result<()> {
        if self.values.len() != m.len() {
            return Err(Error::LengthMismatch(self.values.len(), m.len()));
        }
        for v in &self.values {
            if v.len() != m.dim() {
                return Err(Error::DimMismatch(v.len(), m.dim()));
            }
        }
        Ok(())
    }

    pub fn scale(&self, a: f64) -> Self {
        Self {
            values: self
                .values
                .iter()
                .map(|v| v.iter().map(|x| a * x).collect())
                .collect(),
        }
    }
}
