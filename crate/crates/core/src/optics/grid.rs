use ndarray::Array2;

use super::geometry::SetupGeometry;
use crate::error::{CpiError, Result};

/// Uniform, centred sampling axis: `ρ_i = center + (i - (n-1)/2)·step`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Axis {
    n: usize,
    center: f64,
    step: f64,
}

impl Axis {
    pub fn new(n: usize, center: f64, step: f64) -> Result<Self> {
        if n < 2 {
            return Err(CpiError::InvalidInput(format!("axis needs at least 2 samples, got {n}")));
        }
        if !(step.is_finite() && step > 0.0) || !center.is_finite() {
            return Err(CpiError::InvalidInput(format!(
                "axis needs a finite centre and positive step, got ({center}, {step})"
            )));
        }
        Ok(Self { n, center, step })
    }

    /// `n` samples spanning `[-half_width, half_width]`.
    pub fn symmetric(n: usize, half_width: f64) -> Result<Self> {
        if n < 2 {
            return Err(CpiError::InvalidInput(format!("axis needs at least 2 samples, got {n}")));
        }
        Self::new(n, 0.0, 2.0 * half_width / (n - 1) as f64)
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn center(&self) -> f64 {
        self.center
    }

    pub fn step(&self) -> f64 {
        self.step
    }

    pub fn coordinate(&self, i: usize) -> f64 {
        self.center + (i as f64 - 0.5 * (self.n - 1) as f64) * self.step
    }

    pub fn coordinates(&self) -> Vec<f64> {
        (0..self.n).map(|i| self.coordinate(i)).collect()
    }

    pub fn first(&self) -> f64 {
        self.coordinate(0)
    }

    pub fn last(&self) -> f64 {
        self.coordinate(self.n - 1)
    }

    /// Largest `|ρ|` on the axis.
    pub fn max_abs(&self) -> f64 {
        self.first().abs().max(self.last().abs())
    }

    /// Continuous sample index of `x`; integral at the nodes.
    pub fn fractional_index(&self, x: f64) -> f64 {
        (x - self.center) / self.step + 0.5 * (self.n - 1) as f64
    }

    /// Index of the node nearest to `x`, or `None` when `x` lies more than
    /// half a step beyond either end.
    pub fn nearest_index(&self, x: f64) -> Option<usize> {
        let t = self.fractional_index(x).round();
        if t >= 0.0 && t <= (self.n - 1) as f64 {
            Some(t as usize)
        } else {
            None
        }
    }

    /// Trapezoid weights over the full axis.
    pub fn trapezoid_weights(&self) -> Vec<f64> {
        let mut w = vec![self.step; self.n];
        w[0] *= 0.5;
        w[self.n - 1] *= 0.5;
        w
    }
}

/// Distances the correlation grid was acquired with.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GeometrySnapshot {
    pub z_a: f64,
    pub z_b: f64,
    pub magnification: f64,
}

impl From<&SetupGeometry> for GeometrySnapshot {
    fn from(g: &SetupGeometry) -> Self {
        Self {
            z_a: g.z_a(),
            z_b: g.z_b(),
            magnification: g.magnification(),
        }
    }
}

/// Sampled correlation `Γ(ρa, ρb)`; rows follow `axis_a`, columns `axis_b`.
///
/// `valid`, when present, marks samples that carry data. Refocusing marks
/// samples that map outside the acquired `ρa` range as invalid.
#[derive(Debug, Clone, PartialEq)]
pub struct CorrelationGrid {
    pub axis_a: Axis,
    pub axis_b: Axis,
    pub values: Array2<f64>,
    pub valid: Option<Array2<bool>>,
    pub snapshot: GeometrySnapshot,
}

impl CorrelationGrid {
    pub fn new(
        axis_a: Axis,
        axis_b: Axis,
        values: Array2<f64>,
        snapshot: GeometrySnapshot,
    ) -> Result<Self> {
        if values.dim() != (axis_a.len(), axis_b.len()) {
            return Err(CpiError::InvalidInput(format!(
                "grid values have shape {:?}, axes need ({}, {})",
                values.dim(),
                axis_a.len(),
                axis_b.len()
            )));
        }
        if let Some(v) = values.iter().find(|v| !v.is_finite() || **v < 0.0) {
            return Err(CpiError::InvalidInput(format!(
                "correlation values must be finite and non-negative, found {v}"
            )));
        }
        Ok(Self {
            axis_a,
            axis_b,
            values,
            valid: None,
            snapshot,
        })
    }

    pub fn is_valid(&self, i: usize, j: usize) -> bool {
        self.valid.as_ref().is_none_or(|m| m[[i, j]])
    }

    pub fn valid_count(&self) -> usize {
        match &self.valid {
            None => self.values.len(),
            Some(m) => m.iter().filter(|v| **v).count(),
        }
    }

    pub fn max_value(&self) -> f64 {
        self.values.iter().copied().fold(0.0, f64::max)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ImageLabel {
    Ghost,
    Refocused,
    Viewpoint,
    IntensityA,
    IntensityB,
}

impl ImageLabel {
    pub fn as_str(&self) -> &'static str {
        match self {
            ImageLabel::Ghost => "ghost",
            ImageLabel::Refocused => "refocused",
            ImageLabel::Viewpoint => "viewpoint",
            ImageLabel::IntensityA => "intensity_a",
            ImageLabel::IntensityB => "intensity_b",
        }
    }
}

/// One-dimensional non-negative image.
#[derive(Debug, Clone, PartialEq)]
pub struct SampledImage {
    pub axis: Axis,
    pub values: Vec<f64>,
    pub label: ImageLabel,
}

impl SampledImage {
    pub fn new(axis: Axis, values: Vec<f64>, label: ImageLabel) -> Result<Self> {
        if values.len() != axis.len() {
            return Err(CpiError::InvalidInput(format!(
                "image has {} values for an axis of {}",
                values.len(),
                axis.len()
            )));
        }
        if let Some(v) = values.iter().find(|v| !v.is_finite() || **v < 0.0) {
            return Err(CpiError::InvalidInput(format!(
                "image values must be finite and non-negative, found {v}"
            )));
        }
        Ok(Self {
            axis,
            values,
            label,
        })
    }

    pub fn coordinates(&self) -> Vec<f64> {
        self.axis.coordinates()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn axis_is_symmetric_and_increasing() {
        let a = Axis::new(7, 1e-3, 2e-6).unwrap();
        let c = a.coordinates();
        assert!(c.windows(2).all(|w| w[1] > w[0]));
        for i in 0..7 {
            assert!(((c[i] - 1e-3) + (c[6 - i] - 1e-3)).abs() < 1e-18);
        }
        assert_eq!(a.coordinate(3), 1e-3);
    }

    #[test]
    fn axis_rejects_degenerate() {
        assert!(Axis::new(1, 0.0, 1.0).is_err());
        assert!(Axis::new(4, 0.0, 0.0).is_err());
        assert!(Axis::new(4, f64::NAN, 1.0).is_err());
    }

    #[test]
    fn nearest_index_bounds() {
        let a = Axis::symmetric(5, 2.0).unwrap();
        assert_eq!(a.nearest_index(-2.0), Some(0));
        assert_eq!(a.nearest_index(0.4), Some(2));
        assert_eq!(a.nearest_index(2.4), Some(4));
        assert_eq!(a.nearest_index(2.6), None);
        assert_eq!(a.nearest_index(-2.6), None);
    }

    #[test]
    fn grid_rejects_negative_values() {
        let a = Axis::symmetric(2, 1.0).unwrap();
        let snap = GeometrySnapshot {
            z_a: 1.0,
            z_b: 1.0,
            magnification: 1.0,
        };
        let bad = Array2::from_elem((2, 2), -1.0);
        assert!(CorrelationGrid::new(a, a, bad, snap).is_err());
        let shape = Array2::zeros((2, 3));
        assert!(CorrelationGrid::new(a, a, shape, snap).is_err());
    }
}
