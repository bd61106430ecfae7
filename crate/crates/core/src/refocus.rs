//! Ghost images, refocusing and viewpoint slices of a correlation grid.
//!
//! A grid acquired with the object at `z_b` and the high-resolution sensor
//! at `z_a` is refocused by the per-column affine remap
//!
//! ```text
//! ρa' = (z_a/z_b)·ρa − (ρb/M)(1 − z_a/z_b)
//! ```
//!
//! evaluated by linear interpolation along `ρa`. Samples that land outside
//! the acquired `ρa` range are marked invalid and left out of the `ρb`
//! integration, whose result is rescaled by the valid weight fraction.

use ndarray::Array2;
use rayon::prelude::*;

use crate::error::{CpiError, Result};
use crate::optics::{Axis, CorrelationGrid, GeometrySnapshot, ImageLabel, SampledImage};

/// Refocus parameters: the distances the grid was acquired with and the
/// `ρa` axis of the output.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RefocusSpec {
    pub z_a: f64,
    pub z_b: f64,
    pub magnification: f64,
    pub output_axis: Axis,
}

impl RefocusSpec {
    pub fn new(z_a: f64, z_b: f64, magnification: f64, output_axis: Axis) -> Result<Self> {
        for (name, v) in [("z_a", z_a), ("z_b", z_b), ("magnification", magnification)] {
            if !(v.is_finite() && v > 0.0) {
                return Err(CpiError::InvalidGeometry(format!("{name} must be positive, got {v}")));
            }
        }
        Ok(Self {
            z_a,
            z_b,
            magnification,
            output_axis,
        })
    }

    /// Spec matching the distances recorded in `grid`, on the grid's own
    /// `ρa` axis.
    pub fn for_grid(grid: &CorrelationGrid) -> Self {
        Self::for_grid_on(grid, grid.axis_a)
    }

    pub fn for_grid_on(grid: &CorrelationGrid, output_axis: Axis) -> Self {
        let s = grid.snapshot;
        Self {
            z_a: s.z_a,
            z_b: s.z_b,
            magnification: s.magnification,
            output_axis,
        }
    }

    /// The remap with the roles of `z_a` and `z_b` exchanged, which undoes
    /// this one.
    pub fn inverse(&self, output_axis: Axis) -> Self {
        Self {
            z_a: self.z_b,
            z_b: self.z_a,
            magnification: self.magnification,
            output_axis,
        }
    }

    /// Acquired `ρa` that maps onto output `ρa` in column `ρb`.
    pub fn source_coordinate(&self, rho_a: f64, rho_b: f64) -> f64 {
        let ratio = self.z_a / self.z_b;
        ratio * rho_a - rho_b / self.magnification * (1.0 - ratio)
    }

    fn is_identity_for(&self, grid: &CorrelationGrid) -> bool {
        self.z_a == self.z_b && self.output_axis == grid.axis_a
    }
}

/// Focused ghost image: trapezoid integral of `Γ` over `ρb`.
pub fn ghost_image(grid: &CorrelationGrid) -> SampledImage {
    SampledImage {
        axis: grid.axis_a,
        values: integrate_over_b(grid),
        label: ImageLabel::Ghost,
    }
}

/// Trapezoid sum over valid `ρb` samples of every row, rescaled by
/// `total weight / valid weight`. Rows without valid samples give zero.
fn integrate_over_b(grid: &CorrelationGrid) -> Vec<f64> {
    let weights = grid.axis_b.trapezoid_weights();
    let total: f64 = weights.iter().sum();
    (0..grid.axis_a.len())
        .map(|i| {
            let mut sum = 0.0;
            let mut valid_weight = 0.0;
            for (j, w) in weights.iter().enumerate() {
                if grid.is_valid(i, j) {
                    sum += w * grid.values[[i, j]];
                    valid_weight += w;
                }
            }
            if valid_weight == 0.0 {
                0.0
            } else if valid_weight == total {
                sum
            } else {
                sum * (total / valid_weight)
            }
        })
        .collect()
}

/// Resamples `grid` onto `spec.output_axis` with the refocusing remap.
///
/// Refocusing at `z_a = z_b` onto the acquired axis returns an exact copy.
/// Otherwise the output carries a validity mask and its snapshot records the
/// focused configuration `z_a = z_b`.
pub fn refocus_grid(grid: &CorrelationGrid, spec: &RefocusSpec) -> Result<CorrelationGrid> {
    if spec.is_identity_for(grid) {
        return Ok(grid.clone());
    }
    let out_axis = spec.output_axis;
    let (na, nb) = (out_axis.len(), grid.axis_b.len());
    let last = (grid.axis_a.len() - 1) as f64;

    let rows: Vec<(Vec<f64>, Vec<bool>)> = (0..na)
        .into_par_iter()
        .map(|i| {
            let rho_a = out_axis.coordinate(i);
            let mut vals = vec![0.0; nb];
            let mut ok = vec![false; nb];
            for j in 0..nb {
                let t = grid.axis_a.fractional_index(spec.source_coordinate(rho_a, grid.axis_b.coordinate(j)));
                if !(0.0..=last).contains(&t) {
                    continue;
                }
                let lo = (t.floor() as usize).min(grid.axis_a.len() - 2);
                let frac = t - lo as f64;
                let needs_hi = frac > 0.0;
                if !grid.is_valid(lo, j) || (needs_hi && !grid.is_valid(lo + 1, j)) {
                    continue;
                }
                let mut v = (1.0 - frac) * grid.values[[lo, j]];
                if needs_hi {
                    v += frac * grid.values[[lo + 1, j]];
                }
                vals[j] = v;
                ok[j] = true;
            }
            (vals, ok)
        })
        .collect();

    let total = na * nb;
    let valid = rows.iter().map(|(_, ok)| ok.iter().filter(|v| **v).count()).sum::<usize>();
    if 2 * valid < total {
        return Err(CpiError::EmptyOverlap { valid, total });
    }
    let mut values = Array2::zeros((na, nb));
    let mut mask = Array2::from_elem((na, nb), false);
    for (i, (vals, ok)) in rows.into_iter().enumerate() {
        for j in 0..nb {
            values[[i, j]] = vals[j];
            mask[[i, j]] = ok[j];
        }
    }
    let snapshot = GeometrySnapshot {
        z_a: spec.z_b,
        z_b: spec.z_b,
        magnification: spec.magnification,
    };
    let mut out = CorrelationGrid::new(out_axis, grid.axis_b, values, snapshot)?;
    out.valid = Some(mask);
    Ok(out)
}

/// Refocused image: the refocused grid integrated over valid `ρb` samples.
pub fn refocused_image(grid: &CorrelationGrid, spec: &RefocusSpec) -> Result<SampledImage> {
    let refocused = refocus_grid(grid, spec)?;
    Ok(SampledImage {
        axis: refocused.axis_a,
        values: integrate_over_b(&refocused),
        label: ImageLabel::Refocused,
    })
}

/// The `ρa` profile seen by the single `ρb` pixel nearest to `rho_b`.
/// Invalid samples read as zero.
pub fn viewpoint_slice(grid: &CorrelationGrid, rho_b: f64) -> Result<SampledImage> {
    let axis = grid.axis_b;
    let j = axis.nearest_index(rho_b).ok_or(CpiError::OutOfRange {
        value: rho_b,
        min: axis.first() - 0.5 * axis.step(),
        max: axis.last() + 0.5 * axis.step(),
    })?;
    let values = (0..grid.axis_a.len())
        .map(|i| if grid.is_valid(i, j) { grid.values[[i, j]] } else { 0.0 })
        .collect();
    Ok(SampledImage {
        axis: grid.axis_a,
        values,
        label: ImageLabel::Viewpoint,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn snapshot(z_a: f64, z_b: f64) -> GeometrySnapshot {
        GeometrySnapshot {
            z_a,
            z_b,
            magnification: 0.5,
        }
    }

    fn ramp_grid(z_a: f64, z_b: f64) -> CorrelationGrid {
        let aa = Axis::symmetric(41, 1.0).unwrap();
        let ab = Axis::symmetric(9, 0.2).unwrap();
        let values = Array2::from_shape_fn((41, 9), |(i, j)| 2.0 + aa.coordinate(i) + 0.1 * j as f64);
        CorrelationGrid::new(aa, ab, values, snapshot(z_a, z_b)).unwrap()
    }

    #[test]
    fn constant_grid_gives_flat_ghost_image() {
        let aa = Axis::symmetric(5, 1.0).unwrap();
        let ab = Axis::symmetric(11, 2.0).unwrap();
        let g = CorrelationGrid::new(aa, ab, Array2::from_elem((5, 11), 3.0), snapshot(1.0, 1.0)).unwrap();
        let img = ghost_image(&g);
        for v in &img.values {
            assert!((v - 12.0).abs() < 1e-12);
        }
    }

    #[test]
    fn identity_refocus_is_exact() {
        let g = ramp_grid(0.1, 0.1);
        let spec = RefocusSpec::for_grid(&g);
        assert_eq!(refocus_grid(&g, &spec).unwrap(), g);
        assert_eq!(refocused_image(&g, &spec).unwrap().values, ghost_image(&g).values);
    }

    #[test]
    fn linear_data_is_remapped_exactly() {
        let g = ramp_grid(0.1, 0.125);
        let out_axis = Axis::symmetric(21, 0.5).unwrap();
        let spec = RefocusSpec::for_grid_on(&g, out_axis);
        let r = refocus_grid(&g, &spec).unwrap();
        for i in 0..21 {
            for j in 0..9 {
                assert!(r.is_valid(i, j));
                let src = spec.source_coordinate(out_axis.coordinate(i), g.axis_b.coordinate(j));
                let expected = 2.0 + src + 0.1 * j as f64;
                assert!((r.values[[i, j]] - expected).abs() < 1e-12);
            }
        }
        assert_eq!(r.snapshot.z_a, 0.125);
    }

    #[test]
    fn out_of_range_samples_are_masked_or_rejected() {
        let g = ramp_grid(0.1, 0.08);
        let wide = Axis::symmetric(41, 1.2).unwrap();
        let r = refocus_grid(&g, &RefocusSpec::for_grid_on(&g, wide)).unwrap();
        assert!(r.valid_count() < r.values.len());
        assert!(!r.is_valid(0, 0));
        let far = Axis::new(41, 5.0, 0.05).unwrap();
        assert!(matches!(
            refocus_grid(&g, &RefocusSpec::for_grid_on(&g, far)),
            Err(CpiError::EmptyOverlap { .. })
        ));
    }

    #[test]
    fn viewpoint_bounds() {
        let g = ramp_grid(0.1, 0.1);
        let v = viewpoint_slice(&g, 0.2).unwrap();
        assert_eq!(v.values[0], g.values[[0, 8]]);
        assert!(viewpoint_slice(&g, 0.2 + 0.6 * g.axis_b.step()).is_err());
        assert!(viewpoint_slice(&g, -0.2 - 0.4 * g.axis_b.step()).is_ok());
    }
}
