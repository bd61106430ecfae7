//! Deterministic evaluation of the intensities and of the crossed
//! correlation term.
//!
//! The crossed term is
//!
//! ```text
//! Γ(ρa, ρb) = K_a K_b |∫dρo ∫dρs A(ρo) F(ρs) e^{i k φ(ρo, ρs; ρa, ρb)}|²
//! φ = ρs²/2·(1/z_b − 1/z_a) − ρo/z_b·(ρs + ρb/M) + ρs ρa/z_a
//! ```
//!
//! The `ρo` integral is done in closed form through the mask transform
//! `Ã`, which leaves a one-dimensional trapezoid sum over source nodes for
//! every grid point. The source step is checked against the phase of the
//! full integrand: no adjacent pair of nodes may differ by more than π/2.

mod psf;
mod quadrature;

pub use psf::{coherent_psf, incoherent_psf, PsfEval};
pub use quadrature::{QuadratureSpec, MAX_PHASE_STEP};
pub(crate) use quadrature::gamma_phase_rate;

use std::f64::consts::PI;

use ndarray::Array2;
use num_complex::Complex64;
use rayon::prelude::*;

use crate::error::Result;
use crate::optics::{
    intensity_scale_a, intensity_scale_b, Axis, CorrelationGrid, GeometrySnapshot, ImageLabel,
    ObjectMask, SampledImage, SetupGeometry, SourceProfile,
};

// Source nodes are processed in blocks so the per-column kernels stay small.
const SOURCE_BLOCK: usize = 2048;

/// Flat intensity on sensor D_a: `I_a = K_a ∫F`.
pub fn intensity_a(geom: &SetupGeometry, _source: &SourceProfile, axis_a: Axis) -> SampledImage {
    // F is normalized to unit area
    let level = intensity_scale_a(geom);
    SampledImage {
        axis: axis_a,
        values: vec![level; axis_a.len()],
        label: ImageLabel::IntensityA,
    }
}

/// Intensity on sensor D_b:
/// `I_b(ρb) = K_b ∫dρs F(ρs) |Ã[(k/z_b)(ρs + ρb/M)]|²`.
pub fn intensity_b(
    geom: &SetupGeometry,
    source: &SourceProfile,
    mask: &ObjectMask,
    axis_b: Axis,
    quad: &QuadratureSpec,
) -> Result<SampledImage> {
    quad.check_intensity_b(geom, source, mask)?;
    let (nodes, weights) = quad.source_nodes(source);
    let k = geom.wavenumber();
    let (z_b, m) = (geom.z_b(), geom.magnification());
    let scale = intensity_scale_b(geom);
    let weighted: Vec<f64> = nodes
        .iter()
        .zip(&weights)
        .map(|(&s, &w)| w * source.intensity(s))
        .collect();
    let values = axis_b
        .coordinates()
        .into_par_iter()
        .map(|rb| {
            let sum: f64 = nodes
                .iter()
                .zip(&weighted)
                .map(|(&s, &w)| w * mask.fourier(k / z_b * (s + rb / m)).norm_sqr())
                .sum();
            scale * sum
        })
        .collect();
    SampledImage::new(axis_b, values, ImageLabel::IntensityB)
}

/// `Γ(ρa, ρb)` by trapezoid quadrature over the source plane.
///
/// Every grid point is an independent sum with a fixed summation order, so
/// the result does not depend on how rows are scheduled across threads.
pub fn gamma_quadrature(
    geom: &SetupGeometry,
    source: &SourceProfile,
    mask: &ObjectMask,
    axis_a: Axis,
    axis_b: Axis,
    quad: &QuadratureSpec,
) -> Result<CorrelationGrid> {
    quad.check_gamma(geom, source, mask, &axis_a)?;
    let (nodes, weights) = quad.source_nodes(source);
    let k = geom.wavenumber();
    let (z_a, z_b, m) = (geom.z_a(), geom.z_b(), geom.magnification());
    let curvature = k * (1.0 / z_b - 1.0 / z_a);

    // w·F(ρs)·G(ρs)[k(1/z_b - 1/z_a)]
    let base: Vec<Complex64> = nodes
        .iter()
        .zip(&weights)
        .map(|(&s, &w)| Complex64::from_polar(w * source.intensity(s), 0.5 * curvature * s * s))
        .collect();
    let rho_a = axis_a.coordinates();
    let rho_b = axis_b.coordinates();
    let (na, nb) = (rho_a.len(), rho_b.len());

    let mut acc = vec![Complex64::new(0.0, 0.0); na * nb];
    for start in (0..nodes.len()).step_by(SOURCE_BLOCK) {
        let end = (start + SOURCE_BLOCK).min(nodes.len());
        let block = &nodes[start..end];
        let len = block.len();

        // column kernels: base·Ã[(k/z_b)(ρs + ρb/M)], split into re/im planes
        let mut col_re = vec![0.0; nb * len];
        let mut col_im = vec![0.0; nb * len];
        col_re
            .par_chunks_mut(len)
            .zip(col_im.par_chunks_mut(len))
            .zip(rho_b.par_iter())
            .for_each(|((re, im), &rb)| {
                for (t, &s) in block.iter().enumerate() {
                    let v = base[start + t] * mask.fourier(k / z_b * (s + rb / m));
                    re[t] = v.re;
                    im[t] = v.im;
                }
            });

        acc.par_chunks_mut(nb)
            .zip(rho_a.par_iter())
            .for_each(|(row, &ra)| {
                let mut pr = vec![0.0; len];
                let mut pi = vec![0.0; len];
                for (t, &s) in block.iter().enumerate() {
                    let (sin, cos) = (k * ra * s / z_a).sin_cos();
                    pr[t] = cos;
                    pi[t] = sin;
                }
                for (j, out) in row.iter_mut().enumerate() {
                    let vr = &col_re[j * len..(j + 1) * len];
                    let vi = &col_im[j * len..(j + 1) * len];
                    *out += complex_dot(&pr, &pi, vr, vi);
                }
            });
    }

    let scale = intensity_scale_a(geom) * intensity_scale_b(geom);
    let values = Array2::from_shape_vec((na, nb), acc.iter().map(|c| scale * c.norm_sqr()).collect())
        .expect("accumulator has grid shape");
    CorrelationGrid::new(axis_a, axis_b, values, GeometrySnapshot::from(geom))
}

/// `Σ_t (pr + i·pi)(vr + i·vi)` with four interleaved partial sums.
pub(crate) fn complex_dot(pr: &[f64], pi: &[f64], vr: &[f64], vi: &[f64]) -> Complex64 {
    let mut re = [0.0; 4];
    let mut im = [0.0; 4];
    let n4 = pr.len() / 4 * 4;
    for t in (0..n4).step_by(4) {
        for l in 0..4 {
            let (a, b, c, d) = (pr[t + l], pi[t + l], vr[t + l], vi[t + l]);
            re[l] += a * c - b * d;
            im[l] += a * d + b * c;
        }
    }
    for t in n4..pr.len() {
        re[0] += pr[t] * vr[t] - pi[t] * vi[t];
        im[0] += pr[t] * vi[t] + pi[t] * vr[t];
    }
    Complex64::new((re[0] + re[1]) + (re[2] + re[3]), (im[0] + im[1]) + (im[2] + im[3]))
}

/// Short-wavelength asymptote of `Γ`:
///
/// `Γ_geo = K_a K_b (2π z_b/k)² · F(−ρb/M)² · |A[α ρa − (ρb/M)(1 − α)]|²`.
///
/// The `(2π z_b/k)²` factor is the stationary-phase weight of the double
/// integral, which puts `Γ_geo` on the same absolute scale as
/// [`gamma_quadrature`].
pub fn gamma_geometric(
    geom: &SetupGeometry,
    source: &SourceProfile,
    mask: &ObjectMask,
    axis_a: Axis,
    axis_b: Axis,
) -> CorrelationGrid {
    let k = geom.wavenumber();
    let (alpha, m) = (geom.alpha(), geom.magnification());
    let scale =
        intensity_scale_a(geom) * intensity_scale_b(geom) * (2.0 * PI * geom.z_b() / k).powi(2);
    let rho_b = axis_b.coordinates();
    let source_weight: Vec<f64> = rho_b.iter().map(|&rb| source.intensity(-rb / m).powi(2)).collect();
    let values = Array2::from_shape_fn((axis_a.len(), axis_b.len()), |(i, j)| {
        let ra = axis_a.coordinate(i);
        let rb = rho_b[j];
        let rho_o = alpha * ra - rb / m * (1.0 - alpha);
        scale * source_weight[j] * mask.transmission(rho_o).norm_sqr()
    });
    CorrelationGrid::new(axis_a, axis_b, values, GeometrySnapshot::from(geom))
        .expect("geometric correlation is finite and non-negative")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::optics::LensSpec;

    #[test]
    fn complex_dot_matches_naive() {
        let n = 11;
        let pr: Vec<f64> = (0..n).map(|i| (i as f64 * 0.3).cos()).collect();
        let pi: Vec<f64> = (0..n).map(|i| (i as f64 * 0.3).sin()).collect();
        let vr: Vec<f64> = (0..n).map(|i| 1.0 + i as f64).collect();
        let vi: Vec<f64> = (0..n).map(|i| 0.5 - i as f64).collect();
        let naive: Complex64 = (0..n)
            .map(|t| Complex64::new(pr[t], pi[t]) * Complex64::new(vr[t], vi[t]))
            .sum();
        assert!((complex_dot(&pr, &pi, &vr, &vi) - naive).norm() < 1e-12);
    }

    #[test]
    fn intensity_a_is_flat_and_scales_with_distance() {
        let g = SetupGeometry::new(0.1, 0.1, 0.2, LensSpec::FocalLength(0.05), 500e-9).unwrap();
        let s = SourceProfile::gaussian(0.5e-3).unwrap();
        let axis = Axis::symmetric(33, 1e-3).unwrap();
        let img = intensity_a(&g, &s, axis);
        assert!(img.values.iter().all(|v| *v > 0.0 && *v == img.values[0]));
        let far = intensity_a(&g.with_z_a(0.2).unwrap(), &s, axis);
        assert!((img.values[0] / far.values[0] - 4.0).abs() < 1e-12);
    }

    #[test]
    fn geometric_grid_is_separable_at_focus() {
        let g = SetupGeometry::new(0.1, 0.1, 0.2, LensSpec::FocalLength(0.05), 500e-9).unwrap();
        let s = SourceProfile::gaussian(0.5e-3).unwrap();
        let mask = ObjectMask::double_slit(150e-6, 50e-6).unwrap();
        let aa = Axis::symmetric(41, 150e-6).unwrap();
        let ab = Axis::symmetric(21, 300e-6).unwrap();
        let grid = gamma_geometric(&g, &s, &mask, aa, ab);
        let m = g.magnification();
        for i in 0..41 {
            for j in 0..21 {
                let expected = s.intensity(-ab.coordinate(j) / m).powi(2)
                    * mask.transmission(aa.coordinate(i)).norm_sqr();
                let ratio = grid.values[[i, j]];
                if expected == 0.0 {
                    assert_eq!(ratio, 0.0);
                }
            }
        }
        // bright rows sit on the slits, dark rows between them
        let centre = ab.len() / 2;
        assert!(grid.values[[aa.nearest_index(75e-6).unwrap(), centre]] > 0.0);
        assert_eq!(grid.values[[aa.nearest_index(0.0).unwrap(), centre]], 0.0);
    }

    #[test]
    fn geometric_grid_rows_move_with_defocus() {
        let g = SetupGeometry::new(0.1, 0.08, 0.2, LensSpec::FocalLength(0.05), 500e-9).unwrap();
        let s = SourceProfile::gaussian(0.5e-3).unwrap();
        let mask = ObjectMask::double_slit(150e-6, 50e-6).unwrap();
        let aa = Axis::new(3, 0.0, 93.75e-6).unwrap();
        let ab = Axis::symmetric(3, 1e-4).unwrap();
        let grid = gamma_geometric(&g, &s, &mask, aa, ab);
        // at ρb = 0, the slit centres ±75 µm appear at ±75/α µm
        assert!(grid.values[[0, 1]] > 0.0 && grid.values[[2, 1]] > 0.0);
        assert_eq!(grid.values[[1, 1]], 0.0);
    }
}
