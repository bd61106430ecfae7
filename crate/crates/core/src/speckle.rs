//! Monte Carlo estimate of `Γ` from random speckle realizations.
//!
//! The source is a row of independent emitter cells of width `Δs`. Cell `i`
//! radiates `e_i = f(ρs_i)·exp(iθ_i)` with `θ_i` uniform on `[0, 2π)`, so
//! `⟨e_i e_j*⟩ = F(ρs_i) δ_ij`. Each arm field is a sum of per-cell kernels:
//!
//! ```text
//! E_a(ρa) = 2π √Δs Σ_i e_i · h(z_a) · G(ρa − ρs_i)[k/z_a]
//! E_b(ρb) = 2π √Δs C_b(ρb) Σ_i e_i · G(ρs_i)[k/z_b] · Ã[(k/z_b)(ρs_i + ρb/M)]
//! ```
//!
//! With these weights `⟨E_a E_b*⟩` is the trapezoid-free Riemann sum of the
//! same field correlation the analytic correlator integrates, in the same
//! absolute units, and the covariance `⟨I_a I_b⟩ − ⟨I_a⟩⟨I_b⟩` estimates `Γ`.
//! Constant-modulus emitters have a fourth moment `F²` rather than the
//! Gaussian `2F²`, which leaves a bias `−Σ_i F_i² Δs² |a_i|² |b_i|²` that
//! shrinks like the inverse number of cells under the source.
//!
//! Realizations are grouped into fixed batches. Each batch stores its
//! intensities, computes a two-pass covariance, and batches are merged
//! pairwise in a fixed tree order, so the estimate does not depend on the
//! number of worker threads.

use std::f64::consts::PI;

use ndarray::Array2;
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::analysis::{normalized_l1, normalized_linf};
use crate::correlator::{complex_dot, gamma_phase_rate, MAX_PHASE_STEP};
use crate::error::{CpiError, Result};
use crate::optics::{
    arm_b_prefactor, fresnel_prefactor, gaussian_phase, Axis, CorrelationGrid,
    GeometrySnapshot, ObjectMask, SetupGeometry, SourceProfile,
};

/// One realization of the source field on `axis_s`: `f(ρs_i)·exp(iθ_i)`.
///
/// Phases come from a ChaCha8 stream keyed by `seed` and selected by
/// `realization_index`, drawn in cell order, so the vector depends only on
/// `(seed, realization_index)`.
pub fn sample_source_field(
    source: &SourceProfile,
    axis_s: &Axis,
    seed: u64,
    realization_index: u64,
) -> Vec<Complex64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(realization_index);
    (0..axis_s.len())
        .map(|i| {
            let theta = 2.0 * PI * rng.random::<f64>();
            Complex64::from_polar(source.amplitude(axis_s.coordinate(i)), theta)
        })
        .collect()
}

/// Largest emitter cell that stays unresolved on detectors of the given
/// extent: `λ0·min(z_a, z_b) / (4·extent)`.
pub fn max_cell_size(geom: &SetupGeometry, axis_a: &Axis, axis_b: &Axis) -> f64 {
    let extent = (axis_a.last() - axis_a.first()).max(axis_b.last() - axis_b.first());
    geom.lambda0() * geom.z_a().min(geom.z_b()) / (4.0 * extent)
}

/// Emitter cells of width close to `cell` covering `±span` standard
/// deviations of a Gaussian source, or the full width of a top-hat.
pub fn source_axis(source: &SourceProfile, cell: f64, span: f64) -> Result<Axis> {
    if !(cell.is_finite() && cell > 0.0) {
        return Err(CpiError::InvalidInput(format!("cell size must be positive, got {cell}")));
    }
    let half = source.integration_half_width(span);
    // cell centres tile [-half, half] exactly
    let n = ((2.0 * half / cell).round() as usize).max(2);
    Axis::new(n, 0.0, 2.0 * half / n as f64)
}

/// Per-cell transfer kernels of both arms, stored as split re/im rows.
#[derive(Debug, Clone)]
pub struct ArmKernels {
    n_cells: usize,
    a_re: Vec<f64>,
    a_im: Vec<f64>,
    b_re: Vec<f64>,
    b_im: Vec<f64>,
    n_a: usize,
    n_b: usize,
}

impl ArmKernels {
    pub fn new(
        geom: &SetupGeometry,
        mask: &ObjectMask,
        axis_s: &Axis,
        axis_a: &Axis,
        axis_b: &Axis,
    ) -> Result<Self> {
        let limit = max_cell_size(geom, axis_a, axis_b);
        if axis_s.step() > limit {
            return Err(CpiError::UnderResolved {
                what: "emitter cell size",
                increment: axis_s.step() / limit * MAX_PHASE_STEP,
                limit: MAX_PHASE_STEP,
            });
        }
        let increment = gamma_phase_rate(geom, axis_s.max_abs(), mask, axis_a) * axis_s.step();
        if increment > MAX_PHASE_STEP {
            return Err(CpiError::UnderResolved {
                what: "emitter sampling of the arm kernels",
                increment,
                limit: MAX_PHASE_STEP,
            });
        }

        let k = geom.wavenumber();
        let (z_a, z_b, m) = (geom.z_a(), geom.z_b(), geom.magnification());
        let weight = 2.0 * PI * axis_s.step().sqrt();
        let h_a = fresnel_prefactor(k, z_a)?;
        let cells = axis_s.coordinates();
        let (n_s, n_a, n_b) = (cells.len(), axis_a.len(), axis_b.len());

        let mut a_re = vec![0.0; n_a * n_s];
        let mut a_im = vec![0.0; n_a * n_s];
        for i in 0..n_a {
            let ra = axis_a.coordinate(i);
            for (s, &rs) in cells.iter().enumerate() {
                let v = weight * h_a * gaussian_phase(ra - rs, k / z_a);
                a_re[i * n_s + s] = v.re;
                a_im[i * n_s + s] = v.im;
            }
        }
        let mut b_re = vec![0.0; n_b * n_s];
        let mut b_im = vec![0.0; n_b * n_s];
        for j in 0..n_b {
            let rb = axis_b.coordinate(j);
            let c_b = weight * arm_b_prefactor(geom, rb);
            for (s, &rs) in cells.iter().enumerate() {
                let v = c_b * gaussian_phase(rs, k / z_b) * mask.fourier(k / z_b * (rs + rb / m));
                b_re[j * n_s + s] = v.re;
                b_im[j * n_s + s] = v.im;
            }
        }
        Ok(Self {
            n_cells: n_s,
            a_re,
            a_im,
            b_re,
            b_im,
            n_a,
            n_b,
        })
    }

    /// Arm fields `(E_a, E_b)` for one source realization.
    pub fn propagate(&self, field: &[Complex64]) -> (Vec<Complex64>, Vec<Complex64>) {
        assert_eq!(field.len(), self.n_cells, "field length must match the emitter axis");
        let fr: Vec<f64> = field.iter().map(|c| c.re).collect();
        let fi: Vec<f64> = field.iter().map(|c| c.im).collect();
        let n = self.n_cells;
        let e_a = (0..self.n_a)
            .map(|i| complex_dot(&fr, &fi, &self.a_re[i * n..(i + 1) * n], &self.a_im[i * n..(i + 1) * n]))
            .collect();
        let e_b = (0..self.n_b)
            .map(|j| complex_dot(&fr, &fi, &self.b_re[j * n..(j + 1) * n], &self.b_im[j * n..(j + 1) * n]))
            .collect();
        (e_a, e_b)
    }

    fn intensities(&self, field: &[Complex64], ia: &mut [f64], ib: &mut [f64]) {
        let (e_a, e_b) = self.propagate(field);
        for (dst, e) in ia.iter_mut().zip(&e_a) {
            *dst = e.norm_sqr();
        }
        for (dst, e) in ib.iter_mut().zip(&e_b) {
            *dst = e.norm_sqr();
        }
    }
}

/// Arm fields for one source realization on the given axes.
pub fn propagate_arms(
    field: &[Complex64],
    geom: &SetupGeometry,
    mask: &ObjectMask,
    axis_s: &Axis,
    axis_a: &Axis,
    axis_b: &Axis,
) -> Result<(Vec<Complex64>, Vec<Complex64>)> {
    Ok(ArmKernels::new(geom, mask, axis_s, axis_a, axis_b)?.propagate(field))
}

/// Parameters of one Monte Carlo estimate.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpeckleRun {
    pub seed: u64,
    pub n_realizations: usize,
    pub n_batches: usize,
    pub source_axis: Axis,
    pub axis_a: Axis,
    pub axis_b: Axis,
}

impl SpeckleRun {
    pub fn new(
        seed: u64,
        n_realizations: usize,
        n_batches: usize,
        source_axis: Axis,
        axis_a: Axis,
        axis_b: Axis,
    ) -> Result<Self> {
        if n_batches < 2 || n_realizations < 2 * n_batches {
            return Err(CpiError::InvalidInput(format!(
                "need at least 2 batches of at least 2 realizations, got {n_realizations} in {n_batches}"
            )));
        }
        Ok(Self {
            seed,
            n_realizations,
            n_batches,
            source_axis,
            axis_a,
            axis_b,
        })
    }

    fn batch_range(&self, b: usize) -> (usize, usize) {
        let n = self.n_realizations;
        (b * n / self.n_batches, (b + 1) * n / self.n_batches)
    }
}

/// Running covariance state of a set of realizations.
#[derive(Debug, Clone)]
struct Moments {
    n: usize,
    mean_a: Vec<f64>,
    mean_b: Vec<f64>,
    // Σ (I_a − ⟨I_a⟩)(I_b − ⟨I_b⟩), row-major n_a × n_b
    comoment: Vec<f64>,
}

impl Moments {
    /// Two-pass statistics of stored intensities.
    fn from_samples(ia: &[f64], ib: &[f64], n: usize, n_a: usize, n_b: usize) -> Self {
        let mut mean_a = vec![0.0; n_a];
        let mut mean_b = vec![0.0; n_b];
        for r in 0..n {
            for (m, v) in mean_a.iter_mut().zip(&ia[r * n_a..(r + 1) * n_a]) {
                *m += v;
            }
            for (m, v) in mean_b.iter_mut().zip(&ib[r * n_b..(r + 1) * n_b]) {
                *m += v;
            }
        }
        mean_a.iter_mut().for_each(|m| *m /= n as f64);
        mean_b.iter_mut().for_each(|m| *m /= n as f64);
        let mut comoment = vec![0.0; n_a * n_b];
        let mut db = vec![0.0; n_b];
        for r in 0..n {
            for (d, (v, m)) in db.iter_mut().zip(ib[r * n_b..(r + 1) * n_b].iter().zip(&mean_b)) {
                *d = v - m;
            }
            for i in 0..n_a {
                let da = ia[r * n_a + i] - mean_a[i];
                for (c, d) in comoment[i * n_b..(i + 1) * n_b].iter_mut().zip(&db) {
                    *c += da * d;
                }
            }
        }
        Self {
            n,
            mean_a,
            mean_b,
            comoment,
        }
    }

    /// Pairwise merge of two disjoint sets.
    fn merge(&self, other: &Self) -> Self {
        let n = self.n + other.n;
        let (w1, w2) = (self.n as f64 / n as f64, other.n as f64 / n as f64);
        let f = self.n as f64 * other.n as f64 / n as f64;
        let da: Vec<f64> = other.mean_a.iter().zip(&self.mean_a).map(|(b, a)| b - a).collect();
        let db: Vec<f64> = other.mean_b.iter().zip(&self.mean_b).map(|(b, a)| b - a).collect();
        let n_b = db.len();
        let comoment = self
            .comoment
            .iter()
            .zip(&other.comoment)
            .enumerate()
            .map(|(idx, (c1, c2))| c1 + c2 + f * da[idx / n_b] * db[idx % n_b])
            .collect();
        Self {
            n,
            mean_a: self.mean_a.iter().zip(&other.mean_a).map(|(a, b)| w1 * a + w2 * b).collect(),
            mean_b: self.mean_b.iter().zip(&other.mean_b).map(|(a, b)| w1 * a + w2 * b).collect(),
            comoment,
        }
    }

    fn covariance(&self) -> Vec<f64> {
        self.comoment.iter().map(|c| c / self.n as f64).collect()
    }
}

/// Merges `parts` by recursive halving; the tree shape depends only on
/// `parts.len()`.
fn merge_tree(parts: &[Moments]) -> Moments {
    match parts.len() {
        1 => parts[0].clone(),
        n => {
            let (l, r) = parts.split_at(n / 2);
            merge_tree(l).merge(&merge_tree(r))
        }
    }
}

/// Raw Monte Carlo output.
#[derive(Debug, Clone)]
pub struct SpeckleEstimate {
    /// Covariance estimate, which may dip below zero where `Γ ≈ 0`.
    pub gamma: Array2<f64>,
    /// Batch-means standard error at each grid point.
    pub standard_error: Array2<f64>,
    pub mean_intensity_a: Vec<f64>,
    pub mean_intensity_b: Vec<f64>,
    pub n_realizations: usize,
    pub n_batches: usize,
    pub axis_a: Axis,
    pub axis_b: Axis,
    pub snapshot: GeometrySnapshot,
}

impl SpeckleEstimate {
    /// The estimate as a correlation grid, with negative noise clipped to 0.
    pub fn grid(&self) -> CorrelationGrid {
        CorrelationGrid::new(
            self.axis_a,
            self.axis_b,
            self.gamma.mapv(|v| v.max(0.0)),
            self.snapshot,
        )
        .expect("clipped covariance is finite and non-negative")
    }

    pub fn mean_standard_error(&self) -> f64 {
        self.standard_error.mean().unwrap_or(0.0)
    }
}

/// Distances of a Monte Carlo estimate to a reference grid, in units of the
/// reference peak.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConvergenceReport {
    pub n_realizations: usize,
    pub n_batches: usize,
    /// `mean|Γ̂ − Γ| / max Γ`.
    pub l1: f64,
    /// `max|Γ̂ − Γ| / max Γ`.
    pub linf: f64,
    /// Mean batch-means standard error over the grid, `/ max Γ`.
    pub standard_error: f64,
}

impl ConvergenceReport {
    pub fn against(estimate: &SpeckleEstimate, reference: &CorrelationGrid) -> Result<Self> {
        if reference.values.dim() != estimate.gamma.dim() {
            return Err(CpiError::InvalidInput("reference grid shape differs from the estimate".into()));
        }
        let est = estimate.gamma.as_slice().expect("standard layout");
        let refv = reference.values.as_slice().expect("standard layout");
        let peak = reference.max_value();
        if !(peak > 0.0) {
            return Err(CpiError::DegenerateStatistics("reference correlation is zero".into()));
        }
        Ok(Self {
            n_realizations: estimate.n_realizations,
            n_batches: estimate.n_batches,
            l1: normalized_l1(est, refv),
            linf: normalized_linf(est, refv),
            standard_error: estimate.mean_standard_error() / peak,
        })
    }
}

/// Runs the realizations of `run` and returns the covariance estimate.
pub fn speckle_covariance(
    run: &SpeckleRun,
    geom: &SetupGeometry,
    source: &SourceProfile,
    mask: &ObjectMask,
) -> Result<SpeckleEstimate> {
    let kernels = ArmKernels::new(geom, mask, &run.source_axis, &run.axis_a, &run.axis_b)?;
    let (n_a, n_b) = (run.axis_a.len(), run.axis_b.len());

    let batches: Vec<Moments> = (0..run.n_batches)
        .into_par_iter()
        .map(|b| {
            let (start, end) = run.batch_range(b);
            let n = end - start;
            let mut ia = vec![0.0; n * n_a];
            let mut ib = vec![0.0; n * n_b];
            for (r, idx) in (start..end).enumerate() {
                let field = sample_source_field(source, &run.source_axis, run.seed, idx as u64);
                kernels.intensities(
                    &field,
                    &mut ia[r * n_a..(r + 1) * n_a],
                    &mut ib[r * n_b..(r + 1) * n_b],
                );
            }
            Moments::from_samples(&ia, &ib, n, n_a, n_b)
        })
        .collect();

    let total = merge_tree(&batches);
    if let Some(v) = total.mean_a.iter().chain(&total.mean_b).find(|v| !(**v > 0.0)) {
        return Err(CpiError::DegenerateStatistics(format!("mean intensity {v} is not positive")));
    }

    let covs: Vec<Vec<f64>> = batches.iter().map(Moments::covariance).collect();
    let nb = covs.len() as f64;
    let se: Vec<f64> = (0..n_a * n_b)
        .map(|p| {
            let mean = covs.iter().map(|c| c[p]).sum::<f64>() / nb;
            let var = covs.iter().map(|c| (c[p] - mean).powi(2)).sum::<f64>() / (nb - 1.0);
            (var / nb).sqrt()
        })
        .collect();

    Ok(SpeckleEstimate {
        gamma: Array2::from_shape_vec((n_a, n_b), total.covariance()).expect("grid shape"),
        standard_error: Array2::from_shape_vec((n_a, n_b), se).expect("grid shape"),
        mean_intensity_a: total.mean_a,
        mean_intensity_b: total.mean_b,
        n_realizations: run.n_realizations,
        n_batches: run.n_batches,
        axis_a: run.axis_a,
        axis_b: run.axis_b,
        snapshot: GeometrySnapshot::from(geom),
    })
}

/// Monte Carlo `Γ̂` together with its distance to the quadrature `Γ` on the
/// same grid.
pub fn estimate_gamma(
    run: &SpeckleRun,
    geom: &SetupGeometry,
    source: &SourceProfile,
    mask: &ObjectMask,
    reference: &CorrelationGrid,
) -> Result<(SpeckleEstimate, ConvergenceReport)> {
    let estimate = speckle_covariance(run, geom, source, mask)?;
    let report = ConvergenceReport::against(&estimate, reference)?;
    Ok((estimate, report))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::optics::LensSpec;

    fn geom() -> SetupGeometry {
        SetupGeometry::new(0.1, 0.1, 0.2, LensSpec::FocalLength(0.05), 500e-9).unwrap()
    }

    #[test]
    fn field_is_deterministic_and_has_source_modulus() {
        let s = SourceProfile::gaussian(0.5e-3).unwrap();
        let axis = Axis::symmetric(64, 2e-3).unwrap();
        let a = sample_source_field(&s, &axis, 9, 3);
        assert_eq!(a, sample_source_field(&s, &axis, 9, 3));
        assert_ne!(a, sample_source_field(&s, &axis, 9, 4));
        assert_ne!(a, sample_source_field(&s, &axis, 10, 3));
        for (i, e) in a.iter().enumerate() {
            assert!((e.norm_sqr() - s.intensity(axis.coordinate(i))).abs() < 1e-9 * s.intensity(0.0));
        }
    }

    #[test]
    fn merge_matches_single_pass() {
        let (n_a, n_b) = (3, 2);
        let n = 10;
        let ia: Vec<f64> = (0..n * n_a).map(|v| ((v * 7) % 11) as f64).collect();
        let ib: Vec<f64> = (0..n * n_b).map(|v| ((v * 5) % 13) as f64).collect();
        let whole = Moments::from_samples(&ia, &ib, n, n_a, n_b);
        let left = Moments::from_samples(&ia[..4 * n_a], &ib[..4 * n_b], 4, n_a, n_b);
        let right = Moments::from_samples(&ia[4 * n_a..], &ib[4 * n_b..], 6, n_a, n_b);
        let merged = left.merge(&right);
        for (x, y) in whole.comoment.iter().zip(&merged.comoment) {
            assert!((x - y).abs() < 1e-10);
        }
        for (x, y) in whole.mean_a.iter().zip(&merged.mean_a) {
            assert!((x - y).abs() < 1e-12);
        }
    }

    #[test]
    fn coarse_cells_are_rejected() {
        let g = geom();
        let s = SourceProfile::gaussian(0.5e-3).unwrap();
        let m = ObjectMask::double_slit(150e-6, 50e-6).unwrap();
        let aa = Axis::symmetric(16, 300e-6).unwrap();
        let ab = Axis::symmetric(16, 400e-6).unwrap();
        let coarse = source_axis(&s, 50e-6, 6.0).unwrap();
        assert!(matches!(
            ArmKernels::new(&g, &m, &coarse, &aa, &ab),
            Err(CpiError::UnderResolved { .. })
        ));
        let fine = source_axis(&s, 5e-6, 6.0).unwrap();
        assert!(ArmKernels::new(&g, &m, &fine, &aa, &ab).is_ok());
    }

    #[test]
    fn run_validation() {
        let a = Axis::symmetric(4, 1e-4).unwrap();
        assert!(SpeckleRun::new(0, 10, 1, a, a, a).is_err());
        assert!(SpeckleRun::new(0, 3, 2, a, a, a).is_err());
        assert!(SpeckleRun::new(0, 4, 2, a, a, a).is_ok());
    }
}
