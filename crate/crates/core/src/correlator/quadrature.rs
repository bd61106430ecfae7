use std::f64::consts::FRAC_PI_2;

use crate::error::{CpiError, Result};
use crate::optics::{Axis, ObjectMask, SetupGeometry, SourceKind, SourceProfile};

/// Largest phase change allowed between adjacent source nodes.
pub const MAX_PHASE_STEP: f64 = FRAC_PI_2;

// Automatic node counts aim for half the allowed phase step.
const AUTO_PHASE_STEP: f64 = 0.5 * MAX_PHASE_STEP;
const MIN_NODES: usize = 16;
const MIN_GAUSSIAN_SPAN: f64 = 5.0;

/// Trapezoid discretization of the source plane.
///
/// `source_span` is the integration half-width in units of σ for Gaussian
/// sources; top-hat sources are integrated over their exact support and
/// ignore it.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadratureSpec {
    n_source: usize,
    source_span: f64,
}

impl QuadratureSpec {
    pub fn new(n_source: usize, source_span: f64) -> Result<Self> {
        if n_source < MIN_NODES {
            return Err(CpiError::InvalidInput(format!(
                "quadrature needs at least {MIN_NODES} source nodes, got {n_source}"
            )));
        }
        if !(source_span.is_finite() && source_span >= MIN_GAUSSIAN_SPAN) {
            return Err(CpiError::InvalidInput(format!(
                "source span must be at least {MIN_GAUSSIAN_SPAN} sigma, got {source_span}"
            )));
        }
        Ok(Self {
            n_source,
            source_span,
        })
    }

    /// Smallest node count that keeps the phase step near π/4 for `Γ` on
    /// the given grid.
    pub fn auto(
        geom: &SetupGeometry,
        source: &SourceProfile,
        mask: &ObjectMask,
        axis_a: &Axis,
        source_span: f64,
    ) -> Result<Self> {
        let probe = Self::new(MIN_NODES, source_span)?;
        let width = 2.0 * probe.half_width(source);
        let rate = gamma_phase_rate(geom, probe.half_width(source), mask, axis_a);
        let n = (width * rate / AUTO_PHASE_STEP).ceil() as usize + 1;
        Self::new(n.max(MIN_NODES), source_span)
    }

    pub fn n_source(&self) -> usize {
        self.n_source
    }

    pub fn source_span(&self) -> f64 {
        self.source_span
    }

    /// Same span with the node count doubled (one extra node keeps the
    /// original nodes on the refined grid).
    pub fn refined(&self) -> Self {
        Self {
            n_source: 2 * self.n_source - 1,
            source_span: self.source_span,
        }
    }

    pub fn half_width(&self, source: &SourceProfile) -> f64 {
        source.integration_half_width(self.source_span)
    }

    pub fn step(&self, source: &SourceProfile) -> f64 {
        2.0 * self.half_width(source) / (self.n_source - 1) as f64
    }

    /// Trapezoid nodes and weights over the source integration domain.
    pub fn source_nodes(&self, source: &SourceProfile) -> (Vec<f64>, Vec<f64>) {
        let half = self.half_width(source);
        let axis = Axis::symmetric(self.n_source, half).expect("node count is at least 16");
        let mut nodes = axis.coordinates();
        if source.kind() == SourceKind::TopHat {
            // keep the end nodes exactly on the support edges
            nodes[0] = -half;
            nodes[self.n_source - 1] = half;
        }
        (nodes, axis.trapezoid_weights())
    }

    /// Phase guard for `Γ`: adjacent nodes must differ by at most π/2 in
    /// the full integrand phase, over the whole object support and `ρa` axis.
    pub fn check_gamma(
        &self,
        geom: &SetupGeometry,
        source: &SourceProfile,
        mask: &ObjectMask,
        axis_a: &Axis,
    ) -> Result<()> {
        let rate = gamma_phase_rate(geom, self.half_width(source), mask, axis_a);
        self.check("source quadrature of the correlation", rate * self.step(source))
    }

    /// Nyquist guard for `I_b`: `|Ã|²` oscillates in `ρs` with at most the
    /// object support length times `k/z_b`.
    pub fn check_intensity_b(
        &self,
        geom: &SetupGeometry,
        source: &SourceProfile,
        mask: &ObjectMask,
    ) -> Result<()> {
        let (lo, hi) = mask.support();
        let rate = geom.wavenumber() / geom.z_b() * (hi - lo);
        self.check("source quadrature of the object-arm intensity", rate * self.step(source))
    }

    fn check(&self, what: &'static str, increment: f64) -> Result<()> {
        if increment > MAX_PHASE_STEP {
            Err(CpiError::UnderResolved {
                what,
                increment,
                limit: MAX_PHASE_STEP,
            })
        } else {
            Ok(())
        }
    }
}

/// Upper bound of `|∂φ/∂ρs|` for the correlation integrand,
/// `k[(1/z_b − 1/z_a)ρs − ρo/z_b + ρa/z_a]`, over its domain.
pub(crate) fn gamma_phase_rate(geom: &SetupGeometry, source_half: f64, mask: &ObjectMask, axis_a: &Axis) -> f64 {
    let k = geom.wavenumber();
    let (z_a, z_b) = (geom.z_a(), geom.z_b());
    let curvature = (1.0 / z_b - 1.0 / z_a).abs() * source_half;
    k * (curvature + mask.support_half_width() / z_b + axis_a.max_abs() / z_a)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::optics::LensSpec;

    fn setup() -> (SetupGeometry, SourceProfile, ObjectMask, Axis) {
        (
            SetupGeometry::new(0.1, 0.08, 0.2, LensSpec::FocalLength(0.05), 500e-9).unwrap(),
            SourceProfile::gaussian(0.5e-3).unwrap(),
            ObjectMask::double_slit(150e-6, 50e-6).unwrap(),
            Axis::symmetric(64, 300e-6).unwrap(),
        )
    }

    #[test]
    fn rejects_small_specs() {
        assert!(QuadratureSpec::new(15, 6.0).is_err());
        assert!(QuadratureSpec::new(64, 4.0).is_err());
        assert!(QuadratureSpec::new(16, 5.0).is_ok());
    }

    #[test]
    fn auto_spec_passes_guard_and_coarse_fails() {
        let (g, s, m, a) = setup();
        let q = QuadratureSpec::auto(&g, &s, &m, &a, 6.0).unwrap();
        assert!(q.check_gamma(&g, &s, &m, &a).is_ok());
        let coarse = QuadratureSpec::new(q.n_source() / 3, 6.0).unwrap();
        assert!(matches!(
            coarse.check_gamma(&g, &s, &m, &a),
            Err(CpiError::UnderResolved { .. })
        ));
    }

    #[test]
    fn refined_keeps_nodes() {
        let s = SourceProfile::gaussian(1e-3).unwrap();
        let q = QuadratureSpec::new(33, 6.0).unwrap();
        let (coarse, _) = q.source_nodes(&s);
        let (fine, _) = q.refined().source_nodes(&s);
        for (i, x) in coarse.iter().enumerate() {
            assert!((fine[2 * i] - x).abs() < 1e-15);
        }
    }

    #[test]
    fn weights_integrate_the_source() {
        let s = SourceProfile::gaussian(0.5e-3).unwrap();
        let (nodes, w) = QuadratureSpec::new(401, 8.0).unwrap().source_nodes(&s);
        let area: f64 = nodes.iter().zip(&w).map(|(x, w)| w * s.intensity(*x)).sum();
        assert!((area - 1.0).abs() < 1e-9);
        let t = SourceProfile::top_hat(1e-3).unwrap();
        let (nodes, w) = QuadratureSpec::new(101, 5.0).unwrap().source_nodes(&t);
        let area: f64 = nodes.iter().zip(&w).map(|(x, w)| w * t.intensity(*x)).sum();
        assert!((area - 1.0).abs() < 1e-12);
    }
}
