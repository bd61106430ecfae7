use std::f64::consts::PI;

use crate::error::{CpiError, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SourceKind {
    Gaussian,
    TopHat,
}

/// Intensity profile `F(ρs)` of the chaotic source, normalized to unit area.
///
/// The effective diameter `D_s` is `2σ` for a Gaussian and the full width
/// for a top-hat, so a Gaussian with `σ = W/2` and a top-hat of width `W`
/// report the same diameter.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SourceProfile {
    kind: SourceKind,
    // σ for Gaussian sources, full width for top-hat sources.
    scale: f64,
}

impl SourceProfile {
    pub fn gaussian(sigma: f64) -> Result<Self> {
        if !(sigma.is_finite() && sigma > 0.0) {
            return Err(CpiError::InvalidInput(format!(
                "Gaussian source width must be positive, got {sigma}"
            )));
        }
        Ok(Self {
            kind: SourceKind::Gaussian,
            scale: sigma,
        })
    }

    pub fn top_hat(width: f64) -> Result<Self> {
        if !(width.is_finite() && width > 0.0) {
            return Err(CpiError::InvalidInput(format!(
                "top-hat source width must be positive, got {width}"
            )));
        }
        Ok(Self {
            kind: SourceKind::TopHat,
            scale: width,
        })
    }

    pub fn kind(&self) -> SourceKind {
        self.kind
    }

    /// RMS half-width of a Gaussian source; `None` for top-hats.
    pub fn sigma(&self) -> Option<f64> {
        match self.kind {
            SourceKind::Gaussian => Some(self.scale),
            SourceKind::TopHat => None,
        }
    }

    /// Effective diameter `D_s`.
    pub fn diameter(&self) -> f64 {
        match self.kind {
            SourceKind::Gaussian => 2.0 * self.scale,
            SourceKind::TopHat => self.scale,
        }
    }

    /// Rescales the profile to a new effective diameter, keeping its kind.
    pub fn with_diameter(&self, diameter: f64) -> Result<Self> {
        match self.kind {
            SourceKind::Gaussian => Self::gaussian(diameter / 2.0),
            SourceKind::TopHat => Self::top_hat(diameter),
        }
    }

    /// `F(ρs)`.
    pub fn intensity(&self, rho: f64) -> f64 {
        match self.kind {
            SourceKind::Gaussian => {
                let s = self.scale;
                (-(rho * rho) / (2.0 * s * s)).exp() / (2.0 * PI * s * s).sqrt()
            }
            SourceKind::TopHat => {
                if rho.abs() <= 0.5 * self.scale {
                    1.0 / self.scale
                } else {
                    0.0
                }
            }
        }
    }

    /// `f(ρs) = sqrt(F(ρs))`; the amplitude profile is taken real.
    pub fn amplitude(&self, rho: f64) -> f64 {
        self.intensity(rho).sqrt()
    }

    /// Half-width of the integration domain. Gaussian tails are cut at
    /// `span` standard deviations; top-hats use their exact support.
    pub fn integration_half_width(&self, span: f64) -> f64 {
        match self.kind {
            SourceKind::Gaussian => span * self.scale,
            SourceKind::TopHat => 0.5 * self.scale,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn trapezoid_area(src: &SourceProfile, half: f64, n: usize) -> f64 {
        let h = 2.0 * half / (n - 1) as f64;
        (0..n)
            .map(|i| {
                let w = if i == 0 || i == n - 1 { 0.5 * h } else { h };
                w * src.intensity(-half + i as f64 * h)
            })
            .sum()
    }

    #[test]
    fn gaussian_is_unit_area() {
        for sigma in [1e-5, 5e-4, 0.02] {
            let s = SourceProfile::gaussian(sigma).unwrap();
            let area = trapezoid_area(&s, 12.0 * sigma, 4001);
            assert!((area - 1.0).abs() < 1e-9, "sigma={sigma} area={area}");
        }
    }

    #[test]
    fn top_hat_is_unit_area() {
        let s = SourceProfile::top_hat(1e-3).unwrap();
        let area = trapezoid_area(&s, 0.5e-3, 1001);
        // trapezoid is exact on a constant once the nodes sit on the edges
        assert!((area - 1.0).abs() < 1e-12);
        assert_eq!(s.intensity(0.51e-3), 0.0);
    }

    #[test]
    fn gaussian_peak_value() {
        let s = SourceProfile::gaussian(0.5e-3).unwrap();
        let expected = 1.0 / (2.0 * PI * 0.25e-6_f64).sqrt();
        assert!((s.intensity(0.0) - expected).abs() < 1e-9 * expected);
        assert!((s.amplitude(0.0).powi(2) - expected).abs() < 1e-9 * expected);
    }

    #[test]
    fn equal_diameters_for_matching_kinds() {
        let g = SourceProfile::gaussian(0.5e-3).unwrap();
        let t = SourceProfile::top_hat(1e-3).unwrap();
        assert_eq!(g.diameter(), t.diameter());
        let g2 = g.with_diameter(3e-3).unwrap();
        assert_eq!(g2.sigma(), Some(1.5e-3));
        assert!((trapezoid_area(&g2, 18e-3, 8001) - 1.0).abs() < 1e-9);
    }

    #[test]
    fn rejects_bad_widths() {
        assert!(SourceProfile::gaussian(0.0).is_err());
        assert!(SourceProfile::top_hat(-1.0).is_err());
        assert!(SourceProfile::gaussian(f64::INFINITY).is_err());
    }
}
