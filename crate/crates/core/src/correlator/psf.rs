//! Closed-form point-spread functions for a Gaussian source.
//!
//! With `u = kσ²(1 − α)/z_b` and `x = ρo − αρa`:
//!
//! ```text
//! coherent   = exp(−½ (kσ/z_b)² x² / (1 − i u))
//! incoherent = exp(−(kσ/z_b)² x² / (1 + u²)) = |coherent|²
//! ```

use num_complex::Complex64;

use crate::optics::SetupGeometry;

/// `exp(−½(kσ/z_b)²(ρo − αρa)² / (1 − i u))`.
pub fn coherent_psf(geom: &SetupGeometry, sigma: f64, rho_o: f64, rho_a: f64) -> Complex64 {
    let p = PsfEval::new(geom, sigma);
    let x = rho_o - p.alpha * rho_a;
    let denom = Complex64::new(1.0, -p.defocus);
    (-0.5 * p.focal_rate * p.focal_rate * x * x / denom).exp()
}

/// `exp(−(kσ/z_b)²(ρo − αρa)² / (1 + u²))`, in `(0, 1]`.
pub fn incoherent_psf(geom: &SetupGeometry, sigma: f64, rho_o: f64, rho_a: f64) -> f64 {
    let p = PsfEval::new(geom, sigma);
    let x = rho_o - p.alpha * rho_a;
    (-(p.focal_rate * x).powi(2) / p.incoherent_denominator()).exp()
}

/// Widths and denominators of the Gaussian-source PSFs.
///
/// The incoherent PSF is `exp(−x²/w_inc²)`. The coherent PSF is
/// `exp(−x²/2V)` with complex variance `V = (1 − i u)/(kσ/z_b)²`, and
/// `w_coh = |V|^½`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PsfEval {
    pub alpha: f64,
    /// `kσ/z_b`.
    pub focal_rate: f64,
    /// `u = kσ²(1 − α)/z_b`.
    pub defocus: f64,
    pub width_coherent: f64,
    pub width_incoherent: f64,
}

impl PsfEval {
    pub fn new(geom: &SetupGeometry, sigma: f64) -> Self {
        let k = geom.wavenumber();
        let z_b = geom.z_b();
        let alpha = geom.alpha();
        let focal_rate = k * sigma / z_b;
        let defocus = k * sigma * sigma * (1.0 - alpha) / z_b;
        let u2 = defocus * defocus;
        Self {
            alpha,
            focal_rate,
            defocus,
            width_coherent: (1.0 + u2).powf(0.25) / focal_rate,
            width_incoherent: (1.0 + u2).sqrt() / focal_rate,
        }
    }

    /// `1 − i u`.
    pub fn coherent_denominator(&self) -> Complex64 {
        Complex64::new(1.0, -self.defocus)
    }

    /// `1 + u²`.
    pub fn incoherent_denominator(&self) -> f64 {
        1.0 + self.defocus * self.defocus
    }

    /// Standard deviation of the incoherent PSF read as a Gaussian in `ρo`.
    pub fn incoherent_std(&self) -> f64 {
        self.width_incoherent / std::f64::consts::SQRT_2
    }

    /// Large-`u` limit of the incoherent width, `σ|1 − α|`.
    pub fn geometric_width(sigma: f64, alpha: f64) -> f64 {
        sigma * (1.0 - alpha).abs()
    }

    /// Large-`u` limit of the coherent width, `√(z_b|1 − α|/k)`.
    pub fn coherent_limit(geom: &SetupGeometry) -> f64 {
        (geom.z_b() * (1.0 - geom.alpha()).abs() / geom.wavenumber()).sqrt()
    }
}
