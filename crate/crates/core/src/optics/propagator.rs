//! Paraxial Fresnel propagator pieces.

use std::f64::consts::PI;

use num_complex::Complex64;

use super::geometry::SetupGeometry;
use crate::error::{CpiError, Result};

/// Quadratic phase `exp(i β ρ² / 2)`.
pub fn gaussian_phase(rho: f64, beta: f64) -> Complex64 {
    Complex64::from_polar(1.0, 0.5 * beta * rho * rho)
}

/// Fresnel prefactor `h = -i k/(2π z) · e^{ikz}` with `k = ω/c`.
pub fn fresnel_prefactor(wavenumber: f64, z: f64) -> Result<Complex64> {
    if !(z.is_finite() && z > 0.0) {
        return Err(CpiError::InvalidGeometry(format!(
            "propagation distance must be positive, got {z}"
        )));
    }
    let modulus = wavenumber / (2.0 * PI * z);
    Ok(Complex64::new(0.0, -modulus) * Complex64::from_polar(1.0, wavenumber * z))
}

/// `C_a(ρa) = h(z_a)·G(ρa)[k/z_a]`, the arm-*a* factor outside the source integral.
pub fn arm_a_prefactor(geom: &SetupGeometry, rho_a: f64) -> Complex64 {
    let k = geom.wavenumber();
    let h = fresnel_prefactor(k, geom.z_a()).expect("geometry distances are positive");
    h * gaussian_phase(rho_a, k / geom.z_a())
}

/// `C_b(ρb)`, the arm-*b* factor left after the lens-plane integral has
/// been carried out for conjugate `S_o`, `S_i`.
pub fn arm_b_prefactor(geom: &SetupGeometry, rho_b: f64) -> Complex64 {
    let k = geom.wavenumber();
    let (z_b, s_o, s_i) = (geom.z_b(), geom.s_o(), geom.s_i());
    let h_b = fresnel_prefactor(k, z_b).expect("geometry distances are positive");
    let h_i = fresnel_prefactor(k, s_i).expect("geometry distances are positive");
    let curvature = k / s_i * (1.0 - (s_o - z_b) / (geom.magnification() * z_b));
    h_b * h_i
        * (s_o / z_b)
        * Complex64::from_polar(1.0, k * (s_o - z_b))
        * gaussian_phase(rho_b, curvature)
}

/// `K_a = |2π C_a|²`, independent of `ρa`.
pub fn intensity_scale_a(geom: &SetupGeometry) -> f64 {
    let k = geom.wavenumber();
    (k / geom.z_a()).powi(2)
}

/// `K_b = |2π C_b|²`, independent of `ρb`.
pub fn intensity_scale_b(geom: &SetupGeometry) -> f64 {
    let k = geom.wavenumber();
    let hb = k / (2.0 * PI * geom.z_b());
    let hi = k / (2.0 * PI * geom.s_i());
    (2.0 * PI * hb * hi * geom.s_o() / geom.z_b()).powi(2)
}
