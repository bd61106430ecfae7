#![allow(dead_code)]

use cpi_core::{Axis, LensSpec, ObjectMask, SetupGeometry, SourceProfile};

pub const LAMBDA: f64 = 500e-9;
pub const SIGMA: f64 = 0.5e-3;
pub const SLIT_WIDTH: f64 = 50e-6;
pub const SLIT_SEPARATION: f64 = 150e-6;

/// Reference bench: z_a = 0.1 m, S_o = 0.2 m, F = 0.05 m (M = 1/3).
pub fn geometry(z_b: f64) -> SetupGeometry {
    SetupGeometry::new(0.1, z_b, 0.2, LensSpec::FocalLength(0.05), LAMBDA).unwrap()
}

pub fn gaussian() -> SourceProfile {
    SourceProfile::gaussian(SIGMA).unwrap()
}

pub fn double_slit() -> ObjectMask {
    ObjectMask::double_slit(SLIT_SEPARATION, SLIT_WIDTH).unwrap()
}

/// ρb axis covering ±`span`·M·σ.
pub fn axis_b(geom: &SetupGeometry, sigma: f64, n: usize, span: f64) -> Axis {
    Axis::symmetric(n, span * geom.magnification() * sigma).unwrap()
}

/// Composite trapezoid of `f` on `[lo, hi]` with `n` nodes.
pub fn trapezoid(lo: f64, hi: f64, n: usize, f: impl Fn(f64) -> f64) -> f64 {
    let h = (hi - lo) / (n - 1) as f64;
    (0..n)
        .map(|i| {
            let w = if i == 0 || i == n - 1 { 0.5 } else { 1.0 };
            w * h * f(lo + i as f64 * h)
        })
        .sum()
}

/// Squared modulus of the Fourier transform of a unit-area Gaussian.
pub fn gaussian_ft_sq(q: f64, sigma: f64) -> f64 {
    (-(q * sigma).powi(2)).exp()
}

/// Refocus demo bench: σ = 0.75 mm, object at z_b = 5 mm, α = 0.8, so the
/// slit Fresnel number a²/(λ0 z_b (1 − α)) is 5.
pub const DEMO_SIGMA: f64 = 0.75e-3;
pub const DEMO_Z_B: f64 = 5e-3;

pub fn demo_geometry(alpha: f64) -> SetupGeometry {
    SetupGeometry::new(DEMO_Z_B / alpha, DEMO_Z_B, 0.2, LensSpec::FocalLength(0.05), LAMBDA).unwrap()
}

pub fn demo_source() -> SourceProfile {
    SourceProfile::gaussian(DEMO_SIGMA).unwrap()
}

/// Acquisition axis wide enough that every output sample within
/// `out_half` refocuses onto acquired data for |ρb| ≤ `b_span`·M·σ.
pub fn acquisition_axis(alpha: f64, out_half: f64, sigma: f64, b_span: f64, step: f64) -> Axis {
    let half = out_half / alpha + (1.0 / alpha - 1.0).abs() * b_span * sigma + 2.0 * step;
    let n = (2.0 * half / step).round() as usize + 1;
    Axis::symmetric(n, half).unwrap()
}

/// Axis of spacing close to `step` spanning ±`half`.
pub fn axis_with_step(half: f64, step: f64) -> Axis {
    Axis::symmetric((2.0 * half / step).round() as usize + 1, half).unwrap()
}
