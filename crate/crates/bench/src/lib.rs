//! Shared fixtures for the benchmarks.

use cpi_core::{Axis, LensSpec, ObjectMask, SetupGeometry, SourceProfile};

/// Double slit (a = 50 µm, s = 150 µm) lit by a Gaussian source of
/// σ = 0.5 mm at λ0 = 500 nm, with the object at `z_b` and `z_a = 0.1 m`.
pub struct Fixture {
    pub geom: SetupGeometry,
    pub source: SourceProfile,
    pub mask: ObjectMask,
    pub axis_a: Axis,
    pub axis_b: Axis,
}

pub fn double_slit(z_b: f64, n_a: usize, n_b: usize) -> Fixture {
    let geom = SetupGeometry::new(0.1, z_b, 0.2, LensSpec::FocalLength(0.05), 500e-9)
        .expect("fixture geometry is valid");
    let m = geom.magnification();
    Fixture {
        geom,
        source: SourceProfile::gaussian(0.5e-3).expect("positive width"),
        mask: ObjectMask::double_slit(150e-6, 50e-6).expect("valid slits"),
        axis_a: Axis::symmetric(n_a, 200e-6).expect("valid axis"),
        axis_b: Axis::symmetric(n_b, 2.5 * m * 0.5e-3).expect("valid axis"),
    }
}
