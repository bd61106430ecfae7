use std::f64::consts::PI;

use crate::error::{CpiError, Result};

/// Which member of the thin-lens pair was supplied; the other is solved.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum LensSpec {
    /// Lens-to-sensor distance `S_i`.
    ImageDistance(f64),
    /// Focal length `F`.
    FocalLength(f64),
}

/// Distances, wavelength and lens of the two-arm setup.
///
/// Arm *a*: source → sensor D_a at optical distance `z_a`.
/// Arm *b*: source → object at `z_b` → thin lens at `S_o` → sensor D_b at
/// `S_i` behind the lens. `S_o` and `S_i` are always exactly conjugate: the
/// missing member of the thin-lens equation is computed on construction.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SetupGeometry {
    z_a: f64,
    z_b: f64,
    s_o: f64,
    s_i: f64,
    focal: f64,
    lambda0: f64,
    lens: LensSpec,
}

fn positive(name: &str, value: f64) -> Result<()> {
    if value.is_finite() && value > 0.0 {
        Ok(())
    } else {
        Err(CpiError::InvalidGeometry(format!(
            "{name} must be a positive finite length, got {value}"
        )))
    }
}

impl SetupGeometry {
    pub fn new(z_a: f64, z_b: f64, s_o: f64, lens: LensSpec, lambda0: f64) -> Result<Self> {
        positive("z_a", z_a)?;
        positive("z_b", z_b)?;
        positive("S_o", s_o)?;
        positive("lambda0", lambda0)?;
        if z_b >= s_o {
            return Err(CpiError::InvalidGeometry(format!(
                "object distance z_b = {z_b} must be smaller than the lens distance S_o = {s_o}"
            )));
        }
        let (s_i, focal) = match lens {
            LensSpec::FocalLength(f) => {
                positive("F", f)?;
                if s_o <= f {
                    return Err(CpiError::InvalidGeometry(format!(
                        "S_o = {s_o} does not exceed the focal length F = {f}: no real image"
                    )));
                }
                (f * s_o / (s_o - f), f)
            }
            LensSpec::ImageDistance(s_i) => {
                positive("S_i", s_i)?;
                (s_i, s_o * s_i / (s_o + s_i))
            }
        };
        if !(s_i.is_finite() && focal.is_finite()) {
            return Err(CpiError::InvalidGeometry(
                "thin-lens equation has no finite solution".into(),
            ));
        }
        Ok(Self {
            z_a,
            z_b,
            s_o,
            s_i,
            focal,
            lambda0,
            lens,
        })
    }

    /// Same geometry with a different source-to-D_a distance.
    pub fn with_z_a(&self, z_a: f64) -> Result<Self> {
        Self::new(z_a, self.z_b, self.s_o, self.lens, self.lambda0)
    }

    /// Same geometry with a different object distance.
    pub fn with_z_b(&self, z_b: f64) -> Result<Self> {
        Self::new(self.z_a, z_b, self.s_o, self.lens, self.lambda0)
    }

    pub fn with_wavelength(&self, lambda0: f64) -> Result<Self> {
        Self::new(self.z_a, self.z_b, self.s_o, self.lens, lambda0)
    }

    /// Rebuilds from the stored inputs; reproduces `self` exactly.
    pub fn rebuild(&self) -> Result<Self> {
        Self::new(self.z_a, self.z_b, self.s_o, self.lens, self.lambda0)
    }

    pub fn z_a(&self) -> f64 {
        self.z_a
    }

    pub fn z_b(&self) -> f64 {
        self.z_b
    }

    pub fn s_o(&self) -> f64 {
        self.s_o
    }

    pub fn s_i(&self) -> f64 {
        self.s_i
    }

    pub fn focal_length(&self) -> f64 {
        self.focal
    }

    pub fn lambda0(&self) -> f64 {
        self.lambda0
    }

    pub fn lens(&self) -> LensSpec {
        self.lens
    }

    /// Central wavenumber `ω0/c = 2π/λ0` in rad/m.
    pub fn wavenumber(&self) -> f64 {
        2.0 * PI / self.lambda0
    }

    /// Lens magnification `M = S_i/S_o`.
    pub fn magnification(&self) -> f64 {
        self.s_i / self.s_o
    }

    /// Defocus parameter `α = z_b/z_a`; 1 is the focused configuration.
    pub fn alpha(&self) -> f64 {
        self.z_b / self.z_a
    }

    /// Residual of the thin-lens equation relative to `1/F`.
    pub fn conjugation_residual(&self) -> f64 {
        ((1.0 / self.s_i + 1.0 / self.s_o - 1.0 / self.focal) * self.focal).abs()
    }
}
