//! Pixel-budget arithmetic: microlens plenoptic cameras split `N_tot` pixels
//! per side multiplicatively between space and direction, correlation
//! plenoptic imaging splits them additively across two sensors.

use crate::error::{CpiError, Result};
use crate::optics::{ObjectMask, SetupGeometry, SourceProfile};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Scheme {
    /// Microlens array: `N_x · N_u = N_tot`.
    Plenoptic,
    /// Two sensors of common pitch: `N_x + N_u = N_tot`.
    Cpi,
}

impl Scheme {
    pub fn as_str(&self) -> &'static str {
        match self {
            Scheme::Plenoptic => "plenoptic",
            Scheme::Cpi => "cpi",
        }
    }

    pub fn admits(&self, n_tot: usize, n_x: usize, n_u: usize) -> bool {
        n_x >= 1
            && n_u >= 1
            && match self {
                Scheme::Plenoptic => n_x * n_u == n_tot,
                Scheme::Cpi => n_x + n_u == n_tot,
            }
    }
}

/// Sensor of `n_tot` pixels per side with pitch `delta`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SensorBudget {
    n_tot: usize,
    delta: f64,
    scheme: Scheme,
}

impl SensorBudget {
    pub fn new(n_tot: usize, delta: f64, scheme: Scheme) -> Result<Self> {
        if n_tot < 2 {
            return Err(CpiError::InvalidInput(format!("N_tot must be at least 2, got {n_tot}")));
        }
        if !(delta.is_finite() && delta > 0.0) {
            return Err(CpiError::InvalidInput(format!("pixel pitch must be positive, got {delta}")));
        }
        Ok(Self {
            n_tot,
            delta,
            scheme,
        })
    }

    pub fn n_tot(&self) -> usize {
        self.n_tot
    }

    pub fn delta(&self) -> f64 {
        self.delta
    }

    pub fn scheme(&self) -> Scheme {
        self.scheme
    }

    /// Sensor width `W = N_tot · δ`.
    pub fn width(&self) -> f64 {
        self.n_tot as f64 * self.delta
    }

    /// Spatial sampling pitch for `n_x` image pixels: the macropixel width
    /// `W/N_x` for plenoptic sensors, the pixel pitch `δ` for CPI.
    pub fn spatial_pitch(&self, n_x: usize) -> f64 {
        match self.scheme {
            Scheme::Plenoptic => self.width() / n_x as f64,
            Scheme::Cpi => self.delta,
        }
    }

    /// Widths `(W_x, W_u)` of the spatial and angular sensor regions.
    pub fn sensor_widths(&self, n_x: usize, n_u: usize) -> (f64, f64) {
        match self.scheme {
            // both share the full sensor
            Scheme::Plenoptic => (self.width(), self.width()),
            Scheme::Cpi => (n_x as f64 * self.delta, n_u as f64 * self.delta),
        }
    }
}

/// Integer `(N_x, N_u)` pairs admissible under a scheme, ordered by `N_x`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TradeoffCurve {
    pub scheme: Scheme,
    pub n_tot: usize,
    pub pairs: Vec<(usize, usize)>,
}

impl TradeoffCurve {
    /// `N_u` paired with `n_x`, if `n_x` is on the curve.
    pub fn angular_for(&self, n_x: usize) -> Option<usize> {
        self.pairs.iter().find(|p| p.0 == n_x).map(|p| p.1)
    }
}

pub fn tradeoff_curve(budget: &SensorBudget) -> TradeoffCurve {
    let n = budget.n_tot;
    let pairs = match budget.scheme {
        Scheme::Plenoptic => (1..=n).filter(|d| n % d == 0).map(|d| (d, n / d)).collect(),
        Scheme::Cpi => (1..n).map(|x| (x, n - x)).collect(),
    };
    TradeoffCurve {
        scheme: budget.scheme,
        n_tot: n,
        pairs,
    }
}

/// `samples` points of the continuous plenoptic hyperbola `N_u = N_tot/N_x`
/// for `N_x` evenly spaced in `[1, N_tot]`.
pub fn continuous_plenoptic(n_tot: usize, samples: usize) -> Vec<(f64, f64)> {
    let n = n_tot as f64;
    let steps = samples.max(2) - 1;
    (0..=steps)
        .map(|i| {
            let x = 1.0 + (n - 1.0) * i as f64 / steps as f64;
            (x, n / x)
        })
        .collect()
}

/// Resolution scales at the two sensors.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ResolutionLimits {
    /// `λ0 z_a / D_s`, set by the source diameter.
    pub delta_rho_a: f64,
    /// `M λ0 z_b / d`, set by the smallest object detail.
    pub delta_rho_b: f64,
}

pub fn resolution_limits(
    geom: &SetupGeometry,
    source: &SourceProfile,
    mask: &ObjectMask,
) -> Result<ResolutionLimits> {
    let d = mask
        .feature_scale()
        .ok_or(CpiError::MissingFeatureScale("object mask declares no feature scale d"))?;
    let lambda = geom.lambda0();
    Ok(ResolutionLimits {
        delta_rho_a: lambda * geom.z_a() / source.diameter(),
        delta_rho_b: geom.magnification() * lambda * geom.z_b() / d,
    })
}
