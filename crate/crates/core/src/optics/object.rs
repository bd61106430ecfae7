use num_complex::Complex64;

use crate::error::{CpiError, Result};

/// Transmission profile of the object in arm *b*.
#[derive(Debug, Clone, PartialEq)]
pub enum MaskShape {
    /// Two hard-edged slits of equal `width`, centred at `±separation/2`.
    DoubleSlit { separation: f64, width: f64 },
    /// One hard-edged slit.
    SingleSlit { center: f64, width: f64 },
    /// Samples on a uniform grid starting at `start`, linearly interpolated
    /// between nodes and zero outside `[start, start + (n-1)·step]`.
    Sampled {
        start: f64,
        step: f64,
        values: Vec<Complex64>,
    },
}

/// Object transmission `A(ρo)` with compact support and `|A| ≤ 1`.
#[derive(Debug, Clone, PartialEq)]
pub struct ObjectMask {
    shape: MaskShape,
    feature_scale: Option<f64>,
}

fn sinc(x: f64) -> f64 {
    if x.abs() < 1e-6 {
        1.0 - x * x / 6.0
    } else {
        x.sin() / x
    }
}

/// `∫_0^h (v0 + (v1 - v0)·t/h)·e^{-iκt} dt`.
fn linear_segment_transform(v0: Complex64, v1: Complex64, h: f64, kappa: f64) -> Complex64 {
    let x = kappa * h;
    // moments ∫_0^h t^m e^{-iκt} dt for m = 0, 1
    let (m0, m1) = if x.abs() < 1e-2 {
        let z = Complex64::new(0.0, -x);
        let mut term = Complex64::new(1.0, 0.0);
        let mut s0 = Complex64::new(0.0, 0.0);
        let mut s1 = Complex64::new(0.0, 0.0);
        let mut fact = 1.0;
        for n in 0..7 {
            if n > 0 {
                term *= z;
                fact *= n as f64;
            }
            s0 += term / (fact * (n as f64 + 1.0));
            s1 += term / (fact * (n as f64 + 2.0));
        }
        (s0 * h, s1 * h * h)
    } else {
        let ik = Complex64::new(0.0, kappa);
        let e = Complex64::from_polar(1.0, -x);
        let m0 = (Complex64::new(1.0, 0.0) - e) / ik;
        let m1 = (m0 - e * h) / ik;
        (m0, m1)
    };
    v0 * m0 + (v1 - v0) * (m1 / h)
}

impl ObjectMask {
    pub fn double_slit(separation: f64, width: f64) -> Result<Self> {
        if !(width.is_finite() && width > 0.0) {
            return Err(CpiError::InvalidInput(format!("slit width must be positive, got {width}")));
        }
        if !(separation.is_finite() && separation > width) {
            return Err(CpiError::InvalidInput(format!(
                "slit separation {separation} must exceed the slit width {width}"
            )));
        }
        Ok(Self {
            shape: MaskShape::DoubleSlit { separation, width },
            feature_scale: Some(width),
        })
    }

    pub fn single_slit(center: f64, width: f64) -> Result<Self> {
        if !(width.is_finite() && width > 0.0) || !center.is_finite() {
            return Err(CpiError::InvalidInput(format!(
                "single slit needs a finite centre and positive width, got ({center}, {width})"
            )));
        }
        Ok(Self {
            shape: MaskShape::SingleSlit { center, width },
            feature_scale: Some(width),
        })
    }

    /// Sampled transmission. `feature_scale` is the size of the smallest
    /// detail; it is only needed for resolution estimates.
    pub fn sampled(
        start: f64,
        step: f64,
        values: Vec<Complex64>,
        feature_scale: Option<f64>,
    ) -> Result<Self> {
        if values.len() < 2 {
            return Err(CpiError::InvalidInput("sampled mask needs at least two samples".into()));
        }
        if !(step.is_finite() && step > 0.0) || !start.is_finite() {
            return Err(CpiError::InvalidInput(format!(
                "sampled mask needs a finite start and positive step, got ({start}, {step})"
            )));
        }
        if let Some(i) = values.iter().position(|v| !v.is_finite() || v.norm() > 1.0 + 1e-12) {
            return Err(CpiError::InvalidInput(format!(
                "sample {i} has |A| > 1 or is not finite: {}",
                values[i]
            )));
        }
        if let Some(d) = feature_scale {
            if !(d.is_finite() && d > 0.0) {
                return Err(CpiError::InvalidInput(format!("feature scale must be positive, got {d}")));
            }
        }
        Ok(Self {
            shape: MaskShape::Sampled {
                start,
                step,
                values,
            },
            feature_scale,
        })
    }

    pub fn shape(&self) -> &MaskShape {
        &self.shape
    }

    /// Size `d` of the smallest object detail, if known.
    pub fn feature_scale(&self) -> Option<f64> {
        self.feature_scale
    }

    /// Interval outside of which `A` vanishes.
    pub fn support(&self) -> (f64, f64) {
        match &self.shape {
            MaskShape::DoubleSlit { separation, width } => {
                let h = 0.5 * (separation + width);
                (-h, h)
            }
            MaskShape::SingleSlit { center, width } => (center - 0.5 * width, center + 0.5 * width),
            MaskShape::Sampled {
                start,
                step,
                values,
            } => (*start, start + step * (values.len() - 1) as f64),
        }
    }

    /// Largest `|ρo|` inside the support.
    pub fn support_half_width(&self) -> f64 {
        let (lo, hi) = self.support();
        lo.abs().max(hi.abs())
    }

    /// `A(ρo)`.
    pub fn transmission(&self, rho: f64) -> Complex64 {
        let one = Complex64::new(1.0, 0.0);
        let zero = Complex64::new(0.0, 0.0);
        match &self.shape {
            MaskShape::DoubleSlit { separation, width } => {
                let (c, h) = (0.5 * separation, 0.5 * width);
                if (rho - c).abs() <= h || (rho + c).abs() <= h {
                    one
                } else {
                    zero
                }
            }
            MaskShape::SingleSlit { center, width } => {
                if (rho - center).abs() <= 0.5 * width {
                    one
                } else {
                    zero
                }
            }
            MaskShape::Sampled {
                start,
                step,
                values,
            } => {
                let t = (rho - start) / step;
                let last = (values.len() - 1) as f64;
                if !(0.0..=last).contains(&t) {
                    return zero;
                }
                let i = (t.floor() as usize).min(values.len() - 2);
                let frac = t - i as f64;
                values[i] * (1.0 - frac) + values[i + 1] * frac
            }
        }
    }

    /// Continuous Fourier transform `Ã(κ) = ∫ A(ρo) e^{-iκρo} dρo`,
    /// evaluated exactly for every mask kind.
    pub fn fourier(&self, kappa: f64) -> Complex64 {
        match &self.shape {
            MaskShape::DoubleSlit { separation, width } => {
                let v = 2.0 * width * sinc(0.5 * kappa * width) * (0.5 * kappa * separation).cos();
                Complex64::new(v, 0.0)
            }
            MaskShape::SingleSlit { center, width } => {
                Complex64::from_polar(width * sinc(0.5 * kappa * width), -kappa * center)
            }
            MaskShape::Sampled {
                start,
                step,
                values,
            } => values
                .windows(2)
                .enumerate()
                .map(|(i, w)| {
                    let x0 = start + step * i as f64;
                    Complex64::from_polar(1.0, -kappa * x0)
                        * linear_segment_transform(w[0], w[1], *step, kappa)
                })
                .sum(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn brute_fourier(mask: &ObjectMask, kappa: f64, n: usize) -> Complex64 {
        let (lo, hi) = mask.support();
        let h = (hi - lo) / n as f64;
        // midpoint rule, fine enough to resolve every edge to O(h)
        (0..n)
            .map(|i| {
                let x = lo + (i as f64 + 0.5) * h;
                mask.transmission(x) * Complex64::from_polar(h, -kappa * x)
            })
            .sum()
    }

    #[test]
    fn double_slit_samples() {
        let m = ObjectMask::double_slit(150e-6, 50e-6).unwrap();
        assert_eq!(m.transmission(75e-6), Complex64::new(1.0, 0.0));
        assert_eq!(m.transmission(-75e-6), Complex64::new(1.0, 0.0));
        assert_eq!(m.transmission(0.0), Complex64::new(0.0, 0.0));
        assert_eq!(m.transmission(200e-6), Complex64::new(0.0, 0.0));
        let (lo, hi) = m.support();
        assert!((lo + 100e-6).abs() < 1e-18 && (hi - 100e-6).abs() < 1e-18);
        assert_eq!(m.feature_scale(), Some(50e-6));
    }

    #[test]
    fn slit_transforms_match_brute_force() {
        let masks = [
            ObjectMask::double_slit(150e-6, 50e-6).unwrap(),
            ObjectMask::single_slit(20e-6, 30e-6).unwrap(),
        ];
        for m in &masks {
            for kappa in [0.0, 1.0e3, 3.7e4, -9.1e4, 2.2e5] {
                let exact = m.fourier(kappa);
                let brute = brute_fourier(m, kappa, 400_000);
                assert!(
                    (exact - brute).norm() < 1e-5 * m.fourier(0.0).norm(),
                    "kappa={kappa} exact={exact} brute={brute}"
                );
            }
        }
    }

    #[test]
    fn sampled_transform_matches_brute_force() {
        let values: Vec<Complex64> = (0..9)
            .map(|i| Complex64::from_polar(0.2 + 0.1 * i as f64, 0.3 * i as f64))
            .collect();
        let m = ObjectMask::sampled(-40e-6, 10e-6, values, None).unwrap();
        for kappa in [0.0, 50.0, 2.0e4, -1.5e5, 4.0e5] {
            let exact = m.fourier(kappa);
            let brute = brute_fourier(&m, kappa, 400_000);
            assert!((exact - brute).norm() < 1e-9 * 80e-6, "kappa={kappa}");
        }
    }

    #[test]
    fn sampled_interpolates_linearly() {
        let v = vec![Complex64::new(0.0, 0.0), Complex64::new(1.0, 0.0), Complex64::new(0.5, 0.0)];
        let m = ObjectMask::sampled(0.0, 1e-6, v, None).unwrap();
        assert!((m.transmission(0.5e-6).re - 0.5).abs() < 1e-12);
        assert!((m.transmission(1.5e-6).re - 0.75).abs() < 1e-12);
        assert_eq!(m.transmission(2.5e-6), Complex64::new(0.0, 0.0));
        assert_eq!(m.transmission(-1e-9), Complex64::new(0.0, 0.0));
    }

    #[test]
    fn rejects_invalid_masks() {
        assert!(ObjectMask::double_slit(40e-6, 50e-6).is_err());
        assert!(ObjectMask::single_slit(0.0, 0.0).is_err());
        let too_bright = vec![Complex64::new(1.5, 0.0); 3];
        assert!(ObjectMask::sampled(0.0, 1e-6, too_bright, None).is_err());
        assert!(ObjectMask::sampled(0.0, 1e-6, vec![Complex64::new(1.0, 0.0)], None).is_err());
    }
}
