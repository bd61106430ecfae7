//! Image metrics used to compare correlation grids and images.

use crate::error::{CpiError, Result};
use crate::optics::{Axis, SampledImage};

/// `mean|a − b| / max(b)`.
pub fn normalized_l1(a: &[f64], reference: &[f64]) -> f64 {
    assert_eq!(a.len(), reference.len(), "metric inputs must have equal length");
    let scale = max_of(reference);
    let sum: f64 = a.iter().zip(reference).map(|(x, y)| (x - y).abs()).sum();
    sum / (a.len() as f64 * scale)
}

/// `max|a − b| / max(b)`.
pub fn normalized_linf(a: &[f64], reference: &[f64]) -> f64 {
    assert_eq!(a.len(), reference.len(), "metric inputs must have equal length");
    let scale = max_of(reference);
    a.iter()
        .zip(reference)
        .map(|(x, y)| (x - y).abs())
        .fold(0.0, f64::max)
        / scale
}

/// `‖â − b̂‖₂ / ‖b̂‖₂` where `â`, `b̂` are scaled to unit peak.
pub fn peak_normalized_l2(a: &[f64], reference: &[f64]) -> f64 {
    assert_eq!(a.len(), reference.len(), "metric inputs must have equal length");
    let (sa, sb) = (max_of(a), max_of(reference));
    let mut diff = 0.0;
    let mut norm = 0.0;
    for (x, y) in a.iter().zip(reference) {
        let (x, y) = (x / sa, y / sb);
        diff += (x - y) * (x - y);
        norm += y * y;
    }
    (diff / norm).sqrt()
}

/// Copy of `values` scaled to unit maximum.
pub fn peak_normalize(values: &[f64]) -> Vec<f64> {
    let m = max_of(values);
    values.iter().map(|v| v / m).collect()
}

fn max_of(values: &[f64]) -> f64 {
    values.iter().copied().fold(f64::NEG_INFINITY, f64::max)
}

/// Indices of strict interior local maxima, highest first.
pub fn local_maxima(values: &[f64]) -> Vec<usize> {
    let mut peaks: Vec<usize> = (1..values.len().saturating_sub(1))
        .filter(|&i| values[i] > values[i - 1] && values[i] >= values[i + 1])
        .collect();
    peaks.sort_by(|&i, &j| values[j].total_cmp(&values[i]).then(i.cmp(&j)));
    peaks
}

/// Coordinates of the two highest local maxima, in increasing order.
pub fn two_highest_peaks(image: &SampledImage) -> Option<(f64, f64)> {
    let peaks = local_maxima(&image.values);
    if peaks.len() < 2 {
        return None;
    }
    let (a, b) = (image.axis.coordinate(peaks[0]), image.axis.coordinate(peaks[1]));
    Some((a.min(b), a.max(b)))
}

/// Linear interpolation of image samples at `x`; `None` outside the axis.
pub fn interpolate(axis: &Axis, values: &[f64], x: f64) -> Option<f64> {
    let t = axis.fractional_index(x);
    let last = (axis.len() - 1) as f64;
    if !(0.0..=last).contains(&t) {
        return None;
    }
    let i = (t.floor() as usize).min(axis.len() - 2);
    let frac = t - i as f64;
    Some(values[i] * (1.0 - frac) + values[i + 1] * frac)
}

/// Michelson visibility between two features and their midpoint:
/// `(I_f − I_m)/(I_f + I_m)`, where `I_f` is the mean image value at the two
/// feature positions and `I_m` the value halfway between them. Negative when
/// the midpoint is brighter than the features.
pub fn feature_contrast(image: &SampledImage, left: f64, right: f64) -> Result<f64> {
    let at = |x: f64| {
        interpolate(&image.axis, &image.values, x).ok_or(CpiError::OutOfRange {
            value: x,
            min: image.axis.first(),
            max: image.axis.last(),
        })
    };
    let features = 0.5 * (at(left)? + at(right)?);
    let middle = at(0.5 * (left + right))?;
    if features + middle <= 0.0 {
        return Err(CpiError::DegenerateStatistics("image is zero at the probed points".into()));
    }
    Ok((features - middle) / (features + middle))
}

/// Gaussian `A·exp(−(x − μ)²/(2s²))` fitted to a sampled profile.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GaussianFit {
    pub amplitude: f64,
    pub center: f64,
    pub std: f64,
}

impl GaussianFit {
    /// Full width between the `1/e²` points, `4s`.
    pub fn full_width_e2(&self) -> f64 {
        4.0 * self.std
    }

    /// Full width at half maximum.
    pub fn fwhm(&self) -> f64 {
        2.0 * (2.0 * std::f64::consts::LN_2).sqrt() * self.std
    }
}

/// Weighted least-squares parabola through `ln y` over the samples at or
/// above `threshold · max(y)`, with weights `y²` to balance the log noise.
pub fn fit_gaussian(x: &[f64], y: &[f64], threshold: f64) -> Result<GaussianFit> {
    assert_eq!(x.len(), y.len(), "fit inputs must have equal length");
    let peak = max_of(y);
    if !(peak > 0.0) {
        return Err(CpiError::DegenerateStatistics("profile has no positive samples".into()));
    }
    let i0 = y.iter().position(|v| *v == peak).expect("maximum is present");
    let x0 = x[i0];
    let scale = (x[x.len() - 1] - x[0]).abs().max(f64::MIN_POSITIVE);
    // normal equations for ln y = c0 + c1 t + c2 t², t = (x - x0)/scale
    let mut m = [[0.0; 3]; 3];
    let mut r = [0.0; 3];
    let mut used = 0;
    for (&xi, &yi) in x.iter().zip(y) {
        if yi < threshold * peak || yi <= 0.0 {
            continue;
        }
        used += 1;
        let t = (xi - x0) / scale;
        let w = yi * yi;
        let basis = [1.0, t, t * t];
        for a in 0..3 {
            r[a] += w * basis[a] * yi.ln();
            for b in 0..3 {
                m[a][b] += w * basis[a] * basis[b];
            }
        }
    }
    if used < 3 {
        return Err(CpiError::DegenerateStatistics(format!(
            "Gaussian fit needs three samples above threshold, got {used}"
        )));
    }
    let c = solve3(m, r).ok_or_else(|| CpiError::DegenerateStatistics("singular Gaussian fit".into()))?;
    if !(c[2] < 0.0) {
        return Err(CpiError::DegenerateStatistics("profile is not peaked".into()));
    }
    let std = scale * (-0.5 / c[2]).sqrt();
    let center = x0 - scale * c[1] / (2.0 * c[2]);
    let amplitude = (c[0] - c[1] * c[1] / (4.0 * c[2])).exp();
    Ok(GaussianFit {
        amplitude,
        center,
        std,
    })
}

fn solve3(mut m: [[f64; 3]; 3], mut r: [f64; 3]) -> Option<[f64; 3]> {
    for col in 0..3 {
        let pivot = (col..3).max_by(|&a, &b| m[a][col].abs().total_cmp(&m[b][col].abs()))?;
        if m[pivot][col].abs() < 1e-300 {
            return None;
        }
        m.swap(col, pivot);
        r.swap(col, pivot);
        for row in col + 1..3 {
            let f = m[row][col] / m[col][col];
            for k in col..3 {
                m[row][k] -= f * m[col][k];
            }
            r[row] -= f * r[col];
        }
    }
    let mut out = [0.0; 3];
    for row in (0..3).rev() {
        let tail: f64 = (row + 1..3).map(|k| m[row][k] * out[k]).sum();
        out[row] = (r[row] - tail) / m[row][row];
    }
    Some(out)
}

/// 10–90 % width of the first rising edge of a profile, relative to its
/// maximum. Crossing points are linearly interpolated.
pub fn rising_edge_width(x: &[f64], y: &[f64]) -> Result<f64> {
    assert_eq!(x.len(), y.len(), "edge inputs must have equal length");
    let peak = max_of(y);
    let crossing = |level: f64| -> Option<f64> {
        let target = level * peak;
        y.windows(2).enumerate().find_map(|(i, w)| {
            (w[0] < target && w[1] >= target)
                .then(|| x[i] + (target - w[0]) / (w[1] - w[0]) * (x[i + 1] - x[i]))
        })
    };
    match (crossing(0.1), crossing(0.9)) {
        (Some(lo), Some(hi)) if hi > lo => Ok(hi - lo),
        _ => Err(CpiError::DegenerateStatistics("profile has no clean rising edge".into())),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::optics::ImageLabel;

    #[test]
    fn distances_vanish_on_equal_inputs() {
        let a = [0.0, 1.0, 3.0, 2.0];
        assert_eq!(normalized_l1(&a, &a), 0.0);
        assert_eq!(normalized_linf(&a, &a), 0.0);
        assert_eq!(peak_normalized_l2(&a, &a), 0.0);
        let scaled: Vec<f64> = a.iter().map(|v| 7.0 * v).collect();
        assert!(peak_normalized_l2(&scaled, &a) < 1e-15);
        assert!((normalized_linf(&[0.0, 1.0, 3.0, 2.5], &a) - 0.5 / 3.0).abs() < 1e-15);
        assert!((normalized_l1(&[0.0, 1.0, 3.0, 2.5], &a) - 0.5 / 12.0).abs() < 1e-15);
    }

    #[test]
    fn gaussian_fit_recovers_parameters() {
        let x: Vec<f64> = (0..201).map(|i| -1e-4 + i as f64 * 1e-6).collect();
        let y: Vec<f64> = x
            .iter()
            .map(|v| 2.5 * (-(v - 7e-6_f64).powi(2) / (2.0 * 12e-6_f64.powi(2))).exp())
            .collect();
        let fit = fit_gaussian(&x, &y, 0.05).unwrap();
        assert!((fit.std / 12e-6 - 1.0).abs() < 1e-9);
        assert!((fit.center - 7e-6).abs() < 1e-12);
        assert!((fit.amplitude / 2.5 - 1.0).abs() < 1e-9);
        assert!((fit.fwhm() / (2.3548200450309493 * 12e-6) - 1.0).abs() < 1e-9);
    }

    #[test]
    fn contrast_of_two_peaks() {
        let axis = Axis::symmetric(5, 2.0).unwrap();
        let img = SampledImage::new(axis, vec![0.0, 1.0, 0.2, 1.0, 0.0], ImageLabel::Ghost).unwrap();
        assert!((feature_contrast(&img, -1.0, 1.0).unwrap() - 0.8 / 1.2).abs() < 1e-15);
        assert_eq!(two_highest_peaks(&img), Some((-1.0, 1.0)));
        assert!(feature_contrast(&img, -3.0, 1.0).is_err());
    }

    #[test]
    fn edge_width_of_a_ramp() {
        let x: Vec<f64> = (0..101).map(|i| i as f64).collect();
        let y: Vec<f64> = x.iter().map(|v| ((v - 20.0) / 50.0).clamp(0.0, 1.0)).collect();
        assert!((rising_edge_width(&x, &y).unwrap() - 40.0).abs() < 1e-12);
    }

    #[test]
    fn interpolation_is_linear_and_bounded() {
        let axis = Axis::new(3, 0.0, 1.0).unwrap();
        let v = [1.0, 3.0, 2.0];
        assert_eq!(interpolate(&axis, &v, -0.5), Some(2.0));
        assert_eq!(interpolate(&axis, &v, 1.0), Some(2.0));
        assert_eq!(interpolate(&axis, &v, 1.01), None);
    }
}
