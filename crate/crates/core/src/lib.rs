//! Correlation plenoptic imaging with chaotic light.
//!
//! The crate computes the crossed second-order correlation `Γ(ρa, ρb)` of a
//! two-arm chaotic-light setup: arm *a* propagates freely from the source to
//! a high-resolution sensor, arm *b* passes through the object and a lens
//! that images the source onto a second sensor. `Γ` is obtained three ways:
//!
//! - [`correlator::gamma_quadrature`]: direct quadrature of the correlation
//!   integral,
//! - [`correlator::gamma_geometric`]: its short-wavelength asymptote,
//! - [`speckle::estimate_gamma`]: intensity covariance over random speckle
//!   realizations of the source.
//!
//! [`refocus`] turns a correlation grid into ghost images, refocused images
//! and single-viewpoint slices; [`budget`] holds the pixel-budget arithmetic
//! comparing microlens plenoptic cameras with correlation plenoptic imaging.
//!
//! Transverse coordinates are one-dimensional throughout. All lengths are in
//! metres.

pub mod analysis;
pub mod budget;
pub mod correlator;
pub mod error;
pub mod optics;
pub mod refocus;
pub mod speckle;

pub use error::{CpiError, Result};
pub use num_complex::Complex64;
pub use optics::{
    Axis, CorrelationGrid, GeometrySnapshot, ImageLabel, LensSpec, MaskShape, ObjectMask,
    SampledImage, SetupGeometry, SourceKind, SourceProfile,
};
