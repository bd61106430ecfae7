//! Setup description and paraxial propagation primitives shared by every
//! other module.

mod geometry;
mod grid;
mod object;
mod propagator;
mod source;

pub use geometry::{LensSpec, SetupGeometry};
pub use grid::{Axis, CorrelationGrid, GeometrySnapshot, ImageLabel, SampledImage};
pub use object::{MaskShape, ObjectMask};
pub use propagator::{
    arm_a_prefactor, arm_b_prefactor, fresnel_prefactor, gaussian_phase, intensity_scale_a,
    intensity_scale_b,
};
pub use source::{SourceKind, SourceProfile};
