//! Grid substrate and grid-based differential geometry.

mod grid;
mod ops;

pub use grid::{FrameDirection, OneFormGrid, OneFormSample, ScalarGrid, VectorGrid};
pub use ops::{
    connection_form_w12, darboux_connection_theta21, directional_derivative,
    gaussian_curvature_intrinsic, laplace_beltrami, mean_curvature_norm, scalar_gradient,
    second_fundamental_form, sphere_covariant_derivative, CoordFrameField, FrameGrid, MetricField,
    SecondFundamentalForm, SffGrid, SkipReason, W12Frame,
};
