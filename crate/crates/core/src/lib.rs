//! Profile geodesics of the Angenent metric and the entropy of rotationally
//! symmetric self-shrinkers.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod entropy;
pub mod error;
pub mod geodesic;
pub mod io;
pub mod metric;
pub mod orbit;
pub mod par;
pub mod precise;
pub mod profile;
pub mod quadrature;
pub mod roots;
pub mod special;
pub mod types;
pub mod verify;

pub use error::{Error, Result};
pub use geodesic::{
    angenent_length, integrate, refine_crossing, residual_profile, CrossingRecord, Fate,
    GeodesicPath, IntegratorConfig, Sample,
};
pub use metric::{
    conformal_factor, gauss_curvature, geodesic_rhs, kappa_min, length_element, shrinker_residual,
    CurvatureMinimum,
};
pub use profile::{AnalyticProfile, Profile, Window};
pub use types::{Dimension, GeodesicState, ProfilePoint};
