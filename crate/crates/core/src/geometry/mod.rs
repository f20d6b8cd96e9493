//! Geometry of the model spaces and quadrature on them.

mod field;
mod grid;
mod poles;
pub mod quadrature;
mod space;

pub use field::{EquatorCap, FieldSum, GeodesicBump, ScaledField, TestField, ZeroField};
pub use grid::{AxiGrid, GradientSample, GridPoint, GridResolution, Region, ScalarField, PANEL_ORDER, VOLUME_TOLERANCE};
pub use poles::PoleSet;
pub use space::{cosine_law_angle, cosine_law_vertex_angle, ModelPoint, ModelSpace};
