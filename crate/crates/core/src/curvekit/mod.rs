//! Planar geometry kernel: points, polylines, polygons, booleans, arclength,
//! quadrature and root finding. Everything downstream builds on this module.

mod boolean;
mod curve;
mod geom;
mod numeric;
mod polygon;

pub use boolean::{polygon_boolean, total_area, unary_union, union_tree, BoolOp};
pub use curve::{PolarCurve, Polyline};
pub use geom::{Point2, RigidPose};
pub use numeric::{find_root, integrate, NumericError};
pub use polygon::{
    point_segment_distance, ring_signed_area, segment_segment_distance, BoundaryIndex,
    ClosedPolygon,
};

use thiserror::Error;

/// Vertex-welding tolerance for polygon construction and booleans (mm).
/// Far below any tooth feature: the module is never smaller than ~0.1 mm.
pub const SNAP_TOL: f64 = 1e-9;

/// Rings whose enclosed area falls below this are rejected as degenerate (mm²).
pub const AREA_TOL: f64 = 1e-12;

#[derive(Debug, Error)]
pub enum CurveError {
    #[error("polyline needs at least 2 distinct points, got {0}")]
    TooFewPoints(usize),
    #[error("consecutive points closer than snap tolerance at index {0}")]
    DuplicatePoint(usize),
    #[error("ring is degenerate (|area| {area:.3e} below tolerance)")]
    DegenerateRing { area: f64 },
    #[error("polar samples must start at θ=0, first is {0}")]
    BadStart(f64),
    #[error("polar angles must be strictly increasing and below 2π (index {0})")]
    BadAngle(usize),
    #[error("polar radius must be positive and finite (index {0})")]
    BadRadius(usize),
    #[error("parameter out of range: {0}")]
    Parameter(String),
    #[error("boolean operation produced no valid ring")]
    EmptyBoolean,
}
