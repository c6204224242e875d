//! Gear synthesis toolkit: planar profile generation (involute, acircular,
//! conjugate), solidification to printable meshes, and kinematic verification.
//!
//! All lengths are millimeters, all angles radians, counterclockwise positive.

pub mod acircular;
pub mod alien;
pub mod curvekit;
pub mod involute;
pub mod meshcheck;
pub mod solidify;
pub mod toothing;
pub mod trochoid;
