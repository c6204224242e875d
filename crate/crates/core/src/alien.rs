//! Conjugate-gear carving for arbitrary driver shapes. A driving shape spins
//! about its center at a fixed rate while the driven gear spins the other way
//! at `ratio` times that rate; viewed from the driven gear's rotating frame,
//! the driver rolls around the driven center. Subtracting every rolled
//! position from a solid block leaves a hole, and that hole is the driven
//! gear: it meshes with the driver by construction, though nothing guarantees
//! the driver actually forces it to turn (badly chosen shapes slip — that
//! shows up in kinematic checks, not here).
//!
//! The rotation ratio is a rational p/q, so the relative motion closes after
//! q driver turns and a finite pose set samples the whole cycle.

use std::f64::consts::TAU;

use thiserror::Error;

use crate::curvekit::{union_tree, ClosedPolygon, CurveError, Point2, RigidPose};

#[derive(Debug, Error)]
pub enum AlienError {
    #[error("driver shape must be a simple polygon")]
    DriverNotSimple,
    #[error("gear centers coincide; the driver would spin in place")]
    CoincidentCenters,
    #[error("rotation ratio must have nonzero numerator and denominator")]
    ZeroRatio,
    #[error("need at least 2 sweep samples, got {0}")]
    TooFewSamples(usize),
    #[error("swept driver leaves no hole around the driven center: {0}")]
    CarveInfeasible(String),
    #[error(transparent)]
    Curve(#[from] CurveError),
}

/// Rational rotation ratio ω₂/ω₁ between driven and driving gear.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct GearRatio {
    pub num: u32,
    pub den: u32,
}

impl GearRatio {
    pub const UNIT: GearRatio = GearRatio { num: 1, den: 1 };

    pub fn new(num: u32, den: u32) -> GearRatio {
        GearRatio { num, den }
    }

    pub fn value(&self) -> f64 {
        f64::from(self.num) / f64::from(self.den)
    }

    /// Driver turns until the relative motion repeats.
    pub fn cycle_turns(&self) -> u32 {
        self.den
    }
}

/// Pose of the driver in the driven gear's frame at driving angle `phi`.
///
/// In world coordinates the driver rotates by φ about c1 and the driven gear
/// counter-rotates by ratio·φ about c2; undoing the latter composes to
/// rotate(c2, ratio·φ) ∘ rotate(c1, φ). The fixed point of that composition
/// for small φ splits c1c2 in proportion ratio/(1+ratio) — the pitch point —
/// which is what makes the driver roll around c2 instead of merely orbiting.
pub fn driven_frame_pose(c1: Point2, c2: Point2, ratio: GearRatio, phi: f64) -> RigidPose {
    RigidPose::rotation_about(c1, phi).then(&RigidPose::rotation_about(c2, ratio.value() * phi))
}

fn validate(
    s1: &ClosedPolygon,
    c1: Point2,
    c2: Point2,
    ratio: GearRatio,
    n_samples: usize,
) -> Result<(), AlienError> {
    if ratio.num == 0 || ratio.den == 0 {
        return Err(AlienError::ZeroRatio);
    }
    if (c1 - c2).norm() < 1e-12 {
        return Err(AlienError::CoincidentCenters);
    }
    if n_samples < 2 {
        return Err(AlienError::TooFewSamples(n_samples));
    }
    if !s1.is_simple() {
        return Err(AlienError::DriverNotSimple);
    }
    Ok(())
}

/// Every position the driver occupies in the driven frame, sampled uniformly
/// over one full relative cycle (`ratio.den` driver turns). Pose k sits at
/// driving angle φ_k = 2π·k·den/n_samples; the next sample after the last
/// would be the identity again.
pub fn sweep_in_driven_frame(
    s1: &ClosedPolygon,
    c1: Point2,
    c2: Point2,
    ratio: GearRatio,
    n_samples: usize,
) -> Result<Vec<ClosedPolygon>, AlienError> {
    validate(s1, c1, c2, ratio, n_samples)?;
    let turns = f64::from(ratio.cycle_turns());
    Ok((0..n_samples)
        .map(|k| {
            let phi = TAU * turns * k as f64 / n_samples as f64;
            s1.transformed(&driven_frame_pose(c1, c2, ratio, phi))
        })
        .collect())
}

/// Carve the driven gear: union all swept driver positions and return the
/// hole that contains the driven center, counterclockwise. The raw union
/// boundary is kept except for a collinear-vertex collapse (1e-6 rad) —
/// no further smoothing, so the tolerance of the result is set entirely by
/// `n_samples`.
pub fn carve_conjugate(
    s1: &ClosedPolygon,
    c1: Point2,
    c2: Point2,
    ratio: GearRatio,
    n_samples: usize,
) -> Result<ClosedPolygon, AlienError> {
    let poses = sweep_in_driven_frame(s1, c1, c2, ratio, n_samples)?;
    let swept = union_tree(&poses);
    for piece in &swept {
        for hole in piece.holes() {
            let candidate = ClosedPolygon::new(hole.clone(), vec![])
                .map_err(|e| AlienError::CarveInfeasible(format!("degenerate hole ring: {e}")))?;
            if candidate.contains_point(c2) {
                return Ok(candidate.simplified(1e-6));
            }
        }
    }
    Err(AlienError::CarveInfeasible(format!(
        "{} swept piece(s) with {} hole(s), none around the driven center",
        swept.len(),
        swept.iter().map(|p| p.holes().len()).sum::<usize>()
    )))
}
