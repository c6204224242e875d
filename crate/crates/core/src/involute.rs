//! Involute tooth geometry: circle involutes, trapezoidal racks, and closed
//! spur-gear outlines.
//!
//! Conventions: a gear of `n` teeth and module `m` has pitch radius
//! R = n·m/2, so circular pitch is π·m; the base circle sits at R·cos α.

use std::f64::consts::{PI, TAU};

use thiserror::Error;

use crate::curvekit::{
    find_root, ClosedPolygon, CurveError, Point2, Polyline, RigidPose,
};

#[derive(Debug, Error)]
pub enum GearError {
    #[error("invalid gear parameters: {0}")]
    BadSpec(String),
    #[error("incompatible pair: {0}")]
    Incompatible(String),
    #[error(transparent)]
    Curve(#[from] CurveError),
}

/// Parameters of a circular gear. Lengths in mm, angles in radians.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GearSpec {
    pub teeth: u32,
    pub module: f64,
    pub pressure_angle: f64,
    pub addendum_coef: f64,
    pub dedendum_coef: f64,
    /// Extra root clearance below the dedendum, in modules.
    pub cutout_coef: f64,
}

impl GearSpec {
    /// Standard proportions: 20° pressure angle, addendum 1·m, dedendum 1.25·m.
    pub fn new(teeth: u32, module: f64) -> Self {
        GearSpec {
            teeth,
            module,
            pressure_angle: 20f64.to_radians(),
            addendum_coef: 1.0,
            dedendum_coef: 1.25,
            cutout_coef: 0.0,
        }
    }

    pub fn validate(&self) -> Result<(), GearError> {
        if self.teeth < 4 {
            return Err(GearError::BadSpec(format!(
                "need at least 4 teeth, got {}",
                self.teeth
            )));
        }
        if !(self.module > 0.0) {
            return Err(GearError::BadSpec(format!("module {} ≤ 0", self.module)));
        }
        if !(self.pressure_angle > 0.0 && self.pressure_angle < PI / 2.0) {
            return Err(GearError::BadSpec(format!(
                "pressure angle {} outside (0, π/2)",
                self.pressure_angle
            )));
        }
        if self.dedendum_coef < self.addendum_coef {
            return Err(GearError::BadSpec(format!(
                "dedendum {} below addendum {}",
                self.dedendum_coef, self.addendum_coef
            )));
        }
        if self.cutout_coef < 0.0 {
            return Err(GearError::BadSpec("negative cutout".into()));
        }
        Ok(())
    }

    pub fn pitch_radius(&self) -> f64 {
        self.teeth as f64 * self.module / 2.0
    }

    pub fn base_radius(&self) -> f64 {
        self.pitch_radius() * self.pressure_angle.cos()
    }

    pub fn tip_radius(&self) -> f64 {
        self.pitch_radius() + self.addendum_coef * self.module
    }

    pub fn root_radius(&self) -> f64 {
        self.pitch_radius() - (self.dedendum_coef + self.cutout_coef) * self.module
    }

    /// Fewest teeth a gear can have at this pressure angle before its flank
    /// would dig into the root region when cut by a rack.
    pub fn undercut_threshold(&self) -> f64 {
        2.0 / self.pressure_angle.sin().powi(2)
    }
}

/// A straight rack: the pitch line is the x-axis, teeth point up (+y).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RackSpec {
    pub module: f64,
    pub pressure_angle: f64,
    pub tooth_count: u32,
    pub addendum_coef: f64,
    pub dedendum_coef: f64,
}

impl RackSpec {
    pub fn new(module: f64, tooth_count: u32) -> Self {
        RackSpec {
            module,
            pressure_angle: 20f64.to_radians(),
            tooth_count,
            addendum_coef: 1.0,
            dedendum_coef: 1.25,
        }
    }

    pub fn validate(&self) -> Result<(), GearError> {
        if self.tooth_count == 0 {
            return Err(GearError::BadSpec("rack needs at least one tooth".into()));
        }
        if !(self.module > 0.0) {
            return Err(GearError::BadSpec(format!("module {} ≤ 0", self.module)));
        }
        if !(self.pressure_angle >= 0.0 && self.pressure_angle < PI / 2.0) {
            return Err(GearError::BadSpec(format!(
                "pressure angle {} outside [0, π/2)",
                self.pressure_angle
            )));
        }
        if self.dedendum_coef < self.addendum_coef {
            return Err(GearError::BadSpec("dedendum below addendum".into()));
        }
        Ok(())
    }

    pub fn pitch(&self) -> f64 {
        PI * self.module
    }
}

/// Closed outline of a circular gear plus the radii that parameterized it.
#[derive(Debug, Clone)]
pub struct GearProfile {
    pub boundary: ClosedPolygon,
    pub pitch_radius: f64,
    pub base_radius: f64,
    pub spec: GearSpec,
}

/// Two meshing profiles on the x-axis: gear 1 at the origin, gear 2 at
/// (center_distance, 0), each pre-rotated by its phase.
#[derive(Debug, Clone)]
pub struct GearAssembly {
    pub gear1: GearProfile,
    pub gear2: GearProfile,
    pub center_distance: f64,
    pub phase1: f64,
    pub phase2: f64,
}

impl GearAssembly {
    /// Nominal transmission ratio dθ₂/dθ₁ = n₁/n₂.
    pub fn ratio(&self) -> f64 {
        self.gear1.spec.teeth as f64 / self.gear2.spec.teeth as f64
    }
}

/// Point of the involute unwound from a circle of radius `r`, at roll angle
/// `theta`: (r(cos θ + θ sin θ), r(sin θ − θ cos θ)).
pub fn involute_of_circle(r: f64, theta: f64) -> Point2 {
    let (s, c) = theta.sin_cos();
    Point2::new(r * (c + theta * s), r * (s - theta * c))
}

/// tan x − x: polar angle swept between a flank's base-circle origin and its
/// pitch-circle crossing at pressure angle x.
pub fn involute_function(x: f64) -> f64 {
    x.tan() - x
}

/// Polar angle of involute_of_circle(r, φ), independent of r.
fn involute_polar_angle(phi: f64) -> f64 {
    phi - phi.atan()
}

/// End of a taut string of length L(t0, t) unwound from `gamma`, laid along
/// the backward tangent at γ(t): γ(t) − T̂(t)·L. Parameters are fractional
/// vertex indices of the polyline.
pub fn involute_of_curve(gamma: &Polyline, t0: f64, t: f64) -> Result<Point2, CurveError> {
    if t < t0 {
        return Err(CurveError::Parameter(format!(
            "unwind parameter {t} precedes anchor {t0}"
        )));
    }
    let p = gamma.point_at(t)?;
    let tangent = gamma.tangent_at(t)?;
    let len = gamma.arclength(t0, t)?;
    Ok(p - tangent * len)
}

/// Open polyline of a trapezoidal rack: `tooth_count` teeth centered at
/// x = 0, π·m, 2π·m, …, flanks tilted `pressure_angle` off vertical, crowns
/// at +addendum_coef·m, troughs at −dedendum_coef·m, half-trough at each end.
pub fn make_rack_profile(spec: &RackSpec) -> Result<Polyline, GearError> {
    spec.validate()?;
    let m = spec.module;
    let p = spec.pitch();
    let tan_a = spec.pressure_angle.tan();
    let crown_y = spec.addendum_coef * m;
    let trough_y = -spec.dedendum_coef * m;
    // Flanks cross the pitch line at ±p/4 from the tooth center; if they
    // would cross each other inside the band, the crown (or trough) pinches
    // to a point instead of going degenerate.
    let crown_half = p / 4.0 - crown_y * tan_a;
    let trough_half = p / 4.0 - (-trough_y) * tan_a;
    let mut pts: Vec<Point2> = Vec::new();
    for j in 0..spec.tooth_count {
        let cx = j as f64 * p;
        if crown_half > 0.0 {
            pts.push(Point2::new(cx - crown_half, crown_y));
            pts.push(Point2::new(cx + crown_half, crown_y));
        } else {
            // Pointed tooth: flanks meet at x = cx, y = (p/4)/tan α.
            pts.push(Point2::new(cx, p / (4.0 * tan_a)));
        }
        if trough_half > 0.0 {
            pts.push(Point2::new(cx + p / 4.0 + (-trough_y) * tan_a, trough_y));
            if j + 1 < spec.tooth_count {
                pts.push(Point2::new(cx + p - (p / 4.0 + (-trough_y) * tan_a), trough_y));
            }
        } else if j + 1 < spec.tooth_count {
            pts.push(Point2::new(cx + p / 2.0, -p / (4.0 * tan_a)));
        }
    }
    // Half-troughs at both ends so the span covers tooth_count full pitches.
    let lead = if trough_half > 0.0 {
        vec![
            Point2::new(-p / 2.0, trough_y),
            Point2::new(-(p / 4.0 + (-trough_y) * tan_a), trough_y),
        ]
    } else {
        vec![Point2::new(-p / 2.0, -p / (4.0 * tan_a))]
    };
    let tail_cx = (spec.tooth_count - 1) as f64 * p;
    let tail = if trough_half > 0.0 {
        vec![Point2::new(tail_cx + p / 2.0, trough_y)]
    } else {
        vec![Point2::new(tail_cx + p / 2.0, -p / (4.0 * tan_a))]
    };
    let mut all = lead;
    all.extend(pts);
    all.extend(tail);
    Ok(Polyline::new(all)?)
}

/// Spur gear outline with the default 64 samples per flank.
pub fn make_spur_profile(spec: &GearSpec) -> Result<GearProfile, GearError> {
    make_spur_profile_sampled(spec, 64)
}

/// Spur gear outline with `flank_samples` points per involute flank. Teeth
/// are counterclockwise around the origin, tooth 0 centered on +x.
pub fn make_spur_profile_sampled(
    spec: &GearSpec,
    flank_samples: usize,
) -> Result<GearProfile, GearError> {
    spec.validate()?;
    let samples = flank_samples.max(2);
    let n = spec.teeth as f64;
    let r_pitch = spec.pitch_radius();
    let r_base = spec.base_radius();
    let r_tip = spec.tip_radius();
    let r_root = spec.root_radius();
    if r_root <= 0.0 {
        return Err(GearError::BadSpec(format!(
            "root radius {r_root} not positive; tooth depth exceeds pitch radius"
        )));
    }
    if (spec.teeth as f64) < spec.undercut_threshold() {
        log::warn!(
            "{} teeth at {:.1}° is below the undercut threshold ({:.1}); \
             flanks are clipped at the root circle, not undercut",
            spec.teeth,
            spec.pressure_angle.to_degrees(),
            spec.undercut_threshold()
        );
    }

    // Half the tooth's angular thickness at the base circle: a quarter pitch
    // angle plus the involute sweep from base to pitch circle.
    let delta = PI / (2.0 * n) + involute_function(spec.pressure_angle);
    let phi_at = |r: f64| ((r / r_base).powi(2) - 1.0).sqrt();
    let phi_root = if r_root > r_base { phi_at(r_root) } else { 0.0 };
    let mut phi_tip = phi_at(r_tip);
    // A long addendum can sweep the two flanks into each other before the
    // tip circle; trim them where they meet so the tooth ends in a point.
    if involute_polar_angle(phi_tip) >= delta {
        phi_tip = find_root(|p| involute_polar_angle(p) - delta, 0.0, phi_tip, 1e-14)
            .expect("flank crossing is bracketed");
    }
    let tip_half = delta - involute_polar_angle(phi_tip); // ≥ 0 after trim
    let r_tip_actual = r_base * (1.0 + phi_tip * phi_tip).sqrt();

    // One tooth, centered on the +x axis.
    let mut tooth: Vec<Point2> = Vec::new();
    if r_root < r_base {
        tooth.push(Point2::from_polar(r_root, -delta));
    }
    for i in 0..samples {
        let phi = phi_root + (phi_tip - phi_root) * i as f64 / (samples - 1) as f64;
        tooth.push(involute_of_circle(r_base, phi).rotated(-delta));
    }
    let arc_res = TAU / (n * samples as f64); // match flank point spacing
    let tip_steps = (2.0 * tip_half / arc_res).ceil() as usize;
    for i in 1..tip_steps {
        let ang = -tip_half + 2.0 * tip_half * i as f64 / tip_steps as f64;
        tooth.push(Point2::from_polar(r_tip_actual, ang));
    }
    for i in (0..samples).rev() {
        let phi = phi_root + (phi_tip - phi_root) * i as f64 / (samples - 1) as f64;
        let p = involute_of_circle(r_base, phi);
        tooth.push(Point2::new(p.x, -p.y).rotated(delta));
    }
    if r_root < r_base {
        tooth.push(Point2::from_polar(r_root, delta));
    }
    // Root arc from this tooth's trailing edge to the next tooth's leading
    // edge, endpoints exclusive (the flank/stub points already sit there).
    let edge_off = if r_root < r_base {
        delta
    } else {
        delta - involute_polar_angle(phi_root)
    };
    let root_from = edge_off;
    let root_to = TAU / n - edge_off;
    if root_to <= root_from {
        return Err(GearError::BadSpec(format!(
            "teeth overlap at the root circle (n = {}, α = {:.1}°)",
            spec.teeth,
            spec.pressure_angle.to_degrees()
        )));
    }
    let root_steps = ((root_to - root_from) / arc_res).ceil().max(1.0) as usize;
    let mut root_arc: Vec<Point2> = Vec::new();
    for i in 1..root_steps {
        let ang = root_from + (root_to - root_from) * i as f64 / root_steps as f64;
        root_arc.push(Point2::from_polar(r_root, ang));
    }

    let mut boundary: Vec<Point2> = Vec::with_capacity(spec.teeth as usize * (tooth.len() + root_arc.len()));
    for k in 0..spec.teeth {
        let rot = RigidPose::rotation_about(Point2::ORIGIN, TAU * k as f64 / n);
        boundary.extend(rot.apply_all(&tooth));
        boundary.extend(rot.apply_all(&root_arc));
    }
    Ok(GearProfile {
        boundary: ClosedPolygon::new(boundary, vec![])?,
        pitch_radius: r_pitch,
        base_radius: r_base,
        spec: *spec,
    })
}

/// Control-fixture gear: the straight-sided rack tooth bent around the pitch
/// circle (each rack point (x, y) lands at angle x/R, radius R + y). These
/// teeth transmit rotation but not at a constant ratio — useful as a
/// deliberately non-conjugate comparison profile.
pub fn make_trapezoid_profile(spec: &GearSpec, flank_samples: usize) -> Result<GearProfile, GearError> {
    spec.validate()?;
    let samples = flank_samples.max(2);
    let m = spec.module;
    let r_pitch = spec.pitch_radius();
    let rack = RackSpec {
        module: m,
        pressure_angle: spec.pressure_angle,
        tooth_count: 1,
        addendum_coef: spec.addendum_coef,
        dedendum_coef: spec.dedendum_coef + spec.cutout_coef,
    };
    let profile = make_rack_profile(&rack)?;
    let pts = profile.points();
    // One tooth of the rack spans x ∈ [−p/2, p/2] = one pitch angle.
    let mut tooth: Vec<Point2> = Vec::new();
    for w in pts.windows(2) {
        for i in 0..samples {
            let q = w[0].lerp(w[1], i as f64 / samples as f64);
            tooth.push(Point2::from_polar(r_pitch + q.y, q.x / r_pitch));
        }
    }
    tooth.push(Point2::from_polar(
        r_pitch + pts.last().unwrap().y,
        pts.last().unwrap().x / r_pitch,
    ));
    let mut boundary = Vec::new();
    for k in 0..spec.teeth {
        let rot = RigidPose::rotation_about(Point2::ORIGIN, TAU * k as f64 / spec.teeth as f64);
        boundary.extend(rot.apply_all(&tooth));
    }
    Ok(GearProfile {
        boundary: ClosedPolygon::new(boundary, vec![])?,
        pitch_radius: r_pitch,
        base_radius: spec.base_radius(),
        spec: *spec,
    })
}

/// Places two gears cut by the same rack on the x-axis at center distance
/// m(n₁+n₂)/2. Gear 2's phase turns a tooth gap toward gear 1's tooth: half
/// an angular pitch past the line of centers as seen from gear 2.
pub fn assemble_pair(spec1: &GearSpec, spec2: &GearSpec) -> Result<GearAssembly, GearError> {
    if (spec1.module - spec2.module).abs() > 1e-12 {
        return Err(GearError::Incompatible(format!(
            "modules differ: {} vs {}",
            spec1.module, spec2.module
        )));
    }
    if (spec1.pressure_angle - spec2.pressure_angle).abs() > 1e-12 {
        return Err(GearError::Incompatible(format!(
            "pressure angles differ: {} vs {}",
            spec1.pressure_angle, spec2.pressure_angle
        )));
    }
    let gear1 = make_spur_profile(spec1)?;
    let gear2 = make_spur_profile(spec2)?;
    let center_distance = spec1.module * (spec1.teeth + spec2.teeth) as f64 / 2.0;
    let phase2 = PI + PI / spec2.teeth as f64;
    Ok(GearAssembly {
        gear1,
        gear2,
        center_distance,
        phase1: 0.0,
        phase2,
    })
}
