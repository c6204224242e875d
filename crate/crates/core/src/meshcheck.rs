//! Kinematic verification of a meshing pair. The pair is rolled through its
//! motion law step by step; at each pose we measure how deeply the profiles
//! interpenetrate, how close they come where they do not touch, and where
//! contact happens, so conjugacy claims become numbers instead of pictures.
//!
//! Gear A lives at the origin and turns counterclockwise by θ₁; gear B lives
//! at (a, 0) and turns clockwise by the law's θ₂. Bad meshing is reported,
//! never an error — thresholds are the caller's business.

use std::io::Write;

use thiserror::Error;

use crate::acircular::MotionLaw;
use crate::curvekit::{
    point_segment_distance, polygon_boolean, BoolOp, BoundaryIndex, ClosedPolygon, Point2,
    RigidPose,
};
use crate::involute::GearAssembly;

#[derive(Debug, Error)]
pub enum MeshError {
    #[error("need at least 2 steps, got {0}")]
    TooFewSteps(usize),
    #[error("no contact recorded anywhere in the report")]
    NoContact,
    #[error("pressure angles differ: {0} vs {1} rad")]
    MixedPressureAngles(f64, f64),
    #[error("driven gear cannot clear the driver at θ₁ = {theta1}")]
    Jammed { theta1: f64 },
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

/// One sampled pose of the pair.
#[derive(Debug, Clone)]
pub struct MeshStep {
    pub theta1: f64,
    pub theta2: f64,
    /// Deepest point of the overlap region, 0 when the profiles are disjoint.
    pub max_penetration: f64,
    /// Closest approach of the two boundaries, 0 when touching or overlapping.
    pub min_gap: f64,
    /// One representative per contact region: the midpoint of the closest
    /// boundary pair among that region's samples. A region counts as contact
    /// only while its gap is within a small multiple of the step's closest
    /// approach (and inside the absolute tolerance), so clearance features
    /// that merely pass near the other gear are not reported.
    pub contact_points: Vec<Point2>,
}

#[derive(Debug, Clone)]
pub struct MeshReport {
    pub steps: Vec<MeshStep>,
    /// Boundary distance below which a sample counts as contact.
    pub contact_tol: f64,
}

impl MeshReport {
    /// Worst interpenetration over the cycle.
    pub fn max_penetration(&self) -> f64 {
        self.steps.iter().map(|s| s.max_penetration).fold(0.0, f64::max)
    }

    /// Largest per-step closest approach — how far the pair ever is from
    /// touching.
    pub fn worst_gap(&self) -> f64 {
        self.steps.iter().map(|s| s.min_gap).fold(0.0, f64::max)
    }

    /// Tab-separated dump, one row per step under a header line.
    pub fn write_tsv<W: Write>(&self, mut sink: W) -> std::io::Result<()> {
        writeln!(sink, "theta1\ttheta2\tmax_penetration\tmin_gap\tcontacts")?;
        for s in &self.steps {
            writeln!(
                sink,
                "{:.9}\t{:.9}\t{:.6e}\t{:.6e}\t{}",
                s.theta1,
                s.theta2,
                s.max_penetration,
                s.min_gap,
                s.contact_points.len()
            )?;
        }
        Ok(())
    }
}

fn pose_a(theta1: f64) -> RigidPose {
    RigidPose::rotation_about(Point2::ORIGIN, theta1)
}

fn pose_b(center_distance: f64, theta2: f64) -> RigidPose {
    RigidPose::rotation_about(Point2::ORIGIN, -theta2)
        .then(&RigidPose::translation(Point2::new(center_distance, 0.0)))
}

fn vertices(poly: &ClosedPolygon) -> impl Iterator<Item = Point2> + '_ {
    poly.outer().iter().chain(poly.holes().iter().flatten()).copied()
}

/// Deepest interior point of one overlap piece. Both candidates undershoot
/// for exotic shapes, but overlap pieces here are lens slivers between
/// near-tangent flanks, where either is within a few percent of the true
/// inradius.
fn piece_depth(piece: &ClosedPolygon) -> f64 {
    let width = 2.0 * piece.area() / piece.perimeter();
    let c = piece.centroid();
    if !piece.contains_point(c) {
        return width;
    }
    let to_boundary = piece
        .segments()
        .iter()
        .map(|&(a, b)| point_segment_distance(c, a, b).0)
        .fold(f64::INFINITY, f64::min);
    width.max(to_boundary)
}

/// Near-contact samples of one boundary against the other: for every vertex
/// within `cutoff` of the index, the gap and the midpoint straddling it.
fn approach_samples(
    poly: &ClosedPolygon,
    other: &BoundaryIndex,
    cutoff: f64,
    out: &mut Vec<(Point2, f64)>,
) {
    for v in vertices(poly) {
        if let Some((d, q)) = other.distance_within(v, cutoff) {
            out.push(((v + q) * 0.5, d));
        }
    }
}

/// Collapses near-contact samples into one representative per contact
/// region: samples within `linkage` of each other chain into a region, and
/// the smallest-gap member wins. Without this, every vertex of a flank that
/// curves away within tolerance would count as its own contact.
fn cluster_contacts(mut samples: Vec<(Point2, f64)>, linkage: f64) -> Vec<Point2> {
    let mut reps = Vec::new();
    let mut used = vec![false; samples.len()];
    samples.sort_by(|a, b| a.1.partial_cmp(&b.1).unwrap());
    for seed in 0..samples.len() {
        if used[seed] {
            continue;
        }
        used[seed] = true;
        reps.push(samples[seed].0);
        let mut frontier = vec![seed];
        while let Some(i) = frontier.pop() {
            for j in 0..samples.len() {
                if !used[j] && samples[i].0.dist(samples[j].0) <= linkage {
                    used[j] = true;
                    frontier.push(j);
                }
            }
        }
    }
    reps
}

/// Rolls the pair through `law`, sampling `n_steps` poses uniformly in θ₁
/// across the law's range. `a_gear` is taken about the origin, `b_gear`
/// about (center_distance, 0), already phased to mesh at θ₁ = 0.
pub fn simulate_pair(
    a_gear: &ClosedPolygon,
    b_gear: &ClosedPolygon,
    center_distance: f64,
    law: &MotionLaw,
    n_steps: usize,
    contact_tol: f64,
) -> Result<MeshReport, MeshError> {
    if n_steps < 2 {
        return Err(MeshError::TooFewSteps(n_steps));
    }
    let span = law.end().0;
    let cell = (8.0 * contact_tol).max(1e-6);
    let mut steps = Vec::with_capacity(n_steps);
    for k in 0..n_steps {
        let theta1 = span * k as f64 / n_steps as f64;
        let theta2 = law.theta2_at(theta1);
        let a_w = a_gear.transformed(&pose_a(theta1));
        let b_w = b_gear.transformed(&pose_b(center_distance, theta2));

        let overlap = polygon_boolean(
            std::slice::from_ref(&a_w),
            std::slice::from_ref(&b_w),
            BoolOp::Intersection,
        );
        let max_penetration = overlap.iter().map(piece_depth).fold(0.0, f64::max);

        let index_a = BoundaryIndex::new(&a_w, cell);
        let index_b = BoundaryIndex::new(&b_w, cell);
        let mut samples = Vec::new();
        let mut cutoff = (8.0 * contact_tol).max(1e-3);
        loop {
            approach_samples(&a_w, &index_b, cutoff, &mut samples);
            approach_samples(&b_w, &index_a, cutoff, &mut samples);
            if !samples.is_empty() {
                break;
            }
            cutoff *= 4.0;
        }
        let nearest = samples.iter().map(|s| s.1).fold(f64::INFINITY, f64::min);
        let min_gap = if overlap.is_empty() { nearest } else { 0.0 };
        // Contact means "as close as this step's closest approach", within
        // noise — never merely "nearby". A tooth tip hovering over the
        // mating root clearance passes well inside any absolute tolerance
        // wide enough to be robust, yet carries no load and belongs to no
        // contact locus; an absolute cut alone would report it and smear
        // the line of action by half a millimeter.
        let band = (4.0 * nearest.max(1e-4 * contact_tol)).min(contact_tol);
        samples.retain(|s| s.1 <= band);
        let contact_points = cluster_contacts(samples, 4.0 * contact_tol);

        steps.push(MeshStep { theta1, theta2, max_penetration, min_gap, contact_points });
    }
    Ok(MeshReport { steps, contact_tol })
}

/// [`simulate_pair`] for an assembled constant-ratio pair: bakes the
/// assembly phases into the profiles, drives at the tooth-count ratio, and
/// sets the contact tolerance to 2% of the module.
pub fn simulate_assembly(asm: &GearAssembly, n_steps: usize) -> Result<MeshReport, MeshError> {
    let a = asm.gear1.boundary.transformed(&pose_a(asm.phase1));
    let b = asm.gear2.boundary.transformed(&pose_a(asm.phase2));
    let law = MotionLaw::uniform_ratio(asm.ratio(), 16);
    simulate_pair(&a, &b, asm.center_distance, &law, n_steps, 0.02 * asm.gear1.spec.module)
}

/// How far contact strays from where involute contact must live: the common
/// interior tangent of the two base circles, through the pitch point at the
/// pressure angle off the center-line normal. There are two such tangents,
/// one per drive direction, and a zero-backlash pair touches on both at
/// once, so each contact point is measured against the nearer of the two.
/// Returns the maximum over every contact point in the report.
pub fn line_of_action_error(asm: &GearAssembly, report: &MeshReport) -> Result<f64, MeshError> {
    let a1 = asm.gear1.spec.pressure_angle;
    let a2 = asm.gear2.spec.pressure_angle;
    if (a1 - a2).abs() > 1e-9 {
        return Err(MeshError::MixedPressureAngles(a1, a2));
    }
    let z1 = asm.gear1.spec.teeth as f64;
    let z2 = asm.gear2.spec.teeth as f64;
    let pitch_point = Point2::new(asm.center_distance * z1 / (z1 + z2), 0.0);
    let lines = [
        Point2::new(-a1.sin(), a1.cos()),
        Point2::new(a1.sin(), a1.cos()),
    ];
    let mut worst = 0.0f64;
    let mut any = false;
    for step in &report.steps {
        for &c in &step.contact_points {
            any = true;
            let offsets = lines.map(|dir| dir.cross(c - pitch_point).abs());
            worst = worst.max(offsets[0].min(offsets[1]));
        }
    }
    if !any {
        return Err(MeshError::NoContact);
    }
    Ok(worst)
}

/// Drives A through `theta1_end` in `n_steps` increments while B only ever
/// rotates as far as it must to stay clear of A — the pushed, not prescribed,
/// motion. Returns the (θ₁, θ₂) trace; its slope is the transmission ratio
/// the tooth surfaces actually enforce.
pub fn drive_by_contact(
    a_gear: &ClosedPolygon,
    b_gear: &ClosedPolygon,
    center_distance: f64,
    theta1_end: f64,
    n_steps: usize,
) -> Result<Vec<(f64, f64)>, MeshError> {
    if n_steps < 2 {
        return Err(MeshError::TooFewSteps(n_steps));
    }
    // Kernel snapping leaves ~1e-8·scale slivers where flanks kiss; anything
    // below this is "clear".
    const AREA_EPS: f64 = 1e-7;
    let overlap_area = |theta1: f64, theta2: f64| -> f64 {
        let a_w = a_gear.transformed(&pose_a(theta1));
        let b_w = b_gear.transformed(&pose_b(center_distance, theta2));
        polygon_boolean(
            std::slice::from_ref(&a_w),
            std::slice::from_ref(&b_w),
            BoolOp::Intersection,
        )
        .iter()
        .map(ClosedPolygon::area)
        .sum()
    };

    let dtheta1 = theta1_end / n_steps as f64;
    let mut trace = vec![(0.0, 0.0)];
    let mut theta2 = 0.0;
    let mut last_advance = dtheta1;
    for k in 1..=n_steps {
        let theta1 = theta1_end * k as f64 / n_steps as f64;
        if overlap_area(theta1, theta2) > AREA_EPS {
            // At zero backlash the clear window in θ₂ is vanishingly thin:
            // under-rotation digs the drive flanks in, over-rotation digs
            // the coast flanks in. The overlap area is unimodal between the
            // two, so golden-section search lands on the conjugate angle
            // where bracketing a clear interval never could.
            let phi = (5f64.sqrt() - 1.0) / 2.0;
            let lo = theta2;
            let mut span = (3.0 * last_advance).max(3.0 * dtheta1);
            let best = loop {
                let mut a = lo;
                let mut b = lo + span;
                let mut x1 = b - phi * (b - a);
                let mut x2 = a + phi * (b - a);
                let mut f1 = overlap_area(theta1, x1);
                let mut f2 = overlap_area(theta1, x2);
                while b - a > 1e-9 {
                    if f1 <= f2 {
                        b = x2;
                        x2 = x1;
                        f2 = f1;
                        x1 = b - phi * (b - a);
                        f1 = overlap_area(theta1, x1);
                    } else {
                        a = x1;
                        x1 = x2;
                        f1 = f2;
                        x2 = a + phi * (b - a);
                        f2 = overlap_area(theta1, x2);
                    }
                }
                let mid = 0.5 * (a + b);
                // Minimum pinned to the far edge means the bracket was too
                // short of the conjugate angle; widen and repeat.
                if mid < lo + 0.95 * span {
                    break mid;
                }
                span *= 2.0;
                if span > 1.0 {
                    return Err(MeshError::Jammed { theta1 });
                }
            };
            if overlap_area(theta1, best) > 1e-5 {
                return Err(MeshError::Jammed { theta1 });
            }
            last_advance = best - theta2;
            theta2 = best;
        }
        trace.push((theta1, theta2));
    }
    Ok(trace)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::acircular::{driven_motion, solve_center_distance};
    use crate::curvekit::PolarCurve;
    use crate::involute::{assemble_pair, make_spur_profile_sampled, make_trapezoid_profile, GearSpec};
    use crate::toothing::{cut_teeth, cut_teeth_with_phase};
    use crate::involute::RackSpec;
    use approx::assert_relative_eq;
    use std::f64::consts::{PI, TAU};

    fn disk(r: f64, sides: usize) -> ClosedPolygon {
        ClosedPolygon::new(
            (0..sides).map(|i| Point2::from_polar(r, TAU * i as f64 / sides as f64)).collect(),
            vec![],
        )
        .unwrap()
    }

    #[test]
    fn tangent_disks_touch_at_every_step() {
        let law = MotionLaw::uniform_ratio(0.5, 16);
        let report =
            simulate_pair(&disk(1.0, 1024), &disk(2.0, 1024), 3.0, &law, 24, 0.01).unwrap();
        assert_eq!(report.steps.len(), 24);
        for step in &report.steps {
            assert_eq!(step.max_penetration, 0.0);
            // Inscribed polygons sag below the true circles by r(1−cos π/n).
            assert!(step.min_gap < 2e-5, "gap {}", step.min_gap);
            assert!(!step.contact_points.is_empty());
        }
    }

    #[test]
    fn spaced_disks_report_their_clearance() {
        let law = MotionLaw::uniform_ratio(0.5, 16);
        let report =
            simulate_pair(&disk(1.0, 1024), &disk(2.0, 1024), 3.1, &law, 24, 0.01).unwrap();
        for step in &report.steps {
            assert_eq!(step.max_penetration, 0.0);
            assert!((step.min_gap - 0.1).abs() < 2e-5, "gap {}", step.min_gap);
            assert!(step.contact_points.is_empty());
        }
    }

    #[test]
    fn involute_pair_keeps_contact_within_bounds() {
        let asm = assemble_pair(&GearSpec::new(20, 2.0), &GearSpec::new(30, 2.0)).unwrap();
        let report = simulate_assembly(&asm, 60).unwrap();
        let m = 2.0;
        assert!(report.max_penetration() <= 1e-3 * m, "pen {}", report.max_penetration());
        assert!(report.worst_gap() <= 0.05 * m, "gap {}", report.worst_gap());
        for step in &report.steps {
            assert!(!step.contact_points.is_empty(), "no contact at θ₁ = {}", step.theta1);
        }
    }

    #[test]
    fn contact_rides_the_base_tangent_only_for_involutes() {
        let spec1 = GearSpec::new(20, 2.0);
        let spec2 = GearSpec::new(30, 2.0);
        let asm = assemble_pair(&spec1, &spec2).unwrap();
        let law = MotionLaw::uniform_ratio(asm.ratio(), 16);
        let tol = 0.02 * 2.0;
        // Fine flanks: a contact representative lands within half a vertex
        // spacing of the true contact, and the tip corner right at
        // disengagement (the one hover the closest-approach band still
        // admits) stays within the line-of-action bound below.
        let a = make_spur_profile_sampled(&spec1, 256)
            .unwrap()
            .boundary
            .transformed(&pose_a(asm.phase1));
        let b = make_spur_profile_sampled(&spec2, 256)
            .unwrap()
            .boundary
            .transformed(&pose_a(asm.phase2));
        let report = simulate_pair(&a, &b, asm.center_distance, &law, 60, tol).unwrap();
        let involute_err = line_of_action_error(&asm, &report).unwrap();
        assert!(involute_err <= 0.01 * 2.0, "involute strays {involute_err}");

        let ta = make_trapezoid_profile(&spec1, 16)
            .unwrap()
            .boundary
            .transformed(&pose_a(asm.phase1));
        let tb = make_trapezoid_profile(&spec2, 16)
            .unwrap()
            .boundary
            .transformed(&pose_a(asm.phase2));
        let control = simulate_pair(&ta, &tb, asm.center_distance, &law, 60, tol).unwrap();
        let control_err = line_of_action_error(&asm, &control).unwrap();
        assert!(
            control_err >= 5.0 * involute_err,
            "trapezoid {control_err} vs involute {involute_err}"
        );
    }

    #[test]
    fn swapping_the_pair_swaps_nothing_measurable() {
        let asm = assemble_pair(&GearSpec::new(20, 2.0), &GearSpec::new(30, 2.0)).unwrap();
        let a = asm.gear1.boundary.transformed(&pose_a(asm.phase1));
        let b = asm.gear2.boundary.transformed(&pose_a(asm.phase2));
        let law = MotionLaw::uniform_ratio(asm.ratio(), 16);
        let tol = 0.02 * 2.0;
        let fwd = simulate_pair(&a, &b, asm.center_distance, &law, 48, tol).unwrap();
        let rev =
            simulate_pair(&b, &a, asm.center_distance, &law.inverse(), 48, tol).unwrap();
        for (f, r) in fwd.steps.iter().zip(&rev.steps) {
            assert!((f.max_penetration - r.max_penetration).abs() < 1e-6);
            assert!((f.min_gap - r.min_gap).abs() < 1e-6);
        }
    }

    #[test]
    fn contact_driven_ratio_matches_the_tooth_counts() {
        let asm = assemble_pair(&GearSpec::new(20, 2.0), &GearSpec::new(30, 2.0)).unwrap();
        let a = make_spur_profile_sampled(&asm.gear1.spec, 32)
            .unwrap()
            .boundary
            .transformed(&pose_a(asm.phase1));
        let b = make_spur_profile_sampled(&asm.gear2.spec, 32)
            .unwrap()
            .boundary
            .transformed(&pose_a(asm.phase2));
        let trace = drive_by_contact(&a, &b, asm.center_distance, 0.6, 30).unwrap();
        let (t1a, t2a) = trace[1];
        let (t1b, t2b) = *trace.last().unwrap();
        let slope = (t2b - t2a) / (t1b - t1a);
        assert_relative_eq!(slope, 2.0 / 3.0, max_relative = 1e-3);
    }

    #[test]
    fn conjugate_acircular_pair_stays_in_contact() {
        let r1 = PolarCurve::from_fn(4096, |th| 12.0 * (1.0 + 0.2 * th.cos())).unwrap();
        let a = solve_center_distance(&r1, 1, 1).unwrap();
        let pair = driven_motion(&r1, a).unwrap();
        let teeth = 24u32;
        let len = r1.arclength(0.0, TAU).unwrap();
        let m = len / (teeth as f64 * PI);
        let rack = RackSpec::new(m, 1);
        let g1 = cut_teeth(&pair.r1, &rack, 12).unwrap();
        let g2 = cut_teeth_with_phase(&pair.r2, &rack, 12, 0.5).unwrap();
        let b = g2.boundary.transformed(&pose_a(PI));
        let report = simulate_pair(&g1.boundary, &b, a, &pair.law, 45, 0.02 * m).unwrap();
        assert!(report.worst_gap() <= 0.05 * m, "gap {} vs {}", report.worst_gap(), 0.05 * m);
        assert!(report.max_penetration() <= 1e-3 * m, "pen {}", report.max_penetration());
    }

    #[test]
    fn tsv_report_is_one_labelled_row_per_step() {
        let law = MotionLaw::uniform_ratio(0.5, 16);
        let report = simulate_pair(&disk(1.0, 256), &disk(2.0, 256), 3.0, &law, 8, 0.01).unwrap();
        let mut buf = Vec::new();
        report.write_tsv(&mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines.len(), 9);
        assert_eq!(lines[0], "theta1\ttheta2\tmax_penetration\tmin_gap\tcontacts");
        assert!(lines[1..].iter().all(|l| l.split('\t').count() == 5));
    }

    #[test]
    fn contactless_report_cannot_score_a_line_of_action() {
        let asm = assemble_pair(&GearSpec::new(20, 2.0), &GearSpec::new(30, 2.0)).unwrap();
        let report = MeshReport {
            steps: vec![MeshStep {
                theta1: 0.0,
                theta2: 0.0,
                max_penetration: 0.0,
                min_gap: 1.0,
                contact_points: vec![],
            }],
            contact_tol: 0.04,
        };
        assert!(matches!(line_of_action_error(&asm, &report), Err(MeshError::NoContact)));
    }

    #[test]
    fn pitch_point_contact_scores_zero() {
        let asm = assemble_pair(&GearSpec::new(20, 2.0), &GearSpec::new(30, 2.0)).unwrap();
        let report = MeshReport {
            steps: vec![MeshStep {
                theta1: 0.1,
                theta2: 0.1,
                max_penetration: 0.0,
                min_gap: 0.0,
                contact_points: vec![Point2::new(20.0, 0.0)],
            }],
            contact_tol: 0.04,
        };
        assert!(line_of_action_error(&asm, &report).unwrap() < 1e-12);
    }
}
