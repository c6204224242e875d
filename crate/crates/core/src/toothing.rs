//! Tooth cutting by rack envelope. A trapezoidal rack rolls without slipping
//! around a pitch curve — circular or not — and every material polygon it
//! occupies along the way is subtracted from an addendum-offset blank. What
//! survives is the gear: the rack's straight flanks envelope the tooth
//! flanks (involutes, when the pitch curve is a circle), its crown flats
//! sweep the root land, and its tip corners trace the root fillets,
//! including genuine undercut on small gears.
//!
//! The pitch curve must close with an integer number of circular pitches
//! (arclength = n·π·m); teeth come out counterclockwise with tooth 0
//! centered on the arclength origin θ = 0.

use std::f64::consts::TAU;

use thiserror::Error;

use crate::curvekit::{
    find_root, polygon_boolean, union_tree, BoolOp, ClosedPolygon, CurveError, Point2, PolarCurve,
    RigidPose,
};
use crate::involute::{GearError, GearProfile, GearSpec, RackSpec};

#[derive(Debug, Error)]
pub enum ToothingError {
    #[error(
        "pitch curve arclength {arclength} is {teeth} circular pitches (module {module}); \
         need an integer count within 0.1%"
    )]
    Incompatible {
        arclength: f64,
        module: f64,
        teeth: f64,
    },
    #[error("envelope resolution failure: {0}")]
    Envelope(String),
    #[error(transparent)]
    Gear(#[from] GearError),
    #[error(transparent)]
    Curve(#[from] CurveError),
}

/// Cumulative-arclength table over a polar curve's own breakpoints, for
/// inverting arclength → angle one rolling station at a time.
struct ArcStations<'a> {
    pitch: &'a PolarCurve,
    /// Breakpoint angles, ending at 2π.
    thetas: Vec<f64>,
    /// cum[i] = arclength from θ=0 to thetas[i]; cum[0] = 0 at θ = 0.
    cum: Vec<f64>,
}

impl<'a> ArcStations<'a> {
    fn new(pitch: &'a PolarCurve) -> Result<Self, CurveError> {
        let mut thetas: Vec<f64> = pitch.samples().iter().map(|s| s.0).collect();
        thetas.push(TAU);
        let mut cum = Vec::with_capacity(thetas.len());
        cum.push(0.0);
        for w in thetas.windows(2) {
            let seg = pitch.arclength(w[0], w[1])?;
            cum.push(cum.last().unwrap() + seg);
        }
        Ok(ArcStations { pitch, thetas, cum })
    }

    fn total(&self) -> f64 {
        *self.cum.last().unwrap()
    }

    /// Angle at which the curve has swept arclength `s` from θ = 0.
    fn theta_at(&self, s: f64) -> Result<f64, CurveError> {
        let s = s.clamp(0.0, self.total());
        let i = self.cum.partition_point(|&c| c <= s).min(self.cum.len() - 1);
        if i == 0 {
            return Ok(0.0);
        }
        let (lo, hi) = (self.thetas[i - 1], self.thetas[i]);
        let rem = s - self.cum[i - 1];
        if rem <= 0.0 {
            return Ok(lo);
        }
        if rem >= self.cum[i] - self.cum[i - 1] {
            return Ok(hi);
        }
        let pitch = self.pitch;
        let th = find_root(
            |t| pitch.arclength(lo, t).unwrap_or(f64::NAN) - rem,
            lo,
            hi,
            1e-13,
        )
        .map_err(|e| CurveError::Parameter(format!("arclength inversion stalled: {e}")))?;
        Ok(th)
    }
}

/// Unit tangent of the interpolated polar curve, taken from the segment
/// starting at `theta` when `theta` is exactly a breakpoint.
fn tangent_of(pitch: &PolarCurve, theta: f64) -> Point2 {
    let th = theta.rem_euclid(TAU);
    let samples = pitch.samples();
    let i = samples
        .partition_point(|s| s.0 <= th)
        .clamp(1, samples.len())
        - 1;
    let (t0, r0) = samples[i];
    let (t1, r1) = if i + 1 < samples.len() {
        samples[i + 1]
    } else {
        (TAU, samples[0].1)
    };
    let slope = (r1 - r0) / (t1 - t0);
    let r = r0 + slope * (th - t0);
    let (sin, cos) = th.sin_cos();
    Point2::new(slope * cos - r * sin, slope * sin + r * cos).normalized()
}

/// Pitch curve offset outward along its normal by `offset`, as a closed
/// polygon. Slope breaks in the radius turn into corners of the curve;
/// convex corners get a 16-segment arc join so the offset stays faithful.
fn offset_blank(pitch: &PolarCurve, offset: f64) -> Result<ClosedPolygon, CurveError> {
    const MIN_VERTICES: usize = 8192;
    const CORNER_SEGMENTS: usize = 16;
    let step = TAU / MIN_VERTICES as f64;
    let mut thetas: Vec<f64> = pitch.samples().iter().map(|s| s.0).collect();
    thetas.push(TAU);
    let mut pts: Vec<Point2> = Vec::with_capacity(MIN_VERTICES + thetas.len());
    for w in thetas.windows(2) {
        let span = w[1] - w[0];
        if span <= 0.0 {
            continue;
        }
        // Corner fan where the tangent turns left across the breakpoint.
        let t_in = tangent_of(pitch, w[0] - 1e-12);
        let t_out = tangent_of(pitch, w[0]);
        let turn = t_in.cross(t_out).atan2(t_in.dot(t_out));
        if turn > 1e-3 {
            let p = pitch.point_at(w[0]);
            let n_in = -t_in.perp();
            for k in 1..CORNER_SEGMENTS {
                let ang = turn * k as f64 / CORNER_SEGMENTS as f64;
                pts.push(p + n_in.rotated(ang) * offset);
            }
        }
        let sub = (span / step).ceil().max(1.0) as usize;
        for j in 0..sub {
            let th = w[0] + span * j as f64 / sub as f64;
            let n_out = -tangent_of(pitch, th).perp();
            pts.push(pitch.point_at(th) + n_out * offset);
        }
    }
    ClosedPolygon::new(pts, vec![])
}

/// Tooth count implied by the pitch curve's arclength, or the
/// incompatibility error when it is not an integer number of pitches.
fn tooth_count(stations: &ArcStations, rack: &RackSpec) -> Result<(u32, f64), ToothingError> {
    let len = stations.total();
    let teeth = len / (std::f64::consts::PI * rack.module);
    let n = teeth.round();
    if (teeth - n).abs() > 1e-3 * teeth || n < 4.0 {
        return Err(ToothingError::Incompatible {
            arclength: len,
            module: rack.module,
            teeth,
        });
    }
    Ok((n as u32, len))
}

/// Rack poses for rolling around `pitch` without slipping: pose k puts the
/// rack's pitch line (its local x-axis) tangent to the curve at arclength
/// s_k = k·L/N, slid along itself so that the rack point (s_k, 0) is the
/// contact point. N = teeth · samples_per_tooth poses cover one revolution.
///
/// The rack's +y side faces the inside of the pitch curve, so its teeth
/// point into the material they would cut.
pub fn roll_rack_poses(
    pitch: &PolarCurve,
    rack: &RackSpec,
    samples_per_tooth: usize,
) -> Result<Vec<RigidPose>, ToothingError> {
    rack.validate()?;
    let stations = ArcStations::new(pitch)?;
    let (n, len) = tooth_count(&stations, rack)?;
    let count = n as usize * samples_per_tooth.max(1);
    let mut poses = Vec::with_capacity(count);
    for k in 0..count {
        let s = len * k as f64 / count as f64;
        let theta = stations.theta_at(s)?;
        let t = tangent_of(pitch, theta);
        let beta = t.y.atan2(t.x);
        let translation = pitch.point_at(theta) - Point2::new(s, 0.0).rotated(beta);
        poses.push(RigidPose {
            rotation: beta,
            pivot: Point2::ORIGIN,
            translation,
        });
    }
    Ok(poses)
}

/// One tooth of the cutting rack in rack-local coordinates (pitch line =
/// x-axis, tooth pointing up, centered at station `t`), closed by the chord
/// between its flank feet. Everything below the trough line lies outside
/// the blank, so single teeth are the only rack material that ever cuts;
/// the rest of the rack need not be modeled. Also returns the tooth's
/// cutting edges (left flank, crown, right flank) so consecutive placements
/// of the same edge can be bridged by a swept cover.
fn tooth_die(rack: &RackSpec, t: f64) -> (Vec<Point2>, Vec<(u8, Point2, Point2)>) {
    let m = rack.module;
    let p = rack.pitch();
    let tan_a = rack.pressure_angle.tan();
    let crown_y = rack.addendum_coef * m;
    let trough_y = -rack.dedendum_coef * m;
    let crown_half = p / 4.0 - crown_y * tan_a;
    let trough_half = p / 4.0 + trough_y * tan_a;
    let (lb, rb) = if trough_half > 0.0 {
        let k = p / 4.0 - trough_y * tan_a;
        (Point2::new(t - k, trough_y), Point2::new(t + k, trough_y))
    } else {
        // Adjacent flanks meet in a point below the trough line.
        let dip = -p / (4.0 * tan_a);
        (Point2::new(t - p / 2.0, dip), Point2::new(t + p / 2.0, dip))
    };
    let crowns = if crown_half > 0.0 {
        vec![
            Point2::new(t - crown_half, crown_y),
            Point2::new(t + crown_half, crown_y),
        ]
    } else {
        vec![Point2::new(t, p / (4.0 * tan_a))]
    };
    let mut edges = vec![(0u8, lb, crowns[0])];
    if crowns.len() == 2 {
        edges.push((1, crowns[0], crowns[1]));
    }
    edges.push((2, crowns[crowns.len() - 1], rb));
    let mut ring = vec![lb];
    ring.extend_from_slice(&crowns);
    ring.push(rb);
    (ring, edges)
}

/// Proper interior crossing of segments ab and cd.
fn segment_crossing(a: Point2, b: Point2, c: Point2, d: Point2) -> Option<Point2> {
    let r = b - a;
    let s = d - c;
    let denom = r.cross(s);
    if denom.abs() < 1e-15 {
        return None;
    }
    let t = (c - a).cross(s) / denom;
    let u = (c - a).cross(r) / denom;
    const EPS: f64 = 1e-9;
    if t > EPS && t < 1.0 - EPS && u > EPS && u < 1.0 - EPS {
        Some(a + r * t)
    } else {
        None
    }
}

/// Region swept by an edge moving from (a0, b0) to (a1, b1), linearized:
/// a simple quad when the placements do not cross, the two lobes about the
/// crossing point when they do (a rotating flank line crosses itself — the
/// bowtie must be split or a fill rule would drop one lobe). Sub-snap
/// placements contribute nothing and are dropped.
fn swept_edge_cover(a0: Point2, b0: Point2, a1: Point2, b1: Point2, out: &mut Vec<ClosedPolygon>) {
    if let Some(x) = segment_crossing(a0, b0, a1, b1) {
        for tri in [[a0, a1, x], [b0, b1, x]] {
            if let Ok(poly) = ClosedPolygon::new(tri.to_vec(), vec![]) {
                out.push(poly);
            }
        }
        return;
    }
    for cand in [[a0, b0, b1, a1], [a0, b0, a1, b1]] {
        let diagonals_ok = segment_crossing(cand[0], cand[1], cand[2], cand[3]).is_none()
            && segment_crossing(cand[1], cand[2], cand[3], cand[0]).is_none();
        if !diagonals_ok {
            continue;
        }
        if let Ok(poly) = ClosedPolygon::new(cand.to_vec(), vec![]) {
            out.push(poly);
        }
        return;
    }
}

/// Signed-distance sign changes of the boundary against the pitch curve:
/// each tooth crosses it exactly twice (once per flank).
fn pitch_crossings(boundary: &ClosedPolygon, pitch: &PolarCurve) -> usize {
    let mut crossings = 0;
    let mut prev = 0.0f64;
    let outer = boundary.outer();
    for &v in outer.iter().chain(outer.first()) {
        let d = v.norm() - pitch.eval(v.angle());
        if d.abs() < 1e-12 {
            continue;
        }
        if prev != 0.0 && d.signum() != prev.signum() {
            crossings += 1;
        }
        prev = d;
    }
    crossings
}

/// Cut teeth on a pitch curve by rolling `rack` around it and subtracting
/// the union of its material polygons from the addendum-offset blank. The
/// resulting gear has a tooth centered on θ = 0; its root depth equals the
/// rack's addendum (that is how far the cutter's teeth reach past the pitch
/// line) and its tip height equals the blank offset, also the addendum.
///
/// Retries once with doubled `samples_per_tooth` if the envelope comes out
/// unresolvable (non-simple, fragmented, or with a wrong tooth count).
pub fn cut_teeth(
    pitch: &PolarCurve,
    rack: &RackSpec,
    samples_per_tooth: usize,
) -> Result<GearProfile, ToothingError> {
    cut_teeth_with_phase(pitch, rack, samples_per_tooth, 0.0)
}

/// As [`cut_teeth`], with the rack slid `phase` tooth-pitches along its
/// pitch line before rolling; the cut teeth shift by the same fraction of
/// an angular pitch. Phase ½ is the complementary cut — gaps where
/// [`cut_teeth`] makes teeth — used for the driven member of a pair.
pub fn cut_teeth_with_phase(
    pitch: &PolarCurve,
    rack: &RackSpec,
    samples_per_tooth: usize,
    phase: f64,
) -> Result<GearProfile, ToothingError> {
    rack.validate()?;
    let stations = ArcStations::new(pitch)?;
    let (n, len) = tooth_count(&stations, rack)?;
    let spt = samples_per_tooth.max(1);
    match cut_attempt(pitch, &stations, rack, n, len, spt, phase) {
        Ok(profile) => Ok(profile),
        Err(ToothingError::Envelope(first)) => {
            log::warn!("envelope unresolved at {spt} samples per tooth ({first}); retrying at {}", 2 * spt);
            cut_attempt(pitch, &stations, rack, n, len, 2 * spt, phase)
        }
        Err(e) => Err(e),
    }
}

fn cut_attempt(
    pitch: &PolarCurve,
    stations: &ArcStations,
    rack: &RackSpec,
    n: u32,
    len: f64,
    samples_per_tooth: usize,
    phase: f64,
) -> Result<GearProfile, ToothingError> {
    let m = rack.module;
    let p = rack.pitch();
    let r_max = pitch.max_radius();
    // A rack tooth can engage the blank only while its depth below the
    // tangent line beats the pitch curve's quadratic fall-away; the 4·r_max
    // curvature-radius cap covers every near-circular pitch curve (the
    // flatter the curve, the longer the engagement, so strongly elongated
    // curves would need a wider window).
    let reach = (2.0 * (rack.addendum_coef + rack.dedendum_coef) * m * 4.0 * r_max)
        .sqrt()
        .max(3.0 * p)
        .min(len / 2.0);
    let blank = offset_blank(pitch, rack.addendum_coef * m)?;
    // The boolean kernel snaps coordinates at ~2⁻³⁰ of its operands' extent,
    // and unioning thousands of near-identical die placements leaves
    // doubled-back micro-edges of that scale at edge junctions — phantom
    // pinches that fail the simplicity check while the real envelope is
    // clean. Scrub below 16 snap quanta; genuine envelope facets are orders
    // of magnitude larger at any sane station count.
    let (blo, bhi) = blank.bounds();
    let despike_tol = (bhi.x - blo.x).max(bhi.y - blo.y) * 2f64.powi(-26);

    // Rack tooth j digs gap j and nothing else, so the envelope decomposes
    // into n independent local sweeps instead of one global union of every
    // pose — the global union resolves quadratically many far-apart overlaps
    // and dominates the cost at any useful resolution. Stations are indexed
    // by a signed pose number so a sweep straddling the arclength origin
    // needs no seam handling: the grid tooth at station t cuts the same
    // world polygon whether addressed at s or at s ± len.
    let count = n as usize * samples_per_tooth;
    let ds = len / count as f64;
    let span = (reach / ds).ceil() as i64;
    let mut sweeps: Vec<ClosedPolygon> = Vec::with_capacity(n as usize);
    for j in 0..n as i64 {
        let t_j = (j as f64 + 0.5 + phase) * p;
        let (ring, edges) = tooth_die(rack, t_j);
        let k_mid = (t_j / ds).round() as i64;
        let mut local: Vec<ClosedPolygon> = Vec::new();
        let mut prev: Vec<(u8, Point2, Point2)> = Vec::new();
        for k in (k_mid - span)..=(k_mid + span) {
            let s = k as f64 * ds;
            let theta = stations.theta_at(s.rem_euclid(len))?;
            let t = tangent_of(pitch, theta);
            let beta = t.y.atan2(t.x);
            let origin = pitch.point_at(theta) - Point2::new(s, 0.0).rotated(beta);
            let world: Vec<Point2> = ring.iter().map(|q| q.rotated(beta) + origin).collect();
            local.push(
                ClosedPolygon::new(world, vec![])
                    .map_err(|e| ToothingError::Envelope(format!("degenerate tooth die: {e}")))?,
            );
            // Bridge each cutting edge to its previous placement with the
            // (linearized) region it sweeps: the union of static placements
            // alone is only first-order accurate where the crown corners
            // sweep the root fillet.
            let current: Vec<(u8, Point2, Point2)> = edges
                .iter()
                .map(|&(tag, a, b)| (tag, a.rotated(beta) + origin, b.rotated(beta) + origin))
                .collect();
            for (&(_, a0, b0), &(_, a1, b1)) in prev.iter().zip(&current) {
                swept_edge_cover(a0, b0, a1, b1, &mut local);
            }
            prev = current;
        }
        sweeps.extend(union_tree(&local).iter().map(|p| p.despiked(despike_tol)));
    }

    let mut cut = polygon_boolean(&[blank], &sweeps, BoolOp::Difference);
    if cut.len() != 1 {
        return Err(ToothingError::Envelope(format!(
            "cut split the blank into {} pieces",
            cut.len()
        )));
    }
    let mut boundary = cut.remove(0).despiked(despike_tol);
    if !boundary.holes().is_empty() {
        return Err(ToothingError::Envelope(format!(
            "cut left {} internal voids",
            boundary.holes().len()
        )));
    }
    // Junction junk grows with station count (snap noise amplified by
    // 1/sin of the crossing angle between consecutive die edges), so no
    // fixed tolerance covers every resolution: escalate until the boundary
    // is simple. Anything needing more than 1e-3·m of smoothing is a real
    // self-intersection, not noise.
    let mut tol = despike_tol;
    while !boundary.is_simple() {
        tol *= 4.0;
        if tol > 1e-3 * m {
            return Err(ToothingError::Envelope(
                "cut boundary self-intersects".to_string(),
            ));
        }
        boundary = boundary.despiked(tol);
    }
    let crossings = pitch_crossings(&boundary, pitch);
    if crossings != 2 * n as usize {
        return Err(ToothingError::Envelope(format!(
            "expected {} pitch-curve crossings for {n} teeth, found {crossings}",
            2 * n
        )));
    }

    let pitch_radius = len / TAU;
    Ok(GearProfile {
        boundary,
        pitch_radius,
        base_radius: pitch_radius * rack.pressure_angle.cos(),
        spec: GearSpec {
            teeth: n,
            module: m,
            pressure_angle: rack.pressure_angle,
            addendum_coef: rack.addendum_coef,
            // Roots sit one cutter-addendum below the pitch curve.
            dedendum_coef: rack.addendum_coef,
            cutout_coef: 0.0,
        },
    })
}
