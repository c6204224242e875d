//! Entity builders: one strategy per document kind, behind a common trait
//! and looked up by kind name at runtime. Adding a kind means adding a
//! builder and registering it in [`BuilderRegistry::standard`]; nothing in
//! the orchestration layer enumerates kinds.

use std::f64::consts::{PI, TAU};

use anyhow::{bail, Context, Result};
use gearforge_core::acircular::{driven_motion, solve_center_distance, PitchPair};
use gearforge_core::alien::{carve_conjugate, GearRatio};
use gearforge_core::curvekit::{ClosedPolygon, Point2, PolarCurve, Polyline, RigidPose};
use gearforge_core::involute::{
    assemble_pair, make_rack_profile, make_spur_profile, GearSpec, RackSpec,
};
use gearforge_core::meshcheck::{simulate_assembly, simulate_pair, MeshReport};
use gearforge_core::solidify::{extrude, ExtrudeStyle, SolidMesh, SvgStyle};
use gearforge_core::trochoid::{epitrochoid, groove_band};

use crate::dsl::{Entity, TrainSpec};

/// A polygon ready to draw: geometry, placement, stroke/fill.
pub type Drawable = (ClosedPolygon, RigidPose, SvgStyle);

/// Turns one entity declaration into geometry, solids, simulations, or
/// solved quantities. Builders get the whole document so reference-bearing
/// kinds can look up what they name.
pub trait EntityBuilder: Send + Sync {
    /// The document kind this builder claims.
    fn kind(&self) -> &'static str;

    /// Posed planar geometry.
    fn drawables(&self, e: &Entity, spec: &TrainSpec) -> Result<Vec<Drawable>>;

    /// Solid for export: by default every drawable extruded in place, under
    /// the entity's `thickness`/`style` attributes, merged into one mesh.
    fn solid(&self, e: &Entity, spec: &TrainSpec) -> Result<SolidMesh> {
        let items = self.drawables(e, spec)?;
        extrusion_of(e, &items)
    }

    /// Kinematic simulation, for kinds that describe a running pair.
    fn check(&self, _e: &Entity, _spec: &TrainSpec, _steps: usize) -> Result<Option<MeshReport>> {
        Ok(None)
    }

    /// Derived quantities printed by `solve`, as key/value rows.
    fn solve(&self, _e: &Entity, _spec: &TrainSpec) -> Result<Vec<(String, f64)>> {
        Ok(Vec::new())
    }
}

pub struct BuilderRegistry {
    builders: Vec<Box<dyn EntityBuilder>>,
}

impl BuilderRegistry {
    /// Every kind the document language ships with.
    pub fn standard() -> Self {
        let mut reg = BuilderRegistry { builders: Vec::new() };
        reg.register(Box::new(GearBuilder));
        reg.register(Box::new(RackBuilder));
        reg.register(Box::new(AcircularPairBuilder));
        reg.register(Box::new(AlienBuilder));
        reg.register(Box::new(TrochoidBuilder));
        reg.register(Box::new(PairBuilder));
        reg
    }

    pub fn register(&mut self, builder: Box<dyn EntityBuilder>) {
        debug_assert!(
            !self.builders.iter().any(|b| b.kind() == builder.kind()),
            "kind registered twice"
        );
        self.builders.push(builder);
    }

    pub fn get(&self, kind: &str) -> Option<&dyn EntityBuilder> {
        self.builders.iter().find(|b| b.kind() == kind).map(|b| b.as_ref())
    }

    pub fn kinds(&self) -> Vec<&'static str> {
        self.builders.iter().map(|b| b.kind()).collect()
    }
}

/// Extrusion attributes shared by every solid-capable kind.
const SOLID_KEYS: [&str; 4] = ["thickness", "style", "twist_deg", "apex_height"];

fn extrusion_of(e: &Entity, items: &[Drawable]) -> Result<SolidMesh> {
    let thickness = e.number_or("thickness", 8.0)?;
    if !(thickness > 0.0) {
        return Err(e.out_of_range("thickness", "must be positive").into());
    }
    let style = match e.ident_or("style", "spur")? {
        "spur" => ExtrudeStyle::Spur,
        "helical" => ExtrudeStyle::Helical { twist: e.angle_or("twist_deg", PI / 6.0)? },
        "herringbone" => ExtrudeStyle::Herringbone { twist: e.angle_or("twist_deg", PI / 6.0)? },
        "bevel" => {
            let apex = e.number_or("apex_height", 3.0 * thickness)?;
            if apex <= thickness {
                return Err(e
                    .out_of_range("apex_height", format!("must exceed the thickness {thickness}"))
                    .into());
            }
            ExtrudeStyle::Bevel { apex_height: apex }
        }
        other => {
            return Err(e
                .out_of_range("style", format!("'{other}' is not spur|helical|herringbone|bevel"))
                .into())
        }
    };
    let mut meshes = Vec::with_capacity(items.len());
    for (poly, pose, _) in items {
        meshes.push(extrude(poly.transformed(pose), thickness, style)?);
    }
    merge_meshes(meshes)
}

/// Concatenates solids into one mesh; components must be disjoint, which
/// rebuilding through the validating constructor re-checks.
pub fn merge_meshes(meshes: Vec<SolidMesh>) -> Result<SolidMesh> {
    if meshes.is_empty() {
        bail!("nothing to export");
    }
    if meshes.len() == 1 {
        return Ok(meshes.into_iter().next().unwrap());
    }
    let mut vertices = Vec::new();
    let mut triangles = Vec::new();
    for m in &meshes {
        let base = vertices.len() as u32;
        vertices.extend_from_slice(m.vertices());
        triangles.extend(m.triangles().iter().map(|t| [t[0] + base, t[1] + base, t[2] + base]));
    }
    Ok(SolidMesh::new(vertices, triangles)?)
}

fn polar_polygon(curve: &PolarCurve) -> Result<ClosedPolygon> {
    let pts: Vec<Point2> = curve
        .samples()
        .iter()
        .map(|&(th, r)| Point2::new(r * th.cos(), r * th.sin()))
        .collect();
    Ok(ClosedPolygon::new(pts, Vec::new())?)
}

/// Placement of the driven member of a rolling pair: its polar origin faces
/// back along the center line from (a, 0).
fn driven_pose(a: f64) -> RigidPose {
    RigidPose::rotation_about(Point2::ORIGIN, PI).then(&RigidPose::translation(Point2::new(a, 0.0)))
}

struct GearBuilder;

fn gear_spec_of(e: &Entity) -> Result<GearSpec> {
    let mut allowed = vec!["teeth", "module", "pressure_angle_deg", "addendum", "dedendum", "cutout"];
    allowed.extend(SOLID_KEYS);
    e.check_keys(&allowed)?;
    let mut spec = GearSpec::new(e.require_count("teeth")?, e.require_number("module")?);
    spec.pressure_angle = e.angle_or("pressure_angle_deg", spec.pressure_angle)?;
    spec.addendum_coef = e.number_or("addendum", spec.addendum_coef)?;
    spec.dedendum_coef = e.number_or("dedendum", spec.dedendum_coef)?;
    spec.cutout_coef = e.number_or("cutout", spec.cutout_coef)?;
    spec.validate()?;
    Ok(spec)
}

impl EntityBuilder for GearBuilder {
    fn kind(&self) -> &'static str {
        "gear"
    }

    fn drawables(&self, e: &Entity, _spec: &TrainSpec) -> Result<Vec<Drawable>> {
        let profile = make_spur_profile(&gear_spec_of(e)?)?;
        Ok(vec![(profile.boundary, RigidPose::identity(), SvgStyle::default())])
    }
}

struct RackBuilder;

impl EntityBuilder for RackBuilder {
    fn kind(&self) -> &'static str {
        "rack"
    }

    fn drawables(&self, e: &Entity, _spec: &TrainSpec) -> Result<Vec<Drawable>> {
        let mut allowed = vec!["module", "teeth", "pressure_angle_deg", "base_depth"];
        allowed.extend(SOLID_KEYS);
        e.check_keys(&allowed)?;
        let mut spec = RackSpec::new(e.require_number("module")?, e.count_or("teeth", 8)?);
        spec.pressure_angle = e.angle_or("pressure_angle_deg", spec.pressure_angle)?;
        spec.validate()?;
        let base_depth = e.number_or("base_depth", 1.5 * spec.module)?;
        if !(base_depth > 0.0) {
            return Err(e.out_of_range("base_depth", "must be positive").into());
        }
        // The tooth line is open; close it into a bar by dropping below the
        // deepest trough.
        let teeth_line = make_rack_profile(&spec)?;
        let mut pts = teeth_line.points().to_vec();
        let floor = pts.iter().map(|p| p.y).fold(f64::INFINITY, f64::min) - base_depth;
        let (first, last) = (pts[0], *pts.last().unwrap());
        pts.push(Point2::new(last.x, floor));
        pts.push(Point2::new(first.x, floor));
        Ok(vec![(ClosedPolygon::new(pts, Vec::new())?, RigidPose::identity(), SvgStyle::default())])
    }
}

struct AcircularPairBuilder;

/// The one-parameter family of pitch curves the document language exposes:
/// r(θ) = r0·(1 + ecc·cos θ). Eccentricity 0 is a plain disk pair.
fn limacon_pair(e: &Entity) -> Result<(PitchPair, f64)> {
    let mut allowed = vec!["r0", "eccentricity", "p", "q", "samples"];
    allowed.extend(SOLID_KEYS);
    e.check_keys(&allowed)?;
    let r0 = e.require_number("r0")?;
    if !(r0 > 0.0) {
        return Err(e.out_of_range("r0", "must be positive").into());
    }
    let ecc = e.number_or("eccentricity", 0.0)?;
    if ecc.abs() >= 1.0 {
        return Err(e.out_of_range("eccentricity", "must lie in (-1, 1) to keep the radius positive").into());
    }
    let p = e.count_or("p", 1)?.max(1);
    let q = e.count_or("q", 1)?.max(1);
    let samples = e.count_or("samples", 4096)?.max(64) as usize;
    let r1 = PolarCurve::from_fn(samples, |th| r0 * (1.0 + ecc * th.cos()))?;
    let a = solve_center_distance(&r1, p, q)?;
    let pair = driven_motion(&r1, a)?;
    Ok((pair, a))
}

impl EntityBuilder for AcircularPairBuilder {
    fn kind(&self) -> &'static str {
        "acircular_pair"
    }

    fn drawables(&self, e: &Entity, _spec: &TrainSpec) -> Result<Vec<Drawable>> {
        let (pair, a) = limacon_pair(e)?;
        Ok(vec![
            (polar_polygon(&pair.r1)?, RigidPose::identity(), SvgStyle::default()),
            (polar_polygon(&pair.r2)?, driven_pose(a), SvgStyle::default()),
        ])
    }

    fn check(&self, e: &Entity, _spec: &TrainSpec, steps: usize) -> Result<Option<MeshReport>> {
        let (pair, a) = limacon_pair(e)?;
        let drive = polar_polygon(&pair.r1)?;
        let driven = polar_polygon(&pair.r2)?
            .transformed(&RigidPose::rotation_about(Point2::ORIGIN, PI));
        let contact_tol = 1e-2 * a;
        let report = simulate_pair(&drive, &driven, a, &pair.law, steps.max(2), contact_tol)?;
        Ok(Some(report))
    }

    fn solve(&self, e: &Entity, _spec: &TrainSpec) -> Result<Vec<(String, f64)>> {
        let (pair, a) = limacon_pair(e)?;
        let (theta1_end, theta2_end) = pair.law.end();
        Ok(vec![
            ("a".into(), a),
            ("theta1_span".into(), theta1_end),
            ("theta2_span".into(), theta2_end),
            ("closure_turns_drive".into(), theta1_end / TAU),
            ("closure_turns_driven".into(), theta2_end / TAU),
        ])
    }
}

struct AlienBuilder;

impl EntityBuilder for AlienBuilder {
    fn kind(&self) -> &'static str {
        "alien"
    }

    /// The drive shape (a disk here — the document language keeps arbitrary
    /// blobs out of scope) plus the conjugate region carved for it in the
    /// driven frame.
    fn drawables(&self, e: &Entity, _spec: &TrainSpec) -> Result<Vec<Drawable>> {
        let mut allowed = vec!["radius", "center_distance", "ratio_num", "ratio_den", "poses", "samples"];
        allowed.extend(SOLID_KEYS);
        e.check_keys(&allowed)?;
        let d = e.require_number("radius")?;
        let a = e.require_number("center_distance")?;
        if !(d > 0.0) {
            return Err(e.out_of_range("radius", "must be positive").into());
        }
        if a <= d {
            return Err(e
                .out_of_range("center_distance", format!("must exceed the drive radius {d}"))
                .into());
        }
        let ratio = GearRatio::new(e.count_or("ratio_num", 1)?, e.count_or("ratio_den", 1)?);
        let poses = e.count_or("poses", 720)?.max(8) as usize;
        let samples = e.count_or("samples", 256)?.max(16) as usize;
        let disk: Vec<Point2> = (0..samples)
            .map(|k| {
                let th = TAU * k as f64 / samples as f64;
                Point2::new(d * th.cos(), d * th.sin())
            })
            .collect();
        let drive = ClosedPolygon::new(disk, Vec::new())?;
        let carved =
            carve_conjugate(&drive, Point2::ORIGIN, Point2::new(a, 0.0), ratio, poses)?;
        Ok(vec![
            (drive, RigidPose::identity(), SvgStyle::default()),
            // carve output is already placed about the driven pivot
            (carved, RigidPose::identity(), SvgStyle::default()),
        ])
    }
}

struct TrochoidBuilder;

impl EntityBuilder for TrochoidBuilder {
    fn kind(&self) -> &'static str {
        "trochoid"
    }

    fn drawables(&self, e: &Entity, _spec: &TrainSpec) -> Result<Vec<Drawable>> {
        let mut allowed = vec!["ring_radius", "roller_radius", "arm", "peg_radius", "samples"];
        allowed.extend(SOLID_KEYS);
        e.check_keys(&allowed)?;
        let big_r = e.require_number("ring_radius")?;
        let small_r = e.require_number("roller_radius")?;
        if !(big_r > 0.0 && small_r > 0.0) {
            return Err(e.out_of_range("roller_radius", "radii must be positive").into());
        }
        let arm = e.number_or("arm", small_r)?;
        if arm < 0.0 {
            return Err(e.out_of_range("arm", "must be non-negative").into());
        }
        let peg = e.require_number("peg_radius")?;
        let per_turn = e.count_or("samples", 1024)?.max(64) as usize;

        // The path closes once the roller has gone around a whole number of
        // times AND returned to its starting angle: k turns with k·R/r
        // integral.
        let turns = (1..=64)
            .find(|&k| {
                let lobes = k as f64 * big_r / small_r;
                (lobes - lobes.round()).abs() < 1e-9 * lobes.max(1.0)
            })
            .ok_or_else(|| {
                e.out_of_range("roller_radius", format!("path never closes: {big_r}/{small_r} is not a ratio of small whole numbers"))
            })?;
        let n = per_turn * turns;
        let pts: Vec<Point2> = (0..=n)
            .map(|i| epitrochoid(big_r, small_r, arm, TAU * turns as f64 * i as f64 / n as f64))
            .collect();
        let band = groove_band(&Polyline::new(pts)?, peg)?;
        Ok(vec![(band, RigidPose::identity(), SvgStyle::default())])
    }
}

struct PairBuilder;

fn gear_pair_of(e: &Entity, spec: &TrainSpec) -> Result<(GearSpec, GearSpec)> {
    let mut allowed = vec!["drive", "driven"];
    allowed.extend(SOLID_KEYS);
    e.check_keys(&allowed)?;
    let mut specs = Vec::with_capacity(2);
    for key in ["drive", "driven"] {
        let name = e.require_ident(key)?;
        // parse_spec resolved the name; the kind still has to fit.
        let target = spec
            .get(name)
            .with_context(|| format!("'{name}' vanished between parse and build"))?;
        if target.kind != "gear" {
            return Err(e
                .out_of_range(key, format!("'{name}' is a {}, pairs mesh two gears", target.kind))
                .into());
        }
        specs.push(
            gear_spec_of(target).with_context(|| format!("entity '{}'", target.name))?,
        );
    }
    let driven = specs.pop().unwrap();
    Ok((specs.pop().unwrap(), driven))
}

impl EntityBuilder for PairBuilder {
    fn kind(&self) -> &'static str {
        "pair"
    }

    fn drawables(&self, e: &Entity, spec: &TrainSpec) -> Result<Vec<Drawable>> {
        let (s1, s2) = gear_pair_of(e, spec)?;
        let asm = assemble_pair(&s1, &s2)?;
        let pose1 = RigidPose::rotation_about(Point2::ORIGIN, asm.phase1);
        let pose2 = RigidPose::rotation_about(Point2::ORIGIN, asm.phase2)
            .then(&RigidPose::translation(Point2::new(asm.center_distance, 0.0)));
        Ok(vec![
            (asm.gear1.boundary, pose1, SvgStyle::default()),
            (asm.gear2.boundary, pose2, SvgStyle::default()),
        ])
    }

    fn check(&self, e: &Entity, spec: &TrainSpec, steps: usize) -> Result<Option<MeshReport>> {
        let (s1, s2) = gear_pair_of(e, spec)?;
        let asm = assemble_pair(&s1, &s2)?;
        Ok(Some(simulate_assembly(&asm, steps.max(2))?))
    }

    fn solve(&self, e: &Entity, spec: &TrainSpec) -> Result<Vec<(String, f64)>> {
        let (s1, s2) = gear_pair_of(e, spec)?;
        let asm = assemble_pair(&s1, &s2)?;
        Ok(vec![
            ("a".into(), asm.center_distance),
            ("ratio".into(), asm.ratio()),
        ])
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dsl::parse_spec;

    fn entity(text: &str) -> TrainSpec {
        parse_spec(text).unwrap()
    }

    #[test]
    fn registry_resolves_every_shipped_kind() {
        let reg = BuilderRegistry::standard();
        for kind in ["gear", "rack", "acircular_pair", "alien", "trochoid", "pair"] {
            assert!(reg.get(kind).is_some(), "missing {kind}");
        }
        assert!(reg.get("sprocket").is_none());
    }

    #[test]
    fn gear_builder_draws_one_polygon_and_extrudes_it() {
        let spec = entity("gear g { teeth = 12 module = 1.5 thickness = 4 }");
        let reg = BuilderRegistry::standard();
        let b = reg.get("gear").unwrap();
        let items = b.drawables(&spec.entities[0], &spec).unwrap();
        assert_eq!(items.len(), 1);
        let mesh = b.solid(&spec.entities[0], &spec).unwrap();
        assert!(mesh.volume() > 0.0);
    }

    #[test]
    fn unknown_attribute_fails_the_build() {
        let spec = entity("gear g { teeth = 12 module = 1.5 modle = 2 }");
        let reg = BuilderRegistry::standard();
        let err = reg.get("gear").unwrap().drawables(&spec.entities[0], &spec).unwrap_err();
        assert!(err.to_string().contains("modle"), "{err}");
    }

    #[test]
    fn rack_body_is_closed_and_positive() {
        let spec = entity("rack r { module = 2 teeth = 5 }");
        let reg = BuilderRegistry::standard();
        let items = reg.get("rack").unwrap().drawables(&spec.entities[0], &spec).unwrap();
        assert_eq!(items.len(), 1);
        assert!(items[0].0.area() > 0.0);
    }

    #[test]
    fn disk_pair_solves_to_twice_the_radius() {
        let spec = entity("acircular_pair d { r0 = 1.0 samples = 512 }");
        let reg = BuilderRegistry::standard();
        let rows = reg.get("acircular_pair").unwrap().solve(&spec.entities[0], &spec).unwrap();
        let a = rows.iter().find(|r| r.0 == "a").unwrap().1;
        assert!((a - 2.0).abs() < 1e-9, "a = {a}");
    }

    #[test]
    fn pair_builder_rejects_non_gear_references() {
        let spec = entity(
            "gear g { teeth = 10 module = 1 }\n\
             rack r { module = 1 }\n\
             pair p { drive = g driven = r }",
        );
        let reg = BuilderRegistry::standard();
        let err = reg.get("pair").unwrap().drawables(&spec.entities[2], &spec).unwrap_err();
        assert!(err.to_string().contains("rack"), "{err}");
    }
}
