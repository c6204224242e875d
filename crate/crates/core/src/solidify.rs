//! Planar profiles to printable solids. A profile is swept along z through a
//! stack of similarity transforms (rotation and/or scaling per level), the
//! side walls become quad strips, and the end caps are ear-clipped. Writers
//! emit binary STL for solids and a small SVG subset for drawings.

use std::collections::HashMap;
use std::io::Write;

use thiserror::Error;

use crate::curvekit::{ClosedPolygon, Point2, RigidPose};
use crate::involute::GearProfile;

#[derive(Debug, Error)]
pub enum SolidError {
    #[error("profile boundary self-intersects")]
    NonSimpleProfile,
    #[error("thickness must be positive, got {0}")]
    BadThickness(f64),
    #[error("cone apex at height {apex_height} sits inside a solid of thickness {thickness}")]
    ApexTooLow { apex_height: f64, thickness: f64 },
    #[error("cap triangulation failed: {0}")]
    Cap(String),
    #[error("mesh has no triangles")]
    EmptyMesh,
    #[error("triangle {0} references a missing vertex")]
    BadIndex(usize),
    #[error("triangle {0} is degenerate (area {1:.3e} mm^2)")]
    DegenerateTriangle(usize, f64),
    #[error("edge {0}-{1} is not shared by exactly two opposite-facing triangles")]
    NotWatertight(u32, u32),
    #[error("mesh is inside out (signed volume {0:.3e})")]
    InsideOut(f64),
    #[error("nothing to draw")]
    EmptyDrawing,
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

/// How the profile travels from z = 0 to z = thickness.
///
/// Angles are radians. `Helical` rotates the profile linearly up the sweep,
/// reaching `twist` at the top. `Herringbone` is two opposite-handed helical
/// halves joined at the mid-plane; the rotation peaks at `twist` there and
/// returns to zero at the top. `Bevel` shrinks each slice toward the z-axis
/// by (apex_height − z)/apex_height, a truncated cone stopping short of the
/// apex.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ExtrudeStyle {
    Spur,
    Helical { twist: f64 },
    Herringbone { twist: f64 },
    Bevel { apex_height: f64 },
}

/// Triangle mesh with outward-facing orientation. Construction validates the
/// invariants once, so a value of this type is always a closed, positively
/// oriented solid: every undirected edge bounds exactly two triangles of
/// opposite direction, no triangle is thinner than 1e-12 mm², and the signed
/// volume is positive.
#[derive(Debug, Clone)]
pub struct SolidMesh {
    vertices: Vec<[f64; 3]>,
    triangles: Vec<[u32; 3]>,
}

impl SolidMesh {
    pub fn new(vertices: Vec<[f64; 3]>, triangles: Vec<[u32; 3]>) -> Result<Self, SolidError> {
        if triangles.is_empty() {
            return Err(SolidError::EmptyMesh);
        }
        let n = vertices.len() as u32;
        let mut edges: HashMap<(u32, u32), u32> = HashMap::with_capacity(triangles.len() * 3);
        for (i, t) in triangles.iter().enumerate() {
            if t.iter().any(|&v| v >= n) || t[0] == t[1] || t[1] == t[2] || t[2] == t[0] {
                return Err(SolidError::BadIndex(i));
            }
            let area = triangle_area(&vertices, t);
            if !(area > 1e-12) {
                return Err(SolidError::DegenerateTriangle(i, area));
            }
            for (a, b) in [(t[0], t[1]), (t[1], t[2]), (t[2], t[0])] {
                *edges.entry((a, b)).or_insert(0) += 1;
            }
        }
        for (&(a, b), &count) in &edges {
            if count != 1 || edges.get(&(b, a)) != Some(&1) {
                return Err(SolidError::NotWatertight(a, b));
            }
        }
        let mesh = SolidMesh { vertices, triangles };
        let volume = mesh.volume();
        if !(volume > 0.0) {
            return Err(SolidError::InsideOut(volume));
        }
        Ok(mesh)
    }

    pub fn vertices(&self) -> &[[f64; 3]] {
        &self.vertices
    }

    pub fn triangles(&self) -> &[[u32; 3]] {
        &self.triangles
    }

    /// Enclosed volume by the divergence theorem: the sum of signed tetrahedron
    /// volumes spanned by the origin and each triangle.
    pub fn volume(&self) -> f64 {
        self.triangles
            .iter()
            .map(|t| {
                let a = self.vertices[t[0] as usize];
                let b = self.vertices[t[1] as usize];
                let c = self.vertices[t[2] as usize];
                dot(a, cross(b, c)) / 6.0
            })
            .sum()
    }
}

fn sub(a: [f64; 3], b: [f64; 3]) -> [f64; 3] {
    [a[0] - b[0], a[1] - b[1], a[2] - b[2]]
}

fn cross(a: [f64; 3], b: [f64; 3]) -> [f64; 3] {
    [
        a[1] * b[2] - a[2] * b[1],
        a[2] * b[0] - a[0] * b[2],
        a[0] * b[1] - a[1] * b[0],
    ]
}

fn dot(a: [f64; 3], b: [f64; 3]) -> f64 {
    a[0] * b[0] + a[1] * b[1] + a[2] * b[2]
}

fn triangle_area(vertices: &[[f64; 3]], t: &[u32; 3]) -> f64 {
    let a = vertices[t[0] as usize];
    let e1 = sub(vertices[t[1] as usize], a);
    let e2 = sub(vertices[t[2] as usize], a);
    let n = cross(e1, e2);
    dot(n, n).sqrt() / 2.0
}

// Either a bare outline or a generated gear can be extruded.
impl AsRef<ClosedPolygon> for ClosedPolygon {
    fn as_ref(&self) -> &ClosedPolygon {
        self
    }
}

impl AsRef<ClosedPolygon> for GearProfile {
    fn as_ref(&self) -> &ClosedPolygon {
        &self.boundary
    }
}

/// One z-level of the sweep: the profile rotated by `angle` about the axis,
/// scaled by `scale` toward it.
struct Level {
    z: f64,
    angle: f64,
    scale: f64,
}

fn slice_count(twist: f64) -> usize {
    // Four slices per degree of twist keeps the chordal sag of the twisted
    // walls below kernel tolerances; never fewer than two.
    ((4.0 * twist.abs().to_degrees()).ceil() as usize).max(2)
}

/// Sweep `profile` from z = 0 to z = `thickness`.
///
/// The mesh is validated before it is returned, so success implies a
/// watertight, outward-oriented solid.
pub fn extrude(
    profile: impl AsRef<ClosedPolygon>,
    thickness: f64,
    style: ExtrudeStyle,
) -> Result<SolidMesh, SolidError> {
    let profile = profile.as_ref();
    if !(thickness > 0.0 && thickness.is_finite()) {
        return Err(SolidError::BadThickness(thickness));
    }
    if !profile.is_simple() {
        return Err(SolidError::NonSimpleProfile);
    }
    let levels = match style {
        ExtrudeStyle::Spur => prism_levels(thickness),
        ExtrudeStyle::Helical { twist } if twist == 0.0 => prism_levels(thickness),
        ExtrudeStyle::Helical { twist } => {
            let n = slice_count(twist);
            (0..=n)
                .map(|i| {
                    let f = i as f64 / n as f64;
                    Level { z: thickness * f, angle: twist * f, scale: 1.0 }
                })
                .collect()
        }
        ExtrudeStyle::Herringbone { twist } if twist == 0.0 => prism_levels(thickness),
        ExtrudeStyle::Herringbone { twist } => {
            // Symmetric about the mid-plane: level i and level 2n−i carry the
            // same rotation, which is what makes the two halves mirror images.
            let n = slice_count(twist);
            (0..=2 * n)
                .map(|i| Level {
                    z: thickness * i as f64 / (2 * n) as f64,
                    angle: twist * i.min(2 * n - i) as f64 / n as f64,
                    scale: 1.0,
                })
                .collect()
        }
        ExtrudeStyle::Bevel { apex_height } => {
            if !(apex_height > thickness) {
                return Err(SolidError::ApexTooLow { apex_height, thickness });
            }
            (0..=2)
                .map(|i| {
                    let z = thickness * i as f64 / 2.0;
                    Level { z, angle: 0.0, scale: (apex_height - z) / apex_height }
                })
                .collect()
        }
    };
    sweep(profile, &levels)
}

fn prism_levels(thickness: f64) -> Vec<Level> {
    vec![
        Level { z: 0.0, angle: 0.0, scale: 1.0 },
        Level { z: thickness, angle: 0.0, scale: 1.0 },
    ]
}

fn sweep(profile: &ClosedPolygon, levels: &[Level]) -> Result<SolidMesh, SolidError> {
    // Ring layout within one level: outer vertices first, then each hole.
    // The same layout indexes the flattened ear-clipping input, so cap
    // triangles can be emitted directly against level vertex blocks.
    let mut base: Vec<Point2> = profile.outer().to_vec();
    let mut ring_ends = vec![profile.outer().len()];
    let mut hole_starts = Vec::new();
    for h in profile.holes() {
        hole_starts.push(base.len());
        base.extend_from_slice(h);
        ring_ends.push(base.len());
    }
    let stride = base.len();

    let mut vertices: Vec<[f64; 3]> = Vec::with_capacity(stride * levels.len());
    for lvl in levels {
        for p in &base {
            let q = p.rotated(lvl.angle);
            vertices.push([q.x * lvl.scale, q.y * lvl.scale, lvl.z]);
        }
    }

    let mut triangles: Vec<[u32; 3]> = Vec::new();
    let mut ring_start = 0;
    for &ring_end in &ring_ends {
        for l in 0..levels.len() - 1 {
            let lo = (l * stride) as u32;
            let hi = lo + stride as u32;
            for i in ring_start..ring_end {
                let j = if i + 1 == ring_end { ring_start } else { i + 1 };
                let (a, b) = (lo + i as u32, lo + j as u32);
                let (a2, b2) = (hi + i as u32, hi + j as u32);
                // Outer rings run CCW and holes CW, so walking the stored
                // order puts the solid on the left either way and this
                // winding faces outward for both.
                triangles.push([a, b, b2]);
                triangles.push([a, b2, a2]);
            }
        }
        ring_start = ring_end;
    }

    // Caps: ear-clip once on the base profile; every level is a similarity
    // image of it, so the same triangle topology is valid top and bottom.
    let mut flat = Vec::with_capacity(2 * stride);
    for p in &base {
        flat.push(p.x);
        flat.push(p.y);
    }
    let ears = earcutr::earcut(&flat, &hole_starts, 2)
        .map_err(|e| SolidError::Cap(format!("{e:?}")))?;
    let top = ((levels.len() - 1) * stride) as u32;
    for t in ears.chunks_exact(3) {
        let (i, j, k) = (t[0], t[1], t[2]);
        // Normalize to CCW in the plane, then point the bottom cap down.
        let ccw = (base[j] - base[i]).cross(base[k] - base[i]) >= 0.0;
        let (j, k) = if ccw { (j, k) } else { (k, j) };
        triangles.push([i as u32, k as u32, j as u32]);
        triangles.push([top + i as u32, top + j as u32, top + k as u32]);
    }

    SolidMesh::new(vertices, triangles)
}

/// Writes `mesh` as binary STL: an 80-byte header, a little-endian u32
/// triangle count, then 50 bytes per triangle (normal, three vertices, zero
/// attribute word). Returns the byte count, always 84 + 50·T.
pub fn write_stl<W: Write>(mesh: &SolidMesh, mut sink: W) -> Result<usize, SolidError> {
    let mut header = [0u8; 80];
    let tag = b"gearforge solid";
    header[..tag.len()].copy_from_slice(tag);
    sink.write_all(&header)?;
    sink.write_all(&(mesh.triangles.len() as u32).to_le_bytes())?;
    for t in &mesh.triangles {
        let a = mesh.vertices[t[0] as usize];
        let b = mesh.vertices[t[1] as usize];
        let c = mesh.vertices[t[2] as usize];
        let n = cross(sub(b, a), sub(c, a));
        let len = dot(n, n).sqrt();
        let mut record = [0u8; 50];
        for (slot, v) in [n[0] / len, n[1] / len, n[2] / len]
            .into_iter()
            .chain(a)
            .chain(b)
            .chain(c)
            .enumerate()
        {
            record[slot * 4..slot * 4 + 4].copy_from_slice(&(v as f32).to_le_bytes());
        }
        sink.write_all(&record)?;
    }
    sink.flush()?;
    Ok(84 + 50 * mesh.triangles.len())
}

/// Stroke/fill presentation for one drawn polygon.
#[derive(Debug, Clone)]
pub struct SvgStyle {
    pub fill: String,
    pub stroke: String,
    pub stroke_width: f64,
}

impl Default for SvgStyle {
    fn default() -> Self {
        SvgStyle { fill: "none".into(), stroke: "#000".into(), stroke_width: 0.25 }
    }
}

fn svg_num(v: f64) -> String {
    let r = (v * 1e4).round() / 1e4;
    // Avoid "-0.0000" so output bytes are a function of geometry alone.
    format!("{:.4}", if r == 0.0 { 0.0 } else { r })
}

/// Writes posed polygons as an SVG drawing, one path per polygon with holes
/// as extra subpaths under the even-odd fill rule. Coordinates are
/// millimeters with y flipped to screen convention; the viewBox wraps all
/// geometry with a 5% margin. Returns the byte count.
pub fn write_svg<W: Write>(
    items: &[(ClosedPolygon, RigidPose, SvgStyle)],
    mut sink: W,
) -> Result<usize, SolidError> {
    if items.is_empty() {
        return Err(SolidError::EmptyDrawing);
    }
    let posed: Vec<(ClosedPolygon, &SvgStyle)> = items
        .iter()
        .map(|(poly, pose, style)| (poly.transformed(pose), style))
        .collect();
    let (mut lo, mut hi) = posed[0].0.bounds();
    for (poly, _) in &posed[1..] {
        let (a, b) = poly.bounds();
        lo = Point2::new(lo.x.min(a.x), lo.y.min(a.y));
        hi = Point2::new(hi.x.max(b.x), hi.y.max(b.y));
    }
    let span = hi - lo;
    let margin = 0.05 * span.x.max(span.y);
    let (w, h) = (span.x + 2.0 * margin, span.y + 2.0 * margin);

    let mut out = String::new();
    out.push_str(&format!(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{}mm\" height=\"{}mm\" \
         viewBox=\"{} {} {} {}\">\n",
        svg_num(w),
        svg_num(h),
        svg_num(lo.x - margin),
        svg_num(-hi.y - margin),
        svg_num(w),
        svg_num(h),
    ));
    for (poly, style) in &posed {
        let mut d = String::new();
        for ring in std::iter::once(poly.outer()).chain(poly.holes().iter().map(Vec::as_slice)) {
            for (i, p) in ring.iter().enumerate() {
                let cmd = if i == 0 { 'M' } else { 'L' };
                d.push_str(&format!("{cmd} {} {} ", svg_num(p.x), svg_num(-p.y)));
            }
            d.push_str("Z ");
        }
        out.push_str(&format!(
            "<path d=\"{}\" fill-rule=\"evenodd\" style=\"fill:{};stroke:{};stroke-width:{}\"/>\n",
            d.trim_end(),
            style.fill,
            style.stroke,
            svg_num(style.stroke_width),
        ));
    }
    out.push_str("</svg>\n");
    sink.write_all(out.as_bytes())?;
    sink.flush()?;
    Ok(out.len())
}
