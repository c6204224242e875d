use std::collections::HashMap;

use super::{CurveError, Point2, RigidPose, AREA_TOL, SNAP_TOL};

/// Signed area of a closed ring (positive = counterclockwise).
pub fn ring_signed_area(pts: &[Point2]) -> f64 {
    let n = pts.len();
    let mut s = 0.0;
    for i in 0..n {
        let a = pts[i];
        let b = pts[(i + 1) % n];
        s += a.x * b.y - b.x * a.y;
    }
    0.5 * s
}

fn ring_perimeter(pts: &[Point2]) -> f64 {
    let n = pts.len();
    (0..n).map(|i| pts[i].dist(pts[(i + 1) % n])).sum()
}

/// Drop a repeated closing vertex and collapse consecutive near-duplicates.
fn clean_ring(pts: &[Point2]) -> Vec<Point2> {
    let mut out: Vec<Point2> = Vec::with_capacity(pts.len());
    for &p in pts {
        if out.last().map_or(true, |&q| p.dist(q) > SNAP_TOL) {
            out.push(p);
        }
    }
    while out.len() >= 2 && out[0].dist(*out.last().unwrap()) <= SNAP_TOL {
        out.pop();
    }
    out
}

fn point_in_ring(p: Point2, ring: &[Point2]) -> bool {
    let mut inside = false;
    let mut j = ring.len() - 1;
    for i in 0..ring.len() {
        let a = ring[i];
        let b = ring[j];
        if (a.y > p.y) != (b.y > p.y) {
            let x_int = a.x + (p.y - a.y) * (b.x - a.x) / (b.y - a.y);
            if p.x < x_int {
                inside = !inside;
            }
        }
        j = i;
    }
    inside
}

/// Distance from `p` to segment `ab`, plus the closest point on the segment.
pub fn point_segment_distance(p: Point2, a: Point2, b: Point2) -> (f64, Point2) {
    let ab = b - a;
    let len_sq = ab.norm_sq();
    if len_sq == 0.0 {
        return (p.dist(a), a);
    }
    let t = ((p - a).dot(ab) / len_sq).clamp(0.0, 1.0);
    let q = a + ab * t;
    (p.dist(q), q)
}

fn orient(a: Point2, b: Point2, c: Point2) -> f64 {
    (b - a).cross(c - a)
}

/// Minimum distance between segments `ab` and `cd` (0 when they cross).
pub fn segment_segment_distance(a: Point2, b: Point2, c: Point2, d: Point2) -> f64 {
    let d1 = orient(c, d, a);
    let d2 = orient(c, d, b);
    let d3 = orient(a, b, c);
    let d4 = orient(a, b, d);
    if ((d1 > 0.0 && d2 < 0.0) || (d1 < 0.0 && d2 > 0.0))
        && ((d3 > 0.0 && d4 < 0.0) || (d3 < 0.0 && d4 > 0.0))
    {
        return 0.0;
    }
    point_segment_distance(a, c, d)
        .0
        .min(point_segment_distance(b, c, d).0)
        .min(point_segment_distance(c, a, b).0)
        .min(point_segment_distance(d, a, b).0)
}

/// A simple closed region: one counterclockwise outer ring plus zero or more
/// clockwise holes. Rings are stored without a repeated closing vertex.
#[derive(Debug, Clone)]
pub struct ClosedPolygon {
    outer: Vec<Point2>,
    holes: Vec<Vec<Point2>>,
}

impl ClosedPolygon {
    /// Builds a polygon, normalizing orientation (outer CCW, holes CW) and
    /// dropping degenerate holes. A degenerate outer ring is an error.
    pub fn new(outer: Vec<Point2>, holes: Vec<Vec<Point2>>) -> Result<Self, CurveError> {
        let mut outer = clean_ring(&outer);
        if outer.len() < 3 {
            return Err(CurveError::TooFewPoints(outer.len()));
        }
        let area = ring_signed_area(&outer);
        if area.abs() < AREA_TOL {
            return Err(CurveError::DegenerateRing { area });
        }
        if area < 0.0 {
            outer.reverse();
        }
        let mut kept = Vec::new();
        for h in holes {
            let mut h = clean_ring(&h);
            if h.len() < 3 || ring_signed_area(&h).abs() < AREA_TOL {
                continue;
            }
            if ring_signed_area(&h) > 0.0 {
                h.reverse();
            }
            kept.push(h);
        }
        Ok(ClosedPolygon { outer, holes: kept })
    }

    pub fn outer(&self) -> &[Point2] {
        &self.outer
    }

    pub fn holes(&self) -> &[Vec<Point2>] {
        &self.holes
    }

    pub fn vertex_count(&self) -> usize {
        self.outer.len() + self.holes.iter().map(Vec::len).sum::<usize>()
    }

    /// Enclosed area: outer minus holes. Always positive for a valid polygon.
    pub fn area(&self) -> f64 {
        ring_signed_area(&self.outer) + self.holes.iter().map(|h| ring_signed_area(h)).sum::<f64>()
    }

    /// Total boundary length across all rings.
    pub fn perimeter(&self) -> f64 {
        ring_perimeter(&self.outer) + self.holes.iter().map(|h| ring_perimeter(h)).sum::<f64>()
    }

    /// Area centroid of the region (holes subtract).
    pub fn centroid(&self) -> Point2 {
        let mut ax = 0.0;
        let mut ay = 0.0;
        let mut a_total = 0.0;
        let mut accumulate = |ring: &[Point2]| {
            let n = ring.len();
            for i in 0..n {
                let p = ring[i];
                let q = ring[(i + 1) % n];
                let w = p.x * q.y - q.x * p.y;
                ax += (p.x + q.x) * w;
                ay += (p.y + q.y) * w;
                a_total += w;
            }
        };
        accumulate(&self.outer);
        for h in &self.holes {
            accumulate(h);
        }
        Point2::new(ax / (3.0 * a_total), ay / (3.0 * a_total))
    }

    /// Even-odd containment test; points on the boundary are unreliable at
    /// machine precision, as usual.
    pub fn contains_point(&self, p: Point2) -> bool {
        if !point_in_ring(p, &self.outer) {
            return false;
        }
        !self.holes.iter().any(|h| point_in_ring(p, h))
    }

    pub fn bounds(&self) -> (Point2, Point2) {
        let mut lo = Point2::new(f64::INFINITY, f64::INFINITY);
        let mut hi = Point2::new(f64::NEG_INFINITY, f64::NEG_INFINITY);
        let mut take = |p: &Point2| {
            lo.x = lo.x.min(p.x);
            lo.y = lo.y.min(p.y);
            hi.x = hi.x.max(p.x);
            hi.y = hi.y.max(p.y);
        };
        self.outer.iter().for_each(&mut take);
        self.holes.iter().flatten().for_each(&mut take);
        (lo, hi)
    }

    /// Rigid transforms preserve orientation, so rings stay valid as-is.
    pub fn transformed(&self, pose: &RigidPose) -> ClosedPolygon {
        ClosedPolygon {
            outer: pose.apply_all(&self.outer),
            holes: self.holes.iter().map(|h| pose.apply_all(h)).collect(),
        }
    }

    /// Drop vertices whose adjacent edges are collinear within `angle_tol`
    /// radians. Never reduces a ring below a triangle.
    pub fn simplified(&self, angle_tol: f64) -> ClosedPolygon {
        let simplify = |ring: &[Point2]| -> Vec<Point2> {
            let n = ring.len();
            let mut keep: Vec<Point2> = Vec::with_capacity(n);
            for i in 0..n {
                let prev = ring[(i + n - 1) % n];
                let cur = ring[i];
                let next = ring[(i + 1) % n];
                let u = (cur - prev).normalized();
                let v = (next - cur).normalized();
                let turn = u.cross(v).atan2(u.dot(v)).abs();
                if turn > angle_tol || n - (i + 1) + keep.len() < 3 {
                    keep.push(cur);
                }
            }
            if keep.len() < 3 {
                ring.to_vec()
            } else {
                keep
            }
        };
        ClosedPolygon {
            outer: simplify(&self.outer),
            holes: self.holes.iter().map(|h| simplify(h)).collect(),
        }
    }

    /// Drop vertices lying within `tol` of the chord between their ring
    /// neighbors, interleaved with welding vertex runs shorter than `tol`.
    /// Catches what [`Self::simplified`] cannot: doubled-back micro-edges
    /// reverse direction, so their turn angle is near π while their lateral
    /// extent is far below any feature size — exactly the junk boolean
    /// snapping leaves where near-identical edges meet. The weld matters as
    /// much as the despike: collapsing a spike leaves its two base vertices
    /// almost coincident, and without merging them the boundary still
    /// pinches there. Passes repeat until stable; rings never drop below a
    /// triangle.
    pub fn despiked(&self, tol: f64) -> ClosedPolygon {
        let weld = |pts: &[Point2]| -> Vec<Point2> {
            let mut out: Vec<Point2> = Vec::with_capacity(pts.len());
            for &p in pts {
                if out.last().map_or(true, |&q| p.dist(q) > tol) {
                    out.push(p);
                }
            }
            while out.len() >= 2 && out[0].dist(*out.last().unwrap()) <= tol {
                out.pop();
            }
            out
        };
        let despike = |ring: &[Point2]| -> Vec<Point2> {
            let mut pts = ring.to_vec();
            loop {
                let before = pts.len();
                let welded = weld(&pts);
                if welded.len() < 3 {
                    break;
                }
                pts = welded;
                let n = pts.len();
                if n > 3 {
                    let mut keep = vec![true; n];
                    let mut i = 0;
                    while i < n {
                        let prev = pts[(i + n - 1) % n];
                        let next = pts[(i + 1) % n];
                        if point_segment_distance(pts[i], prev, next).0 <= tol {
                            keep[i] = false;
                            i += 2; // the next vertex's chord test used pts[i]; retest next pass
                        } else {
                            i += 1;
                        }
                    }
                    let kept: Vec<Point2> =
                        pts.iter().zip(&keep).filter_map(|(p, &k)| k.then_some(*p)).collect();
                    if kept.len() >= 3 {
                        pts = kept;
                    }
                }
                if pts.len() == before {
                    break;
                }
            }
            pts
        };
        ClosedPolygon {
            outer: despike(&self.outer),
            holes: self.holes.iter().map(|h| despike(h)).collect(),
        }
    }

    /// All boundary segments, outer ring first.
    pub fn segments(&self) -> Vec<(Point2, Point2)> {
        let mut out = Vec::with_capacity(self.vertex_count());
        let mut push_ring = |ring: &[Point2]| {
            let n = ring.len();
            for i in 0..n {
                out.push((ring[i], ring[(i + 1) % n]));
            }
        };
        push_ring(&self.outer);
        for h in &self.holes {
            push_ring(h);
        }
        out
    }

    /// True when no two non-adjacent boundary segments come within `SNAP_TOL`
    /// of each other. Quadratic work is avoided with a uniform grid.
    pub fn is_simple(&self) -> bool {
        let mut segs: Vec<(Point2, Point2, usize, usize, usize)> = Vec::new();
        let mut rings: Vec<&[Point2]> = vec![&self.outer];
        for h in &self.holes {
            rings.push(h);
        }
        for (ri, ring) in rings.iter().enumerate() {
            let n = ring.len();
            for i in 0..n {
                segs.push((ring[i], ring[(i + 1) % n], ri, i, n));
            }
        }
        let avg_len: f64 =
            segs.iter().map(|s| s.0.dist(s.1)).sum::<f64>() / segs.len() as f64;
        let cell = (avg_len * 2.0).max(SNAP_TOL * 16.0);
        let mut grid: HashMap<(i64, i64), Vec<u32>> = HashMap::new();
        let key = |p: Point2| ((p.x / cell).floor() as i64, (p.y / cell).floor() as i64);
        for (idx, s) in segs.iter().enumerate() {
            let (k0, k1) = (key(s.0), key(s.1));
            for gx in k0.0.min(k1.0)..=k0.0.max(k1.0) {
                for gy in k0.1.min(k1.1)..=k0.1.max(k1.1) {
                    grid.entry((gx, gy)).or_default().push(idx as u32);
                }
            }
        }
        for bucket in grid.values() {
            for (a_pos, &ia) in bucket.iter().enumerate() {
                for &ib in &bucket[a_pos + 1..] {
                    let a = &segs[ia as usize];
                    let b = &segs[ib as usize];
                    if a.2 == b.2 {
                        let n = a.4;
                        let gap = (a.3 + n - b.3) % n;
                        if gap <= 1 || gap == n - 1 {
                            continue; // same or adjacent edges share a vertex
                        }
                    }
                    if segment_segment_distance(a.0, a.1, b.0, b.1) < SNAP_TOL {
                        return false;
                    }
                }
            }
        }
        true
    }
}

/// Uniform-grid index over a polygon's boundary segments for fast
/// point-to-boundary distance queries.
pub struct BoundaryIndex {
    segs: Vec<(Point2, Point2)>,
    grid: HashMap<(i64, i64), Vec<u32>>,
    cell: f64,
}

impl BoundaryIndex {
    pub fn new(poly: &ClosedPolygon, cell: f64) -> Self {
        Self::from_segments(poly.segments(), cell)
    }

    pub fn from_segments(segs: Vec<(Point2, Point2)>, cell: f64) -> Self {
        assert!(cell > 0.0 && !segs.is_empty());
        let mut grid: HashMap<(i64, i64), Vec<u32>> = HashMap::new();
        for (idx, s) in segs.iter().enumerate() {
            let (k0x, k0y) = Self::key_of(s.0, cell);
            let (k1x, k1y) = Self::key_of(s.1, cell);
            for gx in k0x.min(k1x)..=k0x.max(k1x) {
                for gy in k0y.min(k1y)..=k0y.max(k1y) {
                    grid.entry((gx, gy)).or_default().push(idx as u32);
                }
            }
        }
        BoundaryIndex { segs, grid, cell }
    }

    fn key_of(p: Point2, cell: f64) -> (i64, i64) {
        ((p.x / cell).floor() as i64, (p.y / cell).floor() as i64)
    }

    /// Nearest boundary point within `cutoff` of `p`, if any.
    pub fn distance_within(&self, p: Point2, cutoff: f64) -> Option<(f64, Point2)> {
        let reach = (cutoff / self.cell).ceil() as i64 + 1;
        let (cx, cy) = Self::key_of(p, self.cell);
        let mut best = (f64::INFINITY, Point2::ORIGIN);
        for gx in cx - reach..=cx + reach {
            for gy in cy - reach..=cy + reach {
                if let Some(bucket) = self.grid.get(&(gx, gy)) {
                    for &i in bucket {
                        let (a, b) = self.segs[i as usize];
                        let (d, q) = point_segment_distance(p, a, b);
                        if d < best.0 {
                            best = (d, q);
                        }
                    }
                }
            }
        }
        (best.0 <= cutoff).then_some(best)
    }

    /// Nearest boundary point, searched in expanding grid rings.
    pub fn distance(&self, p: Point2) -> (f64, Point2) {
        let mut radius = self.cell;
        loop {
            if let Some(hit) = self.distance_within(p, radius) {
                // A hit within `radius` is only guaranteed optimal if we also
                // scanned out to its distance; one widening pass settles it.
                return self.distance_within(p, hit.0 + self.cell).unwrap();
            }
            radius *= 2.0;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn square(side: f64) -> Vec<Point2> {
        vec![
            Point2::new(0.0, 0.0),
            Point2::new(side, 0.0),
            Point2::new(side, side),
            Point2::new(0.0, side),
        ]
    }

    #[test]
    fn area_and_orientation_normalization() {
        let mut cw = square(2.0);
        cw.reverse();
        let poly = ClosedPolygon::new(cw, vec![]).unwrap();
        assert_relative_eq!(poly.area(), 4.0);
        assert!(ring_signed_area(poly.outer()) > 0.0);
    }

    #[test]
    fn holes_subtract_area_and_containment() {
        let hole: Vec<Point2> = square(1.0)
            .into_iter()
            .map(|p| p + Point2::new(1.5, 1.5))
            .collect();
        let poly = ClosedPolygon::new(square(4.0), vec![hole]).unwrap();
        assert_relative_eq!(poly.area(), 15.0);
        assert!(ring_signed_area(&poly.holes()[0]) < 0.0);
        assert!(poly.contains_point(Point2::new(0.5, 0.5)));
        assert!(!poly.contains_point(Point2::new(2.0, 2.0))); // inside hole
        assert!(!poly.contains_point(Point2::new(5.0, 5.0)));
    }

    #[test]
    fn degenerate_outer_rejected() {
        let flat = vec![
            Point2::new(0.0, 0.0),
            Point2::new(1.0, 0.0),
            Point2::new(2.0, 0.0),
        ];
        assert!(ClosedPolygon::new(flat, vec![]).is_err());
    }

    #[test]
    fn centroid_of_offset_square() {
        let pts: Vec<Point2> = square(2.0)
            .into_iter()
            .map(|p| p + Point2::new(3.0, -1.0))
            .collect();
        let poly = ClosedPolygon::new(pts, vec![]).unwrap();
        let c = poly.centroid();
        assert_relative_eq!(c.x, 4.0, epsilon = 1e-12);
        assert_relative_eq!(c.y, 0.0, epsilon = 1e-12);
    }

    #[test]
    fn self_crossing_ring_is_not_simple() {
        // Edge (2,2)→(1,−0.5) crosses the bottom edge; net signed area stays
        // positive so construction succeeds.
        let crossed = vec![
            Point2::new(0.0, 0.0),
            Point2::new(2.0, 0.0),
            Point2::new(2.0, 2.0),
            Point2::new(1.0, -0.5),
        ];
        let poly = ClosedPolygon::new(crossed, vec![]).unwrap();
        assert!(!poly.is_simple());
        assert!(ClosedPolygon::new(square(1.0), vec![]).unwrap().is_simple());
    }

    #[test]
    fn simplified_removes_collinear_runs() {
        let mut pts = Vec::new();
        for i in 0..=10 {
            pts.push(Point2::new(i as f64 * 0.1, 0.0));
        }
        pts.push(Point2::new(1.0, 1.0));
        pts.push(Point2::new(0.0, 1.0));
        let poly = ClosedPolygon::new(pts, vec![]).unwrap();
        let slim = poly.simplified(1e-6);
        assert_eq!(slim.outer().len(), 4);
        assert_relative_eq!(slim.area(), poly.area(), max_relative = 1e-12);
    }

    #[test]
    fn boundary_index_matches_brute_force() {
        let n = 64;
        let ring: Vec<Point2> = (0..n)
            .map(|i| {
                let th = std::f64::consts::TAU * i as f64 / n as f64;
                Point2::from_polar(2.0 + 0.4 * (3.0 * th).sin(), th)
            })
            .collect();
        let poly = ClosedPolygon::new(ring, vec![]).unwrap();
        let index = BoundaryIndex::new(&poly, 0.25);
        let segs = poly.segments();
        let mut state = 0x9e3779b97f4a7c15u64;
        let mut rand01 = move || {
            state ^= state << 13;
            state ^= state >> 7;
            state ^= state << 17;
            (state >> 11) as f64 / (1u64 << 53) as f64
        };
        for _ in 0..200 {
            let p = Point2::new(rand01() * 6.0 - 3.0, rand01() * 6.0 - 3.0);
            let brute = segs
                .iter()
                .map(|&(a, b)| point_segment_distance(p, a, b).0)
                .fold(f64::INFINITY, f64::min);
            let (d, _) = index.distance(p);
            assert_relative_eq!(d, brute, epsilon = 1e-12);
            if let Some((dw, _)) = index.distance_within(p, 0.5) {
                assert_relative_eq!(dw, brute, epsilon = 1e-12);
                assert!(brute <= 0.5 + 1e-12);
            } else {
                assert!(brute > 0.5 - 1e-12);
            }
        }
    }

    #[test]
    fn segment_distance_cases() {
        let z = Point2::new(0.0, 0.0);
        assert_relative_eq!(
            segment_segment_distance(
                z,
                Point2::new(2.0, 2.0),
                Point2::new(2.0, 0.0),
                Point2::new(0.0, 2.0)
            ),
            0.0
        );
        assert_relative_eq!(
            segment_segment_distance(
                z,
                Point2::new(1.0, 0.0),
                Point2::new(0.0, 1.0),
                Point2::new(1.0, 1.0)
            ),
            1.0
        );
    }
}
