//! Region booleans on polygon sets, delegated to `geo`'s clipping kernel.
//! Inputs and outputs are multipolygons: disjoint positive regions, each with
//! optional holes. Degenerate output slivers (area below `AREA_TOL`) are
//! discarded rather than surfaced.
//!
//! Precision note: the kernel snaps coordinates to roughly 2⁻³⁰ of the
//! operands' bounding box, so output areas carry noise on the order of
//! perimeter × bbox × 2⁻³⁰. Don't assert exact areas on boolean results.

use geo::algorithm::bool_ops::{unary_union as geo_unary_union, BooleanOps};
use geo::{LineString, MultiPolygon, Polygon as GeoPolygon};

use super::{ClosedPolygon, Point2};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BoolOp {
    Union,
    Intersection,
    Difference,
    Xor,
}

fn ring_to_geo(ring: &[Point2]) -> LineString<f64> {
    LineString::from(ring.iter().map(|p| (p.x, p.y)).collect::<Vec<_>>())
}

fn to_geo(p: &ClosedPolygon) -> GeoPolygon<f64> {
    GeoPolygon::new(
        ring_to_geo(p.outer()),
        p.holes().iter().map(|h| ring_to_geo(h)).collect(),
    )
}

fn to_geo_multi(set: &[ClosedPolygon]) -> MultiPolygon<f64> {
    MultiPolygon::new(set.iter().map(to_geo).collect())
}

fn from_geo_multi(mp: MultiPolygon<f64>) -> Vec<ClosedPolygon> {
    mp.0
        .into_iter()
        .filter_map(|poly| {
            let (ext, ints) = poly.into_inner();
            let outer = ext.0.iter().map(|c| Point2::new(c.x, c.y)).collect();
            let holes = ints
                .into_iter()
                .map(|ls| ls.0.iter().map(|c| Point2::new(c.x, c.y)).collect())
                .collect();
            ClosedPolygon::new(outer, holes).ok()
        })
        .collect()
}

/// Boolean combination of two polygon sets. An empty result (e.g. an
/// intersection of disjoint regions) is a valid empty set, not an error.
pub fn polygon_boolean(a: &[ClosedPolygon], b: &[ClosedPolygon], op: BoolOp) -> Vec<ClosedPolygon> {
    if a.is_empty() && b.is_empty() {
        return vec![];
    }
    if b.is_empty() {
        return match op {
            BoolOp::Intersection => vec![],
            _ => a.to_vec(),
        };
    }
    if a.is_empty() {
        return match op {
            BoolOp::Intersection | BoolOp::Difference => vec![],
            _ => b.to_vec(),
        };
    }
    let ga = to_geo_multi(a);
    let gb = to_geo_multi(b);
    let out = match op {
        BoolOp::Union => ga.union(&gb),
        BoolOp::Intersection => ga.intersection(&gb),
        BoolOp::Difference => ga.difference(&gb),
        BoolOp::Xor => ga.xor(&gb),
    };
    from_geo_multi(out)
}

/// Union of many polygons at once; far faster than folding pairwise when
/// merging hundreds of overlapping pieces.
pub fn unary_union(polys: &[ClosedPolygon]) -> Vec<ClosedPolygon> {
    if polys.is_empty() {
        return vec![];
    }
    let geo_polys: Vec<GeoPolygon<f64>> = polys.iter().map(to_geo).collect();
    from_geo_multi(geo_unary_union(geo_polys.iter()))
}

/// Union of polygons listed in sweep order, merged as a balanced tree of
/// small chunks. A flat batch union of N nearly-coincident placements must
/// resolve all O(N²) pairwise edge crossings; merging neighbors first
/// resolves overlaps while they are still local, leaving later levels to
/// join almost-disjoint arcs, which keeps the total near-linear. Union
/// order is fixed by the input order, so results are deterministic.
pub fn union_tree(polys: &[ClosedPolygon]) -> Vec<ClosedPolygon> {
    const CHUNK: usize = 16;
    let mut merged: Vec<ClosedPolygon> = polys.to_vec();
    while merged.len() > CHUNK {
        let next: Vec<ClosedPolygon> = merged.chunks(CHUNK).flat_map(|c| unary_union(c)).collect();
        if next.len() >= merged.len() {
            break;
        }
        merged = next;
    }
    unary_union(&merged)
}

pub fn total_area(set: &[ClosedPolygon]) -> f64 {
    set.iter().map(ClosedPolygon::area).sum()
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use proptest::prelude::*;

    fn square_at(x: f64, y: f64, side: f64) -> ClosedPolygon {
        ClosedPolygon::new(
            vec![
                Point2::new(x, y),
                Point2::new(x + side, y),
                Point2::new(x + side, y + side),
                Point2::new(x, y + side),
            ],
            vec![],
        )
        .unwrap()
    }

    #[test]
    fn union_of_overlapping_squares() {
        let a = [square_at(0.0, 0.0, 2.0)];
        let b = [square_at(1.0, 1.0, 2.0)];
        let u = polygon_boolean(&a, &b, BoolOp::Union);
        assert_eq!(u.len(), 1);
        assert_relative_eq!(total_area(&u), 7.0, max_relative = 1e-12);
    }

    #[test]
    fn difference_cuts_a_hole() {
        let a = [square_at(0.0, 0.0, 4.0)];
        let b = [square_at(1.5, 1.5, 1.0)];
        let d = polygon_boolean(&a, &b, BoolOp::Difference);
        assert_eq!(d.len(), 1);
        assert_eq!(d[0].holes().len(), 1);
        assert_relative_eq!(total_area(&d), 15.0, max_relative = 1e-12);
        assert!(!d[0].contains_point(Point2::new(2.0, 2.0)));
    }

    #[test]
    fn disjoint_intersection_is_empty() {
        let a = [square_at(0.0, 0.0, 1.0)];
        let b = [square_at(5.0, 5.0, 1.0)];
        assert!(polygon_boolean(&a, &b, BoolOp::Intersection).is_empty());
    }

    #[test]
    fn xor_matches_union_minus_intersection() {
        let a = [square_at(0.0, 0.0, 2.0)];
        let b = [square_at(1.0, 0.0, 2.0)];
        let x = total_area(&polygon_boolean(&a, &b, BoolOp::Xor));
        let u = total_area(&polygon_boolean(&a, &b, BoolOp::Union));
        let i = total_area(&polygon_boolean(&a, &b, BoolOp::Intersection));
        assert_relative_eq!(x, u - i, max_relative = 1e-12);
    }

    #[test]
    fn unary_union_merges_chain_into_one_component() {
        let pieces: Vec<ClosedPolygon> =
            (0..20).map(|i| square_at(i as f64 * 0.8, 0.0, 1.0)).collect();
        let merged = unary_union(&pieces);
        assert_eq!(merged.len(), 1);
        // 20 unit squares at 0.8 spacing: total span 0.8·19 + 1 by 1.
        // Tolerance reflects the kernel's coordinate snapping, not geometry.
        assert_relative_eq!(total_area(&merged), 0.8 * 19.0 + 1.0, max_relative = 1e-7);
    }

    fn star_polygon(cx: f64, cy: f64, radii: Vec<f64>) -> ClosedPolygon {
        let n = radii.len();
        let pts = radii
            .iter()
            .enumerate()
            .map(|(i, &r)| {
                let th = std::f64::consts::TAU * i as f64 / n as f64;
                Point2::new(cx + r * th.cos(), cy + r * th.sin())
            })
            .collect();
        ClosedPolygon::new(pts, vec![]).unwrap()
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]

        // Inclusion–exclusion: |A∪B| + |A∩B| = |A| + |B| for any two regions.
        #[test]
        fn union_intersection_areas_balance(
            ra in proptest::collection::vec(0.5f64..2.0, 8..16),
            rb in proptest::collection::vec(0.5f64..2.0, 8..16),
            dx in -2.0f64..2.0,
            dy in -2.0f64..2.0,
        ) {
            let a = [star_polygon(0.0, 0.0, ra)];
            let b = [star_polygon(dx, dy, rb)];
            let u = total_area(&polygon_boolean(&a, &b, BoolOp::Union));
            let i = total_area(&polygon_boolean(&a, &b, BoolOp::Intersection));
            let lhs = u + i;
            let rhs = total_area(&a) + total_area(&b);
            prop_assert!((lhs - rhs).abs() <= 1e-7 * rhs.max(1.0));
        }

        // Difference never exceeds the minuend and complements intersection.
        #[test]
        fn difference_complements_intersection(
            ra in proptest::collection::vec(0.5f64..2.0, 8..16),
            rb in proptest::collection::vec(0.5f64..2.0, 8..16),
            dx in -2.0f64..2.0,
        ) {
            let a = [star_polygon(0.0, 0.0, ra)];
            let b = [star_polygon(dx, 0.0, rb)];
            let d = total_area(&polygon_boolean(&a, &b, BoolOp::Difference));
            let i = total_area(&polygon_boolean(&a, &b, BoolOp::Intersection));
            let total = total_area(&a);
            prop_assert!((d + i - total).abs() <= 1e-7 * total.max(1.0));
        }
    }
}
