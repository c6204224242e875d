//! Epitrochoid paths and the groove bands that let pegs ride along them.
//! An epitrochoid is traced by an arm of length `d` fixed to a circle of
//! radius `r` rolling around a fixed circle of radius `R`; with `d = r` the
//! tracing point sits on the rolling circle itself (an epicycloid) and the
//! curve kisses the fixed circle at its cusps. A groove band widens such a
//! path into the region a peg of given radius sweeps while following it.

use std::f64::consts::PI;

use thiserror::Error;

use crate::curvekit::{union_tree, ClosedPolygon, CurveError, Point2, Polyline};

#[derive(Debug, Error)]
pub enum TrochoidError {
    #[error("peg radius {0} is below the boolean kernel's snap tolerance")]
    PegTooSmall(f64),
    #[error("groove band did not merge into one region ({0} pieces)")]
    BandTopology(usize),
    #[error(transparent)]
    Curve(#[from] CurveError),
}

/// Point on the epitrochoid at rolling angle `t`: the rolling circle's
/// center sits at radius R + r, and the arm of length `d` has turned by
/// (R + r)/r · t. Expects R, r > 0 and d ≥ 0.
pub fn epitrochoid(big_r: f64, small_r: f64, d: f64, t: f64) -> Point2 {
    let c = big_r + small_r;
    let arm = c * t / small_r;
    Point2::new(
        c * t.cos() - d * arm.cos(),
        c * t.sin() - d * arm.sin(),
    )
}

/// The region within `peg_radius` of the path: a union of regular 32-gons
/// circumscribed about the peg disk, one per arclength step, each rotated so
/// an edge faces the path normal. Circumscribed and edge-aligned, the gon
/// sides lie exactly on the band's true offset boundary; the polygonization
/// error is confined to the end caps (+0.3% of the cap area).
pub fn groove_band(path: &Polyline, peg_radius: f64) -> Result<ClosedPolygon, TrochoidError> {
    if peg_radius <= 1e-6 {
        return Err(TrochoidError::PegTooSmall(peg_radius));
    }
    const GON: usize = 32;
    let circum = peg_radius / (PI / GON as f64).cos();
    let pts = path.points();
    let length = path.total_arclength();
    let n = 1024usize.max((2.0 * length / peg_radius).ceil() as usize);
    let mut disks: Vec<ClosedPolygon> = Vec::with_capacity(n);
    let mut seg = 0usize;
    let mut seg_start = 0.0;
    for i in 0..n {
        let s = length * i as f64 / (n - 1) as f64;
        while seg + 2 < pts.len() && seg_start + pts[seg + 1].dist(pts[seg]) < s {
            seg_start += pts[seg + 1].dist(pts[seg]);
            seg += 1;
        }
        let dir = (pts[seg + 1] - pts[seg]).normalized();
        let center = pts[seg] + dir * (s - seg_start);
        let phase = dir.y.atan2(dir.x) + PI / 2.0;
        let ring: Vec<Point2> = (0..GON)
            .map(|k| {
                let a = phase + (2 * k + 1) as f64 * PI / GON as f64;
                center + Point2::new(circum * a.cos(), circum * a.sin())
            })
            .collect();
        disks.push(ClosedPolygon::new(ring, vec![])?);
    }
    let mut merged = union_tree(&disks);
    if merged.len() != 1 {
        return Err(TrochoidError::BandTopology(merged.len()));
    }
    Ok(merged.remove(0))
}

#[cfg(test)]
mod tests {
    use std::f64::consts::TAU;

    use super::*;
    use crate::curvekit::BoundaryIndex;
    use approx::{assert_abs_diff_eq, assert_relative_eq};
    use proptest::prelude::*;

    fn cardioid_path(samples: usize) -> Polyline {
        let pts: Vec<Point2> = (0..samples)
            .map(|i| epitrochoid(1.0, 1.0, 1.0, TAU * i as f64 / samples as f64))
            .collect();
        Polyline::new(pts).unwrap()
    }

    #[test]
    fn zero_arm_degenerates_to_a_circle() {
        for i in 0..97 {
            let t = TAU * i as f64 / 97.0 - PI;
            let p = epitrochoid(3.0, 0.7, 0.0, t);
            assert_relative_eq!(p.norm(), 3.7, max_relative = 1e-12);
        }
    }

    #[test]
    fn cardioid_endpoints() {
        let p0 = epitrochoid(1.0, 1.0, 1.0, 0.0);
        assert_abs_diff_eq!(p0.x, 1.0, epsilon = 1e-12);
        assert_abs_diff_eq!(p0.y, 0.0, epsilon = 1e-12);
        let p1 = epitrochoid(1.0, 1.0, 1.0, PI);
        assert_abs_diff_eq!(p1.x, -3.0, epsilon = 1e-12);
        assert_abs_diff_eq!(p1.y, 0.0, epsilon = 1e-12);
    }

    #[test]
    fn epicycloid_kisses_the_fixed_circle_at_its_cusps() {
        let (big_r, small_r) = (2.0f64, 1.0f64);
        // Cusps sit where the arm points straight at the center: t·R/r = 2πk.
        for k in 0..2 {
            let t = TAU * k as f64 * small_r / big_r;
            assert_abs_diff_eq!(epitrochoid(big_r, small_r, small_r, t).norm(), big_r, epsilon = 1e-12);
        }
        // Dense radial scan: the curve never dips inside the fixed circle,
        // and exactly R/r local minima approach it.
        let n = 32768;
        let radius =
            |i: i64| epitrochoid(big_r, small_r, small_r, TAU * i as f64 / n as f64).norm();
        let mut minima = 0;
        for i in 0..n {
            let r = radius(i);
            assert!(r >= big_r - 1e-9, "radius {r} at sample {i}");
            if r < radius(i - 1) && r < radius(i + 1) && r < big_r + 0.01 {
                minima += 1;
            }
        }
        assert_eq!(minima, 2);
    }

    proptest! {
        #[test]
        fn arm_length_is_invariant(
            big_r in 0.1f64..10.0,
            small_r in 0.05f64..5.0,
            d in 0.0f64..3.0,
            t in -20.0f64..20.0,
        ) {
            let p = epitrochoid(big_r, small_r, d, t);
            let hub = Point2::new((big_r + small_r) * t.cos(), (big_r + small_r) * t.sin());
            prop_assert!(((p - hub).norm() - d).abs() < 1e-9 * (big_r + small_r + d));
        }
    }

    #[test]
    fn straight_groove_is_a_stadium() {
        let path = Polyline::new(vec![Point2::ORIGIN, Point2::new(10.0, 0.0)]).unwrap();
        let peg = 0.5;
        let band = groove_band(&path, peg).unwrap();
        let expect = PI * peg * peg + 2.0 * 10.0 * peg;
        assert_relative_eq!(band.area(), expect, max_relative = 1e-3);
    }

    #[test]
    fn vanishing_peg_is_rejected() {
        let path = Polyline::new(vec![Point2::ORIGIN, Point2::new(1.0, 0.0)]).unwrap();
        assert!(matches!(
            groove_band(&path, 1e-9),
            Err(TrochoidError::PegTooSmall(_))
        ));
    }

    #[test]
    fn cardioid_band_area_matches_pixel_count() {
        let path = cardioid_path(1024);
        let peg = 0.1;
        let band = groove_band(&path, peg).unwrap();
        // Independent area estimate: classify pixel centers by distance to
        // the center path, boundary-straddling pixels at half weight.
        let index = BoundaryIndex::from_segments(
            path.points().windows(2).map(|w| (w[0], w[1])).collect(),
            0.2,
        );
        let h = 0.01;
        let fuzz = h * 0.71;
        // Cardioid extremes: x in [-3, 1.5], |y| <= 3*sqrt(3)/2, plus the peg.
        let (x0, x1, y0, y1) = (-3.2, 1.7, -2.8, 2.8);
        let mut area = 0.0;
        let mut y = y0 + h / 2.0;
        while y < y1 {
            let mut x = x0 + h / 2.0;
            while x < x1 {
                let dist = index.distance(Point2::new(x, y)).0;
                if dist <= peg - fuzz {
                    area += h * h;
                } else if dist < peg + fuzz {
                    area += h * h / 2.0;
                }
                x += h;
            }
            y += h;
        }
        assert_relative_eq!(band.area(), area, max_relative = 1e-2);
    }

    #[test]
    fn closed_band_encloses_a_hole() {
        let band = groove_band(&cardioid_path(1024), 0.1).unwrap();
        assert_eq!(band.holes().len(), 1);
        assert!(!band.contains_point(Point2::new(-1.0, 0.0)));
    }
}
