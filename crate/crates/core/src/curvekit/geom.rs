use std::ops::{Add, Div, Mul, Neg, Sub};

/// A point (or vector) in the plane, millimeters.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Point2 {
    pub x: f64,
    pub y: f64,
}

impl Point2 {
    pub const ORIGIN: Point2 = Point2 { x: 0.0, y: 0.0 };

    pub fn new(x: f64, y: f64) -> Self {
        Point2 { x, y }
    }

    pub fn dot(self, o: Point2) -> f64 {
        self.x * o.x + self.y * o.y
    }

    /// z-component of the cross product; positive when `o` is counterclockwise of `self`.
    pub fn cross(self, o: Point2) -> f64 {
        self.x * o.y - self.y * o.x
    }

    pub fn norm(self) -> f64 {
        self.x.hypot(self.y)
    }

    pub fn norm_sq(self) -> f64 {
        self.x * self.x + self.y * self.y
    }

    pub fn dist(self, o: Point2) -> f64 {
        (self - o).norm()
    }

    /// Counterclockwise perpendicular (rotation by +90°).
    pub fn perp(self) -> Point2 {
        Point2::new(-self.y, self.x)
    }

    pub fn normalized(self) -> Point2 {
        let n = self.norm();
        debug_assert!(n > 0.0, "normalizing zero vector");
        self / n
    }

    /// Rotation about the origin by `angle` radians, counterclockwise.
    pub fn rotated(self, angle: f64) -> Point2 {
        let (s, c) = angle.sin_cos();
        Point2::new(c * self.x - s * self.y, s * self.x + c * self.y)
    }

    pub fn angle(self) -> f64 {
        self.y.atan2(self.x)
    }

    pub fn lerp(self, o: Point2, t: f64) -> Point2 {
        self + (o - self) * t
    }

    pub fn from_polar(r: f64, theta: f64) -> Point2 {
        let (s, c) = theta.sin_cos();
        Point2::new(r * c, r * s)
    }
}

impl Add for Point2 {
    type Output = Point2;
    fn add(self, o: Point2) -> Point2 {
        Point2::new(self.x + o.x, self.y + o.y)
    }
}

impl Sub for Point2 {
    type Output = Point2;
    fn sub(self, o: Point2) -> Point2 {
        Point2::new(self.x - o.x, self.y - o.y)
    }
}

impl Mul<f64> for Point2 {
    type Output = Point2;
    fn mul(self, k: f64) -> Point2 {
        Point2::new(self.x * k, self.y * k)
    }
}

impl Div<f64> for Point2 {
    type Output = Point2;
    fn div(self, k: f64) -> Point2 {
        Point2::new(self.x / k, self.y / k)
    }
}

impl Neg for Point2 {
    type Output = Point2;
    fn neg(self) -> Point2 {
        Point2::new(-self.x, -self.y)
    }
}

/// A rigid planar motion: rotation about `pivot`, then translation.
/// Applying a pose preserves pairwise distances.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RigidPose {
    pub rotation: f64,
    pub pivot: Point2,
    pub translation: Point2,
}

impl RigidPose {
    pub fn identity() -> Self {
        RigidPose {
            rotation: 0.0,
            pivot: Point2::ORIGIN,
            translation: Point2::ORIGIN,
        }
    }

    pub fn rotation_about(pivot: Point2, angle: f64) -> Self {
        RigidPose {
            rotation: angle,
            pivot,
            translation: Point2::ORIGIN,
        }
    }

    pub fn translation(v: Point2) -> Self {
        RigidPose {
            rotation: 0.0,
            pivot: Point2::ORIGIN,
            translation: v,
        }
    }

    pub fn apply(&self, p: Point2) -> Point2 {
        (p - self.pivot).rotated(self.rotation) + self.pivot + self.translation
    }

    /// The pose equivalent to applying `self` first, then `outer`.
    /// Result is in canonical form (pivot at the origin).
    pub fn then(&self, outer: &RigidPose) -> RigidPose {
        RigidPose {
            rotation: self.rotation + outer.rotation,
            pivot: Point2::ORIGIN,
            translation: outer.apply(self.apply(Point2::ORIGIN)),
        }
    }

    pub fn apply_all(&self, pts: &[Point2]) -> Vec<Point2> {
        pts.iter().map(|&p| self.apply(p)).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn rotation_and_perp() {
        let p = Point2::new(1.0, 0.0);
        let q = p.rotated(std::f64::consts::FRAC_PI_2);
        assert_relative_eq!(q.x, 0.0, epsilon = 1e-15);
        assert_relative_eq!(q.y, 1.0, epsilon = 1e-15);
        assert_eq!(p.perp(), Point2::new(0.0, 1.0));
    }

    #[test]
    fn pose_preserves_distances() {
        let pose = RigidPose {
            rotation: 0.7,
            pivot: Point2::new(3.0, -2.0),
            translation: Point2::new(10.0, 4.0),
        };
        let a = Point2::new(1.0, 2.0);
        let b = Point2::new(-5.0, 0.3);
        assert_relative_eq!(pose.apply(a).dist(pose.apply(b)), a.dist(b), epsilon = 1e-9);
    }

    #[test]
    fn compose_matches_sequential_application() {
        let a = RigidPose::rotation_about(Point2::new(1.0, 1.0), 0.4);
        let b = RigidPose {
            rotation: -1.1,
            pivot: Point2::new(-2.0, 0.5),
            translation: Point2::new(0.3, 0.9),
        };
        let p = Point2::new(2.5, -1.5);
        let direct = b.apply(a.apply(p));
        let composed = a.then(&b).apply(p);
        assert_relative_eq!(direct.x, composed.x, epsilon = 1e-12);
        assert_relative_eq!(direct.y, composed.y, epsilon = 1e-12);
    }
}
