use std::f64::consts::TAU;

use super::{CurveError, Point2, SNAP_TOL};

/// An open polygonal curve. Parameterized by fractional vertex index:
/// t ∈ [0, len−1], linear within each segment.
#[derive(Debug, Clone)]
pub struct Polyline {
    points: Vec<Point2>,
    /// cum[i] = arclength from points[0] to points[i]
    cum: Vec<f64>,
}

impl Polyline {
    pub fn new(points: Vec<Point2>) -> Result<Self, CurveError> {
        if points.len() < 2 {
            return Err(CurveError::TooFewPoints(points.len()));
        }
        for i in 1..points.len() {
            if points[i].dist(points[i - 1]) <= SNAP_TOL {
                return Err(CurveError::DuplicatePoint(i));
            }
        }
        let mut cum = Vec::with_capacity(points.len());
        cum.push(0.0);
        for i in 1..points.len() {
            cum.push(cum[i - 1] + points[i].dist(points[i - 1]));
        }
        Ok(Polyline { points, cum })
    }

    pub fn points(&self) -> &[Point2] {
        &self.points
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        false // ≥2 points by construction
    }

    pub fn max_param(&self) -> f64 {
        (self.points.len() - 1) as f64
    }

    pub fn total_arclength(&self) -> f64 {
        *self.cum.last().unwrap()
    }

    fn check_param(&self, t: f64) -> Result<(), CurveError> {
        if !(0.0..=self.max_param() + 1e-12).contains(&t) {
            return Err(CurveError::Parameter(format!(
                "t = {t} outside [0, {}]",
                self.max_param()
            )));
        }
        Ok(())
    }

    fn split_param(&self, t: f64) -> (usize, f64) {
        let last = self.points.len() - 2;
        let k = (t.floor() as usize).min(last);
        (k, t - k as f64)
    }

    pub fn point_at(&self, t: f64) -> Result<Point2, CurveError> {
        self.check_param(t)?;
        let (k, frac) = self.split_param(t);
        Ok(self.points[k].lerp(self.points[k + 1], frac))
    }

    /// Unit tangent at parameter `t`. Vertex tangents are centered differences
    /// (one-sided at the ends), interpolated within segments; this keeps the
    /// direction second-order accurate on smooth curves.
    pub fn tangent_at(&self, t: f64) -> Result<Point2, CurveError> {
        self.check_param(t)?;
        let (k, frac) = self.split_param(t);
        let a = self.vertex_tangent(k);
        if frac == 0.0 {
            return Ok(a);
        }
        let b = self.vertex_tangent(k + 1);
        let mix = a.lerp(b, frac);
        if mix.norm() < 1e-12 {
            return Ok((self.points[k + 1] - self.points[k]).normalized());
        }
        Ok(mix.normalized())
    }

    fn vertex_tangent(&self, i: usize) -> Point2 {
        let n = self.points.len();
        // Endpoints use the second-order one-sided stencil (−3p₀+4p₁−p₂)/2
        // so accuracy doesn't collapse to first order at the curve's ends.
        let d = if i == 0 {
            if n >= 3 {
                self.points[1] * 4.0 - self.points[0] * 3.0 - self.points[2]
            } else {
                self.points[1] - self.points[0]
            }
        } else if i == n - 1 {
            if n >= 3 {
                self.points[n - 1] * 3.0 - self.points[n - 2] * 4.0 + self.points[n - 3]
            } else {
                self.points[n - 1] - self.points[n - 2]
            }
        } else {
            self.points[i + 1] - self.points[i - 1]
        };
        d.normalized()
    }

    /// Arclength between parameters `from` and `to` (vertex-index parameters).
    pub fn arclength(&self, from: f64, to: f64) -> Result<f64, CurveError> {
        if from > to {
            return Err(CurveError::Parameter(format!("from {from} > to {to}")));
        }
        self.check_param(from)?;
        self.check_param(to)?;
        Ok(self.arc_at(to) - self.arc_at(from))
    }

    fn arc_at(&self, t: f64) -> f64 {
        let (k, frac) = self.split_param(t);
        self.cum[k] + (self.cum[k + 1] - self.cum[k]) * frac
    }
}

/// A closed pitch-style curve r(θ) around the origin, sampled on [0, 2π) and
/// assumed 2π-periodic; interpolation is piecewise-linear in (θ, r).
#[derive(Debug, Clone)]
pub struct PolarCurve {
    samples: Vec<(f64, f64)>,
}

impl PolarCurve {
    pub fn new(samples: Vec<(f64, f64)>) -> Result<Self, CurveError> {
        if samples.len() < 3 {
            return Err(CurveError::TooFewPoints(samples.len()));
        }
        if samples[0].0.abs() > 1e-12 {
            return Err(CurveError::BadStart(samples[0].0));
        }
        let mut samples = samples;
        samples[0].0 = 0.0;
        for i in 0..samples.len() {
            let (th, r) = samples[i];
            if !r.is_finite() || r <= 0.0 {
                return Err(CurveError::BadRadius(i));
            }
            if i > 0 && th <= samples[i - 1].0 {
                return Err(CurveError::BadAngle(i));
            }
            if th >= TAU {
                return Err(CurveError::BadAngle(i));
            }
        }
        Ok(PolarCurve { samples })
    }

    /// Sample an analytic radius function at `n` uniform angles.
    pub fn from_fn(n: usize, f: impl Fn(f64) -> f64) -> Result<Self, CurveError> {
        let samples = (0..n)
            .map(|i| {
                let th = TAU * i as f64 / n as f64;
                (th, f(th))
            })
            .collect();
        PolarCurve::new(samples)
    }

    pub fn samples(&self) -> &[(f64, f64)] {
        &self.samples
    }

    pub fn min_radius(&self) -> f64 {
        self.samples.iter().map(|s| s.1).fold(f64::INFINITY, f64::min)
    }

    pub fn max_radius(&self) -> f64 {
        self.samples.iter().map(|s| s.1).fold(0.0, f64::max)
    }

    /// Radius at any angle; the curve wraps 2π-periodically.
    pub fn eval(&self, theta: f64) -> f64 {
        let th = theta.rem_euclid(TAU);
        let n = self.samples.len();
        // Segment [i, i+1) containing th; the final wrap segment joins the
        // last sample back to the first at θ = 2π.
        let i = match self
            .samples
            .binary_search_by(|s| s.0.partial_cmp(&th).unwrap())
        {
            Ok(i) => return self.samples[i].1,
            Err(0) => unreachable!("first sample is θ=0"),
            Err(i) => i - 1,
        };
        let (t0, r0) = self.samples[i];
        let (t1, r1) = if i + 1 < n {
            self.samples[i + 1]
        } else {
            (TAU, self.samples[0].1)
        };
        r0 + (r1 - r0) * (th - t0) / (t1 - t0)
    }

    pub fn point_at(&self, theta: f64) -> Point2 {
        Point2::from_polar(self.eval(theta), theta)
    }

    /// Arclength of the interpolated curve between angles `from` and `to`
    /// (from ≤ to, at most one period apart). Each linear-in-θ segment is
    /// integrated in closed form, so the only error is interpolation error.
    pub fn arclength(&self, from: f64, to: f64) -> Result<f64, CurveError> {
        if from > to {
            return Err(CurveError::Parameter(format!("from {from} > to {to}")));
        }
        if to - from > TAU + 1e-9 {
            return Err(CurveError::Parameter(
                "span exceeds one period".to_string(),
            ));
        }
        // Walk breakpoints of the periodic piecewise-linear radius.
        let mut total = 0.0;
        let mut th = from;
        while th < to - 1e-15 {
            let next_break = self.next_breakpoint(th).min(to);
            let r0 = self.eval(th);
            let r1 = self.eval(next_break);
            total += segment_arclength(th, r0, next_break, r1);
            th = next_break;
        }
        Ok(total)
    }

    /// Smallest sample angle (lifted periodically) strictly greater than `th`.
    fn next_breakpoint(&self, th: f64) -> f64 {
        let base = (th / TAU).floor() * TAU;
        let local = th - base;
        let i = self.samples.partition_point(|s| s.0 <= local + 1e-15);
        if i < self.samples.len() {
            base + self.samples[i].0
        } else {
            base + TAU
        }
    }

    /// Closed polygon of the curve sampled at `n` uniform angles.
    pub fn to_polygon(&self, n: usize) -> super::ClosedPolygon {
        let pts = (0..n)
            .map(|i| self.point_at(TAU * i as f64 / n as f64))
            .collect();
        super::ClosedPolygon::new(pts, vec![]).expect("positive-radius polar curve is simple")
    }

    /// Closed polygon through the curve's own samples (no resampling).
    pub fn to_polygon_native(&self) -> super::ClosedPolygon {
        let pts = self
            .samples
            .iter()
            .map(|&(th, r)| Point2::from_polar(r, th))
            .collect();
        super::ClosedPolygon::new(pts, vec![]).expect("positive-radius polar curve is simple")
    }
}

/// Exact arclength of r(θ) linear between (t0, r0) and (t1, r1):
/// ∫ √(r² + r′²) dθ with constant slope b has antiderivative
/// (u√(u²+b²) + b²·asinh-style log)/(2b) in u = r(θ).
fn segment_arclength(t0: f64, r0: f64, t1: f64, r1: f64) -> f64 {
    let dt = t1 - t0;
    if dt <= 0.0 {
        return 0.0;
    }
    let b = (r1 - r0) / dt;
    if b.abs() <= 1e-9 * (r0.abs() + r1.abs()).max(1e-300) {
        return 0.5 * (r0 + r1) * dt;
    }
    let f = |u: f64| {
        let h = (u * u + b * b).sqrt();
        (u * h + b * b * (u + h).ln()) / (2.0 * b)
    };
    f(r1) - f(r0)
}
