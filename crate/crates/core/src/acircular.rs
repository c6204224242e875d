//! Pitch curves for non-circular gear pairs rolling on fixed parallel axles.
//!
//! Two pitch curves roll without slipping when r₁·dθ₁ = r₂·dθ₂ with
//! r₁ + r₂ = a, which pins the driven angle to θ₂(θ₁) = ∫ r₁/(a−r₁) dθ₁.
//! Everything here is built from that one identity: integrating it forward
//! (driven_motion), solving it for the center distance that closes both
//! curves (solve_center_distance), or inverting it to realize a prescribed
//! motion law (pitch_from_motion).

use std::f64::consts::TAU;

use thiserror::Error;

use crate::curvekit::{find_root, CurveError, PolarCurve};
use crate::involute::involute_of_circle;

#[derive(Debug, Error)]
pub enum AcircularError {
    #[error("pitch curve reaches the center distance: max radius {max_r}, a = {a}")]
    Infeasible { max_r: f64, a: f64 },
    #[error(
        "one driving turn advances the driven gear by {got:.9} rad, which is \
         not 2π/k for any whole k (nearest k = {k}, off by {rel:.2e} relative); \
         solve the center distance for a closing ratio first"
    )]
    NonClosing { got: f64, k: u32, rel: f64 },
    #[error("motion law: {0}")]
    BadLaw(String),
    #[error("turn ratio {p}:{q} must use coprime positive integers")]
    BadRatio { p: u32, q: u32 },
    #[error(transparent)]
    Curve(#[from] CurveError),
}

/// Driven angle as a function of driving angle, sampled monotonically.
/// Closed laws span θ₁ ∈ [0, 2π]; open laws (spiral samples) may stop short.
#[derive(Debug, Clone)]
pub struct MotionLaw {
    samples: Vec<(f64, f64)>,
}

impl MotionLaw {
    /// A closed law: θ₁ runs exactly from 0 to 2π, θ₂ from 0, both strictly
    /// increasing.
    pub fn new(samples: Vec<(f64, f64)>) -> Result<Self, AcircularError> {
        let law = Self::new_open(samples)?;
        let end = law.samples.last().unwrap().0;
        if (end - TAU).abs() > 1e-6 {
            return Err(AcircularError::BadLaw(format!(
                "driving angle must span [0, 2π], ends at {end}"
            )));
        }
        let mut law = law;
        law.samples.last_mut().unwrap().0 = TAU;
        Ok(law)
    }

    /// Like `new` but without the full-turn requirement, for open pairs.
    pub fn new_open(mut samples: Vec<(f64, f64)>) -> Result<Self, AcircularError> {
        if samples.len() < 3 {
            return Err(AcircularError::BadLaw(format!(
                "need at least 3 samples, got {}",
                samples.len()
            )));
        }
        if samples[0].0.abs() > 1e-9 || samples[0].1.abs() > 1e-9 {
            return Err(AcircularError::BadLaw(format!(
                "law must start at (0, 0), starts at ({}, {})",
                samples[0].0, samples[0].1
            )));
        }
        samples[0] = (0.0, 0.0);
        for i in 1..samples.len() {
            if samples[i].0 <= samples[i - 1].0 {
                return Err(AcircularError::BadLaw(format!(
                    "driving angle not strictly increasing at index {i}"
                )));
            }
            if samples[i].1 <= samples[i - 1].1 {
                return Err(AcircularError::BadLaw(format!(
                    "driven angle not strictly increasing at index {i} \
                     (ratio must stay positive)"
                )));
            }
        }
        Ok(MotionLaw { samples })
    }

    /// Samples θ₂ = f(θ₁) at `n` uniform steps across a full driving turn.
    pub fn from_fn(n: usize, f: impl Fn(f64) -> f64) -> Result<Self, AcircularError> {
        MotionLaw::new(
            (0..=n)
                .map(|i| {
                    let th = TAU * i as f64 / n as f64;
                    (th, f(th))
                })
                .collect(),
        )
    }

    /// Constant-ratio law θ₂ = k·θ₁.
    pub fn uniform_ratio(k: f64, n: usize) -> Self {
        MotionLaw::from_fn(n, |th| k * th).expect("linear law is monotone")
    }

    pub fn samples(&self) -> &[(f64, f64)] {
        &self.samples
    }

    /// (θ₁, θ₂) at the end of the sampled range.
    pub fn end(&self) -> (f64, f64) {
        *self.samples.last().unwrap()
    }

    /// Driven angle at `theta1`, clamped to the sampled range.
    pub fn theta2_at(&self, theta1: f64) -> f64 {
        interp_monotone(&self.samples, theta1, |s| s.0, |s| s.1)
    }

    /// Driving angle at `theta2`, clamped to the sampled range.
    pub fn theta1_at(&self, theta2: f64) -> f64 {
        interp_monotone(&self.samples, theta2, |s| s.1, |s| s.0)
    }

    /// The same relation driven from the other shaft: θ₁ as a function of θ₂.
    pub fn inverse(&self) -> MotionLaw {
        MotionLaw {
            samples: self.samples.iter().map(|&(a, b)| (b, a)).collect(),
        }
    }
}

fn interp_monotone(
    samples: &[(f64, f64)],
    x: f64,
    key: impl Fn(&(f64, f64)) -> f64,
    val: impl Fn(&(f64, f64)) -> f64,
) -> f64 {
    let first = &samples[0];
    let last = samples.last().unwrap();
    if x <= key(first) {
        return val(first);
    }
    if x >= key(last) {
        return val(last);
    }
    let i = match samples.binary_search_by(|s| key(s).partial_cmp(&x).unwrap()) {
        Ok(i) => return val(&samples[i]),
        Err(i) => i - 1,
    };
    let (a, b) = (&samples[i], &samples[i + 1]);
    let t = (x - key(a)) / (key(b) - key(a));
    val(a) + (val(b) - val(a)) * t
}

/// A pair of pitch curves rolling on axles a fixed distance apart, plus the
/// motion law that relates their rotations. `closed` marks both curves as
/// full 2π-periodic loops; open pairs (spirals) only mesh over the law's
/// sampled range.
#[derive(Debug, Clone)]
pub struct PitchPair {
    pub r1: PolarCurve,
    pub r2: PolarCurve,
    pub a: f64,
    pub law: MotionLaw,
    pub closed: bool,
}

/// Exact ∫ r/(a−r) dθ over one segment where r is linear in θ.
fn theta2_segment(a: f64, t0: f64, r0: f64, t1: f64, r1: f64) -> f64 {
    let dt = t1 - t0;
    if dt <= 0.0 {
        return 0.0;
    }
    if (r1 - r0).abs() <= 1e-12 * a {
        let r_mid = 0.5 * (r0 + r1);
        return r_mid / (a - r_mid) * dt;
    }
    let b = (r1 - r0) / dt;
    let u0 = a - r0;
    let u1 = a - r1;
    ((u1 - u0) - a * (u1 / u0).ln()) / b
}

/// Cumulative driven angle at each breakpoint of `r1` (appending the wrap
/// back to θ = 2π when `full_turn`).
fn theta2_breakpoints(
    r1: &PolarCurve,
    a: f64,
    full_turn: bool,
) -> Result<Vec<(f64, f64)>, AcircularError> {
    let max_r = r1.max_radius();
    if max_r >= a {
        return Err(AcircularError::Infeasible { max_r, a });
    }
    let s = r1.samples();
    let mut table = Vec::with_capacity(s.len() + 1);
    table.push((0.0, 0.0));
    let mut cum = 0.0;
    for i in 1..s.len() {
        cum += theta2_segment(a, s[i - 1].0, s[i - 1].1, s[i].0, s[i].1);
        table.push((s[i].0, cum));
    }
    if full_turn {
        let last = s[s.len() - 1];
        cum += theta2_segment(a, last.0, last.1, TAU, s[0].1);
        table.push((TAU, cum));
    }
    Ok(table)
}

/// Driven angle swept over one full driving turn: θ₂(2π) = ∮ r₁/(a−r₁) dθ₁,
/// integrated in closed form over the curve's own linear segments.
pub fn driven_angle_total(r1: &PolarCurve, a: f64) -> Result<f64, AcircularError> {
    Ok(theta2_breakpoints(r1, a, true)?.last().unwrap().1)
}

/// (θ₁, θ₂) at every breakpoint of `r1` plus the 2π wrap — the exact driven
/// motion of the sampled curve, before any closure snapping.
pub fn driven_angle_table(r1: &PolarCurve, a: f64) -> Result<Vec<(f64, f64)>, AcircularError> {
    theta2_breakpoints(r1, a, true)
}

/// θ₁ at which the cumulative driven angle reaches `target`, solved segment-
/// exactly against the breakpoint table.
fn invert_theta2(table: &[(f64, f64)], r1: &PolarCurve, a: f64, target: f64) -> f64 {
    debug_assert!(target >= 0.0 && target <= table.last().unwrap().1 + 1e-12);
    let i = match table.binary_search_by(|e| e.1.partial_cmp(&target).unwrap()) {
        Ok(i) => return table[i].0,
        Err(i) => (i - 1).min(table.len() - 2),
    };
    let (t0, c0) = table[i];
    let t1 = table[i + 1].0;
    let r0 = r1.eval(t0);
    let r1v = r1.eval(t1);
    let b = (r1v - r0) / (t1 - t0);
    let local = target - c0;
    find_root(
        |t| theta2_segment(a, t0, r0, t, r0 + b * (t - t0)) - local,
        t0,
        t1,
        1e-13,
    )
    .expect("cumulative angle brackets the target within its segment")
}

/// How far 2π/θ₂_end is from a whole number; the driven curve only closes
/// when one driving turn is an exact 1/k of the driven revolution.
fn closure_count(theta2_end: f64) -> Result<u32, AcircularError> {
    let k_real = TAU / theta2_end;
    let k = k_real.round().max(1.0);
    let rel = (k_real - k).abs() / k;
    if rel > 1e-6 {
        return Err(AcircularError::NonClosing {
            got: theta2_end,
            k: k as u32,
            rel,
        });
    }
    Ok(k as u32)
}

/// Integrates the rolling identity to produce the driven pitch curve and
/// motion law for `r1` at center distance `a`. The driven curve is sampled
/// on a uniform θ₂ grid (k·N points per driven revolution, N = the law's
/// resolution), with each grid angle mapped back to its exact θ₁ so that
/// r₁(θ₁) + r₂(θ₂(θ₁)) = a holds to machine precision at every sample.
pub fn driven_motion(r1: &PolarCurve, a: f64) -> Result<PitchPair, AcircularError> {
    let table = theta2_breakpoints(r1, a, true)?;
    let theta2_end = table.last().unwrap().1;
    let k = closure_count(theta2_end)? as usize;
    let n = r1.samples().len().max(4096);

    let mut law_samples = Vec::with_capacity(n + 1);
    let mut radii = Vec::with_capacity(n);
    for j in 0..=n {
        let frac = j as f64 / n as f64;
        let theta1 = if j == 0 {
            0.0
        } else if j == n {
            TAU
        } else {
            invert_theta2(&table, r1, a, theta2_end * frac)
        };
        // Label the station with its exact share of the closed driven turn.
        law_samples.push((theta1, TAU * j as f64 / (k * n) as f64));
        if j < n {
            radii.push(a - r1.eval(theta1));
        }
    }
    let law = MotionLaw::new(law_samples)?;

    // One driving turn traces 1/k of the driven curve; the remaining k−1
    // sectors repeat it (r1 is 2π-periodic, so every window is identical).
    let mut r2_samples = Vec::with_capacity(k * n);
    for w in 0..k {
        for (j, &r) in radii.iter().enumerate() {
            let angle = TAU * (w * n + j) as f64 / (k * n) as f64;
            r2_samples.push((angle, r));
        }
    }
    let r2 = PolarCurve::new(r2_samples)?;
    Ok(PitchPair {
        r1: r1.clone(),
        r2,
        a,
        law,
        closed: true,
    })
}

/// Center distance at which `p` driving turns produce exactly `q` driven
/// turns. The total driven angle is strictly decreasing in `a`, so a sign
/// change bracket plus root refinement pins it down; the residual
/// |p·θ₂(2π) − 2πq| is verified to 1e-9 before returning.
pub fn solve_center_distance(r1: &PolarCurve, p: u32, q: u32) -> Result<f64, AcircularError> {
    if p == 0 || q == 0 || gcd(p, q) != 1 {
        return Err(AcircularError::BadRatio { p, q });
    }
    let max_r = r1.max_radius();
    let target = TAU * q as f64 / p as f64;
    let g = |a: f64| driven_angle_total(r1, a).map(|t| t - target);

    // As a → max r⁺ the integrand blows up; as a → ∞ it vanishes.
    let mut lo = f64::NAN;
    for eps in [1e-9, 1e-11, 1e-13] {
        let cand = max_r * (1.0 + eps);
        if g(cand)? > 0.0 {
            lo = cand;
            break;
        }
    }
    if lo.is_nan() {
        return Err(AcircularError::BadRatio { p, q });
    }
    let mut hi = 2.0 * max_r;
    while g(hi)? > 0.0 {
        hi *= 2.0;
    }
    let a = find_root(|a| g(a).unwrap(), lo, hi, 1e-12).map_err(|e| {
        AcircularError::BadLaw(format!("center-distance search failed: {e}"))
    })?;
    let residual = (driven_angle_total(r1, a)? - target).abs() * p as f64;
    assert!(
        residual <= 1e-9,
        "closure residual {residual:.3e} exceeds 1e-9"
    );
    Ok(a)
}

fn gcd(a: u32, b: u32) -> u32 {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

/// Builds the pitch pair that realizes a prescribed closed motion law at
/// center distance `a`: r₁ = a·θ₂′/(1+θ₂′) with θ₂′ taken by central
/// differences on the (periodically extended) sample grid, and r₂ = a − r₁
/// reindexed by θ₂.
pub fn pitch_from_motion(law: &MotionLaw, a: f64) -> Result<PitchPair, AcircularError> {
    let s = law.samples();
    let n = s.len() - 1;
    if (s[n].0 - TAU).abs() > 1e-9 {
        return Err(AcircularError::BadLaw(
            "pitch synthesis needs a law spanning a full driving turn".into(),
        ));
    }
    let theta2_end = s[n].1;
    let k = closure_count(theta2_end)? as usize;

    // Periodic neighbor lookup: sample n is sample 0 shifted by one turn.
    let wrapped = |i: isize| -> (f64, f64) {
        if i < 0 {
            let (t1, t2) = s[(n as isize + i) as usize];
            (t1 - TAU, t2 - theta2_end)
        } else if i as usize >= n {
            let (t1, t2) = s[i as usize - n];
            (t1 + TAU, t2 + theta2_end)
        } else {
            s[i as usize]
        }
    };
    let mut r1_samples = Vec::with_capacity(n);
    for i in 0..n {
        let (xm, ym) = wrapped(i as isize - 1);
        let (x0, y0) = s[i];
        let (xp, yp) = wrapped(i as isize + 1);
        let h0 = x0 - xm;
        let h1 = xp - x0;
        // Three-point derivative, second order on non-uniform spacing.
        let d = (yp * h0 * h0 - ym * h1 * h1 + y0 * (h1 * h1 - h0 * h0))
            / (h0 * h1 * (h0 + h1));
        if d <= 0.0 {
            return Err(AcircularError::BadLaw(format!(
                "non-positive rotation rate {d} at θ₁ = {x0}"
            )));
        }
        let r = a * d / (1.0 + d);
        r1_samples.push((x0, r));
    }
    let r1 = PolarCurve::new(r1_samples)?;

    // Reindex by θ₂, scaled so k copies close the driven revolution exactly.
    let lambda = (TAU / k as f64) / theta2_end;
    let mut r2_samples = Vec::with_capacity(k * n);
    for w in 0..k {
        for i in 0..n {
            let angle = w as f64 * TAU / k as f64 + lambda * s[i].1;
            r2_samples.push((angle, a - r1.samples()[i].1));
        }
    }
    let r2 = PolarCurve::new(r2_samples)?;
    Ok(PitchPair {
        r1,
        r2,
        a,
        law: law.clone(),
        closed: true,
    })
}

/// Sample pair with spiral pitch curves: r₁ follows the involute of a small
/// circle over most of one turn, so its radius grows monotonically like a
/// nautilus shell. The pair only meshes over the sampled range (marked
/// open); the center distance is twice the largest radius.
pub fn nautilus_pair() -> Result<PitchPair, AcircularError> {
    let r_base = 5.0;
    let phi_max = 7.5; // polar angle φ − atan φ stays below 2π
    let n = 2048;
    let spiral: Vec<(f64, f64)> = (0..=n)
        .map(|i| {
            let phi = phi_max * i as f64 / n as f64;
            let p = involute_of_circle(r_base, phi);
            (phi - phi.atan(), p.norm())
        })
        .collect();
    let r1 = PolarCurve::new(spiral)?;
    let a = 2.0 * r1.max_radius();

    let table = theta2_breakpoints(&r1, a, false)?;
    let theta1_end = table.last().unwrap().0;
    let theta2_end = table.last().unwrap().1;
    let mut law_samples = Vec::with_capacity(n + 1);
    let mut r2_samples = Vec::with_capacity(n + 1);
    for j in 0..=n {
        let target = theta2_end * j as f64 / n as f64;
        let theta1 = if j == 0 {
            0.0
        } else if j == n {
            theta1_end
        } else {
            invert_theta2(&table, &r1, a, target)
        };
        law_samples.push((theta1, target));
        r2_samples.push((target, a - r1.eval(theta1)));
    }
    let law = MotionLaw::new_open(law_samples)?;
    let r2 = PolarCurve::new(r2_samples)?;
    Ok(PitchPair {
        r1,
        r2,
        a,
        law,
        closed: false,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::{assert_abs_diff_eq, assert_relative_eq};
    use proptest::prelude::*;

    /// Closing center distance for r₁ = 1 + 0.2·cos θ at ratio 1:1, from the
    /// closed form ∮ r/(a−r) dθ = 2π ⇒ 3a² − 8a + 3.84 = 0.
    fn fixture_a() -> f64 {
        (20.0 + 4.0 * 7f64.sqrt()) / 15.0
    }

    fn fixture_curve(n: usize) -> PolarCurve {
        PolarCurve::from_fn(n, |th| 1.0 + 0.2 * th.cos()).unwrap()
    }

    #[test]
    fn constant_half_radius_gives_unit_ratio() {
        let a = 3.0;
        let r1 = PolarCurve::from_fn(256, |_| a / 2.0).unwrap();
        let pair = driven_motion(&r1, a).unwrap();
        for &(t1, t2) in pair.law.samples() {
            assert_abs_diff_eq!(t1, t2, epsilon = 1e-12);
        }
        for &(_, r) in pair.r2.samples() {
            assert_eq!(r, a / 2.0); // exact: constant in, constant out
        }
    }

    #[test]
    fn constant_third_radius_gives_two_to_one_reduction() {
        let a = 3.0;
        let r1 = PolarCurve::from_fn(256, |_| 1.0).unwrap();
        let pair = driven_motion(&r1, a).unwrap();
        let (t1_end, t2_end) = pair.law.end();
        assert_abs_diff_eq!(t1_end, TAU, epsilon = 1e-12);
        assert_abs_diff_eq!(t2_end, TAU / 2.0, epsilon = 1e-12);
        // Driven curve covers the full circle at twice the sample count.
        assert_eq!(pair.r2.samples().len(), 2 * 4096);
        for &(_, r) in pair.r2.samples() {
            assert_eq!(r, 2.0);
        }
        assert_abs_diff_eq!(pair.law.theta2_at(1.0), 0.5, epsilon = 1e-12);
    }

    #[test]
    fn driven_table_matches_midpoint_quadrature() {
        // Oracle: 2²⁰ midpoint samples of r/(a−r) on the same interpolated
        // curve, accumulated across a full turn; compare at breakpoints that
        // land exactly on oracle step boundaries.
        let r1 = fixture_curve(4096);
        let a = fixture_a();
        let table = driven_angle_table(&r1, a).unwrap();
        let n_oracle: usize = 1 << 20;
        let h = TAU / n_oracle as f64;
        let mut oracle = 0.0;
        let mut targets = Vec::new();
        for step in 0..n_oracle {
            let th = (step as f64 + 0.5) * h;
            let r = r1.eval(th);
            oracle += r / (a - r) * h;
            if (step + 1) % (n_oracle / 32) == 0 {
                targets.push(oracle);
            }
        }
        for (j, &want) in targets.iter().enumerate() {
            // Oracle checkpoint (j+1)/32 of a turn = breakpoint (j+1)·128.
            let got = table[(j + 1) * 128].1;
            assert_abs_diff_eq!(got, want, epsilon = 1e-7);
        }
        assert_abs_diff_eq!(table.last().unwrap().1, TAU, epsilon = 1e-6);
    }

    #[test]
    fn trivial_center_distances() {
        let r1 = PolarCurve::from_fn(128, |_| 1.0).unwrap();
        let a = solve_center_distance(&r1, 1, 1).unwrap();
        assert_relative_eq!(a, 2.0, epsilon = 1e-9);
        let a = solve_center_distance(&r1, 2, 1).unwrap();
        assert_relative_eq!(a, 3.0, epsilon = 1e-9);
    }

    #[test]
    fn solved_center_distance_matches_closed_form() {
        let r1 = fixture_curve(1 << 16);
        let a = solve_center_distance(&r1, 1, 1).unwrap();
        assert_abs_diff_eq!(a, fixture_a(), epsilon = 1e-7);
    }

    #[test]
    fn solved_center_distance_matches_bisection_oracle() {
        let r1 = fixture_curve(4096);
        let a = solve_center_distance(&r1, 1, 1).unwrap();
        // Oracle: plain bisection on 2¹⁸-point midpoint quadrature.
        let n_mid: usize = 1 << 18;
        let h = TAU / n_mid as f64;
        let sweep = |a: f64| -> f64 {
            let mut total = 0.0;
            for step in 0..n_mid {
                let r = r1.eval((step as f64 + 0.5) * h);
                total += r / (a - r) * h;
            }
            total - TAU
        };
        let (mut lo, mut hi) = (1.2 + 1e-6, 5.0);
        for _ in 0..45 {
            let mid = 0.5 * (lo + hi);
            if sweep(mid) > 0.0 {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        let oracle = 0.5 * (lo + hi);
        assert_abs_diff_eq!(a, oracle, epsilon = 1e-6);
        assert_abs_diff_eq!(a, 2.0388669, epsilon = 1e-5); // frozen value
    }

    #[test]
    fn radius_sum_is_exact_at_law_samples() {
        let r1 = fixture_curve(4096);
        let a = solve_center_distance(&r1, 1, 1).unwrap();
        let pair = driven_motion(&r1, a).unwrap();
        for &(t1, t2) in pair.law.samples() {
            let sum = pair.r1.eval(t1) + pair.r2.eval(t2);
            assert!((sum - a).abs() <= 1e-9 * a, "sum off by {}", (sum - a).abs());
        }
    }

    #[test]
    fn arclength_identity_along_the_roll() {
        let r1 = fixture_curve(4096);
        let a = solve_center_distance(&r1, 1, 1).unwrap();
        let pair = driven_motion(&r1, a).unwrap();
        for &(t1, t2) in pair.law.samples().iter().step_by(64).skip(1) {
            let s1 = pair.r1.arclength(0.0, t1).unwrap();
            let s2 = pair.r2.arclength(0.0, t2).unwrap();
            assert!(
                (s1 - s2).abs() <= 1e-5 * s1,
                "arclength mismatch {} vs {}",
                s1,
                s2
            );
        }
    }

    #[test]
    fn motion_inversion_trivials() {
        let a = 4.0;
        let pair = pitch_from_motion(&MotionLaw::uniform_ratio(1.0, 512), a).unwrap();
        for &(_, r) in pair.r1.samples() {
            assert_abs_diff_eq!(r, a / 2.0, epsilon = 1e-12);
        }
        let pair = pitch_from_motion(&MotionLaw::uniform_ratio(0.5, 512), a).unwrap();
        for &(_, r) in pair.r1.samples() {
            assert_abs_diff_eq!(r, a / 3.0, epsilon = 1e-12);
        }
    }

    #[test]
    fn motion_inversion_matches_algebraic_radius() {
        // θ₂ = θ₁ + 0.1 sin θ₁ ⇒ r₁ = a(1 + 0.1 cos)/(2 + 0.1 cos).
        let a = 2.0;
        let law = MotionLaw::from_fn(1 << 16, |t| t + 0.1 * t.sin()).unwrap();
        let pair = pitch_from_motion(&law, a).unwrap();
        for &(th, r) in pair.r1.samples().iter().step_by(97) {
            let c = th.cos();
            let want = a * (1.0 + 0.1 * c) / (2.0 + 0.1 * c);
            assert_abs_diff_eq!(r, want, epsilon = 1e-9);
        }
    }

    #[test]
    fn round_trip_recovers_the_pitch_curve() {
        let r1 = fixture_curve(4096);
        let a = solve_center_distance(&r1, 1, 1).unwrap();
        let pair = driven_motion(&r1, a).unwrap();
        let back = pitch_from_motion(&pair.law, a).unwrap();
        for i in 0..512 {
            let th = TAU * i as f64 / 512.0;
            let want = 1.0 + 0.2 * th.cos();
            let got = back.r1.eval(th);
            assert!(
                (got - want).abs() <= 1e-4 * want,
                "r1({th}) = {got}, want {want}"
            );
        }
    }

    #[test]
    fn infeasible_and_nonclosing_inputs_are_rejected() {
        let r1 = fixture_curve(512);
        assert!(matches!(
            driven_motion(&r1, 1.1),
            Err(AcircularError::Infeasible { .. })
        ));
        assert!(matches!(
            driven_motion(&r1, 3.0),
            Err(AcircularError::NonClosing { .. })
        ));
        assert!(matches!(
            solve_center_distance(&r1, 2, 4),
            Err(AcircularError::BadRatio { .. })
        ));
    }

    #[test]
    fn nautilus_pair_is_open_and_consistent() {
        let pair = nautilus_pair().unwrap();
        assert!(!pair.closed);
        let (t1_end, t2_end) = pair.law.end();
        assert!(t1_end < TAU && t2_end < t1_end);
        for &(t1, t2) in pair.law.samples() {
            let sum = pair.r1.eval(t1) + pair.r2.eval(t2);
            assert!((sum - pair.a).abs() <= 1e-9 * pair.a);
        }
        // Spiral radius grows monotonically.
        let s = pair.r1.samples();
        assert!(s.windows(2).all(|w| w[1].1 > w[0].1));
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(32))]

        // The driven sweep shrinks strictly as the axles move apart — the
        // fact that justifies bisection in solve_center_distance.
        #[test]
        fn driven_sweep_decreases_with_center_distance(
            c1 in -0.2f64..0.2,
            s1 in -0.2f64..0.2,
            c2 in -0.1f64..0.1,
            gap1 in 0.05f64..1.0,
            gap2 in 0.05f64..1.0,
        ) {
            let r1 = PolarCurve::from_fn(256, |th| {
                1.0 + c1 * th.cos() + s1 * th.sin() + c2 * (2.0 * th).cos()
            }).unwrap();
            let a1 = r1.max_radius() + gap1;
            let a2 = a1 + gap2;
            let t1 = driven_angle_total(&r1, a1).unwrap();
            let t2 = driven_angle_total(&r1, a2).unwrap();
            prop_assert!(t1 > t2);
        }

        // Rolling contact keeps the two radii summing to the center distance
        // at every law sample, whatever the (feasible, closing) input curve.
        #[test]
        fn radius_sum_property_on_solved_pairs(
            c1 in -0.25f64..0.25,
            s2 in -0.15f64..0.15,
        ) {
            let r1 = PolarCurve::from_fn(512, |th| {
                1.0 + c1 * th.cos() + s2 * (2.0 * th).sin()
            }).unwrap();
            let a = solve_center_distance(&r1, 1, 1).unwrap();
            let pair = driven_motion(&r1, a).unwrap();
            for &(t1, t2) in pair.law.samples().iter().step_by(37) {
                let sum = pair.r1.eval(t1) + pair.r2.eval(t2);
                prop_assert!((sum - a).abs() <= 1e-9 * a);
            }
        }
    }
}
