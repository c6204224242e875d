use thiserror::Error;

#[derive(Debug, Error)]
pub enum NumericError {
    #[error("no sign change on [{a}, {b}]: f(a) = {fa}, f(b) = {fb}")]
    NoBracket { a: f64, b: f64, fa: f64, fb: f64 },
    #[error("did not converge; best estimate {best}")]
    NoConvergence { best: f64 },
}

/// Adaptive Simpson quadrature of `f` over [a, b] to absolute tolerance
/// `tol`. Fails (with its best estimate) only if some panel still misses its
/// share of the tolerance at the maximum recursion depth.
pub fn integrate(f: impl Fn(f64) -> f64, a: f64, b: f64, tol: f64) -> Result<f64, NumericError> {
    assert!(tol > 0.0 && b >= a);
    if a == b {
        return Ok(0.0);
    }
    let m = 0.5 * (a + b);
    let (fa, fm, fb) = (f(a), f(m), f(b));
    let whole = simpson(a, b, fa, fm, fb);
    let mut converged = true;
    let value = adapt(&f, a, b, fa, fm, fb, whole, tol, 48, &mut converged);
    if converged {
        Ok(value)
    } else {
        Err(NumericError::NoConvergence { best: value })
    }
}

fn simpson(a: f64, b: f64, fa: f64, fm: f64, fb: f64) -> f64 {
    (b - a) / 6.0 * (fa + 4.0 * fm + fb)
}

#[allow(clippy::too_many_arguments)]
fn adapt(
    f: &impl Fn(f64) -> f64,
    a: f64,
    b: f64,
    fa: f64,
    fm: f64,
    fb: f64,
    whole: f64,
    tol: f64,
    depth: u32,
    converged: &mut bool,
) -> f64 {
    let m = 0.5 * (a + b);
    let lm = 0.5 * (a + m);
    let rm = 0.5 * (m + b);
    let (flm, frm) = (f(lm), f(rm));
    let left = simpson(a, m, fa, flm, fm);
    let right = simpson(m, b, fm, frm, fb);
    let err = left + right - whole;
    if err.abs() <= 15.0 * tol {
        return left + right + err / 15.0;
    }
    if depth == 0 {
        *converged = false;
        return left + right + err / 15.0;
    }
    adapt(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1, converged)
        + adapt(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1, converged)
}

/// Root of `f` on the bracket [a, b] (f must change sign). Secant steps with
/// a bisection fallback keep the bracket shrinking; stops once the bracket
/// width drops below `tol` or an exact zero shows up.
pub fn find_root(
    f: impl Fn(f64) -> f64,
    a: f64,
    b: f64,
    tol: f64,
) -> Result<f64, NumericError> {
    assert!(tol > 0.0 && b > a);
    let (mut lo, mut hi) = (a, b);
    let (mut flo, mut fhi) = (f(lo), f(hi));
    if flo == 0.0 {
        return Ok(lo);
    }
    if fhi == 0.0 {
        return Ok(hi);
    }
    if flo.signum() == fhi.signum() {
        return Err(NumericError::NoBracket {
            a,
            b,
            fa: flo,
            fb: fhi,
        });
    }
    for _ in 0..200 {
        if hi - lo <= tol {
            break;
        }
        // Secant candidate, clamped away from the ends; bisect if it stalls.
        let secant = lo - flo * (hi - lo) / (fhi - flo);
        let margin = 0.01 * (hi - lo);
        let x = if secant > lo + margin && secant < hi - margin {
            secant
        } else {
            0.5 * (lo + hi)
        };
        let fx = f(x);
        if fx == 0.0 {
            return Ok(x);
        }
        if fx.signum() == flo.signum() {
            lo = x;
            flo = fx;
        } else {
            hi = x;
            fhi = fx;
        }
    }
    // Weight the endpoint with the smaller residual.
    Ok(if flo.abs() <= fhi.abs() { lo } else { hi })
}
