use crate::error::{Error, Result};

/// Acceptable residual of a defining equation at the returned root.
pub const RESIDUAL_TOL: f64 = 1e-10;
const BISECT_WIDTH: f64 = 1e-8;
const SECANT_STEPS: usize = 5;

fn same_side(a: f64, b: f64) -> bool {
    (a > 0.0 && b > 0.0) || (a < 0.0 && b < 0.0)
}

/// Root of `f` on `[lo, hi]`: bisection down to a relative width of 1e-8,
/// at most five secant steps, then further bisection if the residual is
/// still above [`RESIDUAL_TOL`]. Endpoint values may be infinite (poles).
///
/// Fails with `NoRoot` when the endpoints do not straddle zero or when the
/// bracket collapses onto a sign change that is not a root.
pub fn bracketed_root<F: Fn(f64) -> f64>(f: F, lo: f64, hi: f64, what: &'static str) -> Result<f64> {
    let no_root = || Error::NoRoot { what, lo, hi };
    let (mut a, mut b) = (lo, hi);
    let (mut fa, mut fb) = (f(a), f(b));
    if fa == 0.0 {
        return Ok(a);
    }
    if fb == 0.0 {
        return Ok(b);
    }
    if fa.is_nan() || fb.is_nan() || same_side(fa, fb) {
        return Err(no_root());
    }

    let mut best = if fa.abs() <= fb.abs() { (a, fa) } else { (b, fb) };
    let track = |x: f64, fx: f64, best: &mut (f64, f64)| {
        if fx.abs() < best.1.abs() {
            *best = (x, fx);
        }
    };

    let width = |a: f64, b: f64| BISECT_WIDTH * a.abs().max(b.abs()).max(1.0);
    while b - a > width(a, b) {
        let m = 0.5 * (a + b);
        let fm = f(m);
        track(m, fm, &mut best);
        if fm == 0.0 {
            return Ok(m);
        }
        if same_side(fm, fa) {
            (a, fa) = (m, fm);
        } else {
            (b, fb) = (m, fm);
        }
    }

    let (mut x0, mut f0, mut x1, mut f1) = (a, fa, b, fb);
    for _ in 0..SECANT_STEPS {
        if !(f0.is_finite() && f1.is_finite()) || f0 == f1 {
            break;
        }
        let x2 = x1 - f1 * (x1 - x0) / (f1 - f0);
        if !(x2 >= a && x2 <= b) {
            break;
        }
        let f2 = f(x2);
        track(x2, f2, &mut best);
        if f2 == 0.0 {
            return Ok(x2);
        }
        if same_side(f2, fa) {
            (a, fa) = (x2, f2);
        } else {
            b = x2;
        }
        (x0, f0, x1, f1) = (x1, f1, x2, f2);
    }

    // Rare: steep or kinked residuals need the bracket squeezed further.
    while best.1.abs() > RESIDUAL_TOL {
        let m = 0.5 * (a + b);
        if !(m > a && m < b) {
            break;
        }
        let fm = f(m);
        track(m, fm, &mut best);
        if fm == 0.0 {
            return Ok(m);
        }
        if same_side(fm, fa) {
            (a, fa) = (m, fm);
        } else {
            b = m;
        }
    }
    if best.1.abs() <= RESIDUAL_TOL {
        Ok(best.0)
    } else {
        Err(no_root())
    }
}
