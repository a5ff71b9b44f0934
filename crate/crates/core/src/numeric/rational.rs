//! Snapping floats to nearby small-denominator rationals.

/// Best rational approximation `p/q` with `q <= max_den` from the continued
/// fraction expansion of `x`, accepted only if within `tol` of `x`.
pub fn rationalize(x: f64, max_den: i64, tol: f64) -> Option<(i64, i64)> {
    if !x.is_finite() {
        return None;
    }
    let (mut p0, mut q0, mut p1, mut q1) = (0i64, 1i64, 1i64, 0i64);
    let mut r = x;
    for _ in 0..64 {
        let a = r.floor();
        if a.abs() > 1e15 {
            break;
        }
        let a = a as i64;
        let (p2, q2) = (a * p1 + p0, a * q1 + q0);
        if q2 > max_den {
            break;
        }
        (p0, q0, p1, q1) = (p1, q1, p2, q2);
        if ((p1 as f64 / q1 as f64) - x).abs() <= tol {
            return Some((p1, q1));
        }
        let frac = r - a as f64;
        if frac.abs() < 1e-15 {
            break;
        }
        r = 1.0 / frac;
    }
    None
}

/// `x` snapped to its rational approximation, or `x` itself.
pub fn snap(x: f64, max_den: i64, tol: f64) -> (f64, bool) {
    match rationalize(x, max_den, tol) {
        Some((p, q)) => (p as f64 / q as f64, true),
        None => (x, false),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn recovers_simple_fractions() {
        assert_eq!(rationalize(0.75 + 1e-7, 64, 1e-5), Some((3, 4)));
        assert_eq!(rationalize(-2.0 / 3.0, 64, 1e-9), Some((-2, 3)));
        assert_eq!(rationalize(5.0, 64, 1e-9), Some((5, 1)));
        assert_eq!(rationalize(std::f64::consts::PI, 64, 1e-5), None);
        assert_eq!(snap(std::f64::consts::PI, 64, 1e-2).0, 22.0 / 7.0);
    }
}
