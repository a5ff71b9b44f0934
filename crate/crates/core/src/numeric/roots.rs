//! Scalar root bracketing and extremum search.

/// Bisection on a sign change of `f` over `[a, b]`, down to width `tol`.
/// Returns `None` when the endpoints do not bracket a root.
pub fn bisect<F: FnMut(f64) -> f64>(mut f: F, mut a: f64, mut b: f64, tol: f64) -> Option<f64> {
    let mut fa = f(a);
    let fb = f(b);
    if fa == 0.0 {
        return Some(a);
    }
    if fb == 0.0 {
        return Some(b);
    }
    if fa.signum() == fb.signum() {
        return None;
    }
    while (b - a).abs() > tol {
        let m = 0.5 * (a + b);
        let fm = f(m);
        if fm == 0.0 {
            return Some(m);
        }
        if fm.signum() == fa.signum() {
            a = m;
            fa = fm;
        } else {
            b = m;
        }
    }
    Some(0.5 * (a + b))
}

/// Bisection on a boolean predicate that flips between `a` and `b`.
/// Returns the final bracket.
pub fn bisect_predicate<F: FnMut(f64) -> bool>(mut p: F, mut a: f64, mut b: f64, tol: f64) -> (f64, f64) {
    let pa = p(a);
    while (b - a).abs() > tol {
        let m = 0.5 * (a + b);
        if p(m) == pa {
            a = m;
        } else {
            b = m;
        }
    }
    (a, b)
}

/// All sign changes of `f` on `[a, b]`, located by a uniform scan with `n`
/// intervals and refined by bisection.
pub fn sign_changes<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, n: usize, tol: f64) -> Vec<f64> {
    let mut out = Vec::new();
    let xs: Vec<f64> = (0..=n).map(|i| a + (b - a) * i as f64 / n as f64).collect();
    let vals: Vec<f64> = xs.iter().map(|&x| f(x)).collect();
    for i in 0..n {
        let (f0, f1) = (vals[i], vals[i + 1]);
        if f0 == 0.0 {
            if i > 0 {
                out.push(xs[i]);
            }
            continue;
        }
        if f0.signum() != f1.signum() && f1 != 0.0 {
            if let Some(r) = bisect(&f, xs[i], xs[i + 1], tol) {
                out.push(r);
            }
        }
    }
    out
}

/// Minimum of `f` on `[a, b]`: coarse scan with `n` intervals, then golden
/// section search around the best sample. Returns `(argmin, min)`.
pub fn minimize<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, n: usize, tol: f64) -> (f64, f64) {
    let xs: Vec<f64> = (0..=n).map(|i| a + (b - a) * i as f64 / n as f64).collect();
    let (best, _) = xs
        .iter()
        .enumerate()
        .map(|(i, &x)| (i, f(x)))
        .fold((0, f64::INFINITY), |acc, (i, v)| if v < acc.1 { (i, v) } else { acc });
    let mut lo = xs[best.saturating_sub(1)];
    let mut hi = xs[(best + 1).min(n)];
    let g = 0.5 * (5f64.sqrt() - 1.0);
    let mut x1 = hi - g * (hi - lo);
    let mut x2 = lo + g * (hi - lo);
    let (mut f1, mut f2) = (f(x1), f(x2));
    while hi - lo > tol {
        if f1 < f2 {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - g * (hi - lo);
            f1 = f(x1);
        } else {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + g * (hi - lo);
            f2 = f(x2);
        }
    }
    // Endpoints can win when the minimum sits on the boundary.
    [(lo, f(lo)), (hi, f(hi)), (x1, f1), (x2, f2), (xs[best], f(xs[best]))]
        .into_iter()
        .fold((a, f64::INFINITY), |acc, c| if c.1 < acc.1 { c } else { acc })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bisection_finds_sqrt_two() {
        let r = bisect(|x| x * x - 2.0, 0.0, 2.0, 1e-14).unwrap();
        assert!((r - 2f64.sqrt()).abs() < 1e-13);
        assert!(bisect(|x| x * x + 1.0, -1.0, 1.0, 1e-10).is_none());
    }

    #[test]
    fn scan_finds_all_roots_of_sine() {
        let roots = sign_changes(f64::sin, 0.5, 10.0, 100, 1e-13);
        assert_eq!(roots.len(), 3);
        for (k, r) in roots.iter().enumerate() {
            assert!((r - (k + 1) as f64 * std::f64::consts::PI).abs() < 1e-12);
        }
    }

    #[test]
    fn golden_section_interior_and_boundary() {
        let (x, v) = minimize(|x| (x - 0.3).powi(2) + 1.0, -1.0, 1.0, 16, 1e-12);
        assert!((x - 0.3).abs() < 1e-6 && (v - 1.0).abs() < 1e-12);
        let (x, _) = minimize(|x| x, -1.0, 1.0, 16, 1e-12);
        assert_eq!(x, -1.0);
    }

    #[test]
    fn predicate_bisection_brackets_threshold() {
        let (a, b) = bisect_predicate(|x| x > 0.123456789, 0.0, 1.0, 1e-10);
        assert!(a <= 0.123456789 && b >= 0.123456789 && b - a <= 1e-10);
    }
}
