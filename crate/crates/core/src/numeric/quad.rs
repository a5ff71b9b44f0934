//! One-dimensional quadrature on top of the double-exponential rule.

use std::num::NonZeroUsize;

use gauss_quad::GaussLegendre;

use crate::error::{Error, Result};

/// Nodes and weights of a composite Gauss-Legendre rule: `panels` equal
/// panels on `[a, b]`, `order` nodes each.
pub fn gauss_legendre_nodes(a: f64, b: f64, panels: usize, order: usize) -> Vec<(f64, f64)> {
    let rule = GaussLegendre::new(NonZeroUsize::new(order.max(1)).expect("nonzero"));
    let width = (b - a) / panels as f64;
    let mut out = Vec::with_capacity(panels * order);
    for k in 0..panels {
        let lo = a + k as f64 * width;
        for &(x, w) in rule.as_node_weight_pairs() {
            out.push((lo + 0.5 * width * (x + 1.0), 0.5 * width * w));
        }
    }
    out
}

/// Integral of `f` over `[a, b]` split at the given interior breakpoints.
/// Each piece is handled by tanh-sinh quadrature, which tolerates the
/// square-root endpoint behaviour the action integrands have.
pub fn integrate_pieces<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, breaks: &[f64], tol: f64) -> Result<f64> {
    let mut pts = vec![a];
    pts.extend(breaks.iter().copied().filter(|&x| x > a && x < b));
    pts.push(b);
    pts.sort_by(f64::total_cmp);
    let mut total = 0.0;
    for w in pts.windows(2) {
        if w[1] - w[0] <= 0.0 {
            continue;
        }
        let out = quadrature::double_exponential::integrate(&f, w[0], w[1], tol);
        if !out.integral.is_finite() {
            return Err(Error::Quadrature(format!("non-finite integral on [{}, {}]", w[0], w[1])));
        }
        if out.error_estimate > 1e3 * tol.max(1e-14 * out.integral.abs()) {
            return Err(Error::Quadrature(format!(
                "error estimate {:e} on [{}, {}] after {} evaluations",
                out.error_estimate, w[0], w[1], out.num_function_evaluations
            )));
        }
        total += out.integral;
    }
    Ok(total)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn semicircle_area() {
        let v = integrate_pieces(|x| (1.0 - x * x).max(0.0).sqrt(), -1.0, 1.0, &[], 1e-13).unwrap();
        assert!((v - std::f64::consts::FRAC_PI_2).abs() < 1e-12);
    }

    #[test]
    fn composite_gauss_legendre_is_exact_on_polynomials() {
        let v: f64 = gauss_legendre_nodes(-1.0, 2.0, 3, 5).iter().map(|(x, w)| w * x.powi(9)).sum();
        assert!((v - (2f64.powi(10) - 1.0) / 10.0).abs() < 1e-11);
    }

    #[test]
    fn kinked_integrand_with_breakpoint() {
        let v = integrate_pieces(|x: f64| (x - 0.3).abs(), 0.0, 1.0, &[0.3], 1e-13).unwrap();
        assert!((v - (0.045 + 0.245)).abs() < 1e-13);
    }
}
