//! Numerical building blocks shared by the higher modules.

pub mod ode;
pub mod quad;
pub mod rational;
pub mod roots;

use nalgebra::{DMatrix, DVector};

/// Linear least squares `min |A x - b|` via SVD, with the residual RMS.
pub fn least_squares(a: &DMatrix<f64>, b: &DVector<f64>) -> Option<(DVector<f64>, f64)> {
    let svd = a.clone().svd(true, true);
    let x = svd.solve(b, 1e-13).ok()?;
    let r = a * &x - b;
    let rms = (r.norm_squared() / b.len().max(1) as f64).sqrt();
    Some((x, rms))
}
