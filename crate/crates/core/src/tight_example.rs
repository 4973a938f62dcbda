//! A 2x3 dictionary on which the tight bound holds with equality, and the
//! rounded 3x4 matrix whose eta and gamma sequences are not monotone.

use crate::error::{Error, Result};
use crate::matops::Matrix;

/// Upper end of the admissible angle range, in radians:
/// `acos((sqrt(17) - 1) / 4)`.
pub fn theta0() -> f64 {
    ((17f64.sqrt() - 1.0) / 4.0).acos()
}

pub fn theta0_degrees() -> f64 {
    theta0().to_degrees()
}

/// The equality instance for a given angle and threshold.
///
/// `a = [[1, cos t, sin(t/2)], [0, sin t, -cos(t/2)]]`, `s0 = (beta, 0, 0)`,
/// `s_hat = (0, beta, alpha)` with `beta = alpha / (2 sin(t/2))`; both vectors
/// solve `a s = x`.
#[derive(Debug, Clone)]
pub struct TightExample {
    pub theta: f64,
    pub alpha: f64,
    pub beta: f64,
    pub a: Matrix,
    pub s0: Vec<f64>,
    pub s_hat: Vec<f64>,
    pub x: Vec<f64>,
}

impl TightExample {
    /// `theta` in radians, strictly inside `(0, theta0)`; `alpha > 0`.
    pub fn new(theta: f64, alpha: f64) -> Result<Self> {
        let t0 = theta0();
        if !(theta > 0.0 && theta < t0) {
            return Err(Error::Domain(format!(
                "theta = {:.6} deg must lie in (0, {:.4} deg)",
                theta.to_degrees(),
                t0.to_degrees()
            )));
        }
        if !(alpha > 0.0 && alpha.is_finite()) {
            return Err(Error::Domain(format!("alpha = {alpha} must be positive")));
        }
        let half = 0.5 * theta;
        let beta = alpha / (2.0 * half.sin());
        let a = Matrix::from_rows(&[
            [1.0, theta.cos(), half.sin()],
            [0.0, theta.sin(), -half.cos()],
        ])?;
        let s0 = vec![beta, 0.0, 0.0];
        let s_hat = vec![0.0, beta, alpha];
        let x = vec![beta, 0.0];
        Ok(TightExample { theta, alpha, beta, a, s0, s_hat, x })
    }

    pub fn from_degrees(theta_deg: f64, alpha: f64) -> Result<Self> {
        Self::new(theta_deg.to_radians(), alpha)
    }

    /// `gamma_bar = gamma_2 = sqrt(1 + 1/(1 - cos t))`, with `1 - cos t`
    /// written as `2 sin^2(t/2)`.
    pub fn gamma_bar_closed_form(&self) -> f64 {
        let s = (0.5 * self.theta).sin();
        (1.0 + 1.0 / (2.0 * s * s)).sqrt()
    }

    /// `||s_hat - s0||_2 = sqrt(2 beta^2 + alpha^2)`.
    pub fn actual_error(&self) -> f64 {
        (2.0 * self.beta * self.beta + self.alpha * self.alpha).sqrt()
    }
}

/// The 3x4 matrix with 2-decimal entries, stored as printed.
pub fn rounded_three_by_four() -> Matrix {
    Matrix::from_rows(&[
        [0.79, 0.82, -0.84, -0.82],
        [-0.57, 0.55, 0.33, -0.38],
        [0.23, -0.19, -0.43, 0.42],
    ])
    .expect("fixture is well formed")
}
