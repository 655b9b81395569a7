use num_complex::Complex64;

use crate::error::{Error, Result};

/// Shape parameters `(σ, μ, α, ν)` of a modified Talbot contour
/// `z(θ) = (n_z/t)·(−σ + μ·θ·cot(αθ) + ν·i·θ)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TalbotConstants {
    pub sigma: f64,
    pub mu: f64,
    pub alpha: f64,
    pub nu: f64,
}

impl Default for TalbotConstants {
    /// The optimized cotangent-contour parameters published by Weideman and
    /// Trefethen for parabolic problems. They are external values, not
    /// derived here.
    fn default() -> Self {
        TalbotConstants {
            sigma: 0.6122,
            mu: 0.5017,
            alpha: 0.6407,
            nu: 0.2645,
        }
    }
}

/// Nodes on the upper half of the contour, at midpoints
/// `θ_k = (k − ½)·π/(n_z/2)`, `k = 1..=n_z/2`.
///
/// The lower half is the complex conjugate of the returned list.
pub fn talbot_shifts(n_z: usize, t: f64, c: TalbotConstants) -> Result<Vec<Complex64>> {
    if n_z == 0 || !n_z.is_multiple_of(2) {
        return Err(Error::InvalidArgument(format!(
            "number of contour nodes must be even and positive, got {n_z}"
        )));
    }
    if !(t > 0.0) || !t.is_finite() {
        return Err(Error::InvalidArgument(format!(
            "contour time t must be positive, got {t}"
        )));
    }
    if !(c.alpha > 0.0 && c.alpha < 1.0) {
        return Err(Error::InvalidArgument(format!(
            "contour alpha must lie in (0, 1), got {}",
            c.alpha
        )));
    }
    let half = n_z / 2;
    let scale = n_z as f64 / t;
    Ok((1..=half)
        .map(|k| {
            let theta = (k as f64 - 0.5) * std::f64::consts::PI / half as f64;
            let cot = 1.0 / (c.alpha * theta).tan();
            Complex64::new(
                scale * (-c.sigma + c.mu * theta * cot),
                scale * c.nu * theta,
            )
        })
        .collect())
}
