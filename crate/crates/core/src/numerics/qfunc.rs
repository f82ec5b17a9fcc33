use std::f64::consts::FRAC_1_SQRT_2;

use crate::error::{Error, Result};

/// Gaussian tail probability `Q(x) = P(Z > x)` for a standard normal Z.
pub fn gaussian_q(x: f64) -> Result<f64> {
    if !x.is_finite() {
        return Err(Error::domain("gaussian_q", format!("non-finite argument {x}")));
    }
    Ok(0.5 * libm::erfc(x * FRAC_1_SQRT_2))
}
