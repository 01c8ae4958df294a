//! Scalar special functions: Gamma, the two-parameter Mittag-Leffler function
//! and the Mainardi–Wright density.

mod mittag_leffler;
mod table;
mod wright;

pub use mittag_leffler::{mittag_leffler, mittag_leffler_derivative, MLParams, SERIES_RADIUS};
pub use table::MlTable;
pub use wright::{mainardi_wright, ml_via_wright_quadrature};

pub(crate) use mittag_leffler::{ml_derivative_raw, ml_raw};

use crate::error::{Error, Result};

fn is_nonpositive_integer(x: f64) -> bool {
    x <= 0.0 && libm::floor(x) == x
}

/// Γ(x) for real `x` away from the poles at 0, −1, −2, …
pub fn gamma_fn(x: f64) -> Result<f64> {
    if x.is_nan() {
        return Err(Error::Domain { what: "gamma", value: x });
    }
    if is_nonpositive_integer(x) {
        return Err(Error::Pole { x });
    }
    Ok(libm::tgamma(x))
}

/// 1/Γ(x), extended by zero at the poles.
pub fn rgamma(x: f64) -> f64 {
    if is_nonpositive_integer(x) {
        0.0
    } else if x > 171.5 {
        let (lg, _) = libm::lgamma_r(x);
        libm::exp(-lg)
    } else {
        1.0 / libm::tgamma(x)
    }
}

/// (ln|Γ(x)|, sign Γ(x)).
pub(crate) fn ln_gamma(x: f64) -> (f64, f64) {
    let (lg, sign) = libm::lgamma_r(x);
    (lg, if sign < 0 { -1.0 } else { 1.0 })
}

/// Neumaier-compensated running sum.
#[derive(Clone, Copy, Debug, Default)]
pub(crate) struct CompensatedSum {
    sum: f64,
    carry: f64,
}

impl CompensatedSum {
    pub(crate) fn add(&mut self, x: f64) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.carry += (self.sum - t) + x;
        } else {
            self.carry += (x - t) + self.sum;
        }
        self.sum = t;
    }

    pub(crate) fn value(&self) -> f64 {
        self.sum + self.carry
    }
}
