//! Two-parameter Mittag-Leffler function E_{α,β}(z) on the real line.
//!
//! Evaluation paths:
//! * `|z| <= SERIES_RADIUS` on the negative axis, and `0 < z <= 50`: the power
//!   series with compensated summation (log-space terms for `|z| > 1`).
//! * `z < -SERIES_RADIUS`, `0 < α < 1`: the Hankel contour collapsed onto the
//!   branch cut. For real negative argument the poles of `s^{α-β}/(s^α - z)` lie
//!   off the principal sheet, leaving
//!
//!   E_{α,β}(-x) = (1/π) ∫₀^∞ e^{-r} r^{α-β} (r^α sin πβ − x sin π(α−β))
//!                 / (r^{2α} + 2 x r^α cos πα + x²) dr,      α − β > −1,
//!
//!   whose integrand never changes sign for the (α, β) pairs used by the
//!   solution operators, so there is no cancellation at large `x`.
//! * `α = 1`: exponential closed forms.
//! * `1 < α <= 2`: series only, for `|z| <= 5`.

use core::f64::consts::PI;

use super::{is_nonpositive_integer, ln_gamma, rgamma, CompensatedSum};
use crate::error::{Error, Result};
use crate::quad::{integrate, Tolerance};

/// Radius of the negative half-axis on which the raw power series is trusted.
pub const SERIES_RADIUS: f64 = 1.0;
const POSITIVE_LIMIT: f64 = 50.0;
const HIGH_ORDER_LIMIT: f64 = 5.0;
const MAX_TERMS: usize = 400_000;

/// Index pair (α, β) of a Mittag-Leffler function.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct MLParams {
    alpha: f64,
    beta: f64,
}

impl MLParams {
    /// `alpha` must lie in (0, 2] (orders above one are evaluated by series
    /// only) and `beta` must be positive.
    pub fn new(alpha: f64, beta: f64) -> Result<Self> {
        if !(alpha > 0.0 && alpha <= 2.0) {
            return Err(Error::InvalidParameter { what: "alpha", reason: "must lie in (0, 2]" });
        }
        if !(beta > 0.0 && beta.is_finite()) {
            return Err(Error::InvalidParameter { what: "beta", reason: "must be positive" });
        }
        Ok(MLParams { alpha, beta })
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn beta(&self) -> f64 {
        self.beta
    }
}

/// E_{α,β}(z).
pub fn mittag_leffler(p: MLParams, z: f64) -> Result<f64> {
    ml_raw(p.alpha, p.beta, z)
}

/// d/dz E_{α,β}(z) = Σ_{k≥1} k z^{k−1}/Γ(αk+β).
pub fn mittag_leffler_derivative(p: MLParams, z: f64) -> Result<f64> {
    ml_derivative_raw(p.alpha, p.beta, z)
}

pub(crate) fn ml_derivative_raw(alpha: f64, beta: f64, z: f64) -> Result<f64> {
    if z.abs() <= SERIES_RADIUS {
        let mut sum = CompensatedSum::default();
        let mut small = 0;
        let mut zp = 1.0;
        for k in 1..MAX_TERMS {
            let term = k as f64 * zp * rgamma(alpha * k as f64 + beta);
            sum.add(term);
            zp *= z;
            if term.abs() <= 1e-17 * sum.value().abs() {
                small += 1;
                if small >= 3 {
                    break;
                }
            } else {
                small = 0;
            }
        }
        return Ok(sum.value());
    }
    let lower = ml_raw(alpha, beta - 1.0, z)?;
    let same = ml_raw(alpha, beta, z)?;
    Ok((lower - (beta - 1.0) * same) / (alpha * z))
}

/// E_{α,β}(z) for any real β (1/Γ is extended by zero at its poles).
pub(crate) fn ml_raw(alpha: f64, beta: f64, z: f64) -> Result<f64> {
    if !z.is_finite() {
        return Err(Error::UnsupportedRange { what: "mittag_leffler", value: z });
    }
    if z == 0.0 {
        return Ok(rgamma(beta));
    }
    if alpha == 1.0 {
        return exponential_family(beta, z);
    }
    if alpha > 1.0 {
        if z.abs() <= HIGH_ORDER_LIMIT {
            return Ok(series(alpha, beta, z));
        }
        return Err(Error::UnsupportedRange { what: "mittag_leffler (alpha > 1)", value: z });
    }
    if z > 0.0 {
        if z <= POSITIVE_LIMIT {
            return Ok(series(alpha, beta, z));
        }
        return Err(Error::UnsupportedRange { what: "mittag_leffler", value: z });
    }
    if -z <= SERIES_RADIUS {
        return Ok(series(alpha, beta, z));
    }
    negative_axis(alpha, beta, -z)
}

fn series(alpha: f64, beta: f64, z: f64) -> f64 {
    let mut sum = CompensatedSum::default();
    let mut small = 0;
    if z.abs() <= 1.0 {
        let mut zp = 1.0;
        for k in 0..MAX_TERMS {
            let term = zp * rgamma(alpha * k as f64 + beta);
            sum.add(term);
            zp *= z;
            if k >= 2 && term.abs() <= 1e-17 * sum.value().abs() {
                small += 1;
                if small >= 3 {
                    break;
                }
            } else {
                small = 0;
            }
        }
        return sum.value();
    }
    let lnz = libm::log(z.abs());
    let negative = z < 0.0;
    for k in 0..MAX_TERMS {
        let arg = alpha * k as f64 + beta;
        let term = if is_nonpositive_integer(arg) {
            0.0
        } else {
            let (lg, sg) = ln_gamma(arg);
            let sign = if negative && k % 2 == 1 { -sg } else { sg };
            sign * libm::exp(k as f64 * lnz - lg)
        };
        sum.add(term);
        if !sum.value().is_finite() {
            return sum.value();
        }
        if k >= 2 && arg > 1.0 && term.abs() <= 1e-17 * sum.value().abs() {
            small += 1;
            if small >= 3 {
                break;
            }
        } else {
            small = 0;
        }
    }
    sum.value()
}

fn exponential_family(beta: f64, z: f64) -> Result<f64> {
    if beta == 1.0 {
        return Ok(libm::exp(z));
    }
    if beta == 0.0 {
        return Ok(z * libm::exp(z));
    }
    if beta == 2.0 {
        return Ok(libm::expm1(z) / z);
    }
    if z.abs() <= 1.0 {
        return Ok(series(1.0, beta, z));
    }
    if libm::floor(beta) == beta {
        if beta > 2.0 {
            let mut e = libm::expm1(z) / z;
            let mut b = 2.0;
            while b < beta {
                e = (e - rgamma(b)) / z;
                b += 1.0;
            }
            return Ok(e);
        }
        // beta < 0: E_{1,β} = z E_{1,β+1}
        let mut e = z * libm::exp(z);
        let mut b = 0.0;
        while b > beta {
            e *= z;
            b -= 1.0;
        }
        return Ok(e);
    }
    if beta < 1.0 {
        // E_{1,β}(z) = 1/Γ(β) + z E_{1,β+1}(z)
        return Ok(rgamma(beta) + z * exponential_family(beta + 1.0, z)?);
    }
    // E_{1,β}(z) = (1/Γ(β−1)) ∫₀¹ e^{z(1−w)} w^{β−2} dw, β > 1
    let mut cuts = alloc::vec![0.0];
    let scale = 1.0 / z.abs();
    for m in [16.0, 4.0, 1.0] {
        if m * scale < 1.0 {
            cuts.push(1.0 - m * scale);
        }
    }
    cuts.push(1.0);
    let est = integrate(
        |w| libm::exp(z * (1.0 - w)) * libm::pow(w, beta - 2.0),
        &cuts,
        Tolerance::new(0.0, 1e-14).with_max_subdivisions(4000),
    )?;
    Ok(est.value * rgamma(beta - 1.0))
}

fn negative_axis(alpha: f64, beta: f64, x: f64) -> Result<f64> {
    if alpha - beta <= -1.0 {
        // E_{α,β}(z) = (E_{α,β−α}(z) − 1/Γ(β−α)) / z
        let lower = negative_axis(alpha, beta - alpha, x)?;
        return Ok((lower - rgamma(beta - alpha)) / (-x));
    }
    let (sin_pa, cos_pa) = (libm::sin(PI * alpha), libm::cos(PI * alpha));
    let sin_pb = libm::sin(PI * beta);
    let sin_pab = libm::sin(PI * (alpha - beta));
    // r = u^m removes the r^{α−β} endpoint singularity when α < β.
    let m = if alpha < beta { 1.0 / (1.0 + alpha - beta) } else { 1.0 };
    let integrand = |u: f64| {
        if u <= 0.0 {
            return 0.0;
        }
        let r = libm::pow(u, m);
        let ra = libm::pow(r, alpha);
        let shifted = ra + x * cos_pa;
        let denom = shifted * shifted + x * x * sin_pa * sin_pa;
        let numer = ra * sin_pb - x * sin_pab;
        // m u^{m−1} r^{α−β} = m u^{m(1+α−β)−1}
        let jac = m * libm::pow(u, m * (1.0 + alpha - beta) - 1.0);
        jac * libm::exp(-r) * numer / denom
    };
    let r_end = 80.0;
    let mut cuts = alloc::vec![0.0, 1.0];
    let peak = libm::pow(x, 1.0 / alpha);
    if peak > 1.0 && peak < r_end {
        let width = (x * sin_pa).max(1e-3 * peak);
        for c in [peak - width, peak, peak + width] {
            if c > 1.0 && c < r_end {
                cuts.push(c);
            }
        }
    }
    cuts.push(r_end);
    let inv_m = 1.0 / m;
    let ucuts: alloc::vec::Vec<f64> = cuts.iter().map(|r| libm::pow(*r, inv_m)).collect();
    let est = integrate(integrand, &ucuts, Tolerance::new(1e-300, 2e-14).with_max_subdivisions(4000))
        .map_err(|_| Error::UnsupportedRange { what: "mittag_leffler (contour quadrature)", value: -x })?;
    Ok(est.value / PI)
}
