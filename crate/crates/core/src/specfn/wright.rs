//! Mainardi–Wright density M_α and the Laplace-transform route to E_{α,α}.

use core::cell::Cell;
use core::f64::consts::PI;

use super::{ln_gamma, rgamma, CompensatedSum};
use crate::error::{Error, Result};
use crate::quad::{integrate, Tolerance};

/// Largest tolerated ratio between the biggest series term and the sum
/// (six decimal digits of cancellation).
const MAX_CANCELLATION: f64 = 1e6;

/// M_α(θ) = Σ_{n≥0} (−θ)^n / (n! Γ(1 − α(n+1))).
///
/// The series is used while its cancellation stays below six digits; beyond
/// that the density is computed from the positive-integrand representation
///
/// M_α(θ) = θ^{α/(1−α)} / (π(1−α)) ∫₀^π A(φ) exp(−θ^{1/(1−α)} A(φ)) dφ,
/// A(φ) = (sin αφ / sin φ)^{1/(1−α)} · sin((1−α)φ) / sin αφ,
///
/// obtained from the one-sided stable law through M_α(t^{−α}) = t^{1+α} f_α(t)/α.
pub fn mainardi_wright(alpha: f64, theta: f64) -> Result<f64> {
    if !(alpha > 0.0 && alpha < 1.0) {
        return Err(Error::InvalidParameter { what: "alpha", reason: "must lie in (0, 1)" });
    }
    if !(theta >= 0.0) || !theta.is_finite() {
        return Err(Error::Domain { what: "mainardi_wright theta", value: theta });
    }
    if theta == 0.0 {
        return Ok(rgamma(1.0 - alpha));
    }
    if let Some(v) = wright_series(alpha, theta) {
        return Ok(v);
    }
    wright_integral(alpha, theta)
}

/// Series value, or `None` when cancellation exceeds the stability bound.
pub(crate) fn wright_series(alpha: f64, theta: f64) -> Option<f64> {
    let ln_theta = libm::log(theta);
    let mut sum = CompensatedSum::default();
    let mut biggest: f64 = 0.0;
    let mut small = 0;
    for n in 0..4000usize {
        let nf = n as f64;
        // 1/Γ(1−x) = Γ(x) sin(πx)/π with x = α(n+1)
        let x = alpha * (nf + 1.0);
        let (lg, sg) = ln_gamma(x);
        let (lf, _) = ln_gamma(nf + 1.0);
        let magnitude = libm::exp(nf * ln_theta + lg - lf) / PI;
        let sign = if n % 2 == 1 { -sg } else { sg };
        let term = sign * magnitude * libm::sin(PI * x);
        biggest = biggest.max(magnitude);
        sum.add(term);
        let s = sum.value().abs();
        if n > 2 && magnitude <= 1e-16 * s {
            small += 1;
            if small >= 3 {
                break;
            }
        } else {
            small = 0;
        }
    }
    let s = sum.value();
    if s.is_finite() && s != 0.0 && biggest / s.abs() <= MAX_CANCELLATION {
        Some(s)
    } else {
        None
    }
}

fn kanter(alpha: f64, phi: f64) -> f64 {
    let sa = libm::sin(alpha * phi);
    let ratio = sa / libm::sin(phi);
    libm::pow(ratio, 1.0 / (1.0 - alpha)) * libm::sin((1.0 - alpha) * phi) / sa
}

pub(crate) fn wright_integral(alpha: f64, theta: f64) -> Result<f64> {
    let c = libm::pow(theta, 1.0 / (1.0 - alpha));
    let a0 = libm::pow(alpha, alpha / (1.0 - alpha)) * (1.0 - alpha);
    let log_pref = (alpha / (1.0 - alpha)) * libm::log(theta) - libm::log(PI * (1.0 - alpha));
    // the integral is at most ~ exp(−c A(0)) / (c A(0)) for large c
    if c * a0 - log_pref > 760.0 {
        return Ok(0.0);
    }
    let width = (1.0 / libm::sqrt(c * a0)).min(PI / 8.0);
    let mut cuts = alloc::vec![0.0];
    for k in [1.0, 3.0, 8.0] {
        if k * width < PI {
            cuts.push(k * width);
        }
    }
    cuts.push(PI);
    // Integrand is evaluated as exp(ln A − cA − ln) relative to its minimum
    // exponent so that very large θ does not underflow before the prefactor.
    let shift = c * a0;
    let est = integrate(
        |phi| {
            let a = kanter(alpha, phi);
            if !a.is_finite() || a <= 0.0 {
                return 0.0;
            }
            libm::exp(libm::log(a) - c * a + shift)
        },
        &cuts,
        Tolerance::new(1e-300, 1e-12),
    )?;
    Ok(est.value * libm::exp(log_pref - shift))
}

/// ∫₀^∞ α θ M_α(θ) e^{−zθ} dθ, the Wright-subordination form of E_{α,α}(−z).
pub fn ml_via_wright_quadrature(alpha: f64, z: f64) -> Result<f64> {
    if !(alpha > 0.5 && alpha < 1.0) {
        return Err(Error::InvalidParameter { what: "alpha", reason: "must lie in (1/2, 1)" });
    }
    if !(z >= 0.0) || !z.is_finite() {
        return Err(Error::Domain { what: "ml_via_wright_quadrature z", value: z });
    }
    // M_α(θ) ≤ C exp(−A(0) θ^{1/(1−α)}); truncate where the exponent reaches 60.
    let a0 = libm::pow(alpha, alpha / (1.0 - alpha)) * (1.0 - alpha);
    let theta_max = libm::pow(60.0 / a0, 1.0 - alpha);
    let failure: Cell<Option<Error>> = Cell::new(None);
    let integrand = |theta: f64| match mainardi_wright(alpha, theta) {
        Ok(m) => alpha * theta * m * libm::exp(-z * theta),
        Err(e) => {
            failure.set(Some(e));
            0.0
        }
    };
    let mut cuts = alloc::vec![0.0];
    if z > 0.0 {
        for k in [1.0, 4.0, 16.0] {
            if k / z < theta_max {
                cuts.push(k / z);
            }
        }
    }
    for frac in [0.25, 0.5] {
        let c = frac * theta_max;
        if c > *cuts.last().unwrap() {
            cuts.push(c);
        }
    }
    cuts.push(theta_max);
    let est = integrate(integrand, &cuts, Tolerance::new(1e-15, 1e-11)).map_err(|e| match e {
        Error::Quadrature { estimate, error, .. } => {
            Error::Quadrature { what: "ml_via_wright_quadrature", estimate, error }
        }
        other => other,
    })?;
    if let Some(e) = failure.take() {
        return Err(e);
    }
    Ok(est.value)
}
