//! The ψ-clock: increasing time changes ψ, the ψ-fractional integral
//! I^{α;ψ}_{a+}, the (n = 1) ψ-Hilfer derivative and the kernel L² gate.

use alloc::sync::Arc;
use alloc::vec::Vec;
use core::cell::Cell;
use core::fmt;

use crate::error::{Error, Result};
use crate::quad::{integrate, integrate_vec, Tolerance};
use crate::specfn::gamma_fn;

/// Number of nodes in the monotonicity certificate of a user-supplied ψ.
pub const CERTIFICATE_NODES: usize = 1000;

type ScalarFn = Arc<dyn Fn(f64) -> f64 + Send + Sync>;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum PsiKind {
    /// ψ(t) = c·t, params `[c]` (default c = 1).
    Linear,
    /// ψ(t) = t^p, params `[p]`; needs a ≥ 0.
    Power,
    /// ψ(t) = e^{c t}, params `[c]` (default c = 1).
    Exponential,
    /// ψ(t) = ln(t + d), params `[d]` (default d = 0); needs a + d > 0.
    Logarithmic,
    Custom,
}

impl PsiKind {
    pub fn name(self) -> &'static str {
        match self {
            PsiKind::Linear => "linear",
            PsiKind::Power => "power",
            PsiKind::Exponential => "exponential",
            PsiKind::Logarithmic => "logarithmic",
            PsiKind::Custom => "custom",
        }
    }
}

/// A strictly increasing C¹ clock on [a, b].
///
/// ψ′ may vanish at the left endpoint only (e.g. ψ(t) = t² with a = 0); it is
/// strictly positive on (a, b].
#[derive(Clone)]
pub struct PsiFunction {
    kind: PsiKind,
    params: Vec<f64>,
    a: f64,
    b: f64,
    custom: Option<(ScalarFn, ScalarFn)>,
}

impl fmt::Debug for PsiFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("PsiFunction")
            .field("kind", &self.kind)
            .field("params", &self.params)
            .field("a", &self.a)
            .field("b", &self.b)
            .finish()
    }
}

impl PsiFunction {
    pub fn new(kind: PsiKind, params: &[f64], a: f64, b: f64) -> Result<Self> {
        if !(a.is_finite() && b.is_finite() && b > a) {
            return Err(Error::InvalidParameter { what: "psi interval", reason: "need finite a < b" });
        }
        let param = |default: f64| params.first().copied().unwrap_or(default);
        let params = match kind {
            PsiKind::Linear | PsiKind::Exponential => {
                let c = param(1.0);
                if !(c > 0.0 && c.is_finite()) {
                    return Err(Error::InvalidParameter { what: "psi rate", reason: "must be positive" });
                }
                alloc::vec![c]
            }
            PsiKind::Power => {
                let p = param(2.0);
                if !(p > 0.0 && p.is_finite()) {
                    return Err(Error::InvalidParameter { what: "psi exponent", reason: "must be positive" });
                }
                if a < 0.0 {
                    return Err(Error::InvalidParameter { what: "power psi", reason: "needs a >= 0" });
                }
                if a == 0.0 && p < 1.0 {
                    return Err(Error::InvalidParameter {
                        what: "power psi",
                        reason: "exponent below 1 has unbounded derivative at a = 0",
                    });
                }
                alloc::vec![p]
            }
            PsiKind::Logarithmic => {
                let d = param(0.0);
                if !(a + d > 0.0) {
                    return Err(Error::InvalidParameter {
                        what: "logarithmic psi",
                        reason: "ln(t + d) is undefined unless a + d > 0",
                    });
                }
                alloc::vec![d]
            }
            PsiKind::Custom => {
                return Err(Error::InvalidParameter {
                    what: "custom psi",
                    reason: "construct with PsiFunction::custom",
                })
            }
        };
        Ok(PsiFunction { kind, params, a, b, custom: None })
    }

    pub fn linear(a: f64, b: f64) -> Result<Self> {
        Self::new(PsiKind::Linear, &[1.0], a, b)
    }

    /// User-supplied ψ and ψ′, accepted after ψ′ > 0 and ψ increasing are
    /// certified on [`CERTIFICATE_NODES`] equispaced samples.
    pub fn custom<F, D>(value: F, derivative: D, a: f64, b: f64) -> Result<Self>
    where
        F: Fn(f64) -> f64 + Send + Sync + 'static,
        D: Fn(f64) -> f64 + Send + Sync + 'static,
    {
        if !(a.is_finite() && b.is_finite() && b > a) {
            return Err(Error::InvalidParameter { what: "psi interval", reason: "need finite a < b" });
        }
        let mut prev = f64::NEG_INFINITY;
        for i in 0..CERTIFICATE_NODES {
            let t = a + (b - a) * i as f64 / (CERTIFICATE_NODES - 1) as f64;
            let (v, d) = (value(t), derivative(t));
            if !(d > 0.0) || !v.is_finite() || !d.is_finite() {
                return Err(Error::InvalidParameter {
                    what: "custom psi",
                    reason: "derivative must be positive and finite on every certificate node",
                });
            }
            if !(v > prev) {
                return Err(Error::InvalidParameter { what: "custom psi", reason: "not strictly increasing" });
            }
            prev = v;
        }
        Ok(PsiFunction {
            kind: PsiKind::Custom,
            params: Vec::new(),
            a,
            b,
            custom: Some((Arc::new(value), Arc::new(derivative))),
        })
    }

    pub fn kind(&self) -> PsiKind {
        self.kind
    }

    pub fn params(&self) -> &[f64] {
        &self.params
    }

    pub fn a(&self) -> f64 {
        self.a
    }

    pub fn b(&self) -> f64 {
        self.b
    }

    /// ψ(t) without the interval check.
    pub fn value(&self, t: f64) -> f64 {
        let c = self.params.first().copied().unwrap_or(0.0);
        match self.kind {
            PsiKind::Linear => c * t,
            PsiKind::Power => libm::pow(t, c),
            PsiKind::Exponential => libm::exp(c * t),
            PsiKind::Logarithmic => libm::log(t + c),
            PsiKind::Custom => (self.custom.as_ref().unwrap().0)(t),
        }
    }

    /// ψ′(t) without the interval check.
    pub fn derivative(&self, t: f64) -> f64 {
        let c = self.params.first().copied().unwrap_or(0.0);
        match self.kind {
            PsiKind::Linear => c,
            PsiKind::Power => {
                if c == 1.0 {
                    1.0
                } else {
                    c * libm::pow(t, c - 1.0)
                }
            }
            PsiKind::Exponential => c * libm::exp(c * t),
            PsiKind::Logarithmic => 1.0 / (t + c),
            PsiKind::Custom => (self.custom.as_ref().unwrap().1)(t),
        }
    }

    /// Ψ(t, s) = ψ(t) − ψ(s).
    pub fn delta(&self, t: f64, s: f64) -> f64 {
        let c = self.params.first().copied().unwrap_or(0.0);
        match self.kind {
            PsiKind::Linear => c * (t - s),
            PsiKind::Exponential => libm::exp(c * s) * libm::expm1(c * (t - s)),
            PsiKind::Logarithmic => libm::log1p((t - s) / (s + c)),
            PsiKind::Power if s > 0.0 => libm::pow(s, c) * libm::expm1(c * libm::log1p((t - s) / s)),
            _ => self.value(t) - self.value(s),
        }
    }

    /// Ψ(b, a).
    pub fn span(&self) -> f64 {
        self.delta(self.b, self.a)
    }

    /// sup of ψ′ over [a, b].
    pub fn derivative_bound(&self) -> f64 {
        let c = self.params.first().copied().unwrap_or(0.0);
        match self.kind {
            PsiKind::Linear => c,
            PsiKind::Power if c >= 1.0 => self.derivative(self.b),
            PsiKind::Power => self.derivative(self.a),
            PsiKind::Exponential => self.derivative(self.b),
            PsiKind::Logarithmic => self.derivative(self.a),
            PsiKind::Custom => (0..CERTIFICATE_NODES)
                .map(|i| self.derivative(self.a + (self.b - self.a) * i as f64 / (CERTIFICATE_NODES - 1) as f64))
                .fold(0.0, f64::max),
        }
    }

    /// ψ⁻¹(τ), clamped to [a, b].
    pub fn inverse(&self, tau: f64) -> f64 {
        let c = self.params.first().copied().unwrap_or(0.0);
        let t = match self.kind {
            PsiKind::Linear => tau / c,
            PsiKind::Power => libm::pow(tau.max(0.0), 1.0 / c),
            PsiKind::Exponential => libm::log(tau) / c,
            PsiKind::Logarithmic => libm::exp(tau) - c,
            PsiKind::Custom => self.numeric_inverse(tau),
        };
        t.clamp(self.a, self.b)
    }

    /// The point s with Ψ(s, a) = u, accurate for small u.
    pub fn from_left(&self, u: f64) -> f64 {
        let c = self.params.first().copied().unwrap_or(0.0);
        let t = match self.kind {
            PsiKind::Linear => self.a + u / c,
            PsiKind::Logarithmic => self.a + (self.a + c) * libm::expm1(u),
            PsiKind::Exponential => self.a + libm::log1p(u / self.value(self.a)) / c,
            _ => self.inverse(self.value(self.a) + u),
        };
        t.clamp(self.a, self.b)
    }

    /// The point s with Ψ(t, s) = v, accurate for small v.
    pub fn back_from(&self, t: f64, v: f64) -> f64 {
        let c = self.params.first().copied().unwrap_or(0.0);
        let s = match self.kind {
            PsiKind::Linear => t - v / c,
            PsiKind::Logarithmic => t - (t + c) * (-libm::expm1(-v)),
            PsiKind::Exponential => t + libm::log1p(-v / self.value(t)) / c,
            _ => self.inverse(self.value(t) - v),
        };
        s.clamp(self.a, self.b)
    }

    fn numeric_inverse(&self, tau: f64) -> f64 {
        let (mut lo, mut hi) = (self.a, self.b);
        if tau <= self.value(lo) {
            return lo;
        }
        if tau >= self.value(hi) {
            return hi;
        }
        let mut x = 0.5 * (lo + hi);
        for _ in 0..200 {
            let fx = self.value(x) - tau;
            if fx > 0.0 {
                hi = x;
            } else {
                lo = x;
            }
            let d = self.derivative(x);
            let newton = x - fx / d;
            if fx == 0.0 || (d > 0.0 && (newton - x).abs() <= 2.0 * f64::EPSILON * x.abs().max(1e-300)) {
                return newton.clamp(lo, hi);
            }
            x = if d > 0.0 && newton >= lo && newton <= hi { newton } else { 0.5 * (lo + hi) };
            if hi - lo <= 4.0 * f64::EPSILON * hi.abs().max(1.0) {
                break;
            }
        }
        x
    }

    fn check(&self, t: f64) -> Result<()> {
        let slack = 1e-12 * (self.b - self.a);
        if t >= self.a - slack && t <= self.b + slack {
            Ok(())
        } else {
            Err(Error::Domain { what: "psi argument outside [a, b]", value: t })
        }
    }
}

/// (ψ(t), ψ′(t)) with the interval check.
pub fn psi_eval(psi: &PsiFunction, t: f64) -> Result<(f64, f64)> {
    psi.check(t)?;
    Ok((psi.value(t), psi.derivative(t)))
}

/// Fractional order (α, β) with γ = α + β(1 − α), gated to 1/2 < α ≤ 1.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct FracOrder {
    alpha: f64,
    beta: f64,
    gamma: f64,
}

impl FracOrder {
    pub fn new(alpha: f64, beta: f64) -> Result<Self> {
        if !(alpha > 0.5) {
            return Err(Error::OrderGate { alpha });
        }
        if !(alpha <= 1.0) {
            return Err(Error::InvalidParameter { what: "alpha", reason: "must not exceed 1" });
        }
        if !(0.0..=1.0).contains(&beta) {
            return Err(Error::InvalidParameter { what: "beta", reason: "must lie in [0, 1]" });
        }
        Ok(FracOrder { alpha, beta, gamma: alpha + beta * (1.0 - alpha) })
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn beta(&self) -> f64 {
        self.beta
    }

    pub fn gamma(&self) -> f64 {
        self.gamma
    }
}

pub(crate) fn default_tolerance() -> Tolerance {
    Tolerance::new(1e-15, 1e-12).with_max_subdivisions(3000)
}

/// ∫_a^t ψ′(s) Ψ(t,s)^{order−1} g(s) ds.
///
/// The range is split at the ψ-midpoint. Near s = t the substitution
/// v = Ψ(t,s)^{order} absorbs the kernel exactly, and v = V w^{grading}
/// additionally flattens an integrable singularity of g at s = t. Near s = a
/// the variable u = Ψ(s,a) = (P/2) w² puts any singularity of g at zero.
pub(crate) fn singular_integral<G: FnMut(f64) -> f64>(
    psi: &PsiFunction,
    order: f64,
    t: f64,
    grading: f64,
    mut g: G,
    tol: Tolerance,
) -> Result<f64> {
    let p = psi.delta(t, psi.a());
    if p <= 0.0 {
        return Ok(0.0);
    }
    let half = 0.5 * p;
    let v_max = libm::pow(half, order);
    let q = grading.max(1.0);
    let upper = integrate(
        |w| {
            let v = v_max * libm::pow(w, q);
            let jac = v_max * q * libm::pow(w, q - 1.0);
            let s = psi.back_from(t, libm::pow(v, 1.0 / order));
            jac * g(s) / order
        },
        &[0.0, 1.0],
        tol,
    )?;
    let lower = integrate(
        |w| {
            let u = half * w * w;
            let s = psi.from_left(u);
            p * w * libm::pow(p - u, order - 1.0) * g(s)
        },
        &[0.0, 1.0],
        tol,
    )?;
    Ok(upper.value + lower.value)
}

/// Vector-valued [`singular_integral`]; `kernel(v, s, out)` receives the
/// absorbed-kernel variable v = Ψ(t,s)^{order} (upper piece) or the exact
/// Ψ(t,s)^{order} value (lower piece) together with s, and must fill `out`
/// with the integrand stripped of ψ′(s)Ψ(t,s)^{order−1}.
pub(crate) fn singular_integral_vec<K: FnMut(f64, f64, &mut [f64])>(
    psi: &PsiFunction,
    order: f64,
    t: f64,
    grading: f64,
    dim: usize,
    mut kernel: K,
    tol: Tolerance,
) -> Result<Vec<f64>> {
    let p = psi.delta(t, psi.a());
    if p <= 0.0 {
        return Ok(alloc::vec![0.0; dim]);
    }
    let half = 0.5 * p;
    let v_max = libm::pow(half, order);
    let q = grading.max(1.0);
    let (upper, _) = integrate_vec(
        |w, out| {
            let v = v_max * libm::pow(w, q);
            let jac = v_max * q * libm::pow(w, q - 1.0) / order;
            let s = psi.back_from(t, libm::pow(v, 1.0 / order));
            kernel(v, s, out);
            out.iter_mut().for_each(|x| *x *= jac);
        },
        dim,
        &[0.0, 1.0],
        tol,
    )?;
    let (lower, _) = integrate_vec(
        |w, out| {
            let u = half * w * w;
            let s = psi.from_left(u);
            let elapsed = p - u;
            kernel(libm::pow(elapsed, order), s, out);
            let jac = p * w * libm::pow(elapsed, order - 1.0);
            out.iter_mut().for_each(|x| *x *= jac);
        },
        dim,
        &[0.0, 1.0],
        tol,
    )?;
    Ok(upper.iter().zip(&lower).map(|(u, l)| u + l).collect())
}

/// I^{α;ψ}_{a+} f (t) = (1/Γ(α)) ∫_a^t ψ′(s) Ψ(t,s)^{α−1} f(s) ds.
pub fn psi_frac_integral<F: Fn(f64) -> f64>(psi: &PsiFunction, alpha: f64, f: F, t: f64) -> Result<f64> {
    psi_frac_integral_with(psi, alpha, f, t, default_tolerance())
}

pub fn psi_frac_integral_with<F: Fn(f64) -> f64>(
    psi: &PsiFunction,
    alpha: f64,
    f: F,
    t: f64,
    tol: Tolerance,
) -> Result<f64> {
    psi.check(t)?;
    if !(alpha >= 0.0) {
        return Err(Error::InvalidParameter { what: "integration order", reason: "must be nonnegative" });
    }
    if alpha == 0.0 {
        return Ok(f(t));
    }
    let value = singular_integral(psi, alpha, t, 1.0, &f, tol).map_err(|e| match e {
        Error::Quadrature { estimate, error, .. } => Error::Quadrature { what: "psi_frac_integral", estimate, error },
        other => other,
    })?;
    Ok(value / gamma_fn(alpha)?)
}

/// n = 1 ψ-Hilfer derivative
/// I^{β(1−α);ψ} ( (1/ψ′) d/dt ) I^{(1−β)(1−α);ψ} f, with the inner derivative
/// taken as a central difference in the ψ variable (one-sided next to a or b).
pub fn psi_hilfer_derivative<F: Fn(f64) -> f64>(psi: &PsiFunction, order: FracOrder, f: F, t: f64) -> Result<f64> {
    psi.check(t)?;
    if !(t > psi.a()) {
        return Err(Error::Domain { what: "psi_hilfer_derivative needs t > a", value: t });
    }
    let (alpha, beta) = (order.alpha(), order.beta());
    let inner_order = (1.0 - beta) * (1.0 - alpha);
    let outer_order = beta * (1.0 - alpha);
    let tau_lo = psi.value(psi.a());
    let tau_hi = psi.value(psi.b());
    let step = libm::cbrt(f64::EPSILON) * (tau_hi - tau_lo).abs().max(1.0);
    let failure: Cell<Option<Error>> = Cell::new(None);

    let inner_tol = Tolerance::new(1e-15, 1e-13).with_max_subdivisions(3000);
    let inner = |s: f64| -> f64 {
        match psi_frac_integral_with(psi, inner_order, &f, s, inner_tol) {
            Ok(v) => v,
            Err(e) => {
                failure.set(Some(e));
                f64::NAN
            }
        }
    };
    let derivative = |s: f64| -> f64 {
        let tau = psi.value(s);
        if step <= 8.0 * f64::EPSILON * tau.abs().max(1.0) {
            failure.set(Some(Error::StepUnderflow { step }));
            return f64::NAN;
        }
        let at = |x: f64| inner(psi.inverse(x));
        if tau - step >= tau_lo && tau + step <= tau_hi {
            (at(tau + step) - at(tau - step)) / (2.0 * step)
        } else if tau + 2.0 * step <= tau_hi {
            (-3.0 * inner(s) + 4.0 * at(tau + step) - at(tau + 2.0 * step)) / (2.0 * step)
        } else if tau - 2.0 * step >= tau_lo {
            (3.0 * inner(s) - 4.0 * at(tau - step) + at(tau - 2.0 * step)) / (2.0 * step)
        } else {
            failure.set(Some(Error::StepUnderflow { step }));
            f64::NAN
        }
    };
    let value = if outer_order == 0.0 {
        derivative(t)
    } else {
        let outer_tol = Tolerance::new(1e-9, 1e-9).with_max_subdivisions(3000);
        psi_frac_integral_with(psi, outer_order, &derivative, t, outer_tol)
            .map_err(|e| failure.take().unwrap_or(e))?
    };
    if let Some(e) = failure.take() {
        return Err(e);
    }
    Ok(value)
}

/// ( ∫_a^t [ψ′(s) Ψ(t,s)^{α−1}]² ds )^{1/2}, finite only for α > 1/2.
///
/// With w = Ψ(t,s)^{2α−1} the integral becomes (1/(2α−1)) ∫₀^{Ψ(t,a)^{2α−1}} ψ′(s(w)) dw.
pub fn kernel_l2_norm(psi: &PsiFunction, alpha: f64, t: f64) -> Result<f64> {
    if !(alpha > 0.5) {
        return Err(Error::OrderGate { alpha });
    }
    psi.check(t)?;
    let e = 2.0 * alpha - 1.0;
    let w_max = libm::pow(psi.delta(t, psi.a()), e);
    let est = integrate(
        |w| psi.derivative(psi.back_from(t, libm::pow(w, 1.0 / e))),
        &[0.0, w_max],
        default_tolerance(),
    )?;
    Ok(libm::sqrt(est.value / e))
}

/// Samples (Ψ(t,a))^{1−γ} I^{α;ψ} m (t) on t_k = a + (b − a)·10^{−k},
/// k = 1..=levels; the weighted limit condition on a dominating function m
/// asks these to tend to zero.
pub fn weighted_limit_samples<M: Fn(f64) -> f64>(
    psi: &PsiFunction,
    order: FracOrder,
    m: M,
    levels: usize,
) -> Result<Vec<(f64, f64)>> {
    let mut out = Vec::with_capacity(levels);
    for k in 1..=levels {
        let t = psi.a() + (psi.b() - psi.a()) * libm::pow(10.0, -(k as f64));
        let weight = libm::pow(psi.delta(t, psi.a()), 1.0 - order.gamma());
        out.push((t, weight * psi_frac_integral(psi, order.alpha(), &m, t)?));
    }
    Ok(out)
}

/// True when the sampled weighted values decrease toward zero.
pub fn weighted_limit_vanishes(samples: &[(f64, f64)]) -> bool {
    let first = samples.first().map(|s| s.1.abs()).unwrap_or(0.0);
    let last = samples.last().map(|s| s.1.abs()).unwrap_or(0.0);
    samples.windows(2).all(|w| w[1].1.abs() <= w[0].1.abs() * (1.0 + 1e-9)) && last <= 0.1 * first.max(1e-300)
}
