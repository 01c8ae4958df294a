//! Linear controllability: Gramian, target defect, the ε-regularized control,
//! the endpoint-miss identity, the witness control ρ and the quadratic-cost
//! optimal control.
//!
//! The state space is Hilbert, so the duality map J is the identity and every
//! resolvent (εI + R(b)J)⁻¹ is a per-mode division by ε + r_n.

use alloc::vec;
use alloc::vec::Vec;
use core::cell::Cell;

use crate::error::{Error, Result};
use crate::quad::{integrate, integrate_vec, Tolerance};
use crate::spectral::{
    forced_response, mild_solution, mild_state_at, EvolutionProblem, Forcing, Kernel, SpectralState, Trajectory,
    DEFAULT_GRID,
};
use crate::specfn::{gamma_fn, ml_derivative_raw};

/// How d/dt P_α(ψ(T) − ψ(t)) is read in the witness control ρ.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SignConvention {
    /// Derivative of τ ↦ P_α(τ) evaluated at τ = Ψ(T,t).
    Argument,
    /// Total t-derivative, carrying the factor dΨ(T,t)/dt = −ψ′(t).
    ChainRule,
}

impl SignConvention {
    pub fn name(self) -> &'static str {
        match self {
            SignConvention::Argument => "argument",
            SignConvention::ChainRule => "chain-rule",
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum ControlLaw {
    Zero,
    /// The stored grid values, interpolated linearly in the ψ-clock.
    Sampled,
    /// u_n(t) = ψ′(t)Ψ(b,t)^{α−1} B_n E_{α,α}(−λ_nΨ(b,t)^α) c_n.
    Resolvent { coeffs: Vec<f64> },
    /// The witness control on [a, T]; zero beyond T.
    Rho { xi: Vec<f64>, horizon: f64, convention: SignConvention },
    Sum(Vec<(f64, ControlFunction)>),
}

/// A control u ∈ L²([a,b], Y) with its values on a grid.
///
/// Controls built from the resolvent law are singular at t = b when α < 1;
/// the value stored for that node is the one at the midpoint of the last cell.
#[derive(Clone, Debug, PartialEq)]
pub struct ControlFunction {
    grid: Vec<f64>,
    values: Vec<SpectralState>,
    energy: f64,
    law: ControlLaw,
}

impl ControlFunction {
    pub fn zero(grid: &[f64], n_modes: usize) -> Self {
        ControlFunction {
            grid: grid.to_vec(),
            values: vec![SpectralState::zeros(n_modes); grid.len()],
            energy: 0.0,
            law: ControlLaw::Zero,
        }
    }

    /// A control given by its grid values; energy by the trapezoid rule.
    pub fn sampled(grid: Vec<f64>, values: Vec<SpectralState>) -> Result<Self> {
        if grid.len() != values.len() || grid.len() < 2 {
            return Err(Error::GridMismatch);
        }
        let n = values[0].len();
        if values.iter().any(|v| v.len() != n) {
            return Err(Error::GridMismatch);
        }
        let energy = grid
            .windows(2)
            .zip(values.windows(2))
            .map(|(t, v)| 0.5 * (t[1] - t[0]) * (v[0].dot(&v[0]) + v[1].dot(&v[1])))
            .sum();
        Ok(ControlFunction { grid, values, energy, law: ControlLaw::Sampled })
    }

    /// Σ wᵢuᵢ over controls sharing a grid; energy by quadrature.
    pub fn combine(problem: &EvolutionProblem, parts: &[(f64, &ControlFunction)]) -> Result<Self> {
        let first = parts.first().ok_or(Error::InvalidParameter { what: "combine", reason: "no parts" })?.1;
        if parts.iter().any(|(_, c)| c.grid != first.grid) {
            return Err(Error::GridMismatch);
        }
        let values = (0..first.grid.len())
            .map(|i| {
                let mut acc = SpectralState::zeros(first.n_modes());
                for (w, c) in parts {
                    acc = acc.add(&c.values[i].scaled(*w));
                }
                acc
            })
            .collect();
        let mut out = ControlFunction {
            grid: first.grid.clone(),
            values,
            energy: 0.0,
            law: ControlLaw::Sum(parts.iter().map(|(w, c)| (*w, (*c).clone())).collect()),
        };
        out.energy = quadrature_energy(problem, &out)?;
        Ok(out)
    }

    pub fn grid(&self) -> &[f64] {
        &self.grid
    }

    pub fn values(&self) -> &[SpectralState] {
        &self.values
    }

    pub fn n_modes(&self) -> usize {
        self.values.first().map(|v| v.len()).unwrap_or(0)
    }

    /// ∫_a^b ‖u(t)‖² dt.
    pub fn energy(&self) -> f64 {
        self.energy
    }

    pub fn law(&self) -> &ControlLaw {
        &self.law
    }

    pub(crate) fn for_each_sampled(
        &self,
        f: &mut dyn FnMut(f64, &[f64], &[SpectralState]) -> Result<()>,
    ) -> Result<()> {
        self.visit_sampled(1.0, f)
    }

    fn visit_sampled(&self, weight: f64, f: &mut dyn FnMut(f64, &[f64], &[SpectralState]) -> Result<()>) -> Result<()> {
        match &self.law {
            ControlLaw::Sampled => f(weight, &self.grid, &self.values),
            ControlLaw::Sum(parts) => {
                for (w, c) in parts {
                    c.visit_sampled(weight * w, f)?;
                }
                Ok(())
            }
            _ => Ok(()),
        }
    }

    pub(crate) fn has_law(&self) -> bool {
        match &self.law {
            ControlLaw::Resolvent { .. } | ControlLaw::Rho { .. } => true,
            ControlLaw::Sum(parts) => parts.iter().any(|(_, c)| c.has_law()),
            _ => false,
        }
    }

    fn is_singular_law(&self) -> bool {
        match &self.law {
            ControlLaw::Resolvent { .. } => true,
            ControlLaw::Sum(parts) => parts.iter().any(|(_, c)| c.is_singular_law()),
            _ => false,
        }
    }

    /// Grading exponent that flattens a Ψ(b,s)^{α−1} factor against the
    /// Ψ(t,s)^{α−1} kernel in the singular quadrature.
    pub(crate) fn grading(&self, alpha: f64) -> f64 {
        if self.is_singular_law() && alpha < 1.0 {
            (alpha / (2.0 * alpha - 1.0)).min(60.0)
        } else {
            1.0
        }
    }

    /// Law-defined part of u(s), with s = back_from(t, elapsed) and the
    /// exact elapsed clock Ψ(t, s).
    pub(crate) fn eval_law(
        &self,
        problem: &EvolutionProblem,
        s: f64,
        t: f64,
        elapsed: f64,
        out: &mut [f64],
    ) -> Result<()> {
        out.iter_mut().for_each(|o| *o = 0.0);
        self.accumulate_law(problem, 1.0, s, t, elapsed, out)
    }

    fn accumulate_law(
        &self,
        problem: &EvolutionProblem,
        weight: f64,
        s: f64,
        t: f64,
        elapsed: f64,
        out: &mut [f64],
    ) -> Result<()> {
        let psi = problem.psi();
        let alpha = problem.alpha();
        match &self.law {
            ControlLaw::Resolvent { coeffs } => {
                let tau = psi.delta(psi.b(), t) + elapsed;
                let dpsi = psi.derivative(s);
                let ta = libm::pow(tau, alpha);
                let pre = weight * dpsi * libm::pow(tau, alpha - 1.0);
                for (((o, &l), &g), &c) in out.iter_mut().zip(problem.rates()).zip(problem.gain()).zip(coeffs) {
                    if c != 0.0 && g != 0.0 {
                        *o += pre * g * problem.kernel(Kernel::P, l * ta)? * c;
                    }
                }
            }
            ControlLaw::Rho { xi, horizon, convention } => {
                let tau = psi.delta(*horizon, t) + elapsed;
                if tau < 0.0 {
                    return Ok(());
                }
                let scale = weight * gamma_fn(alpha)? * gamma_fn(alpha)? / psi.delta(*horizon, psi.a());
                let since = psi.delta(s, psi.a());
                let sign = match convention {
                    SignConvention::Argument => 1.0,
                    SignConvention::ChainRule => -psi.derivative(s),
                };
                for ((o, &l), &x) in out.iter_mut().zip(problem.rates()).zip(xi) {
                    if x != 0.0 {
                        let (p_part, d_part) = rho_parts(problem, l, tau)?;
                        *o += scale * (p_part + 2.0 * since * sign * d_part) * x;
                    }
                }
            }
            ControlLaw::Sum(parts) => {
                for (w, c) in parts {
                    c.accumulate_law(problem, weight * w, s, t, elapsed, out)?;
                }
            }
            ControlLaw::Zero | ControlLaw::Sampled => {}
        }
        Ok(())
    }

    fn accumulate_sampled(&self, problem: &EvolutionProblem, weight: f64, s: f64, out: &mut [f64]) {
        match &self.law {
            ControlLaw::Sampled => {
                let psi = problem.psi();
                let g = &self.grid;
                let j = match g.iter().position(|&x| x > s) {
                    Some(0) => 0,
                    Some(j) => j - 1,
                    None => g.len() - 2,
                };
                let (t0, t1) = (psi.value(g[j]), psi.value(g[j + 1]));
                let theta = ((psi.value(s) - t0) / (t1 - t0)).clamp(0.0, 1.0);
                for ((o, a), b) in out.iter_mut().zip(self.values[j].coeffs()).zip(self.values[j + 1].coeffs()) {
                    *o += weight * (a + theta * (b - a));
                }
            }
            ControlLaw::Sum(parts) => {
                for (w, c) in parts {
                    c.accumulate_sampled(problem, weight * w, s, out);
                }
            }
            _ => {}
        }
    }

    /// u(s), with the clock distance to the reference time t supplied exactly.
    pub(crate) fn eval_at(&self, problem: &EvolutionProblem, s: f64, t: f64, elapsed: f64, out: &mut [f64]) -> Result<()> {
        self.eval_law(problem, s, t, elapsed, out)?;
        self.accumulate_sampled(problem, 1.0, s, out);
        Ok(())
    }

    /// u(s).
    pub fn eval(&self, problem: &EvolutionProblem, s: f64) -> Result<SpectralState> {
        let mut out = vec![0.0; self.n_modes()];
        self.eval_at(problem, s, s, 0.0, &mut out)?;
        SpectralState::new(out)
    }

    /// Coefficients c of a resolvent-law control.
    pub fn resolvent_coeffs(&self) -> Option<&[f64]> {
        match &self.law {
            ControlLaw::Resolvent { coeffs } => Some(coeffs),
            _ => None,
        }
    }

    fn from_law(problem: &EvolutionProblem, grid: &[f64], law: ControlLaw, energy: f64) -> Result<Self> {
        let mut c = ControlFunction { grid: grid.to_vec(), values: Vec::new(), energy, law };
        let n = problem.n_modes();
        let mut values = Vec::with_capacity(grid.len());
        for (i, &t) in grid.iter().enumerate() {
            let mut out = vec![0.0; n];
            c.eval_at(problem, t, t, 0.0, &mut out)?;
            if out.iter().any(|x| !x.is_finite()) && i > 0 {
                let mid = 0.5 * (grid[i - 1] + t);
                c.eval_at(problem, mid, mid, 0.0, &mut out)?;
            }
            values.push(SpectralState::new(out)?);
        }
        c.values = values;
        Ok(c)
    }
}

/// (τ^{1−α}E_{α,α}(−λτ^α), −τ^{1−α} d/dτ E_{α,α}(−λτ^α)), the latter written as
/// λα E′_{α,α}(−λτ^α) so that no cancellation occurs as τ → 0.
fn rho_parts(problem: &EvolutionProblem, l: f64, tau: f64) -> Result<(f64, f64)> {
    let alpha = problem.alpha();
    let z = l * libm::pow(tau, alpha);
    let p = problem.kernel(Kernel::P, z)?;
    let dp = if z <= 1.0 {
        ml_derivative_raw(alpha, alpha, -z)?
    } else {
        (problem.kernel(Kernel::Dp, z)? - (alpha - 1.0) * p) / (alpha * -z)
    };
    Ok((libm::pow(tau, 1.0 - alpha) * p, l * alpha * dp))
}

/// ∫_a^b ‖u‖² dt in the clock variable ρ = Ψ(b,s) graded toward s = b.
pub fn quadrature_energy(problem: &EvolutionProblem, control: &ControlFunction) -> Result<f64> {
    let psi = problem.psi();
    let alpha = problem.alpha();
    let span = psi.span();
    let q = if alpha < 1.0 { (1.0 / (2.0 * alpha - 1.0)).min(60.0) } else { 1.0 };
    let n = problem.n_modes();
    let failure: Cell<Option<Error>> = Cell::new(None);
    let mut buf = vec![0.0; n];
    let est = integrate(
        |y| {
            let rho = span * libm::pow(y, q);
            let jac = span * q * libm::pow(y, q - 1.0);
            let s = psi.back_from(psi.b(), rho);
            let d = psi.derivative(s);
            if d <= 0.0 {
                return 0.0;
            }
            if let Err(e) = control.eval_at(problem, s, psi.b(), rho, &mut buf) {
                failure.set(Some(e));
                return 0.0;
            }
            jac * buf.iter().map(|u| u * u).sum::<f64>() / d
        },
        &[0.0, 0.25, 0.5, 0.75, 1.0],
        Tolerance::new(1e-15, 1e-11).with_max_subdivisions(6000),
    );
    if let Some(e) = failure.take() {
        return Err(e);
    }
    Ok(est?.value)
}

/// Diagonal of R(b) = ∫ {ψ′(s)Ψ(b,s)^{α−1}}² P_α BB* P_α* ds.
#[derive(Clone, Debug, PartialEq)]
pub struct GramianDiag {
    entries: Vec<f64>,
    horizon: f64,
}

impl GramianDiag {
    pub fn entries(&self) -> &[f64] {
        &self.entries
    }

    pub fn horizon(&self) -> f64 {
        self.horizon
    }
}

/// r_n = ∫_a^b ψ′(s)²Ψ(b,s)^{2α−2} B_n² E_{α,α}(−λ_nΨ(b,s)^α)² ds.
///
/// With w = Ψ(b,s)^{2α−1} this is (B_n²/(2α−1)) ∫₀^{Ψ(b,a)^{2α−1}} ψ′(s(w)) E_{α,α}(−λ_n w^{α/(2α−1)})² dw.
pub fn gramian(problem: &EvolutionProblem, quad_tol: f64) -> Result<GramianDiag> {
    let alpha = problem.alpha();
    if !(alpha > 0.5) {
        return Err(Error::OrderGate { alpha });
    }
    let psi = problem.psi();
    let e = 2.0 * alpha - 1.0;
    let w_max = libm::pow(psi.span(), e);
    let mut cuts = vec![0.0];
    for &l in problem.rates() {
        for k in [1.0, 8.0] {
            let w = libm::pow(k / l, e / alpha);
            if w < w_max {
                cuts.push(w);
            }
        }
    }
    cuts.push(w_max);
    cuts.sort_by(|a, b| a.partial_cmp(b).unwrap());
    cuts.dedup();
    let n = problem.n_modes();
    let failure: Cell<Option<Error>> = Cell::new(None);
    let (vals, _) = integrate_vec(
        |w, out| {
            let tau = libm::pow(w, 1.0 / e);
            let s = psi.back_from(psi.b(), tau);
            let d = psi.derivative(s);
            let ta = libm::pow(tau, alpha);
            for ((o, &l), &g) in out.iter_mut().zip(problem.rates()).zip(problem.gain()) {
                *o = if g == 0.0 {
                    0.0
                } else {
                    match problem.kernel(Kernel::P, l * ta) {
                        Ok(p) => d * p * p,
                        Err(err) => {
                            failure.set(Some(err));
                            0.0
                        }
                    }
                };
            }
        },
        n,
        &cuts,
        Tolerance::new(1e-300, quad_tol).with_max_subdivisions(8000),
    )?;
    if let Some(err) = failure.take() {
        return Err(err);
    }
    let entries = vals.iter().zip(problem.gain()).map(|(v, g)| g * g * v / e).collect();
    Ok(GramianDiag { entries, horizon: psi.b() })
}

/// N(f) = x₁ − S_{α,β}(Ψ(b,a))x₀ − ∫_a^b ψ′(s)K_α(Ψ(b,s))f(s)ds.
pub fn target_defect(problem: &EvolutionProblem, forcing: &Forcing<'_>, x1: &SpectralState) -> Result<SpectralState> {
    let psi = problem.psi();
    let b = psi.b();
    let free = problem.apply_s(psi.span(), problem.x0())?;
    let grid = [psi.a(), b];
    let forced = forced_response(problem, forcing, &ControlFunction::zero(&grid, problem.n_modes()), b, false)?;
    let coeffs = x1
        .coeffs()
        .iter()
        .zip(free.coeffs())
        .zip(&forced)
        .map(|((x, s), f)| x - s - f)
        .collect();
    SpectralState::new(coeffs)
}

/// u_ε(t) = ψ′(t)Ψ(b,t)^{α−1}B*P_α*(Ψ(b,t))(εI + R(b))⁻¹N on the default grid.
pub fn synthesize_control(
    problem: &EvolutionProblem,
    eps: f64,
    defect: &SpectralState,
    gram: &GramianDiag,
) -> Result<ControlFunction> {
    synthesize_control_on(problem, eps, defect, gram, &problem.graded_grid(DEFAULT_GRID))
}

pub fn synthesize_control_on(
    problem: &EvolutionProblem,
    eps: f64,
    defect: &SpectralState,
    gram: &GramianDiag,
    grid: &[f64],
) -> Result<ControlFunction> {
    if !(eps > 0.0) {
        return Err(Error::InvalidParameter { what: "eps", reason: "must be positive" });
    }
    resolvent_control(problem, eps, defect, gram, grid)
}

fn resolvent_control(
    problem: &EvolutionProblem,
    shift: f64,
    defect: &SpectralState,
    gram: &GramianDiag,
    grid: &[f64],
) -> Result<ControlFunction> {
    let coeffs: Vec<f64> = defect.coeffs().iter().zip(gram.entries()).map(|(d, r)| d / (shift + r)).collect();
    let energy = coeffs.iter().zip(gram.entries()).map(|(c, r)| r * c * c).sum();
    ControlFunction::from_law(problem, grid, ControlLaw::Resolvent { coeffs }, energy)
}

/// G_n(t_i) = ∫_a^{t_i} ψ′(s)Ψ(t_i,s)^{α−1}E_{α,α}(−λ_nΨ(t_i,s)^α) ψ′(s)Ψ(b,s)^{α−1}E_{α,α}(−λ_nΨ(b,s)^α) ds,
/// so that a resolvent-law control with coefficients c contributes c_n B_n² G_n(t_i)
/// to the state; `result[i][n]`, zero at the initial node.
pub fn resolvent_response(problem: &EvolutionProblem, grid: &[f64]) -> Result<Vec<Vec<f64>>> {
    let n = problem.n_modes();
    let unit = ControlFunction { grid: grid.to_vec(), values: Vec::new(), energy: 0.0, law: ControlLaw::Resolvent { coeffs: vec![1.0; n] } };
    let ones = EvolutionProblem::with_gain(problem.psi().clone(), problem.order(), problem.x0().clone(), vec![1.0; n])?;
    let ones = problem.share_kernels(ones);
    let mut out = Vec::with_capacity(grid.len());
    for (i, &t) in grid.iter().enumerate() {
        if i == 0 {
            out.push(vec![0.0; n]);
        } else {
            out.push(forced_response(&ones, &Forcing::Zero, &unit, t, false)?);
        }
    }
    Ok(out)
}

/// −ε(εI + R(b))⁻¹N, the exact endpoint miss of the linear problem.
pub fn endpoint_error_closed_form(eps: f64, defect: &SpectralState, gram: &GramianDiag) -> Result<SpectralState> {
    if !(eps > 0.0) {
        return Err(Error::InvalidParameter { what: "eps", reason: "must be positive" });
    }
    SpectralState::new(defect.coeffs().iter().zip(gram.entries()).map(|(d, r)| -eps * d / (eps + r)).collect())
}

/// Log-spaced ε schedule used by default sweeps.
pub const DEFAULT_EPS: [f64; 7] = [1.0, 0.3, 0.1, 0.03, 0.01, 0.003, 0.001];

/// One ε of a convergence sweep.
#[derive(Clone, Debug, PartialEq)]
pub struct SweepRow {
    pub eps: f64,
    /// ‖q_ε(b) − x₁‖ from the simulation.
    pub endpoint_miss: f64,
    /// ‖ε(εI + R(b))⁻¹N‖.
    pub closed_form_miss: f64,
    /// max_n |simulated − closed-form| endpoint error.
    pub mode_gap: f64,
    pub energy: f64,
    pub iterations: usize,
    pub converged: bool,
    pub residual: f64,
}

#[derive(Clone, Debug, PartialEq, Default)]
pub struct ConvergenceReport {
    pub rows: Vec<SweepRow>,
}

impl ConvergenceReport {
    pub fn closed_form_strictly_decreasing(&self) -> bool {
        self.rows.windows(2).all(|w| w[1].closed_form_miss < w[0].closed_form_miss)
    }

    pub fn energy_nondecreasing_as_eps_shrinks(&self) -> bool {
        self.rows.windows(2).all(|w| w[1].energy >= w[0].energy * (1.0 - 1e-12))
    }

    /// The smallest-ε converged row carries the smallest endpoint miss.
    pub fn smallest_eps_is_best(&self) -> bool {
        let conv: Vec<&SweepRow> = self.rows.iter().filter(|r| r.converged).collect();
        match conv.last() {
            Some(last) => conv.iter().all(|r| last.endpoint_miss <= r.endpoint_miss),
            None => false,
        }
    }
}

pub(crate) fn check_eps_list(eps_list: &[f64]) -> Result<()> {
    if eps_list.is_empty() || eps_list.iter().any(|e| !(*e > 0.0)) || eps_list.windows(2).any(|w| !(w[1] < w[0])) {
        return Err(Error::InvalidParameter { what: "eps list", reason: "must be positive and strictly decreasing" });
    }
    Ok(())
}

/// Simulated vs closed-form endpoint miss along an ε schedule (frozen f).
pub fn eps_sweep(
    problem: &EvolutionProblem,
    forcing: &Forcing<'_>,
    x1: &SpectralState,
    eps_list: &[f64],
) -> Result<ConvergenceReport> {
    check_eps_list(eps_list)?;
    let gram = gramian(problem, 1e-12)?;
    let defect = target_defect(problem, forcing, x1)?;
    let b = problem.psi().b();
    let mut rows = Vec::with_capacity(eps_list.len());
    for &eps in eps_list {
        let u = synthesize_control(problem, eps, &defect, &gram)?;
        let q = mild_state_at(problem, forcing, &u, b)?;
        let miss = q.sub(x1);
        let closed = endpoint_error_closed_form(eps, &defect, &gram)?;
        rows.push(SweepRow {
            eps,
            endpoint_miss: miss.norm(),
            closed_form_miss: closed.norm(),
            mode_gap: miss.coeffs().iter().zip(closed.coeffs()).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max),
            energy: u.energy(),
            iterations: 1,
            converged: true,
            residual: 0.0,
        });
    }
    Ok(ConvergenceReport { rows })
}

/// The witness control
/// ρ(t) = Γ(α)²/Ψ(T,a) · Ψ(T,t)^{1−α}[P_α(Ψ(T,t))ξ − 2Ψ(t,a) D P_α(Ψ(T,t))ξ]
/// with D read according to `convention`.
pub fn rho_witness(
    problem: &EvolutionProblem,
    xi: &SpectralState,
    horizon: f64,
    convention: SignConvention,
) -> Result<ControlFunction> {
    let psi = problem.psi();
    if !(horizon > psi.a() && horizon <= psi.b()) {
        return Err(Error::Domain { what: "witness horizon must lie in (a, b]", value: horizon });
    }
    if xi.len() != problem.n_modes() {
        return Err(Error::GridMismatch);
    }
    let grid = crate::spectral::graded_grid(psi.a(), horizon, 1.0, DEFAULT_GRID);
    let law = ControlLaw::Rho { xi: xi.coeffs().to_vec(), horizon, convention };
    let mut c = ControlFunction::from_law(problem, &grid, law, 0.0)?;
    c.energy = quadrature_energy(problem, &c)?;
    Ok(c)
}

/// L(u) = ∫_a^T ψ′(s)Ψ(T,s)^{α−1}P_α(Ψ(T,s))u(s)ds.
pub fn apply_l(problem: &EvolutionProblem, control: &ControlFunction, horizon: f64) -> Result<SpectralState> {
    SpectralState::new(forced_response(problem, &Forcing::Zero, control, horizon, false)?)
}

/// ‖L(ρ) − ξ‖/‖ξ‖.
pub fn verify_l_rho(
    problem: &EvolutionProblem,
    xi: &SpectralState,
    horizon: f64,
    convention: SignConvention,
) -> Result<f64> {
    let rho = rho_witness(problem, xi, horizon, convention)?;
    let l = apply_l(problem, &rho, horizon)?;
    Ok(l.distance(xi) / xi.norm())
}

/// The Problem-II optimum and its diagnostics.
#[derive(Clone, Debug)]
pub struct OptimalControl {
    pub control: ControlFunction,
    pub trajectory: Trajectory,
    pub cost: f64,
    pub endpoint_miss: f64,
    pub gramian: GramianDiag,
    /// x_b − S_{α,β}(Ψ(b,a))x₀.
    pub free_defect: SpectralState,
}

/// Minimizer of ‖q(b) − x_b‖² + λ∫‖u‖²:
/// u = ψ′Ψ(b,·)^{α−1}B*P_α*(λI + R(b))⁻¹[x_b − S_{α,β}(Ψ(b,a))x₀].
pub fn optimal_control_quadratic(problem: &EvolutionProblem, lambda: f64, x_b: &SpectralState) -> Result<OptimalControl> {
    if !(lambda > 0.0) {
        return Err(Error::InvalidParameter { what: "lambda", reason: "must be positive" });
    }
    let gram = gramian(problem, 1e-12)?;
    let free_defect = target_defect(problem, &Forcing::Zero, x_b)?;
    let grid = problem.graded_grid(DEFAULT_GRID);
    let control = resolvent_control(problem, lambda, &free_defect, &gram, &grid)?;
    let trajectory = mild_solution(problem, &Forcing::Zero, &control, &grid)?;
    let endpoint_miss = trajectory.endpoint().distance(x_b);
    let cost = endpoint_miss * endpoint_miss + lambda * control.energy();
    Ok(OptimalControl { control, trajectory, cost, endpoint_miss, gramian: gram, free_defect })
}

/// J(u) = ‖q(b) − x_b‖² + λ∫‖u‖² for an arbitrary control.
pub fn quadratic_cost(
    problem: &EvolutionProblem,
    lambda: f64,
    x_b: &SpectralState,
    control: &ControlFunction,
) -> Result<f64> {
    let q = mild_state_at(problem, &Forcing::Zero, control, problem.psi().b())?;
    let miss = q.distance(x_b);
    Ok(miss * miss + lambda * control.energy())
}
