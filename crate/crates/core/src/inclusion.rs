//! Semilinear inclusion q ∈ solution of D q = Aq + F(t,q) + Bu with the
//! multimap F(t,x) = a(t,·)H(x), H(x) = {y : f₁(ξ,r) ≤ y(ξ) ≤ f₂(ξ,r)},
//! r = ∫φx, solved through explicit selections and the Γ_ε fixed-point map.

use alloc::sync::Arc;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::linctl::{
    check_eps_list, endpoint_error_closed_form, gramian, resolvent_response, synthesize_control_on, ControlFunction,
    ConvergenceReport, GramianDiag, SweepRow,
};
use crate::psicalc::{weighted_limit_samples, weighted_limit_vanishes};
use crate::spectral::{mild_solution, EvolutionProblem, Forcing, ProductWeights, SineQuadrature, SpectralState, Trajectory, DEFAULT_GRID};

pub type Envelope = Arc<dyn Fn(f64, f64) -> f64 + Send + Sync>;
pub type ScalarFn = Arc<dyn Fn(f64) -> f64 + Send + Sync>;
pub type Coefficient = Arc<dyn Fn(f64, f64) -> f64 + Send + Sync>;

/// The multimap data: envelopes f₁ ≤ f₂ in (ξ, r), the weight φ, the
/// coefficient a(t, ξ) with |a| ≤ m(t), and the uniform bound K₁ ≥ |fᵢ|.
#[derive(Clone)]
pub struct MultimapSpec {
    pub f1: Envelope,
    pub f2: Envelope,
    /// Bound on |∂fᵢ/∂ξ|.
    pub lipschitz: ScalarFn,
    pub phi: ScalarFn,
    pub a_coeff: Coefficient,
    pub m: ScalarFn,
    pub k1: f64,
    zero: bool,
}

impl core::fmt::Debug for MultimapSpec {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        f.debug_struct("MultimapSpec").field("k1", &self.k1).field("zero", &self.zero).finish()
    }
}

impl MultimapSpec {
    pub fn new(f1: Envelope, f2: Envelope, lipschitz: ScalarFn, phi: ScalarFn, a_coeff: Coefficient, m: ScalarFn, k1: f64) -> Self {
        MultimapSpec { f1, f2, lipschitz, phi, a_coeff, m, k1, zero: false }
    }

    /// φ = e₁, f₁,₂ = arctan(r) ∓ 1/2, a = m = 1, K₁ = π/2 + 1/2, l = 0.
    pub fn default_instance() -> Self {
        let w = libm::sqrt(2.0 / core::f64::consts::PI);
        MultimapSpec {
            f1: Arc::new(|_, r| libm::atan(r) - 0.5),
            f2: Arc::new(|_, r| libm::atan(r) + 0.5),
            lipschitz: Arc::new(|_| 0.0),
            phi: Arc::new(move |xi| w * libm::sin(xi)),
            a_coeff: Arc::new(|_, _| 1.0),
            m: Arc::new(|_| 1.0),
            k1: core::f64::consts::FRAC_PI_2 + 0.5,
            zero: false,
        }
    }

    /// F ≡ 0: the inclusion reduces to the linear control system.
    pub fn zero() -> Self {
        MultimapSpec {
            f1: Arc::new(|_, _| 0.0),
            f2: Arc::new(|_, _| 0.0),
            lipschitz: Arc::new(|_| 0.0),
            phi: Arc::new(|_| 0.0),
            a_coeff: Arc::new(|_, _| 0.0),
            m: Arc::new(|_| 0.0),
            k1: 0.0,
            zero: true,
        }
    }

    /// f₁ = f₂ = g(ξ): a single-valued map that ignores the state.
    pub fn state_independent(g: ScalarFn, bound: f64) -> Self {
        let (g1, g2) = (g.clone(), g);
        MultimapSpec {
            f1: Arc::new(move |xi, _| g1(xi)),
            f2: Arc::new(move |xi, _| g2(xi)),
            lipschitz: Arc::new(|_| 0.0),
            phi: Arc::new(|_| 0.0),
            a_coeff: Arc::new(|_, _| 1.0),
            m: Arc::new(|_| 1.0),
            k1: bound,
            zero: false,
        }
    }

    pub fn is_zero(&self) -> bool {
        self.zero
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SelectionStrategy {
    Lower,
    Upper,
    Midpoint,
    /// f₁ when r < 0, f₂ otherwise (ties go to f₂).
    Switch,
}

impl SelectionStrategy {
    pub fn name(self) -> &'static str {
        match self {
            SelectionStrategy::Lower => "lower",
            SelectionStrategy::Upper => "upper",
            SelectionStrategy::Midpoint => "midpoint",
            SelectionStrategy::Switch => "switch",
        }
    }

    fn pick(self, lo: f64, hi: f64, r: f64) -> f64 {
        match self {
            SelectionStrategy::Lower => lo,
            SelectionStrategy::Upper => hi,
            SelectionStrategy::Midpoint => 0.5 * (lo + hi),
            SelectionStrategy::Switch => {
                if r < 0.0 {
                    lo
                } else {
                    hi
                }
            }
        }
    }
}

/// Samples of φ and the sine basis on a ξ-quadrature of at least 4N nodes.
#[derive(Clone, Debug)]
pub struct SelectionContext {
    quad: SineQuadrature,
    phi: Vec<f64>,
}

impl SelectionContext {
    pub fn new(spec: &MultimapSpec, n_modes: usize) -> Self {
        let quad = SineQuadrature::new(n_modes, (4 * n_modes).max(64));
        let phi = quad.nodes.iter().map(|&x| (spec.phi)(x)).collect();
        SelectionContext { quad, phi }
    }

    /// r = ∫₀^π φ(ξ)x(ξ)dξ.
    pub fn functional(&self, x: &SpectralState) -> f64 {
        self.quad.inner(&self.phi, &self.quad.synthesize(x.coeffs()))
    }
}

/// a(t,·)·y projected on the sine basis, with y = strategy(f₁, f₂)(·, r) and
/// r = ∫φ q.
pub fn evaluate_selection(
    spec: &MultimapSpec,
    strategy: SelectionStrategy,
    ctx: &SelectionContext,
    t: f64,
    q: &SpectralState,
) -> Result<SpectralState> {
    let n = q.len();
    if spec.zero {
        return Ok(SpectralState::zeros(n));
    }
    let r = ctx.functional(q);
    let mut values = Vec::with_capacity(ctx.quad.nodes.len());
    for &xi in &ctx.quad.nodes {
        let (lo, hi) = ((spec.f1)(xi, r), (spec.f2)(xi, r));
        if !(lo <= hi) {
            return Err(Error::EnvelopeViolation { xi, lower: lo, upper: hi });
        }
        values.push((spec.a_coeff)(t, xi) * strategy.pick(lo, hi, r));
    }
    let mut coeffs = ctx.quad.analyze(&values);
    coeffs.truncate(n);
    SpectralState::new(coeffs)
}

/// What to do when the sampled weighted limit of I^α m fails to vanish.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum LimitPolicy {
    Skip,
    Warn,
    Abort,
}

#[derive(Clone, Debug)]
pub struct SolverOptions {
    pub max_iter: usize,
    pub tol: f64,
    /// Initial damping θ ∈ (0, 1]; halved whenever the iterate distance grows.
    pub damping: f64,
    pub grid_size: usize,
    pub limit_policy: LimitPolicy,
}

impl Default for SolverOptions {
    fn default() -> Self {
        SolverOptions { max_iter: 60, tol: 1e-8, damping: 1.0, grid_size: DEFAULT_GRID, limit_policy: LimitPolicy::Warn }
    }
}

#[derive(Clone, Debug)]
pub struct FixedPoint {
    pub trajectory: Trajectory,
    pub control: ControlFunction,
    /// The selection f(t_i) ∈ F(t_i, q(t_i)) on the grid.
    pub selection: Vec<SpectralState>,
    pub iterations: usize,
    /// ‖Γ_ε(q) − q‖ in the weighted norm.
    pub residual: f64,
    pub converged: bool,
    /// Weighted distance between successive iterates.
    pub history: Vec<f64>,
    pub damping: f64,
    /// max over iterations and nodes of ‖f(t)‖ / (2K₁m(t)).
    pub selection_ratio: f64,
    pub defect: SpectralState,
    pub gramian: GramianDiag,
    /// None when the weighted-limit check was skipped.
    pub weighted_limit_ok: Option<bool>,
}

/// Grid-dependent pieces of Γ_ε that do not change with q or ε.
struct Prepared {
    grid: Vec<f64>,
    free: Trajectory,
    /// Unit-coefficient resolvent responses per node.
    response: Vec<Vec<f64>>,
    weights: ProductWeights,
}

impl Prepared {
    fn new(problem: &EvolutionProblem, grid_size: usize) -> Result<Self> {
        let grid = problem.graded_grid(grid_size);
        let free = mild_solution(problem, &Forcing::Zero, &ControlFunction::zero(&grid, problem.n_modes()), &grid)?;
        let response = resolvent_response(problem, &grid)?;
        let weights = ProductWeights::new(problem, &grid)?;
        Ok(Self { grid, free, response, weights })
    }
}

struct Gamma<'a> {
    problem: &'a EvolutionProblem,
    spec: &'a MultimapSpec,
    strategy: SelectionStrategy,
    ctx: SelectionContext,
    x1: &'a SpectralState,
    eps: f64,
    gram: GramianDiag,
    prep: &'a Prepared,
}

struct GammaImage {
    trajectory: Trajectory,
    control: ControlFunction,
    selection: Vec<SpectralState>,
    defect: SpectralState,
    ratio: f64,
}

impl Gamma<'_> {
    fn selection(&self, q: &Trajectory) -> Result<(Vec<SpectralState>, f64)> {
        let mut sel = Vec::with_capacity(self.prep.grid.len());
        let mut ratio: f64 = 0.0;
        let gamma_one = self.problem.gamma() == 1.0;
        for (i, &t) in self.prep.grid.iter().enumerate() {
            // for γ < 1 the state is unbounded at t = a; reuse the first interior value there
            let f = if i == 0 && !gamma_one {
                evaluate_selection(self.spec, self.strategy, &self.ctx, self.prep.grid[1], &q.states()[1])?
            } else {
                evaluate_selection(self.spec, self.strategy, &self.ctx, t, &q.states()[i])?
            };
            let cap = 2.0 * self.spec.k1 * (self.spec.m)(t);
            let norm = f.norm();
            if norm > 0.0 {
                ratio = ratio.max(if cap > 0.0 { norm / cap } else { f64::INFINITY });
            }
            sel.push(f);
        }
        Ok((sel, ratio))
    }

    fn apply(&self, q: &Trajectory) -> Result<GammaImage> {
        let (selection, ratio) = self.selection(q)?;
        let forced = self.prep.weights.apply(&selection)?;
        let free = self.prep.free.states();
        let end = free.len() - 1;
        let defect = SpectralState::new(
            self.x1
                .coeffs()
                .iter()
                .zip(free[end].coeffs())
                .zip(&forced[end])
                .map(|((x, s), f)| x - s - f)
                .collect(),
        )?;
        let control = synthesize_control_on(self.problem, self.eps, &defect, &self.gram, &self.prep.grid)?;
        let coeffs = control.resolvent_coeffs().unwrap_or(&[]);
        let states = free
            .iter()
            .zip(&forced)
            .zip(&self.prep.response)
            .map(|((free, f), g)| {
                let c = free
                    .coeffs()
                    .iter()
                    .zip(f)
                    .zip(g)
                    .zip(coeffs.iter().chain(core::iter::repeat(&0.0)))
                    .zip(self.problem.gain())
                    .map(|((((x, y), g), c), b)| x + y + b * b * c * g)
                    .collect();
                SpectralState::new(c)
            })
            .collect::<Result<Vec<_>>>()?;
        let trajectory = Trajectory::assemble(self.problem.psi(), self.problem.gamma(), self.prep.grid.clone(), states);
        Ok(GammaImage { trajectory, control, selection, defect, ratio })
    }
}

fn blend(psi_problem: &EvolutionProblem, theta: f64, new: &Trajectory, old: &Trajectory) -> Trajectory {
    let states = new
        .states()
        .iter()
        .zip(old.states())
        .map(|(a, b)| a.scaled(theta).add(&b.scaled(1.0 - theta)))
        .collect();
    Trajectory::assemble(psi_problem.psi(), psi_problem.gamma(), new.grid().to_vec(), states)
}

/// Picard iteration q^{k+1} = Γ_ε(q^k) from the free trajectory.
pub fn fixed_point_solve(
    problem: &EvolutionProblem,
    spec: &MultimapSpec,
    strategy: SelectionStrategy,
    x1: &SpectralState,
    eps: f64,
    options: &SolverOptions,
) -> Result<FixedPoint> {
    let gram = gramian(problem, 1e-12)?;
    let prep = Prepared::new(problem, options.grid_size)?;
    fixed_point_with_gramian(problem, spec, strategy, x1, eps, options, gram, &prep)
}

fn fixed_point_with_gramian(
    problem: &EvolutionProblem,
    spec: &MultimapSpec,
    strategy: SelectionStrategy,
    x1: &SpectralState,
    eps: f64,
    options: &SolverOptions,
    gram: GramianDiag,
    prep: &Prepared,
) -> Result<FixedPoint> {
    if !(eps > 0.0) || !(options.tol > 0.0) || !(options.damping > 0.0 && options.damping <= 1.0) {
        return Err(Error::InvalidParameter { what: "fixed-point options", reason: "need eps > 0, tol > 0, damping in (0, 1]" });
    }
    if x1.len() != problem.n_modes() {
        return Err(Error::GridMismatch);
    }
    let weighted_limit_ok = match options.limit_policy {
        LimitPolicy::Skip => None,
        _ if spec.zero => Some(true),
        policy => {
            let samples = weighted_limit_samples(problem.psi(), problem.order(), |t| (spec.m)(t), 6)?;
            let ok = weighted_limit_vanishes(&samples);
            if !ok && policy == LimitPolicy::Abort {
                return Err(Error::InvalidParameter {
                    what: "dominating function m",
                    reason: "weighted limit of I^alpha m does not vanish at a",
                });
            }
            Some(ok)
        }
    };
    let map = Gamma { problem, spec, strategy, ctx: SelectionContext::new(spec, problem.n_modes()), x1, eps, gram, prep };
    let mut q = prep.free.clone();
    let mut theta = options.damping;
    let mut history = Vec::new();
    let mut ratio: f64 = 0.0;
    let mut iterations = 0;
    let mut converged = false;
    while iterations < options.max_iter {
        iterations += 1;
        let image = map.apply(&q)?;
        ratio = ratio.max(image.ratio);
        let next = if theta < 1.0 { blend(problem, theta, &image.trajectory, &q) } else { image.trajectory.clone() };
        let dist = next.weighted_distance(&q)?;
        if let Some(&prev) = history.last() {
            if dist > prev && theta > 1.0 / 64.0 {
                theta *= 0.5;
            }
        }
        history.push(dist);
        q = next;
        // Γ_ε does not depend on q when F ≡ 0, so one application is exact.
        if spec.zero || dist <= options.tol {
            converged = true;
            break;
        }
    }
    let check = map.apply(&q)?;
    ratio = ratio.max(check.ratio);
    let residual = check.trajectory.weighted_distance(&q)?;
    Ok(FixedPoint {
        trajectory: q,
        control: check.control,
        selection: check.selection,
        iterations,
        residual,
        converged,
        history,
        damping: theta,
        selection_ratio: ratio,
        defect: check.defect,
        gramian: map.gram,
        weighted_limit_ok,
    })
}

/// Endpoint miss, energy and iteration counts along an ε schedule.
pub fn inclusion_eps_sweep(
    problem: &EvolutionProblem,
    spec: &MultimapSpec,
    strategy: SelectionStrategy,
    x1: &SpectralState,
    eps_list: &[f64],
    options: &SolverOptions,
) -> Result<ConvergenceReport> {
    check_eps_list(eps_list)?;
    let gram = gramian(problem, 1e-12)?;
    let prep = Prepared::new(problem, options.grid_size)?;
    let mut rows = Vec::with_capacity(eps_list.len());
    for &eps in eps_list {
        let fp = fixed_point_with_gramian(problem, spec, strategy, x1, eps, options, gram.clone(), &prep)?;
        let miss = fp.trajectory.endpoint().sub(x1);
        let closed = endpoint_error_closed_form(eps, &fp.defect, &fp.gramian)?;
        rows.push(SweepRow {
            eps,
            endpoint_miss: miss.norm(),
            closed_form_miss: closed.norm(),
            mode_gap: miss.coeffs().iter().zip(closed.coeffs()).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max),
            energy: fp.control.energy(),
            iterations: fp.iterations,
            converged: fp.converged,
            residual: fp.residual,
        });
    }
    Ok(ConvergenceReport { rows })
}
