//! State-dependent control constraints of ball type, the running cost J = ∫h,
//! and a projected random search that produces feasible low-cost pairs.
//!
//! The constraint set is U(t,x) = {(Ψ(t,a))^{1−γ}y : ‖y − κx‖ ≤ ρ₀‖x‖}. In terms
//! of the weighted state z = (Ψ(t,a))^{1−γ}x it is the ball of centre κz and
//! radius ρ₀‖z‖, which extends continuously to t = a.

use alloc::sync::Arc;
use alloc::vec::Vec;

use rand_chacha::ChaCha8Rng;
use rand_core::{RngCore, SeedableRng};
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
use crate::linctl::ControlFunction;
use crate::quad::{integrate, Tolerance};
use crate::spectral::{gronwall_bound, mild_solution, EvolutionProblem, Forcing, ProductWeights, SpectralState, Trajectory};

pub type ScalarFn = Arc<dyn Fn(f64) -> f64 + Send + Sync>;

/// g(x) = κx and ρ(x) = ρ₀‖x‖.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ConstraintSpec {
    kappa: f64,
    rho0: f64,
}

impl ConstraintSpec {
    pub fn new(kappa: f64, rho0: f64) -> Result<Self> {
        if !(kappa >= 0.0 && rho0 >= 0.0 && kappa.is_finite() && rho0.is_finite()) {
            return Err(Error::InvalidParameter { what: "constraint gains", reason: "kappa and rho0 must be finite and nonnegative" });
        }
        Ok(ConstraintSpec { kappa, rho0 })
    }

    pub fn kappa(&self) -> f64 {
        self.kappa
    }

    pub fn rho0(&self) -> f64 {
        self.rho0
    }

    /// a_U in ‖U(t,x)‖ ≤ a_U(t) + c_U(Ψ(t,a))^{1−γ}‖x‖.
    pub fn a_u(&self) -> f64 {
        0.0
    }

    pub fn c_u(&self) -> f64 {
        self.kappa + self.rho0
    }

    /// Common Lipschitz constant of g and ρ.
    pub fn lipschitz(&self) -> f64 {
        self.kappa.max(self.rho0)
    }

    fn project_weighted(&self, z: &SpectralState, v: &SpectralState) -> SpectralState {
        let centre = z.scaled(self.kappa);
        let radius = self.rho0 * z.norm();
        let d = v.sub(&centre);
        let dist = d.norm();
        if dist <= radius {
            v.clone()
        } else {
            centre.add(&d.scaled(radius / dist))
        }
    }

    /// Distance from v to the ball of centre κz and radius ρ₀‖z‖.
    fn defect_weighted(&self, z: &SpectralState, v: &SpectralState) -> f64 {
        (v.distance(&z.scaled(self.kappa)) - self.rho0 * z.norm()).max(0.0)
    }
}

fn weight(problem: &EvolutionProblem, t: f64) -> Result<f64> {
    let psi = problem.psi();
    if !(t > psi.a() && t <= psi.b()) {
        return Err(Error::Domain { what: "constraint weight needs a < t <= b", value: t });
    }
    Ok(libm::pow(psi.delta(t, psi.a()), 1.0 - problem.gamma()))
}

/// Euclidean projection of v onto U(t, q_t).
pub fn project_feasible(
    problem: &EvolutionProblem,
    spec: &ConstraintSpec,
    t: f64,
    q_t: &SpectralState,
    v: &SpectralState,
) -> Result<SpectralState> {
    let w = weight(problem, t)?;
    if q_t.len() != v.len() {
        return Err(Error::GridMismatch);
    }
    Ok(spec.project_weighted(&q_t.scaled(w), v))
}

/// Distance from v to U(t, q_t).
pub fn feasibility_defect(
    problem: &EvolutionProblem,
    spec: &ConstraintSpec,
    t: f64,
    q_t: &SpectralState,
    v: &SpectralState,
) -> Result<f64> {
    let w = weight(problem, t)?;
    Ok(spec.defect_weighted(&q_t.scaled(w), v))
}

/// (2L(Ψ(t,a))^{1−γ}‖x−y‖, exact Hausdorff distance of U(t,x) and U(t,y)).
///
/// Both sets are balls, so their Hausdorff distance is the distance of the
/// centres plus the difference of the radii.
pub fn hausdorff_bound_check(
    problem: &EvolutionProblem,
    spec: &ConstraintSpec,
    t: f64,
    x: &SpectralState,
    y: &SpectralState,
) -> Result<(f64, f64)> {
    let w = weight(problem, t)?;
    let bound = 2.0 * spec.lipschitz() * w * x.distance(y);
    let witnessed = w * (spec.kappa * x.distance(y) + spec.rho0 * (x.norm() - y.norm()).abs());
    Ok((bound, witnessed))
}

/// h(t,x,u) = k₁(t) + k₂(t)‖x‖ + c_h‖u‖.
#[derive(Clone)]
pub struct RunningCostSpec {
    pub k1: ScalarFn,
    pub k2: ScalarFn,
    pub c_h: f64,
}

impl core::fmt::Debug for RunningCostSpec {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        f.debug_struct("RunningCostSpec").field("c_h", &self.c_h).finish_non_exhaustive()
    }
}

impl RunningCostSpec {
    pub fn new(k1: ScalarFn, k2: ScalarFn, c_h: f64) -> Result<Self> {
        if !(c_h >= 0.0 && c_h.is_finite()) {
            return Err(Error::InvalidParameter { what: "running cost", reason: "c_h must be finite and nonnegative" });
        }
        Ok(RunningCostSpec { k1, k2, c_h })
    }

    /// k₁ ≡ 0, k₂ ≡ 1, c_h = 1/2.
    pub fn default_form() -> Self {
        RunningCostSpec { k1: Arc::new(|_| 0.0), k2: Arc::new(|_| 1.0), c_h: 0.5 }
    }

    pub fn h(&self, t: f64, x_norm: f64, u_norm: f64) -> f64 {
        (self.k1)(t) + (self.k2)(t) * x_norm + self.c_h * u_norm
    }
}

/// Trapezoid rule for J = ∫_a^b h(t,q(t),u(t)) dt. For γ < 1 the state is
/// unbounded at a; on the first cell ‖q(t)‖ is taken as (Ψ(t,a))^{γ−1} times
/// the mean weighted norm and the weight is integrated exactly.
pub fn running_cost(problem: &EvolutionProblem, spec: &RunningCostSpec, traj: &Trajectory, u: &ControlFunction) -> Result<f64> {
    let grid = traj.grid();
    if u.grid() != grid || grid.len() < 2 {
        return Err(Error::GridMismatch);
    }
    let values = u.values();
    let mut total = 0.0;
    let start = if problem.gamma() < 1.0 {
        let (t0, t1) = (grid[0], grid[1]);
        let wbar = 0.5 * (traj.weighted_state(0).norm() + traj.weighted_state(1).norm());
        let k1 = 0.5 * ((spec.k1)(t0) + (spec.k1)(t1));
        let k2 = (spec.k2)(0.5 * (t0 + t1));
        let un = 0.5 * (values[0].norm() + values[1].norm());
        let singular = weight_integral(problem, t0, t1)?;
        total += (t1 - t0) * (k1 + spec.c_h * un) + k2 * wbar * singular;
        1
    } else {
        0
    };
    for i in start..grid.len() - 1 {
        let h0 = spec.h(grid[i], traj.states()[i].norm(), values[i].norm());
        let h1 = spec.h(grid[i + 1], traj.states()[i + 1].norm(), values[i + 1].norm());
        total += 0.5 * (grid[i + 1] - grid[i]) * (h0 + h1);
    }
    Ok(total)
}

/// ∫_{a}^{t1} (Ψ(t,a))^{γ−1} dt with t = a + (t1 − a)w^{1/γ}.
fn weight_integral(problem: &EvolutionProblem, a: f64, t1: f64) -> Result<f64> {
    let psi = problem.psi();
    let g = problem.gamma();
    let q = 1.0 / g;
    let len = t1 - a;
    let f = |w: f64| {
        if w <= 0.0 {
            return 0.0;
        }
        let t = a + len * libm::pow(w, q);
        libm::pow(psi.delta(t, a), g - 1.0) * len * q * libm::pow(w, q - 1.0)
    };
    Ok(integrate(f, &[0.0, 1.0], Tolerance::new(1e-14, 1e-10).with_max_subdivisions(4000))?.value)
}

/// −(‖k₁‖_{L¹} + K‖q‖‖k₂‖_{L²} + c_h√(b−a)‖u‖_{L²}) with K = sup ψ′.
pub fn cost_lower_bound(problem: &EvolutionProblem, spec: &RunningCostSpec, traj: &Trajectory, u: &ControlFunction) -> Result<f64> {
    let psi = problem.psi();
    let (a, b) = (psi.a(), psi.b());
    let tol = Tolerance::new(1e-12, 1e-10);
    let k1 = integrate(|t| (spec.k1)(t).abs(), &[a, b], tol)?.value;
    let k2 = libm::sqrt(integrate(|t| (spec.k2)(t) * (spec.k2)(t), &[a, b], tol)?.value);
    let k = psi.derivative_bound();
    Ok(-(k1 + k * traj.weighted_norm() * k2 + spec.c_h * libm::sqrt(b - a) * libm::sqrt(u.energy())))
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SearchOptions {
    pub n_candidates: usize,
    pub seed: u64,
    pub grid_size: usize,
    /// Interpolation knots of each random proposal path.
    pub knots: usize,
    /// Proposal amplitude relative to the largest constraint radius of the free run.
    pub proposal_scale: f64,
    pub max_rounds: usize,
    pub tol: f64,
}

impl Default for SearchOptions {
    fn default() -> Self {
        SearchOptions { n_candidates: 16, seed: 0, grid_size: 101, knots: 6, proposal_scale: 2.0, max_rounds: 50, tol: 1e-6 }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct HistoryRow {
    pub candidate_id: usize,
    pub feasibility_rounds: usize,
    /// Running cost, NaN when the alternation failed.
    pub cost: f64,
    pub feasible: bool,
    /// The candidate improved on every earlier one.
    pub accepted: bool,
    pub running_best: f64,
    pub weighted_norm: f64,
    pub control_l2: f64,
}

/// Constants of the a-priori estimate and their largest witnessed counterparts.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct APrioriCheck {
    pub m0: f64,
    pub n0: f64,
    pub max_weighted_norm: f64,
    pub max_control_l2: f64,
}

impl APrioriCheck {
    pub fn holds(&self) -> bool {
        self.max_weighted_norm <= self.m0 && self.max_weighted_norm <= self.n0 && self.max_control_l2 <= self.n0
    }
}

#[derive(Clone, Debug)]
pub struct SearchResult {
    pub trajectory: Trajectory,
    pub control: ControlFunction,
    pub cost: f64,
    pub best_candidate: usize,
    /// Largest distance of u(t_i) from U(t_i, q(t_i)) over the grid.
    pub defect: f64,
    pub history: Vec<HistoryRow>,
    pub a_priori: APrioriCheck,
    /// SHA-256 of the history rows.
    pub digest: [u8; 32],
}

/// M₀ = C·E_α(DΓ(α)Ψ(b,a)^α) and N₀ = max(M₀, ‖a_U‖_{L²} + c_U M₀√(b−a)).
pub fn a_priori_constants(problem: &EvolutionProblem, spec: &ConstraintSpec) -> Result<(f64, f64)> {
    let psi = problem.psi();
    let b_norm = problem.gain().iter().fold(0.0f64, |m, g| m.max(g.abs()));
    let a_u_l2 = spec.a_u() * libm::sqrt(psi.b() - psi.a());
    let m0 = gronwall_bound(problem, a_u_l2, spec.c_u(), b_norm, psi.b())?;
    let n0 = m0.max(a_u_l2 + spec.c_u() * m0 * libm::sqrt(psi.b() - psi.a()));
    Ok((m0, n0))
}

fn uniform(rng: &mut ChaCha8Rng) -> f64 {
    (rng.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
}

struct Feasible {
    trajectory: Trajectory,
    control: Vec<SpectralState>,
    rounds: usize,
    defect: f64,
}

struct Search<'a> {
    problem: &'a EvolutionProblem,
    spec: &'a ConstraintSpec,
    grid: Vec<f64>,
    free: Trajectory,
    weights: ProductWeights,
    options: &'a SearchOptions,
}

impl Search<'_> {
    fn simulate(&self, u: &[SpectralState]) -> Result<Trajectory> {
        let gain = self.problem.gain();
        let bu: Vec<SpectralState> = u
            .iter()
            .map(|v| SpectralState::new(v.coeffs().iter().zip(gain).map(|(x, b)| x * b).collect()))
            .collect::<Result<_>>()?;
        let forced = self.weights.apply(&bu)?;
        let states = self
            .free
            .states()
            .iter()
            .zip(forced)
            .map(|(s, f)| SpectralState::new(s.coeffs().iter().zip(&f).map(|(x, y)| x + y).collect()))
            .collect::<Result<Vec<_>>>()?;
        Ok(Trajectory::assemble(self.problem.psi(), self.problem.gamma(), self.grid.clone(), states))
    }

    /// Alternates projection of the proposal onto U(t, q(t)) and simulation.
    /// `None` as proposal selects the ball centres.
    fn reconcile(&self, candidate: usize, proposal: Option<&[SpectralState]>) -> Result<Feasible> {
        let mut q = self.free.clone();
        for round in 1..=self.options.max_rounds {
            let u: Vec<SpectralState> = (0..self.grid.len())
                .map(|i| {
                    let z = q.weighted_state(i);
                    match proposal {
                        Some(p) if i > 0 => self.spec.project_weighted(&z, &p[i]),
                        _ => z.scaled(self.spec.kappa),
                    }
                })
                .collect();
            let next = self.simulate(&u)?;
            let change = next.weighted_distance(&q)?;
            let defect = (0..self.grid.len())
                .map(|i| self.spec.defect_weighted(&next.weighted_state(i), &u[i]))
                .fold(0.0, f64::max);
            q = next;
            if change <= self.options.tol && defect <= self.options.tol {
                return Ok(Feasible { trajectory: q, control: u, rounds: round, defect });
            }
        }
        Err(Error::Infeasible { candidate, rounds: self.options.max_rounds })
    }

    fn proposal(&self, candidate: usize, amplitude: f64) -> Vec<SpectralState> {
        let n = self.problem.n_modes();
        let k = self.options.knots.max(2);
        let mut rng = ChaCha8Rng::seed_from_u64(self.options.seed);
        rng.set_stream(candidate as u64);
        let knots: Vec<Vec<f64>> = (0..n)
            .map(|m| (0..k).map(|_| amplitude * (2.0 * uniform(&mut rng) - 1.0) / (m + 1) as f64).collect())
            .collect();
        let (a, b) = (self.grid[0], *self.grid.last().unwrap());
        self.grid
            .iter()
            .map(|&t| {
                let x = (t - a) / (b - a) * (k - 1) as f64;
                let j = (x as usize).min(k - 2);
                let f = x - j as f64;
                SpectralState::new(knots.iter().map(|c| c[j] * (1.0 - f) + c[j + 1] * f).collect()).unwrap()
            })
            .collect()
    }
}

/// Projected random search over feasible pairs with the default options.
pub fn feasible_search(
    problem: &EvolutionProblem,
    cspec: &ConstraintSpec,
    hspec: &RunningCostSpec,
    n_candidates: usize,
    seed: u64,
) -> Result<SearchResult> {
    feasible_search_with(problem, cspec, hspec, &SearchOptions { n_candidates, seed, ..SearchOptions::default() })
}

/// Candidate 0 selects the ball centres; the others are random per-mode
/// paths, piecewise linear between equally spaced knots, projected onto the
/// constraint set node by node. Candidate k draws from ChaCha8 stream k.
pub fn feasible_search_with(
    problem: &EvolutionProblem,
    cspec: &ConstraintSpec,
    hspec: &RunningCostSpec,
    options: &SearchOptions,
) -> Result<SearchResult> {
    if options.n_candidates == 0 || !(options.tol > 0.0) || options.max_rounds == 0 {
        return Err(Error::InvalidParameter { what: "search options", reason: "need n_candidates >= 1, tol > 0, max_rounds >= 1" });
    }
    let grid = problem.graded_grid(options.grid_size);
    let free = mild_solution(problem, &Forcing::Zero, &ControlFunction::zero(&grid, problem.n_modes()), &grid)?;
    let weights = ProductWeights::new(problem, &grid)?;
    let search = Search { problem, spec: cspec, grid: grid.clone(), free, weights, options };
    let amplitude = options.proposal_scale * cspec.rho0.max(cspec.kappa) * search.free.weighted_norm();
    let (m0, n0) = a_priori_constants(problem, cspec)?;

    let mut history = Vec::with_capacity(options.n_candidates);
    let mut best: Option<(f64, usize, Feasible, ControlFunction)> = None;
    let mut max_norm: f64 = 0.0;
    let mut max_l2: f64 = 0.0;
    for id in 0..options.n_candidates {
        let proposal = if id == 0 { None } else { Some(search.proposal(id, amplitude)) };
        let row = match search.reconcile(id, proposal.as_deref()) {
            Ok(found) => {
                let control = ControlFunction::sampled(grid.clone(), found.control.clone())?;
                let cost = running_cost(problem, hspec, &found.trajectory, &control)?;
                let l2 = libm::sqrt(control.energy());
                max_norm = max_norm.max(found.trajectory.weighted_norm());
                max_l2 = max_l2.max(l2);
                let accepted = best.as_ref().map_or(true, |(c, ..)| cost < *c);
                let weighted_norm = found.trajectory.weighted_norm();
                let rounds = found.rounds;
                if accepted {
                    best = Some((cost, id, found, control));
                }
                HistoryRow {
                    candidate_id: id,
                    feasibility_rounds: rounds,
                    cost,
                    feasible: true,
                    accepted,
                    running_best: best.as_ref().unwrap().0,
                    weighted_norm,
                    control_l2: l2,
                }
            }
            Err(Error::Infeasible { rounds, .. }) => HistoryRow {
                candidate_id: id,
                feasibility_rounds: rounds,
                cost: f64::NAN,
                feasible: false,
                accepted: false,
                running_best: best.as_ref().map_or(f64::INFINITY, |b| b.0),
                weighted_norm: f64::NAN,
                control_l2: f64::NAN,
            },
            Err(e) => return Err(e),
        };
        history.push(row);
    }
    let (cost, best_candidate, found, control) =
        best.ok_or(Error::Infeasible { candidate: 0, rounds: options.max_rounds })?;
    let digest = history_digest(&history);
    Ok(SearchResult {
        trajectory: found.trajectory,
        control,
        cost,
        best_candidate,
        defect: found.defect,
        history,
        a_priori: APrioriCheck { m0, n0, max_weighted_norm: max_norm, max_control_l2: max_l2 },
        digest,
    })
}

/// SHA-256 over (id, rounds, cost bits, feasible, accepted) of every row.
pub fn history_digest(rows: &[HistoryRow]) -> [u8; 32] {
    let mut h = Sha256::new();
    for r in rows {
        h.update((r.candidate_id as u64).to_le_bytes());
        h.update((r.feasibility_rounds as u64).to_le_bytes());
        h.update(r.cost.to_bits().to_le_bytes());
        h.update([r.feasible as u8, r.accepted as u8]);
    }
    h.finalize().into()
}

/// Largest distance of u(t_i) from U(t_i, q(t_i)); the initial node is
/// measured against the limiting ball of the weighted state.
pub fn max_feasibility_defect(spec: &ConstraintSpec, traj: &Trajectory, u: &ControlFunction) -> Result<f64> {
    if traj.grid() != u.grid() {
        return Err(Error::GridMismatch);
    }
    Ok((0..traj.grid().len())
        .map(|i| spec.defect_weighted(&traj.weighted_state(i), &u.values()[i]))
        .fold(0.0, f64::max))
}
