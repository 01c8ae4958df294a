//! Identity and invariant checks across the numerical core, each with a
//! measured discrepancy and the tolerance it must meet.

use hilfer_core::linctl::{
    endpoint_error_closed_form, eps_sweep, gramian, optimal_control_quadratic, target_defect, verify_l_rho, SignConvention,
};
use hilfer_core::psicalc::{kernel_l2_norm, psi_frac_integral, psi_hilfer_derivative, FracOrder, PsiFunction, PsiKind};
use hilfer_core::quad::{integrate, Tolerance};
use hilfer_core::specfn::{gamma_fn, mainardi_wright, mittag_leffler, ml_via_wright_quadrature, MLParams};
use hilfer_core::spectral::{mild_solution, EvolutionProblem, Forcing, SpectralState};
use hilfer_core::linctl::ControlFunction;

use crate::error::{Context, LabError};

#[derive(Clone, Debug, PartialEq)]
pub struct Check {
    pub id: &'static str,
    pub module: &'static str,
    /// Worst discrepancy (or a 0/1 flag for qualitative properties).
    pub measured: f64,
    pub tolerance: f64,
    pub note: String,
}

impl Check {
    pub fn passed(&self) -> bool {
        self.measured <= self.tolerance
    }
}

fn check(id: &'static str, module: &'static str, measured: f64, tolerance: f64, note: impl Into<String>) -> Check {
    Check { id, module, measured: if measured.is_nan() { f64::INFINITY } else { measured }, tolerance, note: note.into() }
}

fn flag(ok: bool) -> f64 {
    if ok {
        0.0
    } else {
        1.0
    }
}

fn parabola(n: usize) -> SpectralState {
    let w = (2.0 / std::f64::consts::PI).sqrt();
    SpectralState::new((1..=n).map(|k| w * 2.0 * (1.0 - (-1f64).powi(k as i32)) / (k as f64).powi(3)).collect()).unwrap()
}

fn clocks() -> Vec<PsiFunction> {
    vec![
        PsiFunction::linear(0.0, 1.0).unwrap(),
        PsiFunction::new(PsiKind::Power, &[2.0], 0.0, 1.0).unwrap(),
        PsiFunction::new(PsiKind::Logarithmic, &[1.0], 0.0, 1.0).unwrap(),
    ]
}

pub const BRIDGE_ALPHAS: [f64; 4] = [0.55, 0.6, 0.75, 0.9];
pub const BRIDGE_Z: [f64; 6] = [0.0, 0.5, 1.0, 2.0, 4.0, 8.0];

/// max |subordination integral − E_{α,α}(−z)| over the 24-point grid.
pub fn bridge_error() -> Result<f64, LabError> {
    let mut worst: f64 = 0.0;
    for alpha in BRIDGE_ALPHAS {
        let p = MLParams::new(alpha, alpha).during("mittag_leffler")?;
        for z in BRIDGE_Z {
            let via = ml_via_wright_quadrature(alpha, z).during("ml_via_wright_quadrature")?;
            worst = worst.max((via - mittag_leffler(p, -z).during("mittag_leffler")?).abs());
        }
    }
    Ok(worst)
}

fn specfn_checks(out: &mut Vec<Check>) -> Result<(), LabError> {
    let mut worst: f64 = 0.0;
    for alpha in [0.3, 0.6, 0.9, 1.0, 1.5] {
        for beta in [0.5, 1.0, 1.7, 3.0] {
            let e = mittag_leffler(MLParams::new(alpha, beta).during("mittag_leffler")?, 0.0).during("mittag_leffler")?;
            worst = worst.max((e * gamma_fn(beta).during("gamma")? - 1.0).abs());
        }
    }
    out.push(check("specfn.origin", "specfn", worst, 1e-12, "E(0)Γ(β) = 1"));

    let p11 = MLParams::new(1.0, 1.0).during("mittag_leffler")?;
    let mut worst: f64 = 0.0;
    for i in 0..=250 {
        let z = -20.0 + 0.1 * i as f64;
        worst = worst.max((mittag_leffler(p11, z).during("mittag_leffler")? / z.exp() - 1.0).abs());
    }
    out.push(check("specfn.exponential", "specfn", worst, 1e-10, "E_{1,1} = exp on [-20, 5]"));

    let mut ok = true;
    for alpha in [0.51, 0.6, 0.75, 0.9, 1.0] {
        let p = MLParams::new(alpha, alpha).during("mittag_leffler")?;
        let mut prev = f64::INFINITY;
        for i in 0..=500 {
            let e = mittag_leffler(p, -0.1 * i as f64).during("mittag_leffler")?;
            ok &= e > 0.0 && e < prev;
            prev = e;
        }
    }
    out.push(check("specfn.monotone", "specfn", flag(ok), 0.0, "E_{α,α}(-z) positive, decreasing on [0, 50]"));

    let mut worst: f64 = 0.0;
    for alpha in BRIDGE_ALPHAS {
        let a0 = alpha.powf(alpha / (1.0 - alpha)) * (1.0 - alpha);
        let tm = (60.0 / a0).powf(1.0 - alpha);
        let mass = integrate(|t| mainardi_wright(alpha, t).unwrap_or(f64::NAN), &[0.0, 0.25 * tm, 0.5 * tm, tm], Tolerance::new(1e-14, 1e-11))
            .during("wright normalization")?
            .value;
        worst = worst.max((mass - 1.0).abs());
    }
    out.push(check("specfn.wright_mass", "specfn", worst, 1e-6, "∫M_α = 1"));
    out.push(check("specfn.bridge", "specfn", bridge_error()?, 1e-6, "subordination integral vs E_{α,α}(-z), 24 points"));
    Ok(())
}

fn psicalc_checks(out: &mut Vec<Check>) -> Result<(), LabError> {
    let mut power: f64 = 0.0;
    let mut semigroup: f64 = 0.0;
    for psi in clocks() {
        for alpha in [0.3, 0.75] {
            for delta in [1.0, 1.5, 2.0] {
                let t = 0.8;
                let got = psi_frac_integral(&psi, alpha, |s| psi.delta(s, 0.0).powf(delta - 1.0), t).during("psi_frac_integral")?;
                let want = gamma_fn(delta).during("gamma")? / gamma_fn(delta + alpha).during("gamma")?
                    * psi.delta(t, 0.0).powf(delta + alpha - 1.0);
                power = power.max((got - want).abs() / want.abs());
            }
        }
        let f = |s: f64| psi.value(s).cos() + s;
        let inner = |s: f64| psi_frac_integral(&psi, 0.4, f, s).unwrap_or(f64::NAN);
        let composed = psi_frac_integral(&psi, 0.5, inner, 0.7).during("psi_frac_integral")?;
        let direct = psi_frac_integral(&psi, 0.9, f, 0.7).during("psi_frac_integral")?;
        semigroup = semigroup.max((composed - direct).abs() / direct.abs().max(1.0));
    }
    out.push(check("psicalc.power_rule", "psicalc", power, 1e-6, "I^α Ψ^{δ-1} closed form"));
    out.push(check("psicalc.semigroup", "psicalc", semigroup, 1e-6, "I^a I^b = I^{a+b}"));

    let mut inverse: f64 = 0.0;
    let mut annihilation: f64 = 0.0;
    for psi in clocks() {
        let order = FracOrder::new(0.75, 0.5).during("order")?;
        let g = |s: f64| psi.value(s).sin();
        let f = |s: f64| psi_frac_integral(&psi, 0.75, g, s).unwrap_or(f64::NAN);
        for t in [0.4, 0.9] {
            let d = psi_hilfer_derivative(&psi, order, f, t).during("psi_hilfer_derivative")?;
            inverse = inverse.max((d - g(t)).abs());
            let gm = order.gamma() - 1.0;
            let d = psi_hilfer_derivative(&psi, order, |s| psi.delta(s, 0.0).powf(gm), t).during("psi_hilfer_derivative")?;
            annihilation = annihilation.max(d.abs());
        }
    }
    out.push(check("psicalc.left_inverse", "psicalc", inverse, 1e-4, "D^{α,β} I^α g = g"));
    out.push(check("psicalc.annihilation", "psicalc", annihilation, 1e-4, "D^{α,β} Ψ^{γ-1} = 0"));

    let mut norm: f64 = 0.0;
    for slope in [0.5, 1.0, 2.5] {
        let psi = PsiFunction::new(PsiKind::Linear, &[slope], 0.0, 1.0).during("psi")?;
        for alpha in [0.51, 0.75, 1.0] {
            let e = 2.0 * alpha - 1.0;
            let want = (slope * psi.delta(0.7, 0.0).powf(e) / e).sqrt();
            norm = norm.max((kernel_l2_norm(&psi, alpha, 0.7).during("kernel_l2_norm")? - want).abs() / want);
        }
    }
    out.push(check("psicalc.kernel_norm", "psicalc", norm, 1e-8, "kernel L² norm closed form"));
    Ok(())
}

fn spectral_checks(out: &mut Vec<Check>) -> Result<(), LabError> {
    let mut ratio: f64 = 0.0;
    let x = SpectralState::new((1..=12).map(|k| (k as f64).sin()).collect()).unwrap();
    for (alpha, beta) in [(0.6, 0.2), (0.8, 0.9), (1.0, 0.5)] {
        let p = EvolutionProblem::new(PsiFunction::linear(0.0, 1.0).unwrap(), FracOrder::new(alpha, beta).during("order")?, SpectralState::zeros(12))
            .during("problem")?;
        for s in [1e-3, 0.05, 0.4, 1.0, 2.5] {
            let (kb, sb) = p.operator_bounds(s).during("operator_bounds")?;
            ratio = ratio.max(p.apply_k(s, &x).during("apply_k")?.norm() / (kb * x.norm()));
            ratio = ratio.max(p.apply_s(s, &x).during("apply_s")?.norm() / (sb * x.norm()));
        }
    }
    out.push(check("spectral.operator_bounds", "spectral", (ratio - 1.0).max(0.0), 1e-12, "‖K‖, ‖S‖ below their bounds"));

    let p = EvolutionProblem::new(PsiFunction::linear(0.0, 1.0).unwrap(), FracOrder::new(0.7, 0.4).during("order")?, SpectralState::zeros(12))
        .during("problem")?;
    let base = p.apply_k(0.3, &x).during("apply_k")?;
    let gaps: Vec<f64> = (1..=8).map(|j| p.apply_k(0.3 + 0.1 * 0.5f64.powi(j), &x).map(|k| k.distance(&base))).collect::<Result<_, _>>().during("apply_k")?;
    let shrinking = gaps.windows(2).all(|w| w[1] < w[0]) && gaps[7] < 0.02 * gaps[0];
    out.push(check("spectral.continuity", "spectral", flag(shrinking), 0.0, "‖K(s+h)x − K(s)x‖ → 0"));

    let x0 = SpectralState::new((1..=10).map(|k| 1.0 / (k * k) as f64).collect()).unwrap();
    let p = EvolutionProblem::new(PsiFunction::linear(0.0, 1.0).unwrap(), FracOrder::new(1.0, 0.0).during("order")?, x0.clone()).during("problem")?;
    let grid = p.graded_grid(41);
    let traj = mild_solution(&p, &Forcing::Zero, &ControlFunction::zero(&grid, 10), &grid).during("mild_solution")?;
    let mut worst: f64 = 0.0;
    for (i, &t) in grid.iter().enumerate() {
        for n in 0..10 {
            let exact = (-(((n + 1) * (n + 1)) as f64) * t).exp() * x0.coeffs()[n];
            worst = worst.max((traj.states()[i].coeffs()[n] - exact).abs());
        }
    }
    out.push(check("spectral.heat_degeneracy", "spectral", worst, 1e-8, "α = 1 reproduces the heat semigroup"));

    let p = EvolutionProblem::new(PsiFunction::linear(0.0, 1.0).unwrap(), FracOrder::new(0.6, 0.0).during("order")?, x0.clone()).during("problem")?;
    let grid = p.graded_grid(61);
    let traj = mild_solution(&p, &Forcing::Zero, &ControlFunction::zero(&grid, 10), &grid).during("mild_solution")?;
    let bound = p.operator_bounds(1.0).during("operator_bounds")?.1 * x0.norm();
    out.push(check("spectral.weighted_norm", "spectral", (traj.weighted_norm() / bound - 1.0).max(0.0), 1e-12, "weighted norm bounded"));
    Ok(())
}

fn linctl_checks(out: &mut Vec<Check>) -> Result<SignConvention, LabError> {
    let x1 = SpectralState::basis(16, 1).scaled(0.5);
    let mut gap: f64 = 0.0;
    let mut positive = true;
    for psi in clocks() {
        let p = EvolutionProblem::new(psi, FracOrder::new(0.75, 0.5).during("order")?, parabola(16)).during("problem")?;
        let rep = eps_sweep(&p, &Forcing::Zero, &x1, &[1.0, 0.1, 0.01]).during("eps_sweep")?;
        gap = rep.rows.iter().fold(gap, |g, r| g.max(r.mode_gap));
        positive &= gramian(&p, 1e-12).during("gramian")?.entries().iter().all(|r| *r > 0.0 && r.is_finite());
    }
    out.push(check("linctl.gramian_positive", "linctl", flag(positive), 0.0, "r_n > 0 and finite"));
    out.push(check("linctl.step_v", "linctl", gap, 1e-5, "simulated endpoint miss vs closed form, per mode"));

    let p = EvolutionProblem::new(PsiFunction::linear(0.0, 1.0).unwrap(), FracOrder::new(0.75, 0.5).during("order")?, parabola(16)).during("problem")?;
    let gram = gramian(&p, 1e-12).during("gramian")?;
    let n = target_defect(&p, &Forcing::Zero, &x1).during("target_defect")?;
    let mut contraction: f64 = 0.0;
    for eps in [1e-6, 1e-3, 1.0, 1e2] {
        contraction = contraction.max(endpoint_error_closed_form(eps, &n, &gram).during("closed form")?.norm() - n.norm());
    }
    out.push(check("linctl.contraction", "linctl", contraction.max(0.0), 0.0, "‖ε(εI+R)⁻¹x‖ ≤ ‖x‖"));

    let mut arg = Vec::new();
    let mut chain: f64 = 0.0;
    for alpha in [1.0, 0.75, 0.6] {
        let q = EvolutionProblem::new(PsiFunction::linear(0.0, 1.0).unwrap(), FracOrder::new(alpha, 0.3).during("order")?, SpectralState::zeros(8))
            .during("problem")?;
        let xi = parabola(8);
        arg.push(verify_l_rho(&q, &xi, 1.0, SignConvention::Argument).during("verify_l_rho")?);
        chain = chain.max(verify_l_rho(&q, &xi, 1.0, SignConvention::ChainRule).during("verify_l_rho")?);
    }
    let fractional = arg[1].max(arg[2]);
    let convention = if fractional <= chain { SignConvention::Argument } else { SignConvention::ChainRule };
    let note = format!("relative defect of L(ρ) = ξ, {} convention", convention.name());
    out.push(check("linctl.l_rho_unit_order", "linctl", arg[0], 1e-6, note.clone()));
    out.push(check("linctl.l_rho", "linctl", fractional, 1e-3, note));

    let mut fixed: f64 = 0.0;
    let mut monotone = true;
    let mut prev: Option<(f64, f64)> = None;
    for lambda in [1e-3, 1e-2, 1e-1, 1.0, 10.0, 100.0] {
        let opt = optimal_control_quadratic(&p, lambda, &x1).during("optimal_control_quadratic")?;
        let qb = opt.trajectory.endpoint();
        let free = p.apply_s(1.0, p.x0()).during("apply_s")?;
        for k in 0..16 {
            let rhs = free.coeffs()[k] - gram.entries()[k] / lambda * (qb.coeffs()[k] - x1.coeffs()[k]);
            fixed = fixed.max((qb.coeffs()[k] - rhs).abs());
        }
        if let Some((miss, energy)) = prev {
            monotone &= opt.endpoint_miss >= miss && opt.control.energy() <= energy;
        }
        prev = Some((opt.endpoint_miss, opt.control.energy()));
    }
    out.push(check("linctl.optimal_fixed_point", "linctl", fixed, 1e-5, "q(b) = Sx₀ − R(b)(q(b) − x_b)/λ"));
    out.push(check("linctl.lambda_monotone", "linctl", flag(monotone), 0.0, "miss up, energy down in λ"));
    Ok(convention)
}

/// The full suite. The sign convention that satisfies L(ρ) = ξ is returned
/// alongside the checks.
pub fn run_suite() -> Result<(Vec<Check>, SignConvention), LabError> {
    let mut out = Vec::new();
    specfn_checks(&mut out)?;
    psicalc_checks(&mut out)?;
    spectral_checks(&mut out)?;
    let convention = linctl_checks(&mut out)?;
    for c in &out {
        if c.passed() {
            log::info!("[PASS] {} {:e} <= {:e}", c.id, c.measured, c.tolerance);
        } else {
            log::error!("[FAIL] {} {:e} > {:e}", c.id, c.measured, c.tolerance);
        }
    }
    Ok((out, convention))
}
