//! Acceptance suite. One line per criterion; exits nonzero on any failure.

use std::process::ExitCode;
use std::time::Instant;

use hilfer_core::inclusion::{fixed_point_solve, inclusion_eps_sweep, MultimapSpec, SelectionStrategy, SolverOptions};
use hilfer_core::linctl::{
    eps_sweep, gramian, optimal_control_quadratic, quadratic_cost, verify_l_rho, ControlFunction, SignConvention, DEFAULT_EPS,
};
use hilfer_core::probctl::{feasible_search, max_feasibility_defect, ConstraintSpec, RunningCostSpec};
use hilfer_core::psicalc::{FracOrder, PsiFunction, PsiKind};
use hilfer_core::spectral::{mild_solution, EvolutionProblem, Forcing, SpectralState};
use hilfer_lab::config::ExperimentConfig;
use hilfer_lab::verify::{bridge_error, run_suite, Check};
use hilfer_lab::{run_experiment, LabError};
use rand::{Rng, SeedableRng};

type Outcome = Result<(bool, String), String>;

fn parabola(n: usize) -> SpectralState {
    let w = (2.0 / std::f64::consts::PI).sqrt();
    SpectralState::new((1..=n).map(|k| w * 2.0 * (1.0 - (-1f64).powi(k as i32)) / (k as f64).powi(3)).collect()).unwrap()
}

fn linear() -> PsiFunction {
    PsiFunction::linear(0.0, 1.0).unwrap()
}

fn clocks() -> Vec<PsiFunction> {
    vec![
        linear(),
        PsiFunction::new(PsiKind::Power, &[2.0], 0.0, 1.0).unwrap(),
        PsiFunction::new(PsiKind::Logarithmic, &[1.0], 0.0, 1.0).unwrap(),
    ]
}

fn problem(psi: PsiFunction, alpha: f64, beta: f64, n: usize) -> EvolutionProblem {
    EvolutionProblem::new(psi, FracOrder::new(alpha, beta).unwrap(), parabola(n)).unwrap()
}

fn text<E: std::fmt::Display>(e: E) -> String {
    e.to_string()
}

fn suite_checks(checks: &[Check], ids: &[&str]) -> (bool, String) {
    let mut ok = true;
    let mut parts = Vec::new();
    for id in ids {
        match checks.iter().find(|c| c.id == *id) {
            Some(c) => {
                ok &= c.passed();
                parts.push(format!("{}={:.2e}/{:.0e}", id.split('.').nth(1).unwrap_or(id), c.measured, c.tolerance));
            }
            None => {
                ok = false;
                parts.push(format!("{id} missing"));
            }
        }
    }
    (ok, parts.join(" "))
}

fn bridge() -> Outcome {
    let err = bridge_error().map_err(text)?;
    Ok((err <= 1e-6, format!("max error {err:.3e} over 24 points (tol 1e-6)")))
}

fn psi_calculus(checks: &[Check]) -> Outcome {
    Ok(suite_checks(
        checks,
        &["psicalc.power_rule", "psicalc.semigroup", "psicalc.left_inverse", "psicalc.annihilation", "psicalc.kernel_norm"],
    ))
}

fn heat_degeneracy() -> Outcome {
    let n = 32;
    let p = problem(linear(), 1.0, 0.0, n);
    let x0 = p.x0().clone();
    let grid = p.graded_grid(81);
    let traj = mild_solution(&p, &Forcing::Zero, &ControlFunction::zero(&grid, n), &grid).map_err(text)?;
    let mut mild: f64 = 0.0;
    for (i, &t) in grid.iter().enumerate() {
        for k in 0..n {
            let lam = ((k + 1) * (k + 1)) as f64;
            mild = mild.max((traj.states()[i].coeffs()[k] - (-lam * t).exp() * x0.coeffs()[k]).abs());
        }
    }
    let gram = gramian(&p, 1e-12).map_err(text)?;
    let mut gram_err: f64 = 0.0;
    for (k, r) in gram.entries().iter().enumerate() {
        let lam = ((k + 1) * (k + 1)) as f64;
        gram_err = gram_err.max((r - (1.0 - (-2.0 * lam).exp()) / (2.0 * lam)).abs());
    }
    let x1 = SpectralState::basis(n, 1).scaled(0.5);
    let eps = [1.0, 0.1, 0.01];
    let rep = eps_sweep(&p, &Forcing::Zero, &x1, &eps).map_err(text)?;
    let mut endpoint: f64 = 0.0;
    for row in &rep.rows {
        let exact: f64 = (0..n)
            .map(|k| {
                let lam = ((k + 1) * (k + 1)) as f64;
                let r = (1.0 - (-2.0 * lam).exp()) / (2.0 * lam);
                let defect = x1.coeffs()[k] - (-lam).exp() * x0.coeffs()[k];
                (row.eps / (row.eps + r) * defect).powi(2)
            })
            .sum::<f64>()
            .sqrt();
        endpoint = endpoint.max((row.endpoint_miss - exact).abs()).max((row.closed_form_miss - exact).abs()).max(row.mode_gap);
    }
    let worst = mild.max(gram_err).max(endpoint);
    Ok((worst <= 1e-8, format!("mild {mild:.2e}, gramian {gram_err:.2e}, endpoint {endpoint:.2e} (tol 1e-8)")))
}

fn step_v() -> Outcome {
    let x1 = SpectralState::basis(32, 1).scaled(0.5);
    let mut gap: f64 = 0.0;
    for psi in clocks() {
        for alpha in [0.6, 0.75, 0.9] {
            let p = problem(psi.clone(), alpha, 0.5, 32);
            let rep = eps_sweep(&p, &Forcing::Zero, &x1, &[1.0, 0.1, 0.01]).map_err(text)?;
            gap = rep.rows.iter().fold(gap, |g, r| g.max(r.mode_gap));
        }
    }
    Ok((gap <= 1e-5, format!("max per-mode gap {gap:.3e} over 27 cases (tol 1e-5)")))
}

fn convergence() -> Outcome {
    let cfg = ExperimentConfig::default();
    let p = cfg.problem().map_err(text)?;
    let x1 = cfg.target().map_err(text)?;
    let rep = eps_sweep(&p, &Forcing::Zero, &x1, &DEFAULT_EPS).map_err(text)?;
    let defect = hilfer_core::linctl::target_defect(&p, &Forcing::Zero, &x1).map_err(text)?;
    let gram = gramian(&p, 1e-12).map_err(text)?;
    let positive = gram.entries().iter().all(|r| *r > 0.0 && r.is_finite());
    let last = rep.rows.last().ok_or("empty sweep")?;
    let ratio = last.closed_form_miss / defect.norm();
    let decreasing = rep.closed_form_strictly_decreasing();
    Ok((
        positive && decreasing && ratio < 0.05,
        format!("strictly decreasing {decreasing}, r_n > 0 {positive}, miss/‖N‖ at ε=1e-3 {ratio:.4} (tol 0.05)"),
    ))
}

fn witness(checks: &[Check]) -> Outcome {
    let mut arg = Vec::new();
    let mut chain = Vec::new();
    for alpha in [1.0, 0.75, 0.6] {
        let q = EvolutionProblem::new(linear(), FracOrder::new(alpha, 0.3).unwrap(), SpectralState::zeros(8)).map_err(text)?;
        let xi = parabola(8);
        arg.push(verify_l_rho(&q, &xi, 1.0, SignConvention::Argument).map_err(text)?);
        chain.push(verify_l_rho(&q, &xi, 1.0, SignConvention::ChainRule).map_err(text)?);
    }
    let pick = |v: &[f64]| v[0] <= 1e-6 && v[1] <= 1e-3 && v[2] <= 1e-3;
    let convention = if pick(&arg) {
        Some(SignConvention::Argument)
    } else if pick(&chain) {
        Some(SignConvention::ChainRule)
    } else {
        None
    };
    let (suite_ok, _) = suite_checks(checks, &["linctl.l_rho_unit_order", "linctl.l_rho"]);
    let name = convention.map_or("none", |c| c.name());
    Ok((
        convention.is_some() && suite_ok,
        format!(
            "convention {name}; argument {:.2e}/{:.2e}/{:.2e}, chain rule {:.2e}/{:.2e}/{:.2e} at α=1/0.75/0.6",
            arg[0], arg[1], arg[2], chain[0], chain[1], chain[2]
        ),
    ))
}

fn optimal_control(checks: &[Check]) -> Outcome {
    let n = 8;
    let p = problem(linear(), 0.75, 0.5, n);
    let xb = SpectralState::basis(n, 1).scaled(0.5);
    let lambda = 1e-2;
    let opt = optimal_control_quadratic(&p, lambda, &xb).map_err(text)?;
    let base = quadratic_cost(&p, lambda, &xb, &opt.control).map_err(text)?;
    let grid = opt.control.grid().to_vec();
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(20);
    let mut worst = f64::INFINITY;
    for _ in 0..20 {
        let values = grid
            .iter()
            .map(|_| SpectralState::new((0..n).map(|_| rng.gen_range(-1.0..1.0)).collect()))
            .collect::<Result<Vec<_>, _>>()
            .map_err(text)?;
        let raw = ControlFunction::sampled(grid.clone(), values).map_err(text)?;
        let unit = ControlFunction::combine(&p, &[(1.0 / raw.energy().sqrt(), &raw)]).map_err(text)?;
        let unit = ControlFunction::combine(&p, &[(1.0 / unit.energy().sqrt(), &unit)]).map_err(text)?;
        for h in [1e-3, -1e-3] {
            let moved = ControlFunction::combine(&p, &[(1.0, &opt.control), (h, &unit)]).map_err(text)?;
            worst = worst.min(quadratic_cost(&p, lambda, &xb, &moved).map_err(text)? - base);
        }
    }
    let variation = worst >= -1e-8;
    let (suite_ok, detail) = suite_checks(checks, &["linctl.optimal_fixed_point", "linctl.lambda_monotone"]);
    Ok((variation && suite_ok, format!("min ΔJ over 40 moves {worst:.3e} (tol -1e-8); {detail}")))
}

fn inclusion() -> Outcome {
    let x1 = SpectralState::basis(32, 1).scaled(0.5);
    let p = problem(linear(), 0.75, 0.5, 32);
    let options = SolverOptions::default();

    let lin = eps_sweep(&p, &Forcing::Zero, &x1, &[1.0, 0.1, 0.01]).map_err(text)?;
    let zero = inclusion_eps_sweep(&p, &MultimapSpec::zero(), SelectionStrategy::Midpoint, &x1, &[1.0, 0.1, 0.01], &options)
        .map_err(text)?;
    let zero_gap = lin
        .rows
        .iter()
        .zip(&zero.rows)
        .map(|(a, b)| (a.closed_form_miss - b.endpoint_miss).abs().max(b.mode_gap).max((a.energy - b.energy).abs()))
        .fold(0.0, f64::max);

    let spec = MultimapSpec::default_instance();
    let mut ok = zero_gap <= 1e-6;
    let mut parts = vec![format!("F≡0 gap {zero_gap:.2e}")];
    for strategy in [SelectionStrategy::Midpoint, SelectionStrategy::Switch] {
        let mut residual: f64 = 0.0;
        let mut ratio: f64 = 0.0;
        let mut misses = Vec::new();
        let mut converged = true;
        for &eps in &DEFAULT_EPS {
            let fp = fixed_point_solve(&p, &spec, strategy, &x1, eps, &options).map_err(text)?;
            converged &= fp.converged;
            residual = residual.max(fp.residual);
            ratio = ratio.max(fp.selection_ratio);
            misses.push(fp.trajectory.endpoint().distance(&x1));
        }
        let decreasing = misses.windows(2).all(|w| w[1] < w[0]);
        ok &= converged && residual <= 1e-4 && decreasing && ratio <= 1.0;
        parts.push(format!(
            "{}: residual {residual:.2e}, miss decreasing {decreasing}, selection ratio {ratio:.3}",
            strategy.name()
        ));
    }
    Ok((ok, parts.join("; ")))
}

fn problem_one() -> Outcome {
    let dir = tempfile::tempdir().map_err(text)?;
    let cfg = ExperimentConfig::from_json(&format!(r#"{{"run": "problem1", "seed": 11, "out": {:?}}}"#, dir.path())).map_err(text)?;
    let first = run_experiment(&cfg).map_err(text)?;
    let again = run_experiment(&cfg).map_err(text)?;
    let digest = |o: &hilfer_lab::RunOutput| o.report.summary.get("history_digest").and_then(|v| v.as_str()).map(String::from);
    let same = digest(&first).is_some() && digest(&first) == digest(&again) && first.report.table == again.report.table;

    let p = cfg.problem().map_err(text)?;
    let cspec = ConstraintSpec::new(cfg.kappa, cfg.rho0).map_err(text)?;
    let res = feasible_search(&p, &cspec, &RunningCostSpec::default_form(), cfg.n_candidates, cfg.seed).map_err(text)?;
    let defect = max_feasibility_defect(&cspec, &res.trajectory, &res.control).map_err(text)?.max(res.defect);
    let holds = res.a_priori.holds();
    Ok((
        defect <= 1e-6 && holds && same,
        format!(
            "defect {defect:.2e} (tol 1e-6), a-priori {holds} (‖x‖ {:.3} ≤ {:.3}, ‖u‖ {:.3} ≤ {:.3}), digest stable {same}",
            res.a_priori.max_weighted_norm, res.a_priori.m0, res.a_priori.max_control_l2, res.a_priori.n0
        ),
    ))
}

fn gate() -> Outcome {
    let mut ok = true;
    let mut parts = Vec::new();
    for alpha in [0.4, 0.5] {
        match ExperimentConfig::from_json(&format!(r#"{{"alpha": {alpha}}}"#)) {
            Err(e @ LabError::Validation { .. }) => {
                let msg = e.to_string();
                let cited = msg.contains("alpha must exceed 0.5") && msg.contains("square integrable");
                ok &= cited;
                parts.push(format!("α={alpha} rejected (diagnostic cited {cited})"));
            }
            Err(e) => {
                ok = false;
                parts.push(format!("α={alpha} wrong error: {e}"));
            }
            Ok(_) => {
                ok = false;
                parts.push(format!("α={alpha} accepted"));
            }
        }
    }
    let dir = tempfile::tempdir().map_err(text)?;
    let cfg = ExperimentConfig::from_json(&format!(r#"{{"run": "sweep", "alpha": 0.51, "out": {:?}}}"#, dir.path())).map_err(text)?;
    let out = run_experiment(&cfg).map_err(text)?;
    let get = |k: &str| out.report.summary.get(k).and_then(|v| v.as_f64()).unwrap_or(f64::NAN);
    let (lo, hi) = (get("gramian_min"), get("gramian_max"));
    let finite = lo > 0.0 && hi.is_finite() && !out.report.table.rows.is_empty();
    ok &= finite;
    parts.push(format!("α=0.51 sweep ran, gramian in [{lo:.3e}, {hi:.3e}]"));
    Ok((ok, parts.join("; ")))
}

fn main() -> ExitCode {
    let start = Instant::now();
    let suite = run_suite();
    let checks = match &suite {
        Ok((c, _)) => c.clone(),
        Err(e) => {
            println!("[FAIL] verify suite did not run: {e}");
            Vec::new()
        }
    };
    let criteria: Vec<(&str, Box<dyn Fn() -> Outcome + '_>)> = vec![
        ("special-function bridge", Box::new(bridge)),
        ("psi-calculus oracles", Box::new(|| psi_calculus(&checks))),
        ("classical heat degeneracy", Box::new(heat_degeneracy)),
        ("endpoint-miss identity", Box::new(step_v)),
        ("approximate-controllability convergence", Box::new(convergence)),
        ("L(rho) witness", Box::new(|| witness(&checks))),
        ("optimal control", Box::new(|| optimal_control(&checks))),
        ("inclusion solver", Box::new(inclusion)),
        ("state-constrained search", Box::new(problem_one)),
        ("order gate", Box::new(gate)),
    ];
    let mut failed = 0;
    for (i, (name, run)) in criteria.iter().enumerate() {
        let t = Instant::now();
        let (ok, detail) = run().unwrap_or_else(|e| (false, format!("error: {e}")));
        failed += usize::from(!ok);
        println!("[{}] {} {name}: {detail} ({:.1}s)", if ok { "PASS" } else { "FAIL" }, i + 1, t.elapsed().as_secs_f64());
    }
    println!("{} of {} criteria passed in {:.1}s", criteria.len() - failed, criteria.len(), start.elapsed().as_secs_f64());
    if failed == 0 && suite.is_ok() {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
