//! Experiment orchestration: one function per run kind, each producing a
//! report table, a summary block and plot series.

use std::fs;
use std::path::{Path, PathBuf};

use hilfer_core::inclusion::{fixed_point_solve, inclusion_eps_sweep, MultimapSpec, SolverOptions};
use hilfer_core::linctl::{eps_sweep, gramian, optimal_control_quadratic, target_defect, SweepRow};
use hilfer_core::probctl::{feasible_search_with, ConstraintSpec, RunningCostSpec, SearchOptions};
use hilfer_core::spectral::Forcing;
use serde_json::{json, Map, Value as Json};

use crate::config::{ExperimentConfig, Format, RunKind};
use crate::error::{Context, LabError};
use crate::report::{write, Meta, Report, Series, Table};
use crate::verify::run_suite;

pub const SWEEP_COLUMNS: [&str; 10] = [
    "eps",
    "log10_eps",
    "endpoint_miss",
    "log10_miss",
    "closed_form_miss",
    "mode_gap",
    "energy",
    "iterations",
    "converged",
    "residual",
];

/// Everything a run produced, already written to `dir`.
#[derive(Clone, Debug)]
pub struct RunOutput {
    pub report: Report,
    pub series: Vec<Series>,
    pub dir: PathBuf,
    /// False only when a verify check failed.
    pub passed: bool,
}

fn summary(pairs: Vec<(&str, Json)>) -> Map<String, Json> {
    pairs.into_iter().map(|(k, v)| (k.to_string(), v)).collect()
}

/// Rows sorted by ε descending; non-converged rows are dropped.
fn sweep_table(rows: &[SweepRow]) -> Table {
    let mut rows: Vec<&SweepRow> = rows.iter().filter(|r| r.converged).collect();
    rows.sort_by(|a, b| b.eps.total_cmp(&a.eps));
    let mut t = Table::new(&SWEEP_COLUMNS);
    for r in rows {
        t.push(vec![
            r.eps.into(),
            r.eps.log10().into(),
            r.endpoint_miss.into(),
            r.endpoint_miss.log10().into(),
            r.closed_form_miss.into(),
            r.mode_gap.into(),
            r.energy.into(),
            r.iterations.into(),
            r.converged.into(),
            r.residual.into(),
        ]);
    }
    t
}

fn miss_series(rows: &[SweepRow]) -> Vec<Series> {
    vec![
        Series::new("miss", "eps", "endpoint_miss", rows.iter().map(|r| (r.eps, r.endpoint_miss)).collect()),
        Series::new("closed_form_miss", "eps", "closed_form_miss", rows.iter().map(|r| (r.eps, r.closed_form_miss)).collect()),
    ]
}

fn run_verify() -> Result<(Table, Map<String, Json>, Vec<Series>, bool), LabError> {
    let (checks, convention) = run_suite()?;
    let mut t = Table::new(&["id", "module", "measured", "tolerance", "passed", "note"]);
    for c in &checks {
        t.push(vec![c.id.into(), c.module.into(), c.measured.into(), c.tolerance.into(), c.passed().into(), c.note.as_str().into()]);
    }
    let failed: Vec<&str> = checks.iter().filter(|c| !c.passed()).map(|c| c.id).collect();
    let passed = failed.is_empty();
    let s = summary(vec![
        ("checks", json!(checks.len())),
        ("failed", json!(failed)),
        ("sign_convention", json!(convention.name())),
    ]);
    Ok((t, s, Vec::new(), passed))
}

fn run_sweep(cfg: &ExperimentConfig) -> Result<(Table, Map<String, Json>, Vec<Series>), LabError> {
    let problem = cfg.problem()?;
    let x1 = cfg.target()?;
    let rep = eps_sweep(&problem, &Forcing::Zero, &x1, &cfg.eps_list).during("eps_sweep")?;
    let gram = gramian(&problem, cfg.quad_tol).during("gramian")?;
    let defect = target_defect(&problem, &Forcing::Zero, &x1).during("target_defect")?;
    let last = rep.rows.last().expect("nonempty eps list");
    let s = summary(vec![
        ("defect_norm", json!(defect.norm())),
        ("gramian_min", json!(gram.entries().iter().copied().fold(f64::INFINITY, f64::min))),
        ("gramian_max", json!(gram.entries().iter().copied().fold(0.0, f64::max))),
        ("closed_form_strictly_decreasing", json!(rep.closed_form_strictly_decreasing())),
        ("final_eps", json!(last.eps)),
        ("final_miss_over_defect", json!(last.closed_form_miss / defect.norm())),
        ("max_mode_gap", json!(rep.rows.iter().map(|r| r.mode_gap).fold(0.0, f64::max))),
    ]);
    Ok((sweep_table(&rep.rows), s, miss_series(&rep.rows)))
}

fn run_optimal(cfg: &ExperimentConfig) -> Result<(Table, Map<String, Json>, Vec<Series>), LabError> {
    let problem = cfg.problem()?;
    let xb = cfg.target()?;
    let free = problem.apply_s(problem.psi().span(), problem.x0()).during("apply_s")?;
    let mut t = Table::new(&["lambda", "log10_lambda", "endpoint_miss", "energy", "cost", "fixed_point_gap"]);
    let mut miss = Vec::new();
    let mut energy = Vec::new();
    for &lambda in &cfg.lambda_list {
        let opt = optimal_control_quadratic(&problem, lambda, &xb).during("optimal_control_quadratic")?;
        let qb = opt.trajectory.endpoint();
        let gap = (0..problem.n_modes())
            .map(|k| {
                let rhs = free.coeffs()[k] - opt.gramian.entries()[k] / lambda * (qb.coeffs()[k] - xb.coeffs()[k]);
                (qb.coeffs()[k] - rhs).abs()
            })
            .fold(0.0, f64::max);
        t.push(vec![
            lambda.into(),
            lambda.log10().into(),
            opt.endpoint_miss.into(),
            opt.control.energy().into(),
            opt.cost.into(),
            gap.into(),
        ]);
        miss.push((lambda, opt.endpoint_miss));
        energy.push((lambda, opt.control.energy()));
    }
    let opt = optimal_control_quadratic(&problem, cfg.lambda, &xb).during("optimal_control_quadratic")?;
    let monotone = miss.windows(2).all(|w| w[1].1 >= w[0].1) && energy.windows(2).all(|w| w[1].1 <= w[0].1);
    let s = summary(vec![
        ("lambda", json!(cfg.lambda)),
        ("cost", json!(opt.cost)),
        ("endpoint_miss", json!(opt.endpoint_miss)),
        ("energy", json!(opt.control.energy())),
        ("lambda_monotone", json!(monotone)),
    ]);
    let series = vec![
        Series::new("lambda_miss", "lambda", "endpoint_miss", miss),
        Series::new("lambda_energy", "lambda", "energy", energy),
        Series::new(
            "optimal_weighted_state",
            "t",
            "weighted_norm",
            opt.trajectory.grid().iter().enumerate().map(|(i, &t)| (t, opt.trajectory.weighted_state(i).norm())).collect(),
        ),
    ];
    Ok((t, s, series))
}

fn run_inclusion(cfg: &ExperimentConfig) -> Result<(Table, Map<String, Json>, Vec<Series>), LabError> {
    let problem = cfg.problem()?;
    let x1 = cfg.target()?;
    let spec = MultimapSpec::default_instance();
    let options = SolverOptions { max_iter: cfg.max_iter, tol: cfg.fixed_point_tol, grid_size: cfg.grid_size, ..SolverOptions::default() };
    let strategy = cfg.strategy.selection();
    let rep = inclusion_eps_sweep(&problem, &spec, strategy, &x1, &cfg.eps_list, &options).during("inclusion_eps_sweep")?;
    let eps = *cfg.eps_list.last().unwrap();
    let fp = fixed_point_solve(&problem, &spec, strategy, &x1, eps, &options).during("fixed_point_solve")?;
    let s = summary(vec![
        ("strategy", json!(strategy.name())),
        ("all_converged", json!(rep.rows.iter().all(|r| r.converged))),
        ("max_residual", json!(rep.rows.iter().map(|r| r.residual).fold(0.0, f64::max))),
        ("miss_decreasing", json!(rep.rows.windows(2).all(|w| w[1].endpoint_miss < w[0].endpoint_miss))),
        ("selection_ratio", json!(fp.selection_ratio)),
        ("weighted_limit_ok", json!(fp.weighted_limit_ok)),
        ("final_damping", json!(fp.damping)),
    ]);
    let mut series = miss_series(&rep.rows);
    series.push(Series::new(
        "residual",
        "iteration",
        "distance",
        fp.history.iter().enumerate().map(|(i, d)| ((i + 1) as f64, *d)).collect(),
    ));
    Ok((sweep_table(&rep.rows), s, series))
}

pub const PROBLEM1_COLUMNS: [&str; 8] =
    ["candidate_id", "feasibility_rounds", "cost", "feasible", "accepted", "running_best", "weighted_norm", "control_l2"];

fn run_problem1(cfg: &ExperimentConfig) -> Result<(Table, Map<String, Json>, Vec<Series>), LabError> {
    let problem = cfg.problem()?;
    let cspec = ConstraintSpec::new(cfg.kappa, cfg.rho0).during("constraint spec")?;
    let hspec = RunningCostSpec::default_form();
    let options = SearchOptions { n_candidates: cfg.n_candidates, seed: cfg.seed, grid_size: cfg.search_grid, ..SearchOptions::default() };
    let res = feasible_search_with(&problem, &cspec, &hspec, &options).during("feasible_search")?;
    let mut t = Table::new(&PROBLEM1_COLUMNS);
    for r in &res.history {
        t.push(vec![
            r.candidate_id.into(),
            r.feasibility_rounds.into(),
            r.cost.into(),
            r.feasible.into(),
            r.accepted.into(),
            r.running_best.into(),
            r.weighted_norm.into(),
            r.control_l2.into(),
        ]);
    }
    let s = summary(vec![
        ("history_digest", json!(hex::encode(res.digest))),
        ("best_candidate", json!(res.best_candidate)),
        ("best_cost", json!(res.cost)),
        ("feasibility_defect", json!(res.defect)),
        ("m0", json!(res.a_priori.m0)),
        ("n0", json!(res.a_priori.n0)),
        ("max_weighted_norm", json!(res.a_priori.max_weighted_norm)),
        ("max_control_l2", json!(res.a_priori.max_control_l2)),
        ("a_priori_holds", json!(res.a_priori.holds())),
        ("c_u", json!(cspec.c_u())),
    ]);
    let series = vec![Series::new(
        "running_best",
        "candidate_id",
        "running_best",
        res.history.iter().map(|r| (r.candidate_id as f64, r.running_best)).collect(),
    )];
    Ok((t, s, series))
}

/// Directory that holds the artifacts of one run kind.
pub fn run_dir(cfg: &ExperimentConfig) -> PathBuf {
    cfg.out.join(cfg.run.name())
}

pub fn write_artifacts(dir: &Path, formats: &[Format], report: &Report, series: &[Series]) -> Result<(), LabError> {
    fs::create_dir_all(dir).map_err(|e| LabError::io(dir, e))?;
    if formats.contains(&Format::Csv) {
        write(&dir.join("report.csv"), &report.table.to_csv()?)?;
        for s in series {
            write(&dir.join(s.file_name()), &s.to_table().to_csv()?)?;
        }
    }
    if formats.contains(&Format::Json) {
        write(&dir.join("report.json"), &report.to_json())?;
    }
    Ok(())
}

/// Runs the configured experiment and writes its artifacts under
/// `<out>/<run>/`. A failed verify check yields `passed = false`.
pub fn run_experiment(cfg: &ExperimentConfig) -> Result<RunOutput, LabError> {
    cfg.validate()?;
    log::info!("running {} (config {})", cfg.run.name(), cfg.digest());
    let (table, summary, series, passed) = match cfg.run {
        RunKind::Verify => run_verify()?,
        RunKind::Sweep => with_pass(run_sweep(cfg)?),
        RunKind::Optimal => with_pass(run_optimal(cfg)?),
        RunKind::Inclusion => with_pass(run_inclusion(cfg)?),
        RunKind::Problem1 => with_pass(run_problem1(cfg)?),
    };
    let report = Report { meta: Meta::now(cfg.run.name(), cfg.digest(), cfg.seed), summary, table };
    let dir = run_dir(cfg);
    write_artifacts(&dir, &cfg.formats, &report, &series)?;
    log::info!("wrote {}", dir.display());
    Ok(RunOutput { report, series, dir, passed })
}

fn with_pass((t, s, series): (Table, Map<String, Json>, Vec<Series>)) -> (Table, Map<String, Json>, Vec<Series>, bool) {
    (t, s, series, true)
}

/// Reads a CSV written by this crate.
pub fn read_table(path: &Path) -> Result<Table, LabError> {
    let text = fs::read_to_string(path).map_err(|e| LabError::io(path, e))?;
    Table::from_csv(&text)
}
