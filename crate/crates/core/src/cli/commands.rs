use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use rayon::prelude::*;
use serde::Serialize;
use serde_json::Value;

use super::config::{ConfigFile, Resolver};
use super::output::{emit_csv, emit_json, emit_signal, SCHEMA_VERSION};
use super::*;
use crate::cantor::{build_cantor_intervals, variation_bound_check, w_integral, w_integral_limit, VariationReport};
use crate::energy::{
    curvature_term, energy_f1_discrete, energy_f1_relaxed, energy_f1_relaxed_hat, energy_fp_discrete,
    energy_fp_relaxed, membership_diagnostics, EnergyBreakdown, MembershipReport,
};
use crate::hot::{
    anti_staircase_experiment, minimize_hot, noise_family, HotConfig, HotResult, NoiseKind, DEFAULT_SWEEP_CELLS,
};
use crate::rof::{rof_monotone_minimizer, staircase_experiment, MonotoneDatum, RofError, StaircaseReport};
use crate::signals::{read_signal_csv, total_variation, DiscreteSignal, Grid, PiecewiseBVFunction};
use crate::{ExtReal, WeightFunction};

type Config = BTreeMap<String, Value>;

#[derive(Serialize)]
struct Record<'a, T: Serialize> {
    schema: u32,
    command: &'a str,
    config: &'a Config,
    result: T,
}

fn emit<T: Serialize>(out: Option<&Path>, command: &str, config: &Config, result: T) -> Result<(), CliError> {
    emit_json(
        out,
        &Record {
            schema: SCHEMA_VERSION,
            command,
            config,
            result,
        },
    )
}

fn invalid(msg: impl Into<String>) -> CliError {
    CliError::Validation(msg.into())
}

fn rof_err(e: RofError) -> CliError {
    match e {
        RofError::Unsatisfiable { .. } | RofError::StaircaseLambda(_) => CliError::Numerical(e.to_string()),
        _ => CliError::Validation(e.to_string()),
    }
}

fn positive(name: &str, v: f64) -> Result<f64, CliError> {
    if v.is_finite() && v > 0.0 {
        Ok(v)
    } else {
        Err(invalid(format!("{name} must be positive and finite, got {v}")))
    }
}

fn weight(alpha: f64, p: f64) -> Result<WeightFunction, CliError> {
    WeightFunction::builtin(alpha, p).map_err(|e| invalid(e.to_string()))
}

fn read_csv(path: &Path) -> Result<DiscreteSignal, CliError> {
    let f = std::fs::File::open(path).map_err(|e| invalid(format!("{}: {e}", path.display())))?;
    read_signal_csv(f).map_err(|e| invalid(format!("{}: {e}", path.display())))
}

pub(super) fn dispatch(cli: Cli) -> Result<(), CliError> {
    let file = match &cli.config {
        Some(p) => ConfigFile::load(p)?,
        None => ConfigFile::default(),
    };
    let mut r = Resolver::new(file);
    let jobs = r.get_opt("jobs", cli.jobs)?;
    let mut pool = rayon::ThreadPoolBuilder::new();
    match jobs {
        Some(0) => return Err(invalid("jobs must be at least 1")),
        Some(j) => pool = pool.num_threads(j),
        None => {}
    }
    let pool = pool.build().map_err(|e| CliError::Io(e.to_string()))?;
    pool.install(|| match cli.command {
        Command::RofExact(a) => rof_exact(a, r),
        Command::RofStaircase(a) => rof_staircase(a, r),
        Command::HotDenoise(a) => hot_denoise(a, r),
        Command::EnergyEval(a) => energy_eval(a, r),
        Command::CantorFixture(a) => cantor_fixture(a, r),
        Command::Compare(a) => compare(a, r),
    })
}

#[derive(Serialize)]
struct RofRecord {
    lambda: f64,
    /// Steps of the staircase datum.
    n: Option<usize>,
    c1: f64,
    c2: f64,
    a_n: f64,
    b_n: f64,
    /// Distance of the window ends from `1/√λ`, `1 − 1/√λ` (built-in data).
    err_a: Option<f64>,
    err_b: Option<f64>,
    max_dev: f64,
}

fn rof_exact(a: RofExactArgs, mut r: Resolver) -> Result<(), CliError> {
    let lambda = r.get("lambda", a.lambda, 9.0)?;
    let kind = r.get("datum", a.datum, DatumKind::Ramp)?;
    let n = r.get("n", a.n, 10usize)?;
    let input = r.get_opt::<PathBuf>("input", a.input)?;
    let cells = r.get("cells", a.cells, 1000usize)?;
    let out = r.get_opt::<PathBuf>("out", a.out)?;
    let csv = r.get_opt::<PathBuf>("csv", a.csv)?;
    let config = r.finish()?;
    positive("lambda", lambda)?;

    let (datum, grid, steps) = match &input {
        Some(p) => {
            let s = read_csv(p)?;
            if s.values().windows(2).any(|w| w[1] < w[0]) {
                return Err(invalid(format!("{}: datum must be nondecreasing", p.display())));
            }
            (interpolant(&s), *s.grid(), None)
        }
        None => {
            let grid = Grid::unit(cells).map_err(|e| invalid(e.to_string()))?;
            match kind {
                DatumKind::Ramp => (MonotoneDatum::unit_ramp(), grid, None),
                DatumKind::Staircase => (MonotoneDatum::staircase(n).map_err(rof_err)?, grid, Some(n)),
            }
        }
    };
    let sol = rof_monotone_minimizer(&datum, lambda).map_err(rof_err)?;
    let u = sol.sample(&datum, &grid);
    let g = datum.sample(&grid);
    let max_dev = grid
        .nodes()
        .zip(u.values().iter().zip(g.values()))
        .filter(|(x, _)| *x > sol.x_low && *x <= sol.x_high)
        .map(|(_, (a, b))| (a - b).abs())
        .fold(0.0, f64::max);
    let reference = input.is_none().then(|| 1.0 / lambda.sqrt());
    let record = RofRecord {
        lambda,
        n: steps,
        c1: sol.c1,
        c2: sol.c2,
        a_n: sol.x_low,
        b_n: sol.x_high,
        err_a: reference.map(|t| (sol.x_low - t).abs()),
        err_b: reference.map(|t| (sol.x_high - (1.0 - t)).abs()),
        max_dev,
    };
    if let Some(p) = &csv {
        emit_signal(p, &u)?;
    }
    emit(out.as_deref(), "rof-exact", &config, record)
}

/// Piecewise-linear interpolant of nondecreasing samples.
fn interpolant(s: &DiscreteSignal) -> MonotoneDatum {
    let grid = *s.grid();
    let vals = s.values().to_vec();
    MonotoneDatum::custom(grid.a(), grid.b(), move |x| {
        let t = ((x - grid.a()) / grid.spacing()).clamp(0.0, grid.cells() as f64);
        let i = (t.floor() as usize).min(grid.cells() - 1);
        let f = t - i as f64;
        vals[i] + f * (vals[i + 1] - vals[i])
    })
}

fn rof_staircase(a: RofStaircaseArgs, mut r: Resolver) -> Result<(), CliError> {
    let lambda = r.get("lambda", a.lambda, 9.0)?;
    let n = r.get("n", a.n, 100usize)?;
    let mut n_list = r.get_list("n_list", a.n_list, vec![n])?;
    let out = r.get_opt::<PathBuf>("out", a.out)?;
    let csv = r.get_opt::<PathBuf>("csv", a.csv)?;
    let config = r.finish()?;
    positive("lambda", lambda)?;
    if n_list.is_empty() || n_list.contains(&0) {
        return Err(invalid("step counts must be positive"));
    }
    if csv.is_some() && n_list.len() > 1 {
        return Err(invalid("--csv needs a single n"));
    }
    n_list.sort_unstable();
    n_list.dedup();

    let mut reports = n_list
        .par_iter()
        .map(|&n| staircase_experiment(n, lambda))
        .collect::<Result<Vec<StaircaseReport>, _>>()
        .map_err(rof_err)?;
    reports.sort_by_key(|r| r.n);
    if let (Some(p), Some(rep)) = (&csv, reports.first()) {
        let datum = MonotoneDatum::staircase(rep.n).map_err(rof_err)?;
        let sol = rof_monotone_minimizer(&datum, lambda).map_err(rof_err)?;
        let grid = Grid::unit(rep.grid_cells).map_err(|e| invalid(e.to_string()))?;
        emit_signal(p, &sol.sample(&datum, &grid))?;
    }
    emit(out.as_deref(), "rof-staircase", &config, reports)
}

fn hot_denoise(a: HotDenoiseArgs, mut r: Resolver) -> Result<(), CliError> {
    let lambda = r.get("lambda", a.lambda, 9.0)?;
    let p = r.get("p", a.p, 1.0)?;
    let alpha = r.get("alpha", a.alpha, 2.0)?;
    let n = r.get("n", a.n, 50usize)?;
    let noise = r.get("noise", a.noise, NoiseArg::Staircase)?;
    let amplitude = r.get("amplitude", a.amplitude, 0.05)?;
    let cells = r.get("cells", a.cells, 800usize)?;
    let input = r.get_opt::<PathBuf>("input", a.input)?;
    let eps_abs = r.get_opt("eps_abs", a.eps_abs)?;
    let max_iters = r.get("max_iters", a.max_iters, HotConfig::DEFAULT_MAX_ITERS)?;
    let grad_tol = r.get("grad_tol", a.grad_tol, HotConfig::DEFAULT_GRAD_TOL)?;
    let energy_rel_tol = r.get("energy_rel_tol", a.energy_rel_tol, HotConfig::DEFAULT_ENERGY_REL_TOL)?;
    let out = r.get_opt::<PathBuf>("out", a.out)?;
    let csv = r.get_opt::<PathBuf>("csv", a.csv)?;
    let mut config = r.finish()?;

    let g = match &input {
        Some(path) => read_csv(path)?,
        None => {
            let grid = Grid::unit(cells).map_err(|e| invalid(e.to_string()))?;
            let ramp = DiscreteSignal::from_fn(grid, |x| x);
            let kind = match noise {
                NoiseArg::None => None,
                NoiseArg::Staircase => Some(NoiseKind::StaircaseResidual),
                NoiseArg::Square => Some(NoiseKind::SquareWave),
            };
            match kind {
                None => ramp,
                Some(k) => {
                    let h = noise_family(k, n, amplitude, &grid).map_err(|e| invalid(e.to_string()))?;
                    ramp.add(&h).map_err(|e| invalid(e.to_string()))?
                }
            }
        }
    };
    let w = weight(alpha, p)?;
    let eps = eps_abs.unwrap_or_else(|| HotConfig::default_eps(&g));
    config.insert("eps_abs".into(), serde_json::json!(eps));
    let cfg = HotConfig {
        max_iters,
        grad_tol,
        energy_rel_tol,
        ..HotConfig::new(lambda, w, eps)
    };
    cfg.validate().map_err(|e| invalid(e.to_string()))?;
    let res: HotResult = minimize_hot(&g, &cfg, None).map_err(|e| invalid(e.to_string()))?;
    if let Some(path) = &csv {
        emit_signal(path, &res.minimizer)?;
    }
    emit(out.as_deref(), "hot-denoise", &config, &res)?;
    if res.converged {
        Ok(())
    } else {
        Err(CliError::Numerical(format!(
            "no convergence after {} iterations (gradient norm {:e})",
            res.iterations, res.grad_norm_final
        )))
    }
}

#[derive(Serialize)]
struct EnergyResult {
    breakdown: EnergyBreakdown,
    #[serde(skip_serializing_if = "Option::is_none")]
    membership: Option<MembershipReport>,
}

enum EnergyInput {
    Samples(DiscreteSignal),
    Piecewise(PiecewiseBVFunction),
}

fn energy_eval(a: EnergyEvalArgs, mut r: Resolver) -> Result<(), CliError> {
    let input = r.get_opt::<PathBuf>("input", a.input)?;
    let p = r.get("p", a.p, 1.0)?;
    let alpha = r.get("alpha", a.alpha, 2.0)?;
    let mode = r.get_opt("mode", a.mode)?;
    let out = r.get_opt::<PathBuf>("out", a.out)?;
    let mut config = r.finish()?;
    let path = input.ok_or_else(|| invalid("--input is required"))?;

    let is_json = path.extension().is_some_and(|e| e.eq_ignore_ascii_case("json"));
    let data = if is_json {
        let text = std::fs::read_to_string(&path).map_err(|e| invalid(format!("{}: {e}", path.display())))?;
        EnergyInput::Piecewise(serde_json::from_str(&text).map_err(|e| invalid(format!("{}: {e}", path.display())))?)
    } else {
        EnergyInput::Samples(read_csv(&path)?)
    };
    let mode = mode.unwrap_or(if is_json { EnergyMode::Relaxed } else { EnergyMode::Discrete });
    config.insert("mode".into(), serde_json::to_value(mode).unwrap_or(Value::Null));
    let w = weight(alpha, p)?;
    let e2v = |e: crate::energy::EnergyError| invalid(e.to_string());

    let result = match mode {
        EnergyMode::Discrete => {
            let u = match data {
                EnergyInput::Samples(s) => s,
                EnergyInput::Piecewise(f) => f.to_signal(),
            };
            let total = if p == 1.0 {
                energy_f1_discrete(&u, &w)
            } else {
                energy_fp_discrete(&u, &w)
            }
            .map_err(e2v)?;
            EnergyResult {
                breakdown: EnergyBreakdown {
                    tv_term: total_variation(&u),
                    diffuse_term: curvature_term(&u, &w),
                    jump_term: 0.0,
                    total: ExtReal::Finite(total),
                },
                membership: None,
            }
        }
        EnergyMode::Relaxed | EnergyMode::RelaxedHat => {
            let f = match data {
                EnergyInput::Samples(s) => PiecewiseBVFunction::from_signal(&s),
                EnergyInput::Piecewise(f) => f,
            };
            let breakdown = match (mode, p == 1.0) {
                (EnergyMode::RelaxedHat, _) => energy_f1_relaxed_hat(&f, &w),
                (_, true) => energy_f1_relaxed(&f, &w),
                (_, false) => energy_fp_relaxed(&f, &w),
            }
            .map_err(e2v)?;
            EnergyResult {
                breakdown,
                membership: Some(membership_diagnostics(&f, &w)),
            }
        }
    };
    emit(out.as_deref(), "energy-eval", &config, result)
}

#[derive(Serialize)]
struct CantorResult {
    intervals: usize,
    remaining_measure: f64,
    /// `(2δ)^m`
    expected_remaining_measure: f64,
    w_integral: f64,
    w_integral_limit: f64,
    variation: VariationReport,
}

fn cantor_fixture(a: CantorArgs, mut r: Resolver) -> Result<(), CliError> {
    let delta = r.get("delta", a.delta, 1.0 / 16.0)?;
    let depth = r.get("depth", a.depth, 8usize)?;
    let s = r.get("s", a.s, crate::cantor::DEFAULT_GROWTH)?;
    let alpha = r.get("alpha", a.alpha, 2.0)?;
    let out = r.get_opt::<PathBuf>("out", a.out)?;
    let csv = r.get_opt::<PathBuf>("csv", a.csv)?;
    let config = r.finish()?;

    let c2v = |e: crate::cantor::CantorError| invalid(e.to_string());
    let fix = build_cantor_intervals(delta, depth).and_then(|f| f.with_growth(s)).map_err(c2v)?;
    let w = weight(alpha, 1.0)?;
    let variation = variation_bound_check(&fix, &w, depth).map_err(c2v)?;
    if let Some(p) = &csv {
        emit_csv(p, &fix.removed_intervals)?;
    }
    let within = variation.within_bound;
    let result = CantorResult {
        intervals: fix.removed_intervals.len(),
        remaining_measure: fix.remaining_measure(),
        expected_remaining_measure: (2.0 * delta).powi(depth as i32),
        w_integral: w_integral(&fix, depth).map_err(c2v)?,
        w_integral_limit: w_integral_limit(&fix).map_err(c2v)?,
        variation,
    };
    emit(out.as_deref(), "cantor-fixture", &config, result)?;
    if within {
        Ok(())
    } else {
        Err(CliError::Numerical("variation exceeds the series bound".into()))
    }
}

#[derive(Serialize)]
struct CompareRow {
    n: usize,
    lambda: f64,
    a_n: f64,
    b_n: f64,
    hot_max_abs_slope: f64,
    hot_jump_count: usize,
    hot_sup_dist_clean: f64,
    hot_energy: f64,
    hot_iterations: usize,
    hot_converged: bool,
    rof_plateau_breaks: usize,
    rof_jump_count: usize,
}

#[derive(Serialize)]
struct CompareSummary {
    lambda: f64,
    clean_max_slope: f64,
    all_converged: bool,
    no_jumps: bool,
    slope_bounded: bool,
    rof_breaks_at_least_half: bool,
    rof_detects_jumps: bool,
}

#[derive(Serialize)]
struct CompareResult {
    p: f64,
    cells: usize,
    summaries: Vec<CompareSummary>,
    rows: Vec<CompareRow>,
}

fn compare(a: CompareArgs, mut r: Resolver) -> Result<(), CliError> {
    let mut lambdas = r.get_list("lambda", a.lambda, vec![9.0])?;
    let p = r.get("p", a.p, 1.0)?;
    let alpha = r.get("alpha", a.alpha, 2.0)?;
    let n_list = r.get_list("n_list", a.n_list, vec![10, 50, 100, 200])?;
    let cells = r.get("cells", a.cells, DEFAULT_SWEEP_CELLS)?;
    let eps_abs = r.get_opt("eps_abs", a.eps_abs)?;
    let max_iters = r.get("max_iters", a.max_iters, HotConfig::DEFAULT_MAX_ITERS)?;
    let out = r.get_opt::<PathBuf>("out", a.out)?;
    let csv = r.get_opt::<PathBuf>("csv", a.csv)?;
    let mut config = r.finish()?;
    if lambdas.is_empty() || n_list.is_empty() || n_list.contains(&0) {
        return Err(invalid("need at least one lambda and positive step counts"));
    }
    for &l in &lambdas {
        positive("lambda", l)?;
    }
    lambdas.sort_by(f64::total_cmp);

    let grid = Grid::unit(cells).map_err(|e| invalid(e.to_string()))?;
    let ramp = DiscreteSignal::from_fn(grid, |x| x);
    let eps = eps_abs.unwrap_or_else(|| HotConfig::default_eps(&ramp));
    config.insert("eps_abs".into(), serde_json::json!(eps));
    let cfg = HotConfig {
        max_iters,
        ..HotConfig::new(lambdas[0], weight(alpha, p)?, eps)
    };

    let mut summaries = Vec::new();
    let mut rows = Vec::new();
    for &lambda in &lambdas {
        let rep = anti_staircase_experiment(lambda, &n_list, &cfg, cells).map_err(|e| invalid(e.to_string()))?;
        summaries.push(CompareSummary {
            lambda,
            clean_max_slope: rep.clean_max_slope,
            all_converged: rep.all_converged,
            no_jumps: rep.no_jumps,
            slope_bounded: rep.slope_bounded,
            rof_breaks_at_least_half: rep.rof_breaks_at_least_half,
            rof_detects_jumps: rep.rof_detects_jumps,
        });
        rows.extend(rep.rows.into_iter().map(|s| CompareRow {
            n: s.n,
            lambda,
            a_n: s.a_n,
            b_n: s.b_n,
            hot_max_abs_slope: s.max_abs_slope,
            hot_jump_count: s.jump_count,
            hot_sup_dist_clean: s.sup_dist_clean,
            hot_energy: s.energy,
            hot_iterations: s.iterations,
            hot_converged: s.converged,
            rof_plateau_breaks: s.rof_plateau_breaks,
            rof_jump_count: s.rof_jump_count,
        }));
    }
    rows.sort_by(|x, y| x.n.cmp(&y.n).then(x.lambda.total_cmp(&y.lambda)));
    let converged = summaries.iter().all(|s| s.all_converged);
    if let Some(path) = &csv {
        emit_csv(path, &rows)?;
    }
    emit(
        out.as_deref(),
        "compare",
        &config,
        CompareResult {
            p,
            cells,
            summaries,
            rows,
        },
    )?;
    if converged {
        Ok(())
    } else {
        Err(CliError::Numerical("some solves did not converge".into()))
    }
}
