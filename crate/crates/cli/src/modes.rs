//! One entry point per run mode. Each writes its artifacts before reporting a
//! failure, so a non-zero exit still leaves the partial results on disk.

use kwc_core::energy::EnergyReport;
use kwc_core::grid::{Grid, ScalarField};
use kwc_core::model::{Domain, DomainRadial};
use kwc_core::steady1d::{build_steady_state, verify_euler_lagrange, JumpSet1D};
use kwc_core::steadyradial::{
    classify_outer_jump, condition_interior_jump, cross_validate_dynamics, interior_jump_point, outer_jump_f,
    solve_bands, two_jump_point, two_jump_thresholds, OuterJumpClassification, RadialConfig, RadialSolve, Zone,
};
use kwc_core::stepper::{gradient_concentration, Stepper};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;
use serde_json::json;

use crate::artifact::ArtifactWriter;
use crate::config::{InitialData, Mode, RunConfig};
use crate::error::AppError;
use crate::svg::{LinePlot, Series};

/// Interior residual accepted for a constructed 1D steady state.
pub const STEADY_1D_TOL: f64 = 1e-5;

pub fn execute(cfg: &RunConfig, out: &mut ArtifactWriter) -> Result<(), AppError> {
    match cfg.mode {
        Mode::Simulate1d | Mode::SimulateRadial => simulate(cfg, out),
        Mode::Steady1d => steady_1d(cfg, out),
        Mode::SteadyRadial => steady_radial(cfg, out),
        Mode::ScanFigure1 => scan_outer_jump(cfg, out),
        Mode::ScanFigure2 => scan_interior_jump(cfg, out),
        Mode::ScanFigure3 | Mode::ScanFigure4 => scan_two_jump(cfg, out),
    }
}

#[derive(Serialize)]
#[serde(rename_all = "camelCase")]
struct EnergyRow {
    t: f64,
    dirichlet: f64,
    potential: f64,
    #[serde(rename = "weightedTV")]
    weighted_tv: f64,
    #[serde(rename = "weightedTVNu")]
    weighted_tv_nu: f64,
    boundary_penalty: f64,
    nu_term: f64,
    sharp_total: f64,
    relaxed_total: f64,
}

impl EnergyRow {
    fn new(t: f64, r: &EnergyReport) -> Self {
        Self {
            t,
            dirichlet: r.dirichlet,
            potential: r.potential,
            weighted_tv: r.weighted_tv,
            weighted_tv_nu: r.weighted_tv_nu,
            boundary_penalty: r.boundary_penalty,
            nu_term: r.nu_term,
            sharp_total: r.sharp_total,
            relaxed_total: r.relaxed_total,
        }
    }
}

#[derive(Serialize)]
struct FieldRow {
    x: f64,
    eta: f64,
    theta: f64,
}

#[derive(Serialize)]
struct SnapshotRow {
    t: f64,
    x: f64,
    eta: f64,
    theta: f64,
}

#[derive(Serialize)]
#[serde(rename_all = "camelCase")]
struct SimulationSummary {
    steps: usize,
    converged: bool,
    final_time: f64,
    projected_nodes: usize,
    stationarity_residual: f64,
    minimality_gap: f64,
    /// Share of `|Dθ∞|` on the heaviest 5% of cells.
    gradient_concentration: f64,
    eta_min: f64,
    eta_max: f64,
    theta_abs_max: f64,
    gamma_sup: f64,
    min_inequality_slack: f64,
    min_weighted_sum_slack: f64,
    initial_energy: EnergyReport,
    final_energy: EnergyReport,
}

fn initial_fields(cfg: &RunConfig, grid: &Grid, domain: &Domain) -> (ScalarField, ScalarField) {
    let n = grid.n();
    let (g0, g1) = domain.boundary_values();
    match cfg.initial {
        InitialData::Random => {
            let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
            let sup = domain.gamma_sup();
            let eta: Vec<f64> = (0..n).map(|_| rng.gen_range(0.0..=1.0)).collect();
            let mut theta: Vec<f64> = (0..n).map(|_| if sup > 0.0 { rng.gen_range(-sup..=sup) } else { 0.0 }).collect();
            theta[0] = g0;
            theta[n - 1] = g1;
            (ScalarField::new(grid, eta).expect("sized to grid"), ScalarField::new(grid, theta).expect("sized to grid"))
        }
        InitialData::Uniform { eta, theta } => {
            let mut t = vec![theta.unwrap_or(g0); n];
            t[0] = g0;
            t[n - 1] = g1;
            (ScalarField::constant(grid, eta), ScalarField::new(grid, t).expect("sized to grid"))
        }
    }
}

fn simulate(cfg: &RunConfig, out: &mut ArtifactWriter) -> Result<(), AppError> {
    let laws = cfg.material_laws()?;
    let domain = cfg.domain()?;
    let grid = Grid::for_domain(&domain, cfg.stepper.n)?;
    let stepper = Stepper::new(cfg.stepper.step_config(), laws, domain, grid.clone())?;
    let (eta0, theta0) = initial_fields(cfg, &grid, &domain);
    let limit = stepper.run_to_omega_limit(&eta0, &theta0)?;
    let rec = &limit.record;

    out.csv("energy.csv", rec.times.iter().zip(&rec.energy_reports).map(|(&t, r)| EnergyRow::new(t, r)))?;
    let x = grid.nodes();
    let snapshots = rec.snapshot_times.iter().zip(rec.eta_snapshots.iter().zip(&rec.theta_snapshots)).flat_map(|(&t, (e, th))| {
        (0..x.len()).map(move |j| SnapshotRow { t, x: x[j], eta: e.values()[j], theta: th.values()[j] })
    });
    out.csv("snapshots.csv", snapshots)?;
    out.csv(
        "final.csv",
        (0..x.len()).map(|j| FieldRow { x: x[j], eta: limit.eta_inf.values()[j], theta: limit.theta_inf.values()[j] }),
    )?;

    let f0 = rec.initial_energy.relaxed_total;
    let min_slack = rec.inequality_slack.iter().copied().fold(f64::INFINITY, f64::min);
    let weighted = rec.weighted_sum_slack();
    // prefix sums carry m·h·F rounding on top of the per-step floor
    let worst_weighted = weighted
        .iter()
        .enumerate()
        .map(|(k, s)| s / (1.0 + (k + 1) as f64 * rec.h))
        .fold(f64::INFINITY, f64::min);
    let summary = SimulationSummary {
        steps: rec.steps(),
        converged: rec.converged,
        final_time: rec.times.last().copied().unwrap_or(0.0),
        projected_nodes: limit.projected_nodes,
        stationarity_residual: limit.stationarity_residual,
        minimality_gap: limit.minimality_gap,
        gradient_concentration: gradient_concentration(&limit.theta_inf, 0.05),
        eta_min: limit.eta_inf.min(),
        eta_max: limit.eta_inf.max(),
        theta_abs_max: limit.theta_inf.sup_norm(),
        gamma_sup: domain.gamma_sup(),
        min_inequality_slack: if min_slack.is_finite() { min_slack } else { 0.0 },
        min_weighted_sum_slack: weighted.iter().copied().fold(0.0, f64::min),
        initial_energy: rec.initial_energy,
        final_energy: rec.energy_reports.last().copied().unwrap_or(rec.initial_energy),
    };
    out.json("summary.json", &summary)?;

    if cfg.plots {
        let energy = LinePlot {
            title: "energy".into(),
            x_label: "t".into(),
            y_label: "F".into(),
            series: vec![
                Series::new("sharp", rec.times.iter().zip(&rec.energy_reports).map(|(&t, r)| (t, r.sharp_total)).collect()),
                Series::new("relaxed", rec.times.iter().zip(&rec.energy_reports).map(|(&t, r)| (t, r.relaxed_total)).collect()),
            ],
        };
        out.svg("energy.svg", &energy)?;
        out.svg("final.svg", &profile_plot(x, limit.eta_inf.values(), limit.theta_inf.values(), None))?;
    }

    if worst_weighted < -1e-9 * (1.0 + f0.abs()) {
        return Err(AppError::Invariant(format!("weighted energy inequality violated (slack {worst_weighted:e})")));
    }
    if !rec.converged {
        log::warn!("{} steps without reaching the steady tolerance", rec.steps());
    }
    Ok(())
}

fn profile_plot(x: &[f64], eta: &[f64], theta: &[f64], w: Option<&[f64]>) -> LinePlot {
    let zip = |v: &[f64]| x.iter().copied().zip(v.iter().copied()).collect::<Vec<_>>();
    let mut series = vec![Series::new("eta", zip(eta)), Series::new("theta", zip(theta))];
    if let Some(w) = w {
        series.push(Series::new("w", zip(w)));
    }
    LinePlot { title: "profile".into(), x_label: "x".into(), y_label: String::new(), series }
}

#[derive(Serialize)]
struct SteadyRow {
    x: f64,
    eta: f64,
    theta: f64,
    w: f64,
}

fn steady_1d(cfg: &RunConfig, out: &mut ArtifactWriter) -> Result<(), AppError> {
    let laws = cfg.material_laws()?;
    let [g0, g1] = cfg.domain.gamma;
    let jump = g1 - g0;
    if jump == 0.0 {
        return Err(AppError::Validation("steady1d needs gamma[1] != gamma[0]; equal data give the flat state".into()));
    }
    // θ ↦ g0 + sign·θ maps the family with data (0, |jump|) onto (g0, g1)
    let sign = jump.signum();
    let s = &cfg.steady1d;
    let jumps = JumpSet1D::new(s.intervals.iter().map(|&[a, b]| (a, b)).collect())?.with_ends(s.left, s.right);
    let state = build_steady_state(jumps, jump.abs(), laws)?;
    let grid = Grid::interval(cfg.stepper.n)?;
    let report = verify_euler_lagrange(&state, &grid);

    let x = grid.nodes();
    let rows: Vec<SteadyRow> = x
        .iter()
        .map(|&x| SteadyRow { x, eta: state.eta(x), theta: g0 + sign * state.theta(x), w: sign * state.w(x) })
        .collect();
    out.csv("profile.csv", &rows)?;
    let atoms: Vec<_> = state.atoms().into_iter().map(|(x, h)| json!({ "x": x, "height": sign * h })).collect();
    out.json(
        "steady.json",
        &json!({
            "d": state.d,
            "gamma": [g0, g1],
            "atoms": atoms,
            "budgetResidual": state.budget_residual(),
            "continuityDefect": state.continuity_defect(),
            "eulerLagrange": report,
            "passes": report.passes(STEADY_1D_TOL),
        }),
    )?;
    if cfg.plots {
        let col = |f: fn(&SteadyRow) -> f64| rows.iter().map(f).collect::<Vec<_>>();
        out.svg("profile.svg", &profile_plot(x, &col(|r| r.eta), &col(|r| r.theta), Some(&col(|r| r.w))))?;
    }
    if !report.passes(STEADY_1D_TOL) {
        return Err(AppError::Invariant(format!("Euler-Lagrange residuals out of tolerance: {report:?}")));
    }
    Ok(())
}

fn steady_radial(cfg: &RunConfig, out: &mut ArtifactWriter) -> Result<(), AppError> {
    let laws = cfg.material_laws()?;
    let [g0, g1] = cfg.domain.gamma;
    let domain = DomainRadial::new(cfg.domain.r0, cfg.domain.r_outer, g0, g1)?;
    let s = &cfg.steady_radial;
    let rc = RadialConfig::new(domain, s.jump_radii.clone(), s.theta_levels.clone(), laws)?;
    let state = match solve_bands(&rc)? {
        RadialSolve::Found(state) => state,
        RadialSolve::NotFound { reason, residuals } => {
            out.json("steady.json", &json!({ "found": false, "reason": reason, "residuals": residuals }))?;
            return Err(AppError::NonConvergence(format!("no steady state: {reason}")));
        }
    };
    let samples = state.sample(s.samples);
    out.csv("profile.csv", samples.iter().map(|&[x, eta, theta, w]| SteadyRow { x, eta, theta, w }))?;
    let comparison = match s.cross_validate {
        Some(cv) => Some(cross_validate_dynamics(&state, cfg.stepper.step_config(), cv.n, cv.amplitude, cv.tolerance)?),
        None => None,
    };
    out.json("steady.json", &json!({ "found": true, "state": state, "crossValidation": comparison }))?;
    if cfg.plots {
        let col = |k: usize| samples.iter().map(|p| p[k]).collect::<Vec<_>>();
        out.svg("profile.svg", &profile_plot(&col(0), &col(1), &col(2), Some(&col(3))))?;
    }
    Ok(())
}

#[derive(Serialize)]
#[serde(rename_all = "camelCase")]
struct OuterJumpRow {
    gamma: f64,
    r_outer: f64,
    f: f64,
    exists: bool,
}

/// `{rho1, rho2, rho3, Rstar}`; entries a mode does not produce are `null`.
#[derive(Serialize, Default)]
struct Thresholds {
    rho1: Option<f64>,
    rho2: Option<f64>,
    rho3: Option<f64>,
    #[serde(rename = "Rstar")]
    r_star: Option<Vec<RStarEntry>>,
}

#[derive(Serialize)]
#[serde(rename_all = "camelCase")]
struct RStarEntry {
    gamma: f64,
    r_star: Option<f64>,
    classification: OuterJumpClassification,
}

fn scan_outer_jump(cfg: &RunConfig, out: &mut ArtifactWriter) -> Result<(), AppError> {
    let f = &cfg.figure1;
    let rs: Vec<f64> = (1..=f.points).map(|i| f.r0 + (f.r_max - f.r0) * i as f64 / f.points as f64).collect();
    let pairs: Vec<(f64, f64)> = f.gammas.iter().flat_map(|&g| rs.iter().map(move |&r| (g, r))).collect();
    let rows: Vec<OuterJumpRow> = pairs
        .par_iter()
        .map(|&(gamma, r)| {
            let v = outer_jump_f(f.r0, r, gamma)?;
            Ok(OuterJumpRow { gamma, r_outer: r, f: v, exists: v >= 0.0 })
        })
        .collect::<Result<_, kwc_core::error::KwcError>>()?;
    out.csv("scan.csv", &rows)?;
    let entries = f
        .gammas
        .par_iter()
        .map(|&gamma| {
            let c = classify_outer_jump(f.r0, gamma)?;
            Ok(RStarEntry { gamma, r_star: c.regime.r_star(), classification: c })
        })
        .collect::<Result<Vec<_>, kwc_core::error::KwcError>>()?;
    out.json("thresholds.json", &Thresholds { r_star: Some(entries), ..Default::default() })?;
    if cfg.plots {
        let series = f
            .gammas
            .iter()
            .map(|&g| {
                let pts = rows.iter().filter(|r| r.gamma == g).map(|r| (r.r_outer, r.f)).collect();
                Series::new(format!("gamma = {g}"), pts)
            })
            .collect();
        out.svg("scan.svg", &LinePlot { title: format!("f(r0 = {}, R)", f.r0), x_label: "R".into(), y_label: "f".into(), series })?;
    }
    Ok(())
}

#[derive(Serialize)]
#[serde(rename_all = "camelCase")]
struct ZoneCounts {
    admissible: usize,
    excluded: usize,
    masked: usize,
}

fn scan_interior_jump(cfg: &RunConfig, out: &mut ArtifactWriter) -> Result<(), AppError> {
    let f = cfg.figure2;
    let r1s = f.r1.values();
    let rs = f.r_outer.values();
    let pairs: Vec<(f64, f64)> = r1s.iter().flat_map(|&a| rs.iter().map(move |&b| (a, b))).collect();
    let points = pairs
        .par_iter()
        .map(|&(r1, r)| interior_jump_point(f.r0, f.gamma, r1, r))
        .collect::<Result<Vec<_>, _>>()?;
    out.csv("contour.csv", &points)?;

    // the sufficient margin does not involve R
    let margins = r1s
        .par_iter()
        .filter(|&&r1| r1 > f.r0)
        .map(|&r1| Ok((r1, condition_interior_jump(f.r0, r1, r1, f.gamma)?.sufficient_margin)))
        .collect::<Result<Vec<_>, kwc_core::error::KwcError>>()?;
    let holds: Vec<f64> = margins.iter().filter(|m| m.1 >= 0.0).map(|m| m.0).collect();
    let count = |z: Zone| points.iter().filter(|p| p.zone == z).count();
    out.json(
        "thresholds.json",
        &json!({
            "rho1": null, "rho2": null, "rho3": null, "Rstar": null,
            "zones": ZoneCounts { admissible: count(Zone::Admissible), excluded: count(Zone::Excluded), masked: count(Zone::Masked) },
            "sufficientR1": holds.first().map(|lo| json!({ "lower": lo, "upper": holds.last() })),
        }),
    )?;
    if cfg.plots {
        let plot = LinePlot {
            title: format!("sufficient margin, r0 = {}, gamma = {}", f.r0, f.gamma),
            x_label: "r1".into(),
            y_label: "margin".into(),
            series: vec![Series::new("margin", margins)],
        };
        out.svg("margin.svg", &plot)?;
    }
    Ok(())
}

fn scan_two_jump(cfg: &RunConfig, out: &mut ArtifactWriter) -> Result<(), AppError> {
    let t = cfg.two_jump;
    let [r0, r1, r2, r] = t.radii_for(cfg.mode);
    let gammas = t.gamma.values();
    let points = gammas
        .par_iter()
        .map(|&g| two_jump_point(r0, r1, r2, r, g))
        .collect::<Result<Vec<_>, _>>()?;
    out.csv("scan.csv", &points)?;
    let th = two_jump_thresholds(r0, r1, r2, r, t.gamma.max)?;
    let thresholds = match cfg.mode {
        Mode::ScanFigure3 => Thresholds { rho1: th.condition2, ..Default::default() },
        _ => Thresholds { rho2: th.condition2, rho3: th.condition3, ..Default::default() },
    };
    out.json("thresholds.json", &thresholds)?;
    if cfg.plots {
        let mut series = vec![Series::new("dbar1 - d1", points.iter().map(|p| (p.gamma, p.margin)).collect())];
        if r1 > r0 {
            series.push(Series::new("1 - w(r0)", points.iter().map(|p| (p.gamma, p.one_minus_w0)).collect()));
        }
        let plot = LinePlot {
            title: format!("two jumps at ({r0}, {r1}, {r2}, {r})"),
            x_label: "gamma(R)".into(),
            y_label: String::new(),
            series,
        };
        out.svg("scan.svg", &plot)?;
    }
    Ok(())
}
