use std::path::Path;

use sdnse_core::monitor::{
    ball_radius, ball_sigma, check_zero_dissipativity, check_zero_dissipativity_with,
    contraction_report, decay_fit, distance_from_linear, energy_inequality, ReportNorm, Thresholds,
};
use sdnse_core::nse::{Solver, SpectralField, State};
use sdnse_core::testfns::{TestFamily, TestFnConfig};
use sdnse_core::Error as CoreError;
use serde::Serialize;

use super::emit_json;
use super::nse::{load_run, sd_config};
use crate::cli::{MonitorArgs, NormArg};
use crate::error::{Failure, Outcome};
use crate::require;

/// Energy slack below `−ENERGY_TOL·‖u₀‖²` fails the run.
pub const ENERGY_TOL: f64 = 1e-6;
/// `ε` of the contraction ball `(1−ε)/2·u₊`.
pub const BALL_EPSILON: f64 = 0.5;

#[derive(Clone, Debug)]
pub struct MonitorOptions {
    pub nu: Option<f64>,
    pub k: u64,
    pub norm: NormArg,
    pub perturbation: f64,
    pub contraction: bool,
    pub fit_from: Option<f64>,
    pub m_hat: Option<f64>,
}

impl From<&MonitorArgs> for MonitorOptions {
    fn from(a: &MonitorArgs) -> Self {
        MonitorOptions {
            nu: a.nu,
            k: a.k_max,
            norm: a.norm,
            perturbation: a.perturbation,
            contraction: !a.no_contraction,
            fit_from: a.fit_from,
            m_hat: a.m_hat,
        }
    }
}

#[derive(Debug, Serialize)]
pub struct MarginLine {
    pub t: f64,
    pub norm: f64,
    /// `−ν‖u‖ + M̂‖u‖² + f` in the report norm.
    pub bound: f64,
    pub direct_l2: f64,
    pub direct: f64,
    pub tail_bound: f64,
    pub in_annulus: bool,
    pub violated: bool,
}

#[derive(Debug, Serialize)]
pub struct ContractionLine {
    pub perturbation: f64,
    pub epsilon: f64,
    pub radius: f64,
    pub sigma: f64,
    pub u0_norm: f64,
    pub v0_norm: f64,
    pub inside_region: bool,
    pub d0: f64,
    pub d_final: f64,
    pub max_relative_increase: f64,
    pub nonincreasing: bool,
    pub bounded_by_initial: bool,
    pub fitted_rate: Option<f64>,
    pub passed: bool,
}

#[derive(Debug, Serialize)]
pub struct MonitorReport {
    pub norm: &'static str,
    #[serde(rename = "K")]
    pub k: Option<u64>,
    pub nu: f64,
    #[serde(rename = "M_hat")]
    pub m_hat: f64,
    pub f_sup: f64,
    pub gamma: f64,
    pub u_plus: f64,
    pub u_minus: f64,
    pub sigma: f64,
    /// `[t, ⟨A(u,t), u⟩]` in the report norm at every checkpoint.
    pub margins: Vec<[f64; 2]>,
    pub margin_detail: Vec<MarginLine>,
    pub annulus_ok: bool,
    pub dissipativity_passed: bool,
    pub contraction: Option<ContractionLine>,
    pub energy_slack_min: Option<f64>,
    pub energy_slack_min_relative: Option<f64>,
    pub energy_passed: Option<bool>,
    pub alpha_hat: Option<f64>,
    pub fit_window: [f64; 2],
    pub fit_samples: usize,
    pub passed: bool,
    pub warnings: Vec<String>,
}

pub fn run(args: &MonitorArgs) -> Outcome<()> {
    let report = monitor_report(&args.trajectory, &MonitorOptions::from(args))?;
    emit_json(&report, args.out.as_deref())?;
    check_passed(&report)
}

pub fn check_passed(report: &MonitorReport) -> Outcome<()> {
    if report.passed {
        return Ok(());
    }
    let mut failed = Vec::new();
    if !report.dissipativity_passed {
        failed.push("dissipativity");
    }
    if report.contraction.as_ref().is_some_and(|c| !c.passed) {
        failed.push("contraction");
    }
    if report.energy_passed == Some(false) {
        failed.push("energy inequality");
    }
    Err(Failure::assertion(format!(
        "monitor: {} failed",
        failed.join(", ")
    )))
}

pub fn monitor_report(dir: &Path, opts: &MonitorOptions) -> Outcome<MonitorReport> {
    require!(opts.k >= 1, "--K must be at least 1");
    require!(opts.perturbation > 0.0, "--perturbation must be positive");
    if let Some(m) = opts.m_hat {
        require!(m > 0.0, "--m-hat must be positive");
    }
    let loaded = load_run(dir, opts.nu)?;
    let solver = &loaded.solver;
    let traj = &loaded.trajectory;
    let mut warnings = Vec::new();
    let run_nu = loaded.run.solver_config()?.viscosity();
    if solver.nu() != run_nu {
        warnings.push(format!(
            "viscosity {} overrides {} from the run config",
            solver.nu(),
            run_nu
        ));
    }

    let family;
    let norm = match opts.norm {
        NormArg::L2 => ReportNorm::L2,
        NormArg::Sd2 => {
            family = TestFamily::for_functionals(3, opts.k, TestFnConfig::default())?;
            ReportNorm::Sd2 {
                family: &family,
                config: sd_config(opts.k),
            }
        }
    };
    let diss = match opts.m_hat {
        Some(m) => check_zero_dissipativity_with(solver, traj, norm, m),
        None => check_zero_dissipativity(solver, traj, norm),
    }
    .map_err(|e| match e {
        CoreError::NoRealRoots { .. } | CoreError::MUndefined => Failure::assertion(e.to_string()),
        other => other.into(),
    })?;
    if matches!(norm, ReportNorm::L2) && opts.m_hat.is_none() {
        warnings.push("L2 M_hat is round-off: the trilinear term vanishes in L2".into());
    }
    if !diss.annulus_ok {
        let outside = diss.margins.iter().filter(|m| !m.in_annulus).count();
        warnings.push(format!(
            "{outside} checkpoint(s) outside the annulus [u_minus, u_plus]"
        ));
    }

    let contraction = if opts.contraction {
        Some(contraction_line(
            solver,
            &traj.checkpoints[0].state,
            norm,
            &diss.thresholds,
            opts,
        )?)
    } else {
        None
    };

    let (energy_slack_min, energy_slack_min_relative, energy_passed) =
        if traj.config.forcing.is_active() {
            warnings.push("energy inequality skipped: forced run".into());
            (None, None, None)
        } else {
            let slack = energy_inequality(traj, solver.nu())?;
            let min = slack.iter().fold(f64::INFINITY, |m, (_, s)| m.min(*s));
            let e0 = traj.records[0].energy;
            let rel = if e0 > 0.0 { min / e0 } else { min };
            (Some(min), Some(rel), Some(rel >= -ENERGY_TOL))
        };

    let t_end = traj.config.t_end;
    let lo = opts.fit_from.unwrap_or(0.5 * t_end);
    let (alpha_hat, fit_samples) = match decay_fit(&distance_from_linear(solver, traj)?, lo, t_end)
    {
        Ok(fit) => (Some(fit.alpha_hat), fit.samples),
        Err(e @ CoreError::WindowTooShort { .. }) => {
            warnings.push(format!("decay fit: {e}"));
            (None, 0)
        }
        Err(e) => return Err(e.into()),
    };

    let passed = diss.passed
        && contraction.as_ref().is_none_or(|c| c.passed)
        && energy_passed.unwrap_or(true);
    Ok(MonitorReport {
        norm: diss.norm,
        k: matches!(opts.norm, NormArg::Sd2).then_some(opts.k),
        nu: diss.nu,
        m_hat: diss.m_hat,
        f_sup: diss.f_sup,
        gamma: diss.thresholds.gamma,
        u_plus: diss.thresholds.u_plus,
        u_minus: diss.thresholds.u_minus,
        sigma: diss.thresholds.sigma,
        margins: diss.margins.iter().map(|m| [m.t, m.direct]).collect(),
        margin_detail: diss
            .margins
            .iter()
            .map(|m| MarginLine {
                t: m.t,
                norm: m.norm,
                bound: m.scalar,
                direct_l2: m.direct_l2,
                direct: m.direct,
                tail_bound: m.tail_bound,
                in_annulus: m.in_annulus,
                violated: m.violated,
            })
            .collect(),
        annulus_ok: diss.annulus_ok,
        dissipativity_passed: diss.passed,
        contraction,
        energy_slack_min,
        energy_slack_min_relative,
        energy_passed,
        alpha_hat,
        fit_window: [lo, t_end],
        fit_samples,
        passed,
        warnings,
    })
}

/// Runs the initial state and a perturbed copy side by side; the
/// monotonicity of `‖u − v‖₂` is asserted only when both start inside the
/// ball of radius `(1−ε)/2·u₊`.
fn contraction_line(
    solver: &Solver,
    initial: &State,
    norm: ReportNorm<'_>,
    th: &Thresholds,
    opts: &MonitorOptions,
) -> Outcome<ContractionLine> {
    let sp = solver.spectral();
    let u0 = initial.u.clone();
    let scale = sp.norm(&u0);
    let size = opts.perturbation * if scale > 0.0 { scale } else { 1.0 };
    let mut v0 = u0.clone();
    v0.axpy(
        1.0,
        &sp.random_field(solver.config().seed.wrapping_add(1), 2.0, size),
    );

    let th_radius = ball_radius(th, BALL_EPSILON);
    let (u0_norm, _) = norm.norm(solver, &u0)?;
    let (v0_norm, _) = norm.norm(solver, &v0)?;
    // the ball is derived for the unforced operator
    let inside =
        !solver.config().forcing.is_active() && u0_norm <= th_radius && v0_norm <= th_radius;

    let steps = solver.config().steps()?;
    let dt = solver.config().dt;
    let start = |u: SpectralField| State {
        t: 0.0,
        u,
        rho: initial.rho.clone(),
    };
    let (mut a, mut b) = (start(u0), start(v0));
    let mut times = vec![0.0];
    let mut distances = vec![sp.norm(&a.u.sub(&b.u))];
    for s in 1..=steps {
        let (na, nb) = rayon::join(|| solver.step(&a), || solver.step(&b));
        a = na?;
        b = nb?;
        times.push(s as f64 * dt);
        distances.push(sp.norm(&a.u.sub(&b.u)));
    }
    let r = contraction_report(times, distances, inside);
    Ok(ContractionLine {
        perturbation: opts.perturbation,
        epsilon: BALL_EPSILON,
        radius: th_radius,
        sigma: ball_sigma(solver.nu(), BALL_EPSILON),
        u0_norm,
        v0_norm,
        inside_region: inside,
        d0: r.distances[0],
        d_final: *r.distances.last().expect("at least the initial distance"),
        max_relative_increase: r.max_relative_increase,
        nonincreasing: r.nonincreasing,
        bounded_by_initial: r.bounded_by_initial,
        fitted_rate: r.fitted_rate,
        passed: r.passed,
    })
}
