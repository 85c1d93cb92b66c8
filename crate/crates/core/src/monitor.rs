//! Dissipativity thresholds, contraction, energy balance and decay fits
//! along solver trajectories.
//!
//! All assertions are made in `L²`, where `⟨B(u,u),u⟩ = 0` holds to
//! round-off. SD² quantities are measured and reported next to them.

use alloc::vec::Vec;

#[allow(unused_imports)] // inherent once std is linked
use num_traits::Float;

use crate::nse::{Solver, SpectralField, State, Trajectory};
use crate::sdspace::{sd_inner_sets, sd_norm_p_set, FunctionalSet, SdConfig};
use crate::testfns::TestFamily;
use crate::{Error, Result};

/// Norm used for `M̂`, `‖u‖` and margins.
#[derive(Clone, Copy, Debug)]
pub enum ReportNorm<'a> {
    L2,
    /// Truncated SD² norm of the sampled field.
    Sd2 {
        family: &'a TestFamily,
        config: SdConfig,
    },
}

impl ReportNorm<'_> {
    pub fn name(&self) -> &'static str {
        match self {
            ReportNorm::L2 => "L2",
            ReportNorm::Sd2 { .. } => "SD2",
        }
    }

    fn set(&self, solver: &Solver, u: &SpectralField) -> Result<Option<FunctionalSet>> {
        match self {
            ReportNorm::L2 => Ok(None),
            ReportNorm::Sd2 { family, config } => {
                let sampled = solver.spectral().to_sampled(u)?;
                Ok(Some(FunctionalSet::compute(family, &sampled, config)?))
            }
        }
    }

    /// `‖u‖` and its truncation tail bound.
    pub fn norm(&self, solver: &Solver, u: &SpectralField) -> Result<(f64, f64)> {
        match self.set(solver, u)? {
            None => Ok((solver.spectral().norm(u), 0.0)),
            Some(s) => {
                let v = sd_norm_p_set(&s, 2.0)?;
                Ok((v.value, v.tail_bound))
            }
        }
    }

    /// `Re⟨a, b⟩` and its truncation tail bound.
    pub fn inner(
        &self,
        solver: &Solver,
        a: &SpectralField,
        b: &SpectralField,
    ) -> Result<(f64, f64)> {
        match (self.set(solver, a)?, self.set(solver, b)?) {
            (Some(sa), Some(sb)) => {
                let v = sd_inner_sets(&sa, &sb)?;
                Ok((v.value.re, v.tail_bound))
            }
            _ => Ok((solver.spectral().inner(a, b), 0.0)),
        }
    }
}

/// `|⟨B(u,u),u⟩| / ‖u‖³` for one snapshot; `None` for `u = 0`.
pub fn nonlinear_ratio(
    solver: &Solver,
    u: &SpectralField,
    norm: ReportNorm<'_>,
) -> Result<Option<f64>> {
    let (n, _) = norm.norm(solver, u)?;
    if n == 0.0 {
        return Ok(None);
    }
    let b = solver.spectral().nonlinear_b(u, u);
    let (tri, _) = norm.inner(solver, &b, u)?;
    Ok(Some(tri.abs() / n.powi(3)))
}

/// `M̂ = max_c |⟨B(u,u),u⟩|/‖u‖³` over the checkpoints.
pub fn estimate_m(solver: &Solver, trajectory: &Trajectory, norm: ReportNorm<'_>) -> Result<f64> {
    let mut best: Option<f64> = None;
    for c in &trajectory.checkpoints {
        if let Some(r) = nonlinear_ratio(solver, &c.state.u, norm)? {
            best = Some(best.map_or(r, |b| b.max(r)));
        }
    }
    best.ok_or(Error::MUndefined)
}

/// Roots of `M u² − ν u + f = 0` and the contraction rate.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Thresholds {
    pub gamma: f64,
    pub u_minus: f64,
    pub u_plus: f64,
    pub sigma: f64,
}

/// `γ = 4fM/ν²`, `u_± = (ν/2M)(1 ± √(1−γ))`, `σ = (ν/2)(1 − √(1−γ))`.
pub fn thresholds(nu: f64, m: f64, f_sup: f64) -> Result<Thresholds> {
    if !(nu > 0.0 && nu.is_finite()) || !(m > 0.0 && m.is_finite()) {
        return Err(Error::invalid("nu and M must be positive"));
    }
    if !(f_sup >= 0.0 && f_sup.is_finite()) {
        return Err(Error::invalid("f_sup must be nonnegative"));
    }
    if f_sup == 0.0 {
        return Ok(Thresholds {
            gamma: 0.0,
            u_minus: 0.0,
            u_plus: nu / m,
            sigma: 0.0,
        });
    }
    let gamma = 4.0 * f_sup * m / (nu * nu);
    if gamma >= 1.0 {
        return Err(Error::NoRealRoots { gamma });
    }
    let root = (1.0 - gamma).sqrt();
    let u_plus = nu / (2.0 * m) * (1.0 + root);
    // u₊u₋ = f/M avoids cancellation in 1 − √(1−γ)
    let u_minus = f_sup / (m * u_plus);
    let sigma = 0.5 * nu * gamma / (1.0 + root);
    Ok(Thresholds {
        gamma,
        u_minus,
        u_plus,
        sigma,
    })
}

/// Contraction rate `νε` on the unforced ball of radius `(1−ε)/2·u₊`.
pub fn ball_sigma(nu: f64, epsilon: f64) -> f64 {
    nu * epsilon
}

pub fn ball_radius(th: &Thresholds, epsilon: f64) -> f64 {
    0.5 * (1.0 - epsilon) * th.u_plus
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Margin {
    pub t: f64,
    /// `‖u‖` in the report norm.
    pub norm: f64,
    /// `−ν‖u‖ + M̂‖u‖² + f(t)`.
    pub scalar: f64,
    /// `⟨A(u,t),u⟩` in `L²`.
    pub direct_l2: f64,
    /// `⟨A(u,t),u⟩` in the report norm, with its tail bound.
    pub direct: f64,
    pub tail_bound: f64,
    pub in_annulus: bool,
    /// The scalar inequality holds and `u` lies in the annulus, but the
    /// direct `L²` product is positive beyond tolerance.
    pub violated: bool,
}

#[derive(Clone, Debug)]
pub struct DissipativityReport {
    pub norm: &'static str,
    pub nu: f64,
    pub m_hat: f64,
    pub f_sup: f64,
    pub thresholds: Thresholds,
    pub margins: Vec<Margin>,
    pub annulus_ok: bool,
    pub passed: bool,
}

/// Relative tolerance of the direct `L²` dissipativity check.
pub const DISSIPATIVITY_TOL: f64 = 1e-8;

/// Margins of the dissipativity inequality along a trajectory, with `M̂`
/// measured on the same trajectory.
pub fn check_zero_dissipativity(
    solver: &Solver,
    trajectory: &Trajectory,
    norm: ReportNorm<'_>,
) -> Result<DissipativityReport> {
    let m_hat = estimate_m(solver, trajectory, norm)?;
    check_zero_dissipativity_with(solver, trajectory, norm, m_hat)
}

/// As [`check_zero_dissipativity`] with a given `M̂` (must be positive).
pub fn check_zero_dissipativity_with(
    solver: &Solver,
    trajectory: &Trajectory,
    norm: ReportNorm<'_>,
    m_hat: f64,
) -> Result<DissipativityReport> {
    let nu = solver.nu();
    let sp = solver.spectral();
    let mut f_sup = 0.0f64;
    let mut forcing = Vec::with_capacity(trajectory.checkpoints.len());
    for c in &trajectory.checkpoints {
        let f = solver.forcing_at(c.state.t);
        let (fn_, _) = norm.norm(solver, &f)?;
        f_sup = f_sup.max(fn_);
        forcing.push(fn_);
    }
    // L² forcing is known at every step; take the finer sup there
    if matches!(norm, ReportNorm::L2) {
        f_sup = trajectory
            .records
            .iter()
            .fold(f_sup, |m, r| m.max(r.forcing_norm));
    }
    let th = thresholds(nu, m_hat.max(f64::MIN_POSITIVE), f_sup)?;
    let mut margins = Vec::with_capacity(forcing.len());
    for (c, f) in trajectory.checkpoints.iter().zip(forcing) {
        let State { t, u, rho } = &c.state;
        let a = solver.operator(u, rho.as_deref(), *t)?;
        let direct_l2 = sp.inner(&a, u);
        let (direct, tail_bound) = match norm {
            ReportNorm::L2 => (direct_l2, 0.0),
            _ => norm.inner(solver, &a, u)?,
        };
        let (un, _) = norm.norm(solver, u)?;
        let scalar = -nu * un + m_hat * un * un + f;
        let in_annulus = th.u_minus <= un && un <= th.u_plus;
        let scale = nu * sp.enstrophy(u) + sp.norm(&solver.forcing_at(*t)) * sp.norm(u);
        let violated = scalar <= 0.0 && in_annulus && direct_l2 > DISSIPATIVITY_TOL * scale;
        margins.push(Margin {
            t: *t,
            norm: un,
            scalar,
            direct_l2,
            direct,
            tail_bound,
            in_annulus,
            violated,
        });
    }
    Ok(DissipativityReport {
        norm: norm.name(),
        nu,
        m_hat,
        f_sup,
        thresholds: th,
        annulus_ok: margins.iter().all(|m| m.in_annulus),
        passed: margins.iter().all(|m| !m.violated),
        margins,
    })
}

#[derive(Clone, Debug)]
pub struct ContractionReport {
    pub times: Vec<f64>,
    /// `‖u(t) − v(t)‖₂` after every step.
    pub distances: Vec<f64>,
    /// Largest `(d_{n+1} − d_n)/d_n` over the steps.
    pub max_relative_increase: f64,
    pub nonincreasing: bool,
    pub bounded_by_initial: bool,
    /// Least-squares rate of `log d(t)`, when `d > 0` throughout.
    pub fitted_rate: Option<f64>,
    /// Both initial fields lie inside the supplied region.
    pub inside_region: bool,
    /// `inside_region` and monotone, or outside (assertion skipped).
    pub passed: bool,
}

/// Relative per-step tolerance for the monotonicity of `d(t)`.
pub const CONTRACTION_TOL: f64 = 1e-8;

/// Runs both initial conditions with the same solver and tracks
/// `‖u − v‖₂`. `inside_region` is supplied by the caller (the region is
/// defined in whatever norm `M̂` was measured in).
pub fn check_contraction(
    solver: &Solver,
    u0: &SpectralField,
    v0: &SpectralField,
    rho0: Option<&[f64]>,
    inside_region: bool,
) -> Result<ContractionReport> {
    let sp = solver.spectral();
    let steps = solver.config().steps()?;
    let dt = solver.config().dt;
    let state = |u: &SpectralField| State {
        t: 0.0,
        u: u.clone(),
        rho: rho0.map(|r| r.to_vec()),
    };
    let (mut a, mut b) = (state(u0), state(v0));
    let mut times = alloc::vec![0.0];
    let mut distances = alloc::vec![sp.norm(&u0.sub(v0))];
    for s in 1..=steps {
        a = solver.step(&a)?;
        b = solver.step(&b)?;
        times.push(s as f64 * dt);
        distances.push(sp.norm(&a.u.sub(&b.u)));
    }
    Ok(contraction_report(times, distances, inside_region))
}

/// Summarizes a distance series `d(t_n)` from a lockstep pair run.
pub fn contraction_report(
    times: Vec<f64>,
    distances: Vec<f64>,
    inside_region: bool,
) -> ContractionReport {
    let d0 = distances.first().copied().unwrap_or(0.0);
    let mut max_rel = 0.0f64;
    for (i, w) in distances.windows(2).enumerate() {
        let rel = if w[0] > 0.0 {
            (w[1] - w[0]) / w[0]
        } else if w[1] > 0.0 {
            f64::INFINITY
        } else {
            0.0
        };
        max_rel = if i == 0 { rel } else { max_rel.max(rel) };
    }
    let nonincreasing = max_rel <= CONTRACTION_TOL;
    let bounded = distances.iter().all(|&d| d <= d0 * (1.0 + CONTRACTION_TOL));
    let fitted_rate = if distances.len() >= 2 && distances.iter().all(|&d| d > 0.0) {
        let pts: Vec<(f64, f64)> = times
            .iter()
            .zip(&distances)
            .map(|(&t, &d)| (t, d.ln()))
            .collect();
        Some(-least_squares_slope(&pts))
    } else {
        None
    };
    ContractionReport {
        passed: !inside_region || (nonincreasing && bounded),
        times,
        distances,
        max_relative_increase: max_rel,
        nonincreasing,
        bounded_by_initial: bounded,
        fitted_rate,
        inside_region,
    }
}

/// `slack(t) = ‖u₀‖² − ‖u(t)‖² − 2ν∫₀ᵗ‖∇u‖²ds` at every recorded step.
///
/// The integral uses the trapezoid rule with the Euler–Maclaurin end
/// correction `−h²/12·(g'(t) − g'(0))`, derivatives by second-order
/// differences.
pub fn energy_inequality(trajectory: &Trajectory, nu: f64) -> Result<Vec<(f64, f64)>> {
    if trajectory.config.forcing.is_active() {
        return Err(Error::invalid(
            "energy inequality check needs an unforced run",
        ));
    }
    let rec = &trajectory.records;
    let Some(first) = rec.first() else {
        return Ok(Vec::new());
    };
    let e0 = first.energy;
    let g: Vec<f64> = rec.iter().map(|r| r.enstrophy).collect();
    let t: Vec<f64> = rec.iter().map(|r| r.t).collect();
    let mut out = alloc::vec![(t[0], 0.0)];
    let mut trap = 0.0;
    for i in 1..rec.len() {
        let h = t[i] - t[i - 1];
        trap += 0.5 * h * (g[i] + g[i - 1]);
        let integral = if g.len() >= 3 {
            trap - h * h / 12.0 * (derivative(&g, h, i) - derivative(&g, h, 0))
        } else {
            trap
        };
        out.push((t[i], e0 - rec[i].energy - 2.0 * nu * integral));
    }
    Ok(out)
}

/// Second-order difference at index `i` on a uniform series of length ≥ 3.
fn derivative(g: &[f64], h: f64, i: usize) -> f64 {
    if i == 0 {
        (-3.0 * g[0] + 4.0 * g[1] - g[2]) / (2.0 * h)
    } else if i + 1 == g.len() {
        (3.0 * g[i] - 4.0 * g[i - 1] + g[i - 2]) / (2.0 * h)
    } else {
        (g[i + 1] - g[i - 1]) / (2.0 * h)
    }
}

/// `E_{hk}(t) = ∫ u_h u_k dx` and `K_{hk}(t) = ∫₀ᵗ∫ ∇u_h·∇u_k dx ds` at the
/// checkpoints.
#[derive(Clone, Debug)]
pub struct EnergyMatrices {
    pub times: Vec<f64>,
    pub e: Vec<[[f64; 3]; 3]>,
    pub k: Vec<[[f64; 3]; 3]>,
    pub kint: Vec<[[f64; 3]; 3]>,
}

pub fn energy_matrices(solver: &Solver, trajectory: &Trajectory) -> EnergyMatrices {
    let sp = solver.spectral();
    let vol = sp.l().powi(3);
    let mut out = EnergyMatrices {
        times: Vec::new(),
        e: Vec::new(),
        k: Vec::new(),
        kint: Vec::new(),
    };
    for c in &trajectory.checkpoints {
        let u = &c.state.u;
        let mut e = [[0.0; 3]; 3];
        let mut k = [[0.0; 3]; 3];
        for idx in 0..sp.len() {
            let kz = idx % (sp.n() / 2 + 1);
            let w = if kz == 0 || kz == sp.n() / 2 {
                1.0
            } else {
                2.0
            };
            let k2 = sp.k2(idx);
            for h in 0..3 {
                for j in h..3 {
                    let p = w * (u.c[h][idx] * u.c[j][idx].conj()).re;
                    e[h][j] += p;
                    k[h][j] += k2 * p;
                }
            }
        }
        for h in 0..3 {
            for j in h..3 {
                e[h][j] *= vol;
                k[h][j] *= vol;
                e[j][h] = e[h][j];
                k[j][h] = k[h][j];
            }
        }
        let kint = match (out.kint.last(), out.k.last(), out.times.last()) {
            (Some(prev), Some(kp), Some(&tp)) => {
                let dt = c.state.t - tp;
                core::array::from_fn(|h| {
                    core::array::from_fn(|j| prev[h][j] + 0.5 * dt * (kp[h][j] + k[h][j]))
                })
            }
            _ => [[0.0; 3]; 3],
        };
        out.times.push(c.state.t);
        out.e.push(e);
        out.k.push(k);
        out.kint.push(kint);
    }
    out
}

/// `‖u(t) − S(t)u₀‖₂` at the checkpoints.
pub fn distance_from_linear(solver: &Solver, trajectory: &Trajectory) -> Result<Vec<(f64, f64)>> {
    let sp = solver.spectral();
    let u0 = &trajectory.initial().u;
    trajectory
        .checkpoints
        .iter()
        .map(|c| {
            let lin = sp.stokes_semigroup(u0, c.state.t, solver.nu())?;
            Ok((c.state.t, sp.norm(&c.state.u.sub(&lin))))
        })
        .collect()
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DecayFit {
    pub alpha_hat: f64,
    pub slope: f64,
    pub samples: usize,
    pub positive: bool,
}

/// `α̂` at or below this counts as zero (round-off in the regression).
pub const POSITIVE_TOL: f64 = 1e-10;

/// Least-squares slope of `log d` against `log t` over `t ∈ [t_lo, t_hi]`;
/// `α̂ = −2·slope`.
pub fn decay_fit(series: &[(f64, f64)], t_lo: f64, t_hi: f64) -> Result<DecayFit> {
    const REQUIRED: usize = 3;
    let pts: Vec<(f64, f64)> = series
        .iter()
        .filter(|(t, d)| *t >= t_lo && *t <= t_hi && *t > 0.0 && *d > 0.0)
        .map(|(t, d)| (t.ln(), d.ln()))
        .collect();
    if pts.len() < REQUIRED {
        return Err(Error::WindowTooShort {
            samples: pts.len(),
            required: REQUIRED,
        });
    }
    let slope = least_squares_slope(&pts);
    let alpha_hat = -2.0 * slope;
    Ok(DecayFit {
        alpha_hat,
        slope,
        samples: pts.len(),
        positive: alpha_hat > POSITIVE_TOL,
    })
}

fn least_squares_slope(pts: &[(f64, f64)]) -> f64 {
    let n = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx) * (p.0 - mx)).sum();
    if sxx == 0.0 {
        0.0
    } else {
        sxy / sxx
    }
}
