use alloc::vec::Vec;
use core::f64::consts::PI;

#[allow(unused_imports)] // inherent once std is linked
use num_traits::Float;

use super::field::{Spectral, SpectralField};
use crate::{Error, Result};

/// Spatial profile of the body force.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ForcingProfile {
    None,
    /// Taylor–Green cell `(sin x cos y cos z, −cos x sin y cos z, 0)`.
    TaylorGreen,
    /// Shear `(sin y, 0, 0)`.
    Kolmogorov,
}

/// `f(t) = amplitude · (1+t)^{−θ} (2 + sin ωt)/3 · profile(x)`.
///
/// The envelope is Lipschitz, hence θ-Hölder on bounded intervals.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Forcing {
    pub profile: ForcingProfile,
    pub amplitude: f64,
    pub theta: f64,
    pub omega: f64,
}

impl Forcing {
    pub fn none() -> Self {
        Forcing {
            profile: ForcingProfile::None,
            amplitude: 0.0,
            theta: 0.5,
            omega: 1.0,
        }
    }

    pub fn is_active(&self) -> bool {
        self.profile != ForcingProfile::None && self.amplitude != 0.0
    }

    pub fn envelope(&self, t: f64) -> f64 {
        (1.0 + t).powf(-self.theta) * (2.0 + (self.omega * t).sin()) / 3.0
    }

    /// Projected, dealiased spatial profile scaled by the amplitude.
    pub fn profile_field(&self, spectral: &Spectral) -> SpectralField {
        let s = 2.0 * PI / spectral.l();
        let a = self.amplitude;
        let mut f = match self.profile {
            ForcingProfile::None => return spectral.zeros(),
            ForcingProfile::TaylorGreen => spectral.taylor_green(a),
            ForcingProfile::Kolmogorov => spectral.from_fn(|x| [a * (s * x[1]).sin(), 0.0, 0.0]),
        };
        spectral.dealias(&mut f);
        spectral.leray_project(&mut f);
        f
    }
}

/// Parameters of the inhomogeneous variant: viscosity `μ/ρ` with
/// `0 ≤ ρ ≤ β`; `floor` keeps `μ/ρ` finite where `ρ` vanishes.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DensityConfig {
    pub mu: f64,
    pub beta: f64,
    pub floor: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct SolverConfig {
    pub nu: f64,
    pub n: usize,
    pub l: f64,
    pub dt: f64,
    pub t_end: f64,
    pub forcing: Forcing,
    pub dealias: bool,
    pub nonlinear: bool,
    pub seed: u64,
    /// Steps between stored checkpoints; `t = 0` and `t_end` are always kept.
    pub checkpoint_every: usize,
    pub cfl_limit: f64,
    pub density: Option<DensityConfig>,
}

impl Default for SolverConfig {
    fn default() -> Self {
        SolverConfig {
            nu: 0.1,
            n: 32,
            l: 2.0 * PI,
            dt: 0.005,
            t_end: 2.0,
            forcing: Forcing::none(),
            dealias: true,
            nonlinear: true,
            seed: 0,
            checkpoint_every: 10,
            cfl_limit: 0.5,
            density: None,
        }
    }
}

impl SolverConfig {
    /// Viscosity carried by the integrating factor.
    pub fn viscosity(&self) -> f64 {
        match self.density {
            Some(d) => d.mu / d.beta,
            None => self.nu,
        }
    }

    pub fn steps(&self) -> Result<usize> {
        let ratio = self.t_end / self.dt;
        let steps = ratio.round();
        if (ratio - steps).abs() > 1e-9 * ratio.max(1.0) {
            return Err(Error::invalid("T must be an integer multiple of dt"));
        }
        Ok(steps as usize)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.dt > 0.0 && self.dt.is_finite()) {
            return Err(Error::invalid("dt must be positive"));
        }
        if !(self.t_end >= 0.0 && self.t_end.is_finite()) {
            return Err(Error::invalid("T must be nonnegative"));
        }
        if !(self.cfl_limit > 0.0) {
            return Err(Error::invalid("CFL limit must be positive"));
        }
        if self.checkpoint_every == 0 {
            return Err(Error::invalid(
                "checkpoint cadence must be at least one step",
            ));
        }
        match self.density {
            Some(d) => {
                if !(d.mu > 0.0 && d.beta > 0.0 && d.floor > 0.0 && d.floor <= d.beta) {
                    return Err(Error::invalid(
                        "density needs mu > 0, beta > 0 and 0 < floor <= beta",
                    ));
                }
            }
            None => {
                if !(self.nu > 0.0 && self.nu.is_finite()) {
                    return Err(Error::invalid("nu must be positive"));
                }
            }
        }
        let f = &self.forcing;
        if f.is_active() && !(f.theta > 0.0 && f.theta < 1.0) {
            return Err(Error::invalid("forcing exponent theta must lie in (0, 1)"));
        }
        if !f.amplitude.is_finite() || !f.omega.is_finite() {
            return Err(Error::invalid("forcing parameters must be finite"));
        }
        self.steps()?;
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct State {
    pub t: f64,
    pub u: SpectralField,
    pub rho: Option<Vec<f64>>,
}

/// Diagnostics recorded after every step (and at `t = 0`).
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct StepRecord {
    pub t: f64,
    /// `‖u‖₂²`.
    pub energy: f64,
    /// `‖∇u‖₂²`.
    pub enstrophy: f64,
    pub div_max: f64,
    /// `‖Pf(t)‖₂`.
    pub forcing_norm: f64,
    pub rho_min: f64,
    pub rho_max: f64,
    pub rho_mass: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Checkpoint {
    pub step: usize,
    pub state: State,
    pub sd_norm: Option<f64>,
}

#[derive(Clone, Debug)]
pub struct Trajectory {
    pub config: SolverConfig,
    pub records: Vec<StepRecord>,
    pub checkpoints: Vec<Checkpoint>,
}

impl Trajectory {
    pub fn initial(&self) -> &State {
        &self.checkpoints[0].state
    }

    pub fn last(&self) -> &State {
        &self.checkpoints[self.checkpoints.len() - 1].state
    }
}

/// Stepper bound to one configuration.
#[derive(Clone, Debug)]
pub struct Solver {
    config: SolverConfig,
    spectral: Spectral,
    nu: f64,
    factor: Vec<f64>,
    forcing: SpectralField,
}

impl Solver {
    pub fn new(config: SolverConfig) -> Result<Self> {
        config.validate()?;
        let mut spectral = Spectral::new(config.n, config.l)?;
        if !config.dealias {
            spectral = spectral.without_dealiasing();
        }
        let nu = config.viscosity();
        let factor = (0..spectral.len())
            .map(|idx| (-nu * spectral.k2(idx) * config.dt).exp())
            .collect();
        let forcing = config.forcing.profile_field(&spectral);
        Ok(Solver {
            config,
            spectral,
            nu,
            factor,
            forcing,
        })
    }

    pub fn config(&self) -> &SolverConfig {
        &self.config
    }

    pub fn spectral(&self) -> &Spectral {
        &self.spectral
    }

    /// Viscosity of the integrating factor (`ν`, or `μ/β`).
    pub fn nu(&self) -> f64 {
        self.nu
    }

    /// `Pf(t)`.
    pub fn forcing_at(&self, t: f64) -> SpectralField {
        if self.config.forcing.is_active() {
            self.forcing.scaled(self.config.forcing.envelope(t))
        } else {
            self.spectral.zeros()
        }
    }

    /// `dt · Σ_j max|u_j| / h`.
    pub fn courant(&self, physical: &[Vec<f64>; 3]) -> f64 {
        let speed: f64 = physical
            .iter()
            .map(|c| c.iter().fold(0.0f64, |m, v| m.max(v.abs())))
            .sum();
        self.config.dt * speed / self.spectral.spacing()
    }

    fn check_cfl(&self, physical: &[Vec<f64>; 3]) -> Result<()> {
        let courant = self.courant(physical);
        if !(courant <= self.config.cfl_limit) {
            if !courant.is_finite() {
                return Err(Error::NonFinite { time: f64::NAN });
            }
            return Err(Error::Cfl {
                courant,
                limit: self.config.cfl_limit,
            });
        }
        Ok(())
    }

    /// Explicit part `−B(u,u) + Pf(t) + P[(μ/ρ − μ/β)Δu]`.
    fn explicit(
        &self,
        u: &SpectralField,
        physical: &[Vec<f64>; 3],
        rho: Option<&[f64]>,
        t: f64,
    ) -> SpectralField {
        let sp = &self.spectral;
        let mut out = if self.config.nonlinear {
            let mut b = sp.nonlinear_from_physical(physical, physical);
            b.scale(-1.0);
            b
        } else {
            sp.zeros()
        };
        if self.config.forcing.is_active() {
            out.axpy(self.config.forcing.envelope(t), &self.forcing);
        }
        if let (Some(d), Some(rho)) = (self.config.density, rho) {
            let lap = sp.to_physical(&sp.laplacian(u));
            let excess: Vec<f64> = rho
                .iter()
                .map(|r| d.mu / r.max(d.floor) - self.nu)
                .collect();
            let mut prod = alloc::vec![0.0; excess.len()];
            for (j, comp) in lap.iter().enumerate() {
                for ((p, e), v) in prod.iter_mut().zip(&excess).zip(comp) {
                    *p = e * v;
                }
                let spec = sp.forward(&prod);
                for (idx, s) in spec.into_iter().enumerate() {
                    if sp.retained(idx) {
                        out.c[j][idx] += s;
                    }
                }
            }
            sp.leray_project(&mut out);
        }
        out
    }

    /// `A(u, t) = −νAu − B(u,u) + Pf(t)` (plus the variable-viscosity term).
    pub fn operator(
        &self,
        u: &SpectralField,
        rho: Option<&[f64]>,
        t: f64,
    ) -> Result<SpectralField> {
        self.spectral.check(u)?;
        let physical = self.spectral.to_physical(u);
        let mut out = self.explicit(u, &physical, rho, t);
        out.axpy(self.nu, &self.spectral.laplacian(u));
        Ok(out)
    }

    /// Explicit part only, as it enters the mild formulation.
    pub fn mild_integrand(
        &self,
        u: &SpectralField,
        rho: Option<&[f64]>,
        t: f64,
    ) -> Result<SpectralField> {
        self.spectral.check(u)?;
        let physical = self.spectral.to_physical(u);
        Ok(self.explicit(u, &physical, rho, t))
    }

    fn apply_factor(&self, u: &mut SpectralField) {
        for comp in &mut u.c {
            for (v, e) in comp.iter_mut().zip(&self.factor) {
                *v *= *e;
            }
        }
    }

    fn check_state(&self, state: &State) -> Result<()> {
        self.spectral.check(&state.u)?;
        match (&state.rho, self.config.density) {
            (Some(r), Some(_)) if r.len() != self.config.n.pow(3) => Err(Error::GridMismatch),
            (None, Some(_)) => Err(Error::invalid("inhomogeneous run needs an initial density")),
            (Some(_), None) => Err(Error::invalid("density given but no density parameters")),
            _ => Ok(()),
        }
    }

    /// One integrating-factor Heun step of length `dt`.
    pub fn step(&self, state: &State) -> Result<State> {
        self.check_state(state)?;
        let sp = &self.spectral;
        let dt = self.config.dt;
        let t = state.t;
        let pu = sp.to_physical(&state.u);
        self.check_cfl(&pu)?;
        let rho = state.rho.as_deref();

        let mut n0 = self.explicit(&state.u, &pu, rho, t);
        self.apply_factor(&mut n0);
        let mut base = state.u.clone();
        self.apply_factor(&mut base);

        let mut star = base.clone();
        star.axpy(dt, &n0);
        let ps = sp.to_physical(&star);

        let rho_next = match rho {
            Some(r) => {
                let mid: [Vec<f64>; 3] = core::array::from_fn(|j| {
                    pu[j]
                        .iter()
                        .zip(&ps[j])
                        .map(|(a, b)| 0.5 * (a + b))
                        .collect()
                });
                Some(advect(sp, r, &mid, dt))
            }
            None => None,
        };
        let n1 = self.explicit(&star, &ps, rho_next.as_deref(), t + dt);

        let mut next = base;
        next.axpy(0.5 * dt, &n0);
        next.axpy(0.5 * dt, &n1);
        let t_next = t + dt;
        if !next.is_finite()
            || rho_next
                .as_ref()
                .is_some_and(|r| r.iter().any(|v| !v.is_finite()))
        {
            return Err(Error::NonFinite { time: t_next });
        }
        Ok(State {
            t: t_next,
            u: next,
            rho: rho_next,
        })
    }

    pub fn record(&self, state: &State) -> StepRecord {
        let sp = &self.spectral;
        let (rho_min, rho_max, rho_mass) = match &state.rho {
            Some(r) => {
                let h3 = sp.spacing().powi(3);
                (
                    r.iter().cloned().fold(f64::INFINITY, f64::min),
                    r.iter().cloned().fold(f64::NEG_INFINITY, f64::max),
                    h3 * r.iter().sum::<f64>(),
                )
            }
            None => (f64::NAN, f64::NAN, f64::NAN),
        };
        StepRecord {
            t: state.t,
            energy: sp.energy(&state.u),
            enstrophy: sp.enstrophy(&state.u),
            div_max: sp.divergence_max(&state.u),
            forcing_norm: sp.norm(&self.forcing_at(state.t)),
            rho_min,
            rho_max,
            rho_mass,
        }
    }

    /// Runs from `u0` (and `rho0` for inhomogeneous runs) to `t_end`.
    pub fn solve(&self, u0: SpectralField, rho0: Option<Vec<f64>>) -> Result<Trajectory> {
        let steps = self.config.steps()?;
        let mut state = State {
            t: 0.0,
            u: u0,
            rho: rho0,
        };
        self.check_state(&state)?;
        if let (Some(r), Some(d)) = (&state.rho, self.config.density) {
            if r.iter().any(|&v| !(0.0..=d.beta).contains(&v)) {
                return Err(Error::invalid("initial density must lie in [0, beta]"));
            }
        }
        self.check_cfl(&self.spectral.to_physical(&state.u))?;
        let mut records = alloc::vec![self.record(&state)];
        let mut checkpoints = alloc::vec![Checkpoint {
            step: 0,
            state: state.clone(),
            sd_norm: None,
        }];
        for s in 1..=steps {
            let mut next = self.step(&state)?;
            // keep the clock on the exact grid s·dt
            next.t = s as f64 * self.config.dt;
            state = next;
            records.push(self.record(&state));
            if s % self.config.checkpoint_every == 0 || s == steps {
                checkpoints.push(Checkpoint {
                    step: s,
                    state: state.clone(),
                    sd_norm: None,
                });
            }
        }
        Ok(Trajectory {
            config: self.config.clone(),
            records,
            checkpoints,
        })
    }
}

/// Semi-Lagrangian transport over one step: `ρ'(x) = ρ(x − dt·u(x − dt/2·u(x)))`.
pub(crate) fn advect(sp: &Spectral, rho: &[f64], u: &[Vec<f64>; 3], dt: f64) -> Vec<f64> {
    let n = sp.n();
    let h = sp.spacing();
    let mut out = Vec::with_capacity(rho.len());
    for idx in 0..rho.len() {
        let node = [
            (idx / (n * n)) as f64,
            ((idx / n) % n) as f64,
            (idx % n) as f64,
        ];
        // positions in units of h, relative to the first node
        let v = [u[0][idx], u[1][idx], u[2][idx]];
        let mid: [f64; 3] = core::array::from_fn(|a| node[a] - 0.5 * dt * v[a] / h);
        let vm: [f64; 3] = core::array::from_fn(|a| periodic_trilinear(n, &u[a], mid));
        let dep: [f64; 3] = core::array::from_fn(|a| node[a] - dt * vm[a] / h);
        out.push(periodic_trilinear(n, rho, dep));
    }
    out
}

/// Trilinear interpolation of nodal values at fractional index `s`.
///
/// Nested `a + f(b − a)` keeps constants exact and stays inside the data
/// range.
pub(crate) fn periodic_trilinear(n: usize, values: &[f64], s: [f64; 3]) -> f64 {
    let mut lo = [0usize; 3];
    let mut hi = [0usize; 3];
    let mut frac = [0.0; 3];
    for a in 0..3 {
        let fl = s[a].floor();
        frac[a] = s[a] - fl;
        lo[a] = (fl as i64).rem_euclid(n as i64) as usize;
        hi[a] = (lo[a] + 1) % n;
    }
    let lerp = |a: f64, b: f64, f: f64| a + f * (b - a);
    let at = |i: usize, j: usize, k: usize| values[(i * n + j) * n + k];
    let edge = |i: usize, j: usize| lerp(at(i, j, lo[2]), at(i, j, hi[2]), frac[2]);
    let face = |i: usize| lerp(edge(i, lo[1]), edge(i, hi[1]), frac[1]);
    lerp(face(lo[0]), face(hi[0]), frac[0])
}

/// Mild-form residual `‖u(t_c) − S(t_c)u₀ − ∫₀^{t_c} S(t_c−s)N(s)ds‖₂` at
/// every checkpoint, with the integral by the trapezoid rule on the
/// checkpoint times.
pub fn duhamel_residual(solver: &Solver, trajectory: &Trajectory) -> Result<Vec<(f64, f64)>> {
    let sp = solver.spectral();
    let nu = solver.nu();
    let cps = &trajectory.checkpoints;
    let Some(first) = cps.first() else {
        return Ok(Vec::new());
    };
    let u0 = &first.state.u;
    let integrand =
        |c: &Checkpoint| solver.mild_integrand(&c.state.u, c.state.rho.as_deref(), c.state.t);
    let mut out = alloc::vec![(first.state.t, 0.0)];
    let mut integral = sp.zeros();
    let mut n_prev = integrand(first)?;
    for w in cps.windows(2) {
        let delta = w[1].state.t - w[0].state.t;
        let n_next = integrand(&w[1])?;
        let mut carried = sp.stokes_semigroup(&integral, delta, nu)?;
        let pushed = sp.stokes_semigroup(&n_prev, delta, nu)?;
        carried.axpy(0.5 * delta, &pushed);
        carried.axpy(0.5 * delta, &n_next);
        integral = carried;
        let t = w[1].state.t - first.state.t;
        let mut r = w[1].state.u.sub(&sp.stokes_semigroup(u0, t, nu)?);
        r.axpy(-1.0, &integral);
        out.push((w[1].state.t, sp.norm(&r)));
        n_prev = n_next;
    }
    Ok(out)
}

/// `lo + (hi − lo)(1 + sin x sin y sin z)/2` on the nodes (coordinates
/// scaled by `2π/L`).
pub fn density_profile(sp: &Spectral, lo: f64, hi: f64) -> Vec<f64> {
    let s = 2.0 * PI / sp.l();
    let p = sp.sample(|x| {
        let v = (s * x[0]).sin() * (s * x[1]).sin() * (s * x[2]).sin();
        [lo + (hi - lo) * 0.5 * (1.0 + v), 0.0, 0.0]
    });
    let [rho, _, _] = p;
    rho
}
