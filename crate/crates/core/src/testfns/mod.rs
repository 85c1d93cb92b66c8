//! The countable family of smooth compactly supported test fields `E_k`.
//!
//! For level `l` the Jones exponent is `a_l = 3·2^{l−1}` and the mollifier
//! radius `ε_l = π/(4a_l)`. The profile `χ_l = f_l ∗ h_l` is supported in
//! `|t| ≤ 3ε_l = π/2^{l+1}` and equals `h_l(0) α_l e^{−it}` on the core
//! `|t| ≤ ε_l`. The scalar profile is
//!
//! `ξ(t) = χ_l(t) / (n α_l h_l(0) 3^{π+|x^k|})`,
//!
//! and component `j` of the vector field is `ξ(x_j − x^k_j)` times the
//! window `Π_m ω_l(x_m − x^k_m)`, where `ω_l` is the indicator of
//! `[−3ε_l/2, 3ε_l/2]` mollified with `f_{l+1}`. The window is 1 on the core
//! cube and vanishes outside the closed cube `B_k` of edge `π/a_l`.
//!
//! All tables live in scaled coordinates `s = t/ε_l` and are built eagerly
//! when the family is constructed; evaluation afterwards is read-only.

mod jones;
mod mollifier;

use alloc::vec::Vec;
use core::f64::consts::PI;
#[allow(unused_imports)] // inherent once std is linked
use num_traits::Float;

use num_complex::Complex64;

pub use jones::{jones_g, jones_h};
pub use mollifier::{mollifier, unit_bump_mass, BumpCdf, UnitBump};

use crate::quad;
use crate::rational::{unpair_index, RationalPoint};
use crate::{Error, Result};

use mollifier::hermite;

/// Level constants `a_l` and `ε_l`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct JonesParams {
    pub level: u32,
    pub a: f64,
    pub eps: f64,
}

impl JonesParams {
    pub fn new(level: u32) -> Self {
        assert!(level >= 1, "levels start at 1");
        let a = 3.0 * 2f64.powi(level as i32 - 1);
        JonesParams {
            level,
            a,
            eps: PI / (4.0 * a),
        }
    }

    /// Half-width `π/2^{l+1}` of the support of `χ_l`.
    pub fn support_half_width(&self) -> f64 {
        3.0 * self.eps
    }

    /// Edge `π/a_l` of the cubes at this level.
    pub fn cube_edge(&self) -> f64 {
        PI / self.a
    }
}

/// Which formula evaluates the scalar profile `ξ`.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum XiVariant {
    /// Numerical convolution `f_l ∗ h_l` (ground truth).
    #[default]
    Convolution,
    /// `e^{−i(x−x^k)}/(n 3^{π+|x^k|})` on the core, convolution elsewhere.
    ClosedFormCore,
    /// The literal real exponential `e^{(x−x^k)}/(n 3^{π+|x^k|})` on the
    /// whole support of `χ_l`, kept for comparison only.
    LiteralReal,
}

#[derive(Clone, Copy, Debug)]
pub struct TestFnConfig {
    /// Absolute tolerance for the Jones `h` quadrature.
    pub tol: f64,
    /// Gauss–Legendre panels across the mollifier support in the convolution.
    pub panels: usize,
    /// Intervals of the `χ` Hermite table on `s ∈ [−3, 3]`.
    pub chi_intervals: usize,
    /// Intervals of the `h` table on `s ∈ [−2, 2]`.
    pub h_intervals: usize,
    pub cdf_intervals: usize,
    pub variant: XiVariant,
}

impl Default for TestFnConfig {
    fn default() -> Self {
        TestFnConfig {
            tol: 1e-10,
            panels: 64,
            chi_intervals: 2048,
            h_intervals: 1024,
            cdf_intervals: 4096,
            variant: XiVariant::Convolution,
        }
    }
}

/// Tabulated `h_l` and `χ_l` for one level.
#[derive(Clone, Debug)]
pub struct LevelTable {
    pub params: JonesParams,
    /// `h_l(0)`, numerically `Γ(1 + 1/a_l)`.
    pub h0: Complex64,
    /// `α_l = ∫ e^{iz} f_l(z) dz`.
    pub alpha: f64,
    h_step: f64,
    h_values: Vec<Complex64>,
    chi_step: f64,
    chi_values: Vec<Complex64>,
    chi_derivs: Vec<Complex64>,
    panels: usize,
    bump: UnitBump,
}

impl LevelTable {
    pub fn build(level: u32, config: &TestFnConfig, bump: &UnitBump) -> Result<Self> {
        let params = JonesParams::new(level);
        let eps = params.eps;
        let h0 = jones_h(0.0, params.a, config.tol)?.value;

        let h_step = 4.0 / config.h_intervals as f64;
        let mut h_values = Vec::with_capacity(config.h_intervals + 1);
        for j in 0..=config.h_intervals {
            let w = (-2.0 + j as f64 * h_step).clamp(-2.0, 2.0);
            h_values.push(jones_h(w * eps, params.a, config.tol)?.value);
        }

        let alpha = quad::adaptive(
            |w: f64| (eps * w).cos() * bump.value(w),
            -1.0,
            1.0,
            1e-16,
            1e-15,
            2000,
        )?
        .value;

        let mut table = LevelTable {
            params,
            h0,
            alpha,
            h_step,
            h_values,
            chi_step: 6.0 / config.chi_intervals as f64,
            chi_values: Vec::new(),
            chi_derivs: Vec::new(),
            panels: config.panels,
            bump: bump.clone(),
        };
        let mut values = Vec::with_capacity(config.chi_intervals + 1);
        let mut derivs = Vec::with_capacity(config.chi_intervals + 1);
        for j in 0..=config.chi_intervals {
            let s = -3.0 + j as f64 * table.chi_step;
            let (v, d) = table.chi_direct(s);
            values.push(v);
            derivs.push(d);
        }
        table.chi_values = values;
        table.chi_derivs = derivs;
        Ok(table)
    }

    /// `h_l(ε_l w)` from the table by 4-point Lagrange interpolation.
    pub fn h_scaled(&self, w: f64) -> Complex64 {
        if !(-2.0..=2.0).contains(&w) {
            return Complex64::new(0.0, 0.0);
        }
        let n = self.h_values.len();
        let pos = (w + 2.0) / self.h_step;
        let j = (pos.floor() as isize - 1).clamp(0, n as isize - 4) as usize;
        let t = pos - j as f64;
        let mut acc = Complex64::new(0.0, 0.0);
        for a in 0..4 {
            let mut basis = 1.0;
            for b in 0..4 {
                if a != b {
                    basis *= (t - b as f64) / (a as f64 - b as f64);
                }
            }
            acc += self.h_values[j + a] * basis;
        }
        acc
    }

    /// Convolution `χ_l(ε_l s)` and `dχ/ds` by composite Gauss–Legendre.
    pub fn chi_direct(&self, s: f64) -> (Complex64, Complex64) {
        let lo = (s - 1.0).max(-2.0);
        let hi = (s + 1.0).min(2.0);
        let mut value = Complex64::new(0.0, 0.0);
        let mut deriv = Complex64::new(0.0, 0.0);
        if lo >= hi {
            return (value, deriv);
        }
        for (w, wt) in quad::composite_nodes(lo, hi, self.panels) {
            let h = self.h_scaled(w);
            value += h * (self.bump.value(s - w) * wt);
            deriv += h * (self.bump.derivative(s - w) * wt);
        }
        (value, deriv)
    }

    /// `χ_l(ε_l s)` and `dχ/ds` from the Hermite table.
    pub fn chi(&self, s: f64) -> (Complex64, Complex64) {
        if !(-3.0..=3.0).contains(&s) {
            return (Complex64::new(0.0, 0.0), Complex64::new(0.0, 0.0));
        }
        let pos = (s + 3.0) / self.chi_step;
        let j = (pos.floor() as usize).min(self.chi_values.len() - 2);
        let t = pos - j as f64;
        let (v, d) = hermite(
            self.chi_values[j],
            self.chi_values[j + 1],
            self.chi_derivs[j] * self.chi_step,
            self.chi_derivs[j + 1] * self.chi_step,
            t,
        );
        (v, d / self.chi_step)
    }
}

/// Cube `B_k = B_l(x^i)` with `k ↔ (l, i)`.
#[derive(Clone, Debug)]
pub struct CubeIndex {
    pub k: u64,
    pub level: u32,
    pub i: u64,
    pub center: RationalPoint,
    pub center_f64: Vec<f64>,
    /// Edge `π/a_l`.
    pub edge: f64,
    /// `3^{π+|x^k|}`.
    pub scale: f64,
}

impl CubeIndex {
    pub fn new(k: u64, dim: usize) -> Result<Self> {
        let (l, i) = unpair_index(k)?;
        if l > 60 {
            return Err(Error::invalid("cube level beyond double precision range"));
        }
        let level = l as u32;
        let center = RationalPoint::enumerate(i, dim)?;
        let norm = center.norm();
        let exponent = (PI + norm) * 3f64.ln();
        if exponent > f64::MAX_EXP as f64 * 2f64.ln() - 1.0 {
            return Err(Error::ScaleOverflow { center_norm: norm });
        }
        Ok(CubeIndex {
            k,
            level,
            i,
            center_f64: center.to_f64(),
            center,
            edge: JonesParams::new(level).cube_edge(),
            scale: exponent.exp(),
        })
    }

    pub fn dim(&self) -> usize {
        self.center_f64.len()
    }

    pub fn half_edge(&self) -> f64 {
        0.5 * self.edge
    }

    /// Diagonal length `r_l = (π/a_l)·√n`.
    pub fn diagonal(&self) -> f64 {
        self.edge * (self.dim() as f64).sqrt()
    }

    pub fn contains(&self, x: &[f64]) -> bool {
        x.iter()
            .zip(&self.center_f64)
            .all(|(xi, ci)| (xi - ci).abs() <= self.half_edge())
    }

    /// Axis-aligned bounds `[c − edge/2, c + edge/2]` along `axis`.
    pub fn bounds(&self, axis: usize) -> (f64, f64) {
        let c = self.center_f64[axis];
        (c - self.half_edge(), c + self.half_edge())
    }
}

/// One-dimensional factors of `E_k` along one axis at one coordinate.
#[derive(Clone, Copy, Debug, Default)]
pub struct AxisSample {
    pub xi: Complex64,
    pub dxi: Complex64,
    pub omega: f64,
    pub domega: f64,
}

/// The family `{E_k}` for a fixed dimension, with per-level tables.
#[derive(Clone, Debug)]
pub struct TestFamily {
    dim: usize,
    config: TestFnConfig,
    levels: Vec<LevelTable>,
    cdf: BumpCdf,
}

impl TestFamily {
    /// Builds tables for levels `1..=max_level`.
    pub fn new(dim: usize, max_level: u32, config: TestFnConfig) -> Result<Self> {
        if !(1..=3).contains(&dim) {
            return Err(Error::invalid("dimension must be 1, 2 or 3"));
        }
        if max_level == 0 || max_level > 60 {
            return Err(Error::invalid("max_level must lie in 1..=60"));
        }
        let bump = UnitBump::new();
        let levels = (1..=max_level)
            .map(|l| LevelTable::build(l, &config, &bump))
            .collect::<Result<Vec<_>>>()?;
        Ok(TestFamily {
            dim,
            config,
            levels,
            cdf: BumpCdf::new(bump, config.cdf_intervals),
        })
    }

    /// Family covering every cube `k ≤ max_k`.
    pub fn for_functionals(dim: usize, max_k: u64, config: TestFnConfig) -> Result<Self> {
        let max_level = max_level_upto(max_k)?;
        Self::new(dim, max_level, config)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn config(&self) -> &TestFnConfig {
        &self.config
    }

    pub fn max_level(&self) -> u32 {
        self.levels.len() as u32
    }

    pub fn level(&self, level: u32) -> &LevelTable {
        &self.levels[level as usize - 1]
    }

    pub fn cube(&self, k: u64) -> Result<CubeIndex> {
        let cube = CubeIndex::new(k, self.dim)?;
        if cube.level > self.max_level() {
            return Err(Error::invalid("cube level exceeds the family's tables"));
        }
        Ok(cube)
    }

    /// Window `ω_l(ε_l s)` and `dω/ds`.
    pub fn omega_scaled(&self, s: f64) -> (f64, f64) {
        // ω(s) = Φ(s + 3/2) − Φ(s − 3/2), Φ(u) = F̃(2u)
        let (p, dp) = self.cdf.eval(2.0 * (s + 1.5));
        let (m, dm) = self.cdf.eval(2.0 * (s - 1.5));
        (p - m, 2.0 * (dp - dm))
    }

    fn normalizer(&self, cube: &CubeIndex) -> Complex64 {
        let table = self.level(cube.level);
        table.h0 * (self.dim as f64 * table.alpha * cube.scale)
    }

    /// `ξ_l^k` at coordinate `x` along `axis`, with `dξ/dx`.
    pub fn xi_with_derivative(
        &self,
        cube: &CubeIndex,
        axis: usize,
        x: f64,
    ) -> (Complex64, Complex64) {
        let table = self.level(cube.level);
        let eps = table.params.eps;
        let t = x - cube.center_f64[axis];
        let s = t / eps;
        let n_scale = self.dim as f64 * cube.scale;
        match self.config.variant {
            XiVariant::ClosedFormCore if s.abs() <= 1.0 => {
                let v = Complex64::from_polar(1.0 / n_scale, -t);
                (v, v * Complex64::new(0.0, -1.0))
            }
            XiVariant::LiteralReal => {
                if s.abs() <= 3.0 {
                    let v = t.exp() / n_scale;
                    (Complex64::new(v, 0.0), Complex64::new(v, 0.0))
                } else {
                    (Complex64::new(0.0, 0.0), Complex64::new(0.0, 0.0))
                }
            }
            _ => {
                let norm = self.normalizer(cube);
                let (v, d) = table.chi(s);
                (v / norm, d / (norm * eps))
            }
        }
    }

    pub fn xi(&self, cube: &CubeIndex, axis: usize, x: f64) -> Complex64 {
        self.xi_with_derivative(cube, axis, x).0
    }

    /// `ξ` by direct convolution quadrature (no `χ` table).
    pub fn xi_direct(&self, cube: &CubeIndex, axis: usize, x: f64) -> Complex64 {
        let table = self.level(cube.level);
        let s = (x - cube.center_f64[axis]) / table.params.eps;
        table.chi_direct(s).0 / self.normalizer(cube)
    }

    /// Closed form `e^{−i(x−x^k)}/(n 3^{π+|x^k|})`, valid on the core.
    pub fn xi_closed_form(&self, cube: &CubeIndex, axis: usize, x: f64) -> Complex64 {
        let t = x - cube.center_f64[axis];
        Complex64::from_polar(1.0 / (self.dim as f64 * cube.scale), -t)
    }

    pub fn axis_sample(&self, cube: &CubeIndex, axis: usize, x: f64) -> AxisSample {
        let eps = self.level(cube.level).params.eps;
        let (lo, hi) = cube.bounds(axis);
        if x < lo || x > hi {
            return AxisSample::default();
        }
        let (xi, dxi) = self.xi_with_derivative(cube, axis, x);
        let (omega, domega) = self.omega_scaled((x - cube.center_f64[axis]) / eps);
        AxisSample {
            xi,
            dxi,
            omega,
            domega: domega / eps,
        }
    }

    /// `E_k(x)`; zero outside `B_k`.
    pub fn eval_e(&self, cube: &CubeIndex, x: &[f64]) -> Vec<Complex64> {
        let mut out = alloc::vec![Complex64::new(0.0, 0.0); self.dim];
        if !cube.contains(x) {
            return out;
        }
        let samples: Vec<AxisSample> = (0..self.dim)
            .map(|m| self.axis_sample(cube, m, x[m]))
            .collect();
        let window: f64 = samples.iter().map(|s| s.omega).product();
        for (j, o) in out.iter_mut().enumerate() {
            *o = samples[j].xi * window;
        }
        out
    }

    /// `∂E_k/∂x_axis`; zero outside `B_k`.
    pub fn eval_de(&self, cube: &CubeIndex, x: &[f64], axis: usize) -> Vec<Complex64> {
        let mut out = alloc::vec![Complex64::new(0.0, 0.0); self.dim];
        if !cube.contains(x) {
            return out;
        }
        let samples: Vec<AxisSample> = (0..self.dim)
            .map(|m| self.axis_sample(cube, m, x[m]))
            .collect();
        e_derivative(&samples, axis, &mut out);
        out
    }
}

/// Component values of `∂E/∂x_axis` from per-axis samples.
pub(crate) fn e_derivative(samples: &[AxisSample], axis: usize, out: &mut [Complex64]) {
    let others: f64 = samples
        .iter()
        .enumerate()
        .filter(|(m, _)| *m != axis)
        .map(|(_, s)| s.omega)
        .product();
    let sa = &samples[axis];
    for (j, o) in out.iter_mut().enumerate() {
        *o = if j == axis {
            (sa.dxi * sa.omega + sa.xi * sa.domega) * others
        } else {
            let rest: f64 = samples
                .iter()
                .enumerate()
                .filter(|(m, _)| *m != axis && *m != j)
                .map(|(_, s)| s.omega)
                .product();
            samples[j].xi * samples[j].omega * sa.domega * rest
        };
    }
}

/// Largest level among `k ∈ 1..=max_k`.
pub fn max_level_upto(max_k: u64) -> Result<u32> {
    if max_k == 0 {
        return Err(Error::invalid("need at least one functional"));
    }
    let (l, i) = unpair_index(max_k)?;
    // the diagonal through max_k holds levels up to d; (d, 1) may come later
    let d = l + i - 1;
    let mut best = 1;
    for k in (d * (d - 1) / 2 + 1)..=max_k {
        best = best.max(unpair_index(k)?.0);
    }
    Ok(best.max(d.saturating_sub(1)) as u32)
}
