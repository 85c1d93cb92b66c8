//! The functionals `F_k(f) = ∫ E_k·f`, truncated SD^p norms with certified
//! tails, Alexiewicz norms and Vitali variation on sampled fields.
//!
//! `F_k` integrates `E_k` against the multilinear interpolant of the
//! samples. Each component of `E_k` is a tensor product of 1-D factors, so
//! the integral reduces to nodal weights built from 1-D Gauss–Legendre
//! moments against the grid's hat functions. With `t_k = 2^{−k}` and the per-functional bound
//! `|F_k(f)| ≤ sup|E_k|·‖f‖₁ ≤ ‖f‖₁/√n`, the tail beyond `K` terms is
//! geometric.

use alloc::vec;
use alloc::vec::Vec;

use num_complex::Complex64;
#[allow(unused_imports)] // inherent once std is linked
use num_traits::Float;

use crate::field::{difference, Grid, SampledField, ScalarField};
use crate::quad;
use crate::testfns::{AxisSample, CubeIndex, TestFamily};
use crate::{Error, Result};

const ZERO: Complex64 = Complex64 { re: 0.0, im: 0.0 };

/// Quadrature settings for `F_k`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SdConfig {
    /// Number of functionals summed.
    pub k_max: u64,
    /// Gauss–Legendre panels per cube edge for the one-dimensional moments;
    /// panels are further split at grid lines.
    pub panels: usize,
}

impl Default for SdConfig {
    fn default() -> Self {
        SdConfig {
            k_max: 200,
            panels: 64,
        }
    }
}

/// A single `F_k(f)`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct FunctionalValue {
    pub k: u64,
    pub value: Complex64,
    /// The cube edge is below the grid spacing.
    pub under_resolved: bool,
}

/// A truncated SD value with the bound on the omitted terms.
#[derive(Clone, Debug, PartialEq)]
pub struct SdValue<T> {
    pub value: T,
    pub k_max: u64,
    pub tail_bound: f64,
    /// Cubes whose functional was flagged as under-resolved.
    pub under_resolved: Vec<u64>,
}

/// One-dimensional factor of a tensor kernel.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Factor {
    Omega,
    XiOmega,
    DOmega,
    DXiOmega,
}

/// Per-axis nodal weights `∫ K(x) φ_i(x) dx` of each factor against the
/// piecewise-linear hat functions `φ_i` of the grid.
struct AxisWeights {
    first: usize,
    weights: [Vec<Complex64>; 4],
}

/// Nodal weights of `E_k` on a grid: pairing with the multilinear
/// interpolant is an exact finite sum once the 1-D moments are known.
struct CubeRule {
    axes: Vec<AxisWeights>,
}

impl CubeRule {
    fn new(family: &TestFamily, cube: &CubeIndex, grid: &Grid, panels: usize) -> Option<Self> {
        let eps = family.level(cube.level).params.eps;
        let mut axes = Vec::with_capacity(grid.dim());
        for a in 0..grid.dim() {
            let (c_lo, c_hi) = cube.bounds(a);
            let lo = c_lo.max(grid.lo(a));
            let hi = c_hi.min(grid.hi(a));
            if !(hi > lo) {
                return None;
            }
            let c = cube.center_f64[a];
            let breaks = panel_breaks(
                grid,
                a,
                lo,
                hi,
                &[c - eps, c + eps],
                cube.edge / panels.max(1) as f64,
            );
            let (first, _) = grid.locate(a, lo)?;
            let (last, _) = grid.locate(a, hi)?;
            let len = last + 2 - first;
            let mut weights: [Vec<Complex64>; 4] = core::array::from_fn(|_| vec![ZERO; len]);
            for (x, w) in quad::nodes_on_breaks(&breaks) {
                let Some((cell, t)) = grid.locate(a, x) else {
                    continue;
                };
                let s = family.axis_sample(cube, a, x);
                let k = [
                    Complex64::new(s.omega, 0.0),
                    s.xi * s.omega,
                    Complex64::new(s.domega, 0.0),
                    s.dxi * s.omega + s.xi * s.domega,
                ];
                let i = cell - first;
                for (wv, kv) in weights.iter_mut().zip(k) {
                    wv[i] += kv * (w * (1.0 - t));
                    wv[i + 1] += kv * (w * t);
                }
            }
            axes.push(AxisWeights { first, weights });
        }
        Some(CubeRule { axes })
    }

    /// `Σ_j ∫ Π_m factor(j, m)(x_m) · f_j(x) dx` for the interpolant of `f`.
    fn pair(&self, field: &SampledField, factor: impl Fn(usize, usize) -> Factor) -> Complex64 {
        let dim = self.axes.len();
        let grid = &field.grid;
        let counts: Vec<usize> = self.axes.iter().map(|a| a.weights[0].len()).collect();
        let total: usize = counts.iter().product();
        let mut acc = ZERO;
        let mut idx = [0usize; 3];
        for j in 0..dim {
            let w: Vec<&Vec<Complex64>> = (0..dim)
                .map(|m| &self.axes[m].weights[factor(j, m) as usize])
                .collect();
            let values = &field.components[j];
            for flat in 0..total {
                let mut rem = flat;
                let mut weight = Complex64::new(1.0, 0.0);
                for a in (0..dim).rev() {
                    let r = rem % counts[a];
                    rem /= counts[a];
                    weight *= w[a][r];
                    idx[a] = self.axes[a].first + r;
                }
                if weight != ZERO {
                    acc += weight * values[grid.index(&idx[..dim])];
                }
            }
        }
        acc
    }
}

/// Break points covering `[lo, hi]`: grid lines, `extra` points inside,
/// and subdivision so no panel exceeds `max_width`.
fn panel_breaks(
    grid: &Grid,
    axis: usize,
    lo: f64,
    hi: f64,
    extra: &[f64],
    max_width: f64,
) -> Vec<f64> {
    let mut lines = vec![lo, hi];
    for i in 0..grid.shape()[axis] {
        let x = grid.coord(axis, i);
        if x > lo && x < hi {
            lines.push(x);
        }
    }
    lines.extend(extra.iter().copied().filter(|&x| x > lo && x < hi));
    lines.sort_by(|a, b| a.total_cmp(b));
    lines.dedup();
    let mut breaks = Vec::with_capacity(lines.len() * 4);
    for w in lines.windows(2) {
        let pieces = ((w[1] - w[0]) / max_width).ceil().max(1.0) as usize;
        for p in 0..pieces {
            breaks.push(w[0] + (w[1] - w[0]) * p as f64 / pieces as f64);
        }
    }
    breaks.push(hi);
    breaks
}

fn is_under_resolved(cube: &CubeIndex, grid: &Grid) -> bool {
    cube.edge < grid.max_step()
}

/// `F_k(f) = ∫ E_k·f` over `B_k ∩ box` (zero if they are disjoint), with
/// `f` the multilinear interpolant of the samples.
pub fn functional_f(
    family: &TestFamily,
    cube: &CubeIndex,
    field: &SampledField,
    config: &SdConfig,
) -> Result<FunctionalValue> {
    check_dims(family, field)?;
    let value = match CubeRule::new(family, cube, &field.grid, config.panels) {
        Some(rule) => rule.pair(field, |j, m| {
            if j == m {
                Factor::XiOmega
            } else {
                Factor::Omega
            }
        }),
        None => ZERO,
    };
    Ok(FunctionalValue {
        k: cube.k,
        value,
        under_resolved: is_under_resolved(cube, &field.grid),
    })
}

/// `∫ ∂E_k/∂x_axis · f` over `B_k ∩ box`.
pub fn functional_df(
    family: &TestFamily,
    cube: &CubeIndex,
    field: &SampledField,
    axis: usize,
    config: &SdConfig,
) -> Result<Complex64> {
    check_dims(family, field)?;
    if axis >= field.dim() {
        return Err(Error::invalid("derivative axis out of range"));
    }
    let factor = |j: usize, m: usize| match (j == axis, m == axis, m == j) {
        (true, true, _) => Factor::DXiOmega,
        (false, true, _) => Factor::DOmega,
        (_, false, true) => Factor::XiOmega,
        _ => Factor::Omega,
    };
    Ok(
        match CubeRule::new(family, cube, &field.grid, config.panels) {
            Some(rule) => rule.pair(field, factor),
            None => ZERO,
        },
    )
}

fn check_dims(family: &TestFamily, field: &SampledField) -> Result<()> {
    if family.dim() != field.dim() {
        return Err(Error::invalid("family and field dimensions differ"));
    }
    Ok(())
}

/// `F_1(f), …, F_K(f)` together with the per-functional bound on `f`.
#[derive(Clone, Debug, PartialEq)]
pub struct FunctionalSet {
    pub values: Vec<FunctionalValue>,
    /// Bound on `|F_k(f)|` valid for every `k`.
    pub bound: f64,
}

impl FunctionalSet {
    pub fn compute(family: &TestFamily, field: &SampledField, config: &SdConfig) -> Result<Self> {
        if config.k_max == 0 {
            return Err(Error::invalid("K must be positive"));
        }
        let values = (1..=config.k_max)
            .map(|k| functional_f(family, &family.cube(k)?, field, config))
            .collect::<Result<Vec<_>>>()?;
        Ok(Self::from_values(values, field))
    }

    /// Wraps precomputed `F_k` values (ordered by `k`, starting at 1).
    pub fn from_values(values: Vec<FunctionalValue>, field: &SampledField) -> Self {
        FunctionalSet {
            values,
            bound: functional_bound(field),
        }
    }

    pub fn k_max(&self) -> u64 {
        self.values.len() as u64
    }

    fn flagged(&self) -> Vec<u64> {
        self.values
            .iter()
            .filter(|v| v.under_resolved)
            .map(|v| v.k)
            .collect()
    }
}

/// `‖f‖₁/√n`, bounding `|F_k(f)|` for every `k` since `|E_k| < 1/√n`.
pub fn functional_bound(field: &SampledField) -> f64 {
    field.norm(1.0) / (field.dim() as f64).sqrt()
}

/// `t_k = 2^{−k}`.
pub fn weight(k: u64) -> f64 {
    0.5f64.powi(k.min(2000) as i32)
}

/// Hermitian form `Σ_{k≤K} t_k F_k(f) conj(F_k(g))` from precomputed sets.
pub fn sd_inner_sets(f: &FunctionalSet, g: &FunctionalSet) -> Result<SdValue<Complex64>> {
    if f.k_max() != g.k_max() {
        return Err(Error::invalid("functional sets truncated at different K"));
    }
    let value = f.values.iter().zip(&g.values).fold(ZERO, |acc, (a, b)| {
        acc + a.value * b.value.conj() * weight(a.k)
    });
    let mut flagged = f.flagged();
    flagged.extend(g.flagged());
    flagged.sort_unstable();
    flagged.dedup();
    Ok(SdValue {
        value,
        k_max: f.k_max(),
        tail_bound: weight(f.k_max()) * f.bound * g.bound,
        under_resolved: flagged,
    })
}

/// Truncated SD² inner product.
pub fn sd_inner(
    family: &TestFamily,
    f: &SampledField,
    g: &SampledField,
    config: &SdConfig,
) -> Result<SdValue<Complex64>> {
    f.same_grid(g)?;
    let fs = FunctionalSet::compute(family, f, config)?;
    let gs = FunctionalSet::compute(family, g, config)?;
    sd_inner_sets(&fs, &gs)
}

/// Truncated SD^p norm from a precomputed set.
pub fn sd_norm_p_set(set: &FunctionalSet, p: f64) -> Result<SdValue<f64>> {
    if !(p >= 1.0) {
        return Err(Error::invalid("p must be >= 1"));
    }
    let (value, tail_bound) = if p.is_infinite() {
        let sup = set
            .values
            .iter()
            .fold(0.0, |m: f64, v| m.max(v.value.norm()));
        (sup, (set.bound - sup).max(0.0))
    } else if p == 2.0 {
        let s: f64 = set
            .values
            .iter()
            .map(|v| weight(v.k) * v.value.norm_sqr())
            .sum();
        (s.sqrt(), weight(set.k_max()).sqrt() * set.bound)
    } else {
        let s: f64 = set
            .values
            .iter()
            .map(|v| weight(v.k) * v.value.norm().powf(p))
            .sum();
        (
            s.powf(1.0 / p),
            weight(set.k_max()).powf(1.0 / p) * set.bound,
        )
    };
    Ok(SdValue {
        value,
        k_max: set.k_max(),
        tail_bound,
        under_resolved: set.flagged(),
    })
}

/// Truncated SD^p norm, `p ∈ [1, ∞]`.
pub fn sd_norm_p(
    family: &TestFamily,
    f: &SampledField,
    p: f64,
    config: &SdConfig,
) -> Result<SdValue<f64>> {
    if !(p >= 1.0) {
        return Err(Error::invalid("p must be >= 1"));
    }
    sd_norm_p_set(&FunctionalSet::compute(family, f, config)?, p)
}

/// SD² norm.
pub fn sd_norm(family: &TestFamily, f: &SampledField, config: &SdConfig) -> Result<SdValue<f64>> {
    sd_norm_p(family, f, 2.0, config)
}

/// `‖E_k‖_q` (pointwise Euclidean magnitude) by composite Gauss–Legendre
/// over the whole cube; `q = ∞` takes the maximum over the nodes and the
/// center.
pub fn e_norm(family: &TestFamily, cube: &CubeIndex, q: f64, panels: usize) -> f64 {
    let dim = family.dim();
    let axes: Vec<Vec<(f64, AxisSample)>> = (0..dim)
        .map(|a| {
            let (lo, hi) = cube.bounds(a);
            let mut nodes: Vec<(f64, AxisSample)> = quad::composite_nodes(lo, hi, panels)
                .into_iter()
                .map(|(x, w)| (w, family.axis_sample(cube, a, x)))
                .collect();
            if q.is_infinite() {
                nodes.push((0.0, family.axis_sample(cube, a, cube.center_f64[a])));
            }
            nodes
        })
        .collect();
    let counts: Vec<usize> = axes.iter().map(|a| a.len()).collect();
    let total: usize = counts.iter().product();
    let mut acc = 0.0f64;
    for flat in 0..total {
        let mut rem = flat;
        let mut w = 1.0;
        let mut window = 1.0;
        let mut mag2 = 0.0;
        for a in (0..dim).rev() {
            let (wa, s) = axes[a][rem % counts[a]];
            rem /= counts[a];
            w *= wa;
            window *= s.omega;
            mag2 += s.xi.norm_sqr();
        }
        let mag = window.abs() * mag2.sqrt();
        if q.is_infinite() {
            acc = acc.max(mag);
        } else {
            acc += w * mag.powf(q);
        }
    }
    if q.is_infinite() {
        acc
    } else {
        acc.powf(1.0 / q)
    }
}

/// Hölder conjugate exponent.
pub fn conjugate_exponent(q: f64) -> f64 {
    if q == 1.0 {
        f64::INFINITY
    } else if q.is_infinite() {
        1.0
    } else {
        q / (q - 1.0)
    }
}

/// Panels per cube axis used for `‖E_k‖_q`.
pub const E_NORM_PANELS: usize = 16;

/// `‖E_k‖_{q′}` for `k ≤ K` and their maximum `c_q`.
pub fn embedding_constant(family: &TestFamily, q: f64, k_max: u64) -> Result<(f64, Vec<f64>)> {
    if !(q >= 1.0) {
        return Err(Error::invalid("q must be >= 1"));
    }
    let qp = conjugate_exponent(q);
    let per_k = (1..=k_max)
        .map(|k| Ok(e_norm(family, &family.cube(k)?, qp, E_NORM_PANELS)))
        .collect::<Result<Vec<_>>>()?;
    let c = per_k.iter().cloned().fold(0.0, f64::max);
    Ok((c, per_k))
}

/// Prefix sums over a grid with one extra leading zero per axis.
fn prefix_sums(grid: &Grid, values: &[f64]) -> (Vec<f64>, [usize; 3]) {
    let dim = grid.dim();
    let mut ext = [1usize; 3];
    for a in 0..dim {
        ext[a] = grid.shape()[a] + 1;
    }
    let len: usize = ext[..dim].iter().product();
    let mut p = vec![0.0; len];
    let ext_index = |idx: &[usize]| {
        idx.iter()
            .zip(&ext[..dim])
            .fold(0, |acc, (&i, &n)| acc * n + i)
    };
    for flat in 0..grid.len() {
        let idx = grid.multi_index(flat);
        let mut e = [0usize; 3];
        for a in 0..dim {
            e[a] = idx[a] + 1;
        }
        p[ext_index(&e[..dim])] = values[flat];
    }
    for a in 0..dim {
        let stride: usize = ext[a + 1..dim].iter().product();
        for flat in 0..len {
            if (flat / stride) % ext[a] > 0 {
                p[flat] += p[flat - stride];
            }
        }
    }
    (p, ext)
}

/// Sum of `values` over the index box `lo[a] ≤ i_a < hi[a]`.
fn box_sum(p: &[f64], ext: &[usize; 3], dim: usize, lo: &[usize], hi: &[usize]) -> f64 {
    let mut total = 0.0;
    for corner in 0..(1usize << dim) {
        let mut flat = 0;
        let mut sign = 1.0;
        for a in 0..dim {
            let upper = (corner >> a) & 1 == 1;
            let i = if upper { hi[a] } else { lo[a] };
            if !upper {
                sign = -sign;
            }
            flat = flat * ext[a] + i;
        }
        total += sign * p[flat];
    }
    total
}

/// Alexiewicz norm `sup_r |∫_{B_r} f|` over grid-aligned cubes centered at
/// the node nearest the origin, clipped to the box. Each node carries the
/// cell volume (piecewise-constant representative).
pub fn alexiewicz_norm(f: &ScalarField) -> f64 {
    let grid = &f.grid;
    let dim = grid.dim();
    let (p, ext) = prefix_sums(grid, &f.values);
    let mut center = [0usize; 3];
    let mut reach = 0usize;
    for a in 0..dim {
        center[a] = grid.nearest(a, 0.0);
        reach = reach.max(center[a]).max(grid.shape()[a] - 1 - center[a]);
    }
    let vol = grid.cell_volume();
    let mut best = 0.0f64;
    let (mut lo, mut hi) = ([0usize; 3], [0usize; 3]);
    for m in 0..=reach {
        for a in 0..dim {
            lo[a] = center[a].saturating_sub(m);
            hi[a] = (center[a] + m + 1).min(grid.shape()[a]);
        }
        best = best.max(box_sum(&p, &ext, dim, &lo[..dim], &hi[..dim]).abs() * vol);
    }
    best
}

/// `sup_s |Σ_{i ≥ s} f_i|·vol` over upper orthants anchored at every node.
/// This is the norm that controls pairings with fields vanishing at `−∞`.
pub fn alexiewicz_norm_anchored(f: &ScalarField) -> f64 {
    let grid = &f.grid;
    let dim = grid.dim();
    let (p, ext) = prefix_sums(grid, &f.values);
    let mut hi = [0usize; 3];
    for a in 0..dim {
        hi[a] = grid.shape()[a];
    }
    let vol = grid.cell_volume();
    (0..grid.len()).fold(0.0, |m: f64, flat| {
        let lo = grid.multi_index(flat);
        m.max(box_sum(&p, &ext, dim, &lo[..dim], &hi[..dim]).abs() * vol)
    })
}

/// Vitali variation `∫|∂ⁿg/∂x₁⋯∂xₙ|` by centered differences and the
/// trapezoid rule.
pub fn vitali_variation(g: &ScalarField) -> f64 {
    let mut d = g.values.clone();
    for a in 0..g.grid.dim() {
        d = difference(&g.grid, &d, a);
    }
    g.grid
        .trapezoid_weights()
        .iter()
        .zip(&d)
        .map(|(w, v)| w * v.abs())
        .sum()
}

/// Outcome of the Henstock–Kurzweil pairing bound `|∫fg| ≤ ‖f‖·V(g)`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct HkReport {
    pub lhs: f64,
    pub rhs: f64,
    pub satisfied: bool,
    /// `g` is negligible on the lower faces of the box.
    pub vanishes_at_lower_faces: bool,
}

/// Compares `|∫fg|` against the anchored Alexiewicz norm of `f` times the
/// Vitali variation of `g`.
pub fn hk_pairing_bound(f: &ScalarField, g: &ScalarField) -> Result<HkReport> {
    if f.grid != g.grid {
        return Err(Error::GridMismatch);
    }
    let vol = f.grid.cell_volume();
    let lhs = f
        .values
        .iter()
        .zip(&g.values)
        .map(|(a, b)| a * b)
        .sum::<f64>()
        .abs()
        * vol;
    let rhs = alexiewicz_norm_anchored(f) * vitali_variation(g);
    let gmax = g.max_abs();
    let lower = (0..g.grid.len())
        .filter(|&i| {
            let idx = g.grid.multi_index(i);
            idx[..g.grid.dim()].iter().any(|&v| v == 0)
        })
        .fold(0.0f64, |m, i| m.max(g.values[i].abs()));
    Ok(HkReport {
        lhs,
        rhs,
        satisfied: lhs <= rhs * (1.0 + 1e-8),
        vanishes_at_lower_faces: lower <= 1e-8 * gmax.max(f64::MIN_POSITIVE),
    })
}

#[cfg(test)]
mod tests;
