//! Fields sampled on uniform tensor grids over axis-aligned boxes.
//!
//! Nodes include both box faces: `x_i = lo + i·h`, `i = 0..shape`. Values
//! are stored row-major (last axis fastest). Off-grid values come from
//! multilinear interpolation; outside the box the field is zero.

use alloc::vec;
use alloc::vec::Vec;

#[allow(unused_imports)] // inherent once std is linked
use num_traits::Float;

use crate::{Error, Result};

/// A uniform grid in 1, 2 or 3 dimensions.
#[derive(Clone, Debug, PartialEq)]
pub struct Grid {
    dim: usize,
    lo: [f64; 3],
    step: [f64; 3],
    shape: [usize; 3],
}

impl Grid {
    /// Grid with `shape[a]` nodes spanning `[lo[a], hi[a]]` on each axis.
    pub fn new(lo: &[f64], hi: &[f64], shape: &[usize]) -> Result<Self> {
        let dim = lo.len();
        if !(1..=3).contains(&dim) || hi.len() != dim || shape.len() != dim {
            return Err(Error::invalid(
                "grid dimension must be 1, 2 or 3 on every argument",
            ));
        }
        let mut grid = Grid {
            dim,
            lo: [0.0; 3],
            step: [1.0; 3],
            shape: [1; 3],
        };
        for a in 0..dim {
            if shape[a] < 2 || !(hi[a] > lo[a]) || !lo[a].is_finite() || !hi[a].is_finite() {
                return Err(Error::invalid("each axis needs >= 2 nodes and hi > lo"));
            }
            grid.lo[a] = lo[a];
            grid.shape[a] = shape[a];
            grid.step[a] = (hi[a] - lo[a]) / (shape[a] - 1) as f64;
        }
        Ok(grid)
    }

    /// Cubic grid `[−half, half]^dim` with `nodes` per axis.
    pub fn cube(dim: usize, half: f64, nodes: usize) -> Result<Self> {
        Grid::new(&vec![-half; dim], &vec![half; dim], &vec![nodes; dim])
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn lo(&self, axis: usize) -> f64 {
        self.lo[axis]
    }

    pub fn hi(&self, axis: usize) -> f64 {
        self.lo[axis] + self.step[axis] * (self.shape[axis] - 1) as f64
    }

    pub fn step(&self, axis: usize) -> f64 {
        self.step[axis]
    }

    pub fn shape(&self) -> &[usize] {
        &self.shape[..self.dim]
    }

    pub fn len(&self) -> usize {
        self.shape().iter().product()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn max_step(&self) -> f64 {
        self.step[..self.dim].iter().fold(0.0, |m, &s| m.max(s))
    }

    /// Volume of one grid cell.
    pub fn cell_volume(&self) -> f64 {
        self.step[..self.dim].iter().product()
    }

    pub fn coord(&self, axis: usize, i: usize) -> f64 {
        self.lo[axis] + i as f64 * self.step[axis]
    }

    pub fn index(&self, idx: &[usize]) -> usize {
        idx.iter()
            .zip(self.shape())
            .fold(0, |acc, (&i, &n)| acc * n + i)
    }

    pub fn multi_index(&self, mut flat: usize) -> [usize; 3] {
        let mut idx = [0; 3];
        for a in (0..self.dim).rev() {
            idx[a] = flat % self.shape[a];
            flat /= self.shape[a];
        }
        idx
    }

    pub fn point(&self, flat: usize) -> [f64; 3] {
        let idx = self.multi_index(flat);
        let mut x = [0.0; 3];
        for a in 0..self.dim {
            x[a] = self.coord(a, idx[a]);
        }
        x
    }

    /// Stride of `axis` in the flat layout.
    pub fn stride(&self, axis: usize) -> usize {
        self.shape[axis + 1..self.dim].iter().product()
    }

    /// Trapezoid weight of node `i` along `axis`.
    pub fn trapezoid_weight(&self, axis: usize, i: usize) -> f64 {
        let h = self.step[axis];
        if i == 0 || i + 1 == self.shape[axis] {
            0.5 * h
        } else {
            h
        }
    }

    /// Tensor trapezoid weights for every node.
    pub fn trapezoid_weights(&self) -> Vec<f64> {
        (0..self.len())
            .map(|f| {
                let idx = self.multi_index(f);
                (0..self.dim)
                    .map(|a| self.trapezoid_weight(a, idx[a]))
                    .product()
            })
            .collect()
    }

    /// Cell and fractional offset containing `x` along `axis`, if inside.
    pub fn locate(&self, axis: usize, x: f64) -> Option<(usize, f64)> {
        let pos = (x - self.lo[axis]) / self.step[axis];
        let cells = (self.shape[axis] - 1) as f64;
        let slack = 1e-12;
        if !(pos >= -slack && pos <= cells + slack) {
            return None;
        }
        let pos = pos.clamp(0.0, cells);
        let cell = (pos.floor() as usize).min(self.shape[axis] - 2);
        Some((cell, pos - cell as f64))
    }

    /// Node index nearest to `x` along `axis` (clamped to the grid).
    pub fn nearest(&self, axis: usize, x: f64) -> usize {
        let pos = ((x - self.lo[axis]) / self.step[axis]).round();
        pos.clamp(0.0, (self.shape[axis] - 1) as f64) as usize
    }

    /// Multilinear interpolation of `values` at `x`; zero outside the box.
    pub fn interpolate(&self, values: &[f64], x: &[f64]) -> f64 {
        let mut cells = [(0usize, 0.0f64); 3];
        for a in 0..self.dim {
            match self.locate(a, x[a]) {
                Some(c) => cells[a] = c,
                None => return 0.0,
            }
        }
        self.interpolate_located(values, &cells[..self.dim])
    }

    /// Interpolation with precomputed `(cell, fraction)` per axis.
    pub fn interpolate_located(&self, values: &[f64], cells: &[(usize, f64)]) -> f64 {
        let mut acc = 0.0;
        for corner in 0..(1usize << self.dim) {
            let mut weight = 1.0;
            let mut flat = 0;
            for a in 0..self.dim {
                let bit = (corner >> a) & 1;
                let (c, t) = cells[a];
                weight *= if bit == 1 { t } else { 1.0 - t };
                flat = flat * self.shape[a] + c + bit;
            }
            if weight != 0.0 {
                acc += weight * values[flat];
            }
        }
        acc
    }
}

/// A scalar field on a [`Grid`].
#[derive(Clone, Debug, PartialEq)]
pub struct ScalarField {
    pub grid: Grid,
    pub values: Vec<f64>,
}

impl ScalarField {
    pub fn new(grid: Grid, values: Vec<f64>) -> Result<Self> {
        if values.len() != grid.len() {
            return Err(Error::invalid("value count does not match grid"));
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::invalid("field values must be finite"));
        }
        Ok(ScalarField { grid, values })
    }

    pub fn from_fn(grid: Grid, f: impl Fn(&[f64]) -> f64) -> Result<Self> {
        let dim = grid.dim();
        let values = (0..grid.len()).map(|i| f(&grid.point(i)[..dim])).collect();
        ScalarField::new(grid, values)
    }

    pub fn interpolate(&self, x: &[f64]) -> f64 {
        self.grid.interpolate(&self.values, x)
    }

    /// Trapezoid integral over the box.
    pub fn integral(&self) -> f64 {
        self.grid
            .trapezoid_weights()
            .iter()
            .zip(&self.values)
            .map(|(w, v)| w * v)
            .sum()
    }

    /// Second-order finite difference along `axis` (one-sided at the faces).
    pub fn derivative(&self, axis: usize) -> ScalarField {
        ScalarField {
            grid: self.grid.clone(),
            values: difference(&self.grid, &self.values, axis),
        }
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().fold(0.0, |m, v| m.max(v.abs()))
    }
}

pub(crate) fn difference(grid: &Grid, values: &[f64], axis: usize) -> Vec<f64> {
    let n = grid.shape()[axis];
    let stride = grid.stride(axis);
    let h = grid.step(axis);
    let mut out = vec![0.0; values.len()];
    for (flat, o) in out.iter_mut().enumerate() {
        let i = (flat / stride) % n;
        *o = if i == 0 {
            (-3.0 * values[flat] + 4.0 * values[flat + stride] - values[flat + 2 * stride])
                / (2.0 * h)
        } else if i + 1 == n {
            (3.0 * values[flat] - 4.0 * values[flat - stride] + values[flat - 2 * stride])
                / (2.0 * h)
        } else {
            (values[flat + stride] - values[flat - stride]) / (2.0 * h)
        };
    }
    out
}

/// An `n`-component vector field on an `n`-dimensional grid.
#[derive(Clone, Debug, PartialEq)]
pub struct SampledField {
    pub grid: Grid,
    pub components: Vec<Vec<f64>>,
}

impl SampledField {
    pub fn new(grid: Grid, components: Vec<Vec<f64>>) -> Result<Self> {
        if components.len() != grid.dim() {
            return Err(Error::invalid(
                "a field on an n-dimensional grid has n components",
            ));
        }
        for c in &components {
            if c.len() != grid.len() {
                return Err(Error::invalid("component length does not match grid"));
            }
            if c.iter().any(|v| !v.is_finite()) {
                return Err(Error::invalid("field values must be finite"));
            }
        }
        Ok(SampledField { grid, components })
    }

    pub fn zeros(grid: Grid) -> Self {
        let n = grid.dim();
        let len = grid.len();
        SampledField {
            grid,
            components: vec![vec![0.0; len]; n],
        }
    }

    /// Samples `f(x)` into `out` (length `n`) at every node.
    pub fn from_fn(grid: Grid, f: impl Fn(&[f64], &mut [f64])) -> Result<Self> {
        let n = grid.dim();
        let mut components = vec![Vec::with_capacity(grid.len()); n];
        let mut buf = [0.0; 3];
        for i in 0..grid.len() {
            let x = grid.point(i);
            buf = [0.0; 3];
            f(&x[..n], &mut buf[..n]);
            for (c, v) in components.iter_mut().zip(&buf[..n]) {
                c.push(*v);
            }
        }
        let _ = buf;
        SampledField::new(grid, components)
    }

    /// The scalar field `s` placed in component `axis`, zeros elsewhere.
    pub fn from_scalar(field: &ScalarField, axis: usize) -> Self {
        let mut out = SampledField::zeros(field.grid.clone());
        out.components[axis] = field.values.clone();
        out
    }

    /// The scalar field copied into every component.
    pub fn broadcast(field: &ScalarField) -> Self {
        let n = field.grid.dim();
        SampledField {
            grid: field.grid.clone(),
            components: vec![field.values.clone(); n],
        }
    }

    pub fn dim(&self) -> usize {
        self.grid.dim()
    }

    pub fn component(&self, j: usize) -> ScalarField {
        ScalarField {
            grid: self.grid.clone(),
            values: self.components[j].clone(),
        }
    }

    pub fn same_grid(&self, other: &SampledField) -> Result<()> {
        if self.grid == other.grid {
            Ok(())
        } else {
            Err(Error::GridMismatch)
        }
    }

    pub fn scaled(&self, alpha: f64) -> Self {
        SampledField {
            grid: self.grid.clone(),
            components: self
                .components
                .iter()
                .map(|c| c.iter().map(|v| alpha * v).collect())
                .collect(),
        }
    }

    /// `alpha·self + beta·other`.
    pub fn combine(&self, alpha: f64, other: &SampledField, beta: f64) -> Result<Self> {
        self.same_grid(other)?;
        Ok(SampledField {
            grid: self.grid.clone(),
            components: self
                .components
                .iter()
                .zip(&other.components)
                .map(|(a, b)| a.iter().zip(b).map(|(x, y)| alpha * x + beta * y).collect())
                .collect(),
        })
    }

    /// Pointwise Euclidean magnitude at node `i`.
    pub fn magnitude(&self, i: usize) -> f64 {
        self.components
            .iter()
            .map(|c| c[i] * c[i])
            .sum::<f64>()
            .sqrt()
    }

    /// Grid `L^q` norm of the pointwise Euclidean magnitude with tensor
    /// trapezoid weights; `q = ∞` gives the nodal maximum. For `q ≥ 1` this
    /// bounds the `L^q` norm of the multilinear interpolant from above.
    pub fn norm(&self, q: f64) -> f64 {
        if q.is_infinite() {
            return (0..self.grid.len()).fold(0.0, |m, i| m.max(self.magnitude(i)));
        }
        let w = self.grid.trapezoid_weights();
        let s: f64 = (0..self.grid.len())
            .map(|i| w[i] * self.magnitude(i).powf(q))
            .sum();
        s.powf(1.0 / q)
    }

    /// Componentwise finite-difference derivative along `axis`.
    pub fn derivative(&self, axis: usize) -> SampledField {
        SampledField {
            grid: self.grid.clone(),
            components: self
                .components
                .iter()
                .map(|c| difference(&self.grid, c, axis))
                .collect(),
        }
    }

    /// Repeated derivative `D^α` for a multi-index `alpha`.
    pub fn derivative_multi(&self, alpha: &[u32]) -> SampledField {
        let mut out = self.clone();
        for (axis, &order) in alpha.iter().enumerate() {
            for _ in 0..order {
                out = out.derivative(axis);
            }
        }
        out
    }

    /// Largest magnitude on the outermost layer of nodes.
    pub fn boundary_max(&self) -> f64 {
        let shape = self.grid.shape();
        (0..self.grid.len())
            .filter(|&i| {
                let idx = self.grid.multi_index(i);
                (0..self.dim()).any(|a| idx[a] == 0 || idx[a] + 1 == shape[a])
            })
            .fold(0.0, |m, i| m.max(self.magnitude(i)))
    }
}
