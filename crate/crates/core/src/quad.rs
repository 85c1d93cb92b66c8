//! Quadrature rules: fixed Gauss–Legendre panels and adaptive Gauss–Kronrod.

use alloc::vec::Vec;
use core::ops::{Add, Mul, Sub};

use num_complex::Complex64;

use crate::{Error, Result};

/// Gauss–Legendre order 8 on `[-1, 1]`: positive nodes and their weights.
const GL8_NODES: [f64; 4] = [
    0.183_434_642_495_649_8,
    0.525_532_409_916_329,
    0.796_666_477_413_626_7,
    0.960_289_856_497_536_3,
];
const GL8_WEIGHTS: [f64; 4] = [
    0.362_683_783_378_362,
    0.313_706_645_877_887_3,
    0.222_381_034_453_374_5,
    0.101_228_536_290_376_3,
];

/// Nodes and weights of the 8-point Gauss–Legendre rule mapped to `[a, b]`.
pub fn gauss_legendre8(a: f64, b: f64) -> [(f64, f64); 8] {
    let mid = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let mut out = [(0.0, 0.0); 8];
    for (i, (&x, &w)) in GL8_NODES.iter().zip(GL8_WEIGHTS.iter()).enumerate() {
        out[2 * i] = (mid - half * x, half * w);
        out[2 * i + 1] = (mid + half * x, half * w);
    }
    out
}

/// Composite 8-point Gauss–Legendre rule over `panels` equal panels.
pub fn composite_nodes(a: f64, b: f64, panels: usize) -> Vec<(f64, f64)> {
    let panels = panels.max(1);
    let width = (b - a) / panels as f64;
    let mut nodes = Vec::with_capacity(8 * panels);
    for p in 0..panels {
        let lo = a + p as f64 * width;
        nodes.extend_from_slice(&gauss_legendre8(lo, lo + width));
    }
    nodes
}

/// Composite 8-point Gauss–Legendre rule over the intervals between
/// consecutive `breaks` (sorted ascending).
pub fn nodes_on_breaks(breaks: &[f64]) -> Vec<(f64, f64)> {
    let mut nodes = Vec::with_capacity(8 * breaks.len());
    for w in breaks.windows(2) {
        if w[1] > w[0] {
            nodes.extend_from_slice(&gauss_legendre8(w[0], w[1]));
        }
    }
    nodes
}

pub fn composite<T: QuadValue>(f: impl Fn(f64) -> T, a: f64, b: f64, panels: usize) -> T {
    composite_nodes(a, b, panels)
        .into_iter()
        .fold(T::zero(), |acc, (x, w)| acc + f(x) * w)
}

/// Values that can be integrated: reals and complex numbers.
pub trait QuadValue:
    Copy + Add<Output = Self> + Sub<Output = Self> + Mul<f64, Output = Self>
{
    fn zero() -> Self;
    fn magnitude(self) -> f64;
}

impl QuadValue for f64 {
    fn zero() -> Self {
        0.0
    }
    fn magnitude(self) -> f64 {
        self.abs()
    }
}

impl QuadValue for Complex64 {
    fn zero() -> Self {
        Complex64::new(0.0, 0.0)
    }
    fn magnitude(self) -> f64 {
        self.norm()
    }
}

/// Result of an adaptive integration.
#[derive(Clone, Copy, Debug)]
pub struct Quadrature<T> {
    pub value: T,
    pub error: f64,
    pub evaluations: usize,
}

const XGK: [f64; 8] = [
    0.991_455_371_120_812_6,
    0.949_107_912_342_758_5,
    0.864_864_423_359_769_1,
    0.741_531_185_599_394_4,
    0.586_087_235_467_691_1,
    0.405_845_151_377_397_2,
    0.207_784_955_007_898_5,
    0.0,
];
const WGK: [f64; 8] = [
    0.022_935_322_010_529_22,
    0.063_092_092_629_978_55,
    0.104_790_010_322_250_2,
    0.140_653_259_715_525_9,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_4,
    0.204_432_940_075_298_9,
    0.209_482_141_084_727_8,
];
const WG: [f64; 4] = [
    0.129_484_966_168_869_7,
    0.279_705_391_489_276_7,
    0.381_830_050_505_118_9,
    0.417_959_183_673_469_4,
];

fn gk15<T: QuadValue>(f: &impl Fn(f64) -> T, a: f64, b: f64) -> (T, f64) {
    let mid = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let center = f(mid);
    let mut kronrod = center * WGK[7];
    let mut gauss = center * WG[3];
    for j in 0..7 {
        let dx = half * XGK[j];
        let pair = f(mid - dx) + f(mid + dx);
        kronrod = kronrod + pair * WGK[j];
        if j % 2 == 1 {
            gauss = gauss + pair * WG[j / 2];
        }
    }
    let value = kronrod * half;
    let err = (kronrod - gauss).magnitude() * half.abs();
    (value, err)
}

/// Globally adaptive 15-point Gauss–Kronrod integration of `f` over `[a, b]`.
///
/// Bisects the interval with the largest error estimate until the summed
/// estimate drops below `max(abs_tol, rel_tol·|I|)`. Fails with the achieved
/// estimate after `max_intervals` subdivisions.
pub fn adaptive<T: QuadValue>(
    f: impl Fn(f64) -> T,
    a: f64,
    b: f64,
    abs_tol: f64,
    rel_tol: f64,
    max_intervals: usize,
) -> Result<Quadrature<T>> {
    let (v, e) = gk15(&f, a, b);
    let mut intervals: Vec<(f64, f64, T, f64)> = alloc::vec![(a, b, v, e)];
    let mut evaluations = 15;
    loop {
        let total = intervals.iter().fold(T::zero(), |acc, iv| acc + iv.2);
        let err: f64 = intervals.iter().map(|iv| iv.3).sum();
        let target = abs_tol.max(rel_tol * total.magnitude());
        if err <= target {
            return Ok(Quadrature {
                value: total,
                error: err,
                evaluations,
            });
        }
        if intervals.len() >= max_intervals {
            return Err(Error::QuadratureNotConverged {
                estimate: err,
                tolerance: target,
            });
        }
        let (worst, _) =
            intervals
                .iter()
                .enumerate()
                .fold((0, f64::NEG_INFINITY), |best, (i, iv)| {
                    if iv.3 > best.1 {
                        (i, iv.3)
                    } else {
                        best
                    }
                });
        let (lo, hi, _, _) = intervals.swap_remove(worst);
        let mid = 0.5 * (lo + hi);
        let (vl, el) = gk15(&f, lo, mid);
        let (vr, er) = gk15(&f, mid, hi);
        evaluations += 30;
        intervals.push((lo, mid, vl, el));
        intervals.push((mid, hi, vr, er));
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gauss_legendre_is_exact_through_degree_15() {
        let exact = 2.0 / 15.0;
        let approx: f64 = gauss_legendre8(-1.0, 1.0)
            .iter()
            .map(|&(x, w)| w * (x.powi(14) + x.powi(15)))
            .sum();
        assert!((approx - exact).abs() < 1e-15);
    }

    #[test]
    fn adaptive_handles_sqrt_endpoint() {
        let q = adaptive(|x: f64| x.sqrt(), 0.0, 1.0, 1e-12, 1e-12, 500).unwrap();
        assert!((q.value - 2.0 / 3.0).abs() < 1e-11);
    }

    #[test]
    fn adaptive_complex_oscillatory() {
        let q = adaptive(
            |x: f64| Complex64::new(0.0, 10.0 * x).exp(),
            0.0,
            1.0,
            1e-13,
            0.0,
            200,
        )
        .unwrap();
        let exact = (Complex64::new(0.0, 10.0).exp() - 1.0) / Complex64::new(0.0, 10.0);
        assert!((q.value - exact).norm() < 1e-12);
    }

    #[test]
    fn adaptive_reports_non_convergence() {
        let err = adaptive(|x: f64| 1.0 / x, 1e-300, 1.0, 1e-14, 0.0, 4).unwrap_err();
        assert!(matches!(err, Error::QuadratureNotConverged { .. }));
    }
}
