//! The normalized bump `f_l` and its cumulative distribution.

use alloc::vec::Vec;
#[allow(unused_imports)] // inherent once std is linked
use num_traits::Float;

use crate::quad;

/// `∫_{−1}^{1} exp(1/(t² − 1)) dt`.
pub fn unit_bump_mass() -> f64 {
    // adaptive GK to near machine precision; the integrand is flat at ±1
    quad::adaptive(raw_bump, -1.0, 1.0, 1e-16, 1e-15, 2000)
        .map(|q| q.value)
        .unwrap_or(0.443_993_816_168_079_4)
}

fn raw_bump(t: f64) -> f64 {
    let q = t * t - 1.0;
    if q >= 0.0 {
        0.0
    } else {
        (1.0 / q).exp()
    }
}

/// The bump on `[−1, 1]` normalized to unit mass, with its derivative.
#[derive(Clone, Debug)]
pub struct UnitBump {
    inv_mass: f64,
}

impl UnitBump {
    pub fn new() -> Self {
        UnitBump {
            inv_mass: 1.0 / unit_bump_mass(),
        }
    }

    pub fn value(&self, w: f64) -> f64 {
        raw_bump(w) * self.inv_mass
    }

    pub fn derivative(&self, w: f64) -> f64 {
        let q = w * w - 1.0;
        if q >= 0.0 {
            return 0.0;
        }
        raw_bump(w) * self.inv_mass * (-2.0 * w / (q * q))
    }
}

impl Default for UnitBump {
    fn default() -> Self {
        Self::new()
    }
}

/// `f_l(x − center)` with radius `ε_l = π/(4 a_l)`, `a_l = 3·2^{l−1}`.
pub fn mollifier(level: u32, x: f64, center: f64) -> f64 {
    let eps = super::JonesParams::new(level).eps;
    let bump = UnitBump::new();
    bump.value((x - center) / eps) / eps
}

/// Cumulative distribution `∫_{−1}^{u} f̃` of the unit bump, tabulated for
/// cubic Hermite interpolation (the derivative is the bump itself).
#[derive(Clone, Debug)]
pub struct BumpCdf {
    bump: UnitBump,
    step: f64,
    values: Vec<f64>,
}

impl BumpCdf {
    pub fn new(bump: UnitBump, intervals: usize) -> Self {
        let step = 2.0 / intervals as f64;
        let mut values = Vec::with_capacity(intervals + 1);
        let mut acc = 0.0;
        values.push(0.0);
        for j in 0..intervals {
            let lo = -1.0 + j as f64 * step;
            acc += quad::composite(|w| bump.value(w), lo, lo + step, 2);
            values.push(acc);
        }
        // absorb the residual normalization error at the top
        let total = acc;
        for v in &mut values {
            *v /= total;
        }
        BumpCdf { bump, step, values }
    }

    pub fn value(&self, u: f64) -> f64 {
        self.eval(u).0
    }

    /// CDF and density at `u`.
    pub fn eval(&self, u: f64) -> (f64, f64) {
        if u <= -1.0 {
            return (0.0, 0.0);
        }
        if u >= 1.0 {
            return (1.0, 0.0);
        }
        let pos = (u + 1.0) / self.step;
        let j = (pos.floor() as usize).min(self.values.len() - 2);
        let t = pos - j as f64;
        let x0 = -1.0 + j as f64 * self.step;
        let d0 = self.bump.value(x0) * self.step;
        let d1 = self.bump.value(x0 + self.step) * self.step;
        let (v, dv) = hermite(self.values[j], self.values[j + 1], d0, d1, t);
        (v, dv / self.step)
    }
}

/// Cubic Hermite interpolation on the unit interval: value and `d/dt`.
pub(crate) fn hermite<T>(p0: T, p1: T, m0: T, m1: T, t: f64) -> (T, T)
where
    T: Copy + core::ops::Add<Output = T> + core::ops::Mul<f64, Output = T>,
{
    let t2 = t * t;
    let t3 = t2 * t;
    let h00 = 2.0 * t3 - 3.0 * t2 + 1.0;
    let h10 = t3 - 2.0 * t2 + t;
    let h01 = -2.0 * t3 + 3.0 * t2;
    let h11 = t3 - t2;
    let value = p0 * h00 + m0 * h10 + p1 * h01 + m1 * h11;
    let d00 = 6.0 * t2 - 6.0 * t;
    let d10 = 3.0 * t2 - 4.0 * t + 1.0;
    let d01 = -6.0 * t2 + 6.0 * t;
    let d11 = 3.0 * t2 - 2.0 * t;
    let deriv = p0 * d00 + m0 * d10 + p1 * d01 + m1 * d11;
    (value, deriv)
}
