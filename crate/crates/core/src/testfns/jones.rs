//! Jones functions `g(x, y) = exp(−y^a e^{iax})` and `h(x) = ∫₀^∞ g(x, y) dy`.

use num_complex::Complex64;
#[allow(unused_imports)] // inherent once std is linked
use num_traits::Float;

use crate::quad::{self, Quadrature};
use crate::{Error, Result};

/// Crossover `Z = y^a` between the adaptive middle piece and the asymptotic tail.
const TAIL_START: f64 = 40.0;

pub fn jones_g(x: f64, y: f64, a: f64) -> Result<Complex64> {
    if a.is_nan() || a <= 1.0 {
        return Err(Error::invalid("Jones exponent a must exceed 1"));
    }
    if y.is_nan() || y < 0.0 {
        return Err(Error::invalid("Jones g requires y >= 0"));
    }
    let ya = y.powf(a);
    Ok((-Complex64::from_polar(ya, a * x)).exp())
}

/// `h(x)` for `|x| ≤ π/(2a)`, zero outside.
///
/// Splits `∫₀^∞ exp(−c y^a) dy` with `c = e^{iax}` into three pieces:
/// the convergent power series on `[0, 1]`, adaptive Gauss–Kronrod in
/// `v = a ln y` on `[1, Z^{1/a}]`, and the asymptotic expansion of the
/// incomplete gamma tail beyond `y^a = Z`. The returned error is the sum
/// of the middle-piece estimate and the last retained tail term.
pub fn jones_h(x: f64, a: f64, tol: f64) -> Result<Quadrature<Complex64>> {
    if a.is_nan() || a <= 1.0 {
        return Err(Error::invalid("Jones exponent a must exceed 1"));
    }
    let edge = core::f64::consts::PI / (2.0 * a);
    if x.abs() > edge {
        return Ok(Quadrature {
            value: Complex64::new(0.0, 0.0),
            error: 0.0,
            evaluations: 0,
        });
    }
    let c = Complex64::from_polar(1.0, a * x);

    // ∫₀¹ exp(−c y^a) dy = Σ (−c)^m / (m! (a m + 1))
    let mut head = Complex64::new(0.0, 0.0);
    let mut power = Complex64::new(1.0, 0.0);
    let mut m = 0u32;
    loop {
        let term = power / (a * m as f64 + 1.0);
        head += term;
        if term.norm() < 1e-18 {
            break;
        }
        m += 1;
        power = power * (-c) / m as f64;
    }

    let inv_a = 1.0 / a;
    let middle = quad::adaptive(
        |v: f64| (-c * v.exp() + v * inv_a).exp() * inv_a,
        0.0,
        TAIL_START.ln(),
        tol * 0.25,
        0.0,
        400,
    )?;

    let (tail, tail_err) = incomplete_gamma_tail(inv_a, c, TAIL_START);
    let tail = tail * inv_a;
    let error = middle.error + tail_err * inv_a;
    if error > tol {
        return Err(Error::QuadratureNotConverged {
            estimate: error,
            tolerance: tol,
        });
    }
    Ok(Quadrature {
        value: head + middle.value + tail,
        error,
        evaluations: middle.evaluations + m as usize,
    })
}

/// `∫_Z^∞ s^{b−1} e^{−cs} ds` for `Re c ≥ 0`, `|c| = O(1)`, large `Z`,
/// by repeated integration by parts; returns the sum and the magnitude of
/// the smallest term (the truncation error scale).
fn incomplete_gamma_tail(b: f64, c: Complex64, z: f64) -> (Complex64, f64) {
    let beta = b - 1.0;
    let lead = (-c * z).exp() * z.powf(beta) / c;
    let cz = c * z;
    let mut term = lead;
    let mut sum = Complex64::new(0.0, 0.0);
    let mut last = term.norm();
    for j in 0..200u32 {
        sum += term;
        let next = term * (beta - j as f64) / cz;
        let mag = next.norm();
        if mag >= last || mag < 1e-19 {
            last = mag;
            break;
        }
        last = mag;
        term = next;
    }
    (sum, last)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn g_anchor_values() {
        let g = jones_g(0.0, 0.7, 3.0).unwrap();
        assert!((g.re - (-0.7f64.powi(3)).exp()).abs() < 1e-15 && g.im == 0.0);
        let g = jones_g(0.4, 0.0, 3.0).unwrap();
        assert_eq!(g, Complex64::new(1.0, 0.0));
        assert!(jones_g(0.0, 1.0, 1.0).is_err());
        assert!(jones_h(0.0, 0.5, 1e-10).is_err());
    }

    #[test]
    fn g_satisfies_cauchy_riemann_type_identity() {
        // i y ∂g/∂y = ∂g/∂x, central differences with O(h²) error
        let (x, y, a) = (0.1, 0.5, 3.0);
        let g = |x: f64, y: f64| jones_g(x, y, a).unwrap();
        let mut prev = f64::INFINITY;
        for &h in &[1e-2, 5e-3, 2.5e-3] {
            let dgdx = (g(x + h, y) - g(x - h, y)) / (2.0 * h);
            let dgdy = (g(x, y + h) - g(x, y - h)) / (2.0 * h);
            let resid = (Complex64::new(0.0, y) * dgdy - dgdx).norm();
            assert!(resid < 2.0 * h * h, "h = {h}: {resid}");
            assert!(resid < prev);
            prev = resid;
        }
    }

    #[test]
    fn h_vanishes_outside_interval() {
        let edge = core::f64::consts::PI / 6.0;
        assert_eq!(
            jones_h(edge + 1e-9, 3.0, 1e-10).unwrap().value,
            Complex64::new(0.0, 0.0)
        );
        assert_eq!(
            jones_h(-1.0, 3.0, 1e-10).unwrap().value,
            Complex64::new(0.0, 0.0)
        );
    }

    #[test]
    fn h_modulus_is_constant_and_derivative_rotates() {
        let a = 3.0;
        let h0 = jones_h(0.0, a, 1e-12).unwrap().value;
        let hq = jones_h(core::f64::consts::PI / 12.0, a, 1e-12)
            .unwrap()
            .value;
        assert!((hq.norm() - h0.norm()).abs() < 1e-10);
        // h' + i h = 0 in the interior
        let x = 0.2;
        let step = 1e-4;
        let hp = jones_h(x + step, a, 1e-13).unwrap().value;
        let hm = jones_h(x - step, a, 1e-13).unwrap().value;
        let hx = jones_h(x, a, 1e-13).unwrap().value;
        let resid = ((hp - hm) / (2.0 * step) + Complex64::new(0.0, 1.0) * hx).norm();
        assert!(resid < 1e-7, "{resid}");
    }

    #[test]
    fn h_is_accurate_at_large_exponent() {
        // a = 3·2^30, h(0) = Γ(1 + 1/a) ≈ 1 − γ_E/a
        let a = 3.0 * (1u64 << 30) as f64;
        let h0 = jones_h(0.0, a, 1e-10).unwrap().value;
        let expect = 1.0 - 0.577_215_664_901_532_9 / a;
        assert!((h0.re - expect).abs() < 1e-12 && h0.im.abs() < 1e-12);
        let edge = core::f64::consts::PI / (2.0 * a);
        let he = jones_h(edge, a, 1e-10).unwrap().value;
        assert!((he - h0 * Complex64::from_polar(1.0, -edge)).norm() < 1e-10);
    }
}
