use alloc::vec;
use alloc::vec::Vec;
use core::f64::consts::PI;

use num_complex::Complex64;
#[allow(unused_imports)] // inherent once std is linked
use num_traits::Float;

use crate::fft::Fft3;
use crate::field::{Grid, SampledField};
use crate::rng::Rng;
use crate::{Error, Result};

const ZERO: Complex64 = Complex64 { re: 0.0, im: 0.0 };

/// Velocity coefficients on the half spectrum of an `N³` grid.
#[derive(Clone, Debug, PartialEq)]
pub struct SpectralField {
    pub n: usize,
    pub l: f64,
    pub c: [Vec<Complex64>; 3],
}

impl SpectralField {
    pub fn scaled(&self, alpha: f64) -> Self {
        let mut out = self.clone();
        out.scale(alpha);
        out
    }

    pub fn scale(&mut self, alpha: f64) {
        for comp in &mut self.c {
            for v in comp.iter_mut() {
                *v *= alpha;
            }
        }
    }

    /// `self += alpha·other`.
    pub fn axpy(&mut self, alpha: f64, other: &SpectralField) {
        for (a, b) in self.c.iter_mut().zip(&other.c) {
            for (x, y) in a.iter_mut().zip(b) {
                *x += y * alpha;
            }
        }
    }

    pub fn sub(&self, other: &SpectralField) -> SpectralField {
        let mut out = self.clone();
        out.axpy(-1.0, other);
        out
    }

    pub fn is_finite(&self) -> bool {
        self.c
            .iter()
            .all(|c| c.iter().all(|v| v.re.is_finite() && v.im.is_finite()))
    }
}

/// Grid, transforms, wavenumbers and dealiasing mask for one `(N, L)`.
#[derive(Clone, Debug)]
pub struct Spectral {
    n: usize,
    l: f64,
    fft: Fft3,
    k: Vec<[f64; 3]>,
    k2: Vec<f64>,
    retained: Vec<bool>,
    weight: Vec<f64>,
    dealias: bool,
}

impl Spectral {
    pub fn new(n: usize, l: f64) -> Result<Self> {
        if n < 4 || !n.is_power_of_two() {
            return Err(Error::invalid("N must be a power of two >= 4"));
        }
        if !(l > 0.0 && l.is_finite()) {
            return Err(Error::invalid("box length must be positive"));
        }
        let fft = Fft3::new(n)?;
        let nz = n / 2 + 1;
        let base = 2.0 * PI / l;
        let cutoff = (n / 3) as i64;
        let signed = |i: usize| {
            if i <= n / 2 {
                i as i64
            } else {
                i as i64 - n as i64
            }
        };
        let len = fft.spectrum_len();
        let mut k = Vec::with_capacity(len);
        let mut k2 = Vec::with_capacity(len);
        let mut retained = Vec::with_capacity(len);
        let mut weight = Vec::with_capacity(len);
        for idx in 0..len {
            let (i, j, kz) = (idx / (n * nz), (idx / nz) % n, idx % nz);
            let m = [signed(i), signed(j), kz as i64];
            let kv = [m[0] as f64 * base, m[1] as f64 * base, m[2] as f64 * base];
            k.push(kv);
            k2.push(kv.iter().map(|v| v * v).sum());
            retained.push(m.iter().all(|v| v.abs() <= cutoff));
            weight.push(if kz == 0 || kz == n / 2 { 1.0 } else { 2.0 });
        }
        Ok(Spectral {
            n,
            l,
            fft,
            k,
            k2,
            retained,
            weight,
            dealias: true,
        })
    }

    /// Same transforms with the 2/3 truncation switched off.
    pub fn without_dealiasing(mut self) -> Self {
        self.dealias = false;
        self.retained.iter_mut().for_each(|r| *r = true);
        self
    }

    pub fn dealiasing(&self) -> bool {
        self.dealias
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn l(&self) -> f64 {
        self.l
    }

    pub fn spacing(&self) -> f64 {
        self.l / self.n as f64
    }

    pub fn len(&self) -> usize {
        self.k.len()
    }

    pub fn is_empty(&self) -> bool {
        self.k.is_empty()
    }

    pub fn wavevector(&self, idx: usize) -> [f64; 3] {
        self.k[idx]
    }

    pub fn k2(&self, idx: usize) -> f64 {
        self.k2[idx]
    }

    /// Mode kept by the 2/3 rule (`|m_j| ≤ ⌊N/3⌋` on every axis).
    pub fn retained(&self, idx: usize) -> bool {
        self.retained[idx]
    }

    /// Physical coordinate of node `i` on any axis.
    pub fn coord(&self, i: usize) -> f64 {
        -0.5 * self.l + i as f64 * self.spacing()
    }

    /// The node grid as a [`Grid`] (periodic copy of the lower faces only).
    pub fn grid(&self) -> Grid {
        let lo = -0.5 * self.l;
        let hi = 0.5 * self.l - self.spacing();
        Grid::new(&[lo; 3], &[hi; 3], &[self.n; 3]).expect("valid spectral grid")
    }

    pub fn zeros(&self) -> SpectralField {
        SpectralField {
            n: self.n,
            l: self.l,
            c: core::array::from_fn(|_| vec![ZERO; self.len()]),
        }
    }

    pub fn check(&self, u: &SpectralField) -> Result<()> {
        if u.n != self.n || u.l != self.l || u.c.iter().any(|c| c.len() != self.len()) {
            return Err(Error::GridMismatch);
        }
        Ok(())
    }

    pub fn forward(&self, real: &[f64]) -> Vec<Complex64> {
        self.fft.forward(real)
    }

    pub fn backward(&self, spec: &[Complex64]) -> Vec<f64> {
        self.fft.backward(spec)
    }

    pub fn from_physical(&self, comps: [&[f64]; 3]) -> Result<SpectralField> {
        if comps.iter().any(|c| c.len() != self.fft.real_len()) {
            return Err(Error::GridMismatch);
        }
        Ok(SpectralField {
            n: self.n,
            l: self.l,
            c: core::array::from_fn(|j| self.fft.forward(comps[j])),
        })
    }

    pub fn to_physical(&self, u: &SpectralField) -> [Vec<f64>; 3] {
        core::array::from_fn(|j| self.fft.backward(&u.c[j]))
    }

    /// Samples `f` at the nodes.
    pub fn sample(&self, f: impl Fn([f64; 3]) -> [f64; 3]) -> [Vec<f64>; 3] {
        let n = self.n;
        let mut out: [Vec<f64>; 3] = core::array::from_fn(|_| Vec::with_capacity(n * n * n));
        for idx in 0..n * n * n {
            let x = [
                self.coord(idx / (n * n)),
                self.coord((idx / n) % n),
                self.coord(idx % n),
            ];
            let v = f(x);
            for (o, vj) in out.iter_mut().zip(v) {
                o.push(vj);
            }
        }
        out
    }

    pub fn from_fn(&self, f: impl Fn([f64; 3]) -> [f64; 3]) -> SpectralField {
        let p = self.sample(f);
        self.from_physical([&p[0], &p[1], &p[2]])
            .expect("sampled on this grid")
    }

    pub fn dealias(&self, u: &mut SpectralField) {
        for comp in &mut u.c {
            for (v, keep) in comp.iter_mut().zip(&self.retained) {
                if !keep {
                    *v = ZERO;
                }
            }
        }
    }

    /// Leray projection `û ← û − k(k·û)/|k|²`; the mean mode is untouched.
    pub fn leray_project(&self, u: &mut SpectralField) {
        for idx in 0..self.len() {
            let k2 = self.k2[idx];
            if k2 == 0.0 {
                continue;
            }
            let k = self.k[idx];
            let dot = u.c[0][idx] * k[0] + u.c[1][idx] * k[1] + u.c[2][idx] * k[2];
            for j in 0..3 {
                u.c[j][idx] -= dot * (k[j] / k2);
            }
        }
    }

    pub fn projected(&self, u: &SpectralField) -> SpectralField {
        let mut out = u.clone();
        self.leray_project(&mut out);
        out
    }

    /// `max |k·û| / max |k||û|` over all modes (0 for the zero field).
    pub fn divergence_max(&self, u: &SpectralField) -> f64 {
        let mut div = 0.0f64;
        let mut scale = 0.0f64;
        for idx in 0..self.len() {
            let k = self.k[idx];
            let d = u.c[0][idx] * k[0] + u.c[1][idx] * k[1] + u.c[2][idx] * k[2];
            div = div.max(d.norm());
            let mag = (u.c.iter().map(|c| c[idx].norm_sqr()).sum::<f64>() * self.k2[idx]).sqrt();
            scale = scale.max(mag);
        }
        if scale == 0.0 {
            0.0
        } else {
            div / scale
        }
    }

    /// `∫ u·v dx` over the box.
    pub fn inner(&self, u: &SpectralField, v: &SpectralField) -> f64 {
        let vol = self.l.powi(3);
        let mut s = 0.0;
        for idx in 0..self.len() {
            let w = self.weight[idx];
            for j in 0..3 {
                s += w * (u.c[j][idx] * v.c[j][idx].conj()).re;
            }
        }
        vol * s
    }

    /// `‖u‖₂²`.
    pub fn energy(&self, u: &SpectralField) -> f64 {
        self.inner(u, u)
    }

    pub fn norm(&self, u: &SpectralField) -> f64 {
        self.energy(u).max(0.0).sqrt()
    }

    /// `‖∇u‖₂²`.
    pub fn enstrophy(&self, u: &SpectralField) -> f64 {
        let vol = self.l.powi(3);
        let mut s = 0.0;
        for idx in 0..self.len() {
            let mag: f64 = u.c.iter().map(|c| c[idx].norm_sqr()).sum();
            s += self.weight[idx] * self.k2[idx] * mag;
        }
        vol * s
    }

    /// `S(t)u = e^{−ν|k|²t} û`.
    pub fn stokes_semigroup(&self, u: &SpectralField, t: f64, nu: f64) -> Result<SpectralField> {
        if !(t >= 0.0) {
            return Err(Error::invalid("semigroup time must be nonnegative"));
        }
        self.check(u)?;
        let mut out = u.clone();
        for idx in 0..self.len() {
            let e = (-nu * self.k2[idx] * t).exp();
            for j in 0..3 {
                out.c[j][idx] *= e;
            }
        }
        Ok(out)
    }

    /// `Δu`.
    pub fn laplacian(&self, u: &SpectralField) -> SpectralField {
        let mut out = u.clone();
        for idx in 0..self.len() {
            for j in 0..3 {
                out.c[j][idx] *= -self.k2[idx];
            }
        }
        out
    }

    /// `B(u, v) = P[(u·∇)v]`, evaluated in divergence form `∂_j(u_j v)`
    /// (valid for divergence-free `u`) with 2/3-rule truncation of the
    /// output. Inputs are expected to be dealiased already.
    pub fn nonlinear_b(&self, u: &SpectralField, v: &SpectralField) -> SpectralField {
        let pu = self.to_physical(u);
        let pv = if core::ptr::eq(u, v) {
            pu.clone()
        } else {
            self.to_physical(v)
        };
        self.nonlinear_from_physical(&pu, &pv)
    }

    pub(crate) fn nonlinear_from_physical(
        &self,
        pu: &[Vec<f64>; 3],
        pv: &[Vec<f64>; 3],
    ) -> SpectralField {
        let mut out = self.zeros();
        let mut prod = vec![0.0; pu[0].len()];
        let i = Complex64::new(0.0, 1.0);
        for a in 0..3 {
            for b in 0..3 {
                // flux u_a v_b contributes ∂_a(u_a v_b) to component b
                for (p, (x, y)) in prod.iter_mut().zip(pu[a].iter().zip(&pv[b])) {
                    *p = x * y;
                }
                let spec = self.fft.forward(&prod);
                for idx in 0..self.len() {
                    if self.retained[idx] {
                        out.c[b][idx] += i * self.k[idx][a] * spec[idx];
                    }
                }
            }
        }
        self.leray_project(&mut out);
        out
    }

    /// Sampled field on the node grid, for SD norms.
    pub fn to_sampled(&self, u: &SpectralField) -> Result<SampledField> {
        let [a, b, c] = self.to_physical(u);
        SampledField::new(self.grid(), vec![a, b, c])
    }

    /// `(sin x cos y cos z, −cos x sin y cos z, 0)` with `x` scaled by `2π/L`.
    pub fn taylor_green(&self, amplitude: f64) -> SpectralField {
        let s = 2.0 * PI / self.l;
        self.from_fn(|x| {
            let (a, b, c) = (s * x[0], s * x[1], s * x[2]);
            [
                amplitude * a.sin() * b.cos() * c.cos(),
                -amplitude * a.cos() * b.sin() * c.cos(),
                0.0,
            ]
        })
    }

    /// `a·sin(k·x)` for integer mode `m` (k = 2πm/L) and amplitude vector
    /// `a`, projected onto `a ⊥ k`. Such a field has `(u·∇)u = 0`.
    pub fn single_mode(&self, m: [i32; 3], amplitude: [f64; 3]) -> SpectralField {
        let s = 2.0 * PI / self.l;
        let k = [m[0] as f64 * s, m[1] as f64 * s, m[2] as f64 * s];
        let k2: f64 = k.iter().map(|v| v * v).sum();
        let dot: f64 = k.iter().zip(&amplitude).map(|(a, b)| a * b).sum();
        let a: [f64; 3] = core::array::from_fn(|j| {
            if k2 > 0.0 {
                amplitude[j] - k[j] * dot / k2
            } else {
                amplitude[j]
            }
        });
        self.from_fn(|x| {
            let phase = (k[0] * x[0] + k[1] * x[1] + k[2] * x[2]).sin();
            [a[0] * phase, a[1] * phase, a[2] * phase]
        })
    }

    /// Random dealiased divergence-free field with spectrum peaked near
    /// `k_peak`, scaled to `‖u‖₂ = norm`.
    pub fn random_field(&self, seed: u64, k_peak: f64, norm: f64) -> SpectralField {
        let mut rng = Rng::seeded(seed);
        let n3 = self.n * self.n * self.n;
        let comps: [Vec<f64>; 3] =
            core::array::from_fn(|_| (0..n3).map(|_| rng.normal()).collect());
        let mut u = self
            .from_physical([&comps[0], &comps[1], &comps[2]])
            .expect("sized for this grid");
        let kp2 = (k_peak * 2.0 * PI / self.l).powi(2);
        for idx in 0..self.len() {
            let shape = if self.k2[idx] == 0.0 {
                0.0
            } else {
                (self.k2[idx] / kp2) * (-self.k2[idx] / kp2).exp()
            };
            for j in 0..3 {
                u.c[j][idx] *= shape;
            }
        }
        self.dealias(&mut u);
        self.leray_project(&mut u);
        // round trip through physical space enforces exact reality
        let p = self.to_physical(&u);
        let mut u = self
            .from_physical([&p[0], &p[1], &p[2]])
            .expect("sized for this grid");
        self.dealias(&mut u);
        self.leray_project(&mut u);
        let e = self.norm(&u);
        if e > 0.0 {
            u.scale(norm / e);
        }
        u
    }
}
