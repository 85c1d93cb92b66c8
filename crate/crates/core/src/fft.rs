//! Radix-2 complex FFT and real-to-complex transforms on cubic grids.
//!
//! Real fields on an `N³` grid are stored row-major (`z` fastest). Their
//! spectra keep only `k_z ∈ 0..=N/2`; the omitted half follows from
//! `û(−k) = conj(û(k))`, so inverse transforms are real by construction.

use alloc::vec;
use alloc::vec::Vec;
use core::f64::consts::PI;

use num_complex::Complex64;

use crate::{Error, Result};

/// In-place radix-2 transform of a fixed power-of-two length.
#[derive(Clone, Debug)]
pub struct Fft {
    n: usize,
    twiddles: Vec<Complex64>,
    bitrev: Vec<usize>,
}

impl Fft {
    pub fn new(n: usize) -> Result<Self> {
        if n < 2 || !n.is_power_of_two() {
            return Err(Error::invalid("FFT length must be a power of two >= 2"));
        }
        let bits = n.trailing_zeros();
        let bitrev = (0..n)
            .map(|i| i.reverse_bits() >> (usize::BITS - bits))
            .collect();
        let twiddles = (0..n / 2)
            .map(|k| Complex64::from_polar(1.0, -2.0 * PI * k as f64 / n as f64))
            .collect();
        Ok(Fft {
            n,
            twiddles,
            bitrev,
        })
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// `X_k = Σ_j x_j e^{−2πijk/n}`.
    pub fn forward(&self, data: &mut [Complex64]) {
        self.transform(data, false);
    }

    /// `x_j = Σ_k X_k e^{2πijk/n}` (no `1/n` factor).
    pub fn backward(&self, data: &mut [Complex64]) {
        self.transform(data, true);
    }

    fn transform(&self, data: &mut [Complex64], inverse: bool) {
        let n = self.n;
        debug_assert_eq!(data.len(), n);
        for i in 0..n {
            let j = self.bitrev[i];
            if j > i {
                data.swap(i, j);
            }
        }
        let mut len = 2;
        while len <= n {
            let half = len / 2;
            let step = n / len;
            for start in (0..n).step_by(len) {
                for k in 0..half {
                    let mut w = self.twiddles[k * step];
                    if inverse {
                        w = w.conj();
                    }
                    let a = data[start + k];
                    let b = data[start + k + half] * w;
                    data[start + k] = a + b;
                    data[start + k + half] = a - b;
                }
            }
            len *= 2;
        }
    }
}

/// Transforms between real `N³` grids and half spectra `N × N × (N/2+1)`.
#[derive(Clone, Debug)]
pub struct Fft3 {
    n: usize,
    fft: Fft,
}

impl Fft3 {
    pub fn new(n: usize) -> Result<Self> {
        Ok(Fft3 {
            n,
            fft: Fft::new(n)?,
        })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// Length of the half spectrum.
    pub fn spectrum_len(&self) -> usize {
        self.n * self.n * (self.n / 2 + 1)
    }

    pub fn real_len(&self) -> usize {
        self.n * self.n * self.n
    }

    /// Normalized forward transform: `û(k) = N^{−3} Σ_x u(x) e^{−ik·x}`.
    pub fn forward(&self, real: &[f64]) -> Vec<Complex64> {
        let n = self.n;
        let nz = n / 2 + 1;
        let scale = 1.0 / (n * n * n) as f64;
        let mut spec = vec![Complex64::new(0.0, 0.0); self.spectrum_len()];
        let mut line = vec![Complex64::new(0.0, 0.0); n];
        for ij in 0..n * n {
            for (z, l) in line.iter_mut().enumerate() {
                *l = Complex64::new(real[ij * n + z] * scale, 0.0);
            }
            self.fft.forward(&mut line);
            spec[ij * nz..(ij + 1) * nz].copy_from_slice(&line[..nz]);
        }
        self.complex_planes(&mut spec, false);
        spec
    }

    /// Inverse of [`Fft3::forward`]; the result is real by construction.
    pub fn backward(&self, spectrum: &[Complex64]) -> Vec<f64> {
        let n = self.n;
        let nz = n / 2 + 1;
        let mut spec = spectrum.to_vec();
        self.complex_planes(&mut spec, true);
        let mut real = vec![0.0; self.real_len()];
        let mut line = vec![Complex64::new(0.0, 0.0); n];
        for ij in 0..n * n {
            line[..nz].copy_from_slice(&spec[ij * nz..(ij + 1) * nz]);
            for z in nz..n {
                line[z] = line[n - z].conj();
            }
            // U(x, y, −k_z) = conj U(x, y, k_z) for real fields; the real
            // part drops any non-Hermitian residue in the k_z = 0, N/2 planes
            self.fft.backward(&mut line);
            for (z, l) in line.iter().enumerate() {
                real[ij * n + z] = l.re;
            }
        }
        real
    }

    /// Complex transforms along `x` and `y` for every `k_z` column.
    fn complex_planes(&self, spec: &mut [Complex64], inverse: bool) {
        let n = self.n;
        let nz = n / 2 + 1;
        let mut line = vec![Complex64::new(0.0, 0.0); n];
        // y axis
        for i in 0..n {
            for kz in 0..nz {
                for (j, l) in line.iter_mut().enumerate() {
                    *l = spec[(i * n + j) * nz + kz];
                }
                if inverse {
                    self.fft.backward(&mut line);
                } else {
                    self.fft.forward(&mut line);
                }
                for (j, l) in line.iter().enumerate() {
                    spec[(i * n + j) * nz + kz] = *l;
                }
            }
        }
        // x axis
        for j in 0..n {
            for kz in 0..nz {
                for (i, l) in line.iter_mut().enumerate() {
                    *l = spec[(i * n + j) * nz + kz];
                }
                if inverse {
                    self.fft.backward(&mut line);
                } else {
                    self.fft.forward(&mut line);
                }
                for (i, l) in line.iter().enumerate() {
                    spec[(i * n + j) * nz + kz] = *l;
                }
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::Rng;
    use proptest::prelude::*;

    fn naive_dft(x: &[Complex64]) -> Vec<Complex64> {
        let n = x.len();
        (0..n)
            .map(|k| {
                x.iter()
                    .enumerate()
                    .fold(Complex64::new(0.0, 0.0), |acc, (j, v)| {
                        acc + v * Complex64::from_polar(1.0, -2.0 * PI * (j * k) as f64 / n as f64)
                    })
            })
            .collect()
    }

    #[test]
    fn rejects_bad_lengths() {
        assert!(Fft::new(12).is_err());
        assert!(Fft::new(1).is_err());
    }

    #[test]
    fn matches_naive_dft() {
        let mut rng = Rng::seeded(1);
        for n in [2usize, 4, 8, 32, 64] {
            let x: Vec<Complex64> = (0..n)
                .map(|_| Complex64::new(rng.normal(), rng.normal()))
                .collect();
            let mut y = x.clone();
            Fft::new(n).unwrap().forward(&mut y);
            for (a, b) in y.iter().zip(naive_dft(&x)) {
                assert!((a - b).norm() < 1e-12 * n as f64);
            }
        }
    }

    #[test]
    fn single_mode_lands_on_its_wavevector() {
        let n = 8;
        let f3 = Fft3::new(n).unwrap();
        let h = 2.0 * PI / n as f64;
        let real: Vec<f64> = (0..n * n * n)
            .map(|idx| {
                let (i, j, k) = (idx / (n * n), (idx / n) % n, idx % n);
                (2.0 * i as f64 * h + 3.0 * k as f64 * h - j as f64 * h).cos()
            })
            .collect();
        let spec = f3.forward(&real);
        let nz = n / 2 + 1;
        // cos(k·x) = (e^{ik·x} + e^{−ik·x})/2 with k = (2, −1, 3)
        let at = |i: usize, j: usize, k: usize| spec[(i * n + j) * nz + k];
        assert!((at(2, n - 1, 3) - Complex64::new(0.5, 0.0)).norm() < 1e-14);
        let total: f64 = spec.iter().map(|c| c.norm()).sum();
        assert!((total - 0.5).abs() < 1e-13);
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(16))]
        #[test]
        fn round_trip_is_identity(seed in 0u64..1000) {
            let n = 16;
            let f3 = Fft3::new(n).unwrap();
            let mut rng = Rng::seeded(seed);
            let real: Vec<f64> = (0..n * n * n).map(|_| rng.normal()).collect();
            let back = f3.backward(&f3.forward(&real));
            for (a, b) in real.iter().zip(&back) {
                prop_assert!((a - b).abs() < 1e-12);
            }
        }

        #[test]
        fn parseval(seed in 0u64..1000) {
            let n = 8;
            let f3 = Fft3::new(n).unwrap();
            let mut rng = Rng::seeded(seed);
            let real: Vec<f64> = (0..n * n * n).map(|_| rng.normal()).collect();
            let spec = f3.forward(&real);
            let nz = n / 2 + 1;
            let mut s = 0.0;
            for (idx, c) in spec.iter().enumerate() {
                let kz = idx % nz;
                let w = if kz == 0 || kz == n / 2 { 1.0 } else { 2.0 };
                s += w * c.norm_sqr();
            }
            let mean_sq = real.iter().map(|v| v * v).sum::<f64>() / (n * n * n) as f64;
            prop_assert!((s - mean_sq).abs() < 1e-12 * mean_sq.max(1.0));
        }
    }
}
