//! Verification harness for the embedding and norm-comparison theorems,
//! run over a corpus of generated fields.
//!
//! Every inequality is asserted with constants measured on the same
//! family and grid (`c_q = max_{k≤K} ‖E_k‖_{q′}`), plus the certified
//! truncation tail. Whether the measured constants stay below 1 is recorded
//! separately.

use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

#[allow(unused_imports)] // inherent once std is linked
use num_traits::Float;

use crate::field::{Grid, SampledField, ScalarField};
use crate::rng::Rng;
use crate::sdspace::{
    embedding_constant, functional_df, functional_f, sd_norm_p, sd_norm_p_set, weight,
    FunctionalSet, SdConfig,
};
use crate::testfns::TestFamily;
use crate::{Error, Result};

/// Relative slack for floating-point comparisons of computed sides.
const SLACK: f64 = 1e-12;

/// Component weights used to turn a scalar profile into a vector field.
const DIRECTION: [f64; 3] = [1.0, -0.5, 0.25];

/// `exp(1 − 1/(1 − t²))` for `|t| < 1`, else 0; peak value 1.
pub fn bump_profile(t: f64) -> f64 {
    let u = 1.0 - t * t;
    if u <= 0.0 {
        0.0
    } else {
        (1.0 - 1.0 / u).exp()
    }
}

/// Smooth step: 1 for `t ≤ 1/2`, 0 for `t ≥ 1`.
pub fn smooth_cutoff(t: f64) -> f64 {
    let e = |u: f64| if u > 0.0 { (-1.0 / u).exp() } else { 0.0 };
    let a = e(1.0 - t);
    let b = e(t - 0.5);
    if a + b == 0.0 {
        0.0
    } else {
        a / (a + b)
    }
}

fn distance(x: &[f64], c: &[f64]) -> f64 {
    x.iter()
        .zip(c.iter().chain(core::iter::repeat(&0.0)))
        .map(|(a, b)| (a - b) * (a - b))
        .sum::<f64>()
        .sqrt()
}

/// Field generators of the verification corpus.
#[derive(Clone, Debug, PartialEq)]
pub enum Generator {
    /// `A·exp(−|x−c|²/(2w²))`.
    Gaussian {
        center: Vec<f64>,
        width: f64,
        amplitude: f64,
    },
    /// `A·bump(|x−c|/R)`.
    Bump {
        center: Vec<f64>,
        radius: f64,
        amplitude: f64,
    },
    /// `A·sin(m x₁)·bump(|x−c|/R)`.
    Oscillatory {
        frequency: f64,
        center: Vec<f64>,
        radius: f64,
        amplitude: f64,
    },
    /// `bump(|x − c − step·shift|/R)`.
    Translate {
        center: Vec<f64>,
        shift: Vec<f64>,
        step: u32,
        radius: f64,
    },
    /// `ln|x₁|·cutoff(|x|/R)`; the grid must not have nodes on `x₁ = 0`.
    BmoLog { radius: f64 },
}

impl Generator {
    pub fn name(&self) -> &'static str {
        match self {
            Generator::Gaussian { .. } => "gaussian",
            Generator::Bump { .. } => "bump",
            Generator::Oscillatory { .. } => "oscillatory",
            Generator::Translate { .. } => "translate-sequence",
            Generator::BmoLog { .. } => "bmo-log",
        }
    }

    /// Scalar profile at `x`.
    pub fn profile(&self, x: &[f64]) -> f64 {
        match self {
            Generator::Gaussian {
                center,
                width,
                amplitude,
            } => {
                let r = distance(x, center);
                amplitude * (-0.5 * r * r / (width * width)).exp()
            }
            Generator::Bump {
                center,
                radius,
                amplitude,
            } => amplitude * bump_profile(distance(x, center) / radius),
            Generator::Oscillatory {
                frequency,
                center,
                radius,
                amplitude,
            } => amplitude * (frequency * x[0]).sin() * bump_profile(distance(x, center) / radius),
            Generator::Translate {
                center,
                shift,
                step,
                radius,
            } => {
                let c: Vec<f64> = center
                    .iter()
                    .zip(shift.iter().chain(core::iter::repeat(&0.0)))
                    .map(|(c, s)| c + *step as f64 * s)
                    .collect();
                bump_profile(distance(x, &c) / radius)
            }
            Generator::BmoLog { radius } => {
                x[0].abs().ln() * smooth_cutoff(distance(x, &[]) / radius)
            }
        }
    }

    fn check(&self, grid: &Grid) -> Result<()> {
        let positive = |v: f64, what: &str| {
            if v > 0.0 && v.is_finite() {
                Ok(())
            } else {
                Err(Error::invalid(format!(
                    "{}: {what} must be positive",
                    self.name()
                )))
            }
        };
        match self {
            Generator::Gaussian { width, .. } => positive(*width, "width"),
            Generator::Bump { radius, .. }
            | Generator::Oscillatory { radius, .. }
            | Generator::Translate { radius, .. }
            | Generator::BmoLog { radius } => positive(*radius, "radius"),
        }?;
        if let Generator::BmoLog { .. } = self {
            if (0..grid.shape()[0]).any(|i| grid.coord(0, i) == 0.0) {
                return Err(Error::invalid(
                    "bmo-log needs a grid without nodes on x1 = 0",
                ));
            }
        }
        Ok(())
    }

    /// Scalar sample of the profile.
    pub fn scalar(&self, grid: &Grid) -> Result<ScalarField> {
        self.check(grid)?;
        ScalarField::from_fn(grid.clone(), |x| self.profile(x))
    }

    /// Vector field `profile(x)·(1, −1/2, 1/4)`.
    pub fn field(&self, grid: &Grid) -> Result<SampledField> {
        let s = self.scalar(grid)?;
        let n = grid.dim();
        let components = DIRECTION[..n]
            .iter()
            .map(|d| s.values.iter().map(|v| d * v).collect())
            .collect();
        SampledField::new(grid.clone(), components)
    }
}

/// A corpus of generated fields on a shared cubic grid `[−half, half]^dim`.
#[derive(Clone, Debug, PartialEq)]
pub struct CorpusSpec {
    pub dim: usize,
    pub half_width: f64,
    pub nodes: usize,
    pub k_max: u64,
    pub seed: u64,
    /// Bound on the derivative-duality residual; it is an `O(h²)`
    /// finite-difference error, so coarse grids need a looser value.
    pub duality_tol: f64,
    pub items: Vec<Generator>,
}

impl CorpusSpec {
    /// Twenty randomized items: gaussians, bumps, oscillatory bumps,
    /// translates and truncated logarithms.
    pub fn standard(dim: usize, half_width: f64, nodes: usize, k_max: u64, seed: u64) -> Self {
        let mut rng = Rng::seeded(seed);
        let point = |rng: &mut Rng, spread: f64| -> Vec<f64> {
            (0..dim).map(|_| rng.uniform_in(-spread, spread)).collect()
        };
        let mut items = Vec::with_capacity(20);
        for _ in 0..6 {
            let center = point(&mut rng, 1.5);
            items.push(Generator::Gaussian {
                center,
                width: rng.uniform_in(0.3, 1.2),
                amplitude: rng.uniform_in(-2.0, 2.0),
            });
        }
        for _ in 0..5 {
            let center = point(&mut rng, 1.5);
            items.push(Generator::Bump {
                center,
                radius: rng.uniform_in(0.5, 2.0),
                amplitude: rng.uniform_in(0.5, 3.0),
            });
        }
        for _ in 0..5 {
            let center = point(&mut rng, 1.0);
            items.push(Generator::Oscillatory {
                frequency: rng.uniform_in(1.0, 8.0),
                center,
                radius: rng.uniform_in(1.0, 2.0),
                amplitude: 1.0,
            });
        }
        for step in [1u32, 3] {
            let center = point(&mut rng, 0.5);
            items.push(Generator::Translate {
                center,
                shift: vec![0.4; dim],
                step,
                radius: 0.8,
            });
        }
        for radius in [1.5, 2.5] {
            items.push(Generator::BmoLog { radius });
        }
        CorpusSpec {
            dim,
            half_width,
            nodes,
            k_max,
            seed,
            duality_tol: 1e-6,
            items,
        }
    }

    pub fn grid(&self) -> Result<Grid> {
        Grid::cube(self.dim, self.half_width, self.nodes)
    }

    /// `(label, field)` for every item.
    pub fn generate(&self) -> Result<Vec<(String, SampledField)>> {
        let grid = self.grid()?;
        self.items
            .iter()
            .enumerate()
            .map(|(i, g)| Ok((format!("{}#{}", g.name(), i), g.field(&grid)?)))
            .collect()
    }
}

/// `‖E_k‖_{q′}` for `k ≤ K` and `c_q` = their maximum.
#[derive(Clone, Debug, PartialEq)]
pub struct EmbeddingConstants {
    pub q: f64,
    pub c: f64,
    pub per_k: Vec<f64>,
}

impl EmbeddingConstants {
    pub fn compute(family: &TestFamily, q: f64, k_max: u64) -> Result<Self> {
        let (c, per_k) = embedding_constant(family, q, k_max)?;
        Ok(EmbeddingConstants { q, c, per_k })
    }

    /// Every measured `‖E_k‖_{q′}` is below 1.
    pub fn all_below_one(&self) -> bool {
        self.per_k.iter().all(|&v| v < 1.0)
    }

    fn upto(&self, k_max: u64) -> Result<f64> {
        if (self.per_k.len() as u64) < k_max {
            return Err(Error::invalid(
                "embedding constants computed for fewer functionals than K",
            ));
        }
        Ok(self.per_k[..k_max as usize]
            .iter()
            .cloned()
            .fold(0.0, f64::max))
    }
}

/// `sd_norm(f) ≤ c_q‖f‖_q + tail`.
#[derive(Clone, Debug, PartialEq)]
pub struct EmbeddingReport {
    pub q: f64,
    pub lhs: f64,
    pub norm_q: f64,
    pub c_q: f64,
    pub tail: f64,
    pub rhs: f64,
    pub passed: bool,
    /// The measured constant is below 1.
    pub c_q_below_one: bool,
}

pub fn check_embedding_lp(
    family: &TestFamily,
    f: &SampledField,
    constants: &EmbeddingConstants,
    config: &SdConfig,
) -> Result<EmbeddingReport> {
    let set = FunctionalSet::compute(family, f, config)?;
    embedding_from_set(&set, f, constants)
}

fn embedding_from_set(
    set: &FunctionalSet,
    f: &SampledField,
    constants: &EmbeddingConstants,
) -> Result<EmbeddingReport> {
    let sd = sd_norm_p_set(set, 2.0)?;
    let c_q = constants.upto(set.k_max())?;
    let norm_q = f.norm(constants.q);
    let rhs = c_q * norm_q + sd.tail_bound;
    Ok(EmbeddingReport {
        q: constants.q,
        lhs: sd.value,
        norm_q,
        c_q,
        tail: sd.tail_bound,
        rhs,
        passed: sd.value <= rhs * (1.0 + SLACK),
        c_q_below_one: constants.per_k[..set.k_max() as usize]
            .iter()
            .all(|&v| v < 1.0),
    })
}

/// SD² norms along a sequence expected to be weakly null.
#[derive(Clone, Debug, PartialEq)]
pub struct CompactnessReport {
    pub norms: Vec<f64>,
    /// `max_{k≤K} |F_k(f_m)|` per element.
    pub max_functional: Vec<f64>,
    pub final_over_first: f64,
    /// Strictly decreasing over the last half of the sequence.
    pub decreasing_tail: bool,
    /// The sequence shows no decay (final ≥ half the first).
    pub not_weakly_null: bool,
    pub passed: bool,
}

pub fn check_compactness(
    family: &TestFamily,
    sequence: &[SampledField],
    config: &SdConfig,
) -> Result<CompactnessReport> {
    if sequence.len() < 2 {
        return Err(Error::invalid(
            "compactness check needs at least two fields",
        ));
    }
    let mut norms = Vec::with_capacity(sequence.len());
    let mut max_functional = Vec::with_capacity(sequence.len());
    for f in sequence {
        let set = FunctionalSet::compute(family, f, config)?;
        norms.push(sd_norm_p_set(&set, 2.0)?.value);
        max_functional.push(
            set.values
                .iter()
                .fold(0.0, |m: f64, v| m.max(v.value.norm())),
        );
    }
    let first = norms[0];
    let last = norms[norms.len() - 1];
    let final_over_first = if first > 0.0 { last / first } else { 0.0 };
    let half = norms.len() / 2;
    let decreasing_tail = norms[half.saturating_sub(1)..]
        .windows(2)
        .all(|w| w[1] < w[0]);
    Ok(CompactnessReport {
        not_weakly_null: final_over_first >= 0.5,
        passed: final_over_first < 0.05 && decreasing_tail,
        norms,
        max_functional,
        final_over_first,
        decreasing_tail,
    })
}

/// `sin(m x₁)·bump(|x|/R)` for `m = 1, 2, 4, …, max_m`.
pub fn oscillatory_sequence(grid: &Grid, radius: f64, max_m: u32) -> Result<Vec<SampledField>> {
    let mut out = Vec::new();
    let mut m = 1u32;
    while m <= max_m {
        let g = Generator::Oscillatory {
            frequency: m as f64,
            center: vec![0.0; grid.dim()],
            radius,
            amplitude: 1.0,
        };
        out.push(g.field(grid)?);
        m *= 2;
    }
    Ok(out)
}

/// Bumps marched along `shift` for `steps` steps.
pub fn translate_sequence(
    grid: &Grid,
    shift: &[f64],
    radius: f64,
    steps: u32,
) -> Result<Vec<SampledField>> {
    (0..=steps)
        .map(|step| {
            Generator::Translate {
                center: vec![0.0; grid.dim()],
                shift: shift.to_vec(),
                step,
                radius,
            }
            .field(grid)
        })
        .collect()
}

/// Integration-by-parts duality and the derivative-norm ratio.
#[derive(Clone, Debug, PartialEq)]
pub struct WeakDerivativeReport {
    pub alpha: Vec<u32>,
    /// `|F_k(D^α f) + ∫ ∂_a E_k · D^{α−e_a} f|` per `k`.
    pub residuals: Vec<f64>,
    pub max_residual: f64,
    /// `sd_norm(D^α f)/sd_norm(f)`; recorded only.
    pub ratio: f64,
    /// `f` is negligible on the box boundary, so no boundary terms arise.
    pub compact_support: bool,
}

pub fn check_weak_derivative(
    family: &TestFamily,
    f: &SampledField,
    alpha: &[u32],
    config: &SdConfig,
) -> Result<WeakDerivativeReport> {
    if alpha.len() != f.dim() {
        return Err(Error::invalid(
            "multi-index length must equal the dimension",
        ));
    }
    let df = f.derivative_multi(alpha);
    let base = sd_norm_p(family, f, 2.0, config)?.value;
    let deriv = sd_norm_p(family, &df, 2.0, config)?.value;
    let ratio = if base > 0.0 { deriv / base } else { 0.0 };
    let mut residuals = Vec::with_capacity(config.k_max as usize);
    if let Some(axis) = alpha.iter().position(|&a| a > 0) {
        let mut lower = alpha.to_vec();
        lower[axis] -= 1;
        let g = f.derivative_multi(&lower);
        for k in 1..=config.k_max {
            let cube = family.cube(k)?;
            let lhs = functional_f(family, &cube, &df, config)?.value;
            let rhs = functional_df(family, &cube, &g, axis, config)?;
            residuals.push((lhs + rhs).norm());
        }
    } else {
        residuals.resize(config.k_max as usize, 0.0);
    }
    let scale = (0..f.grid.len()).fold(0.0, |m: f64, i| m.max(f.magnitude(i)));
    Ok(WeakDerivativeReport {
        alpha: alpha.to_vec(),
        max_residual: residuals.iter().cloned().fold(0.0, f64::max),
        residuals,
        ratio,
        compact_support: f.boundary_max() <= 1e-10 * scale.max(f64::MIN_POSITIVE),
    })
}

/// Multi-indices with `|α| ≤ kmax` in `dim` variables.
pub fn multi_indices(dim: usize, kmax: u32) -> Vec<Vec<u32>> {
    let mut out = vec![vec![0u32; dim]];
    for _ in 0..kmax {
        let mut next = Vec::new();
        for a in &out {
            for axis in 0..dim {
                let mut b = a.clone();
                b[axis] += 1;
                next.push(b);
            }
        }
        out.extend(next);
        out.sort();
        out.dedup();
    }
    out
}

/// Generic two-sided comparison report.
#[derive(Clone, Debug, PartialEq)]
pub struct InequalityReport {
    pub lhs: f64,
    pub rhs: f64,
    pub passed: bool,
}

/// `sd_norm(f)^p ≤ c^p Σ_{|α|≤kmax} ‖D^α f‖_p^p + tail` (for `p = ∞` the
/// max-form `sd_norm(f) ≤ c max_α ‖D^α f‖_∞ + tail`).
pub fn check_sobolev_membership(
    family: &TestFamily,
    f: &SampledField,
    kmax: u32,
    constants: &EmbeddingConstants,
    config: &SdConfig,
) -> Result<InequalityReport> {
    let p = constants.q;
    let sd = sd_norm_p(family, f, 2.0, config)?;
    let c = constants.upto(config.k_max)?;
    let norms: Vec<f64> = multi_indices(f.dim(), kmax)
        .iter()
        .map(|a| f.derivative_multi(a).norm(p))
        .collect();
    let (lhs, rhs) = if p.is_infinite() {
        let m = norms.iter().cloned().fold(0.0, f64::max);
        (sd.value, c * m + sd.tail_bound)
    } else {
        let s: f64 = norms.iter().map(|v| v.powf(p)).sum();
        (
            sd.value.powf(p),
            (c * s.powf(1.0 / p) + sd.tail_bound).powf(p),
        )
    };
    Ok(InequalityReport {
        lhs,
        rhs,
        passed: lhs <= rhs * (1.0 + SLACK),
    })
}

/// `sd_norm_p(f+g) ≤ sd_norm_p(f) + sd_norm_p(g) + 2·tail`.
pub fn check_minkowski(
    family: &TestFamily,
    f: &SampledField,
    g: &SampledField,
    p: f64,
    config: &SdConfig,
) -> Result<InequalityReport> {
    let s = f.combine(1.0, g, 1.0)?;
    let nf = sd_norm_p(family, f, p, config)?;
    let ng = sd_norm_p(family, g, p, config)?;
    let ns = sd_norm_p(family, &s, p, config)?;
    let rhs = nf.value + ng.value + 2.0 * nf.tail_bound.max(ng.tail_bound);
    Ok(InequalityReport {
        lhs: ns.value,
        rhs,
        passed: ns.value <= rhs * (1.0 + SLACK) + f64::MIN_POSITIVE,
    })
}

/// `sd_norm_p(f) ≤ (Σ t_k)^{1/p} sd_norm_∞(f) + tail ≤ sd_norm_∞(f) + tail`.
#[derive(Clone, Debug, PartialEq)]
pub struct SdInftyReport {
    pub lhs: f64,
    pub middle: f64,
    pub rhs: f64,
    pub passed: bool,
}

pub fn check_sdinfty_in_sdp(
    family: &TestFamily,
    f: &SampledField,
    p: f64,
    config: &SdConfig,
) -> Result<SdInftyReport> {
    let set = FunctionalSet::compute(family, f, config)?;
    let np = sd_norm_p_set(&set, p)?;
    let ninf = sd_norm_p_set(&set, f64::INFINITY)?;
    let total: f64 = (1..=config.k_max).map(weight).sum();
    let middle = total.powf(1.0 / p) * ninf.value + np.tail_bound;
    let rhs = ninf.value + np.tail_bound;
    Ok(SdInftyReport {
        lhs: np.value,
        middle,
        rhs,
        passed: np.value <= middle * (1.0 + SLACK) && middle <= rhs * (1.0 + SLACK),
    })
}

/// Lower bound on the BMO norm: the largest mean oscillation
/// `(1/|Q|)∫_Q |g − g_Q|` over dyadic blocks and `cube_samples` random
/// grid-aligned cubes with log-uniform sizes. Means are node averages.
pub fn bmo_norm(g: &ScalarField, cube_samples: usize, seed: u64) -> f64 {
    let grid = &g.grid;
    let dim = grid.dim();
    let shape = grid.shape();
    let min_n = shape.iter().cloned().min().unwrap_or(0);
    let mut block = Vec::new();
    let mut oscillation = |lo: &[usize], width: &[usize]| -> f64 {
        let count: usize = width.iter().product();
        let mut idx = [0usize; 3];
        block.clear();
        for flat in 0..count {
            let mut rem = flat;
            for a in (0..dim).rev() {
                idx[a] = lo[a] + rem % width[a];
                rem /= width[a];
            }
            block.push(g.values[grid.index(&idx[..dim])]);
        }
        let mean = block.iter().sum::<f64>() / count as f64;
        block.iter().map(|v| (v - mean).abs()).sum::<f64>() / count as f64
    };
    let mut best = 0.0f64;
    // dyadic blocks
    let mut parts = 1usize;
    while min_n / parts >= 2 {
        let mut lo = [0usize; 3];
        let mut width = [0usize; 3];
        for block in 0..parts.pow(dim as u32) {
            let mut rem = block;
            for a in 0..dim {
                let b = rem % parts;
                rem /= parts;
                let start = b * shape[a] / parts;
                let end = (b + 1) * shape[a] / parts;
                lo[a] = start;
                width[a] = end - start;
            }
            best = best.max(oscillation(&lo[..dim], &width[..dim]));
        }
        parts *= 2;
    }
    // random cubes
    let mut rng = Rng::seeded(seed);
    if min_n >= 2 {
        let ln_max = (min_n as f64).ln();
        let ln_min = 2f64.ln();
        for _ in 0..cube_samples {
            let w = (rng.uniform_in(ln_min, ln_max).exp().round() as usize).clamp(2, min_n);
            let mut lo = [0usize; 3];
            let width = [w; 3];
            for a in 0..dim {
                lo[a] = rng.below(shape[a] - w + 1);
            }
            best = best.max(oscillation(&lo[..dim], &width[..dim]));
        }
    }
    best
}

/// Pairing of `u = Σ ∂_i f^i` with the test fields.
#[derive(Clone, Debug, PartialEq)]
pub struct BmoPairingReport {
    pub bmo_norms: Vec<f64>,
    /// `sup_{k≤K} |F_k(u)|`.
    pub sd_infinity: f64,
    pub sup_finite: bool,
    /// `max_k Σ_i |F_k(∂_i f^i) + ∫ ∂_i E_k · f^i|`.
    pub max_residual: f64,
}

/// Scalars are paired with `E_k` as the vector `(u, …, u)`.
pub fn check_bmo_inverse_pairing(
    family: &TestFamily,
    f_components: &[ScalarField],
    config: &SdConfig,
    cube_samples: usize,
    seed: u64,
) -> Result<BmoPairingReport> {
    let dim = family.dim();
    if f_components.len() != dim {
        return Err(Error::invalid("need one component per dimension"));
    }
    let grid = &f_components[0].grid;
    if f_components.iter().any(|f| &f.grid != grid) || grid.dim() != dim {
        return Err(Error::GridMismatch);
    }
    let bmo_norms = f_components
        .iter()
        .enumerate()
        .map(|(i, f)| bmo_norm(f, cube_samples, seed.wrapping_add(i as u64)))
        .collect();
    let mut u = vec![0.0; grid.len()];
    let partials: Vec<SampledField> = f_components
        .iter()
        .enumerate()
        .map(|(i, f)| {
            let d = f.derivative(i);
            for (s, v) in u.iter_mut().zip(&d.values) {
                *s += v;
            }
            SampledField::broadcast(&d)
        })
        .collect();
    let u_field = SampledField::broadcast(&ScalarField::new(grid.clone(), u)?);
    let set = FunctionalSet::compute(family, &u_field, config)?;
    let sd_infinity = sd_norm_p_set(&set, f64::INFINITY)?.value;
    let broadcast: Vec<SampledField> = f_components.iter().map(SampledField::broadcast).collect();
    let mut max_residual = 0.0f64;
    for k in 1..=config.k_max {
        let cube = family.cube(k)?;
        let mut r = 0.0;
        for i in 0..dim {
            let lhs = functional_f(family, &cube, &partials[i], config)?.value;
            let rhs = functional_df(family, &cube, &broadcast[i], i, config)?;
            r += (lhs + rhs).norm();
        }
        max_residual = max_residual.max(r);
    }
    Ok(BmoPairingReport {
        bmo_norms,
        sd_infinity,
        sup_finite: sd_infinity.is_finite(),
        max_residual,
    })
}

/// One line of a verification report.
#[derive(Clone, Debug, PartialEq)]
pub struct CheckRecord {
    pub check: &'static str,
    pub item: String,
    pub passed: bool,
    pub measured: Vec<(&'static str, f64)>,
}

/// Runs the embedding suite over a corpus: `L^q` embeddings for
/// `q ∈ {1, 2, ∞}`, Minkowski against the next item, `SD^∞ ⊂ SD^p`, the
/// `W^{1,2}` membership and, for smooth compactly supported items,
/// derivative duality.
pub fn run_suite(
    family: &TestFamily,
    spec: &CorpusSpec,
    config: &SdConfig,
) -> Result<Vec<CheckRecord>> {
    let config = SdConfig {
        k_max: spec.k_max,
        ..*config
    };
    let items = spec.generate()?;
    let constants = [1.0, 2.0, f64::INFINITY]
        .iter()
        .map(|&q| EmbeddingConstants::compute(family, q, spec.k_max))
        .collect::<Result<Vec<_>>>()?;
    let mut out = Vec::new();
    for (idx, (label, f)) in items.iter().enumerate() {
        let set = FunctionalSet::compute(family, f, &config)?;
        for c in &constants {
            let r = embedding_from_set(&set, f, c)?;
            out.push(CheckRecord {
                check: "embedding_lp",
                item: label.clone(),
                passed: r.passed,
                measured: vec![
                    ("q", r.q),
                    ("lhs", r.lhs),
                    ("rhs", r.rhs),
                    ("c_q", r.c_q),
                    ("c_q_below_one", r.c_q_below_one as u8 as f64),
                ],
            });
        }
        let g = &items[(idx + 1) % items.len()].1;
        let m = check_minkowski(family, f, g, 2.0, &config)?;
        out.push(CheckRecord {
            check: "minkowski",
            item: label.clone(),
            passed: m.passed,
            measured: vec![("p", 2.0), ("lhs", m.lhs), ("rhs", m.rhs)],
        });
        let s = check_sdinfty_in_sdp(family, f, 2.0, &config)?;
        out.push(CheckRecord {
            check: "sdinfty_in_sdp",
            item: label.clone(),
            passed: s.passed,
            measured: vec![
                ("p", 2.0),
                ("lhs", s.lhs),
                ("middle", s.middle),
                ("rhs", s.rhs),
            ],
        });
        let w = check_sobolev_membership(family, f, 1, &constants[1], &config)?;
        out.push(CheckRecord {
            check: "sobolev_membership",
            item: label.clone(),
            passed: w.passed,
            measured: vec![("kmax", 1.0), ("p", 2.0), ("lhs", w.lhs), ("rhs", w.rhs)],
        });
        let mut alpha = vec![0u32; f.dim()];
        alpha[0] = 1;
        if matches!(spec.items[idx], Generator::BmoLog { .. }) {
            continue;
        }
        let d = check_weak_derivative(family, f, &alpha, &config)?;
        if d.compact_support {
            out.push(CheckRecord {
                check: "weak_derivative",
                item: label.clone(),
                passed: d.max_residual <= spec.duality_tol,
                measured: vec![("max_residual", d.max_residual), ("ratio", d.ratio)],
            });
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests;
