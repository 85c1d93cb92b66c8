//! Plain `key = value` configuration files (TOML syntax).

use std::f64::consts::PI;
use std::path::Path;

use anyhow::{bail, Context, Result};
use sdnse_core::embeddings::{CorpusSpec, Generator};
use sdnse_core::nse::{
    density_profile, DensityConfig, Forcing, ForcingProfile, SolverConfig, Spectral, SpectralField,
};
use serde::Deserialize;

pub fn read_text(path: &Path) -> Result<String> {
    std::fs::read_to_string(path).with_context(|| format!("cannot read {}", path.display()))
}

#[derive(Clone, Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ForcingSection {
    pub profile: Option<String>,
    pub amplitude: Option<f64>,
    pub theta: Option<f64>,
    pub omega: Option<f64>,
}

#[derive(Clone, Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DensitySection {
    pub mu: f64,
    pub beta: f64,
    pub floor: Option<f64>,
    pub rho_min: Option<f64>,
    pub rho_max: Option<f64>,
}

#[derive(Clone, Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InitialSection {
    /// `taylor-green`, `random`, `single-mode` or `zero`.
    pub kind: Option<String>,
    pub amplitude: Option<f64>,
    pub k_peak: Option<f64>,
    pub norm: Option<f64>,
    pub mode: Option<[i32; 3]>,
    pub direction: Option<[f64; 3]>,
}

/// Contents of `run.toml`.
#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunFile {
    pub nu: Option<f64>,
    #[serde(rename = "N", alias = "n")]
    pub n: usize,
    #[serde(rename = "L", alias = "l")]
    pub l: Option<f64>,
    pub dt: f64,
    #[serde(rename = "T", alias = "t")]
    pub t_end: f64,
    pub seed: Option<u64>,
    pub dealias: Option<bool>,
    pub nonlinear: Option<bool>,
    pub checkpoint_every: Option<usize>,
    pub cfl: Option<f64>,
    /// Truncation of the SD² norm recorded at checkpoints.
    #[serde(rename = "K", alias = "k")]
    pub k_max: Option<u64>,
    pub forcing: Option<ForcingSection>,
    pub density: Option<DensitySection>,
    pub initial: Option<InitialSection>,
}

pub const DEFAULT_K: u64 = 60;

impl RunFile {
    pub fn parse(text: &str) -> Result<Self> {
        Ok(toml::from_str(text)?)
    }

    pub fn load(path: &Path) -> Result<Self> {
        Self::parse(&read_text(path)?).with_context(|| format!("in {}", path.display()))
    }

    pub fn seed(&self) -> u64 {
        self.seed.unwrap_or(0)
    }

    pub fn sd_k(&self) -> u64 {
        self.k_max.unwrap_or(DEFAULT_K)
    }

    pub fn solver_config(&self) -> Result<SolverConfig> {
        let defaults = SolverConfig::default();
        let forcing = match &self.forcing {
            None => Forcing::none(),
            Some(f) => {
                let profile = match f.profile.as_deref().unwrap_or("none") {
                    "none" | "zero" => ForcingProfile::None,
                    "taylor-green" => ForcingProfile::TaylorGreen,
                    "kolmogorov" => ForcingProfile::Kolmogorov,
                    other => {
                        bail!("unknown forcing.profile {other:?} (none, taylor-green, kolmogorov)")
                    }
                };
                Forcing {
                    profile,
                    amplitude: f.amplitude.unwrap_or(if profile == ForcingProfile::None {
                        0.0
                    } else {
                        1.0
                    }),
                    theta: f.theta.unwrap_or(0.5),
                    omega: f.omega.unwrap_or(1.0),
                }
            }
        };
        let density = self.density.as_ref().map(|d| DensityConfig {
            mu: d.mu,
            beta: d.beta,
            floor: d.floor.unwrap_or(1e-3 * d.beta),
        });
        let steps = (self.t_end / self.dt).round().max(1.0) as usize;
        let cfg = SolverConfig {
            nu: match (&density, self.nu) {
                (Some(d), _) => d.mu / d.beta,
                (None, Some(nu)) => nu,
                (None, None) => {
                    bail!("nu is required unless density.mu and density.beta are given")
                }
            },
            n: self.n,
            l: self.l.unwrap_or(2.0 * PI),
            dt: self.dt,
            t_end: self.t_end,
            forcing,
            dealias: self.dealias.unwrap_or(true),
            nonlinear: self.nonlinear.unwrap_or(true),
            seed: self.seed(),
            checkpoint_every: self.checkpoint_every.unwrap_or((steps / 20).max(1)),
            cfl_limit: self.cfl.unwrap_or(defaults.cfl_limit),
            density,
        };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn initial_velocity(&self, sp: &Spectral) -> Result<SpectralField> {
        let init = self.initial.clone().unwrap_or_default();
        let amplitude = init.amplitude.unwrap_or(1.0);
        let u = match init.kind.as_deref().unwrap_or("taylor-green") {
            "taylor-green" => sp.taylor_green(amplitude),
            "random" => sp.random_field(
                self.seed(),
                init.k_peak.unwrap_or(2.0),
                init.norm.unwrap_or(1.0),
            ),
            "single-mode" => {
                let dir = init.direction.unwrap_or([1.0, 0.0, 0.0]);
                let scaled = [dir[0] * amplitude, dir[1] * amplitude, dir[2] * amplitude];
                sp.single_mode(init.mode.unwrap_or([0, 0, 1]), scaled)
            }
            "zero" => sp.zeros(),
            other => {
                bail!("unknown initial.kind {other:?} (taylor-green, random, single-mode, zero)")
            }
        };
        Ok(u)
    }

    pub fn initial_density(&self, sp: &Spectral) -> Option<Vec<f64>> {
        self.density.as_ref().map(|d| {
            let lo = d.rho_min.unwrap_or(0.2 * d.beta);
            let hi = d.rho_max.unwrap_or(d.beta);
            density_profile(sp, lo, hi)
        })
    }
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GeneratorSection {
    pub kind: String,
    pub center: Option<Vec<f64>>,
    pub width: Option<f64>,
    pub radius: Option<f64>,
    pub amplitude: Option<f64>,
    pub frequency: Option<f64>,
    pub shift: Option<Vec<f64>>,
    pub step: Option<u32>,
}

/// Contents of `corpus.toml`.
#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CorpusFile {
    pub dim: usize,
    pub half_width: f64,
    pub nodes: usize,
    #[serde(rename = "K", alias = "k")]
    pub k_max: u64,
    pub seed: Option<u64>,
    pub duality_tol: Option<f64>,
    /// Prepend the twenty-item randomized corpus.
    pub standard: Option<bool>,
    #[serde(default)]
    pub generator: Vec<GeneratorSection>,
}

impl CorpusFile {
    pub fn parse(text: &str) -> Result<Self> {
        Ok(toml::from_str(text)?)
    }

    pub fn load(path: &Path) -> Result<Self> {
        Self::parse(&read_text(path)?).with_context(|| format!("in {}", path.display()))
    }

    pub fn spec(&self) -> Result<CorpusSpec> {
        let mut spec = if self.standard.unwrap_or(false) {
            CorpusSpec::standard(
                self.dim,
                self.half_width,
                self.nodes,
                self.k_max,
                self.seed.unwrap_or(0),
            )
        } else {
            CorpusSpec {
                items: Vec::new(),
                ..CorpusSpec::standard(
                    self.dim,
                    self.half_width,
                    self.nodes,
                    self.k_max,
                    self.seed.unwrap_or(0),
                )
            }
        };
        if let Some(tol) = self.duality_tol {
            spec.duality_tol = tol;
        }
        for (i, g) in self.generator.iter().enumerate() {
            spec.items
                .push(generator(g, self.dim).with_context(|| format!("generator {}", i + 1))?);
        }
        if spec.items.is_empty() {
            bail!("corpus is empty: set standard = true or add [[generator]] sections");
        }
        Ok(spec)
    }
}

fn generator(g: &GeneratorSection, dim: usize) -> Result<Generator> {
    let center = || -> Result<Vec<f64>> {
        let c = g.center.clone().unwrap_or_else(|| vec![0.0; dim]);
        if c.len() != dim {
            bail!(
                "center has {} coordinates, corpus dimension is {dim}",
                c.len()
            );
        }
        Ok(c)
    };
    let need = |v: Option<f64>, name: &str| v.with_context(|| format!("{} needs {name}", g.kind));
    Ok(match g.kind.as_str() {
        "gaussian" => Generator::Gaussian {
            center: center()?,
            width: need(g.width, "width")?,
            amplitude: g.amplitude.unwrap_or(1.0),
        },
        "bump" => Generator::Bump {
            center: center()?,
            radius: need(g.radius, "radius")?,
            amplitude: g.amplitude.unwrap_or(1.0),
        },
        "oscillatory" => Generator::Oscillatory {
            frequency: need(g.frequency, "frequency")?,
            center: center()?,
            radius: need(g.radius, "radius")?,
            amplitude: g.amplitude.unwrap_or(1.0),
        },
        "translate-sequence" | "translate" => Generator::Translate {
            center: center()?,
            shift: g.shift.clone().unwrap_or_else(|| vec![1.0; 1]),
            step: g.step.unwrap_or(0),
            radius: need(g.radius, "radius")?,
        },
        "bmo-log" => Generator::BmoLog {
            radius: need(g.radius, "radius")?,
        },
        other => bail!("unknown generator kind {other:?}"),
    })
}

/// Optional knobs for the monitor stage.
#[derive(Clone, Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MonitorSection {
    pub norm: Option<String>,
    #[serde(rename = "K", alias = "k")]
    pub k_max: Option<u64>,
    pub nu: Option<f64>,
    pub contraction: Option<bool>,
    pub perturbation: Option<f64>,
    pub fit_from: Option<f64>,
}

/// Contents of `full.toml` for `pipeline`.
#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PipelineFile {
    pub out: Option<String>,
    pub run: toml::Table,
    #[serde(default)]
    pub monitor: MonitorSection,
    pub verify: Option<toml::Table>,
}

impl PipelineFile {
    pub fn load(path: &Path) -> Result<Self> {
        let text = read_text(path)?;
        toml::from_str(&text).with_context(|| format!("in {}", path.display()))
    }
}
