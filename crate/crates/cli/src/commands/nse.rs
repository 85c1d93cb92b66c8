//! `nse run` and the on-disk trajectory layout:
//!
//! ```text
//! dir/run.toml          copy of the config
//! dir/series.csv        t,E,enstrophy,sd_norm,div_max,rho_min,rho_max (every step)
//! dir/checkpoints.csv   step,t,sd_norm,velocity,density
//! dir/fields/u_%06d.csv x,y,z,u1,u2,u3
//! dir/fields/rho_%06d.csv x,y,z,rho
//! dir/manifest.json
//! ```

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use anyhow::Context;
use rayon::prelude::*;
use sdnse_core::nse::{Checkpoint, Solver, State, StepRecord, Trajectory};
use sdnse_core::sdspace::{sd_norm, SdConfig};
use sdnse_core::testfns::{TestFamily, TestFnConfig};

use crate::cli::NseRunArgs;
use crate::config::{read_text, RunFile};
use crate::error::Outcome;
use crate::fieldio::{fmt_num, read_table, write_grid_table, Table};
use crate::manifest::RunManifest;
use crate::require;

/// Gauss–Legendre panels per cube edge for SD² norms of solver fields.
pub const SD_PANELS: usize = 16;

pub const SERIES_HEADER: &str = "t,E,enstrophy,sd_norm,div_max,rho_min,rho_max";
pub const CHECKPOINT_HEADER: &str = "step,t,sd_norm,velocity,density";

pub fn sd_config(k: u64) -> SdConfig {
    SdConfig {
        k_max: k,
        panels: SD_PANELS,
    }
}

#[derive(Debug, Clone)]
pub struct RunSummary {
    pub dir: PathBuf,
    pub steps: usize,
    pub checkpoints: usize,
    pub final_energy: f64,
}

pub fn run(args: &NseRunArgs) -> Outcome<()> {
    let text = read_text(&args.config)?;
    let summary = run_to_dir(&text, Some(&args.config), &args.out)?;
    eprintln!(
        "{} steps, {} checkpoints, final E = {:e} -> {}",
        summary.steps,
        summary.checkpoints,
        summary.final_energy,
        summary.dir.display()
    );
    Ok(())
}

/// Solves the run described by `text` and writes the trajectory to `out`.
pub fn run_to_dir(text: &str, config_path: Option<&Path>, out: &Path) -> Outcome<RunSummary> {
    let run = RunFile::parse(text).context("in run config")?;
    let config = run.solver_config()?;
    let mut manifest = RunManifest::start("nse run", config_path, Some(run.seed()));
    if let Some(p) = config_path {
        manifest.input(p)?;
    }
    let solver = Solver::new(config)?;
    let sp = solver.spectral();
    let u0 = run.initial_velocity(sp)?;
    let rho0 = run.initial_density(sp);
    let mut traj = solver.solve(u0, rho0)?;

    let k = run.sd_k();
    let family = TestFamily::for_functionals(3, k, TestFnConfig::default())?;
    let cfg = sd_config(k);
    let norms: Vec<f64> = traj
        .checkpoints
        .par_iter()
        .map(|c| Ok(sd_norm(&family, &sp.to_sampled(&c.state.u)?, &cfg)?.value))
        .collect::<sdnse_core::Result<_>>()?;
    for (c, v) in traj.checkpoints.iter_mut().zip(norms) {
        c.sd_norm = Some(v);
    }

    std::fs::create_dir_all(out.join("fields"))
        .with_context(|| format!("cannot create {}", out.display()))?;
    std::fs::write(out.join("run.toml"), text)?;
    write_series(&out.join("series.csv"), &traj)?;
    write_checkpoints(out, &solver, &traj)?;
    manifest.outputs_under(out)?;
    manifest.write(&out.join("manifest.json"))?;
    Ok(RunSummary {
        dir: out.to_path_buf(),
        steps: traj.records.len() - 1,
        checkpoints: traj.checkpoints.len(),
        final_energy: traj.records.last().map_or(0.0, |r| r.energy),
    })
}

fn write_series(path: &Path, traj: &Trajectory) -> Outcome<()> {
    let mut sd = vec![f64::NAN; traj.records.len()];
    for c in &traj.checkpoints {
        sd[c.step] = c.sd_norm.unwrap_or(f64::NAN);
    }
    let mut s = String::with_capacity(64 * traj.records.len());
    s.push_str(SERIES_HEADER);
    s.push('\n');
    for (r, sd) in traj.records.iter().zip(sd) {
        let row = [
            r.t,
            r.energy,
            r.enstrophy,
            sd,
            r.div_max,
            r.rho_min,
            r.rho_max,
        ];
        let cells: Vec<String> = row.iter().map(|&v| fmt_num(v)).collect();
        writeln!(s, "{}", cells.join(",")).expect("string write");
    }
    std::fs::write(path, s).with_context(|| format!("cannot write {}", path.display()))?;
    Ok(())
}

fn velocity_name(step: usize) -> String {
    format!("fields/u_{step:06}.csv")
}

fn density_name(step: usize) -> String {
    format!("fields/rho_{step:06}.csv")
}

fn write_checkpoints(out: &Path, solver: &Solver, traj: &Trajectory) -> Outcome<()> {
    let sp = solver.spectral();
    let grid = sp.grid();
    let vel_header: Vec<String> = ["x", "y", "z", "u1", "u2", "u3"]
        .iter()
        .map(|s| s.to_string())
        .collect();
    let rho_header: Vec<String> = ["x", "y", "z", "rho"]
        .iter()
        .map(|s| s.to_string())
        .collect();
    let mut index = String::from(CHECKPOINT_HEADER);
    index.push('\n');
    for c in &traj.checkpoints {
        let phys = sp.to_physical(&c.state.u);
        let vel = velocity_name(c.step);
        write_grid_table(
            &out.join(&vel),
            &grid,
            &vel_header,
            &[&phys[0], &phys[1], &phys[2]],
        )?;
        let dens = match &c.state.rho {
            Some(r) => {
                let name = density_name(c.step);
                write_grid_table(&out.join(&name), &grid, &rho_header, &[r])?;
                name
            }
            None => String::new(),
        };
        let sd = fmt_num(c.sd_norm.unwrap_or(f64::NAN));
        writeln!(index, "{},{},{sd},{vel},{dens}", c.step, fmt_num(c.state.t))
            .expect("string write");
    }
    std::fs::write(out.join("checkpoints.csv"), index)?;
    Ok(())
}

/// A trajectory read back from a run directory.
pub struct LoadedRun {
    pub run: RunFile,
    pub solver: Solver,
    pub trajectory: Trajectory,
}

fn column<'a>(table: &'a Table, name: &str) -> anyhow::Result<&'a [f64]> {
    let i = table
        .header
        .iter()
        .position(|h| h == name)
        .with_context(|| format!("missing column {name:?}"))?;
    Ok(&table.columns[i])
}

/// Reads `run.toml`, `series.csv` and every checkpoint listed in
/// `checkpoints.csv`. `nu` overrides the viscosity of the run.
pub fn load_run(dir: &Path, nu: Option<f64>) -> Outcome<LoadedRun> {
    let run = RunFile::load(&dir.join("run.toml"))?;
    let mut config = run.solver_config()?;
    if let Some(nu) = nu {
        require!(nu > 0.0, "--nu must be positive");
        match &mut config.density {
            // keep μ/β = ν so the operator uses the requested viscosity
            Some(d) => d.mu = nu * d.beta,
            None => config.nu = nu,
        }
    }
    let solver = Solver::new(config.clone())?;
    let sp = solver.spectral();

    let series_path = dir.join("series.csv");
    let series = read_table(&series_path)?;
    require!(
        series.header.join(",") == SERIES_HEADER,
        "{}: unexpected header",
        series_path.display()
    );
    let t = column(&series, "t")?;
    let e = column(&series, "E")?;
    let ens = column(&series, "enstrophy")?;
    let div = column(&series, "div_max")?;
    let rmin = column(&series, "rho_min")?;
    let rmax = column(&series, "rho_max")?;
    let records: Vec<StepRecord> = (0..t.len())
        .map(|i| StepRecord {
            t: t[i],
            energy: e[i],
            enstrophy: ens[i],
            div_max: div[i],
            forcing_norm: sp.norm(&solver.forcing_at(t[i])),
            rho_min: rmin[i],
            rho_max: rmax[i],
            rho_mass: f64::NAN,
        })
        .collect();

    let index_path = dir.join("checkpoints.csv");
    let text = read_text(&index_path)?;
    let mut rdr = csv::ReaderBuilder::new()
        .trim(csv::Trim::All)
        .from_reader(text.as_bytes());
    require!(
        rdr.headers()
            .context("checkpoints.csv")?
            .iter()
            .collect::<Vec<_>>()
            .join(",")
            == CHECKPOINT_HEADER,
        "{}: unexpected header",
        index_path.display()
    );
    let mut checkpoints = Vec::new();
    for rec in rdr.records() {
        let rec = rec.context("checkpoints.csv")?;
        require!(rec.len() == 5, "checkpoints.csv: expected 5 fields per row");
        let step: usize = rec[0].parse().context("checkpoints.csv: bad step")?;
        let t: f64 = rec[1].parse().context("checkpoints.csv: bad time")?;
        let sd_norm = if rec[2].is_empty() {
            None
        } else {
            Some(rec[2].parse::<f64>().context("bad sd_norm")?)
        };
        let vel = read_table(&dir.join(&rec[3]))?;
        require!(
            vel.header.join(",") == "x,y,z,u1,u2,u3",
            "{}: unexpected header",
            &rec[3]
        );
        require!(
            vel.columns[3].len() == sp.n().pow(3),
            "{}: expected {} rows",
            &rec[3],
            sp.len()
        );
        let u = sp.from_physical([&vel.columns[3], &vel.columns[4], &vel.columns[5]])?;
        let rho = if rec[4].is_empty() {
            None
        } else {
            let r = read_table(&dir.join(&rec[4]))?;
            require!(
                r.header.join(",") == "x,y,z,rho",
                "{}: unexpected header",
                &rec[4]
            );
            Some(r.columns[3].clone())
        };
        checkpoints.push(Checkpoint {
            step,
            state: State { t, u, rho },
            sd_norm,
        });
    }
    require!(
        !checkpoints.is_empty(),
        "{}: no checkpoints",
        index_path.display()
    );
    require!(
        checkpoints[0].step == 0,
        "the first checkpoint must be the initial state"
    );
    Ok(LoadedRun {
        run,
        solver,
        trajectory: Trajectory {
            config,
            records,
            checkpoints,
        },
    })
}
