use std::path::PathBuf;

use anyhow::Context;
use serde::Serialize;

use super::emit_json;
use super::monitor::{monitor_report, MonitorOptions, MonitorReport};
use super::nse::run_to_dir;
use super::verify::{embeddings_report, VerifyReport};
use crate::cli::{NormArg, PipelineArgs};
use crate::config::{CorpusFile, PipelineFile, DEFAULT_K};
use crate::error::{Failure, Outcome};
use crate::manifest::RunManifest;

#[derive(Debug, Serialize)]
pub struct RunLine {
    pub dir: String,
    pub steps: usize,
    pub checkpoints: usize,
    pub final_energy: f64,
}

#[derive(Debug, Serialize)]
pub struct PipelineReport {
    pub run: RunLine,
    pub monitor: MonitorReport,
    pub verify: Option<VerifyReport>,
    pub passed: bool,
}

pub fn run(args: &PipelineArgs) -> Outcome<()> {
    let file = PipelineFile::load(&args.config)?;
    let out = match (&args.out, &file.out) {
        (Some(p), _) => p.clone(),
        (None, Some(p)) => args.config.parent().unwrap_or(".".as_ref()).join(p),
        (None, None) => {
            return Err(anyhow::anyhow!(
                "no output directory: pass --out or set `out` in the config"
            )
            .into())
        }
    };
    let mut manifest = RunManifest::start("pipeline", Some(&args.config), None);
    manifest.input(&args.config)?;

    let run_text = toml::to_string(&file.run).context("cannot re-serialize [run]")?;
    let traj_dir = out.join("trajectory");
    let summary = run_to_dir(&run_text, None, &traj_dir)?;
    manifest.seed = file
        .run
        .get("seed")
        .and_then(|v| v.as_integer())
        .map(|s| s as u64);

    let m = &file.monitor;
    let norm = match m.norm.as_deref().unwrap_or("sd2") {
        "sd2" | "SD2" => NormArg::Sd2,
        "l2" | "L2" => NormArg::L2,
        other => return Err(anyhow::anyhow!("unknown monitor.norm {other:?} (sd2, l2)").into()),
    };
    let opts = MonitorOptions {
        nu: m.nu,
        k: m.k_max.unwrap_or(DEFAULT_K),
        norm,
        perturbation: m.perturbation.unwrap_or(1e-2),
        contraction: m.contraction.unwrap_or(true),
        fit_from: m.fit_from,
        m_hat: None,
    };
    let monitor = monitor_report(&traj_dir, &opts)?;

    let verify = match &file.verify {
        Some(table) => {
            let corpus: CorpusFile = table.clone().try_into().context("in [verify]")?;
            Some(embeddings_report(&corpus)?)
        }
        None => None,
    };
    let passed = monitor.passed && verify.as_ref().is_none_or(|v| v.passed);
    let report = PipelineReport {
        run: RunLine {
            dir: summary.dir.display().to_string(),
            steps: summary.steps,
            checkpoints: summary.checkpoints,
            final_energy: summary.final_energy,
        },
        monitor,
        verify,
        passed,
    };
    let report_path: PathBuf = out.join("pipeline.json");
    emit_json(&report, Some(&report_path))?;
    manifest.outputs_under(&out)?;
    manifest.write(&out.join("manifest.json"))?;
    if passed {
        Ok(())
    } else {
        let mut failed = Vec::new();
        if !report.monitor.passed {
            failed.push("monitor");
        }
        if report.verify.as_ref().is_some_and(|v| !v.passed) {
            failed.push("verify");
        }
        Err(Failure::assertion(format!(
            "pipeline: {} failed",
            failed.join(", ")
        )))
    }
}
