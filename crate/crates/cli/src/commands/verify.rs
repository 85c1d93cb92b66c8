use std::collections::BTreeMap;

use sdnse_core::embeddings::run_suite;
use sdnse_core::sdspace::SdConfig;
use sdnse_core::testfns::{TestFamily, TestFnConfig};
use serde::Serialize;

use super::emit_json;
use crate::cli::{Suite, VerifyArgs};
use crate::config::CorpusFile;
use crate::error::{Failure, Outcome};

#[derive(Debug, Serialize)]
pub struct CheckLine {
    pub check: &'static str,
    pub item: String,
    pub passed: bool,
    pub measured: BTreeMap<&'static str, f64>,
}

#[derive(Debug, Serialize)]
pub struct VerifyReport {
    pub suite: &'static str,
    pub checks: Vec<CheckLine>,
    pub passed_count: usize,
    pub failed_count: usize,
    pub passed: bool,
}

pub fn embeddings_report(corpus: &CorpusFile) -> Outcome<VerifyReport> {
    let spec = corpus.spec()?;
    let family = TestFamily::for_functionals(spec.dim, spec.k_max, TestFnConfig::default())?;
    let records = run_suite(&family, &spec, &SdConfig::default())?;
    let checks: Vec<CheckLine> = records
        .into_iter()
        .map(|r| CheckLine {
            check: r.check,
            item: r.item,
            passed: r.passed,
            measured: r.measured.into_iter().collect(),
        })
        .collect();
    let passed_count = checks.iter().filter(|c| c.passed).count();
    let failed_count = checks.len() - passed_count;
    Ok(VerifyReport {
        suite: "embeddings",
        checks,
        passed_count,
        failed_count,
        passed: failed_count == 0,
    })
}

pub fn run(args: &VerifyArgs) -> Outcome<()> {
    let corpus = CorpusFile::load(&args.corpus)?;
    let report = match args.suite {
        Suite::Embeddings => embeddings_report(&corpus)?,
    };
    emit_json(&report, args.out.as_deref())?;
    if report.passed {
        Ok(())
    } else {
        Err(Failure::assertion(format!(
            "{} of {} checks failed",
            report.failed_count,
            report.checks.len()
        )))
    }
}
