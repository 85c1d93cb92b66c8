use anyhow::{bail, ensure};
use sdnse_core::sdspace::{sd_norm_p, SdConfig};
use sdnse_core::testfns::{TestFamily, TestFnConfig};
use serde::Serialize;

use super::emit_json;
use crate::cli::SdnormArgs;
use crate::error::Outcome;
use crate::fieldio::read_field;

#[derive(Debug, Serialize)]
pub struct SdnormReport {
    pub value: f64,
    #[serde(rename = "K")]
    pub k: u64,
    pub tail_bound: f64,
    pub warnings: Vec<String>,
}

pub fn parse_p(text: &str) -> anyhow::Result<f64> {
    let p = match text.trim().to_ascii_lowercase().as_str() {
        "inf" | "infinity" => f64::INFINITY,
        other => match other.parse::<f64>() {
            Ok(p) => p,
            Err(_) => bail!("--p must be a number >= 1 or `inf`, got {text:?}"),
        },
    };
    ensure!(p >= 1.0, "--p must be >= 1, got {text}");
    Ok(p)
}

pub fn run(args: &SdnormArgs) -> Outcome<()> {
    let p = parse_p(&args.p)?;
    crate::require!(args.k_max >= 1, "--K must be at least 1");
    let field = read_field(&args.input)?;
    let family = TestFamily::for_functionals(field.dim(), args.k_max, TestFnConfig::default())?;
    let config = SdConfig {
        k_max: args.k_max,
        ..SdConfig::default()
    };
    let v = sd_norm_p(&family, &field, p, &config)?;
    let mut warnings = Vec::new();
    if !v.under_resolved.is_empty() {
        warnings.push(format!(
            "{} cube(s) narrower than the grid spacing, first k = {}",
            v.under_resolved.len(),
            v.under_resolved[0]
        ));
    }
    if field.boundary_max() > 0.0 {
        warnings.push(format!(
            "field is nonzero on the boundary of the sampled box (max {:e}); it is taken as zero outside",
            field.boundary_max()
        ));
    }
    let report = SdnormReport {
        value: v.value,
        k: v.k_max,
        tail_bound: v.tail_bound,
        warnings,
    };
    emit_json(&report, args.out.as_deref())
}
