use std::fmt::Write as _;

use anyhow::Context;
use sdnse_core::testfns::{CubeIndex, JonesParams, TestFamily, TestFnConfig};

use crate::cli::DumpArgs;
use crate::error::Outcome;
use crate::fieldio::fmt_num;
use crate::require;

/// `ξ_l` along axis 0 of the cube centred at the k-th rational point, with
/// the level replaced by `level`.
pub fn dump_table(level: u32, cube: u64, grid: usize, dim: usize) -> Outcome<String> {
    require!(level >= 1, "--level starts at 1");
    require!((1..=3).contains(&dim), "--dim must be 1, 2 or 3");
    require!(grid >= 2, "--grid needs at least two points");
    let family = TestFamily::new(dim, level, TestFnConfig::default())?;
    let mut c = CubeIndex::new(cube, dim)?;
    c.level = level;
    c.edge = JonesParams::new(level).cube_edge();
    let (lo, hi) = c.bounds(0);
    let mut out = String::from("x,re_xi,im_xi\n");
    for i in 0..grid {
        let x = lo + (hi - lo) * i as f64 / (grid - 1) as f64;
        let v = family.xi(&c, 0, x);
        writeln!(out, "{},{},{}", fmt_num(x), fmt_num(v.re), fmt_num(v.im)).expect("string write");
    }
    Ok(out)
}

pub fn dump(args: &DumpArgs) -> Outcome<()> {
    let table = dump_table(args.level, args.cube, args.grid, args.dim)?;
    match &args.out {
        Some(p) => {
            std::fs::write(p, table).with_context(|| format!("cannot write {}", p.display()))?
        }
        None => print!("{table}"),
    }
    Ok(())
}
