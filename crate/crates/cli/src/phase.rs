use std::fmt::Write as _;

use anyhow::Result;
use clap::Args;
use hiddencomm_core::exponents::{phase_grid, PhasePoint};
use serde::Serialize;

use crate::options::{param, parse_range, Common};

#[derive(Debug, Args)]
pub struct PhaseArgs {
    #[command(flatten)]
    pub common: Common,
    /// Range of b as LO:HI (q = b log^2 n / n).
    #[arg(long, default_value = "0.1:20")]
    pub b_range: String,
    /// Range of c as LO:HI (K = c n / log n).
    #[arg(long, default_value = "0.05:2")]
    pub c_range: String,
    /// Noisy-label flip rate; give twice to compare two channels.
    #[arg(long, num_args = 1)]
    pub alpha: Vec<f64>,
    /// Grid points per axis.
    #[arg(long, default_value_t = 50)]
    pub resolution: usize,
}

#[derive(Debug, Serialize)]
struct Grid {
    alpha: f64,
    points: Vec<Point>,
}

#[derive(Debug, Serialize)]
struct Point {
    b: f64,
    c: f64,
    region: u8,
}

fn positive_range(text: &str) -> Result<(f64, f64)> {
    let (lo, hi) = parse_range(text)?;
    if lo <= 0.0 {
        return Err(param(format!("range `{text}` must satisfy 0 < LO <= HI")));
    }
    Ok((lo, hi))
}

pub fn run(args: &PhaseArgs) -> Result<()> {
    let s = args.common.resolve()?;
    let b_range = positive_range(&args.b_range)?;
    let c_range = positive_range(&args.c_range)?;
    let alphas = if args.alpha.is_empty() {
        vec![0.3]
    } else {
        args.alpha.clone()
    };
    if alphas.len() > 2 {
        return Err(param("at most two --alpha values"));
    }
    if args.resolution == 0 {
        return Err(param("--resolution must be positive"));
    }
    let grids = alphas
        .iter()
        .map(|&alpha| -> Result<Grid> {
            let points = phase_grid(b_range, c_range, alpha, args.resolution)?
                .into_iter()
                .map(|PhasePoint { b, c, region }| Point { b, c, region })
                .collect();
            Ok(Grid { alpha, points })
        })
        .collect::<Result<Vec<_>>>()?;

    for g in &grids {
        let mut counts = [0usize; 6];
        for p in &g.points {
            counts[p.region as usize - 1] += 1;
        }
        eprintln!("alpha={} region_counts={counts:?}", g.alpha);
    }
    if s.json {
        return s.emit(&(serde_json::to_string_pretty(&grids)? + "\n"));
    }
    let mut out = String::new();
    if grids.len() == 1 {
        out.push_str("b,c,region\n");
        for p in &grids[0].points {
            writeln!(out, "{},{},{}", p.b, p.c, p.region)?;
        }
    } else {
        out.push_str("alpha,b,c,region\n");
        for g in &grids {
            for p in &g.points {
                writeln!(out, "{},{},{},{}", g.alpha, p.b, p.c, p.region)?;
            }
        }
    }
    s.emit(&out)
}
