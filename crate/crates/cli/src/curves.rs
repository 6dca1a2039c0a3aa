use std::fmt::Write as _;

use anyhow::Result;
use clap::Args;
use hiddencomm_core::exponents::regime::{noisy_label_trends, partial_reveal_trends};
use hiddencomm_core::exponents::{psi_curve, regime_threshold, RegimeParams};
use serde::Serialize;

use crate::options::{param, parse_range, Common};

#[derive(Debug, Args)]
pub struct PsiCurveArgs {
    #[command(flatten)]
    pub common: Common,
    /// Noisy-label flip rate; repeat for several curves.
    #[arg(long, num_args = 1)]
    pub alpha: Vec<f64>,
    /// Range of a as LO:HI (p = a log^2 n / n).
    #[arg(long, default_value = "1:10")]
    pub a_range: String,
    #[arg(long, default_value_t = 1.0)]
    pub b: f64,
    #[arg(long, default_value_t = 1.0)]
    pub c: f64,
    #[arg(long, default_value_t = 91)]
    pub points: usize,
}

#[derive(Debug, Args)]
pub struct ExponentCurveArgs {
    #[command(flatten)]
    pub common: Common,
    /// noisy | reveal
    #[arg(long, default_value = "noisy")]
    pub kind: String,
    #[arg(long, default_value_t = 1.0)]
    pub rho: f64,
    #[arg(long, default_value_t = 2.0)]
    pub a: f64,
    #[arg(long, default_value_t = 1.0)]
    pub b: f64,
    /// Range of beta as LO:HI. Noisy labels need beta below rho (a - b - b T);
    /// the default stops just short of it. Revealed labels default to 0:1.
    #[arg(long)]
    pub beta_range: Option<String>,
    #[arg(long, default_value_t = 51)]
    pub points: usize,
}

#[derive(Debug, Serialize)]
struct PsiRow {
    alpha: f64,
    a: f64,
    psi_minus_1: f64,
}

#[derive(Debug, Serialize)]
struct ExponentRow {
    beta: f64,
    exponent: f64,
    case_id: u8,
}

fn grid(lo: f64, hi: f64, points: usize) -> Result<Vec<f64>> {
    match points {
        0 => Err(param("--points must be positive")),
        1 => Ok(vec![lo]),
        _ => Ok((0..points)
            .map(|i| lo + (hi - lo) * i as f64 / (points - 1) as f64)
            .collect()),
    }
}

pub fn run_psi(args: &PsiCurveArgs) -> Result<()> {
    let s = args.common.resolve()?;
    let (lo, hi) = parse_range(&args.a_range)?;
    let alphas = if args.alpha.is_empty() {
        vec![0.1, 0.2, 0.3, 0.4]
    } else {
        args.alpha.clone()
    };
    let mut rows = Vec::new();
    for &alpha in &alphas {
        for a in grid(lo, hi, args.points)? {
            rows.push(PsiRow {
                alpha,
                a,
                psi_minus_1: psi_curve(alpha, args.c, a, args.b)? - 1.0,
            });
        }
    }
    if s.json {
        return s.emit(&(serde_json::to_string_pretty(&rows)? + "\n"));
    }
    let mut out = String::from("alpha,a,psi_minus_1\n");
    for r in &rows {
        writeln!(out, "{},{},{}", r.alpha, r.a, r.psi_minus_1)?;
    }
    s.emit(&out)
}

pub fn run_exponent(args: &ExponentCurveArgs) -> Result<()> {
    let s = args.common.resolve()?;
    let params = RegimeParams::new(args.rho, args.a, args.b)?;
    let trends: fn(f64) -> _ = match args.kind.as_str() {
        "noisy" => noisy_label_trends,
        "reveal" => partial_reveal_trends,
        other => return Err(param(format!("unknown --kind `{other}`"))),
    };
    let (lo, hi) = match &args.beta_range {
        Some(text) => parse_range(text)?,
        None if args.kind == "noisy" => (0.0, 0.999 * params.beta_bound()),
        None => (0.0, 1.0),
    };
    let mut rows = Vec::new();
    for beta in grid(lo, hi, args.points)? {
        let r = regime_threshold(&params, &trends(beta))?;
        rows.push(ExponentRow {
            beta,
            exponent: r.condition_value,
            case_id: r.case_id,
        });
    }
    if s.json {
        return s.emit(&(serde_json::to_string_pretty(&rows)? + "\n"));
    }
    let mut out = String::from("beta,exponent,case\n");
    for r in &rows {
        writeln!(out, "{},{},{}", r.beta, r.exponent, r.case_id)?;
    }
    s.emit(&out)
}
