use std::fmt::Write as _;

use anyhow::Result;
use clap::Args;
use hiddencomm_core::model::{generate_graph, lambda_snr, sample_side_info};
use rayon::prelude::*;
use serde::Serialize;

use crate::detector::{run_detector, Detector};
use crate::options::Common;

#[derive(Debug, Args)]
pub struct ExperimentArgs {
    #[command(flatten)]
    pub common: Common,
    /// bp | ml | bp+vote
    #[arg(long)]
    pub detector: Option<String>,
    /// Block fraction of the voting stage.
    #[arg(long)]
    pub delta: Option<f64>,
    /// deterministic | binomial community size.
    #[arg(long)]
    pub size_mode: Option<String>,
    /// Keep every node with belief at least nu instead of the top K.
    #[arg(long)]
    pub threshold: bool,
}

#[derive(Debug, Clone, Serialize)]
struct TrialRow {
    trial: usize,
    seed: u64,
    zeta_no_side: f64,
    sym_diff_no_side: usize,
    exact_no_side: bool,
    zeta_side: f64,
    sym_diff_side: usize,
    exact_side: bool,
}

#[derive(Debug, Serialize)]
struct Summary {
    detector: &'static str,
    n: usize,
    k: usize,
    p: f64,
    q: f64,
    channel: String,
    iterations: usize,
    trials: usize,
    seed: u64,
    lambda: f64,
    lambda_side: f64,
    lambda_lambda_e: f64,
    mean_zeta_no_side: f64,
    std_zeta_no_side: f64,
    mean_zeta_side: f64,
    std_zeta_side: f64,
    exact_rate_no_side: f64,
    exact_rate_side: f64,
    rows: Vec<TrialRow>,
}

fn mean_std(values: impl Iterator<Item = f64> + Clone) -> (f64, f64) {
    let n = values.clone().count() as f64;
    let mean = values.clone().sum::<f64>() / n;
    if n < 2.0 {
        return (mean, 0.0);
    }
    let var = values.map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0);
    (mean, var.sqrt())
}

pub fn run(args: &ExperimentArgs) -> Result<()> {
    let s = args.common.resolve()?;
    let detector = Detector::parse(
        &s.pick(
            args.detector.clone(),
            s.config.detector.clone(),
            "bp".into(),
        ),
        s.pick(args.delta, s.config.delta, 0.1),
        args.threshold,
    )?;
    let size_mode = s.size_mode(args.size_mode.as_deref())?;
    let channel = s.channel()?;
    let has_side = channel.m() > 0;
    // validate once before fanning out
    generate_graph(s.n, s.k, s.p, s.q, size_mode, s.seed)?;

    let rows = (0..s.trials)
        .into_par_iter()
        .map(|trial| -> Result<TrialRow> {
            let seed = s.seed.wrapping_add(trial as u64);
            let graph = generate_graph(s.n, s.k, s.p, s.q, size_mode, seed)?;
            let side = sample_side_info(&channel, &graph, seed)?;
            let (plain, _) = run_detector(detector, &graph, &side, &channel, s.iters, false)?;
            let with = if has_side {
                run_detector(detector, &graph, &side, &channel, s.iters, true)?.0
            } else {
                plain.clone()
            };
            Ok(TrialRow {
                trial,
                seed,
                zeta_no_side: plain.zeta,
                sym_diff_no_side: plain.sym_diff,
                exact_no_side: plain.exact(),
                zeta_side: with.zeta,
                sym_diff_side: with.sym_diff,
                exact_side: with.exact(),
            })
        })
        .collect::<Result<Vec<_>>>()?;

    let lambda = lambda_snr(s.n as f64, s.k as f64, s.p, s.q);
    let lambda_side = channel.lambda_side();
    let (mean_plain, std_plain) = mean_std(rows.iter().map(|r| r.zeta_no_side));
    let (mean_side, std_side) = mean_std(rows.iter().map(|r| r.zeta_side));
    let rate =
        |f: fn(&TrialRow) -> bool| rows.iter().filter(|r| f(r)).count() as f64 / rows.len() as f64;
    let summary = Summary {
        detector: detector.name(),
        n: s.n,
        k: s.k,
        p: s.p,
        q: s.q,
        channel: s.channel_spec.clone(),
        iterations: s.iters,
        trials: s.trials,
        seed: s.seed,
        lambda,
        lambda_side,
        lambda_lambda_e: lambda * lambda_side * std::f64::consts::E,
        mean_zeta_no_side: mean_plain,
        std_zeta_no_side: std_plain,
        mean_zeta_side: mean_side,
        std_zeta_side: std_side,
        exact_rate_no_side: rate(|r| r.exact_no_side),
        exact_rate_side: rate(|r| r.exact_side),
        rows,
    };

    if s.json {
        return s.emit(&(serde_json::to_string_pretty(&summary)? + "\n"));
    }
    eprintln!(
        "lambda={} Lambda={} lambda_Lambda_e={}",
        summary.lambda, summary.lambda_side, summary.lambda_lambda_e
    );
    let mut out = String::from(
        "trial,seed,zeta_no_side,sym_diff_no_side,exact_no_side,zeta_side,sym_diff_side,exact_side\n",
    );
    for r in &summary.rows {
        writeln!(
            out,
            "{},{},{},{},{},{},{},{}",
            r.trial,
            r.seed,
            r.zeta_no_side,
            r.sym_diff_no_side,
            r.exact_no_side as u8,
            r.zeta_side,
            r.sym_diff_side,
            r.exact_side as u8
        )?;
    }
    writeln!(
        out,
        "mean,,{},,{},{},,{}",
        summary.mean_zeta_no_side,
        summary.exact_rate_no_side,
        summary.mean_zeta_side,
        summary.exact_rate_side
    )?;
    writeln!(
        out,
        "std,,{},,,{},,",
        summary.std_zeta_no_side, summary.std_zeta_side
    )?;
    s.emit(&out)
}
