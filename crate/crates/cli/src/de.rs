use std::fmt::Write as _;

use anyhow::Result;
use clap::Args;
use hiddencomm_core::model::metrics::{lambda_snr, nu};
use hiddencomm_core::tree_de::{bound_report, de_run, measure_b, RootSampler, TreeParams};
use serde::Serialize;

use crate::options::{param, Common};

#[derive(Debug, Args)]
pub struct DeArgs {
    #[command(flatten)]
    pub common: Common,
    /// Signal-to-noise ratio; computed from n, K, p, q when absent.
    #[arg(long)]
    pub lambda: Option<f64>,
    #[arg(long, default_value_t = 10)]
    pub t_max: usize,
    /// Gauss-Hermite nodes.
    #[arg(long, default_value_t = 61)]
    pub quad_nodes: usize,
    /// Print the analytic b_t bound report (key=value text) instead of the trace.
    #[arg(long)]
    pub bounds: bool,
    /// With --bounds, also estimate b_t on sampled trees from this many roots.
    #[arg(long, default_value_t = 0)]
    pub measure_trials: usize,
}

#[derive(Debug, Serialize)]
struct Step {
    t: usize,
    v_t: f64,
    pred_err: f64,
}

pub fn run(args: &DeArgs) -> Result<()> {
    let s = args.common.resolve()?;
    let (n, k) = (s.n as f64, s.k as f64);
    if !(s.k > 0 && s.k < s.n) {
        return Err(param("need 0 < K < n"));
    }
    let lambda = args.lambda.unwrap_or_else(|| lambda_snr(n, k, s.p, s.q));
    let nu = nu(n, k);
    let channel = s.channel()?;

    if args.bounds {
        let report = bound_report(lambda, s.p, s.q, nu, &channel, args.t_max)?;
        let mut text = report.to_text();
        if args.measure_trials > 0 {
            let params = TreeParams::new(n, k, s.p, s.q)?;
            let measured = (0..=args.t_max)
                .map(|t| {
                    measure_b(
                        &params,
                        &channel,
                        t,
                        args.measure_trials,
                        s.seed,
                        RootSampler::Auto,
                    )
                })
                .collect::<Result<Vec<_>, _>>()?;
            let join = |f: fn(&(f64, f64)) -> f64| {
                measured
                    .iter()
                    .map(|m| f(m).to_string())
                    .collect::<Vec<_>>()
                    .join(" ")
            };
            writeln!(text, "b_measured={}", join(|m| m.0))?;
            writeln!(text, "b_stderr={}", join(|m| m.1))?;
        }
        return s.emit(&text);
    }

    let trace = de_run(lambda, nu, &channel, args.t_max, args.quad_nodes)?;
    let steps: Vec<Step> = trace
        .v
        .iter()
        .enumerate()
        .map(|(t, &v_t)| Step {
            t,
            v_t,
            pred_err: trace.total_err(t),
        })
        .collect();
    if s.json {
        return s.emit(&(serde_json::to_string_pretty(&steps)? + "\n"));
    }
    let mut out = String::from("t,v_t,pred_err\n");
    for st in &steps {
        writeln!(out, "{},{},{}", st.t, st.v_t, st.pred_err)?;
    }
    s.emit(&out)
}
