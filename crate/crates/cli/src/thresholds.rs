use std::fmt::Write as _;

use anyhow::Result;
use clap::Args;
use hiddencomm_core::exponents::{exact_recovery_check, weak_recovery_check, DEFAULT_MARGIN};
use hiddencomm_core::model::make_channel;
use hiddencomm_core::model::metrics::{lambda_snr, nu};
use hiddencomm_core::ChannelKind;
use serde::Serialize;
use std::f64::consts::E;

use crate::options::{param, Common, Settings};

#[derive(Debug, Args)]
pub struct ThresholdArgs {
    #[command(flatten)]
    pub common: Common,
    /// Finite stand-in for "tends to infinity" in the first weak-recovery condition.
    #[arg(long)]
    pub margin: Option<f64>,
    /// Instead of one report, sweep M = 1..=MAX copies of the channel.
    #[arg(long, value_name = "MAX")]
    pub sweep_m: Option<usize>,
}

#[derive(Debug, Serialize)]
struct Row {
    quantity: &'static str,
    value: f64,
    threshold: Option<f64>,
    verdict: &'static str,
}

#[derive(Debug, Serialize)]
struct SweepRow {
    m: usize,
    lhs1: f64,
    lhs2: f64,
    rhs2: f64,
    weak: &'static str,
    exact_exponent: f64,
    exact_threshold: f64,
    exact: &'static str,
}

fn verdict(ok: bool) -> &'static str {
    if ok {
        "feasible"
    } else {
        "infeasible"
    }
}

fn fmt_opt(x: Option<f64>) -> String {
    x.map(|v| v.to_string()).unwrap_or_default()
}

pub fn run(args: &ThresholdArgs) -> Result<()> {
    let s = args.common.resolve()?;
    let margin = args.margin.unwrap_or(DEFAULT_MARGIN);
    match args.sweep_m {
        Some(max) => sweep(&s, margin, max),
        None => report(&s, margin),
    }
}

fn report(s: &Settings, margin: f64) -> Result<()> {
    let (n, k) = (s.n as f64, s.k as f64);
    let channel = s.channel()?;
    let lambda = lambda_snr(n, k, s.p, s.q);
    let lambda_side = channel.lambda_side();
    let crit = lambda * lambda_side * E;
    let weak = weak_recovery_check(n, k, s.p, s.q, &channel, margin)?;
    let exact = exact_recovery_check(n, k, s.p, s.q, &channel)?;
    let rows = vec![
        Row {
            quantity: "lambda",
            value: lambda,
            threshold: Some(1.0 / E),
            verdict: if lambda > 1.0 / E { "above" } else { "below" },
        },
        Row {
            quantity: "Lambda",
            value: lambda_side,
            threshold: None,
            verdict: "",
        },
        Row {
            quantity: "lambda_Lambda_e",
            value: crit,
            threshold: Some(1.0),
            verdict: if crit > 1.0 {
                "supercritical"
            } else {
                "subcritical"
            },
        },
        Row {
            quantity: "nu",
            value: nu(n, k),
            threshold: None,
            verdict: "",
        },
        Row {
            quantity: "weak_lhs1",
            value: weak.lhs1,
            threshold: Some(weak.margin),
            verdict: verdict(weak.lhs1 > weak.margin),
        },
        Row {
            quantity: "weak_lhs2",
            value: weak.lhs2,
            threshold: Some(weak.rhs2),
            verdict: verdict(weak.lhs2 > weak.rhs2),
        },
        Row {
            quantity: "weak_recovery",
            value: weak.feasible as u8 as f64,
            threshold: None,
            verdict: verdict(weak.feasible),
        },
        Row {
            quantity: "exact_exponent",
            value: exact.exponent,
            threshold: Some(exact.threshold),
            verdict: verdict(exact.feasible),
        },
        Row {
            quantity: "exact_ratio",
            value: exact.ratio(),
            threshold: Some(1.0),
            verdict: verdict(exact.feasible),
        },
    ];
    if s.json {
        return s.emit(&(serde_json::to_string_pretty(&rows)? + "\n"));
    }
    let mut out = String::from("quantity,value,threshold,verdict\n");
    for r in &rows {
        writeln!(
            out,
            "{},{},{},{}",
            r.quantity,
            r.value,
            fmt_opt(r.threshold),
            r.verdict
        )?;
    }
    s.emit(&out)
}

fn sweep(s: &Settings, margin: f64, max: usize) -> Result<()> {
    let (n, k) = (s.n as f64, s.k as f64);
    let base = crate::options::parse_channel(&s.channel_spec)?;
    if base == ChannelKind::Empty || max == 0 {
        return Err(param("--sweep-m needs a channel and a positive maximum"));
    }
    let mut rows = Vec::with_capacity(max);
    for m in 1..=max {
        let channel = make_channel(&ChannelKind::Replicated(Box::new(base.clone()), m))?;
        let weak = weak_recovery_check(n, k, s.p, s.q, &channel, margin)?;
        let exact = exact_recovery_check(n, k, s.p, s.q, &channel)?;
        rows.push(SweepRow {
            m,
            lhs1: weak.lhs1,
            lhs2: weak.lhs2,
            rhs2: weak.rhs2,
            weak: verdict(weak.feasible),
            exact_exponent: exact.exponent,
            exact_threshold: exact.threshold,
            exact: verdict(exact.feasible),
        });
    }
    if s.json {
        return s.emit(&(serde_json::to_string_pretty(&rows)? + "\n"));
    }
    let mut out = String::from("m,lhs1,lhs2,rhs2,weak,exact_exponent,exact_threshold,exact\n");
    for r in &rows {
        writeln!(
            out,
            "{},{},{},{},{},{},{},{}",
            r.m, r.lhs1, r.lhs2, r.rhs2, r.weak, r.exact_exponent, r.exact_threshold, r.exact
        )?;
    }
    s.emit(&out)
}
