use std::fmt::Write as _;
use std::fs;
use std::path::PathBuf;

use anyhow::{Context, Result};
use clap::Args;
use hiddencomm_core::io::{read_graph, read_side};
use hiddencomm_core::SideObservations;
use serde::Serialize;

use crate::detector::{run_detector, Detector};
use crate::options::Common;

#[derive(Debug, Args)]
pub struct DetectArgs {
    #[command(flatten)]
    pub common: Common,
    /// Graph file as written by `gen`.
    #[arg(long)]
    pub graph: PathBuf,
    /// Side-observation CSV as written by `gen`.
    #[arg(long)]
    pub side: Option<PathBuf>,
    /// bp | ml | bp+vote
    #[arg(long)]
    pub detector: Option<String>,
    /// Block fraction of the voting stage.
    #[arg(long)]
    pub delta: Option<f64>,
    /// Keep every node with belief at least nu instead of the top K.
    #[arg(long)]
    pub threshold: bool,
}

#[derive(Debug, Serialize)]
struct Report {
    detector: &'static str,
    zeta: f64,
    sym_diff: usize,
    seed: u64,
    estimate: Vec<usize>,
}

pub fn run(args: &DetectArgs) -> Result<()> {
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
    let text = fs::read_to_string(&args.graph)
        .with_context(|| format!("reading {}", args.graph.display()))?;
    let graph = read_graph(&text)?;
    let channel = s.channel()?;
    let side = match &args.side {
        Some(path) => {
            let text =
                fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
            read_side(&text, &channel)?
        }
        None => SideObservations::empty(graph.n),
    };
    let use_side = args.side.is_some() && channel.m() > 0;
    let (result, scores) = run_detector(detector, &graph, &side, &channel, s.iters, use_side)?;

    let summary = format!(
        "zeta={} sym_diff={} seed={}",
        result.zeta, result.sym_diff, graph.seed
    );
    if s.json {
        let report = Report {
            detector: detector.name(),
            zeta: result.zeta,
            sym_diff: result.sym_diff,
            seed: graph.seed,
            estimate: result.estimate,
        };
        return s.emit(&(serde_json::to_string_pretty(&report)? + "\n"));
    }
    eprintln!("{summary}");
    let mut chosen = vec![false; graph.n];
    for &i in &result.estimate {
        chosen[i] = true;
    }
    let mut out = String::from("node_id,belief,in_estimate,in_truth\n");
    for i in 0..graph.n {
        writeln!(
            out,
            "{},{},{},{}",
            i,
            scores[i],
            chosen[i] as u8,
            graph.is_member(i) as u8
        )?;
    }
    s.emit(&out)
}
