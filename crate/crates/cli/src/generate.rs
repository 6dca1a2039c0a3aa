use std::path::PathBuf;

use anyhow::Result;
use clap::Args;
use hiddencomm_core::io::{write_graph, write_side};
use hiddencomm_core::model::{generate_graph, sample_side_info};

use crate::options::{emit_to, param, Common};

#[derive(Debug, Args)]
pub struct GenArgs {
    #[command(flatten)]
    pub common: Common,
    /// deterministic | binomial community size.
    #[arg(long)]
    pub size_mode: Option<String>,
    /// Where to write the side-observation CSV.
    #[arg(long)]
    pub side_out: Option<PathBuf>,
}

pub fn run(args: &GenArgs) -> Result<()> {
    let s = args.common.resolve()?;
    let size_mode = s.size_mode(args.size_mode.as_deref())?;
    let graph = generate_graph(s.n, s.k, s.p, s.q, size_mode, s.seed)?;
    let channel = s.channel()?;
    eprintln!(
        "n={} k={} edges={} community={}",
        graph.n,
        graph.k,
        graph.adjacency.num_edges(),
        graph.community_size()
    );
    s.emit(&write_graph(&graph))?;
    match (&args.side_out, channel.m()) {
        (Some(path), _) => {
            let side = sample_side_info(&channel, &graph, s.seed)?;
            emit_to(Some(path), &write_side(&side))
        }
        (None, 0) => Ok(()),
        (None, _) => Err(param("a side channel was given but no --side-out path")),
    }
}
