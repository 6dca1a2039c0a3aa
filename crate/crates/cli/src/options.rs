//! Flags shared by every subcommand, the optional JSON config file, and the
//! channel mini-language.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use anyhow::{Context, Result};
use clap::Args;
use hiddencomm_core::model::make_channel;
use hiddencomm_core::{ChannelKind, Error, SideChannel, SizeMode};
use serde::Deserialize;

#[derive(Debug, Clone, Default, Args)]
pub struct Common {
    /// Node count.
    #[arg(long)]
    pub n: Option<usize>,
    /// Community size K.
    #[arg(long)]
    pub k: Option<usize>,
    /// Edge probability inside the community.
    #[arg(long)]
    pub p: Option<f64>,
    /// Edge probability elsewhere.
    #[arg(long)]
    pub q: Option<f64>,
    /// Side channel: none | noisy:ALPHA | reveal:EPS | custom:PLUS/MINUS[;PLUS/MINUS...]
    /// where PLUS and MINUS are comma-separated likelihood rows.
    #[arg(long)]
    pub channel: Option<String>,
    /// Replicate the channel's features this many times.
    #[arg(long)]
    pub m: Option<usize>,
    /// BP iterations.
    #[arg(long)]
    pub iters: Option<usize>,
    #[arg(long)]
    pub trials: Option<usize>,
    #[arg(long)]
    pub seed: Option<u64>,
    /// Write output here instead of stdout.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Worker threads (results do not depend on it).
    #[arg(long)]
    pub threads: Option<usize>,
    /// Emit a JSON document instead of CSV.
    #[arg(long)]
    pub json: bool,
    /// Flat JSON object with default values for any of these flags.
    #[arg(long)]
    pub config: Option<PathBuf>,
}

/// Contents of a `--config` file. Flags always win over these fields.
#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConfigFile {
    pub n: Option<usize>,
    pub k: Option<usize>,
    pub p: Option<f64>,
    pub q: Option<f64>,
    pub channel: Option<String>,
    pub m: Option<usize>,
    pub iters: Option<usize>,
    pub trials: Option<usize>,
    pub seed: Option<u64>,
    pub out: Option<PathBuf>,
    pub threads: Option<usize>,
    pub json: Option<bool>,
    pub detector: Option<String>,
    pub delta: Option<f64>,
    pub size_mode: Option<String>,
}

/// Fully resolved shared settings.
#[derive(Debug, Clone)]
pub struct Settings {
    pub n: usize,
    pub k: usize,
    pub p: f64,
    pub q: f64,
    pub channel_spec: String,
    pub m: usize,
    pub iters: usize,
    pub trials: usize,
    pub seed: u64,
    pub out: Option<PathBuf>,
    pub json: bool,
    pub config: ConfigFile,
}

impl Common {
    pub fn resolve(&self) -> Result<Settings> {
        let config = match &self.config {
            Some(path) => {
                let text = fs::read_to_string(path)
                    .with_context(|| format!("reading config {}", path.display()))?;
                serde_json::from_str::<ConfigFile>(&text)
                    .map_err(|e| param(format!("config {}: {e}", path.display())))?
            }
            None => ConfigFile::default(),
        };
        if let Some(t) = self.threads.or(config.threads) {
            if t == 0 {
                return Err(param("--threads must be positive"));
            }
            // a second call in the same process is harmless; keep the first pool
            let _ = rayon::ThreadPoolBuilder::new()
                .num_threads(t)
                .build_global();
        }
        let trials = self.trials.or(config.trials).unwrap_or(20);
        if trials == 0 {
            return Err(param("--trials must be at least 1"));
        }
        Ok(Settings {
            n: self.n.or(config.n).unwrap_or(10_000),
            k: self.k.or(config.k).unwrap_or(100),
            p: self.p.or(config.p).unwrap_or(5e-3),
            q: self.q.or(config.q).unwrap_or(5e-4),
            channel_spec: self
                .channel
                .clone()
                .or(config.channel.clone())
                .unwrap_or_else(|| "none".into()),
            m: self.m.or(config.m).unwrap_or(1),
            iters: self.iters.or(config.iters).unwrap_or(10),
            trials,
            seed: self.seed.or(config.seed).unwrap_or(0),
            out: self.out.clone().or(config.out.clone()),
            json: self.json || config.json.unwrap_or(false),
            config,
        })
    }
}

impl Settings {
    pub fn channel_kind(&self) -> Result<ChannelKind> {
        let base = parse_channel(&self.channel_spec)?;
        Ok(match (base, self.m) {
            (ChannelKind::Empty, _) => ChannelKind::Empty,
            (_, 0) => ChannelKind::Empty,
            (base, 1) => base,
            (base, m) => ChannelKind::Replicated(Box::new(base), m),
        })
    }

    pub fn channel(&self) -> Result<SideChannel> {
        Ok(make_channel(&self.channel_kind()?)?)
    }

    /// Flag value, else config value, else `default`.
    pub fn pick<T: Clone>(&self, flag: Option<T>, from_config: Option<T>, default: T) -> T {
        flag.or(from_config).unwrap_or(default)
    }

    pub fn size_mode(&self, flag: Option<&str>) -> Result<SizeMode> {
        let raw = flag
            .map(str::to_owned)
            .or(self.config.size_mode.clone())
            .unwrap_or_else(|| "deterministic".into());
        match raw.as_str() {
            "deterministic" | "det" => Ok(SizeMode::Deterministic),
            "binomial" | "bin" => Ok(SizeMode::Binomial),
            other => Err(param(format!("unknown size mode `{other}`"))),
        }
    }

    /// Write `text` to `--out` or stdout.
    pub fn emit(&self, text: &str) -> Result<()> {
        emit_to(self.out.as_deref(), text)
    }
}

pub fn emit_to(path: Option<&Path>, text: &str) -> Result<()> {
    match path {
        Some(path) => fs::write(path, text).with_context(|| format!("writing {}", path.display())),
        None => {
            let mut out = std::io::stdout().lock();
            out.write_all(text.as_bytes())?;
            out.flush()?;
            Ok(())
        }
    }
}

/// `LO:HI` with finite `LO <= HI`.
pub fn parse_range(text: &str) -> Result<(f64, f64)> {
    let bad = || param(format!("range `{text}` must look like LO:HI with LO <= HI"));
    let (lo, hi) = text.split_once(':').ok_or_else(bad)?;
    let lo: f64 = lo.trim().parse().map_err(|_| bad())?;
    let hi: f64 = hi.trim().parse().map_err(|_| bad())?;
    if !(lo.is_finite() && hi.is_finite() && lo <= hi) {
        return Err(bad());
    }
    Ok((lo, hi))
}

pub fn param(msg: impl Into<String>) -> anyhow::Error {
    Error::Parameter(msg.into()).into()
}

fn parse_row(text: &str) -> Result<Vec<f64>> {
    text.split(',')
        .map(|x| {
            x.trim()
                .parse::<f64>()
                .map_err(|_| param(format!("bad likelihood `{x}`")))
        })
        .collect()
}

fn parse_value(text: &str, what: &str) -> Result<f64> {
    text.trim()
        .parse()
        .map_err(|_| param(format!("bad {what} `{text}`")))
}

/// Parse the `--channel` mini-language.
pub fn parse_channel(spec: &str) -> Result<ChannelKind> {
    let (kind, rest) = spec.split_once(':').unwrap_or((spec, ""));
    match kind.trim() {
        "none" | "empty" => Ok(ChannelKind::Empty),
        "noisy" => Ok(ChannelKind::NoisyLabel(parse_value(rest, "flip rate")?)),
        "reveal" => Ok(ChannelKind::PartialReveal(parse_value(
            rest,
            "erasure rate",
        )?)),
        "custom" => {
            let (mut plus, mut minus) = (Vec::new(), Vec::new());
            for feature in rest.split(';') {
                let (a, b) = feature
                    .split_once('/')
                    .ok_or_else(|| param(format!("custom feature `{feature}` needs PLUS/MINUS")))?;
                plus.push(parse_row(a)?);
                minus.push(parse_row(b)?);
            }
            Ok(ChannelKind::Custom { plus, minus })
        }
        other => Err(param(format!("unknown channel kind `{other}`"))),
    }
}
