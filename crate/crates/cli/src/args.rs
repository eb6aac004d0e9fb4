use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};
use qtrl_core::generator::BitEncoding;
use qtrl_core::{EnvKind, Mode};

#[derive(Debug, Parser)]
#[command(
    name = "qtrl",
    version,
    about = "Train policies whose weights come from a quantum circuit"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Train one policy and export it.
    Train(TrainArgs),
    /// Run greedy episodes with an exported policy.
    Eval(EvalArgs),
    /// Train over several seeds and depths, then aggregate the logs.
    Sweep(SweepArgs),
}

fn parse_env(s: &str) -> Result<EnvKind, String> {
    s.parse().map_err(|e: qtrl_core::Error| e.to_string())
}

fn parse_bits(s: &str) -> Result<BitEncoding, String> {
    match s {
        "01" => Ok(BitEncoding::ZeroOne),
        "pm1" => Ok(BitEncoding::PlusMinusOne),
        other => Err(format!(
            "unknown bit encoding '{other}' (expected 01 or pm1)"
        )),
    }
}

fn parse_mode(s: &str) -> Result<Mode, String> {
    s.parse().map_err(|e: qtrl_core::Error| e.to_string())
}

/// Options shared by `train` and `sweep`.
#[derive(Debug, Clone, Args)]
pub struct RunArgs {
    /// cartpole or minigrid
    #[arg(long, value_parser = parse_env)]
    pub env: EnvKind,
    /// classical or qtrl
    #[arg(long, value_parser = parse_mode, default_value = "qtrl")]
    pub mode: Mode,
    /// Episodes to train (cartpole 2000, minigrid 4000 when omitted).
    #[arg(long)]
    pub episodes: Option<usize>,
    #[arg(long, default_value_t = qtrl_core::trainer::DEFAULT_GAMMA)]
    pub gamma: f64,
    #[arg(long, default_value_t = qtrl_core::trainer::DEFAULT_LR)]
    pub lr: f64,
    /// Output root.
    #[arg(long, env = "QTRL_OUT_DIR", default_value = "runs")]
    pub out: PathBuf,
    /// Mapping-network bit features: 01 (0/1) or pm1 (-1/+1).
    #[arg(long, value_parser = parse_bits, default_value = "01")]
    pub bit_encoding: BitEncoding,
    /// Store wall-clock milliseconds in the log (makes logs non-reproducible).
    #[arg(long)]
    pub wall_clock: bool,
}

#[derive(Debug, Clone, Args)]
pub struct TrainArgs {
    #[command(flatten)]
    pub run: RunArgs,
    /// Circuit blocks.
    #[arg(long, default_value_t = 1)]
    pub depth: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Print a progress line every N episodes (0 disables).
    #[arg(long, default_value_t = 100)]
    pub log_every: usize,
}

#[derive(Debug, Clone, Args)]
pub struct EvalArgs {
    /// Exported policy JSON.
    #[arg(long)]
    pub model: PathBuf,
    #[arg(long, default_value_t = 100)]
    pub eval_episodes: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
}

#[derive(Debug, Clone, Args)]
pub struct SweepArgs {
    #[command(flatten)]
    pub run: RunArgs,
    #[arg(long, value_delimiter = ',', default_value = "1")]
    pub depths: Vec<usize>,
    #[arg(long, value_delimiter = ',', default_value = "0,1,2,3,4")]
    pub seeds: Vec<u64>,
    /// Worker threads.
    #[arg(long, default_value_t = 1)]
    pub jobs: usize,
}
