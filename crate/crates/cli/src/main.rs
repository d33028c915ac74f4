//! `avfusion` command-line driver.
//!
//! Exit status: 0 on success, 1 on data errors, 2 on usage errors.

mod commands;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Parser, Debug)]
#[command(name = "avfusion", version, about = "Audiovisual emotion fusion pipeline")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Generate a synthetic four-channel dataset with a manifest.
    Synth(SynthArgs),
    /// Compute the LBP-TOP descriptor of a [T,H,W] volume.
    Lbptop(LbptopArgs),
    /// Build per-channel feature matrices from a manifest.
    Extract(ExtractArgs),
    /// Fit or apply PCA.
    #[command(subcommand)]
    Pca(PcaCommand),
    /// Average per-frame score matrices and apply k-average temporal pooling.
    Pool(PoolArgs),
    /// Train a one-vs-rest linear SVM.
    TrainSvm(TrainSvmArgs),
    /// Predict with a trained SVM, writing channel decisions.
    PredictSvm(PredictSvmArgs),
    /// Feature-level fusion.
    #[command(subcommand)]
    FuseFeat(FuseFeatCommand),
    /// Model-level fusion with a Bayesian network.
    #[command(subcommand)]
    FuseBn(FuseBnCommand),
    /// Train the softmax probe with and without island loss on 2-D blobs.
    IslandDemo(IslandDemoArgs),
    /// Score predictions against manifest labels.
    Evaluate(EvaluateArgs),
    /// Run the in-memory synthetic fusion experiment.
    Reproduce(ReproduceArgs),
}

#[derive(Args, Debug)]
struct SynthArgs {
    #[arg(long)]
    out: PathBuf,
    #[arg(long, default_value_t = 100)]
    n_clips: usize,
    /// Per-channel informativeness: audio,lbptop,cnn,blstm.
    #[arg(long, value_delimiter = ',', default_values_t = [0.158, 0.241, 0.166, 0.244])]
    informativeness: Vec<f64>,
    /// Channels that emit label-independent noise.
    #[arg(long, value_delimiter = ',')]
    failed: Vec<String>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = 4)]
    frames_min: usize,
    #[arg(long, default_value_t = 40)]
    frames_max: usize,
}

#[derive(Args, Debug)]
struct LbptopArgs {
    #[arg(long = "in")]
    input: PathBuf,
    #[arg(long)]
    out: PathBuf,
    #[arg(long, default_value_t = 1)]
    radius_x: usize,
    #[arg(long, default_value_t = 1)]
    radius_y: usize,
    #[arg(long, default_value_t = 1)]
    radius_t: usize,
    #[arg(long, default_value_t = 4)]
    grid_rows: usize,
    #[arg(long, default_value_t = 4)]
    grid_cols: usize,
    /// Emit raw counts instead of L1-normalized histograms.
    #[arg(long)]
    no_normalize: bool,
}

#[derive(Args, Debug)]
struct ExtractArgs {
    #[arg(long)]
    manifest: PathBuf,
    #[arg(long)]
    out_dir: PathBuf,
    /// Temporal pooling bins for CNN score matrices.
    #[arg(long, default_value_t = 7)]
    k: usize,
}

#[derive(Subcommand, Debug)]
enum PcaCommand {
    Fit {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long)]
        components: usize,
        #[arg(long)]
        out: PathBuf,
    },
    Apply {
        #[arg(long)]
        model: PathBuf,
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
}

#[derive(Args, Debug)]
struct PoolArgs {
    /// One or more [T,7] score matrices; several are averaged first.
    #[arg(long = "in", required = true)]
    input: Vec<PathBuf>,
    #[arg(long, default_value_t = 7)]
    k: usize,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args, Debug, Clone, Copy)]
struct SvmArgs {
    #[arg(long, default_value_t = 1.0)]
    c: f64,
    #[arg(long, default_value_t = 30)]
    epochs: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

#[derive(Args, Debug)]
struct TrainSvmArgs {
    #[arg(long = "in")]
    input: PathBuf,
    /// Labels are read from the manifest, one per matrix row.
    #[arg(long)]
    manifest: PathBuf,
    #[arg(long)]
    out: PathBuf,
    /// Apply two-stage normalization before the SVM.
    #[arg(long)]
    normalize: bool,
    #[command(flatten)]
    svm: SvmArgs,
}

#[derive(Args, Debug)]
struct PredictSvmArgs {
    #[arg(long)]
    model: PathBuf,
    #[arg(long = "in")]
    input: PathBuf,
    #[arg(long)]
    manifest: PathBuf,
    #[arg(long)]
    channel: String,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args, Debug)]
struct ChannelInputs {
    #[arg(long)]
    audio: PathBuf,
    #[arg(long)]
    lbptop: PathBuf,
    #[arg(long)]
    cnn: PathBuf,
    #[arg(long)]
    blstm: PathBuf,
    #[arg(long)]
    manifest: PathBuf,
}

#[derive(Subcommand, Debug)]
enum FuseFeatCommand {
    Train {
        #[command(flatten)]
        inputs: ChannelInputs,
        #[arg(long)]
        out: PathBuf,
        #[command(flatten)]
        svm: SvmArgs,
    },
    Predict {
        #[arg(long)]
        model: PathBuf,
        #[command(flatten)]
        inputs: ChannelInputs,
        #[arg(long)]
        out: PathBuf,
    },
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum CptArg {
    Confusion,
    Accuracy,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum PriorArg {
    Uniform,
    Frequency,
}

#[derive(Subcommand, Debug)]
enum FuseBnCommand {
    Fit {
        /// Validation decision CSVs (clip_id,channel,predicted_label).
        #[arg(long, required = true, num_args = 1..)]
        decisions: Vec<PathBuf>,
        #[arg(long)]
        manifest: PathBuf,
        #[arg(long)]
        out: PathBuf,
        #[arg(long, default_value_t = 1.0)]
        alpha: f64,
        #[arg(long, value_enum, default_value = "confusion")]
        cpt: CptArg,
        #[arg(long, value_enum, default_value = "uniform")]
        prior: PriorArg,
    },
    Infer {
        #[arg(long)]
        model: PathBuf,
        #[arg(long, required = true, num_args = 1..)]
        decisions: Vec<PathBuf>,
        #[arg(long)]
        out: PathBuf,
    },
}

#[derive(Args, Debug)]
struct IslandDemoArgs {
    #[arg(long)]
    out: PathBuf,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = 300)]
    epochs: usize,
    #[arg(long, default_value_t = 0.01)]
    lambda: f64,
    #[arg(long, default_value_t = 10.0)]
    lambda1: f64,
}

#[derive(Args, Debug)]
struct EvaluateArgs {
    /// CSV with clip_id and predicted_label columns.
    #[arg(long)]
    predictions: PathBuf,
    #[arg(long)]
    manifest: PathBuf,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args, Debug)]
struct ReproduceArgs {
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, value_delimiter = ',')]
    failed: Vec<String>,
    #[arg(long)]
    out: Option<PathBuf>,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match commands::run(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            match e.chain().find_map(|c| c.downcast_ref::<avfusion::Error>()) {
                Some(core) => eprintln!("error[{}]: {e:#}", variant_name(core)),
                None => eprintln!("error: {e:#}"),
            }
            ExitCode::from(1)
        }
    }
}

/// Name of the core error variant, e.g. `UnknownChannel`.
fn variant_name(e: &avfusion::Error) -> String {
    format!("{e:?}").chars().take_while(|c| c.is_alphanumeric()).collect()
}
