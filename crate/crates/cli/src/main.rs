use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::Result;
use clap::{Parser, Subcommand};
use stegsel::dataset::Dataset;
use stegsel::features::FeatureSet;
use stegsel::imagedata::DatasetManifest;
use stegsel::pipeline::{
    cmd_extract_to_csv, cmd_gen, cmd_run, write_synthetic_covers, EmbedMethod, EmbedSpec,
    PipelineConfig,
};
use stegsel::transforms::QTable;

#[derive(Parser)]
#[command(name = "stegsel", version, about = "Steganalysis features with memetic feature selection")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Embed every cover in a directory and write a manifest.
    Gen {
        #[arg(long)]
        covers: PathBuf,
        #[arg(long, value_parser = parse_method)]
        method: EmbedMethod,
        /// Payload rate (bits per pixel or coefficient); noise strength for additive.
        #[arg(long)]
        rate: f64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: PathBuf,
        /// JPEG quality of the quantization table used by jsteg.
        #[arg(long, default_value_t = 75)]
        quality: u8,
    },
    /// Extract one feature family for every manifest image into a CSV.
    Extract {
        #[arg(long)]
        manifest: PathBuf,
        #[arg(long, value_parser = parse_set)]
        set: FeatureSet,
        #[arg(long)]
        out: PathBuf,
        /// Pipeline config whose `extract` section overrides the defaults.
        #[arg(long)]
        config: Option<PathBuf>,
    },
    /// Select features, train, evaluate, and write a JSON report.
    Run {
        #[arg(long)]
        features: PathBuf,
        #[arg(long)]
        config: Option<PathBuf>,
        #[arg(long)]
        out: PathBuf,
        /// Manifest matching the CSV rows, for per-method accuracy rows.
        #[arg(long)]
        manifest: Option<PathBuf>,
    },
    /// Write seeded synthetic grayscale covers.
    Synth {
        #[arg(long)]
        out: PathBuf,
        #[arg(long, default_value_t = 16)]
        count: usize,
        #[arg(long, default_value_t = 256)]
        size: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
}

fn parse_method(s: &str) -> Result<EmbedMethod, String> {
    s.parse().map_err(|e: stegsel::Error| e.to_string())
}

fn parse_set(s: &str) -> Result<FeatureSet, String> {
    s.parse().map_err(|e: stegsel::Error| e.to_string())
}

fn load_config(path: Option<&Path>) -> Result<PipelineConfig> {
    Ok(match path {
        Some(p) => PipelineConfig::load(p)?,
        None => PipelineConfig::default(),
    })
}

fn sidecar(out: &Path) -> PathBuf {
    let stem = out.file_stem().and_then(|s| s.to_str()).unwrap_or("report");
    out.with_file_name(format!("{stem}.timing.json"))
}

fn write_json(path: &Path, value: &impl serde::Serialize) -> Result<()> {
    let mut bytes = serde_json::to_vec_pretty(value)?;
    bytes.push(b'\n');
    std::fs::write(path, bytes).map_err(|e| stegsel::Error::io(path, e))?;
    Ok(())
}

fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Gen { covers, method, rate, seed, out, quality } => {
            let spec = EmbedSpec { method, rate, seed };
            let m = cmd_gen(&covers, &spec, &QTable::with_quality(quality)?, &out)?;
            println!("wrote {} images and {}", m.entries.len(), out.join("manifest.csv").display());
        }
        Command::Extract { manifest, set, out, config } => {
            let cfg = load_config(config.as_deref())?;
            let ex = cmd_extract_to_csv(&manifest, set, &cfg.extract, &out)?;
            for (path, w) in &ex.warnings {
                eprintln!("warning: {}: {w}", path.display());
            }
            println!(
                "wrote {} rows x {} features to {}",
                ex.dataset.n_samples(),
                ex.dataset.n_features(),
                out.display()
            );
        }
        Command::Run { features, config, out, manifest } => {
            let cfg = load_config(config.as_deref())?;
            let data = Dataset::load_csv(&features)?;
            let methods = manifest
                .map(|m| DatasetManifest::load(m).map(|m| m.entries.into_iter().map(|e| e.method).collect::<Vec<_>>()))
                .transpose()?;
            let res = cmd_run(&data, methods.as_deref(), &cfg)?;
            write_json(&out, &res.report)?;
            write_json(&sidecar(&out), &res.timing)?;
            let r = &res.report;
            println!(
                "features {} -> {} ({:.2}% reduction), accuracy {:.4} -> {:.4}, training time {:.2}% lower",
                r.n_features_before,
                r.n_features_after,
                r.pct_feature_reduction,
                r.accuracy_before,
                r.accuracy_after,
                res.timing.pct_time_reduction
            );
        }
        Command::Synth { out, count, size, seed } => {
            let paths = write_synthetic_covers(&out, count, size, size, seed)?;
            println!("wrote {} covers to {}", paths.len(), out.display());
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("stegsel: {}", e.to_string().replace('\n', " "));
            ExitCode::FAILURE
        }
    }
}
