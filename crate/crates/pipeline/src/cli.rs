use std::ffi::OsString;
use std::net::SocketAddr;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context};
use clap::{Args, Parser, Subcommand};
use mattekit_core::io::{read_alpha, write_trimap};
use mattekit_core::matte::ChromaKeyer;
use mattekit_core::metrics::Reduction;
use mattekit_core::trimap::{default_band, trimap_from_alpha};
use mattekit_core::KeyColor;

use crate::config::Config;
use crate::eval::{evaluate_dirs, EvalSettings, MaskMode};
use crate::manifest::{read_manifest, write_atomic, ManifestStore};
use crate::prompts::generate_prompts;
use crate::screen::Decision;

#[derive(Debug, Parser)]
#[command(name = "mattekit", version, about = "Matting dataset pipeline: screening, refinement, compositing and evaluation")]
pub struct Cli {
    /// Manifest file; derived images are stored next to it.
    #[arg(long, global = true, default_value = "manifest.json")]
    pub manifest: PathBuf,
    /// TOML configuration. Defaults to the manifest's stored configuration.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Seed for prompt sampling and background assignment.
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// Worker threads for per-sample work (0 = one per core).
    #[arg(long, global = true)]
    pub workers: Option<usize>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Args, Default)]
pub struct ThresholdArgs {
    /// Largest tolerated fraction of semi-transparent pixels.
    #[arg(long)]
    pub threshold_semi: Option<f64>,
    /// Largest tolerated share of semi-transparent noise attached to the edge band.
    #[arg(long)]
    pub threshold_noise: Option<f64>,
    /// Largest tolerated share of semi-transparent pixels changed by refinement.
    #[arg(long)]
    pub threshold_removed: Option<f64>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Generate text prompts from the configured attribute lists.
    Prompts {
        /// Number of prompts (capped by the number of combinations).
        #[arg(long)]
        limit: Option<usize>,
        /// Write prompts here instead of stdout.
        #[arg(long)]
        out: Option<PathBuf>,
        /// Also store the prompts in the manifest.
        #[arg(long)]
        record: bool,
    },
    /// Add `<id>_rgb.png`/`<id>_alpha.png` pairs or RGBA `<id>.png` files.
    Ingest {
        /// Directory of input PNGs.
        dir: PathBuf,
        #[command(flatten)]
        thresholds: ThresholdArgs,
    },
    /// Apply reviewer decisions, then accept or flag every pending sample.
    Screen {
        /// Accept a pending or flagged sample (repeatable).
        #[arg(long = "accept", value_name = "ID")]
        accept: Vec<String>,
        /// Reject a pending or flagged sample (repeatable).
        #[arg(long = "reject", value_name = "ID")]
        reject: Vec<String>,
        #[command(flatten)]
        thresholds: ThresholdArgs,
    },
    /// Refine every accepted sample.
    Refine {
        /// Also write 16-bit region label maps under `labels/`.
        #[arg(long)]
        label_maps: bool,
    },
    /// Composite refined samples over background images.
    Composite {
        /// Directory of background PNGs.
        #[arg(long)]
        backgrounds: PathBuf,
        /// Composites per refined sample.
        #[arg(long)]
        per_sample: Option<usize>,
    },
    /// Re-extract refined samples from solid key-colour composites.
    Chroma {
        /// Key colour, e.g. `0,255,0`.
        #[arg(long, value_name = "R,G,B")]
        key_color: Option<KeyColor>,
        /// Deviation from the key that already counts as fully opaque.
        #[arg(long)]
        tolerance: Option<u8>,
    },
    /// Build trimaps for refined samples, or for one file with --input/--output.
    Trimap {
        /// Erosion radius in pixels; derived from image size if omitted.
        #[arg(long)]
        band: Option<usize>,
        /// Single alpha matte to convert.
        #[arg(long, requires = "output")]
        input: Option<PathBuf>,
        /// Where to write the trimap for --input.
        #[arg(long, requires = "input")]
        output: Option<PathBuf>,
    },
    /// Compare predicted mattes with ground truth, paired by file stem.
    Eval {
        /// Directory of predicted mattes.
        #[arg(long)]
        pred: PathBuf,
        /// Directory of ground-truth mattes.
        #[arg(long)]
        gt: PathBuf,
        #[arg(long, value_enum, default_value = "none")]
        mask: MaskMode,
        /// Trimaps named `<stem>.png`; generated from ground truth if omitted.
        #[arg(long)]
        trimaps: Option<PathBuf>,
        /// Trimap band for generated trimaps.
        #[arg(long)]
        band: Option<usize>,
        /// How Grad and Conn combine pixels: `sum` or `mean`.
        #[arg(long, default_value = "sum", value_parser = parse_reduction)]
        reduction: Reduction,
        /// Treat pairs as consecutive video frames and report dtSSD.
        #[arg(long)]
        sequence: bool,
        /// Write the JSON report here.
        #[arg(long)]
        json: Option<PathBuf>,
    },
    /// Serve the review API (and optional static UI) for the manifest.
    Serve {
        #[arg(long, default_value = "127.0.0.1:8080")]
        bind: SocketAddr,
        /// Static files served for paths outside `/api`.
        #[arg(long)]
        assets: Option<PathBuf>,
    },
}

fn parse_reduction(s: &str) -> Result<Reduction, String> {
    match s {
        "sum" => Ok(Reduction::Sum),
        "mean" => Ok(Reduction::Mean),
        _ => Err(format!("expected sum or mean, got {s:?}")),
    }
}

impl ThresholdArgs {
    fn apply(&self, config: &mut Config) {
        let t = &mut config.screening;
        if let Some(v) = self.threshold_semi {
            t.semi_fraction = v;
        }
        if let Some(v) = self.threshold_noise {
            t.attached_noise_fraction = v;
        }
        if let Some(v) = self.threshold_removed {
            t.removed_fraction = v;
        }
    }
}

impl Cli {
    /// Configuration from `--config`, else the manifest snapshot, else
    /// defaults; then global flag overrides.
    fn base_config(&self) -> anyhow::Result<Config> {
        let mut config = match &self.config {
            Some(path) => Config::load(path)?,
            None if self.manifest.exists() => read_manifest(&self.manifest)?.config,
            None => Config::default(),
        };
        if let Some(seed) = self.seed {
            config.seed = seed;
        }
        if let Some(workers) = self.workers {
            config.workers = workers;
        }
        Ok(config)
    }
}

/// Opens the manifest, runs `f` with the effective config, and saves.
fn with_manifest<T>(
    cli: &Cli,
    config: Config,
    create: bool,
    f: impl FnOnce(&ManifestStore, &mut crate::manifest::Manifest, &Config) -> anyhow::Result<T>,
) -> anyhow::Result<T> {
    config.validate()?;
    let (store, mut manifest) = if create {
        ManifestStore::open_or_create(&cli.manifest, &config)?
    } else {
        ManifestStore::open(&cli.manifest)?
    };
    let out = f(&store, &mut manifest, &config)?;
    manifest.config = config;
    store.save(&mut manifest)?;
    Ok(out)
}

fn standalone_trimap(input: &Path, output: &Path, band: Option<usize>) -> anyhow::Result<()> {
    let alpha = read_alpha(input).with_context(|| input.display().to_string())?;
    let (w, h) = alpha.dims();
    let band = band.unwrap_or_else(|| default_band(w, h));
    write_trimap(output, &trimap_from_alpha(&alpha, band, band)).with_context(|| output.display().to_string())?;
    println!("wrote {} (band {band})", output.display());
    Ok(())
}

pub fn run(cli: Cli) -> anyhow::Result<()> {
    let mut config = cli.base_config()?;
    match &cli.command {
        Command::Prompts { limit, out, record } => {
            if let Some(limit) = limit {
                config.prompts.limit = *limit;
            }
            config.validate()?;
            let prompts = generate_prompts(&config.prompts.spec(), config.prompts.limit, config.seed)?;
            let mut text = prompts.join("\n");
            text.push('\n');
            match out {
                Some(path) => write_atomic(path, text.as_bytes())?,
                None => print!("{text}"),
            }
            if *record {
                with_manifest(&cli, config, true, |_, m, c| {
                    m.vocabulary = c.prompts.attributes.clone();
                    m.prompts = prompts;
                    Ok(())
                })?;
            }
        }
        Command::Ingest { dir, thresholds } => {
            thresholds.apply(&mut config);
            let s = with_manifest(&cli, config, true, |store, m, c| {
                Ok(crate::ingest::ingest(store, m, dir, &c.screening, c.workers)?)
            })?;
            println!(
                "ingested {} samples ({} flagged, {} already present, {} issues)",
                s.added, s.flagged, s.skipped, s.issues
            );
        }
        Command::Screen {
            accept,
            reject,
            thresholds,
        } => {
            thresholds.apply(&mut config);
            let decisions: Vec<(String, Decision)> = accept
                .iter()
                .map(|id| (id.clone(), Decision::Accept))
                .chain(reject.iter().map(|id| (id.clone(), Decision::Reject)))
                .collect();
            let s = with_manifest(&cli, config, false, |_, m, c| {
                Ok(crate::screen::screen(m, &c.screening, &decisions)?)
            })?;
            println!(
                "{} decisions applied; {} accepted, {} flagged by the automatic screen",
                s.decided, s.accepted, s.flagged
            );
        }
        Command::Refine { label_maps } => {
            let s = with_manifest(&cli, config, false, |store, m, c| {
                Ok(crate::refine::refine_batch(store, m, c.workers, *label_maps)?)
            })?;
            println!("refined {} samples ({} failed)", s.refined, s.failed);
        }
        Command::Composite { backgrounds, per_sample } => {
            if let Some(n) = per_sample {
                config.composite.per_sample = *n;
            }
            let n = with_manifest(&cli, config, false, |store, m, c| {
                Ok(crate::composite::composite_batch(
                    store,
                    m,
                    backgrounds,
                    c.composite.per_sample,
                    c.seed,
                    c.workers,
                )?)
            })?;
            println!("wrote {n} composites");
        }
        Command::Chroma { key_color, tolerance } => {
            if let Some(key) = key_color {
                config.chroma.key = *key;
            }
            if let Some(t) = tolerance {
                config.chroma.tolerance = *t;
            }
            let n = with_manifest(&cli, config, false, |store, m, c| {
                let keyer = ChromaKeyer::new(c.chroma.key).with_tolerance(c.chroma.tolerance);
                Ok(crate::chroma::chroma_batch(store, m, keyer, c.workers)?)
            })?;
            println!("extracted {n} samples");
        }
        Command::Trimap { band, input, output } => {
            if let (Some(input), Some(output)) = (input, output) {
                return standalone_trimap(input, output, band.or(config.trimap.band));
            }
            if band.is_some() {
                config.trimap.band = *band;
            }
            let n = with_manifest(&cli, config, false, |store, m, c| {
                Ok(crate::trimap::trimap_batch(store, m, c.trimap.band, c.workers)?)
            })?;
            println!("wrote {n} trimaps");
        }
        Command::Eval {
            pred,
            gt,
            mask,
            trimaps,
            band,
            reduction,
            sequence,
            json,
        } => {
            if trimaps.is_some() && *mask != MaskMode::Trimap {
                bail!("--trimaps requires --mask trimap");
            }
            let settings = EvalSettings {
                mask: *mask,
                trimap_dir: trimaps.clone(),
                band: band.or(config.trimap.band),
                reduction: *reduction,
                sequence: *sequence,
            };
            let report = evaluate_dirs(pred, gt, &settings, config.workers)?;
            print!("{}", report.table());
            for u in &report.unpaired {
                eprintln!("unpaired: {} (no {} file)", u.id, u.missing);
            }
            for e in &report.errors {
                eprintln!("error: {}: {}", e.id, e.message);
            }
            if let Some(path) = json {
                let mut bytes = serde_json::to_vec_pretty(&report)?;
                bytes.push(b'\n');
                write_atomic(path, &bytes)?;
            }
        }
        Command::Serve { bind, assets } => {
            let (store, manifest) = ManifestStore::open(&cli.manifest)?;
            crate::serve::serve(store, manifest, *bind, assets.clone())?;
        }
    }
    Ok(())
}

pub fn main_with<I, T>(args: I) -> ExitCode
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(2) } else { ExitCode::SUCCESS };
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}
