use std::fmt;
use std::fs;
use std::io::{self, Read, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{anyhow, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use rayon::prelude::*;

use ispa::acoustic::{self, AcousticConfig, DistanceDomain};
use ispa::audio::{self, Waveform};
use ispa::dsp::{self, FeatureSequence};
use ispa::eval::{self, ClassifierConfig, DatasetManifest, SplitDocuments, TokenDocument};
use ispa::feature::{self, Codebook, KMeansConfig, Variant};

/// Bad flags or flag combinations; exits with status 2.
#[derive(Debug)]
struct UsageError(String);

impl fmt::Display for UsageError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for UsageError {}

fn usage(msg: impl Into<String>) -> anyhow::Error {
    UsageError(msg.into()).into()
}

#[derive(Parser)]
#[command(name = "ispa", version, about = "Transcribe audio into discrete token text")]
struct Cli {
    /// Worker threads for per-file work (default: one per processor).
    #[arg(long, global = true, value_name = "N", value_parser = parse_jobs)]
    jobs: Option<usize>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Transcribe audio files, one output line per input.
    Transcribe(TranscribeArgs),
    /// Train a k-means codebook from audio (MFCC) or .ispf feature files.
    TrainCodebook(TrainArgs),
    /// Label codebook centroids with phones from aligned features.
    MapPhones(MapPhonesArgs),
    /// Transcribe a labeled manifest and score a bag-of-n-grams classifier.
    Eval(EvalArgs),
    /// Render acoustic tokens as a WAV file.
    Synth(SynthArgs),
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Method {
    #[value(name = "ispa-a")]
    IspaA,
    #[value(name = "ispa-f")]
    IspaF,
}

#[derive(Clone, Copy, ValueEnum)]
enum VariantArg {
    Raw,
    Seg,
    Phn,
}

impl From<VariantArg> for Variant {
    fn from(v: VariantArg) -> Self {
        match v {
            VariantArg::Raw => Variant::Raw,
            VariantArg::Seg => Variant::Seg,
            VariantArg::Phn => Variant::Phn,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum DomainArg {
    Semitones,
    Hz,
}

#[derive(Args)]
struct MethodArgs {
    #[arg(long, value_enum)]
    method: Method,
    /// ispa-f output variant [default: raw].
    #[arg(long, value_enum)]
    variant: Option<VariantArg>,
    /// Codebook JSON (required for ispa-f).
    #[arg(long, value_name = "PATH")]
    codebook: Option<PathBuf>,
    /// Segment length penalty [default: 8 for ispa-a, 4 for ispa-f].
    #[arg(long)]
    lambda: Option<f64>,
    /// Analysis hop in seconds (ispa-a pitch grid; ispa-f must match the codebook).
    #[arg(long)]
    hop: Option<f64>,
    /// Pitch distance units for ispa-a.
    #[arg(long, value_enum, default_value = "semitones")]
    distance_domain: DomainArg,
}

#[derive(Args)]
struct TranscribeArgs {
    #[command(flatten)]
    method: MethodArgs,
    /// External pitch CSV (ispa-a), one per audio file, in order.
    #[arg(long, value_name = "PATH")]
    pitch: Vec<PathBuf>,
    /// ISPF feature file (ispa-f), one per audio file or instead of audio.
    #[arg(long, value_name = "PATH")]
    features: Vec<PathBuf>,
    /// Write token lines here instead of stdout.
    #[arg(long, value_name = "PATH")]
    out: Option<PathBuf>,
    audio: Vec<PathBuf>,
}

#[derive(Args)]
struct TrainArgs {
    #[arg(long, default_value_t = 64)]
    k: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, value_name = "PATH")]
    out: PathBuf,
    /// MFCC hop in seconds for audio inputs.
    #[arg(long, default_value_t = 0.020)]
    hop: f64,
    /// Upper bound on frames used for training.
    #[arg(long, default_value_t = 200_000)]
    max_samples: usize,
    /// Tag stored in the codebook [default: derived from the inputs].
    #[arg(long)]
    feature_kind: Option<String>,
    #[arg(required = true)]
    inputs: Vec<PathBuf>,
}

#[derive(Args)]
struct MapPhonesArgs {
    #[arg(long, value_name = "PATH")]
    codebook: PathBuf,
    /// Feature file (.ispf) or audio, paired in order with --alignment.
    #[arg(long, value_name = "PATH", required = true)]
    features: Vec<PathBuf>,
    /// Phone alignment CSV (start_s,end_s,phone).
    #[arg(long, value_name = "PATH", required = true)]
    alignment: Vec<PathBuf>,
    #[arg(long, value_name = "PATH")]
    out: PathBuf,
}

#[derive(Args)]
struct EvalArgs {
    #[command(flatten)]
    method: MethodArgs,
    /// CSV with columns path,label,split.
    #[arg(long, value_name = "PATH")]
    manifest: PathBuf,
    /// Largest n-gram order (1-3).
    #[arg(long, default_value_t = 2)]
    ngram: usize,
    /// Classifier seed; repeat for mean and spread over runs.
    #[arg(long = "seed", default_values_t = [0u64])]
    seeds: Vec<u64>,
    /// Report path [default: stdout].
    #[arg(long, value_name = "PATH")]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct SynthArgs {
    #[arg(long, value_name = "PATH")]
    out: PathBuf,
    #[arg(long, default_value_t = audio::DEFAULT_SAMPLE_RATE)]
    rate: u32,
    /// Token text file [default: stdin].
    input: Option<PathBuf>,
}

/// A validated transcription setup.
enum Pipeline {
    Acoustic(AcousticConfig),
    Feature {
        codebook: Codebook,
        variant: Variant,
        lambda: f64,
    },
}

impl MethodArgs {
    fn check(&self) -> Result<()> {
        if let Some(l) = self.lambda {
            if !(l >= 0.0 && l.is_finite()) {
                return Err(usage(format!("--lambda must be a finite value >= 0, got {l}")));
            }
        }
        if let Some(h) = self.hop {
            if !(h > 0.0 && h.is_finite()) {
                return Err(usage(format!("--hop must be positive, got {h}")));
            }
        }
        match self.method {
            Method::IspaA => {
                if self.variant.is_some() {
                    return Err(usage("--variant only applies to --method ispa-f"));
                }
                if self.codebook.is_some() {
                    return Err(usage("--codebook only applies to --method ispa-f"));
                }
            }
            Method::IspaF => {
                if self.codebook.is_none() {
                    return Err(usage("--method ispa-f requires --codebook"));
                }
            }
        }
        Ok(())
    }

    fn pipeline(&self) -> Result<Pipeline> {
        match self.method {
            Method::IspaA => {
                let mut config = AcousticConfig::default();
                if let Some(l) = self.lambda {
                    config.lambda = l;
                }
                if let Some(h) = self.hop {
                    config.pitch.hop_seconds = h;
                }
                config.cost.domain = match self.distance_domain {
                    DomainArg::Semitones => DistanceDomain::Semitones,
                    DomainArg::Hz => DistanceDomain::Hz,
                };
                Ok(Pipeline::Acoustic(config))
            }
            Method::IspaF => {
                let path = self.codebook.as_ref().expect("checked");
                let codebook = Codebook::load(path)?;
                if let Some(h) = self.hop {
                    if (h - codebook.hop_seconds()).abs() > 1e-9 {
                        return Err(anyhow!(
                            "--hop {h} differs from the codebook hop {}",
                            codebook.hop_seconds()
                        ));
                    }
                }
                Ok(Pipeline::Feature {
                    codebook,
                    variant: self.variant.map_or(Variant::Raw, Variant::from),
                    lambda: self.lambda.unwrap_or(feature::DEFAULT_LAMBDA),
                })
            }
        }
    }

    fn echo(&self, config: &mut serde_json::Map<String, serde_json::Value>) {
        let method = match self.method {
            Method::IspaA => "ispa-a",
            Method::IspaF => "ispa-f",
        };
        config.insert("method".into(), method.into());
        if let Some(v) = self.variant {
            config.insert("variant".into(), Variant::from(v).to_string().into());
        }
        if let Some(p) = &self.codebook {
            config.insert("codebook".into(), p.display().to_string().into());
        }
        if let Some(l) = self.lambda {
            config.insert("lambda".into(), l.into());
        }
        if let Some(h) = self.hop {
            config.insert("hop".into(), h.into());
        }
    }
}

/// One file-level transcription job.
struct Item<'a> {
    audio: Option<&'a Path>,
    pitch: Option<&'a Path>,
    features: Option<&'a Path>,
}

impl Item<'_> {
    fn name(&self) -> String {
        self.audio
            .or(self.features)
            .map_or_else(String::new, |p| p.display().to_string())
    }
}

impl Pipeline {
    /// Tokens and the clip duration in seconds.
    fn run(&self, item: &Item) -> Result<(Vec<String>, f64)> {
        let wave = item.audio.map(audio::load_audio).transpose()?;
        match self {
            Pipeline::Acoustic(config) => {
                let w = wave.expect("ispa-a items carry audio");
                let tokens = match item.pitch {
                    Some(p) => acoustic::transcribe_track(&w, &dsp::import_pitch(p)?, config)?,
                    None => acoustic::transcribe_a(&w, config)?,
                };
                Ok((tokens.iter().map(ToString::to_string).collect(), w.duration_seconds()))
            }
            Pipeline::Feature {
                codebook,
                variant,
                lambda,
            } => {
                let features = match (item.features, &wave) {
                    (Some(p), _) => dsp::import_features(p)?,
                    (None, Some(w)) => feature::mfcc_features(w, codebook.hop_seconds(), codebook.dim())?,
                    (None, None) => unreachable!("items carry audio or features"),
                };
                let duration = wave
                    .as_ref()
                    .map_or(features.duration_seconds(), Waveform::duration_seconds);
                Ok((feature::transcribe_f(&features, codebook, *variant, *lambda)?, duration))
            }
        }
    }
}

fn parse_jobs(s: &str) -> std::result::Result<usize, String> {
    match s.parse::<usize>() {
        Ok(0) => Err("must be at least 1".into()),
        Ok(n) => Ok(n),
        Err(e) => Err(e.to_string()),
    }
}

fn thread_pool(jobs: Option<usize>) -> Result<rayon::ThreadPool> {
    Ok(rayon::ThreadPoolBuilder::new().num_threads(jobs.unwrap_or(0)).build()?)
}

fn write_output(out: Option<&Path>, text: &str) -> Result<()> {
    match out {
        Some(p) => fs::write(p, text).with_context(|| format!("writing {}", p.display())),
        None => {
            let mut stdout = io::stdout().lock();
            stdout.write_all(text.as_bytes())?;
            Ok(stdout.flush()?)
        }
    }
}

fn cmd_transcribe(args: &TranscribeArgs, jobs: Option<usize>) -> Result<()> {
    args.method.check()?;
    let is_a = args.method.method == Method::IspaA;
    if is_a && !args.features.is_empty() {
        return Err(usage("--features only applies to --method ispa-f"));
    }
    if !is_a && !args.pitch.is_empty() {
        return Err(usage("--pitch only applies to --method ispa-a"));
    }
    if args.audio.is_empty() && (is_a || args.features.is_empty()) {
        return Err(usage("no input files"));
    }
    for (flag, list) in [("--pitch", &args.pitch), ("--features", &args.features)] {
        if !list.is_empty() && !args.audio.is_empty() && list.len() != args.audio.len() {
            return Err(usage(format!(
                "{flag} given {} times for {} audio files",
                list.len(),
                args.audio.len()
            )));
        }
    }

    let pipeline = args.method.pipeline()?;
    let n = args.audio.len().max(args.features.len());
    let items: Vec<Item> = (0..n)
        .map(|i| Item {
            audio: args.audio.get(i).map(PathBuf::as_path),
            pitch: args.pitch.get(i).map(PathBuf::as_path),
            features: args.features.get(i).map(PathBuf::as_path),
        })
        .collect();
    let results: Vec<Result<(Vec<String>, f64)>> =
        thread_pool(jobs)?.install(|| items.par_iter().map(|item| pipeline.run(item)).collect());

    let mut text = String::new();
    let mut failed = 0;
    for (item, result) in items.iter().zip(results) {
        match result {
            Ok((tokens, _)) => text.push_str(&tokens.join(" ")),
            Err(e) => {
                let msg = format!("{e:#}");
                if msg.starts_with(&item.name()) {
                    eprintln!("ispa: {msg}");
                } else {
                    eprintln!("ispa: {}: {msg}", item.name());
                }
                failed += 1;
            }
        }
        text.push('\n');
    }
    write_output(args.out.as_deref(), &text)?;
    if failed > 0 {
        return Err(anyhow!("{failed} of {n} files failed"));
    }
    Ok(())
}

fn is_ispf(path: &Path) -> bool {
    path.extension().is_some_and(|e| e.eq_ignore_ascii_case("ispf"))
}

/// ISPF files load as-is; anything else is decoded as audio and run through MFCC.
fn load_features(path: &Path, hop: f64, n_coeffs: usize) -> Result<FeatureSequence> {
    if is_ispf(path) {
        Ok(dsp::import_features(path)?)
    } else {
        let w = audio::load_audio(path)?;
        feature::mfcc_features(&w, hop, n_coeffs).with_context(|| path.display().to_string())
    }
}

fn cmd_train_codebook(args: &TrainArgs, jobs: Option<usize>) -> Result<()> {
    if args.k < 2 {
        return Err(usage("--k must be at least 2"));
    }
    if !(args.hop > 0.0 && args.hop.is_finite()) {
        return Err(usage("--hop must be positive"));
    }
    let n_mfcc = dsp::MfccConfig::default().n_coeffs;
    let corpus: Vec<FeatureSequence> = thread_pool(jobs)?.install(|| {
        args.inputs
            .par_iter()
            .map(|p| load_features(p, args.hop, n_mfcc))
            .collect::<Result<_>>()
    })?;
    let dim = corpus[0].dim();
    if let Some((path, seq)) = args.inputs.iter().zip(&corpus).find(|(_, s)| s.dim() != dim) {
        return Err(anyhow!(
            "{}: feature dim {} differs from {} in {}",
            path.display(),
            seq.dim(),
            dim,
            args.inputs[0].display()
        ));
    }
    let kind = args.feature_kind.clone().unwrap_or_else(|| {
        let ispf = args.inputs.iter().filter(|p| is_ispf(p)).count();
        match ispf {
            0 => format!("mfcc-{dim}"),
            n if n == args.inputs.len() => format!("ispf-{dim}"),
            _ => format!("mixed-{dim}"),
        }
    });
    let config = KMeansConfig {
        k: args.k,
        seed: args.seed,
        max_samples: args.max_samples,
        ..KMeansConfig::default()
    };
    let trained = feature::train_codebook(&corpus, &config, &kind)?;
    trained.codebook.save(&args.out)?;
    println!("frames {}", trained.n_frames);
    println!("iterations {}", trained.inertia_trace.len());
    println!("inertia {}", trained.final_inertia());
    Ok(())
}

fn cmd_map_phones(args: &MapPhonesArgs, jobs: Option<usize>) -> Result<()> {
    if args.features.len() != args.alignment.len() {
        return Err(usage(format!(
            "{} --features for {} --alignment files",
            args.features.len(),
            args.alignment.len()
        )));
    }
    let cb = Codebook::load(&args.codebook)?;
    let corpus: Vec<(FeatureSequence, Vec<dsp::PhoneInterval>)> = thread_pool(jobs)?.install(|| {
        args.features
            .par_iter()
            .zip(&args.alignment)
            .map(|(f, a)| Ok((load_features(f, cb.hop_seconds(), cb.dim())?, dsp::import_alignment(a)?)))
            .collect::<Result<_>>()
    })?;
    let (table, warnings) = feature::phone_mean_vectors(&corpus)?;
    for w in &warnings {
        eprintln!("ispa: warning: {w}");
    }
    let mapping = feature::map_phones(&cb, &table)?;
    mapping.codebook.save(&args.out)?;
    println!("total distance {}", mapping.total_distance);
    println!("phones {}", table.len());
    println!("assigned {}", mapping.pairs.len());
    println!("synthesized {}", cb.k() - mapping.pairs.len());
    Ok(())
}

fn cmd_eval(args: &EvalArgs, jobs: Option<usize>) -> Result<()> {
    args.method.check()?;
    if !(1..=3).contains(&args.ngram) {
        return Err(usage("--ngram must be 1, 2 or 3"));
    }
    let manifest = DatasetManifest::load(&args.manifest)?;
    manifest.check_splits()?;
    let pipeline = args.method.pipeline()?;
    let results: Vec<Result<(Vec<String>, f64)>> = thread_pool(jobs)?.install(|| {
        manifest
            .rows
            .par_iter()
            .map(|row| {
                pipeline
                    .run(&Item {
                        audio: Some(&row.path),
                        pitch: None,
                        features: None,
                    })
                    .with_context(|| row.path.display().to_string())
            })
            .collect()
    });
    let mut docs = SplitDocuments::default();
    for (row, result) in manifest.rows.iter().zip(results) {
        let (tokens, duration) = result?;
        docs.push(
            row.split,
            TokenDocument::new(tokens, duration, Some(row.label.clone()))?,
        );
    }
    let mut report = eval::evaluate(&docs, args.ngram, &args.seeds, &ClassifierConfig::default())?;
    args.method.echo(&mut report.config);
    report
        .config
        .insert("manifest".into(), args.manifest.display().to_string().into());
    let mut text = serde_json::to_string_pretty(&report)?;
    text.push('\n');
    write_output(args.out.as_deref(), &text)
}

fn cmd_synth(args: &SynthArgs) -> Result<()> {
    if args.rate == 0 {
        return Err(usage("--rate must be positive"));
    }
    let text = match &args.input {
        Some(p) => fs::read_to_string(p).with_context(|| p.display().to_string())?,
        None => {
            let mut s = String::new();
            io::stdin().read_to_string(&mut s)?;
            s
        }
    };
    let tokens = acoustic::parse_tokens(&text)?;
    let w = acoustic::synthesize(&tokens, args.rate)?;
    audio::write_wav(&args.out, &w)?;
    Ok(())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    let result = match &cli.command {
        Command::Transcribe(a) => cmd_transcribe(a, cli.jobs),
        Command::TrainCodebook(a) => cmd_train_codebook(a, cli.jobs),
        Command::MapPhones(a) => cmd_map_phones(a, cli.jobs),
        Command::Eval(a) => cmd_eval(a, cli.jobs),
        Command::Synth(a) => cmd_synth(a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) if e.is::<UsageError>() => {
            eprintln!("ispa: {e}");
            ExitCode::from(2)
        }
        Err(e) => {
            eprintln!("ispa: {e:#}");
            ExitCode::from(1)
        }
    }
}
