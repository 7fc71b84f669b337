//! `gbad`: discover normative patterns and structural anomalies in XP graph files.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use gbad_core::synthetic::{write_manifest, AnomalyKind};
use gbad_core::{
    benchmark, detect_all, discover, emit_report, generate_synthetic, parse_graph_file,
    write_graph_file, Algorithm, BenchmarkRecord, DetectError, DetectorParams, DiscoveryError,
    DiscoveryParams, GraphDatabase, OutputFormat, SyntheticSpec,
};

#[derive(Parser)]
#[command(name = "gbad", version, about = "Graph-based anomaly detection over XP graph databases")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Rank the best substructures by description length.
    Discover {
        #[command(flatten)]
        io: InputOutput,
        #[command(flatten)]
        disc: DiscoveryArgs,
    },
    /// Report anomalies relative to the best substructure.
    Detect {
        #[command(flatten)]
        io: InputOutput,
        #[arg(long, value_enum, default_value_t = AlgorithmArg::All)]
        algorithm: AlgorithmArg,
        #[arg(long, value_enum, default_value_t = FormatArg::Text)]
        format: FormatArg,
        #[command(flatten)]
        disc: DiscoveryArgs,
        #[command(flatten)]
        det: DetectorArgs,
    },
    /// Write a synthetic news database with injected anomalies.
    Generate {
        #[arg(long, default_value_t = 50)]
        instances: usize,
        /// Anomalies to inject as `kind:count`, repeatable.
        #[arg(long, value_parser = parse_anomaly)]
        anomalies: Vec<(AnomalyKind, usize)>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: PathBuf,
        /// Ground-truth manifest path; defaults to `<out>.manifest`.
        #[arg(long)]
        manifest: Option<PathBuf>,
    },
    /// Time the detection phase of each algorithm.
    Bench {
        #[command(flatten)]
        io: InputOutput,
        #[arg(long, value_enum, default_value_t = AlgorithmArg::All)]
        algorithm: AlgorithmArg,
        #[command(flatten)]
        disc: DiscoveryArgs,
        #[command(flatten)]
        det: DetectorArgs,
    },
}

#[derive(Args)]
struct InputOutput {
    #[arg(long)]
    input: PathBuf,
    /// Write to this file instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct DiscoveryArgs {
    #[arg(long, default_value_t = DiscoveryParams::default().beam_width)]
    beam_width: usize,
    #[arg(long, default_value_t = DiscoveryParams::default().max_pattern_vertices)]
    max_pattern_vertices: usize,
    #[arg(long, default_value_t = DiscoveryParams::default().num_best)]
    num_best: usize,
    #[arg(long, default_value_t = DiscoveryParams::default().iterations)]
    iterations: usize,
}

impl DiscoveryArgs {
    fn params(&self) -> DiscoveryParams {
        DiscoveryParams {
            beam_width: self.beam_width,
            max_pattern_vertices: self.max_pattern_vertices,
            num_best: self.num_best,
            iterations: self.iterations,
        }
    }
}

#[derive(Args)]
struct DetectorArgs {
    #[arg(long, default_value_t = DetectorParams::default().max_anomalous_cost)]
    max_cost: u32,
    #[arg(long, default_value_t = DetectorParams::default().report_threshold)]
    report_threshold: f64,
    #[arg(long, default_value_t = DetectorParams::default().top_k)]
    top_k: usize,
}

impl DetectorArgs {
    fn params(&self) -> DetectorParams {
        DetectorParams {
            max_anomalous_cost: self.max_cost,
            report_threshold: self.report_threshold,
            top_k: self.top_k,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum AlgorithmArg {
    Mdl,
    P,
    Mps,
    All,
}

impl AlgorithmArg {
    fn algorithms(self) -> Vec<Algorithm> {
        match self {
            AlgorithmArg::Mdl => vec![Algorithm::Mdl],
            AlgorithmArg::P => vec![Algorithm::P],
            AlgorithmArg::Mps => vec![Algorithm::Mps],
            AlgorithmArg::All => Algorithm::ALL.to_vec(),
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum FormatArg {
    Text,
    Json,
    Dot,
}

impl From<FormatArg> for OutputFormat {
    fn from(f: FormatArg) -> Self {
        match f {
            FormatArg::Text => OutputFormat::Text,
            FormatArg::Json => OutputFormat::Json,
            FormatArg::Dot => OutputFormat::Dot,
        }
    }
}

fn parse_anomaly(s: &str) -> Result<(AnomalyKind, usize), String> {
    let (kind, count) = s
        .split_once(':')
        .ok_or_else(|| format!("expected kind:count, got {s:?}"))?;
    let count = count.parse().map_err(|_| format!("bad count in {s:?}"))?;
    Ok((kind.parse()?, count))
}

/// A failed run: exit code and stderr message.
struct Failure(u8, String);

const INPUT_ERROR: u8 = 2;
const NO_NORM: u8 = 3;

impl From<DetectError> for Failure {
    fn from(e: DetectError) -> Self {
        match e {
            DetectError::NoNormativePattern { .. } => Failure(NO_NORM, e.to_string()),
            other => Failure(INPUT_ERROR, other.to_string()),
        }
    }
}

impl From<DiscoveryError> for Failure {
    fn from(e: DiscoveryError) -> Self {
        Failure(INPUT_ERROR, e.to_string())
    }
}

fn load(path: &Path) -> Result<GraphDatabase, Failure> {
    let text = fs::read_to_string(path)
        .map_err(|e| Failure(INPUT_ERROR, format!("{}: {e}", path.display())))?;
    parse_graph_file(&text).map_err(|e| Failure(INPUT_ERROR, format!("{}:{}: {}", path.display(), e.line, e.kind)))
}

fn write(out: Option<&Path>, text: &str) -> Result<(), Failure> {
    match out {
        Some(path) => fs::write(path, text)
            .map_err(|e| Failure(INPUT_ERROR, format!("{}: {e}", path.display()))),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn run(cli: Cli) -> Result<(), Failure> {
    match cli.command {
        Command::Discover { io, disc } => {
            let db = load(&io.input)?;
            let found = discover(&db, &disc.params())?;
            let mut text = String::new();
            for (rank, s) in found.iter().enumerate() {
                text.push_str(&format!(
                    "% rank {} total {:.6} bits, {} instances\n",
                    rank + 1,
                    s.score.total.value(),
                    s.instances.len()
                ));
                let mut g = s.pattern.clone();
                g.example_index = rank as u32 + 1;
                text.push_str(&write_graph_file(&GraphDatabase::new(vec![g])));
            }
            write(io.out.as_deref(), &text)
        }
        Command::Detect { io, algorithm, format, disc, det } => {
            let db = load(&io.input)?;
            let detections = detect_all(&db, &algorithm.algorithms(), &disc.params(), &det.params())?;
            let format = OutputFormat::from(format);
            let text = match format {
                OutputFormat::Json => {
                    let reports: Vec<_> = detections.iter().flat_map(|d| d.reports.clone()).collect();
                    emit_report(&reports, None, format)
                }
                OutputFormat::Dot => {
                    // One shared normative pattern, drawn once.
                    let mut text = String::new();
                    for (i, d) in detections.iter().enumerate() {
                        let normative = (i == 0).then_some(&d.normative.pattern);
                        text.push_str(&emit_report(&d.reports, normative, format));
                    }
                    text
                }
                OutputFormat::Text => {
                    let mut text = String::new();
                    for d in &detections {
                        text.push_str(&format!("{}\n", d.algorithm.name()));
                        text.push_str(&emit_report(&d.reports, None, format));
                    }
                    text
                }
            };
            write(io.out.as_deref(), &text)
        }
        Command::Generate { instances, anomalies, seed, out, manifest } => {
            let spec = SyntheticSpec::new(instances, anomalies);
            spec.validate().map_err(|e| Failure(INPUT_ERROR, e))?;
            let (db, entries) = generate_synthetic(&spec, seed);
            write(Some(&out), &write_graph_file(&db))?;
            let manifest = manifest.unwrap_or_else(|| {
                let mut p = out.clone().into_os_string();
                p.push(".manifest");
                PathBuf::from(p)
            });
            write(Some(&manifest), &write_manifest(&entries))
        }
        Command::Bench { io, algorithm, disc, det } => {
            let db = load(&io.input)?;
            let records = benchmark(&db, &algorithm.algorithms(), &disc.params(), &det.params())?;
            let mut text = format!("{}\n", BenchmarkRecord::TSV_HEADER);
            for r in &records {
                text.push_str(&r.tsv_row());
                text.push('\n');
            }
            write(io.out.as_deref(), &text)
        }
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure(code, message)) => {
            eprintln!("gbad: {message}");
            ExitCode::from(code)
        }
    }
}
