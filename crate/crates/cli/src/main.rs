use std::fs;
use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{bail, Context};
use clap::{Args, Parser, Subcommand, ValueEnum};
use gmmcodec::baseline::{gsm, table};
use gmmcodec::harness::{
    accuracy, generate_workload, run_bench, BenchOptions, Codec, WorkloadSpec,
};
use gmmcodec::{flash_codec, ApproximatorKind, EncodedStream, SymbolAlphabet};

mod io;

use io::SymbolsFile;

#[derive(Parser)]
#[command(
    name = "gmmcodec",
    version,
    about = "Gaussian-mixture rANS coding toolkit"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Time and verify the codecs on a synthetic workload.
    Bench(BenchArgs),
    /// Write a synthetic workload as an `encode` input file.
    Generate(GenerateArgs),
    /// Encode a JSON symbols+params file into a stream.
    Encode(EncodeArgs),
    /// Decode a stream into one symbol per line.
    Decode(DecodeArgs),
    /// Decode, re-encode and compare a stream byte for byte.
    Verify(VerifyArgs),
    /// CDF approximation error against the reference, as CSV.
    Accuracy(AccuracyArgs),
}

#[derive(Clone, Copy, ValueEnum)]
enum CodecArg {
    Flash,
    Table,
    Gsm,
    All,
}

#[derive(Clone, Copy, ValueEnum)]
enum StreamCodec {
    Flash,
    Table,
    Gsm,
}

#[derive(Clone, Copy, ValueEnum)]
enum ApproxArg {
    Exact,
    Polya,
    As,
    Logistic,
}

impl From<ApproxArg> for ApproximatorKind {
    fn from(a: ApproxArg) -> Self {
        match a {
            ApproxArg::Exact => ApproximatorKind::Exact,
            ApproxArg::Polya => ApproximatorKind::Polya,
            ApproxArg::As => ApproximatorKind::AbramowitzStegun,
            ApproxArg::Logistic => ApproximatorKind::Logistic,
        }
    }
}

#[derive(Args)]
struct WorkloadArgs {
    #[arg(long, value_enum, default_value = "logistic")]
    approx: ApproxArg,
    /// Mixture components per symbol (1..=4).
    #[arg(long, default_value_t = 3)]
    k: usize,
    /// Alphabet size, centered on zero.
    #[arg(long, default_value_t = 256)]
    alphabet: u32,
    /// Quantizer precision in bits.
    #[arg(long, default_value_t = 16)]
    precision: u32,
    #[arg(long, default_value_t = 1_000_000)]
    symbols: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Symbols per independently coded chunk (0 = one stream).
    #[arg(long, default_value_t = 0)]
    chunk: usize,
}

impl WorkloadArgs {
    fn spec(&self) -> Result<WorkloadSpec, UsageError> {
        let alphabet = SymbolAlphabet::centered(self.alphabet, self.precision)
            .map_err(|e| UsageError(e.to_string()))?;
        if self.k == 0 || self.k > gmmcodec::MAX_COMPONENTS {
            return Err(UsageError(format!("--k must be in 1..=4, got {}", self.k)));
        }
        Ok(WorkloadSpec {
            symbol_count: self.symbols,
            k: self.k,
            alphabet,
            kind: self.approx.into(),
            seed: self.seed,
            chunk: self.chunk,
        })
    }
}

#[derive(Args)]
struct BenchArgs {
    #[arg(long, value_enum, default_value = "all")]
    codec: CodecArg,
    #[command(flatten)]
    workload: WorkloadArgs,
    #[arg(long, default_value_t = 10)]
    repeats: usize,
    /// Worker threads for chunked coding.
    #[arg(long, default_value_t = 1)]
    threads: usize,
    /// Report path; stdout when omitted.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct GenerateArgs {
    #[command(flatten)]
    workload: WorkloadArgs,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct EncodeArgs {
    #[arg(long = "in")]
    input: PathBuf,
    #[arg(long)]
    out: PathBuf,
    #[arg(long, value_enum, default_value = "flash")]
    codec: StreamCodec,
}

#[derive(Args)]
struct DecodeArgs {
    #[arg(long = "in")]
    input: PathBuf,
    #[arg(long)]
    out: PathBuf,
    #[arg(long, value_enum, default_value = "flash")]
    codec: StreamCodec,
}

#[derive(Args)]
struct VerifyArgs {
    #[arg(long = "in")]
    input: PathBuf,
    #[arg(long, value_enum, default_value = "flash")]
    codec: StreamCodec,
}

#[derive(Args)]
struct AccuracyArgs {
    #[arg(long, default_value_t = -8.0, allow_negative_numbers = true)]
    x_min: f64,
    #[arg(long, default_value_t = 8.0, allow_negative_numbers = true)]
    x_max: f64,
    #[arg(long, default_value_t = 1e-3)]
    step: f64,
    /// CSV path; stdout when omitted.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Debug)]
struct UsageError(String);

impl std::fmt::Display for UsageError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for UsageError {}

fn emit(out: Option<&PathBuf>, text: &str) -> anyhow::Result<()> {
    match out {
        Some(path) => fs::write(path, text).with_context(|| format!("writing {}", path.display())),
        None => {
            let mut stdout = std::io::stdout().lock();
            stdout.write_all(text.as_bytes())?;
            Ok(())
        }
    }
}

fn read_stream(path: &PathBuf) -> anyhow::Result<EncodedStream> {
    let bytes = fs::read(path).with_context(|| format!("reading {}", path.display()))?;
    Ok(EncodedStream::from_bytes(&bytes)?)
}

fn decode_stream(stream: &EncodedStream, codec: StreamCodec) -> gmmcodec::Result<Vec<i32>> {
    match codec {
        StreamCodec::Flash => flash_codec::decode(stream),
        StreamCodec::Table => table::decode(stream),
        StreamCodec::Gsm => {
            let t = gsm::ScaleTable::new(u32::from(stream.header.precision_bits), stream.kind())?;
            gsm::decode(stream, &t)
        }
    }
}

fn cmd_bench(args: &BenchArgs) -> anyhow::Result<()> {
    let spec = args.workload.spec()?;
    let codecs: Vec<Codec> = match args.codec {
        CodecArg::Flash => vec![Codec::Flash],
        CodecArg::Table => vec![Codec::Table],
        CodecArg::Gsm => vec![Codec::Gsm],
        CodecArg::All => Codec::ALL.to_vec(),
    };
    let opts = BenchOptions {
        repeats: args.repeats.max(1),
        threads: args.threads.max(1),
    };
    let report = run_bench(&spec, &codecs, opts)?;
    let mut text = serde_json::to_string_pretty(&report)?;
    text.push('\n');
    emit(args.out.as_ref(), &text)
}

fn cmd_generate(args: &GenerateArgs) -> anyhow::Result<()> {
    let spec = args.workload.spec()?;
    let work = generate_workload(&spec)?;
    SymbolsFile::from_workload(spec.alphabet, spec.kind, &work).write(&args.out)
}

fn cmd_encode(args: &EncodeArgs) -> anyhow::Result<()> {
    let file = SymbolsFile::read(&args.input)?;
    let params = file.mixtures()?;
    let stream = match args.codec {
        StreamCodec::Flash => {
            flash_codec::encode(&file.symbols, &params, &file.alphabet, file.approximator)?
        }
        StreamCodec::Table => {
            table::encode(&file.symbols, &params, &file.alphabet, file.approximator)?
        }
        StreamCodec::Gsm => {
            if params.iter().any(|p| p.k() != 1) {
                bail!(UsageError(
                    "the gsm codec needs single-component params".into()
                ));
            }
            let means: Vec<f64> = params.iter().map(|p| p.means()[0]).collect();
            let sigmas: Vec<f64> = params.iter().map(|p| p.stddevs()[0]).collect();
            let t = gsm::ScaleTable::new(file.alphabet.precision_bits(), file.approximator)?;
            gsm::encode(&file.symbols, &means, &sigmas, &t)?
        }
    };
    fs::write(&args.out, stream.to_bytes())
        .with_context(|| format!("writing {}", args.out.display()))
}

fn cmd_decode(args: &DecodeArgs) -> anyhow::Result<()> {
    let stream = read_stream(&args.input)?;
    let symbols = decode_stream(&stream, args.codec)?;
    io::write_symbols(&args.out, &symbols)
}

fn cmd_verify(args: &VerifyArgs) -> anyhow::Result<()> {
    let bytes =
        fs::read(&args.input).with_context(|| format!("reading {}", args.input.display()))?;
    let stream = EncodedStream::from_bytes(&bytes).map_err(Verify::from)?;
    let symbols = decode_stream(&stream, args.codec).map_err(Verify::from)?;
    let params = stream.params().map_err(Verify::from)?;
    let alphabet = stream.alphabet().map_err(Verify::from)?;
    let again = match args.codec {
        StreamCodec::Flash | StreamCodec::Table => {
            flash_codec::encode(&symbols, &params, &alphabet, stream.kind())
        }
        StreamCodec::Gsm => {
            let means: Vec<f64> = params.iter().map(|p| p.means()[0]).collect();
            let sigmas: Vec<f64> = params.iter().map(|p| p.stddevs()[0]).collect();
            gsm::ScaleTable::new(alphabet.precision_bits(), stream.kind())
                .and_then(|t| gsm::encode(&symbols, &means, &sigmas, &t))
        }
    }
    .map_err(Verify::from)?;
    if again.to_bytes() != bytes {
        return Err(Verify(gmmcodec::Error::Verification(
            "re-encoded stream differs from input".into(),
        ))
        .into());
    }
    println!("ok: {} symbols", symbols.len());
    Ok(())
}

fn cmd_accuracy(args: &AccuracyArgs) -> anyhow::Result<()> {
    if !(args.step > 0.0) || args.x_max < args.x_min {
        bail!(UsageError("need step > 0 and x_max >= x_min".into()));
    }
    let mut text = String::from(accuracy::CSV_HEADER);
    text.push('\n');
    for kind in ApproximatorKind::ALL {
        text.push_str(&accuracy::scan(kind, args.x_min, args.x_max, args.step).csv_line());
        text.push('\n');
    }
    emit(args.out.as_ref(), &text)
}

/// Failure of `verify`: any codec error there is a verification failure.
#[derive(Debug)]
struct Verify(gmmcodec::Error);

impl From<gmmcodec::Error> for Verify {
    fn from(e: gmmcodec::Error) -> Self {
        Verify(e)
    }
}

impl std::fmt::Display for Verify {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}", self.0)
    }
}

impl std::error::Error for Verify {}

fn exit_code(err: &anyhow::Error) -> u8 {
    if err.downcast_ref::<UsageError>().is_some() {
        return 2;
    }
    match err.downcast_ref::<gmmcodec::Error>() {
        Some(
            gmmcodec::Error::InvalidAlphabet(_)
            | gmmcodec::Error::ComponentCount { .. }
            | gmmcodec::Error::InvalidParams(_),
        ) => 2,
        _ => 1,
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::Bench(a) => cmd_bench(a),
        Command::Generate(a) => cmd_generate(a),
        Command::Encode(a) => cmd_encode(a),
        Command::Decode(a) => cmd_decode(a),
        Command::Verify(a) => cmd_verify(a),
        Command::Accuracy(a) => cmd_accuracy(a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("error: {err:#}");
            ExitCode::from(exit_code(&err))
        }
    }
}
