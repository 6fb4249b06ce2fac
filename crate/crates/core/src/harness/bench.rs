//! Timing and verification rig for the three codecs.
//!
//! Only entropy coding is timed; workload generation, table-independent
//! setup (the scale table is timed separately) and I/O are excluded.

use std::fmt;
use std::ops::Range;
use std::str::FromStr;
use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::workload::{
    generate_gsm_workload, generate_workload, GsmWorkload, Workload, WorkloadSpec,
};
use crate::baseline::{gsm, table};
use crate::cdf::ApproximatorKind;
use crate::error::{Error, Result};
use crate::flash_codec::{self, symbol_coding};
use crate::stream::EncodedStream;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Codec {
    Flash,
    Table,
    Gsm,
}

impl Codec {
    pub const ALL: [Codec; 3] = [Codec::Flash, Codec::Table, Codec::Gsm];
}

impl fmt::Display for Codec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Codec::Flash => "flash",
            Codec::Table => "table",
            Codec::Gsm => "gsm",
        })
    }
}

impl FromStr for Codec {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        match s {
            "flash" => Ok(Codec::Flash),
            "table" => Ok(Codec::Table),
            "gsm" => Ok(Codec::Gsm),
            other => Err(format!("unknown codec `{other}`")),
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CodecReport {
    pub codec: Codec,
    pub symbols: usize,
    /// Median wall time over all repeats, seconds.
    pub encode_time_s: f64,
    pub decode_time_s: f64,
    pub encode_symbols_per_second: f64,
    pub decode_symbols_per_second: f64,
    /// rANS payload only; headers and parameter blocks are excluded.
    pub payload_bits: u64,
    /// Sum of ideal code lengths under the quantized models.
    pub entropy_bits: f64,
    pub overhead_bits_per_symbol: f64,
    pub roundtrip_ok: bool,
    /// One-off setup cost (scale-table construction for gsm).
    #[serde(skip_serializing_if = "Option::is_none")]
    pub init_time_s: Option<f64>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Equivalence {
    /// `None` unless both the flash and table codecs ran.
    pub flash_table_payload_equal: Option<bool>,
    pub roundtrip_ok: bool,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Environment {
    pub threads: usize,
    pub chunks: usize,
    pub repeats: usize,
    pub os: String,
    pub arch: String,
    pub note: String,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct BenchReport {
    pub spec: WorkloadSpec,
    pub codecs: Vec<CodecReport>,
    pub equivalence: Equivalence,
    pub environment: Environment,
}

impl BenchReport {
    pub fn codec(&self, codec: Codec) -> Option<&CodecReport> {
        self.codecs.iter().find(|c| c.codec == codec)
    }
}

#[derive(Debug, Clone, Copy)]
pub struct BenchOptions {
    pub repeats: usize,
    pub threads: usize,
}

impl Default for BenchOptions {
    fn default() -> Self {
        BenchOptions {
            repeats: 10,
            threads: 1,
        }
    }
}

pub fn median(mut samples: Vec<f64>) -> f64 {
    if samples.is_empty() {
        return 0.0;
    }
    samples.sort_by(f64::total_cmp);
    let n = samples.len();
    if n % 2 == 1 {
        samples[n / 2]
    } else {
        0.5 * (samples[n / 2 - 1] + samples[n / 2])
    }
}

/// Runs `f` `repeats` times and returns the median time and the last output.
pub fn time_median<T>(repeats: usize, mut f: impl FnMut() -> Result<T>) -> Result<(f64, T)> {
    let mut times = Vec::with_capacity(repeats.max(1));
    let mut last = None;
    for _ in 0..repeats.max(1) {
        let t = Instant::now();
        let out = f()?;
        times.push(t.elapsed().as_secs_f64());
        last = Some(out);
    }
    Ok((median(times), last.expect("at least one run")))
}

struct Runner {
    pool: Option<rayon::ThreadPool>,
}

impl Runner {
    fn new(threads: usize) -> Result<Self> {
        let pool = if threads > 1 {
            Some(
                rayon::ThreadPoolBuilder::new()
                    .num_threads(threads)
                    .build()
                    .map_err(|e| Error::Verification(format!("thread pool: {e}")))?,
            )
        } else {
            None
        };
        Ok(Runner { pool })
    }

    fn map<T: Send>(
        &self,
        ranges: &[Range<usize>],
        f: impl Fn(&Range<usize>) -> Result<T> + Sync + Send,
    ) -> Result<Vec<T>> {
        match &self.pool {
            Some(pool) => pool.install(|| ranges.par_iter().map(&f).collect()),
            None => ranges.iter().map(f).collect(),
        }
    }
}

fn payload_bits(streams: &[EncodedStream]) -> u64 {
    streams.iter().map(|s| 8 * s.payload.len() as u64).sum()
}

fn mixture_entropy(streams: &[EncodedStream], symbols: &[i32]) -> Result<f64> {
    let mut total = 0.0;
    let mut offset = 0;
    for s in streams {
        let alphabet = s.alphabet()?;
        let params = s.params()?;
        for (p, &y) in params.iter().zip(&symbols[offset..]) {
            let j = alphabet
                .index_of(y)
                .expect("encoded symbols are in the alphabet");
            total += symbol_coding(p, &alphabet, j, s.kind()).bits();
        }
        offset += params.len();
    }
    Ok(total)
}

fn report(
    codec: Codec,
    symbols: usize,
    enc: f64,
    dec: f64,
    payload_bits: u64,
    entropy_bits: f64,
    roundtrip_ok: bool,
) -> CodecReport {
    let rate = |t: f64| {
        if t > 0.0 {
            symbols as f64 / t
        } else {
            f64::INFINITY
        }
    };
    CodecReport {
        codec,
        symbols,
        encode_time_s: enc,
        decode_time_s: dec,
        encode_symbols_per_second: rate(enc),
        decode_symbols_per_second: rate(dec),
        payload_bits,
        entropy_bits,
        overhead_bits_per_symbol: if symbols > 0 {
            (payload_bits as f64 - entropy_bits) / symbols as f64
        } else {
            0.0
        },
        roundtrip_ok,
        init_time_s: None,
    }
}

type EncodeFn = fn(
    &[i32],
    &[crate::cdf::MixtureParams],
    &crate::cdf::SymbolAlphabet,
    ApproximatorKind,
) -> Result<EncodedStream>;
type DecodeFn = fn(&EncodedStream) -> Result<Vec<i32>>;

fn run_mixture_codec(
    codec: Codec,
    spec: &WorkloadSpec,
    work: &Workload,
    runner: &Runner,
    repeats: usize,
) -> Result<(CodecReport, Vec<EncodedStream>)> {
    let (encode, decode): (EncodeFn, DecodeFn) = match codec {
        Codec::Flash => (flash_codec::encode, flash_codec::decode),
        Codec::Table => (table::encode, table::decode),
        Codec::Gsm => unreachable!("gsm has its own runner"),
    };
    let ranges = spec.chunk_ranges();
    let (enc_t, streams) = time_median(repeats, || {
        runner.map(&ranges, |r| {
            encode(
                &work.symbols[r.clone()],
                &work.params[r.clone()],
                &spec.alphabet,
                spec.kind,
            )
        })
    })?;
    let (dec_t, decoded) = time_median(repeats, || runner.map_streams(&streams, decode))?;
    let roundtrip_ok = decoded.concat() == work.symbols;
    let entropy = mixture_entropy(&streams, &work.symbols)?;
    let rep = report(
        codec,
        work.symbols.len(),
        enc_t,
        dec_t,
        payload_bits(&streams),
        entropy,
        roundtrip_ok,
    );
    Ok((rep, streams))
}

impl Runner {
    fn map_streams(&self, streams: &[EncodedStream], f: DecodeFn) -> Result<Vec<Vec<i32>>> {
        match &self.pool {
            Some(pool) => pool.install(|| streams.par_iter().map(f).collect()),
            None => streams.iter().map(f).collect(),
        }
    }
}

fn run_gsm(spec: &WorkloadSpec, runner: &Runner, repeats: usize) -> Result<CodecReport> {
    let p = spec.alphabet.precision_bits();
    let (init_t, scale_table) =
        time_median(1, || gsm::ScaleTable::new(p, ApproximatorKind::Exact))?;
    let work: GsmWorkload = generate_gsm_workload(spec, &scale_table)?;
    let ranges = spec.chunk_ranges();
    let (enc_t, streams) = time_median(repeats, || {
        runner.map(&ranges, |r| {
            gsm::encode(
                &work.symbols[r.clone()],
                &work.means[r.clone()],
                &work.sigmas[r.clone()],
                &scale_table,
            )
        })
    })?;
    let (dec_t, decoded) = time_median(repeats, || {
        runner.map(
            &(0..streams.len()).map(|i| i..i + 1).collect::<Vec<_>>(),
            |r| gsm::decode(&streams[r.start], &scale_table),
        )
    })?;
    let mut entropy = 0.0;
    for ((&y, &m), &s) in work.symbols.iter().zip(&work.means).zip(&work.sigmas) {
        let coded = crate::cdf::MixtureParams::single(m, s)?;
        entropy += scale_table.symbol_bits(coded.means()[0], coded.stddevs()[0], y)?;
    }
    if scale_table.rows_built() != gsm::SCALE_LEVELS as u64 {
        return Err(Error::Verification(
            "scale table rebuilt during coding".into(),
        ));
    }
    let mut rep = report(
        Codec::Gsm,
        work.symbols.len(),
        enc_t,
        dec_t,
        payload_bits(&streams),
        entropy,
        decoded.concat() == work.symbols,
    );
    rep.init_time_s = Some(init_t);
    Ok(rep)
}

/// Generates the workload, runs each codec `repeats` times, and verifies
/// round trips and flash/table payload equality. Any verification failure
/// is an error.
pub fn run_bench(spec: &WorkloadSpec, codecs: &[Codec], opts: BenchOptions) -> Result<BenchReport> {
    let runner = Runner::new(opts.threads)?;
    let needs_mixture = codecs.iter().any(|c| *c != Codec::Gsm);
    let work = if needs_mixture {
        Some(generate_workload(spec)?)
    } else {
        None
    };

    let mut reports = Vec::new();
    let mut payloads: Vec<(Codec, Vec<Vec<u8>>)> = Vec::new();
    for &codec in codecs {
        match codec {
            Codec::Flash | Codec::Table => {
                let work = work.as_ref().expect("mixture workload generated");
                let (rep, streams) = run_mixture_codec(codec, spec, work, &runner, opts.repeats)?;
                payloads.push((codec, streams.into_iter().map(|s| s.payload).collect()));
                reports.push(rep);
            }
            Codec::Gsm => reports.push(run_gsm(spec, &runner, opts.repeats)?),
        }
    }

    let find = |c: Codec| payloads.iter().find(|(k, _)| *k == c).map(|(_, p)| p);
    let flash_table_payload_equal = match (find(Codec::Flash), find(Codec::Table)) {
        (Some(a), Some(b)) => Some(a == b),
        _ => None,
    };
    let roundtrip_ok = reports.iter().all(|r| r.roundtrip_ok);
    let out = BenchReport {
        spec: *spec,
        codecs: reports,
        equivalence: Equivalence {
            flash_table_payload_equal,
            roundtrip_ok,
        },
        environment: Environment {
            threads: opts.threads,
            chunks: spec.chunk_ranges().len(),
            repeats: opts.repeats.max(1),
            os: std::env::consts::OS.to_string(),
            arch: std::env::consts::ARCH.to_string(),
            note: "synthetic workload; default size is an order-of-magnitude stand-in for one \
                   image latent; timings cover entropy coding only"
                .to_string(),
        },
    };
    if !roundtrip_ok {
        return Err(Error::Verification(
            "decoded symbols differ from input".into(),
        ));
    }
    if flash_table_payload_equal == Some(false) {
        return Err(Error::Verification(
            "flash and table payloads differ".into(),
        ));
    }
    Ok(out)
}
