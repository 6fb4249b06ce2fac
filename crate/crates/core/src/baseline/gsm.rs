//! Single-Gaussian codec with a prebuilt scale table.
//!
//! Means are removed by coding the residual `y - round(mu)`, and each
//! standard deviation is rounded up to one of 64 log-spaced scales, so only
//! 64 boundary rows ever need to be built. They are built once, up front.

use crate::cdf::{
    quantized_boundary, std_normal_cdf, ApproximatorKind, MixtureParams, SymbolAlphabet,
    MAX_ALPHABET,
};
use crate::error::{Error, Result};
use crate::rans::{RansDecoder, RansEncoder, SymbolCoding};
use crate::stream::{decode_params_block, encode_params_block, EncodedStream, StreamHeader};

pub const SCALE_LEVELS: usize = 64;
pub const SCALE_MIN: f64 = 0.11;
pub const SCALE_MAX: f64 = 256.0;

#[derive(Debug, Clone)]
struct ScaleRow {
    alphabet: SymbolAlphabet,
    boundaries: Vec<u32>,
}

impl ScaleRow {
    fn half_width(&self) -> i32 {
        self.alphabet.y_max()
    }

    fn coding(&self, residual: i32) -> Option<SymbolCoding> {
        let j = self.alphabet.index_of(residual)? as usize;
        let b = &self.boundaries;
        Some(SymbolCoding::new(
            b[j],
            b[j + 1] - b[j],
            self.alphabet.precision_bits(),
        ))
    }

    /// Residual whose interval contains `slot`.
    fn locate(&self, slot: u32) -> i32 {
        let j = self.boundaries.partition_point(|&b| b <= slot) - 1;
        self.alphabet.symbol_at(j as u32)
    }
}

/// The 64 prebuilt zero-mean rows.
#[derive(Debug, Clone)]
pub struct ScaleTable {
    kind: ApproximatorKind,
    precision_bits: u32,
    scales: [f64; SCALE_LEVELS],
    rows: Vec<ScaleRow>,
    rows_built: u64,
}

/// Scale `i` of the table: `exp(ln 0.11 + i (ln 256 - ln 0.11) / 63)`.
pub fn scale_levels() -> [f64; SCALE_LEVELS] {
    let (lo, hi) = (SCALE_MIN.ln(), SCALE_MAX.ln());
    let step = (hi - lo) / (SCALE_LEVELS - 1) as f64;
    let mut out = [0.0; SCALE_LEVELS];
    for (i, s) in out.iter_mut().enumerate() {
        *s = (lo + i as f64 * step).exp();
    }
    out[0] = SCALE_MIN;
    out[SCALE_LEVELS - 1] = SCALE_MAX;
    out
}

/// Smallest `z` (to 1e-9) with `Phi(-z) < 2^-(P+1)`.
pub fn tail_bound(precision_bits: u32) -> f64 {
    let target = (-(f64::from(precision_bits) + 1.0)).exp2();
    let (mut lo, mut hi) = (0.0f64, 40.0f64);
    while hi - lo > 1e-9 {
        let mid = 0.5 * (lo + hi);
        if std_normal_cdf(-mid, ApproximatorKind::Exact) < target {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    hi
}

impl ScaleTable {
    /// Builds all 64 rows at precision `2^P`.
    ///
    /// Row `s` covers residuals `-A_s..=A_s` with `A_s = ceil(sigma_s * z)`,
    /// capped so that `2 A_s + 1` stays within the alphabet limits for `P`.
    pub fn new(precision_bits: u32, kind: ApproximatorKind) -> Result<Self> {
        let z = tail_bound(precision_bits);
        let scales = scale_levels();
        // m > 2N with N = 2A + 1
        let m = 1i64 << precision_bits.min(30);
        let cap = ((m / 4) - 1).min(i64::from(MAX_ALPHABET / 2) - 1).max(1);
        let mut rows = Vec::with_capacity(SCALE_LEVELS);
        for &sigma in &scales {
            let half = ((sigma * z).ceil() as i64).clamp(1, cap) as i32;
            let alphabet = SymbolAlphabet::new(-half, half, precision_bits)?;
            let params = MixtureParams::single(0.0, sigma)?;
            let boundaries = (0..=alphabet.size())
                .map(|j| quantized_boundary(&params, &alphabet, j, kind))
                .collect();
            rows.push(ScaleRow {
                alphabet,
                boundaries,
            });
        }
        Ok(ScaleTable {
            kind,
            precision_bits,
            scales,
            rows,
            rows_built: SCALE_LEVELS as u64,
        })
    }

    pub fn scales(&self) -> &[f64; SCALE_LEVELS] {
        &self.scales
    }

    pub fn kind(&self) -> ApproximatorKind {
        self.kind
    }

    pub fn precision_bits(&self) -> u32 {
        self.precision_bits
    }

    /// Number of boundary rows ever built by this table.
    pub fn rows_built(&self) -> u64 {
        self.rows_built
    }

    /// `A_s` for every scale.
    pub fn half_widths(&self) -> Vec<i32> {
        self.rows.iter().map(ScaleRow::half_width).collect()
    }

    pub fn row_boundaries(&self, scale_index: usize) -> &[u32] {
        &self.rows[scale_index].boundaries
    }

    /// Index of the smallest scale `>= sigma` (the last scale for anything
    /// larger than 256).
    pub fn scale_index(&self, sigma: f64) -> usize {
        self.scales
            .partition_point(|&s| s < sigma)
            .min(SCALE_LEVELS - 1)
    }

    /// Residual in row `scale_index` whose interval contains `slot`.
    pub fn residual_for_slot(&self, scale_index: usize, slot: u32) -> i32 {
        self.rows[scale_index].locate(slot)
    }

    /// Ideal code length of `y` given `(mean, sigma)`.
    pub fn symbol_bits(&self, mean: f64, sigma: f64, y: i32) -> Result<f64> {
        let row = &self.rows[self.scale_index(sigma)];
        let r = residual(y, mean).ok_or(Error::SymbolOutOfAlphabet {
            index: 0,
            symbol: y,
        })?;
        row.coding(r)
            .map(|c| c.bits())
            .ok_or(Error::SymbolOutOfAlphabet {
                index: 0,
                symbol: y,
            })
    }

    /// Alphabet recorded in stream headers: the widest residual range.
    fn header_alphabet(&self) -> SymbolAlphabet {
        self.rows[SCALE_LEVELS - 1].alphabet
    }
}

/// Integer mean shift applied before coding.
#[inline]
pub fn mean_shift(mean: f64) -> i64 {
    mean.round() as i64
}

#[inline]
fn residual(y: i32, mean: f64) -> Option<i32> {
    i32::try_from(i64::from(y) - mean_shift(mean)).ok()
}

fn single_params(means: &[f64], sigmas: &[f64]) -> Result<Vec<MixtureParams>> {
    means
        .iter()
        .zip(sigmas)
        .map(|(&m, &s)| MixtureParams::single(m, s))
        .collect()
}

pub fn encode(
    symbols: &[i32],
    means: &[f64],
    sigmas: &[f64],
    table: &ScaleTable,
) -> Result<EncodedStream> {
    if symbols.len() != means.len() || symbols.len() != sigmas.len() {
        return Err(Error::LengthMismatch {
            symbols: symbols.len(),
            params: means.len().min(sigmas.len()),
        });
    }
    let (k, params_block) = encode_params_block(&single_params(means, sigmas)?)?;
    let coding_params = decode_params_block(&params_block, k)?;
    let header = StreamHeader::new(&table.header_alphabet(), table.kind, k, symbols.len())?;

    let mut codings = Vec::with_capacity(symbols.len());
    for (index, (&y, p)) in symbols.iter().zip(&coding_params).enumerate() {
        let row = &table.rows[table.scale_index(p.stddevs()[0])];
        let coding = residual(y, p.means()[0])
            .and_then(|r| row.coding(r))
            .ok_or(Error::SymbolOutOfAlphabet { index, symbol: y })?;
        codings.push(coding);
    }
    let mut enc = RansEncoder::with_capacity(symbols.len() / 2 + 16);
    for &c in codings.iter().rev() {
        enc.put(c);
    }
    Ok(EncodedStream {
        header,
        params_block,
        payload: enc.finish(),
    })
}

pub fn decode(stream: &EncodedStream, table: &ScaleTable) -> Result<Vec<i32>> {
    let h = &stream.header;
    if h.k != 1 {
        return Err(Error::HeaderMismatch(format!(
            "single-Gaussian stream must have K = 1, got {}",
            h.k
        )));
    }
    if u32::from(h.precision_bits) != table.precision_bits || h.approximator != table.kind {
        return Err(Error::HeaderMismatch(
            "stream precision or approximator differs from the scale table".into(),
        ));
    }
    let params = stream.params()?;
    if params.len() != stream.symbol_count() {
        return Err(Error::TruncatedStream);
    }
    let mut dec = RansDecoder::new(&stream.payload)?;
    let mut out = Vec::with_capacity(params.len());
    for p in &params {
        if dec.starved() {
            return Err(Error::TruncatedStream);
        }
        let row = &table.rows[table.scale_index(p.stddevs()[0])];
        let r = row.locate(dec.peek(table.precision_bits));
        dec.advance(row.coding(r).expect("located residual is in the row"));
        let y = i64::from(r) + mean_shift(p.means()[0]);
        out.push(i32::try_from(y).map_err(|_| Error::CorruptStream("decoded symbol overflows"))?);
    }
    dec.finish()?;
    Ok(out)
}
