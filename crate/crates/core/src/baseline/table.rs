//! Table-building mixture codec.
//!
//! Materializes every boundary of every symbol's quantized CDF before coding,
//! at a cost of `K * |y| * (N - 1)` component evaluations per side. It uses
//! the same boundary function as [`crate::flash_codec`], so its payloads are
//! byte-identical; it exists as a correctness oracle and speed baseline.

use crate::cdf::{quantized_boundary, ApproximatorKind, MixtureParams, SymbolAlphabet};
use crate::error::{Error, Result};
use crate::flash_codec::prepare;
use crate::rans::{RansDecoder, RansEncoder, SymbolCoding};
use crate::stream::EncodedStream;

/// Rows materialized at a time while coding. Bounds memory at
/// `ROW_CHUNK * (N + 1)` boundaries without changing the work done.
pub const ROW_CHUNK: usize = 1024;

/// `(rows, N + 1)` matrix of quantized boundaries, row-major.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct CdfTable {
    width: usize,
    boundaries: Vec<u32>,
}

/// Work counters for table construction.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct TableStats {
    pub rows_built: u64,
    /// Non-trivial boundary evaluations times `K`.
    pub component_evals: u64,
}

impl CdfTable {
    pub fn rows(&self) -> usize {
        self.boundaries.len().checked_div(self.width).unwrap_or(0)
    }

    pub fn row(&self, i: usize) -> &[u32] {
        &self.boundaries[i * self.width..(i + 1) * self.width]
    }

    fn clear(&mut self, width: usize) {
        self.width = width;
        self.boundaries.clear();
    }

    fn push_rows(
        &mut self,
        params: &[MixtureParams],
        alphabet: &SymbolAlphabet,
        kind: ApproximatorKind,
        stats: &mut TableStats,
    ) -> Result<()> {
        let n = alphabet.size();
        let cells = params.len() * self.width;
        self.boundaries
            .try_reserve(cells)
            .map_err(|_| Error::ResourceExhausted(cells))?;
        for p in params {
            self.boundaries
                .extend((0..=n).map(|j| quantized_boundary(p, alphabet, j, kind)));
            stats.rows_built += 1;
            stats.component_evals += p.k() as u64 * u64::from(n - 1);
        }
        Ok(())
    }
}

/// Builds the full table for `params`.
pub fn build_table(
    params: &[MixtureParams],
    alphabet: &SymbolAlphabet,
    kind: ApproximatorKind,
) -> Result<CdfTable> {
    build_table_with_stats(params, alphabet, kind).map(|(t, _)| t)
}

pub fn build_table_with_stats(
    params: &[MixtureParams],
    alphabet: &SymbolAlphabet,
    kind: ApproximatorKind,
) -> Result<(CdfTable, TableStats)> {
    let mut table = CdfTable::default();
    let mut stats = TableStats::default();
    table.clear(alphabet.size() as usize + 1);
    table.push_rows(params, alphabet, kind, &mut stats)?;
    Ok((table, stats))
}

#[inline]
fn row_coding(row: &[u32], j: usize, precision_bits: u32) -> SymbolCoding {
    SymbolCoding::new(row[j], row[j + 1] - row[j], precision_bits)
}

pub fn encode(
    symbols: &[i32],
    params: &[MixtureParams],
    alphabet: &SymbolAlphabet,
    kind: ApproximatorKind,
) -> Result<EncodedStream> {
    encode_with_stats(symbols, params, alphabet, kind).map(|(s, _)| s)
}

pub fn encode_with_stats(
    symbols: &[i32],
    params: &[MixtureParams],
    alphabet: &SymbolAlphabet,
    kind: ApproximatorKind,
) -> Result<(EncodedStream, TableStats)> {
    let (header, params_block, coding_params, indices) = prepare(symbols, params, alphabet, kind)?;
    let p_bits = alphabet.precision_bits();
    let mut stats = TableStats::default();
    let mut table = CdfTable::default();
    let mut enc = RansEncoder::with_capacity(symbols.len() / 2 + 16);

    let starts: Vec<usize> = (0..coding_params.len()).step_by(ROW_CHUNK).collect();
    for &start in starts.iter().rev() {
        let end = (start + ROW_CHUNK).min(coding_params.len());
        table.clear(alphabet.size() as usize + 1);
        table.push_rows(&coding_params[start..end], alphabet, kind, &mut stats)?;
        for i in (start..end).rev() {
            let row = table.row(i - start);
            enc.put(row_coding(row, indices[i] as usize, p_bits));
        }
    }
    let stream = EncodedStream {
        header,
        params_block,
        payload: enc.finish(),
    };
    Ok((stream, stats))
}

pub fn decode(stream: &EncodedStream) -> Result<Vec<i32>> {
    decode_with_stats(stream).map(|(s, _)| s)
}

pub fn decode_with_stats(stream: &EncodedStream) -> Result<(Vec<i32>, TableStats)> {
    let alphabet = stream.alphabet()?;
    let kind = stream.kind();
    let params = stream.params()?;
    if params.len() != stream.symbol_count() {
        return Err(Error::TruncatedStream);
    }
    let p_bits = alphabet.precision_bits();
    let mut stats = TableStats::default();
    let mut table = CdfTable::default();
    let mut dec = RansDecoder::new(&stream.payload)?;
    let mut out = Vec::with_capacity(params.len());

    for chunk in params.chunks(ROW_CHUNK) {
        table.clear(alphabet.size() as usize + 1);
        table.push_rows(chunk, &alphabet, kind, &mut stats)?;
        for i in 0..chunk.len() {
            if dec.starved() {
                return Err(Error::TruncatedStream);
            }
            let row = table.row(i);
            let slot = dec.peek(p_bits);
            let j = row.partition_point(|&b| b <= slot) - 1;
            dec.advance(row_coding(row, j, p_bits));
            out.push(alphabet.symbol_at(j as u32));
        }
    }
    dec.finish()?;
    Ok((out, stats))
}
