//! Table-free mixture codec.
//!
//! The encoder evaluates exactly two boundaries per symbol. The decoder
//! finds each symbol by bisecting the boundary function against the rANS
//! slot, so no cumulative-frequency table is ever materialized. Both sides
//! call [`quantized_boundary`] on parameters decoded from the same `f32`
//! block, which is what makes the search exact.

use crate::cdf::{quantized_boundary, ApproximatorKind, MixtureParams, SymbolAlphabet};
use crate::error::{Error, Result};
use crate::rans::{RansDecoder, RansEncoder, SymbolCoding};
use crate::stream::{decode_params_block, encode_params_block, EncodedStream, StreamHeader};

/// Work counters collected while decoding.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct DecodeStats {
    /// Calls to the boundary function, including the trivial `j = 0` and
    /// `j = N` endpoints.
    pub boundary_evals: u64,
}

/// `(cum, freq)` of symbol index `j`.
#[inline]
pub fn symbol_coding(
    params: &MixtureParams,
    alphabet: &SymbolAlphabet,
    j: u32,
    kind: ApproximatorKind,
) -> SymbolCoding {
    let lo = quantized_boundary(params, alphabet, j, kind);
    let hi = quantized_boundary(params, alphabet, j + 1, kind);
    SymbolCoding::new(lo, hi - lo, alphabet.precision_bits())
}

/// Index `j` with `B(j) <= slot < B(j + 1)`, found by bisection.
/// `evals` is incremented once per boundary probe.
#[inline]
pub fn locate_slot(
    params: &MixtureParams,
    alphabet: &SymbolAlphabet,
    kind: ApproximatorKind,
    slot: u32,
    evals: &mut u64,
) -> u32 {
    let (mut lo, mut hi) = (0u32, alphabet.size());
    while hi - lo > 1 {
        let mid = lo + (hi - lo) / 2;
        *evals += 1;
        if quantized_boundary(params, alphabet, mid, kind) <= slot {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    lo
}

/// Ideal code length of `y` under the quantized model.
pub fn symbol_bits(
    params: &MixtureParams,
    alphabet: &SymbolAlphabet,
    kind: ApproximatorKind,
    y: i32,
) -> Result<f64> {
    let j = alphabet.index_of(y).ok_or(Error::SymbolOutOfAlphabet {
        index: 0,
        symbol: y,
    })?;
    Ok(symbol_coding(params, alphabet, j, kind).bits())
}

pub(crate) fn check_symbols(symbols: &[i32], alphabet: &SymbolAlphabet) -> Result<Vec<u32>> {
    symbols
        .iter()
        .enumerate()
        .map(|(index, &symbol)| {
            alphabet
                .index_of(symbol)
                .ok_or(Error::SymbolOutOfAlphabet { index, symbol })
        })
        .collect()
}

/// Serializes `params` and returns the header, the block, and the mixtures
/// exactly as a decoder will reconstruct them.
pub(crate) fn prepare(
    symbols: &[i32],
    params: &[MixtureParams],
    alphabet: &SymbolAlphabet,
    kind: ApproximatorKind,
) -> Result<(StreamHeader, Vec<f32>, Vec<MixtureParams>, Vec<u32>)> {
    if symbols.len() != params.len() {
        return Err(Error::LengthMismatch {
            symbols: symbols.len(),
            params: params.len(),
        });
    }
    let indices = check_symbols(symbols, alphabet)?;
    let (k, block) = encode_params_block(params)?;
    let header = StreamHeader::new(alphabet, kind, k, symbols.len())?;
    let coding_params = decode_params_block(&block, k)?;
    Ok((header, block, coding_params, indices))
}

/// Encodes `symbols[i]` under `params[i]`.
pub fn encode(
    symbols: &[i32],
    params: &[MixtureParams],
    alphabet: &SymbolAlphabet,
    kind: ApproximatorKind,
) -> Result<EncodedStream> {
    let (header, params_block, coding_params, indices) = prepare(symbols, params, alphabet, kind)?;
    let mut enc = RansEncoder::with_capacity(symbols.len() / 2 + 16);
    for (p, &j) in coding_params.iter().zip(&indices).rev() {
        enc.put(symbol_coding(p, alphabet, j, kind));
    }
    Ok(EncodedStream {
        header,
        params_block,
        payload: enc.finish(),
    })
}

pub fn decode(stream: &EncodedStream) -> Result<Vec<i32>> {
    decode_with_stats(stream).map(|(symbols, _)| symbols)
}

pub fn decode_with_stats(stream: &EncodedStream) -> Result<(Vec<i32>, DecodeStats)> {
    let alphabet = stream.alphabet()?;
    let kind = stream.kind();
    let params = stream.params()?;
    if params.len() != stream.symbol_count() {
        return Err(Error::TruncatedStream);
    }
    let p_bits = alphabet.precision_bits();

    let mut dec = RansDecoder::new(&stream.payload)?;
    let mut evals = 0u64;
    let mut out = Vec::with_capacity(params.len());
    for p in &params {
        if dec.starved() {
            return Err(Error::TruncatedStream);
        }
        let slot = dec.peek(p_bits);
        let j = locate_slot(p, &alphabet, kind, slot, &mut evals);
        let coding = symbol_coding(p, &alphabet, j, kind);
        evals += 2;
        dec.advance(coding);
        out.push(alphabet.symbol_at(j));
    }
    dec.finish()?;
    Ok((
        out,
        DecodeStats {
            boundary_evals: evals,
        },
    ))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cdf::SIGMA_MIN;

    fn alphabet(n: u32, p: u32) -> SymbolAlphabet {
        SymbolAlphabet::centered(n, p).unwrap()
    }

    #[test]
    fn empty_sequence() {
        let a = alphabet(16, 12);
        let s = encode(&[], &[], &a, ApproximatorKind::Logistic).unwrap();
        assert_eq!(s.header.symbol_count, 0);
        assert_eq!(s.payload.len(), 4);
        assert!(decode(&s).unwrap().is_empty());
    }

    #[test]
    fn near_certain_symbol_is_almost_free() {
        let y = 5;
        let a = SymbolAlphabet::new(y - 8, y + 8, 16).unwrap();
        let p = MixtureParams::single(f64::from(y), SIGMA_MIN).unwrap();
        for kind in ApproximatorKind::ALL {
            let limit = if kind == ApproximatorKind::Logistic {
                0.002
            } else {
                0.001
            };
            assert!(symbol_bits(&p, &a, kind, y).unwrap() < limit);
            let s = encode(&[y], &[p], &a, kind).unwrap();
            assert!(s.payload.len() <= 5);
            assert_eq!(decode(&s).unwrap(), [y]);
        }
    }

    #[test]
    fn two_symbol_alphabet_probes_once() {
        let a = SymbolAlphabet::new(0, 1, 8).unwrap();
        let p = MixtureParams::single(0.3, 1.0).unwrap();
        let mut evals = 0;
        let got = locate_slot(&p, &a, ApproximatorKind::Exact, 200, &mut evals);
        assert_eq!(evals, 1);
        let b1 = quantized_boundary(&p, &a, 1, ApproximatorKind::Exact);
        assert_eq!(got, u32::from(200 >= b1));
        let syms = [0, 1, 1, 0, 1];
        let s = encode(&syms, &[p; 5], &a, ApproximatorKind::Exact).unwrap();
        assert_eq!(decode(&s).unwrap(), syms);
    }

    #[test]
    fn uniform_coding_costs_log2_n() {
        for log_n in 1..=8 {
            let c = SymbolCoding::new(0, 1 << (16 - log_n), 16);
            assert_eq!(c.bits(), f64::from(log_n));
        }
    }

    #[test]
    fn out_of_alphabet_is_refused() {
        let a = alphabet(16, 12);
        let p = MixtureParams::single(0.0, 1.0).unwrap();
        let err = encode(&[0, 3, 99], &[p; 3], &a, ApproximatorKind::Exact).unwrap_err();
        assert_eq!(
            err,
            Error::SymbolOutOfAlphabet {
                index: 2,
                symbol: 99
            }
        );
        assert!(symbol_bits(&p, &a, ApproximatorKind::Exact, -9).is_err());
    }

    #[test]
    fn length_mismatch() {
        let a = alphabet(16, 12);
        let p = MixtureParams::single(0.0, 1.0).unwrap();
        assert!(matches!(
            encode(&[0, 1], &[p], &a, ApproximatorKind::Exact),
            Err(Error::LengthMismatch { .. })
        ));
    }

    #[test]
    fn search_agrees_with_linear_scan() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(11);
        for _ in 0..300 {
            let n = rng.gen_range(2..600);
            let a = alphabet(n, 16);
            let k = rng.gen_range(1..=4);
            let w: Vec<f64> = (0..k).map(|_| rng.gen_range(0.01..1.0)).collect();
            let mu: Vec<f64> = (0..k).map(|_| rng.gen_range(-20.0..20.0)).collect();
            let s: Vec<f64> = (0..k).map(|_| rng.gen_range(0.05..30.0)).collect();
            let p = MixtureParams::new(&w, &mu, &s).unwrap();
            let kind = ApproximatorKind::ALL[rng.gen_range(0..4)];
            let bounds: Vec<u32> = (0..=a.size())
                .map(|j| quantized_boundary(&p, &a, j, kind))
                .collect();
            for _ in 0..20 {
                let slot = rng.gen_range(0..a.total());
                let linear = bounds
                    .windows(2)
                    .position(|b| b[0] <= slot && slot < b[1])
                    .unwrap();
                let mut evals = 0;
                assert_eq!(locate_slot(&p, &a, kind, slot, &mut evals) as usize, linear);
            }
        }
    }

    #[test]
    fn probes_per_symbol() {
        let kind = ApproximatorKind::Logistic;
        for log_n in 1..=12 {
            let a = alphabet(1 << log_n, 16);
            let p = MixtureParams::new(&[0.3, 0.7], &[-3.0, 4.0], &[2.0, 5.0]).unwrap();
            let syms: Vec<i32> = (0..64).map(|i| a.symbol_at(i % a.size())).collect();
            let s = encode(&syms, &vec![p; 64], &a, kind).unwrap();
            let (back, stats) = decode_with_stats(&s).unwrap();
            assert_eq!(back, syms);
            assert_eq!(stats.boundary_evals, 64 * (2 + log_n));
        }
    }

    #[test]
    fn truncated_payload_is_detected() {
        let a = alphabet(256, 16);
        let p = MixtureParams::single(0.0, 40.0).unwrap();
        let syms: Vec<i32> = (0..500).map(|i| (i * 37 % 200) - 100).collect();
        let s = encode(&syms, &vec![p; syms.len()], &a, ApproximatorKind::Exact).unwrap();
        for cut in [1, 2, 10, s.payload.len() - 4] {
            let mut t = s.clone();
            t.payload.truncate(s.payload.len() - cut);
            assert_eq!(decode(&t), Err(Error::TruncatedStream), "cut {cut}");
        }
    }
}
