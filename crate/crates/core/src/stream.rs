//! Container format shared by all codecs.
//!
//! ```text
//! offset  size  field
//!      0     4  magic "FGMM"
//!      4     1  version (1)
//!      5     1  approximator code
//!      6     1  precision bits P
//!      7     1  components K
//!      8     2  y_min (i16)
//!     10     2  y_max (i16)
//!     12     4  symbol count (u32)
//!     16   12K  per symbol: w_0..w_{K-1}, mu_0.., sigma_0.. as f32
//!      …     …  rANS payload (rest of the file)
//! ```
//!
//! Everything is little-endian.

use crate::cdf::{ApproximatorKind, MixtureParams, SymbolAlphabet, MAX_COMPONENTS};
use crate::error::{Error, Result};

pub const MAGIC: [u8; 4] = *b"FGMM";
pub const VERSION: u8 = 1;
pub const HEADER_LEN: usize = 16;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct StreamHeader {
    pub approximator: ApproximatorKind,
    pub precision_bits: u8,
    pub k: u8,
    pub y_min: i16,
    pub y_max: i16,
    pub symbol_count: u32,
}

impl StreamHeader {
    pub fn new(
        alphabet: &SymbolAlphabet,
        kind: ApproximatorKind,
        k: usize,
        symbol_count: usize,
    ) -> Result<Self> {
        if k == 0 || k > MAX_COMPONENTS {
            return Err(Error::ComponentCount {
                got: k,
                max: MAX_COMPONENTS,
            });
        }
        let symbol_count = u32::try_from(symbol_count)
            .map_err(|_| Error::InvalidParams("more than 2^32 - 1 symbols"))?;
        Ok(StreamHeader {
            approximator: kind,
            precision_bits: alphabet.precision_bits() as u8,
            k: k as u8,
            // SymbolAlphabet guarantees both bounds fit in 16 bits.
            y_min: alphabet.y_min() as i16,
            y_max: alphabet.y_max() as i16,
            symbol_count,
        })
    }

    pub fn alphabet(&self) -> Result<SymbolAlphabet> {
        SymbolAlphabet::new(
            i32::from(self.y_min),
            i32::from(self.y_max),
            u32::from(self.precision_bits),
        )
        .map_err(|e| Error::HeaderMismatch(e.to_string()))
    }

    /// Number of `f32` values in the parameter block.
    pub fn params_len(&self) -> usize {
        3 * usize::from(self.k) * self.symbol_count as usize
    }

    pub fn to_bytes(&self) -> [u8; HEADER_LEN] {
        let mut out = [0u8; HEADER_LEN];
        out[..4].copy_from_slice(&MAGIC);
        out[4] = VERSION;
        out[5] = self.approximator.code();
        out[6] = self.precision_bits;
        out[7] = self.k;
        out[8..10].copy_from_slice(&self.y_min.to_le_bytes());
        out[10..12].copy_from_slice(&self.y_max.to_le_bytes());
        out[12..16].copy_from_slice(&self.symbol_count.to_le_bytes());
        out
    }

    pub fn from_bytes(bytes: &[u8]) -> Result<Self> {
        if bytes.len() < HEADER_LEN {
            return Err(Error::TruncatedStream);
        }
        if bytes[..4] != MAGIC {
            return Err(Error::HeaderMismatch("bad magic".into()));
        }
        if bytes[4] != VERSION {
            return Err(Error::HeaderMismatch(format!(
                "unsupported version {}",
                bytes[4]
            )));
        }
        let approximator = ApproximatorKind::from_code(bytes[5])
            .ok_or_else(|| Error::HeaderMismatch(format!("unknown approximator {}", bytes[5])))?;
        let k = bytes[7];
        if k == 0 || usize::from(k) > MAX_COMPONENTS {
            return Err(Error::HeaderMismatch(format!("bad component count {k}")));
        }
        let header = StreamHeader {
            approximator,
            precision_bits: bytes[6],
            k,
            y_min: i16::from_le_bytes([bytes[8], bytes[9]]),
            y_max: i16::from_le_bytes([bytes[10], bytes[11]]),
            symbol_count: u32::from_le_bytes([bytes[12], bytes[13], bytes[14], bytes[15]]),
        };
        header.alphabet()?;
        Ok(header)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct EncodedStream {
    pub header: StreamHeader,
    pub params_block: Vec<f32>,
    pub payload: Vec<u8>,
}

impl EncodedStream {
    pub fn alphabet(&self) -> Result<SymbolAlphabet> {
        self.header.alphabet()
    }

    pub fn kind(&self) -> ApproximatorKind {
        self.header.approximator
    }

    pub fn symbol_count(&self) -> usize {
        self.header.symbol_count as usize
    }

    /// Decodes the parameter block into per-symbol mixtures.
    pub fn params(&self) -> Result<Vec<MixtureParams>> {
        decode_params_block(&self.params_block, usize::from(self.header.k))
    }

    pub fn to_bytes(&self) -> Vec<u8> {
        let mut out =
            Vec::with_capacity(HEADER_LEN + 4 * self.params_block.len() + self.payload.len());
        out.extend_from_slice(&self.header.to_bytes());
        for v in &self.params_block {
            out.extend_from_slice(&v.to_le_bytes());
        }
        out.extend_from_slice(&self.payload);
        out
    }

    pub fn from_bytes(bytes: &[u8]) -> Result<Self> {
        let header = StreamHeader::from_bytes(bytes)?;
        let params_bytes = 4 * header.params_len();
        let body = &bytes[HEADER_LEN..];
        if body.len() < params_bytes + 4 {
            return Err(Error::TruncatedStream);
        }
        let params_block = body[..params_bytes]
            .chunks_exact(4)
            .map(|c| f32::from_le_bytes([c[0], c[1], c[2], c[3]]))
            .collect();
        Ok(EncodedStream {
            header,
            params_block,
            payload: body[params_bytes..].to_vec(),
        })
    }
}

/// Serializes mixtures into a parameter block. All mixtures must share `K`.
pub fn encode_params_block(params: &[MixtureParams]) -> Result<(usize, Vec<f32>)> {
    let k = params.first().map_or(1, MixtureParams::k);
    let mut block = Vec::with_capacity(3 * k * params.len());
    for p in params {
        if p.k() != k {
            return Err(Error::InvalidParams("mixtures differ in component count"));
        }
        p.write_f32(&mut block);
    }
    Ok((k, block))
}

pub fn decode_params_block(block: &[f32], k: usize) -> Result<Vec<MixtureParams>> {
    if k == 0 || k > MAX_COMPONENTS {
        return Err(Error::ComponentCount {
            got: k,
            max: MAX_COMPONENTS,
        });
    }
    if block.len() % (3 * k) != 0 {
        return Err(Error::TruncatedStream);
    }
    block
        .chunks_exact(3 * k)
        .map(|c| {
            MixtureParams::from_f32(&c[..k], &c[k..2 * k], &c[2 * k..])
                .map_err(|_| Error::CorruptStream("invalid parameters in stream"))
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample_header() -> StreamHeader {
        let a = SymbolAlphabet::new(-300, 255, 16).unwrap();
        StreamHeader::new(&a, ApproximatorKind::AbramowitzStegun, 3, 70_000).unwrap()
    }

    #[test]
    fn header_layout() {
        let bytes = sample_header().to_bytes();
        assert_eq!(&bytes[..4], b"FGMM");
        assert_eq!(bytes[4], 1);
        assert_eq!(bytes[5], 2);
        assert_eq!(bytes[6], 16);
        assert_eq!(bytes[7], 3);
        assert_eq!(&bytes[8..10], &(-300i16).to_le_bytes());
        assert_eq!(&bytes[10..12], &255i16.to_le_bytes());
        assert_eq!(&bytes[12..16], &70_000u32.to_le_bytes());
        assert_eq!(StreamHeader::from_bytes(&bytes).unwrap(), sample_header());
    }

    #[test]
    fn header_rejects_garbage() {
        let good = sample_header().to_bytes();
        assert_eq!(
            StreamHeader::from_bytes(&good[..15]),
            Err(Error::TruncatedStream)
        );
        let mut bad = good;
        bad[0] = b'X';
        assert!(matches!(
            StreamHeader::from_bytes(&bad),
            Err(Error::HeaderMismatch(_))
        ));
        let mut bad = good;
        bad[4] = 2;
        assert!(matches!(
            StreamHeader::from_bytes(&bad),
            Err(Error::HeaderMismatch(_))
        ));
        let mut bad = good;
        bad[5] = 9;
        assert!(matches!(
            StreamHeader::from_bytes(&bad),
            Err(Error::HeaderMismatch(_))
        ));
        let mut bad = good;
        bad[7] = 5;
        assert!(matches!(
            StreamHeader::from_bytes(&bad),
            Err(Error::HeaderMismatch(_))
        ));
    }

    #[test]
    fn params_block_size() {
        let p = MixtureParams::new(&[0.2, 0.8], &[1.0, -2.5], &[0.5, 3.0]).unwrap();
        let (k, block) = encode_params_block(&[p; 7]).unwrap();
        assert_eq!(k, 2);
        assert_eq!(block.len() * 4, 12 * k * 7);
        let back = decode_params_block(&block, k).unwrap();
        assert_eq!(back.len(), 7);
        assert_eq!(back[3], p.round_to_f32());
    }

    proptest::proptest! {
        #[test]
        fn params_block_is_a_fixed_point(
            k in 1usize..=4,
            raw in proptest::collection::vec((0.0f64..1.0, -1e4f64..1e4, 0.0f64..300.0), 4),
        ) {
            let w: Vec<f64> = raw[..k].iter().map(|r| r.0 + 1e-3).collect();
            let mu: Vec<f64> = raw[..k].iter().map(|r| r.1).collect();
            let s: Vec<f64> = raw[..k].iter().map(|r| r.2).collect();
            let p = MixtureParams::new(&w, &mu, &s).unwrap();
            let (_, block) = encode_params_block(&[p]).unwrap();
            let again = decode_params_block(&block, k).unwrap();
            let sum: f64 = again[0].weights().iter().sum();
            proptest::prop_assert!((sum - 1.0).abs() <= 1e-6);
            let (_, block2) = encode_params_block(&again).unwrap();
            proptest::prop_assert_eq!(
                block.iter().map(|v| v.to_bits()).collect::<Vec<_>>(),
                block2.iter().map(|v| v.to_bits()).collect::<Vec<_>>()
            );
        }
    }

    #[test]
    fn mixed_k_rejected() {
        let a = MixtureParams::single(0.0, 1.0).unwrap();
        let b = MixtureParams::new(&[0.5, 0.5], &[0.0, 1.0], &[1.0, 1.0]).unwrap();
        assert!(encode_params_block(&[a, b]).is_err());
    }
}
