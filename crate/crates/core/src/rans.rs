//! Byte-oriented rANS with a 32-bit state.
//!
//! The coder only sees `(cum, freq, precision)` triples. Symbols must be
//! pushed in reverse order; the decoder then reads the payload front to back.
//!
//! Payload layout: the final encoder state, most significant byte first,
//! followed by the renormalization bytes in reverse emission order.

use crate::error::{Error, Result};

/// Lower bound of the normalized state interval.
pub const RANS_L: u32 = 1 << 23;

/// Cumulative frequency and frequency of one symbol at precision `2^P`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SymbolCoding {
    pub cum: u32,
    pub freq: u32,
    pub precision_bits: u32,
}

impl SymbolCoding {
    #[inline]
    pub fn new(cum: u32, freq: u32, precision_bits: u32) -> Self {
        debug_assert!(precision_bits <= 16);
        debug_assert!(freq >= 1, "zero frequency");
        debug_assert!(cum + freq <= 1 << precision_bits);
        SymbolCoding {
            cum,
            freq,
            precision_bits,
        }
    }

    /// Ideal code length `-log2(freq / m)` in bits.
    pub fn bits(&self) -> f64 {
        f64::from(self.precision_bits) - f64::from(self.freq).log2()
    }
}

/// One encoding step without renormalization:
/// `floor(x / freq) * 2^P + cum + x mod freq`.
#[inline]
pub fn coding_step(x: u32, s: SymbolCoding) -> u32 {
    ((x / s.freq) << s.precision_bits) + (x % s.freq) + s.cum
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RansEncoder {
    x: u32,
    scratch: Vec<u8>,
}

impl Default for RansEncoder {
    fn default() -> Self {
        Self::new()
    }
}

impl RansEncoder {
    pub fn new() -> Self {
        RansEncoder {
            x: RANS_L,
            scratch: Vec::new(),
        }
    }

    pub fn with_capacity(bytes: usize) -> Self {
        RansEncoder {
            x: RANS_L,
            scratch: Vec::with_capacity(bytes),
        }
    }

    #[inline]
    pub fn state(&self) -> u32 {
        self.x
    }

    /// Pushes one symbol.
    ///
    /// # Panics
    ///
    /// If `s.freq == 0`; a zero frequency means the model is broken.
    #[inline]
    pub fn put(&mut self, s: SymbolCoding) {
        assert!(s.freq != 0, "rANS cannot code a zero-frequency symbol");
        let x_max = ((RANS_L >> s.precision_bits) << 8) * s.freq;
        let mut x = self.x;
        while x >= x_max {
            self.scratch.push(x as u8);
            x >>= 8;
        }
        self.x = coding_step(x, s);
        debug_assert!(self.x >= RANS_L);
    }

    /// Flushes the state and returns the payload.
    pub fn finish(mut self) -> Vec<u8> {
        self.scratch.extend_from_slice(&self.x.to_le_bytes());
        self.scratch.reverse();
        self.scratch
    }
}

#[derive(Debug, Clone)]
pub struct RansDecoder<'a> {
    x: u32,
    payload: &'a [u8],
    cursor: usize,
    starved: bool,
}

impl<'a> RansDecoder<'a> {
    pub fn new(payload: &'a [u8]) -> Result<Self> {
        let head: [u8; 4] = payload
            .get(..4)
            .and_then(|h| h.try_into().ok())
            .ok_or(Error::TruncatedStream)?;
        Ok(RansDecoder {
            x: u32::from_be_bytes(head),
            payload,
            cursor: 4,
            starved: false,
        })
    }

    #[inline]
    pub fn state(&self) -> u32 {
        self.x
    }

    #[inline]
    pub fn cursor(&self) -> usize {
        self.cursor
    }

    /// True once renormalization wanted a byte the payload did not have.
    /// Decoding another symbol after that point would read garbage.
    #[inline]
    pub fn starved(&self) -> bool {
        self.starved
    }

    /// The slot `x mod 2^P` identifying the next symbol.
    #[inline]
    pub fn peek(&self, precision_bits: u32) -> u32 {
        self.x & ((1 << precision_bits) - 1)
    }

    /// Consumes the symbol whose interval contains the current slot.
    #[inline]
    pub fn advance(&mut self, s: SymbolCoding) {
        let d = self.peek(s.precision_bits);
        debug_assert!(s.cum <= d && d < s.cum + s.freq);
        let mut x = s.freq * (self.x >> s.precision_bits) + d - s.cum;
        while x < RANS_L {
            match self.payload.get(self.cursor) {
                Some(&b) => {
                    x = (x << 8) | u32::from(b);
                    self.cursor += 1;
                }
                None => {
                    self.starved = true;
                    break;
                }
            }
        }
        self.x = x;
    }

    /// Checks that the stream ended exactly where the encoder started.
    pub fn finish(&self) -> Result<()> {
        if self.starved || (self.x < RANS_L && self.cursor == self.payload.len()) {
            return Err(Error::TruncatedStream);
        }
        if self.cursor != self.payload.len() {
            return Err(Error::CorruptStream("trailing payload bytes"));
        }
        if self.x != RANS_L {
            return Err(Error::CorruptStream("final state mismatch"));
        }
        Ok(())
    }
}
