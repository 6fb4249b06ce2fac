//! Entropy coding for integer symbols under per-symbol Gaussian mixture
//! models.
//!
//! [`flash_codec`] encodes by evaluating the mixture CDF at the two edges of
//! each symbol and decodes by bisecting the same quantized CDF, so it never
//! builds cumulative-frequency tables. [`baseline`] holds the table-building
//! and scale-table codecs it is measured against, and [`harness`] the
//! workload generator and benchmark rig.
//!
//! ```
//! use gmmcodec::{flash_codec, ApproximatorKind, MixtureParams, SymbolAlphabet};
//!
//! let alphabet = SymbolAlphabet::centered(256, 16)?;
//! let params = vec![MixtureParams::new(&[0.3, 0.7], &[-2.0, 5.0], &[1.5, 3.0])?; 3];
//! let symbols = [4, -1, 7];
//! let stream = flash_codec::encode(&symbols, &params, &alphabet, ApproximatorKind::Logistic)?;
//! let bytes = stream.to_bytes();
//! let back = flash_codec::decode(&gmmcodec::EncodedStream::from_bytes(&bytes)?)?;
//! assert_eq!(back, symbols);
//! # Ok::<(), gmmcodec::Error>(())
//! ```

pub mod baseline;
pub mod cdf;
pub mod error;
pub mod flash_codec;
pub mod harness;
pub mod rans;
pub mod stream;

pub use cdf::{
    component_cdf_batch, mixture_cdf, quantized_boundary, std_normal_cdf, ApproximatorKind,
    MixtureParams, SymbolAlphabet, MAX_COMPONENTS, SIGMA_MIN,
};
pub use error::{Error, Result};
pub use rans::{coding_step, RansDecoder, RansEncoder, SymbolCoding, RANS_L};
pub use stream::{EncodedStream, StreamHeader};
