//! Comparison codecs: a table-building mixture codec and a prebuilt
//! scale-table single-Gaussian codec.

pub mod gsm;
pub mod table;
