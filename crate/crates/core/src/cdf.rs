//! Standard-normal and Gaussian-mixture CDFs, and the quantized boundary
//! function shared by every codec in this crate.
//!
//! All four approximators are evaluated through one arithmetic path: the
//! lane kernels below operate on fixed-width `[f64; 4]` blocks (one lane per
//! mixture component) and the scalar entry points call the same element
//! functions. Nothing here ever contracts into FMA, so the scalar and batched
//! results are bit-identical, which is what lets the decoder reproduce the
//! encoder's cumulative frequencies exactly.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Maximum number of mixture components (one per data-parallel lane).
pub const MAX_COMPONENTS: usize = 4;

/// Lower bound applied to every component standard deviation.
pub const SIGMA_MIN: f64 = 0.11;

/// Weights summing to within this of one are not renormalized.
pub const WEIGHT_SUM_TOLERANCE: f64 = 1e-6;

/// Largest supported alphabet size.
pub const MAX_ALPHABET: u32 = 1 << 15;

pub const MIN_PRECISION: u32 = 8;
pub const MAX_PRECISION: u32 = 16;

/// Which formula is used for the standard-normal CDF.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ApproximatorKind {
    /// `0.5 * erfc(-x / sqrt(2))`.
    Exact,
    /// `0.5 * (1 + sqrt(1 - exp(-x^2)))`, completed by symmetry.
    Polya,
    /// Abramowitz & Stegun 26.2.17, completed by symmetry.
    #[serde(rename = "as")]
    AbramowitzStegun,
    /// `1 / (1 + exp(-1.702 x))`.
    Logistic,
}

impl ApproximatorKind {
    pub const ALL: [ApproximatorKind; 4] = [
        ApproximatorKind::Exact,
        ApproximatorKind::Polya,
        ApproximatorKind::AbramowitzStegun,
        ApproximatorKind::Logistic,
    ];

    /// One-byte code used in stream headers.
    pub const fn code(self) -> u8 {
        match self {
            ApproximatorKind::Exact => 0,
            ApproximatorKind::Polya => 1,
            ApproximatorKind::AbramowitzStegun => 2,
            ApproximatorKind::Logistic => 3,
        }
    }

    pub const fn from_code(code: u8) -> Option<Self> {
        match code {
            0 => Some(ApproximatorKind::Exact),
            1 => Some(ApproximatorKind::Polya),
            2 => Some(ApproximatorKind::AbramowitzStegun),
            3 => Some(ApproximatorKind::Logistic),
            _ => None,
        }
    }

    pub const fn name(self) -> &'static str {
        match self {
            ApproximatorKind::Exact => "exact",
            ApproximatorKind::Polya => "polya",
            ApproximatorKind::AbramowitzStegun => "as",
            ApproximatorKind::Logistic => "logistic",
        }
    }
}

impl fmt::Display for ApproximatorKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for ApproximatorKind {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "exact" => Ok(ApproximatorKind::Exact),
            "polya" => Ok(ApproximatorKind::Polya),
            "as" | "abramowitz-stegun" | "abramowitzstegun" => {
                Ok(ApproximatorKind::AbramowitzStegun)
            }
            "logistic" => Ok(ApproximatorKind::Logistic),
            other => Err(format!("unknown approximator `{other}`")),
        }
    }
}

/// Per-symbol Gaussian mixture: `sum_k w_k N(mu_k, sigma_k)`.
///
/// Lanes past `k()` are padded with `w = 0, mu = 0, sigma = 1` so the
/// batched kernels always run at full width. A zero-weight lane adds an exact
/// `0.0` to the mixture sum.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MixtureParams {
    k: u8,
    weights: [f64; MAX_COMPONENTS],
    means: [f64; MAX_COMPONENTS],
    stddevs: [f64; MAX_COMPONENTS],
}

impl MixtureParams {
    /// Builds a mixture, renormalizing the weights (unless they already sum
    /// to one within [`WEIGHT_SUM_TOLERANCE`]) and clamping every standard
    /// deviation to at least [`SIGMA_MIN`].
    pub fn new(weights: &[f64], means: &[f64], stddevs: &[f64]) -> Result<Self> {
        let k = weights.len();
        if k == 0 || k > MAX_COMPONENTS {
            return Err(Error::ComponentCount {
                got: k,
                max: MAX_COMPONENTS,
            });
        }
        if means.len() != k || stddevs.len() != k {
            return Err(Error::InvalidParams("component arrays differ in length"));
        }
        let all = weights.iter().chain(means).chain(stddevs);
        if all.into_iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidParams("non-finite parameter"));
        }
        if weights.iter().any(|&w| w < 0.0) {
            return Err(Error::InvalidParams("negative weight"));
        }
        if stddevs.iter().any(|&s| s < 0.0) {
            return Err(Error::InvalidParams("negative standard deviation"));
        }
        let total: f64 = weights.iter().sum();
        if total <= 0.0 {
            return Err(Error::InvalidParams("weights sum to zero"));
        }

        let mut out = MixtureParams {
            k: k as u8,
            weights: [0.0; MAX_COMPONENTS],
            means: [0.0; MAX_COMPONENTS],
            stddevs: [1.0; MAX_COMPONENTS],
        };
        // Already-normalized weights are kept as given so that parameters
        // read back from a stream serialize to the same bits.
        let scale = if (total - 1.0).abs() <= WEIGHT_SUM_TOLERANCE {
            1.0
        } else {
            total
        };
        for i in 0..k {
            out.weights[i] = weights[i] / scale;
            out.means[i] = means[i];
            out.stddevs[i] = stddevs[i].max(SIGMA_MIN);
        }
        Ok(out)
    }

    /// A single Gaussian component.
    pub fn single(mean: f64, stddev: f64) -> Result<Self> {
        Self::new(&[1.0], &[mean], &[stddev])
    }

    /// Builds a mixture from the 32-bit values stored in a stream parameter
    /// block. Encoder and decoder both go through this constructor.
    pub fn from_f32(weights: &[f32], means: &[f32], stddevs: &[f32]) -> Result<Self> {
        let widen = |v: &[f32]| -> [f64; MAX_COMPONENTS] {
            let mut out = [0.0; MAX_COMPONENTS];
            for (o, &x) in out.iter_mut().zip(v) {
                *o = f64::from(x);
            }
            out
        };
        let k = weights.len().min(MAX_COMPONENTS);
        let (w, m, s) = (widen(weights), widen(means), widen(stddevs));
        if weights.len() > MAX_COMPONENTS {
            return Err(Error::ComponentCount {
                got: weights.len(),
                max: MAX_COMPONENTS,
            });
        }
        if means.len() != weights.len() || stddevs.len() != weights.len() {
            return Err(Error::InvalidParams("component arrays differ in length"));
        }
        Self::new(&w[..k], &m[..k], &s[..k])
    }

    /// Rounds every parameter through `f32`, as it would be after being
    /// written to and read back from a stream.
    pub fn round_to_f32(&self) -> Self {
        let mut block = Vec::with_capacity(3 * MAX_COMPONENTS);
        self.write_f32(&mut block);
        let k = self.k();
        MixtureParams::from_f32(&block[..k], &block[k..2 * k], &block[2 * k..])
            .expect("a valid mixture stays valid after f32 rounding")
    }

    /// Appends `w_0..w_{k-1}, mu_0.., sigma_0..` as `f32`.
    pub fn write_f32(&self, out: &mut Vec<f32>) {
        let k = self.k();
        out.extend(self.weights[..k].iter().map(|&v| v as f32));
        out.extend(self.means[..k].iter().map(|&v| v as f32));
        out.extend(self.stddevs[..k].iter().map(|&v| v as f32));
    }

    #[inline]
    pub fn k(&self) -> usize {
        usize::from(self.k)
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights[..self.k()]
    }

    pub fn means(&self) -> &[f64] {
        &self.means[..self.k()]
    }

    pub fn stddevs(&self) -> &[f64] {
        &self.stddevs[..self.k()]
    }

    /// Mean and standard deviation of the mixture (moment matching).
    pub fn moments(&self) -> (f64, f64) {
        let k = self.k();
        let mean: f64 = (0..k).map(|i| self.weights[i] * self.means[i]).sum();
        let second: f64 = (0..k)
            .map(|i| self.weights[i] * (self.stddevs[i].powi(2) + self.means[i].powi(2)))
            .sum();
        (mean, (second - mean * mean).max(0.0).sqrt())
    }
}

/// Contiguous integer alphabet `y_min..=y_max` coded at precision `2^P`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "RawAlphabet", into = "RawAlphabet")]
pub struct SymbolAlphabet {
    y_min: i32,
    y_max: i32,
    precision_bits: u32,
}

#[derive(Serialize, Deserialize)]
struct RawAlphabet {
    y_min: i32,
    y_max: i32,
    precision_bits: u32,
}

impl TryFrom<RawAlphabet> for SymbolAlphabet {
    type Error = Error;

    fn try_from(raw: RawAlphabet) -> Result<Self> {
        SymbolAlphabet::new(raw.y_min, raw.y_max, raw.precision_bits)
    }
}

impl From<SymbolAlphabet> for RawAlphabet {
    fn from(a: SymbolAlphabet) -> Self {
        RawAlphabet {
            y_min: a.y_min,
            y_max: a.y_max,
            precision_bits: a.precision_bits,
        }
    }
}

impl SymbolAlphabet {
    pub fn new(y_min: i32, y_max: i32, precision_bits: u32) -> Result<Self> {
        if y_min >= y_max {
            return Err(Error::InvalidAlphabet(format!(
                "y_min ({y_min}) must be below y_max ({y_max})"
            )));
        }
        let bounds = i32::from(i16::MIN)..=i32::from(i16::MAX);
        if !bounds.contains(&y_min) || !bounds.contains(&y_max) {
            return Err(Error::InvalidAlphabet(format!(
                "bounds {y_min}..={y_max} do not fit in 16 bits"
            )));
        }
        let n = (i64::from(y_max) - i64::from(y_min) + 1) as u64;
        if n > u64::from(MAX_ALPHABET) {
            return Err(Error::InvalidAlphabet(format!(
                "{n} symbols exceeds the maximum of {MAX_ALPHABET}"
            )));
        }
        if !(MIN_PRECISION..=MAX_PRECISION).contains(&precision_bits) {
            return Err(Error::InvalidAlphabet(format!(
                "precision {precision_bits} outside {MIN_PRECISION}..={MAX_PRECISION}"
            )));
        }
        if (1u64 << precision_bits) <= 2 * n {
            return Err(Error::InvalidAlphabet(format!(
                "precision {precision_bits} is too coarse for {n} symbols"
            )));
        }
        Ok(SymbolAlphabet {
            y_min,
            y_max,
            precision_bits,
        })
    }

    /// `size` symbols centered on zero: `-(size/2) ..= size - 1 - size/2`.
    pub fn centered(size: u32, precision_bits: u32) -> Result<Self> {
        let size = i64::from(size);
        let y_min = -(size / 2);
        let y_max = y_min + size - 1;
        let clamp = |v: i64| v.clamp(i64::from(i32::MIN), i64::from(i32::MAX)) as i32;
        Self::new(clamp(y_min), clamp(y_max), precision_bits)
    }

    #[inline]
    pub fn y_min(&self) -> i32 {
        self.y_min
    }

    #[inline]
    pub fn y_max(&self) -> i32 {
        self.y_max
    }

    #[inline]
    pub fn precision_bits(&self) -> u32 {
        self.precision_bits
    }

    /// Number of symbols `N`.
    #[inline]
    pub fn size(&self) -> u32 {
        (self.y_max - self.y_min + 1) as u32
    }

    /// Total frequency mass `m = 2^P`.
    #[inline]
    pub fn total(&self) -> u32 {
        1 << self.precision_bits
    }

    #[inline]
    pub fn contains(&self, y: i32) -> bool {
        (self.y_min..=self.y_max).contains(&y)
    }

    /// Zero-based index of `y`, if it is in the alphabet.
    #[inline]
    pub fn index_of(&self, y: i32) -> Option<u32> {
        self.contains(y).then(|| (y - self.y_min) as u32)
    }

    #[inline]
    pub fn symbol_at(&self, j: u32) -> i32 {
        self.y_min + j as i32
    }
}

// ---------------------------------------------------------------------------
// Element kernels. Everything below is straight-line f64 arithmetic so the
// lane loops vectorize, and the scalar entry points share the exact same code.

const LOG2_E: f64 = std::f64::consts::LOG2_E;
const LN2_HI: f64 = 6.931_471_803_691_238_164_90e-01;
const LN2_LO: f64 = 1.908_214_929_270_587_700_02e-10;
// 1.5 * 2^52: adding it rounds to the nearest integer and leaves that integer
// in the low mantissa bits.
const ROUND_MAGIC: f64 = 6_755_399_441_055_744.0;
const EXP_ARG_LIMIT: f64 = 708.0;

const FRAC_1_SQRT_2PI: f64 = 0.398_942_280_401_432_677_94;

const AS_P: f64 = 0.231_641_9;
const AS_B: [f64; 5] = [
    0.319_381_530,
    -0.356_563_782,
    1.781_477_937,
    -1.821_255_978,
    1.330_274_429,
];

const LOGISTIC_SCALE: f64 = 1.702;

/// `exp(x)` via Cody-Waite reduction and a degree-13 Taylor polynomial.
/// The argument is clamped to `[-708, 708]`.
#[inline(always)]
fn exp_kernel(x: f64) -> f64 {
    let x = x.max(-EXP_ARG_LIMIT).min(EXP_ARG_LIMIT);
    let shifted = x * LOG2_E + ROUND_MAGIC;
    let n = shifted - ROUND_MAGIC;
    let n_int = shifted.to_bits() as i64 - ROUND_MAGIC.to_bits() as i64;
    let r = (x - n * LN2_HI) - n * LN2_LO;

    let mut p = 1.0 / 6_227_020_800.0;
    p = p * r + 1.0 / 479_001_600.0;
    p = p * r + 1.0 / 39_916_800.0;
    p = p * r + 1.0 / 3_628_800.0;
    p = p * r + 1.0 / 362_880.0;
    p = p * r + 1.0 / 40_320.0;
    p = p * r + 1.0 / 5_040.0;
    p = p * r + 1.0 / 720.0;
    p = p * r + 1.0 / 120.0;
    p = p * r + 1.0 / 24.0;
    p = p * r + 1.0 / 6.0;
    p = p * r + 0.5;
    p = p * r + 1.0;
    p = p * r + 1.0;

    p * f64::from_bits(((n_int + 1023) as u64) << 52)
}

#[inline(always)]
fn polya_upper(u: f64) -> f64 {
    0.5 * (1.0 + (1.0 - exp_kernel(-u * u)).max(0.0).sqrt())
}

/// Past this the A&S tail term is below 1e-290 and the result is 1.0; the
/// cap keeps `pdf * poly` out of subnormal range.
const AS_ARG_LIMIT: f64 = 37.0;

#[inline(always)]
fn as_upper(u: f64) -> f64 {
    let u = u.min(AS_ARG_LIMIT);
    let t = 1.0 / (1.0 + AS_P * u);
    let poly = t * (AS_B[0] + t * (AS_B[1] + t * (AS_B[2] + t * (AS_B[3] + t * AS_B[4]))));
    let pdf = FRAC_1_SQRT_2PI * exp_kernel(-0.5 * u * u);
    1.0 - pdf * poly
}

#[inline(always)]
fn logistic_upper(u: f64) -> f64 {
    1.0 / (1.0 + exp_kernel(-LOGISTIC_SCALE * u))
}

/// Evaluates `upper` on `|x|` and reflects for negative `x`. Every `upper`
/// here returns a value in `[0.5, 1]`, so `1 - upper` is exact and
/// `phi(x) + phi(-x) == 1` holds bit-for-bit.
#[inline(always)]
fn reflect(x: f64, upper: impl Fn(f64) -> f64) -> f64 {
    let up = upper(x.abs());
    let v = if x.is_sign_negative() { 1.0 - up } else { up };
    v.max(0.0).min(1.0)
}

#[inline(always)]
fn exact_kernel(x: f64) -> f64 {
    (0.5 * libm::erfc(-x * std::f64::consts::FRAC_1_SQRT_2))
        .max(0.0)
        .min(1.0)
}

#[inline(always)]
fn phi_kernel(x: f64, kind: ApproximatorKind) -> f64 {
    match kind {
        ApproximatorKind::Exact => exact_kernel(x),
        ApproximatorKind::Polya => reflect(x, polya_upper),
        ApproximatorKind::AbramowitzStegun => reflect(x, as_upper),
        ApproximatorKind::Logistic => reflect(x, logistic_upper),
    }
}

type Lanes = [f64; MAX_COMPONENTS];

#[inline(always)]
fn map_lanes(z: Lanes, f: impl Fn(f64) -> f64) -> Lanes {
    [f(z[0]), f(z[1]), f(z[2]), f(z[3])]
}

/// Standard-normal CDF `Phi(x)` under the selected formula, in `[0, 1]`.
pub fn std_normal_cdf(x: f64, kind: ApproximatorKind) -> f64 {
    phi_kernel(x, kind)
}

/// Per-component `Phi((y - mu_k) / sigma_k)` evaluated across all four lanes
/// at once. Entries past `params.k()` are padding.
#[inline]
pub fn component_cdf_batch(y: f64, params: &MixtureParams, kind: ApproximatorKind) -> Lanes {
    let mut z = [0.0; MAX_COMPONENTS];
    for i in 0..MAX_COMPONENTS {
        z[i] = (y - params.means[i]) / params.stddevs[i];
    }
    match kind {
        ApproximatorKind::Exact => map_lanes(z, exact_kernel),
        ApproximatorKind::Polya => map_lanes(z, |x| reflect(x, polya_upper)),
        ApproximatorKind::AbramowitzStegun => map_lanes(z, |x| reflect(x, as_upper)),
        ApproximatorKind::Logistic => map_lanes(z, |x| reflect(x, logistic_upper)),
    }
}

/// Mixture CDF `sum_k w_k Phi((y - mu_k) / sigma_k)`, clamped to `[0, 1]`.
#[inline]
pub fn mixture_cdf(y: f64, params: &MixtureParams, kind: ApproximatorKind) -> f64 {
    let c = component_cdf_batch(y, params, kind);
    let w = &params.weights;
    let sum = ((w[0] * c[0] + w[1] * c[1]) + w[2] * c[2]) + w[3] * c[3];
    sum.max(0.0).min(1.0)
}

/// Maps a CDF value at the lower edge of bin `j` to its integer boundary.
#[inline(always)]
fn scale_boundary(cdf: f64, j: u32, n: u32, m: u32) -> u32 {
    (cdf * f64::from(m - n)).floor() as u32 + j
}

/// Integer cumulative frequency at the lower edge of symbol index `j`.
///
/// `B(0) = 0`, `B(N) = m`, and for interior `j`
/// `B(j) = floor(F(y_min + j - 0.5) * (m - N)) + j`. The sequence is strictly
/// increasing, so every symbol gets a frequency of at least one.
#[inline]
pub fn quantized_boundary(
    params: &MixtureParams,
    alphabet: &SymbolAlphabet,
    j: u32,
    kind: ApproximatorKind,
) -> u32 {
    let n = alphabet.size();
    if j == 0 {
        return 0;
    }
    if j >= n {
        return alphabet.total();
    }
    let edge = f64::from(alphabet.y_min) + f64::from(j) - 0.5;
    scale_boundary(mixture_cdf(edge, params, kind), j, n, alphabet.total())
}
