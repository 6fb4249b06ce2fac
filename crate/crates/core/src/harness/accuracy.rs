//! Error of each CDF approximator on a uniform grid.
//!
//! The reference is [`reference_cdf`], computed here from a positive series
//! and a continued fraction. It shares no code with the `libm` routine behind
//! [`ApproximatorKind::Exact`].

use serde::Serialize;

use crate::cdf::{std_normal_cdf, ApproximatorKind};

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AccuracyRow {
    pub kind: ApproximatorKind,
    pub x_min: f64,
    pub x_max: f64,
    pub step: f64,
    pub max_abs_err: f64,
    pub mean_abs_err: f64,
}

pub const CSV_HEADER: &str = "kind,x_min,x_max,step,max_abs_err,mean_abs_err";

const FRAC_2_SQRT_PI: f64 = std::f64::consts::FRAC_2_SQRT_PI;
const SERIES_LIMIT: f64 = 2.5;

/// `erf(x) = 2/sqrt(pi) exp(-x^2) sum_n 2^n x^(2n+1) / (2n+1)!!`; every term
/// is positive so there is no cancellation.
fn erf_series(x: f64) -> f64 {
    let mut term = x;
    let mut sum = x;
    let mut n = 0.0;
    while term > sum * 1e-18 {
        n += 1.0;
        term *= 2.0 * x * x / (2.0 * n + 1.0);
        sum += term;
    }
    FRAC_2_SQRT_PI * (-x * x).exp() * sum
}

/// `erfc(x)` for `x >= SERIES_LIMIT` by the Laplace continued fraction,
/// evaluated with the modified Lentz method.
fn erfc_continued_fraction(x: f64) -> f64 {
    // erfc(x) = exp(-x^2)/sqrt(pi) * 1/(x + (1/2)/(x + 1/(x + (3/2)/(x + ...))))
    const TINY: f64 = 1e-300;
    let mut f = x;
    let mut c = x;
    let mut d = 0.0;
    for i in 1..500 {
        let a = f64::from(i) * 0.5;
        d = x + a * d;
        d = if d == 0.0 { TINY } else { d };
        c = x + a / c;
        c = if c == 0.0 { TINY } else { c };
        d = 1.0 / d;
        let delta = c * d;
        f *= delta;
        if (delta - 1.0).abs() < 1e-17 {
            break;
        }
    }
    0.5 * FRAC_2_SQRT_PI * (-x * x).exp() / f
}

fn erfc_reference(x: f64) -> f64 {
    if x < 0.0 {
        2.0 - erfc_reference(-x)
    } else if x < SERIES_LIMIT {
        1.0 - erf_series(x)
    } else {
        erfc_continued_fraction(x)
    }
}

/// Reference standard-normal CDF.
pub fn reference_cdf(x: f64) -> f64 {
    0.5 * erfc_reference(-x / std::f64::consts::SQRT_2)
}

/// Scans `x_min, x_min + step, ..` up to and including `x_max`.
pub fn scan(kind: ApproximatorKind, x_min: f64, x_max: f64, step: f64) -> AccuracyRow {
    assert!(step > 0.0 && x_max >= x_min);
    let points = ((x_max - x_min) / step + 1e-9).floor() as u64 + 1;
    let (mut max, mut sum) = (0.0f64, 0.0f64);
    for i in 0..points {
        let x = x_min + i as f64 * step;
        let err = (std_normal_cdf(x, kind) - reference_cdf(x)).abs();
        max = max.max(err);
        sum += err;
    }
    AccuracyRow {
        kind,
        x_min,
        x_max,
        step,
        max_abs_err: max,
        mean_abs_err: sum / points as f64,
    }
}

impl AccuracyRow {
    pub fn csv_line(&self) -> String {
        format!(
            "{},{},{},{},{:e},{:e}",
            self.kind, self.x_min, self.x_max, self.step, self.max_abs_err, self.mean_abs_err
        )
    }
}

/// All four approximators on `[-8, 8]` with step `1e-3`.
pub fn default_grid() -> Vec<AccuracyRow> {
    ApproximatorKind::ALL
        .iter()
        .map(|&k| scan(k, -8.0, 8.0, 1e-3))
        .collect()
}
