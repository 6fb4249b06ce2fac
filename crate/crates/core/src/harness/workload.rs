//! Deterministic synthetic workloads.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Exp1, Normal};
use serde::{Deserialize, Serialize};

use crate::baseline::gsm::{mean_shift, ScaleTable};
use crate::cdf::{ApproximatorKind, MixtureParams, SymbolAlphabet, SIGMA_MIN};
use crate::error::{Error, Result};
use crate::flash_codec::locate_slot;

/// Standard deviation of the component means.
pub const MEAN_SPREAD: f64 = 4.0;
/// Upper end of the log-uniform scale range.
pub const SIGMA_MAX: f64 = 16.0;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WorkloadSpec {
    pub symbol_count: usize,
    pub k: usize,
    pub alphabet: SymbolAlphabet,
    pub kind: ApproximatorKind,
    pub seed: u64,
    /// Symbols per independently coded chunk; 0 codes one stream.
    pub chunk: usize,
}

impl Default for WorkloadSpec {
    fn default() -> Self {
        WorkloadSpec {
            symbol_count: 1_000_000,
            k: 3,
            alphabet: SymbolAlphabet::centered(256, 16).expect("default alphabet is valid"),
            kind: ApproximatorKind::Logistic,
            seed: 0,
            chunk: 0,
        }
    }
}

impl WorkloadSpec {
    /// Half-open symbol ranges of the chunks.
    pub fn chunk_ranges(&self) -> Vec<std::ops::Range<usize>> {
        let n = self.symbol_count;
        if self.chunk == 0 || self.chunk >= n {
            return vec![0..n];
        }
        (0..n)
            .step_by(self.chunk)
            .map(|s| s..(s + self.chunk).min(n))
            .collect()
    }
}

/// Mixture workload: symbols drawn from their own quantized models.
#[derive(Debug, Clone, PartialEq)]
pub struct Workload {
    pub symbols: Vec<i32>,
    pub params: Vec<MixtureParams>,
}

/// Single-Gaussian workload for the scale-table codec.
#[derive(Debug, Clone, PartialEq)]
pub struct GsmWorkload {
    pub symbols: Vec<i32>,
    pub means: Vec<f64>,
    pub sigmas: Vec<f64>,
}

fn draw_sigma(rng: &mut ChaCha8Rng) -> f64 {
    rng.gen_range(SIGMA_MIN.ln()..SIGMA_MAX.ln()).exp()
}

fn draw_mean(rng: &mut ChaCha8Rng, normal: &Normal<f64>, alphabet: &SymbolAlphabet) -> f64 {
    normal
        .sample(rng)
        .clamp(f64::from(alphabet.y_min()), f64::from(alphabet.y_max()))
}

/// Draws per-position mixtures (flat Dirichlet weights, normal means,
/// log-uniform scales) and samples each symbol by inverse transform on the
/// quantized boundary function.
pub fn generate_workload(spec: &WorkloadSpec) -> Result<Workload> {
    if spec.k == 0 || spec.k > crate::cdf::MAX_COMPONENTS {
        return Err(Error::ComponentCount {
            got: spec.k,
            max: crate::cdf::MAX_COMPONENTS,
        });
    }
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let normal = Normal::new(0.0, MEAN_SPREAD).expect("positive spread");
    let alphabet = &spec.alphabet;
    let mut symbols = Vec::with_capacity(spec.symbol_count);
    let mut params = Vec::with_capacity(spec.symbol_count);
    let (mut w, mut mu, mut sigma) = ([0.0; 4], [0.0; 4], [0.0; 4]);
    let mut evals = 0;
    for _ in 0..spec.symbol_count {
        for i in 0..spec.k {
            w[i] = Exp1.sample(&mut rng);
            mu[i] = draw_mean(&mut rng, &normal, alphabet);
            sigma[i] = draw_sigma(&mut rng);
        }
        let p = MixtureParams::new(&w[..spec.k], &mu[..spec.k], &sigma[..spec.k])?.round_to_f32();
        let slot = rng.gen_range(0..alphabet.total());
        let j = locate_slot(&p, alphabet, spec.kind, slot, &mut evals);
        symbols.push(alphabet.symbol_at(j));
        params.push(p);
    }
    Ok(Workload { symbols, params })
}

/// Same parameter distribution with `K = 1`, with each residual drawn from
/// the scale-table row the codec will use.
pub fn generate_gsm_workload(spec: &WorkloadSpec, table: &ScaleTable) -> Result<GsmWorkload> {
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed ^ 0x6753_4d00);
    let normal = Normal::new(0.0, MEAN_SPREAD).expect("positive spread");
    let m = 1u32 << table.precision_bits();
    let mut out = GsmWorkload {
        symbols: Vec::with_capacity(spec.symbol_count),
        means: Vec::with_capacity(spec.symbol_count),
        sigmas: Vec::with_capacity(spec.symbol_count),
    };
    for _ in 0..spec.symbol_count {
        let mean = f64::from(draw_mean(&mut rng, &normal, &spec.alphabet) as f32);
        let sigma = f64::from(draw_sigma(&mut rng) as f32);
        let coded = MixtureParams::single(mean, sigma)?;
        let idx = table.scale_index(coded.stddevs()[0]);
        let r = table.residual_for_slot(idx, rng.gen_range(0..m));
        out.symbols.push((i64::from(r) + mean_shift(mean)) as i32);
        out.means.push(mean);
        out.sigmas.push(sigma);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::flash_codec::symbol_coding;

    fn small_spec() -> WorkloadSpec {
        WorkloadSpec {
            symbol_count: 5_000,
            alphabet: SymbolAlphabet::centered(64, 16).unwrap(),
            seed: 17,
            ..WorkloadSpec::default()
        }
    }

    #[test]
    fn deterministic() {
        let spec = small_spec();
        assert_eq!(
            generate_workload(&spec).unwrap(),
            generate_workload(&spec).unwrap()
        );
        let other = WorkloadSpec { seed: 18, ..spec };
        assert_ne!(
            generate_workload(&spec).unwrap(),
            generate_workload(&other).unwrap()
        );
    }

    #[test]
    fn symbols_in_alphabet() {
        let spec = small_spec();
        let w = generate_workload(&spec).unwrap();
        assert!(w.symbols.iter().all(|&y| spec.alphabet.contains(y)));
        assert!(w.params.iter().all(|p| p.k() == 3));
    }

    #[test]
    fn empirical_rate_matches_model_entropy() {
        let spec = WorkloadSpec {
            symbol_count: 100_000,
            ..small_spec()
        };
        let w = generate_workload(&spec).unwrap();
        let a = &spec.alphabet;
        let mut code_len = 0.0;
        let mut entropy = 0.0;
        for (p, &y) in w.params.iter().zip(&w.symbols) {
            code_len += symbol_coding(p, a, a.index_of(y).unwrap(), spec.kind).bits();
            let m = f64::from(a.total());
            for j in 0..a.size() {
                let c = symbol_coding(p, a, j, spec.kind);
                let q = f64::from(c.freq) / m;
                entropy -= q * q.log2();
            }
        }
        let rel = (code_len - entropy).abs() / entropy;
        assert!(rel < 0.01, "code {code_len} entropy {entropy}");
    }

    #[test]
    fn chunk_ranges_cover_everything() {
        let spec = WorkloadSpec {
            symbol_count: 10,
            chunk: 4,
            ..small_spec()
        };
        assert_eq!(spec.chunk_ranges(), vec![0..4, 4..8, 8..10]);
        let whole = WorkloadSpec { chunk: 0, ..spec };
        assert_eq!(whole.chunk_ranges(), vec![0..10]);
    }

    #[test]
    fn gsm_workload_is_codeable() {
        let table = ScaleTable::new(16, ApproximatorKind::Exact).unwrap();
        let w = generate_gsm_workload(&small_spec(), &table).unwrap();
        let s = crate::baseline::gsm::encode(&w.symbols, &w.means, &w.sigmas, &table).unwrap();
        assert_eq!(crate::baseline::gsm::decode(&s, &table).unwrap(), w.symbols);
    }
}
