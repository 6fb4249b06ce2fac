//! On-disk formats the CLI reads and writes besides the binary stream.

use std::fs;
use std::path::Path;

use anyhow::{Context, Result};
use gmmcodec::harness::Workload;
use gmmcodec::{ApproximatorKind, MixtureParams, SymbolAlphabet};
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ComponentsJson {
    pub weights: Vec<f64>,
    pub means: Vec<f64>,
    pub stddevs: Vec<f64>,
}

/// Input of `encode`: an alphabet, an approximator, and one mixture per
/// symbol.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SymbolsFile {
    pub alphabet: SymbolAlphabet,
    pub approximator: ApproximatorKind,
    pub symbols: Vec<i32>,
    pub params: Vec<ComponentsJson>,
}

impl SymbolsFile {
    pub fn from_workload(
        alphabet: SymbolAlphabet,
        kind: ApproximatorKind,
        work: &Workload,
    ) -> Self {
        SymbolsFile {
            alphabet,
            approximator: kind,
            symbols: work.symbols.clone(),
            params: work
                .params
                .iter()
                .map(|p| ComponentsJson {
                    weights: p.weights().to_vec(),
                    means: p.means().to_vec(),
                    stddevs: p.stddevs().to_vec(),
                })
                .collect(),
        }
    }

    pub fn mixtures(&self) -> gmmcodec::Result<Vec<MixtureParams>> {
        self.params
            .iter()
            .map(|c| MixtureParams::new(&c.weights, &c.means, &c.stddevs))
            .collect()
    }

    pub fn read(path: &Path) -> Result<Self> {
        let text =
            fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
        serde_json::from_str(&text).with_context(|| format!("parsing {}", path.display()))
    }

    pub fn write(&self, path: &Path) -> Result<()> {
        let text = serde_json::to_string(self)?;
        fs::write(path, text).with_context(|| format!("writing {}", path.display()))
    }
}

/// One decimal symbol per line.
pub fn write_symbols(path: &Path, symbols: &[i32]) -> Result<()> {
    let mut text = String::with_capacity(symbols.len() * 4);
    for s in symbols {
        text.push_str(&s.to_string());
        text.push('\n');
    }
    fs::write(path, text).with_context(|| format!("writing {}", path.display()))
}
