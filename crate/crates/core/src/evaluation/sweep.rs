//! One-parameter-at-a-time accuracy sweeps over k, metric and relaxation.

use std::collections::HashMap;

use super::loocv::{loocv_corpus, Corpus, EvalConfig};
use super::manifest::DatasetManifest;
use crate::classifier::Metric;
use crate::error::Result;
use crate::pipeline::Extractor;
use crate::spd::Relaxation;

#[derive(Debug, Clone, PartialEq)]
pub struct SweepGrid {
    /// Held fixed while another parameter varies.
    pub base: EvalConfig,
    pub ks: Vec<usize>,
    pub metrics: Vec<Metric>,
    pub rs: Vec<Relaxation>,
}

impl Default for SweepGrid {
    fn default() -> Self {
        let r = |v| Relaxation::new(v).expect("valid relaxation");
        Self {
            base: EvalConfig::default(),
            ks: vec![1, 3, 5, 7],
            metrics: vec![Metric::Manhattan, Metric::Bhattacharyya],
            rs: vec![r(0), r(2), r(4)],
        }
    }
}

impl SweepGrid {
    /// Column name and configuration of every cell, k columns first, then metrics, then r.
    pub fn cells(&self) -> Vec<(String, EvalConfig)> {
        let mut cells = Vec::new();
        for &k in &self.ks {
            cells.push((format!("k{k}"), EvalConfig { k, ..self.base }));
        }
        for &metric in &self.metrics {
            cells.push((metric.short_name().to_string(), EvalConfig { metric, ..self.base }));
        }
        for &r in &self.rs {
            cells.push((format!("r{}", r.get()), EvalConfig { r, ..self.base }));
        }
        cells
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepCell {
    pub column: String,
    pub config: EvalConfig,
    pub accuracy: f64,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct SweepTable {
    pub cells: Vec<SweepCell>,
}

impl SweepTable {
    pub fn get(&self, column: &str) -> Option<f64> {
        self.cells.iter().find(|c| c.column == column).map(|c| c.accuracy)
    }

    /// One header line of column names and one line of accuracies in percent.
    pub fn to_csv(&self) -> String {
        let header: Vec<&str> = self.cells.iter().map(|c| c.column.as_str()).collect();
        let values: Vec<String> = self.cells.iter().map(|c| format!("{:.2}", 100.0 * c.accuracy)).collect();
        format!("{}\n{}\n", header.join(","), values.join(","))
    }
}

/// Runs the sweep with corpora supplied per relaxation. Each distinct
/// configuration is evaluated once; combiner weights are refitted per cell.
pub fn sweep_corpus<F>(grid: &SweepGrid, mut corpus_for: F) -> Result<SweepTable>
where
    F: FnMut(Relaxation) -> Result<Corpus>,
{
    let mut corpora: HashMap<Relaxation, Corpus> = HashMap::new();
    let mut results: HashMap<EvalConfig, f64> = HashMap::new();
    let mut table = SweepTable::default();
    for (column, config) in grid.cells() {
        let accuracy = match results.get(&config) {
            Some(&a) => a,
            None => {
                if let std::collections::hash_map::Entry::Vacant(e) = corpora.entry(config.r) {
                    e.insert(corpus_for(config.r)?);
                }
                let a = loocv_corpus(&corpora[&config.r], config.k, config.metric)?.accuracy();
                results.insert(config, a);
                a
            }
        };
        table.cells.push(SweepCell { column, config, accuracy });
    }
    Ok(table)
}

pub fn sweep(manifest: &DatasetManifest, grid: &SweepGrid, extractor: &Extractor) -> Result<SweepTable> {
    sweep_corpus(grid, |r| Corpus::from_manifest(manifest, &extractor.with_relaxation(r)))
}
