//! Browser bindings for the demo page in `www/`.
//!
//! Every exported function takes plain numbers and returns a JSON string; the
//! `*_data` functions hold the logic and return typed values for native use.

use reid_core::harness::BASELINE_DIM;
use reid_core::{
    fit, generate_synthetic, hdff_pipeline, run_experiment, CrossViewSet, ExperimentConfig, FeatureBlock, FusionConfig,
    Normalization, SyntheticSpec, TxqdaConfig,
};
use serde::Serialize;
use wasm_bindgen::prelude::*;

#[derive(Debug, Clone, Serialize)]
pub struct Curve {
    pub label: String,
    /// Mean CMC, one value per rank starting at 1.
    pub values: Vec<f64>,
}

#[derive(Debug, Clone, Serialize)]
pub struct CmcComparison {
    pub curves: Vec<Curve>,
    pub trials: usize,
    pub test_identities: usize,
}

/// Raw cosine matching against learned projections on synthetic two-block data.
pub fn cmc_comparison_data(
    identities: usize,
    noise: f64,
    nuisance: f64,
    trials: usize,
    seed: u64,
) -> Result<CmcComparison, String> {
    let spec = SyntheticSpec { identities, noise, nuisance, seed, ..Default::default() };
    let (blocks, labels) = generate_synthetic(&spec).map_err(|e| e.to_string())?;
    let cfg = ExperimentConfig { trials, rng_seed: seed, baseline: true, ..Default::default() };
    let report = run_experiment(&blocks, &labels, &cfg).map_err(|e| e.to_string())?;
    let mut curves = Vec::new();
    for (set, dim, label) in [
        ("x+y", BASELINE_DIM, "raw x+y"),
        ("x", "auto", "learned x"),
        ("y", "auto", "learned y"),
        ("x+y", "auto", "learned x+y"),
    ] {
        let row = report.row(set, dim).ok_or_else(|| format!("missing row {set} {dim}"))?;
        curves.push(Curve { label: label.to_string(), values: row.mean_cmc.clone() });
    }
    let test_identities = report.trials.first().map_or(0, |t| t.test_persons.len());
    Ok(CmcComparison { curves, trials, test_identities })
}

#[derive(Debug, Clone, Serialize)]
pub struct LayoutCell {
    pub block: usize,
    /// 0-based index into the block's feature vector.
    pub feature: usize,
}

#[derive(Debug, Clone, Serialize)]
pub struct Layout {
    pub tags: Vec<String>,
    pub rows: usize,
    pub parts: usize,
    /// `cells[row][part]`.
    pub cells: Vec<Vec<LayoutCell>>,
}

/// Where each input feature lands in the fused sample matrix.
///
/// Runs the real fusion on one sample whose values encode their origin.
pub fn hdff_layout_data(block_dims: &[usize], parts: usize) -> Result<Layout, String> {
    const STRIDE: usize = 1 << 20;
    if block_dims.is_empty() {
        return Err("at least one block is needed".into());
    }
    let blocks = block_dims
        .iter()
        .enumerate()
        .map(|(b, &d)| {
            if d >= STRIDE {
                return Err(format!("block {b} is too long for the demo"));
            }
            let v: Vec<f64> = (0..d).map(|i| (b * STRIDE + i) as f64).collect();
            FeatureBlock::new(format!("b{b}"), vec![v]).map_err(|e| e.to_string())
        })
        .collect::<Result<Vec<_>, _>>()?;
    let fused = hdff_pipeline(&blocks, &FusionConfig { n_parts: parts, normalize: Normalization::None })
        .map_err(|e| e.to_string())?;
    let [rows, n, _] = fused.dims();
    let cells = (0..rows)
        .map(|r| {
            (0..n)
                .map(|p| {
                    let code = fused.get(r, p, 0) as usize;
                    LayoutCell { block: code / STRIDE, feature: code % STRIDE }
                })
                .collect()
        })
        .collect();
    Ok(Layout { tags: blocks.iter().map(|b| b.source_tag().to_string()).collect(), rows, parts: n, cells })
}

#[derive(Debug, Clone, Serialize)]
pub struct Spectrum {
    /// Generalized eigenvalues from the final solve of each mode, descending.
    pub spectra: [Vec<f64>; 2],
    pub chosen: (usize, usize),
    pub objective: [Vec<f64>; 2],
    pub iterations: usize,
    pub converged: bool,
}

/// Fit on the fused synthetic training tensor and report the per-mode spectra.
pub fn txqda_spectrum_data(identities: usize, noise: f64, nuisance: f64, seed: u64) -> Result<Spectrum, String> {
    let spec = SyntheticSpec { identities, noise, nuisance, seed, ..Default::default() };
    let (blocks, labels) = generate_synthetic(&spec).map_err(|e| e.to_string())?;
    let tensor = hdff_pipeline(&blocks, &FusionConfig::default()).map_err(|e| e.to_string())?;
    let set = CrossViewSet::new(
        tensor,
        labels.iter().map(|l| l.person_id.clone()).collect(),
        labels.iter().map(|l| l.camera_id.clone()).collect(),
    )
    .map_err(|e| e.to_string())?;
    let model = fit(&set, &TxqdaConfig::default()).map_err(|e| e.to_string())?;
    Ok(Spectrum {
        chosen: model.reduced_dims(),
        spectra: model.spectra,
        objective: model.objective_trace,
        iterations: model.iterations,
        converged: model.converged,
    })
}

fn to_js<T: Serialize>(r: Result<T, String>) -> Result<String, JsError> {
    r.map_err(|e| JsError::new(&e)).and_then(|v| serde_json::to_string(&v).map_err(|e| JsError::new(&e.to_string())))
}

#[wasm_bindgen]
pub fn cmc_comparison(identities: usize, noise: f64, nuisance: f64, trials: usize, seed: u32) -> Result<String, JsError> {
    to_js(cmc_comparison_data(identities, noise, nuisance, trials, seed as u64))
}

#[wasm_bindgen]
pub fn hdff_layout(block_dims: Vec<u32>, parts: usize) -> Result<String, JsError> {
    let dims: Vec<usize> = block_dims.into_iter().map(|d| d as usize).collect();
    to_js(hdff_layout_data(&dims, parts))
}

#[wasm_bindgen]
pub fn txqda_spectrum(identities: usize, noise: f64, nuisance: f64, seed: u32) -> Result<String, JsError> {
    to_js(txqda_spectrum_data(identities, noise, nuisance, seed as u64))
}
