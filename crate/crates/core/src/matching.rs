//! Cosine matching of probes against a gallery and CMC evaluation.

use std::collections::HashSet;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::tensor::{dot, DenseTensor3};

/// Cosine similarity with a flag for zero-norm inputs.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CosineScore {
    pub value: f64,
    /// Set when either input had zero norm; `value` is then 0.
    pub degenerate: bool,
}

/// `xᵀy / (‖x‖ ‖y‖)` clamped to `[-1, 1]`; zero-norm inputs score 0.
pub fn cosine(x: &[f64], y: &[f64]) -> Result<CosineScore> {
    if x.len() != y.len() {
        return Err(Error::arg(format!("cosine of vectors with lengths {} and {}", x.len(), y.len())));
    }
    let nx = dot(x, x).sqrt();
    let ny = dot(y, y).sqrt();
    Ok(cosine_with_norms(x, y, nx, ny))
}

fn cosine_with_norms(x: &[f64], y: &[f64], nx: f64, ny: f64) -> CosineScore {
    if nx == 0.0 || ny == 0.0 {
        return CosineScore { value: 0.0, degenerate: true };
    }
    CosineScore { value: (dot(x, y) / (nx * ny)).clamp(-1.0, 1.0), degenerate: false }
}

/// Gallery ranking of a single probe.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProbeRanking {
    pub probe: usize,
    pub person_id: String,
    /// Gallery indices, best first.
    pub order: Vec<usize>,
    /// Similarity of each entry of `order`.
    pub scores: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RankingResult {
    pub probes: Vec<ProbeRanking>,
    pub gallery_person_ids: Vec<String>,
    /// Number of probe/gallery comparisons that involved a zero vector.
    pub degenerate_scores: usize,
}

impl RankingResult {
    pub fn gallery_len(&self) -> usize {
        self.gallery_person_ids.len()
    }

    /// 1-based rank of the first gallery entry sharing the probe's identity.
    pub fn match_rank(&self, probe: usize) -> Option<usize> {
        let p = &self.probes[probe];
        p.order.iter().position(|&g| self.gallery_person_ids[g] == p.person_id).map(|r| r + 1)
    }
}

/// Scores every probe slice against every gallery slice (both vectorized)
/// and sorts the gallery by descending similarity; ties go to the lower
/// gallery index.
pub fn score_and_rank(
    gallery: &DenseTensor3,
    gallery_ids: &[String],
    probes: &DenseTensor3,
    probe_ids: &[String],
) -> Result<RankingResult> {
    let [gs, gn, gm] = gallery.dims();
    let [ps, pn, pm] = probes.dims();
    if (gs, gn) != (ps, pn) {
        return Err(Error::arg(format!("gallery slices are {gs}x{gn} but probe slices are {ps}x{pn}")));
    }
    if gallery_ids.len() != gm || probe_ids.len() != pm {
        return Err(Error::arg(format!(
            "label counts ({}, {}) do not match sample counts ({gm}, {pm})",
            gallery_ids.len(),
            probe_ids.len()
        )));
    }
    let gallery_norms: Vec<f64> = (0..gm).map(|g| dot(gallery.slice_data(g), gallery.slice_data(g)).sqrt()).collect();
    let ranked: Vec<(ProbeRanking, usize)> = (0..pm)
        .into_par_iter()
        .map(|p| {
            let x = probes.slice_data(p);
            let nx = dot(x, x).sqrt();
            let mut degenerate = 0;
            let scores: Vec<f64> = (0..gm)
                .map(|g| {
                    let c = cosine_with_norms(x, gallery.slice_data(g), nx, gallery_norms[g]);
                    degenerate += c.degenerate as usize;
                    c.value
                })
                .collect();
            let mut order: Vec<usize> = (0..gm).collect();
            // stable sort keeps ascending gallery index among equal scores
            order.sort_by(|&a, &b| scores[b].total_cmp(&scores[a]));
            let sorted = order.iter().map(|&g| scores[g]).collect();
            (ProbeRanking { probe: p, person_id: probe_ids[p].clone(), order, scores: sorted }, degenerate)
        })
        .collect();
    let degenerate_scores = ranked.iter().map(|(_, d)| d).sum();
    if degenerate_scores > 0 {
        log::warn!("{degenerate_scores} similarity score(s) involved a zero-norm sample and were set to 0");
    }
    Ok(RankingResult {
        probes: ranked.into_iter().map(|(r, _)| r).collect(),
        gallery_person_ids: gallery_ids.to_vec(),
        degenerate_scores,
    })
}

/// Cumulative match characteristic: `values[r]` is the fraction of probes
/// whose identity appears within the top `r + 1` gallery entries.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CmcCurve {
    pub values: Vec<f64>,
}

impl CmcCurve {
    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// Value at 1-based rank `k`.
    pub fn at(&self, k: usize) -> Option<f64> {
        k.checked_sub(1).and_then(|i| self.values.get(i).copied())
    }
}

/// CMC over the first `k_max` ranks. Every probe identity must be present
/// in the gallery (closed set).
pub fn cmc(r: &RankingResult, k_max: usize) -> Result<CmcCurve> {
    if k_max == 0 || k_max > r.gallery_len() {
        return Err(Error::arg(format!("k_max must be in 1..={}, got {k_max}", r.gallery_len())));
    }
    if r.probes.is_empty() {
        return Err(Error::data("no probes to evaluate"));
    }
    let gallery: HashSet<&str> = r.gallery_person_ids.iter().map(String::as_str).collect();
    let mut missing: Vec<&str> = Vec::new();
    for p in &r.probes {
        if !gallery.contains(p.person_id.as_str()) && !missing.contains(&p.person_id.as_str()) {
            missing.push(&p.person_id);
        }
    }
    if !missing.is_empty() {
        return Err(Error::data(format!("probe identities absent from the gallery (open set): {missing:?}")));
    }
    let mut hits = vec![0usize; k_max];
    for i in 0..r.probes.len() {
        let rank = r.match_rank(i).expect("closed set checked above");
        if rank <= k_max {
            hits[rank - 1] += 1;
        }
    }
    let total = r.probes.len() as f64;
    let mut acc = 0;
    let values = hits
        .iter()
        .map(|h| {
            acc += h;
            acc as f64 / total
        })
        .collect();
    Ok(CmcCurve { values })
}

/// CMC values at the requested 1-based ranks, as percentages.
pub fn rank_k(c: &CmcCurve, ks: &[usize]) -> Result<Vec<f64>> {
    ks.iter()
        .map(|&k| {
            c.at(k)
                .map(|v| 100.0 * v)
                .ok_or_else(|| Error::arg(format!("rank {k} outside the CMC curve (1..={})", c.len())))
        })
        .collect()
}

/// Two-decimal percentage cells.
pub fn format_percentages(values: &[f64]) -> Vec<String> {
    values.iter().map(|v| format!("{v:.2}")).collect()
}
