//! Evaluation protocol: repeated random identity-level train/test splits,
//! camera-based gallery/probe assignment, dimension sweeps and aggregation,
//! plus a synthetic data generator for desk-scale experiments.
//!
//! Random streams: every trial owns a `Xoshiro256PlusPlus` generator seeded
//! through `seed_from_u64` (SplitMix64 expansion) with
//! `splitmix64(seed ^ splitmix64(trial_index + 1))`; the synthetic generator
//! seeds its own stream with `seed_from_u64(spec.seed)`. Identity lists are
//! shuffled with Fisher-Yates from `rand`.

use std::collections::{HashMap, HashSet};

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_distr::StandardNormal;
use rand_xoshiro::Xoshiro256PlusPlus;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::hdff::{hdff_pipeline, FeatureBlock, FusionConfig};
use crate::matching::{cmc, rank_k, score_and_rank, CmcCurve, RankingResult};
use crate::tensor::DenseTensor3;
use crate::txqda::{camera_order, fit, CrossViewSet, DimSpec, TxqdaConfig};

/// One line of a label file.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SampleLabel {
    pub sample_id: String,
    pub person_id: String,
    pub camera_id: String,
}

impl SampleLabel {
    pub fn new(sample_id: impl Into<String>, person_id: impl Into<String>, camera_id: impl Into<String>) -> Self {
        SampleLabel { sample_id: sample_id.into(), person_id: person_id.into(), camera_id: camera_id.into() }
    }
}

/// A named subset of feature blocks fused together for evaluation.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FeatureSet {
    pub name: String,
    /// Source tags of the participating blocks, in fusion order.
    pub blocks: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ExperimentConfig {
    pub trials: usize,
    /// Fraction of identities used for training (rounded); ignored when `train_count` is set.
    pub train_fraction: f64,
    pub train_count: Option<usize>,
    pub rng_seed: u64,
    /// Reduced dimensions to sweep; empty means `txqda.target_dims` only.
    pub dims: Vec<DimSpec>,
    pub txqda: TxqdaConfig,
    pub fusion: FusionConfig,
    /// 1-based ranks reported in tables.
    pub ranks: Vec<usize>,
    /// Feature configurations to evaluate; empty means every block alone plus all blocks fused.
    pub feature_sets: Vec<FeatureSet>,
    /// Also report cosine matching on the unprojected tensors.
    pub baseline: bool,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        ExperimentConfig {
            trials: 10,
            train_fraction: 0.5,
            train_count: None,
            rng_seed: 0,
            dims: Vec::new(),
            txqda: TxqdaConfig::default(),
            fusion: FusionConfig::default(),
            ranks: vec![1, 5, 10, 15, 20],
            feature_sets: Vec::new(),
            baseline: false,
        }
    }
}

impl ExperimentConfig {
    pub fn validate(&self) -> Result<()> {
        if self.trials == 0 {
            return Err(Error::arg("trials must be at least 1"));
        }
        if self.train_count.is_none() && !(self.train_fraction > 0.0 && self.train_fraction < 1.0) {
            return Err(Error::arg(format!("train_fraction must be in (0, 1), got {}", self.train_fraction)));
        }
        if self.ranks.is_empty() || self.ranks.contains(&0) {
            return Err(Error::arg("ranks must be a nonempty list of positive integers"));
        }
        self.txqda.validate()
    }

    fn dim_sweep(&self) -> Vec<DimSpec> {
        if self.dims.is_empty() {
            vec![self.txqda.target_dims]
        } else {
            self.dims.clone()
        }
    }
}

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Random stream owned by one trial.
pub fn trial_rng(seed: u64, trial_index: usize) -> Xoshiro256PlusPlus {
    Xoshiro256PlusPlus::seed_from_u64(splitmix64(seed ^ splitmix64(trial_index as u64 + 1)))
}

/// Identity-level random split for one trial. Both halves keep the input order.
pub fn split_trial(ids: &[String], cfg: &ExperimentConfig, trial_index: usize) -> Result<(Vec<String>, Vec<String>)> {
    let mut unique: Vec<&String> = Vec::with_capacity(ids.len());
    let mut seen = HashSet::new();
    for id in ids {
        if seen.insert(id) {
            unique.push(id);
        }
    }
    let n = unique.len();
    if n < 2 {
        return Err(Error::data(format!("need at least 2 identities to split, found {n}")));
    }
    let n_train = match cfg.train_count {
        Some(c) if c == 0 || c >= n => {
            return Err(Error::data(format!("train_count {c} must leave both sides nonempty ({n} identities)")));
        }
        Some(c) => c,
        None => ((cfg.train_fraction * n as f64).round() as usize).clamp(1, n - 1),
    };
    let mut order: Vec<usize> = (0..n).collect();
    order.shuffle(&mut trial_rng(cfg.rng_seed, trial_index));
    let mut is_train = vec![false; n];
    for &i in &order[..n_train] {
        is_train[i] = true;
    }
    let train = (0..n).filter(|&i| is_train[i]).map(|i| unique[i].clone()).collect();
    let test = (0..n).filter(|&i| !is_train[i]).map(|i| unique[i].clone()).collect();
    Ok((train, test))
}

/// Sample indices of one trial.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TrialSamples {
    pub train: Vec<usize>,
    pub gallery: Vec<usize>,
    pub probes: Vec<usize>,
}

/// Train samples are every sample of a training identity; gallery and probes
/// are the test identities' samples from the first and second camera.
pub fn assign_samples(labels: &[SampleLabel], train_ids: &[String], test_ids: &[String], gallery_camera: &str) -> TrialSamples {
    let train: HashSet<&str> = train_ids.iter().map(String::as_str).collect();
    let test: HashSet<&str> = test_ids.iter().map(String::as_str).collect();
    let mut out = TrialSamples { train: Vec::new(), gallery: Vec::new(), probes: Vec::new() };
    for (i, l) in labels.iter().enumerate() {
        if train.contains(l.person_id.as_str()) {
            out.train.push(i);
        } else if test.contains(l.person_id.as_str()) {
            if l.camera_id == gallery_camera {
                out.gallery.push(i);
            } else {
                out.probes.push(i);
            }
        }
    }
    out
}

/// Result of one (feature set, dimension) cell in one trial.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrialEntry {
    pub feature_set: String,
    pub dim: String,
    pub cmc: CmcCurve,
    /// Reduced `(s', n')` actually used; the full sizes for the baseline.
    pub chosen_dims: (usize, usize),
    pub objective_trace: [Vec<f64>; 2],
    #[serde(skip)]
    pub seconds: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrialReport {
    pub index: usize,
    pub train_persons: Vec<String>,
    pub test_persons: Vec<String>,
    pub samples: TrialSamples,
    pub entries: Vec<TrialEntry>,
}

/// Mean and spread of one (feature set, dimension) cell across trials.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AggregateRow {
    pub feature_set: String,
    pub dim: String,
    pub mean_cmc: Vec<f64>,
    /// Sample standard deviation per rank (zero for a single trial).
    pub std_cmc: Vec<f64>,
    /// Mean CMC at the configured ranks, in percent.
    pub rank_percent: Vec<f64>,
    pub rank_std_percent: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentReport {
    pub ranks: Vec<usize>,
    pub feature_sets: Vec<String>,
    pub dims: Vec<String>,
    pub aggregate: Vec<AggregateRow>,
    pub trials: Vec<TrialReport>,
}

impl ExperimentReport {
    pub fn row(&self, feature_set: &str, dim: &str) -> Option<&AggregateRow> {
        self.aggregate.iter().find(|r| r.feature_set == feature_set && r.dim == dim)
    }

    /// Wall-clock seconds per trial and cell, in report order.
    pub fn timings(&self) -> Vec<(usize, String, String, f64)> {
        self.trials
            .iter()
            .flat_map(|t| t.entries.iter().map(move |e| (t.index, e.feature_set.clone(), e.dim.clone(), e.seconds)))
            .collect()
    }
}

/// Row label of the no-learning baseline.
pub const BASELINE_DIM: &str = "raw";

fn resolve_feature_sets(blocks: &[FeatureBlock], cfg: &ExperimentConfig) -> Result<Vec<(String, Vec<usize>)>> {
    let find = |tag: &str| {
        blocks
            .iter()
            .position(|b| b.source_tag() == tag)
            .ok_or_else(|| Error::arg(format!("feature set refers to unknown block '{tag}'")))
    };
    if !cfg.feature_sets.is_empty() {
        return cfg
            .feature_sets
            .iter()
            .map(|fs| {
                if fs.blocks.is_empty() {
                    return Err(Error::arg(format!("feature set '{}' has no blocks", fs.name)));
                }
                Ok((fs.name.clone(), fs.blocks.iter().map(|t| find(t)).collect::<Result<_>>()?))
            })
            .collect();
    }
    let mut sets: Vec<(String, Vec<usize>)> =
        blocks.iter().enumerate().map(|(i, b)| (b.source_tag().to_string(), vec![i])).collect();
    if blocks.len() > 1 {
        let name = blocks.iter().map(|b| b.source_tag()).collect::<Vec<_>>().join("+");
        sets.push((name, (0..blocks.len()).collect()));
    }
    Ok(sets)
}

fn mean_and_std(curves: &[&CmcCurve]) -> (Vec<f64>, Vec<f64>) {
    let len = curves.iter().map(|c| c.len()).min().unwrap_or(0);
    let n = curves.len() as f64;
    let mut mean = vec![0.0; len];
    let mut std = vec![0.0; len];
    for r in 0..len {
        let m = curves.iter().map(|c| c.values[r]).sum::<f64>() / n;
        mean[r] = m;
        if curves.len() > 1 {
            let var = curves.iter().map(|c| (c.values[r] - m).powi(2)).sum::<f64>() / (n - 1.0);
            std[r] = var.sqrt();
        }
    }
    (mean, std)
}

struct PreparedSet {
    name: String,
    tensor: DenseTensor3,
}

/// Runs every trial of the protocol and aggregates the CMC curves.
///
/// Fusion runs once over all samples; TXQDA only ever sees the training
/// identities of a trial.
pub fn run_experiment(blocks: &[FeatureBlock], labels: &[SampleLabel], cfg: &ExperimentConfig) -> Result<ExperimentReport> {
    cfg.validate()?;
    if blocks.is_empty() {
        return Err(Error::arg("no feature blocks"));
    }
    for b in blocks {
        if b.n_samples() != labels.len() {
            return Err(Error::data(format!(
                "block '{}' has {} samples but there are {} labels",
                b.source_tag(),
                b.n_samples(),
                labels.len()
            )));
        }
    }
    let mut cameras: Vec<&str> = Vec::new();
    for l in labels {
        if !cameras.contains(&l.camera_id.as_str()) {
            cameras.push(&l.camera_id);
        }
    }
    if cameras.len() != 2 {
        return Err(Error::data(format!("expected exactly two cameras, found {cameras:?}")));
    }
    cameras.sort_by(|a, b| camera_order(a, b));
    let gallery_camera = cameras[0].to_string();

    // identities usable for matching need a sample in both views
    let mut views: HashMap<&str, [bool; 2]> = HashMap::new();
    let mut persons: Vec<String> = Vec::new();
    for l in labels {
        let e = views.entry(&l.person_id).or_insert_with(|| {
            persons.push(l.person_id.clone());
            [false; 2]
        });
        e[(l.camera_id != gallery_camera) as usize] = true;
    }
    let (paired, unpaired): (Vec<String>, Vec<String>) =
        persons.into_iter().partition(|p| views[p.as_str()].iter().all(|&v| v));
    if !unpaired.is_empty() {
        log::warn!("{} identities seen by a single camera are excluded: {unpaired:?}", unpaired.len());
    }

    let sets = resolve_feature_sets(blocks, cfg)?;
    let prepared: Vec<PreparedSet> = sets
        .iter()
        .map(|(name, idx)| {
            let chosen: Vec<FeatureBlock> = idx.iter().map(|&i| blocks[i].clone()).collect();
            let tensor = hdff_pipeline(&chosen, &cfg.fusion).map_err(|e| e.context(format!("feature set '{name}'")))?;
            Ok(PreparedSet { name: name.clone(), tensor })
        })
        .collect::<Result<_>>()?;
    let sweep = cfg.dim_sweep();

    let trials: Vec<TrialReport> = (0..cfg.trials)
        .into_par_iter()
        .map(|t| run_trial(t, &prepared, labels, &paired, &gallery_camera, &sweep, cfg).map_err(|e| e.context(format!("trial {t}"))))
        .collect::<Result<_>>()?;

    let mut dims: Vec<String> = sweep.iter().map(DimSpec::label).collect();
    if cfg.baseline {
        dims.insert(0, BASELINE_DIM.to_string());
    }
    let mut aggregate = Vec::new();
    for set in &prepared {
        for dim in &dims {
            let curves: Vec<&CmcCurve> = trials
                .iter()
                .map(|t| &t.entries.iter().find(|e| e.feature_set == set.name && &e.dim == dim).unwrap().cmc)
                .collect();
            let (mean_cmc, std_cmc) = mean_and_std(&curves);
            let mean_curve = CmcCurve { values: mean_cmc.clone() };
            let rank_percent = rank_k(&mean_curve, &cfg.ranks).map_err(|e| e.context("reporting ranks"))?;
            let rank_std_percent = cfg.ranks.iter().map(|&k| 100.0 * std_cmc[k - 1]).collect();
            aggregate.push(AggregateRow {
                feature_set: set.name.clone(),
                dim: dim.clone(),
                mean_cmc,
                std_cmc,
                rank_percent,
                rank_std_percent,
            });
        }
    }
    Ok(ExperimentReport {
        ranks: cfg.ranks.clone(),
        feature_sets: prepared.iter().map(|s| s.name.clone()).collect(),
        dims,
        aggregate,
        trials,
    })
}

fn run_trial(
    index: usize,
    sets: &[PreparedSet],
    labels: &[SampleLabel],
    persons: &[String],
    gallery_camera: &str,
    sweep: &[DimSpec],
    cfg: &ExperimentConfig,
) -> Result<TrialReport> {
    let (train_persons, test_persons) = split_trial(persons, cfg, index)?;
    let samples = assign_samples(labels, &train_persons, &test_persons, gallery_camera);
    let pick = |idx: &[usize], f: fn(&SampleLabel) -> &String| idx.iter().map(|&i| f(&labels[i]).clone()).collect::<Vec<_>>();
    let train_person_ids = pick(&samples.train, |l| &l.person_id);
    let train_camera_ids = pick(&samples.train, |l| &l.camera_id);
    let gallery_ids = pick(&samples.gallery, |l| &l.person_id);
    let probe_ids = pick(&samples.probes, |l| &l.person_id);

    let max_rank = cfg.ranks.iter().copied().max().unwrap_or(1);
    let report_len = samples.gallery.len().max(max_rank);
    if max_rank > samples.gallery.len() {
        log::warn!(
            "trial {index}: gallery has {} samples; ranks above that report the full-gallery value",
            samples.gallery.len()
        );
    }
    let mut entries = Vec::new();
    for set in sets {
        let gallery = set.tensor.select_slices(&samples.gallery)?;
        let probes = set.tensor.select_slices(&samples.probes)?;
        let [s, n, _] = set.tensor.dims();
        if cfg.baseline {
            let start = Stopwatch::start();
            let ranking = score_and_rank(&gallery, &gallery_ids, &probes, &probe_ids)?;
            entries.push(TrialEntry {
                feature_set: set.name.clone(),
                dim: BASELINE_DIM.to_string(),
                cmc: padded_cmc(&ranking, report_len)?,
                chosen_dims: (s, n),
                objective_trace: [Vec::new(), Vec::new()],
                seconds: start.seconds(),
            });
        }
        let train = CrossViewSet::new(set.tensor.select_slices(&samples.train)?, train_person_ids.clone(), train_camera_ids.clone())?;
        for dim in sweep {
            let start = Stopwatch::start();
            let txqda = TxqdaConfig { target_dims: *dim, ..cfg.txqda.clone() };
            let model = fit(&train, &txqda).map_err(|e| e.context(format!("feature set '{}', dims {dim}", set.name)))?;
            let ranking = score_and_rank(&model.transform(&gallery)?, &gallery_ids, &model.transform(&probes)?, &probe_ids)?;
            entries.push(TrialEntry {
                feature_set: set.name.clone(),
                dim: dim.label(),
                cmc: padded_cmc(&ranking, report_len)?,
                chosen_dims: model.reduced_dims(),
                objective_trace: model.objective_trace.clone(),
                seconds: start.seconds(),
            });
        }
    }
    Ok(TrialReport { index, train_persons, test_persons, samples, entries })
}

/// Full-gallery CMC extended to `len` ranks with its final value (1 in a closed set).
fn padded_cmc(ranking: &RankingResult, len: usize) -> Result<CmcCurve> {
    let mut c = cmc(ranking, ranking.gallery_len())?;
    let last = *c.values.last().expect("nonempty gallery");
    c.values.resize(len.max(c.values.len()), last);
    Ok(c)
}

/// Parameters of the synthetic cross-view data model.
///
/// Each block's feature vector is read as `parts` consecutive parts. For every
/// identity a latent `rank x parts` matrix is drawn per block and mapped into
/// each part through a fixed `(d/parts) x rank` loading, so class information
/// lives in a low-dimensional mode-1 subspace. Each camera adds a fixed random
/// offset vector per block. Every sample adds structured noise through a
/// second fixed loading (scale `nuisance · noise`) plus isotropic Gaussian
/// noise (scale `noise`).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SyntheticSpec {
    pub identities: usize,
    pub samples_per_view: usize,
    /// Feature lengths `(j, v)` of the two blocks.
    pub dims: (usize, usize),
    pub parts: usize,
    pub rank: usize,
    pub class_signal: f64,
    pub view_offset: f64,
    /// Per-sample structured noise in a low-rank subspace of each part, as a
    /// multiple of `noise`.
    pub nuisance: f64,
    pub noise: f64,
    pub seed: u64,
}

impl Default for SyntheticSpec {
    fn default() -> Self {
        SyntheticSpec {
            identities: 20,
            samples_per_view: 2,
            dims: (64, 32),
            parts: 4,
            rank: 2,
            class_signal: 1.0,
            view_offset: 1.0,
            nuisance: 2.5,
            noise: 0.6,
            seed: 0,
        }
    }
}

impl SyntheticSpec {
    pub fn validate(&self) -> Result<()> {
        let (j, v) = self.dims;
        if self.identities < 2 || self.samples_per_view == 0 || j == 0 || v == 0 || self.parts == 0 || self.rank == 0 {
            return Err(Error::arg("synthetic counts must be positive (and at least 2 identities)"));
        }
        for d in [j, v] {
            if d % self.parts != 0 {
                return Err(Error::arg(format!(
                    "synthetic feature dimension d={d} is not divisible by the number of parts n={}",
                    self.parts
                )));
            }
            if self.rank > d / self.parts {
                return Err(Error::arg(format!("rank {} exceeds part length {}", self.rank, d / self.parts)));
            }
        }
        for (name, x) in [("class_signal", self.class_signal), ("view_offset", self.view_offset), ("nuisance", self.nuisance), ("noise", self.noise)] {
            if !(x >= 0.0) || !x.is_finite() {
                return Err(Error::arg(format!("{name} must be a nonnegative number, got {x}")));
            }
        }
        Ok(())
    }
}

/// Source tags of the two synthetic blocks.
pub const SYNTHETIC_TAGS: [&str; 2] = ["x", "y"];

fn gaussian(rng: &mut Xoshiro256PlusPlus) -> f64 {
    rng.sample(StandardNormal)
}

/// Draws two feature blocks and their labels. Samples are ordered by
/// identity, then camera (`"1"` then `"2"`), then repetition.
pub fn generate_synthetic(spec: &SyntheticSpec) -> Result<(Vec<FeatureBlock>, Vec<SampleLabel>)> {
    spec.validate()?;
    let mut rng = Xoshiro256PlusPlus::seed_from_u64(spec.seed);
    let n = spec.parts;
    let dims = [spec.dims.0, spec.dims.1];
    let part_len = dims.map(|d| d / n);

    let loadings: Vec<Vec<f64>> = part_len
        .iter()
        .map(|&p| (0..p * spec.rank).map(|_| gaussian(&mut rng) / (spec.rank as f64).sqrt()).collect())
        .collect();
    let nuisance_loadings: Vec<Vec<f64>> = part_len
        .iter()
        .map(|&p| (0..p * spec.rank).map(|_| gaussian(&mut rng) / (spec.rank as f64).sqrt()).collect())
        .collect();
    let offsets: Vec<[Vec<f64>; 2]> = dims
        .iter()
        .map(|&d| [0, 1].map(|_| (0..d).map(|_| spec.view_offset * gaussian(&mut rng)).collect()))
        .collect();

    let mut vectors: [Vec<Vec<f64>>; 2] = [Vec::new(), Vec::new()];
    let mut labels = Vec::new();
    for id in 0..spec.identities {
        // class mean of each block: per part, loading · latent column
        let means: Vec<Vec<f64>> = (0..2)
            .map(|b| {
                let latent: Vec<f64> = (0..spec.rank * n).map(|_| spec.class_signal * gaussian(&mut rng)).collect();
                let p = part_len[b];
                let mut mean = vec![0.0; dims[b]];
                for part in 0..n {
                    for row in 0..p {
                        mean[part * p + row] =
                            (0..spec.rank).map(|r| loadings[b][row + p * r] * latent[r + spec.rank * part]).sum();
                    }
                }
                mean
            })
            .collect();
        for view in 0..2 {
            for rep in 0..spec.samples_per_view {
                for b in 0..2 {
                    let p = part_len[b];
                    let latent: Vec<f64> = (0..spec.rank * n).map(|_| spec.noise * spec.nuisance * gaussian(&mut rng)).collect();
                    let v = (0..dims[b])
                        .map(|i| {
                            let (row, part) = (i % p, i / p);
                            let structured: f64 = (0..spec.rank)
                                .map(|r| nuisance_loadings[b][row + p * r] * latent[r + spec.rank * part])
                                .sum();
                            means[b][i] + offsets[b][view][i] + structured + spec.noise * gaussian(&mut rng)
                        })
                        .collect();
                    vectors[b].push(v);
                }
                labels.push(SampleLabel::new(
                    format!("s{id:04}_{}_{rep}", view + 1),
                    format!("id{id:04}"),
                    (view + 1).to_string(),
                ));
            }
        }
    }
    let [x, y] = vectors;
    Ok((vec![FeatureBlock::new(SYNTHETIC_TAGS[0], x)?, FeatureBlock::new(SYNTHETIC_TAGS[1], y)?], labels))
}

/// Table with a group header per feature set and one row per dimension,
/// mirroring the usual CMC score table (`Dim.`, `Rank-k` columns).
pub fn table_markdown(report: &ExperimentReport) -> String {
    let k = report.ranks.len();
    let mut out = String::new();
    out.push_str("| |");
    for set in &report.feature_sets {
        out.push_str(&format!(" {set} |"));
        out.push_str(&" |".repeat(k - 1));
    }
    out.push('\n');
    out.push_str("|---|");
    out.push_str(&"---|".repeat(k * report.feature_sets.len()));
    out.push('\n');
    out.push_str("| Dim. |");
    for _ in &report.feature_sets {
        for r in &report.ranks {
            out.push_str(&format!(" Rank-{r} |"));
        }
    }
    out.push('\n');
    for dim in &report.dims {
        out.push_str(&format!("| {dim} |"));
        for set in &report.feature_sets {
            let row = report.row(set, dim).expect("every cell is computed");
            for v in &row.rank_percent {
                out.push_str(&format!(" {v:.2} |"));
            }
        }
        out.push('\n');
    }
    out
}

/// Same grid as [`table_markdown`] in CSV form (`feature_set,Dim,Rank-1,...`).
pub fn table_csv(report: &ExperimentReport) -> String {
    let mut out = String::from("feature_set,Dim");
    for r in &report.ranks {
        out.push_str(&format!(",Rank-{r}"));
    }
    out.push('\n');
    for set in &report.feature_sets {
        for dim in &report.dims {
            let row = report.row(set, dim).expect("every cell is computed");
            out.push_str(&format!("{set},{dim}"));
            for v in &row.rank_percent {
                out.push_str(&format!(",{v:.2}"));
            }
            out.push('\n');
        }
    }
    out
}

// `Instant` panics on wasm32-unknown-unknown, so timings read zero there.
struct Stopwatch {
    #[cfg(not(target_arch = "wasm32"))]
    start: std::time::Instant,
}

impl Stopwatch {
    fn start() -> Self {
        Stopwatch {
            #[cfg(not(target_arch = "wasm32"))]
            start: std::time::Instant::now(),
        }
    }

    fn seconds(&self) -> f64 {
        #[cfg(not(target_arch = "wasm32"))]
        return self.start.elapsed().as_secs_f64();
        #[cfg(target_arch = "wasm32")]
        return 0.0;
    }
}
