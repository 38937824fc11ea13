use std::fs;
use std::path::{Path, PathBuf};

use reid_core::harness::{table_csv, table_markdown, SYNTHETIC_TAGS};
use reid_core::io::{
    cmc_csv, load_features, load_labels, load_model, load_tensor, ranking_csv, save_model, save_tensor, save_text,
    write_atomic, write_features, write_labels,
};
use reid_core::txqda::Solver;
use reid_core::{
    cmc, fit, generate_synthetic, hdff_pipeline, run_experiment, score_and_rank, CrossViewSet, DimSpec,
    ExperimentConfig, ExperimentReport, FeatureBlock, FusionConfig, Normalization, SampleLabel, SyntheticSpec,
    TxqdaConfig,
};
use serde::Serialize;

use crate::config;
use crate::{CliError, EvaluateArgs, FuseArgs, RankArgs, SynthArgs, TrainArgs, TransformArgs};

const PLOT_RANKS: usize = 20;

fn require_file(path: &Path) -> Result<(), CliError> {
    if path.is_file() {
        Ok(())
    } else {
        Err(CliError::Usage(format!("input file {} does not exist", path.display())))
    }
}

fn require_out_parent(path: &Path) -> Result<(), CliError> {
    match path.parent() {
        Some(p) if !p.as_os_str().is_empty() && !p.is_dir() => {
            Err(CliError::Usage(format!("output directory {} does not exist", p.display())))
        }
        _ => Ok(()),
    }
}

fn ensure_dir(path: &Path) -> Result<(), CliError> {
    fs::create_dir_all(path).map_err(|e| CliError::Core(reid_core::Error::from(e).context(path.display())))
}

fn tag_of(path: &Path) -> String {
    path.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_else(|| path.display().to_string())
}

fn load_blocks(paths: &[PathBuf]) -> Result<Vec<FeatureBlock>, CliError> {
    let mut tags: Vec<String> = Vec::new();
    let mut blocks = Vec::new();
    for p in paths {
        let tag = tag_of(p);
        if tags.contains(&tag) {
            return Err(CliError::Usage(format!("two feature files share the block name '{tag}'")));
        }
        blocks.push(load_features(p, &tag)?);
        tags.push(tag);
    }
    Ok(blocks)
}

fn check_label_count(labels: &[SampleLabel], m: usize, what: &str) -> Result<(), CliError> {
    if labels.len() != m {
        return Err(reid_core::Error::Data(format!("{what} has {m} samples but the label file has {} lines", labels.len())).into());
    }
    Ok(())
}

fn to_json<T: Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("serializable");
    s.push('\n');
    s
}

#[derive(Serialize)]
struct FuseSidecar {
    n_parts: usize,
    normalize: bool,
    samples: usize,
    dims: [usize; 3],
    blocks: Vec<SidecarBlock>,
}

#[derive(Serialize)]
struct SidecarBlock {
    tag: String,
    source: String,
    d: usize,
}

pub fn fuse(a: FuseArgs) -> Result<(), CliError> {
    a.features.iter().try_for_each(|p| require_file(p))?;
    require_file(&a.labels)?;
    require_out_parent(&a.out)?;
    let blocks = load_blocks(&a.features)?;
    let labels = load_labels(&a.labels)?;
    check_label_count(&labels, blocks[0].n_samples(), "the first feature file")?;
    let normalize = if a.no_normalize { Normalization::None } else { Normalization::L2PerVector };
    let tensor = hdff_pipeline(&blocks, &FusionConfig { n_parts: a.parts, normalize })?;
    let sidecar = FuseSidecar {
        n_parts: a.parts,
        normalize: !a.no_normalize,
        samples: tensor.n_slices(),
        dims: tensor.dims(),
        blocks: blocks
            .iter()
            .zip(&a.features)
            .map(|(b, p)| SidecarBlock { tag: b.source_tag().to_string(), source: p.display().to_string(), d: b.dim() })
            .collect(),
    };
    save_tensor(&a.out, &tensor)?;
    let mut side = a.out.clone().into_os_string();
    side.push(".json");
    save_text(Path::new(&side), &to_json(&sidecar))?;
    log::info!("fused {} blocks into a {:?} tensor", blocks.len(), tensor.dims());
    Ok(())
}

pub fn train(a: TrainArgs) -> Result<(), CliError> {
    require_file(&a.tensor)?;
    require_file(&a.labels)?;
    require_out_parent(&a.out)?;
    let mut cfg = TxqdaConfig::default();
    if let Some(d) = &a.dims {
        cfg.target_dims = d.parse::<DimSpec>()?;
    }
    cfg.lambda = a.lambda.or(cfg.lambda);
    cfg.max_iters = a.max_iters.unwrap_or(cfg.max_iters);
    cfg.tol = a.tol.unwrap_or(cfg.tol);
    if let Some(s) = &a.solver {
        cfg.solver = s.parse::<Solver>()?;
    }
    cfg.validate()?;
    let tensor = load_tensor(&a.tensor)?;
    let labels = load_labels(&a.labels)?;
    check_label_count(&labels, tensor.n_slices(), "the tensor")?;
    let set = CrossViewSet::new(
        tensor,
        labels.iter().map(|l| l.person_id.clone()).collect(),
        labels.iter().map(|l| l.camera_id.clone()).collect(),
    )?;
    let model = fit(&set, &cfg)?;
    save_model(&a.out, &model, &cfg)?;
    let (s, n) = model.reduced_dims();
    log::info!("trained {s}x{n} projections in {} iteration(s), converged: {}", model.iterations, model.converged);
    Ok(())
}

pub fn transform(a: TransformArgs) -> Result<(), CliError> {
    require_file(&a.model)?;
    require_file(&a.tensor)?;
    require_out_parent(&a.out)?;
    let (model, _) = load_model(&a.model)?;
    let t = load_tensor(&a.tensor)?;
    save_tensor(&a.out, &model.transform(&t)?)?;
    Ok(())
}

fn plot_rows(values: &[f64]) -> impl Iterator<Item = (usize, f64)> + '_ {
    values.iter().take(PLOT_RANKS).enumerate().map(|(i, &v)| (i + 1, v))
}

pub fn rank(a: RankArgs) -> Result<(), CliError> {
    for p in [&a.gallery, &a.gallery_labels, &a.probes, &a.probe_labels] {
        require_file(p)?;
    }
    let gallery = load_tensor(&a.gallery)?;
    let probes = load_tensor(&a.probes)?;
    let gl = load_labels(&a.gallery_labels)?;
    let pl = load_labels(&a.probe_labels)?;
    check_label_count(&gl, gallery.n_slices(), "the gallery tensor")?;
    check_label_count(&pl, probes.n_slices(), "the probe tensor")?;
    ensure_dir(&a.out_dir)?;
    let ids = |ls: &[SampleLabel]| -> (Vec<String>, Vec<String>) {
        (ls.iter().map(|l| l.person_id.clone()).collect(), ls.iter().map(|l| l.sample_id.clone()).collect())
    };
    let (g_person, g_sample) = ids(&gl);
    let (p_person, p_sample) = ids(&pl);
    let ranking = score_and_rank(&gallery, &g_person, &probes, &p_person)?;
    let curve = cmc(&ranking, gallery.n_slices())?;
    save_text(&a.out_dir.join("ranking.csv"), &ranking_csv(&ranking, &p_sample, &g_sample))?;
    save_text(&a.out_dir.join("cmc.csv"), &cmc_csv(&curve))?;
    if a.emit_plot_data {
        let mut out = String::from("rank,probability\n");
        for (r, v) in plot_rows(&curve.values) {
            out.push_str(&format!("{r},{v}\n"));
        }
        save_text(&a.out_dir.join("cmc_plot.csv"), &out)?;
    }
    println!("Rank-1: {:.2}%", 100.0 * curve.values[0]);
    Ok(())
}

fn parse_dims(list: &str) -> Result<Vec<DimSpec>, CliError> {
    list.split(',').filter(|s| !s.trim().is_empty()).map(|s| s.parse::<DimSpec>().map_err(CliError::from)).collect()
}

#[derive(Serialize)]
struct Summary<'a> {
    config: &'a ExperimentConfig,
    report: &'a ExperimentReport,
}

#[derive(Serialize)]
struct Timing {
    trial: usize,
    feature_set: String,
    dim: String,
    seconds: f64,
}

pub fn evaluate(a: EvaluateArgs) -> Result<(), CliError> {
    a.features.iter().try_for_each(|p| require_file(p))?;
    require_file(&a.labels)?;
    if let Some(c) = &a.config {
        require_file(c)?;
    }
    let mut cfg: ExperimentConfig = config::load(a.config.as_deref(), &a.overrides)?;
    if let Some(t) = a.trials {
        cfg.trials = t;
    }
    if let Some(s) = a.seed {
        cfg.rng_seed = s;
    }
    if let Some(d) = &a.dims {
        cfg.dims = parse_dims(d)?;
    }
    cfg.baseline |= a.baseline;
    cfg.validate()?;

    let blocks = load_blocks(&a.features)?;
    let labels = load_labels(&a.labels)?;
    ensure_dir(&a.out_dir)?;
    let report = run_experiment(&blocks, &labels, &cfg)?;

    let mut agg = String::from("feature_set,dim,rank,mean,std\n");
    for row in &report.aggregate {
        for (i, (m, s)) in row.mean_cmc.iter().zip(&row.std_cmc).enumerate() {
            agg.push_str(&format!("{},{},{},{m},{s}\n", row.feature_set, row.dim, i + 1));
        }
    }
    save_text(&a.out_dir.join("cmc.csv"), &agg)?;

    let trial_dir = a.out_dir.join("trials");
    ensure_dir(&trial_dir)?;
    for t in &report.trials {
        let mut out = String::from("feature_set,dim,rank,probability\n");
        for e in &t.entries {
            for (i, v) in e.cmc.values.iter().enumerate() {
                out.push_str(&format!("{},{},{},{v}\n", e.feature_set, e.dim, i + 1));
            }
        }
        save_text(&trial_dir.join(format!("trial_{:02}.csv", t.index)), &out)?;
    }

    let markdown = table_markdown(&report);
    save_text(&a.out_dir.join("table.md"), &markdown)?;
    save_text(&a.out_dir.join("table.csv"), &table_csv(&report))?;
    save_text(&a.out_dir.join("summary.json"), &to_json(&Summary { config: &cfg, report: &report }))?;
    let timings: Vec<Timing> = report
        .timings()
        .into_iter()
        .map(|(trial, feature_set, dim, seconds)| Timing { trial, feature_set, dim, seconds })
        .collect();
    save_text(&a.out_dir.join("timings.json"), &to_json(&timings))?;

    if a.emit_plot_data {
        let mut out = String::from("feature_set,dim,rank,probability\n");
        for row in &report.aggregate {
            for (r, v) in plot_rows(&row.mean_cmc) {
                out.push_str(&format!("{},{},{r},{v}\n", row.feature_set, row.dim));
            }
        }
        save_text(&a.out_dir.join("cmc_plot.csv"), &out)?;
    }
    print!("{markdown}");
    Ok(())
}

pub fn synth(a: SynthArgs) -> Result<(), CliError> {
    if let Some(c) = &a.config {
        require_file(c)?;
    }
    let mut spec: SyntheticSpec = config::load(a.config.as_deref(), &a.overrides)?;
    if let Some(s) = a.seed {
        spec.seed = s;
    }
    spec.validate()?;
    let (blocks, labels) = generate_synthetic(&spec)?;
    ensure_dir(&a.out_dir)?;
    for (b, tag) in blocks.iter().zip(SYNTHETIC_TAGS) {
        write_atomic(&a.out_dir.join(format!("{tag}.feat")), |w| write_features(w, b))?;
    }
    write_atomic(&a.out_dir.join("labels.csv"), |w| write_labels(w, &labels))?;
    save_text(&a.out_dir.join("spec.json"), &to_json(&spec))?;
    log::info!("wrote {} samples of {} identities to {}", labels.len(), spec.identities, a.out_dir.display());
    Ok(())
}
