//! High-dimensional feature fusion.
//!
//! Each sample's feature vector is cut into `n` equal parts which become the
//! columns of a `(d/n) x n` matrix; the per-sample matrices of one modality are
//! stacked along mode 3, and modalities are concatenated along mode 1. The
//! fused tensor therefore has shape `(Σ d_b / n, n, m)`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::tensor::{DenseMatrix, DenseTensor3};

/// `m` feature vectors of one modality, all of length `d`.
#[derive(Debug, Clone, PartialEq)]
pub struct FeatureBlock {
    vectors: Vec<Vec<f64>>,
    source_tag: String,
}

impl FeatureBlock {
    pub fn new(source_tag: impl Into<String>, vectors: Vec<Vec<f64>>) -> Result<Self> {
        let source_tag = source_tag.into();
        let d = vectors
            .first()
            .map(Vec::len)
            .ok_or_else(|| Error::arg(format!("feature block '{source_tag}' has no samples")))?;
        if d == 0 {
            return Err(Error::arg(format!("feature block '{source_tag}' has zero-length vectors")));
        }
        for (i, v) in vectors.iter().enumerate() {
            if v.len() != d {
                return Err(Error::arg(format!(
                    "feature block '{source_tag}': sample {i} has length {}, expected {d}",
                    v.len()
                )));
            }
            if v.iter().any(|x| !x.is_finite()) {
                return Err(Error::data(format!(
                    "feature block '{source_tag}': sample {i} contains non-finite values"
                )));
            }
        }
        Ok(FeatureBlock { vectors, source_tag })
    }

    pub fn dim(&self) -> usize {
        self.vectors[0].len()
    }

    pub fn n_samples(&self) -> usize {
        self.vectors.len()
    }

    pub fn vectors(&self) -> &[Vec<f64>] {
        &self.vectors
    }

    pub fn source_tag(&self) -> &str {
        &self.source_tag
    }

    /// Same block restricted to (and reordered by) `indices`.
    pub fn select(&self, indices: &[usize]) -> Result<FeatureBlock> {
        let vectors = indices
            .iter()
            .map(|&i| {
                self.vectors.get(i).cloned().ok_or_else(|| Error::arg(format!("sample {i} out of range")))
            })
            .collect::<Result<Vec<_>>>()?;
        FeatureBlock::new(self.source_tag.clone(), vectors)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum Normalization {
    None,
    /// Scale each whole feature vector to unit Euclidean norm before splitting.
    /// Zero vectors are left untouched.
    #[default]
    L2PerVector,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct FusionConfig {
    pub n_parts: usize,
    pub normalize: Normalization,
}

impl Default for FusionConfig {
    fn default() -> Self {
        FusionConfig { n_parts: 4, normalize: Normalization::L2PerVector }
    }
}

fn check_divides(d: usize, n: usize) -> Result<()> {
    if n == 0 {
        return Err(Error::arg("number of parts must be positive"));
    }
    if !d.is_multiple_of(n) {
        return Err(Error::arg(format!(
            "feature dimension d={d} is not divisible by the number of parts n={n}"
        )));
    }
    Ok(())
}

/// Cuts `x` into `n` consecutive parts and uses them as the columns of a
/// `(d/n) x n` matrix.
pub fn split_to_sample_matrix(x: &[f64], n: usize) -> Result<DenseMatrix> {
    check_divides(x.len(), n)?;
    // column-major storage of the part matrix is exactly x
    DenseMatrix::new(x.len() / n, n, x.to_vec())
}

fn l2_normalized(v: &[f64]) -> Vec<f64> {
    let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
    if norm == 0.0 {
        v.to_vec()
    } else {
        v.iter().map(|x| x / norm).collect()
    }
}

/// Lifts one modality to a `(d/n, n, m)` tensor; slice `i` is sample `i`'s part matrix.
pub fn build_view_tensor(block: &FeatureBlock, n: usize) -> Result<DenseTensor3> {
    build_with(block, n, Normalization::None)
}

fn build_with(block: &FeatureBlock, n: usize, norm: Normalization) -> Result<DenseTensor3> {
    let d = block.dim();
    check_divides(d, n).map_err(|e| e.context(format!("block '{}'", block.source_tag())))?;
    let mut data = Vec::with_capacity(d * block.n_samples());
    for v in &block.vectors {
        match norm {
            Normalization::None => data.extend_from_slice(v),
            Normalization::L2PerVector => data.extend(l2_normalized(v)),
        }
    }
    DenseTensor3::new([d / n, n, block.n_samples()], data)
}

/// Concatenates `a` and `b` along mode 1 (`a` first).
pub fn fuse(a: &DenseTensor3, b: &DenseTensor3) -> Result<DenseTensor3> {
    let [sa, na, ma] = a.dims();
    let [sb, nb, mb] = b.dims();
    if na != nb {
        return Err(Error::arg(format!("cannot fuse: mode 2 differs ({na} vs {nb})")));
    }
    if ma != mb {
        return Err(Error::arg(format!("cannot fuse: mode 3 differs ({ma} vs {mb})")));
    }
    let s = sa + sb;
    let mut data = Vec::with_capacity(s * na * ma);
    for l in 0..ma {
        for j in 0..na {
            let col = j + na * l;
            data.extend_from_slice(&a.as_slice()[col * sa..(col + 1) * sa]);
            data.extend_from_slice(&b.as_slice()[col * sb..(col + 1) * sb]);
        }
    }
    DenseTensor3::new([s, na, ma], data)
}

/// Full fusion: optional per-vector normalization, splitting, stacking and
/// left-to-right mode-1 concatenation of every block.
pub fn hdff_pipeline(blocks: &[FeatureBlock], cfg: &FusionConfig) -> Result<DenseTensor3> {
    let first = blocks.first().ok_or_else(|| Error::arg("no feature blocks to fuse"))?;
    let m = first.n_samples();
    for b in blocks {
        if b.n_samples() != m {
            return Err(Error::arg(format!(
                "block '{}' has {} samples but block '{}' has {m}",
                b.source_tag(),
                b.n_samples(),
                first.source_tag()
            )));
        }
    }
    let mut fused = build_with(first, cfg.n_parts, cfg.normalize)?;
    for b in &blocks[1..] {
        fused = fuse(&fused, &build_with(b, cfg.n_parts, cfg.normalize)?)?;
    }
    Ok(fused)
}

/// Inverse of the mode-1 concatenation: cuts `fused` into slabs of the given
/// mode-1 sizes.
pub fn split_fused(fused: &DenseTensor3, mode1_sizes: &[usize]) -> Result<Vec<DenseTensor3>> {
    let [s, n, m] = fused.dims();
    if mode1_sizes.iter().sum::<usize>() != s || mode1_sizes.contains(&0) {
        return Err(Error::arg(format!("slab sizes {mode1_sizes:?} do not partition mode 1 of size {s}")));
    }
    let mut out = Vec::with_capacity(mode1_sizes.len());
    let mut start = 0;
    for &size in mode1_sizes {
        let mut data = Vec::with_capacity(size * n * m);
        for col in 0..n * m {
            let base = col * s + start;
            data.extend_from_slice(&fused.as_slice()[base..base + size]);
        }
        out.push(DenseTensor3::new([size, n, m], data)?);
        start += size;
    }
    Ok(out)
}

/// Recovers the per-sample feature vectors of a single-modality view tensor.
pub fn view_vectors(view: &DenseTensor3) -> Vec<Vec<f64>> {
    (0..view.n_slices()).map(|l| view.slice_data(l).to_vec()).collect()
}
