//! File formats.
//!
//! * `TSR3` tensors: magic `TSR3`, `u16` version (1), three `u32` dims, then
//!   the `f64` payload in layout order; all little-endian.
//! * Feature files: a `#FEAT v1 d=<d> m=<m>` header line followed by `m`
//!   lines of `d` comma-separated decimals.
//! * Label files: `m` lines of `<sample_id>,<person_id>,<camera_id>`.
//! * Model files: magic `TXQM`, `u16` version (1), `u32` header length, a
//!   JSON header, then `u1` and `u2` as `TSR3` blocks with dims `(rows, cols, 1)`.

use std::fs;
use std::io::{BufRead, BufReader, BufWriter, Read, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::harness::SampleLabel;
use crate::hdff::FeatureBlock;
use crate::matching::{CmcCurve, RankingResult};
use crate::tensor::{DenseMatrix, DenseTensor3};
use crate::txqda::{ProjectionSet, TxqdaConfig};

pub const TENSOR_MAGIC: &[u8; 4] = b"TSR3";
pub const TENSOR_VERSION: u16 = 1;
pub const MODEL_MAGIC: &[u8; 4] = b"TXQM";
pub const MODEL_VERSION: u16 = 1;

pub fn write_tensor<W: Write>(mut w: W, t: &DenseTensor3) -> Result<()> {
    w.write_all(TENSOR_MAGIC)?;
    w.write_all(&TENSOR_VERSION.to_le_bytes())?;
    for d in t.dims() {
        let d = u32::try_from(d).map_err(|_| Error::format(format!("dimension {d} does not fit in u32")))?;
        w.write_all(&d.to_le_bytes())?;
    }
    let mut buf = Vec::with_capacity(8 * t.len());
    for v in t.as_slice() {
        buf.extend_from_slice(&v.to_le_bytes());
    }
    w.write_all(&buf)?;
    Ok(())
}

fn read_array<const N: usize, R: Read>(r: &mut R) -> Result<[u8; N]> {
    let mut b = [0u8; N];
    r.read_exact(&mut b).map_err(|e| Error::format(format!("truncated tensor data: {e}")))?;
    Ok(b)
}

pub fn read_tensor<R: Read>(mut r: R) -> Result<DenseTensor3> {
    let magic: [u8; 4] = read_array(&mut r)?;
    if &magic != TENSOR_MAGIC {
        return Err(Error::format(format!("bad tensor magic {magic:?}")));
    }
    let version = u16::from_le_bytes(read_array(&mut r)?);
    if version != TENSOR_VERSION {
        return Err(Error::format(format!("unsupported tensor version {version}")));
    }
    let mut dims = [0usize; 3];
    for d in &mut dims {
        *d = u32::from_le_bytes(read_array(&mut r)?) as usize;
    }
    let len = dims.iter().try_fold(1usize, |acc, &d| acc.checked_mul(d)).ok_or_else(|| Error::format("tensor too large"))?;
    let mut bytes = vec![0u8; len.checked_mul(8).ok_or_else(|| Error::format("tensor too large"))?];
    r.read_exact(&mut bytes).map_err(|e| Error::format(format!("truncated tensor payload: {e}")))?;
    let data: Vec<f64> = bytes.chunks_exact(8).map(|c| f64::from_le_bytes(c.try_into().unwrap())).collect();
    if data.iter().any(|v| !v.is_finite()) {
        return Err(Error::data("tensor file contains non-finite values"));
    }
    DenseTensor3::new(dims, data).map_err(|e| Error::format(e.to_string()))
}

/// Writes via a temporary file in the destination directory and renames it into place.
pub fn write_atomic(path: &Path, f: impl FnOnce(&mut dyn Write) -> Result<()>) -> Result<()> {
    let dir = match path.parent() {
        Some(p) if !p.as_os_str().is_empty() => p,
        _ => Path::new("."),
    };
    let name = path.file_name().ok_or_else(|| Error::arg(format!("not a file path: {}", path.display())))?;
    let tmp = dir.join(format!(".{}.tmp{}", name.to_string_lossy(), std::process::id()));
    let result = (|| {
        let mut w = BufWriter::new(fs::File::create(&tmp)?);
        f(&mut w)?;
        w.flush()?;
        w.get_ref().sync_all()?;
        Ok(())
    })();
    match result {
        Ok(()) => fs::rename(&tmp, path).map_err(Error::from),
        Err(e) => {
            let _ = fs::remove_file(&tmp);
            Err(e)
        }
    }
}

pub fn save_tensor(path: &Path, t: &DenseTensor3) -> Result<()> {
    write_atomic(path, |w| write_tensor(w, t))
}

pub fn load_tensor(path: &Path) -> Result<DenseTensor3> {
    read_tensor(BufReader::new(fs::File::open(path)?)).map_err(|e| e.context(path.display()))
}

pub fn save_text(path: &Path, text: &str) -> Result<()> {
    write_atomic(path, |w| w.write_all(text.as_bytes()).map_err(Error::from))
}

/// Parses a `#FEAT v1` feature file.
pub fn read_features<R: BufRead>(r: R, source_tag: &str) -> Result<FeatureBlock> {
    let mut lines = r.lines().enumerate();
    let (_, header) = lines.next().ok_or_else(|| Error::format("empty feature file"))?;
    let header = header?;
    let mut fields = header.split_whitespace();
    if fields.next() != Some("#FEAT") || fields.next() != Some("v1") {
        return Err(Error::format(format!("bad feature header '{header}'")));
    }
    let mut d = None;
    let mut m = None;
    for f in fields {
        let parsed = |v: &str| v.parse::<usize>().map_err(|_| Error::format(format!("bad header field '{f}'")));
        match f.split_once('=') {
            Some(("d", v)) => d = Some(parsed(v)?),
            Some(("m", v)) => m = Some(parsed(v)?),
            _ => return Err(Error::format(format!("unknown header field '{f}'"))),
        }
    }
    let (d, m) = match (d, m) {
        (Some(d), Some(m)) if d > 0 && m > 0 => (d, m),
        _ => return Err(Error::format(format!("feature header needs positive d and m: '{header}'"))),
    };
    let mut vectors = Vec::with_capacity(m);
    for (lineno, line) in lines {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        let v = line
            .split(',')
            .map(|x| {
                x.trim().parse::<f64>().map_err(|_| Error::format(format!("line {}: bad number '{x}'", lineno + 1)))
            })
            .collect::<Result<Vec<_>>>()?;
        if v.len() != d {
            return Err(Error::format(format!("line {}: {} values, header says d={d}", lineno + 1, v.len())));
        }
        vectors.push(v);
    }
    if vectors.len() != m {
        return Err(Error::format(format!("{} feature rows, header says m={m}", vectors.len())));
    }
    FeatureBlock::new(source_tag, vectors)
}

pub fn write_features<W: Write>(mut w: W, block: &FeatureBlock) -> Result<()> {
    writeln!(w, "#FEAT v1 d={} m={}", block.dim(), block.n_samples())?;
    for v in block.vectors() {
        let line: Vec<String> = v.iter().map(|x| x.to_string()).collect();
        writeln!(w, "{}", line.join(","))?;
    }
    Ok(())
}

pub fn load_features(path: &Path, source_tag: &str) -> Result<FeatureBlock> {
    read_features(BufReader::new(fs::File::open(path)?), source_tag).map_err(|e| e.context(path.display()))
}

pub fn read_labels<R: BufRead>(r: R) -> Result<Vec<SampleLabel>> {
    let mut out = Vec::new();
    for (lineno, line) in r.lines().enumerate() {
        let line = line?;
        let line = line.trim();
        if line.is_empty() {
            continue;
        }
        let parts: Vec<&str> = line.split(',').map(str::trim).collect();
        match parts.as_slice() {
            [s, p, c] if !s.is_empty() && !p.is_empty() && !c.is_empty() => out.push(SampleLabel::new(*s, *p, *c)),
            _ => {
                return Err(Error::format(format!(
                    "label line {}: expected sample_id,person_id,camera_id, got '{line}'",
                    lineno + 1
                )))
            }
        }
    }
    if out.is_empty() {
        return Err(Error::format("label file is empty"));
    }
    Ok(out)
}

pub fn write_labels<W: Write>(mut w: W, labels: &[SampleLabel]) -> Result<()> {
    for l in labels {
        writeln!(w, "{},{},{}", l.sample_id, l.person_id, l.camera_id)?;
    }
    Ok(())
}

pub fn load_labels(path: &Path) -> Result<Vec<SampleLabel>> {
    read_labels(BufReader::new(fs::File::open(path)?)).map_err(|e| e.context(path.display()))
}

/// JSON header of a model file.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModelHeader {
    pub input_dims: [usize; 2],
    pub reduced_dims: [usize; 2],
    pub config: TxqdaConfig,
    pub objective_trace: [Vec<f64>; 2],
    pub spectra: [Vec<f64>; 2],
    pub lambdas: [f64; 2],
    pub iterations: usize,
    pub converged: bool,
}

fn matrix_as_tensor(m: &DenseMatrix) -> DenseTensor3 {
    DenseTensor3::new([m.rows(), m.cols(), 1], m.as_slice().to_vec()).expect("matrix shape is valid")
}

pub fn write_model<W: Write>(mut w: W, p: &ProjectionSet, config: &TxqdaConfig) -> Result<()> {
    let header = ModelHeader {
        input_dims: [p.u1.rows(), p.u2.rows()],
        reduced_dims: [p.u1.cols(), p.u2.cols()],
        config: config.clone(),
        objective_trace: p.objective_trace.clone(),
        spectra: p.spectra.clone(),
        lambdas: p.lambdas,
        iterations: p.iterations,
        converged: p.converged,
    };
    let json = serde_json::to_vec(&header).map_err(|e| Error::format(e.to_string()))?;
    w.write_all(MODEL_MAGIC)?;
    w.write_all(&MODEL_VERSION.to_le_bytes())?;
    w.write_all(&(json.len() as u32).to_le_bytes())?;
    w.write_all(&json)?;
    write_tensor(&mut w, &matrix_as_tensor(&p.u1))?;
    write_tensor(&mut w, &matrix_as_tensor(&p.u2))?;
    Ok(())
}

pub fn read_model<R: Read>(mut r: R) -> Result<(ProjectionSet, ModelHeader)> {
    let magic: [u8; 4] = read_array(&mut r)?;
    if &magic != MODEL_MAGIC {
        return Err(Error::format(format!("bad model magic {magic:?}")));
    }
    let version = u16::from_le_bytes(read_array(&mut r)?);
    if version != MODEL_VERSION {
        return Err(Error::format(format!("unsupported model version {version}")));
    }
    let len = u32::from_le_bytes(read_array(&mut r)?) as usize;
    let mut json = vec![0u8; len];
    r.read_exact(&mut json).map_err(|e| Error::format(format!("truncated model header: {e}")))?;
    let header: ModelHeader = serde_json::from_slice(&json).map_err(|e| Error::format(format!("model header: {e}")))?;
    let to_matrix = |t: DenseTensor3| -> Result<DenseMatrix> {
        let [rows, cols, one] = t.dims();
        if one != 1 {
            return Err(Error::format("projection block must have a singleton third mode"));
        }
        DenseMatrix::new(rows, cols, t.as_slice().to_vec())
    };
    let u1 = to_matrix(read_tensor(&mut r)?)?;
    let u2 = to_matrix(read_tensor(&mut r)?)?;
    if [u1.rows(), u2.rows()] != header.input_dims || [u1.cols(), u2.cols()] != header.reduced_dims {
        return Err(Error::format("model header dimensions disagree with the stored projections"));
    }
    let p = ProjectionSet {
        u1,
        u2,
        spectra: header.spectra.clone(),
        objective_trace: header.objective_trace.clone(),
        lambdas: header.lambdas,
        iterations: header.iterations,
        converged: header.converged,
    };
    Ok((p, header))
}

pub fn save_model(path: &Path, p: &ProjectionSet, config: &TxqdaConfig) -> Result<()> {
    write_atomic(path, |w| write_model(w, p, config))
}

pub fn load_model(path: &Path) -> Result<(ProjectionSet, ModelHeader)> {
    read_model(BufReader::new(fs::File::open(path)?)).map_err(|e| e.context(path.display()))
}

/// `probe_id,rank,gallery_id,score` with 1-based ranks, one line per probe/gallery pair.
pub fn ranking_csv(r: &RankingResult, probe_sample_ids: &[String], gallery_sample_ids: &[String]) -> String {
    let mut out = String::from("probe_id,rank,gallery_id,score\n");
    for p in &r.probes {
        for (rank, (&g, s)) in p.order.iter().zip(&p.scores).enumerate() {
            out.push_str(&format!("{},{},{},{}\n", probe_sample_ids[p.probe], rank + 1, gallery_sample_ids[g], s));
        }
    }
    out
}

/// `rank,probability` with 1-based ranks.
pub fn cmc_csv(c: &CmcCurve) -> String {
    let mut out = String::from("rank,probability\n");
    for (i, v) in c.values.iter().enumerate() {
        out.push_str(&format!("{},{}\n", i + 1, v));
    }
    out
}
