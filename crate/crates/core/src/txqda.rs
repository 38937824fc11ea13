//! Tensor cross-view quadratic discriminant analysis.
//!
//! Learns a mode-1 projection `u1` (features) and a mode-2 projection `u2`
//! (feature parts) that spread apart cross-view pairs of different persons
//! (extrinsic pairs) relative to cross-view pairs of the same person
//! (intrinsic pairs). Modes are optimized alternately with the opposite mode
//! held at its current projection. Each mode update maximizes the trace ratio
//! of the extrinsic scatter over the regularized intrinsic scatter; the
//! generalized eigenproblem of the two scatters picks the output size and the
//! starting basis.

use std::collections::HashMap;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::spectral::{gen_eig, sym_eig};
use crate::tensor::{DenseMatrix, DenseTensor3};

/// Which view a sample belongs to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum View {
    /// Gallery camera.
    A,
    /// Probe camera.
    B,
}

/// Training tensor with per-sample person and camera labels.
///
/// The two camera labels are ordered (numerically when both parse as
/// integers, lexically otherwise); the first is view A.
#[derive(Debug, Clone)]
pub struct CrossViewSet {
    tensor: DenseTensor3,
    person_ids: Vec<String>,
    camera_ids: Vec<String>,
    views: Vec<View>,
    /// Dense class index per sample, numbered by first appearance.
    classes: Vec<usize>,
    n_classes: usize,
    camera_a: String,
    camera_b: String,
}

/// Orders camera labels; integers compare numerically.
pub fn camera_order(a: &str, b: &str) -> std::cmp::Ordering {
    match (a.parse::<i64>(), b.parse::<i64>()) {
        (Ok(x), Ok(y)) => x.cmp(&y),
        _ => a.cmp(b),
    }
}

impl CrossViewSet {
    pub fn new(tensor: DenseTensor3, person_ids: Vec<String>, camera_ids: Vec<String>) -> Result<Self> {
        let m = tensor.n_slices();
        if person_ids.len() != m || camera_ids.len() != m {
            return Err(Error::arg(format!(
                "{m} samples but {} person labels and {} camera labels",
                person_ids.len(),
                camera_ids.len()
            )));
        }
        let mut cams: Vec<&String> = Vec::new();
        for c in &camera_ids {
            if !cams.contains(&c) {
                cams.push(c);
            }
        }
        if cams.len() != 2 {
            return Err(Error::data(format!(
                "expected exactly two camera views, found {}: {:?}",
                cams.len(),
                cams
            )));
        }
        cams.sort_by(|a, b| camera_order(a, b));
        let (camera_a, camera_b) = (cams[0].clone(), cams[1].clone());
        let views = camera_ids.iter().map(|c| if *c == camera_a { View::A } else { View::B }).collect();

        let mut index: HashMap<&str, usize> = HashMap::new();
        let mut classes = Vec::with_capacity(m);
        for p in &person_ids {
            let next = index.len();
            classes.push(*index.entry(p.as_str()).or_insert(next));
        }
        let n_classes = index.len();
        if n_classes < 2 {
            return Err(Error::data(format!("need at least 2 distinct persons, found {n_classes}")));
        }
        Ok(CrossViewSet { tensor, person_ids, camera_ids, views, classes, n_classes, camera_a, camera_b })
    }

    pub fn tensor(&self) -> &DenseTensor3 {
        &self.tensor
    }

    pub fn person_ids(&self) -> &[String] {
        &self.person_ids
    }

    pub fn camera_ids(&self) -> &[String] {
        &self.camera_ids
    }

    pub fn views(&self) -> &[View] {
        &self.views
    }

    pub fn len(&self) -> usize {
        self.person_ids.len()
    }

    pub fn is_empty(&self) -> bool {
        self.person_ids.is_empty()
    }

    /// Camera labels of view A (gallery) and view B (probe).
    pub fn cameras(&self) -> (&str, &str) {
        (&self.camera_a, &self.camera_b)
    }

    /// Persons that lack a sample in one of the two views, in first-appearance order.
    pub fn unpaired_persons(&self) -> Vec<String> {
        let mut seen = vec![[false; 2]; self.n_classes];
        let mut first: Vec<Option<usize>> = vec![None; self.n_classes];
        for (i, (&c, &v)) in self.classes.iter().zip(&self.views).enumerate() {
            seen[c][(v == View::B) as usize] = true;
            first[c].get_or_insert(i);
        }
        (0..self.n_classes)
            .filter(|&c| !(seen[c][0] && seen[c][1]))
            .map(|c| self.person_ids[first[c].unwrap()].clone())
            .collect()
    }

    /// Mode-k view of one sample after projecting the opposite mode:
    /// `S · u2` (I1 x r) for k = 1, `Sᵀ · u1` (I2 x r) for k = 2.
    fn mode_features(&self, sample: usize, u_other: &DenseMatrix, k: usize) -> Result<DenseMatrix> {
        let s = self.tensor.slice(sample);
        match k {
            1 => s.matmul(u_other),
            _ => s.tr_matmul(u_other),
        }
    }
}

fn check_scatter_args(set: &CrossViewSet, u_other: &DenseMatrix, k: usize) -> Result<usize> {
    let [s, n, _] = set.tensor.dims();
    let (size, other) = match k {
        1 => (s, n),
        2 => (n, s),
        _ => return Err(Error::arg(format!("scatter mode must be 1 or 2, got {k}"))),
    };
    if u_other.rows() != other {
        return Err(Error::arg(format!(
            "mode-{k} scatter needs an opposite-mode projection with {other} rows, got {}x{}",
            u_other.rows(),
            u_other.cols()
        )));
    }
    Ok(size)
}

// acc += w * x yᵀ
fn add_outer(acc: &mut DenseMatrix, x: &DenseMatrix, y: &DenseMatrix, w: f64) {
    let n = acc.rows();
    for r in 0..x.cols() {
        let xc = x.column(r);
        let yc = y.column(r);
        for j in 0..n {
            let yj = w * yc[j];
            if yj == 0.0 {
                continue;
            }
            let col = acc.column_mut(j);
            for (a, &xi) in col.iter_mut().zip(xc) {
                *a += xi * yj;
            }
        }
    }
}

fn add_into(acc: &mut DenseMatrix, x: &DenseMatrix) {
    let a = std::mem::replace(acc, DenseMatrix::zeros(1, 1));
    *acc = a.add(x).expect("same shape");
}

/// Intrinsic and extrinsic pair counts of a set (after dropping unpaired persons).
pub fn pair_counts(set: &CrossViewSet) -> (usize, usize) {
    let usable = usable_samples(set);
    let mut per_class = vec![[0usize; 2]; set.n_classes];
    for &i in &usable {
        per_class[set.classes[i]][(set.views[i] == View::B) as usize] += 1;
    }
    let n_a: usize = per_class.iter().map(|c| c[0]).sum();
    let n_b: usize = per_class.iter().map(|c| c[1]).sum();
    let intrinsic: usize = per_class.iter().map(|c| c[0] * c[1]).sum();
    (intrinsic, n_a * n_b - intrinsic)
}

fn usable_samples(set: &CrossViewSet) -> Vec<usize> {
    let mut seen = vec![[false; 2]; set.n_classes];
    for (&c, &v) in set.classes.iter().zip(&set.views) {
        seen[c][(v == View::B) as usize] = true;
    }
    (0..set.len()).filter(|&i| seen[set.classes[i]].iter().all(|&x| x)).collect()
}

/// Extrinsic and intrinsic scatter of mode `k` (1 or 2), with the opposite
/// mode projected by `u_other`.
///
/// For every cross-view pair `(a, b)` the difference `D = F_a − F_b` of the
/// projected mode-k representations contributes `D Dᵀ`; intrinsic pairs share
/// a person, extrinsic pairs do not. Each scatter is divided by its pair
/// count. The pair sums are assembled from per-class sums so the cost is
/// linear in the number of samples. Samples of persons seen in only one view
/// are excluded.
pub fn scatter_pair(set: &CrossViewSet, u_other: &DenseMatrix, k: usize) -> Result<(DenseMatrix, DenseMatrix)> {
    let size = check_scatter_args(set, u_other, k)?;
    let unpaired = set.unpaired_persons();
    if !unpaired.is_empty() {
        log::warn!(
            "{} person(s) lack a cross-view counterpart and are excluded from pair statistics: {:?}",
            unpaired.len(),
            unpaired
        );
    }
    let usable = usable_samples(set);

    let r = u_other.cols();
    let nc = set.n_classes;
    // per class and view: sample count, Σ F, Σ F Fᵀ
    let mut count = vec![[0usize; 2]; nc];
    let mut sums: Vec<[Option<DenseMatrix>; 2]> = (0..nc).map(|_| [None, None]).collect();
    let mut grams: Vec<[Option<DenseMatrix>; 2]> = (0..nc).map(|_| [None, None]).collect();
    for &i in &usable {
        let c = set.classes[i];
        let v = (set.views[i] == View::B) as usize;
        let f = set.mode_features(i, u_other, k)?;
        count[c][v] += 1;
        let g = grams[c][v].get_or_insert_with(|| DenseMatrix::zeros(size, size));
        add_outer(g, &f, &f, 1.0);
        match &mut sums[c][v] {
            Some(acc) => add_into(acc, &f),
            slot => *slot = Some(f),
        }
    }

    let n_a: usize = count.iter().map(|c| c[0]).sum();
    let n_b: usize = count.iter().map(|c| c[1]).sum();
    let n_intrinsic: usize = count.iter().map(|c| c[0] * c[1]).sum();
    let n_extrinsic = n_a * n_b - n_intrinsic;
    if n_intrinsic == 0 {
        return Err(Error::data("no intrinsic (same person, cross-view) pairs"));
    }
    if n_extrinsic == 0 {
        return Err(Error::data("no extrinsic (different person, cross-view) pairs"));
    }

    let mut total_sum = [DenseMatrix::zeros(size, r), DenseMatrix::zeros(size, r)];
    for class_sums in &sums {
        for v in 0..2 {
            if let Some(s) = &class_sums[v] {
                add_into(&mut total_sum[v], s);
            }
        }
    }

    let mut intrinsic = DenseMatrix::zeros(size, size);
    let mut extrinsic = DenseMatrix::zeros(size, size);
    // Σ_{a∈A, b∈B, different class} F_a F_bᵀ
    let mut cross_ext = DenseMatrix::zeros(size, size);
    add_outer(&mut cross_ext, &total_sum[0], &total_sum[1], 1.0);
    for c in 0..nc {
        let [na, nb] = count[c];
        if na == 0 || nb == 0 {
            continue;
        }
        let (ga, gb) = (grams[c][0].as_ref().unwrap(), grams[c][1].as_ref().unwrap());
        let (sa, sb) = (sums[c][0].as_ref().unwrap(), sums[c][1].as_ref().unwrap());
        // intrinsic: nb Σ_A F Fᵀ + na Σ_B F Fᵀ − S_A S_Bᵀ − S_B S_Aᵀ
        add_into(&mut intrinsic, &ga.scale(nb as f64));
        add_into(&mut intrinsic, &gb.scale(na as f64));
        add_outer(&mut intrinsic, sa, sb, -1.0);
        add_outer(&mut intrinsic, sb, sa, -1.0);
        add_into(&mut extrinsic, &ga.scale((n_b - nb) as f64));
        add_into(&mut extrinsic, &gb.scale((n_a - na) as f64));
        add_outer(&mut cross_ext, sa, sb, -1.0);
    }
    let cross_t = cross_ext.transpose();
    extrinsic = extrinsic.sub(&cross_ext)?.sub(&cross_t)?;

    let v_e = extrinsic.scale(1.0 / n_extrinsic as f64).symmetrized();
    let v_i = intrinsic.scale(1.0 / n_intrinsic as f64).symmetrized();
    Ok((v_e, v_i))
}

/// Reduced dimension request for one or both learned modes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum DimSpec {
    /// Keep every generalized eigenvalue above 1 (at least one column) in both modes.
    #[default]
    Auto,
    /// Reduce mode 1 to the given size; mode 2 keeps its full size.
    Mode1(usize),
    /// Explicit `(s', n')`.
    Pair(usize, usize),
}

impl DimSpec {
    pub fn targets(&self, n: usize) -> (Target, Target) {
        match *self {
            DimSpec::Auto => (Target::Auto, Target::Auto),
            DimSpec::Mode1(s) => (Target::Fixed(s), Target::Fixed(n)),
            DimSpec::Pair(s, n2) => (Target::Fixed(s), Target::Fixed(n2)),
        }
    }

    /// Row label used in result tables.
    pub fn label(&self) -> String {
        match *self {
            DimSpec::Auto => "auto".to_string(),
            DimSpec::Mode1(s) => s.to_string(),
            DimSpec::Pair(s, n) => format!("{s}x{n}"),
        }
    }
}

impl fmt::Display for DimSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.label())
    }
}

impl std::str::FromStr for DimSpec {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        if s.eq_ignore_ascii_case("auto") {
            return Ok(DimSpec::Auto);
        }
        let parse = |x: &str| {
            x.trim()
                .parse::<usize>()
                .ok()
                .filter(|&v| v > 0)
                .ok_or_else(|| Error::arg(format!("invalid dimension '{x}' in '{s}'")))
        };
        match s.split_once(['x', ',']) {
            Some((a, b)) => Ok(DimSpec::Pair(parse(a)?, parse(b)?)),
            None => Ok(DimSpec::Mode1(parse(s)?)),
        }
    }
}

#[derive(Serialize, Deserialize)]
#[serde(untagged)]
enum DimRepr {
    Single(usize),
    Pair([usize; 2]),
    Word(String),
}

impl Serialize for DimSpec {
    fn serialize<S: serde::Serializer>(&self, ser: S) -> std::result::Result<S::Ok, S::Error> {
        match *self {
            DimSpec::Auto => DimRepr::Word("auto".into()),
            DimSpec::Mode1(s) => DimRepr::Single(s),
            DimSpec::Pair(s, n) => DimRepr::Pair([s, n]),
        }
        .serialize(ser)
    }
}

impl<'de> Deserialize<'de> for DimSpec {
    fn deserialize<D: serde::Deserializer<'de>>(de: D) -> std::result::Result<Self, D::Error> {
        use serde::de::Error as _;
        match DimRepr::deserialize(de)? {
            DimRepr::Single(0) | DimRepr::Pair([0, _]) | DimRepr::Pair([_, 0]) => {
                Err(D::Error::custom("dimensions must be positive"))
            }
            DimRepr::Single(s) => Ok(DimSpec::Mode1(s)),
            DimRepr::Pair([s, n]) => Ok(DimSpec::Pair(s, n)),
            DimRepr::Word(w) => w.parse().map_err(D::Error::custom),
        }
    }
}

/// Number of projection columns for a single mode.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Target {
    Auto,
    Fixed(usize),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct TxqdaConfig {
    pub target_dims: DimSpec,
    /// Ridge added to the first mode-1 intrinsic scatter. `None` picks `1e-3 · trace(V_I) / dim`.
    ///
    /// Later solves use the same ridge per unit of `u1 ⊗ u2`, so a mode whose
    /// partner keeps `p` of `n` columns sees `λ · p / n`.
    pub lambda: Option<f64>,
    pub max_iters: usize,
    pub tol: f64,
    pub solver: Solver,
}

/// How each per-mode subproblem is optimized.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Solver {
    /// Orthonormal basis maximizing `Tr(uᵀEu) / Tr(uᵀDu)`, refined from the generalized eigenvectors.
    #[default]
    TraceRatio,
    /// Leading generalized eigenvectors; the recorded objective is `Tr((uᵀDu)⁻¹ uᵀEu)`.
    RatioTrace,
}

impl std::str::FromStr for Solver {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "trace_ratio" | "trace-ratio" => Ok(Solver::TraceRatio),
            "ratio_trace" | "ratio-trace" => Ok(Solver::RatioTrace),
            other => Err(Error::arg(format!("unknown solver {other:?}, expected trace_ratio or ratio_trace"))),
        }
    }
}

impl Default for TxqdaConfig {
    fn default() -> Self {
        TxqdaConfig { target_dims: DimSpec::Auto, lambda: None, max_iters: 5, tol: 1e-6, solver: Solver::TraceRatio }
    }
}

impl TxqdaConfig {
    pub fn validate(&self) -> Result<()> {
        if self.max_iters == 0 {
            return Err(Error::arg("max_iters must be at least 1"));
        }
        if !(self.tol >= 0.0) {
            return Err(Error::arg(format!("tol must be nonnegative, got {}", self.tol)));
        }
        if let Some(l) = self.lambda {
            if !(l >= 0.0) || !l.is_finite() {
                return Err(Error::arg(format!("lambda must be a nonnegative number, got {l}")));
            }
        }
        Ok(())
    }
}

/// Relative size of the automatic ridge.
pub const AUTO_LAMBDA_SCALE: f64 = 1e-3;

/// Floor of the automatic ridge relative to the extrinsic scale.
pub const AUTO_LAMBDA_FLOOR: f64 = 1e-9;

/// The ridge used for a given intrinsic scatter.
///
/// The automatic rule is floored by a tiny multiple of the extrinsic scale, so
/// an intrinsic scatter that vanishes up to rounding still factors; when both
/// scatters vanish an absolute constant is used.
pub fn resolve_lambda(lambda: Option<f64>, v_e: &DenseMatrix, v_i: &DenseMatrix) -> f64 {
    if let Some(l) = lambda {
        return l;
    }
    let dim = v_i.rows() as f64;
    let from_i = AUTO_LAMBDA_SCALE * v_i.trace() / dim;
    let floor = AUTO_LAMBDA_FLOOR * v_e.trace() / dim;
    let l = from_i.max(floor);
    if l > 0.0 {
        l
    } else {
        1e-12
    }
}

/// Result of one per-mode solve.
#[derive(Debug, Clone, PartialEq)]
pub struct ModeSolution {
    /// Orthonormal basis maximizing the trace ratio, one column per kept direction.
    pub u: DenseMatrix,
    /// Full generalized spectrum of `(V_E, V_I + λI)`, descending.
    pub spectrum: Vec<f64>,
    /// Objective at the returned `u`: `Tr(uᵀEu) / Tr(uᵀDu)` for the trace-ratio
    /// solver, the sum of kept eigenvalues for the ratio-trace solver.
    pub ratio: f64,
}

/// Slack used by the automatic rule when comparing eigenvalues with 1.
pub const AUTO_EIGEN_SLACK: f64 = 1e-9;

const TRACE_RATIO_MAX_STEPS: usize = 100;

/// Per-mode discriminant solve.
///
/// The number of kept directions comes from the generalized spectrum of
/// `(v_e, v_i + λI)`. The basis itself is the orthonormal `u` maximizing
/// `Tr(uᵀ v_e u) / Tr(uᵀ (v_i + λI) u)`, found by iterating
/// `u <- top eigenvectors of v_e - ρ (v_i + λI)` from the span of the leading
/// generalized eigenvectors.
pub fn solve_mode(v_e: &DenseMatrix, v_i: &DenseMatrix, lambda: f64, target: Target) -> Result<ModeSolution> {
    solve_mode_with(v_e, v_i, lambda, target, Solver::TraceRatio)
}

/// [`solve_mode`] with an explicit solver.
pub fn solve_mode_with(
    v_e: &DenseMatrix,
    v_i: &DenseMatrix,
    lambda: f64,
    target: Target,
    solver: Solver,
) -> Result<ModeSolution> {
    if !v_e.is_square() || v_e.rows() != v_i.rows() || v_e.cols() != v_i.cols() {
        return Err(Error::arg(format!(
            "solve_mode needs square scatters of equal size, got {}x{} and {}x{}",
            v_e.rows(),
            v_e.cols(),
            v_i.rows(),
            v_i.cols()
        )));
    }
    let mut denom = v_i.clone();
    denom.add_diagonal(lambda);
    let pairs = gen_eig(v_e, &denom)?;
    let dim = pairs.values.len();
    let keep = match target {
        Target::Fixed(k) if k == 0 || k > dim => {
            return Err(Error::arg(format!("cannot keep {k} of {dim} dimensions")));
        }
        Target::Fixed(k) => k,
        Target::Auto => pairs.values.iter().filter(|&&v| v > 1.0 + AUTO_EIGEN_SLACK).count().max(1),
    };

    if solver == Solver::RatioTrace {
        let u = pairs.vectors.leading_columns(keep)?;
        let ratio = pairs.values[..keep].iter().sum();
        return Ok(ModeSolution { u, spectrum: pairs.values, ratio });
    }
    let mut u = orthonormal_basis(&pairs.vectors.leading_columns(keep)?);
    if u.cols() < keep {
        // Degenerate start; fall back to coordinate axes.
        u = DenseMatrix::identity(dim).leading_columns(keep)?;
    }
    let mut rho = trace_ratio(&u, v_e, &denom)?;
    if keep < dim {
        // The ratio is flat to first order near the optimum, so the basis is
        // always taken from the last shifted eigenproblem rather than from the
        // step that first stalled the ratio.
        for _ in 0..TRACE_RATIO_MAX_STEPS {
            let shifted = v_e.sub(&denom.scale(rho))?.symmetrized();
            let cand = sym_eig(&shifted)?.vectors.leading_columns(keep)?;
            let next = trace_ratio(&cand, v_e, &denom)?;
            if next < rho - 1e-12 * rho.abs().max(1.0) {
                break;
            }
            let step = next - rho;
            u = cand;
            rho = next;
            if step <= 1e-14 * rho.abs().max(1.0) {
                break;
            }
        }
    }
    if !rho.is_finite() {
        return Err(Error::numeric("trace ratio is not finite"));
    }
    Ok(ModeSolution { u, spectrum: pairs.values, ratio: rho })
}

/// `Tr(uᵀ e u) / Tr(uᵀ d u)`.
pub fn trace_ratio(u: &DenseMatrix, e: &DenseMatrix, d: &DenseMatrix) -> Result<f64> {
    let num = u.tr_matmul(&e.matmul(u)?)?.trace();
    let den = u.tr_matmul(&d.matmul(u)?)?.trace();
    Ok(num / den)
}

/// Learned projections and fit diagnostics.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProjectionSet {
    pub u1: DenseMatrix,
    pub u2: DenseMatrix,
    /// Full generalized spectra of the final mode-1 and mode-2 solves.
    pub spectra: [Vec<f64>; 2],
    /// Per-iteration trace ratio of each mode.
    pub objective_trace: [Vec<f64>; 2],
    /// Ridge used in the final solve of each mode.
    pub lambdas: [f64; 2],
    pub iterations: usize,
    pub converged: bool,
}

impl ProjectionSet {
    /// Output dimensions `(s', n')`.
    pub fn reduced_dims(&self) -> (usize, usize) {
        (self.u1.cols(), self.u2.cols())
    }

    /// Projects `t` into the learned `s' x n'` space.
    pub fn transform(&self, t: &DenseTensor3) -> Result<DenseTensor3> {
        transform(self, t)
    }
}

/// Orthonormal basis of the column span (modified Gram-Schmidt, rank-revealing).
pub fn orthonormal_basis(u: &DenseMatrix) -> DenseMatrix {
    let scale = u.frobenius().max(f64::MIN_POSITIVE);
    let mut cols: Vec<Vec<f64>> = Vec::new();
    for c in 0..u.cols() {
        let mut v = u.column(c).to_vec();
        for _ in 0..2 {
            for q in &cols {
                let d: f64 = q.iter().zip(&v).map(|(a, b)| a * b).sum();
                v.iter_mut().zip(q).for_each(|(x, qi)| *x -= d * qi);
            }
        }
        let n = v.iter().map(|x| x * x).sum::<f64>().sqrt();
        if n > 1e-12 * scale {
            v.iter_mut().for_each(|x| *x /= n);
            cols.push(v);
        }
    }
    let rows = u.rows();
    if cols.is_empty() {
        return DenseMatrix::zeros(rows, 1);
    }
    DenseMatrix::new(rows, cols.len(), cols.concat()).expect("consistent shape")
}

/// Orthogonal projector onto the column span of `u`.
pub fn subspace_projector(u: &DenseMatrix) -> DenseMatrix {
    let q = orthonormal_basis(u);
    q.matmul(&q.transpose()).expect("consistent shape")
}

fn subspace_change(a: &DenseMatrix, b: &DenseMatrix) -> f64 {
    subspace_projector(a).sub(&subspace_projector(b)).map(|d| d.frobenius()).unwrap_or(f64::INFINITY)
}

/// Alternating per-mode optimization starting from identity projections.
pub fn fit(set: &CrossViewSet, cfg: &TxqdaConfig) -> Result<ProjectionSet> {
    cfg.validate()?;
    let [s, n, _] = set.tensor.dims();
    let (t1, t2) = cfg.target_dims.targets(n);
    for (t, size, mode) in [(t1, s, 1), (t2, n, 2)] {
        if let Target::Fixed(k) = t {
            if k == 0 || k > size {
                return Err(Error::arg(format!("target size {k} for mode {mode} must be in 1..={size}")));
            }
        }
    }

    let mut u1 = DenseMatrix::identity(s);
    let mut u2 = DenseMatrix::identity(n);
    let (mut t1, mut t2) = (t1, t2);
    let mut trace = [Vec::new(), Vec::new()];
    let mut spectra = [Vec::new(), Vec::new()];
    let mut lambdas = [0.0; 2];
    let mut converged = false;
    let mut iterations = 0;
    // Ridge per unit of `u1 ⊗ u2`; each mode sees it scaled by the other mode's width.
    let mut unit_ridge = None;
    for iter in 0..cfg.max_iters {
        iterations = iter + 1;
        let (ve, vi) = scatter_pair(set, &u2, 1)?;
        let ridge = *unit_ridge.get_or_insert_with(|| resolve_lambda(cfg.lambda, &ve, &vi) / n as f64);
        lambdas[0] = ridge * u2.cols() as f64;
        let m1 = solve_mode_with(&ve, &vi, lambdas[0], t1, cfg.solver).map_err(|e| e.context("mode-1 solve"))?;

        let (ve, vi) = scatter_pair(set, &m1.u, 2)?;
        lambdas[1] = ridge * m1.u.cols() as f64;
        let m2 = solve_mode_with(&ve, &vi, lambdas[1], t2, cfg.solver).map_err(|e| e.context("mode-2 solve"))?;

        // Sizes chosen automatically are frozen after the first pass.
        t1 = Target::Fixed(m1.u.cols());
        t2 = Target::Fixed(m2.u.cols());

        let change = if iter == 0 {
            f64::INFINITY
        } else {
            subspace_change(&m1.u, &u1).max(subspace_change(&m2.u, &u2))
        };
        trace[0].push(m1.ratio);
        trace[1].push(m2.ratio);
        spectra = [m1.spectrum, m2.spectrum];
        u1 = m1.u;
        u2 = m2.u;
        log::debug!("iteration {iterations}: ratios ({:.6}, {:.6}), change {change:e}", trace[0][iter], trace[1][iter]);
        if change <= cfg.tol {
            converged = true;
            break;
        }
    }
    if !converged && cfg.max_iters > 1 {
        log::info!("alternating optimization stopped after {iterations} iterations without meeting tol");
    }
    Ok(ProjectionSet { u1, u2, spectra, objective_trace: trace, lambdas, iterations, converged })
}

/// `t ×_1 u1ᵀ ×_2 u2ᵀ`.
pub fn transform(p: &ProjectionSet, t: &DenseTensor3) -> Result<DenseTensor3> {
    let [s, n, _] = t.dims();
    if s != p.u1.rows() || n != p.u2.rows() {
        return Err(Error::arg(format!(
            "model expects {}x{} slices, tensor has {s}x{n}",
            p.u1.rows(),
            p.u2.rows()
        )));
    }
    t.project(&p.u1, &p.u2)
}
