//! Dense third-order tensors and the matrices that act on them.
//!
//! Layout contract, used by every routine in the crate and by the `TSR3`
//! file format:
//!
//! * [`DenseTensor3`] stores entry `(i1, i2, i3)` at `i1 + I1 * (i2 + I2 * i3)`
//!   (mode 1 fastest, then mode 2, then mode 3).
//! * [`DenseMatrix`] is column-major: entry `(r, c)` lives at `r + rows * c`.
//! * The mode-k unfolding has `I_k` rows; its column index enumerates the two
//!   remaining modes in ascending mode order with the lower mode varying
//!   fastest. For mode 1 this makes the unfolding share the tensor's memory
//!   order exactly.
//!
//! Modes are addressed 1-based (`1`, `2`, `3`) everywhere in the public API.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Column-major dense matrix of `f64`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DenseMatrix {
    rows: usize,
    cols: usize,
    data: Vec<f64>,
}

impl DenseMatrix {
    pub fn new(rows: usize, cols: usize, data: Vec<f64>) -> Result<Self> {
        if rows == 0 || cols == 0 {
            return Err(Error::arg(format!("matrix dimensions must be positive, got {rows}x{cols}")));
        }
        if data.len() != rows * cols {
            return Err(Error::arg(format!(
                "matrix {rows}x{cols} needs {} entries, got {}",
                rows * cols,
                data.len()
            )));
        }
        Ok(DenseMatrix { rows, cols, data })
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        assert!(rows > 0 && cols > 0, "matrix dimensions must be positive");
        DenseMatrix { rows, cols, data: vec![0.0; rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = 1.0;
        }
        m
    }

    pub fn from_diagonal(diag: &[f64]) -> Self {
        let mut m = Self::zeros(diag.len(), diag.len());
        for (i, &d) in diag.iter().enumerate() {
            m[(i, i)] = d;
        }
        m
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> f64) -> Self {
        let mut m = Self::zeros(rows, cols);
        for c in 0..cols {
            for r in 0..rows {
                m.data[r + rows * c] = f(r, c);
            }
        }
        m
    }

    /// Builds a matrix from row slices; convenient in tests and examples.
    pub fn from_rows(rows: &[&[f64]]) -> Result<Self> {
        let n_rows = rows.len();
        let n_cols = rows.first().map_or(0, |r| r.len());
        if rows.iter().any(|r| r.len() != n_cols) {
            return Err(Error::arg("ragged rows"));
        }
        if n_rows == 0 || n_cols == 0 {
            return Err(Error::arg("empty matrix"));
        }
        Ok(Self::from_fn(n_rows, n_cols, |r, c| rows[r][c]))
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    /// Column-major storage.
    pub fn as_slice(&self) -> &[f64] {
        &self.data
    }

    pub fn into_vec(self) -> Vec<f64> {
        self.data
    }

    pub fn column(&self, c: usize) -> &[f64] {
        &self.data[c * self.rows..(c + 1) * self.rows]
    }

    pub fn column_mut(&mut self, c: usize) -> &mut [f64] {
        let rows = self.rows;
        &mut self.data[c * rows..(c + 1) * rows]
    }

    pub fn transpose(&self) -> DenseMatrix {
        DenseMatrix::from_fn(self.cols, self.rows, |r, c| self[(c, r)])
    }

    pub fn matmul(&self, rhs: &DenseMatrix) -> Result<DenseMatrix> {
        if self.cols != rhs.rows {
            return Err(Error::arg(format!(
                "cannot multiply {}x{} by {}x{}",
                self.rows, self.cols, rhs.rows, rhs.cols
            )));
        }
        let mut out = DenseMatrix::zeros(self.rows, rhs.cols);
        for j in 0..rhs.cols {
            let out_col = &mut out.data[j * self.rows..(j + 1) * self.rows];
            for k in 0..self.cols {
                let b = rhs.data[k + rhs.rows * j];
                if b == 0.0 {
                    continue;
                }
                let a_col = &self.data[k * self.rows..(k + 1) * self.rows];
                for (o, &a) in out_col.iter_mut().zip(a_col) {
                    *o += a * b;
                }
            }
        }
        Ok(out)
    }

    /// `selfᵀ · rhs` without materializing the transpose.
    pub fn tr_matmul(&self, rhs: &DenseMatrix) -> Result<DenseMatrix> {
        if self.rows != rhs.rows {
            return Err(Error::arg(format!(
                "cannot multiply ({}x{})ᵀ by {}x{}",
                self.rows, self.cols, rhs.rows, rhs.cols
            )));
        }
        Ok(DenseMatrix::from_fn(self.cols, rhs.cols, |i, j| dot(self.column(i), rhs.column(j))))
    }

    pub fn add(&self, rhs: &DenseMatrix) -> Result<DenseMatrix> {
        self.zip_with(rhs, |a, b| a + b)
    }

    pub fn sub(&self, rhs: &DenseMatrix) -> Result<DenseMatrix> {
        self.zip_with(rhs, |a, b| a - b)
    }

    fn zip_with(&self, rhs: &DenseMatrix, f: impl Fn(f64, f64) -> f64) -> Result<DenseMatrix> {
        if self.rows != rhs.rows || self.cols != rhs.cols {
            return Err(Error::arg(format!(
                "shape mismatch {}x{} vs {}x{}",
                self.rows, self.cols, rhs.rows, rhs.cols
            )));
        }
        let data = self.data.iter().zip(&rhs.data).map(|(&a, &b)| f(a, b)).collect();
        Ok(DenseMatrix { rows: self.rows, cols: self.cols, data })
    }

    pub fn scale(&self, s: f64) -> DenseMatrix {
        DenseMatrix { rows: self.rows, cols: self.cols, data: self.data.iter().map(|v| v * s).collect() }
    }

    /// Adds `s` to every diagonal entry in place.
    pub fn add_diagonal(&mut self, s: f64) {
        for i in 0..self.rows.min(self.cols) {
            self[(i, i)] += s;
        }
    }

    pub fn trace(&self) -> f64 {
        (0..self.rows.min(self.cols)).map(|i| self[(i, i)]).sum()
    }

    pub fn frobenius(&self) -> f64 {
        self.data.iter().map(|v| v * v).sum::<f64>().sqrt()
    }

    /// `(A + Aᵀ) / 2`; panics on non-square input.
    pub fn symmetrized(&self) -> DenseMatrix {
        assert!(self.is_square());
        DenseMatrix::from_fn(self.rows, self.cols, |r, c| 0.5 * (self[(r, c)] + self[(c, r)]))
    }

    /// Keeps the first `n` columns.
    pub fn leading_columns(&self, n: usize) -> Result<DenseMatrix> {
        if n == 0 || n > self.cols {
            return Err(Error::arg(format!("cannot take {n} of {} columns", self.cols)));
        }
        Ok(DenseMatrix { rows: self.rows, cols: n, data: self.data[..n * self.rows].to_vec() })
    }
}

impl std::ops::Index<(usize, usize)> for DenseMatrix {
    type Output = f64;

    fn index(&self, (r, c): (usize, usize)) -> &f64 {
        debug_assert!(r < self.rows && c < self.cols);
        &self.data[r + self.rows * c]
    }
}

impl std::ops::IndexMut<(usize, usize)> for DenseMatrix {
    fn index_mut(&mut self, (r, c): (usize, usize)) -> &mut f64 {
        debug_assert!(r < self.rows && c < self.cols);
        &mut self.data[r + self.rows * c]
    }
}

pub(crate) fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Dense third-order tensor of `f64` with mode-1-fastest layout.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DenseTensor3 {
    dims: [usize; 3],
    data: Vec<f64>,
}

fn check_mode(k: usize) -> Result<usize> {
    match k {
        1..=3 => Ok(k - 1),
        _ => Err(Error::arg(format!("mode index must be 1, 2 or 3, got {k}"))),
    }
}

/// The two modes other than `k0` (0-based), ascending.
fn other_modes(k0: usize) -> (usize, usize) {
    match k0 {
        0 => (1, 2),
        1 => (0, 2),
        _ => (0, 1),
    }
}

impl DenseTensor3 {
    pub fn new(dims: [usize; 3], data: Vec<f64>) -> Result<Self> {
        if dims.contains(&0) {
            return Err(Error::arg(format!("tensor dimensions must be positive, got {dims:?}")));
        }
        let len = dims[0] * dims[1] * dims[2];
        if data.len() != len {
            return Err(Error::arg(format!(
                "tensor {dims:?} needs {len} entries, got {}",
                data.len()
            )));
        }
        Ok(DenseTensor3 { dims, data })
    }

    pub fn zeros(dims: [usize; 3]) -> Self {
        assert!(dims.iter().all(|&d| d > 0), "tensor dimensions must be positive");
        DenseTensor3 { dims, data: vec![0.0; dims[0] * dims[1] * dims[2]] }
    }

    pub fn from_fn(dims: [usize; 3], mut f: impl FnMut(usize, usize, usize) -> f64) -> Self {
        let mut t = Self::zeros(dims);
        let mut idx = 0;
        for l in 0..dims[2] {
            for j in 0..dims[1] {
                for i in 0..dims[0] {
                    t.data[idx] = f(i, j, l);
                    idx += 1;
                }
            }
        }
        t
    }

    /// Stacks equally-shaped matrices as mode-3 slices.
    pub fn from_slices(slices: &[DenseMatrix]) -> Result<Self> {
        let first = slices.first().ok_or_else(|| Error::arg("no slices to stack"))?;
        let (r, c) = (first.rows(), first.cols());
        let mut data = Vec::with_capacity(r * c * slices.len());
        for (i, s) in slices.iter().enumerate() {
            if s.rows() != r || s.cols() != c {
                return Err(Error::arg(format!(
                    "slice {i} is {}x{}, expected {r}x{c}",
                    s.rows(),
                    s.cols()
                )));
            }
            data.extend_from_slice(s.as_slice());
        }
        Self::new([r, c, slices.len()], data)
    }

    pub fn dims(&self) -> [usize; 3] {
        self.dims
    }

    pub fn len(&self) -> usize {
        self.data.len()
    }

    pub fn is_empty(&self) -> bool {
        self.data.is_empty()
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.data
    }

    fn offset(&self, i: usize, j: usize, l: usize) -> usize {
        i + self.dims[0] * (j + self.dims[1] * l)
    }

    pub fn get(&self, i: usize, j: usize, l: usize) -> f64 {
        self.data[self.offset(i, j, l)]
    }

    pub fn set(&mut self, i: usize, j: usize, l: usize, v: f64) {
        let o = self.offset(i, j, l);
        self.data[o] = v;
    }

    /// Number of mode-3 slices (samples).
    pub fn n_slices(&self) -> usize {
        self.dims[2]
    }

    fn slice_len(&self) -> usize {
        self.dims[0] * self.dims[1]
    }

    /// Raw storage of mode-3 slice `l`; this is also its vectorization.
    pub fn slice_data(&self, l: usize) -> &[f64] {
        let n = self.slice_len();
        &self.data[l * n..(l + 1) * n]
    }

    /// Mode-3 slice `l` as an `I1 x I2` matrix.
    pub fn slice(&self, l: usize) -> DenseMatrix {
        DenseMatrix { rows: self.dims[0], cols: self.dims[1], data: self.slice_data(l).to_vec() }
    }

    /// Tensor made of the selected mode-3 slices, in the given order.
    pub fn select_slices(&self, indices: &[usize]) -> Result<DenseTensor3> {
        if indices.is_empty() {
            return Err(Error::arg("cannot select zero slices"));
        }
        let mut data = Vec::with_capacity(indices.len() * self.slice_len());
        for &l in indices {
            if l >= self.dims[2] {
                return Err(Error::arg(format!("slice {l} out of range ({} slices)", self.dims[2])));
            }
            data.extend_from_slice(self.slice_data(l));
        }
        Ok(DenseTensor3 { dims: [self.dims[0], self.dims[1], indices.len()], data })
    }

    /// Mode-k matricization (`k` in 1..=3).
    pub fn unfold(&self, k: usize) -> Result<DenseMatrix> {
        let k0 = check_mode(k)?;
        let rows = self.dims[k0];
        let cols = self.len() / rows;
        if k0 == 0 {
            return DenseMatrix::new(rows, cols, self.data.clone());
        }
        let (p, q) = other_modes(k0);
        let mut out = vec![0.0; self.len()];
        let mut idx = 0;
        for l in 0..self.dims[2] {
            for j in 0..self.dims[1] {
                for i in 0..self.dims[0] {
                    let ix = [i, j, l];
                    let c = ix[p] + self.dims[p] * ix[q];
                    out[ix[k0] + rows * c] = self.data[idx];
                    idx += 1;
                }
            }
        }
        DenseMatrix::new(rows, cols, out)
    }

    /// Inverse of [`unfold`](Self::unfold).
    pub fn fold(m: &DenseMatrix, k: usize, dims: [usize; 3]) -> Result<DenseTensor3> {
        let k0 = check_mode(k)?;
        if dims.contains(&0) {
            return Err(Error::arg(format!("tensor dimensions must be positive, got {dims:?}")));
        }
        let (p, q) = other_modes(k0);
        if m.rows() != dims[k0] || m.cols() != dims[p] * dims[q] {
            return Err(Error::arg(format!(
                "cannot fold {}x{} matrix along mode {k} into {dims:?}",
                m.rows(),
                m.cols()
            )));
        }
        if k0 == 0 {
            return DenseTensor3::new(dims, m.as_slice().to_vec());
        }
        let mut out = DenseTensor3::zeros(dims);
        let mut idx = 0;
        for l in 0..dims[2] {
            for j in 0..dims[1] {
                for i in 0..dims[0] {
                    let ix = [i, j, l];
                    let c = ix[p] + dims[p] * ix[q];
                    out.data[idx] = m[(ix[k0], c)];
                    idx += 1;
                }
            }
        }
        Ok(out)
    }

    /// Mode-k product `self ×_k u`; mode `k` changes size from `u.cols()` to `u.rows()`.
    pub fn mode_product(&self, u: &DenseMatrix, k: usize) -> Result<DenseTensor3> {
        let k0 = check_mode(k)?;
        if u.cols() != self.dims[k0] {
            return Err(Error::arg(format!(
                "mode-{k} product needs a matrix with {} columns, got {}x{}",
                self.dims[k0],
                u.rows(),
                u.cols()
            )));
        }
        let mut dims = self.dims;
        dims[k0] = u.rows();
        let mut out = DenseTensor3::zeros(dims);
        // stride of mode k in the input and output layouts
        let stride_in = [1, self.dims[0], self.dims[0] * self.dims[1]][k0];
        let stride_out = [1, dims[0], dims[0] * dims[1]][k0];
        let (p, q) = other_modes(k0);
        for b in 0..self.dims[q] {
            for a in 0..self.dims[p] {
                let mut ix = [0usize; 3];
                ix[p] = a;
                ix[q] = b;
                let base_in = self.offset(ix[0], ix[1], ix[2]);
                let base_out = ix[0] + dims[0] * (ix[1] + dims[1] * ix[2]);
                for src in 0..self.dims[k0] {
                    let x = self.data[base_in + src * stride_in];
                    if x == 0.0 {
                        continue;
                    }
                    for (dst, &w) in u.column(src).iter().enumerate() {
                        out.data[base_out + dst * stride_out] += w * x;
                    }
                }
            }
        }
        Ok(out)
    }

    /// Tensor-to-tensor projection `self ×_1 u1ᵀ ×_2 u2ᵀ`. Mode 3 (samples) is untouched.
    ///
    /// Each slice `S` maps to `u1ᵀ · S · u2`.
    pub fn project(&self, u1: &DenseMatrix, u2: &DenseMatrix) -> Result<DenseTensor3> {
        if u1.rows() != self.dims[0] || u2.rows() != self.dims[1] {
            return Err(Error::arg(format!(
                "projection expects {}- and {}-row matrices, got {}x{} and {}x{}",
                self.dims[0],
                self.dims[1],
                u1.rows(),
                u1.cols(),
                u2.rows(),
                u2.cols()
            )));
        }
        let mut data = Vec::with_capacity(u1.cols() * u2.cols() * self.dims[2]);
        for l in 0..self.dims[2] {
            let reduced = u1.tr_matmul(&self.slice(l))?.matmul(u2)?;
            data.extend_from_slice(reduced.as_slice());
        }
        DenseTensor3::new([u1.cols(), u2.cols(), self.dims[2]], data)
    }

    /// Flattens in storage order.
    pub fn vectorize(&self) -> Vec<f64> {
        self.data.clone()
    }

    pub fn frobenius(&self) -> f64 {
        self.inner_unchecked(self).sqrt()
    }

    pub fn inner(&self, other: &DenseTensor3) -> Result<f64> {
        if self.dims != other.dims {
            return Err(Error::arg(format!(
                "inner product of {:?} and {:?} tensors",
                self.dims, other.dims
            )));
        }
        Ok(self.inner_unchecked(other))
    }

    fn inner_unchecked(&self, other: &DenseTensor3) -> f64 {
        dot(&self.data, &other.data)
    }

    pub fn scale(&self, s: f64) -> DenseTensor3 {
        DenseTensor3 { dims: self.dims, data: self.data.iter().map(|v| v * s).collect() }
    }
}
