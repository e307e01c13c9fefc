//! Dense complex Hermitian linear algebra.
//!
//! Everything downstream (channels, entropies, measure solvers) works with
//! matrices of dimension at most ~64, so the implementations here favor
//! determinism and accuracy over asymptotic speed. The eigensolver is a
//! cyclic Jacobi iteration for complex Hermitian matrices.

use num_complex::Complex64;
use thiserror::Error;

/// Natural-log to log2 conversion, defined once for the whole crate.
pub const LN_2: f64 = std::f64::consts::LN_2;

/// Tolerance for accepting a matrix as Hermitian.
pub const HERMITIAN_TOL: f64 = 1e-12;

#[derive(Debug, Error)]
pub enum LinalgError {
    #[error("matrix is not Hermitian (max deviation {0:.3e})")]
    NotHermitian(f64),
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("subsystem dimensions {dims:?} do not multiply to matrix dimension {dim}")]
    BadDims { dims: Vec<usize>, dim: usize },
    #[error("invalid subsystem index set {0:?}")]
    BadSubsystems(Vec<usize>),
    #[error("matrix is not a density matrix: {0}")]
    NotDensity(String),
    #[error("non-finite entry in matrix")]
    NonFinite,
}

pub type Result<T> = std::result::Result<T, LinalgError>;

/// Dense complex matrix, row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct ComplexMatrix {
    pub rows: usize,
    pub cols: usize,
    pub data: Vec<Complex64>,
}

impl ComplexMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        assert!(rows > 0 && cols > 0, "dimensions must be positive");
        Self { rows, cols, data: vec![Complex64::new(0.0, 0.0); rows * cols] }
    }

    pub fn identity(dim: usize) -> Self {
        let mut m = Self::zeros(dim, dim);
        for i in 0..dim {
            m[(i, i)] = Complex64::new(1.0, 0.0);
        }
        m
    }

    pub fn from_rows(rows: &[Vec<Complex64>]) -> Self {
        let r = rows.len();
        assert!(r > 0);
        let c = rows[0].len();
        let mut data = Vec::with_capacity(r * c);
        for row in rows {
            assert_eq!(row.len(), c, "ragged rows");
            data.extend_from_slice(row);
        }
        Self { rows: r, cols: c, data }
    }

    pub fn from_real(rows: &[Vec<f64>]) -> Self {
        let converted: Vec<Vec<Complex64>> = rows
            .iter()
            .map(|r| r.iter().map(|&x| Complex64::new(x, 0.0)).collect())
            .collect();
        Self::from_rows(&converted)
    }

    /// Diagonal matrix from real entries.
    pub fn diag(entries: &[f64]) -> Self {
        let mut m = Self::zeros(entries.len(), entries.len());
        for (i, &x) in entries.iter().enumerate() {
            m[(i, i)] = Complex64::new(x, 0.0);
        }
        m
    }

    /// Column vector |i> of the computational basis.
    pub fn basis_vector(dim: usize, index: usize) -> Self {
        assert!(index < dim);
        let mut m = Self::zeros(dim, 1);
        m[(index, 0)] = Complex64::new(1.0, 0.0);
        m
    }

    /// Outer product |v><w| of two column vectors.
    pub fn outer(v: &ComplexMatrix, w: &ComplexMatrix) -> Self {
        assert_eq!(v.cols, 1);
        assert_eq!(w.cols, 1);
        let mut m = Self::zeros(v.rows, w.rows);
        for i in 0..v.rows {
            for j in 0..w.rows {
                m[(i, j)] = v[(i, 0)] * w[(j, 0)].conj();
            }
        }
        m
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn all_finite(&self) -> bool {
        self.data.iter().all(|z| z.re.is_finite() && z.im.is_finite())
    }

    pub fn adjoint(&self) -> Self {
        let mut m = Self::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                m[(j, i)] = self[(i, j)].conj();
            }
        }
        m
    }

    pub fn transpose(&self) -> Self {
        let mut m = Self::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                m[(j, i)] = self[(i, j)];
            }
        }
        m
    }

    pub fn conjugate(&self) -> Self {
        let mut m = self.clone();
        for z in &mut m.data {
            *z = z.conj();
        }
        m
    }

    pub fn scale(&self, s: Complex64) -> Self {
        let mut m = self.clone();
        for z in &mut m.data {
            *z *= s;
        }
        m
    }

    pub fn scale_re(&self, s: f64) -> Self {
        self.scale(Complex64::new(s, 0.0))
    }

    pub fn add(&self, other: &Self) -> Self {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        let mut m = self.clone();
        for (z, w) in m.data.iter_mut().zip(&other.data) {
            *z += w;
        }
        m
    }

    pub fn sub(&self, other: &Self) -> Self {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        let mut m = self.clone();
        for (z, w) in m.data.iter_mut().zip(&other.data) {
            *z -= w;
        }
        m
    }

    pub fn matmul(&self, other: &Self) -> Self {
        assert_eq!(self.cols, other.rows, "inner dimensions must agree");
        let mut m = Self::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self[(i, k)];
                if a.norm_sqr() == 0.0 {
                    continue;
                }
                for j in 0..other.cols {
                    m[(i, j)] += a * other[(k, j)];
                }
            }
        }
        m
    }

    pub fn trace(&self) -> Complex64 {
        assert!(self.is_square());
        (0..self.rows).map(|i| self[(i, i)]).sum()
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.data.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    /// Hilbert-Schmidt inner product <A, B> = Tr(A† B).
    pub fn hs_inner(&self, other: &Self) -> Complex64 {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        self.data.iter().zip(&other.data).map(|(a, b)| a.conj() * b).sum()
    }

    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        self.data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }

    pub fn hermiticity_deviation(&self) -> f64 {
        if !self.is_square() {
            return f64::INFINITY;
        }
        let mut dev: f64 = 0.0;
        for i in 0..self.rows {
            for j in i..self.cols {
                dev = dev.max((self[(i, j)] - self[(j, i)].conj()).norm());
            }
        }
        dev
    }

    /// Symmetrize: (M + M†)/2. Used to scrub floating-point drift.
    pub fn hermitize(&self) -> Self {
        assert!(self.is_square());
        let mut m = self.clone();
        for i in 0..self.rows {
            for j in i..self.cols {
                let avg = (self[(i, j)] + self[(j, i)].conj()) * 0.5;
                m[(i, j)] = avg;
                m[(j, i)] = avg.conj();
            }
        }
        m
    }

    pub fn column(&self, j: usize) -> ComplexMatrix {
        let mut v = ComplexMatrix::zeros(self.rows, 1);
        for i in 0..self.rows {
            v[(i, 0)] = self[(i, j)];
        }
        v
    }
}

impl std::ops::Index<(usize, usize)> for ComplexMatrix {
    type Output = Complex64;
    #[inline]
    fn index(&self, (i, j): (usize, usize)) -> &Complex64 {
        &self.data[i * self.cols + j]
    }
}

impl std::ops::IndexMut<(usize, usize)> for ComplexMatrix {
    #[inline]
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut Complex64 {
        &mut self.data[i * self.cols + j]
    }
}

/// Square matrix equal to its conjugate transpose within [`HERMITIAN_TOL`]
/// relative tolerance.
#[derive(Debug, Clone, PartialEq)]
pub struct HermitianMatrix {
    mat: ComplexMatrix,
}

impl HermitianMatrix {
    pub fn new(mat: ComplexMatrix) -> Result<Self> {
        if !mat.all_finite() {
            return Err(LinalgError::NonFinite);
        }
        let scale = mat.frobenius_norm().max(1.0);
        let dev = mat.hermiticity_deviation();
        if dev > HERMITIAN_TOL * scale {
            return Err(LinalgError::NotHermitian(dev));
        }
        Ok(Self { mat: mat.hermitize() })
    }

    /// Symmetrizes unconditionally instead of rejecting.
    pub fn from_nearly_hermitian(mat: ComplexMatrix) -> Self {
        Self { mat: mat.hermitize() }
    }

    pub fn dim(&self) -> usize {
        self.mat.rows
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.mat
    }

    pub fn into_matrix(self) -> ComplexMatrix {
        self.mat
    }

    pub fn trace(&self) -> f64 {
        self.mat.trace().re
    }

    pub fn min_eigenvalue(&self) -> f64 {
        let (vals, _) = herm_eig(self);
        *vals.last().unwrap()
    }
}

/// Positive semidefinite, unit-trace Hermitian matrix with a subsystem
/// dimension label.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix {
    herm: HermitianMatrix,
    dims: Vec<usize>,
}

/// Eigenvalues may dip this far below zero and the matrix still counts as a
/// state.
pub const DENSITY_EIG_TOL: f64 = 1e-10;
pub const DENSITY_TRACE_TOL: f64 = 1e-10;

impl DensityMatrix {
    pub fn new(mat: ComplexMatrix, dims: Vec<usize>) -> Result<Self> {
        let herm = HermitianMatrix::new(mat)?;
        let total: usize = dims.iter().product();
        if total != herm.dim() || dims.iter().any(|&d| d == 0) {
            return Err(LinalgError::BadDims { dims, dim: herm.dim() });
        }
        let tr = herm.trace();
        if (tr - 1.0).abs() > DENSITY_TRACE_TOL {
            return Err(LinalgError::NotDensity(format!("trace {tr} != 1")));
        }
        let min = herm.min_eigenvalue();
        if min < -DENSITY_EIG_TOL {
            return Err(LinalgError::NotDensity(format!("min eigenvalue {min:.3e}")));
        }
        Ok(Self { herm, dims })
    }

    /// Renormalizes trace and clips tiny negative eigenvalues; for cleaning up
    /// outputs of long numerical pipelines.
    pub fn from_nearly_density(mat: ComplexMatrix, dims: Vec<usize>) -> Result<Self> {
        let herm = HermitianMatrix::from_nearly_hermitian(mat);
        let (vals, vecs) = herm_eig(&herm);
        let clipped: Vec<f64> = vals.iter().map(|&v| v.max(0.0)).collect();
        let sum: f64 = clipped.iter().sum();
        if sum <= 0.0 {
            return Err(LinalgError::NotDensity("zero trace".into()));
        }
        let normalized: Vec<f64> = clipped.iter().map(|v| v / sum).collect();
        let m = reassemble(&normalized, &vecs);
        Self::new(m, dims)
    }

    pub fn pure(vector: &ComplexMatrix, dims: Vec<usize>) -> Result<Self> {
        assert_eq!(vector.cols, 1);
        let norm: f64 = vector.data.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        let v = vector.scale_re(1.0 / norm);
        Self::new(ComplexMatrix::outer(&v, &v), dims)
    }

    /// Maximally mixed state on the given subsystem dimensions.
    pub fn maximally_mixed(dims: Vec<usize>) -> Self {
        let d: usize = dims.iter().product();
        let m = ComplexMatrix::identity(d).scale_re(1.0 / d as f64);
        Self::new(m, dims).unwrap()
    }

    /// Maximally entangled state Phi_d on two subsystems of dimension d.
    pub fn maximally_entangled(d: usize) -> Self {
        let mut v = ComplexMatrix::zeros(d * d, 1);
        let a = Complex64::new(1.0 / (d as f64).sqrt(), 0.0);
        for i in 0..d {
            v[(i * d + i, 0)] = a;
        }
        Self::pure(&v, vec![d, d]).unwrap()
    }

    pub fn dim(&self) -> usize {
        self.herm.dim()
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        self.herm.matrix()
    }

    pub fn hermitian(&self) -> &HermitianMatrix {
        &self.herm
    }

    /// Relabel the subsystem structure without touching the matrix.
    pub fn with_dims(&self, dims: Vec<usize>) -> Result<Self> {
        Self::new(self.matrix().clone(), dims)
    }

    /// Convex mixture Σ w_i rho_i of states with identical dims.
    pub fn mix(parts: &[(f64, &DensityMatrix)]) -> Result<Self> {
        let (_, first) = parts.first().ok_or(LinalgError::NotDensity("empty mixture".into()))?;
        let mut m = ComplexMatrix::zeros(first.dim(), first.dim());
        for (w, rho) in parts {
            if rho.dims() != first.dims() {
                return Err(LinalgError::BadDims { dims: rho.dims.clone(), dim: first.dim() });
            }
            m = m.add(&rho.matrix().scale_re(*w));
        }
        Self::new(m, first.dims.clone())
    }

    /// Classical-quantum state Σ w_i |i><i| ⊗ rho_i with the flag system as
    /// the leading subsystem.
    pub fn classical_flag(parts: &[(f64, &DensityMatrix)]) -> Result<Self> {
        let k = parts.len();
        let (_, first) = parts.first().ok_or(LinalgError::NotDensity("empty mixture".into()))?;
        let d = first.dim();
        let mut m = ComplexMatrix::zeros(k * d, k * d);
        for (i, (w, rho)) in parts.iter().enumerate() {
            if rho.dims() != first.dims() {
                return Err(LinalgError::BadDims { dims: rho.dims.clone(), dim: d });
            }
            for a in 0..d {
                for b in 0..d {
                    m[(i * d + a, i * d + b)] = rho.matrix()[(a, b)] * *w;
                }
            }
        }
        let mut dims = vec![k];
        dims.extend_from_slice(&first.dims);
        Self::new(m, dims)
    }

    pub fn partial_trace_keep(&self, keep: &[usize]) -> Result<Self> {
        let m = partial_trace(self.matrix(), &self.dims, keep)?;
        let kept: Vec<usize> = keep.iter().map(|&k| self.dims[k]).collect();
        Self::new(m.hermitize(), kept)
    }
}

/// Bipartition of the subsystem list of a state.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SubsystemCut {
    pub left: Vec<usize>,
    pub right: Vec<usize>,
}

impl SubsystemCut {
    pub fn new(left: Vec<usize>, right: Vec<usize>) -> Self {
        Self { left, right }
    }

    /// Checks the cut partitions 0..n.
    pub fn validate(&self, n_subsystems: usize) -> Result<()> {
        let mut seen = vec![false; n_subsystems];
        for &i in self.left.iter().chain(&self.right) {
            if i >= n_subsystems || seen[i] {
                return Err(LinalgError::BadSubsystems(
                    self.left.iter().chain(&self.right).copied().collect(),
                ));
            }
            seen[i] = true;
        }
        if seen.iter().all(|&s| s) {
            Ok(())
        } else {
            Err(LinalgError::BadSubsystems(
                self.left.iter().chain(&self.right).copied().collect(),
            ))
        }
    }
}

const JACOBI_MAX_SWEEPS: usize = 60;

/// Eigendecomposition of a Hermitian matrix by cyclic Jacobi rotations.
///
/// Returns eigenvalues sorted descending and the corresponding orthonormal
/// eigenvectors as columns. Output is deterministic: each eigenvector's first
/// component of magnitude above 1e-8 is rotated to be real and positive.
pub fn herm_eig(h: &HermitianMatrix) -> (Vec<f64>, ComplexMatrix) {
    herm_eig_raw(h.matrix())
}

/// Jacobi eigensolver on a raw matrix assumed Hermitian.
pub fn herm_eig_raw(a0: &ComplexMatrix) -> (Vec<f64>, ComplexMatrix) {
    let n = a0.rows;
    let mut a = a0.clone();
    let mut v = ComplexMatrix::identity(n);
    let norm = a.frobenius_norm().max(f64::MIN_POSITIVE);
    let target = 1e-13 * norm;

    // Rotations with |a_pq| below this leave the total off-diagonal norm
    // under `target`, so they can be skipped without affecting convergence.
    let skip = target / n as f64;

    for _sweep in 0..JACOBI_MAX_SWEEPS {
        let mut off = 0.0f64;
        for p in 0..n {
            for q in (p + 1)..n {
                off += a[(p, q)].norm_sqr();
            }
        }
        if (2.0 * off).sqrt() < target {
            break;
        }
        for p in 0..n {
            for q in (p + 1)..n {
                let apq = a.data[p * n + q];
                let r = apq.norm();
                if r < skip {
                    continue;
                }
                // Unitary rotation U annihilating a[p][q]: strip the phase of
                // a[p][q], then a real Jacobi rotation. As a 2x2 block on
                // (p, q): U = [[c, -s], [s*e^{-i phi}, c*e^{-i phi}]].
                let phase = apq / r; // e^{i phi}
                let app = a.data[p * n + p].re;
                let aqq = a.data[q * n + q].re;
                let theta = 0.5 * (2.0 * r).atan2(app - aqq);
                let (s, c) = theta.sin_cos();
                let sph = phase.conj() * s; // s * e^{-i phi}
                let cph = phase.conj() * c; // c * e^{-i phi}

                // A <- U† A U: rows first, then columns.
                {
                    let (head, tail) = a.data.split_at_mut(q * n);
                    let rowp = &mut head[p * n..p * n + n];
                    let rowq = &mut tail[..n];
                    for k in 0..n {
                        let apk = rowp[k];
                        let aqk = rowq[k];
                        rowp[k] = apk * c + aqk * sph.conj();
                        rowq[k] = -apk * s + aqk * cph.conj();
                    }
                }
                for row in a.data.chunks_exact_mut(n) {
                    let akp = row[p];
                    let akq = row[q];
                    row[p] = akp * c + akq * sph;
                    row[q] = -akp * s + akq * cph;
                }
                for row in v.data.chunks_exact_mut(n) {
                    let vkp = row[p];
                    let vkq = row[q];
                    row[p] = vkp * c + vkq * sph;
                    row[q] = -vkp * s + vkq * cph;
                }
            }
        }
    }

    let mut pairs: Vec<(f64, usize)> = (0..n).map(|i| (a[(i, i)].re, i)).collect();
    // descending by eigenvalue; stable in the original column order on ties
    pairs.sort_by(|x, y| y.0.partial_cmp(&x.0).unwrap().then(x.1.cmp(&y.1)));

    let vals: Vec<f64> = pairs.iter().map(|p| p.0).collect();
    let mut vecs = ComplexMatrix::zeros(n, n);
    for (new_col, &(_, old_col)) in pairs.iter().enumerate() {
        // gauge: first significant component real positive
        let mut g = Complex64::new(1.0, 0.0);
        for k in 0..n {
            let z = v[(k, old_col)];
            if z.norm() > 1e-8 {
                g = z.conj() / z.norm();
                break;
            }
        }
        for k in 0..n {
            vecs[(k, new_col)] = v[(k, old_col)] * g;
        }
    }
    (vals, vecs)
}

/// V diag(vals) V†.
pub fn reassemble(vals: &[f64], vecs: &ComplexMatrix) -> ComplexMatrix {
    let n = vecs.rows;
    let mut m = ComplexMatrix::zeros(n, n);
    for (c, &lam) in vals.iter().enumerate() {
        if lam == 0.0 {
            continue;
        }
        for i in 0..n {
            let vi = vecs[(i, c)];
            if vi.norm_sqr() == 0.0 {
                continue;
            }
            for j in 0..n {
                m[(i, j)] += vi * vecs[(j, c)].conj() * lam;
            }
        }
    }
    m
}

/// Apply a real scalar function to a Hermitian matrix through its spectrum,
/// clamping eigenvalues below at `floor` first.
pub fn matrix_fn<F: Fn(f64) -> f64>(h: &HermitianMatrix, f: F, floor: f64) -> HermitianMatrix {
    let (vals, vecs) = herm_eig(h);
    let mapped: Vec<f64> = vals.iter().map(|&v| f(v.max(floor))).collect();
    HermitianMatrix::from_nearly_hermitian(reassemble(&mapped, &vecs))
}

/// Partial trace over the subsystems not listed in `keep`; kept subsystems
/// stay in their original relative order.
pub fn partial_trace(m: &ComplexMatrix, dims: &[usize], keep: &[usize]) -> Result<ComplexMatrix> {
    let total: usize = dims.iter().product();
    if m.rows != total || m.cols != total {
        return Err(LinalgError::BadDims { dims: dims.to_vec(), dim: m.rows });
    }
    let n = dims.len();
    let mut sorted = keep.to_vec();
    sorted.sort_unstable();
    sorted.dedup();
    if sorted.len() != keep.len() || sorted.iter().any(|&k| k >= n) {
        return Err(LinalgError::BadSubsystems(keep.to_vec()));
    }
    let keep = &sorted;
    let traced: Vec<usize> = (0..n).filter(|i| !keep.contains(i)).collect();
    let dk: usize = keep.iter().map(|&i| dims[i]).product();
    let dt: usize = traced.iter().map(|&i| dims[i]).product();

    // strides of each subsystem in the full index
    let mut strides = vec![1usize; n];
    for i in (0..n.saturating_sub(1)).rev() {
        strides[i] = strides[i + 1] * dims[i + 1];
    }

    let flat = |kept_idx: usize, traced_idx: usize| -> usize {
        let mut idx = 0;
        let mut rem = kept_idx;
        for &s in keep.iter().rev() {
            let d = dims[s];
            idx += (rem % d) * strides[s];
            rem /= d;
        }
        let mut rem = traced_idx;
        for &s in traced.iter().rev() {
            let d = dims[s];
            idx += (rem % d) * strides[s];
            rem /= d;
        }
        idx
    };

    let mut out = ComplexMatrix::zeros(dk, dk);
    for a in 0..dk {
        for b in 0..dk {
            let mut acc = Complex64::new(0.0, 0.0);
            for t in 0..dt {
                acc += m[(flat(a, t), flat(b, t))];
            }
            out[(a, b)] = acc;
        }
    }
    Ok(out)
}

/// Transpose one subsystem of a multipartite matrix.
pub fn partial_transpose(m: &ComplexMatrix, dims: &[usize], subsystem: usize) -> Result<ComplexMatrix> {
    let total: usize = dims.iter().product();
    if m.rows != total || m.cols != total {
        return Err(LinalgError::BadDims { dims: dims.to_vec(), dim: m.rows });
    }
    if subsystem >= dims.len() {
        return Err(LinalgError::BadSubsystems(vec![subsystem]));
    }
    let n = dims.len();
    let mut strides = vec![1usize; n];
    for i in (0..n - 1).rev() {
        strides[i] = strides[i + 1] * dims[i + 1];
    }
    let s = strides[subsystem];
    let d = dims[subsystem];

    let mut out = m.clone();
    for row in 0..total {
        let ri = (row / s) % d;
        for col in 0..total {
            let ci = (col / s) % d;
            if ri == ci {
                continue;
            }
            let new_row = (row as isize + (ci as isize - ri as isize) * s as isize) as usize;
            let new_col = (col as isize + (ri as isize - ci as isize) * s as isize) as usize;
            out[(new_row, new_col)] = m[(row, col)];
        }
    }
    Ok(out)
}

/// Transpose every subsystem in `subsystems` (composition of single-subsystem
/// partial transposes).
pub fn partial_transpose_multi(m: &ComplexMatrix, dims: &[usize], subsystems: &[usize]) -> Result<ComplexMatrix> {
    let mut out = m.clone();
    for &s in subsystems {
        out = partial_transpose(&out, dims, s)?;
    }
    Ok(out)
}

/// Trace norm: sum of singular values.
pub fn trace_norm(m: &ComplexMatrix) -> f64 {
    if m.is_square() {
        let dev = m.hermiticity_deviation();
        let scale = m.frobenius_norm().max(1.0);
        if dev <= 1e-11 * scale {
            let (vals, _) = herm_eig_raw(&m.hermitize());
            return vals.iter().map(|v| v.abs()).sum();
        }
    }
    // singular values via eigenvalues of M†M
    let mtm = m.adjoint().matmul(m);
    let (vals, _) = herm_eig_raw(&mtm.hermitize());
    vals.iter().map(|v| v.max(0.0).sqrt()).sum()
}

/// Operator (spectral) norm of a Hermitian matrix.
pub fn spectral_norm_herm(m: &ComplexMatrix) -> f64 {
    let (vals, _) = herm_eig_raw(&m.hermitize());
    vals.iter().map(|v| v.abs()).fold(0.0, f64::max)
}

/// Uhlmann fidelity F(rho, sigma) = ||sqrt(rho) sqrt(sigma)||_1^2.
pub fn fidelity(rho: &DensityMatrix, sigma: &DensityMatrix) -> Result<f64> {
    if rho.dim() != sigma.dim() {
        return Err(LinalgError::DimensionMismatch(format!(
            "fidelity: {} vs {}",
            rho.dim(),
            sigma.dim()
        )));
    }
    let sr = matrix_fn(rho.hermitian(), |x| x.max(0.0).sqrt(), 0.0);
    let ss = matrix_fn(sigma.hermitian(), |x| x.max(0.0).sqrt(), 0.0);
    let prod = sr.matrix().matmul(ss.matrix());
    let t = trace_norm(&prod);
    Ok((t * t).clamp(0.0, 1.0 + 1e-9).min(1.0))
}

/// Kronecker product A ⊗ B.
pub fn tensor(a: &ComplexMatrix, b: &ComplexMatrix) -> ComplexMatrix {
    let mut out = ComplexMatrix::zeros(a.rows * b.rows, a.cols * b.cols);
    for i in 0..a.rows {
        for j in 0..a.cols {
            let aij = a[(i, j)];
            if aij.norm_sqr() == 0.0 {
                continue;
            }
            for k in 0..b.rows {
                for l in 0..b.cols {
                    out[(i * b.rows + k, j * b.cols + l)] = aij * b[(k, l)];
                }
            }
        }
    }
    out
}

/// Kronecker product of a list of matrices.
pub fn tensor_all(ms: &[&ComplexMatrix]) -> ComplexMatrix {
    assert!(!ms.is_empty());
    let mut acc = ms[0].clone();
    for m in &ms[1..] {
        acc = tensor(&acc, m);
    }
    acc
}

/// Pauli matrices.
pub fn pauli_i() -> ComplexMatrix {
    ComplexMatrix::identity(2)
}
pub fn pauli_x() -> ComplexMatrix {
    ComplexMatrix::from_real(&[vec![0.0, 1.0], vec![1.0, 0.0]])
}
pub fn pauli_y() -> ComplexMatrix {
    ComplexMatrix::from_rows(&[
        vec![Complex64::new(0.0, 0.0), Complex64::new(0.0, -1.0)],
        vec![Complex64::new(0.0, 1.0), Complex64::new(0.0, 0.0)],
    ])
}
pub fn pauli_z() -> ComplexMatrix {
    ComplexMatrix::from_real(&[vec![1.0, 0.0], vec![0.0, -1.0]])
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::Rng;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    pub fn random_hermitian(rng: &mut ChaCha8Rng, n: usize) -> HermitianMatrix {
        let mut m = ComplexMatrix::zeros(n, n);
        for i in 0..n {
            for j in 0..n {
                m[(i, j)] = Complex64::new(rng.gen::<f64>() - 0.5, rng.gen::<f64>() - 0.5);
            }
        }
        HermitianMatrix::from_nearly_hermitian(m)
    }

    pub fn random_state(rng: &mut ChaCha8Rng, dims: Vec<usize>) -> DensityMatrix {
        let d: usize = dims.iter().product();
        let mut v = ComplexMatrix::zeros(d * d, 1);
        for i in 0..d * d {
            v[(i, 0)] = Complex64::new(rng.gen::<f64>() - 0.5, rng.gen::<f64>() - 0.5);
        }
        let full = DensityMatrix::pure(&v, vec![d, d]).unwrap();
        let red = full.partial_trace_keep(&[0]).unwrap();
        red.with_dims(dims).unwrap()
    }

    #[test]
    fn eig_identity() {
        let h = HermitianMatrix::new(ComplexMatrix::identity(2)).unwrap();
        let (vals, _) = herm_eig(&h);
        assert!((vals[0] - 1.0).abs() < 1e-14 && (vals[1] - 1.0).abs() < 1e-14);
    }

    #[test]
    fn eig_pauli_z() {
        let h = HermitianMatrix::new(pauli_z()).unwrap();
        let (vals, _) = herm_eig(&h);
        assert!((vals[0] - 1.0).abs() < 1e-14);
        assert!((vals[1] + 1.0).abs() < 1e-14);
    }

    #[test]
    fn eig_reconstruction_random() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for n in [4usize, 8, 16] {
            let h = random_hermitian(&mut rng, n);
            let (vals, vecs) = herm_eig(&h);
            let rec = reassemble(&vals, &vecs);
            assert!(rec.sub(h.matrix()).frobenius_norm() < 1e-10, "dim {n}");
            // orthonormality
            let gram = vecs.adjoint().matmul(&vecs);
            assert!(gram.sub(&ComplexMatrix::identity(n)).frobenius_norm() < 1e-10);
        }
    }

    #[test]
    fn eig_descending_and_deterministic() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let h = random_hermitian(&mut rng, 6);
        let (vals, vecs) = herm_eig(&h);
        assert!(vals.windows(2).all(|w| w[0] >= w[1]));
        let (vals2, vecs2) = herm_eig(&h);
        assert_eq!(vals, vals2);
        assert_eq!(vecs.data, vecs2.data);
    }

    #[test]
    fn non_hermitian_rejected() {
        let m = ComplexMatrix::from_real(&[vec![0.0, 1.0], vec![0.0, 0.0]]);
        assert!(HermitianMatrix::new(m).is_err());
    }

    #[test]
    fn matrix_fn_identity_and_log() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let h = random_hermitian(&mut rng, 4);
        let same = matrix_fn(&h, |x| x, f64::NEG_INFINITY);
        assert!(same.matrix().sub(h.matrix()).frobenius_norm() < 1e-12);

        let pi = DensityMatrix::maximally_mixed(vec![2]);
        let log = matrix_fn(pi.hermitian(), |x| x.log2(), 1e-300);
        let expect = ComplexMatrix::identity(2).scale_re(-1.0);
        assert!(log.matrix().sub(&expect).frobenius_norm() < 1e-12);
    }

    #[test]
    fn matrix_fn_log_exp_roundtrip() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let rho = random_state(&mut rng, vec![4]);
        let log = matrix_fn(rho.hermitian(), |x| x.log2(), 1e-14);
        let back = matrix_fn(&log, |x| (x * LN_2).exp(), f64::NEG_INFINITY);
        assert!(back.matrix().sub(rho.matrix()).frobenius_norm() < 1e-9);
    }

    #[test]
    fn partial_trace_mes_and_product() {
        let phi = DensityMatrix::maximally_entangled(2);
        let red = partial_trace(phi.matrix(), &[2, 2], &[0]).unwrap();
        let pi = ComplexMatrix::identity(2).scale_re(0.5);
        assert!(red.sub(&pi).frobenius_norm() < 1e-14);

        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let rho = random_state(&mut rng, vec![2]);
        let sigma = random_state(&mut rng, vec![3]);
        let prod = tensor(rho.matrix(), sigma.matrix());
        let back = partial_trace(&prod, &[2, 3], &[0]).unwrap();
        assert!(back.sub(rho.matrix()).frobenius_norm() < 1e-12);
    }

    #[test]
    fn partial_trace_sequential_vs_joint() {
        let mut rng = ChaCha8Rng::seed_from_u64(13);
        let rho = random_state(&mut rng, vec![2, 3, 2]);
        let joint = partial_trace(rho.matrix(), &[2, 3, 2], &[1]).unwrap();
        let step1 = partial_trace(rho.matrix(), &[2, 3, 2], &[1, 2]).unwrap();
        let step2 = partial_trace(&step1, &[3, 2], &[0]).unwrap();
        assert!(joint.sub(&step2).frobenius_norm() < 1e-12);
    }

    #[test]
    fn partial_transpose_properties() {
        let mut rng = ChaCha8Rng::seed_from_u64(17);
        let rho = random_state(&mut rng, vec![2]);
        let sigma = random_state(&mut rng, vec![2]);
        let prod = tensor(rho.matrix(), sigma.matrix());
        let pt = partial_transpose(&prod, &[2, 2], 1).unwrap();
        let expect = tensor(rho.matrix(), &sigma.matrix().transpose());
        assert!(pt.sub(&expect).frobenius_norm() < 1e-14);

        // involution + Frobenius isometry on a random (non-Hermitian) matrix
        let mut m = ComplexMatrix::zeros(4, 4);
        for z in &mut m.data {
            *z = Complex64::new(rng.gen::<f64>() - 0.5, rng.gen::<f64>() - 0.5);
        }
        let pt1 = partial_transpose(&m, &[2, 2], 1).unwrap();
        assert!((pt1.frobenius_norm() - m.frobenius_norm()).abs() < 1e-14);
        let pt2 = partial_transpose(&pt1, &[2, 2], 1).unwrap();
        assert!(pt2.sub(&m).frobenius_norm() < 1e-14);
    }

    #[test]
    fn partial_transpose_mes_eigenvalues() {
        let phi = DensityMatrix::maximally_entangled(2);
        let pt = partial_transpose(phi.matrix(), &[2, 2], 1).unwrap();
        let (mut vals, _) = herm_eig_raw(&pt.hermitize());
        vals.sort_by(|a, b| a.partial_cmp(b).unwrap());
        let expect = [-0.5, 0.5, 0.5, 0.5];
        for (v, e) in vals.iter().zip(expect.iter()) {
            assert!((v - e).abs() < 1e-12);
        }
        assert!((trace_norm(&pt) - 2.0).abs() < 1e-12);
    }

    #[test]
    fn trace_norm_examples() {
        let mut rng = ChaCha8Rng::seed_from_u64(19);
        let rho = random_state(&mut rng, vec![4]);
        assert!((trace_norm(rho.matrix()) - 1.0).abs() < 1e-10);
        assert!((trace_norm(&pauli_x()) - 2.0).abs() < 1e-12);
        // trace_norm >= |Tr|
        let h = random_hermitian(&mut rng, 5);
        assert!(trace_norm(h.matrix()) >= h.trace().abs() - 1e-12);
    }

    #[test]
    fn fidelity_examples() {
        let mut rng = ChaCha8Rng::seed_from_u64(23);
        let rho = random_state(&mut rng, vec![4]);
        assert!((fidelity(&rho, &rho).unwrap() - 1.0).abs() < 1e-9);

        let zero = DensityMatrix::pure(&ComplexMatrix::basis_vector(2, 0), vec![2]).unwrap();
        let one = DensityMatrix::pure(&ComplexMatrix::basis_vector(2, 1), vec![2]).unwrap();
        assert!(fidelity(&zero, &one).unwrap() < 1e-12);

        let phi = DensityMatrix::maximally_entangled(2);
        let pipi = DensityMatrix::maximally_mixed(vec![2, 2]);
        assert!((fidelity(&phi, &pipi).unwrap() - 0.25).abs() < 1e-9);

        // symmetry
        let sigma = random_state(&mut rng, vec![4]);
        let f1 = fidelity(&rho, &sigma).unwrap();
        let f2 = fidelity(&sigma, &rho).unwrap();
        assert!((f1 - f2).abs() < 1e-9);
    }

    #[test]
    fn tensor_identities() {
        let i4 = tensor(&ComplexMatrix::identity(2), &ComplexMatrix::identity(2));
        assert!(i4.sub(&ComplexMatrix::identity(4)).frobenius_norm() < 1e-15);

        let mut rng = ChaCha8Rng::seed_from_u64(29);
        let a = random_hermitian(&mut rng, 2).into_matrix();
        let b = random_hermitian(&mut rng, 3).into_matrix();
        let c = random_hermitian(&mut rng, 2).into_matrix();
        let d = random_hermitian(&mut rng, 3).into_matrix();
        let tr_ab = tensor(&a, &b).trace();
        assert!((tr_ab - a.trace() * b.trace()).norm() < 1e-12);
        // mixed product
        let lhs = tensor(&a, &b).matmul(&tensor(&c, &d));
        let rhs = tensor(&a.matmul(&c), &b.matmul(&d));
        assert!(lhs.sub(&rhs).frobenius_norm() < 1e-12);
    }
}
