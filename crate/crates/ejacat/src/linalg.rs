//! Dense complex matrices, Hermitian spectral calculus, and real subspaces
//! of flattened Hermitian parts.
//!
//! Conventions fixed here and relied on everywhere else:
//! * complex matrices are row-major;
//! * eigenvalues and singular values are reported in descending order;
//! * the Hermitian flattening of an `n × n` block lists the real parts of
//!   the upper triangle (diagonal included, row-major) and then the
//!   imaginary parts of the strict upper triangle, with off-diagonal
//!   entries scaled by `√2` so the flattening is a Frobenius isometry.

use faer::complex_native::c64;
use faer::prelude::SolverCore;
use faer::{Mat, Side};
use num_complex::Complex64;

use crate::error::{Error, Result};

pub type C64 = Complex64;
/// Real dense matrix used for operators on flattened coordinates.
pub type RMat = Mat<f64>;

pub const SQRT_2: f64 = std::f64::consts::SQRT_2;

/// Dense row-major complex matrix.
#[derive(Clone, Debug, PartialEq)]
pub struct CMatrix {
    rows: usize,
    cols: usize,
    data: Vec<C64>,
}

impl CMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        CMatrix { rows, cols, data: vec![C64::new(0.0, 0.0); rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = CMatrix::zeros(n, n);
        for i in 0..n {
            m.data[i * n + i] = C64::new(1.0, 0.0);
        }
        m
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> C64) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        CMatrix { rows, cols, data }
    }

    pub fn from_rows(rows: &[Vec<C64>]) -> Result<Self> {
        if rows.is_empty() {
            return Err(Error::EmptyInput("matrix rows"));
        }
        let cols = rows[0].len();
        if rows.iter().any(|r| r.len() != cols) {
            return Err(Error::DimensionMismatch("ragged matrix rows".into()));
        }
        let mut data = Vec::with_capacity(rows.len() * cols);
        for r in rows {
            data.extend_from_slice(r);
        }
        Ok(CMatrix { rows: rows.len(), cols, data })
    }

    /// Real 2×2-style constructor used all over the Pauli tables.
    pub fn from_real_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let complex: Vec<Vec<C64>> =
            rows.iter().map(|r| r.iter().map(|&x| C64::new(x, 0.0)).collect()).collect();
        CMatrix::from_rows(&complex)
    }

    pub fn nrows(&self) -> usize {
        self.rows
    }

    pub fn ncols(&self) -> usize {
        self.cols
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> C64 {
        self.data[i * self.cols + j]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: C64) {
        self.data[i * self.cols + j] = v;
    }

    pub fn add(&self, other: &CMatrix) -> CMatrix {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        let data = self.data.iter().zip(&other.data).map(|(a, b)| a + b).collect();
        CMatrix { rows: self.rows, cols: self.cols, data }
    }

    pub fn sub(&self, other: &CMatrix) -> CMatrix {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        let data = self.data.iter().zip(&other.data).map(|(a, b)| a - b).collect();
        CMatrix { rows: self.rows, cols: self.cols, data }
    }

    pub fn scale(&self, s: C64) -> CMatrix {
        let data = self.data.iter().map(|a| a * s).collect();
        CMatrix { rows: self.rows, cols: self.cols, data }
    }

    pub fn mul(&self, other: &CMatrix) -> CMatrix {
        assert_eq!(self.cols, other.rows, "matmul shape mismatch");
        let (n, k, m) = (self.rows, self.cols, other.cols);
        let mut out = vec![C64::new(0.0, 0.0); n * m];
        for i in 0..n {
            for p in 0..k {
                let a = self.data[i * k + p];
                if a.re == 0.0 && a.im == 0.0 {
                    continue;
                }
                let row = &other.data[p * m..(p + 1) * m];
                let dst = &mut out[i * m..(i + 1) * m];
                for j in 0..m {
                    dst[j] += a * row[j];
                }
            }
        }
        CMatrix { rows: n, cols: m, data: out }
    }

    pub fn adjoint(&self) -> CMatrix {
        CMatrix::from_fn(self.cols, self.rows, |i, j| self.get(j, i).conj())
    }

    pub fn transpose(&self) -> CMatrix {
        CMatrix::from_fn(self.cols, self.rows, |i, j| self.get(j, i))
    }

    pub fn conj(&self) -> CMatrix {
        let data = self.data.iter().map(|a| a.conj()).collect();
        CMatrix { rows: self.rows, cols: self.cols, data }
    }

    pub fn trace(&self) -> C64 {
        assert_eq!(self.rows, self.cols);
        (0..self.rows).map(|i| self.get(i, i)).sum()
    }

    pub fn frob_norm(&self) -> f64 {
        self.data.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt()
    }

    /// `‖m − m*‖ / max(1, ‖m‖)`.
    pub fn hermitian_defect(&self) -> f64 {
        assert_eq!(self.rows, self.cols);
        let mut d = 0.0;
        for i in 0..self.rows {
            for j in 0..self.cols {
                let e = self.get(i, j) - self.get(j, i).conj();
                d += e.norm_sqr();
            }
        }
        d.sqrt() / self.frob_norm().max(1.0)
    }

    pub fn is_hermitian(&self, tol: f64) -> bool {
        self.rows == self.cols && self.hermitian_defect() <= tol
    }

    pub fn check_hermitian(&self, tol: f64) -> Result<()> {
        let defect = self.hermitian_defect();
        if self.rows != self.cols || defect > tol {
            return Err(Error::NotHermitian { defect });
        }
        Ok(())
    }

    /// Kronecker product, row-major: entry `((i p + k), (j q + l)) = a_ij b_kl`
    /// for `b` of shape `p × q`.
    pub fn kron(&self, b: &CMatrix) -> CMatrix {
        let (p, q) = (b.rows, b.cols);
        CMatrix::from_fn(self.rows * p, self.cols * q, |r, c| {
            self.get(r / p, c / q) * b.get(r % p, c % q)
        })
    }

    pub fn to_faer(&self) -> Mat<c64> {
        Mat::from_fn(self.rows, self.cols, |i, j| {
            let v = self.get(i, j);
            c64::new(v.re, v.im)
        })
    }

    pub fn from_faer(m: faer::MatRef<'_, c64>) -> CMatrix {
        CMatrix::from_fn(m.nrows(), m.ncols(), |i, j| {
            let v = m[(i, j)];
            C64::new(v.re, v.im)
        })
    }

    /// Raw faer eigendecomposition; `None` when the solver broke down and
    /// produced non-finite output.
    fn faer_eig_hermitian(&self) -> Option<(Vec<f64>, CMatrix)> {
        let n = self.rows;
        let evd = self.to_faer().selfadjoint_eigendecomposition(Side::Lower);
        let s = evd.s().column_vector();
        let u = evd.u();
        // faer reports eigenvalues ascending; flip.
        let vals: Vec<f64> = (0..n).map(|i| s[n - 1 - i].re).collect();
        if vals.iter().any(|v| !v.is_finite()) {
            return None;
        }
        let vecs = CMatrix::from_fn(n, n, |i, j| {
            let v = u[(i, n - 1 - j)];
            C64::new(v.re, v.im)
        });
        if vecs.data.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return None;
        }
        Some((vals, vecs))
    }

    /// Eigendecomposition of a Hermitian matrix. Eigenvalues descending,
    /// column `j` of the returned matrix is the eigenvector of `λ_j`.
    pub fn eig_hermitian(&self, tol_herm: f64) -> Result<(Vec<f64>, CMatrix)> {
        self.check_hermitian(tol_herm)?;
        let n = self.rows;
        if n == 0 {
            return Err(Error::EmptyInput("eigendecomposition of 0×0 matrix"));
        }
        if let Some(out) = self.faer_eig_hermitian() {
            return Ok(out);
        }
        // The tridiagonalization can break down (NaN output) on sparse
        // matrices with very degenerate spectra. Conjugating by a dense
        // unitary leaves the spectrum untouched and sidesteps the breakdown;
        // eigenvectors are rotated back afterwards.
        let q = dense_unitary(n);
        let rotated = q.adjoint().mul(self).mul(&q);
        let sym = rotated.add(&rotated.adjoint()).scale(C64::new(0.5, 0.0));
        let (vals, w) = sym.faer_eig_hermitian().ok_or(Error::EigenBreakdown { n })?;
        Ok((vals, q.mul(&w)))
    }

    /// Spectral function of a Hermitian matrix: `f(m) = Σ f(λ_i) v_i v_i*`.
    pub fn spectral_fn(&self, tol_herm: f64, f: impl Fn(f64) -> f64) -> Result<CMatrix> {
        let (vals, vecs) = self.eig_hermitian(tol_herm)?;
        let n = self.rows;
        let mut out = CMatrix::zeros(n, n);
        for (k, &lam) in vals.iter().enumerate() {
            let w = f(lam);
            if w == 0.0 {
                continue;
            }
            for i in 0..n {
                let vi = vecs.get(i, k);
                for j in 0..n {
                    let t = out.get(i, j) + vi * vecs.get(j, k).conj() * w;
                    out.set(i, j, t);
                }
            }
        }
        Ok(out)
    }

    pub fn exp_hermitian(&self, tol_herm: f64) -> Result<CMatrix> {
        self.spectral_fn(tol_herm, f64::exp)
    }
}

/// Stack real row vectors into a faer matrix.
pub fn rmat_from_rows(rows: &[Vec<f64>]) -> RMat {
    let nrows = rows.len();
    let ncols = rows.first().map_or(0, |r| r.len());
    Mat::from_fn(nrows, ncols, |i, j| rows[i][j])
}

pub fn rmat_row(m: &RMat, i: usize) -> Vec<f64> {
    (0..m.ncols()).map(|j| m[(i, j)]).collect()
}

pub fn rmat_frob(m: &RMat) -> f64 {
    let mut s = 0.0;
    for j in 0..m.ncols() {
        for i in 0..m.nrows() {
            s += m[(i, j)] * m[(i, j)];
        }
    }
    s.sqrt()
}

pub fn rmat_identity(n: usize) -> RMat {
    Mat::from_fn(n, n, |i, j| if i == j { 1.0 } else { 0.0 })
}

pub fn rmat_inverse(m: &RMat) -> RMat {
    m.partial_piv_lu().inverse()
}

/// Eigendecomposition of a real symmetric matrix, eigenvalues descending.
pub fn sym_eig(m: &RMat) -> (Vec<f64>, RMat) {
    let n = m.nrows();
    let evd = m.selfadjoint_eigendecomposition(Side::Lower);
    let s = evd.s().column_vector();
    let u = evd.u();
    let vals: Vec<f64> = (0..n).map(|i| s[n - 1 - i]).collect();
    let vecs = Mat::from_fn(n, n, |i, j| u[(i, n - 1 - j)]);
    (vals, vecs)
}

/// `exp(m)` for real symmetric `m`.
pub fn exp_sym(m: &RMat) -> RMat {
    let (vals, vecs) = sym_eig(m);
    let n = m.nrows();
    let scaled = Mat::from_fn(n, n, |i, j| vecs[(i, j)] * vals[j].exp());
    &scaled * vecs.transpose()
}

/// Rank of a column-pivoted `R` factor: diagonal entries above
/// `tol_rank · |r₀₀|`. The pivoted diagonal is non-increasing, so this is a
/// rank-revealing cut.
fn qr_rank(r: &RMat, tol_rank: f64) -> usize {
    let k = r.nrows().min(r.ncols());
    if k == 0 {
        return 0;
    }
    let r0 = r[(0, 0)].abs();
    (0..k).take_while(|&i| r[(i, i)].abs() > tol_rank * r0 && r[(i, i)].abs() > 0.0).count()
}

/// Orthonormal basis of the kernel of `m`, rows of the returned matrix.
/// Directions with pivot `≤ tol_rank · |r₀₀|` count as kernel.
///
/// Column-pivoted Householder QR of `mᵀ`; the trailing columns of the full
/// `Q` complement the row space exactly even when the spectrum is
/// degenerate, which the bidiagonal SVD here mishandles.
pub fn kernel_basis(m: &RMat, tol_rank: f64) -> RMat {
    let n = m.ncols();
    let qr = m.transpose().to_owned().col_piv_qr();
    let rank = qr_rank(&qr.compute_r(), tol_rank);
    let q = qr.compute_q();
    Mat::from_fn(n - rank, n, |i, j| q[(j, rank + i)])
}

/// Real subspace of `R^ambient_dim` held as orthonormal basis rows.
#[derive(Clone, Debug)]
pub struct RealSubspace {
    ambient_dim: usize,
    basis: RMat,
}

impl RealSubspace {
    /// Span of the given vectors, orthonormalized by column-pivoted QR;
    /// directions with pivot `≤ tol_rank · |r₀₀|` are discarded.
    pub fn span(vectors: &[Vec<f64>], tol_rank: f64) -> Result<RealSubspace> {
        if vectors.is_empty() {
            return Err(Error::EmptyInput("subspace spanning set"));
        }
        let stacked = rmat_from_rows(vectors);
        Ok(RealSubspace::span_rows(stacked, tol_rank))
    }

    pub fn span_rows(stacked: RMat, tol_rank: f64) -> RealSubspace {
        let ambient_dim = stacked.ncols();
        if stacked.nrows() == 0 {
            return RealSubspace::zero(ambient_dim);
        }
        let qr = stacked.transpose().to_owned().col_piv_qr();
        let rank = qr_rank(&qr.compute_r(), tol_rank);
        let q = qr.compute_thin_q();
        let basis = Mat::from_fn(rank, ambient_dim, |i, j| q[(j, i)]);
        RealSubspace { ambient_dim, basis }
    }

    /// Wrap rows that are already orthonormal. Verified against `tol_orth`.
    pub fn from_orthonormal_rows(basis: RMat, tol_orth: f64) -> Result<RealSubspace> {
        let sub = RealSubspace { ambient_dim: basis.ncols(), basis };
        let drift = sub.orthonormality_defect();
        if drift > tol_orth {
            return Err(Error::DimensionMismatch(format!(
                "basis rows are not orthonormal: defect {drift:.3e}"
            )));
        }
        Ok(sub)
    }

    pub fn zero(ambient_dim: usize) -> RealSubspace {
        RealSubspace { ambient_dim, basis: Mat::zeros(0, ambient_dim) }
    }

    pub fn dim(&self) -> usize {
        self.basis.nrows()
    }

    pub fn ambient_dim(&self) -> usize {
        self.ambient_dim
    }

    pub fn basis_mat(&self) -> &RMat {
        &self.basis
    }

    pub fn basis_row(&self, i: usize) -> Vec<f64> {
        rmat_row(&self.basis, i)
    }

    /// `‖B Bᵀ − I‖`.
    pub fn orthonormality_defect(&self) -> f64 {
        let g = &self.basis * self.basis.transpose();
        let k = g.nrows();
        let mut d = 0.0;
        for i in 0..k {
            for j in 0..k {
                let e = g[(i, j)] - if i == j { 1.0 } else { 0.0 };
                d += e * e;
            }
        }
        d.sqrt()
    }

    /// Coefficients of `v` against the basis rows.
    pub fn coords(&self, v: &[f64]) -> Vec<f64> {
        assert_eq!(v.len(), self.ambient_dim);
        let mut out = vec![0.0; self.dim()];
        for (i, o) in out.iter_mut().enumerate() {
            let mut s = 0.0;
            for j in 0..self.ambient_dim {
                s += self.basis[(i, j)] * v[j];
            }
            *o = s;
        }
        out
    }

    pub fn from_coords(&self, c: &[f64]) -> Vec<f64> {
        assert_eq!(c.len(), self.dim());
        let mut out = vec![0.0; self.ambient_dim];
        for i in 0..self.dim() {
            let ci = c[i];
            if ci == 0.0 {
                continue;
            }
            for (j, o) in out.iter_mut().enumerate() {
                *o += ci * self.basis[(i, j)];
            }
        }
        out
    }

    pub fn project(&self, v: &[f64]) -> Vec<f64> {
        self.from_coords(&self.coords(v))
    }

    pub fn residual(&self, v: &[f64]) -> f64 {
        let p = self.project(v);
        v.iter().zip(&p).map(|(a, b)| (a - b) * (a - b)).sum::<f64>().sqrt()
    }

    /// Membership test: residual `≤ tol_member · (1 + ‖v‖)`.
    pub fn contains(&self, v: &[f64], tol_member: f64) -> bool {
        let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
        self.residual(v) <= tol_member * (1.0 + norm)
    }

    /// Max residual over the rows of `other`'s basis.
    pub fn max_residual_of(&self, other: &RealSubspace) -> f64 {
        let mut worst: f64 = 0.0;
        for i in 0..other.dim() {
            worst = worst.max(self.residual(&other.basis_row(i)));
        }
        worst
    }

    /// Mutual containment of two subspaces within `tol`.
    pub fn equals(&self, other: &RealSubspace, tol: f64) -> bool {
        self.dim() == other.dim()
            && self.ambient_dim == other.ambient_dim
            && self.max_residual_of(other) <= tol
            && other.max_residual_of(self) <= tol
    }

    /// Grow the subspace by whatever part of `chunk`'s rows escapes it.
    ///
    /// Rows whose residual passes the membership test are dropped before
    /// ranking, so round-off never spawns spurious directions; the survivors
    /// are orthonormalized with the relative `tol_rank` cutoff. Returns the
    /// number of directions added.
    pub fn extend_with_rows(&mut self, chunk: &RMat, tol_rank: f64, tol_member: f64) -> usize {
        assert_eq!(chunk.ncols(), self.ambient_dim);
        let resid = if self.dim() == 0 {
            chunk.clone()
        } else {
            let coef = chunk * self.basis.transpose();
            chunk - &coef * &self.basis
        };
        let mut keep: Vec<usize> = Vec::new();
        for i in 0..resid.nrows() {
            let mut rn = 0.0;
            let mut vn = 0.0;
            for j in 0..self.ambient_dim {
                rn += resid[(i, j)] * resid[(i, j)];
                vn += chunk[(i, j)] * chunk[(i, j)];
            }
            if rn.sqrt() > tol_member * (1.0 + vn.sqrt()) {
                keep.push(i);
            }
        }
        if keep.is_empty() {
            return 0;
        }
        let survivors = Mat::from_fn(keep.len(), self.ambient_dim, |i, j| resid[(keep[i], j)]);
        // second projection pass: cancellation in the first can leave
        // survivors with small components along the old basis
        let survivors = if self.dim() == 0 {
            survivors
        } else {
            let coef = &survivors * self.basis.transpose();
            survivors - &coef * &self.basis
        };
        let fresh = RealSubspace::span_rows(survivors, tol_rank);
        let added = fresh.dim();
        if added == 0 {
            return 0;
        }
        let old = self.basis.nrows();
        let merged = Mat::from_fn(old + added, self.ambient_dim, |i, j| {
            if i < old {
                self.basis[(i, j)]
            } else {
                fresh.basis[(i - old, j)]
            }
        });
        self.basis = merged;
        added
    }

    /// Worst `residual / (1 + ‖row‖)` over the chunk's rows, via one GEMM.
    pub fn max_relative_residual(&self, chunk: &RMat) -> f64 {
        assert_eq!(chunk.ncols(), self.ambient_dim);
        let resid = if self.dim() == 0 {
            chunk.clone()
        } else {
            let coef = chunk * self.basis.transpose();
            chunk - &coef * &self.basis
        };
        let mut worst: f64 = 0.0;
        for i in 0..chunk.nrows() {
            let mut rn = 0.0;
            let mut vn = 0.0;
            for j in 0..self.ambient_dim {
                rn += resid[(i, j)] * resid[(i, j)];
                vn += chunk[(i, j)] * chunk[(i, j)];
            }
            worst = worst.max(rn.sqrt() / (1.0 + vn.sqrt()));
        }
        worst
    }
}

/// Length of the Hermitian flattening of an `n × n` block.
pub fn herm_flat_len(n: usize) -> usize {
    n * n
}

/// Append the Hermitian flattening of `m` to `out`. Frobenius isometry.
pub fn flatten_hermitian_block(m: &CMatrix, out: &mut Vec<f64>) {
    let n = m.nrows();
    for i in 0..n {
        for j in i..n {
            let v = m.get(i, j).re;
            out.push(if i == j { v } else { v * SQRT_2 });
        }
    }
    for i in 0..n {
        for j in (i + 1)..n {
            out.push(m.get(i, j).im * SQRT_2);
        }
    }
}

/// Inverse of [`flatten_hermitian_block`].
pub fn unflatten_hermitian_block(v: &[f64], n: usize) -> CMatrix {
    assert_eq!(v.len(), herm_flat_len(n));
    let mut m = CMatrix::zeros(n, n);
    let mut idx = 0;
    for i in 0..n {
        for j in i..n {
            if i == j {
                m.set(i, i, C64::new(v[idx], 0.0));
            } else {
                let re = v[idx] / SQRT_2;
                m.set(i, j, C64::new(re, 0.0));
                m.set(j, i, C64::new(re, 0.0));
            }
            idx += 1;
        }
    }
    for i in 0..n {
        for j in (i + 1)..n {
            let im = v[idx] / SQRT_2;
            let cur = m.get(i, j);
            m.set(i, j, C64::new(cur.re, im));
            m.set(j, i, C64::new(cur.re, -im));
            idx += 1;
        }
    }
    m
}

/// Append the full complex flattening (row-major, `re` then `im` per entry),
/// both parts scaled by `weight`.
pub fn flatten_full_block(m: &CMatrix, weight: f64, out: &mut Vec<f64>) {
    for i in 0..m.nrows() {
        for j in 0..m.ncols() {
            let v = m.get(i, j);
            out.push(v.re * weight);
            out.push(v.im * weight);
        }
    }
}

/// Inverse of [`flatten_full_block`].
pub fn unflatten_full_block(v: &[f64], n: usize, weight: f64) -> CMatrix {
    assert_eq!(v.len(), 2 * n * n);
    CMatrix::from_fn(n, n, |i, j| {
        let k = 2 * (i * n + j);
        C64::new(v[k] / weight, v[k + 1] / weight)
    })
}

/// Deterministic dense unitary: two-pass Gram–Schmidt on a seeded Gaussian
/// matrix. Used only as a change of basis when the eigensolver breaks down.
fn dense_unitary(n: usize) -> CMatrix {
    use rand::SeedableRng;
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(0x51eb_0000 ^ n as u64);
    let mut cols: Vec<Vec<C64>> = (0..n)
        .map(|_| {
            (0..n)
                .map(|_| C64::new(standard_normal(&mut rng), standard_normal(&mut rng)))
                .collect()
        })
        .collect();
    for j in 0..n {
        for _pass in 0..2 {
            for k in 0..j {
                let (head, tail) = cols.split_at_mut(j);
                let ck = &head[k];
                let cj = &mut tail[0];
                let mut c = C64::new(0.0, 0.0);
                for i in 0..n {
                    c += ck[i].conj() * cj[i];
                }
                for i in 0..n {
                    cj[i] -= ck[i] * c;
                }
            }
        }
        let norm = cols[j].iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        for z in &mut cols[j] {
            *z /= norm;
        }
    }
    CMatrix::from_fn(n, n, |i, j| cols[j][i])
}

/// Standard normal draw (Box–Muller).
pub fn standard_normal(rng: &mut impl rand::Rng) -> f64 {
    loop {
        let u1: f64 = rng.gen::<f64>();
        if u1 <= f64::MIN_POSITIVE {
            continue;
        }
        let u2: f64 = rng.gen::<f64>();
        return (-2.0 * u1.ln()).sqrt() * (2.0 * std::f64::consts::PI * u2).cos();
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn random_hermitian(n: usize, rng: &mut ChaCha8Rng) -> CMatrix {
        let raw = CMatrix::from_fn(n, n, |_, _| {
            C64::new(standard_normal(rng), standard_normal(rng))
        });
        raw.add(&raw.adjoint()).scale(C64::new(0.5, 0.0))
    }

    #[test]
    fn hermitian_flatten_round_trips_and_is_isometric() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for n in 1..=6 {
            let m = random_hermitian(n, &mut rng);
            let mut flat = Vec::new();
            flatten_hermitian_block(&m, &mut flat);
            assert_eq!(flat.len(), herm_flat_len(n));
            let norm_flat = flat.iter().map(|x| x * x).sum::<f64>().sqrt();
            assert!((norm_flat - m.frob_norm()).abs() < 1e-12);
            let back = unflatten_hermitian_block(&flat, n);
            assert!(back.sub(&m).frob_norm() < 1e-12);
        }
    }

    #[test]
    fn full_flatten_round_trips() {
        let mut rng = ChaCha8Rng::seed_from_u64(12);
        let m = CMatrix::from_fn(4, 4, |_, _| {
            C64::new(standard_normal(&mut rng), standard_normal(&mut rng))
        });
        let mut flat = Vec::new();
        flatten_full_block(&m, 3.0, &mut flat);
        let back = unflatten_full_block(&flat, 4, 3.0);
        assert!(back.sub(&m).frob_norm() < 1e-12);
    }

    #[test]
    fn eig_hermitian_descending_and_reconstructs() {
        let mut rng = ChaCha8Rng::seed_from_u64(13);
        let m = random_hermitian(7, &mut rng);
        let (vals, vecs) = m.eig_hermitian(1e-10).unwrap();
        for w in vals.windows(2) {
            assert!(w[0] >= w[1] - 1e-12);
        }
        let mut rec = CMatrix::zeros(7, 7);
        for (k, &lam) in vals.iter().enumerate() {
            for i in 0..7 {
                for j in 0..7 {
                    let t = rec.get(i, j) + vecs.get(i, k) * vecs.get(j, k).conj() * lam;
                    rec.set(i, j, t);
                }
            }
        }
        assert!(rec.sub(&m).frob_norm() < 1e-9 * m.frob_norm().max(1.0));
    }

    #[test]
    fn eig_rejects_non_hermitian() {
        let m = CMatrix::from_rows(&[
            vec![C64::new(0.0, 0.0), C64::new(1.0, 0.0)],
            vec![C64::new(0.0, 0.0), C64::new(0.0, 0.0)],
        ])
        .unwrap();
        assert!(matches!(m.eig_hermitian(1e-10), Err(Error::NotHermitian { .. })));
    }

    #[test]
    fn exp_hermitian_matches_series() {
        let mut rng = ChaCha8Rng::seed_from_u64(14);
        let m = random_hermitian(4, &mut rng).scale(C64::new(0.3, 0.0));
        let e = m.exp_hermitian(1e-10).unwrap();
        // truncated Taylor series
        let mut series = CMatrix::identity(4);
        let mut term = CMatrix::identity(4);
        for k in 1..25 {
            term = term.mul(&m).scale(C64::new(1.0 / k as f64, 0.0));
            series = series.add(&term);
        }
        assert!(e.sub(&series).frob_norm() < 1e-10);
    }

    #[test]
    fn kron_matches_block_structure() {
        let a = CMatrix::from_real_rows(&[vec![1.0, 2.0], vec![3.0, 4.0]]).unwrap();
        let b = CMatrix::from_real_rows(&[vec![0.0, 5.0], vec![6.0, 7.0]]).unwrap();
        let k = a.kron(&b);
        assert_eq!(k.nrows(), 4);
        assert!((k.get(0, 1).re - 5.0).abs() < 1e-15);
        assert!((k.get(2, 0).re - 0.0).abs() < 1e-15);
        assert!((k.get(3, 0).re - 18.0).abs() < 1e-15);
        assert!((k.get(3, 3).re - 28.0).abs() < 1e-15);
    }

    #[test]
    fn span_finds_rank_and_projects() {
        let v1 = vec![1.0, 0.0, 0.0, 0.0];
        let v2 = vec![0.0, 1.0, 0.0, 0.0];
        let v3 = vec![1.0, 1.0, 0.0, 0.0]; // dependent
        let sub = RealSubspace::span(&[v1, v2, v3], 1e-8).unwrap();
        assert_eq!(sub.dim(), 2);
        assert!(sub.contains(&[2.0, -3.0, 0.0, 0.0], 1e-8));
        assert!(!sub.contains(&[0.0, 0.0, 1.0, 0.0], 1e-8));
        let p = sub.project(&[1.0, 2.0, 3.0, 4.0]);
        assert!((p[0] - 1.0).abs() < 1e-12 && (p[2]).abs() < 1e-12);
        // projection is idempotent
        let pp = sub.project(&p);
        let diff: f64 = p.iter().zip(&pp).map(|(a, b)| (a - b).abs()).sum();
        assert!(diff < 1e-12);
    }

    #[test]
    fn extend_ignores_round_off_and_accepts_genuine_directions() {
        let mut sub = RealSubspace::span(&[vec![1.0, 0.0, 0.0]], 1e-8).unwrap();
        // noise-level rows must not grow the span
        let noise = rmat_from_rows(&[vec![1.0, 1e-13, 0.0]]);
        assert_eq!(sub.extend_with_rows(&noise, 1e-8, 1e-8), 0);
        assert_eq!(sub.dim(), 1);
        let fresh = rmat_from_rows(&[vec![0.5, 0.5, 0.0], vec![1.0, 1.0, 0.0]]);
        assert_eq!(sub.extend_with_rows(&fresh, 1e-8, 1e-8), 1);
        assert_eq!(sub.dim(), 2);
        assert!(sub.orthonormality_defect() < 1e-12);
    }

    #[test]
    fn kernel_basis_finds_null_space() {
        // rank-1 map on R^3
        let m = rmat_from_rows(&[vec![1.0, 1.0, 0.0], vec![2.0, 2.0, 0.0]]);
        let k = kernel_basis(&m, 1e-10);
        assert_eq!(k.nrows(), 2);
        for i in 0..2 {
            let r = rmat_row(&k, i);
            assert!((r[0] + r[1]).abs() < 1e-10);
        }
    }

    #[test]
    fn sym_eig_descending_and_exp_sym() {
        let m = rmat_from_rows(&[vec![0.0, 1.0], vec![1.0, 0.0]]);
        let (vals, _) = sym_eig(&m);
        assert!((vals[0] - 1.0).abs() < 1e-12 && (vals[1] + 1.0).abs() < 1e-12);
        let e = exp_sym(&m);
        let c = 1.0f64.cosh();
        let s = 1.0f64.sinh();
        assert!((e[(0, 0)] - c).abs() < 1e-12 && (e[(0, 1)] - s).abs() < 1e-12);
    }
}
