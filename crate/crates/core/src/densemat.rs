//! Dense complex linear algebra and singular-value-based matrix norms.
//!
//! [`ComplexMatrix`] is the universal numeric carrier of the crate: a dense
//! row-major complex matrix. Eigendecompositions and SVDs are delegated to
//! nalgebra behind the contracts checked here (Hermiticity, reconstruction
//! residuals, descending singular values).

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{Error, Result};

/// Relative tolerance used for the Hermiticity precondition.
pub const HERM_TOL: f64 = 1e-10;
/// Singular values below `RANK_TOL * sigma_max` are treated as zero for rank
/// decisions.
pub const RANK_TOL: f64 = 1e-12;

type C = Complex64;

/// Dense complex matrix, row-major.
#[derive(Clone, PartialEq)]
pub struct ComplexMatrix {
    rows: usize,
    cols: usize,
    entries: Vec<C>,
}

impl std::fmt::Debug for ComplexMatrix {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        writeln!(f, "ComplexMatrix {}x{} [", self.rows, self.cols)?;
        for i in 0..self.rows.min(8) {
            write!(f, "  ")?;
            for j in 0..self.cols.min(8) {
                let z = self[(i, j)];
                write!(f, "{:+.4}{:+.4}i ", z.re, z.im)?;
            }
            writeln!(f)?;
        }
        write!(f, "]")
    }
}

impl std::ops::Index<(usize, usize)> for ComplexMatrix {
    type Output = C;
    #[inline]
    fn index(&self, (i, j): (usize, usize)) -> &C {
        &self.entries[i * self.cols + j]
    }
}

impl std::ops::IndexMut<(usize, usize)> for ComplexMatrix {
    #[inline]
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut C {
        &mut self.entries[i * self.cols + j]
    }
}

impl ComplexMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        ComplexMatrix {
            rows,
            cols,
            entries: vec![C::new(0.0, 0.0); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = C::new(1.0, 0.0);
        }
        m
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> C) -> Self {
        let mut m = Self::zeros(rows, cols);
        for i in 0..rows {
            for j in 0..cols {
                m[(i, j)] = f(i, j);
            }
        }
        m
    }

    /// Builds a matrix from a row-major slice of (re, im) pairs is overkill;
    /// this takes real entries, the common case in tests and fixtures.
    pub fn from_real(rows: usize, cols: usize, data: &[f64]) -> Self {
        assert_eq!(data.len(), rows * cols, "from_real: data length");
        ComplexMatrix {
            rows,
            cols,
            entries: data.iter().map(|&x| C::new(x, 0.0)).collect(),
        }
    }

    pub fn from_vec(rows: usize, cols: usize, entries: Vec<C>) -> Result<Self> {
        if entries.len() != rows * cols {
            return Err(Error::DimensionMismatch(format!(
                "entry count {} != {}x{}",
                entries.len(),
                rows,
                cols
            )));
        }
        Ok(ComplexMatrix {
            rows,
            cols,
            entries,
        })
    }

    pub fn diag(values: &[f64]) -> Self {
        let n = values.len();
        let mut m = Self::zeros(n, n);
        for (i, &v) in values.iter().enumerate() {
            m[(i, i)] = C::new(v, 0.0);
        }
        m
    }

    /// Column vector (n x 1) from complex entries.
    pub fn col_vector(entries: Vec<C>) -> Self {
        let n = entries.len();
        ComplexMatrix {
            rows: n,
            cols: 1,
            entries,
        }
    }

    #[inline]
    pub fn rows(&self) -> usize {
        self.rows
    }

    #[inline]
    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn entries(&self) -> &[C] {
        &self.entries
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self[(j, i)])
    }

    pub fn conj(&self) -> Self {
        ComplexMatrix {
            rows: self.rows,
            cols: self.cols,
            entries: self.entries.iter().map(|z| z.conj()).collect(),
        }
    }

    /// Conjugate transpose.
    pub fn dagger(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self[(j, i)].conj())
    }

    pub fn scale(&self, s: C) -> Self {
        ComplexMatrix {
            rows: self.rows,
            cols: self.cols,
            entries: self.entries.iter().map(|z| z * s).collect(),
        }
    }

    pub fn scale_re(&self, s: f64) -> Self {
        self.scale(C::new(s, 0.0))
    }

    pub fn add(&self, other: &Self) -> Self {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        ComplexMatrix {
            rows: self.rows,
            cols: self.cols,
            entries: self
                .entries
                .iter()
                .zip(&other.entries)
                .map(|(a, b)| a + b)
                .collect(),
        }
    }

    pub fn sub(&self, other: &Self) -> Self {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        ComplexMatrix {
            rows: self.rows,
            cols: self.cols,
            entries: self
                .entries
                .iter()
                .zip(&other.entries)
                .map(|(a, b)| a - b)
                .collect(),
        }
    }

    pub fn matmul(&self, other: &Self) -> Self {
        assert_eq!(self.cols, other.rows, "matmul inner dims");
        let mut out = Self::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self[(i, k)];
                if a.norm_sqr() == 0.0 {
                    continue;
                }
                for j in 0..other.cols {
                    out[(i, j)] += a * other[(k, j)];
                }
            }
        }
        out
    }

    /// Matrix-vector product.
    pub fn matvec(&self, v: &[C]) -> Vec<C> {
        assert_eq!(self.cols, v.len(), "matvec dims");
        let mut out = vec![C::new(0.0, 0.0); self.rows];
        for i in 0..self.rows {
            let mut acc = C::new(0.0, 0.0);
            for j in 0..self.cols {
                acc += self[(i, j)] * v[j];
            }
            out[i] = acc;
        }
        out
    }

    pub fn trace(&self) -> C {
        assert!(self.is_square());
        (0..self.rows).map(|i| self[(i, i)]).sum()
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.entries.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    /// Hilbert-Schmidt inner product `Tr(self^dagger other)`.
    pub fn hs_inner(&self, other: &Self) -> C {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        self.entries
            .iter()
            .zip(&other.entries)
            .map(|(a, b)| a.conj() * b)
            .sum()
    }

    pub fn max_abs(&self) -> f64 {
        self.entries.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    pub fn herm_residual(&self) -> f64 {
        if !self.is_square() {
            return f64::INFINITY;
        }
        let mut s = 0.0f64;
        for i in 0..self.rows {
            for j in 0..self.cols {
                s += (self[(i, j)] - self[(j, i)].conj()).norm_sqr();
            }
        }
        s.sqrt()
    }

    pub fn is_hermitian(&self, tol_rel: f64) -> bool {
        self.is_square() && self.herm_residual() <= tol_rel * (1.0 + self.frobenius_norm())
    }

    /// Hermitian part `(A + A^dagger)/2`.
    pub fn hermitian_part(&self) -> Self {
        self.add(&self.dagger()).scale_re(0.5)
    }

    pub(crate) fn to_na(&self) -> DMatrix<C> {
        DMatrix::from_fn(self.rows, self.cols, |i, j| self[(i, j)])
    }

    pub(crate) fn from_na(m: &DMatrix<C>) -> Self {
        Self::from_fn(m.nrows(), m.ncols(), |i, j| m[(i, j)])
    }
}

/// Eigendecomposition of a Hermitian matrix: ascending eigenvalues and the
/// columns of a unitary.
#[derive(Clone, Debug)]
pub struct HermEigResult {
    /// Ascending real eigenvalues.
    pub eigenvalues: Vec<f64>,
    /// Unitary whose i-th column is the eigenvector of `eigenvalues[i]`.
    pub eigenvectors: ComplexMatrix,
}

impl HermEigResult {
    pub fn eigenvector(&self, i: usize) -> Vec<C> {
        (0..self.eigenvectors.rows())
            .map(|r| self.eigenvectors[(r, i)])
            .collect()
    }

    pub fn min(&self) -> f64 {
        self.eigenvalues[0]
    }

    pub fn max(&self) -> f64 {
        *self.eigenvalues.last().unwrap()
    }
}

/// Singular value decomposition `A = U diag(sigma) V^dagger` with descending
/// singular values and orthonormal columns in `U` and `V`.
#[derive(Clone, Debug)]
pub struct SvdResult {
    pub u: ComplexMatrix,
    pub singular_values: Vec<f64>,
    pub v: ComplexMatrix,
}

impl SvdResult {
    /// Number of singular values above `RANK_TOL * sigma_1`.
    pub fn rank(&self) -> usize {
        numerical_rank(&self.singular_values, RANK_TOL)
    }
}

pub fn numerical_rank(sigma: &[f64], tol_rel: f64) -> usize {
    let s1 = sigma.first().copied().unwrap_or(0.0);
    if s1 <= 0.0 {
        return 0;
    }
    sigma.iter().filter(|&&s| s > tol_rel * s1).count()
}

/// Eigendecomposition of a Hermitian matrix.
///
/// The input is checked against `A = A^dagger` to `1e-10 * (1 + ||A||_F)` and
/// symmetrized before decomposition so downstream rounding does not leak
/// through.
pub fn herm_eig(a: &ComplexMatrix) -> Result<HermEigResult> {
    if !a.is_square() {
        return Err(Error::DimensionMismatch(format!(
            "herm_eig on {}x{}",
            a.rows(),
            a.cols()
        )));
    }
    let residual = a.herm_residual();
    let tol = HERM_TOL * (1.0 + a.frobenius_norm());
    if residual > tol {
        return Err(Error::NotHermitian { residual, tol });
    }
    Ok(herm_eig_unchecked(&a.hermitian_part()))
}

pub(crate) fn herm_eig_unchecked(a: &ComplexMatrix) -> HermEigResult {
    let n = a.rows();
    let eig = a.to_na().symmetric_eigen();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| eig.eigenvalues[i].partial_cmp(&eig.eigenvalues[j]).unwrap());
    let eigenvalues: Vec<f64> = order.iter().map(|&i| eig.eigenvalues[i]).collect();
    let eigenvectors = ComplexMatrix::from_fn(n, n, |r, c| eig.eigenvectors[(r, order[c])]);
    HermEigResult {
        eigenvalues,
        eigenvectors,
    }
}

/// Singular value decomposition with descending singular values.
pub fn svd(a: &ComplexMatrix) -> SvdResult {
    let res = a.to_na().svd(true, true);
    let u = res.u.unwrap();
    let v_t = res.v_t.unwrap();
    let k = res.singular_values.len();
    let mut order: Vec<usize> = (0..k).collect();
    order.sort_by(|&i, &j| {
        res.singular_values[j]
            .partial_cmp(&res.singular_values[i])
            .unwrap()
    });
    let singular_values: Vec<f64> = order.iter().map(|&i| res.singular_values[i]).collect();
    let u = ComplexMatrix::from_fn(u.nrows(), k, |r, c| u[(r, order[c])]);
    let v = ComplexMatrix::from_fn(v_t.ncols(), k, |r, c| v_t[(order[c], r)].conj());
    SvdResult {
        u,
        singular_values,
        v,
    }
}

/// `(k, p)`-norm: `(sum_{i<=k} sigma_i^p)^(1/p)`; `p = inf` returns `sigma_1`.
///
/// Specializations: operator norm (`k = 1` or `p = inf`), trace norm
/// (`k = min`, `p = 1`), Frobenius (`k = min`, `p = 2`), Ky Fan (`p = 1`).
pub fn kp_norm(a: &ComplexMatrix, k: usize, p: f64) -> Result<f64> {
    let min_dim = a.rows().min(a.cols());
    check_k(k, min_dim)?;
    check_p(p)?;
    let sigma = svd(a).singular_values;
    Ok(kp_norm_of_sigma(&sigma, k, p))
}

pub fn kp_norm_of_sigma(sigma: &[f64], k: usize, p: f64) -> f64 {
    if p.is_infinite() {
        return sigma.first().copied().unwrap_or(0.0);
    }
    sigma[..k.min(sigma.len())]
        .iter()
        .map(|s| s.powf(p))
        .sum::<f64>()
        .powf(1.0 / p)
}

/// Dual of the `(k, p)`-norm via the water-filling formula.
///
/// Let `r` be the largest index `1 <= r < k` with
/// `sigma_r > sum_{i>r} sigma_i / (k - r)` (`r = 0` if none) and
/// `sigma~ = sum_{i>r} sigma_i / (k - r)`. The dual norm is
/// `(sum_{i<=r} sigma_i^q + (k - r) sigma~^q)^(1/q)` with `1/p + 1/q = 1`,
/// or `max(sigma_1, sigma~)` when `p = 1`.
pub fn kp_dual_norm(a: &ComplexMatrix, k: usize, p: f64) -> Result<f64> {
    let min_dim = a.rows().min(a.cols());
    check_k(k, min_dim)?;
    check_p(p)?;
    let sigma = svd(a).singular_values;
    Ok(kp_dual_norm_of_sigma(&sigma, k, p))
}

pub fn kp_dual_norm_of_sigma(sigma: &[f64], k: usize, p: f64) -> f64 {
    let tail_sum = |r: usize| sigma[r..].iter().sum::<f64>();
    // Linear scan from r = k-1 downward; k is small.
    let mut r = 0usize;
    for cand in (1..k).rev() {
        if sigma[cand - 1] > tail_sum(cand) / (k - cand) as f64 {
            r = cand;
            break;
        }
    }
    let sigma_tilde = tail_sum(r) / (k - r) as f64;
    if p == 1.0 {
        let s1 = sigma.first().copied().unwrap_or(0.0);
        return s1.max(sigma_tilde);
    }
    let q = if p.is_infinite() { 1.0 } else { p / (p - 1.0) };
    let head = sigma[..r].iter().map(|s| s.powf(q)).sum::<f64>();
    (head + (k - r) as f64 * sigma_tilde.powf(q)).powf(1.0 / q)
}

fn check_k(k: usize, max: usize) -> Result<()> {
    if k == 0 || k > max {
        return Err(Error::KOutOfRange { k, max });
    }
    Ok(())
}

fn check_p(p: f64) -> Result<()> {
    if p < 1.0 || p.is_nan() {
        return Err(Error::InvalidParameter(format!("p = {p} must be >= 1")));
    }
    Ok(())
}

/// Eigendecomposition of a normal matrix via simultaneous diagonalization of
/// its Hermitian and anti-Hermitian parts.
///
/// Returns complex eigenvalues with orthonormal eigenvectors (columns).
pub fn normal_eig(a: &ComplexMatrix) -> Result<(Vec<C>, ComplexMatrix)> {
    if !a.is_square() {
        return Err(Error::DimensionMismatch("normal_eig on non-square".into()));
    }
    let comm = a.matmul(&a.dagger()).sub(&a.dagger().matmul(a));
    let scale = a.frobenius_norm();
    let res = comm.frobenius_norm();
    if res > 1e-9 * (1.0 + scale * scale) {
        return Err(Error::NotNormal(res));
    }
    let n = a.rows();
    let h = a.hermitian_part();
    let k = a.sub(&a.dagger()).scale(C::new(0.0, -0.5)); // (A - A^dag)/(2i)
    let eh = herm_eig_unchecked(&h);
    // Diagonalize K inside each (numerically) degenerate eigenspace of H.
    let mut basis = eh.eigenvectors;
    let tol = 1e-8 * (1.0 + scale);
    let mut start = 0;
    let mut eigenvalues = vec![C::new(0.0, 0.0); n];
    while start < n {
        let mut end = start + 1;
        while end < n && (eh.eigenvalues[end] - eh.eigenvalues[start]).abs() <= tol {
            end += 1;
        }
        let d = end - start;
        // Compress K to the block and diagonalize.
        let block_vecs: Vec<Vec<C>> = (start..end)
            .map(|c| (0..n).map(|r| basis[(r, c)]).collect())
            .collect();
        let mut kc = ComplexMatrix::zeros(d, d);
        for (bi, vi) in block_vecs.iter().enumerate() {
            let kv = k.matvec(vi);
            for (bj, vj) in block_vecs.iter().enumerate() {
                kc[(bj, bi)] = vj.iter().zip(&kv).map(|(a, b)| a.conj() * b).sum();
            }
        }
        let ek = herm_eig_unchecked(&kc.hermitian_part());
        for c in 0..d {
            let mut newcol = vec![C::new(0.0, 0.0); n];
            for b in 0..d {
                let w = ek.eigenvectors[(b, c)];
                for r in 0..n {
                    newcol[r] += w * block_vecs[b][r];
                }
            }
            for r in 0..n {
                basis[(r, start + c)] = newcol[r];
            }
            eigenvalues[start + c] = C::new(eh.eigenvalues[start + c], ek.eigenvalues[c]);
        }
        // H eigenvalues inside the block are equal to tolerance; recompute the
        // Rayleigh quotient so eigenvalues stay paired with the new columns.
        for c in start..end {
            let col: Vec<C> = (0..n).map(|r| basis[(r, c)]).collect();
            let hv = h.matvec(&col);
            let re: C = col.iter().zip(&hv).map(|(a, b)| a.conj() * b).sum();
            eigenvalues[c].re = re.re;
        }
        start = end;
    }
    Ok((eigenvalues, basis))
}

/// Largest eigenvalue of a Hermitian matrix by Lanczos iteration with full
/// reorthogonalization. Converges to machine precision in at most
/// (#distinct eigenvalues) steps, which is what makes the 4096-dimensional
/// bound-entanglement projections cheap.
pub fn lambda_max(a: &ComplexMatrix) -> Result<f64> {
    if !a.is_hermitian(1e-8) {
        return Err(Error::NotHermitian {
            residual: a.herm_residual(),
            tol: 1e-8 * (1.0 + a.frobenius_norm()),
        });
    }
    let n = a.rows();
    if n <= 64 {
        return Ok(herm_eig_unchecked(&a.hermitian_part()).max());
    }
    let max_steps = 60.min(n);
    // Deterministic pseudo-random start vector.
    let mut v: Vec<C> = (0..n)
        .map(|i| {
            let x = ((i as f64 + 1.0) * 0.754877666).fract() - 0.5;
            let y = ((i as f64 + 1.0) * 0.569840296).fract() - 0.5;
            C::new(1.0 + x, y)
        })
        .collect();
    normalize(&mut v);
    let mut basis: Vec<Vec<C>> = Vec::new();
    let mut alphas: Vec<f64> = Vec::new();
    let mut betas: Vec<f64> = Vec::new();
    for _ in 0..max_steps {
        let mut w = a.matvec(&v);
        let alpha: C = v.iter().zip(&w).map(|(x, y)| x.conj() * y).sum();
        alphas.push(alpha.re);
        for (i, q) in basis.iter().enumerate() {
            let _ = i;
            let c: C = q.iter().zip(&w).map(|(x, y)| x.conj() * y).sum();
            for (wi, qi) in w.iter_mut().zip(q) {
                *wi -= c * qi;
            }
        }
        let c: C = v.iter().zip(&w).map(|(x, y)| x.conj() * y).sum();
        for (wi, vi) in w.iter_mut().zip(&v) {
            *wi -= c * vi;
        }
        // Second reorthogonalization pass for stability.
        for q in &basis {
            let c: C = q.iter().zip(&w).map(|(x, y)| x.conj() * y).sum();
            for (wi, qi) in w.iter_mut().zip(q) {
                *wi -= c * qi;
            }
        }
        basis.push(v.clone());
        let beta = w.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        if beta < 1e-14 {
            break;
        }
        betas.push(beta);
        for wi in w.iter_mut() {
            *wi /= beta;
        }
        v = w;
    }
    // Eigenvalues of the tridiagonal Lanczos matrix.
    let m = alphas.len();
    let mut t = ComplexMatrix::zeros(m, m);
    for i in 0..m {
        t[(i, i)] = C::new(alphas[i], 0.0);
        if i + 1 < m {
            t[(i, i + 1)] = C::new(betas[i], 0.0);
            t[(i + 1, i)] = C::new(betas[i], 0.0);
        }
    }
    Ok(herm_eig_unchecked(&t).max())
}

fn normalize(v: &mut [C]) {
    let n = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    if n > 0.0 {
        for z in v.iter_mut() {
            *z /= n;
        }
    }
}

/// `lambda_min(X) >= -1e-9 (1 + ||X||)` test used as the crate-wide PSD check.
pub fn is_psd(a: &ComplexMatrix, ) -> Result<bool> {
    let eig = herm_eig(a)?;
    let scale = eig.eigenvalues.iter().fold(0.0f64, |m, &l| m.max(l.abs()));
    Ok(eig.min() >= -1e-9 * (1.0 + scale))
}


#[cfg(test)]
pub(crate) use tests::{brute_max_ratio, random_hermitian, random_matrix, random_unitary};
