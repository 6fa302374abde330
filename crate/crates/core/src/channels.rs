//! Superoperator calculus through Choi matrices: Kraus and generalized
//! Choi-Kraus decompositions, Stinespring dilations, complementary and dual
//! maps, channel predicates, and the standard map constructors.

use num_complex::Complex64;

use crate::densemat::{self, ComplexMatrix, RANK_TOL};
use crate::error::{Error, Result};
use crate::tensor::{self, BipartiteOperator};

type C = Complex64;

/// PSD test tolerance: `lambda_min >= -PSD_TOL * (1 + ||X||)`.
pub const PSD_TOL: f64 = 1e-9;

/// A superoperator `Phi : M_m -> M_n` held canonically as its Choi matrix
/// `C_Phi = sum_{ij} |i><j| (x) Phi(|i><j|)` with factor dims `(m, n)`.
#[derive(Clone, Debug)]
pub struct Channel {
    pub choi: BipartiteOperator,
    pub in_dim: usize,
    pub out_dim: usize,
}

/// Generalized Choi-Kraus representation
/// `Phi(X) = sum_l c_l A_l X B_l^dag`. For completely positive maps the left
/// and right lists coincide and the weights are the Choi eigenvalues.
#[derive(Clone, Debug)]
pub struct KrausSet {
    pub left: Vec<ComplexMatrix>,
    pub right: Vec<ComplexMatrix>,
    pub weights: Vec<f64>,
}

impl KrausSet {
    /// Evaluates `Phi(X)`.
    pub fn apply(&self, x: &ComplexMatrix) -> ComplexMatrix {
        let n = self.left[0].rows();
        let mut out = ComplexMatrix::zeros(n, n);
        for ((a, b), &c) in self.left.iter().zip(&self.right).zip(&self.weights) {
            out = out.add(&a.matmul(x).matmul(&b.dagger()).scale_re(c));
        }
        out
    }

    pub fn len(&self) -> usize {
        self.weights.len()
    }

    pub fn is_empty(&self) -> bool {
        self.weights.is_empty()
    }
}

/// Stinespring dilation operator `A : C^m -> C^r (x) C^n` built by stacking
/// scaled Kraus operators, so that `Phi = Tr_1 . Ad_A`.
#[derive(Clone, Debug)]
pub struct StinespringForm {
    pub dilation: ComplexMatrix,
    pub env_dim: usize,
    pub out_dim: usize,
}

impl Channel {
    pub fn new(choi: ComplexMatrix, in_dim: usize, out_dim: usize) -> Result<Self> {
        Ok(Channel {
            choi: BipartiteOperator::new(choi, in_dim, out_dim)?,
            in_dim,
            out_dim,
        })
    }

    /// Evaluates `Phi(X)` from the Choi matrix via
    /// `Phi(X) = Tr_1((X^T (x) I) C_Phi)`.
    pub fn apply(&self, x: &ComplexMatrix) -> Result<ComplexMatrix> {
        if x.rows() != self.in_dim || x.cols() != self.in_dim {
            return Err(Error::DimensionMismatch(format!(
                "apply: {}x{} input to channel with in_dim {}",
                x.rows(),
                x.cols(),
                self.in_dim
            )));
        }
        let big = tensor::kron(&x.transpose(), &ComplexMatrix::identity(self.out_dim))
            .matmul(&self.choi.mat);
        tensor::partial_trace(
            &BipartiteOperator::new(big, self.in_dim, self.out_dim)?,
            1,
        )
    }

    pub fn is_trace_preserving(&self) -> Result<bool> {
        let tr2 = tensor::partial_trace(&self.choi, 2)?;
        Ok(tr2.sub(&ComplexMatrix::identity(self.in_dim)).max_abs() <= 1e-9)
    }

    pub fn is_unital(&self) -> Result<bool> {
        let tr1 = tensor::partial_trace(&self.choi, 1)?;
        Ok(tr1.sub(&ComplexMatrix::identity(self.out_dim)).max_abs() <= 1e-9)
    }

    pub fn is_cp(&self) -> Result<bool> {
        if self.choi.mat.herm_residual() > 1e-9 * (1.0 + self.choi.mat.frobenius_norm()) {
            return Ok(false);
        }
        densemat::is_psd(&self.choi.mat)
    }

    pub fn is_hermiticity_preserving(&self) -> bool {
        self.choi.mat.is_hermitian(1e-9)
    }
}

/// Builds the Choi matrix of `Phi(X) = sum_l c_l A_l X B_l^dag`.
pub fn choi_from_kraus(kraus: &KrausSet, m: usize, n: usize) -> Result<Channel> {
    let mut c = ComplexMatrix::zeros(m * n, m * n);
    for ((a, b), &w) in kraus.left.iter().zip(&kraus.right).zip(&kraus.weights) {
        if a.rows() != n || a.cols() != m || b.rows() != n || b.cols() != m {
            return Err(Error::DimensionMismatch(
                "Kraus operators must be n x m".into(),
            ));
        }
        let va = tensor::vec_of(a);
        let vb = tensor::vec_of(b);
        for i in 0..m * n {
            for j in 0..m * n {
                c[(i, j)] += C::new(w, 0.0) * va[i] * vb[j].conj();
            }
        }
    }
    Channel::new(c, m, n)
}

/// Canonical (generalized) Choi-Kraus set from the Choi matrix.
///
/// Hermitian Choi: spectral decomposition, operators ordered by descending
/// eigenvalue with ties broken by the first differing vector component;
/// eigenvalues below `1e-12 * lambda_max` in magnitude are dropped. The
/// resulting operators are mutually orthogonal in the Hilbert-Schmidt inner
/// product. A non-Hermitian Choi falls back to the SVD with distinct
/// left/right operator lists.
pub fn kraus_from_choi(ch: &Channel) -> Result<KrausSet> {
    let (m, n) = (ch.in_dim, ch.out_dim);
    let c = &ch.choi.mat;
    if c.is_hermitian(1e-10) {
        let eig = densemat::herm_eig(c)?;
        let scale = eig
            .eigenvalues
            .iter()
            .fold(0.0f64, |acc, &l| acc.max(l.abs()));
        let mut items: Vec<(f64, Vec<C>)> = eig
            .eigenvalues
            .iter()
            .enumerate()
            .filter(|(_, &l)| l.abs() > RANK_TOL * scale)
            .map(|(i, &l)| (l, eig.eigenvector(i)))
            .collect();
        items.sort_by(|a, b| {
            b.0.partial_cmp(&a.0).unwrap().then_with(|| {
                for (x, y) in a.1.iter().zip(&b.1) {
                    match (x.re, x.im).partial_cmp(&(y.re, y.im)).unwrap() {
                        std::cmp::Ordering::Equal => continue,
                        o => return o,
                    }
                }
                std::cmp::Ordering::Equal
            })
        });
        let mut left = Vec::new();
        let mut weights = Vec::new();
        for (l, v) in items {
            left.push(tensor::mat_of(&v, m, n)?);
            weights.push(l);
        }
        Ok(KrausSet {
            right: left.clone(),
            left,
            weights,
        })
    } else {
        let svd = densemat::svd(c);
        let scale = svd.singular_values.first().copied().unwrap_or(0.0);
        let mut left = Vec::new();
        let mut right = Vec::new();
        let mut weights = Vec::new();
        for (t, &s) in svd.singular_values.iter().enumerate() {
            if s <= RANK_TOL * scale {
                continue;
            }
            let u: Vec<C> = (0..m * n).map(|r| svd.u[(r, t)]).collect();
            let w: Vec<C> = (0..m * n).map(|r| svd.v[(r, t)]).collect();
            left.push(tensor::mat_of(&u, m, n)?);
            right.push(tensor::mat_of(&w, m, n)?);
            weights.push(s);
        }
        Ok(KrausSet {
            left,
            right,
            weights,
        })
    }
}

/// Stinespring dilation of a completely positive map from its canonical
/// Kraus set: `A = sum_l |l> (x) sqrt(lambda_l) A_l`.
pub fn stinespring(ch: &Channel) -> Result<StinespringForm> {
    ensure_cp(ch)?;
    let kraus = kraus_from_choi(ch)?;
    let r = kraus.len().max(1);
    let (m, n) = (ch.in_dim, ch.out_dim);
    let mut a = ComplexMatrix::zeros(r * n, m);
    for (l, (op, &w)) in kraus.left.iter().zip(&kraus.weights).enumerate() {
        let s = w.max(0.0).sqrt();
        for i in 0..n {
            for j in 0..m {
                a[(l * n + i, j)] = C::new(s, 0.0) * op[(i, j)];
            }
        }
    }
    Ok(StinespringForm {
        dilation: a,
        env_dim: r,
        out_dim: n,
    })
}

/// Adjoint map: `C_{Phi^dag} = S conj(C_Phi) S^dag`.
pub fn dual_channel(ch: &Channel) -> Result<Channel> {
    let (m, n) = (ch.in_dim, ch.out_dim);
    let s = tensor::swap_rect(m, n);
    let c = s.matmul(&ch.choi.mat.conj()).matmul(&s.dagger());
    Channel::new(c, n, m)
}

/// Complementary map `Phi^C = Tr_2 . Ad_A` built from the Stinespring form of
/// the canonical Kraus set. Defined up to unitary freedom on the environment;
/// this fixes the canonical Kraus ordering.
pub fn complementary_channel(ch: &Channel) -> Result<Channel> {
    ensure_cp(ch)?;
    let kraus = kraus_from_choi(ch)?;
    let m = ch.in_dim;
    let r = kraus.len().max(1);
    // Phi^C(|i><j|)[k,l] = sqrt(w_k w_l) (A_l^dag A_k)[j, i].
    let mut choi = ComplexMatrix::zeros(m * r, m * r);
    for k in 0..kraus.len() {
        for l in 0..kraus.len() {
            let prod = kraus.left[l].dagger().matmul(&kraus.left[k]);
            let s = (kraus.weights[k] * kraus.weights[l]).sqrt();
            for i in 0..m {
                for j in 0..m {
                    choi[(i * r + k, j * r + l)] = C::new(s, 0.0) * prod[(j, i)];
                }
            }
        }
    }
    Channel::new(choi, m, r)
}

fn ensure_cp(ch: &Channel) -> Result<()> {
    let eig = densemat::herm_eig(&ch.choi.mat)?;
    let scale = eig
        .eigenvalues
        .iter()
        .fold(0.0f64, |acc, &l| acc.max(l.abs()));
    if eig.min() < -PSD_TOL * (1.0 + scale) {
        return Err(Error::NotCp(eig.min()));
    }
    Ok(())
}

/// Transpose map on `M_n`; its Choi matrix is the swap operator.
pub fn transpose_map(n: usize) -> Channel {
    Channel::new(tensor::swap_operator(n), n, n).unwrap()
}

/// Completely depolarizing channel `X -> Tr(X) I / n`; Choi `= I (x) I / n`.
pub fn depolarizing(n: usize) -> Channel {
    Channel::new(
        ComplexMatrix::identity(n * n).scale_re(1.0 / n as f64),
        n,
        n,
    )
    .unwrap()
}

/// The map `Phi(X) = k Tr(X) I - X`, k-positive but not (k+1)-positive.
/// Choi matrix: `k I (x) I - n |psi+><psi+|`.
pub fn reduction_k_map(n: usize, k: usize) -> Result<Channel> {
    if k == 0 || k > n {
        return Err(Error::KOutOfRange { k, max: n });
    }
    let psi = tensor::max_entangled(n);
    let c = ComplexMatrix::identity(n * n)
        .scale_re(k as f64)
        .sub(&tensor::projector(&psi).scale_re(n as f64));
    Channel::new(c, n, n)
}

/// Schur (entrywise) multiplication map `X -> A * X`.
pub fn schur_map(a: &ComplexMatrix) -> Result<Channel> {
    if !a.is_square() {
        return Err(Error::DimensionMismatch("schur_map needs square A".into()));
    }
    let n = a.rows();
    let mut c = ComplexMatrix::zeros(n * n, n * n);
    for i in 0..n {
        for j in 0..n {
            c[(i * n + i, j * n + j)] = a[(i, j)];
        }
    }
    Channel::new(c, n, n)
}

/// Werner state `rho_alpha = (I - alpha S) / (n^2 - alpha n)`.
pub fn werner_state(n: usize, alpha: f64) -> Result<BipartiteOperator> {
    if !(-1.0..=1.0).contains(&alpha) {
        return Err(Error::InvalidParameter(format!(
            "werner alpha = {alpha} outside [-1, 1]"
        )));
    }
    let denom = (n * n) as f64 - alpha * n as f64;
    let mat = ComplexMatrix::identity(n * n)
        .sub(&tensor::swap_operator(n).scale_re(alpha))
        .scale_re(1.0 / denom);
    BipartiteOperator::new(mat, n, n)
}


#[cfg(test)]
pub(crate) use tests::random_tp_channel;
