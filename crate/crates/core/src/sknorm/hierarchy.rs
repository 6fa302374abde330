//! Symmetric-extension eigenvalue bounds and their error estimates: the
//! compressed `beta_s` computation, Jacobi-polynomial constants `g_s`, and the
//! affine lower bounds they induce on the S(1) and S(k) norms.

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::densemat::{self, ComplexMatrix};
use crate::error::{Error, Result};
use crate::tensor::{self, BipartiteOperator};

type C = Complex64;

/// `beta_s = || P (I^(s-1) (x) X) P ||` with `P = P_sym (x) I`, computed in
/// the occupation-number basis of the symmetric subspace (dimension
/// `C(n+s-1, s) * n`), never densely. Monotone nonincreasing in s and equal
/// to `||X||` at s = 1; the limit is `||X||_S(1)`.
pub fn beta_s(x: &BipartiteOperator, s: usize) -> Result<f64> {
    let compressed = compressed_extension_operator(x, s)?;
    let eig = densemat::herm_eig(&compressed)?;
    Ok(eig.max())
}

/// Builds `(V_s (x) I)^dag (I^(s-1) (x) X) (V_s (x) I)` directly from the
/// occupation combinatorics: with |sym_a> = sum_t sqrt(a_t/s) |sym_{a-e_t}>|t>,
/// the matrix element at ((a, i), (b, j)) is
/// `sum_{t,u: a - e_t = b - e_u} sqrt(a_t b_u)/s * X[(t,i),(u,j)]`.
pub(crate) fn compressed_extension_operator(
    x: &BipartiteOperator,
    s: usize,
) -> Result<ComplexMatrix> {
    let (m, n) = x.dims;
    if m != n {
        return Err(Error::DimensionMismatch(
            "symmetric extension needs M_n (x) M_n".into(),
        ));
    }
    if s == 0 {
        return Err(Error::InvalidParameter("s must be >= 1".into()));
    }
    let occs = tensor::occupations(n, s);
    let d = occs.len();
    let col_of: std::collections::HashMap<Vec<usize>, usize> = occs
        .iter()
        .cloned()
        .enumerate()
        .map(|(c, o)| (o, c))
        .collect();
    let dim = d * n;
    let mut out = ComplexMatrix::zeros(dim, dim);
    for (ai, a) in occs.iter().enumerate() {
        for t in 0..n {
            if a[t] == 0 {
                continue;
            }
            let mut reduced = a.clone();
            reduced[t] -= 1;
            for u in 0..n {
                let mut b = reduced.clone();
                b[u] += 1;
                let bi = col_of[&b];
                let coeff = ((a[t] * b[u]) as f64).sqrt() / s as f64;
                for i in 0..n {
                    for j in 0..n {
                        out[(ai * n + i, bi * n + j)] +=
                            C::new(coeff, 0.0) * x.mat[(t * n + i, u * n + j)];
                    }
                }
            }
        }
    }
    Ok(out)
}

/// `g_s` from the Jacobi-polynomial roots: `min{1 - x : P^(n-2,0)_{s/2+1}(x) = 0}`
/// for even s, `min{1 - x : P^(n-2,1)_{(s+1)/2}(x) = 0}` for odd s. Roots come
/// from the Golub-Welsch symmetric tridiagonal of the Jacobi recurrence.
pub fn jacobi_gs(n: usize, s: usize) -> Result<f64> {
    if n < 2 || s == 0 {
        return Err(Error::InvalidParameter("need n >= 2, s >= 1".into()));
    }
    let alpha = (n - 2) as f64;
    let (beta, deg) = if s % 2 == 0 {
        (0.0, s / 2 + 1)
    } else {
        (1.0, (s + 1) / 2)
    };
    let roots = jacobi_roots(deg, alpha, beta);
    let max_root = roots.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    Ok(1.0 - max_root)
}

/// Roots of the degree-`deg` Jacobi polynomial `P^(alpha,beta)_deg` as the
/// eigenvalues of the symmetric tridiagonal recurrence matrix.
pub fn jacobi_roots(deg: usize, alpha: f64, beta: f64) -> Vec<f64> {
    assert!(deg >= 1);
    let mut t = DMatrix::<f64>::zeros(deg, deg);
    let mut diag = (beta - alpha) / (2.0 + alpha + beta);
    for i in 0..deg {
        t[(i, i)] = diag;
        if i + 1 < deg {
            let k = (i + 1) as f64;
            let denom = 2.0 * k + alpha + beta;
            let off = 2.0 / denom
                * (k * (k + alpha) * (k + beta) * (k + alpha + beta)
                    / ((denom + 1.0) * (denom - 1.0)))
                    .sqrt();
            t[(i, i + 1)] = off;
            t[(i + 1, i)] = off;
            diag = (beta * beta - alpha * alpha) / (denom * (denom + 2.0));
        }
    }
    let mut roots: Vec<f64> = t.symmetric_eigen().eigenvalues.iter().copied().collect();
    roots.sort_by(|a, b| a.partial_cmp(b).unwrap());
    roots
}

/// Which hierarchy value an error bound is attached to.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum BoundKind {
    /// PPT-constrained level value `alpha_s`, combined with `g_s`:
    /// `(1 - n g_s / (2(n-1))) alpha_s + g_s lambda_min / (2(n-1))`.
    AlphaGs,
    /// Plain extension value `beta_s`:
    /// `s/(n+s) beta_s + lambda_min/(n+s)` (k = 1).
    Beta,
    /// k > 1 variant carried by the trace:
    /// `s/(n^2+s) beta_s + Tr(X)/(n^2+s)`.
    BetaK2,
}

/// Affine lower bound on the S(1) (resp. S(k)) norm from the level-s value.
/// `aux` is `lambda_min(X)` for the k = 1 forms and `Tr(X)` for the k > 1
/// form.
pub fn error_lower_bound(n: usize, s: usize, kind: BoundKind, value: f64, aux: f64) -> Result<f64> {
    if n < 2 || s == 0 {
        return Err(Error::InvalidParameter("need n >= 2, s >= 1".into()));
    }
    let nf = n as f64;
    let sf = s as f64;
    Ok(match kind {
        BoundKind::AlphaGs => {
            let g = jacobi_gs(n, s)?;
            (1.0 - nf * g / (2.0 * (nf - 1.0))) * value + g / (2.0 * (nf - 1.0)) * aux
        }
        BoundKind::Beta => sf / (nf + sf) * value + aux / (nf + sf),
        BoundKind::BetaK2 => sf / (nf * nf + sf) * value + aux / (nf * nf + sf),
    })
}


#[cfg(test)]
pub(crate) use tests::BETA_TABLE;
