//! Schmidt machinery for bipartite pure states: decompositions, Schmidt rank,
//! the `s(k)` vector norms with their duals, and the operator-Schmidt
//! decomposition.

use num_complex::Complex64;

use crate::densemat::{self, ComplexMatrix};
use crate::error::{Error, Result};
use crate::tensor::{self, BipartiteOperator};

type C = Complex64;

/// Default relative tolerance for Schmidt-rank counting.
pub const SCHMIDT_RANK_TOL: f64 = 1e-10;

/// Schmidt decomposition `v = sum_i alpha_i a_i (x) b_i` of a bipartite
/// vector, with descending coefficients and orthonormal factor sets.
#[derive(Clone, Debug)]
pub struct SchmidtData {
    /// Descending nonnegative Schmidt coefficients.
    pub coefficients: Vec<f64>,
    /// Left factors in `C^m`.
    pub left: Vec<Vec<C>>,
    /// Right factors in `C^n`.
    pub right: Vec<Vec<C>>,
    /// Numerical Schmidt rank at [`SCHMIDT_RANK_TOL`].
    pub rank: usize,
}

impl SchmidtData {
    /// Reassembles `sum_{i < terms} alpha_i a_i (x) b_i`.
    pub fn partial_sum(&self, terms: usize) -> Vec<C> {
        let dim = self.left[0].len() * self.right[0].len();
        let mut out = vec![C::new(0.0, 0.0); dim];
        for t in 0..terms.min(self.coefficients.len()) {
            let prod = tensor::kron_vec(&self.left[t], &self.right[t]);
            for (o, p) in out.iter_mut().zip(&prod) {
                *o += C::new(self.coefficients[t], 0.0) * p;
            }
        }
        out
    }
}

/// Schmidt decomposition via the SVD of `mat(v)`.
///
/// Phase convention: each left vector's first nonzero component is made real
/// and positive (the compensating phase goes on the right vector).
pub fn schmidt_decompose(v: &[C], m: usize, n: usize) -> Result<SchmidtData> {
    let a = tensor::mat_of(v, m, n)?;
    let svd = densemat::svd(&a);
    let k = svd.singular_values.len();
    let mut left = Vec::with_capacity(k);
    let mut right = Vec::with_capacity(k);
    for t in 0..k {
        // mat(v) = sum_t sigma_t x_t y_t^dag with x in C^n, y in C^m;
        // v = sum_t sigma_t conj(y_t) (x) x_t.
        let x: Vec<C> = (0..n).map(|r| svd.u[(r, t)]).collect();
        let y: Vec<C> = (0..m).map(|r| svd.v[(r, t)].conj()).collect();
        let mut a_t = y;
        let mut b_t = x;
        if let Some(first) = a_t.iter().position(|z| z.norm() > 1e-14) {
            let phase = a_t[first] / a_t[first].norm();
            for z in a_t.iter_mut() {
                *z /= phase;
            }
            for z in b_t.iter_mut() {
                *z *= phase;
            }
        }
        left.push(a_t);
        right.push(b_t);
    }
    let rank = densemat::numerical_rank(&svd.singular_values, SCHMIDT_RANK_TOL);
    Ok(SchmidtData {
        coefficients: svd.singular_values,
        left,
        right,
        rank,
    })
}

/// Number of Schmidt coefficients above `tol * alpha_1`.
pub fn schmidt_rank(v: &[C], m: usize, n: usize, tol: Option<f64>) -> Result<usize> {
    let a = tensor::mat_of(v, m, n)?;
    let sigma = densemat::svd(&a).singular_values;
    Ok(densemat::numerical_rank(
        &sigma,
        tol.unwrap_or(SCHMIDT_RANK_TOL),
    ))
}

/// `s(k)` vector norm: the l2 norm of the top-k Schmidt coefficients,
/// `|| v ||_{s(k)} = || mat(v) ||_{(k,2)}`.
pub fn sk_vector_norm(v: &[C], m: usize, n: usize, k: usize) -> Result<f64> {
    check_k(k, m.min(n))?;
    let a = tensor::mat_of(v, m, n)?;
    densemat::kp_norm(&a, k, 2.0)
}

/// Dual of the `s(k)` vector norm (water-filling over Schmidt coefficients),
/// together with the optimizing unit vector `w` attaining
/// `|<w|v>| / ||w||_{s(k)}`.
pub fn sk_vector_dual_norm(v: &[C], m: usize, n: usize, k: usize) -> Result<(f64, Vec<C>)> {
    check_k(k, m.min(n))?;
    let sd = schmidt_decompose(v, m, n)?;
    let alpha = &sd.coefficients;
    let value = densemat::kp_dual_norm_of_sigma(alpha, k, 2.0);
    // Optimizer: c|w> = sum_{i<=r} alpha_i a_i (x) b_i
    //                 + sum_{i>r} alpha~ a_i (x) b_i, normalized.
    let tail_sum = |r: usize| alpha[r..].iter().sum::<f64>();
    let mut r = 0usize;
    for cand in (1..k).rev() {
        if alpha[cand - 1] > tail_sum(cand) / (k - cand) as f64 {
            r = cand;
            break;
        }
    }
    let alpha_tilde = tail_sum(r) / (k - r) as f64;
    let dim = m * n;
    let mut w = vec![C::new(0.0, 0.0); dim];
    for (t, &a_t) in alpha.iter().enumerate() {
        let coeff = if t < r { a_t } else { alpha_tilde };
        if coeff <= 0.0 {
            continue;
        }
        let prod = tensor::kron_vec(&sd.left[t], &sd.right[t]);
        for (o, p) in w.iter_mut().zip(&prod) {
            *o += C::new(coeff, 0.0) * p;
        }
    }
    tensor::normalize_vec(&mut w);
    Ok((value, w))
}

/// Nearest Schmidt-rank-k approximation: keep the top-k Schmidt terms and
/// renormalize. For a unit vector, `<truncate(v)|v> = ||v||_{s(k)}`.
pub fn truncate_sr(v: &[C], m: usize, n: usize, k: usize) -> Result<Vec<C>> {
    check_k(k, m.min(n))?;
    let sd = schmidt_decompose(v, m, n)?;
    let mut w = sd.partial_sum(k);
    tensor::normalize_vec(&mut w);
    Ok(w)
}

/// Operator-Schmidt decomposition `X = sum_i alpha_i A_i (x) B_i` with
/// Hilbert-Schmidt-orthonormal factor sets. The coefficients are exactly the
/// singular values of `realign(X)`.
#[derive(Clone, Debug)]
pub struct OperatorSchmidt {
    pub coefficients: Vec<f64>,
    pub left: Vec<ComplexMatrix>,
    pub right: Vec<ComplexMatrix>,
}

impl OperatorSchmidt {
    pub fn reconstruct(&self, terms: usize) -> ComplexMatrix {
        let m = self.left[0].rows();
        let n = self.right[0].rows();
        let mut acc = ComplexMatrix::zeros(m * n, m * n);
        for t in 0..terms.min(self.coefficients.len()) {
            acc = acc.add(
                &tensor::kron(&self.left[t], &self.right[t]).scale_re(self.coefficients[t]),
            );
        }
        acc
    }
}

pub fn operator_schmidt(x: &BipartiteOperator) -> OperatorSchmidt {
    let (m, n) = x.dims;
    let r = tensor::realign(x);
    let svd = densemat::svd(&r);
    let mut left = Vec::new();
    let mut right = Vec::new();
    for t in 0..svd.singular_values.len() {
        // R(X) = sum_t sigma_t x_t y_t^dag, with row-major flattenings
        // A_t = unflatten(x_t), B_t = unflatten(conj(y_t)).
        let a = ComplexMatrix::from_fn(m, m, |i, j| svd.u[(i * m + j, t)]);
        let b = ComplexMatrix::from_fn(n, n, |i, j| svd.v[(i * n + j, t)].conj());
        left.push(a);
        right.push(b);
    }
    OperatorSchmidt {
        coefficients: svd.singular_values,
        left,
        right,
    }
}

fn check_k(k: usize, max: usize) -> Result<()> {
    if k == 0 || k > max {
        return Err(Error::KOutOfRange { k, max });
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::densemat::kp_norm;
    use crate::tensor::{inner, kron_vec, max_entangled, partial_trace, projector, vec_norm};
    use rand::Rng;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn random_state(rng: &mut ChaCha8Rng, dim: usize) -> Vec<C> {
        let mut v: Vec<C> = (0..dim)
            .map(|_| C::new(rng.gen::<f64>() - 0.5, rng.gen::<f64>() - 0.5))
            .collect();
        tensor::normalize_vec(&mut v);
        v
    }

    #[test]
    fn schmidt_max_entangled() {
        let psi = max_entangled(2);
        let sd = schmidt_decompose(&psi, 2, 2).unwrap();
        for a in &sd.coefficients {
            assert!((a - 1.0 / 2f64.sqrt()).abs() < 1e-12);
        }
        assert_eq!(sd.rank, 2);
    }

    #[test]
    fn schmidt_product_state() {
        let mut rng = ChaCha8Rng::seed_from_u64(31);
        let a = random_state(&mut rng, 3);
        let b = random_state(&mut rng, 4);
        let v = kron_vec(&a, &b);
        let sd = schmidt_decompose(&v, 3, 4).unwrap();
        assert!((sd.coefficients[0] - 1.0).abs() < 1e-12);
        assert!(sd.coefficients[1].abs() < 1e-12);
        assert_eq!(sd.rank, 1);
        assert_eq!(schmidt_rank(&v, 3, 4, None).unwrap(), 1);
    }

    #[test]
    fn schmidt_reconstruction_and_orthonormality() {
        let mut rng = ChaCha8Rng::seed_from_u64(32);
        for _ in 0..10 {
            let v = random_state(&mut rng, 12);
            let sd = schmidt_decompose(&v, 3, 4).unwrap();
            let back = sd.partial_sum(sd.coefficients.len());
            let diff: f64 = v
                .iter()
                .zip(&back)
                .map(|(a, b)| (a - b).norm_sqr())
                .sum::<f64>()
                .sqrt();
            assert!(diff < 1e-9);
            for i in 0..sd.left.len() {
                for j in 0..sd.left.len() {
                    let want = if i == j { 1.0 } else { 0.0 };
                    assert!((inner(&sd.left[i], &sd.left[j]).norm() - want).abs() < 1e-10);
                    assert!((inner(&sd.right[i], &sd.right[j]).norm() - want).abs() < 1e-10);
                }
            }
            // Coefficients are the singular values of mat(v).
            let sigma = densemat::svd(&tensor::mat_of(&v, 3, 4).unwrap()).singular_values;
            for (a, b) in sd.coefficients.iter().zip(&sigma) {
                assert!((a - b).abs() < 1e-12);
            }
            // Phase convention: first nonzero left component real positive.
            for a in &sd.left {
                let first = a.iter().find(|z| z.norm() > 1e-14).unwrap();
                assert!(first.im.abs() < 1e-12 && first.re > 0.0);
            }
        }
    }

    #[test]
    fn schmidt_rank_threshold() {
        // alpha_3 = 1e-15 is below the default tolerance.
        let (a, b, c) = (0.8f64, 0.6, 1e-15);
        let n = 3;
        let mut v = vec![C::new(0.0, 0.0); 9];
        for (i, coeff) in [(0usize, a), (1, b), (2, c)] {
            v[i * n + i] = C::new(coeff, 0.0);
        }
        assert_eq!(schmidt_rank(&v, 3, 3, None).unwrap(), 2);
        assert_eq!(schmidt_rank(&v, 3, 3, Some(1e-16)).unwrap(), 3);
    }

    #[test]
    fn sk_norm_max_entangled() {
        for n in 2..=6 {
            let psi = max_entangled(n);
            for k in 1..=n {
                let norm = sk_vector_norm(&psi, n, n, k).unwrap();
                assert!((norm - (k as f64 / n as f64).sqrt()).abs() < 1e-10);
                let (dual, w) = sk_vector_dual_norm(&psi, n, n, k).unwrap();
                assert!((dual - (n as f64 / k as f64).sqrt()).abs() < 1e-10);
                // w attains the supremum.
                let ratio = inner(&w, &psi).norm() / sk_vector_norm(&w, n, n, k).unwrap();
                assert!((ratio - dual).abs() < 1e-9);
            }
        }
    }

    #[test]
    fn sk_norm_low_rank_state() {
        let mut rng = ChaCha8Rng::seed_from_u64(33);
        // SR(v) <= k implies s(k)-norm = ||v|| and dual = 1.
        let a1 = random_state(&mut rng, 3);
        let b1 = random_state(&mut rng, 3);
        let a2 = random_state(&mut rng, 3);
        let b2 = random_state(&mut rng, 3);
        let mut v: Vec<C> = kron_vec(&a1, &b1);
        for (x, y) in v.iter_mut().zip(kron_vec(&a2, &b2)) {
            *x += y * C::new(0.4, 0.0);
        }
        tensor::normalize_vec(&mut v);
        for k in 2..=3 {
            assert!((sk_vector_norm(&v, 3, 3, k).unwrap() - 1.0).abs() < 1e-10);
            let (dual, _) = sk_vector_dual_norm(&v, 3, 3, k).unwrap();
            assert!((dual - 1.0).abs() < 1e-10);
        }
    }

    #[test]
    fn sk_norm_equals_kp_norm_of_mat() {
        let mut rng = ChaCha8Rng::seed_from_u64(34);
        let v = random_state(&mut rng, 12);
        for k in 1..=3 {
            let lhs = sk_vector_norm(&v, 3, 4, k).unwrap();
            let rhs = kp_norm(&tensor::mat_of(&v, 3, 4).unwrap(), k, 2.0).unwrap();
            assert!((lhs - rhs).abs() < 1e-12);
        }
        // k = min gives the Euclidean norm.
        assert!((sk_vector_norm(&v, 3, 4, 3).unwrap() - vec_norm(&v)).abs() < 1e-12);
    }

    #[test]
    fn sk_norm_chain_and_equivalence() {
        let mut rng = ChaCha8Rng::seed_from_u64(35);
        for _ in 0..20 {
            let v = random_state(&mut rng, 16);
            let mut prev = 0.0;
            for k in 1..=4usize {
                let cur = sk_vector_norm(&v, 4, 4, k).unwrap();
                assert!(cur + 1e-12 >= prev);
                for h in 1..=k {
                    let nh = sk_vector_norm(&v, 4, 4, h).unwrap();
                    assert!(cur <= (k as f64 / h as f64).sqrt() * nh + 1e-12);
                }
                prev = cur;
            }
        }
    }

    #[test]
    fn sk_norm_reduced_state_identity() {
        // ||v||_{s(k)}^2 = || Tr_1 |v><v| ||_{(k)} (Ky Fan k-norm).
        let mut rng = ChaCha8Rng::seed_from_u64(36);
        for _ in 0..10 {
            let v = random_state(&mut rng, 12);
            let rho = BipartiteOperator::new(projector(&v), 3, 4).unwrap();
            let red = partial_trace(&rho, 1).unwrap();
            for k in 1..=3 {
                let lhs = sk_vector_norm(&v, 3, 4, k).unwrap().powi(2);
                let rhs = kp_norm(&red, k, 1.0).unwrap();
                assert!((lhs - rhs).abs() < 1e-10);
            }
        }
    }

    #[test]
    fn dual_at_least_reciprocal() {
        let mut rng = ChaCha8Rng::seed_from_u64(37);
        for _ in 0..20 {
            let v = random_state(&mut rng, 9);
            for k in 1..=3 {
                let norm = sk_vector_norm(&v, 3, 3, k).unwrap();
                let (dual, w) = sk_vector_dual_norm(&v, 3, 3, k).unwrap();
                assert!(dual + 1e-12 >= 1.0 / norm);
                let ratio = inner(&w, &v).norm() / sk_vector_norm(&w, 3, 3, k).unwrap();
                assert!((ratio - dual).abs() < 1e-9);
            }
        }
    }

    #[test]
    fn truncate_overlap_is_norm() {
        let mut rng = ChaCha8Rng::seed_from_u64(38);
        for _ in 0..10 {
            let v = random_state(&mut rng, 12);
            for k in 1..=3 {
                let t = truncate_sr(&v, 3, 4, k).unwrap();
                let overlap = inner(&t, &v).norm();
                let norm = sk_vector_norm(&v, 3, 4, k).unwrap();
                assert!((overlap - norm).abs() < 1e-10);
                assert!(schmidt_rank(&t, 3, 4, None).unwrap() <= k);
            }
        }
        // A low-rank input is its own truncation.
        let a = random_state(&mut rng, 3);
        let b = random_state(&mut rng, 4);
        let v = kron_vec(&a, &b);
        let t = truncate_sr(&v, 3, 4, 2).unwrap();
        let overlap = inner(&t, &v).norm();
        assert!((overlap - 1.0).abs() < 1e-12);
        // Maximally entangled at k = 1: overlap 1/sqrt(n).
        let psi = max_entangled(3);
        let t = truncate_sr(&psi, 3, 3, 1).unwrap();
        assert!((inner(&t, &psi).norm() - 1.0 / 3f64.sqrt()).abs() < 1e-10);
    }

    #[test]
    fn operator_schmidt_single_term() {
        let mut rng = ChaCha8Rng::seed_from_u64(39);
        let mut a = crate::densemat::random_matrix(&mut rng, 2, 2);
        let mut b = crate::densemat::random_matrix(&mut rng, 3, 3);
        a = a.scale_re(1.0 / a.frobenius_norm());
        b = b.scale_re(1.0 / b.frobenius_norm());
        let x = BipartiteOperator::new(tensor::kron(&a, &b), 2, 3).unwrap();
        let os = operator_schmidt(&x);
        assert!((os.coefficients[0] - 1.0).abs() < 1e-10);
        assert!(os.coefficients[1..].iter().all(|&c| c < 1e-10));
    }

    #[test]
    fn operator_schmidt_max_entangled_trace_norm() {
        let n = 3;
        let psi = max_entangled(n);
        let x = BipartiteOperator::new(projector(&psi), n, n).unwrap();
        let os = operator_schmidt(&x);
        // Coefficients sum to the trace norm of R(rho) = n * (1/n) * n = n... the
        // realignment is I/n on an n^2-dim space, so the sum is n^2/n = n.
        let total: f64 = os.coefficients.iter().sum();
        assert!((total - n as f64).abs() < 1e-10);
    }

    #[test]
    fn operator_schmidt_reconstruction() {
        let mut rng = ChaCha8Rng::seed_from_u64(40);
        let h = crate::densemat::random_matrix(&mut rng, 6, 6);
        let x = BipartiteOperator::new(h.clone(), 2, 3).unwrap();
        let os = operator_schmidt(&x);
        let recon = os.reconstruct(os.coefficients.len());
        assert!(recon.sub(&h).frobenius_norm() < 1e-9 * (1.0 + h.frobenius_norm()));
        // Factor orthonormality in the Hilbert-Schmidt inner product.
        for i in 0..os.left.len() {
            for j in 0..os.left.len() {
                let want = if i == j { 1.0 } else { 0.0 };
                assert!((os.left[i].hs_inner(&os.left[j]).norm() - want).abs() < 1e-9);
                assert!((os.right[i].hs_inner(&os.right[j]).norm() - want).abs() < 1e-9);
            }
        }
    }
}
