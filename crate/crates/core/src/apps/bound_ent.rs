//! Bound-entanglement machinery for the Werner family: the negative-eigenspace
//! projections `P-_{n,r}` of `(rho_{2/n}^Gamma)^(x r)`, their S(1) closed form
//! and S(2) bracket, and the r-copy undistillability certificate.

use num_complex::Complex64;

use crate::densemat::{self, ComplexMatrix};
use crate::error::{Error, Result};
use crate::tensor::{self, MultiDims};

type C = Complex64;

/// Dense construction guard: `n^(2r) <= 4096`.
pub const DENSE_GUARD: usize = 4096;

#[derive(Clone, Debug)]
pub struct BoundEntReport {
    pub n: usize,
    pub r: usize,
    pub rank: u128,
    pub s1_norm: f64,
    pub s2_lower: f64,
    pub s2_upper: f64,
    /// Undistillability threshold for alpha, when the theorem applies.
    pub alpha_threshold: Option<f64>,
    /// Verdict for the requested alpha, when one was requested.
    pub undistillable: Option<bool>,
}

/// Rank of `P-_{n,r}`: `(n^(2r) - (n^2 - 2)^r) / 2`.
pub fn bound_proj_rank(n: usize, r: usize) -> u128 {
    let big = (n as u128).pow(2 * r as u32);
    let small = (n as u128 * n as u128 - 2).pow(r as u32);
    (big - small) / 2
}

/// Dense `P-_{n,r}` via the recursion
/// `P_1 = |psi+><psi+|`,
/// `P_r = (I - P_1) (x) P_{r-1} + P_1 (x) (I - P_{r-1})`,
/// together with its rank.
pub fn bound_proj(n: usize, r: usize) -> Result<(ComplexMatrix, u128)> {
    if r == 0 {
        return Err(Error::InvalidParameter("r must be >= 1".into()));
    }
    let dim = (n as u128).pow(2 * r as u32);
    if dim > DENSE_GUARD as u128 {
        return Err(Error::SizeGuard(format!(
            "n^(2r) = {dim} exceeds the dense guard {DENSE_GUARD}"
        )));
    }
    let p1 = tensor::projector(&tensor::max_entangled(n));
    let mut p = p1.clone();
    let mut prev_dim = n * n;
    for _ in 2..=r {
        let i1 = ComplexMatrix::identity(n * n);
        let iprev = ComplexMatrix::identity(prev_dim);
        let a = tensor::kron(&i1.sub(&p1), &p);
        let b = tensor::kron(&p1, &iprev.sub(&p));
        p = a.add(&b);
        prev_dim *= n * n;
    }
    Ok((p, bound_proj_rank(n, r)))
}

/// Closed form `||P-_{n,r}||_S(1) = 1/2 - (1 - 2/n)^r / 2`.
pub fn bound_proj_s1(n: usize, r: usize) -> f64 {
    0.5 - 0.5 * (1.0 - 2.0 / n as f64).powi(r as i32)
}

/// Closed form plus its dual verification: (i) the product vector
/// `|11> (x) |11...1>` attains the value, (ii) it equals
/// `lambda_max((P-_{n,r})^Gamma)` with the transpose on the second factor of
/// every copy.
pub fn bound_proj_s1_verified(n: usize, r: usize) -> Result<(f64, f64, f64)> {
    let closed = bound_proj_s1(n, r);
    let (p, _) = bound_proj(n, r)?;
    let dim = p.rows();
    // Product vector e_0^(x 2r).
    let mut v = vec![C::new(0.0, 0.0); dim];
    v[0] = C::new(1.0, 0.0);
    let pv = p.matvec(&v);
    let product_value = tensor::inner(&v, &pv).re;
    // lambda_max of the partial transpose on the odd factors.
    let dims = MultiDims(vec![n; 2 * r]);
    let tset: Vec<bool> = (0..2 * r).map(|f| f % 2 == 1).collect();
    let pt = tensor::partial_transpose_multi(&p, &dims, &tset)?;
    let lmax = densemat::lambda_max(&pt)?;
    Ok((closed, product_value, lmax))
}

/// `P-_{n,r}` as a bipartite operator over the Alice|Bob cut: the recursion
/// orders factors (A1, B1, A2, B2, ...), while the S(k) norms act on the
/// `C^(n^r) (x) C^(n^r)` grouping (A1..Ar | B1..Br); this permutes the
/// factors accordingly.
pub fn bound_proj_bipartite(n: usize, r: usize) -> Result<crate::tensor::BipartiteOperator> {
    let (p, _) = bound_proj(n, r)?;
    let dims = MultiDims(vec![n; 2 * r]);
    let mut sigma = vec![0usize; 2 * r];
    for f in 0..2 * r {
        sigma[f] = if f % 2 == 0 { f / 2 } else { r + f / 2 };
    }
    let s = tensor::swap_perm(&dims, &sigma)?;
    let regrouped = s.matmul(&p).matmul(&s.dagger());
    crate::tensor::BipartiteOperator::new(regrouped, n.pow(r as u32), n.pow(r as u32))
}

/// The S(2) bracket (n >= 3):
/// `1/2 - (1/2 - 1/(n-2)) (1 - 2/n)^r <= ||P-||_S(2) <= 1 - (1 - 2/n)^r`.
pub fn bound_proj_s2_bounds(n: usize, r: usize) -> Result<(f64, f64)> {
    if n < 3 {
        return Err(Error::InvalidParameter("S(2) bracket needs n >= 3".into()));
    }
    let decay = (1.0 - 2.0 / n as f64).powi(r as i32);
    let lower = 0.5 - (0.5 - 1.0 / (n as f64 - 2.0)) * decay;
    let upper = 1.0 - decay;
    Ok((lower, upper))
}

/// Undistillability threshold: with `p = (n-2)^r / (n^r - (n-2)^r) >= 1`, the
/// Werner state `rho_alpha` is r-copy undistillable for
/// `alpha <= (p^(1/r) + 1)/n` (odd r) or `alpha <= (p^(1/(r-1)) + 1)/n`
/// (even r). `p < 1` is reported as theorem-inapplicable.
pub fn undistillable_region(n: usize, r: usize) -> Result<f64> {
    let (p, applicable) = theorem_p(n, r)?;
    if !applicable {
        return Err(Error::InvalidParameter(format!(
            "theorem inapplicable: p = {p:.6} < 1 at n = {n}, r = {r}"
        )));
    }
    let root = if r % 2 == 1 { r } else { r - 1 };
    Ok((p.powf(1.0 / root as f64) + 1.0) / n as f64)
}

fn theorem_p(n: usize, r: usize) -> Result<(f64, bool)> {
    if n < 3 || r == 0 {
        return Err(Error::InvalidParameter("need n >= 3, r >= 1".into()));
    }
    let num = ((n - 2) as f64).powi(r as i32);
    let den = (n as f64).powi(r as i32) - num;
    let p = num / den;
    Ok((p, p >= 1.0))
}

/// Margin of the 2-block-positivity certificate for `(rho_alpha^Gamma)^(x r)`,
/// re-derived exactly as in the theorem's proof: the eigenvalues are
/// `(1 - alpha n)^m`, and condition (b) of the spectral test with the S(2)
/// upper bound `q = 1 - (1 - 2/n)^r` requires
/// `lambda_min^+ >= lambda_max^- q/(1 - q)`.
pub fn certify_undistillable(n: usize, r: usize, alpha: f64) -> Result<(bool, f64)> {
    if !(0.0..=1.0).contains(&alpha) {
        return Err(Error::InvalidParameter("alpha outside [0, 1]".into()));
    }
    let base = 1.0 - alpha * n as f64;
    // Eigenvalues of the unnormalized r-fold partial transpose.
    let mut min_pos = f64::INFINITY;
    let mut max_neg_abs: f64 = 0.0;
    for m in 0..=r {
        let ev = base.powi(m as i32);
        if ev > 0.0 {
            min_pos = min_pos.min(ev);
        } else if ev < 0.0 {
            max_neg_abs = max_neg_abs.max(-ev);
        }
    }
    if max_neg_abs == 0.0 {
        // PPT: trivially 2-block positive.
        return Ok((true, min_pos));
    }
    let decay = (1.0 - 2.0 / n as f64).powi(r as i32);
    // q/(1 - q) with q = 1 - decay.
    let ratio = (1.0 - decay) / decay;
    let margin = min_pos - max_neg_abs * ratio;
    Ok((margin >= -1e-12, margin))
}

/// Exact-rational version of [`certify_undistillable`] for `alpha = num/den`:
/// compares `den^e (n-2)^r >= |num n - den|^e (n^r - (n-2)^r)` with
/// `e = 2 ceil(r/2) - 1` in integer arithmetic (requires `alpha >= 2/n` so
/// the proof's eigenvalue structure applies).
pub fn certify_undistillable_rational(
    n: u32,
    r: u32,
    num: i64,
    den: i64,
) -> Result<(bool, i128)> {
    if den <= 0 || num < 0 || num > den {
        return Err(Error::InvalidParameter("alpha = num/den outside [0, 1]".into()));
    }
    let n_i = n as i128;
    let shifted = num as i128 * n_i - den as i128; // alpha n - 1, scaled by den
    if shifted < den as i128 {
        return Err(Error::InvalidParameter(
            "rational certificate needs alpha >= 2/n".into(),
        ));
    }
    let e = 2 * r.div_ceil(2) - 1;
    let lhs = (den as i128)
        .checked_pow(e)
        .and_then(|v| v.checked_mul((n_i - 2).checked_pow(r)?));
    let rhs = shifted
        .checked_pow(e)
        .and_then(|v| v.checked_mul(n_i.checked_pow(r)? - (n_i - 2).checked_pow(r)?));
    match (lhs, rhs) {
        (Some(l), Some(rr)) => Ok((l >= rr, l - rr)),
        _ => Err(Error::InvalidParameter(
            "rational certificate overflow; use the float path".into(),
        )),
    }
}

/// Full report for the `(n, r)` family, optionally with an undistillability
/// verdict at a requested alpha.
pub fn bound_ent_report(n: usize, r: usize, alpha: Option<f64>) -> Result<BoundEntReport> {
    let rank = bound_proj_rank(n, r);
    let s1 = bound_proj_s1(n, r);
    let (s2_lower, s2_upper) = bound_proj_s2_bounds(n, r)?;
    let alpha_threshold = undistillable_region(n, r).ok();
    let undistillable = match alpha {
        Some(a) => Some(certify_undistillable(n, r, a)?.0 && alpha_threshold.is_some()),
        None => None,
    };
    Ok(BoundEntReport {
        n,
        r,
        rank,
        s1_norm: s1,
        s2_lower,
        s2_upper,
        alpha_threshold,
        undistillable,
    })
}
