//! Semidefinite-programming upper bounds for the S(k) norms: the k-positive
//! map program and the symmetric-extension (DPS) hierarchy.

use num_complex::Complex64;

use crate::channels::{dual_channel, Channel};
use crate::conic::{hermitian_basis, solve, SDProblem, SdpOptions, Sense, SolveStatus};
use crate::densemat::ComplexMatrix;
use crate::error::{Error, Result};
use crate::tensor::{self, BipartiteOperator, MultiDims};

type C = Complex64;

/// Which k-positive map backs the upper-bound SDP.
#[derive(Clone, Debug)]
pub enum MapChoice {
    /// Transpose map (1-positive): valid for k = 1; exact on 2x2 and 2x3.
    Transpose,
    /// `Phi(X) = k Tr(X) I - X`, k-positive: valid for the given k.
    Reduction,
    /// A user-supplied k-positive map given by its Choi matrix.
    UserChoi(Channel),
}

fn check_status(status: SolveStatus) -> Result<()> {
    match status {
        SolveStatus::Optimal => Ok(()),
        other => Err(Error::Solver(format!("SDP did not reach Optimal: {other:?}"))),
    }
}

/// Applies `id_m (x) Phi` blockwise to an operator on `C^m (x) C^(n_in)`.
fn apply_id_otimes(phi: &Channel, x: &ComplexMatrix, m: usize) -> Result<ComplexMatrix> {
    let n_in = phi.in_dim;
    let n_out = phi.out_dim;
    let mut out = ComplexMatrix::zeros(m * n_out, m * n_out);
    for bi in 0..m {
        for bj in 0..m {
            let block =
                ComplexMatrix::from_fn(n_in, n_in, |r, c| x[(bi * n_in + r, bj * n_in + c)]);
            let img = phi.apply(&block)?;
            for r in 0..n_out {
                for c in 0..n_out {
                    out[(bi * n_out + r, bj * n_out + c)] = img[(r, c)];
                }
            }
        }
    }
    Ok(out)
}

/// The k-positive map SDP:
///
/// ```text
///   max Tr(X rho)   s.t.  (id_m (x) Phi)(rho) >= 0, Tr(rho) <= 1, rho >= 0
/// ```
///
/// whose dual is `min lambda  s.t.  lambda I >= (id (x) Phi^dag)(Y) + X,
/// Y >= 0`. The optimal value upper-bounds `||X||_S(k)` (and equals it on
/// 2x2/2x3 with the transpose map at k = 1). Returns `(value, Y)` with the
/// k-block-positive certificate reassembled from the dual multipliers.
pub fn sk_upper_kpos_sdp(
    x: &BipartiteOperator,
    k: usize,
    map_choice: &MapChoice,
    opts: SdpOptions,
) -> Result<(f64, ComplexMatrix)> {
    let (m, n) = x.dims;
    if k == 0 || k > m.min(n) {
        return Err(Error::KOutOfRange { k, max: m.min(n) });
    }
    let phi = match map_choice {
        MapChoice::Transpose => {
            if k != 1 {
                return Err(Error::InvalidParameter(
                    "transpose map is only 1-positive; use it with k = 1".into(),
                ));
            }
            crate::channels::transpose_map(n)
        }
        MapChoice::Reduction => crate::channels::reduction_k_map(n, k)?,
        MapChoice::UserChoi(ch) => ch.clone(),
    };
    if phi.in_dim != n {
        return Err(Error::DimensionMismatch(
            "map input dim must match the second factor".into(),
        ));
    }
    let phi_dag = dual_channel(&phi)?;
    let n_out = phi.out_dim;

    let mut prob = SDProblem::new(Sense::Max);
    let rho = prob.add_block(m * n);
    let sigma = prob.add_block(m * n_out);
    let t = prob.add_block(1);
    prob.set_objective(rho, x.mat.hermitian_part());
    // sigma = (id (x) Phi)(rho), expanded over a Hermitian basis of sigma.
    for h in hermitian_basis(m * n_out) {
        let coeff = apply_id_otimes(&phi_dag, &h, m)?.scale_re(-1.0);
        prob.add_constraint(vec![(sigma, h), (rho, coeff.hermitian_part())], 0.0);
    }
    // Tr(rho) + t = 1.
    prob.add_constraint(
        vec![
            (rho, ComplexMatrix::identity(m * n)),
            (t, ComplexMatrix::identity(1)),
        ],
        1.0,
    );
    let sol = solve(&prob, opts)?;
    check_status(sol.status)?;
    // Dual: the multiplier of the trace constraint is lambda; the sigma-basis
    // multipliers reassemble Y >= 0 with lambda I >= (id (x) Phi^dag)(Y) + X.
    let basis = hermitian_basis(m * n_out);
    let mut y = ComplexMatrix::zeros(m * n_out, m * n_out);
    for (kappa, h) in basis.iter().enumerate() {
        y = y.add(&h.scale_re(sol.dual_y[kappa]));
    }
    Ok((sol.dual_objective, y))
}

/// DPS guard: the embedded extension block `2 n^(s+1)` must stay within the
/// dense-solver comfort zone (about 200), giving s <= 5 at n = 2 and s <= 3
/// at n = 3.
pub const DPS_EMBEDDED_LIMIT: usize = 200;

/// Factor set transposed by the hierarchy's single PPT cut: the ancilla
/// factor together with the last floor(s/2) symmetric copies, i.e. the
/// ceil(s/2) : floor(s/2) cut. At s = 1 this is the plain PPT constraint.
fn ppt_factors(s: usize) -> Vec<bool> {
    let mut t = vec![false; s + 1];
    for f in (s - s / 2)..s {
        t[f] = true;
    }
    t[s] = true;
    t
}

/// Level-s DPS upper bound for `||X||_S(1)` of a PSD operator on
/// `M_n (x) M_n`, solved in its witness form:
///
/// ```text
///   alpha_s = min_lambda { lambda : lambda P >= P((I^(s-1) (x) X) + W^Gamma)P,
///                          W >= 0 }
/// ```
///
/// compressed onto the symmetric subspace through the occupation-number
/// isometry. Returns `(alpha_s, W)`. Without the PPT cut the value collapses
/// to the eigenvalue computation `beta_s` and `W = 0`.
pub fn dps_sdp_s1(
    x: &BipartiteOperator,
    s: usize,
    with_ppt: bool,
    opts: SdpOptions,
) -> Result<(f64, ComplexMatrix)> {
    let (m, n) = x.dims;
    if m != n {
        return Err(Error::DimensionMismatch(
            "DPS hierarchy needs M_n (x) M_n".into(),
        ));
    }
    if s == 0 {
        return Err(Error::InvalidParameter("s must be >= 1".into()));
    }
    if !crate::densemat::is_psd(&x.mat)? {
        return Err(Error::NotPsd(f64::NAN));
    }
    let big = n.checked_pow(s as u32 + 1).ok_or_else(|| {
        Error::SizeGuard(format!("n^(s+1) overflows at n = {n}, s = {s}"))
    })?;
    if !with_ppt {
        // Pure symmetric-extension bound: beta_s as an eigenvalue problem.
        let value = super::hierarchy::beta_s(x, s)?;
        return Ok((value, ComplexMatrix::zeros(big, big)));
    }
    if 2 * big > DPS_EMBEDDED_LIMIT {
        return Err(Error::SizeGuard(format!(
            "DPS level s = {s} at n = {n} needs an embedded block of {} > {}",
            2 * big,
            DPS_EMBEDDED_LIMIT
        )));
    }
    let v_sym = tensor::sym_isometry(n, s)?;
    let v = tensor::kron(&v_sym, &ComplexMatrix::identity(n));
    let d1 = v.cols();
    // M = I^(s-1) (x) X on the s+1 factors.
    let m_op = tensor::kron(
        &ComplexMatrix::identity(big / (n * n)),
        &x.mat.hermitian_part(),
    );
    let vmv = v.dagger().matmul(&m_op).matmul(&v);
    let dims = MultiDims(vec![n; s + 1]);
    let tset = ppt_factors(s);

    let mut prob = SDProblem::new(Sense::Min);
    let lam = prob.add_block(1);
    let w = prob.add_block(big);
    let slack = prob.add_block(d1);
    prob.set_objective(lam, ComplexMatrix::identity(1));
    // slack = lambda I - V^dag (M + W^Gamma) V, expanded over a Hermitian
    // basis of the slack block. The coefficient of W against probe H is
    // (V H V^dag)^Gamma.
    for h in hermitian_basis(d1) {
        let lam_coeff = ComplexMatrix::from_fn(1, 1, |_, _| -h.trace());
        let vhv = v.matmul(&h).matmul(&v.dagger());
        let w_coeff = tensor::partial_transpose_multi(&vhv, &dims, &tset)?;
        let rhs = -h.hs_inner(&vmv).re;
        prob.add_constraint(
            vec![
                (slack, h),
                (lam, lam_coeff),
                (w, w_coeff.hermitian_part()),
            ],
            rhs,
        );
    }
    let sol = solve(&prob, opts)?;
    check_status(sol.status)?;
    Ok((sol.primal_objective, sol.primal[w].clone()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::channels::werner_state;
    use crate::densemat::{herm_eig, lambda_max};
    use crate::sknorm::seesaw::rho_ex;
    use crate::tensor::{max_entangled, partial_transpose, projector};

    fn default_opts() -> SdpOptions {
        SdpOptions::default()
    }

    #[test]
    fn werner_table_transpose_map() {
        // Table of exact S(1) Werner norms reproduced by the transpose-map
        // SDP: (n, alpha) -> value.
        let cases = [
            (2usize, 0.5f64, 1.0 / 3.0),
            (2, -0.5, 0.3),
            (3, 0.5, 2.0 / 15.0),
            (3, -0.5, 1.0 / 7.0),
        ];
        for (n, alpha, expect) in cases {
            let w = werner_state(n, alpha).unwrap();
            let (val, y) = sk_upper_kpos_sdp(&w, 1, &MapChoice::Transpose, default_opts()).unwrap();
            assert!((val - expect).abs() < 1e-6, "n={n} alpha={alpha}: {val}");
            // Certificate: Y >= 0 and lambda I >= (id (x) Phi^dag)(Y) + X.
            let eig = herm_eig(&y.hermitian_part()).unwrap();
            assert!(eig.min() > -1e-6);
            let phi_dag = dual_channel(&crate::channels::transpose_map(n)).unwrap();
            let lifted = apply_id_otimes(&phi_dag, &y.hermitian_part(), n).unwrap();
            let gap = ComplexMatrix::identity(n * n)
                .scale_re(val)
                .sub(&lifted)
                .sub(&w.mat);
            assert!(herm_eig(&gap.hermitian_part()).unwrap().min() > -1e-6);
        }
    }

    #[test]
    fn werner_table_reduction_map() {
        let cases = [
            (2usize, 0.5f64, 1.0 / 3.0),
            (2, -0.5, 0.3),
            (3, 0.5, 0.2),
            (3, -0.5, 1.0 / 7.0),
        ];
        for (n, alpha, expect) in cases {
            let w = werner_state(n, alpha).unwrap();
            let (val, _) = sk_upper_kpos_sdp(&w, 1, &MapChoice::Reduction, default_opts()).unwrap();
            assert!((val - expect).abs() < 1e-6, "n={n} alpha={alpha}: {val}");
        }
    }

    #[test]
    fn identity_norm_is_one() {
        let x = BipartiteOperator::new(ComplexMatrix::identity(9), 3, 3).unwrap();
        for (k, map) in [(1usize, MapChoice::Transpose), (2, MapChoice::Reduction)] {
            let (val, _) = sk_upper_kpos_sdp(&x, k, &map, default_opts()).unwrap();
            assert!((val - 1.0).abs() < 1e-7, "{val}");
        }
    }

    #[test]
    fn transpose_rejected_for_k2() {
        let x = BipartiteOperator::new(ComplexMatrix::identity(9), 3, 3).unwrap();
        assert!(sk_upper_kpos_sdp(&x, 2, &MapChoice::Transpose, default_opts()).is_err());
    }

    #[test]
    fn dps_s1_ppt_on_rho_ex() {
        let rho = rho_ex();
        let (val, w) = dps_sdp_s1(&rho, 1, true, default_opts()).unwrap();
        let expect = (3.0 + 2.0 * 2f64.sqrt()) / 8.0;
        assert!((val - expect).abs() < 1e-7, "{val} vs {expect}");
        // The witness certifies || rho + W^Gamma || >= value (upper bound).
        let eig = herm_eig(&w.hermitian_part()).unwrap();
        assert!(eig.min() > -1e-7, "W must be PSD, got {}", eig.min());
        let wg = partial_transpose(
            &BipartiteOperator::new(w.hermitian_part(), 2, 2).unwrap(),
            2,
        )
        .unwrap();
        let cert = lambda_max(&rho.mat.add(&wg.mat).hermitian_part()).unwrap();
        assert!((cert - expect).abs() < 1e-6, "certificate {cert}");
    }

    #[test]
    fn dps_no_ppt_is_operator_norm_at_s1() {
        let rho = rho_ex();
        let (val, _) = dps_sdp_s1(&rho, 1, false, default_opts()).unwrap();
        assert!((val - 0.75).abs() < 1e-12, "{val}");
    }

    #[test]
    fn dps_matches_transpose_sdp_in_2x2() {
        // 2x2 PPT is exact, so DPS s=1 with PPT equals the transpose-map SDP.
        let w = werner_state(2, 0.5).unwrap();
        let (a, _) = dps_sdp_s1(&w, 1, true, default_opts()).unwrap();
        assert!((a - 1.0 / 3.0).abs() < 1e-6, "{a}");
    }

    #[test]
    fn dps_size_guard() {
        let x = BipartiteOperator::new(projector(&max_entangled(3)), 3, 3).unwrap();
        assert!(matches!(
            dps_sdp_s1(&x, 4, true, default_opts()),
            Err(Error::SizeGuard(_))
        ));
    }

    #[test]
    fn dps_hierarchy_monotone_and_ppt_tighter() {
        let rho = rho_ex();
        let mut prev = f64::INFINITY;
        for s in 1..=3 {
            let (with, _) = dps_sdp_s1(&rho, s, true, default_opts()).unwrap();
            let (without, _) = dps_sdp_s1(&rho, s, false, default_opts()).unwrap();
            assert!(with <= without + 1e-8, "ppt must tighten: {with} {without}");
            assert!(with <= prev + 1e-8, "hierarchy must be monotone");
            prev = with;
        }
    }
}
