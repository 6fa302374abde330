//! Dense primal-dual interior-point solver for semidefinite programs over
//! direct sums of Hermitian PSD blocks.
//!
//! Problems are stated in the equality-constrained standard form
//!
//! ```text
//!   min/max  sum_b <C_b, X_b>
//!   s.t.     sum_b <A_{i,b}, X_b> = b_i    (i = 1..p)
//!            X_b >= 0 for every block b,
//! ```
//!
//! which the norm-SDP builders reach from the paper-style
//! `max Tr(AX) s.t. B - Phi(X) in C` form by introducing slack blocks.
//! Complex Hermitian blocks are handled through the real symmetric embedding
//! `H = X + iY  ->  [[X, -Y], [Y, X]]`, one real cone implementation serving
//! all programs. The algorithm is primal-dual path following with the
//! Nesterov-Todd scaling, a Mehrotra predictor-corrector, and a dense Schur
//! complement solved by Cholesky. Iterations are fully deterministic.
//!
//! A problem can be serialized for cross-checking against external solvers
//! via [`SDProblem::to_debug_json`]; the schema is
//! `{"sense", "blocks": [dims], "objective": [{re, im}], "constraints":
//! [{"terms": [{"block", "re", "im"}], "rhs"}]}` with row-major 2-D arrays.

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::Serialize;

use crate::densemat::ComplexMatrix;
use crate::error::{Error, Result};

type C = Complex64;
type RMat = DMatrix<f64>;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Sense {
    Min,
    Max,
}

/// One equality constraint `sum_b <terms[b], X_b> = rhs` (Hermitian
/// coefficient matrices; blocks without a term are omitted).
#[derive(Clone, Debug)]
pub struct Constraint {
    pub terms: Vec<(usize, ComplexMatrix)>,
    pub rhs: f64,
}

/// A semidefinite program over Hermitian PSD blocks.
#[derive(Clone, Debug)]
pub struct SDProblem {
    pub sense: Sense,
    pub block_dims: Vec<usize>,
    pub objective: Vec<ComplexMatrix>,
    pub constraints: Vec<Constraint>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SolveStatus {
    Optimal,
    PrimalInfeasible,
    DualInfeasible,
    MaxIter,
    NumericalFailure,
}

#[derive(Clone, Debug)]
pub struct SDSolution {
    pub primal: Vec<ComplexMatrix>,
    pub dual_y: Vec<f64>,
    pub dual_z: Vec<ComplexMatrix>,
    pub primal_objective: f64,
    pub dual_objective: f64,
    pub rel_gap: f64,
    pub status: SolveStatus,
    pub iterations: usize,
}

#[derive(Clone, Copy, Debug)]
pub struct SdpOptions {
    pub tol: f64,
    pub max_iter: usize,
}

impl Default for SdpOptions {
    fn default() -> Self {
        SdpOptions {
            tol: 1e-8,
            max_iter: 200,
        }
    }
}

impl SDProblem {
    pub fn new(sense: Sense) -> Self {
        SDProblem {
            sense,
            block_dims: Vec::new(),
            objective: Vec::new(),
            constraints: Vec::new(),
        }
    }

    pub fn add_block(&mut self, dim: usize) -> usize {
        self.block_dims.push(dim);
        self.objective.push(ComplexMatrix::zeros(dim, dim));
        self.block_dims.len() - 1
    }

    pub fn set_objective(&mut self, block: usize, c: ComplexMatrix) {
        assert_eq!(c.rows(), self.block_dims[block]);
        self.objective[block] = c;
    }

    pub fn add_constraint(&mut self, terms: Vec<(usize, ComplexMatrix)>, rhs: f64) {
        self.constraints.push(Constraint { terms, rhs });
    }

    fn validate(&self) -> Result<()> {
        if self.constraints.is_empty() {
            return Err(Error::InvalidParameter(
                "SDP needs at least one constraint".into(),
            ));
        }
        for c in &self.objective {
            if !c.is_hermitian(1e-9) {
                return Err(Error::InvalidParameter(
                    "objective matrices must be Hermitian".into(),
                ));
            }
        }
        for con in &self.constraints {
            for (b, a) in &con.terms {
                if *b >= self.block_dims.len() || a.rows() != self.block_dims[*b] || !a.is_square()
                {
                    return Err(Error::DimensionMismatch(
                        "constraint term shape mismatch".into(),
                    ));
                }
                if !a.is_hermitian(1e-9) {
                    return Err(Error::InvalidParameter(
                        "constraint matrices must be Hermitian".into(),
                    ));
                }
            }
        }
        Ok(())
    }

    /// Serializes the problem for cross-checking against external solvers.
    pub fn to_debug_json(&self) -> String {
        #[derive(Serialize)]
        struct MatDump {
            re: Vec<Vec<f64>>,
            im: Vec<Vec<f64>>,
        }
        #[derive(Serialize)]
        struct TermDump {
            block: usize,
            #[serde(flatten)]
            mat: MatDump,
        }
        #[derive(Serialize)]
        struct ConDump {
            terms: Vec<TermDump>,
            rhs: f64,
        }
        #[derive(Serialize)]
        struct Dump<'a> {
            sense: &'a str,
            blocks: &'a [usize],
            objective: Vec<MatDump>,
            constraints: Vec<ConDump>,
        }
        let dump_mat = |m: &ComplexMatrix| MatDump {
            re: (0..m.rows())
                .map(|i| (0..m.cols()).map(|j| m[(i, j)].re).collect())
                .collect(),
            im: (0..m.rows())
                .map(|i| (0..m.cols()).map(|j| m[(i, j)].im).collect())
                .collect(),
        };
        let dump = Dump {
            sense: match self.sense {
                Sense::Min => "min",
                Sense::Max => "max",
            },
            blocks: &self.block_dims,
            objective: self.objective.iter().map(dump_mat).collect(),
            constraints: self
                .constraints
                .iter()
                .map(|c| ConDump {
                    terms: c
                        .terms
                        .iter()
                        .map(|(b, m)| TermDump {
                            block: *b,
                            mat: dump_mat(m),
                        })
                        .collect(),
                    rhs: c.rhs,
                })
                .collect(),
        };
        serde_json::to_string_pretty(&dump).unwrap()
    }
}

/// Orthonormal Hermitian basis of `M_d`: diagonal units, then
/// `(E_ij + E_ji)/sqrt(2)` and `i(E_ij - E_ji)/sqrt(2)` for `i < j`.
pub fn hermitian_basis(d: usize) -> Vec<ComplexMatrix> {
    let mut out = Vec::with_capacity(d * d);
    for i in 0..d {
        let mut m = ComplexMatrix::zeros(d, d);
        m[(i, i)] = C::new(1.0, 0.0);
        out.push(m);
    }
    let s = 1.0 / 2f64.sqrt();
    for i in 0..d {
        for j in i + 1..d {
            let mut m = ComplexMatrix::zeros(d, d);
            m[(i, j)] = C::new(s, 0.0);
            m[(j, i)] = C::new(s, 0.0);
            out.push(m);
            let mut m = ComplexMatrix::zeros(d, d);
            m[(i, j)] = C::new(0.0, s);
            m[(j, i)] = C::new(0.0, -s);
            out.push(m);
        }
    }
    out
}

/// Real symmetric embedding of a Hermitian matrix:
/// `H = X + iY -> [[X, -Y], [Y, X]]`. `H >= 0` iff the embedding is, and each
/// eigenvalue of `H` appears twice.
pub fn real_embed(h: &ComplexMatrix) -> ComplexMatrix {
    let d = h.rows();
    ComplexMatrix::from_fn(2 * d, 2 * d, |i, j| {
        let z = h[(i % d, j % d)];
        let v = match (i >= d, j >= d) {
            (false, false) | (true, true) => z.re,
            (false, true) => -z.im,
            (true, false) => z.im,
        };
        C::new(v, 0.0)
    })
}

/// Inverse of [`real_embed`]: averages the two copies so the result is
/// exactly Hermitian.
pub fn real_unembed(s: &ComplexMatrix) -> ComplexMatrix {
    let d = s.rows() / 2;
    ComplexMatrix::from_fn(d, d, |i, j| {
        let re = 0.5 * (s[(i, j)].re + s[(i + d, j + d)].re);
        let im = 0.5 * (s[(i + d, j)].re - s[(i, j + d)].re);
        C::new(re, im)
    })
}

fn embed_real(h: &ComplexMatrix) -> RMat {
    let d = h.rows();
    RMat::from_fn(2 * d, 2 * d, |i, j| {
        let z = h[(i % d, j % d)];
        match (i >= d, j >= d) {
            (false, false) | (true, true) => z.re,
            (false, true) => -z.im,
            (true, false) => z.im,
        }
    })
}

fn unembed_real(s: &RMat) -> ComplexMatrix {
    let d = s.nrows() / 2;
    ComplexMatrix::from_fn(d, d, |i, j| {
        let re = 0.5 * (s[(i, j)] + s[(i + d, j + d)]);
        let im = 0.5 * (s[(i + d, j)] - s[(i, j + d)]);
        C::new(re, im)
    })
}

fn frob_inner(a: &RMat, b: &RMat) -> f64 {
    a.iter().zip(b.iter()).map(|(x, y)| x * y).sum()
}

/// Cholesky with escalating diagonal jitter, for iterates that graze the
/// cone boundary late in the solve.
fn chol_reg(m: &RMat) -> Option<nalgebra::Cholesky<f64, nalgebra::Dyn>> {
    if let Some(ch) = m.clone().cholesky() {
        return Some(ch);
    }
    let d = m.nrows();
    let scale = (m.trace().abs() / d as f64).max(1e-300);
    for mag in [1e-13, 1e-11, 1e-9] {
        let jitter = RMat::identity(d, d) * (mag * scale);
        if let Some(ch) = (m + &jitter).cholesky() {
            return Some(ch);
        }
    }
    None
}

fn sym(a: &RMat) -> RMat {
    (a + a.transpose()) * 0.5
}

struct Blocks(Vec<RMat>);

impl Blocks {
    fn inner(&self, other: &Blocks) -> f64 {
        self.0
            .iter()
            .zip(&other.0)
            .map(|(a, b)| frob_inner(a, b))
            .sum()
    }

    fn axpy(&mut self, alpha: f64, other: &Blocks) {
        for (a, b) in self.0.iter_mut().zip(&other.0) {
            *a += b * alpha;
        }
    }

    fn norm(&self) -> f64 {
        self.0.iter().map(|m| m.norm_squared()).sum::<f64>().sqrt()
    }
}

/// Solves the SDP. `status == Optimal` guarantees
/// `|primal - dual| / (1 + |primal|) <= tol` and feasibility residuals below
/// `tol`; the dual solution is usable as a certificate.
pub fn solve(problem: &SDProblem, opts: SdpOptions) -> Result<SDSolution> {
    problem.validate()?;
    // Internally: min <C, X>. Max problems flip the objective sign.
    let flip = if problem.sense == Sense::Max { -1.0 } else { 1.0 };
    let nb = problem.block_dims.len();
    let p = problem.constraints.len();
    let c_blocks = Blocks(
        problem
            .objective
            .iter()
            .map(|m| embed_real(m) * flip)
            .collect(),
    );
    // Embedded inner products double: <embed(A), embed(X)> = 2 <A, X>.
    let b_vec: Vec<f64> = problem.constraints.iter().map(|c| 2.0 * c.rhs).collect();
    let mut a_mats: Vec<Vec<Option<RMat>>> = vec![];
    for _ in 0..p {
        a_mats.push(vec![None; nb]);
    }
    for (i, con) in problem.constraints.iter().enumerate() {
        for (b, m) in &con.terms {
            let e = embed_real(m);
            a_mats[i][*b] = Some(match a_mats[i][*b].take() {
                Some(prev) => prev + e,
                None => e,
            });
        }
    }

    let dims: Vec<usize> = problem.block_dims.iter().map(|d| 2 * d).collect();
    let total: usize = dims.iter().sum();
    let bmax = problem
        .constraints
        .iter()
        .map(|c| c.rhs.abs())
        .fold(0.0f64, f64::max);
    let cmax = problem
        .objective
        .iter()
        .map(|m| m.frobenius_norm())
        .fold(0.0f64, f64::max);
    let tau = 1.0 + bmax + cmax;
    let mut x = Blocks(dims.iter().map(|&d| RMat::identity(d, d) * tau).collect());
    let mut z = Blocks(dims.iter().map(|&d| RMat::identity(d, d) * tau).collect());
    let mut y = vec![0.0f64; p];

    let b_norm = b_vec.iter().map(|v| v * v).sum::<f64>().sqrt();
    let c_norm = c_blocks.norm();

    let apply_at = |yv: &[f64], out: &mut Blocks| {
        for m in out.0.iter_mut() {
            m.fill(0.0);
        }
        for (i, row) in a_mats.iter().enumerate() {
            if yv[i] == 0.0 {
                continue;
            }
            for (b, a) in row.iter().enumerate() {
                if let Some(a) = a {
                    out.0[b] += a * yv[i];
                }
            }
        }
    };

    let mut status = SolveStatus::MaxIter;
    let mut iterations = 0;
    let mut res_history: Vec<(f64, f64)> = Vec::new();

    for iter in 0..opts.max_iter {
        iterations = iter;
        // Residuals.
        let mut rp = vec![0.0f64; p];
        for (i, row) in a_mats.iter().enumerate() {
            let mut acc = 0.0;
            for (b, a) in row.iter().enumerate() {
                if let Some(a) = a {
                    acc += frob_inner(a, &x.0[b]);
                }
            }
            rp[i] = b_vec[i] - acc;
        }
        let mut rd = Blocks(c_blocks.0.clone());
        let mut aty = Blocks(dims.iter().map(|&d| RMat::zeros(d, d)).collect());
        apply_at(&y, &mut aty);
        rd.axpy(-1.0, &aty);
        rd.axpy(-1.0, &z);

        let pobj = c_blocks.inner(&x) / 2.0;
        let dobj = b_vec.iter().zip(&y).map(|(b, y)| b * y).sum::<f64>() / 2.0;
        let rel_gap = (pobj - dobj).abs() / (1.0 + pobj.abs());
        let pri_res = rp.iter().map(|v| v * v).sum::<f64>().sqrt() / (1.0 + b_norm);
        let dual_res = rd.norm() / (1.0 + c_norm);
        if rel_gap <= opts.tol && pri_res <= opts.tol && dual_res <= opts.tol {
            status = SolveStatus::Optimal;
            break;
        }
        // Conservative stall-based infeasibility detection; Slater holds for
        // all builder-generated programs so this path is exceptional.
        res_history.push((pri_res.max(dual_res), rel_gap));
        if res_history.len() > 20 {
            let (old_res, old_gap) = res_history[res_history.len() - 21];
            let (cur_res, cur_gap) = *res_history.last().unwrap();
            if cur_res > 10.0 * old_res && (cur_gap - old_gap).abs() < 0.1 * old_gap.abs() {
                status = if pri_res >= dual_res {
                    SolveStatus::PrimalInfeasible
                } else {
                    SolveStatus::DualInfeasible
                };
                break;
            }
        }

        let mu = x.inner(&z) / total as f64;
        if std::env::var("ENTANGLIA_SDP_TRACE").is_ok() {
            eprintln!(
                "iter {iter}: mu {mu:.3e} gap {rel_gap:.3e} pri {pri_res:.3e} dual {dual_res:.3e}"
            );
        }

        // Nesterov-Todd scaling per block: with X = L L^T, Z = R R^T and
        // R^T L = U S V^T we take G = L V S^(-1/2), W = G G^T (W Z W = X) and
        // the scaled point V = G^T Z G = diag(S).
        let mut g: Vec<RMat> = Vec::with_capacity(nb);
        let mut ginv: Vec<RMat> = Vec::with_capacity(nb);
        let mut w: Vec<RMat> = Vec::with_capacity(nb);
        let mut sdiag: Vec<Vec<f64>> = Vec::with_capacity(nb);
        let mut ok = true;
        for b in 0..nb {
            let lx = match chol_reg(&x.0[b]) {
                Some(ch) => ch.l(),
                None => {
                    ok = false;
                    break;
                }
            };
            let lz = match chol_reg(&z.0[b]) {
                Some(ch) => ch.l(),
                None => {
                    ok = false;
                    break;
                }
            };
            let svd = (lz.transpose() * &lx).svd(true, true);
            let u = svd.v_t.as_ref().unwrap().transpose();
            let smax = svd.singular_values.iter().copied().fold(0.0f64, f64::max);
            if smax <= 0.0 {
                ok = false;
                break;
            }
            // Clamp vanishing singular values at the cone boundary.
            let s: Vec<f64> = svd
                .singular_values
                .iter()
                .map(|&v| v.max(1e-14 * smax))
                .collect();
            let d = s.len();
            let s_isqrt = RMat::from_fn(d, d, |i, j| if i == j { 1.0 / s[i].sqrt() } else { 0.0 });
            let s_sqrt = RMat::from_fn(d, d, |i, j| if i == j { s[i].sqrt() } else { 0.0 });
            let gb = &lx * &u * &s_isqrt;
            // G^{-1} = S^{1/2} V^T L^{-1}.
            let lx_inv = match lx.clone().try_inverse() {
                Some(v) => v,
                None => {
                    ok = false;
                    break;
                }
            };
            let gb_inv = &s_sqrt * u.transpose() * &lx_inv;
            w.push(&gb * gb.transpose());
            g.push(gb);
            ginv.push(gb_inv);
            sdiag.push(s.iter().copied().collect::<Vec<f64>>());
        }
        if !ok {
            status = SolveStatus::NumericalFailure;
            break;
        }

        // Schur complement M_ij = sum_b <A_i, W A_j W>.
        let mut wa: Vec<Vec<Option<RMat>>> = vec![];
        for _ in 0..p {
            wa.push(vec![None; nb]);
        }
        for (j, row) in a_mats.iter().enumerate() {
            for (b, a) in row.iter().enumerate() {
                if let Some(a) = a {
                    wa[j][b] = Some(&w[b] * a * &w[b]);
                }
            }
        }
        let mut m = RMat::zeros(p, p);
        for i in 0..p {
            for j in i..p {
                let mut acc = 0.0;
                for b in 0..nb {
                    if let (Some(a), Some(t)) = (&a_mats[i][b], &wa[j][b]) {
                        acc += frob_inner(a, t);
                    }
                }
                m[(i, j)] = acc;
                m[(j, i)] = acc;
            }
        }
        let m_chol = match chol_reg(&m) {
            Some(ch) => ch,
            None => {
                status = SolveStatus::NumericalFailure;
                break;
            }
        };

        let solve_direction = |rc: &Blocks| -> (Vec<f64>, Blocks, Blocks) {
            let mut rhs = nalgebra::DVector::from_vec(rp.clone());
            for i in 0..p {
                let mut acc = 0.0;
                for b in 0..nb {
                    if let Some(a) = &a_mats[i][b] {
                        acc += frob_inner(a, &(&w[b] * &rd.0[b] * &w[b])) - frob_inner(a, &rc.0[b]);
                    }
                }
                rhs[i] += acc;
            }
            let mut dy = m_chol.solve(&rhs);
            // One step of iterative refinement stabilizes the late iterations.
            let resid = &rhs - &m * &dy;
            dy += m_chol.solve(&resid);
            let mut dz = Blocks(rd.0.clone());
            let mut atdy = Blocks(dims.iter().map(|&d| RMat::zeros(d, d)).collect());
            apply_at(dy.as_slice(), &mut atdy);
            dz.axpy(-1.0, &atdy);
            let dx = Blocks(
                (0..nb)
                    .map(|b| sym(&(&rc.0[b] - &(&w[b] * &dz.0[b] * &w[b]))))
                    .collect(),
            );
            (dy.as_slice().to_vec(), dx, dz)
        };

        // Predictor (affine scaling direction).
        let rc_aff = Blocks(x.0.iter().map(|m| -m).collect());
        let (_dy_aff, dx_aff, dz_aff) = solve_direction(&rc_aff);
        let ap_aff = max_step(&x, &dx_aff).min(1.0);
        let ad_aff = max_step(&z, &dz_aff).min(1.0);
        let mut x_try = Blocks(x.0.clone());
        x_try.axpy(ap_aff, &dx_aff);
        let mut z_try = Blocks(z.0.clone());
        z_try.axpy(ad_aff, &dz_aff);
        let mu_aff = x_try.inner(&z_try) / total as f64;
        let sigma = ((mu_aff / mu).powi(3)).clamp(1e-10, 1.0);

        // Mehrotra corrector in the scaled space: with V = diag(S),
        //   Rc' = sigma mu I - V^2 - sym((G^-1 dX G^-T)(G^T dZ G)),
        //   Rc  = G Lyap_V^{-1}(Rc') G^T.
        let mut rc = Vec::with_capacity(nb);
        for b in 0..nb {
            let dxs = &ginv[b] * &dx_aff.0[b] * ginv[b].transpose();
            let dzs = g[b].transpose() * &dz_aff.0[b] * &g[b];
            let h = sym(&(&dxs * &dzs));
            let d = dims[b];
            let mut rcp = RMat::zeros(d, d);
            for i in 0..d {
                for j in 0..d {
                    let mut v = -h[(i, j)];
                    if i == j {
                        v += sigma * mu - sdiag[b][i] * sdiag[b][i];
                    }
                    rcp[(i, j)] = 2.0 * v / (sdiag[b][i] + sdiag[b][j]);
                }
            }
            rc.push(&g[b] * rcp * g[b].transpose());
        }
        let rc = Blocks(rc);
        let (dy, dx, dz) = solve_direction(&rc);
        let step_frac = 0.98;
        let ap = (step_frac * max_step(&x, &dx)).min(1.0);
        let ad = (step_frac * max_step(&z, &dz)).min(1.0);
        if !ap.is_finite() || !ad.is_finite() || ap <= 0.0 || ad <= 0.0 {
            status = SolveStatus::NumericalFailure;
            break;
        }
        x.axpy(ap, &dx);
        for (yi, di) in y.iter_mut().zip(&dy) {
            *yi += ad * di;
        }
        z.axpy(ad, &dz);
    }

    // Unembed the solution: averaging the two copies undoes the doubling.
    let primal: Vec<ComplexMatrix> = x.0.iter().map(unembed_real).collect();
    let dual_z: Vec<ComplexMatrix> = z.0.iter().map(unembed_real).collect();
    let pobj_int = c_blocks.inner(&x) / 2.0;
    let dobj_int = b_vec.iter().zip(&y).map(|(b, y)| b * y).sum::<f64>() / 2.0;
    let (primal_objective, dual_objective, dual_y) = if problem.sense == Sense::Max {
        (-pobj_int, -dobj_int, y.iter().map(|v| -v).collect())
    } else {
        (pobj_int, dobj_int, y)
    };
    let rel_gap = (primal_objective - dual_objective).abs() / (1.0 + primal_objective.abs());
    Ok(SDSolution {
        primal,
        dual_y,
        dual_z,
        primal_objective,
        dual_objective,
        rel_gap,
        status,
        iterations,
    })
}

/// Largest step `alpha` with `X + alpha dX >= 0`, via the minimum eigenvalue
/// of `L^-1 dX L^-T`.
fn max_step(x: &Blocks, dx: &Blocks) -> f64 {
    let mut alpha = f64::INFINITY;
    for (xb, db) in x.0.iter().zip(&dx.0) {
        let ch = match chol_reg(xb) {
            Some(c) => c,
            None => return 0.0,
        };
        let l = ch.l();
        let linv = match l.try_inverse() {
            Some(i) => i,
            None => return 0.0,
        };
        let s = sym(&(&linv * db * linv.transpose()));
        let eig = s.symmetric_eigen();
        let lmin = eig
            .eigenvalues
            .iter()
            .copied()
            .fold(f64::INFINITY, f64::min);
        if lmin < 0.0 {
            alpha = alpha.min(-1.0 / lmin);
        }
    }
    alpha
}


#[cfg(test)]
pub(crate) use tests::{basic_example_optimum, basic_example_problem};
