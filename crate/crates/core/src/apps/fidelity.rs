//! Minimum gate fidelity through the S(1) norm, and the entanglement-breaking
//! channel family that makes its computation NP-hard.

use num_complex::Complex64;

use crate::channels::{self, Channel};
use crate::densemat::{self, ComplexMatrix};
use crate::error::{Error, Result};
use crate::sknorm::{self, EstimateBudget, NormEstimate};
use crate::tensor::{self, BipartiteOperator};

type C = Complex64;

/// Minimum-gate-fidelity report: with `lambda_max` the top eigenvalue of
/// `P_S C^Gamma P_S`, the fidelity is
/// `F_min = lambda_max - || P_S (lambda_max I - C^Gamma) P_S ||_S(1)`,
/// bracketed by the norm estimate.
#[derive(Clone, Debug)]
pub struct FidelityReport {
    pub lambda_max: f64,
    pub norm_estimate: NormEstimate,
    /// `[lambda_max - upper, lambda_max - lower]`.
    pub f_interval: (f64, f64),
}

impl FidelityReport {
    pub fn width(&self) -> f64 {
        self.f_interval.1 - self.f_interval.0
    }
}

/// Minimum gate fidelity of a TP-CP channel on `M_n`. The partial transpose
/// is applied to the first subsystem, and the sandwiched operator
/// `P_S (lambda_max I - C^Gamma) P_S` (PSD, supported on the symmetric
/// subspace) goes through the S(1) estimator.
pub fn min_gate_fidelity(
    channel: &Channel,
    budget: &EstimateBudget,
) -> Result<FidelityReport> {
    if channel.in_dim != channel.out_dim {
        return Err(Error::DimensionMismatch(
            "gate fidelity needs a channel on M_n".into(),
        ));
    }
    let n = channel.in_dim;
    if !channel.is_cp()? {
        return Err(Error::NotCp(f64::NAN));
    }
    if !channel.is_trace_preserving()? {
        return Err(Error::NotTp(f64::NAN));
    }
    let gamma = tensor::partial_transpose(&channel.choi, 1)?;
    let p_s = tensor::sym_projector(n, 2)?;
    let sandwiched = p_s.matmul(&gamma.mat).matmul(&p_s).hermitian_part();
    let lambda_max = densemat::herm_eig(&sandwiched)?.max();
    let shifted = p_s
        .matmul(
            &ComplexMatrix::identity(n * n)
                .scale_re(lambda_max)
                .sub(&gamma.mat),
        )
        .matmul(&p_s)
        .hermitian_part();
    let op = BipartiteOperator::new(shifted, n, n)?;
    let norm_estimate = sknorm::estimate(&op, 1, budget)?;
    let f_interval = (
        lambda_max - norm_estimate.upper,
        lambda_max - norm_estimate.lower,
    );
    Ok(FidelityReport {
        lambda_max,
        norm_estimate,
        f_interval,
    })
}

/// Brute-force gate-fidelity oracle: minimizes `<v| E(|v><v|) |v>` over a
/// pure-state grid with local descent polishing.
pub fn gate_fidelity_grid_oracle(channel: &Channel, grid: usize) -> Result<f64> {
    let n = channel.in_dim;
    let fidelity = |v: &[C]| -> f64 {
        let rho = tensor::projector(v);
        let image = channel.apply(&rho).unwrap();
        let iv = image.matvec(v);
        tensor::inner(v, &iv).re
    };
    let mut best = f64::INFINITY;
    let mut best_v = vec![C::new(0.0, 0.0); n];
    best_v[0] = C::new(1.0, 0.0);
    if n == 2 {
        // Bloch-sphere grid.
        let steps = (grid as f64).sqrt() as usize;
        for i in 0..=steps {
            let theta = std::f64::consts::PI * i as f64 / steps as f64;
            for j in 0..steps {
                let phi = 2.0 * std::f64::consts::PI * j as f64 / steps as f64;
                let v = vec![
                    C::new((theta / 2.0).cos(), 0.0),
                    C::new(
                        (theta / 2.0).sin() * phi.cos(),
                        (theta / 2.0).sin() * phi.sin(),
                    ),
                ];
                let f = fidelity(&v);
                if f < best {
                    best = f;
                    best_v = v;
                }
            }
        }
    } else {
        use rand::Rng;
        use rand::SeedableRng;
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(1);
        for _ in 0..grid {
            let mut v: Vec<C> = (0..n)
                .map(|_| C::new(rng.gen::<f64>() - 0.5, rng.gen::<f64>() - 0.5))
                .collect();
            tensor::normalize_vec(&mut v);
            let f = fidelity(&v);
            if f < best {
                best = f;
                best_v = v;
            }
        }
    }
    // Local descent polish.
    let mut step = 0.1;
    while step > 1e-9 {
        let mut improved = false;
        for i in 0..n {
            for delta in [C::new(step, 0.0), C::new(0.0, step)] {
                for sign in [1.0, -1.0] {
                    let mut v = best_v.clone();
                    v[i] += delta * C::new(sign, 0.0);
                    tensor::normalize_vec(&mut v);
                    let f = fidelity(&v);
                    if f < best {
                        best = f;
                        best_v = v;
                        improved = true;
                    }
                }
            }
        }
        if !improved {
            step *= 0.5;
        }
    }
    Ok(best)
}

/// The NP-hardness construction: for a symmetric traceless 0-1 matrix A,
/// `E = D - Schur_A / (n^2 (n - 1))` with D the completely depolarizing
/// channel. E is trace-preserving, self-dual, and entanglement-breaking.
pub fn nphard_channel(a: &ComplexMatrix) -> Result<Channel> {
    let n = validate_nphard_matrix(a)?;
    let d = channels::depolarizing(n);
    let s = channels::schur_map(a)?;
    let scale = 1.0 / ((n * n * (n - 1)) as f64);
    let choi = d.choi.mat.sub(&s.choi.mat.scale_re(scale));
    Channel::new(choi, n, n)
}

/// Closed-form minimum gate fidelity of [`nphard_channel`]:
/// `F_min = (1/n) [1 - max_{||x||=1, x real} sum x_i^2 x_j^2 a_ij / (n(n-1))]`,
/// the inner maximum computed by a dense simplex grid with local ascent
/// (n <= 4).
pub fn fidelity_identity(a: &ComplexMatrix) -> Result<f64> {
    let n = validate_nphard_matrix(a)?;
    if n > 4 {
        return Err(Error::SizeGuard(
            "closed-form maximization implemented for n <= 4".into(),
        ));
    }
    // Maximize y^T A y over the probability simplex (y_i = x_i^2).
    let eval = |y: &[f64]| -> f64 {
        let mut acc = 0.0;
        for i in 0..n {
            for j in 0..n {
                acc += y[i] * y[j] * a[(i, j)].re;
            }
        }
        acc
    };
    let mut best = 0.0f64;
    let mut best_y = vec![0.0; n];
    best_y[0] = 1.0;
    let steps = 50usize;
    let mut stack: Vec<(Vec<f64>, usize, usize)> = vec![(Vec::new(), 0, steps)];
    while let Some((prefix, idx, remaining)) = stack.pop() {
        if idx == n - 1 {
            let mut y = prefix.clone();
            y.push(remaining as f64 / steps as f64);
            let v = eval(&y);
            if v > best {
                best = v;
                best_y = y;
            }
            continue;
        }
        for take in 0..=remaining {
            let mut next = prefix.clone();
            next.push(take as f64 / steps as f64);
            stack.push((next, idx + 1, remaining - take));
        }
    }
    // Local ascent with simplex re-projection.
    let mut step = 0.02f64;
    while step > 1e-12 {
        let mut improved = false;
        for i in 0..n {
            for j in 0..n {
                if i == j {
                    continue;
                }
                let mut y = best_y.clone();
                let delta = step.min(y[j]);
                y[i] += delta;
                y[j] -= delta;
                let v = eval(&y);
                if v > best {
                    best = v;
                    best_y = y;
                    improved = true;
                }
            }
        }
        if !improved {
            step *= 0.5;
        }
    }
    let nf = n as f64;
    Ok((1.0 - best / (nf * (nf - 1.0))) / nf)
}

fn validate_nphard_matrix(a: &ComplexMatrix) -> Result<usize> {
    if !a.is_square() {
        return Err(Error::DimensionMismatch("A must be square".into()));
    }
    let n = a.rows();
    for i in 0..n {
        for j in 0..n {
            let z = a[(i, j)];
            if z.im != 0.0 || (z.re != 0.0 && z.re != 1.0) {
                return Err(Error::InvalidParameter("A must be a 0-1 matrix".into()));
            }
            if (a[(i, j)] - a[(j, i)]).norm() != 0.0 {
                return Err(Error::InvalidParameter("A must be symmetric".into()));
            }
        }
        if a[(i, i)].re != 0.0 {
            return Err(Error::InvalidParameter("A must be traceless".into()));
        }
    }
    Ok(n)
}
