//! See-saw lower bound for the S(k) norm of a PSD operator: projected power
//! iteration `v <- normalize(truncate_sr(X v, k))` from seeded random
//! restarts. For PSD input the iteration value is monotone nondecreasing, so
//! every iterate certifies a lower bound together with its witness vector.

use num_complex::Complex64;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::densemat::ComplexMatrix;
use crate::error::{Error, Result};
use crate::schmidt;
use crate::tensor::{self, BipartiteOperator};

type C = Complex64;

#[derive(Clone, Copy, Debug)]
pub struct SeesawOptions {
    pub restarts: usize,
    pub max_iters: usize,
    pub value_tol: f64,
    pub seed: u64,
}

impl Default for SeesawOptions {
    fn default() -> Self {
        SeesawOptions {
            restarts: 50,
            max_iters: 1000,
            value_tol: 1e-12,
            seed: 0,
        }
    }
}

fn random_state(rng: &mut ChaCha8Rng, dim: usize) -> Vec<C> {
    let mut v: Vec<C> = (0..dim)
        .map(|_| C::new(rng.gen::<f64>() - 0.5, rng.gen::<f64>() - 0.5))
        .collect();
    tensor::normalize_vec(&mut v);
    v
}

fn run_from(
    x: &ComplexMatrix,
    m: usize,
    n: usize,
    k: usize,
    start: Vec<C>,
    opts: &SeesawOptions,
) -> (f64, Vec<C>) {
    let mut v = match schmidt::truncate_sr(&start, m, n, k) {
        Ok(v) => v,
        Err(_) => return (0.0, start),
    };
    let mut value = quad_form(x, &v);
    for _ in 0..opts.max_iters {
        let xv = x.matvec(&v);
        if tensor::vec_norm(&xv) < 1e-300 {
            break;
        }
        let next = match schmidt::truncate_sr(&xv, m, n, k) {
            Ok(w) => w,
            Err(_) => break,
        };
        let next_value = quad_form(x, &next);
        if next_value <= value + opts.value_tol {
            if next_value > value {
                value = next_value;
                v = next;
            }
            break;
        }
        value = next_value;
        v = next;
    }
    (value, v)
}

pub(crate) fn quad_form(x: &ComplexMatrix, v: &[C]) -> f64 {
    let xv = x.matvec(v);
    tensor::inner(v, &xv).re
}

/// Best see-saw value over restarts, with the witness that attains it.
/// Restart seeds derive from the user seed by counter and the reduction is
/// max with first-index tie-break, so results do not depend on scheduling.
pub fn sk_lower_seesaw(
    x: &BipartiteOperator,
    k: usize,
    opts: &SeesawOptions,
) -> Result<(f64, Vec<C>)> {
    let (m, n) = x.dims;
    if k == 0 || k > m.min(n) {
        return Err(Error::KOutOfRange { k, max: m.min(n) });
    }
    let eig = crate::densemat::herm_eig(&x.mat)?;
    let scale = eig.eigenvalues.iter().fold(0.0f64, |a, &l| a.max(l.abs()));
    if eig.min() < -crate::channels::PSD_TOL * (1.0 + scale) {
        return Err(Error::NotPsd(eig.min()));
    }
    // Deterministic starts: the top eigenvector plus seeded random states.
    let top = eig.eigenvector(eig.eigenvalues.len() - 1);
    let starts: Vec<Vec<C>> = std::iter::once(top)
        .chain((0..opts.restarts).map(|r| {
            let mut rng = ChaCha8Rng::seed_from_u64(opts.seed.wrapping_add(r as u64 + 1));
            random_state(&mut rng, m * n)
        }))
        .collect();
    let results: Vec<(usize, f64, Vec<C>)> = starts
        .into_par_iter()
        .enumerate()
        .map(|(idx, s)| {
            let (val, wit) = run_from(&x.mat, m, n, k, s, opts);
            (idx, val, wit)
        })
        .collect();
    let best = results
        .into_iter()
        .reduce(|a, b| {
            // Max by value; ties keep the smaller start index.
            if b.1 > a.1 || (b.1 == a.1 && b.0 < a.0) {
                b
            } else {
                a
            }
        })
        .unwrap();
    Ok((best.1, best.2))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::channels::werner_state;
    use crate::densemat::random_matrix;
    use crate::tensor::{max_entangled, projector};

    pub(crate) fn rho_ex() -> BipartiteOperator {
        let m = ComplexMatrix::from_real(
            4,
            4,
            &[
                5.0, 1.0, 1.0, 1.0, //
                1.0, 1.0, 1.0, 1.0, //
                1.0, 1.0, 1.0, 1.0, //
                1.0, 1.0, 1.0, 1.0,
            ],
        )
        .scale_re(1.0 / 8.0);
        BipartiteOperator::new(m, 2, 2).unwrap()
    }

    #[test]
    fn identity_gives_one() {
        let x = BipartiteOperator::new(ComplexMatrix::identity(9), 3, 3).unwrap();
        for k in 1..=3 {
            let (v, w) = sk_lower_seesaw(&x, k, &SeesawOptions::default()).unwrap();
            assert!((v - 1.0).abs() < 1e-10);
            assert!((quad_form(&x.mat, &w) - v).abs() < 1e-12);
        }
    }

    #[test]
    fn werner_half() {
        // Exact S(1) norm of the n = 2, alpha = 1/2 Werner state is 1/3.
        let w = werner_state(2, 0.5).unwrap();
        let opts = SeesawOptions {
            restarts: 20,
            ..Default::default()
        };
        let (v, wit) = sk_lower_seesaw(&w, 1, &opts).unwrap();
        assert!((v - 1.0 / 3.0).abs() < 1e-9, "{v}");
        assert_eq!(schmidt::schmidt_rank(&wit, 2, 2, None).unwrap(), 1);
    }

    #[test]
    fn rho_ex_value() {
        // || rho ||_S(1) = (3 + 2 sqrt 2)/8.
        let rho = rho_ex();
        let (v, wit) = sk_lower_seesaw(&rho, 1, &SeesawOptions::default()).unwrap();
        let expect = (3.0 + 2.0 * 2f64.sqrt()) / 8.0;
        assert!((v - expect).abs() < 1e-10, "{v} vs {expect}");
        assert!((quad_form(&rho.mat, &wit) - v).abs() < 1e-10);
    }

    #[test]
    fn max_entangled_projector() {
        let n = 4;
        let rho = BipartiteOperator::new(projector(&max_entangled(n)), n, n).unwrap();
        for k in 1..=n {
            let (v, _) = sk_lower_seesaw(
                &rho,
                k,
                &SeesawOptions {
                    restarts: 10,
                    ..Default::default()
                },
            )
            .unwrap();
            assert!((v - k as f64 / n as f64).abs() < 1e-9);
        }
    }

    #[test]
    fn rejects_non_psd() {
        let s = crate::tensor::swap_operator(2);
        let x = BipartiteOperator::new(s, 2, 2).unwrap();
        assert!(matches!(
            sk_lower_seesaw(&x, 1, &SeesawOptions::default()),
            Err(Error::NotPsd(_))
        ));
    }

    #[test]
    fn deterministic_across_runs() {
        let mut rng = ChaCha8Rng::seed_from_u64(70);
        let g = random_matrix(&mut rng, 9, 9);
        let psd = g.matmul(&g.dagger());
        let x = BipartiteOperator::new(psd, 3, 3).unwrap();
        let opts = SeesawOptions {
            restarts: 8,
            seed: 42,
            ..Default::default()
        };
        let (v1, w1) = sk_lower_seesaw(&x, 2, &opts).unwrap();
        let (v2, w2) = sk_lower_seesaw(&x, 2, &opts).unwrap();
        assert_eq!(v1, v2);
        for (a, b) in w1.iter().zip(&w2) {
            assert_eq!(a, b);
        }
    }
}

#[cfg(test)]
pub(crate) use tests::rho_ex;
