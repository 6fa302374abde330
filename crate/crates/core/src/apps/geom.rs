//! Geometric measure of entanglement for two to four factors.
//!
//! Bipartite states reduce exactly to the s(1) vector norm; tripartite states
//! reduce to the S(1) norm of a reduced density matrix (certified interval);
//! quadripartite states come with the matricized operator `A_v` and a
//! heuristic product-state see-saw, since `A_v` is generally not PSD and the
//! certified machinery does not apply.

use num_complex::Complex64;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::densemat::ComplexMatrix;
use crate::error::{Error, Result};
use crate::schmidt;
use crate::sknorm::{self, EstimateBudget, NormEstimate};
use crate::tensor::{self, BipartiteOperator, MultiDims};

type C = Complex64;

/// Geometric measure `E(v) = 1 - sup |<w_1 ... w_p | v>|^2` in the form the
/// factor count admits.
#[derive(Clone, Debug)]
pub enum GeomMeasure {
    /// Bipartite: exact, `E = 1 - ||v||_s(1)^2`.
    Exact { e: f64 },
    /// Tripartite: `1 - E = ||Tr_1|v><v|||_S(1)` bracketed by a certified
    /// interval, so `E` lies in `[1 - upper, 1 - lower]`.
    Interval {
        e_low: f64,
        e_high: f64,
        estimate: NormEstimate,
    },
    /// Quadripartite: the operator `A_v` plus a heuristic see-saw value
    /// `overlap2` for `sup |<w_1..w_4|v>|^2`; `E <= 1 - overlap2` is a bound
    /// in one direction only and carries no certificate.
    Heuristic {
        e_estimate: f64,
        overlap2: f64,
        a_v: ComplexMatrix,
    },
}

/// Alternating product-state ascent for `max <w_1..w_p| rho |w_1..w_p>` over
/// unit vectors, for PSD rho on a multipartite space. Heuristic: the value is
/// always attainable, hence a valid lower bound on the true supremum.
pub fn product_seesaw(
    rho: &ComplexMatrix,
    dims: &MultiDims,
    restarts: usize,
    seed: u64,
) -> Result<f64> {
    let p = dims.len();
    let total = dims.total();
    if rho.rows() != total {
        return Err(Error::DimensionMismatch("product_seesaw shape".into()));
    }
    let mut best = f64::NEG_INFINITY;
    for restart in 0..restarts.max(1) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed.wrapping_add(restart as u64));
        let mut factors: Vec<Vec<C>> = dims
            .0
            .iter()
            .map(|&d| {
                let mut v: Vec<C> = (0..d)
                    .map(|_| C::new(rng.gen::<f64>() - 0.5, rng.gen::<f64>() - 0.5))
                    .collect();
                tensor::normalize_vec(&mut v);
                v
            })
            .collect();
        let mut value = f64::NEG_INFINITY;
        for _ in 0..300 {
            for j in 0..p {
                // Compress rho onto factor j with the others fixed.
                let mut m = ComplexMatrix::zeros(dims.0[j], dims.0[j]);
                let mut idx = vec![0usize; p];
                for r in 0..total {
                    let mut rr = r;
                    for f in (0..p).rev() {
                        idx[f] = rr % dims.0[f];
                        rr /= dims.0[f];
                    }
                    let mut wr = C::new(1.0, 0.0);
                    for f in 0..p {
                        if f != j {
                            wr *= factors[f][idx[f]].conj();
                        }
                    }
                    let aj = idx[j];
                    let mut cidx = vec![0usize; p];
                    for c in 0..total {
                        let mut cc = c;
                        for f in (0..p).rev() {
                            cidx[f] = cc % dims.0[f];
                            cc /= dims.0[f];
                        }
                        let mut wc = C::new(1.0, 0.0);
                        for f in 0..p {
                            if f != j {
                                wc *= factors[f][cidx[f]];
                            }
                        }
                        m[(aj, cidx[j])] += wr * rho[(r, c)] * wc;
                    }
                }
                let eig = crate::densemat::herm_eig(&m.hermitian_part())?;
                factors[j] = eig.eigenvector(eig.eigenvalues.len() - 1);
            }
            let prod = factors
                .iter()
                .skip(1)
                .fold(factors[0].clone(), |acc, f| tensor::kron_vec(&acc, f));
            let rv = rho.matvec(&prod);
            let new_value = tensor::inner(&prod, &rv).re;
            if new_value <= value + 1e-13 {
                value = value.max(new_value);
                break;
            }
            value = new_value;
        }
        best = best.max(value);
    }
    Ok(best)
}

/// Geometric measure for 2 <= p <= 4 factors.
pub fn geometric_measure(
    v: &[C],
    dims: &MultiDims,
    budget: &EstimateBudget,
) -> Result<GeomMeasure> {
    if dims.total() != v.len() {
        return Err(Error::DimensionMismatch(format!(
            "vector length {} vs dims total {}",
            v.len(),
            dims.total()
        )));
    }
    match dims.len() {
        2 => {
            let (m, n) = (dims.0[0], dims.0[1]);
            let norm = schmidt::sk_vector_norm(v, m, n, 1)?;
            Ok(GeomMeasure::Exact { e: 1.0 - norm * norm })
        }
        3 => {
            let (n1, n2, n3) = (dims.0[0], dims.0[1], dims.0[2]);
            let rho = BipartiteOperator::new(tensor::projector(v), n1, n2 * n3)?;
            let reduced = tensor::partial_trace(&rho, 1)?;
            let op = BipartiteOperator::new(reduced, n2, n3)?;
            let estimate = sknorm::estimate(&op, 1, budget)?;
            Ok(GeomMeasure::Interval {
                e_low: 1.0 - estimate.upper,
                e_high: 1.0 - estimate.lower,
                estimate,
            })
        }
        4 => {
            let (n1, n2, n3, n4) = (dims.0[0], dims.0[1], dims.0[2], dims.0[3]);
            if n1 != n2 || n3 != n4 {
                return Err(Error::DimensionMismatch(
                    "quadripartite form needs dims (m, m, n, n)".into(),
                ));
            }
            // A_v maps |x1 x2 y1 y2> to |x2><x1| (x) |y2><y1|.
            let (m, n) = (n1, n3);
            let mut a_v = ComplexMatrix::zeros(m * n, m * n);
            for x1 in 0..m {
                for x2 in 0..m {
                    for y1 in 0..n {
                        for y2 in 0..n {
                            let idx = ((x1 * m + x2) * n + y1) * n + y2;
                            a_v[(x2 * n + y2, x1 * n + y1)] += v[idx];
                        }
                    }
                }
            }
            // Heuristic overlap via the product see-saw on Tr_1 |v><v| over
            // the remaining three factors.
            let rho = BipartiteOperator::new(tensor::projector(v), n1, n2 * n3 * n4)?;
            let reduced = tensor::partial_trace(&rho, 1)?;
            let overlap2 = product_seesaw(
                &reduced,
                &MultiDims(vec![n2, n3, n4]),
                budget.seesaw.restarts.min(16).max(4),
                budget.seesaw.seed,
            )?;
            Ok(GeomMeasure::Heuristic {
                e_estimate: 1.0 - overlap2,
                overlap2,
                a_v,
            })
        }
        p => Err(Error::InvalidParameter(format!(
            "geometric measure supports 2..=4 factors, got {p}"
        ))),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::tensor::kron_vec;

    fn ghz() -> Vec<C> {
        let mut v = vec![C::new(0.0, 0.0); 8];
        v[0] = C::new(1.0 / 2f64.sqrt(), 0.0);
        v[7] = C::new(1.0 / 2f64.sqrt(), 0.0);
        v
    }

    #[test]
    fn bipartite_max_entangled() {
        for n in 2..=4 {
            let psi = tensor::max_entangled(n);
            let g = geometric_measure(
                &psi,
                &MultiDims(vec![n, n]),
                &EstimateBudget::cheap(),
            )
            .unwrap();
            match g {
                GeomMeasure::Exact { e } => {
                    assert!((e - (1.0 - 1.0 / n as f64)).abs() < 1e-12)
                }
                _ => panic!("bipartite must be exact"),
            }
        }
    }

    #[test]
    fn product_state_measure_zero() {
        let a = vec![C::new(1.0, 0.0), C::new(0.0, 0.0)];
        let v = kron_vec(&a, &kron_vec(&a, &a));
        let g = geometric_measure(&v, &MultiDims(vec![2, 2, 2]), &EstimateBudget::cheap()).unwrap();
        match g {
            GeomMeasure::Interval { e_low, e_high, .. } => {
                assert!(e_high.abs() < 1e-7, "{e_high}");
                assert!(e_low.abs() < 1e-7);
            }
            _ => panic!("tripartite must be an interval"),
        }
        // Four factors.
        let v4 = kron_vec(&a, &kron_vec(&a, &kron_vec(&a, &a)));
        let g = geometric_measure(&v4, &MultiDims(vec![2, 2, 2, 2]), &EstimateBudget::cheap())
            .unwrap();
        match g {
            GeomMeasure::Heuristic { e_estimate, .. } => {
                assert!(e_estimate.abs() < 1e-9, "{e_estimate}")
            }
            _ => panic!("quadripartite must be heuristic"),
        }
    }

    #[test]
    fn ghz_half() {
        // 1 - E = 1/2 for the GHZ state.
        let g = geometric_measure(&ghz(), &MultiDims(vec![2, 2, 2]), &EstimateBudget::default())
            .unwrap();
        match g {
            GeomMeasure::Interval { e_low, e_high, estimate } => {
                assert!((estimate.lower - 0.5).abs() < 1e-7, "{}", estimate.lower);
                assert!((estimate.upper - 0.5).abs() < 1e-6, "{}", estimate.upper);
                assert!((e_low - 0.5).abs() < 1e-6 && (e_high - 0.5).abs() < 1e-6);
            }
            _ => panic!("tripartite must be an interval"),
        }
    }

    #[test]
    fn quadripartite_ghz() {
        // |GHZ_4>: sup overlap^2 = 1/2 over product states, so E ~ 1/2; the
        // see-saw value is a valid attainable overlap.
        let mut v = vec![C::new(0.0, 0.0); 16];
        v[0] = C::new(1.0 / 2f64.sqrt(), 0.0);
        v[15] = C::new(1.0 / 2f64.sqrt(), 0.0);
        let g = geometric_measure(&v, &MultiDims(vec![2, 2, 2, 2]), &EstimateBudget::cheap())
            .unwrap();
        match g {
            GeomMeasure::Heuristic {
                overlap2,
                a_v,
                e_estimate,
            } => {
                assert!((overlap2 - 0.5).abs() < 1e-8, "{overlap2}");
                assert!((e_estimate - 0.5).abs() < 1e-8);
                // The matricized operator has Frobenius norm ||v|| = 1.
                assert!((a_v.frobenius_norm() - 1.0).abs() < 1e-12);
            }
            _ => panic!("quadripartite must be heuristic"),
        }
    }

    #[test]
    fn unsupported_factor_counts() {
        let v = vec![C::new(1.0, 0.0); 2];
        assert!(geometric_measure(&v, &MultiDims(vec![2]), &EstimateBudget::cheap()).is_err());
        let v5 = vec![C::new(1.0, 0.0); 32];
        assert!(geometric_measure(
            &v5,
            &MultiDims(vec![2, 2, 2, 2, 2]),
            &EstimateBudget::cheap()
        )
        .is_err());
    }
}
