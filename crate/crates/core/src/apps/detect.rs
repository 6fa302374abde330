//! Schmidt-number detection tests on density matrices: the generalized
//! realignment criterion and the reduction criterion.

use crate::channels::PSD_TOL;
use crate::densemat::{self, ComplexMatrix};
use crate::error::{Error, Result};
use crate::tensor::{self, BipartiteOperator};

/// Detection margin: values must clear the threshold by this much.
pub const DETECT_TOL: f64 = 1e-9;

#[derive(Clone, Debug, PartialEq)]
pub enum DetectionVerdict {
    /// The test certifies Schmidt number > k.
    SchmidtNumberExceedsK,
    /// The test is consistent with Schmidt number <= k (never a proof).
    Inconclusive,
}

fn ensure_state(rho: &BipartiteOperator) -> Result<()> {
    if (rho.mat.trace().re - 1.0).abs() > 1e-8 || rho.mat.trace().im.abs() > 1e-10 {
        return Err(Error::InvalidParameter(
            "density matrix must have unit trace".into(),
        ));
    }
    if !densemat::is_psd(&rho.mat)? {
        return Err(Error::NotPsd(f64::NAN));
    }
    Ok(())
}

/// Generalized realignment test: `SN(rho) <= k` implies
/// `||R(rho)||^o_(k^2,2) <= 1`, so a value above `1 + 1e-9` certifies
/// `SN(rho) > k`. At k = 1 this is the CCNR / realignment criterion.
pub fn realignment_test(rho: &BipartiteOperator, k: usize) -> Result<(f64, DetectionVerdict)> {
    let (m, n) = rho.dims;
    if k == 0 || k > m.min(n) {
        return Err(Error::KOutOfRange { k, max: m.min(n) });
    }
    ensure_state(rho)?;
    let r = tensor::realign(rho);
    let value = densemat::kp_dual_norm(&r, k * k, 2.0)?;
    let verdict = if value > 1.0 + DETECT_TOL {
        DetectionVerdict::SchmidtNumberExceedsK
    } else {
        DetectionVerdict::Inconclusive
    };
    Ok((value, verdict))
}

/// Reduction test: `SN(rho) <= k` implies both
/// `k Tr_2(rho) (x) I >= rho` and `k I (x) Tr_1(rho) >= rho`; a violation
/// certifies `SN(rho) > k`.
pub fn reduction_test(rho: &BipartiteOperator, k: usize) -> Result<DetectionVerdict> {
    let (m, n) = rho.dims;
    if k == 0 || k > m.min(n) {
        return Err(Error::KOutOfRange { k, max: m.min(n) });
    }
    ensure_state(rho)?;
    let tr2 = tensor::partial_trace(rho, 2)?;
    let tr1 = tensor::partial_trace(rho, 1)?;
    let first = tensor::kron(&tr2.scale_re(k as f64), &ComplexMatrix::identity(n)).sub(&rho.mat);
    let second = tensor::kron(&ComplexMatrix::identity(m), &tr1.scale_re(k as f64)).sub(&rho.mat);
    for candidate in [first, second] {
        let eig = densemat::herm_eig(&candidate.hermitian_part())?;
        let scale = eig.eigenvalues.iter().fold(0.0f64, |a, &l| a.max(l.abs()));
        if eig.min() < -PSD_TOL * (1.0 + scale) {
            return Ok(DetectionVerdict::SchmidtNumberExceedsK);
        }
    }
    Ok(DetectionVerdict::Inconclusive)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::tensor::{kron_vec, max_entangled, projector};
    use num_complex::Complex64;
    use rand::Rng;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    type C = Complex64;

    fn random_unit(rng: &mut ChaCha8Rng, dim: usize) -> Vec<C> {
        let mut v: Vec<C> = (0..dim)
            .map(|_| C::new(rng.gen::<f64>() - 0.5, rng.gen::<f64>() - 0.5))
            .collect();
        tensor::normalize_vec(&mut v);
        v
    }

    /// Random mixture of projectors onto Schmidt-rank <= k states in 3x3.
    pub(crate) fn random_low_sn_state(rng: &mut ChaCha8Rng, k: usize, terms: usize) -> BipartiteOperator {
        let n = 3;
        let mut rho = ComplexMatrix::zeros(9, 9);
        let mut weights: Vec<f64> = (0..terms).map(|_| rng.gen::<f64>() + 0.05).collect();
        let total: f64 = weights.iter().sum();
        for w in weights.iter_mut() {
            *w /= total;
        }
        for &w in &weights {
            let mut v = vec![C::new(0.0, 0.0); 9];
            for _ in 0..k {
                let a = random_unit(rng, n);
                let b = random_unit(rng, n);
                let c = C::new(rng.gen::<f64>() - 0.5, rng.gen::<f64>() - 0.5);
                for (x, y) in v.iter_mut().zip(kron_vec(&a, &b)) {
                    *x += c * y;
                }
            }
            tensor::normalize_vec(&mut v);
            rho = rho.add(&projector(&v).scale_re(w));
        }
        BipartiteOperator::new(rho, n, n).unwrap()
    }

    #[test]
    fn max_entangled_detected() {
        for n in 2..=4 {
            let rho = BipartiteOperator::new(
                projector(&max_entangled(n)).hermitian_part(),
                n,
                n,
            )
            .unwrap();
            let (value, verdict) = realignment_test(&rho, 1).unwrap();
            assert!((value - n as f64).abs() < 1e-10, "value {value}");
            assert_eq!(verdict, DetectionVerdict::SchmidtNumberExceedsK);
            assert_eq!(
                reduction_test(&rho, 1).unwrap(),
                DetectionVerdict::SchmidtNumberExceedsK
            );
        }
    }

    #[test]
    fn separable_mixtures_pass() {
        let mut rng = ChaCha8Rng::seed_from_u64(96);
        for _ in 0..20 {
            let rho = random_low_sn_state(&mut rng, 1, 4);
            let (value, verdict) = realignment_test(&rho, 1).unwrap();
            assert!(value <= 1.0 + DETECT_TOL, "value {value}");
            assert_eq!(verdict, DetectionVerdict::Inconclusive);
            assert_eq!(
                reduction_test(&rho, 1).unwrap(),
                DetectionVerdict::Inconclusive
            );
        }
    }

    #[test]
    fn sn2_mixtures_pass_k2() {
        let mut rng = ChaCha8Rng::seed_from_u64(97);
        for _ in 0..20 {
            let rho = random_low_sn_state(&mut rng, 2, 4);
            let (value, verdict) = realignment_test(&rho, 2).unwrap();
            assert!(value <= 1.0 + DETECT_TOL, "value {value}");
            assert_eq!(verdict, DetectionVerdict::Inconclusive);
            assert_eq!(
                reduction_test(&rho, 2).unwrap(),
                DetectionVerdict::Inconclusive
            );
        }
    }

    #[test]
    fn full_k_never_detects() {
        // k = min(m, n): value = ||rho||_F <= 1.
        let mut rng = ChaCha8Rng::seed_from_u64(98);
        let rho = random_low_sn_state(&mut rng, 3, 3);
        let (value, verdict) = realignment_test(&rho, 3).unwrap();
        assert!((value - rho.mat.frobenius_norm()).abs() < 1e-10);
        assert!(value <= 1.0 + DETECT_TOL);
        assert_eq!(verdict, DetectionVerdict::Inconclusive);
        assert_eq!(
            reduction_test(&rho, 3).unwrap(),
            DetectionVerdict::Inconclusive
        );
    }

    #[test]
    fn invalid_states_rejected() {
        let not_normalized =
            BipartiteOperator::new(ComplexMatrix::identity(4), 2, 2).unwrap();
        assert!(realignment_test(&not_normalized, 1).is_err());
        let mut m = ComplexMatrix::identity(4).scale_re(0.5);
        m[(0, 0)] = C::new(-0.5, 0.0);
        m[(1, 1)] = C::new(1.5, 0.0);
        let not_psd = BipartiteOperator::new(m, 2, 2).unwrap();
        assert!(reduction_test(&not_psd, 1).is_err());
    }
}

#[cfg(test)]
pub(crate) use tests::random_low_sn_state;
