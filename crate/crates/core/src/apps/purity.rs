//! Maximum output purity: the 1->inf induced norms of a completely positive
//! map equal the S(k) norms of its Choi matrix; the completely bounded case
//! reduces to `||C_Phi|| = ||Phi^C(I)||`.

use crate::channels::{complementary_channel, Channel};
use crate::densemat::{self, ComplexMatrix};
use crate::error::{Error, Result};
use crate::sknorm::{self, EstimateBudget, NormEstimate};

/// `||Phi||'_{k,1->inf} = ||C_Phi||_S(k)`, estimated through the norm engine.
pub fn max_output_purity(
    channel: &Channel,
    k: usize,
    budget: &EstimateBudget,
) -> Result<NormEstimate> {
    ensure_cp(channel)?;
    sknorm::estimate(&channel.choi, k, budget)
}

/// The completely bounded case: `||C_Phi||`, cross-checked against
/// `||Phi^C(I)||`. Returns `(choi_norm, complementary_norm)`.
pub fn cb_output_purity(channel: &Channel) -> Result<(f64, f64)> {
    ensure_cp(channel)?;
    let choi_norm = densemat::herm_eig(&channel.choi.mat)?.max();
    let comp = complementary_channel(channel)?;
    let ci = comp.apply(&ComplexMatrix::identity(channel.in_dim))?;
    let comp_norm = densemat::herm_eig(&ci.hermitian_part())?.max();
    Ok((choi_norm, comp_norm))
}

fn ensure_cp(channel: &Channel) -> Result<()> {
    if !channel.is_cp()? {
        return Err(Error::NotCp(f64::NAN));
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::channels::{depolarizing, random_tp_channel, transpose_map};
    use crate::tensor::{max_entangled, projector};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn depolarizing_purity() {
        // All outputs are I/n: max output purity 1/n at k = 1.
        let n = 3;
        let d = depolarizing(n);
        let est = max_output_purity(&d, 1, &EstimateBudget::cheap()).unwrap();
        assert!((est.lower - 1.0 / n as f64).abs() < 1e-7);
        assert!((est.upper - 1.0 / n as f64).abs() < 1e-7);
    }

    #[test]
    fn identity_channel_purity_is_k() {
        // C_id = n |psi+><psi+| with S(k) norm n * k/n = k.
        let n = 3;
        let id = Channel::new(projector(&max_entangled(n)).scale_re(n as f64), n, n).unwrap();
        for k in 1..=n {
            let est = max_output_purity(&id, k, &EstimateBudget::cheap()).unwrap();
            assert!((est.lower - k as f64).abs() < 1e-6, "k={k}: {}", est.lower);
            assert!((est.upper - k as f64).abs() < 1e-6, "k={k}: {}", est.upper);
        }
    }

    #[test]
    fn cb_identity_matches_complementary() {
        let mut rng = ChaCha8Rng::seed_from_u64(95);
        for n in [2usize, 3] {
            for _ in 0..5 {
                let ch = random_tp_channel(&mut rng, n, 2);
                let (choi_norm, comp_norm) = cb_output_purity(&ch).unwrap();
                assert!(
                    (choi_norm - comp_norm).abs() < 1e-9,
                    "n={n}: {choi_norm} vs {comp_norm}"
                );
            }
        }
    }

    #[test]
    fn rejects_non_cp() {
        assert!(matches!(
            cb_output_purity(&transpose_map(2)),
            Err(Error::NotCp(_))
        ));
    }
}
