//! Closed-form Werner-state S(k) norms and the standard alpha thresholds.

use crate::error::{Error, Result};

/// Exact S(k) norm of the Werner state `rho_alpha in M_n (x) M_n`:
/// `(1 + |min(alpha, 0)|) / (n(n - alpha))` for k = 1 and
/// `(1 + |alpha|) / (n(n - alpha))` for 2 <= k <= n.
pub fn werner_sk_norm(n: usize, alpha: f64, k: usize) -> Result<f64> {
    if !(-1.0..=1.0).contains(&alpha) {
        return Err(Error::InvalidParameter(format!(
            "alpha = {alpha} outside [-1, 1]"
        )));
    }
    if k == 0 || k > n {
        return Err(Error::KOutOfRange { k, max: n });
    }
    let nf = n as f64;
    let denom = nf * (nf - alpha);
    Ok(if k == 1 {
        (1.0 + alpha.min(0.0).abs()) / denom
    } else {
        (1.0 + alpha.abs()) / denom
    })
}

/// The alpha thresholds of the Werner family on `M_n (x) M_n`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct WernerThresholds {
    /// PPT (equivalently separable) iff `alpha <= 1/n`.
    pub ppt: f64,
    /// 1-copy undistillable iff `alpha <= 1/2`.
    pub one_copy_undistillable: f64,
    /// Entangled iff `alpha > 1/n`.
    pub entangled: f64,
}

pub fn werner_thresholds(n: usize) -> WernerThresholds {
    WernerThresholds {
        ppt: 1.0 / n as f64,
        one_copy_undistillable: 0.5,
        entangled: 1.0 / n as f64,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::channels::werner_state;
    use crate::sknorm::{sk_lower_seesaw, SeesawOptions};

    #[test]
    fn table_values() {
        assert!((werner_sk_norm(2, 0.5, 1).unwrap() - 1.0 / 3.0).abs() < 1e-15);
        assert!((werner_sk_norm(2, -0.5, 1).unwrap() - 0.3).abs() < 1e-15);
        assert!((werner_sk_norm(3, 0.5, 1).unwrap() - 2.0 / 15.0).abs() < 1e-15);
        assert!((werner_sk_norm(3, -0.5, 1).unwrap() - 1.0 / 7.0).abs() < 1e-15);
    }

    #[test]
    fn maximally_mixed_at_alpha_zero() {
        for n in 2..=5 {
            for k in 1..=n {
                let v = werner_sk_norm(n, 0.0, k).unwrap();
                assert!((v - 1.0 / (n * n) as f64).abs() < 1e-15);
            }
        }
    }

    #[test]
    fn closed_form_matches_seesaw() {
        for &(n, alpha, k) in &[(2usize, 0.7f64, 2usize), (3, -0.4, 2), (3, 0.5, 3)] {
            let w = werner_state(n, alpha).unwrap();
            let (lo, _) = sk_lower_seesaw(
                &w,
                k,
                &SeesawOptions {
                    restarts: 30,
                    ..Default::default()
                },
            )
            .unwrap();
            let exact = werner_sk_norm(n, alpha, k).unwrap();
            assert!((lo - exact).abs() < 1e-8, "n={n} alpha={alpha} k={k}: {lo}");
        }
    }

    #[test]
    fn thresholds() {
        let t = werner_thresholds(4);
        assert_eq!(t.ppt, 0.25);
        assert_eq!(t.one_copy_undistillable, 0.5);
        assert_eq!(t.entangled, 0.25);
        assert!(werner_sk_norm(3, 1.5, 1).is_err());
        assert!(werner_sk_norm(3, 0.5, 4).is_err());
    }
}
