use serde::{Deserialize, Serialize};

use crate::error::LcaError;
use crate::greedy::{check_eps_delta, sample_size, trials};
use crate::weak_mis::{ceil_log2, ceil_tolerant};

/// Largest independence used for a path ordering.
pub const MAX_PATH_INDEPENDENCE: u64 = 256;

/// Constants of the approximate-matching LCA, derived from `(n, m, d, eps, delta)`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AmmParams {
    pub n: usize,
    pub m: usize,
    pub d: usize,
    pub eps: f64,
    pub delta: f64,
    /// Number of phases, `ceil(2/eps)`.
    pub k: u32,
    /// `eps / (2d)`.
    pub gamma: f64,
    /// Initial call budget `200 (1+d)^(2k)`, saturating.
    pub ell0: u64,
    /// `log2` of `d^(6k^2)`, the leading factor of the worst-case query bound.
    pub t_log2: f64,
    pub trials: u64,
    /// Sampled edges: `ceil(32 ln(4T/delta) / gamma^2)`.
    pub sample_size: u64,
    pub doublings: u32,
}

impl AmmParams {
    pub fn new(n: usize, m: usize, d: usize, eps: f64, delta: f64) -> Result<Self, LcaError> {
        check_eps_delta(eps, delta)?;
        let k = ceil_tolerant(2.0 / eps) as u32;
        Self::with_k(n, m, d, eps, delta, k)
    }

    /// Same constants with an explicit phase count.
    pub fn with_k(n: usize, m: usize, d: usize, eps: f64, delta: f64, k: u32) -> Result<Self, LcaError> {
        check_eps_delta(eps, delta)?;
        if n == 0 {
            return Err(LcaError::InvalidParameter {
                field: "n",
                reason: "graph has no vertices".into(),
            });
        }
        if k == 0 {
            return Err(LcaError::InvalidParameter {
                field: "k",
                reason: "at least one phase is needed".into(),
            });
        }
        let gamma = eps / (2 * d.max(1)) as f64;
        let trials = trials(delta);
        let ell0 = (1 + d as u64)
            .checked_pow(2 * k)
            .and_then(|x| x.checked_mul(200))
            .unwrap_or(u64::MAX);
        Ok(AmmParams {
            n,
            m,
            d,
            eps,
            delta,
            k,
            gamma,
            ell0,
            t_log2: 6.0 * (k * k) as f64 * (d.max(1) as f64).log2(),
            trials,
            sample_size: sample_size(trials, delta, gamma),
            doublings: ceil_log2(n as u64),
        })
    }

    pub fn threshold(&self) -> f64 {
        0.75 * self.gamma
    }

    pub fn ordering_independence(ell: u64) -> usize {
        ell.clamp(1, MAX_PATH_INDEPENDENCE) as usize
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parameter_arithmetic() {
        let p = AmmParams::new(40, 60, 3, 0.5, 0.01).unwrap();
        assert_eq!(p.k, 4);
        assert!((p.gamma - 0.5 / 6.0).abs() < 1e-12);
        assert_eq!(p.ell0, 200 * 4u64.pow(8));
        assert_eq!(p.trials, 27);
        assert_eq!(p.doublings, 6);
        assert_eq!(AmmParams::new(10, 9, 2, 1.0, 0.1).unwrap().k, 2);
        assert_eq!(AmmParams::new(10, 9, 2, 0.4, 0.1).unwrap().k, 5);
        assert_eq!(AmmParams::with_k(10, 9, 1000, 0.1, 0.1, 7).unwrap().ell0, u64::MAX);
        assert!(AmmParams::with_k(10, 9, 2, 0.5, 0.1, 0).is_err());
    }
}
