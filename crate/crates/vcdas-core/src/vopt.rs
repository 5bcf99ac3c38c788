//! The optimal virtual-cell size: exact continuous optimum and the
//! `⌈0.2·L/K⌉` rule of thumb.
//!
//! The optimum balances each user's cell radius against the distance to its
//! closest interferer: the largest `V` whose expected cell radii do not
//! overlap is `V* = (L/4)·d̄²` with `d̄` the mean nearest-user distance.
//! For large `K`, `d̄ ≈ 0.89/√K` and the boxed integer rule `⌈0.2·L/K⌉`
//! follows.

use crate::fmath;
use crate::{Error, Result};

/// Mean distance from a user to its closest interferer among `K` users on
/// the unit disk (edge effects ignored, as in the analysis).
///
/// This is the exact mean of the nearest-user density
/// `f(x) = 2(K−1)x(1−x²)^{K−2}`, namely `(K−1)·B(3/2, K−1)`, evaluated by a
/// stable Beta-function recurrence. It behaves like `0.89/√K` for large `K`
/// and satisfies `√K·d̄ → √π/2`.
pub fn mean_nearest_user_distance(k: usize) -> Result<f64> {
    if k < 3 {
        return Err(Error::CountTooSmall {
            what: "user count",
            got: k,
            min: 3,
        });
    }
    // B(3/2, 1) = 2/3; B(3/2, n) = B(3/2, n−1)·(n−1)/(n + 1/2).
    let mut beta = 2.0 / 3.0;
    for n in 2..k {
        beta *= (n as f64 - 1.0) / (n as f64 + 0.5);
    }
    Ok((k as f64 - 1.0) * beta)
}

/// Continuous optimal virtual cell size `(L/4)·d̄²`.
pub fn optimal_v_exact(k: usize, l: usize) -> Result<f64> {
    if l < 1 {
        return Err(Error::CountTooSmall {
            what: "antenna count",
            got: l,
            min: 1,
        });
    }
    let d = mean_nearest_user_distance(k)?;
    Ok(l as f64 / 4.0 * d * d)
}

/// The rule of thumb `⌈0.2·L/K⌉`, never below 1.
pub fn optimal_v(k: usize, l: usize) -> usize {
    assert!(k >= 1 && l >= 1, "optimal_v requires K >= 1 and L >= 1");
    // ⌈L/(5K)⌉ in integer arithmetic; at least 1 since L >= 1.
    (l + 5 * k - 1) / (5 * k)
}

/// The continuous optimum, its integer refinement and the supporting mean
/// nearest-user distance.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct VStarResult {
    /// `(L/4)·d̄²`, the unconstrained optimum.
    pub v_exact: f64,
    /// `⌈max(v_exact, 1)⌉` — an integer cell size of at least 1.
    pub v_integer: usize,
    /// Mean nearest-user distance `d̄` used above.
    pub mean_nn_distance: f64,
}

/// Compute all [`VStarResult`] fields for a `(K, L)` system.
pub fn v_star(k: usize, l: usize) -> Result<VStarResult> {
    let mean_nn_distance = mean_nearest_user_distance(k)?;
    let v_exact = optimal_v_exact(k, l)?;
    let v_integer = fmath::ceil(v_exact.max(1.0)) as usize;
    Ok(VStarResult {
        v_exact,
        v_integer,
        mean_nn_distance,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn mean_distance_reference_k50() {
        // (K−1)·B(3/2, K−1) evaluated independently via scipy.special.beta.
        let d = mean_nearest_user_distance(50).unwrap();
        assert_relative_eq!(d, 0.12564512901854902, max_relative = 1e-12);
        // Within 1% of the 0.89/√K shortcut.
        let approx_rule = 0.89 / fmath::sqrt(50.0);
        assert!((d - approx_rule).abs() / approx_rule < 0.01);
    }

    #[test]
    fn mean_distance_large_k_limit() {
        // √K·d̄ → √π/2.
        let k = 2_000_000;
        let d = mean_nearest_user_distance(k).unwrap();
        let scaled = d * fmath::sqrt(k as f64);
        assert_relative_eq!(scaled, 0.8862269254527580, max_relative = 1e-5);
    }

    #[test]
    fn mean_distance_requires_three_users() {
        assert!(mean_nearest_user_distance(2).is_err());
        assert!(mean_nearest_user_distance(3).is_ok());
    }

    #[test]
    fn v_exact_reference_values() {
        let v = optimal_v_exact(50, 100).unwrap();
        assert_relative_eq!(v, 0.3946674611521957, max_relative = 1e-12);
        assert!(v > 0.39 && v < 0.40);
        let v = optimal_v_exact(50, 2500).unwrap();
        assert!((v - 10.0).abs() < 0.2, "got {v}");
    }

    #[test]
    fn rule_of_thumb_reference_values() {
        assert_eq!(optimal_v(50, 100), 1);
        assert_eq!(optimal_v(50, 1000), 4);
        assert_eq!(optimal_v(50, 2500), 10);
        assert_eq!(optimal_v(1, 1), 1);
    }

    #[test]
    fn rule_is_monotone() {
        for k in [1usize, 5, 20, 50, 100] {
            let mut prev = 0;
            for l in (1..=5000).step_by(37) {
                let v = optimal_v(k, l);
                assert!(v >= prev && v >= 1);
                prev = v;
            }
        }
        for l in [50usize, 500, 2500] {
            let mut prev = usize::MAX;
            for k in 1..=200 {
                let v = optimal_v(k, l);
                assert!(v <= prev);
                prev = v;
            }
        }
    }

    #[test]
    fn rule_tracks_exact_within_one() {
        for k in [20usize, 50, 100, 200] {
            for ratio in 1..=50 {
                let l = ratio * k;
                let vs = v_star(k, l).unwrap();
                let rule = optimal_v(k, l) as i64;
                assert!(
                    (rule - vs.v_integer as i64).abs() <= 1,
                    "K={k} L={l}: rule {rule} vs exact {}",
                    vs.v_integer
                );
            }
        }
    }

    #[test]
    fn fixed_ratio_stabilizes() {
        // With L/K fixed, v_exact varies only through the d̄ correction.
        let a = optimal_v_exact(200, 4000).unwrap();
        let b = optimal_v_exact(400, 8000).unwrap();
        assert!((a - b).abs() / a < 0.01, "{a} vs {b}");
    }

    #[test]
    fn v_star_fields_consistent() {
        let vs = v_star(50, 1000).unwrap();
        assert_eq!(vs.v_integer, 4);
        assert!(vs.mean_nn_distance > 0.0 && vs.mean_nn_distance < 1.0);
        assert_relative_eq!(
            vs.v_exact,
            250.0 * vs.mean_nn_distance * vs.mean_nn_distance,
            max_relative = 1e-12
        );
    }
}
