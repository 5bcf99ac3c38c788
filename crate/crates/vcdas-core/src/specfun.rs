//! Special functions behind the closed-form rate and the rule of thumb: the
//! scaled exponential integral `e^z·E₁(z)`, the upper incomplete gamma
//! `Γ(1/2, x)`, and the hypoexponential density in partial-fraction form.
//!
//! The rate formula multiplies `e^z` by `E₁(z)` with `z` routinely in the
//! hundreds, so the product is always computed directly (series below 1,
//! continued fraction above) and never as two overflowing factors.

use alloc::vec::Vec;

use crate::fmath;
use crate::{Error, Result};

const EULER_GAMMA: f64 = 0.577_215_664_901_532_9;

/// Minimum relative separation enforced between hypoexponential rates.
pub const RATE_SEPARATION: f64 = 1e-6;

/// Scaled exponential integral `e^z·E₁(z)` for `z > 0`.
///
/// Relative error stays below 1e-10 across `[1e-8, 1e8]` and the value never
/// overflows: it decays like `1/z` for large `z` and grows only like
/// `-ln z` near zero.
pub fn exp_e1(z: f64) -> Result<f64> {
    if !z.is_finite() || z <= 0.0 {
        return Err(Error::NonPositive {
            what: "exp_e1 argument",
            got: z,
        });
    }
    if z <= 1.0 {
        // E₁(z) = −γ − ln z + Σ_{k≥1} (−1)^{k+1} z^k/(k·k!)
        let mut sum = 0.0;
        let mut term = 1.0;
        for k in 1..=40 {
            term *= -z / k as f64;
            let contrib = -term / k as f64;
            sum += contrib;
            if fmath::abs(contrib) < 1e-18 * fmath::abs(sum) {
                break;
            }
        }
        Ok(fmath::exp(z) * (-EULER_GAMMA - fmath::ln(z) + sum))
    } else {
        // e^z E₁(z) = 1/(z+1− 1²/(z+3− 2²/(z+5− …))), evaluated with
        // modified Lentz.
        const TINY: f64 = 1e-300;
        let mut b = z + 1.0;
        let mut c = 1.0 / TINY;
        let mut d = 1.0 / b;
        let mut f = d;
        for k in 1..=200u32 {
            let a = -((k as f64) * (k as f64));
            b += 2.0;
            d = b + a * d;
            if fmath::abs(d) < TINY {
                d = TINY;
            }
            c = b + a / c;
            if fmath::abs(c) < TINY {
                c = TINY;
            }
            d = 1.0 / d;
            let delta = c * d;
            f *= delta;
            if fmath::abs(delta - 1.0) < 1e-15 {
                break;
            }
        }
        Ok(f)
    }
}

/// Upper incomplete gamma `Γ(1/2, x) = ∫_x^∞ t^{-1/2} e^{-t} dt` for `x ≥ 0`.
pub fn upper_incomplete_gamma_half(x: f64) -> Result<f64> {
    const S: f64 = 0.5;
    const SQRT_PI: f64 = 1.772_453_850_905_516;
    if !x.is_finite() || x < 0.0 {
        return Err(Error::Negative {
            what: "incomplete gamma argument",
            got: x,
        });
    }
    if x == 0.0 {
        return Ok(SQRT_PI);
    }
    if x < 1.5 {
        // Lower series: γ(s,x) = x^s e^{-x} Σ_{n≥0} x^n / (s(s+1)…(s+n)).
        let mut denom = S;
        let mut term = 1.0 / S;
        let mut sum = term;
        for _ in 0..200 {
            denom += 1.0;
            term *= x / denom;
            sum += term;
            if term < 1e-17 * sum {
                break;
            }
        }
        let lower = fmath::powf(x, S) * fmath::exp(-x) * sum;
        Ok(SQRT_PI - lower)
    } else {
        // Continued fraction (modified Lentz): Γ(s,x) = e^{-x} x^s · CF.
        const TINY: f64 = 1e-300;
        let mut b = x + 1.0 - S;
        let mut c = 1.0 / TINY;
        let mut d = 1.0 / b;
        let mut f = d;
        for i in 1..=300u32 {
            let a = -(i as f64) * (i as f64 - S);
            b += 2.0;
            d = a * d + b;
            if fmath::abs(d) < TINY {
                d = TINY;
            }
            c = b + a / c;
            if fmath::abs(c) < TINY {
                c = TINY;
            }
            d = 1.0 / d;
            let delta = d * c;
            f *= delta;
            if fmath::abs(delta - 1.0) < 1e-15 {
                break;
            }
        }
        Ok(fmath::exp(-x) * fmath::powf(x, S) * f)
    }
}

/// Enforce pairwise relative separation of at least [`RATE_SEPARATION`].
///
/// The partial-fraction formulas are singular at coincident rates, which have
/// probability zero under continuous placement but can be produced by
/// clamped or hand-built inputs. Rates are scanned in order; the i-th rate
/// found conflicting with an earlier one is multiplied by `1 + i·1e-5`
/// (repeatedly, with `i` advancing, in the unlikely case one bump lands on
/// yet another rate).
pub fn separate_rates(rates: &mut [f64]) {
    let gap_ok = |a: f64, b: f64| {
        let scale = fmath::abs(a).max(fmath::abs(b));
        fmath::abs(a - b) >= RATE_SEPARATION * scale
    };
    let mut offender = 0usize;
    for j in 1..rates.len() {
        loop {
            let conflict = rates[..j].iter().any(|&r| !gap_ok(r, rates[j]));
            if !conflict {
                break;
            }
            offender += 1;
            rates[j] *= 1.0 + offender as f64 * 1e-5;
        }
    }
}

/// Rates of a hypoexponential distribution (a sum of independent
/// exponentials), pre-separated so the partial-fraction form is stable.
#[derive(Debug, Clone, PartialEq)]
pub struct HypoexpSpec {
    rates: Vec<f64>,
}

impl HypoexpSpec {
    /// Validate and store rates, applying the separation rule.
    pub fn new(mut rates: Vec<f64>) -> Result<Self> {
        if rates.is_empty() {
            return Err(Error::CountTooSmall {
                what: "hypoexponential rate count",
                got: 0,
                min: 1,
            });
        }
        for &r in &rates {
            if !r.is_finite() || r <= 0.0 {
                return Err(Error::NonPositive {
                    what: "hypoexponential rate",
                    got: r,
                });
            }
        }
        separate_rates(&mut rates);
        for i in 0..rates.len() {
            for j in 0..i {
                let scale = rates[i].max(rates[j]);
                if fmath::abs(rates[i] - rates[j]) < RATE_SEPARATION * scale {
                    return Err(Error::DegenerateRates);
                }
            }
        }
        Ok(Self { rates })
    }

    pub fn rates(&self) -> &[f64] {
        &self.rates
    }
}

/// Hypoexponential density at `x` in partial-fraction form:
/// `f(x) = Σ_l λ_l e^{-λ_l x} Π_{q≠l} λ_q/(λ_q − λ_l)`.
///
/// Returns 0 for negative `x` (the distribution is supported on `[0, ∞)`).
pub fn hypoexp_pdf(spec: &HypoexpSpec, x: f64) -> f64 {
    if x < 0.0 {
        return 0.0;
    }
    let rates = &spec.rates;
    let mut sum = crate::stats::CompensatedSum::new();
    for (l, &rl) in rates.iter().enumerate() {
        let mut term = rl * fmath::exp(-rl * x);
        for (q, &rq) in rates.iter().enumerate() {
            if q != l {
                term *= rq / (rq - rl);
            }
        }
        sum.add(term);
    }
    sum.value()
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;
    use approx::assert_relative_eq;

    #[test]
    fn exp_e1_reference_values() {
        // e^z E1(z) evaluated independently (scipy exp(z)*exp1(z)).
        assert_relative_eq!(exp_e1(1.0).unwrap(), 0.5963473623231946, max_relative = 1e-12);
        assert_relative_eq!(
            exp_e1(100.0).unwrap(),
            0.009901942286733018,
            max_relative = 1e-12
        );
        assert_relative_eq!(exp_e1(0.5).unwrap(), 0.9229106324837305, max_relative = 1e-12);
        assert_relative_eq!(exp_e1(1e-4).unwrap(), 8.634088070212725, max_relative = 1e-12);
        assert_relative_eq!(exp_e1(10.0).unwrap(), 0.09156333393978809, max_relative = 1e-12);
    }

    #[test]
    fn exp_e1_small_z_log_behavior() {
        // exp_e1(z) + ln z → −γ as z → 0⁺.
        let z = 1e-8;
        let v = exp_e1(z).unwrap() + fmath::ln(z);
        assert_relative_eq!(v, -0.5772154764668826, max_relative = 1e-9);
        assert!((v + EULER_GAMMA).abs() < 1e-6);
    }

    #[test]
    fn exp_e1_rejects_nonpositive() {
        assert!(exp_e1(0.0).is_err());
        assert!(exp_e1(-1.0).is_err());
        assert!(exp_e1(f64::NAN).is_err());
    }

    #[test]
    fn exp_e1_bracketing_and_monotone() {
        // 1/(z+1) ≤ e^z E1(z) ≤ 1/z, strictly decreasing.
        let mut prev = f64::INFINITY;
        for i in 0..=320 {
            let z = fmath::powf(10.0, -8.0 + i as f64 * 0.05);
            let v = exp_e1(z).unwrap();
            assert!(v > 1.0 / (z + 1.0) && v < 1.0 / z, "bracket fails at z={z}");
            assert!(v < prev, "not decreasing at z={z}");
            prev = v;
        }
    }

    #[test]
    fn exp_e1_huge_argument_no_overflow() {
        let v = exp_e1(1e300).unwrap();
        assert!(v.is_finite() && v > 0.0);
        assert_relative_eq!(v, 1e-300, max_relative = 1e-10);
    }

    #[test]
    fn gamma_half_reference_values() {
        let sqrt_pi = 1.772_453_850_905_516;
        assert_relative_eq!(
            upper_incomplete_gamma_half(0.0).unwrap(),
            sqrt_pi,
            max_relative = 1e-13
        );
        assert_relative_eq!(
            upper_incomplete_gamma_half(1.0).unwrap(),
            0.27880558528065474,
            max_relative = 1e-11
        );
        assert_relative_eq!(
            upper_incomplete_gamma_half(2.5).unwrap(),
            0.04492695260000804,
            max_relative = 1e-11
        );
        assert_relative_eq!(
            upper_incomplete_gamma_half(48.0).unwrap(),
            2.0362566571827087e-22,
            max_relative = 1e-10
        );
        assert!(upper_incomplete_gamma_half(48.0).unwrap() < 1e-20);
    }

    #[test]
    fn gamma_half_rejects_negative() {
        assert!(upper_incomplete_gamma_half(-0.5).is_err());
        assert!(upper_incomplete_gamma_half(f64::NAN).is_err());
    }

    #[test]
    fn gamma_half_strictly_decreasing() {
        let mut prev = f64::INFINITY;
        for i in 0..60 {
            let x = i as f64 * 0.25;
            let v = upper_incomplete_gamma_half(x).unwrap();
            assert!(v < prev);
            prev = v;
        }
    }

    #[test]
    fn hypoexp_single_rate_is_exponential() {
        let spec = HypoexpSpec::new(vec![1.0]).unwrap();
        for &x in &[0.0, 0.3, 1.0, 4.0] {
            assert_relative_eq!(hypoexp_pdf(&spec, x), fmath::exp(-x), max_relative = 1e-14);
        }
    }

    #[test]
    fn hypoexp_two_rates_matches_convolution() {
        // Convolution of Exp(1) and Exp(2): f(x) = 2(e^{-x} − e^{-2x}).
        let spec = HypoexpSpec::new(vec![1.0, 2.0]).unwrap();
        assert_relative_eq!(hypoexp_pdf(&spec, 1.0), 0.46508831586965926, max_relative = 1e-13);
        assert_relative_eq!(
            hypoexp_pdf(&spec, 0.25),
            2.0 * (fmath::exp(-0.25) - fmath::exp(-0.5)),
            max_relative = 1e-13
        );
    }

    #[test]
    fn hypoexp_negative_x_is_zero() {
        let spec = HypoexpSpec::new(vec![1.0, 2.0]).unwrap();
        assert_eq!(hypoexp_pdf(&spec, -1.0), 0.0);
    }

    #[test]
    fn hypoexp_rejects_bad_rates() {
        assert!(HypoexpSpec::new(vec![]).is_err());
        assert!(HypoexpSpec::new(vec![1.0, -2.0]).is_err());
        assert!(HypoexpSpec::new(vec![1.0, f64::INFINITY]).is_err());
    }

    #[test]
    fn duplicate_rates_are_separated() {
        let spec = HypoexpSpec::new(vec![1.0, 1.0, 1.0]).unwrap();
        let r = spec.rates();
        for i in 0..3 {
            for j in 0..i {
                let gap = (r[i] - r[j]).abs() / r[i].max(r[j]);
                assert!(gap >= RATE_SEPARATION);
            }
        }
        // Perturbation stays tiny.
        for &x in r {
            assert!((x - 1.0).abs() < 1e-3);
        }
        // Density still integrates like an Erlang(3,1) near its mode.
        assert_relative_eq!(
            hypoexp_pdf(&spec, 2.0),
            2.0 * 2.0 * fmath::exp(-2.0) / 2.0,
            max_relative = 1e-3
        );
    }
}
