//! Real Gamma function and the normalization constant `C_t` that appears in
//! the derivative formulas for `|<x, xi>|^t` kernels.

use std::f64::consts::PI;

use crate::error::{Error, Result};

/// Distance to a nonpositive integer below which `gamma_fn` reports a pole.
pub const POLE_RADIUS: f64 = 1e-12;

const LANCZOS_G: f64 = 7.0;
const LANCZOS_COEF: [f64; 9] = [
    0.999_999_999_999_809_9,
    676.520_368_121_885_1,
    -1_259.139_216_722_402_8,
    771.323_428_777_653_1,
    -176.615_029_162_140_6,
    12.507_343_278_686_905,
    -0.138_571_095_265_720_12,
    9.984_369_578_019_572e-6,
    1.505_632_735_149_311_6e-7,
];

/// `sin(pi x)` with argument reduction so that values near integers keep
/// their relative accuracy.
fn sin_pi(x: f64) -> f64 {
    let r = x - 2.0 * (x / 2.0).round();
    // r in [-1, 1]; fold onto [-1/2, 1/2] using sin(pi r) = sin(pi (±1 - r))
    let r = if r > 0.5 {
        1.0 - r
    } else if r < -0.5 {
        -1.0 - r
    } else {
        r
    };
    (PI * r).sin()
}

fn lanczos(x: f64) -> f64 {
    // Gamma(x) for x >= 0.5
    let z = x - 1.0;
    let mut acc = LANCZOS_COEF[0];
    for (i, c) in LANCZOS_COEF.iter().enumerate().skip(1) {
        acc += c / (z + i as f64);
    }
    let t = z + LANCZOS_G + 0.5;
    (2.0 * PI).sqrt() * t.powf(z + 0.5) * (-t).exp() * acc
}

/// Euler Gamma function on the real line.
///
/// Positive arguments use a Lanczos approximation (g = 7, nine terms); the
/// negative axis is reached through the reflection formula. Arguments within
/// [`POLE_RADIUS`] of `0, -1, -2, ...` return [`Error::Pole`].
pub fn gamma_fn(x: f64) -> Result<f64> {
    if !x.is_finite() {
        return Err(Error::Domain(format!("gamma of non-finite argument {x}")));
    }
    if x <= 0.0 && (x - x.round()).abs() < POLE_RADIUS {
        return Err(Error::Pole(x));
    }
    if x == x.trunc() && (1.0..=171.0).contains(&x) {
        // exact factorials
        return Ok((1..x as u32).fold(1.0, |acc, k| acc * k as f64));
    }
    if x < 0.5 {
        Ok(PI / (sin_pi(x) * lanczos(1.0 - x)))
    } else {
        Ok(lanczos(x))
    }
}

/// True when `t` is an even nonnegative integer, within [`POLE_RADIUS`].
pub fn is_even_integer(t: f64) -> bool {
    t >= -POLE_RADIUS && (t / 2.0 - (t / 2.0).round()).abs() < POLE_RADIUS / 2.0
}

/// `C_t = 2^{t+1} sqrt(pi) Gamma((t+1)/2) / Gamma(-t/2)`.
///
/// Defined for `t > -1` away from the even nonnegative integers, where
/// `Gamma(-t/2)` has poles.
pub fn c_const(t: f64) -> Result<f64> {
    if !(t > -1.0) {
        return Err(Error::Precondition(format!("C_t requires t > -1, got t = {t}")));
    }
    if is_even_integer(t) {
        return Err(Error::Pole(-t / 2.0));
    }
    let num = 2f64.powf(t + 1.0) * PI.sqrt() * gamma_fn((t + 1.0) / 2.0)?;
    Ok(num / gamma_fn(-t / 2.0)?)
}

/// Surface measure of the unit sphere `S^{n-1}` in `R^n`; `n = 1` gives the
/// counting measure of `S^0 = {-1, 1}`.
pub fn sphere_measure(n: usize) -> f64 {
    let half = n as f64 / 2.0;
    2.0 * PI.powf(half) / gamma_fn(half).expect("n/2 > 0")
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rel(a: f64, b: f64) -> f64 {
        (a - b).abs() / b.abs().max(f64::MIN_POSITIVE)
    }

    #[test]
    fn gamma_examples() {
        assert_eq!(gamma_fn(1.0).unwrap(), 1.0);
        assert!(rel(gamma_fn(0.5).unwrap(), PI.sqrt()) < 1e-14);
        assert!(rel(gamma_fn(-0.5).unwrap(), -2.0 * PI.sqrt()) < 1e-14);
        assert!(rel(gamma_fn(6.0).unwrap(), 120.0) < 1e-14);
        assert!(rel(gamma_fn(20.0).unwrap(), 121_645_100_408_832_000.0) < 1e-13);
    }

    #[test]
    fn gamma_poles() {
        for x in [0.0, -1.0, -2.0, -7.0, -3.0 + 1e-13] {
            assert!(matches!(gamma_fn(x), Err(Error::Pole(_))), "x = {x}");
        }
        assert!(gamma_fn(-3.0 + 1e-6).is_ok());
        assert!(gamma_fn(f64::NAN).is_err());
    }

    #[test]
    fn gamma_recurrence() {
        // 100 points in [-9.5, 19.5] kept away from the poles.
        for i in 0..100 {
            let x = -9.5 + 29.0 * (i as f64 + 0.37) / 100.0;
            if (x - x.round()).abs() < 1e-3 && x <= 0.5 {
                continue;
            }
            let lhs = gamma_fn(x + 1.0).unwrap();
            let rhs = x * gamma_fn(x).unwrap();
            assert!(rel(lhs, rhs) < 1e-12, "x = {x}: {lhs} vs {rhs}");
        }
    }

    #[test]
    fn gamma_negative_half_integers() {
        // Gamma(1/2 - k) = (-4)^k k! / (2k)! sqrt(pi)
        let mut fact_k = 1.0;
        let mut fact_2k = 1.0;
        for k in 0..10u32 {
            if k > 0 {
                fact_k *= k as f64;
                fact_2k *= (2 * k - 1) as f64 * (2 * k) as f64;
            }
            let exact = (-4f64).powi(k as i32) * fact_k / fact_2k * PI.sqrt();
            assert!(rel(gamma_fn(0.5 - k as f64).unwrap(), exact) < 1e-12);
        }
    }

    #[test]
    fn c_const_examples() {
        assert!((c_const(1.0).unwrap() + 2.0).abs() < 1e-12);
        assert!((c_const(3.0).unwrap() - 12.0).abs() < 1e-12);
        assert!(matches!(c_const(2.0), Err(Error::Pole(_))));
        assert!(matches!(c_const(0.0), Err(Error::Pole(_))));
        assert!(matches!(c_const(-1.0), Err(Error::Precondition(_))));
    }

    #[test]
    fn c_const_ratio_identity() {
        for p in [1.5, 2.5, 3.0, 3.7, 5.0] {
            let ratio = -c_const(p).unwrap() / c_const(p - 2.0).unwrap();
            assert!(rel(ratio, p * (p - 1.0)) < 1e-10, "p = {p}");
        }
    }

    #[test]
    fn c_const_sign_follows_gamma() {
        for t in [-0.5, 0.5, 1.0, 1.5, 2.5, 3.5, 5.0, 7.3] {
            let c = c_const(t).unwrap();
            let g = gamma_fn(-t / 2.0).unwrap();
            assert!(c.is_finite());
            assert_eq!(c.signum(), g.signum(), "t = {t}");
        }
    }

    #[test]
    fn sphere_measures() {
        assert!(rel(sphere_measure(1), 2.0) < 1e-15);
        assert!(rel(sphere_measure(2), 2.0 * PI) < 1e-15);
        assert!(rel(sphere_measure(3), 4.0 * PI) < 1e-15);
        assert!(rel(sphere_measure(4), 2.0 * PI * PI) < 1e-14);
    }
}
