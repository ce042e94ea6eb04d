//! Spherical-harmonic analysis on `S^2`.
//!
//! Real harmonics are normalized to unit `L^2` norm on `S^2` without the
//! Condon-Shortley phase: `Y_l^0 = N_l P_l(z)`, and for `m != 0` the cosine
//! (`m > 0`) or sine (`m < 0`) combination scaled by `sqrt(2)`.
//!
//! Both the cosine transform `T` and the Radon transform `R` commute with
//! rotations, so they act on each degree-`l` space by a scalar. The
//! multipliers measured here feed the ratio check of
//! `T^{-1} = c_n (Delta_n + n - 1) R^{-1}`.

use std::f64::consts::PI;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::norm;
use crate::squad::{build_sphere_rule, build_subsphere_rule, build_weighted_axis_rule};
use crate::transforms::{Preset, SphericalDensity};

/// Real spherical harmonic `Y_l^m` at a unit vector of `R^3`.
pub fn real_sh(l: usize, m: i64, xi: &[f64]) -> f64 {
    let am = m.unsigned_abs() as usize;
    if am > l {
        return 0.0;
    }
    let (x, y, z) = (xi[0], xi[1], xi[2]);
    // (x + i y)^|m| = s^|m| e^{i |m| phi}
    let (mut re, mut im) = (1.0, 0.0);
    for _ in 0..am {
        let r = re * x - im * y;
        im = re * y + im * x;
        re = r;
    }
    // Q_l^m(z) = normalized P_l^m(z) / s^m
    let mut q_mm = (0.25 / PI).sqrt();
    for k in 1..=am {
        let k = k as f64;
        q_mm *= ((2.0 * k + 1.0) / (2.0 * k)).sqrt();
    }
    let q = if l == am {
        q_mm
    } else {
        let mf = am as f64;
        let mut prev = q_mm;
        let mut cur = (2.0 * mf + 3.0).sqrt() * z * q_mm;
        for ll in am + 2..=l {
            let lf = ll as f64;
            let a = ((4.0 * lf * lf - 1.0) / (lf * lf - mf * mf)).sqrt();
            let b = (((lf - 1.0).powi(2) - mf * mf) / (4.0 * (lf - 1.0).powi(2) - 1.0)).sqrt();
            let next = a * (z * cur - b * prev);
            prev = cur;
            cur = next;
        }
        cur
    };
    match m.signum() {
        0 => q,
        1 => std::f64::consts::SQRT_2 * q * re,
        _ => std::f64::consts::SQRT_2 * q * im,
    }
}

/// Legendre polynomial `P_l(t)` by the three-term recurrence.
pub fn legendre(l: usize, t: f64) -> f64 {
    let (mut p0, mut p1) = (1.0, t);
    if l == 0 {
        return 1.0;
    }
    for k in 1..l {
        let k = k as f64;
        let p2 = ((2.0 * k + 1.0) * t * p1 - k * p0) / (k + 1.0);
        p0 = p1;
        p1 = p2;
    }
    p1
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HarmonicCoefficient {
    pub l: usize,
    pub m: i64,
    pub value: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HarmonicSpectrum {
    pub lmax: usize,
    pub coefficients: Vec<HarmonicCoefficient>,
    /// `residual_norms[l]`: `L^2` norm of `f` minus its projection onto
    /// degrees `<= l`.
    pub residual_norms: Vec<f64>,
}

impl HarmonicSpectrum {
    pub fn coefficient(&self, l: usize, m: i64) -> f64 {
        self.coefficients.iter().find(|c| c.l == l && c.m == m).map_or(0.0, |c| c.value)
    }

    /// `L^2` norm of the degree-`l` component.
    pub fn degree_norm(&self, l: usize) -> f64 {
        self.coefficients.iter().filter(|c| c.l == l).map(|c| c.value * c.value).sum::<f64>().sqrt()
    }
}

fn require_s2(f: &SphericalDensity) -> Result<()> {
    if f.dim() != 3 {
        return Err(Error::DimensionMismatch { expected: 3, got: f.dim() });
    }
    f.require_function()
}

/// Quadrature projection of (the evaluated form of) `f` onto real harmonics
/// of degree `<= lmax`. Needs an even `lmax` and `level >= lmax`.
pub fn project(f: &SphericalDensity, lmax: usize, level: usize) -> Result<HarmonicSpectrum> {
    require_s2(f)?;
    if !lmax.is_multiple_of(2) {
        return Err(Error::Precondition(format!("lmax must be even, got {lmax}")));
    }
    if level < lmax.max(1) {
        return Err(Error::InsufficientLevel { level, lmax });
    }
    let rule = build_sphere_rule(3, level)?;
    let values: Vec<f64> = rule.nodes().map(|xi| f.eval(xi)).collect();
    let mut coefficients = Vec::new();
    for l in 0..=lmax {
        for m in -(l as i64)..=(l as i64) {
            let value = rule.integrate_indexed(|i, xi| values[i] * real_sh(l, m, xi));
            coefficients.push(HarmonicCoefficient { l, m, value });
        }
    }
    let mut residual_norms = Vec::with_capacity(lmax + 1);
    for l in 0..=lmax {
        let kept: Vec<&HarmonicCoefficient> = coefficients.iter().filter(|c| c.l <= l).collect();
        let sq = rule.integrate_indexed(|i, xi| {
            let approx: f64 = kept.iter().map(|c| c.value * real_sh(c.l, c.m, xi)).sum();
            (values[i] - approx).powi(2)
        });
        residual_norms.push(sq.max(0.0).sqrt());
    }
    Ok(HarmonicSpectrum { lmax, coefficients, residual_norms })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Transform {
    /// Cosine transform.
    T,
    /// Spherical Radon transform.
    R,
}

/// Applies `T` or `R` to the raw function `g` at `x` with `level` nodes.
fn apply(which: Transform, g: &SphericalDensity, x: &[f64], level: usize) -> Result<f64> {
    match which {
        Transform::T => {
            let rule = build_weighted_axis_rule(x, 1.0, level)?;
            Ok(norm(x) * rule.integrate(|xi| g.eval(xi)))
        }
        Transform::R => Ok(build_subsphere_rule(x, level)?.integrate(|xi| g.eval(xi))),
    }
}

fn single_harmonic(l: usize, m: i64) -> SphericalDensity {
    SphericalDensity::preset(3, Preset::Harmonics { terms: vec![(l, m, 1.0)] })
        .expect("valid harmonic")
        .raw()
}

/// Fixed, well-spread test directions (Fibonacci lattice).
pub fn test_points(count: usize) -> Vec<Vec<f64>> {
    crate::convexity::fibonacci_sphere(count)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MultiplierEstimate {
    pub which: Transform,
    pub l: usize,
    pub multiplier: f64,
    /// Largest deviation of the pointwise ratio from the mean.
    pub ratio_spread: f64,
    /// `L^2` norm of the part of `(T|R) Y_l^0` orthogonal to `Y_l^0`.
    pub diagonality_residual: f64,
}

/// `(W Y)(x)` for `W in {T, R}` evaluated at the nodes of `outer`, then
/// split into its `Y` component and the orthogonal rest.
fn off_diagonal(which: Transform, l: usize, m: i64, level: usize) -> Result<(f64, f64)> {
    let g = single_harmonic(l, m);
    let outer = build_sphere_rule(3, l / 2 + 2)?;
    let nodes: Vec<Vec<f64>> = outer.nodes().map(<[f64]>::to_vec).collect();
    let image: Vec<f64> =
        nodes.par_iter().map(|x| apply(which, &g, x, level)).collect::<Result<Vec<f64>>>()?;
    let along = outer.integrate_indexed(|i, xi| image[i] * real_sh(l, m, xi));
    let rest = outer.integrate_indexed(|i, xi| (image[i] - along * real_sh(l, m, xi)).powi(2));
    Ok((along, rest.max(0.0).sqrt()))
}

/// Off-diagonal residual of `W Y_l^m` for `W in {T, R}`.
pub fn diagonality_residual(which: Transform, l: usize, m: i64, level: usize) -> Result<f64> {
    Ok(off_diagonal(which, l, m, level)?.1)
}

/// Multiplier of `T` or `R` on degree `l`, measured on `Y_l^0`.
pub fn transform_multiplier(which: Transform, l: usize, level: usize) -> Result<MultiplierEstimate> {
    if !l.is_multiple_of(2) {
        return Err(Error::Precondition(format!("multipliers are measured on even degrees, got l = {l}")));
    }
    let ratios = pointwise_ratios(which, l, level)?;
    let multiplier = ratios.iter().sum::<f64>() / ratios.len() as f64;
    let ratio_spread = ratios.iter().map(|r| (r - multiplier).abs()).fold(0.0, f64::max);
    let (_, diagonality_residual) = off_diagonal(which, l, 0, level)?;
    Ok(MultiplierEstimate { which, l, multiplier, ratio_spread, diagonality_residual })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InversionEntry {
    pub l: usize,
    pub r_l: f64,
    pub t_l: f64,
    /// Eigenvalue of `Delta_n + n - 1` on degree `l`: `n - 1 - l (l + n - 2)`.
    pub laplace_factor: f64,
    pub rho: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InversionReport {
    pub dim: usize,
    pub level: usize,
    pub entries: Vec<InversionEntry>,
    /// `(max rho - min rho) / |mean rho|`.
    pub relative_spread: f64,
    /// Mean of `rho_l`: the measured constant `c_3`.
    pub c_estimate: f64,
}

/// Noise floor for `|t_l|` below which the ratio is not formed.
pub const MULTIPLIER_FLOOR: f64 = 1e-10;

/// Computes `rho_l = r_l / (t_l (n - 1 - l (l + n - 2)))` for every even
/// `l <= lmax` with `n = 3`. The inversion relation holds iff all `rho_l`
/// agree; their common value is `c_3`.
pub fn inversion_ratio_check(lmax: usize, level: usize) -> Result<InversionReport> {
    if lmax < 4 || !lmax.is_multiple_of(2) {
        return Err(Error::Precondition(format!("lmax must be even and >= 4, got {lmax}")));
    }
    let n = 3.0;
    let entries: Vec<InversionEntry> = (0..=lmax)
        .step_by(2)
        .collect::<Vec<_>>()
        .par_iter()
        .map(|&l| {
            let r_l = transform_multiplier_value(Transform::R, l, level)?;
            let t_l = transform_multiplier_value(Transform::T, l, level)?;
            if t_l.abs() < MULTIPLIER_FLOOR {
                return Err(Error::DegenerateMultiplier { l, value: t_l });
            }
            let lf = l as f64;
            let laplace_factor = n - 1.0 - lf * (lf + n - 2.0);
            Ok(InversionEntry { l, r_l, t_l, laplace_factor, rho: r_l / (t_l * laplace_factor) })
        })
        .collect::<Result<_>>()?;
    let rhos: Vec<f64> = entries.iter().map(|e| e.rho).collect();
    let mean = rhos.iter().sum::<f64>() / rhos.len() as f64;
    let max = rhos.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let min = rhos.iter().copied().fold(f64::INFINITY, f64::min);
    Ok(InversionReport { dim: 3, level, entries, relative_spread: (max - min) / mean.abs(), c_estimate: mean })
}

/// `(W Y_l^0)(x) / Y_l^0(x)` at the test points where `|Y_l^0|` is at least
/// a quarter of its peak.
fn pointwise_ratios(which: Transform, l: usize, level: usize) -> Result<Vec<f64>> {
    let g = single_harmonic(l, 0);
    let peak = ((2 * l + 1) as f64 / (4.0 * PI)).sqrt();
    test_points(64)
        .into_iter()
        .filter(|x| real_sh(l, 0, x).abs() >= 0.25 * peak)
        .map(|x| Ok(apply(which, &g, &x, level)? / real_sh(l, 0, &x)))
        .collect()
}

/// Multiplier only (skips the diagonality residual).
pub fn transform_multiplier_value(which: Transform, l: usize, level: usize) -> Result<f64> {
    let ratios = pointwise_ratios(which, l, level)?;
    Ok(ratios.iter().sum::<f64>() / ratios.len() as f64)
}
