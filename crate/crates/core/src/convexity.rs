//! Curvature and convexity of the body whose support function is
//! `H = (T_p f)^{1/p}`: reverse Weingarten maps, principal radii,
//! Gauss-Kronecker curvature and Lindquist-type criteria.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::deriv::{grad_hp, hessian_h, hessian_h_p1, hessian_hp};
use crate::error::{Error, Result};
use crate::linalg::{dot, householder_frame, sym_eigen, unit, Matrix};
use crate::squad::build_subsphere_rule;
use crate::transforms::{check_point, lp_cosine, weighted_moments, SphericalDensity, TransformSpec};

/// A principal radius counts as positive when it exceeds this multiple of
/// `H(u)`.
pub const RADIUS_FLOOR: f64 = 1e-6;

/// Lindquist values above `-CONVEXITY_TOL` count as nonnegative.
pub const CONVEXITY_TOL: f64 = 1e-9;

/// `count` near-uniform points on `S^2` along a golden-angle spiral.
pub fn fibonacci_sphere(count: usize) -> Vec<Vec<f64>> {
    let golden = std::f64::consts::PI * (3.0 - 5f64.sqrt());
    (0..count)
        .map(|i| {
            let z = 1.0 - (2 * i + 1) as f64 / count as f64;
            let r = (1.0 - z * z).max(0.0).sqrt();
            let phi = golden * i as f64;
            vec![r * phi.cos(), r * phi.sin(), z]
        })
        .collect()
}

/// Direction grid on `S^{n-1}`: equally spaced angles for `n = 2`, a
/// Fibonacci spiral for `n = 3`, and seeded Gaussian directions above that.
pub fn direction_grid(n: usize, count: usize, seed: u64) -> Result<Vec<Vec<f64>>> {
    match n {
        0 | 1 => Err(Error::InvalidDimension(n)),
        2 => Ok((0..count)
            .map(|j| {
                let a = 2.0 * std::f64::consts::PI * j as f64 / count as f64;
                vec![a.cos(), a.sin()]
            })
            .collect()),
        3 => Ok(fibonacci_sphere(count)),
        _ => {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            Ok((0..count).map(|_| random_unit(n, &mut rng)).collect())
        }
    }
}

/// Uniform random point on `S^{n-1}`.
pub fn random_unit<R: rand::Rng>(n: usize, rng: &mut R) -> Vec<f64> {
    loop {
        // Box-Muller pairs
        let v: Vec<f64> = (0..n)
            .map(|_| {
                let a: f64 = rng.gen::<f64>().max(f64::MIN_POSITIVE);
                let b: f64 = rng.gen();
                (-2.0 * a.ln()).sqrt() * (2.0 * std::f64::consts::PI * b).cos()
            })
            .collect();
        if let Ok(u) = unit(&v) {
            return u;
        }
    }
}

/// Differential of `grad H` at the outer normal `u`, restricted to `u^⊥`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReverseWeingarten {
    pub u: Vec<f64>,
    pub tangent_basis: Vec<Vec<f64>>,
    pub matrix: Matrix,
    /// Principal radii of curvature, ascending.
    pub radii: Vec<f64>,
    /// `H(u)`
    pub support: f64,
}

fn support_at(f: &SphericalDensity, p: f64, u: &[f64], level: usize) -> Result<f64> {
    let hp = lp_cosine(f, &TransformSpec::new(p, f.dim(), level)?, u)?;
    if !(hp > 0.0) {
        return Err(Error::Domain(format!("H(u)^p = {hp:e} is not positive at u = {u:?}")));
    }
    Ok(hp.powf(1.0 / p))
}

/// Principal radii at `u`: eigenvalues of `B^T D^2 H(u) B` with `B` an
/// orthonormal basis of `u^⊥`.
pub fn reverse_weingarten(f: &SphericalDensity, p: f64, u: &[f64], level: usize) -> Result<ReverseWeingarten> {
    check_point(f, u)?;
    let u = unit(u)?;
    let support = support_at(f, p, &u, level)?;
    let hess = hessian_h(f, p, &u, level)?;
    let mut frame = householder_frame(&u)?;
    frame.pop();
    let matrix = hess.congruence(&frame);
    let radii = sym_eigen(&matrix).values;
    Ok(ReverseWeingarten { u, tangent_basis: frame, matrix, radii, support })
}

/// `1 / prod(radii)`, or `None` when a radius is zero and the curvature is
/// infinite.
pub fn gauss_kronecker(radii: &[f64]) -> Option<f64> {
    let prod: f64 = radii.iter().product();
    if prod == 0.0 || !prod.is_finite() {
        return None;
    }
    let k = 1.0 / prod;
    k.is_finite().then_some(k)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CurvatureEntry {
    pub direction: Vec<f64>,
    pub support: f64,
    pub radii: Vec<f64>,
    /// `None` flags infinite curvature.
    pub curvature: Option<f64>,
    pub infinite_curvature: bool,
    /// Every radius exceeds `RADIUS_FLOOR * H(u)`.
    pub positive: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CurvatureReport {
    pub dim: usize,
    pub p: f64,
    pub level: usize,
    pub entries: Vec<CurvatureEntry>,
    pub min_radius: f64,
    /// Minimum of `radius / H(u)` over the grid.
    pub min_relative_radius: f64,
    pub min_curvature: Option<f64>,
    pub max_curvature: Option<f64>,
    pub all_positive: bool,
}

impl CurvatureReport {
    pub fn directions(&self) -> Vec<Vec<f64>> {
        self.entries.iter().map(|e| e.direction.clone()).collect()
    }

    /// `(max - min) / max` of the curvature over the grid, `None` if some
    /// curvature is infinite.
    pub fn curvature_spread(&self) -> Option<f64> {
        let (lo, hi) = (self.min_curvature?, self.max_curvature?);
        Some((hi - lo) / hi.abs())
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }
}

/// Principal radii and Gauss-Kronecker curvature over a direction grid.
pub fn curvature_report(f: &SphericalDensity, p: f64, grid: &[Vec<f64>], level: usize) -> Result<CurvatureReport> {
    let entries = grid
        .par_iter()
        .map(|u| {
            let w = reverse_weingarten(f, p, u, level)?;
            let curvature = gauss_kronecker(&w.radii);
            let positive = w.radii.iter().all(|&r| r > RADIUS_FLOOR * w.support);
            Ok(CurvatureEntry {
                direction: w.u,
                support: w.support,
                radii: w.radii,
                curvature,
                infinite_curvature: curvature.is_none(),
                positive,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let radii = entries.iter().flat_map(|e| e.radii.iter().copied());
    let min_radius = radii.clone().fold(f64::INFINITY, f64::min);
    let min_relative_radius = entries
        .iter()
        .flat_map(|e| e.radii.iter().map(move |r| r / e.support))
        .fold(f64::INFINITY, f64::min);
    let finite: Option<Vec<f64>> = entries.iter().map(|e| e.curvature).collect();
    let (min_curvature, max_curvature) = match finite {
        Some(k) if !k.is_empty() => (
            Some(k.iter().copied().fold(f64::INFINITY, f64::min)),
            Some(k.iter().copied().fold(f64::NEG_INFINITY, f64::max)),
        ),
        _ => (None, None),
    };
    let all_positive = entries.iter().all(|e| e.positive);
    Ok(CurvatureReport {
        dim: f.dim(),
        p,
        level,
        entries,
        min_radius,
        min_relative_radius,
        min_curvature,
        max_curvature,
        all_positive,
    })
}

fn check_tangent(u: &[f64], x: &[f64]) -> Result<Vec<f64>> {
    if u.len() != x.len() {
        return Err(Error::DimensionMismatch { expected: u.len(), got: x.len() });
    }
    let u = unit(u)?;
    let ux = dot(&u, x);
    if ux.abs() > 1e-10 * crate::linalg::norm(x).max(1.0) {
        return Err(Error::NotOrthogonal(ux.abs()));
    }
    Ok(u)
}

/// `int_{S^{n-1} ∩ u^⊥} <xi, x>^2 f(xi) dxi` for `x` orthogonal to `u`.
pub fn lindquist_1(f: &SphericalDensity, u: &[f64], x: &[f64], level: usize) -> Result<f64> {
    check_point(f, u)?;
    f.require_function()?;
    check_tangent(u, x)?;
    let rule = build_subsphere_rule(u, level)?;
    Ok(rule.integrate(|xi| dot(xi, x).powi(2) * f.eval(xi)))
}

/// `int |<u, xi>|^{p-2} <x, xi>^2 f(xi) dxi` for unit `u`; needs `p > 1`.
pub fn lindquist_p(f: &SphericalDensity, p: f64, u: &[f64], x: &[f64], level: usize) -> Result<f64> {
    check_point(f, u)?;
    check_point(f, x)?;
    if !(p > 1.0) {
        return Err(Error::Precondition(format!("lindquist_p needs p > 1, got p = {p} (use lindquist_1)")));
    }
    let u = unit(u)?;
    Ok(weighted_moments(f, p - 2.0, &u, level, 1, |xi, _, o| o[0] = dot(xi, x).powi(2))?[0])
}

/// The criterion value at `(u, x)`: [`lindquist_1`] for `p = 1`, otherwise
/// [`lindquist_p`].
pub fn lindquist(f: &SphericalDensity, p: f64, u: &[f64], x: &[f64], level: usize) -> Result<f64> {
    if p == 1.0 {
        lindquist_1(f, u, x, level)
    } else {
        lindquist_p(f, p, u, x, level)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConvexityEntry {
    pub direction: Vec<f64>,
    /// Minimum of the criterion over the tangent eigen-directions.
    pub min_lindquist: f64,
    pub argmin: Vec<f64>,
    /// Smallest eigenvalue of the tangential Hessian of `H^p`, scaled to the
    /// criterion's normalization.
    pub hessian_eigenvalue: f64,
    /// Signs of the two numbers agree outside the tolerance band.
    pub agree: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConvexityReport {
    pub dim: usize,
    pub p: f64,
    pub level: usize,
    pub entries: Vec<ConvexityEntry>,
    pub min_lindquist: f64,
    pub disagreements: usize,
    pub convex: bool,
}

fn signs_agree(a: f64, b: f64) -> bool {
    if a.abs() < CONVEXITY_TOL || b.abs() < CONVEXITY_TOL {
        return true;
    }
    a.signum() == b.signum()
}

/// Convexity verdict for `H` over a direction grid. At each `u` the
/// criterion is evaluated along the eigenvectors of the tangential Hessian
/// of `H^p` (of `H` for `p = 1`) and compared against its smallest
/// eigenvalue.
pub fn convexity_check(f: &SphericalDensity, p: f64, grid: &[Vec<f64>], level: usize) -> Result<ConvexityReport> {
    if !(p >= 1.0) {
        return Err(Error::Precondition(format!("convexity needs p >= 1, got p = {p}")));
    }
    let entries = grid
        .par_iter()
        .map(|u| {
            check_point(f, u)?;
            let u = unit(u)?;
            let (hess, norm_factor) = if p == 1.0 {
                (hessian_h_p1(f, &u, level)?, 2.0)
            } else {
                (hessian_hp(f, p, &u, level)?, p * (p - 1.0))
            };
            let mut frame = householder_frame(&u)?;
            frame.pop();
            let eig = sym_eigen(&hess.congruence(&frame));
            let mut best = (f64::INFINITY, Vec::new());
            for coords in &eig.vectors {
                let x: Vec<f64> = (0..u.len()).map(|i| frame.iter().zip(coords).map(|(b, c)| c * b[i]).sum()).collect();
                let v = lindquist(f, p, &u, &x, level)?;
                if v < best.0 {
                    best = (v, x);
                }
            }
            let hessian_eigenvalue = eig.values[0] / norm_factor;
            Ok(ConvexityEntry {
                agree: signs_agree(best.0, hessian_eigenvalue),
                direction: u,
                min_lindquist: best.0,
                argmin: best.1,
                hessian_eigenvalue,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let min_lindquist = entries.iter().map(|e| e.min_lindquist).fold(f64::INFINITY, f64::min);
    Ok(ConvexityReport {
        dim: f.dim(),
        p,
        level,
        disagreements: entries.iter().filter(|e| !e.agree).count(),
        convex: min_lindquist >= -CONVEXITY_TOL,
        min_lindquist,
        entries,
    })
}

/// `grad H(u) = H^{1-p} grad H^p(u) / p`, the boundary point with outer
/// normal `u`.
pub fn boundary_point(f: &SphericalDensity, p: f64, u: &[f64], level: usize) -> Result<Vec<f64>> {
    check_point(f, u)?;
    let u = unit(u)?;
    let h = support_at(f, p, &u, level)?;
    let g = grad_hp(f, p, &u, level)?;
    let k = h.powf(1.0 - p) / p;
    Ok(g.iter().map(|c| k * c).collect())
}
