//! Quadrature on the unit sphere `S^{n-1}`, on great subspheres
//! `S^{n-1} ∩ x^⊥`, and along an axis `u` with the singular weight
//! `|<u, xi>|^q` folded into the weights.
//!
//! Every rule for `n >= 3` is a product of a one-dimensional rule in the
//! height `t = <u, xi>` and a rule on the equatorial `S^{n-2}`. The height
//! rule is a generalized Gauss rule for the weight `|t|^q (1 - t^2)^{(n-3)/2}`:
//! substituting `y = t^2` turns it into a Gauss-Jacobi rule on `[0, 1]`, so
//! `level` Jacobi nodes give `2 level` symmetric heights exact to polynomial
//! degree `4 level - 1`. With `q = 0` and `n = 3` this is plain
//! Gauss-Legendre.

use std::collections::HashMap;
use std::f64::consts::PI;
use std::sync::{Arc, Mutex, OnceLock};

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::linalg::{householder_frame, tridiagonal_eigen_first_row};
use crate::specfun::{gamma_fn, sphere_measure};

/// Dimension above which product rules are replaced by a quasi-random
/// antipodal point set with equal weights (reported degree 1).
pub const MAX_PRODUCT_DIM: usize = 6;

/// What a rule integrates over.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Carrier {
    /// All of `S^{n-1}`.
    Sphere,
    /// The great subsphere `S^{n-1} ∩ x^⊥`.
    Subsphere,
    /// `S^{n-1}` against the weight `|<u, xi>|^q`.
    Weighted { q: f64 },
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct QuadratureRule {
    dim: usize,
    nodes: Vec<f64>,
    weights: Vec<f64>,
    degree: usize,
    carrier: Carrier,
}

impl QuadratureRule {
    pub(crate) fn custom(dim: usize, nodes: Vec<f64>, weights: Vec<f64>) -> Self {
        QuadratureRule { dim, nodes, weights, degree: 0, carrier: Carrier::Sphere }
    }

    /// Ambient dimension `n`.
    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.weights.len()
    }

    pub fn is_empty(&self) -> bool {
        self.weights.is_empty()
    }

    /// Largest polynomial degree integrated exactly.
    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn carrier(&self) -> Carrier {
        self.carrier
    }

    pub fn node(&self, i: usize) -> &[f64] {
        &self.nodes[i * self.dim..(i + 1) * self.dim]
    }

    pub fn nodes(&self) -> impl Iterator<Item = &[f64]> + '_ {
        self.nodes.chunks_exact(self.dim)
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn weight_sum(&self) -> f64 {
        pairwise_sum(&self.weights)
    }

    /// `sum_i w_i g(xi_i)`, reduced pairwise in node order. `g` may be
    /// evaluated concurrently; the reduction order never changes.
    pub fn integrate<G>(&self, g: G) -> f64
    where
        G: Fn(&[f64]) -> f64 + Sync,
    {
        let terms: Vec<f64> = if self.len() >= PARALLEL_THRESHOLD {
            self.nodes
                .par_chunks_exact(self.dim)
                .zip(self.weights.par_iter())
                .map(|(xi, w)| w * g(xi))
                .collect()
        } else {
            self.nodes().zip(&self.weights).map(|(xi, w)| w * g(xi)).collect()
        };
        pairwise_sum(&terms)
    }

    /// Like [`Self::integrate`] with the node index passed to `g`, for
    /// integrands tabulated per node.
    pub fn integrate_indexed<G>(&self, g: G) -> f64
    where
        G: Fn(usize, &[f64]) -> f64 + Sync,
    {
        let terms: Vec<f64> = self.nodes().enumerate().zip(&self.weights).map(|((i, xi), w)| w * g(i, xi)).collect();
        pairwise_sum(&terms)
    }

    /// Integrates several functions of the same node at once; `g` receives
    /// the node index and writes one value per output slot.
    pub fn integrate_many<G>(&self, outputs: usize, g: G) -> Vec<f64>
    where
        G: Fn(usize, &[f64], &mut [f64]) + Sync,
    {
        let eval = |((i, xi), w): ((usize, &[f64]), &f64)| {
            let mut buf = vec![0.0; outputs];
            g(i, xi, &mut buf);
            buf.iter_mut().for_each(|b| *b *= w);
            buf
        };
        let rows: Vec<Vec<f64>> = if self.len() >= PARALLEL_THRESHOLD {
            self.nodes.par_chunks_exact(self.dim).enumerate().zip(self.weights.par_iter()).map(eval).collect()
        } else {
            self.nodes().enumerate().zip(&self.weights).map(eval).collect()
        };
        (0..outputs)
            .map(|k| pairwise_sum(&rows.iter().map(|r| r[k]).collect::<Vec<_>>()))
            .collect()
    }
}

const PARALLEL_THRESHOLD: usize = 4096;

/// Free-function form of [`QuadratureRule::integrate`].
pub fn integrate<G>(rule: &QuadratureRule, g: G) -> f64
where
    G: Fn(&[f64]) -> f64 + Sync,
{
    rule.integrate(g)
}

/// Pairwise (cascade) summation in slice order.
pub fn pairwise_sum(xs: &[f64]) -> f64 {
    if xs.len() <= 16 {
        return xs.iter().sum();
    }
    let mid = xs.len() / 2;
    pairwise_sum(&xs[..mid]) + pairwise_sum(&xs[mid..])
}

/// Gauss-Jacobi rule for `int_0^1 (1-y)^a y^b phi(y) dy` via Golub-Welsch.
pub fn gauss_jacobi_unit(count: usize, a: f64, b: f64) -> Result<(Vec<f64>, Vec<f64>)> {
    if count == 0 {
        return Err(Error::InvalidLevel(0));
    }
    if !(a > -1.0 && b > -1.0) {
        return Err(Error::Precondition(format!("Jacobi exponents must exceed -1, got ({a}, {b})")));
    }
    // Monic Jacobi recurrence on [-1, 1] with weight (1-x)^a (1+x)^b.
    let s = a + b;
    let diag: Vec<f64> = (0..count)
        .map(|k| {
            if k == 0 {
                (b - a) / (s + 2.0)
            } else {
                let k = k as f64;
                (b * b - a * a) / ((2.0 * k + s) * (2.0 * k + s + 2.0))
            }
        })
        .collect();
    let off: Vec<f64> = (1..count)
        .map(|k| {
            let kf = k as f64;
            let sq = if k == 1 {
                4.0 * (1.0 + a) * (1.0 + b) / ((2.0 + s).powi(2) * (3.0 + s))
            } else {
                4.0 * kf * (kf + a) * (kf + b) * (kf + s)
                    / ((2.0 * kf + s).powi(2) * (2.0 * kf + s + 1.0) * (2.0 * kf + s - 1.0))
            };
            sq.sqrt()
        })
        .collect();
    let (x, z) = tridiagonal_eigen_first_row(&diag, &off);
    let mass = gamma_fn(a + 1.0)? * gamma_fn(b + 1.0)? / gamma_fn(a + b + 2.0)?;
    let nodes = x.iter().map(|x| 0.5 * (1.0 + x)).collect();
    let weights = z.iter().map(|z| mass * z * z).collect();
    Ok((nodes, weights))
}

/// Symmetric rule on `[-1, 1]` for the weight `|t|^q (1 - t^2)^a`, with
/// `2 count` nodes in ascending order, exact to degree `4 count - 1`.
fn height_rule(count: usize, q: f64, a: f64) -> Result<(Vec<f64>, Vec<f64>)> {
    let (y, w) = gauss_jacobi_unit(count, a, (q - 1.0) / 2.0)?;
    let mut t = Vec::with_capacity(2 * count);
    let mut wt = Vec::with_capacity(2 * count);
    for k in (0..count).rev() {
        t.push(-y[k].sqrt());
        wt.push(0.5 * w[k]);
    }
    for k in 0..count {
        t.push(y[k].sqrt());
        wt.push(0.5 * w[k]);
    }
    Ok((t, wt))
}

/// A rule in local coordinates: the axis is the last coordinate.
#[derive(Debug)]
struct Reference {
    dim: usize,
    nodes: Vec<f64>,
    weights: Vec<f64>,
    degree: usize,
}

fn circle(points: usize) -> Reference {
    let step = 2.0 * PI / points as f64;
    let mut nodes = Vec::with_capacity(2 * points);
    for j in 0..points {
        let theta = j as f64 * step;
        nodes.push(theta.cos());
        nodes.push(theta.sin());
    }
    Reference { dim: 2, nodes, weights: vec![step; points], degree: points - 1 }
}

fn zero_sphere() -> Reference {
    Reference { dim: 1, nodes: vec![-1.0, 1.0], weights: vec![1.0, 1.0], degree: usize::MAX }
}

/// Rule for `S^{m-1}` used as the equatorial factor of a product rule.
fn equator(m: usize, level: usize) -> Result<Arc<Reference>> {
    match m {
        1 => Ok(Arc::new(zero_sphere())),
        2 => Ok(Arc::new(circle(4 * level))),
        _ => reference_sphere(m, level),
    }
}

fn product(heights: &(Vec<f64>, Vec<f64>), eq: &Reference, degree: usize) -> Reference {
    let dim = eq.dim + 1;
    let count = heights.0.len() * eq.weights.len();
    let mut nodes = Vec::with_capacity(count * dim);
    let mut weights = Vec::with_capacity(count);
    for (t, wt) in heights.0.iter().zip(&heights.1) {
        let s = (1.0 - t * t).max(0.0).sqrt();
        for (omega, wo) in eq.nodes.chunks_exact(eq.dim).zip(&eq.weights) {
            nodes.extend(omega.iter().map(|c| s * c));
            nodes.push(*t);
            weights.push(wt * wo);
        }
    }
    Reference { dim, nodes, weights, degree: degree.min(eq.degree) }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
enum Key {
    Sphere(usize, usize),
    Axis(usize, usize, u64),
}

fn cache() -> &'static Mutex<HashMap<Key, Arc<Reference>>> {
    static CACHE: OnceLock<Mutex<HashMap<Key, Arc<Reference>>>> = OnceLock::new();
    CACHE.get_or_init(|| Mutex::new(HashMap::new()))
}

fn cached(key: Key, build: impl FnOnce() -> Result<Reference>) -> Result<Arc<Reference>> {
    if let Some(r) = cache().lock().expect("rule cache poisoned").get(&key) {
        return Ok(r.clone());
    }
    let r = Arc::new(build()?);
    cache().lock().expect("rule cache poisoned").insert(key, r.clone());
    Ok(r)
}

fn reference_sphere(n: usize, level: usize) -> Result<Arc<Reference>> {
    cached(Key::Sphere(n, level), || {
        if n == 2 {
            return Ok(circle(2 * level));
        }
        if n > MAX_PRODUCT_DIM {
            return Ok(quasi_random_sphere(n, level));
        }
        let heights = height_rule(level, 0.0, (n as f64 - 3.0) / 2.0)?;
        let eq = equator(n - 1, level)?;
        Ok(product(&heights, &eq, 4 * level - 1))
    })
}

fn reference_axis(n: usize, q: f64, level: usize) -> Result<Arc<Reference>> {
    cached(Key::Axis(n, level, q.to_bits()), || {
        let heights = height_rule(level, q, (n as f64 - 3.0) / 2.0)?;
        let eq = equator(n - 1, level.max(1))?;
        Ok(product(&heights, &eq, 4 * level - 1))
    })
}

/// Antipodal Halton points with equal weights. Only exact for constants and
/// odd functions, which is why it is reserved for `n > MAX_PRODUCT_DIM`.
fn quasi_random_sphere(n: usize, level: usize) -> Reference {
    const PRIMES: [u64; 16] = [2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47, 53];
    let target = 2 * level.pow(3).max(64);
    let halton = |mut i: u64, base: u64| {
        let (mut f, mut r) = (1.0, 0.0);
        while i > 0 {
            f /= base as f64;
            r += f * (i % base) as f64;
            i /= base;
        }
        r
    };
    let mut nodes = Vec::new();
    let mut i = 1u64;
    while nodes.len() / n < target {
        let p: Vec<f64> = (0..n).map(|k| 2.0 * halton(i, PRIMES[k % PRIMES.len()]) - 1.0).collect();
        i += 1;
        let r = p.iter().map(|c| c * c).sum::<f64>().sqrt();
        if !(0.1..=1.0).contains(&r) {
            continue;
        }
        nodes.extend(p.iter().map(|c| c / r));
        nodes.extend(p.iter().map(|c| -c / r));
    }
    let count = nodes.len() / n;
    let w = sphere_measure(n) / count as f64;
    Reference { dim: n, nodes, weights: vec![w; count], degree: 1 }
}

fn check(n: usize, level: usize) -> Result<()> {
    if n < 2 {
        return Err(Error::InvalidDimension(n));
    }
    if level == 0 {
        return Err(Error::InvalidLevel(level));
    }
    Ok(())
}

/// Places a reference rule (axis = last local coordinate) into `R^n` using
/// `frame`, whose first vectors span the equatorial directions.
fn embed(reference: &Reference, frame: &[Vec<f64>], carrier: Carrier) -> QuadratureRule {
    let n = frame[0].len();
    let mut nodes = Vec::with_capacity(reference.weights.len() * n);
    for local in reference.nodes.chunks_exact(reference.dim) {
        let mut xi = vec![0.0; n];
        for (c, b) in local.iter().zip(frame) {
            for (x, bk) in xi.iter_mut().zip(b) {
                *x += c * bk;
            }
        }
        nodes.extend(xi);
    }
    QuadratureRule { dim: n, nodes, weights: reference.weights.clone(), degree: reference.degree, carrier }
}

/// Rule on `S^{n-1}`. For `n = 2`: `2 level` equally spaced angles with
/// weight `pi / level`. For `n >= 3`: height rule times an equatorial rule,
/// exact to degree `4 level - 1`.
pub fn build_sphere_rule(n: usize, level: usize) -> Result<QuadratureRule> {
    check(n, level)?;
    let reference = reference_sphere(n, level)?;
    Ok(QuadratureRule {
        dim: n,
        nodes: reference.nodes.clone(),
        weights: reference.weights.clone(),
        degree: reference.degree,
        carrier: Carrier::Sphere,
    })
}

/// Rule on `S^{n-1} ∩ x^⊥`, embedded through the Householder frame of `x`.
/// For `n = 2` the carrier is the pair of unit vectors orthogonal to `x`,
/// each with weight 1.
pub fn build_subsphere_rule(x: &[f64], level: usize) -> Result<QuadratureRule> {
    check(x.len(), level)?;
    let frame = householder_frame(x)?;
    let n = x.len();
    let reference = equator(n - 1, level)?;
    Ok(embed(&reference, &frame[..n - 1], Carrier::Subsphere))
}

/// Rule for `int |<u, xi>|^q g(xi) dxi` with the factor `|<u, xi>|^q` already
/// included in the weights. Requires `q > -1`.
pub fn build_weighted_axis_rule(u: &[f64], q: f64, level: usize) -> Result<QuadratureRule> {
    check(u.len(), level)?;
    if !(q > -1.0) || !q.is_finite() {
        return Err(Error::Precondition(format!("axis weight exponent must satisfy q > -1, got {q}")));
    }
    let frame = householder_frame(u)?;
    let reference = reference_axis(u.len(), q, level)?;
    Ok(embed(&reference, &frame, Carrier::Weighted { q }))
}
