//! Closed-form partial derivatives of `H^p = T_p f` and a finite-difference
//! engine used to check them.
//!
//! For odd `p = 2k + 1` the derivatives of order `2k + 2` collapse onto the
//! great subsphere `x^⊥`; for `|alpha|` even and below `p + 1` they are again
//! `L^p`-cosine-type integrals with exponent `p - |alpha|`, scaled by
//! `(-1)^{|alpha|/2} C_p / C_{p-|alpha|}`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{norm, Matrix};
use crate::specfun::{c_const, is_even_integer};
use crate::squad::build_subsphere_rule;
use crate::transforms::{check_point, lp_cosine, weighted_moments, DensityKind, SphericalDensity, TransformSpec};

/// Exponents `(alpha_1, ..., alpha_n)` of a partial derivative `D^alpha`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct MultiIndex(Vec<u32>);

impl MultiIndex {
    pub fn new(entries: Vec<u32>) -> Self {
        MultiIndex(entries)
    }

    /// `e_i + e_j` in dimension `n`.
    pub fn pair(n: usize, i: usize, j: usize) -> Self {
        let mut a = vec![0; n];
        a[i] += 1;
        a[j] += 1;
        MultiIndex(a)
    }

    pub fn entries(&self) -> &[u32] {
        &self.0
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    /// `|alpha|`
    pub fn order(&self) -> u32 {
        self.0.iter().sum()
    }

    /// `xi^alpha`
    pub fn monomial(&self, xi: &[f64]) -> f64 {
        xi.iter().zip(&self.0).map(|(x, &a)| x.powi(a as i32)).product()
    }

    /// All multi-indices of dimension `n` and total order `order`.
    pub fn all_of_order(n: usize, order: u32) -> Vec<MultiIndex> {
        fn rec(n: usize, left: u32, prefix: &mut Vec<u32>, out: &mut Vec<MultiIndex>) {
            if prefix.len() + 1 == n {
                prefix.push(left);
                out.push(MultiIndex(prefix.clone()));
                prefix.pop();
                return;
            }
            for a in (0..=left).rev() {
                prefix.push(a);
                rec(n, left - a, prefix, out);
                prefix.pop();
            }
        }
        let mut out = Vec::new();
        rec(n, order, &mut Vec::new(), &mut out);
        out
    }
}

impl std::str::FromStr for MultiIndex {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        s.split(',')
            .map(|t| t.trim().parse::<u32>().map_err(|e| Error::Precondition(format!("bad multi-index '{s}': {e}"))))
            .collect::<Result<Vec<_>>>()
            .map(MultiIndex)
    }
}

fn check_alpha(f: &SphericalDensity, alpha: &MultiIndex) -> Result<()> {
    if alpha.dim() != f.dim() {
        return Err(Error::DimensionMismatch { expected: f.dim(), got: alpha.dim() });
    }
    Ok(())
}

fn check_nonzero(x: &[f64]) -> Result<f64> {
    let r = norm(x);
    if r == 0.0 {
        return Err(Error::ZeroVector);
    }
    Ok(r)
}

/// `D^alpha T_{2k+1} f (x)` for `|alpha| = 2k + 2`:
/// `C_{2k+1} (-1)^{k+1} / |x| * int_{S^{n-1} ∩ x^⊥} xi^alpha f(xi) dxi`.
pub fn analytic_deriv_odd(f: &SphericalDensity, k: u32, alpha: &MultiIndex, x: &[f64], level: usize) -> Result<f64> {
    check_point(f, x)?;
    check_alpha(f, alpha)?;
    f.require_function()?;
    if alpha.order() != 2 * k + 2 {
        return Err(Error::Precondition(format!(
            "the odd-exponent formula needs |alpha| = 2k + 2 = {}, got |alpha| = {}",
            2 * k + 2,
            alpha.order()
        )));
    }
    let r = check_nonzero(x)?;
    let coef = odd_coefficient(k)?;
    let rule = build_subsphere_rule(x, level)?;
    Ok(coef / r * rule.integrate(|xi| alpha.monomial(xi) * f.eval(xi)))
}

/// `C_{2k+1} (-1)^{k+1}`; equals 2 for `k = 0` and 12 for `k = 1`.
pub fn odd_coefficient(k: u32) -> Result<f64> {
    let sign = if k.is_multiple_of(2) { -1.0 } else { 1.0 };
    Ok(sign * c_const(2.0 * k as f64 + 1.0)?)
}

/// `(-1)^{|alpha|/2} C_p / C_{p - |alpha|}`.
pub fn frac_coefficient(p: f64, order: u32) -> Result<f64> {
    let sign = if (order / 2).is_multiple_of(2) { 1.0 } else { -1.0 };
    Ok(sign * c_const(p)? / c_const(p - order as f64)?)
}

/// `D^alpha T_p f (x)` for `p > 1` not an even integer and `|alpha|` even
/// with `2 <= |alpha| < p + 1`.
pub fn analytic_deriv_frac(f: &SphericalDensity, p: f64, alpha: &MultiIndex, x: &[f64], level: usize) -> Result<f64> {
    check_point(f, x)?;
    check_alpha(f, alpha)?;
    if !(p > 1.0) {
        return Err(Error::Precondition(format!("the fractional formula needs p > 1, got p = {p}")));
    }
    if is_even_integer(p) {
        return Err(Error::Precondition(format!("the fractional formula needs p not an even integer, got p = {p}")));
    }
    let order = alpha.order();
    if order == 0 || !order.is_multiple_of(2) {
        return Err(Error::Precondition(format!("the fractional formula needs |alpha| even and positive, got {order}")));
    }
    let q = p - order as f64;
    if (q + 1.0).abs() < 1e-12 {
        return Err(Error::Precondition(format!(
            "|alpha| = p + 1 = {order}: use the odd-exponent formula (analytic_deriv_odd with k = {})",
            (order - 2) / 2
        )));
    }
    if !(q > -1.0) {
        return Err(Error::Precondition(format!("the fractional formula needs |alpha| < p + 1, got |alpha| = {order}, p = {p}")));
    }
    let r = check_nonzero(x)?;
    let coef = frac_coefficient(p, order)?;
    let integral = weighted_moments(f, q, x, level, 1, |xi, _, o| o[0] = alpha.monomial(xi))?[0];
    Ok(coef * r.powf(q) * integral)
}

/// Densities integrated by axis rules, whose nodes never lie on `x^⊥`.
fn smooth_route(f: &SphericalDensity) -> bool {
    matches!(f.kind(), DensityKind::Preset(_) | DensityKind::Rotated { .. })
}

/// `grad H^p (u)`, component `i` equal to
/// `p int |<u,xi>|^{p-1} sgn<u,xi> xi_i f(xi) dxi`.
pub fn grad_hp(f: &SphericalDensity, p: f64, u: &[f64], level: usize) -> Result<Vec<f64>> {
    check_point(f, u)?;
    if !(p >= 1.0) {
        return Err(Error::Precondition(format!("the gradient formula needs p >= 1, got p = {p}")));
    }
    let r = check_nonzero(u)?;
    let n = f.dim();
    let moments = if smooth_route(f) {
        // sgn(t)|t|^{p-1} xi_i = |t|^p (xi_i / t): the quotient pairs the
        // nodes at ±t into a smooth function of t^2.
        weighted_moments(f, p, u, level, n, |xi, t, o| {
            for (oi, x) in o.iter_mut().zip(xi) {
                *oi = x / t;
            }
        })?
    } else {
        weighted_moments(f, p - 1.0, u, level, n, |xi, t, o| {
            let s = if t > 0.0 { 1.0 } else if t < 0.0 { -1.0 } else { 0.0 };
            for (oi, x) in o.iter_mut().zip(xi) {
                *oi = s * x;
            }
        })?
    };
    Ok(moments.iter().map(|m| p * r.powf(p - 1.0) * m).collect())
}

/// Upper-triangle entries of `int |t|^q xi_i xi_j f`, returned as a matrix.
fn second_moments(f: &SphericalDensity, q: f64, u: &[f64], level: usize) -> Result<Matrix> {
    let n = f.dim();
    let pairs: Vec<(usize, usize)> = (0..n).flat_map(|i| (i..n).map(move |j| (i, j))).collect();
    let m = weighted_moments(f, q, u, level, pairs.len(), |xi, _, o| {
        for (slot, &(i, j)) in o.iter_mut().zip(&pairs) {
            *slot = xi[i] * xi[j];
        }
    })?;
    let mut out = Matrix::zeros(n);
    for (&(i, j), v) in pairs.iter().zip(m) {
        out[(i, j)] = v;
        out[(j, i)] = v;
    }
    Ok(out)
}

/// Hessian of `H^p` at `u`: entry `(i, j)` is
/// `p (p - 1) int |<u, xi>|^{p-2} xi_i xi_j f(xi) dxi`. Needs `p > 1`.
pub fn hessian_hp(f: &SphericalDensity, p: f64, u: &[f64], level: usize) -> Result<Matrix> {
    check_point(f, u)?;
    if !(p > 1.0) {
        return Err(Error::Precondition(format!(
            "the Hessian of H^p needs p > 1, got p = {p} (use hessian_h_p1 for p = 1)"
        )));
    }
    let r = check_nonzero(u)?;
    let m = second_moments(f, p - 2.0, u, level)?;
    let k = p * (p - 1.0) * r.powf(p - 2.0);
    Ok(Matrix::from_fn(f.dim(), |i, j| k * m[(i, j)]))
}

/// Hessian of `H = T f` (`p = 1`) at `u`, entry `(i, j)` equal to
/// `2 / |u| int_{S^{n-1} ∩ u^⊥} xi_i xi_j f(xi) dxi`.
pub fn hessian_h_p1(f: &SphericalDensity, u: &[f64], level: usize) -> Result<Matrix> {
    check_point(f, u)?;
    f.require_function()?;
    let r = check_nonzero(u)?;
    let n = f.dim();
    let coef = odd_coefficient(0)? / r;
    let rule = build_subsphere_rule(u, level)?;
    let pairs: Vec<(usize, usize)> = (0..n).flat_map(|i| (i..n).map(move |j| (i, j))).collect();
    let m = rule.integrate_many(pairs.len(), |_, xi, o| {
        let fx = f.eval(xi);
        for (slot, &(i, j)) in o.iter_mut().zip(&pairs) {
            *slot = xi[i] * xi[j] * fx;
        }
    });
    let mut out = Matrix::zeros(n);
    for (&(i, j), v) in pairs.iter().zip(m) {
        out[(i, j)] = coef * v;
        out[(j, i)] = coef * v;
    }
    Ok(out)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Method {
    Analytic,
    FiniteDifference,
}

/// Derivatives of `H^p` and `H` at one point.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HessianReport {
    pub point: Vec<f64>,
    pub p: f64,
    pub hp: f64,
    pub gradient_hp: Vec<f64>,
    pub hessian_hp: Matrix,
    pub hessian_h: Matrix,
    pub method: Method,
}

impl HessianReport {
    /// `|<grad H^p(u), u> - p H^p(u)| / |p H^p(u)|`.
    pub fn euler_residual(&self) -> f64 {
        let lhs = crate::linalg::dot(&self.gradient_hp, &self.point);
        (lhs - self.p * self.hp).abs() / (self.p * self.hp).abs()
    }
}

/// Hessian of `H = (H^p)^{1/p}` from the derivatives of `H^p`:
/// `(1 / (p H^{p-1})) [D^2 H^p - ((p-1)/p) (1/H^p) grad H^p grad H^p^T]`.
pub fn hessian_h_from_parts(p: f64, hp: f64, grad: &[f64], hess: &Matrix) -> Result<Matrix> {
    if !(hp > 0.0) {
        return Err(Error::Domain(format!("H^p = {hp:e} must be positive to differentiate H")));
    }
    let h = hp.powf(1.0 / p);
    let lead = 1.0 / (p * h.powf(p - 1.0));
    let k = (p - 1.0) / p / hp;
    Ok(Matrix::from_fn(hess.dim(), |i, j| lead * (hess[(i, j)] - k * grad[i] * grad[j])))
}

/// Hessian of the support function `H = (T_p f)^{1/p}` at `u`. For `p = 1`
/// this is [`hessian_h_p1`].
pub fn hessian_h(f: &SphericalDensity, p: f64, u: &[f64], level: usize) -> Result<Matrix> {
    Ok(hessian_report(f, p, u, level)?.hessian_h)
}

/// All first and second derivatives of `H^p` and `H` at `u`, analytically.
pub fn hessian_report(f: &SphericalDensity, p: f64, u: &[f64], level: usize) -> Result<HessianReport> {
    check_point(f, u)?;
    check_nonzero(u)?;
    let spec = TransformSpec::new(p, f.dim(), level)?;
    let hp = lp_cosine(f, &spec, u)?;
    let gradient_hp = grad_hp(f, p, u, level)?;
    let (hessian_hp, hessian_h) = if p == 1.0 {
        let h1 = hessian_h_p1(f, u, level)?;
        if !(hp > 0.0) {
            return Err(Error::Domain(format!("H(u) = {hp:e} must be positive")));
        }
        (h1.clone(), h1)
    } else {
        let hess = hessian_hp(f, p, u, level)?;
        let hh = hessian_h_from_parts(p, hp, &gradient_hp, &hess)?;
        (hess, hh)
    };
    Ok(HessianReport { point: u.to_vec(), p, hp, gradient_hp, hessian_hp, hessian_h, method: Method::Analytic })
}

/// The same report with every derivative taken by finite differences of
/// `lp_cosine`.
pub fn hessian_report_fd(f: &SphericalDensity, p: f64, u: &[f64], level: usize) -> Result<HessianReport> {
    check_point(f, u)?;
    check_nonzero(u)?;
    let spec = TransformSpec::new(p, f.dim(), level)?;
    let n = f.dim();
    let field = |x: &[f64]| lp_cosine(f, &spec, x);
    let hp = field(u)?;
    let mut gradient_hp = vec![0.0; n];
    for (i, g) in gradient_hp.iter_mut().enumerate() {
        let mut a = vec![0; n];
        a[i] = 1;
        *g = finite_diff(&field, &MultiIndex(a), u, None)?;
    }
    let mut hessian_hp = Matrix::zeros(n);
    for i in 0..n {
        for j in i..n {
            let v = finite_diff(&field, &MultiIndex::pair(n, i, j), u, None)?;
            hessian_hp[(i, j)] = v;
            hessian_hp[(j, i)] = v;
        }
    }
    let hessian_h = if p == 1.0 { hessian_hp.clone() } else { hessian_h_from_parts(p, hp, &gradient_hp, &hessian_hp)? };
    Ok(HessianReport { point: u.to_vec(), p, hp, gradient_hp, hessian_hp, hessian_h, method: Method::FiniteDifference })
}

/// Largest derivative order the finite-difference engine accepts.
pub const MAX_FD_ORDER: u32 = 4;

/// Default step `eps^{1/(|alpha|+2)} max(1, |x|)`.
pub fn default_step(order: u32, x: &[f64]) -> f64 {
    f64::EPSILON.powf(1.0 / (order as f64 + 2.0)) * norm(x).max(1.0)
}

fn binomial(m: u32, j: u32) -> f64 {
    (0..j).fold(1.0, |acc, i| acc * (m - i) as f64 / (i + 1) as f64)
}

/// Tensor-product central difference `D^alpha fn(x)` with step `h`.
fn central<F>(field: &F, alpha: &MultiIndex, x: &[f64], h: f64) -> Result<f64>
where
    F: Fn(&[f64]) -> Result<f64>,
{
    // Each coordinate k contributes offsets (m/2 - j) h with weights
    // (-1)^j C(m, j); the stencil is their Cartesian product.
    let mut stencil: Vec<(Vec<f64>, f64)> = vec![(x.to_vec(), 1.0)];
    for (k, &m) in alpha.entries().iter().enumerate() {
        if m == 0 {
            continue;
        }
        let mut next = Vec::with_capacity(stencil.len() * (m as usize + 1));
        for (point, w) in &stencil {
            for j in 0..=m {
                let mut p = point.clone();
                p[k] += (m as f64 / 2.0 - j as f64) * h;
                let sign = if j % 2 == 0 { 1.0 } else { -1.0 };
                next.push((p, w * sign * binomial(m, j)));
            }
        }
        stencil = next;
    }
    let mut total = 0.0;
    for (p, w) in &stencil {
        total += w * field(p)?;
    }
    Ok(total / h.powi(alpha.order() as i32))
}

/// Central-difference estimate of `D^alpha fn(x)` with one Richardson step
/// combining `h` and `h/2`. `h = None` uses [`default_step`].
pub fn finite_diff<F>(field: &F, alpha: &MultiIndex, x: &[f64], h: Option<f64>) -> Result<f64>
where
    F: Fn(&[f64]) -> Result<f64>,
{
    if alpha.dim() != x.len() {
        return Err(Error::DimensionMismatch { expected: x.len(), got: alpha.dim() });
    }
    let order = alpha.order();
    if order > MAX_FD_ORDER {
        return Err(Error::Precondition(format!("finite differences support |alpha| <= {MAX_FD_ORDER}, got {order}")));
    }
    if order == 0 {
        return field(x);
    }
    let h = h.unwrap_or_else(|| default_step(order, x));
    let half = h / 2.0;
    let scale = x.iter().fold(0.0f64, |m, c| m.max(c.abs()));
    if !(half > 0.0) || !h.is_finite() || scale + half / 2.0 == scale {
        return Err(Error::StepUnderflow(h));
    }
    let coarse = central(field, alpha, x, h)?;
    let fine = central(field, alpha, x, half)?;
    Ok((4.0 * fine - coarse) / 3.0)
}
