//! Self-check suites: closed-form derivatives against finite differences,
//! the Radon/cosine inversion relation against one-dimensional multiplier
//! values, and convexity verdicts against Hessian eigenvalues.

use std::f64::consts::PI;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::convexity::{convexity_check, curvature_report, direction_grid, random_unit};
use crate::deriv::{analytic_deriv_frac, analytic_deriv_odd, finite_diff, grad_hp, MultiIndex};
use crate::error::{Error, Result};
use crate::harmonics::inversion_ratio_check;
use crate::specfun::is_even_integer;
use crate::transforms::{lp_cosine, SphericalDensity, TransformSpec};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Suite {
    Derivatives,
    Inversion,
    Convexity,
    All,
}

impl std::str::FromStr for Suite {
    type Err = Error;
    fn from_str(s: &str) -> Result<Suite> {
        match s {
            "derivatives" => Ok(Suite::Derivatives),
            "inversion" => Ok(Suite::Inversion),
            "convexity" => Ok(Suite::Convexity),
            "all" => Ok(Suite::All),
            other => Err(Error::Precondition(format!(
                "unknown suite '{other}' (expected derivatives, inversion, convexity or all)"
            ))),
        }
    }
}

/// One comparison. Checks without a tolerance are informational.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Check {
    pub suite: Suite,
    pub name: String,
    pub value: f64,
    pub tolerance: Option<f64>,
    pub passed: bool,
}

impl Check {
    fn below(suite: Suite, name: impl Into<String>, value: f64, tolerance: f64) -> Check {
        Check { suite, name: name.into(), value, tolerance: Some(tolerance), passed: value < tolerance }
    }

    fn flag(suite: Suite, name: impl Into<String>, value: f64, passed: bool) -> Check {
        Check { suite, name: name.into(), value, tolerance: None, passed }
    }

    fn info(suite: Suite, name: impl Into<String>, value: f64) -> Check {
        Check { suite, name: name.into(), value, tolerance: None, passed: true }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VerifyReport {
    pub suite: Suite,
    pub checks: Vec<Check>,
    pub failures: usize,
}

impl VerifyReport {
    pub fn passed(&self) -> bool {
        self.failures == 0
    }
}

/// Inputs shared by the suites. `density` and `p` fall back to per-suite
/// defaults when absent.
#[derive(Debug, Clone)]
pub struct VerifyOptions {
    pub dim: usize,
    pub density: Option<SphericalDensity>,
    pub p: Option<f64>,
    pub level: usize,
    pub grid: usize,
    pub points: usize,
    pub seed: u64,
}

impl Default for VerifyOptions {
    fn default() -> Self {
        VerifyOptions { dim: 3, density: None, p: None, level: 32, grid: 200, points: 5, seed: 0 }
    }
}

impl VerifyOptions {
    fn density_or(&self, name: &str) -> Result<SphericalDensity> {
        match &self.density {
            Some(d) => Ok(d.clone()),
            None => SphericalDensity::named(name, self.dim),
        }
    }
}

pub const FD_TOL_ORDER2_ODD: f64 = 1e-3;
pub const FD_TOL_ORDER2: f64 = 1e-4;
pub const FD_TOL_ORDER4: f64 = 5e-3;
pub const EULER_TOL: f64 = 1e-10;
pub const INVERSION_TOL: f64 = 1e-6;

/// Random evaluation points with norms in `[0.5, 2]`.
pub fn sample_points(n: usize, count: usize, seed: u64) -> Vec<Vec<f64>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count)
        .map(|_| {
            let r = rng.gen_range(0.5..2.0);
            random_unit(n, &mut rng).into_iter().map(|c| r * c).collect()
        })
        .collect()
}

/// Largest entry-wise deviation over all multi-indices of one order,
/// relative to the largest analytic entry at that point.
pub fn tensor_mismatch<A, F>(n: usize, order: u32, analytic: A, field: &F, x: &[f64]) -> Result<f64>
where
    A: Fn(&MultiIndex) -> Result<f64>,
    F: Fn(&[f64]) -> Result<f64>,
{
    let mut worst: f64 = 0.0;
    let mut scale: f64 = 0.0;
    for alpha in MultiIndex::all_of_order(n, order) {
        let a = analytic(&alpha)?;
        let fd = finite_diff(field, &alpha, x, None)?;
        worst = worst.max((a - fd).abs());
        scale = scale.max(a.abs());
    }
    Ok(worst / scale.max(f64::MIN_POSITIVE))
}

fn derivative_checks(opts: &VerifyOptions, p: f64) -> Result<Vec<Check>> {
    let s = Suite::Derivatives;
    let n = opts.dim;
    let f = opts.density_or("watson")?;
    let spec = TransformSpec::new(p, n, opts.level)?;
    let field = |x: &[f64]| lp_cosine(&f, &spec, x);
    let pts = sample_points(n, opts.points, opts.seed);
    let mut checks = Vec::new();

    let mut euler: f64 = 0.0;
    let mut grad_fd: f64 = 0.0;
    for x in &pts {
        let g = grad_hp(&f, p, x, opts.level)?;
        let hp = field(x)?;
        let lhs: f64 = g.iter().zip(x).map(|(a, b)| a * b).sum();
        euler = euler.max((lhs - p * hp).abs() / (p * hp).abs());
        grad_fd = grad_fd.max(tensor_mismatch(n, 1, |a| Ok(g[a.entries().iter().position(|&e| e == 1).unwrap()]), &field, x)?);
    }
    checks.push(Check::below(s, format!("p={p} euler identity <grad H^p, x> = p H^p"), euler, EULER_TOL));
    checks.push(Check::below(s, format!("p={p} gradient vs finite differences"), grad_fd, FD_TOL_ORDER2));

    let odd_k = if p.fract() == 0.0 && (p as u32) % 2 == 1 && p <= 3.0 { Some((p as u32 - 1) / 2) } else { None };
    if let Some(k) = odd_k {
        let order = 2 * k + 2;
        let tol = if order == 2 { FD_TOL_ORDER2_ODD } else { FD_TOL_ORDER4 };
        let mut worst: f64 = 0.0;
        for x in &pts {
            worst = worst.max(tensor_mismatch(n, order, |a| analytic_deriv_odd(&f, k, a, x, opts.level), &field, x)?);
        }
        checks.push(Check::below(s, format!("p={p} order-{order} subsphere formula vs finite differences"), worst, tol));
    }
    if p > 1.0 && !is_even_integer(p) {
        for (order, tol) in [(2u32, FD_TOL_ORDER2), (4, FD_TOL_ORDER4)] {
            if (order as f64) >= p + 1.0 {
                continue;
            }
            let mut worst: f64 = 0.0;
            for x in &pts {
                worst = worst.max(tensor_mismatch(n, order, |a| analytic_deriv_frac(&f, p, a, x, opts.level), &field, x)?);
            }
            checks.push(Check::below(s, format!("p={p} order-{order} weighted formula vs finite differences"), worst, tol));
        }
    }
    Ok(checks)
}

fn inversion_checks(opts: &VerifyOptions) -> Result<Vec<Check>> {
    let s = Suite::Inversion;
    let level = opts.level.max(48);
    let report = inversion_ratio_check(6, level)?;
    let mut checks = vec![Check::below(s, "rho_l relative spread over l = 0..6", report.relative_spread, INVERSION_TOL)];
    let entry = |l: usize| report.entries.iter().find(|e| e.l == l).expect("even l <= 6");
    for (name, measured, exact) in [
        ("r_2 = -pi", entry(2).r_l, -PI),
        ("t_2 = pi/2", entry(2).t_l, PI / 2.0),
        ("t_4 = -pi/12", entry(4).t_l, -PI / 12.0),
    ] {
        checks.push(Check::below(s, name, (measured - exact).abs(), INVERSION_TOL));
    }
    checks.push(Check::info(s, "c_3 estimate", report.c_estimate));
    Ok(checks)
}

fn convexity_checks(opts: &VerifyOptions) -> Result<Vec<Check>> {
    let s = Suite::Convexity;
    let p = opts.p.unwrap_or(2.5);
    let f = opts.density_or("constant")?;
    let grid = direction_grid(opts.dim, opts.grid, opts.seed)?;
    let conv = convexity_check(&f, p, &grid, opts.level)?;
    let mut checks = vec![
        Check::flag(s, format!("p={p} convex (min criterion >= -1e-9)"), conv.min_lindquist, conv.convex),
        Check::flag(s, "criterion and Hessian eigenvalue signs agree", conv.disagreements as f64, conv.disagreements == 0),
    ];
    match curvature_report(&f, p, &grid, opts.level) {
        Ok(curv) => checks.push(Check::flag(
            s,
            "all principal radii > 1e-6 H(u)",
            curv.min_relative_radius,
            curv.all_positive,
        )),
        Err(e) if !e.is_config() => checks.push(Check::flag(s, format!("curvature: {e}"), f64::NAN, false)),
        Err(e) => return Err(e),
    }
    Ok(checks)
}

/// Runs one suite, or all of them.
pub fn run_suite(suite: Suite, opts: &VerifyOptions) -> Result<VerifyReport> {
    let mut checks = Vec::new();
    if matches!(suite, Suite::Derivatives | Suite::All) {
        match opts.p {
            Some(p) => checks.extend(derivative_checks(opts, p)?),
            None => {
                for p in [1.0, 2.5, 3.0] {
                    checks.extend(derivative_checks(opts, p)?);
                }
            }
        }
    }
    if matches!(suite, Suite::Inversion | Suite::All) {
        checks.extend(inversion_checks(opts)?);
    }
    if matches!(suite, Suite::Convexity | Suite::All) {
        checks.extend(convexity_checks(opts)?);
    }
    let failures = checks.iter().filter(|c| !c.passed).count();
    Ok(VerifyReport { suite, checks, failures })
}
