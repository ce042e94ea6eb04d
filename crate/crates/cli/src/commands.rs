use serde::Serialize;
use serde_json::{json, Value};

use spherelab::convexity::{convexity_check, curvature_report, direction_grid, lindquist, RADIUS_FLOOR};
use spherelab::deriv::{
    analytic_deriv_frac, analytic_deriv_odd, finite_diff, hessian_report, hessian_report_fd, MultiIndex,
};
use spherelab::linalg::{dot, norm, Matrix};
use spherelab::mesh::body_mesh;
use spherelab::transforms::{lp_cosine, radon, SphericalDensity, TransformSpec};
use spherelab::verify::{run_suite, VerifyOptions, FD_TOL_ORDER2, FD_TOL_ORDER2_ODD, FD_TOL_ORDER4};
use spherelab::{Error, Result};

use crate::config::{Command, DensitySource, RunConfig};

#[derive(Debug, Clone, Serialize)]
pub struct Residual {
    pub name: String,
    pub value: f64,
    pub tolerance: Option<f64>,
}

impl Residual {
    fn new(name: impl Into<String>, value: f64, tolerance: Option<f64>) -> Self {
        Residual { name: name.into(), value, tolerance }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct Report {
    pub command: &'static str,
    pub config: RunConfig,
    pub results: Vec<Value>,
    pub residuals: Vec<Residual>,
    pub verdict: String,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub warnings: Vec<String>,
}

/// A finished command: the JSON report, a one-line summary, the process exit
/// code and, for `mesh`, the OBJ text.
pub struct Outcome {
    pub report: Report,
    pub summary: String,
    pub exit_code: i32,
    pub obj: Option<String>,
}

/// Largest exit code `verify` reports for failed checks.
pub const MAX_FAILURE_CODE: usize = 100;

pub fn run(config: &RunConfig, f: &SphericalDensity) -> Result<Outcome> {
    match config.command {
        Command::Transform => transform(config, f),
        Command::Derivative => derivative(config, f),
        Command::Curvature => curvature(config, f),
        Command::Lindquist => lindquist_cmd(config, f),
        Command::Verify => verify(config, f),
        Command::Mesh => mesh(config, f),
    }
}

fn report(config: &RunConfig, results: Vec<Value>, residuals: Vec<Residual>, verdict: &str) -> Report {
    Report {
        command: config.command.name(),
        config: config.clone(),
        results,
        residuals,
        verdict: verdict.into(),
        warnings: Vec::new(),
    }
}

fn done(report: Report, summary: String) -> Outcome {
    Outcome { report, summary, exit_code: 0, obj: None }
}

fn last_axis(n: usize) -> Vec<f64> {
    let mut e = vec![0.0; n];
    e[n - 1] = 1.0;
    e
}

fn points_or_pole(config: &RunConfig) -> Vec<Vec<f64>> {
    if config.at.is_empty() {
        vec![last_axis(config.dim)]
    } else {
        config.at.clone()
    }
}

fn fmt_point(x: &[f64]) -> String {
    x.iter().map(|c| format!("{c}")).collect::<Vec<_>>().join(",")
}

fn transform(config: &RunConfig, f: &SphericalDensity) -> Result<Outcome> {
    let p = config.p_or_one();
    let spec = TransformSpec::new(p, config.dim, config.level)?;
    let mut results = Vec::new();
    let mut warnings = Vec::new();
    let mut lines = Vec::new();
    for x in points_or_pole(config) {
        if norm(&x) == 0.0 {
            warnings.push("evaluation at the origin returns 0; derivatives are not defined there".to_string());
            results.push(json!({"point": x, "hp": 0.0, "h": 0.0}));
            lines.push(format!("H^p({}) = 0", fmt_point(&x)));
            continue;
        }
        let hp = lp_cosine(f, &spec, &x)?;
        let h = (hp >= 0.0).then(|| hp.powf(1.0 / p));
        let r = if f.is_atomic() { None } else { Some(radon(f, &x, config.level)?) };
        results.push(json!({"point": x, "hp": hp, "h": h, "radon": r}));
        lines.push(format!("H^p({}) = {hp:.10}", fmt_point(&x)));
    }
    let mut rep = report(config, results, Vec::new(), "ok");
    rep.warnings = warnings;
    Ok(done(rep, lines.join("\n")))
}

fn nonzero_points(config: &RunConfig) -> Result<Vec<Vec<f64>>> {
    let pts = points_or_pole(config);
    if pts.iter().any(|x| norm(x) == 0.0) {
        return Err(Error::Precondition("derivatives are not defined at the origin".into()));
    }
    Ok(pts)
}

fn max_abs_diff(a: &Matrix, b: &Matrix) -> f64 {
    let n = a.dim();
    (0..n).flat_map(|i| (0..n).map(move |j| (i, j))).map(|(i, j)| (a[(i, j)] - b[(i, j)]).abs()).fold(0.0, f64::max)
}

fn derivative(config: &RunConfig, f: &SphericalDensity) -> Result<Outcome> {
    let p = config.p_or_one();
    let spec = TransformSpec::new(p, config.dim, config.level)?;
    let field = |x: &[f64]| lp_cosine(f, &spec, x);
    let mut results = Vec::new();
    let mut residuals = Vec::new();
    let mut ok = true;
    let mut lines = Vec::new();
    for x in nonzero_points(config)? {
        match &config.alpha {
            Some(alpha) => {
                let alpha = MultiIndex::new(alpha.clone());
                let order = alpha.order();
                let odd_p = p.fract() == 0.0 && (p as u32) % 2 == 1;
                let (formula, analytic) = if odd_p && order as f64 == p + 1.0 {
                    ("subsphere", analytic_deriv_odd(f, (p as u32 - 1) / 2, &alpha, &x, config.level)?)
                } else {
                    ("weighted", analytic_deriv_frac(f, p, &alpha, &x, config.level)?)
                };
                let fd = finite_diff(&field, &alpha, &x, None)?;
                let floor = 1e-8 * field(&x)?.abs() / norm(&x).powi(order as i32);
                let rel = (analytic - fd).abs() / analytic.abs().max(fd.abs()).max(floor);
                let tol = config.tolerance.unwrap_or(match (order, p == 1.0) {
                    (2, true) => FD_TOL_ORDER2_ODD,
                    (2, false) => FD_TOL_ORDER2,
                    _ => FD_TOL_ORDER4,
                });
                ok &= rel < tol;
                results.push(json!({
                    "point": x, "alpha": alpha.entries(), "formula": formula,
                    "analytic": analytic, "finite_difference": fd,
                }));
                residuals.push(Residual::new(format!("relative mismatch at {}", fmt_point(&x)), rel, Some(tol)));
                lines.push(format!("D^alpha H^p({}) = {analytic:.10} (finite differences {fd:.10})", fmt_point(&x)));
            }
            None => {
                let a = hessian_report(f, p, &x, config.level)?;
                let b = hessian_report_fd(f, p, &x, config.level)?;
                let tol = config.tolerance.unwrap_or(if p == 1.0 { FD_TOL_ORDER2_ODD } else { FD_TOL_ORDER2 });
                let grad = a.gradient_hp.iter().zip(&b.gradient_hp).map(|(s, t)| (s - t).abs()).fold(0.0, f64::max)
                    / norm(&a.gradient_hp).max(f64::MIN_POSITIVE);
                let hess = max_abs_diff(&a.hessian_hp, &b.hessian_hp) / a.hessian_hp.frobenius().max(f64::MIN_POSITIVE);
                let hh = max_abs_diff(&a.hessian_h, &b.hessian_h) / a.hessian_h.frobenius().max(f64::MIN_POSITIVE);
                for (name, v) in [("gradient of H^p", grad), ("Hessian of H^p", hess), ("Hessian of H", hh)] {
                    ok &= v < tol;
                    residuals.push(Residual::new(format!("{name} vs finite differences at {}", fmt_point(&x)), v, Some(tol)));
                }
                residuals.push(Residual::new(format!("Euler identity at {}", fmt_point(&x)), a.euler_residual(), Some(1e-10)));
                ok &= a.euler_residual() < 1e-10;
                lines.push(format!("H^p({}) = {:.10}, trace of Hessian of H = {:.10}", fmt_point(&x), a.hp, a.hessian_h.trace()));
                results.push(json!({"analytic": a, "finite_difference": b}));
            }
        }
    }
    let verdict = if ok { "agree" } else { "mismatch" };
    lines.push(format!("verdict: {verdict}"));
    let mut out = done(report(config, results, residuals, verdict), lines.join("\n"));
    out.exit_code = if ok { 0 } else { 1 };
    Ok(out)
}

fn directions(config: &RunConfig) -> Result<Vec<Vec<f64>>> {
    if config.at.is_empty() {
        direction_grid(config.dim, config.grid, config.seed)
    } else {
        Ok(config.at.clone())
    }
}

fn curvature(config: &RunConfig, f: &SphericalDensity) -> Result<Outcome> {
    let p = config.p_or_one();
    let r = curvature_report(f, p, &directions(config)?, config.level)?;
    let verdict = if r.all_positive { "all-positive" } else { "degenerate" };
    let fmt_opt = |v: Option<f64>| v.map_or("infinite".to_string(), |k| format!("{k:.6e}"));
    let summary = format!(
        "{} directions: min radius {:.6e}, min curvature {}, max curvature {}, verdict {verdict}",
        r.entries.len(),
        r.min_radius,
        fmt_opt(r.min_curvature),
        fmt_opt(r.max_curvature)
    );
    let mut residuals = vec![Residual::new("min radius / H(u)", r.min_relative_radius, Some(RADIUS_FLOOR))];
    if let Some(s) = r.curvature_spread() {
        residuals.push(Residual::new("curvature spread (max - min) / max", s, None));
    }
    let results = vec![serde_json::to_value(&r).expect("report serializes")];
    Ok(done(report(config, results, residuals, verdict), summary))
}

fn lindquist_cmd(config: &RunConfig, f: &SphericalDensity) -> Result<Outcome> {
    let p = config.p_or_one();
    let dirs = directions(config)?;
    let r = convexity_check(f, p, &dirs, config.level)?;
    let mut results = vec![serde_json::to_value(&r).expect("report serializes")];
    let mut summary = format!(
        "{} directions: min criterion {:.6e}, {} sign disagreements, verdict {}",
        r.entries.len(),
        r.min_lindquist,
        r.disagreements,
        if r.convex { "convex" } else { "not-convex" }
    );
    if let Some(x) = &config.x {
        for u in &config.at {
            let unit_u: Vec<f64> = u.iter().map(|c| c / norm(u)).collect();
            let v = lindquist(f, p, &unit_u, x, config.level)?;
            results.push(json!({"u": u, "x": x, "value": v, "tangent": dot(&unit_u, x).abs() < 1e-10}));
            summary.push_str(&format!("\ncriterion at u = {}, x = {}: {v:.10e}", fmt_point(u), fmt_point(x)));
        }
    }
    let residuals = vec![
        Residual::new("min criterion", r.min_lindquist, Some(-spherelab::convexity::CONVEXITY_TOL)),
        Residual::new("sign disagreements", r.disagreements as f64, Some(0.0)),
    ];
    let verdict = if r.convex { "convex" } else { "not-convex" };
    Ok(done(report(config, results, residuals, verdict), summary))
}

fn verify(config: &RunConfig, f: &SphericalDensity) -> Result<Outcome> {
    let opts = VerifyOptions {
        dim: config.dim,
        density: (config.density != DensitySource::Default).then(|| f.clone()),
        p: config.p,
        level: config.level,
        grid: config.grid,
        seed: config.seed,
        ..VerifyOptions::default()
    };
    let r = run_suite(config.suite, &opts)?;
    let residuals = r.checks.iter().map(|c| Residual::new(c.name.clone(), c.value, c.tolerance)).collect();
    let mut lines: Vec<String> = r
        .checks
        .iter()
        .map(|c| {
            let tol = c.tolerance.map_or(String::new(), |t| format!(" (tolerance {t:e})"));
            format!("{} {}: {:.6e}{tol}", if c.passed { "PASS" } else { "FAIL" }, c.name, c.value)
        })
        .collect();
    lines.push(format!("{} checks, {} failed", r.checks.len(), r.failures));
    let verdict = if r.passed() { "pass" } else { "fail" };
    let results = r.checks.iter().map(|c| serde_json::to_value(c).expect("check serializes")).collect();
    let mut out = done(report(config, results, residuals, verdict), lines.join("\n"));
    out.exit_code = r.failures.min(MAX_FAILURE_CODE) as i32;
    Ok(out)
}

fn mesh(config: &RunConfig, f: &SphericalDensity) -> Result<Outcome> {
    let p = config.p_or_one();
    let m = body_mesh(f, p, config.grid, config.level)?;
    // support inequality: <v_i, u_j> <= H(u_j) = <v_j, u_j>
    let support: Vec<f64> = m.vertices.iter().zip(&m.normals).map(|(v, u)| dot(v, u)).collect();
    let mut violation: f64 = f64::NEG_INFINITY;
    for (u, h) in m.normals.iter().zip(&support) {
        for v in &m.vertices {
            violation = violation.max(dot(v, u) - h);
        }
    }
    let norms: Vec<f64> = m.vertices.iter().map(|v| norm(v)).collect();
    let (rmin, rmax) = norms.iter().fold((f64::INFINITY, 0.0f64), |(a, b), &r| (a.min(r), b.max(r)));
    let results = vec![json!({
        "vertices": m.vertices.len(), "faces": m.faces.len(),
        "min_vertex_norm": rmin, "max_vertex_norm": rmax,
    })];
    let residuals = vec![Residual::new("max support violation", violation, Some(1e-6))];
    let verdict = if violation <= 1e-6 { "convex" } else { "not-convex" };
    let summary = format!(
        "{} vertices, {} faces, vertex norms in [{rmin:.6}, {rmax:.6}], support violation {violation:.2e}",
        m.vertices.len(),
        m.faces.len()
    );
    let mut out = done(report(config, results, residuals, verdict), summary);
    out.obj = Some(m.to_obj());
    Ok(out)
}
