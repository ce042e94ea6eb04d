//! End-to-end acceptance checks. Runs as a plain binary so every criterion
//! prints its own pass/fail line.

use std::f64::consts::PI;
use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use spherelab::convexity::{curvature_report, direction_grid, lindquist_p, random_unit, reverse_weingarten};
use spherelab::deriv::{analytic_deriv_frac, analytic_deriv_odd, hessian_hp, MultiIndex};
use spherelab::harmonics::inversion_ratio_check;
use spherelab::linalg::{dot, householder_frame, sym_eigen, unit};
use spherelab::specfun::c_const;
use spherelab::squad::{build_sphere_rule, build_subsphere_rule, build_weighted_axis_rule, QuadratureRule};
use spherelab::transforms::{lp_cosine, Preset, SphericalDensity, TransformSpec};
use spherelab::verify::{sample_points, tensor_mismatch};

type Outcome = Result<String, String>;

fn preset(dim: usize, p: Preset) -> SphericalDensity {
    SphericalDensity::preset(dim, p).unwrap()
}

fn diag(d: &[f64]) -> Vec<Vec<f64>> {
    (0..d.len()).map(|i| (0..d.len()).map(|j| if i == j { d[i] } else { 0.0 }).collect()).collect()
}

/// Smooth, strictly positive densities.
fn positive_presets(dim: usize) -> Vec<(&'static str, SphericalDensity)> {
    let mut out = vec![
        ("constant", SphericalDensity::constant(dim, 1.0).unwrap()),
        ("watson", SphericalDensity::named("watson", dim).unwrap()),
        ("bump", SphericalDensity::named("bump", dim).unwrap()),
        ("quadratic", SphericalDensity::named("quadratic", dim).unwrap()),
    ];
    if dim == 3 {
        out.push(("harmonics", SphericalDensity::named("harmonics", 3).unwrap()));
    }
    out
}

fn within(elapsed: Duration, limit_s: u64) -> Result<(), String> {
    if elapsed.as_secs_f64() > limit_s as f64 {
        return Err(format!("runtime {:.1}s exceeds {limit_s}s", elapsed.as_secs_f64()));
    }
    Ok(())
}

fn c1_first_order_odd() -> Outcome {
    let t0 = Instant::now();
    let level = 32;
    let one = SphericalDensity::constant(3, 1.0).unwrap();
    let exact = analytic_deriv_odd(&one, 0, &MultiIndex::new(vec![2, 0, 0]), &[0.0, 0.0, 1.0], level).unwrap();
    if (exact - 2.0 * PI).abs() > 1e-6 {
        return Err(format!("f = 1, alpha = (2,0,0), x = e_3 gave {exact}, expected 2 pi"));
    }
    let mut worst: f64 = 0.0;
    for (name, f) in positive_presets(3) {
        let spec = TransformSpec::new(1.0, 3, level).unwrap();
        let field = |x: &[f64]| lp_cosine(&f, &spec, x);
        for x in sample_points(3, 20, 11) {
            let e = tensor_mismatch(3, 2, |a| analytic_deriv_odd(&f, 0, a, &x, level), &field, &x).unwrap();
            if e >= 1e-3 {
                return Err(format!("{name} at {x:?}: relative error {e:e}"));
            }
            worst = worst.max(e);
        }
    }
    within(t0.elapsed(), 30)?;
    Ok(format!("5 presets x 20 points, max rel err {worst:.2e}; 2 pi instance err {:.1e}", (exact - 2.0 * PI).abs()))
}

fn c2_fourth_order_odd() -> Outcome {
    let t0 = Instant::now();
    let level = 32;
    let mut worst: f64 = 0.0;
    let mut homog: f64 = 0.0;
    for (name, f) in positive_presets(2) {
        let spec = TransformSpec::new(3.0, 2, level).unwrap();
        let field = |x: &[f64]| lp_cosine(&f, &spec, x);
        for x in sample_points(2, 10, 12) {
            let e = tensor_mismatch(2, 4, |a| analytic_deriv_odd(&f, 1, a, &x, level), &field, &x).unwrap();
            if e >= 5e-3 {
                return Err(format!("{name} at {x:?}: relative error {e:e}"));
            }
            worst = worst.max(e);
            for alpha in MultiIndex::all_of_order(2, 4) {
                let a = analytic_deriv_odd(&f, 1, &alpha, &x, level).unwrap();
                let x3: Vec<f64> = x.iter().map(|c| 3.0 * c).collect();
                let b = analytic_deriv_odd(&f, 1, &alpha, &x3, level).unwrap();
                let scale = a.abs().max(1e-300);
                homog = homog.max((3.0 * b - a).abs() / scale);
            }
        }
    }
    if homog >= 1e-9 {
        return Err(format!("degree -1 homogeneity violated by {homog:e}"));
    }
    within(t0.elapsed(), 60)?;
    Ok(format!("4 presets (n = 2) x 10 points, max rel err {worst:.2e}, homogeneity {homog:.1e}"))
}

fn c3_weighted_formula() -> Outcome {
    let t0 = Instant::now();
    let level = 32;
    let densities = [
        ("watson", SphericalDensity::named("watson", 3).unwrap()),
        ("harmonics", SphericalDensity::named("harmonics", 3).unwrap()),
        ("bump", SphericalDensity::named("bump", 3).unwrap()),
    ];
    let mut worst2: f64 = 0.0;
    let mut worst4: f64 = 0.0;
    for p in [1.5, 2.5, 3.5, 4.5] {
        for (name, f) in &densities {
            let spec = TransformSpec::new(p, 3, level).unwrap();
            let field = |x: &[f64]| lp_cosine(f, &spec, x);
            for x in sample_points(3, 4, 13) {
                let e = tensor_mismatch(3, 2, |a| analytic_deriv_frac(f, p, a, &x, level), &field, &x).unwrap();
                if e >= 1e-4 {
                    return Err(format!("p = {p}, {name}, |alpha| = 2 at {x:?}: {e:e}"));
                }
                worst2 = worst2.max(e);
                if p > 3.0 {
                    let e = tensor_mismatch(3, 4, |a| analytic_deriv_frac(f, p, a, &x, level), &field, &x).unwrap();
                    if e >= 5e-3 {
                        return Err(format!("p = {p}, {name}, |alpha| = 4 at {x:?}: {e:e}"));
                    }
                    worst4 = worst4.max(e);
                }
            }
        }
    }
    within(t0.elapsed(), 60)?;
    Ok(format!("|alpha| = 2 max rel err {worst2:.2e}; |alpha| = 4 max rel err {worst4:.2e}"))
}

/// Gamma at positive integers and half-integers by recurrence.
fn gamma_half(two_x: u32) -> f64 {
    let mut g = if two_x.is_multiple_of(2) { 1.0 } else { PI.sqrt() };
    let mut k = if two_x.is_multiple_of(2) { 2 } else { 1 };
    while k < two_x {
        g *= k as f64 / 2.0;
        k += 2;
    }
    g
}

fn c4_constants() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let mut worst: f64 = 0.0;
    let mut sampled = 0;
    while sampled < 10 {
        let p: f64 = rng.gen_range(1.05..9.0);
        if (p / 2.0 - (p / 2.0).round()).abs() < 1e-3 {
            continue;
        }
        let ratio = -c_const(p).unwrap() / c_const(p - 2.0).unwrap();
        let e = (ratio - p * (p - 1.0)).abs() / (p * (p - 1.0));
        if e >= 1e-10 {
            return Err(format!("p = {p}: -C_p/C_(p-2) = {ratio}, rel err {e:e}"));
        }
        worst = worst.max(e);
        sampled += 1;
    }
    // C_t = 2^{t+1} sqrt(pi) Gamma((t+1)/2) / Gamma(-t/2) with Gamma(-1/2) = -2 sqrt(pi), Gamma(-3/2) = 4 sqrt(pi)/3
    let c1 = 4.0 * PI.sqrt() * gamma_half(2) / (-2.0 * PI.sqrt());
    let c3 = 16.0 * PI.sqrt() * gamma_half(4) / (4.0 * PI.sqrt() / 3.0);
    let e1 = (c_const(1.0).unwrap() - c1).abs();
    let e3 = (c_const(3.0).unwrap() - c3).abs();
    if (c1 + 2.0).abs() > 1e-14 || (c3 - 12.0).abs() > 1e-12 || e1 >= 1e-12 || e3 >= 1e-12 {
        return Err(format!("C_1 err {e1:e}, C_3 err {e3:e}"));
    }
    Ok(format!("10 sampled p, max rel err {worst:.1e}; C_1 err {e1:.1e}, C_3 err {e3:.1e}"))
}

fn c5_positive_curvature() -> Outcome {
    let t0 = Instant::now();
    let level = 32;
    let mut min_rel = f64::INFINITY;
    for n in [2, 3] {
        let grid = direction_grid(n, 200, 5).unwrap();
        let presets: Vec<(&str, SphericalDensity)> =
            positive_presets(n).into_iter().filter(|(name, _)| *name != "constant").take(3).collect();
        for (name, f) in &presets {
            for p in [1.5, 2.5] {
                let r = curvature_report(f, p, &grid, level).unwrap();
                let bad_curv = r.entries.iter().any(|e| !matches!(e.curvature, Some(k) if k > 0.0));
                if !r.all_positive || bad_curv {
                    return Err(format!(
                        "{name}, n = {n}, p = {p}: min radius / H = {:e}, curvature positive = {}",
                        r.min_relative_radius, !bad_curv
                    ));
                }
                min_rel = min_rel.min(r.min_relative_radius);
            }
        }
        for p in [1.5, 2.5] {
            let one = SphericalDensity::constant(n, 1.0).unwrap();
            let r = curvature_report(&one, p, &grid, level).unwrap();
            let spread = r.curvature_spread().unwrap();
            if spread >= 1e-5 {
                return Err(format!("round body n = {n}, p = {p}: curvature spread {spread:e}"));
            }
        }
    }
    within(t0.elapsed(), 120)?;
    Ok(format!("n = 2, 3; 3 presets; p = 1.5, 2.5; 200 directions; min radius / H = {min_rel:.3}"))
}

fn c6_lindquist_signs() -> Outcome {
    let level = 32;
    let signed = [
        ("saddle", preset(3, Preset::Quadratic { matrix: diag(&[1.0, -1.0, 0.0]), offset: 0.0 })),
        ("tilted", preset(3, Preset::Quadratic { matrix: diag(&[1.0, 0.3, -0.6]), offset: 0.05 })),
        ("zonal", preset(3, Preset::Harmonics { terms: vec![(0, 0, 0.2), (2, 0, 1.0)] })),
    ];
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let band = 1e-9;
    let mut disagreements = 0;
    let mut negatives = 0;
    let mut samples = 0;
    for (_, f) in &signed {
        for p in [1.5, 2.5] {
            for _ in 0..100 {
                let u = random_unit(3, &mut rng);
                let frame = householder_frame(&u).unwrap();
                let hess = hessian_hp(f, p, &u, level).unwrap();
                let tangent: Vec<Vec<f64>> = frame[..2].to_vec();
                let eig = sym_eigen(&hess.congruence(&tangent));
                let oracle = eig.values[0] / (p * (p - 1.0));
                // criterion along the tangent eigen-directions and one random tangent x
                let mut crit = f64::INFINITY;
                for c in &eig.vectors {
                    let x: Vec<f64> = (0..3).map(|i| c[0] * tangent[0][i] + c[1] * tangent[1][i]).collect();
                    crit = crit.min(lindquist_p(f, p, &u, &x, level).unwrap());
                }
                let a: f64 = rng.gen_range(-1.0..1.0);
                let b: f64 = rng.gen_range(-1.0..1.0);
                let x: Vec<f64> = (0..3).map(|i| a * tangent[0][i] + b * tangent[1][i]).collect();
                let random_val = lindquist_p(f, p, &u, &x, level).unwrap();
                let random_oracle = hess.bilinear(&x, &x) / (p * (p - 1.0));
                for (v, o) in [(crit, oracle), (random_val, random_oracle)] {
                    if v.abs() >= band && o.abs() >= band && v.signum() != o.signum() {
                        disagreements += 1;
                    }
                }
                if oracle < -band {
                    negatives += 1;
                }
                samples += 1;
            }
        }
    }
    if disagreements > 0 {
        return Err(format!("{disagreements} sign disagreements"));
    }
    if negatives == 0 {
        return Err("no sample produced a negative eigenvalue; presets are not signed enough".into());
    }
    Ok(format!("{samples} (u, x) samples over 3 signed presets, {negatives} non-convex, 0 disagreements"))
}

fn c7_inversion() -> Outcome {
    let t0 = Instant::now();
    let r = inversion_ratio_check(6, 48).map_err(|e| e.to_string())?;
    if r.relative_spread >= 1e-6 {
        return Err(format!("rho_l spread {:e}", r.relative_spread));
    }
    // Funk-Hecke: r_l = 2 pi P_l(0), t_l = 2 pi int_{-1}^{1} |t| P_l(t) dt
    let get = |l: usize| r.entries.iter().find(|e| e.l == l).unwrap();
    let checks = [(get(2).r_l, -PI), (get(2).t_l, PI / 2.0), (get(4).t_l, -PI / 12.0), (get(4).r_l, 3.0 * PI / 4.0)];
    for (m, e) in checks {
        if (m - e).abs() >= 1e-6 {
            return Err(format!("multiplier {m} vs {e}"));
        }
    }
    within(t0.elapsed(), 30)?;
    Ok(format!("rho spread {:.1e}, c_3 = {:.9}", r.relative_spread, r.c_estimate))
}

fn c8_p1_sharpness() -> Outcome {
    let level = 32;
    let f = SphericalDensity::named("vanishing-point", 2).unwrap();
    let w = reverse_weingarten(&f, 1.0, &[1.0, 0.0], level).unwrap();
    if w.radii[0].abs() >= 1e-6 {
        return Err(format!("p = 1 radius at the vanishing direction is {:e}", w.radii[0]));
    }
    let grid = direction_grid(2, 200, 0).unwrap();
    let r = curvature_report(&f, 1.5, &grid, level).unwrap();
    if r.min_radius <= 1e-4 {
        return Err(format!("p = 1.5 min radius {:e}", r.min_radius));
    }
    Ok(format!("p = 1 radius {:.1e} at e_1; p = 1.5 min radius {:.4}", w.radii[0], r.min_radius))
}

/// `int_{S^{n-1}} |xi^alpha| = 2 prod Gamma((a_i + 1)/2) / Gamma((|a| + n)/2)`.
fn abs_monomial_integral(alpha: &[u32]) -> f64 {
    let num: f64 = alpha.iter().map(|&a| gamma_half(a + 1)).product();
    2.0 * num / gamma_half(alpha.iter().sum::<u32>() + alpha.len() as u32)
}

/// `int_{S^{n-1}} xi^alpha`: zero unless every exponent is even.
fn monomial_integral(alpha: &[u32]) -> f64 {
    if alpha.iter().any(|a| a % 2 == 1) {
        return 0.0;
    }
    abs_monomial_integral(alpha)
}

fn exponents(n: usize, order: u32) -> Vec<Vec<u32>> {
    MultiIndex::all_of_order(n, order).into_iter().map(|a| a.entries().to_vec()).collect()
}

fn monomial_error(rule: &QuadratureRule, alpha: &[u32], exact: f64, embed: impl Fn(&[f64]) -> Vec<f64>) -> f64 {
    let q: f64 = rule
        .nodes()
        .zip(rule.weights())
        .map(|(xi, w)| w * embed(xi).iter().zip(alpha).map(|(c, &a)| c.powi(a as i32)).product::<f64>())
        .sum();
    (q - exact).abs() / abs_monomial_integral(alpha)
}

fn c9_quadrature_floor() -> Outcome {
    let mut worst: f64 = 0.0;
    let mut rules = 0;
    let cases: Vec<(usize, Vec<usize>)> =
        vec![(2, (1..=24).collect()), (3, (1..=12).collect()), (4, (1..=4).collect()), (5, (1..=3).collect()), (6, (1..=2).collect())];
    for (n, levels) in cases {
        for level in levels {
            let rule = build_sphere_rule(n, level).unwrap();
            let deg = rule.degree() as u32;
            let orders: Vec<u32> =
                if n <= 3 { (0..=deg).collect() } else { (0..=deg).filter(|&d| d <= 4 || d + 1 >= deg).collect() };
            for order in orders {
                for alpha in exponents(n, order) {
                    let e = monomial_error(&rule, &alpha, monomial_integral(&alpha), |x| x.to_vec());
                    if e >= 1e-9 {
                        return Err(format!("n = {n}, level {level}, alpha {alpha:?}: rel err {e:e}"));
                    }
                    worst = worst.max(e);
                }
            }
            rules += 1;
        }
    }
    // subsphere rules: int_{x^⊥} xi^alpha in coordinates of an orthonormal basis of x^⊥
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    for n in [3, 4] {
        for level in 1..=4 {
            let x = random_unit(n, &mut rng);
            let rule = build_subsphere_rule(&x, level).unwrap();
            let deg = rule.degree() as u32;
            let basis = householder_frame(&x).unwrap();
            for order in 0..=deg.min(8) {
                for alpha in exponents(n - 1, order) {
                    let e = monomial_error(&rule, &alpha, monomial_integral(&alpha), |xi| {
                        basis[..n - 1].iter().map(|b| dot(b, xi)).collect()
                    });
                    if e >= 1e-9 {
                        return Err(format!("subsphere n = {n}, level {level}, alpha {alpha:?}: {e:e}"));
                    }
                    worst = worst.max(e);
                }
            }
            rules += 1;
        }
    }
    // weighted axis rules: int |<u, xi>|^q <u, xi>^{2j} = |S^{n-2}| B((q + 2j + 1)/2, (n - 1)/2)
    for n in [2, 3, 4] {
        for q in [1u32, 3] {
            let u = unit(&random_unit(n, &mut rng)).unwrap();
            let rule = build_weighted_axis_rule(&u, q as f64, 6).unwrap();
            for j in 0..=6u32 {
                let s = q + 2 * j;
                let sub = 2.0 * PI.powf((n - 1) as f64 / 2.0) / gamma_half(n as u32 - 1);
                let exact = sub * gamma_half(s + 1) * gamma_half(n as u32 - 1) / gamma_half(s + n as u32);
                let got = rule.integrate(|xi| dot(xi, &u).powi(2 * j as i32));
                let e = (got - exact).abs() / exact;
                if e >= 1e-9 {
                    return Err(format!("axis rule n = {n}, q = {q}, j = {j}: {e:e}"));
                }
                worst = worst.max(e);
            }
            rules += 1;
        }
    }
    Ok(format!("{rules} rules exact to their declared degree, max rel err {worst:.1e}"))
}

type Criterion = (&'static str, fn() -> Outcome);

fn main() {
    let criteria: [Criterion; 9] = [
        ("1 odd formula, k = 0, vs finite differences", c1_first_order_odd),
        ("2 odd formula, k = 1, order 4 and homogeneity", c2_fourth_order_odd),
        ("3 weighted formula vs finite differences", c3_weighted_formula),
        ("4 constant identity", c4_constants),
        ("5 positive curvature", c5_positive_curvature),
        ("6 Lindquist signs vs Hessian eigenvalues", c6_lindquist_signs),
        ("7 inversion relation", c7_inversion),
        ("8 p = 1 sharpness", c8_p1_sharpness),
        ("9 quadrature exactness", c9_quadrature_floor),
    ];
    let mut failed = 0;
    for (name, run) in criteria {
        let t0 = Instant::now();
        let outcome = std::panic::catch_unwind(run).unwrap_or_else(|_| Err("panicked".into()));
        let secs = t0.elapsed().as_secs_f64();
        match outcome {
            Ok(msg) => println!("PASS criterion {name} ({secs:.1}s): {msg}"),
            Err(msg) => {
                failed += 1;
                println!("FAIL criterion {name} ({secs:.1}s): {msg}");
            }
        }
    }
    println!("acceptance: {} passed, {failed} failed", 9 - failed);
    if failed > 0 {
        std::process::exit(1);
    }
}
