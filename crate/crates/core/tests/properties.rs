//! Structural invariants under random inputs.

use proptest::prelude::*;

use spherelab::convexity::reverse_weingarten;
use spherelab::deriv::{grad_hp, hessian_h};
use spherelab::linalg::Matrix;
use spherelab::transforms::{lp_cosine, radon, SphericalDensity, TransformSpec};

const LEVEL: usize = 16;

fn point() -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(-2.0f64..2.0, 3).prop_filter("away from the origin", |x| x.iter().map(|c| c * c).sum::<f64>() > 0.05)
}

fn density() -> impl Strategy<Value = SphericalDensity> {
    prop_oneof![
        Just(SphericalDensity::named("watson", 3).unwrap()),
        Just(SphericalDensity::named("harmonics", 3).unwrap()),
        Just(SphericalDensity::named("bump", 3).unwrap()),
    ]
}

/// Rotation from three angles.
fn rotation(a: f64, b: f64, c: f64) -> Matrix {
    let rz = |t: f64| Matrix::from(vec![vec![t.cos(), -t.sin(), 0.0], vec![t.sin(), t.cos(), 0.0], vec![0.0, 0.0, 1.0]]);
    let rx = |t: f64| Matrix::from(vec![vec![1.0, 0.0, 0.0], vec![0.0, t.cos(), -t.sin()], vec![0.0, t.sin(), t.cos()]]);
    let mul = |x: &Matrix, y: &Matrix| Matrix::from_fn(3, |i, j| (0..3).map(|k| x[(i, k)] * y[(k, j)]).sum());
    mul(&mul(&rz(a), &rx(b)), &rz(c))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn homogeneity(f in density(), x in point(), p in 1.0f64..4.0, lambda in 0.1f64..5.0) {
        let spec = TransformSpec::new(p, 3, LEVEL).unwrap();
        let a = lp_cosine(&f, &spec, &x).unwrap();
        let scaled: Vec<f64> = x.iter().map(|c| lambda * c).collect();
        let b = lp_cosine(&f, &spec, &scaled).unwrap();
        prop_assert!((b - lambda.powf(p) * a).abs() <= 1e-12 * b.abs());
        let r = radon(&f, &x, LEVEL).unwrap();
        let rs = radon(&f, &scaled, LEVEL).unwrap();
        // the Radon transform only sees the direction of x
        prop_assert!((rs - r).abs() <= 1e-12 * r.abs());
    }

    #[test]
    fn evenness(f in density(), x in point(), p in 1.0f64..4.0) {
        let spec = TransformSpec::new(p, 3, LEVEL).unwrap();
        let neg: Vec<f64> = x.iter().map(|c| -c).collect();
        let a = lp_cosine(&f, &spec, &x).unwrap();
        let b = lp_cosine(&f, &spec, &neg).unwrap();
        prop_assert!((a - b).abs() <= 1e-12 * a.abs());
        let r = radon(&f, &x, LEVEL).unwrap();
        prop_assert!((r - radon(&f, &neg, LEVEL).unwrap()).abs() <= 1e-12 * r.abs());
    }

    #[test]
    fn euler_identity(f in density(), x in point(), p in 1.0f64..4.0) {
        let spec = TransformSpec::new(p, 3, LEVEL).unwrap();
        let hp = lp_cosine(&f, &spec, &x).unwrap();
        let g = grad_hp(&f, p, &x, LEVEL).unwrap();
        let lhs: f64 = g.iter().zip(&x).map(|(a, b)| a * b).sum();
        prop_assert!((lhs - p * hp).abs() <= 1e-10 * (p * hp).abs());
        // H is 1-homogeneous, so its Hessian kills the radial direction
        let h = hessian_h(&f, p, &x, LEVEL).unwrap();
        let hx = h.mul_vec(&x);
        prop_assert!(hx.iter().all(|v| v.abs() < 1e-8 * h.frobenius()));
    }

    #[test]
    fn rotation_equivariance(f in density(), x in point(), p in 1.0f64..3.5,
                             a in 0.0f64..6.3, b in 0.0f64..3.2, c in 0.0f64..6.3) {
        let u = rotation(a, b, c);
        let g = f.rotated(u.clone()).unwrap();
        let ux = u.mul_vec(&x);
        let spec = TransformSpec::new(p, 3, LEVEL).unwrap();
        let lhs = lp_cosine(&g, &spec, &x).unwrap();
        let rhs = lp_cosine(&f, &spec, &ux).unwrap();
        prop_assert!((lhs - rhs).abs() <= 1e-8 * rhs.abs());
        let ra = reverse_weingarten(&g, p, &x, LEVEL).unwrap().radii;
        let rb = reverse_weingarten(&f, p, &ux, LEVEL).unwrap().radii;
        for (s, t) in ra.iter().zip(&rb) {
            prop_assert!((s - t).abs() <= 1e-8 * t.abs().max(1.0));
        }
    }
}
