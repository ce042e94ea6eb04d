//! Even densities on `S^{n-1}` and the transforms acting on them: the
//! `L^p`-cosine transform, the spherical Radon transform, and zonotope
//! support functions of atomic measures.

use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::harmonics::real_sh;
use crate::linalg::{dot, norm, unit, Matrix};
use crate::specfun::is_even_integer;
use crate::squad::{build_sphere_rule, build_subsphere_rule, build_weighted_axis_rule, QuadratureRule};

/// Named closed-form densities. Parameters default to the values used by the
/// verification suites, so `{"name": "bump"}` is a complete preset.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "name", content = "params", rename_all = "kebab-case")]
pub enum Preset {
    /// `f = value`.
    Constant {
        #[serde(default = "one")]
        value: f64,
    },
    /// `f = offset + scale * prod_k xi_k^{alpha_k}`.
    Monomial {
        alpha: Vec<u32>,
        #[serde(default = "one")]
        scale: f64,
        #[serde(default)]
        offset: f64,
    },
    /// `f = offset + xi^T A xi`.
    Quadratic {
        matrix: Vec<Vec<f64>>,
        #[serde(default)]
        offset: f64,
    },
    /// Truncated real spherical-harmonic series on `S^2`, terms `(l, m, coef)`.
    Harmonics { terms: Vec<(usize, i64, f64)> },
    /// `1 + eps Re((xi_1 + i xi_2)^{2m})`, which is `1 + eps cos(2 m theta)`
    /// on `S^1`.
    Bump {
        #[serde(default = "half")]
        eps: f64,
        #[serde(default = "one_u32")]
        m: u32,
    },
    /// `max(0, 1 - c dist(xi, ±xi0)^2)` with chordal distance. With the
    /// default `c = 1/2` this equals `|<xi, xi0>|`, which vanishes exactly on
    /// `xi0^⊥`.
    VanishingPoint {
        #[serde(default = "half")]
        c: f64,
        #[serde(default)]
        xi0: Option<Vec<f64>>,
    },
    /// `exp(kappa <xi, axis>^2)`.
    Watson {
        #[serde(default = "one")]
        kappa: f64,
        #[serde(default)]
        axis: Option<Vec<f64>>,
    },
    /// Indicator of the symmetric cap pair `|<xi, axis>| >= cos(half_angle)`.
    Cap {
        #[serde(default = "half")]
        half_angle: f64,
        #[serde(default)]
        axis: Option<Vec<f64>>,
    },
}

fn one() -> f64 {
    1.0
}
fn half() -> f64 {
    0.5
}
fn one_u32() -> u32 {
    1
}

fn last_axis(n: usize) -> Vec<f64> {
    let mut e = vec![0.0; n];
    e[n - 1] = 1.0;
    e
}

fn first_axis(n: usize) -> Vec<f64> {
    let mut e = vec![0.0; n];
    e[0] = 1.0;
    e
}

impl Preset {
    /// Looks a preset up by name with default parameters.
    pub fn by_name(name: &str, dim: usize) -> Result<Preset> {
        let p = match name {
            "constant" => Preset::Constant { value: 1.0 },
            "bump" => Preset::Bump { eps: 0.5, m: 1 },
            "vanishing-point" => Preset::VanishingPoint { c: 0.5, xi0: None },
            "watson" => Preset::Watson { kappa: 1.0, axis: None },
            "cap" => Preset::Cap { half_angle: 0.5, axis: None },
            "monomial" => {
                let mut alpha = vec![0; dim];
                alpha[0] = 2;
                Preset::Monomial { alpha, scale: 1.0, offset: 0.0 }
            }
            "quadratic" => {
                let matrix = (0..dim)
                    .map(|i| (0..dim).map(|j| if i == j { 1.0 + i as f64 } else { 0.0 }).collect())
                    .collect();
                Preset::Quadratic { matrix, offset: 0.0 }
            }
            "harmonics" => Preset::Harmonics { terms: vec![(0, 0, 3.0), (2, 0, 0.5), (2, 2, 0.3), (4, 1, 0.2)] },
            other => return Err(Error::InvalidDensity(format!("unknown preset '{other}'"))),
        };
        Ok(p)
    }

    pub const NAMES: [&'static str; 8] =
        ["constant", "monomial", "quadratic", "harmonics", "bump", "vanishing-point", "watson", "cap"];

    fn validate(&self, dim: usize) -> Result<()> {
        let bad = |msg: String| Err(Error::InvalidDensity(msg));
        let check_axis = |a: &Option<Vec<f64>>| -> Result<()> {
            match a {
                Some(v) if v.len() != dim => Err(Error::DimensionMismatch { expected: dim, got: v.len() }),
                Some(v) => unit(v).map(|_| ()),
                None => Ok(()),
            }
        };
        match self {
            Preset::Constant { .. } => Ok(()),
            Preset::Monomial { alpha, .. } if alpha.len() != dim => {
                Err(Error::DimensionMismatch { expected: dim, got: alpha.len() })
            }
            Preset::Monomial { .. } => Ok(()),
            Preset::Quadratic { matrix, .. } => {
                if matrix.len() != dim || matrix.iter().any(|r| r.len() != dim) {
                    return bad(format!("quadratic preset needs a {dim}x{dim} matrix"));
                }
                Ok(())
            }
            Preset::Harmonics { terms } => {
                if dim != 3 {
                    return bad("harmonics preset is defined on S^2 only (dim 3)".into());
                }
                match terms.iter().find(|(l, m, _)| m.unsigned_abs() as usize > *l) {
                    Some((l, m, _)) => bad(format!("harmonic order |m| = {} exceeds degree l = {l}", m.abs())),
                    None => Ok(()),
                }
            }
            Preset::Bump { .. } => Ok(()),
            Preset::VanishingPoint { xi0: a, .. } | Preset::Watson { axis: a, .. } | Preset::Cap { axis: a, .. } => {
                check_axis(a)
            }
        }
    }

    fn is_even(&self) -> bool {
        match self {
            Preset::Monomial { alpha, .. } => alpha.iter().sum::<u32>() % 2 == 0,
            Preset::Harmonics { terms } => terms.iter().all(|(l, _, _)| l % 2 == 0),
            _ => true,
        }
    }

    fn eval(&self, xi: &[f64]) -> f64 {
        let n = xi.len();
        match self {
            Preset::Constant { value } => *value,
            Preset::Monomial { alpha, scale, offset } => {
                offset + scale * xi.iter().zip(alpha).map(|(x, &a)| x.powi(a as i32)).product::<f64>()
            }
            Preset::Quadratic { matrix, offset } => {
                offset + matrix.iter().zip(xi).map(|(row, xi_i)| xi_i * dot(row, xi)).sum::<f64>()
            }
            Preset::Harmonics { terms } => terms.iter().map(|&(l, m, c)| c * real_sh(l, m, xi)).sum(),
            Preset::Bump { eps, m } => {
                let (mut re, mut im) = (1.0, 0.0);
                for _ in 0..2 * m {
                    (re, im) = (re * xi[0] - im * xi[1], re * xi[1] + im * xi[0]);
                }
                1.0 + eps * re
            }
            Preset::VanishingPoint { c, xi0 } => {
                let a = xi0.clone().unwrap_or_else(|| first_axis(n));
                let a = unit(&a).expect("validated");
                let s = dot(xi, &a).abs();
                // min chord distance^2 to ±xi0 on the unit sphere
                let d2 = 2.0 - 2.0 * s;
                (1.0 - c * d2).max(0.0)
            }
            Preset::Watson { kappa, axis } => {
                let a = axis.as_deref().map(|a| unit(a).expect("validated")).unwrap_or_else(|| last_axis(n));
                (kappa * dot(xi, &a).powi(2)).exp()
            }
            Preset::Cap { half_angle, axis } => {
                let a = axis.as_deref().map(|a| unit(a).expect("validated")).unwrap_or_else(|| last_axis(n));
                if dot(xi, &a).abs() >= half_angle.cos() {
                    1.0
                } else {
                    0.0
                }
            }
        }
    }
}

/// Density samples aligned to the nodes of a quadrature rule.
#[derive(Debug, Clone, PartialEq)]
pub struct GridDensity {
    rule: Arc<QuadratureRule>,
    values: Vec<f64>,
    level: Option<usize>,
}

impl GridDensity {
    pub fn rule(&self) -> &QuadratureRule {
        &self.rule
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    /// Value at the nearest node. Linear scan; meant for tests and small grids.
    fn nearest(&self, xi: &[f64]) -> f64 {
        let mut best = (f64::NEG_INFINITY, 0);
        for (i, node) in self.rule.nodes().enumerate() {
            let c = dot(node, xi);
            if c > best.0 {
                best = (c, i);
            }
        }
        self.values[best.1]
    }
}

/// One atom `lambda (delta_u + delta_{-u}) / 2`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Atom {
    pub u: Vec<f64>,
    pub lambda: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub enum DensityKind {
    Preset(Preset),
    Grid(GridDensity),
    Atoms(Vec<Atom>),
    /// `xi -> base(R xi)` for an orthogonal `R`.
    Rotated { base: Box<SphericalDensity>, matrix: Matrix },
}

/// An even function or atomic measure on `S^{n-1}`.
#[derive(Debug, Clone, PartialEq)]
pub struct SphericalDensity {
    dim: usize,
    kind: DensityKind,
    evenized: bool,
}

impl SphericalDensity {
    pub fn preset(dim: usize, preset: Preset) -> Result<Self> {
        check_dim(dim)?;
        preset.validate(dim)?;
        Ok(SphericalDensity { dim, kind: DensityKind::Preset(preset), evenized: true })
    }

    pub fn constant(dim: usize, value: f64) -> Result<Self> {
        Self::preset(dim, Preset::Constant { value })
    }

    pub fn named(name: &str, dim: usize) -> Result<Self> {
        Self::preset(dim, Preset::by_name(name, dim)?)
    }

    /// Atomic measure `sum_i lambda_i (delta_{u_i} + delta_{-u_i}) / 2`;
    /// directions are normalized.
    pub fn atoms(dim: usize, atoms: Vec<(Vec<f64>, f64)>) -> Result<Self> {
        check_dim(dim)?;
        let mut out = Vec::with_capacity(atoms.len());
        for (u, lambda) in atoms {
            if u.len() != dim {
                return Err(Error::DimensionMismatch { expected: dim, got: u.len() });
            }
            if !(lambda > 0.0) || !lambda.is_finite() {
                return Err(Error::InvalidDensity(format!("atom weight must be positive, got {lambda}")));
            }
            out.push(Atom { u: unit(&u)?, lambda });
        }
        Ok(SphericalDensity { dim, kind: DensityKind::Atoms(out), evenized: true })
    }

    /// Samples on an arbitrary rule.
    pub fn grid_on_rule(rule: Arc<QuadratureRule>, values: Vec<f64>) -> Result<Self> {
        if values.len() != rule.len() {
            return Err(Error::InvalidDensity(format!(
                "grid has {} values for a rule with {} nodes",
                values.len(),
                rule.len()
            )));
        }
        let dim = rule.dim();
        Ok(SphericalDensity { dim, kind: DensityKind::Grid(GridDensity { rule, values, level: None }), evenized: true })
    }

    /// Samples on the standard sphere rule of the given level.
    pub fn grid(dim: usize, level: usize, values: Vec<f64>) -> Result<Self> {
        let rule = Arc::new(build_sphere_rule(dim, level)?);
        let mut d = Self::grid_on_rule(rule, values)?;
        if let DensityKind::Grid(g) = &mut d.kind {
            g.level = Some(level);
        }
        Ok(d)
    }

    /// Samples `f` on the standard sphere rule of the given level.
    pub fn grid_from_fn(dim: usize, level: usize, f: impl Fn(&[f64]) -> f64) -> Result<Self> {
        let rule = build_sphere_rule(dim, level)?;
        let values = rule.nodes().map(&f).collect();
        Self::grid(dim, level, values)
    }

    /// `xi -> self(R xi)`; `R` must be orthogonal.
    pub fn rotated(&self, matrix: Matrix) -> Result<Self> {
        if matrix.dim() != self.dim {
            return Err(Error::DimensionMismatch { expected: self.dim, got: matrix.dim() });
        }
        let rtr = Matrix::from_fn(self.dim, |i, j| dot(&matrix.column(i), &matrix.column(j)));
        let dev = (0..self.dim)
            .flat_map(|i| (0..self.dim).map(move |j| (i, j)))
            .map(|(i, j)| (rtr[(i, j)] - if i == j { 1.0 } else { 0.0 }).abs())
            .fold(0.0, f64::max);
        if dev > 1e-10 {
            return Err(Error::InvalidDensity(format!("rotation matrix is not orthogonal (deviation {dev:e})")));
        }
        Ok(SphericalDensity {
            dim: self.dim,
            kind: DensityKind::Rotated { base: Box::new(self.clone()), matrix },
            evenized: self.evenized,
        })
    }

    /// Same density with evaluation of the raw (possibly odd) function.
    pub fn raw(mut self) -> Self {
        self.evenized = false;
        self
    }

    /// Same density with evaluation of its even part.
    pub fn symmetrized(mut self) -> Self {
        self.evenized = true;
        self
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn kind(&self) -> &DensityKind {
        &self.kind
    }

    pub fn evenized(&self) -> bool {
        self.evenized
    }

    pub fn is_atomic(&self) -> bool {
        matches!(self.kind, DensityKind::Atoms(_))
    }

    /// Errors for atomic measures, which have no pointwise values.
    pub fn require_function(&self) -> Result<()> {
        if self.is_atomic() {
            return Err(Error::InvalidDensity("operation needs a density function, not an atomic measure".into()));
        }
        Ok(())
    }

    fn eval_raw(&self, xi: &[f64]) -> f64 {
        match &self.kind {
            DensityKind::Preset(p) => p.eval(xi),
            DensityKind::Grid(g) => g.nearest(xi),
            DensityKind::Atoms(_) => 0.0,
            DensityKind::Rotated { base, matrix } => base.eval(&matrix.mul_vec(xi)),
        }
    }

    fn needs_even_part(&self) -> bool {
        self.evenized
            && match &self.kind {
                DensityKind::Preset(p) => !p.is_even(),
                DensityKind::Rotated { .. } => false,
                _ => true,
            }
    }

    /// Pointwise value (the even part when `evenized`). Atomic measures
    /// evaluate to 0; see [`Self::require_function`].
    pub fn eval(&self, xi: &[f64]) -> f64 {
        if self.needs_even_part() {
            let neg: Vec<f64> = xi.iter().map(|c| -c).collect();
            0.5 * (self.eval_raw(xi) + self.eval_raw(&neg))
        } else {
            self.eval_raw(xi)
        }
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let wire: DensityJson = serde_json::from_str(text).map_err(|e| Error::InvalidDensity(e.to_string()))?;
        Self::from_wire(wire)
    }

    pub fn from_value(value: serde_json::Value) -> Result<Self> {
        let wire: DensityJson = serde_json::from_value(value).map_err(|e| Error::InvalidDensity(e.to_string()))?;
        Self::from_wire(wire)
    }

    fn from_wire(wire: DensityJson) -> Result<Self> {
        let d = match wire.body {
            DensityBody::Preset(p) => Self::preset(wire.dim, p.into_preset(wire.dim)?)?,
            DensityBody::Atoms { atoms } => Self::atoms(wire.dim, atoms)?,
            DensityBody::Grid { level, nodes, weights, values } => match (level, nodes, weights) {
                (Some(level), None, None) => Self::grid(wire.dim, level, values)?,
                (None, Some(nodes), Some(weights)) => {
                    if nodes.iter().any(|p| p.len() != wire.dim) {
                        return Err(Error::InvalidDensity("grid node of wrong dimension".into()));
                    }
                    let rule = QuadratureRule::from_parts(wire.dim, nodes, weights)?;
                    Self::grid_on_rule(Arc::new(rule), values)?
                }
                _ => return Err(Error::InvalidDensity("grid needs either 'level' or both 'nodes' and 'weights'".into())),
            },
            DensityBody::Rotated { matrix, base } => {
                let base = Self::from_value(base)?;
                if base.dim != wire.dim {
                    return Err(Error::DimensionMismatch { expected: wire.dim, got: base.dim });
                }
                base.rotated(Matrix::from(matrix))?
            }
        };
        Ok(if wire.evenized { d } else { d.raw() })
    }

    pub fn to_json_value(&self) -> serde_json::Value {
        let body = match &self.kind {
            DensityKind::Preset(p) => DensityBody::Preset(PresetJson::from_preset(p)),
            DensityKind::Atoms(a) => DensityBody::Atoms { atoms: a.iter().map(|a| (a.u.clone(), a.lambda)).collect() },
            DensityKind::Grid(g) => match g.level {
                Some(level) => DensityBody::Grid { level: Some(level), nodes: None, weights: None, values: g.values.clone() },
                None => DensityBody::Grid {
                    level: None,
                    nodes: Some(g.rule.nodes().map(<[f64]>::to_vec).collect()),
                    weights: Some(g.rule.weights().to_vec()),
                    values: g.values.clone(),
                },
            },
            DensityKind::Rotated { base, matrix } => {
                DensityBody::Rotated { matrix: matrix.clone().into(), base: base.to_json_value() }
            }
        };
        serde_json::to_value(DensityJson { dim: self.dim, evenized: self.evenized, body }).expect("density serializes")
    }

    pub fn to_json(&self) -> String {
        self.to_json_value().to_string()
    }
}

/// Wire format: `{"dim": n, "kind": "preset" | "grid" | "atoms" | "rotated", ...}`.
#[derive(Debug, Serialize, Deserialize)]
struct DensityJson {
    dim: usize,
    #[serde(default = "yes")]
    evenized: bool,
    #[serde(flatten)]
    body: DensityBody,
}

fn yes() -> bool {
    true
}

/// `{"name": ..., "params": {...}}` with `params` optional, so a bare name
/// selects the defaults.
#[derive(Debug, Serialize, Deserialize)]
struct PresetJson {
    name: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    params: Option<serde_json::Value>,
}

impl PresetJson {
    fn from_preset(p: &Preset) -> Self {
        serde_json::from_value(serde_json::to_value(p).expect("preset serializes")).expect("preset round trip")
    }

    fn into_preset(self, dim: usize) -> Result<Preset> {
        match self.params {
            None => Preset::by_name(&self.name, dim),
            Some(params) => serde_json::from_value(serde_json::json!({"name": self.name, "params": params}))
                .map_err(|e| Error::InvalidDensity(format!("preset '{}': {e}", self.name))),
        }
    }
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
enum DensityBody {
    Preset(PresetJson),
    Grid {
        #[serde(default, skip_serializing_if = "Option::is_none")]
        level: Option<usize>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        nodes: Option<Vec<Vec<f64>>>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        weights: Option<Vec<f64>>,
        values: Vec<f64>,
    },
    Atoms {
        atoms: Vec<(Vec<f64>, f64)>,
    },
    Rotated {
        matrix: Vec<Vec<f64>>,
        base: serde_json::Value,
    },
}

fn check_dim(dim: usize) -> Result<()> {
    if dim < 2 {
        return Err(Error::InvalidDimension(dim));
    }
    Ok(())
}

/// Exponent, dimension and quadrature resolution of a transform.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TransformSpec {
    pub p: f64,
    pub dim: usize,
    pub level: usize,
}

impl TransformSpec {
    pub fn new(p: f64, dim: usize, level: usize) -> Result<Self> {
        if !(p >= 1.0) || !p.is_finite() {
            return Err(Error::Precondition(format!("the L^p-cosine transform needs p >= 1, got p = {p}")));
        }
        check_dim(dim)?;
        if level == 0 {
            return Err(Error::InvalidLevel(level));
        }
        Ok(TransformSpec { p, dim, level })
    }

    /// For even integer `p` the generating density is not unique.
    pub fn p_is_even_integer(&self) -> bool {
        is_even_integer(self.p)
    }
}

pub(crate) fn check_point(f: &SphericalDensity, x: &[f64]) -> Result<()> {
    if x.len() != f.dim() {
        return Err(Error::DimensionMismatch { expected: f.dim(), got: x.len() });
    }
    Ok(())
}

/// `int |t|^q g(xi, t) f(xi) dxi` with `t = <x/|x|, xi>`, for several
/// integrands `g` at once (`g` fills one slot per output).
///
/// Densities are integrated with an axis rule aligned to `x`, so the kernel
/// `|t|^q` lives in the weights and no node sits on `t = 0`; grids use their
/// own nodes and atoms are summed exactly over both `±u`.
pub(crate) fn weighted_moments<G>(
    f: &SphericalDensity,
    q: f64,
    x: &[f64],
    level: usize,
    outputs: usize,
    g: G,
) -> Result<Vec<f64>>
where
    G: Fn(&[f64], f64, &mut [f64]) + Sync,
{
    check_point(f, x)?;
    let axis = unit(x)?;
    let out = match &f.kind {
        DensityKind::Atoms(atoms) => {
            let mut total = vec![0.0; outputs];
            let mut buf = vec![0.0; outputs];
            for a in atoms {
                for sign in [1.0, -1.0] {
                    let xi: Vec<f64> = a.u.iter().map(|c| sign * c).collect();
                    let t = dot(&axis, &xi);
                    g(&xi, t, &mut buf);
                    let k = 0.5 * a.lambda * t.abs().powf(q);
                    for (acc, b) in total.iter_mut().zip(&buf) {
                        *acc += k * b;
                    }
                }
            }
            total
        }
        DensityKind::Grid(grid) => {
            let rule = grid.rule();
            let values = grid.values();
            rule.integrate_many(outputs, |i, xi, o| {
                let t = dot(&axis, xi);
                g(xi, t, o);
                let k = t.abs().powf(q) * values[i];
                o.iter_mut().for_each(|v| *v *= k);
            })
        }
        _ => {
            let rule = build_weighted_axis_rule(&axis, q, level)?;
            rule.integrate_many(outputs, |_, xi, o| {
                let t = dot(&axis, xi);
                g(xi, t, o);
                let fx = f.eval(xi);
                o.iter_mut().for_each(|v| *v *= fx);
            })
        }
    };
    if out.iter().any(|v| !v.is_finite()) {
        return Err(Error::Domain("singular kernel hit a grid node or atom on the great subsphere x^⊥".into()));
    }
    Ok(out)
}

/// `int |<x, xi>|^q f(xi) dxi` at a nonzero `x`.
pub(crate) fn kernel_integral(f: &SphericalDensity, q: f64, x: &[f64], level: usize) -> Result<f64> {
    let r = norm(x);
    if r == 0.0 {
        return Err(Error::ZeroVector);
    }
    Ok(r.powf(q) * weighted_moments(f, q, x, level, 1, |_, _, o| o[0] = 1.0)?[0])
}

/// `H^p(x) = int |<x, xi>|^p f(xi) dxi`; zero at the origin.
pub fn lp_cosine(f: &SphericalDensity, spec: &TransformSpec, x: &[f64]) -> Result<f64> {
    check_point(f, x)?;
    if norm(x) == 0.0 {
        return Ok(0.0);
    }
    kernel_integral(f, spec.p, x, spec.level)
}

/// Cosine transform `Tf = T_1 f`.
pub fn cosine(f: &SphericalDensity, x: &[f64], level: usize) -> Result<f64> {
    lp_cosine(f, &TransformSpec::new(1.0, f.dim(), level)?, x)
}

/// `Rf(x) = int_{S^{n-1} ∩ x^⊥} f(xi) dxi`.
pub fn radon(f: &SphericalDensity, x: &[f64], level: usize) -> Result<f64> {
    check_point(f, x)?;
    if f.is_atomic() {
        return Err(Error::InvalidDensity("the spherical Radon transform of an atomic measure is not a function".into()));
    }
    let rule = build_subsphere_rule(x, level)?;
    Ok(rule.integrate(|xi| f.eval(xi)))
}

/// `h_Z(x) = sum_i lambda_i |<u_i, x>|` for the zonotope generated by atoms.
pub fn zonotope_support(atoms: &SphericalDensity, x: &[f64]) -> Result<f64> {
    check_point(atoms, x)?;
    match &atoms.kind {
        DensityKind::Atoms(list) => Ok(list.iter().map(|a| a.lambda * dot(&a.u, x).abs()).sum()),
        _ => Err(Error::InvalidDensity("zonotope support needs an atomic measure".into())),
    }
}

/// `H(x) = (H^p(x))^{1/p}`, the support function of the associated body.
pub fn support_value(f: &SphericalDensity, spec: &TransformSpec, x: &[f64]) -> Result<f64> {
    let hp = lp_cosine(f, spec, x)?;
    if hp < 0.0 {
        return Err(Error::Domain(format!("H^p(x) = {hp:e} is negative; no support function")));
    }
    Ok(hp.powf(1.0 / spec.p))
}

impl QuadratureRule {
    /// A rule from explicit nodes and weights (used for grid densities read
    /// from JSON). Nodes are normalized; exactness degree is reported as 0.
    pub fn from_parts(dim: usize, nodes: Vec<Vec<f64>>, weights: Vec<f64>) -> Result<QuadratureRule> {
        if nodes.len() != weights.len() {
            return Err(Error::InvalidDensity("grid nodes and weights differ in length".into()));
        }
        let mut flat = Vec::with_capacity(nodes.len() * dim);
        for p in &nodes {
            flat.extend(unit(p)?);
        }
        Ok(QuadratureRule::custom(dim, flat, weights))
    }
}
