//! Boundary meshes of the bodies in `R^3`: boundary points `grad H(u)` over
//! a Fibonacci grid, triangulated by their convex hull and written as OBJ.

use std::collections::HashSet;
use std::fmt::Write as _;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::convexity::{boundary_point, fibonacci_sphere};
use crate::error::{Error, Result};
use crate::transforms::SphericalDensity;

type P3 = [f64; 3];

fn sub(a: P3, b: P3) -> P3 {
    [a[0] - b[0], a[1] - b[1], a[2] - b[2]]
}

fn cross(a: P3, b: P3) -> P3 {
    [a[1] * b[2] - a[2] * b[1], a[2] * b[0] - a[0] * b[2], a[0] * b[1] - a[1] * b[0]]
}

fn dot3(a: P3, b: P3) -> f64 {
    a[0] * b[0] + a[1] * b[1] + a[2] * b[2]
}

fn len3(a: P3) -> f64 {
    dot3(a, a).sqrt()
}

struct Face {
    v: [usize; 3],
    normal: P3,
    offset: f64,
    alive: bool,
}

impl Face {
    fn new(pts: &[P3], v: [usize; 3]) -> Face {
        let n = cross(sub(pts[v[1]], pts[v[0]]), sub(pts[v[2]], pts[v[0]]));
        let l = len3(n);
        let normal = if l > 0.0 { [n[0] / l, n[1] / l, n[2] / l] } else { n };
        Face { v, normal, offset: dot3(normal, pts[v[0]]), alive: true }
    }

    fn height(&self, p: P3) -> f64 {
        dot3(self.normal, p) - self.offset
    }
}

/// Triangles of the convex hull of `points`, oriented counter-clockwise when
/// seen from outside. Interior points are left unreferenced.
pub fn convex_hull(points: &[P3]) -> Result<Vec<[usize; 3]>> {
    if points.len() < 4 {
        return Err(Error::DegenerateHull(format!("need at least 4 points, got {}", points.len())));
    }
    let scale = points.iter().map(|&p| len3(p)).fold(0.0, f64::max).max(f64::MIN_POSITIVE);
    let eps = 1e-12 * scale;

    // initial tetrahedron from extreme points
    let i0 = 0;
    let far = |score: &dyn Fn(P3) -> f64| {
        (0..points.len()).max_by(|&a, &b| score(points[a]).total_cmp(&score(points[b]))).expect("nonempty")
    };
    let i1 = far(&|p| len3(sub(p, points[i0])));
    let d01 = sub(points[i1], points[i0]);
    let i2 = far(&|p| len3(cross(d01, sub(p, points[i0]))));
    let n012 = cross(d01, sub(points[i2], points[i0]));
    let i3 = far(&|p| dot3(n012, sub(p, points[i0])).abs());
    if len3(d01) <= eps || len3(n012) <= eps * scale || dot3(n012, sub(points[i3], points[i0])).abs() <= eps * scale * scale {
        return Err(Error::DegenerateHull("points are coplanar".into()));
    }
    let centroid = {
        let s = [i0, i1, i2, i3].iter().fold([0.0; 3], |acc, &i| {
            let p = points[i];
            [acc[0] + p[0], acc[1] + p[1], acc[2] + p[2]]
        });
        [s[0] / 4.0, s[1] / 4.0, s[2] / 4.0]
    };
    let mut faces: Vec<Face> = Vec::new();
    for tri in [[i0, i1, i2], [i0, i1, i3], [i0, i2, i3], [i1, i2, i3]] {
        let mut f = Face::new(points, tri);
        if f.height(centroid) > 0.0 {
            f = Face::new(points, [tri[0], tri[2], tri[1]]);
        }
        faces.push(f);
    }

    let seeds = [i0, i1, i2, i3];
    for (i, &p) in points.iter().enumerate() {
        if seeds.contains(&i) {
            continue;
        }
        let visible: Vec<usize> = (0..faces.len()).filter(|&k| faces[k].alive && faces[k].height(p) > eps).collect();
        if visible.is_empty() {
            continue;
        }
        let edges: HashSet<(usize, usize)> = visible
            .iter()
            .flat_map(|&k| {
                let v = faces[k].v;
                [(v[0], v[1]), (v[1], v[2]), (v[2], v[0])]
            })
            .collect();
        for &k in &visible {
            faces[k].alive = false;
        }
        let horizon: Vec<(usize, usize)> = edges.iter().copied().filter(|&(a, b)| !edges.contains(&(b, a))).collect();
        for (a, b) in horizon {
            faces.push(Face::new(points, [a, b, i]));
        }
    }
    Ok(faces.into_iter().filter(|f| f.alive).map(|f| f.v).collect())
}

/// Vertices and triangles of a boundary mesh.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Mesh {
    pub vertices: Vec<P3>,
    /// Outer normals the vertices were computed at.
    pub normals: Vec<P3>,
    pub faces: Vec<[usize; 3]>,
}

impl Mesh {
    pub fn from_points(vertices: Vec<P3>, normals: Vec<P3>) -> Result<Mesh> {
        let faces = convex_hull(&vertices)?;
        Ok(Mesh { vertices, normals, faces })
    }

    /// Wavefront OBJ text with 1-based face indices.
    pub fn to_obj(&self) -> String {
        let mut out = String::new();
        for v in &self.vertices {
            writeln!(out, "v {:.12} {:.12} {:.12}", v[0], v[1], v[2]).expect("string write");
        }
        for f in &self.faces {
            writeln!(out, "f {} {} {}", f[0] + 1, f[1] + 1, f[2] + 1).expect("string write");
        }
        out
    }

    /// Number of distinct undirected edges.
    pub fn edge_count(&self) -> usize {
        self.faces
            .iter()
            .flat_map(|f| [(f[0], f[1]), (f[1], f[2]), (f[2], f[0])])
            .map(|(a, b)| (a.min(b), a.max(b)))
            .collect::<HashSet<_>>()
            .len()
    }

    /// Vertices that appear in some face.
    pub fn used_vertices(&self) -> usize {
        self.faces.iter().flatten().collect::<HashSet<_>>().len()
    }
}

/// Boundary points over a Fibonacci grid of `count` normals, triangulated.
pub fn body_mesh(f: &SphericalDensity, p: f64, count: usize, level: usize) -> Result<Mesh> {
    if f.dim() != 3 {
        return Err(Error::Precondition(format!("meshes are built in dimension 3, got {}", f.dim())));
    }
    let normals: Vec<P3> = fibonacci_sphere(count).into_iter().map(|u| [u[0], u[1], u[2]]).collect();
    let vertices = normals
        .par_iter()
        .map(|u| boundary_point(f, p, u, level).map(|b| [b[0], b[1], b[2]]))
        .collect::<Result<Vec<_>>>()?;
    Mesh::from_points(vertices, normals)
}
