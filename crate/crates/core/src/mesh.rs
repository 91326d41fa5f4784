//! Triangulated crooked surfaces and their combinatorial topology.
//!
//! The basic surface is charted in four pieces: the stem as two squares in
//! torus coordinates `(σ, δ)` with point
//! `(cos α, 0, sin α, sin β, cos β)`, `α = (σ+δ)/2`, `β = (σ-δ)/2`, and each
//! wing as `(sin s cos τ, sin s sin τ, ±cos s, cos s, -sin s)`. Any other
//! surface is the image of this one under a conformal map.

use std::collections::{HashMap, VecDeque};
use std::f64::consts::PI;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{GeomError, Result};
use crate::einstein::EinPoint;
use crate::forms::Vec5;
use crate::group::Iso32;
use crate::surface::{CrookedSurface, SurfaceTester, EPS_MESH};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum PartLabel {
    Stem,
    WingPlus,
    WingMinus,
    Cone,
    Scaffold,
}

impl PartLabel {
    pub fn name(self) -> &'static str {
        match self {
            PartLabel::Stem => "stem",
            PartLabel::WingPlus => "wing_plus",
            PartLabel::WingMinus => "wing_minus",
            PartLabel::Cone => "cone",
            PartLabel::Scaffold => "scaffold",
        }
    }
}

/// A chart of the basic surface, evaluated at a parameter pair.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Chart {
    Stem,
    WingMinus,
    WingPlus,
}

impl Chart {
    pub fn eval(self, a: f64, b: f64) -> Vec5 {
        match self {
            Chart::Stem => {
                let (al, be) = ((a + b) / 2.0, (a - b) / 2.0);
                Vec5([al.cos(), 0.0, al.sin(), be.sin(), be.cos()])
            }
            Chart::WingMinus | Chart::WingPlus => {
                let sg = if self == Chart::WingMinus { 1.0 } else { -1.0 };
                let (tau, s) = (a, b);
                Vec5([s.sin() * tau.cos(), s.sin() * tau.sin(), sg * s.cos(), s.cos(), -s.sin()])
            }
        }
    }

    pub fn label(self) -> PartLabel {
        match self {
            Chart::Stem => PartLabel::Stem,
            Chart::WingMinus => PartLabel::WingMinus,
            Chart::WingPlus => PartLabel::WingPlus,
        }
    }
}

/// A triangle of the basic surface in parameter space.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ParamTriangle {
    pub chart: Chart,
    pub corners: [(f64, f64); 3],
}

/// Parameter rectangles `(chart, a0, a1, b0, b1, steps_a, steps_b)`.
fn basic_patches(n: usize) -> Vec<(Chart, f64, f64, f64, f64, usize, usize)> {
    vec![
        (Chart::Stem, 0.0, PI, PI, 2.0 * PI, n, n),
        (Chart::Stem, PI, 2.0 * PI, 0.0, PI, n, n),
        (Chart::WingMinus, 0.0, PI, 0.0, PI, n, 2 * n),
        (Chart::WingPlus, PI, 2.0 * PI, 0.0, PI, n, 2 * n),
    ]
}

/// Parameter triangulation of the basic surface at resolution `n`.
pub fn basic_param_triangles(n: usize) -> Vec<ParamTriangle> {
    let mut out = Vec::new();
    for (chart, a0, a1, b0, b1, na, nb) in basic_patches(n) {
        let pa = |i: usize| a0 + (a1 - a0) * i as f64 / na as f64;
        let pb = |j: usize| b0 + (b1 - b0) * j as f64 / nb as f64;
        for i in 0..na {
            for j in 0..nb {
                let c00 = (pa(i), pb(j));
                let c10 = (pa(i + 1), pb(j));
                let c01 = (pa(i), pb(j + 1));
                let c11 = (pa(i + 1), pb(j + 1));
                out.push(ParamTriangle { chart, corners: [c00, c10, c11] });
                out.push(ParamTriangle { chart, corners: [c00, c11, c01] });
            }
        }
    }
    out
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SurfaceMesh {
    pub vertices: Vec<EinPoint>,
    pub faces: Vec<[usize; 3]>,
    pub labels: Vec<PartLabel>,
    /// Sampled scaffolding photons, exported as polylines.
    pub scaffold: Vec<Vec<EinPoint>>,
}

/// Merges points that agree projectively (both signs) up to `tol`.
struct Welder {
    tol: f64,
    cells: HashMap<[i64; 5], Vec<usize>>,
    reps: Vec<Vec5>,
}

impl Welder {
    fn new(tol: f64) -> Self {
        Self { tol, cells: HashMap::new(), reps: Vec::new() }
    }

    fn key(&self, v: &Vec5) -> [i64; 5] {
        std::array::from_fn(|i| (v[i] / (4.0 * self.tol)).round() as i64)
    }

    fn find(&self, v: &Vec5) -> Option<usize> {
        for w in [v.clone(), -v] {
            let k = self.key(&w);
            for code in 0..243usize {
                let mut c = code;
                let nk: [i64; 5] = std::array::from_fn(|i| {
                    let d = (c % 3) as i64 - 1;
                    c /= 3;
                    k[i] + d
                });
                if let Some(ids) = self.cells.get(&nk) {
                    for &id in ids {
                        if (&self.reps[id] - &w).max_abs() <= self.tol {
                            return Some(id);
                        }
                    }
                }
            }
        }
        None
    }

    fn insert(&mut self, v: Vec5) -> usize {
        let v = v.normalized();
        if let Some(id) = self.find(&v) {
            return id;
        }
        let id = self.reps.len();
        self.cells.entry(self.key(&v)).or_default().push(id);
        self.reps.push(v);
        id
    }
}

/// The glued basic mesh: welded vertices in basic coordinates.
pub fn basic_mesh(n: usize) -> Result<(Vec<Vec5>, Vec<[usize; 3]>, Vec<PartLabel>)> {
    if n < 4 {
        return Err(GeomError::ResolutionTooSmall { got: n, min: 4 });
    }
    let mut w = Welder::new(1e-9);
    let mut faces = Vec::new();
    let mut labels = Vec::new();
    for t in basic_param_triangles(n) {
        let ids = t.corners.map(|(a, b)| w.insert(t.chart.eval(a, b)));
        if ids[0] == ids[1] || ids[1] == ids[2] || ids[0] == ids[2] {
            continue;
        }
        faces.push(ids);
        labels.push(t.chart.label());
    }
    Ok((w.reps, faces, labels))
}

/// Triangulated surface; vertices are images of the welded basic mesh.
pub fn sample_surface(s: &CrookedSurface, n: usize) -> Result<SurfaceMesh> {
    let (reps, faces, labels) = basic_mesh(n)?;
    let g = s.from_basic()?;
    let vertices: Vec<EinPoint> = reps.par_iter().map(|v| EinPoint::from_rep_unchecked(g.apply_vec(v))).collect();
    let sc = s.scaffolding()?;
    let scaffold = [&sc.phi_inf, &sc.psi_inf, &sc.phi_p, &sc.psi_p]
        .iter()
        .map(|ph| (0..=2 * n).map(|k| ph.point(PI * k as f64 / (2 * n) as f64)).collect())
        .collect();
    Ok(SurfaceMesh { vertices, faces, labels, scaffold })
}

/// A compact motion (in `O(3) × O(2)`) carrying `p0` to `p`.
pub fn compact_motion_to(p: &EinPoint) -> Iso32 {
    let y = p.rep().normalized();
    let v = Vec5([y[0], y[1], y[2], 0.0, 0.0]).normalized();
    let w = Vec5([0.0, 0.0, 0.0, y[3], y[4]]).normalized();
    let householder = |from: usize, to: &Vec5| -> [[f64; 5]; 5] {
        let mut u = -to;
        u.0[from] += 1.0;
        let n2 = u.dot(&u);
        std::array::from_fn(|i| {
            std::array::from_fn(|j| {
                let id = if i == j { 1.0 } else { 0.0 };
                if n2 < 1e-30 { id } else { id - 2.0 * u[i] * u[j] / n2 }
            })
        })
    };
    let a = Iso32::from_rows_unchecked(householder(0, &v));
    let b = Iso32::from_rows_unchecked(householder(4, &w));
    a.compose(&b)
}

/// The lightcone of `p`: `(cos s, sin s cos θ, sin s sin θ, sin s, cos s)`
/// is the lightcone of `p0`, moved by a compact motion.
pub fn lightcone_mesh(p: &EinPoint, n: usize) -> Result<SurfaceMesh> {
    if n < 4 {
        return Err(GeomError::ResolutionTooSmall { got: n, min: 4 });
    }
    let mut w = Welder::new(1e-9);
    let mut faces = Vec::new();
    let eval = |i: usize, j: usize| {
        let (s, t) = (PI * i as f64 / n as f64, PI * j as f64 / n as f64);
        Vec5([s.cos(), s.sin() * t.cos(), s.sin() * t.sin(), s.sin(), s.cos()])
    };
    for i in 0..n {
        for j in 0..2 * n {
            let c = [eval(i, j), eval(i + 1, j), eval(i + 1, j + 1), eval(i, j + 1)].map(|v| w.insert(v));
            for f in [[c[0], c[1], c[2]], [c[0], c[2], c[3]]] {
                if f[0] != f[1] && f[1] != f[2] && f[0] != f[2] {
                    faces.push(f);
                }
            }
        }
    }
    let g = compact_motion_to(p);
    let vertices = w.reps.iter().map(|v| EinPoint::from_rep_unchecked(g.apply_vec(v))).collect();
    let labels = vec![PartLabel::Cone; faces.len()];
    Ok(SurfaceMesh { vertices, faces, labels, scaffold: Vec::new() })
}

impl SurfaceMesh {
    pub fn transformed(&self, g: &Iso32) -> Self {
        Self {
            vertices: self.vertices.iter().map(|v| v.transform(g)).collect(),
            faces: self.faces.clone(),
            labels: self.labels.clone(),
            scaffold: self.scaffold.iter().map(|l| l.iter().map(|v| v.transform(g)).collect()).collect(),
        }
    }

    /// Vertices failing the surface membership test.
    pub fn off_surface(&self, s: &CrookedSurface) -> Result<Vec<usize>> {
        let t = SurfaceTester::new(s)?;
        Ok((0..self.vertices.len()).filter(|&i| !t.contains(self.vertices[i].rep(), EPS_MESH)).collect())
    }

    pub fn max_edge_length(&self) -> f64 {
        self.faces
            .iter()
            .flat_map(|f| [(f[0], f[1]), (f[1], f[2]), (f[2], f[0])])
            .map(|(a, b)| round_angle(self.vertices[a].rep(), self.vertices[b].rep()))
            .fold(0.0, f64::max)
    }
}

/// Angle between the lines through two nonzero vectors.
pub fn round_angle(a: &Vec5, b: &Vec5) -> f64 {
    let a = a.normalized();
    let b = b.normalized();
    let d = if a.dot(&b) >= 0.0 { &a - &b } else { &a + &b };
    2.0 * (d.norm() / 2.0).min(1.0).asin()
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TopologyReport {
    pub euler: i64,
    pub orientable: bool,
    pub vertices: usize,
    pub edges: usize,
    pub faces: usize,
}

/// Euler characteristic and orientability of a closed triangle mesh.
pub fn mesh_topology_check(faces: &[[usize; 3]]) -> Result<TopologyReport> {
    let mut edges: HashMap<(usize, usize), Vec<(usize, bool)>> = HashMap::new();
    for (fi, f) in faces.iter().enumerate() {
        for k in 0..3 {
            let (a, b) = (f[k], f[(k + 1) % 3]);
            edges.entry((a.min(b), a.max(b))).or_default().push((fi, a < b));
        }
    }
    let open = edges.values().filter(|v| v.len() != 2).count();
    if open > 0 {
        return Err(GeomError::UngluedMesh(open));
    }
    let mut verts: Vec<usize> = faces.iter().flatten().copied().collect();
    verts.sort_unstable();
    verts.dedup();

    let mut adj: Vec<Vec<(usize, bool)>> = vec![Vec::new(); faces.len()];
    for v in edges.values() {
        let ((f, da), (g, db)) = (v[0], v[1]);
        // same traversal direction means the faces must have opposite orientations
        adj[f].push((g, da == db));
        adj[g].push((f, da == db));
    }
    let mut orient: Vec<Option<bool>> = vec![None; faces.len()];
    let mut orientable = true;
    for start in 0..faces.len() {
        if orient[start].is_some() {
            continue;
        }
        orient[start] = Some(true);
        let mut queue = VecDeque::from([start]);
        while let Some(f) = queue.pop_front() {
            let of = orient[f].unwrap_or(true);
            for &(g, flip) in &adj[f] {
                let want = of ^ flip;
                match orient[g] {
                    None => {
                        orient[g] = Some(want);
                        queue.push_back(g);
                    }
                    Some(o) if o != want => orientable = false,
                    _ => {}
                }
            }
        }
    }
    let (v, e, f) = (verts.len(), edges.len(), faces.len());
    Ok(TopologyReport { euler: v as i64 - e as i64 + f as i64, orientable, vertices: v, edges: e, faces: f })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::affine::Extension;
    use crate::einstein::{p0, p_inf};

    fn torus_faces(n: usize, m: usize) -> Vec<[usize; 3]> {
        let id = |i: usize, j: usize| (i % n) * m + (j % m);
        let mut f = Vec::new();
        for i in 0..n {
            for j in 0..m {
                f.push([id(i, j), id(i + 1, j), id(i + 1, j + 1)]);
                f.push([id(i, j), id(i + 1, j + 1), id(i, j + 1)]);
            }
        }
        f
    }

    #[test]
    fn control_meshes() {
        let t = mesh_topology_check(&torus_faces(5, 7)).unwrap();
        assert_eq!((t.euler, t.orientable), (0, true));
        let tetra = [[0, 1, 2], [0, 3, 1], [1, 3, 2], [0, 2, 3]];
        let s = mesh_topology_check(&tetra).unwrap();
        assert_eq!((s.euler, s.orientable), (2, true));
        assert_eq!(mesh_topology_check(&[[0, 1, 2]]), Err(GeomError::UngluedMesh(3)));
    }

    #[test]
    fn basic_mesh_is_a_klein_bottle() {
        let (_, faces, _) = basic_mesh(8).unwrap();
        let t = mesh_topology_check(&faces).unwrap();
        assert_eq!(t.euler, 0);
        assert!(!t.orientable);
    }

    #[test]
    fn basic_mesh_vertices_on_surface() {
        let s = CrookedSurface::basic(Extension::Positive);
        let m = sample_surface(&s, 8).unwrap();
        assert!(m.off_surface(&s).unwrap().is_empty());
        assert!(m.vertices.iter().any(|v| v.same_as(&p0(), 1e-14)));
        assert!(m.vertices.iter().any(|v| v.same_as(&p_inf(), 1e-14)));
        assert_eq!(sample_surface(&s, 3), Err(GeomError::ResolutionTooSmall { got: 3, min: 4 }));
    }
}
