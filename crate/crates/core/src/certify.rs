//! Sampling certificates for crooked surfaces: round distances, separation
//! margins, component counts of the complement and spacelike-circle checks.

use std::f64::consts::PI;
use std::num::NonZero;

use kiddo::immutable::float::kdtree::ImmutableKdTree;
use kiddo::SquaredEuclidean;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::einstein::{lightcone_intersection, param_rep, EinPoint};
use crate::forms::{form32, Vec5};
use crate::group::Iso32;
use crate::mesh::{basic_param_triangles, round_angle, ParamTriangle};
use crate::surface::CrookedSurface;

type Tree = ImmutableKdTree<f64, u32, 5, 32>;

/// Angle between the lines of two representatives; a metric on Ein^3.
pub fn round_distance(p: &EinPoint, q: &EinPoint) -> f64 {
    round_angle(p.rep(), q.rep())
}

/// Target round edge length of the refined sample cloud at resolution `n`.
pub fn grid_diameter(n: usize) -> f64 {
    2.0 / n as f64
}

/// Unit representatives covering a surface: parameter triangles are split
/// until every image edge is shorter than `h`.
#[derive(Clone, Debug)]
pub struct SampleCloud {
    /// Points grouped by base triangle.
    pub groups: Vec<Vec<[f64; 5]>>,
    /// Longest image edge among the final triangles.
    pub max_edge: f64,
}

fn sphere_angle(a: &Vec5, b: &Vec5) -> f64 {
    2.0 * ((a - b).norm() / 2.0).min(1.0).asin()
}

/// Image corners and longest image edge of a refined parameter triangle.
struct Leaf {
    tri: ParamTriangle,
    img: Vec<Vec5>,
    edge: f64,
}

fn leaf_of(g: &Iso32, t: &ParamTriangle) -> Leaf {
    let img = t.corners.iter().map(|&(a, b)| g.apply_vec(&t.chart.eval(a, b)).normalized()).collect();
    Leaf { tri: *t, img, edge: f64::INFINITY }
}

/// Bisects the edge with the longest image until all are at most `h`;
/// Lorentzian motions stretch anisotropically so uniform splitting would
/// oversample the short direction. Edge images are measured on the sphere
/// through their midpoints, so an edge whose image bends back towards its
/// start is still split.
fn split_until(g: &Iso32, leaf: Leaf, h: f64, depth: u32, out: &mut Vec<Leaf>) {
    let Leaf { tri: t, img, .. } = leaf;
    let c = t.corners;
    let edge = |i: usize, j: usize| {
        let m = ((c[i].0 + c[j].0) / 2.0, (c[i].1 + c[j].1) / 2.0);
        let mi = g.apply_vec(&t.chart.eval(m.0, m.1)).normalized();
        let len = sphere_angle(&img[i], &mi) + sphere_angle(&mi, &img[j]);
        (len, m, mi)
    };
    let edges = [edge(0, 1), edge(1, 2), edge(2, 0)];
    let k = (0..3).max_by(|&a, &b| edges[a].0.total_cmp(&edges[b].0)).unwrap_or(0);
    if edges[k].0 <= h || depth == 0 {
        out.push(Leaf { tri: t, img, edge: edges[k].0 });
        return;
    }
    let (i, j, l) = (k, (k + 1) % 3, (k + 2) % 3);
    let (_, m, mi) = edges[k].clone();
    let first = Leaf { tri: ParamTriangle { chart: t.chart, corners: [c[i], m, c[l]] }, img: vec![img[i].clone(), mi.clone(), img[l].clone()], edge: 0.0 };
    let second = Leaf { tri: ParamTriangle { chart: t.chart, corners: [m, c[j], c[l]] }, img: vec![mi, img[j].clone(), img[l].clone()], edge: 0.0 };
    split_until(g, first, h, depth - 1, out);
    split_until(g, second, h, depth - 1, out);
}

/// Base triangulation resolution of sample clouds; each base triangle's
/// refined points form one group.
pub const CLOUD_BASE: usize = 16;

fn dedup_points(points: &mut Vec<[f64; 5]>) {
    points.sort_unstable_by(|a, b| {
        a.iter().zip(b).map(|(x, y)| x.total_cmp(y)).find(|o| o.is_ne()).unwrap_or(std::cmp::Ordering::Equal)
    });
    points.dedup();
}

/// Refines every base triangle until image edges are at most `h`; points
/// are grouped by intermediate triangles of edge at most `12h`.
pub fn sample_cloud(s: &CrookedSurface, h: f64) -> Result<SampleCloud> {
    let g = s.from_basic()?;
    let parts: Vec<Vec<(Vec<[f64; 5]>, f64)>> = basic_param_triangles(CLOUD_BASE)
        .par_iter()
        .map(|t| {
            let mut coarse = Vec::new();
            split_until(&g, leaf_of(&g, t), 12.0 * h, 64, &mut coarse);
            coarse
                .into_iter()
                .map(|c| {
                    let mut fine = Vec::new();
                    split_until(&g, c, h, 64, &mut fine);
                    let m = fine.iter().map(|l| l.edge).fold(0.0, f64::max);
                    let mut pts: Vec<[f64; 5]> = fine.into_iter().map(|l| l.img[0].0).collect();
                    // collapsed chart edges repeat points
                    dedup_points(&mut pts);
                    (pts, m)
                })
                .collect()
        })
        .collect();
    let parts: Vec<(Vec<[f64; 5]>, f64)> = parts.into_iter().flatten().collect();
    let max_edge = parts.iter().map(|p| p.1).fold(0.0, f64::max);
    Ok(SampleCloud { groups: parts.into_iter().map(|p| p.0).collect(), max_edge })
}

impl SampleCloud {
    pub fn len(&self) -> usize {
        self.groups.iter().map(Vec::len).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn flat(&self) -> Vec<[f64; 5]> {
        let mut all: Vec<[f64; 5]> = self.groups.iter().flatten().copied().collect();
        dedup_points(&mut all);
        all
    }

    /// Drops points within round distance `radius` of any of `centres`.
    pub fn excluding(&self, centres: &[EinPoint], radius: f64) -> Self {
        let groups = self
            .groups
            .iter()
            .map(|g| g.iter().filter(|p| centres.iter().all(|c| round_angle(&Vec5(**p), c.rep()) > radius)).copied().collect())
            .collect();
        Self { groups, max_edge: self.max_edge }
    }
}

fn chord_to_round(c: f64) -> f64 {
    2.0 * (c / 2.0).min(1.0).asin()
}

fn round_to_chord(a: f64) -> f64 {
    2.0 * (a.min(PI) / 2.0).sin()
}

/// Nearest-neighbour structure over both lifts of each point.
pub struct CloudIndex {
    tree: Tree,
    empty: bool,
}

impl CloudIndex {
    pub fn new(points: &[[f64; 5]]) -> Self {
        let both: Vec<[f64; 5]> = points.iter().flat_map(|p| [*p, p.map(|x| -x)]).collect();
        Self { tree: Tree::new_from_slice(&both), empty: points.is_empty() }
    }

    /// Euclidean distance from a point of R^5 to the nearest indexed lift.
    pub fn chord(&self, q: &[f64; 5]) -> f64 {
        if self.empty {
            return f64::INFINITY;
        }
        self.tree.nearest_one::<SquaredEuclidean>(q).distance.sqrt()
    }

    /// Round distance from a unit representative to the nearest indexed point.
    pub fn distance(&self, q: &[f64; 5]) -> f64 {
        chord_to_round(self.chord(q))
    }

    /// Whether some indexed point lies within round distance `radius`.
    pub fn any_within(&self, q: &[f64; 5], radius: f64) -> bool {
        if self.empty {
            return false;
        }
        let c = round_to_chord(radius);
        let one = NonZero::new(1).expect("nonzero");
        !self.tree.nearest_n_within::<SquaredEuclidean>(q, c * c, one, false).is_empty()
    }
}

/// Least round distance from grouped points to an index. Groups are
/// bounded by balls, visited in order of their lower bound, and skipped once
/// the bound exceeds the best distance found.
fn grouped_distance(groups: &[Vec<[f64; 5]>], idx: &CloudIndex) -> f64 {
    let mut bounds: Vec<(f64, usize)> = groups
        .par_iter()
        .enumerate()
        .filter(|(_, g)| !g.is_empty())
        .map(|(i, g)| {
            let k = g.len() as f64;
            let c: [f64; 5] = std::array::from_fn(|j| g.iter().map(|p| p[j]).sum::<f64>() / k);
            let r = g.iter().map(|p| (0..5).map(|j| (p[j] - c[j]).powi(2)).sum::<f64>().sqrt()).fold(0.0, f64::max);
            (idx.chord(&c) - r, i)
        })
        .collect();
    bounds.sort_by(|a, b| a.0.total_cmp(&b.0));
    let mut best = f64::INFINITY;
    for chunk in bounds.chunks(16) {
        if chunk[0].0 >= best {
            break;
        }
        let found = chunk
            .par_iter()
            .filter(|(lb, _)| *lb < best)
            .map(|&(_, i)| groups[i].iter().map(|p| idx.chord(p)).fold(f64::INFINITY, f64::min))
            .reduce(|| f64::INFINITY, f64::min);
        best = best.min(found);
    }
    chord_to_round(best)
}

/// Least round distance between two sample clouds.
pub fn cloud_distance(a: &SampleCloud, b: &SampleCloud) -> f64 {
    grouped_distance(&a.groups, &CloudIndex::new(&b.flat()))
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SeparationReport {
    pub margin: f64,
    pub resolution: usize,
    pub refinement_ratio: f64,
    pub certified_disjoint: bool,
    pub grid_diameter: f64,
    pub refined_margin: f64,
}

/// Sampled round distance between two surfaces at resolution `n`, with the
/// longest sample edge.
pub fn sampled_margin(s1: &CrookedSurface, s2: &CrookedSurface, n: usize) -> Result<(f64, f64)> {
    let h = grid_diameter(n);
    let c1 = sample_cloud(s1, h)?;
    let c2 = sample_cloud(s2, h)?;
    Ok((cloud_distance(&c1, &c2), c1.max_edge.max(c2.max_edge)))
}

/// Margin at `resolution` and at twice that; certified when the margin
/// exceeds three times the sample edge length.
pub fn separation_margin(s1: &CrookedSurface, s2: &CrookedSurface, resolution: usize) -> Result<SeparationReport> {
    let resolution = resolution.max(8);
    let (margin, diam) = sampled_margin(s1, s2, resolution)?;
    let (refined, _) = sampled_margin(s1, s2, 2 * resolution)?;
    let refinement_ratio = if margin > 0.0 { refined / margin } else { 0.0 };
    Ok(SeparationReport {
        margin,
        resolution,
        refinement_ratio,
        certified_disjoint: margin > 3.0 * diam,
        grid_diameter: diam,
        refined_margin: refined,
    })
}

/// Separation measured away from given touching points: samples within
/// `radius` of any of them are dropped before measuring.
pub fn margin_excluding(
    s1: &CrookedSurface,
    s2: &CrookedSurface,
    n: usize,
    touching: &[EinPoint],
    radius: f64,
) -> Result<(f64, f64)> {
    let h = grid_diameter(n);
    let c1 = sample_cloud(s1, h)?.excluding(touching, radius);
    let c2 = sample_cloud(s2, h)?.excluding(touching, radius);
    Ok((cloud_distance(&c1, &c2), c1.max_edge.max(c2.max_edge)))
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ComponentReport {
    pub count: usize,
    /// Node counts per component, largest first.
    pub sizes: Vec<usize>,
    pub removed: usize,
    pub grid: usize,
}

/// Grid over `(φ, θ, t)`: `φ` has `g + 1` levels with the poles collapsed,
/// `θ` has `2g` periodic levels, and `t` has `g` levels whose ends are glued
/// through the antipodal map.
struct SphereCircleGrid {
    g: usize,
}

impl SphereCircleGrid {
    fn len(&self) -> usize {
        let g = self.g;
        g * ((g - 1) * 2 * g + 2)
    }

    /// Node id of `(i, j, k)`; `i = 0` and `i = g` are the poles.
    fn id(&self, i: usize, j: usize, k: usize) -> usize {
        let g = self.g;
        let per_t = (g - 1) * 2 * g + 2;
        let local = if i == 0 {
            0
        } else if i == g {
            1
        } else {
            2 + (i - 1) * 2 * g + j % (2 * g)
        };
        k * per_t + local
    }

    fn coords(&self, id: usize) -> (usize, usize, usize) {
        let g = self.g;
        let per_t = (g - 1) * 2 * g + 2;
        let (k, local) = (id / per_t, id % per_t);
        match local {
            0 => (0, 0, k),
            1 => (g, 0, k),
            l => (1 + (l - 2) / (2 * g), (l - 2) % (2 * g), k),
        }
    }

    fn rep(&self, id: usize) -> Vec5 {
        let (i, j, k) = self.coords(id);
        let g = self.g as f64;
        param_rep(PI * i as f64 / g, PI * j as f64 / g, PI * k as f64 / g).normalized()
    }

    fn neighbours(&self, id: usize) -> Vec<usize> {
        let g = self.g;
        let (i, j, k) = self.coords(id);
        let mut out = Vec::new();
        // stepping t past π lands on (π - φ, θ + π) at t = 0
        let tstep = |i: usize, j: usize, up: bool| -> usize {
            if up {
                if k + 1 < g {
                    self.id(i, j, k + 1)
                } else {
                    self.id(g - i, j + g, 0)
                }
            } else if k > 0 {
                self.id(i, j, k - 1)
            } else {
                self.id(g - i, j + g, g - 1)
            }
        };
        out.push(tstep(i, j, true));
        out.push(tstep(i, j, false));
        if i == 0 || i == g {
            let ring = if i == 0 { 1 } else { g - 1 };
            out.extend((0..2 * g).map(|jj| self.id(ring, jj, k)));
        } else {
            out.push(self.id(i - 1, j, k));
            out.push(self.id(i + 1, j, k));
            out.push(self.id(i, j + 1, k));
            out.push(self.id(i, j + 2 * g - 1, k));
        }
        out
    }
}

/// Connected components of the grid graph after removing nodes within a
/// band of the given surfaces.
///
/// The band exceeds half the longest grid edge plus the covering radius of
/// the surface samples, so no grid edge can cross a surface between two
/// surviving nodes.
pub fn component_count(surfaces: &[CrookedSurface], grid: usize) -> Result<ComponentReport> {
    let g = grid.max(16);
    let lattice = SphereCircleGrid { g };
    let step = PI / g as f64;
    let h = step / 4.0;
    let band = 0.6 * step;
    let mut cloud = Vec::new();
    for s in surfaces {
        cloud.extend(sample_cloud(s, h)?.flat());
    }
    let n = lattice.len();
    let alive: Vec<bool> = if cloud.is_empty() {
        vec![true; n]
    } else {
        let idx = CloudIndex::new(&cloud);
        (0..n).into_par_iter().map(|id| !idx.any_within(&lattice.rep(id).0, band)).collect()
    };
    let mut comp = vec![usize::MAX; n];
    let mut sizes = Vec::new();
    for start in 0..n {
        if !alive[start] || comp[start] != usize::MAX {
            continue;
        }
        let c = sizes.len();
        let mut size = 0;
        comp[start] = c;
        let mut stack = vec![start];
        while let Some(v) = stack.pop() {
            size += 1;
            for w in lattice.neighbours(v) {
                if alive[w] && comp[w] == usize::MAX {
                    comp[w] = c;
                    stack.push(w);
                }
            }
        }
        sizes.push(size);
    }
    sizes.sort_unstable_by(|a, b| b.cmp(a));
    Ok(ComponentReport { count: sizes.len(), sizes, removed: alive.iter().filter(|a| !**a).count(), grid: g })
}

/// Every finite-difference tangent of `econe(p) ∩ econe(q)` is spacelike.
pub fn spacelike_circle_check(p: &EinPoint, q: &EinPoint, samples: usize) -> Result<bool> {
    let c = lightcone_intersection(p, q)?;
    let eps = 1e-5;
    let n = samples.max(1);
    Ok((0..n).all(|k| {
        let t = 2.0 * PI * k as f64 / n as f64;
        let d = (&c.rep(t + eps) - &c.rep(t - eps)).scale(&(0.5 / eps));
        let y = c.rep(t);
        // remove the component along the point itself before testing
        let tangent = &d - &y.scale(&(d.dot(&y) / y.dot(&y)));
        form32(&tangent, &tangent) > 1e-12 * tangent.dot(&tangent)
    }))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::affine::Extension;
    use crate::einstein::{p0, p_inf};

    #[test]
    fn round_distance_examples() {
        assert_eq!(round_distance(&p0(), &p0()), 0.0);
        let d = round_distance(&p0(), &p_inf());
        assert!((d - PI / 2.0).abs() < 1e-15);
    }

    #[test]
    fn grid_neighbourhoods_are_symmetric() {
        let l = SphereCircleGrid { g: 6 };
        for id in 0..l.len() {
            for w in l.neighbours(id) {
                assert!(l.neighbours(w).contains(&id), "{id} -> {w}");
                let d = round_angle(&l.rep(id), &l.rep(w));
                assert!(d < PI / 6.0 / 2f64.sqrt() + 1e-9, "{id} {w} {d}");
            }
        }
    }

    #[test]
    fn same_surface_has_zero_margin() {
        let s = CrookedSurface::basic(Extension::Positive);
        let (m, _) = sampled_margin(&s, &s, 8).unwrap();
        assert_eq!(m, 0.0);
    }

    #[test]
    fn basic_circle_is_spacelike() {
        assert!(spacelike_circle_check(&p0(), &p_inf(), 64).unwrap());
    }
}
