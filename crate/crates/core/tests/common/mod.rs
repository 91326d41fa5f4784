#![allow(dead_code)]

use std::collections::VecDeque;

use crooked_core::affine::{consistently_oriented, point_plane_distance, AllowablePair, CrookedHalfspace};
use crooked_core::cone::in_cone_interior;
use crooked_core::affine::difference_cone;
use crooked_core::forms::{causal_class, form21, null_frame, CausalClass, Vec3, Vec5};
use crooked_core::group::Iso32;
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn random_spacelike(r: &mut ChaCha8Rng) -> Vec3 {
    loop {
        let v = Vec3([r.gen_range(-1.0..1.0), r.gen_range(-1.0..1.0), r.gen_range(-1.0..1.0)]);
        if causal_class(&v) == CausalClass::Spacelike && form21(&v, &v) > 0.05 {
            return v;
        }
    }
}

pub fn random_consistent_pair(r: &mut ChaCha8Rng) -> (Vec3, Vec3) {
    loop {
        let (a, b) = (random_spacelike(r), random_spacelike(r));
        if consistently_oriented(&a, &b).unwrap_or(false) {
            return (a, b);
        }
    }
}

/// Stem-quadrant vectors `a x⁻ - b x⁺` until the difference lies well
/// inside the difference cone.
pub fn random_allowable(r: &mut ChaCha8Rng, u1: &Vec3, u2: &Vec3) -> AllowablePair {
    let (f1, f2) = (null_frame(u1).unwrap(), null_frame(u2).unwrap());
    let gens = difference_cone(u1, u2).unwrap();
    loop {
        let q = |f: &crooked_core::NullFrame, r: &mut ChaCha8Rng| {
            &f.x_minus.scale(&r.gen_range(0.1..2.0)) - &f.x_plus.scale(&r.gen_range(0.1..2.0))
        };
        let z1 = q(&f1, r);
        let z2 = q(&f2, r);
        if in_cone_interior(&gens, &(&z1 - &z2), 1e-6) {
            return AllowablePair { z1, z2 };
        }
    }
}

/// Random element of `O(3) × O(2)`, an isometry of the round metric.
pub fn random_compact(r: &mut ChaCha8Rng) -> Iso32 {
    let mut m = [[0.0; 5]; 5];
    let mut gram = |idx: &[usize], r: &mut ChaCha8Rng| {
        let k = idx.len();
        let mut cols: Vec<Vec<f64>> = Vec::new();
        while cols.len() < k {
            let mut v: Vec<f64> = (0..k).map(|_| r.gen_range(-1.0..1.0)).collect();
            for c in &cols {
                let d: f64 = v.iter().zip(c).map(|(a, b)| a * b).sum();
                v.iter_mut().zip(c).for_each(|(a, b)| *a -= d * b);
            }
            let n = v.iter().map(|a| a * a).sum::<f64>().sqrt();
            if n > 1e-3 {
                cols.push(v.iter().map(|a| a / n).collect());
            }
        }
        for (j, c) in cols.iter().enumerate() {
            for (i, x) in c.iter().enumerate() {
                m[idx[i]][idx[j]] = *x;
            }
        }
    };
    gram(&[0, 1, 2], r);
    gram(&[3, 4], r);
    Iso32::from_rows_unchecked(m)
}

pub fn random_null(r: &mut ChaCha8Rng) -> Vec5 {
    let a = Vec5([r.gen_range(-1.0..1.0), r.gen_range(-1.0..1.0), r.gen_range(-1.0..1.0), 0.0, 0.0]);
    let b = Vec5([0.0, 0.0, 0.0, r.gen_range(-1.0..1.0), r.gen_range(-1.0..1.0)]);
    &a.normalized() + &b.normalized()
}

/// Region growing on a cubical grid over a ball around the vertex: nodes
/// within `band` of the crooked plane are cut, and the component of the
/// node nearest a point of `int Quad` is the halfspace.
pub struct GrowOracle {
    centre: Vec3,
    h: f64,
    k: i64,
    label: Vec<Option<bool>>,
}

impl GrowOracle {
    pub fn new(hs: &CrookedHalfspace, radius: f64, h: f64, band: f64) -> Self {
        let k = (radius / h).ceil() as i64;
        let side = (2 * k + 1) as usize;
        let centre = hs.vertex.clone();
        let plane = hs.boundary();
        let mut alive = vec![false; side * side * side];
        let pos = |i: i64, j: i64, l: i64| {
            &centre + &Vec3([i as f64 * h, j as f64 * h, l as f64 * h])
        };
        for i in -k..=k {
            for j in -k..=k {
                for l in -k..=k {
                    let p = pos(i, j, l);
                    let inside_ball = ((i * i + j * j + l * l) as f64).sqrt() * h <= radius;
                    let idx = Self::index_of(k, i, j, l);
                    alive[idx] = inside_ball && point_plane_distance(&p, &plane).unwrap() > band;
                }
            }
        }
        let f = null_frame(&hs.director).unwrap();
        let dir = &f.x_minus - &f.x_plus;
        let seed = &centre + &dir.scale(&(0.5 * radius / dir.norm()));
        let s = (&seed - &centre).scale(&(1.0 / h)).0.map(|x| x.round() as i64);
        let mut label: Vec<Option<bool>> = alive.iter().map(|a| a.then_some(false)).collect();
        let start = Self::index_of(k, s[0], s[1], s[2]);
        assert!(alive[start], "seed node was cut");
        label[start] = Some(true);
        let mut queue = VecDeque::from([(s[0], s[1], s[2])]);
        while let Some((i, j, l)) = queue.pop_front() {
            for (di, dj, dl) in [(1, 0, 0), (-1, 0, 0), (0, 1, 0), (0, -1, 0), (0, 0, 1), (0, 0, -1)] {
                let (a, b, c) = (i + di, j + dj, l + dl);
                if a.abs() > k || b.abs() > k || c.abs() > k {
                    continue;
                }
                let idx = Self::index_of(k, a, b, c);
                if label[idx] == Some(false) {
                    label[idx] = Some(true);
                    queue.push_back((a, b, c));
                }
            }
        }
        Self { centre, h, k, label }
    }

    fn index_of(k: i64, i: i64, j: i64, l: i64) -> usize {
        let side = 2 * k + 1;
        (((i + k) * side + (j + k)) * side + (l + k)) as usize
    }

    /// Label of the nearest grid node; `None` when that node was cut.
    pub fn classify(&self, q: &Vec3) -> Option<bool> {
        let s = (q - &self.centre).scale(&(1.0 / self.h)).0.map(|x| x.round() as i64);
        if s.iter().any(|x| x.abs() > self.k) {
            return None;
        }
        self.label[Self::index_of(self.k, s[0], s[1], s[2])]
    }
}
