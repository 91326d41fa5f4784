//! Crooked planes, crooked halfspaces and stem quadrants in Minkowski
//! 3-space, with the affine disjointness criterion for allowable pairs.

use std::cmp::Ordering;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::cone::in_cone_interior;
use crate::error::{GeomError, Result};
use crate::forms::{causal_class, form21, frame_pairing_sum_product, null_frame, CausalClass, NullFrame, Vec3};
use crate::scalar::Scalar;

/// Affine points share the coordinate type of displacements.
pub type Point3<S = f64> = Vec3<S>;

/// Default relative tolerance for affine predicates.
pub const EPS_PRED: f64 = 1e-9;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Extension {
    Positive,
    Negative,
}

impl Extension {
    pub fn sign(self) -> i64 {
        match self {
            Extension::Positive => 1,
            Extension::Negative => -1,
        }
    }
}

/// Sign of `a·b` (Lorentzian) with a tolerance relative to `|a||b|`.
fn pair_sign<S: Scalar>(a: &Vec3<S>, b: &Vec3<S>, tol: f64) -> Ordering {
    let scale = if S::EXACT { 0.0 } else { tol * a.max_abs() * b.max_abs() };
    form21(a, b).sign_tol(scale)
}

fn spacelike_frame<S: Scalar>(u: &Vec3<S>) -> Result<NullFrame<S>> {
    null_frame(u)
}

/// Closed linear stem at `p`: `w·u = 0` and `w·w ≤ 0`.
pub fn in_stem<S: Scalar>(q: &Point3<S>, p: &Point3<S>, u: &Vec3<S>) -> Result<bool> {
    in_stem_tol(q, p, u, EPS_PRED)
}

pub fn in_stem_tol<S: Scalar>(q: &Point3<S>, p: &Point3<S>, u: &Vec3<S>, tol: f64) -> Result<bool> {
    if causal_class(u) != CausalClass::Spacelike {
        return Err(GeomError::NotSpacelike);
    }
    let w = q - p;
    Ok(pair_sign(&w, u, tol) == Ordering::Equal && pair_sign(&w, &w, tol) != Ordering::Greater)
}

/// Closed half-plane of `x^⊥` at `p` on the side of `seed`.
pub fn in_wing<S: Scalar>(q: &Point3<S>, p: &Point3<S>, x: &Vec3<S>, seed: &Vec3<S>) -> Result<bool> {
    in_wing_tol(q, p, x, seed, EPS_PRED)
}

pub fn in_wing_tol<S: Scalar>(q: &Point3<S>, p: &Point3<S>, x: &Vec3<S>, seed: &Vec3<S>, tol: f64) -> Result<bool> {
    if causal_class(x) != CausalClass::Lightlike || !x.time().is_positive() {
        return Err(GeomError::BadWingData("wing direction must be future-pointing lightlike"));
    }
    if causal_class(seed) != CausalClass::Spacelike {
        return Err(GeomError::BadWingData("seed must be spacelike"));
    }
    if pair_sign(seed, x, tol) != Ordering::Equal {
        return Err(GeomError::BadWingData("seed must be orthogonal to the wing direction"));
    }
    let w = q - p;
    Ok(pair_sign(&w, x, tol) == Ordering::Equal && pair_sign(&w, seed, tol) != Ordering::Less)
}

/// A crooked plane with its director stored up to the sign ambiguity of the
/// point set: the first nonzero coordinate is made positive.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CrookedPlane<S = f64> {
    pub vertex: Point3<S>,
    pub director: Vec3<S>,
    pub extension: Extension,
}

fn canonical_sign<S: Scalar>(u: &Vec3<S>) -> Vec3<S> {
    match u.0.iter().find(|c| !c.is_zero()) {
        Some(c) if c.is_negative() => -u,
        _ => u.clone(),
    }
}

impl<S: Scalar> CrookedPlane<S> {
    pub fn new(vertex: Point3<S>, director: Vec3<S>, extension: Extension) -> Result<Self> {
        if causal_class(&director) != CausalClass::Spacelike {
            return Err(GeomError::NotSpacelike);
        }
        Ok(Self { vertex, director: canonical_sign(&director), extension })
    }

    pub fn positive(vertex: Point3<S>, director: Vec3<S>) -> Result<Self> {
        Self::new(vertex, director, Extension::Positive)
    }

    pub fn frame(&self) -> Result<NullFrame<S>> {
        spacelike_frame(&self.director)
    }

    /// Convex polyhedral pieces as generator lists: the future and past stem
    /// sectors and the two wings (each wing's edge line split in both directions).
    pub fn pieces(&self) -> Result<[Vec<Vec3<S>>; 4]> {
        let f = self.frame()?;
        let e = S::from_i64(self.extension.sign());
        let u = &self.director;
        Ok([
            vec![f.x_minus.clone(), f.x_plus.clone()],
            vec![-&f.x_minus, -&f.x_plus],
            vec![f.x_plus.clone(), -&f.x_plus, u.scale(&e)],
            vec![f.x_minus.clone(), -&f.x_minus, u.scale(&-e)],
        ])
    }
}

pub fn in_crooked_plane<S: Scalar>(q: &Point3<S>, cp: &CrookedPlane<S>) -> bool {
    in_crooked_plane_tol(q, cp, EPS_PRED)
}

pub fn in_crooked_plane_tol<S: Scalar>(q: &Point3<S>, cp: &CrookedPlane<S>, tol: f64) -> bool {
    let Ok(f) = cp.frame() else { return false };
    let p = &cp.vertex;
    let u = &cp.director;
    let e = S::from_i64(cp.extension.sign());
    let stem = in_stem_tol(q, p, u, tol).unwrap_or(false);
    stem || in_wing_tol(q, p, &f.x_plus, &u.scale(&e), tol).unwrap_or(false)
        || in_wing_tol(q, p, &f.x_minus, &u.scale(&-e), tol).unwrap_or(false)
}

/// The open component of the complement of `CP(vertex, director)` containing
/// the interior of the stem quadrant; the director's sign selects the side.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CrookedHalfspace<S = f64> {
    pub vertex: Point3<S>,
    pub director: Vec3<S>,
    pub extension: Extension,
}

impl<S: Scalar> CrookedHalfspace<S> {
    pub fn new(vertex: Point3<S>, director: Vec3<S>) -> Result<Self> {
        Self::with_extension(vertex, director, Extension::Positive)
    }

    pub fn with_extension(vertex: Point3<S>, director: Vec3<S>, extension: Extension) -> Result<Self> {
        if causal_class(&director) != CausalClass::Spacelike {
            return Err(GeomError::NotSpacelike);
        }
        Ok(Self { vertex, director, extension })
    }

    pub fn boundary(&self) -> CrookedPlane<S> {
        CrookedPlane { vertex: self.vertex.clone(), director: canonical_sign(&self.director), extension: self.extension }
    }

    pub fn opposite(&self) -> Self {
        Self { vertex: self.vertex.clone(), director: -&self.director, extension: self.extension }
    }
}

/// Three-way classification of a point against a crooked halfspace.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Side {
    Inside,
    Boundary,
    Outside,
}

/// Sign pattern `(w·u, w·x⁺, w·x⁻)` decides the side of `H(o, u)`.
pub(crate) fn halfspace_side_from_signs(
    wu: Ordering,
    wxp: Ordering,
    wxm: Ordering,
    extension: Extension,
) -> bool {
    use Ordering::*;
    match extension {
        Extension::Positive => match wu {
            Greater => wxp == Less,
            Equal => wxp == Less && wxm == Greater,
            Less => wxm == Greater,
        },
        Extension::Negative => match wu {
            Greater => wxm == Greater,
            Equal => wxp == Less && wxm == Greater,
            Less => wxp == Less,
        },
    }
}

pub fn in_halfspace<S: Scalar>(q: &Point3<S>, hs: &CrookedHalfspace<S>) -> Result<bool> {
    in_halfspace_tol(q, hs, EPS_PRED)
}

pub fn in_halfspace_tol<S: Scalar>(q: &Point3<S>, hs: &CrookedHalfspace<S>, tol: f64) -> Result<bool> {
    let f = spacelike_frame(&hs.director)?;
    let w = q - &hs.vertex;
    Ok(halfspace_side_from_signs(
        pair_sign(&w, &hs.director, tol),
        pair_sign(&w, &f.x_plus, tol),
        pair_sign(&w, &f.x_minus, tol),
        hs.extension,
    ))
}

pub fn halfspace_side<S: Scalar>(q: &Point3<S>, hs: &CrookedHalfspace<S>, tol: f64) -> Result<Side> {
    if in_crooked_plane_tol(q, &hs.boundary(), tol) {
        Ok(Side::Boundary)
    } else if in_halfspace_tol(q, hs, tol)? {
        Ok(Side::Inside)
    } else {
        Ok(Side::Outside)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct StemQuadrant<S = f64> {
    pub vertex: Point3<S>,
    pub director: Vec3<S>,
}

/// `q - vertex = a x⁻ - b x⁺` with `a, b ≥ 0`.
pub fn in_stem_quadrant<S: Scalar>(q: &Point3<S>, sq: &StemQuadrant<S>) -> Result<bool> {
    in_stem_quadrant_tol(q, sq, EPS_PRED)
}

pub fn in_stem_quadrant_tol<S: Scalar>(q: &Point3<S>, sq: &StemQuadrant<S>, tol: f64) -> Result<bool> {
    let f = spacelike_frame(&sq.director)?;
    let w = q - &sq.vertex;
    // a = w·x⁺ / (x⁻·x⁺) and b = -w·x⁻ / (x⁻·x⁺), with x⁻·x⁺ < 0
    Ok(pair_sign(&w, &sq.director, tol) == Ordering::Equal
        && pair_sign(&w, &f.x_plus, tol) != Ordering::Greater
        && pair_sign(&w, &f.x_minus, tol) != Ordering::Less)
}

/// Both `v·x⁻(u) ≤ 0` and `v·x⁺(u) ≤ 0`, decided from their sum and product.
fn both_pairings_nonpositive<S: Scalar>(u: &Vec3<S>, v: &Vec3<S>, tol: f64) -> Result<bool> {
    let (sum, prod) = frame_pairing_sum_product(u, v)?;
    let scale = if S::EXACT { 0.0 } else { tol * u.max_abs() * v.max_abs() };
    Ok(!sum.is_pos_tol(scale) && !prod.is_neg_tol(scale * scale))
}

/// Closed halfspaces `cl H(o,u1)` and `cl H(o,u2)` meet only at `o`.
pub fn consistently_oriented<S: Scalar>(u1: &Vec3<S>, u2: &Vec3<S>) -> Result<bool> {
    consistently_oriented_tol(u1, u2, EPS_PRED)
}

pub fn consistently_oriented_tol<S: Scalar>(u1: &Vec3<S>, u2: &Vec3<S>, tol: f64) -> Result<bool> {
    if causal_class(u1) != CausalClass::Spacelike || causal_class(u2) != CausalClass::Spacelike {
        return Err(GeomError::NotSpacelike);
    }
    let scale = if S::EXACT { 0.0 } else { tol * u1.max_abs() * u2.max_abs() };
    let line = u1.cross(u2);
    let ultraparallel = form21(&line, &line).is_pos_tol(scale * scale);
    Ok(ultraparallel
        && form21(u1, u2).is_neg_tol(scale)
        && both_pairings_nonpositive(u2, u1, tol)?
        && both_pairings_nonpositive(u1, u2, tol)?)
}

/// A displacement pair for two directors.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AllowablePair<S = f64> {
    pub z1: Vec3<S>,
    pub z2: Vec3<S>,
}

impl<S: Scalar> AllowablePair<S> {
    pub fn zero() -> Self {
        Self { z1: Vec3::zero(), z2: Vec3::zero() }
    }

    pub fn is_zero(&self) -> bool {
        self.z1.is_zero() && self.z2.is_zero()
    }

    pub fn scale(&self, c: &S) -> Self {
        Self { z1: self.z1.scale(c), z2: self.z2.scale(c) }
    }
}

/// Generators of the difference cone whose interior allowable pairs must hit.
pub fn difference_cone<S: Scalar>(u1: &Vec3<S>, u2: &Vec3<S>) -> Result<[Vec3<S>; 4]> {
    let f1 = spacelike_frame(u1)?;
    let f2 = spacelike_frame(u2)?;
    Ok([f1.x_minus, -f1.x_plus, -f2.x_minus, f2.x_plus])
}

pub fn allowable_pair<S: Scalar>(z1: &Vec3<S>, z2: &Vec3<S>, u1: &Vec3<S>, u2: &Vec3<S>) -> Result<bool> {
    allowable_pair_tol(z1, z2, u1, u2, EPS_PRED)
}

pub fn allowable_pair_tol<S: Scalar>(z1: &Vec3<S>, z2: &Vec3<S>, u1: &Vec3<S>, u2: &Vec3<S>, tol: f64) -> Result<bool> {
    if !consistently_oriented_tol(u1, u2, tol)? {
        return Err(GeomError::NotConsistentlyOriented);
    }
    let o = Vec3::zero();
    let in_quad = |z: &Vec3<S>, u: &Vec3<S>| {
        in_stem_quadrant_tol(z, &StemQuadrant { vertex: o.clone(), director: u.clone() }, tol)
    };
    if !in_quad(z1, u1)? || !in_quad(z2, u2)? {
        return Ok(false);
    }
    let gens = difference_cone(u1, u2)?;
    Ok(in_cone_interior(&gens, &(z1 - z2), tol))
}

/// Least Euclidean distance between `a + cone(A)` and `b + cone(B)`.
///
/// The optimum of the nonnegative least-squares problem sits on a face
/// spanned by at most three independent columns, so enumerating those faces
/// is exact up to rounding.
pub fn polyhedral_cone_distance(a: &Vec3, gens_a: &[Vec3], b: &Vec3, gens_b: &[Vec3]) -> f64 {
    use nalgebra::{DMatrix, DVector};
    let d = a - b;
    let cols: Vec<Vec3> = gens_a.iter().cloned().chain(gens_b.iter().map(|g| -g)).collect();
    let n = cols.len();
    let mut best = d.norm();
    for mask in 1u32..(1 << n) {
        let k = mask.count_ones() as usize;
        if k > 3 {
            continue;
        }
        let idx: Vec<usize> = (0..n).filter(|i| mask & (1 << i) != 0).collect();
        let g = DMatrix::from_fn(3, k, |r, c| cols[idx[c]].0[r]);
        let gtg = g.transpose() * &g;
        let Some(inv) = gtg.clone().try_inverse() else { continue };
        if gtg.determinant().abs() < 1e-12 * gtg.norm().powi(k as i32) {
            continue;
        }
        let rhs = -(g.transpose() * DVector::from_column_slice(&d.0));
        let c = inv * rhs;
        if c.iter().any(|x| *x < 0.0) {
            continue;
        }
        let r = DVector::from_column_slice(&d.0) + g * c;
        best = best.min(r.norm());
    }
    best
}

/// Least Euclidean distance between two crooked planes.
pub fn crooked_plane_distance(cp1: &CrookedPlane, cp2: &CrookedPlane) -> Result<f64> {
    let p1 = cp1.pieces()?;
    let p2 = cp2.pieces()?;
    let mut best = f64::INFINITY;
    for a in &p1 {
        for b in &p2 {
            best = best.min(polyhedral_cone_distance(&cp1.vertex, a, &cp2.vertex, b));
        }
    }
    Ok(best)
}

pub fn point_plane_distance(q: &Point3, cp: &CrookedPlane) -> Result<f64> {
    let pieces = cp.pieces()?;
    Ok(pieces.iter().map(|g| polyhedral_cone_distance(q, &[], &cp.vertex, g)).fold(f64::INFINITY, f64::min))
}

/// Points of a crooked plane on a compactified parameter grid: radii run
/// through `tan` of equally spaced angles so far-field points are included.
pub fn sample_crooked_plane(cp: &CrookedPlane, resolution: usize) -> Result<Vec<Point3>> {
    let f = cp.frame()?;
    let n = resolution.max(2);
    let radius = |i: usize| (std::f64::consts::FRAC_PI_2 * i as f64 / (n + 1) as f64).tan();
    let line = |i: usize| (std::f64::consts::PI * ((i as f64 + 0.5) / n as f64 - 0.5)).tan();
    let e = cp.extension.sign() as f64;
    let u = cp.director.normalized();
    let mut out = Vec::new();
    for i in 0..=n {
        for j in 0..=n {
            let (a, b) = (radius(i), radius(j));
            let w = &f.x_minus.scale(&a) + &f.x_plus.scale(&b);
            out.push(&cp.vertex + &w);
            out.push(&cp.vertex - &w);
        }
    }
    for i in 0..n {
        for j in 0..=n {
            let (t, s) = (line(i), radius(j));
            out.push(&cp.vertex + &(&f.x_plus.scale(&t) + &u.scale(&(e * s))));
            out.push(&cp.vertex + &(&f.x_minus.scale(&t) + &u.scale(&(-e * s))));
        }
    }
    Ok(out)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AffineCertificate {
    pub contained_in_halfspace: bool,
    pub min_separation: f64,
    pub samples: usize,
}

/// For halfspaces `H(base + z_i, u_i)`: checks that each boundary plane lies
/// in `cl H(base, u_i)` on a sample grid and measures the exact distance
/// between the two boundary planes.
pub fn affine_disjointness_certificate(
    hs1: &CrookedHalfspace,
    hs2: &CrookedHalfspace,
    base: &Point3,
    resolution: usize,
) -> Result<AffineCertificate> {
    let mut samples = 0;
    let mut contained = true;
    for hs in [hs1, hs2] {
        let outer = CrookedHalfspace::with_extension(base.clone(), -&hs.director, hs.extension)?;
        let pts = sample_crooked_plane(&hs.boundary(), resolution)?;
        samples += pts.len();
        let bad = pts
            .par_iter()
            .filter(|q| {
                // relative tolerance keeps far-field rounding from flagging
                !q.is_finite() || in_halfspace_tol(q, &outer, 1e-9).unwrap_or(true)
            })
            .count();
        contained &= bad == 0;
    }
    let min_separation = crooked_plane_distance(&hs1.boundary(), &hs2.boundary())?;
    Ok(AffineCertificate { contained_in_halfspace: contained, min_separation, samples })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn v(a: f64, b: f64, c: f64) -> Vec3 {
        Vec3([a, b, c])
    }

    #[test]
    fn stem_examples() {
        let o = Vec3::zero();
        let u = v(1., 0., 0.);
        assert!(in_stem(&o, &o, &u).unwrap());
        assert!(in_stem(&v(0., 0., 1.), &o, &u).unwrap());
        assert!(!in_stem(&v(0., 3., 1.), &o, &u).unwrap());
        assert_eq!(in_stem(&o, &o, &v(0., 0., 1.)), Err(GeomError::NotSpacelike));
    }

    #[test]
    fn wing_examples() {
        let o = Vec3::zero();
        let xp = v(0., -1., 1.);
        let u = v(1., 0., 0.);
        assert!(in_wing(&u, &o, &xp, &u).unwrap());
        assert!(!in_wing(&v(-1., 0., 0.), &o, &xp, &u).unwrap());
        assert!(in_wing(&xp, &o, &xp, &u).unwrap());
        assert!(matches!(in_wing(&o, &o, &u, &u), Err(GeomError::BadWingData(_))));
        assert!(matches!(in_wing(&o, &o, &xp, &v(0., 1., 0.)), Err(GeomError::BadWingData(_))));
    }

    #[test]
    fn plane_examples() {
        let cp = CrookedPlane::positive(Vec3::zero(), v(1., 0., 0.)).unwrap();
        assert!(in_crooked_plane(&Vec3::zero(), &cp));
        assert!(in_crooked_plane(&v(5., -2., 2.), &cp));
        assert!(!in_crooked_plane(&v(0., 3., 1.), &cp));
        let flipped = CrookedPlane::positive(Vec3::zero(), v(-1., 0., 0.)).unwrap();
        assert_eq!(cp, flipped);
    }

    #[test]
    fn halfspace_examples() {
        let hs = CrookedHalfspace::new(Vec3::zero(), v(1., 0., 0.)).unwrap();
        assert!(in_halfspace(&v(0., 3., 1.), &hs).unwrap());
        assert!(!in_halfspace(&v(0., -3., 1.), &hs).unwrap());
        assert!(!in_halfspace(&v(0., 0., 1.), &hs).unwrap());
        assert!(in_halfspace(&v(0., -3., 1.), &hs.opposite()).unwrap());
    }

    #[test]
    fn quadrant_examples() {
        let sq = StemQuadrant { vertex: Vec3::zero(), director: v(1., 0., 0.) };
        assert!(in_stem_quadrant(&Vec3::zero(), &sq).unwrap());
        assert!(in_stem_quadrant(&v(0., 3., 1.), &sq).unwrap());
        assert!(!in_stem_quadrant(&v(1., 0., 0.), &sq).unwrap());
    }

    #[test]
    fn orientation_examples() {
        let u1 = v(1., 0., 0.);
        assert!(!consistently_oriented(&u1, &v(-1., 0., 0.)).unwrap());
        assert!(!consistently_oriented(&u1, &u1).unwrap());
        assert!(consistently_oriented(&u1, &v(-2., 0., 1.)).unwrap());
    }

    #[test]
    fn allowable_examples() {
        let u1 = v(1., 0., 0.);
        let u2 = v(-2., 0., 1.);
        let z1 = v(0., 2., 0.);
        let z2 = v(0., -(3f64).sqrt(), 0.);
        assert!(allowable_pair(&z1, &z2, &u1, &u2).unwrap());
        let o = Vec3::zero();
        assert!(!allowable_pair(&o, &o, &u1, &u2).unwrap());
        assert!(!allowable_pair(&u1, &z2, &u1, &u2).unwrap());
        assert_eq!(allowable_pair(&z1, &z2, &u1, &u1), Err(GeomError::NotConsistentlyOriented));
    }

    #[test]
    fn cone_distance_simple() {
        let d = polyhedral_cone_distance(&v(0., 0., 1.), &[v(1., 0., 0.)], &Vec3::zero(), &[v(0., 1., 0.)]);
        assert!((d - 1.0).abs() < 1e-12);
        let d = polyhedral_cone_distance(&v(-1., -1., 0.), &[], &Vec3::zero(), &[v(1., 0., 0.), v(0., 1., 0.)]);
        assert!((d - 2f64.sqrt()).abs() < 1e-12);
    }
}
