//! Crooked surfaces: conformal compactifications of crooked planes and their
//! images under the conformal group, with scaffolding photons, torus data and
//! a homogeneous membership test that treats points at infinity uniformly.

use std::cmp::Ordering;

use serde::{Deserialize, Serialize};

use crate::affine::{halfspace_side_from_signs, CrookedHalfspace, CrookedPlane, Extension, Point3, Side};
use crate::error::{GeomError, Result};
use crate::einstein::{embed_rep, p_inf, EinPoint, Photon, TorusData};
use crate::forms::{causal_class, form21, null_frame, CausalClass, NullFrame, Vec3, Vec5};
use crate::group::{lift_linear, lift_translation, reflect_first_spatial, Iso32, Mat3};
use crate::scalar::Scalar;

/// Relative tolerance for surface membership of sampled points.
pub const EPS_MESH: f64 = 1e-9;

/// `motion · conf(CP(vertex, director))` with the given extension.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CrookedSurface<S = f64> {
    pub motion: Iso32<S>,
    pub vertex: Point3<S>,
    pub director: Vec3<S>,
    pub extension: Extension,
}

/// The four photons framing a compactified crooked plane.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Scaffolding<S = f64> {
    pub phi_inf: Photon<S>,
    pub psi_inf: Photon<S>,
    pub phi_p: Photon<S>,
    pub psi_p: Photon<S>,
}

/// The point `(-p·x : x : p·x)`, the ideal endpoint of the ray `p + R₊x`.
pub fn ideal_point<S: Scalar>(p: &Point3<S>, x: &Vec3<S>) -> Vec5<S> {
    let px = form21(p, x);
    Vec5::from_parts(-px.clone(), x, px)
}

pub fn compactify<S: Scalar>(cp: &CrookedPlane<S>) -> CrookedSurface<S> {
    CrookedSurface {
        motion: Iso32::identity(),
        vertex: cp.vertex.clone(),
        director: cp.director.clone(),
        extension: cp.extension,
    }
}

impl<S: Scalar> CrookedSurface<S> {
    pub fn new(motion: Iso32<S>, vertex: Point3<S>, director: Vec3<S>, extension: Extension) -> Result<Self> {
        if causal_class(&director) != CausalClass::Spacelike {
            return Err(GeomError::NotSpacelike);
        }
        Ok(Self { motion, vertex, director, extension })
    }

    /// The basic example: vertex `o`, director `(1,0,0)`, no motion.
    pub fn basic(extension: Extension) -> Self {
        Self {
            motion: Iso32::identity(),
            vertex: Vec3::zero(),
            director: Vec3::basis(0),
            extension,
        }
    }

    pub fn plane(&self) -> CrookedPlane<S> {
        CrookedPlane { vertex: self.vertex.clone(), director: self.director.clone(), extension: self.extension }
    }

    pub fn transformed(&self, g: &Iso32<S>) -> Self {
        Self { motion: g.compose(&self.motion), ..self.clone() }
    }

    pub fn frame(&self) -> Result<NullFrame<S>> {
        null_frame(&self.director)
    }

    /// `motion · τ_vertex`, carrying the surface with vertex `o` onto this one.
    pub fn placement(&self) -> Iso32<S> {
        self.motion.compose(&lift_translation(&self.vertex))
    }

    pub fn scaffolding(&self) -> Result<Scaffolding<S>> {
        let f = self.frame()?;
        let p = &self.vertex;
        let ein = |v: Vec5<S>| EinPoint::from_rep_unchecked(self.motion.apply_vec(&v));
        let at_p = ein(embed_rep(p));
        let inf = ein(p_inf::<S>().rep().clone());
        let zero = S::zero;
        let phi_end = ein(ideal_point(p, &f.x_plus));
        let psi_end = ein(ideal_point(p, &f.x_minus));
        Ok(Scaffolding {
            phi_inf: Photon { a: inf.clone(), b: ein(Vec5::from_parts(zero(), &f.x_plus, zero())) },
            psi_inf: Photon { a: inf, b: ein(Vec5::from_parts(zero(), &f.x_minus, zero())) },
            phi_p: Photon { a: at_p.clone(), b: phi_end },
            psi_p: Photon { a: at_p, b: psi_end },
        })
    }

    /// `{motion·ι(p), motion·p∞, f1, f2}` with `f1`, `f2` the ideal points of
    /// the stem's boundary rays along `x⁻` and `x⁺`.
    pub fn torus_data_reps(&self) -> Result<[Vec5<S>; 4]> {
        let f = self.frame()?;
        let p = &self.vertex;
        let m = &self.motion;
        Ok([
            m.apply_vec(&embed_rep(p)),
            m.apply_vec(p_inf::<S>().rep()),
            m.apply_vec(&ideal_point(p, &f.x_minus)),
            m.apply_vec(&ideal_point(p, &f.x_plus)),
        ])
    }

    /// Linear forms `(e, ℓ1, ℓ2)` of the three pieces on `z = placement⁻¹ y`;
    /// a null `z` lies on a piece iff `e = 0` and `ℓ1, ℓ2` share a weak sign.
    pub fn piece_forms(&self) -> Result<[[Vec5<S>; 3]; 3]> {
        let f = self.frame()?;
        let lin = |v: &Vec3<S>, c: S| Vec5::from_parts(S::zero(), &Vec3([v.0[0].clone(), v.0[1].clone(), -v.0[2].clone()]), S::zero()).scale(&c);
        let one = S::one;
        let e = S::from_i64(self.extension.sign());
        let s = Vec5([one(), S::zero(), S::zero(), S::zero(), one()]);
        let u = &self.director;
        Ok([
            [lin(u, one()), lin(&f.x_plus, -one()), lin(&f.x_minus, -one())],
            [lin(&f.x_plus, one()), lin(u, e.clone()), s.clone()],
            [lin(&f.x_minus, one()), lin(u, -e), s],
        ])
    }

    /// The same forms pulled back to act directly on ambient coordinates `y`.
    pub fn ambient_piece_forms(&self) -> Result<[[Vec5<S>; 3]; 3]> {
        let h = self.placement().inverse();
        let ht = h.transpose();
        let forms = self.piece_forms()?;
        Ok(forms.map(|piece| piece.map(|l| ht.apply_vec(&l))))
    }
}

fn lin_eval<S: Scalar>(l: &Vec5<S>, z: &Vec5<S>) -> S {
    l.dot(z)
}

/// Piece test on already transported coordinates.
fn on_pieces<S: Scalar>(forms: &[[Vec5<S>; 3]; 3], z: &Vec5<S>, tol: f64) -> bool {
    forms.iter().any(|[e, l1, l2]| {
        let sc = |l: &Vec5<S>| if S::EXACT { 0.0 } else { tol * l.max_abs() * z.max_abs() };
        if !lin_eval(e, z).is_zero_tol(sc(e)) {
            return false;
        }
        let a = lin_eval(l1, z).sign_tol(sc(l1));
        let b = lin_eval(l2, z).sign_tol(sc(l2));
        (a != Ordering::Less && b != Ordering::Less) || (a != Ordering::Greater && b != Ordering::Greater)
    })
}

pub fn in_crooked_surface<S: Scalar>(q: &EinPoint<S>, s: &CrookedSurface<S>) -> bool {
    in_crooked_surface_tol(q, s, EPS_MESH)
}

pub fn in_crooked_surface_tol<S: Scalar>(q: &EinPoint<S>, s: &CrookedSurface<S>, tol: f64) -> bool {
    let Ok(forms) = s.ambient_piece_forms() else { return false };
    on_pieces(&forms, q.rep(), tol)
}

/// A precomputed membership tester for repeated queries.
#[derive(Clone, Debug)]
pub struct SurfaceTester {
    forms: [[Vec5; 3]; 3],
}

impl SurfaceTester {
    pub fn new(s: &CrookedSurface) -> Result<Self> {
        let mut forms = s.ambient_piece_forms()?;
        for piece in forms.iter_mut() {
            for l in piece.iter_mut() {
                let n = l.norm();
                if n > 0.0 {
                    *l = l.scale(&(1.0 / n));
                }
            }
        }
        Ok(Self { forms })
    }

    pub fn contains(&self, y: &Vec5, tol: f64) -> bool {
        on_pieces(&self.forms, &y.normalized(), tol)
    }
}

/// `SO₀(2,1)` element taking `(1,0,0)` to `u/|u|` and the frame of `(1,0,0)`
/// to positive multiples of the frame of `u`.
pub fn lorentz_to(u: &Vec3) -> Result<Mat3> {
    let f = null_frame(u)?;
    let uh = u.scale(&(1.0 / form21(u, u).sqrt()));
    let k = (-2.0 / form21(&f.x_minus, &f.x_plus)).sqrt();
    let (m, p) = (f.x_minus.scale(&k), f.x_plus.scale(&k));
    // columns: images of e1, e2, e3 where e2 = (xm - xp)/2 and e3 = (xm + xp)/2 for the standard frame
    let col = |i: usize| -> [f64; 3] {
        match i {
            0 => uh.0,
            1 => ((&m - &p).scale(&0.5)).0,
            _ => ((&m + &p).scale(&0.5)).0,
        }
    };
    let cols = [col(0), col(1), col(2)];
    Ok(Mat3(std::array::from_fn(|r| std::array::from_fn(|c| cols[c][r]))))
}

impl CrookedSurface<f64> {
    /// The conformal map carrying the positive basic surface onto this one.
    pub fn from_basic(&self) -> Result<Iso32> {
        let mut g = self.placement().compose(&lift_linear(&lorentz_to(&self.director)?)?);
        if self.extension == Extension::Negative {
            g = g.compose(&reflect_first_spatial());
        }
        Ok(g)
    }

    pub fn torus_data(&self) -> Result<TorusData> {
        let [a, b, c, d] = self.torus_data_reps()?;
        let e = EinPoint::from_rep_unchecked;
        TorusData::new(e(a), e(b), e(c), e(d))
    }
}

/// `motion · conf(H)`, an open region bounded by a crooked surface.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Region {
    pub motion: Iso32,
    pub halfspace: CrookedHalfspace,
}

impl Region {
    pub fn new(motion: Iso32, halfspace: CrookedHalfspace) -> Self {
        Self { motion, halfspace }
    }

    pub fn boundary(&self) -> CrookedSurface {
        CrookedSurface {
            motion: self.motion.clone(),
            vertex: self.halfspace.vertex.clone(),
            director: self.halfspace.director.clone(),
            extension: self.halfspace.extension,
        }
    }

    pub fn transformed(&self, g: &Iso32) -> Self {
        Self { motion: g.compose(&self.motion), halfspace: self.halfspace.clone() }
    }

    /// The complementary open region sharing the same boundary.
    pub fn complement(&self) -> Self {
        Self { motion: self.motion.clone(), halfspace: self.halfspace.opposite() }
    }

    pub fn tester(&self) -> Result<RegionTester> {
        RegionTester::new(self)
    }

    pub fn side(&self, q: &EinPoint, tol: f64) -> Result<Side> {
        Ok(self.tester()?.side(q.rep(), tol))
    }
}

/// Precomputed region classifier.
#[derive(Clone, Debug)]
pub struct RegionTester {
    to_standard: Iso32,
    u: Vec3,
    x_plus: Vec3,
    x_minus: Vec3,
    extension: Extension,
    boundary: SurfaceTester,
}

impl RegionTester {
    pub fn new(r: &Region) -> Result<Self> {
        let b = r.boundary();
        let f = b.frame()?;
        Ok(Self {
            to_standard: b.placement().inverse(),
            u: f.u.normalized(),
            x_plus: f.x_plus,
            x_minus: f.x_minus,
            extension: b.extension,
            boundary: SurfaceTester::new(&b)?,
        })
    }

    /// The halfspace at the origin is invariant under the involution
    /// negating the first coordinate, so whichever of `z1 + z5` and
    /// `z5 - z1` is larger serves as the affine chart.
    pub fn side(&self, y: &Vec5, tol: f64) -> Side {
        if self.boundary.contains(y, tol) {
            return Side::Boundary;
        }
        let z = self.to_standard.apply_vec(y).normalized();
        let s = z[0] + z[4];
        let s2 = z[4] - z[0];
        let c = if s.abs() >= s2.abs() { s } else { s2 };
        if c == 0.0 {
            return Side::Boundary;
        }
        let w = z.middle().scale(&(1.0 / c));
        let sign = |x: &Vec3| {
            let v = form21(&w, x);
            if v.abs() <= 1e-14 * w.norm().max(1.0) {
                Ordering::Equal
            } else {
                v.partial_cmp(&0.0).unwrap_or(Ordering::Equal)
            }
        };
        if halfspace_side_from_signs(sign(&self.u), sign(&self.x_plus), sign(&self.x_minus), self.extension) {
            Side::Inside
        } else {
            Side::Outside
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::einstein::{embed, f1, f2, p0, unembed};
    use crate::group::rho;

    #[test]
    fn basic_surface_membership() {
        let s = compactify(&CrookedPlane::positive(Vec3::zero(), Vec3([1.0, 0.0, 0.0])).unwrap());
        assert!(in_crooked_surface(&p0(), &s));
        assert!(in_crooked_surface(&p_inf(), &s));
        assert!(!in_crooked_surface(&embed(&Vec3([0.0, 3.0, 1.0])), &s));
        assert!(in_crooked_surface(&f1(), &s));
        assert!(in_crooked_surface(&f2(), &s));
    }

    #[test]
    fn scaffolding_meets_at_ideal_point() {
        let s = compactify(&CrookedPlane::positive(Vec3([0.5, -1.0, 2.0]), Vec3([1.0, 0.3, 0.2])).unwrap());
        let sc = s.scaffolding().unwrap();
        let f = s.frame().unwrap();
        let x = EinPoint::from_rep_unchecked(ideal_point(&s.vertex, &f.x_plus));
        assert!(sc.phi_inf.contains(&x, 1e-12));
        assert!(sc.phi_p.contains(&x, 1e-12));
        for ph in [&sc.phi_inf, &sc.psi_inf, &sc.phi_p, &sc.psi_p] {
            for k in 0..10 {
                assert!(in_crooked_surface(&ph.point(k as f64 * 0.3), &s));
            }
        }
    }

    #[test]
    fn basic_torus_data_and_rho() {
        let s = CrookedSurface::basic(Extension::Positive);
        let d = s.torus_data().unwrap();
        assert!(d.p1.same_as(&p0(), 1e-15) && d.p2.same_as(&p_inf(), 1e-15));
        assert!(d.f1.same_as(&f1(), 1e-15) && d.f2.same_as(&f2(), 1e-15));
        let r = s.transformed(&rho()).torus_data().unwrap();
        assert!(r.p1.same_as(&p_inf(), 1e-15) && r.p2.same_as(&p0(), 1e-15));
        assert!(r.f1.same_as(&f1(), 1e-15) && r.f2.same_as(&f2(), 1e-15));
    }

    #[test]
    fn lorentz_to_is_lorentz_and_maps_frame() {
        for u in [Vec3([-2.0, 0.0, 1.0]), Vec3([0.3, 1.2, -0.4]), Vec3([1.0, 0.0, 0.0])] {
            let g = lorentz_to(&u).unwrap();
            assert!(g.lorentz_residual() < 1e-12);
            let img = g.apply(&Vec3([0.0, -1.0, 1.0]));
            let f = null_frame(&u).unwrap();
            assert!(img.cross(&f.x_plus).max_abs() < 1e-12 && img[2] > 0.0);
        }
    }

    #[test]
    fn region_agrees_with_affine_halfspace() {
        let hs = CrookedHalfspace::new(Vec3([0.2, 0.1, -0.3]), Vec3([-2.0, 0.5, 1.0])).unwrap();
        let r = Region::new(Iso32::identity(), hs.clone());
        let t = r.tester().unwrap();
        for i in 0..200 {
            let x = (i as f64 * 0.731).sin() * 3.0;
            let y = (i as f64 * 1.377).cos() * 3.0;
            let z = (i as f64 * 0.219).sin() * 3.0;
            let q = Vec3([x, y, z]);
            let want = crate::affine::halfspace_side(&q, &hs, 1e-9).unwrap();
            assert_eq!(t.side(&embed_rep(&q), 1e-9), want, "{q:?}");
        }
        let _ = unembed(&p0::<f64>());
    }
}
