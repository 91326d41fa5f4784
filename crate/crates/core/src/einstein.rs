//! The projective model of Ein^3: points, photons, lightcones, the Minkowski
//! embedding, Einstein tori and the solid-cylinder picture of the double cover.

use std::f64::consts::PI;

use nalgebra::{DMatrix, SMatrix};
use serde::{Deserialize, Serialize};

use crate::error::{GeomError, Result};
use crate::forms::{causal_class_tol, form21, form32, CausalClass, Vec3, Vec5, EPS_CAUSAL};
use crate::group::Iso32;
use crate::scalar::Scalar;

/// Relative tolerance for incidence and photon membership.
pub const EPS_INCIDENCE: f64 = 1e-9;

/// A point of Ein^3, stored through a normalized null representative.
///
/// Floating representatives have unit Euclidean norm and a positive leading
/// coordinate (ignoring entries below 1e-12); exact ones are scaled so the
/// first nonzero coordinate is 1.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EinPoint<S = f64> {
    rep: Vec5<S>,
}

fn normalize<S: Scalar>(v: &Vec5<S>) -> Vec5<S> {
    if S::EXACT {
        let lead = v.0.iter().find(|c| !c.is_zero()).cloned().unwrap_or_else(S::one);
        Vec5(std::array::from_fn(|i| v.0[i].clone() / lead.clone()))
    } else {
        let f = v.to_f64();
        let n = f.norm();
        let lead = f.0.iter().copied().find(|c| c.abs() > 1e-12 * n).unwrap_or(1.0);
        let s = if lead < 0.0 { -1.0 / n } else { 1.0 / n };
        Vec5(std::array::from_fn(|i| v.0[i].clone() * S::from_f64(s)))
    }
}

impl<S: Scalar> EinPoint<S> {
    /// Checked constructor: the representative must be a nonzero null vector.
    pub fn new(rep: Vec5<S>) -> Result<Self> {
        match causal_class_tol(&rep, EPS_CAUSAL * 1e3) {
            CausalClass::Lightlike => Ok(Self { rep: normalize(&rep) }),
            CausalClass::Zero => Err(GeomError::Invalid("zero vector has no projective class".into())),
            _ => Err(GeomError::Invalid("representative is not null".into())),
        }
    }

    /// Normalizes without checking nullity.
    pub fn from_rep_unchecked(rep: Vec5<S>) -> Self {
        Self { rep: normalize(&rep) }
    }

    pub fn rep(&self) -> &Vec5<S> {
        &self.rep
    }

    pub fn to_f64(&self) -> EinPoint<f64> {
        EinPoint::from_rep_unchecked(self.rep.to_f64())
    }

    /// Projective equality: proportional representatives.
    pub fn same_as(&self, o: &Self, tol: f64) -> bool {
        if S::EXACT {
            return self.rep == o.rep;
        }
        let a = self.rep.to_f64().normalized();
        let b = o.rep.to_f64().normalized();
        let d = a.dot(&b).abs();
        1.0 - d <= tol
    }

    pub fn transform(&self, g: &Iso32<S>) -> Self {
        Self::from_rep_unchecked(g.apply_vec(&self.rep))
    }

    /// `(c1 : ... : c5)`.
    pub fn colon_string(&self) -> String {
        let r = self.rep.to_f64();
        r.0.iter().map(|x| format!("{}", x + 0.0)).collect::<Vec<_>>().join(":")
    }
}

impl EinPoint<f64> {
    /// Parses the colon notation `a:b:c:d:e`.
    pub fn parse(s: &str) -> Result<Self> {
        let parts: Vec<f64> = s
            .split(':')
            .map(|t| t.trim().parse::<f64>().map_err(|e| GeomError::Invalid(format!("{t}: {e}"))))
            .collect::<Result<_>>()?;
        let c: [f64; 5] = parts.try_into().map_err(|_| GeomError::Invalid("expected five coordinates".into()))?;
        Self::new(Vec5(c))
    }
}

pub fn p0<S: Scalar>() -> EinPoint<S> {
    EinPoint::from_rep_unchecked(Vec5([S::one(), S::zero(), S::zero(), S::zero(), S::one()]))
}

pub fn p_inf<S: Scalar>() -> EinPoint<S> {
    EinPoint::from_rep_unchecked(Vec5([-S::one(), S::zero(), S::zero(), S::zero(), S::one()]))
}

pub fn f1<S: Scalar>() -> EinPoint<S> {
    EinPoint::from_rep_unchecked(Vec5([S::zero(), S::zero(), S::one(), S::one(), S::zero()]))
}

pub fn f2<S: Scalar>() -> EinPoint<S> {
    EinPoint::from_rep_unchecked(Vec5([S::zero(), S::zero(), -S::one(), S::one(), S::zero()]))
}

/// Unnormalized representative `((1-Q)/2, v, (1+Q)/2)`.
pub fn embed_rep<S: Scalar>(v: &Vec3<S>) -> Vec5<S> {
    let q = form21(v, v);
    Vec5::from_parts((S::one() - q.clone()) * S::half(), v, (S::one() + q) * S::half())
}

pub fn embed<S: Scalar>(v: &Vec3<S>) -> EinPoint<S> {
    EinPoint::from_rep_unchecked(embed_rep(v))
}

/// `(y2, y3, y4) / (y1 + y5)`.
pub fn unembed<S: Scalar>(q: &EinPoint<S>) -> Result<Vec3<S>> {
    unembed_rep(&q.rep)
}

pub fn unembed_rep<S: Scalar>(y: &Vec5<S>) -> Result<Vec3<S>> {
    let s = y.0[0].clone() + y.0[4].clone();
    let scale = if S::EXACT { 0.0 } else { EPS_INCIDENCE * y.max_abs() };
    if s.is_zero_tol(scale) {
        return Err(GeomError::AtInfinity);
    }
    Ok(y.middle().scale(&(S::one() / s)))
}

fn orth_tol<S: Scalar>(a: &Vec5<S>, b: &Vec5<S>) -> f64 {
    if S::EXACT {
        0.0
    } else {
        EPS_INCIDENCE * a.max_abs() * b.max_abs()
    }
}

/// Distinct points on a common photon.
pub fn incident<S: Scalar>(p: &EinPoint<S>, q: &EinPoint<S>) -> Result<bool> {
    if p.same_as(q, 1e-14) {
        return Err(GeomError::SamePoint);
    }
    Ok(form32(&p.rep, &q.rep).is_zero_tol(orth_tol(&p.rep, &q.rep)))
}

/// `q` lies on the lightcone of `p`.
pub fn lightcone_contains<S: Scalar>(q: &EinPoint<S>, p: &EinPoint<S>) -> bool {
    form32(&p.rep, &q.rep).is_zero_tol(orth_tol(&p.rep, &q.rep))
}

/// Projectivization of a totally isotropic 2-plane.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Photon<S = f64> {
    pub a: EinPoint<S>,
    pub b: EinPoint<S>,
}

impl<S: Scalar> Photon<S> {
    pub fn new(a: EinPoint<S>, b: EinPoint<S>) -> Result<Self> {
        if !incident(&a, &b)? {
            return Err(GeomError::Invalid("photon spanned by non-incident points".into()));
        }
        Ok(Self { a, b })
    }

    pub fn transform(&self, g: &Iso32<S>) -> Self {
        Self { a: self.a.transform(g), b: self.b.transform(g) }
    }
}

impl Photon<f64> {
    /// Points `cos t·a + sin t·b` for `t ∈ [0, π)`.
    pub fn point(&self, t: f64) -> EinPoint {
        let (a, b) = (self.a.rep(), self.b.rep());
        EinPoint::from_rep_unchecked(&a.scale(&t.cos()) + &b.scale(&t.sin()))
    }

    /// Membership: orthogonal to both spanning points and in their span.
    pub fn contains(&self, q: &EinPoint, tol: f64) -> bool {
        let (a, b, y) = (self.a.rep(), self.b.rep(), q.rep());
        if form32(a, y).abs() > tol || form32(b, y).abs() > tol {
            return false;
        }
        let m = SMatrix::<f64, 5, 2>::from_columns(&[a.0.into(), b.0.into()]);
        let yy: nalgebra::Vector5<f64> = y.0.into();
        let Some(c) = (m.transpose() * m).try_inverse().map(|inv| inv * m.transpose() * yy) else {
            return false;
        };
        (m * c - yy).norm() <= tol
    }
}

/// The closed curve `econe(p) ∩ econe(q)` for non-incident `p`, `q`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SpacelikeCircle {
    pub e_a: Vec5,
    pub e_b: Vec5,
    pub e_c: Vec5,
}

impl SpacelikeCircle {
    pub fn point(&self, t: f64) -> EinPoint {
        EinPoint::from_rep_unchecked(&(&self.e_a.scale(&t.cos()) + &self.e_b.scale(&t.sin())) + &self.e_c)
    }

    pub fn rep(&self, t: f64) -> Vec5 {
        &(&self.e_a.scale(&t.cos()) + &self.e_b.scale(&t.sin())) + &self.e_c
    }

    pub fn transform(&self, g: &Iso32) -> Self {
        Self { e_a: g.apply_vec(&self.e_a), e_b: g.apply_vec(&self.e_b), e_c: g.apply_vec(&self.e_c) }
    }
}

/// Orthonormal basis (two positive vectors, then one negative) of the
/// orthogonal complement of `span{p, q}`, Gram–Schmidt from the coordinate axes.
pub fn lightcone_intersection(p: &EinPoint, q: &EinPoint) -> Result<SpacelikeCircle> {
    if incident(p, q)? {
        return Err(GeomError::IncidentPoints);
    }
    let (p, q) = (p.rep(), q.rep());
    let pq = form32(p, q);
    let project = |v: &Vec5| &(v - &p.scale(&(form32(v, q) / pq))) - &q.scale(&(form32(v, p) / pq));
    let mut basis: Vec<(Vec5, f64)> = Vec::new();
    for i in 0..5 {
        let mut v = project(&Vec5::basis(i));
        for (b, nb) in &basis {
            v = &v - &b.scale(&(form32(&v, b) / nb));
        }
        let n = form32(&v, &v);
        if n.abs() > 1e-9 * v.dot(&v).max(1e-300) && v.norm() > 1e-9 {
            basis.push((v, n));
        }
        if basis.len() == 3 {
            break;
        }
    }
    let pos: Vec<Vec5> = basis.iter().filter(|(_, n)| *n > 0.0).map(|(v, n)| v.scale(&(1.0 / n.sqrt()))).collect();
    let neg: Vec<Vec5> = basis.iter().filter(|(_, n)| *n < 0.0).map(|(v, n)| v.scale(&(1.0 / (-n).sqrt()))).collect();
    if pos.len() != 2 || neg.len() != 1 {
        return Err(GeomError::DegenerateData("complement of the pair is not of signature (2,1)"));
    }
    Ok(SpacelikeCircle { e_a: pos[0].clone(), e_b: pos[1].clone(), e_c: neg[0].clone() })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TorusData {
    pub p1: EinPoint,
    pub p2: EinPoint,
    pub f1: EinPoint,
    pub f2: EinPoint,
}

impl TorusData {
    pub fn new(p1: EinPoint, p2: EinPoint, f1: EinPoint, f2: EinPoint) -> Result<Self> {
        let d = Self { p1, p2, f1, f2 };
        d.validate()?;
        Ok(d)
    }

    pub fn validate(&self) -> Result<()> {
        if incident(&self.p1, &self.p2)? {
            return Err(GeomError::DegenerateData("p1 and p2 are incident"));
        }
        for f in [&self.f1, &self.f2] {
            if !lightcone_contains(f, &self.p1) || !lightcone_contains(f, &self.p2) {
                return Err(GeomError::DegenerateData("f_i must lie on both lightcones"));
            }
        }
        if self.f1.same_as(&self.f2, 1e-12) {
            return Err(GeomError::DegenerateData("f1 and f2 coincide"));
        }
        Ok(())
    }

    pub fn transform(&self, g: &Iso32) -> Self {
        Self { p1: self.p1.transform(g), p2: self.p2.transform(g), f1: self.f1.transform(g), f2: self.f2.transform(g) }
    }
}

/// An Einstein torus, the null locus of `normal^⊥`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EinTorus {
    pub normal: Vec5,
}

impl EinTorus {
    pub fn contains(&self, q: &EinPoint, tol: f64) -> bool {
        form32(&self.normal, q.rep()).abs() <= tol
    }
}

pub fn torus_from_data(d: &TorusData) -> Result<EinTorus> {
    d.validate()?;
    // rows J·rep_i, so that the kernel is the form-orthogonal complement
    let rows: Vec<[f64; 5]> = [&d.p1, &d.p2, &d.f1, &d.f2]
        .iter()
        .map(|p| {
            let r = p.rep();
            [r[0], r[1], r[2], -r[3], -r[4]]
        })
        .collect();
    let a = DMatrix::from_fn(5, 5, |i, j| if i < 4 { rows[i][j] } else { 0.0 });
    let svd = a.svd(false, true);
    let vt = svd.v_t.ok_or(GeomError::DegenerateData("decomposition failed"))?;
    let (mut kmin, mut smin) = (0, f64::INFINITY);
    let mut small = 0;
    for (k, s) in svd.singular_values.iter().enumerate() {
        if *s < 1e-9 {
            small += 1;
        }
        if *s < smin {
            smin = *s;
            kmin = k;
        }
    }
    if small != 1 {
        return Err(GeomError::DegenerateData("lifts do not span a 4-dimensional subspace"));
    }
    let n = Vec5(std::array::from_fn(|j| vt[(kmin, j)]));
    let n = EinPoint::from_rep_unchecked(n).rep().clone();
    if form32(&n, &n) <= 0.0 {
        return Err(GeomError::DegenerateData("normal is not spacelike"));
    }
    Ok(EinTorus { normal: n })
}

/// `(cos φ : sin φ cos θ : sin φ sin θ : sin t : cos t)`.
pub fn param_chart(phi: f64, theta: f64, t: f64) -> EinPoint {
    EinPoint::from_rep_unchecked(param_rep(phi, theta, t))
}

pub fn param_rep(phi: f64, theta: f64, t: f64) -> Vec5 {
    Vec5([phi.cos(), phi.sin() * theta.cos(), phi.sin() * theta.sin(), t.sin(), t.cos()])
}

/// Lift to `S² × S¹` with the circle angle in `[0, π)`: returns `(a, t)`
/// with `a` a unit 3-vector and the point equal to `(a : sin t : cos t)`.
pub fn double_cover_lift(q: &EinPoint) -> (Vec3, f64) {
    let r = q.rep();
    let k = r[3].hypot(r[4]);
    let mut a = Vec3([r[0] / k, r[1] / k, r[2] / k]);
    let mut t = r[3].atan2(r[4]);
    if t < 0.0 {
        t += PI;
        a = -a;
    }
    if t >= PI - 1e-15 {
        t = 0.0;
        a = -a;
    }
    (a, t)
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub enum CylinderPoint {
    Removed,
    Point { x: f64, y: f64, h: f64 },
}

/// The figure model: each `S²` slice of the lift goes to the unit disk by
/// stereographic projection from the south pole followed by the radial
/// compression `r ↦ (2/π) atan r`, i.e. radius `φ/π`; the south-pole circle
/// is removed.
pub fn cylinder_coords(q: &EinPoint) -> CylinderPoint {
    let (a, t) = double_cover_lift(q);
    let phi = a[1].hypot(a[2]).atan2(a[0]);
    if phi > PI - 1e-9 {
        return CylinderPoint::Removed;
    }
    let theta = a[2].atan2(a[1]);
    let r = phi / PI;
    CylinderPoint::Point { x: r * theta.cos(), y: r * theta.sin(), h: t }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::{rat, Rational};

    #[test]
    fn embed_examples() {
        assert!(embed(&Vec3::<f64>::zero()).same_as(&p0(), 1e-15));
        let e = embed(&Vec3([rat(1, 1), rat(0, 1), rat(0, 1)]));
        assert_eq!(e.rep(), &Vec5([rat(0, 1), rat(1, 1), rat(0, 1), rat(0, 1), rat(1, 1)]));
        let v = Vec3([0.3, -2.0, 1.7]);
        assert!(form32(&embed_rep(&v), &embed_rep(&v)).abs() < 1e-14);
    }

    #[test]
    fn unembed_examples() {
        assert_eq!(unembed(&p0::<Rational>()).unwrap(), Vec3::zero());
        let q = EinPoint::new(Vec5([0.0, 1.0, 0.0, 0.0, 1.0])).unwrap();
        let v = unembed(&q).unwrap();
        assert!((v[0] - 1.0).abs() < 1e-15 && v[1] == 0.0 && v[2] == 0.0);
        assert_eq!(unembed(&p_inf::<f64>()), Err(GeomError::AtInfinity));
    }

    #[test]
    fn incidence_examples() {
        assert!(incident(&p0::<f64>(), &f1()).unwrap());
        assert!(!incident(&p0::<f64>(), &p_inf()).unwrap());
        assert_eq!(incident(&p0::<f64>(), &p0()), Err(GeomError::SamePoint));
        assert!(lightcone_contains(&p0::<f64>(), &p0()));
        for k in 0..12 {
            let t = k as f64 * 0.5;
            let q = EinPoint::new(Vec5([0.0, t.cos(), t.sin(), 1.0, 0.0])).unwrap();
            assert!(lightcone_contains(&q, &p_inf()));
        }
        assert!(!lightcone_contains(&embed(&Vec3([0.2, 0.1, 3.0])), &p_inf()));
    }

    #[test]
    fn circle_through_basic_points() {
        let c = lightcone_intersection(&p_inf(), &p0()).unwrap();
        for k in 0..50 {
            let t = k as f64 * 0.13;
            let want = Vec5([0.0, t.cos(), t.sin(), 1.0, 0.0]);
            let got = c.rep(t);
            assert!((&got - &want).max_abs() < 1e-12);
        }
        assert_eq!(lightcone_intersection(&p0(), &f1()), Err(GeomError::IncidentPoints));
    }

    #[test]
    fn basic_torus_normal() {
        let d = TorusData::new(p0(), p_inf(), f1(), f2()).unwrap();
        let t = torus_from_data(&d).unwrap();
        assert!((&t.normal - &Vec5([0.0, 1.0, 0.0, 0.0, 0.0])).max_abs() < 1e-12);
    }

    #[test]
    fn chart_examples() {
        assert!(param_chart(0.0, 0.3, 0.0).same_as(&p0(), 1e-15));
        let h = std::f64::consts::FRAC_PI_2;
        assert!(param_chart(h, h, h).same_as(&f1(), 1e-15));
    }

    #[test]
    fn cylinder_examples() {
        match cylinder_coords(&p0()) {
            CylinderPoint::Point { x, y, h } => assert!(x.abs() < 1e-15 && y.abs() < 1e-15 && h == 0.0),
            CylinderPoint::Removed => panic!("p0 removed"),
        }
        assert_eq!(cylinder_coords(&param_chart(PI, 0.0, 1.0)), CylinderPoint::Removed);
        match cylinder_coords(&param_chart(1.0, 2.0, 0.0)) {
            CylinderPoint::Point { h, .. } => assert_eq!(h, 0.0),
            CylinderPoint::Removed => panic!(),
        }
    }
}
