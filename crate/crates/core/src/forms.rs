//! Coordinate vectors in R^{3,2} and R^{2,1}, their fixed-basis bilinear
//! forms, causal classification and null frames.
//!
//! R^{3,2} uses the form `x1y1 + x2y2 + x3y3 - x4y4 - x5y5`; R^{2,1} uses
//! `v1w1 + v2w2 - v3w3` with the third coordinate as time. Future-pointing
//! means a strictly positive time coordinate.

use std::cmp::Ordering;
use std::ops::{Add, Index, Neg, Sub};

use serde::{Deserialize, Serialize};

use crate::error::{GeomError, Result};
use crate::scalar::Scalar;

/// Default tolerance for causal classification in floating mode.
pub const EPS_CAUSAL: f64 = 1e-12;

macro_rules! coord_vector {
    ($name:ident, $n:expr) => {
        #[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
        pub struct $name<S = f64>(pub [S; $n]);

        impl<S: Scalar> $name<S> {
            pub fn zero() -> Self {
                Self(std::array::from_fn(|_| S::zero()))
            }

            pub fn basis(i: usize) -> Self {
                Self(std::array::from_fn(|j| if i == j { S::one() } else { S::zero() }))
            }

            pub fn scale(&self, c: &S) -> Self {
                Self(std::array::from_fn(|i| self.0[i].clone() * c.clone()))
            }

            pub fn is_zero(&self) -> bool {
                self.0.iter().all(|x| x.is_zero())
            }

            /// Euclidean dot product of the coordinate arrays.
            pub fn dot(&self, other: &Self) -> S {
                self.0
                    .iter()
                    .zip(other.0.iter())
                    .fold(S::zero(), |acc, (a, b)| acc + a.clone() * b.clone())
            }

            pub fn to_f64(&self) -> $name<f64> {
                $name(std::array::from_fn(|i| self.0[i].to_f64()))
            }

            pub fn from_f64(v: &$name<f64>) -> Self {
                Self(std::array::from_fn(|i| S::from_f64(v.0[i])))
            }

            /// Largest absolute coordinate, as a double.
            pub fn max_abs(&self) -> f64 {
                self.0.iter().map(|x| x.to_f64().abs()).fold(0.0, f64::max)
            }
        }

        impl $name<f64> {
            pub fn norm(&self) -> f64 {
                self.dot(self).sqrt()
            }

            pub fn normalized(&self) -> Self {
                self.scale(&(1.0 / self.norm()))
            }

            pub fn is_finite(&self) -> bool {
                self.0.iter().all(|x| x.is_finite())
            }
        }

        impl<S> Index<usize> for $name<S> {
            type Output = S;
            fn index(&self, i: usize) -> &S {
                &self.0[i]
            }
        }

        impl<S: Scalar> Add for &$name<S> {
            type Output = $name<S>;
            fn add(self, rhs: Self) -> $name<S> {
                $name(std::array::from_fn(|i| self.0[i].clone() + rhs.0[i].clone()))
            }
        }

        impl<S: Scalar> Add for $name<S> {
            type Output = $name<S>;
            fn add(self, rhs: Self) -> $name<S> {
                &self + &rhs
            }
        }

        impl<S: Scalar> Sub for &$name<S> {
            type Output = $name<S>;
            fn sub(self, rhs: Self) -> $name<S> {
                $name(std::array::from_fn(|i| self.0[i].clone() - rhs.0[i].clone()))
            }
        }

        impl<S: Scalar> Sub for $name<S> {
            type Output = $name<S>;
            fn sub(self, rhs: Self) -> $name<S> {
                &self - &rhs
            }
        }

        impl<S: Scalar> Neg for &$name<S> {
            type Output = $name<S>;
            fn neg(self) -> $name<S> {
                $name(std::array::from_fn(|i| -self.0[i].clone()))
            }
        }

        impl<S: Scalar> Neg for $name<S> {
            type Output = $name<S>;
            fn neg(self) -> $name<S> {
                -&self
            }
        }
    };
}

coord_vector!(Vec3, 3);
coord_vector!(Vec5, 5);

impl<S: Scalar> Vec3<S> {
    pub fn new(a: S, b: S, c: S) -> Self {
        Self([a, b, c])
    }

    /// Euclidean cross product.
    pub fn cross(&self, o: &Self) -> Self {
        let [a1, a2, a3] = &self.0;
        let [b1, b2, b3] = &o.0;
        Self([
            a2.clone() * b3.clone() - a3.clone() * b2.clone(),
            a3.clone() * b1.clone() - a1.clone() * b3.clone(),
            a1.clone() * b2.clone() - a2.clone() * b1.clone(),
        ])
    }

    pub fn time(&self) -> &S {
        &self.0[2]
    }
}

impl Vec3<f64> {
    pub fn xyz(x: f64, y: f64, z: f64) -> Self {
        Self([x, y, z])
    }
}

impl<S: Scalar> Vec5<S> {
    pub fn new(c: [S; 5]) -> Self {
        Self(c)
    }

    /// Coordinates 2..4, the R^{2,1} slot of the embedding.
    pub fn middle(&self) -> Vec3<S> {
        Vec3([self.0[1].clone(), self.0[2].clone(), self.0[3].clone()])
    }

    /// Assembles `(a : v : b)`.
    pub fn from_parts(a: S, v: &Vec3<S>, b: S) -> Self {
        Self([a, v.0[0].clone(), v.0[1].clone(), v.0[2].clone(), b])
    }
}

impl Vec5<f64> {
    pub fn from_slice(c: [f64; 5]) -> Self {
        Self(c)
    }
}

/// The (3,2) form on R^5.
pub fn form32<S: Scalar>(x: &Vec5<S>, y: &Vec5<S>) -> S {
    let p = |i: usize| x.0[i].clone() * y.0[i].clone();
    p(0) + p(1) + p(2) - p(3) - p(4)
}

/// The (2,1) form on R^3, third coordinate timelike.
pub fn form21<S: Scalar>(v: &Vec3<S>, w: &Vec3<S>) -> S {
    let p = |i: usize| v.0[i].clone() * w.0[i].clone();
    p(0) + p(1) - p(2)
}

/// Causal character of a vector.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum CausalClass {
    Spacelike,
    Timelike,
    Lightlike,
    Zero,
}

/// Vectors carrying a fixed-signature self form.
pub trait SelfForm<S: Scalar> {
    fn self_form(&self) -> S;
    fn is_null_vector(&self) -> bool;
    /// Scale used to make the floating tolerance relative.
    fn magnitude2(&self) -> f64;
}

impl<S: Scalar> SelfForm<S> for Vec3<S> {
    fn self_form(&self) -> S {
        form21(self, self)
    }
    fn is_null_vector(&self) -> bool {
        self.is_zero()
    }
    fn magnitude2(&self) -> f64 {
        self.to_f64().dot(&self.to_f64())
    }
}

impl<S: Scalar> SelfForm<S> for Vec5<S> {
    fn self_form(&self) -> S {
        form32(self, self)
    }
    fn is_null_vector(&self) -> bool {
        self.is_zero()
    }
    fn magnitude2(&self) -> f64 {
        self.to_f64().dot(&self.to_f64())
    }
}

/// Classifies `v` by the sign of its self form.
///
/// `tol` is relative to the squared Euclidean norm in floating mode and is
/// ignored by exact scalars.
pub fn causal_class_tol<S: Scalar, V: SelfForm<S>>(v: &V, tol: f64) -> CausalClass {
    if v.is_null_vector() {
        return CausalClass::Zero;
    }
    let scale = if S::EXACT { 0.0 } else { tol * v.magnitude2().max(f64::MIN_POSITIVE) };
    match v.self_form().sign_tol(scale) {
        Ordering::Greater => CausalClass::Spacelike,
        Ordering::Less => CausalClass::Timelike,
        Ordering::Equal => CausalClass::Lightlike,
    }
}

pub fn causal_class<S: Scalar, V: SelfForm<S>>(v: &V) -> CausalClass {
    causal_class_tol(v, EPS_CAUSAL)
}

/// Determinant of the 3x3 matrix with rows `a`, `b`, `c`.
pub fn orientation_det<S: Scalar>(a: &Vec3<S>, b: &Vec3<S>, c: &Vec3<S>) -> S {
    a.dot(&b.cross(c))
}

/// A pair of future-pointing null vectors spanning the orthogonal plane of a
/// spacelike director, normalized to unit time coordinate.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct NullFrame<S = f64> {
    pub u: Vec3<S>,
    pub x_minus: Vec3<S>,
    pub x_plus: Vec3<S>,
}

/// Unit-time null vectors of `u^⊥`, ordered so that `det[u, x⁻, x⁺] > 0`.
///
/// Exact scalars need `u1² + u2² - u3²` to be a rational square.
pub fn null_frame<S: Scalar>(u: &Vec3<S>) -> Result<NullFrame<S>> {
    if causal_class(u) != CausalClass::Spacelike {
        return Err(GeomError::NotSpacelike);
    }
    let [u1, u2, u3] = u.0.clone();
    let r2 = u1.clone() * u1.clone() + u2.clone() * u2.clone();
    let disc = r2.clone() - u3.clone() * u3.clone();
    let d = disc.try_sqrt().ok_or(GeomError::IrrationalFrame)?;
    // centre of the chord u^⊥ ∩ {time = 1} ∩ lightcone, and its half-offset
    let c1 = u3.clone() * u1.clone() / r2.clone();
    let c2 = u3.clone() * u2.clone() / r2.clone();
    let p1 = -(d.clone() * u2.clone()) / r2.clone();
    let p2 = d * u1 / r2;
    let a = Vec3([c1.clone() + p1.clone(), c2.clone() + p2.clone(), S::one()]);
    let b = Vec3([c1 - p1, c2 - p2, S::one()]);
    let (x_minus, x_plus) = if orientation_det(u, &a, &b).is_positive() { (a, b) } else { (b, a) };
    Ok(NullFrame { u: u.clone(), x_minus, x_plus })
}

/// Symmetric data of the two pairings `v·x⁻(u)` and `v·x⁺(u)`: their sum and
/// product. Both are rational functions of `u` and `v`, so this works even
/// when the frame itself is irrational.
pub fn frame_pairing_sum_product<S: Scalar>(u: &Vec3<S>, v: &Vec3<S>) -> Result<(S, S)> {
    if causal_class(u) != CausalClass::Spacelike {
        return Err(GeomError::NotSpacelike);
    }
    let [u1, u2, u3] = u.0.clone();
    let [v1, v2, v3] = v.0.clone();
    let r2 = u1.clone() * u1.clone() + u2.clone() * u2.clone();
    let disc = r2.clone() - u3.clone() * u3.clone();
    // v·x± = A ± B with A = v·(c, 1) and B = v·(p, 0)
    let a = (v1.clone() * u1.clone() + v2.clone() * u2.clone()) * u3 / r2.clone() - v3;
    let cross = u1 * v2 - u2 * v1;
    let b2 = disc * cross.clone() * cross / (r2.clone() * r2);
    let sum = S::two() * a.clone();
    let product = a.clone() * a - b2;
    Ok((sum, product))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::{rat, Rational};
    use crate::scalar::Scalar;

    fn v3(a: f64, b: f64, c: f64) -> Vec3 {
        Vec3([a, b, c])
    }

    #[test]
    fn forms_on_basis_vectors() {
        let e = |i| Vec5::<f64>::basis(i);
        assert_eq!(form32(&e(0), &e(0)), 1.0);
        assert_eq!(form32(&e(3), &e(3)), -1.0);
        assert_eq!(form32(&e(0), &e(1)), 0.0);
        assert_eq!(form21(&v3(1., 0., 0.), &v3(1., 0., 0.)), 1.0);
        assert_eq!(form21(&v3(0., 1., 1.), &v3(0., 1., 1.)), 0.0);
        assert_eq!(form21(&v3(0., 0., 1.), &v3(0., 0., 1.)), -1.0);
    }

    #[test]
    fn classification_examples() {
        let p0 = Vec5([1.0, 0.0, 0.0, 0.0, 1.0]);
        assert_eq!(causal_class(&p0), CausalClass::Lightlike);
        assert_eq!(causal_class(&Vec3::<f64>::zero()), CausalClass::Zero);
        assert_eq!(causal_class(&v3(0., 3., 1.)), CausalClass::Spacelike);
        assert_eq!(causal_class(&v3(0., 0.5, 1.)), CausalClass::Timelike);
        let exact = Vec3([rat(0, 1), rat(1, 1), rat(1, 1)]);
        assert_eq!(causal_class(&exact), CausalClass::Lightlike);
    }

    #[test]
    fn null_frame_examples() {
        let f = null_frame(&v3(1., 0., 0.)).unwrap();
        assert_eq!(f.x_minus, v3(0., 1., 1.));
        assert_eq!(f.x_plus, v3(0., -1., 1.));
        let f = null_frame(&v3(0., 1., 0.)).unwrap();
        assert_eq!(f.x_minus, v3(-1., 0., 1.));
        assert_eq!(f.x_plus, v3(1., 0., 1.));
        let f = null_frame(&v3(7.5, 0., 0.)).unwrap();
        assert_eq!(f.x_minus, v3(0., 1., 1.));
        assert_eq!(f.x_plus, v3(0., -1., 1.));
    }

    #[test]
    fn null_frame_rejects_causal_directors() {
        assert_eq!(null_frame(&v3(0., 0., 1.)), Err(GeomError::NotSpacelike));
        assert_eq!(null_frame(&v3(0., 1., 1.)), Err(GeomError::NotSpacelike));
        assert_eq!(null_frame(&Vec3::<f64>::zero()), Err(GeomError::NotSpacelike));
    }

    #[test]
    fn exact_frame_when_rational() {
        let u: Vec3<Rational> = Vec3([rat(-5, 1), rat(0, 1), rat(3, 1)]);
        let f = null_frame(&u).unwrap();
        assert!(form21(&f.x_minus, &f.x_minus).is_zero());
        assert!(form21(&f.u, &f.x_plus).is_zero());
        let irr: Vec3<Rational> = Vec3([rat(-2, 1), rat(0, 1), rat(1, 1)]);
        assert_eq!(null_frame(&irr), Err(GeomError::IrrationalFrame));
    }

    #[test]
    fn orientation_examples() {
        let e = |i| Vec3::<f64>::basis(i);
        assert_eq!(orientation_det(&e(0), &e(1), &e(2)), 1.0);
        assert_eq!(orientation_det(&v3(1., 0., 0.), &v3(0., 1., 1.), &v3(0., -1., 1.)), 2.0);
        assert_eq!(orientation_det(&e(0), &e(0), &e(2)), 0.0);
    }

    #[test]
    fn pairing_sum_product_matches_frame() {
        let u = v3(-2., 0.3, 1.);
        let v = v3(0.4, -1.1, 0.2);
        let f = null_frame(&u).unwrap();
        let (s, p) = frame_pairing_sum_product(&u, &v).unwrap();
        let a = form21(&v, &f.x_minus);
        let b = form21(&v, &f.x_plus);
        assert!((s - (a + b)).abs() < 1e-12);
        assert!((p - a * b).abs() < 1e-12);
    }
}
