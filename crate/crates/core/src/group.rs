//! Form-preserving 5x5 matrices: lifts of Minkowski similarities, the
//! involution ρ, the rational matrix μ, Cartan projections and a finite-data
//! distortion classifier.

use std::ops::Mul;

use nalgebra::{DMatrix, Matrix3, Matrix5};
use serde::{Deserialize, Serialize};

use crate::error::{GeomError, Result};
use crate::forms::{form21, Vec3, Vec5};
use crate::scalar::{rat, Rational, Scalar};

/// Relative tolerance on `mᵀJm - J` in floating mode.
pub const EPS_GROUP: f64 = 1e-9;

const J5: [i64; 5] = [1, 1, 1, -1, -1];
const J3: [i64; 3] = [1, 1, -1];

/// A 3x3 matrix acting on R^{2,1}, rows first.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Mat3<S = f64>(pub [[S; 3]; 3]);

impl<S: Scalar> Mat3<S> {
    pub fn identity() -> Self {
        Self(std::array::from_fn(|i| std::array::from_fn(|j| if i == j { S::one() } else { S::zero() })))
    }

    pub fn apply(&self, v: &Vec3<S>) -> Vec3<S> {
        Vec3(std::array::from_fn(|i| {
            (0..3).fold(S::zero(), |acc, j| acc + self.0[i][j].clone() * v.0[j].clone())
        }))
    }

    pub fn mul(&self, o: &Self) -> Self {
        Self(std::array::from_fn(|i| {
            std::array::from_fn(|j| (0..3).fold(S::zero(), |acc, k| acc + self.0[i][k].clone() * o.0[k][j].clone()))
        }))
    }

    /// Inverse of a Lorentz matrix, `J gᵀ J`.
    pub fn lorentz_inverse(&self) -> Self {
        Self(std::array::from_fn(|i| {
            std::array::from_fn(|j| self.0[j][i].clone() * S::from_i64(J3[i] * J3[j]))
        }))
    }

    /// Largest entry of `gᵀ J g - J`, relative to the squared entry size.
    pub fn lorentz_residual(&self) -> f64 {
        let mut worst = 0.0f64;
        let mut size = 1.0f64;
        for i in 0..3 {
            for j in 0..3 {
                let mut acc = S::zero();
                for k in 0..3 {
                    acc = acc + self.0[k][i].clone() * self.0[k][j].clone() * S::from_i64(J3[k]);
                }
                if i == j {
                    acc = acc - S::from_i64(J3[i]);
                }
                worst = worst.max(acc.to_f64().abs());
                size = size.max(self.0[i][j].to_f64().abs());
            }
        }
        if S::EXACT {
            worst
        } else {
            worst / (size * size)
        }
    }

    pub fn to_f64(&self) -> Mat3<f64> {
        Mat3(std::array::from_fn(|i| std::array::from_fn(|j| self.0[i][j].to_f64())))
    }
}

impl Mat3<f64> {
    /// Boost by rapidity `l` in the (v1, v3) plane.
    pub fn boost13(l: f64) -> Self {
        let (c, s) = (l.cosh(), l.sinh());
        Mat3([[c, 0.0, s], [0.0, 1.0, 0.0], [s, 0.0, c]])
    }

    /// Rotation by `a` in the spacelike (v1, v2) plane.
    pub fn rotation12(a: f64) -> Self {
        let (c, s) = (a.cos(), a.sin());
        Mat3([[c, -s, 0.0], [s, c, 0.0], [0.0, 0.0, 1.0]])
    }

    pub fn to_nalgebra(&self) -> Matrix3<f64> {
        Matrix3::from_fn(|i, j| self.0[i][j])
    }

    /// Hyperbolic means three distinct real eigenvalues.
    pub fn is_hyperbolic(&self) -> bool {
        let m = self.to_nalgebra();
        let ev = m.complex_eigenvalues();
        if ev.iter().any(|z| z.im.abs() > 1e-9 * (1.0 + z.re.abs())) {
            return false;
        }
        let mut re: Vec<f64> = ev.iter().map(|z| z.re).collect();
        re.sort_by(f64::total_cmp);
        re.windows(2).all(|w| (w[1] - w[0]).abs() > 1e-9 * (1.0 + w[1].abs()))
    }
}

/// A 5x5 matrix preserving the (3,2) form, rows first.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Iso32<S = f64> {
    pub m: [[S; 5]; 5],
}

impl<S: Scalar> Iso32<S> {
    pub fn identity() -> Self {
        Self::from_rows_unchecked(std::array::from_fn(|i| {
            std::array::from_fn(|j| if i == j { S::one() } else { S::zero() })
        }))
    }

    pub fn from_rows_unchecked(m: [[S; 5]; 5]) -> Self {
        Self { m }
    }

    /// Validates `mᵀJm = J` (exactly for rational scalars).
    pub fn from_rows(m: [[S; 5]; 5]) -> Result<Self> {
        let g = Self { m };
        let r = g.residual();
        if (S::EXACT && r != 0.0) || r > EPS_GROUP {
            return Err(GeomError::NotInGroup(r));
        }
        Ok(g)
    }

    /// `mᵀ J m - J` entrywise.
    pub fn gram_defect(&self) -> [[S; 5]; 5] {
        std::array::from_fn(|i| {
            std::array::from_fn(|j| {
                let mut acc = S::zero();
                for k in 0..5 {
                    acc = acc + self.m[k][i].clone() * self.m[k][j].clone() * S::from_i64(J5[k]);
                }
                if i == j {
                    acc - S::from_i64(J5[i])
                } else {
                    acc
                }
            })
        })
    }

    /// Largest entry of the Gram defect, relative to the squared entry size in floating mode.
    pub fn residual(&self) -> f64 {
        let worst = self
            .gram_defect()
            .iter()
            .flatten()
            .map(|x| x.to_f64().abs())
            .fold(0.0, f64::max);
        if S::EXACT {
            worst
        } else {
            let size = self.m.iter().flatten().map(|x| x.to_f64().abs()).fold(1.0, f64::max);
            worst / (size * size)
        }
    }

    pub fn is_exactly_in_group(&self) -> bool {
        self.gram_defect().iter().flatten().all(|x| x.is_zero())
    }

    pub fn apply_vec(&self, v: &Vec5<S>) -> Vec5<S> {
        Vec5(std::array::from_fn(|i| {
            (0..5).fold(S::zero(), |acc, j| acc + self.m[i][j].clone() * v.0[j].clone())
        }))
    }

    pub fn compose(&self, o: &Self) -> Self {
        Self {
            m: std::array::from_fn(|i| {
                std::array::from_fn(|j| {
                    (0..5).fold(S::zero(), |acc, k| acc + self.m[i][k].clone() * o.m[k][j].clone())
                })
            }),
        }
    }

    /// `J mᵀ J`, the inverse of any form-preserving matrix.
    pub fn inverse(&self) -> Self {
        Self {
            m: std::array::from_fn(|i| {
                std::array::from_fn(|j| self.m[j][i].clone() * S::from_i64(J5[i] * J5[j]))
            }),
        }
    }

    pub fn transpose(&self) -> Self {
        Self { m: std::array::from_fn(|i| std::array::from_fn(|j| self.m[j][i].clone())) }
    }

    pub fn pow(&self, n: i64) -> Self {
        let base = if n < 0 { self.inverse() } else { self.clone() };
        (0..n.unsigned_abs()).fold(Self::identity(), |acc, _| acc.compose(&base))
    }

    pub fn to_f64(&self) -> Iso32<f64> {
        Iso32 { m: std::array::from_fn(|i| std::array::from_fn(|j| self.m[i][j].to_f64())) }
    }
}

impl<S: Scalar> Mul for &Iso32<S> {
    type Output = Iso32<S>;
    fn mul(self, rhs: Self) -> Iso32<S> {
        self.compose(rhs)
    }
}

impl<S: Scalar> Mul for Iso32<S> {
    type Output = Iso32<S>;
    fn mul(self, rhs: Self) -> Iso32<S> {
        self.compose(&rhs)
    }
}

impl Iso32<f64> {
    pub fn to_nalgebra(&self) -> Matrix5<f64> {
        Matrix5::from_fn(|i, j| self.m[i][j])
    }

    pub fn from_nalgebra(m: &Matrix5<f64>) -> Self {
        Self { m: std::array::from_fn(|i| std::array::from_fn(|j| m[(i, j)])) }
    }

    pub fn max_abs_diff(&self, o: &Self) -> f64 {
        self.m.iter().flatten().zip(o.m.iter().flatten()).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max)
    }
}

/// Block lift: identity on coordinates 1 and 5, `g` on coordinates 2..4.
pub fn lift_linear<S: Scalar>(g: &Mat3<S>) -> Result<Iso32<S>> {
    let r = g.lorentz_residual();
    if (S::EXACT && r != 0.0) || r > EPS_GROUP {
        return Err(GeomError::NotLorentz(r));
    }
    let mut out = Iso32::identity();
    for i in 0..3 {
        for j in 0..3 {
            out.m[i + 1][j + 1] = g.0[i][j].clone();
        }
    }
    Ok(out)
}

/// The lift fixing `p∞` that acts on embedded points as translation by `v`.
pub fn lift_translation<S: Scalar>(v: &Vec3<S>) -> Iso32<S> {
    let q = form21(v, v);
    let hq = q * S::half();
    let [v1, v2, v3] = v.0.clone();
    let o = S::zero;
    let l = S::one;
    Iso32::from_rows_unchecked([
        [l() - hq.clone(), -v1.clone(), -v2.clone(), v3.clone(), -hq.clone()],
        [v1.clone(), l(), o(), o(), v1.clone()],
        [v2.clone(), o(), l(), o(), v2.clone()],
        [v3.clone(), o(), o(), l(), v3.clone()],
        [hq.clone(), v1, v2, -v3, l() + hq],
    ])
}

/// The involution negating the first homogeneous coordinate.
pub fn rho<S: Scalar>() -> Iso32<S> {
    let mut g = Iso32::identity();
    g.m[0][0] = -S::one();
    g
}

/// Reflection `v2 ↦ -v2` in R^{2,1}, lifted; it carries positively extended
/// crooked planes with vertex `o` and director `(1,0,0)` to negatively
/// extended ones.
pub fn reflect_first_spatial<S: Scalar>() -> Iso32<S> {
    let mut g = Iso32::identity();
    g.m[1][1] = -S::one();
    g
}

/// The rational matrix μ relating the positive and negative example surfaces.
pub fn mu_example() -> Iso32<Rational> {
    let r = rat;
    Iso32::from_rows_unchecked([
        [r(-5, 6), r(1, 1), r(-12, 1), r(12, 1), r(5, 6)],
        [r(0, 1), r(-2, 1), r(107, 12), r(-109, 12), r(0, 1)],
        [r(5, 9), r(5, 3), r(-20, 1), r(20, 1), r(13, 9)],
        [r(0, 1), r(-2, 1), r(179, 12), r(-181, 12), r(0, 1)],
        [r(1, 18), r(5, 3), r(-20, 1), r(20, 1), r(35, 18)],
    ])
}

/// Cartan projection: logarithms of the two leading singular values.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct CartanPair {
    pub lambda: f64,
    pub mu: f64,
}

impl CartanPair {
    pub fn delta(&self) -> f64 {
        self.lambda - self.mu
    }
}

/// Sorted singular values of `g`, largest first.
pub fn singular_values(g: &Iso32<f64>) -> [f64; 5] {
    let sv = g.to_nalgebra().singular_values();
    let mut s: [f64; 5] = std::array::from_fn(|i| sv[i]);
    s.sort_by(|a, b| b.total_cmp(a));
    s
}

pub fn cartan_projection(g: &Iso32<f64>) -> Result<CartanPair> {
    let r = g.residual();
    if r > EPS_GROUP {
        return Err(GeomError::NotInGroup(r));
    }
    let s = singular_values(g);
    // σ₁ ≥ σ₂ ≥ 1 for a form-preserving matrix; clamp rounding below zero
    Ok(CartanPair { lambda: s[0].ln().max(0.0), mu: s[1].ln().max(0.0) })
}

/// Second exterior power of a 5×5 matrix, on the basis `e_i ∧ e_j`, `i < j`.
fn compound2(m: &[[f64; 5]; 5]) -> DMatrix<f64> {
    let pairs: Vec<(usize, usize)> = (0..5).flat_map(|i| (i + 1..5).map(move |j| (i, j))).collect();
    DMatrix::from_fn(10, 10, |r, c| {
        let ((i, j), (k, l)) = (pairs[r], pairs[c]);
        m[i][k] * m[j][l] - m[i][l] * m[j][k]
    })
}

/// Running product `a^n` kept as a normalized matrix and a log scale.
struct ScaledPower {
    base: DMatrix<f64>,
    acc: DMatrix<f64>,
    log_scale: f64,
}

impl ScaledPower {
    fn new(base: DMatrix<f64>) -> Self {
        let n = base.nrows();
        Self { base, acc: DMatrix::identity(n, n), log_scale: 0.0 }
    }

    fn step(&mut self) -> f64 {
        self.acc = &self.acc * &self.base;
        let s = self.acc.amax();
        self.acc /= s;
        self.log_scale += s.ln();
        let top = self.acc.singular_values().max();
        self.log_scale + top.ln()
    }
}

/// Cartan projections of `g, g², …, g^count`.
///
/// The second value comes from the top singular value of the second exterior
/// power, so it stays accurate when `σ₂/σ₁` falls below machine precision.
pub fn cartan_powers(g: &Iso32<f64>, count: usize) -> Result<Vec<CartanPair>> {
    let r = g.residual();
    if r > EPS_GROUP {
        return Err(GeomError::NotInGroup(r));
    }
    let mut p1 = ScaledPower::new(DMatrix::from_fn(5, 5, |i, j| g.m[i][j]));
    let mut p2 = ScaledPower::new(compound2(&g.m));
    Ok((0..count)
        .map(|_| {
            let l1 = p1.step().max(0.0);
            let l12 = p2.step();
            CartanPair { lambda: l1, mu: (l12 - l1).max(0.0) }
        })
        .collect())
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum DistortionClass {
    Bounded,
    Balanced,
    Mixed,
    Undetermined,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct DistortionThresholds {
    pub t_div: f64,
    pub t_bound: f64,
    /// Fraction of the sequence, from the end, examined for stabilization.
    pub tail: f64,
}

impl Default for DistortionThresholds {
    fn default() -> Self {
        Self { t_div: 10.0, t_bound: 1.0, tail: 0.25 }
    }
}

fn spread(xs: impl Iterator<Item = f64> + Clone) -> f64 {
    let hi = xs.clone().fold(f64::NEG_INFINITY, f64::max);
    let lo = xs.fold(f64::INFINITY, f64::min);
    hi - lo
}

fn non_decreasing(xs: &[f64]) -> bool {
    xs.windows(2).all(|w| w[1] >= w[0] - 1e-12)
}

pub fn classify_distortion(seq: &[CartanPair], th: &DistortionThresholds) -> Result<DistortionClass> {
    let last = seq.last().ok_or(GeomError::EmptySequence)?;
    let k = ((seq.len() as f64 * th.tail).ceil() as usize).clamp(1, seq.len());
    let tail = &seq[seq.len() - k..];
    let mus = tail.iter().map(|c| c.mu);
    let deltas = tail.iter().map(|c| c.delta());

    if last.lambda > th.t_div && mus.clone().all(|m| m < th.t_bound) && spread(mus.clone()) < th.t_bound {
        return Ok(DistortionClass::Bounded);
    }
    if last.lambda > th.t_div && last.mu > th.t_div && spread(deltas.clone()) < th.t_bound {
        return Ok(DistortionClass::Balanced);
    }
    let lam: Vec<f64> = tail.iter().map(|c| c.lambda).collect();
    let mu: Vec<f64> = mus.collect();
    let del: Vec<f64> = deltas.collect();
    if last.lambda > th.t_div
        && last.mu > th.t_div
        && last.delta() > th.t_div
        && non_decreasing(&lam)
        && non_decreasing(&mu)
        && non_decreasing(&del)
    {
        return Ok(DistortionClass::Mixed);
    }
    Ok(DistortionClass::Undetermined)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn mu_is_exactly_form_preserving() {
        let mu = mu_example();
        assert!(mu.is_exactly_in_group());
        assert_eq!(mu.m[0][0], rat(-5, 6));
        let col1 = rat(25, 36) + rat(25, 81) - rat(1, 324);
        assert_eq!(col1, rat(1, 1));
    }

    #[test]
    fn translation_lift_properties() {
        let v = Vec3([0.3, -1.2, 0.7]);
        let w = Vec3([-0.5, 0.25, 2.0]);
        let t = lift_translation(&v);
        assert!(t.residual() < 1e-14);
        let tw = lift_translation(&w);
        let sum = lift_translation(&(&v + &w));
        assert!(t.compose(&tw).max_abs_diff(&sum) < 1e-12);
        assert!(t.inverse().max_abs_diff(&lift_translation(&(-&v))) < 1e-12);
        let pinf = Vec5([-1.0, 0.0, 0.0, 0.0, 1.0]);
        assert_eq!(t.apply_vec(&pinf), pinf);
        assert_eq!(lift_translation(&Vec3::<f64>::zero()), Iso32::identity());
    }

    #[test]
    fn rho_is_an_involution() {
        let r: Iso32<Rational> = rho();
        assert!(r.is_exactly_in_group());
        assert_eq!(r.compose(&r), Iso32::identity());
    }

    #[test]
    fn lift_linear_rejects_non_lorentz() {
        let g = Mat3([[2.0, 0.0, 0.0], [0.0, 1.0, 0.0], [0.0, 0.0, 1.0]]);
        assert!(matches!(lift_linear(&g), Err(GeomError::NotLorentz(_))));
        assert_eq!(lift_linear(&Mat3::<f64>::identity()).unwrap(), Iso32::identity());
    }

    #[test]
    fn cartan_examples() {
        assert_eq!(cartan_projection(&Iso32::identity()).unwrap(), CartanPair { lambda: 0.0, mu: 0.0 });
        let b = lift_linear(&Mat3::boost13(0.8)).unwrap();
        let c = cartan_projection(&b).unwrap();
        assert!((c.lambda - 0.8).abs() < 1e-12 && c.mu.abs() < 1e-12);
        let bad = Iso32::from_rows_unchecked(std::array::from_fn(|i| {
            std::array::from_fn(|j| if i == j { 2.0 } else { 0.0 })
        }));
        assert!(matches!(cartan_projection(&bad), Err(GeomError::NotInGroup(_))));
    }

    #[test]
    fn classifier_examples() {
        let th = DistortionThresholds::default();
        let seq = |f: &dyn Fn(f64) -> (f64, f64)| -> Vec<CartanPair> {
            (1..=40).map(|n| f(n as f64)).map(|(l, m)| CartanPair { lambda: l, mu: m }).collect()
        };
        assert_eq!(classify_distortion(&seq(&|n| (0.7 * n, 0.0)), &th), Ok(DistortionClass::Bounded));
        assert_eq!(classify_distortion(&seq(&|n| (2.0 * n, n)), &th), Ok(DistortionClass::Mixed));
        assert_eq!(classify_distortion(&seq(&|n| (2.0 * n, 2.0 * n - 3.0)), &th), Ok(DistortionClass::Balanced));
        assert_eq!(classify_distortion(&seq(&|_| (1.0, 0.5)), &th), Ok(DistortionClass::Undetermined));
        assert_eq!(classify_distortion(&[], &th), Err(GeomError::EmptySequence));
    }
}
