//! Interior membership for polyhedral cones in R^3 with few generators.

use crate::forms::Vec3;
use crate::scalar::Scalar;

fn rank3<S: Scalar>(gens: &[Vec3<S>]) -> usize {
    let n = gens.len();
    for i in 0..n {
        for j in i + 1..n {
            for k in j + 1..n {
                if !gens[i].dot(&gens[j].cross(&gens[k])).is_zero_tol(1e-12) {
                    return 3;
                }
            }
        }
    }
    for i in 0..n {
        for j in i + 1..n {
            if gens[i].cross(&gens[j]).max_abs() > 1e-12 {
                return 2;
            }
        }
    }
    usize::from(gens.iter().any(|g| g.max_abs() > 0.0))
}

/// Outward-agnostic normals of the facets: every `n` with `n·g ≥ 0` for all
/// generators and `n ⟂` two of them.
pub fn facet_normals<S: Scalar>(gens: &[Vec3<S>], tol: f64) -> Vec<Vec3<S>> {
    let mut out = Vec::new();
    for i in 0..gens.len() {
        for j in i + 1..gens.len() {
            let n = gens[i].cross(&gens[j]);
            if n.max_abs() <= tol {
                continue;
            }
            let signs: Vec<_> = gens.iter().map(|g| n.dot(g).sign_tol(tol * n.max_abs() * g.max_abs())).collect();
            use std::cmp::Ordering::*;
            if signs.iter().all(|s| *s != Less) {
                out.push(n);
            } else if signs.iter().all(|s| *s != Greater) {
                out.push(-n);
            }
        }
    }
    out
}

/// `v` lies in the open interior of the cone spanned by `gens`.
pub fn in_cone_interior<S: Scalar>(gens: &[Vec3<S>], v: &Vec3<S>, tol: f64) -> bool {
    if rank3(gens) < 3 {
        return false;
    }
    facet_normals(gens, tol)
        .iter()
        .all(|n| n.dot(v).is_pos_tol(tol * n.max_abs() * v.max_abs()))
}

/// Largest `t` such that `v = Σ λ_i g_i` with every `λ_i ≥ t`, for three or
/// four generators spanning R^3; `v` is interior iff the value is positive.
pub fn interior_depth(gens: &[Vec3<f64>], v: &Vec3<f64>) -> Option<f64> {
    use nalgebra::{Matrix3, Vector3};
    if !(3..=4).contains(&gens.len()) {
        return None;
    }
    let m = Matrix3::from_columns(&[0, 1, 2].map(|i| Vector3::from(gens[i].0)));
    let inv = m.try_inverse()?;
    let lam0 = inv * Vector3::from(v.0);
    if gens.len() == 3 {
        return Some(lam0.min());
    }
    // λ(s) = λ0 + s·k, k the kernel direction with k₄ = 1
    let k3 = -(inv * Vector3::from(gens[3].0));
    let lam = [(lam0[0], k3[0]), (lam0[1], k3[1]), (lam0[2], k3[2]), (0.0, 1.0)];
    // maximise the concave piecewise-linear min over the breakpoints
    let eval = |s: f64| lam.iter().map(|(a, b)| a + b * s).fold(f64::INFINITY, f64::min);
    let mut best = f64::NEG_INFINITY;
    for i in 0..4 {
        for j in i + 1..4 {
            let (a1, b1) = lam[i];
            let (a2, b2) = lam[j];
            if (b1 - b2).abs() > 1e-15 {
                best = best.max(eval((a2 - a1) / (b1 - b2)));
            }
        }
    }
    let unbounded = lam.iter().all(|(_, b)| *b > 0.0) || lam.iter().all(|(_, b)| *b < 0.0);
    Some(if unbounded { f64::INFINITY } else { best })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn orthant_interior() {
        let gens = [Vec3([1.0, 0.0, 0.0]), Vec3([0.0, 1.0, 0.0]), Vec3([0.0, 0.0, 1.0])];
        assert!(in_cone_interior(&gens, &Vec3([1.0, 2.0, 3.0]), 1e-12));
        assert!(!in_cone_interior(&gens, &Vec3([1.0, 0.0, 3.0]), 1e-12));
        assert!(!in_cone_interior(&gens, &Vec3::zero(), 1e-12));
        assert!(interior_depth(&gens, &Vec3([1.0, 2.0, 3.0])).unwrap() > 0.0);
    }

    #[test]
    fn flat_cone_has_no_interior() {
        let gens = [Vec3([1.0, 0.0, 0.0]), Vec3([0.0, 1.0, 0.0])];
        assert!(!in_cone_interior(&gens, &Vec3([1.0, 1.0, 0.0]), 1e-12));
    }

    #[test]
    fn four_generators_agree_with_depth() {
        let gens = [
            Vec3([1.0, 0.0, 1.0]),
            Vec3([0.0, 1.0, 1.0]),
            Vec3([-1.0, 0.0, 1.0]),
            Vec3([0.0, -1.0, 1.0]),
        ];
        for v in [Vec3([0.1, 0.2, 1.0]), Vec3([2.0, 0.0, 1.0]), Vec3([0.5, 0.5, 1.0])] {
            let d = interior_depth(&gens, &v).unwrap();
            assert_eq!(in_cone_interior(&gens, &v, 1e-12), d > 1e-12, "{v:?} {d}");
        }
    }
}
