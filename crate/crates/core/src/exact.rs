//! Finite case analysis deciding whether two crooked surfaces meet.
//!
//! Each piece of a crooked surface is cut out of the lightcone by one linear
//! equation and two linear inequalities of a common weak sign. For a pair of
//! pieces, a sign choice and an affine chart the linear conditions define a
//! compact polytope `P`, and the surfaces meet there iff the quadratic form
//! vanishes somewhere on `P`. Since `P` is connected this happens iff
//! `min q ≤ 0 ≤ max q`, and both extrema sit at critical points of `q` on
//! relatively open faces, which are enumerated explicitly.

use std::cmp::Ordering;

use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::forms::{form32, Vec5};
use crate::mesh::PartLabel;
use crate::scalar::Scalar;
use crate::surface::CrookedSurface;

const PIECES: [PartLabel; 3] = [PartLabel::Stem, PartLabel::WingPlus, PartLabel::WingMinus];

/// Relative tolerance used on the floating path.
pub const EPS_EXACT_F64: f64 = 1e-11;

/// A piece pair whose polytope carries a null vector.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PieceHit {
    pub piece_a: PartLabel,
    pub piece_b: PartLabel,
    pub chart: usize,
    pub q_min: f64,
    pub q_max: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExactReport {
    pub disjoint: bool,
    pub exact: bool,
    pub cases: usize,
    pub empty_cases: usize,
    pub candidates: usize,
    pub hits: Vec<PieceHit>,
}

/// `a·y ≥ c`.
#[derive(Clone, Debug)]
struct Ineq<S> {
    a: Vec5<S>,
    c: S,
}

/// Affine solution set `y0 + span(basis)` of a linear system.
struct AffineSpace<S> {
    y0: Vec5<S>,
    basis: Vec<Vec5<S>>,
}

fn pivot_better<S: Scalar>(cand: &S, best: &S) -> bool {
    if S::EXACT {
        best.is_zero() && !cand.is_zero()
    } else {
        cand.abs() > best.abs()
    }
}

/// Reduced row echelon form of an augmented `rows × (n+1)` matrix; returns
/// the pivot columns, or `None` when the system is inconsistent.
fn rref<S: Scalar>(m: &mut [Vec<S>], n: usize, tol: f64) -> Option<Vec<usize>> {
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..n {
        if r == m.len() {
            break;
        }
        let mut best = r;
        for i in r + 1..m.len() {
            if pivot_better(&m[i][c], &m[best][c]) {
                best = i;
            }
        }
        if m[best][c].is_zero_tol(tol) {
            continue;
        }
        m.swap(r, best);
        let p = m[r][c].clone();
        for x in m[r].iter_mut() {
            *x = x.clone() / p.clone();
        }
        for i in 0..m.len() {
            if i != r && !m[i][c].is_zero() {
                let f = m[i][c].clone();
                for j in 0..=n {
                    let v = m[r][j].clone() * f.clone();
                    m[i][j] = m[i][j].clone() - v;
                }
            }
        }
        pivots.push(c);
        r += 1;
    }
    if m[r..].iter().any(|row| !row[n].is_zero_tol(tol)) {
        return None;
    }
    Some(pivots)
}

fn solve_affine<S: Scalar>(rows: &[(Vec5<S>, S)], tol: f64) -> Option<(AffineSpace<S>, usize)> {
    let mut m: Vec<Vec<S>> = rows
        .iter()
        .map(|(a, b)| a.0.iter().cloned().chain(std::iter::once(b.clone())).collect())
        .collect();
    let pivots = rref(&mut m, 5, tol)?;
    let mut y0 = Vec5::zero();
    for (r, &c) in pivots.iter().enumerate() {
        y0.0[c] = m[r][5].clone();
    }
    let free: Vec<usize> = (0..5).filter(|c| !pivots.contains(c)).collect();
    let basis = free
        .iter()
        .map(|&f| {
            let mut v = Vec5::zero();
            v.0[f] = S::one();
            for (r, &c) in pivots.iter().enumerate() {
                v.0[c] = -m[r][f].clone();
            }
            v
        })
        .collect();
    Some((AffineSpace { y0, basis }, pivots.len()))
}

/// Critical point of `q` on the affine space, if the restricted Hessian is
/// nonsingular.
fn critical_point<S: Scalar>(sp: &AffineSpace<S>, tol: f64) -> Option<Vec5<S>> {
    let k = sp.basis.len();
    if k == 0 {
        return Some(sp.y0.clone());
    }
    let mut m: Vec<Vec<S>> = (0..k)
        .map(|i| {
            let mut row: Vec<S> = (0..k).map(|j| form32(&sp.basis[i], &sp.basis[j])).collect();
            row.push(-form32(&sp.basis[i], &sp.y0));
            row
        })
        .collect();
    let pivots = rref(&mut m, k, tol)?;
    if pivots.len() < k {
        return None;
    }
    let mut y = sp.y0.clone();
    for (i, b) in sp.basis.iter().enumerate() {
        y = &y + &b.scale(&m[i][k]);
    }
    Some(y)
}

fn subsets(n: usize, max: usize) -> Vec<Vec<usize>> {
    let mut out = vec![vec![]];
    let mut frontier = vec![vec![]];
    for _ in 0..max {
        let mut next = Vec::new();
        for s in &frontier {
            let start = s.last().map_or(0, |&l: &usize| l + 1);
            for i in start..n {
                let mut t = s.clone();
                t.push(i);
                next.push(t);
            }
        }
        out.extend(next.iter().cloned());
        frontier = next;
    }
    out
}

/// Range of `q` over the polytope `{eqs, ineqs}`; `None` when it is empty.
fn q_range<S: Scalar>(eqs: &[(Vec5<S>, S)], ineqs: &[Ineq<S>], tol: f64) -> (Option<(S, S)>, usize) {
    let Some((_, eq_rank)) = solve_affine(eqs, tol) else { return (None, 0) };
    let dim = 5 - eq_rank;
    let mut range: Option<(S, S)> = None;
    let mut count = 0;
    for active in subsets(ineqs.len(), dim) {
        let mut rows = eqs.to_vec();
        rows.extend(active.iter().map(|&i| (ineqs[i].a.clone(), ineqs[i].c.clone())));
        let Some((sp, rank)) = solve_affine(&rows, tol) else { continue };
        if rank != eq_rank + active.len() {
            continue;
        }
        let Some(y) = critical_point(&sp, tol) else { continue };
        let feasible = ineqs.iter().all(|h| {
            let slack = h.a.dot(&y) - h.c.clone();
            slack.sign_tol(tol) != Ordering::Less
        });
        if !feasible {
            continue;
        }
        count += 1;
        let q = form32(&y, &y);
        range = Some(match range {
            None => (q.clone(), q),
            Some((lo, hi)) => (
                if q < lo { q.clone() } else { lo },
                if q > hi { q } else { hi },
            ),
        });
    }
    (range, count)
}

fn chart_constraints<S: Scalar>(chart: usize) -> ((Vec5<S>, S), [Ineq<S>; 2]) {
    let (fixed, free) = if chart == 0 { (4, 3) } else { (3, 4) };
    let one = S::one();
    let b = |i: usize, c: S| Vec5::<S>::basis(i).scale(&c);
    (
        (b(fixed, one.clone()), one.clone()),
        [Ineq { a: b(free, one.clone()), c: -one.clone() }, Ineq { a: b(free, -one.clone()), c: -one }],
    )
}

/// Decides whether two crooked surfaces meet, exactly when `S` is exact.
pub fn exact_intersection<S: Scalar>(a: &CrookedSurface<S>, b: &CrookedSurface<S>) -> Result<ExactReport> {
    exact_intersection_excluding(a, b, &[], &S::one())
}

/// Halfspaces whose union is the complement of the open box of half-width
/// `eps` around `p` in the coordinates `y1..y3` of a chart.
fn box_complement<S: Scalar>(p: &Vec5<S>, fixed: usize, eps: &S) -> Option<Vec<Ineq<S>>> {
    if p[fixed].is_zero() {
        return None;
    }
    let p = p.scale(&(S::one() / p[fixed].clone()));
    let mut out = Vec::new();
    for i in 0..3 {
        let e = Vec5::<S>::basis(i);
        out.push(Ineq { a: e.clone(), c: p[i].clone() + eps.clone() });
        out.push(Ineq { a: -e, c: -p[i].clone() + eps.clone() });
    }
    Some(out)
}

/// As [`exact_intersection`], ignoring intersections inside small chart boxes
/// around the given points.
pub fn exact_intersection_excluding<S: Scalar>(
    a: &CrookedSurface<S>,
    b: &CrookedSurface<S>,
    points: &[Vec5<S>],
    eps: &S,
) -> Result<ExactReport> {
    let fa = a.ambient_piece_forms()?;
    let fb = b.ambient_piece_forms()?;
    let tol = if S::EXACT { 0.0 } else { EPS_EXACT_F64 };
    let mut report = ExactReport {
        disjoint: true,
        exact: S::EXACT,
        cases: 0,
        empty_cases: 0,
        candidates: 0,
        hits: Vec::new(),
    };
    let signs = [S::one(), -S::one()];
    let bound = S::two();
    for chart in 0..2 {
        let fixed = if chart == 0 { 4 } else { 3 };
        let mut extras: Vec<Vec<Ineq<S>>> = vec![vec![]];
        for p in points {
            let Some(halves) = box_complement(p, fixed, eps) else { continue };
            extras = extras
                .iter()
                .flat_map(|prev| {
                    halves.iter().map(move |h| {
                        let mut v = prev.clone();
                        v.push(h.clone());
                        v
                    })
                })
                .collect();
        }
        for (ia, pa) in fa.iter().enumerate() {
            for (ib, pb) in fb.iter().enumerate() {
                for sa in &signs {
                    for sb in &signs {
                        let (chart_eq, chart_ineq) = chart_constraints::<S>(chart);
                        let scale = |l: &Vec5<S>, s: &S| (l.scale(s), S::zero());
                        let eqs = vec![(pa[0].clone(), S::zero()), (pb[0].clone(), S::zero()), chart_eq];
                        let mut ineqs: Vec<Ineq<S>> = [scale(&pa[1], sa), scale(&pa[2], sa), scale(&pb[1], sb), scale(&pb[2], sb)]
                            .into_iter()
                            .map(|(a, c)| Ineq { a, c })
                            .collect();
                        ineqs.extend(chart_ineq);
                        for i in 0..3 {
                            let e = Vec5::<S>::basis(i);
                            ineqs.push(Ineq { a: e.clone(), c: -bound.clone() });
                            ineqs.push(Ineq { a: -e, c: -bound.clone() });
                        }
                        for extra in &extras {
                            report.cases += 1;
                            let mut all = ineqs.clone();
                            all.extend(extra.iter().cloned());
                            let (range, count) = q_range(&eqs, &all, tol);
                            report.candidates += count;
                            let Some((lo, hi)) = range else {
                                report.empty_cases += 1;
                                continue;
                            };
                            if lo.sign_tol(tol) != Ordering::Greater && hi.sign_tol(tol) != Ordering::Less {
                                report.disjoint = false;
                                report.hits.push(PieceHit {
                                    piece_a: PIECES[ia],
                                    piece_b: PIECES[ib],
                                    chart,
                                    q_min: lo.to_f64(),
                                    q_max: hi.to_f64(),
                                });
                            }
                        }
                    }
                }
            }
        }
    }
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::affine::Extension;
    use crate::forms::Vec3;
    use crate::group::{lift_translation, mu_example, rho};
    use crate::scalar::{rat, Rational};

    #[test]
    fn rref_solves_and_detects_inconsistency() {
        let rows = vec![
            (Vec5([1.0, 1.0, 0.0, 0.0, 0.0]), 2.0),
            (Vec5([1.0, -1.0, 0.0, 0.0, 0.0]), 0.0),
        ];
        let (sp, rank) = solve_affine(&rows, 1e-12).unwrap();
        assert_eq!(rank, 2);
        assert_eq!(sp.basis.len(), 3);
        assert!((sp.y0[0] - 1.0).abs() < 1e-12 && (sp.y0[1] - 1.0).abs() < 1e-12);
        let bad = vec![(Vec5([1.0, 0.0, 0.0, 0.0, 0.0]), 1.0), (Vec5([2.0, 0.0, 0.0, 0.0, 0.0]), 1.0)];
        assert!(solve_affine(&bad, 1e-12).is_none());
    }

    #[test]
    fn surface_meets_itself() {
        let s = CrookedSurface::<Rational>::basic(Extension::Positive);
        let r = exact_intersection(&s, &s).unwrap();
        assert!(!r.disjoint);
    }

    #[test]
    fn rho_image_shares_two_points() {
        let s = CrookedSurface::<Rational>::basic(Extension::Positive);
        let v = Vec3([rat(1, 1), rat(0, 1), rat(0, 1)]);
        let t = s.transformed(&lift_translation(&v));
        assert!(!exact_intersection(&s, &t).unwrap().disjoint);
        let r = s.transformed(&rho());
        assert!(!exact_intersection(&s, &r).unwrap().disjoint);
    }

    #[test]
    fn negative_example_is_disjoint() {
        let s1 = CrookedSurface::<Rational>::basic(Extension::Positive);
        let s2 = CrookedSurface::<Rational>::basic(Extension::Negative).transformed(&mu_example());
        let r = exact_intersection(&s1, &s2).unwrap();
        assert!(r.disjoint, "{:?}", r.hits);
        assert!(r.candidates > 0);
    }
}
