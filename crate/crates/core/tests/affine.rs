mod common;

use crooked_core::affine::{
    affine_disjointness_certificate, allowable_pair, consistently_oriented, halfspace_side, in_halfspace,
    point_plane_distance, sample_crooked_plane, CrookedHalfspace, Extension, Side, EPS_PRED,
};
use crooked_core::forms::{null_frame, Vec3};
use proptest::prelude::*;
use rand::Rng;

fn v3() -> impl Strategy<Value = Vec3> {
    prop::array::uniform3(-3.0..3.0f64).prop_map(Vec3)
}

fn spacelike() -> impl Strategy<Value = Vec3> {
    v3().prop_filter("spacelike", |v| v[0] * v[0] + v[1] * v[1] - v[2] * v[2] > 0.1)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn stem_quadrant_interior_is_inside(p in v3(), u in spacelike(), a in 0.01..5.0f64, b in 0.01..5.0f64) {
        let f = null_frame(&u).unwrap();
        let q = &(&p + &f.x_minus.scale(&a)) - &f.x_plus.scale(&b);
        for ext in [Extension::Positive, Extension::Negative] {
            let hs = CrookedHalfspace::with_extension(p.clone(), u.clone(), ext).unwrap();
            prop_assert!(in_halfspace(&q, &hs).unwrap());
        }
    }

    #[test]
    fn plane_and_two_halfspaces_partition_space(p in v3(), u in spacelike(), q in v3()) {
        let hs = CrookedHalfspace::new(p.clone(), u.clone()).unwrap();
        let side = halfspace_side(&q, &hs, EPS_PRED).unwrap();
        let other = halfspace_side(&q, &hs.opposite(), EPS_PRED).unwrap();
        match side {
            Side::Boundary => prop_assert_eq!(other, Side::Boundary),
            Side::Inside => prop_assert_eq!(other, Side::Outside),
            Side::Outside => prop_assert_eq!(other, Side::Inside),
        }
    }

    #[test]
    fn halfspace_is_a_cone_at_its_vertex(p in v3(), u in spacelike(), q in v3(), t in 0.05..20.0f64) {
        let hs = CrookedHalfspace::new(p.clone(), u.clone()).unwrap();
        let scaled = &p + &(&q - &p).scale(&t);
        prop_assert_eq!(
            halfspace_side(&q, &hs, EPS_PRED).unwrap(),
            halfspace_side(&scaled, &hs, EPS_PRED).unwrap()
        );
    }

    #[test]
    fn translation_equivariance(p in v3(), u in spacelike(), q in v3(), z in v3()) {
        let hs = CrookedHalfspace::new(p.clone(), u.clone()).unwrap();
        let moved = CrookedHalfspace::new(&p + &z, u.clone()).unwrap();
        prop_assert_eq!(halfspace_side(&q, &hs, EPS_PRED).unwrap(), halfspace_side(&(&q + &z), &moved, EPS_PRED).unwrap());
    }

    #[test]
    fn consistent_orientation_is_symmetric(a in spacelike(), b in spacelike()) {
        prop_assert_eq!(consistently_oriented(&a, &b).unwrap(), consistently_oriented(&b, &a).unwrap());
    }
}

#[test]
fn closed_form_matches_region_growing() {
    let mut r = common::rng(11);
    let (h, radius) = (0.05, 1.0);
    let mut compared = 0;
    for k in 0..5 {
        let u = common::random_spacelike(&mut r);
        let ext = if k % 2 == 0 { Extension::Positive } else { Extension::Negative };
        let p = Vec3([r.gen_range(-1.0..1.0), r.gen_range(-1.0..1.0), r.gen_range(-1.0..1.0)]);
        let hs = CrookedHalfspace::with_extension(p.clone(), u, ext).unwrap();
        let oracle = common::GrowOracle::new(&hs, radius, h, 0.6 * h);
        while compared < 400 * (k + 1) {
            let d = Vec3([r.gen_range(-0.9..0.9), r.gen_range(-0.9..0.9), r.gen_range(-0.9..0.9)]);
            if d.norm() > 0.9 {
                continue;
            }
            let q = &p + &d;
            if point_plane_distance(&q, &hs.boundary()).unwrap() < 2.0 * h {
                continue;
            }
            let Some(inside) = oracle.classify(&q) else { continue };
            assert_eq!(inside, in_halfspace(&q, &hs).unwrap(), "director {:?} point {:?}", hs.director, q);
            compared += 1;
        }
    }
}

#[test]
fn random_allowable_pairs_are_certified() {
    let mut r = common::rng(5);
    let o = Vec3([0.0, 0.0, 0.0]);
    for _ in 0..8 {
        let (u1, u2) = common::random_consistent_pair(&mut r);
        let pair = common::random_allowable(&mut r, &u1, &u2);
        assert!(allowable_pair(&pair.z1, &pair.z2, &u1, &u2).unwrap());
        let h1 = CrookedHalfspace::new(pair.z1.clone(), u1.clone()).unwrap();
        let h2 = CrookedHalfspace::new(pair.z2.clone(), u2.clone()).unwrap();
        let c = affine_disjointness_certificate(&h1, &h2, &o, 12).unwrap();
        assert!(c.contained_in_halfspace && c.min_separation > 0.0, "{c:?}");
        // the exact distance is a lower bound for any sampled distance
        let pts = sample_crooked_plane(&h1.boundary(), 12).unwrap();
        let sampled = pts
            .iter()
            .filter(|q| q.is_finite())
            .map(|q| point_plane_distance(q, &h2.boundary()).unwrap())
            .fold(f64::INFINITY, f64::min);
        assert!(c.min_separation <= sampled + 1e-9, "{} > {}", c.min_separation, sampled);
    }
}
