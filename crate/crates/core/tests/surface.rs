mod common;

use crooked_core::affine::{CrookedHalfspace, Extension, Side};
use crooked_core::certify::{component_count, spacelike_circle_check};
use crooked_core::einstein::{embed, incident, lightcone_intersection, p0, p_inf, EinPoint};
use crooked_core::group::{lift_translation, rho, Iso32};
use crooked_core::mesh::{lightcone_mesh, mesh_topology_check, sample_surface};
use crooked_core::surface::{in_crooked_surface, CrookedSurface, Region};
use rand::Rng;

fn random_surface(r: &mut rand_chacha::ChaCha8Rng) -> CrookedSurface {
    let u = common::random_spacelike(r);
    let v = crooked_core::Vec3([r.gen_range(-2.0..2.0), r.gen_range(-2.0..2.0), r.gen_range(-2.0..2.0)]);
    let ext = if r.gen_bool(0.5) { Extension::Positive } else { Extension::Negative };
    let mut g = common::random_compact(r);
    if r.gen_bool(0.3) {
        g = g.compose(&rho());
    }
    CrookedSurface::new(g, v, u, ext).unwrap()
}

#[test]
fn sampled_vertices_lie_on_placed_surfaces() {
    let mut r = common::rng(11);
    for _ in 0..12 {
        let s = random_surface(&mut r);
        let mesh = sample_surface(&s, 8).unwrap();
        assert!(mesh.off_surface(&s).unwrap().is_empty());
        s.torus_data().unwrap().validate().unwrap();
        let t = mesh_topology_check(&mesh.faces).unwrap();
        assert_eq!(t.euler, 0);
        assert!(!t.orientable);
    }
}

#[test]
fn membership_is_equivariant() {
    let mut r = common::rng(12);
    for _ in 0..8 {
        let s = random_surface(&mut r);
        let g = common::random_compact(&mut r).compose(&lift_translation(&common::random_spacelike(&mut r)));
        let moved = s.transformed(&g);
        for q in sample_surface(&s, 6).unwrap().vertices {
            assert!(in_crooked_surface(&q.transform(&g), &moved));
        }
        let far = embed(&crooked_core::Vec3([5.0, -7.0, 3.0])).transform(&s.motion);
        assert_eq!(in_crooked_surface(&far, &s), in_crooked_surface(&far.transform(&g), &moved));
    }
}

#[test]
fn one_surface_splits_into_two_regions_in_any_round_position() {
    let basic = CrookedSurface::basic(Extension::Positive);
    assert_eq!(component_count(&[basic.clone()], 16).unwrap().count, 2);
    let mut r = common::rng(13);
    for _ in 0..2 {
        let k = common::random_compact(&mut r);
        assert_eq!(component_count(&[basic.transformed(&k)], 16).unwrap().count, 2);
    }
}

#[test]
fn no_lightcone_lies_on_one_side() {
    let region = Region::new(Iso32::identity(), CrookedHalfspace::new(crooked_core::Vec3([0.0; 3]), crooked_core::Vec3([1.0, 0.0, 0.0])).unwrap());
    let tester = region.tester().unwrap();
    let mut r = common::rng(14);
    let mut points: Vec<EinPoint> = vec![p0(), p_inf()];
    for _ in 0..30 {
        points.push(EinPoint::new(common::random_null(&mut r)).unwrap());
    }
    for p in points {
        let mesh = lightcone_mesh(&p, 24).unwrap();
        let sides: Vec<Side> = mesh.vertices.iter().map(|q| tester.side(q.rep(), 1e-9)).collect();
        assert!(sides.contains(&Side::Inside), "{}", p.colon_string());
        assert!(sides.contains(&Side::Outside), "{}", p.colon_string());
    }
}

#[test]
fn lightcones_of_unlinked_points_meet_in_spacelike_circles() {
    let mut r = common::rng(15);
    let mut checked = 0;
    while checked < 40 {
        let (p, q) = (EinPoint::new(common::random_null(&mut r)).unwrap(), EinPoint::new(common::random_null(&mut r)).unwrap());
        if incident(&p, &q).unwrap() || p.same_as(&q, 1e-3) {
            continue;
        }
        let c = lightcone_intersection(&p, &q).unwrap();
        for k in 0..16 {
            let y = c.point(k as f64 * 0.4);
            assert!(incident(&y, &p).unwrap() && incident(&y, &q).unwrap());
        }
        assert!(spacelike_circle_check(&p, &q, 64).unwrap());
        checked += 1;
    }
}
