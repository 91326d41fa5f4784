use crooked_core::constructions::{pull_apart, pull_apart_pipeline_exact, DisjointPairSpec};
use crooked_core::einstein::p0;
use crooked_core::exact::exact_intersection_excluding;
use crooked_core::{rat, Rational};

#[test]
fn every_stage_meets_only_at_its_named_points() {
    let stages = pull_apart_pipeline_exact(&DisjointPairSpec::<Rational>::rational_example(), &rat(1, 1000)).unwrap();
    assert_eq!(stages.len(), 4);
    for s in &stages {
        assert!(s.matches_expected, "{s:?}");
        assert!(s.disjoint_elsewhere, "{s:?}");
    }
    assert!(stages[0].p0_shared && stages[0].p_inf_shared);
    assert!(!stages[3].p0_shared && !stages[3].p_inf_shared);
}

#[test]
fn excluding_one_point_still_sees_the_other() {
    let spec = DisjointPairSpec::<Rational>::rational_example().stage(false, false).unwrap();
    let (s1, s2) = pull_apart(&spec).unwrap();
    let r = exact_intersection_excluding(&s1, &s2, &[p0::<Rational>().rep().clone()], &rat(1, 1000)).unwrap();
    assert!(!r.disjoint);
}
