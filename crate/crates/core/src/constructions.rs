//! Disjoint pairs of crooked surfaces obtained by pulling apart at both
//! intersection points, cyclic crooked Schottky systems, ping-pong checks and
//! nested word images.

use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::affine::{allowable_pair, consistently_oriented, AllowablePair, CrookedHalfspace, CrookedPlane, Extension, Side};
use crate::certify::{round_distance, separation_margin, SeparationReport};
use crate::einstein::{param_rep, EinPoint};
use crate::error::{GeomError, Result};
use crate::forms::{Vec3, Vec5};
use crate::group::{cartan_powers, lift_linear, lift_translation, rho, CartanPair, Iso32, Mat3};
use crate::mesh::{round_angle, sample_surface};
use crate::scalar::{rat, Rational, Scalar};
use crate::surface::{compactify, CrookedSurface, Region, RegionTester};

/// Default side tolerance for probe classification.
pub const EPS_PROBE: f64 = 1e-9;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DisjointPairSpec<S = f64> {
    pub u1: Vec3<S>,
    pub u2: Vec3<S>,
    pub inner: AllowablePair<S>,
    pub outer: AllowablePair<S>,
}

impl<S: Scalar> DisjointPairSpec<S> {
    /// Zero pairs are accepted so the intermediate configurations can be
    /// built; any other pair must be allowable.
    pub fn new(u1: Vec3<S>, u2: Vec3<S>, inner: AllowablePair<S>, outer: AllowablePair<S>) -> Result<Self> {
        if !consistently_oriented(&u1, &u2)? {
            return Err(GeomError::NotConsistentlyOriented);
        }
        for p in [&inner, &outer] {
            if !p.is_zero() && !allowable_pair(&p.z1, &p.z2, &u1, &u2)? {
                return Err(GeomError::NotAllowable);
            }
        }
        Ok(Self { u1, u2, inner, outer })
    }

    pub fn with_pairs(&self, inner: AllowablePair<S>, outer: AllowablePair<S>) -> Result<Self> {
        Self::new(self.u1.clone(), self.u2.clone(), inner, outer)
    }

    fn parts(&self, i: usize) -> (&Vec3<S>, &Vec3<S>, &Vec3<S>) {
        if i == 0 {
            (&self.u1, &self.inner.z1, &self.outer.z1)
        } else {
            (&self.u2, &self.inner.z2, &self.outer.z2)
        }
    }
}

impl DisjointPairSpec<f64> {
    /// Directors `(1,0,0)` and `(-2,0,1)` with `z1 = (0,2,0)`, `z2 = (0,-√3,0)`
    /// used as both inner and outer pair.
    pub fn derived_example() -> Self {
        let pair = AllowablePair { z1: Vec3([0.0, 2.0, 0.0]), z2: Vec3([0.0, -(3f64).sqrt(), 0.0]) };
        Self::new(Vec3([1.0, 0.0, 0.0]), Vec3([-2.0, 0.0, 1.0]), pair.clone(), pair).expect("valid example")
    }
}

impl DisjointPairSpec<Rational> {
    /// Directors `(1,0,0)` and `(-5,0,3)` with `z1 = (0,2,0)`, `z2 = (0,-8/5,0)`;
    /// every null frame involved is rational.
    pub fn rational_example() -> Self {
        let pair = AllowablePair {
            z1: Vec3([rat(0, 1), rat(2, 1), rat(0, 1)]),
            z2: Vec3([rat(0, 1), rat(-8, 5), rat(0, 1)]),
        };
        let u1 = Vec3([rat(1, 1), rat(0, 1), rat(0, 1)]);
        let u2 = Vec3([rat(-5, 1), rat(0, 1), rat(3, 1)]);
        Self::new(u1, u2, pair.clone(), pair).expect("valid example")
    }
}

/// `ρ τ_z ρ`, the translation conjugated to fix `p0` instead of `p∞`.
pub fn outer_translation<S: Scalar>(z: &Vec3<S>) -> Iso32<S> {
    let r = rho::<S>();
    r.compose(&lift_translation(z)).compose(&r)
}

/// `τ = ρ τ_{z'} ρ τ_z`.
pub fn pull_apart_motion<S: Scalar>(inner: &Vec3<S>, outer: &Vec3<S>) -> Iso32<S> {
    outer_translation(outer).compose(&lift_translation(inner))
}

/// `S_i = ρ τ_{z_i'} ρ · conf(CP(o + z_i, u_i))`.
pub fn pull_apart<S: Scalar>(spec: &DisjointPairSpec<S>) -> Result<(CrookedSurface<S>, CrookedSurface<S>)> {
    let surf = |i: usize| -> Result<CrookedSurface<S>> {
        let (u, z, zo) = spec.parts(i);
        let cp = CrookedPlane::new(z.clone(), u.clone(), Extension::Positive)?;
        Ok(compactify(&cp).transformed(&outer_translation(zo)))
    };
    Ok((surf(0)?, surf(1)?))
}

/// The open regions `ρ τ_{z_i'} ρ · conf(H(o + z_i, u_i))` bounded by the
/// pulled-apart surfaces.
pub fn pull_apart_regions(spec: &DisjointPairSpec) -> Result<(Region, Region)> {
    let region = |i: usize| -> Result<Region> {
        let (u, z, zo) = spec.parts(i);
        Ok(Region::new(outer_translation(zo), CrookedHalfspace::new(z.clone(), u.clone())?))
    };
    Ok((region(0)?, region(1)?))
}

/// Generators `η_i` with regions `(U_i⁻, U_i⁺)` such that
/// `η_i(U_i⁻) = Ein³ ∖ cl U_i⁺`.
/// The four configurations of the pull-apart: no translation, inner only,
/// outer only, both.
pub const STAGES: [(bool, bool); 4] = [(false, false), (true, false), (false, true), (true, true)];

/// Named points expected on both surfaces at a stage: `p0` survives unless
/// the inner translation is applied, `p∞` unless the outer one is.
pub fn expected_shared(inner: bool, outer: bool) -> (bool, bool) {
    (!inner, !outer)
}

impl<S: Scalar> DisjointPairSpec<S> {
    pub fn stage(&self, inner: bool, outer: bool) -> Result<Self> {
        let pick = |on: bool, p: &AllowablePair<S>| if on { p.clone() } else { AllowablePair::zero() };
        self.with_pairs(pick(inner, &self.inner), pick(outer, &self.outer))
    }
}

fn stage_name(inner: bool, outer: bool) -> &'static str {
    match (inner, outer) {
        (false, false) => "untranslated",
        (true, false) => "inner",
        (false, true) => "outer",
        (true, true) => "both",
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PipelineStage {
    pub stage: String,
    pub p0_shared: bool,
    pub p_inf_shared: bool,
    pub matches_expected: bool,
    /// Sampled distance between the surfaces outside balls of `radius`
    /// around the shared named points.
    pub margin_elsewhere: f64,
    pub max_edge: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PipelineReport {
    pub stages: Vec<PipelineStage>,
    pub radius: f64,
    pub bookkeeping: bool,
    pub separation: SeparationReport,
}

/// Runs every stage of the pull-apart on floating inputs.
pub fn pull_apart_pipeline(spec: &DisjointPairSpec, resolution: usize, radius: f64, tol: f64) -> Result<PipelineReport> {
    let named = [crate::einstein::p0::<f64>(), crate::einstein::p_inf::<f64>()];
    let mut stages = Vec::new();
    let mut separation = None;
    for (inner, outer) in STAGES {
        let (s1, s2) = pull_apart(&spec.stage(inner, outer)?)?;
        let shared: Vec<bool> = named
            .iter()
            .map(|p| crate::surface::in_crooked_surface_tol(p, &s1, tol) && crate::surface::in_crooked_surface_tol(p, &s2, tol))
            .collect();
        let (e0, einf) = expected_shared(inner, outer);
        let centres: Vec<EinPoint> = named.iter().zip(&shared).filter(|(_, s)| **s).map(|(p, _)| p.clone()).collect();
        let (margin_elsewhere, max_edge) = crate::certify::margin_excluding(&s1, &s2, resolution, &centres, radius)?;
        if inner && outer {
            separation = Some(separation_margin(&s1, &s2, resolution)?);
        }
        stages.push(PipelineStage {
            stage: stage_name(inner, outer).to_string(),
            p0_shared: shared[0],
            p_inf_shared: shared[1],
            matches_expected: shared[0] == e0 && shared[1] == einf,
            margin_elsewhere,
            max_edge,
        });
    }
    let separation = separation.expect("final stage ran");
    let bookkeeping = stages.iter().all(|s| s.matches_expected && s.margin_elsewhere > 0.0) && separation.certified_disjoint;
    Ok(PipelineReport { stages, radius, bookkeeping, separation })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExactStage {
    pub stage: String,
    pub p0_shared: bool,
    pub p_inf_shared: bool,
    pub matches_expected: bool,
    /// No common point outside boxes of half-width `eps` around the shared
    /// named points.
    pub disjoint_elsewhere: bool,
    pub cases: usize,
}

/// Exact counterpart of [`pull_apart_pipeline`] for rational inputs.
pub fn pull_apart_pipeline_exact(spec: &DisjointPairSpec<Rational>, eps: &Rational) -> Result<Vec<ExactStage>> {
    let named = [crate::einstein::p0::<Rational>(), crate::einstein::p_inf::<Rational>()];
    STAGES
        .iter()
        .map(|&(inner, outer)| {
            let (s1, s2) = pull_apart(&spec.stage(inner, outer)?)?;
            let shared: Vec<bool> = named
                .iter()
                .map(|p| crate::surface::in_crooked_surface(p, &s1) && crate::surface::in_crooked_surface(p, &s2))
                .collect();
            let (e0, einf) = expected_shared(inner, outer);
            let centres: Vec<Vec5<Rational>> =
                named.iter().zip(&shared).filter(|(_, s)| **s).map(|(p, _)| p.rep().clone()).collect();
            let r = crate::exact::exact_intersection_excluding(&s1, &s2, &centres, eps)?;
            Ok(ExactStage {
                stage: stage_name(inner, outer).to_string(),
                p0_shared: shared[0],
                p_inf_shared: shared[1],
                matches_expected: shared[0] == e0 && shared[1] == einf,
                disjoint_elsewhere: r.disjoint,
                cases: r.cases,
            })
        })
        .collect()
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SchottkySystem {
    pub generators: Vec<Iso32>,
    pub regions: Vec<(Region, Region)>,
}

/// Letter `(generator, exponent)`.
pub type Letter = (usize, i8);

impl SchottkySystem {
    pub fn new(generators: Vec<Iso32>, regions: Vec<(Region, Region)>) -> Result<Self> {
        if generators.is_empty() || generators.len() != regions.len() {
            return Err(GeomError::Invalid(format!(
                "{} generators for {} region pairs",
                generators.len(),
                regions.len()
            )));
        }
        Ok(Self { generators, regions })
    }

    pub fn rank(&self) -> usize {
        self.generators.len()
    }

    pub fn letter_matrix(&self, (i, e): Letter) -> Iso32 {
        if e > 0 {
            self.generators[i].clone()
        } else {
            self.generators[i].inverse()
        }
    }

    /// The region that `η_i^e` maps everything outside its source into.
    pub fn target_region(&self, (i, e): Letter) -> &Region {
        if e > 0 {
            &self.regions[i].1
        } else {
            &self.regions[i].0
        }
    }

    pub fn word_matrix(&self, w: &ReducedWord) -> Iso32 {
        w.letters.iter().fold(Iso32::identity(), |acc, &l| acc.compose(&self.letter_matrix(l)))
    }

    /// All 2n boundary surfaces, `U_1⁻, U_1⁺, U_2⁻, ...`.
    pub fn boundaries(&self) -> Vec<CrookedSurface> {
        self.regions.iter().flat_map(|(a, b)| [a.boundary(), b.boundary()]).collect()
    }

    /// Pairwise separation of all boundary surfaces.
    pub fn certify(&self, resolution: usize) -> Result<Vec<SeparationReport>> {
        let b = self.boundaries();
        let mut out = Vec::new();
        for i in 0..b.len() {
            for j in i + 1..b.len() {
                out.push(separation_margin(&b[i], &b[j], resolution)?);
            }
        }
        Ok(out)
    }

    fn testers(&self) -> Result<Vec<(RegionTester, RegionTester)>> {
        self.regions.iter().map(|(a, b)| Ok((a.tester()?, b.tester()?))).collect()
    }
}

/// `g u1` must be a positive multiple of `-u2`.
fn check_paired(g: &Mat3, u1: &Vec3, u2: &Vec3) -> Result<()> {
    let img = g.apply(u1);
    let target = -u2;
    let scale = img.norm() * target.norm();
    let aligned = img.cross(&target).norm() <= 1e-9 * scale && img.dot(&target) > 0.0;
    if aligned {
        Ok(())
    } else {
        Err(GeomError::NotPaired)
    }
}

/// One-generator system `η = τ2 · g · τ1⁻¹` with `τ_i = ρ τ_{z_i'} ρ τ_{z_i}`.
pub fn cyclic_schottky(g: &Mat3, spec: &DisjointPairSpec) -> Result<SchottkySystem> {
    if !g.is_hyperbolic() {
        return Err(GeomError::NotHyperbolic);
    }
    let lg = lift_linear(g)?;
    check_paired(g, &spec.u1, &spec.u2)?;
    let spec = spec.with_pairs(spec.inner.clone(), spec.outer.clone())?;
    let t1 = pull_apart_motion(&spec.inner.z1, &spec.outer.z1);
    let t2 = pull_apart_motion(&spec.inner.z2, &spec.outer.z2);
    let eta = t2.compose(&lg).compose(&t1.inverse());
    let (lower, upper) = pull_apart_regions(&spec)?;
    SchottkySystem::new(vec![eta], vec![(lower, upper)])
}

/// Rapidity of the boost in the (v1, v3) plane that takes `(1,0,0)` to a
/// positive multiple of `-(−2,0,1)`.
pub fn derived_boost_rapidity() -> f64 {
    -(0.5f64).atanh()
}

/// The cyclic example built on [`DisjointPairSpec::derived_example`].
pub fn derived_cyclic_example() -> Result<SchottkySystem> {
    cyclic_schottky(&Mat3::boost13(derived_boost_rapidity()), &DisjointPairSpec::derived_example())
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct ReducedWord {
    pub letters: Vec<Letter>,
}

impl ReducedWord {
    pub fn identity() -> Self {
        Self { letters: vec![] }
    }

    pub fn new(letters: Vec<Letter>) -> Result<Self> {
        for &(_, e) in &letters {
            if e != 1 && e != -1 {
                return Err(GeomError::Invalid(format!("exponent {e}")));
            }
        }
        if letters.windows(2).any(|w| w[0].0 == w[1].0 && w[0].1 == -w[1].1) {
            return Err(GeomError::Invalid("word is not reduced".into()));
        }
        Ok(Self { letters })
    }

    pub fn len(&self) -> usize {
        self.letters.len()
    }

    pub fn is_empty(&self) -> bool {
        self.letters.is_empty()
    }

    pub fn last(&self) -> Option<Letter> {
        self.letters.last().copied()
    }

    pub fn prefix(&self) -> Self {
        Self { letters: self.letters[..self.letters.len().saturating_sub(1)].to_vec() }
    }

    pub fn inverse(&self) -> Self {
        Self { letters: self.letters.iter().rev().map(|&(i, e)| (i, -e)).collect() }
    }

    /// All reduced words of length exactly `len` in `rank` generators.
    pub fn enumerate(rank: usize, len: usize) -> Vec<Self> {
        let mut words = vec![Self::identity()];
        for _ in 0..len {
            words = words
                .into_iter()
                .flat_map(|w| {
                    let last = w.last();
                    (0..rank)
                        .flat_map(|i| [(i, 1i8), (i, -1i8)])
                        .filter(move |&(i, e)| last != Some((i, -e)))
                        .map(move |l| {
                            let mut v = w.letters.clone();
                            v.push(l);
                            Self { letters: v }
                        })
                })
                .collect();
        }
        words
    }
}

impl fmt::Display for ReducedWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s: Vec<String> = self
            .letters
            .iter()
            .map(|&(i, e)| {
                let c = char::from(b'a' + i as u8);
                if e > 0 { c.to_string() } else { c.to_ascii_uppercase().to_string() }
            })
            .collect();
        f.write_str(&s.join(" "))
    }
}

impl FromStr for ReducedWord {
    type Err = GeomError;

    /// Lower case letters are generators, upper case their inverses.
    fn from_str(s: &str) -> Result<Self> {
        let letters = s
            .chars()
            .filter(|c| !c.is_whitespace())
            .map(|c| match c {
                'a'..='z' => Ok((c as usize - 'a' as usize, 1)),
                'A'..='Z' => Ok((c as usize - 'A' as usize, -1)),
                _ => Err(GeomError::Invalid(format!("bad letter {c:?}"))),
            })
            .collect::<Result<Vec<_>>>()?;
        Self::new(letters)
    }
}

/// Cell-centred probes of `param_chart` on an `m × 2m × m` grid over one
/// sheet `t ∈ [0, π)`.
pub fn probe_grid(budget: usize) -> Vec<Vec5> {
    if budget == 0 {
        return vec![];
    }
    let m = ((budget as f64 / 2.0).cbrt().ceil() as usize).max(1);
    let h = PI / m as f64;
    let mut out = Vec::with_capacity(2 * m * m * m);
    for k in 0..m {
        for i in 0..m {
            for j in 0..2 * m {
                let c = |a: usize| (a as f64 + 0.5) * h;
                out.push(param_rep(c(i), c(j), c(k)).normalized());
            }
        }
    }
    out
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Violation {
    pub generator: usize,
    pub probe: String,
    pub source_side: Side,
    pub image_side: Side,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PingPongReport {
    pub probes: usize,
    pub checks: usize,
    pub consistent_fraction: f64,
    pub violations: Vec<Violation>,
}

/// Checks `q ∈ U_i⁻ ⟺ η_i(q) ∉ cl U_i⁺` on a probe grid.
pub fn pingpong_check(sys: &SchottkySystem, probes: usize) -> Result<PingPongReport> {
    pingpong_check_points(sys, &probe_grid(probes), EPS_PROBE)
}

pub fn pingpong_check_points(sys: &SchottkySystem, probes: &[Vec5], tol: f64) -> Result<PingPongReport> {
    let testers = sys.testers()?;
    let mut violations = Vec::new();
    for (gi, (lower, upper)) in testers.iter().enumerate() {
        let eta = &sys.generators[gi];
        let found: Vec<Violation> = probes
            .par_iter()
            .filter_map(|q| {
                let a = lower.side(q, tol);
                let b = upper.side(&eta.apply_vec(q), tol);
                let ok = (a == Side::Inside) == (b == Side::Outside);
                (!ok).then(|| Violation {
                    generator: gi,
                    probe: EinPoint::from_rep_unchecked(q.clone()).colon_string(),
                    source_side: a,
                    image_side: b,
                })
            })
            .collect();
        violations.extend(found);
    }
    let checks = probes.len() * sys.rank();
    let consistent_fraction = if checks == 0 { 1.0 } else { 1.0 - violations.len() as f64 / checks as f64 };
    Ok(PingPongReport { probes: probes.len(), checks, consistent_fraction, violations })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct WordImage {
    pub word: String,
    pub length: usize,
    pub motion: Iso32,
    pub region: Region,
    /// Round diameter of the image, including its boundary photons.
    pub diameter: f64,
    /// Round diameter of the images of a fixed vertex sample of the boundary.
    pub sample_diameter: f64,
    /// Fraction of probes inside the region.
    pub volume_fraction: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct WordImageReport {
    pub images: Vec<WordImage>,
    /// Per length `1..=depth`: largest diameter among that length's images.
    pub max_diameter: Vec<f64>,
    pub max_sample_diameter: Vec<f64>,
    /// Per length `1..=depth`: largest volume fraction.
    pub max_volume: Vec<f64>,
    /// Every image lies inside its parent on the probe grid.
    pub nested: bool,
}

fn sampled_diameter(s: &CrookedSurface, n: usize) -> Result<f64> {
    let mesh = sample_surface(s, n)?;
    let v = &mesh.vertices;
    Ok((0..v.len())
        .into_par_iter()
        .map(|i| v[i + 1..].iter().map(|q| round_distance(&v[i], q)).fold(0.0, f64::max))
        .reduce(|| 0.0, f64::max))
}

/// Diameter of points spread evenly along each photon, so it does not
/// depend on how a motion has distorted any parametrization.
fn photon_diameter(s: &CrookedSurface) -> Result<f64> {
    let sc = s.scaffolding()?;
    let mut d = 0.0f64;
    for ph in [&sc.phi_inf, &sc.psi_inf, &sc.phi_p, &sc.psi_p] {
        let a = ph.a.rep().normalized();
        let b = ph.b.rep();
        let b = (b - &a.scale(&a.dot(b))).normalized();
        let pts: Vec<Vec5> = (0..64)
            .map(|k| {
                let t = PI * k as f64 / 64.0;
                &a.scale(&t.cos()) + &b.scale(&t.sin())
            })
            .collect();
        for (i, p) in pts.iter().enumerate() {
            for q in &pts[i + 1..] {
                d = d.max(round_angle(p, q));
            }
        }
    }
    Ok(d)
}

/// Images `w'(U_{last(w)})` of the regions under word prefixes, for reduced
/// words of length `1..=depth`.
pub fn word_images(sys: &SchottkySystem, depth: usize, probes: usize, mesh_resolution: usize) -> Result<WordImageReport> {
    let depth = depth.max(1);
    let grid = probe_grid(probes);
    let mut images = Vec::new();
    let mut max_diameter = Vec::new();
    let mut max_sample_diameter = Vec::new();
    let mut max_volume = Vec::new();
    let mut inside_sets: Vec<std::collections::HashMap<ReducedWord, Vec<bool>>> = Vec::new();
    let mut nested = true;
    for len in 1..=depth {
        let mut level = std::collections::HashMap::new();
        let (mut dmax, mut smax, mut vmax) = (0.0f64, 0.0f64, 0.0f64);
        for w in ReducedWord::enumerate(sys.rank(), len) {
            let last = w.last().expect("nonempty");
            let prefix = w.prefix();
            let motion = sys.word_matrix(&prefix);
            let region = sys.target_region(last).transformed(&motion);
            let tester = region.tester()?;
            let inside: Vec<bool> = grid.par_iter().map(|q| tester.side(q, EPS_PROBE) == Side::Inside).collect();
            let volume_fraction =
                if grid.is_empty() { 0.0 } else { inside.iter().filter(|b| **b).count() as f64 / grid.len() as f64 };
            if len > 1 {
                let parent = &inside_sets[len - 2][&prefix];
                nested &= inside.iter().zip(parent).all(|(c, p)| !*c || *p);
            }
            let boundary = region.boundary();
            let sample_diameter = sampled_diameter(&boundary, mesh_resolution)?;
            let diameter = sample_diameter.max(photon_diameter(&boundary)?);
            dmax = dmax.max(diameter);
            smax = smax.max(sample_diameter);
            vmax = vmax.max(volume_fraction);
            images.push(WordImage {
                word: w.to_string(),
                length: len,
                motion,
                region,
                diameter,
                sample_diameter,
                volume_fraction,
            });
            level.insert(w, inside);
        }
        inside_sets.push(level);
        max_diameter.push(dmax);
        max_sample_diameter.push(smax);
        max_volume.push(vmax);
    }
    Ok(WordImageReport { images, max_diameter, max_sample_diameter, max_volume, nested })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FundamentalDomainReport {
    pub probes: usize,
    pub f_volume_fraction: f64,
    /// Per depth `0..=depth`: fraction of probes in some `w(F)` with `|w| ≤ depth`.
    pub translate_cover_fraction: Vec<f64>,
}

/// `F` is the complement of the union of all `cl U_i^±`.
pub fn fundamental_domain_report(sys: &SchottkySystem, probes: usize, depth: usize) -> Result<FundamentalDomainReport> {
    let grid = probe_grid(probes);
    let testers = sys.testers()?;
    let in_f = |y: &Vec5| {
        testers
            .iter()
            .all(|(a, b)| a.side(y, EPS_PROBE) == Side::Outside && b.side(y, EPS_PROBE) == Side::Outside)
    };
    let mut covered = vec![false; grid.len()];
    let mut fractions = Vec::new();
    let frac = |c: &[bool]| if c.is_empty() { 0.0 } else { c.iter().filter(|b| **b).count() as f64 / c.len() as f64 };
    let mut f_volume_fraction = 0.0;
    for len in 0..=depth {
        for w in ReducedWord::enumerate(sys.rank(), len) {
            let inv = sys.word_matrix(&w.inverse());
            let hit: Vec<bool> = grid.par_iter().map(|q| in_f(&inv.apply_vec(q))).collect();
            for (c, h) in covered.iter_mut().zip(hit) {
                *c |= h;
            }
        }
        if len == 0 {
            f_volume_fraction = frac(&covered);
        }
        fractions.push(frac(&covered));
    }
    Ok(FundamentalDomainReport { probes: grid.len(), f_volume_fraction, translate_cover_fraction: fractions })
}

/// `cartan_projection(η^n)` for `n = 1..=count`.
pub fn cartan_sequence(g: &Iso32, count: usize) -> Result<Vec<CartanPair>> {
    cartan_powers(g, count)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::einstein::{p0, p_inf};
    use crate::surface::in_crooked_surface;

    #[test]
    fn word_strings_round_trip() {
        let w: ReducedWord = "a B a".parse().unwrap();
        assert_eq!(w.letters, vec![(0, 1), (1, -1), (0, 1)]);
        assert_eq!(w.to_string(), "a B a");
        assert!("a A".parse::<ReducedWord>().is_err());
        assert_eq!(w.inverse().to_string(), "A b A");
    }

    #[test]
    fn enumeration_counts() {
        for len in 0..5 {
            assert_eq!(ReducedWord::enumerate(1, len).len(), if len == 0 { 1 } else { 2 });
            let expect = if len == 0 { 1 } else { 4 * 3usize.pow(len as u32 - 1) };
            assert_eq!(ReducedWord::enumerate(2, len).len(), expect);
        }
    }

    #[test]
    fn spec_validation() {
        let d = DisjointPairSpec::derived_example();
        let bad = AllowablePair { z1: Vec3([1.0, 0.0, 0.0]), z2: Vec3::zero() };
        assert_eq!(d.with_pairs(bad, AllowablePair::zero()), Err(GeomError::NotAllowable));
        assert_eq!(
            DisjointPairSpec::new(d.u1.clone(), d.u1.clone(), AllowablePair::zero(), AllowablePair::zero()),
            Err(GeomError::NotConsistentlyOriented)
        );
    }

    #[test]
    fn zero_pairs_share_both_points() {
        let d = DisjointPairSpec::derived_example();
        let z = d.with_pairs(AllowablePair::zero(), AllowablePair::zero()).unwrap();
        let (s1, s2) = pull_apart(&z).unwrap();
        for p in [p0(), p_inf()] {
            assert!(in_crooked_surface(&p, &s1) && in_crooked_surface(&p, &s2));
        }
        let inner = d.with_pairs(d.inner.clone(), AllowablePair::zero()).unwrap();
        let (s1, s2) = pull_apart(&inner).unwrap();
        assert!(in_crooked_surface(&p_inf(), &s1) && in_crooked_surface(&p_inf(), &s2));
        assert!(!in_crooked_surface(&p0(), &s1));
        let outer = d.with_pairs(AllowablePair::zero(), d.outer.clone()).unwrap();
        let (s1, s2) = pull_apart(&outer).unwrap();
        assert!(in_crooked_surface(&p0(), &s1) && in_crooked_surface(&p0(), &s2));
        assert!(!in_crooked_surface(&p_inf(), &s1));
    }

    #[test]
    fn cyclic_generator_pairs_boundaries() {
        let sys = derived_cyclic_example().unwrap();
        let eta = &sys.generators[0];
        assert!(eta.residual() < 1e-10);
        let (lo, hi) = &sys.regions[0];
        let mesh = sample_surface(&lo.boundary(), 8).unwrap();
        let img = mesh.transformed(eta);
        assert!(img.off_surface(&hi.boundary()).unwrap().is_empty());
    }

    #[test]
    fn cyclic_rejects_bad_input() {
        let d = DisjointPairSpec::derived_example();
        assert_eq!(cyclic_schottky(&Mat3::rotation12(0.3), &d), Err(GeomError::NotHyperbolic));
        assert_eq!(cyclic_schottky(&Mat3::boost13(1.0), &d), Err(GeomError::NotPaired));
    }

    #[test]
    fn empty_probe_set_is_vacuous() {
        let sys = derived_cyclic_example().unwrap();
        let r = pingpong_check(&sys, 0).unwrap();
        assert_eq!((r.probes, r.consistent_fraction), (0, 1.0));
        assert!(r.violations.is_empty());
    }
}
