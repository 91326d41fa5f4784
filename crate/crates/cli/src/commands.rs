use std::f64::consts::PI;
use std::io::Write;
use std::path::Path;

use anyhow::{bail, Context, Result};
use serde_json::{json, Value};

use crooked_core::affine::EPS_PRED;
use crooked_core::certify::spacelike_circle_check;
use crooked_core::constructions::{
    cartan_sequence, derived_boost_rapidity, fundamental_domain_report, outer_translation, pingpong_check_points,
    probe_grid, pull_apart_pipeline, pull_apart_pipeline_exact, EPS_PROBE,
};
use crooked_core::einstein::{incident, lightcone_intersection};
use crooked_core::export::{mesh_to_json, mesh_to_obj};
use crooked_core::group::{mu_example, DistortionThresholds};
use crooked_core::mesh::{lightcone_mesh, mesh_topology_check};
use crooked_core::{
    classify_distortion, cyclic_schottky, exact_intersection, rat, sample_surface, separation_margin, word_images,
    CrookedSurface, DisjointPairSpec, Extension, Iso32, Mat3, PartLabel, Rational, ReducedWord, SchottkySystem,
    SurfaceMesh,
};

use crate::config::{parse_point, parse_triple, spec_to_f64, Config, ENV_EPS_PRED, ENV_EPS_PROBE};
use crate::{Cli, Command, PairArgs};

pub fn run(cli: &Cli) -> Result<bool> {
    let mut cfg = Config::load(cli.config.as_deref())?;
    let (ok, report) = match &cli.command {
        Command::BasicExample { resolution, out } => basic_example(&cfg, *resolution, out.as_deref())?,
        Command::Lightcone { point, resolution, out } => lightcone(&cfg, point, *resolution, out.as_deref())?,
        Command::TwoCones { p, q, resolution, out } => two_cones(&cfg, p, q, *resolution, out.as_deref())?,
        Command::DisjointPair { pair, resolution, radius, exact, out } => {
            apply_pair(&mut cfg, pair);
            disjoint_pair(&cfg, *resolution, *radius, *exact, out.as_deref())?
        }
        Command::Schottky { pair, rapidity, probes, depth, mesh_resolution, certify, resolution } => {
            apply_pair(&mut cfg, pair);
            let sys = schottky_system(&cfg, *rapidity)?;
            schottky(&cfg, &sys, *probes, *depth, *mesh_resolution, certify.then_some(*resolution))?
        }
        Command::Cartan { pair, rapidity, word, count } => {
            apply_pair(&mut cfg, pair);
            let sys = schottky_system(&cfg, *rapidity)?;
            cartan(&sys, word, *count)?
        }
        Command::Certify { s1, s2, resolution, exact } => certify(&cfg, s1, s2, *resolution, *exact)?,
        Command::NegativeExample { certify, resolution } => negative_example(&cfg, *certify, *resolution)?,
        Command::ExportMesh { surface, resolution, out } => export_mesh(&cfg, surface, *resolution, out)?,
    };
    let text = if cli.json { serde_json::to_string_pretty(&report)? + "\n" } else { text_report(&report) };
    if let Err(e) = std::io::stdout().lock().write_all(text.as_bytes()) {
        if e.kind() != std::io::ErrorKind::BrokenPipe {
            return Err(e.into());
        }
    }
    Ok(ok)
}

fn text_report(report: &Value) -> String {
    let mut out = String::new();
    if let Value::Object(map) = report {
        for (k, v) in map {
            let v = match v {
                Value::String(s) => s.clone(),
                Value::Array(_) | Value::Object(_) => serde_json::to_string(v).unwrap_or_default(),
                _ => v.to_string(),
            };
            out.push_str(&format!("{k}: {v}\n"));
        }
    }
    out
}

fn apply_pair(cfg: &mut Config, p: &PairArgs) {
    cfg.set("u1", p.u1.as_ref());
    cfg.set("u2", p.u2.as_ref());
    cfg.set("z1", p.z1.as_ref());
    cfg.set("z2", p.z2.as_ref());
    cfg.set("outer_z1", p.outer_z1.as_ref());
    cfg.set("outer_z2", p.outer_z2.as_ref());
}

fn write_mesh(mesh: &SurfaceMesh, out: Option<&Path>) -> Result<Value> {
    let Some(out) = out else { return Ok(Value::Null) };
    let text = if out.extension().is_some_and(|e| e == "json") { mesh_to_json(mesh) } else { mesh_to_obj(mesh) };
    std::fs::write(out, text).with_context(|| format!("writing {}", out.display()))?;
    Ok(json!(out.display().to_string()))
}

fn mesh_summary(mesh: &SurfaceMesh) -> Value {
    json!({ "vertices": mesh.vertices.len(), "faces": mesh.faces.len() })
}

fn basic_example(cfg: &Config, resolution: Option<usize>, out: Option<&Path>) -> Result<(bool, Value)> {
    let n = cfg.usize_or(resolution, "resolution", 64)?;
    let mesh = sample_surface(&CrookedSurface::basic(Extension::Positive), n)?;
    let topo = mesh_topology_check(&mesh.faces)?;
    let out = write_mesh(&mesh, out)?;
    Ok((
        true,
        json!({
            "command": "basic-example",
            "resolution": n,
            "mesh": mesh_summary(&mesh),
            "euler": topo.euler,
            "orientable": topo.orientable,
            "out": out,
        }),
    ))
}

fn lightcone(cfg: &Config, point: &str, resolution: Option<usize>, out: Option<&Path>) -> Result<(bool, Value)> {
    let n = cfg.usize_or(resolution, "resolution", 64)?;
    let p = parse_point(point)?;
    let mesh = lightcone_mesh(&p, n)?;
    let out = write_mesh(&mesh, out)?;
    Ok((
        true,
        json!({
            "command": "lightcone",
            "point": p.colon_string(),
            "resolution": n,
            "mesh": mesh_summary(&mesh),
            "out": out,
        }),
    ))
}

fn two_cones(cfg: &Config, p: &str, q: &str, resolution: Option<usize>, out: Option<&Path>) -> Result<(bool, Value)> {
    let n = cfg.usize_or(resolution, "resolution", 64)?;
    let (p, q) = (parse_point(p)?, parse_point(q)?);
    let a = lightcone_mesh(&p, n)?;
    let b = lightcone_mesh(&q, n)?;
    let offset = a.vertices.len();
    let mut mesh = a;
    mesh.vertices.extend(b.vertices);
    mesh.faces.extend(b.faces.iter().map(|f| f.map(|v| v + offset)));
    mesh.labels.extend(b.labels);
    let meets_in_circle = !incident(&p, &q)?;
    let mut spacelike = Value::Null;
    if meets_in_circle {
        let c = lightcone_intersection(&p, &q)?;
        mesh.scaffold.push((0..=4 * n).map(|k| c.point(2.0 * PI * k as f64 / (4 * n) as f64)).collect());
        spacelike = json!(spacelike_circle_check(&p, &q, 4 * n)?);
    }
    let out = write_mesh(&mesh, out)?;
    Ok((
        true,
        json!({
            "command": "two-cones",
            "p": p.colon_string(),
            "q": q.colon_string(),
            "resolution": n,
            "mesh": mesh_summary(&mesh),
            "intersection_is_circle": meets_in_circle,
            "circle_spacelike": spacelike,
            "out": out,
        }),
    ))
}

fn float_spec(cfg: &Config) -> Result<(DisjointPairSpec, Option<DisjointPairSpec<Rational>>)> {
    match cfg.pair_spec()? {
        Some(r) => Ok((spec_to_f64(&r)?, Some(r))),
        None => Ok((DisjointPairSpec::derived_example(), None)),
    }
}

fn disjoint_pair(
    cfg: &Config,
    resolution: Option<usize>,
    radius: Option<f64>,
    exact: bool,
    out: Option<&Path>,
) -> Result<(bool, Value)> {
    let n = cfg.usize_or(resolution, "resolution", 64)?;
    let radius = cfg.f64_or(radius, "radius", 0.2)?;
    let tol = cfg.tolerance("eps_pred", ENV_EPS_PRED, EPS_PRED)?;
    let (spec, rational) = float_spec(cfg)?;
    let report = pull_apart_pipeline(&spec, n, radius, tol)?;
    let mut ok = report.bookkeeping;
    let mut exact_report = Value::Null;
    if exact {
        let Some(r) = rational else { bail!("--exact needs rational u1, u2, z1 and z2") };
        let stages = pull_apart_pipeline_exact(&r, &rat(1, 1_000_000))?;
        ok &= stages.iter().all(|s| s.matches_expected && s.disjoint_elsewhere);
        exact_report = serde_json::to_value(stages)?;
    }
    let mut out_value = Value::Null;
    if out.is_some() {
        let (s1, s2) = crooked_core::pull_apart(&spec)?;
        let m1 = sample_surface(&s1, n)?;
        let m2 = sample_surface(&s2, n)?;
        let offset = m1.vertices.len();
        let mut mesh = m1;
        mesh.vertices.extend(m2.vertices);
        mesh.faces.extend(m2.faces.iter().map(|f| f.map(|v| v + offset)));
        mesh.labels.extend(m2.labels);
        mesh.scaffold.extend(m2.scaffold);
        out_value = write_mesh(&mesh, out)?;
    }
    Ok((
        ok,
        json!({
            "command": "disjoint-pair",
            "spec": spec,
            "resolution": n,
            "radius": radius,
            "bookkeeping": report.bookkeeping,
            "stages": report.stages,
            "separation": report.separation,
            "exact": exact_report,
            "out": out_value,
        }),
    ))
}

fn schottky_system(cfg: &Config, rapidity: Option<f64>) -> Result<SchottkySystem> {
    let (spec, _) = float_spec(cfg)?;
    let l = cfg.f64_or(rapidity, "rapidity", derived_boost_rapidity())?;
    Ok(cyclic_schottky(&Mat3::boost13(l), &spec)?)
}

fn schottky(
    cfg: &Config,
    sys: &SchottkySystem,
    probes: Option<usize>,
    depth: Option<usize>,
    mesh_resolution: Option<usize>,
    certify: Option<Option<usize>>,
) -> Result<(bool, Value)> {
    let probes = cfg.usize_or(probes, "probes", 10_000)?;
    let depth = cfg.usize_or(depth, "depth", 8)?;
    let mesh_res = cfg.usize_or(mesh_resolution, "mesh_resolution", 8)?;
    let tol = cfg.tolerance("eps_probe", ENV_EPS_PROBE, EPS_PROBE)?;
    let pp = pingpong_check_points(sys, &probe_grid(probes), tol)?;
    let words = word_images(sys, depth, probes.min(4000), mesh_res)?;
    let fd = fundamental_domain_report(sys, probes.min(4000), depth.min(6))?;
    let mut ok = pp.violations.is_empty() && words.nested;
    let mut separation = Value::Null;
    if let Some(res) = certify {
        let n = cfg.usize_or(res, "resolution", 32)?;
        let reports = sys.certify(n)?;
        ok &= reports.iter().all(|r| r.certified_disjoint);
        separation = serde_json::to_value(reports)?;
    }
    let images: Vec<Value> = words
        .images
        .iter()
        .map(|w| {
            json!({
                "word": w.word,
                "length": w.length,
                "diameter": w.diameter,
                "sample_diameter": w.sample_diameter,
                "volume_fraction": w.volume_fraction,
            })
        })
        .collect();
    Ok((
        ok,
        json!({
            "command": "schottky",
            "generator": sys.generators[0].m,
            "pingpong": {
                "probes": pp.probes,
                "checks": pp.checks,
                "consistent_fraction": pp.consistent_fraction,
                "violations": pp.violations.iter().take(100).collect::<Vec<_>>(),
            },
            "word_images": {
                "depth": depth,
                "max_diameter": words.max_diameter,
                "max_sample_diameter": words.max_sample_diameter,
                "max_volume": words.max_volume,
                "nested": words.nested,
                "images": images,
            },
            "fundamental_domain": fd,
            "separation": separation,
        }),
    ))
}

fn cartan(sys: &SchottkySystem, word: &str, count: usize) -> Result<(bool, Value)> {
    let w: ReducedWord = word.parse()?;
    if w.is_empty() {
        bail!("empty word");
    }
    if w.letters.iter().any(|(i, _)| *i >= sys.rank()) {
        bail!("word uses a letter beyond rank {}", sys.rank());
    }
    let g = sys.word_matrix(&w);
    let seq = cartan_sequence(&g, count)?;
    let th = DistortionThresholds::default();
    let class = classify_distortion(&seq, &th)?;
    Ok((
        true,
        json!({
            "command": "cartan",
            "word": w.to_string(),
            "count": count,
            "thresholds": th,
            "sequence": seq,
            "class": class,
        }),
    ))
}

/// `vertex=a,b,c;director=a,b,c;extension=positive|negative;outer=a,b,c`;
/// omitted keys default to the basic surface.
fn parse_surface(s: &str) -> Result<CrookedSurface<Rational>> {
    let zero = || crooked_core::forms::Vec3([rat(0, 1), rat(0, 1), rat(0, 1)]);
    let mut vertex = zero();
    let mut director = crooked_core::forms::Vec3([rat(1, 1), rat(0, 1), rat(0, 1)]);
    let mut outer = zero();
    let mut ext = Extension::Positive;
    for part in s.split(';').map(str::trim).filter(|p| !p.is_empty()) {
        let Some((k, v)) = part.split_once('=') else { bail!("expected key=value in {part}") };
        match k.trim() {
            "vertex" => vertex = parse_triple(v)?,
            "director" => director = parse_triple(v)?,
            "outer" => outer = parse_triple(v)?,
            "extension" => {
                ext = match v.trim() {
                    "positive" | "+" => Extension::Positive,
                    "negative" | "-" => Extension::Negative,
                    other => bail!("unknown extension {other}"),
                }
            }
            other => bail!("unknown surface key {other}"),
        }
    }
    Ok(CrookedSurface::new(outer_translation(&outer), vertex, director, ext)?)
}

fn surface_to_f64(s: &CrookedSurface<Rational>) -> Result<CrookedSurface> {
    Ok(CrookedSurface::new(s.motion.to_f64(), s.vertex.to_f64(), s.director.to_f64(), s.extension)?)
}

fn certify(cfg: &Config, s1: &str, s2: &str, resolution: Option<usize>, exact: bool) -> Result<(bool, Value)> {
    let n = cfg.usize_or(resolution, "resolution", 64)?;
    let (r1, r2) = (parse_surface(s1)?, parse_surface(s2)?);
    let rep = separation_margin(&surface_to_f64(&r1)?, &surface_to_f64(&r2)?, n)?;
    let mut ok = rep.certified_disjoint;
    let mut exact_report = Value::Null;
    if exact {
        let e = exact_intersection(&r1, &r2)?;
        ok &= e.disjoint;
        exact_report = serde_json::to_value(e)?;
    }
    Ok((ok, json!({ "command": "certify", "separation": rep, "exact": exact_report })))
}

fn negative_example(cfg: &Config, certify: bool, resolution: Option<usize>) -> Result<(bool, Value)> {
    let mu = mu_example();
    let s1 = CrookedSurface::<Rational>::basic(Extension::Positive);
    let s2 = CrookedSurface::<Rational>::basic(Extension::Negative).transformed(&mu);
    let e = exact_intersection(&s1, &s2)?;
    let mut ok = e.disjoint;
    let mut separation = Value::Null;
    if certify {
        let n = cfg.usize_or(resolution, "resolution", 64)?;
        let mu_f: Iso32 = mu.to_f64();
        let rep = separation_margin(
            &CrookedSurface::basic(Extension::Positive),
            &CrookedSurface::basic(Extension::Negative).transformed(&mu_f),
            n,
        )?;
        ok &= rep.certified_disjoint;
        separation = serde_json::to_value(rep)?;
    }
    Ok((
        ok,
        json!({
            "command": "negative-example",
            "mu": crooked_core::export::matrix_json(&mu).parse::<Value>()?,
            "exact": e,
            "separation": separation,
        }),
    ))
}

fn export_mesh(cfg: &Config, surface: &str, resolution: Option<usize>, out: &Path) -> Result<(bool, Value)> {
    let n = cfg.usize_or(resolution, "resolution", 64)?;
    let s = surface_to_f64(&parse_surface(surface)?)?;
    let mesh = sample_surface(&s, n)?;
    let off = mesh.off_surface(&s)?.len();
    let out = write_mesh(&mesh, Some(out))?;
    let parts: Vec<Value> = [PartLabel::Stem, PartLabel::WingPlus, PartLabel::WingMinus]
        .iter()
        .map(|l| json!({ "label": l.name(), "faces": mesh.labels.iter().filter(|x| *x == l).count() }))
        .collect();
    Ok((
        off == 0,
        json!({
            "command": "export-mesh",
            "resolution": n,
            "mesh": mesh_summary(&mesh),
            "parts": parts,
            "off_surface": off,
            "out": out,
        }),
    ))
}
