//! OBJ and JSON writers with fixed formatting, so identical inputs give
//! byte-identical files.

use std::f64::consts::PI;
use std::fmt::Write;

use crate::einstein::{cylinder_coords, CylinderPoint, EinPoint};
use crate::group::Iso32;
use crate::mesh::{PartLabel, SurfaceMesh};
use crate::scalar::Rational;

/// 17 significant digits in scientific notation; valid as a JSON number.
pub fn fmt_f64(x: f64) -> String {
    let x = if x == 0.0 { 0.0 } else { x };
    format!("{x:.16e}")
}

/// Exact text form of a scalar: JSON number text for floats, a quoted
/// `"p/q"` string for rationals.
pub trait ExactJson {
    fn exact_json(&self) -> String;
}

impl ExactJson for f64 {
    fn exact_json(&self) -> String {
        fmt_f64(*self)
    }
}

impl ExactJson for Rational {
    fn exact_json(&self) -> String {
        format!("\"{self}\"")
    }
}

/// Row-major nested array.
pub fn matrix_json<S: ExactJson>(g: &Iso32<S>) -> String {
    let rows: Vec<String> =
        g.m.iter().map(|r| format!("[{}]", r.iter().map(ExactJson::exact_json).collect::<Vec<_>>().join(","))).collect();
    format!("[{}]", rows.join(","))
}

fn point_json(p: &EinPoint) -> String {
    format!("[{}]", p.rep().0.iter().map(|x| fmt_f64(*x)).collect::<Vec<_>>().join(","))
}

/// Raw homogeneous coordinates, faces, labels and scaffold polylines.
pub fn mesh_to_json(mesh: &SurfaceMesh) -> String {
    let mut out = String::from("{\"vertices\":[");
    out.push_str(&mesh.vertices.iter().map(point_json).collect::<Vec<_>>().join(","));
    out.push_str("],\"faces\":[");
    out.push_str(&mesh.faces.iter().map(|f| format!("[{},{},{}]", f[0], f[1], f[2])).collect::<Vec<_>>().join(","));
    out.push_str("],\"labels\":[");
    out.push_str(&mesh.labels.iter().map(|l| format!("\"{}\"", l.name())).collect::<Vec<_>>().join(","));
    out.push_str("],\"scaffold\":[");
    let lines: Vec<String> = mesh
        .scaffold
        .iter()
        .map(|l| format!("[{}]", l.iter().map(point_json).collect::<Vec<_>>().join(",")))
        .collect();
    out.push_str(&lines.join(","));
    out.push_str("]}\n");
    out
}

/// Faces with a removed vertex, or spanning more than half the height of the
/// cylinder (the `t = 0 ~ π` gluing), are not drawn.
fn drawable(c: &[Option<(f64, f64, f64)>]) -> bool {
    let Some(hs) = c.iter().map(|p| p.map(|p| p.2)).collect::<Option<Vec<f64>>>() else { return false };
    let lo = hs.iter().cloned().fold(f64::INFINITY, f64::min);
    let hi = hs.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    hi - lo < PI / 2.0
}

fn cyl(p: &EinPoint) -> Option<(f64, f64, f64)> {
    match cylinder_coords(p) {
        CylinderPoint::Removed => None,
        CylinderPoint::Point { x, y, h } => Some((x, y, h)),
    }
}

/// Solid-cylinder model: vertex `x y h` with `h = t ∈ [0, π)`, one group per
/// part label and scaffold photons as polylines.
pub fn mesh_to_obj(mesh: &SurfaceMesh) -> String {
    let coords: Vec<Option<(f64, f64, f64)>> = mesh.vertices.iter().map(cyl).collect();
    let mut index = vec![0usize; coords.len()];
    let mut out = String::new();
    let mut next = 1;
    for (i, c) in coords.iter().enumerate() {
        if let Some((x, y, h)) = c {
            let _ = writeln!(out, "v {} {} {}", fmt_f64(*x), fmt_f64(*y), fmt_f64(*h));
            index[i] = next;
            next += 1;
        }
    }
    for label in [PartLabel::Stem, PartLabel::WingPlus, PartLabel::WingMinus, PartLabel::Cone] {
        let faces: Vec<&[usize; 3]> = mesh
            .faces
            .iter()
            .zip(&mesh.labels)
            .filter(|(f, l)| **l == label && drawable(&f.map(|v| coords[v])))
            .map(|(f, _)| f)
            .collect();
        if faces.is_empty() {
            continue;
        }
        let _ = writeln!(out, "g {}", label.name());
        for f in faces {
            let _ = writeln!(out, "f {} {} {}", index[f[0]], index[f[1]], index[f[2]]);
        }
    }
    if !mesh.scaffold.is_empty() {
        let _ = writeln!(out, "g {}", PartLabel::Scaffold.name());
    }
    for line in &mesh.scaffold {
        let mut run: Vec<usize> = Vec::new();
        let mut last_h: Option<f64> = None;
        for p in line {
            let c = cyl(p);
            let jump = matches!((c, last_h), (Some((_, _, h)), Some(l)) if (h - l).abs() >= PI / 2.0);
            if c.is_none() || jump {
                flush(&mut out, &mut run);
            }
            if let Some((x, y, h)) = c {
                let _ = writeln!(out, "v {} {} {}", fmt_f64(x), fmt_f64(y), fmt_f64(h));
                run.push(next);
                next += 1;
                last_h = Some(h);
            } else {
                last_h = None;
            }
        }
        flush(&mut out, &mut run);
    }
    out
}

fn flush(out: &mut String, run: &mut Vec<usize>) {
    if run.len() > 1 {
        let ids: Vec<String> = run.iter().map(|i| i.to_string()).collect();
        let _ = writeln!(out, "l {}", ids.join(" "));
    }
    run.clear();
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::affine::Extension;
    use crate::group::mu_example;
    use crate::mesh::sample_surface;
    use crate::surface::CrookedSurface;

    #[test]
    fn seventeen_digits() {
        assert_eq!(fmt_f64(1.0), "1.0000000000000000e0");
        assert_eq!(fmt_f64(-0.0), "0.0000000000000000e0");
        let x = 0.1f64 + 0.2;
        assert_eq!(fmt_f64(x).parse::<f64>().unwrap(), x);
    }

    #[test]
    fn rational_matrix_is_exact_text() {
        let j = matrix_json(&mu_example());
        let v: serde_json::Value = serde_json::from_str(&j).unwrap();
        assert_eq!(v.as_array().unwrap().len(), 5);
        assert!(v[0][0].is_string());
    }

    #[test]
    fn obj_groups_and_repeatability() {
        let mesh = sample_surface(&CrookedSurface::basic(Extension::Positive), 8).unwrap();
        let a = mesh_to_obj(&mesh);
        assert_eq!(a, mesh_to_obj(&mesh));
        for g in ["g stem", "g wing_plus", "g wing_minus", "g scaffold"] {
            assert!(a.contains(g), "{g}");
        }
        let v: serde_json::Value = serde_json::from_str(&mesh_to_json(&mesh)).unwrap();
        assert_eq!(v["faces"].as_array().unwrap().len(), mesh.faces.len());
    }
}
