//! Key-value config files and environment overrides.

use std::collections::BTreeMap;
use std::path::Path;

use anyhow::{bail, Context, Result};
use crooked_core::forms::Vec3;
use crooked_core::{DisjointPairSpec, EinPoint, Rational, Scalar};

pub const ENV_EPS_PRED: &str = "CROOKED_EPS_PRED";
pub const ENV_EPS_PROBE: &str = "CROOKED_EPS_PROBE";

pub const KEYS: [&str; 14] = [
    "u1",
    "u2",
    "z1",
    "z2",
    "outer_z1",
    "outer_z2",
    "rapidity",
    "resolution",
    "radius",
    "probes",
    "depth",
    "mesh_resolution",
    "eps_pred",
    "eps_probe",
];

/// `key = value` lines; `#` starts a comment.
#[derive(Clone, Debug, Default)]
pub struct Config {
    values: BTreeMap<String, String>,
}

impl Config {
    pub fn load(path: Option<&Path>) -> Result<Self> {
        let Some(path) = path else { return Ok(Self::default()) };
        let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
        Self::parse(&text)
    }

    pub fn parse(text: &str) -> Result<Self> {
        let mut values = BTreeMap::new();
        for (no, line) in text.lines().enumerate() {
            let line = line.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let Some((k, v)) = line.split_once('=') else { bail!("line {}: expected key = value", no + 1) };
            let k = k.trim();
            if !KEYS.contains(&k) {
                bail!("line {}: unknown key {k}", no + 1);
            }
            values.insert(k.to_string(), v.trim().to_string());
        }
        Ok(Self { values })
    }

    pub fn get(&self, key: &str) -> Option<&str> {
        self.values.get(key).map(String::as_str)
    }

    pub fn usize_or(&self, flag: Option<usize>, key: &str, default: usize) -> Result<usize> {
        match (flag, self.get(key)) {
            (Some(v), _) => Ok(v),
            (None, Some(s)) => s.parse().with_context(|| format!("{key}: not an integer")),
            (None, None) => Ok(default),
        }
    }

    pub fn f64_or(&self, flag: Option<f64>, key: &str, default: f64) -> Result<f64> {
        let v = match (flag, self.get(key)) {
            (Some(v), _) => v,
            (None, Some(s)) => parse_rational(s)?.to_f64(),
            (None, None) => default,
        };
        if !v.is_finite() {
            bail!("{key}: not finite");
        }
        Ok(v)
    }

    /// Tolerance from config, then environment, then the library default.
    pub fn tolerance(&self, key: &str, env: &str, default: f64) -> Result<f64> {
        let from_env = std::env::var(env).ok();
        let text = self.get(key).map(str::to_string).or(from_env);
        match text {
            Some(s) => {
                let v: f64 = s.trim().parse().with_context(|| format!("{key}: not a number"))?;
                if !(v.is_finite() && v >= 0.0) {
                    bail!("{key}: must be finite and non-negative");
                }
                Ok(v)
            }
            None => Ok(default),
        }
    }

    /// A rational spec when every triple is given, else `None`.
    pub fn pair_spec(&self) -> Result<Option<DisjointPairSpec<Rational>>> {
        let keys = ["u1", "u2", "z1", "z2"];
        let given = keys.iter().filter(|k| self.get(k).is_some()).count();
        if given == 0 {
            return Ok(None);
        }
        if given < keys.len() {
            bail!("u1, u2, z1 and z2 must be given together");
        }
        let t = |k: &str| parse_triple(self.get(k).expect("checked"));
        let inner = crooked_core::AllowablePair { z1: t("z1")?, z2: t("z2")? };
        let outer = match (self.get("outer_z1"), self.get("outer_z2")) {
            (Some(a), Some(b)) => crooked_core::AllowablePair { z1: parse_triple(a)?, z2: parse_triple(b)? },
            (None, None) => inner.clone(),
            _ => bail!("outer_z1 and outer_z2 must be given together"),
        };
        Ok(Some(DisjointPairSpec::new(t("u1")?, t("u2")?, inner, outer)?))
    }

    pub fn set(&mut self, key: &str, value: Option<&String>) {
        if let Some(v) = value {
            self.values.insert(key.to_string(), v.clone());
        }
    }
}

/// `p/q`, an integer, or a decimal, read exactly.
pub fn parse_rational(s: &str) -> Result<Rational> {
    crooked_core::scalar::parse_rational(s).with_context(|| format!("bad number {s}"))
}

/// Comma triple `a,b,c` of rationals.
pub fn parse_triple(s: &str) -> Result<Vec3<Rational>> {
    let parts: Vec<&str> = s.split(',').collect();
    if parts.len() != 3 {
        bail!("expected a,b,c but got {s}");
    }
    Ok(Vec3([parse_rational(parts[0])?, parse_rational(parts[1])?, parse_rational(parts[2])?]))
}

/// Colon notation `a:b:c:d:e`.
pub fn parse_point(s: &str) -> Result<EinPoint> {
    Ok(EinPoint::parse(s)?)
}

pub fn spec_to_f64(spec: &DisjointPairSpec<Rational>) -> Result<DisjointPairSpec> {
    let pair = |p: &crooked_core::AllowablePair<Rational>| crooked_core::AllowablePair { z1: p.z1.to_f64(), z2: p.z2.to_f64() };
    Ok(DisjointPairSpec::new(spec.u1.to_f64(), spec.u2.to_f64(), pair(&spec.inner), pair(&spec.outer))?)
}
