//! Run configuration files.
//!
//! One `key = value` assignment per line; `#` starts a comment. Sweepable
//! parameters accept a comma list (`0, 0.1, 0.2`) or an inclusive range
//! `start:step:end`. The full grammar is in `docs/FORMATS.md`.

use std::path::PathBuf;

use nalgebra::Point2;

use crate::error::{Error, Result};
use crate::geometry::Cutout;
use crate::material::{
    parse_layup, Environment, LaminaProperties, MaterialTable, ModuliPolicy, PlyMaterial,
};
use crate::solver::BoundaryCondition;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Mode {
    Static,
    Vibration,
    Buckling,
}

impl std::str::FromStr for Mode {
    type Err = String;
    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s.trim().to_ascii_lowercase().as_str() {
            "static" => Ok(Self::Static),
            "vibration" => Ok(Self::Vibration),
            "buckling" => Ok(Self::Buckling),
            other => Err(format!(
                "unknown mode `{other}` (expected static, vibration or buckling)"
            )),
        }
    }
}

impl std::fmt::Display for Mode {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Self::Static => "static",
            Self::Vibration => "vibration",
            Self::Buckling => "buckling",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Kind {
    Number,
    Text,
}

/// `(key, kind, sweepable)`.
const KEYS: &[(&str, Kind, bool)] = &[
    ("a", Kind::Number, true),
    ("b", Kind::Number, true),
    ("b_over_a", Kind::Number, true),
    ("h", Kind::Number, true),
    ("a_over_h", Kind::Number, true),
    ("layup", Kind::Text, true),
    ("cutout", Kind::Text, true),
    ("r", Kind::Number, true),
    ("r_over_a", Kind::Number, true),
    ("d", Kind::Number, true),
    ("d_over_a", Kind::Number, true),
    ("e", Kind::Number, true),
    ("d_over_e", Kind::Number, true),
    ("psi", Kind::Number, true),
    ("cx", Kind::Number, true),
    ("cy", Kind::Number, true),
    ("T", Kind::Number, true),
    ("C", Kind::Number, true),
    ("bc", Kind::Text, true),
    ("mode", Kind::Text, true),
    ("mesh", Kind::Text, false),
    ("modes", Kind::Number, false),
    ("material", Kind::Text, false),
    ("material_file", Kind::Text, false),
    ("E", Kind::Number, false),
    ("nu", Kind::Number, false),
    ("rho", Kind::Number, false),
    ("moduli", Kind::Text, false),
    ("output", Kind::Text, false),
];

#[derive(Debug, Clone, PartialEq)]
pub enum Value {
    Number(f64),
    Text(String),
}

impl std::fmt::Display for Value {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Value::Number(x) => write!(f, "{x}"),
            Value::Text(s) => f.write_str(s),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
struct Entry {
    key: &'static str,
    values: Vec<Value>,
    line: usize,
}

/// Validated configuration: fixed settings plus one value list per parameter.
#[derive(Debug, Clone)]
pub struct RunConfig {
    entries: Vec<Entry>,
    pub mesh: (usize, usize),
    pub modes: usize,
    pub material: PlyMaterial,
    pub moduli: ModuliPolicy,
    pub output: Option<PathBuf>,
}

/// Fully resolved single analysis case.
#[derive(Debug, Clone, PartialEq)]
pub struct CaseSpec {
    pub id: usize,
    pub a: f64,
    pub b: f64,
    pub h: f64,
    pub layup: String,
    pub angles: Vec<f64>,
    pub cutout: Cutout,
    pub environment: Environment,
    pub bc: BoundaryCondition,
    pub mode: Mode,
}

fn config_err(line: usize, message: impl Into<String>) -> Error {
    Error::Config {
        line,
        message: message.into(),
    }
}

fn parse_number(text: &str, line: usize) -> Result<f64> {
    let v: f64 = text
        .trim()
        .parse()
        .map_err(|_| config_err(line, format!("cannot parse `{}` as a number", text.trim())))?;
    if !v.is_finite() {
        return Err(config_err(line, format!("`{}` is not finite", text.trim())));
    }
    Ok(v)
}

/// Inclusive `start:step:end` range.
fn parse_range(text: &str, line: usize) -> Result<Vec<f64>> {
    let parts: Vec<&str> = text.split(':').collect();
    if parts.len() != 3 {
        return Err(config_err(line, format!("range `{text}` must be start:step:end")));
    }
    let start = parse_number(parts[0], line)?;
    let step = parse_number(parts[1], line)?;
    let end = parse_number(parts[2], line)?;
    if step == 0.0 || (end - start) * step < 0.0 {
        return Err(config_err(line, format!("empty sweep range `{text}`")));
    }
    let count = ((end - start) / step + 1e-9).floor() as usize + 1;
    if count > 100_000 {
        return Err(config_err(line, format!("range `{text}` has too many points")));
    }
    Ok((0..count).map(|k| start + k as f64 * step).collect())
}

fn parse_values(key: &str, kind: Kind, sweepable: bool, text: &str, line: usize) -> Result<Vec<Value>> {
    if text.is_empty() {
        return Err(config_err(line, format!("`{key}` has no value")));
    }
    let values: Vec<Value> = match kind {
        Kind::Number if text.contains(':') => {
            parse_range(text, line)?.into_iter().map(Value::Number).collect()
        }
        Kind::Number => text
            .split(',')
            .map(|s| parse_number(s, line).map(Value::Number))
            .collect::<Result<_>>()?,
        Kind::Text if sweepable => text
            .split(',')
            .map(|s| Value::Text(s.trim().to_string()))
            .collect(),
        Kind::Text => vec![Value::Text(text.to_string())],
    };
    if values.is_empty() || values.iter().any(|v| matches!(v, Value::Text(s) if s.is_empty())) {
        return Err(config_err(line, format!("empty sweep range for `{key}`")));
    }
    if values.len() > 1 && !sweepable {
        return Err(config_err(line, format!("`{key}` cannot be swept")));
    }
    Ok(values)
}

impl RunConfig {
    pub fn parse(text: &str) -> Result<Self> {
        let mut entries: Vec<Entry> = Vec::new();
        for (idx, raw) in text.lines().enumerate() {
            let line = idx + 1;
            let content = raw.split('#').next().unwrap_or("").trim();
            if content.is_empty() {
                continue;
            }
            let (key, value) = content
                .split_once('=')
                .ok_or_else(|| config_err(line, format!("expected `key = value`, got `{content}`")))?;
            let key = key.trim();
            let &(name, kind, sweepable) = KEYS
                .iter()
                .find(|(k, _, _)| *k == key)
                .ok_or_else(|| config_err(line, format!("unknown key `{key}`")))?;
            if let Some(prev) = entries.iter().find(|e| e.key == name) {
                return Err(config_err(
                    line,
                    format!("`{name}` already set on line {}", prev.line),
                ));
            }
            let values = parse_values(name, kind, sweepable, value.trim(), line)?;
            entries.push(Entry {
                key: name,
                values,
                line,
            });
        }
        Self::validate(entries)
    }

    pub fn load(path: impl AsRef<std::path::Path>) -> Result<Self> {
        Self::parse(&std::fs::read_to_string(path)?)
    }

    fn entry(entries: &[Entry], key: &str) -> Option<Entry> {
        entries.iter().find(|e| e.key == key).cloned()
    }

    fn single_number(entries: &[Entry], key: &str) -> Option<(f64, usize)> {
        Self::entry(entries, key).map(|e| match &e.values[0] {
            Value::Number(x) => (*x, e.line),
            Value::Text(_) => unreachable!("numeric key holds text"),
        })
    }

    fn single_text(entries: &[Entry], key: &str) -> Option<(String, usize)> {
        Self::entry(entries, key).map(|e| (e.values[0].to_string(), e.line))
    }

    fn validate(entries: Vec<Entry>) -> Result<Self> {
        for (x, y) in [
            ("b", "b_over_a"),
            ("h", "a_over_h"),
            ("r", "r_over_a"),
            ("d", "d_over_a"),
            ("e", "d_over_e"),
        ] {
            if let (Some(_), Some(second)) = (Self::entry(&entries, x), Self::entry(&entries, y)) {
                return Err(config_err(
                    second.line,
                    format!("give either `{x}` or `{y}`, not both"),
                ));
            }
        }
        if Self::entry(&entries, "layup").is_none() {
            return Err(config_err(0, "missing required key `layup`"));
        }

        let mesh = match Self::single_text(&entries, "mesh") {
            None => (30, 30),
            Some((text, line)) => {
                let parts: Vec<&str> = text.split(|c: char| c.is_whitespace() || c == 'x' || c == ',')
                    .filter(|s| !s.is_empty())
                    .collect();
                let parsed: Option<Vec<usize>> = parts.iter().map(|s| s.parse().ok()).collect();
                match parsed.as_deref() {
                    Some([n]) if *n > 0 => (*n, *n),
                    Some([nx, ny]) if *nx > 0 && *ny > 0 => (*nx, *ny),
                    _ => return Err(config_err(line, format!("mesh `{text}` must be `NX NY`"))),
                }
            }
        };
        let modes = match Self::single_number(&entries, "modes") {
            None => 1,
            Some((m, line)) => {
                if !(m >= 1.0 && m.fract() == 0.0) {
                    return Err(config_err(line, "modes must be a positive integer"));
                }
                m as usize
            }
        };
        let rho = Self::single_number(&entries, "rho");
        if let Some((r, line)) = rho {
            if !(r > 0.0) {
                return Err(config_err(line, "rho must be positive"));
            }
        }
        let material = match (
            Self::single_text(&entries, "material"),
            Self::single_text(&entries, "material_file"),
        ) {
            (Some(_), Some((_, line))) => {
                return Err(config_err(line, "give either `material` or `material_file`, not both"))
            }
            (_, Some((path, line))) => {
                let table = MaterialTable::load(&path)
                    .map_err(|e| config_err(line, format!("material file `{path}`: {e}")))?;
                PlyMaterial::Table(match rho {
                    Some((r, l)) => table.with_density(r).map_err(|e| config_err(l, e.to_string()))?,
                    None => table,
                })
            }
            (Some((name, line)), None) => match name.to_ascii_lowercase().as_str() {
                "graphite_epoxy" | "graphite-epoxy" => {
                    let table = MaterialTable::graphite_epoxy();
                    PlyMaterial::Table(match rho {
                        Some((r, l)) => table.with_density(r).map_err(|e| config_err(l, e.to_string()))?,
                        None => table,
                    })
                }
                "isotropic" => {
                    let (e, e_line) = Self::single_number(&entries, "E")
                        .ok_or_else(|| config_err(line, "isotropic material needs `E`"))?;
                    let (nu, _) = Self::single_number(&entries, "nu")
                        .ok_or_else(|| config_err(line, "isotropic material needs `nu`"))?;
                    let props = LaminaProperties::isotropic(e, nu, rho.map_or(1.0, |r| r.0));
                    props.validate().map_err(|err| config_err(e_line, err.to_string()))?;
                    PlyMaterial::Fixed(props)
                }
                other => return Err(config_err(line, format!("unknown material `{other}`"))),
            },
            (None, None) => {
                let table = MaterialTable::graphite_epoxy();
                PlyMaterial::Table(match rho {
                    Some((r, l)) => table.with_density(r).map_err(|e| config_err(l, e.to_string()))?,
                    None => table,
                })
            }
        };
        if let (PlyMaterial::Table(_), Some(e)) = (&material, Self::entry(&entries, "E")) {
            return Err(config_err(e.line, "`E` applies only to `material = isotropic`"));
        }
        let moduli = match Self::single_text(&entries, "moduli") {
            None => ModuliPolicy::EnvironmentDependent,
            Some((m, line)) => match m.to_ascii_lowercase().as_str() {
                "environment" => ModuliPolicy::EnvironmentDependent,
                "baseline" => ModuliPolicy::Baseline,
                other => {
                    return Err(config_err(
                        line,
                        format!("unknown moduli policy `{other}` (expected environment or baseline)"),
                    ))
                }
            },
        };
        let output = Self::single_text(&entries, "output").map(|(p, _)| PathBuf::from(p));

        let config = Self {
            entries,
            mesh,
            modes,
            material,
            moduli,
            output,
        };
        config.validate_values()?;
        Ok(config)
    }

    /// Per-value checks that need only one parameter at a time.
    fn validate_values(&self) -> Result<()> {
        let positive = ["a", "b", "b_over_a", "h", "a_over_h"];
        let non_negative = ["r", "r_over_a", "d", "d_over_a", "e", "d_over_e"];
        for entry in &self.entries {
            for value in &entry.values {
                let line = entry.line;
                match (entry.key, value) {
                    (k, Value::Number(x)) if positive.contains(&k) && !(*x > 0.0) => {
                        return Err(config_err(line, format!("`{k}` must be positive, got {x}")));
                    }
                    (k, Value::Number(x)) if non_negative.contains(&k) && *x < 0.0 => {
                        return Err(config_err(line, format!("`{k}` must not be negative, got {x}")));
                    }
                    ("layup", Value::Text(s)) => {
                        parse_layup(s).map_err(|m| config_err(line, m))?;
                    }
                    ("bc", Value::Text(s)) => {
                        let bc: BoundaryCondition = s.parse().map_err(|m: String| config_err(line, m))?;
                        if bc == BoundaryCondition::Free {
                            return Err(config_err(line, "bc must be SSSS or CCCC"));
                        }
                    }
                    ("mode", Value::Text(s)) => {
                        s.parse::<Mode>().map_err(|m| config_err(line, m))?;
                    }
                    ("cutout", Value::Text(s)) => {
                        if !matches!(s.to_ascii_lowercase().as_str(), "none" | "circle" | "ellipse") {
                            return Err(config_err(
                                line,
                                format!("unknown cutout `{s}` (expected none, circle or ellipse)"),
                            ));
                        }
                    }
                    ("T", Value::Number(t)) => self.check_environment(Environment::new(*t, 0.0), line)?,
                    ("C", Value::Number(c)) => {
                        self.check_environment(Environment::new(300.0, *c), line)?
                    }
                    _ => {}
                }
            }
        }
        Ok(())
    }

    fn check_environment(&self, env: Environment, line: usize) -> Result<()> {
        self.material
            .properties(env, self.moduli)
            .map(|_| ())
            .map_err(|e| config_err(line, e.to_string()))
    }

    /// Parameters with more than one value, in file order.
    pub fn swept_keys(&self) -> Vec<&'static str> {
        self.entries
            .iter()
            .filter(|e| e.values.len() > 1)
            .map(|e| e.key)
            .collect()
    }

    pub fn is_sweep(&self) -> bool {
        !self.swept_keys().is_empty()
    }

    /// Cartesian product of all value lists; the first key varies slowest.
    pub fn sweep_plan(&self) -> Result<SweepPlan> {
        let lists: Vec<&Entry> = self.entries.iter().collect();
        let total: usize = lists.iter().map(|e| e.values.len()).product();
        let mut cases = Vec::with_capacity(total);
        for id in 0..total {
            let mut rem = id;
            let mut chosen = vec![0; lists.len()];
            for (k, e) in lists.iter().enumerate().rev() {
                chosen[k] = rem % e.values.len();
                rem /= e.values.len();
            }
            let pick = |key: &str| -> Option<(Value, usize)> {
                lists
                    .iter()
                    .zip(&chosen)
                    .find(|(e, _)| e.key == key)
                    .map(|(e, &i)| (e.values[i].clone(), e.line))
            };
            cases.push(resolve_case(id, &pick)?);
        }
        Ok(SweepPlan { cases })
    }
}

fn resolve_case(id: usize, pick: &dyn Fn(&str) -> Option<(Value, usize)>) -> Result<CaseSpec> {
    let num = |key: &str| -> Option<(f64, usize)> {
        pick(key).map(|(v, l)| match v {
            Value::Number(x) => (x, l),
            Value::Text(_) => unreachable!("numeric key holds text"),
        })
    };
    let text = |key: &str| pick(key).map(|(v, l)| (v.to_string(), l));
    let a = num("a").map_or(1.0, |v| v.0);
    let b = match (num("b"), num("b_over_a")) {
        (Some((b, _)), _) => b,
        (None, Some((r, _))) => r * a,
        (None, None) => a,
    };
    let h = match (num("h"), num("a_over_h")) {
        (Some((h, _)), _) => h,
        (None, Some((r, _))) => a / r,
        (None, None) => a / 100.0,
    };
    let (layup, _) = text("layup").expect("layup presence checked");
    let angles = parse_layup(&layup).expect("layup validated");
    let cx = num("cx").map_or(0.5 * a, |v| v.0);
    let cy = num("cy").map_or(0.5 * b, |v| v.0);
    let center = Point2::new(cx, cy);
    let radius = num("r").map(|v| v.0).or(num("r_over_a").map(|v| v.0 * a));
    let d = num("d").map(|v| v.0).or(num("d_over_a").map(|v| v.0 * a));
    let e = match (num("e"), num("d_over_e"), d) {
        (Some((e, _)), _, _) => Some(e),
        (None, Some((ratio, line)), Some(d)) => {
            if ratio == 0.0 {
                return Err(config_err(line, "d_over_e must be positive"));
            }
            Some(d / ratio)
        }
        _ => None,
    };
    let psi = num("psi").map_or(0.0, |v| v.0);
    let kind = match text("cutout") {
        Some((k, line)) => (k.to_ascii_lowercase(), line),
        None if d.is_some() || e.is_some() => ("ellipse".into(), 0),
        None if radius.is_some() => ("circle".into(), 0),
        None => ("none".into(), 0),
    };
    let cutout = match kind.0.as_str() {
        "none" => Cutout::None,
        "circle" => match radius {
            Some(r) if r == 0.0 => Cutout::None,
            Some(r) => Cutout::Circle { center, radius: r },
            None => return Err(config_err(kind.1, "circle cutout needs `r` or `r_over_a`")),
        },
        _ => match (d, e) {
            (Some(d), _) if d == 0.0 => Cutout::None,
            (Some(d), Some(e)) => Cutout::Ellipse {
                center,
                d,
                e,
                angle_deg: psi,
            },
            _ => {
                return Err(config_err(
                    kind.1,
                    "ellipse cutout needs `d` (or `d_over_a`) and `e` (or `d_over_e`)",
                ))
            }
        },
    };
    if let Err(err) = cutout.validate(a, b) {
        let line = ["r", "r_over_a", "d", "d_over_a", "cx", "cy"]
            .iter()
            .find_map(|k| pick(k).map(|(_, l)| l))
            .unwrap_or(0);
        return Err(config_err(line, format!("case {id}: {err}")));
    }
    let environment = Environment::new(
        num("T").map_or(300.0, |v| v.0),
        num("C").map_or(0.0, |v| v.0),
    );
    let bc = text("bc").map_or(Ok(BoundaryCondition::Ssss), |(s, _)| s.parse()).expect("bc validated");
    let mode = text("mode").map_or(Ok(Mode::Vibration), |(s, _)| s.parse()).expect("mode validated");
    Ok(CaseSpec {
        id,
        a,
        b,
        h,
        layup,
        angles,
        cutout,
        environment,
        bc,
        mode,
    })
}

/// Ordered list of cases.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepPlan {
    pub cases: Vec<CaseSpec>,
}

impl SweepPlan {
    pub fn len(&self) -> usize {
        self.cases.len()
    }

    pub fn is_empty(&self) -> bool {
        self.cases.is_empty()
    }
}
