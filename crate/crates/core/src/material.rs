//! Lamina and laminate constitutive data.
//!
//! Ply moduli depend on temperature and moisture concentration through
//! tabulated rows; everything downstream (reduced stiffness, rotation into
//! plate axes, through-thickness integration) is a pure function of the
//! tabulated state.
//!
//! Units: moduli in Pa, temperature in K, moisture concentration in percent
//! by weight. Moisture expansion coefficients multiply the moisture *mass
//! fraction*, so a concentration of `C` percent produces the free strain
//! `beta * C / 100`.

use std::path::Path;

use nalgebra::{Matrix2, Matrix3, Vector3};

use crate::error::{Error, Result};

/// Transverse shear correction factor applied to the shear stiffness `As`.
pub const SHEAR_CORRECTION: f64 = 5.0 / 6.0;

/// Reference (stress-free) temperature in K.
pub const REFERENCE_TEMPERATURE: f64 = 300.0;

/// Reference moisture concentration in percent.
pub const REFERENCE_MOISTURE: f64 = 0.0;

/// Uniform hygrothermal environment of the plate.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Environment {
    /// Temperature in K.
    pub temperature: f64,
    /// Moisture concentration in percent.
    pub moisture: f64,
}

impl Environment {
    pub const BASELINE: Environment = Environment {
        temperature: REFERENCE_TEMPERATURE,
        moisture: REFERENCE_MOISTURE,
    };

    pub fn new(temperature: f64, moisture: f64) -> Self {
        Self {
            temperature,
            moisture,
        }
    }

    /// Temperature rise above the stress-free state (K).
    pub fn delta_t(&self) -> f64 {
        self.temperature - REFERENCE_TEMPERATURE
    }

    /// Moisture rise as a mass fraction (not percent).
    pub fn delta_c_fraction(&self) -> f64 {
        (self.moisture - REFERENCE_MOISTURE) / 100.0
    }
}

impl Default for Environment {
    fn default() -> Self {
        Self::BASELINE
    }
}

/// Whether ply moduli follow the environment or stay at their baseline values.
///
/// In both cases the hygrothermal free strains are driven by the environment;
/// only the elastic moduli differ.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum ModuliPolicy {
    #[default]
    EnvironmentDependent,
    Baseline,
}

/// Elastic, expansion and inertia properties of one ply material at a fixed state.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LaminaProperties {
    pub e1: f64,
    pub e2: f64,
    pub g12: f64,
    pub g13: f64,
    pub g23: f64,
    pub nu12: f64,
    pub alpha1: f64,
    pub alpha2: f64,
    pub beta1: f64,
    pub beta2: f64,
    pub rho: f64,
}

impl LaminaProperties {
    /// Isotropic material with no hygrothermal expansion.
    pub fn isotropic(e: f64, nu: f64, rho: f64) -> Self {
        let g = e / (2.0 * (1.0 + nu));
        Self {
            e1: e,
            e2: e,
            g12: g,
            g13: g,
            g23: g,
            nu12: nu,
            alpha1: 0.0,
            alpha2: 0.0,
            beta1: 0.0,
            beta2: 0.0,
            rho,
        }
    }

    pub fn nu21(&self) -> f64 {
        self.nu12 * self.e2 / self.e1
    }

    pub fn validate(&self) -> Result<()> {
        let positive = [
            ("E1", self.e1),
            ("E2", self.e2),
            ("G12", self.g12),
            ("G13", self.g13),
            ("G23", self.g23),
            ("rho", self.rho),
        ];
        for (name, value) in positive {
            if !(value > 0.0 && value.is_finite()) {
                return Err(Error::InvalidMaterial(format!("{name} must be positive, got {value}")));
            }
        }
        if !(0.0..0.5).contains(&self.nu12) {
            return Err(Error::InvalidMaterial(format!(
                "nu12 must lie in [0, 0.5), got {}",
                self.nu12
            )));
        }
        if self.nu21() >= 0.5 {
            return Err(Error::InvalidMaterial(format!(
                "nu21 = {} must be below 0.5",
                self.nu21()
            )));
        }
        Ok(())
    }
}

/// One tabulated row: the key is a moisture concentration (%) or a temperature (K).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ModuliRow {
    pub key: f64,
    pub e1: f64,
    pub e2: f64,
    pub g12: f64,
}

impl ModuliRow {
    pub const fn new(key: f64, e1: f64, e2: f64, g12: f64) -> Self {
        Self { key, e1, e2, g12 }
    }
}

const GPA: f64 = 1e9;

/// Environment-dependent moduli of a ply material plus its fixed constants.
///
/// Transverse shear moduli follow `G13 = G12` and `G23 = G12 / 2`.
#[derive(Debug, Clone, PartialEq)]
pub struct MaterialTable {
    moisture_rows: Vec<ModuliRow>,
    temperature_rows: Vec<ModuliRow>,
    pub nu12: f64,
    pub alpha1: f64,
    pub alpha2: f64,
    pub beta1: f64,
    pub beta2: f64,
    pub rho: f64,
}

impl MaterialTable {
    /// Graphite/epoxy lamina with moduli stored in Pa.
    pub fn graphite_epoxy() -> Self {
        let moisture = [
            (0.0, 9.50),
            (0.25, 9.25),
            (0.50, 9.00),
            (0.75, 8.75),
            (1.00, 8.50),
            (1.25, 8.50),
            (1.50, 8.50),
        ]
        .map(|(c, e2)| ModuliRow::new(c, 130.0 * GPA, e2 * GPA, 6.0 * GPA));
        let temperature = [
            (300.0, 9.50, 6.0),
            (325.0, 8.50, 6.0),
            (350.0, 8.00, 5.5),
            (375.0, 7.50, 5.0),
            (400.0, 7.00, 4.75),
            (425.0, 6.75, 4.50),
        ]
        .map(|(t, e2, g12)| ModuliRow::new(t, 130.0 * GPA, e2 * GPA, g12 * GPA));
        Self {
            moisture_rows: moisture.to_vec(),
            temperature_rows: temperature.to_vec(),
            nu12: 0.3,
            alpha1: -0.3e-6,
            alpha2: 28.1e-6,
            beta1: 0.0,
            beta2: 0.44,
            rho: 1.0,
        }
    }

    #[allow(clippy::too_many_arguments)]
    pub fn new(
        moisture_rows: Vec<ModuliRow>,
        temperature_rows: Vec<ModuliRow>,
        nu12: f64,
        alpha1: f64,
        alpha2: f64,
        beta1: f64,
        beta2: f64,
        rho: f64,
    ) -> Result<Self> {
        let table = Self {
            moisture_rows,
            temperature_rows,
            nu12,
            alpha1,
            alpha2,
            beta1,
            beta2,
            rho,
        };
        table.validate()?;
        Ok(table)
    }

    /// Same table with a different mass density.
    pub fn with_density(mut self, rho: f64) -> Result<Self> {
        self.rho = rho;
        self.validate()?;
        Ok(self)
    }

    pub fn moisture_rows(&self) -> &[ModuliRow] {
        &self.moisture_rows
    }

    pub fn temperature_rows(&self) -> &[ModuliRow] {
        &self.temperature_rows
    }

    fn validate(&self) -> Result<()> {
        for (name, rows) in [
            ("moisture", &self.moisture_rows),
            ("temperature", &self.temperature_rows),
        ] {
            if rows.is_empty() {
                return Err(Error::InvalidMaterial(format!("{name} table has no rows")));
            }
            if rows.windows(2).any(|w| w[1].key <= w[0].key) {
                return Err(Error::InvalidMaterial(format!(
                    "{name} rows must be strictly increasing"
                )));
            }
            if rows
                .iter()
                .any(|r| !(r.e1 > 0.0 && r.e2 > 0.0 && r.g12 > 0.0))
            {
                return Err(Error::InvalidMaterial(format!("{name} table has a non-positive modulus")));
            }
        }
        let m0 = self.moisture_rows[0];
        let t0 = self.temperature_rows[0];
        if m0.key != REFERENCE_MOISTURE || t0.key != REFERENCE_TEMPERATURE {
            return Err(Error::InvalidMaterial(format!(
                "tables must start at C = {REFERENCE_MOISTURE} % and T = {REFERENCE_TEMPERATURE} K"
            )));
        }
        let close = |x: f64, y: f64| (x - y).abs() <= 1e-12 * x.abs().max(y.abs());
        if !(close(m0.e1, t0.e1) && close(m0.e2, t0.e2) && close(m0.g12, t0.g12)) {
            return Err(Error::InvalidMaterial(
                "baseline rows of the moisture and temperature tables disagree".into(),
            ));
        }
        LaminaProperties {
            e1: m0.e1,
            e2: m0.e2,
            g12: m0.g12,
            g13: m0.g12,
            g23: 0.5 * m0.g12,
            nu12: self.nu12,
            alpha1: self.alpha1,
            alpha2: self.alpha2,
            beta1: self.beta1,
            beta2: self.beta2,
            rho: self.rho,
        }
        .validate()
    }

    /// Properties at the stress-free reference state (300 K, 0 %).
    pub fn baseline(&self) -> LaminaProperties {
        self.assemble(self.moisture_rows[0])
    }

    /// Moduli at `(T, C)` by piecewise-linear interpolation of each table;
    /// the two degradations add relative to the baseline row.
    pub fn properties_at(&self, env: Environment) -> Result<LaminaProperties> {
        let by_t = interpolate(&self.temperature_rows, env.temperature, "T")?;
        let by_c = interpolate(&self.moisture_rows, env.moisture, "C")?;
        let base = self.moisture_rows[0];
        let combined = ModuliRow {
            key: 0.0,
            e1: base.e1 + (by_t.e1 - base.e1) + (by_c.e1 - base.e1),
            e2: base.e2 + (by_t.e2 - base.e2) + (by_c.e2 - base.e2),
            g12: base.g12 + (by_t.g12 - base.g12) + (by_c.g12 - base.g12),
        };
        let props = self.assemble(combined);
        props.validate()?;
        Ok(props)
    }

    fn assemble(&self, row: ModuliRow) -> LaminaProperties {
        LaminaProperties {
            e1: row.e1,
            e2: row.e2,
            g12: row.g12,
            g13: row.g12,
            g23: 0.5 * row.g12,
            nu12: self.nu12,
            alpha1: self.alpha1,
            alpha2: self.alpha2,
            beta1: self.beta1,
            beta2: self.beta2,
            rho: self.rho,
        }
    }

    /// Parse the text table format (see `docs/FORMATS.md`).
    ///
    /// ```text
    /// nu12 = 0.3
    /// alpha1 = -0.3e-6
    /// [moisture]
    /// # C(%)  E1(GPa)  E2(GPa)  G12(GPa)
    /// 0.0     130      9.50     6.0
    /// [temperature]
    /// 300     130      9.50     6.0
    /// ```
    pub fn parse(text: &str) -> Result<Self> {
        #[derive(PartialEq)]
        enum Section {
            Header,
            Moisture,
            Temperature,
        }
        let mut section = Section::Header;
        let mut moisture = Vec::new();
        let mut temperature = Vec::new();
        let mut scalars: [Option<f64>; 6] = [None; 6];
        const NAMES: [&str; 6] = ["nu12", "alpha1", "alpha2", "beta1", "beta2", "rho"];

        for (idx, raw) in text.lines().enumerate() {
            let line_no = idx + 1;
            let err = |message: String| Error::MaterialFile {
                line: line_no,
                message,
            };
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            match line {
                "[moisture]" => {
                    section = Section::Moisture;
                    continue;
                }
                "[temperature]" => {
                    section = Section::Temperature;
                    continue;
                }
                _ => {}
            }
            if section == Section::Header {
                let (key, value) = line
                    .split_once('=')
                    .ok_or_else(|| err(format!("expected `key = value`, got `{line}`")))?;
                let key = key.trim();
                let slot = NAMES
                    .iter()
                    .position(|n| *n == key)
                    .ok_or_else(|| err(format!("unknown key `{key}`")))?;
                let value: f64 = value
                    .trim()
                    .parse()
                    .map_err(|_| err(format!("cannot parse `{}` as a number", value.trim())))?;
                scalars[slot] = Some(value);
            } else {
                let cols: Vec<f64> = line
                    .split_whitespace()
                    .map(|c| c.parse::<f64>())
                    .collect::<std::result::Result<_, _>>()
                    .map_err(|_| err(format!("cannot parse row `{line}`")))?;
                if cols.len() != 4 {
                    return Err(err(format!("expected 4 columns, got {}", cols.len())));
                }
                let row = ModuliRow::new(cols[0], cols[1] * GPA, cols[2] * GPA, cols[3] * GPA);
                match section {
                    Section::Moisture => moisture.push(row),
                    Section::Temperature => temperature.push(row),
                    Section::Header => unreachable!(),
                }
            }
        }
        let defaults = Self::graphite_epoxy();
        let fallback = [
            defaults.nu12,
            defaults.alpha1,
            defaults.alpha2,
            defaults.beta1,
            defaults.beta2,
            defaults.rho,
        ];
        let v: Vec<f64> = scalars
            .iter()
            .zip(fallback)
            .map(|(s, d)| s.unwrap_or(d))
            .collect();
        Self::new(moisture, temperature, v[0], v[1], v[2], v[3], v[4], v[5])
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        Self::parse(&std::fs::read_to_string(path)?)
    }
}

fn interpolate(rows: &[ModuliRow], key: f64, quantity: &'static str) -> Result<ModuliRow> {
    let (min, max) = (rows[0].key, rows[rows.len() - 1].key);
    if !(min..=max).contains(&key) {
        return Err(Error::OutOfRange {
            quantity,
            value: key,
            min,
            max,
        });
    }
    if let Some(exact) = rows.iter().find(|r| r.key == key) {
        return Ok(*exact);
    }
    let upper = rows.iter().position(|r| r.key > key).unwrap_or(rows.len() - 1);
    let (lo, hi) = (rows[upper - 1], rows[upper]);
    let t = (key - lo.key) / (hi.key - lo.key);
    let lerp = |a: f64, b: f64| a + t * (b - a);
    Ok(ModuliRow {
        key,
        e1: lerp(lo.e1, hi.e1),
        e2: lerp(lo.e2, hi.e2),
        g12: lerp(lo.g12, hi.g12),
    })
}

/// Source of ply properties: a tabulated material or fixed constants.
#[derive(Debug, Clone, PartialEq)]
pub enum PlyMaterial {
    Table(MaterialTable),
    Fixed(LaminaProperties),
}

impl PlyMaterial {
    pub fn properties(&self, env: Environment, policy: ModuliPolicy) -> Result<LaminaProperties> {
        match (self, policy) {
            (PlyMaterial::Fixed(p), _) => {
                p.validate()?;
                Ok(*p)
            }
            (PlyMaterial::Table(t), ModuliPolicy::Baseline) => {
                // Range check still applies to the environment.
                t.properties_at(env)?;
                Ok(t.baseline())
            }
            (PlyMaterial::Table(t), ModuliPolicy::EnvironmentDependent) => t.properties_at(env),
        }
    }

    pub fn baseline(&self) -> LaminaProperties {
        match self {
            PlyMaterial::Fixed(p) => *p,
            PlyMaterial::Table(t) => t.baseline(),
        }
    }
}

/// Plane-stress reduced stiffness in the material axes.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PlaneStressStiffness {
    pub q: Matrix3<f64>,
    pub qs: Matrix2<f64>,
}

pub fn reduced_stiffness(p: &LaminaProperties) -> Result<PlaneStressStiffness> {
    let denom = 1.0 - p.nu12 * p.nu21();
    if denom <= 0.0 {
        return Err(Error::InvalidMaterial(format!(
            "1 - nu12 nu21 = {denom} is not positive"
        )));
    }
    let q11 = p.e1 / denom;
    let q22 = p.e2 / denom;
    let q12 = p.nu12 * q22;
    let q = Matrix3::new(q11, q12, 0.0, q12, q22, 0.0, 0.0, 0.0, p.g12);
    let qs = Matrix2::new(p.g13, 0.0, 0.0, p.g23);
    Ok(PlaneStressStiffness { q, qs })
}

/// Ply stiffness and free-expansion coefficients in plate axes.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TransformedStiffness {
    pub qbar: Matrix3<f64>,
    pub qsbar: Matrix2<f64>,
    /// `(alpha_x, alpha_y, alpha_xy)` with engineering shear.
    pub alpha: Vector3<f64>,
    /// `(beta_x, beta_y, beta_xy)` with engineering shear.
    pub beta: Vector3<f64>,
}

/// Engineering-strain rotation from plate axes to material axes for a ply
/// whose fibre direction makes `theta` (radians, counter-clockwise) with x.
fn strain_rotation(theta: f64) -> Matrix3<f64> {
    let (n, m) = theta.sin_cos();
    Matrix3::new(
        m * m,
        n * n,
        m * n,
        n * n,
        m * m,
        -m * n,
        -2.0 * m * n,
        2.0 * m * n,
        m * m - n * n,
    )
}

pub fn transform_to_laminate_axes(
    q: &PlaneStressStiffness,
    p: &LaminaProperties,
    theta_deg: f64,
) -> TransformedStiffness {
    let theta = theta_deg.to_radians();
    let t = strain_rotation(theta);
    let t_inv = strain_rotation(-theta);
    let (n, m) = theta.sin_cos();
    let r = Matrix2::new(m, n, -n, m);
    TransformedStiffness {
        qbar: t.transpose() * q.q * t,
        qsbar: r.transpose() * q.qs * r,
        alpha: t_inv * Vector3::new(p.alpha1, p.alpha2, 0.0),
        beta: t_inv * Vector3::new(p.beta1, p.beta2, 0.0),
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Ply {
    pub angle_deg: f64,
    pub thickness: f64,
    pub material: usize,
}

/// Ordered plies from the bottom face (`z = -h/2`) upwards.
#[derive(Debug, Clone, PartialEq)]
pub struct LaminateStack {
    plies: Vec<Ply>,
    materials: Vec<PlyMaterial>,
}

/// Through-thickness integrated stiffness, inertia and hygrothermal resultants.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LaminateIntegrals {
    pub a: Matrix3<f64>,
    pub b: Matrix3<f64>,
    pub d: Matrix3<f64>,
    pub a_s: Matrix2<f64>,
    /// Mass per unit area.
    pub p: f64,
    /// Rotary inertia per unit area.
    pub i: f64,
    pub n_hygro: Vector3<f64>,
    pub m_hygro: Vector3<f64>,
}

impl LaminateStack {
    pub fn new(plies: Vec<Ply>, materials: Vec<PlyMaterial>) -> Result<Self> {
        if plies.is_empty() {
            return Err(Error::InvalidMaterial("laminate has no plies".into()));
        }
        for ply in &plies {
            if !(ply.thickness > 0.0) {
                return Err(Error::InvalidMaterial(format!(
                    "ply thickness must be positive, got {}",
                    ply.thickness
                )));
            }
            if ply.material >= materials.len() {
                return Err(Error::InvalidMaterial(format!(
                    "ply references material {} but only {} defined",
                    ply.material,
                    materials.len()
                )));
            }
        }
        Ok(Self { plies, materials })
    }

    /// Equal-thickness plies of one material.
    pub fn uniform(angles_deg: &[f64], thickness: f64, material: PlyMaterial) -> Result<Self> {
        let t = thickness / angles_deg.len().max(1) as f64;
        let plies = angles_deg
            .iter()
            .map(|&angle_deg| Ply {
                angle_deg,
                thickness: t,
                material: 0,
            })
            .collect();
        Self::new(plies, vec![material])
    }

    pub fn plies(&self) -> &[Ply] {
        &self.plies
    }

    pub fn materials(&self) -> &[PlyMaterial] {
        &self.materials
    }

    pub fn thickness(&self) -> f64 {
        self.plies.iter().map(|p| p.thickness).sum()
    }

    /// Interface coordinates `h_1 = -h/2 < ... < h_{n+1} = h/2`.
    pub fn interfaces(&self) -> Vec<f64> {
        let h = self.thickness();
        let mut z = vec![-0.5 * h];
        let mut acc = -0.5 * h;
        for (k, ply) in self.plies.iter().enumerate() {
            acc += ply.thickness;
            z.push(if k + 1 == self.plies.len() { 0.5 * h } else { acc });
        }
        z
    }

    /// Reference properties used to nondimensionalize frequencies.
    pub fn reference_properties(&self) -> LaminaProperties {
        self.materials[self.plies[0].material].baseline()
    }

    pub fn integrals(&self, env: Environment, policy: ModuliPolicy) -> Result<LaminateIntegrals> {
        let z = self.interfaces();
        let mut out = LaminateIntegrals {
            a: Matrix3::zeros(),
            b: Matrix3::zeros(),
            d: Matrix3::zeros(),
            a_s: Matrix2::zeros(),
            p: 0.0,
            i: 0.0,
            n_hygro: Vector3::zeros(),
            m_hygro: Vector3::zeros(),
        };
        let (dt, dc) = (env.delta_t(), env.delta_c_fraction());
        for (k, ply) in self.plies.iter().enumerate() {
            let props = self.materials[ply.material].properties(env, policy)?;
            let q = reduced_stiffness(&props)?;
            let tr = transform_to_laminate_axes(&q, &props, ply.angle_deg);
            let (z0, z1) = (z[k], z[k + 1]);
            let m0 = z1 - z0;
            let m1 = 0.5 * (z1 * z1 - z0 * z0);
            let m2 = (z1 * z1 * z1 - z0 * z0 * z0) / 3.0;
            out.a += tr.qbar * m0;
            out.b += tr.qbar * m1;
            out.d += tr.qbar * m2;
            out.a_s += tr.qsbar * (SHEAR_CORRECTION * m0);
            out.p += props.rho * m0;
            out.i += props.rho * m2;
            let stress = tr.qbar * (tr.alpha * dt + tr.beta * dc);
            out.n_hygro += stress * m0;
            out.m_hygro += stress * m1;
        }
        Ok(out)
    }
}

/// Parse a layup string such as `0/90/90/0` into ply angles in degrees.
pub fn parse_layup(text: &str) -> std::result::Result<Vec<f64>, String> {
    let angles: std::result::Result<Vec<f64>, _> = text
        .trim()
        .split('/')
        .map(|s| s.trim().trim_end_matches('°').parse::<f64>())
        .collect();
    match angles {
        Ok(a) if !a.is_empty() && a.iter().all(|x| x.is_finite()) => Ok(a),
        _ => Err(format!("cannot parse layup `{text}`")),
    }
}
