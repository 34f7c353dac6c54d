//! Cross-ply validation grid: SSSS (0/90/90/0), a/h = 100, no cutout, under
//! either 0.1 % moisture or 325 K, for four mesh densities.
//!
//! Moduli are held at their baseline values; the environment acts through
//! the hygrothermal residual stress only. The published values are
//! reproduced under that reading.

use std::fmt;

use super::config::{CaseSpec, Mode};
use super::{run_case, RunSettings};
use crate::error::{Error, Result};
use crate::geometry::Cutout;
use crate::material::{Environment, MaterialTable, ModuliPolicy, PlyMaterial};
use crate::solver::{BoundaryCondition, EigenOptions};

pub const MESHES: [usize; 4] = [10, 20, 30, 40];

/// Environment label and state of the two columns.
pub const ENVIRONMENTS: [(&str, Environment); 2] = [
    (
        "C = 0.1 %",
        Environment {
            temperature: 300.0,
            moisture: 0.1,
        },
    ),
    (
        "T = 325 K",
        Environment {
            temperature: 325.0,
            moisture: 0.0,
        },
    ),
];

/// Published per-mesh results, `[mesh][environment]`.
pub const PUBLISHED_OMEGA: [[f64; 2]; 4] = [
    [9.6133, 8.2604],
    [9.4596, 8.0926],
    [9.4345, 8.0651],
    [9.4260, 8.0559],
];
pub const PUBLISHED_NBAR: [[f64; 2]; 4] = [
    [0.6158, 0.4571],
    [0.6100, 0.4488],
    [0.6090, 0.4475],
    [0.6087, 0.4393],
];

/// `(label, [Omega(C), Omega(T)], [Nbar(C), Nbar(T)])` of the independent solutions.
pub const REFERENCE_ROWS: [(&str, [f64; 2], [f64; 2]); 2] = [
    ("Ritz", [9.4110, 8.0680], [0.6091, 0.4477]),
    ("Q8", [9.3993, 8.0531], [0.6084, 0.4466]),
];

/// The 40 x 40, 325 K load entry disagrees with its own 30 x 30 entry and
/// with both independent solutions; it is printed but flagged.
pub const SUSPECT_ENTRY: (usize, Mode, usize) = (40, Mode::Buckling, 1);

#[derive(Debug, Clone, PartialEq)]
pub struct ValidationRow {
    pub mesh: usize,
    pub mode: Mode,
    pub environment: usize,
    pub value: f64,
    pub published: f64,
}

impl ValidationRow {
    pub fn deviation_percent(&self) -> f64 {
        100.0 * (self.value - self.published) / self.published
    }

    pub fn is_suspect(&self) -> bool {
        (self.mesh, self.mode, self.environment) == SUSPECT_ENTRY
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ValidationReport {
    pub rows: Vec<ValidationRow>,
}

impl ValidationReport {
    pub fn get(&self, mesh: usize, mode: Mode, environment: usize) -> Option<&ValidationRow> {
        self.rows
            .iter()
            .find(|r| r.mesh == mesh && r.mode == mode && r.environment == environment)
    }
}

pub fn validation_case(environment: Environment, mode: Mode) -> CaseSpec {
    CaseSpec {
        id: 0,
        a: 1.0,
        b: 1.0,
        h: 0.01,
        layup: "0/90/90/0".into(),
        angles: vec![0.0, 90.0, 90.0, 0.0],
        cutout: Cutout::None,
        environment,
        bc: BoundaryCondition::Ssss,
        mode,
    }
}

pub fn validation_settings(mesh: usize) -> RunSettings {
    RunSettings {
        mesh: (mesh, mesh),
        modes: 1,
        material: PlyMaterial::Table(MaterialTable::graphite_epoxy()),
        moduli: ModuliPolicy::Baseline,
        eigen: EigenOptions::default(),
        dump_fields: false,
    }
}

/// Run the full grid. Any solver error aborts with the failing case named.
pub fn run_validation(meshes: &[usize]) -> Result<ValidationReport> {
    let mut rows = Vec::new();
    for &mesh in meshes {
        let m = MESHES.iter().position(|&x| x == mesh);
        for mode in [Mode::Vibration, Mode::Buckling] {
            for (k, (label, env)) in ENVIRONMENTS.iter().enumerate() {
                let spec = validation_case(*env, mode);
                let values = run_case(&spec, &validation_settings(mesh)).map_err(|e| {
                    Error::NonConvergence(format!("validation case {mesh}x{mesh} {mode} {label}: {e}"))
                })?;
                let published = match (m, mode) {
                    (Some(i), Mode::Vibration) => PUBLISHED_OMEGA[i][k],
                    (Some(i), _) => PUBLISHED_NBAR[i][k],
                    (None, _) => f64::NAN,
                };
                rows.push(ValidationRow {
                    mesh,
                    mode,
                    environment: k,
                    value: values.nondim[0],
                    published,
                });
            }
        }
    }
    Ok(ValidationReport { rows })
}

impl fmt::Display for ValidationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "SSSS (0/90/90/0), a/h = 100, no cutout, baseline moduli")?;
        for (mode, title, refs) in [
            (Mode::Vibration, "Frequency Omega = omega a^2/h sqrt(rho/E2)", 0),
            (Mode::Buckling, "Critical load Nbar = N_cr / N_cr(intact, 300 K, 0 %)", 1),
        ] {
            writeln!(f)?;
            writeln!(f, "{title}")?;
            writeln!(
                f,
                "{:<8} | {:>9} {:>9} {:>7} | {:>9} {:>9} {:>7}",
                "mesh", "C=0.1%", "published", "dev %", "T=325K", "published", "dev %"
            )?;
            let mut meshes: Vec<usize> = self.rows.iter().filter(|r| r.mode == mode).map(|r| r.mesh).collect();
            meshes.dedup();
            for mesh in meshes {
                write!(f, "{:<8}", format!("{mesh}x{mesh}"))?;
                for k in 0..2 {
                    match self.get(mesh, mode, k) {
                        Some(r) => write!(
                            f,
                            " | {:>9.4} {:>9.4} {:>+7.2}{}",
                            r.value,
                            r.published,
                            r.deviation_percent(),
                            if r.is_suspect() { "*" } else { "" }
                        )?,
                        None => write!(f, " | {:>9} {:>9} {:>7}", "-", "-", "-")?,
                    }
                }
                writeln!(f)?;
            }
            for (label, omega, nbar) in REFERENCE_ROWS {
                let v = if refs == 0 { omega } else { nbar };
                writeln!(f, "{label:<8} | {:>9.4} {:>9} {:>7} | {:>9.4}", v[0], "", "", v[1])?;
            }
        }
        writeln!(f)?;
        writeln!(
            f,
            "* published 40x40 entry at 325 K is inconsistent with its 30x30 entry and both references"
        )
    }
}
