//! Batch front end: configuration parsing, single runs, parametric sweeps,
//! CSV output, field dumps and the cross-ply validation report.

mod config;
mod validation;

pub use config::{CaseSpec, Mode, RunConfig, SweepPlan};
pub use validation::{run_validation, ValidationReport, ValidationRow, REFERENCE_ROWS};

use std::io::Write;
use std::path::{Path, PathBuf};

use rayon::prelude::*;

use crate::element::{U, V, W};
use crate::error::{Error, Result};
use crate::geometry::{build_mesh, write_vtk, Cutout, NodalVectors};
use crate::material::{LaminateStack, ModuliPolicy, PlyMaterial};
use crate::solver::{
    preload, solve_buckling, solve_vibration, CaseOptions, EigenOptions, NodalField, PlateModel,
};

/// Settings shared by every case of a run.
#[derive(Debug, Clone)]
pub struct RunSettings {
    pub mesh: (usize, usize),
    pub modes: usize,
    pub material: PlyMaterial,
    pub moduli: ModuliPolicy,
    pub eigen: EigenOptions,
    pub dump_fields: bool,
}

impl RunSettings {
    pub fn from_config(config: &RunConfig) -> Self {
        Self {
            mesh: config.mesh,
            modes: config.modes,
            material: config.material.clone(),
            moduli: config.moduli,
            eigen: EigenOptions::default(),
            dump_fields: false,
        }
    }
}

/// Values reported for one case: `raw` is `omega` (rad/s), the critical
/// edge load, or the peak static deflection; `nondim` is `Omega`, the
/// normalized load, or deflection over thickness.
#[derive(Debug, Clone, PartialEq)]
pub struct CaseValues {
    pub raw: Vec<f64>,
    pub nondim: Vec<f64>,
    /// Legacy VTK text when field dumps were requested.
    pub vtk: Option<String>,
}

#[derive(Debug)]
pub struct CaseOutcome {
    pub spec: CaseSpec,
    pub result: Result<CaseValues>,
}

fn dump(model: &PlateModel, fields: &[(String, &NodalField)]) -> String {
    let vectors: Vec<(String, Vec<[f64; 3]>)> = fields
        .iter()
        .map(|(name, f)| (name.clone(), f.iter().map(|n| [n[U], n[V], n[W]]).collect()))
        .collect();
    let refs: Vec<NodalVectors<'_>> = vectors
        .iter()
        .map(|(name, values)| NodalVectors { name, values })
        .collect();
    write_vtk(&model.mesh, &model.level_set, &model.classification, &refs)
}

pub fn run_case(spec: &CaseSpec, settings: &RunSettings) -> Result<CaseValues> {
    let mesh = build_mesh(spec.a, spec.b, settings.mesh.0, settings.mesh.1)?;
    let model = PlateModel::new(mesh, spec.cutout)?;
    let stack = LaminateStack::uniform(&spec.angles, spec.h, settings.material.clone())?;
    let opts = CaseOptions {
        environment: spec.environment,
        bc: spec.bc,
        moduli: settings.moduli,
        modes: settings.modes,
        eigen: settings.eigen,
    };
    match spec.mode {
        Mode::Vibration => {
            let r = solve_vibration(&model, &stack, &opts)?;
            let vtk = settings.dump_fields.then(|| {
                let named: Vec<(String, &NodalField)> = r
                    .modes
                    .iter()
                    .enumerate()
                    .map(|(k, m)| (format!("mode_{}", k + 1), m))
                    .collect();
                dump(&model, &named)
            });
            Ok(CaseValues {
                raw: r.omega,
                nondim: r.omega_nd,
                vtk,
            })
        }
        Mode::Buckling => {
            let r = solve_buckling(&model, &stack, &opts)?;
            let vtk = settings.dump_fields.then(|| {
                let named: Vec<(String, &NodalField)> = r
                    .modes
                    .iter()
                    .enumerate()
                    .map(|(k, m)| (format!("mode_{}", k + 1), m))
                    .collect();
                dump(&model, &named)
            });
            Ok(CaseValues {
                raw: r.lambda,
                nondim: r.lambda_nd,
                vtk,
            })
        }
        Mode::Static => {
            let pre = preload(&model, &stack, &opts)?;
            let field = model.dofs.nodal_values(&pre.displacement);
            let peak = field.iter().fold(0.0f64, |m, n| m.max(n[W].abs()));
            let vtk = settings
                .dump_fields
                .then(|| dump(&model, &[("displacement".to_string(), &field)]));
            Ok(CaseValues {
                raw: vec![peak],
                nondim: vec![peak / spec.h],
                vtk,
            })
        }
    }
}

/// Run every case on a pool of `workers` threads; outcomes keep plan order.
pub fn run_sweep(plan: &SweepPlan, settings: &RunSettings, workers: usize) -> Result<Vec<CaseOutcome>> {
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(workers.max(1))
        .build()
        .map_err(|e| Error::Config {
            line: 0,
            message: format!("cannot start {workers} workers: {e}"),
        })?;
    Ok(pool.install(|| {
        plan.cases
            .par_iter()
            .map(|spec| CaseOutcome {
                spec: spec.clone(),
                result: run_case(spec, settings),
            })
            .collect()
    }))
}

pub const CSV_COLUMNS: [&str; 20] = [
    "case_id", "a", "b", "h", "layup", "cutout", "cx", "cy", "r", "d", "e", "psi", "T", "C", "bc",
    "mode", "index", "raw", "nondim", "error",
];

fn cutout_columns(c: &Cutout) -> [String; 7] {
    let s = |x: f64| x.to_string();
    match *c {
        Cutout::None => ["none".into(), String::new(), String::new(), String::new(), String::new(), String::new(), String::new()],
        Cutout::Circle { center, radius } => [
            "circle".into(),
            s(center.x),
            s(center.y),
            s(radius),
            String::new(),
            String::new(),
            String::new(),
        ],
        Cutout::Ellipse {
            center,
            d,
            e,
            angle_deg,
        } => [
            "ellipse".into(),
            s(center.x),
            s(center.y),
            String::new(),
            s(d),
            s(e),
            s(angle_deg),
        ],
    }
}

/// Write outcomes as CSV. The first line is a `#` comment carrying the
/// generation time; everything after it depends only on the results.
pub fn write_csv<W: Write>(out: W, outcomes: &[CaseOutcome]) -> Result<()> {
    let mut out = out;
    let stamp = std::time::SystemTime::now()
        .duration_since(std::time::UNIX_EPOCH)
        .map_or(0, |d| d.as_secs());
    writeln!(out, "# hygroplate results, generated at unix time {stamp}")?;
    let mut w = csv::Writer::from_writer(out);
    w.write_record(CSV_COLUMNS)?;
    for o in outcomes {
        let s = &o.spec;
        let mut prefix: Vec<String> = vec![s.id.to_string(), s.a.to_string(), s.b.to_string(), s.h.to_string(), s.layup.clone()];
        prefix.extend(cutout_columns(&s.cutout));
        prefix.extend([
            s.environment.temperature.to_string(),
            s.environment.moisture.to_string(),
            s.bc.to_string(),
            s.mode.to_string(),
        ]);
        match &o.result {
            Ok(v) => {
                for (k, (raw, nd)) in v.raw.iter().zip(&v.nondim).enumerate() {
                    let mut row = prefix.clone();
                    row.extend([(k + 1).to_string(), raw.to_string(), nd.to_string(), String::new()]);
                    w.write_record(&row)?;
                }
            }
            Err(e) => {
                let mut row = prefix.clone();
                row.extend([String::new(), String::new(), String::new(), e.to_string()]);
                w.write_record(&row)?;
            }
        }
    }
    w.flush()?;
    Ok(())
}

/// Path of the field dump of case `id`, next to `output` when given.
pub fn dump_path(output: Option<&Path>, id: usize) -> PathBuf {
    let name = match output.and_then(|p| p.file_stem()) {
        Some(stem) => format!("{}_case{id:04}.vtk", stem.to_string_lossy()),
        None => format!("case{id:04}.vtk"),
    };
    match output.and_then(|p| p.parent()) {
        Some(dir) => dir.join(name),
        None => PathBuf::from(name),
    }
}

/// Process exit code for an error: 2 configuration/input, 3 solver, 4 instability.
pub fn exit_code(err: &Error) -> i32 {
    match err {
        Error::Config { .. }
        | Error::MaterialFile { .. }
        | Error::OutOfRange { .. }
        | Error::InvalidGeometry(_)
        | Error::InvalidMaterial(_) => 2,
        Error::Instability { .. } => 4,
        Error::SingularSystem(_) | Error::NoPositiveEigenvalue { .. } | Error::NonConvergence(_) => 3,
        Error::Io(_) | Error::Csv(_) => 1,
    }
}
