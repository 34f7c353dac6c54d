//! Free vibration and buckling of a hygrothermally preloaded plate.
//!
//! Both analyses start from the same preload: the linear static response
//! `K delta = f_T` to the free hygrothermal strains, the residual
//! resultants `N_res = A eps_p + B eps_b - N_hygro`, and the initial-stress
//! matrix `K_R = K_sigma(N_res)`. The preloaded stiffness `K + K_R` must be
//! positive definite; otherwise the plate has already buckled and an
//! instability error reports the lowest `omega^2`.

use nalgebra::Vector3;

use super::assembly::{
    apply_boundary_conditions, assemble_stiffness, assemble_stress_stiffness, assemble_system,
    edge_compression_load, expand_vector, recover_resultants, restrict_vector,
    static_solve, uniform_resultants, BoundaryCondition, ConstrainedSystem, PlateModel,
    ResultantField,
};
use super::band::BandMatrix;
use super::eigen::{
    generalized_symmetric_eig, largest_pencil_factored, pencil_residual, EigenOptions,
};
use crate::element::{BETA_X, BETA_Y, DOF_PER_NODE, U, V, W};
use crate::error::{Error, Result};
use crate::geometry::Cutout;
use crate::material::{Environment, LaminateIntegrals, LaminateStack, ModuliPolicy};

/// Residual tolerance every reported eigenpair must meet.
pub const EIGEN_RESIDUAL_TOLERANCE: f64 = 1e-8;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CaseOptions {
    pub environment: Environment,
    pub bc: BoundaryCondition,
    pub moduli: ModuliPolicy,
    /// Number of eigenpairs to report.
    pub modes: usize,
    pub eigen: EigenOptions,
}

impl Default for CaseOptions {
    fn default() -> Self {
        Self {
            environment: Environment::BASELINE,
            bc: BoundaryCondition::Ssss,
            moduli: ModuliPolicy::EnvironmentDependent,
            modes: 1,
            eigen: EigenOptions::default(),
        }
    }
}

/// Per-node `[u, v, w, beta_x, beta_y]`.
pub type NodalField = Vec<[f64; DOF_PER_NODE]>;

/// Constrained operators of the preloaded plate.
#[derive(Debug, Clone)]
pub struct Preload {
    pub integrals: LaminateIntegrals,
    pub system: ConstrainedSystem,
    /// `K + K_R` on the free dofs.
    pub stiffness: BandMatrix,
    /// Static hygrothermal displacement over all active dofs.
    pub displacement: Vec<f64>,
    pub residual_resultants: ResultantField,
}

pub fn preload(model: &PlateModel, stack: &LaminateStack, opts: &CaseOptions) -> Result<Preload> {
    let li = stack.integrals(opts.environment, opts.moduli)?;
    let global = assemble_system(model, &li)?;
    let system = apply_boundary_conditions(model, &global, opts.bc);
    let loaded = system.f_t.iter().any(|&f| f != 0.0)
        || li.n_hygro.iter().chain(li.m_hygro.iter()).any(|&x| x != 0.0);
    let (displacement, residual_resultants, stiffness) = if loaded {
        let reduced = static_solve(&system.k, &system.f_t)?;
        let full = expand_vector(&reduced, &system.keep);
        let res = recover_resultants(model, &li, &full)?;
        let kr = assemble_stress_stiffness(model, &res)?.restrict(&system.keep);
        (full, res, system.k.add_scaled(&kr, 1.0))
    } else {
        (
            vec![0.0; model.dofs.dof_count()],
            uniform_resultants(model, Vector3::zeros()),
            system.k.clone(),
        )
    };
    Ok(Preload {
        integrals: li,
        system,
        stiffness,
        displacement,
        residual_resultants,
    })
}

/// Explain a failed factorization of `K + K_R`.
fn diagnose_indefinite(s: &BandMatrix, m: &BandMatrix, eigen: &EigenOptions, cause: Error) -> Error {
    match generalized_symmetric_eig(s, m, 1, eigen) {
        Ok(p) if p.values.first().is_some_and(|&v| v < 0.0) => Error::Instability {
            eigenvalue: p.values[0],
        },
        Ok(p) => match p.values.first() {
            Some(v) => Error::SingularSystem(format!(
                "K + K_R is singular (lowest omega^2 = {v:.6e}); check the boundary conditions"
            )),
            None => cause,
        },
        Err(_) => cause,
    }
}

fn normalized_mode(model: &PlateModel, keep: &[bool], v: &[f64]) -> NodalField {
    let mut field = model.dofs.nodal_values(&expand_vector(v, keep));
    let (mut big, mut sign) = (0.0f64, 1.0);
    for n in &field {
        if n[W].abs() > big {
            big = n[W].abs();
            sign = n[W].signum();
        }
    }
    if big == 0.0 {
        big = field.iter().flatten().fold(0.0f64, |m, x| m.max(x.abs()));
    }
    if big > 0.0 {
        for n in &mut field {
            n.iter_mut().for_each(|x| *x *= sign / big);
        }
    }
    field
}

#[derive(Debug, Clone)]
pub struct VibrationResult {
    /// `omega^2` in ascending order.
    pub omega_squared: Vec<f64>,
    pub omega: Vec<f64>,
    /// `Omega = omega a^2 / h sqrt(rho / E2)` with baseline reference properties.
    pub omega_nd: Vec<f64>,
    pub modes: Vec<NodalField>,
    pub residuals: Vec<f64>,
}

pub fn solve_vibration(
    model: &PlateModel,
    stack: &LaminateStack,
    opts: &CaseOptions,
) -> Result<VibrationResult> {
    let pre = preload(model, stack, opts)?;
    let m = &pre.system.m;
    let chol = match pre.stiffness.cholesky() {
        Ok(c) => c,
        Err(e) => return Err(diagnose_indefinite(&pre.stiffness, m, &opts.eigen, e)),
    };
    let pairs = largest_pencil_factored(m, &chol, opts.modes, &opts.eigen)?;
    let reference = stack.reference_properties();
    let scale = model.mesh.width().powi(2) / stack.thickness() * (reference.rho / reference.e2).sqrt();
    let mut out = VibrationResult {
        omega_squared: Vec::new(),
        omega: Vec::new(),
        omega_nd: Vec::new(),
        modes: Vec::new(),
        residuals: Vec::new(),
    };
    for (mu, v) in pairs.values.iter().zip(&pairs.vectors) {
        if !(*mu > 0.0) {
            return Err(Error::NonConvergence(format!(
                "non-positive mass eigenvalue {mu:e}"
            )));
        }
        let w2 = 1.0 / mu;
        let r = pencil_residual(&pre.stiffness, m, w2, v);
        if !(r <= EIGEN_RESIDUAL_TOLERANCE) {
            return Err(Error::NonConvergence(format!(
                "vibration eigenpair residual {r:e} exceeds {EIGEN_RESIDUAL_TOLERANCE:e}"
            )));
        }
        out.omega_squared.push(w2);
        out.omega.push(w2.sqrt());
        out.omega_nd.push(w2.sqrt() * scale);
        out.modes.push(normalized_mode(model, &pre.system.keep, v));
        out.residuals.push(r);
    }
    Ok(out)
}

/// In-plane state under unit compressive edge traction on `x = x_min` and
/// `x = x_max`. Without cut elements this is the uniform field
/// `(-1, 0, 0)`; otherwise it comes from a linear static solve with the
/// bending dofs supported as in `bc` and the in-plane rigid motion removed
/// at two corners.
pub fn unit_compression_field(
    model: &PlateModel,
    li: &LaminateIntegrals,
    bc: BoundaryCondition,
) -> Result<ResultantField> {
    if !model.has_cut_elements() {
        return Ok(uniform_resultants(model, Vector3::new(-1.0, 0.0, 0.0)));
    }
    let mesh = &model.mesh;
    let mut keep = vec![true; model.dofs.dof_count()];
    for node in 0..mesh.node_count() {
        let fixed = bc.fixed_fields(mesh, node);
        for f in [W, BETA_X, BETA_Y] {
            if fixed[f] {
                if let Some(i) = model.dofs.node_dof(node, f) {
                    keep[i] = false;
                }
            }
        }
    }
    let nearest = |x: f64, y: f64| {
        (0..mesh.node_count())
            .filter(|&n| model.dofs.is_active(n))
            .min_by(|&a, &b| {
                let da = (mesh.nodes[a].x - x).hypot(mesh.nodes[a].y - y);
                let db = (mesh.nodes[b].x - x).hypot(mesh.nodes[b].y - y);
                da.total_cmp(&db)
            })
            .expect("model has active nodes")
    };
    let [x0, x1, y0, _] = mesh.bounds;
    let (origin, far) = (nearest(x0, y0), nearest(x1, y0));
    for (node, fields) in [(origin, &[U, V][..]), (far, &[V][..])] {
        for &f in fields {
            if let Some(i) = model.dofs.node_dof(node, f) {
                keep[i] = false;
            }
        }
    }
    let mechanical = LaminateIntegrals {
        n_hygro: Vector3::zeros(),
        m_hygro: Vector3::zeros(),
        ..*li
    };
    let k = assemble_stiffness(model, &mechanical)?.restrict(&keep);
    let f = restrict_vector(&edge_compression_load(model, 1.0), &keep);
    let u = expand_vector(&static_solve(&k, &f)?, &keep);
    recover_resultants(model, &mechanical, &u)
}

#[derive(Debug, Clone)]
pub struct BucklingResult {
    /// Critical edge loads per unit length, ascending.
    pub lambda: Vec<f64>,
    /// Critical load of the same plate with no cutout at the reference environment.
    pub reference: f64,
    /// `lambda / reference`.
    pub lambda_nd: Vec<f64>,
    pub modes: Vec<NodalField>,
    pub residuals: Vec<f64>,
}

/// Positive critical loads of `(K + K_R) v = lambda K_G v`, ascending.
pub fn buckling_loads(
    model: &PlateModel,
    stack: &LaminateStack,
    opts: &CaseOptions,
) -> Result<(Vec<f64>, Vec<NodalField>, Vec<f64>)> {
    let pre = preload(model, stack, opts)?;
    let chol = match pre.stiffness.cholesky() {
        Ok(c) => c,
        Err(e) => {
            return Err(diagnose_indefinite(&pre.stiffness, &pre.system.m, &opts.eigen, e));
        }
    };
    let field = unit_compression_field(model, &pre.integrals, opts.bc)?;
    let kg = assemble_stress_stiffness(model, &field)?
        .restrict(&pre.system.keep)
        .scaled(-1.0);
    let pairs = largest_pencil_factored(&kg, &chol, opts.modes, &opts.eigen)?;
    let mut lambda = Vec::new();
    let mut modes = Vec::new();
    let mut residuals = Vec::new();
    for (mu, v) in pairs.values.iter().zip(&pairs.vectors) {
        if !(*mu > 0.0) {
            continue;
        }
        let l = 1.0 / mu;
        let r = pencil_residual(&pre.stiffness, &kg, l, v);
        if !(r <= EIGEN_RESIDUAL_TOLERANCE) {
            return Err(Error::NonConvergence(format!(
                "buckling eigenpair residual {r:e} exceeds {EIGEN_RESIDUAL_TOLERANCE:e}"
            )));
        }
        lambda.push(l);
        modes.push(normalized_mode(model, &pre.system.keep, v));
        residuals.push(r);
    }
    if lambda.is_empty() {
        return Err(Error::NoPositiveEigenvalue {
            requested: opts.modes,
        });
    }
    Ok((lambda, modes, residuals))
}

/// Critical load of the intact plate at the reference environment.
pub fn buckling_reference(
    model: &PlateModel,
    stack: &LaminateStack,
    opts: &CaseOptions,
) -> Result<f64> {
    let intact = PlateModel::new(model.mesh.clone(), Cutout::None)?;
    let ref_opts = CaseOptions {
        environment: Environment::BASELINE,
        modes: 1,
        ..*opts
    };
    Ok(buckling_loads(&intact, stack, &ref_opts)?.0[0])
}

pub fn solve_buckling(
    model: &PlateModel,
    stack: &LaminateStack,
    opts: &CaseOptions,
) -> Result<BucklingResult> {
    let reference = buckling_reference(model, stack, opts)?;
    solve_buckling_with_reference(model, stack, opts, reference)
}

pub fn solve_buckling_with_reference(
    model: &PlateModel,
    stack: &LaminateStack,
    opts: &CaseOptions,
    reference: f64,
) -> Result<BucklingResult> {
    let (lambda, modes, residuals) = buckling_loads(model, stack, opts)?;
    Ok(BucklingResult {
        lambda_nd: lambda.iter().map(|l| l / reference).collect(),
        lambda,
        reference,
        modes,
        residuals,
    })
}
