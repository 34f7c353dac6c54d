//! Global assembly, boundary conditions, static solves and stress recovery.
//!
//! Element matrices are evaluated in parallel and scattered serially, so
//! the result is independent of the worker count.

use nalgebra::Vector3;
use rayon::prelude::*;

use super::band::BandMatrix;
use super::dofmap::DofMap;
use crate::element::{
    element_geometric_stiffness, element_hygrothermal_load, element_mass, element_stiffness,
    point_resultants, ElementMatrix, ElementVector, BETA_X, BETA_Y, DOF_PER_NODE, ELEMENT_DOFS,
    U, V, W,
};
use crate::error::{Error, Result};
use crate::geometry::{
    classify_elements, quadrature_plan, triangulate_mesh, Cutout, ElementClassification,
    ElementPlan, LevelSetField, Mesh, QuadraturePlan,
};
use crate::material::LaminateIntegrals;

/// Mesh, cutout and everything derived from them that does not depend on
/// the material or the environment.
#[derive(Debug, Clone)]
pub struct PlateModel {
    pub mesh: Mesh,
    pub cutout: Cutout,
    pub level_set: LevelSetField,
    pub classification: ElementClassification,
    pub plan: QuadraturePlan,
    pub dofs: DofMap,
}

impl PlateModel {
    pub fn new(mesh: Mesh, cutout: Cutout) -> Result<Self> {
        let [x0, _, y0, _] = mesh.bounds;
        let shifted = match cutout {
            Cutout::None => Cutout::None,
            Cutout::Circle { center, radius } => Cutout::Circle {
                center: nalgebra::Point2::new(center.x - x0, center.y - y0),
                radius,
            },
            Cutout::Ellipse { center, d, e, angle_deg } => Cutout::Ellipse {
                center: nalgebra::Point2::new(center.x - x0, center.y - y0),
                d,
                e,
                angle_deg,
            },
        };
        shifted.validate(mesh.width(), mesh.height())?;
        let level_set = cutout.level_set(&mesh);
        let classification = classify_elements(&mesh, &level_set);
        let triangulation = triangulate_mesh(&mesh, &level_set, &classification);
        let plan = quadrature_plan(&classification, &triangulation);
        let dofs = DofMap::build(&mesh, &classification, &plan);
        if dofs.dof_count() == 0 {
            return Err(Error::InvalidGeometry("cutout removes the whole plate".into()));
        }
        Ok(Self {
            mesh,
            cutout,
            level_set,
            classification,
            plan,
            dofs,
        })
    }

    /// Integrated material area, `sum w |J|` over the stiffness rule.
    pub fn material_area(&self) -> f64 {
        (0..self.mesh.element_count())
            .map(|e| {
                let c = self.mesh.element_coords(e);
                self.plan.elements[e]
                    .points
                    .iter()
                    .map(|q| q.weight * crate::element::jacobian(&c, q.xi, q.eta).determinant())
                    .sum::<f64>()
            })
            .sum()
    }

    pub fn has_cut_elements(&self) -> bool {
        self.classification
            .kinds
            .iter()
            .any(|&k| k != crate::geometry::ElementKind::Standard)
    }
}

/// Assembled linear stiffness, consistent mass and hygrothermal load over
/// all active dofs (no constraints applied).
#[derive(Debug, Clone)]
pub struct GlobalSystem {
    pub k: BandMatrix,
    pub m: BandMatrix,
    pub f_t: Vec<f64>,
}

fn scatter_matrix(
    model: &PlateModel,
    matrices: Vec<Option<ElementMatrix>>,
) -> BandMatrix {
    let n = model.dofs.dof_count();
    let mut g = BandMatrix::zeros(n, model.dofs.half_bandwidth(&model.mesh));
    for (e, ke) in matrices.into_iter().enumerate() {
        let Some(ke) = ke else { continue };
        let ids = model.dofs.element_dofs(&model.mesh.elements[e]);
        for r in 0..ELEMENT_DOFS {
            let Some(i) = ids[r] else { continue };
            for c in 0..=r {
                let Some(j) = ids[c] else { continue };
                // (i, j) and (j, i) share one slot, so each local pair is added once.
                g.add(i, j, ke[(r, c)]);
            }
        }
    }
    g
}

fn scatter_vector(model: &PlateModel, vectors: Vec<Option<ElementVector>>) -> Vec<f64> {
    let mut f = vec![0.0; model.dofs.dof_count()];
    for (e, fe) in vectors.into_iter().enumerate() {
        let Some(fe) = fe else { continue };
        let ids = model.dofs.element_dofs(&model.mesh.elements[e]);
        for (r, id) in ids.iter().enumerate() {
            if let Some(i) = id {
                f[*i] += fe[r];
            }
        }
    }
    f
}

/// Evaluate `f` on every non-empty element in parallel.
fn per_element<T: Send>(
    model: &PlateModel,
    f: impl Fn(usize, &[nalgebra::Point2<f64>; 4], &ElementPlan) -> Result<T> + Sync,
) -> Result<Vec<Option<T>>> {
    (0..model.mesh.element_count())
        .into_par_iter()
        .map(|e| {
            let ep = &model.plan.elements[e];
            if ep.is_empty() {
                return Ok(None);
            }
            f(e, &model.mesh.element_coords(e), ep).map(Some)
        })
        .collect()
}

pub fn assemble_stiffness(model: &PlateModel, li: &LaminateIntegrals) -> Result<BandMatrix> {
    let ke = per_element(model, |_, c, ep| element_stiffness(li, c, &ep.points))?;
    Ok(scatter_matrix(model, ke))
}

pub fn assemble_mass(model: &PlateModel, li: &LaminateIntegrals) -> Result<BandMatrix> {
    let me = per_element(model, |_, c, ep| element_mass(li.p, li.i, c, &ep.mass_points()))?;
    Ok(scatter_matrix(model, me))
}

pub fn assemble_hygrothermal_load(model: &PlateModel, li: &LaminateIntegrals) -> Result<Vec<f64>> {
    let fe = per_element(model, |_, c, ep| {
        element_hygrothermal_load(&li.n_hygro, &li.m_hygro, c, &ep.points)
    })?;
    Ok(scatter_vector(model, fe))
}

pub fn assemble_system(model: &PlateModel, li: &LaminateIntegrals) -> Result<GlobalSystem> {
    Ok(GlobalSystem {
        k: assemble_stiffness(model, li)?,
        m: assemble_mass(model, li)?,
        f_t: assemble_hygrothermal_load(model, li)?,
    })
}

/// In-plane resultants `(N_xx, N_yy, N_xy)` at every stiffness point of every element.
pub type ResultantField = Vec<Vec<Vector3<f64>>>;

/// Uniform resultant at every integration point.
pub fn uniform_resultants(model: &PlateModel, n: Vector3<f64>) -> ResultantField {
    model
        .plan
        .elements
        .iter()
        .map(|ep| vec![n; ep.points.len()])
        .collect()
}

/// `A eps_p + B eps_b - N_hygro` from a displacement over all active dofs.
pub fn recover_resultants(
    model: &PlateModel,
    li: &LaminateIntegrals,
    displacement: &[f64],
) -> Result<ResultantField> {
    let out = per_element(model, |e, c, ep| {
        let ids = model.dofs.element_dofs(&model.mesh.elements[e]);
        let ue = ElementVector::from_fn(|r, _| ids[r].map_or(0.0, |i| displacement[i]));
        ep.points
            .iter()
            .map(|q| point_resultants(li, c, q, &ue))
            .collect::<Result<Vec<_>>>()
    })?;
    Ok(out.into_iter().map(Option::unwrap_or_default).collect())
}

/// `K_sigma(N) = sum G_w^T [N] G_w`, the initial-stress stiffness of a resultant field.
pub fn assemble_stress_stiffness(model: &PlateModel, field: &ResultantField) -> Result<BandMatrix> {
    let kg = per_element(model, |e, c, ep| element_geometric_stiffness(c, &ep.points, &field[e]))?;
    Ok(scatter_matrix(model, kg))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum BoundaryCondition {
    /// Simply supported on all edges.
    #[default]
    Ssss,
    /// Clamped on all edges.
    Cccc,
    /// No constraints (used for checks of the unconstrained operators).
    Free,
}

impl std::str::FromStr for BoundaryCondition {
    type Err = String;
    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s.trim().to_ascii_uppercase().as_str() {
            "SSSS" => Ok(Self::Ssss),
            "CCCC" => Ok(Self::Cccc),
            "FREE" => Ok(Self::Free),
            other => Err(format!("unknown boundary condition `{other}` (expected SSSS or CCCC)")),
        }
    }
}

impl std::fmt::Display for BoundaryCondition {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Self::Ssss => "SSSS",
            Self::Cccc => "CCCC",
            Self::Free => "FREE",
        })
    }
}

impl BoundaryCondition {
    /// Fields fixed at `node`.
    pub fn fixed_fields(&self, mesh: &Mesh, node: usize) -> [bool; DOF_PER_NODE] {
        let mut fixed = [false; DOF_PER_NODE];
        let (on_x, on_y) = (mesh.on_x_edge(node), mesh.on_y_edge(node));
        match self {
            Self::Free => {}
            Self::Cccc => {
                if on_x || on_y {
                    fixed = [true; DOF_PER_NODE];
                }
            }
            Self::Ssss => {
                if on_x {
                    for f in [U, W, BETA_Y] {
                        fixed[f] = true;
                    }
                }
                if on_y {
                    for f in [V, W, BETA_X] {
                        fixed[f] = true;
                    }
                }
            }
        }
        fixed
    }
}

/// `keep[i]` is false for constrained dofs.
pub fn free_dof_mask(model: &PlateModel, bc: BoundaryCondition) -> Vec<bool> {
    let mut keep = vec![true; model.dofs.dof_count()];
    for node in 0..model.mesh.node_count() {
        let fixed = bc.fixed_fields(&model.mesh, node);
        for (f, &fx) in fixed.iter().enumerate() {
            if fx {
                if let Some(i) = model.dofs.node_dof(node, f) {
                    keep[i] = false;
                }
            }
        }
    }
    keep
}

/// Constrained system obtained by deleting the rows and columns of fixed dofs.
#[derive(Debug, Clone)]
pub struct ConstrainedSystem {
    pub k: BandMatrix,
    pub m: BandMatrix,
    pub f_t: Vec<f64>,
    pub keep: Vec<bool>,
}

pub fn apply_boundary_conditions(
    model: &PlateModel,
    system: &GlobalSystem,
    bc: BoundaryCondition,
) -> ConstrainedSystem {
    let keep = free_dof_mask(model, bc);
    ConstrainedSystem {
        k: system.k.restrict(&keep),
        m: system.m.restrict(&keep),
        f_t: restrict_vector(&system.f_t, &keep),
        keep,
    }
}

pub fn restrict_vector(x: &[f64], keep: &[bool]) -> Vec<f64> {
    x.iter().zip(keep).filter(|(_, &k)| k).map(|(&v, _)| v).collect()
}

/// Scatter a reduced vector back to all active dofs, zero at fixed dofs.
pub fn expand_vector(x: &[f64], keep: &[bool]) -> Vec<f64> {
    let mut out = vec![0.0; keep.len()];
    let mut it = x.iter();
    for (o, &k) in out.iter_mut().zip(keep) {
        if k {
            *o = *it.next().expect("reduced vector shorter than mask");
        }
    }
    out
}

/// Solve `K x = f` by banded Cholesky with one step of iterative refinement,
/// checking `|K x - f| <= 1e-10 |f|`.
pub fn static_solve(k: &BandMatrix, f: &[f64]) -> Result<Vec<f64>> {
    let fnorm = norm(f);
    if fnorm == 0.0 {
        return Ok(vec![0.0; f.len()]);
    }
    let chol = k.cholesky()?;
    let mut x = chol.solve(f);
    for _ in 0..2 {
        let r: Vec<f64> = k.mul_vec(&x).iter().zip(f).map(|(a, b)| b - a).collect();
        if norm(&r) <= 1e-12 * fnorm {
            break;
        }
        let dx = chol.solve(&r);
        x.iter_mut().zip(&dx).for_each(|(a, d)| *a += d);
    }
    let r: Vec<f64> = k.mul_vec(&x).iter().zip(f).map(|(a, b)| b - a).collect();
    let rel = norm(&r) / fnorm;
    if !(rel <= 1e-10) {
        return Err(Error::SingularSystem(format!(
            "static residual {rel:e} exceeds 1e-10"
        )));
    }
    Ok(x)
}

pub(crate) fn norm(x: &[f64]) -> f64 {
    x.iter().map(|v| v * v).sum::<f64>().sqrt()
}

/// Consistent nodal forces of a uniform normal traction `p` (force per
/// length, positive in `+x`) on the left edge and `-p` on the right edge.
pub fn edge_compression_load(model: &PlateModel, p: f64) -> Vec<f64> {
    let mesh = &model.mesh;
    let mut f = vec![0.0; model.dofs.dof_count()];
    for (right, sign) in [(false, 1.0), (true, -1.0)] {
        let mut nodes = mesh.x_edge_nodes(right);
        nodes.sort_by(|&a, &b| mesh.nodes[a].y.total_cmp(&mesh.nodes[b].y));
        for pair in nodes.windows(2) {
            let len = (mesh.nodes[pair[1]] - mesh.nodes[pair[0]]).norm();
            for &n in pair {
                if let Some(i) = model.dofs.node_dof(n, U) {
                    f[i] += sign * p * 0.5 * len;
                }
            }
        }
    }
    f
}
