//! Four-node shear-flexible plate element.
//!
//! Each node carries `(u0, v0, w0, beta_x, beta_y)`. Membrane and bending
//! strains use the bilinear interpolation directly; transverse shear uses an
//! assumed natural strain field: covariant shear strains are sampled at the
//! edge midpoints and interpolated linearly across the element, so the shear
//! field carries the same polynomial content as the deflection gradient.
//!
//! Integration is driven by an [`ElementPlan`](crate::geometry::ElementPlan):
//! cut elements integrate their material subtriangles only.

mod enrichment;

pub use enrichment::{enriched_interpolation, enriched_stiffness, DofLayout};

use nalgebra::{Matrix2, Point2, SMatrix, SVector, Vector2, Vector3};

use crate::error::{Error, Result};
use crate::geometry::QuadPoint;
use crate::material::LaminateIntegrals;

pub const DOF_PER_NODE: usize = 5;
pub const ELEMENT_DOFS: usize = 4 * DOF_PER_NODE;

/// Local field indices within a node block.
pub const U: usize = 0;
pub const V: usize = 1;
pub const W: usize = 2;
pub const BETA_X: usize = 3;
pub const BETA_Y: usize = 4;

pub type ElementMatrix = SMatrix<f64, ELEMENT_DOFS, ELEMENT_DOFS>;
pub type ElementVector = SVector<f64, ELEMENT_DOFS>;
pub type StrainOperator<const R: usize> = SMatrix<f64, R, ELEMENT_DOFS>;

const NODE_XI: [f64; 4] = [-1.0, 1.0, 1.0, -1.0];
const NODE_ETA: [f64; 4] = [-1.0, -1.0, 1.0, 1.0];

/// Bilinear shape functions and their parent-space gradients `(dN/dxi, dN/deta)`.
pub fn shape_functions(xi: f64, eta: f64) -> ([f64; 4], [[f64; 2]; 4]) {
    let mut n = [0.0; 4];
    let mut dn = [[0.0; 2]; 4];
    for k in 0..4 {
        let (a, b) = (NODE_XI[k], NODE_ETA[k]);
        n[k] = 0.25 * (1.0 + a * xi) * (1.0 + b * eta);
        dn[k] = [0.25 * a * (1.0 + b * eta), 0.25 * b * (1.0 + a * xi)];
    }
    (n, dn)
}

/// `J = [[x_xi, y_xi], [x_eta, y_eta]]`.
pub fn jacobian(coords: &[Point2<f64>; 4], xi: f64, eta: f64) -> Matrix2<f64> {
    let (_, dn) = shape_functions(xi, eta);
    let mut j = Matrix2::zeros();
    for k in 0..4 {
        j[(0, 0)] += dn[k][0] * coords[k].x;
        j[(0, 1)] += dn[k][0] * coords[k].y;
        j[(1, 0)] += dn[k][1] * coords[k].x;
        j[(1, 1)] += dn[k][1] * coords[k].y;
    }
    j
}

fn inverse_jacobian(coords: &[Point2<f64>; 4], xi: f64, eta: f64) -> Result<(Matrix2<f64>, f64)> {
    let j = jacobian(coords, xi, eta);
    let det = j.determinant();
    if !(det > 0.0) {
        return Err(Error::InvalidGeometry(format!(
            "non-positive Jacobian {det:e} at ({xi}, {eta})"
        )));
    }
    let inv = Matrix2::new(j[(1, 1)], -j[(0, 1)], -j[(1, 0)], j[(0, 0)]) / det;
    Ok((inv, det))
}

/// Strain-displacement operators at one parent-space point.
#[derive(Debug, Clone)]
pub struct PointOperators {
    pub n: [f64; 4],
    pub b_p: StrainOperator<3>,
    pub b_b: StrainOperator<3>,
    pub b_s: StrainOperator<2>,
    /// Gradient of `w0`: rows `w_{,x}`, `w_{,y}`.
    pub g_w: StrainOperator<2>,
    pub det_j: f64,
}

/// Covariant transverse shear row along `tangent`, i.e. `w_{,s} + beta . x_{,s}`.
fn covariant_shear(coords: &[Point2<f64>; 4], xi: f64, eta: f64, dir: usize) -> StrainOperator<1> {
    let (n, dn) = shape_functions(xi, eta);
    let j = jacobian(coords, xi, eta);
    let (xs, ys) = (j[(dir, 0)], j[(dir, 1)]);
    let mut row = StrainOperator::<1>::zeros();
    for k in 0..4 {
        let c = DOF_PER_NODE * k;
        row[c + W] = dn[k][dir];
        row[c + BETA_X] = n[k] * xs;
        row[c + BETA_Y] = n[k] * ys;
    }
    row
}

/// Assumed-strain transverse shear operator `[gamma_xz; gamma_yz]`.
pub fn field_consistent_shear_b(
    coords: &[Point2<f64>; 4],
    xi: f64,
    eta: f64,
) -> Result<StrainOperator<2>> {
    let (jinv, _) = inverse_jacobian(coords, xi, eta)?;
    let e_xi_a = covariant_shear(coords, 0.0, -1.0, 0);
    let e_xi_c = covariant_shear(coords, 0.0, 1.0, 0);
    let e_eta_d = covariant_shear(coords, -1.0, 0.0, 1);
    let e_eta_b = covariant_shear(coords, 1.0, 0.0, 1);
    let e_xi = e_xi_a * (0.5 * (1.0 - eta)) + e_xi_c * (0.5 * (1.0 + eta));
    let e_eta = e_eta_d * (0.5 * (1.0 - xi)) + e_eta_b * (0.5 * (1.0 + xi));
    let mut covariant = StrainOperator::<2>::zeros();
    covariant.row_mut(0).copy_from(&e_xi);
    covariant.row_mut(1).copy_from(&e_eta);
    Ok(jinv * covariant)
}

pub fn strain_operators(coords: &[Point2<f64>; 4], xi: f64, eta: f64) -> Result<PointOperators> {
    let (n, dn) = shape_functions(xi, eta);
    let (jinv, det_j) = inverse_jacobian(coords, xi, eta)?;
    let mut b_p = StrainOperator::<3>::zeros();
    let mut b_b = StrainOperator::<3>::zeros();
    let mut g_w = StrainOperator::<2>::zeros();
    for k in 0..4 {
        let g = jinv * Vector2::new(dn[k][0], dn[k][1]);
        let (nx, ny) = (g[0], g[1]);
        let c = DOF_PER_NODE * k;
        b_p[(0, c + U)] = nx;
        b_p[(1, c + V)] = ny;
        b_p[(2, c + U)] = ny;
        b_p[(2, c + V)] = nx;
        b_b[(0, c + BETA_X)] = nx;
        b_b[(1, c + BETA_Y)] = ny;
        b_b[(2, c + BETA_X)] = ny;
        b_b[(2, c + BETA_Y)] = nx;
        g_w[(0, c + W)] = nx;
        g_w[(1, c + W)] = ny;
    }
    Ok(PointOperators {
        n,
        b_p,
        b_b,
        b_s: field_consistent_shear_b(coords, xi, eta)?,
        g_w,
        det_j,
    })
}

/// Generalized constitutive matrix relating `(eps_p, eps_b, eps_s)` to `(N, M, Q)`.
fn section_matrix(li: &LaminateIntegrals) -> SMatrix<f64, 8, 8> {
    let mut c = SMatrix::<f64, 8, 8>::zeros();
    c.fixed_view_mut::<3, 3>(0, 0).copy_from(&li.a);
    c.fixed_view_mut::<3, 3>(0, 3).copy_from(&li.b);
    c.fixed_view_mut::<3, 3>(3, 0).copy_from(&li.b);
    c.fixed_view_mut::<3, 3>(3, 3).copy_from(&li.d);
    c.fixed_view_mut::<2, 2>(6, 6).copy_from(&li.a_s);
    c
}

fn generalized_operator(ops: &PointOperators) -> StrainOperator<8> {
    let mut b = StrainOperator::<8>::zeros();
    b.fixed_view_mut::<3, ELEMENT_DOFS>(0, 0).copy_from(&ops.b_p);
    b.fixed_view_mut::<3, ELEMENT_DOFS>(3, 0).copy_from(&ops.b_b);
    b.fixed_view_mut::<2, ELEMENT_DOFS>(6, 0).copy_from(&ops.b_s);
    b
}

/// Linear stiffness `sum w |J| B^T C B` over the plan's points.
pub fn element_stiffness(
    li: &LaminateIntegrals,
    coords: &[Point2<f64>; 4],
    points: &[QuadPoint],
) -> Result<ElementMatrix> {
    let c = section_matrix(li);
    let mut ke = ElementMatrix::zeros();
    for q in points {
        let ops = strain_operators(coords, q.xi, q.eta)?;
        let b = generalized_operator(&ops);
        ke += b.transpose() * (c * b) * (q.weight * ops.det_j);
    }
    Ok(ke)
}

/// Interpolation matrix mapping element dofs to the five nodal fields.
fn field_interpolation(n: &[f64; 4]) -> SMatrix<f64, DOF_PER_NODE, ELEMENT_DOFS> {
    let mut nm = SMatrix::<f64, DOF_PER_NODE, ELEMENT_DOFS>::zeros();
    for k in 0..4 {
        for f in 0..DOF_PER_NODE {
            nm[(f, DOF_PER_NODE * k + f)] = n[k];
        }
    }
    nm
}

/// Consistent mass with translational inertia `p` and rotary inertia `i`.
pub fn element_mass(
    p: f64,
    i: f64,
    coords: &[Point2<f64>; 4],
    points: &[QuadPoint],
) -> Result<ElementMatrix> {
    let inertia = SVector::<f64, DOF_PER_NODE>::from([p, p, p, i, i]);
    let mut me = ElementMatrix::zeros();
    for q in points {
        let (n, _) = shape_functions(q.xi, q.eta);
        let (_, det) = inverse_jacobian(coords, q.xi, q.eta)?;
        let nm = field_interpolation(&n);
        let weighted = SMatrix::<f64, DOF_PER_NODE, ELEMENT_DOFS>::from_fn(|r, c| nm[(r, c)] * inertia[r]);
        me += nm.transpose() * weighted * (q.weight * det);
    }
    Ok(me)
}

/// Geometric stiffness `sum w |J| G_w^T [N] G_w` for in-plane resultants
/// `(N_xx, N_yy, N_xy)` given per integration point.
pub fn element_geometric_stiffness(
    coords: &[Point2<f64>; 4],
    points: &[QuadPoint],
    resultants: &[Vector3<f64>],
) -> Result<ElementMatrix> {
    debug_assert_eq!(points.len(), resultants.len());
    let mut kg = ElementMatrix::zeros();
    for (q, n) in points.iter().zip(resultants) {
        if n.iter().all(|&x| x == 0.0) {
            continue;
        }
        let ops = strain_operators(coords, q.xi, q.eta)?;
        let s = Matrix2::new(n[0], n[2], n[2], n[1]);
        kg += ops.g_w.transpose() * (s * ops.g_w) * (q.weight * ops.det_j);
    }
    Ok(kg)
}

/// Equivalent nodal load of the hygrothermal stress resultants.
pub fn element_hygrothermal_load(
    n_hygro: &Vector3<f64>,
    m_hygro: &Vector3<f64>,
    coords: &[Point2<f64>; 4],
    points: &[QuadPoint],
) -> Result<ElementVector> {
    let mut f = ElementVector::zeros();
    if n_hygro.iter().chain(m_hygro.iter()).all(|&x| x == 0.0) {
        return Ok(f);
    }
    for q in points {
        let ops = strain_operators(coords, q.xi, q.eta)?;
        f += (ops.b_p.transpose() * n_hygro + ops.b_b.transpose() * m_hygro) * (q.weight * ops.det_j);
    }
    Ok(f)
}

/// Mechanical-minus-hygrothermal in-plane resultants `A eps_p + B eps_b - N_hygro`.
pub fn point_resultants(
    li: &LaminateIntegrals,
    coords: &[Point2<f64>; 4],
    q: &QuadPoint,
    displacement: &ElementVector,
) -> Result<Vector3<f64>> {
    let ops = strain_operators(coords, q.xi, q.eta)?;
    let eps_p = ops.b_p * displacement;
    let eps_b = ops.b_b * displacement;
    Ok(li.a * eps_p + li.b * eps_b - li.n_hygro)
}

/// Bending moments `B eps_p + D eps_b - M_hygro`.
pub fn point_moments(
    li: &LaminateIntegrals,
    coords: &[Point2<f64>; 4],
    q: &QuadPoint,
    displacement: &ElementVector,
) -> Result<Vector3<f64>> {
    let ops = strain_operators(coords, q.xi, q.eta)?;
    Ok(li.b * (ops.b_p * displacement) + li.d * (ops.b_b * displacement) - li.m_hygro)
}
