//! Heaviside enrichment of cut-element nodes.
//!
//! With `H` equal to the material indicator and integration restricted to
//! the material side, `N_J H` coincides with `N_J` wherever the element is
//! integrated. The enriched columns therefore duplicate the standard ones;
//! global assembly condenses them (see `solver::dofmap`), while these
//! element-level routines keep the explicit form.

use nalgebra::{DMatrix, Point2};

use super::{strain_operators, DOF_PER_NODE, ELEMENT_DOFS};
use crate::error::Result;
use crate::geometry::QuadPoint;
use crate::material::LaminateIntegrals;

/// Element dof layout: 20 standard dofs plus 5 per enriched node.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct DofLayout {
    pub enriched: [bool; 4],
}

impl DofLayout {
    pub fn standard() -> Self {
        Self { enriched: [false; 4] }
    }

    pub fn dof_count(&self) -> usize {
        ELEMENT_DOFS + DOF_PER_NODE * self.enriched.iter().filter(|&&e| e).count()
    }

    /// Column offset of the enriched block of local node `k`, if enriched.
    pub fn enriched_offset(&self, k: usize) -> Option<usize> {
        if !self.enriched[k] {
            return None;
        }
        let before = self.enriched[..k].iter().filter(|&&e| e).count();
        Some(ELEMENT_DOFS + DOF_PER_NODE * before)
    }
}

/// `u^h(x) = sum N_I u_I + sum_J N_J H(x) b_J` for the five nodal fields.
pub fn enriched_interpolation(
    n: &[f64; 4],
    standard: &[[f64; DOF_PER_NODE]; 4],
    enriched: &[Option<[f64; DOF_PER_NODE]>; 4],
    heaviside: f64,
) -> [f64; DOF_PER_NODE] {
    let mut out = [0.0; DOF_PER_NODE];
    for k in 0..4 {
        for f in 0..DOF_PER_NODE {
            out[f] += n[k] * standard[k][f];
            if let Some(b) = enriched[k] {
                out[f] += n[k] * heaviside * b[f];
            }
        }
    }
    out
}

/// Stiffness with explicit enriched columns; `heaviside` gives `H` at each point.
pub fn enriched_stiffness(
    li: &LaminateIntegrals,
    coords: &[Point2<f64>; 4],
    points: &[QuadPoint],
    layout: DofLayout,
    heaviside: impl Fn(&QuadPoint) -> f64,
) -> Result<DMatrix<f64>> {
    let ndof = layout.dof_count();
    let mut c = DMatrix::<f64>::zeros(8, 8);
    c.view_mut((0, 0), (3, 3)).copy_from(&li.a);
    c.view_mut((0, 3), (3, 3)).copy_from(&li.b);
    c.view_mut((3, 0), (3, 3)).copy_from(&li.b);
    c.view_mut((3, 3), (3, 3)).copy_from(&li.d);
    c.view_mut((6, 6), (2, 2)).copy_from(&li.a_s);
    let mut ke = DMatrix::<f64>::zeros(ndof, ndof);
    for q in points {
        let ops = strain_operators(coords, q.xi, q.eta)?;
        let h = heaviside(q);
        let mut b = DMatrix::<f64>::zeros(8, ndof);
        for row in 0..8 {
            for col in 0..ELEMENT_DOFS {
                let v = match row {
                    0..=2 => ops.b_p[(row, col)],
                    3..=5 => ops.b_b[(row - 3, col)],
                    _ => ops.b_s[(row - 6, col)],
                };
                b[(row, col)] = v;
                if let Some(off) = layout.enriched_offset(col / DOF_PER_NODE) {
                    b[(row, off + col % DOF_PER_NODE)] = h * v;
                }
            }
        }
        ke += b.transpose() * &c * &b * (q.weight * ops.det_j);
    }
    Ok(ke)
}
