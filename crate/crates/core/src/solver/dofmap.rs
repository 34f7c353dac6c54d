//! Global dof numbering.
//!
//! Nodes whose incident elements are all empty (void, or cut with no
//! material subtriangle left) carry no stiffness and are dropped. Enriched
//! nodes are recorded, but because the enrichment function equals the
//! material indicator and integration is restricted to material, the
//! enriched dofs duplicate the standard ones exactly on the integrated
//! domain; they are condensed into the standard dofs rather than numbered
//! separately.

use crate::element::{DOF_PER_NODE, ELEMENT_DOFS};
use crate::geometry::{ElementClassification, Mesh, QuadraturePlan};

#[derive(Debug, Clone, PartialEq)]
pub struct DofMap {
    /// First global dof of each node, `None` for eliminated nodes.
    node_base: Vec<Option<usize>>,
    pub enriched_nodes: Vec<usize>,
    pub eliminated_nodes: Vec<usize>,
    dof_count: usize,
}

impl DofMap {
    pub fn build(mesh: &Mesh, classification: &ElementClassification, plan: &QuadraturePlan) -> Self {
        let mut active = vec![false; mesh.node_count()];
        for (conn, ep) in mesh.elements.iter().zip(&plan.elements) {
            if !ep.is_empty() {
                for &n in conn {
                    active[n] = true;
                }
            }
        }
        let mut node_base = vec![None; mesh.node_count()];
        let mut eliminated_nodes = Vec::new();
        let mut next = 0;
        for (n, &a) in active.iter().enumerate() {
            if a {
                node_base[n] = Some(next);
                next += DOF_PER_NODE;
            } else {
                eliminated_nodes.push(n);
            }
        }
        let enriched_nodes = (0..mesh.node_count())
            .filter(|&n| classification.enriched[n] && active[n])
            .collect();
        Self {
            node_base,
            enriched_nodes,
            eliminated_nodes,
            dof_count: next,
        }
    }

    pub fn dof_count(&self) -> usize {
        self.dof_count
    }

    pub fn node_count(&self) -> usize {
        self.node_base.len()
    }

    pub fn node_dof(&self, node: usize, field: usize) -> Option<usize> {
        self.node_base[node].map(|b| b + field)
    }

    pub fn is_active(&self, node: usize) -> bool {
        self.node_base[node].is_some()
    }

    pub fn element_dofs(&self, conn: &[usize; 4]) -> [Option<usize>; ELEMENT_DOFS] {
        let mut out = [None; ELEMENT_DOFS];
        for (k, &n) in conn.iter().enumerate() {
            for f in 0..DOF_PER_NODE {
                out[DOF_PER_NODE * k + f] = self.node_dof(n, f);
            }
        }
        out
    }

    /// Largest `|i - j|` over dof pairs sharing an element.
    pub fn half_bandwidth(&self, mesh: &Mesh) -> usize {
        mesh.elements
            .iter()
            .filter_map(|conn| {
                let d = self.element_dofs(conn);
                let ids = d.iter().flatten();
                let lo = ids.clone().min()?;
                let hi = ids.max()?;
                Some(hi - lo)
            })
            .max()
            .unwrap_or(0)
    }

    /// Expand a global vector to per-node `[u, v, w, beta_x, beta_y]`, zero
    /// at eliminated nodes.
    pub fn nodal_values(&self, x: &[f64]) -> Vec<[f64; DOF_PER_NODE]> {
        self.node_base
            .iter()
            .map(|b| match b {
                Some(b) => std::array::from_fn(|f| x[b + f]),
                None => [0.0; DOF_PER_NODE],
            })
            .collect()
    }
}
