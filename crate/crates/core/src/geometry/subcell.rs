//! Element classification against the level set and subcell triangulation
//! of cut elements.
//!
//! All triangulation happens in parent coordinates `(xi, eta) in [-1, 1]^2`.
//! Interface points sit at the linear-interpolation roots of the nodal level
//! set on the cut edges; within an element the interface is the straight
//! chord between them.

use nalgebra::Point2;
use rayon::prelude::*;

use super::levelset::LevelSetField;
use super::mesh::Mesh;

/// Parent-space corner coordinates in connectivity order.
pub const PARENT_CORNERS: [(f64, f64); 4] = [(-1.0, -1.0), (1.0, -1.0), (1.0, 1.0), (-1.0, 1.0)];

/// Parent-space area of the reference square.
pub const PARENT_AREA: f64 = 4.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ElementKind {
    Standard,
    Void,
    Split,
    SplitBlending,
}

impl ElementKind {
    /// Integer code written to visualization dumps.
    pub fn code(self) -> i32 {
        match self {
            ElementKind::Standard => 0,
            ElementKind::Void => 1,
            ElementKind::Split => 2,
            ElementKind::SplitBlending => 3,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ElementClassification {
    pub kinds: Vec<ElementKind>,
    /// Nodes belonging to at least one split element.
    pub enriched: Vec<bool>,
}

impl ElementClassification {
    pub fn count(&self, kind: ElementKind) -> usize {
        self.kinds.iter().filter(|&&k| k == kind).count()
    }
}

pub fn classify_elements(mesh: &Mesh, level_set: &LevelSetField) -> ElementClassification {
    let h = mesh.min_element_size();
    let mut kinds: Vec<ElementKind> = (0..mesh.element_count())
        .into_par_iter()
        .map(|e| {
            let phi = level_set.element_values(mesh, e, h);
            if phi.iter().all(|&p| p > 0.0) {
                ElementKind::Standard
            } else if phi.iter().all(|&p| p < 0.0) {
                ElementKind::Void
            } else {
                ElementKind::Split
            }
        })
        .collect();
    let mut enriched = vec![false; mesh.node_count()];
    for (e, kind) in kinds.iter().enumerate() {
        if *kind == ElementKind::Split {
            for &n in &mesh.elements[e] {
                enriched[n] = true;
            }
        }
    }
    for (e, kind) in kinds.iter_mut().enumerate() {
        if *kind == ElementKind::Standard && mesh.elements[e].iter().any(|&n| enriched[n]) {
            *kind = ElementKind::SplitBlending;
        }
    }
    ElementClassification { kinds, enriched }
}

/// Triangle in parent coordinates tagged with the side of the interface it lies on.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SubTriangle {
    pub vertices: [Point2<f64>; 3],
    pub material: bool,
}

impl SubTriangle {
    pub fn area(&self) -> f64 {
        triangle_area(&self.vertices)
    }
}

pub(crate) fn triangle_area(v: &[Point2<f64>; 3]) -> f64 {
    0.5 * ((v[1] - v[0]).perp(&(v[2] - v[0]))).abs()
}

fn corner(k: usize) -> Point2<f64> {
    let (x, y) = PARENT_CORNERS[k];
    Point2::new(x, y)
}

fn edge_root(phi: &[f64; 4], k: usize) -> Point2<f64> {
    let (a, b) = (phi[k], phi[(k + 1) % 4]);
    let t = a / (a - b);
    corner(k) + (corner((k + 1) % 4) - corner(k)) * t
}

/// Sub-polygons of a cut element, each tagged material (`true`) or void.
///
/// `phi` holds nodal values with no exact zeros.
pub fn split_regions(phi: &[f64; 4]) -> Vec<(Vec<Point2<f64>>, bool)> {
    let positive = phi.map(|p| p > 0.0);
    let cut_edges: Vec<usize> = (0..4).filter(|&k| positive[k] != positive[(k + 1) % 4]).collect();
    match cut_edges.len() {
        0 => vec![((0..4).map(corner).collect(), positive[0])],
        2 => {
            // Walk the boundary once; each sign run plus its two roots is convex.
            let mut regions = Vec::with_capacity(2);
            for (i, &start) in cut_edges.iter().enumerate() {
                let end = cut_edges[(i + 1) % 2];
                let mut poly = vec![edge_root(phi, start)];
                let mut k = (start + 1) % 4;
                loop {
                    poly.push(corner(k));
                    if k == end {
                        break;
                    }
                    k = (k + 1) % 4;
                }
                poly.push(edge_root(phi, end));
                regions.push((poly, positive[(start + 1) % 4]));
            }
            regions
        }
        4 => {
            // Saddle: the sign at the element centre decides which side is connected.
            let centre_positive = phi.iter().sum::<f64>() > 0.0;
            let mut regions = Vec::with_capacity(3);
            let mut connected = Vec::with_capacity(6);
            for k in 0..4 {
                let prev = (k + 3) % 4;
                if positive[k] == centre_positive {
                    connected.push(edge_root(phi, prev));
                    connected.push(corner(k));
                    connected.push(edge_root(phi, k));
                } else {
                    regions.push((
                        vec![edge_root(phi, prev), corner(k), edge_root(phi, k)],
                        positive[k],
                    ));
                }
            }
            connected.dedup_by(|a, b| (*a - *b).norm() == 0.0);
            regions.push((connected, centre_positive));
            regions
        }
        _ => unreachable!("a closed loop crosses the interface an even number of times"),
    }
}

/// Fan triangulation of every sub-polygon from its vertex centroid; slivers
/// with area below `1e-12` of the parent element are dropped.
pub fn triangulate_split_element(phi: &[f64; 4]) -> Vec<SubTriangle> {
    let mut out = Vec::new();
    for (poly, material) in split_regions(phi) {
        let centre = Point2::from(
            poly.iter().map(|p| p.coords).sum::<nalgebra::Vector2<f64>>() / poly.len() as f64,
        );
        for k in 0..poly.len() {
            let tri = SubTriangle {
                vertices: [centre, poly[k], poly[(k + 1) % poly.len()]],
                material,
            };
            if tri.area() >= 1e-12 * PARENT_AREA {
                out.push(tri);
            }
        }
    }
    out
}

/// Triangulate every split element of the mesh.
pub fn triangulate_mesh(
    mesh: &Mesh,
    level_set: &LevelSetField,
    classification: &ElementClassification,
) -> Vec<Vec<SubTriangle>> {
    let h = mesh.min_element_size();
    (0..mesh.element_count())
        .into_par_iter()
        .map(|e| match classification.kinds[e] {
            ElementKind::Split => triangulate_split_element(&level_set.element_values(mesh, e, h)),
            _ => Vec::new(),
        })
        .collect()
}
