//! Per-element integration rules.
//!
//! | element          | rule                                   |
//! |------------------|----------------------------------------|
//! | standard         | 2 x 2 Gauss                            |
//! | split blending   | 2 x 2 Gauss                            |
//! | split            | 3 points per material subtriangle      |
//! | void             | none                                   |
//!
//! Consistent mass on split elements needs degree-4 exactness, so the mass
//! rule on those elements is a 6-point rule on the same subtriangles.

use nalgebra::Point2;

use super::subcell::{ElementClassification, ElementKind, SubTriangle};

/// Integration point in parent coordinates; `weight` is a parent-space measure.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadPoint {
    pub xi: f64,
    pub eta: f64,
    pub weight: f64,
}

impl QuadPoint {
    pub fn new(xi: f64, eta: f64, weight: f64) -> Self {
        Self { xi, eta, weight }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ElementPlan {
    pub kind: ElementKind,
    /// Stiffness / load rule. Only material-side points are stored.
    pub points: Vec<QuadPoint>,
    /// Material subtriangles of a split element (empty otherwise).
    pub triangles: Vec<[Point2<f64>; 3]>,
}

impl ElementPlan {
    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    /// Rule used for the consistent mass matrix.
    pub fn mass_points(&self) -> Vec<QuadPoint> {
        match self.kind {
            ElementKind::Split => self
                .triangles
                .iter()
                .flat_map(triangle_rule_6)
                .collect(),
            _ => self.points.clone(),
        }
    }

    /// Parent-space material area.
    pub fn parent_area(&self) -> f64 {
        self.points.iter().map(|q| q.weight).sum()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct QuadraturePlan {
    pub elements: Vec<ElementPlan>,
}

pub fn gauss_2x2() -> Vec<QuadPoint> {
    let g = 1.0 / 3f64.sqrt();
    [(-g, -g), (g, -g), (g, g), (-g, g)]
        .into_iter()
        .map(|(xi, eta)| QuadPoint::new(xi, eta, 1.0))
        .collect()
}

fn barycentric(t: &[Point2<f64>; 3], l1: f64, l2: f64) -> Point2<f64> {
    let l0 = 1.0 - l1 - l2;
    Point2::from(t[0].coords * l0 + t[1].coords * l1 + t[2].coords * l2)
}

/// Degree-2 interior rule with three points.
pub fn triangle_rule_3(t: &[Point2<f64>; 3]) -> [QuadPoint; 3] {
    let area = super::subcell::triangle_area(t);
    let w = area / 3.0;
    [(1.0 / 6.0, 1.0 / 6.0), (2.0 / 3.0, 1.0 / 6.0), (1.0 / 6.0, 2.0 / 3.0)].map(|(l1, l2)| {
        let p = barycentric(t, l1, l2);
        QuadPoint::new(p.x, p.y, w)
    })
}

/// Degree-4 six-point rule (Dunavant).
pub fn triangle_rule_6(t: &[Point2<f64>; 3]) -> Vec<QuadPoint> {
    const A: f64 = 0.445_948_490_915_964_9;
    const WA: f64 = 0.223_381_589_678_011_5;
    const B: f64 = 0.091_576_213_509_770_74;
    const WB: f64 = 0.109_951_743_655_321_9;
    let area = super::subcell::triangle_area(t);
    let mut out = Vec::with_capacity(6);
    for (x, w) in [(A, WA), (B, WB)] {
        let y = 1.0 - 2.0 * x;
        for (l1, l2) in [(x, x), (y, x), (x, y)] {
            let p = barycentric(t, l1, l2);
            out.push(QuadPoint::new(p.x, p.y, w * area));
        }
    }
    out
}

pub fn quadrature_plan(
    classification: &ElementClassification,
    triangulation: &[Vec<SubTriangle>],
) -> QuadraturePlan {
    let elements = classification
        .kinds
        .iter()
        .zip(triangulation)
        .map(|(&kind, tris)| match kind {
            ElementKind::Standard | ElementKind::SplitBlending => ElementPlan {
                kind,
                points: gauss_2x2(),
                triangles: Vec::new(),
            },
            ElementKind::Void => ElementPlan {
                kind,
                points: Vec::new(),
                triangles: Vec::new(),
            },
            ElementKind::Split => {
                let triangles: Vec<_> = tris
                    .iter()
                    .filter(|t| t.material)
                    .map(|t| t.vertices)
                    .collect();
                ElementPlan {
                    kind,
                    points: triangles.iter().flat_map(triangle_rule_3).collect(),
                    triangles,
                }
            }
        })
        .collect();
    QuadraturePlan { elements }
}
