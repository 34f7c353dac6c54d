//! Structured meshes, level-set cutouts, element classification, subcell
//! triangulation and quadrature planning.

mod levelset;
mod mesh;
mod quadrature;
mod subcell;
mod vtk;

pub use levelset::{circle_level_set, ellipse_level_set, Cutout, LevelSetField, NO_CUTOUT_LEVEL};
pub use mesh::{build_mesh, Mesh};
pub use quadrature::{
    gauss_2x2, quadrature_plan, triangle_rule_3, triangle_rule_6, ElementPlan, QuadPoint,
    QuadraturePlan,
};
pub use subcell::{
    classify_elements, split_regions, triangulate_mesh, triangulate_split_element,
    ElementClassification, ElementKind, SubTriangle, PARENT_AREA, PARENT_CORNERS,
};
pub use vtk::{write_vtk, NodalVectors};
