//! Legacy VTK ASCII dumps of the mesh, level set, classification and
//! optional nodal fields.

use std::fmt::Write;

use super::levelset::LevelSetField;
use super::mesh::Mesh;
use super::subcell::ElementClassification;

/// Extra nodal vector field, e.g. a mode shape's `(u, v, w)`.
pub struct NodalVectors<'a> {
    pub name: &'a str,
    pub values: &'a [[f64; 3]],
}

pub fn write_vtk(
    mesh: &Mesh,
    level_set: &LevelSetField,
    classification: &ElementClassification,
    fields: &[NodalVectors<'_>],
) -> String {
    let mut s = String::new();
    let (nn, ne) = (mesh.node_count(), mesh.element_count());
    let _ = writeln!(s, "# vtk DataFile Version 3.0");
    let _ = writeln!(s, "hygroplate mesh");
    let _ = writeln!(s, "ASCII");
    let _ = writeln!(s, "DATASET UNSTRUCTURED_GRID");
    let _ = writeln!(s, "POINTS {nn} double");
    for p in &mesh.nodes {
        let _ = writeln!(s, "{:.12e} {:.12e} 0", p.x, p.y);
    }
    let _ = writeln!(s, "CELLS {ne} {}", ne * 5);
    for c in &mesh.elements {
        let _ = writeln!(s, "4 {} {} {} {}", c[0], c[1], c[2], c[3]);
    }
    let _ = writeln!(s, "CELL_TYPES {ne}");
    for _ in 0..ne {
        let _ = writeln!(s, "9");
    }
    let _ = writeln!(s, "POINT_DATA {nn}");
    let _ = writeln!(s, "SCALARS phi double 1");
    let _ = writeln!(s, "LOOKUP_TABLE default");
    for p in &level_set.phi {
        let _ = writeln!(s, "{p:.12e}");
    }
    for f in fields {
        let _ = writeln!(s, "VECTORS {} double", f.name);
        for v in f.values {
            let _ = writeln!(s, "{:.12e} {:.12e} {:.12e}", v[0], v[1], v[2]);
        }
    }
    let _ = writeln!(s, "CELL_DATA {ne}");
    let _ = writeln!(s, "SCALARS classification int 1");
    let _ = writeln!(s, "LOOKUP_TABLE default");
    for k in &classification.kinds {
        let _ = writeln!(s, "{}", k.code());
    }
    s
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{build_mesh, classify_elements, Cutout};
    use nalgebra::Point2;

    #[test]
    fn dump_layout() {
        let m = build_mesh(1.0, 1.0, 3, 3).unwrap();
        let ls = Cutout::Circle { center: Point2::new(0.5, 0.5), radius: 0.3 }.level_set(&m);
        let c = classify_elements(&m, &ls);
        let w = vec![[0.0, 0.0, 1.0]; m.node_count()];
        let text = write_vtk(&m, &ls, &c, &[NodalVectors { name: "mode_1", values: &w }]);
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines[0], "# vtk DataFile Version 3.0");
        assert!(lines.contains(&"POINTS 16 double"));
        assert!(lines.contains(&"CELLS 9 45"));
        assert!(lines.contains(&"VECTORS mode_1 double"));
        let cell_data = lines.iter().position(|l| *l == "CELL_DATA 9").unwrap();
        assert_eq!(lines[cell_data + 3 + 4], "1");
        assert_eq!(lines[cell_data + 3 + 1], "2");
    }
}
