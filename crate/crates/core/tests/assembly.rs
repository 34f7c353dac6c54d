//! Global assembly and dof numbering on structured and cut meshes.

mod common;

use hygroplate::element::{element_hygrothermal_load, element_mass, element_stiffness, DOF_PER_NODE, U, W};
use hygroplate::geometry::{build_mesh, gauss_2x2, Cutout};
use hygroplate::material::{Environment, LaminateStack, MaterialTable, ModuliPolicy, PlyMaterial};
use hygroplate::solver::{assemble_system, free_dof_mask, BoundaryCondition, PlateModel};
use nalgebra::Point2;

use common::cross_ply;

fn unsymmetric() -> LaminateStack {
    LaminateStack::uniform(&[0.0, 45.0], 0.02, PlyMaterial::Table(MaterialTable::graphite_epoxy())).unwrap()
}

#[test]
fn one_element_model_reproduces_element_matrices() {
    let mesh = build_mesh(0.8, 0.5, 1, 1).unwrap();
    let model = PlateModel::new(mesh, Cutout::None).unwrap();
    let li = unsymmetric().integrals(Environment::new(320.0, 0.4), ModuliPolicy::EnvironmentDependent).unwrap();
    let sys = assemble_system(&model, &li).unwrap();
    let c = model.mesh.element_coords(0);
    let g = gauss_2x2();
    let ke = element_stiffness(&li, &c, &g).unwrap();
    let me = element_mass(li.p, li.i, &c, &g).unwrap();
    let fe = element_hygrothermal_load(&li.n_hygro, &li.m_hygro, &c, &g).unwrap();
    let conn = model.mesh.elements[0];
    let global = |r: usize| model.dofs.node_dof(conn[r / DOF_PER_NODE], r % DOF_PER_NODE).unwrap();
    let (kd, md) = (sys.k.to_dense(), sys.m.to_dense());
    for r in 0..20 {
        assert!((sys.f_t[global(r)] - fe[r]).abs() <= 1e-12 * fe.amax());
        for s in 0..20 {
            assert!((kd[(global(r), global(s))] - ke[(r, s)]).abs() <= 1e-12 * ke.amax());
            assert!((md[(global(r), global(s))] - me[(r, s)]).abs() <= 1e-12 * me.amax());
        }
    }
}

#[test]
fn total_translational_mass_equals_material_area() {
    let cutout = Cutout::Ellipse {
        center: Point2::new(0.5, 0.4),
        d: 0.25,
        e: 0.1,
        angle_deg: 30.0,
    };
    let model = PlateModel::new(build_mesh(1.0, 0.8, 16, 12).unwrap(), cutout).unwrap();
    let li = cross_ply(0.01).integrals(Environment::BASELINE, ModuliPolicy::Baseline).unwrap();
    let m = assemble_system(&model, &li).unwrap().m.to_dense();
    let u_dofs: Vec<usize> = (0..model.mesh.node_count()).filter_map(|n| model.dofs.node_dof(n, U)).collect();
    let total: f64 = u_dofs.iter().flat_map(|&i| u_dofs.iter().map(move |&j| (i, j))).map(|(i, j)| m[(i, j)]).sum();
    let expected = li.p * model.material_area();
    assert!((total - expected).abs() <= 1e-12 * expected);
}

#[test]
fn intact_plate_has_no_enriched_or_eliminated_nodes() {
    let model = PlateModel::new(build_mesh(1.0, 1.0, 10, 10).unwrap(), Cutout::None).unwrap();
    assert!(model.dofs.enriched_nodes.is_empty());
    assert!(model.dofs.eliminated_nodes.is_empty());
    assert_eq!(model.dofs.dof_count(), 121 * DOF_PER_NODE);
}

#[test]
fn eliminated_and_enriched_nodes_match_brute_force() {
    let (r, n) = (0.2, 40);
    let center = Point2::new(0.5, 0.5);
    let model = PlateModel::new(build_mesh(1.0, 1.0, n, n).unwrap(), Cutout::Circle { center, radius: r }).unwrap();
    let mesh = &model.mesh;
    let inside = |p: usize| (mesh.nodes[p] - center).norm() < r;
    let void = |e: usize| mesh.elements[e].iter().all(|&p| inside(p));
    let cut = |e: usize| {
        let c = mesh.elements[e].iter().filter(|&&p| inside(p)).count();
        c > 0 && c < 4
    };
    let adj = mesh.node_elements();
    let eliminated: Vec<usize> = (0..mesh.node_count()).filter(|&p| adj[p].iter().all(|&e| void(e))).collect();
    let enriched: Vec<usize> = (0..mesh.node_count())
        .filter(|&p| adj[p].iter().any(|&e| cut(e)))
        .filter(|p| !eliminated.contains(p))
        .collect();
    assert!(!eliminated.is_empty());
    assert_eq!(model.dofs.eliminated_nodes, eliminated);
    assert_eq!(model.dofs.enriched_nodes, enriched);
    assert_eq!(model.dofs.dof_count(), (mesh.node_count() - eliminated.len()) * DOF_PER_NODE);
}

#[test]
fn boundary_masks_fix_expected_fields() {
    let model = PlateModel::new(build_mesh(1.0, 1.0, 4, 4).unwrap(), Cutout::None).unwrap();
    let ss = free_dof_mask(&model, BoundaryCondition::Ssss);
    let cc = free_dof_mask(&model, BoundaryCondition::Cccc);
    let free = free_dof_mask(&model, BoundaryCondition::Free);
    assert!(free.iter().all(|&k| k));
    // 16 boundary nodes; SSSS fixes w at each, CCCC every field.
    let fixed = |m: &[bool]| m.iter().filter(|&&k| !k).count();
    assert_eq!(fixed(&cc), 16 * DOF_PER_NODE);
    let w_fixed = (0..25).filter(|&p| !ss[model.dofs.node_dof(p, W).unwrap()]).count();
    assert_eq!(w_fixed, 16);
    // Corners lose u, v, w and both rotations; other edge nodes three fields.
    assert_eq!(fixed(&ss), 4 * 5 + 12 * 3);
}
