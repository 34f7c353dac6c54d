//! Global assembly, boundary conditions, linear and eigenvalue solvers.

mod analysis;
mod assembly;
mod band;
mod dofmap;
mod eigen;

pub use analysis::{
    buckling_loads, buckling_reference, preload, solve_buckling, solve_buckling_with_reference,
    solve_vibration, unit_compression_field, BucklingResult, CaseOptions, NodalField, Preload,
    VibrationResult, EIGEN_RESIDUAL_TOLERANCE,
};
pub use assembly::{
    apply_boundary_conditions, assemble_hygrothermal_load, assemble_mass, assemble_stiffness,
    assemble_stress_stiffness, assemble_system, edge_compression_load, expand_vector,
    free_dof_mask, recover_resultants, restrict_vector, static_solve, uniform_resultants,
    BoundaryCondition, ConstrainedSystem, GlobalSystem, PlateModel, ResultantField,
};
pub use band::{BandCholesky, BandMatrix};
pub use dofmap::DofMap;
pub use eigen::{
    dense_generalized_eigenvalues, generalized_symmetric_eig, largest_pencil,
    largest_pencil_factored, pencil_residual, EigenOptions, EigenPairs,
};
