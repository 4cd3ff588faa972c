//! Axisymmetric finite element solver for notched round bars.

pub mod assembly;
pub mod bfgs;
pub mod element;
pub mod linsolve;
pub mod mesh;
pub mod oracle;
pub mod run;
pub mod vtk;

pub use assembly::{FemProblem, FieldState, PointEval, Residual, SystemBlocks, TangentCheck};
pub use bfgs::{bfgs_solve, BfgsOptions, BfgsReport};
pub use mesh::{generate_notched_mesh, generate_notched_mesh_with, patch_mesh, single_element_mesh, Mesh, MeshOptions, NotchGeometry};
pub use oracle::{single_element_lockstep, OracleCase, OracleReport};
pub use run::{
    elastic_scf, notched_simulator, run_fatigue_fem, run_notched, run_notched_observed, FemCycleOutcome, FemOptions,
    FemRun, FemSimulator, NotchedRun, NotchedSetup,
};
pub use vtk::{render_vtk, write_vtk};
