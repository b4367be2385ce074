//! Linear-tetrahedron finite elements for curvilinear elasticity.

pub mod assembly;
pub mod constraints;
pub mod solver;
pub mod sparse;
pub mod strain;

pub use assembly::{assemble_constrained, assemble_stiffness, body_force_load, traction_load, ConstrainedSystem};
pub use constraints::{nodal_volumes, Constraints, Dof, DofMap};
pub use solver::{solve_constrained, solve_sparse, SolveStats, SolverOptions};
pub use sparse::CsrMatrix;
pub use strain::{element_strain, StrainMode};
