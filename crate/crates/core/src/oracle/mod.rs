//! Independent reference computations: closed-form laminate homogenization,
//! direct fine-scale solves, error norms and the convergence harness.

pub mod convergence;
pub mod dns;
pub mod laminate;
pub mod norms;

pub use convergence::{
    convergence_study, convergence_verdict, ConvergenceFixture, ConvergenceRow, ConvergenceVerdict, MacroResolution,
};
pub use dns::{dns_mesh, dns_solve, periods, DnsSolution};
pub use laminate::{laminate_homogenization_oracle, LaminateOracle};
pub use norms::error_norms;
