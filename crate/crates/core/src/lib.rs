//! Second-order two-scale homogenization of periodic composite plates and
//! shells described in orthogonal curvilinear coordinates.

pub mod cell;
pub mod config;
pub mod error;
pub mod fem;
pub mod io;
pub mod macroscale;
pub mod mesh;
pub mod metric;
pub mod oracle;
pub mod pipeline;
pub mod strength;
pub mod tensor;
pub mod twoscale;

pub use error::{Error, Result};
