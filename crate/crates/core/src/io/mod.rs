//! File formats shared by the pipeline stages.

pub mod fields;
pub mod text;
pub mod vtk;

pub use fields::{read_macro_archive, write_macro_archive, MacroArchive};
pub use vtk::{write_vtk, VtkData};
