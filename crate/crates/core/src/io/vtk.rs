//! Legacy-VTK ASCII unstructured grids for visualization.

use std::fmt::Write as _;
use std::path::Path;

use crate::error::Result;
use crate::mesh::TetMesh;
use crate::tensor::{sym_get, Sym3};

pub enum VtkData<'a> {
    Scalars(&'a str, &'a [f64]),
    Ints(&'a str, &'a [u32]),
    Vectors(&'a str, &'a [[f64; 3]]),
    /// Symmetric tensors written as full 3×3 blocks.
    Tensors(&'a str, &'a [Sym3]),
}

fn push_data(s: &mut String, d: &VtkData) {
    match d {
        VtkData::Scalars(name, v) => {
            let _ = writeln!(s, "SCALARS {name} double 1\nLOOKUP_TABLE default");
            for x in *v {
                let _ = writeln!(s, "{x:?}");
            }
        }
        VtkData::Ints(name, v) => {
            let _ = writeln!(s, "SCALARS {name} int 1\nLOOKUP_TABLE default");
            for x in *v {
                let _ = writeln!(s, "{x}");
            }
        }
        VtkData::Vectors(name, v) => {
            let _ = writeln!(s, "VECTORS {name} double");
            for x in *v {
                let _ = writeln!(s, "{:?} {:?} {:?}", x[0], x[1], x[2]);
            }
        }
        VtkData::Tensors(name, v) => {
            let _ = writeln!(s, "TENSORS {name} double");
            for t in *v {
                for i in 0..3 {
                    let _ = writeln!(s, "{:?} {:?} {:?}", sym_get(t, i, 0), sym_get(t, i, 1), sym_get(t, i, 2));
                }
            }
        }
    }
}

/// Mesh in coordinate space `(α1, α2, α3)` with point and cell data.
pub fn vtk_to_string(mesh: &TetMesh, title: &str, points: &[VtkData], cells: &[VtkData]) -> String {
    let mut s = String::new();
    let _ = writeln!(s, "# vtk DataFile Version 3.0\n{title}\nASCII\nDATASET UNSTRUCTURED_GRID");
    let _ = writeln!(s, "POINTS {} double", mesh.node_count());
    for p in &mesh.nodes {
        let _ = writeln!(s, "{:?} {:?} {:?}", p[0], p[1], p[2]);
    }
    let ne = mesh.element_count();
    let _ = writeln!(s, "CELLS {ne} {}", 5 * ne);
    for t in &mesh.tets {
        let _ = writeln!(s, "4 {} {} {} {}", t[0], t[1], t[2], t[3]);
    }
    let _ = writeln!(s, "CELL_TYPES {ne}");
    for _ in 0..ne {
        s.push_str("10\n");
    }
    if !points.is_empty() {
        let _ = writeln!(s, "POINT_DATA {}", mesh.node_count());
        points.iter().for_each(|d| push_data(&mut s, d));
    }
    if !cells.is_empty() {
        let _ = writeln!(s, "CELL_DATA {ne}");
        cells.iter().for_each(|d| push_data(&mut s, d));
    }
    s
}

pub fn write_vtk(path: &Path, mesh: &TetMesh, title: &str, points: &[VtkData], cells: &[VtkData]) -> Result<()> {
    std::fs::write(path, vtk_to_string(mesh, title, points, cells))?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mesh::{generate_macro_mesh, MacroDomain};

    #[test]
    fn section_sizes() {
        let m = generate_macro_mesh(&MacroDomain::Box { lo: [0.0; 3], hi: [1.0; 3] }, [1, 1, 1]).unwrap();
        let u = vec![[0.0, 1.0, 2.0]; 8];
        let s = vec![[1.0, 2.0, 3.0, 4.0, 5.0, 6.0]; 6];
        let text = vtk_to_string(&m, "t", &[VtkData::Vectors("u", &u)], &[VtkData::Tensors("s", &s), VtkData::Ints("phase", &[1; 6])]);
        assert!(text.contains("POINTS 8 double"));
        assert!(text.contains("CELLS 6 30"));
        assert!(text.contains("CELL_TYPES 6"));
        assert!(text.contains("POINT_DATA 8"));
        // 4 header lines + 1 + 8 points + 1 + 6 cells + 1 + 6 types + point data 1 + 8 + cell data 1 + 1 + 18 + 2 + 6
        assert_eq!(text.lines().count(), 4 + 1 + 8 + 1 + 6 + 1 + 6 + 1 + 1 + 8 + 1 + 1 + 18 + 2 + 6);
        assert!(text.contains("1.0 4.0 6.0\n4.0 2.0 5.0\n6.0 5.0 3.0\n"));
    }
}
