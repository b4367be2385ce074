//! Finite-element homogenization of a two-layer laminate against the exact
//! one-dimensional solution, for a sequence of cell resolutions.
//!
//! Usage: `cargo run --release --example laminate_homogenization`

use shellhom::cell::{solve_cell, CellOptions};
use shellhom::mesh::{generate_unit_cell_mesh, PhaseGeometry};
use shellhom::metric::LameModel;
use shellhom::oracle::{laminate_homogenization_oracle, LaminateOracle};
use shellhom::tensor::{isotropic_tensor, MaterialTable};

fn main() -> shellhom::Result<()> {
    let (e1, nu1, e2, nu2) = (10.0, 0.3, 1.0, 0.3);
    let materials = MaterialTable::new()
        .with(1, isotropic_tensor(e1, nu1)?, None)
        .with(2, isotropic_tensor(e2, nu2)?, None);
    let axis = 2;
    let exact = LaminateOracle::new(
        &[(0.5, *materials.tensor(1)?), (0.5, *materials.tensor(2)?)],
        axis,
        1.0,
    )?
    .c_hat();
    let lame = |e: f64, nu: f64| (e * nu / ((1.0 + nu) * (1.0 - 2.0 * nu)), e / (2.0 * (1.0 + nu)));
    let (l1, m1) = lame(e1, nu1);
    let (l2, m2) = lame(e2, nu2);
    let closed = laminate_homogenization_oracle(&[(0.5, l1, m1), (0.5, l2, m2)], axis)?;
    println!("exact vs closed form: relative difference {:.3e}", exact.relative_difference(&closed));
    println!("C3333 exact {:.6}  C1111 exact {:.6}", exact.get(2, 2), exact.get(0, 0));

    let options = CellOptions { second_order: false, ..CellOptions::default() };
    println!("{:>4} {:>12} {:>12}", "n", "C3333", "rel. error");
    for n in [4, 8, 16] {
        let mesh = generate_unit_cell_mesh(n, &PhaseGeometry::Laminate { axis, layers: vec![(0.5, 1), (0.5, 2)] })?;
        let set = solve_cell(&mesh, &materials, &LameModel::Plate, [0.0; 3], &options)?;
        println!("{n:>4} {:>12.6} {:>12.3e}", set.c_hat.get(2, 2), set.c_hat.relative_difference(&exact));
    }
    Ok(())
}
