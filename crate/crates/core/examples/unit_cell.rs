//! Solves every cell problem for a cubic inclusion cell and prints the
//! homogenized tensor next to its Voigt and Reuss bounds.
//!
//! Usage: `cargo run --release --example unit_cell [n] [archive_path]`

use shellhom::cell::{solve_cell, write_cell_archive, CellOptions};
use shellhom::mesh::{generate_unit_cell_mesh, PhaseGeometry};
use shellhom::metric::LameModel;
use shellhom::tensor::{isotropic_tensor, voigt_reuss, ElasticTensor, MaterialTable, PAIR_LABELS};

fn print_tensor(name: &str, c: &ElasticTensor) {
    println!("{name}:");
    for (a, row) in c.matrix().iter().enumerate() {
        let cells: Vec<String> = row.iter().map(|v| format!("{v:11.4e}")).collect();
        println!("  {:>3} {}", PAIR_LABELS[a], cells.join(" "));
    }
}

fn main() -> shellhom::Result<()> {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let n: usize = std::env::args().nth(1).and_then(|s| s.parse().ok()).unwrap_or(12);
    let phase = PhaseGeometry::BoxInclusion {
        center: [0.5; 3],
        half_widths: [0.25; 3],
        phase: 2,
        matrix: 1,
    };
    let mesh = generate_unit_cell_mesh(n, &phase)?;
    let materials = MaterialTable::new()
        .with(1, isotropic_tensor(410e9, 0.18)?, Some(0.14e9))
        .with(2, isotropic_tensor(240e9, 0.20)?, Some(3.5e6));

    let set = solve_cell(&mesh, &materials, &LameModel::Plate, [0.0; 3], &CellOptions::default())?;
    println!("cell mesh: {n}^3 cubes, {} tetrahedra", mesh.element_count());
    for (p, f) in mesh.phase_fractions() {
        println!("phase {p}: volume fraction {f:.5}");
    }
    println!("asymmetry of the raw tensor: {:.3e}", set.asymmetry);
    print_tensor("homogenized tensor [Pa]", &set.c_hat);

    let parts: Vec<(f64, ElasticTensor)> =
        mesh.phase_fractions().into_iter().map(|(p, f)| (f, *materials.tensor(p).unwrap())).collect();
    let (voigt, reuss) = voigt_reuss(&parts)?;
    let eig = |c: &ElasticTensor| c.eigenvalues().map(|v| format!("{v:.4e}")).join(" ");
    println!("eigenvalues (Mandel form):");
    println!("  Reuss  {}", eig(&reuss));
    println!("  Ĉ      {}", eig(&set.c_hat));
    println!("  Voigt  {}", eig(&voigt));

    if let Some(path) = std::env::args().nth(2) {
        write_cell_archive(std::path::Path::new(&path), &set)?;
        println!("archive written to {path}");
    }
    Ok(())
}
