//! Laminated cylindrical panel: cell problems on a lattice of
//! representative points through the thickness, the graded homogenized
//! solve, and the two-scale reconstruction.
//!
//! Usage: `cargo run --release --example cylindrical_shell [radius]`

use shellhom::cell::{solve_cell, CellOptions};
use shellhom::fem::SolverOptions;
use shellhom::macroscale::{select_representative_points, solve_homogenized, BodyForce, BoundaryCondition, LoadCase, RepresentativeSet};
use shellhom::mesh::{generate_macro_mesh, generate_unit_cell_mesh, Face, MacroDomain, PhaseGeometry};
use shellhom::metric::LameModel;
use shellhom::tensor::{isotropic_tensor, MaterialTable};
use shellhom::twoscale::reconstruct;

fn main() -> shellhom::Result<()> {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let r2: f64 = std::env::args().nth(1).and_then(|s| s.parse().ok()).unwrap_or(2.0);
    let model = LameModel::Cylindrical { r2 };
    // α1 along the generator, α2 the angle, α3 through the thickness
    let lo = [0.0, 0.0, -0.125];
    let hi = [1.0, 0.5, 0.125];
    let domain = MacroDomain::ShellSector { alpha1: (lo[0], hi[0]), alpha2: (lo[1], hi[1]), alpha3: (lo[2], hi[2]) };
    let epsilon = 1.0 / 8.0;

    let materials = MaterialTable::new()
        .with(1, isotropic_tensor(10.0, 0.3)?, None)
        .with(2, isotropic_tensor(1.0, 0.3)?, None);
    let phase = PhaseGeometry::Laminate { axis: 2, layers: vec![(0.5, 1), (0.5, 2)] };
    let cell_mesh = generate_unit_cell_mesh(8, &phase)?;

    let points = select_representative_points(&model, lo, hi, 3);
    let cells = points
        .iter()
        .map(|&p| solve_cell(&cell_mesh, &materials, &model, p, &CellOptions::default()))
        .collect::<shellhom::Result<Vec<_>>>()?;
    for c in &cells {
        println!(
            "α3 = {:+.4}: H = {:?}, Ĉ1111 = {:.5}, Ĉ2222 = {:.5}, Ĉ3333 = {:.5}",
            c.alpha_i[2], c.metric.h, c.c_hat.get(0, 0), c.c_hat.get(1, 1), c.c_hat.get(2, 2)
        );
    }
    let reps = RepresentativeSet::new(cells)?;

    let mesh = generate_macro_mesh(&domain, [8, 4, 2])?;
    let loads = LoadCase {
        body_force: BodyForce::Uniform([0.0; 3]),
        boundary: vec![
            BoundaryCondition::Dirichlet { face: Face::XMin, values: [Some(0.0); 3] },
            BoundaryCondition::Dirichlet { face: Face::XMax, values: [Some(0.0); 3] },
            BoundaryCondition::Traction { face: Face::ZMax, traction: [0.0, 0.0, -1e-3], patch: None },
        ],
    };
    let sol = solve_homogenized(&mesh, &reps, &model, &loads, &SolverOptions::default())?;
    println!("homogenized solve: energy {:.6e}, load work {:.6e}", sol.energy, sol.work);

    let eval = generate_macro_mesh(&domain, [64, 32, 16])?;
    let field = reconstruct(&eval, &mesh, &sol, &reps, epsilon)?;
    let peak = |u: &[[f64; 3]]| u.iter().map(|v| v[2].abs()).fold(0.0, f64::max);
    println!("max |u3|: order 0 {:.6e}, order 1 {:.6e}, order 2 {:.6e}", peak(&field.u0), peak(&field.u1), peak(&field.u2));
    Ok(())
}
