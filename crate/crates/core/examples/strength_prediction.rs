//! Critical load of a patch-loaded plate by the direct scaling rule and by
//! bisection with full re-solves, which agree for a linear problem.
//!
//! Usage: `cargo run --release --example strength_prediction [config.ini]`

use std::path::PathBuf;

use shellhom::config::RunConfig;
use shellhom::macroscale::{solve_homogenized, RepresentativeSet};
use shellhom::pipeline::{evaluation_mesh, macro_mesh, reconstruct_fields, solve_cells};
use shellhom::strength::{critical_load_bisection, critical_load_direct};

fn main() -> shellhom::Result<()> {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let root = PathBuf::from(env!("CARGO_MANIFEST_DIR"));
    let config =
        std::env::args().nth(1).map(PathBuf::from).unwrap_or_else(|| root.join("examples/configs/plate_strength.ini"));
    let cfg = RunConfig::from_file(&config)?;
    let order = cfg.strength.as_ref().map(|s| s.stress_order).unwrap_or(shellhom::twoscale::Order::Second);

    let reps = RepresentativeSet::new(solve_cells(&cfg, false)?)?;
    let mesh = macro_mesh(&cfg)?;
    let eval = evaluation_mesh(&cfg)?;
    let sol = solve_homogenized(&mesh, &reps, &cfg.model, &cfg.macroscale.loads, &cfg.macroscale.solver)?;
    let reference = reconstruct_fields(&cfg, &mesh, &sol, &reps, eval.clone(), order)?;
    let phase = reference.field.phase.clone();

    let direct = critical_load_direct(&reference.stress, &phase, &cfg.cell.materials)?;
    let bisection = critical_load_bisection(
        |s| {
            let loads = cfg.macroscale.loads.scaled(s);
            let scaled = solve_homogenized(&mesh, &reps, &cfg.model, &loads, &cfg.macroscale.solver)?;
            Ok(reconstruct_fields(&cfg, &mesh, &scaled, &reps, eval.clone(), order)?.stress)
        },
        &phase,
        &cfg.cell.materials,
        1.0,
        1e-8,
    )?;
    println!("{}", shellhom::strength::StrengthReport::csv_header());
    println!("{}", direct.csv_row());
    println!("{}", bisection.csv_row());
    let gap = (direct.critical_load_multiplier - bisection.critical_load_multiplier).abs()
        / direct.critical_load_multiplier;
    println!("relative gap between methods: {gap:.3e}");
    Ok(())
}
