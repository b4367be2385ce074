//! ε-convergence of the zeroth-, first- and second-order two-scale solutions
//! against fine-scale reference solves for a clamped laminated plate.
//!
//! Usage: `cargo run --release --example convergence_study [max_level]`
//! where levels 1, 2, 3 correspond to ε = 1/4, 1/8, 1/16.

use shellhom::oracle::{convergence_study, convergence_verdict, ConvergenceFixture, ConvergenceRow};

fn main() -> shellhom::Result<()> {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("info")).init();
    let levels: usize = std::env::args().nth(1).and_then(|s| s.parse().ok()).unwrap_or(3);
    let fixture = ConvergenceFixture::laminated_plate();
    let eps: Vec<f64> = (1..=levels).map(|k| 1.0 / f64::powi(2.0, k as i32 + 1)).collect();
    let rows = convergence_study(&fixture, &eps)?;
    println!("{}", ConvergenceRow::csv_header());
    for r in &rows {
        println!("{}", r.csv_row());
    }
    let v = convergence_verdict(&rows, 0.5, 0.05);
    println!("min H1 rate of u2: {:?}, ordering ok: {}", v.min_rate, v.ordering_ok);
    Ok(())
}
