//! Direct fine-scale solve of the heterogeneous problem.

use crate::error::{Error, Result};
use crate::fem::SolverOptions;
use crate::macroscale::{solve_elastic, ElasticSolution, LoadCase};
use crate::mesh::{generate_macro_mesh, MacroDomain, PhaseGeometry, TetMesh};
use crate::metric::LameModel;
use crate::tensor::MaterialTable;
use crate::twoscale::map_to_cell;

/// Fewest elements per period accepted without a warning.
pub const MIN_DNS_RESOLUTION: usize = 4;

/// Number of whole periods of length `epsilon` per axis; fails when the
/// domain is not an integer number of periods long.
pub fn periods(domain: &MacroDomain, epsilon: f64) -> Result<[usize; 3]> {
    if !(epsilon > 0.0) {
        return Err(Error::InvalidArgument(format!("epsilon must be positive, got {epsilon}")));
    }
    let (lo, hi) = domain.bounds();
    let mut out = [0; 3];
    for a in 0..3 {
        let k = (hi[a] - lo[a]) / epsilon;
        let r = k.round();
        if r < 1.0 || (k - r).abs() > 1e-9 * r {
            return Err(Error::InvalidArgument(format!(
                "epsilon {epsilon} is not commensurate with the domain along axis {}: {k} periods",
                a + 1
            )));
        }
        out[a] = r as usize;
    }
    Ok(out)
}

/// Structured mesh with `per_period` elements per period, tagged with the
/// ε-periodic phase layout.
pub fn dns_mesh(domain: &MacroDomain, epsilon: f64, phase: &PhaseGeometry, per_period: usize) -> Result<TetMesh> {
    let p = periods(domain, epsilon)?;
    if per_period < MIN_DNS_RESOLUTION {
        log::warn!("fine-scale mesh uses {per_period} elements per period (minimum {MIN_DNS_RESOLUTION})");
    }
    let mut mesh = generate_macro_mesh(domain, p.map(|k| k * per_period.max(1)))?;
    mesh.material_tag = (0..mesh.element_count()).map(|e| phase.phase_at(map_to_cell(mesh.centroid(e), epsilon))).collect();
    Ok(mesh)
}

#[derive(Debug, Clone)]
pub struct DnsSolution {
    pub mesh: TetMesh,
    pub solution: ElasticSolution,
}

#[allow(clippy::too_many_arguments)]
pub fn dns_solve(
    domain: &MacroDomain,
    model: &LameModel,
    epsilon: f64,
    phase: &PhaseGeometry,
    materials: &MaterialTable,
    loads: &LoadCase,
    per_period: usize,
    opts: &SolverOptions,
) -> Result<DnsSolution> {
    let mesh = dns_mesh(domain, epsilon, phase, per_period)?;
    let tensors = materials.per_element(&mesh.material_tag)?;
    log::info!("fine-scale solve at epsilon {epsilon}: {} elements", mesh.element_count());
    let solution = solve_elastic(&mesh, &tensors, model, loads, opts)?;
    Ok(DnsSolution { mesh, solution })
}
