//! Reconstruction of the first- and second-order two-scale fields on a fine
//! evaluation mesh.

use rayon::prelude::*;

use crate::cell::{n2_index, CellSampler};
use crate::error::{Error, Result};
use crate::fem::{element_strain, StrainMode};
use crate::macroscale::{MacroSolution, RepresentativeSet};
use crate::mesh::{Locator, TetMesh};
use crate::metric::LameModel;
use crate::tensor::{engineering, MaterialTable, Sym3};

/// Relative distance to a lattice plane below which `α/ε` snaps onto it.
const SNAP: f64 = 1e-10;

/// Minimum evaluation elements per period before a resolution warning.
pub const MIN_ELEMENTS_PER_PERIOD: f64 = 8.0;

/// Cell coordinate `frac(α/ε)` in `[0,1)³`; points within rounding of a period
/// boundary map to exactly 0.
pub fn map_to_cell(alpha: [f64; 3], epsilon: f64) -> [f64; 3] {
    alpha.map(|a| {
        let b = a / epsilon;
        let r = b.round();
        let b = if (b - r).abs() <= SNAP * r.abs().max(1.0) { r } else { b };
        let f = b - b.floor();
        if f >= 1.0 {
            0.0
        } else {
            f
        }
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Order {
    Zero,
    First,
    Second,
}

impl Order {
    pub fn from_int(k: u32) -> Result<Order> {
        match k {
            0 => Ok(Order::Zero),
            1 => Ok(Order::First),
            2 => Ok(Order::Second),
            _ => Err(Error::InvalidArgument(format!("reconstruction order {k} is not 0, 1 or 2"))),
        }
    }

    pub fn as_int(self) -> u32 {
        match self {
            Order::Zero => 0,
            Order::First => 1,
            Order::Second => 2,
        }
    }
}

/// Reconstructed displacement fields at the evaluation nodes.
#[derive(Debug, Clone, PartialEq)]
pub struct TwoScaleField {
    pub epsilon: f64,
    pub u0: Vec<[f64; 3]>,
    pub u1: Vec<[f64; 3]>,
    pub u2: Vec<[f64; 3]>,
    /// Cell phase under each evaluation element's centroid.
    pub phase: Vec<u32>,
}

impl TwoScaleField {
    pub fn displacement(&self, order: Order) -> &[[f64; 3]] {
        match order {
            Order::Zero => &self.u0,
            Order::First => &self.u1,
            Order::Second => &self.u2,
        }
    }
}

fn bary_sym<const N: usize>(values: &[[f64; N]], t: &[usize; 4], w: &[f64; 4]) -> [f64; N] {
    let mut v = [0.0; N];
    for k in 0..4 {
        for c in 0..N {
            v[c] += w[k] * values[t[k]][c];
        }
    }
    v
}

/// Evaluates `u^(0)`, `u^(1ε)` and `u^(2ε)` at every node of `eval`.
pub fn reconstruct(
    eval: &TetMesh,
    macro_mesh: &TetMesh,
    sol: &MacroSolution,
    reps: &RepresentativeSet,
    epsilon: f64,
) -> Result<TwoScaleField> {
    if !(epsilon > 0.0) {
        return Err(Error::InvalidArgument(format!("epsilon must be positive, got {epsilon}")));
    }
    check_resolution(eval, epsilon);
    let locator = Locator::new(macro_mesh);
    let samplers: Vec<CellSampler> = reps.cells.iter().map(|c| c.sampler()).collect();
    let cell_index = |alpha: [f64; 3]| -> usize {
        let target = reps.nearest(alpha);
        reps.cells.iter().position(|c| std::ptr::eq(c, target)).unwrap()
    };
    let nodes: Vec<([f64; 3], [f64; 3], [f64; 3])> = eval
        .nodes
        .par_iter()
        .map(|&p| {
            let (e, w) = locator.locate(p).ok_or(Error::OutsideMesh(p))?;
            let t = &macro_mesh.tets[e];
            let u0 = bary_sym(&sol.u0, t, &w);
            let strain = engineering(&bary_sym(&sol.e0star_nodal, t, &w));
            let grad: [[f64; 6]; 3] = {
                let mut g = [[0.0; 6]; 3];
                for k in 0..4 {
                    for j in 0..3 {
                        for c in 0..6 {
                            g[j][c] += w[k] * sol.grad_nodal[t[k]][j][c];
                        }
                    }
                }
                g.map(|row| engineering(&row))
            };
            let ci = cell_index(p);
            let cell = &reps.cells[ci];
            let sampler = &samplers[ci];
            let at = sampler.locate(map_to_cell(p, epsilon))?;
            let mut first = [0.0; 3];
            for mn in 0..6 {
                if strain[mn] != 0.0 {
                    let n = sampler.interpolate(&cell.n1[mn], at);
                    for c in 0..3 {
                        first[c] += n[c] * strain[mn];
                    }
                }
            }
            let mut second = [0.0; 3];
            if !cell.n2.is_empty() {
                for j in 0..3 {
                    for mn in 0..6 {
                        if grad[j][mn] != 0.0 {
                            let n = sampler.interpolate(&cell.n2[n2_index(j, mn)], at);
                            for c in 0..3 {
                                second[c] += n[c] * grad[j][mn];
                            }
                        }
                    }
                }
                for mn in 0..6 {
                    if strain[mn] != 0.0 {
                        let n = sampler.interpolate(&cell.w[mn], at);
                        for c in 0..3 {
                            second[c] += n[c] * strain[mn];
                        }
                    }
                }
            }
            Ok((u0, first, second))
        })
        .collect::<Result<_>>()?;
    let u0: Vec<[f64; 3]> = nodes.iter().map(|n| n.0).collect();
    let u1: Vec<[f64; 3]> = nodes.iter().map(|n| [0, 1, 2].map(|c| n.0[c] + epsilon * n.1[c])).collect();
    let u2: Vec<[f64; 3]> = nodes
        .iter()
        .zip(&u1)
        .map(|(n, u)| [0, 1, 2].map(|c| u[c] + epsilon * epsilon * n.2[c]))
        .collect();
    let phase = element_phases(eval, reps, epsilon)?;
    Ok(TwoScaleField { epsilon, u0, u1, u2, phase })
}

/// Phase tag of the cell element under each evaluation element centroid.
pub fn element_phases(eval: &TetMesh, reps: &RepresentativeSet, epsilon: f64) -> Result<Vec<u32>> {
    let samplers: Vec<CellSampler> = reps.cells.iter().map(|c| c.sampler()).collect();
    (0..eval.element_count())
        .into_par_iter()
        .map(|e| {
            let c = eval.centroid(e);
            let target = reps.nearest(c);
            let ci = reps.cells.iter().position(|x| std::ptr::eq(x, target)).unwrap();
            let (ce, _) = samplers[ci].locate(map_to_cell(c, epsilon))?;
            Ok(reps.cells[ci].mesh.material_tag[ce])
        })
        .collect()
}

fn check_resolution(eval: &TetMesh, epsilon: f64) {
    if let Some(g) = eval.grid {
        let h = g.spacing();
        let per_period = h.iter().map(|h| epsilon / h).fold(f64::INFINITY, f64::min);
        if per_period < MIN_ELEMENTS_PER_PERIOD {
            log::warn!(
                "evaluation mesh resolves one period with {per_period:.1} elements (minimum {MIN_ELEMENTS_PER_PERIOD})"
            );
        }
    }
}

/// Strain of a reconstructed displacement by direct differentiation on the
/// evaluation mesh (full curvilinear operator).
pub fn reconstruct_strain(eval: &TetMesh, u: &[[f64; 3]], model: &LameModel) -> Result<Vec<Sym3>> {
    element_strain(eval, u, model, StrainMode::Macro)
}

/// Local constitutive law with each element's own phase tensor.
pub fn reconstruct_stress(strain: &[Sym3], phase: &[u32], materials: &MaterialTable) -> Result<Vec<Sym3>> {
    strain.iter().zip(phase).map(|(e, &p)| Ok(materials.tensor(p)?.stress(e))).collect()
}
