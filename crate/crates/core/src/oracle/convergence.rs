//! ε-convergence harness comparing two-scale approximants with fine-scale solves.

use crate::cell::{solve_cell, CellOptions};
use crate::error::Result;
use crate::fem::SolverOptions;
use crate::macroscale::{
    select_representative_points, solve_homogenized, BodyForce, BoundaryCondition, LoadCase, RepresentativeSet,
};
use crate::mesh::{generate_macro_mesh, generate_unit_cell_mesh, Face, MacroDomain, PhaseGeometry};
use crate::metric::LameModel;
use crate::tensor::{isotropic_tensor, MaterialTable};
use crate::twoscale::{reconstruct, Order};

use super::dns::{dns_solve, periods};
use super::norms::error_norms;

/// How the homogenized problem is discretized for each ε.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum MacroResolution {
    /// Reuse the fine-scale mesh lattice.
    SameAsFine,
    Fixed([usize; 3]),
}

#[derive(Debug, Clone)]
pub struct ConvergenceFixture {
    pub domain: MacroDomain,
    pub model: LameModel,
    pub phase: PhaseGeometry,
    pub materials: MaterialTable,
    pub loads: LoadCase,
    /// Fine-scale elements per period and axis.
    pub per_period: usize,
    /// Cell mesh subdivisions per axis.
    pub cell_n: usize,
    pub macro_resolution: MacroResolution,
    pub representative_count: usize,
    pub solver: SolverOptions,
}

impl ConvergenceFixture {
    /// Clamped plate `[0, 1/2]² × [0, 1/4]` under a uniform in-plane body
    /// force. The cell is a symmetric soft/stiff/soft stack through the
    /// thickness (E 1 and 10, ν 0 and 0.45), so every ε with an integer number
    /// of periods gives a stack symmetric about the mid-plane.
    pub fn laminated_plate() -> Self {
        let clamp = |face| BoundaryCondition::Dirichlet { face, values: [Some(0.0); 3] };
        let stiff = isotropic_tensor(10.0, 0.45).expect("valid constants");
        let soft = isotropic_tensor(1.0, 0.0).expect("valid constants");
        ConvergenceFixture {
            domain: MacroDomain::Box { lo: [0.0; 3], hi: [0.5, 0.5, 0.25] },
            model: LameModel::Plate,
            phase: PhaseGeometry::Laminate { axis: 2, layers: vec![(0.25, 2), (0.5, 1), (0.25, 2)] },
            materials: MaterialTable::new().with(1, stiff, None).with(2, soft, None),
            loads: LoadCase {
                body_force: BodyForce::Uniform([-1.0, 0.0, 0.0]),
                boundary: vec![clamp(Face::XMin), clamp(Face::XMax), clamp(Face::YMin), clamp(Face::YMax)],
            },
            per_period: 8,
            cell_n: 8,
            macro_resolution: MacroResolution::SameAsFine,
            representative_count: 1,
            solver: SolverOptions::default(),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ConvergenceRow {
    pub epsilon: f64,
    /// Unknowns of the fine-scale solve.
    pub dofs: usize,
    /// `‖u^ε − u^(k)‖_{L²}` for k = 0, 1ε, 2ε.
    pub l2: [f64; 3],
    /// `|u^ε − u^(k)|_{H¹}` for k = 0, 1ε, 2ε.
    pub h1: [f64; 3],
    pub l2_rate: Option<[f64; 3]>,
    pub h1_rate: Option<[f64; 3]>,
}

impl ConvergenceRow {
    pub fn csv_header() -> &'static str {
        "epsilon,dofs,l2_u0,l2_u1,l2_u2,h1_u0,h1_u1,h1_u2,l2_rate_u0,l2_rate_u1,l2_rate_u2,h1_rate_u0,h1_rate_u1,h1_rate_u2"
    }

    pub fn csv_row(&self) -> String {
        let rate = |r: &Option<[f64; 3]>, k: usize| r.map(|v| format!("{:?}", v[k])).unwrap_or_default();
        format!(
            "{:?},{},{:?},{:?},{:?},{:?},{:?},{:?},{},{},{},{},{},{}",
            self.epsilon,
            self.dofs,
            self.l2[0],
            self.l2[1],
            self.l2[2],
            self.h1[0],
            self.h1[1],
            self.h1[2],
            rate(&self.l2_rate, 0),
            rate(&self.l2_rate, 1),
            rate(&self.l2_rate, 2),
            rate(&self.h1_rate, 0),
            rate(&self.h1_rate, 1),
            rate(&self.h1_rate, 2),
        )
    }
}

/// Outcome of checking a convergence table against the expected behaviour of
/// the two-scale solutions.
#[derive(Debug, Clone, PartialEq)]
pub struct ConvergenceVerdict {
    /// Smallest observed H¹ rate of the second-order solution.
    pub min_rate: Option<f64>,
    pub rate_ok: bool,
    /// H¹ errors strictly ordered second < first < zeroth at every ε, with
    /// the slack applied at the coarsest ε only.
    pub ordering_ok: bool,
}

impl ConvergenceVerdict {
    pub fn passed(&self) -> bool {
        self.rate_ok && self.ordering_ok
    }
}

/// Requires every consecutive H¹ rate of `u^(2ε)` to reach `min_rate` and the
/// H¹ errors to be ordered, allowing relative `slack` on the first row.
pub fn convergence_verdict(rows: &[ConvergenceRow], min_rate: f64, slack: f64) -> ConvergenceVerdict {
    let rates: Vec<f64> = rows.iter().filter_map(|r| r.h1_rate.map(|v| v[2])).collect();
    let min = rates.iter().copied().fold(None, |m: Option<f64>, r| Some(m.map_or(r, |m| m.min(r))));
    let ordering_ok = rows.iter().enumerate().all(|(i, r)| {
        let s = if i == 0 { 1.0 + slack } else { 1.0 };
        r.h1[2] < s * r.h1[1] && r.h1[1] < s * r.h1[0]
    });
    ConvergenceVerdict { min_rate: min, rate_ok: !rates.is_empty() && rates.iter().all(|&r| r >= min_rate), ordering_ok }
}

/// Solves the cell problems once, then for each ε a fine-scale reference, the
/// homogenized problem and all three reconstructions; errors are measured on
/// the fine-scale mesh.
pub fn convergence_study(fixture: &ConvergenceFixture, epsilons: &[f64]) -> Result<Vec<ConvergenceRow>> {
    let cell_mesh = generate_unit_cell_mesh(fixture.cell_n, &fixture.phase)?;
    let (lo, hi) = fixture.domain.bounds();
    let points = select_representative_points(&fixture.model, lo, hi, fixture.representative_count);
    let opts = CellOptions { solver: fixture.solver, ..Default::default() };
    let cells = points
        .iter()
        .map(|&p| solve_cell(&cell_mesh, &fixture.materials, &fixture.model, p, &opts))
        .collect::<Result<Vec<_>>>()?;
    let reps = RepresentativeSet::new(cells)?;
    let mut rows: Vec<ConvergenceRow> = Vec::with_capacity(epsilons.len());
    for &eps in epsilons {
        let dns = dns_solve(
            &fixture.domain,
            &fixture.model,
            eps,
            &fixture.phase,
            &fixture.materials,
            &fixture.loads,
            fixture.per_period,
            &fixture.solver,
        )?;
        let macro_mesh = match fixture.macro_resolution {
            MacroResolution::SameAsFine => {
                let p = periods(&fixture.domain, eps)?;
                generate_macro_mesh(&fixture.domain, p.map(|k| k * fixture.per_period))?
            }
            MacroResolution::Fixed(d) => generate_macro_mesh(&fixture.domain, d)?,
        };
        let sol = solve_homogenized(&macro_mesh, &reps, &fixture.model, &fixture.loads, &fixture.solver)?;
        let field = reconstruct(&dns.mesh, &macro_mesh, &sol, &reps, eps)?;
        let mut l2 = [0.0; 3];
        let mut h1 = [0.0; 3];
        for (k, order) in [Order::Zero, Order::First, Order::Second].into_iter().enumerate() {
            let (a, b) = error_norms(&dns.mesh, &fixture.model, &dns.solution.u, field.displacement(order))?;
            l2[k] = a;
            h1[k] = b;
        }
        let rate = |prev: &[f64; 3], cur: &[f64; 3], pe: f64| -> [f64; 3] {
            std::array::from_fn(|k| (prev[k] / cur[k]).ln() / (pe / eps).ln())
        };
        let (l2_rate, h1_rate) = match rows.last() {
            Some(p) => (Some(rate(&p.l2, &l2, p.epsilon)), Some(rate(&p.h1, &h1, p.epsilon))),
            None => (None, None),
        };
        log::info!("epsilon {eps}: L2 {l2:?}, H1 {h1:?}");
        rows.push(ConvergenceRow { epsilon: eps, dofs: dns.solution.unknowns, l2, h1, l2_rate, h1_rate });
    }
    Ok(rows)
}
