//! Homogenized macroscale problem over a graded effective medium, and
//! post-processing of the macroscopic curvilinear strain.

use crate::cell::CellSolutionSet;
use crate::error::{Error, Result};
use crate::fem::assembly::{assemble_constrained, body_force_load, traction_load};
use crate::fem::strain::{geometry_of, StrainMode};
use crate::fem::{element_strain, solve_sparse, Constraints, DofMap, SolverOptions};
use crate::mesh::{Face, TetMesh};
use crate::metric::{lame_eval, LameModel};
use crate::tensor::{ElasticTensor, Sym3};

/// Representative points: Plate uses the domain centroid; curved models use a
/// uniform lattice (`count` points per axis, ends included) along the
/// coordinates on which `H` depends.
pub fn select_representative_points(model: &LameModel, lo: [f64; 3], hi: [f64; 3], count: usize) -> Vec<[f64; 3]> {
    let center = [0, 1, 2].map(|a| 0.5 * (lo[a] + hi[a]));
    let axes = model.varying_axes();
    if axes.is_empty() {
        return vec![center];
    }
    let count = count.max(1);
    let coord = |a: usize, k: usize| {
        if count == 1 {
            center[a]
        } else {
            lo[a] + (hi[a] - lo[a]) * k as f64 / (count - 1) as f64
        }
    };
    let total = count.pow(axes.len() as u32);
    (0..total)
        .map(|flat| {
            let mut p = center;
            let mut rem = flat;
            // last varying axis runs fastest
            for &a in axes.iter().rev() {
                p[a] = coord(a, rem % count);
                rem /= count;
            }
            p
        })
        .collect()
}

/// Cell solutions on a tensor-product lattice of representative points.
#[derive(Debug, Clone)]
pub struct RepresentativeSet {
    pub cells: Vec<CellSolutionSet>,
    /// Lattice axes (macro coordinate indices) and their sorted coordinates.
    pub axes: Vec<(usize, Vec<f64>)>,
}

impl RepresentativeSet {
    /// Infers the lattice from the points; cells may arrive in any order.
    pub fn new(mut cells: Vec<CellSolutionSet>) -> Result<Self> {
        if cells.is_empty() {
            return Err(Error::InvalidArgument("no representative points".into()));
        }
        let mut axes = Vec::new();
        for a in 0..3 {
            let mut v: Vec<f64> = cells.iter().map(|c| c.alpha_i[a]).collect();
            v.sort_by(f64::total_cmp);
            v.dedup();
            if v.len() > 1 {
                axes.push((a, v));
            }
        }
        let expected: usize = axes.iter().map(|(_, v)| v.len()).product();
        if expected != cells.len() {
            return Err(Error::InvalidArgument(format!(
                "{} representative points do not form a tensor-product lattice",
                cells.len()
            )));
        }
        let key = |c: &CellSolutionSet| -> Vec<usize> {
            axes.iter().map(|(a, v)| v.iter().position(|x| *x == c.alpha_i[*a]).unwrap()).collect()
        };
        cells.sort_by_key(|c| key(c));
        Ok(RepresentativeSet { cells, axes })
    }

    fn flat_index(&self, idx: &[usize]) -> usize {
        let mut f = 0;
        for (k, (_, v)) in self.axes.iter().enumerate() {
            f = f * v.len() + idx[k];
        }
        f
    }

    /// Per-axis lower index and weight of the clamped interpolation cell.
    fn bracket(&self, alpha: [f64; 3]) -> Vec<(usize, f64)> {
        self.axes
            .iter()
            .map(|(a, v)| {
                let x = alpha[*a];
                if x <= v[0] {
                    return (0, 0.0);
                }
                if x >= v[v.len() - 1] {
                    return (v.len() - 2, 1.0);
                }
                let i = v.partition_point(|p| *p <= x) - 1;
                (i, (x - v[i]) / (v[i + 1] - v[i]))
            })
            .collect()
    }

    /// Componentwise multilinear interpolation of `Ĉ`, clamped at lattice ends.
    pub fn interpolate_homogenized(&self, alpha: [f64; 3]) -> ElasticTensor {
        if self.axes.is_empty() {
            return self.cells[0].c_hat;
        }
        let br = self.bracket(alpha);
        let n = self.axes.len();
        let mut acc = ElasticTensor::zero();
        for corner in 0..(1usize << n) {
            let mut w = 1.0;
            let mut idx = Vec::with_capacity(n);
            for (k, &(i, t)) in br.iter().enumerate() {
                if corner >> k & 1 == 1 {
                    w *= t;
                    idx.push(i + 1);
                } else {
                    w *= 1.0 - t;
                    idx.push(i);
                }
            }
            if w != 0.0 {
                acc = acc.add(&self.cells[self.flat_index(&idx)].c_hat.scaled(w));
            }
        }
        acc
    }

    /// Cell whose representative point is nearest to `alpha` along the lattice axes.
    pub fn nearest(&self, alpha: [f64; 3]) -> &CellSolutionSet {
        let idx: Vec<usize> = self
            .axes
            .iter()
            .map(|(a, v)| {
                let x = alpha[*a];
                let mut best = 0;
                for (k, p) in v.iter().enumerate() {
                    if (p - x).abs() < (v[best] - x).abs() {
                        best = k;
                    }
                }
                best
            })
            .collect();
        &self.cells[self.flat_index(&idx)]
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum BoundaryCondition {
    /// Prescribed values on the listed components of every node of `face`.
    Dirichlet { face: Face, values: [Option<f64>; 3] },
    /// Surface load on `face`, optionally restricted to facets whose centroid
    /// lies in the box `patch`.
    Traction { face: Face, traction: [f64; 3], patch: Option<([f64; 3], [f64; 3])> },
}

#[derive(Debug, Clone, PartialEq)]
pub enum BodyForce {
    Uniform([f64; 3]),
    PerElement(Vec<[f64; 3]>),
}

impl BodyForce {
    pub fn at(&self, e: usize) -> [f64; 3] {
        match self {
            BodyForce::Uniform(f) => *f,
            BodyForce::PerElement(v) => v[e],
        }
    }

    pub fn scaled(&self, s: f64) -> BodyForce {
        match self {
            BodyForce::Uniform(f) => BodyForce::Uniform(f.map(|v| v * s)),
            BodyForce::PerElement(v) => BodyForce::PerElement(v.iter().map(|f| f.map(|x| x * s)).collect()),
        }
    }
}

/// Loads and supports of a boundary-value problem on a macro mesh.
#[derive(Debug, Clone, PartialEq)]
pub struct LoadCase {
    pub body_force: BodyForce,
    pub boundary: Vec<BoundaryCondition>,
}

impl LoadCase {
    /// Multiplies every load (not the prescribed displacements) by `s`.
    pub fn scaled(&self, s: f64) -> LoadCase {
        LoadCase {
            body_force: self.body_force.scaled(s),
            boundary: self
                .boundary
                .iter()
                .map(|b| match b {
                    BoundaryCondition::Traction { face, traction, patch } => BoundaryCondition::Traction {
                        face: *face,
                        traction: traction.map(|v| v * s),
                        patch: *patch,
                    },
                    other => other.clone(),
                })
                .collect(),
        }
    }
}

/// Single-scale elastic solve with per-element tensors under the curvilinear
/// strain operator and metric weight `H`. Returns nodal displacements and the
/// reduced system data used for energy checks.
pub fn solve_elastic(
    mesh: &TetMesh,
    tensors: &[ElasticTensor],
    model: &LameModel,
    loads: &LoadCase,
    opts: &SolverOptions,
) -> Result<ElasticSolution> {
    let mut cons = Constraints::default();
    for bc in &loads.boundary {
        if let BoundaryCondition::Dirichlet { face, values } = bc {
            for n in mesh.face_nodes(*face) {
                for (c, v) in values.iter().enumerate() {
                    if let Some(v) = v {
                        cons.dirichlet.push((n, c, *v));
                    }
                }
            }
        }
    }
    if cons.dirichlet.is_empty() {
        return Err(Error::InvalidArgument("no Dirichlet support: rigid motions are not fixed".into()));
    }
    let map = DofMap::new(mesh.node_count(), &cons)?;
    let sys = assemble_constrained(mesh, tensors, model, StrainMode::Macro, &map)?;
    let mut rhs = body_force_load(mesh, model, &|e| loads.body_force.at(e), &map)?;
    for bc in &loads.boundary {
        if let BoundaryCondition::Traction { face, traction, patch } = bc {
            let select = |c: [f64; 3]| match patch {
                Some((lo, hi)) => (0..3).all(|a| c[a] >= lo[a] && c[a] <= hi[a]),
                None => true,
            };
            let t = traction_load(mesh, model, *face, *traction, &select, &map)?;
            rhs.iter_mut().zip(&t).for_each(|(r, v)| *r += v);
        }
    }
    let external = rhs.clone();
    rhs.iter_mut().zip(&sys.lift).for_each(|(r, v)| *r += v);
    let (x, stats) = solve_sparse(&sys.k, &rhs, opts)?;
    log::info!("elastic solve: {} unknowns, {} iterations, residual {:e}", map.n_free(), stats.iterations, stats.residual);
    let energy = crate::fem::sparse::dot(&x, &sys.k.matvec(&x));
    let work = crate::fem::sparse::dot(&x, &external);
    Ok(ElasticSolution { u: map.expand(&x), energy, work, unknowns: map.n_free() })
}

#[derive(Debug, Clone, PartialEq)]
pub struct ElasticSolution {
    pub u: Vec<[f64; 3]>,
    /// `xᵀ K x` over the free unknowns.
    pub energy: f64,
    /// External load work `fᵀ x` over the free unknowns.
    pub work: f64,
    pub unknowns: usize,
}

/// Macroscale displacement with recovered strain data.
#[derive(Debug, Clone, PartialEq)]
pub struct MacroSolution {
    pub u0: Vec<[f64; 3]>,
    /// Per element, tensor components.
    pub e0star: Vec<Sym3>,
    /// Per element, `grad_e0star[e][j] = ψ_j(e0star)` of the recovered nodal field.
    pub grad_e0star: Vec<[Sym3; 3]>,
    /// Elements with a node on the domain boundary (one-sided averaging).
    pub boundary_element: Vec<bool>,
    /// Volume-averaged nodal strain.
    pub e0star_nodal: Vec<Sym3>,
    /// Volume-averaged nodal strain gradient.
    pub grad_nodal: Vec<[Sym3; 3]>,
    pub energy: f64,
    pub work: f64,
}

pub fn element_tensors(mesh: &TetMesh, reps: &RepresentativeSet) -> Vec<ElasticTensor> {
    (0..mesh.element_count()).map(|e| reps.interpolate_homogenized(mesh.centroid(e))).collect()
}

/// Solves the homogenized problem and post-processes the macro strain.
pub fn solve_homogenized(
    mesh: &TetMesh,
    reps: &RepresentativeSet,
    model: &LameModel,
    loads: &LoadCase,
    opts: &SolverOptions,
) -> Result<MacroSolution> {
    let tensors = element_tensors(mesh, reps);
    let sol = solve_elastic(mesh, &tensors, model, loads, opts)?;
    let e0star = macro_strain_e0star(mesh, &sol.u, model)?;
    let rec = macro_strain_gradient(mesh, &e0star, model)?;
    Ok(MacroSolution {
        u0: sol.u,
        e0star,
        grad_e0star: rec.gradient,
        boundary_element: rec.boundary_element,
        e0star_nodal: rec.nodal,
        grad_nodal: rec.gradient_nodal,
        energy: sol.energy,
        work: sol.work,
    })
}

/// Per-element macroscopic strain with all metric coupling terms.
pub fn macro_strain_e0star(mesh: &TetMesh, u0: &[[f64; 3]], model: &LameModel) -> Result<Vec<Sym3>> {
    element_strain(mesh, u0, model, StrainMode::Macro)
}

#[derive(Debug, Clone, PartialEq)]
pub struct StrainRecovery {
    pub nodal: Vec<Sym3>,
    pub gradient: Vec<[Sym3; 3]>,
    pub gradient_nodal: Vec<[Sym3; 3]>,
    pub boundary_element: Vec<bool>,
}

fn nodal_average<T: Copy, const N: usize>(mesh: &TetMesh, values: &[[T; N]], zero: [T; N]) -> Vec<[T; N]>
where
    T: std::ops::AddAssign + std::ops::Mul<f64, Output = T>,
{
    let mut acc = vec![zero; mesh.node_count()];
    let mut w = vec![0.0; mesh.node_count()];
    for (e, t) in mesh.tets.iter().enumerate() {
        let v = mesh.volume_of(e);
        for &n in t {
            w[n] += v;
            for k in 0..N {
                acc[n][k] += values[e][k] * v;
            }
        }
    }
    for (a, wn) in acc.iter_mut().zip(&w) {
        if *wn > 0.0 {
            for x in a.iter_mut() {
                *x = *x * (1.0 / wn);
            }
        }
    }
    acc
}

/// Element-average recovery: volume-weighted nodal averages of `e0star`,
/// then the element gradient of that nodal field scaled by `1/H_j`.
pub fn macro_strain_gradient(mesh: &TetMesh, e0star: &[Sym3], model: &LameModel) -> Result<StrainRecovery> {
    let nodal = nodal_average(mesh, e0star, [0.0; 6]);
    let mut gradient = Vec::with_capacity(mesh.element_count());
    for (e, t) in mesh.tets.iter().enumerate() {
        let g = geometry_of(mesh, e)?;
        let m = lame_eval(model, mesh.centroid(e))?;
        let mut d = [[0.0; 6]; 3];
        for j in 0..3 {
            for (a, &n) in t.iter().enumerate() {
                for c in 0..6 {
                    d[j][c] += g.grads[a][j] * nodal[n][c];
                }
            }
            for c in 0..6 {
                d[j][c] /= m.h[j];
            }
        }
        gradient.push(d);
    }
    let flat: Vec<[f64; 18]> = gradient.iter().map(|g| std::array::from_fn(|k| g[k / 6][k % 6])).collect();
    let gradient_nodal = nodal_average(mesh, &flat, [0.0; 18])
        .into_iter()
        .map(|v| std::array::from_fn(|j| std::array::from_fn(|c| v[6 * j + c])))
        .collect();
    let on_boundary = mesh.boundary_node_mask();
    let boundary_element = mesh.tets.iter().map(|t| t.iter().any(|&n| on_boundary[n])).collect();
    Ok(StrainRecovery { nodal, gradient, gradient_nodal, boundary_element })
}
