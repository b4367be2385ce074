//! Periodic cell problems at a representative macro point: first-order
//! functions `N^{mn}`, homogenized tensor `Ĉ`, metric terms `D`, and the
//! second-order functions `N^{jmn}` and `W^{mn}`.

mod archive;

use rayon::prelude::*;

pub use archive::{read_cell_archive, write_cell_archive, ARCHIVE_VERSION};

use crate::error::{Error, Result};
use crate::fem::assembly::{assemble_constrained, scatter};
use crate::fem::strain::{apply_b, b_matrix, element_dofs, geometry_of, StrainMode};
use crate::fem::{solve_constrained, Constraints, CsrMatrix, Dof, DofMap, SolverOptions};
use crate::mesh::{Locator, TetMesh};
use crate::metric::{lame_eval, LameModel, MetricSample};
use crate::tensor::{engineering, sym_get, voigt_index, ElasticTensor, MaterialTable, Sym3};

/// Nodal vector field on the cell mesh.
pub type NodalField = Vec<[f64; 3]>;

/// Relative asymmetry of the raw `Ĉ` above which a warning is issued.
pub const ASYMMETRY_LIMIT: f64 = 1e-6;
/// Relative size of `∫ rhs` tolerated before the solvability check fails.
pub const SOLVABILITY_LIMIT: f64 = 1e-8;

/// Index of the `(j, mn)` second-order load case.
pub fn n2_index(j: usize, mn: usize) -> usize {
    6 * j + mn
}

/// Everything solved on one cell at one representative point.
#[derive(Debug, Clone, PartialEq)]
pub struct CellSolutionSet {
    pub alpha_i: [f64; 3],
    pub metric: MetricSample,
    pub mesh: TetMesh,
    /// `n1[mn][node]`
    pub n1: Vec<NodalField>,
    /// `d[mn][element]`, tensor components
    pub d: Vec<Vec<Sym3>>,
    /// `n2[n2_index(j, mn)][node]`
    pub n2: Vec<NodalField>,
    /// `w[mn][node]`
    pub w: Vec<NodalField>,
    pub c_hat: ElasticTensor,
    /// Relative asymmetry of `Ĉ` before symmetrization.
    pub asymmetry: f64,
    pub config_hash: Option<String>,
}

impl CellSolutionSet {
    /// Evaluates nodal cell fields at a point of the unit cell.
    pub fn sampler(&self) -> CellSampler<'_> {
        CellSampler { set: self, locator: Locator::new(&self.mesh) }
    }
}

pub struct CellSampler<'a> {
    set: &'a CellSolutionSet,
    locator: Locator<'a>,
}

impl CellSampler<'_> {
    /// Element and barycentric weights of `beta` (already mapped into the cell).
    pub fn locate(&self, beta: [f64; 3]) -> Result<(usize, [f64; 4])> {
        self.locator.locate(beta).ok_or(Error::OutsideMesh(beta))
    }

    pub fn interpolate(&self, field: &NodalField, at: (usize, [f64; 4])) -> [f64; 3] {
        let t = &self.set.mesh.tets[at.0];
        let mut v = [0.0; 3];
        for k in 0..4 {
            for c in 0..3 {
                v[c] += at.1[k] * field[t[k]][c];
            }
        }
        v
    }
}

/// Assembled periodic cell operator with frozen metric.
pub struct CellOperator<'a> {
    pub mesh: &'a TetMesh,
    pub tensors: Vec<ElasticTensor>,
    pub metric: MetricSample,
    pub alpha_i: [f64; 3],
    map: DofMap,
    k: CsrMatrix,
    mean: Vec<Vec<f64>>,
    ones: Vec<Vec<f64>>,
    b: Vec<[[f64; 12]; 6]>,
    weight: Vec<f64>,
    volume: f64,
    solver: SolverOptions,
}

impl<'a> CellOperator<'a> {
    pub fn new(
        mesh: &'a TetMesh,
        materials: &MaterialTable,
        model: &LameModel,
        alpha_i: [f64; 3],
        solver: SolverOptions,
    ) -> Result<Self> {
        if mesh.periodic_pairs.is_empty() {
            return Err(Error::InvalidMesh("cell mesh has no periodic pairing".into()));
        }
        let metric = lame_eval(model, alpha_i)?;
        let tensors = materials.per_element(&mesh.material_tag)?;
        let map = DofMap::new(mesh.node_count(), &Constraints::periodic_zero_mean(&mesh.periodic_pairs))?;
        let mode = StrainMode::Micro(metric);
        let sys = assemble_constrained(mesh, &tensors, model, mode, &map)?;
        let mut b = Vec::with_capacity(mesh.element_count());
        let mut weight = Vec::with_capacity(mesh.element_count());
        for e in 0..mesh.element_count() {
            let g = geometry_of(mesh, e)?;
            b.push(b_matrix(&g, &metric, false));
            weight.push(g.volume * metric.hprod);
        }
        let volume = weight.iter().sum();
        let mean = map.mean_constraints(mesh);
        let ones = (0..3)
            .map(|c| {
                let mut t = vec![0.0; map.n_free()];
                for n in 0..mesh.node_count() {
                    if let Dof::Free(i) = map.dof(n, c) {
                        t[i] = 1.0;
                    }
                }
                t
            })
            .collect();
        Ok(CellOperator { mesh, tensors, metric, alpha_i, map, k: sys.k, mean, ones, b, weight, volume, solver })
    }

    pub fn dof_count(&self) -> usize {
        self.map.n_free()
    }

    /// `H`-weighted cell measure.
    pub fn volume(&self) -> f64 {
        self.volume
    }

    /// Engineering strain of a nodal field in element `e`, tensor components.
    pub fn strain(&self, field: &NodalField, e: usize) -> Sym3 {
        apply_b(&self.b[e], &element_dofs(field, &self.mesh.tets[e]))
    }

    fn element_load(&self, e: usize, stress: &Sym3, body: [f64; 3], rhs: &mut [f64]) {
        // ∫ body·v − ∫ stress:e(v)
        let w = self.weight[e];
        // σ:e(v) pairs tensor stress components with engineering strains
        let s = stress;
        let mut fe = [0.0; 12];
        for a in 0..12 {
            let mut acc = 0.0;
            for r in 0..6 {
                acc += self.b[e][r][a] * s[r];
            }
            fe[a] = -w * acc + w * 0.25 * body[a % 3];
        }
        scatter(&self.map, &self.mesh.tets[e], &fe, rhs);
    }

    /// Builds a load `∫ body_e·v − ∫ stress_e:e(v)` from per-element data.
    pub fn load(&self, per_element: impl Fn(usize) -> (Sym3, [f64; 3])) -> Vec<f64> {
        let mut rhs = vec![0.0; self.map.n_free()];
        for e in 0..self.mesh.element_count() {
            let (s, f) = per_element(e);
            self.element_load(e, &s, f, &mut rhs);
        }
        rhs
    }

    /// Checks `∫ rhs_c = 0` per component, removes the residual mean, and
    /// returns the largest relative magnitude removed. Magnitudes are relative
    /// to the larger of `Σ|rhs|` and the unit-strain force scale `max|C| |Q|`.
    pub fn enforce_solvability(&self, rhs: &mut [f64], case: &str) -> Result<f64> {
        let c_max = self.tensors.iter().map(|c| c.max_abs()).fold(0.0, f64::max);
        let scale = rhs.iter().map(|v| v.abs()).sum::<f64>().max(c_max * self.volume);
        let mut worst: f64 = 0.0;
        for c in 0..3 {
            let total: f64 = self.ones[c].iter().zip(rhs.iter()).map(|(t, r)| t * r).sum();
            let rel = if scale > 0.0 { total.abs() / scale } else { 0.0 };
            if rel > SOLVABILITY_LIMIT {
                return Err(Error::Solvability { case: case.to_string(), residual: rel, limit: SOLVABILITY_LIMIT });
            }
            let wsum: f64 = self.mean[c].iter().sum();
            for (r, w) in rhs.iter_mut().zip(&self.mean[c]) {
                *r -= total * w / wsum;
            }
            worst = worst.max(rel);
        }
        if worst > 0.0 {
            log::debug!("load case {case}: removed relative mean {worst:e}");
        }
        Ok(worst)
    }

    /// Periodic zero-mean solution for each load; results keep input order.
    pub fn solve_many(&self, loads: &[Vec<f64>]) -> Result<Vec<NodalField>> {
        loads
            .par_iter()
            .map(|b| {
                let (x, _, _) = solve_constrained(&self.k, b, &self.mean, &self.solver)?;
                Ok(self.map.expand(&x))
            })
            .collect()
    }

    /// Same load solved with one pinned node, mean subtracted afterwards.
    pub fn solve_pinned(&self, load: &[f64]) -> Result<NodalField> {
        let mut cons = Constraints { periodic: self.mesh.periodic_pairs.clone(), ..Default::default() };
        let pin = self.map.master(0);
        for c in 0..3 {
            cons.dirichlet.push((pin, c, 0.0));
        }
        let pinned = DofMap::new(self.mesh.node_count(), &cons)?;
        // move the load from the zero-mean numbering to the pinned one
        let mut full = vec![0.0; 3 * self.mesh.node_count()];
        for n in 0..self.mesh.node_count() {
            if self.map.master(n) != n {
                continue;
            }
            for c in 0..3 {
                if let Dof::Free(i) = self.map.dof(n, c) {
                    full[3 * n + c] = load[i];
                }
            }
        }
        let b = pinned.restrict(&full);
        let model = LameModel::Custom(std::sync::Arc::new({
            let m = self.metric;
            move |_: [f64; 3]| (m.h, m.dh)
        }));
        let sys = assemble_constrained(self.mesh, &self.tensors, &model, StrainMode::Micro(self.metric), &pinned)?;
        let (x, _) = crate::fem::solve_sparse(&sys.k, &b, &self.solver)?;
        let mut u = pinned.expand(&x);
        let nodal = crate::fem::nodal_volumes(self.mesh);
        let vol: f64 = nodal.iter().sum();
        for c in 0..3 {
            let mean: f64 = u.iter().zip(&nodal).map(|(v, w)| v[c] * w).sum::<f64>() / vol;
            u.iter_mut().for_each(|v| v[c] -= mean);
        }
        Ok(u)
    }

    /// `H`-weighted cell average of a nodal field, per component.
    pub fn mean_of(&self, field: &NodalField) -> [f64; 3] {
        let nodal = crate::fem::nodal_volumes(self.mesh);
        let vol: f64 = nodal.iter().sum();
        [0, 1, 2].map(|c| field.iter().zip(&nodal).map(|(v, w)| v[c] * w).sum::<f64>() / vol)
    }
}

/// Unit engineering strain of load case `mn`.
pub fn unit_strain(mn: usize) -> [f64; 6] {
    let mut g = [0.0; 6];
    g[mn] = 1.0;
    g
}

/// Six first-order cell functions `N^{mn}`.
pub fn solve_first_order(op: &CellOperator) -> Result<Vec<NodalField>> {
    let loads: Vec<Vec<f64>> = (0..6)
        .map(|mn| op.load(|e| (op.tensors[e].apply_engineering(&unit_strain(mn)), [0.0; 3])))
        .collect();
    op.solve_many(&loads)
}

/// Corrected stress `C(E_mn + e(N^{mn}))` in element `e`.
fn corrected_stress(op: &CellOperator, n1: &[NodalField], mn: usize, e: usize) -> Sym3 {
    let mut g = engineering(&op.strain(&n1[mn], e));
    g[mn] += 1.0;
    op.tensors[e].apply_engineering(&g)
}

/// Volume-averaged corrected tensor, symmetrized; returns the raw relative asymmetry.
pub fn homogenized_tensor(op: &CellOperator, n1: &[NodalField]) -> (ElasticTensor, f64) {
    let mut m = [[0.0; 6]; 6];
    for mn in 0..6 {
        for e in 0..op.mesh.element_count() {
            let s = corrected_stress(op, n1, mn, e);
            for a in 0..6 {
                m[a][mn] += op.weight[e] * s[a];
            }
        }
    }
    let mut worst: f64 = 0.0;
    let mut scale: f64 = 0.0;
    for a in 0..6 {
        for b in 0..6 {
            m[a][b] /= op.volume;
            scale = scale.max(m[a][b].abs());
        }
    }
    for a in 0..6 {
        for b in 0..6 {
            worst = worst.max((m[a][b] - m[b][a]).abs());
        }
    }
    let asym = if scale > 0.0 { worst / scale } else { 0.0 };
    (ElasticTensor::from_matrix(m), asym)
}

fn centroid_value(field: &NodalField, t: &[usize; 4]) -> [f64; 3] {
    let mut v = [0.0; 3];
    for &n in t {
        for c in 0..3 {
            v[c] += 0.25 * field[n][c];
        }
    }
    v
}

/// Metric-coupling tensors `D^{mn}` per element (centroid values of `N^{mn}`).
pub fn compute_d(op: &CellOperator, n1: &[NodalField]) -> Vec<Vec<Sym3>> {
    let a = |i: usize, j: usize| op.metric.coupling(i, j);
    (0..6)
        .map(|mn| {
            op.mesh
                .tets
                .iter()
                .map(|t| {
                    let n = centroid_value(&n1[mn], t);
                    [
                        a(0, 1) * n[1] + a(0, 2) * n[2],
                        a(1, 2) * n[2] + a(1, 0) * n[0],
                        a(2, 0) * n[0] + a(2, 1) * n[1],
                        0.5 * (-a(1, 0) * n[1] - a(0, 1) * n[0]),
                        0.5 * (-a(2, 1) * n[2] - a(1, 2) * n[1]),
                        0.5 * (-a(2, 0) * n[2] - a(0, 2) * n[0]),
                    ]
                })
                .collect()
        })
        .collect()
}

/// `X^{mn}_ij = C(E_mn + e(N^{mn}))_ij − Ĉ_ijmn` per element.
fn flux_deviation(op: &CellOperator, n1: &[NodalField], c_hat: &ElasticTensor, mn: usize) -> Vec<Sym3> {
    (0..op.mesh.element_count())
        .map(|e| {
            let s = corrected_stress(op, n1, mn, e);
            std::array::from_fn(|a| s[a] - c_hat.get(a, mn))
        })
        .collect()
}

/// Eighteen second-order functions `N^{jmn}`, indexed by [`n2_index`].
pub fn solve_second_order_n2(op: &CellOperator, n1: &[NodalField], c_hat: &ElasticTensor) -> Result<Vec<NodalField>> {
    let mut loads = Vec::with_capacity(18);
    for j in 0..3 {
        for mn in 0..6 {
            let x = flux_deviation(op, n1, c_hat, mn);
            let mut rhs = op.load(|e| {
                let n = centroid_value(&n1[mn], &op.mesh.tets[e]);
                let mut t = [0.0; 6];
                for a in 0..3 {
                    for b in a..3 {
                        let v = 0.5 * (if a == j { n[b] } else { 0.0 } + if b == j { n[a] } else { 0.0 });
                        t[voigt_index(a, b)] = v;
                    }
                }
                let s = op.tensors[e].stress(&t);
                let body = [0, 1, 2].map(|i| sym_get(&x[e], i, j));
                (s, body)
            });
            op.enforce_solvability(&mut rhs, &format!("N2 j={} mn={}", j + 1, crate::tensor::PAIR_LABELS[mn]))?;
            loads.push(rhs);
        }
    }
    op.solve_many(&loads)
}

/// Six second-order functions `W^{mn}` driven by the metric coupling.
pub fn solve_second_order_w(
    op: &CellOperator,
    n1: &[NodalField],
    c_hat: &ElasticTensor,
    d: &[Vec<Sym3>],
) -> Result<Vec<NodalField>> {
    let m = &op.metric;
    let mut loads = Vec::with_capacity(6);
    for mn in 0..6 {
        let x = flux_deviation(op, n1, c_hat, mn);
        let mut rhs = op.load(|e| {
            let xe = &x[e];
            let f: [f64; 3] = std::array::from_fn(|i| {
                let mut v = 0.0;
                for j in 0..3 {
                    v -= m.divergence_weight(j) * sym_get(xe, i, j);
                    if j != i {
                        v -= m.coupling(i, j) * sym_get(xe, i, j);
                        v += m.coupling(j, i) * sym_get(xe, j, j);
                    }
                }
                v
            });
            let s = op.tensors[e].stress(&d[mn][e]);
            (s, f.map(|v| -v))
        });
        op.enforce_solvability(&mut rhs, &format!("W mn={}", crate::tensor::PAIR_LABELS[mn]))?;
        loads.push(rhs);
    }
    op.solve_many(&loads)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CellOptions {
    pub solver: SolverOptions,
    /// Escalate the `Ĉ` asymmetry warning to an error.
    pub strict: bool,
    /// Skip `N^{jmn}` and `W^{mn}` when false.
    pub second_order: bool,
}

impl Default for CellOptions {
    fn default() -> Self {
        CellOptions { solver: SolverOptions::default(), strict: false, second_order: true }
    }
}

/// Runs every cell problem at `alpha_i`.
pub fn solve_cell(
    mesh: &TetMesh,
    materials: &MaterialTable,
    model: &LameModel,
    alpha_i: [f64; 3],
    opts: &CellOptions,
) -> Result<CellSolutionSet> {
    let op = CellOperator::new(mesh, materials, model, alpha_i, opts.solver)?;
    log::info!("cell at {alpha_i:?}: {} unknowns", op.dof_count());
    let n1 = solve_first_order(&op)?;
    let (c_hat, asymmetry) = homogenized_tensor(&op, &n1);
    if asymmetry > ASYMMETRY_LIMIT {
        if opts.strict {
            return Err(Error::Asymmetry(asymmetry));
        }
        log::warn!("homogenized tensor asymmetry {asymmetry:e} exceeds {ASYMMETRY_LIMIT:e}");
    }
    c_hat.ensure_positive_definite("homogenized tensor")?;
    let d = compute_d(&op, &n1);
    let (n2, w) = if opts.second_order {
        let n2 = solve_second_order_n2(&op, &n1, &c_hat)?;
        // every W source term carries a metric derivative
        let w = if op.metric.dh.iter().flatten().all(|v| *v == 0.0) {
            vec![vec![[0.0; 3]; mesh.node_count()]; 6]
        } else {
            solve_second_order_w(&op, &n1, &c_hat, &d)?
        };
        (n2, w)
    } else {
        (Vec::new(), Vec::new())
    };
    Ok(CellSolutionSet {
        alpha_i,
        metric: op.metric,
        mesh: mesh.clone(),
        n1,
        d,
        n2,
        w,
        c_hat,
        asymmetry,
        config_hash: None,
    })
}
