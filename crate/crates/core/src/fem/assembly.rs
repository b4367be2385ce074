//! Metric-weighted stiffness and load assembly.

use super::constraints::{Dof, DofMap};
use super::sparse::CsrMatrix;
use super::strain::{b_matrix, geometry_of, StrainMode};
use crate::error::Result;
use crate::mesh::{Face, TetMesh};
use crate::metric::{lame_eval, LameModel};
use crate::tensor::ElasticTensor;

/// Reduced stiffness plus the load induced by prescribed values.
#[derive(Debug, Clone)]
pub struct ConstrainedSystem {
    pub k: CsrMatrix,
    pub lift: Vec<f64>,
}

/// `vol · H · Bᵀ C B`
pub fn element_stiffness(b: &[[f64; 12]; 6], c: &ElasticTensor, weight: f64) -> [[f64; 12]; 12] {
    let cm = c.matrix();
    let mut cb = [[0.0; 12]; 6];
    for r in 0..6 {
        for k in 0..6 {
            let v = cm[r][k];
            if v != 0.0 {
                for col in 0..12 {
                    cb[r][col] += v * b[k][col];
                }
            }
        }
    }
    let mut ke = [[0.0; 12]; 12];
    for a in 0..12 {
        for bb in a..12 {
            let mut s = 0.0;
            for r in 0..6 {
                s += b[r][a] * cb[r][bb];
            }
            ke[a][bb] = s * weight;
            ke[bb][a] = s * weight;
        }
    }
    ke
}

fn check_tensors(tensors: &[ElasticTensor]) -> Result<()> {
    let mut last: Option<&ElasticTensor> = None;
    for (e, c) in tensors.iter().enumerate() {
        if last != Some(c) {
            c.ensure_positive_definite(&format!("element {e}"))?;
            last = Some(c);
        }
    }
    Ok(())
}

/// Assembles `∫ C e(u):e(v) H` directly into the reduced unknowns of `map`.
pub fn assemble_constrained(
    mesh: &TetMesh,
    tensors: &[ElasticTensor],
    model: &LameModel,
    mode: StrainMode,
    map: &DofMap,
) -> Result<ConstrainedSystem> {
    assert_eq!(tensors.len(), mesh.element_count());
    check_tensors(tensors)?;
    let mut k = map.pattern(&mesh.tets);
    let mut lift = vec![0.0; map.n_free()];
    for (e, t) in mesh.tets.iter().enumerate() {
        let g = geometry_of(mesh, e)?;
        let (m, coupled) = mode.metric_for(model, mesh.centroid(e))?;
        let b = b_matrix(&g, &m, coupled);
        let ke = element_stiffness(&b, &tensors[e], g.volume * m.hprod);
        let dofs: [Dof; 12] = std::array::from_fn(|a| map.dof(t[a / 3], a % 3));
        for a in 0..12 {
            let Dof::Free(i) = dofs[a] else { continue };
            for bb in 0..12 {
                match dofs[bb] {
                    Dof::Free(j) => k.add(i, j, ke[a][bb]),
                    Dof::Fixed(v) => lift[i] -= ke[a][bb] * v,
                }
            }
        }
    }
    Ok(ConstrainedSystem { k, lift })
}

/// Full unconstrained stiffness (3 unknowns per node, node-major).
pub fn assemble_stiffness(
    mesh: &TetMesh,
    tensors: &[ElasticTensor],
    model: &LameModel,
    mode: StrainMode,
) -> Result<CsrMatrix> {
    Ok(assemble_constrained(mesh, tensors, model, mode, &DofMap::unconstrained(mesh.node_count()))?.k)
}

/// Adds an element vector (12 entries, node-major) to a reduced load.
pub fn scatter(map: &DofMap, t: &[usize; 4], fe: &[f64; 12], rhs: &mut [f64]) {
    for a in 0..12 {
        if let Dof::Free(i) = map.dof(t[a / 3], a % 3) {
            rhs[i] += fe[a];
        }
    }
}

/// `∫ f·v H dΩ` with a per-element constant body force.
pub fn body_force_load(mesh: &TetMesh, model: &LameModel, force: &dyn Fn(usize) -> [f64; 3], map: &DofMap) -> Result<Vec<f64>> {
    let mut rhs = vec![0.0; map.n_free()];
    for (e, t) in mesh.tets.iter().enumerate() {
        let f = force(e);
        if f == [0.0; 3] {
            continue;
        }
        let w = mesh.volume_of(e) * lame_eval(model, mesh.centroid(e))?.hprod / 4.0;
        let mut fe = [0.0; 12];
        for a in 0..4 {
            for c in 0..3 {
                fe[3 * a + c] = f[c] * w;
            }
        }
        scatter(map, t, &fe, &mut rhs);
    }
    Ok(rhs)
}

/// `∫ σ̄·v dS` over the facets of `face` accepted by `select` (called with the
/// facet centroid). The surface measure on a face normal to `α_k` is
/// `Π_{i≠k} H_i dα`.
pub fn traction_load(
    mesh: &TetMesh,
    model: &LameModel,
    face: Face,
    traction: [f64; 3],
    select: &dyn Fn([f64; 3]) -> bool,
    map: &DofMap,
) -> Result<Vec<f64>> {
    let mut rhs = vec![0.0; map.n_free()];
    for f in mesh.face_tags.iter().filter(|f| f.face == face) {
        let p = f.nodes.map(|n| mesh.nodes[n]);
        let c = [0, 1, 2].map(|d| (p[0][d] + p[1][d] + p[2][d]) / 3.0);
        if !select(c) {
            continue;
        }
        let e1 = crate::mesh::sub(p[1], p[0]);
        let e2 = crate::mesh::sub(p[2], p[0]);
        let n = crate::mesh::cross(e1, e2);
        let area = 0.5 * crate::mesh::dot(n, n).sqrt();
        let m = lame_eval(model, c)?;
        let k = face.axis();
        let measure = (0..3).filter(|&i| i != k).map(|i| m.h[i]).product::<f64>();
        let w = area * measure / 3.0;
        for &node in &f.nodes {
            for comp in 0..3 {
                if let Dof::Free(i) = map.dof(node, comp) {
                    rhs[i] += traction[comp] * w;
                }
            }
        }
    }
    Ok(rhs)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fem::constraints::Constraints;
    use crate::fem::solver::{solve_sparse, SolverOptions};
    use crate::mesh::{generate_macro_mesh, BoundaryFacet, MacroDomain};
    use crate::tensor::isotropic_tensor;

    fn unit_tet() -> TetMesh {
        TetMesh {
            nodes: vec![[0.0; 3], [1.0, 0.0, 0.0], [0.0, 1.0, 0.0], [0.0, 0.0, 1.0]],
            tets: vec![[0, 1, 2, 3]],
            material_tag: vec![0],
            face_tags: Vec::<BoundaryFacet>::new(),
            periodic_pairs: vec![],
            grid: None,
        }
    }

    /// Textbook linear-tet stiffness `V Bᵀ D B` built with the classic
    /// shape-function coefficients from the inverse of the 4×4 nodal matrix.
    fn textbook(nodes: &[[f64; 3]; 4], young: f64, nu: f64) -> Vec<Vec<f64>> {
        let m = nalgebra::Matrix4::from_fn(|i, j| if j == 0 { 1.0 } else { nodes[i][j - 1] });
        let vol = m.determinant() / 6.0;
        let inv = m.try_inverse().unwrap();
        let lam = young * nu / ((1.0 + nu) * (1.0 - 2.0 * nu));
        let mu = young / (2.0 * (1.0 + nu));
        let mut d = nalgebra::DMatrix::<f64>::zeros(6, 6);
        for i in 0..3 {
            for j in 0..3 {
                d[(i, j)] = lam;
            }
            d[(i, i)] += 2.0 * mu;
            d[(i + 3, i + 3)] = mu;
        }
        let mut b = nalgebra::DMatrix::<f64>::zeros(6, 12);
        for n in 0..4 {
            let (bx, by, bz) = (inv[(1, n)], inv[(2, n)], inv[(3, n)]);
            b[(0, 3 * n)] = bx;
            b[(1, 3 * n + 1)] = by;
            b[(2, 3 * n + 2)] = bz;
            b[(3, 3 * n)] = by;
            b[(3, 3 * n + 1)] = bx;
            b[(4, 3 * n + 1)] = bz;
            b[(4, 3 * n + 2)] = by;
            b[(5, 3 * n)] = bz;
            b[(5, 3 * n + 2)] = bx;
        }
        let k = b.transpose() * d * b * vol;
        (0..12).map(|i| (0..12).map(|j| k[(i, j)]).collect()).collect()
    }

    #[test]
    fn single_tet_matches_textbook() {
        let mesh = unit_tet();
        let c = isotropic_tensor(1.0, 0.0).unwrap();
        let k = assemble_stiffness(&mesh, &[c], &LameModel::Plate, StrainMode::Macro).unwrap().to_dense();
        let oracle = textbook(&[mesh.nodes[0], mesh.nodes[1], mesh.nodes[2], mesh.nodes[3]], 1.0, 0.0);
        for i in 0..12 {
            for j in 0..12 {
                assert!((k[i][j] - oracle[i][j]).abs() < 1e-14, "{i} {j}");
            }
        }
        let mut skew = unit_tet();
        skew.nodes = vec![[0.1, 0.0, 0.2], [1.3, 0.2, 0.0], [0.2, 0.9, 0.1], [0.0, 0.3, 1.1]];
        let c = isotropic_tensor(2.5, 0.3).unwrap();
        let k = assemble_stiffness(&skew, &[c], &LameModel::Plate, StrainMode::Macro).unwrap().to_dense();
        let oracle = textbook(&[skew.nodes[0], skew.nodes[1], skew.nodes[2], skew.nodes[3]], 2.5, 0.3);
        for i in 0..12 {
            for j in 0..12 {
                assert!((k[i][j] - oracle[i][j]).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn symmetric_with_rigid_kernel() {
        let m = generate_macro_mesh(&MacroDomain::Box { lo: [0.0; 3], hi: [1.0, 1.0, 0.3] }, [3, 3, 2]).unwrap();
        let c = vec![isotropic_tensor(3.0, 0.25).unwrap(); m.element_count()];
        let k = assemble_stiffness(&m, &c, &LameModel::Plate, StrainMode::Macro).unwrap();
        assert!(k.asymmetry() <= 1e-12 * k.max_abs());
        for d in 0..3 {
            let mut r = vec![0.0; k.dim()];
            for n in 0..m.node_count() {
                r[3 * n + d] = 1.0;
            }
            let kr = k.matvec(&r);
            assert!(kr.iter().all(|v| v.abs() < 1e-10));
        }
    }

    #[test]
    fn single_tet_dirichlet_matches_dense() {
        let mesh = unit_tet();
        let c = isotropic_tensor(1.0, 0.2).unwrap();
        let mut cons = Constraints::default();
        for comp in 0..3 {
            cons.dirichlet.push((0, comp, 0.0));
        }
        cons.dirichlet.push((1, 1, 0.0));
        cons.dirichlet.push((1, 2, 0.0));
        cons.dirichlet.push((2, 2, 0.0));
        cons.dirichlet.push((3, 0, 0.01));
        let map = DofMap::new(4, &cons).unwrap();
        let sys = assemble_constrained(&mesh, &[c], &LameModel::Plate, StrainMode::Macro, &map).unwrap();
        let (x, _) = solve_sparse(&sys.k, &sys.lift, &SolverOptions::default()).unwrap();
        let full = assemble_stiffness(&mesh, &[c], &LameModel::Plate, StrainMode::Macro).unwrap();
        let (kr, br) = map.reduce(&full, &[0.0; 12]);
        let n = kr.dim();
        let dense = nalgebra::DMatrix::from_fn(n, n, |i, j| kr.get(i, j));
        let xd = dense.lu().solve(&nalgebra::DVector::from_column_slice(&br)).unwrap();
        for i in 0..n {
            assert!((x[i] - xd[i]).abs() < 1e-9);
        }
    }
}
