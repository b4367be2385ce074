//! Curvilinear strain operators on linear tetrahedra.

use crate::error::{Error, Result};
use crate::mesh::TetMesh;
use crate::metric::{lame_eval, LameModel, MetricSample};
use crate::tensor::Sym3;

/// Constant shape-function gradients and volume of one tetrahedron.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TetGeometry {
    pub grads: [[f64; 3]; 4],
    pub volume: f64,
}

/// `None` for inverted or (numerically) flat elements.
pub fn tet_geometry(p: &[[f64; 3]; 4]) -> Option<TetGeometry> {
    let j = [0, 1, 2].map(|c| [0, 1, 2].map(|r| p[c + 1][r] - p[0][r]));
    // rows of j are edge vectors
    let det = j[0][0] * (j[1][1] * j[2][2] - j[1][2] * j[2][1]) - j[0][1] * (j[1][0] * j[2][2] - j[1][2] * j[2][0])
        + j[0][2] * (j[1][0] * j[2][1] - j[1][1] * j[2][0]);
    let h = j.iter().map(|e| e.iter().map(|v| v * v).sum::<f64>()).fold(0.0f64, f64::max).sqrt();
    if !(det > 1e-12 * h * h * h) {
        return None;
    }
    // inverse of the edge matrix: gradient of barycentric coordinate k+1 is column k
    let inv = |r: usize, c: usize| {
        let (r1, r2) = ((r + 1) % 3, (r + 2) % 3);
        let (c1, c2) = ((c + 1) % 3, (c + 2) % 3);
        (j[c1][r1] * j[c2][r2] - j[c1][r2] * j[c2][r1]) / det
    };
    let mut grads = [[0.0; 3]; 4];
    for k in 0..3 {
        for d in 0..3 {
            grads[k + 1][d] = inv(d, k);
        }
    }
    for d in 0..3 {
        grads[0][d] = -(grads[1][d] + grads[2][d] + grads[3][d]);
    }
    Some(TetGeometry { grads, volume: det / 6.0 })
}

/// Where the metric comes from when forming strains.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum StrainMode {
    /// Cell problem: derivatives `(1/H_i) ∂/∂β_i` with `H` frozen; no coupling terms.
    Micro(MetricSample),
    /// Macro problem: metric at each element centroid, full curvilinear strains.
    Macro,
}

impl StrainMode {
    /// Metric used for element `e` and whether the `∂H` coupling terms apply.
    pub fn metric_for(&self, model: &LameModel, centroid: [f64; 3]) -> Result<(MetricSample, bool)> {
        match self {
            StrainMode::Micro(m) => Ok((*m, false)),
            StrainMode::Macro => Ok((lame_eval(model, centroid)?, true)),
        }
    }
}

/// 6×12 operator mapping nodal displacements to engineering strains
/// `(e11, e22, e33, 2e12, 2e23, 2e13)` at the centroid.
pub fn b_matrix(g: &TetGeometry, m: &MetricSample, coupled: bool) -> [[f64; 12]; 6] {
    let a = |i: usize, j: usize| if coupled { m.coupling(i, j) * 0.25 } else { 0.0 };
    let mut b = [[0.0; 12]; 6];
    for n in 0..4 {
        let d = [0, 1, 2].map(|i| g.grads[n][i] / m.h[i]);
        let c = 3 * n;
        b[0][c] = d[0];
        b[0][c + 1] = a(0, 1);
        b[0][c + 2] = a(0, 2);
        b[1][c] = a(1, 0);
        b[1][c + 1] = d[1];
        b[1][c + 2] = a(1, 2);
        b[2][c] = a(2, 0);
        b[2][c + 1] = a(2, 1);
        b[2][c + 2] = d[2];
        b[3][c] = d[1] - a(0, 1);
        b[3][c + 1] = d[0] - a(1, 0);
        b[4][c + 1] = d[2] - a(1, 2);
        b[4][c + 2] = d[1] - a(2, 1);
        b[5][c] = d[2] - a(0, 2);
        b[5][c + 2] = d[0] - a(2, 0);
    }
    b
}

pub fn element_dofs(u: &[[f64; 3]], t: &[usize; 4]) -> [f64; 12] {
    let mut x = [0.0; 12];
    for (k, &n) in t.iter().enumerate() {
        x[3 * k..3 * k + 3].copy_from_slice(&u[n]);
    }
    x
}

/// Tensor strain components (shear not doubled) from engineering strains.
pub fn apply_b(b: &[[f64; 12]; 6], x: &[f64; 12]) -> Sym3 {
    let mut e = [0.0; 6];
    for r in 0..6 {
        e[r] = b[r].iter().zip(x).map(|(p, q)| p * q).sum::<f64>();
    }
    for s in &mut e[3..] {
        *s *= 0.5;
    }
    e
}

pub fn geometry_of(mesh: &TetMesh, e: usize) -> Result<TetGeometry> {
    let p = mesh.tet_points(e);
    tet_geometry(&p).ok_or(Error::DegenerateElement { element: e, volume: crate::mesh::tet_signed_volume(p) })
}

/// Per-element constant strain of a nodal displacement field.
pub fn element_strain(mesh: &TetMesh, u: &[[f64; 3]], model: &LameModel, mode: StrainMode) -> Result<Vec<Sym3>> {
    if u.len() != mesh.node_count() {
        return Err(Error::InvalidArgument(format!(
            "displacement has {} nodes, mesh has {}",
            u.len(),
            mesh.node_count()
        )));
    }
    (0..mesh.element_count())
        .map(|e| {
            let g = geometry_of(mesh, e)?;
            let (m, coupled) = mode.metric_for(model, mesh.centroid(e))?;
            Ok(apply_b(&b_matrix(&g, &m, coupled), &element_dofs(u, &mesh.tets[e])))
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mesh::{generate_macro_mesh, MacroDomain};

    #[test]
    fn reference_tet_gradients() {
        let g = tet_geometry(&[[0.0; 3], [1.0, 0.0, 0.0], [0.0, 1.0, 0.0], [0.0, 0.0, 1.0]]).unwrap();
        assert!((g.volume - 1.0 / 6.0).abs() < 1e-15);
        assert_eq!(g.grads[0], [-1.0, -1.0, -1.0]);
        assert_eq!(g.grads[1], [1.0, 0.0, 0.0]);
        assert_eq!(g.grads[2], [0.0, 1.0, 0.0]);
        assert_eq!(g.grads[3], [0.0, 0.0, 1.0]);
    }

    #[test]
    fn inverted_tet_rejected() {
        assert!(tet_geometry(&[[0.0; 3], [0.0, 1.0, 0.0], [1.0, 0.0, 0.0], [0.0, 0.0, 1.0]]).is_none());
        assert!(tet_geometry(&[[0.0; 3], [1.0, 0.0, 0.0], [2.0, 0.0, 0.0], [0.0, 0.0, 1.0]]).is_none());
    }

    #[test]
    fn linear_field_gives_unit_strain() {
        let m = generate_macro_mesh(&MacroDomain::Box { lo: [0.0; 3], hi: [1.0, 2.0, 0.5] }, [3, 2, 2]).unwrap();
        let u: Vec<[f64; 3]> = m.nodes.iter().map(|p| [p[0], 0.0, 0.0]).collect();
        for e in element_strain(&m, &u, &LameModel::Plate, StrainMode::Macro).unwrap() {
            assert!((e[0] - 1.0).abs() < 1e-13);
            assert!(e[1..].iter().all(|v| v.abs() < 1e-13));
        }
        let t: Vec<[f64; 3]> = vec![[0.3, -1.0, 2.0]; m.node_count()];
        for e in element_strain(&m, &t, &LameModel::Plate, StrainMode::Macro).unwrap() {
            assert!(e.iter().all(|v| v.abs() < 1e-13));
        }
    }

    #[test]
    fn cylindrical_normal_displacement_stretches_hoop() {
        let r2 = 3.0;
        let m = generate_macro_mesh(&MacroDomain::Box { lo: [0.0, -0.2, -0.1], hi: [1.0, 0.2, 0.1] }, [2, 2, 2])
            .unwrap();
        let w = 0.01;
        let u = vec![[0.0, 0.0, w]; m.node_count()];
        let model = LameModel::Cylindrical { r2 };
        let s = element_strain(&m, &u, &model, StrainMode::Macro).unwrap();
        for (e, st) in s.iter().enumerate() {
            let a3 = m.centroid(e)[2];
            assert!((st[1] - w / (r2 + a3)).abs() < 1e-14);
            assert!(st[0].abs() < 1e-15 && st[2].abs() < 1e-15 && st[4].abs() < 1e-15);
        }
    }
}
