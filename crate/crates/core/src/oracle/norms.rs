//! Metric-weighted error norms of nodal fields on linear tetrahedra.

use crate::error::Result;
use crate::fem::strain::geometry_of;
use crate::mesh::TetMesh;
use crate::metric::{lame_eval, LameModel};

/// Five-point rule exact for cubics: barycentric points and weights (sum 1).
const RULE: [([f64; 4], f64); 5] = [
    ([0.25, 0.25, 0.25, 0.25], -0.8),
    ([0.5, 1.0 / 6.0, 1.0 / 6.0, 1.0 / 6.0], 0.45),
    ([1.0 / 6.0, 0.5, 1.0 / 6.0, 1.0 / 6.0], 0.45),
    ([1.0 / 6.0, 1.0 / 6.0, 0.5, 1.0 / 6.0], 0.45),
    ([1.0 / 6.0, 1.0 / 6.0, 1.0 / 6.0, 0.5], 0.45),
];

/// `(‖a − b‖_{L²}, |a − b|_{H¹})` with measure `H dα` and the seminorm built
/// from the curvilinear derivatives `ψ_j = (1/H_j) ∂/∂α_j`.
pub fn error_norms(mesh: &TetMesh, model: &LameModel, a: &[[f64; 3]], b: &[[f64; 3]]) -> Result<(f64, f64)> {
    let mut l2 = 0.0;
    let mut h1 = 0.0;
    for (e, t) in mesh.tets.iter().enumerate() {
        let g = geometry_of(mesh, e)?;
        let p = mesh.tet_points(e);
        let d: [[f64; 3]; 4] = std::array::from_fn(|k| std::array::from_fn(|c| a[t[k]][c] - b[t[k]][c]));
        let mut grad = [[0.0; 3]; 3];
        for k in 0..4 {
            for c in 0..3 {
                for j in 0..3 {
                    grad[c][j] += g.grads[k][j] * d[k][c];
                }
            }
        }
        for (w, weight) in RULE {
            let x: [f64; 3] = std::array::from_fn(|i| (0..4).map(|k| w[k] * p[k][i]).sum());
            let m = lame_eval(model, x)?;
            let v: [f64; 3] = std::array::from_fn(|c| (0..4).map(|k| w[k] * d[k][c]).sum());
            let dv = weight * g.volume * m.hprod;
            l2 += dv * (v[0] * v[0] + v[1] * v[1] + v[2] * v[2]);
            let mut s = 0.0;
            for c in 0..3 {
                for j in 0..3 {
                    s += (grad[c][j] / m.h[j]).powi(2);
                }
            }
            h1 += dv * s;
        }
    }
    Ok((l2.max(0.0).sqrt(), h1.max(0.0).sqrt()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mesh::{generate_macro_mesh, MacroDomain};

    #[test]
    fn linear_fields_have_exact_norms() {
        let m = generate_macro_mesh(&MacroDomain::Box { lo: [0.0; 3], hi: [1.0, 2.0, 0.5] }, [3, 4, 2]).unwrap();
        let u: Vec<[f64; 3]> = m.nodes.iter().map(|p| [p[0], 0.0, 2.0 * p[2]]).collect();
        let zero = vec![[0.0; 3]; m.node_count()];
        let (l2, h1) = error_norms(&m, &LameModel::Plate, &u, &zero).unwrap();
        // ∫ x² + 4 z² over [0,1]×[0,2]×[0,0.5]
        let exact_l2 = 1.0 / 3.0 * 2.0 * 0.5 + 4.0 * 2.0 * 0.125 / 3.0;
        assert!((l2 * l2 - exact_l2).abs() < 1e-12 * exact_l2);
        assert!((h1 * h1 - 5.0).abs() < 1e-12);
        // cylinder: ∫ x² (R + z), cubic integrand integrated exactly
        let r = 3.0;
        let v: Vec<[f64; 3]> = m.nodes.iter().map(|p| [p[0], 0.0, 0.0]).collect();
        let (l2c, _) = error_norms(&m, &LameModel::Cylindrical { r2: r }, &v, &zero).unwrap();
        let exact = 1.0 / 3.0 * 2.0 * (r * 0.5 + 0.125);
        assert!((l2c * l2c - exact).abs() < 1e-12 * exact);
    }
}
