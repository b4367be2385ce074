//! Closed-form cell solutions for layered media.
//!
//! Along the layering coordinate `y` every field is one-dimensional, so the
//! cell equations reduce to ordinary differential equations with piecewise
//! constant coefficients that integrate exactly. Nothing here touches the
//! finite-element code.

use nalgebra::{Matrix3, Matrix6, Vector3, Vector6};

use crate::error::{Error, Result};
use crate::tensor::ElasticTensor;

/// Voigt positions of `(i, axis)` for `i = 0, 1, 2`.
fn normal_block(axis: usize) -> [usize; 3] {
    let pos = |i: usize, j: usize| -> usize {
        match (i.min(j), i.max(j)) {
            (a, b) if a == b => a,
            (0, 1) => 3,
            (1, 2) => 4,
            _ => 5,
        }
    };
    [pos(0, axis), pos(1, axis), pos(2, axis)]
}

#[derive(Debug, Clone)]
struct Layer {
    start: f64,
    thickness: f64,
    c: Matrix6<f64>,
}

/// First-order solution for one unit strain: slope of `N` in each layer.
#[derive(Debug, Clone)]
struct FirstOrder {
    /// `s N'` per layer
    slopes: Vec<Vector3<f64>>,
    /// `N` at the start of each layer
    start_values: Vec<Vector3<f64>>,
}

/// Second-order solution for one `(j, mn)` case: `g(y) = s M'(y)` is linear in
/// each layer, `g = g0 + g1 (y − y_l)`.
#[derive(Debug, Clone)]
struct SecondOrder {
    g0: Vec<Vector3<f64>>,
    g1: Vec<Vector3<f64>>,
    start_values: Vec<Vector3<f64>>,
}

/// Exact first- and second-order cell functions of a laminate with layers
/// normal to `axis`, including a frozen scale factor `1/H_axis` on the
/// layering derivative and `1/H_j` on in-plane derivatives.
#[derive(Debug, Clone)]
pub struct LaminateOracle {
    axis: usize,
    scale: f64,
    layers: Vec<Layer>,
    first: Vec<FirstOrder>,
    c_hat: Matrix6<f64>,
}

fn mat6(c: &ElasticTensor) -> Matrix6<f64> {
    let m = c.matrix();
    Matrix6::from_fn(|i, j| m[i][j])
}

fn block(c: &Matrix6<f64>, idx: &[usize; 3]) -> Matrix3<f64> {
    Matrix3::from_fn(|i, j| c[(idx[i], idx[j])])
}

fn column_block(c: &Matrix6<f64>, idx: &[usize; 3], col: usize) -> Vector3<f64> {
    Vector3::from_fn(|i, _| c[(idx[i], col)])
}

impl LaminateOracle {
    /// `layers` are `(thickness fraction, tensor)` in order from `y = 0`;
    /// `h_axis` is the frozen Lamé coefficient of the layering direction.
    pub fn new(layers: &[(f64, ElasticTensor)], axis: usize, h_axis: f64) -> Result<Self> {
        let total: f64 = layers.iter().map(|l| l.0).sum();
        if axis > 2 || layers.is_empty() || (total - 1.0).abs() > 1e-12 || layers.iter().any(|l| l.0 <= 0.0) {
            return Err(Error::InvalidArgument("laminate layers must have positive fractions summing to 1".into()));
        }
        let mut start = 0.0;
        let layers: Vec<Layer> = layers
            .iter()
            .map(|(f, c)| {
                let l = Layer { start, thickness: *f, c: mat6(c) };
                start += f;
                l
            })
            .collect();
        let scale = 1.0 / h_axis;
        let idx = normal_block(axis);
        let mut first = Vec::with_capacity(6);
        let mut c_hat = Matrix6::zeros();
        let inv: Vec<Matrix3<f64>> = layers
            .iter()
            .map(|l| block(&l.c, &idx).try_inverse().ok_or_else(|| Error::Singular("layer stiffness block".into())))
            .collect::<Result<_>>()?;
        let harmonic: Matrix3<f64> = layers.iter().zip(&inv).map(|(l, a)| a * l.thickness).sum();
        let harmonic_inv = harmonic.try_inverse().ok_or_else(|| Error::Singular("harmonic mean".into()))?;
        for mn in 0..6 {
            // traction t = c_l + A_l g_l is the same in every layer and ∫ g = 0
            let weighted: Vector3<f64> =
                layers.iter().zip(&inv).map(|(l, a)| a * column_block(&l.c, &idx, mn) * l.thickness).sum();
            let t = harmonic_inv * weighted;
            let slopes: Vec<Vector3<f64>> =
                layers.iter().zip(&inv).map(|(l, a)| a * (t - column_block(&l.c, &idx, mn))).collect();
            let start_values = integrate_piecewise_linear(&layers, &slopes, &vec![Vector3::zeros(); layers.len()], scale);
            for (l, g) in layers.iter().zip(&slopes) {
                let mut strain = Vector6::zeros();
                strain[mn] = 1.0;
                for i in 0..3 {
                    strain[idx[i]] += g[i];
                }
                let stress = l.c * strain;
                for a in 0..6 {
                    c_hat[(a, mn)] += l.thickness * stress[a];
                }
            }
            first.push(FirstOrder { slopes, start_values });
        }
        Ok(LaminateOracle { axis, scale, layers, first, c_hat })
    }

    /// Effective tensor (tensor components, engineering-strain columns).
    pub fn c_hat(&self) -> ElasticTensor {
        ElasticTensor::from_matrix(std::array::from_fn(|i| std::array::from_fn(|j| self.c_hat[(i, j)])))
    }

    fn layer_of(&self, y: f64) -> usize {
        let y = y - y.floor();
        self.layers.iter().rposition(|l| l.start <= y).unwrap_or(0)
    }

    /// `N^{mn}` at layering coordinate `y`.
    pub fn n1(&self, mn: usize, y: f64) -> [f64; 3] {
        let y = y - y.floor();
        let l = self.layer_of(y);
        let f = &self.first[mn];
        let v = f.start_values[l] + f.slopes[l] * ((y - self.layers[l].start) / self.scale);
        [v[0], v[1], v[2]]
    }

    /// `N^{jmn}` for a Plate-type (flat) metric, `j` the macro derivative direction.
    pub fn n2(&self, j: usize, mn: usize, y: f64) -> [f64; 3] {
        let s = self.second_order(j, mn);
        let y = y - y.floor();
        let l = self.layer_of(y);
        let d = y - self.layers[l].start;
        let v = s.start_values[l] + (s.g0[l] * d + s.g1[l] * (0.5 * d * d)) / self.scale;
        [v[0], v[1], v[2]]
    }

    /// Solves `−s (σ(M) + S)' = X_j` in one dimension with
    /// `S = C:sym(e_j ⊗ N^{mn})` and `X_j` the flux deviation of column `mn`.
    fn second_order(&self, j: usize, mn: usize) -> SecondOrder {
        let idx = normal_block(self.axis);
        let f = &self.first[mn];
        let n = self.layers.len();
        // per-layer constants: X_{·j} (3-vector), and S_I(y) = s0 + s1 (y − y_l)
        let mut x = Vec::with_capacity(n);
        let mut s0 = Vec::with_capacity(n);
        let mut s1 = Vec::with_capacity(n);
        for (l, layer) in self.layers.iter().enumerate() {
            let mut strain = Vector6::zeros();
            strain[mn] = 1.0;
            for i in 0..3 {
                strain[idx[i]] += f.slopes[l][i];
            }
            let stress = layer.c * strain - self.c_hat.column(mn);
            let xj = Vector3::from_fn(|i, _| stress[voigt(i, j)]);
            x.push(xj);
            // S = C · eng(T), T_ab = ½(δ_aj N_b + δ_bj N_a): linear in N
            let t_of = |nv: Vector3<f64>| -> Vector6<f64> {
                let mut g = Vector6::zeros();
                for a in 0..3 {
                    for b in a..3 {
                        let t = 0.5 * (if a == j { nv[b] } else { 0.0 } + if b == j { nv[a] } else { 0.0 });
                        g[voigt(a, b)] = if a == b { t } else { 2.0 * t };
                    }
                }
                layer.c * g
            };
            let base = t_of(f.start_values[l]);
            let rate = t_of(f.slopes[l] / self.scale);
            s0.push(Vector3::from_fn(|i, _| base[idx[i]]));
            s1.push(Vector3::from_fn(|i, _| rate[idx[i]]));
        }
        // q(y) = q0 − (1/s) ∫_0^y X ; g = A^{-1}(q − S)
        let mut q_start = Vec::with_capacity(n);
        let mut acc = Vector3::zeros();
        for l in 0..n {
            q_start.push(acc);
            acc -= x[l] * (self.layers[l].thickness / self.scale);
        }
        let inv: Vec<Matrix3<f64>> =
            self.layers.iter().map(|l| block(&l.c, &idx).try_inverse().expect("checked in new")).collect();
        // g(y) = A^{-1}(q0 + q_start − S0) + A^{-1}(−X/s − S1)(y − y_l)
        let mut g0 = Vec::with_capacity(n);
        let mut g1 = Vec::with_capacity(n);
        let mut harmonic = Matrix3::zeros();
        let mut rest = Vector3::zeros();
        for l in 0..n {
            let t = self.layers[l].thickness;
            let slope = inv[l] * (-x[l] / self.scale - s1[l]);
            let offset = inv[l] * (q_start[l] - s0[l]);
            harmonic += inv[l] * t;
            rest += offset * t + slope * (0.5 * t * t);
            g0.push(offset);
            g1.push(slope);
        }
        let q0 = -(harmonic.try_inverse().expect("checked in new") * rest);
        for l in 0..n {
            g0[l] += inv[l] * q0;
        }
        let start_values = integrate_piecewise_linear(&self.layers, &g0, &g1, self.scale);
        SecondOrder { g0, g1, start_values }
    }
}

fn voigt(i: usize, j: usize) -> usize {
    match (i.min(j), i.max(j)) {
        (a, b) if a == b => a,
        (0, 1) => 3,
        (1, 2) => 4,
        _ => 5,
    }
}

/// Values at layer starts of `F(y) = ∫ (g0 + g1 (y − y_l)) / s`, shifted to zero mean.
fn integrate_piecewise_linear(layers: &[Layer], g0: &[Vector3<f64>], g1: &[Vector3<f64>], s: f64) -> Vec<Vector3<f64>> {
    let mut starts = Vec::with_capacity(layers.len());
    let mut v = Vector3::zeros();
    let mut mean = Vector3::zeros();
    for (l, layer) in layers.iter().enumerate() {
        let t = layer.thickness;
        starts.push(v);
        mean += v * t + (g0[l] * (t * t / 2.0) + g1[l] * (t * t * t / 6.0)) / s;
        v += (g0[l] * t + g1[l] * (0.5 * t * t)) / s;
    }
    starts.iter().map(|x| x - mean).collect()
}

/// Selected effective constants of a two-phase isotropic laminate from the
/// classical layered-medium formulas: harmonic averages for the stiffness
/// normal to the layers, arithmetic averages with coupling correction in-plane.
/// Returns the full 6×6 tensor for layering along `axis`.
pub fn laminate_homogenization_oracle(phases: &[(f64, f64, f64)], axis: usize) -> Result<ElasticTensor> {
    // phases: (fraction, λ, μ)
    let total: f64 = phases.iter().map(|p| p.0).sum();
    if (total - 1.0).abs() > 1e-12 || axis > 2 {
        return Err(Error::InvalidArgument("fractions must sum to 1".into()));
    }
    let avg = |f: &dyn Fn(f64, f64) -> f64| phases.iter().map(|&(w, l, m)| w * f(l, m)).sum::<f64>();
    let m_axis = 1.0 / avg(&|l, m| 1.0 / (l + 2.0 * m));
    let lam_ratio = avg(&|l, m| l / (l + 2.0 * m));
    let c33 = m_axis;
    let c13 = m_axis * lam_ratio;
    let c11 = avg(&|l, m| l + 2.0 * m - l * l / (l + 2.0 * m)) + m_axis * lam_ratio * lam_ratio;
    let c12 = avg(&|l, m| l - l * l / (l + 2.0 * m)) + m_axis * lam_ratio * lam_ratio;
    let g_axis = 1.0 / avg(&|_, m| 1.0 / m);
    let g_plane = avg(&|_, m| m);
    // assemble in a frame with the layering axis last, then permute
    let (p, q) = match axis {
        0 => (1, 2),
        1 => (2, 0),
        _ => (0, 1),
    };
    let mut c = [[0.0; 6]; 6];
    let n = [p, q, axis];
    let norm = [[c11, c12, c13], [c12, c11, c13], [c13, c13, c33]];
    for a in 0..3 {
        for b in 0..3 {
            c[n[a]][n[b]] = norm[a][b];
        }
    }
    c[voigt(p, q)][voigt(p, q)] = g_plane;
    c[voigt(p, axis)][voigt(p, axis)] = g_axis;
    c[voigt(q, axis)][voigt(q, axis)] = g_axis;
    Ok(ElasticTensor::from_matrix(c))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::tensor::isotropic_tensor;

    fn lame(e: f64, nu: f64) -> (f64, f64) {
        (e * nu / ((1.0 + nu) * (1.0 - 2.0 * nu)), e / (2.0 * (1.0 + nu)))
    }

    #[test]
    fn equal_phases_reproduce_phase() {
        let (l, m) = lame(3.0, 0.3);
        let c = laminate_homogenization_oracle(&[(0.3, l, m), (0.7, l, m)], 2).unwrap();
        let d = isotropic_tensor(3.0, 0.3).unwrap();
        assert!(c.relative_difference(&d) < 1e-14);
    }

    #[test]
    fn axial_shear_is_harmonic() {
        let (l1, m1) = lame(10.0, 0.3);
        let (l2, m2) = lame(1.0, 0.3);
        let c = laminate_homogenization_oracle(&[(0.5, l1, m1), (0.5, l2, m2)], 2).unwrap();
        let expected = 1.0 / (0.5 / m1 + 0.5 / m2);
        assert!((c.get(5, 5) - expected).abs() < 1e-14 * expected);
        assert!((c.get(4, 4) - expected).abs() < 1e-14 * expected);
    }

    #[test]
    fn ode_solution_matches_closed_form() {
        let e = [(10.0, 0.3), (1.0, 0.25)];
        let tensors: Vec<(f64, ElasticTensor)> =
            e.iter().map(|&(y, n)| (0.5, isotropic_tensor(y, n).unwrap())).collect();
        for axis in 0..3 {
            let ode = LaminateOracle::new(&tensors, axis, 1.0).unwrap().c_hat();
            let phases: Vec<(f64, f64, f64)> = e.iter().map(|&(y, n)| { let (l, m) = lame(y, n); (0.5, l, m) }).collect();
            let closed = laminate_homogenization_oracle(&phases, axis).unwrap();
            assert!(ode.relative_difference(&closed) < 1e-13, "axis {axis}");
        }
    }

    #[test]
    fn first_order_functions_periodic_zero_mean() {
        let tensors = vec![(0.3, isotropic_tensor(5.0, 0.2).unwrap()), (0.7, isotropic_tensor(1.0, 0.3).unwrap())];
        let o = LaminateOracle::new(&tensors, 2, 1.0).unwrap();
        for mn in 0..6 {
            let a = o.n1(mn, 0.0);
            let b = o.n1(mn, 1.0 - 1e-15);
            for c in 0..3 {
                assert!((a[c] - b[c]).abs() < 1e-12);
            }
            let k = 20000;
            let mean: f64 = (0..k).map(|i| o.n1(mn, (i as f64 + 0.5) / k as f64)[2]).sum::<f64>() / k as f64;
            assert!(mean.abs() < 1e-8);
        }
        for j in 0..3 {
            for mn in 0..6 {
                let a = o.n2(j, mn, 0.0);
                let b = o.n2(j, mn, 1.0 - 1e-15);
                for c in 0..3 {
                    assert!((a[c] - b[c]).abs() < 1e-10, "j {j} mn {mn}");
                }
            }
        }
    }
}
