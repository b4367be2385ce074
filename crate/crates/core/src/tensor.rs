//! Fourth-order elasticity tensors in 6×6 form and symmetric 3×3 tensors.
//!
//! Component order is `11, 22, 33, 12, 23, 13` throughout. The 6×6 matrix
//! stores the tensor components `C_ijkl` directly; applied to a strain it acts
//! on the engineering vector (shear entries doubled), so `σ = C · γ`. Strain
//! fields are stored as tensor components (`e12`, not `2 e12`).

use std::collections::BTreeMap;

use nalgebra::{Matrix6, SymmetricEigen};

use crate::error::{Error, Result};

/// Symmetric 3×3 tensor as `[t11, t22, t33, t12, t23, t13]`.
pub type Sym3 = [f64; 6];

pub const VOIGT_PAIRS: [(usize, usize); 6] = [(0, 0), (1, 1), (2, 2), (0, 1), (1, 2), (0, 2)];
pub const PAIR_LABELS: [&str; 6] = ["11", "22", "33", "12", "23", "13"];

pub fn voigt_index(i: usize, j: usize) -> usize {
    match (i.min(j), i.max(j)) {
        (0, 0) => 0,
        (1, 1) => 1,
        (2, 2) => 2,
        (0, 1) => 3,
        (1, 2) => 4,
        _ => 5,
    }
}

/// Tensor components to engineering vector.
pub fn engineering(e: &Sym3) -> [f64; 6] {
    [e[0], e[1], e[2], 2.0 * e[3], 2.0 * e[4], 2.0 * e[5]]
}

pub fn sym_get(t: &Sym3, i: usize, j: usize) -> f64 {
    t[voigt_index(i, j)]
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ElasticTensor {
    m: [[f64; 6]; 6],
}

impl ElasticTensor {
    pub fn zero() -> Self {
        ElasticTensor { m: [[0.0; 6]; 6] }
    }

    /// Builds from a 6×6 matrix, enforcing major symmetry by averaging.
    pub fn from_matrix(m: [[f64; 6]; 6]) -> Self {
        let mut s = [[0.0; 6]; 6];
        for i in 0..6 {
            for j in 0..6 {
                s[i][j] = 0.5 * (m[i][j] + m[j][i]);
            }
        }
        ElasticTensor { m: s }
    }

    /// Upper triangle in row order: `C11 C12 .. C16 C22 .. C26 .. C66`.
    pub fn from_upper(c: &[f64; 21]) -> Self {
        let mut m = [[0.0; 6]; 6];
        let mut k = 0;
        for i in 0..6 {
            for j in i..6 {
                m[i][j] = c[k];
                m[j][i] = c[k];
                k += 1;
            }
        }
        ElasticTensor { m }
    }

    pub fn upper(&self) -> [f64; 21] {
        let mut c = [0.0; 21];
        let mut k = 0;
        for i in 0..6 {
            for j in i..6 {
                c[k] = self.m[i][j];
                k += 1;
            }
        }
        c
    }

    pub fn matrix(&self) -> &[[f64; 6]; 6] {
        &self.m
    }

    pub fn get(&self, a: usize, b: usize) -> f64 {
        self.m[a][b]
    }

    pub fn component(&self, i: usize, j: usize, k: usize, l: usize) -> f64 {
        self.m[voigt_index(i, j)][voigt_index(k, l)]
    }

    /// `σ = C : e` for a symmetric strain given in tensor components.
    pub fn stress(&self, e: &Sym3) -> Sym3 {
        self.apply_engineering(&engineering(e))
    }

    pub fn apply_engineering(&self, g: &[f64; 6]) -> Sym3 {
        let mut s = [0.0; 6];
        for (i, row) in self.m.iter().enumerate() {
            s[i] = row.iter().zip(g).map(|(c, x)| c * x).sum();
        }
        s
    }

    /// Energy-consistent matrix in an orthonormal basis (shear rows/cols scaled by √2).
    pub fn mandel(&self) -> Matrix6<f64> {
        let d = [1.0, 1.0, 1.0, 2f64.sqrt(), 2f64.sqrt(), 2f64.sqrt()];
        Matrix6::from_fn(|i, j| d[i] * self.m[i][j] * d[j])
    }

    pub fn nalgebra(&self) -> Matrix6<f64> {
        Matrix6::from_fn(|i, j| self.m[i][j])
    }

    pub fn from_nalgebra(m: &Matrix6<f64>) -> Self {
        let mut a = [[0.0; 6]; 6];
        for i in 0..6 {
            for j in 0..6 {
                a[i][j] = m[(i, j)];
            }
        }
        Self::from_matrix(a)
    }

    /// Ascending eigenvalues of the Mandel form.
    pub fn eigenvalues(&self) -> [f64; 6] {
        let eig = SymmetricEigen::new(self.mandel());
        let mut v: Vec<f64> = eig.eigenvalues.iter().copied().collect();
        v.sort_by(|a, b| a.total_cmp(b));
        [v[0], v[1], v[2], v[3], v[4], v[5]]
    }

    pub fn is_positive_definite(&self) -> bool {
        self.nalgebra().cholesky().is_some()
    }

    pub fn ensure_positive_definite(&self, what: &str) -> Result<()> {
        if self.is_positive_definite() {
            Ok(())
        } else {
            Err(Error::InvalidMaterial(format!("{what}: elasticity tensor is not positive definite")))
        }
    }

    pub fn inverse(&self) -> Result<ElasticTensor> {
        self.nalgebra()
            .try_inverse()
            .map(|m| Self::from_nalgebra(&m))
            .ok_or_else(|| Error::InvalidMaterial("singular elasticity tensor".into()))
    }

    pub fn scaled(&self, s: f64) -> Self {
        ElasticTensor { m: self.m.map(|r| r.map(|x| x * s)) }
    }

    pub fn add(&self, o: &Self) -> Self {
        let mut m = self.m;
        for i in 0..6 {
            for j in 0..6 {
                m[i][j] += o.m[i][j];
            }
        }
        ElasticTensor { m }
    }

    pub fn lerp(&self, o: &Self, t: f64) -> Self {
        self.scaled(1.0 - t).add(&o.scaled(t))
    }

    pub fn max_abs(&self) -> f64 {
        self.m.iter().flatten().fold(0.0, |a, &x| a.max(x.abs()))
    }

    /// Largest componentwise difference relative to `self`'s largest entry.
    pub fn relative_difference(&self, o: &Self) -> f64 {
        let mut d: f64 = 0.0;
        for i in 0..6 {
            for j in 0..6 {
                d = d.max((self.m[i][j] - o.m[i][j]).abs());
            }
        }
        d / self.max_abs().max(f64::MIN_POSITIVE)
    }
}

/// Isotropic tensor from Young's modulus and Poisson ratio.
pub fn isotropic_tensor(young: f64, poisson: f64) -> Result<ElasticTensor> {
    if !(young > 0.0) {
        return Err(Error::InvalidMaterial(format!("Young's modulus must be positive, got {young}")));
    }
    if !(poisson > -1.0 && poisson < 0.5) {
        return Err(Error::InvalidMaterial(format!("Poisson ratio {poisson} outside (-1, 0.5)")));
    }
    let lambda = young * poisson / ((1.0 + poisson) * (1.0 - 2.0 * poisson));
    let mu = young / (2.0 * (1.0 + poisson));
    Ok(from_lame(lambda, mu))
}

pub fn from_lame(lambda: f64, mu: f64) -> ElasticTensor {
    let mut m = [[0.0; 6]; 6];
    for i in 0..3 {
        for j in 0..3 {
            m[i][j] = lambda;
        }
        m[i][i] = lambda + 2.0 * mu;
        m[i + 3][i + 3] = mu;
    }
    ElasticTensor { m }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Material {
    pub tensor: ElasticTensor,
    /// Uniaxial elastic limit `S_e`.
    pub yield_strength: Option<f64>,
}

/// Phase id → material.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct MaterialTable {
    pub phases: BTreeMap<u32, Material>,
}

impl MaterialTable {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn with(mut self, id: u32, tensor: ElasticTensor, yield_strength: Option<f64>) -> Self {
        self.insert(id, tensor, yield_strength);
        self
    }

    pub fn insert(&mut self, id: u32, tensor: ElasticTensor, yield_strength: Option<f64>) {
        self.phases.insert(id, Material { tensor, yield_strength });
    }

    pub fn tensor(&self, id: u32) -> Result<&ElasticTensor> {
        self.phases.get(&id).map(|m| &m.tensor).ok_or(Error::MissingMaterial(id))
    }

    pub fn yield_strength(&self, id: u32) -> Result<f64> {
        let m = self.phases.get(&id).ok_or(Error::MissingMaterial(id))?;
        match m.yield_strength {
            Some(s) if s > 0.0 => Ok(s),
            _ => Err(Error::InvalidMaterial(format!("phase {id} has no positive yield strength"))),
        }
    }

    /// Per-element tensors for a tag list; errors on the first unknown tag.
    pub fn per_element(&self, tags: &[u32]) -> Result<Vec<ElasticTensor>> {
        tags.iter().map(|&t| self.tensor(t).copied()).collect()
    }

    pub fn validate(&self) -> Result<()> {
        for (id, m) in &self.phases {
            m.tensor.ensure_positive_definite(&format!("phase {id}"))?;
        }
        Ok(())
    }
}

/// Arithmetic (Voigt) and harmonic (Reuss) mixture tensors.
pub fn voigt_reuss(parts: &[(f64, ElasticTensor)]) -> Result<(ElasticTensor, ElasticTensor)> {
    let mut voigt = ElasticTensor::zero();
    let mut compliance = ElasticTensor::zero();
    for (f, c) in parts {
        voigt = voigt.add(&c.scaled(*f));
        compliance = compliance.add(&c.inverse()?.scaled(*f));
    }
    Ok((voigt, compliance.inverse()?))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn unit_isotropic() {
        let c = isotropic_tensor(1.0, 0.0).unwrap();
        assert_eq!(c.component(0, 0, 0, 0), 1.0);
        assert_eq!(c.component(0, 0, 1, 1), 0.0);
        assert_eq!(c.component(0, 1, 0, 1), 0.5);
        assert_eq!(c.component(1, 0, 0, 1), 0.5);
    }

    #[test]
    fn lame_parameters_from_engineering_constants() {
        let (e, nu) = (410.0e9, 0.18);
        let c = isotropic_tensor(e, nu).unwrap();
        let lambda = e * nu / ((1.0 + nu) * (1.0 - 2.0 * nu));
        let mu = e / (2.0 * (1.0 + nu));
        assert!((c.get(0, 1) - lambda).abs() <= 1e-15 * lambda);
        assert!((c.get(3, 3) - mu).abs() <= 1e-15 * mu);
        assert!((c.get(0, 0) - lambda - 2.0 * mu).abs() <= 1e-15 * lambda);
        // roughly 97.7 GPa and 173.7 GPa
        assert!((lambda / 1e9 - 97.7225).abs() < 1e-3);
        assert!((mu / 1e9 - 173.7288).abs() < 1e-3);
    }

    #[test]
    fn incompressible_limit_rejected() {
        assert!(isotropic_tensor(1.0, 0.5).is_err());
        assert!(isotropic_tensor(0.0, 0.2).is_err());
    }

    #[test]
    fn uniaxial_strain_stress() {
        let c = isotropic_tensor(1.0, 0.0).unwrap();
        let s = c.stress(&[0.01, 0.0, 0.0, 0.0, 0.0, 0.0]);
        assert_eq!(s, [0.01, 0.0, 0.0, 0.0, 0.0, 0.0]);
        // tensor shear strain e12 gives σ12 = 2 μ e12
        let s = c.stress(&[0.0, 0.0, 0.0, 0.1, 0.0, 0.0]);
        assert!((s[3] - 0.1).abs() < 1e-15);
    }

    #[test]
    fn upper_round_trip_and_symmetry() {
        let c = isotropic_tensor(3.0, 0.25).unwrap();
        assert_eq!(ElasticTensor::from_upper(&c.upper()), c);
        for i in 0..3 {
            for j in 0..3 {
                for k in 0..3 {
                    for l in 0..3 {
                        let v = c.component(i, j, k, l);
                        assert_eq!(v, c.component(j, i, k, l));
                        assert_eq!(v, c.component(i, j, l, k));
                        assert_eq!(v, c.component(k, l, i, j));
                    }
                }
            }
        }
        assert!(c.is_positive_definite());
        assert!(c.eigenvalues()[0] > 0.0);
    }

    #[test]
    fn mixture_bounds_ordered() {
        let a = isotropic_tensor(10.0, 0.3).unwrap();
        let b = isotropic_tensor(1.0, 0.2).unwrap();
        let (v, r) = voigt_reuss(&[(0.5, a), (0.5, b)]).unwrap();
        let (ev, er) = (v.eigenvalues(), r.eigenvalues());
        for k in 0..6 {
            assert!(er[k] <= ev[k]);
        }
    }
}
