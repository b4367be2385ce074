//! Preconditioned conjugate gradients, plain and with linear equality
//! constraints handled by Lagrange multipliers (projected CG).

use super::sparse::{dot, norm, CsrMatrix};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SolverOptions {
    /// Relative residual `‖b − Ax‖ / ‖b‖` at which iteration stops.
    pub tol: f64,
    /// Iteration cap as a multiple of the system size.
    pub max_iter_factor: usize,
}

impl Default for SolverOptions {
    fn default() -> Self {
        SolverOptions { tol: 1e-10, max_iter_factor: 50 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SolveStats {
    pub iterations: usize,
    pub residual: f64,
}

fn jacobi(k: &CsrMatrix) -> Result<Vec<f64>> {
    k.diagonal()
        .into_iter()
        .enumerate()
        .map(|(i, d)| {
            if d > 0.0 {
                Ok(1.0 / d)
            } else {
                Err(Error::Singular(format!("non-positive diagonal {d:e} at row {i}")))
            }
        })
        .collect()
}

/// Solves `K x = b` for symmetric positive definite `K`.
pub fn solve_sparse(k: &CsrMatrix, b: &[f64], opts: &SolverOptions) -> Result<(Vec<f64>, SolveStats)> {
    pcg(k, b, &[], opts).map(|(x, _, s)| (x, s))
}

/// Solves the saddle-point system `K x + Bᵀλ = b`, `B x = 0`, where the rows of
/// `B` are given in `constraints` and are mutually orthogonal. `K` only needs
/// to be positive definite on the null space of `B`. Returns `(x, λ, stats)`.
pub fn solve_constrained(
    k: &CsrMatrix,
    b: &[f64],
    constraints: &[Vec<f64>],
    opts: &SolverOptions,
) -> Result<(Vec<f64>, Vec<f64>, SolveStats)> {
    pcg(k, b, constraints, opts)
}

fn project(v: &mut [f64], constraints: &[Vec<f64>], norms2: &[f64]) {
    for (c, n2) in constraints.iter().zip(norms2) {
        let s = dot(c, v) / n2;
        if s != 0.0 {
            for (x, ci) in v.iter_mut().zip(c) {
                *x -= s * ci;
            }
        }
    }
}

fn pcg(
    k: &CsrMatrix,
    b: &[f64],
    constraints: &[Vec<f64>],
    opts: &SolverOptions,
) -> Result<(Vec<f64>, Vec<f64>, SolveStats)> {
    let n = k.dim();
    assert_eq!(b.len(), n);
    let norms2: Vec<f64> = constraints.iter().map(|c| dot(c, c)).collect();
    let multipliers = |r: &[f64]| -> Vec<f64> {
        constraints.iter().zip(&norms2).map(|(c, n2)| dot(c, r) / n2).collect()
    };
    let bnorm = norm(b);
    let mut x = vec![0.0; n];
    if bnorm == 0.0 {
        return Ok((x, vec![0.0; constraints.len()], SolveStats { iterations: 0, residual: 0.0 }));
    }
    let dinv = jacobi(k)?;
    let mut r = b.to_vec();
    project(&mut r, constraints, &norms2);
    let precondition = |r: &[f64], z: &mut Vec<f64>| {
        for i in 0..n {
            z[i] = dinv[i] * r[i];
        }
        project(z, constraints, &norms2);
    };
    let mut z = vec![0.0; n];
    precondition(&r, &mut z);
    let mut p = z.clone();
    let mut rz = dot(&r, &z);
    let mut kp = vec![0.0; n];
    let max_iter = opts.max_iter_factor.saturating_mul(n).max(10);
    let mut rnorm = norm(&r);
    let mut it = 0;
    while rnorm / bnorm > opts.tol {
        if it >= max_iter {
            return Err(Error::NoConvergence { iterations: it, residual: rnorm / bnorm });
        }
        k.matvec_into(&p, &mut kp);
        project(&mut kp, constraints, &norms2);
        let pkp = dot(&p, &kp);
        if !(pkp > 0.0) {
            return Err(Error::Singular(format!("search direction with non-positive curvature {pkp:e}")));
        }
        let alpha = rz / pkp;
        for i in 0..n {
            x[i] += alpha * p[i];
            r[i] -= alpha * kp[i];
        }
        precondition(&r, &mut z);
        let rz_new = dot(&r, &z);
        let beta = rz_new / rz;
        rz = rz_new;
        for i in 0..n {
            p[i] = z[i] + beta * p[i];
        }
        rnorm = norm(&r);
        it += 1;
    }
    // true residual
    let kx = k.matvec(&x);
    let full: Vec<f64> = b.iter().zip(&kx).map(|(bi, ki)| bi - ki).collect();
    let lambda = multipliers(&full);
    let mut res = full;
    project(&mut res, constraints, &norms2);
    let residual = norm(&res) / bnorm;
    Ok((x, lambda, SolveStats { iterations: it, residual }))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn dense_solve(a: &[Vec<f64>], b: &[f64]) -> Vec<f64> {
        let n = b.len();
        let m = nalgebra::DMatrix::from_fn(n, n, |i, j| a[i][j]);
        let v = nalgebra::DVector::from_column_slice(b);
        m.lu().solve(&v).unwrap().iter().copied().collect()
    }

    #[test]
    fn identity_returns_rhs() {
        let k = CsrMatrix::identity(5);
        let b = vec![1.0, -2.0, 3.0, 0.5, 0.0];
        let (x, _) = solve_sparse(&k, &b, &SolverOptions::default()).unwrap();
        for i in 0..5 {
            assert!((x[i] - b[i]).abs() < 1e-14);
        }
    }

    #[test]
    fn random_spd_matches_dense() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand::rngs::StdRng::seed_from_u64(7);
        let n = 50;
        let g: Vec<Vec<f64>> = (0..n).map(|_| (0..n).map(|_| rng.gen_range(-1.0..1.0)).collect()).collect();
        let mut a = vec![vec![0.0; n]; n];
        for i in 0..n {
            for j in 0..n {
                a[i][j] = (0..n).map(|k| g[k][i] * g[k][j]).sum::<f64>();
            }
            a[i][i] += n as f64 * 0.1;
        }
        let trip: Vec<_> = (0..n).flat_map(|i| (0..n).map(move |j| (i, j))).map(|(i, j)| (i, j, a[i][j])).collect();
        let k = CsrMatrix::from_triplets(n, &trip);
        let b: Vec<f64> = (0..n).map(|i| (i as f64).sin()).collect();
        let opts = SolverOptions::default();
        let (x, stats) = solve_sparse(&k, &b, &opts).unwrap();
        assert!(stats.residual <= opts.tol);
        let xd = dense_solve(&a, &b);
        let scale = xd.iter().fold(0.0f64, |m, v| m.max(v.abs()));
        for i in 0..n {
            assert!((x[i] - xd[i]).abs() <= 1e-8 * scale);
        }
    }

    #[test]
    fn non_convergence_reported() {
        let k = CsrMatrix::from_triplets(3, &[(0, 0, 1.0), (1, 1, 1e-8), (2, 2, 1.0), (0, 1, 0.9), (1, 0, 0.9)]);
        let r = solve_sparse(&k, &[1.0, 1.0, 1.0], &SolverOptions { tol: 1e-14, max_iter_factor: 0 });
        assert!(r.is_err());
    }

    #[test]
    fn constrained_solution_satisfies_kkt() {
        // singular 1D periodic Laplacian with a zero-mean constraint
        let n = 8;
        let mut t = Vec::new();
        for i in 0..n {
            let j = (i + 1) % n;
            t.extend([(i, i, 1.0), (j, j, 1.0), (i, j, -1.0), (j, i, -1.0)]);
        }
        let k = CsrMatrix::from_triplets(n, &t);
        let mut b: Vec<f64> = (0..n).map(|i| (i as f64 * 0.7).cos()).collect();
        let mean = b.iter().sum::<f64>() / n as f64;
        b.iter_mut().for_each(|v| *v -= mean);
        let ones = vec![1.0; n];
        let (x, lambda, _) = solve_constrained(&k, &b, std::slice::from_ref(&ones), &SolverOptions::default()).unwrap();
        assert!(dot(&x, &ones).abs() < 1e-12);
        assert!(lambda[0].abs() < 1e-10);
        let kx = k.matvec(&x);
        for i in 0..n {
            assert!((kx[i] - b[i]).abs() < 1e-9);
        }
    }
}
