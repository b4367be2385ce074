//! Degree-of-freedom bookkeeping: periodic master/slave reduction, Dirichlet
//! condensation and zero-mean constraint vectors.

use std::collections::BTreeMap;

use super::sparse::CsrMatrix;
use crate::error::{Error, Result};
use crate::mesh::{resolve_masters, PeriodicPair, TetMesh};

#[derive(Debug, Clone, Default, PartialEq)]
pub struct Constraints {
    /// `(node, component, value)`
    pub dirichlet: Vec<(usize, usize, f64)>,
    pub periodic: Vec<PeriodicPair>,
    /// One zero-mean condition per displacement component.
    pub zero_mean: bool,
}

impl Constraints {
    pub fn periodic_zero_mean(pairs: &[PeriodicPair]) -> Self {
        Constraints { dirichlet: Vec::new(), periodic: pairs.to_vec(), zero_mean: true }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Dof {
    Free(usize),
    Fixed(f64),
}

/// Maps nodal components to reduced unknowns.
#[derive(Debug, Clone)]
pub struct DofMap {
    master: Vec<usize>,
    target: Vec<Dof>,
    n_free: usize,
    zero_mean: bool,
}

impl DofMap {
    pub fn unconstrained(node_count: usize) -> Self {
        DofMap {
            master: (0..node_count).collect(),
            target: (0..3 * node_count).map(Dof::Free).collect(),
            n_free: 3 * node_count,
            zero_mean: false,
        }
    }

    pub fn new(node_count: usize, c: &Constraints) -> Result<Self> {
        if c.zero_mean && !c.dirichlet.is_empty() {
            return Err(Error::InvalidArgument(
                "zero-mean constraints cannot be combined with Dirichlet values".into(),
            ));
        }
        for p in &c.periodic {
            if p.slave >= node_count || p.master >= node_count {
                return Err(Error::InvalidArgument(format!("periodic pair {p:?} references a missing node")));
            }
        }
        let master = resolve_masters(node_count, &c.periodic);
        let mut fixed: BTreeMap<(usize, usize), (usize, f64)> = BTreeMap::new();
        for &(node, comp, value) in &c.dirichlet {
            if node >= node_count || comp > 2 {
                return Err(Error::InvalidArgument(format!("Dirichlet value on node {node}, component {comp}")));
            }
            let key = (master[node], comp);
            match fixed.get(&key) {
                Some(&(_, v)) if v != value => {
                    return Err(Error::ConflictingConstraint { node, component: comp });
                }
                _ => {
                    fixed.insert(key, (node, value));
                }
            }
        }
        let mut target = vec![Dof::Free(0); 3 * node_count];
        let mut n_free = 0;
        for n in 0..node_count {
            if master[n] != n {
                continue;
            }
            for comp in 0..3 {
                target[3 * n + comp] = match fixed.get(&(n, comp)) {
                    Some(&(_, v)) => Dof::Fixed(v),
                    None => {
                        n_free += 1;
                        Dof::Free(n_free - 1)
                    }
                };
            }
        }
        for n in 0..node_count {
            let m = master[n];
            if m != n {
                for comp in 0..3 {
                    target[3 * n + comp] = target[3 * m + comp];
                }
            }
        }
        Ok(DofMap { master, target, n_free, zero_mean: c.zero_mean })
    }

    pub fn node_count(&self) -> usize {
        self.master.len()
    }

    pub fn n_free(&self) -> usize {
        self.n_free
    }

    pub fn has_zero_mean(&self) -> bool {
        self.zero_mean
    }

    #[inline]
    pub fn dof(&self, node: usize, comp: usize) -> Dof {
        self.target[3 * node + comp]
    }

    pub fn master(&self, node: usize) -> usize {
        self.master[node]
    }

    /// Nodal displacements from reduced unknowns.
    pub fn expand(&self, x: &[f64]) -> Vec<[f64; 3]> {
        (0..self.node_count())
            .map(|n| {
                [0, 1, 2].map(|c| match self.dof(n, c) {
                    Dof::Free(i) => x[i],
                    Dof::Fixed(v) => v,
                })
            })
            .collect()
    }

    /// Sums a full-length (3 per node) load vector onto the reduced unknowns.
    pub fn restrict(&self, full: &[f64]) -> Vec<f64> {
        let mut r = vec![0.0; self.n_free];
        for (k, &v) in full.iter().enumerate() {
            if let Dof::Free(i) = self.target[k] {
                r[i] += v;
            }
        }
        r
    }

    /// Sparsity pattern of the reduced stiffness for the given connectivity.
    pub fn pattern(&self, tets: &[[usize; 4]]) -> CsrMatrix {
        let n = self.node_count();
        let mut adj: Vec<Vec<u32>> = vec![Vec::new(); n];
        for t in tets {
            let m = t.map(|v| self.master[v]);
            for &a in &m {
                for &b in &m {
                    adj[a].push(b as u32);
                }
            }
        }
        for a in adj.iter_mut() {
            a.sort_unstable();
            a.dedup();
        }
        let mut rows: Vec<Vec<u32>> = vec![Vec::new(); self.n_free];
        for node in 0..n {
            if self.master[node] != node {
                continue;
            }
            for comp in 0..3 {
                if let Dof::Free(i) = self.dof(node, comp) {
                    let mut cols = Vec::with_capacity(3 * adj[node].len());
                    for &nb in &adj[node] {
                        for d in 0..3 {
                            if let Dof::Free(j) = self.dof(nb as usize, d) {
                                cols.push(j as u32);
                            }
                        }
                    }
                    rows[i] = cols;
                }
            }
        }
        CsrMatrix::from_pattern(rows)
    }

    /// Quadrature weights `∫ φ_n dQ` summed onto the reduced unknowns, one
    /// vector per component; `w · x` is the integral of that component.
    pub fn mean_constraints(&self, mesh: &TetMesh) -> Vec<Vec<f64>> {
        let nodal = nodal_volumes(mesh);
        (0..3)
            .map(|c| {
                let mut w = vec![0.0; self.n_free];
                for (n, &v) in nodal.iter().enumerate() {
                    if let Dof::Free(i) = self.dof(n, c) {
                        w[i] += v;
                    }
                }
                w
            })
            .collect()
    }

    /// Condenses an assembled full system (3 unknowns per node).
    pub fn reduce(&self, k_full: &CsrMatrix, rhs_full: &[f64]) -> (CsrMatrix, Vec<f64>) {
        let mut trip = Vec::with_capacity(k_full.nnz());
        let mut rhs = self.restrict(rhs_full);
        for a in 0..k_full.dim() {
            let Dof::Free(i) = self.target[a] else { continue };
            for (b, v) in k_full.row(a) {
                match self.target[b] {
                    Dof::Free(j) => trip.push((i, j, v)),
                    Dof::Fixed(g) => rhs[i] -= v * g,
                }
            }
        }
        (CsrMatrix::from_triplets(self.n_free, &trip), rhs)
    }
}

/// `∫ φ_n` for every node of a linear-tet mesh.
pub fn nodal_volumes(mesh: &TetMesh) -> Vec<f64> {
    let mut w = vec![0.0; mesh.node_count()];
    for (e, t) in mesh.tets.iter().enumerate() {
        let v = mesh.volume_of(e) / 4.0;
        for &n in t {
            w[n] += v;
        }
    }
    w
}
