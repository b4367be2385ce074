use super::{cross, dot, sub, TetMesh};

/// Barycentric coordinates of `p` in the tetrahedron `t`.
pub fn barycentric(t: &[[f64; 3]; 4], p: [f64; 3]) -> [f64; 4] {
    let a = sub(t[1], t[0]);
    let b = sub(t[2], t[0]);
    let c = sub(t[3], t[0]);
    let d = sub(p, t[0]);
    let det = dot(a, cross(b, c));
    let l1 = dot(d, cross(b, c)) / det;
    let l2 = dot(a, cross(d, c)) / det;
    let l3 = dot(a, cross(b, d)) / det;
    [1.0 - l1 - l2 - l3, l1, l2, l3]
}

fn min4(l: &[f64; 4]) -> f64 {
    l.iter().copied().fold(f64::INFINITY, f64::min)
}

enum Index {
    Structured,
    Bins { lo: [f64; 3], h: [f64; 3], n: [usize; 3], bins: Vec<Vec<usize>> },
}

/// Point location in a tetrahedral mesh.
pub struct Locator<'a> {
    mesh: &'a TetMesh,
    index: Index,
    tol: f64,
}

impl<'a> Locator<'a> {
    pub fn new(mesh: &'a TetMesh) -> Self {
        let (lo, hi) = mesh.bounds();
        let span = (0..3).map(|a| hi[a] - lo[a]).fold(0.0, f64::max);
        let tol = 1e-9;
        if mesh.grid.is_some() && mesh.tets.len() == 6 * mesh.grid.unwrap().divisions.iter().product::<usize>() {
            return Locator { mesh, index: Index::Structured, tol };
        }
        let per_axis = ((mesh.tets.len() as f64).cbrt().ceil() as usize).max(1);
        let n = [per_axis; 3];
        let h = [0, 1, 2].map(|a| ((hi[a] - lo[a]) / per_axis as f64).max(span * 1e-12));
        let mut bins = vec![Vec::new(); per_axis.pow(3)];
        for (e, tet) in mesh.tets.iter().enumerate() {
            let mut blo = [usize::MAX; 3];
            let mut bhi = [0usize; 3];
            for &v in tet {
                for a in 0..3 {
                    let b = (((mesh.nodes[v][a] - lo[a]) / h[a]).floor().max(0.0) as usize).min(n[a] - 1);
                    blo[a] = blo[a].min(b);
                    bhi[a] = bhi[a].max(b);
                }
            }
            for k in blo[2]..=bhi[2] {
                for j in blo[1]..=bhi[1] {
                    for i in blo[0]..=bhi[0] {
                        bins[i + n[0] * (j + n[1] * k)].push(e);
                    }
                }
            }
        }
        Locator { mesh, index: Index::Bins { lo, h, n, bins }, tol }
    }

    /// Element containing `p` and the barycentric weights of `p` in it.
    pub fn locate(&self, p: [f64; 3]) -> Option<(usize, [f64; 4])> {
        let mut best: Option<(usize, [f64; 4])> = None;
        let mut consider = |e: usize| {
            let l = barycentric(&self.mesh.tet_points(e), p);
            if best.is_none_or(|(_, b)| min4(&l) > min4(&b)) {
                best = Some((e, l));
            }
        };
        match &self.index {
            Index::Structured => {
                let g = self.mesh.grid.unwrap();
                let h = g.spacing();
                let mut cube = [0usize; 3];
                for a in 0..3 {
                    let t = (p[a] - g.origin[a]) / h[a];
                    if t < -self.tol * g.divisions[a] as f64 || t > g.divisions[a] as f64 * (1.0 + self.tol) {
                        return None;
                    }
                    cube[a] = (t.floor().max(0.0) as usize).min(g.divisions[a] - 1);
                }
                let [nx, ny, _] = g.divisions;
                let c = cube[0] + nx * (cube[1] + ny * cube[2]);
                for e in 6 * c..6 * c + 6 {
                    consider(e);
                }
            }
            Index::Bins { lo, h, n, bins } => {
                let mut b = [0usize; 3];
                for a in 0..3 {
                    let t = ((p[a] - lo[a]) / h[a]).floor();
                    if t < -1.0 || t > n[a] as f64 {
                        return None;
                    }
                    b[a] = (t.max(0.0) as usize).min(n[a] - 1);
                }
                for &e in &bins[b[0] + n[0] * (b[1] + n[1] * b[2])] {
                    consider(e);
                }
            }
        }
        best.filter(|(_, l)| min4(l) >= -self.tol)
    }
}
