//! Structured linear-tetrahedron meshes for the unit cell and the macroscopic domain.
//!
//! Every mesh produced here is a box of `nx*ny*nz` cubes, each cut into six
//! tetrahedra along the main diagonal (Kuhn split). The six tetrahedra of cube
//! `c = i + nx*(j + ny*k)` are stored at `tets[6*c..6*c+6]`, which the point
//! locator relies on.

pub mod io;
mod locate;
mod phase;

pub use io::{read_mesh, write_mesh};
pub use locate::Locator;
pub use phase::PhaseGeometry;

use std::collections::HashMap;

use crate::error::{Error, Result};

/// Boundary face of an axis-aligned box, numbered 1..=6 in files.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Face {
    XMin,
    XMax,
    YMin,
    YMax,
    ZMin,
    ZMax,
}

impl Face {
    pub const ALL: [Face; 6] = [Face::XMin, Face::XMax, Face::YMin, Face::YMax, Face::ZMin, Face::ZMax];

    pub fn id(self) -> u8 {
        self as u8 + 1
    }

    pub fn from_id(id: u8) -> Option<Face> {
        Face::ALL.get((id as usize).wrapping_sub(1)).copied()
    }

    pub fn axis(self) -> usize {
        self as usize / 2
    }

    pub fn is_max(self) -> bool {
        self as usize % 2 == 1
    }

    pub fn name(self) -> &'static str {
        ["xmin", "xmax", "ymin", "ymax", "zmin", "zmax"][self as usize]
    }

    pub fn from_name(s: &str) -> Option<Face> {
        let s = s.trim().to_ascii_lowercase();
        let alias = match s.as_str() {
            "a1min" | "alpha1min" => "xmin",
            "a1max" | "alpha1max" => "xmax",
            "a2min" | "alpha2min" => "ymin",
            "a2max" | "alpha2max" => "ymax",
            "a3min" | "alpha3min" => "zmin",
            "a3max" | "alpha3max" => "zmax",
            other => other,
        };
        Face::ALL.iter().copied().find(|f| f.name() == alias)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoundaryFacet {
    pub nodes: [usize; 3],
    pub face: Face,
}

/// A direct periodic partner: `slave` sits on the max face of `axis`, `master`
/// on the min face, with equal coordinates modulo the period.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PeriodicPair {
    pub slave: usize,
    pub master: usize,
    pub axis: usize,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StructuredGrid {
    pub origin: [f64; 3],
    pub size: [f64; 3],
    pub divisions: [usize; 3],
}

impl StructuredGrid {
    pub fn node_index(&self, i: usize, j: usize, k: usize) -> usize {
        let [nx, ny, _] = self.divisions;
        i + (nx + 1) * (j + (ny + 1) * k)
    }

    pub fn spacing(&self) -> [f64; 3] {
        [0, 1, 2].map(|a| self.size[a] / self.divisions[a] as f64)
    }

    pub fn node_count(&self) -> usize {
        self.divisions.iter().map(|d| d + 1).product()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct TetMesh {
    pub nodes: Vec<[f64; 3]>,
    pub tets: Vec<[usize; 4]>,
    pub material_tag: Vec<u32>,
    pub face_tags: Vec<BoundaryFacet>,
    pub periodic_pairs: Vec<PeriodicPair>,
    pub grid: Option<StructuredGrid>,
}

/// Macroscopic domain in curvilinear coordinates `(α1, α2, α3)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum MacroDomain {
    Box { lo: [f64; 3], hi: [f64; 3] },
    /// Angular and thickness ranges of a shell; still meshed as a box in α-space.
    ShellSector { alpha1: (f64, f64), alpha2: (f64, f64), alpha3: (f64, f64) },
}

impl MacroDomain {
    pub fn bounds(&self) -> ([f64; 3], [f64; 3]) {
        match *self {
            MacroDomain::Box { lo, hi } => (lo, hi),
            MacroDomain::ShellSector { alpha1, alpha2, alpha3 } => {
                ([alpha1.0, alpha2.0, alpha3.0], [alpha1.1, alpha2.1, alpha3.1])
            }
        }
    }

    pub fn volume(&self) -> f64 {
        let (lo, hi) = self.bounds();
        (0..3).map(|a| hi[a] - lo[a]).product()
    }
}

pub fn tet_signed_volume(p: [[f64; 3]; 4]) -> f64 {
    let a = sub(p[1], p[0]);
    let b = sub(p[2], p[0]);
    let c = sub(p[3], p[0]);
    dot(a, cross(b, c)) / 6.0
}

pub(crate) fn sub(a: [f64; 3], b: [f64; 3]) -> [f64; 3] {
    [a[0] - b[0], a[1] - b[1], a[2] - b[2]]
}

pub(crate) fn dot(a: [f64; 3], b: [f64; 3]) -> f64 {
    a[0] * b[0] + a[1] * b[1] + a[2] * b[2]
}

pub(crate) fn cross(a: [f64; 3], b: [f64; 3]) -> [f64; 3] {
    [a[1] * b[2] - a[2] * b[1], a[2] * b[0] - a[0] * b[2], a[0] * b[1] - a[1] * b[0]]
}

// Axis orderings of the six Kuhn paths from corner 000 to corner 111.
const KUHN_PATHS: [[usize; 3]; 6] = [[0, 1, 2], [0, 2, 1], [1, 0, 2], [1, 2, 0], [2, 0, 1], [2, 1, 0]];

fn structured_box(origin: [f64; 3], size: [f64; 3], divisions: [usize; 3]) -> Result<TetMesh> {
    if divisions.contains(&0) {
        return Err(Error::InvalidMesh(format!("divisions must be positive, got {divisions:?}")));
    }
    if size.iter().any(|s| !(s.is_finite() && *s > 0.0)) {
        return Err(Error::InvalidMesh(format!("degenerate extents {size:?}")));
    }
    let grid = StructuredGrid { origin, size, divisions };
    let [nx, ny, nz] = divisions;
    let h = grid.spacing();
    let mut nodes = Vec::with_capacity(grid.node_count());
    for k in 0..=nz {
        for j in 0..=ny {
            for i in 0..=nx {
                // exact end coordinates, so opposite faces are congruent bit for bit
                let c = |a: usize, idx: usize, n: usize| {
                    if idx == n {
                        origin[a] + size[a]
                    } else {
                        origin[a] + idx as f64 * h[a]
                    }
                };
                nodes.push([c(0, i, nx), c(1, j, ny), c(2, k, nz)]);
            }
        }
    }
    let mut tets = Vec::with_capacity(6 * nx * ny * nz);
    for k in 0..nz {
        for j in 0..ny {
            for i in 0..nx {
                for path in KUHN_PATHS {
                    let mut ijk = [i, j, k];
                    let mut tet = [grid.node_index(i, j, k), 0, 0, 0];
                    for (step, &axis) in path.iter().enumerate() {
                        ijk[axis] += 1;
                        tet[step + 1] = grid.node_index(ijk[0], ijk[1], ijk[2]);
                    }
                    let vol = tet_signed_volume(tet.map(|n| nodes[n]));
                    if vol < 0.0 {
                        tet.swap(2, 3);
                    }
                    tets.push(tet);
                }
            }
        }
    }
    let mut mesh = TetMesh {
        material_tag: vec![0; tets.len()],
        nodes,
        tets,
        face_tags: Vec::new(),
        periodic_pairs: Vec::new(),
        grid: Some(grid),
    };
    mesh.face_tags = mesh.boundary_facets();
    Ok(mesh)
}

impl TetMesh {
    pub fn node_count(&self) -> usize {
        self.nodes.len()
    }

    pub fn element_count(&self) -> usize {
        self.tets.len()
    }

    pub fn tet_points(&self, e: usize) -> [[f64; 3]; 4] {
        self.tets[e].map(|n| self.nodes[n])
    }

    pub fn volume_of(&self, e: usize) -> f64 {
        tet_signed_volume(self.tet_points(e))
    }

    pub fn centroid(&self, e: usize) -> [f64; 3] {
        let p = self.tet_points(e);
        [0, 1, 2].map(|a| 0.25 * (p[0][a] + p[1][a] + p[2][a] + p[3][a]))
    }

    pub fn total_volume(&self) -> f64 {
        (0..self.tets.len()).map(|e| self.volume_of(e)).sum()
    }

    pub fn bounds(&self) -> ([f64; 3], [f64; 3]) {
        let mut lo = [f64::INFINITY; 3];
        let mut hi = [f64::NEG_INFINITY; 3];
        for p in &self.nodes {
            for a in 0..3 {
                lo[a] = lo[a].min(p[a]);
                hi[a] = hi[a].max(p[a]);
            }
        }
        (lo, hi)
    }

    /// Checks positive volumes and index ranges.
    pub fn validate(&self) -> Result<()> {
        if self.material_tag.len() != self.tets.len() {
            return Err(Error::InvalidMesh("material tag count differs from tet count".into()));
        }
        for (e, tet) in self.tets.iter().enumerate() {
            if tet.iter().any(|&n| n >= self.nodes.len()) {
                return Err(Error::InvalidMesh(format!("tet {e} references a missing node")));
            }
            let vol = self.volume_of(e);
            if !(vol > 0.0) {
                return Err(Error::DegenerateElement { element: e, volume: vol });
            }
        }
        Ok(())
    }

    /// Facets lying on the bounding box, each tagged with its face.
    fn boundary_facets(&self) -> Vec<BoundaryFacet> {
        let (lo, hi) = self.bounds();
        let tol = 1e-12 * (0..3).map(|a| hi[a] - lo[a]).fold(0.0, f64::max);
        let on = |n: usize, f: Face| {
            let x = self.nodes[n][f.axis()];
            let target = if f.is_max() { hi[f.axis()] } else { lo[f.axis()] };
            (x - target).abs() <= tol
        };
        let mut facets = Vec::new();
        for tet in &self.tets {
            for skip in 0..4 {
                let tri: Vec<usize> = (0..4).filter(|&i| i != skip).map(|i| tet[i]).collect();
                for f in Face::ALL {
                    if tri.iter().all(|&n| on(n, f)) {
                        facets.push(BoundaryFacet { nodes: [tri[0], tri[1], tri[2]], face: f });
                    }
                }
            }
        }
        facets
    }

    /// Nodes lying on a tagged face.
    pub fn face_nodes(&self, face: Face) -> Vec<usize> {
        let mut v: Vec<usize> =
            self.face_tags.iter().filter(|f| f.face == face).flat_map(|f| f.nodes).collect();
        v.sort_unstable();
        v.dedup();
        v
    }

    /// Nodes touching any boundary facet.
    pub fn boundary_node_mask(&self) -> Vec<bool> {
        let mut mask = vec![false; self.nodes.len()];
        for f in &self.face_tags {
            for &n in &f.nodes {
                mask[n] = true;
            }
        }
        mask
    }

    /// Tags each element by evaluating `phase` at its centroid.
    pub fn tag_phases(&mut self, phase: &PhaseGeometry) {
        let tags: Vec<u32> = (0..self.tets.len()).map(|e| phase.phase_at(self.centroid(e))).collect();
        self.material_tag = tags;
    }

    /// Volume fraction of each tag present in the mesh.
    pub fn phase_fractions(&self) -> Vec<(u32, f64)> {
        let mut acc: std::collections::BTreeMap<u32, f64> = Default::default();
        let total = self.total_volume();
        for e in 0..self.tets.len() {
            *acc.entry(self.material_tag[e]).or_default() += self.volume_of(e);
        }
        acc.into_iter().map(|(k, v)| (k, v / total)).collect()
    }
}

/// Kuhn-split mesh of the unit cell with `n` cubes per axis, phase-tagged at
/// element centroids and periodically paired on all three axes.
pub fn generate_unit_cell_mesh(n: usize, phase: &PhaseGeometry) -> Result<TetMesh> {
    if n == 0 {
        return Err(Error::InvalidMesh("unit cell needs at least one subdivision".into()));
    }
    phase.validate()?;
    let mut mesh = structured_box([0.0; 3], [1.0; 3], [n; 3])?;
    mesh.tag_phases(phase);
    let mut pairs = Vec::new();
    for axis in 0..3 {
        pairs.extend(periodic_pairs(&mesh, axis)?);
    }
    mesh.periodic_pairs = pairs;
    Ok(mesh)
}

pub fn generate_macro_mesh(domain: &MacroDomain, divisions: [usize; 3]) -> Result<TetMesh> {
    let (lo, hi) = domain.bounds();
    let size = [0, 1, 2].map(|a| hi[a] - lo[a]);
    structured_box(lo, size, divisions)
}

/// Pairs every node on the max face of `axis` with its partner on the min face.
pub fn periodic_pairs(mesh: &TetMesh, axis: usize) -> Result<Vec<PeriodicPair>> {
    if axis > 2 {
        return Err(Error::InvalidArgument(format!("axis {axis} out of range")));
    }
    let (lo, hi) = mesh.bounds();
    let span = (0..3).map(|a| hi[a] - lo[a]).fold(0.0, f64::max);
    let tol = 1e-10 * span.max(1.0);
    let others: Vec<usize> = (0..3).filter(|&a| a != axis).collect();
    let key = |p: [f64; 3]| {
        (
            ((p[others[0]] - lo[others[0]]) / tol).round() as i64,
            ((p[others[1]] - lo[others[1]]) / tol).round() as i64,
        )
    };
    let mut min_face: HashMap<(i64, i64), usize> = HashMap::new();
    let mut max_nodes = Vec::new();
    for (n, p) in mesh.nodes.iter().enumerate() {
        if (p[axis] - lo[axis]).abs() <= tol {
            min_face.insert(key(*p), n);
        } else if (p[axis] - hi[axis]).abs() <= tol {
            max_nodes.push(n);
        }
    }
    let mut pairs = Vec::with_capacity(max_nodes.len());
    for n in max_nodes {
        let p = mesh.nodes[n];
        let (a, b) = key(p);
        // tolerate rounding at the bucket edges
        let found = [(0, 0), (1, 0), (-1, 0), (0, 1), (0, -1), (1, 1), (1, -1), (-1, 1), (-1, -1)]
            .iter()
            .filter_map(|(da, db)| min_face.get(&(a + da, b + db)).copied())
            .find(|&m| {
                let q = mesh.nodes[m];
                others.iter().all(|&o| (q[o] - p[o]).abs() <= tol)
            });
        match found {
            Some(m) => pairs.push(PeriodicPair { slave: n, master: m, axis }),
            None => return Err(Error::UnmatchedPeriodicNode { node: n, axis, coords: p }),
        }
    }
    if pairs.is_empty() {
        return Err(Error::InvalidMesh(format!("no nodes on the faces of axis {axis}")));
    }
    Ok(pairs)
}

/// Follows chained pairs (edges, corners) to a final master for every node.
pub fn resolve_masters(node_count: usize, pairs: &[PeriodicPair]) -> Vec<usize> {
    let mut parent: Vec<usize> = (0..node_count).collect();
    for p in pairs {
        parent[p.slave] = p.master;
    }
    (0..node_count)
        .map(|mut n| {
            let mut steps = 0;
            while parent[n] != n && steps <= pairs.len() {
                n = parent[n];
                steps += 1;
            }
            n
        })
        .collect()
}
