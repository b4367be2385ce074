//! ASCII mesh files.
//!
//! ```text
//! $Grid                       (optional)
//! ox oy oz sx sy sz nx ny nz
//! $EndGrid
//! $Nodes
//! <count>
//! id x y z
//! $EndNodes
//! $Tets
//! <count>
//! id n1 n2 n3 n4 tag
//! $EndTets
//! $FaceTags
//! <count>
//! n1 n2 n3 face            (face 1..6 = xmin xmax ymin ymax zmin zmax)
//! $EndFaceTags
//! $Periodic
//! <count>
//! slave master axis        (axis 1..3)
//! $EndPeriodic
//! ```
//!
//! Ids are 0-based. Reals are written in shortest round-trip form, so a
//! read/write cycle reproduces the file byte for byte.

use std::fmt::Write as _;
use std::path::Path;

use super::{BoundaryFacet, Face, PeriodicPair, StructuredGrid, TetMesh};
use crate::error::{Error, Result};

pub fn mesh_to_string(mesh: &TetMesh) -> String {
    let mut s = String::new();
    if let Some(g) = mesh.grid {
        let _ = writeln!(s, "$Grid");
        let _ = writeln!(
            s,
            "{} {} {} {} {} {} {} {} {}",
            g.origin[0], g.origin[1], g.origin[2], g.size[0], g.size[1], g.size[2], g.divisions[0], g.divisions[1], g.divisions[2]
        );
        let _ = writeln!(s, "$EndGrid");
    }
    let _ = writeln!(s, "$Nodes\n{}", mesh.nodes.len());
    for (i, p) in mesh.nodes.iter().enumerate() {
        let _ = writeln!(s, "{i} {:?} {:?} {:?}", p[0], p[1], p[2]);
    }
    let _ = writeln!(s, "$EndNodes\n$Tets\n{}", mesh.tets.len());
    for (i, t) in mesh.tets.iter().enumerate() {
        let _ = writeln!(s, "{i} {} {} {} {} {}", t[0], t[1], t[2], t[3], mesh.material_tag[i]);
    }
    let _ = writeln!(s, "$EndTets\n$FaceTags\n{}", mesh.face_tags.len());
    for f in &mesh.face_tags {
        let _ = writeln!(s, "{} {} {} {}", f.nodes[0], f.nodes[1], f.nodes[2], f.face.id());
    }
    let _ = writeln!(s, "$EndFaceTags\n$Periodic\n{}", mesh.periodic_pairs.len());
    for p in &mesh.periodic_pairs {
        let _ = writeln!(s, "{} {} {}", p.slave, p.master, p.axis + 1);
    }
    let _ = writeln!(s, "$EndPeriodic");
    s
}

pub fn write_mesh(path: &Path, mesh: &TetMesh) -> Result<()> {
    std::fs::write(path, mesh_to_string(mesh))?;
    Ok(())
}

pub fn read_mesh(path: &Path) -> Result<TetMesh> {
    let text = std::fs::read_to_string(path)?;
    parse_mesh(&text, path)
}

pub fn parse_mesh(text: &str, path: &Path) -> Result<TetMesh> {
    let lines: Vec<&str> = text.lines().collect();
    let mut at = 0usize;
    let err = |line: usize, msg: &str| Error::Format { path: path.to_path_buf(), line: line + 1, msg: msg.to_string() };
    let mut mesh = TetMesh {
        nodes: Vec::new(),
        tets: Vec::new(),
        material_tag: Vec::new(),
        face_tags: Vec::new(),
        periodic_pairs: Vec::new(),
        grid: None,
    };
    fn nums<T: std::str::FromStr>(line: &str, n: usize) -> Option<Vec<T>> {
        let v: Vec<T> = line.split_whitespace().map(|t| t.parse().ok()).collect::<Option<_>>()?;
        (v.len() == n).then_some(v)
    }
    while at < lines.len() {
        let header = lines[at].trim();
        at += 1;
        if header.is_empty() {
            continue;
        }
        if header == "$Grid" {
            let line = lines.get(at).ok_or_else(|| err(at, "truncated grid"))?;
            let v: Vec<&str> = line.split_whitespace().collect();
            if v.len() != 9 {
                return Err(err(at, "grid line needs 9 fields"));
            }
            let f = |i: usize| v[i].parse::<f64>().map_err(|_| err(at, "bad real"));
            let u = |i: usize| v[i].parse::<usize>().map_err(|_| err(at, "bad integer"));
            mesh.grid = Some(StructuredGrid {
                origin: [f(0)?, f(1)?, f(2)?],
                size: [f(3)?, f(4)?, f(5)?],
                divisions: [u(6)?, u(7)?, u(8)?],
            });
            at += 1;
            if lines.get(at).map(|l| l.trim()) != Some("$EndGrid") {
                return Err(err(at, "expected $EndGrid"));
            }
            at += 1;
            continue;
        }
        let end = match header {
            "$Nodes" => "$EndNodes",
            "$Tets" => "$EndTets",
            "$FaceTags" => "$EndFaceTags",
            "$Periodic" => "$EndPeriodic",
            _ => return Err(err(at - 1, &format!("unknown section {header}"))),
        };
        let count: usize = lines
            .get(at)
            .and_then(|l| l.trim().parse().ok())
            .ok_or_else(|| err(at, "expected entry count"))?;
        at += 1;
        for _ in 0..count {
            let line = *lines.get(at).ok_or_else(|| err(at, "truncated section"))?;
            match header {
                "$Nodes" => {
                    let v: Vec<&str> = line.split_whitespace().collect();
                    if v.len() != 4 || v[0].parse::<usize>().ok() != Some(mesh.nodes.len()) {
                        return Err(err(at, "node line must be `id x y z` with consecutive ids"));
                    }
                    let c = nums::<f64>(&v[1..].join(" "), 3).ok_or_else(|| err(at, "bad coordinate"))?;
                    mesh.nodes.push([c[0], c[1], c[2]]);
                }
                "$Tets" => {
                    let v = nums::<usize>(line, 6).ok_or_else(|| err(at, "tet line must be `id n1 n2 n3 n4 tag`"))?;
                    if v[0] != mesh.tets.len() {
                        return Err(err(at, "tet ids must be consecutive"));
                    }
                    mesh.tets.push([v[1], v[2], v[3], v[4]]);
                    mesh.material_tag.push(v[5] as u32);
                }
                "$FaceTags" => {
                    let v = nums::<usize>(line, 4).ok_or_else(|| err(at, "face line must be `n1 n2 n3 face`"))?;
                    let face = Face::from_id(v[3] as u8).ok_or_else(|| err(at, "face id must be 1..6"))?;
                    mesh.face_tags.push(BoundaryFacet { nodes: [v[0], v[1], v[2]], face });
                }
                _ => {
                    let v = nums::<usize>(line, 3).ok_or_else(|| err(at, "periodic line must be `slave master axis`"))?;
                    if !(1..=3).contains(&v[2]) {
                        return Err(err(at, "axis must be 1..3"));
                    }
                    mesh.periodic_pairs.push(PeriodicPair { slave: v[0], master: v[1], axis: v[2] - 1 });
                }
            }
            at += 1;
        }
        if lines.get(at).map(|l| l.trim()) != Some(end) {
            return Err(err(at, &format!("expected {end}")));
        }
        at += 1;
    }
    mesh.validate()?;
    Ok(mesh)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mesh::{generate_unit_cell_mesh, PhaseGeometry};

    #[test]
    fn round_trip_is_byte_exact() {
        let lam = PhaseGeometry::Laminate { axis: 2, layers: vec![(0.3, 0), (0.7, 1)] };
        let m = generate_unit_cell_mesh(3, &lam).unwrap();
        let text = mesh_to_string(&m);
        let back = parse_mesh(&text, Path::new("mem")).unwrap();
        assert_eq!(back, m);
        assert_eq!(mesh_to_string(&back), text);
    }

    #[test]
    fn rejects_garbage() {
        assert!(parse_mesh("$Nodes\n1\n0 1 2\n$EndNodes\n", Path::new("x")).is_err());
        assert!(parse_mesh("$Bogus\n", Path::new("x")).is_err());
    }
}
