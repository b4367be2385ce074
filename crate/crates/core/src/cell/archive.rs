//! ASCII cell-solution archive.
//!
//! ```text
//! shellhom-cell-archive 1
//! config_hash <hex | none>
//! alpha_i a1 a2 a3
//! metric_h H1 H2 H3
//! metric_dh dH1/da1 dH1/da2 ... dH3/da3      (row-major)
//! asymmetry <raw relative asymmetry of C_hat>
//! pair_order 11 22 33 12 23 13
//! n2_order j-major 1 2 3                      (case index 6*(j-1) + mn)
//! c_hat                                       (6 rows, tensor components C_ijkl)
//! mesh_begin / <mesh file> / mesh_end
//! n1 <nodes>      one line per node: 6 cases × 3 components
//! d <elements>    one line per element: 6 cases × 6 tensor components
//! n2 <nodes>      one line per node: 18 cases × 3 components (count 0 if absent)
//! w <nodes>       one line per node: 6 cases × 3 components
//! end
//! ```

use std::fmt::Write as _;
use std::path::Path;

use super::{CellSolutionSet, NodalField};
use crate::error::{Error, Result};
use crate::io::text::{push_reals, LineReader};
use crate::mesh::io::{mesh_to_string, parse_mesh};
use crate::metric::MetricSample;
use crate::tensor::{ElasticTensor, Sym3};

pub const ARCHIVE_VERSION: u32 = 1;
const MAGIC: &str = "shellhom-cell-archive";

fn push_fields(out: &mut String, key: &str, fields: &[NodalField]) {
    let n = fields.first().map_or(0, |f| f.len());
    let _ = writeln!(out, "{key} {n}");
    let mut row = Vec::with_capacity(3 * fields.len());
    for node in 0..n {
        row.clear();
        for f in fields {
            row.extend_from_slice(&f[node]);
        }
        push_reals(out, &row);
    }
}

pub fn archive_to_string(set: &CellSolutionSet) -> String {
    let mut s = String::new();
    let _ = writeln!(s, "{MAGIC} {ARCHIVE_VERSION}");
    let _ = writeln!(s, "config_hash {}", set.config_hash.as_deref().unwrap_or("none"));
    s.push_str("alpha_i ");
    push_reals(&mut s, &set.alpha_i);
    s.push_str("metric_h ");
    push_reals(&mut s, &set.metric.h);
    s.push_str("metric_dh ");
    push_reals(&mut s, &set.metric.dh.concat());
    s.push_str("asymmetry ");
    push_reals(&mut s, &[set.asymmetry]);
    s.push_str("pair_order 11 22 33 12 23 13\n");
    s.push_str("n2_order j-major 1 2 3\n");
    s.push_str("c_hat\n");
    for row in set.c_hat.matrix() {
        push_reals(&mut s, row);
    }
    s.push_str("mesh_begin\n");
    s.push_str(&mesh_to_string(&set.mesh));
    s.push_str("mesh_end\n");
    push_fields(&mut s, "n1", &set.n1);
    let _ = writeln!(s, "d {}", set.d.first().map_or(0, |d| d.len()));
    if let Some(first) = set.d.first() {
        for e in 0..first.len() {
            let row: Vec<f64> = set.d.iter().flat_map(|d| d[e]).collect();
            push_reals(&mut s, &row);
        }
    }
    push_fields(&mut s, "n2", &set.n2);
    push_fields(&mut s, "w", &set.w);
    s.push_str("end\n");
    s
}

pub fn write_cell_archive(path: &Path, set: &CellSolutionSet) -> Result<()> {
    std::fs::write(path, archive_to_string(set))?;
    Ok(())
}

fn read_fields(r: &mut LineReader, key: &str, cases: usize) -> Result<Vec<NodalField>> {
    let n = {
        let t = r.keyed(key)?;
        r.count(&t)?
    };
    if n == 0 {
        return Ok(Vec::new());
    }
    let mut out = vec![Vec::with_capacity(n); cases];
    for _ in 0..n {
        let v = r.real_line(3 * cases)?;
        for (c, f) in out.iter_mut().enumerate() {
            f.push([v[3 * c], v[3 * c + 1], v[3 * c + 2]]);
        }
    }
    Ok(out)
}

pub fn parse_cell_archive(text: &str, path: &Path) -> Result<CellSolutionSet> {
    let mut r = LineReader::new(text, path);
    let head = r.keyed(MAGIC)?;
    if head != [ARCHIVE_VERSION.to_string().as_str()] {
        return Err(r.error(format!("unsupported archive version {head:?}")));
    }
    let hash = r.keyed("config_hash")?;
    let config_hash = match hash.as_slice() {
        ["none"] => None,
        [h] => Some(h.to_string()),
        _ => return Err(r.error("bad config hash")),
    };
    let t = r.keyed("alpha_i")?;
    let a = r.reals(&t, 3)?;
    let t = r.keyed("metric_h")?;
    let h = r.reals(&t, 3)?;
    let t = r.keyed("metric_dh")?;
    let dh = r.reals(&t, 9)?;
    let t = r.keyed("asymmetry")?;
    let asymmetry = r.reals(&t, 1)?[0];
    if r.keyed("pair_order")? != ["11", "22", "33", "12", "23", "13"] {
        return Err(r.error("unexpected pair order"));
    }
    if r.keyed("n2_order")? != ["j-major", "1", "2", "3"] {
        return Err(r.error("unexpected second-order case order"));
    }
    r.keyed("c_hat")?;
    let mut m = [[0.0; 6]; 6];
    for row in m.iter_mut() {
        row.copy_from_slice(&r.real_line(6)?);
    }
    r.keyed("mesh_begin")?;
    let mesh_lines = r.until("mesh_end")?;
    let mut mesh_text = mesh_lines.join("\n");
    mesh_text.push('\n');
    let mesh = parse_mesh(&mesh_text, path)?;
    let n1 = read_fields(&mut r, "n1", 6)?;
    let ne = {
        let t = r.keyed("d")?;
        r.count(&t)?
    };
    let mut d: Vec<Vec<Sym3>> = vec![Vec::with_capacity(ne); 6];
    for _ in 0..ne {
        let v = r.real_line(36)?;
        for (c, dc) in d.iter_mut().enumerate() {
            dc.push(std::array::from_fn(|k| v[6 * c + k]));
        }
    }
    let n2 = read_fields(&mut r, "n2", 18)?;
    let w = read_fields(&mut r, "w", 6)?;
    r.keyed("end")?;
    let hprod = h[0] * h[1] * h[2];
    let set = CellSolutionSet {
        alpha_i: [a[0], a[1], a[2]],
        metric: MetricSample {
            h: [h[0], h[1], h[2]],
            dh: [[dh[0], dh[1], dh[2]], [dh[3], dh[4], dh[5]], [dh[6], dh[7], dh[8]]],
            hprod,
        },
        n1,
        d,
        n2,
        w,
        c_hat: ElasticTensor::from_matrix(m),
        asymmetry,
        config_hash,
        mesh,
    };
    let nn = set.mesh.node_count();
    if set.n1.len() != 6 || set.n1.iter().chain(&set.n2).chain(&set.w).any(|f| f.len() != nn) {
        return Err(Error::Format { path: path.to_path_buf(), line: 0, msg: "field sizes do not match the mesh".into() });
    }
    Ok(set)
}

pub fn read_cell_archive(path: &Path) -> Result<CellSolutionSet> {
    let text = std::fs::read_to_string(path)?;
    parse_cell_archive(&text, path)
}
