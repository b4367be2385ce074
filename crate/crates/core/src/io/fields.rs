//! ASCII archive of a macroscale solution.
//!
//! ```text
//! shellhom-macro-archive 1
//! config_hash <hex | none>
//! energy <x>
//! work <x>
//! mesh_begin / <mesh file> / mesh_end
//! u0 <nodes>                3 per line
//! e0star <elements>         6 tensor components per line
//! grad_e0star <elements>    18 per line, ψ_1 block first
//! boundary_element <elements>  0 or 1 per line
//! e0star_nodal <nodes>      6 per line
//! grad_nodal <nodes>        18 per line
//! end
//! ```

use std::fmt::Write as _;
use std::path::Path;

use super::text::{push_reals, LineReader};
use crate::error::Result;
use crate::macroscale::MacroSolution;
use crate::mesh::io::{mesh_to_string, parse_mesh};
use crate::mesh::TetMesh;
use crate::tensor::Sym3;

pub const MACRO_ARCHIVE_VERSION: u32 = 1;
const MAGIC: &str = "shellhom-macro-archive";

#[derive(Debug, Clone, PartialEq)]
pub struct MacroArchive {
    pub config_hash: Option<String>,
    pub mesh: TetMesh,
    pub solution: MacroSolution,
}

fn push_block<const N: usize>(s: &mut String, key: &str, rows: &[[f64; N]]) {
    let _ = writeln!(s, "{key} {}", rows.len());
    for r in rows {
        push_reals(s, r);
    }
}

fn flat_grad(g: &[Sym3; 3]) -> [f64; 18] {
    std::array::from_fn(|k| g[k / 6][k % 6])
}

pub fn macro_archive_to_string(a: &MacroArchive) -> String {
    let sol = &a.solution;
    let mut s = String::new();
    let _ = writeln!(s, "{MAGIC} {MACRO_ARCHIVE_VERSION}");
    let _ = writeln!(s, "config_hash {}", a.config_hash.as_deref().unwrap_or("none"));
    s.push_str("energy ");
    push_reals(&mut s, &[sol.energy]);
    s.push_str("work ");
    push_reals(&mut s, &[sol.work]);
    s.push_str("mesh_begin\n");
    s.push_str(&mesh_to_string(&a.mesh));
    s.push_str("mesh_end\n");
    push_block(&mut s, "u0", &sol.u0);
    push_block(&mut s, "e0star", &sol.e0star);
    let g: Vec<[f64; 18]> = sol.grad_e0star.iter().map(flat_grad).collect();
    push_block(&mut s, "grad_e0star", &g);
    let _ = writeln!(s, "boundary_element {}", sol.boundary_element.len());
    for b in &sol.boundary_element {
        s.push_str(if *b { "1\n" } else { "0\n" });
    }
    push_block(&mut s, "e0star_nodal", &sol.e0star_nodal);
    let g: Vec<[f64; 18]> = sol.grad_nodal.iter().map(flat_grad).collect();
    push_block(&mut s, "grad_nodal", &g);
    s.push_str("end\n");
    s
}

pub fn write_macro_archive(path: &Path, a: &MacroArchive) -> Result<()> {
    std::fs::write(path, macro_archive_to_string(a))?;
    Ok(())
}

fn read_block<const N: usize>(r: &mut LineReader, key: &str, expected: usize) -> Result<Vec<[f64; N]>> {
    let t = r.keyed(key)?;
    let n = r.count(&t)?;
    if n != expected {
        return Err(r.error(format!("`{key}` has {n} rows, expected {expected}")));
    }
    (0..n).map(|_| r.real_line(N).map(|v| std::array::from_fn(|k| v[k]))).collect()
}

fn unflat_grad(v: [f64; 18]) -> [Sym3; 3] {
    std::array::from_fn(|j| std::array::from_fn(|c| v[6 * j + c]))
}

pub fn parse_macro_archive(text: &str, path: &Path) -> Result<MacroArchive> {
    let mut r = LineReader::new(text, path);
    let head = r.keyed(MAGIC)?;
    if head != [MACRO_ARCHIVE_VERSION.to_string().as_str()] {
        return Err(r.error(format!("unsupported archive version {head:?}")));
    }
    let config_hash = match r.keyed("config_hash")?.as_slice() {
        ["none"] => None,
        [h] => Some(h.to_string()),
        _ => return Err(r.error("bad config hash")),
    };
    let t = r.keyed("energy")?;
    let energy = r.reals(&t, 1)?[0];
    let t = r.keyed("work")?;
    let work = r.reals(&t, 1)?[0];
    r.keyed("mesh_begin")?;
    let mut mesh_text = r.until("mesh_end")?.join("\n");
    mesh_text.push('\n');
    let mesh = parse_mesh(&mesh_text, path)?;
    let (nn, ne) = (mesh.node_count(), mesh.element_count());
    let u0 = read_block::<3>(&mut r, "u0", nn)?;
    let e0star = read_block::<6>(&mut r, "e0star", ne)?;
    let grad_e0star = read_block::<18>(&mut r, "grad_e0star", ne)?.into_iter().map(unflat_grad).collect();
    let t = r.keyed("boundary_element")?;
    if r.count(&t)? != ne {
        return Err(r.error("boundary flags do not match the element count"));
    }
    let boundary_element = (0..ne)
        .map(|_| match r.next_line()?.trim() {
            "0" => Ok(false),
            "1" => Ok(true),
            other => Err(r.error(format!("bad boundary flag `{other}`"))),
        })
        .collect::<Result<Vec<bool>>>()?;
    let e0star_nodal = read_block::<6>(&mut r, "e0star_nodal", nn)?;
    let grad_nodal = read_block::<18>(&mut r, "grad_nodal", nn)?.into_iter().map(unflat_grad).collect();
    r.keyed("end")?;
    Ok(MacroArchive {
        config_hash,
        mesh,
        solution: MacroSolution { u0, e0star, grad_e0star, boundary_element, e0star_nodal, grad_nodal, energy, work },
    })
}

pub fn read_macro_archive(path: &Path) -> Result<MacroArchive> {
    let text = std::fs::read_to_string(path)?;
    parse_macro_archive(&text, path)
}
