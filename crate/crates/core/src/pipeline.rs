//! Stage drivers behind the command-line front end. Each stage reads the
//! archives of the previous one from the output directory.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use rayon::prelude::*;

use crate::cell::{read_cell_archive, write_cell_archive};
use crate::cell::{solve_cell, CellOptions, CellSolutionSet};
use crate::config::RunConfig;
use crate::error::{Error, Result};
use crate::io::text::push_reals;
use crate::io::{read_macro_archive, write_macro_archive, write_vtk, MacroArchive, VtkData};
use crate::macroscale::{select_representative_points, solve_homogenized, MacroSolution, RepresentativeSet};
use crate::mesh::{generate_macro_mesh, generate_unit_cell_mesh, read_mesh, write_mesh, TetMesh};
use crate::oracle::{convergence_study, convergence_verdict, ConvergenceFixture, ConvergenceRow, ConvergenceVerdict, MacroResolution};
use crate::strength::{critical_load_bisection, critical_load_direct, von_mises, StrengthMethod, StrengthReport};
use crate::tensor::Sym3;
use crate::twoscale::{reconstruct, reconstruct_strain, reconstruct_stress, Order, TwoScaleField};

pub const MACRO_MESH_FILE: &str = "macro.mesh";
pub const CELL_MESH_FILE: &str = "cell.mesh";
pub const MACRO_ARCHIVE_FILE: &str = "macro.archive";
pub const FIELDS_FILE: &str = "twoscale.fields";
pub const VTK_FILE: &str = "twoscale.vtk";
pub const STRENGTH_FILE: &str = "strength.csv";
pub const CONVERGENCE_FILE: &str = "convergence.csv";

#[derive(Debug, Clone, PartialEq)]
pub struct RunOptions {
    pub out: PathBuf,
    /// Escalate cell asymmetry warnings to errors.
    pub strict: bool,
    /// Accept archives whose config hash differs from the current config.
    pub force: bool,
}

impl RunOptions {
    pub fn new(out: impl Into<PathBuf>) -> Self {
        RunOptions { out: out.into(), strict: false, force: false }
    }

    fn path(&self, name: &str) -> PathBuf {
        self.out.join(name)
    }

    fn ensure_dir(&self) -> Result<()> {
        std::fs::create_dir_all(&self.out)?;
        Ok(())
    }
}

pub fn cell_archive_name(k: usize) -> String {
    format!("cell_{k:03}.archive")
}

fn check_hash(found: Option<&str>, cfg: &RunConfig, what: &Path, opts: &RunOptions) -> Result<()> {
    if found == Some(cfg.model_hash.as_str()) {
        return Ok(());
    }
    let msg = format!(
        "{} was written for config hash {}, current config has {}",
        what.display(),
        found.unwrap_or("none"),
        cfg.model_hash
    );
    if opts.force {
        log::warn!("{msg}; continuing because of --force");
        Ok(())
    } else {
        Err(Error::ArchiveMismatch(format!("{msg} (use --force to override)")))
    }
}

/// Macro mesh from the config: a file when given, otherwise generated.
pub fn macro_mesh(cfg: &RunConfig) -> Result<TetMesh> {
    match &cfg.macroscale.mesh_file {
        Some(p) => read_mesh(p),
        None => generate_macro_mesh(&cfg.domain, cfg.macroscale.divisions),
    }
}

pub fn representative_points(cfg: &RunConfig) -> Vec<[f64; 3]> {
    let (lo, hi) = cfg.domain.bounds();
    select_representative_points(&cfg.model, lo, hi, cfg.macroscale.representative_count)
}

pub fn cmd_mesh(cfg: &RunConfig, opts: &RunOptions) -> Result<()> {
    opts.ensure_dir()?;
    let m = macro_mesh(cfg)?;
    write_mesh(&opts.path(MACRO_MESH_FILE), &m)?;
    let c = generate_unit_cell_mesh(cfg.cell.n, &cfg.cell.phase)?;
    write_mesh(&opts.path(CELL_MESH_FILE), &c)?;
    log::info!("meshes: macro {} elements, cell {} elements", m.element_count(), c.element_count());
    Ok(())
}

/// Solves every representative cell; results are in lattice order.
pub fn solve_cells(cfg: &RunConfig, strict: bool) -> Result<Vec<CellSolutionSet>> {
    let mesh = generate_unit_cell_mesh(cfg.cell.n, &cfg.cell.phase)?;
    let opts = CellOptions { solver: cfg.cell.solver, strict, second_order: cfg.cell.second_order };
    representative_points(cfg)
        .par_iter()
        .map(|&p| {
            let mut set = solve_cell(&mesh, &cfg.cell.materials, &cfg.model, p, &opts)?;
            set.config_hash = Some(cfg.model_hash.clone());
            Ok(set)
        })
        .collect()
}

pub fn cmd_cell(cfg: &RunConfig, opts: &RunOptions) -> Result<Vec<PathBuf>> {
    opts.ensure_dir()?;
    let cells = solve_cells(cfg, opts.strict)?;
    let mut paths = Vec::with_capacity(cells.len());
    for (k, c) in cells.iter().enumerate() {
        let p = opts.path(&cell_archive_name(k));
        write_cell_archive(&p, c)?;
        paths.push(p);
    }
    Ok(paths)
}

pub fn load_cells(cfg: &RunConfig, opts: &RunOptions) -> Result<RepresentativeSet> {
    let count = representative_points(cfg).len();
    let mut cells = Vec::with_capacity(count);
    for k in 0..count {
        let p = opts.path(&cell_archive_name(k));
        if !p.exists() {
            return Err(Error::ArchiveMismatch(format!("missing {}; run the `cell` stage first", p.display())));
        }
        let c = read_cell_archive(&p)?;
        check_hash(c.config_hash.as_deref(), cfg, &p, opts)?;
        cells.push(c);
    }
    RepresentativeSet::new(cells)
}

pub fn cmd_macro(cfg: &RunConfig, opts: &RunOptions) -> Result<MacroArchive> {
    opts.ensure_dir()?;
    let reps = load_cells(cfg, opts)?;
    let mesh = macro_mesh(cfg)?;
    let solution = solve_homogenized(&mesh, &reps, &cfg.model, &cfg.macroscale.loads, &cfg.macroscale.solver)?;
    let archive = MacroArchive { config_hash: Some(cfg.model_hash.clone()), mesh, solution };
    write_macro_archive(&opts.path(MACRO_ARCHIVE_FILE), &archive)?;
    log::info!("macro: energy {:e}, load work {:e}", archive.solution.energy, archive.solution.work);
    Ok(archive)
}

fn load_macro(cfg: &RunConfig, opts: &RunOptions) -> Result<MacroArchive> {
    let p = opts.path(MACRO_ARCHIVE_FILE);
    if !p.exists() {
        return Err(Error::ArchiveMismatch(format!("missing {}; run the `macro` stage first", p.display())));
    }
    let a = read_macro_archive(&p)?;
    check_hash(a.config_hash.as_deref(), cfg, &p, opts)?;
    let expected = macro_mesh(cfg)?;
    if expected.nodes != a.mesh.nodes || expected.tets != a.mesh.tets {
        let msg = format!("{} holds a different macro mesh than the config describes", p.display());
        if !opts.force {
            return Err(Error::ArchiveMismatch(msg));
        }
        log::warn!("{msg}; continuing because of --force");
    }
    Ok(a)
}

/// Evaluation mesh: explicit divisions, or the macro divisions uniformly
/// refined until every axis has the configured elements per period.
pub fn evaluation_mesh(cfg: &RunConfig) -> Result<TetMesh> {
    let r = cfg.reconstruct.as_ref().ok_or_else(|| Error::Config("missing [reconstruct] section".into()))?;
    let divisions = match r.divisions {
        Some(d) => d,
        None => {
            let (lo, hi) = cfg.domain.bounds();
            let base = cfg.macroscale.divisions;
            std::array::from_fn(|a| {
                let want = ((hi[a] - lo[a]) / r.epsilon * r.elements_per_period as f64 - 1e-9).ceil().max(1.0) as usize;
                let refine = want.div_ceil(base[a]).max(1);
                base[a] * refine
            })
        }
    };
    let cells: usize = divisions.iter().product();
    if cells > 5_000_000 {
        return Err(Error::Config(format!(
            "evaluation mesh {divisions:?} is too large; set eval_divisions in [reconstruct]"
        )));
    }
    generate_macro_mesh(&cfg.domain, divisions)
}

/// Reconstructed fields with derived strain, stress and equivalent stress
/// for the configured order.
#[derive(Debug, Clone)]
pub struct ReconstructOutput {
    pub eval: TetMesh,
    pub field: TwoScaleField,
    pub order: Order,
    pub strain: Vec<Sym3>,
    pub stress: Vec<Sym3>,
    pub von_mises: Vec<f64>,
}

pub fn reconstruct_fields(
    cfg: &RunConfig,
    macro_mesh: &TetMesh,
    sol: &MacroSolution,
    reps: &RepresentativeSet,
    eval: TetMesh,
    order: Order,
) -> Result<ReconstructOutput> {
    let r = cfg.reconstruct.as_ref().ok_or_else(|| Error::Config("missing [reconstruct] section".into()))?;
    let field = reconstruct(&eval, macro_mesh, sol, reps, r.epsilon)?;
    let strain = reconstruct_strain(&eval, field.displacement(order), &cfg.model)?;
    let stress = reconstruct_stress(&strain, &field.phase, &cfg.cell.materials)?;
    let von_mises = stress.iter().map(von_mises).collect();
    Ok(ReconstructOutput { eval, field, order, strain, stress, von_mises })
}

fn fields_to_string(out: &ReconstructOutput, cfg: &RunConfig) -> String {
    let mut s = String::new();
    let f = &out.field;
    let _ = writeln!(s, "shellhom-twoscale-fields 1\nconfig_hash {}", cfg.model_hash);
    s.push_str("epsilon ");
    push_reals(&mut s, &[f.epsilon]);
    let _ = writeln!(s, "order {}", out.order.as_int());
    s.push_str("mesh_begin\n");
    s.push_str(&crate::mesh::io::mesh_to_string(&out.eval));
    s.push_str("mesh_end\n");
    let _ = writeln!(s, "displacement {}  u0(3) u1(3) u2(3)", out.eval.node_count());
    for k in 0..out.eval.node_count() {
        let row: Vec<f64> = f.u0[k].iter().chain(&f.u1[k]).chain(&f.u2[k]).copied().collect();
        push_reals(&mut s, &row);
    }
    let _ = writeln!(s, "element {}  phase strain(6) stress(6) von_mises", out.eval.element_count());
    for e in 0..out.eval.element_count() {
        let _ = write!(s, "{} ", f.phase[e]);
        let row: Vec<f64> = out.strain[e].iter().chain(&out.stress[e]).copied().chain([out.von_mises[e]]).collect();
        push_reals(&mut s, &row);
    }
    s.push_str("end\n");
    s
}

pub fn cmd_reconstruct(cfg: &RunConfig, opts: &RunOptions) -> Result<ReconstructOutput> {
    opts.ensure_dir()?;
    let r = cfg.reconstruct.as_ref().ok_or_else(|| Error::Config("missing [reconstruct] section".into()))?;
    let reps = load_cells(cfg, opts)?;
    let a = load_macro(cfg, opts)?;
    let out = reconstruct_fields(cfg, &a.mesh, &a.solution, &reps, evaluation_mesh(cfg)?, r.order)?;
    std::fs::write(opts.path(FIELDS_FILE), fields_to_string(&out, cfg))?;
    if cfg.output.vtk {
        let f = &out.field;
        write_vtk(
            &opts.path(VTK_FILE),
            &out.eval,
            "two-scale reconstruction",
            &[VtkData::Vectors("u0", &f.u0), VtkData::Vectors("u1", &f.u1), VtkData::Vectors("u2", &f.u2)],
            &[
                VtkData::Ints("phase", &f.phase),
                VtkData::Tensors("strain", &out.strain),
                VtkData::Tensors("stress", &out.stress),
                VtkData::Scalars("von_mises", &out.von_mises),
            ],
        )?;
    }
    Ok(out)
}

pub fn cmd_strength(cfg: &RunConfig, opts: &RunOptions) -> Result<StrengthReport> {
    opts.ensure_dir()?;
    let reps = load_cells(cfg, opts)?;
    let a = load_macro(cfg, opts)?;
    let report = strength_report(cfg, &a.mesh, &a.solution, &reps, evaluation_mesh(cfg)?)?;
    let mut csv = String::from(StrengthReport::csv_header());
    csv.push('\n');
    csv.push_str(&report.csv_row());
    csv.push('\n');
    std::fs::write(opts.path(STRENGTH_FILE), csv)?;
    Ok(report)
}

/// Human-readable summary of a strength report.
pub fn strength_summary(report: &StrengthReport) -> String {
    let mut s = format!(
        "critical load multiplier {:.6e} ({} evaluations): element {} (phase {}), von Mises {:.6e} Pa\n",
        report.critical_load_multiplier,
        report.evaluations,
        report.critical_element,
        report.critical_phase,
        report.sigma_e_at_critical
    );
    for (p, m) in &report.per_phase_margin {
        let _ = writeln!(s, "  phase {p}: margin S_e/σ_e = {m:.6e}");
    }
    s
}

/// Stresses of the configured order on `eval` for the unit reference load,
/// then the critical multiplier by the configured method.
pub fn strength_report(
    cfg: &RunConfig,
    macro_mesh: &TetMesh,
    sol: &MacroSolution,
    reps: &RepresentativeSet,
    eval: TetMesh,
) -> Result<StrengthReport> {
    let sc = cfg.strength.as_ref().ok_or_else(|| Error::Config("missing [strength] section".into()))?;
    let out = reconstruct_fields(cfg, macro_mesh, sol, reps, eval.clone(), sc.stress_order)?;
    let (stress, phase) = (out.stress, out.field.phase);
    match sc.method {
        StrengthMethod::Direct => critical_load_direct(&stress, &phase, &cfg.cell.materials),
        StrengthMethod::Bisection { init, tol } => {
            let stress_at = |s: f64| -> Result<Vec<Sym3>> {
                let loads = cfg.macroscale.loads.scaled(s);
                let scaled = solve_homogenized(macro_mesh, reps, &cfg.model, &loads, &cfg.macroscale.solver)?;
                Ok(reconstruct_fields(cfg, macro_mesh, &scaled, reps, eval.clone(), sc.stress_order)?.stress)
            };
            critical_load_bisection(stress_at, &phase, &cfg.cell.materials, init, tol)
        }
    }
}

/// Convergence study of the configured problem against fine-scale solves.
pub fn cmd_validate(cfg: &RunConfig, opts: &RunOptions) -> Result<(Vec<ConvergenceRow>, ConvergenceVerdict)> {
    opts.ensure_dir()?;
    let v = cfg.validate.as_ref().ok_or_else(|| Error::Config("missing [validate] section".into()))?;
    let fixture = ConvergenceFixture {
        domain: cfg.domain,
        model: cfg.model.clone(),
        phase: cfg.cell.phase.clone(),
        materials: cfg.cell.materials.clone(),
        loads: cfg.macroscale.loads.clone(),
        per_period: v.elements_per_period,
        cell_n: v.cell_n,
        macro_resolution: MacroResolution::SameAsFine,
        representative_count: cfg.macroscale.representative_count,
        solver: cfg.macroscale.solver,
    };
    let rows = convergence_study(&fixture, &v.epsilons)?;
    let verdict = convergence_verdict(&rows, v.min_rate, v.slack);
    let mut csv = String::from(ConvergenceRow::csv_header());
    csv.push('\n');
    for r in &rows {
        csv.push_str(&r.csv_row());
        csv.push('\n');
    }
    std::fs::write(opts.path(CONVERGENCE_FILE), &csv)?;
    Ok((rows, verdict))
}

/// Convergence table as CSV followed by the verdict line.
pub fn validate_summary(rows: &[ConvergenceRow], verdict: &ConvergenceVerdict, min_rate: f64) -> String {
    let mut s = String::from(ConvergenceRow::csv_header());
    s.push('\n');
    for r in rows {
        s.push_str(&r.csv_row());
        s.push('\n');
    }
    let _ = writeln!(
        s,
        "verdict: {} (minimum H1 rate of u2 {}, required {min_rate}; error ordering {})",
        if verdict.passed() { "PASS" } else { "FAIL" },
        verdict.min_rate.map_or("n/a".to_string(), |r| format!("{r:.3}")),
        if verdict.ordering_ok { "ok" } else { "violated" }
    );
    s
}

/// Mesh, cell, macro, then reconstruct and strength when configured.
/// Returns the strength report when the strength stage ran.
pub fn cmd_pipeline(cfg: &RunConfig, opts: &RunOptions) -> Result<Option<StrengthReport>> {
    cmd_mesh(cfg, opts)?;
    cmd_cell(cfg, opts)?;
    cmd_macro(cfg, opts)?;
    if cfg.reconstruct.is_some() {
        cmd_reconstruct(cfg, opts)?;
    }
    if cfg.strength.is_some() {
        return cmd_strength(cfg, opts).map(Some);
    }
    Ok(None)
}
