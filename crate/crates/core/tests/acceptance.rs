//! Acceptance suite. Runs every criterion in order and prints one verdict
//! line per criterion; exits non-zero when any criterion fails.

use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::{Path, PathBuf};
use std::process::Command;
use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use shellhom::cell::{solve_cell, CellOptions, CellSolutionSet};
use shellhom::config::RunConfig;
use shellhom::fem::{
    assemble_constrained, assemble_stiffness, solve_sparse, Constraints, DofMap, SolverOptions, StrainMode,
};
use shellhom::macroscale::{
    select_representative_points, solve_elastic, solve_homogenized, BodyForce, BoundaryCondition, LoadCase,
    RepresentativeSet,
};
use shellhom::mesh::{generate_macro_mesh, generate_unit_cell_mesh, Face, MacroDomain, PhaseGeometry, TetMesh};
use shellhom::metric::{DoublyCurvedVariant, LameModel};
use shellhom::oracle::{convergence_study, convergence_verdict, ConvergenceFixture, LaminateOracle};
use shellhom::pipeline::{cmd_pipeline, evaluation_mesh, macro_mesh, reconstruct_fields, solve_cells, RunOptions};
use shellhom::strength::{critical_load_bisection, critical_load_direct, von_mises};
use shellhom::tensor::{isotropic_tensor, voigt_reuss, ElasticTensor, MaterialTable, Sym3};
use shellhom::twoscale::{reconstruct, Order};

type Outcome = Result<String, String>;

fn configs() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("examples/configs")
}

fn max_abs(f: &[[f64; 3]]) -> f64 {
    f.iter().flatten().fold(0.0, |m, v| m.max(v.abs()))
}

fn max_diff(a: &[[f64; 3]], b: &[[f64; 3]]) -> f64 {
    a.iter().zip(b).flat_map(|(x, y)| (0..3).map(move |c| (x[c] - y[c]).abs())).fold(0.0, f64::max)
}

fn check(ok: bool, detail: String) -> Outcome {
    if ok {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn within(limit: Duration, start: Instant) -> (bool, String) {
    let t = start.elapsed();
    (t <= limit, format!("{:.1} s of {} s", t.as_secs_f64(), limit.as_secs()))
}

fn two_phase(contrast: f64) -> MaterialTable {
    MaterialTable::new()
        .with(1, isotropic_tensor(contrast, 0.3).unwrap(), None)
        .with(2, isotropic_tensor(1.0, 0.3).unwrap(), None)
}

fn homogeneous_identity() -> Outcome {
    let start = Instant::now();
    let mesh = generate_unit_cell_mesh(6, &PhaseGeometry::Uniform(1)).unwrap();
    let c = isotropic_tensor(70e9, 0.33).unwrap();
    let mats = MaterialTable::new().with(1, c, None);
    let quadratic = |a: [f64; 3]| {
        let h = [1.0 + 0.2 * a[2] * a[2], 2.0 + a[0], 1.0];
        let dh = [[0.0, 0.0, 0.4 * a[2]], [1.0, 0.0, 0.0], [0.0; 3]];
        (h, dh)
    };
    let models = [
        LameModel::Plate,
        LameModel::Cylindrical { r2: 3.0 },
        LameModel::DoublyCurved { r1: 2.0, r2: 3.0, variant: DoublyCurvedVariant::AsPrinted },
        LameModel::DoublyCurved { r1: 2.0, r2: 3.0, variant: DoublyCurvedVariant::Alpha3 },
        LameModel::Custom(std::sync::Arc::new(quadratic)),
    ];
    let (mut c_err, mut f_err) = (0.0f64, 0.0f64);
    for model in &models {
        let set = solve_cell(&mesh, &mats, model, [0.3, 0.2, 0.1], &CellOptions::default()).map_err(|e| e.to_string())?;
        c_err = c_err.max(set.c_hat.relative_difference(&c));
        for f in set.n1.iter().chain(&set.n2).chain(&set.w) {
            f_err = f_err.max(max_abs(f));
        }
        f_err = set.d.iter().flatten().flatten().fold(f_err, |m, v| m.max(v.abs()));
    }
    let (fast, time) = within(Duration::from_secs(10), start);
    check(
        c_err <= 1e-7 && f_err <= 1e-8 && fast,
        format!("{} models, max Ĉ error {c_err:.2e}, max cell field {f_err:.2e}, {time}", models.len()),
    )
}

fn laminate_oracle() -> Outcome {
    let start = Instant::now();
    let mats = two_phase(10.0);
    let axis = 2;
    let exact = LaminateOracle::new(&[(0.5, *mats.tensor(1).unwrap()), (0.5, *mats.tensor(2).unwrap())], axis, 1.0)
        .unwrap()
        .c_hat();
    let opts = CellOptions { second_order: false, ..CellOptions::default() };
    let errors = |n: usize| -> Vec<f64> {
        let mesh =
            generate_unit_cell_mesh(n, &PhaseGeometry::Laminate { axis, layers: vec![(0.5, 1), (0.5, 2)] }).unwrap();
        let set = solve_cell(&mesh, &mats, &LameModel::Plate, [0.0; 3], &opts).unwrap();
        // independent components of a transversely isotropic tensor
        [(0, 0), (2, 2), (0, 1), (0, 2), (3, 3), (4, 4)]
            .iter()
            .map(|&(a, b)| (set.c_hat.get(a, b) - exact.get(a, b)).abs() / exact.get(a, b).abs())
            .collect()
    };
    let e16 = errors(16);
    let e32 = errors(32);
    // P1 reproduces the piecewise-linear exact correctors when the layer
    // interfaces are mesh planes, so both errors can sit at round-off
    const ROUND_OFF: f64 = 1e-10;
    let worst16 = e16.iter().cloned().fold(0.0, f64::max);
    let worst32 = e32.iter().cloned().fold(0.0, f64::max);
    let refined = e16.iter().zip(&e32).all(|(a, b)| b < a || (*a <= ROUND_OFF && *b <= ROUND_OFF));
    let (fast, time) = within(Duration::from_secs(120), start);
    check(
        worst16 <= 0.02 && refined && fast,
        format!("max component error n=16 {worst16:.2e}, n=32 {worst32:.2e}, refinement ok {refined}, {time}"),
    )
}

fn bound_fixtures() -> Vec<(&'static str, PhaseGeometry, MaterialTable)> {
    let strength = MaterialTable::new()
        .with(1, isotropic_tensor(410e9, 0.18).unwrap(), None)
        .with(2, isotropic_tensor(240e9, 0.20).unwrap(), None);
    let plate = MaterialTable::new()
        .with(1, isotropic_tensor(11700e9, 0.321).unwrap(), None)
        .with(2, isotropic_tensor(6.62e9, 0.333).unwrap(), None);
    let conv = MaterialTable::new()
        .with(1, isotropic_tensor(10.0, 0.45).unwrap(), None)
        .with(2, isotropic_tensor(1.0, 0.0).unwrap(), None);
    let cube = PhaseGeometry::BoxInclusion { center: [0.5; 3], half_widths: [0.25; 3], phase: 2, matrix: 1 };
    vec![
        ("laminate", PhaseGeometry::Laminate { axis: 2, layers: vec![(0.5, 1), (0.5, 2)] }, two_phase(10.0)),
        ("stack", PhaseGeometry::Laminate { axis: 2, layers: vec![(0.25, 2), (0.5, 1), (0.25, 2)] }, conv),
        ("cube-plate", cube.clone(), plate),
        ("cube-strength", cube, strength),
        (
            "sphere",
            PhaseGeometry::SphereInclusion { center: [0.5; 3], radius: 0.3, phase: 2, matrix: 1 },
            two_phase(20.0),
        ),
    ]
}

fn bounds() -> Outcome {
    let mut margin = f64::INFINITY;
    let mut failed = Vec::new();
    for (name, phase, mats) in bound_fixtures() {
        let mesh = generate_unit_cell_mesh(8, &phase).unwrap();
        let opts = CellOptions { second_order: false, ..CellOptions::default() };
        let set = solve_cell(&mesh, &mats, &LameModel::Plate, [0.0; 3], &opts).map_err(|e| e.to_string())?;
        let parts: Vec<(f64, ElasticTensor)> =
            mesh.phase_fractions().into_iter().map(|(p, f)| (f, *mats.tensor(p).unwrap())).collect();
        let (voigt, reuss) = voigt_reuss(&parts).unwrap();
        let (lv, lc, lr) = (voigt.eigenvalues(), set.c_hat.eigenvalues(), reuss.eigenvalues());
        let slack = 1e-9 * lv.iter().cloned().fold(0.0, f64::max);
        let ok = (0..6).all(|k| lc[k] >= lr[k] - slack && lc[k] <= lv[k] + slack);
        let scale = lv.iter().cloned().fold(0.0, f64::max);
        for k in 0..6 {
            margin = margin.min((lc[k] - lr[k]).min(lv[k] - lc[k]) / scale);
        }
        if !ok {
            failed.push(name);
        }
    }
    check(
        failed.is_empty(),
        format!("{} fixture cells, smallest relative margin {margin:.2e}, failing {failed:?}", bound_fixtures().len()),
    )
}

fn perturbed_box(divisions: [usize; 3], seed: u64) -> TetMesh {
    let mut mesh = generate_macro_mesh(&MacroDomain::Box { lo: [0.0; 3], hi: [1.0, 0.8, 0.6] }, divisions).unwrap();
    let boundary = mesh.boundary_node_mask();
    let h = [1.0 / divisions[0] as f64, 0.8 / divisions[1] as f64, 0.6 / divisions[2] as f64];
    let mut rng = rand::rngs::StdRng::seed_from_u64(seed);
    for (n, p) in mesh.nodes.iter_mut().enumerate() {
        if !boundary[n] {
            for c in 0..3 {
                p[c] += rng.gen_range(-0.2..0.2) * h[c];
            }
        }
    }
    mesh.grid = None;
    mesh.validate().unwrap();
    mesh
}

fn patch_and_consistency() -> Outcome {
    let tight = SolverOptions { tol: 1e-13, ..SolverOptions::default() };
    // linear field reproduced on a distorted anisotropic patch
    let mesh = perturbed_box([4, 4, 3], 7);
    let mut c = *isotropic_tensor(5.0, 0.28).unwrap().matrix();
    c[0][0] += 2.0;
    c[0][3] += 0.4;
    c[3][0] += 0.4;
    let tensor = ElasticTensor::from_matrix(c);
    tensor.ensure_positive_definite("patch tensor").unwrap();
    let tensors = vec![tensor; mesh.element_count()];
    let a = [[0.01, -0.02, 0.005], [0.003, 0.02, -0.01], [-0.004, 0.006, 0.015]];
    let exact = |p: [f64; 3]| -> [f64; 3] { std::array::from_fn(|i| 0.1 * i as f64 + (0..3).map(|j| a[i][j] * p[j]).sum::<f64>()) };
    let boundary = mesh.boundary_node_mask();
    let mut cons = Constraints::default();
    for (n, p) in mesh.nodes.iter().enumerate() {
        if boundary[n] {
            let v = exact(*p);
            for comp in 0..3 {
                cons.dirichlet.push((n, comp, v[comp]));
            }
        }
    }
    let map = DofMap::new(mesh.node_count(), &cons).unwrap();
    let sys = assemble_constrained(&mesh, &tensors, &LameModel::Plate, StrainMode::Macro, &map).unwrap();
    let (x, _) = solve_sparse(&sys.k, &sys.lift, &tight).unwrap();
    let u = map.expand(&x);
    let reference: Vec<[f64; 3]> = mesh.nodes.iter().map(|p| exact(*p)).collect();
    let patch = max_diff(&u, &reference) / max_abs(&reference);

    // six rigid motions in the kernel of the free stiffness
    let k = assemble_stiffness(&mesh, &tensors, &LameModel::Plate, StrainMode::Macro).unwrap();
    let mut kernel = 0.0f64;
    for m in 0..6 {
        let r: Vec<f64> = mesh
            .nodes
            .iter()
            .flat_map(|p| {
                let v: [f64; 3] = match m {
                    0..=2 => std::array::from_fn(|c| if c == m { 1.0 } else { 0.0 }),
                    3 => [-p[1], p[0], 0.0],
                    4 => [0.0, -p[2], p[1]],
                    _ => [p[2], 0.0, -p[0]],
                };
                v
            })
            .collect();
        let kr = k.matvec(&r);
        kernel = kernel.max(kr.iter().fold(0.0, |acc: f64, v| acc.max(v.abs())) / k.max_abs());
    }

    // work-energy identity on a heterogeneous curved solve
    let domain = MacroDomain::ShellSector { alpha1: (0.0, 1.0), alpha2: (0.0, 0.4), alpha3: (-0.1, 0.1) };
    let shell = generate_macro_mesh(&domain, [6, 4, 2]).unwrap();
    let mats = two_phase(5.0);
    let shell_tensors: Vec<ElasticTensor> =
        (0..shell.element_count()).map(|e| *mats.tensor(1 + (e % 2) as u32).unwrap()).collect();
    let loads = LoadCase {
        body_force: BodyForce::Uniform([0.1, 0.0, -1.0]),
        boundary: vec![
            BoundaryCondition::Dirichlet { face: Face::XMin, values: [Some(0.0); 3] },
            BoundaryCondition::Traction { face: Face::ZMax, traction: [0.0, 0.2, -0.5], patch: None },
        ],
    };
    let model = LameModel::Cylindrical { r2: 1.5 };
    let sol = solve_elastic(&shell, &shell_tensors, &model, &loads, &SolverOptions::default()).unwrap();
    let identity = (sol.energy - sol.work).abs() / sol.work.abs();
    check(
        patch <= 1e-9 && kernel <= 1e-12 && identity <= 1e-9,
        format!("patch error {patch:.2e}, rigid kernel {kernel:.2e}, work-energy gap {identity:.2e}"),
    )
}

fn convergence_and_oscillation() -> (Outcome, Outcome) {
    let start = Instant::now();
    let fixture = ConvergenceFixture::laminated_plate();
    let rows = match convergence_study(&fixture, &[0.25, 0.125, 0.0625]) {
        Ok(r) => r,
        Err(e) => return (Err(e.to_string()), Err(e.to_string())),
    };
    let v = convergence_verdict(&rows, 0.5, 0.05);
    let (fast, time) = within(Duration::from_secs(900), start);
    let rates: Vec<String> = rows.iter().skip(1).map(|r| format!("{:.3}", r.h1_rate.map_or(f64::NAN, |h| h[2]))).collect();
    let c5 = check(
        v.passed() && fast,
        format!("H1 rates of u2 [{}], ordering ok {}, {time}", rates.join(", "), v.ordering_ok),
    );
    let r = &rows[1];
    let ratio = r.l2[2] / r.l2[1];
    let c6 = check(ratio <= 0.6, format!("ε = 1/8: L2(u2) / L2(u1) = {ratio:.3} (limit 0.6)"));
    (c5, c6)
}

struct FlatCase {
    c_hat: Vec<ElasticTensor>,
    u0: Vec<[f64; 3]>,
    u2: Vec<[f64; 3]>,
}

fn flat_case(model: &LameModel, domain: &MacroDomain) -> shellhom::Result<FlatCase> {
    let mats = two_phase(10.0);
    let phase = PhaseGeometry::Laminate { axis: 2, layers: vec![(0.5, 1), (0.5, 2)] };
    let cell_mesh = generate_unit_cell_mesh(8, &phase)?;
    let (lo, hi) = domain.bounds();
    let cells = select_representative_points(model, lo, hi, 3)
        .into_iter()
        .map(|p| solve_cell(&cell_mesh, &mats, model, p, &CellOptions::default()))
        .collect::<shellhom::Result<Vec<CellSolutionSet>>>()?;
    let c_hat = cells.iter().map(|c| c.c_hat).collect();
    let reps = RepresentativeSet::new(cells)?;
    let mesh = generate_macro_mesh(domain, [8, 4, 2])?;
    let loads = LoadCase {
        body_force: BodyForce::Uniform([0.2, 0.0, -1.0]),
        boundary: vec![
            BoundaryCondition::Dirichlet { face: Face::XMin, values: [Some(0.0); 3] },
            BoundaryCondition::Dirichlet { face: Face::XMax, values: [Some(0.0); 3] },
        ],
    };
    let tight = SolverOptions { tol: 1e-12, ..SolverOptions::default() };
    let sol = solve_homogenized(&mesh, &reps, model, &loads, &tight)?;
    let eval = generate_macro_mesh(domain, [32, 16, 8])?;
    let field = reconstruct(&eval, &mesh, &sol, &reps, 0.125)?;
    Ok(FlatCase { c_hat, u0: sol.u0, u2: field.u2 })
}

fn cylinder_flat_limit() -> Outcome {
    let (l1, l2, t) = (1.0, 0.5, 0.125);
    let r2 = 1e6 * l1;
    let plate = flat_case(&LameModel::Plate, &MacroDomain::Box { lo: [0.0, 0.0, -t], hi: [l1, l2, t] })
        .map_err(|e| e.to_string())?;
    let cyl = flat_case(
        &LameModel::Cylindrical { r2 },
        &MacroDomain::ShellSector { alpha1: (0.0, l1), alpha2: (0.0, l2 / r2), alpha3: (-t, t) },
    )
    .map_err(|e| e.to_string())?;
    let c_err = cyl.c_hat.iter().map(|c| c.relative_difference(&plate.c_hat[0])).fold(0.0, f64::max);
    let u0_err = max_diff(&cyl.u0, &plate.u0) / max_abs(&plate.u0);
    let u2_err = max_diff(&cyl.u2, &plate.u2) / max_abs(&plate.u2);
    check(
        c_err <= 1e-4 && u0_err <= 1e-4 && u2_err <= 1e-4,
        format!("R2 = {r2:e}: Ĉ {c_err:.2e}, u0 {u0_err:.2e}, u2 {u2_err:.2e}"),
    )
}

fn strength_consistency() -> Outcome {
    // yield function reference states
    let vm_err = [
        von_mises(&[2.0, 2.0, 2.0, 0.0, 0.0, 0.0]),
        (von_mises(&[-3.5, 0.0, 0.0, 0.0, 0.0, 0.0]) - 3.5).abs(),
        (von_mises(&[0.0, 0.0, 0.0, 0.0, 1.25, 0.0]) - 3f64.sqrt() * 1.25).abs(),
    ]
    .into_iter()
    .fold(0.0, f64::max);
    let s: Sym3 = [1.2, -0.4, 0.3, 0.25, -0.1, 0.6];
    let mut equivariance = 0.0f64;
    for k in [1e-6, 0.37, -2.0, 3e5] {
        let scaled = s.map(|v| v * k);
        equivariance = equivariance.max((von_mises(&scaled) - k.abs() * von_mises(&s)).abs() / (k.abs() * von_mises(&s)));
    }
    let mats = MaterialTable::new().with(1, isotropic_tensor(1.0, 0.3).unwrap(), Some(2.0));
    let base = critical_load_direct(&[s], &[1], &mats).unwrap().critical_load_multiplier;
    let scaled = critical_load_direct(&[s.map(|v| 4.0 * v)], &[1], &mats).unwrap().critical_load_multiplier;
    equivariance = equivariance.max((4.0 * scaled - base).abs() / base);

    let mut gap = 0.0f64;
    for name in ["plate_strength.ini", "shell_strength.ini"] {
        let cfg = RunConfig::from_file(&configs().join(name)).map_err(|e| e.to_string())?;
        let order = cfg.strength.as_ref().unwrap().stress_order;
        let run = || -> shellhom::Result<f64> {
            let reps = RepresentativeSet::new(solve_cells(&cfg, false)?)?;
            let mesh = macro_mesh(&cfg)?;
            let eval = evaluation_mesh(&cfg)?;
            let solve = |s: f64| -> shellhom::Result<Vec<Sym3>> {
                let sol = solve_homogenized(&mesh, &reps, &cfg.model, &cfg.macroscale.loads.scaled(s), &cfg.macroscale.solver)?;
                Ok(reconstruct_fields(&cfg, &mesh, &sol, &reps, eval.clone(), order)?.stress)
            };
            let reference = solve(1.0)?;
            let phase = shellhom::twoscale::element_phases(&eval, &reps, cfg.reconstruct.as_ref().unwrap().epsilon)?;
            let direct = critical_load_direct(&reference, &phase, &cfg.cell.materials)?.critical_load_multiplier;
            let bisect = critical_load_bisection(solve, &phase, &cfg.cell.materials, 1.0, 1e-8)?.critical_load_multiplier;
            Ok((direct - bisect).abs() / direct)
        };
        gap = gap.max(run().map_err(|e| format!("{name}: {e}"))?);
    }
    check(
        gap <= 1e-5 && vm_err <= 1e-12 && equivariance <= 1e-10,
        format!("direct/bisection gap {gap:.2e}, von Mises reference error {vm_err:.2e}, scale equivariance {equivariance:.2e}"),
    )
}

fn run_pipeline_bin(config: &Path, out: &Path) -> Result<(), String> {
    let status = Command::new(env!("CARGO_BIN_EXE_shellhom"))
        .args(["pipeline", "--threads", "4", "--config"])
        .arg(config)
        .arg("--out")
        .arg(out)
        .env("RUST_LOG", "error")
        .stdout(std::process::Stdio::null())
        .status()
        .map_err(|e| e.to_string())?;
    if status.success() {
        Ok(())
    } else {
        Err(format!("pipeline exited with {status}"))
    }
}

fn determinism() -> Outcome {
    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    let config = configs().join("shell_strength.ini");
    let (a, b) = (dir.path().join("a"), dir.path().join("b"));
    run_pipeline_bin(&config, &a)?;
    run_pipeline_bin(&config, &b)?;
    let mut names: Vec<String> = std::fs::read_dir(&a)
        .map_err(|e| e.to_string())?
        .map(|e| e.unwrap().file_name().to_string_lossy().into_owned())
        .collect();
    names.sort();
    let differing: Vec<&String> = names
        .iter()
        .filter(|n| std::fs::read(a.join(n)).ok() != std::fs::read(b.join(n)).ok())
        .collect();
    check(differing.is_empty(), format!("{} output files compared, differing {differing:?}", names.len()))
}

fn fixtures_execute() -> Outcome {
    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    let mut notes = Vec::new();
    let mut ok = true;
    for name in ["plate.ini", "plate_strength.ini", "shell_strength.ini"] {
        let cfg = RunConfig::from_file(&configs().join(name)).map_err(|e| e.to_string())?;
        let opts = RunOptions::new(dir.path().join(name));
        cmd_pipeline(&cfg, &opts).map_err(|e| format!("{name}: {e}"))?;
        let reps = shellhom::pipeline::load_cells(&cfg, &opts).map_err(|e| e.to_string())?;
        let archive = shellhom::io::read_macro_archive(&opts.out.join(shellhom::pipeline::MACRO_ARCHIVE_FILE))
            .map_err(|e| e.to_string())?;
        let eval = evaluation_mesh(&cfg).map_err(|e| e.to_string())?;
        let rec = reconstruct_fields(&cfg, &archive.mesh, &archive.solution, &reps, eval, Order::Second)
            .map_err(|e| e.to_string())?;
        let (lo, hi) = cfg.domain.bounds();
        let centre: [f64; 3] = std::array::from_fn(|a| 0.5 * (lo[a] + hi[a]));
        let dist = |k: usize| (0..3).map(|c| ((rec.eval.nodes[k][c] - centre[c]) / (hi[c] - lo[c])).powi(2)).sum::<f64>();
        let k = (0..rec.eval.node_count()).min_by(|&a, &b| dist(a).total_cmp(&dist(b))).unwrap();
        let u3 = rec.field.u2[k][2];
        let finite = rec.field.u2.iter().flatten().all(|v| v.is_finite());
        ok &= finite && u3 < 0.0;
        let mut note = format!("{name}: centre u3 {u3:.3e}");
        if cfg.strength.is_some() {
            let csv = std::fs::read_to_string(opts.out.join(shellhom::pipeline::STRENGTH_FILE)).map_err(|e| e.to_string())?;
            let lambda: f64 = csv.lines().nth(1).and_then(|l| l.split(',').nth(1)).and_then(|v| v.parse().ok()).unwrap_or(f64::NAN);
            ok &= lambda.is_finite() && lambda > 0.0;
            note.push_str(&format!(", critical load {lambda:.4e}"));
        }
        notes.push(note);
    }
    check(ok, notes.join("; "))
}

fn guarded(f: impl FnOnce() -> Outcome) -> Outcome {
    catch_unwind(AssertUnwindSafe(f)).unwrap_or_else(|p| {
        let msg = p
            .downcast_ref::<String>()
            .cloned()
            .or_else(|| p.downcast_ref::<&str>().map(|s| s.to_string()))
            .unwrap_or_default();
        Err(format!("panicked: {msg}"))
    })
}

fn main() {
    let filter: Vec<String> = std::env::args().skip(1).filter(|a| !a.starts_with('-')).collect();
    let wanted = |k: usize| filter.is_empty() || filter.iter().any(|f| f == &k.to_string());
    let mut results: Vec<(usize, &str, Outcome)> = Vec::new();
    let single: [(usize, &'static str, fn() -> Outcome); 4] = [
        (1, "homogeneous identity", homogeneous_identity),
        (2, "laminate oracle equivalence", laminate_oracle),
        (3, "Voigt/Reuss bounds", bounds),
        (4, "patch and consistency", patch_and_consistency),
    ];
    let late: [(usize, &'static str, fn() -> Outcome); 4] = [
        (7, "cylindrical flat limit", cylinder_flat_limit),
        (8, "strength consistency", strength_consistency),
        (9, "determinism", determinism),
        (10, "fixtures execute", fixtures_execute),
    ];
    for (k, name, f) in single {
        if wanted(k) {
            results.push((k, name, guarded(f)));
            report(results.last().unwrap());
        }
    }
    if wanted(5) || wanted(6) {
        let (c5, c6) = catch_unwind(convergence_and_oscillation)
            .unwrap_or_else(|_| (Err("panicked".into()), Err("panicked".into())));
        for (k, name, r) in [(5, "empirical convergence", c5), (6, "oscillation capture", c6)] {
            if wanted(k) {
                results.push((k, name, r));
                report(results.last().unwrap());
            }
        }
    }
    for (k, name, f) in late {
        if wanted(k) {
            results.push((k, name, guarded(f)));
            report(results.last().unwrap());
        }
    }
    let failed: Vec<usize> = results.iter().filter(|r| r.2.is_err()).map(|r| r.0).collect();
    println!(
        "acceptance: {} of {} criteria passed{}",
        results.len() - failed.len(),
        results.len(),
        if failed.is_empty() { String::new() } else { format!("; failed {failed:?}") }
    );
    if !failed.is_empty() {
        std::process::exit(1);
    }
}

fn report((k, name, r): &(usize, &str, Outcome)) {
    match r {
        Ok(d) => println!("criterion {k:>2} PASS  {name}: {d}"),
        Err(d) => println!("criterion {k:>2} FAIL  {name}: {d}"),
    }
}
