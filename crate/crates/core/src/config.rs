//! INI-style run configuration with unit-carrying quantities.
//!
//! Every physical value is written with a unit and converted to SI on parse.
//! Unknown sections and keys are rejected. The full key reference lives in
//! the README; a minimal file looks like
//!
//! ```text
//! [geometry]
//! lame_model = plate
//! alpha1 = 0 1 cm
//! alpha2 = 0 1 cm
//! alpha3 = 0 0.2 cm
//!
//! [cell]
//! n = 16
//! phase_geometry = laminate
//! laminate_axis = 3
//! layers = 0.5 1, 0.5 2
//! phase.1.E = 11700 GPa
//! phase.1.nu = 0.321
//! phase.2.E = 6.62 GPa
//! phase.2.nu = 0.333
//!
//! [macro]
//! divisions = 20 20 4
//! body_force = 0 0 -10000 N/cm3
//! bc.xmin = clamped
//!
//! [reconstruct]
//! epsilon = 1/25 cm
//! ```

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
use crate::fem::SolverOptions;
use crate::macroscale::{BodyForce, BoundaryCondition, LoadCase};
use crate::mesh::{Face, MacroDomain, PhaseGeometry};
use crate::metric::{DoublyCurvedVariant, LameModel};
use crate::strength::StrengthMethod;
use crate::tensor::{isotropic_tensor, ElasticTensor, MaterialTable};
use crate::twoscale::Order;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Dim {
    Length,
    Angle,
    Stress,
    ForceDensity,
}

impl Dim {
    fn name(self) -> &'static str {
        match self {
            Dim::Length => "length",
            Dim::Angle => "angle",
            Dim::Stress => "stress",
            Dim::ForceDensity => "force per volume",
        }
    }
}

const UNITS: &[(&str, Dim, f64)] = &[
    ("m", Dim::Length, 1.0),
    ("cm", Dim::Length, 1e-2),
    ("mm", Dim::Length, 1e-3),
    ("rad", Dim::Angle, 1.0),
    ("deg", Dim::Angle, std::f64::consts::PI / 180.0),
    ("Pa", Dim::Stress, 1.0),
    ("kPa", Dim::Stress, 1e3),
    ("MPa", Dim::Stress, 1e6),
    ("GPa", Dim::Stress, 1e9),
    ("N/m2", Dim::Stress, 1.0),
    ("N/cm2", Dim::Stress, 1e4),
    ("N/mm2", Dim::Stress, 1e6),
    ("N/m3", Dim::ForceDensity, 1.0),
    ("kN/m3", Dim::ForceDensity, 1e3),
    ("N/cm3", Dim::ForceDensity, 1e6),
    ("N/mm3", Dim::ForceDensity, 1e9),
];

fn err(msg: impl Into<String>) -> Error {
    Error::Config(msg.into())
}

/// Parses `1.5`, `-2e3`, `1/25`, `pi`, `-pi/9`, `2pi`.
pub fn parse_number(s: &str) -> Result<f64> {
    let s = s.trim();
    if let Some((a, b)) = s.split_once('/') {
        let d = parse_number(b)?;
        if d == 0.0 {
            return Err(err(format!("division by zero in `{s}`")));
        }
        return Ok(parse_number(a)? / d);
    }
    let (sign, body) = match s.strip_prefix('-') {
        Some(rest) => (-1.0, rest),
        None => (1.0, s.strip_prefix('+').unwrap_or(s)),
    };
    if let Some(coef) = body.strip_suffix("pi") {
        let c = if coef.is_empty() { 1.0 } else { coef.trim_end_matches('*').parse::<f64>().map_err(|_| err(format!("bad number `{s}`")))? };
        return Ok(sign * c * std::f64::consts::PI);
    }
    let v: f64 = body.parse().map_err(|_| err(format!("bad number `{s}`")))?;
    if !v.is_finite() {
        return Err(err(format!("non-finite number `{s}`")));
    }
    Ok(sign * v)
}

/// Splits `v1 v2 ... unit` and converts the values to SI.
fn quantities(s: &str, dims: &[Dim]) -> Result<Vec<f64>> {
    let tokens: Vec<&str> = s.split_whitespace().collect();
    let (unit, values) = tokens.split_last().ok_or_else(|| err("empty value"))?;
    let (_, dim, factor) = UNITS
        .iter()
        .find(|(u, _, _)| u == unit)
        .ok_or_else(|| err(format!("`{s}` needs a unit ({} expected)", dims[0].name())))?;
    if !dims.contains(dim) {
        return Err(err(format!("unit `{unit}` in `{s}` is not a {}", dims[0].name())));
    }
    values.iter().map(|v| parse_number(v).map(|x| x * factor)).collect()
}

fn quantity(s: &str, dim: Dim) -> Result<f64> {
    match quantities(s, &[dim])?.as_slice() {
        [v] => Ok(*v),
        _ => Err(err(format!("expected one value in `{s}`"))),
    }
}

fn vector3(s: &str, dim: Dim) -> Result<[f64; 3]> {
    let v = quantities(s, &[dim])?;
    v.try_into().map_err(|_| err(format!("expected three values in `{s}`")))
}

fn numbers(s: &str) -> Result<Vec<f64>> {
    s.split_whitespace().map(parse_number).collect()
}

fn integer(s: &str) -> Result<usize> {
    s.trim().parse().map_err(|_| err(format!("expected a non-negative integer, found `{s}`")))
}

fn boolean(s: &str) -> Result<bool> {
    match s.trim() {
        "true" | "yes" | "on" | "1" => Ok(true),
        "false" | "no" | "off" | "0" => Ok(false),
        other => Err(err(format!("expected a boolean, found `{other}`"))),
    }
}

/// Raw `section → key → value` map in file order-independent form.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Ini {
    pub sections: BTreeMap<String, BTreeMap<String, String>>,
}

impl Ini {
    pub fn parse(text: &str) -> Result<Ini> {
        let mut ini = Ini::default();
        let mut current: Option<String> = None;
        for (k, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() || line.starts_with(';') {
                continue;
            }
            if let Some(name) = line.strip_prefix('[').and_then(|l| l.strip_suffix(']')) {
                let name = name.trim().to_string();
                if ini.sections.contains_key(&name) {
                    return Err(err(format!("line {}: section [{name}] repeated", k + 1)));
                }
                ini.sections.insert(name.clone(), BTreeMap::new());
                current = Some(name);
                continue;
            }
            let (key, value) = line.split_once('=').ok_or_else(|| err(format!("line {}: expected `key = value`", k + 1)))?;
            let section = current.as_ref().ok_or_else(|| err(format!("line {}: key outside any section", k + 1)))?;
            let entries = ini.sections.get_mut(section).unwrap();
            let key = key.trim().to_string();
            if entries.insert(key.clone(), value.trim().to_string()).is_some() {
                return Err(err(format!("line {}: key `{key}` repeated in [{section}]", k + 1)));
            }
        }
        Ok(ini)
    }

    fn canonical(&self, sections: &[&str]) -> String {
        let mut s = String::new();
        for name in sections {
            if let Some(entries) = self.sections.get(*name) {
                s.push_str(&format!("[{name}]\n"));
                for (k, v) in entries {
                    let v: Vec<&str> = v.split_whitespace().collect();
                    s.push_str(&format!("{k}={}\n", v.join(" ")));
                }
            }
        }
        s
    }
}

/// Section reader that tracks which keys were consumed.
struct Section<'a> {
    name: &'a str,
    entries: BTreeMap<String, String>,
}

impl<'a> Section<'a> {
    fn new(ini: &Ini, name: &'a str) -> Self {
        Section { name, entries: ini.sections.get(name).cloned().unwrap_or_default() }
    }

    fn take(&mut self, key: &str) -> Option<String> {
        self.entries.remove(key)
    }

    fn require(&mut self, key: &str) -> Result<String> {
        self.take(key).ok_or_else(|| err(format!("[{}] is missing `{key}`", self.name)))
    }

    fn take_prefixed(&mut self, prefix: &str) -> Vec<(String, String)> {
        let keys: Vec<String> = self.entries.keys().filter(|k| k.starts_with(prefix)).cloned().collect();
        keys.into_iter().map(|k| {
            let v = self.entries.remove(&k).unwrap();
            (k, v)
        }).collect()
    }

    fn finish(self) -> Result<()> {
        match self.entries.keys().next() {
            Some(k) => Err(err(format!("unknown key `{k}` in [{}]", self.name))),
            None => Ok(()),
        }
    }
}

#[derive(Debug, Clone)]
pub struct CellConfig {
    pub n: usize,
    pub phase: PhaseGeometry,
    pub materials: MaterialTable,
    pub second_order: bool,
    pub solver: SolverOptions,
}

#[derive(Debug, Clone, PartialEq)]
pub struct MacroConfig {
    pub divisions: [usize; 3],
    /// Mesh read from disk instead of generating `divisions`.
    pub mesh_file: Option<PathBuf>,
    pub loads: LoadCase,
    pub representative_count: usize,
    pub solver: SolverOptions,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ReconstructConfig {
    pub epsilon: f64,
    pub order: Order,
    /// Evaluation mesh divisions; derived from `elements_per_period` when absent.
    pub divisions: Option<[usize; 3]>,
    pub elements_per_period: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct StrengthConfig {
    pub method: StrengthMethod,
    /// Reconstruction order whose stresses are checked.
    pub stress_order: Order,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ValidateConfig {
    pub epsilons: Vec<f64>,
    pub elements_per_period: usize,
    pub cell_n: usize,
    pub min_rate: f64,
    pub slack: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct OutputConfig {
    pub directory: PathBuf,
    pub vtk: bool,
}

#[derive(Debug, Clone)]
pub struct RunConfig {
    pub model: LameModel,
    pub domain: MacroDomain,
    pub cell: CellConfig,
    pub macroscale: MacroConfig,
    pub reconstruct: Option<ReconstructConfig>,
    pub strength: Option<StrengthConfig>,
    pub validate: Option<ValidateConfig>,
    pub output: OutputConfig,
    /// SHA-256 of the sections that determine cell and macro archives.
    pub model_hash: String,
}

const SECTIONS: [&str; 7] = ["geometry", "cell", "macro", "reconstruct", "strength", "validate", "output"];

impl RunConfig {
    pub fn from_file(path: &Path) -> Result<RunConfig> {
        let text = std::fs::read_to_string(path).map_err(|e| err(format!("cannot read {}: {e}", path.display())))?;
        let base = path.parent().map(Path::to_path_buf).unwrap_or_default();
        Self::parse(&text, &base)
    }

    /// Parses config text; relative file names resolve against `base`.
    pub fn parse(text: &str, base: &Path) -> Result<RunConfig> {
        let ini = Ini::parse(text)?;
        if let Some(s) = ini.sections.keys().find(|s| !SECTIONS.contains(&s.as_str())) {
            return Err(err(format!("unknown section [{s}]")));
        }
        let mut g = Section::new(&ini, "geometry");
        let model = parse_model(&mut g)?;
        let domain = parse_domain(&mut g, &model)?;
        g.finish()?;

        let mut c = Section::new(&ini, "cell");
        let (cell, materials_text) = parse_cell(&mut c, base)?;
        c.finish()?;

        let mut m = Section::new(&ini, "macro");
        let macroscale = parse_macro(&mut m, &model, &domain, base)?;
        m.finish()?;

        let reconstruct = match ini.sections.contains_key("reconstruct") {
            true => {
                let mut r = Section::new(&ini, "reconstruct");
                let v = parse_reconstruct(&mut r)?;
                r.finish()?;
                Some(v)
            }
            false => None,
        };
        let strength = match ini.sections.contains_key("strength") {
            true => {
                let mut s = Section::new(&ini, "strength");
                let v = parse_strength(&mut s)?;
                s.finish()?;
                Some(v)
            }
            false => None,
        };
        let validate = match ini.sections.contains_key("validate") {
            true => {
                let mut s = Section::new(&ini, "validate");
                let v = parse_validate(&mut s, &domain)?;
                s.finish()?;
                Some(v)
            }
            false => None,
        };
        let mut o = Section::new(&ini, "output");
        let output = OutputConfig {
            directory: o.take("directory").map(|d| base.join(d)).unwrap_or_else(|| base.join("out")),
            vtk: o.take("vtk").map(|v| boolean(&v)).transpose()?.unwrap_or(true),
        };
        o.finish()?;

        if strength.is_some() {
            for id in cell.materials.phases.keys() {
                cell.materials.yield_strength(*id).map_err(|_| err(format!("[strength] needs phase.{id}.Se")))?;
            }
            if reconstruct.is_none() {
                return Err(err("[strength] needs a [reconstruct] section for epsilon"));
            }
        }

        let mut hasher = Sha256::new();
        hasher.update(ini.canonical(&["geometry", "cell", "macro"]));
        if let Some(t) = materials_text {
            hasher.update(t);
        }
        let model_hash = hex::encode(hasher.finalize());
        Ok(RunConfig { model, domain, cell, macroscale, reconstruct, strength, validate, output, model_hash })
    }
}

fn parse_model(g: &mut Section) -> Result<LameModel> {
    let name = g.require("lame_model")?;
    let model = match name.as_str() {
        "plate" => LameModel::Plate,
        "cylindrical" => LameModel::Cylindrical { r2: quantity(&g.require("R2")?, Dim::Length)? },
        "doubly_curved" => {
            let variant = match g.take("doubly_curved_variant").as_deref() {
                None | Some("as_printed") => DoublyCurvedVariant::AsPrinted,
                Some("alpha3") => DoublyCurvedVariant::Alpha3,
                Some(o) => return Err(err(format!("doubly_curved_variant `{o}` is not as_printed or alpha3"))),
            };
            LameModel::DoublyCurved {
                r1: quantity(&g.require("R1")?, Dim::Length)?,
                r2: quantity(&g.require("R2")?, Dim::Length)?,
                variant,
            }
        }
        other => return Err(err(format!("lame_model `{other}` is not plate, cylindrical or doubly_curved"))),
    };
    Ok(model)
}

fn parse_domain(g: &mut Section, model: &LameModel) -> Result<MacroDomain> {
    let angular = model.angular_axes();
    let mut lo = [0.0; 3];
    let mut hi = [0.0; 3];
    for a in 0..3 {
        let key = format!("alpha{}", a + 1);
        let dim = if angular.contains(&a) { Dim::Angle } else { Dim::Length };
        let v = quantities(&g.require(&key)?, &[dim])?;
        match v.as_slice() {
            [l, h] if h > l => {
                lo[a] = *l;
                hi[a] = *h;
            }
            _ => return Err(err(format!("`{key}` needs an increasing pair `lo hi unit`"))),
        }
    }
    Ok(match model {
        LameModel::Plate => MacroDomain::Box { lo, hi },
        _ => MacroDomain::ShellSector { alpha1: (lo[0], hi[0]), alpha2: (lo[1], hi[1]), alpha3: (lo[2], hi[2]) },
    })
}

fn parse_axis(s: &str) -> Result<usize> {
    match integer(s)? {
        a @ 1..=3 => Ok(a - 1),
        a => Err(err(format!("axis {a} is not 1, 2 or 3"))),
    }
}

fn parse_phase_geometry(c: &mut Section) -> Result<PhaseGeometry> {
    let kind = c.require("phase_geometry")?;
    let phase_id = |s: String| -> Result<u32> { s.trim().parse().map_err(|_| err(format!("bad phase id `{s}`"))) };
    let geometry = match kind.as_str() {
        "uniform" => PhaseGeometry::Uniform(phase_id(c.require("phase")?)?),
        "laminate" => {
            let axis = parse_axis(&c.require("laminate_axis")?)?;
            let layers = c
                .require("layers")?
                .split(',')
                .map(|l| match l.split_whitespace().collect::<Vec<_>>().as_slice() {
                    [f, p] => Ok((parse_number(f)?, phase_id(p.to_string())?)),
                    _ => Err(err(format!("layer `{l}` is not `fraction phase`"))),
                })
                .collect::<Result<Vec<_>>>()?;
            PhaseGeometry::Laminate { axis, layers }
        }
        "box_inclusion" | "sphere_inclusion" => {
            let center: [f64; 3] = numbers(&c.require("inclusion_center")?)?
                .try_into()
                .map_err(|_| err("inclusion_center needs three values"))?;
            let phase = phase_id(c.require("inclusion_phase")?)?;
            let matrix = phase_id(c.require("matrix_phase")?)?;
            if kind == "box_inclusion" {
                let half_widths: [f64; 3] = numbers(&c.require("inclusion_half_widths")?)?
                    .try_into()
                    .map_err(|_| err("inclusion_half_widths needs three values"))?;
                PhaseGeometry::BoxInclusion { center, half_widths, phase, matrix }
            } else {
                let radius = parse_number(&c.require("inclusion_radius")?)?;
                PhaseGeometry::SphereInclusion { center, radius, phase, matrix }
            }
        }
        other => return Err(err(format!("phase_geometry `{other}` is unknown"))),
    };
    geometry.validate().map_err(|e| err(e.to_string()))?;
    Ok(geometry)
}

fn geometry_phases(p: &PhaseGeometry) -> Vec<u32> {
    match p {
        PhaseGeometry::Uniform(id) => vec![*id],
        PhaseGeometry::Laminate { layers, .. } => layers.iter().map(|l| l.1).collect(),
        PhaseGeometry::BoxInclusion { phase, matrix, .. } | PhaseGeometry::SphereInclusion { phase, matrix, .. } => {
            vec![*phase, *matrix]
        }
    }
}

/// `$Material <phase> <C11 C12 .. C16 C22 .. C66 in Pa> <S_e in Pa | none>`.
pub fn parse_materials_file(text: &str) -> Result<MaterialTable> {
    let mut table = MaterialTable::new();
    for (k, line) in text.lines().enumerate() {
        let line = line.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let t: Vec<&str> = line.split_whitespace().collect();
        if t[0] != "$Material" || t.len() != 24 {
            return Err(err(format!("materials line {}: expected `$Material id 21-components S_e`", k + 1)));
        }
        let id: u32 = t[1].parse().map_err(|_| err(format!("materials line {}: bad phase id", k + 1)))?;
        let c: Vec<f64> = t[2..23].iter().map(|v| parse_number(v)).collect::<Result<_>>()?;
        let se = match t[23] {
            "none" => None,
            v => Some(parse_number(v)?),
        };
        table.insert(id, ElasticTensor::from_upper(&c.try_into().unwrap()), se);
    }
    Ok(table)
}

fn parse_cell(c: &mut Section, base: &Path) -> Result<(CellConfig, Option<String>)> {
    let n = integer(&c.take("n").unwrap_or_else(|| "16".into()))?;
    if n == 0 {
        return Err(err("[cell] n must be at least 1"));
    }
    let phase = parse_phase_geometry(c)?;
    let mut materials_text = None;
    let mut materials = match c.take("materials_file") {
        Some(f) => {
            let path = base.join(f.trim());
            let text = std::fs::read_to_string(&path).map_err(|e| err(format!("cannot read {}: {e}", path.display())))?;
            let t = parse_materials_file(&text)?;
            materials_text = Some(text);
            t
        }
        None => MaterialTable::new(),
    };
    let mut per_phase: BTreeMap<u32, BTreeMap<String, String>> = BTreeMap::new();
    for (k, v) in c.take_prefixed("phase.") {
        let parts: Vec<&str> = k.splitn(3, '.').collect();
        let id: u32 = parts.get(1).and_then(|p| p.parse().ok()).ok_or_else(|| err(format!("bad material key `{k}`")))?;
        let field = parts.get(2).ok_or_else(|| err(format!("bad material key `{k}`")))?;
        per_phase.entry(id).or_default().insert(field.to_string(), v);
    }
    for (id, mut fields) in per_phase {
        let tensor = match (fields.remove("C"), fields.remove("E"), fields.remove("nu")) {
            (Some(cv), None, None) => {
                let v = quantities(&cv, &[Dim::Stress])?;
                let v: [f64; 21] = v.try_into().map_err(|_| err(format!("phase.{id}.C needs 21 components")))?;
                ElasticTensor::from_upper(&v)
            }
            (None, Some(e), Some(nu)) => isotropic_tensor(quantity(&e, Dim::Stress)?, parse_number(&nu)?)
                .map_err(|e| err(format!("phase {id}: {e}")))?,
            _ => return Err(err(format!("phase {id} needs either `C` or both `E` and `nu`"))),
        };
        let se = fields.remove("Se").map(|s| quantity(&s, Dim::Stress)).transpose()?;
        if let Some(k) = fields.keys().next() {
            return Err(err(format!("unknown key `phase.{id}.{k}` in [cell]")));
        }
        materials.insert(id, tensor, se);
    }
    for id in geometry_phases(&phase) {
        if !materials.phases.contains_key(&id) {
            return Err(err(format!("phase {id} used by the cell geometry has no material")));
        }
    }
    materials.validate().map_err(|e| err(e.to_string()))?;
    let second_order = c.take("second_order").map(|v| boolean(&v)).transpose()?.unwrap_or(true);
    let solver = solver_options(c)?;
    Ok((CellConfig { n, phase, materials, second_order, solver }, materials_text))
}

fn solver_options(s: &mut Section) -> Result<SolverOptions> {
    let mut o = SolverOptions::default();
    if let Some(t) = s.take("solver_tolerance") {
        o.tol = parse_number(&t)?;
        if !(o.tol > 0.0 && o.tol < 1.0) {
            return Err(err("solver_tolerance must lie in (0, 1)"));
        }
    }
    Ok(o)
}

fn parse_face(s: &str) -> Result<Face> {
    Face::from_name(s).ok_or_else(|| err(format!("unknown face `{s}`")))
}

fn parse_macro(m: &mut Section, model: &LameModel, domain: &MacroDomain, base: &Path) -> Result<MacroConfig> {
    let mesh_file = m.take("mesh_file").map(|f| base.join(f.trim()));
    let divisions = match m.take("divisions") {
        Some(d) => {
            let v: Vec<usize> = d.split_whitespace().map(integer).collect::<Result<_>>()?;
            let v: [usize; 3] = v.try_into().map_err(|_| err("divisions needs three integers"))?;
            if v.contains(&0) {
                return Err(err("divisions must be positive"));
            }
            v
        }
        None if mesh_file.is_some() => [1; 3],
        None => return Err(err("[macro] needs `divisions` or `mesh_file`")),
    };
    let body = match m.take("body_force") {
        Some(f) => vector3(&f, Dim::ForceDensity)?,
        None => [0.0; 3],
    };
    let angular = model.angular_axes();
    let (dlo, dhi) = domain.bounds();
    let mut boundary = Vec::new();
    let bcs = m.take_prefixed("bc.");
    let mut patches: BTreeMap<String, Vec<(usize, f64, f64)>> = BTreeMap::new();
    for (k, v) in &bcs {
        let rest = &k[3..];
        if let Some((face, axis)) = rest.split_once(".patch_alpha") {
            let a = parse_axis(axis)?;
            let dim = if angular.contains(&a) { Dim::Angle } else { Dim::Length };
            match quantities(v, &[dim])?.as_slice() {
                [l, h] if h >= l => patches.entry(face.to_string()).or_default().push((a, *l, *h)),
                _ => return Err(err(format!("`{k}` needs `lo hi unit`"))),
            }
        }
    }
    for (k, v) in &bcs {
        let rest = &k[3..];
        if rest.contains('.') {
            if !rest.contains(".patch_alpha") {
                return Err(err(format!("unknown key `{k}` in [macro]")));
            }
            continue;
        }
        let face = parse_face(rest)?;
        let tokens: Vec<&str> = v.split_whitespace().collect();
        let patch = patches.remove(rest).map(|ranges| {
            let (mut lo, mut hi) = (dlo, dhi);
            for (a, l, h) in ranges {
                lo[a] = l;
                hi[a] = h;
            }
            (lo.map(|x| x - 1e-12 * (1.0 + x.abs())), hi.map(|x| x + 1e-12 * (1.0 + x.abs())))
        });
        let bc = match tokens.first().copied() {
            Some("clamped") if tokens.len() == 1 => BoundaryCondition::Dirichlet { face, values: [Some(0.0); 3] },
            Some("fixed") if tokens.len() == 5 => {
                let unit = tokens[4];
                let mut values = [None; 3];
                for c in 0..3 {
                    if tokens[c + 1] != "*" {
                        values[c] = Some(quantity(&format!("{} {unit}", tokens[c + 1]), Dim::Length)?);
                    }
                }
                BoundaryCondition::Dirichlet { face, values }
            }
            Some("traction") => BoundaryCondition::Traction { face, traction: vector3(&tokens[1..].join(" "), Dim::Stress)?, patch },
            _ => {
                return Err(err(format!(
                    "`{k} = {v}` is not `clamped`, `fixed ux uy uz unit` (`*` frees a component) or `traction tx ty tz unit`"
                )))
            }
        };
        if patch.is_some() && !matches!(bc, BoundaryCondition::Traction { .. }) {
            return Err(err(format!("patch given for non-traction face `{rest}`")));
        }
        boundary.push(bc);
    }
    if let Some(face) = patches.keys().next() {
        return Err(err(format!("patch given for face `{face}` without a boundary condition")));
    }
    let representative_count = integer(&m.take("representative_count").unwrap_or_else(|| "3".into()))?;
    if representative_count == 0 {
        return Err(err("representative_count must be at least 1"));
    }
    let solver = solver_options(m)?;
    Ok(MacroConfig {
        divisions,
        mesh_file,
        loads: LoadCase { body_force: BodyForce::Uniform(body), boundary },
        representative_count,
        solver,
    })
}

fn parse_reconstruct(r: &mut Section) -> Result<ReconstructConfig> {
    let epsilon = quantity(&r.require("epsilon")?, Dim::Length)?;
    if !(epsilon > 0.0) {
        return Err(err("epsilon must be positive"));
    }
    let order = Order::from_int(integer(&r.take("order").unwrap_or_else(|| "2".into()))? as u32)
        .map_err(|e| err(e.to_string()))?;
    let divisions = r
        .take("eval_divisions")
        .map(|d| -> Result<[usize; 3]> {
            let v: Vec<usize> = d.split_whitespace().map(integer).collect::<Result<_>>()?;
            v.try_into().map_err(|_| err("eval_divisions needs three integers"))
        })
        .transpose()?;
    let elements_per_period = integer(&r.take("elements_per_period").unwrap_or_else(|| "8".into()))?;
    if elements_per_period == 0 {
        return Err(err("elements_per_period must be positive"));
    }
    Ok(ReconstructConfig { epsilon, order, divisions, elements_per_period })
}

fn parse_strength(s: &mut Section) -> Result<StrengthConfig> {
    let method = match s.take("method").as_deref() {
        None | Some("direct") => StrengthMethod::Direct,
        Some("bisection") => {
            let init = parse_number(&s.take("bracket_init").unwrap_or_else(|| "1".into()))?;
            let tol = parse_number(&s.take("tolerance").unwrap_or_else(|| "1e-6".into()))?;
            if !(init > 0.0) || !(tol > 0.0) {
                return Err(err("bracket_init and tolerance must be positive"));
            }
            StrengthMethod::Bisection { init, tol }
        }
        Some(o) => return Err(err(format!("strength method `{o}` is not direct or bisection"))),
    };
    let stress_order = Order::from_int(integer(&s.take("stress_order").unwrap_or_else(|| "2".into()))? as u32)
        .map_err(|e| err(e.to_string()))?;
    Ok(StrengthConfig { method, stress_order })
}

fn parse_validate(v: &mut Section, domain: &MacroDomain) -> Result<ValidateConfig> {
    let epsilons = quantities(&v.require("epsilons")?, &[Dim::Length])?;
    if epsilons.is_empty() {
        return Err(err("epsilons needs at least one value"));
    }
    for &e in &epsilons {
        crate::oracle::periods(domain, e).map_err(|x| err(x.to_string()))?;
    }
    let per = integer(&v.take("elements_per_period").unwrap_or_else(|| "8".into()))?;
    let cell_n = integer(&v.take("cell_n").unwrap_or_else(|| per.to_string()))?;
    let min_rate = parse_number(&v.take("min_rate").unwrap_or_else(|| "0.5".into()))?;
    let slack = parse_number(&v.take("slack").unwrap_or_else(|| "0.05".into()))?;
    if per == 0 || cell_n == 0 {
        return Err(err("elements_per_period and cell_n must be positive"));
    }
    Ok(ValidateConfig { epsilons, elements_per_period: per, cell_n, min_rate, slack })
}
