//! Von Mises yield checks and critical-load search.

use std::collections::BTreeMap;

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::tensor::{MaterialTable, Sym3};

/// Equivalent stress `(1/√2) √((σ11−σ22)² + (σ22−σ33)² + (σ33−σ11)² + 6(σ12² + σ23² + σ31²))`.
pub fn von_mises(s: &Sym3) -> f64 {
    let [s11, s22, s33, s12, s23, s13] = *s;
    let d = (s11 - s22).powi(2) + (s22 - s33).powi(2) + (s33 - s11).powi(2) + 6.0 * (s12 * s12 + s23 * s23 + s13 * s13);
    (0.5 * d).sqrt()
}

/// Yield predicate of one element: `σ_e / S_e`, failure at 1.
pub trait YieldCriterion: Sync {
    fn ratio(&self, stress: &Sym3, yield_strength: f64) -> f64;
}

#[derive(Debug, Clone, Copy, Default)]
pub struct VonMises;

impl YieldCriterion for VonMises {
    fn ratio(&self, stress: &Sym3, yield_strength: f64) -> f64 {
        von_mises(stress) / yield_strength
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
#[derive(Default)]
pub enum StrengthMethod {
    /// One evaluation; the multiplier follows from linearity.
    #[default]
    Direct,
    /// Bracket from `init`, then bisect until the bracket is `tol` relative.
    Bisection { init: f64, tol: f64 },
}


#[derive(Debug, Clone, PartialEq)]
pub struct StrengthReport {
    pub critical_load_multiplier: f64,
    pub critical_element: usize,
    pub critical_phase: u32,
    /// Equivalent stress of the critical element at the critical load.
    pub sigma_e_at_critical: f64,
    /// Per phase, `min S_e/σ_e` over its elements at the critical load.
    pub per_phase_margin: BTreeMap<u32, f64>,
    pub method: StrengthMethod,
    /// Load evaluations performed.
    pub evaluations: usize,
}

impl StrengthReport {
    pub fn csv_header() -> &'static str {
        "method,critical_load_multiplier,critical_element,critical_phase,sigma_e_at_critical,evaluations,per_phase_margin"
    }

    pub fn csv_row(&self) -> String {
        let margins: Vec<String> = self.per_phase_margin.iter().map(|(p, m)| format!("{p}:{m:?}")).collect();
        let method = match self.method {
            StrengthMethod::Direct => "direct",
            StrengthMethod::Bisection { .. } => "bisection",
        };
        format!(
            "{method},{:?},{},{},{:?},{},{}",
            self.critical_load_multiplier,
            self.critical_element,
            self.critical_phase,
            self.sigma_e_at_critical,
            self.evaluations,
            margins.join(";")
        )
    }
}

struct Scan {
    worst: f64,
    element: usize,
}

/// Largest ratio; ties go to the lowest element id.
fn scan(stress: &[Sym3], strengths: &[f64], crit: &dyn YieldCriterion) -> Scan {
    let ratios: Vec<f64> = stress.par_iter().zip(strengths).map(|(s, &y)| crit.ratio(s, y)).collect();
    let mut best = Scan { worst: f64::NEG_INFINITY, element: 0 };
    for (e, &r) in ratios.iter().enumerate() {
        if r > best.worst {
            best = Scan { worst: r, element: e };
        }
    }
    best
}

fn strengths(phase: &[u32], materials: &MaterialTable) -> Result<Vec<f64>> {
    let mut cache: BTreeMap<u32, f64> = BTreeMap::new();
    phase
        .iter()
        .map(|&p| {
            if let Some(v) = cache.get(&p) {
                return Ok(*v);
            }
            let s = materials.yield_strength(p)?;
            if !(s > 0.0) {
                return Err(Error::InvalidMaterial(format!("phase {p} has non-positive yield strength {s}")));
            }
            cache.insert(p, s);
            Ok(s)
        })
        .collect()
}

fn report(
    stress: &[Sym3],
    phase: &[u32],
    strengths: &[f64],
    multiplier: f64,
    method: StrengthMethod,
    evaluations: usize,
) -> StrengthReport {
    let crit = scan(stress, strengths, &VonMises);
    let mut per_phase_margin = BTreeMap::new();
    for ((s, &p), &y) in stress.iter().zip(phase).zip(strengths) {
        let ve = von_mises(s);
        let m = if ve > 0.0 { y / ve } else { f64::INFINITY };
        let entry = per_phase_margin.entry(p).or_insert(f64::INFINITY);
        if m < *entry {
            *entry = m;
        }
    }
    StrengthReport {
        critical_load_multiplier: multiplier,
        critical_element: crit.element,
        critical_phase: phase[crit.element],
        sigma_e_at_critical: von_mises(&stress[crit.element]),
        per_phase_margin,
        method,
        evaluations,
    }
}

/// Critical multiplier `1 / max(σ_e/S_e)` of a reference-load stress field.
pub fn critical_load_direct(stress: &[Sym3], phase: &[u32], materials: &MaterialTable) -> Result<StrengthReport> {
    let ys = strengths(phase, materials)?;
    let s = scan(stress, &ys, &VonMises);
    if !(s.worst > 0.0) {
        return Err(Error::NoCriticalLoad);
    }
    let lambda = 1.0 / s.worst;
    let scaled: Vec<Sym3> = stress.iter().map(|x| x.map(|v| v * lambda)).collect();
    Ok(report(&scaled, phase, &ys, lambda, StrengthMethod::Direct, 1))
}

/// Bisection on the yield predicate; `stress_at(λ)` must return the element
/// stresses under `λ` times the reference load.
pub fn critical_load_bisection(
    mut stress_at: impl FnMut(f64) -> Result<Vec<Sym3>>,
    phase: &[u32],
    materials: &MaterialTable,
    init: f64,
    tol: f64,
) -> Result<StrengthReport> {
    if !(init > 0.0) || !(tol > 0.0) {
        return Err(Error::InvalidArgument("bisection needs a positive initial multiplier and tolerance".into()));
    }
    let ys = strengths(phase, materials)?;
    let mut evaluations = 0usize;
    let mut fails = |lambda: f64| -> Result<bool> {
        evaluations += 1;
        let s = stress_at(lambda)?;
        Ok(scan(&s, &ys, &VonMises).worst >= 1.0)
    };
    const MAX_STEPS: usize = 400;
    let (mut lo, mut hi);
    if fails(init)? {
        hi = init;
        lo = init * 0.5;
        let mut k = 0;
        while fails(lo)? {
            hi = lo;
            lo *= 0.5;
            k += 1;
            if k > MAX_STEPS {
                return Err(Error::InvalidArgument("yield predicate fails at every load level".into()));
            }
        }
    } else {
        lo = init;
        hi = init * 2.0;
        let mut k = 0;
        while !fails(hi)? {
            lo = hi;
            hi *= 2.0;
            k += 1;
            if k > MAX_STEPS {
                return Err(Error::NoCriticalLoad);
            }
        }
    }
    while hi - lo > tol * hi {
        let mid = 0.5 * (lo + hi);
        if fails(mid)? {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    let lambda = 0.5 * (lo + hi);
    let s = stress_at(lambda)?;
    Ok(report(&s, phase, &ys, lambda, StrengthMethod::Bisection { init, tol }, evaluations + 1))
}
