use crate::error::{Error, Result};

/// Phase layout of the unit cell `(0,1)^3`, evaluated at element centroids.
///
/// Inclusions use the periodic minimum-image distance, so an inclusion that
/// crosses a cell face reappears on the opposite face.
#[derive(Debug, Clone, PartialEq)]
pub enum PhaseGeometry {
    /// Layers stacked along `axis` (0-based); `(fraction, phase)` from β=0 upwards.
    Laminate { axis: usize, layers: Vec<(f64, u32)> },
    BoxInclusion { center: [f64; 3], half_widths: [f64; 3], phase: u32, matrix: u32 },
    SphereInclusion { center: [f64; 3], radius: f64, phase: u32, matrix: u32 },
    Uniform(u32),
}

fn periodic_offset(x: f64, c: f64) -> f64 {
    let d = x - c;
    d - d.round()
}

impl PhaseGeometry {
    pub fn validate(&self) -> Result<()> {
        match self {
            PhaseGeometry::Laminate { axis, layers } => {
                if *axis > 2 {
                    return Err(Error::InvalidArgument(format!("laminate axis {axis} out of range")));
                }
                if layers.is_empty() || layers.iter().any(|(f, _)| !(*f > 0.0)) {
                    return Err(Error::InvalidArgument("laminate layers need positive fractions".into()));
                }
                let total: f64 = layers.iter().map(|(f, _)| f).sum();
                if (total - 1.0).abs() > 1e-12 {
                    return Err(Error::InvalidArgument(format!(
                        "laminate fractions sum to {total}, expected 1"
                    )));
                }
            }
            PhaseGeometry::BoxInclusion { half_widths, .. } => {
                if half_widths.iter().any(|h| !(*h > 0.0 && *h < 0.5)) {
                    return Err(Error::InvalidArgument(
                        "box half-widths must lie in (0, 0.5)".into(),
                    ));
                }
            }
            PhaseGeometry::SphereInclusion { radius, .. } => {
                if !(*radius > 0.0 && *radius < 0.5) {
                    return Err(Error::InvalidArgument("sphere radius must lie in (0, 0.5)".into()));
                }
            }
            PhaseGeometry::Uniform(_) => {}
        }
        Ok(())
    }

    /// Phase id at cell point `beta`.
    pub fn phase_at(&self, beta: [f64; 3]) -> u32 {
        match self {
            PhaseGeometry::Laminate { axis, layers } => {
                let x = beta[*axis] - beta[*axis].floor();
                let mut top = 0.0;
                for (f, id) in layers {
                    top += f;
                    if x < top {
                        return *id;
                    }
                }
                layers.last().map(|l| l.1).unwrap_or(0)
            }
            PhaseGeometry::BoxInclusion { center, half_widths, phase, matrix } => {
                let inside = (0..3).all(|a| periodic_offset(beta[a], center[a]).abs() < half_widths[a]);
                if inside {
                    *phase
                } else {
                    *matrix
                }
            }
            PhaseGeometry::SphereInclusion { center, radius, phase, matrix } => {
                let r2: f64 = (0..3).map(|a| periodic_offset(beta[a], center[a]).powi(2)).sum();
                if r2 < radius * radius {
                    *phase
                } else {
                    *matrix
                }
            }
            PhaseGeometry::Uniform(id) => *id,
        }
    }

    /// Every phase id this geometry can produce.
    pub fn phases(&self) -> Vec<u32> {
        let mut ids = match self {
            PhaseGeometry::Laminate { layers, .. } => layers.iter().map(|l| l.1).collect(),
            PhaseGeometry::BoxInclusion { phase, matrix, .. }
            | PhaseGeometry::SphereInclusion { phase, matrix, .. } => vec![*phase, *matrix],
            PhaseGeometry::Uniform(id) => vec![*id],
        };
        ids.sort_unstable();
        ids.dedup();
        ids
    }

    /// Exact volume fraction of `phase` in the cell, where it has a closed form.
    pub fn analytic_fraction(&self, phase: u32) -> f64 {
        match self {
            PhaseGeometry::Laminate { layers, .. } => {
                layers.iter().filter(|l| l.1 == phase).map(|l| l.0).sum()
            }
            PhaseGeometry::BoxInclusion { half_widths, phase: p, matrix, .. } => {
                let v: f64 = half_widths.iter().map(|h| 2.0 * h).product();
                if phase == *p {
                    v
                } else if phase == *matrix {
                    1.0 - v
                } else {
                    0.0
                }
            }
            PhaseGeometry::SphereInclusion { radius, phase: p, matrix, .. } => {
                let v = 4.0 / 3.0 * std::f64::consts::PI * radius.powi(3);
                if phase == *p {
                    v
                } else if phase == *matrix {
                    1.0 - v
                } else {
                    0.0
                }
            }
            PhaseGeometry::Uniform(id) => {
                if *id == phase {
                    1.0
                } else {
                    0.0
                }
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn laminate_classifier() {
        let lam = PhaseGeometry::Laminate { axis: 2, layers: vec![(0.5, 0), (0.5, 1)] };
        lam.validate().unwrap();
        assert_eq!(lam.phase_at([0.9, 0.9, 0.49]), 0);
        assert_eq!(lam.phase_at([0.1, 0.1, 0.5]), 1);
        assert_eq!(lam.phase_at([0.1, 0.1, 0.99]), 1);
    }

    #[test]
    fn laminate_fractions_must_sum_to_one() {
        let lam = PhaseGeometry::Laminate { axis: 0, layers: vec![(0.5, 0), (0.4, 1)] };
        assert!(lam.validate().is_err());
    }

    #[test]
    fn inclusions_wrap_periodically() {
        let sph = PhaseGeometry::SphereInclusion { center: [0.0, 0.0, 0.0], radius: 0.2, phase: 1, matrix: 0 };
        assert_eq!(sph.phase_at([0.95, 0.05, 0.02]), 1);
        assert_eq!(sph.phase_at([0.5, 0.5, 0.5]), 0);
        let bx = PhaseGeometry::BoxInclusion {
            center: [0.5, 0.5, 0.5],
            half_widths: [0.25, 0.25, 0.25],
            phase: 2,
            matrix: 0,
        };
        assert_eq!(bx.phase_at([0.6, 0.4, 0.5]), 2);
        assert_eq!(bx.phase_at([0.1, 0.4, 0.5]), 0);
        assert_eq!(bx.phases(), vec![0, 2]);
    }
}
