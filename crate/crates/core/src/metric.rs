//! Lamé coefficients of the orthogonal curvilinear frame `(α1, α2, α3)`.

use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};

/// User-supplied metric: returns `H` and `dH[i][j] = ∂H_i/∂α_j`.
pub trait MetricFn: Send + Sync {
    fn eval(&self, alpha: [f64; 3]) -> ([f64; 3], [[f64; 3]; 3]);
}

impl<F> MetricFn for F
where
    F: Fn([f64; 3]) -> ([f64; 3], [[f64; 3]; 3]) + Send + Sync,
{
    fn eval(&self, alpha: [f64; 3]) -> ([f64; 3], [[f64; 3]; 3]) {
        self(alpha)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DoublyCurvedVariant {
    /// `H1 = R1 + α1`
    AsPrinted,
    /// `H1 = R1 + α3`
    Alpha3,
}

#[derive(Clone)]
pub enum LameModel {
    Plate,
    /// `H = (1, R2 + α3, 1)`
    Cylindrical { r2: f64 },
    /// `H = (R1 + α1 | R1 + α3, R2 + α3, 1)`
    DoublyCurved { r1: f64, r2: f64, variant: DoublyCurvedVariant },
    Custom(Arc<dyn MetricFn>),
}

impl fmt::Debug for LameModel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            LameModel::Plate => write!(f, "Plate"),
            LameModel::Cylindrical { r2 } => write!(f, "Cylindrical {{ r2: {r2} }}"),
            LameModel::DoublyCurved { r1, r2, variant } => {
                write!(f, "DoublyCurved {{ r1: {r1}, r2: {r2}, variant: {variant:?} }}")
            }
            LameModel::Custom(_) => write!(f, "Custom"),
        }
    }
}

/// Metric data at one macro point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MetricSample {
    pub h: [f64; 3],
    /// `dh[i][j] = ∂H_i/∂α_j`
    pub dh: [[f64; 3]; 3],
    pub hprod: f64,
}

impl MetricSample {
    pub fn flat() -> Self {
        MetricSample { h: [1.0; 3], dh: [[0.0; 3]; 3], hprod: 1.0 }
    }

    /// `ψ_j(H_i) / H_i = ∂_j H_i / (H_i H_j)`, the coefficient of the
    /// undifferentiated displacement terms in the curvilinear strains.
    pub fn coupling(&self, i: usize, j: usize) -> f64 {
        self.dh[i][j] / (self.h[i] * self.h[j])
    }

    /// `(1/H) ∂_j (H / H_j)`.
    pub fn divergence_weight(&self, j: usize) -> f64 {
        (0..3).filter(|&k| k != j).map(|k| self.coupling(k, j)).sum()
    }

    pub fn is_flat(&self) -> bool {
        self.h == [1.0; 3] && self.dh.iter().flatten().all(|&d| d == 0.0)
    }
}

impl LameModel {
    /// Coordinates along which `H` varies; representative points are spread along these.
    pub fn varying_axes(&self) -> Vec<usize> {
        match self {
            LameModel::Plate => vec![],
            LameModel::Cylindrical { .. } => vec![2],
            LameModel::DoublyCurved { variant: DoublyCurvedVariant::AsPrinted, .. } => vec![0, 2],
            LameModel::DoublyCurved { variant: DoublyCurvedVariant::Alpha3, .. } => vec![2],
            LameModel::Custom(_) => vec![0, 1, 2],
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            LameModel::Plate => "plate",
            LameModel::Cylindrical { .. } => "cylindrical",
            LameModel::DoublyCurved { .. } => "doubly_curved",
            LameModel::Custom(_) => "custom",
        }
    }

    /// Axes whose coordinate is an angle (dimensionless) rather than a length.
    pub fn angular_axes(&self) -> Vec<usize> {
        match self {
            LameModel::Plate | LameModel::Custom(_) => vec![],
            LameModel::Cylindrical { .. } => vec![1],
            LameModel::DoublyCurved { .. } => vec![0, 1],
        }
    }
}

pub fn lame_eval(model: &LameModel, alpha: [f64; 3]) -> Result<MetricSample> {
    let (h, dh) = match model {
        LameModel::Plate => ([1.0; 3], [[0.0; 3]; 3]),
        LameModel::Cylindrical { r2 } => {
            let mut dh = [[0.0; 3]; 3];
            dh[1][2] = 1.0;
            ([1.0, r2 + alpha[2], 1.0], dh)
        }
        LameModel::DoublyCurved { r1, r2, variant } => {
            let mut dh = [[0.0; 3]; 3];
            dh[1][2] = 1.0;
            let h1 = match variant {
                DoublyCurvedVariant::AsPrinted => {
                    dh[0][0] = 1.0;
                    r1 + alpha[0]
                }
                DoublyCurvedVariant::Alpha3 => {
                    dh[0][2] = 1.0;
                    r1 + alpha[2]
                }
            };
            ([h1, r2 + alpha[2], 1.0], dh)
        }
        LameModel::Custom(f) => f.eval(alpha),
    };
    for (i, &v) in h.iter().enumerate() {
        if !(v > 0.0) || !v.is_finite() {
            return Err(Error::NonPositiveMetric { index: i + 1, value: v, alpha });
        }
    }
    Ok(MetricSample { h, dh, hprod: h[0] * h[1] * h[2] })
}

/// `(1/H1, 1/H2, 1/H3)` at the representative point: the constant factors that
/// turn `∂/∂β_i` into the cell operators `ψ̃_i`.
pub fn micro_scale_factors(model: &LameModel, alpha_i: [f64; 3]) -> Result<[f64; 3]> {
    let m = lame_eval(model, alpha_i)?;
    Ok(m.h.map(|h| 1.0 / h))
}
