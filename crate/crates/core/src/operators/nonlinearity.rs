use serde::{Deserialize, Serialize};

use crate::error::{domain, Result};

/// Memoryless maps applied elementwise and pointwise in time. Every kind maps 0 to 0.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum StaticNonlinearityKind {
    /// `k·tanh(u)`; slope in `[0, k]` for `k ≥ 0`.
    TanhGain { k: f64 },
    /// `clamp(u, -limit, limit)`.
    Saturation { limit: f64 },
    /// `max(u, 0)`.
    Relu,
    /// `sign(u)·max(|u| − width, 0)`.
    Deadzone { width: f64 },
    /// `a·u + (b − a)·s(u)` with `s' ∈ [0, 1]`, so the slope lies in `[a, b]`.
    Sector { a: f64, b: f64, shape: SectorShape },
}

/// Shape function `s` of a sector nonlinearity; `s(0) = 0`, slope in `[0, 1]`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SectorShape {
    Linear,
    Tanh,
    UnitSaturation,
}

impl SectorShape {
    fn apply(self, u: f64) -> f64 {
        match self {
            SectorShape::Linear => u,
            SectorShape::Tanh => u.tanh(),
            SectorShape::UnitSaturation => u.clamp(-1.0, 1.0),
        }
    }
}

impl StaticNonlinearityKind {
    pub fn validate(&self) -> Result<()> {
        match *self {
            StaticNonlinearityKind::TanhGain { k } if !k.is_finite() => {
                domain(format!("tanh gain must be finite, got {k}"))
            }
            StaticNonlinearityKind::Saturation { limit } if !(limit > 0.0 && limit.is_finite()) => {
                domain(format!("saturation limit must be positive, got {limit}"))
            }
            StaticNonlinearityKind::Deadzone { width } if !(width >= 0.0 && width.is_finite()) => {
                domain(format!("deadzone width must be nonnegative, got {width}"))
            }
            StaticNonlinearityKind::Sector { a, b, .. }
                if !(a.is_finite() && b.is_finite() && a <= b) =>
            {
                domain(format!("sector bounds need a <= b, got a={a}, b={b}"))
            }
            _ => Ok(()),
        }
    }

    pub fn apply(&self, u: f64) -> f64 {
        match *self {
            StaticNonlinearityKind::TanhGain { k } => k * u.tanh(),
            StaticNonlinearityKind::Saturation { limit } => u.clamp(-limit, limit),
            StaticNonlinearityKind::Relu => u.max(0.0),
            StaticNonlinearityKind::Deadzone { width } => {
                if u > width {
                    u - width
                } else if u < -width {
                    u + width
                } else {
                    0.0
                }
            }
            StaticNonlinearityKind::Sector { a, b, shape } => a * u + (b - a) * shape.apply(u),
        }
    }

    /// Declared slope bounds `(min, max)`.
    pub fn slope_bounds(&self) -> (f64, f64) {
        match *self {
            StaticNonlinearityKind::TanhGain { k } => (k.min(0.0), k.max(0.0)),
            StaticNonlinearityKind::Saturation { .. }
            | StaticNonlinearityKind::Relu
            | StaticNonlinearityKind::Deadzone { .. } => (0.0, 1.0),
            StaticNonlinearityKind::Sector { a, b, .. } => (a, b),
        }
    }
}
