//! Conjugate-symmetric regions of the complex plane used as SRG bounds.

mod distance;

pub use distance::{
    containment_report, point_region_distance, region_distance, sampled_region_distance,
    ContainmentReport, DistanceMethod, DistanceResult, DEFAULT_REFINEMENT,
};
pub(crate) use distance::boundary_curves;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{domain, Result};
use crate::sampler::SrgCloud;

/// Relative slack for boundary membership: `z` counts as inside when it
/// violates an inequality by at most `BOUNDARY_TOL·(1 + |z|)`.
pub const BOUNDARY_TOL: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Side {
    /// `Re z ≥ bound`.
    Ge,
    /// `Re z ≤ bound`.
    Le,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case", deny_unknown_fields)]
pub enum Region {
    /// Closed disk centered on the real axis.
    Disk {
        center: f64,
        radius: f64,
        #[serde(default)]
        punctured: bool,
    },
    HalfPlane {
        bound: f64,
        side: Side,
        #[serde(default)]
        punctured: bool,
    },
    /// `{|∠z| ≤ arccos 2√(δε), 0 < |z| ≤ 1/ε, Re z ≥ δ}`.
    SectorDisk { delta: f64, epsilon: f64 },
    ImaginaryAxis {
        #[serde(default)]
        punctured: bool,
    },
    RealSegment { min: f64, max: f64 },
    /// `{τz : z ∈ inner}`.
    Scaled { tau: f64, inner: Box<Region> },
    /// `{1/z : z ∈ inner, z ≠ 0}`.
    Inverted { inner: Box<Region> },
    /// `{−z : z ∈ inner}`.
    Negated { inner: Box<Region> },
    /// Union of closed disks of radius `pad` around each point and its conjugate.
    HullOfCloud {
        points: Vec<Complex64>,
        #[serde(default)]
        pad: f64,
    },
    Union { members: Vec<Region> },
}

fn tol(z: Complex64) -> f64 {
    BOUNDARY_TOL * (1.0 + z.norm())
}

impl Region {
    pub fn disk(center: f64, radius: f64) -> Result<Region> {
        let r = Region::Disk {
            center,
            radius,
            punctured: false,
        };
        r.validate()?;
        Ok(r)
    }

    pub fn half_plane(bound: f64, side: Side) -> Result<Region> {
        let r = Region::HalfPlane {
            bound,
            side,
            punctured: false,
        };
        r.validate()?;
        Ok(r)
    }

    /// Truncated disk sector bounding strictly incrementally positive systems.
    pub fn sector_disk(delta: f64, epsilon: f64) -> Result<Region> {
        let r = Region::SectorDisk { delta, epsilon };
        r.validate()?;
        Ok(r)
    }

    pub fn imaginary_axis(punctured: bool) -> Region {
        Region::ImaginaryAxis { punctured }
    }

    pub fn real_segment(min: f64, max: f64) -> Result<Region> {
        let r = Region::RealSegment { min, max };
        r.validate()?;
        Ok(r)
    }

    /// Point cloud as a region; each point carries a disk of radius `pad`.
    pub fn hull_of_cloud(cloud: &SrgCloud, pad: f64) -> Result<Region> {
        let r = Region::HullOfCloud {
            points: cloud.points.iter().map(|p| p.z()).collect(),
            pad,
        };
        r.validate()?;
        Ok(r)
    }

    pub fn union(members: Vec<Region>) -> Result<Region> {
        let r = Region::Union { members };
        r.validate()?;
        Ok(r)
    }

    pub fn validate(&self) -> Result<()> {
        let finite = |v: f64, what: &str| {
            if v.is_finite() {
                Ok(())
            } else {
                domain(format!("{what} must be finite, got {v}"))
            }
        };
        match self {
            Region::Disk { center, radius, .. } => {
                finite(*center, "disk center")?;
                if !(*radius >= 0.0 && radius.is_finite()) {
                    return domain(format!("disk radius must be nonnegative, got {radius}"));
                }
                Ok(())
            }
            Region::HalfPlane { bound, .. } => finite(*bound, "half-plane bound"),
            Region::SectorDisk { delta, epsilon } => {
                if !(*delta > 0.0 && delta.is_finite()) {
                    return domain(format!("sector disk needs delta > 0, got {delta}"));
                }
                if !(*epsilon > 0.0 && epsilon.is_finite()) {
                    return domain(format!("sector disk needs epsilon > 0, got {epsilon}"));
                }
                let c = 2.0 * (delta * epsilon).sqrt();
                if c > 1.0 + 1e-12 {
                    return domain(format!(
                        "sector disk needs 2*sqrt(delta*epsilon) <= 1, got {c}"
                    ));
                }
                Ok(())
            }
            Region::ImaginaryAxis { .. } => Ok(()),
            Region::RealSegment { min, max } => {
                finite(*min, "segment end")?;
                finite(*max, "segment end")?;
                if min > max {
                    return domain(format!("segment needs min <= max, got [{min}, {max}]"));
                }
                Ok(())
            }
            Region::Scaled { tau, inner } => {
                if !(*tau > 0.0 && tau.is_finite()) {
                    return domain(format!("scale factor must be positive, got {tau}"));
                }
                inner.validate()
            }
            Region::Inverted { inner } | Region::Negated { inner } => inner.validate(),
            Region::HullOfCloud { points, pad } => {
                if points.is_empty() {
                    return domain("hull of an empty cloud");
                }
                if points.iter().any(|p| !(p.re.is_finite() && p.im.is_finite())) {
                    return domain("hull points must be finite");
                }
                if !(*pad >= 0.0 && pad.is_finite()) {
                    return domain(format!("pad must be nonnegative, got {pad}"));
                }
                Ok(())
            }
            Region::Union { members } => {
                if members.is_empty() {
                    return domain("union needs at least one member");
                }
                members.iter().try_for_each(Region::validate)
            }
        }
    }

    /// Membership with [`BOUNDARY_TOL`] slack; conjugate-symmetric by construction.
    pub fn contains(&self, z: Complex64) -> bool {
        if !(z.re.is_finite() && z.im.is_finite()) {
            return false;
        }
        let t = tol(z);
        match self {
            Region::Disk {
                center,
                radius,
                punctured,
            } => !(*punctured && z == Complex64::new(0.0, 0.0)) && (z - center).norm() <= radius + t,
            Region::HalfPlane {
                bound,
                side,
                punctured,
            } => {
                if *punctured && z == Complex64::new(0.0, 0.0) {
                    return false;
                }
                match side {
                    Side::Ge => z.re >= bound - t,
                    Side::Le => z.re <= bound + t,
                }
            }
            Region::SectorDisk { delta, epsilon } => {
                if z == Complex64::new(0.0, 0.0) {
                    return false;
                }
                let phi = sector_angle(*delta, *epsilon);
                z.norm() <= 1.0 / epsilon + t
                    && z.re >= delta - t
                    && z.im.abs() <= phi.tan() * z.re + t
            }
            Region::ImaginaryAxis { punctured } => {
                !(*punctured && z == Complex64::new(0.0, 0.0)) && z.re.abs() <= t
            }
            Region::RealSegment { min, max } => {
                z.im.abs() <= t && z.re >= min - t && z.re <= max + t
            }
            Region::Scaled { tau, inner } => inner.contains(z / tau),
            Region::Inverted { inner } => {
                z != Complex64::new(0.0, 0.0) && inner.contains(z.inv())
            }
            Region::Negated { inner } => inner.contains(-z),
            Region::HullOfCloud { points, pad } => points
                .iter()
                .any(|p| (z - p).norm() <= pad + t || (z - p.conj()).norm() <= pad + t),
            Region::Union { members } => members.iter().any(|m| m.contains(z)),
        }
    }

    /// True when the region contains the point at infinity, i.e. it is the
    /// inversion of a set containing 0. Such regions support membership only.
    pub fn is_extended(&self) -> bool {
        match self {
            Region::Inverted { inner } => inner.contains(Complex64::new(0.0, 0.0)) || inner.is_extended(),
            Region::Scaled { inner, .. } | Region::Negated { inner } => inner.is_extended(),
            Region::Union { members } => members.iter().any(Region::is_extended),
            _ => false,
        }
    }

    /// `sup |z|` over the region, `None` if unbounded.
    pub fn sup_modulus(&self) -> Option<f64> {
        match self {
            Region::Disk { center, radius, .. } => Some(center.abs() + radius),
            Region::HalfPlane { .. } | Region::ImaginaryAxis { .. } => None,
            Region::SectorDisk { epsilon, .. } => Some(1.0 / epsilon),
            Region::RealSegment { min, max } => Some(min.abs().max(max.abs())),
            Region::Scaled { tau, inner } => inner.sup_modulus().map(|m| tau * m),
            Region::Negated { inner } => inner.sup_modulus(),
            Region::Inverted { inner } => {
                let m = inner.inf_modulus();
                if m > 0.0 {
                    Some(1.0 / m)
                } else {
                    None
                }
            }
            Region::HullOfCloud { points, pad } => {
                Some(points.iter().fold(0.0_f64, |m, p| m.max(p.norm())) + pad)
            }
            Region::Union { members } => members
                .iter()
                .map(Region::sup_modulus)
                .try_fold(0.0_f64, |m, s| s.map(|s| m.max(s))),
        }
    }

    /// `inf |z|` over the region (the closure, punctures ignored).
    pub fn inf_modulus(&self) -> f64 {
        match self {
            Region::Disk { center, radius, .. } => (center.abs() - radius).max(0.0),
            Region::HalfPlane { bound, side, .. } => match side {
                Side::Ge => bound.max(0.0),
                Side::Le => (-bound).max(0.0),
            },
            Region::SectorDisk { delta, .. } => *delta,
            Region::ImaginaryAxis { .. } => 0.0,
            Region::RealSegment { min, max } => {
                if *min <= 0.0 && *max >= 0.0 {
                    0.0
                } else {
                    min.abs().min(max.abs())
                }
            }
            Region::Scaled { tau, inner } => tau * inner.inf_modulus(),
            Region::Negated { inner } => inner.inf_modulus(),
            Region::Inverted { inner } => inner.sup_modulus().map_or(0.0, |m| 1.0 / m),
            Region::HullOfCloud { points, pad } => points
                .iter()
                .map(|p| (p.norm() - pad).max(0.0))
                .fold(f64::INFINITY, f64::min),
            Region::Union { members } => members
                .iter()
                .map(Region::inf_modulus)
                .fold(f64::INFINITY, f64::min),
        }
    }

    /// Rough size used to choose sampling windows.
    pub(crate) fn scale_hint(&self) -> f64 {
        match self {
            Region::HalfPlane { bound, .. } => bound.abs(),
            Region::ImaginaryAxis { .. } => 0.0,
            Region::Scaled { tau, inner } => tau * inner.scale_hint(),
            Region::Negated { inner } => inner.scale_hint(),
            Region::Inverted { inner } => {
                let m = inner.inf_modulus();
                if m > 0.0 {
                    1.0 / m
                } else {
                    let s = inner.scale_hint();
                    if s > 0.0 {
                        1.0 / s
                    } else {
                        1.0
                    }
                }
            }
            Region::Union { members } => members.iter().map(Region::scale_hint).fold(0.0, f64::max),
            other => other.sup_modulus().unwrap_or(1.0),
        }
    }

    /// Intersection with the real axis for convex regions; `None` for regions
    /// that are not known to be convex.
    pub(crate) fn real_interval(&self) -> Option<(f64, f64)> {
        match self {
            Region::Disk { center, radius, .. } => Some((center - radius, center + radius)),
            Region::HalfPlane { bound, side, .. } => Some(match side {
                Side::Ge => (*bound, f64::INFINITY),
                Side::Le => (f64::NEG_INFINITY, *bound),
            }),
            Region::SectorDisk { delta, epsilon } => Some((*delta, 1.0 / epsilon)),
            Region::ImaginaryAxis { .. } => Some((0.0, 0.0)),
            Region::RealSegment { min, max } => Some((*min, *max)),
            Region::Scaled { tau, inner } => inner.real_interval().map(|(a, b)| (tau * a, tau * b)),
            Region::Negated { inner } => inner.real_interval().map(|(a, b)| (-b, -a)),
            _ => None,
        }
    }
}

/// Half-opening angle `arccos 2√(δε)` of the sector disk.
pub fn sector_angle(delta: f64, epsilon: f64) -> f64 {
    (2.0 * (delta * epsilon).sqrt()).min(1.0).acos()
}

/// `{τz : z ∈ region}` with closed-form simplification where available.
pub fn scale_region(region: &Region, tau: f64) -> Result<Region> {
    if !(tau > 0.0 && tau.is_finite()) {
        return domain(format!("scale factor must be positive, got {tau}"));
    }
    region.validate()?;
    Ok(scale_unchecked(region, tau))
}

fn scale_unchecked(region: &Region, tau: f64) -> Region {
    match region {
        Region::Disk {
            center,
            radius,
            punctured,
        } => Region::Disk {
            center: tau * center,
            radius: tau * radius,
            punctured: *punctured,
        },
        Region::HalfPlane {
            bound,
            side,
            punctured,
        } => Region::HalfPlane {
            bound: tau * bound,
            side: *side,
            punctured: *punctured,
        },
        Region::SectorDisk { delta, epsilon } => Region::SectorDisk {
            delta: tau * delta,
            epsilon: epsilon / tau,
        },
        Region::ImaginaryAxis { punctured } => Region::ImaginaryAxis {
            punctured: *punctured,
        },
        Region::RealSegment { min, max } => Region::RealSegment {
            min: tau * min,
            max: tau * max,
        },
        Region::Scaled { tau: t2, inner } => {
            if tau * t2 == 1.0 {
                (**inner).clone()
            } else {
                Region::Scaled {
                    tau: tau * t2,
                    inner: inner.clone(),
                }
            }
        }
        Region::Negated { inner } => Region::Negated {
            inner: Box::new(scale_unchecked(inner, tau)),
        },
        Region::HullOfCloud { points, pad } => Region::HullOfCloud {
            points: points.iter().map(|p| p * tau).collect(),
            pad: tau * pad,
        },
        Region::Union { members } => Region::Union {
            members: members.iter().map(|m| scale_unchecked(m, tau)).collect(),
        },
        Region::Inverted { .. } => Region::Scaled {
            tau,
            inner: Box::new(region.clone()),
        },
    }
}

/// `{1/z : z ∈ region, z ≠ 0}` with closed-form simplification where available.
///
/// When 0 lies only on the boundary of a disk or half-plane the image is a
/// half-plane or punctured set and the point at infinity is dropped. When 0 is
/// an interior point the result stays a lazy [`Region::Inverted`] that reports
/// [`Region::is_extended`].
pub fn invert_region(region: &Region) -> Result<Region> {
    region.validate()?;
    Ok(invert_unchecked(region))
}

fn invert_unchecked(region: &Region) -> Region {
    let lazy = || Region::Inverted {
        inner: Box::new(region.clone()),
    };
    match region {
        Region::Disk { center, radius, .. } => {
            let c = *center;
            let r = *radius;
            let gap = c * c - r * r;
            if c.abs() > r {
                Region::Disk {
                    center: c / gap,
                    radius: r / gap,
                    punctured: false,
                }
            } else if c.abs() == r && r > 0.0 {
                // 0 on the boundary: image is the half-plane through 1/(2c).
                Region::HalfPlane {
                    bound: 1.0 / (2.0 * c),
                    side: if c > 0.0 { Side::Ge } else { Side::Le },
                    punctured: false,
                }
            } else {
                lazy()
            }
        }
        Region::HalfPlane { bound, side, .. } => {
            let b = *bound;
            match (side, b) {
                (_, 0.0) => Region::HalfPlane {
                    bound: 0.0,
                    side: *side,
                    punctured: true,
                },
                (Side::Ge, b) if b > 0.0 => Region::Disk {
                    center: 1.0 / (2.0 * b),
                    radius: 1.0 / (2.0 * b),
                    punctured: true,
                },
                (Side::Le, b) if b < 0.0 => Region::Disk {
                    center: 1.0 / (2.0 * b),
                    radius: -1.0 / (2.0 * b),
                    punctured: true,
                },
                _ => lazy(),
            }
        }
        Region::ImaginaryAxis { .. } => Region::ImaginaryAxis { punctured: true },
        Region::RealSegment { min, max } if *min > 0.0 || *max < 0.0 => Region::RealSegment {
            min: 1.0 / max,
            max: 1.0 / min,
        },
        Region::Scaled { tau, inner } => scale_unchecked(&invert_unchecked(inner), 1.0 / tau),
        Region::Negated { inner } => negate_unchecked(&invert_unchecked(inner)),
        Region::Inverted { inner } => (**inner).clone(),
        Region::Union { members } => Region::Union {
            members: members.iter().map(invert_unchecked).collect(),
        },
        _ => lazy(),
    }
}

/// `{−z : z ∈ region}`.
pub fn negate_region(region: &Region) -> Result<Region> {
    region.validate()?;
    Ok(negate_unchecked(region))
}

fn negate_unchecked(region: &Region) -> Region {
    match region {
        Region::Disk {
            center,
            radius,
            punctured,
        } => Region::Disk {
            center: -center,
            radius: *radius,
            punctured: *punctured,
        },
        Region::HalfPlane {
            bound,
            side,
            punctured,
        } => Region::HalfPlane {
            bound: -bound,
            side: match side {
                Side::Ge => Side::Le,
                Side::Le => Side::Ge,
            },
            punctured: *punctured,
        },
        Region::ImaginaryAxis { punctured } => Region::ImaginaryAxis {
            punctured: *punctured,
        },
        Region::RealSegment { min, max } => Region::RealSegment {
            min: -max,
            max: -min,
        },
        Region::Negated { inner } => (**inner).clone(),
        Region::HullOfCloud { points, pad } => Region::HullOfCloud {
            points: points.iter().map(|p| -p.conj()).collect(),
            pad: *pad,
        },
        Region::Union { members } => Region::Union {
            members: members.iter().map(negate_unchecked).collect(),
        },
        _ => Region::Negated {
            inner: Box::new(region.clone()),
        },
    }
}
