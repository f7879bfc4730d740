//! Region-to-region and point-to-region distances.
//!
//! Convex conjugate-symmetric regions attain their distance on the real
//! axis: averaging a nearest pair with its conjugate pair stays inside both
//! sets and does not increase the distance. That reduces every convex pair to
//! a gap between two real intervals. Other pairs fall back to sampling the
//! boundaries with local zoom refinement.

use num_complex::Complex64;
use serde::Serialize;

use super::{sector_angle, Region};
use crate::error::{Error, Result};
use crate::sampler::SrgCloud;

/// Zoom levels allowed after the initial boundary sampling.
pub const DEFAULT_REFINEMENT: usize = 4;

const BOUNDARY_SAMPLES: usize = 256;
const CONVERGENCE_TOL: f64 = 1e-6;
const WINDOW_GROWTHS: usize = 4;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, serde::Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DistanceMethod {
    Analytic,
    SampledBoundary,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DistanceResult {
    pub value: f64,
    /// Witness in the first region.
    pub z1: Complex64,
    /// Witness in the second region.
    pub z2: Complex64,
    pub method: DistanceMethod,
    /// Zoom levels used (0 for analytic results).
    pub refinement: usize,
}

impl DistanceResult {
    fn analytic(z1: Complex64, z2: Complex64) -> Self {
        Self {
            value: (z1 - z2).norm(),
            z1,
            z2,
            method: DistanceMethod::Analytic,
            refinement: 0,
        }
    }

    fn swapped(self) -> Self {
        Self {
            z1: self.z2,
            z2: self.z1,
            ..self
        }
    }
}

fn re(x: f64) -> Complex64 {
    Complex64::new(x, 0.0)
}

/// `inf |z1 − z2|` over `z1 ∈ a`, `z2 ∈ b`, with witnesses.
pub fn region_distance(a: &Region, b: &Region, max_refinement: usize) -> Result<DistanceResult> {
    a.validate()?;
    b.validate()?;
    if a.is_extended() || b.is_extended() {
        return Err(Error::Indeterminate(
            "region contains the point at infinity; distance is undefined".into(),
        ));
    }
    distance_inner(a, b, max_refinement)
}

fn distance_inner(a: &Region, b: &Region, max_refinement: usize) -> Result<DistanceResult> {
    if let Region::Union { members } = a {
        return min_over(members.iter().map(|m| distance_inner(m, b, max_refinement)));
    }
    if let Region::Union { members } = b {
        return min_over(members.iter().map(|m| distance_inner(a, m, max_refinement)));
    }
    if let (Some(ia), Some(ib)) = (a.real_interval(), b.real_interval()) {
        return Ok(interval_distance(ia, ib));
    }
    if let Some(r) = hull_distance(a, b) {
        return Ok(r);
    }
    if let Some(r) = hull_distance(b, a) {
        return Ok(r.swapped());
    }
    sampled_region_distance(a, b, max_refinement)
}

fn min_over(results: impl Iterator<Item = Result<DistanceResult>>) -> Result<DistanceResult> {
    let mut best: Option<DistanceResult> = None;
    for r in results {
        let r = r?;
        if best.is_none_or(|b| r.value < b.value) {
            best = Some(r);
        }
    }
    best.ok_or_else(|| Error::Domain("empty union".into()))
}

fn interval_distance((a0, a1): (f64, f64), (b0, b1): (f64, f64)) -> DistanceResult {
    if a0 > b1 {
        DistanceResult::analytic(re(a0), re(b1))
    } else if b0 > a1 {
        DistanceResult::analytic(re(a1), re(b0))
    } else {
        let lo = a0.max(b0);
        let hi = a1.min(b1);
        let w = if lo.is_finite() {
            lo
        } else if hi.is_finite() {
            hi
        } else {
            0.0
        };
        DistanceResult::analytic(re(w), re(w))
    }
}

/// Hull of points against a region with closed-form point distances.
fn hull_distance(hull: &Region, other: &Region) -> Option<DistanceResult> {
    let Region::HullOfCloud { points, pad } = hull else {
        return None;
    };
    let mut best: Option<(f64, Complex64, Complex64)> = None;
    for p in points {
        let (d, w) = point_distance(other, *p)?;
        if best.is_none_or(|b| d < b.0) {
            best = Some((d, *p, w));
        }
    }
    let (d, p, w) = best?;
    let z1 = if d <= *pad {
        w
    } else {
        p + (w - p) * (pad / d)
    };
    Some(DistanceResult::analytic(z1, w))
}

/// Closed-form distance from `z` to `region` and the nearest point, where known.
pub(crate) fn point_distance(region: &Region, z: Complex64) -> Option<(f64, Complex64)> {
    if region.contains(z) {
        return Some((0.0, z));
    }
    match region {
        Region::Disk { center, radius, .. } => {
            let c = re(*center);
            let d = (z - c).norm();
            if d <= *radius {
                Some((0.0, z))
            } else {
                Some((d - radius, c + (z - c) * (radius / d)))
            }
        }
        Region::HalfPlane { bound, side, .. } => {
            let x = match side {
                super::Side::Ge => z.re.max(*bound),
                super::Side::Le => z.re.min(*bound),
            };
            Some(((x - z.re).abs(), Complex64::new(x, z.im)))
        }
        Region::ImaginaryAxis { .. } => Some((z.re.abs(), Complex64::new(0.0, z.im))),
        Region::RealSegment { min, max } => {
            let w = re(z.re.clamp(*min, *max));
            Some(((z - w).norm(), w))
        }
        Region::SectorDisk { delta, epsilon } => Some(sector_point_distance(*delta, *epsilon, z)),
        Region::Scaled { tau, inner } => {
            point_distance(inner, z / tau).map(|(d, w)| (tau * d, w * tau))
        }
        Region::Negated { inner } => point_distance(inner, -z).map(|(d, w)| (d, -w)),
        Region::HullOfCloud { points, pad } => {
            let mut best = (f64::INFINITY, z);
            for p in points.iter().flat_map(|p| [*p, p.conj()]) {
                let d = (z - p).norm();
                let (dd, w) = if d <= *pad {
                    (0.0, z)
                } else {
                    (d - pad, p + (z - p) * (pad / d))
                };
                if dd < best.0 {
                    best = (dd, w);
                }
            }
            Some(best)
        }
        Region::Union { members } => {
            let mut best: Option<(f64, Complex64)> = None;
            for m in members {
                let r = point_distance(m, z)?;
                if best.is_none_or(|b| r.0 < b.0) {
                    best = Some(r);
                }
            }
            best
        }
        Region::Inverted { .. } => None,
    }
}

fn project_segment(z: Complex64, p0: Complex64, p1: Complex64) -> Complex64 {
    let d = p1 - p0;
    let len2 = d.norm_sqr();
    if len2 == 0.0 {
        return p0;
    }
    let t = (((z - p0) * d.conj()).re / len2).clamp(0.0, 1.0);
    p0 + d * t
}

fn sector_point_distance(delta: f64, epsilon: f64, z: Complex64) -> (f64, Complex64) {
    let phi = sector_angle(delta, epsilon);
    let rmax = 1.0 / epsilon;
    let candidates: Vec<Complex64> = if phi == 0.0 {
        vec![project_segment(z, re(delta), re(rmax))]
    } else {
        let h = delta * phi.tan();
        let r0 = delta / phi.cos();
        let arc_angle = z.arg().clamp(-phi, phi);
        vec![
            project_segment(z, Complex64::new(delta, -h), Complex64::new(delta, h)),
            project_segment(
                z,
                Complex64::from_polar(r0, phi),
                Complex64::from_polar(rmax, phi),
            ),
            project_segment(
                z,
                Complex64::from_polar(r0, -phi),
                Complex64::from_polar(rmax, -phi),
            ),
            Complex64::from_polar(rmax, arc_angle),
        ]
    };
    candidates
        .into_iter()
        .map(|w| ((z - w).norm(), w))
        .fold((f64::INFINITY, z), |b, c| if c.0 < b.0 { c } else { b })
}

/// Distance from a point to a region, falling back to boundary sampling.
pub fn point_region_distance(
    region: &Region,
    z: Complex64,
    max_refinement: usize,
) -> Result<(f64, Complex64)> {
    if region.is_extended() {
        return Err(Error::Indeterminate(
            "region contains the point at infinity; distance is undefined".into(),
        ));
    }
    if let Some(r) = point_distance(region, z) {
        return Ok(r);
    }
    let probe = Region::HullOfCloud {
        points: vec![z],
        pad: 0.0,
    };
    let r = sampled_region_distance(&probe, region, max_refinement)?;
    Ok((r.value, r.z2))
}

#[derive(Debug, Clone, Serialize)]
pub struct ContainmentReport {
    pub points_total: usize,
    pub points_inside: usize,
    pub fraction_inside: f64,
    /// Largest distance from an outside point to the region; 0 when all inside.
    pub worst_violation_distance: f64,
    /// Pairs owning at least one outside point, ascending.
    pub violating_pair_ids: Vec<usize>,
}

/// Tally of cloud points inside `region`.
pub fn containment_report(cloud: &SrgCloud, region: &Region) -> Result<ContainmentReport> {
    region.validate()?;
    if cloud.is_empty() {
        return Err(Error::EmptyCloud("containment of an empty cloud".into()));
    }
    let mut inside = 0;
    let mut worst: f64 = 0.0;
    let mut violators = Vec::new();
    for p in &cloud.points {
        let z = p.z();
        if region.contains(z) {
            inside += 1;
        } else {
            let (d, _) = point_region_distance(region, z, DEFAULT_REFINEMENT)?;
            worst = worst.max(d);
            violators.push(p.pair_id);
        }
    }
    violators.sort_unstable();
    violators.dedup();
    Ok(ContainmentReport {
        points_total: cloud.len(),
        points_inside: inside,
        fraction_inside: inside as f64 / cloud.len() as f64,
        worst_violation_distance: worst,
        violating_pair_ids: violators,
    })
}

// ---------------------------------------------------------------------------
// Boundary sampling

#[derive(Debug, Clone)]
pub(crate) enum Map {
    Scale(f64),
    Negate,
    Invert,
}

/// Parametric boundary piece over `s ∈ [0, 1]`.
#[derive(Debug, Clone)]
pub(crate) enum Curve {
    Arc {
        center: Complex64,
        radius: f64,
        a0: f64,
        a1: f64,
    },
    Segment(Complex64, Complex64),
    /// Vertical line `Re z = x`, `Im z = window·(2s − 1)³`: dense near the
    /// real axis, where nearest points of symmetric regions sit.
    Line { x: f64, window: f64 },
    Point(Complex64),
    Mapped(Box<Curve>, Vec<Map>),
}

impl Curve {
    pub(crate) fn eval(&self, s: f64) -> Complex64 {
        match self {
            Curve::Arc {
                center,
                radius,
                a0,
                a1,
            } => center + Complex64::from_polar(*radius, a0 + (a1 - a0) * s),
            Curve::Segment(p0, p1) => p0 + (p1 - p0) * s,
            Curve::Line { x, window } => {
                let u = 2.0 * s - 1.0;
                Complex64::new(*x, window * u * u * u)
            }
            Curve::Point(p) => *p,
            Curve::Mapped(inner, maps) => maps.iter().fold(inner.eval(s), |z, m| match m {
                Map::Scale(t) => z * t,
                Map::Negate => -z,
                Map::Invert => z.inv(),
            }),
        }
    }

    /// Full circles may be evaluated outside `[0, 1]`.
    fn is_closed(&self) -> bool {
        match self {
            Curve::Arc { a0, a1, .. } => (a1 - a0).abs() >= std::f64::consts::TAU,
            Curve::Mapped(inner, _) => inner.is_closed(),
            _ => false,
        }
    }

    fn is_point(&self) -> bool {
        match self {
            Curve::Point(_) => true,
            Curve::Mapped(inner, _) => inner.is_point(),
            _ => false,
        }
    }

    fn mapped(self, m: Map) -> Curve {
        match self {
            Curve::Mapped(inner, mut maps) => {
                maps.push(m);
                Curve::Mapped(inner, maps)
            }
            other => Curve::Mapped(Box::new(other), vec![m]),
        }
    }
}

/// Boundary pieces covering both conjugate branches; unbounded pieces are
/// clipped to `|Im z| ≤ window`.
pub(crate) fn boundary_curves(region: &Region, window: f64) -> Vec<Curve> {
    use std::f64::consts::TAU;
    match region {
        Region::Disk { center, radius, .. } => {
            if *radius == 0.0 {
                vec![Curve::Point(re(*center))]
            } else {
                vec![Curve::Arc {
                    center: re(*center),
                    radius: *radius,
                    a0: 0.0,
                    a1: TAU,
                }]
            }
        }
        Region::HalfPlane { bound, .. } => vec![Curve::Line { x: *bound, window }],
        Region::ImaginaryAxis { .. } => vec![Curve::Line { x: 0.0, window }],
        Region::RealSegment { min, max } => vec![Curve::Segment(re(*min), re(*max))],
        Region::SectorDisk { delta, epsilon } => {
            let phi = sector_angle(*delta, *epsilon);
            let rmax = 1.0 / epsilon;
            if phi == 0.0 {
                return vec![Curve::Segment(re(*delta), re(rmax))];
            }
            let h = delta * phi.tan();
            let r0 = delta / phi.cos();
            vec![
                Curve::Segment(Complex64::new(*delta, -h), Complex64::new(*delta, h)),
                Curve::Segment(
                    Complex64::from_polar(r0, phi),
                    Complex64::from_polar(rmax, phi),
                ),
                Curve::Segment(
                    Complex64::from_polar(r0, -phi),
                    Complex64::from_polar(rmax, -phi),
                ),
                Curve::Arc {
                    center: re(0.0),
                    radius: rmax,
                    a0: -phi,
                    a1: phi,
                },
            ]
        }
        Region::Scaled { tau, inner } => boundary_curves(inner, window / tau)
            .into_iter()
            .map(|c| c.mapped(Map::Scale(*tau)))
            .collect(),
        Region::Negated { inner } => boundary_curves(inner, window)
            .into_iter()
            .map(|c| c.mapped(Map::Negate))
            .collect(),
        Region::Inverted { inner } => boundary_curves(inner, window)
            .into_iter()
            .map(|c| c.mapped(Map::Invert))
            .collect(),
        Region::HullOfCloud { points, pad } => points
            .iter()
            .flat_map(|p| {
                let branches = if p.im == 0.0 { vec![*p] } else { vec![*p, p.conj()] };
                branches.into_iter().map(|q| {
                    if *pad > 0.0 {
                        Curve::Arc {
                            center: q,
                            radius: *pad,
                            a0: 0.0,
                            a1: TAU,
                        }
                    } else {
                        Curve::Point(q)
                    }
                })
            })
            .collect(),
        Region::Union { members } => members
            .iter()
            .flat_map(|m| boundary_curves(m, window))
            .collect(),
    }
}

struct Sampled {
    z: Complex64,
    curve: usize,
    s: f64,
}

fn sample_curves(curves: &[Curve], ranges: &[(f64, f64)], n: usize) -> Vec<Sampled> {
    let mut out = Vec::new();
    for (i, (c, (lo, hi))) in curves.iter().zip(ranges).enumerate() {
        if c.is_point() {
            out.push(Sampled {
                z: c.eval(0.0),
                curve: i,
                s: 0.0,
            });
            continue;
        }
        for k in 0..n {
            let s = lo + (hi - lo) * k as f64 / (n - 1) as f64;
            let z = c.eval(s);
            if z.re.is_finite() && z.im.is_finite() {
                out.push(Sampled { z, curve: i, s });
            }
        }
    }
    out
}

/// Closest sampled pair for one combination of boundary pieces.
#[derive(Clone, Copy)]
struct Candidate {
    d: f64,
    za: Complex64,
    zb: Complex64,
    ca: usize,
    sa: f64,
    cb: usize,
    sb: f64,
}

/// Boundary pieces refined independently per sampling pass.
const ZOOM_CANDIDATES: usize = 8;

fn overlap_point(a: &Region, b: &Region, pa: &[Sampled], pb: &[Sampled]) -> Option<Complex64> {
    pa.iter()
        .find(|p| b.contains(p.z))
        .or_else(|| pb.iter().find(|q| a.contains(q.z)))
        .map(|p| p.z)
}

/// Best pair for every (piece of a, piece of b) combination, closest first.
fn candidates(pa: &[Sampled], pb: &[Sampled], nb: usize) -> Vec<Candidate> {
    let mut best: std::collections::BTreeMap<usize, Candidate> = Default::default();
    for p in pa {
        for q in pb {
            let d = (p.z - q.z).norm();
            let key = p.curve * nb + q.curve;
            let entry = best.entry(key).or_insert(Candidate {
                d: f64::INFINITY,
                za: p.z,
                zb: q.z,
                ca: p.curve,
                sa: p.s,
                cb: q.curve,
                sb: q.s,
            });
            if d < entry.d {
                *entry = Candidate {
                    d,
                    za: p.z,
                    zb: q.z,
                    ca: p.curve,
                    sa: p.s,
                    cb: q.curve,
                    sb: q.s,
                };
            }
        }
    }
    let mut out: Vec<Candidate> = best.into_values().collect();
    out.sort_by(|x, y| x.d.total_cmp(&y.d).then(x.ca.cmp(&y.ca)).then(x.cb.cmp(&y.cb)));
    out
}

fn zoom_range(c: &Curve, s: f64, h: f64) -> (f64, f64) {
    if c.is_closed() {
        (s - h, s + h)
    } else {
        ((s - h).max(0.0), (s + h).min(1.0))
    }
}

enum Zoomed {
    Overlap(Complex64, usize),
    Converged(Candidate, usize),
    Unconverged(Candidate),
}

fn zoom(
    a: &Region,
    b: &Region,
    ca: &Curve,
    cb: &Curve,
    mut cand: Candidate,
    max_refinement: usize,
) -> Zoomed {
    let n = BOUNDARY_SAMPLES;
    // Half-width in curve parameter; starts at 8 coarse steps so the search
    // can slide along shallow valleys.
    let mut h = 16.0 / (n - 1) as f64;
    for level in 1..=max_refinement {
        let ra = zoom_range(ca, cand.sa, h);
        let rb = zoom_range(cb, cand.sb, h);
        let sa = sample_curves(std::slice::from_ref(ca), &[ra], n);
        let sb = sample_curves(std::slice::from_ref(cb), &[rb], n);
        if let Some(z) = overlap_point(a, b, &sa, &sb) {
            return Zoomed::Overlap(z, level);
        }
        let prev = cand.d;
        if let Some(best) = candidates(&sa, &sb, 1).first() {
            if best.d < cand.d {
                cand = Candidate {
                    ca: cand.ca,
                    cb: cand.cb,
                    ..*best
                };
            }
        }
        let step = 2.0 * h / (n - 1) as f64;
        let on_edge = |c: &Curve, r: (f64, f64), s: f64| {
            let lo = r.0 > 0.0 || c.is_closed();
            let hi = r.1 < 1.0 || c.is_closed();
            (lo && s - r.0 < 0.5 * step) || (hi && r.1 - s < 0.5 * step)
        };
        if on_edge(ca, ra, cand.sa) || on_edge(cb, rb, cand.sb) {
            // Minimum lies beyond the window: recentre without shrinking.
            continue;
        }
        h = 8.0 * step;
        if (prev - cand.d).abs() < CONVERGENCE_TOL {
            return Zoomed::Converged(cand, level);
        }
    }
    Zoomed::Unconverged(cand)
}

/// Boundary sampling at a fixed window.
fn sampled_at_window(
    a: &Region,
    b: &Region,
    window: f64,
    max_refinement: usize,
) -> Result<DistanceResult> {
    let n = BOUNDARY_SAMPLES;
    let ca = boundary_curves(a, window);
    let cb = boundary_curves(b, window);
    let full = |c: &[Curve]| vec![(0.0, 1.0); c.len()];
    let pa = sample_curves(&ca, &full(&ca), n);
    let pb = sample_curves(&cb, &full(&cb), n);
    if pa.is_empty() || pb.is_empty() {
        return Err(Error::Indeterminate("regions have no sampled boundary".into()));
    }
    let sampled = |z1: Complex64, z2: Complex64, level: usize| DistanceResult {
        value: (z1 - z2).norm(),
        z1,
        z2,
        method: DistanceMethod::SampledBoundary,
        refinement: level,
    };
    if let Some(z) = overlap_point(a, b, &pa, &pb) {
        return Ok(sampled(z, z, 0));
    }
    let mut best: Option<(Candidate, usize, bool)> = None;
    for cand in candidates(&pa, &pb, cb.len()).into_iter().take(ZOOM_CANDIDATES) {
        let (c, level, converged) = match zoom(a, b, &ca[cand.ca], &cb[cand.cb], cand, max_refinement) {
            Zoomed::Overlap(z, level) => return Ok(sampled(z, z, level)),
            Zoomed::Converged(c, level) => (c, level, true),
            Zoomed::Unconverged(c) => (c, max_refinement, false),
        };
        if best.is_none_or(|(b, _, _)| c.d < b.d) {
            best = Some((c, level, converged));
        }
    }
    let (c, level, converged) = best.expect("at least one candidate");
    if !converged {
        return Err(Error::Indeterminate(format!(
            "boundary sampling did not converge within {max_refinement} refinement levels (last estimate {:e})",
            c.d
        )));
    }
    Ok(sampled(c.za, c.zb, level))
}

/// Distance by boundary sampling alone (no closed forms).
///
/// Starts from 256 samples per boundary piece, then zooms around the closest
/// pair until successive estimates differ by less than 1e-6. Unbounded
/// boundaries are clipped to a window that grows fourfold until the estimate
/// stabilizes; failure to stabilize is reported as indeterminate.
pub fn sampled_region_distance(
    a: &Region,
    b: &Region,
    max_refinement: usize,
) -> Result<DistanceResult> {
    a.validate()?;
    b.validate()?;
    if a.is_extended() || b.is_extended() {
        return Err(Error::Indeterminate(
            "region contains the point at infinity; distance is undefined".into(),
        ));
    }
    let mut window = 8.0 * a.scale_hint().max(b.scale_hint()).max(1.0);
    let bounded = a.sup_modulus().is_some() && b.sup_modulus().is_some();
    let mut r = sampled_at_window(a, b, window, max_refinement)?;
    if bounded || r.value == 0.0 {
        return Ok(r);
    }
    for _ in 0..WINDOW_GROWTHS {
        window *= 4.0;
        let next = sampled_at_window(a, b, window, max_refinement)?;
        let stable = (next.value - r.value).abs() < CONVERGENCE_TOL;
        r = next;
        if stable {
            return Ok(r);
        }
    }
    Err(Error::Indeterminate(format!(
        "distance between unbounded regions did not stabilize up to window {window:e}"
    )))
}

#[cfg(test)]
mod tests {
    use super::super::{invert_region, negate_region, scale_region, Side};
    use super::*;
    use proptest::prelude::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn dist(a: &Region, b: &Region) -> DistanceResult {
        region_distance(a, b, DEFAULT_REFINEMENT).unwrap()
    }

    #[test]
    fn disk_to_half_plane() {
        let r = dist(
            &Region::disk(0.0, 1.0).unwrap(),
            &Region::half_plane(3.0, Side::Ge).unwrap(),
        );
        assert_eq!(r.value, 2.0);
        assert_eq!((r.z1, r.z2), (c(1.0, 0.0), c(3.0, 0.0)));
        assert_eq!(r.method, DistanceMethod::Analytic);
    }

    #[test]
    fn sector_disk_to_left_half_plane() {
        let d = Region::sector_disk(0.25, 0.25).unwrap();
        let lhp = Region::half_plane(0.0, Side::Le).unwrap();
        let analytic = dist(&d, &lhp);
        assert!((analytic.value - 0.25).abs() < 1e-12);
        let sampled = sampled_region_distance(&d, &lhp, DEFAULT_REFINEMENT).unwrap();
        assert_eq!(sampled.method, DistanceMethod::SampledBoundary);
        assert!((sampled.value - 0.25).abs() < 1e-4, "{}", sampled.value);
    }

    #[test]
    fn sector_disk_to_right_half_plane() {
        let d = Region::sector_disk(0.2, 0.4).unwrap();
        assert_eq!(dist(&d, &Region::half_plane(2.0, Side::Ge).unwrap()).value, 0.0);
        let r = dist(&d, &Region::half_plane(3.0, Side::Ge).unwrap());
        assert!((r.value - 0.5).abs() < 1e-12);
    }

    #[test]
    fn overlapping_disks() {
        let a = Region::disk(0.0, 2.0).unwrap();
        let b = Region::disk(1.0, 1.0).unwrap();
        let r = dist(&a, &b);
        assert_eq!(r.value, 0.0);
        assert!(a.contains(r.z1) && b.contains(r.z2));
    }

    #[test]
    fn extended_region_is_indeterminate() {
        let ext = invert_region(&Region::disk(0.0, 1.0).unwrap()).unwrap();
        let err = region_distance(&ext, &Region::disk(5.0, 1.0).unwrap(), 4).unwrap_err();
        assert!(matches!(err, Error::Indeterminate(_)));
        assert!(point_region_distance(&ext, c(0.1, 0.0), 4).is_err());
    }

    #[test]
    fn inverted_sector_uses_sampling() {
        let inv = invert_region(&Region::sector_disk(0.25, 0.25).unwrap()).unwrap();
        let lhp = Region::half_plane(0.0, Side::Le).unwrap();
        // Re(1/z) = cos θ / r is smallest at the corner r = 1/ε, θ = φ of D,
        // where it equals ε·cos φ = ε·2√(δε) = 0.125.
        let r = dist(&inv, &lhp);
        assert_eq!(r.method, DistanceMethod::SampledBoundary);
        assert!((r.value - 0.125).abs() < 1e-4, "{}", r.value);
        assert!((r.value - (r.z1 - r.z2).norm()).abs() < 1e-12);
    }

    #[test]
    fn unbounded_pair_without_closed_form() {
        // −1/D lies in Re z ≤ −ε·2√(δε), touching it at the image of D's corner.
        let (delta, eps) = (0.2, 0.4);
        let a = negate_region(&Region::Inverted {
            inner: Box::new(Region::sector_disk(delta, eps).unwrap()),
        })
        .unwrap();
        let b = Region::half_plane(1.0, Side::Ge).unwrap();
        let r = dist(&a, &b);
        let want = 1.0 + eps * 2.0 * f64::sqrt(delta * eps);
        assert!((r.value - want).abs() < 1e-4, "{} vs {want}", r.value);
    }

    #[test]
    fn hull_distances() {
        let hull = Region::HullOfCloud {
            points: vec![c(0.0, 2.0), c(3.0, 0.0)],
            pad: 0.5,
        };
        let r = dist(&hull, &Region::half_plane(-1.0, Side::Le).unwrap());
        assert!((r.value - 0.5).abs() < 1e-12);
        assert!((r.value - (r.z1 - r.z2).norm()).abs() < 1e-12);
        let (d, w) = point_region_distance(&Region::sector_disk(0.25, 0.25).unwrap(), c(-1.0, 0.0), 4)
            .unwrap();
        assert!((d - 1.25).abs() < 1e-12);
        assert_eq!(w, c(0.25, 0.0));
    }

    #[test]
    fn point_distance_matches_sampling() {
        let regions = [
            Region::sector_disk(0.2, 0.4).unwrap(),
            Region::disk(1.0, 0.5).unwrap(),
            Region::real_segment(-1.0, 2.0).unwrap(),
        ];
        for r in &regions {
            for z in [c(3.0, 3.0), c(-2.0, 0.5), c(0.1, 2.5), c(5.0, 0.0)] {
                let (d, w) = point_distance(r, z).unwrap();
                let probe = Region::HullOfCloud {
                    points: vec![z],
                    pad: 0.0,
                };
                let s = sampled_region_distance(&probe, r, DEFAULT_REFINEMENT).unwrap();
                assert!((d - s.value).abs() < 1e-4, "{r:?} {z}: {d} vs {}", s.value);
                assert!((d - (z - w).norm()).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn containment_of_points() {
        use crate::sampler::{SrgCloud, SrgKind, SrgPoint};
        let pts = [(1.0, 0.2, 0), (0.1, 1.5, 1), (2.0, 0.0, 2)]
            .iter()
            .map(|(m, a, id)| SrgPoint {
                magnitude: *m,
                angle: *a,
                kind: SrgKind::Hard,
                horizon_t: Some(1.0),
                pair_id: *id,
            })
            .collect();
        let cloud = SrgCloud::from_points(SrgKind::Hard, pts).unwrap();
        let rhp = Region::half_plane(0.0, Side::Ge).unwrap();
        let rep = containment_report(&cloud, &rhp).unwrap();
        assert!((rep.fraction_inside - 1.0).abs() < 1e-15);
        let axis = Region::imaginary_axis(true);
        let rep = containment_report(&cloud, &axis).unwrap();
        assert!(rep.fraction_inside < 1.0);
        assert_eq!(rep.violating_pair_ids, vec![0, 1, 2]);
        assert!((rep.worst_violation_distance - 2.0).abs() < 1e-12);
    }

    fn convex_region() -> impl Strategy<Value = Region> {
        prop_oneof![
            (-3.0f64..3.0, 0.0f64..2.0).prop_map(|(c, r)| Region::disk(c, r).unwrap()),
            (-3.0f64..3.0, any::<bool>()).prop_map(|(b, ge)| Region::half_plane(
                b,
                if ge { Side::Ge } else { Side::Le }
            )
            .unwrap()),
            (0.05f64..1.0, 0.05f64..1.0)
                .prop_map(|(d, k)| Region::sector_disk(d, k / (4.0 * d)).unwrap()),
            (-3.0f64..3.0, 0.0f64..2.0).prop_map(|(a, l)| Region::real_segment(a, a + l).unwrap()),
        ]
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]

        #[test]
        fn symmetric(a in convex_region(), b in convex_region()) {
            let ab = dist(&a, &b).value;
            let ba = dist(&b, &a).value;
            prop_assert!((ab - ba).abs() <= 1e-9);
        }

        #[test]
        fn witnesses_are_members(a in convex_region(), b in convex_region()) {
            let r = dist(&a, &b);
            prop_assert!((r.value - (r.z1 - r.z2).norm()).abs() <= 1e-12);
            prop_assert!(point_distance(&a, r.z1).unwrap().0 <= 1e-9);
            prop_assert!(point_distance(&b, r.z2).unwrap().0 <= 1e-9);
        }

        #[test]
        fn larger_disk_is_no_farther(
            c0 in -3.0f64..3.0, r0 in 0.0f64..1.0, grow in 0.0f64..1.0, b in convex_region()
        ) {
            let small = dist(&Region::disk(c0, r0).unwrap(), &b).value;
            let large = dist(&Region::disk(c0, r0 + grow).unwrap(), &b).value;
            prop_assert!(large <= small + 1e-12);
        }

        #[test]
        fn analytic_agrees_with_sampling(a in convex_region(), b in convex_region()) {
            let exact = dist(&a, &b).value;
            match sampled_region_distance(&a, &b, DEFAULT_REFINEMENT) {
                Ok(s) => prop_assert!((exact - s.value).abs() <= 1e-4, "{exact} vs {}", s.value),
                // Parallel unbounded boundaries may fail to stabilize; never a silent 0.
                Err(Error::Indeterminate(_)) => prop_assert!(exact > 0.0 || a.sup_modulus().is_none()),
                Err(e) => return Err(TestCaseError::fail(e.to_string())),
            }
        }

        #[test]
        fn scaling_law_for_disks(c0 in -3.0f64..3.0, r0 in 0.0f64..1.0, tau in 0.05f64..1.0) {
            let p = Region::disk(0.0, 0.3).unwrap();
            let inv = Region::disk(c0, r0).unwrap();
            let scaled = scale_region(&inv, 1.0 / tau).unwrap();
            let want = ((c0 / tau).abs() - r0 / tau - 0.3).max(0.0);
            prop_assert!((dist(&p, &scaled).value - want).abs() <= 1e-9);
        }
    }
}
