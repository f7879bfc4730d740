//! Point-cloud estimates of soft and hard SRGs.
//!
//! Points are stored in polar form with the angle in `[0, π]`; the conjugate
//! point is implied.

mod excitation;

pub use excitation::{
    AmplitudeRange, ExcitationConfig, InputShaping, SignalFamily, Support, EXPONENTIAL_RATES,
};

use std::io::Write;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{domain, Error, Result};
use crate::operators::OperatorSpec;
use crate::signal::{gain_phase, gain_phase_t, tail_energy_fraction, GainPhasePair, SampledSignal};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SrgKind {
    Soft,
    Hard,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SrgPoint {
    pub magnitude: f64,
    pub angle: f64,
    pub kind: SrgKind,
    /// Truncation horizon; hard points only.
    pub horizon_t: Option<f64>,
    pub pair_id: usize,
}

impl SrgPoint {
    /// Upper-half-plane representative `γ·e^{jθ}`.
    pub fn z(&self) -> Complex64 {
        Complex64::from_polar(self.magnitude, self.angle)
    }

    fn from_pair(gp: GainPhasePair, kind: SrgKind, horizon_t: Option<f64>, pair_id: usize) -> Self {
        Self {
            magnitude: gp.gain,
            angle: gp.phase,
            kind,
            horizon_t,
            pair_id,
        }
    }
}

/// Why a trajectory pair produced no point.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct RejectionCounts {
    pub zero_input_increment: usize,
    pub zero_output_increment: usize,
    pub input_tail_energy: usize,
    pub output_tail_energy: usize,
    pub non_finite_output: usize,
}

impl RejectionCounts {
    pub fn total(&self) -> usize {
        self.zero_input_increment
            + self.zero_output_increment
            + self.input_tail_energy
            + self.output_tail_energy
            + self.non_finite_output
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct AdmissionStats {
    pub pairs_tried: usize,
    pub pairs_admitted: usize,
    pub rejected: RejectionCounts,
    /// Hard sampling only: (pair, T) combinations skipped because an
    /// increment vanished on `[0, T]`.
    pub truncations_skipped: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SrgCloud {
    pub kind: SrgKind,
    pub points: Vec<SrgPoint>,
    pub config_digest: String,
    pub stats: AdmissionStats,
}

impl SrgCloud {
    /// Cloud built directly from points, e.g. for tests or imported data.
    pub fn from_points(kind: SrgKind, points: Vec<SrgPoint>) -> Result<Self> {
        if let Some(p) = points.iter().find(|p| p.kind != kind) {
            return Err(Error::KindMismatch(format!(
                "point from pair {} is {:?} in a {kind:?} cloud",
                p.pair_id, p.kind
            )));
        }
        for p in &points {
            if !(p.magnitude > 0.0 && p.magnitude.is_finite()) {
                return domain(format!("point magnitude must be positive and finite, got {}", p.magnitude));
            }
            if !(0.0..=std::f64::consts::PI).contains(&p.angle) {
                return domain(format!("point angle must lie in [0, pi], got {}", p.angle));
            }
        }
        Ok(Self {
            kind,
            points,
            config_digest: String::new(),
            stats: AdmissionStats::default(),
        })
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    /// `sup |z|` over the cloud.
    pub fn max_magnitude(&self) -> f64 {
        self.points.iter().fold(0.0, |m, p| m.max(p.magnitude))
    }

    pub fn to_json(&self) -> Result<String> {
        let doc = CloudDoc {
            kind: self.kind,
            conjugate_symmetric: true,
            config_digest: self.config_digest.clone(),
            stats: self.stats.clone(),
            points: self.points.iter().map(PointDoc::from).collect(),
        };
        Ok(serde_json::to_string_pretty(&doc)?)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let doc: CloudDoc = serde_json::from_str(text)?;
        let points = doc
            .points
            .into_iter()
            .map(|p| SrgPoint {
                magnitude: p.magnitude,
                angle: p.angle,
                kind: p.kind,
                horizon_t: p.t,
                pair_id: p.pair_id,
            })
            .collect();
        let mut cloud = SrgCloud::from_points(doc.kind, points)?;
        cloud.config_digest = doc.config_digest;
        cloud.stats = doc.stats;
        Ok(cloud)
    }

    /// Columns `re,im,magnitude,angle,kind,T,pair_id`; `T` is empty for soft points.
    pub fn write_csv<W: Write>(&self, writer: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(writer);
        w.write_record(["re", "im", "magnitude", "angle", "kind", "T", "pair_id"])?;
        for p in &self.points {
            let z = p.z();
            w.write_record([
                format!("{:e}", z.re),
                format!("{:e}", z.im),
                format!("{:e}", p.magnitude),
                format!("{:e}", p.angle),
                kind_name(p.kind).to_string(),
                p.horizon_t.map(|t| format!("{t:e}")).unwrap_or_default(),
                p.pair_id.to_string(),
            ])?;
        }
        w.flush()?;
        Ok(())
    }
}

fn kind_name(kind: SrgKind) -> &'static str {
    match kind {
        SrgKind::Soft => "soft",
        SrgKind::Hard => "hard",
    }
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct CloudDoc {
    kind: SrgKind,
    conjugate_symmetric: bool,
    config_digest: String,
    stats: AdmissionStats,
    points: Vec<PointDoc>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct PointDoc {
    re: f64,
    im: f64,
    magnitude: f64,
    angle: f64,
    kind: SrgKind,
    #[serde(rename = "T")]
    t: Option<f64>,
    pair_id: usize,
}

impl From<&SrgPoint> for PointDoc {
    fn from(p: &SrgPoint) -> Self {
        let z = p.z();
        Self {
            re: z.re,
            im: z.im,
            magnitude: p.magnitude,
            angle: p.angle,
            kind: p.kind,
            t: p.horizon_t,
            pair_id: p.pair_id,
        }
    }
}

/// Input/output increments of one trajectory pair.
#[derive(Debug, Clone)]
pub struct PairIncrements {
    pub u1: SampledSignal,
    pub u2: SampledSignal,
    pub y1: SampledSignal,
    pub y2: SampledSignal,
    pub du: SampledSignal,
    pub dy: SampledSignal,
}

/// Draws pair `pair_id` from `cfg` and runs both inputs through `spec`.
/// Returns `Ok(None)` when the output overflows.
pub fn simulate_pair(
    spec: &OperatorSpec,
    cfg: &ExcitationConfig,
    pair_id: usize,
) -> Result<Option<PairIncrements>> {
    let dim = spec.io_dimension()?;
    let (u1, u2) = cfg.draw_pair(pair_id, dim)?;
    let y1 = match spec.evaluate(&u1) {
        Ok(y) => y,
        Err(Error::NonFinite { .. }) => return Ok(None),
        Err(e) => return Err(e),
    };
    let y2 = match spec.evaluate(&u2) {
        Ok(y) => y,
        Err(Error::NonFinite { .. }) => return Ok(None),
        Err(e) => return Err(e),
    };
    let du = u1.sub(&u2)?;
    let dy = y1.sub(&y2)?;
    Ok(Some(PairIncrements {
        u1,
        u2,
        y1,
        y2,
        du,
        dy,
    }))
}

enum PairOutcome {
    Points(Vec<SrgPoint>, usize),
    Rejected(Rejection),
}

#[derive(Clone, Copy)]
enum Rejection {
    ZeroInput,
    ZeroOutput,
    InputTail,
    OutputTail,
    NonFinite,
}

fn soft_pair(spec: &OperatorSpec, cfg: &ExcitationConfig, pair_id: usize) -> Result<PairOutcome> {
    let Some(p) = simulate_pair(spec, cfg, pair_id)? else {
        return Ok(PairOutcome::Rejected(Rejection::NonFinite));
    };
    if p.du.is_zero() {
        return Ok(PairOutcome::Rejected(Rejection::ZeroInput));
    }
    if p.dy.is_zero() {
        return Ok(PairOutcome::Rejected(Rejection::ZeroOutput));
    }
    let w = cfg.tail_window;
    let tol = cfg.tail_tolerance;
    if tail_energy_fraction(&p.u1, w)? > tol || tail_energy_fraction(&p.u2, w)? > tol {
        return Ok(PairOutcome::Rejected(Rejection::InputTail));
    }
    if tail_energy_fraction(&p.y1, w)? > tol || tail_energy_fraction(&p.y2, w)? > tol {
        return Ok(PairOutcome::Rejected(Rejection::OutputTail));
    }
    let gp = gain_phase(&p.du, &p.dy)?;
    Ok(PairOutcome::Points(
        vec![SrgPoint::from_pair(gp, SrgKind::Soft, None, pair_id)],
        0,
    ))
}

fn hard_pair(
    spec: &OperatorSpec,
    cfg: &ExcitationConfig,
    grid: &[f64],
    pair_id: usize,
) -> Result<PairOutcome> {
    let Some(p) = simulate_pair(spec, cfg, pair_id)? else {
        return Ok(PairOutcome::Rejected(Rejection::NonFinite));
    };
    let mut points = Vec::with_capacity(grid.len());
    let mut skipped = 0;
    for &t in grid {
        let gp = gain_phase_t(&p.du, &p.dy, t)?;
        if gp.is_srg_point() {
            points.push(SrgPoint::from_pair(gp, SrgKind::Hard, Some(t), pair_id));
        } else {
            skipped += 1;
        }
    }
    if points.is_empty() {
        let cause = if p.du.is_zero() {
            Rejection::ZeroInput
        } else {
            Rejection::ZeroOutput
        };
        return Ok(PairOutcome::Rejected(cause));
    }
    Ok(PairOutcome::Points(points, skipped))
}

fn assemble(
    kind: SrgKind,
    cfg: &ExcitationConfig,
    outcomes: Vec<Result<PairOutcome>>,
) -> Result<SrgCloud> {
    let mut stats = AdmissionStats {
        pairs_tried: outcomes.len(),
        ..Default::default()
    };
    let mut points = Vec::new();
    for outcome in outcomes {
        match outcome? {
            PairOutcome::Points(p, skipped) => {
                stats.pairs_admitted += 1;
                stats.truncations_skipped += skipped;
                points.extend(p);
            }
            PairOutcome::Rejected(r) => {
                let c = &mut stats.rejected;
                match r {
                    Rejection::ZeroInput => c.zero_input_increment += 1,
                    Rejection::ZeroOutput => c.zero_output_increment += 1,
                    Rejection::InputTail => c.input_tail_energy += 1,
                    Rejection::OutputTail => c.output_tail_energy += 1,
                    Rejection::NonFinite => c.non_finite_output += 1,
                }
            }
        }
    }
    if points.is_empty() {
        return Err(Error::EmptyCloud(format!(
            "all {} pairs rejected: {:?}",
            stats.pairs_tried, stats.rejected
        )));
    }
    // Outcomes arrive in pair order and grids are increasing, so this is
    // already sorted; the sort makes the ordering contract explicit.
    points.sort_by(|a, b| {
        a.pair_id
            .cmp(&b.pair_id)
            .then(a.horizon_t.unwrap_or(0.0).total_cmp(&b.horizon_t.unwrap_or(0.0)))
    });
    Ok(SrgCloud {
        kind,
        points,
        config_digest: cfg.digest(),
        stats,
    })
}

/// Soft SRG estimate: one point per admitted pair, admission by tail energy.
pub fn sample_soft_srg(spec: &OperatorSpec, cfg: &ExcitationConfig) -> Result<SrgCloud> {
    spec.validate()?;
    cfg.validate()?;
    let outcomes: Vec<_> = (0..cfg.ensemble_size)
        .into_par_iter()
        .map(|i| soft_pair(spec, cfg, i))
        .collect();
    assemble(SrgKind::Soft, cfg, outcomes)
}

/// Hard SRG estimate: one point per pair and truncation horizon.
pub fn sample_hard_srg(spec: &OperatorSpec, cfg: &ExcitationConfig) -> Result<SrgCloud> {
    spec.validate()?;
    cfg.validate()?;
    let grid = cfg.t_grid();
    let outcomes: Vec<_> = (0..cfg.ensemble_size)
        .into_par_iter()
        .map(|i| hard_pair(spec, cfg, &grid, i))
        .collect();
    assemble(SrgKind::Hard, cfg, outcomes)
}

/// Swaps input and output roles: `(γ, θ) ↦ (1/γ, θ)`.
pub fn invert_cloud(cloud: &SrgCloud) -> SrgCloud {
    let mut out = cloud.clone();
    for p in &mut out.points {
        p.magnitude = 1.0 / p.magnitude;
    }
    out
}

/// `(γ, θ) ↦ (τγ, θ)`.
pub fn scale_cloud(cloud: &SrgCloud, tau: f64) -> Result<SrgCloud> {
    if !(tau > 0.0 && tau.is_finite()) {
        return domain(format!("scale factor must be positive, got {tau}"));
    }
    let mut out = cloud.clone();
    for p in &mut out.points {
        p.magnitude *= tau;
    }
    Ok(out)
}

/// Distance between two points counting both conjugate branches.
pub fn conjugate_distance(z: Complex64, w: Complex64) -> f64 {
    (z - w).norm().min((z - w.conj()).norm())
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CloudDistance {
    pub value: f64,
    pub z1: Complex64,
    pub z2: Complex64,
    pub pair_a: usize,
    pub pair_b: usize,
}

/// Minimum conjugate-aware distance over all point pairs. Ties go to the
/// earliest points.
pub fn cloud_min_distance(a: &SrgCloud, b: &SrgCloud) -> Result<CloudDistance> {
    if a.is_empty() || b.is_empty() {
        return Err(Error::EmptyCloud("distance needs two nonempty clouds".into()));
    }
    let bz: Vec<Complex64> = b.points.iter().map(|p| p.z()).collect();
    let best = a
        .points
        .par_iter()
        .enumerate()
        .map(|(i, p)| {
            let z = p.z();
            let mut best = (f64::INFINITY, 0usize, false);
            for (j, w) in bz.iter().enumerate() {
                let d0 = (z - w).norm();
                let d1 = (z - w.conj()).norm();
                let (d, conj) = if d1 < d0 { (d1, true) } else { (d0, false) };
                if d < best.0 {
                    best = (d, j, conj);
                }
            }
            (best.0, i, best.1, best.2)
        })
        .reduce(
            || (f64::INFINITY, usize::MAX, usize::MAX, false),
            |x, y| if y.0 < x.0 || (y.0 == x.0 && y.1 < x.1) { y } else { x },
        );
    let (value, i, j, conj) = best;
    let z2 = if conj { bz[j].conj() } else { bz[j] };
    Ok(CloudDistance {
        value,
        z1: a.points[i].z(),
        z2,
        pair_a: a.points[i].pair_id,
        pair_b: b.points[j].pair_id,
    })
}
