//! Feedback stability certificates by SRG separation.
//!
//! Three checks are offered: hard separation of `SRG_e(P)` from `SRG†_e(C)`,
//! soft separation over a τ-homotopy grid, and the passivity corollary that
//! builds both regions from passivity indices. All certificates cover the
//! `d2 = 0` loop only.

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{domain, Error, Result};
use crate::feedback::{wellposedness_probe, ProbeConfig, SolverConfig};
use crate::operators::OperatorSpec;
use crate::regions::{containment_report, point_region_distance, region_distance, DistanceMethod};
use crate::regions::{invert_region, negate_region, scale_region, Region, Side};
use crate::sampler::{cloud_min_distance, scale_cloud, SrgCloud, SrgKind};

pub const SCHEMA_VERSION: &str = "1";
pub const DEFAULT_MARGIN_FLOOR: f64 = 1e-6;

const INNER_APPROX: &str = "inner-approximation evidence";
const D2_ZERO: &str = "applies to the d2 = 0 loop configuration only";

/// SRG evidence: an analytic region or a sampled cloud.
#[derive(Debug, Clone)]
pub enum Evidence {
    Region(Region),
    Cloud(SrgCloud),
}

impl From<Region> for Evidence {
    fn from(r: Region) -> Self {
        Evidence::Region(r)
    }
}

impl From<SrgCloud> for Evidence {
    fn from(c: SrgCloud) -> Self {
        Evidence::Cloud(c)
    }
}

impl Evidence {
    fn check_kind(&self, want: SrgKind, what: &str) -> Result<()> {
        match self {
            Evidence::Cloud(c) if c.kind != want => Err(Error::KindMismatch(format!(
                "{what} is a {:?} cloud, expected {:?}",
                c.kind, want
            ))),
            Evidence::Cloud(c) if c.is_empty() => Err(Error::EmptyCloud(format!("{what} has no points"))),
            _ => Ok(()),
        }
    }

    fn scaled(&self, tau: f64) -> Result<Evidence> {
        Ok(match self {
            Evidence::Region(r) => Evidence::Region(scale_region(r, tau)?),
            Evidence::Cloud(c) => Evidence::Cloud(scale_cloud(c, tau)?),
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    Certified,
    NotCertified,
    Indeterminate,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Theorem {
    HardSeparation,
    SoftSeparation,
    PassivityCorollary,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MarginKind {
    SmE,
    Sm,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EvidenceKind {
    AnalyticRegions,
    SampledClouds,
    Mixed,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EvidenceGrade {
    /// Both sides are analytic regions.
    Sound,
    /// At least one side is a sampled cloud.
    Evidence,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AssumptionStatus {
    Satisfied,
    AssertedByUser,
    Violated,
    Unchecked,
}

impl AssumptionStatus {
    pub fn holds(self) -> bool {
        matches!(self, AssumptionStatus::Satisfied | AssumptionStatus::AssertedByUser)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Assumption {
    WellPosedness,
    PStable,
    CStable,
    D2Zero,
    TauWellPosedness,
    PStrictlyPassive,
    NegCPassive,
}

impl Assumption {
    pub const ALL: [Assumption; 7] = [
        Assumption::WellPosedness,
        Assumption::PStable,
        Assumption::CStable,
        Assumption::D2Zero,
        Assumption::TauWellPosedness,
        Assumption::PStrictlyPassive,
        Assumption::NegCPassive,
    ];

    pub fn required_by(self) -> Vec<Theorem> {
        use Theorem::*;
        match self {
            Assumption::WellPosedness => vec![HardSeparation, PassivityCorollary],
            Assumption::PStable => vec![HardSeparation, SoftSeparation],
            Assumption::CStable => vec![SoftSeparation],
            Assumption::D2Zero => vec![HardSeparation, SoftSeparation, PassivityCorollary],
            Assumption::TauWellPosedness => vec![SoftSeparation],
            Assumption::PStrictlyPassive | Assumption::NegCPassive => vec![PassivityCorollary],
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Assumption::WellPosedness => "well_posedness",
            Assumption::PStable => "p_stable",
            Assumption::CStable => "c_stable",
            Assumption::D2Zero => "d2_zero",
            Assumption::TauWellPosedness => "tau_well_posedness",
            Assumption::PStrictlyPassive => "p_strictly_passive",
            Assumption::NegCPassive => "neg_c_passive",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AssumptionItem {
    pub name: Assumption,
    pub required_by: Vec<Theorem>,
    pub status: AssumptionStatus,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AssumptionChecklist {
    pub items: Vec<AssumptionItem>,
}

impl Default for AssumptionChecklist {
    /// Everything unchecked except `d2_zero`, which holds for every loop this
    /// library builds.
    fn default() -> Self {
        let items = Assumption::ALL
            .iter()
            .map(|&a| AssumptionItem {
                name: a,
                required_by: a.required_by(),
                status: if a == Assumption::D2Zero {
                    AssumptionStatus::Satisfied
                } else {
                    AssumptionStatus::Unchecked
                },
                note: (a == Assumption::D2Zero).then(|| "structural: no input at d2".to_string()),
            })
            .collect();
        Self { items }
    }
}

impl AssumptionChecklist {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn status(&self, a: Assumption) -> AssumptionStatus {
        self.items
            .iter()
            .find(|i| i.name == a)
            .map_or(AssumptionStatus::Unchecked, |i| i.status)
    }

    pub fn set(&mut self, a: Assumption, status: AssumptionStatus, note: Option<String>) -> &mut Self {
        match self.items.iter_mut().find(|i| i.name == a) {
            Some(item) => {
                item.status = status;
                item.note = note;
            }
            None => self.items.push(AssumptionItem {
                name: a,
                required_by: a.required_by(),
                status,
                note,
            }),
        }
        self
    }

    /// Builder form of [`set`](Self::set) for user assertions.
    pub fn asserting(mut self, names: &[Assumption]) -> Self {
        for &a in names {
            self.set(a, AssumptionStatus::AssertedByUser, None);
        }
        self
    }

    /// Premises of `theorem`, in checklist order.
    pub fn premises(&self, theorem: Theorem) -> Vec<&AssumptionItem> {
        self.items.iter().filter(|i| i.required_by.contains(&theorem)).collect()
    }

    /// Fills in missing items with their defaults so every premise is listed.
    fn completed(&self) -> Self {
        let mut out = self.clone();
        for item in Self::default().items {
            if !out.items.iter().any(|i| i.name == item.name) {
                out.items.push(item);
            }
        }
        out
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Point {
    pub re: f64,
    pub im: f64,
}

impl From<Complex64> for Point {
    fn from(z: Complex64) -> Self {
        Point { re: z.re, im: z.im }
    }
}

impl From<Point> for Complex64 {
    fn from(p: Point) -> Self {
        Complex64::new(p.re, p.im)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Witnesses {
    /// Closest point on the P side.
    pub z1: Point,
    /// Closest point on the inverse-C side.
    pub z2: Point,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TauMargin {
    pub tau: f64,
    pub margin: f64,
    pub witnesses: Witnesses,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ContinuumStatus {
    /// Every τ in (0, 1] is covered.
    Upgraded,
    NotUpgraded,
    /// The bound needs bounded region evidence on both sides.
    Indeterminate,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GapBound {
    pub tau_lo: f64,
    pub tau_hi: f64,
    /// `(1/τ_lo − 1/τ_hi)·M`.
    pub variation: f64,
    pub worst_endpoint_margin: f64,
    pub ok: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ContinuumReport {
    pub status: ContinuumStatus,
    /// `sup |z|` over the unscaled inverse-C region.
    pub m_sup: Option<f64>,
    /// `inf |z|` over the unscaled inverse-C region.
    pub m_inf: Option<f64>,
    /// `sup |z|` over the P region.
    pub p_sup: Option<f64>,
    /// Lower bound `m_inf/τ_min − p_sup` on the margin for τ ≤ τ_min.
    pub initial_gap_bound: Option<f64>,
    pub gaps: Vec<GapBound>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub reason: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Certificate {
    pub schema_version: String,
    pub verdict: Verdict,
    pub theorem: Theorem,
    pub margin: f64,
    pub margin_kind: MarginKind,
    pub margin_floor: f64,
    pub evidence_kind: EvidenceKind,
    pub evidence_grade: EvidenceGrade,
    pub distance_method: Option<DistanceMethod>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tau_grid: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tau_margins: Option<Vec<TauMargin>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub critical_tau: Option<f64>,
    /// Largest step between consecutive grid values, starting from 0.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub grid_resolution: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub continuum: Option<ContinuumReport>,
    pub assumptions: Vec<AssumptionItem>,
    pub witnesses: Option<Witnesses>,
    pub caveats: Vec<String>,
}

impl Certificate {
    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let c: Certificate = serde_json::from_str(text)?;
        c.validate()?;
        Ok(c)
    }

    /// Checks the structural rules every emitted certificate obeys.
    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::Parse(format!("invalid certificate: {m}")));
        if self.schema_version != SCHEMA_VERSION {
            return bad(format!("unknown schema version {}", self.schema_version));
        }
        if !(self.margin >= 0.0 && self.margin.is_finite()) {
            return bad(format!("margin must be finite and nonnegative, got {}", self.margin));
        }
        let premises: Vec<_> = self
            .assumptions
            .iter()
            .filter(|i| i.required_by.contains(&self.theorem))
            .collect();
        if self.verdict == Verdict::Certified {
            if self.margin <= 0.0 || self.margin <= self.margin_floor {
                return bad("certified with margin at or below the floor".into());
            }
            if let Some(p) = premises.iter().find(|p| !p.status.holds()) {
                return bad(format!("certified with premise {} = {:?}", p.name.name(), p.status));
            }
        }
        if self.evidence_kind != EvidenceKind::AnalyticRegions && !self.caveats.iter().any(|c| c == INNER_APPROX) {
            return bad("sampled evidence without the inner-approximation caveat".into());
        }
        if let Some(w) = &self.witnesses {
            let d = (Complex64::from(w.z1) - Complex64::from(w.z2)).norm();
            if (d - self.margin).abs() > 1e-9 * (1.0 + self.margin) {
                return bad(format!("witness distance {d} differs from margin {}", self.margin));
            }
        }
        match (self.theorem, &self.tau_grid) {
            (Theorem::SoftSeparation, None) => return bad("soft certificate without tau grid".into()),
            (Theorem::SoftSeparation, Some(g)) => validate_tau_grid(g).map_err(|e| Error::Parse(e.to_string()))?,
            _ => {}
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct CertifyOptions {
    pub margin_floor: f64,
    pub max_refinement: usize,
    /// Soft certifier only: try the inter-grid bound.
    pub continuum_upgrade: bool,
}

impl Default for CertifyOptions {
    fn default() -> Self {
        Self {
            margin_floor: DEFAULT_MARGIN_FLOOR,
            max_refinement: crate::regions::DEFAULT_REFINEMENT,
            continuum_upgrade: true,
        }
    }
}

impl CertifyOptions {
    fn validate(&self) -> Result<()> {
        if !(self.margin_floor >= 0.0 && self.margin_floor.is_finite()) {
            return Err(Error::Config(format!("margin_floor must be nonnegative, got {}", self.margin_floor)));
        }
        Ok(())
    }
}

struct Separation {
    value: f64,
    z1: Complex64,
    z2: Complex64,
    method: Option<DistanceMethod>,
}

fn separation(a: &Evidence, b: &Evidence, refine: usize) -> Result<Separation> {
    match (a, b) {
        (Evidence::Region(ra), Evidence::Region(rb)) => {
            let d = region_distance(ra, rb, refine)?;
            Ok(Separation {
                value: d.value,
                z1: d.z1,
                z2: d.z2,
                method: Some(d.method),
            })
        }
        (Evidence::Cloud(ca), Evidence::Cloud(cb)) => {
            let d = cloud_min_distance(ca, cb)?;
            Ok(Separation {
                value: d.value,
                z1: d.z1,
                z2: d.z2,
                method: None,
            })
        }
        (Evidence::Cloud(c), Evidence::Region(r)) => cloud_to_region(c, r, refine),
        (Evidence::Region(r), Evidence::Cloud(c)) => {
            let s = cloud_to_region(c, r, refine)?;
            Ok(Separation { z1: s.z2, z2: s.z1, ..s })
        }
    }
}

/// Min over cloud points of the point-to-region distance. Ties go to the
/// earliest point.
fn cloud_to_region(cloud: &SrgCloud, region: &Region, refine: usize) -> Result<Separation> {
    let per_point: Vec<(f64, Complex64, Complex64)> = cloud
        .points
        .par_iter()
        .map(|p| {
            let z = p.z();
            point_region_distance(region, z, refine).map(|(d, w)| (d, z, w))
        })
        .collect::<Result<_>>()?;
    let (value, z1, z2) = per_point
        .into_iter()
        .fold((f64::INFINITY, Complex64::default(), Complex64::default()), |best, c| {
            if c.0 < best.0 {
                c
            } else {
                best
            }
        });
    Ok(Separation {
        value,
        z1,
        z2,
        method: None,
    })
}

fn evidence_kind(a: &Evidence, b: &Evidence) -> EvidenceKind {
    match (a, b) {
        (Evidence::Region(_), Evidence::Region(_)) => EvidenceKind::AnalyticRegions,
        (Evidence::Cloud(_), Evidence::Cloud(_)) => EvidenceKind::SampledClouds,
        _ => EvidenceKind::Mixed,
    }
}

struct Draft {
    theorem: Theorem,
    margin_kind: MarginKind,
    kind: EvidenceKind,
    checklist: AssumptionChecklist,
    floor: f64,
    caveats: Vec<String>,
}

impl Draft {
    fn new(theorem: Theorem, kind: EvidenceKind, checklist: &AssumptionChecklist, floor: f64) -> Self {
        let mut caveats = vec![D2_ZERO.to_string()];
        if kind != EvidenceKind::AnalyticRegions {
            caveats.push(INNER_APPROX.to_string());
        }
        Self {
            theorem,
            margin_kind: if theorem == Theorem::SoftSeparation {
                MarginKind::Sm
            } else {
                MarginKind::SmE
            },
            kind,
            checklist: checklist.completed(),
            floor,
            caveats,
        }
    }

    /// Premise bookkeeping shared by all theorems. Returns whether every
    /// premise holds and whether any is violated.
    fn premises(&mut self) -> (bool, bool) {
        let mut all_hold = true;
        let mut violated = false;
        let mut notes = Vec::new();
        for p in self.checklist.premises(self.theorem) {
            match p.status {
                AssumptionStatus::AssertedByUser => notes.push(format!("asserted by user: {}", p.name.name())),
                AssumptionStatus::Satisfied => {}
                AssumptionStatus::Violated => {
                    all_hold = false;
                    violated = true;
                    notes.push(format!("premise violated: {}", p.name.name()));
                }
                AssumptionStatus::Unchecked => {
                    all_hold = false;
                    notes.push(format!("premise unchecked: {}", p.name.name()));
                }
            }
        }
        self.caveats.extend(notes);
        (all_hold, violated)
    }

    fn finish(mut self, sep: std::result::Result<Separation, Error>) -> Result<Certificate> {
        let (all_hold, violated) = self.premises();
        let (margin, witnesses, method, indeterminate) = match sep {
            Ok(s) => (
                s.value,
                Some(Witnesses {
                    z1: s.z1.into(),
                    z2: s.z2.into(),
                }),
                s.method,
                false,
            ),
            Err(Error::Indeterminate(msg)) => {
                self.caveats.push(format!("distance indeterminate: {msg}"));
                (0.0, None, None, true)
            }
            Err(e) => return Err(e),
        };
        let separated = margin > self.floor;
        let verdict = if violated {
            Verdict::NotCertified
        } else if indeterminate {
            Verdict::Indeterminate
        } else if separated && all_hold {
            Verdict::Certified
        } else {
            Verdict::NotCertified
        };
        if !indeterminate && !separated {
            self.caveats.push(format!("margin {margin:e} does not exceed floor {:e}", self.floor));
        }
        if self.theorem != Theorem::SoftSeparation
            && separated
            && self.checklist.status(Assumption::PStable) == AssumptionStatus::Violated
        {
            self.caveats.push(
                "P is not stable: with the hard separation the maps d1 -> u1 and d1 -> y2 are still stable, \
                 but d1 -> (u1, u2) is not certified"
                    .into(),
            );
        }
        Ok(Certificate {
            schema_version: SCHEMA_VERSION.into(),
            verdict,
            theorem: self.theorem,
            margin,
            margin_kind: self.margin_kind,
            margin_floor: self.floor,
            evidence_kind: self.kind,
            evidence_grade: if self.kind == EvidenceKind::AnalyticRegions {
                EvidenceGrade::Sound
            } else {
                EvidenceGrade::Evidence
            },
            distance_method: method,
            tau_grid: None,
            tau_margins: None,
            critical_tau: None,
            grid_resolution: None,
            continuum: None,
            assumptions: self.checklist.items,
            witnesses,
            caveats: self.caveats,
        })
    }
}

/// Hard separation: `srg_p` bounds `SRG_e(P)`, `inv_srg_c` bounds `SRG†_e(C)`.
pub fn certify_hard(
    srg_p: &Evidence,
    inv_srg_c: &Evidence,
    checklist: &AssumptionChecklist,
    options: &CertifyOptions,
) -> Result<Certificate> {
    certify_hard_as(Theorem::HardSeparation, srg_p, inv_srg_c, checklist, options)
}

fn certify_hard_as(
    theorem: Theorem,
    srg_p: &Evidence,
    inv_srg_c: &Evidence,
    checklist: &AssumptionChecklist,
    options: &CertifyOptions,
) -> Result<Certificate> {
    options.validate()?;
    srg_p.check_kind(SrgKind::Hard, "P evidence")?;
    inv_srg_c.check_kind(SrgKind::Hard, "inverse C evidence")?;
    let draft = Draft::new(theorem, evidence_kind(srg_p, inv_srg_c), checklist, options.margin_floor);
    draft.finish(separation(srg_p, inv_srg_c, options.max_refinement))
}

fn validate_tau_grid(grid: &[f64]) -> Result<()> {
    if grid.is_empty() {
        return Err(Error::Config("tau grid is empty".into()));
    }
    if grid.iter().any(|t| !(*t > 0.0 && *t <= 1.0)) {
        return Err(Error::Config("tau grid values must lie in (0, 1]".into()));
    }
    if grid.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::Config("tau grid must be strictly increasing".into()));
    }
    if *grid.last().unwrap() != 1.0 {
        return Err(Error::Config("tau grid must contain 1".into()));
    }
    Ok(())
}

/// Soft separation over `tau_grid`, scaling the inverse-C evidence by `1/τ`.
pub fn certify_soft(
    srg_p: &Evidence,
    inv_srg_c_base: &Evidence,
    tau_grid: &[f64],
    checklist: &AssumptionChecklist,
    options: &CertifyOptions,
) -> Result<Certificate> {
    options.validate()?;
    validate_tau_grid(tau_grid)?;
    srg_p.check_kind(SrgKind::Soft, "P evidence")?;
    inv_srg_c_base.check_kind(SrgKind::Soft, "inverse C evidence")?;

    let per_tau: Vec<Result<Separation>> = tau_grid
        .par_iter()
        .map(|&tau| separation(srg_p, &inv_srg_c_base.scaled(1.0 / tau)?, options.max_refinement))
        .collect();
    let mut margins = Vec::with_capacity(tau_grid.len());
    let mut indeterminate = None;
    for (tau, r) in tau_grid.iter().zip(per_tau) {
        match r {
            Ok(s) => margins.push((*tau, s)),
            Err(Error::Indeterminate(m)) => {
                indeterminate.get_or_insert(format!("tau = {tau}: {m}"));
            }
            Err(e) => return Err(e),
        }
    }
    // Smallest margin, ties to the smallest τ.
    let critical = margins
        .iter()
        .enumerate()
        .fold(None::<usize>, |best, (i, (_, s))| match best {
            Some(b) if margins[b].1.value <= s.value => Some(b),
            _ => Some(i),
        });

    let mut draft = Draft::new(
        Theorem::SoftSeparation,
        evidence_kind(srg_p, inv_srg_c_base),
        checklist,
        options.margin_floor,
    );
    let sep = match (&indeterminate, critical) {
        (Some(m), _) => Err(Error::Indeterminate(m.clone())),
        (None, Some(i)) => {
            let s = &margins[i].1;
            Ok(Separation {
                value: s.value,
                z1: s.z1,
                z2: s.z2,
                method: s.method,
            })
        }
        (None, None) => unreachable!("nonempty grid"),
    };
    if let (None, Some(i)) = (&indeterminate, critical) {
        if margins[i].1.value <= options.margin_floor {
            draft
                .caveats
                .push(format!("separation fails at tau = {}", margins[i].0));
        }
    }

    let continuum = options
        .continuum_upgrade
        .then(|| continuum_report(srg_p, inv_srg_c_base, &margins, options.margin_floor));
    let critical_tau = critical.map(|i| margins[i].0);
    let mut cert = draft.finish(sep)?;
    cert.tau_grid = Some(tau_grid.to_vec());
    cert.grid_resolution = Some(grid_resolution(tau_grid));
    cert.critical_tau = critical_tau;
    cert.tau_margins = Some(
        margins
            .iter()
            .map(|(tau, s)| TauMargin {
                tau: *tau,
                margin: s.value,
                witnesses: Witnesses {
                    z1: s.z1.into(),
                    z2: s.z2.into(),
                },
            })
            .collect(),
    );
    if let Some(c) = &continuum {
        match c.status {
            ContinuumStatus::Upgraded => cert.caveats.push("continuum-covering: every tau in (0, 1] is separated".into()),
            ContinuumStatus::NotUpgraded => cert.caveats.push("grid-only: the inter-grid bound does not cover (0, 1]".into()),
            ContinuumStatus::Indeterminate => cert.caveats.push("grid-only: inter-grid bound unavailable".into()),
        }
    }
    cert.continuum = continuum;
    Ok(cert)
}

fn grid_resolution(grid: &[f64]) -> f64 {
    let mut prev = 0.0;
    let mut worst: f64 = 0.0;
    for &t in grid {
        worst = worst.max(t - prev);
        prev = t;
    }
    worst
}

/// Between grid points `τ1 < τ2` the scaled set `(1/τ)S` moves by at most
/// `(1/τ1 − 1/τ2)·sup|S|` in Hausdorff distance, so the margin stays above
/// `min(d(τ1), d(τ2)) − variation`. For `τ ≤ τ_min` every point of `(1/τ)S`
/// has modulus at least `inf|S|/τ_min`, so the margin is at least
/// `inf|S|/τ_min − sup|P|`.
fn continuum_report(p: &Evidence, c: &Evidence, margins: &[(f64, Separation)], floor: f64) -> ContinuumReport {
    let indeterminate = |reason: &str| ContinuumReport {
        status: ContinuumStatus::Indeterminate,
        m_sup: None,
        m_inf: None,
        p_sup: None,
        initial_gap_bound: None,
        gaps: Vec::new(),
        reason: Some(reason.into()),
    };
    let (Evidence::Region(rp), Evidence::Region(rc)) = (p, c) else {
        return indeterminate("inter-grid bound needs region evidence on both sides");
    };
    let Some(m_sup) = rc.sup_modulus() else {
        return indeterminate("inverse C region is unbounded");
    };
    if margins.is_empty() {
        return indeterminate("grid distances are indeterminate");
    }
    let m_inf = rc.inf_modulus();
    let p_sup = rp.sup_modulus();
    let gaps: Vec<GapBound> = margins
        .windows(2)
        .map(|w| {
            let (lo, hi) = (w[0].0, w[1].0);
            let variation = (1.0 / lo - 1.0 / hi) * m_sup;
            let worst = w[0].1.value.min(w[1].1.value);
            GapBound {
                tau_lo: lo,
                tau_hi: hi,
                variation,
                worst_endpoint_margin: worst,
                ok: worst - variation > floor,
            }
        })
        .collect();
    let initial = p_sup.map(|ps| m_inf / margins[0].0 - ps);
    let first_ok = margins[0].1.value > floor;
    let initial_ok = initial.is_some_and(|b| b > floor) && first_ok;
    let upgraded = initial_ok && gaps.iter().all(|g| g.ok);
    ContinuumReport {
        status: if upgraded {
            ContinuumStatus::Upgraded
        } else {
            ContinuumStatus::NotUpgraded
        },
        m_sup: Some(m_sup),
        m_inf: Some(m_inf),
        p_sup,
        initial_gap_bound: initial,
        gaps,
        reason: match (p_sup, initial_ok) {
            (None, _) => Some("P region is unbounded; the interval below the smallest tau is not covered".into()),
            (Some(_), false) => Some("the interval below the smallest tau is not covered".into()),
            _ => None,
        },
    }
}

/// Homotopy step `μ = 1/(c0·‖C‖)`: stability of `P#(τC)` carries over to
/// `P#((τ+ν)C)` for `|ν| < μ`.
pub fn homotopy_step_bound(c0: f64, inc_gain_c: f64) -> Result<f64> {
    if !(c0 > 0.0 && c0.is_finite()) || !(inc_gain_c > 0.0 && inc_gain_c.is_finite()) {
        return domain(format!(
            "homotopy step needs positive finite c0 and gain, got {c0}, {inc_gain_c}"
        ));
    }
    Ok(1.0 / (c0 * inc_gain_c))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SpacingReport {
    pub mu: f64,
    pub max_spacing: f64,
    pub accepted: bool,
    /// Steps (starting from τ = 0) with spacing ≥ μ.
    pub flagged_gaps: Vec<(f64, f64)>,
}

/// Compares grid steps, starting from τ = 0, with the homotopy step `mu`.
pub fn grid_spacing_report(tau_grid: &[f64], mu: f64) -> Result<SpacingReport> {
    validate_tau_grid(tau_grid)?;
    if !(mu > 0.0) {
        return domain(format!("mu must be positive, got {mu}"));
    }
    let mut prev = 0.0;
    let mut flagged = Vec::new();
    for &t in tau_grid {
        if t - prev >= mu {
            flagged.push((prev, t));
        }
        prev = t;
    }
    Ok(SpacingReport {
        mu,
        max_spacing: grid_resolution(tau_grid),
        accepted: flagged.is_empty(),
        flagged_gaps: flagged,
    })
}

/// Hard clouds used to check the passivity premises.
#[derive(Debug, Clone, Default)]
pub struct PassivityEvidence {
    /// Hard cloud of P; must lie in `D(δ, ε)`.
    pub p_hard: Option<SrgCloud>,
    /// Hard cloud of `−C`; must lie in the closed right half-plane.
    pub neg_c_hard: Option<SrgCloud>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PassivityOptions {
    pub certify: CertifyOptions,
    /// Trials for the well-posedness probe run when that item is unchecked.
    pub probe_trials: usize,
    pub probe_seed: u64,
    pub probe: ProbeConfig,
    pub solver: SolverConfig,
}

impl Default for PassivityOptions {
    fn default() -> Self {
        Self {
            certify: CertifyOptions::default(),
            probe_trials: 4,
            probe_seed: 0,
            probe: ProbeConfig::default(),
            solver: SolverConfig::default(),
        }
    }
}

fn passivity_premise(
    checklist: &mut AssumptionChecklist,
    item: Assumption,
    cloud: Option<&SrgCloud>,
    region: &Region,
    what: &str,
) -> Result<()> {
    let Some(cloud) = cloud else {
        return Ok(());
    };
    if cloud.kind != SrgKind::Hard {
        return Err(Error::KindMismatch(format!("{what} cloud must be hard")));
    }
    let r = containment_report(cloud, region)?;
    if r.points_inside == r.points_total {
        let prior = checklist.status(item);
        if prior != AssumptionStatus::AssertedByUser {
            checklist.set(
                item,
                AssumptionStatus::Satisfied,
                Some(format!("{} of {} cloud points inside", r.points_inside, r.points_total)),
            );
        }
    } else {
        checklist.set(
            item,
            AssumptionStatus::Violated,
            Some(format!(
                "cloud contradicts containment: {} of {} points inside, worst distance {:e}",
                r.points_inside, r.points_total, r.worst_violation_distance
            )),
        );
    }
    Ok(())
}

/// Passivity corollary: `P` strictly incrementally passive with indices
/// `(δ, ε)` and `−C` incrementally passive give a stable `P # C`.
///
/// Builds `D(δ, ε)` for P and the closed left half-plane for `SRG†(C)`, checks
/// the premises against the optional clouds, probes well-posedness if it is
/// unchecked, and delegates to the hard separation check.
pub fn certify_passivity_corollary(
    spec_p: &OperatorSpec,
    spec_c: &OperatorSpec,
    delta: f64,
    epsilon: f64,
    evidence: &PassivityEvidence,
    checklist: &AssumptionChecklist,
    options: &PassivityOptions,
) -> Result<Certificate> {
    let d = Region::sector_disk(delta, epsilon)?;
    let dp = spec_p.io_dimension()?;
    let dc = spec_c.io_dimension()?;
    if dp != dc {
        return Err(Error::DimensionMismatch(format!("P has dimension {dp}, C has {dc}")));
    }
    let rhp = Region::half_plane(0.0, Side::Ge)?;
    // SRG(−C) ⊂ RHP, inversion fixes RHP, and SRG†(C) = −SRG†(−C).
    let inv_c = negate_region(&invert_region(&rhp)?)?;

    let mut list = checklist.completed();
    passivity_premise(&mut list, Assumption::PStrictlyPassive, evidence.p_hard.as_ref(), &d, "P")?;
    passivity_premise(&mut list, Assumption::NegCPassive, evidence.neg_c_hard.as_ref(), &rhp, "-C")?;
    let sp = list.status(Assumption::PStrictlyPassive);
    if sp.holds() {
        list.set(
            Assumption::PStable,
            sp,
            Some("strict incremental passivity implies a finite incremental gain".into()),
        );
    }
    let mut probe_caveat = None;
    if list.status(Assumption::WellPosedness) == AssumptionStatus::Unchecked {
        let r = wellposedness_probe(
            spec_p,
            spec_c,
            &[1.0],
            options.probe_trials,
            options.probe_seed,
            &options.probe,
            &options.solver,
        )?;
        let r = &r[0];
        if r.flagged {
            list.set(
                Assumption::WellPosedness,
                AssumptionStatus::Violated,
                r.first_failure.clone(),
            );
        } else {
            list.set(
                Assumption::WellPosedness,
                AssumptionStatus::Satisfied,
                Some(format!(
                    "numerical probe: {} of {} trials solved, at most {} iterations per step",
                    r.converged, r.trials, r.max_iterations_per_step
                )),
            );
            probe_caveat = Some("well-posedness supported by a finite numerical probe".to_string());
        }
    }
    let mut cert = certify_hard_as(
        Theorem::PassivityCorollary,
        &Evidence::Region(d),
        &Evidence::Region(inv_c),
        &list,
        &options.certify,
    )?;
    if evidence.p_hard.is_some() || evidence.neg_c_hard.is_some() {
        cert.caveats
            .push("premises checked against sampled clouds (inner-approximation evidence)".into());
    }
    cert.caveats.extend(probe_caveat);
    Ok(cert)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sampler::SrgPoint;

    fn region(r: Result<Region>) -> Evidence {
        Evidence::Region(r.unwrap())
    }

    fn all_hold() -> AssumptionChecklist {
        AssumptionChecklist::new().asserting(&[
            Assumption::WellPosedness,
            Assumption::PStable,
            Assumption::CStable,
            Assumption::TauWellPosedness,
        ])
    }

    fn cloud(kind: SrgKind, zs: &[(f64, f64)]) -> SrgCloud {
        let points = zs
            .iter()
            .enumerate()
            .map(|(i, &(re, im))| {
                let z = Complex64::new(re, im);
                SrgPoint {
                    magnitude: z.norm(),
                    angle: z.arg().abs(),
                    kind,
                    horizon_t: (kind == SrgKind::Hard).then_some(1.0),
                    pair_id: i,
                }
            })
            .collect();
        SrgCloud::from_points(kind, points).unwrap()
    }

    #[test]
    fn sector_disk_against_left_half_plane() {
        let c = certify_hard(
            &region(Region::sector_disk(0.25, 0.25)),
            &region(Region::half_plane(0.0, Side::Le)),
            &all_hold(),
            &CertifyOptions::default(),
        )
        .unwrap();
        assert_eq!(c.verdict, Verdict::Certified);
        assert!((c.margin - 0.25).abs() < 1e-9);
        assert_eq!(c.evidence_grade, EvidenceGrade::Sound);
        assert_eq!(c.margin_kind, MarginKind::SmE);
        c.validate().unwrap();
        assert!(c.caveats.iter().any(|s| s.contains("d2 = 0")));
        assert!(c.caveats.iter().any(|s| s == "asserted by user: p_stable"));
    }

    #[test]
    fn overlapping_disks() {
        let c = certify_hard(
            &region(Region::disk(0.0, 2.0)),
            &region(Region::disk(0.0, 1.0)),
            &all_hold(),
            &CertifyOptions::default(),
        )
        .unwrap();
        assert_eq!(c.verdict, Verdict::NotCertified);
        assert_eq!(c.margin, 0.0);
    }

    #[test]
    fn unstable_p_is_never_certified() {
        let mut list = all_hold();
        list.set(Assumption::PStable, AssumptionStatus::Violated, None);
        let c = certify_hard(
            &region(Region::sector_disk(0.25, 0.25)),
            &region(Region::half_plane(0.0, Side::Le)),
            &list,
            &CertifyOptions::default(),
        )
        .unwrap();
        assert_eq!(c.verdict, Verdict::NotCertified);
        assert!((c.margin - 0.25).abs() < 1e-9);
        assert!(c.caveats.iter().any(|s| s.contains("d1 -> u1 and d1 -> y2 are still stable")));
    }

    #[test]
    fn unchecked_premise_blocks_certification() {
        let c = certify_hard(
            &region(Region::sector_disk(0.25, 0.25)),
            &region(Region::half_plane(0.0, Side::Le)),
            &AssumptionChecklist::new(),
            &CertifyOptions::default(),
        )
        .unwrap();
        assert_eq!(c.verdict, Verdict::NotCertified);
        assert!(c.caveats.iter().any(|s| s == "premise unchecked: well_posedness"));
    }

    #[test]
    fn soft_cloud_rejected_by_hard_certifier() {
        let soft = cloud(SrgKind::Soft, &[(1.0, 0.0)]);
        let err = certify_hard(
            &Evidence::Cloud(soft),
            &region(Region::disk(-3.0, 1.0)),
            &all_hold(),
            &CertifyOptions::default(),
        )
        .unwrap_err();
        assert!(matches!(err, Error::KindMismatch(_)));
    }

    #[test]
    fn extended_region_gives_indeterminate() {
        let ext = invert_region(&Region::disk(0.0, 1.0).unwrap()).unwrap();
        let c = certify_hard(
            &region(Region::disk(5.0, 1.0)),
            &Evidence::Region(ext),
            &all_hold(),
            &CertifyOptions::default(),
        )
        .unwrap();
        assert_eq!(c.verdict, Verdict::Indeterminate);
        assert!(c.witnesses.is_none());
        c.validate().unwrap();
    }

    #[test]
    fn cloud_and_mixed_evidence_are_labelled() {
        let p = cloud(SrgKind::Hard, &[(1.0, 0.5), (2.0, 0.0)]);
        let c = cloud(SrgKind::Hard, &[(-1.0, -0.5), (-2.0, 0.0)]);
        let cert = certify_hard(&p.clone().into(), &c.into(), &all_hold(), &CertifyOptions::default()).unwrap();
        assert_eq!(cert.evidence_kind, EvidenceKind::SampledClouds);
        assert_eq!(cert.evidence_grade, EvidenceGrade::Evidence);
        assert!(cert.caveats.iter().any(|s| s == INNER_APPROX));
        assert!((cert.margin - 2.0).abs() < 1e-12);
        cert.validate().unwrap();

        let mixed = certify_hard(
            &p.into(),
            &region(Region::half_plane(0.0, Side::Le)),
            &all_hold(),
            &CertifyOptions::default(),
        )
        .unwrap();
        assert_eq!(mixed.evidence_kind, EvidenceKind::Mixed);
        assert!((mixed.margin - 1.0).abs() < 1e-12);
        mixed.validate().unwrap();
    }

    #[test]
    fn soft_grid_matches_scaled_disk_formula() {
        let p = Region::disk(0.0, 0.5).unwrap();
        // Small-gain C with gain 1: SRG(C) ⊂ disk(0, 1), so SRG†(C) lies outside
        // the unit disk; a bounded stand-in is disk(2, 0.9).
        let inv = Region::disk(2.0, 0.9).unwrap();
        let grid = [0.25, 0.5, 0.75, 1.0];
        let cert = certify_soft(
            &Evidence::Region(p),
            &Evidence::Region(inv),
            &grid,
            &all_hold(),
            &CertifyOptions::default(),
        )
        .unwrap();
        for tm in cert.tau_margins.as_ref().unwrap() {
            let want = (2.0 / tm.tau - 0.9 / tm.tau) - 0.5;
            assert!((tm.margin - want).abs() < 1e-9, "tau {}", tm.tau);
        }
        assert_eq!(cert.critical_tau, Some(1.0));
        assert_eq!(cert.verdict, Verdict::Certified);
        assert_eq!(cert.margin_kind, MarginKind::Sm);
        assert_eq!(cert.grid_resolution, Some(0.25));
        cert.validate().unwrap();
    }

    #[test]
    fn soft_grid_failure_names_tau() {
        let p = Region::disk(0.0, 1.5).unwrap();
        let inv = Region::disk(2.0, 0.6).unwrap();
        let cert = certify_soft(
            &Evidence::Region(p),
            &Evidence::Region(inv),
            &[0.5, 1.0],
            &all_hold(),
            &CertifyOptions::default(),
        )
        .unwrap();
        assert_eq!(cert.verdict, Verdict::NotCertified);
        assert_eq!(cert.margin, 0.0);
        assert_eq!(cert.critical_tau, Some(1.0));
        assert!(cert.caveats.iter().any(|s| s == "separation fails at tau = 1"));
        assert!(cert.witnesses.is_some());
    }

    #[test]
    fn soft_grid_errors() {
        let p = Evidence::Region(Region::disk(0.0, 0.5).unwrap());
        let c = Evidence::Region(Region::disk(3.0, 1.0).unwrap());
        let o = CertifyOptions::default();
        for g in [&[0.5][..], &[][..], &[0.5, 0.25, 1.0][..], &[0.0, 1.0][..]] {
            assert!(matches!(certify_soft(&p, &c, g, &all_hold(), &o), Err(Error::Config(_))));
        }
        let hard = cloud(SrgKind::Hard, &[(1.0, 0.0)]);
        assert!(matches!(
            certify_soft(&hard.into(), &c, &[1.0], &all_hold(), &o),
            Err(Error::KindMismatch(_))
        ));
    }

    #[test]
    fn continuum_upgrade_tracks_gap_variation() {
        let p = Evidence::Region(Region::disk(0.0, 0.25).unwrap());
        let c = Evidence::Region(Region::disk(2.0 / 3.0, 1.0 / 3.0).unwrap());
        let o = CertifyOptions::default();
        let cert = certify_soft(&p, &c, &[1.0], &all_hold(), &o).unwrap();
        let cont = cert.continuum.as_ref().unwrap();
        // inf|S| − sup|P| = 1/3 − 1/4.
        assert!((cont.initial_gap_bound.unwrap() - (1.0 / 3.0 - 0.25)).abs() < 1e-12);
        assert_eq!(cont.status, ContinuumStatus::Upgraded);

        let big_p = Evidence::Region(Region::disk(0.0, 0.3).unwrap());
        let c2 = Evidence::Region(Region::disk(1.0, 0.6).unwrap());
        let coarse = certify_soft(&big_p, &c2, &[0.5, 1.0], &all_hold(), &o).unwrap();
        let fine_grid: Vec<f64> = (1..=20).map(|i| 0.5 + 0.025 * i as f64).collect();
        let mut grid = vec![0.5];
        grid.extend(fine_grid);
        let fine = certify_soft(&big_p, &c2, &grid, &all_hold(), &o).unwrap();
        for cert in [&coarse, &fine] {
            let cont = cert.continuum.as_ref().unwrap();
            let expect = cont.initial_gap_bound.unwrap() > o.margin_floor
                && cont.gaps.iter().all(|g| g.worst_endpoint_margin - g.variation > o.margin_floor);
            assert_eq!(cont.status == ContinuumStatus::Upgraded, expect);
            assert_eq!(cert.verdict, Verdict::Certified);
        }
        assert_eq!(coarse.continuum.as_ref().unwrap().status, ContinuumStatus::NotUpgraded);
        assert_eq!(fine.continuum.as_ref().unwrap().status, ContinuumStatus::Upgraded);
    }

    #[test]
    fn continuum_needs_bounded_regions() {
        let p = Evidence::Region(Region::disk(0.0, 0.5).unwrap());
        let c = Evidence::Region(Region::half_plane(1.0, Side::Ge).unwrap());
        let cert = certify_soft(&p, &c, &[0.5, 1.0], &all_hold(), &CertifyOptions::default()).unwrap();
        assert_eq!(cert.verdict, Verdict::Certified);
        assert_eq!(cert.continuum.unwrap().status, ContinuumStatus::Indeterminate);
    }

    #[test]
    fn homotopy_step() {
        assert_eq!(homotopy_step_bound(2.0, 1.0).unwrap(), 0.5);
        assert!(homotopy_step_bound(100.0, 1.0).unwrap() < homotopy_step_bound(10.0, 1.0).unwrap());
        assert!(homotopy_step_bound(0.0, 1.0).is_err());
        assert!(homotopy_step_bound(1.0, -1.0).is_err());
        let ok = grid_spacing_report(&[0.25, 0.5, 0.75, 1.0], 0.5).unwrap();
        assert!(ok.accepted);
        let bad = grid_spacing_report(&[0.5, 1.0], 0.5).unwrap();
        assert!(!bad.accepted);
        assert_eq!(bad.flagged_gaps.len(), 2);
    }

    #[test]
    fn passivity_geometry() {
        let p = OperatorSpec::parallel_sum(vec![OperatorSpec::static_gain(0.25, 1), OperatorSpec::lag()]);
        let c = OperatorSpec::negate(OperatorSpec::static_map(
            crate::operators::StaticNonlinearityKind::TanhGain { k: 1.0 },
            1,
        ));
        let list = AssumptionChecklist::new().asserting(&[Assumption::PStrictlyPassive, Assumption::NegCPassive]);
        let cert = certify_passivity_corollary(&p, &c, 0.2, 0.4, &PassivityEvidence::default(), &list, &Default::default())
            .unwrap();
        assert_eq!(cert.verdict, Verdict::Certified);
        assert_eq!(cert.theorem, Theorem::PassivityCorollary);
        assert!((cert.margin - 0.2).abs() < 1e-9);
        let stable = cert.assumptions.iter().find(|i| i.name == Assumption::PStable).unwrap();
        assert!(stable.note.as_ref().unwrap().contains("finite incremental gain"));
        cert.validate().unwrap();

        assert!(matches!(
            certify_passivity_corollary(&p, &c, 1.0, 1.0, &PassivityEvidence::default(), &list, &Default::default()),
            Err(Error::Domain(_))
        ));
    }

    #[test]
    fn contradicting_cloud_marks_violation() {
        let p = OperatorSpec::lag();
        let c = OperatorSpec::static_gain(1.0, 1);
        let ev = PassivityEvidence {
            p_hard: None,
            neg_c_hard: Some(cloud(SrgKind::Hard, &[(-1.0, 0.0)])),
        };
        let list = AssumptionChecklist::new().asserting(&[
            Assumption::PStrictlyPassive,
            Assumption::NegCPassive,
            Assumption::WellPosedness,
        ]);
        let cert = certify_passivity_corollary(&p, &c, 0.1, 0.5, &ev, &list, &Default::default()).unwrap();
        assert_eq!(cert.verdict, Verdict::NotCertified);
        let item = cert.assumptions.iter().find(|i| i.name == Assumption::NegCPassive).unwrap();
        assert_eq!(item.status, AssumptionStatus::Violated);
        assert!(cert.caveats.iter().any(|s| s == "premise violated: neg_c_passive"));
    }

    #[test]
    fn json_round_trip_and_validation() {
        let cert = certify_hard(
            &region(Region::sector_disk(0.25, 0.25)),
            &region(Region::half_plane(0.0, Side::Le)),
            &all_hold(),
            &CertifyOptions::default(),
        )
        .unwrap();
        let text = cert.to_json().unwrap();
        assert_eq!(Certificate::from_json(&text).unwrap(), cert);
        let mut forged = cert.clone();
        forged.margin = 0.0;
        assert!(forged.validate().is_err());
        let mut forged = cert;
        forged.assumptions[0].status = AssumptionStatus::Unchecked;
        assert!(forged.validate().is_err());
    }

    mod props {
        use super::*;
        use proptest::prelude::*;

        proptest! {
            #![proptest_config(ProptestConfig::with_cases(64))]

            #[test]
            fn adding_points_never_raises_cloud_margin(
                a in prop::collection::vec((-3.0..3.0f64, 0.0..3.0f64), 1..12),
                b in prop::collection::vec((-3.0..3.0f64, 0.0..3.0f64), 1..12),
                extra in (-3.0..3.0f64, 0.0..3.0f64),
            ) {
                let o = CertifyOptions::default();
                let base = certify_hard(
                    &cloud(SrgKind::Hard, &a).into(), &cloud(SrgKind::Hard, &b).into(), &all_hold(), &o).unwrap();
                let mut a2 = a.clone();
                a2.push(extra);
                let more = certify_hard(
                    &cloud(SrgKind::Hard, &a2).into(), &cloud(SrgKind::Hard, &b).into(), &all_hold(), &o).unwrap();
                prop_assert!(more.margin <= base.margin);
                base.validate().unwrap();
                more.validate().unwrap();
            }

            #[test]
            fn never_certified_without_premises(
                statuses in prop::collection::vec(0..4usize, 7),
                r in 0.1..1.0f64,
            ) {
                let mut list = AssumptionChecklist::new();
                let all = [AssumptionStatus::Satisfied, AssumptionStatus::AssertedByUser,
                           AssumptionStatus::Violated, AssumptionStatus::Unchecked];
                for (a, s) in Assumption::ALL.iter().zip(&statuses) {
                    list.set(*a, all[*s], None);
                }
                let cert = certify_hard(
                    &region(Region::disk(0.0, r)), &region(Region::disk(-3.0, 1.0)),
                    &list, &CertifyOptions::default()).unwrap();
                let ok = list.premises(Theorem::HardSeparation).iter().all(|p| p.status.holds());
                prop_assert_eq!(cert.verdict == Verdict::Certified, ok);
                cert.validate().unwrap();
            }
        }
    }
}
