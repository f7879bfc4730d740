//! Closed-loop simulation of `P # C` with `d2 = 0`:
//! `u1 = d1 + y2`, `u2 = y1`, `y1 = P u1`, `y2 = C u2`.

use std::io::Write;

use rayon::prelude::*;
use serde::{Serialize, Serializer};

use crate::error::{domain, Error, Result};
use crate::operators::OperatorSpec;
use crate::sampler::ExcitationConfig;
use crate::signal::{gain_phase_t, SampledSignal};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, serde::Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SolverConfig {
    /// Per-step fixed-point tolerance on `y2`.
    pub tolerance: f64,
    pub max_iterations: usize,
}

impl Default for SolverConfig {
    fn default() -> Self {
        Self {
            tolerance: 1e-10,
            max_iterations: 100,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct LoopTrace {
    pub d1: SampledSignal,
    pub u1: SampledSignal,
    pub u2: SampledSignal,
    pub y1: SampledSignal,
    pub y2: SampledSignal,
    /// Fixed-point iterations used at each step (1 for explicit steps).
    pub iterations: Vec<usize>,
    pub max_residual: f64,
}

impl LoopTrace {
    /// Columns `t, d1_*, u1_*, u2_*, y1_*, y2_*`.
    pub fn write_csv<W: Write>(&self, writer: W) -> Result<()> {
        let m = self.d1.channels();
        let mut w = csv::Writer::from_writer(writer);
        let mut header = vec!["t".to_string()];
        for name in ["d1", "u1", "u2", "y1", "y2"] {
            header.extend((0..m).map(|c| format!("{name}_{c}")));
        }
        w.write_record(&header)?;
        for k in 0..self.d1.len() {
            let mut row = vec![format!("{:e}", k as f64 * self.d1.dt())];
            for s in [&self.d1, &self.u1, &self.u2, &self.y1, &self.y2] {
                row.extend(s.sample(k).iter().map(|v| format!("{v:e}")));
            }
            w.write_record(&row)?;
        }
        w.flush()?;
        Ok(())
    }
}

fn check_dims(p: &OperatorSpec, c: &OperatorSpec, channels: usize) -> Result<()> {
    let dp = p.io_dimension()?;
    let dc = c.io_dimension()?;
    if dp != dc || dp != channels {
        return Err(Error::DimensionMismatch(format!(
            "loop needs equal dimensions: P {dp}, C {dc}, d1 {channels}"
        )));
    }
    Ok(())
}

/// Solves the loop sample by sample from zero state.
///
/// When at most one of P, C has direct feedthrough every step is explicit.
/// Otherwise each step runs successive substitution on `y2` and fails with
/// [`Error::WellPosedness`] if the tolerance is not met within the cap.
pub fn solve_feedback(
    p: &OperatorSpec,
    c: &OperatorSpec,
    d1: &SampledSignal,
    cfg: &SolverConfig,
) -> Result<LoopTrace> {
    check_dims(p, c, d1.channels())?;
    if !(cfg.tolerance > 0.0) || cfg.max_iterations == 0 {
        return domain("solver needs a positive tolerance and at least one iteration");
    }
    let m = d1.channels();
    let n = d1.len();
    let dt = d1.dt();
    let mut sp = p.instantiate(dt)?;
    let mut sc = c.instantiate(dt)?;
    let p_ft = p.has_direct_feedthrough();
    let c_ft = c.has_direct_feedthrough();
    let zeros = vec![0.0; m];

    let mut u1s = Vec::with_capacity(n * m);
    let mut u2s = Vec::with_capacity(n * m);
    let mut y1s = Vec::with_capacity(n * m);
    let mut y2s = Vec::with_capacity(n * m);
    let mut iterations = Vec::with_capacity(n);
    let mut max_residual: f64 = 0.0;
    let mut y2_guess = zeros.clone();

    for k in 0..n {
        let d = d1.sample(k);
        let add = |y2: &[f64]| -> Vec<f64> { d.iter().zip(y2).map(|(a, b)| a + b).collect() };
        let (u1, y1, y2, iters) = if !p_ft {
            let y1 = sp.output(&zeros);
            let y2 = sc.output(&y1);
            (add(&y2), y1, y2, 1)
        } else if !c_ft {
            let y2 = sc.output(&zeros);
            let u1 = add(&y2);
            let y1 = sp.output(&u1);
            (u1, y1, y2, 1)
        } else {
            let mut y2 = y2_guess.clone();
            let mut done = None;
            let mut residual = f64::INFINITY;
            for it in 1..=cfg.max_iterations {
                let u1 = add(&y2);
                let y1 = sp.output(&u1);
                let next = sc.output(&y1);
                residual = next
                    .iter()
                    .zip(&y2)
                    .fold(0.0_f64, |r, (a, b)| r.max((a - b).abs()));
                y2 = next;
                if !residual.is_finite() {
                    break;
                }
                if residual <= cfg.tolerance {
                    // Recompute u1, y1 from the converged y2 so the stored
                    // samples satisfy the loop equations exactly on the u side.
                    let u1 = add(&y2);
                    let y1 = sp.output(&u1);
                    done = Some((u1, y1, it));
                    break;
                }
            }
            let Some((u1, y1, it)) = done else {
                if y2.iter().any(|v| !v.is_finite()) {
                    return Err(Error::Divergence { step: k });
                }
                return Err(Error::WellPosedness { step: k, residual });
            };
            max_residual = max_residual.max(residual);
            (u1, y1, y2, it)
        };
        if u1.iter().chain(&y1).chain(&y2).any(|v| !v.is_finite()) {
            return Err(Error::Divergence { step: k });
        }
        sp.advance(&u1);
        sc.advance(&y1);
        y2_guess.clone_from(&y2);
        u1s.extend_from_slice(&u1);
        u2s.extend_from_slice(&y1);
        y1s.extend_from_slice(&y1);
        y2s.extend_from_slice(&y2);
        iterations.push(iters);
    }
    let sig = |v| SampledSignal::from_parts_unchecked(dt, m, v);
    Ok(LoopTrace {
        d1: d1.clone(),
        u1: sig(u1s),
        u2: sig(u2s),
        y1: sig(y1s),
        y2: sig(y2s),
        iterations,
        max_residual,
    })
}

/// Random disturbances for probes and gain estimates: the `pair_id`-th pair of
/// `cfg` with the amplitude pinned to `amplitude`.
fn disturbance_pair(
    cfg: &ExcitationConfig,
    amplitude: f64,
    pair_id: usize,
    channels: usize,
) -> Result<(SampledSignal, SampledSignal)> {
    let mut cfg = cfg.clone();
    cfg.amplitude.min = amplitude;
    cfg.amplitude.max = amplitude;
    cfg.draw_pair(pair_id, channels)
}

#[derive(Debug, Clone, Serialize)]
pub struct ProbeResult {
    pub tau: f64,
    pub trials: usize,
    pub converged: usize,
    /// Trials where per-step successive substitution hit its cap.
    pub solver_failures: usize,
    /// Trials whose trace overflowed. Not a well-posedness failure.
    pub diverged: usize,
    pub max_iterations_per_step: usize,
    pub first_failure: Option<String>,
    /// True when any trial ended in solver failure.
    pub flagged: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, serde::Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ProbeConfig {
    pub horizon: f64,
    pub dt: f64,
    pub amplitude: f64,
}

impl Default for ProbeConfig {
    fn default() -> Self {
        Self {
            horizon: 2.0,
            dt: 0.01,
            amplitude: 1.0,
        }
    }
}

/// For each τ, solves `P # (τC)` on `trials` random disturbances.
pub fn wellposedness_probe(
    p: &OperatorSpec,
    c: &OperatorSpec,
    tau_grid: &[f64],
    trials: usize,
    seed: u64,
    probe: &ProbeConfig,
    solver: &SolverConfig,
) -> Result<Vec<ProbeResult>> {
    if trials == 0 {
        return domain("probe needs at least one trial");
    }
    let dim = p.io_dimension()?;
    let cfg = ExcitationConfig {
        ensemble_size: trials.max(2),
        horizon: probe.horizon,
        dt: probe.dt,
        seed,
        support: crate::sampler::Support::FullHorizon,
        ..Default::default()
    };
    cfg.validate()?;
    tau_grid
        .iter()
        .map(|&tau| {
            if !(tau > 0.0 && tau.is_finite()) {
                return domain(format!("tau must be positive, got {tau}"));
            }
            let tc = OperatorSpec::scale(tau, c.clone());
            let outcomes: Vec<Result<LoopTrace>> = (0..trials)
                .into_par_iter()
                .map(|i| {
                    let (d, _) = disturbance_pair(&cfg, probe.amplitude, i, dim)?;
                    solve_feedback(p, &tc, &d, solver)
                })
                .collect();
            let mut r = ProbeResult {
                tau,
                trials,
                converged: 0,
                solver_failures: 0,
                diverged: 0,
                max_iterations_per_step: 0,
                first_failure: None,
                flagged: false,
            };
            for (i, o) in outcomes.into_iter().enumerate() {
                match o {
                    Ok(trace) => {
                        r.converged += 1;
                        let most = trace.iterations.iter().copied().max().unwrap_or(0);
                        r.max_iterations_per_step = r.max_iterations_per_step.max(most);
                    }
                    Err(e @ Error::WellPosedness { .. }) => {
                        r.solver_failures += 1;
                        r.first_failure.get_or_insert(format!("trial {i}: {e}"));
                    }
                    Err(Error::Divergence { .. }) => r.diverged += 1,
                    Err(e) => return Err(e),
                }
            }
            r.flagged = r.solver_failures > 0;
            Ok(r)
        })
        .collect()
}

fn ser_extended<S: Serializer>(v: &f64, s: S) -> std::result::Result<S::Ok, S::Error> {
    if v.is_finite() {
        s.serialize_f64(*v)
    } else {
        s.serialize_str("infinity")
    }
}

fn ser_extended_vec<S: Serializer>(v: &[f64], s: S) -> std::result::Result<S::Ok, S::Error> {
    use serde::ser::SerializeSeq;
    let mut seq = s.serialize_seq(Some(v.len()))?;
    for x in v {
        if x.is_finite() {
            seq.serialize_element(x)?;
        } else {
            seq.serialize_element("infinity")?;
        }
    }
    seq.end()
}

#[derive(Debug, Clone, Serialize)]
pub struct PairCurve {
    pub pair_id: usize,
    #[serde(rename = "T")]
    pub t: Vec<f64>,
    /// `γ_T(Δd1, (Δu1, Δu2))` at each `T`.
    #[serde(serialize_with = "ser_extended_vec")]
    pub gamma: Vec<f64>,
    pub divergent: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct AmplitudeGain {
    pub amplitude: f64,
    #[serde(serialize_with = "ser_extended")]
    pub sup_gain: f64,
    pub divergent: bool,
    pub pairs: Vec<PairCurve>,
}

#[derive(Debug, Clone, Serialize)]
pub struct GainEstimate {
    /// Max over all recorded values; infinity when any trace diverged.
    #[serde(serialize_with = "ser_extended")]
    pub sup_gain_over_pairs: f64,
    pub divergent: bool,
    pub per_amplitude: Vec<AmplitudeGain>,
    pub ensemble_size: usize,
    pub config_digest: String,
    pub seed: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, serde::Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct GainConfig {
    /// Disturbance ensemble; its amplitude range is replaced per entry of `amplitudes`.
    pub excitation: ExcitationConfig,
    pub amplitudes: Vec<f64>,
    /// A trace counts as divergent once `γ_T` exceeds this.
    pub divergence_gain: f64,
    pub solver: SolverConfig,
}

impl Default for GainConfig {
    fn default() -> Self {
        Self {
            excitation: ExcitationConfig {
                ensemble_size: 16,
                support: crate::sampler::Support::FullHorizon,
                ..Default::default()
            },
            amplitudes: vec![0.01, 0.1, 1.0, 10.0],
            divergence_gain: 1e6,
            solver: SolverConfig::default(),
        }
    }
}

/// Sampled lower bound on the incremental gain `d1 ↦ (u1, u2)` of the loop.
/// Falsifies stability claims; never proves them.
pub fn estimate_loop_incremental_gain(
    p: &OperatorSpec,
    c: &OperatorSpec,
    cfg: &GainConfig,
) -> Result<GainEstimate> {
    cfg.excitation.validate()?;
    if cfg.amplitudes.is_empty() || cfg.amplitudes.iter().any(|a| !(*a > 0.0 && a.is_finite())) {
        return Err(Error::Config("amplitudes must be nonempty and positive".into()));
    }
    if !(cfg.divergence_gain > 0.0) {
        return Err(Error::Config("divergence_gain must be positive".into()));
    }
    let dim = p.io_dimension()?;
    check_dims(p, c, dim)?;
    let grid = cfg.excitation.t_grid();
    let mut per_amplitude = Vec::with_capacity(cfg.amplitudes.len());
    for &amp in &cfg.amplitudes {
        let pairs: Vec<PairCurve> = (0..cfg.excitation.ensemble_size)
            .into_par_iter()
            .map(|i| pair_curve(p, c, cfg, &grid, amp, i, dim))
            .collect::<Result<_>>()?;
        let divergent = pairs.iter().any(|c| c.divergent);
        let sup = if divergent {
            f64::INFINITY
        } else {
            pairs
                .iter()
                .flat_map(|c| c.gamma.iter().copied())
                .fold(0.0, f64::max)
        };
        per_amplitude.push(AmplitudeGain {
            amplitude: amp,
            sup_gain: sup,
            divergent,
            pairs,
        });
    }
    let divergent = per_amplitude.iter().any(|a| a.divergent);
    let sup = per_amplitude.iter().map(|a| a.sup_gain).fold(0.0, f64::max);
    Ok(GainEstimate {
        sup_gain_over_pairs: sup,
        divergent,
        per_amplitude,
        ensemble_size: cfg.excitation.ensemble_size,
        config_digest: cfg.excitation.digest(),
        seed: cfg.excitation.seed,
    })
}

fn pair_curve(
    p: &OperatorSpec,
    c: &OperatorSpec,
    cfg: &GainConfig,
    grid: &[f64],
    amplitude: f64,
    pair_id: usize,
    dim: usize,
) -> Result<PairCurve> {
    let (da, db) = disturbance_pair(&cfg.excitation, amplitude, pair_id, dim)?;
    let diverged = PairCurve {
        pair_id,
        t: grid.to_vec(),
        gamma: vec![f64::INFINITY; grid.len()],
        divergent: true,
    };
    let (ta, tb) = match (
        solve_feedback(p, c, &da, &cfg.solver),
        solve_feedback(p, c, &db, &cfg.solver),
    ) {
        (Ok(a), Ok(b)) => (a, b),
        (Err(Error::Divergence { .. }), _) | (_, Err(Error::Divergence { .. })) => {
            return Ok(diverged)
        }
        (Err(e), _) | (_, Err(e)) => return Err(e),
    };
    let dd = da.sub(&db)?;
    let de = ta.u1.sub(&tb.u1)?.hstack(&ta.u2.sub(&tb.u2)?)?;
    // γ_T needs a common channel count: pad Δd1 with zeros to match (Δu1, Δu2).
    let dd_padded = dd.hstack(&SampledSignal::zeros(dd.dt(), dd.len(), dd.channels())?)?;
    let mut ts = Vec::with_capacity(grid.len());
    let mut gamma = Vec::with_capacity(grid.len());
    let mut divergent = false;
    for &t in grid {
        let gp = gain_phase_t(&dd_padded, &de, t)?;
        if gp.gain.is_infinite() {
            continue;
        }
        if gp.gain > cfg.divergence_gain || !gp.gain.is_finite() {
            divergent = true;
        }
        ts.push(t);
        gamma.push(gp.gain);
    }
    Ok(PairCurve {
        pair_id,
        t: ts,
        gamma,
        divergent,
    })
}
