//! Uniformly sampled multichannel signals and the gain/phase functionals.
//!
//! A [`SampledSignal`] stands in for an element of the extended signal space:
//! sample `k` is the value on the cell `[k·dt, (k+1)·dt)`, and integrals are
//! rectangle-rule sums scaled by `dt`. The horizon of a signal with `N`
//! samples is therefore `N·dt`.

use std::io::{Read, Write};

use serde::{Deserialize, Serialize};

use crate::error::{domain, Error, Result};

/// Relative tolerance used when validating the time column of a CSV signal.
pub const CSV_TIME_RTOL: f64 = 1e-9;

/// Grid snapping slack: `T/dt` values within this of an integer snap up to it.
const GRID_SNAP_SLACK: f64 = 1e-9;

/// A uniformly sampled real signal with `channels` columns.
///
/// Values are stored row-major: `values[k * channels + c]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SampledSignal {
    dt: f64,
    channels: usize,
    values: Vec<f64>,
}

impl SampledSignal {
    pub fn new(dt: f64, channels: usize, values: Vec<f64>) -> Result<Self> {
        if !(dt > 0.0) || !dt.is_finite() {
            return domain(format!("dt must be positive and finite, got {dt}"));
        }
        if channels == 0 {
            return domain("signal must have at least one channel");
        }
        if values.is_empty() || !values.len().is_multiple_of(channels) {
            return Err(Error::DimensionMismatch(format!(
                "{} values do not form a nonempty {}-channel signal",
                values.len(),
                channels
            )));
        }
        if let Some(i) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::NonFinite {
                sample: i / channels,
                channel: i % channels,
            });
        }
        Ok(Self {
            dt,
            channels,
            values,
        })
    }

    /// Builds a signal by evaluating `f(t, channel)` at `t = k·dt`.
    pub fn from_fn(
        dt: f64,
        len: usize,
        channels: usize,
        mut f: impl FnMut(f64, usize) -> f64,
    ) -> Result<Self> {
        let mut values = Vec::with_capacity(len * channels);
        for k in 0..len {
            let t = k as f64 * dt;
            for c in 0..channels {
                values.push(f(t, c));
            }
        }
        Self::new(dt, channels, values)
    }

    pub fn zeros(dt: f64, len: usize, channels: usize) -> Result<Self> {
        Self::new(dt, channels, vec![0.0; len * channels])
    }

    /// Internal constructor for values already known to be valid.
    pub(crate) fn from_parts_unchecked(dt: f64, channels: usize, values: Vec<f64>) -> Self {
        debug_assert!(dt > 0.0 && channels > 0 && values.len().is_multiple_of(channels));
        Self {
            dt,
            channels,
            values,
        }
    }

    pub fn dt(&self) -> f64 {
        self.dt
    }

    pub fn channels(&self) -> usize {
        self.channels
    }

    /// Number of time samples `N`.
    pub fn len(&self) -> usize {
        self.values.len() / self.channels
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// `N·dt`.
    pub fn horizon(&self) -> f64 {
        self.len() as f64 * self.dt
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn into_values(self) -> Vec<f64> {
        self.values
    }

    /// The channel values at sample `k`.
    pub fn sample(&self, k: usize) -> &[f64] {
        &self.values[k * self.channels..(k + 1) * self.channels]
    }

    pub fn is_zero(&self) -> bool {
        self.values.iter().all(|&v| v == 0.0)
    }

    pub fn is_conformable(&self, other: &SampledSignal) -> bool {
        self.dt == other.dt && self.channels == other.channels && self.len() == other.len()
    }

    pub(crate) fn check_conformable(&self, other: &SampledSignal) -> Result<()> {
        if self.is_conformable(other) {
            Ok(())
        } else {
            Err(Error::DimensionMismatch(format!(
                "signals not conformable: (dt={}, ch={}, N={}) vs (dt={}, ch={}, N={})",
                self.dt,
                self.channels,
                self.len(),
                other.dt,
                other.channels,
                other.len()
            )))
        }
    }

    pub fn sub(&self, other: &SampledSignal) -> Result<SampledSignal> {
        self.check_conformable(other)?;
        let values = self
            .values
            .iter()
            .zip(&other.values)
            .map(|(a, b)| a - b)
            .collect();
        Ok(Self::from_parts_unchecked(self.dt, self.channels, values))
    }

    pub fn add(&self, other: &SampledSignal) -> Result<SampledSignal> {
        self.check_conformable(other)?;
        let values = self
            .values
            .iter()
            .zip(&other.values)
            .map(|(a, b)| a + b)
            .collect();
        Ok(Self::from_parts_unchecked(self.dt, self.channels, values))
    }

    pub fn scaled(&self, factor: f64) -> SampledSignal {
        let values = self.values.iter().map(|v| factor * v).collect();
        Self::from_parts_unchecked(self.dt, self.channels, values)
    }

    /// Stacks the channels of `self` and `other` side by side.
    pub fn hstack(&self, other: &SampledSignal) -> Result<SampledSignal> {
        if self.dt != other.dt || self.len() != other.len() {
            return Err(Error::DimensionMismatch(
                "cannot stack signals with different dt or length".into(),
            ));
        }
        let channels = self.channels + other.channels;
        let mut values = Vec::with_capacity(self.len() * channels);
        for k in 0..self.len() {
            values.extend_from_slice(self.sample(k));
            values.extend_from_slice(other.sample(k));
        }
        Ok(Self::from_parts_unchecked(self.dt, channels, values))
    }

    /// Number of samples with `t ≤ T` once `T` is snapped down to the grid.
    pub fn samples_through(&self, t: f64) -> Result<usize> {
        if !(t >= 0.0) {
            return domain(format!("truncation time must be nonnegative, got {t}"));
        }
        let last = (t / self.dt + GRID_SNAP_SLACK).floor();
        if last >= self.len() as f64 {
            Ok(self.len())
        } else {
            Ok(last as usize + 1)
        }
    }

    /// Zeroes every sample strictly after `T` (grid-snapped). Length is unchanged.
    pub fn truncate(&self, t: f64) -> Result<SampledSignal> {
        let keep = self.samples_through(t)?;
        Ok(self.truncate_samples(keep))
    }

    /// Keeps the first `keep` samples and zeroes the rest.
    pub fn truncate_samples(&self, keep: usize) -> SampledSignal {
        let mut out = self.clone();
        let cut = keep.min(self.len()) * self.channels;
        out.values[cut..].iter_mut().for_each(|v| *v = 0.0);
        out
    }

    pub fn norm(&self) -> f64 {
        self.energy().sqrt()
    }

    /// `‖u‖²`.
    pub fn energy(&self) -> f64 {
        self.dt * self.values.iter().map(|v| v * v).sum::<f64>()
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().fold(0.0_f64, |m, v| m.max(v.abs()))
    }

    pub fn read_csv<R: Read>(reader: R) -> Result<SampledSignal> {
        let mut rdr = csv::ReaderBuilder::new().has_headers(true).from_reader(reader);
        let headers = rdr.headers()?.clone();
        if headers.is_empty() || &headers[0] != "t" {
            return Err(Error::Parse("signal CSV header must start with `t`".into()));
        }
        let channels = headers.len() - 1;
        if channels == 0 {
            return Err(Error::Parse("signal CSV has no channel columns".into()));
        }
        for (c, h) in headers.iter().skip(1).enumerate() {
            if h != format!("ch{c}") {
                return Err(Error::Parse(format!(
                    "column {} must be named `ch{c}`, found `{h}`",
                    c + 1
                )));
            }
        }
        let mut times = Vec::new();
        let mut values = Vec::new();
        for (row, rec) in rdr.records().enumerate() {
            let rec = rec?;
            let parse = |i: usize| -> Result<f64> {
                rec[i].trim().parse::<f64>().map_err(|e| {
                    Error::Parse(format!("line {}, column {}: {e}", row + 2, i + 1))
                })
            };
            times.push(parse(0)?);
            for c in 0..channels {
                values.push(parse(c + 1)?);
            }
        }
        if times.len() < 2 {
            return Err(Error::Parse(
                "signal CSV needs at least two rows to determine dt".into(),
            ));
        }
        let dt = times[1] - times[0];
        if !(dt > 0.0) {
            return Err(Error::Parse("time column must be increasing".into()));
        }
        for (k, &t) in times.iter().enumerate() {
            let expected = times[0] + k as f64 * dt;
            if (t - expected).abs() > CSV_TIME_RTOL * expected.abs().max(dt) {
                return Err(Error::Parse(format!(
                    "line {}: t = {t} is off the uniform grid (expected {expected})",
                    k + 2
                )));
            }
        }
        if times[0].abs() > CSV_TIME_RTOL * dt {
            return Err(Error::Parse("time column must start at 0".into()));
        }
        SampledSignal::new(dt, channels, values)
    }

    pub fn write_csv<W: Write>(&self, writer: W) -> Result<()> {
        let mut wtr = csv::Writer::from_writer(writer);
        let mut header = vec!["t".to_string()];
        header.extend((0..self.channels).map(|c| format!("ch{c}")));
        wtr.write_record(&header)?;
        for k in 0..self.len() {
            let mut rec = vec![format!("{}", k as f64 * self.dt)];
            rec.extend(self.sample(k).iter().map(|v| format!("{v}")));
            wtr.write_record(&rec)?;
        }
        wtr.flush()?;
        Ok(())
    }
}

/// `dt · Σ_k Σ_c u[k,c]·v[k,c]`.
pub fn inner_product(u: &SampledSignal, v: &SampledSignal) -> Result<f64> {
    u.check_conformable(v)?;
    Ok(u.dt * u.values.iter().zip(&v.values).map(|(a, b)| a * b).sum::<f64>())
}

pub fn truncate(u: &SampledSignal, t: f64) -> Result<SampledSignal> {
    u.truncate(t)
}

/// Incremental gain and phase of a signal pair.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GainPhasePair {
    /// `‖v‖/‖u‖`, or `+∞` when `u = 0`.
    pub gain: f64,
    /// In `[0, π]`; `0` when either signal is zero.
    pub phase: f64,
    /// Set when `phase` is the zero-signal default rather than a computed angle.
    pub phase_defaulted: bool,
}

impl GainPhasePair {
    /// True when both signals were nonzero, i.e. the pair yields an SRG point.
    pub fn is_srg_point(&self) -> bool {
        !self.phase_defaulted && self.gain.is_finite() && self.gain > 0.0
    }
}

pub fn gain(u: &SampledSignal, v: &SampledSignal) -> Result<f64> {
    Ok(gain_phase(u, v)?.gain)
}

pub fn phase(u: &SampledSignal, v: &SampledSignal) -> Result<f64> {
    Ok(gain_phase(u, v)?.phase)
}

pub fn gain_phase(u: &SampledSignal, v: &SampledSignal) -> Result<GainPhasePair> {
    u.check_conformable(v)?;
    let nu = u.norm();
    let nv = v.norm();
    let gain = if nu > 0.0 { nv / nu } else { f64::INFINITY };
    if nu > 0.0 && nv > 0.0 {
        let cos = (inner_product(u, v)? / (nu * nv)).clamp(-1.0, 1.0);
        Ok(GainPhasePair {
            gain,
            phase: cos.acos(),
            phase_defaulted: false,
        })
    } else {
        Ok(GainPhasePair {
            gain,
            phase: 0.0,
            phase_defaulted: true,
        })
    }
}

/// Gain and phase of the pair after truncation at `T`.
pub fn gain_phase_t(u: &SampledSignal, v: &SampledSignal, t: f64) -> Result<GainPhasePair> {
    u.check_conformable(v)?;
    gain_phase(&u.truncate(t)?, &v.truncate(t)?)
}

/// Fraction of the signal energy contained in the final `fraction_window`
/// portion of the horizon. Zero for the zero signal.
pub fn tail_energy_fraction(u: &SampledSignal, fraction_window: f64) -> Result<f64> {
    if !(fraction_window > 0.0 && fraction_window < 1.0) {
        return domain(format!(
            "tail window must lie in (0, 1), got {fraction_window}"
        ));
    }
    let n = u.len();
    let tail = ((fraction_window * n as f64).round() as usize).clamp(1, n);
    let split = (n - tail) * u.channels;
    let total: f64 = u.values.iter().map(|v| v * v).sum();
    if total == 0.0 {
        return Ok(0.0);
    }
    let tail_energy: f64 = u.values[split..].iter().map(|v| v * v).sum();
    Ok((tail_energy / total).clamp(0.0, 1.0))
}
