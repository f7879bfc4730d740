//! Deterministic input ensembles for SRG sampling.
//!
//! Pair `i` draws from its own ChaCha stream (`seed`, stream `i`), so a pair's
//! trajectories do not depend on ensemble size, thread count or the order in
//! which pairs are processed.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
use crate::signal::SampledSignal;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SignalFamily {
    /// White noise through a first-order low-pass with random bandwidth.
    FilteredNoise,
    /// Sum of 3 to 6 sinusoids with random frequencies and phases.
    Multisine,
    /// Piecewise-constant levels with 2 to 6 random switching times.
    StepMixture,
    /// Linear frequency sweep.
    Chirp,
    /// `±e^{r(t − t_end)}` with `r` from a dyadic grid; grows toward the end of
    /// the support. Probes the extended-space behavior of unstable loops.
    Exponential,
}

impl SignalFamily {
    pub const ALL: [SignalFamily; 5] = [
        SignalFamily::FilteredNoise,
        SignalFamily::Multisine,
        SignalFamily::StepMixture,
        SignalFamily::Chirp,
        SignalFamily::Exponential,
    ];
}

/// Rates used by [`SignalFamily::Exponential`].
pub const EXPONENTIAL_RATES: [f64; 5] = [0.25, 0.5, 1.0, 2.0, 4.0];

/// Where the input is nonzero.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case", deny_unknown_fields)]
pub enum Support {
    /// Nonzero on the first `fraction` of the horizon with smooth tapers at
    /// both ends, leaving the rest for transients to decay.
    Windowed { fraction: f64 },
    /// Nonzero on the whole horizon, untapered.
    FullHorizon,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum InputShaping {
    None,
    /// Replace each drawn signal `w` by its forward difference
    /// `u_k = (w_{k+1} − w_k)/dt` with `w_N = 0`.
    Derivative,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AmplitudeRange {
    pub min: f64,
    pub max: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ExcitationConfig {
    pub ensemble_size: usize,
    pub horizon: f64,
    pub dt: f64,
    pub families: Vec<SignalFamily>,
    /// Drawn log-uniformly.
    pub amplitude: AmplitudeRange,
    pub seed: u64,
    pub tail_tolerance: f64,
    pub tail_window: f64,
    /// Truncation horizons for hard sampling; `None` means 16 log-spaced
    /// values over `[4dt, horizon]`.
    pub hard_t_grid: Option<Vec<f64>>,
    /// Odd pairs are perturbations `u2 = u1 + ε·δ` with ε cycling through these.
    pub perturbation_scales: Vec<f64>,
    pub support: Support,
    pub shaping: InputShaping,
}

impl Default for ExcitationConfig {
    fn default() -> Self {
        Self {
            ensemble_size: 200,
            horizon: 20.0,
            dt: 0.01,
            families: vec![
                SignalFamily::FilteredNoise,
                SignalFamily::Multisine,
                SignalFamily::StepMixture,
                SignalFamily::Chirp,
            ],
            amplitude: AmplitudeRange { min: 0.1, max: 3.0 },
            seed: 0,
            tail_tolerance: 1e-4,
            tail_window: 0.25,
            hard_t_grid: None,
            perturbation_scales: vec![1e-2, 1e-1, 1.0],
            support: Support::Windowed { fraction: 0.5 },
            shaping: InputShaping::None,
        }
    }
}

fn config_err<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::Config(msg.into()))
}

impl ExcitationConfig {
    pub fn samples(&self) -> usize {
        (self.horizon / self.dt).round() as usize
    }

    pub fn validate(&self) -> Result<()> {
        if self.ensemble_size < 2 {
            return config_err("ensemble_size must be at least 2");
        }
        if !(self.dt > 0.0 && self.dt.is_finite()) {
            return config_err(format!("dt must be positive, got {}", self.dt));
        }
        if !(self.horizon.is_finite() && self.horizon >= 2.0 * self.dt) {
            return config_err("horizon must cover at least two samples");
        }
        if self.families.is_empty() {
            return config_err("at least one signal family is required");
        }
        let AmplitudeRange { min, max } = self.amplitude;
        if !(min > 0.0 && min <= max && max.is_finite()) {
            return config_err(format!("amplitude range needs 0 < min <= max, got [{min}, {max}]"));
        }
        if !(self.tail_tolerance > 0.0 && self.tail_tolerance < 1.0) {
            return config_err("tail_tolerance must lie in (0, 1)");
        }
        if !(self.tail_window > 0.0 && self.tail_window < 1.0) {
            return config_err("tail_window must lie in (0, 1)");
        }
        if self.perturbation_scales.is_empty()
            || self
                .perturbation_scales
                .iter()
                .any(|e| !(*e > 0.0 && e.is_finite()))
        {
            return config_err("perturbation_scales must be nonempty and positive");
        }
        if let Support::Windowed { fraction } = self.support {
            if !(fraction > 0.0 && fraction <= 1.0) {
                return config_err("windowed support fraction must lie in (0, 1]");
            }
        }
        if let Some(grid) = &self.hard_t_grid {
            if grid.is_empty() {
                return config_err("hard_t_grid must be nonempty");
            }
            let horizon = self.samples() as f64 * self.dt;
            for (i, t) in grid.iter().enumerate() {
                if !(*t > 0.0 && *t <= horizon * (1.0 + 1e-12)) {
                    return config_err(format!("hard_t_grid value {t} outside (0, {horizon}]"));
                }
                if i > 0 && *t <= grid[i - 1] {
                    return config_err("hard_t_grid must be strictly increasing");
                }
            }
        }
        Ok(())
    }

    /// Truncation horizons used by hard sampling.
    pub fn t_grid(&self) -> Vec<f64> {
        if let Some(grid) = &self.hard_t_grid {
            return grid.clone();
        }
        let horizon = self.samples() as f64 * self.dt;
        let lo = (4.0 * self.dt).min(horizon);
        let count = 16;
        let ratio = (horizon / lo).ln();
        let mut grid: Vec<f64> = (0..count)
            .map(|i| lo * (ratio * i as f64 / (count - 1) as f64).exp())
            .collect();
        grid[count - 1] = horizon;
        grid.dedup();
        grid
    }

    /// Hex SHA-256 of the canonical JSON form.
    pub fn digest(&self) -> String {
        let json = serde_json::to_vec(self).expect("config serializes");
        Sha256::digest(&json)
            .iter()
            .map(|b| format!("{b:02x}"))
            .collect()
    }

    /// Input pair number `pair_id`.
    pub fn draw_pair(&self, pair_id: usize, channels: usize) -> Result<(SampledSignal, SampledSignal)> {
        let n = self.samples();
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        rng.set_stream(pair_id as u64);
        let u1 = self.draw_signal(&mut rng, n, channels);
        let u2 = if pair_id.is_multiple_of(2) {
            self.draw_signal(&mut rng, n, channels)
        } else {
            let scales = &self.perturbation_scales;
            let eps = scales[(pair_id / 2) % scales.len()];
            let delta = self.draw_signal(&mut rng, n, channels);
            u1.iter().zip(&delta).map(|(a, d)| a + eps * d).collect()
        };
        let (u1, u2) = match self.shaping {
            InputShaping::None => (u1, u2),
            InputShaping::Derivative => (
                forward_difference(&u1, channels, self.dt),
                forward_difference(&u2, channels, self.dt),
            ),
        };
        Ok((
            SampledSignal::new(self.dt, channels, u1)?,
            SampledSignal::new(self.dt, channels, u2)?,
        ))
    }

    fn draw_signal(&self, rng: &mut ChaCha8Rng, n: usize, channels: usize) -> Vec<f64> {
        let support_len = match self.support {
            Support::Windowed { fraction } => ((fraction * n as f64).round() as usize).clamp(2, n),
            Support::FullHorizon => n,
        };
        let mut out = vec![0.0; n * channels];
        for c in 0..channels {
            let family = self.families[rng.random_range(0..self.families.len())];
            let ln_a = rng.random_range(self.amplitude.min.ln()..=self.amplitude.max.ln());
            let amp = ln_a.exp();
            let shape = draw_shape(rng, family, support_len, self.dt);
            for (k, v) in shape.into_iter().enumerate() {
                let taper = match self.support {
                    Support::Windowed { .. } => taper(k, support_len),
                    Support::FullHorizon => 1.0,
                };
                out[k * channels + c] = amp * taper * v;
            }
        }
        out
    }
}

/// Raised-sine taper over the first and last 10% of the support, zero at sample 0.
fn taper(k: usize, len: usize) -> f64 {
    let ramp = (len as f64 * 0.1).max(1.0);
    let edge = (k as f64).min((len - 1 - k) as f64 + 1.0);
    if edge >= ramp {
        1.0
    } else {
        let s = (std::f64::consts::FRAC_PI_2 * edge / ramp).sin();
        s * s
    }
}

fn forward_difference(w: &[f64], channels: usize, dt: f64) -> Vec<f64> {
    let n = w.len() / channels;
    let mut u = vec![0.0; w.len()];
    for k in 0..n {
        for c in 0..channels {
            let next = if k + 1 < n { w[(k + 1) * channels + c] } else { 0.0 };
            u[k * channels + c] = (next - w[k * channels + c]) / dt;
        }
    }
    u
}

fn log_uniform(rng: &mut ChaCha8Rng, lo: f64, hi: f64) -> f64 {
    rng.random_range(lo.ln()..hi.ln()).exp()
}

/// Unit-scale waveform of `len` samples.
fn draw_shape(rng: &mut ChaCha8Rng, family: SignalFamily, len: usize, dt: f64) -> Vec<f64> {
    let t_end = len as f64 * dt;
    let v: Vec<f64> = match family {
        SignalFamily::FilteredNoise => {
            let bw = log_uniform(rng, 0.2, 5.0);
            let a = (-bw * dt).exp();
            let mut x = 0.0;
            (0..len)
                .map(|_| {
                    let n: f64 = rng.sample(StandardNormal);
                    x = a * x + (1.0 - a) * n;
                    x
                })
                .collect()
        }
        SignalFamily::Multisine => {
            let m = rng.random_range(3..=6);
            let comps: Vec<(f64, f64, f64)> = (0..m)
                .map(|_| {
                    (
                        log_uniform(rng, 0.1, 10.0),
                        rng.random_range(0.0..std::f64::consts::TAU),
                        rng.random_range(0.2..1.0),
                    )
                })
                .collect();
            (0..len)
                .map(|k| {
                    let t = k as f64 * dt;
                    comps.iter().map(|(w, p, a)| a * (w * t + p).sin()).sum()
                })
                .collect()
        }
        SignalFamily::StepMixture => {
            let m = rng.random_range(2..=6);
            let mut switches: Vec<(f64, f64)> = (0..m)
                .map(|_| (rng.random_range(0.0..t_end), rng.random_range(-1.0..1.0)))
                .collect();
            switches.sort_by(|a, b| a.0.total_cmp(&b.0));
            (0..len)
                .map(|k| {
                    let t = k as f64 * dt;
                    switches
                        .iter()
                        .take_while(|(ts, _)| *ts <= t)
                        .last()
                        .map_or(0.0, |(_, lvl)| *lvl)
                })
                .collect()
        }
        SignalFamily::Chirp => {
            let w0 = log_uniform(rng, 0.05, 0.5);
            let w1 = log_uniform(rng, 2.0, 10.0);
            (0..len)
                .map(|k| {
                    let t = k as f64 * dt;
                    (w0 * t + (w1 - w0) * t * t / (2.0 * t_end)).sin()
                })
                .collect()
        }
        SignalFamily::Exponential => {
            let r = EXPONENTIAL_RATES[rng.random_range(0..EXPONENTIAL_RATES.len())];
            let sign = if rng.random_bool(0.5) { 1.0 } else { -1.0 };
            (0..len)
                .map(|k| sign * (r * (k as f64 * dt - t_end)).exp())
                .collect()
        }
    };
    let peak = v.iter().fold(0.0_f64, |m, x| m.max(x.abs()));
    if peak > 0.0 {
        v.into_iter().map(|x| x / peak).collect()
    } else {
        v
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn default_grid_shape() {
        let cfg = ExcitationConfig::default();
        let g = cfg.t_grid();
        assert_eq!(g.len(), 16);
        assert!((g[0] - 0.04).abs() < 1e-12);
        assert_eq!(*g.last().unwrap(), 20.0);
        assert!(g.windows(2).all(|w| w[0] < w[1]));
    }

    #[test]
    fn pairs_are_reproducible_and_distinct() {
        let cfg = ExcitationConfig::default();
        let a = cfg.draw_pair(5, 1).unwrap();
        let b = cfg.draw_pair(5, 1).unwrap();
        assert_eq!(a, b);
        let c = cfg.draw_pair(6, 1).unwrap();
        assert_ne!(a.0, c.0);
    }

    #[test]
    fn windowed_support_is_zero_after_window() {
        let cfg = ExcitationConfig::default();
        let (u1, u2) = cfg.draw_pair(3, 2).unwrap();
        let n = cfg.samples();
        for u in [u1, u2] {
            assert!(u.values()[n..].iter().all(|v| *v == 0.0));
            assert_eq!(u.sample(0), &[0.0, 0.0]);
        }
    }

    #[test]
    fn derivative_shaping_sums_to_zero() {
        let cfg = ExcitationConfig {
            shaping: InputShaping::Derivative,
            ..Default::default()
        };
        let (u, _) = cfg.draw_pair(1, 1).unwrap();
        let total: f64 = u.values().iter().sum::<f64>() * cfg.dt;
        assert!(total.abs() < 1e-9);
    }

    #[test]
    fn rejects_bad_configs() {
        let bad = [
            ExcitationConfig { ensemble_size: 1, ..Default::default() },
            ExcitationConfig { tail_tolerance: 1.0, ..Default::default() },
            ExcitationConfig { families: vec![], ..Default::default() },
            ExcitationConfig { hard_t_grid: Some(vec![1.0, 1.0]), ..Default::default() },
            ExcitationConfig { hard_t_grid: Some(vec![1.0, 30.0]), ..Default::default() },
            ExcitationConfig { amplitude: AmplitudeRange { min: 2.0, max: 1.0 }, ..Default::default() },
        ];
        for cfg in bad {
            assert!(matches!(cfg.validate(), Err(Error::Config(_))), "{cfg:?}");
        }
        ExcitationConfig::default().validate().unwrap();
    }

    #[test]
    fn digest_tracks_content() {
        let a = ExcitationConfig::default();
        let b = ExcitationConfig { seed: 1, ..Default::default() };
        assert_eq!(a.digest(), ExcitationConfig::default().digest());
        assert_ne!(a.digest(), b.digest());
        assert_eq!(a.digest().len(), 64);
    }
}
