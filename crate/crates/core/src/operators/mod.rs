//! Causal operators on sampled signals.
//!
//! Every operator starts from zero state, so the zero input maps to the zero
//! output. Evaluation runs sample by sample through an [`OperatorState`],
//! which is also what the feedback solver steps.

mod lti;
mod nonlinearity;

pub use lti::{check_shapes, discretize_lti, DiscreteLti, Matrix};
pub use nonlinearity::{SectorShape, StaticNonlinearityKind};

use nalgebra::DVector;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{domain, Error, Result};
use crate::signal::SampledSignal;

/// Declarative description of a causal system.
///
/// JSON form is `{"variant": "...", "params": {...}}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(
    tag = "variant",
    content = "params",
    rename_all = "snake_case",
    deny_unknown_fields
)]
pub enum OperatorSpec {
    /// Continuous-time `ẋ = Ax + Bu`, `y = Cx + Du`, discretized by zero-order hold.
    LtiStateSpace {
        a: Matrix,
        b: Matrix,
        c: Matrix,
        d: Matrix,
    },
    StaticNonlinearity {
        kind: StaticNonlinearityKind,
        dimension: usize,
    },
    /// Channelwise integrator. The discrete output is the cell average
    /// `y_k = x_k + dt/2·u_k`, which keeps `⟨u_T, y_T⟩ = ½|x(T⁺)|²` exact
    /// under the rectangle-rule inner product.
    Integrator { dimension: usize },
    Series { stages: Vec<OperatorSpec> },
    ParallelSum { terms: Vec<OperatorSpec> },
    Scale { factor: f64, inner: Box<OperatorSpec> },
    Negate { inner: Box<OperatorSpec> },
}

impl OperatorSpec {
    pub fn identity(dimension: usize) -> Self {
        Self::static_gain(1.0, dimension)
    }

    /// `u ↦ k·u`, built as the linear sector `(k, k)`.
    pub fn static_gain(k: f64, dimension: usize) -> Self {
        OperatorSpec::StaticNonlinearity {
            kind: StaticNonlinearityKind::Sector {
                a: k,
                b: k,
                shape: SectorShape::Linear,
            },
            dimension,
        }
    }

    pub fn static_map(kind: StaticNonlinearityKind, dimension: usize) -> Self {
        OperatorSpec::StaticNonlinearity { kind, dimension }
    }

    pub fn integrator(dimension: usize) -> Self {
        OperatorSpec::Integrator { dimension }
    }

    /// Scalar first-order lag `gain/(s + pole)`.
    pub fn first_order_lag(pole: f64, gain: f64) -> Self {
        OperatorSpec::LtiStateSpace {
            a: Matrix::scalar(-pole),
            b: Matrix::scalar(1.0),
            c: Matrix::scalar(gain),
            d: Matrix::scalar(0.0),
        }
    }

    /// `1/(s + 1)`.
    pub fn lag() -> Self {
        Self::first_order_lag(1.0, 1.0)
    }

    pub fn series(stages: Vec<OperatorSpec>) -> Self {
        OperatorSpec::Series { stages }
    }

    pub fn parallel_sum(terms: Vec<OperatorSpec>) -> Self {
        OperatorSpec::ParallelSum { terms }
    }

    pub fn scale(factor: f64, inner: OperatorSpec) -> Self {
        OperatorSpec::Scale {
            factor,
            inner: Box::new(inner),
        }
    }

    pub fn negate(inner: OperatorSpec) -> Self {
        OperatorSpec::Negate {
            inner: Box::new(inner),
        }
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let spec: OperatorSpec = serde_json::from_str(text)?;
        spec.validate()?;
        Ok(spec)
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    /// Checks parameters and interface dimensions recursively.
    pub fn validate(&self) -> Result<()> {
        self.io_dimension().map(|_| ())
    }

    /// Input (= output) dimension, validating along the way.
    pub fn io_dimension(&self) -> Result<usize> {
        match self {
            OperatorSpec::LtiStateSpace { a, b, c, d } => Ok(check_shapes(a, b, c, d)?.1),
            OperatorSpec::StaticNonlinearity { kind, dimension } => {
                kind.validate()?;
                positive_dim(*dimension)
            }
            OperatorSpec::Integrator { dimension } => positive_dim(*dimension),
            OperatorSpec::Series { stages: list } | OperatorSpec::ParallelSum { terms: list } => {
                let Some(first) = list.first() else {
                    return domain("composition needs at least one operator");
                };
                let dim = first.io_dimension()?;
                for (i, op) in list.iter().enumerate().skip(1) {
                    let d = op.io_dimension()?;
                    if d != dim {
                        return Err(Error::DimensionMismatch(format!(
                            "composition member {i} has dimension {d}, expected {dim}"
                        )));
                    }
                }
                Ok(dim)
            }
            OperatorSpec::Scale { factor, inner } => {
                if !factor.is_finite() {
                    return domain(format!("scale factor must be finite, got {factor}"));
                }
                inner.io_dimension()
            }
            OperatorSpec::Negate { inner } => inner.io_dimension(),
        }
    }

    /// True iff output sample k can depend on input sample k.
    pub fn has_direct_feedthrough(&self) -> bool {
        match self {
            OperatorSpec::LtiStateSpace { d, .. } => d.data.iter().any(|v| *v != 0.0),
            OperatorSpec::StaticNonlinearity { .. } => true,
            OperatorSpec::Integrator { .. } => true,
            OperatorSpec::Series { stages } => stages.iter().all(|s| s.has_direct_feedthrough()),
            OperatorSpec::ParallelSum { terms } => terms.iter().any(|s| s.has_direct_feedthrough()),
            OperatorSpec::Scale { factor, inner } => *factor != 0.0 && inner.has_direct_feedthrough(),
            OperatorSpec::Negate { inner } => inner.has_direct_feedthrough(),
        }
    }

    /// Fresh zero-state stepper at sample period `dt`.
    pub fn instantiate(&self, dt: f64) -> Result<OperatorState> {
        if !(dt > 0.0 && dt.is_finite()) {
            return domain(format!("dt must be positive, got {dt}"));
        }
        let dim = self.io_dimension()?;
        let kind = match self {
            OperatorSpec::LtiStateSpace { a, b, c, d } => {
                let sys = discretize_lti(a, b, c, d, dt)?;
                let x = DVector::zeros(sys.states());
                StateKind::Lti { sys, x }
            }
            OperatorSpec::StaticNonlinearity { kind, .. } => StateKind::Static(kind.clone()),
            OperatorSpec::Integrator { dimension } => StateKind::Integrator {
                dt,
                x: vec![0.0; *dimension],
            },
            OperatorSpec::Series { stages } => StateKind::Series(
                stages
                    .iter()
                    .map(|s| s.instantiate(dt))
                    .collect::<Result<_>>()?,
            ),
            OperatorSpec::ParallelSum { terms } => StateKind::Parallel(
                terms
                    .iter()
                    .map(|s| s.instantiate(dt))
                    .collect::<Result<_>>()?,
            ),
            OperatorSpec::Scale { factor, inner } => {
                StateKind::Scale(*factor, Box::new(inner.instantiate(dt)?))
            }
            OperatorSpec::Negate { inner } => StateKind::Negate(Box::new(inner.instantiate(dt)?)),
        };
        Ok(OperatorState { dim, kind })
    }

    /// Runs the operator from zero state over the whole input.
    pub fn evaluate(&self, u: &SampledSignal) -> Result<SampledSignal> {
        let dim = self.io_dimension()?;
        if u.channels() != dim {
            return Err(Error::DimensionMismatch(format!(
                "operator expects {dim} channels, input has {}",
                u.channels()
            )));
        }
        let mut state = self.instantiate(u.dt())?;
        let mut out = Vec::with_capacity(u.values().len());
        for k in 0..u.len() {
            let uk = u.sample(k);
            let yk = state.output(uk);
            if let Some(c) = yk.iter().position(|v| !v.is_finite()) {
                return Err(Error::NonFinite {
                    sample: k,
                    channel: c,
                });
            }
            out.extend_from_slice(&yk);
            state.advance(uk);
        }
        Ok(SampledSignal::from_parts_unchecked(u.dt(), dim, out))
    }
}

fn positive_dim(d: usize) -> Result<usize> {
    if d == 0 {
        domain("dimension must be positive")
    } else {
        Ok(d)
    }
}

/// Sample-by-sample stepper. `output` reads the current output for input
/// `u_k` without changing state; `advance` commits `u_k` and moves to k+1.
#[derive(Debug, Clone)]
pub struct OperatorState {
    dim: usize,
    kind: StateKind,
}

#[derive(Debug, Clone)]
enum StateKind {
    Lti { sys: DiscreteLti, x: DVector<f64> },
    Static(StaticNonlinearityKind),
    Integrator { dt: f64, x: Vec<f64> },
    Series(Vec<OperatorState>),
    Parallel(Vec<OperatorState>),
    Scale(f64, Box<OperatorState>),
    Negate(Box<OperatorState>),
}

impl OperatorState {
    pub fn io_dimension(&self) -> usize {
        self.dim
    }

    pub fn output(&self, u: &[f64]) -> Vec<f64> {
        match &self.kind {
            StateKind::Lti { sys, x } => sys.output(x, u),
            StateKind::Static(kind) => u.iter().map(|v| kind.apply(*v)).collect(),
            StateKind::Integrator { dt, x } => x
                .iter()
                .zip(u)
                .map(|(xi, ui)| xi + 0.5 * dt * ui)
                .collect(),
            StateKind::Series(stages) => {
                let mut v = u.to_vec();
                for s in stages {
                    v = s.output(&v);
                }
                v
            }
            StateKind::Parallel(terms) => {
                let mut acc = vec![0.0; self.dim];
                for t in terms {
                    for (a, y) in acc.iter_mut().zip(t.output(u)) {
                        *a += y;
                    }
                }
                acc
            }
            StateKind::Scale(f, inner) => inner.output(u).into_iter().map(|y| f * y).collect(),
            StateKind::Negate(inner) => inner.output(u).into_iter().map(|y| -y).collect(),
        }
    }

    pub fn advance(&mut self, u: &[f64]) {
        match &mut self.kind {
            StateKind::Lti { sys, x } => sys.advance(x, u),
            StateKind::Static(_) => {}
            StateKind::Integrator { dt, x } => {
                for (xi, ui) in x.iter_mut().zip(u) {
                    *xi += *dt * ui;
                }
            }
            StateKind::Series(stages) => {
                let mut v = u.to_vec();
                for s in stages {
                    let next = s.output(&v);
                    s.advance(&v);
                    v = next;
                }
            }
            StateKind::Parallel(terms) => terms.iter_mut().for_each(|t| t.advance(u)),
            StateKind::Scale(_, inner) | StateKind::Negate(inner) => inner.advance(u),
        }
    }
}

/// Anything that maps a sampled input to a sampled output. Lets causality
/// checks run on test doubles as well as on specs.
pub trait Operator {
    fn io_dimension(&self) -> usize;
    fn apply(&self, u: &SampledSignal) -> Result<SampledSignal>;
}

impl Operator for OperatorSpec {
    fn io_dimension(&self) -> usize {
        OperatorSpec::io_dimension(self).unwrap_or(0)
    }

    fn apply(&self, u: &SampledSignal) -> Result<SampledSignal> {
        self.evaluate(u)
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct CausalityReport {
    pub trials: usize,
    pub max_violation: f64,
    pub passed: bool,
}

pub const CAUSALITY_TOL: f64 = 1e-9;

/// Random search for `Γ_T P u ≠ Γ_T P Γ_T u` on 200-sample inputs at dt = 0.01.
pub fn check_causality(op: &dyn Operator, trials: usize, seed: u64) -> Result<CausalityReport> {
    check_causality_with(op, trials, seed, 0.01, 200)
}

pub fn check_causality_with(
    op: &dyn Operator,
    trials: usize,
    seed: u64,
    dt: f64,
    len: usize,
) -> Result<CausalityReport> {
    if trials == 0 {
        return domain("causality check needs at least one trial");
    }
    let dim = op.io_dimension();
    if dim == 0 {
        return domain("operator has no valid dimension");
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut max_violation: f64 = 0.0;
    for _ in 0..trials {
        let values: Vec<f64> = (0..len * dim).map(|_| rng.sample(StandardNormal)).collect();
        let u = SampledSignal::new(dt, dim, values)?;
        let t = rng.random_range(0.0..u.horizon());
        let full = op.apply(&u)?.truncate(t)?;
        let cut = op.apply(&u.truncate(t)?)?.truncate(t)?;
        max_violation = max_violation.max(full.sub(&cut)?.norm());
    }
    Ok(CausalityReport {
        trials,
        max_violation,
        passed: max_violation <= CAUSALITY_TOL,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::signal::inner_product;
    use proptest::prelude::*;

    fn ones(dt: f64, n: usize) -> SampledSignal {
        SampledSignal::from_fn(dt, n, 1, |_, _| 1.0).unwrap()
    }

    fn shipped() -> Vec<OperatorSpec> {
        vec![
            OperatorSpec::integrator(1),
            OperatorSpec::lag(),
            OperatorSpec::static_map(StaticNonlinearityKind::TanhGain { k: 1.5 }, 1),
            OperatorSpec::static_map(StaticNonlinearityKind::Saturation { limit: 0.4 }, 1),
            OperatorSpec::static_map(StaticNonlinearityKind::Relu, 1),
            OperatorSpec::static_map(StaticNonlinearityKind::Deadzone { width: 0.2 }, 1),
            OperatorSpec::series(vec![
                OperatorSpec::lag(),
                OperatorSpec::static_map(StaticNonlinearityKind::Saturation { limit: 1.0 }, 1),
            ]),
            OperatorSpec::parallel_sum(vec![OperatorSpec::static_gain(0.25, 1), OperatorSpec::lag()]),
            OperatorSpec::scale(-2.0, OperatorSpec::integrator(1)),
            OperatorSpec::negate(OperatorSpec::static_map(
                StaticNonlinearityKind::TanhGain { k: 1.0 },
                1,
            )),
        ]
    }

    #[test]
    fn integrator_on_constant() {
        let dt = 1e-3;
        let y = OperatorSpec::integrator(1).evaluate(&ones(dt, 1000)).unwrap();
        let last = y.sample(999)[0];
        assert!((last - 1.0).abs() <= 2e-3, "{last}");
        for k in [0usize, 10, 500] {
            assert!((y.sample(k)[0] - k as f64 * dt).abs() <= 2e-3);
        }
    }

    #[test]
    fn integrator_truncated_inner_product_is_half_square() {
        let dt = 0.01;
        let u = SampledSignal::from_fn(dt, 300, 1, |t, _| (3.0 * t).sin() - 0.4).unwrap();
        let y = OperatorSpec::integrator(1).evaluate(&u).unwrap();
        for keep in [1usize, 17, 150, 300] {
            let ut = u.truncate_samples(keep);
            let yt = y.truncate_samples(keep);
            let x_next: f64 = dt * u.values()[..keep].iter().sum::<f64>();
            let ip = inner_product(&ut, &yt).unwrap();
            assert!((ip - 0.5 * x_next * x_next).abs() < 1e-12);
        }
    }

    #[test]
    fn zero_input_gives_zero_output() {
        let z = SampledSignal::zeros(0.01, 100, 1).unwrap();
        for op in shipped() {
            let y = op.evaluate(&z).unwrap();
            assert!(y.values().iter().all(|v| *v == 0.0), "{op:?}");
        }
    }

    #[test]
    fn scaled_identity_is_exact() {
        let u = SampledSignal::from_fn(0.01, 50, 1, |t, _| (7.0 * t).cos() * 1.3).unwrap();
        let op = OperatorSpec::scale(
            3.0,
            OperatorSpec::static_map(
                StaticNonlinearityKind::Sector {
                    a: 1.0,
                    b: 1.0,
                    shape: SectorShape::Linear,
                },
                1,
            ),
        );
        let y = op.evaluate(&u).unwrap();
        assert_eq!(y, u.scaled(3.0));
    }

    #[test]
    fn lag_step_response() {
        let dt = 1e-3;
        // y at t = 1 is sample index 1000, so evaluate 1001 samples.
        let y = OperatorSpec::lag().evaluate(&ones(dt, 1001)).unwrap();
        let want = 1.0 - (-1.0f64).exp();
        assert!((y.sample(1000)[0] - want).abs() < 1e-6);
    }

    #[test]
    fn lti_equivalent_of_integrator() {
        // The cell-average integrator is the ZOH system A=0, B=1, C=1, D=dt/2.
        let dt = 0.01;
        let lti = OperatorSpec::LtiStateSpace {
            a: Matrix::scalar(0.0),
            b: Matrix::scalar(1.0),
            c: Matrix::scalar(1.0),
            d: Matrix::scalar(dt / 2.0),
        };
        let u = SampledSignal::from_fn(dt, 400, 1, |t, _| (2.0 * t).sin() + 0.3).unwrap();
        let a = lti.evaluate(&u).unwrap();
        let b = OperatorSpec::integrator(1).evaluate(&u).unwrap();
        assert!(a.sub(&b).unwrap().max_abs() < 1e-12);
    }

    #[test]
    fn feedthrough_d_term() {
        let op = OperatorSpec::LtiStateSpace {
            a: Matrix::scalar(-1.0),
            b: Matrix::scalar(1.0),
            c: Matrix::scalar(1.0),
            d: Matrix::scalar(2.5),
        };
        let u = SampledSignal::from_fn(0.01, 10, 1, |t, _| 1.0 + t).unwrap();
        let y = op.evaluate(&u).unwrap();
        assert_eq!(y.sample(0)[0], 2.5 * u.sample(0)[0]);
        assert!(op.has_direct_feedthrough());
    }

    #[test]
    fn feedthrough_rules() {
        let sat = OperatorSpec::static_map(StaticNonlinearityKind::Saturation { limit: 1.0 }, 1);
        assert!(sat.has_direct_feedthrough());
        assert!(!OperatorSpec::lag().has_direct_feedthrough());
        let chain = OperatorSpec::series(vec![OperatorSpec::lag(), sat.clone()]);
        assert!(!chain.has_direct_feedthrough());
        assert!(OperatorSpec::parallel_sum(vec![OperatorSpec::lag(), sat]).has_direct_feedthrough());
    }

    /// Perturbing input sample k changes output sample k iff feedthrough is reported.
    #[test]
    fn feedthrough_matches_sensitivity_probe() {
        for op in shipped() {
            let mut sensitive = false;
            for base in [0.05, 0.3] {
                let u = SampledSignal::from_fn(0.01, 20, 1, |_, _| base).unwrap();
                let y = op.evaluate(&u).unwrap();
                let mut bumped = u.values().to_vec();
                bumped[10] += 0.02;
                let yb = op.evaluate(&SampledSignal::new(0.01, 1, bumped).unwrap()).unwrap();
                sensitive |= yb.sample(10)[0] != y.sample(10)[0];
            }
            assert_eq!(sensitive, op.has_direct_feedthrough(), "{op:?}");
        }
    }

    #[test]
    fn causality_of_shipped_variants() {
        for op in shipped() {
            let r = check_causality(&op, 100, 7).unwrap();
            assert!(r.passed, "{op:?}: {}", r.max_violation);
        }
        let r = check_causality(&OperatorSpec::integrator(1), 100, 1).unwrap();
        assert!(r.max_violation <= 1e-12);
        let st = OperatorSpec::static_map(StaticNonlinearityKind::Relu, 1);
        assert_eq!(check_causality(&st, 50, 3).unwrap().max_violation, 0.0);
    }

    struct ShiftBack;

    impl Operator for ShiftBack {
        fn io_dimension(&self) -> usize {
            1
        }
        fn apply(&self, u: &SampledSignal) -> Result<SampledSignal> {
            let mut v = u.values()[1..].to_vec();
            v.push(0.0);
            SampledSignal::new(u.dt(), 1, v)
        }
    }

    #[test]
    fn acausal_double_is_flagged() {
        let r = check_causality(&ShiftBack, 20, 11).unwrap();
        assert!(r.max_violation > 0.0);
        assert!(!r.passed);
    }

    #[test]
    fn dimension_errors() {
        let two = SampledSignal::zeros(0.01, 5, 2).unwrap();
        assert!(matches!(
            OperatorSpec::lag().evaluate(&two),
            Err(Error::DimensionMismatch(_))
        ));
        let bad = OperatorSpec::series(vec![OperatorSpec::integrator(1), OperatorSpec::integrator(2)]);
        assert!(bad.validate().is_err());
        assert!(OperatorSpec::series(vec![]).validate().is_err());
    }

    #[test]
    fn non_finite_output_names_sample() {
        let blow = OperatorSpec::first_order_lag(-800.0, 1.0);
        let err = blow.evaluate(&ones(0.1, 50)).unwrap_err();
        assert!(matches!(err, Error::NonFinite { channel: 0, .. }), "{err}");
    }

    #[test]
    fn json_round_trip_and_strictness() {
        for op in shipped() {
            let text = op.to_json().unwrap();
            assert_eq!(OperatorSpec::from_json(&text).unwrap(), op);
        }
        let typo = r#"{"variant":"integrator","params":{"dimension":1,"dimenson":2}}"#;
        assert!(OperatorSpec::from_json(typo).is_err());
        let extra = r#"{"variant":"integrator","params":{"dimension":1},"x":1}"#;
        assert!(OperatorSpec::from_json(extra).is_err());
        let mat = r#"{"variant":"lti_state_space","params":{
            "a":{"rows":1,"cols":1,"data":[-1.0]},
            "b":{"rows":1,"cols":1,"data":[1.0]},
            "c":{"rows":1,"cols":1,"data":[1.0]},
            "d":{"rows":1,"cols":1,"data":[0.0, 1.0]}}}"#;
        assert!(OperatorSpec::from_json(mat).is_err());
    }

    proptest! {
        #[test]
        fn lti_is_linear(
            xs in proptest::collection::vec(-2.0f64..2.0, 60),
            ys in proptest::collection::vec(-2.0f64..2.0, 60),
            alpha in -3.0f64..3.0,
            beta in -3.0f64..3.0,
        ) {
            let op = OperatorSpec::LtiStateSpace {
                a: Matrix::new(2, 2, vec![-1.0, 2.0, -2.0, -0.5]).unwrap(),
                b: Matrix::new(2, 1, vec![1.0, 0.5]).unwrap(),
                c: Matrix::new(1, 2, vec![0.3, -1.0]).unwrap(),
                d: Matrix::scalar(0.1),
            };
            let u = SampledSignal::new(0.05, 1, xs).unwrap();
            let v = SampledSignal::new(0.05, 1, ys).unwrap();
            let combo = u.scaled(alpha).add(&v.scaled(beta)).unwrap();
            let lhs = op.evaluate(&combo).unwrap();
            let rhs = op.evaluate(&u).unwrap().scaled(alpha)
                .add(&op.evaluate(&v).unwrap().scaled(beta)).unwrap();
            let scale = 1.0 + rhs.max_abs();
            prop_assert!(lhs.sub(&rhs).unwrap().max_abs() <= 1e-9 * scale);
        }

        #[test]
        fn double_negation_is_identity(xs in proptest::collection::vec(-5.0f64..5.0, 1..80)) {
            let u = SampledSignal::new(0.02, 1, xs).unwrap();
            for op in shipped() {
                let nn = OperatorSpec::negate(OperatorSpec::negate(op.clone()));
                prop_assert_eq!(nn.evaluate(&u).unwrap(), op.evaluate(&u).unwrap());
            }
        }
    }
}
