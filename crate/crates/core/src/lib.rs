//! Soft and hard scaled relative graphs (SRGs) of causal operators, sampled
//! from trajectory ensembles or described by analytic regions, plus feedback
//! stability certificates by SRG separation and closed-loop simulation.

#![allow(clippy::neg_cmp_op_on_partial_ord)] // `!(x > 0.0)` also rejects NaN

pub mod certifier;
pub mod cli;
pub mod error;
pub mod feedback;
pub mod operators;
pub mod plot;
pub mod regions;
pub mod sampler;
pub mod signal;

pub use error::{Error, Result};
pub use operators::{OperatorSpec, StaticNonlinearityKind};
pub use signal::{GainPhasePair, SampledSignal};
