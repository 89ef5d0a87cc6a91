//! Analysis toolkit for chemical reaction networks under mass-action
//! kinetics.
//!
//! The crate decides structural properties (deficiency, weak reversibility,
//! consistency) with exact rational certificates, constructs linear Lyapunov
//! functions for networks without positive equilibria, simulates the
//! mass-action dynamics with an adaptive embedded Runge-Kutta pair, and
//! classifies species-level extinction both structurally and from trajectory
//! evidence.

pub mod dynamics;
pub mod exact;
pub mod extinction;
pub mod graph;
pub mod lyapunov;
pub mod model;
pub mod parse;
pub mod structure;

pub use dynamics::{integrate, IntegrateOptions, Trajectory};
pub use exact::{RatMatrix, Rational, StiemkeResult};
pub use model::{
    validate_network, Complex, MassActionSystem, RateAssignment, Reaction, ReactionNetwork,
    Species,
};
pub use parse::{format_network, parse_network, ParseDiagnostic};
pub use structure::{deficiency, is_conservative, is_consistent, ConsistencyVerdict};
