//! Monte Carlo simulation of heterogeneously encoded Bell pairs.
//!
//! Errors are tracked as Pauli frames through Clifford circuits with
//! circuit-level Pauli noise. Pairs can be purified before or after one or
//! both halves are encoded into the Steane code or a distance-3 surface code.

pub mod analytic;
pub mod circuit;
pub mod codes;
pub mod error;
pub mod exec;
pub mod montecarlo;
pub mod noise;
pub mod pauli;
pub mod protocols;

pub use circuit::{schedule, Circuit, GateCounts, ResourceMetrics};
pub use codes::{CodeFamily, CodeKind, StabilizerCode};
pub use error::{CircuitError, CodeError, ConfigError, ParseError};
pub use montecarlo::{run_row, run_table, wilson_interval, RunConfig, TableRow};
pub use noise::{BellDistribution, MeasurementNoise, NoiseModel, RngStream};
pub use pauli::{conjugate_through, Gate, Pauli, PauliString};
pub use protocols::{BasisOrder, PostselectMode, SchemeKind};
