//! Projection-based adaptive control of a scalar plant with unmodeled
//! dynamics: linear-systems numerics, parameter synthesis, simulation and
//! phase analysis.

pub mod error;
pub mod lti;
pub mod phases;
pub mod plant;
pub mod presets;
pub mod projection;
pub mod simulator;
pub mod synthesis;

pub use error::{MracError, Result};
pub use lti::{Matrix, Polynomial, StateSpace, TransferFunction};
pub use plant::PlantSpec;
pub use projection::{proj, region_of, theta_dot, ProjectionConfig, ThetaRegion};
pub use synthesis::{BoundLedger, MembershipReport};
pub use simulator::{simulate, simulate_fixed_theta, ReferenceSignal, Scenario, SimError, SimTrace};
pub use phases::{classify_trace, detect_limit_cycle, detect_phases, PhaseEvent, PhaseTimeline};
pub use presets::Preset;
