//! Single-photon Mach-Zehnder interferometer in the projection-evolution
//! picture, where time is a coordinate of the wavefunction rather than an
//! evolution parameter.
//!
//! The photon amplitude is a separable product `γᵗ(t)·γˣ(x)` sampled on a
//! uniform spacetime grid. Beamsplitters exist only inside spacetime presence
//! regions, so the portion of the temporal profile that overlaps a region is
//! mixed between the two interferometer arms while the rest passes through.
//!
//! Two independent routes produce the detector densities:
//!
//! * [`engine`] runs the operator sequence (source, translations, gated
//!   beamsplitters, mirrors) on a 2D grid, normalizing after every step;
//! * [`closed_form`] evaluates the four-branch density directly and
//!   integrates it over detector windows.
//!
//! [`oracle`] holds brute-force reference computations used by the test
//! suites and by `pev-mzi oracle regen`.

pub mod channel;
pub mod cli;
pub mod closed_form;
pub mod engine;
mod error;
pub mod grid;
pub mod oracle;
pub mod profiles;
pub mod regions;
pub mod scenarios;

pub use channel::{Beamsplitter, BranchKey, ChannelVec, Detector};
pub use closed_form::{ClosedForm, DetectionCurve, DetectorWindow, SpatialSpan};
pub use engine::{GridState, StepLog};
pub use error::{Error, Result};
pub use grid::AxisGrid;
pub use profiles::{SpatialProfile, Spectrum, TemporalProfile};
pub use regions::{Rect, SpacetimeRegion};
pub use scenarios::Scenario;
