//! Analysis toolkit for the three-level flying capacitor DC/DC converter.
//!
//! The converter is modelled as a switched linear ODE system
//!
//! ```text
//! x' = A1 x + b1   on [k T, k T + T/2)      (switch state 1)
//! x' = A2 x        on [k T + T/2, (k+1) T)  (switch state 2)
//! ```
//!
//! with state `x = [i, v]` (inductor current, capacitor voltage). Everything
//! downstream follows from 2x2 matrix exponentials:
//!
//! * [`model`] builds the state-space matrices from circuit parameters,
//! * [`analysis`] decides stability from the monodromy matrix, solves for the
//!   exact periodic steady state and evaluates closed-form averages,
//! * [`integrator`] is an independent adaptive RK45 oracle with switch-aligned
//!   stepping, used to cross-validate the closed forms,
//! * [`mat2`] holds the 2x2 linear algebra kernel, including two independent
//!   matrix-exponential implementations.

pub mod analysis;
pub mod error;
pub mod integrator;
pub mod mat2;
pub mod model;

pub use analysis::{Averages, EnergyResiduals, StabilityReport, SteadyState, SweepPoint};
pub use error::{Error, Result};
pub use integrator::{ConvergenceRecord, IntegratorConfig, SeriesSource, TimeSeries};
pub use mat2::{CharPoly2, Mat2, Vec2};
pub use model::{CircuitParams, ReducedParams, SwitchedSystem};
