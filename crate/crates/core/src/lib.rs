//! Spectral lab for the viscous Camassa–Holm equation on a periodic box
//!
//! ```text
//! u_t + ½∂ₓ(u²) + ∂ₓ(1 − ∂ₓ²)⁻¹[u_x²/2 + u²] − ∂ₓ(a(x) u_x) = g(x)  (− μu)
//! ```
//!
//! Fields are Fourier pseudo-spectral with 2/3-rule dealiasing, time
//! stepping is second-order exponential time differencing (ETDRK2), and the diagnostics
//! module measures energies, Besov blocks and tail functionals.

pub mod diagnostics;
pub mod checks;
pub mod config;
pub mod error;
pub mod expr;
pub mod harness;
pub mod initial;
pub mod integrator;
pub mod io;
pub mod operators;
pub mod spectral;

pub use diagnostics::{DiagnosticSet, DiagnosticsRecord};
pub use error::{DiagnosticsError, ForcingError, IntegrationError, ProfileError, SpectralError};
pub use integrator::{run, Experiment, Integrator, TimeGrid, Trajectory, TrajectoryState};
pub use operators::{validate_profile, ForcingTerm, Mode, StructuralFlag, ViscosityProfile};
pub use spectral::{FrequencyBand, SobolevIndex, SpectralField};
pub use config::{parse_config, ConfigError, Hypothesis, SimulationConfig};
pub use harness::{run_ensemble, EnsembleReport, EnsembleSpec};
