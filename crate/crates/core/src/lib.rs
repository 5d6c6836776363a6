//! Forecast-based signal extension and boundary-free time-frequency analysis.
//!
//! The crate fits a linear one-step dynamical model on overlapping lag vectors
//! of an oscillatory signal, forecasts the signal past its right edge, runs a
//! windowed time-frequency transform (STFT, synchrosqueezing, reassignment or
//! ConceFT) on the extended signal, and restricts the result back to the
//! measured interval. Windows near the boundary then see forecast samples
//! instead of missing data, which removes the usual edge artifacts.
//!
//! A Monte Carlo harness ([`verify`]) reproduces the known asymptotics of the
//! forecast error (variance linear in the noise power, decaying like one over
//! the training size) and checks the closed-form model oracles.

pub mod error;
pub mod extend;
pub mod io;
pub mod metrics;
pub mod numerics;
pub mod pipeline;
pub mod signal;
pub mod tfr;
pub mod verify;
pub mod window;

pub use error::{Error, Result};
pub use extend::{ExtenderKind, ForecastModel, LagMatrices, Solver};
pub use pipeline::{PipelineConfig, StreamState, TimingBudget};
pub use signal::{HarmonicComponent, Signal};
pub use tfr::{TfrKind, TfrMatrix, TfrValues};
pub use window::WindowSpec;
