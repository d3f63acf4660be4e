//! Simulation and analysis of index modulation through a reconfigurable
//! intelligent surface (RIS).
//!
//! An RIS with `N` passive reflectors co-phases its reflections toward one
//! of `n_R` receive antennas; the antenna index carries `log₂ n_R` bits
//! (RIS-SSK), optionally alongside an M-ary symbol from the RF source
//! (RIS-SM). The crate provides:
//!
//! - [`channel`]: Rayleigh channels, RIS phase alignment and phase errors,
//! - [`modulation`]: Gray-labelled PSK/QAM and bit framing,
//! - [`detectors`]: greedy and ML receivers,
//! - [`theory`]: analytical error probabilities,
//! - [`montecarlo`]: deterministic parallel BER simulation,
//! - [`output`], [`plot`], [`presets`]: curve files, SVG overlays and the
//!   published figure setups,
//! - [`cli`]: the job runner behind the `ris-im` binary.

pub mod channel;
pub mod cli;
pub mod detectors;
pub mod error;
pub mod modulation;
pub mod montecarlo;
pub mod output;
pub mod plot;
pub mod presets;
pub mod quadrature;
pub mod rng;
pub mod system;
pub mod theory;

pub use error::{Error, Result};
pub use system::{Detector, Scheme};
