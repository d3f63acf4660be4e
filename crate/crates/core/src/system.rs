//! Scheme and detector selectors shared by theory, simulation and the CLI.

use std::fmt;

use serde::{Deserialize, Serialize};

/// Index modulation scheme.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Scheme {
    /// Space shift keying: only the receive-antenna index carries bits.
    Ssk,
    /// Spatial modulation: antenna index plus an M-ary symbol.
    Sm,
}

/// Receiver type.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Detector {
    Greedy,
    Ml,
}

impl fmt::Display for Scheme {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Scheme::Ssk => "ssk",
            Scheme::Sm => "sm",
        })
    }
}

impl fmt::Display for Detector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Detector::Greedy => "greedy",
            Detector::Ml => "ml",
        })
    }
}
