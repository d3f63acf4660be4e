//! Figure presets: the system setups and SNR ranges behind each published
//! BER figure. Pure data; expansion into plans lives in [`crate::cli`].

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::modulation::ConstellationKind;
use crate::system::{Detector, Scheme};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum FigureId {
    /// ML union bounds for growing n_R at N = 128 (theory only).
    Fig3,
    /// Greedy RIS-SSK, simulation and theory.
    Fig4,
    /// Greedy RIS-SM, simulation and theory.
    Fig5,
    /// ML RIS-SSK and RIS-SM, simulation and theory.
    Fig6,
    /// Greedy vs ML simulations with SNR gap report.
    Fig7,
    /// Greedy detection under von Mises RIS phase errors.
    Fig9,
}

impl FigureId {
    pub const ALL: [FigureId; 6] = [
        FigureId::Fig3,
        FigureId::Fig4,
        FigureId::Fig5,
        FigureId::Fig6,
        FigureId::Fig7,
        FigureId::Fig9,
    ];

    pub fn name(self) -> &'static str {
        match self {
            FigureId::Fig3 => "fig3",
            FigureId::Fig4 => "fig4",
            FigureId::Fig5 => "fig5",
            FigureId::Fig6 => "fig6",
            FigureId::Fig7 => "fig7",
            FigureId::Fig9 => "fig9",
        }
    }

    pub fn preset(self) -> &'static FigurePreset {
        match self {
            FigureId::Fig3 => &FIG3,
            FigureId::Fig4 => &FIG4,
            FigureId::Fig5 => &FIG5,
            FigureId::Fig6 => &FIG6,
            FigureId::Fig7 => &FIG7,
            FigureId::Fig9 => &FIG9,
        }
    }
}

impl fmt::Display for FigureId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Inclusive SNR range in dB.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Grid {
    pub start: f64,
    pub step: f64,
    pub stop: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PresetCurve {
    pub scheme: Scheme,
    pub detector: Detector,
    pub n_ref: usize,
    pub n_rx: usize,
    pub modulation: Option<(ConstellationKind, usize)>,
    pub kappa: Option<f64>,
    pub grid: Grid,
    pub simulate: bool,
    pub theory: bool,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FigurePreset {
    pub id: FigureId,
    pub title: &'static str,
    pub curves: &'static [PresetCurve],
    /// `(reference, candidate)` preset-curve indices compared through
    /// their simulated curves.
    pub gap_pairs: &'static [(usize, usize)],
    pub gap_targets: &'static [f64],
}

const fn g(start: f64, stop: f64) -> Grid {
    Grid { start, step: 2.0, stop }
}

const BPSK: Option<(ConstellationKind, usize)> = Some((ConstellationKind::Psk, 2));
const QPSK: Option<(ConstellationKind, usize)> = Some((ConstellationKind::Psk, 4));
const QAM4: Option<(ConstellationKind, usize)> = Some((ConstellationKind::Qam, 4));
const QAM16: Option<(ConstellationKind, usize)> = Some((ConstellationKind::Qam, 16));

#[allow(clippy::too_many_arguments)]
const fn curve(
    scheme: Scheme,
    detector: Detector,
    n_ref: usize,
    n_rx: usize,
    modulation: Option<(ConstellationKind, usize)>,
    grid: Grid,
    simulate: bool,
    theory: bool,
) -> PresetCurve {
    PresetCurve {
        scheme,
        detector,
        n_ref,
        n_rx,
        modulation,
        kappa: None,
        grid,
        simulate,
        theory,
    }
}

const fn with_kappa(c: PresetCurve, kappa: f64) -> PresetCurve {
    PresetCurve {
        kappa: Some(kappa),
        ..c
    }
}

use Detector::{Greedy, Ml};
use Scheme::{Sm, Ssk};

const FIG3_GRID: Grid = Grid {
    start: -44.0,
    step: 1.0,
    stop: -24.0,
};

pub static FIG3: FigurePreset = FigurePreset {
    id: FigureId::Fig3,
    title: "Theoretical BEP with ML detection, N = 128, growing n_R",
    curves: &[
        curve(Ssk, Ml, 128, 2, None, FIG3_GRID, false, true),
        curve(Ssk, Ml, 128, 4, None, FIG3_GRID, false, true),
        curve(Ssk, Ml, 128, 8, None, FIG3_GRID, false, true),
        curve(Sm, Ml, 128, 2, QPSK, FIG3_GRID, false, true),
        curve(Sm, Ml, 128, 4, QPSK, FIG3_GRID, false, true),
        curve(Sm, Ml, 128, 8, QPSK, FIG3_GRID, false, true),
    ],
    gap_pairs: &[],
    gap_targets: &[],
};

pub static FIG4: FigurePreset = FigurePreset {
    id: FigureId::Fig4,
    title: "RIS-SSK with greedy detection",
    curves: &[
        curve(Ssk, Greedy, 64, 2, None, g(-34.0, -18.0), true, true),
        curve(Ssk, Greedy, 64, 4, None, g(-34.0, -18.0), true, true),
        curve(Ssk, Greedy, 64, 8, None, g(-34.0, -18.0), true, true),
        curve(Ssk, Greedy, 128, 2, None, g(-40.0, -24.0), true, true),
        curve(Ssk, Greedy, 128, 4, None, g(-40.0, -24.0), true, true),
        curve(Ssk, Greedy, 128, 8, None, g(-40.0, -24.0), true, true),
    ],
    gap_pairs: &[],
    gap_targets: &[],
};

pub static FIG5: FigurePreset = FigurePreset {
    id: FigureId::Fig5,
    title: "RIS-SM with greedy detection",
    curves: &[
        curve(Sm, Greedy, 64, 2, BPSK, g(-34.0, -18.0), true, true),
        curve(Sm, Greedy, 64, 4, QAM4, g(-34.0, -16.0), true, true),
        curve(Sm, Greedy, 64, 2, QAM16, g(-30.0, -12.0), true, true),
        curve(Sm, Greedy, 128, 4, QAM4, g(-40.0, -22.0), true, true),
        curve(Sm, Greedy, 128, 2, QAM16, g(-36.0, -18.0), true, true),
    ],
    gap_pairs: &[],
    gap_targets: &[],
};

pub static FIG6: FigurePreset = FigurePreset {
    id: FigureId::Fig6,
    title: "RIS-SSK and RIS-SM with ML detection",
    curves: &[
        curve(Ssk, Ml, 64, 2, None, g(-36.0, -20.0), true, true),
        curve(Ssk, Ml, 64, 4, None, g(-36.0, -20.0), true, true),
        curve(Sm, Ml, 64, 2, BPSK, g(-36.0, -20.0), true, true),
        curve(Sm, Ml, 64, 2, QAM4, g(-34.0, -18.0), true, true),
        curve(Sm, Ml, 64, 2, QAM16, g(-28.0, -12.0), true, true),
    ],
    gap_pairs: &[],
    gap_targets: &[],
};

pub static FIG7: FigurePreset = FigurePreset {
    id: FigureId::Fig7,
    title: "Greedy vs ML detection",
    curves: &[
        curve(Ssk, Greedy, 64, 2, None, g(-34.0, -18.0), true, false),
        curve(Ssk, Ml, 64, 2, None, g(-34.0, -18.0), true, false),
        curve(Ssk, Greedy, 128, 8, None, g(-40.0, -24.0), true, false),
        curve(Ssk, Ml, 128, 8, None, g(-40.0, -24.0), true, false),
        curve(Sm, Greedy, 64, 2, QPSK, g(-34.0, -16.0), true, false),
        curve(Sm, Ml, 64, 2, QPSK, g(-34.0, -16.0), true, false),
        curve(Sm, Greedy, 128, 8, QPSK, g(-40.0, -22.0), true, false),
        curve(Sm, Ml, 128, 8, QPSK, g(-40.0, -22.0), true, false),
    ],
    gap_pairs: &[(0, 1), (2, 3), (4, 5), (6, 7)],
    gap_targets: &[1e-3, 1e-4],
};

const FIG9_SSK: PresetCurve = curve(Ssk, Greedy, 64, 2, None, g(-34.0, -16.0), true, false);
const FIG9_SM: PresetCurve = curve(Sm, Greedy, 64, 2, BPSK, g(-34.0, -16.0), true, false);

pub static FIG9: FigurePreset = FigurePreset {
    id: FigureId::Fig9,
    title: "Greedy detection with RIS phase estimation errors",
    curves: &[
        FIG9_SSK,
        with_kappa(FIG9_SSK, 10.0),
        with_kappa(FIG9_SSK, 5.0),
        FIG9_SM,
        with_kappa(FIG9_SM, 10.0),
        with_kappa(FIG9_SM, 5.0),
    ],
    gap_pairs: &[(0, 1), (0, 2), (3, 4), (3, 5)],
    gap_targets: &[1e-3],
};
