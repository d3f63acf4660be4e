//! Constellations with Gray bit labels, and the bit mapping that splits
//! each channel use into antenna-index bits and symbol bits.
//!
//! Antenna indices use natural binary mapping and are 0-based: antenna `m`
//! carries the bits of `m` written MSB first.

use std::f64::consts::PI;
use std::fmt;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum ConstellationKind {
    Psk,
    Qam,
}

impl fmt::Display for ConstellationKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ConstellationKind::Psk => f.write_str("psk"),
            ConstellationKind::Qam => f.write_str("qam"),
        }
    }
}

/// Binary-reflected Gray code.
pub fn gray(k: u32) -> u32 {
    k ^ (k >> 1)
}

pub fn gray_inverse(mut g: u32) -> u32 {
    let mut k = g;
    while g > 0 {
        g >>= 1;
        k ^= g;
    }
    k
}

/// Number of differing bits between two labels.
pub fn hamming(a: u32, b: u32) -> u32 {
    (a ^ b).count_ones()
}

fn log2_exact(v: usize) -> Option<u32> {
    (v >= 1 && v.is_power_of_two()).then(|| v.trailing_zeros())
}

/// An M-ary PSK or square QAM constellation. `points()[label]` is the
/// point carrying `label`, so labels and indices coincide.
#[derive(Debug, Clone, PartialEq)]
pub struct Constellation {
    kind: ConstellationKind,
    es: f64,
    points: Vec<Complex64>,
}

impl Constellation {
    /// Builds a Gray-labelled constellation with average energy `es`.
    ///
    /// PSK points are `√Es e^{j2πk/M}` with label `gray(k)`. QAM is the
    /// square grid `{±1, ±3, ...}²` scaled to average energy `es`, labelled
    /// by the Gray code of the in-phase level (high bits) followed by the
    /// Gray code of the quadrature level (low bits).
    pub fn build(kind: ConstellationKind, order: usize, es: f64) -> Result<Self> {
        let bits = log2_exact(order)
            .filter(|_| order >= 2)
            .ok_or_else(|| Error::parameter(format!("order must be a power of two >= 2, got {order}")))?;
        if !(es > 0.0 && es.is_finite()) {
            return Err(Error::parameter(format!("Es must be positive, got {es}")));
        }
        let mut points = vec![Complex64::new(0.0, 0.0); order];
        match kind {
            ConstellationKind::Psk => {
                let amp = es.sqrt();
                for k in 0..order as u32 {
                    let angle = 2.0 * PI * k as f64 / order as f64;
                    let mut p = Complex64::from_polar(amp, angle);
                    // keep axis points exact
                    if p.re.abs() < 1e-15 * amp {
                        p.re = 0.0;
                    }
                    if p.im.abs() < 1e-15 * amp {
                        p.im = 0.0;
                    }
                    points[gray(k) as usize] = p;
                }
            }
            ConstellationKind::Qam => {
                if bits % 2 != 0 {
                    return Err(Error::parameter(format!(
                        "QAM order must be a perfect square, got {order}"
                    )));
                }
                let side = 1usize << (bits / 2);
                // mean of (2k - side + 1)^2 over one axis is (side^2 - 1)/3
                let axis_energy = (side * side - 1) as f64 / 3.0;
                let scale = (es / (2.0 * axis_energy)).sqrt();
                let half = bits / 2;
                for i in 0..side as u32 {
                    for q in 0..side as u32 {
                        let label = (gray(i) << half) | gray(q);
                        let level = |k: u32| (2.0 * k as f64 - side as f64 + 1.0) * scale;
                        points[label as usize] = Complex64::new(level(i), level(q));
                    }
                }
            }
        }
        Ok(Self { kind, es, points })
    }

    pub fn kind(&self) -> ConstellationKind {
        self.kind
    }

    pub fn order(&self) -> usize {
        self.points.len()
    }

    pub fn bits_per_symbol(&self) -> u32 {
        self.points.len().trailing_zeros()
    }

    pub fn es(&self) -> f64 {
        self.es
    }

    pub fn points(&self) -> &[Complex64] {
        &self.points
    }

    pub fn point(&self, label: u32) -> Complex64 {
        self.points[label as usize]
    }

    /// True when every point has modulus `√Es`.
    pub fn is_constant_envelope(&self) -> bool {
        let a = self.es.sqrt();
        self.points.iter().all(|p| (p.norm() - a).abs() <= 1e-12 * a)
    }

    /// Label of `x` if it is a constellation point.
    pub fn label_of(&self, x: Complex64) -> Option<u32> {
        let tol = 1e-9 * self.es.sqrt();
        self.points.iter().position(|p| (p - x).norm() <= tol).map(|i| i as u32)
    }

    /// `argmin_label |r - a·x_label|²`, ties to the lowest label.
    pub fn nearest_scaled(&self, r: Complex64, a: f64) -> u32 {
        let mut best = 0u32;
        let mut best_d = f64::INFINITY;
        for (label, p) in self.points.iter().enumerate() {
            let d = (r - p * a).norm_sqr();
            if d < best_d {
                best_d = d;
                best = label as u32;
            }
        }
        best
    }

    /// Label as an MSB-first bit string.
    pub fn label_string(&self, label: u32) -> String {
        bit_string(label, self.bits_per_symbol())
    }

    /// Machine-readable label table.
    pub fn to_json(&self) -> serde_json::Value {
        serde_json::json!({
            "kind": self.kind,
            "M": self.order(),
            "Es": self.es,
            "points": self.points.iter().enumerate().map(|(label, p)| serde_json::json!({
                "label": self.label_string(label as u32),
                "re": p.re,
                "im": p.im,
            })).collect::<Vec<_>>(),
        })
    }
}

fn bit_string(value: u32, width: u32) -> String {
    (0..width)
        .rev()
        .map(|b| if (value >> b) & 1 == 1 { '1' } else { '0' })
        .collect()
}

fn bits_value(bits: &[u8]) -> Result<u32> {
    if bits.len() > 31 {
        return Err(Error::Framing(format!("{} bits do not fit a label", bits.len())));
    }
    bits.iter().try_fold(0u32, |acc, &b| match b {
        0 | 1 => Ok((acc << 1) | b as u32),
        other => Err(Error::Framing(format!("bit value {other} is not 0 or 1"))),
    })
}

/// The information bits of one channel use, split into antenna-index bits
/// and symbol bits (no symbol bits for SSK).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct BitFrame {
    antenna: u32,
    antenna_width: u32,
    symbol: u32,
    symbol_width: u32,
}

impl BitFrame {
    /// Builds a frame from MSB-first bit slices.
    pub fn from_bits(antenna_bits: &[u8], symbol_bits: &[u8]) -> Result<Self> {
        Ok(Self {
            antenna: bits_value(antenna_bits)?,
            antenna_width: antenna_bits.len() as u32,
            symbol: bits_value(symbol_bits)?,
            symbol_width: symbol_bits.len() as u32,
        })
    }

    /// Builds a frame from integer field values.
    pub fn from_values(antenna: u32, antenna_width: u32, symbol: u32, symbol_width: u32) -> Result<Self> {
        if antenna_width > 31 || symbol_width > 31 {
            return Err(Error::Framing("field wider than 31 bits".into()));
        }
        if antenna >> antenna_width != 0 || symbol >> symbol_width != 0 {
            return Err(Error::Framing("value does not fit its field width".into()));
        }
        Ok(Self {
            antenna,
            antenna_width,
            symbol,
            symbol_width,
        })
    }

    pub fn antenna_value(&self) -> u32 {
        self.antenna
    }

    pub fn symbol_value(&self) -> u32 {
        self.symbol
    }

    pub fn antenna_bits(&self) -> Vec<u8> {
        bit_string(self.antenna, self.antenna_width)
            .bytes()
            .map(|b| b - b'0')
            .collect()
    }

    pub fn symbol_bits(&self) -> Vec<u8> {
        bit_string(self.symbol, self.symbol_width)
            .bytes()
            .map(|b| b - b'0')
            .collect()
    }

    pub fn len(&self) -> u32 {
        self.antenna_width + self.symbol_width
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Bit errors between two frames of the same shape.
    pub fn bit_errors(&self, other: &BitFrame) -> u32 {
        hamming(self.antenna, other.antenna) + hamming(self.symbol, other.symbol)
    }
}

impl fmt::Display for BitFrame {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{}{}",
            bit_string(self.antenna, self.antenna_width),
            bit_string(self.symbol, self.symbol_width)
        )
    }
}

fn antenna_width(n_rx: usize) -> Result<u32> {
    match log2_exact(n_rx) {
        Some(b) if b >= 1 => Ok(b),
        _ => Err(Error::dimension(format!(
            "receive antenna count must be a power of two >= 2, got {n_rx}"
        ))),
    }
}

/// Maps a frame to `(antenna index, symbol)`. The symbol is `None` for SSK
/// (`c = None`).
pub fn map_bits(frame: &BitFrame, n_rx: usize, c: Option<&Constellation>) -> Result<(usize, Option<Complex64>)> {
    let aw = antenna_width(n_rx)?;
    if frame.antenna_width != aw {
        return Err(Error::Framing(format!(
            "{} antenna bits for {n_rx} antennas",
            frame.antenna_width
        )));
    }
    let sw = c.map_or(0, |c| c.bits_per_symbol());
    if frame.symbol_width != sw {
        return Err(Error::Framing(format!(
            "{} symbol bits, constellation carries {sw}",
            frame.symbol_width
        )));
    }
    Ok((frame.antenna as usize, c.map(|c| c.point(frame.symbol))))
}

/// Inverse of [`map_bits`].
pub fn demap_decision(
    m_hat: usize,
    x_hat: Option<Complex64>,
    n_rx: usize,
    c: Option<&Constellation>,
) -> Result<BitFrame> {
    let aw = antenna_width(n_rx)?;
    if m_hat >= n_rx {
        return Err(Error::Index {
            index: m_hat,
            len: n_rx,
        });
    }
    let (symbol, sw) = match (c, x_hat) {
        (None, None) => (0, 0),
        (Some(c), Some(x)) => {
            let label = c
                .label_of(x)
                .ok_or_else(|| Error::Demap(format!("{x} is not a constellation point")))?;
            (label, c.bits_per_symbol())
        }
        (None, Some(_)) => return Err(Error::Demap("symbol given without a constellation".into())),
        (Some(_), None) => return Err(Error::Demap("constellation given without a symbol".into())),
    };
    BitFrame::from_values(m_hat as u32, aw, symbol, sw)
}
