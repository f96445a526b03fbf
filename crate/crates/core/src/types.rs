//! Shared domain vocabulary: polarizations, bases, bit encoding, timing and
//! intensity configuration, and the projection geometry of the four-detector
//! passive receiver.
//!
//! The receiver splits incoming light on a 50/50 beam splitter (the passive
//! basis choice) and analyzes each arm behind a polarizing beam splitter, so a
//! photon reaches the detector parallel to its polarization with coefficient
//! 1/2, either detector of the other basis with coefficient 1/4, and the
//! orthogonal detector never.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// One of the four BB84 signal polarizations.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Polarization {
    /// Horizontal; bit 0 in the rectilinear basis.
    H,
    /// Vertical; bit 1 in the rectilinear basis.
    V,
    /// +45 degrees; bit 0 in the diagonal basis.
    P45,
    /// -45 degrees; bit 1 in the diagonal basis.
    M45,
}

/// Measurement/preparation basis.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Basis {
    /// {H, V}
    Rectilinear,
    /// {+45, -45}
    Diagonal,
}

/// A key bit with the fixed encoding H -> 0, V -> 1, +45 -> 0, -45 -> 1.
///
/// The encoding is a bijection within each basis and `orthogonal` flips the
/// bit; fixing it makes key files and golden outputs reproducible.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct KeyBit(pub bool);

impl Polarization {
    /// Detector/polarization order used everywhere an index is needed.
    pub const ALL: [Polarization; 4] = [
        Polarization::H,
        Polarization::V,
        Polarization::P45,
        Polarization::M45,
    ];

    /// Position in [`Polarization::ALL`].
    #[inline]
    pub fn index(self) -> usize {
        match self {
            Polarization::H => 0,
            Polarization::V => 1,
            Polarization::P45 => 2,
            Polarization::M45 => 3,
        }
    }

    /// The basis this polarization belongs to.
    #[inline]
    pub fn basis(self) -> Basis {
        match self {
            Polarization::H | Polarization::V => Basis::Rectilinear,
            Polarization::P45 | Polarization::M45 => Basis::Diagonal,
        }
    }

    /// The orthogonal polarization in the same basis. Involution.
    #[inline]
    pub fn orthogonal(self) -> Polarization {
        match self {
            Polarization::H => Polarization::V,
            Polarization::V => Polarization::H,
            Polarization::P45 => Polarization::M45,
            Polarization::M45 => Polarization::P45,
        }
    }

    /// Bit value under the fixed encoding.
    #[inline]
    pub fn key_bit(self) -> KeyBit {
        match self {
            Polarization::H | Polarization::P45 => KeyBit(false),
            Polarization::V | Polarization::M45 => KeyBit(true),
        }
    }
}

impl Basis {
    /// Decode a bit back to a polarization in this basis.
    #[inline]
    pub fn polarization(self, bit: KeyBit) -> Polarization {
        match (self, bit.0) {
            (Basis::Rectilinear, false) => Polarization::H,
            (Basis::Rectilinear, true) => Polarization::V,
            (Basis::Diagonal, false) => Polarization::P45,
            (Basis::Diagonal, true) => Polarization::M45,
        }
    }
}

impl KeyBit {
    pub const ZERO: KeyBit = KeyBit(false);
    pub const ONE: KeyBit = KeyBit(true);

    #[inline]
    pub fn value(self) -> u8 {
        self.0 as u8
    }

    #[inline]
    pub fn flipped(self) -> KeyBit {
        KeyBit(!self.0)
    }
}

impl From<bool> for KeyBit {
    fn from(b: bool) -> Self {
        KeyBit(b)
    }
}

/// Fraction of a pulse's mean photon number seen by one detector.
///
/// 1/2 for the detector parallel to the signal, 1/4 for either detector of
/// the other basis, 0 for the orthogonal detector.
pub fn projection_coefficient(signal: Polarization, detector: Polarization) -> f64 {
    if detector == signal {
        0.5
    } else if detector == signal.orthogonal() {
        0.0
    } else {
        0.25
    }
}

/// Timing parameters of one simulated link (all in seconds).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TimingConfig {
    /// Signal pulse period T.
    #[serde(default = "default_period")]
    pub period: f64,
    /// Acceptance time-window width around each signal slot.
    #[serde(default = "default_window")]
    pub window: f64,
    /// Lead of the blinding pulse over the signal pulse, t_i - t_B,i.
    #[serde(default = "default_blinding_offset")]
    pub blinding_offset: f64,
    /// Nominal detector dead time.
    #[serde(default = "default_dead_time")]
    pub dead_time: f64,
}

fn default_period() -> f64 {
    4e-6
}
fn default_window() -> f64 {
    5e-9
}
fn default_blinding_offset() -> f64 {
    200e-9
}
fn default_dead_time() -> f64 {
    2e-6
}

impl Default for TimingConfig {
    fn default() -> Self {
        Self {
            period: default_period(),
            window: default_window(),
            blinding_offset: default_blinding_offset(),
            dead_time: default_dead_time(),
        }
    }
}

impl TimingConfig {
    /// Checks the attack timing window `window/2 < blinding_offset <
    /// dead_time` and full recovery between rounds `period > dead_time +
    /// blinding_offset`.
    pub fn validate(&self) -> Result<()> {
        let params = [
            self.period,
            self.window,
            self.blinding_offset,
            self.dead_time,
        ];
        if params.iter().any(|v| !v.is_finite() || *v <= 0.0) {
            return Err(Error::InvalidConfig(
                "timing parameters must all be positive and finite".into(),
            ));
        }
        if self.blinding_offset <= self.window / 2.0 {
            return Err(Error::InvalidConfig(format!(
                "blinding offset {} must exceed half the time window {}",
                self.blinding_offset,
                self.window / 2.0
            )));
        }
        if self.blinding_offset >= self.dead_time {
            return Err(Error::InvalidConfig(format!(
                "blinding offset {} must be less than the dead time {}",
                self.blinding_offset, self.dead_time
            )));
        }
        if self.period <= self.dead_time + self.blinding_offset {
            return Err(Error::InvalidConfig(format!(
                "period {} must exceed dead time + blinding offset = {}",
                self.period,
                self.dead_time + self.blinding_offset
            )));
        }
        Ok(())
    }
}

/// Pulse intensities and receiver imperfections.
///
/// The effective mean photon numbers (per pulse, at an ideal receiver) are the
/// primary inputs; the raw source intensities and channel transmissions are
/// optional convenience fields related by `mu_eff = eta * mu`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct IntensityConfig {
    /// Mean photons per blinding pulse at an ideal receiver.
    #[serde(default = "default_mu_b_eff")]
    pub mu_b_eff: f64,
    /// Mean photons per signal pulse at the receiver.
    #[serde(default = "default_mu_s_eff")]
    pub mu_s_eff: f64,
    /// Raw blinding pulse intensity at Eve's source.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub mu_b_raw: Option<f64>,
    /// Channel transmission from Eve to Bob.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub eta_b: Option<f64>,
    /// Raw signal pulse intensity at Alice's source.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub mu_s_raw: Option<f64>,
    /// Channel transmission from Alice to Bob.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub eta_s: Option<f64>,
    /// Probability that a signal photon headed for the parallel detector is
    /// rerouted to the orthogonal detector of the same basis. Reproduces the
    /// observed baseline QBER between Alice and Bob with a single parameter.
    #[serde(default = "default_e_pol")]
    pub e_pol: f64,
    /// Per-detector background click probability per time window.
    #[serde(default)]
    pub background: f64,
    /// Blinding extinction ratio seen by the detector orthogonal to the
    /// blinding pulse (0 = ideal polarizers).
    #[serde(default)]
    pub extinction: f64,
}

fn default_mu_b_eff() -> f64 {
    16.52
}
fn default_mu_s_eff() -> f64 {
    0.1
}
fn default_e_pol() -> f64 {
    0.011
}

impl Default for IntensityConfig {
    fn default() -> Self {
        Self {
            mu_b_eff: default_mu_b_eff(),
            mu_s_eff: default_mu_s_eff(),
            mu_b_raw: None,
            eta_b: None,
            mu_s_raw: None,
            eta_s: None,
            e_pol: default_e_pol(),
            background: 0.0,
            extinction: 0.0,
        }
    }
}

impl IntensityConfig {
    /// Build from raw source intensities and channel transmissions; the
    /// effective values are derived as `mu_eff = eta * mu`.
    pub fn from_raw(mu_b_raw: f64, eta_b: f64, mu_s_raw: f64, eta_s: f64) -> Self {
        Self {
            mu_b_eff: eta_b * mu_b_raw,
            mu_s_eff: eta_s * mu_s_raw,
            mu_b_raw: Some(mu_b_raw),
            eta_b: Some(eta_b),
            mu_s_raw: Some(mu_s_raw),
            eta_s: Some(eta_s),
            ..Self::default()
        }
    }

    pub fn validate(&self) -> Result<()> {
        for mu in [self.mu_b_eff, self.mu_s_eff] {
            if !mu.is_finite() || mu < 0.0 {
                return Err(Error::InvalidConfig(
                    "effective intensities must be non-negative and finite".into(),
                ));
            }
        }
        if !(0.0..0.5).contains(&self.e_pol) {
            return Err(Error::InvalidConfig(format!(
                "e_pol {} outside [0, 0.5)",
                self.e_pol
            )));
        }
        if !(0.0..1.0).contains(&self.background) {
            return Err(Error::InvalidConfig(format!(
                "background {} outside [0, 1)",
                self.background
            )));
        }
        if !(0.0..1.0).contains(&self.extinction) {
            return Err(Error::InvalidConfig(format!(
                "extinction {} outside [0, 1)",
                self.extinction
            )));
        }
        if let (Some(raw), Some(eta)) = (self.mu_b_raw, self.eta_b) {
            if self.mu_b_eff != eta * raw {
                return Err(Error::InvalidConfig(format!(
                    "mu_b_eff {} != eta_b * mu_b_raw = {}",
                    self.mu_b_eff,
                    eta * raw
                )));
            }
        }
        if let (Some(raw), Some(eta)) = (self.mu_s_raw, self.eta_s) {
            if self.mu_s_eff != eta * raw {
                return Err(Error::InvalidConfig(format!(
                    "mu_s_eff {} != eta_s * mu_s_raw = {}",
                    self.mu_s_eff,
                    eta * raw
                )));
            }
        }
        Ok(())
    }
}
