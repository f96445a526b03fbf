//! Simulator and analytic model of the detector dead-time blinding attack on
//! a four-detector BB84 receiver.
//!
//! An eavesdropper who sends a dim polarized pulse into the quantum channel
//! shortly before each signal slot puts up to three of the receiver's
//! single-photon detectors into their dead time. Detections that survive
//! sifting then come predominantly from the one detector orthogonal to her
//! pulse, so listening to the public basis announcements is enough to infer
//! most of the key while the legitimate parties' error rate barely moves.
//!
//! The crate provides:
//!
//! - [`types`]: the BB84 alphabet, bit encoding, receiver projection
//!   geometry, and timing/intensity configuration;
//! - [`spad`]: the per-detector dead-time state machine, the graded recovery
//!   curve, and a two-pulse characterization experiment with curve fitting;
//! - [`analytic`]: closed-form click statistics and eavesdropper information,
//!   the independent oracle for the simulation;
//! - [`protocol`]: the Monte Carlo session engine with deterministic seeded
//!   substreams;
//! - [`countermeasure`]: the all-detectors-active gate that defeats the
//!   attack;
//! - [`otp`] and [`pgm`]: a one-time-pad demonstration on PGM images.

pub mod analytic;
pub mod countermeasure;
pub mod error;
pub mod export;
pub mod otp;
pub mod pgm;
pub mod protocol;
pub mod rng;
pub mod spad;
pub mod types;

pub use analytic::{
    binary_entropy, blinding_click_probs, eve_information, information_from_qber,
    multi_click_distribution, signal_detection_prob, BlindClickProbs, InformationResult,
    MultiClickDistribution, Orientation,
};
pub use countermeasure::{gate, run_gated_session};
pub use error::{Error, Result};
pub use otp::{demo_pipeline, xor_bytes, OtpDemo};
pub use protocol::{
    compute_qber, eve_guess, pack_bits, run_round, run_session, run_session_pair, unpack_bits,
    RoundRecord, SessionConfig, SessionResult, SiftAnnouncement,
};
pub use rng::SplitMix64;
pub use spad::{
    fit_recovery_curve, simulate_two_pulse_scan, DeadTimeModel, DetectorState, RecoveryFit,
};
pub use types::{
    projection_coefficient, Basis, IntensityConfig, KeyBit, Polarization, TimingConfig,
};
