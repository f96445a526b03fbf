//! Monte Carlo BB84 session engine.
//!
//! Each round simulates, in order: Eve's polarized blinding pulse shortly
//! before the signal slot, Alice's signal pulse, Bob's four-detector
//! reception with dead times and optional background clicks, squashing of
//! multi-click events, sifting over the classical channel, and Eve's
//! inference from the sifting announcements alone.
//!
//! Determinism contract: round `i` consumes draws only from
//! [`SplitMix64::substream`]`(seed, i)`, in a fixed order (Eve's polarization,
//! four blinding clicks, Alice's basis and bit, gate and activity draws for a
//! graded dead-time model, four signal clicks, four background clicks when
//! enabled, the squash choice, Eve's coin). Identical seed and configuration
//! therefore replay bit-identical sessions regardless of evaluation order.

use serde::{Deserialize, Serialize};

use crate::analytic::information_from_qber;
use crate::error::{Error, Result};
use crate::rng::SplitMix64;
use crate::spad::{DeadTimeModel, DetectorState};
use crate::types::{Basis, IntensityConfig, KeyBit, Polarization, TimingConfig};

/// Full configuration of one simulated link.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SessionConfig {
    #[serde(default)]
    pub timing: TimingConfig,
    #[serde(default)]
    pub intensity: IntensityConfig,
    #[serde(default)]
    pub dead_time_model: DeadTimeModel,
    #[serde(default = "default_rounds")]
    pub rounds: u64,
    #[serde(default = "default_seed")]
    pub seed: u64,
    /// Whether Eve sends blinding pulses.
    #[serde(default = "default_true")]
    pub attack: bool,
    /// Whether key bits are restricted to rounds where all detectors were
    /// verifiably active just before the signal window.
    #[serde(default)]
    pub countermeasure: bool,
}

fn default_rounds() -> u64 {
    1_000_000
}
fn default_seed() -> u64 {
    1
}
fn default_true() -> bool {
    true
}

impl Default for SessionConfig {
    fn default() -> Self {
        Self {
            timing: TimingConfig::default(),
            intensity: IntensityConfig::default(),
            dead_time_model: DeadTimeModel::default(),
            rounds: default_rounds(),
            seed: default_seed(),
            attack: true,
            countermeasure: false,
        }
    }
}

impl SessionConfig {
    pub fn validate(&self) -> Result<()> {
        self.timing.validate()?;
        self.intensity.validate()?;
        self.dead_time_model.validate()?;
        if self.rounds == 0 {
            return Err(Error::InvalidConfig("rounds must be at least 1".into()));
        }
        // detectors must genuinely recover between rounds under the model in
        // use, not just under the nominal dead time
        if self.dead_time_model.tau_d() + self.timing.blinding_offset >= self.timing.period {
            return Err(Error::InvalidConfig(format!(
                "period {} must exceed model dead time + blinding offset = {}",
                self.timing.period,
                self.dead_time_model.tau_d() + self.timing.blinding_offset
            )));
        }
        Ok(())
    }
}

/// Everything that happened in one time slot.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RoundRecord {
    pub index: u64,
    /// Eve's blinding polarization, if the attack is on.
    pub blinding: Option<Polarization>,
    /// Detectors that clicked on the blinding pulse, by [`Polarization::ALL`] index.
    pub blind_clicks: [bool; 4],
    pub alice_basis: Basis,
    pub alice_bit: KeyBit,
    /// Detectors that clicked inside the signal window.
    pub signal_clicks: [bool; 4],
    /// Bob's squashed outcome.
    pub outcome: Option<Polarization>,
    pub sifted: bool,
    pub bob_bit: Option<KeyBit>,
    /// Eve's guess, present for sifted rounds.
    pub eve_bit: Option<KeyBit>,
    /// All four detectors were active just before the signal window opened.
    pub countermeasure_passed: bool,
}

impl RoundRecord {
    /// Number of detectors that fired on the blinding pulse.
    pub fn blind_click_count(&self) -> usize {
        self.blind_clicks.iter().filter(|&&c| c).count()
    }
}

/// Public basis announcement for one round with a detection outcome. Carries
/// no bit values.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SiftAnnouncement {
    pub index: u64,
    /// Bob's measurement basis for this round.
    pub basis: Basis,
    /// Whether the round survives sifting.
    pub kept: bool,
}

/// Aggregated outcome of a session.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SessionResult {
    pub rounds: u64,
    /// Keys restricted to rounds passing the countermeasure gate.
    pub gated: bool,
    pub sifted_len: usize,
    #[serde(skip)]
    pub alice_key: Vec<KeyBit>,
    #[serde(skip)]
    pub bob_key: Vec<KeyBit>,
    #[serde(skip)]
    pub eve_key: Vec<KeyBit>,
    /// Error ratio between Alice's and Bob's sifted keys; absent when no
    /// bits were sifted.
    pub qber_ab: Option<f64>,
    pub qber_ab_se: Option<f64>,
    /// Error ratio between Bob's and Eve's sifted keys.
    pub qber_be: Option<f64>,
    pub qber_be_se: Option<f64>,
    /// Eve's information per sifted bit, `1 - H2(qber_be)`.
    pub i_eb: Option<f64>,
    /// Fraction of Eve's bits agreeing with Bob's, `1 - qber_be`.
    pub overlap: Option<f64>,
    /// Empirical fraction of rounds with 0..3 blinding clicks. With a
    /// non-zero extinction ratio a four-click round is possible and is not
    /// counted in any bin.
    pub blind_multiplicity: [f64; 4],
    /// Fraction of rounds with all detectors active at the gate instant.
    pub kept_fraction: f64,
}

/// Per-detector click probabilities precomputed from the intensities, indexed
/// by pulse polarization and detector.
struct ClickTables {
    blind: [[f64; 4]; 4],
    signal: [[f64; 4]; 4],
}

impl ClickTables {
    fn new(intensity: &IntensityConfig) -> Self {
        let mut blind = [[0.0; 4]; 4];
        let mut signal = [[0.0; 4]; 4];
        for pulse in Polarization::ALL {
            for det in Polarization::ALL {
                let blind_coeff = if det == pulse {
                    0.5
                } else if det == pulse.orthogonal() {
                    intensity.extinction * 0.5
                } else {
                    0.25
                };
                // polarization misalignment reroutes parallel light to the
                // orthogonal detector of the same basis
                let signal_coeff = if det == pulse {
                    (1.0 - intensity.e_pol) * 0.5
                } else if det == pulse.orthogonal() {
                    intensity.e_pol * 0.5
                } else {
                    0.25
                };
                blind[pulse.index()][det.index()] = 1.0 - (-intensity.mu_b_eff * blind_coeff).exp();
                signal[pulse.index()][det.index()] =
                    1.0 - (-intensity.mu_s_eff * signal_coeff).exp();
            }
        }
        Self { blind, signal }
    }
}

/// Eve's inference from her blinding polarization and the public sifting
/// announcement alone. If the announced basis matches her blinding basis the
/// detection can only have come from the unblinded orthogonal detector; in
/// the other basis both detectors were blinded symmetrically and she learns
/// nothing, so she flips a fair coin.
pub fn eve_guess(
    beta: Polarization,
    announcement: &SiftAnnouncement,
    rng: &mut SplitMix64,
) -> KeyBit {
    debug_assert!(
        announcement.kept,
        "eve_guess is only called for kept rounds"
    );
    if announcement.basis == beta.basis() {
        beta.orthogonal().key_bit()
    } else {
        KeyBit(rng.next_bool())
    }
}

/// Simulate one round. `rng` must be the round's own substream; detector
/// states carry dead-time information between rounds.
pub fn run_round(
    config: &SessionConfig,
    states: &mut [DetectorState; 4],
    rng: &mut SplitMix64,
    index: u64,
) -> RoundRecord {
    let tables = ClickTables::new(&config.intensity);
    run_round_with(&tables, config, states, rng, index)
}

fn run_round_with(
    tables: &ClickTables,
    config: &SessionConfig,
    states: &mut [DetectorState; 4],
    rng: &mut SplitMix64,
    index: u64,
) -> RoundRecord {
    let t_signal = index as f64 * config.timing.period;
    let t_blind = t_signal - config.timing.blinding_offset;
    let t_gate = t_signal - 0.5 * config.timing.window;
    let graded = matches!(config.dead_time_model, DeadTimeModel::Graded { .. });

    // Eve's blinding pulse, outside the acceptance window. One Bernoulli per
    // detector is always drawn so the stream layout does not depend on the
    // blinding outcome.
    let mut blinding = None;
    let mut blind_clicks = [false; 4];
    if config.attack {
        let beta = Polarization::ALL[rng.next_below(4) as usize];
        blinding = Some(beta);
        for det in 0..4 {
            let clicked = rng.bernoulli(tables.blind[beta.index()][det]);
            if clicked {
                blind_clicks[det] = true;
                states[det]
                    .register_click(t_blind)
                    .expect("round times are monotone under a validated config");
            }
        }
    }

    let alice_basis = if rng.next_below(2) == 0 {
        Basis::Rectilinear
    } else {
        Basis::Diagonal
    };
    let alice_bit = KeyBit(rng.next_below(2) == 1);
    let signal = alice_basis.polarization(alice_bit);

    // Countermeasure status is sampled just before the window opens, so the
    // signal click itself cannot trip the gate.
    let mut countermeasure_passed = true;
    for state in states.iter() {
        let draw = if graded { rng.next_f64() } else { 0.0 };
        if !state
            .is_active(t_gate, draw)
            .expect("gate time follows all prior clicks")
        {
            countermeasure_passed = false;
        }
    }

    let mut active = [false; 4];
    for (det, state) in states.iter().enumerate() {
        let draw = if graded { rng.next_f64() } else { 0.0 };
        active[det] = state
            .is_active(t_signal, draw)
            .expect("signal time follows all prior clicks");
    }

    let mut signal_clicks = [false; 4];
    for det in 0..4 {
        let clicked = rng.bernoulli(tables.signal[signal.index()][det]);
        signal_clicks[det] = active[det] && clicked;
    }
    if config.intensity.background > 0.0 {
        for det in 0..4 {
            let clicked = rng.bernoulli(config.intensity.background);
            signal_clicks[det] = signal_clicks[det] || (active[det] && clicked);
        }
    }
    for det in 0..4 {
        if signal_clicks[det] {
            states[det]
                .register_click(t_signal)
                .expect("round times are monotone under a validated config");
        }
    }

    // squash: multi-click events map to a uniformly random clicked detector
    let mut clicked = [0usize; 4];
    let mut n_clicked = 0;
    for (det, &hit) in signal_clicks.iter().enumerate() {
        if hit {
            clicked[n_clicked] = det;
            n_clicked += 1;
        }
    }
    let outcome = match n_clicked {
        0 => None,
        1 => Some(Polarization::ALL[clicked[0]]),
        n => Some(Polarization::ALL[clicked[rng.next_below(n as u32) as usize]]),
    };

    let sifted = outcome.map(|p| p.basis()) == Some(alice_basis);
    let bob_bit = outcome.map(|p| p.key_bit());
    let eve_bit = if sifted {
        let announcement = SiftAnnouncement {
            index,
            basis: outcome.expect("sifted rounds have an outcome").basis(),
            kept: true,
        };
        Some(match blinding {
            Some(beta) => eve_guess(beta, &announcement, rng),
            // no attack: Eve has nothing to condition on
            None => KeyBit(rng.next_bool()),
        })
    } else {
        None
    };

    RoundRecord {
        index,
        blinding,
        blind_clicks,
        alice_basis,
        alice_bit,
        signal_clicks,
        outcome,
        sifted,
        bob_bit,
        eve_bit,
        countermeasure_passed,
    }
}

#[derive(Default)]
struct KeyAccumulator {
    alice: Vec<KeyBit>,
    bob: Vec<KeyBit>,
    eve: Vec<KeyBit>,
}

impl KeyAccumulator {
    fn push(&mut self, record: &RoundRecord) {
        self.alice.push(record.alice_bit);
        self.bob
            .push(record.bob_bit.expect("sifted rounds carry a bob bit"));
        self.eve
            .push(record.eve_bit.expect("sifted rounds carry an eve bit"));
    }

    fn finalize(
        self,
        rounds: u64,
        gated: bool,
        blind_multiplicity: [f64; 4],
        kept_fraction: f64,
    ) -> SessionResult {
        let sifted_len = self.alice.len();
        let (qber_ab, qber_ab_se, qber_be, qber_be_se, i_eb, overlap) = if sifted_len == 0 {
            (None, None, None, None, None, None)
        } else {
            let (ab, ab_se) = compute_qber(&self.alice, &self.bob)
                .expect("sifted keys are non-empty and equal length");
            let (be, be_se) = compute_qber(&self.bob, &self.eve)
                .expect("sifted keys are non-empty and equal length");
            let info = information_from_qber(be).expect("qber is a probability");
            (
                Some(ab),
                Some(ab_se),
                Some(be),
                Some(be_se),
                Some(info),
                Some(1.0 - be),
            )
        };
        SessionResult {
            rounds,
            gated,
            sifted_len,
            alice_key: self.alice,
            bob_key: self.bob,
            eve_key: self.eve,
            qber_ab,
            qber_ab_se,
            qber_be,
            qber_be_se,
            i_eb,
            overlap,
            blind_multiplicity,
            kept_fraction,
        }
    }
}

/// Run one session and return both the ungated and the gated view of the
/// same simulation pass: the gated result keeps only rounds where all
/// detectors were active at the gate instant.
pub fn run_session_pair(config: &SessionConfig) -> Result<(SessionResult, SessionResult)> {
    config.validate()?;
    let tables = ClickTables::new(&config.intensity);
    let mut states = Polarization::ALL.map(|p| DetectorState::new(p, config.dead_time_model));
    let mut ungated = KeyAccumulator::default();
    let mut gated = KeyAccumulator::default();
    let mut multiplicity = [0u64; 5];
    let mut gate_passes = 0u64;

    for index in 0..config.rounds {
        let mut rng = SplitMix64::substream(config.seed, index);
        let record = run_round_with(&tables, config, &mut states, &mut rng, index);
        multiplicity[record.blind_click_count()] += 1;
        if record.countermeasure_passed {
            gate_passes += 1;
        }
        if record.sifted {
            ungated.push(&record);
            if record.countermeasure_passed {
                gated.push(&record);
            }
        }
    }

    let rounds = config.rounds;
    let hist = [
        multiplicity[0] as f64 / rounds as f64,
        multiplicity[1] as f64 / rounds as f64,
        multiplicity[2] as f64 / rounds as f64,
        multiplicity[3] as f64 / rounds as f64,
    ];
    let kept_fraction = gate_passes as f64 / rounds as f64;
    Ok((
        ungated.finalize(rounds, false, hist, kept_fraction),
        gated.finalize(rounds, true, hist, kept_fraction),
    ))
}

/// Run one session with a deterministic per-seed stream. Honors the
/// countermeasure flag: when it is set the keys contain only gate-passing
/// rounds.
pub fn run_session(config: &SessionConfig) -> Result<SessionResult> {
    let (ungated, gated) = run_session_pair(config)?;
    Ok(if config.countermeasure {
        gated
    } else {
        ungated
    })
}

/// Mismatch fraction between two equal-length keys and its binomial standard
/// error `sqrt(q (1 - q) / n)`.
pub fn compute_qber(key_a: &[KeyBit], key_b: &[KeyBit]) -> Result<(f64, f64)> {
    if key_a.len() != key_b.len() {
        return Err(Error::KeyLengthMismatch {
            left: key_a.len(),
            right: key_b.len(),
        });
    }
    if key_a.is_empty() {
        return Err(Error::EmptyKey);
    }
    let n = key_a.len();
    let mismatches = key_a
        .iter()
        .zip(key_b.iter())
        .filter(|(a, b)| a != b)
        .count();
    let q = mismatches as f64 / n as f64;
    Ok((q, (q * (1.0 - q) / n as f64).sqrt()))
}

/// Pack key bits most-significant-bit-first, zero-padding the final byte.
pub fn pack_bits(bits: &[KeyBit]) -> Vec<u8> {
    let mut out = vec![0u8; bits.len().div_ceil(8)];
    for (i, bit) in bits.iter().enumerate() {
        if bit.0 {
            out[i / 8] |= 0x80 >> (i % 8);
        }
    }
    out
}

/// Inverse of [`pack_bits`] given the original bit length.
pub fn unpack_bits(bytes: &[u8], len: usize) -> Result<Vec<KeyBit>> {
    if len > bytes.len() * 8 {
        return Err(Error::KeyTooShort {
            required_bits: len,
            available_bits: bytes.len() * 8,
        });
    }
    Ok((0..len)
        .map(|i| KeyBit(bytes[i / 8] & (0x80 >> (i % 8)) != 0))
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn base_config() -> SessionConfig {
        SessionConfig {
            intensity: IntensityConfig {
                e_pol: 0.0,
                ..IntensityConfig::default()
            },
            rounds: 20_000,
            seed: 7,
            ..SessionConfig::default()
        }
    }

    #[test]
    fn eve_guess_rules() {
        let kept = |basis| SiftAnnouncement {
            index: 0,
            basis,
            kept: true,
        };
        let mut rng = SplitMix64::new(1);
        // blinded -45: the surviving diagonal detector is +45, bit 0
        assert_eq!(
            eve_guess(Polarization::M45, &kept(Basis::Diagonal), &mut rng),
            KeyBit::ZERO
        );
        assert_eq!(
            eve_guess(Polarization::H, &kept(Basis::Rectilinear), &mut rng),
            KeyBit::ONE
        );
    }

    #[test]
    fn eve_guess_cross_basis_is_fair_coin() {
        let ann = SiftAnnouncement {
            index: 0,
            basis: Basis::Diagonal,
            kept: true,
        };
        let mut rng = SplitMix64::new(3);
        let n = 100_000;
        let ones: u32 = (0..n)
            .map(|_| eve_guess(Polarization::H, &ann, &mut rng).value() as u32)
            .sum();
        let mean = ones as f64 / n as f64;
        let sigma = 0.5 / (n as f64).sqrt();
        assert!((mean - 0.5).abs() <= 3.0 * sigma, "mean {mean}");
    }

    #[test]
    fn no_light_means_no_outcome() {
        let config = SessionConfig {
            intensity: IntensityConfig {
                mu_s_eff: 0.0,
                e_pol: 0.0,
                ..IntensityConfig::default()
            },
            rounds: 1_000,
            ..SessionConfig::default()
        };
        let result = run_session(&config).unwrap();
        assert_eq!(result.sifted_len, 0);
        assert_eq!(result.qber_ab, None);
        assert_eq!(result.qber_be, None);
        assert_eq!(result.i_eb, None);
    }

    #[test]
    fn noiseless_channel_gives_zero_qber_ab() {
        let config = SessionConfig {
            attack: false,
            ..base_config()
        };
        let result = run_session(&config).unwrap();
        assert!(result.sifted_len > 100);
        assert_eq!(result.qber_ab, Some(0.0));
        // Eve guesses blind
        let qbe = result.qber_be.unwrap();
        let sigma = 0.5 / (result.sifted_len as f64).sqrt();
        assert!((qbe - 0.5).abs() <= 3.0 * sigma, "qber_be {qbe}");
    }

    #[test]
    fn sifted_rounds_are_consistent() {
        let config = base_config();
        let tables = ClickTables::new(&config.intensity);
        let mut states = Polarization::ALL.map(|p| DetectorState::new(p, config.dead_time_model));
        for index in 0..5_000 {
            let mut rng = SplitMix64::substream(config.seed, index);
            let rec = run_round_with(&tables, &config, &mut states, &mut rng, index);
            if rec.sifted {
                let outcome = rec.outcome.expect("sifted implies an outcome");
                assert_eq!(outcome.basis(), rec.alice_basis);
                assert!(rec.eve_bit.is_some());
            }
            if let Some(beta) = rec.blinding {
                // the detector orthogonal to the blinding never fires on it
                assert!(!rec.blind_clicks[beta.orthogonal().index()]);
            }
        }
    }

    #[test]
    fn sessions_are_deterministic() {
        let config = base_config();
        let a = run_session(&config).unwrap();
        let b = run_session(&config).unwrap();
        assert_eq!(a, b);
        let other_seed = SessionConfig { seed: 8, ..config };
        assert_ne!(run_session(&other_seed).unwrap(), a);
    }

    #[test]
    fn extinction_leaks_blinding_into_the_orthogonal_detector() {
        let config = SessionConfig {
            intensity: IntensityConfig {
                mu_b_eff: 16.52,
                extinction: 0.5,
                e_pol: 0.0,
                ..IntensityConfig::default()
            },
            rounds: 10_000,
            seed: 23,
            ..SessionConfig::default()
        };
        let tables = ClickTables::new(&config.intensity);
        let mut states = Polarization::ALL.map(|p| DetectorState::new(p, config.dead_time_model));
        let mut orthogonal_hits = 0u32;
        let mut four_clicks = 0u32;
        for index in 0..config.rounds {
            let mut rng = SplitMix64::substream(config.seed, index);
            let rec = run_round_with(&tables, &config, &mut states, &mut rng, index);
            let beta = rec.blinding.unwrap();
            if rec.blind_clicks[beta.orthogonal().index()] {
                orthogonal_hits += 1;
            }
            if rec.blind_click_count() == 4 {
                four_clicks += 1;
            }
        }
        // leaked intensity 0.5 * mu/2 = 4.13 photons: the orthogonal
        // detector fires almost every round
        assert!(orthogonal_hits > 9_000, "orthogonal hits {orthogonal_hits}");
        assert!(four_clicks > 8_000, "four-click rounds {four_clicks}");

        // 4-click rounds fall outside the 0..3 histogram bins
        let result = run_session(&config).unwrap();
        let covered: f64 = result.blind_multiplicity.iter().sum();
        assert!(covered < 0.5, "histogram covers {covered}");
    }

    #[test]
    fn background_clicks_alone_make_noise_outcomes() {
        let config = SessionConfig {
            intensity: IntensityConfig {
                mu_s_eff: 0.0,
                e_pol: 0.0,
                background: 0.05,
                ..IntensityConfig::default()
            },
            attack: false,
            rounds: 50_000,
            seed: 29,
            ..SessionConfig::default()
        };
        let result = run_session(&config).unwrap();
        // background clicks carry no signal information: half the outcome
        // rounds sift, and the sifted bits are uncorrelated with Alice's
        assert!(result.sifted_len > 1_000, "sifted {}", result.sifted_len);
        let q = result.qber_ab.unwrap();
        let sigma = 0.5 / (result.sifted_len as f64).sqrt();
        assert!((q - 0.5).abs() <= 3.0 * sigma, "qber_ab {q}");
    }

    #[test]
    fn run_round_replays_the_session_rounds() {
        let config = base_config();
        let mut states = Polarization::ALL.map(|p| DetectorState::new(p, config.dead_time_model));
        let mut alice = Vec::new();
        let mut bob = Vec::new();
        for index in 0..config.rounds {
            let mut rng = SplitMix64::substream(config.seed, index);
            let rec = run_round(&config, &mut states, &mut rng, index);
            if rec.sifted {
                alice.push(rec.alice_bit);
                bob.push(rec.bob_bit.unwrap());
            }
        }
        let session = run_session(&config).unwrap();
        assert_eq!(alice, session.alice_key);
        assert_eq!(bob, session.bob_key);
    }

    #[test]
    fn compute_qber_examples() {
        let k = |bits: &[u8]| -> Vec<KeyBit> { bits.iter().map(|&b| KeyBit(b == 1)).collect() };
        let (q, _) = compute_qber(&k(&[0, 1, 0, 1]), &k(&[0, 1, 0, 1])).unwrap();
        assert_eq!(q, 0.0);
        let (q, _) = compute_qber(&k(&[0, 0, 0, 0]), &k(&[1, 1, 1, 1])).unwrap();
        assert_eq!(q, 1.0);

        // 20,000-bit keys with exactly 1% mismatches
        let a = vec![KeyBit::ZERO; 20_000];
        let mut b = a.clone();
        for i in 0..200 {
            b[i * 100] = KeyBit::ONE;
        }
        let (q, se) = compute_qber(&a, &b).unwrap();
        assert_eq!(q, 0.01);
        assert!((se - 7.035_623_639_735_144e-4).abs() < 1e-12);

        assert!(matches!(
            compute_qber(&a, &b[..100]),
            Err(Error::KeyLengthMismatch { .. })
        ));
        assert!(matches!(compute_qber(&[], &[]), Err(Error::EmptyKey)));
    }

    #[test]
    fn packing_is_msb_first() {
        let bits: Vec<KeyBit> = [1u8, 0, 1, 1, 0, 0, 1, 0, 1, 1]
            .iter()
            .map(|&b| KeyBit(b == 1))
            .collect();
        assert_eq!(pack_bits(&bits), vec![0b1011_0010, 0b1100_0000]);
        assert_eq!(unpack_bits(&[0b1011_0010, 0b1100_0000], 10).unwrap(), bits);
        assert!(unpack_bits(&[0xFF], 9).is_err());
    }

    #[test]
    fn config_validation() {
        assert!(SessionConfig::default().validate().is_ok());
        let zero_rounds = SessionConfig {
            rounds: 0,
            ..SessionConfig::default()
        };
        assert!(zero_rounds.validate().is_err());
        let slow_model = SessionConfig {
            dead_time_model: DeadTimeModel::binary(4e-6),
            ..SessionConfig::default()
        };
        assert!(slow_model.validate().is_err());
    }

    proptest! {
        #[test]
        fn pack_unpack_round_trip(bits in proptest::collection::vec(any::<bool>(), 0..200)) {
            let key: Vec<KeyBit> = bits.into_iter().map(KeyBit).collect();
            let packed = pack_bits(&key);
            prop_assert_eq!(unpack_bits(&packed, key.len()).unwrap(), key);
        }
    }
}
