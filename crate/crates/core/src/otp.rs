//! One-time-pad demonstration: Alice encrypts with her sifted key, Bob and
//! Eve decrypt with theirs; key bit errors show up one-for-one as flipped
//! plaintext bits.

use crate::error::{Error, Result};
use crate::protocol::{pack_bits, SessionResult};
use crate::types::KeyBit;

/// XOR a byte string with a key bit string, consuming key bits
/// most-significant-bit-first. The key must cover the data; it is never
/// stretched or reused.
pub fn xor_bytes(data: &[u8], key: &[KeyBit]) -> Result<Vec<u8>> {
    let required_bits = data.len() * 8;
    if key.len() < required_bits {
        return Err(Error::KeyTooShort {
            required_bits,
            available_bits: key.len(),
        });
    }
    let key_bytes = pack_bits(&key[..required_bits]);
    Ok(data
        .iter()
        .zip(key_bytes.iter())
        .map(|(d, k)| d ^ k)
        .collect())
}

/// Outcome of the encrypt/decrypt demonstration.
#[derive(Debug, Clone, PartialEq)]
pub struct OtpDemo {
    pub ciphertext: Vec<u8>,
    pub bob_plaintext: Vec<u8>,
    pub eve_plaintext: Vec<u8>,
    /// Fraction of plaintext bits Eve got wrong; matches the session's
    /// Bob-Eve error ratio up to sampling noise.
    pub eve_bit_error_fraction: f64,
}

/// Encrypt `payload` with Alice's sifted key and decrypt with Bob's and
/// Eve's.
pub fn demo_pipeline(payload: &[u8], session: &SessionResult) -> Result<OtpDemo> {
    let ciphertext = xor_bytes(payload, &session.alice_key)?;
    let bob_plaintext = xor_bytes(&ciphertext, &session.bob_key)?;
    let eve_plaintext = xor_bytes(&ciphertext, &session.eve_key)?;
    let flipped: u32 = payload
        .iter()
        .zip(eve_plaintext.iter())
        .map(|(a, b)| (a ^ b).count_ones())
        .sum();
    Ok(OtpDemo {
        ciphertext,
        bob_plaintext,
        eve_plaintext,
        eve_bit_error_fraction: flipped as f64 / (payload.len() * 8) as f64,
    })
}
