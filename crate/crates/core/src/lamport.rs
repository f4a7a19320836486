//! Lamport one-time signatures.
//!
//! The secret key is two lists of 256 random values, one list for
//! message-hash bits that are 0 (the "A" list) and one for bits that
//! are 1 (the "B" list). The public key is the hash of each of the 512
//! values. A signature reveals, per bit of sha256(message), the secret
//! value from the matching list; the verifier hashes each revealed
//! value and compares it against the public entry for that slot.
//!
//! Revealing secret values is exactly why a key must sign only once;
//! reuse hands an attacker mix-and-match material. This module is pure;
//! one-time enforcement lives in [`crate::scheme`].

use crate::error::{Error, Result};
use crate::hash::{prg_expand, sha256, Digest256, Seed};

/// Bits in the message digest, and per-list key count.
pub const NUM_BITS: usize = 256;
/// Secret key: 512 digests, A list then B list.
pub const SECRET_KEY_BYTES: usize = 2 * NUM_BITS * Digest256::SIZE;
/// Public key: 512 digests, A hashes then B hashes.
pub const PUBLIC_KEY_BYTES: usize = 2 * NUM_BITS * Digest256::SIZE;
/// Signature: one revealed digest per message-hash bit.
pub const SIGNATURE_BYTES: usize = NUM_BITS * Digest256::SIZE;

const TAG_A: u8 = 0x0A;
const TAG_B: u8 = 0x0B;

#[derive(Clone, PartialEq, Eq, Debug)]
pub struct LamportSecretKey {
    /// Revealed when the message-hash bit is 0.
    pub a_keys: Vec<Digest256>,
    /// Revealed when the message-hash bit is 1.
    pub b_keys: Vec<Digest256>,
}

#[derive(Clone, PartialEq, Eq, Debug)]
pub struct LamportPublicKey {
    pub a_hashes: Vec<Digest256>,
    pub b_hashes: Vec<Digest256>,
}

#[derive(Clone, PartialEq, Eq, Debug)]
pub struct LamportSignature {
    pub revealed: Vec<Digest256>,
}

/// Bit i of a digest, big-endian within each byte: bit 0 is the most
/// significant bit of byte 0.
pub(crate) fn digest_bit(digest: &Digest256, i: usize) -> u8 {
    (digest.0[i / 8] >> (7 - i % 8)) & 1
}

/// Deterministic key generation: A[i] and B[i] come from `prg_expand`
/// under distinct domain tags.
pub fn keygen(seed: &Seed) -> (LamportPublicKey, LamportSecretKey) {
    let a_keys: Vec<_> = (0..NUM_BITS as u32).map(|i| prg_expand(seed, TAG_A, i)).collect();
    let b_keys: Vec<_> = (0..NUM_BITS as u32).map(|i| prg_expand(seed, TAG_B, i)).collect();
    let a_hashes = a_keys.iter().map(|k| sha256(&k.0)).collect();
    let b_hashes = b_keys.iter().map(|k| sha256(&k.0)).collect();
    (LamportPublicKey { a_hashes, b_hashes }, LamportSecretKey { a_keys, b_keys })
}

/// Reveal A[i] or B[i] per bit i of sha256(message).
pub fn sign(sk: &LamportSecretKey, message: &[u8]) -> LamportSignature {
    let h = sha256(message);
    let revealed = (0..NUM_BITS)
        .map(|i| if digest_bit(&h, i) == 0 { sk.a_keys[i] } else { sk.b_keys[i] })
        .collect();
    LamportSignature { revealed }
}

/// Check every revealed value against the public entry for its slot.
/// Comparison is positional: slot i is checked against slot i only, so
/// permuting a signature cannot forge.
pub fn verify(pk: &LamportPublicKey, message: &[u8], sig: &LamportSignature) -> bool {
    if sig.revealed.len() != NUM_BITS
        || pk.a_hashes.len() != NUM_BITS
        || pk.b_hashes.len() != NUM_BITS
    {
        return false;
    }
    let h = sha256(message);
    (0..NUM_BITS).all(|i| {
        let expect = if digest_bit(&h, i) == 0 { &pk.a_hashes[i] } else { &pk.b_hashes[i] };
        sha256(&sig.revealed[i].0) == *expect
    })
}

fn concat_digests(lists: &[&[Digest256]]) -> Vec<u8> {
    let mut out = Vec::new();
    for list in lists {
        for digest in *list {
            out.extend_from_slice(&digest.0);
        }
    }
    out
}

fn split_digests(bytes: &[u8], expected: usize, what: &str) -> Result<Vec<Digest256>> {
    if bytes.len() != expected * Digest256::SIZE {
        return Err(Error::Malformed(format!(
            "{what} must be {} bytes, got {}",
            expected * Digest256::SIZE,
            bytes.len()
        )));
    }
    Ok(bytes.chunks_exact(Digest256::SIZE).map(|c| Digest256(c.try_into().unwrap())).collect())
}

impl LamportSecretKey {
    /// A list then B list, raw digests in index order.
    pub fn to_bytes(&self) -> Vec<u8> {
        concat_digests(&[&self.a_keys, &self.b_keys])
    }

    pub fn from_bytes(bytes: &[u8]) -> Result<Self> {
        let all = split_digests(bytes, 2 * NUM_BITS, "lamport secret key")?;
        let (a, b) = all.split_at(NUM_BITS);
        Ok(LamportSecretKey { a_keys: a.to_vec(), b_keys: b.to_vec() })
    }
}

impl LamportPublicKey {
    /// A hashes then B hashes, raw digests in index order.
    pub fn to_bytes(&self) -> Vec<u8> {
        concat_digests(&[&self.a_hashes, &self.b_hashes])
    }

    pub fn from_bytes(bytes: &[u8]) -> Result<Self> {
        let all = split_digests(bytes, 2 * NUM_BITS, "lamport public key")?;
        let (a, b) = all.split_at(NUM_BITS);
        Ok(LamportPublicKey { a_hashes: a.to_vec(), b_hashes: b.to_vec() })
    }
}

impl LamportSignature {
    pub fn to_bytes(&self) -> Vec<u8> {
        concat_digests(&[&self.revealed])
    }

    pub fn from_bytes(bytes: &[u8]) -> Result<Self> {
        Ok(LamportSignature { revealed: split_digests(bytes, NUM_BITS, "lamport signature")? })
    }
}
