//! Winternitz one-time signatures over whole bytes (w = 256).
//!
//! 32 random chain-start values form the secret key; hashing each one
//! 256 times gives the public chain ends. To sign, hash chain i forward
//! 256 − N_i steps, where N_i is byte i of sha256(message); the verifier
//! hashes each element the remaining N_i steps and compares against the
//! chain ends. Sign steps plus verify steps always total 256 per chain.
//!
//! Without a checksum the construction is malleable: a signature element
//! for digit N sits 256 − N steps along its chain, so anyone can hash
//! elements further forward and reach the element for any smaller digit.
//! That forges every message whose digits are all <= the signed ones.
//! `checksum_mode` appends two chains covering C = sum(255 − N_i);
//! lowering any message digit raises C, and a raised checksum digit
//! would require walking a hash chain backwards. Both modes are kept:
//! the plain mode is the baseline, the checksum mode is the hardened
//! variant. The malleability is demonstrated, not just asserted, in the
//! test suite.

use crate::error::{Error, Result};
use crate::hash::{hash_chain, prg_expand, sha256, Digest256, Seed};

/// Chains covering the 32 message-digest bytes.
pub const MSG_CHAINS: usize = 32;
/// Extra chains covering the checksum in checksum mode.
pub const CHECKSUM_CHAINS: usize = 2;
/// Hash applications from chain start to chain end.
pub const CHAIN_LEN: u32 = 256;
/// Key-file mode flags.
pub const MODE_FLAG_PLAIN: u8 = 0x00;
pub const MODE_FLAG_CHECKSUM: u8 = 0x01;

const TAG_CHAIN: u8 = 0x0C;

pub fn chain_count(checksum_mode: bool) -> usize {
    if checksum_mode {
        MSG_CHAINS + CHECKSUM_CHAINS
    } else {
        MSG_CHAINS
    }
}

/// Serialized signature size: raw elements, no framing.
pub fn signature_bytes(checksum_mode: bool) -> usize {
    chain_count(checksum_mode) * Digest256::SIZE
}

/// Serialized key size: 1-byte mode flag plus raw digests.
pub fn key_bytes(checksum_mode: bool) -> usize {
    1 + chain_count(checksum_mode) * Digest256::SIZE
}

#[derive(Clone, PartialEq, Eq, Debug)]
pub struct WotsSecretKey {
    /// Chain-start values; chains[i] = prg_expand(seed, 0x0C, i).
    pub chains: Vec<Digest256>,
    pub checksum_mode: bool,
}

#[derive(Clone, PartialEq, Eq, Debug)]
pub struct WotsPublicKey {
    /// chain_ends[i] = hash_chain(chains[i], 256).
    pub chain_ends: Vec<Digest256>,
    pub checksum_mode: bool,
}

#[derive(Clone, PartialEq, Eq, Debug)]
pub struct WotsSignature {
    /// elements[i] = hash_chain(chains[i], 256 − N_i).
    pub elements: Vec<Digest256>,
    pub checksum_mode: bool,
}

pub fn keygen(seed: &Seed, checksum_mode: bool) -> (WotsPublicKey, WotsSecretKey) {
    let chains: Vec<_> =
        (0..chain_count(checksum_mode) as u32).map(|i| prg_expand(seed, TAG_CHAIN, i)).collect();
    let chain_ends = chains.iter().map(|c| hash_chain(c, CHAIN_LEN)).collect();
    (WotsPublicKey { chain_ends, checksum_mode }, WotsSecretKey { chains, checksum_mode })
}

/// The two base-256 checksum digits of C = sum(255 − N_i), big-endian.
/// C is at most 32 × 255 = 8160, which fits in two digits.
pub fn checksum_digits(msg_digits: &[u8]) -> [u8; 2] {
    let c: u32 = msg_digits.iter().map(|&n| 255 - u32::from(n)).sum();
    [(c >> 8) as u8, (c & 0xFF) as u8]
}

/// Per-chain digits for a message: the 32 bytes of sha256(message),
/// plus the two checksum digits in checksum mode.
pub fn digits(message: &[u8], checksum_mode: bool) -> Vec<u8> {
    let h = sha256(message);
    let mut out = h.0.to_vec();
    if checksum_mode {
        out.extend_from_slice(&checksum_digits(&h.0));
    }
    out
}

/// Sign a digit vector directly. Building block for [`sign`]; exposed so
/// chain-level behavior can be tested without hunting for a message that
/// hashes to chosen digits.
pub fn sign_digits(sk: &WotsSecretKey, msg_digits: &[u8]) -> Result<WotsSignature> {
    if msg_digits.len() != chain_count(sk.checksum_mode) {
        return Err(Error::InvalidInput(format!(
            "expected {} digits, got {}",
            chain_count(sk.checksum_mode),
            msg_digits.len()
        )));
    }
    let elements = sk
        .chains
        .iter()
        .zip(msg_digits)
        .map(|(chain, &n)| hash_chain(chain, CHAIN_LEN - u32::from(n)))
        .collect();
    Ok(WotsSignature { elements, checksum_mode: sk.checksum_mode })
}

pub fn sign(sk: &WotsSecretKey, message: &[u8]) -> WotsSignature {
    sign_digits(sk, &digits(message, sk.checksum_mode)).expect("digit count matches key mode")
}

/// Verify against a digit vector directly; counterpart of [`sign_digits`].
pub fn verify_digits(pk: &WotsPublicKey, msg_digits: &[u8], sig: &WotsSignature) -> bool {
    let count = chain_count(pk.checksum_mode);
    if sig.checksum_mode != pk.checksum_mode
        || sig.elements.len() != count
        || pk.chain_ends.len() != count
        || msg_digits.len() != count
    {
        return false;
    }
    sig.elements
        .iter()
        .zip(msg_digits)
        .zip(&pk.chain_ends)
        .all(|((element, &n), end)| hash_chain(element, u32::from(n)) == *end)
}

pub fn verify(pk: &WotsPublicKey, message: &[u8], sig: &WotsSignature) -> bool {
    verify_digits(pk, &digits(message, pk.checksum_mode), sig)
}

fn mode_flag(checksum_mode: bool) -> u8 {
    if checksum_mode {
        MODE_FLAG_CHECKSUM
    } else {
        MODE_FLAG_PLAIN
    }
}

fn parse_mode_flag(byte: u8) -> Result<bool> {
    match byte {
        MODE_FLAG_PLAIN => Ok(false),
        MODE_FLAG_CHECKSUM => Ok(true),
        other => Err(Error::Malformed(format!("unknown wots mode flag 0x{other:02x}"))),
    }
}

fn key_digests_to_bytes(digests: &[Digest256], checksum_mode: bool) -> Vec<u8> {
    let mut out = Vec::with_capacity(key_bytes(checksum_mode));
    out.push(mode_flag(checksum_mode));
    for d in digests {
        out.extend_from_slice(&d.0);
    }
    out
}

fn key_digests_from_bytes(bytes: &[u8], what: &str) -> Result<(Vec<Digest256>, bool)> {
    let (&flag, rest) =
        bytes.split_first().ok_or_else(|| Error::Malformed(format!("{what} is empty")))?;
    let checksum_mode = parse_mode_flag(flag)?;
    let expected = chain_count(checksum_mode) * Digest256::SIZE;
    if rest.len() != expected {
        return Err(Error::Malformed(format!(
            "{what} must be {} bytes after the mode flag, got {}",
            expected,
            rest.len()
        )));
    }
    let digests =
        rest.chunks_exact(Digest256::SIZE).map(|c| Digest256(c.try_into().unwrap())).collect();
    Ok((digests, checksum_mode))
}

impl WotsSecretKey {
    pub fn to_bytes(&self) -> Vec<u8> {
        key_digests_to_bytes(&self.chains, self.checksum_mode)
    }

    pub fn from_bytes(bytes: &[u8]) -> Result<Self> {
        let (chains, checksum_mode) = key_digests_from_bytes(bytes, "wots secret key")?;
        Ok(WotsSecretKey { chains, checksum_mode })
    }
}

impl WotsPublicKey {
    pub fn to_bytes(&self) -> Vec<u8> {
        key_digests_to_bytes(&self.chain_ends, self.checksum_mode)
    }

    pub fn from_bytes(bytes: &[u8]) -> Result<Self> {
        let (chain_ends, checksum_mode) = key_digests_from_bytes(bytes, "wots public key")?;
        Ok(WotsPublicKey { chain_ends, checksum_mode })
    }
}

impl WotsSignature {
    /// Raw elements in chain order; the mode travels out of band (scheme
    /// tag or key file).
    pub fn to_bytes(&self) -> Vec<u8> {
        let mut out = Vec::with_capacity(self.elements.len() * Digest256::SIZE);
        for e in &self.elements {
            out.extend_from_slice(&e.0);
        }
        out
    }

    pub fn from_bytes(bytes: &[u8], checksum_mode: bool) -> Result<Self> {
        let expected = signature_bytes(checksum_mode);
        if bytes.len() != expected {
            return Err(Error::Malformed(format!(
                "wots signature must be {expected} bytes, got {}",
                bytes.len()
            )));
        }
        let elements =
            bytes.chunks_exact(Digest256::SIZE).map(|c| Digest256(c.try_into().unwrap())).collect();
        Ok(WotsSignature { elements, checksum_mode })
    }
}

/// The chain-advancing forgery: given a signature over `from_digits`,
/// hash each element forward by the digit difference. An element for
/// digit N is hash_chain(chain, 256 − N), so advancing from − to steps
/// yields the element for any target digit to <= from. Where a target
/// digit is larger the attacker is stuck (the element they need lies
/// behind the one they hold) and the element is left as-is. That stuck
/// case is exactly what the checksum chains force.
///
/// Test/demo helper: this is the attack, kept callable so the suite can
/// show plain mode accepting it and checksum mode rejecting it.
pub fn forge_by_advancing(
    sig: &WotsSignature,
    from_digits: &[u8],
    to_digits: &[u8],
) -> WotsSignature {
    let elements = sig
        .elements
        .iter()
        .zip(from_digits)
        .zip(to_digits)
        .map(
            |((element, &from), &to)| {
                if to <= from {
                    hash_chain(element, u32::from(from - to))
                } else {
                    *element
                }
            },
        )
        .collect();
    WotsSignature { elements, checksum_mode: sig.checksum_mode }
}
