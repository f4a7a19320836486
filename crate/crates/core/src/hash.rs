//! Byte-level primitives shared by the hash-based schemes: SHA-256,
//! iterated hash chains, seeded pseudorandom expansion, and binary
//! Merkle trees with authentication paths.
//!
//! Everything here is a pure function of its inputs. All key material in
//! the crate is derived through [`prg_expand`], so key generation is
//! reproducible from a 32-byte [`Seed`].

use std::fmt;

use sha2::{Digest, Sha256};

use crate::error::{Error, Result};

/// A 32-byte SHA-256 output, the atom of every hash-based scheme here.
#[derive(Clone, Copy, PartialEq, Eq, Hash)]
pub struct Digest256(pub [u8; 32]);

impl Digest256 {
    pub const SIZE: usize = 32;

    pub fn as_bytes(&self) -> &[u8; 32] {
        &self.0
    }

    pub fn to_hex(&self) -> String {
        let mut s = String::with_capacity(64);
        for b in &self.0 {
            s.push_str(&format!("{b:02x}"));
        }
        s
    }

    pub fn from_slice(bytes: &[u8]) -> Result<Self> {
        let arr: [u8; 32] = bytes.try_into().map_err(|_| {
            Error::InvalidInput(format!("digest must be 32 bytes, got {}", bytes.len()))
        })?;
        Ok(Digest256(arr))
    }
}

impl fmt::Debug for Digest256 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Digest256({})", self.to_hex())
    }
}

impl AsRef<[u8]> for Digest256 {
    fn as_ref(&self) -> &[u8] {
        &self.0
    }
}

impl From<[u8; 32]> for Digest256 {
    fn from(bytes: [u8; 32]) -> Self {
        Digest256(bytes)
    }
}

/// 32 bytes of entropy. Every key pair in the crate is a deterministic
/// function of one of these.
#[derive(Clone, Copy, PartialEq, Eq)]
pub struct Seed(pub [u8; 32]);

impl Seed {
    pub fn as_bytes(&self) -> &[u8; 32] {
        &self.0
    }

    pub fn from_slice(bytes: &[u8]) -> Result<Self> {
        let arr: [u8; 32] = bytes.try_into().map_err(|_| {
            Error::InvalidInput(format!("seed must be 32 bytes, got {}", bytes.len()))
        })?;
        Ok(Seed(arr))
    }
}

impl fmt::Debug for Seed {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        // Print a fingerprint, not the seed itself.
        let fp = sha256(&self.0);
        write!(f, "Seed(fp:{})", &fp.to_hex()[..16])
    }
}

/// Standard SHA-256.
pub fn sha256(data: &[u8]) -> Digest256 {
    let mut h = Sha256::new();
    h.update(data);
    Digest256(h.finalize().into())
}

/// sha256(left || right), the Merkle internal-node rule.
pub fn sha256_pair(left: &Digest256, right: &Digest256) -> Digest256 {
    let mut h = Sha256::new();
    h.update(left.0);
    h.update(right.0);
    Digest256(h.finalize().into())
}

/// Apply sha256 `iterations` times, each round hashing the previous
/// 32-byte digest. Zero iterations returns `start` unchanged.
pub fn hash_chain(start: &Digest256, iterations: u32) -> Digest256 {
    let mut d = *start;
    for _ in 0..iterations {
        d = sha256(&d.0);
    }
    d
}

/// sha256(seed || domain_tag || index as 4-byte big-endian).
///
/// The layout is fixed bit-exactly so independently written
/// implementations derive identical key material from the same seed.
pub fn prg_expand(seed: &Seed, domain_tag: u8, index: u32) -> Digest256 {
    let mut h = Sha256::new();
    h.update(seed.0);
    h.update([domain_tag]);
    h.update(index.to_be_bytes());
    Digest256(h.finalize().into())
}

/// Deterministic byte stream over consecutive [`prg_expand`] blocks, for
/// samplers that need more than 32 bytes (mod-q vectors, prime candidates).
pub struct PrgStream {
    seed: Seed,
    domain_tag: u8,
    counter: u32,
    block: [u8; 32],
    pos: usize,
}

impl PrgStream {
    pub fn new(seed: &Seed, domain_tag: u8) -> Self {
        PrgStream { seed: *seed, domain_tag, counter: 0, block: [0u8; 32], pos: 32 }
    }

    pub fn next_byte(&mut self) -> u8 {
        if self.pos == 32 {
            self.block = prg_expand(&self.seed, self.domain_tag, self.counter).0;
            self.counter = self.counter.wrapping_add(1);
            self.pos = 0;
        }
        let b = self.block[self.pos];
        self.pos += 1;
        b
    }

    /// Next two bytes as a big-endian u16.
    pub fn next_u16(&mut self) -> u16 {
        let hi = self.next_byte();
        let lo = self.next_byte();
        u16::from_be_bytes([hi, lo])
    }

    pub fn fill(&mut self, out: &mut [u8]) {
        for b in out.iter_mut() {
            *b = self.next_byte();
        }
    }
}

/// Sibling digests proving one leaf belongs to a Merkle root. Siblings
/// are ordered from the leaf level up; bit i of `leaf_index` gives the
/// node's side at level i (0 = left child).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MerkleAuthPath {
    pub leaf_index: u32,
    pub siblings: Vec<Digest256>,
}

impl MerkleAuthPath {
    pub fn height(&self) -> usize {
        self.siblings.len()
    }
}

fn check_leaves(leaves: &[Digest256]) -> Result<()> {
    if leaves.is_empty() || !leaves.len().is_power_of_two() {
        return Err(Error::InvalidInput(format!(
            "merkle tree needs a non-empty power-of-two leaf count, got {}",
            leaves.len()
        )));
    }
    Ok(())
}

/// Root of the binary tree with internal nodes sha256(left || right).
/// A single leaf is its own root.
pub fn merkle_root(leaves: &[Digest256]) -> Result<Digest256> {
    check_leaves(leaves)?;
    let mut level = leaves.to_vec();
    while level.len() > 1 {
        level = level.chunks(2).map(|pair| sha256_pair(&pair[0], &pair[1])).collect();
    }
    Ok(level[0])
}

/// Sibling digests needed to recompute the root from `leaves[leaf_index]`.
pub fn merkle_path(leaves: &[Digest256], leaf_index: u32) -> Result<MerkleAuthPath> {
    check_leaves(leaves)?;
    if leaf_index as usize >= leaves.len() {
        return Err(Error::InvalidInput(format!(
            "leaf index {leaf_index} out of range for {} leaves",
            leaves.len()
        )));
    }
    let mut siblings = Vec::new();
    let mut level = leaves.to_vec();
    let mut idx = leaf_index as usize;
    while level.len() > 1 {
        siblings.push(level[idx ^ 1]);
        level = level.chunks(2).map(|pair| sha256_pair(&pair[0], &pair[1])).collect();
        idx /= 2;
    }
    Ok(MerkleAuthPath { leaf_index, siblings })
}

/// Fold `leaf` up through the path's siblings and compare with `root`.
/// Any mismatch, including an index outside the tree, returns false.
pub fn verify_path(leaf: &Digest256, path: &MerkleAuthPath, root: &Digest256) -> bool {
    let height = path.siblings.len();
    if height >= 32 || u64::from(path.leaf_index) >= (1u64 << height) {
        return false;
    }
    let mut node = *leaf;
    let mut idx = path.leaf_index;
    for sibling in &path.siblings {
        node = if idx & 1 == 0 { sha256_pair(&node, sibling) } else { sha256_pair(sibling, &node) };
        idx >>= 1;
    }
    node == *root
}
