//! Many-time signatures from a Merkle tree of one-time Winternitz keys.
//!
//! One master seed deterministically derives 2^h one-time key pairs;
//! the 32-byte tree root over their public-key digests is the whole
//! public key. Each signature spends one leaf and carries that leaf's
//! one-time signature, its full one-time public key, and the
//! authentication path back to the root. The verifier checks both legs:
//! the one-time signature against the carried leaf key, and the leaf
//! key's digest against the root via the path. Dropping either leg
//! admits forgeries.
//!
//! Signing is stateful. [`MssKeyPair::sign`] consumes leaves in order
//! and the caller must persist the advanced counter before releasing a
//! signature; the key-store layer does exactly that.

use crate::error::{Error, Result};
use crate::hash::{
    merkle_path, merkle_root, prg_expand, sha256, verify_path, Digest256, MerkleAuthPath, Seed,
};
use crate::wots;

/// Height bound keeping keygen at a desk-scale 2^20 leaf keygens.
pub const MAX_HEIGHT: u32 = 20;

const TAG_LEAF_SEED: u8 = 0x4C;

/// Serialized signing-state size: seed, height, mode flag, counter.
pub const STATE_BYTES: usize = 32 + 1 + 1 + 8;

/// Seed for leaf i's one-time key pair.
pub fn leaf_seed(master_seed: &Seed, index: u32) -> Seed {
    Seed(prg_expand(master_seed, TAG_LEAF_SEED, index).0)
}

/// Leaf digest: sha256 over the concatenated chain ends of the leaf's
/// one-time public key.
pub fn leaf_digest(leaf_public: &wots::WotsPublicKey) -> Digest256 {
    let mut bytes = Vec::with_capacity(leaf_public.chain_ends.len() * Digest256::SIZE);
    for end in &leaf_public.chain_ends {
        bytes.extend_from_slice(&end.0);
    }
    sha256(&bytes)
}

#[derive(Clone, Debug)]
pub struct MssKeyPair {
    master_seed: Seed,
    height: u32,
    checksum_mode: bool,
    next_leaf: u64,
    root: Digest256,
    /// Cached leaf digests; rebuilt from the seed on load, never stored.
    leaves: Vec<Digest256>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MssSignature {
    pub leaf_index: u32,
    pub wots_sig: wots::WotsSignature,
    pub leaf_public: wots::WotsPublicKey,
    pub auth_path: MerkleAuthPath,
}

fn check_height(height: u32) -> Result<()> {
    if height == 0 || height > MAX_HEIGHT {
        return Err(Error::InvalidParams(format!(
            "tree height must be in 1..={MAX_HEIGHT}, got {height}"
        )));
    }
    Ok(())
}

fn build_leaves(master_seed: &Seed, height: u32, checksum_mode: bool) -> Vec<Digest256> {
    (0..1u64 << height)
        .map(|i| {
            let (leaf_public, _) = wots::keygen(&leaf_seed(master_seed, i as u32), checksum_mode);
            leaf_digest(&leaf_public)
        })
        .collect()
}

impl MssKeyPair {
    /// Costs 2^height one-time keygens.
    pub fn generate(master_seed: &Seed, height: u32, checksum_mode: bool) -> Result<Self> {
        check_height(height)?;
        let leaves = build_leaves(master_seed, height, checksum_mode);
        let root = merkle_root(&leaves).expect("leaf count is a power of two");
        Ok(MssKeyPair {
            master_seed: *master_seed,
            height,
            checksum_mode,
            next_leaf: 0,
            root,
            leaves,
        })
    }

    pub fn root(&self) -> Digest256 {
        self.root
    }

    pub fn height(&self) -> u32 {
        self.height
    }

    pub fn checksum_mode(&self) -> bool {
        self.checksum_mode
    }

    pub fn next_leaf(&self) -> u64 {
        self.next_leaf
    }

    pub fn capacity(&self) -> u64 {
        1u64 << self.height
    }

    pub fn remaining(&self) -> u64 {
        self.capacity() - self.next_leaf
    }

    /// Sign with the next unused leaf and advance the counter.
    pub fn sign(&mut self, message: &[u8]) -> Result<MssSignature> {
        if self.next_leaf >= self.capacity() {
            return Err(Error::KeyExhausted { consumed: self.next_leaf, max: self.capacity() });
        }
        let index = self.next_leaf as u32;
        let (leaf_public, leaf_secret) =
            wots::keygen(&leaf_seed(&self.master_seed, index), self.checksum_mode);
        let wots_sig = wots::sign(&leaf_secret, message);
        let auth_path = merkle_path(&self.leaves, index).expect("index below capacity");
        self.next_leaf += 1;
        Ok(MssSignature { leaf_index: index, wots_sig, leaf_public, auth_path })
    }

    /// Signing state for the key store: seed || height || mode || counter.
    pub fn state_to_bytes(&self) -> Vec<u8> {
        let mut out = Vec::with_capacity(STATE_BYTES);
        out.extend_from_slice(&self.master_seed.0);
        out.push(self.height as u8);
        out.push(u8::from(self.checksum_mode));
        out.extend_from_slice(&self.next_leaf.to_be_bytes());
        out
    }

    /// Rebuild a key pair (including the leaf cache and root) from stored
    /// state. Costs the same as key generation.
    pub fn from_state_bytes(bytes: &[u8]) -> Result<Self> {
        if bytes.len() != STATE_BYTES {
            return Err(Error::Malformed(format!(
                "mss signing state must be {STATE_BYTES} bytes, got {}",
                bytes.len()
            )));
        }
        let master_seed = Seed(bytes[..32].try_into().unwrap());
        let height = u32::from(bytes[32]);
        let checksum_mode = match bytes[33] {
            0 => false,
            1 => true,
            other => return Err(Error::Malformed(format!("unknown mss mode flag 0x{other:02x}"))),
        };
        check_height(height)
            .map_err(|_| Error::Malformed(format!("stored mss height {height} out of range")))?;
        let next_leaf = u64::from_be_bytes(bytes[34..42].try_into().unwrap());
        if next_leaf > 1u64 << height {
            return Err(Error::Malformed(format!(
                "stored leaf counter {next_leaf} exceeds 2^{height}"
            )));
        }
        let leaves = build_leaves(&master_seed, height, checksum_mode);
        let root = merkle_root(&leaves).expect("leaf count is a power of two");
        Ok(MssKeyPair { master_seed, height, checksum_mode, next_leaf, root, leaves })
    }
}

/// Verify both legs: the one-time signature under the carried leaf key,
/// and the leaf key's membership in the tree behind `root`.
pub fn verify(root: &Digest256, message: &[u8], sig: &MssSignature) -> bool {
    if sig.auth_path.leaf_index != sig.leaf_index {
        return false;
    }
    if !wots::verify(&sig.leaf_public, message, &sig.wots_sig) {
        return false;
    }
    verify_path(&leaf_digest(&sig.leaf_public), &sig.auth_path, root)
}

impl MssSignature {
    /// leaf index (4-byte BE) || signature elements || leaf chain ends ||
    /// path siblings. The leaf mode travels out of band.
    pub fn to_bytes(&self) -> Vec<u8> {
        let mut out = Vec::new();
        out.extend_from_slice(&self.leaf_index.to_be_bytes());
        out.extend_from_slice(&self.wots_sig.to_bytes());
        for end in &self.leaf_public.chain_ends {
            out.extend_from_slice(&end.0);
        }
        for sibling in &self.auth_path.siblings {
            out.extend_from_slice(&sibling.0);
        }
        out
    }

    pub fn serialized_len(height: u32, checksum_mode: bool) -> usize {
        4 + 2 * wots::signature_bytes(checksum_mode) + height as usize * Digest256::SIZE
    }

    pub fn from_bytes(bytes: &[u8], checksum_mode: bool) -> Result<Self> {
        let chains = wots::chain_count(checksum_mode);
        if bytes.len() < 4 || !(bytes.len() - 4).is_multiple_of(Digest256::SIZE) {
            return Err(Error::Malformed("mss signature framing".into()));
        }
        let units = (bytes.len() - 4) / Digest256::SIZE;
        let height = units
            .checked_sub(2 * chains)
            .ok_or_else(|| Error::Malformed("mss signature too short".into()))?;
        if height == 0 || height > MAX_HEIGHT as usize {
            return Err(Error::Malformed(format!(
                "mss signature implies height {height}, outside 1..={MAX_HEIGHT}"
            )));
        }
        let leaf_index = u32::from_be_bytes(bytes[..4].try_into().unwrap());
        if u64::from(leaf_index) >= 1u64 << height {
            return Err(Error::Malformed(format!(
                "leaf index {leaf_index} outside a height-{height} tree"
            )));
        }
        let mut chunks = bytes[4..].chunks_exact(Digest256::SIZE);
        let mut take = |n: usize| -> Vec<Digest256> {
            (0..n).map(|_| Digest256(chunks.next().unwrap().try_into().unwrap())).collect()
        };
        let wots_sig = wots::WotsSignature { elements: take(chains), checksum_mode };
        let leaf_public = wots::WotsPublicKey { chain_ends: take(chains), checksum_mode };
        let siblings = take(height);
        Ok(MssSignature {
            leaf_index,
            wots_sig,
            leaf_public,
            auth_path: MerkleAuthPath { leaf_index, siblings },
        })
    }
}
