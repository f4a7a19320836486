//! Commit-challenge-response identification over integer matrices mod q,
//! and its Fiat-Shamir conversion to a signature.
//!
//! The prover's secret is a short vector x; the public key is
//! u = A·x + e1 for a public matrix A and short error e1. A round runs:
//! commit v = A·y + e2 with fresh short y, e2; receive a scalar
//! challenge c; respond z = c·x + y. The verifier accepts when the
//! residual r = A·z − c·u − v is small in centered infinity norm;
//! honestly r = −(c·e1 + e2), so every coordinate is bounded by
//! B = c_max·eta + eta. With the errors forced to zero the check
//! collapses to exact equality A·z = c·u + v. Making c a hash of
//! (v, message) removes the interaction and yields the signature.
//!
//! There is no rejection sampling on z here. With y as short as eta,
//! z = c·x + y pins each x_i to round(z_i / c): a single signature with
//! c >= 3 recovers the secret outright (shown in
//! `tests::educational_z_leaks_secret`). Real lattice signatures sample
//! y from a far wider range and resample z; this module keeps the bare
//! protocol honest and observable instead.

use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
use crate::hash::{prg_expand, PrgStream, Seed};

const TAG_A_SEED: u8 = 0x41;
const TAG_A_EXPAND: u8 = 0x4D;
const TAG_X: u8 = 0x58;
const TAG_E1: u8 = 0x45;
const TAG_Y: u8 = 0x59;
const TAG_E2: u8 = 0x46;
const TAG_CHALLENGE: u8 = 0x43;
const TAG_COMMIT_NONCE: u8 = 0x4E;

/// Dimensions and bounds for the protocol.
///
/// q must be prime and below 2^16 (entries serialize as 2-byte
/// big-endian); the residual bound B = c_max·eta + eta must stay under
/// q/4 so "small" is meaningful mod q.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct LatticeParams {
    pub q: u32,
    /// Secret dimension (columns of A, length of x, y, z).
    pub n: usize,
    /// Public dimension (rows of A, length of e1, e2, u, v).
    pub m: usize,
    /// Max magnitude of secret/error coordinates.
    pub eta: u32,
    /// Challenges are uniform in [0, c_max).
    pub c_max: u32,
}

impl LatticeParams {
    pub const DEFAULT: LatticeParams = LatticeParams { q: 3329, n: 16, m: 24, eta: 1, c_max: 256 };

    /// Worst-case centered magnitude of an honest residual coordinate.
    pub fn residual_bound(&self) -> u32 {
        self.c_max * self.eta + self.eta
    }

    pub fn validate(&self) -> Result<()> {
        if self.q < 3 || self.q >= 1 << 16 || !is_small_prime(self.q) {
            return Err(Error::InvalidParams(format!(
                "q must be a prime below 2^16, got {}",
                self.q
            )));
        }
        if self.n == 0 || self.m == 0 {
            return Err(Error::InvalidParams("dimensions must be positive".into()));
        }
        if self.eta == 0 || 2 * self.eta + 1 > 255 {
            return Err(Error::InvalidParams(format!("eta must be in 1..=127, got {}", self.eta)));
        }
        if self.c_max == 0 {
            return Err(Error::InvalidParams("c_max must be positive".into()));
        }
        if u64::from(self.residual_bound()) * 4 >= u64::from(self.q) {
            return Err(Error::InvalidParams(format!(
                "residual bound {} must stay under q/4 = {}",
                self.residual_bound(),
                self.q / 4
            )));
        }
        Ok(())
    }
}

impl Default for LatticeParams {
    fn default() -> Self {
        Self::DEFAULT
    }
}

fn is_small_prime(n: u32) -> bool {
    if n < 2 {
        return false;
    }
    let mut d = 2u32;
    while d * d <= n {
        if n.is_multiple_of(d) {
            return false;
        }
        d += 1;
    }
    true
}

/// Vector over Z_q; entries are kept reduced to [0, q).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ModVec {
    q: u32,
    entries: Vec<u32>,
}

impl ModVec {
    pub fn zero(q: u32, len: usize) -> Self {
        ModVec { q, entries: vec![0; len] }
    }

    /// Entries are reduced mod q on the way in.
    pub fn from_entries(q: u32, entries: Vec<u32>) -> Self {
        let entries = entries.into_iter().map(|v| v % q).collect();
        ModVec { q, entries }
    }

    pub fn modulus(&self) -> u32 {
        self.q
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn entries(&self) -> &[u32] {
        &self.entries
    }

    /// Entry i mapped to the centered range [−(q−1)/2, (q−1)/2].
    pub fn centered(&self, i: usize) -> i64 {
        let v = i64::from(self.entries[i]);
        let q = i64::from(self.q);
        if v > q / 2 {
            v - q
        } else {
            v
        }
    }

    pub fn max_centered_abs(&self) -> i64 {
        (0..self.len()).map(|i| self.centered(i).abs()).max().unwrap_or(0)
    }

    fn check_compatible(&self, rhs: &ModVec) -> Result<()> {
        if self.q != rhs.q || self.len() != rhs.len() {
            return Err(Error::InvalidInput(format!(
                "vector shape mismatch: {} entries mod {} vs {} entries mod {}",
                self.len(),
                self.q,
                rhs.len(),
                rhs.q
            )));
        }
        Ok(())
    }

    pub fn add(&self, rhs: &ModVec) -> Result<ModVec> {
        self.check_compatible(rhs)?;
        let entries =
            self.entries.iter().zip(&rhs.entries).map(|(&a, &b)| (a + b) % self.q).collect();
        Ok(ModVec { q: self.q, entries })
    }

    pub fn sub(&self, rhs: &ModVec) -> Result<ModVec> {
        self.check_compatible(rhs)?;
        let entries = self
            .entries
            .iter()
            .zip(&rhs.entries)
            .map(|(&a, &b)| (a + self.q - b) % self.q)
            .collect();
        Ok(ModVec { q: self.q, entries })
    }

    /// Entrywise c·self mod q.
    pub fn scale(&self, c: u32) -> ModVec {
        let q = u64::from(self.q);
        let c = u64::from(c) % q;
        let entries = self.entries.iter().map(|&a| ((u64::from(a) * c) % q) as u32).collect();
        ModVec { q: self.q, entries }
    }

    /// Entries as 2-byte big-endian values in order.
    pub fn to_bytes(&self) -> Vec<u8> {
        let mut out = Vec::with_capacity(2 * self.len());
        for &v in &self.entries {
            out.extend_from_slice(&(v as u16).to_be_bytes());
        }
        out
    }

    /// Strict parse: every entry must already be canonical (< q).
    pub fn from_bytes(q: u32, bytes: &[u8]) -> Result<ModVec> {
        if !bytes.len().is_multiple_of(2) {
            return Err(Error::Malformed("mod-q vector needs 2 bytes per entry".into()));
        }
        let mut entries = Vec::with_capacity(bytes.len() / 2);
        for pair in bytes.chunks_exact(2) {
            let v = u32::from(u16::from_be_bytes([pair[0], pair[1]]));
            if v >= q {
                return Err(Error::Malformed(format!("entry {v} not reduced mod {q}")));
            }
            entries.push(v);
        }
        Ok(ModVec { q, entries })
    }
}

/// Row-major matrix over Z_q.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ModMatrix {
    q: u32,
    rows: usize,
    cols: usize,
    entries: Vec<u32>,
}

impl ModMatrix {
    pub fn from_entries(q: u32, rows: usize, cols: usize, entries: Vec<u32>) -> Result<Self> {
        if entries.len() != rows * cols {
            return Err(Error::InvalidInput(format!(
                "{rows}x{cols} matrix needs {} entries, got {}",
                rows * cols,
                entries.len()
            )));
        }
        let entries = entries.into_iter().map(|v| v % q).collect();
        Ok(ModMatrix { q, rows, cols, entries })
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn entry(&self, row: usize, col: usize) -> u32 {
        self.entries[row * self.cols + col]
    }

    pub fn mul_vec(&self, v: &ModVec) -> Result<ModVec> {
        if v.q != self.q || v.len() != self.cols {
            return Err(Error::InvalidInput(format!(
                "cannot multiply {}x{} matrix mod {} by {}-vector mod {}",
                self.rows,
                self.cols,
                self.q,
                v.len(),
                v.q
            )));
        }
        let q = u64::from(self.q);
        let entries = (0..self.rows)
            .map(|r| {
                let mut acc = 0u64;
                for c in 0..self.cols {
                    acc += u64::from(self.entry(r, c)) * u64::from(v.entries[c]);
                    // Keep the accumulator comfortably inside u64.
                    if acc >= 1 << 60 {
                        acc %= q;
                    }
                }
                (acc % q) as u32
            })
            .collect();
        Ok(ModVec { q: self.q, entries })
    }
}

#[derive(Clone, Debug)]
pub struct LatticeKeyPair {
    /// Seed the public matrix expands from; published with u.
    pub a_seed: Seed,
    pub a: ModMatrix,
    /// Short secret.
    pub x: ModVec,
    /// Short error folded into the public key.
    pub e1: ModVec,
    /// u = A·x + e1.
    pub u: ModVec,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LatticeSignature {
    pub c: u32,
    pub z: ModVec,
    pub v: ModVec,
}

fn sample_uniform(q: u32, stream: &mut PrgStream) -> u32 {
    // Rejection-sample 16-bit chunks onto a multiple of q for uniformity.
    let limit = 1u32 << 16;
    let bound = limit - limit % q;
    loop {
        let v = u32::from(stream.next_u16());
        if v < bound {
            return v % q;
        }
    }
}

fn sample_short(q: u32, eta: u32, stream: &mut PrgStream) -> u32 {
    let span = 2 * eta + 1; // values in [−eta, eta]
    let bound = 256 - 256 % span;
    loop {
        let b = u32::from(stream.next_byte());
        if b < bound {
            let centered = i64::from(b % span) - i64::from(eta);
            return centered.rem_euclid(i64::from(q)) as u32;
        }
    }
}

/// The public matrix, expanded row-major from its published seed.
pub fn expand_matrix(params: &LatticeParams, a_seed: &Seed) -> ModMatrix {
    let mut stream = PrgStream::new(a_seed, TAG_A_EXPAND);
    let entries = (0..params.m * params.n).map(|_| sample_uniform(params.q, &mut stream)).collect();
    ModMatrix { q: params.q, rows: params.m, cols: params.n, entries }
}

fn sample_short_vec(params: &LatticeParams, seed: &Seed, tag: u8, len: usize) -> ModVec {
    let mut stream = PrgStream::new(seed, tag);
    let entries = (0..len).map(|_| sample_short(params.q, params.eta, &mut stream)).collect();
    ModVec { q: params.q, entries }
}

/// u = A·x + e1. Split out so tests can force x or e1 (e.g. to zero).
pub fn derive_public(a: &ModMatrix, x: &ModVec, e1: &ModVec) -> Result<ModVec> {
    a.mul_vec(x)?.add(e1)
}

/// v = A·y + e2; the commit half of a round, also split out for tests.
pub fn derive_commitment(a: &ModMatrix, y: &ModVec, e2: &ModVec) -> Result<ModVec> {
    a.mul_vec(y)?.add(e2)
}

/// Deterministic key generation. The matrix seed is a one-way
/// derivation from `seed`, so publishing it reveals nothing about x.
pub fn keygen(params: &LatticeParams, seed: &Seed) -> Result<LatticeKeyPair> {
    params.validate()?;
    let a_seed = Seed(prg_expand(seed, TAG_A_SEED, 0).0);
    let a = expand_matrix(params, &a_seed);
    let x = sample_short_vec(params, seed, TAG_X, params.n);
    let e1 = sample_short_vec(params, seed, TAG_E1, params.m);
    let u = derive_public(&a, &x, &e1)?;
    Ok(LatticeKeyPair { a_seed, a, x, e1, u })
}

/// Fresh short y, e2 from (seed, nonce) and the commitment v = A·y + e2.
pub fn commit(
    params: &LatticeParams,
    a: &ModMatrix,
    seed: &Seed,
    nonce: u32,
) -> Result<(ModVec, ModVec, ModVec)> {
    let round_seed = Seed(prg_expand(seed, TAG_COMMIT_NONCE, nonce).0);
    let y = sample_short_vec(params, &round_seed, TAG_Y, params.n);
    let e2 = sample_short_vec(params, &round_seed, TAG_E2, params.m);
    let v = derive_commitment(a, &y, &e2)?;
    Ok((y, e2, v))
}

/// Interactive verifier's challenge: uniform in [0, c_max), derived
/// from the verifier's randomness.
pub fn challenge(params: &LatticeParams, rng_seed: &Seed) -> u32 {
    let block = prg_expand(rng_seed, TAG_CHALLENGE, 0);
    u32::from_be_bytes(block.0[..4].try_into().unwrap()) % params.c_max
}

/// z = c·x + y, entrywise mod q.
pub fn respond(x: &ModVec, y: &ModVec, c: u32) -> Result<ModVec> {
    x.scale(c).add(y)
}

/// Accept iff every centered coordinate of r = A·z − c·u − v has
/// magnitude at most B = c_max·eta + eta.
pub fn check(
    params: &LatticeParams,
    a: &ModMatrix,
    u: &ModVec,
    v: &ModVec,
    z: &ModVec,
    c: u32,
) -> Result<bool> {
    let r = residual(a, u, v, z, c)?;
    Ok(r.max_centered_abs() <= i64::from(params.residual_bound()))
}

/// r = A·z − c·u − v; exposed so tests can compare it against a direct
/// recomputation of −(c·e1 + e2).
pub fn residual(a: &ModMatrix, u: &ModVec, v: &ModVec, z: &ModVec, c: u32) -> Result<ModVec> {
    a.mul_vec(z)?.sub(&u.scale(c))?.sub(v)
}

/// The non-interactive challenge: first four bytes of
/// sha256(v-bytes || message), big-endian, reduced to [0, c_max).
pub fn fs_challenge(params: &LatticeParams, v: &ModVec, message: &[u8]) -> u32 {
    let mut h = Sha256::new();
    h.update(v.to_bytes());
    h.update(message);
    let digest: [u8; 32] = h.finalize().into();
    u32::from_be_bytes(digest[..4].try_into().unwrap()) % params.c_max
}

/// One commit round with the challenge replaced by the hash of
/// (commitment, message).
pub fn fs_sign(
    params: &LatticeParams,
    keypair: &LatticeKeyPair,
    message: &[u8],
    nonce_seed: &Seed,
) -> Result<LatticeSignature> {
    let (y, _e2, v) = commit(params, &keypair.a, nonce_seed, 0)?;
    let c = fs_challenge(params, &v, message);
    let z = respond(&keypair.x, &y, c)?;
    Ok(LatticeSignature { c, z, v })
}

/// Recompute the challenge from (v, message) and run the residual
/// check. Any inconsistency, including shape mismatches, is a plain
/// rejection.
pub fn fs_verify(
    params: &LatticeParams,
    a: &ModMatrix,
    u: &ModVec,
    message: &[u8],
    sig: &LatticeSignature,
) -> bool {
    if sig.c != fs_challenge(params, &sig.v, message) {
        return false;
    }
    check(params, a, u, &sig.v, &sig.z, sig.c).unwrap_or(false)
}

impl LatticeKeyPair {
    /// Public-key bytes: matrix seed (32) || u entries (2 bytes each).
    pub fn public_key_bytes(&self) -> Vec<u8> {
        let mut out = Vec::with_capacity(32 + 2 * self.u.len());
        out.extend_from_slice(&self.a_seed.0);
        out.extend_from_slice(&self.u.to_bytes());
        out
    }
}

/// Parse public-key bytes back into the verifier's (A, u).
pub fn parse_public_key(params: &LatticeParams, bytes: &[u8]) -> Result<(ModMatrix, ModVec)> {
    let expected = 32 + 2 * params.m;
    if bytes.len() != expected {
        return Err(Error::Malformed(format!(
            "lattice public key must be {expected} bytes, got {}",
            bytes.len()
        )));
    }
    let a_seed = Seed(bytes[..32].try_into().unwrap());
    let u = ModVec::from_bytes(params.q, &bytes[32..])?;
    Ok((expand_matrix(params, &a_seed), u))
}

impl LatticeSignature {
    /// c (4-byte BE) || z entries || v entries, all 2-byte big-endian.
    pub fn to_bytes(&self) -> Vec<u8> {
        let mut out = Vec::with_capacity(4 + 2 * (self.z.len() + self.v.len()));
        out.extend_from_slice(&self.c.to_be_bytes());
        out.extend_from_slice(&self.z.to_bytes());
        out.extend_from_slice(&self.v.to_bytes());
        out
    }

    pub fn serialized_len(params: &LatticeParams) -> usize {
        4 + 2 * (params.n + params.m)
    }

    pub fn from_bytes(params: &LatticeParams, bytes: &[u8]) -> Result<Self> {
        if bytes.len() != Self::serialized_len(params) {
            return Err(Error::Malformed(format!(
                "lattice signature must be {} bytes, got {}",
                Self::serialized_len(params),
                bytes.len()
            )));
        }
        let c = u32::from_be_bytes(bytes[..4].try_into().unwrap());
        if c >= params.c_max {
            return Err(Error::Malformed(format!("challenge {c} outside [0, {})", params.c_max)));
        }
        let z_end = 4 + 2 * params.n;
        let z = ModVec::from_bytes(params.q, &bytes[4..z_end])?;
        let v = ModVec::from_bytes(params.q, &bytes[z_end..])?;
        Ok(LatticeSignature { c, z, v })
    }
}
