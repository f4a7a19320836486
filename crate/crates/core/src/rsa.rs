//! Textbook RSA signatures over arbitrary-precision integers.
//!
//! Keys come from two random primes: N = p·q, phi = (p−1)(q−1),
//! e·d ≡ 1 (mod phi). Signing raises the message hash (as a big-endian
//! integer reduced mod N) to the private exponent; verification raises
//! the signature to the public one and compares. [`fermat_check`]
//! exposes the a^(p−1) ≡ 1 property the whole trapdoor rests on.
//!
//! This is deliberately raw RSA, no padding and no constant-time
//! arithmetic, kept as the trapdoor baseline the other schemes in this
//! workbench are contrasted against. Do not sign anything that matters
//! with it.

use std::sync::OnceLock;

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::hash::{sha256, PrgStream, Seed};

pub const MIN_BITS: u64 = 32;
pub const MAX_BITS: u64 = 4096;
pub const MILLER_RABIN_ROUNDS: u32 = 40;

const TAG_PRIME_CANDIDATE: u8 = 0x50;
const TAG_MR_BASE: u8 = 0x42;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RsaKeyPair {
    pub p: BigUint,
    pub q: BigUint,
    pub n: BigUint,
    pub phi: BigUint,
    pub e: BigUint,
    pub d: BigUint,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RsaSignature {
    pub s: BigUint,
}

fn small_primes() -> &'static [u32] {
    static PRIMES: OnceLock<Vec<u32>> = OnceLock::new();
    PRIMES.get_or_init(|| {
        let mut sieve = vec![true; 1000];
        let mut primes = Vec::new();
        for n in 2..1000usize {
            if sieve[n] {
                primes.push(n as u32);
                for multiple in (n * n..1000).step_by(n) {
                    sieve[multiple] = false;
                }
            }
        }
        primes
    })
}

/// Miller-Rabin with `rounds` bases drawn from `base_stream`, after a
/// small-prime trial division pass.
pub fn is_probable_prime(n: &BigUint, rounds: u32, base_stream: &mut PrgStream) -> bool {
    let two = BigUint::from(2u32);
    if *n < two {
        return false;
    }
    for &p in small_primes() {
        let p = BigUint::from(p);
        if *n == p {
            return true;
        }
        if (n % &p).is_zero() {
            return false;
        }
    }
    // n is odd and > 3 here; write n − 1 = 2^s · d.
    let n_minus_1 = n - 1u32;
    let s = n_minus_1.trailing_zeros().expect("n - 1 > 0");
    let d = &n_minus_1 >> s;

    let byte_len = (n.bits() as usize).div_ceil(8) + 1;
    let mut buf = vec![0u8; byte_len];
    for _ in 0..rounds {
        base_stream.fill(&mut buf);
        // Base uniform-ish in [2, n − 2].
        let a = BigUint::from_bytes_be(&buf) % (n - 3u32) + 2u32;
        let mut x = a.modpow(&d, n);
        if x.is_one() || x == n_minus_1 {
            continue;
        }
        let mut witness = true;
        for _ in 1..s {
            x = x.modpow(&two, n);
            if x == n_minus_1 {
                witness = false;
                break;
            }
        }
        if witness {
            return false;
        }
    }
    true
}

/// Random prime of exactly `bits` bits (top two bits set, odd).
fn generate_prime(bits: u64, candidates: &mut PrgStream, bases: &mut PrgStream) -> BigUint {
    assert!(bits >= 8, "prime size below desk scale");
    let byte_len = (bits as usize).div_ceil(8);
    let mut buf = vec![0u8; byte_len];
    loop {
        candidates.fill(&mut buf);
        let mut candidate = BigUint::from_bytes_be(&buf);
        // Trim to `bits` bits, then pin the top two and the low bit.
        candidate &= (BigUint::one() << bits) - 1u32;
        candidate |= BigUint::one() << (bits - 1);
        candidate |= BigUint::one() << (bits - 2);
        candidate |= BigUint::one();
        if is_probable_prime(&candidate, MILLER_RABIN_ROUNDS, bases) {
            return candidate;
        }
    }
}

/// Public exponent policy: 65537, falling back to 17; `None` means
/// neither is coprime to phi and the caller should redraw primes.
pub fn select_exponent(phi: &BigUint) -> Option<BigUint> {
    for e in [65537u32, 17] {
        let e = BigUint::from(e);
        if e.gcd(phi).is_one() {
            return Some(e);
        }
    }
    None
}

/// e^(−1) mod phi by the extended Euclidean algorithm.
pub fn mod_inverse(e: &BigUint, phi: &BigUint) -> Option<BigUint> {
    let e = BigInt::from(e.clone());
    let phi = BigInt::from(phi.clone());
    let ext = e.extended_gcd(&phi);
    if !ext.gcd.is_one() {
        return None;
    }
    let d = ext.x.mod_floor(&phi);
    d.to_biguint()
}

pub fn keygen(bits: u64, seed: &Seed) -> Result<RsaKeyPair> {
    if !(MIN_BITS..=MAX_BITS).contains(&bits) || !bits.is_multiple_of(2) {
        return Err(Error::InvalidParams(format!(
            "modulus size must be an even bit count in {MIN_BITS}..={MAX_BITS}, got {bits}"
        )));
    }
    let half = bits / 2;
    let mut candidates = PrgStream::new(seed, TAG_PRIME_CANDIDATE);
    let mut bases = PrgStream::new(seed, TAG_MR_BASE);
    loop {
        let p = generate_prime(half, &mut candidates, &mut bases);
        let q = loop {
            let q = generate_prime(half, &mut candidates, &mut bases);
            if q != p {
                break q;
            }
        };
        let phi = (&p - 1u32) * (&q - 1u32);
        if let Some(e) = select_exponent(&phi) {
            let d = mod_inverse(&e, &phi).expect("gcd(e, phi) = 1");
            let n = &p * &q;
            return Ok(RsaKeyPair { p, q, n, phi, e, d });
        }
        // Neither exponent coprime to phi; draw a fresh prime pair.
    }
}

/// Build a key pair from explicit primes and exponent. Intended for
/// known-answer tests and toy parameters.
pub fn from_primes(p: &BigUint, q: &BigUint, e: &BigUint) -> Result<RsaKeyPair> {
    if p == q {
        return Err(Error::InvalidParams("primes must differ".into()));
    }
    let mut bases = PrgStream::new(&Seed([0u8; 32]), TAG_MR_BASE);
    for prime in [p, q] {
        if !is_probable_prime(prime, MILLER_RABIN_ROUNDS, &mut bases) {
            return Err(Error::InvalidParams(format!("{prime} is not prime")));
        }
    }
    let phi = (p - 1u32) * (q - 1u32);
    if !e.gcd(&phi).is_one() {
        return Err(Error::InvalidParams("e is not coprime to phi".into()));
    }
    let d = mod_inverse(e, &phi).expect("gcd(e, phi) = 1");
    Ok(RsaKeyPair { p: p.clone(), q: q.clone(), n: p * q, phi, e: e.clone(), d })
}

/// sha256(message) as a big-endian integer reduced mod N.
pub fn hash_to_int(message: &[u8], n: &BigUint) -> BigUint {
    BigUint::from_bytes_be(&sha256(message).0) % n
}

/// S = H^d mod N.
pub fn sign_with(n: &BigUint, d: &BigUint, message: &[u8]) -> RsaSignature {
    let h = hash_to_int(message, n);
    RsaSignature { s: h.modpow(d, n) }
}

/// True iff S^e mod N equals the message hash mod N.
pub fn verify(e: &BigUint, n: &BigUint, message: &[u8], sig: &RsaSignature) -> bool {
    if sig.s >= *n {
        return false;
    }
    sig.s.modpow(e, n) == hash_to_int(message, n)
}

impl RsaKeyPair {
    pub fn sign(&self, message: &[u8]) -> RsaSignature {
        sign_with(&self.n, &self.d, message)
    }

    pub fn verify(&self, message: &[u8], sig: &RsaSignature) -> bool {
        verify(&self.e, &self.n, message, sig)
    }

    /// Labeled decimal text, the key-file format: `N=..`, `e=..`.
    pub fn public_key_text(&self) -> String {
        format!("N={}\ne={}\n", self.n, self.e)
    }

    /// Labeled decimal text with the private exponent included.
    pub fn secret_key_text(&self) -> String {
        format!("N={}\ne={}\nd={}\n", self.n, self.e, self.d)
    }
}

fn parse_labeled(text: &str, label: &str) -> Result<BigUint> {
    for line in text.lines() {
        if let Some(value) = line.strip_prefix(label).and_then(|v| v.strip_prefix('=')) {
            return value
                .trim()
                .parse()
                .map_err(|_| Error::Malformed(format!("bad decimal value for {label}")));
        }
    }
    Err(Error::Malformed(format!("missing field {label}")))
}

/// Parse `N=..` / `e=..` public-key text.
pub fn parse_public_text(text: &str) -> Result<(BigUint, BigUint)> {
    Ok((parse_labeled(text, "e")?, parse_labeled(text, "N")?))
}

/// Parse `N=..` / `e=..` / `d=..` secret-key text.
pub fn parse_secret_text(text: &str) -> Result<(BigUint, BigUint, BigUint)> {
    Ok((parse_labeled(text, "N")?, parse_labeled(text, "e")?, parse_labeled(text, "d")?))
}

impl RsaSignature {
    pub fn to_text(&self) -> String {
        format!("{}\n", self.s)
    }

    /// Strict framing: decimal digits and a mandatory trailing newline,
    /// so a truncated signature file reads as malformed rather than as a
    /// different (failing) signature.
    pub fn from_text(text: &str) -> Result<Self> {
        let body = text
            .strip_suffix('\n')
            .ok_or_else(|| Error::Malformed("rsa signature missing trailing newline".into()))?;
        if body.is_empty() || !body.bytes().all(|b| b.is_ascii_digit()) {
            return Err(Error::Malformed("bad decimal signature".into()));
        }
        Ok(RsaSignature { s: body.parse().expect("checked digits") })
    }
}

/// a^(p−1) mod p == 1: holds for every 1 <= a < p when p is prime, and
/// is the identity that makes d undo e. Exposed for the property tests.
pub fn fermat_check(a: &BigUint, p: &BigUint) -> bool {
    if a.is_zero() || *a >= *p {
        return false;
    }
    a.modpow(&(p - 1u32), p).is_one()
}
