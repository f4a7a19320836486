//! One contract over every scheme: keygen / sign / verify on opaque
//! byte blobs, plus the usage accounting that makes one-time keys
//! impossible to reuse through this layer.
//!
//! Signature blobs are self-describing: a 1-byte scheme tag prefixes
//! the scheme's own payload. Re-signing with a consumed one-time key is
//! an error, not a warning; silent reuse is the catastrophic failure
//! mode of one-time signatures, so the library refuses by construction.

use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::hash::{sha256, Seed};
use crate::{lamport, lattice, mss, rsa, wots};

/// CLI default tree height; 2^8 signatures per key.
pub const DEFAULT_MERKLE_HEIGHT: u32 = 8;
/// CLI default RSA modulus size.
pub const DEFAULT_RSA_BITS: u64 = 512;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum SchemeId {
    Rsa,
    Lamport,
    Wots,
    WotsChecksum,
    Merkle,
    LatticeFs,
}

impl SchemeId {
    pub const ALL: [SchemeId; 6] = [
        SchemeId::Rsa,
        SchemeId::Lamport,
        SchemeId::Wots,
        SchemeId::WotsChecksum,
        SchemeId::Merkle,
        SchemeId::LatticeFs,
    ];

    /// Canonical lowercase token, used on the CLI and in key files.
    pub fn token(&self) -> &'static str {
        match self {
            SchemeId::Rsa => "rsa",
            SchemeId::Lamport => "lamport",
            SchemeId::Wots => "wots",
            SchemeId::WotsChecksum => "wots-checksum",
            SchemeId::Merkle => "merkle",
            SchemeId::LatticeFs => "lattice-fs",
        }
    }

    /// Tag byte prefixing signature blobs and key-store files.
    pub fn tag(&self) -> u8 {
        match self {
            SchemeId::Rsa => 0x01,
            SchemeId::Lamport => 0x02,
            SchemeId::Wots => 0x03,
            SchemeId::WotsChecksum => 0x04,
            SchemeId::Merkle => 0x05,
            SchemeId::LatticeFs => 0x06,
        }
    }

    pub fn from_tag(tag: u8) -> Option<SchemeId> {
        SchemeId::ALL.into_iter().find(|s| s.tag() == tag)
    }
}

impl fmt::Display for SchemeId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.token())
    }
}

impl FromStr for SchemeId {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        SchemeId::ALL
            .into_iter()
            .find(|scheme| scheme.token() == s)
            .ok_or_else(|| Error::InvalidParams(format!("unknown scheme {s:?}")))
    }
}

/// Scheme-specific knobs; irrelevant fields are ignored by schemes that
/// do not use them.
#[derive(Clone, Copy, Debug, Default)]
pub struct KeygenParams {
    /// Merkle tree height (default 8).
    pub height: Option<u32>,
    /// RSA modulus bits (default 512).
    pub bits: Option<u64>,
    /// Merkle leaf hardening: checksum-mode one-time leaves.
    pub checksum: bool,
}

/// A key with its usage state: the scheme, both serialized key halves,
/// and how many one-time uses have been consumed out of how many exist.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct KeyRecord {
    pub scheme: SchemeId,
    pub public_blob: Vec<u8>,
    pub secret_blob: Vec<u8>,
    pub uses_consumed: u64,
    /// `None` for many-time schemes.
    pub uses_max: Option<u64>,
}

impl KeyRecord {
    pub fn remaining_uses(&self) -> Option<u64> {
        self.uses_max.map(|max| max - self.uses_consumed)
    }
}

pub fn keygen(scheme: SchemeId, params: &KeygenParams, seed: &Seed) -> Result<KeyRecord> {
    match scheme {
        SchemeId::Rsa => {
            let bits = params.bits.unwrap_or(DEFAULT_RSA_BITS);
            let key = rsa::keygen(bits, seed)?;
            Ok(KeyRecord {
                scheme,
                public_blob: key.public_key_text().into_bytes(),
                secret_blob: key.secret_key_text().into_bytes(),
                uses_consumed: 0,
                uses_max: None,
            })
        }
        SchemeId::Lamport => {
            let (pk, sk) = lamport::keygen(seed);
            Ok(KeyRecord {
                scheme,
                public_blob: pk.to_bytes(),
                secret_blob: sk.to_bytes(),
                uses_consumed: 0,
                uses_max: Some(1),
            })
        }
        SchemeId::Wots | SchemeId::WotsChecksum => {
            let (pk, sk) = wots::keygen(seed, scheme == SchemeId::WotsChecksum);
            Ok(KeyRecord {
                scheme,
                public_blob: pk.to_bytes(),
                secret_blob: sk.to_bytes(),
                uses_consumed: 0,
                uses_max: Some(1),
            })
        }
        SchemeId::Merkle => {
            let height = params.height.unwrap_or(DEFAULT_MERKLE_HEIGHT);
            let keypair = mss::MssKeyPair::generate(seed, height, params.checksum)?;
            Ok(KeyRecord {
                scheme,
                public_blob: keypair.root().as_bytes().to_vec(),
                secret_blob: keypair.state_to_bytes(),
                uses_consumed: 0,
                uses_max: Some(keypair.capacity()),
            })
        }
        SchemeId::LatticeFs => {
            let lattice_params = lattice::LatticeParams::default();
            let keypair = lattice::keygen(&lattice_params, seed)?;
            Ok(KeyRecord {
                scheme,
                public_blob: keypair.public_key_bytes(),
                secret_blob: seed.0.to_vec(),
                uses_consumed: 0,
                uses_max: None,
            })
        }
    }
}

fn tagged(scheme: SchemeId, payload: Vec<u8>) -> Vec<u8> {
    let mut blob = Vec::with_capacity(1 + payload.len());
    blob.push(scheme.tag());
    blob.extend_from_slice(&payload);
    blob
}

/// Sign and consume one use. The record is updated in place (usage
/// counter, and for the stateful Merkle scheme the advanced leaf
/// counter); callers persist it before releasing the signature.
pub fn sign(record: &mut KeyRecord, message: &[u8]) -> Result<Vec<u8>> {
    if let Some(max) = record.uses_max {
        if record.uses_consumed >= max {
            return Err(Error::KeyExhausted { consumed: record.uses_consumed, max });
        }
    }
    let payload = match record.scheme {
        SchemeId::Rsa => {
            let text = std::str::from_utf8(&record.secret_blob)
                .map_err(|_| Error::Malformed("rsa secret key is not text".into()))?;
            let (n, _e, d) = rsa::parse_secret_text(text)?;
            rsa::sign_with(&n, &d, message).to_text().into_bytes()
        }
        SchemeId::Lamport => {
            let sk = lamport::LamportSecretKey::from_bytes(&record.secret_blob)?;
            lamport::sign(&sk, message).to_bytes()
        }
        SchemeId::Wots | SchemeId::WotsChecksum => {
            let sk = wots::WotsSecretKey::from_bytes(&record.secret_blob)?;
            let expect_checksum = record.scheme == SchemeId::WotsChecksum;
            if sk.checksum_mode != expect_checksum {
                return Err(Error::Malformed(
                    "wots key mode flag disagrees with the scheme tag".into(),
                ));
            }
            wots::sign(&sk, message).to_bytes()
        }
        SchemeId::Merkle => {
            let mut keypair = mss::MssKeyPair::from_state_bytes(&record.secret_blob)?;
            let sig = keypair.sign(message)?;
            record.secret_blob = keypair.state_to_bytes();
            // Leaf-mode flag travels with the signature: the 32-byte root
            // alone cannot tell the verifier how to parse the leaf key.
            let mut payload = vec![u8::from(keypair.checksum_mode())];
            payload.extend_from_slice(&sig.to_bytes());
            payload
        }
        SchemeId::LatticeFs => {
            let seed = Seed::from_slice(&record.secret_blob).map_err(|_| {
                Error::Malformed("lattice secret key must be a 32-byte seed".into())
            })?;
            let params = lattice::LatticeParams::default();
            let keypair = lattice::keygen(&params, &seed)?;
            // Deterministic nonce: fresh per message, repeatable per key.
            let mut material = Vec::with_capacity(64 + message.len());
            material.extend_from_slice(&seed.0);
            material.extend_from_slice(message);
            let nonce_seed = Seed(sha256(&material).0);
            lattice::fs_sign(&params, &keypair, message, &nonce_seed)?.to_bytes()
        }
    };
    record.uses_consumed += 1;
    Ok(tagged(record.scheme, payload))
}

/// Verify a tagged signature blob. Framing problems (wrong tag, bad
/// lengths) are errors, distinct from a clean `false`.
pub fn verify(
    scheme: SchemeId,
    public_blob: &[u8],
    message: &[u8],
    sig_blob: &[u8],
) -> Result<bool> {
    let (&tag, payload) = sig_blob
        .split_first()
        .ok_or_else(|| Error::Malformed("signature blob shorter than its header".into()))?;
    if tag != scheme.tag() {
        return Err(Error::SchemeMismatch { expected: scheme.token(), found_tag: tag });
    }
    match scheme {
        SchemeId::Rsa => {
            let public = std::str::from_utf8(public_blob)
                .map_err(|_| Error::Malformed("rsa public key is not text".into()))?;
            let (e, n) = rsa::parse_public_text(public)?;
            let text = std::str::from_utf8(payload)
                .map_err(|_| Error::Malformed("rsa signature is not text".into()))?;
            let sig = rsa::RsaSignature::from_text(text)?;
            if sig.s >= n {
                return Err(Error::Malformed("rsa signature not reduced mod N".into()));
            }
            Ok(rsa::verify(&e, &n, message, &sig))
        }
        SchemeId::Lamport => {
            let pk = lamport::LamportPublicKey::from_bytes(public_blob)?;
            let sig = lamport::LamportSignature::from_bytes(payload)?;
            Ok(lamport::verify(&pk, message, &sig))
        }
        SchemeId::Wots | SchemeId::WotsChecksum => {
            let pk = wots::WotsPublicKey::from_bytes(public_blob)?;
            let expect_checksum = scheme == SchemeId::WotsChecksum;
            if pk.checksum_mode != expect_checksum {
                return Err(Error::Malformed(
                    "wots key mode flag disagrees with the scheme tag".into(),
                ));
            }
            let sig = wots::WotsSignature::from_bytes(payload, expect_checksum)?;
            Ok(wots::verify(&pk, message, &sig))
        }
        SchemeId::Merkle => {
            let root = crate::hash::Digest256::from_slice(public_blob)
                .map_err(|_| Error::Malformed("merkle public key must be a 32-byte root".into()))?;
            let (&mode, rest) = payload
                .split_first()
                .ok_or_else(|| Error::Malformed("merkle signature missing mode flag".into()))?;
            let checksum_mode = match mode {
                0 => false,
                1 => true,
                other => {
                    return Err(Error::Malformed(format!("unknown merkle leaf mode 0x{other:02x}")))
                }
            };
            let sig = mss::MssSignature::from_bytes(rest, checksum_mode)?;
            Ok(mss::verify(&root, message, &sig))
        }
        SchemeId::LatticeFs => {
            let params = lattice::LatticeParams::default();
            let (a, u) = lattice::parse_public_key(&params, public_blob)?;
            let sig = lattice::LatticeSignature::from_bytes(&params, payload)?;
            Ok(lattice::fs_verify(&params, &a, &u, message, &sig))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn seed(b: u8) -> Seed {
        Seed([b; 32])
    }

    fn small_params(scheme: SchemeId) -> KeygenParams {
        match scheme {
            SchemeId::Rsa => KeygenParams { bits: Some(128), ..Default::default() },
            SchemeId::Merkle => KeygenParams { height: Some(2), ..Default::default() },
            _ => KeygenParams::default(),
        }
    }

    #[test]
    fn token_and_tag_tables() {
        for scheme in SchemeId::ALL {
            assert_eq!(scheme.token().parse::<SchemeId>().unwrap(), scheme);
            assert_eq!(SchemeId::from_tag(scheme.tag()), Some(scheme));
        }
        assert!("bogus-scheme".parse::<SchemeId>().is_err());
        assert_eq!(SchemeId::from_tag(0x7F), None);
        assert_eq!(SchemeId::Rsa.tag(), 0x01);
        assert_eq!(SchemeId::Lamport.tag(), 0x02);
        assert_eq!(SchemeId::Wots.tag(), 0x03);
        assert_eq!(SchemeId::WotsChecksum.tag(), 0x04);
        assert_eq!(SchemeId::Merkle.tag(), 0x05);
        assert_eq!(SchemeId::LatticeFs.tag(), 0x06);
    }

    #[test]
    fn usage_bounds_per_scheme() {
        let lamport = keygen(SchemeId::Lamport, &KeygenParams::default(), &seed(1)).unwrap();
        assert_eq!(lamport.uses_max, Some(1));

        let merkle = keygen(
            SchemeId::Merkle,
            &KeygenParams { height: Some(3), ..Default::default() },
            &seed(1),
        )
        .unwrap();
        assert_eq!(merkle.uses_max, Some(8));

        let rsa = keygen(SchemeId::Rsa, &small_params(SchemeId::Rsa), &seed(1)).unwrap();
        assert_eq!(rsa.uses_max, None);
        let lattice = keygen(SchemeId::LatticeFs, &KeygenParams::default(), &seed(1)).unwrap();
        assert_eq!(lattice.uses_max, None);
    }

    #[test]
    fn roundtrip_every_scheme() {
        for scheme in SchemeId::ALL {
            let mut record = keygen(scheme, &small_params(scheme), &seed(2)).unwrap();
            let message = format!("uniform contract for {scheme}");
            let blob = sign(&mut record, message.as_bytes()).unwrap();
            assert_eq!(blob[0], scheme.tag());
            assert!(
                verify(scheme, &record.public_blob, message.as_bytes(), &blob).unwrap(),
                "{scheme} roundtrip failed"
            );
            assert!(
                !verify(scheme, &record.public_blob, b"some other message", &blob).unwrap(),
                "{scheme} accepted a different message"
            );
        }
    }

    #[test]
    fn one_time_enforcement() {
        let mut record = keygen(SchemeId::Lamport, &KeygenParams::default(), &seed(3)).unwrap();
        sign(&mut record, b"first").unwrap();
        match sign(&mut record, b"second") {
            Err(Error::KeyExhausted { consumed: 1, max: 1 }) => {}
            other => panic!("expected exhaustion, got {other:?}"),
        }

        let mut record = keygen(
            SchemeId::Merkle,
            &KeygenParams { height: Some(1), ..Default::default() },
            &seed(3),
        )
        .unwrap();
        sign(&mut record, b"one").unwrap();
        sign(&mut record, b"two").unwrap();
        assert!(matches!(
            sign(&mut record, b"three"),
            Err(Error::KeyExhausted { consumed: 2, max: 2 })
        ));
    }

    #[test]
    fn unbounded_schemes_keep_signing() {
        let mut record = keygen(SchemeId::LatticeFs, &KeygenParams::default(), &seed(4)).unwrap();
        for i in 0..100u32 {
            let message = i.to_be_bytes();
            let blob = sign(&mut record, &message).unwrap();
            assert!(verify(SchemeId::LatticeFs, &record.public_blob, &message, &blob).unwrap());
        }
        assert_eq!(record.uses_consumed, 100);
    }

    #[test]
    fn merkle_state_advances_in_the_record() {
        let mut record = keygen(
            SchemeId::Merkle,
            &KeygenParams { height: Some(2), ..Default::default() },
            &seed(5),
        )
        .unwrap();
        let before = record.secret_blob.clone();
        let blob1 = sign(&mut record, b"advance").unwrap();
        assert_ne!(record.secret_blob, before, "leaf counter must advance");
        let blob2 = sign(&mut record, b"advance").unwrap();
        assert_ne!(blob1, blob2, "distinct leaves produce distinct signatures");
        assert!(verify(SchemeId::Merkle, &record.public_blob, b"advance", &blob1).unwrap());
        assert!(verify(SchemeId::Merkle, &record.public_blob, b"advance", &blob2).unwrap());
    }

    #[test]
    fn cross_scheme_blob_is_an_error_not_false() {
        let mut lamport = keygen(SchemeId::Lamport, &KeygenParams::default(), &seed(6)).unwrap();
        let blob = sign(&mut lamport, b"crossed").unwrap();
        let wots = keygen(SchemeId::Wots, &KeygenParams::default(), &seed(6)).unwrap();
        match verify(SchemeId::Wots, &wots.public_blob, b"crossed", &blob) {
            Err(Error::SchemeMismatch { expected: "wots", found_tag: 0x02 }) => {}
            other => panic!("expected scheme mismatch, got {other:?}"),
        }
    }

    #[test]
    fn framing_problems_are_errors() {
        let mut record = keygen(SchemeId::Wots, &KeygenParams::default(), &seed(7)).unwrap();
        let blob = sign(&mut record, b"framing").unwrap();

        assert!(matches!(
            verify(SchemeId::Wots, &record.public_blob, b"framing", &[]),
            Err(Error::Malformed(_))
        ));
        assert!(matches!(
            verify(SchemeId::Wots, &record.public_blob, b"framing", &blob[..100]),
            Err(Error::Malformed(_))
        ));

        // Truncated public key is also framing, not a clean false.
        assert!(verify(SchemeId::Wots, &record.public_blob[..50], b"framing", &blob).is_err());
    }

    #[test]
    fn wots_checksum_is_a_distinct_scheme() {
        let mut plain = keygen(SchemeId::Wots, &KeygenParams::default(), &seed(8)).unwrap();
        let mut hardened =
            keygen(SchemeId::WotsChecksum, &KeygenParams::default(), &seed(8)).unwrap();
        let blob_plain = sign(&mut plain, b"modes").unwrap();
        let blob_hard = sign(&mut hardened, b"modes").unwrap();
        assert_eq!(blob_plain.len(), 1 + 1024);
        assert_eq!(blob_hard.len(), 1 + 1088);
        assert!(verify(SchemeId::Wots, &plain.public_blob, b"modes", &blob_plain).unwrap());
        assert!(
            verify(SchemeId::WotsChecksum, &hardened.public_blob, b"modes", &blob_hard).unwrap()
        );
        // Tag and key mode must agree.
        assert!(verify(SchemeId::WotsChecksum, &plain.public_blob, b"modes", &blob_hard).is_err());
    }

    #[test]
    fn verify_does_not_touch_the_record() {
        let mut record = keygen(SchemeId::Lamport, &KeygenParams::default(), &seed(9)).unwrap();
        let blob = sign(&mut record, b"pure").unwrap();
        let snapshot = record.clone();
        let _ = verify(SchemeId::Lamport, &record.public_blob, b"pure", &blob).unwrap();
        assert_eq!(record, snapshot);
    }

    #[test]
    fn merkle_checksum_leaves_roundtrip_via_blobs() {
        let mut record = keygen(
            SchemeId::Merkle,
            &KeygenParams { height: Some(1), checksum: true, ..Default::default() },
            &seed(10),
        )
        .unwrap();
        let blob = sign(&mut record, b"hardened leaves").unwrap();
        assert_eq!(blob[1], 1, "leaf mode flag rides in the envelope");
        assert!(verify(SchemeId::Merkle, &record.public_blob, b"hardened leaves", &blob).unwrap());
    }
}
