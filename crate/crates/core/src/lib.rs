//! A workbench of signature schemes behind one keygen/sign/verify
//! contract: Lamport and Winternitz one-time signatures, a Merkle
//! many-time scheme built from them, a Fiat-Shamir signature over a
//! mod-q identification protocol, and a textbook RSA baseline for
//! contrast with the trapdoor-free designs.
//!
//! Every key derives deterministically from a 32-byte [`Seed`], so key
//! generation is reproducible and test vectors are stable. One-time and
//! bounded keys are guarded twice: [`scheme`] refuses to sign past a
//! key's budget, and [`keystore`] persists advanced usage state before
//! a signature is ever released.
//!
//! None of these implementations is hardened cryptography. The point
//! is observable, testable scheme mechanics, including the places where
//! the bare constructions fail (see the Winternitz malleability and
//! secret-leak tests).

pub mod error;
pub mod hash;
pub mod keystore;
pub mod lamport;
pub mod lattice;
pub mod mss;
pub mod rsa;
pub mod scheme;
pub mod wots;

pub use error::{Error, Result};
pub use hash::{Digest256, Seed};
pub use scheme::{KeyRecord, KeygenParams, SchemeId};
