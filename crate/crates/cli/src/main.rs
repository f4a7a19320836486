//! sigbench: generate keys, sign files, verify signatures, and print a
//! size comparison across the implemented schemes.
//!
//! Exit codes: 0 success / signature valid, 1 signature invalid,
//! 2 usage or malformed input, 3 one-time key exhausted.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use rand::RngCore;

use sigbench_core::hash::prg_expand;
use sigbench_core::scheme::{self, KeygenParams, SchemeId};
use sigbench_core::{keystore, Error, Seed};

const EXIT_OK: u8 = 0;
const EXIT_INVALID: u8 = 1;
const EXIT_USAGE: u8 = 2;
const EXIT_EXHAUSTED: u8 = 3;

/// Crash-injection hook for the crash-safety tests: when set to
/// `exit-after-state-persist`, `sign` exits after the key state reaches
/// disk but before the signature file is written.
const FAULT_ENV: &str = "SIGBENCH_FAULT";
const FAULT_EXIT: i32 = 70;

/// Built-in seed for `sizes` so its output is byte-stable by default.
const SIZES_SEED: Seed = Seed([0x5B; 32]);

/// Reference rows embedded for comparison; these are published SPHINCS+
/// parameter-set sizes, not measurements of anything in this workbench.
const SPHINCS_REFERENCE: [(&str, usize, usize, usize, &str); 3] = [
    ("SPHINCS+ SHA-256 128-bit", 32, 64, 17_088, "1 (128-bit)"),
    ("SPHINCS+ SHA-256 192-bit", 48, 96, 35_664, "3 (192-bit)"),
    ("SPHINCS+ SHA-256 256-bit", 64, 128, 49_856, "5 (256-bit)"),
];

#[derive(Parser)]
#[command(name = "sigbench", version, about = "Signature-scheme workbench", long_about = None)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate a key pair and write a key-store file
    Keygen {
        /// Scheme: rsa, lamport, wots, wots-checksum, merkle, lattice-fs
        #[arg(long)]
        scheme: String,
        /// Merkle tree height h (2^h one-time leaves, default 8)
        #[arg(long)]
        height: Option<u32>,
        /// RSA modulus size in bits (default 512)
        #[arg(long)]
        bits: Option<u64>,
        /// Checksum-harden the hash chains (wots and merkle leaves)
        #[arg(long)]
        checksum: bool,
        /// 32-byte hex seed; system entropy when absent
        #[arg(long)]
        seed: Option<String>,
        /// Key-store output path
        #[arg(long)]
        out: PathBuf,
    },
    /// Sign a message file, consuming one use of the key
    Sign {
        /// Key-store file (updated in place)
        key: PathBuf,
        /// Message file, signed as raw bytes
        message: PathBuf,
        /// Signature output path
        #[arg(long)]
        out: PathBuf,
    },
    /// Verify a signature file; prints OK or FAIL
    Verify {
        /// Key-store file (only the public section is read)
        key: PathBuf,
        /// Message file
        message: PathBuf,
        /// Signature file
        signature: PathBuf,
    },
    /// Print a size table for the implemented schemes
    Sizes {
        /// Restrict the measured rows to these scheme tokens
        schemes: Vec<String>,
        /// 32-byte hex seed for the measured keys
        #[arg(long)]
        seed: Option<String>,
    },
}

/// A failure destined for stderr, carrying its exit code.
struct CmdError {
    code: u8,
    message: String,
}

impl CmdError {
    fn usage(message: impl Into<String>) -> Self {
        CmdError { code: EXIT_USAGE, message: message.into() }
    }
}

impl From<Error> for CmdError {
    fn from(err: Error) -> Self {
        let code = match err {
            Error::KeyExhausted { .. } => EXIT_EXHAUSTED,
            _ => EXIT_USAGE,
        };
        CmdError { code, message: err.to_string() }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli.command) {
        Ok(code) => ExitCode::from(code),
        Err(err) => {
            eprintln!("sigbench: {}", err.message);
            ExitCode::from(err.code)
        }
    }
}

fn run(command: Command) -> Result<u8, CmdError> {
    match command {
        Command::Keygen { scheme, height, bits, checksum, seed, out } => {
            cmd_keygen(&scheme, height, bits, checksum, seed.as_deref(), &out)
        }
        Command::Sign { key, message, out } => cmd_sign(&key, &message, &out),
        Command::Verify { key, message, signature } => cmd_verify(&key, &message, &signature),
        Command::Sizes { schemes, seed } => cmd_sizes(&schemes, seed.as_deref()),
    }
}

fn parse_scheme(token: &str) -> Result<SchemeId, CmdError> {
    token.parse::<SchemeId>().map_err(CmdError::from)
}

fn parse_seed(hex_seed: Option<&str>) -> Result<Seed, CmdError> {
    match hex_seed {
        Some(text) => {
            let bytes = hex::decode(text)
                .map_err(|_| CmdError::usage(format!("--seed is not valid hex: {text:?}")))?;
            Seed::from_slice(&bytes).map_err(CmdError::from)
        }
        None => {
            let mut bytes = [0u8; 32];
            rand::rngs::OsRng.fill_bytes(&mut bytes);
            Ok(Seed(bytes))
        }
    }
}

fn read_file(path: &Path, what: &str) -> Result<Vec<u8>, CmdError> {
    fs::read(path).map_err(|err| CmdError::usage(format!("cannot read {what} {path:?}: {err}")))
}

fn cmd_keygen(
    token: &str,
    height: Option<u32>,
    bits: Option<u64>,
    checksum: bool,
    hex_seed: Option<&str>,
    out: &Path,
) -> Result<u8, CmdError> {
    let mut scheme = parse_scheme(token)?;
    if checksum && scheme == SchemeId::Wots {
        scheme = SchemeId::WotsChecksum;
    }
    let seed = parse_seed(hex_seed)?;
    let params = KeygenParams { height, bits, checksum };
    let record = scheme::keygen(scheme, &params, &seed)?;
    keystore::save(out, &record)?;
    println!("{}", hex::encode(&record.public_blob));
    Ok(EXIT_OK)
}

fn cmd_sign(key: &Path, message: &Path, out: &Path) -> Result<u8, CmdError> {
    let _lock = keystore::lock_exclusive(key)?;
    let mut record = keystore::load(key)?;
    let message_bytes = read_file(message, "message file")?;
    let blob = scheme::sign(&mut record, &message_bytes)?;
    // Usage state must be durable before the signature exists anywhere:
    // a crash here wastes a one-time use but can never replay one.
    keystore::save(key, &record)?;
    if std::env::var(FAULT_ENV).as_deref() == Ok("exit-after-state-persist") {
        eprintln!("sigbench: injected fault after state persist");
        std::process::exit(FAULT_EXIT);
    }
    fs::write(out, &blob)
        .map_err(|err| CmdError::usage(format!("cannot write signature {out:?}: {err}")))?;
    Ok(EXIT_OK)
}

fn cmd_verify(key: &Path, message: &Path, signature: &Path) -> Result<u8, CmdError> {
    let record = keystore::load(key)?;
    let message_bytes = read_file(message, "message file")?;
    let sig_bytes = read_file(signature, "signature file")?;
    if scheme::verify(record.scheme, &record.public_blob, &message_bytes, &sig_bytes)? {
        println!("OK");
        Ok(EXIT_OK)
    } else {
        println!("FAIL");
        Ok(EXIT_INVALID)
    }
}

struct SizeRow {
    name: String,
    public: usize,
    secret: usize,
    signature: usize,
    notes: String,
}

fn measured_row(scheme: SchemeId, seed: &Seed) -> Result<SizeRow, CmdError> {
    let (params, name, notes) = match scheme {
        SchemeId::Rsa => (
            KeygenParams { bits: Some(scheme::DEFAULT_RSA_BITS), ..Default::default() },
            format!("rsa ({}-bit)", scheme::DEFAULT_RSA_BITS),
            "many-time, trapdoor baseline".to_string(),
        ),
        SchemeId::Merkle => (
            KeygenParams { height: Some(scheme::DEFAULT_MERKLE_HEIGHT), ..Default::default() },
            format!("merkle (h={})", scheme::DEFAULT_MERKLE_HEIGHT),
            format!("{} signatures per key", 1u64 << scheme::DEFAULT_MERKLE_HEIGHT),
        ),
        SchemeId::LatticeFs => {
            (KeygenParams::default(), scheme.token().to_string(), "many-time".to_string())
        }
        _ => (KeygenParams::default(), scheme.token().to_string(), "one-time".to_string()),
    };
    // Per-scheme sub-seed so one --seed drives the whole table.
    let sub_seed = Seed(prg_expand(seed, scheme.tag(), 0).0);
    let mut record = scheme::keygen(scheme, &params, &sub_seed)?;
    let public = record.public_blob.len();
    let secret = record.secret_blob.len();
    let blob = scheme::sign(&mut record, b"sigbench size probe")?;
    Ok(SizeRow {
        name,
        public,
        secret,
        // Payload behind the 1-byte scheme tag, matching the per-scheme
        // serialization sizes.
        signature: blob.len() - 1,
        notes,
    })
}

fn cmd_sizes(filters: &[String], hex_seed: Option<&str>) -> Result<u8, CmdError> {
    let seed = match hex_seed {
        Some(_) => parse_seed(hex_seed)?,
        None => SIZES_SEED,
    };
    let mut rows = Vec::new();
    for scheme in SchemeId::ALL {
        if filters.is_empty() || filters.iter().any(|f| f == scheme.token()) {
            rows.push(measured_row(scheme, &seed)?);
        }
    }
    for (name, public, secret, signature, level) in SPHINCS_REFERENCE {
        rows.push(SizeRow {
            name: name.to_string(),
            public,
            secret,
            signature,
            notes: format!("{level}, reference (Table 1)"),
        });
    }

    let name_width = rows.iter().map(|r| r.name.len()).max().unwrap_or(0).max("scheme".len());
    let mut out = String::new();
    let _ = writeln!(
        out,
        "{:<name_width$}  {:>10}  {:>10}  {:>9}  notes",
        "scheme", "public", "secret", "signature"
    );
    let _ = writeln!(out, "{:-<width$}", "", width = name_width + 2 + 10 + 2 + 10 + 2 + 9 + 2 + 5);
    for row in &rows {
        let _ = writeln!(
            out,
            "{:<name_width$}  {:>10}  {:>10}  {:>9}  {}",
            row.name, row.public, row.secret, row.signature, row.notes
        );
    }
    print!("{out}");
    Ok(EXIT_OK)
}
