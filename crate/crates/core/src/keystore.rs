//! On-disk key container and the discipline around it.
//!
//! Layout: 4-byte magic, 1-byte scheme tag, 1-byte version, then three
//! length-prefixed sections (public, secret, state). The state section
//! is the usage ledger: consumed count and the one-time budget.
//!
//! Two rules keep one-time keys one-time across processes and crashes:
//! a sibling `.lock` file is held exclusively for the whole
//! read-sign-persist cycle, and the advanced usage state reaches durable
//! storage before any signature is released. A crash between the two
//! steps wastes a leaf; it never reuses one.

use std::fs::{self, File, OpenOptions};
use std::io::Write;
use std::path::{Path, PathBuf};

use crate::error::{Error, Result};
use crate::scheme::{KeyRecord, SchemeId};

pub const MAGIC: [u8; 4] = *b"SIGB";
pub const VERSION: u8 = 1;

/// uses_max sentinel for many-time schemes.
const UNBOUNDED: u64 = u64::MAX;

const STATE_LEN: usize = 16;

fn push_section(out: &mut Vec<u8>, bytes: &[u8]) {
    out.extend_from_slice(&(bytes.len() as u32).to_be_bytes());
    out.extend_from_slice(bytes);
}

fn take_section<'a>(bytes: &mut &'a [u8], what: &str) -> Result<&'a [u8]> {
    if bytes.len() < 4 {
        return Err(Error::Malformed(format!("{what} section header truncated")));
    }
    let len = u32::from_be_bytes(bytes[..4].try_into().unwrap()) as usize;
    if bytes.len() < 4 + len {
        return Err(Error::Malformed(format!("{what} section truncated")));
    }
    let (section, rest) = bytes[4..].split_at(len);
    *bytes = rest;
    Ok(section)
}

pub fn encode(record: &KeyRecord) -> Vec<u8> {
    let mut out = Vec::new();
    out.extend_from_slice(&MAGIC);
    out.push(record.scheme.tag());
    out.push(VERSION);
    push_section(&mut out, &record.public_blob);
    push_section(&mut out, &record.secret_blob);
    let mut state = [0u8; STATE_LEN];
    state[..8].copy_from_slice(&record.uses_consumed.to_be_bytes());
    state[8..].copy_from_slice(&record.uses_max.unwrap_or(UNBOUNDED).to_be_bytes());
    push_section(&mut out, &state);
    out
}

pub fn decode(bytes: &[u8]) -> Result<KeyRecord> {
    let mut rest = bytes;
    if rest.len() < 6 {
        return Err(Error::Malformed("key file shorter than its header".into()));
    }
    if rest[..4] != MAGIC {
        return Err(Error::Malformed("bad key-file magic".into()));
    }
    let scheme = SchemeId::from_tag(rest[4])
        .ok_or_else(|| Error::Malformed(format!("unknown scheme tag 0x{:02x}", rest[4])))?;
    if rest[5] != VERSION {
        return Err(Error::Malformed(format!("unsupported key-file version {}", rest[5])));
    }
    rest = &rest[6..];
    let public_blob = take_section(&mut rest, "public")?.to_vec();
    let secret_blob = take_section(&mut rest, "secret")?.to_vec();
    let state = take_section(&mut rest, "state")?;
    if !rest.is_empty() {
        return Err(Error::Malformed("trailing bytes after key-file sections".into()));
    }
    if state.len() != STATE_LEN {
        return Err(Error::Malformed(format!(
            "state section must be {STATE_LEN} bytes, got {}",
            state.len()
        )));
    }
    let uses_consumed = u64::from_be_bytes(state[..8].try_into().unwrap());
    let raw_max = u64::from_be_bytes(state[8..].try_into().unwrap());
    let uses_max = (raw_max != UNBOUNDED).then_some(raw_max);
    if let Some(max) = uses_max {
        if uses_consumed > max {
            return Err(Error::Malformed(format!(
                "usage state claims {uses_consumed} of {max} uses consumed"
            )));
        }
    }
    Ok(KeyRecord { scheme, public_blob, secret_blob, uses_consumed, uses_max })
}

/// Durable write: temp file in the same directory, fsync, rename over.
pub fn save(path: &Path, record: &KeyRecord) -> Result<()> {
    let tmp = path.with_extension("tmp");
    {
        let mut file = File::create(&tmp)?;
        file.write_all(&encode(record))?;
        file.sync_all()?;
    }
    fs::rename(&tmp, path)?;
    Ok(())
}

pub fn load(path: &Path) -> Result<KeyRecord> {
    decode(&fs::read(path)?)
}

/// Exclusive cross-process lock for one key file, backed by a sibling
/// `.lock` file (never renamed, so the lock survives the atomic save).
/// Held until dropped.
pub struct KeyLock {
    _file: File,
    path: PathBuf,
}

impl KeyLock {
    pub fn path(&self) -> &Path {
        &self.path
    }
}

pub fn lock_exclusive(key_path: &Path) -> Result<KeyLock> {
    let mut os_string = key_path.as_os_str().to_os_string();
    os_string.push(".lock");
    let path = PathBuf::from(os_string);
    let file = OpenOptions::new().create(true).truncate(false).write(true).open(&path)?;
    file.lock()?;
    Ok(KeyLock { _file: file, path })
}
