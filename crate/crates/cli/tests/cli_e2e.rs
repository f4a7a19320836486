//! End-to-end tests driving the sigbench binary: exit-code discipline,
//! file formats, crash safety, and size-table stability.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use tempfile::TempDir;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_sigbench"))
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn path_str(path: &Path) -> &str {
    path.to_str().unwrap()
}

fn stdout(output: &Output) -> String {
    String::from_utf8_lossy(&output.stdout).into_owned()
}

const SEED_A: &str = "1111111111111111111111111111111111111111111111111111111111111111";
const SEED_B: &str = "2222222222222222222222222222222222222222222222222222222222222222";

struct Workspace {
    _dir: TempDir,
    key: PathBuf,
    message: PathBuf,
    signature: PathBuf,
}

fn workspace(message: &[u8]) -> Workspace {
    let dir = TempDir::new().unwrap();
    let key = dir.path().join("key.sigb");
    let message_path = dir.path().join("message.bin");
    fs::write(&message_path, message).unwrap();
    let signature = dir.path().join("message.sig");
    Workspace { _dir: dir, key, message: message_path, signature }
}

fn keygen(ws: &Workspace, args: &[&str]) -> Output {
    let mut full = vec!["keygen"];
    full.extend_from_slice(args);
    full.extend_from_slice(&["--out", path_str(&ws.key)]);
    run(&full)
}

fn sign(ws: &Workspace) -> Output {
    run(&["sign", path_str(&ws.key), path_str(&ws.message), "--out", path_str(&ws.signature)])
}

fn verify(ws: &Workspace) -> Output {
    run(&["verify", path_str(&ws.key), path_str(&ws.message), path_str(&ws.signature)])
}

#[test]
fn lamport_flow_with_exact_file_sizes() {
    let ws = workspace(b"lamport end to end");
    let out = keygen(&ws, &["--scheme", "lamport", "--seed", SEED_A]);
    assert!(out.status.success());
    // Public key echoed as lowercase hex: 16384 bytes -> 32768 chars.
    let hex_line = stdout(&out);
    assert_eq!(hex_line.trim().len(), 2 * 16384);
    assert!(hex_line.trim().chars().all(|c| c.is_ascii_hexdigit() && !c.is_ascii_uppercase()));

    assert!(sign(&ws).status.success());
    assert_eq!(fs::read(&ws.signature).unwrap().len(), 1 + 8192);

    let out = verify(&ws);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(stdout(&out).trim(), "OK");

    // One-time key: a second sign is refused with exit 3.
    let out = sign(&ws);
    assert_eq!(out.status.code(), Some(3));
}

#[test]
fn deterministic_keygen_with_fixed_seed() {
    let ws1 = workspace(b"");
    let ws2 = workspace(b"");
    let out1 = keygen(&ws1, &["--scheme", "wots", "--seed", SEED_A]);
    let out2 = keygen(&ws2, &["--scheme", "wots", "--seed", SEED_A]);
    assert_eq!(stdout(&out1), stdout(&out2));
    assert_eq!(fs::read(&ws1.key).unwrap(), fs::read(&ws2.key).unwrap());

    let out3 = keygen(&ws2, &["--scheme", "wots", "--seed", SEED_B]);
    assert_ne!(stdout(&out1), stdout(&out3));
}

#[test]
fn wots_signature_file_size() {
    let ws = workspace(b"wots end to end");
    assert!(keygen(&ws, &["--scheme", "wots", "--seed", SEED_A]).status.success());
    assert!(sign(&ws).status.success());
    assert_eq!(fs::read(&ws.signature).unwrap().len(), 1 + 1024);
    assert_eq!(verify(&ws).status.code(), Some(0));

    // --checksum upgrades the scheme token.
    let ws = workspace(b"wots checksum end to end");
    assert!(keygen(&ws, &["--scheme", "wots", "--checksum", "--seed", SEED_A]).status.success());
    assert!(sign(&ws).status.success());
    assert_eq!(fs::read(&ws.signature).unwrap().len(), 1 + 1088);
    assert_eq!(verify(&ws).status.code(), Some(0));
}

#[test]
fn merkle_walks_all_leaves_then_exhausts() {
    let ws = workspace(b"merkle end to end");
    let out = keygen(&ws, &["--scheme", "merkle", "--height", "2", "--seed", SEED_A]);
    assert!(out.status.success());
    // Public key is the 32-byte root.
    assert_eq!(stdout(&out).trim().len(), 64);

    for _ in 0..4 {
        assert!(sign(&ws).status.success());
        assert_eq!(verify(&ws).status.code(), Some(0));
    }
    assert_eq!(sign(&ws).status.code(), Some(3));
}

#[test]
fn usage_errors_exit_2() {
    let ws = workspace(b"errors");

    let out = keygen(&ws, &["--scheme", "bogus-scheme", "--seed", SEED_A]);
    assert_eq!(out.status.code(), Some(2));

    let out = keygen(&ws, &["--scheme", "merkle", "--height", "99", "--seed", SEED_A]);
    assert_eq!(out.status.code(), Some(2));

    let out = keygen(&ws, &["--scheme", "rsa", "--bits", "31", "--seed", SEED_A]);
    assert_eq!(out.status.code(), Some(2));

    let out = keygen(&ws, &["--scheme", "lamport", "--seed", "zz"]);
    assert_eq!(out.status.code(), Some(2));

    // Missing message file.
    assert!(keygen(&ws, &["--scheme", "lamport", "--seed", SEED_A]).status.success());
    let out =
        run(&["sign", path_str(&ws.key), "/nonexistent/message", "--out", path_str(&ws.signature)]);
    assert_eq!(out.status.code(), Some(2));

    // Missing key file on verify.
    let out = run(&["verify", "/nonexistent/key", path_str(&ws.message), path_str(&ws.signature)]);
    assert_eq!(out.status.code(), Some(2));

    // Unknown subcommand / bad flags come from clap with code 2.
    let out = run(&["frobnicate"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn malformed_signature_is_exit_2_not_fail() {
    let ws = workspace(b"framing discipline");
    assert!(keygen(&ws, &["--scheme", "wots", "--seed", SEED_A]).status.success());
    assert!(sign(&ws).status.success());

    // Truncated signature: framing error, not a verification verdict.
    let blob = fs::read(&ws.signature).unwrap();
    fs::write(&ws.signature, &blob[..blob.len() / 2]).unwrap();
    let out = verify(&ws);
    assert_eq!(out.status.code(), Some(2));
    assert_eq!(stdout(&out).trim(), "");

    // Cross-scheme signature: also a framing error.
    let lamport_ws = workspace(b"framing discipline");
    assert!(keygen(&lamport_ws, &["--scheme", "lamport", "--seed", SEED_A]).status.success());
    assert!(sign(&lamport_ws).status.success());
    fs::copy(&lamport_ws.signature, &ws.signature).unwrap();
    let out = verify(&ws);
    assert_eq!(out.status.code(), Some(2));

    // Corrupted key store file.
    let mut key_bytes = fs::read(&ws.key).unwrap();
    key_bytes[0] = b'X';
    fs::write(&ws.key, &key_bytes).unwrap();
    let out = verify(&ws);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn tampered_message_is_exit_1() {
    let ws = workspace(b"tamper target");
    assert!(keygen(&ws, &["--scheme", "lattice-fs", "--seed", SEED_A]).status.success());
    assert!(sign(&ws).status.success());
    assert_eq!(verify(&ws).status.code(), Some(0));

    fs::write(&ws.message, b"tamper target!").unwrap();
    let out = verify(&ws);
    assert_eq!(out.status.code(), Some(1));
    assert_eq!(stdout(&out).trim(), "FAIL");
}

/// A crash between the usage-state persist and the signature write must
/// waste the one-time use, never replay it.
#[test]
fn crash_after_state_persist_never_reuses_a_leaf() {
    // One-time scheme: the crashed sign consumes the only use.
    let ws = workspace(b"crash safety");
    assert!(keygen(&ws, &["--scheme", "lamport", "--seed", SEED_A]).status.success());
    let out = bin()
        .args(["sign", path_str(&ws.key), path_str(&ws.message), "--out", path_str(&ws.signature)])
        .env("SIGBENCH_FAULT", "exit-after-state-persist")
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(70));
    assert!(!ws.signature.exists(), "no signature may exist after the crash");
    // The use is gone: a retry reports exhaustion rather than re-signing.
    assert_eq!(sign(&ws).status.code(), Some(3));

    // Stateful scheme: the crashed sign burns leaf 0; the retry uses leaf 1.
    let ws = workspace(b"crash safety, merkle");
    assert!(keygen(&ws, &["--scheme", "merkle", "--height", "1", "--seed", SEED_A])
        .status
        .success());
    let out = bin()
        .args(["sign", path_str(&ws.key), path_str(&ws.message), "--out", path_str(&ws.signature)])
        .env("SIGBENCH_FAULT", "exit-after-state-persist")
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(70));
    assert!(!ws.signature.exists());

    assert!(sign(&ws).status.success());
    let blob = fs::read(&ws.signature).unwrap();
    // Envelope: scheme tag, leaf mode, then the 4-byte leaf index.
    let leaf_index = u32::from_be_bytes(blob[2..6].try_into().unwrap());
    assert_eq!(leaf_index, 1, "leaf 0 was wasted by the crash, never reused");
    assert_eq!(verify(&ws).status.code(), Some(0));

    // Both leaves are now spent (one wasted, one used).
    assert_eq!(sign(&ws).status.code(), Some(3));
}

#[test]
fn sizes_output_is_byte_stable() {
    let out = run(&["sizes"]);
    assert!(out.status.success());
    let golden =
        fs::read_to_string(Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/golden/sizes.txt"))
            .unwrap();
    assert_eq!(stdout(&out), golden);
}

#[test]
fn sizes_contains_reference_rows_and_filters() {
    let out = run(&["sizes"]);
    let text = stdout(&out);
    for needle in [
        "SPHINCS+ SHA-256 128-bit          32          64      17088  1 (128-bit), reference (Table 1)",
        "SPHINCS+ SHA-256 192-bit          48          96      35664  3 (192-bit), reference (Table 1)",
        "SPHINCS+ SHA-256 256-bit          64         128      49856  5 (256-bit), reference (Table 1)",
    ] {
        assert!(text.contains(needle), "missing reference row: {needle}");
    }

    let filtered = stdout(&run(&["sizes", "lamport"]));
    assert!(filtered.contains("lamport"));
    assert!(!filtered.contains("wots"));
    assert!(filtered.contains("SPHINCS+"), "reference rows always print");
}

#[test]
fn verify_leaves_the_key_store_untouched() {
    let ws = workspace(b"read only verify");
    assert!(keygen(&ws, &["--scheme", "merkle", "--height", "1", "--seed", SEED_A])
        .status
        .success());
    assert!(sign(&ws).status.success());
    let before = fs::read(&ws.key).unwrap();
    for _ in 0..3 {
        assert_eq!(verify(&ws).status.code(), Some(0));
    }
    assert_eq!(fs::read(&ws.key).unwrap(), before);
}
