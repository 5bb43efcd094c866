//! Checkpoint directory: `manifest` plus `layer-<n>.txt` for each layer.
//! See `docs/formats.md`.

use std::fs;
use std::io;
use std::path::{Path, PathBuf};

use thiserror::Error;

use super::{LedgerSettings, PatternRecord, SearchLedger, SearchStats, Witness};
use crate::hexmodel::Parity;
use crate::moves::MoveRules;
use crate::surface::CanonicalCode;

pub const CHECKPOINT_VERSION: u32 = 1;
/// Version of the canonical code byte layout stored in checkpoints.
const CODE_FORMAT: u32 = 1;
const MAGIC: &str = "hexpack-checkpoint";

#[derive(Debug, Error)]
pub enum CheckpointError {
    #[error("checkpoint I/O: {0}")]
    Io(#[from] io::Error),
    #[error("corrupt checkpoint ({file}, line {line}): {reason}")]
    Corrupt { file: String, line: usize, reason: String },
    #[error("checkpoint {what} version {found}, expected {expected}")]
    VersionMismatch { what: &'static str, found: u32, expected: u32 },
}

fn corrupt(file: &str, line: usize, reason: impl Into<String>) -> CheckpointError {
    CheckpointError::Corrupt { file: file.to_string(), line, reason: reason.into() }
}

pub(super) fn exists(dir: &Path) -> bool {
    dir.join("manifest").is_file()
}

fn layer_file(dir: &Path, n: usize) -> PathBuf {
    dir.join(format!("layer-{n}.txt"))
}

fn write_atomic(path: &Path, text: &str) -> io::Result<()> {
    let tmp = path.with_extension("tmp");
    fs::write(&tmp, text)?;
    fs::rename(tmp, path)
}

/// `<code hex> <hex count> <witness>`.
pub fn format_record_line(code: &CanonicalCode, witness: &Witness) -> String {
    format!("{} {} {}", code.to_hex(), witness.hex_count(), witness)
}

/// Parses one record line, checking that the count matches the witness.
pub fn parse_record_line(line: &str) -> Result<(CanonicalCode, usize, Witness), CheckpointError> {
    let bad = |reason: &str| corrupt("record", 0, reason);
    let mut fields = line.split_whitespace();
    let (Some(code), Some(count), Some(witness), None) = (fields.next(), fields.next(), fields.next(), fields.next())
    else {
        return Err(bad("expected 3 fields"));
    };
    let code = CanonicalCode::from_hex(code).map_err(|e| bad(&e.to_string()))?;
    let count: usize = count.parse().map_err(|_| bad("bad hex count"))?;
    let witness: Witness = witness.parse().map_err(|e: crate::moves::PlacementParseError| bad(&e.to_string()))?;
    if witness.hex_count() != count {
        return Err(bad("hex count does not match the witness length"));
    }
    Ok((code, count, witness))
}

fn manifest_text(ledger: &SearchLedger) -> String {
    let s = &ledger.settings;
    let configs: Vec<String> = s.rules.config_ids().iter().map(|c| c.to_string()).collect();
    let slots: usize = ledger.records.values().map(|r| r.odd.is_some() as usize + r.even.is_some() as usize).sum();
    format!(
        "{MAGIC} {CHECKPOINT_VERSION}\ncode-format {CODE_FORMAT}\nlayer {}\nreflection {}\nsphere {}\nconfigs {}\nexpanded {}\nmoves {}\nslots {}\n",
        ledger.layer,
        s.reflection_invariant as u8,
        s.rules.sphere_mode as u8,
        if configs.is_empty() { "-".to_string() } else { configs.join(",") },
        ledger.stats.expanded,
        ledger.stats.moves,
        slots,
    )
}

/// Writes the ledger. Layer files already present for earlier layers are
/// kept (they never change); the current layer file and the manifest are
/// replaced atomically, manifest last.
pub fn save_checkpoint(ledger: &SearchLedger, dir: &Path) -> Result<(), CheckpointError> {
    fs::create_dir_all(dir)?;
    for n in 1..=ledger.layer {
        let path = layer_file(dir, n);
        if n < ledger.layer && path.is_file() {
            continue;
        }
        let parity = Parity::of(n);
        let mut text = String::new();
        for code in ledger.layer_codes(n) {
            let w = ledger.records[code].witness(parity).expect("layer code");
            text.push_str(&format_record_line(code, w));
            text.push('\n');
        }
        write_atomic(&path, &text)?;
    }
    write_atomic(&dir.join("manifest"), &manifest_text(ledger))?;
    Ok(())
}

fn manifest_value<'a>(lines: &[&'a str], i: usize, key: &str) -> Result<&'a str, CheckpointError> {
    let line = lines.get(i).ok_or_else(|| corrupt("manifest", i + 1, format!("missing {key}")))?;
    match line.split_once(' ') {
        Some((k, v)) if k == key => Ok(v.trim()),
        _ => Err(corrupt("manifest", i + 1, format!("expected {key}"))),
    }
}

fn number<T: std::str::FromStr>(v: &str, line: usize) -> Result<T, CheckpointError> {
    v.parse().map_err(|_| corrupt("manifest", line, format!("bad number {v:?}")))
}

/// Reads a checkpoint written by [`save_checkpoint`]. The first record of
/// every layer is replayed to confirm it reproduces its code.
pub fn load_checkpoint(dir: &Path) -> Result<SearchLedger, CheckpointError> {
    let text = fs::read_to_string(dir.join("manifest"))?;
    let lines: Vec<&str> = text.lines().collect();
    let version: u32 = number(manifest_value(&lines, 0, MAGIC)?, 1)?;
    if version != CHECKPOINT_VERSION {
        return Err(CheckpointError::VersionMismatch { what: "format", found: version, expected: CHECKPOINT_VERSION });
    }
    let code_format: u32 = number(manifest_value(&lines, 1, "code-format")?, 2)?;
    if code_format != CODE_FORMAT {
        return Err(CheckpointError::VersionMismatch { what: "code format", found: code_format, expected: CODE_FORMAT });
    }
    let layer: usize = number(manifest_value(&lines, 2, "layer")?, 3)?;
    let flag = |i: usize, key: &str| -> Result<bool, CheckpointError> {
        match manifest_value(&lines, i, key)? {
            "0" => Ok(false),
            "1" => Ok(true),
            _ => Err(corrupt("manifest", i + 1, format!("{key} must be 0 or 1"))),
        }
    };
    let reflection_invariant = flag(3, "reflection")?;
    let sphere_mode = flag(4, "sphere")?;
    let configs = manifest_value(&lines, 5, "configs")?;
    let ids: Vec<u8> = if configs == "-" {
        Vec::new()
    } else {
        configs
            .split(',')
            .map(|c| c.parse().ok().filter(|id| (1..=8).contains(id)))
            .collect::<Option<_>>()
            .ok_or_else(|| corrupt("manifest", 6, "bad config list"))?
    };
    let stats = SearchStats {
        expanded: number(manifest_value(&lines, 6, "expanded")?, 7)?,
        moves: number(manifest_value(&lines, 7, "moves")?, 8)?,
    };
    let slots: usize = number(manifest_value(&lines, 8, "slots")?, 9)?;
    if layer == 0 {
        return Err(corrupt("manifest", 3, "layer must be at least 1"));
    }
    let settings = LedgerSettings {
        rules: MoveRules { sphere_mode, ..MoveRules::default() }.with_configs(&ids),
        reflection_invariant,
    };

    let mut ledger = SearchLedger { settings, records: Default::default(), layer, stats };
    let mut seen = 0;
    for n in 1..=layer {
        let name = format!("layer-{n}.txt");
        let text = fs::read_to_string(layer_file(dir, n))?;
        let parity = Parity::of(n);
        let mut first = None;
        for (i, line) in text.lines().enumerate() {
            let (code, count, witness) = parse_record_line(line).map_err(|e| match e {
                CheckpointError::Corrupt { reason, .. } => corrupt(&name, i + 1, reason),
                e => e,
            })?;
            if count != n {
                return Err(corrupt(&name, i + 1, "record belongs to another layer"));
            }
            let record: &mut PatternRecord = ledger.records.entry(code.clone()).or_default();
            if record.slot(parity).replace(witness).is_some() {
                return Err(corrupt(&name, i + 1, "duplicate record"));
            }
            if let Some(other) = record.min_count(parity.flip()) {
                if other > n {
                    return Err(corrupt(&name, i + 1, "other parity recorded at a later layer"));
                }
            }
            first.get_or_insert(code);
            seen += 1;
        }
        if let Some(code) = first {
            let w = ledger.records[&code].witness(parity).expect("just inserted");
            let packing = super::replay_witness(w, &settings.rules).map_err(|e| corrupt(&name, 1, e.to_string()))?;
            if packing.code(reflection_invariant) != code {
                return Err(corrupt(&name, 1, "witness does not reproduce its code"));
            }
        }
    }
    if seen != slots {
        return Err(corrupt("manifest", 9, format!("manifest lists {slots} slots, layer files hold {seen}")));
    }
    Ok(ledger)
}
