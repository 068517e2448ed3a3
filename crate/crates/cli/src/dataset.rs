use std::path::Path;

use cel::data::{air_conditioning, insulating_fluid, parse_sample};
use cel::Sample;
use serde::Serialize;

use crate::error::CliError;

/// Prefix selecting one of the bundled datasets instead of a file.
pub const BUILTIN_PREFIX: &str = "builtin:";

#[derive(Debug, Clone)]
pub struct Dataset {
    pub sample: Sample,
    pub source_path: String,
    pub checksum: u64,
}

/// Identity of a dataset as echoed in reports.
#[derive(Debug, Clone, Serialize)]
pub struct DatasetInfo {
    pub path: String,
    pub n: usize,
    pub checksum: String,
}

impl Dataset {
    pub fn info(&self) -> DatasetInfo {
        DatasetInfo {
            path: self.source_path.clone(),
            n: self.sample.len(),
            checksum: format!("{:016x}", self.checksum),
        }
    }
}

/// FNV-1a over the little-endian bits of the sorted values, so the hash
/// depends only on the numbers, not on their formatting or order.
pub fn checksum(sample: &Sample) -> u64 {
    const OFFSET: u64 = 0xcbf2_9ce4_8422_2325;
    const PRIME: u64 = 0x0000_0100_0000_01b3;
    let mut h = OFFSET;
    for v in sample.values() {
        for b in v.to_bits().to_le_bytes() {
            h ^= b as u64;
            h = h.wrapping_mul(PRIME);
        }
    }
    h
}

/// Reads a dataset file, or `builtin:insulating_fluid_34kv` /
/// `builtin:air_conditioning`.
pub fn load_dataset(path: &str) -> Result<Dataset, CliError> {
    let sample = if let Some(name) = path.strip_prefix(BUILTIN_PREFIX) {
        match name {
            "insulating_fluid_34kv" => insulating_fluid(),
            "air_conditioning" => air_conditioning(),
            other => {
                return Err(CliError::Usage(format!(
                    "unknown builtin dataset '{other}' (available: insulating_fluid_34kv, air_conditioning)"
                )))
            }
        }
    } else {
        let p = Path::new(path);
        let text = std::fs::read_to_string(p).map_err(|source| CliError::Io { path: p.into(), source })?;
        parse_sample(&text, p.file_stem().and_then(|s| s.to_str()).unwrap_or(path))
            .map_err(|source| CliError::Input { context: path.to_string(), source })?
    };
    Ok(Dataset { checksum: checksum(&sample), sample, source_path: path.to_string() })
}
