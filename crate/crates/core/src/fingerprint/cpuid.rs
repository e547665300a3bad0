//! CPU model identification.
//!
//! `/proc/cpuinfo` exposes a decimal model number; converting it to hex
//! gives the CPUID signature, which cross-references to a product name.
//! The mapping ships as a versioned CSV data file; extending it requires
//! no code change. Rows whose name ends in `*` identify a family whose
//! specific model could not be determined.

use std::fmt;
use std::sync::OnceLock;

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// One row of the identification table. `(model_id, mhz)` is a unique key.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CpuModelEntry {
    pub model_id: u32,
    pub mhz: u32,
    pub model_name: String,
}

impl CpuModelEntry {
    pub fn model_id_hex(&self) -> String {
        model_id_hex(self.model_id)
    }
}

/// Hexadecimal rendering of a decimal model number, e.g. 62 -> 0x3E.
pub fn model_id_hex(model_id: u32) -> String {
    format!("0x{model_id:X}")
}

/// Outcome of a model lookup. Never a guess: an id absent from the table
/// is `Unknown`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum DecodedCpu {
    /// Exact `(model_id, mhz)` match. `undetermined` marks starred rows.
    Exact { name: String, undetermined: bool },
    /// The model id is known but this clock speed is not listed.
    FamilyOnly { family: String },
    Unknown,
}

impl DecodedCpu {
    pub fn label(&self) -> String {
        self.to_string()
    }
}

impl fmt::Display for DecodedCpu {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            DecodedCpu::Exact {
                name,
                undetermined: false,
            } => write!(f, "{name}"),
            DecodedCpu::Exact {
                name,
                undetermined: true,
            } => write!(f, "{name}, model undetermined"),
            DecodedCpu::FamilyOnly { family } => {
                write!(f, "{family}, specific model could not be determined")
            }
            DecodedCpu::Unknown => write!(f, "Unknown"),
        }
    }
}

#[derive(Debug, Error)]
pub enum CpuidTableError {
    #[error("cpuid table row {row}: {detail}")]
    Row { row: usize, detail: String },
    #[error("cpuid table: duplicate key ({model_id}, {mhz})")]
    DuplicateKey { model_id: u32, mhz: u32 },
    #[error("cpuid table is empty or missing its header")]
    Empty,
}

/// The signature-to-name lookup table.
#[derive(Debug, Clone)]
pub struct CpuidTable {
    entries: Vec<CpuModelEntry>,
}

impl CpuidTable {
    /// Parse the delimited text format: a `model_id,mhz,model_name` header
    /// followed by one row per model.
    pub fn from_csv(text: &str) -> Result<CpuidTable, CpuidTableError> {
        let mut lines = text.lines().enumerate();
        let Some((_, header)) = lines.next() else {
            return Err(CpuidTableError::Empty);
        };
        if header.trim() != "model_id,mhz,model_name" {
            return Err(CpuidTableError::Empty);
        }
        let mut entries: Vec<CpuModelEntry> = Vec::new();
        for (idx, line) in lines {
            let line = line.trim();
            if line.is_empty() {
                continue;
            }
            let row = idx + 1;
            let mut parts = line.splitn(3, ',');
            let (Some(id), Some(mhz), Some(name)) = (parts.next(), parts.next(), parts.next())
            else {
                return Err(CpuidTableError::Row {
                    row,
                    detail: "expected 3 columns".to_string(),
                });
            };
            let model_id: u32 = id.trim().parse().map_err(|_| CpuidTableError::Row {
                row,
                detail: format!("model_id `{id}` is not a number"),
            })?;
            let mhz: u32 = mhz.trim().parse().map_err(|_| CpuidTableError::Row {
                row,
                detail: format!("mhz `{mhz}` is not a number"),
            })?;
            if entries
                .iter()
                .any(|e| e.model_id == model_id && e.mhz == mhz)
            {
                return Err(CpuidTableError::DuplicateKey { model_id, mhz });
            }
            entries.push(CpuModelEntry {
                model_id,
                mhz,
                model_name: name.trim().to_string(),
            });
        }
        if entries.is_empty() {
            return Err(CpuidTableError::Empty);
        }
        Ok(CpuidTable { entries })
    }

    /// The table shipped with the crate.
    pub fn shipped() -> &'static CpuidTable {
        static TABLE: OnceLock<CpuidTable> = OnceLock::new();
        TABLE.get_or_init(|| {
            CpuidTable::from_csv(include_str!("../../data/cpuid.csv"))
                .expect("shipped cpuid table is valid")
        })
    }

    pub fn entries(&self) -> &[CpuModelEntry] {
        &self.entries
    }

    /// Pure lookup: exact `(model_id, mhz)` match first, then a family-level
    /// answer if only the clock speed is unknown, otherwise `Unknown`.
    pub fn decode(&self, model_id: u32, mhz: u32) -> DecodedCpu {
        if let Some(entry) = self
            .entries
            .iter()
            .find(|e| e.model_id == model_id && e.mhz == mhz)
        {
            let (name, undetermined) = split_star(&entry.model_name);
            return DecodedCpu::Exact {
                name: name.to_string(),
                undetermined,
            };
        }
        let siblings: Vec<&str> = self
            .entries
            .iter()
            .filter(|e| e.model_id == model_id)
            .map(|e| split_star(&e.model_name).0)
            .collect();
        if siblings.is_empty() {
            return DecodedCpu::Unknown;
        }
        match common_word_prefix(&siblings) {
            Some(family) => DecodedCpu::FamilyOnly { family },
            None => DecodedCpu::Unknown,
        }
    }
}

/// Decode against the shipped table.
pub fn decode_cpu_model(model_id: u32, mhz: u32) -> DecodedCpu {
    CpuidTable::shipped().decode(model_id, mhz)
}

fn split_star(name: &str) -> (&str, bool) {
    match name.strip_suffix('*') {
        Some(base) => (base.trim_end(), true),
        None => (name, false),
    }
}

fn common_word_prefix(names: &[&str]) -> Option<String> {
    let first: Vec<&str> = names[0].split_whitespace().collect();
    let mut len = first.len();
    for name in &names[1..] {
        let words: Vec<&str> = name.split_whitespace().collect();
        len = len.min(words.len());
        while len > 0 && first[..len] != words[..len] {
            len -= 1;
        }
    }
    if len == 0 {
        None
    } else {
        Some(first[..len].join(" "))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exact_rows_decode_to_names() {
        assert_eq!(
            decode_cpu_model(62, 2500).label(),
            "Intel Xeon E5-2670 v2"
        );
        assert_eq!(
            decode_cpu_model(79, 2300).label(),
            "Intel Xeon E5-2673 v4"
        );
    }

    #[test]
    fn starred_rows_carry_the_undetermined_marker() {
        assert_eq!(
            decode_cpu_model(85, 2000).label(),
            "Intel Xeon (Skylake), model undetermined"
        );
        assert_eq!(
            decode_cpu_model(85, 2200).label(),
            "Intel Xeon (Skylake), model undetermined"
        );
    }

    #[test]
    fn known_model_unknown_speed_resolves_family() {
        let decoded = decode_cpu_model(62, 9999);
        assert_eq!(
            decoded,
            DecodedCpu::FamilyOnly {
                family: "Intel Xeon".to_string()
            }
        );
        assert!(decoded.label().contains("specific model could not be determined"));
    }

    #[test]
    fn unknown_model_is_unknown_never_a_guess() {
        assert_eq!(decode_cpu_model(99, 9999), DecodedCpu::Unknown);
        assert_eq!(decode_cpu_model(99, 9999).label(), "Unknown");
    }

    #[test]
    fn hex_conversion() {
        assert_eq!(model_id_hex(62), "0x3E");
        assert_eq!(model_id_hex(79), "0x4F");
        assert_eq!(model_id_hex(85), "0x55");
    }

    #[test]
    fn decode_is_a_pure_lookup() {
        for _ in 0..3 {
            assert_eq!(
                decode_cpu_model(63, 2400).label(),
                "Intel Xeon E5-2673 v3"
            );
        }
    }

    #[test]
    fn duplicate_keys_are_rejected() {
        let text = "model_id,mhz,model_name\n62,2500,A\n62,2500,B\n";
        assert!(matches!(
            CpuidTable::from_csv(text),
            Err(CpuidTableError::DuplicateKey { .. })
        ));
    }
}
