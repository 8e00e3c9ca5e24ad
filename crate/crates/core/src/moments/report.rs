use std::time::Instant;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use super::{delta_bruteforce, diagonal_term, main_term_executed, main_term_theorem1, FamilySpec, MomentConfig};
use crate::arith::Estimate;
use crate::error::Result;

/// Everything a report depends on.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReportConfig {
    pub family: FamilySpec,
    pub moments: MomentConfig,
}

impl ReportConfig {
    /// SHA-256 of the JSON encoding, hex.
    pub fn hash(&self) -> String {
        let json = serde_json::to_vec(self).expect("config serializes");
        format!("{:x}", Sha256::digest(&json))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReportMetadata {
    pub runtime_seconds: f64,
    pub character_count: u64,
    pub moduli: u64,
    pub config_hash: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MomentReport {
    pub config: ReportConfig,
    /// Sum over every `q` in the family.
    pub brute_force: Estimate,
    /// The same sum restricted to `(q, hk) = 1`.
    pub brute_force_coprime: Estimate,
    #[serde(with = "crate::serde_complex")]
    pub theorem1_main: Complex64,
    pub executed_main: Estimate,
    #[serde(with = "crate::serde_complex")]
    pub diagonal_main: Complex64,
    /// `|brute_force / executed_main - 1|`
    pub relative_gap: f64,
    pub metadata: ReportMetadata,
}

pub fn moment_report(spec: &FamilySpec, cfg: &MomentConfig) -> Result<MomentReport> {
    let start = Instant::now();
    let brute = delta_bruteforce(spec, cfg)?;
    let theorem1 = main_term_theorem1(spec, cfg)?;
    let executed = main_term_executed(spec, cfg)?;
    let diagonal = diagonal_term(spec, cfg)?;
    let config = ReportConfig {
        family: spec.clone(),
        moments: *cfg,
    };
    let config_hash = config.hash();
    Ok(MomentReport {
        config,
        brute_force: brute.raw,
        brute_force_coprime: brute.coprime,
        theorem1_main: theorem1,
        executed_main: executed,
        diagonal_main: diagonal,
        relative_gap: (brute.raw.value / executed.value - 1.0).norm(),
        metadata: ReportMetadata {
            runtime_seconds: start.elapsed().as_secs_f64(),
            character_count: brute.character_count,
            moduli: brute.moduli,
            config_hash,
        },
    })
}
