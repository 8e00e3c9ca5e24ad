//! The twisted second moment over even primitive characters: brute force,
//! the approximate functional equation, and the closed-form main terms.

mod afe;
mod family;
mod main_term;
mod report;

pub use afe::{afe_residual, s_sum, AfePlan, SSumPlan, DEFAULT_V_TOL};
pub use family::{delta_bruteforce, family_budget, weighted_sweep, BruteForce, SweepReport};
pub use main_term::{
    diagonal_residue_check, diagonal_term, main_term_executed, main_term_theorem1, DiagonalResidueCheck,
};
pub use report::{moment_report, MomentReport, ReportConfig, ReportMetadata};

use std::collections::BTreeMap;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::arith::{EulerProductConfig, FactoredInt};
use crate::error::{Error, Result};
use crate::lfunction::ShiftPair;
use crate::special::PrecisionProfile;
use crate::transforms::{ContourSpec, WeightSpec};

/// Default cap on `Σ φ*(q)` over the family.
pub const DEFAULT_BUDGET: u64 = 50_000_000;

/// One family `q ∈ (Q, 2Q)` with weight `W(q/Q)`, shifts and the twist `(h, k)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FamilySpec {
    pub scale_q: f64,
    pub shifts: ShiftPair,
    pub weight: WeightSpec,
    pub twist_h: FactoredInt,
    pub twist_k: FactoredInt,
}

impl FamilySpec {
    pub fn new(scale_q: f64, shifts: ShiftPair, h: u64, k: u64) -> Result<Self> {
        let spec = Self {
            scale_q,
            shifts,
            weight: WeightSpec::default(),
            twist_h: FactoredInt::new(h)?,
            twist_k: FactoredInt::new(k)?,
        };
        spec.validate()?;
        Ok(spec)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.scale_q >= 2.0) || !self.scale_q.is_finite() {
            return Err(Error::Invalid(format!("Q must be at least 2, got {}", self.scale_q)));
        }
        self.weight.validate()
    }

    /// Copy with a different twist.
    pub fn with_twist(&self, h: u64, k: u64) -> Result<Self> {
        Ok(Self {
            twist_h: FactoredInt::new(h)?,
            twist_k: FactoredInt::new(k)?,
            ..self.clone()
        })
    }

    /// The integers strictly between `Q` and `2Q`, where `W(q/Q)` can be nonzero.
    pub fn moduli(&self) -> Vec<u64> {
        let lo = self.scale_q.floor() as u64 + 1;
        let hi = (2.0 * self.scale_q).ceil() as u64;
        (lo..hi).collect()
    }

    pub fn hk(&self) -> Result<FactoredInt> {
        self.twist_h.mul(&self.twist_k)
    }
}

/// Numerical settings shared by the moment computations.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MomentConfig {
    pub precision: PrecisionProfile,
    pub euler: EulerProductConfig,
    /// Line `Re(s) = ε` for the diagonal integral; `im_cutoff` is a floor for
    /// the adaptive truncation.
    pub diagonal_contour: ContourSpec,
    pub budget: u64,
}

impl Default for MomentConfig {
    fn default() -> Self {
        Self {
            precision: PrecisionProfile::default(),
            euler: EulerProductConfig::default(),
            diagonal_contour: ContourSpec {
                real_part: 0.1,
                im_cutoff: 10.0,
                step: 0.05,
            },
            budget: DEFAULT_BUDGET,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Coefficient {
    pub h: u64,
    #[serde(with = "crate::serde_complex")]
    pub value: Complex64,
}

/// Coefficients `λ_h` of the Dirichlet polynomial `Σ λ_h χ(h)/√h`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CoefficientVector {
    entries: Vec<Coefficient>,
    length_bound: u64,
}

impl CoefficientVector {
    /// Rejects zero or repeated indices and indices above `length_bound`.
    pub fn new(entries: impl IntoIterator<Item = (u64, Complex64)>, length_bound: u64) -> Result<Self> {
        let mut map = BTreeMap::new();
        for (h, value) in entries {
            if h == 0 || h > length_bound {
                return Err(Error::Invalid(format!(
                    "coefficient index {h} outside 1..={length_bound}"
                )));
            }
            if map.insert(h, value).is_some() {
                return Err(Error::Invalid(format!("coefficient index {h} repeated")));
            }
        }
        Ok(Self {
            entries: map.into_iter().map(|(h, value)| Coefficient { h, value }).collect(),
            length_bound,
        })
    }

    pub fn entries(&self) -> &[Coefficient] {
        &self.entries
    }

    pub fn length_bound(&self) -> u64 {
        self.length_bound
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }
}
