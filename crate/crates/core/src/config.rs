use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Enumeration and memory limits shared by every module.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default)]
pub struct Limits {
    /// Largest q^m enumerated when summing over the domain of Φ.
    pub enumeration: u64,
    /// Largest q^n for which P is held as a dense coefficient tensor.
    pub dense: u64,
    /// Largest q^n for which supp(P) is checked at every point.
    pub exhaustive_support: u64,
    /// Random outside points used when the support check is sampled.
    pub support_samples: usize,
    /// Largest q^m for which the joint Q(a, x) expansion is attempted.
    pub symbolic_audit: u64,
    /// Term budget for the joint Q(a, x) expansion.
    pub symbolic_terms: usize,
    /// Largest side of a difference matrix.
    pub matrix_dim: u64,
    /// Largest q^(2n) for exhaustive checks of the half-degree split.
    pub split_check: u64,
    /// Largest vertex count for exact maximum free set search.
    pub mis_vertices: u64,
    /// Seed for sampled checks.
    pub seed: u64,
}

impl Default for Limits {
    fn default() -> Self {
        Limits {
            enumeration: 531_441,
            dense: 1 << 20,
            exhaustive_support: 59_049,
            support_samples: 2000,
            symbolic_audit: 64,
            symbolic_terms: 400_000,
            matrix_dim: 4096,
            split_check: 6561,
            mis_vertices: 4096,
            seed: 0,
        }
    }
}

impl Limits {
    pub fn validate(&self) -> Result<()> {
        let all = [
            self.enumeration,
            self.dense,
            self.exhaustive_support,
            self.symbolic_audit,
            self.matrix_dim,
            self.split_check,
            self.mis_vertices,
        ];
        if all.contains(&0) || self.symbolic_terms == 0 {
            return Err(Error::InvalidArgument("all limits must be positive".into()));
        }
        Ok(())
    }
}
