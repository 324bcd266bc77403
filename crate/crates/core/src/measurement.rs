//! Projective measurements simulated with the Born rule.

use crate::error::{Error, Result};
use crate::linalg::{check_dim, Basis, StateVector};
use crate::random::RandomStream;

/// One measurement: the basis used, which outcome occurred and the basis
/// vector that was found.
#[derive(Clone, Debug, PartialEq)]
pub struct MeasurementRecord {
    basis: Basis,
    outcome_index: usize,
    measured_vector: StateVector,
}

impl MeasurementRecord {
    pub fn new(basis: Basis, outcome_index: usize) -> Result<Self> {
        if outcome_index >= basis.dim() {
            return Err(Error::OutcomeOutOfRange {
                index: outcome_index,
                dim: basis.dim(),
            });
        }
        let measured_vector = basis.vector(outcome_index);
        Ok(Self {
            basis,
            outcome_index,
            measured_vector,
        })
    }

    pub fn basis(&self) -> &Basis {
        &self.basis
    }

    pub fn outcome_index(&self) -> usize {
        self.outcome_index
    }

    /// `|m_k>`, the phase-canonical column `outcome_index` of the basis.
    pub fn measured_vector(&self) -> &StateVector {
        &self.measured_vector
    }
}

/// Born probabilities `p_j = |<b_j|psi>|^2`.
pub fn outcome_probabilities(psi: &StateVector, basis: &Basis) -> Result<Vec<f64>> {
    basis.overlaps(psi)
}

/// Clips tiny negative rounding and rescales to sum exactly to one.
fn renormalized(mut probs: Vec<f64>) -> Vec<f64> {
    for p in &mut probs {
        *p = p.max(0.0);
    }
    let total: f64 = probs.iter().sum();
    for p in &mut probs {
        *p /= total;
    }
    probs
}

/// Draws one outcome by inverse CDF with a single uniform variate.
pub fn sample_outcome(
    psi: &StateVector,
    basis: &Basis,
    rng: &mut RandomStream,
) -> Result<MeasurementRecord> {
    check_dim(basis.dim(), psi.dim())?;
    let probs = renormalized(outcome_probabilities(psi, basis)?);
    let u = rng.uniform();
    let mut cumulative = 0.0;
    // Falls back to the last outcome with nonzero weight if rounding leaves
    // the cumulative sum a hair below u.
    let mut outcome = probs.iter().rposition(|&p| p > 0.0).unwrap_or(0);
    for (j, &p) in probs.iter().enumerate() {
        cumulative += p;
        if u < cumulative {
            outcome = j;
            break;
        }
    }
    MeasurementRecord::new(basis.clone(), outcome)
}
