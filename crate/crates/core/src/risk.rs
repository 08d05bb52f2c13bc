//! Expected shortfall over scenario-indexed outcomes.
//!
//! Larger outcomes are better here (they are utilities, not losses), so the
//! shortfall is the average of the lower tail: the worst `alpha` share of
//! probability mass, with a fractional share of the boundary outcome.

use thiserror::Error;

use crate::model::TOLERANCE;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum RiskError {
    #[error("alpha {0} must lie in (0, 1]")]
    AlphaRange(f64),
    #[error("probability {0} must be positive and finite")]
    Probability(f64),
    #[error("probabilities sum to {0}, expected 1")]
    ProbabilitySum(f64),
    #[error("distribution is empty")]
    Empty,
    #[error("outcome value {0} is not finite")]
    Value(f64),
}

/// Discrete outcome distribution; entries in any order.
#[derive(Debug, Clone, PartialEq)]
pub struct OutcomeDistribution {
    entries: Vec<(f64, f64)>,
}

impl OutcomeDistribution {
    /// Entries are `(value, probability)`.
    pub fn new(entries: Vec<(f64, f64)>) -> Result<Self, RiskError> {
        if entries.is_empty() {
            return Err(RiskError::Empty);
        }
        let mut total = 0.0;
        for &(v, p) in &entries {
            if !v.is_finite() {
                return Err(RiskError::Value(v));
            }
            if !(p > 0.0) || !p.is_finite() {
                return Err(RiskError::Probability(p));
            }
            total += p;
        }
        if (total - 1.0).abs() > TOLERANCE {
            return Err(RiskError::ProbabilitySum(total));
        }
        Ok(OutcomeDistribution { entries })
    }

    pub fn from_parts(values: &[f64], probabilities: &[f64]) -> Result<Self, RiskError> {
        Self::new(
            values
                .iter()
                .copied()
                .zip(probabilities.iter().copied())
                .collect(),
        )
    }

    pub fn entries(&self) -> &[(f64, f64)] {
        &self.entries
    }

    pub fn mean(&self) -> f64 {
        self.entries.iter().map(|(v, p)| v * p).sum()
    }
}

/// Average of the worst `alpha` share of `dist`.
pub fn expected_shortfall(dist: &OutcomeDistribution, alpha: f64) -> Result<f64, RiskError> {
    if !(alpha > 0.0 && alpha <= 1.0) {
        return Err(RiskError::AlphaRange(alpha));
    }
    let mut sorted = dist.entries.clone();
    // Ties broken on probability so the sum is independent of input order.
    sorted.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.total_cmp(&b.1)));
    if alpha == 1.0 {
        return Ok(sorted.iter().map(|(v, p)| v * p).sum());
    }
    let mut mass = 0.0;
    let mut acc = 0.0;
    for (v, p) in sorted {
        let take = p.min(alpha - mass);
        if take <= 0.0 {
            break;
        }
        acc += take * v;
        mass += take;
    }
    Ok(acc / alpha)
}
