//! Per-sample model outputs.
//!
//! Classification predictions are full probability vectors; the derived
//! quantities are the top class `argmax_k p_k` and the confidence
//! `max_k p_k`. Regression predictions are the raw outputs of the ensemble
//! members, from which mean and population variance derive.

use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// One sample's prediction.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Prediction {
    /// Class probabilities; entries in [0,1] summing to 1 within 1e-6.
    Classification { probs: Vec<f64> },
    /// Raw per-member regression outputs; at least one member.
    Regression { member_values: Vec<f64> },
}

impl Prediction {
    /// Checks the representation invariants.
    pub fn validate(&self) -> Result<()> {
        match self {
            Prediction::Classification { probs } => {
                if probs.is_empty() {
                    return Err(Error::InvalidPrediction {
                        reason: "empty probability vector",
                    });
                }
                let mut sum = 0.0;
                for &p in probs {
                    if !(0.0..=1.0).contains(&p) {
                        return Err(Error::InvalidPrediction {
                            reason: "probability outside [0,1]",
                        });
                    }
                    sum += p;
                }
                if (sum - 1.0).abs() > 1e-6 {
                    return Err(Error::InvalidPrediction {
                        reason: "probabilities do not sum to 1",
                    });
                }
                Ok(())
            }
            Prediction::Regression { member_values } => {
                if member_values.is_empty() {
                    return Err(Error::InvalidPrediction {
                        reason: "no ensemble members",
                    });
                }
                if member_values.iter().any(|v| !v.is_finite()) {
                    return Err(Error::InvalidPrediction {
                        reason: "non-finite member value",
                    });
                }
                Ok(())
            }
        }
    }

    /// `argmax_k p_k`; ties break to the lowest class index.
    pub fn top_class(&self) -> Result<usize> {
        match self {
            Prediction::Classification { probs } => {
                let mut best = 0;
                for (k, &p) in probs.iter().enumerate() {
                    if p > probs[best] {
                        best = k;
                    }
                }
                Ok(best)
            }
            Prediction::Regression { .. } => Err(Error::PolicyMismatch {
                expected: "classification",
                got: "regression",
            }),
        }
    }

    /// `max_k p_k`.
    pub fn confidence(&self) -> Result<f64> {
        let probs = match self {
            Prediction::Classification { probs } => probs,
            Prediction::Regression { .. } => {
                return Err(Error::PolicyMismatch {
                    expected: "classification",
                    got: "regression",
                })
            }
        };
        Ok(probs.iter().copied().fold(f64::NEG_INFINITY, f64::max))
    }

    pub fn n_classes(&self) -> Option<usize> {
        match self {
            Prediction::Classification { probs } => Some(probs.len()),
            Prediction::Regression { .. } => None,
        }
    }

    /// Ensemble mean (regression only).
    pub fn regression_mean(&self) -> Result<f64> {
        let values = self.member_values()?;
        Ok(values.iter().sum::<f64>() / values.len() as f64)
    }

    /// Population variance across members (regression only); 0 for a single
    /// member.
    pub fn regression_variance(&self) -> Result<f64> {
        let values = self.member_values()?;
        let mean = self.regression_mean()?;
        Ok(values.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / values.len() as f64)
    }

    fn member_values(&self) -> Result<&[f64]> {
        match self {
            Prediction::Regression { member_values } if !member_values.is_empty() => {
                Ok(member_values)
            }
            Prediction::Regression { .. } => Err(Error::InvalidPrediction {
                reason: "no ensemble members",
            }),
            Prediction::Classification { .. } => Err(Error::PolicyMismatch {
                expected: "regression",
                got: "classification",
            }),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn class(probs: &[f64]) -> Prediction {
        Prediction::Classification {
            probs: probs.to_vec(),
        }
    }

    #[test]
    fn validate_enforces_probability_invariants() {
        assert!(class(&[0.25, 0.75]).validate().is_ok());
        assert!(class(&[]).validate().is_err());
        assert!(class(&[1.2, -0.2]).validate().is_err());
        assert!(class(&[0.5, 0.4]).validate().is_err());
        assert!(Prediction::Regression {
            member_values: vec![]
        }
        .validate()
        .is_err());
        assert!(Prediction::Regression {
            member_values: vec![1.0, f64::NAN]
        }
        .validate()
        .is_err());
    }

    #[test]
    fn top_class_breaks_ties_to_the_lowest_index() {
        assert_eq!(class(&[0.4, 0.4, 0.2]).top_class().unwrap(), 0);
        assert_eq!(class(&[0.1, 0.2, 0.7]).top_class().unwrap(), 2);
        assert_eq!(class(&[0.7, 0.2, 0.1]).confidence().unwrap(), 0.7);
    }

    #[test]
    fn regression_moments_match_population_formulas() {
        let p = Prediction::Regression {
            member_values: vec![1.0, 3.0],
        };
        assert_eq!(p.regression_mean().unwrap(), 2.0);
        // Population variance of {1, 3} is 1, not the sample variance 2.
        assert_eq!(p.regression_variance().unwrap(), 1.0);

        let single = Prediction::Regression {
            member_values: vec![5.0],
        };
        assert_eq!(single.regression_variance().unwrap(), 0.0);
    }

    #[test]
    fn kind_mismatches_are_errors() {
        let reg = Prediction::Regression {
            member_values: vec![1.0],
        };
        assert!(reg.top_class().is_err());
        assert!(reg.confidence().is_err());
        assert!(class(&[1.0]).regression_mean().is_err());
    }
}
