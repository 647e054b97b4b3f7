//! Validated lifetime samples.

use crate::error::{Error, Result};

/// A collection of at least two finite, strictly positive lifetimes.
#[derive(Debug, Clone, PartialEq)]
pub struct Sample {
    values: Vec<f64>,
}

impl Sample {
    pub fn new(values: Vec<f64>) -> Result<Self> {
        if values.len() < 2 {
            return Err(Error::InvalidSample {
                label: None,
                reason: format!("need at least 2 observations, got {}", values.len()),
            });
        }
        if let Some((i, v)) = values
            .iter()
            .enumerate()
            .find(|(_, v)| !v.is_finite() || **v <= 0.0)
        {
            return Err(Error::InvalidSample {
                label: None,
                reason: format!("value #{} ({v}) is not a finite positive lifetime", i + 1),
            });
        }
        Ok(Sample { values })
    }

    /// Skips validation. Callers guarantee the invariants (used by the simulation
    /// hot loop where draws are positive by construction).
    pub(crate) fn from_vec_unchecked(values: Vec<f64>) -> Self {
        debug_assert!(values.len() >= 2);
        Sample { values }
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn mean(&self) -> f64 {
        self.values.iter().sum::<f64>() / self.values.len() as f64
    }

    pub fn sorted(&self) -> Vec<f64> {
        let mut s = self.values.clone();
        s.sort_by(f64::total_cmp);
        s
    }

    /// Returns a copy with every value multiplied by `c`.
    pub fn scaled(&self, c: f64) -> Result<Self> {
        Sample::new(self.values.iter().map(|v| v * c).collect())
    }

    pub fn into_values(self) -> Vec<f64> {
        self.values
    }
}

impl TryFrom<Vec<f64>> for Sample {
    type Error = Error;

    fn try_from(values: Vec<f64>) -> Result<Self> {
        Sample::new(values)
    }
}

impl TryFrom<&[f64]> for Sample {
    type Error = Error;

    fn try_from(values: &[f64]) -> Result<Self> {
        Sample::new(values.to_vec())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_short_and_bad_values() {
        assert!(Sample::new(vec![1.0]).is_err());
        assert!(Sample::new(vec![1.0, 0.0]).is_err());
        assert!(Sample::new(vec![1.0, -2.0]).is_err());
        assert!(Sample::new(vec![1.0, f64::NAN]).is_err());
        assert!(Sample::new(vec![1.0, f64::INFINITY]).is_err());
        assert!(Sample::new(vec![1.0, 1.0]).is_ok());
    }

    #[test]
    fn label_is_attached() {
        let err = Sample::new(vec![1.0]).unwrap_err().with_label("y");
        assert!(err.to_string().contains("`y`"));
    }
}
