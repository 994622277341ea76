use crate::error::{Error, Result};

/// Working precision and convergence limits, threaded through every numeric routine.
#[derive(Clone, Debug, PartialEq)]
pub struct PrecisionContext {
    pub decimal_digits: u32,
    /// Comparison tolerance for oracle checks and near-pole detection.
    pub tolerance: f64,
    pub max_series_terms: usize,
    pub max_partition_weight: usize,
}

pub const DEFAULT_DIGITS: u32 = 60;
const GUARD_DIGITS: u32 = 15;

impl Default for PrecisionContext {
    fn default() -> Self {
        Self::with_digits(DEFAULT_DIGITS).expect("default digits are valid")
    }
}

impl PrecisionContext {
    pub fn with_digits(decimal_digits: u32) -> Result<Self> {
        if decimal_digits < 30 {
            return Err(Error::Precondition(format!("decimal_digits must be at least 30, got {decimal_digits}")));
        }
        Ok(Self {
            decimal_digits,
            tolerance: 10f64.powi(-(decimal_digits as i32) + 10),
            max_series_terms: 200_000,
            max_partition_weight: 60,
        })
    }

    /// Reads `PT_DIGITS` when set, otherwise the default.
    pub fn from_env() -> Result<Self> {
        match std::env::var("PT_DIGITS") {
            Ok(v) => {
                let d: u32 = v.trim().parse().map_err(|_| Error::Precondition(format!("PT_DIGITS is not an integer: {v}")))?;
                Self::with_digits(d)
            }
            Err(_) => Ok(Self::default()),
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.decimal_digits < 30 {
            return Err(Error::Precondition("decimal_digits must be at least 30".into()));
        }
        if !(self.tolerance > 0.0 && self.tolerance < 1.0) {
            return Err(Error::Precondition("tolerance must lie in (0, 1)".into()));
        }
        Ok(())
    }

    /// Mantissa bits used for every value created under this context.
    pub fn prec(&self) -> u32 {
        (((self.decimal_digits + GUARD_DIGITS) as f64) * std::f64::consts::LOG2_10).ceil() as u32
    }

    /// Relative size below which a series term is treated as negligible.
    pub fn series_eps(&self) -> f64 {
        10f64.powi(-(self.decimal_digits as i32) - 8)
    }

    /// Same context at a different number of digits, other limits kept.
    pub fn rescaled(&self, decimal_digits: u32) -> Self {
        let mut c = self.clone();
        c.decimal_digits = decimal_digits.max(30);
        c.tolerance = 10f64.powi(-(c.decimal_digits as i32) + 10);
        c
    }

    /// Target relative error for oracle paths that only promise half the digits.
    pub fn half_tolerance(&self) -> f64 {
        10f64.powi(-(self.decimal_digits as i32) / 2)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_low_precision() {
        assert!(PrecisionContext::with_digits(20).is_err());
        let c = PrecisionContext::with_digits(40).unwrap();
        assert!(c.validate().is_ok());
        assert!(c.prec() > 40 * 3);
    }

    #[test]
    fn default_is_sixty_digits() {
        let c = PrecisionContext::default();
        assert_eq!(c.decimal_digits, 60);
        assert!(c.tolerance < 1e-49 && c.tolerance > 1e-51);
    }
}
