//! Exact count ratios.

use core::fmt;

/// A fraction of two counts, kept unreduced so reports can show the raw
/// numerator and denominator next to the decimal value.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Ratio {
    pub numerator: u64,
    pub denominator: u64,
}

impl Ratio {
    pub const fn new(numerator: u64, denominator: u64) -> Self {
        Self { numerator, denominator }
    }

    /// Decimal value, `None` when the denominator is zero.
    pub fn value(&self) -> Option<f64> {
        if self.denominator == 0 {
            None
        } else {
            Some(self.numerator as f64 / self.denominator as f64)
        }
    }

    /// Decimal value, `NaN` when the denominator is zero.
    pub fn to_f64(&self) -> f64 {
        self.value().unwrap_or(f64::NAN)
    }

    /// Exact equality of the represented rational numbers.
    pub fn same_value(&self, other: &Ratio) -> bool {
        (self.numerator as u128) * (other.denominator as u128) == (other.numerator as u128) * (self.denominator as u128)
    }

    /// Sum of two ratios over the same denominator.
    pub fn checked_add(&self, other: &Ratio) -> Option<Ratio> {
        (self.denominator == other.denominator).then(|| Ratio::new(self.numerator + other.numerator, self.denominator))
    }
}

impl fmt::Display for Ratio {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/{}", self.numerator, self.denominator)
    }
}
