use std::cmp::Ordering;
use std::fmt;

use serde::{Deserialize, Serialize};

/// An exact, unreduced ratio. Metrics stay exact until display, where they
/// are shown as integer percentages rounded half-up.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Fraction {
    pub numerator: u64,
    pub denominator: u64,
}

impl Fraction {
    /// `None` when `denominator` is zero.
    pub fn new(numerator: u64, denominator: u64) -> Option<Self> {
        (denominator > 0).then_some(Self { numerator, denominator })
    }

    pub fn one() -> Self {
        Self {
            numerator: 1,
            denominator: 1,
        }
    }

    pub fn product(self, other: Fraction) -> Fraction {
        Fraction {
            numerator: self.numerator * other.numerator,
            denominator: self.denominator * other.denominator,
        }
    }

    /// Exact comparison of the values.
    pub fn cmp_value(&self, other: &Fraction) -> Ordering {
        let lhs = self.numerator as u128 * other.denominator as u128;
        let rhs = other.numerator as u128 * self.denominator as u128;
        lhs.cmp(&rhs)
    }

    pub fn same_value(&self, other: &Fraction) -> bool {
        self.cmp_value(other) == Ordering::Equal
    }

    /// Strictly above `percent` percent.
    pub fn exceeds_percent(&self, percent: u32) -> bool {
        self.numerator as u128 * 100 > percent as u128 * self.denominator as u128
    }

    /// At least `ratio`, compared in floating point.
    pub fn at_least(&self, ratio: f64) -> bool {
        self.as_f64() >= ratio
    }

    pub fn as_f64(&self) -> f64 {
        self.numerator as f64 / self.denominator as f64
    }

    pub fn percent(&self) -> f64 {
        100.0 * self.as_f64()
    }

    /// Integer percent, rounded half-up.
    pub fn rounded_percent(&self) -> u64 {
        let n = self.numerator as u128;
        let d = self.denominator as u128;
        ((200 * n + d) / (2 * d)) as u64
    }

    /// `"30% (33/109)"`.
    pub fn display_with_counts(&self) -> String {
        format!("{} ({}/{})", self, self.numerator, self.denominator)
    }
}

impl fmt::Display for Fraction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}%", self.rounded_percent())
    }
}
