//! Scalar types the fairness metrics are computed over.
//!
//! Times in the model are integers; metric values are ratios of times. The
//! metrics are generic so the same code yields exact rationals for auditing
//! and plain floats for bulk experiments.

use std::fmt::{Debug, Display};

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{Num, Signed, ToPrimitive, Zero};

/// Exact rational metric value.
pub type Rational = BigRational;

pub trait Scalar:
    Num + Clone + Debug + Display + PartialOrd + ToPrimitive + Send + Sync + 'static
{
    fn from_int(value: u64) -> Self;

    /// `numer / denom`; `denom` must be non-zero.
    fn ratio(numer: u64, denom: u64) -> Self {
        Self::from_int(numer) / Self::from_int(denom)
    }

    /// Equality used for absolute-fairness and RDI checks. Exact types compare
    /// exactly; floats allow a few ulps of accumulated rounding.
    fn same(&self, other: &Self) -> bool {
        self == other
    }

    /// Decimal rendering with `places` fractional digits.
    fn to_decimal(&self, places: usize) -> String {
        format!("{:.*}", places, self.to_f64().unwrap_or(f64::NAN))
    }

    /// Exact textual form for audit columns (`7/18` for rationals).
    fn to_exact_string(&self) -> String {
        self.to_string()
    }

    fn max_of(self, other: Self) -> Self {
        if other > self {
            other
        } else {
            self
        }
    }

    fn min_of(self, other: Self) -> Self {
        if other < self {
            other
        } else {
            self
        }
    }
}

macro_rules! float_scalar {
    ($t:ty, $eps:expr) => {
        impl Scalar for $t {
            fn from_int(value: u64) -> Self {
                value as $t
            }

            fn same(&self, other: &Self) -> bool {
                let scale = self.abs().max(other.abs()).max(1.0);
                (self - other).abs() <= $eps * scale
            }
        }
    };
}

float_scalar!(f64, 1e-12);
float_scalar!(f32, 1e-5);

impl Scalar for BigRational {
    fn from_int(value: u64) -> Self {
        BigRational::from_integer(BigInt::from(value))
    }

    fn to_decimal(&self, places: usize) -> String {
        round_half_even(self, places)
    }
}

/// Renders an exact rational in decimal, rounding half to even at `places`.
fn round_half_even(value: &BigRational, places: usize) -> String {
    let negative = value.is_negative();
    let magnitude = value.abs();
    let scale = BigInt::from(10u32).pow(places as u32);
    let scaled = magnitude.numer() * &scale;
    let denom = magnitude.denom();
    let (mut quotient, remainder) = scaled.div_rem(denom);
    let twice = &remainder * 2u32;
    if twice > *denom || (twice == *denom && quotient.is_odd()) {
        quotient += 1u32;
    }

    let digits = quotient.to_str_radix(10);
    let digits = if digits.len() <= places {
        format!("{}{}", "0".repeat(places + 1 - digits.len()), digits)
    } else {
        digits
    };
    let (int_part, frac_part) = digits.split_at(digits.len() - places);
    let sign = if negative && !quotient.is_zero() {
        "-"
    } else {
        ""
    };
    if places == 0 {
        format!("{sign}{int_part}")
    } else {
        format!("{sign}{int_part}.{frac_part}")
    }
}

/// Parses `a/b`, `a`, or a finite decimal like `0.1364` into an exact rational.
pub fn parse_rational(text: &str) -> Option<BigRational> {
    let text = text.trim();
    if let Some((n, d)) = text.split_once('/') {
        let n: BigInt = n.trim().parse().ok()?;
        let d: BigInt = d.trim().parse().ok()?;
        if d.is_zero() {
            return None;
        }
        return Some(BigRational::new(n, d));
    }
    if let Some((int_part, frac_part)) = text.split_once('.') {
        let negative = int_part.starts_with('-');
        let int_digits = int_part.trim_start_matches('-');
        let all: BigInt = format!("{int_digits}{frac_part}").parse().ok()?;
        let denom = BigInt::from(10u32).pow(frac_part.len() as u32);
        let value = BigRational::new(all, denom);
        return Some(if negative { -value } else { value });
    }
    text.parse::<BigInt>().ok().map(BigRational::from_integer)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(n: i64, d: i64) -> Rational {
        Rational::new(n.into(), d.into())
    }

    #[test]
    fn decimal_rendering_rounds_half_even() {
        assert_eq!(q(3, 22).to_decimal(4), "0.1364");
        assert_eq!(q(7, 18).to_decimal(4), "0.3889");
        assert_eq!(q(1, 8).to_decimal(2), "0.12");
        assert_eq!(q(3, 8).to_decimal(2), "0.38");
        assert_eq!(q(5, 2).to_decimal(0), "2");
        assert_eq!(q(-3, 8).to_decimal(2), "-0.38");
        assert_eq!(q(11, 20).to_decimal(4), "0.5500");
        assert_eq!(q(1, 1000).to_decimal(2), "0.00");
    }

    #[test]
    fn parse_forms() {
        assert_eq!(parse_rational("7/18"), Some(q(7, 18)));
        assert_eq!(parse_rational("0.55"), Some(q(11, 20)));
        assert_eq!(parse_rational("3"), Some(q(3, 1)));
        assert_eq!(parse_rational("1/0"), None);
        assert_eq!(parse_rational("abc"), None);
    }

    #[test]
    fn float_tolerant_equality() {
        let a = 0.1 + 0.2;
        assert!(a.same(&0.3));
        assert!(!0.3f64.same(&0.31));
        assert!(!q(1, 3).same(&q(333, 1000)));
    }
}
