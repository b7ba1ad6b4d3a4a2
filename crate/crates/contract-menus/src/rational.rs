//! Exact rational scalars used throughout the data model.
//!
//! All instance data (probabilities, costs, rewards) and all reference
//! solvers work on `Rational` end to end. Floating point only appears in
//! the optional accelerated LP backend and in human-readable reports.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

pub type Rational = BigRational;

/// `n/d` as an exact rational. Panics on `d == 0`.
pub fn rat(n: i64, d: i64) -> Rational {
    Rational::new(BigInt::from(n), BigInt::from(d))
}

pub fn rat_int(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

pub fn to_f64(x: &Rational) -> f64 {
    x.to_f64().unwrap_or(f64::NAN)
}

/// Bit length of an integer's magnitude; zero is counted as one bit so that
/// every stored numerator/denominator contributes at least one bit.
pub fn bit_length(x: &BigInt) -> u64 {
    if x.is_zero() {
        1
    } else {
        x.bits()
    }
}

/// Bits needed to store a rational: numerator plus denominator magnitude.
pub fn rational_bits(x: &Rational) -> u64 {
    bit_length(x.numer()) + bit_length(x.denom())
}

#[derive(Debug, thiserror::Error, PartialEq, Eq)]
pub enum ParseRationalError {
    #[error("empty rational literal")]
    Empty,
    #[error("malformed rational literal `{0}`")]
    Malformed(String),
    #[error("zero denominator in `{0}`")]
    ZeroDenominator(String),
}

/// Parses a rational from any of the accepted textual forms:
/// `"3/4"`, `"-7"`, `"0.25"`, `"2.5e-3"`. Decimal forms are exact; no
/// float conversion is involved.
pub fn parse_rational(s: &str) -> Result<Rational, ParseRationalError> {
    let s = s.trim();
    if s.is_empty() {
        return Err(ParseRationalError::Empty);
    }
    if let Some((num, den)) = s.split_once('/') {
        let n: BigInt = num
            .trim()
            .parse()
            .map_err(|_| ParseRationalError::Malformed(s.to_string()))?;
        let d: BigInt = den
            .trim()
            .parse()
            .map_err(|_| ParseRationalError::Malformed(s.to_string()))?;
        if d.is_zero() {
            return Err(ParseRationalError::ZeroDenominator(s.to_string()));
        }
        return Ok(Rational::new(n, d));
    }
    parse_decimal(s).ok_or_else(|| ParseRationalError::Malformed(s.to_string()))
}

/// Parses a decimal literal (optionally signed, optional fraction part and
/// exponent) into the exact rational it denotes.
fn parse_decimal(s: &str) -> Option<Rational> {
    let (mantissa, exp) = match s.find(|c| c == 'e' || c == 'E') {
        Some(i) => {
            let e: i64 = s[i + 1..].parse().ok()?;
            (&s[..i], e)
        }
        None => (s, 0i64),
    };
    let (sign, digits) = match mantissa.strip_prefix('-') {
        Some(rest) => (-1, rest),
        None => (1, mantissa.strip_prefix('+').unwrap_or(mantissa)),
    };
    let (int_part, frac_part) = match digits.split_once('.') {
        Some((i, f)) => (i, f),
        None => (digits, ""),
    };
    if int_part.is_empty() && frac_part.is_empty() {
        return None;
    }
    if !int_part.chars().all(|c| c.is_ascii_digit()) || !frac_part.chars().all(|c| c.is_ascii_digit()) {
        return None;
    }
    let joined = format!("{int_part}{frac_part}");
    let n: BigInt = if joined.is_empty() { BigInt::zero() } else { joined.parse().ok()? };
    let scale = exp - frac_part.len() as i64;
    let ten = BigInt::from(10);
    let mut value = Rational::from_integer(n * BigInt::from(sign));
    if scale >= 0 {
        value *= Rational::from_integer(num_traits::pow(ten, scale as usize));
    } else {
        value /= Rational::from_integer(num_traits::pow(ten, (-scale) as usize));
    }
    Some(value)
}

/// Canonical textual form: plain integer when the denominator is one,
/// `num/den` otherwise.
pub fn format_rational(x: &Rational) -> String {
    if x.denom().is_one() {
        x.numer().to_string()
    } else {
        format!("{}/{}", x.numer(), x.denom())
    }
}

/// Floor of the integer square root.
fn isqrt(x: &BigInt) -> BigInt {
    debug_assert!(!x.is_negative());
    x.sqrt()
}

/// Exact square root when `x` is a square of a rational.
pub fn rational_sqrt_exact(x: &Rational) -> Option<Rational> {
    if x.is_negative() {
        return None;
    }
    let sn = isqrt(x.numer());
    let sd = isqrt(x.denom());
    if &(&sn * &sn) == x.numer() && &(&sd * &sd) == x.denom() {
        Some(Rational::new(sn, sd))
    } else {
        None
    }
}

/// Rational upper bound on `sqrt(x)` within `2^-bits`, exact for perfect
/// squares. Used where a construction calls for a square root but the model
/// is rational-only.
pub fn rational_sqrt_upper(x: &Rational, bits: u32) -> Rational {
    if let Some(exact) = rational_sqrt_exact(x) {
        return exact;
    }
    // ceil(sqrt(n * 4^bits / d)) / 2^bits >= sqrt(n/d)
    let shift = BigInt::from(1u8) << (2 * bits as usize);
    let scaled = x.numer() * shift / x.denom();
    let mut root = isqrt(&scaled);
    while &root * &root < scaled {
        root += 1;
    }
    Rational::new(root, BigInt::from(1u8) << bits as usize)
}

/// Sorts and deduplicates a list of rationals in place.
pub fn sort_dedup(values: &mut Vec<Rational>) {
    values.sort();
    values.dedup();
}
