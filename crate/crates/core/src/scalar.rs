//! Exact complex scalars with rational real and imaginary parts.
//!
//! [`GaussianRational`] is the coefficient field for every polynomial in
//! this crate. Arithmetic is exact: components are arbitrary-precision
//! rationals kept in canonical form (positive denominator, reduced).

use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};
use std::str::FromStr;

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};
use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use thiserror::Error;

/// Arbitrary-precision rational, reduced with positive denominator.
pub type Rational = num_rational::BigRational;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ScalarError {
    #[error("division by zero")]
    DivisionByZero,
    #[error("cannot parse {0:?} as a Gaussian rational")]
    Parse(String),
}

/// A complex number `re + im*i` with exact rational components.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Default)]
pub struct GaussianRational {
    re: Rational,
    im: Rational,
}

/// Convenience constructor for `num/den` with machine-integer inputs.
pub fn ratio(num: i64, den: i64) -> Rational {
    Rational::new(BigInt::from(num), BigInt::from(den))
}

impl GaussianRational {
    pub fn new(re: Rational, im: Rational) -> Self {
        GaussianRational { re, im }
    }

    pub fn from_rational(re: Rational) -> Self {
        GaussianRational {
            re,
            im: Rational::zero(),
        }
    }

    pub fn from_int(n: i64) -> Self {
        Self::from_rational(ratio(n, 1))
    }

    /// `(re_num/re_den) + (im_num/im_den) i`.
    pub fn from_parts(re_num: i64, re_den: i64, im_num: i64, im_den: i64) -> Self {
        GaussianRational {
            re: ratio(re_num, re_den),
            im: ratio(im_num, im_den),
        }
    }

    pub fn zero() -> Self {
        Self::default()
    }

    pub fn one() -> Self {
        Self::from_int(1)
    }

    /// The imaginary unit.
    pub fn i() -> Self {
        GaussianRational {
            re: Rational::zero(),
            im: Rational::one(),
        }
    }

    /// `1/(2i) = -i/2`, the prefactor of the Segre-side linear system.
    pub fn inv_two_i() -> Self {
        GaussianRational {
            re: Rational::zero(),
            im: ratio(-1, 2),
        }
    }

    pub fn two_i() -> Self {
        GaussianRational {
            re: Rational::zero(),
            im: ratio(2, 1),
        }
    }

    pub fn re(&self) -> &Rational {
        &self.re
    }

    pub fn im(&self) -> &Rational {
        &self.im
    }

    pub fn is_zero(&self) -> bool {
        self.re.is_zero() && self.im.is_zero()
    }

    pub fn is_one(&self) -> bool {
        self.im.is_zero() && self.re.is_one()
    }

    pub fn is_real(&self) -> bool {
        self.im.is_zero()
    }

    /// Real and strictly positive.
    pub fn is_positive_real(&self) -> bool {
        self.im.is_zero() && self.re.is_positive()
    }

    pub fn conj(&self) -> Self {
        GaussianRational {
            re: self.re.clone(),
            im: -self.im.clone(),
        }
    }

    /// `x * conj(x)` as a rational; always nonnegative.
    pub fn norm_sqr(&self) -> Rational {
        &self.re * &self.re + &self.im * &self.im
    }

    pub fn inv(&self) -> Result<Self, ScalarError> {
        if self.is_zero() {
            return Err(ScalarError::DivisionByZero);
        }
        let n = self.norm_sqr();
        Ok(GaussianRational {
            re: &self.re / &n,
            im: -&self.im / &n,
        })
    }

    pub fn checked_div(&self, rhs: &Self) -> Result<Self, ScalarError> {
        Ok(self * &rhs.inv()?)
    }
}

impl Add for &GaussianRational {
    type Output = GaussianRational;
    fn add(self, rhs: &GaussianRational) -> GaussianRational {
        GaussianRational {
            re: &self.re + &rhs.re,
            im: &self.im + &rhs.im,
        }
    }
}

impl Sub for &GaussianRational {
    type Output = GaussianRational;
    fn sub(self, rhs: &GaussianRational) -> GaussianRational {
        GaussianRational {
            re: &self.re - &rhs.re,
            im: &self.im - &rhs.im,
        }
    }
}

impl Mul for &GaussianRational {
    type Output = GaussianRational;
    fn mul(self, rhs: &GaussianRational) -> GaussianRational {
        GaussianRational {
            re: &self.re * &rhs.re - &self.im * &rhs.im,
            im: &self.re * &rhs.im + &self.im * &rhs.re,
        }
    }
}

impl Neg for &GaussianRational {
    type Output = GaussianRational;
    fn neg(self) -> GaussianRational {
        GaussianRational {
            re: -self.re.clone(),
            im: -self.im.clone(),
        }
    }
}

/// Panics on a zero divisor; use [`GaussianRational::checked_div`] where the
/// divisor is not known to be nonzero.
impl Div for &GaussianRational {
    type Output = GaussianRational;
    fn div(self, rhs: &GaussianRational) -> GaussianRational {
        self.checked_div(rhs).expect("division by zero")
    }
}

macro_rules! forward_owned_binop {
    ($trait:ident, $method:ident) => {
        impl $trait for GaussianRational {
            type Output = GaussianRational;
            fn $method(self, rhs: GaussianRational) -> GaussianRational {
                (&self).$method(&rhs)
            }
        }
        impl $trait<&GaussianRational> for GaussianRational {
            type Output = GaussianRational;
            fn $method(self, rhs: &GaussianRational) -> GaussianRational {
                (&self).$method(rhs)
            }
        }
    };
}

forward_owned_binop!(Add, add);
forward_owned_binop!(Sub, sub);
forward_owned_binop!(Mul, mul);
forward_owned_binop!(Div, div);

impl Neg for GaussianRational {
    type Output = GaussianRational;
    fn neg(self) -> GaussianRational {
        -&self
    }
}

fn fmt_rational(r: &Rational) -> String {
    if r.denom().is_one() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

/// Textual form `a/b+c/d*i`, with integer shorthand and `i`/`-i` for unit
/// imaginary parts. `Display` and `FromStr` round-trip.
impl fmt::Display for GaussianRational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut out = String::new();
        if !self.re.is_zero() {
            out.push_str(&fmt_rational(&self.re));
        }
        if !self.im.is_zero() {
            let mag = self.im.abs();
            let sign = if self.im.is_negative() { "-" } else { "+" };
            if out.is_empty() {
                if self.im.is_negative() {
                    out.push('-');
                }
            } else {
                out.push_str(sign);
            }
            if mag.is_one() {
                out.push('i');
            } else {
                out.push_str(&fmt_rational(&mag));
                out.push_str("*i");
            }
        }
        write!(f, "{out}")
    }
}

fn parse_rational(s: &str) -> Option<Rational> {
    let s = s.trim();
    if s.is_empty() {
        return None;
    }
    match s.split_once('/') {
        Some((n, d)) => {
            let num: BigInt = n.trim().parse().ok()?;
            let den: BigInt = d.trim().parse().ok()?;
            if den.is_zero() {
                return None;
            }
            Some(Rational::new(num, den))
        }
        None => {
            let num: BigInt = s.parse().ok()?;
            Some(Rational::from_integer(num))
        }
    }
}

/// Parses one signed term: either a rational or `[coeff*]i`.
fn parse_term(term: &str) -> Option<(Rational, bool)> {
    let term = term.trim();
    if let Some(body) = term.strip_suffix('i') {
        let body = body.trim();
        let coeff = if body.is_empty() || body == "-" || body == "+" {
            let sign = if body == "-" { -1 } else { 1 };
            ratio(sign, 1)
        } else {
            let body = body.strip_suffix('*').unwrap_or(body);
            parse_rational(body)?
        };
        Some((coeff, true))
    } else {
        Some((parse_rational(term)?, false))
    }
}

impl FromStr for GaussianRational {
    type Err = ScalarError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let err = || ScalarError::Parse(s.to_string());
        let trimmed = s.trim();
        if trimmed.is_empty() {
            return Err(err());
        }
        // Split into at most two signed terms at a top-level +/- that is not
        // a leading sign and not the sign of an exponent-free numerator.
        let bytes = trimmed.as_bytes();
        let mut split = None;
        for (idx, &b) in bytes.iter().enumerate().skip(1) {
            if (b == b'+' || b == b'-') && bytes[idx - 1] != b'/' && bytes[idx - 1] != b'*' {
                split = Some(idx);
            }
        }
        let terms: Vec<&str> = match split {
            Some(idx) => vec![&trimmed[..idx], &trimmed[idx..]],
            None => vec![trimmed],
        };
        let mut re = Rational::zero();
        let mut im = Rational::zero();
        let mut seen_re = false;
        let mut seen_im = false;
        for t in terms {
            let (coeff, is_im) = parse_term(t).ok_or_else(err)?;
            if is_im {
                if seen_im {
                    return Err(err());
                }
                im = coeff;
                seen_im = true;
            } else {
                if seen_re {
                    return Err(err());
                }
                re = coeff;
                seen_re = true;
            }
        }
        Ok(GaussianRational { re, im })
    }
}

impl Serialize for GaussianRational {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for GaussianRational {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        s.parse().map_err(D::Error::custom)
    }
}
