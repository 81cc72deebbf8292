//! Scalar abstraction shared by the exact and floating paths.
//!
//! Everything that only needs field arithmetic (matrix products, Gaussian
//! elimination, Newton's method on affine systems, product matrices) is
//! written against [`Scalar`], which is implemented for `f32`, `f64`,
//! [`BigRational`] and the MPFR-backed [`MpFloat`]. Operations that need
//! transcendental functions or decimal I/O require [`RealScalar`].

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Rem, Sub};
use std::str::FromStr;

use num_bigint::{BigInt, Sign};
use num_rational::BigRational;
use num_traits::{Num, NumRef, One, Signed, ToPrimitive, Zero};
use rug::float::{Constant, Round};
use rug::ops::Pow;
use rug::{Float, Integer};

/// Field arithmetic with an ordering, usable for both exact and rounded
/// computation.
pub trait Scalar:
    Num + NumRef + Clone + PartialOrd + Neg<Output = Self> + fmt::Debug + Send + Sync + 'static
{
    /// Converts an exact rational, rounding to `digits` significant decimal
    /// digits where the type carries a runtime precision.
    fn from_rational(q: &BigRational, digits: u32) -> Self;

    fn from_i64(v: i64, digits: u32) -> Self {
        Self::from_rational(&BigRational::from_integer(BigInt::from(v)), digits)
    }

    fn abs(&self) -> Self;

    /// Relative spacing of representable values near one at this value's
    /// precision; zero for exact types.
    fn rounding_unit(&self) -> Self;

    /// Lossy conversion for diagnostics and thresholds.
    fn to_f64_lossy(&self) -> f64;

    fn is_exact() -> bool {
        false
    }
}

/// Real numbers with elementary functions and decimal round-tripping.
pub trait RealScalar: Scalar {
    fn from_f64(v: f64, digits: u32) -> Self;
    fn pi(digits: u32) -> Self;
    fn sqrt(&self) -> Self;
    fn exp(&self) -> Self;
    fn ln(&self) -> Self;
    fn sin(&self) -> Self;
    fn cos(&self) -> Self;
    fn sinh(&self) -> Self;
    fn powi(&self, n: i32) -> Self;
    /// Decimal digits carried by this value.
    fn digits(&self) -> u32;
    /// Parses a decimal literal (`-1.25e-3`, `0.5`, `3`) at `digits` precision.
    fn parse_decimal(s: &str, digits: u32) -> Option<Self>;
    /// Formats with `sig` significant digits, positional notation for
    /// moderate exponents and scientific otherwise.
    fn to_decimal(&self, sig: usize) -> String;
}

/// Number of mantissa bits needed for `digits` decimal digits plus a small
/// guard.
pub fn digits_to_bits(digits: u32) -> u32 {
    ((digits as f64) * std::f64::consts::LOG2_10).ceil() as u32 + 8
}

fn bits_to_digits(bits: u32) -> u32 {
    ((bits.saturating_sub(8)) as f64 / std::f64::consts::LOG2_10).floor() as u32
}

/// Assembles a decimal string from a digit string `d1 d2 ... dn` meaning
/// `0.d1d2...dn × 10^exp`.
fn assemble_decimal(negative: bool, digits: &str, exp: i64) -> String {
    let digits = digits.trim_end_matches('0');
    if digits.is_empty() {
        return "0".to_string();
    }
    let n = digits.len() as i64;
    let mut out = String::new();
    if negative {
        out.push('-');
    }
    // value = 0.digits × 10^exp; the first digit sits at position 10^(exp-1)
    if exp > 0 && exp <= 40 {
        if exp >= n {
            out.push_str(digits);
            out.extend(std::iter::repeat_n('0', (exp - n) as usize));
        } else {
            out.push_str(&digits[..exp as usize]);
            out.push('.');
            out.push_str(&digits[exp as usize..]);
        }
    } else if exp <= 0 && exp > -20 {
        out.push_str("0.");
        out.extend(std::iter::repeat_n('0', (-exp) as usize));
        out.push_str(digits);
    } else {
        out.push_str(&digits[..1]);
        if n > 1 {
            out.push('.');
            out.push_str(&digits[1..]);
        }
        out.push_str(&format!("e{}", exp - 1));
    }
    out
}

fn rational_to_f64(q: &BigRational) -> f64 {
    q.to_f64().unwrap_or_else(|| {
        // num-rational gives None on overflow of either part
        let n = q.numer().to_f64().unwrap_or(f64::INFINITY);
        let d = q.denom().to_f64().unwrap_or(f64::INFINITY);
        n / d
    })
}

macro_rules! impl_primitive {
    ($t:ty) => {
        impl Scalar for $t {
            fn from_rational(q: &BigRational, _digits: u32) -> Self {
                rational_to_f64(q) as $t
            }
            fn abs(&self) -> Self {
                <$t>::abs(*self)
            }
            fn rounding_unit(&self) -> Self {
                <$t>::EPSILON
            }
            fn to_f64_lossy(&self) -> f64 {
                *self as f64
            }
        }

        impl RealScalar for $t {
            fn from_f64(v: f64, _digits: u32) -> Self {
                v as $t
            }
            fn pi(_digits: u32) -> Self {
                std::f64::consts::PI as $t
            }
            fn sqrt(&self) -> Self {
                <$t>::sqrt(*self)
            }
            fn exp(&self) -> Self {
                <$t>::exp(*self)
            }
            fn ln(&self) -> Self {
                <$t>::ln(*self)
            }
            fn sin(&self) -> Self {
                <$t>::sin(*self)
            }
            fn cos(&self) -> Self {
                <$t>::cos(*self)
            }
            fn sinh(&self) -> Self {
                <$t>::sinh(*self)
            }
            fn powi(&self, n: i32) -> Self {
                <$t>::powi(*self, n)
            }
            fn digits(&self) -> u32 {
                <$t>::DIGITS
            }
            fn parse_decimal(s: &str, _digits: u32) -> Option<Self> {
                s.trim().parse::<$t>().ok()
            }
            fn to_decimal(&self, sig: usize) -> String {
                let sig = sig.clamp(1, <$t>::DIGITS as usize + 2);
                if *self == 0.0 {
                    return "0".to_string();
                }
                let s = format!("{:.*e}", sig - 1, self);
                let (mantissa, exp) = s.split_once('e').expect("scientific format");
                let exp: i64 = exp.parse().expect("exponent");
                let negative = mantissa.starts_with('-');
                let digits: String = mantissa.chars().filter(|c| c.is_ascii_digit()).collect();
                assemble_decimal(negative, &digits, exp + 1)
            }
        }
    };
}

impl_primitive!(f32);
impl_primitive!(f64);

impl Scalar for BigRational {
    fn from_rational(q: &BigRational, _digits: u32) -> Self {
        q.clone()
    }
    fn abs(&self) -> Self {
        Signed::abs(self)
    }
    fn rounding_unit(&self) -> Self {
        BigRational::zero()
    }
    fn to_f64_lossy(&self) -> f64 {
        rational_to_f64(self)
    }
    fn is_exact() -> bool {
        true
    }
}

/// Arbitrary-precision binary float backed by MPFR.
///
/// Binary operations round to the larger of the two operand precisions, so
/// low-precision constants such as [`Zero::zero`] never truncate a
/// working-precision value they are combined with.
#[derive(Clone, PartialEq, PartialOrd)]
pub struct MpFloat(Float);

impl MpFloat {
    /// Precision used by [`Num::from_str_radix`] and other context-free
    /// constructors.
    pub const DEFAULT_BITS: u32 = 256;

    pub fn with_bits(bits: u32, v: f64) -> Self {
        MpFloat(Float::with_val(bits, v))
    }

    pub fn from_float(f: Float) -> Self {
        MpFloat(f)
    }

    pub fn as_float(&self) -> &Float {
        &self.0
    }

    pub fn into_float(self) -> Float {
        self.0
    }

    pub fn bits(&self) -> u32 {
        self.0.prec()
    }

    fn unary(&self, f: impl FnOnce(&Float, u32) -> Float) -> Self {
        MpFloat(f(&self.0, self.0.prec()))
    }
}

fn bigint_to_integer(v: &BigInt) -> Integer {
    let (sign, digits) = v.to_u32_digits();
    let mut out = Integer::from_digits(&digits, rug::integer::Order::Lsf);
    if sign == Sign::Minus {
        out = -out;
    }
    out
}

impl fmt::Debug for MpFloat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.to_decimal(self.digits().max(1) as usize))
    }
}

impl fmt::Display for MpFloat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let sig = f.precision().unwrap_or(self.digits().max(1) as usize);
        f.write_str(&self.to_decimal(sig))
    }
}

macro_rules! mp_binop {
    ($trait:ident, $method:ident) => {
        impl $trait<MpFloat> for MpFloat {
            type Output = MpFloat;
            fn $method(self, rhs: MpFloat) -> MpFloat {
                $trait::$method(self, &rhs)
            }
        }
        impl<'a> $trait<&'a MpFloat> for MpFloat {
            type Output = MpFloat;
            fn $method(self, rhs: &'a MpFloat) -> MpFloat {
                let prec = self.0.prec().max(rhs.0.prec());
                if self.0.prec() == prec {
                    MpFloat($trait::$method(self.0, &rhs.0))
                } else {
                    MpFloat(Float::with_val(prec, $trait::$method(&self.0, &rhs.0)))
                }
            }
        }
        impl<'a> $trait<&'a MpFloat> for &'a MpFloat {
            type Output = MpFloat;
            fn $method(self, rhs: &'a MpFloat) -> MpFloat {
                let prec = self.0.prec().max(rhs.0.prec());
                MpFloat(Float::with_val(prec, $trait::$method(&self.0, &rhs.0)))
            }
        }
        impl<'a> $trait<MpFloat> for &'a MpFloat {
            type Output = MpFloat;
            fn $method(self, rhs: MpFloat) -> MpFloat {
                $trait::$method(self, &rhs)
            }
        }
    };
}

mp_binop!(Add, add);
mp_binop!(Sub, sub);
mp_binop!(Mul, mul);
mp_binop!(Div, div);
mp_binop!(Rem, rem);

impl Neg for MpFloat {
    type Output = MpFloat;
    fn neg(self) -> MpFloat {
        MpFloat(-self.0)
    }
}

impl Zero for MpFloat {
    fn zero() -> Self {
        MpFloat(Float::new(64))
    }
    fn is_zero(&self) -> bool {
        self.0.is_zero()
    }
}

impl One for MpFloat {
    fn one() -> Self {
        MpFloat(Float::with_val(64, 1))
    }
}

impl Num for MpFloat {
    type FromStrRadixErr = rug::float::ParseFloatError;
    fn from_str_radix(s: &str, radix: u32) -> Result<Self, Self::FromStrRadixErr> {
        let parsed = Float::parse_radix(s, radix as i32)?;
        Ok(MpFloat(Float::with_val(Self::DEFAULT_BITS, parsed)))
    }
}

impl FromStr for MpFloat {
    type Err = rug::float::ParseFloatError;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        <MpFloat as Num>::from_str_radix(s, 10)
    }
}

impl Scalar for MpFloat {
    fn from_rational(q: &BigRational, digits: u32) -> Self {
        let r = rug::Rational::from((bigint_to_integer(q.numer()), bigint_to_integer(q.denom())));
        MpFloat(Float::with_val(digits_to_bits(digits), r))
    }
    fn abs(&self) -> Self {
        MpFloat(self.0.clone().abs())
    }
    fn rounding_unit(&self) -> Self {
        let prec = self.0.prec();
        MpFloat(Float::with_val(prec, Float::u_exp(1, 1 - prec as i32)))
    }
    fn to_f64_lossy(&self) -> f64 {
        self.0.to_f64()
    }
}

impl RealScalar for MpFloat {
    fn from_f64(v: f64, digits: u32) -> Self {
        MpFloat(Float::with_val(digits_to_bits(digits), v))
    }
    fn pi(digits: u32) -> Self {
        MpFloat(Float::with_val(digits_to_bits(digits), Constant::Pi))
    }
    fn sqrt(&self) -> Self {
        self.unary(|x, p| Float::with_val(p, x.sqrt_ref()))
    }
    fn exp(&self) -> Self {
        self.unary(|x, p| Float::with_val(p, x.exp_ref()))
    }
    fn ln(&self) -> Self {
        self.unary(|x, p| Float::with_val(p, x.ln_ref()))
    }
    fn sin(&self) -> Self {
        self.unary(|x, p| Float::with_val(p, x.sin_ref()))
    }
    fn cos(&self) -> Self {
        self.unary(|x, p| Float::with_val(p, x.cos_ref()))
    }
    fn sinh(&self) -> Self {
        self.unary(|x, p| Float::with_val(p, x.sinh_ref()))
    }
    fn powi(&self, n: i32) -> Self {
        self.unary(|x, p| Float::with_val(p, x.pow(n)))
    }
    fn digits(&self) -> u32 {
        bits_to_digits(self.0.prec())
    }
    fn parse_decimal(s: &str, digits: u32) -> Option<Self> {
        let parsed = Float::parse(s.trim()).ok()?;
        Some(MpFloat(Float::with_val(digits_to_bits(digits), parsed)))
    }
    fn to_decimal(&self, sig: usize) -> String {
        if !self.0.is_finite() {
            return self.0.to_string();
        }
        if self.0.is_zero() {
            return "0".to_string();
        }
        let (negative, digits, exp) =
            self.0.to_sign_string_exp_round(10, Some(sig.max(1)), Round::Nearest);
        assemble_decimal(negative, &digits, exp.unwrap_or(0) as i64)
    }
}

/// Total order helper for scalars that are never NaN in this crate.
pub fn cmp_abs<T: Scalar>(a: &T, b: &T) -> Ordering {
    a.abs().partial_cmp(&b.abs()).unwrap_or(Ordering::Equal)
}

/// Maximum absolute entry; zero for an empty slice.
pub fn max_abs<T: Scalar>(v: &[T]) -> T {
    v.iter()
        .map(|x| x.abs())
        .fold(T::zero(), |m, x| if x > m { x } else { m })
}

/// Exact rational from a decimal literal such as `-0.125`, `1e-3` or `3/7`.
pub fn parse_rational(s: &str) -> Option<BigRational> {
    let s = s.trim();
    if let Some((n, d)) = s.split_once('/') {
        let n: BigInt = n.trim().parse().ok()?;
        let d: BigInt = d.trim().parse().ok()?;
        if d.is_zero() {
            return None;
        }
        return Some(BigRational::new(n, d));
    }
    let (mantissa, exp) = match s.find(['e', 'E']) {
        Some(i) => (&s[..i], s[i + 1..].parse::<i32>().ok()?),
        None => (s, 0),
    };
    let (negative, mantissa) = match mantissa.strip_prefix('-') {
        Some(m) => (true, m),
        None => (false, mantissa.strip_prefix('+').unwrap_or(mantissa)),
    };
    let (int_part, frac_part) = mantissa.split_once('.').unwrap_or((mantissa, ""));
    if int_part.is_empty() && frac_part.is_empty() {
        return None;
    }
    if !int_part.chars().chain(frac_part.chars()).all(|c| c.is_ascii_digit()) {
        return None;
    }
    let digits = format!("{int_part}{frac_part}");
    let mut numer: BigInt = if digits.is_empty() { BigInt::zero() } else { digits.parse().ok()? };
    if negative {
        numer = -numer;
    }
    let scale = exp - frac_part.len() as i32;
    let ten = BigInt::from(10);
    Some(if scale >= 0 {
        BigRational::from_integer(numer * num_traits::pow(ten, scale as usize))
    } else {
        BigRational::new(numer, num_traits::pow(ten, (-scale) as usize))
    })
}

/// `p/q` rendering of an exact rational (`p` alone for integers).
pub fn format_rational(q: &BigRational) -> String {
    if q.is_integer() {
        q.numer().to_string()
    } else {
        format!("{}/{}", q.numer(), q.denom())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(n: i64, d: i64) -> BigRational {
        BigRational::new(n.into(), d.into())
    }

    #[test]
    fn mixed_precision_keeps_the_wider_operand() {
        let x = MpFloat::from_rational(&q(1, 3), 80);
        let sum = MpFloat::zero() + &x;
        assert_eq!(sum.bits(), x.bits());
        let prod = MpFloat::one() * x.clone();
        assert_eq!(prod, x);
    }

    #[test]
    fn decimal_formatting() {
        let third = MpFloat::from_rational(&q(1, 3), 30);
        assert_eq!(third.to_decimal(5), "0.33333");
        let big = MpFloat::from_rational(&q(8103, 1), 30);
        assert_eq!(big.to_decimal(10), "8103");
        let tiny = MpFloat::from_rational(&q(-3, 1_000_000), 30);
        assert_eq!(tiny.to_decimal(3), "-0.000003");
        assert_eq!((0.484547171441282f64).to_decimal(12), "0.484547171441");
        assert_eq!(1e-30f64.to_decimal(2), "1e-30");
    }

    #[test]
    fn decimal_round_trip_at_precision() {
        let x = MpFloat::from_rational(&q(22, 7), 60).sqrt();
        let s = x.to_decimal(60);
        let back = MpFloat::parse_decimal(&s, 60).unwrap();
        assert_eq!(back.to_decimal(60), s);
    }

    #[test]
    fn rational_parsing() {
        assert_eq!(parse_rational("0.125"), Some(q(1, 8)));
        assert_eq!(parse_rational("-3/6"), Some(q(-1, 2)));
        assert_eq!(parse_rational("2.5e-1"), Some(q(1, 4)));
        assert_eq!(parse_rational("1e2"), Some(q(100, 1)));
        assert_eq!(parse_rational("x"), None);
        assert_eq!(parse_rational("1/0"), None);
        assert_eq!(format_rational(&q(-1, 4)), "-1/4");
    }

    #[test]
    fn exact_conversion_rounds_correctly() {
        let x = MpFloat::from_rational(&q(1, 10), 40);
        let y = MpFloat::parse_decimal("0.1", 40).unwrap();
        assert_eq!(x, y);
        assert!(MpFloat::from_rational(&q(1, 10), 40).rounding_unit() < MpFloat::with_bits(64, 1e-40));
    }
}
