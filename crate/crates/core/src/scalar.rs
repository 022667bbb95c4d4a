//! The ordered normed field `k` and its concrete backends.
//!
//! Three backends are provided: exact rationals ([`Rational`]), binary
//! floats (`f64`) and complex numbers stored as a pair of floats
//! ([`Complex64`]). Generic code is written against [`Scalar`]; the
//! dynamically tagged [`ScalarValue`] is used at the configuration boundary.

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::str::FromStr;

use num_bigint::BigInt;
use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Exact rational scalar, always kept in lowest terms.
pub type Rational = BigRational;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Backend {
    Rational,
    Float,
    Complex,
}

impl Backend {
    pub fn name(self) -> &'static str {
        match self {
            Backend::Rational => "rational",
            Backend::Float => "float",
            Backend::Complex => "complex",
        }
    }

    pub fn is_ordered(self) -> bool {
        !matches!(self, Backend::Complex)
    }
}

impl fmt::Display for Backend {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Backend {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "rational" | "exact" => Ok(Backend::Rational),
            "float" | "f64" => Ok(Backend::Float),
            "complex" => Ok(Backend::Complex),
            other => Err(Error::Parse { pos: 0, msg: format!("unknown backend `{other}`") }),
        }
    }
}

/// A field element with an absolute value.
///
/// `norm` lands in [`Scalar::Real`], which is the backend itself for the
/// ordered backends and `f64` for complex numbers.
pub trait Scalar:
    Clone
    + fmt::Debug
    + fmt::Display
    + PartialEq
    + Send
    + Sync
    + 'static
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Neg<Output = Self>
    + Zero
    + One
{
    type Real: RealScalar;

    const BACKEND: Backend;

    fn norm(&self) -> Self::Real;

    /// Field order; fails on backends without a total order.
    fn try_cmp(&self, other: &Self) -> Result<Ordering>;

    fn checked_div(&self, other: &Self) -> Result<Self>;

    fn from_ratio(num: i64, den: i64) -> Self;

    fn from_real(r: Self::Real) -> Self;

    /// Converts a float, failing where the backend cannot hold the value
    /// without rounding it through a transcendental path.
    fn from_f64(x: f64) -> Result<Self>;

    fn to_complex(&self) -> Complex64;

    fn powi(&self, e: i32) -> Result<Self>;

    fn powf(&self, e: f64) -> Result<Self>;

    fn sin(&self) -> Result<Self>;

    fn cos(&self) -> Result<Self>;

    fn exp(&self) -> Result<Self>;

    /// Exact equality for rationals, a relative tolerance for floats.
    fn approx_eq(&self, other: &Self) -> bool;

    fn to_value(&self) -> ScalarValue;

    /// Parses a literal such as `3`, `-3/2`, `0.25` or `1e-3`.
    fn parse_literal(s: &str) -> Result<Self>;

    fn ordered_abs(&self) -> Result<Self> {
        if Self::BACKEND.is_ordered() {
            Ok(Self::from_real(self.norm()))
        } else {
            Err(Error::OrderUnavailable(Self::BACKEND.name()))
        }
    }

    fn from_i64(n: i64) -> Self {
        Self::from_ratio(n, 1)
    }
}

/// Totally ordered scalars. Norm values live here.
pub trait RealScalar: Scalar<Real = Self> + PartialOrd {
    fn to_f64(&self) -> f64;

    fn max_of(self, other: Self) -> Self {
        if other > self {
            other
        } else {
            self
        }
    }
}

/// Relative tolerance used by [`Scalar::approx_eq`] on float backends.
pub const FLOAT_REL_TOL: f64 = 1e-12;

fn float_close(a: f64, b: f64) -> bool {
    if a == b {
        return true;
    }
    let scale = a.abs().max(b.abs()).max(1.0);
    (a - b).abs() <= FLOAT_REL_TOL * scale
}

fn parse_err(pos: usize, msg: impl Into<String>) -> Error {
    Error::Parse { pos, msg: msg.into() }
}

/// Parses `p/q`, an integer, or a decimal with optional exponent into an
/// exact rational.
pub fn parse_rational(s: &str) -> Result<Rational> {
    let t = s.trim();
    if t.is_empty() {
        return Err(parse_err(0, "empty rational literal"));
    }
    if let Some((n, d)) = t.split_once('/') {
        let num = parse_rational(n)?;
        let den = parse_rational(d)?;
        if den.is_zero() {
            return Err(Error::DivisionByZero);
        }
        return Ok(num / den);
    }
    let (negative, body) = match t.as_bytes()[0] {
        b'-' => (true, &t[1..]),
        b'+' => (false, &t[1..]),
        _ => (false, t),
    };
    let (mantissa, exponent) = match body.find(['e', 'E']) {
        Some(i) => {
            let e: i32 = body[i + 1..].parse().map_err(|_| parse_err(i + 1, format!("bad exponent in `{t}`")))?;
            (&body[..i], e)
        }
        None => (body, 0),
    };
    let (int_part, frac_part) = mantissa.split_once('.').unwrap_or((mantissa, ""));
    if int_part.is_empty() && frac_part.is_empty() {
        return Err(parse_err(0, format!("no digits in `{t}`")));
    }
    let digits = format!("{int_part}{frac_part}");
    if let Some(bad) = digits.find(|c: char| !c.is_ascii_digit()) {
        return Err(parse_err(bad, format!("unexpected character in `{t}`")));
    }
    let mantissa = digits.parse::<BigInt>().unwrap_or_default();
    let shift = exponent - frac_part.len() as i32;
    let scale = num_traits::pow::pow(BigInt::from(10), shift.unsigned_abs() as usize);
    let value = if shift >= 0 { Rational::from_integer(mantissa * scale) } else { Rational::new(mantissa, scale) };
    Ok(if negative { -value } else { value })
}

fn parse_float(s: &str) -> Result<f64> {
    let t = s.trim();
    if let Some((n, d)) = t.split_once('/') {
        let num = parse_float(n)?;
        let den = parse_float(d)?;
        return Ok(num / den);
    }
    t.parse::<f64>().map_err(|_| parse_err(0, format!("invalid float literal `{t}`")))
}

impl Scalar for Rational {
    type Real = Rational;

    const BACKEND: Backend = Backend::Rational;

    fn norm(&self) -> Rational {
        Signed::abs(self)
    }

    fn try_cmp(&self, other: &Self) -> Result<Ordering> {
        Ok(self.cmp(other))
    }

    fn checked_div(&self, other: &Self) -> Result<Self> {
        if other.is_zero() {
            Err(Error::DivisionByZero)
        } else {
            Ok(self / other)
        }
    }

    fn from_ratio(num: i64, den: i64) -> Self {
        Rational::new(BigInt::from(num), BigInt::from(den))
    }

    fn from_real(r: Rational) -> Self {
        r
    }

    fn from_f64(x: f64) -> Result<Self> {
        Rational::from_float(x).ok_or_else(|| Error::EvaluationFailure(format!("{x} is not a finite number")))
    }

    fn to_complex(&self) -> Complex64 {
        Complex64::new(RealScalar::to_f64(self), 0.0)
    }

    fn powi(&self, e: i32) -> Result<Self> {
        if e < 0 && self.is_zero() {
            return Err(Error::DivisionByZero);
        }
        Ok(num_traits::Pow::pow(self, e))
    }

    fn powf(&self, e: f64) -> Result<Self> {
        if e.fract() == 0.0 && e.abs() <= i32::MAX as f64 {
            self.powi(e as i32)
        } else {
            Err(Error::EvaluationFailure(format!("non-integer power {e} leaves the rationals; use the float backend")))
        }
    }

    fn sin(&self) -> Result<Self> {
        if self.is_zero() {
            Ok(Rational::zero())
        } else {
            Err(transcendental("sin"))
        }
    }

    fn cos(&self) -> Result<Self> {
        if self.is_zero() {
            Ok(Rational::one())
        } else {
            Err(transcendental("cos"))
        }
    }

    fn exp(&self) -> Result<Self> {
        if self.is_zero() {
            Ok(Rational::one())
        } else {
            Err(transcendental("exp"))
        }
    }

    fn approx_eq(&self, other: &Self) -> bool {
        self == other
    }

    fn to_value(&self) -> ScalarValue {
        ScalarValue::Rational(self.clone())
    }

    fn parse_literal(s: &str) -> Result<Self> {
        parse_rational(s)
    }
}

fn transcendental(name: &str) -> Error {
    Error::EvaluationFailure(format!("{name} is transcendental on the rational backend; use the float backend"))
}

impl RealScalar for Rational {
    fn to_f64(&self) -> f64 {
        ToPrimitive::to_f64(self).unwrap_or(f64::NAN)
    }
}

impl Scalar for f64 {
    type Real = f64;

    const BACKEND: Backend = Backend::Float;

    fn norm(&self) -> f64 {
        f64::abs(*self)
    }

    fn try_cmp(&self, other: &Self) -> Result<Ordering> {
        self.partial_cmp(other).ok_or_else(|| Error::EvaluationFailure("NaN is unordered".into()))
    }

    fn checked_div(&self, other: &Self) -> Result<Self> {
        if *other == 0.0 {
            Err(Error::DivisionByZero)
        } else {
            Ok(self / other)
        }
    }

    fn from_ratio(num: i64, den: i64) -> Self {
        num as f64 / den as f64
    }

    fn from_real(r: f64) -> Self {
        r
    }

    fn from_f64(x: f64) -> Result<Self> {
        Ok(x)
    }

    fn to_complex(&self) -> Complex64 {
        Complex64::new(*self, 0.0)
    }

    fn powi(&self, e: i32) -> Result<Self> {
        Ok(f64::powi(*self, e))
    }

    fn powf(&self, e: f64) -> Result<Self> {
        let r = f64::powf(*self, e);
        if r.is_nan() {
            Err(Error::EvaluationFailure(format!("{self}^{e} is undefined")))
        } else {
            Ok(r)
        }
    }

    fn sin(&self) -> Result<Self> {
        Ok(f64::sin(*self))
    }

    fn cos(&self) -> Result<Self> {
        Ok(f64::cos(*self))
    }

    fn exp(&self) -> Result<Self> {
        Ok(f64::exp(*self))
    }

    fn approx_eq(&self, other: &Self) -> bool {
        float_close(*self, *other)
    }

    fn to_value(&self) -> ScalarValue {
        ScalarValue::Float(*self)
    }

    fn parse_literal(s: &str) -> Result<Self> {
        parse_float(s)
    }
}

impl RealScalar for f64 {
    fn to_f64(&self) -> f64 {
        *self
    }
}

impl Scalar for Complex64 {
    type Real = f64;

    const BACKEND: Backend = Backend::Complex;

    fn norm(&self) -> f64 {
        Complex64::norm(*self)
    }

    fn try_cmp(&self, _other: &Self) -> Result<Ordering> {
        Err(Error::OrderUnavailable(Backend::Complex.name()))
    }

    fn checked_div(&self, other: &Self) -> Result<Self> {
        if other.is_zero() {
            Err(Error::DivisionByZero)
        } else {
            Ok(self / other)
        }
    }

    fn from_ratio(num: i64, den: i64) -> Self {
        Complex64::new(num as f64 / den as f64, 0.0)
    }

    fn from_real(r: f64) -> Self {
        Complex64::new(r, 0.0)
    }

    fn from_f64(x: f64) -> Result<Self> {
        Ok(Complex64::new(x, 0.0))
    }

    fn to_complex(&self) -> Complex64 {
        *self
    }

    fn powi(&self, e: i32) -> Result<Self> {
        Ok(Complex64::powi(self, e))
    }

    fn powf(&self, e: f64) -> Result<Self> {
        Ok(Complex64::powf(*self, e))
    }

    fn sin(&self) -> Result<Self> {
        Ok(Complex64::sin(*self))
    }

    fn cos(&self) -> Result<Self> {
        Ok(Complex64::cos(*self))
    }

    fn exp(&self) -> Result<Self> {
        Ok(Complex64::exp(*self))
    }

    fn approx_eq(&self, other: &Self) -> bool {
        float_close(self.re, other.re) && float_close(self.im, other.im)
    }

    fn to_value(&self) -> ScalarValue {
        ScalarValue::Complex(*self)
    }

    fn parse_literal(s: &str) -> Result<Self> {
        parse_float(s).map(|x| Complex64::new(x, 0.0))
    }
}

/// A scalar tagged with its backend, as read from configuration.
///
/// JSON form: rationals are `"p/q"` strings, floats are decimal strings or
/// numbers, complex values are `{"re": x, "im": y}`.
#[derive(Debug, Clone, PartialEq)]
pub enum ScalarValue {
    Rational(Rational),
    Float(f64),
    Complex(Complex64),
}

impl ScalarValue {
    pub fn backend(&self) -> Backend {
        match self {
            ScalarValue::Rational(_) => Backend::Rational,
            ScalarValue::Float(_) => Backend::Float,
            ScalarValue::Complex(_) => Backend::Complex,
        }
    }

    /// `|s|`; rationals stay exact, complex values yield their modulus.
    pub fn norm(&self) -> ScalarValue {
        match self {
            ScalarValue::Rational(r) => ScalarValue::Rational(Scalar::norm(r)),
            ScalarValue::Float(x) => ScalarValue::Float(x.abs()),
            ScalarValue::Complex(z) => ScalarValue::Float(z.norm()),
        }
    }

    pub fn to_f64(&self) -> f64 {
        match self {
            ScalarValue::Rational(r) => RealScalar::to_f64(r),
            ScalarValue::Float(x) => *x,
            ScalarValue::Complex(z) => z.re,
        }
    }

    pub fn compare(&self, other: &ScalarValue) -> Result<Ordering> {
        match (self, other) {
            (ScalarValue::Complex(_), _) | (_, ScalarValue::Complex(_)) => {
                Err(Error::OrderUnavailable(Backend::Complex.name()))
            }
            (ScalarValue::Rational(a), ScalarValue::Rational(b)) => Ok(a.cmp(b)),
            (ScalarValue::Float(a), ScalarValue::Float(b)) => Scalar::try_cmp(a, b),
            (a, b) => Err(Error::MixedBackends(a.backend().name(), b.backend().name())),
        }
    }
}

/// Compares two scalars under the field order.
pub fn scalar_compare(a: &ScalarValue, b: &ScalarValue) -> Result<Ordering> {
    a.compare(b)
}

/// `|s|` as a nonnegative real.
pub fn scalar_norm(s: &ScalarValue) -> ScalarValue {
    s.norm()
}

impl fmt::Display for ScalarValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ScalarValue::Rational(r) => write!(f, "{r}"),
            ScalarValue::Float(x) => write!(f, "{x}"),
            ScalarValue::Complex(z) => write!(f, "{}{:+}i", z.re, z.im),
        }
    }
}

impl FromStr for ScalarValue {
    type Err = Error;

    /// Strings containing a decimal point or exponent are floats; `p/q` and
    /// plain integers are rationals.
    fn from_str(s: &str) -> Result<Self> {
        let t = s.trim();
        if t.contains(['.', 'e', 'E']) || t.contains("inf") || t.contains("NaN") {
            parse_float(t).map(ScalarValue::Float)
        } else {
            parse_rational(t).map(ScalarValue::Rational)
        }
    }
}

impl Serialize for ScalarValue {
    fn serialize<Ser: serde::Serializer>(&self, ser: Ser) -> std::result::Result<Ser::Ok, Ser::Error> {
        use serde::ser::SerializeMap;
        match self {
            ScalarValue::Rational(r) => ser.serialize_str(&r.to_string()),
            ScalarValue::Float(x) => ser.serialize_f64(*x),
            ScalarValue::Complex(z) => {
                let mut m = ser.serialize_map(Some(2))?;
                m.serialize_entry("re", &z.re)?;
                m.serialize_entry("im", &z.im)?;
                m.end()
            }
        }
    }
}

impl<'de> Deserialize<'de> for ScalarValue {
    fn deserialize<D: serde::Deserializer<'de>>(de: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Raw {
            Text(String),
            Number(f64),
            Pair { re: f64, im: f64 },
        }
        match Raw::deserialize(de)? {
            Raw::Text(s) => s.parse().map_err(serde::de::Error::custom),
            Raw::Number(x) => Ok(ScalarValue::Float(x)),
            Raw::Pair { re, im } => Ok(ScalarValue::Complex(Complex64::new(re, im))),
        }
    }
}

/// Converts a tagged value into a concrete backend.
pub trait FromScalarValue: Sized {
    fn from_value(v: &ScalarValue) -> Result<Self>;
}

impl FromScalarValue for Rational {
    fn from_value(v: &ScalarValue) -> Result<Self> {
        match v {
            ScalarValue::Rational(r) => Ok(r.clone()),
            other => Err(Error::MixedBackends(Backend::Rational.name(), other.backend().name())),
        }
    }
}

impl FromScalarValue for f64 {
    fn from_value(v: &ScalarValue) -> Result<Self> {
        match v {
            ScalarValue::Rational(r) => Ok(RealScalar::to_f64(r)),
            ScalarValue::Float(x) => Ok(*x),
            ScalarValue::Complex(_) => Err(Error::MixedBackends(Backend::Float.name(), Backend::Complex.name())),
        }
    }
}

impl FromScalarValue for Complex64 {
    fn from_value(v: &ScalarValue) -> Result<Self> {
        Ok(match v {
            ScalarValue::Rational(r) => Complex64::new(RealScalar::to_f64(r), 0.0),
            ScalarValue::Float(x) => Complex64::new(*x, 0.0),
            ScalarValue::Complex(z) => *z,
        })
    }
}

/// Units in the last place between two floats.
pub fn ulp_distance(a: f64, b: f64) -> u64 {
    fn key(x: f64) -> i64 {
        let bits = x.to_bits() as i64;
        if bits < 0 {
            i64::MIN - bits
        } else {
            bits
        }
    }
    key(a).abs_diff(key(b))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(s: &str) -> Rational {
        parse_rational(s).unwrap()
    }

    #[test]
    fn norm_examples() {
        assert_eq!(scalar_norm(&ScalarValue::Rational(q("0"))), ScalarValue::Rational(q("0")));
        assert_eq!(scalar_norm(&ScalarValue::Rational(q("-3/2"))), ScalarValue::Rational(q("3/2")));
        let z = ScalarValue::Complex(Complex64::new(0.0, -2.0 / std::f64::consts::PI));
        match scalar_norm(&z) {
            ScalarValue::Float(x) => assert!((x - std::f64::consts::FRAC_2_PI).abs() < 1e-12),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn compare_examples() {
        let half = ScalarValue::Rational(q("1/2"));
        assert_eq!(scalar_compare(&half, &half).unwrap(), Ordering::Equal);
        let zero = ScalarValue::Rational(q("0"));
        let one = ScalarValue::Rational(q("1"));
        assert_eq!(scalar_compare(&zero, &one).unwrap(), Ordering::Less);
        let z = ScalarValue::Complex(Complex64::new(1.0, 1.0));
        assert_eq!(scalar_compare(&z, &z), Err(Error::OrderUnavailable("complex")));
        assert!(Complex64::new(1.0, 0.0).ordered_abs().is_err());
    }

    #[test]
    fn rational_literals() {
        assert_eq!(q("6/4"), Rational::from_ratio(3, 2));
        assert_eq!(q("0.25"), Rational::from_ratio(1, 4));
        assert_eq!(q("-1.5e-1"), Rational::from_ratio(-3, 20));
        assert_eq!(q("2E2"), Rational::from_i64(200));
        assert!(parse_rational("1/0").is_err());
        assert!(parse_rational("x").is_err());
    }

    #[test]
    fn tagged_json() {
        let v: Vec<ScalarValue> = serde_json::from_str(r#"["1/3", "0.5", 2.5, {"re": 1.0, "im": -1.0}]"#).unwrap();
        assert_eq!(v[0], ScalarValue::Rational(q("1/3")));
        assert_eq!(v[1], ScalarValue::Float(0.5));
        assert_eq!(v[2], ScalarValue::Float(2.5));
        assert_eq!(v[3], ScalarValue::Complex(Complex64::new(1.0, -1.0)));
        let back = serde_json::to_string(&v).unwrap();
        assert_eq!(back, r#"["1/3",0.5,2.5,{"re":1.0,"im":-1.0}]"#);
    }

    #[test]
    fn ulps() {
        assert_eq!(ulp_distance(1.0, 1.0), 0);
        assert_eq!(ulp_distance(1.0, f64::from_bits(1.0f64.to_bits() + 3)), 3);
        assert_eq!(ulp_distance(-0.0, 0.0), 0);
    }

    #[test]
    fn rational_rejects_transcendentals() {
        assert!(Rational::from_i64(1).sin().is_err());
        assert_eq!(Rational::zero().cos().unwrap(), Rational::one());
        assert_eq!(Rational::from_ratio(1, 2).powf(2.0).unwrap(), Rational::from_ratio(1, 4));
        assert!(Rational::from_ratio(1, 2).powf(0.5).is_err());
    }
}
