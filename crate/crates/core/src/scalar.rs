//! Scalar fields used by every tensor in the crate.
//!
//! Two implementations exist: [`Q`], an arbitrary-precision rational used for
//! all verdicts, and [`Float`], an `f64` carrying a zero tolerance, used for
//! cross-checks. Generic code is written against [`Field`]; because the two
//! modes are distinct types, a computation can never mix them.

use std::cmp::Ordering;
use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

/// Arithmetic mode tag, as exposed on the command line and in reports.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum Mode {
    Exact,
    Float { tolerance: f64 },
}

impl fmt::Display for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Mode::Exact => f.write_str("exact"),
            Mode::Float { tolerance } => write!(f, "float(tol={tolerance:e})"),
        }
    }
}

/// A commutative field with a decidable (exact or tolerance-based) zero test.
///
/// Arithmetic goes through `&self` methods so exact code does not clone
/// big integers for every product.
pub trait Field: Clone + fmt::Debug + fmt::Display + PartialEq + Send + Sync + 'static {
    /// Exact fields pivot on the first nonzero entry; float fields use partial pivoting.
    const EXACT: bool;

    fn zero() -> Self;
    fn one() -> Self;
    fn from_int(n: i64) -> Self;
    fn from_q(q: &Q) -> Self;

    fn add(&self, other: &Self) -> Self;
    fn sub(&self, other: &Self) -> Self;
    fn mul(&self, other: &Self) -> Self;
    fn neg(&self) -> Self;
    /// Multiplicative inverse; `None` for (numerically) zero values.
    fn inv(&self) -> Option<Self>;

    fn is_zero(&self) -> bool;
    /// Sign as -1, 0 or 1, with zero decided by [`Field::is_zero`].
    fn signum(&self) -> i8;
    /// Square root of a nonnegative value. Exact mode only succeeds on perfect squares.
    fn sqrt(&self) -> Option<Self>;
    fn to_f64(&self) -> f64;
    fn mode(&self) -> Mode;

    fn div(&self, other: &Self) -> Option<Self> {
        other.inv().map(|inv| self.mul(&inv))
    }

    fn is_one(&self) -> bool {
        self.sub(&Self::one()).is_zero()
    }

    fn square(&self) -> Self {
        self.mul(self)
    }

    fn half(&self) -> Self {
        self.mul(&Self::from_q(&Q::ratio(1, 2)))
    }

    fn sum<'a, I>(items: I) -> Self
    where
        I: IntoIterator<Item = &'a Self>,
    {
        items.into_iter().fold(Self::zero(), |acc, x| acc.add(x))
    }

    /// Magnitude used for partial pivoting.
    fn magnitude(&self) -> f64 {
        self.to_f64().abs()
    }
}

/// Exact rational scalar.
///
/// Values whose reduced numerator and denominator fit in `i64` are stored
/// inline and combined in `i128`; anything larger falls back to `BigRational`.
/// The representation is canonical, so derived equality and hashing agree
/// with numeric equality.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Q(Repr);

#[derive(Clone, PartialEq, Eq, Hash)]
enum Repr {
    /// Reduced, denominator positive, numerator never `i64::MIN`.
    Small(i64, i64),
    Big(BigRational),
}

fn small_part(n: i128) -> Option<i64> {
    i64::try_from(n).ok().filter(|&v| v != i64::MIN)
}

impl Q {
    pub fn ratio(num: i64, den: i64) -> Q {
        assert!(den != 0, "zero denominator");
        Q::from_i128(num as i128, den as i128)
    }

    pub fn int(n: i64) -> Q {
        Q::from_i128(n as i128, 1)
    }

    fn from_i128(num: i128, den: i128) -> Q {
        let g = num.gcd(&den);
        let (mut n, mut d) = (num / g, den / g);
        if d < 0 {
            n = -n;
            d = -d;
        }
        match (small_part(n), small_part(d)) {
            (Some(n), Some(d)) => Q(Repr::Small(n, d)),
            _ => Q(Repr::Big(BigRational::new(BigInt::from(n), BigInt::from(d)))),
        }
    }

    fn from_big(r: BigRational) -> Q {
        match (r.numer().to_i64(), r.denom().to_i64()) {
            (Some(n), Some(d)) if n != i64::MIN => Q(Repr::Small(n, d)),
            _ => Q(Repr::Big(r)),
        }
    }

    fn big(&self) -> BigRational {
        match &self.0 {
            Repr::Small(n, d) => BigRational::new_raw(BigInt::from(*n), BigInt::from(*d)),
            Repr::Big(r) => r.clone(),
        }
    }

    pub fn numer(&self) -> BigInt {
        match &self.0 {
            Repr::Small(n, _) => BigInt::from(*n),
            Repr::Big(r) => r.numer().clone(),
        }
    }

    pub fn denom(&self) -> BigInt {
        match &self.0 {
            Repr::Small(_, d) => BigInt::from(*d),
            Repr::Big(r) => r.denom().clone(),
        }
    }

    pub fn abs(&self) -> Q {
        if self.is_negative() {
            self.neg()
        } else {
            self.clone()
        }
    }

    pub fn is_positive(&self) -> bool {
        self.signum() > 0
    }

    pub fn is_negative(&self) -> bool {
        self.signum() < 0
    }

    /// Exact value of a finite binary float.
    pub fn from_f64(x: f64) -> Option<Q> {
        BigRational::from_float(x).map(Q::from_big)
    }

    /// `self^exp` for a nonnegative exponent.
    pub fn pow(&self, exp: u32) -> Q {
        (0..exp).fold(Q::int(1), |acc, _| acc.mul(self))
    }
}

impl Default for Q {
    fn default() -> Q {
        Q::zero()
    }
}

impl PartialOrd for Q {
    fn partial_cmp(&self, other: &Q) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Q {
    fn cmp(&self, other: &Q) -> Ordering {
        match (&self.0, &other.0) {
            (Repr::Small(a, b), Repr::Small(c, d)) => (*a as i128 * *d as i128).cmp(&(*c as i128 * *b as i128)),
            _ => self.big().cmp(&other.big()),
        }
    }
}

impl fmt::Display for Q {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.0 {
            Repr::Small(n, 1) => write!(f, "{n}"),
            Repr::Small(n, d) => write!(f, "{n}/{d}"),
            Repr::Big(r) if r.denom().is_one() => write!(f, "{}", r.numer()),
            Repr::Big(r) => write!(f, "{}/{}", r.numer(), r.denom()),
        }
    }
}

impl fmt::Debug for Q {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl FromStr for Q {
    type Err = Error;

    /// Accepts `"p/q"` and `"n"`; decimals are rejected so no precision is lost.
    fn from_str(s: &str) -> Result<Q> {
        let s = s.trim();
        let bad = || Error::Parse(format!("not a rational literal: {s:?}"));
        let (num, den) = match s.split_once('/') {
            Some((n, d)) => (n.trim(), d.trim()),
            None => (s, "1"),
        };
        let num: BigInt = num.parse().map_err(|_| bad())?;
        let den: BigInt = den.parse().map_err(|_| bad())?;
        if den.is_zero() {
            return Err(Error::Parse(format!("zero denominator in {s:?}")));
        }
        Ok(Q::from_big(BigRational::new(num, den)))
    }
}

impl Serialize for Q {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for Q {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Q, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Raw {
            Text(String),
            Int(i64),
        }
        match Raw::deserialize(deserializer)? {
            Raw::Text(s) => s.parse().map_err(serde::de::Error::custom),
            Raw::Int(n) => Ok(Q::int(n)),
        }
    }
}

fn bigint_sqrt_exact(n: &BigInt) -> Option<BigInt> {
    if n.is_negative() {
        return None;
    }
    let r = n.sqrt();
    (&r * &r == *n).then_some(r)
}

impl Field for Q {
    const EXACT: bool = true;

    fn zero() -> Q {
        Q(Repr::Small(0, 1))
    }
    fn one() -> Q {
        Q(Repr::Small(1, 1))
    }
    fn from_int(n: i64) -> Q {
        Q::int(n)
    }
    fn from_q(q: &Q) -> Q {
        q.clone()
    }
    fn add(&self, other: &Q) -> Q {
        match (&self.0, &other.0) {
            (Repr::Small(0, _), _) => other.clone(),
            (_, Repr::Small(0, _)) => self.clone(),
            (Repr::Small(a, b), Repr::Small(c, d)) if b == d => Q::from_i128(*a as i128 + *c as i128, *b as i128),
            (Repr::Small(a, b), Repr::Small(c, d)) => {
                let (a, b, c, d) = (*a as i128, *b as i128, *c as i128, *d as i128);
                Q::from_i128(a * d + c * b, b * d)
            }
            _ => Q::from_big(self.big() + other.big()),
        }
    }
    fn sub(&self, other: &Q) -> Q {
        self.add(&other.neg())
    }
    fn mul(&self, other: &Q) -> Q {
        match (&self.0, &other.0) {
            (Repr::Small(0, _), _) | (_, Repr::Small(0, _)) => Q::zero(),
            (Repr::Small(a, b), Repr::Small(c, d)) => Q::from_i128(*a as i128 * *c as i128, *b as i128 * *d as i128),
            _ => Q::from_big(self.big() * other.big()),
        }
    }
    fn neg(&self) -> Q {
        match &self.0 {
            Repr::Small(n, d) => Q(Repr::Small(-n, *d)),
            Repr::Big(r) => Q::from_big(-r),
        }
    }
    fn inv(&self) -> Option<Q> {
        match &self.0 {
            Repr::Small(0, _) => None,
            Repr::Small(n, d) => Some(Q::from_i128(*d as i128, *n as i128)),
            Repr::Big(r) => Some(Q::from_big(r.recip())),
        }
    }
    fn is_zero(&self) -> bool {
        matches!(self.0, Repr::Small(0, _))
    }
    fn signum(&self) -> i8 {
        match &self.0 {
            Repr::Small(n, _) => n.signum() as i8,
            Repr::Big(r) if r.is_negative() => -1,
            Repr::Big(r) if r.is_zero() => 0,
            Repr::Big(_) => 1,
        }
    }
    fn sqrt(&self) -> Option<Q> {
        let r = self.big();
        let n = bigint_sqrt_exact(r.numer())?;
        let d = bigint_sqrt_exact(r.denom())?;
        Some(Q::from_big(BigRational::new(n, d)))
    }
    fn to_f64(&self) -> f64 {
        const EXACT_F64: i64 = 1 << 53;
        match &self.0 {
            Repr::Small(n, d) if n.abs() <= EXACT_F64 && *d <= EXACT_F64 => *n as f64 / *d as f64,
            _ => self.big().to_f64().unwrap_or(f64::NAN),
        }
    }
    fn mode(&self) -> Mode {
        Mode::Exact
    }
}

/// Binary float with the tolerance used for zero tests.
///
/// Binary operations keep the larger of the two tolerances, so constants
/// (tolerance 0) inherit the tolerance of the data they touch.
#[derive(Clone, Copy)]
pub struct Float {
    pub value: f64,
    pub tol: f64,
}

impl Float {
    pub const DEFAULT_TOL: f64 = 1e-9;

    pub fn new(value: f64, tol: f64) -> Float {
        Float { value, tol }
    }

    pub fn from_q_tol(q: &Q, tol: f64) -> Float {
        Float::new(q.to_f64(), tol)
    }

    fn with(&self, other: &Float, value: f64) -> Float {
        Float::new(value, self.tol.max(other.tol))
    }
}

impl PartialEq for Float {
    fn eq(&self, other: &Float) -> bool {
        (self.value - other.value).abs() <= self.tol.max(other.tol)
    }
}

impl fmt::Display for Float {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.value)
    }
}

impl fmt::Debug for Float {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.value)
    }
}

impl Serialize for Float {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

impl Field for Float {
    const EXACT: bool = false;

    fn zero() -> Float {
        Float::new(0.0, 0.0)
    }
    fn one() -> Float {
        Float::new(1.0, 0.0)
    }
    fn from_int(n: i64) -> Float {
        Float::new(n as f64, 0.0)
    }
    fn from_q(q: &Q) -> Float {
        Float::new(q.to_f64(), 0.0)
    }
    fn add(&self, other: &Float) -> Float {
        self.with(other, self.value + other.value)
    }
    fn sub(&self, other: &Float) -> Float {
        self.with(other, self.value - other.value)
    }
    fn mul(&self, other: &Float) -> Float {
        self.with(other, self.value * other.value)
    }
    fn neg(&self) -> Float {
        Float::new(-self.value, self.tol)
    }
    fn inv(&self) -> Option<Float> {
        (!self.is_zero()).then(|| Float::new(1.0 / self.value, self.tol))
    }
    fn is_zero(&self) -> bool {
        self.value.abs() <= self.tol
    }
    fn signum(&self) -> i8 {
        if self.is_zero() {
            0
        } else if self.value > 0.0 {
            1
        } else {
            -1
        }
    }
    fn sqrt(&self) -> Option<Float> {
        if self.value < -self.tol {
            None
        } else {
            Some(Float::new(self.value.max(0.0).sqrt(), self.tol))
        }
    }
    fn to_f64(&self) -> f64 {
        self.value
    }
    fn mode(&self) -> Mode {
        Mode::Float { tolerance: self.tol }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_rational_literals() {
        assert_eq!("3".parse::<Q>().unwrap(), Q::int(3));
        assert_eq!("-6/4".parse::<Q>().unwrap(), Q::ratio(-3, 2));
        assert_eq!(" 1 / 7 ".parse::<Q>().unwrap(), Q::ratio(1, 7));
        assert!("0.5".parse::<Q>().is_err());
        assert!("1/0".parse::<Q>().is_err());
        assert!("abc".parse::<Q>().is_err());
    }

    #[test]
    fn display_round_trips() {
        for q in [Q::ratio(-3, 2), Q::int(0), Q::int(17), Q::ratio(22, 7)] {
            assert_eq!(q.to_string().parse::<Q>().unwrap(), q);
        }
        assert_eq!(Q::ratio(4, 2).to_string(), "2");
    }

    #[test]
    fn exact_sqrt_only_on_perfect_squares() {
        assert_eq!(Q::ratio(9, 25).sqrt(), Some(Q::ratio(3, 5)));
        assert_eq!(Q::int(2).sqrt(), None);
        assert_eq!(Q::int(-4).sqrt(), None);
        assert_eq!(Q::zero().sqrt(), Some(Q::zero()));
    }

    #[test]
    fn float_zero_test_uses_tolerance() {
        let x = Float::new(1e-12, 1e-9);
        assert!(x.is_zero());
        assert!(!Float::new(1e-6, 1e-9).is_zero());
        assert_eq!(x.signum(), 0);
        assert!(Float::new(1e-12, 0.0).signum() == 1);
    }

    #[test]
    fn float_tolerance_propagates() {
        let a = Float::new(1.0, 1e-9);
        let b = Float::one();
        assert_eq!(a.add(&b).tol, 1e-9);
        assert_eq!(a.mode(), Mode::Float { tolerance: 1e-9 });
        assert_eq!(Q::one().mode(), Mode::Exact);
    }

    #[test]
    fn serde_accepts_strings_and_integers() {
        let v: Vec<Q> = serde_json::from_str(r#"["1/2", 3, "-4"]"#).unwrap();
        assert_eq!(v, vec![Q::ratio(1, 2), Q::int(3), Q::int(-4)]);
        assert_eq!(serde_json::to_string(&Q::ratio(-1, 3)).unwrap(), "\"-1/3\"");
    }

    #[test]
    fn large_values_overflow_into_big_and_back() {
        let big = Q::int(i64::MAX).mul(&Q::int(i64::MAX));
        assert_eq!(big.numer(), BigInt::from(i64::MAX) * BigInt::from(i64::MAX));
        let back = big.div(&Q::int(i64::MAX)).unwrap();
        assert_eq!(back, Q::int(i64::MAX));
        assert!(matches!(back.0, Repr::Small(..)));
        assert_eq!(Q::int(i64::MIN).neg().to_string(), "9223372036854775808");
        assert_eq!(Q::int(i64::MIN).add(&Q::int(-1)).add(&Q::one()), Q::int(i64::MIN));
    }

    #[test]
    fn ordering_matches_values() {
        let mut v = [
            Q::ratio(1, 2),
            Q::ratio(-3, 4),
            Q::int(2),
            Q::int(i64::MAX).mul(&Q::int(3)),
        ];
        v.sort();
        assert_eq!(v[0], Q::ratio(-3, 4));
        assert_eq!(v[3], Q::int(i64::MAX).mul(&Q::int(3)));
        assert!(Q::ratio(1, 3) < Q::ratio(1, 2));
    }

    #[test]
    fn inverse_of_zero_is_none() {
        assert!(Q::zero().inv().is_none());
        assert!(Float::new(0.0, 1e-9).inv().is_none());
        assert_eq!(Q::ratio(2, 3).inv(), Some(Q::ratio(3, 2)));
    }
}
