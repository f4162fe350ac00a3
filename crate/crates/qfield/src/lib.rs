//! Exact arithmetic in real quadratic fields.
//!
//! A [`QuadExpr`] is the number `p + q·√D` with rational `p`, `q`. Every
//! comparison is decided with integer arithmetic only; there is no floating
//! point anywhere in the decision paths.

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};
use std::str::FromStr;

use num_bigint::BigInt;
use num_integer::Roots;
use num_traits::{One, Signed, ToPrimitive, Zero};

mod order;

pub use order::{conductor, OrderKind, OrderSpec};

/// Arbitrary precision rational, always in lowest terms with positive denominator.
pub type Rational = num_rational::BigRational;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum QError {
    #[error("mismatched discriminants {0} and {1}")]
    MismatchedD(u64, u64),
    #[error("division by zero")]
    DivisionByZero,
    #[error("degenerate basis: the basis element has no irrational part")]
    DegenerateBasis,
    #[error("invalid discriminant {0}: must be positive and 0 or 1 mod 4")]
    InvalidDiscriminant(u64),
    #[error("cannot parse quadratic number {input:?}: {reason}")]
    Parse { input: String, reason: String },
    #[error("domain violation: {0}")]
    Domain(String),
}

/// Integer square root when `d` is a perfect square.
pub fn exact_sqrt(d: u64) -> Option<u64> {
    let r = d.sqrt();
    (r * r == d).then_some(r)
}

pub fn check_discriminant(d: u64) -> Result<(), QError> {
    if d == 0 || d % 4 == 2 || d % 4 == 3 {
        return Err(QError::InvalidDiscriminant(d));
    }
    Ok(())
}

/// Fractional part of a rational, in `[0, 1)`.
pub fn frac(r: &Rational) -> Rational {
    r - r.floor()
}

pub fn rat(n: i64, d: i64) -> Rational {
    Rational::new(BigInt::from(n), BigInt::from(d))
}

pub fn rat_int(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

/// The number `p + q√D`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct QuadExpr {
    d: u64,
    p: Rational,
    q: Rational,
}

impl QuadExpr {
    /// Builds `p + q√D`, folding `q√D` into `p` when `D` is a perfect square.
    pub fn new(d: u64, p: Rational, q: Rational) -> Result<Self, QError> {
        check_discriminant(d)?;
        Ok(Self::new_unchecked(d, p, q))
    }

    fn new_unchecked(d: u64, p: Rational, q: Rational) -> Self {
        match exact_sqrt(d) {
            Some(r) if !q.is_zero() => {
                let p = p + q * Rational::from_integer(BigInt::from(r));
                QuadExpr { d, p, q: Rational::zero() }
            }
            _ => QuadExpr { d, p, q },
        }
    }

    pub fn zero(d: u64) -> Self {
        Self::new_unchecked(d, Rational::zero(), Rational::zero())
    }

    pub fn one(d: u64) -> Self {
        Self::from_int(d, 1)
    }

    pub fn from_int(d: u64, n: i64) -> Self {
        Self::new_unchecked(d, rat_int(n), Rational::zero())
    }

    pub fn from_rational(d: u64, r: Rational) -> Self {
        Self::new_unchecked(d, r, Rational::zero())
    }

    /// `√D` itself.
    pub fn sqrt_d(d: u64) -> Self {
        Self::new_unchecked(d, Rational::zero(), Rational::one())
    }

    pub fn d(&self) -> u64 {
        self.d
    }

    /// Rational part.
    pub fn p(&self) -> &Rational {
        &self.p
    }

    /// Coefficient of `√D`.
    pub fn q(&self) -> &Rational {
        &self.q
    }

    pub fn is_zero(&self) -> bool {
        self.p.is_zero() && self.q.is_zero()
    }

    pub fn is_rational(&self) -> bool {
        self.q.is_zero()
    }

    pub fn to_rational(&self) -> Option<Rational> {
        self.is_rational().then(|| self.p.clone())
    }

    /// The Galois conjugate `p − q√D`.
    pub fn conjugate(&self) -> Self {
        QuadExpr { d: self.d, p: self.p.clone(), q: -self.q.clone() }
    }

    /// Field norm `p² − q²D`.
    pub fn norm(&self) -> Rational {
        &self.p * &self.p - &self.q * &self.q * self.d_rat()
    }

    fn d_rat(&self) -> Rational {
        Rational::from_integer(BigInt::from(self.d))
    }

    /// Exact sign of the real number `p + q√D`.
    pub fn sign(&self) -> i8 {
        let sp = rsign(&self.p);
        let sq = rsign(&self.q);
        if sq == 0 {
            return sp;
        }
        if sp == 0 || sp == sq {
            return sq;
        }
        // opposite signs: the larger of |p| and |q|√D wins
        let pp = &self.p * &self.p;
        let qq = &self.q * &self.q * self.d_rat();
        match pp.cmp(&qq) {
            Ordering::Greater => sp,
            Ordering::Less => sq,
            Ordering::Equal => 0,
        }
    }

    pub fn is_positive(&self) -> bool {
        self.sign() > 0
    }

    pub fn is_negative(&self) -> bool {
        self.sign() < 0
    }

    pub fn abs(&self) -> Self {
        if self.is_negative() {
            -self
        } else {
            self.clone()
        }
    }

    fn same_d(&self, other: &Self) -> Result<(), QError> {
        if self.d != other.d {
            return Err(QError::MismatchedD(self.d, other.d));
        }
        Ok(())
    }

    pub fn checked_add(&self, y: &Self) -> Result<Self, QError> {
        self.same_d(y)?;
        Ok(QuadExpr { d: self.d, p: &self.p + &y.p, q: &self.q + &y.q })
    }

    pub fn checked_sub(&self, y: &Self) -> Result<Self, QError> {
        self.same_d(y)?;
        Ok(QuadExpr { d: self.d, p: &self.p - &y.p, q: &self.q - &y.q })
    }

    pub fn checked_mul(&self, y: &Self) -> Result<Self, QError> {
        self.same_d(y)?;
        let p = &self.p * &y.p + &self.q * &y.q * self.d_rat();
        let q = &self.p * &y.q + &self.q * &y.p;
        Ok(QuadExpr { d: self.d, p, q })
    }

    pub fn checked_recip(&self) -> Result<Self, QError> {
        if self.is_zero() {
            return Err(QError::DivisionByZero);
        }
        let n = self.norm();
        Ok(QuadExpr { d: self.d, p: &self.p / &n, q: -(&self.q / &n) })
    }

    pub fn checked_div(&self, y: &Self) -> Result<Self, QError> {
        self.same_d(y)?;
        self.checked_mul(&y.checked_recip()?)
    }

    pub fn scale(&self, r: &Rational) -> Self {
        QuadExpr { d: self.d, p: &self.p * r, q: &self.q * r }
    }

    /// `self / other` when the quotient is rational.
    pub fn rational_ratio(&self, other: &Self) -> Option<Rational> {
        if other.is_zero() {
            return None;
        }
        self.checked_div(other).ok()?.to_rational()
    }

    /// Largest integer not exceeding the value.
    pub fn floor(&self) -> BigInt {
        if self.is_rational() {
            return self.p.floor().to_integer();
        }
        // start from a floating estimate and correct exactly
        let mut n = BigInt::from(self.to_f64().floor() as i64);
        loop {
            let lo = self - &QuadExpr::from_rational(self.d, Rational::from_integer(n.clone()));
            if lo.is_negative() {
                n -= 1;
                continue;
            }
            let hi = &lo - &QuadExpr::one(self.d);
            if !hi.is_negative() {
                n += 1;
                continue;
            }
            return n;
        }
    }

    /// Approximate value, for display only.
    pub fn to_f64(&self) -> f64 {
        let p = self.p.to_f64().unwrap_or(f64::NAN);
        let q = self.q.to_f64().unwrap_or(f64::NAN);
        p + q * (self.d as f64).sqrt()
    }

    /// Parses the text encoding `p+q*sqrt(D)`.
    pub fn parse(s: &str) -> Result<Self, QError> {
        let err = |reason: &str| QError::Parse { input: s.to_string(), reason: reason.to_string() };
        let t: String = s.chars().filter(|c| !c.is_whitespace()).collect();
        let (head, tail) = t.split_once("*sqrt(").ok_or_else(|| err("missing `*sqrt(D)`"))?;
        let d_str = tail.strip_suffix(')').ok_or_else(|| err("missing closing parenthesis"))?;
        let d: u64 = d_str.parse().map_err(|_| err("discriminant is not an integer"))?;
        // the separator is the first '+' that is not a leading sign
        let split = head
            .char_indices()
            .skip(1)
            .find(|&(_, c)| c == '+')
            .map(|(i, _)| i)
            .ok_or_else(|| err("missing `+` between rational and irrational part"))?;
        let p = parse_rational(&head[..split]).ok_or_else(|| err("bad rational part"))?;
        let q = parse_rational(&head[split + 1..]).ok_or_else(|| err("bad coefficient of sqrt"))?;
        QuadExpr::new(d, p, q)
    }
}

fn rsign(r: &Rational) -> i8 {
    if r.is_zero() {
        0
    } else if r.is_positive() {
        1
    } else {
        -1
    }
}

/// Parses `num/den` or a bare integer.
pub fn parse_rational(s: &str) -> Option<Rational> {
    let (n, d) = match s.split_once('/') {
        Some((n, d)) => (n.parse::<BigInt>().ok()?, d.parse::<BigInt>().ok()?),
        None => (s.parse::<BigInt>().ok()?, BigInt::one()),
    };
    if d.is_zero() {
        return None;
    }
    Some(Rational::new(n, d))
}

pub fn format_rational(r: &Rational) -> String {
    format!("{}/{}", r.numer(), r.denom())
}

impl fmt::Display for QuadExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}+{}*sqrt({})", format_rational(&self.p), format_rational(&self.q), self.d)
    }
}

impl FromStr for QuadExpr {
    type Err = QError;
    fn from_str(s: &str) -> Result<Self, QError> {
        QuadExpr::parse(s)
    }
}

impl serde::Serialize for QuadExpr {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> serde::Deserialize<'de> for QuadExpr {
    fn deserialize<De: serde::Deserializer<'de>>(de: De) -> Result<Self, De::Error> {
        let s = String::deserialize(de)?;
        QuadExpr::parse(&s).map_err(serde::de::Error::custom)
    }
}

impl PartialOrd for QuadExpr {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// Total order on values. Panics on mismatched discriminants.
impl Ord for QuadExpr {
    fn cmp(&self, other: &Self) -> Ordering {
        match (self - other).sign() {
            -1 => Ordering::Less,
            0 => Ordering::Equal,
            _ => Ordering::Greater,
        }
    }
}

macro_rules! binop {
    ($tr:ident, $m:ident, $checked:ident) => {
        impl $tr<&QuadExpr> for &QuadExpr {
            type Output = QuadExpr;
            fn $m(self, y: &QuadExpr) -> QuadExpr {
                self.$checked(y).unwrap_or_else(|e| panic!("{e}"))
            }
        }
        impl $tr<QuadExpr> for QuadExpr {
            type Output = QuadExpr;
            fn $m(self, y: QuadExpr) -> QuadExpr {
                (&self).$m(&y)
            }
        }
        impl $tr<&QuadExpr> for QuadExpr {
            type Output = QuadExpr;
            fn $m(self, y: &QuadExpr) -> QuadExpr {
                (&self).$m(y)
            }
        }
        impl $tr<QuadExpr> for &QuadExpr {
            type Output = QuadExpr;
            fn $m(self, y: QuadExpr) -> QuadExpr {
                self.$m(&y)
            }
        }
    };
}

binop!(Add, add, checked_add);
binop!(Sub, sub, checked_sub);
binop!(Mul, mul, checked_mul);
binop!(Div, div, checked_div);

impl Neg for &QuadExpr {
    type Output = QuadExpr;
    fn neg(self) -> QuadExpr {
        QuadExpr { d: self.d, p: -self.p.clone(), q: -self.q.clone() }
    }
}

impl Neg for QuadExpr {
    type Output = QuadExpr;
    fn neg(self) -> QuadExpr {
        QuadExpr { d: self.d, p: -self.p, q: -self.q }
    }
}

/// Writes `x = A + B·ρ` with rational `A`, `B`.
pub fn decompose_wrt(x: &QuadExpr, rho: &QuadExpr) -> Result<(Rational, Rational), QError> {
    x.same_d(rho)?;
    if rho.q.is_zero() {
        return Err(QError::DegenerateBasis);
    }
    let b = &x.q / &rho.q;
    let a = &x.p - &b * &rho.p;
    Ok((a, b))
}

/// Fractional part of the rational component of `x` in the basis `{1, ρ}`.
pub fn fr(x: &QuadExpr, rho: &QuadExpr) -> Result<Rational, QError> {
    let (a, _) = decompose_wrt(x, rho)?;
    Ok(frac(&a))
}
