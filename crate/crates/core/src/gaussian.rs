//! Exact arithmetic in the Gaussian integers `Z[i]` and the field `Q(i)`.
//!
//! Both types are arbitrary precision. Canonical unit-class representatives
//! live in the quadrant `re > 0, im >= 0`; every nonzero element has exactly
//! one associate there.

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::str::FromStr;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};

/// An element `re + im·i` of `Z[i]`.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct GaussInt {
    re: BigInt,
    im: BigInt,
}

impl GaussInt {
    pub fn new(re: impl Into<BigInt>, im: impl Into<BigInt>) -> Self {
        GaussInt {
            re: re.into(),
            im: im.into(),
        }
    }

    pub fn zero() -> Self {
        GaussInt::default()
    }

    pub fn one() -> Self {
        GaussInt::new(1, 0)
    }

    pub fn i() -> Self {
        GaussInt::new(0, 1)
    }

    /// The four units `1, i, -1, -i`, in that order.
    pub fn units() -> [GaussInt; 4] {
        [
            GaussInt::new(1, 0),
            GaussInt::new(0, 1),
            GaussInt::new(-1, 0),
            GaussInt::new(0, -1),
        ]
    }

    pub fn re(&self) -> &BigInt {
        &self.re
    }

    pub fn im(&self) -> &BigInt {
        &self.im
    }

    pub fn is_zero(&self) -> bool {
        self.re.is_zero() && self.im.is_zero()
    }

    pub fn is_unit(&self) -> bool {
        self.norm().is_one()
    }

    /// `re² + im²`.
    pub fn norm(&self) -> BigInt {
        &self.re * &self.re + &self.im * &self.im
    }

    pub fn conj(&self) -> GaussInt {
        GaussInt::new(self.re.clone(), -&self.im)
    }

    pub fn scale(&self, k: &BigInt) -> GaussInt {
        GaussInt::new(&self.re * k, &self.im * k)
    }

    /// Both coordinates as machine integers, if they fit.
    pub fn to_xy(&self) -> Option<(i64, i64)> {
        Some((self.re.to_i64()?, self.im.to_i64()?))
    }

    /// Euclidean division with nearest-integer rounding of `a·conj(b)/N(b)`.
    ///
    /// Ties (fractional part exactly one half) round toward negative
    /// infinity, so `norm(r) <= norm(b) / 2` always holds.
    pub fn div_rem(&self, b: &GaussInt) -> Result<(GaussInt, GaussInt)> {
        if b.is_zero() {
            return Err(Error::DivisionByZero);
        }
        let n = b.norm();
        let p = self * &b.conj();
        let q = GaussInt::new(round_half_down(&p.re, &n), round_half_down(&p.im, &n));
        let r = self - &(&q * b);
        Ok((q, r))
    }

    /// Whether `self` divides `a` in `Z[i]`.
    pub fn divides(&self, a: &GaussInt) -> bool {
        if self.is_zero() {
            return a.is_zero();
        }
        let n = self.norm();
        let p = a * &self.conj();
        p.re.is_multiple_of(&n) && p.im.is_multiple_of(&n)
    }

    /// Exact quotient `self / b`, if `b` divides `self`.
    pub fn exact_div(&self, b: &GaussInt) -> Option<GaussInt> {
        let (q, r) = self.div_rem(b).ok()?;
        r.is_zero().then_some(q)
    }

    /// The associate with `re > 0, im >= 0`; zero maps to zero.
    pub fn canonical_associate(&self) -> GaussInt {
        self.canonical_unit().map_or_else(GaussInt::zero, |u| self * &u)
    }

    /// The unit `u` such that `self·u` is canonical (`None` for zero).
    pub fn canonical_unit(&self) -> Option<GaussInt> {
        if self.is_zero() {
            return None;
        }
        GaussInt::units()
            .into_iter()
            .find(|u| (self * u).is_canonical())
    }

    pub fn is_canonical(&self) -> bool {
        self.re.is_positive() && !self.im.is_negative()
    }

    /// Greatest common divisor, normalized to its canonical associate.
    pub fn gcd(&self, other: &GaussInt) -> Result<GaussInt> {
        if self.is_zero() && other.is_zero() {
            return Err(Error::GcdOfZeros);
        }
        let mut a = self.clone();
        let mut b = other.clone();
        while !b.is_zero() {
            let (_, r) = a.div_rem(&b)?;
            a = b;
            b = r;
        }
        Ok(a.canonical_associate())
    }

    /// `t ≡ l (mod r)`, i.e. `r` divides `t - l`.
    pub fn congruent_mod(t: &GaussInt, l: &GaussInt, r: &GaussInt) -> Result<bool> {
        if r.is_zero() {
            return Err(Error::DivisionByZero);
        }
        let (_, rem) = (t - l).div_rem(r)?;
        Ok(rem.is_zero())
    }

    /// Gaussian primality via trial division of the norm.
    pub fn is_gaussian_prime(&self) -> bool {
        let n = self.norm();
        if is_rational_prime(&n) {
            return true;
        }
        if self.re.is_zero() || self.im.is_zero() {
            let p = self.re.abs() + self.im.abs();
            return is_rational_prime(&p) && (&p % 4u32) == BigInt::from(3);
        }
        false
    }

    /// The Gaussian prime of smallest norm with `norm > bound²`.
    ///
    /// Among primes of equal norm the canonical representative of smallest
    /// angle wins (largest real part, then smallest imaginary part).
    pub fn choose_prime_exceeding(bound: &BigInt) -> GaussInt {
        let mut n: BigInt = bound * bound + 1u32;
        loop {
            let mut re = n.sqrt();
            while re.is_positive() {
                let rest: BigInt = &n - &re * &re;
                let im = rest.sqrt();
                if &im * &im == rest {
                    let z = GaussInt::new(re.clone(), im);
                    if z.is_canonical() && z.is_gaussian_prime() {
                        return z;
                    }
                }
                re -= 1u32;
            }
            n += 1u32;
        }
    }

    /// Total order by norm, then by argument in `[0, 2π)`.
    pub fn canonical_cmp(&self, other: &GaussInt) -> Ordering {
        self.norm()
            .cmp(&other.norm())
            .then_with(|| self.angle_cmp(other))
    }

    fn half_plane(&self) -> u8 {
        if self.im.is_positive() || (self.im.is_zero() && !self.re.is_negative()) {
            0
        } else {
            1
        }
    }

    fn angle_cmp(&self, other: &GaussInt) -> Ordering {
        self.half_plane()
            .cmp(&other.half_plane())
            .then_with(|| {
                let cross = &self.re * &other.im - &self.im * &other.re;
                BigInt::zero().cmp(&cross)
            })
    }
}

fn round_half_down(x: &BigInt, n: &BigInt) -> BigInt {
    // ceil((2x - n) / 2n) == -floor((n - 2x) / 2n)
    let two_n: BigInt = n * 2u32;
    let t: BigInt = n - x * 2u32;
    -t.div_floor(&two_n)
}

/// Rational primality by trial division up to the square root.
pub fn is_rational_prime(n: &BigInt) -> bool {
    if let Some(n) = n.to_u64() {
        if n < 2 {
            return false;
        }
        if n % 2 == 0 {
            return n == 2;
        }
        let mut d = 3u64;
        while d.saturating_mul(d) <= n {
            if n % d == 0 {
                return false;
            }
            d += 2;
        }
        return true;
    }
    if n.is_negative() {
        return false;
    }
    if n.is_even() {
        return false;
    }
    let limit = n.sqrt();
    let mut d = BigInt::from(3u32);
    while d <= limit {
        if (n % &d).is_zero() {
            return false;
        }
        d += 2u32;
    }
    true
}

macro_rules! gauss_binop {
    ($trait:ident, $method:ident, |$a:ident, $b:ident| $body:expr) => {
        impl<'a> $trait<&'a GaussInt> for &'a GaussInt {
            type Output = GaussInt;
            fn $method(self, rhs: &'a GaussInt) -> GaussInt {
                let $a = self;
                let $b = rhs;
                $body
            }
        }
        impl $trait for GaussInt {
            type Output = GaussInt;
            fn $method(self, rhs: GaussInt) -> GaussInt {
                (&self).$method(&rhs)
            }
        }
        impl<'a> $trait<&'a GaussInt> for GaussInt {
            type Output = GaussInt;
            fn $method(self, rhs: &'a GaussInt) -> GaussInt {
                (&self).$method(rhs)
            }
        }
    };
}

gauss_binop!(Add, add, |a, b| GaussInt::new(&a.re + &b.re, &a.im + &b.im));
gauss_binop!(Sub, sub, |a, b| GaussInt::new(&a.re - &b.re, &a.im - &b.im));
gauss_binop!(Mul, mul, |a, b| GaussInt::new(
    &a.re * &b.re - &a.im * &b.im,
    &a.re * &b.im + &a.im * &b.re
));

impl Neg for GaussInt {
    type Output = GaussInt;
    fn neg(self) -> GaussInt {
        GaussInt::new(-self.re, -self.im)
    }
}

impl Neg for &GaussInt {
    type Output = GaussInt;
    fn neg(self) -> GaussInt {
        GaussInt::new(-&self.re, -&self.im)
    }
}

impl From<i64> for GaussInt {
    fn from(n: i64) -> Self {
        GaussInt::new(n, 0)
    }
}

impl From<(i64, i64)> for GaussInt {
    fn from((re, im): (i64, i64)) -> Self {
        GaussInt::new(re, im)
    }
}

impl fmt::Display for GaussInt {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let imag = |f: &mut fmt::Formatter<'_>, im: &BigInt| {
            if im.is_one() {
                write!(f, "i")
            } else if *im == -BigInt::one() {
                write!(f, "-i")
            } else {
                write!(f, "{im}i")
            }
        };
        match (self.re.is_zero(), self.im.is_zero()) {
            (_, true) => write!(f, "{}", self.re),
            (true, false) => imag(f, &self.im),
            (false, false) => {
                write!(f, "{}", self.re)?;
                if self.im.is_positive() {
                    write!(f, "+")?;
                }
                imag(f, &self.im)
            }
        }
    }
}

impl fmt::Debug for GaussInt {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

fn parse_signed_int(s: &str, column: usize) -> Result<BigInt> {
    let digits = s.strip_prefix(['+', '-']).unwrap_or(s);
    if digits.is_empty() || !digits.bytes().all(|b| b.is_ascii_digit()) {
        return Err(Error::parse(column, format!("expected an integer, found `{s}`")));
    }
    BigInt::from_str(s.strip_prefix('+').unwrap_or(s))
        .map_err(|e| Error::parse(column, e.to_string()))
}

fn parse_imag(s: &str, column: usize) -> Result<BigInt> {
    let coeff = &s[..s.len() - 1];
    match coeff {
        "" | "+" => Ok(BigInt::one()),
        "-" => Ok(-BigInt::one()),
        c => parse_signed_int(c, column),
    }
}

impl FromStr for GaussInt {
    type Err = Error;

    /// Accepts `a+bi`, `a-bi`, `a`, `bi` (spaces allowed anywhere).
    fn from_str(s: &str) -> Result<Self> {
        let compact: String = s.chars().filter(|c| !c.is_whitespace()).collect();
        if compact.is_empty() {
            return Err(Error::parse(1, "empty Gaussian integer"));
        }
        if !compact.ends_with('i') {
            return Ok(GaussInt::new(parse_signed_int(&compact, 1)?, 0));
        }
        let split = compact
            .char_indices()
            .skip(1)
            .filter(|&(_, c)| c == '+' || c == '-')
            .map(|(k, _)| k)
            .last();
        match split {
            None => Ok(GaussInt::new(0, parse_imag(&compact, 1)?)),
            Some(k) => {
                let re = parse_signed_int(&compact[..k], 1)?;
                let im = parse_imag(&compact[k..], k + 1)?;
                Ok(GaussInt::new(re, im))
            }
        }
    }
}

/// An element of `Q(i)` stored as `num / den` with `den > 0` and the integer
/// gcd of `(num.re, num.im, den)` equal to 1.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct GaussRational {
    num: GaussInt,
    den: BigInt,
}

impl GaussRational {
    pub fn new(num: GaussInt, den: impl Into<BigInt>) -> Result<Self> {
        let den = den.into();
        if den.is_zero() {
            return Err(Error::DivisionByZero);
        }
        Ok(Self::reduced(num, den))
    }

    fn reduced(mut num: GaussInt, mut den: BigInt) -> Self {
        if den.is_negative() {
            den = -den;
            num = -num;
        }
        let g = num.re.gcd(&num.im).gcd(&den);
        if !g.is_one() {
            num = GaussInt::new(&num.re / &g, &num.im / &g);
            den /= &g;
        }
        GaussRational { num, den }
    }

    pub fn zero() -> Self {
        GaussRational::from(GaussInt::zero())
    }

    pub fn one() -> Self {
        GaussRational::from(GaussInt::one())
    }

    pub fn numer(&self) -> &GaussInt {
        &self.num
    }

    pub fn denom(&self) -> &BigInt {
        &self.den
    }

    pub fn is_zero(&self) -> bool {
        self.num.is_zero()
    }

    pub fn is_integral(&self) -> bool {
        self.den.is_one()
    }

    pub fn to_gauss_int(&self) -> Option<GaussInt> {
        self.is_integral().then(|| self.num.clone())
    }

    pub fn conj(&self) -> Self {
        GaussRational {
            num: self.num.conj(),
            den: self.den.clone(),
        }
    }

    pub fn inv(&self) -> Result<Self> {
        if self.is_zero() {
            return Err(Error::DivisionByZero);
        }
        let n = self.num.norm();
        Ok(Self::reduced(self.num.conj().scale(&self.den), n))
    }

    pub fn checked_div(&self, rhs: &Self) -> Result<Self> {
        Ok(self * &rhs.inv()?)
    }

    pub fn scale_int(&self, k: &BigInt) -> Self {
        Self::reduced(self.num.scale(k), self.den.clone())
    }
}

impl From<GaussInt> for GaussRational {
    fn from(num: GaussInt) -> Self {
        GaussRational {
            num,
            den: BigInt::one(),
        }
    }
}

impl From<i64> for GaussRational {
    fn from(n: i64) -> Self {
        GaussRational::from(GaussInt::from(n))
    }
}

macro_rules! rational_binop {
    ($trait:ident, $method:ident, |$a:ident, $b:ident| $body:expr) => {
        impl<'a> $trait<&'a GaussRational> for &'a GaussRational {
            type Output = GaussRational;
            fn $method(self, rhs: &'a GaussRational) -> GaussRational {
                let $a = self;
                let $b = rhs;
                $body
            }
        }
        impl $trait for GaussRational {
            type Output = GaussRational;
            fn $method(self, rhs: GaussRational) -> GaussRational {
                (&self).$method(&rhs)
            }
        }
    };
}

rational_binop!(Add, add, |a, b| GaussRational::reduced(
    a.num.scale(&b.den) + b.num.scale(&a.den),
    &a.den * &b.den
));
rational_binop!(Sub, sub, |a, b| GaussRational::reduced(
    a.num.scale(&b.den) - b.num.scale(&a.den),
    &a.den * &b.den
));
rational_binop!(Mul, mul, |a, b| GaussRational::reduced(
    &a.num * &b.num,
    &a.den * &b.den
));

impl Neg for GaussRational {
    type Output = GaussRational;
    fn neg(self) -> GaussRational {
        GaussRational {
            num: -self.num,
            den: self.den,
        }
    }
}

impl Neg for &GaussRational {
    type Output = GaussRational;
    fn neg(self) -> GaussRational {
        GaussRational {
            num: -&self.num,
            den: self.den.clone(),
        }
    }
}

impl fmt::Display for GaussRational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.den.is_one() {
            write!(f, "{}", self.num)
        } else {
            write!(f, "({})/{}", self.num, self.den)
        }
    }
}

impl fmt::Debug for GaussRational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl FromStr for GaussRational {
    type Err = Error;

    /// Accepts the Gaussian-integer forms, `(a+bi)/d`, and `a/d` for a
    /// purely real or purely imaginary numerator.
    fn from_str(s: &str) -> Result<Self> {
        let Some(slash) = s.rfind('/') else {
            return Ok(GaussRational::from(s.parse::<GaussInt>()?));
        };
        let (head, tail) = (&s[..slash], &s[slash + 1..]);
        let tail_trim = tail.trim();
        if tail_trim.is_empty() || !tail_trim.bytes().all(|b| b.is_ascii_digit()) {
            return Err(Error::parse(
                slash + 2,
                format!("denominator must be a positive integer, found `{tail_trim}`"),
            ));
        }
        let den = BigInt::from_str(tail_trim).map_err(|e| Error::parse(slash + 2, e.to_string()))?;
        if den.is_zero() {
            return Err(Error::parse(slash + 2, "zero denominator"));
        }
        let head_trim = head.trim();
        let num = match head_trim
            .strip_prefix('(')
            .and_then(|h| h.strip_suffix(')'))
        {
            Some(inner) => inner.parse::<GaussInt>().map_err(|e| e.at(1, 2))?,
            None => {
                let z = head_trim.parse::<GaussInt>()?;
                if !z.re.is_zero() && !z.im.is_zero() {
                    return Err(Error::parse(
                        1,
                        "numerator with both parts must be parenthesized, e.g. (1+i)/2",
                    ));
                }
                z
            }
        };
        GaussRational::new(num, den)
    }
}

macro_rules! string_serde {
    ($ty:ty) => {
        impl serde::Serialize for $ty {
            fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
                s.collect_str(self)
            }
        }

        impl<'de> serde::Deserialize<'de> for $ty {
            fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
                let s = String::deserialize(d)?;
                s.parse().map_err(serde::de::Error::custom)
            }
        }
    };
}

string_serde!(GaussInt);
string_serde!(GaussRational);
