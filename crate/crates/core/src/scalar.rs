//! Exact scalars.
//!
//! A [`Field`] is either the rationals or a prime field GF(p). Rationals keep
//! a machine-word representation while numerator and denominator fit in an
//! `i64` and fall back to arbitrary precision otherwise, so exactness never
//! depends on the size of intermediate values.

use std::fmt;
use std::ops::{Add, AddAssign, Mul, MulAssign, Neg, Sub, SubAssign};

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};

use crate::error::Error;

/// The ground field of a computation.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Field {
    /// Arbitrary-precision rationals.
    Rational,
    /// The prime field with the given modulus.
    Prime(u32),
}

impl Field {
    /// GF(p), rejecting composite or tiny moduli.
    pub fn prime(p: u32) -> Result<Field, Error> {
        if is_prime(p) {
            Ok(Field::Prime(p))
        } else {
            Err(Error::UnsupportedParams(format!("{p} is not prime")))
        }
    }

    /// Characteristic of the field (0 for the rationals).
    pub fn characteristic(self) -> u32 {
        match self {
            Field::Rational => 0,
            Field::Prime(p) => p,
        }
    }

    pub fn zero(self) -> Scalar {
        self.from_i64(0)
    }

    pub fn one(self) -> Scalar {
        self.from_i64(1)
    }

    pub fn from_i64(self, n: i64) -> Scalar {
        match self {
            Field::Rational => Scalar::Q(Rat::from_i128(n as i128, 1)),
            Field::Prime(p) => Scalar::P {
                v: n.rem_euclid(p as i64) as u32,
                p,
            },
        }
    }

    /// The fraction `n / d`; fails when `d` vanishes in the field.
    pub fn ratio(self, n: i64, d: i64) -> Result<Scalar, Error> {
        let d = self.from_i64(d);
        Ok(&self.from_i64(n) * &d.inv()?)
    }

    /// Parses an integer or `p/q` literal.
    pub fn parse(self, text: &str) -> Result<Scalar, String> {
        let text = text.trim();
        let (num, den) = match text.split_once('/') {
            Some((n, d)) => (n.trim(), d.trim()),
            None => (text, "1"),
        };
        let num: BigInt = num
            .parse()
            .map_err(|_| format!("invalid number literal `{text}`"))?;
        let den: BigInt = den
            .parse()
            .map_err(|_| format!("invalid number literal `{text}`"))?;
        if den.is_zero() {
            return Err(format!("zero denominator in `{text}`"));
        }
        match self {
            Field::Rational => Ok(Scalar::Q(Rat::from_big(BigRational::new(num, den)))),
            Field::Prime(p) => {
                let m = BigInt::from(p);
                let n = num.mod_floor(&m).to_i64().unwrap_or(0);
                let d = den.mod_floor(&m).to_i64().unwrap_or(0);
                self.ratio(n, d)
                    .map_err(|_| format!("denominator of `{text}` vanishes mod {p}"))
            }
        }
    }

    pub fn vec_zeros(self, n: usize) -> Vec<Scalar> {
        vec![self.zero(); n]
    }

    pub fn unit_vec(self, n: usize, i: usize) -> Vec<Scalar> {
        let mut v = self.vec_zeros(n);
        v[i] = self.one();
        v
    }
}

impl fmt::Display for Field {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Field::Rational => write!(f, "rationals"),
            Field::Prime(p) => write!(f, "gf:{p}"),
        }
    }
}

/// Trial-division primality test, adequate for 32-bit moduli.
pub fn is_prime(p: u32) -> bool {
    if p < 2 {
        return false;
    }
    let mut d = 2u64;
    while d * d <= p as u64 {
        if (p as u64).is_multiple_of(d) {
            return false;
        }
        d += 1;
    }
    true
}

/// A rational number in lowest terms with positive denominator.
///
/// The `Small` variant is used exactly when both parts fit in an `i64`
/// (excluding `i64::MIN`), which keeps equality and hashing structural.
#[derive(Clone, PartialEq, Eq, Hash)]
pub enum Rat {
    Small(i64, i64),
    Big(Box<BigRational>),
}

fn fits(x: i128) -> bool {
    x > i64::MIN as i128 && x <= i64::MAX as i128
}

impl Rat {
    fn from_i128(n: i128, d: i128) -> Rat {
        debug_assert!(d != 0);
        let g = n.gcd(&d);
        let (mut n, mut d) = if g > 1 { (n / g, d / g) } else { (n, d) };
        if d < 0 {
            n = -n;
            d = -d;
        }
        if fits(n) && fits(d) {
            Rat::Small(n as i64, d as i64)
        } else {
            Rat::Big(Box::new(BigRational::new(BigInt::from(n), BigInt::from(d))))
        }
    }

    fn from_big(r: BigRational) -> Rat {
        match (r.numer().to_i64(), r.denom().to_i64()) {
            (Some(n), Some(d)) if n != i64::MIN && d != i64::MIN => Rat::Small(n, d),
            _ => Rat::Big(Box::new(r)),
        }
    }

    fn to_big(&self) -> BigRational {
        match self {
            Rat::Small(n, d) => BigRational::new_raw(BigInt::from(*n), BigInt::from(*d)),
            Rat::Big(b) => (**b).clone(),
        }
    }

    fn is_zero(&self) -> bool {
        matches!(self, Rat::Small(0, _))
    }

    fn add(&self, o: &Rat) -> Rat {
        match (self, o) {
            (Rat::Small(a, b), Rat::Small(c, d)) => {
                let (a, b, c, d) = (*a as i128, *b as i128, *c as i128, *d as i128);
                if b == d {
                    Rat::from_i128(a + c, b)
                } else {
                    Rat::from_i128(a * d + c * b, b * d)
                }
            }
            _ => Rat::from_big(self.to_big() + o.to_big()),
        }
    }

    fn mul(&self, o: &Rat) -> Rat {
        match (self, o) {
            (Rat::Small(a, b), Rat::Small(c, d)) => {
                Rat::from_i128(*a as i128 * *c as i128, *b as i128 * *d as i128)
            }
            _ => Rat::from_big(self.to_big() * o.to_big()),
        }
    }

    fn neg(&self) -> Rat {
        match self {
            Rat::Small(n, d) => Rat::Small(-n, *d),
            Rat::Big(b) => Rat::from_big(-(**b).clone()),
        }
    }

    fn inv(&self) -> Option<Rat> {
        if self.is_zero() {
            return None;
        }
        Some(match self {
            Rat::Small(n, d) => Rat::from_i128(*d as i128, *n as i128),
            Rat::Big(b) => Rat::from_big(b.recip()),
        })
    }
}

impl fmt::Display for Rat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Rat::Small(n, 1) => write!(f, "{n}"),
            Rat::Small(n, d) => write!(f, "{n}/{d}"),
            Rat::Big(b) if b.denom().is_one() => write!(f, "{}", b.numer()),
            Rat::Big(b) => write!(f, "{}/{}", b.numer(), b.denom()),
        }
    }
}

/// An element of a [`Field`].
///
/// Mixing elements of different fields is a programming error and panics.
#[derive(Clone, PartialEq, Eq, Hash)]
pub enum Scalar {
    Q(Rat),
    P { v: u32, p: u32 },
}

impl Scalar {
    pub fn field(&self) -> Field {
        match self {
            Scalar::Q(_) => Field::Rational,
            Scalar::P { p, .. } => Field::Prime(*p),
        }
    }

    pub fn is_zero(&self) -> bool {
        match self {
            Scalar::Q(r) => r.is_zero(),
            Scalar::P { v, .. } => *v == 0,
        }
    }

    pub fn is_one(&self) -> bool {
        match self {
            Scalar::Q(r) => matches!(r, Rat::Small(1, 1)),
            Scalar::P { v, .. } => *v == 1,
        }
    }

    /// Multiplicative inverse.
    pub fn inv(&self) -> Result<Scalar, Error> {
        match self {
            Scalar::Q(r) => r.inv().map(Scalar::Q).ok_or(Error::DivisionByZero),
            Scalar::P { v, p } => {
                if *v == 0 {
                    Err(Error::DivisionByZero)
                } else {
                    Ok(Scalar::P {
                        v: pow_mod(*v as u64, *p as u64 - 2, *p as u64) as u32,
                        p: *p,
                    })
                }
            }
        }
    }

    /// Sign of a rational (`None` over prime fields).
    pub fn signum(&self) -> Option<i32> {
        match self {
            Scalar::Q(Rat::Small(n, _)) => Some(n.signum() as i32),
            Scalar::Q(Rat::Big(b)) => Some(if b.numer() < &BigInt::zero() { -1 } else { 1 }),
            Scalar::P { .. } => None,
        }
    }

    /// Exact quotient; fails on a zero divisor.
    pub fn div(&self, o: &Scalar) -> Result<Scalar, Error> {
        Ok(self * &o.inv()?)
    }

    /// The value as an `i64` when it is an integer (rationals) or the
    /// canonical representative (prime fields).
    pub fn to_i64(&self) -> Option<i64> {
        match self {
            Scalar::Q(Rat::Small(n, 1)) => Some(*n),
            Scalar::Q(_) => None,
            Scalar::P { v, .. } => Some(*v as i64),
        }
    }
}

fn pow_mod(mut b: u64, mut e: u64, m: u64) -> u64 {
    let mut r = 1u64;
    b %= m;
    while e > 0 {
        if e & 1 == 1 {
            r = r * b % m;
        }
        b = b * b % m;
        e >>= 1;
    }
    r
}

fn mismatch(a: &Scalar, b: &Scalar) -> ! {
    panic!("scalar field mismatch: {} vs {}", a.field(), b.field())
}

impl<'a> Add<&'a Scalar> for &'a Scalar {
    type Output = Scalar;
    fn add(self, o: &Scalar) -> Scalar {
        match (self, o) {
            (Scalar::Q(a), Scalar::Q(b)) => Scalar::Q(a.add(b)),
            (Scalar::P { v: a, p }, Scalar::P { v: b, p: q }) if p == q => Scalar::P {
                v: ((*a as u64 + *b as u64) % *p as u64) as u32,
                p: *p,
            },
            _ => mismatch(self, o),
        }
    }
}

impl<'a> Sub<&'a Scalar> for &'a Scalar {
    type Output = Scalar;
    fn sub(self, o: &Scalar) -> Scalar {
        self + &(-o)
    }
}

impl<'a> Mul<&'a Scalar> for &'a Scalar {
    type Output = Scalar;
    fn mul(self, o: &Scalar) -> Scalar {
        match (self, o) {
            (Scalar::Q(a), Scalar::Q(b)) => Scalar::Q(a.mul(b)),
            (Scalar::P { v: a, p }, Scalar::P { v: b, p: q }) if p == q => Scalar::P {
                v: ((*a as u64 * *b as u64) % *p as u64) as u32,
                p: *p,
            },
            _ => mismatch(self, o),
        }
    }
}

impl Neg for &Scalar {
    type Output = Scalar;
    fn neg(self) -> Scalar {
        match self {
            Scalar::Q(a) => Scalar::Q(a.neg()),
            Scalar::P { v, p } => Scalar::P {
                v: if *v == 0 { 0 } else { p - v },
                p: *p,
            },
        }
    }
}

impl Neg for Scalar {
    type Output = Scalar;
    fn neg(self) -> Scalar {
        -&self
    }
}

impl Add for Scalar {
    type Output = Scalar;
    fn add(self, o: Scalar) -> Scalar {
        &self + &o
    }
}

impl Sub for Scalar {
    type Output = Scalar;
    fn sub(self, o: Scalar) -> Scalar {
        &self - &o
    }
}

impl Mul for Scalar {
    type Output = Scalar;
    fn mul(self, o: Scalar) -> Scalar {
        &self * &o
    }
}

impl AddAssign<&Scalar> for Scalar {
    fn add_assign(&mut self, o: &Scalar) {
        *self = &*self + o;
    }
}

impl SubAssign<&Scalar> for Scalar {
    fn sub_assign(&mut self, o: &Scalar) {
        *self = &*self - o;
    }
}

impl MulAssign<&Scalar> for Scalar {
    fn mul_assign(&mut self, o: &Scalar) {
        *self = &*self * o;
    }
}

impl fmt::Display for Scalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Scalar::Q(r) => write!(f, "{r}"),
            Scalar::P { v, .. } => write!(f, "{v}"),
        }
    }
}

impl fmt::Debug for Scalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl fmt::Debug for Rat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}
