//! Exact scalars and coordinate vectors.
//!
//! Every coordinate in the crate is a [`Rat`] (arbitrary precision, always in
//! lowest terms with a positive denominator). Floats only appear at the output
//! boundary.

use std::fmt;
use std::ops::{Add, Deref, Index, Mul, Neg, Sub};

use num::bigint::BigInt;
use num::rational::BigRational;
use num::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};

pub type Rat = BigRational;

pub fn int(n: i64) -> Rat {
    Rat::from_integer(BigInt::from(n))
}

pub fn rat(num: i64, den: i64) -> Rat {
    Rat::new(BigInt::from(num), BigInt::from(den))
}

pub fn to_f64(x: &Rat) -> f64 {
    x.to_f64().unwrap_or(f64::NAN)
}

/// Canonical text form: `p` for integers, `p/q` otherwise.
pub fn fmt_rat(x: &Rat) -> String {
    if x.denom().is_one() {
        x.numer().to_string()
    } else {
        format!("{}/{}", x.numer(), x.denom())
    }
}

/// Parses `"p"`, `"p/q"` or a finite decimal such as `"0.25"`.
pub fn parse_rat(s: &str) -> Result<Rat> {
    let s = s.trim();
    let bad = || Error::Parse(format!("not a rational number: {s:?}"));
    if let Some((n, d)) = s.split_once('/') {
        let n: BigInt = n.trim().parse().map_err(|_| bad())?;
        let d: BigInt = d.trim().parse().map_err(|_| bad())?;
        if d.is_zero() {
            return Err(bad());
        }
        return Ok(Rat::new(n, d));
    }
    if let Some((ip, fp)) = s.split_once('.') {
        let neg = ip.trim_start().starts_with('-');
        let digits = format!("{}{}", ip.trim_start_matches(['-', '+']), fp);
        if digits.is_empty() || !digits.chars().all(|c| c.is_ascii_digit()) {
            return Err(bad());
        }
        let n: BigInt = digits.parse().map_err(|_| bad())?;
        let d = num::pow(BigInt::from(10), fp.len());
        let r = Rat::new(n, d);
        return Ok(if neg { -r } else { r });
    }
    let n: BigInt = s.parse().map_err(|_| bad())?;
    Ok(Rat::from_integer(n))
}

pub fn floor(x: &Rat) -> BigInt {
    x.floor().to_integer()
}

pub fn ceil(x: &Rat) -> BigInt {
    x.ceil().to_integer()
}

/// Smallest rational of the form `m / 2^32` that is `>= sqrt(x)`, or the exact
/// root when `x` is the square of a rational.
pub fn sqrt_upper(x: &Rat) -> Rat {
    assert!(!x.is_negative(), "sqrt of negative rational");
    let (n, d) = (x.numer().clone(), x.denom().clone());
    let (rn, rd) = (n.sqrt(), d.sqrt());
    if &rn * &rn == n && &rd * &rd == d {
        return Rat::new(rn, rd);
    }
    // sqrt(n/d) = sqrt(n*d)/d
    let scale = BigInt::one() << 32u32;
    let nd = &n * &d * &scale * &scale;
    let r = nd.sqrt();
    let r = if &r * &r == nd { r } else { r + 1 };
    Rat::new(r, d * scale)
}

/// Real number extended by the two infinities. Used for Legendre-type
/// transforms that legitimately leave the finite range.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum ExtRat {
    NegInf,
    Finite(Rat),
    PosInf,
}

impl ExtRat {
    pub fn finite(&self) -> Option<&Rat> {
        match self {
            ExtRat::Finite(r) => Some(r),
            _ => None,
        }
    }
}

impl fmt::Display for ExtRat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ExtRat::NegInf => write!(f, "-inf"),
            ExtRat::PosInf => write!(f, "+inf"),
            ExtRat::Finite(r) => write!(f, "{}", fmt_rat(r)),
        }
    }
}

/// A point of `Q^n`. Ordering is lexicographic.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct QVec(pub Vec<Rat>);

impl QVec {
    pub fn zeros(n: usize) -> Self {
        QVec(vec![Rat::zero(); n])
    }

    pub fn from_ints(xs: &[i64]) -> Self {
        QVec(xs.iter().map(|&x| int(x)).collect())
    }

    pub fn from_rats(xs: &[(i64, i64)]) -> Self {
        QVec(xs.iter().map(|&(n, d)| rat(n, d)).collect())
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn dot(&self, other: &[Rat]) -> Rat {
        debug_assert_eq!(self.0.len(), other.len());
        self.0
            .iter()
            .zip(other)
            .fold(Rat::zero(), |acc, (a, b)| acc + a * b)
    }

    pub fn scaled(&self, t: &Rat) -> QVec {
        QVec(self.0.iter().map(|x| x * t).collect())
    }

    pub fn norm_sq(&self) -> Rat {
        self.dot(&self.0)
    }

    pub fn is_integral(&self) -> bool {
        self.0.iter().all(|x| x.is_integer())
    }

    pub fn to_f64(&self) -> Vec<f64> {
        self.0.iter().map(to_f64).collect()
    }

    /// Integer coordinates, if all coordinates are integers fitting in `i64`.
    pub fn to_i64(&self) -> Option<Vec<i64>> {
        self.0
            .iter()
            .map(|x| if x.is_integer() { x.to_integer().to_i64() } else { None })
            .collect()
    }
}

impl Deref for QVec {
    type Target = [Rat];
    fn deref(&self) -> &[Rat] {
        &self.0
    }
}

impl Index<usize> for QVec {
    type Output = Rat;
    fn index(&self, i: usize) -> &Rat {
        &self.0[i]
    }
}

impl From<Vec<Rat>> for QVec {
    fn from(v: Vec<Rat>) -> Self {
        QVec(v)
    }
}

impl<'a> Add<&'a QVec> for &'a QVec {
    type Output = QVec;
    fn add(self, rhs: &QVec) -> QVec {
        QVec(self.0.iter().zip(&rhs.0).map(|(a, b)| a + b).collect())
    }
}

impl<'a> Sub<&'a QVec> for &'a QVec {
    type Output = QVec;
    fn sub(self, rhs: &QVec) -> QVec {
        QVec(self.0.iter().zip(&rhs.0).map(|(a, b)| a - b).collect())
    }
}

impl<'a> Mul<&'a Rat> for &'a QVec {
    type Output = QVec;
    fn mul(self, rhs: &Rat) -> QVec {
        self.scaled(rhs)
    }
}

impl Neg for &QVec {
    type Output = QVec;
    fn neg(self) -> QVec {
        QVec(self.0.iter().map(|a| -a).collect())
    }
}

impl fmt::Display for QVec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, x) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{}", fmt_rat(x))?;
        }
        write!(f, ")")
    }
}

pub fn factorial(n: usize) -> Rat {
    (1..=n as i64).fold(Rat::one(), |acc, i| acc * int(i))
}

pub fn pow(x: &Rat, e: usize) -> Rat {
    num::pow(x.clone(), e)
}

/// Multiplies through by the lcm of denominators and divides by the gcd of
/// numerators, giving the primitive integer vector on the same ray.
pub fn primitive_direction(v: &[Rat]) -> Vec<BigInt> {
    use num::Integer;
    let lcm = v
        .iter()
        .fold(BigInt::one(), |acc, x| acc.lcm(x.denom()));
    let ints: Vec<BigInt> = v
        .iter()
        .map(|x| (x * Rat::from_integer(lcm.clone())).to_integer())
        .collect();
    let g = ints.iter().fold(BigInt::zero(), |acc, x| acc.gcd(x));
    if g.is_zero() {
        return ints;
    }
    ints.into_iter().map(|x| x / &g).collect()
}
