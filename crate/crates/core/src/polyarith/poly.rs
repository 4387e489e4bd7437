use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::str::FromStr;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};

/// Dense integer polynomial, constant term first, no trailing zeros.
#[derive(Clone, PartialEq, Eq, Hash, Default)]
pub struct IntPoly {
    coeffs: Vec<BigInt>,
}

impl IntPoly {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn one() -> Self {
        Self::constant(BigInt::one())
    }

    pub fn constant(c: impl Into<BigInt>) -> Self {
        Self::new(vec![c.into()])
    }

    pub fn x() -> Self {
        Self::from_i64(&[0, 1])
    }

    pub fn new(mut coeffs: Vec<BigInt>) -> Self {
        while coeffs.last().is_some_and(Zero::is_zero) {
            coeffs.pop();
        }
        Self { coeffs }
    }

    pub fn from_i64(coeffs: &[i64]) -> Self {
        Self::new(coeffs.iter().map(|&c| BigInt::from(c)).collect())
    }

    pub fn coeffs(&self) -> &[BigInt] {
        &self.coeffs
    }

    pub fn coeff(&self, i: usize) -> BigInt {
        self.coeffs.get(i).cloned().unwrap_or_default()
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn leading_coefficient(&self) -> BigInt {
        self.coeffs.last().cloned().unwrap_or_default()
    }

    pub fn scale(&self, c: &BigInt) -> Self {
        Self::new(self.coeffs.iter().map(|a| a * c).collect())
    }

    /// Exact division of every coefficient by `c`.
    pub fn div_exact(&self, c: &BigInt) -> Option<Self> {
        let mut out = Vec::with_capacity(self.coeffs.len());
        for a in &self.coeffs {
            let (q, r) = a.div_rem(c);
            if !r.is_zero() {
                return None;
            }
            out.push(q);
        }
        Some(Self::new(out))
    }

    pub fn pow(&self, e: u32) -> Self {
        let mut acc = Self::one();
        for _ in 0..e {
            acc = &acc * self;
        }
        acc
    }

    pub fn derivative(&self) -> Self {
        Self::new(
            self.coeffs
                .iter()
                .enumerate()
                .skip(1)
                .map(|(i, c)| c * BigInt::from(i))
                .collect(),
        )
    }

    pub fn eval(&self, x: &BigInt) -> BigInt {
        self.coeffs.iter().rev().fold(BigInt::zero(), |acc, c| acc * x + c)
    }

    pub fn eval_rational(&self, x: &BigRational) -> BigRational {
        self.coeffs
            .iter()
            .rev()
            .fold(BigRational::zero(), |acc, c| acc * x + BigRational::from_integer(c.clone()))
    }

    /// Non-negative gcd of the coefficients.
    pub fn content(&self) -> BigInt {
        self.coeffs.iter().fold(BigInt::zero(), |g, c| g.gcd(c))
    }

    /// Divided by its content; the sign of the leading coefficient is kept.
    pub fn primitive(&self) -> Self {
        let c = self.content();
        if c.is_zero() || c.is_one() {
            return self.clone();
        }
        self.div_exact(&c).expect("content divides")
    }

    pub fn with_positive_leading(&self) -> Self {
        if self.leading_coefficient().is_negative() {
            -self
        } else {
            self.clone()
        }
    }

    /// `lc(b)^(deg a - deg b + 1) a = q b + r`.
    pub fn pseudo_rem(&self, b: &Self) -> Self {
        let db = b.degree().expect("pseudo-division by zero");
        let lb = b.leading_coefficient();
        let mut r = self.clone();
        let Some(da) = r.degree() else { return r };
        if da < db {
            return r;
        }
        let mut e = da - db + 1;
        while let Some(dr) = r.degree() {
            if dr < db {
                break;
            }
            let lr = r.leading_coefficient();
            let mut coeffs: Vec<BigInt> = r.coeffs.iter().map(|c| c * &lb).collect();
            let shift = dr - db;
            for (i, c) in b.coeffs.iter().enumerate() {
                coeffs[i + shift] -= &lr * c;
            }
            r = Self::new(coeffs);
            e -= 1;
        }
        r.scale(&num_traits::pow(lb, e))
    }

    /// Exact division by a polynomial, if it divides over the integers.
    pub fn div_poly_exact(&self, d: &Self) -> Option<Self> {
        let dd = d.degree()?;
        let ld = d.leading_coefficient();
        let mut r = self.coeffs.clone();
        let Some(dn) = self.degree() else {
            return Some(Self::zero());
        };
        if dn < dd {
            return None;
        }
        let mut q = vec![BigInt::zero(); dn - dd + 1];
        for k in (0..=dn - dd).rev() {
            let (qc, rem) = r[k + dd].div_rem(&ld);
            if !rem.is_zero() {
                return None;
            }
            for (i, c) in d.coeffs.iter().enumerate() {
                r[k + i] -= &qc * c;
            }
            q[k] = qc;
        }
        r.iter().all(Zero::is_zero).then(|| Self::new(q))
    }

    /// Sum of squared coefficients.
    pub fn norm_squared(&self) -> BigInt {
        self.coeffs.iter().map(|c| c * c).sum()
    }
}

impl Add for &IntPoly {
    type Output = IntPoly;
    fn add(self, o: &IntPoly) -> IntPoly {
        let n = self.coeffs.len().max(o.coeffs.len());
        IntPoly::new((0..n).map(|i| self.coeff(i) + o.coeff(i)).collect())
    }
}

impl Sub for &IntPoly {
    type Output = IntPoly;
    fn sub(self, o: &IntPoly) -> IntPoly {
        let n = self.coeffs.len().max(o.coeffs.len());
        IntPoly::new((0..n).map(|i| self.coeff(i) - o.coeff(i)).collect())
    }
}

impl Mul for &IntPoly {
    type Output = IntPoly;
    fn mul(self, o: &IntPoly) -> IntPoly {
        if self.is_zero() || o.is_zero() {
            return IntPoly::zero();
        }
        let mut out = vec![BigInt::zero(); self.coeffs.len() + o.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in o.coeffs.iter().enumerate() {
                out[i + j] += a * b;
            }
        }
        IntPoly::new(out)
    }
}

impl Neg for &IntPoly {
    type Output = IntPoly;
    fn neg(self) -> IntPoly {
        IntPoly::new(self.coeffs.iter().map(|c| -c).collect())
    }
}

impl fmt::Display for IntPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return f.write_str("0");
        }
        let parts: Vec<String> = self.coeffs.iter().map(ToString::to_string).collect();
        f.write_str(&parts.join(" "))
    }
}

impl fmt::Debug for IntPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "IntPoly[{self}]")
    }
}

impl FromStr for IntPoly {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        s.split_whitespace()
            .map(|t| t.parse::<BigInt>().map_err(|_| Error::InvalidArgument(format!("bad coefficient {t:?}"))))
            .collect::<Result<Vec<_>>>()
            .map(Self::new)
    }
}
