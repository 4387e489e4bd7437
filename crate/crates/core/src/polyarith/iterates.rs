use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Zero};
use serde::Serialize;

use super::IntPoly;
use crate::error::{invalid, Error, Result};

pub const MAX_ITERATE: usize = 8;
pub const MAX_SPECIALIZE: usize = 5;

/// `f^n = g_n / h_n` for `f(x) = 2 / (x - 1)^2`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct IterateFraction {
    pub n: usize,
    pub g: IntPoly,
    pub h: IntPoly,
}

impl IterateFraction {
    /// Numerator of `f^n(x) - t` specialised at `t = a`, before content removal.
    pub fn numerator_at(&self, a: &BigRational) -> IntPoly {
        &self.g.scale(a.denom()) - &self.h.scale(a.numer())
    }
}

fn iterate_tower(n: usize) -> Vec<IterateFraction> {
    let mut out = vec![IterateFraction {
        n: 1,
        g: IntPoly::constant(2),
        h: IntPoly::from_i64(&[1, -2, 1]),
    }];
    for k in 2..=n {
        let prev = &out[k - 2];
        let g = prev.h.pow(2).scale(&BigInt::from(2));
        let h = (&prev.g - &prev.h).pow(2);
        out.push(IterateFraction { n: k, g, h });
    }
    out
}

pub fn iterate_pair(n: usize) -> Result<IterateFraction> {
    if !(1..=MAX_ITERATE).contains(&n) {
        return invalid(format!("iterate index {n} outside 1..={MAX_ITERATE}"));
    }
    Ok(iterate_tower(n).pop().unwrap())
}

#[derive(Clone, Debug, Serialize)]
pub struct IterateMetadata {
    pub n: usize,
    /// `deg_x (g_n - t h_n)`.
    pub m: usize,
    pub delta: usize,
    pub epsilon: usize,
    /// Degree and leading coefficient of `h_n g_n' - g_n h_n'`.
    pub q: usize,
    #[serde(serialize_with = "crate::polyarith::serialize_bigint")]
    pub d: BigInt,
}

pub fn wronskian(it: &IterateFraction) -> IntPoly {
    &(&it.h * &it.g.derivative()) - &(&it.g * &it.h.derivative())
}

pub fn iterate_metadata(n: usize) -> Result<IterateMetadata> {
    let it = iterate_pair(n)?;
    let w = wronskian(&it);
    let delta = it.g.degree().unwrap();
    let epsilon = it.h.degree().unwrap();
    Ok(IterateMetadata {
        n,
        m: delta.max(epsilon),
        delta,
        epsilon,
        q: w.degree().ok_or_else(|| Error::ShapeViolation(format!("wronskian of level {n} vanishes")))?,
        d: w.leading_coefficient(),
    })
}

/// `v g_n - u h_n` for `a = u / v`, divided by its content.
pub fn specialize_numerator(n: usize, a: &BigRational) -> Result<IntPoly> {
    if !(1..=MAX_SPECIALIZE).contains(&n) {
        return invalid(format!("specialisation level {n} outside 1..={MAX_SPECIALIZE}"));
    }
    if a.is_zero() || *a == BigRational::from_integer(2.into()) {
        return Err(Error::ExcludedBasePoint(a.to_string()));
    }
    Ok(iterate_pair(n)?.numerator_at(a).primitive())
}

/// Parse `u/v` or an integer.
pub fn parse_rational(s: &str) -> Result<BigRational> {
    let bad = || Error::InvalidArgument(format!("not a rational number: {s:?}"));
    let s = s.trim();
    let (u, v) = match s.split_once('/') {
        Some((u, v)) => (u.trim(), v.trim()),
        None => (s, "1"),
    };
    let u: BigInt = u.parse().map_err(|_| bad())?;
    let v: BigInt = v.parse().map_err(|_| bad())?;
    if v.is_zero() {
        return Err(bad());
    }
    Ok(BigRational::new(u, v))
}

/// `u/v` in lowest terms with positive denominator.
pub fn format_rational(a: &BigRational) -> String {
    let g = a.numer().gcd(a.denom());
    let (mut u, mut v) = (a.numer() / &g, a.denom() / &g);
    if v < BigInt::zero() {
        u = -u;
        v = -v;
    }
    if v.is_one() {
        format!("{u}/1")
    } else {
        format!("{u}/{v}")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn first_iterates() {
        let two = iterate_pair(2).unwrap();
        assert_eq!(two.g, IntPoly::from_i64(&[1, -4, 6, -4, 1]).scale(&BigInt::from(2)));
        assert_eq!(two.h, IntPoly::from_i64(&[1, 2, -1]).pow(2));
        let one = iterate_pair(1).unwrap();
        assert_eq!((one.g.degree(), one.h.degree()), (Some(0), Some(2)));
        assert!(iterate_pair(0).is_err() && iterate_pair(9).is_err());
    }

    #[test]
    fn metadata_low_levels() {
        let w1 = wronskian(&iterate_pair(1).unwrap());
        assert_eq!(w1, IntPoly::from_i64(&[4, -4]));
        let m2 = iterate_metadata(2).unwrap();
        assert_eq!(m2.q, 5);
        // -16 (x^2 - 2x - 1)(x - 1)^3
        let expected = &IntPoly::from_i64(&[-1, -2, 1]).scale(&BigInt::from(-16)) * &IntPoly::from_i64(&[-1, 1]).pow(3);
        assert_eq!(wronskian(&iterate_pair(2).unwrap()), expected);
    }

    #[test]
    fn specialisation() {
        let five = BigRational::from_integer(5.into());
        assert_eq!(specialize_numerator(1, &five).unwrap(), IntPoly::from_i64(&[-3, 10, -5]));
        assert!(matches!(
            specialize_numerator(1, &BigRational::from_integer(2.into())),
            Err(Error::ExcludedBasePoint(_))
        ));
        assert!(specialize_numerator(1, &BigRational::zero()).is_err());
        let p = specialize_numerator(4, &five).unwrap();
        assert_eq!(p.degree(), Some(16));
        assert!(p.content().is_one());
        assert_eq!(parse_rational(" -6/4 ").unwrap(), BigRational::new((-3).into(), 2.into()));
        assert_eq!(format_rational(&parse_rational("10/-4").unwrap()), "-5/2");
        assert!(parse_rational("1/0").is_err() && parse_rational("x").is_err());
    }
}
