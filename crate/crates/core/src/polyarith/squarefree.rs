use num_bigint::BigInt;
use num_prime::nt_funcs::factorize128;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{invalid, Error, Result};

const TRIAL_LIMIT: u64 = 1_000_000;

/// Squarefree part of a positive integer.
fn squarefree_natural(mut m: BigInt) -> Result<BigInt> {
    let mut out = BigInt::one();
    let mut p = 2u64;
    while p <= TRIAL_LIMIT {
        let pb = BigInt::from(p);
        if &pb * &pb > m {
            break;
        }
        let mut odd = false;
        while (&m % &pb).is_zero() {
            m /= &pb;
            odd = !odd;
        }
        if odd {
            out *= &pb;
        }
        p += if p == 2 { 1 } else { 2 };
    }
    if m.is_one() {
        return Ok(out);
    }
    // Every prime factor left exceeds the trial limit (or m is prime).
    let limit = BigInt::from(TRIAL_LIMIT);
    if &limit * &limit * &limit > m {
        // at most two prime factors: squarefree unless a perfect square
        let r = m.sqrt();
        return Ok(if &r * &r == m { out } else { out * m });
    }
    let small = m.to_u128().filter(|&v| v < 1u128 << 100).ok_or_else(|| Error::ResourceLimit {
        what: format!("factoring a {}-bit cofactor", m.bits()),
        cap: 100,
    })?;
    for (q, e) in factorize128(small) {
        if e % 2 == 1 {
            out *= BigInt::from(q);
        }
    }
    Ok(out)
}

/// The squarefree integer `s` with `a = s · r^2` for a rational `r`.
pub fn squarefree_part(a: &BigRational) -> Result<BigInt> {
    if a.is_zero() {
        return invalid("squarefree part of zero");
    }
    let n = a.numer() * a.denom();
    let s = squarefree_natural(n.abs())?;
    Ok(if n.is_negative() { -s } else { s })
}

/// Squarefree parts are equal iff the rationals differ by a square.
pub fn same_square_class(a: &BigRational, b: &BigRational) -> Result<bool> {
    Ok(squarefree_part(a)? == squarefree_part(b)?)
}
