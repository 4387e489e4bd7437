use num_bigint::{BigInt, Sign};
use num_integer::Integer;
use num_prime::nt_funcs::is_prime64;
use num_traits::{One, Signed, ToPrimitive, Zero};

use super::modp::{self, Fp};
use super::IntPoly;
use crate::error::{invalid, Result};

fn check_nonzero(p: &IntPoly, q: &IntPoly) -> Result<()> {
    if p.is_zero() || q.is_zero() {
        return invalid("resultant of the zero polynomial");
    }
    Ok(())
}

/// Resultant by the subresultant remainder sequence over the integers.
pub fn resultant(p: &IntPoly, q: &IntPoly) -> Result<BigInt> {
    check_nonzero(p, q)?;
    let (mut a, mut b) = (p.clone(), q.clone());
    let mut s = BigInt::one();
    if a.degree() < b.degree() {
        std::mem::swap(&mut a, &mut b);
        if a.degree().unwrap() % 2 == 1 && b.degree().unwrap() % 2 == 1 {
            s = -s;
        }
    }
    if b.degree() == Some(0) {
        return Ok(s * num_traits::pow(b.leading_coefficient(), a.degree().unwrap()));
    }
    let (ca, cb) = (a.content(), b.content());
    a = a.primitive();
    b = b.primitive();
    let t = num_traits::pow(ca, b.degree().unwrap()) * num_traits::pow(cb, a.degree().unwrap());
    let (mut g, mut h) = (BigInt::one(), BigInt::one());
    loop {
        let (da, db) = (a.degree().unwrap(), b.degree().unwrap());
        let delta = da - db;
        if da % 2 == 1 && db % 2 == 1 {
            s = -s;
        }
        let r = a.pseudo_rem(&b);
        if r.is_zero() {
            return Ok(BigInt::zero());
        }
        a = b;
        b = r
            .div_exact(&(&g * num_traits::pow(h.clone(), delta)))
            .expect("subresultant division is exact");
        g = a.leading_coefficient();
        h = if delta == 0 {
            h
        } else {
            num_traits::pow(g.clone(), delta) / num_traits::pow(h, delta - 1)
        };
        let (da, db) = (a.degree().unwrap(), b.degree().unwrap());
        if db == 0 {
            let lb = b.leading_coefficient();
            let last = if da == 0 {
                BigInt::one()
            } else {
                num_traits::pow(lb, da) / num_traits::pow(h, da - 1)
            };
            return Ok(s * t * last);
        }
    }
}

/// Resultant by reduction modulo large primes and Chinese remaindering,
/// stopping once the modulus exceeds twice the Hadamard bound.
pub fn resultant_modular(p: &IntPoly, q: &IntPoly) -> Result<BigInt> {
    check_nonzero(p, q)?;
    let (dp, dq) = (p.degree().unwrap(), q.degree().unwrap());
    // Res^2 <= |p|^(2 dq) |q|^(2 dp); need modulus^2 > 4 Res^2.
    let bound_sq = BigInt::from(4) * num_traits::pow(p.norm_squared(), dq) * num_traits::pow(q.norm_squared(), dp);
    let (lp, lq) = (p.leading_coefficient(), q.leading_coefficient());
    let mut modulus = BigInt::one();
    let mut value = BigInt::zero();
    let mut candidate: u64 = (1 << 62) - 1;
    while &modulus * &modulus <= bound_sq {
        candidate -= 2;
        if !is_prime64(candidate) {
            continue;
        }
        let pb = BigInt::from(candidate);
        if (&lp % &pb).is_zero() || (&lq % &pb).is_zero() {
            continue;
        }
        let f = Fp::new(candidate);
        let r = modp::resultant(&f.reduce(p), &f.reduce(q), &f);
        // CRT: value ≡ r (mod candidate)
        let inv = f.inv((&modulus % &pb).to_u64().unwrap());
        let diff = (BigInt::from(r) - &value).mod_floor(&pb);
        let k = (diff * BigInt::from(inv)).mod_floor(&pb);
        value += &modulus * k;
        modulus *= pb;
    }
    let half = &modulus >> 1;
    if value > half {
        value -= &modulus;
    }
    Ok(value)
}

/// `± 2^k` for some `k`.
pub fn is_signed_power_of_two(x: &BigInt) -> bool {
    let m = x.abs();
    m.sign() == Sign::Plus && (&m & (&m - 1u8)).is_zero()
}
