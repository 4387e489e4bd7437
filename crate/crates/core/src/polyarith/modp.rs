//! Dense polynomials over a prime field `F_p` with `p < 2^63`.

use num_bigint::BigInt;
use num_integer::Integer;
use num_prime::nt_funcs::is_prime64;
use num_traits::{ToPrimitive, Zero};

use super::IntPoly;
use crate::error::{invalid, Error, Result};
use crate::treeauto::CycleType;

#[derive(Clone, Copy, Debug)]
pub(crate) struct Fp {
    p: u64,
}

type Poly = Vec<u64>;

impl Fp {
    pub(crate) fn new(p: u64) -> Self {
        Self { p }
    }

    fn mul(&self, a: u64, b: u64) -> u64 {
        (a as u128 * b as u128 % self.p as u128) as u64
    }

    fn add(&self, a: u64, b: u64) -> u64 {
        ((a as u128 + b as u128) % self.p as u128) as u64
    }

    fn sub(&self, a: u64, b: u64) -> u64 {
        self.add(a, self.p - b)
    }

    fn pow(&self, mut a: u64, mut e: u64) -> u64 {
        let mut acc = 1 % self.p;
        while e > 0 {
            if e & 1 == 1 {
                acc = self.mul(acc, a);
            }
            a = self.mul(a, a);
            e >>= 1;
        }
        acc
    }

    pub(crate) fn inv(&self, a: u64) -> u64 {
        self.pow(a, self.p - 2)
    }

    pub(crate) fn reduce(&self, f: &IntPoly) -> Poly {
        let pb = BigInt::from(self.p);
        let mut out: Poly = f
            .coeffs()
            .iter()
            .map(|c| c.mod_floor(&pb).to_u64().unwrap())
            .collect();
        trim(&mut out);
        out
    }

    fn rem(&self, a: &Poly, b: &Poly) -> Poly {
        let mut r = a.clone();
        let db = b.len() - 1;
        let inv = self.inv(b[db]);
        while r.len() > db && !r.is_empty() {
            let shift = r.len() - 1 - db;
            let c = self.mul(*r.last().unwrap(), inv);
            for (i, bc) in b.iter().enumerate() {
                r[shift + i] = self.sub(r[shift + i], self.mul(c, *bc));
            }
            trim(&mut r);
        }
        r
    }

    fn div(&self, a: &Poly, b: &Poly) -> Poly {
        let mut r = a.clone();
        let db = b.len() - 1;
        if r.len() <= db {
            return Vec::new();
        }
        let inv = self.inv(b[db]);
        let mut q = vec![0; r.len() - db];
        for k in (0..q.len()).rev() {
            let c = self.mul(r[k + db], inv);
            q[k] = c;
            for (i, bc) in b.iter().enumerate() {
                r[k + i] = self.sub(r[k + i], self.mul(c, *bc));
            }
        }
        trim(&mut q);
        q
    }

    fn mul_poly(&self, a: &Poly, b: &Poly) -> Poly {
        if a.is_empty() || b.is_empty() {
            return Vec::new();
        }
        let mut out = vec![0; a.len() + b.len() - 1];
        for (i, x) in a.iter().enumerate() {
            for (j, y) in b.iter().enumerate() {
                out[i + j] = self.add(out[i + j], self.mul(*x, *y));
            }
        }
        trim(&mut out);
        out
    }

    fn gcd(&self, a: &Poly, b: &Poly) -> Poly {
        let (mut a, mut b) = (a.clone(), b.clone());
        while !b.is_empty() {
            let r = self.rem(&a, &b);
            a = b;
            b = r;
        }
        if let Some(&l) = a.last() {
            let inv = self.inv(l);
            for c in &mut a {
                *c = self.mul(*c, inv);
            }
        }
        a
    }

    fn derivative(&self, a: &Poly) -> Poly {
        let mut out: Poly = a
            .iter()
            .enumerate()
            .skip(1)
            .map(|(i, c)| self.mul(*c, i as u64 % self.p))
            .collect();
        trim(&mut out);
        out
    }

    /// `base^e mod m`.
    fn powmod(&self, base: &Poly, mut e: u64, m: &Poly) -> Poly {
        let mut acc = vec![1];
        let mut b = self.rem(base, m);
        while e > 0 {
            if e & 1 == 1 {
                acc = self.rem(&self.mul_poly(&acc, &b), m);
            }
            b = self.rem(&self.mul_poly(&b, &b), m);
            e >>= 1;
        }
        acc
    }
}

fn trim(a: &mut Poly) {
    while a.last() == Some(&0) {
        a.pop();
    }
}

fn degree(a: &Poly) -> usize {
    a.len() - 1
}

/// Resultant over `F_p` by the Euclidean algorithm.
pub(crate) fn resultant(a: &Poly, b: &Poly, f: &Fp) -> u64 {
    if a.is_empty() || b.is_empty() {
        return 0;
    }
    let (m, n) = (degree(a), degree(b));
    if n == 0 {
        return f.pow(b[0], m as u64);
    }
    if m < n {
        let r = resultant(b, a, f);
        return if m * n % 2 == 1 { f.sub(0, r) } else { r };
    }
    let r = f.rem(a, b);
    if r.is_empty() {
        return 0;
    }
    let k = degree(&r);
    let sub = resultant(b, &r, f);
    let mut out = f.mul(f.pow(b[n], (m - k) as u64), sub);
    if m * n % 2 == 1 {
        out = f.sub(0, out);
    }
    out
}

/// Degree pattern of a polynomial reduced modulo a prime.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum FactorPattern {
    Degrees(CycleType),
    NotSquarefree,
}

/// Distinct-degree factorisation degrees of `poly mod prime`.
pub fn factor_degrees_mod_p(poly: &IntPoly, prime: u64) -> Result<FactorPattern> {
    if prime < 2 || prime >= 1 << 62 || !is_prime64(prime) {
        return invalid(format!("{prime} is not a usable prime"));
    }
    if poly.degree().unwrap_or(0) == 0 {
        return invalid("factor degrees of a constant");
    }
    if (poly.leading_coefficient() % BigInt::from(prime)).is_zero() {
        return Err(Error::BadPrime { prime });
    }
    let f = Fp::new(prime);
    let mut g = f.reduce(poly);
    let d = f.derivative(&g);
    if degree(&f.gcd(&g, &d)) > 0 || d.is_empty() {
        return Ok(FactorPattern::NotSquarefree);
    }
    let x: Poly = vec![0, 1];
    let mut parts = Vec::new();
    let mut h = f.rem(&x, &g);
    let mut i = 1;
    while degree(&g) >= 2 * i {
        h = f.powmod(&h, prime, &g);
        let mut hx = h.clone();
        hx.resize(hx.len().max(2), 0);
        hx[1] = f.sub(hx[1], 1);
        trim(&mut hx);
        let common = f.gcd(&g, &hx);
        let dc = degree(&common);
        if dc > 0 {
            parts.extend(std::iter::repeat(i as u32).take(dc / i));
            g = f.div(&g, &common);
            h = f.rem(&h, &g);
        }
        i += 1;
    }
    if degree(&g) > 0 {
        parts.push(degree(&g) as u32);
    }
    Ok(FactorPattern::Degrees(CycleType::new(parts)))
}
