//! `Δ_n(t) = disc_x(g_n - t h_n)` by evaluation at integer `t` and exact
//! interpolation.

use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use rayon::prelude::*;
use serde::Serialize;

use super::{iterate_pair, resultant, IntPoly, IterateFraction};
use crate::error::{invalid, Error, Result};

pub const MAX_DISC_LEVEL: usize = 5;

/// `sign · 2^c · t^a · (2 - t)^b`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct DiscriminantShape {
    pub sign: i8,
    pub c: u32,
    pub a: u32,
    pub b: u32,
}

impl DiscriminantShape {
    pub fn to_poly(&self) -> IntPoly {
        let lead = BigInt::from(self.sign) * (BigInt::one() << self.c);
        let t_a = IntPoly::new([vec![BigInt::zero(); self.a as usize], vec![lead]].concat());
        &t_a * &IntPoly::from_i64(&[2, -1]).pow(self.b)
    }
}

impl fmt::Display for DiscriminantShape {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = if self.sign < 0 { '-' } else { '+' };
        write!(f, "{s}2^{} * t^{} * (2-t)^{}", self.c, self.a, self.b)
    }
}

/// Determinant by fraction-free elimination.
pub fn bareiss_determinant(mut m: Vec<Vec<BigInt>>) -> BigInt {
    let n = m.len();
    if n == 0 {
        return BigInt::one();
    }
    let mut sign = BigInt::one();
    let mut prev = BigInt::one();
    for k in 0..n - 1 {
        if m[k][k].is_zero() {
            match (k + 1..n).find(|&r| !m[r][k].is_zero()) {
                Some(r) => {
                    m.swap(k, r);
                    sign = -sign;
                }
                None => return BigInt::zero(),
            }
        }
        for i in k + 1..n {
            for j in k + 1..n {
                let v = (&m[i][j] * &m[k][k] - &m[i][k] * &m[k][j]) / &prev;
                m[i][j] = v;
            }
        }
        prev = m[k][k].clone();
    }
    sign * &m[n - 1][n - 1]
}

/// Sylvester matrix of `p` and `q` taken with formal degrees `dp`, `dq`.
fn sylvester(p: &IntPoly, dp: usize, q: &IntPoly, dq: usize) -> Vec<Vec<BigInt>> {
    let size = dp + dq;
    let mut rows = Vec::with_capacity(size);
    for (poly, deg, copies) in [(p, dp, dq), (q, dq, dp)] {
        for r in 0..copies {
            let mut row = vec![BigInt::zero(); size];
            for k in 0..=deg {
                row[r + k] = poly.coeff(deg - k);
            }
            rows.push(row);
        }
    }
    rows
}

fn numerator_at_t(it: &IterateFraction, t: &BigInt) -> IntPoly {
    &it.g - &it.h.scale(t)
}

/// Formal degree of `g_n - t h_n` in `x` and its leading coefficient in `t`.
fn formal_degree(it: &IterateFraction) -> (usize, IntPoly) {
    let d = it.g.degree().unwrap().max(it.h.degree().unwrap());
    let lc = IntPoly::new(vec![it.g.coeff(d), -it.h.coeff(d)]);
    (d, lc)
}

/// Exact coefficients of the polynomial of degree `< values.len()` taking
/// `values[i]` at `t = i`, via Newton forward differences.
pub fn interpolate_at_naturals(values: &[BigInt]) -> Result<IntPoly> {
    let n = values.len();
    let mut diffs: Vec<BigInt> = values.to_vec();
    let mut newton = Vec::with_capacity(n);
    for k in 0..n {
        newton.push(diffs[0].clone());
        for i in 0..n - 1 - k {
            diffs[i] = &diffs[i + 1] - &diffs[i];
        }
    }
    // sum_k Δ^k f(0) · binom(t, k)
    let mut acc = vec![BigRational::zero(); n];
    let mut basis = vec![BigRational::one()];
    for (k, coeff) in newton.iter().enumerate() {
        let c = BigRational::from_integer(coeff.clone());
        for (i, b) in basis.iter().enumerate() {
            acc[i] += &c * b;
        }
        // basis *= (t - k) / (k + 1)
        let kk = BigRational::from_integer(BigInt::from(k));
        let den = BigRational::from_integer(BigInt::from(k + 1));
        let mut next = vec![BigRational::zero(); basis.len() + 1];
        for (i, b) in basis.iter().enumerate() {
            next[i + 1] += b / &den;
            next[i] -= b * &kk / &den;
        }
        basis = next;
    }
    let coeffs = acc
        .into_iter()
        .map(|c| {
            if c.is_integer() {
                Ok(c.to_integer())
            } else {
                Err(Error::ShapeViolation(format!("interpolated coefficient {c} is not an integer")))
            }
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(IntPoly::new(coeffs))
}

/// `disc(p) = (-1)^(d(d-1)/2) Res(p, p') / lc(p)`.
pub fn discriminant(p: &IntPoly) -> Result<BigInt> {
    let d = match p.degree() {
        Some(d) if d >= 1 => d,
        _ => return invalid("discriminant needs positive degree"),
    };
    let r = resultant(p, &p.derivative())?;
    let sign = if (d * (d - 1) / 2) % 2 == 1 { -1 } else { 1 };
    Ok(BigInt::from(sign) * r / p.leading_coefficient())
}

/// `Δ_n(t)` as an integer polynomial in `t`.
pub fn discriminant_polynomial(n: usize) -> Result<IntPoly> {
    if !(1..=MAX_DISC_LEVEL).contains(&n) {
        return invalid(format!("discriminant level {n} outside 1..={MAX_DISC_LEVEL}"));
    }
    let it = iterate_pair(n)?;
    let (d, lc) = formal_degree(&it);
    // Res(F, F_x) has t-degree at most (d - 1) + d.
    let nodes = 2 * d;
    let values: Vec<BigInt> = (0..nodes)
        .into_par_iter()
        .map(|t| {
            let f = numerator_at_t(&it, &BigInt::from(t));
            bareiss_determinant(sylvester(&f, d, &f.derivative(), d - 1))
        })
        .collect();
    let res = interpolate_at_naturals(&values)?;
    let quotient = res
        .div_poly_exact(&lc)
        .ok_or_else(|| Error::ShapeViolation("leading coefficient does not divide Res(F, F_x)".into()))?;
    let delta = if (d * (d - 1) / 2) % 2 == 1 { -&quotient } else { quotient };

    for t in [3i64, -5] {
        let tb = BigInt::from(t);
        let direct = discriminant(&numerator_at_t(&it, &tb))?;
        if direct != delta.eval(&tb) {
            return Err(Error::ShapeViolation(format!(
                "interpolated discriminant disagrees with the subresultant value at t = {t}"
            )));
        }
    }
    Ok(delta)
}

/// Strip powers of `t` and `(2 - t)` from `delta`; the rest must be `±2^c`.
pub fn factor_shape(delta: &IntPoly) -> Result<DiscriminantShape> {
    if delta.is_zero() {
        return Err(Error::ShapeViolation("discriminant vanishes identically".into()));
    }
    let a = delta.coeffs().iter().take_while(|c| c.is_zero()).count();
    let mut rest = IntPoly::new(delta.coeffs()[a..].to_vec());
    let two_minus_t = IntPoly::from_i64(&[2, -1]);
    let mut b = 0;
    while let Some(q) = rest.div_poly_exact(&two_minus_t) {
        rest = q;
        b += 1;
    }
    let residual = rest.leading_coefficient();
    if rest.degree() != Some(0) || !super::is_signed_power_of_two(&residual) {
        return Err(Error::ShapeViolation(format!("residual factor {rest} is not ± a power of 2")));
    }
    let shape = DiscriminantShape {
        sign: if residual.is_negative() { -1 } else { 1 },
        c: (residual.abs().bits() - 1) as u32,
        a: a as u32,
        b,
    };
    debug_assert_eq!(&shape.to_poly(), delta);
    Ok(shape)
}

pub fn discriminant_shape(n: usize) -> Result<DiscriminantShape> {
    let delta = discriminant_polynomial(n)?;
    let shape = factor_shape(&delta)?;
    if shape.to_poly() != delta {
        return Err(Error::ShapeViolation(format!("{shape} does not reproduce Δ_{n}")));
    }
    Ok(shape)
}

/// `Δ_n(a)` for a rational `a`, as a rational.
pub fn shape_value(shape: &DiscriminantShape, a: &BigRational) -> BigRational {
    shape.to_poly().eval_rational(a)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bareiss_small() {
        let m = vec![
            vec![BigInt::from(0), BigInt::from(2), BigInt::from(1)],
            vec![BigInt::from(1), BigInt::from(1), BigInt::from(0)],
            vec![BigInt::from(3), BigInt::from(0), BigInt::from(4)],
        ];
        // 0(4) - 2(4) + 1(-3) = -11
        assert_eq!(bareiss_determinant(m), BigInt::from(-11));
    }

    #[test]
    fn interpolation_recovers_polynomial() {
        let p = IntPoly::from_i64(&[7, -3, 0, 5]);
        let values: Vec<BigInt> = (0..6).map(|t| p.eval(&BigInt::from(t))).collect();
        assert_eq!(interpolate_at_naturals(&values).unwrap(), p);
    }

    #[test]
    fn first_discriminant() {
        let s = discriminant_shape(1).unwrap();
        assert_eq!(s, DiscriminantShape { sign: 1, c: 3, a: 1, b: 0 });
        assert_eq!(s.to_string(), "+2^3 * t^1 * (2-t)^0");
        assert_eq!(discriminant(&IntPoly::from_i64(&[-1, 0, 1])).unwrap(), BigInt::from(4));
    }
}
