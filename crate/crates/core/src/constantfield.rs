//! Numeric checks of radical identities among the iterated preimages of a
//! base point, and the finite group theory behind the constant field.

use std::collections::BTreeMap;
use std::ops::{Add, Div, Mul, Neg, Sub};

use dashu_float::ops::SquareRoot;
use dashu_float::FBig;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{invalid, Error, Result};
use crate::report::{Check, Report};
use crate::selfsim::geometric_tower;

pub const MAX_TREE_DEPTH: usize = 8;

type Real = FBig;

fn real(x: i64, prec: usize) -> Real {
    Real::from(x).with_precision(prec).value()
}

fn is_negative(x: &Real) -> bool {
    *x < Real::ZERO
}

/// Complex number with both parts carried at a fixed binary precision.
#[derive(Clone, Debug, PartialEq)]
pub struct ComplexApprox {
    pub re: Real,
    pub im: Real,
    pub precision: usize,
}

impl ComplexApprox {
    pub fn from_ints(re: i64, im: i64, precision: usize) -> Self {
        Self {
            re: real(re, precision),
            im: real(im, precision),
            precision,
        }
    }

    /// `(re + im i) / den`, exact inputs rounded once.
    pub fn from_ratio(re: i64, im: i64, den: i64, precision: usize) -> Self {
        let d = real(den, precision);
        Self {
            re: real(re, precision) / &d,
            im: real(im, precision) / d,
            precision,
        }
    }

    fn from_parts(re: Real, im: Real, precision: usize) -> Self {
        Self { re, im, precision }
    }

    pub fn one(precision: usize) -> Self {
        Self::from_ints(1, 0, precision)
    }

    pub fn norm_sqr(&self) -> Real {
        &self.re * &self.re + &self.im * &self.im
    }

    pub fn abs(&self) -> Real {
        self.norm_sqr().sqrt()
    }

    /// Principal square root: nonnegative real part, and nonnegative
    /// imaginary part on the negative real axis.
    pub fn sqrt(&self) -> Self {
        let p = self.precision;
        let zero = real(0, p);
        if self.re == zero && self.im == zero {
            return self.clone();
        }
        let r = self.abs();
        let two = real(2, p);
        if !is_negative(&self.re) {
            let re = ((&r + &self.re) / &two).sqrt();
            let im = &self.im / (&two * &re);
            Self::from_parts(re, im, p)
        } else {
            let mut im = ((&r - &self.re) / &two).sqrt();
            if is_negative(&self.im) {
                im = -im;
            }
            let re = &self.im / (&two * &im);
            Self::from_parts(re, im, p)
        }
    }

    pub fn recip(&self) -> Self {
        let n = self.norm_sqr();
        Self::from_parts(&self.re / &n, -(&self.im / &n), self.precision)
    }

    pub fn to_f64_pair(&self) -> (f64, f64) {
        (self.re.to_f64().value(), self.im.to_f64().value())
    }

    fn scalar(&self, k: i64) -> Self {
        Self::from_ints(k, 0, self.precision)
    }
}

impl Add for &ComplexApprox {
    type Output = ComplexApprox;
    fn add(self, o: &ComplexApprox) -> ComplexApprox {
        ComplexApprox::from_parts(&self.re + &o.re, &self.im + &o.im, self.precision)
    }
}

impl Sub for &ComplexApprox {
    type Output = ComplexApprox;
    fn sub(self, o: &ComplexApprox) -> ComplexApprox {
        ComplexApprox::from_parts(&self.re - &o.re, &self.im - &o.im, self.precision)
    }
}

impl Mul for &ComplexApprox {
    type Output = ComplexApprox;
    fn mul(self, o: &ComplexApprox) -> ComplexApprox {
        ComplexApprox::from_parts(
            &self.re * &o.re - &self.im * &o.im,
            &self.re * &o.im + &self.im * &o.re,
            self.precision,
        )
    }
}

impl Div for &ComplexApprox {
    type Output = ComplexApprox;
    fn div(self, o: &ComplexApprox) -> ComplexApprox {
        self * &o.recip()
    }
}

impl Neg for &ComplexApprox {
    type Output = ComplexApprox;
    fn neg(self) -> ComplexApprox {
        ComplexApprox::from_parts(-self.re.clone(), -self.im.clone(), self.precision)
    }
}

/// `2^(-precision/2)`, the tolerance used throughout.
pub fn tolerance(precision: usize) -> f64 {
    (-(precision as f64) / 2.0).exp2()
}

/// `|a - b| / max(|b|, 1)`.
fn relative_residual(a: &ComplexApprox, b: &ComplexApprox) -> f64 {
    let diff = (a - b).abs().to_f64().value();
    let scale = b.abs().to_f64().value().max(1.0);
    diff / scale
}

/// Iterated preimages `α_w` for words `w` over `{1, 2}`, with
/// `α_(w1) = 1 + √(2/α_w)` and `α_(w2) = 1 - √(2/α_w)`.
#[derive(Clone, Debug)]
pub struct PreimageTreeNumeric {
    pub root: ComplexApprox,
    pub depth: usize,
    pub values: BTreeMap<String, ComplexApprox>,
}

impl PreimageTreeNumeric {
    pub fn get(&self, word: &str) -> &ComplexApprox {
        &self.values[word]
    }
}

fn degenerate(z: &ComplexApprox) -> bool {
    let tol = tolerance(z.precision);
    let two = z.scalar(2);
    z.abs().to_f64().value() < tol || (z - &two).abs().to_f64().value() < tol
}

pub fn preimage_tree_numeric(t0: &ComplexApprox, depth: usize) -> Result<PreimageTreeNumeric> {
    preimage_tree_with_flips(t0, depth, &[])
}

/// As [`preimage_tree_numeric`], taking the other square root at the
/// vertices listed in `flips`.
pub fn preimage_tree_with_flips(t0: &ComplexApprox, depth: usize, flips: &[&str]) -> Result<PreimageTreeNumeric> {
    if depth > MAX_TREE_DEPTH {
        return invalid(format!("tree depth {depth} exceeds {MAX_TREE_DEPTH}"));
    }
    if t0.precision < 16 {
        return invalid("precision must be at least 16 bits");
    }
    let mut values = BTreeMap::new();
    values.insert(String::new(), t0.clone());
    let mut frontier = vec![String::new()];
    for _ in 0..depth {
        let mut next = Vec::with_capacity(frontier.len() * 2);
        for w in frontier {
            let a = &values[&w];
            if degenerate(a) {
                return Err(Error::DegenerateTree(format!("α at {:?} is postcritical", w)));
            }
            let mut r = (&a.scalar(2) / a).sqrt();
            if flips.contains(&w.as_str()) {
                r = -&r;
            }
            let one = a.scalar(1);
            let (c1, c2) = (&one + &r, &one - &r);
            next.push(format!("{w}1"));
            next.push(format!("{w}2"));
            values.insert(format!("{w}1"), c1);
            values.insert(format!("{w}2"), c2);
        }
        frontier = next;
    }
    Ok(PreimageTreeNumeric {
        root: t0.clone(),
        depth,
        values,
    })
}

/// `f(x) = 2 / (x - 1)^2`.
pub fn apply_f(x: &ComplexApprox) -> ComplexApprox {
    let d = x - &x.scalar(1);
    &x.scalar(2) / &(&d * &d)
}

#[derive(Clone, Debug, Serialize)]
pub struct IdentityResidual {
    pub id: String,
    pub instances: usize,
    pub max_residual: f64,
    pub passed: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct RadicalReport {
    pub t0: (f64, f64),
    pub precision: usize,
    pub tolerance: f64,
    pub identities: Vec<IdentityResidual>,
}

impl RadicalReport {
    pub fn all_passed(&self) -> bool {
        self.identities.iter().all(|i| i.passed)
    }

    pub fn max_residual(&self) -> f64 {
        self.identities.iter().map(|i| i.max_residual).fold(0.0, f64::max)
    }

    pub fn to_report(&self) -> Report {
        let mut r = Report::new(format!("radical identities at t0 = {:?}", self.t0));
        for i in &self.identities {
            r.push(Check::new(
                i.id.clone(),
                i.passed,
                format!("{} instances, max residual {:.3e}", i.instances, i.max_residual),
            ));
        }
        r
    }
}

fn words(len: usize) -> Vec<String> {
    (0..1usize << len)
        .map(|m| {
            (0..len)
                .map(|k| if m >> (len - 1 - k) & 1 == 0 { '1' } else { '2' })
                .collect()
        })
        .collect()
}

pub fn verify_radical_identities(t0: &ComplexApprox) -> Result<RadicalReport> {
    verify_on_tree(&preimage_tree_numeric(t0, 3)?)
}

pub fn verify_on_tree(tree: &PreimageTreeNumeric) -> Result<RadicalReport> {
    if tree.depth < 3 {
        return invalid("radical identities need depth 3");
    }
    let t0 = &tree.root;
    let p = t0.precision;
    let tol = tolerance(p);
    let a = |w: &str| tree.get(w);
    let one = t0.scalar(1);
    let two = t0.scalar(2);
    let mut out = Vec::new();
    let mut record = |id: &str, residuals: Vec<f64>| {
        let max = residuals.iter().copied().fold(0.0, f64::max);
        out.push(IdentityResidual {
            id: id.to_string(),
            instances: residuals.len(),
            max_residual: max,
            passed: max <= tol,
        });
    };

    let mut r = Vec::new();
    let mut r_pre = Vec::new();
    for len in 0..3 {
        for w in words(len) {
            let lhs = a(&format!("{w}1")) * a(&format!("{w}2"));
            let rhs = &(a(&w) - &two) / a(&w);
            r.push(relative_residual(&lhs, &rhs));
            for c in ["1", "2"] {
                r_pre.push(relative_residual(&apply_f(a(&format!("{w}{c}"))), a(&w)));
            }
        }
    }
    record("preimages", r_pre);
    record("product-of-siblings", r);

    let mut r = Vec::new();
    for len in 0..3 {
        let ws = words(len);
        for (i, w) in ws.iter().enumerate() {
            for v in &ws[i..] {
                let x = &(a(&format!("{w}1")) - &one) * &(a(&format!("{v}1")) - &one);
                let lhs = &x * &x;
                let rhs = &t0.scalar(4) / &(a(w) * a(v));
                r.push(relative_residual(&lhs, &rhs));
            }
        }
    }
    record("squared-offsets", r);

    let e = &(&(&(a("111") - &one) * &(a("121") - &one)) / &two) * &(&(a("11") - &one) / &(a("21") - &one));
    record("square-root-of-minus-one", vec![relative_residual(&(&e * &e), &t0.scalar(-1))]);

    let e = &(&(&one / &(a("1") - &one)) * &(&two / &(a("11") - &one))) * &(&two / &(a("21") - &one));
    let rhs = &two * &(t0 - &two);
    record("root-of-two-alpha-minus-four", vec![relative_residual(&(&e * &e), &rhs)]);

    Ok(RadicalReport {
        t0: t0.to_f64_pair(),
        precision: p,
        tolerance: tol,
        identities: out,
    })
}

/// Seeded base points with real and imaginary parts in `[-6, 6]`, kept
/// away from `0` and `2`.
pub fn sample_base_points(samples: usize, seed: u64, precision: usize) -> Vec<ComplexApprox> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::with_capacity(samples);
    while out.len() < samples {
        let re: i64 = rng.gen_range(-6000..=6000);
        let im: i64 = rng.gen_range(-6000..=6000);
        let near = |x: i64| (re - x).abs() < 50 && im.abs() < 50;
        if near(0) || near(2000) {
            continue;
        }
        out.push(ComplexApprox::from_ratio(re, im, 1000, precision));
    }
    out
}

#[derive(Clone, Debug, Serialize)]
pub struct RadicalSweep {
    pub precision: usize,
    pub seed: u64,
    pub reports: Vec<RadicalReport>,
}

impl RadicalSweep {
    pub fn all_passed(&self) -> bool {
        self.reports.iter().all(RadicalReport::all_passed)
    }

    pub fn max_residual(&self) -> f64 {
        self.reports.iter().map(RadicalReport::max_residual).fold(0.0, f64::max)
    }
}

pub fn radical_sweep(samples: usize, seed: u64, precision: usize) -> Result<RadicalSweep> {
    let reports = sample_base_points(samples, seed, precision)
        .par_iter()
        .map(verify_radical_identities)
        .collect::<Result<Vec<_>>>()?;
    Ok(RadicalSweep {
        precision,
        seed,
        reports,
    })
}

/// `(id, residual at precision, residual at twice the precision)` per identity.
pub fn precision_shrink(t0_num: (i64, i64, i64), precision: usize) -> Result<Vec<(String, f64, f64)>> {
    let (re, im, den) = t0_num;
    let lo = verify_radical_identities(&ComplexApprox::from_ratio(re, im, den, precision))?;
    let hi = verify_radical_identities(&ComplexApprox::from_ratio(re, im, den, 2 * precision))?;
    Ok(lo
        .identities
        .iter()
        .zip(&hi.identities)
        .map(|(l, h)| (l.id.clone(), l.max_residual, h.max_residual))
        .collect())
}

/// `Z/2 × Z/4` as pairs; composition of bijections given as tables.
fn aut_z2_z4() -> Vec<[usize; 8]> {
    let elems: Vec<(u8, u8)> = (0..2).flat_map(|a| (0..4).map(move |b| (a, b))).collect();
    let idx = |(a, b): (u8, u8)| (a * 4 + b) as usize;
    let add = |x: (u8, u8), y: (u8, u8)| ((x.0 + y.0) % 2, (x.1 + y.1) % 4);
    let mut perm: Vec<usize> = (0..8).collect();
    let mut out = Vec::new();
    loop {
        let hom = elems.iter().all(|&x| {
            elems
                .iter()
                .all(|&y| perm[idx(add(x, y))] == idx(add(elems[perm[idx(x)]], elems[perm[idx(y)]])))
        });
        if hom {
            let mut table = [0; 8];
            table.copy_from_slice(&perm);
            out.push(table);
        }
        if !next_permutation(&mut perm) {
            break;
        }
    }
    out
}

fn next_permutation(p: &mut [usize]) -> bool {
    let Some(i) = (1..p.len()).rev().find(|&i| p[i - 1] < p[i]) else {
        return false;
    };
    let j = (i..p.len()).rev().find(|&j| p[j] > p[i - 1]).unwrap();
    p.swap(i - 1, j);
    p[i..].reverse();
    true
}

fn compose(a: &[usize; 8], b: &[usize; 8]) -> [usize; 8] {
    let mut out = [0; 8];
    for (x, o) in out.iter_mut().enumerate() {
        *o = b[a[x]];
    }
    out
}

/// Abelianisation of `G_n` is `Z/2 × Z/4` for `n = 3..5`, and that group
/// has a non-abelian automorphism group of order 8.
pub fn dihedral_constant_field_check() -> Result<Report> {
    let mut report = Report::new("dihedral constant field");
    let tower = geometric_tower(5)?;
    for lvl in &tower[2..] {
        let inv = lvl.g.abelian_invariants()?;
        report.push(Check::equal(format!("G.abelianization[n={}]", lvl.level), inv, vec![2u64, 4]));
    }
    let auts = aut_z2_z4();
    report.push(Check::equal("Aut(Z2xZ4).order", auts.len(), 8));
    let pair = auts
        .iter()
        .flat_map(|x| auts.iter().map(move |y| (x, y)))
        .find(|(x, y)| compose(x, y) != compose(y, x));
    report.push(Check::new(
        "Aut(Z2xZ4).non-abelian",
        pair.is_some(),
        match pair {
            Some((x, y)) => format!("{x:?} and {y:?} do not commute"),
            None => "all pairs commute".into(),
        },
    ));
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn principal_sqrt() {
        let p = 128;
        let minus_four = ComplexApprox::from_ints(-4, 0, p);
        let (re, im) = minus_four.sqrt().to_f64_pair();
        assert!(re.abs() < 1e-30 && (im - 2.0).abs() < 1e-30);
        let z = ComplexApprox::from_ints(3, -4, p);
        let s = z.sqrt();
        let (re, im) = s.to_f64_pair();
        assert!((re - 2.0).abs() < 1e-30 && (im + 1.0).abs() < 1e-30);
        assert!(relative_residual(&(&s * &s), &z) < 1e-30);
    }

    #[test]
    fn first_preimages_of_three() {
        let t = preimage_tree_numeric(&ComplexApprox::from_ints(3, 0, 128), 1).unwrap();
        let (a1, _) = t.get("1").to_f64_pair();
        let (a2, _) = t.get("2").to_f64_pair();
        assert!((a1 - 1.816_496_580_927_726).abs() < 1e-12);
        assert!((a2 - 0.183_503_419_072_274).abs() < 1e-12);
        for w in ["1", "2"] {
            assert!(relative_residual(&apply_f(t.get(w)), &t.root) < 1e-12);
        }
        assert_eq!(preimage_tree_numeric(&t.root, 0).unwrap().values.len(), 1);
        assert!(matches!(
            preimage_tree_numeric(&ComplexApprox::from_ints(2, 0, 128), 2),
            Err(Error::DegenerateTree(_))
        ));
    }

    #[test]
    fn automorphisms_of_z2_z4() {
        assert_eq!(aut_z2_z4().len(), 8);
    }
}
