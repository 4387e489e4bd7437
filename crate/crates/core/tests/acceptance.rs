//! One test per acceptance criterion. Every sub-criterion prints a
//! `[pass]`/`[FAIL]` line straight to stdout so it survives output capture.

use std::collections::HashSet;
use std::io::Write;
use std::time::{Duration, Instant};

use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use img_core::arithmodel::{frattini_rank, maximal_subgroups, ModelOptions, ModelTower};
use img_core::constantfield::{precision_shrink, radical_sweep};
use img_core::maximality::{
    level4_tables, maximality_verdict, recheck_certificate, reobserve_certificate, BasePoint, Verdict,
};
use img_core::polyarith::{
    discriminant_polynomial, discriminant_shape, is_signed_power_of_two, iterate_metadata, iterate_pair, resultant,
    IntPoly,
};
use img_core::selfsim::{geometric_tower, verify_triple_theorem, GeometricLevel};
use img_core::treeauto::{ConjugacyOracle, Portrait, MAX_LEVEL};
use img_core::Error;

struct Criterion {
    id: &'static str,
    failed: Vec<String>,
}

impl Criterion {
    fn new(id: &'static str) -> Self {
        Self { id, failed: Vec::new() }
    }

    fn check(&mut self, sub: &str, passed: bool, detail: impl std::fmt::Display) {
        let tag = if passed { "pass" } else { "FAIL" };
        let line = format!("[{tag}] criterion {} {sub}: {detail}\n", self.id);
        std::io::stdout().lock().write_all(line.as_bytes()).unwrap();
        if !passed {
            self.failed.push(sub.to_string());
        }
    }

    fn timed(&mut self, start: Instant, limit: Duration) {
        let took = start.elapsed();
        self.check("time", took < limit, format!("{took:.2?} < {limit:?}"));
    }

    fn finish(self) {
        assert!(self.failed.is_empty(), "criterion {} failed: {:?}", self.id, self.failed);
    }
}

#[test]
fn criterion_1_orders() {
    let mut c = Criterion::new("1");
    let start = Instant::now();
    let tower = geometric_tower(MAX_LEVEL).unwrap();
    c.check("|G_3| = 32", tower[2].g.order() == 32, tower[2].g.order());
    for g in &tower[2..] {
        let n = g.level;
        c.check(&format!("|G_{n}| = 2^{}", n + 2), g.g.order() == 1 << (n + 2), g.g.order());
    }
    c.timed(start, Duration::from_secs(10));
    c.finish();
}

#[test]
fn criterion_2_subgroup_ledger() {
    let mut c = Criterion::new("2");
    let start = Instant::now();
    let tower = geometric_tower(6).unwrap();
    for n in 3..=6 {
        let geo: &GeometricLevel = &tower[n - 1];
        let g = &geo.g;
        let indices = [
            g.index_of(&geo.h[0]).unwrap(),
            g.index_of(&geo.h[1]).unwrap(),
            g.index_of(&geo.h[2]).unwrap(),
            g.index_of(&geo.u).unwrap(),
            g.index_of(&geo.derived).unwrap(),
        ];
        c.check(&format!("indices H1 H2 H3 U [G,G] at n={n}"), indices == [4, 2, 2, 4, 8], format!("{indices:?}"));

        let h13 = geo.h[0].intersection(&geo.h[2]).unwrap();
        let pairs: HashSet<Portrait> = tower[n - 2]
            .u
            .elements()
            .iter()
            .map(|x| Portrait::from_sections(x, &x.invert(), false).unwrap())
            .collect();
        let derived: HashSet<Portrait> = geo.derived.elements().iter().copied().collect();
        c.check(
            &format!("[G,G] = H1∩H3 = {{(x,x^-1)}} at n={n}"),
            geo.derived == h13 && derived == pairs,
            format!("|[G,G]| = {}", derived.len()),
        );
        c.check(&format!("U abelian at n={n}"), geo.u.is_abelian(), format!("|U| = {}", geo.u.order()));
        let inv = g.abelian_invariants().unwrap();
        c.check(&format!("abelian invariants at n={n}"), inv == [2, 4], format!("{inv:?}"));
        let cent = [&geo.a1, &geo.a2, &geo.a3].map(|a| g.centralizer(a).unwrap().order());
        c.check(&format!("|C(a_i)| = 8 at n={n}"), cent == [8, 8, 8], format!("{cent:?}"));
    }
    c.timed(start, Duration::from_secs(60));
    c.finish();
}

#[test]
fn criterion_3_arithmetic_model() {
    let mut c = Criterion::new("3");
    let start = Instant::now();
    let tower = ModelTower::build(5, ModelOptions::default()).unwrap();
    let order = |n: usize| tower.model(n).order();
    c.check("|M_4| = 2^8", order(4) == 256, order(4));
    c.check("|M_5| = 2^10", order(5) == 1024, order(5));
    for n in 1..=5 {
        c.check(&format!("|M_{n}| <= 2^{}", 2 * n), order(n) <= 1 << (2 * n), order(n));
    }
    // Stated without a lower limit on n; checked literally from n = 2.
    for n in 2..=5 {
        c.check(
            &format!("|M_{n}| <= 4|M_{}|", n - 1),
            order(n) <= 4 * order(n - 1),
            format!("{} vs 4 * {}", order(n), order(n - 1)),
        );
    }
    let m5 = tower.model(5);
    let odometers = m5.elements().iter().filter(|x| x.cycle_type().parts() == [32]).count();
    c.check("no 32-cycle in M_5", odometers == 0, format!("{odometers} found"));

    let m4 = tower.model(4);
    let rank = frattini_rank(m4).unwrap();
    let maximal = maximal_subgroups(m4).unwrap();
    let frattini = maximal
        .iter()
        .skip(1)
        .try_fold(maximal[0].clone(), |acc, h| acc.intersection(h))
        .unwrap();
    let elementary = m4.elements().iter().all(|x| frattini.contains(&x.pow(2)))
        && m4
            .elements()
            .iter()
            .all(|x| m4.elements().iter().all(|y| frattini.contains(&x.commutator(y))));
    c.check(
        "M_4 / Frattini elementary abelian of rank 4",
        rank == 4 && elementary && m4.order() / frattini.order() == 16,
        format!("rank {rank}, |Frattini| = {}", frattini.order()),
    );
    c.check("15 maximal subgroups of M_4", maximal.len() == 15, maximal.len());
    c.timed(start, Duration::from_secs(300));
    c.finish();
}

#[test]
fn criterion_4_constant_field_ratio() {
    let mut c = Criterion::new("4");
    let tower = ModelTower::build(5, ModelOptions::default()).unwrap();
    let ratio = tower.model(5).order() / tower.geometric(5).g.order();
    c.check("|M_5|/|G_5| = 8", ratio == 8 && tower.model(5).order() % tower.geometric(5).g.order() == 0, ratio);
    c.finish();
}

#[test]
fn criterion_5_discriminants() {
    let mut c = Criterion::new("5");
    for n in 1..=4 {
        let shape = discriminant_shape(n);
        c.check(
            &format!("Δ_{n} = ±2^c t^a (2-t)^b"),
            shape.is_ok(),
            shape.map_or_else(|e| e.to_string(), |s| s.to_string()),
        );
    }
    let start = Instant::now();
    let five = discriminant_shape(5);
    c.check(
        "Δ_5 = ±2^c t^a (2-t)^b (optional level)",
        five.is_ok() && start.elapsed() < Duration::from_secs(600),
        format!("{} in {:.2?}", five.map_or_else(|e| e.to_string(), |s| s.to_string()), start.elapsed()),
    );
    let d1 = discriminant_polynomial(1).unwrap();
    c.check("Δ_1 = 8t", d1 == IntPoly::from_i64(&[0, 8]), &d1);

    for n in 1..=6 {
        let d = iterate_metadata(n).unwrap().d;
        c.check(&format!("|D_{n}| = 4^{n}"), d.magnitude() == &BigUint::from(4u32).pow(n as u32), &d);
    }
    let its: Vec<_> = (1..=8).map(|n| iterate_pair(n).unwrap()).collect();
    // deg of the rational map g_n/h_n; at n = 1 the numerator is the constant 2
    for (k, it) in its.iter().enumerate() {
        let n = k + 1;
        let (dg, dh) = (it.g.degree().unwrap(), it.h.degree().unwrap());
        let degrees = dg.max(dh) == 1 << n && (n == 1 || dg == dh);
        c.check(
            &format!("lc(g_{n}) = 2, lc(h_{n}) = 1, degree 2^{n}"),
            it.g.leading_coefficient() == BigInt::from(2) && it.h.leading_coefficient() == BigInt::from(1) && degrees,
            format!("deg g = {dg}, deg h = {dh}"),
        );
    }
    for n in 2..=5 {
        for k in 2..=n {
            let r = resultant(&its[k - 1].g, &its[n - 1].h).unwrap();
            let bits = r.magnitude().bits().saturating_sub(1);
            c.check(
                &format!("Res(g_{k}, h_{n}) = ±2^e"),
                is_signed_power_of_two(&r),
                format!("{}2^{bits}", if r < BigInt::from(0) { "-" } else { "+" }),
            );
        }
    }
    c.finish();
}

#[test]
fn criterion_6_maximality() {
    let mut c = Criterion::new("6");
    let (_, tables) = level4_tables().unwrap();
    let start = Instant::now();
    let five = maximality_verdict(&BasePoint::parse("5").unwrap(), 10_000).unwrap();
    let took = start.elapsed();
    c.check("verdict(5) = Maximal", five.verdict == Verdict::Maximal, format!("{:?}", five.verdict));
    c.check("verdict(5) within 30 s", took < Duration::from_secs(30), format!("{took:.2?}"));
    let stored = serde_json::to_string(&five).unwrap();
    c.check(
        "certificate covers 15 subgroups and re-checks",
        five.eliminations.len() == 15
            && recheck_certificate(&five, tables).unwrap()
            && reobserve_certificate(&five).unwrap(),
        format!("{} eliminations, {} bytes stored", five.eliminations.len(), stored.len()),
    );

    let one = maximality_verdict(&BasePoint::parse("1").unwrap(), 10_000).unwrap();
    let via_squares = one.reason.as_deref().is_some_and(|r| r.contains("square-class")) && !one.square_class.passed;
    c.check(
        "verdict(1) = NotMaximal via square classes",
        one.verdict == Verdict::NotMaximal && via_squares,
        format!("{:?}", one.square_class.dependency),
    );
    let rejected = ["0", "2"].iter().all(|a| matches!(BasePoint::parse(a), Err(Error::ExcludedBasePoint(_))));
    c.check("a in {0, 2} rejected", rejected, "ExcludedBasePoint");

    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let mut inconsistent = Vec::new();
    let mut done = 0;
    while done < 100 {
        let a = BigRational::new(rng.gen_range(-20i64..=20).into(), rng.gen_range(1i64..=9).into());
        let Ok(a) = BasePoint::new(a) else { continue };
        if let Err(e @ Error::ModelInconsistency(_)) = maximality_verdict(&a, 10_000) {
            inconsistent.push(format!("{a}: {e}"));
        }
        done += 1;
    }
    c.check("no model inconsistency on 100 random rationals", inconsistent.is_empty(), format!("{inconsistent:?}"));
    c.finish();
}

#[test]
fn criterion_7_radical_identities() {
    let mut c = Criterion::new("7");
    let sweep = radical_sweep(20, 1, 256).unwrap();
    let worst = sweep.max_residual();
    c.check(
        "identities at 20 base points, 256 bits, residual < 1e-40",
        sweep.reports.len() == 20 && sweep.all_passed() && worst < 1e-40,
        format!("max residual {worst:.3e}"),
    );
    let mut ratios = Vec::new();
    for t0 in [(3, 2, 1), (-7, 5, 3), (1, -9, 4), (11, 1, 2)] {
        for (_, lo, hi) in precision_shrink(t0, 256).unwrap() {
            ratios.push(if lo == 0.0 { if hi == 0.0 { 0.0 } else { f64::INFINITY } } else { hi / lo });
        }
    }
    let worst_ratio = ratios.iter().copied().fold(0.0, f64::max);
    c.check(
        "residuals shrink >= 1e10 when precision doubles",
        worst_ratio <= 1e-10,
        format!("worst residual(512)/residual(256) = {worst_ratio:.3e}"),
    );
    c.finish();
}

#[test]
fn criterion_8_property_suites() {
    let mut c = Criterion::new("8");
    let omega: Vec<Portrait> = Portrait::enumerate_all(3).unwrap().collect();
    let mut oracle = ConjugacyOracle::new();
    let mut mismatches = 0;
    for u in &omega {
        let class: HashSet<Portrait> = omega.iter().map(|w| u.conjugate_by(w)).collect();
        for v in &omega {
            mismatches += usize::from(oracle.are_conjugate(u, v).unwrap() != class.contains(v));
        }
    }
    c.check(
        "conjugacy agrees with brute force on Ω_3 × Ω_3",
        mismatches == 0,
        format!("{} pairs, {mismatches} mismatches", omega.len() * omega.len()),
    );

    for n in 1..=3 {
        let r = verify_triple_theorem(n).unwrap();
        c.check(&format!("triple theorem at level {n}"), r.all_passed(), format!("{} sub-checks", r.checks.len()));
    }

    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let mut bad = 0;
    for _ in 0..10_000 {
        let n = rng.gen_range(1..=MAX_LEVEL);
        let [u, v, w] = [0; 3].map(|_| Portrait::random(n, &mut rng).unwrap());
        let uv = u.compose(&v).unwrap();
        let perm: Vec<usize> = u.leaf_permutation().iter().map(|&i| v.leaf_permutation()[i]).collect();
        let compose = uv.leaf_permutation() == perm
            && uv.compose(&w).unwrap() == u.compose(&v.compose(&w).unwrap()).unwrap()
            && u.compose(&u.invert()).unwrap().is_identity();
        let sign = (1..=n).all(|m| uv.sign(m).unwrap() == u.sign(m).unwrap() * v.sign(m).unwrap());
        let single = u.cycle_type().parts() == [1u32 << n];
        let odometer = u.is_level_odometer().unwrap() == single
            && single == (1..=n).all(|m| u.sign(m).unwrap() == -1)
            && single == (u.order() == 1 << n);
        bad += usize::from(!(compose && sign && odometer));
    }
    c.check("compose/sign/odometer on 10^4 random samples", bad == 0, format!("{bad} failures"));
    c.finish();
}
