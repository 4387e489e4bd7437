use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use img_core::polyarith::{
    discriminant, discriminant_shape, factor_degrees_mod_p, is_signed_power_of_two, iterate_metadata, iterate_pair,
    resultant, resultant_modular, specialize_numerator, DiscriminantShape, FactorPattern, IntPoly,
};
use img_core::treeauto::CycleType;

fn random_poly(rng: &mut ChaCha8Rng) -> IntPoly {
    let deg = rng.gen_range(0..=12);
    let mut c: Vec<BigInt> = (0..=deg).map(|_| BigInt::from(rng.gen_range(-1000i64..=1000))).collect();
    if c[deg].is_zero() {
        c[deg] = BigInt::one();
    }
    IntPoly::new(c)
}

#[test]
fn resultant_algorithms_agree() {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for _ in 0..1000 {
        let (p, q) = (random_poly(&mut rng), random_poly(&mut rng));
        let r = resultant(&p, &q).unwrap();
        assert_eq!(r, resultant_modular(&p, &q).unwrap(), "{p:?} {q:?}");
        let sign = if p.degree().unwrap() * q.degree().unwrap() % 2 == 1 { -1 } else { 1 };
        assert_eq!(r, BigInt::from(sign) * resultant(&q, &p).unwrap());
    }
    // a common root forces zero
    let common = IntPoly::from_i64(&[-3, 1]);
    let p = &common * &IntPoly::from_i64(&[1, 1, 1]);
    let q = &common * &IntPoly::from_i64(&[5, 0, 2]);
    assert!(resultant(&p, &q).unwrap().is_zero());
    assert!(resultant_modular(&p, &q).unwrap().is_zero());
}

#[test]
fn resultant_of_second_iterate() {
    let it = iterate_pair(2).unwrap();
    // g_2 = 2 (x-1)^4, so Res = 2^deg(h_2) · h_2(1)^4
    let oracle = BigInt::from(2).pow(4) * it.h.eval(&BigInt::one()).pow(4);
    assert_eq!(resultant(&it.g, &it.h).unwrap(), oracle);
    assert_eq!(oracle, BigInt::from(1 << 12));
}

#[test]
fn degrees_and_leading_coefficients() {
    for n in 2..=8 {
        let it = iterate_pair(n).unwrap();
        assert_eq!(it.g.degree(), Some(1 << n));
        assert_eq!(it.h.degree(), Some(1 << n));
        assert_eq!(it.g.leading_coefficient(), BigInt::from(2));
        assert_eq!(it.h.leading_coefficient(), BigInt::one());
    }
    for n in 1..=6 {
        let meta = iterate_metadata(n).unwrap();
        assert_eq!(meta.d.abs(), BigInt::from(4).pow(n as u32), "level {n}");
        assert_eq!(meta.m, 1 << n);
    }
    assert_eq!(iterate_metadata(2).unwrap().q, 5);
}

#[test]
fn cross_resultants_are_powers_of_two() {
    let its: Vec<_> = (1..=5).map(|n| iterate_pair(n).unwrap()).collect();
    for n in 2..=5 {
        for k in 2..=n {
            let r = resultant(&its[k - 1].g, &its[n - 1].h).unwrap();
            assert!(is_signed_power_of_two(&r), "Res(g_{k}, h_{n}) = {r}");
        }
    }
}

#[test]
fn discriminant_shapes_match_symbolic_oracle() {
    let expected = [
        DiscriminantShape { sign: 1, c: 3, a: 1, b: 0 },
        DiscriminantShape { sign: -1, c: 16, a: 3, b: 1 },
        DiscriminantShape { sign: 1, c: 68, a: 6, b: 4 },
        DiscriminantShape { sign: 1, c: 272, a: 12, b: 10 },
    ];
    for (n, want) in (1..=4).zip(expected) {
        assert_eq!(discriminant_shape(n).unwrap(), want, "level {n}");
    }
}

#[test]
fn specialisation_matches_shape() {
    for n in 1..=3 {
        let shape = discriminant_shape(n).unwrap().to_poly();
        for a in [-7i64, -1, 1, 3, 5, 11] {
            let ab = BigInt::from(a);
            let full = &iterate_pair(n).unwrap().g - &iterate_pair(n).unwrap().h.scale(&ab);
            let special = specialize_numerator(n, &BigRational::from_integer(ab.clone())).unwrap();
            let content = full.content();
            let d = special.degree().unwrap() as u32;
            // disc(c p) = c^(2d-2) disc(p)
            let lhs = discriminant(&special).unwrap() * content.pow(2 * d - 2);
            assert_eq!(lhs, shape.eval(&ab), "n = {n}, a = {a}");
        }
    }
}

#[test]
fn discriminant_primes_divide_base_point_data() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for _ in 0..12 {
        let u: i64 = rng.gen_range(-40..=40);
        let v: i64 = rng.gen_range(1..=20);
        let a = BigRational::new(u.into(), v.into());
        if a.is_zero() || a == BigRational::from_integer(2.into()) {
            continue;
        }
        let two_minus = BigRational::from_integer(2.into()) - &a;
        let allowed = BigInt::from(2) * a.numer().abs() * two_minus.numer().abs() * a.denom();
        for n in 1..=4 {
            let mut d = discriminant(&specialize_numerator(n, &a).unwrap()).unwrap().abs();
            loop {
                let g = d.gcd(&allowed);
                if g.is_one() {
                    break;
                }
                d /= g;
            }
            assert!(d.is_one(), "n = {n}, a = {a}: stray factor {d}");
        }
    }
}

#[test]
fn degree_patterns() {
    let five = BigRational::from_integer(5.into());
    let p1 = specialize_numerator(1, &five).unwrap();
    assert_eq!(
        factor_degrees_mod_p(&p1, 3).unwrap(),
        FactorPattern::Degrees(CycleType::new(vec![1, 1]))
    );
    let p4 = specialize_numerator(4, &five).unwrap();
    let mut usable = 0;
    for p in [3u64, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47] {
        match factor_degrees_mod_p(&p4, p) {
            Ok(FactorPattern::Degrees(t)) => {
                assert_eq!(t.total(), 16);
                assert!(t.parts().iter().all(|d| d.is_power_of_two()));
                usable += 1;
            }
            Ok(FactorPattern::NotSquarefree) | Err(_) => {}
        }
    }
    assert!(usable >= 5);
}
