//! Every module's invariant checks behind one entry point.

use std::collections::HashSet;
use std::path::PathBuf;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::arithmodel::{
    brute_normalizer_cross_check, frattini_rank, maximal_subgroups, model_claims, order_growth_rows, ModelOptions,
    ModelTower,
};
use crate::constantfield::{dihedral_constant_field_check, precision_shrink, radical_sweep};
use crate::error::{invalid, Result};
use crate::maximality::{
    level4_tables, maximality_verdict, recheck_certificate, BasePoint, Verdict, DEFAULT_PRIME_BOUND,
};
use crate::polyarith::{
    discriminant_shape, is_signed_power_of_two, iterate_metadata, iterate_pair, resultant, DiscriminantShape,
};
use crate::report::{Check, Report};
use crate::selfsim::{geometric_claims, geometric_tower, verify_geometric_presentation, verify_triple_theorem};
use crate::treeauto::{class_invariant, ConjugacyOracle, Portrait, MAX_LEVEL};

/// Caps for [`run_verify`]. The defaults are the full run.
#[derive(Clone, Debug)]
pub struct SuiteConfig {
    pub group_level: usize,
    pub model_level: usize,
    pub disc_level: usize,
    pub prime_bound: u64,
    pub samples: usize,
    pub precision: usize,
    pub seed: u64,
    pub property_samples: usize,
    pub cache_dir: Option<PathBuf>,
    pub allow_level6: bool,
}

impl Default for SuiteConfig {
    fn default() -> Self {
        Self {
            group_level: 6,
            model_level: 5,
            disc_level: 4,
            prime_bound: DEFAULT_PRIME_BOUND,
            samples: 20,
            precision: 256,
            seed: 1,
            property_samples: 10_000,
            cache_dir: None,
            allow_level6: false,
        }
    }
}

impl SuiteConfig {
    /// Everything capped at `level`.
    pub fn quick(level: usize) -> Self {
        Self {
            group_level: level,
            model_level: level.min(5),
            disc_level: level.min(4),
            samples: 5,
            property_samples: 2_000,
            ..Self::default()
        }
    }
}

fn prefixed(module: &str, checks: impl IntoIterator<Item = Check>) -> impl Iterator<Item = Check> {
    let module = module.to_string();
    checks.into_iter().map(move |mut c| {
        c.id = format!("{module}.{}", c.id);
        c
    })
}

pub fn treeauto_checks(cfg: &SuiteConfig) -> Result<Vec<Check>> {
    let mut out = Vec::new();
    let top = cfg.group_level.min(3);
    let mut agree = true;
    let mut pairs = 0usize;
    for n in 1..=top {
        let all: Vec<Portrait> = Portrait::enumerate_all(n)?.collect();
        let mut oracle = ConjugacyOracle::new();
        for u in &all {
            let class: HashSet<Portrait> = all.iter().map(|w| u.conjugate_by(w)).collect();
            for v in &all {
                let brute = class.contains(v);
                agree &= oracle.are_conjugate(u, v)? == brute && (class_invariant(u) == class_invariant(v)) == brute;
                pairs += 1;
            }
        }
    }
    out.push(Check::new(
        format!("conjugacy-brute-force[n<={top}]"),
        agree,
        format!("{pairs} pairs"),
    ));

    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let mut bad = Vec::new();
    for _ in 0..cfg.property_samples {
        let n = rng.gen_range(1..=MAX_LEVEL);
        let [u, v, w] = [0; 3].map(|_| Portrait::random(n, &mut rng).unwrap());
        let assoc = u.compose(&v)?.compose(&w)? == u.compose(&v.compose(&w)?)?;
        let inverse = u.compose(&u.invert())?.is_identity();
        let uv = u.compose(&v)?;
        let signs = (1..=n).all(|m| uv.sign(m).unwrap() == u.sign(m).unwrap() * v.sign(m).unwrap());
        let single = u.cycle_type().parts() == [1u32 << n];
        let all_odd = (1..=n).all(|m| u.sign(m).unwrap() == -1);
        let odometer = u.is_level_odometer()? == single && single == all_odd && (u.order() == 1 << n) == single;
        if !(assoc && inverse && signs && odometer) {
            bad.push(u.encode());
        }
    }
    out.push(Check::new(
        "compose-sign-odometer-samples",
        bad.is_empty(),
        format!("{} samples, {} failures {:?}", cfg.property_samples, bad.len(), bad.first()),
    ));
    Ok(out)
}

pub fn selfsim_checks(cfg: &SuiteConfig) -> Result<Vec<Check>> {
    let top = cfg.group_level.clamp(1, MAX_LEVEL);
    let mut out = Vec::new();
    let pres = verify_geometric_presentation(top.min(5))?;
    out.extend(pres.checks);
    let tower = geometric_tower(top)?;
    out.extend(geometric_claims(&tower)?);
    let triple = verify_triple_theorem(top.min(3))?;
    out.push(Check::new(
        format!("triple-theorem[n<={}]", top.min(3)),
        triple.all_passed(),
        format!("{} sub-checks", triple.checks.len()),
    ));
    Ok(out)
}

pub fn arithmodel_checks(cfg: &SuiteConfig) -> Result<Vec<Check>> {
    let top = cfg.model_level;
    if top == 0 {
        return invalid("model level must be >= 1");
    }
    let opts = ModelOptions {
        allow_level6: cfg.allow_level6,
    };
    let tower = ModelTower::build_cached(top, opts, cfg.cache_dir.as_deref())?;
    let mut out = model_claims(&tower)?;
    let rows = order_growth_rows(&tower);
    for r in &rows {
        out.push(Check::new(
            format!("M.bound[n={}]", r.n),
            r.m_order as u64 <= r.bound,
            format!("|M_{}| = {} <= {}", r.n, r.m_order, r.bound),
        ));
        if let Some(ratio) = r.step_ratio.filter(|_| r.n >= 4) {
            out.push(Check::new(
                format!("M.step[n={}]", r.n),
                ratio <= 4.0,
                format!("|M_{}|/|M_{}| = {ratio}", r.n, r.n - 1),
            ));
        }
    }
    if top >= 4 {
        out.push(Check::equal("M.order[n=4]", tower.model(4).order(), 256));
        let m4 = tower.model(4);
        out.push(Check::equal("M.frattini-rank[n=4]", frattini_rank(m4)?, 4));
        out.push(Check::equal("M.maximal-subgroups[n=4]", maximal_subgroups(m4)?.len(), 15));
        out.extend(brute_normalizer_cross_check(4)?.checks.into_iter().map(|mut c| {
            c.id = format!("{}[n=4]", c.id);
            c
        }));
    }
    if top >= 5 {
        out.push(Check::equal("M.order[n=5]", tower.model(5).order(), 1024));
        out.push(Check::equal(
            "M.constant-field-ratio[n=5]",
            tower.model(5).order() / tower.geometric(5).g.order(),
            8,
        ));
    }
    let tail: Vec<_> = rows.iter().filter(|r| r.n >= 3).collect();
    if tail.len() >= 2 {
        out.push(Check::new(
            "M.density-decreasing",
            tail.windows(2).all(|w| w[1].density < w[0].density),
            tail.iter().map(|r| format!("{:.4}", r.density)).collect::<Vec<_>>().join(" > "),
        ));
    }
    Ok(out)
}

pub fn polyarith_checks(cfg: &SuiteConfig) -> Result<Vec<Check>> {
    let mut out = Vec::new();
    let lc_ok = (2..=8).all(|n| {
        let it = iterate_pair(n).unwrap();
        it.g.degree() == Some(1 << n)
            && it.h.degree() == Some(1 << n)
            && it.g.leading_coefficient() == 2.into()
            && it.h.leading_coefficient() == 1.into()
    });
    out.push(Check::new("iterate-degrees-and-leading-coefficients[n<=8]", lc_ok, "deg 2^n, lc 2 and 1"));
    for n in 1..=6 {
        let m = iterate_metadata(n)?;
        out.push(Check::new(
            format!("wronskian-leading-coefficient[n={n}]"),
            m.d.magnitude() == &num_bigint::BigUint::from(4u32).pow(n as u32),
            format!("D_{n} = {} (|D_n| = 4^n asserted, sign recorded)", m.d),
        ));
    }
    let res_top = cfg.disc_level.clamp(2, 5);
    let its: Vec<_> = (1..=res_top).map(iterate_pair).collect::<Result<_>>()?;
    let mut res_ok = true;
    for n in 2..=res_top {
        for k in 2..=n {
            res_ok &= is_signed_power_of_two(&resultant(&its[k - 1].g, &its[n - 1].h)?);
        }
    }
    out.push(Check::new(
        format!("cross-resultants-power-of-two[n<={res_top}]"),
        res_ok,
        "Res(g_k, h_n) = ±2^e for 2 <= k <= n",
    ));
    for n in 1..=cfg.disc_level.min(5) {
        let shape = discriminant_shape(n);
        let (passed, detail) = match &shape {
            Ok(s) => (true, s.to_string()),
            Err(e) => (false, e.to_string()),
        };
        out.push(Check::new(format!("discriminant-shape[n={n}]"), passed, detail));
        if n == 1 {
            out.push(Check::equal(
                "discriminant-first-level",
                shape.ok(),
                Some(DiscriminantShape { sign: 1, c: 3, a: 1, b: 0 }),
            ));
        }
    }
    Ok(out)
}

pub fn maximality_checks(cfg: &SuiteConfig) -> Result<Vec<Check>> {
    let mut out = Vec::new();
    let (_, tables) = level4_tables()?;
    let five = maximality_verdict(&BasePoint::parse("5")?, cfg.prime_bound)?;
    out.push(Check::equal("verdict[a=5]", five.verdict, Verdict::Maximal));
    out.push(Check::new(
        "certificate-recheck[a=5]",
        recheck_certificate(&five, tables)?,
        format!("{} eliminations, {} primes", five.eliminations.len(), five.primes_tried),
    ));
    let one = maximality_verdict(&BasePoint::parse("1")?, cfg.prime_bound)?;
    out.push(Check::equal("verdict[a=1]", one.verdict, Verdict::NotMaximal));
    out.push(Check::new(
        "postcritical-rejected",
        BasePoint::parse("0").is_err() && BasePoint::parse("2").is_err(),
        "a = 0 and a = 2 rejected",
    ));
    Ok(out)
}

pub fn constantfield_checks(cfg: &SuiteConfig) -> Result<Vec<Check>> {
    let mut out = Vec::new();
    let sweep = radical_sweep(cfg.samples, cfg.seed, cfg.precision)?;
    out.push(Check::new(
        format!("radical-identities[{} samples]", cfg.samples),
        sweep.all_passed(),
        format!("max relative residual {:.3e} at {} bits", sweep.max_residual(), cfg.precision),
    ));
    let shrink = precision_shrink((3, 2, 1), cfg.precision)?;
    let worst = shrink
        .iter()
        .filter(|(_, lo, _)| *lo > 0.0)
        .map(|(_, lo, hi)| hi / lo)
        .fold(0.0, f64::max);
    out.push(Check::new(
        "residual-shrink-on-doubling",
        worst <= 1e-10,
        format!("worst ratio {worst:.3e}"),
    ));
    out.extend(dihedral_constant_field_check()?.checks);
    Ok(out)
}

/// Run every module suite under `cfg`.
pub fn run_verify(cfg: &SuiteConfig) -> Result<Report> {
    let mut report = Report::new("verification suite");
    report.extend(prefixed("treeauto", treeauto_checks(cfg)?));
    report.extend(prefixed("selfsim", selfsim_checks(cfg)?));
    report.extend(prefixed("arithmodel", arithmodel_checks(cfg)?));
    report.extend(prefixed("polyarith", polyarith_checks(cfg)?));
    report.extend(prefixed("maximality", maximality_checks(cfg)?));
    report.extend(prefixed("constantfield", constantfield_checks(cfg)?));
    Ok(report)
}
