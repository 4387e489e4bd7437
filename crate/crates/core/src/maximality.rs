//! Level-4 maximality certificates for a rational base point `a`.
//!
//! Two ingredients: the square classes of `-1, 2, a, 2 - a` must be
//! independent, and Frobenius data at good primes must rule out every
//! maximal subgroup of the level-4 model `M_4`.
//!
//! Elimination compares per-level cycle-type profiles rather than leaf
//! cycle types alone. Conjugation in `Aut(T_4)` preserves levels, so the
//! profile is just as much a class invariant, and it separates maximal
//! subgroups that share the leaf table of `M_4`.

use std::collections::BTreeSet;
use std::sync::OnceLock;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use rayon::prelude::*;
use serde::ser::SerializeMap;
use serde::{Serialize, Serializer};

use crate::arithmodel::{build_model, cycle_type_table, profile_table, ArithLevelModel, ModelOptions};
use crate::error::{invalid, Error, Result};
use crate::polyarith::{
    factor_degrees_mod_p, format_rational, specialize_numerator, squarefree_part, FactorPattern, IntPoly,
};
use crate::treeauto::{CycleType, LevelProfile};

pub const VERDICT_LEVEL: usize = 4;
pub const DEFAULT_PRIME_BOUND: u64 = 10_000;
pub const MIN_USABLE_PRIMES: usize = 5;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BasePoint(BigRational);

impl BasePoint {
    pub fn new(a: BigRational) -> Result<Self> {
        let two = BigRational::from_integer(2.into());
        if a.is_zero() || a == two {
            return Err(Error::ExcludedBasePoint(format_rational(&a)));
        }
        Ok(Self(a))
    }

    pub fn parse(s: &str) -> Result<Self> {
        Self::new(crate::polyarith::parse_rational(s)?)
    }

    pub fn value(&self) -> &BigRational {
        &self.0
    }
}

impl std::fmt::Display for BasePoint {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&format_rational(&self.0))
    }
}

const CLASS_LABELS: [&str; 4] = ["-1", "2", "a", "2-a"];

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SquareClassReport {
    pub passed: bool,
    /// Squarefree representatives of `-1, 2, a, 2 - a`.
    #[serde(serialize_with = "serialize_classes")]
    pub classes: [BigInt; 4],
    /// Smallest nonempty subset whose product is a square.
    pub dependency: Option<Vec<String>>,
}

fn serialize_classes<S: Serializer>(c: &[BigInt; 4], s: S) -> std::result::Result<S::Ok, S::Error> {
    let mut m = s.serialize_map(Some(4))?;
    for (label, v) in CLASS_LABELS.iter().zip(c) {
        m.serialize_entry(label, &v.to_string())?;
    }
    m.end()
}

pub fn square_class_test(a: &BasePoint) -> Result<SquareClassReport> {
    let two = BigRational::from_integer(2.into());
    let values = [
        BigRational::from_integer((-1).into()),
        two.clone(),
        a.0.clone(),
        &two - &a.0,
    ];
    let classes = [
        squarefree_part(&values[0])?,
        squarefree_part(&values[1])?,
        squarefree_part(&values[2])?,
        squarefree_part(&values[3])?,
    ];
    let mut subsets: Vec<u8> = (1u8..16).collect();
    subsets.sort_by_key(|m| (m.count_ones(), *m));
    let mut dependency = None;
    for mask in subsets {
        let product: BigInt = (0..4)
            .filter(|i| mask >> i & 1 == 1)
            .map(|i| classes[i].clone())
            .product();
        if squarefree_part(&BigRational::from_integer(product))?.is_one() {
            dependency = Some(
                (0..4)
                    .filter(|i| mask >> i & 1 == 1)
                    .map(|i| CLASS_LABELS[i].to_string())
                    .collect(),
            );
            break;
        }
    }
    Ok(SquareClassReport {
        passed: dependency.is_none(),
        classes,
        dependency,
    })
}

/// Degree patterns of one Frobenius element on levels `1..=4`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct FrobeniusObservation {
    pub prime: u64,
    pub cycle_type: CycleType,
    pub profile: LevelProfile,
}

fn numerators(a: &BasePoint) -> Result<Vec<IntPoly>> {
    (1..=VERDICT_LEVEL)
        .map(|k| specialize_numerator(k, &a.0).map(|p| p.with_positive_leading()))
        .collect()
}

/// `None` unless the prime is odd, keeps every degree and every level is
/// squarefree modulo it.
fn observe(numerators: &[IntPoly], prime: u64) -> Result<Option<FrobeniusObservation>> {
    if prime == 2 {
        return Ok(None);
    }
    let mut levels = Vec::with_capacity(numerators.len());
    for p in numerators {
        match factor_degrees_mod_p(p, prime) {
            Ok(FactorPattern::Degrees(t)) => levels.push(t),
            Ok(FactorPattern::NotSquarefree) | Err(Error::BadPrime { .. }) => return Ok(None),
            Err(e) => return Err(e),
        }
    }
    Ok(Some(FrobeniusObservation {
        prime,
        cycle_type: levels.last().unwrap().clone(),
        profile: LevelProfile(levels),
    }))
}

fn odd_primes_upto(bound: u64) -> Vec<u64> {
    num_prime::nt_funcs::primes(bound + 1)
        .into_iter()
        .filter(|&p| p > 2 && p <= bound)
        .collect()
}

/// Observations at all good odd primes up to `prime_bound`, by prime.
pub fn sample_frobenius(a: &BasePoint, prime_bound: u64) -> Result<Vec<FrobeniusObservation>> {
    Ok(sample_frobenius_counted(a, prime_bound)?.0)
}

fn sample_frobenius_counted(a: &BasePoint, prime_bound: u64) -> Result<(Vec<FrobeniusObservation>, usize)> {
    if prime_bound < 3 {
        return invalid("prime bound must be at least 3");
    }
    let polys = numerators(a)?;
    let primes = odd_primes_upto(prime_bound);
    let found: Vec<Option<FrobeniusObservation>> = primes
        .par_iter()
        .map(|&p| observe(&polys, p))
        .collect::<Result<_>>()?;
    let obs: Vec<FrobeniusObservation> = found.into_iter().flatten().collect();
    if obs.len() < MIN_USABLE_PRIMES {
        return Err(Error::InsufficientData(format!(
            "{} usable primes up to {prime_bound}, need {MIN_USABLE_PRIMES}",
            obs.len()
        )));
    }
    Ok((obs, primes.len()))
}

/// Leaf and profile tables of `M_4` and of its maximal subgroups.
#[derive(Clone, Debug)]
pub struct EliminationTables {
    pub model_types: BTreeSet<CycleType>,
    pub model_profiles: BTreeSet<LevelProfile>,
    pub subgroup_types: Vec<BTreeSet<CycleType>>,
    pub subgroup_profiles: Vec<BTreeSet<LevelProfile>>,
}

impl EliminationTables {
    pub fn from_model(model: &ArithLevelModel) -> Result<Self> {
        if model.level != VERDICT_LEVEL {
            return invalid(format!("elimination needs the level-{VERDICT_LEVEL} model"));
        }
        Ok(Self {
            model_types: cycle_type_table(&model.m),
            model_profiles: profile_table(&model.m),
            subgroup_types: model.maximal_subgroups.iter().map(cycle_type_table).collect(),
            subgroup_profiles: model.maximal_subgroups.iter().map(profile_table).collect(),
        })
    }

    pub fn subgroup_count(&self) -> usize {
        self.subgroup_profiles.len()
    }
}

/// The level-4 model and its tables, built once per process.
pub fn level4_tables() -> Result<&'static (ArithLevelModel, EliminationTables)> {
    static CELL: OnceLock<std::result::Result<(ArithLevelModel, EliminationTables), Error>> = OnceLock::new();
    CELL.get_or_init(|| {
        let model = build_model(VERDICT_LEVEL, ModelOptions::default())?;
        let tables = EliminationTables::from_model(&model)?;
        Ok((model, tables))
    })
    .as_ref()
    .map_err(Clone::clone)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Witness {
    /// The leaf cycle type alone is missing from the subgroup.
    CycleType,
    /// Only the full level profile is missing.
    Profile,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Elimination {
    pub subgroup: String,
    pub prime: u64,
    pub cycle_type: CycleType,
    pub profile: LevelProfile,
    pub witness: Witness,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EliminationReport {
    pub eliminations: Vec<Elimination>,
    pub surviving: Vec<String>,
}

pub fn subgroup_name(i: usize) -> String {
    ArithLevelModel::maximal_subgroup_name(i)
}

/// Eliminate every maximal subgroup whose tables miss some observation.
/// Observations outside the model's own table are an error.
pub fn eliminate_maximal_subgroups(obs: &[FrobeniusObservation], tables: &EliminationTables) -> Result<EliminationReport> {
    let mut sorted: Vec<&FrobeniusObservation> = obs.iter().collect();
    sorted.sort_by_key(|o| o.prime);
    if let Some(bad) = sorted.iter().find(|o| !tables.model_profiles.contains(&o.profile)) {
        return Err(Error::ModelInconsistency(format!(
            "Frobenius at p = {} has profile {} outside M_4",
            bad.prime, bad.profile
        )));
    }
    let mut eliminations = Vec::new();
    let mut surviving = Vec::new();
    for i in 0..tables.subgroup_count() {
        let hit = sorted
            .iter()
            .find(|o| !tables.subgroup_types[i].contains(&o.cycle_type))
            .map(|o| (o, Witness::CycleType))
            .or_else(|| {
                sorted
                    .iter()
                    .find(|o| !tables.subgroup_profiles[i].contains(&o.profile))
                    .map(|o| (o, Witness::Profile))
            });
        match hit {
            Some((o, witness)) => eliminations.push(Elimination {
                subgroup: subgroup_name(i),
                prime: o.prime,
                cycle_type: o.cycle_type.clone(),
                profile: o.profile.clone(),
                witness,
            }),
            None => surviving.push(subgroup_name(i)),
        }
    }
    Ok(EliminationReport { eliminations, surviving })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    Maximal,
    NotMaximal,
    Inconclusive,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct MaximalityVerdict {
    #[serde(serialize_with = "serialize_base_point")]
    pub a: BasePoint,
    pub verdict: Verdict,
    pub square_class: SquareClassReport,
    pub eliminations: Vec<Elimination>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub surviving: Vec<String>,
    pub primes_tried: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub reason: Option<String>,
}

fn serialize_base_point<S: Serializer>(a: &BasePoint, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.serialize_str(&a.to_string())
}

const SQUARE_CLASS_CHAIN: &str = "the field fixed by the Frattini subgroup of the arithmetic group contains \
Q(i, sqrt 2, sqrt t, sqrt(t-2)) and has degree 16; at a maximal base point its specialisation must keep degree 16, \
which needs -1, 2, a, 2-a independent modulo squares";

pub fn maximality_verdict(a: &BasePoint, prime_bound: u64) -> Result<MaximalityVerdict> {
    let (_, tables) = level4_tables()?;
    maximality_verdict_with(a, prime_bound, tables)
}

pub fn maximality_verdict_with(a: &BasePoint, prime_bound: u64, tables: &EliminationTables) -> Result<MaximalityVerdict> {
    let square_class = square_class_test(a)?;
    if !square_class.passed {
        let dep = square_class.dependency.as_ref().unwrap().join(" * ");
        return Ok(MaximalityVerdict {
            a: a.clone(),
            verdict: Verdict::NotMaximal,
            square_class,
            eliminations: Vec::new(),
            surviving: Vec::new(),
            primes_tried: 0,
            reason: Some(format!("square-class dependency: {dep} is a square; {SQUARE_CLASS_CHAIN}")),
        });
    }
    let (obs, primes_tried) = sample_frobenius_counted(a, prime_bound)?;
    let report = eliminate_maximal_subgroups(&obs, tables)?;
    let verdict = if report.surviving.is_empty() {
        Verdict::Maximal
    } else {
        Verdict::Inconclusive
    };
    Ok(MaximalityVerdict {
        a: a.clone(),
        verdict,
        square_class,
        eliminations: report.eliminations,
        surviving: report.surviving,
        primes_tried,
        reason: None,
    })
}

/// Re-check a certificate by table lookups: every named subgroup is
/// eliminated by an observation inside `M_4` and outside the subgroup.
pub fn recheck_certificate(v: &MaximalityVerdict, tables: &EliminationTables) -> Result<bool> {
    if v.verdict != Verdict::Maximal {
        return Ok(false);
    }
    let mut seen = BTreeSet::new();
    for e in &v.eliminations {
        let Some(i) = (0..tables.subgroup_count()).find(|&i| subgroup_name(i) == e.subgroup) else {
            return Ok(false);
        };
        let inside_model = tables.model_profiles.contains(&e.profile) && e.profile.leaf() == Some(&e.cycle_type);
        let outside = match e.witness {
            Witness::CycleType => !tables.subgroup_types[i].contains(&e.cycle_type),
            Witness::Profile => !tables.subgroup_profiles[i].contains(&e.profile),
        };
        if !(inside_model && outside) {
            return Ok(false);
        }
        seen.insert(i);
    }
    Ok(seen.len() == tables.subgroup_count())
}

/// Recompute each witnessing observation from its prime.
pub fn reobserve_certificate(v: &MaximalityVerdict) -> Result<bool> {
    let polys = numerators(&v.a)?;
    for e in &v.eliminations {
        match observe(&polys, e.prime)? {
            Some(o) if o.profile == e.profile && o.cycle_type == e.cycle_type => {}
            _ => return Ok(false),
        }
    }
    Ok(true)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn bp(s: &str) -> BasePoint {
        BasePoint::parse(s).unwrap()
    }

    #[test]
    fn square_classes() {
        let five = square_class_test(&bp("5")).unwrap();
        assert!(five.passed);
        assert_eq!(five.classes, [(-1).into(), 2.into(), 5.into(), (-3).into()]);
        let one = square_class_test(&bp("1")).unwrap();
        assert_eq!(one.dependency, Some(vec!["a".to_string()]));
        let eight = square_class_test(&bp("8")).unwrap();
        assert_eq!(eight.dependency, Some(vec!["2".to_string(), "a".to_string()]));
        assert!(matches!(BasePoint::parse("0"), Err(Error::ExcludedBasePoint(_))));
        assert!(matches!(BasePoint::parse("4/2"), Err(Error::ExcludedBasePoint(_))));
    }

    #[test]
    fn representation_does_not_matter() {
        for (u, v) in [(5, 1), (7, 3), (-11, 4), (3, 8)] {
            let base = square_class_test(&bp(&format!("{u}/{v}"))).unwrap();
            for w in [2, 3, 10] {
                let scaled = bp(&format!("{}/{}", u * w * w, v * w * w));
                assert_eq!(square_class_test(&scaled).unwrap(), base);
            }
        }
    }

    #[test]
    fn level_one_observation_at_three() {
        let polys = vec![specialize_numerator(1, bp("5").value()).unwrap().with_positive_leading()];
        let o = observe(&polys, 3).unwrap().unwrap();
        assert_eq!(o.cycle_type, CycleType::new(vec![1, 1]));
        assert!(observe(&polys, 2).unwrap().is_none());
    }
}
