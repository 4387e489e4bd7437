//! A finite-level model `M_n` of the arithmetic monodromy group.
//!
//! `M_1 = Aut(T_1)` and, for `n >= 2`, `M_n` is the set of `(x, y)τ` with
//! `x, y ∈ M_(n-1)`, `y x^-1 ∈ U_(n-1)`, normalising both `G_n` and `U_n`.
//! The arithmetic group at level `n` lies in `M_n`.

use std::collections::{BTreeSet, HashMap, HashSet};
use std::path::Path;

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{invalid, Error, Result};
use crate::report::{Check, Report};
use crate::selfsim::cache::load_or_compute;
use crate::selfsim::{geometric_tower, GeometricLevel, LevelGroup};
use crate::treeauto::{CycleType, LevelProfile, Portrait};

/// System tag used in cache file names.
pub const CACHE_SYSTEM: &str = "f";

/// Highest level built without [`ModelOptions::allow_level6`].
pub const DEFAULT_MODEL_CAP: usize = 5;

#[derive(Clone, Copy, Debug, Default)]
pub struct ModelOptions {
    pub allow_level6: bool,
}

/// Candidate bookkeeping for one level of the model.
#[derive(Clone, Copy, Debug, Default, Serialize)]
pub struct ModelStats {
    pub candidates: usize,
    pub normalise_g: usize,
    /// Candidates normalising `G_n` but not `U_n`.
    pub dropped_by_u_filter: usize,
    /// Loaded from the cache; the counters above are then zero.
    pub from_cache: bool,
}

#[derive(Clone, Debug)]
pub struct ArithLevelModel {
    pub level: usize,
    pub m: LevelGroup,
    pub g: LevelGroup,
    pub u: LevelGroup,
    pub frattini: LevelGroup,
    pub maximal_subgroups: Vec<LevelGroup>,
    pub stats: ModelStats,
}

impl ArithLevelModel {
    pub fn maximal_subgroup_name(i: usize) -> String {
        format!("Mmax-{:02}", i + 1)
    }
}

/// `M_1, ..., M_n` with the geometric data they were built from.
#[derive(Clone, Debug)]
pub struct ModelTower {
    pub geometric: Vec<GeometricLevel>,
    pub models: Vec<LevelGroup>,
    pub stats: Vec<ModelStats>,
}

impl ModelTower {
    pub fn build(n: usize, opts: ModelOptions) -> Result<Self> {
        Self::build_cached(n, opts, None)
    }

    /// As [`ModelTower::build`], reading and writing `M_k` through the group
    /// cache in `cache_dir`. Rejected cache files are recomputed.
    pub fn build_cached(n: usize, opts: ModelOptions, cache_dir: Option<&Path>) -> Result<Self> {
        check_model_level(n, opts)?;
        let geometric = geometric_tower(n)?;
        let mut models = vec![LevelGroup::full(1)?];
        let mut stats = vec![ModelStats {
            candidates: 2,
            normalise_g: 2,
            ..Default::default()
        }];
        for k in 2..=n {
            let mut fresh = None;
            let m = load_or_compute(cache_dir, CACHE_SYSTEM, "M", k, || {
                let (m, s) = next_level(&models[k - 2], &geometric[k - 2], &geometric[k - 1])?;
                fresh = Some(s);
                Ok(m)
            })?;
            if fresh.is_none() && !geometric[k - 1].g.is_subgroup_of(&m) {
                return Err(Error::Cache(format!("cached M_{k} does not contain G_{k}")));
            }
            models.push(m);
            stats.push(fresh.unwrap_or(ModelStats {
                from_cache: true,
                ..Default::default()
            }));
        }
        Ok(Self {
            geometric,
            models,
            stats,
        })
    }

    pub fn top(&self) -> usize {
        self.models.len()
    }

    pub fn model(&self, n: usize) -> &LevelGroup {
        &self.models[n - 1]
    }

    pub fn geometric(&self, n: usize) -> &GeometricLevel {
        &self.geometric[n - 1]
    }
}

fn check_model_level(n: usize, opts: ModelOptions) -> Result<()> {
    if n == 0 {
        return invalid("model level must be >= 1");
    }
    let cap = if opts.allow_level6 { 6 } else { DEFAULT_MODEL_CAP };
    if n > cap {
        return Err(Error::ResourceLimit {
            what: format!("arithmetic model at level {n}"),
            cap: cap as u64,
        });
    }
    Ok(())
}

fn next_level(prev_m: &LevelGroup, prev: &GeometricLevel, cur: &GeometricLevel) -> Result<(LevelGroup, ModelStats)> {
    let g_gens = [cur.a1, cur.a3];
    let u_gens = cur.u.generators().to_vec();
    let rhos = prev.u.elements();

    let per_x: Vec<(Vec<Portrait>, ModelStats)> = prev_m
        .elements()
        .par_iter()
        .map(|x| {
            let mut keep = Vec::new();
            let mut st = ModelStats::default();
            for rho in rhos {
                // y x^-1 = rho
                let y = rho.mul(x);
                if !prev_m.contains(&y) {
                    continue;
                }
                for swap in [false, true] {
                    let e = Portrait::from_sections(x, &y, swap).expect("levels agree");
                    st.candidates += 1;
                    let normalises_g = g_gens.iter().all(|g| cur.g.contains(&g.conjugate_by(&e)));
                    if !normalises_g {
                        continue;
                    }
                    st.normalise_g += 1;
                    if u_gens.iter().all(|u| cur.u.contains(&u.conjugate_by(&e))) {
                        keep.push(e);
                    } else {
                        st.dropped_by_u_filter += 1;
                    }
                }
            }
            (keep, st)
        })
        .collect();

    let mut stats = ModelStats::default();
    let mut elements = Vec::new();
    for (keep, st) in per_x {
        elements.extend(keep);
        stats.candidates += st.candidates;
        stats.normalise_g += st.normalise_g;
        stats.dropped_by_u_filter += st.dropped_by_u_filter;
    }
    elements.sort_unstable();
    let level = cur.level;
    verify_closed(&elements, level)?;
    let m = LevelGroup::from_elements(level, elements)
        .map_err(|e| Error::ModelConstruction(format!("level {level}: {e}")))?;
    Ok((m, stats))
}

/// Every product and inverse stays in the set; otherwise report a pair.
fn verify_closed(elements: &[Portrait], level: usize) -> Result<()> {
    let set: HashSet<Portrait> = elements.iter().copied().collect();
    if let Some(x) = elements.iter().find(|x| !set.contains(&x.invert())) {
        return Err(Error::ModelConstruction(format!("level {level}: inverse of {x} missing")));
    }
    let violation = elements.par_iter().find_map_any(|x| {
        elements
            .iter()
            .find(|y| !set.contains(&x.mul(y)))
            .map(|y| (*x, *y))
    });
    match violation {
        Some((x, y)) => Err(Error::ModelConstruction(format!(
            "level {level}: product of {x} and {y} leaves the candidate set"
        ))),
        None => Ok(()),
    }
}

/// Build `M_n` with its Frattini subgroup and maximal subgroups.
pub fn build_model(n: usize, opts: ModelOptions) -> Result<ArithLevelModel> {
    let tower = ModelTower::build(n, opts)?;
    model_from_tower(&tower, n)
}

pub fn model_from_tower(tower: &ModelTower, n: usize) -> Result<ArithLevelModel> {
    let m = tower.model(n).clone();
    let frattini = frattini_subgroup(&m)?;
    let maximal_subgroups = maximal_subgroups(&m)?;
    let geo = tower.geometric(n);
    Ok(ArithLevelModel {
        level: n,
        g: geo.g.clone(),
        u: geo.u.clone(),
        frattini,
        maximal_subgroups,
        stats: tower.stats[n - 1],
        m,
    })
}

/// `Φ(P) = P^2 [P, P]` for a 2-group `P`.
pub fn frattini_subgroup(g: &LevelGroup) -> Result<LevelGroup> {
    let derived = g.commutator_subgroup()?;
    let mut gens: Vec<Portrait> = derived.generators().to_vec();
    gens.extend(g.generators().iter().map(|s| s.mul(s)));
    LevelGroup::closure_at(g.level(), &gens)
}

/// Coordinates of every element in the elementary abelian quotient
/// `g / Φ(g)`, with the chosen basis representatives.
fn frattini_coordinates(g: &LevelGroup, frattini: &LevelGroup) -> Result<(Vec<Portrait>, HashMap<Portrait, u32>)> {
    let mut basis: Vec<Portrait> = Vec::new();
    let mut span = frattini.clone();
    for x in g.elements() {
        if span.contains(x) {
            continue;
        }
        basis.push(*x);
        let mut gens = frattini.generators().to_vec();
        gens.extend(&basis);
        span = LevelGroup::closure_at(g.level(), &gens)?;
    }
    if basis.len() > 20 {
        return Err(Error::ResourceLimit {
            what: "Frattini quotient rank".into(),
            cap: 20,
        });
    }
    let mut coords = HashMap::with_capacity(g.order());
    for mask in 0u32..(1 << basis.len()) {
        let mut rep = Portrait::identity(g.level())?;
        for (i, b) in basis.iter().enumerate() {
            if mask >> i & 1 == 1 {
                rep = rep.mul(b);
            }
        }
        for f in frattini.elements() {
            coords.insert(f.mul(&rep), mask);
        }
    }
    if coords.len() != g.order() {
        return Err(Error::ModelConstruction("Frattini quotient is not elementary abelian".into()));
    }
    Ok((basis, coords))
}

/// Rank of `g / Φ(g)`.
pub fn frattini_rank(g: &LevelGroup) -> Result<usize> {
    let phi = frattini_subgroup(g)?;
    Ok(frattini_coordinates(g, &phi)?.0.len())
}

/// All index-2 subgroups, as kernels of the nonzero characters of
/// `g / Φ(g)`, ordered by character mask.
pub fn maximal_subgroups(g: &LevelGroup) -> Result<Vec<LevelGroup>> {
    let phi = frattini_subgroup(g)?;
    let (basis, coords) = frattini_coordinates(g, &phi)?;
    (1u32..(1 << basis.len()))
        .map(|chi| {
            LevelGroup::from_elements(
                g.level(),
                g.elements()
                    .iter()
                    .copied()
                    .filter(|x| (coords[x] & chi).count_ones() % 2 == 0),
            )
        })
        .collect()
}

/// Index-2 subgroups found independently of the Frattini construction:
/// every assignment of signs to the generators that extends consistently
/// over the Cayley graph defines a homomorphism to `Z/2`.
pub fn index_two_subgroups_by_characters(g: &LevelGroup) -> Result<Vec<LevelGroup>> {
    let gens = g.generators();
    if gens.len() > 16 {
        return Err(Error::ResourceLimit {
            what: "generator count for character search".into(),
            cap: 16,
        });
    }
    let index: HashMap<Portrait, usize> = g.elements().iter().enumerate().map(|(i, x)| (*x, i)).collect();
    let mut out = Vec::new();
    for assignment in 1u32..(1 << gens.len()) {
        let mut value: Vec<Option<u8>> = vec![None; g.order()];
        let id = Portrait::identity(g.level())?;
        value[index[&id]] = Some(0);
        let mut queue = vec![id];
        let mut consistent = true;
        'bfs: while let Some(x) = queue.pop() {
            let vx = value[index[&x]].unwrap();
            for (k, s) in gens.iter().enumerate() {
                let y = x.mul(s);
                let vy = vx ^ ((assignment >> k) & 1) as u8;
                match value[index[&y]] {
                    None => {
                        value[index[&y]] = Some(vy);
                        queue.push(y);
                    }
                    Some(v) if v != vy => {
                        consistent = false;
                        break 'bfs;
                    }
                    Some(_) => {}
                }
            }
        }
        if consistent {
            let kernel = g
                .elements()
                .iter()
                .copied()
                .filter(|x| value[index[x]] == Some(0));
            out.push(LevelGroup::from_elements(g.level(), kernel)?);
        }
    }
    out.sort_by(|a, b| a.elements().cmp(b.elements()));
    out.dedup();
    Ok(out)
}

pub fn cycle_type_table(g: &LevelGroup) -> BTreeSet<CycleType> {
    g.cycle_types()
}

/// Per-level cycle-type profiles of all elements.
pub fn profile_table(g: &LevelGroup) -> BTreeSet<LevelProfile> {
    g.elements().iter().map(Portrait::level_profile).collect()
}

/// Normaliser of `G_n` in `Aut(T_n)` by exhaustive sweep, compared with the
/// model. Levels up to 4.
pub fn brute_normalizer_cross_check(n: usize) -> Result<Report> {
    if n == 0 || n > 4 {
        return invalid("the normaliser sweep runs at levels 1..=4");
    }
    let tower = ModelTower::build(n, ModelOptions::default())?;
    let geo = tower.geometric(n);
    let m = tower.model(n);
    let normalizer: HashSet<Portrait> = Portrait::enumerate_all(n)?
        .filter(|w| [geo.a1, geo.a3].iter().all(|g| geo.g.contains(&g.conjugate_by(w))))
        .collect();
    let mut report = Report::new(format!("normaliser cross-check at level {n}"));
    report.push(Check::new(
        "M⊆N(G)",
        m.elements().iter().all(|x| normalizer.contains(x)),
        format!("|N(G_{n})| = {}, |M_{n}| = {}", normalizer.len(), m.order()),
    ));
    if n >= 2 {
        let prev_m = tower.model(n - 1);
        let prev_u = &tower.geometric(n - 1).u;
        let ok = m.elements().iter().all(|e| {
            let (x, y, _) = e.split().unwrap();
            prev_m.contains(&x) && prev_m.contains(&y) && prev_u.contains(&y.mul(&x.invert()))
        });
        report.push(Check::new("section-constraints", ok, "sections in M_(n-1), ratio in U_(n-1)"));
    } else {
        report.push(Check::new(
            "level-one",
            normalizer.len() == 2 && m.order() == 2,
            "N = Aut(T_1) = M_1",
        ));
    }
    Ok(report)
}

#[derive(Clone, Debug, Serialize)]
pub struct GrowthRow {
    pub n: usize,
    pub g_order: usize,
    pub m_order: usize,
    pub bound: u64,
    pub step_ratio: Option<f64>,
    pub density: f64,
}

/// `(n, |G_n|, |M_n|, 2^(2n), |M_n|/|M_(n-1)|, log2|M_n| / (2^n - 1))`.
pub fn order_growth_rows(tower: &ModelTower) -> Vec<GrowthRow> {
    (1..=tower.top())
        .map(|n| {
            let m_order = tower.model(n).order();
            GrowthRow {
                n,
                g_order: tower.geometric(n).g.order(),
                m_order,
                bound: 1u64 << (2 * n),
                step_ratio: (n >= 2).then(|| m_order as f64 / tower.model(n - 1).order() as f64),
                density: (m_order as f64).log2() / ((1u64 << n) - 1) as f64,
            }
        })
        .collect()
}

/// Growth table plus its checks. The step bound `|M_n| <= 4 |M_(n-1)|`
/// is asserted from level 4 on; lower levels are recorded only, since the
/// uniqueness of partners in `G` that the bound rests on starts at level 4.
pub fn order_growth_report(nmax: usize, opts: ModelOptions) -> Result<(Vec<GrowthRow>, Report)> {
    let tower = ModelTower::build(nmax, opts)?;
    let rows = order_growth_rows(&tower);
    let mut report = Report::new(format!("order growth up to level {nmax}"));
    for r in &rows {
        report.push(Check::new(
            format!("M.bound[n={}]", r.n),
            r.m_order as u64 <= r.bound,
            format!("|M_{}| = {} <= {}", r.n, r.m_order, r.bound),
        ));
        if let Some(ratio) = r.step_ratio {
            if r.n >= 4 {
                report.push(Check::new(
                    format!("M.step[n={}]", r.n),
                    ratio <= 4.0,
                    format!("|M_{}|/|M_{}| = {ratio}", r.n, r.n - 1),
                ));
            } else {
                report.push(Check::new(
                    format!("M.step[n={}]", r.n),
                    true,
                    format!("|M_{}|/|M_{}| = {ratio} (recorded)", r.n, r.n - 1),
                ));
            }
        }
    }
    let tail: Vec<&GrowthRow> = rows.iter().filter(|r| r.n >= 3).collect();
    report.push(Check::new(
        "M.density-decreasing",
        tail.windows(2).all(|w| w[1].density < w[0].density),
        tail.iter().map(|r| format!("{:.4}", r.density)).collect::<Vec<_>>().join(" > "),
    ));
    Ok((rows, report))
}

/// The structural properties the model inherits, checked at each level
/// of `tower`.
pub fn model_claims(tower: &ModelTower) -> Result<Vec<Check>> {
    let mut out = Vec::new();
    for n in 1..=tower.top() {
        let m = tower.model(n);
        let geo = tower.geometric(n);
        let tag = |s: &str| format!("{s}[n={n}]");

        let odometers = m
            .elements()
            .iter()
            .filter(|x| x.is_level_odometer().unwrap())
            .count();
        // M_1, M_2 are all of Aut(T_1), Aut(T_2) and contain the full cycle.
        if n >= 3 {
            out.push(Check::equal(tag("M.no-odometer"), odometers, 0));
        } else {
            out.push(Check::new(tag("M.odometers"), true, format!("{odometers} (recorded)")));
        }
        out.push(Check::new(
            tag("M.normalises-G-U-commutator"),
            geo.g.is_subgroup_of(m) && geo.g.is_normal_in(m) && geo.u.is_normal_in(m) && geo.derived.is_normal_in(m),
            "G ⊆ M; G, U, [G,G] normal in M",
        ));
        let sigma = Portrait::sigma(n)?;
        let swap_free_ok = m.elements().iter().all(|e| !e.root_swap() || m.contains(&e.mul(&sigma)));
        out.push(Check::new(
            tag("M.sigma-and-swap-free-parts"),
            m.contains(&sigma) && swap_free_ok,
            "σ ∈ M and (x,y)σ ∈ M implies (x,y) ∈ M",
        ));
        if n >= 4 {
            let prev_u = &tower.geometric(n - 1).u;
            let mut per_x: HashMap<Portrait, usize> = HashMap::new();
            for e in m.elements().iter().filter(|e| !e.root_swap()) {
                let (x, y, _) = e.split()?;
                if prev_u.contains(&y.mul(&x.invert())) {
                    *per_x.entry(x).or_default() += 1;
                }
            }
            let worst = per_x.values().copied().max().unwrap_or(0);
            out.push(Check::new(
                tag("M.partners-per-section"),
                worst <= 2,
                format!("at most {worst} ratios ρ ∈ U_(n-1) with (x, ρx) ∈ M"),
            ));
        }
        if (3..=5).contains(&n) {
            let c = geo.g.centralizer(&geo.a3)?.intersection(&geo.u)?;
            out.push(Check::new(
                tag("U∩C(a3)"),
                c.order() <= 2,
                format!("|C_G(a3) ∩ U| = {}", c.order()),
            ));
        }
    }
    Ok(out)
}
