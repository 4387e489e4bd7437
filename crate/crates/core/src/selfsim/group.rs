use std::collections::{HashSet, VecDeque};

use crate::error::{invalid, Error, Result};
use crate::treeauto::{CycleType, Portrait};

/// Default bound on the order of any enumerated group.
pub const DEFAULT_ORDER_CAP: usize = 1 << 22;

/// A fully enumerated subgroup of `Aut(T_n)`.
#[derive(Clone, Debug)]
pub struct LevelGroup {
    level: usize,
    elements: Vec<Portrait>,
    lookup: HashSet<Portrait>,
    generators: Vec<Portrait>,
}

impl PartialEq for LevelGroup {
    fn eq(&self, other: &Self) -> bool {
        self.level == other.level && self.elements == other.elements
    }
}

impl Eq for LevelGroup {}

impl LevelGroup {
    pub fn trivial(level: usize) -> Result<Self> {
        Self::closure_at(level, &[])
    }

    /// Closure of `gens` under composition, breadth-first by right
    /// multiplication.
    pub fn closure(gens: &[Portrait]) -> Result<Self> {
        let level = match gens.first() {
            Some(g) => g.level(),
            None => return invalid("closure of an empty generator list needs a level; use closure_at"),
        };
        Self::closure_at(level, gens)
    }

    pub fn closure_at(level: usize, gens: &[Portrait]) -> Result<Self> {
        Self::closure_capped(level, gens, DEFAULT_ORDER_CAP)
    }

    pub fn closure_capped(level: usize, gens: &[Portrait], cap: usize) -> Result<Self> {
        if let Some(bad) = gens.iter().find(|g| g.level() != level) {
            return invalid(format!("generator {bad} is not at level {level}"));
        }
        let gens: Vec<Portrait> = gens.iter().copied().filter(|g| !g.is_identity()).collect();
        let id = Portrait::identity(level)?;
        let mut lookup = HashSet::from([id]);
        let mut queue = VecDeque::from([id]);
        while let Some(x) = queue.pop_front() {
            for g in &gens {
                let y = x.mul(g);
                if lookup.insert(y) {
                    if lookup.len() > cap {
                        return Err(Error::ResourceLimit {
                            what: format!("closure at level {level}"),
                            cap: cap as u64,
                        });
                    }
                    queue.push_back(y);
                }
            }
        }
        let mut elements: Vec<Portrait> = lookup.iter().copied().collect();
        elements.sort_unstable();
        Ok(Self {
            level,
            elements,
            lookup,
            generators: gens,
        })
    }

    /// All of `Aut(T_level)`; only allowed for `level <= 4`.
    pub fn full(level: usize) -> Result<Self> {
        if level > 4 {
            return Err(Error::ResourceLimit {
                what: format!("enumerating Aut(T_{level})"),
                cap: 4,
            });
        }
        let elements: Vec<Portrait> = Portrait::enumerate_all(level)?.collect();
        let generators = (0..Portrait::identity(level)?.vertex_count())
            .map(|i| Portrait::from_bits(level, 1 << i))
            .collect::<Result<Vec<_>>>()?;
        Ok(Self {
            level,
            lookup: elements.iter().copied().collect(),
            elements,
            generators,
        })
    }

    /// Wrap an explicit element set, checking that it is a group. A small
    /// generating set is chosen greedily in element order.
    pub fn from_elements(level: usize, elements: impl IntoIterator<Item = Portrait>) -> Result<Self> {
        let mut elements: Vec<Portrait> = elements.into_iter().collect();
        elements.sort_unstable();
        elements.dedup();
        if let Some(bad) = elements.iter().find(|g| g.level() != level) {
            return invalid(format!("element {bad} is not at level {level}"));
        }
        let target: HashSet<Portrait> = elements.iter().copied().collect();
        let mut generators = Vec::new();
        let mut current = Self::trivial(level)?;
        for x in &elements {
            if current.contains(x) {
                continue;
            }
            generators.push(*x);
            current = Self::closure_at(level, &generators)?;
            if current.order() > target.len() {
                break;
            }
        }
        if current.lookup != target {
            return invalid(format!(
                "element set of size {} is not closed under composition",
                target.len()
            ));
        }
        current.generators = generators;
        Ok(current)
    }

    pub fn level(&self) -> usize {
        self.level
    }

    pub fn order(&self) -> usize {
        self.elements.len()
    }

    pub fn elements(&self) -> &[Portrait] {
        &self.elements
    }

    pub fn generators(&self) -> &[Portrait] {
        &self.generators
    }

    pub fn contains(&self, x: &Portrait) -> bool {
        self.lookup.contains(x)
    }

    pub fn is_subgroup_of(&self, other: &LevelGroup) -> bool {
        self.level == other.level && self.elements.iter().all(|x| other.contains(x))
    }

    pub fn is_abelian(&self) -> bool {
        self.generators
            .iter()
            .enumerate()
            .all(|(i, x)| self.generators[i + 1..].iter().all(|y| x.mul(y) == y.mul(x)))
    }

    /// Whether every generator of `self`, conjugated by every generator of
    /// `ambient`, stays in `self`.
    pub fn is_normal_in(&self, ambient: &LevelGroup) -> bool {
        self.is_subgroup_of(ambient)
            && ambient
                .generators
                .iter()
                .all(|g| self.generators.iter().all(|x| self.contains(&x.conjugate_by(g))))
    }

    fn require_member(&self, x: &Portrait) -> Result<()> {
        if !self.contains(x) {
            return invalid(format!("{x} is not an element of the group"));
        }
        Ok(())
    }

    /// Smallest subgroup containing `seeds` that is normalised by the
    /// generators of `self`.
    pub fn normal_closure(&self, seeds: &[Portrait]) -> Result<LevelGroup> {
        for s in seeds {
            self.require_member(s)?;
        }
        let mut gens: Vec<Portrait> = seeds.to_vec();
        loop {
            let n = Self::closure_at(self.level, &gens)?;
            let missing = n.generators.iter().find_map(|x| {
                self.generators
                    .iter()
                    .map(|g| x.conjugate_by(g))
                    .find(|c| !n.contains(c))
            });
            match missing {
                Some(c) => gens.push(c),
                None => return Ok(n),
            }
        }
    }

    /// The derived subgroup: normal closure of commutators of generators.
    pub fn commutator_subgroup(&self) -> Result<LevelGroup> {
        let mut seeds = Vec::new();
        for (i, x) in self.generators.iter().enumerate() {
            for y in &self.generators[i + 1..] {
                seeds.push(x.commutator(y));
            }
        }
        self.normal_closure(&seeds)
    }

    pub fn centralizer(&self, x: &Portrait) -> Result<LevelGroup> {
        self.require_member(x)?;
        self.filtered(|g| g.mul(x) == x.mul(g))
    }

    pub fn center(&self) -> Result<LevelGroup> {
        let gens = &self.generators;
        self.filtered(|g| gens.iter().all(|x| g.mul(x) == x.mul(g)))
    }

    /// Subgroup of elements satisfying `keep`; the predicate must cut out a
    /// subgroup.
    pub fn filtered(&self, keep: impl Fn(&Portrait) -> bool) -> Result<LevelGroup> {
        Self::from_elements(self.level, self.elements.iter().copied().filter(|x| keep(x)))
    }

    pub fn index_of(&self, sub: &LevelGroup) -> Result<usize> {
        if !sub.is_subgroup_of(self) {
            return invalid("index requested for a set that is not a subgroup");
        }
        Ok(self.order() / sub.order())
    }

    pub fn intersection(&self, other: &LevelGroup) -> Result<LevelGroup> {
        if self.level != other.level {
            return invalid("intersection of groups at different levels");
        }
        self.filtered(|x| other.contains(x))
    }

    /// The image under restriction to level `m`.
    pub fn restrict(&self, m: usize) -> Result<LevelGroup> {
        let gens = self
            .generators
            .iter()
            .map(|g| g.restrict(m))
            .collect::<Result<Vec<_>>>()?;
        Self::closure_at(m, &gens)
    }

    /// Number of distinct products `x·y` with `x` in `self`, `y` in `other`.
    pub fn product_set_size(&self, other: &LevelGroup) -> usize {
        let mut set = HashSet::new();
        for x in &self.elements {
            for y in &other.elements {
                set.insert(x.mul(y));
            }
        }
        set.len()
    }

    /// Invariant factors `d1 | d2 | ...` of the abelianisation, ascending.
    pub fn abelian_invariants(&self) -> Result<Vec<u64>> {
        let derived = self.commutator_subgroup()?;
        let quotient = (self.order() / derived.order()) as u64;
        let mut per_prime: Vec<(u64, Vec<u32>)> = Vec::new();
        for p in prime_factors(quotient) {
            // n_k = #{cosets xK with (xK)^(p^k) = 1}; the jump between
            // consecutive k counts cyclic factors of exponent >= k
            let mut exps = Vec::new();
            let mut prev = 1u64;
            let mut k = 1u32;
            loop {
                let e = p.pow(k);
                let n_k = self
                    .elements
                    .iter()
                    .filter(|x| derived.contains(&x.pow(e)))
                    .count() as u64
                    / derived.order() as u64;
                let jump = ilog(n_k / prev, p);
                if jump == 0 {
                    break;
                }
                exps.push(jump);
                prev = n_k;
                k += 1;
            }
            // exps[k-1] = number of factors with exponent >= k
            let count = exps[0] as usize;
            let mut factor_exps = vec![0u32; count];
            for (k, &c) in exps.iter().enumerate() {
                for slot in factor_exps.iter_mut().take(c as usize) {
                    *slot = k as u32 + 1;
                }
            }
            per_prime.push((p, factor_exps));
        }
        let width = per_prime.iter().map(|(_, e)| e.len()).max().unwrap_or(0);
        let mut invariants = vec![1u64; width];
        for (p, exps) in &per_prime {
            // largest exponents go to the largest invariant factors
            for (i, &e) in exps.iter().enumerate() {
                invariants[width - 1 - i] *= p.pow(e);
            }
        }
        invariants.sort_unstable();
        Ok(invariants)
    }

    pub fn cycle_types(&self) -> std::collections::BTreeSet<CycleType> {
        self.elements.iter().map(Portrait::cycle_type).collect()
    }
}

fn prime_factors(mut n: u64) -> Vec<u64> {
    let mut out = Vec::new();
    let mut p = 2;
    while p * p <= n {
        if n % p == 0 {
            out.push(p);
            while n % p == 0 {
                n /= p;
            }
        }
        p += 1;
    }
    if n > 1 {
        out.push(n);
    }
    out
}

fn ilog(mut n: u64, p: u64) -> u32 {
    let mut k = 0;
    while n >= p && n % p == 0 {
        n /= p;
        k += 1;
    }
    k
}
