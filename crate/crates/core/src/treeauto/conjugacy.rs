use std::collections::HashMap;

use super::Portrait;
use crate::error::{invalid, Result};

/// Conjugacy test in `Aut(T_n)` by the recursive criterion:
///
/// * different root swaps are never conjugate;
/// * `(u1,u2) ~ (v1,v2)` iff the sections match pairwise in some order;
/// * `(u1,u2)σ ~ (v1,v2)σ` iff `u1·u2 ~ v1·v2`.
///
/// Answers are memoised on the unordered pair.
#[derive(Debug, Default)]
pub struct ConjugacyOracle {
    memo: HashMap<(Portrait, Portrait), bool>,
}

impl ConjugacyOracle {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn are_conjugate(&mut self, u: &Portrait, v: &Portrait) -> Result<bool> {
        if u.level() != v.level() {
            return invalid(format!("level mismatch: {} vs {}", u.level(), v.level()));
        }
        Ok(self.conj(*u, *v))
    }

    pub fn memo_len(&self) -> usize {
        self.memo.len()
    }

    fn conj(&mut self, u: Portrait, v: Portrait) -> bool {
        if u == v {
            return true;
        }
        if u.level() == 0 {
            return true;
        }
        if u.root_swap() != v.root_swap() {
            return false;
        }
        let key = if u <= v { (u, v) } else { (v, u) };
        if let Some(&known) = self.memo.get(&key) {
            return known;
        }
        let (u1, u2, swapped) = u.split().expect("level >= 1");
        let (v1, v2, _) = v.split().expect("level >= 1");
        let answer = if swapped {
            self.conj(u1.mul(&u2), v1.mul(&v2))
        } else {
            (self.conj(u1, v1) && self.conj(u2, v2)) || (self.conj(u1, v2) && self.conj(u2, v1))
        };
        self.memo.insert(key, answer);
        answer
    }
}

/// One-shot conjugacy test; see [`ConjugacyOracle`].
pub fn are_conjugate(u: &Portrait, v: &Portrait) -> Result<bool> {
    ConjugacyOracle::new().are_conjugate(u, v)
}

/// A complete invariant of the conjugacy class in `Aut(T_n)`.
///
/// For each orbit of the root permutation of size `s` the section of `u^s`
/// at one vertex of the orbit is described recursively; the sorted list of
/// `(s, child invariant)` pairs is the class invariant.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ClassInvariant(Vec<(u8, ClassInvariant)>);

pub fn class_invariant(u: &Portrait) -> ClassInvariant {
    if u.level() == 0 {
        return ClassInvariant(Vec::new());
    }
    let (l, r, swapped) = u.split().expect("level >= 1");
    if swapped {
        // one orbit of size 2; u^2 restricted below vertex 1 is l·r
        ClassInvariant(vec![(2, class_invariant(&l.mul(&r)))])
    } else {
        let mut parts = vec![(1, class_invariant(&l)), (1, class_invariant(&r))];
        parts.sort();
        ClassInvariant(parts)
    }
}
