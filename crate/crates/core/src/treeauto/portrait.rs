use std::fmt;
use std::str::FromStr;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};

/// Deepest tree a [`Portrait`] can describe. A level-7 portrait has
/// 127 internal vertices, which is what fits in one `u128`.
pub const MAX_LEVEL: usize = 7;

const fn depth_base(depth: usize) -> usize {
    (1 << depth) - 1
}

const fn low_mask(width: usize) -> u128 {
    if width >= 128 {
        u128::MAX
    } else {
        (1u128 << width) - 1
    }
}

/// An automorphism of the level-`n` binary tree, stored as one swap bit per
/// internal vertex.
///
/// Bit `i` belongs to the internal vertex with breadth-first index `i`: the
/// root is index 0, and the vertex at depth `d` whose path (child 1 as bit 0,
/// child 2 as bit 1, first letter most significant) reads `p` has index
/// `2^d - 1 + p`. Bits are addressed by the *input* vertex, so products act
/// left to right: in `u.compose(&v)` the automorphism `u` acts first.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Portrait {
    level: u8,
    bits: u128,
}

impl Portrait {
    pub fn identity(level: usize) -> Result<Self> {
        check_level(level)?;
        Ok(Self {
            level: level as u8,
            bits: 0,
        })
    }

    /// The automorphism swapping the two subtrees at the root.
    pub fn sigma(level: usize) -> Result<Self> {
        check_level(level)?;
        if level == 0 {
            return invalid("sigma needs level >= 1");
        }
        Ok(Self {
            level: level as u8,
            bits: 1,
        })
    }

    /// `(identity, sigma)` at the given level.
    pub fn basic_elements(level: usize) -> Result<(Self, Self)> {
        Ok((Self::identity(level)?, Self::sigma(level)?))
    }

    /// The adding machine `w = (id, w)σ` truncated to `level`.
    pub fn adding_machine(level: usize) -> Result<Self> {
        check_level(level)?;
        let mut w = Self::identity(0)?;
        for _ in 0..level {
            let id = Self::identity(w.level())?;
            w = Self::from_sections(&id, &w, true)?;
        }
        Ok(w)
    }

    pub fn from_bits(level: usize, bits: u128) -> Result<Self> {
        check_level(level)?;
        if bits & !low_mask(Self::vertex_count_for(level)) != 0 {
            return invalid(format!("swap bits exceed the {} vertices of level {level}", Self::vertex_count_for(level)));
        }
        Ok(Self {
            level: level as u8,
            bits,
        })
    }

    pub fn from_swaps(level: usize, swaps: &[bool]) -> Result<Self> {
        check_level(level)?;
        if swaps.len() != Self::vertex_count_for(level) {
            return invalid(format!(
                "level {level} needs {} swap bits, got {}",
                Self::vertex_count_for(level),
                swaps.len()
            ));
        }
        let bits = swaps
            .iter()
            .enumerate()
            .fold(0u128, |acc, (i, &s)| acc | ((s as u128) << i));
        Ok(Self {
            level: level as u8,
            bits,
        })
    }

    pub fn random<R: Rng + ?Sized>(level: usize, rng: &mut R) -> Result<Self> {
        check_level(level)?;
        let bits = rng.gen::<u128>() & low_mask(Self::vertex_count_for(level));
        Ok(Self {
            level: level as u8,
            bits,
        })
    }

    /// Every element of `Aut(T_level)`, in increasing bit order.
    pub fn enumerate_all(level: usize) -> Result<impl Iterator<Item = Portrait>> {
        check_level(level)?;
        let k = Self::vertex_count_for(level);
        if k > 24 {
            return Err(Error::ResourceLimit {
                what: format!("enumerating Aut(T_{level})"),
                cap: 1 << 24,
            });
        }
        Ok((0..(1u128 << k)).map(move |bits| Portrait {
            level: level as u8,
            bits,
        }))
    }

    #[inline]
    pub fn level(&self) -> usize {
        self.level as usize
    }

    #[inline]
    pub fn bits(&self) -> u128 {
        self.bits
    }

    #[inline]
    pub fn vertex_count(&self) -> usize {
        Self::vertex_count_for(self.level())
    }

    #[inline]
    fn vertex_count_for(level: usize) -> usize {
        depth_base(level)
    }

    #[inline]
    pub fn swap_at(&self, index: usize) -> bool {
        (self.bits >> index) & 1 == 1
    }

    pub fn swaps(&self) -> Vec<bool> {
        (0..self.vertex_count()).map(|i| self.swap_at(i)).collect()
    }

    #[inline]
    pub fn root_swap(&self) -> bool {
        self.level > 0 && self.bits & 1 == 1
    }

    pub fn is_identity(&self) -> bool {
        self.bits == 0
    }

    /// Image path of every internal vertex, indexed breadth-first.
    fn vertex_images(&self) -> [u8; 127] {
        let mut img = [0u8; 127];
        for d in 1..self.level() {
            let base = depth_base(d);
            let parent_base = depth_base(d - 1);
            for p in 0..(1usize << d) {
                let parent = parent_base + (p >> 1);
                let letter = (p & 1) as u8;
                let swap = self.swap_at(parent) as u8;
                img[base + p] = (img[parent] << 1) | (letter ^ swap);
            }
        }
        img
    }

    fn check_same_level(&self, other: &Self) -> Result<()> {
        if self.level != other.level {
            return invalid(format!("level mismatch: {} vs {}", self.level, other.level));
        }
        Ok(())
    }

    /// Product in which `self` acts first:
    /// `(x1,x2)τ · (y1,y2)τ' = (x1·y_τ(1), x2·y_τ(2)) ττ'`.
    pub fn compose(&self, other: &Self) -> Result<Self> {
        self.check_same_level(other)?;
        Ok(self.mul(other))
    }

    /// [`Portrait::compose`] without the level check.
    #[inline]
    pub(crate) fn mul(&self, other: &Self) -> Self {
        debug_assert_eq!(self.level, other.level);
        let img = self.vertex_images();
        let mut bits = self.bits;
        for d in 0..self.level() {
            let base = depth_base(d);
            for p in 0..(1usize << d) {
                let i = base + p;
                if other.swap_at(base + img[i] as usize) {
                    bits ^= 1 << i;
                }
            }
        }
        Self {
            level: self.level,
            bits,
        }
    }

    pub fn invert(&self) -> Self {
        let img = self.vertex_images();
        let mut bits = 0u128;
        for d in 0..self.level() {
            let base = depth_base(d);
            for p in 0..(1usize << d) {
                if self.swap_at(base + p) {
                    bits |= 1 << (base + img[base + p] as usize);
                }
            }
        }
        Self {
            level: self.level,
            bits,
        }
    }

    /// `self^-1 · other · self`.
    pub fn conjugate_by(&self, conjugator: &Self) -> Self {
        conjugator.invert().mul(self).mul(conjugator)
    }

    pub fn commutator(&self, other: &Self) -> Self {
        self.invert().mul(&other.invert()).mul(self).mul(other)
    }

    pub fn pow(&self, exp: u64) -> Self {
        let mut acc = Self {
            level: self.level,
            bits: 0,
        };
        let mut base = *self;
        let mut e = exp;
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.mul(&base);
            }
            base = base.mul(&base);
            e >>= 1;
        }
        acc
    }

    /// Order of the element (always a power of two).
    pub fn order(&self) -> u64 {
        let mut x = *self;
        let mut order = 1;
        while !x.is_identity() {
            x = x.mul(&x);
            order *= 2;
        }
        order
    }

    /// Decompose `w = (w1, w2)τ` with `w1`, `w2` indexed by input symbol.
    pub fn split(&self) -> Result<(Self, Self, bool)> {
        if self.level == 0 {
            return invalid("the level-0 portrait has no sections");
        }
        let sub = self.level() - 1;
        let mut halves = [0u128; 2];
        for d in 1..self.level() {
            let half = 1usize << (d - 1);
            let dest = depth_base(d - 1);
            for (c, h) in halves.iter_mut().enumerate() {
                let chunk = (self.bits >> (depth_base(d) + c * half)) & low_mask(half);
                *h |= chunk << dest;
            }
        }
        let mk = |bits| Self {
            level: sub as u8,
            bits,
        };
        Ok((mk(halves[0]), mk(halves[1]), self.root_swap()))
    }

    /// Build `(left, right)` followed by the root swap when `swap` is set.
    pub fn from_sections(left: &Self, right: &Self, swap: bool) -> Result<Self> {
        left.check_same_level(right)?;
        let level = left.level() + 1;
        check_level(level)?;
        let mut bits = swap as u128;
        for d in 1..level {
            let half = 1usize << (d - 1);
            let src = depth_base(d - 1);
            for (c, part) in [left, right].into_iter().enumerate() {
                let chunk = (part.bits >> src) & low_mask(half);
                bits |= chunk << (depth_base(d) + c * half);
            }
        }
        Ok(Self {
            level: level as u8,
            bits,
        })
    }

    /// Restriction to the subtree below `vertex`, a word over `{1, 2}`.
    pub fn section(&self, vertex: &[u8]) -> Result<Self> {
        if vertex.len() > self.level() {
            return invalid(format!(
                "vertex of length {} below a level-{} portrait",
                vertex.len(),
                self.level
            ));
        }
        let mut cur = *self;
        for &letter in vertex {
            let (l, r, _) = cur.split()?;
            cur = match letter {
                1 => l,
                2 => r,
                other => return invalid(format!("vertex letter {other} is not 1 or 2")),
            };
        }
        Ok(cur)
    }

    /// Truncation to the first `m` levels.
    pub fn restrict(&self, m: usize) -> Result<Self> {
        if m > self.level() {
            return invalid(format!("cannot restrict level {} to {m}", self.level));
        }
        Ok(Self {
            level: m as u8,
            bits: self.bits & low_mask(depth_base(m)),
        })
    }

    /// Image of the vertex at `depth` whose path reads `path`.
    pub fn image_of(&self, depth: usize, path: usize) -> usize {
        let mut out = 0usize;
        let mut index = 0usize;
        for k in 0..depth {
            let letter = (path >> (depth - 1 - k)) & 1;
            let swap = self.swap_at(index) as usize;
            out = (out << 1) | (letter ^ swap);
            index = depth_base(k + 1) + (path >> (depth - 1 - k));
        }
        out
    }

    /// Permutation induced on level `m`, as `perm[source] = target`.
    pub fn level_permutation(&self, m: usize) -> Result<Vec<usize>> {
        if m > self.level() {
            return invalid(format!("level {m} beyond portrait level {}", self.level));
        }
        let img = self.vertex_images();
        if m == 0 {
            return Ok(vec![0]);
        }
        let parent_base = depth_base(m - 1);
        Ok((0..(1usize << m))
            .map(|p| {
                let parent = parent_base + (p >> 1);
                let swap = self.swap_at(parent) as usize;
                ((img[parent] as usize) << 1) | ((p & 1) ^ swap)
            })
            .collect())
    }

    pub fn leaf_permutation(&self) -> Vec<usize> {
        self.level_permutation(self.level())
            .expect("own level is always in range")
    }

    pub fn cycle_type(&self) -> CycleType {
        CycleType::of_permutation(&self.leaf_permutation())
    }

    pub fn cycle_type_at(&self, m: usize) -> Result<CycleType> {
        Ok(CycleType::of_permutation(&self.level_permutation(m)?))
    }

    /// Cycle types on levels `1..=level`.
    pub fn level_profile(&self) -> LevelProfile {
        LevelProfile(
            (1..=self.level())
                .map(|m| CycleType::of_permutation(&self.level_permutation(m).unwrap()))
                .collect(),
        )
    }

    /// Sign of the permutation induced on level `m`.
    pub fn sign(&self, m: usize) -> Result<i8> {
        if m == 0 || m > self.level() {
            return invalid(format!("sign level {m} outside 1..={}", self.level));
        }
        let ct = self.cycle_type_at(m)?;
        let even_cycles = ct.parts().iter().filter(|&&p| p % 2 == 0).count();
        Ok(if even_cycles % 2 == 0 { 1 } else { -1 })
    }

    /// True when the leaf permutation is a single `2^n`-cycle.
    ///
    /// Panics if the two characterisations (one cycle, every sign `-1`)
    /// disagree.
    pub fn is_level_odometer(&self) -> Result<bool> {
        if self.level == 0 {
            return invalid("odometer test needs level >= 1");
        }
        let single_cycle = self.cycle_type().parts() == [1u32 << self.level];
        let all_negative = (1..=self.level())
            .map(|m| self.sign(m))
            .collect::<Result<Vec<_>>>()?
            .iter()
            .all(|&s| s == -1);
        assert_eq!(
            single_cycle, all_negative,
            "odometer characterisations disagree for {self}"
        );
        Ok(single_cycle)
    }

    /// Wire format `n:HEX`, bits breadth-first, most significant bit first.
    pub fn encode(&self) -> String {
        let k = self.vertex_count();
        let digits = k.div_ceil(4);
        let mut out = format!("{}:", self.level);
        for j in 0..digits {
            let mut nibble = 0u8;
            for b in 0..4 {
                let i = 4 * j + b;
                if i < k && self.swap_at(i) {
                    nibble |= 8 >> b;
                }
            }
            out.push(char::from_digit(nibble as u32, 16).unwrap().to_ascii_uppercase());
        }
        out
    }

    pub fn decode(s: &str) -> Result<Self> {
        let (lvl, hex) = s
            .trim()
            .split_once(':')
            .ok_or_else(|| Error::InvalidArgument(format!("portrait {s:?} lacks ':'")))?;
        let level: usize = lvl
            .parse()
            .map_err(|_| Error::InvalidArgument(format!("bad portrait level {lvl:?}")))?;
        check_level(level)?;
        let k = Self::vertex_count_for(level);
        if hex.len() != k.div_ceil(4) {
            return invalid(format!("level {level} needs {} hex digits, got {}", k.div_ceil(4), hex.len()));
        }
        let mut bits = 0u128;
        for (j, ch) in hex.chars().enumerate() {
            let nibble = ch
                .to_digit(16)
                .ok_or_else(|| Error::InvalidArgument(format!("bad hex digit {ch:?}")))?;
            for b in 0..4 {
                if nibble & (8 >> b) != 0 {
                    let i = 4 * j + b;
                    if i >= k {
                        return invalid(format!("nonzero padding in {s:?}"));
                    }
                    bits |= 1 << i;
                }
            }
        }
        Ok(Self {
            level: level as u8,
            bits,
        })
    }
}

fn check_level(level: usize) -> Result<()> {
    if level > MAX_LEVEL {
        return invalid(format!("level {level} exceeds the supported maximum {MAX_LEVEL}"));
    }
    Ok(())
}

impl fmt::Display for Portrait {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.encode())
    }
}

impl fmt::Debug for Portrait {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Portrait({})", self.encode())
    }
}

impl FromStr for Portrait {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Self::decode(s)
    }
}

impl Serialize for Portrait {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.encode())
    }
}

impl<'de> Deserialize<'de> for Portrait {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        Self::decode(&s).map_err(serde::de::Error::custom)
    }
}

/// Multiset of cycle lengths, stored in ascending order.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct CycleType(Vec<u32>);

impl CycleType {
    pub fn new(mut parts: Vec<u32>) -> Self {
        parts.sort_unstable();
        Self(parts)
    }

    pub fn of_permutation(perm: &[usize]) -> Self {
        let mut seen = vec![false; perm.len()];
        let mut parts = Vec::new();
        for start in 0..perm.len() {
            if seen[start] {
                continue;
            }
            let mut len = 0;
            let mut j = start;
            while !seen[j] {
                seen[j] = true;
                j = perm[j];
                len += 1;
            }
            parts.push(len);
        }
        Self::new(parts)
    }

    pub fn parts(&self) -> &[u32] {
        &self.0
    }

    pub fn total(&self) -> u64 {
        self.0.iter().map(|&p| p as u64).sum()
    }
}

impl fmt::Display for CycleType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.0.iter().map(u32::to_string).collect();
        write!(f, "[{}]", parts.join(","))
    }
}

/// Cycle types on levels `1..=n` of one automorphism. Conjugation in the
/// full automorphism group preserves levels, so the profile is a class
/// invariant that refines the leaf cycle type.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct LevelProfile(pub Vec<CycleType>);

impl LevelProfile {
    pub fn leaf(&self) -> Option<&CycleType> {
        self.0.last()
    }

    pub fn levels(&self) -> &[CycleType] {
        &self.0
    }
}

impl fmt::Display for LevelProfile {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.0.iter().map(|c| c.to_string()).collect();
        f.write_str(&parts.join(" / "))
    }
}

/// Parse a vertex written as a string of `1`s and `2`s.
pub fn parse_vertex(s: &str) -> Result<Vec<u8>> {
    s.chars()
        .map(|c| match c {
            '1' => Ok(1),
            '2' => Ok(2),
            _ => invalid(format!("vertex {s:?} must be a word over {{1,2}}")),
        })
        .collect()
}
