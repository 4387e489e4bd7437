use super::{builtin_system_f, LevelGroup, RecursionSystem};
use crate::error::{invalid, Result};
use crate::treeauto::Portrait;

/// The geometric group `G_n = <a1, a3>` at one level together with the
/// subgroups the structure theory is phrased in.
#[derive(Clone, Debug)]
pub struct GeometricLevel {
    pub level: usize,
    pub a1: Portrait,
    pub a2: Portrait,
    pub a3: Portrait,
    pub g: LevelGroup,
    /// Normal closures of `a1`, `a2`, `a3` in `G_n`.
    pub h: [LevelGroup; 3],
    /// Normal closure of `γ1 = a2 a3^-1`.
    pub u: LevelGroup,
    pub derived: LevelGroup,
}

impl GeometricLevel {
    pub fn compute(level: usize) -> Result<Self> {
        Self::compute_with(&builtin_system_f(), level)
    }

    pub fn compute_with(sys: &RecursionSystem, level: usize) -> Result<Self> {
        if level == 0 {
            return invalid("geometric level must be >= 1");
        }
        let gens = sys.unfold_all(level)?;
        let (a1, a2, a3) = (gens[0], gens[1], gens[2]);
        let g = LevelGroup::closure_at(level, &[a1, a3])?;
        let h = [
            g.normal_closure(&[a1])?,
            g.normal_closure(&[a2])?,
            g.normal_closure(&[a3])?,
        ];
        let gamma1 = a2.mul(&a3.invert());
        let u = g.normal_closure(&[gamma1])?;
        let derived = g.commutator_subgroup()?;
        Ok(Self {
            level,
            a1,
            a2,
            a3,
            g,
            h,
            u,
            derived,
        })
    }

    pub fn generator(&self, i: usize) -> Portrait {
        [self.a1, self.a2, self.a3][i - 1]
    }

    pub fn gamma1(&self) -> Portrait {
        self.a2.mul(&self.a3.invert())
    }

    pub fn gamma2(&self) -> Portrait {
        self.a3.invert().mul(&self.a2)
    }

    pub fn beta1(&self) -> Portrait {
        self.a1.mul(&self.a3).mul(&self.a1).mul(&self.a3.invert())
    }

    pub fn beta2(&self) -> Portrait {
        self.a3.invert().mul(&self.a1).mul(&self.a3).mul(&self.a1)
    }
}

/// `G_1, ..., G_max` computed once.
pub fn geometric_tower(max_level: usize) -> Result<Vec<GeometricLevel>> {
    let sys = builtin_system_f();
    (1..=max_level).map(|n| GeometricLevel::compute_with(&sys, n)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn orders_follow_two_to_the_n_plus_two() {
        let tower = geometric_tower(7).unwrap();
        assert_eq!(tower[0].g.order(), 2);
        assert_eq!(tower[1].g.order(), 8);
        for lvl in &tower[2..] {
            assert_eq!(lvl.g.order(), 1 << (lvl.level + 2), "level {}", lvl.level);
        }
    }

    #[test]
    fn indices_at_level_four() {
        let l = GeometricLevel::compute(4).unwrap();
        assert_eq!(l.g.index_of(&l.h[0]).unwrap(), 4);
        assert_eq!(l.g.index_of(&l.h[1]).unwrap(), 2);
        assert_eq!(l.g.index_of(&l.h[2]).unwrap(), 2);
        assert_eq!(GeometricLevel::compute(3).unwrap().g.index_of(&GeometricLevel::compute(3).unwrap().u).unwrap(), 4);
    }
}
