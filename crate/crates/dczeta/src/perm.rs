//! Finite permutation groups given by generators, materialized by closure.
//!
//! The groups act on the colour sets of a local action diagram, which are
//! small (tens of points), so orbits, stabilizers and stabilizer-orbits are
//! all answered by filtering the materialized element set rather than by
//! stabilizer chains.

use std::collections::{BTreeSet, VecDeque};
use std::sync::OnceLock;
use thiserror::Error;

#[derive(Debug, Clone, Error, PartialEq)]
pub enum PermError {
    #[error("permutation image {0} out of range (domain size {1})")]
    OutOfRange(usize, usize),
    #[error("mapping is not a bijection (value {0} repeated)")]
    NotBijective(usize),
    #[error("generator acts on {0} points, group domain has {1}")]
    DomainMismatch(usize, usize),
    #[error("point {0} outside domain of size {1}")]
    UnknownPoint(usize, usize),
    #[error("group order exceeds cap {0}")]
    CapExceeded(usize),
}

/// A permutation of `{0, .., n-1}` stored as its image vector.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Permutation {
    map: Vec<usize>,
}

impl Permutation {
    pub fn identity(n: usize) -> Self {
        Permutation {
            map: (0..n).collect(),
        }
    }

    pub fn from_images(map: Vec<usize>) -> Result<Self, PermError> {
        let n = map.len();
        let mut seen = vec![false; n];
        for &v in &map {
            if v >= n {
                return Err(PermError::OutOfRange(v, n));
            }
            if seen[v] {
                return Err(PermError::NotBijective(v));
            }
            seen[v] = true;
        }
        Ok(Permutation { map })
    }

    pub fn degree(&self) -> usize {
        self.map.len()
    }

    pub fn apply(&self, x: usize) -> usize {
        self.map[x]
    }

    /// `self` after `other`: `(self * other)(x) = self(other(x))`.
    pub fn compose(&self, other: &Self) -> Self {
        Permutation {
            map: other.map.iter().map(|&x| self.map[x]).collect(),
        }
    }

    pub fn inverse(&self) -> Self {
        let mut map = vec![0; self.map.len()];
        for (i, &v) in self.map.iter().enumerate() {
            map[v] = i;
        }
        Permutation { map }
    }

    /// A full cycle on the listed points, identity elsewhere.
    pub fn cycle(n: usize, points: &[usize]) -> Self {
        let mut map: Vec<usize> = (0..n).collect();
        for w in points.windows(2) {
            map[w[0]] = w[1];
        }
        if points.len() > 1 {
            map[*points.last().unwrap()] = points[0];
        }
        Permutation { map }
    }

    /// Swap of two points, identity elsewhere.
    pub fn transposition(n: usize, a: usize, b: usize) -> Self {
        let mut map: Vec<usize> = (0..n).collect();
        map.swap(a, b);
        Permutation { map }
    }
}

pub const DEFAULT_GROUP_CAP: usize = 1_000_000;

/// A permutation group on `{0, .., n-1}` given by generators, with the full
/// element set materialized on first use (or eagerly via [`PermGroup::closure`]).
#[derive(Debug)]
pub struct PermGroup {
    degree: usize,
    generators: Vec<Permutation>,
    elements: OnceLock<Result<Vec<Permutation>, PermError>>,
}

impl Clone for PermGroup {
    fn clone(&self) -> Self {
        PermGroup {
            degree: self.degree,
            generators: self.generators.clone(),
            elements: OnceLock::new(),
        }
    }
}

impl PermGroup {
    pub fn new(degree: usize, generators: Vec<Permutation>) -> Result<Self, PermError> {
        for g in &generators {
            if g.degree() != degree {
                return Err(PermError::DomainMismatch(g.degree(), degree));
            }
        }
        Ok(PermGroup {
            degree,
            generators,
            elements: OnceLock::new(),
        })
    }

    /// Materialize the whole group by breadth-first products, failing if the
    /// order would exceed `cap`.
    pub fn closure(generators: Vec<Permutation>, degree: usize, cap: usize) -> Result<Self, PermError> {
        let g = Self::new(degree, generators)?;
        g.materialize(cap)?;
        Ok(g)
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn generators(&self) -> &[Permutation] {
        &self.generators
    }

    fn materialize(&self, cap: usize) -> Result<&[Permutation], PermError> {
        let cell = self.elements.get_or_init(|| {
            let mut seen: BTreeSet<Permutation> = BTreeSet::new();
            let identity = Permutation::identity(self.degree);
            let mut queue = VecDeque::from([identity.clone()]);
            seen.insert(identity);
            while let Some(p) = queue.pop_front() {
                for g in &self.generators {
                    let q = g.compose(&p);
                    if !seen.contains(&q) {
                        if seen.len() >= cap {
                            return Err(PermError::CapExceeded(cap));
                        }
                        seen.insert(q.clone());
                        queue.push_back(q);
                    }
                }
            }
            Ok(seen.into_iter().collect())
        });
        match cell {
            Ok(v) => Ok(v),
            Err(e) => Err(e.clone()),
        }
    }

    pub fn elements(&self) -> Result<&[Permutation], PermError> {
        self.materialize(DEFAULT_GROUP_CAP)
    }

    pub fn order(&self) -> Result<usize, PermError> {
        Ok(self.elements()?.len())
    }

    /// Orbit of a point under the generators.
    pub fn orbit(&self, x: usize) -> Result<BTreeSet<usize>, PermError> {
        if x >= self.degree {
            return Err(PermError::UnknownPoint(x, self.degree));
        }
        let mut orbit = BTreeSet::from([x]);
        let mut queue = VecDeque::from([x]);
        while let Some(p) = queue.pop_front() {
            for g in &self.generators {
                let q = g.apply(p);
                if orbit.insert(q) {
                    queue.push_back(q);
                }
            }
        }
        Ok(orbit)
    }

    /// The orbit partition of the domain, sorted by least element.
    pub fn orbits(&self) -> Vec<BTreeSet<usize>> {
        let mut remaining: BTreeSet<usize> = (0..self.degree).collect();
        let mut out = Vec::new();
        while let Some(&x) = remaining.iter().next() {
            let orbit = self.orbit(x).expect("point is in the domain");
            for p in &orbit {
                remaining.remove(p);
            }
            out.push(orbit);
        }
        out
    }

    /// `|Stab(x) · y|`: size of the orbit of `y` under the stabilizer of `x`,
    /// by filtering the materialized elements.
    pub fn stab_orbit_size(&self, x: usize, y: usize) -> Result<usize, PermError> {
        if x >= self.degree {
            return Err(PermError::UnknownPoint(x, self.degree));
        }
        if y >= self.degree {
            return Err(PermError::UnknownPoint(y, self.degree));
        }
        let mut images = BTreeSet::new();
        for p in self.elements()? {
            if p.apply(x) == x {
                images.insert(p.apply(y));
            }
        }
        Ok(images.len())
    }

    /// Orbit of `y` under the stabilizer of `x`.
    pub fn stab_orbit(&self, x: usize, y: usize) -> Result<BTreeSet<usize>, PermError> {
        if x >= self.degree {
            return Err(PermError::UnknownPoint(x, self.degree));
        }
        if y >= self.degree {
            return Err(PermError::UnknownPoint(y, self.degree));
        }
        let mut images = BTreeSet::new();
        for p in self.elements()? {
            if p.apply(x) == x {
                images.insert(p.apply(y));
            }
        }
        Ok(images)
    }

    /// Block-preserving symmetric group on the given partition of the domain:
    /// generated by a transposition and a full cycle inside every block.
    pub fn block_symmetric(degree: usize, blocks: &[Vec<usize>]) -> Self {
        let mut gens = Vec::new();
        for block in blocks {
            if block.len() >= 2 {
                gens.push(Permutation::transposition(degree, block[0], block[1]));
            }
            if block.len() >= 3 {
                gens.push(Permutation::cycle(degree, block));
            }
        }
        PermGroup::new(degree, gens).expect("generators constructed on the domain")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn trivial_group() {
        let g = PermGroup::closure(vec![], 4, 10).unwrap();
        assert_eq!(g.order().unwrap(), 1);
        assert_eq!(g.orbits().len(), 4);
        assert_eq!(g.stab_orbit_size(0, 1).unwrap(), 1);
    }

    #[test]
    fn cyclic_group_from_cycle() {
        let c = Permutation::cycle(5, &[0, 1, 2, 3, 4]);
        let g = PermGroup::closure(vec![c], 5, 100).unwrap();
        assert_eq!(g.order().unwrap(), 5);
        assert_eq!(g.orbit(2).unwrap().len(), 5);
        // point stabilizer is trivial
        assert_eq!(g.stab_orbit_size(0, 3).unwrap(), 1);
    }

    #[test]
    fn symmetric_group_stab_orbits() {
        let g = PermGroup::block_symmetric(4, &[vec![0, 1, 2, 3]]);
        assert_eq!(g.order().unwrap(), 24);
        assert_eq!(g.stab_orbit_size(1, 1).unwrap(), 1);
        assert_eq!(g.stab_orbit_size(1, 2).unwrap(), 3);
    }

    #[test]
    fn orbit_stabilizer_identity() {
        let g = PermGroup::block_symmetric(5, &[vec![0, 1, 2], vec![3, 4]]);
        let order = g.order().unwrap();
        for x in 0..5 {
            let orbit = g.orbit(x).unwrap().len();
            let fixing = g
                .elements()
                .unwrap()
                .iter()
                .filter(|p| p.apply(x) == x)
                .count();
            assert_eq!(orbit * fixing, order);
        }
        // orbit partition covers the domain
        let total: usize = g.orbits().iter().map(|o| o.len()).sum();
        assert_eq!(total, 5);
    }

    #[test]
    fn psl2_f5_on_six_points()  {
        // PSL_2(F_5) acting on the projective line P^1(F_5): generated by
        // z -> z+1 and z -> -1/z (points 0..4 and 5 = infinity)
        let shift = Permutation::from_images(vec![1, 2, 3, 4, 0, 5]).unwrap();
        // -1/z: 0 -> inf, inf -> 0, z -> (5 - inverse(z)) mod 5
        // inverses mod 5: 1->1, 2->3, 3->2, 4->4
        let inv = Permutation::from_images(vec![5, 4, 2, 3, 1, 0]).unwrap();
        let g = PermGroup::closure(vec![shift, inv], 6, 1000).unwrap();
        assert_eq!(g.order().unwrap(), 60);
        assert_eq!(g.orbits().len(), 1);
        // stabilizer of a point is transitive on the remaining 5
        assert_eq!(g.stab_orbit_size(0, 1).unwrap(), 5);
    }

    #[test]
    fn cap_exceeded() {
        let c = Permutation::cycle(6, &[0, 1, 2, 3, 4, 5]);
        let t = Permutation::transposition(6, 0, 1);
        assert_eq!(
            PermGroup::closure(vec![c, t], 6, 100).unwrap_err(),
            PermError::CapExceeded(100)
        );
    }

    #[test]
    fn rejects_non_bijection() {
        assert!(matches!(
            Permutation::from_images(vec![0, 0, 1]),
            Err(PermError::NotBijective(0))
        ));
        assert!(matches!(
            Permutation::from_images(vec![3, 0, 1]),
            Err(PermError::OutOfRange(3, 3))
        ));
    }
}
