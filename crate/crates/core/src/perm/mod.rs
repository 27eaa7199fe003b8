//! Permutations and permutation groups on `[0, n)`.
//!
//! Permutations act on the right: `x^(gh) = (x^g)^h`, and [`Permutation::then`]
//! composes in that order. Groups keep their generators and compute a base and
//! strong generating set on first use.

mod bsgs;
mod constructions;

use std::fmt;
use std::sync::OnceLock;

use num_bigint::BigUint;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

pub use bsgs::Bsgs;
pub use constructions::{affine_generators, agl_one, field_map, translations, wreath_product_action};

#[derive(Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "Vec<usize>", into = "Vec<usize>")]
pub struct Permutation {
    images: Vec<u32>,
}

impl TryFrom<Vec<usize>> for Permutation {
    type Error = Error;

    fn try_from(images: Vec<usize>) -> Result<Self> {
        Permutation::from_images(images)
    }
}

impl From<Permutation> for Vec<usize> {
    fn from(p: Permutation) -> Self {
        p.images.into_iter().map(|x| x as usize).collect()
    }
}

impl fmt::Debug for Permutation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_identity() {
            return write!(f, "()");
        }
        let mut seen = vec![false; self.degree()];
        for start in 0..self.degree() {
            if seen[start] || self.apply(start) == start {
                continue;
            }
            write!(f, "(")?;
            let mut x = start;
            let mut first = true;
            while !seen[x] {
                seen[x] = true;
                if !first {
                    write!(f, " ")?;
                }
                write!(f, "{x}")?;
                first = false;
                x = self.apply(x);
            }
            write!(f, ")")?;
        }
        Ok(())
    }
}

impl Permutation {
    pub fn identity(n: usize) -> Self {
        Permutation { images: (0..n as u32).collect() }
    }

    pub fn from_images(images: Vec<usize>) -> Result<Self> {
        let n = images.len();
        let mut seen = vec![false; n];
        for &x in &images {
            if x >= n || std::mem::replace(&mut seen[x], true) {
                return Err(Error::InvalidPermutation(format!("{images:?} is not a bijection of 0..{n}")));
            }
        }
        Ok(Permutation { images: images.into_iter().map(|x| x as u32).collect() })
    }

    /// Builds a permutation of degree `n` from disjoint cycles.
    pub fn from_cycles(n: usize, cycles: &[&[usize]]) -> Result<Self> {
        let mut images: Vec<usize> = (0..n).collect();
        let mut touched = vec![false; n];
        for cycle in cycles {
            for (i, &x) in cycle.iter().enumerate() {
                if x >= n || std::mem::replace(&mut touched[x], true) {
                    return Err(Error::InvalidPermutation(format!("bad cycle {cycle:?}")));
                }
                images[x] = cycle[(i + 1) % cycle.len()];
            }
        }
        Permutation::from_images(images)
    }

    pub fn degree(&self) -> usize {
        self.images.len()
    }

    pub fn apply(&self, x: usize) -> usize {
        self.images[x] as usize
    }

    pub fn images(&self) -> Vec<usize> {
        self.images.iter().map(|&x| x as usize).collect()
    }

    pub fn is_identity(&self) -> bool {
        self.images.iter().enumerate().all(|(i, &x)| i as u32 == x)
    }

    /// `self` followed by `other`.
    pub fn then(&self, other: &Permutation) -> Permutation {
        Permutation { images: self.images.iter().map(|&x| other.images[x as usize]).collect() }
    }

    pub fn inverse(&self) -> Permutation {
        let mut images = vec![0u32; self.images.len()];
        for (i, &x) in self.images.iter().enumerate() {
            images[x as usize] = i as u32;
        }
        Permutation { images }
    }

    /// `g^-1 self g`.
    pub fn conjugate_by(&self, g: &Permutation) -> Permutation {
        g.inverse().then(self).then(g)
    }

    /// `self^-1 other^-1 self other`.
    pub fn commutator(&self, other: &Permutation) -> Permutation {
        self.inverse().then(&other.inverse()).then(self).then(other)
    }

    /// Smallest point moved, if any.
    pub fn first_moved(&self) -> Option<usize> {
        self.images.iter().enumerate().find(|(i, &x)| *i as u32 != x).map(|(i, _)| i)
    }

    pub fn is_even(&self) -> bool {
        let mut seen = vec![false; self.degree()];
        let mut transpositions = 0;
        for start in 0..self.degree() {
            let mut len = 0;
            let mut x = start;
            while !seen[x] {
                seen[x] = true;
                x = self.apply(x);
                len += 1;
            }
            if len > 0 {
                transpositions += len - 1;
            }
        }
        transpositions % 2 == 0
    }
}

pub struct PermutationGroup {
    degree: usize,
    generators: Vec<Permutation>,
    base_hint: Vec<usize>,
    bsgs: OnceLock<Bsgs>,
}

impl Clone for PermutationGroup {
    fn clone(&self) -> Self {
        let bsgs = OnceLock::new();
        if let Some(b) = self.bsgs.get() {
            let _ = bsgs.set(b.clone());
        }
        PermutationGroup {
            degree: self.degree,
            generators: self.generators.clone(),
            base_hint: self.base_hint.clone(),
            bsgs,
        }
    }
}

impl fmt::Debug for PermutationGroup {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("PermutationGroup").field("degree", &self.degree).field("generators", &self.generators).finish()
    }
}

impl PermutationGroup {
    pub fn new(degree: usize, generators: Vec<Permutation>) -> Result<Self> {
        if let Some(g) = generators.iter().find(|g| g.degree() != degree) {
            return Err(Error::DegreeMismatch { left: degree, right: g.degree() });
        }
        Ok(PermutationGroup { degree, generators, base_hint: Vec::new(), bsgs: OnceLock::new() })
    }

    /// Like [`PermutationGroup::new`], with preferred leading base points.
    pub fn with_base_hint(degree: usize, generators: Vec<Permutation>, base: Vec<usize>) -> Result<Self> {
        let mut g = PermutationGroup::new(degree, generators)?;
        if let Some(&bad) = base.iter().find(|&&b| b >= degree) {
            return Err(Error::OutOfRange { index: bad, len: degree });
        }
        g.base_hint = base;
        Ok(g)
    }

    pub fn trivial(degree: usize) -> Self {
        PermutationGroup::new(degree, Vec::new()).expect("no generators")
    }

    pub fn symmetric(degree: usize) -> Self {
        let mut gens = Vec::new();
        if degree >= 2 {
            gens.push(Permutation::from_cycles(degree, &[&[0, 1]]).expect("valid"));
            let cycle: Vec<usize> = (0..degree).collect();
            gens.push(Permutation::from_cycles(degree, &[&cycle]).expect("valid"));
        }
        PermutationGroup::new(degree, gens).expect("matching degrees")
    }

    pub fn alternating(degree: usize) -> Self {
        let gens = (2..degree).map(|i| Permutation::from_cycles(degree, &[&[0, 1, i]]).expect("valid")).collect();
        PermutationGroup::new(degree, gens).expect("matching degrees")
    }

    pub fn cyclic(degree: usize) -> Self {
        let cycle: Vec<usize> = (0..degree).collect();
        let gens =
            if degree >= 2 { vec![Permutation::from_cycles(degree, &[&cycle]).expect("valid")] } else { Vec::new() };
        PermutationGroup::new(degree, gens).expect("matching degrees")
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn generators(&self) -> &[Permutation] {
        &self.generators
    }

    /// Base and strong generating set, computed once.
    pub fn bsgs(&self) -> &Bsgs {
        self.bsgs.get_or_init(|| Bsgs::build(self.degree, &self.generators, &self.base_hint))
    }

    pub fn order(&self) -> BigUint {
        self.bsgs().order()
    }

    fn check_degree(&self, degree: usize) -> Result<()> {
        if degree != self.degree {
            return Err(Error::DegreeMismatch { left: self.degree, right: degree });
        }
        Ok(())
    }

    pub fn contains(&self, perm: &Permutation) -> Result<bool> {
        self.check_degree(perm.degree())?;
        Ok(self.bsgs().contains(perm))
    }

    /// Whether every generator of `self` lies in `other`.
    pub fn is_subgroup_of(&self, other: &PermutationGroup) -> Result<bool> {
        other.check_degree(self.degree)?;
        for g in &self.generators {
            if !other.contains(g)? {
                return Ok(false);
            }
        }
        Ok(true)
    }

    pub fn orbit(&self, point: usize) -> Vec<usize> {
        let mut seen = vec![false; self.degree];
        let mut orbit = vec![point];
        seen[point] = true;
        let mut i = 0;
        while i < orbit.len() {
            let x = orbit[i];
            for g in &self.generators {
                let y = g.apply(x);
                if !seen[y] {
                    seen[y] = true;
                    orbit.push(y);
                }
            }
            i += 1;
        }
        orbit
    }

    /// Orbit of an ordered pair under the componentwise action.
    pub fn pair_orbit_size(&self, pair: (usize, usize)) -> usize {
        let n = self.degree;
        let mut seen = vec![false; n * n];
        let mut stack = vec![pair];
        seen[pair.0 * n + pair.1] = true;
        let mut size = 0;
        while let Some((x, y)) = stack.pop() {
            size += 1;
            for g in &self.generators {
                let (gx, gy) = (g.apply(x), g.apply(y));
                if !std::mem::replace(&mut seen[gx * n + gy], true) {
                    stack.push((gx, gy));
                }
            }
        }
        size
    }

    pub fn is_transitive(&self) -> bool {
        self.degree == 0 || self.orbit(0).len() == self.degree
    }

    /// The point stabiliser as an explicit subgroup.
    pub fn stabilizer(&self, point: usize) -> Result<PermutationGroup> {
        if point >= self.degree {
            return Err(Error::OutOfRange { index: point, len: self.degree });
        }
        let current = self.bsgs();
        let chain = if current.base().first() == Some(&point) {
            current.clone()
        } else {
            let mut hint = vec![point];
            hint.extend(current.base());
            Bsgs::build(self.degree, current.strong_generators(), &hint)
        };
        let gens = irredundant(self.degree, chain.stabilizer_generators(1));
        let tail = chain.base().iter().skip(1).copied().collect();
        let group = PermutationGroup::with_base_hint(self.degree, gens, tail)?;
        let _ = group.bsgs.set(chain.tail(1));
        Ok(group)
    }

    /// `|G| / |orbit(point)|`.
    pub fn stabilizer_order(&self, point: usize) -> Result<BigUint> {
        if point >= self.degree {
            return Err(Error::OutOfRange { index: point, len: self.degree });
        }
        Ok(self.order() / self.orbit(point).len())
    }

    /// Finest block system in which `a` and `b` share a block, as a class id
    /// per point.
    pub fn minimal_block_system(&self, a: usize, b: usize) -> Vec<usize> {
        let mut parent: Vec<usize> = (0..self.degree).collect();
        fn find(parent: &mut [usize], x: usize) -> usize {
            let mut r = x;
            while parent[r] != r {
                r = parent[r];
            }
            let mut y = x;
            while parent[y] != r {
                let next = parent[y];
                parent[y] = r;
                y = next;
            }
            r
        }
        let mut pending = vec![(a, b)];
        let (ra, rb) = (find(&mut parent, a), find(&mut parent, b));
        if ra != rb {
            parent[ra.max(rb)] = ra.min(rb);
        }
        while let Some((x, y)) = pending.pop() {
            for g in &self.generators {
                let (gx, gy) = (g.apply(x), g.apply(y));
                let (rx, ry) = (find(&mut parent, gx), find(&mut parent, gy));
                if rx != ry {
                    parent[rx.max(ry)] = rx.min(ry);
                    pending.push((gx, gy));
                }
            }
        }
        (0..self.degree).map(|x| find(&mut parent, x)).collect()
    }

    /// True iff the only blocks are singletons and the whole set.
    pub fn is_primitive(&self) -> Result<bool> {
        if !self.is_transitive() {
            return Err(Error::NotTransitive);
        }
        if self.degree <= 2 {
            return Ok(true);
        }
        Ok((1..self.degree).all(|w| {
            let classes = self.minimal_block_system(0, w);
            classes.iter().all(|&c| c == classes[0])
        }))
    }

    /// True iff `x^-1 t x` lies in `h` for every generator `x` of `self` and
    /// `t` of `h`, i.e. `self` normalises `h`.
    pub fn normalizes(&self, h: &PermutationGroup) -> Result<bool> {
        h.check_degree(self.degree)?;
        for x in &self.generators {
            for t in h.generators() {
                if !h.contains(&t.conjugate_by(x))? {
                    return Ok(false);
                }
            }
        }
        Ok(true)
    }

    /// Smallest normal subgroup of `self` containing `gens`.
    pub fn normal_closure(&self, gens: &[Permutation]) -> Result<PermutationGroup> {
        for g in gens {
            self.check_degree(g.degree())?;
        }
        let mut chain = Bsgs::build(self.degree, &[], &[]);
        let mut closure_gens: Vec<Permutation> = gens.iter().filter(|g| chain.extend(g)).cloned().collect();
        let mut pending = closure_gens.clone();
        while let Some(t) = pending.pop() {
            for x in &self.generators {
                let c = t.conjugate_by(x);
                if chain.extend(&c) {
                    closure_gens.push(c.clone());
                    pending.push(c);
                }
            }
        }
        let group = PermutationGroup::new(self.degree, closure_gens)?;
        let _ = group.bsgs.set(chain);
        Ok(group)
    }

    pub fn derived_subgroup(&self) -> Result<PermutationGroup> {
        let mut commutators = Vec::new();
        for (i, a) in self.generators.iter().enumerate() {
            for b in &self.generators[i + 1..] {
                let c = a.commutator(b);
                if !c.is_identity() {
                    commutators.push(c);
                }
            }
        }
        self.normal_closure(&commutators)
    }

    /// Orders of the derived series, stopping when it stabilises.
    pub fn derived_series_orders(&self) -> Result<Vec<BigUint>> {
        let mut orders = vec![self.order()];
        let mut current = self.clone();
        loop {
            let next = current.derived_subgroup()?;
            let order = next.order();
            if &order == orders.last().expect("non-empty") {
                return Ok(orders);
            }
            orders.push(order);
            current = next;
        }
    }
}

/// A subsequence of `gens` generating the same group, each element outside
/// the group generated by those before it.
fn irredundant(degree: usize, gens: Vec<Permutation>) -> Vec<Permutation> {
    let mut chain = Bsgs::build(degree, &[], &[]);
    gens.into_iter().filter(|g| chain.extend(g)).collect()
}

#[derive(Serialize, Deserialize)]
struct GroupJson {
    degree: usize,
    generators: Vec<Permutation>,
    order: String,
}

impl Serialize for PermutationGroup {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        GroupJson { degree: self.degree, generators: self.generators.clone(), order: self.order().to_string() }
            .serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for PermutationGroup {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        use serde::de::Error as _;
        let raw = GroupJson::deserialize(deserializer)?;
        let group = PermutationGroup::new(raw.degree, raw.generators).map_err(D::Error::custom)?;
        let claimed: BigUint = raw.order.parse().map_err(D::Error::custom)?;
        if group.order() != claimed {
            return Err(D::Error::custom(format!("claimed order {claimed} but generators give {}", group.order())));
        }
        Ok(group)
    }
}
