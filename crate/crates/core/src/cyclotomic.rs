//! The cyclotomic association scheme Cyc(q, k): the diagonal plus `k`
//! classes, the pair `(x, y)` lying in class `i` when `y - x ∈ S·omega^i`.

use std::sync::Arc;

use num_bigint::BigUint;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::field::{FieldElement, FieldSpec};
use crate::gpaley::{GPaleyParams, SCHEMA};
use crate::graph::Graph;
use crate::perm::{field_map, Permutation};
use crate::search::SearchOptions;

/// Default largest `q` for intersection numbers.
pub const DEFAULT_SCHEME_MAX_Q: u64 = 4096;

/// Largest dense table we are willing to allocate, in entries.
const MAX_TABLE_ENTRIES: u64 = 1 << 25;

#[derive(Clone, Debug)]
pub struct CyclotomicScheme {
    params: GPaleyParams,
    /// Class of each field element as a difference; 0 only for 0.
    class_of: Vec<u32>,
}

/// `p[h][i][j]`, stored densely.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct IntersectionTable {
    k: usize,
    entries: Vec<u32>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CheckMode {
    /// Count once per class, at a representative pair.
    Representative,
    /// Also recount at every ordered pair and compare.
    Full,
}

impl CyclotomicScheme {
    pub fn new(field: Arc<FieldSpec>, k: u64) -> Result<Self> {
        Self::from_params(GPaleyParams::from_field(field, k)?)
    }

    pub fn from_params(params: GPaleyParams) -> Result<Self> {
        let f = params.field();
        let k = params.k();
        let minus_one = f.neg(f.one());
        if f.discrete_log(minus_one)? % k != 0 {
            return Err(Error::SymmetryViolation);
        }
        let mut class_of = vec![0u32; f.size()];
        for e in 0..f.q() - 1 {
            let r = (e % k) as u32;
            class_of[f.omega_pow(e as i64).index()] = if r == 0 { k as u32 } else { r };
        }
        Ok(CyclotomicScheme { params, class_of })
    }

    pub fn params(&self) -> &GPaleyParams {
        &self.params
    }

    pub fn field(&self) -> &FieldSpec {
        self.params.field()
    }

    pub fn k(&self) -> usize {
        self.params.k() as usize
    }

    pub fn size(&self) -> usize {
        self.class_of.len()
    }

    /// The class of a nonzero difference, or 0 for zero.
    pub fn class_of_difference(&self, d: FieldElement) -> usize {
        self.class_of[d.index()] as usize
    }

    pub fn relation_of(&self, x: FieldElement, y: FieldElement) -> usize {
        self.class_of_difference(self.field().sub(y, x))
    }

    fn relation_of_index(&self, x: usize, y: usize) -> usize {
        let f = self.field();
        self.relation_of(f.element(x).expect("vertex"), f.element(y).expect("vertex"))
    }

    fn check_class(&self, i: usize) -> Result<()> {
        if i == 0 || i > self.k() {
            return Err(Error::OutOfRange { index: i, len: self.k() + 1 });
        }
        Ok(())
    }

    pub fn relation_graph(&self, i: usize) -> Result<Graph> {
        self.check_class(i)?;
        let f = self.field();
        let coset: Vec<FieldElement> = f.elements().filter(|&d| self.class_of_difference(d) == i).collect();
        crate::graph::cayley_graph(f, &coset)
    }

    /// The map `x -> x·omega^(j - i)`, checked to send class `c` to class
    /// `c + j - i` (mod `k`) and so `Γ_i` onto `Γ_j`.
    pub fn relation_graph_isomorphism(&self, i: usize, j: usize) -> Result<Permutation> {
        self.check_class(i)?;
        self.check_class(j)?;
        let f = self.field();
        let k = self.k();
        let shift = (j + k - i) % k;
        let scalar = f.omega_pow(j as i64 - i as i64);
        for d in f.elements().skip(1) {
            let from = self.class_of_difference(d);
            let to = self.class_of_difference(f.mul(d, scalar));
            if (from - 1 + shift) % k != to - 1 {
                return Err(Error::Inconsistent(format!(
                    "x -> x·omega^{} misplaces class {from}",
                    j as i64 - i as i64
                )));
            }
        }
        field_map(f, |x| f.mul(x, scalar))
    }

    pub fn intersection_numbers(&self, mode: CheckMode) -> Result<IntersectionTable> {
        self.intersection_numbers_bounded(mode, DEFAULT_SCHEME_MAX_Q)
    }

    pub fn intersection_numbers_bounded(&self, mode: CheckMode, max_q: u64) -> Result<IntersectionTable> {
        let q = self.params.q();
        if q > max_q {
            return Err(Error::BoundExceeded { value: q, bound: max_q });
        }
        let k = self.k();
        let side = (k + 1) as u64;
        if side.pow(3) > MAX_TABLE_ENTRIES {
            return Err(Error::BoundExceeded { value: side.pow(3), bound: MAX_TABLE_ENTRIES });
        }
        let f = self.field();
        let n = self.size();
        let mut table = IntersectionTable { k, entries: vec![0; (k + 1).pow(3)] };
        for h in 0..=k {
            let y = if h == 0 { 0 } else { f.omega_pow(h as i64).index() };
            for z in 0..n {
                let (i, j) = (self.class_of[z] as usize, self.relation_of_index(z, y));
                *table.entry_mut(h, i, j) += 1;
            }
        }
        if mode == CheckMode::Full {
            self.verify_table(&table)?;
        }
        Ok(table)
    }

    /// Recounts every ordered pair; the first failure in `(x, y)` order wins.
    fn verify_table(&self, table: &IntersectionTable) -> Result<()> {
        let n = self.size();
        let k = self.k();
        let failures: Vec<Option<Error>> = (0..n)
            .into_par_iter()
            .map(|x| {
                let mut counts = vec![0u32; (k + 1) * (k + 1)];
                let mut touched: Vec<usize> = Vec::new();
                let xi: Vec<usize> = (0..n).map(|z| self.relation_of_index(x, z)).collect();
                for y in 0..n {
                    let h = xi[y];
                    for (z, &i) in xi.iter().enumerate() {
                        let slot = i * (k + 1) + self.relation_of_index(z, y);
                        if counts[slot] == 0 {
                            touched.push(slot);
                        }
                        counts[slot] += 1;
                    }
                    // Counts sum to n on both sides, so agreeing on every
                    // observed slot forces agreement everywhere.
                    let mut failure = None;
                    for &slot in &touched {
                        let (i, j) = (slot / (k + 1), slot % (k + 1));
                        let expected = table.get(h, i, j);
                        if failure.is_none() && expected != counts[slot] {
                            failure = Some(Error::NotAScheme {
                                h,
                                i,
                                j,
                                x,
                                y,
                                expected: expected as u64,
                                found: counts[slot] as u64,
                            });
                        }
                        counts[slot] = 0;
                    }
                    touched.clear();
                    if failure.is_some() {
                        return failure;
                    }
                }
                None
            })
            .collect();
        match failures.into_iter().flatten().next() {
            Some(e) => Err(e),
            None => Ok(()),
        }
    }

    /// Whether every relation graph is connected, by search over cosets.
    pub fn is_primitive(&self) -> bool {
        let f = self.field();
        let n = self.size();
        let primitive = (1..=self.k()).all(|i| {
            let coset: Vec<FieldElement> = f.elements().filter(|&d| self.class_of_difference(d) == i).collect();
            let mut seen = vec![false; n];
            seen[0] = true;
            let mut stack = vec![f.zero()];
            let mut count = 1;
            while let Some(x) = stack.pop() {
                for &d in &coset {
                    let y = f.add(x, d);
                    if !seen[y.index()] {
                        seen[y.index()] = true;
                        count += 1;
                        stack.push(y);
                    }
                }
            }
            count == n
        });
        debug_assert_eq!(primitive, self.params.is_connected_by_criterion());
        primitive
    }

    /// `coloring[x * q + y]` = class of `(x, y)`; needs `k <= 255`.
    pub fn coloring(&self) -> Result<Vec<u8>> {
        if self.k() > u8::MAX as usize {
            return Err(Error::BoundExceeded { value: self.k() as u64, bound: u8::MAX as u64 });
        }
        let n = self.size();
        let mut out = vec![0u8; n * n];
        for x in 0..n {
            for y in 0..n {
                out[x * n + y] = self.relation_of_index(x, y) as u8;
            }
        }
        Ok(out)
    }

    /// `|Aut(Γ_1) ∩ ... ∩ Aut(Γ_k)|`, for `q <= 256`.
    pub fn scheme_automorphism_order(&self) -> Result<BigUint> {
        let q = self.params.q();
        if q > 256 {
            return Err(Error::BoundExceeded { value: q, bound: 256 });
        }
        let group =
            crate::autgroup::color_automorphism_group(self.size(), &self.coloring()?, &SearchOptions::isomorphism())?;
        Ok(group.order())
    }
}

impl IntersectionTable {
    pub fn k(&self) -> usize {
        self.k
    }

    fn index(&self, h: usize, i: usize, j: usize) -> usize {
        let side = self.k + 1;
        (h * side + i) * side + j
    }

    fn entry_mut(&mut self, h: usize, i: usize, j: usize) -> &mut u32 {
        let idx = self.index(h, i, j);
        &mut self.entries[idx]
    }

    /// `p[h][i][j]`.
    pub fn get(&self, h: usize, i: usize, j: usize) -> u32 {
        self.entries[self.index(h, i, j)]
    }

    /// Nested `[h][i][j]` arrays.
    pub fn to_nested(&self) -> Vec<Vec<Vec<u32>>> {
        let side = self.k + 1;
        (0..side).map(|h| (0..side).map(|i| (0..side).map(|j| self.get(h, i, j)).collect()).collect()).collect()
    }

    pub fn from_nested(nested: &[Vec<Vec<u32>>]) -> Result<Self> {
        let side = nested.len();
        if side < 2 || nested.iter().any(|m| m.len() != side || m.iter().any(|r| r.len() != side)) {
            return Err(Error::InvalidElement("intersection table is not a cube of side k + 1".into()));
        }
        Ok(IntersectionTable { k: side - 1, entries: nested.iter().flatten().flatten().copied().collect() })
    }
}

#[derive(Serialize, Deserialize)]
struct TableJson {
    schema: String,
    k: usize,
    p: Vec<Vec<Vec<u32>>>,
}

impl Serialize for IntersectionTable {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        TableJson { schema: SCHEMA.into(), k: self.k, p: self.to_nested() }.serialize(s)
    }
}

impl<'de> Deserialize<'de> for IntersectionTable {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let json = TableJson::deserialize(d)?;
        let table = IntersectionTable::from_nested(&json.p).map_err(serde::de::Error::custom)?;
        if table.k != json.k {
            return Err(serde::de::Error::custom("k does not match the table size"));
        }
        Ok(table)
    }
}
