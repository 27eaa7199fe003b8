//! Undirected simple graphs stored as symmetric bit matrices.

use std::collections::VecDeque;

use crate::error::{Error, Result};
use crate::field::{FieldElement, FieldSpec};
use crate::search::{self, SearchOptions};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Graph {
    n: usize,
    words: usize,
    bits: Vec<u64>,
    labels: Option<Vec<FieldElement>>,
}

impl Graph {
    /// The edgeless graph on `n` vertices.
    pub fn empty(n: usize) -> Self {
        let words = n.div_ceil(64).max(1);
        Graph { n, words, bits: vec![0; n * words], labels: None }
    }

    pub fn complete(n: usize) -> Self {
        let mut g = Graph::empty(n);
        for u in 0..n {
            for v in u + 1..n {
                g.set_edge(u, v);
            }
        }
        g
    }

    pub fn cycle(n: usize) -> Self {
        let edges: Vec<_> = (0..n).map(|i| (i, (i + 1) % n)).collect();
        Graph::from_edges(n, &edges).expect("cycle edges are in range")
    }

    pub fn from_edges(n: usize, edges: &[(usize, usize)]) -> Result<Self> {
        let mut g = Graph::empty(n);
        for &(u, v) in edges {
            for x in [u, v] {
                if x >= n {
                    return Err(Error::OutOfRange { index: x, len: n });
                }
            }
            if u == v {
                return Err(Error::InvalidElement(format!("loop at vertex {u}")));
            }
            g.set_edge(u, v);
        }
        Ok(g)
    }

    pub(crate) fn set_edge(&mut self, u: usize, v: usize) {
        self.bits[u * self.words + v / 64] |= 1 << (v % 64);
        self.bits[v * self.words + u / 64] |= 1 << (u % 64);
    }

    /// Attaches one label per vertex; labels must be pairwise distinct.
    pub fn with_labels(mut self, labels: Vec<FieldElement>) -> Result<Self> {
        if labels.len() != self.n {
            return Err(Error::InvalidElement(format!("{} labels for {} vertices", labels.len(), self.n)));
        }
        let mut sorted = labels.clone();
        sorted.sort_unstable();
        if sorted.windows(2).any(|w| w[0] == w[1]) {
            return Err(Error::InvalidElement("duplicate vertex label".into()));
        }
        self.labels = Some(labels);
        Ok(self)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn labels(&self) -> Option<&[FieldElement]> {
        self.labels.as_deref()
    }

    pub fn has_edge(&self, u: usize, v: usize) -> bool {
        self.bits[u * self.words + v / 64] >> (v % 64) & 1 == 1
    }

    pub(crate) fn row(&self, u: usize) -> &[u64] {
        &self.bits[u * self.words..(u + 1) * self.words]
    }

    pub fn neighbors(&self, u: usize) -> impl Iterator<Item = usize> + '_ {
        self.row(u).iter().enumerate().flat_map(|(w, &word)| {
            let mut word = word;
            std::iter::from_fn(move || {
                if word == 0 {
                    return None;
                }
                let bit = word.trailing_zeros() as usize;
                word &= word - 1;
                Some(w * 64 + bit)
            })
        })
    }

    pub fn degree(&self, u: usize) -> usize {
        self.row(u).iter().map(|w| w.count_ones() as usize).sum()
    }

    pub fn edge_count(&self) -> usize {
        (0..self.n).map(|u| self.degree(u)).sum::<usize>() / 2
    }

    /// Edges `(u, v)` with `u < v`, in row order.
    pub fn edges(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        (0..self.n).flat_map(move |u| self.neighbors(u).filter(move |&v| v > u).map(move |v| (u, v)))
    }

    /// The common valency if the graph is regular.
    pub fn regular_valency(&self) -> Option<usize> {
        let d = if self.n == 0 { 0 } else { self.degree(0) };
        (0..self.n).all(|u| self.degree(u) == d).then_some(d)
    }

    /// Checks that `perm` (vertex `v` goes to `perm[v]`) maps edges to edges.
    /// Bijectivity makes this an automorphism test.
    pub fn is_automorphism(&self, perm: &[usize]) -> bool {
        perm.len() == self.n && is_bijection(perm) && self.edges().all(|(u, v)| self.has_edge(perm[u], perm[v]))
    }

    /// Checks that `map` is an isomorphism from `self` onto `other`.
    pub fn is_isomorphism_to(&self, other: &Graph, map: &[usize]) -> bool {
        self.n == other.n
            && map.len() == self.n
            && is_bijection(map)
            && self.edge_count() == other.edge_count()
            && self.edges().all(|(u, v)| other.has_edge(map[u], map[v]))
    }

    /// The graph with vertex `v` renamed to `perm[v]`.
    pub fn relabeled(&self, perm: &[usize]) -> Result<Graph> {
        if perm.len() != self.n || !is_bijection(perm) {
            return Err(Error::InvalidPermutation("relabeling is not a bijection".into()));
        }
        let mut g = Graph::empty(self.n);
        for (u, v) in self.edges() {
            g.set_edge(perm[u], perm[v]);
        }
        Ok(g)
    }

    pub fn complement(&self) -> Graph {
        let mut g = Graph::empty(self.n);
        for u in 0..self.n {
            for v in u + 1..self.n {
                if !self.has_edge(u, v) {
                    g.set_edge(u, v);
                }
            }
        }
        g
    }

    /// graph6 encoding (no header, no trailing newline).
    pub fn to_graph6(&self) -> String {
        let mut out: Vec<u8> = Vec::new();
        let n = self.n as u64;
        if n <= 62 {
            out.push(n as u8 + 63);
        } else if n <= 258_047 {
            out.push(126);
            for shift in [12, 6, 0] {
                out.push(((n >> shift) & 63) as u8 + 63);
            }
        } else {
            out.extend([126, 126]);
            for shift in [30, 24, 18, 12, 6, 0] {
                out.push(((n >> shift) & 63) as u8 + 63);
            }
        }
        let mut acc = 0u8;
        let mut filled = 0;
        for j in 1..self.n {
            for i in 0..j {
                acc = (acc << 1) | u8::from(self.has_edge(i, j));
                filled += 1;
                if filled == 6 {
                    out.push(acc + 63);
                    acc = 0;
                    filled = 0;
                }
            }
        }
        if filled > 0 {
            out.push((acc << (6 - filled)) + 63);
        }
        String::from_utf8(out).expect("graph6 is printable ASCII")
    }

    pub fn from_graph6(text: &str) -> Result<Graph> {
        let text = text.trim_end_matches(['\n', '\r']);
        let text = text.strip_prefix(">>graph6<<").unwrap_or(text);
        let bytes = text.as_bytes();
        if bytes.iter().any(|&b| !(63..=126).contains(&b)) {
            return Err(Error::Graph6("byte outside the printable range 63..=126".into()));
        }
        let sixes = |s: &[u8]| s.iter().fold(0u64, |acc, &b| (acc << 6) | u64::from(b - 63));
        let (n, rest) = match bytes {
            [] => return Err(Error::Graph6("empty input".into())),
            [126, 126, tail @ ..] if tail.len() >= 6 => (sixes(&tail[..6]), &tail[6..]),
            [126, tail @ ..] if tail.len() >= 3 && tail[0] != 126 => (sixes(&tail[..3]), &tail[3..]),
            [126, ..] => return Err(Error::Graph6("truncated size field".into())),
            [b, tail @ ..] => (u64::from(b - 63), tail),
        };
        let n = n as usize;
        let needed = (n * n.saturating_sub(1) / 2).div_ceil(6);
        if rest.len() != needed {
            return Err(Error::Graph6(format!("expected {needed} data bytes for n = {n}, found {}", rest.len())));
        }
        let mut g = Graph::empty(n);
        let mut k = 0;
        for j in 1..n {
            for i in 0..j {
                let byte = rest[k / 6] - 63;
                if byte >> (5 - k % 6) & 1 == 1 {
                    g.set_edge(i, j);
                }
                k += 1;
            }
        }
        Ok(g)
    }
}

fn is_bijection(perm: &[usize]) -> bool {
    let mut seen = vec![false; perm.len()];
    perm.iter().all(|&v| v < perm.len() && !std::mem::replace(&mut seen[v], true))
}

/// Cayley graph of the additive group of `field`: `{x, y}` is an edge iff
/// `x - y` lies in `connection_set`.
pub fn cayley_graph(field: &FieldSpec, connection_set: &[FieldElement]) -> Result<Graph> {
    let q = field.size();
    let mut member = vec![false; q];
    for &s in connection_set {
        if s.is_zero() {
            return Err(Error::ZeroInConnectionSet);
        }
        if s.index() >= q {
            return Err(Error::OutOfRange { index: s.index(), len: q });
        }
        member[s.index()] = true;
    }
    if connection_set.iter().any(|&s| !member[field.neg(s).index()]) {
        return Err(Error::NotSymmetricConnectionSet);
    }
    let mut g = Graph::empty(q);
    let distinct: Vec<FieldElement> =
        (0..q).filter(|&i| member[i]).map(|i| field.element(i).expect("in range")).collect();
    for x in field.elements() {
        for &s in &distinct {
            g.set_edge(x.index(), field.add(x, s).index());
        }
    }
    g.with_labels(field.elements().collect())
}

/// Vertex sets of the connected components, each sorted, ordered by smallest
/// vertex.
pub fn connected_components(g: &Graph) -> Vec<Vec<usize>> {
    let mut seen = vec![false; g.n()];
    let mut parts = Vec::new();
    for start in 0..g.n() {
        if seen[start] {
            continue;
        }
        seen[start] = true;
        let mut part = vec![start];
        let mut queue = VecDeque::from([start]);
        while let Some(u) = queue.pop_front() {
            for v in g.neighbors(u) {
                if !seen[v] {
                    seen[v] = true;
                    part.push(v);
                    queue.push_back(v);
                }
            }
        }
        part.sort_unstable();
        parts.push(part);
    }
    parts
}

pub fn is_connected(g: &Graph) -> bool {
    connected_components(g).len() <= 1
}

/// Subgraph induced on `vertices`, relabelled `0..len` in increasing vertex
/// order.
pub fn induced_subgraph(g: &Graph, vertices: &[usize]) -> Result<Graph> {
    let mut sorted = vertices.to_vec();
    sorted.sort_unstable();
    sorted.dedup();
    if let Some(&bad) = sorted.iter().find(|&&v| v >= g.n()) {
        return Err(Error::OutOfRange { index: bad, len: g.n() });
    }
    let mut h = Graph::empty(sorted.len());
    for (i, &u) in sorted.iter().enumerate() {
        for (j, &v) in sorted.iter().enumerate().skip(i + 1) {
            if g.has_edge(u, v) {
                h.set_edge(i, j);
            }
        }
    }
    match g.labels() {
        Some(labels) => h.with_labels(sorted.iter().map(|&v| labels[v]).collect()),
        None => Ok(h),
    }
}

/// Index of the tuple `digits` over `[0, a)` in lexicographic order, first
/// coordinate most significant.
pub fn tuple_index(a: usize, digits: &[usize]) -> usize {
    digits.iter().fold(0, |acc, &d| acc * a + d)
}

pub fn tuple_digits(a: usize, b: usize, mut index: usize) -> Vec<usize> {
    let mut digits = vec![0; b];
    for slot in digits.iter_mut().rev() {
        *slot = index % a;
        index /= a;
    }
    digits
}

/// The Hamming graph H(a, b) on `b`-tuples over `[0, a)`.
pub fn hamming_graph(a: usize, b: usize, max_vertices: usize) -> Result<Graph> {
    if a < 2 || b < 2 {
        return Err(Error::InvalidElement(format!("H({a},{b}) needs a >= 2 and b >= 2")));
    }
    let n = (a as u64)
        .checked_pow(b as u32)
        .filter(|&n| n <= max_vertices as u64)
        .ok_or(Error::BoundExceeded { value: (a as u64).saturating_pow(b as u32), bound: max_vertices as u64 })?
        as usize;
    let mut g = Graph::empty(n);
    let mut weight = 1;
    for _ in 0..b {
        // Vary one coordinate (of place value `weight`) and keep the others.
        for v in 0..n {
            let digit = (v / weight) % a;
            for d in digit + 1..a {
                g.set_edge(v, v + (d - digit) * weight);
            }
        }
        weight *= a;
    }
    Ok(g)
}

/// An explicit isomorphism `g -> h` (as `map[v]` = image of `v`), or `None`.
pub fn is_isomorphic(g: &Graph, h: &Graph) -> Result<Option<Vec<usize>>> {
    is_isomorphic_with(g, h, &SearchOptions::isomorphism())
}

pub fn is_isomorphic_with(g: &Graph, h: &Graph, opts: &SearchOptions) -> Result<Option<Vec<usize>>> {
    let found = search::find_isomorphism(g, h, opts)?;
    if let Some(map) = &found {
        if !g.is_isomorphism_to(h, map) {
            return Err(Error::Inconsistent("isomorphism search returned a non-isomorphism".into()));
        }
    }
    Ok(found)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::build_field;

    #[test]
    fn cayley_five_cycle() {
        let f = build_field(5, 1).unwrap();
        let s = [f.from_int(1), f.from_int(4)];
        let g = cayley_graph(&f, &s).unwrap();
        let mut edges: Vec<_> = g.edges().collect();
        edges.sort();
        assert_eq!(edges, vec![(0, 1), (0, 4), (1, 2), (2, 3), (3, 4)]);
    }

    #[test]
    fn cayley_complete_and_errors() {
        let f = build_field(2, 2).unwrap();
        let all: Vec<_> = f.elements().skip(1).collect();
        assert_eq!(cayley_graph(&f, &all).unwrap().edge_count(), 6);
        let f5 = build_field(5, 1).unwrap();
        assert!(matches!(cayley_graph(&f5, &[f5.from_int(1)]), Err(Error::NotSymmetricConnectionSet)));
        assert!(matches!(cayley_graph(&f5, &[f5.zero()]), Err(Error::ZeroInConnectionSet)));
    }

    #[test]
    fn paley_nine_is_four_regular() {
        let f = build_field(3, 2).unwrap();
        let s: Vec<_> = (0..4).map(|i| f.omega_pow(2 * i)).collect();
        let g = cayley_graph(&f, &s).unwrap();
        assert_eq!(g.regular_valency(), Some(4));
    }

    #[test]
    fn components_and_induced() {
        let k4 = Graph::complete(4);
        assert_eq!(connected_components(&k4), vec![vec![0, 1, 2, 3]]);
        let empty = Graph::empty(3);
        assert_eq!(connected_components(&empty), vec![vec![0], vec![1], vec![2]]);
        assert_eq!(induced_subgraph(&k4, &[0, 1, 2, 3]).unwrap(), k4);
        assert_eq!(induced_subgraph(&k4, &[2]).unwrap().n(), 1);
        assert!(matches!(induced_subgraph(&k4, &[4]), Err(Error::OutOfRange { .. })));
    }

    #[test]
    fn small_hamming_graphs() {
        let h22 = hamming_graph(2, 2, 1 << 20).unwrap();
        let mut e: Vec<_> = h22.edges().collect();
        e.sort();
        // 00-01, 00-10, 01-11, 10-11: the 4-cycle.
        assert_eq!(e, vec![(0, 1), (0, 2), (1, 3), (2, 3)]);
        let h32 = hamming_graph(3, 2, 1 << 20).unwrap();
        assert_eq!((h32.n(), h32.regular_valency()), (9, Some(4)));
        let cube = hamming_graph(2, 3, 1 << 20).unwrap();
        for (u, v) in cube.edges() {
            assert_eq!((u ^ v).count_ones(), 1);
        }
        assert_eq!(cube.edge_count(), 12);
        assert!(hamming_graph(10, 7, 1 << 20).is_err());
    }

    #[test]
    fn graph6_known_strings() {
        // Reference encodings from the published format description.
        assert_eq!(Graph::complete(4).to_graph6(), "C~");
        assert_eq!(Graph::cycle(5).to_graph6(), "Dhc");
        assert_eq!(Graph::empty(0).to_graph6(), "?");
        assert_eq!(Graph::from_graph6("Dhc").unwrap(), Graph::cycle(5));
        let big = Graph::cycle(100);
        let text = big.to_graph6();
        assert!(text.starts_with('~'));
        assert_eq!(Graph::from_graph6(&text).unwrap(), big);
        assert!(Graph::from_graph6("C").is_err());
    }

    #[test]
    fn isomorphism_oracle_examples() {
        let c5 = Graph::cycle(5);
        let id = is_isomorphic(&c5, &c5).unwrap().unwrap();
        assert!(c5.is_isomorphism_to(&c5, &id));
        assert!(is_isomorphic(&c5, &Graph::complete(5)).unwrap().is_none());
    }
}
