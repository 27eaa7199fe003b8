//! Individualisation-refinement search over ordered partitions.
//!
//! One engine serves three callers: automorphism groups of graphs,
//! automorphism groups of complete graphs with coloured edges (schemes), and
//! isomorphism tests between two graphs. Every search compares against a
//! fixed reference path (the "first path") of one structure and looks for
//! leaves of the other search tree that are equivalent to the reference leaf.
//! Refinement traces are label-invariant, so a node whose trace diverges from
//! the reference at the same depth cannot lead to an equivalent leaf.

use std::collections::VecDeque;
use std::time::{Duration, Instant};

use crate::error::{Error, Result};
use crate::graph::Graph;

/// Limits for one search.
#[derive(Clone, Debug)]
pub struct SearchOptions {
    pub max_vertices: usize,
    pub timeout: Duration,
}

impl SearchOptions {
    pub fn automorphism() -> Self {
        SearchOptions { max_vertices: 1024, timeout: Duration::from_secs(300) }
    }

    pub fn isomorphism() -> Self {
        SearchOptions { max_vertices: 256, timeout: Duration::from_secs(300) }
    }

    pub fn with_timeout(mut self, timeout: Duration) -> Self {
        self.timeout = timeout;
        self
    }

    pub fn with_max_vertices(mut self, max_vertices: usize) -> Self {
        self.max_vertices = max_vertices;
        self
    }
}

impl Default for SearchOptions {
    fn default() -> Self {
        SearchOptions::automorphism()
    }
}

/// Complete graph with coloured edges. Colour 0 means "no edge" (and the
/// diagonal); colours `1..=colors` drive refinement.
pub(crate) struct Colored {
    n: usize,
    adj: Vec<Vec<Vec<u32>>>,
    matrix: Vec<u8>,
}

impl Colored {
    pub(crate) fn from_graph(g: &Graph) -> Self {
        let n = g.n();
        let mut matrix = vec![0u8; n * n];
        let mut adj = vec![Vec::with_capacity(0); n];
        for (u, row) in adj.iter_mut().enumerate() {
            for v in g.neighbors(u) {
                row.push(v as u32);
                matrix[u * n + v] = 1;
            }
        }
        Colored { n, adj: vec![adj], matrix }
    }

    /// `coloring[x * n + y]` is the colour of the ordered pair `(x, y)`.
    pub(crate) fn from_coloring(n: usize, coloring: &[u8]) -> Result<Self> {
        if coloring.len() != n * n {
            return Err(Error::InvalidElement(format!("coloring has {} entries, expected {}", coloring.len(), n * n)));
        }
        let colors = coloring.iter().copied().max().unwrap_or(0) as usize;
        let mut adj = vec![vec![Vec::new(); n]; colors];
        for x in 0..n {
            for y in 0..n {
                let c = coloring[x * n + y];
                if c != coloring[y * n + x] {
                    return Err(Error::InvalidElement(format!("coloring not symmetric at ({x}, {y})")));
                }
                if c > 0 {
                    adj[c as usize - 1][x].push(y as u32);
                }
            }
        }
        Ok(Colored { n, adj, matrix: coloring.to_vec() })
    }

    fn color_counts(&self) -> Vec<usize> {
        self.adj.iter().map(|rows| rows.iter().map(Vec::len).sum()).collect()
    }

    fn degree_profile(&self) -> Vec<Vec<usize>> {
        let mut profile: Vec<Vec<usize>> =
            (0..self.n).map(|v| self.adj.iter().map(|rows| rows[v].len()).collect()).collect();
        profile.sort_unstable();
        profile
    }

    /// Whether `map` (reference vertex -> target vertex) carries every
    /// coloured pair of `self` onto a pair of the same colour in `target`.
    fn preserved_by(&self, target: &Colored, map: &[u32]) -> bool {
        let n = self.n;
        self.adj.iter().enumerate().all(|(c, rows)| {
            let colour = c as u8 + 1;
            rows.iter().enumerate().all(|(x, nbrs)| {
                let mx = map[x] as usize;
                nbrs.iter().all(|&u| target.matrix[mx * n + map[u as usize] as usize] == colour)
            })
        })
    }
}

#[derive(Clone)]
struct Partition {
    elems: Vec<u32>,
    pos: Vec<u32>,
    start_of: Vec<u32>,
    len_at: Vec<u32>,
    cells: usize,
}

struct Scratch {
    count: Vec<u32>,
    touched: Vec<u32>,
    in_queue: Vec<bool>,
}

impl Scratch {
    fn new(n: usize) -> Self {
        Scratch { count: vec![0; n], touched: Vec::new(), in_queue: vec![false; n] }
    }
}

/// Records a refinement trace, or compares against a recorded one and stops
/// at the first divergence.
struct Trace<'a> {
    expected: Option<&'a [u64]>,
    record: Vec<u64>,
    at: usize,
}

impl<'a> Trace<'a> {
    fn record() -> Self {
        Trace { expected: None, record: Vec::new(), at: 0 }
    }

    fn compare(expected: &'a [u64]) -> Self {
        Trace { expected: Some(expected), record: Vec::new(), at: 0 }
    }

    fn push(&mut self, value: u64) -> bool {
        match self.expected {
            None => {
                self.record.push(value);
                true
            }
            Some(exp) => {
                let ok = exp.get(self.at) == Some(&value);
                self.at += 1;
                ok
            }
        }
    }

    fn complete(&self) -> bool {
        self.expected.is_none_or(|exp| self.at == exp.len())
    }
}

fn mix(h: u64, x: u64) -> u64 {
    let mut z = (h ^ x).wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

impl Partition {
    fn unit(n: usize) -> Self {
        let mut len_at = vec![0; n];
        if n > 0 {
            len_at[0] = n as u32;
        }
        Partition {
            elems: (0..n as u32).collect(),
            pos: (0..n as u32).collect(),
            start_of: vec![0; n],
            len_at,
            cells: usize::from(n > 0),
        }
    }

    fn is_discrete(&self) -> bool {
        self.cells == self.elems.len()
    }

    fn cell(&self, start: usize) -> &[u32] {
        &self.elems[start..start + self.len_at[start] as usize]
    }

    /// First largest non-singleton cell, by position.
    fn target_cell(&self) -> Option<usize> {
        let mut best: Option<(usize, u32)> = None;
        let mut s = 0;
        while s < self.elems.len() {
            let len = self.len_at[s];
            if len > 1 && best.is_none_or(|(_, l)| len > l) {
                best = Some((s, len));
            }
            s += len as usize;
        }
        best.map(|(s, _)| s)
    }

    /// Splits `v` off the front of its cell; returns the new singleton's start.
    fn individualize(&mut self, v: u32) -> usize {
        let start = self.start_of[v as usize] as usize;
        let len = self.len_at[start];
        debug_assert!(len > 1);
        let pv = self.pos[v as usize] as usize;
        let first = self.elems[start];
        self.elems.swap(start, pv);
        self.pos[first as usize] = pv as u32;
        self.pos[v as usize] = start as u32;
        self.len_at[start] = 1;
        self.len_at[start + 1] = len - 1;
        for i in start + 1..start + len as usize {
            self.start_of[self.elems[i] as usize] = (start + 1) as u32;
        }
        self.cells += 1;
        start
    }

    /// Refines to the coarsest equitable partition finer than `self`, starting
    /// from the given splitter cells. Returns false as soon as `trace` reports
    /// a divergence.
    fn refine(&mut self, g: &Colored, splitters: &[usize], trace: &mut Trace, scratch: &mut Scratch) -> bool {
        let ok = self.refine_inner(g, splitters, trace, scratch);
        for &u in &scratch.touched {
            scratch.count[u as usize] = 0;
        }
        scratch.touched.clear();
        for flag in scratch.in_queue.iter_mut() {
            *flag = false;
        }
        ok && trace.push(mix(0xce11, self.cells as u64)) && trace.complete()
    }

    fn refine_inner(&mut self, g: &Colored, splitters: &[usize], trace: &mut Trace, scratch: &mut Scratch) -> bool {
        let mut queue = VecDeque::new();
        for &s in splitters {
            if !scratch.in_queue[s] {
                scratch.in_queue[s] = true;
                queue.push_back(s);
            }
        }
        let mut members = Vec::new();
        let mut touched_cells = Vec::new();
        let mut groups: Vec<(usize, u32, u32)> = Vec::new();
        while let Some(w) = queue.pop_front() {
            scratch.in_queue[w] = false;
            members.clear();
            members.extend_from_slice(self.cell(w));
            for (c, rows) in g.adj.iter().enumerate() {
                for &x in &members {
                    for &u in &rows[x as usize] {
                        let slot = &mut scratch.count[u as usize];
                        if *slot == 0 {
                            scratch.touched.push(u);
                        }
                        *slot += 1;
                    }
                }
                if scratch.touched.is_empty() {
                    continue;
                }
                touched_cells.clear();
                touched_cells.extend(scratch.touched.iter().map(|&u| self.start_of[u as usize] as usize));
                touched_cells.sort_unstable();
                touched_cells.dedup();
                for &s in &touched_cells {
                    let len = self.len_at[s] as usize;
                    if len == 1 {
                        continue;
                    }
                    let count = &scratch.count;
                    let seg = &mut self.elems[s..s + len];
                    seg.sort_unstable_by_key(|&v| count[v as usize]);
                    if count[seg[0] as usize] == count[seg[len - 1] as usize] {
                        continue;
                    }
                    groups.clear();
                    let mut gs = s;
                    for i in s..s + len {
                        let v = self.elems[i];
                        self.pos[v as usize] = i as u32;
                        let key = count[v as usize];
                        if i > s && key != count[self.elems[i - 1] as usize] {
                            gs = i;
                        }
                        match groups.last_mut() {
                            Some(last) if last.0 == gs => last.1 += 1,
                            _ => groups.push((gs, 1, key)),
                        }
                        self.start_of[v as usize] = gs as u32;
                    }
                    let mut h = mix(mix(s as u64, c as u64), groups.len() as u64);
                    for &(start, glen, key) in &groups {
                        self.len_at[start] = glen;
                        h = mix(h, (u64::from(key) << 32) | u64::from(glen));
                    }
                    self.cells += groups.len() - 1;
                    if !trace.push(h) {
                        return false;
                    }
                    if scratch.in_queue[s] {
                        for &(start, _, _) in &groups[1..] {
                            scratch.in_queue[start] = true;
                            queue.push_back(start);
                        }
                    } else {
                        let largest = groups
                            .iter()
                            .enumerate()
                            .fold(0, |best, (i, gr)| if gr.1 > groups[best].1 { i } else { best });
                        for (i, &(start, _, _)) in groups.iter().enumerate() {
                            if i != largest {
                                scratch.in_queue[start] = true;
                                queue.push_back(start);
                            }
                        }
                    }
                }
                for &u in &scratch.touched {
                    scratch.count[u as usize] = 0;
                }
                scratch.touched.clear();
            }
        }
        true
    }
}

struct Level {
    partition: Partition,
    target: usize,
    chosen: u32,
    trace: Vec<u64>,
}

struct FirstPath {
    root_trace: Vec<u64>,
    levels: Vec<Level>,
    leaf: Vec<u32>,
}

struct Searcher<'a> {
    reference: &'a Colored,
    target: &'a Colored,
    path: &'a FirstPath,
    scratch: Scratch,
    deadline: Instant,
    timeout: Duration,
    nodes: u64,
}

fn first_path(g: &Colored, scratch: &mut Scratch) -> FirstPath {
    let mut p = Partition::unit(g.n);
    let mut root = Trace::record();
    let roots: &[usize] = if g.n > 0 { &[0] } else { &[] };
    p.refine(g, roots, &mut root, scratch);
    let mut levels = Vec::new();
    while let Some(t) = p.target_cell() {
        let v = *p.cell(t).iter().min().expect("non-empty cell");
        let mut child = p.clone();
        let s = child.individualize(v);
        let mut trace = Trace::record();
        child.refine(g, &[s], &mut trace, scratch);
        levels.push(Level { partition: p, target: t, chosen: v, trace: trace.record });
        p = child;
    }
    FirstPath { root_trace: root.record, levels, leaf: p.elems }
}

impl Searcher<'_> {
    fn tick(&mut self) -> Result<()> {
        self.nodes += 1;
        if self.nodes % 64 == 1 && Instant::now() > self.deadline {
            return Err(Error::Timeout(self.timeout));
        }
        Ok(())
    }

    fn leaf_map(&self, leaf: &[u32]) -> Option<Vec<u32>> {
        let mut map = vec![0u32; leaf.len()];
        for (&r, &t) in self.path.leaf.iter().zip(leaf) {
            map[r as usize] = t;
        }
        self.reference.preserved_by(self.target, &map).then_some(map)
    }

    /// Searches the subtree below `node` (a depth-`depth` node of the target
    /// tree) reached by individualising `candidate`, for a leaf equivalent to
    /// the reference leaf.
    fn descend(&mut self, node: &Partition, depth: usize, candidate: u32) -> Result<Option<Vec<u32>>> {
        self.tick()?;
        let level = &self.path.levels[depth];
        let mut child = node.clone();
        let s = child.individualize(candidate);
        let mut trace = Trace::compare(&level.trace);
        if !child.refine(self.target, &[s], &mut trace, &mut self.scratch) {
            return Ok(None);
        }
        if depth + 1 == self.path.levels.len() {
            return Ok(if child.is_discrete() { self.leaf_map(&child.elems) } else { None });
        }
        let Some(t) = child.target_cell() else { return Ok(None) };
        if t != self.path.levels[depth + 1].target {
            return Ok(None);
        }
        let mut cell = child.cell(t).to_vec();
        cell.sort_unstable();
        for u in cell {
            if let Some(map) = self.descend(&child, depth + 1, u)? {
                return Ok(Some(map));
            }
        }
        Ok(None)
    }
}

struct UnionFind(Vec<u32>);

impl UnionFind {
    fn new(n: usize) -> Self {
        UnionFind((0..n as u32).collect())
    }

    fn find(&mut self, x: u32) -> u32 {
        let mut r = x;
        while self.0[r as usize] != r {
            r = self.0[r as usize];
        }
        let mut y = x;
        while self.0[y as usize] != r {
            let next = self.0[y as usize];
            self.0[y as usize] = r;
            y = next;
        }
        r
    }

    fn union(&mut self, a: u32, b: u32) {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra != rb {
            let (lo, hi) = if ra < rb { (ra, rb) } else { (rb, ra) };
            self.0[hi as usize] = lo;
        }
    }
}

/// Output of an automorphism search: generators that form a strong
/// generating set relative to `base`, with the basic orbit lengths.
#[derive(Clone, Debug)]
pub struct AutSearch {
    pub generators: Vec<Vec<usize>>,
    pub base: Vec<usize>,
    pub orbit_sizes: Vec<usize>,
}

impl AutSearch {
    /// Group order as the product of basic orbit lengths.
    pub fn order(&self) -> num_bigint::BigUint {
        self.orbit_sizes.iter().fold(num_bigint::BigUint::from(1u32), |acc, &s| acc * s)
    }
}

fn check_size(n: usize, opts: &SearchOptions) -> Result<()> {
    if n > opts.max_vertices {
        return Err(Error::BoundExceeded { value: n as u64, bound: opts.max_vertices as u64 });
    }
    Ok(())
}

pub(crate) fn automorphisms(g: &Colored, opts: &SearchOptions) -> Result<AutSearch> {
    check_size(g.n, opts)?;
    let n = g.n;
    let mut scratch = Scratch::new(n);
    let path = first_path(g, &mut scratch);
    let mut searcher = Searcher {
        reference: g,
        target: g,
        path: &path,
        scratch,
        deadline: Instant::now() + opts.timeout,
        timeout: opts.timeout,
        nodes: 0,
    };
    let mut generators: Vec<Vec<u32>> = Vec::new();
    let mut orbit_sizes = vec![1; path.levels.len()];
    for depth in (0..path.levels.len()).rev() {
        let level = &path.levels[depth];
        let v = level.chosen;
        let mut cell = level.partition.cell(level.target).to_vec();
        cell.sort_unstable();
        // Every generator found so far fixes the base points above `depth`.
        let mut orbits = UnionFind::new(n);
        for gen in &generators {
            for (x, &y) in gen.iter().enumerate() {
                orbits.union(x as u32, y);
            }
        }
        let mut failed: Vec<u32> = Vec::new();
        for &w in &cell {
            if w == v || orbits.find(w) == orbits.find(v) {
                continue;
            }
            if failed.iter().any(|&f| orbits.find(f) == orbits.find(w)) {
                continue;
            }
            match searcher.descend(&level.partition, depth, w)? {
                Some(map) => {
                    for (x, &y) in map.iter().enumerate() {
                        orbits.union(x as u32, y);
                    }
                    generators.push(map);
                }
                None => failed.push(w),
            }
        }
        let root = orbits.find(v);
        orbit_sizes[depth] = cell.iter().filter(|&&w| orbits.find(w) == root).count();
    }
    Ok(AutSearch {
        generators: generators.into_iter().map(|gen| gen.into_iter().map(|x| x as usize).collect()).collect(),
        base: path.levels.iter().map(|l| l.chosen as usize).collect(),
        orbit_sizes,
    })
}

pub(crate) fn graph_automorphisms(g: &Graph, opts: &SearchOptions) -> Result<AutSearch> {
    check_size(g.n(), opts)?;
    automorphisms(&Colored::from_graph(g), opts)
}

pub(crate) fn coloring_automorphisms(n: usize, coloring: &[u8], opts: &SearchOptions) -> Result<AutSearch> {
    check_size(n, opts)?;
    automorphisms(&Colored::from_coloring(n, coloring)?, opts)
}

pub(crate) fn find_isomorphism(g: &Graph, h: &Graph, opts: &SearchOptions) -> Result<Option<Vec<usize>>> {
    check_size(g.n().max(h.n()), opts)?;
    if g.n() != h.n() || g.edge_count() != h.edge_count() {
        return Ok(None);
    }
    let (cg, ch) = (Colored::from_graph(g), Colored::from_graph(h));
    if cg.color_counts() != ch.color_counts() || cg.degree_profile() != ch.degree_profile() {
        return Ok(None);
    }
    let n = g.n();
    let mut scratch = Scratch::new(n);
    let path = first_path(&cg, &mut scratch);
    let mut root = Partition::unit(n);
    let mut trace = Trace::compare(&path.root_trace);
    let roots: &[usize] = if n > 0 { &[0] } else { &[] };
    if !root.refine(&ch, roots, &mut trace, &mut scratch) {
        return Ok(None);
    }
    let mut searcher = Searcher {
        reference: &cg,
        target: &ch,
        path: &path,
        scratch,
        deadline: Instant::now() + opts.timeout,
        timeout: opts.timeout,
        nodes: 0,
    };
    let found = match path.levels.first() {
        None => {
            if root.is_discrete() {
                searcher.leaf_map(&root.elems)
            } else {
                None
            }
        }
        Some(first) => {
            if root.target_cell() != Some(first.target) {
                return Ok(None);
            }
            let mut cell = root.cell(first.target).to_vec();
            cell.sort_unstable();
            let mut found = None;
            for u in cell {
                if let Some(map) = searcher.descend(&root, 0, u)? {
                    found = Some(map);
                    break;
                }
            }
            found
        }
    };
    Ok(found.map(|m| m.into_iter().map(|x| x as usize).collect()))
}
