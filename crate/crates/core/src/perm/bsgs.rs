use num_bigint::BigUint;

use super::Permutation;

const NONE: u32 = u32::MAX;

/// A base with basic orbits and explicit transversals, built by deterministic
/// Schreier–Sims.
#[derive(Clone, Debug)]
pub struct Bsgs {
    degree: usize,
    strong: Vec<Permutation>,
    levels: Vec<Level>,
}

#[derive(Clone, Debug)]
struct Level {
    point: usize,
    /// Indices into the strong generating set.
    gens: Vec<usize>,
    orbit: Vec<usize>,
    slot: Vec<u32>,
    /// `reps[i]` maps `point` to `orbit[i]`.
    reps: Vec<Permutation>,
    inv_reps: Vec<Permutation>,
    /// `done[i]`: Schreier generators from `orbit[i]` already known to sift
    /// through, as a count of `gens`. Representatives never change once
    /// set and deeper groups only grow, so a passed check stays passed.
    done: Vec<usize>,
}

impl Level {
    fn new(point: usize, degree: usize) -> Self {
        let mut slot = vec![NONE; degree];
        slot[point] = 0;
        Level {
            point,
            gens: Vec::new(),
            orbit: vec![point],
            slot,
            reps: vec![Permutation::identity(degree)],
            inv_reps: vec![Permutation::identity(degree)],
            done: vec![0],
        }
    }

    fn push_point(&mut self, y: usize, rep: Permutation) {
        self.slot[y] = self.orbit.len() as u32;
        self.orbit.push(y);
        self.inv_reps.push(rep.inverse());
        self.done.push(0);
        self.reps.push(rep);
    }

    /// Adds a generator and extends the orbit and transversal.
    fn add_generator(&mut self, idx: usize, strong: &[Permutation]) {
        self.gens.push(idx);
        let g = &strong[idx];
        let old = self.orbit.len();
        for i in 0..old {
            let y = g.apply(self.orbit[i]);
            if self.slot[y] == NONE {
                let rep = self.reps[i].then(g);
                self.push_point(y, rep);
            }
        }
        let mut i = old;
        while i < self.orbit.len() {
            for gi in 0..self.gens.len() {
                let g = &strong[self.gens[gi]];
                let y = g.apply(self.orbit[i]);
                if self.slot[y] == NONE {
                    let rep = self.reps[i].then(g);
                    self.push_point(y, rep);
                }
            }
            i += 1;
        }
    }
}

impl Bsgs {
    pub fn build(degree: usize, generators: &[Permutation], base_hint: &[usize]) -> Bsgs {
        let strong: Vec<Permutation> = generators.iter().filter(|g| !g.is_identity()).cloned().collect();
        let mut base: Vec<usize> = Vec::new();
        for &b in base_hint {
            if !base.contains(&b) {
                base.push(b);
            }
        }
        for g in &strong {
            if base.iter().all(|&b| g.apply(b) == b) {
                base.push(g.first_moved().expect("non-identity"));
            }
        }
        let mut chain = Bsgs { degree, strong: Vec::new(), levels: Vec::new() };
        chain.levels = base.iter().map(|&b| Level::new(b, degree)).collect();
        for g in strong {
            chain.add_strong(g, 0);
        }
        chain.complete();
        chain
    }

    /// Adds `g` to the strong generators of every level from `from` on whose
    /// base prefix it fixes.
    fn add_strong(&mut self, g: Permutation, from: usize) {
        let idx = self.strong.len();
        let fixes_upto = self.levels.iter().take_while(|l| g.apply(l.point) == l.point).count();
        self.strong.push(g);
        let last = fixes_upto.min(self.levels.len() - 1);
        for l in from..=last {
            self.levels[l].add_generator(idx, &self.strong);
        }
    }

    /// Adds `g` to the group, keeping the chain complete. Returns false when
    /// `g` was already a member.
    pub fn extend(&mut self, g: &Permutation) -> bool {
        let (h, j) = self.sift(g, 0);
        if j == self.levels.len() && h.is_identity() {
            return false;
        }
        if j == self.levels.len() {
            self.levels.push(Level::new(h.first_moved().expect("non-identity residue"), self.degree));
        }
        // Levels below `j` keep their generators, so they stay complete.
        self.add_strong(h, 0);
        self.complete_from(j);
        true
    }

    fn complete(&mut self) {
        self.complete_from(self.levels.len().saturating_sub(1));
    }

    fn complete_from(&mut self, start: usize) {
        if self.levels.is_empty() {
            return;
        }
        let mut i = start as isize;
        while i >= 0 {
            let li = i as usize;
            match self.first_failing_schreier(li) {
                Some((h, j)) => {
                    if j == self.levels.len() {
                        let point = h.first_moved().expect("non-identity residue");
                        self.levels.push(Level::new(point, self.degree));
                    }
                    self.add_strong(h, li + 1);
                    i = j as isize;
                }
                None => i -= 1,
            }
        }
    }

    /// Sifts every Schreier generator of level `li`; returns the first residue
    /// that is not the identity, with the level where sifting stopped.
    fn first_failing_schreier(&mut self, li: usize) -> Option<(Permutation, usize)> {
        let mut oi = 0;
        while oi < self.levels[li].orbit.len() {
            let level = &self.levels[li];
            let x = level.orbit[oi];
            for gi in level.done[oi]..level.gens.len() {
                let s = &self.strong[level.gens[gi]];
                let y = s.apply(x);
                let schreier = level.reps[oi].then(s).then(&level.inv_reps[level.slot[y] as usize]);
                if schreier.is_identity() {
                    continue;
                }
                let (h, j) = self.sift(&schreier, li + 1);
                if j < self.levels.len() || !h.is_identity() {
                    self.levels[li].done[oi] = gi;
                    return Some((h, j));
                }
            }
            let level = &mut self.levels[li];
            level.done[oi] = level.gens.len();
            oi += 1;
        }
        None
    }

    fn sift(&self, g: &Permutation, from: usize) -> (Permutation, usize) {
        let mut h = g.clone();
        for (j, level) in self.levels.iter().enumerate().skip(from) {
            let s = level.slot[h.apply(level.point)];
            if s == NONE {
                return (h, j);
            }
            if s != 0 {
                h = h.then(&level.inv_reps[s as usize]);
            }
        }
        (h, self.levels.len())
    }

    pub fn contains(&self, g: &Permutation) -> bool {
        if g.degree() != self.degree {
            return false;
        }
        let (h, j) = self.sift(g, 0);
        j == self.levels.len() && h.is_identity()
    }

    pub fn order(&self) -> BigUint {
        self.levels.iter().fold(BigUint::from(1u32), |acc, l| acc * l.orbit.len())
    }

    pub fn base(&self) -> Vec<usize> {
        self.levels.iter().map(|l| l.point).collect()
    }

    pub fn orbit_sizes(&self) -> Vec<usize> {
        self.levels.iter().map(|l| l.orbit.len()).collect()
    }

    pub fn strong_generators(&self) -> &[Permutation] {
        &self.strong
    }

    /// Generators of the pointwise stabiliser of the first `level` base points.
    pub fn stabilizer_generators(&self, level: usize) -> Vec<Permutation> {
        match self.levels.get(level) {
            Some(l) => l.gens.iter().map(|&i| self.strong[i].clone()).collect(),
            None => Vec::new(),
        }
    }

    /// The stabiliser chain from `level` on, as a chain in its own right.
    pub(crate) fn tail(&self, level: usize) -> Bsgs {
        let mut used: Vec<usize> =
            self.levels[level.min(self.levels.len())..].iter().flat_map(|l| l.gens.iter().copied()).collect();
        used.sort_unstable();
        used.dedup();
        let remap = |i: usize| used.binary_search(&i).expect("collected above");
        Bsgs {
            degree: self.degree,
            strong: used.iter().map(|&i| self.strong[i].clone()).collect(),
            levels: self.levels[level.min(self.levels.len())..]
                .iter()
                .map(|l| Level { gens: l.gens.iter().map(|&i| remap(i)).collect(), ..l.clone() })
                .collect(),
        }
    }
}
