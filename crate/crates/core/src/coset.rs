//! Todd-Coxeter coset enumeration.
//!
//! Cosets are numbered from 0 internally and in the public API; coset 0 is
//! the subgroup itself. Column `2g` holds the action of generator `g`,
//! column `2g + 1` that of its inverse (see [`crate::words::column_of`]).

use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::error::{EnumerationError, FormatError};
use crate::presentation::Presentation;
use crate::words::{column_of, letter_of_column, Letter, Word};

const NONE: u32 = u32::MAX;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Strategy {
    /// Relator-first (Haselgrove-Leech-Trotter).
    Hlt,
    /// Definition-first.
    Felsch,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct EnumerationLimits {
    pub max_cosets: usize,
    pub strategy: Strategy,
    pub lookahead: bool,
}

impl Default for EnumerationLimits {
    fn default() -> Self {
        EnumerationLimits { max_cosets: 1_000_000, strategy: Strategy::Hlt, lookahead: true }
    }
}

impl EnumerationLimits {
    pub fn with_max(max_cosets: usize) -> Self {
        EnumerationLimits { max_cosets: max_cosets.max(1), ..Self::default() }
    }

    pub fn felsch(max_cosets: usize) -> Self {
        EnumerationLimits { max_cosets: max_cosets.max(1), strategy: Strategy::Felsch, lookahead: true }
    }
}

/// A closed, standardized coset table.
#[derive(Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CosetTable {
    ngens: usize,
    index: usize,
    /// Row-major, `index * 2 * ngens` entries.
    entries: Vec<u32>,
}

impl std::fmt::Debug for CosetTable {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "CosetTable(index {}, {} generators)", self.index, self.ngens)
    }
}

impl CosetTable {
    /// Builds a table from explicit generator permutations (`perms[g][c] = c·g`).
    /// The result is standardized from coset 0.
    pub fn from_permutations(perms: &[Vec<usize>]) -> Self {
        let ngens = perms.len();
        let index = perms.first().map(Vec::len).unwrap_or(1);
        let ncols = 2 * ngens;
        let mut entries = vec![NONE; index * ncols];
        for (g, p) in perms.iter().enumerate() {
            assert_eq!(p.len(), index);
            for (c, &d) in p.iter().enumerate() {
                entries[c * ncols + 2 * g] = d as u32;
                entries[d * ncols + 2 * g + 1] = c as u32;
            }
        }
        assert!(entries.iter().all(|&e| e != NONE), "permutations must be bijections");
        let mut t = CosetTable { ngens, index, entries };
        t.standardize();
        t
    }

    /// Table of the kernel of `letter g ↦ images[g]` into `Z/p`; coset `v`
    /// is the fibre over `v`. The map must be onto.
    pub fn from_cyclic_images(images: &[u64], p: u64) -> Self {
        let perms: Vec<Vec<usize>> = images
            .iter()
            .map(|&a| (0..p).map(|v| ((v + a) % p) as usize).collect())
            .collect();
        Self::from_permutations(&perms)
    }

    pub fn ngens(&self) -> usize {
        self.ngens
    }

    pub fn index(&self) -> usize {
        self.index
    }

    #[inline]
    pub fn entry(&self, coset: usize, l: Letter) -> usize {
        self.entries[coset * 2 * self.ngens + column_of(l)] as usize
    }

    #[inline]
    pub fn entry_col(&self, coset: usize, col: usize) -> usize {
        self.entries[coset * 2 * self.ngens + col] as usize
    }

    /// Coset reached by reading `w` from `start`.
    pub fn trace(&self, w: &Word, start: usize) -> usize {
        self.trace_letters(w.letters(), start)
    }

    pub fn trace_letters(&self, letters: &[Letter], start: usize) -> usize {
        letters.iter().fold(start, |c, &l| self.entry(c, l))
    }

    /// Subgroup membership.
    pub fn contains(&self, w: &Word) -> bool {
        self.trace(w, 0) == 0
    }

    /// Action of each generator as a permutation of `0..index`.
    pub fn permutation_representation(&self) -> Vec<Vec<usize>> {
        (0..self.ngens)
            .map(|g| (0..self.index).map(|c| self.entry_col(c, 2 * g)).collect())
            .collect()
    }

    /// Every relator traces to its start from every coset, and columns are
    /// mutually inverse bijections.
    pub fn check_laws(&self, pres: &Presentation) -> bool {
        let ncols = 2 * self.ngens;
        for c in 0..self.index {
            for col in 0..ncols {
                let d = self.entry_col(c, col);
                if d >= self.index || self.entry_col(d, col ^ 1) != c {
                    return false;
                }
            }
            if pres.relators().iter().any(|r| self.trace(r, c) != c) {
                return false;
            }
        }
        true
    }

    /// Breadth-first renumbering from coset 0, scanning columns in order.
    fn standardize(&mut self) {
        let ncols = 2 * self.ngens;
        let n = self.index;
        let mut new_of = vec![NONE; n];
        let mut order = Vec::with_capacity(n);
        new_of[0] = 0;
        order.push(0usize);
        let mut head = 0;
        while head < order.len() {
            let c = order[head];
            head += 1;
            for col in 0..ncols {
                let d = self.entries[c * ncols + col] as usize;
                if new_of[d] == NONE {
                    new_of[d] = order.len() as u32;
                    order.push(d);
                }
            }
        }
        assert_eq!(order.len(), n, "coset graph must be connected");
        let mut entries = vec![NONE; n * ncols];
        for (new_c, &old_c) in order.iter().enumerate() {
            for col in 0..ncols {
                entries[new_c * ncols + col] = new_of[self.entries[old_c * ncols + col] as usize];
            }
        }
        self.entries = entries;
    }

    /// Text form: header line `coset-table <hash> <index> <ngens>`, then one
    /// row per coset with 1-based targets for columns `g1 g1^-1 g2 ...`.
    pub fn to_text(&self, pres: &Presentation) -> String {
        let mut s = format!("coset-table {} {} {}\n", pres.content_hash(), self.index, self.ngens);
        let ncols = 2 * self.ngens;
        for c in 0..self.index {
            let row: Vec<String> =
                (0..ncols).map(|col| (self.entry_col(c, col) + 1).to_string()).collect();
            let _ = writeln!(s, "{}", row.join(" "));
        }
        s
    }

    /// Reads [`to_text`](Self::to_text) output; checks the presentation hash and table laws.
    pub fn from_text(text: &str, pres: &Presentation) -> Result<Self, FormatError> {
        let bad = |m: &str| FormatError::Malformed { what: "coset table", message: m.to_string() };
        let mut lines = text.lines();
        let header: Vec<&str> = lines.next().ok_or_else(|| bad("empty"))?.split_whitespace().collect();
        if header.len() != 4 || header[0] != "coset-table" {
            return Err(bad("bad header"));
        }
        if header[1] != pres.content_hash() {
            return Err(bad("presentation hash mismatch"));
        }
        let index: usize = header[2].parse().map_err(|_| bad("bad index"))?;
        let ngens: usize = header[3].parse().map_err(|_| bad("bad generator count"))?;
        if ngens != pres.ngens() {
            return Err(bad("generator count mismatch"));
        }
        let ncols = 2 * ngens;
        let mut entries = Vec::with_capacity(index * ncols);
        for line in lines.take(index) {
            for tok in line.split_whitespace() {
                let v: usize = tok.parse().map_err(|_| bad("bad entry"))?;
                if v == 0 || v > index {
                    return Err(bad("entry out of range"));
                }
                entries.push((v - 1) as u32);
            }
        }
        if entries.len() != index * ncols {
            return Err(bad("wrong number of entries"));
        }
        let t = CosetTable { ngens, index, entries };
        if !t.check_laws(pres) {
            return Err(bad("table violates relators"));
        }
        Ok(t)
    }
}

/// Runs coset enumeration of `subgroup_gens` in the group given by `pres`.
pub fn todd_coxeter(
    pres: &Presentation,
    subgroup_gens: &[Word],
    limits: &EnumerationLimits,
) -> Result<CosetTable, EnumerationError> {
    let mut rels: Vec<Vec<Letter>> = pres
        .relators()
        .iter()
        .map(|r| r.letters().to_vec())
        .filter(|r| !r.is_empty())
        .collect();
    rels.sort_by_key(|r| r.len());
    let gens: Vec<Vec<Letter>> = subgroup_gens
        .iter()
        .map(|w| w.letters().to_vec())
        .filter(|w| !w.is_empty())
        .collect();
    let mut e = Enumerator::new(pres.ngens(), limits.max_cosets, &rels, limits.strategy);
    let ok = match limits.strategy {
        Strategy::Hlt => e.run_hlt(&rels, &gens, limits.lookahead),
        Strategy::Felsch => e.run_felsch(&gens),
    };
    if !ok {
        return Err(EnumerationError::LimitExceeded { max_cosets: limits.max_cosets });
    }
    Ok(e.into_table())
}

/// Order of the group, by enumerating the trivial subgroup.
pub fn group_order(pres: &Presentation, limits: &EnumerationLimits) -> Result<usize, EnumerationError> {
    todd_coxeter(pres, &[], limits).map(|t| t.index())
}

struct Enumerator {
    ncols: usize,
    max: usize,
    table: Vec<u32>,
    /// Union-find parent; `parent[c] == c` for live cosets.
    parent: Vec<u32>,
    /// Number of rows in use (live or dead).
    used: usize,
    live: usize,
    queue: Vec<u32>,
    rels: Vec<Vec<Letter>>,
    /// Felsch: rotations of relators and inverses, grouped by first column.
    by_first: Vec<Vec<Vec<Letter>>>,
    deductions: Vec<(u32, u32)>,
    track_deductions: bool,
    deduction_overflow: bool,
}

const DEDUCTION_CAP: usize = 1 << 16;

impl Enumerator {
    fn new(ngens: usize, max: usize, rels: &[Vec<Letter>], strategy: Strategy) -> Self {
        let ncols = 2 * ngens;
        let initial = max.min(1 << 12).max(1);
        let mut by_first: Vec<Vec<Vec<Letter>>> = vec![Vec::new(); ncols];
        if strategy == Strategy::Felsch {
            let mut seen = std::collections::HashSet::new();
            for r in rels {
                let inv: Vec<Letter> = r.iter().rev().map(|&l| -l).collect();
                for w in [r, &inv] {
                    for k in 0..w.len() {
                        let rot: Vec<Letter> = w[k..].iter().chain(w[..k].iter()).copied().collect();
                        if seen.insert(rot.clone()) {
                            by_first[column_of(rot[0])].push(rot);
                        }
                    }
                }
            }
        }
        let mut e = Enumerator {
            ncols,
            max,
            table: vec![NONE; initial * ncols],
            parent: Vec::with_capacity(initial),
            used: 1,
            live: 1,
            queue: Vec::new(),
            rels: rels.to_vec(),
            by_first,
            deductions: Vec::new(),
            track_deductions: strategy == Strategy::Felsch,
            deduction_overflow: false,
        };
        e.parent.push(0);
        e
    }

    #[inline]
    fn get(&self, c: u32, col: usize) -> u32 {
        self.table[c as usize * self.ncols + col]
    }

    #[inline]
    fn set(&mut self, c: u32, col: usize, d: u32) {
        self.table[c as usize * self.ncols + col] = d;
    }

    #[inline]
    fn alive(&self, c: u32) -> bool {
        self.parent[c as usize] == c
    }

    fn push_deduction(&mut self, c: u32, col: usize) {
        if self.track_deductions {
            if self.deductions.len() >= DEDUCTION_CAP {
                self.deduction_overflow = true;
                self.deductions.clear();
            } else {
                self.deductions.push((c, col as u32));
            }
        }
    }

    /// Allocates a fresh coset as `c·col`. Returns false if out of room.
    fn define(&mut self, c: u32, col: usize) -> bool {
        if self.used >= self.max {
            return false;
        }
        if self.used * self.ncols >= self.table.len() {
            let new_rows = (self.table.len() / self.ncols.max(1) * 2).min(self.max).max(self.used + 1);
            self.table.resize(new_rows * self.ncols, NONE);
        }
        let d = self.used as u32;
        self.used += 1;
        self.live += 1;
        self.parent.push(d);
        self.set(c, col, d);
        self.set(d, col ^ 1, c);
        self.push_deduction(c, col);
        true
    }

    fn rep(&mut self, c: u32) -> u32 {
        let mut r = c;
        while self.parent[r as usize] != r {
            r = self.parent[r as usize];
        }
        let mut x = c;
        while self.parent[x as usize] != r {
            let next = self.parent[x as usize];
            self.parent[x as usize] = r;
            x = next;
        }
        r
    }

    fn merge(&mut self, a: u32, b: u32) {
        let ra = self.rep(a);
        let rb = self.rep(b);
        if ra != rb {
            let (keep, kill) = if ra < rb { (ra, rb) } else { (rb, ra) };
            self.parent[kill as usize] = keep;
            self.live -= 1;
            self.queue.push(kill);
        }
    }

    fn coincidence(&mut self, a: u32, b: u32) {
        self.queue.clear();
        self.merge(a, b);
        let mut i = 0;
        while i < self.queue.len() {
            let g = self.queue[i];
            i += 1;
            for col in 0..self.ncols {
                let d = self.get(g, col);
                if d == NONE {
                    continue;
                }
                let inv = col ^ 1;
                if self.get(d, inv) == g {
                    self.set(d, inv, NONE);
                }
                let mu = self.rep(g);
                let nu = self.rep(d);
                let mx = self.get(mu, col);
                if mx != NONE {
                    self.merge(nu, mx);
                } else {
                    let ny = self.get(nu, inv);
                    if ny != NONE {
                        self.merge(mu, ny);
                    } else {
                        self.set(mu, col, nu);
                        self.set(nu, inv, mu);
                        self.push_deduction(mu, col);
                    }
                }
            }
        }
    }

    /// Scans `w` at coset `a`, defining cosets when `fill`. Returns false
    /// only if a definition was needed but the table is full.
    fn scan(&mut self, a: u32, w: &[Letter], fill: bool) -> bool {
        if w.is_empty() {
            return true;
        }
        let mut f = a;
        let mut b = a;
        let mut i = 0usize;
        let mut j = w.len();
        loop {
            while i < j {
                let n = self.get(f, column_of(w[i]));
                if n == NONE {
                    break;
                }
                f = n;
                i += 1;
            }
            if i == j {
                if f != a {
                    self.coincidence(f, a);
                }
                return true;
            }
            while j > i {
                let n = self.get(b, column_of(w[j - 1]) ^ 1);
                if n == NONE {
                    break;
                }
                b = n;
                j -= 1;
            }
            if j == i {
                self.coincidence(f, b);
                return true;
            }
            if j == i + 1 {
                let col = column_of(w[i]);
                self.set(f, col, b);
                self.set(b, col ^ 1, f);
                self.push_deduction(f, col);
                return true;
            }
            if !fill {
                return true;
            }
            if !self.define(f, column_of(w[i])) {
                return false;
            }
        }
    }

    /// Removes dead rows, keeping the relative order of live ones.
    fn compact(&mut self) {
        if self.live == self.used {
            return;
        }
        let mut new_of = vec![NONE; self.used];
        let mut k = 0u32;
        for c in 0..self.used {
            if self.parent[c] == c as u32 {
                new_of[c] = k;
                k += 1;
            }
        }
        let ncols = self.ncols;
        for c in 0..self.used {
            let nc = new_of[c];
            if nc == NONE {
                continue;
            }
            for col in 0..ncols {
                let d = self.table[c * ncols + col];
                self.table[nc as usize * ncols + col] = if d == NONE { NONE } else { new_of[d as usize] };
            }
        }
        let n = k as usize;
        for x in &mut self.table[n * ncols..self.used * ncols] {
            *x = NONE;
        }
        self.used = n;
        self.live = n;
        self.parent.clear();
        self.parent.extend(0..n as u32);
        for (c, _) in self.deductions.iter_mut() {
            *c = new_of[*c as usize];
        }
        self.deductions.retain(|&(c, _)| c != NONE);
    }

    fn lookahead(&mut self, rels: &[Vec<Letter>]) {
        let mut c = 0u32;
        while (c as usize) < self.used {
            for r in rels {
                if !self.alive(c) {
                    break;
                }
                self.scan(c, r, false);
            }
            c += 1;
        }
    }

    /// Frees rows by lookahead and compaction. `mark` is a coset number that
    /// is translated to its new number (or, if it died, to the first live
    /// coset after it); the second component says whether it survived.
    fn make_room(&mut self, rels: &[Vec<Letter>], lookahead: bool, mark: u32) -> Option<(u32, bool)> {
        if lookahead {
            self.lookahead(rels);
        }
        if self.live == self.used {
            return None;
        }
        let survived = self.alive(mark);
        let new_mark = (0..mark as usize).filter(|&c| self.parent[c] == c as u32).count() as u32;
        self.compact();
        Some((new_mark, survived))
    }

    fn run_hlt(&mut self, rels: &[Vec<Letter>], gens: &[Vec<Letter>], lookahead: bool) -> bool {
        for g in gens {
            while !self.scan(0, g, true) {
                if self.make_room(rels, lookahead, 0).is_none() {
                    return false;
                }
            }
        }
        let mut a = 0u32;
        'cosets: while (a as usize) < self.used {
            if !self.alive(a) {
                a += 1;
                continue;
            }
            let mut k = 0;
            while k < rels.len() {
                if !self.alive(a) {
                    a += 1;
                    continue 'cosets;
                }
                if self.scan(a, &rels[k], true) {
                    k += 1;
                    continue;
                }
                match self.make_room(rels, lookahead, a) {
                    None => return false,
                    Some((na, true)) => a = na,
                    Some((na, false)) => {
                        a = na;
                        continue 'cosets;
                    }
                }
            }
            let mut col = 0;
            while col < self.ncols && self.alive(a) {
                if self.get(a, col) == NONE && !self.define(a, col) {
                    match self.make_room(rels, lookahead, a) {
                        None => return false,
                        Some((na, true)) => {
                            a = na;
                            continue;
                        }
                        Some((na, false)) => {
                            a = na;
                            continue 'cosets;
                        }
                    }
                }
                col += 1;
            }
            a += 1;
        }
        self.finished()
    }

    fn process_deductions(&mut self) {
        while let Some((c, col)) = self.deductions.pop() {
            if !self.alive(c) {
                continue;
            }
            let col = col as usize;
            let d = self.get(c, col);
            for k in 0..self.by_first[col].len() {
                if !self.alive(c) {
                    break;
                }
                let w = std::mem::take(&mut self.by_first[col][k]);
                self.scan(c, &w, false);
                self.by_first[col][k] = w;
            }
            if d != NONE && self.alive(d) {
                let inv = col ^ 1;
                for k in 0..self.by_first[inv].len() {
                    if !self.alive(d) {
                        break;
                    }
                    let w = std::mem::take(&mut self.by_first[inv][k]);
                    self.scan(d, &w, false);
                    self.by_first[inv][k] = w;
                }
            }
        }
        if self.deduction_overflow {
            self.deduction_overflow = false;
            let rels = std::mem::take(&mut self.rels);
            self.lookahead(&rels);
            self.rels = rels;
            self.process_deductions();
        }
    }

    fn run_felsch(&mut self, gens: &[Vec<Letter>]) -> bool {
        for g in gens {
            loop {
                if self.scan(0, g, true) {
                    break;
                }
                self.process_deductions();
                if self.live == self.used {
                    return false;
                }
                self.compact();
            }
            self.process_deductions();
        }
        // relators must hold at coset 0 even before any definition is made
        let rels = self.rels.clone();
        for r in &rels {
            self.scan(0, r, false);
        }
        self.process_deductions();
        let mut a = 0u32;
        while (a as usize) < self.used {
            if self.alive(a) {
                let mut col = 0;
                while col < self.ncols {
                    if !self.alive(a) {
                        break;
                    }
                    if self.get(a, col) == NONE {
                        if !self.define(a, col) {
                            if self.live == self.used {
                                return false;
                            }
                            let mut new_a = 0u32;
                            for c in 0..a as usize {
                                if self.parent[c] == c as u32 {
                                    new_a += 1;
                                }
                            }
                            self.compact();
                            a = new_a;
                            col = 0;
                            continue;
                        }
                        self.process_deductions();
                    }
                    col += 1;
                }
            }
            a += 1;
        }
        self.finished()
    }

    fn finished(&mut self) -> bool {
        self.compact();
        let ncols = self.ncols;
        self.table[..self.used * ncols].iter().all(|&e| e != NONE)
    }

    fn into_table(mut self) -> CosetTable {
        let ngens = self.ncols / 2;
        self.table.truncate(self.used * self.ncols);
        let mut t = CosetTable { ngens, index: self.used, entries: self.table };
        if ngens > 0 {
            t.standardize();
        }
        t
    }
}

/// Column letters in standard order, for callers iterating over a table.
pub fn column_letters(ngens: usize) -> impl Iterator<Item = Letter> {
    (0..2 * ngens).map(letter_of_column)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::parse::parse_presentation;

    fn lim() -> EnumerationLimits {
        EnumerationLimits::with_max(100_000)
    }

    #[test]
    fn cyclic_group_of_order_five() {
        let p = parse_presentation("<x | x^5>").unwrap();
        let t = todd_coxeter(&p, &[], &lim()).unwrap();
        assert_eq!(t.index(), 5);
        assert!(t.check_laws(&p));
    }

    #[test]
    fn symmetric_group_s3() {
        let p = parse_presentation("<x,y | x^2, y^3, (x*y)^2>").unwrap();
        for limits in [lim(), EnumerationLimits::felsch(1000)] {
            let t = todd_coxeter(&p, &[], &limits).unwrap();
            assert_eq!(t.index(), 6);
            assert!(t.check_laws(&p));
        }
    }

    #[test]
    fn subgroup_index_and_membership() {
        let p = parse_presentation("<x,y | x^2, y^3, (x*y)^2>").unwrap();
        let x = p.gen("x");
        let t = todd_coxeter(&p, &[x.clone()], &lim()).unwrap();
        assert_eq!(t.index(), 3);
        assert!(t.contains(&x));
        assert!(!t.contains(&p.gen("y")));
        assert!(t.contains(&Word::identity()));
        assert_eq!(t.trace(&Word::identity(), 2), 2);
    }

    #[test]
    fn order_three_permutation() {
        let p = parse_presentation("<x | x^3>").unwrap();
        let t = todd_coxeter(&p, &[], &lim()).unwrap();
        assert_eq!(t.permutation_representation(), vec![vec![1, 2, 0]]);
    }

    #[test]
    fn infinite_index_hits_limit() {
        let p = parse_presentation("<x | >").unwrap();
        let err = todd_coxeter(&p, &[], &EnumerationLimits::with_max(50)).unwrap_err();
        assert_eq!(err, EnumerationError::LimitExceeded { max_cosets: 50 });
        let err = todd_coxeter(&p, &[], &EnumerationLimits::felsch(50)).unwrap_err();
        assert_eq!(err, EnumerationError::LimitExceeded { max_cosets: 50 });
    }

    #[test]
    fn trivial_group_and_whole_group() {
        let p = parse_presentation("<x,y | x, y>").unwrap();
        assert_eq!(group_order(&p, &lim()).unwrap(), 1);
        let q = parse_presentation("<x,y | x^2, y^2, (x*y)^3>").unwrap();
        let t = todd_coxeter(&q, &[q.gen("x"), q.gen("y")], &lim()).unwrap();
        assert_eq!(t.index(), 1);
    }

    #[test]
    fn strategies_give_identical_standard_tables() {
        let p = parse_presentation("<a,b | a^4, b^2, (a*b)^3>").unwrap(); // S4
        let h = todd_coxeter(&p, &[], &lim()).unwrap();
        let f = todd_coxeter(&p, &[], &EnumerationLimits::felsch(1000)).unwrap();
        assert_eq!(h.index(), 24);
        assert_eq!(h, f);
    }

    #[test]
    fn small_limit_forces_lookahead() {
        // index 60, but HLT would overshoot without lookahead/compaction
        let p = parse_presentation("<a,b | a^2, b^3, (a*b)^5>").unwrap();
        let t = todd_coxeter(&p, &[], &EnumerationLimits::with_max(70)).unwrap();
        assert_eq!(t.index(), 60);
    }

    #[test]
    fn text_round_trip() {
        let p = parse_presentation("<a,b | a^2, b^3, (a*b)^3>").unwrap();
        let t = todd_coxeter(&p, &[], &lim()).unwrap();
        let s = t.to_text(&p);
        assert_eq!(CosetTable::from_text(&s, &p).unwrap(), t);
        let other = parse_presentation("<a,b | a^2, b^3, (a*b)^4>").unwrap();
        assert!(CosetTable::from_text(&s, &other).is_err());
    }

    #[test]
    fn table_from_cyclic_images() {
        let t = CosetTable::from_cyclic_images(&[1, 2], 3);
        assert_eq!(t.index(), 3);
        let p = parse_presentation("<x,y | x^3, y^3, (x*y)^3>").unwrap();
        assert!(t.check_laws(&p));
        assert!(t.contains(&Word::reduce([1, 1, 1])));
        assert!(t.contains(&Word::reduce([1, 2])));
        assert!(!t.contains(&Word::reduce([1, 1, 2])));
    }
}
