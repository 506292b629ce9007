//! Reidemeister-Schreier rewriting and Tietze simplification.

use std::collections::HashMap;
use std::time::{Duration, Instant};

use serde::{Deserialize, Serialize};

use crate::coset::CosetTable;
use crate::error::FormatError;
use crate::integer::Integer;
use crate::matrix::IntMatrix;
use crate::parse::parse_word;
use crate::presentation::Presentation;
use crate::words::{cyclic_canonical, generator_of, letter, push_reduced, Letter, Word};

/// Prefix-closed coset representatives from a breadth-first search.
#[derive(Clone, Debug)]
pub struct SchreierTransversal {
    reps: Vec<Word>,
    /// `(parent coset, letter)` with `rep(c) = rep(parent) * letter`.
    parent: Vec<Option<(usize, Letter)>>,
}

impl SchreierTransversal {
    pub fn rep(&self, coset: usize) -> &Word {
        &self.reps[coset]
    }

    pub fn reps(&self) -> &[Word] {
        &self.reps
    }

    pub fn parent(&self, coset: usize) -> Option<(usize, Letter)> {
        self.parent[coset]
    }

    /// True when the edge `coset --g--> coset.g` belongs to the spanning tree.
    pub fn is_tree_edge(&self, table: &CosetTable, coset: usize, g: usize) -> bool {
        let target = table.entry(coset, letter(g, true));
        self.parent[target] == Some((coset, letter(g, true)))
            || self.parent[coset] == Some((target, letter(g, false)))
    }

    pub fn max_length(&self) -> usize {
        self.reps.iter().map(Word::len).max().unwrap_or(0)
    }
}

/// Breadth-first over columns in declared order, positive letters first.
pub fn schreier_transversal(table: &CosetTable) -> SchreierTransversal {
    let n = table.index();
    let mut reps: Vec<Option<Word>> = vec![None; n];
    let mut parent = vec![None; n];
    reps[0] = Some(Word::identity());
    let mut queue = std::collections::VecDeque::from([0usize]);
    while let Some(c) = queue.pop_front() {
        for col in 0..2 * table.ngens() {
            let d = table.entry_col(c, col);
            if reps[d].is_none() {
                let l = crate::words::letter_of_column(col);
                reps[d] = Some(reps[c].as_ref().unwrap().mul(&Word::reduce([l])));
                parent[d] = Some((c, l));
                queue.push_back(d);
            }
        }
    }
    SchreierTransversal { reps: reps.into_iter().map(|r| r.expect("table is connected")).collect(), parent }
}

/// A finite-index subgroup presented over its own alphabet, with the data to
/// translate between that alphabet and the ambient group.
#[derive(Clone, Debug)]
pub struct SubgroupPresentation {
    pub ambient: Presentation,
    pub table: CosetTable,
    pub transversal: SchreierTransversal,
    /// Current generators as ambient words.
    pub generator_words: Vec<Word>,
    pub presentation: Presentation,
    /// `(coset, ambient generator)` for each original Schreier generator.
    pub schreier_labels: Vec<(usize, usize)>,
    /// Lookup `coset * ngens + g` to Schreier generator number, `None` on tree edges.
    schreier_index: Vec<Option<usize>>,
    /// Each original Schreier generator written in the current generators.
    schreier_in_current: Vec<Word>,
    /// Rewritten relators before any cleanup, one per (coset, relator) pair.
    pub rewritten_relator_count: usize,
}

impl SubgroupPresentation {
    pub fn index(&self) -> usize {
        self.table.index()
    }

    /// Rewrites an ambient word from coset `start`, returning the Schreier
    /// word and the end coset.
    fn rewrite_schreier(&self, w: &[Letter], start: usize) -> (Vec<Letter>, usize) {
        rewrite_with(&self.table, &self.schreier_index, self.ambient.ngens(), w, start)
    }

    /// Expresses an ambient word in the current generators, or `None` when it
    /// does not lie in the subgroup.
    pub fn rewrite(&self, w: &Word) -> Option<Word> {
        let (sw, end) = self.rewrite_schreier(w.letters(), 0);
        if end != 0 {
            return None;
        }
        let mut out = Vec::new();
        for l in sw {
            let e = &self.schreier_in_current[generator_of(l)];
            if l > 0 {
                e.letters().iter().for_each(|&x| push_reduced(&mut out, x));
            } else {
                e.letters().iter().rev().for_each(|&x| push_reduced(&mut out, -x));
            }
        }
        Some(Word::reduce(out))
    }

    /// Substitutes current generators by their ambient words.
    pub fn to_ambient(&self, w: &Word) -> Word {
        substitute(w, &self.generator_words)
    }

    /// Sidecar mapping: one `name: ambient-word` line per generator.
    pub fn sidecar_string(&self) -> String {
        let mut s = format!("# generator words over <{}>\n", self.ambient.names().join(","));
        for (name, w) in self.presentation.names().iter().zip(&self.generator_words) {
            s.push_str(&format!("{name}: {}\n", self.ambient.format_word(w)));
        }
        s
    }
}

/// Reads a sidecar mapping back into ambient words, in file order.
pub fn parse_sidecar(text: &str, ambient: &Presentation) -> Result<Vec<(String, Word)>, FormatError> {
    let mut out = Vec::new();
    for (no, line) in text.lines().enumerate() {
        let line = line.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (name, expr) = line.split_once(':').ok_or_else(|| FormatError::Malformed {
            what: "sidecar",
            message: format!("line {}: expected `name: word`", no + 1),
        })?;
        out.push((name.trim().to_string(), parse_word(expr.trim(), ambient.names())?));
    }
    Ok(out)
}

/// Replaces letter `g` by `images[g]` and reduces.
pub fn substitute(w: &Word, images: &[Word]) -> Word {
    let mut out = Vec::new();
    for &l in w.letters() {
        let e = &images[generator_of(l)];
        if l > 0 {
            e.letters().iter().for_each(|&x| push_reduced(&mut out, x));
        } else {
            e.letters().iter().rev().for_each(|&x| push_reduced(&mut out, -x));
        }
    }
    Word::reduce(out)
}

fn schreier_numbering(table: &CosetTable, tr: &SchreierTransversal) -> (Vec<Option<usize>>, Vec<(usize, usize)>) {
    let ngens = table.ngens();
    let mut index = vec![None; table.index() * ngens];
    let mut labels = Vec::new();
    for c in 0..table.index() {
        for g in 0..ngens {
            if !tr.is_tree_edge(table, c, g) {
                index[c * ngens + g] = Some(labels.len());
                labels.push((c, g));
            }
        }
    }
    (index, labels)
}

fn rewrite_with(
    table: &CosetTable,
    schreier_index: &[Option<usize>],
    ngens: usize,
    w: &[Letter],
    start: usize,
) -> (Vec<Letter>, usize) {
    let mut c = start;
    let mut out = Vec::new();
    for &l in w {
        let g = generator_of(l);
        if l > 0 {
            if let Some(s) = schreier_index[c * ngens + g] {
                push_reduced(&mut out, letter(s, true));
            }
            c = table.entry(c, l);
        } else {
            let d = table.entry(c, l);
            if let Some(s) = schreier_index[d * ngens + g] {
                push_reduced(&mut out, letter(s, false));
            }
            c = d;
        }
    }
    (out, c)
}

/// Schreier generators `rep(c) g rep(cg)^-1` off the spanning tree, and the
/// rewrites of `rep(c) r rep(c)^-1` for every relator `r` and coset `c`.
pub fn reidemeister_schreier(pres: &Presentation, table: &CosetTable) -> SubgroupPresentation {
    let tr = schreier_transversal(table);
    let (schreier_index, labels) = schreier_numbering(table, &tr);
    let generator_words: Vec<Word> = labels
        .iter()
        .map(|&(c, g)| {
            let d = table.entry(c, letter(g, true));
            tr.rep(c).mul(&Word::generator(g)).mul(&tr.rep(d).inverse())
        })
        .collect();
    let mut relators = Vec::with_capacity(table.index() * pres.relators().len());
    for c in 0..table.index() {
        for r in pres.relators() {
            let (w, end) = rewrite_with(table, &schreier_index, pres.ngens(), r.letters(), c);
            debug_assert_eq!(end, c);
            relators.push(Word::reduce(w));
        }
    }
    let count = relators.len();
    let presentation = Presentation::with_rank("s", labels.len(), relators);
    SubgroupPresentation {
        ambient: pres.clone(),
        table: table.clone(),
        transversal: tr,
        schreier_in_current: (0..labels.len()).map(Word::generator).collect(),
        generator_words,
        presentation,
        schreier_labels: labels,
        schreier_index,
        rewritten_relator_count: count,
    }
}

/// Exponent-sum matrix of the Reidemeister-Schreier presentation, built by
/// tracing relators directly without materializing the rewritten words.
pub fn rs_exponent_matrix(pres: &Presentation, table: &CosetTable) -> IntMatrix {
    let tr = schreier_transversal(table);
    let (schreier_index, labels) = schreier_numbering(table, &tr);
    let ngens = pres.ngens();
    let mut rows = Vec::with_capacity(table.index() * pres.relators().len());
    for c in 0..table.index() {
        for r in pres.relators() {
            let mut counts: HashMap<usize, i64> = HashMap::new();
            let mut at = c;
            for &l in r.letters() {
                let g = generator_of(l);
                if l > 0 {
                    if let Some(s) = schreier_index[at * ngens + g] {
                        *counts.entry(s).or_default() += 1;
                    }
                    at = table.entry(at, l);
                } else {
                    at = table.entry(at, l);
                    if let Some(s) = schreier_index[at * ngens + g] {
                        *counts.entry(s).or_default() -= 1;
                    }
                }
            }
            let mut row: Vec<(usize, Integer)> =
                counts.into_iter().filter(|e| e.1 != 0).map(|(j, v)| (j, Integer::from(v))).collect();
            row.sort_by_key(|e| e.0);
            rows.push(row);
        }
    }
    IntMatrix::from_sparse_rows(labels.len(), rows)
}

/// Limits for [`tietze_simplify`].
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct TietzeBudget {
    pub max_passes: usize,
    /// Eliminations that would create a longer relator are skipped.
    pub max_relator_length: usize,
    /// Length-increasing eliminations stop once the total would exceed this.
    pub max_total_length: usize,
    pub time_limit: Duration,
}

impl Default for TietzeBudget {
    fn default() -> Self {
        TietzeBudget {
            max_passes: 200,
            max_relator_length: 4000,
            max_total_length: 200_000,
            time_limit: Duration::from_secs(120),
        }
    }
}

#[derive(Clone, Debug, Default, Serialize, Deserialize)]
pub struct TietzeStats {
    pub passes: usize,
    pub eliminated: usize,
    pub substring_replacements: usize,
    /// Set when a pass or time limit cut the run short.
    pub exhausted: bool,
}

/// Applies Tietze moves until nothing changes or the budget runs out.
/// Always returns a presentation of the same group; `stats.exhausted`
/// flags a best-so-far result.
pub fn tietze_simplify(sp: &SubgroupPresentation, budget: &TietzeBudget) -> (SubgroupPresentation, TietzeStats) {
    let (pres, images, kept, stats) = simplify_presentation(&sp.presentation, budget);
    (sp.with_simplification(pres, &images, &kept), stats)
}

impl SubgroupPresentation {
    /// Swaps in a simplified presentation of the same subgroup, given the
    /// image of every current generator and the retained generator indices
    /// as returned by [`simplify_presentation`].
    pub fn with_simplification(&self, pres: Presentation, images: &[Word], kept: &[usize]) -> SubgroupPresentation {
        let mut out = self.clone();
        out.schreier_in_current = self.schreier_in_current.iter().map(|w| substitute(w, images)).collect();
        out.generator_words = kept.iter().map(|&g| self.generator_words[g].clone()).collect();
        out.presentation = pres;
        out
    }
}

/// Tietze simplification of a bare presentation. Returns the new
/// presentation, the image of every old generator as a word in the new
/// ones, and the old indices of the retained generators.
pub fn simplify_presentation(
    pres: &Presentation,
    budget: &TietzeBudget,
) -> (Presentation, Vec<Word>, Vec<usize>, TietzeStats) {
    let mut tz = Tz::new(pres);
    let stats = tz.run(budget);
    let kept: Vec<usize> = (0..tz.ngens).filter(|&g| tz.alive[g]).collect();
    let mut new_index = vec![usize::MAX; tz.ngens];
    for (i, &g) in kept.iter().enumerate() {
        new_index[g] = i;
    }
    let mut memo: Vec<Option<Word>> = vec![None; tz.ngens];
    let images: Vec<Word> = (0..tz.ngens).map(|g| tz.resolve(g, &new_index, &mut memo)).collect();
    let mut rels: Vec<Word> = tz
        .rels
        .iter()
        .map(|r| Word::reduce(r.iter().map(|&l| letter(new_index[generator_of(l)], l > 0))))
        .collect();
    rels.sort_by(|a, b| a.len().cmp(&b.len()).then_with(|| a.cmp(b)));
    let names: Vec<String> = kept.iter().map(|&g| pres.names()[g].clone()).collect();
    let out = Presentation::new(names, rels).expect("names stay unique");
    (out, images, kept, stats)
}

struct Tz {
    ngens: usize,
    alive: Vec<bool>,
    rels: Vec<Vec<Letter>>,
    elim: Vec<Option<Vec<Letter>>>,
}

fn cyclically_reduce_vec(mut r: Vec<Letter>) -> Vec<Letter> {
    let mut out: Vec<Letter> = Vec::with_capacity(r.len());
    for l in r.drain(..) {
        push_reduced(&mut out, l);
    }
    let mut i = 0;
    let mut j = out.len();
    while j - i >= 2 && out[i] == -out[j - 1] {
        i += 1;
        j -= 1;
    }
    out[i..j].to_vec()
}

impl Tz {
    fn new(pres: &Presentation) -> Self {
        Tz {
            ngens: pres.ngens(),
            alive: vec![true; pres.ngens()],
            rels: pres.relators().iter().map(|r| r.letters().to_vec()).collect(),
            elim: vec![None; pres.ngens()],
        }
    }

    fn total_length(&self) -> usize {
        self.rels.iter().map(Vec::len).sum()
    }

    fn resolve(&self, g: usize, new_index: &[usize], memo: &mut Vec<Option<Word>>) -> Word {
        if let Some(w) = &memo[g] {
            return w.clone();
        }
        let w = if self.alive[g] {
            Word::generator(new_index[g])
        } else {
            let body = self.elim[g].clone().expect("eliminated generators have a definition");
            let mut out = Vec::new();
            for l in body {
                let e = self.resolve(generator_of(l), new_index, memo);
                if l > 0 {
                    e.letters().iter().for_each(|&x| push_reduced(&mut out, x));
                } else {
                    e.letters().iter().rev().for_each(|&x| push_reduced(&mut out, -x));
                }
            }
            Word::reduce(out)
        };
        memo[g] = Some(w.clone());
        w
    }

    /// Cyclic reduction, removal of empty and duplicate relators.
    fn normalize(&mut self) {
        let mut seen = std::collections::HashSet::new();
        let rels = std::mem::take(&mut self.rels);
        for r in rels {
            let r = cyclically_reduce_vec(r);
            if r.is_empty() {
                continue;
            }
            if seen.insert(cyclic_canonical(&r)) {
                self.rels.push(r);
            }
        }
    }

    fn run(&mut self, budget: &TietzeBudget) -> TietzeStats {
        let start = Instant::now();
        let mut stats = TietzeStats::default();
        self.normalize();
        loop {
            if stats.passes >= budget.max_passes || start.elapsed() > budget.time_limit {
                stats.exhausted = true;
                break;
            }
            stats.passes += 1;
            let mut changed = false;
            while self.eliminate_one(budget, false) {
                stats.eliminated += 1;
                changed = true;
                if start.elapsed() > budget.time_limit {
                    break;
                }
            }
            self.normalize();
            let n = self.substring_pass();
            if n > 0 {
                stats.substring_replacements += n;
                self.normalize();
                continue;
            }
            if changed {
                continue;
            }
            if self.eliminate_one(budget, true) {
                stats.eliminated += 1;
                self.normalize();
                continue;
            }
            break;
        }
        stats
    }

    /// Eliminates the generator whose removal changes the total length the
    /// least (ties by lowest generator, then lowest relator). Without
    /// `allow_growth` only non-increasing moves are taken.
    fn eliminate_one(&mut self, budget: &TietzeBudget, allow_growth: bool) -> bool {
        let mut occ = vec![0usize; self.ngens];
        for r in &self.rels {
            for &l in r {
                occ[generator_of(l)] += 1;
            }
        }
        let mut local = vec![0usize; self.ngens];
        let mut candidates: Vec<(i64, usize, usize)> = Vec::new();
        for (ri, r) in self.rels.iter().enumerate() {
            for &l in r {
                local[generator_of(l)] += 1;
            }
            let len = r.len() as i64;
            for &l in r {
                let g = generator_of(l);
                if local[g] == 1 {
                    let delta = (occ[g] as i64 - 1) * (len - 2) - len;
                    if delta <= 0 || allow_growth {
                        candidates.push((delta, g, ri));
                    }
                }
            }
            for &l in r {
                local[generator_of(l)] = 0;
            }
        }
        candidates.sort_unstable();
        let total = self.total_length() as i64;
        for (delta, g, ri) in candidates {
            if delta > 0 && total + delta > budget.max_total_length as i64 {
                return false;
            }
            let rlen = self.rels[ri].len();
            let fits = self.rels.iter().enumerate().all(|(si, s)| {
                if si == ri {
                    return true;
                }
                let k = s.iter().filter(|&&l| generator_of(l) == g).count();
                s.len() + k * rlen.saturating_sub(2) <= budget.max_relator_length
            });
            if fits {
                self.eliminate(g, ri);
                return true;
            }
        }
        false
    }

    fn eliminate(&mut self, g: usize, ri: usize) {
        let r = self.rels.remove(ri);
        let pos = r.iter().position(|&l| generator_of(l) == g).unwrap();
        // r rotated to x^e * rest, so x^e = rest^-1
        let rest: Vec<Letter> = r[pos + 1..].iter().chain(&r[..pos]).copied().collect();
        let value: Vec<Letter> = if r[pos] > 0 { rest.iter().rev().map(|&l| -l).collect() } else { rest };
        let inv: Vec<Letter> = value.iter().rev().map(|&l| -l).collect();
        for s in &mut self.rels {
            if !s.iter().any(|&l| generator_of(l) == g) {
                continue;
            }
            let mut out = Vec::with_capacity(s.len() + value.len());
            for &l in s.iter() {
                if generator_of(l) == g {
                    let part = if l > 0 { &value } else { &inv };
                    part.iter().for_each(|&x| push_reduced(&mut out, x));
                } else {
                    push_reduced(&mut out, l);
                }
            }
            *s = cyclically_reduce_vec(out);
        }
        self.rels.retain(|s| !s.is_empty());
        self.alive[g] = false;
        self.elim[g] = Some(value);
    }

    /// For relators `r`, `s` where a cyclic subword `P` of `r` (or of `r^-1`)
    /// longer than half of `r` occurs cyclically in `s`, replaces `P` in `s`
    /// by the inverse of its complement in `r`. Returns the replacement count.
    fn substring_pass(&mut self) -> usize {
        const B: u64 = 0x100000001b3;
        let key = |l: Letter| (l as i64 as u64).wrapping_add(0x9e3779b97f4a7c15);
        // hash of every cyclic window of length k of a word
        let windows = |w: &[Letter], k: usize| -> Vec<u64> {
            let n = w.len();
            let mut pow = 1u64;
            for _ in 0..k {
                pow = pow.wrapping_mul(B);
            }
            let mut h = 0u64;
            for i in 0..k {
                h = h.wrapping_mul(B).wrapping_add(key(w[i % n]));
            }
            let mut out = Vec::with_capacity(n);
            for i in 0..n {
                out.push(h);
                h = h.wrapping_mul(B).wrapping_add(key(w[(i + k) % n])).wrapping_sub(pow.wrapping_mul(key(w[i])));
            }
            out
        };
        let mut table: HashMap<(usize, u64), Vec<(usize, bool, usize)>> = HashMap::new();
        let mut ks: Vec<usize> = Vec::new();
        for (ri, r) in self.rels.iter().enumerate() {
            let l = r.len();
            if l < 2 {
                continue;
            }
            let k = l / 2 + 1;
            ks.push(k);
            let inv: Vec<Letter> = r.iter().rev().map(|&x| -x).collect();
            for (o, w) in [(false, r), (true, &inv)] {
                for (start, h) in windows(w, k).into_iter().enumerate() {
                    table.entry((k, h)).or_default().push((ri, o, start));
                }
            }
        }
        ks.sort_unstable();
        ks.dedup();
        let mut replaced = 0;
        for si in 0..self.rels.len() {
            'ks: for &k in &ks {
                let s = &self.rels[si];
                if s.len() < k {
                    break;
                }
                for (start, h) in windows(s, k).into_iter().enumerate() {
                    let Some(hits) = table.get(&(k, h)) else { continue };
                    for &(ri, o, rstart) in hits {
                        if ri == si {
                            continue;
                        }
                        let r = &self.rels[ri];
                        if r.len() / 2 + 1 != k || r.len() > s.len() {
                            continue;
                        }
                        let rw: Vec<Letter> = if o { r.iter().rev().map(|&x| -x).collect() } else { r.clone() };
                        let n = rw.len();
                        let m_ = s.len();
                        if (0..k).any(|i| rw[(rstart + i) % n] != s[(start + i) % m_]) {
                            continue;
                        }
                        let mut m = k;
                        while m < n && m < m_ && rw[(rstart + m) % n] == s[(start + m) % m_] {
                            m += 1;
                        }
                        // r = P C with |P| = m, so P = C^-1
                        let c_inv: Vec<Letter> = (m..n).rev().map(|i| -rw[(rstart + i) % n]).collect();
                        let rest = (m..m_).map(|i| s[(start + i) % m_]);
                        let new: Vec<Letter> = c_inv.into_iter().chain(rest).collect();
                        self.rels[si] = cyclically_reduce_vec(new);
                        replaced += 1;
                        break 'ks;
                    }
                }
            }
        }
        self.rels.retain(|r| !r.is_empty());
        replaced
    }
}
