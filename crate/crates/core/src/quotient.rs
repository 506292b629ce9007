//! Index-p normal subgroups, the descending chain `G_1 >= G_2 >= ...`,
//! normal-closure quotients and the certificates built from them.
//!
//! Subgroups live in a [`Tower`]: an arena of [`SubgroupRecord`]s, each
//! presented over its own (simplified) alphabet and linked to the record it
//! was enumerated in. The root presentation is the ambient group of the
//! first level.

use std::collections::{BTreeSet, HashSet, VecDeque};
use std::time::{Duration, Instant};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::abelian::{abelian_invariants, exponent_matrix, invariants_of_matrix, AbelianInvariants};
use crate::cache::{cached, ArtifactCache};
use crate::coset::{todd_coxeter, CosetTable, EnumerationLimits};
use crate::eisenstein::{evaluate, AffineIsometry, EisensteinInt};
use crate::error::{EnumerationError, LinalgError};
use crate::matrix::nullspace_mod_p;
use crate::presentation::Presentation;
use crate::rewrite::{
    reidemeister_schreier, rs_exponent_matrix, simplify_presentation, SubgroupPresentation, TietzeBudget,
    TietzeStats,
};
use crate::words::{commutator, conjugate, letter, Word};

/// Position of a record inside its [`Tower`].
pub type RecordId = usize;

/// An epimorphism onto `Z/p` given by the image of each generator.
/// Image vectors are normalized so the first non-zero entry is 1, which
/// makes proportional vectors (same kernel) compare equal.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct EpiToCyclic {
    pub p: u64,
    pub images: Vec<u64>,
}

impl EpiToCyclic {
    /// `None` when every image is zero.
    pub fn new(p: u64, images: &[u64]) -> Option<Self> {
        let lead = *images.iter().find(|&&v| v % p != 0)? % p;
        let scale = inverse_mod(lead, p);
        Some(EpiToCyclic { p, images: images.iter().map(|&v| (v % p) * scale % p).collect() })
    }

    /// Image of a word.
    pub fn value(&self, w: &Word) -> u64 {
        let p = self.p as i64;
        let sums = w.exponent_sums(self.images.len());
        let v: i64 = sums.iter().zip(&self.images).map(|(s, &i)| s.rem_euclid(p) * i as i64 % p).sum();
        (v % p) as u64
    }

    pub fn contains(&self, w: &Word) -> bool {
        self.value(w) == 0
    }

    /// Every relator maps to zero.
    pub fn is_defined_on(&self, pres: &Presentation) -> bool {
        self.images.len() == pres.ngens() && pres.relators().iter().all(|r| self.contains(r))
    }
}

fn inverse_mod(a: u64, p: u64) -> u64 {
    (1..p).find(|&x| a * x % p == 1).expect("p is prime and a is non-zero")
}

/// All epimorphisms onto `Z/p` up to scalars, in lexicographic order of
/// their normalized image vectors.
pub fn cyclic_epimorphisms(pres: &Presentation, p: u64) -> Result<Vec<EpiToCyclic>, LinalgError> {
    let basis = nullspace_mod_p(&exponent_matrix(pres), p)?;
    let n = pres.ngens();
    let mut out = BTreeSet::new();
    let total = (p as usize).pow(basis.len() as u32);
    for code in 1..total {
        let mut v = vec![0u64; n];
        let mut c = code;
        for b in &basis {
            let coef = (c % p as usize) as u64;
            c /= p as usize;
            for (x, &y) in v.iter_mut().zip(b) {
                *x = (*x + coef * y) % p;
            }
        }
        if let Some(e) = EpiToCyclic::new(p, &v) {
            out.insert(e);
        }
    }
    Ok(out.into_iter().collect())
}

/// `(p^r - 1) / (p - 1)` where `r` is the dimension of `Hom(G, Z/p)`.
pub fn expected_normal_count(pres: &Presentation, p: u64) -> Result<usize, LinalgError> {
    let r = nullspace_mod_p(&exponent_matrix(pres), p)?.len() as u32;
    Ok(((p.pow(r) - 1) / (p - 1)) as usize)
}

/// A finite-index subgroup of its parent record (or of the root).
#[derive(Clone, Debug)]
pub struct SubgroupRecord {
    pub label: String,
    /// `None` means the root presentation.
    pub parent: Option<RecordId>,
    /// Coset table in the parent, generators as parent words, simplified
    /// presentation and the rewriting data.
    pub sub: SubgroupPresentation,
    /// Invariants of the current presentation.
    pub invariants: AbelianInvariants,
    /// Invariants of the raw Reidemeister-Schreier presentation, before any
    /// Tietze move. Must equal `invariants`.
    pub raw_invariants: AbelianInvariants,
    /// Present once the presentation has been simplified.
    pub tietze: Option<TietzeStats>,
    /// Set for kernels of a map onto `Z/p`.
    pub epi: Option<EpiToCyclic>,
    pub index_in_root: u64,
}

impl SubgroupRecord {
    pub fn presentation(&self) -> &Presentation {
        &self.sub.presentation
    }

    pub fn index_in_parent(&self) -> usize {
        self.sub.index()
    }

    /// Membership of a parent word.
    pub fn contains_parent_word(&self, w: &Word) -> bool {
        match &self.epi {
            Some(e) => e.contains(w),
            None => self.sub.table.contains(w),
        }
    }

    pub fn tietze_invariant(&self) -> bool {
        self.invariants == self.raw_invariants
    }
}

/// Arena of subgroup records over one root presentation.
#[derive(Clone, Debug)]
pub struct Tower {
    root: Presentation,
    records: Vec<SubgroupRecord>,
    cache: Option<ArtifactCache>,
}

impl Tower {
    pub fn new(root: Presentation) -> Self {
        Tower { root, records: Vec::new(), cache: None }
    }

    /// Reuses Tietze simplifications and quotient checks stored on disk.
    pub fn with_cache(mut self, cache: Option<ArtifactCache>) -> Self {
        self.cache = cache;
        self
    }

    pub fn cache(&self) -> Option<&ArtifactCache> {
        self.cache.as_ref()
    }

    pub fn root(&self) -> &Presentation {
        &self.root
    }

    pub fn get(&self, id: RecordId) -> &SubgroupRecord {
        &self.records[id]
    }

    pub fn records(&self) -> &[SubgroupRecord] {
        &self.records
    }

    pub fn relabel(&mut self, id: RecordId, label: impl Into<String>) {
        self.records[id].label = label.into();
    }

    /// Presentation of a record, or of the root for `None`.
    pub fn presentation_of(&self, at: Option<RecordId>) -> &Presentation {
        at.map_or(&self.root, |id| self.records[id].presentation())
    }

    pub fn label_of(&self, at: Option<RecordId>) -> &str {
        at.map_or("root", |id| &self.records[id].label)
    }

    fn index_of(&self, at: Option<RecordId>) -> u64 {
        at.map_or(1, |id| self.records[id].index_in_root)
    }

    /// Enumerates the subgroup generated by `gens` (words over the parent
    /// alphabet) and stores its simplified presentation.
    pub fn add_subgroup(
        &mut self,
        parent: Option<RecordId>,
        label: impl Into<String>,
        gens: &[Word],
        limits: &EnumerationLimits,
        budget: &TietzeBudget,
    ) -> Result<RecordId, EnumerationError> {
        let pres = self.presentation_of(parent);
        let table = todd_coxeter(pres, gens, limits)?;
        let rec = build_record(pres, table, label.into(), parent, None, self.index_of(parent));
        let id = self.push(rec);
        self.simplify(id, budget);
        Ok(id)
    }

    /// Replaces the raw Reidemeister-Schreier presentation of `id` by a
    /// Tietze-simplified one. Records start raw because most of them are
    /// only needed for their invariants and membership tests.
    pub fn simplify(&mut self, id: RecordId, budget: &TietzeBudget) {
        if self.records[id].tietze.is_some() {
            return;
        }
        let raw = &self.records[id].sub.presentation;
        let (pres, images, kept, stats) = cached(
            self.cache.as_ref(),
            "tietze",
            &[&raw.content_hash(), &format!("{budget:?}")],
            || simplify_presentation(raw, budget),
        );
        let rec = &mut self.records[id];
        rec.sub = rec.sub.with_simplification(pres, &images, &kept);
        rec.invariants = abelian_invariants(&rec.sub.presentation);
        rec.tietze = Some(stats);
    }

    fn push(&mut self, rec: SubgroupRecord) -> RecordId {
        self.records.push(rec);
        self.records.len() - 1
    }

    /// Ancestors from the top level down to `id` inclusive.
    fn path(&self, id: RecordId) -> Vec<RecordId> {
        let mut path = vec![id];
        let mut at = self.records[id].parent;
        while let Some(p) = at {
            path.push(p);
            at = self.records[p].parent;
        }
        path.reverse();
        path
    }

    /// Writes a root word in the generators of `id`, or `None` when it is
    /// not an element of that subgroup.
    pub fn express(&self, id: RecordId, root_word: &Word) -> Option<Word> {
        let mut w = root_word.clone();
        for r in self.path(id) {
            w = self.records[r].sub.rewrite(&w)?;
        }
        Some(w)
    }

    /// Rewrites a word of record `from` into record `to`, where `to` is an
    /// ancestor of `from` or `from` itself (`None` is the root).
    pub fn lift(&self, from: RecordId, to: Option<RecordId>, w: &Word) -> Word {
        let mut w = w.clone();
        let mut at = Some(from);
        while at != to {
            let id = at.expect("target must be an ancestor");
            w = self.records[id].sub.to_ambient(&w);
            at = self.records[id].parent;
        }
        w
    }

    /// A word over the generators of `id`, written over the root.
    pub fn root_word(&self, id: RecordId, w: &Word) -> Word {
        self.lift(id, None, w)
    }

    pub fn contains(&self, id: RecordId, root_word: &Word) -> bool {
        self.express(id, root_word).is_some()
    }

    /// Generators of `id` as root words.
    pub fn root_generators(&self, id: RecordId) -> Vec<Word> {
        (0..self.records[id].presentation().ngens()).map(|g| self.root_word(id, &Word::generator(g))).collect()
    }
}

fn build_record(
    parent_pres: &Presentation,
    table: CosetTable,
    label: String,
    parent: Option<RecordId>,
    epi: Option<EpiToCyclic>,
    parent_index: u64,
) -> SubgroupRecord {
    let sub = reidemeister_schreier(parent_pres, &table);
    let raw_invariants = abelian_invariants(&sub.presentation);
    let index_in_root = parent_index * table.index() as u64;
    SubgroupRecord {
        label,
        parent,
        sub,
        invariants: raw_invariants.clone(),
        raw_invariants,
        tietze: None,
        epi,
        index_in_root,
    }
}

/// Sort key for sibling kernels: larger free rank first, then larger torsion
/// order, then the image vector.
fn kernel_key(inv: &AbelianInvariants, epi: &EpiToCyclic) -> impl Ord {
    let order = inv.torsion.iter().fold(crate::Integer::one(), |a, t| &a * t);
    (std::cmp::Reverse(inv.free_rank), std::cmp::Reverse(order), inv.torsion.clone(), epi.images.clone())
}

/// Kernels of every epimorphism from the record `at` onto `Z/p`, built in
/// parallel and appended to the tower in a deterministic order. The new
/// records keep their raw presentations; see [`Tower::simplify`].
pub fn prime_index_normal_subgroups(
    tower: &mut Tower,
    at: Option<RecordId>,
    p: u64,
) -> Result<Vec<RecordId>, LinalgError> {
    let pres = tower.presentation_of(at).clone();
    let epis = cyclic_epimorphisms(&pres, p)?;
    let parent_index = tower.index_of(at);
    let base = tower.label_of(at).to_string();
    let mut recs: Vec<SubgroupRecord> = epis
        .into_par_iter()
        .map(|e| {
            let table = CosetTable::from_cyclic_images(&e.images, p);
            build_record(&pres, table, String::new(), at, Some(e), parent_index)
        })
        .collect();
    recs.sort_by_cached_key(|r| kernel_key(&r.invariants, r.epi.as_ref().unwrap()));
    Ok(recs
        .into_iter()
        .enumerate()
        .map(|(i, mut r)| {
            r.label = format!("{base}.k{}", i + 1);
            tower.push(r)
        })
        .collect())
}

/// Outcome of a check that may run out of budget.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Certificate {
    pub holds: bool,
    pub detail: String,
}

impl Certificate {
    fn yes(detail: impl Into<String>) -> Self {
        Certificate { holds: true, detail: detail.into() }
    }

    fn no(detail: impl Into<String>) -> Self {
        Certificate { holds: false, detail: detail.into() }
    }
}

/// The presentation with `extra` appended as relators.
pub fn normal_closure_quotient(pres: &Presentation, extra: &[Word]) -> Presentation {
    pres.with_relators(extra.iter().cloned()).expect("extra words use the presentation's alphabet")
}

/// Order of the presented group by enumerating the trivial subgroup.
pub fn quotient_order(pres: &Presentation, limits: &EnumerationLimits) -> Result<usize, EnumerationError> {
    crate::coset::group_order(pres, limits)
}

/// Whether the quotient by all generator commutators has order 9 with every
/// generator of order dividing 3, i.e. the abelianization is `(Z/3)^2`.
pub fn commutator_subgroup_check(pres: &Presentation, limits: &EnumerationLimits) -> Certificate {
    let n = pres.ngens();
    let mut extra = Vec::new();
    for i in 0..n {
        for j in i + 1..n {
            extra.push(commutator(&Word::generator(i), &Word::generator(j)));
        }
    }
    let q = normal_closure_quotient(pres, &extra);
    match todd_coxeter(&q, &[], limits) {
        Ok(t) if t.index() != 9 => Certificate::no(format!("abelian quotient has order {}", t.index())),
        Ok(t) => {
            let cubes = (0..n).all(|g| t.trace(&Word::generator(g).pow(3), 0) == 0);
            if cubes {
                Certificate::yes("abelian quotient has order 9, exponent 3")
            } else {
                Certificate::no("abelian quotient has order 9 but is cyclic")
            }
        }
        Err(e) => Certificate::no(format!("inconclusive: {e}")),
    }
}

/// Invariants of `id` computed afresh from the root: enumerate its root
/// generators, then take the Smith form of the Reidemeister-Schreier
/// relation matrix. Returns the invariants and the index in the root.
pub fn from_root_invariants(
    tower: &Tower,
    id: RecordId,
    limits: &EnumerationLimits,
) -> Result<(AbelianInvariants, usize), EnumerationError> {
    let gens = tower.root_generators(id);
    let table = todd_coxeter(tower.root(), &gens, limits)?;
    let m = rs_exponent_matrix(tower.root(), &table);
    Ok((invariants_of_matrix(&m), table.index()))
}

/// Picks the next chain member among a record's index-3 kernels.
#[derive(Clone, Debug, Default)]
pub struct ChainSelector {
    /// Root words the first selected kernel must contain.
    pub first: Vec<Word>,
    /// Root words every later kernel must contain.
    pub later: Vec<Word>,
}

impl ChainSelector {
    /// The `[3,3]`-kernel containing all witnesses, falling back to the one
    /// with the least image vector.
    fn select(&self, tower: &Tower, kernels: &[RecordId], first: bool) -> Option<RecordId> {
        let witnesses = if first { &self.first } else { &self.later };
        let candidates: Vec<RecordId> =
            kernels.iter().copied().filter(|&k| tower.get(k).invariants.is_elementary_33()).collect();
        if !witnesses.is_empty() {
            let hit = candidates.iter().copied().find(|&k| witnesses.iter().all(|w| tower.contains(k, w)));
            if hit.is_some() {
                return hit;
            }
        }
        candidates.into_iter().min_by_key(|&k| tower.get(k).epi.clone())
    }
}

#[derive(Clone, Debug)]
pub struct ChainBudget {
    pub limits: EnumerationLimits,
    pub tietze: TietzeBudget,
    /// No level past `min_levels` starts after this much wall time.
    pub time_limit: Duration,
    pub min_levels: usize,
}

impl Default for ChainBudget {
    fn default() -> Self {
        ChainBudget {
            limits: EnumerationLimits::with_max(2_000_000),
            tietze: TietzeBudget::default(),
            time_limit: Duration::from_secs(600),
            min_levels: 0,
        }
    }
}

/// One record of the chain together with its index-3 kernels.
#[derive(Clone, Debug)]
pub struct ChainLevel {
    /// 1 for the starting record.
    pub level: usize,
    pub record: RecordId,
    pub kernels: Vec<RecordId>,
    pub pattern: Vec<AbelianInvariants>,
    /// The kernel with the largest free rank: `H_i` in the tower's notation.
    pub h_kernel: Option<RecordId>,
    /// Whether `h_kernel` lies inside the previous level's `h_kernel`.
    pub h_contained_in_previous: Option<bool>,
    pub commutator: Certificate,
    pub selected: Option<RecordId>,
    pub elapsed: Duration,
}

#[derive(Clone, Debug)]
pub struct ChainReport {
    pub levels: Vec<ChainLevel>,
    /// Set when the descent stopped before the requested depth.
    pub stopped: Option<String>,
}

impl ChainReport {
    /// The selected records `G_2, G_3, ...` whose own kernels were computed.
    pub fn chain(&self) -> Vec<RecordId> {
        self.levels.iter().skip(1).map(|l| l.record).collect()
    }
}

/// The kernel multiset expected at every level below the first.
pub fn tower_pattern() -> Vec<AbelianInvariants> {
    ["[7,0,0]", "[3,3]", "[3,3]", "[3,3]"].iter().map(|s| AbelianInvariants::from_brackets(s).unwrap()).collect()
}

/// Multiset equality of invariant lists.
pub fn same_multiset(a: &[AbelianInvariants], b: &[AbelianInvariants]) -> bool {
    let mut a = a.to_vec();
    let mut b = b.to_vec();
    a.sort();
    b.sort();
    a == b
}

/// Walks `depth` steps down from `start`, computing the index-3 kernels of
/// every record on the way (including the last one reached).
pub fn descend_chain(
    tower: &mut Tower,
    start: RecordId,
    depth: usize,
    selector: &ChainSelector,
    budget: &ChainBudget,
) -> ChainReport {
    let clock = Instant::now();
    let mut levels: Vec<ChainLevel> = Vec::new();
    let mut current = start;
    let mut stopped = None;
    for step in 0..=depth {
        if step >= budget.min_levels && clock.elapsed() > budget.time_limit {
            stopped = Some(format!("time limit reached before level {}", step + 1));
            break;
        }
        let t0 = Instant::now();
        let kernels = match prime_index_normal_subgroups(tower, Some(current), 3) {
            Ok(k) => k,
            Err(e) => {
                stopped = Some(e.to_string());
                break;
            }
        };
        let pattern: Vec<AbelianInvariants> = kernels.iter().map(|&k| tower.get(k).invariants.clone()).collect();
        let h_kernel = kernels.first().copied();
        let h_contained_in_previous = match (levels.last().and_then(|l| l.h_kernel), h_kernel) {
            (Some(prev), Some(h)) => Some(kernel_inside_sibling(tower, h, prev)),
            _ => None,
        };
        let pres = tower.get(current).presentation();
        let commutator = cached(tower.cache(), "commutator", &[&pres.content_hash(), &format!("{:?}", budget.limits)], || {
            commutator_subgroup_check(pres, &budget.limits)
        });
        let selected = selector.select(tower, &kernels, step == 0);
        let label = tower.get(current).label.clone();
        for (i, &k) in kernels.iter().enumerate() {
            let tag = if Some(k) == h_kernel { format!("H{}", step + 1) } else { format!("{label}.k{}", i + 1) };
            tower.relabel(k, tag);
        }
        if let Some(s) = selected {
            tower.relabel(s, format!("G{}", step + 2));
        }
        log::info!("level {} ({label}): {:?} in {:?}", step + 1, pattern, t0.elapsed());
        levels.push(ChainLevel {
            level: step + 1,
            record: current,
            kernels,
            pattern,
            h_kernel,
            h_contained_in_previous,
            commutator,
            selected,
            elapsed: t0.elapsed(),
        });
        match selected {
            Some(s) if step < depth => {
                let t1 = Instant::now();
                tower.simplify(s, &budget.tietze);
                levels.last_mut().unwrap().elapsed += t1.elapsed();
                current = s;
            }
            Some(_) => {}
            None => {
                stopped = Some(format!("no [3,3] kernel at level {}", step + 1));
                break;
            }
        }
    }
    ChainReport { levels, stopped }
}

/// Whether the kernel `inner` (a child of record `P`) lies in the kernel
/// `outer`, a child of `P`'s parent.
fn kernel_inside_sibling(tower: &Tower, inner: RecordId, outer: RecordId) -> bool {
    let rec = tower.get(inner);
    let Some(p) = rec.parent else { return false };
    let outer_rec = tower.get(outer);
    if tower.get(p).parent != outer_rec.parent {
        return false;
    }
    rec.sub.generator_words.iter().all(|w| outer_rec.contains_parent_word(&tower.get(p).sub.to_ambient(w)))
}

/// Result of a bounded search for a conjugating element.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum ConjugacyOutcome {
    /// `g` with `A^g <= B`, as a word over the ambient alphabet.
    Witness(Word),
    /// No such element can exist; the reason says why.
    Impossible(String),
    Inconclusive { tried: usize },
}

/// Searches for `g` in `ambient` with `g^-1 A g` inside `B`, for every pair
/// of records in `subs`. All of `subs` must be children of one record `P`,
/// and `ambient` must be `P` itself or `P`'s parent. Candidates are coset
/// representatives of `P` in the ambient, shortest first.
pub fn conjugacy_witness_search(
    tower: &Tower,
    subs: &[RecordId],
    ambient: Option<RecordId>,
    budget: usize,
) -> Vec<((RecordId, RecordId), ConjugacyOutcome)> {
    let mut out = Vec::new();
    for (i, &a) in subs.iter().enumerate() {
        for &b in &subs[i + 1..] {
            out.push(((a, b), conjugate_pair(tower, a, b, ambient, budget)));
        }
    }
    out
}

fn conjugate_pair(tower: &Tower, a: RecordId, b: RecordId, ambient: Option<RecordId>, budget: usize) -> ConjugacyOutcome {
    let (ra, rb) = (tower.get(a), tower.get(b));
    if ra.parent != rb.parent {
        return ConjugacyOutcome::Impossible("different parents".into());
    }
    if ra.invariants != rb.invariants {
        return ConjugacyOutcome::Impossible(format!("invariants differ: {} vs {}", ra.invariants, rb.invariants));
    }
    if ra.index_in_parent() != rb.index_in_parent() {
        return ConjugacyOutcome::Impossible("indices differ".into());
    }
    if a == b {
        return ConjugacyOutcome::Witness(Word::identity());
    }
    if ambient == ra.parent {
        if let (Some(ea), Some(eb)) = (&ra.epi, &rb.epi) {
            if ea != eb {
                return ConjugacyOutcome::Impossible("distinct normal subgroups of the ambient".into());
            }
        }
        return ConjugacyOutcome::Inconclusive { tried: 0 };
    }
    let Some(p) = ra.parent else {
        return ConjugacyOutcome::Inconclusive { tried: 0 };
    };
    let prec = tower.get(p);
    if ambient != prec.parent {
        return ConjugacyOutcome::Inconclusive { tried: 0 };
    }
    let a_gens: Vec<Word> = ra.sub.generator_words.iter().map(|w| prec.sub.to_ambient(w)).collect();
    let mut reps: Vec<&Word> = prec.sub.transversal.reps().iter().collect();
    reps.sort_by(|x, y| x.len().cmp(&y.len()).then_with(|| x.cmp(y)));
    let mut tried = 0;
    for g in reps.into_iter().take(budget) {
        tried += 1;
        let inside = a_gens.iter().all(|x| match prec.sub.rewrite(&conjugate(x, g)) {
            Some(w) => rb.contains_parent_word(&w),
            None => false,
        });
        if inside {
            return ConjugacyOutcome::Witness(g.clone());
        }
    }
    ConjugacyOutcome::Inconclusive { tried }
}

/// Order-3 elements `a, b, c, d` of a first-level subgroup together with a
/// homomorphism onto the triangle group sending `a, b, c` to `x` and `d`
/// to `y`.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct Order3Elements {
    /// Root words, each a conjugate of a root generator or its inverse.
    pub root_words: [Word; 4],
    /// The same elements over the subgroup's alphabet.
    pub words: [Word; 4],
    /// Images of the subgroup's generators.
    pub h: Vec<AffineIsometry>,
}

/// Finds `a, b, c, d` in the record `g1` (a subgroup of the root) from an
/// epimorphism `h` onto the triangle group.
///
/// Every coset fixed by a root generator `s` yields an elliptic element
/// `rep * s * rep^-1` of `g1`. Its image is a rotation whose centre lies
/// either in the orbit of 0 (the class of `x`) or in one of the two other
/// orbits; the automorphism `z -> -z` swaps those two. Elements are then
/// conjugated inside `g1` until the centre is exactly 0 (for `x`) or 1
/// (for `y`). `max_states` bounds each conjugator search.
pub fn find_order3_elements(
    tower: &Tower,
    g1: RecordId,
    h: &[AffineIsometry],
    max_states: usize,
) -> Result<Order3Elements, String> {
    let rec = tower.get(g1);
    if rec.parent.is_some() {
        return Err("record must be a subgroup of the root".into());
    }
    let table = &rec.sub.table;
    let tr = &rec.sub.transversal;
    let mut x_type = Vec::new();
    let mut other = Vec::new();
    for c in 0..table.index() {
        for s in 0..tower.root().ngens() {
            if table.entry(c, letter(s, true)) != c {
                continue;
            }
            let e = tr.rep(c).mul(&Word::generator(s)).mul(&tr.rep(c).inverse());
            let mut w = rec.sub.rewrite(&e).ok_or("elliptic element outside the subgroup")?;
            let mut root = e;
            let mut img = evaluate(&w, h);
            if img.k == 0 {
                continue;
            }
            if img.k == 2 {
                w = w.inverse();
                root = root.inverse();
                img = img.inverse();
            }
            let centre = img.center().expect("rotation has a centre");
            if centre.divisible_by_one_minus_omega() {
                x_type.push((root, w, centre));
            } else {
                other.push((root, w, centre));
            }
        }
    }
    if x_type.len() < 3 || other.is_empty() {
        return Err(format!("found {} elements of x type and {} of the other type", x_type.len(), other.len()));
    }
    // make the centre of `d` congruent to 1, the centre of y
    let one = EisensteinInt::one();
    let flip = !(&other[0].2 - &one).divisible_by_one_minus_omega();
    let h: Vec<AffineIsometry> =
        if flip { h.iter().map(|g| AffineIsometry::new(-&g.t, g.k)).collect() } else { h.to_vec() };
    let negate = |z: &EisensteinInt| if flip { -z } else { z.clone() };
    let mut root_words = Vec::new();
    let mut words = Vec::new();
    let picks = x_type.iter().take(3).map(|e| (e, EisensteinInt::zero())).chain([(&other[0], one.clone())]);
    for ((root, w, centre), target) in picks {
        let g = conjugator_to(&h, &negate(centre), &target, max_states)
            .ok_or_else(|| format!("no conjugator within {max_states} states"))?;
        words.push(conjugate(w, &g));
        root_words.push(conjugate(root, &rec.sub.to_ambient(&g)));
    }
    Ok(Order3Elements {
        root_words: root_words.try_into().expect("four elements"),
        words: words.try_into().expect("four elements"),
        h,
    })
}

/// Shortest word `g` (breadth first over images) with `h(g)(target) = centre`,
/// so that conjugating by `g` moves a rotation about `centre` to one about
/// `target`.
fn conjugator_to(h: &[AffineIsometry], centre: &EisensteinInt, target: &EisensteinInt, max_states: usize) -> Option<Word> {
    let mut seen: HashSet<AffineIsometry> = HashSet::new();
    let mut queue = VecDeque::new();
    seen.insert(AffineIsometry::identity());
    queue.push_back((Vec::new(), AffineIsometry::identity()));
    while let Some((w, img)) = queue.pop_front() {
        if &img.apply(target) == centre {
            return Some(Word::reduce(w));
        }
        if seen.len() > max_states {
            continue;
        }
        for (g, im) in h.iter().enumerate() {
            for positive in [true, false] {
                let step = if positive { im.clone() } else { im.inverse() };
                let next = img.compose(&step);
                if seen.insert(next.clone()) {
                    let mut w2 = w.clone();
                    w2.push(letter(g, positive));
                    queue.push_back((w2, next));
                }
            }
        }
    }
    None
}

/// How an order-3 quotient was certified.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum QuotientMethod {
    /// Enumeration of the quotient presentation.
    Direct,
    /// Enumeration after simplifying the quotient presentation, which
    /// removes generators the added relators make trivial.
    Simplified,
    /// Enumeration of the cosets of the subgroup generated by the words:
    /// index 3 bounds the normal closure from below.
    SubgroupIndex,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct GenerationCertificate {
    pub holds: bool,
    pub members: bool,
    pub quotient_order: Option<usize>,
    pub method: Option<QuotientMethod>,
    pub detail: String,
}

/// Certifies `next = <<gens>>` inside `rec`: every word lies in `next` (an
/// index-3 subgroup of `rec`) and `rec / <<gens>>` has order exactly 3.
///
/// When direct enumeration of the quotient fails, the quotient presentation
/// is simplified first; failing that, the index of the plain subgroup
/// generated by `gens` is enumerated, which is enough because
/// `<gens> <= <<gens>> <= next`.
pub fn order3_generation_certificate(
    tower: &Tower,
    next: RecordId,
    rec: RecordId,
    gens3: &[Word],
    limits: &EnumerationLimits,
    budget: &TietzeBudget,
) -> GenerationCertificate {
    let local: Option<Vec<Word>> = gens3.iter().map(|w| tower.express(rec, w)).collect();
    let Some(local) = local else {
        return GenerationCertificate {
            holds: false,
            members: false,
            quotient_order: None,
            method: None,
            detail: "a word is not in the ambient record".into(),
        };
    };
    let next_rec = tower.get(next);
    let members = next_rec.parent == Some(rec) && local.iter().all(|w| next_rec.contains_parent_word(w));
    let pres = tower.get(rec).presentation();
    let q = normal_closure_quotient(pres, &local);
    let mut attempts = Vec::new();
    let mut found = None;
    match quotient_order(&q, limits) {
        Ok(n) => found = Some((n, QuotientMethod::Direct)),
        Err(e) => attempts.push(format!("direct: {e}")),
    }
    if found.is_none() {
        let (simple, _, _, _) = simplify_presentation(&q, budget);
        match quotient_order(&simple, limits) {
            Ok(n) => found = Some((n, QuotientMethod::Simplified)),
            Err(e) => attempts.push(format!("simplified ({} generators): {e}", simple.ngens())),
        }
    }
    if found.is_none() && members {
        match todd_coxeter(pres, &local, limits) {
            Ok(t) if t.index() == 3 => found = Some((3, QuotientMethod::SubgroupIndex)),
            Ok(t) => attempts.push(format!("subgroup index {}", t.index())),
            Err(e) => attempts.push(format!("subgroup index: {e}")),
        }
    }
    let (order, method) = match found {
        Some((n, m)) => (Some(n), Some(m)),
        None => (None, None),
    };
    let holds = members && order == Some(3);
    let mut detail = match order {
        Some(n) => format!("quotient order {n}"),
        None => "quotient order unknown".to_string(),
    };
    if !members {
        detail.push_str("; some word lies outside the next record");
    }
    if !attempts.is_empty() {
        detail.push_str(&format!(" (after {})", attempts.join("; ")));
    }
    GenerationCertificate { holds, members, quotient_order: order, method, detail }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::parse::parse_presentation;

    fn triangle() -> Presentation {
        parse_presentation("<x,y | x^3, y^3, (x*y)^3>").unwrap()
    }

    #[test]
    fn epis_are_normalized() {
        let e = EpiToCyclic::new(3, &[0, 2, 1]).unwrap();
        assert_eq!(e.images, vec![0, 1, 2]);
        assert!(EpiToCyclic::new(3, &[0, 3]).is_none());
        assert_eq!(cyclic_epimorphisms(&triangle(), 3).unwrap().len(), 4);
        assert_eq!(expected_normal_count(&triangle(), 3).unwrap(), 4);
    }

    #[test]
    fn triangle_kernels() {
        let mut t = Tower::new(triangle());
        let ks = prime_index_normal_subgroups(&mut t, None, 3).unwrap();
        let pattern: Vec<String> = ks.iter().map(|&k| t.get(k).invariants.to_string()).collect();
        assert_eq!(pattern, ["[0,0]", "[3,3]", "[3,3]", "[3,3]"]);
        for &k in &ks {
            assert_eq!(t.get(k).index_in_parent(), 3);
            t.simplify(k, &TietzeBudget::default());
            assert!(t.get(k).tietze.is_some());
            assert!(t.get(k).tietze_invariant());
        }
    }

    #[test]
    fn commutator_check() {
        let limits = EnumerationLimits::with_max(10_000);
        assert!(commutator_subgroup_check(&triangle(), &limits).holds);
        assert!(!commutator_subgroup_check(&Presentation::free(2), &limits).holds);
        let c9 = parse_presentation("<x | x^9>").unwrap();
        assert!(!commutator_subgroup_check(&c9, &limits).holds);
    }

    #[test]
    fn closure_quotients() {
        let limits = EnumerationLimits::with_max(10_000);
        let t = triangle();
        assert_eq!(normal_closure_quotient(&t, &[]), t);
        let all = [Word::generator(0), Word::generator(1)];
        assert_eq!(quotient_order(&normal_closure_quotient(&t, &all), &limits), Ok(1));
        assert_eq!(quotient_order(&parse_presentation("<x | x^3>").unwrap(), &limits), Ok(3));
    }

    #[test]
    fn conjugacy_in_the_triangle_group() {
        // the three [3,3] kernels of T are permuted by nothing inside T
        let mut t = Tower::new(triangle());
        let ks = prime_index_normal_subgroups(&mut t, None, 3).unwrap();
        let out = conjugacy_witness_search(&t, &ks, None, 10);
        assert!(matches!(out[0].1, ConjugacyOutcome::Impossible(_)));
        let same = conjugate_pair(&t, ks[1], ks[1], None, 10);
        assert_eq!(same, ConjugacyOutcome::Witness(Word::identity()));
    }
}
