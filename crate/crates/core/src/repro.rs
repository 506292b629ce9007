//! The end-to-end reproduction run: every tower experiment in order, with a
//! verdict per experiment and the chain written out as `chain-report.json`.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::str::FromStr;
use std::time::{Duration, Instant};

use serde::{Deserialize, Serialize};

use crate::abelian::{abelian_invariants, exponent_matrix, AbelianInvariants};
use crate::cache::{cached, ArtifactCache};
use crate::coset::EnumerationLimits;
use crate::eisenstein::{
    evaluate, find_epi_to_triangle, is_homomorphism, surjectivity_check, AffineIsometry, EpiSearch,
};
use crate::error::FormatError;
use crate::finite::{small_groups, FiniteGroup};
use crate::fingerprint::{fingerprint, FingerprintReport};
use crate::parse::{parse_pres_file, parse_word_list};
use crate::presentation::Presentation;
use crate::quotient::{
    conjugacy_witness_search, descend_chain, expected_normal_count, find_order3_elements, from_root_invariants,
    normal_closure_quotient, order3_generation_certificate, prime_index_normal_subgroups, same_multiset,
    tower_pattern, ChainBudget, ChainReport, ChainSelector, ConjugacyOutcome, GenerationCertificate,
    Order3Elements, QuotientMethod, RecordId, Tower,
};
use crate::rewrite::TietzeBudget;
use crate::surface::check_tower;
use crate::words::Word;

pub const GAMMA_BAR: &str = include_str!("../../../data/gamma-bar.pres");
pub const TRIANGLE: &str = include_str!("../../../data/triangle-333.pres");
pub const TRIANGLE_PRIME: &str = include_str!("../../../data/triangle-prime.pres");
pub const G1_GENERATORS: &str = include_str!("../../../data/g1-generators.txt");

/// Schema tag written into `chain-report.json`.
pub const CHAIN_SCHEMA: &str = "fptower-chain-report/1";

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum OutputFormat {
    Md,
    Json,
    Csv,
}

impl FromStr for OutputFormat {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "md" | "markdown" => Ok(OutputFormat::Md),
            "json" => Ok(OutputFormat::Json),
            "csv" => Ok(OutputFormat::Csv),
            other => Err(format!("unknown format `{other}` (expected md, json or csv)")),
        }
    }
}

#[derive(Clone, Debug)]
pub struct ReproConfig {
    pub gamma_bar: Presentation,
    pub triangle: Presentation,
    pub triangle_prime: Presentation,
    /// Generators of the first tower group, over the root alphabet.
    pub g1_generators: Vec<Word>,
    pub required_depth: usize,
    pub stretch_depth: usize,
    pub limits: EnumerationLimits,
    pub tietze: TietzeBudget,
    /// Probe groups: all groups up to this order.
    pub probe_max_order: usize,
    /// Adds S5, A5 and PSL(2,7) to the probes.
    pub large_probes: bool,
    pub epi_budget: usize,
    pub conjugacy_budget: usize,
    /// States explored when conjugating order-3 elements into position.
    pub conjugator_budget: usize,
    /// Levels past the required depth only start within this budget.
    pub stretch_time_limit: Duration,
    pub tower_levels: u32,
    pub out_dir: Option<PathBuf>,
    pub cache_dir: Option<PathBuf>,
    /// Recorded in the report. Every search is deterministic, so the seed
    /// does not change any result.
    pub seed: u64,
}

impl Default for ReproConfig {
    fn default() -> Self {
        let gamma_bar = parse_pres_file(GAMMA_BAR).expect("bundled presentation parses");
        let g1_generators = parse_word_list(G1_GENERATORS, gamma_bar.names()).expect("bundled words parse");
        ReproConfig {
            triangle: parse_pres_file(TRIANGLE).expect("bundled presentation parses"),
            triangle_prime: parse_pres_file(TRIANGLE_PRIME).expect("bundled presentation parses"),
            gamma_bar,
            g1_generators,
            required_depth: 3,
            stretch_depth: 9,
            limits: EnumerationLimits::with_max(2_000_000),
            tietze: TietzeBudget::default(),
            probe_max_order: 24,
            large_probes: true,
            epi_budget: 100_000,
            conjugacy_budget: 64,
            conjugator_budget: 100_000,
            stretch_time_limit: Duration::from_secs(300),
            tower_levels: 40,
            out_dir: None,
            cache_dir: None,
            seed: 0,
        }
    }
}

impl ReproConfig {
    pub fn validate(&self) -> Result<(), String> {
        if self.required_depth > self.stretch_depth {
            return Err(format!(
                "required depth {} exceeds stretch depth {}",
                self.required_depth, self.stretch_depth
            ));
        }
        if self.limits.max_cosets == 0 || self.epi_budget == 0 || self.tower_levels == 0 {
            return Err("limits must be positive".into());
        }
        Ok(())
    }

    pub fn probes(&self) -> Vec<FiniteGroup> {
        let mut probes = small_groups(self.probe_max_order);
        if self.large_probes {
            probes.extend([FiniteGroup::symmetric(5), FiniteGroup::alternating5(), FiniteGroup::psl27()]);
        }
        probes
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Match,
    Mismatch,
    Inconclusive,
}

impl Status {
    fn of(ok: bool) -> Self {
        if ok {
            Status::Match
        } else {
            Status::Mismatch
        }
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct Experiment {
    pub id: String,
    pub description: String,
    pub expected: String,
    pub computed: String,
    pub status: Status,
    pub required: bool,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ReproReport {
    pub experiments: Vec<Experiment>,
    /// Wall time per experiment id, in seconds. Kept apart so the rest of
    /// the report is reproducible byte for byte.
    pub timings: BTreeMap<String, f64>,
    pub chain: ChainReportFile,
    pub seed: u64,
}

impl ReproReport {
    pub fn overall(&self) -> Status {
        let required = self.experiments.iter().filter(|e| e.required);
        let mut status = Status::Match;
        for e in required {
            match e.status {
                Status::Mismatch => return Status::Mismatch,
                Status::Inconclusive => status = Status::Inconclusive,
                Status::Match => {}
            }
        }
        status
    }

    /// 0 when every required experiment matches, 3 on a mismatch, 2 when
    /// something stayed inconclusive.
    pub fn exit_code(&self) -> i32 {
        match self.overall() {
            Status::Match => 0,
            Status::Mismatch => 3,
            Status::Inconclusive => 2,
        }
    }

    pub fn get(&self, id: &str) -> Option<&Experiment> {
        self.experiments.iter().find(|e| e.id == id)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }

    pub fn to_markdown(&self) -> String {
        let mut s = String::from("# Reproduction report\n\n");
        let _ = writeln!(s, "Overall: **{:?}** (seed {})\n", self.overall(), self.seed);
        s.push_str("| id | experiment | expected | computed | status | required |\n");
        s.push_str("|---|---|---|---|---|---|\n");
        for e in &self.experiments {
            let _ = writeln!(
                s,
                "| {} | {} | {} | {} | {:?} | {} |",
                e.id,
                cell(&e.description),
                cell(&e.expected),
                cell(&e.computed),
                e.status,
                if e.required { "yes" } else { "no" }
            );
        }
        s.push_str("\n## Timings\n\n| id | seconds |\n|---|---|\n");
        for (id, t) in &self.timings {
            let _ = writeln!(s, "| {id} | {t:.3} |");
        }
        s
    }

    pub fn to_csv(&self) -> String {
        let mut s = String::from("id,status,required,expected,computed\n");
        for e in &self.experiments {
            let _ = writeln!(
                s,
                "{},{:?},{},{},{}",
                e.id,
                e.status,
                e.required,
                csv_field(&e.expected),
                csv_field(&e.computed)
            );
        }
        s
    }

    pub fn render(&self, format: OutputFormat) -> String {
        match format {
            OutputFormat::Md => self.to_markdown(),
            OutputFormat::Json => self.to_json(),
            OutputFormat::Csv => self.to_csv(),
        }
    }

    /// Writes `report.md`, `report.json` and `chain-report.json`.
    pub fn write_to(&self, dir: &Path) -> Result<(), FormatError> {
        std::fs::create_dir_all(dir)?;
        std::fs::write(dir.join("report.md"), self.to_markdown())?;
        std::fs::write(dir.join("report.json"), self.to_json())?;
        std::fs::write(dir.join("chain-report.json"), self.chain.to_json())?;
        Ok(())
    }
}

fn cell(s: &str) -> String {
    s.replace('|', "\\|").replace('\n', " ")
}

fn csv_field(s: &str) -> String {
    format!("\"{}\"", s.replace('"', "\"\""))
}

/// Contents of `chain-report.json`.
#[derive(Clone, Debug, Default, Serialize, Deserialize)]
pub struct ChainReportFile {
    pub schema: String,
    pub root: String,
    pub required_depth: usize,
    pub levels: Vec<LevelEntry>,
    pub stopped: Option<String>,
}

impl ChainReportFile {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("chain report serializes")
    }

    pub fn from_json(text: &str) -> Result<Self, FormatError> {
        let file: ChainReportFile = serde_json::from_str(text)?;
        if file.schema != CHAIN_SCHEMA {
            return Err(FormatError::Malformed { what: "chain report", message: format!("schema `{}`", file.schema) });
        }
        Ok(file)
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct LevelEntry {
    pub level: usize,
    pub label: String,
    pub index_in_root: u64,
    pub generators: usize,
    pub relators: usize,
    pub total_length: usize,
    pub abelian_invariants: String,
    pub kernels: Vec<KernelEntry>,
    pub kernel_multiset: Vec<String>,
    /// `None` on the first level, which has its own pattern.
    pub pattern_matches: Option<bool>,
    pub h_contained_in_previous: Option<bool>,
    pub commutator_check: bool,
    pub commutator_detail: String,
    pub order3_generation: Option<bool>,
    pub order3_method: Option<QuotientMethod>,
    pub order3_detail: Option<String>,
    pub from_root_agrees: Option<bool>,
    pub selected: Option<String>,
    pub required: bool,
    pub seconds: f64,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct KernelEntry {
    pub label: String,
    pub invariants: String,
    pub images: Vec<u64>,
    pub index_in_root: u64,
}

struct Recorder {
    experiments: Vec<Experiment>,
    timings: BTreeMap<String, f64>,
}

impl Recorder {
    fn push(&mut self, id: &str, description: &str, expected: &str, computed: String, status: Status, required: bool, t: Instant) {
        self.experiments.push(Experiment {
            id: id.into(),
            description: description.into(),
            expected: expected.into(),
            computed,
            status,
            required,
        });
        self.timings.insert(id.into(), t.elapsed().as_secs_f64());
    }

    fn skip(&mut self, id: &str, description: &str, expected: &str, needs: &str, required: bool) {
        self.push(id, description, expected, format!("not run: needs {needs}"), Status::Inconclusive, required, Instant::now());
    }
}

fn invariant_strings(tower: &Tower, ids: &[RecordId]) -> Vec<String> {
    ids.iter().map(|&k| tower.get(k).invariants.to_string()).collect()
}

fn brackets(list: &[&str]) -> Vec<AbelianInvariants> {
    list.iter().map(|s| AbelianInvariants::from_brackets(s).expect("valid brackets")).collect()
}

/// Runs every experiment. Stages that depend on a failed stage are reported
/// as inconclusive rather than skipped silently.
pub fn run_repro(cfg: &ReproConfig) -> ReproReport {
    let mut rec = Recorder { experiments: Vec::new(), timings: BTreeMap::new() };
    let cache = cfg.cache_dir.as_ref().and_then(|d| ArtifactCache::new(d).ok()).or_else(ArtifactCache::from_env);
    let mut tower = Tower::new(cfg.gamma_bar.clone()).with_cache(cache.clone());
    let mut chain_file = ChainReportFile {
        schema: CHAIN_SCHEMA.into(),
        root: cfg.gamma_bar.to_bracket_string(),
        required_depth: cfg.required_depth,
        ..Default::default()
    };

    let t = Instant::now();
    let g1 = tower.add_subgroup(None, "G1", &cfg.g1_generators, &cfg.limits, &cfg.tietze);
    match &g1 {
        Ok(id) => {
            let index = tower.get(*id).index_in_parent();
            rec.push("01-index", "index of the first tower group", "288", index.to_string(), Status::of(index == 288), true, t);
        }
        Err(e) => rec.push("01-index", "index of the first tower group", "288", e.to_string(), Status::Inconclusive, true, t),
    }

    if let Ok(g1) = g1 {
        let t = Instant::now();
        let inv = tower.get(g1).invariants.clone();
        rec.push("02-abel-g1", "abelian invariants of G1", "[3,3]", inv.to_string(), Status::of(inv.is_elementary_33()), true, t);

        let t = Instant::now();
        let abcd = find_triangle_map(&tower, g1, cfg);
        report_triangle_map(&mut rec, &tower, g1, &abcd, t);

        let selector = ChainSelector {
            first: cfg.g1_generators.first().cloned().into_iter().collect(),
            later: abcd.as_ref().map(|o| o.root_words[..3].to_vec()).unwrap_or_default(),
        };
        let budget = ChainBudget {
            limits: cfg.limits,
            tietze: cfg.tietze.clone(),
            time_limit: cfg.stretch_time_limit,
            min_levels: cfg.required_depth + 1,
        };
        let t = Instant::now();
        let chain = descend_chain(&mut tower, g1, cfg.stretch_depth, &selector, &budget);
        rec.timings.insert("chain-total".into(), t.elapsed().as_secs_f64());
        chain_file.stopped = chain.stopped.clone();
        report_chain(&mut rec, &tower, &chain, cfg);

        let certs = generation_certificates(&mut rec, &tower, &chain, abcd.as_ref(), cfg);
        let from_root = from_root_checks(&mut rec, &tower, &chain, cfg);
        conjugacy_stage(&mut rec, &tower, &chain, cfg);

        match &abcd {
            Some(o) => quotient_fingerprint(&mut rec, &tower, g1, o, cfg),
            None => rec.skip("09-q-fingerprint", "Q agrees with T' on every probe", "identical counts", "a, b, c, d", true),
        }
        tietze_stage(&mut rec, &tower);
        chain_file.levels = level_entries(&tower, &chain, &certs, &from_root, cfg.required_depth);
        if let Some(dir) = &cfg.out_dir {
            write_artifacts(&tower, &chain, dir);
        }
    } else {
        for (id, what) in [
            ("02-abel-g1", "abelian invariants of G1"),
            ("03-kernels-g1", "index-3 normal subgroups of G1"),
            ("08-epi-triangle", "epimorphism onto T"),
        ] {
            rec.skip(id, what, "", "the first tower group", true);
        }
    }

    triangle_stage(&mut rec, cfg);
    let t = Instant::now();
    let check = check_tower(cfg.tower_levels);
    let computed = if check.passed() { format!("{} levels exact", cfg.tower_levels) } else { check.failures.join("; ") };
    rec.push("12-tower-identities", "surface tower identities", "all identities exact", computed, Status::of(check.passed()), true, t);

    rec.experiments.sort_by(|a, b| a.id.cmp(&b.id));
    ReproReport { experiments: rec.experiments, timings: rec.timings, chain: chain_file, seed: cfg.seed }
}

fn find_triangle_map(tower: &Tower, g1: RecordId, cfg: &ReproConfig) -> Option<Order3Elements> {
    let pres = tower.get(g1).presentation();
    let h = match find_epi_to_triangle(pres, cfg.epi_budget) {
        EpiSearch::Found(h) => h,
        EpiSearch::Inconclusive { .. } => return None,
    };
    find_order3_elements(tower, g1, &h, cfg.conjugator_budget).ok()
}

fn report_triangle_map(rec: &mut Recorder, tower: &Tower, g1: RecordId, abcd: &Option<Order3Elements>, t: Instant) {
    let desc = "epimorphism G1 -> T with h(a)=h(b)=h(c)=x, h(d)=y";
    let expected = "certified surjection";
    let Some(o) = abcd else {
        rec.push("08-epi-triangle", desc, expected, "inconclusive within budget".into(), Status::Inconclusive, true, t);
        return;
    };
    let pres = tower.get(g1).presentation();
    let images: Vec<AffineIsometry> = o.words.iter().map(|w| evaluate(w, &o.h)).collect();
    let hom = is_homomorphism(pres, &o.h);
    let onto = surjectivity_check(&o.h);
    let x = AffineIsometry::x();
    let y = AffineIsometry::y();
    let targets = images[..3].iter().all(|i| *i == x) && images[3] == y;
    let members = o.root_words.iter().all(|w| tower.contains(g1, w));
    let ok = hom && onto && targets && members;
    let computed = format!(
        "h = [{}]; relators hold: {hom}; surjective: {onto}; images of a,b,c,d: {}",
        o.h.iter().map(|i| i.to_string()).collect::<Vec<_>>().join(", "),
        images.iter().map(|i| i.to_string()).collect::<Vec<_>>().join(", ")
    );
    rec.push("08-epi-triangle", desc, expected, computed, Status::of(ok), true, t);
}

fn report_chain(rec: &mut Recorder, tower: &Tower, chain: &ChainReport, cfg: &ReproConfig) {
    let t = Instant::now();
    let Some(first) = chain.levels.first() else {
        rec.skip("03-kernels-g1", "index-3 normal subgroups of G1", "[0,0],[3,21],[3,3],[3,3]", "kernels", true);
        return;
    };
    let g1_pattern = brackets(&["[0,0]", "[3,21]", "[3,3]", "[3,3]"]);
    let h1_ok = first.h_kernel.map(|h| tower.get(h).invariants.to_string()) == Some("[0,0]".into());
    let count_ok = expected_normal_count(tower.get(first.record).presentation(), 3).ok() == Some(first.kernels.len());
    let ok = same_multiset(&first.pattern, &g1_pattern) && h1_ok && count_ok;
    rec.push(
        "03-kernels-g1",
        "index-3 normal subgroups of G1; H1 is the [0,0] kernel",
        "[0,0],[3,21],[3,3],[3,3]",
        invariant_strings(tower, &first.kernels).join(","),
        Status::of(ok),
        true,
        t,
    );

    let t = Instant::now();
    let witness = &cfg.g1_generators[0];
    let g2 = first.selected;
    let holds = g2.is_some_and(|g| tower.contains(g, witness) && tower.get(g).invariants.is_elementary_33());
    let computed = match g2 {
        Some(g) => format!("{} {} contains the witness: {holds}", tower.get(g).label, tower.get(g).invariants),
        None => "no [3,3] kernel".into(),
    };
    rec.push("04-select-g2", "G2 is the [3,3] kernel containing the first generator", "[3,3] kernel found", computed, Status::of(holds), true, t);

    let pattern = tower_pattern();
    let t = Instant::now();
    match chain.levels.get(1) {
        Some(l2) => {
            let ok = same_multiset(&l2.pattern, &pattern) && l2.h_contained_in_previous == Some(true);
            let computed = format!(
                "{}; [7,0,0] kernel inside H1 with index 3: {}",
                invariant_strings(tower, &l2.kernels).join(","),
                l2.h_contained_in_previous == Some(true)
            );
            rec.push("05-pattern-g2", "kernels of G2 and containment in H1", "[7,0,0],[3,3],[3,3],[3,3]; contained", computed, Status::of(ok), true, t);
        }
        None => rec.skip("05-pattern-g2", "kernels of G2", "[7,0,0],[3,3],[3,3],[3,3]", "G2", true),
    }

    for l in chain.levels.iter().skip(1) {
        let required = l.level <= cfg.required_depth + 1;
        let t = Instant::now();
        let ok = same_multiset(&l.pattern, &pattern) && l.h_contained_in_previous == Some(true);
        let label = &tower.get(l.record).label;
        rec.push(
            &format!("06-chain-level-{:02}", l.level),
            &format!("pattern of {label}"),
            "[7,0,0],[3,3],[3,3],[3,3]; H contained in previous H",
            format!("{}; contained: {:?}; {:.1}s", l.pattern.iter().map(|p| p.to_string()).collect::<Vec<_>>().join(","), l.h_contained_in_previous, l.elapsed.as_secs_f64()),
            Status::of(ok),
            required,
            t,
        );
    }
    let reached = chain.levels.len().saturating_sub(1);
    let t = Instant::now();
    rec.push(
        "06-chain-depth",
        "chain depth reached",
        &format!(">= {} (stretch {})", cfg.required_depth, cfg.stretch_depth),
        match &chain.stopped {
            Some(why) => format!("{reached} ({why})"),
            None => reached.to_string(),
        },
        if reached >= cfg.required_depth { Status::Match } else { Status::Inconclusive },
        true,
        t,
    );

    for l in &chain.levels {
        let required = l.level <= cfg.required_depth + 1;
        let label = &tower.get(l.record).label;
        rec.push(
            &format!("07-commutator-{:02}", l.level),
            &format!("commutator subgroup of {label} has quotient (Z/3)^2"),
            "true",
            l.commutator.detail.clone(),
            Status::of(l.commutator.holds),
            required,
            Instant::now(),
        );
    }
}

fn generation_certificates(
    rec: &mut Recorder,
    tower: &Tower,
    chain: &ChainReport,
    abcd: Option<&Order3Elements>,
    cfg: &ReproConfig,
) -> BTreeMap<RecordId, GenerationCertificate> {
    let mut out = BTreeMap::new();
    let Some(o) = abcd else {
        rec.skip("10-generation-01", "G2 is the normal closure of a, b, c", "quotient order 3", "a, b, c", true);
        return out;
    };
    let levels = if cfg.stretch_depth > cfg.required_depth { cfg.required_depth + 1 } else { cfg.required_depth };
    for l in chain.levels.iter().take(levels) {
        let Some(next) = l.selected else { continue };
        let t = Instant::now();
        let label = tower.get(l.record).label.clone();
        let pres_hash = tower.get(l.record).presentation().content_hash();
        let words: Vec<String> = o.root_words[..3].iter().map(|w| format!("{w:?}")).collect();
        let cert: GenerationCertificate = cached(
            tower.cache(),
            "generation",
            &[&pres_hash, &words.join(";"), &format!("{:?}", cfg.limits)],
            || order3_generation_certificate(tower, next, l.record, &o.root_words[..3], &cfg.limits, &cfg.tietze),
        );
        let status = if cert.holds {
            Status::Match
        } else if cert.quotient_order.is_none() && cert.members {
            Status::Inconclusive
        } else {
            Status::Mismatch
        };
        rec.push(
            &format!("10-generation-{:02}", l.level),
            &format!("{} is the normal closure of a, b, c in {label}", tower.get(next).label),
            "quotient order 3",
            match cert.method {
                Some(m) => format!("{} via {m:?}", cert.detail),
                None => cert.detail.clone(),
            },
            status,
            l.level <= cfg.required_depth,
            t,
        );
        out.insert(l.record, cert);
    }
    out
}

fn from_root_checks(rec: &mut Recorder, tower: &Tower, chain: &ChainReport, cfg: &ReproConfig) -> BTreeMap<RecordId, bool> {
    let mut out = BTreeMap::new();
    let t = Instant::now();
    let mut ids = Vec::new();
    for l in chain.levels.iter().take(2) {
        ids.push(l.record);
        ids.extend(&l.kernels);
    }
    let mut computed = Vec::new();
    let mut all = !ids.is_empty();
    for id in ids {
        let r = tower.get(id);
        let ok = match from_root_invariants(tower, id, &cfg.limits) {
            Ok((inv, index)) => {
                computed.push(format!("{} {inv}@{index}", r.label));
                inv == r.invariants && index as u64 == r.index_in_root
            }
            Err(e) => {
                computed.push(format!("{} {e}", r.label));
                false
            }
        };
        all &= ok;
        out.insert(id, ok);
    }
    rec.push(
        "05b-from-root",
        "levels 1-2 recomputed from the root agree",
        "identical invariants and indices",
        computed.join("; "),
        Status::of(all),
        true,
        t,
    );
    out
}

fn conjugacy_stage(rec: &mut Recorder, tower: &Tower, chain: &ChainReport, cfg: &ReproConfig) {
    let t = Instant::now();
    let Some(l2) = chain.levels.get(1) else {
        rec.skip("05c-conjugacy", "the three [3,3] kernels of G2 are conjugate", "witnesses", "G2", true);
        return;
    };
    let threes: Vec<RecordId> =
        l2.kernels.iter().copied().filter(|&k| tower.get(k).invariants.is_elementary_33()).collect();
    let inner = conjugacy_witness_search(tower, &threes, Some(l2.record), cfg.conjugacy_budget);
    let outer = conjugacy_witness_search(tower, &threes, tower.get(l2.record).parent, cfg.conjugacy_budget);
    let inner_note = if inner.iter().all(|(_, o)| matches!(o, ConjugacyOutcome::Impossible(_))) {
        "not conjugate inside G2 (distinct normal subgroups)"
    } else {
        "inside G2: undecided"
    };
    let found = outer.iter().all(|(_, o)| matches!(o, ConjugacyOutcome::Witness(_)));
    let g1 = tower.get(l2.record).parent;
    let witnesses: Vec<String> = outer
        .iter()
        .map(|((a, b), o)| {
            let what = match o {
                ConjugacyOutcome::Witness(w) => match g1 {
                    Some(g1) => tower.root().format_word(&tower.root_word(g1, w)),
                    None => tower.root().format_word(w),
                },
                ConjugacyOutcome::Impossible(why) => format!("impossible: {why}"),
                ConjugacyOutcome::Inconclusive { tried } => format!("none in {tried} candidates"),
            };
            format!("{}~{}: {what}", tower.get(*a).label, tower.get(*b).label)
        })
        .collect();
    let status = if found {
        Status::Match
    } else if outer.iter().any(|(_, o)| matches!(o, ConjugacyOutcome::Impossible(_))) {
        Status::Mismatch
    } else {
        Status::Inconclusive
    };
    rec.push(
        "05c-conjugacy",
        "the three [3,3] kernels of G2 are conjugate in G1",
        "witness for every pair",
        format!("{inner_note}; in G1: {}", witnesses.join("; ")),
        status,
        true,
        t,
    );
}

fn quotient_fingerprint(rec: &mut Recorder, tower: &Tower, g1: RecordId, o: &Order3Elements, cfg: &ReproConfig) {
    let t = Instant::now();
    let pres = tower.get(g1).presentation();
    let [a, b, c, _] = &o.words;
    let q = normal_closure_quotient(pres, &[a.mul(&b.inverse()), b.mul(&c.inverse())]);
    let abel = abelian_invariants(&q);
    let probes = cfg.probes();
    let fq = fingerprint_cached(tower.cache(), &q, &probes);
    let ft = fingerprint_cached(tower.cache(), &cfg.triangle_prime, &probes);
    let diffs = fq.differences(&ft);
    let ok = diffs.is_empty() && fq.agrees_with(&ft) && abel.is_elementary_33();
    let computed = if diffs.is_empty() {
        format!("Abel(Q) = {abel}; agree on all {} probes", probes.len())
    } else {
        let first: Vec<String> =
            diffs.iter().take(3).map(|(x, y)| format!("{}: {}/{} vs {}/{}", x.probe, x.homs, x.epis, y.homs, y.epis)).collect();
        format!("Abel(Q) = {abel}; {} probes differ: {}", diffs.len(), first.join(", "))
    };
    rec.push("09-q-fingerprint", "Q agrees with T' on every probe (evidence, not an isomorphism)", "identical counts; [3,3]", computed, Status::of(ok), true, t);
}

fn fingerprint_cached(cache: Option<&ArtifactCache>, pres: &Presentation, probes: &[FiniteGroup]) -> FingerprintReport {
    let names: Vec<&str> = probes.iter().map(|p| p.name()).collect();
    cached(cache, "fingerprint", &[&pres.content_hash(), &names.join(",")], || fingerprint(pres, probes))
}

fn tietze_stage(rec: &mut Recorder, tower: &Tower) {
    let t = Instant::now();
    let simplified: Vec<_> = tower.records().iter().filter(|r| r.tietze.is_some()).collect();
    let bad: Vec<String> = simplified
        .iter()
        .filter(|r| !r.tietze_invariant())
        .map(|r| format!("{}: {} -> {}", r.label, r.raw_invariants, r.invariants))
        .collect();
    let computed = if bad.is_empty() {
        format!("{} simplifications, invariants unchanged", simplified.len())
    } else {
        bad.join("; ")
    };
    rec.push("09b-tietze-invariance", "Tietze moves preserve abelian invariants", "unchanged", computed, Status::of(bad.is_empty()), true, t);
}

fn triangle_stage(rec: &mut Recorder, cfg: &ReproConfig) {
    let t = Instant::now();
    let mut tower = Tower::new(cfg.triangle.clone());
    let Ok(kernels) = prime_index_normal_subgroups(&mut tower, None, 3) else {
        rec.skip("11-triangle-pattern", "index-3 normal subgroups of T", "[0,0],[3,3],[3,3],[3,3]", "kernels", true);
        return;
    };
    let pattern: Vec<AbelianInvariants> = kernels.iter().map(|&k| tower.get(k).invariants.clone()).collect();
    let ok = same_multiset(&pattern, &brackets(&["[0,0]", "[3,3]", "[3,3]", "[3,3]"]));
    rec.push(
        "11-triangle-pattern",
        "index-3 normal subgroups of T",
        "[0,0],[3,3],[3,3],[3,3]",
        invariant_strings(&tower, &kernels).join(","),
        Status::of(ok),
        true,
        t,
    );

    // an index-3 subgroup of T mapping onto T; the [3,3] kernels are the candidates
    let t = Instant::now();
    let mut found = Vec::new();
    for &k in &kernels {
        tower.simplify(k, &cfg.tietze);
        let r = tower.get(k);
        let verdict = match find_epi_to_triangle(r.presentation(), cfg.epi_budget) {
            EpiSearch::Found(h) => format!("{} {}: onto T", r.label, r.invariants).to_owned() + if surjectivity_check(&h) { "" } else { "?" },
            EpiSearch::Inconclusive { candidates_tried } => {
                format!("{} {}: inconclusive after {candidates_tried}", r.label, r.invariants)
            }
        };
        found.push(verdict);
    }
    let any = found.iter().any(|v| v.ends_with("onto T"));
    rec.push(
        "11b-triangle-self-map",
        "some index-3 normal subgroup of T maps onto T",
        "an epimorphism",
        found.join("; "),
        if any { Status::Match } else { Status::Inconclusive },
        false,
        t,
    );

    let t = Instant::now();
    let ab = abelian_invariants(&cfg.triangle_prime);
    let m = exponent_matrix(&cfg.triangle_prime);
    rec.push(
        "11c-triangle-prime-abel",
        "abelian invariants of T'",
        "[3,3]",
        format!("{ab} from a {}x{} relation matrix", m.nrows(), m.ncols()),
        Status::of(ab.is_elementary_33()),
        false,
        t,
    );
}

fn level_entries(
    tower: &Tower,
    chain: &ChainReport,
    certs: &BTreeMap<RecordId, GenerationCertificate>,
    from_root: &BTreeMap<RecordId, bool>,
    required_depth: usize,
) -> Vec<LevelEntry> {
    let pattern = tower_pattern();
    chain
        .levels
        .iter()
        .map(|l| {
            let r = tower.get(l.record);
            let cert = certs.get(&l.record);
            LevelEntry {
                level: l.level,
                label: r.label.clone(),
                index_in_root: r.index_in_root,
                generators: r.presentation().ngens(),
                relators: r.presentation().relators().len(),
                total_length: r.presentation().total_length(),
                abelian_invariants: r.invariants.to_string(),
                kernels: l
                    .kernels
                    .iter()
                    .map(|&k| {
                        let kr = tower.get(k);
                        KernelEntry {
                            label: kr.label.clone(),
                            invariants: kr.invariants.to_string(),
                            images: kr.epi.as_ref().map(|e| e.images.clone()).unwrap_or_default(),
                            index_in_root: kr.index_in_root,
                        }
                    })
                    .collect(),
                kernel_multiset: {
                    let mut v: Vec<String> = l.pattern.iter().map(|p| p.to_string()).collect();
                    v.sort();
                    v
                },
                pattern_matches: (l.level > 1).then(|| same_multiset(&l.pattern, &pattern)),
                h_contained_in_previous: l.h_contained_in_previous,
                commutator_check: l.commutator.holds,
                commutator_detail: l.commutator.detail.clone(),
                order3_generation: cert.map(|c| c.holds),
                order3_method: cert.and_then(|c| c.method),
                order3_detail: cert.map(|c| c.detail.clone()),
                from_root_agrees: from_root.get(&l.record).copied(),
                selected: l.selected.map(|s| tower.get(s).label.clone()),
                required: l.level <= required_depth + 1,
                seconds: l.elapsed.as_secs_f64(),
            }
        })
        .collect()
}

/// Saves each chain record's presentation, generator sidecar and coset
/// table, plus the first level's relation matrix.
fn write_artifacts(tower: &Tower, chain: &ChainReport, dir: &Path) {
    let dir = dir.join("artifacts");
    if std::fs::create_dir_all(&dir).is_err() {
        return;
    }
    for l in &chain.levels {
        let r = tower.get(l.record);
        let parent = tower.presentation_of(r.parent);
        let _ = std::fs::write(dir.join(format!("{}.pres", r.label)), r.presentation().to_pres_string());
        let _ = std::fs::write(dir.join(format!("{}.sidecar", r.label)), r.sub.sidecar_string());
        let _ = std::fs::write(dir.join(format!("{}.table", r.label)), r.sub.table.to_text(parent));
    }
    if let Some(first) = chain.levels.first() {
        let r = tower.get(first.record);
        let m = crate::rewrite::rs_exponent_matrix(tower.root(), &r.sub.table);
        let _ = std::fs::write(dir.join(format!("{}-relations.mtx", r.label)), m.to_market_string());
    }
}

/// Descends the chain alone, without the other experiments.
pub fn run_chain(cfg: &ReproConfig, depth: usize) -> Result<ChainReportFile, String> {
    let cache = cfg.cache_dir.as_ref().and_then(|d| ArtifactCache::new(d).ok()).or_else(ArtifactCache::from_env);
    let mut tower = Tower::new(cfg.gamma_bar.clone()).with_cache(cache);
    let g1 = tower.add_subgroup(None, "G1", &cfg.g1_generators, &cfg.limits, &cfg.tietze).map_err(|e| e.to_string())?;
    let abcd = find_triangle_map(&tower, g1, cfg).ok_or("no epimorphism onto T within budget")?;
    let selector = ChainSelector {
        first: cfg.g1_generators.first().cloned().into_iter().collect(),
        later: abcd.root_words[..3].to_vec(),
    };
    let budget = ChainBudget {
        limits: cfg.limits,
        tietze: cfg.tietze.clone(),
        time_limit: cfg.stretch_time_limit,
        min_levels: depth.min(cfg.required_depth + 1),
    };
    let chain = descend_chain(&mut tower, g1, depth, &selector, &budget);
    if let Some(dir) = &cfg.out_dir {
        write_artifacts(&tower, &chain, dir);
    }
    Ok(ChainReportFile {
        schema: CHAIN_SCHEMA.into(),
        root: cfg.gamma_bar.to_bracket_string(),
        required_depth: cfg.required_depth,
        levels: level_entries(&tower, &chain, &BTreeMap::new(), &BTreeMap::new(), cfg.required_depth),
        stopped: chain.stopped,
    })
}
