//! Acceptance run: one PASS or FAIL line per criterion, exit status 1 if any
//! criterion fails. Runs without the libtest harness so the lines print in
//! order.

mod common;

use std::time::{Duration, Instant};

use fptower::coset::todd_coxeter;
use fptower::eisenstein::{find_epi_to_triangle, surjectivity_check, EpiSearch};
use fptower::quotient::{prime_index_normal_subgroups, Tower};
use fptower::repro::{run_repro, ReproConfig, ReproReport, Status};
use fptower::rewrite::TietzeBudget;
use fptower::surface::check_tower;
use fptower::AbelianInvariants;

struct Verdict {
    pass: bool,
    detail: String,
}

fn matched(report: &ReproReport, ids: &[&str]) -> Verdict {
    let mut detail = Vec::new();
    let mut pass = true;
    for id in ids {
        match report.get(id) {
            Some(e) => {
                pass &= e.status == Status::Match;
                detail.push(format!("{id}: {} ({:?})", e.computed, e.status));
            }
            None => {
                pass = false;
                detail.push(format!("{id}: missing"));
            }
        }
    }
    Verdict { pass, detail: detail.join(" | ") }
}

fn with_ids_prefixed(report: &ReproReport, prefix: &str) -> Vec<String> {
    report.experiments.iter().filter(|e| e.required && e.id.starts_with(prefix)).map(|e| e.id.clone()).collect()
}

fn index_criterion(cfg: &ReproConfig) -> Verdict {
    let t = Instant::now();
    match todd_coxeter(&cfg.gamma_bar, &cfg.g1_generators, &cfg.limits) {
        Ok(table) => {
            let secs = t.elapsed().as_secs_f64();
            Verdict { pass: table.index() == 288 && secs < 60.0, detail: format!("index {} in {secs:.2}s", table.index()) }
        }
        Err(e) => Verdict { pass: false, detail: e.to_string() },
    }
}

/// The [0,0] kernel of T, simplified, must map onto T.
fn triangle_criterion(cfg: &ReproConfig) -> Verdict {
    let mut tower = Tower::new(cfg.triangle.clone());
    let kernels = match prime_index_normal_subgroups(&mut tower, None, 3) {
        Ok(k) => k,
        Err(e) => return Verdict { pass: false, detail: e.to_string() },
    };
    let mut pattern: Vec<String> = kernels.iter().map(|&k| tower.get(k).invariants.to_string()).collect();
    pattern.sort();
    let pattern_ok = pattern == ["[0,0]", "[3,3]", "[3,3]", "[3,3]"];
    let free = AbelianInvariants::from_brackets("[0,0]").unwrap();
    let Some(&h) = kernels.iter().find(|&&k| tower.get(k).invariants == free) else {
        return Verdict { pass: false, detail: format!("no [0,0] kernel in {pattern:?}") };
    };
    tower.simplify(h, &TietzeBudget::default());
    let epi = match find_epi_to_triangle(tower.get(h).presentation(), cfg.epi_budget) {
        EpiSearch::Found(images) => surjectivity_check(&images),
        EpiSearch::Inconclusive { .. } => false,
    };
    Verdict {
        pass: pattern_ok && epi,
        detail: format!(
            "pattern {pattern:?}; [0,0] kernel has {} generators and {} relators; certified epimorphism onto T: {epi}",
            tower.get(h).presentation().ngens(),
            tower.get(h).presentation().relators().len()
        ),
    }
}

fn tower_criterion() -> Verdict {
    let t = Instant::now();
    let check = check_tower(40);
    let secs = t.elapsed().as_secs_f64();
    Verdict {
        pass: check.passed() && secs < 1.0,
        detail: if check.passed() { format!("40 levels exact in {secs:.3}s") } else { check.failures.join("; ") },
    }
}

fn property_criterion(report: &ReproReport) -> Verdict {
    let snf = common::snf_suite(1000, 7);
    let coset = common::coset_suite();
    let words = common::word_suite(10_000, 11);
    let tietze = matched(report, &["09b-tietze-invariance"]);
    let pass = snf.is_empty() && coset.is_empty() && words.is_empty() && tietze.pass;
    Verdict {
        pass,
        detail: format!(
            "SNF failures {}; coset failures {} over {} presentations; word failures {}; {}",
            snf.len(),
            coset.len(),
            common::oracle_cases().len(),
            words.len(),
            tietze.detail
        ),
    }
}

fn main() {
    let cfg = ReproConfig { stretch_depth: 3, stretch_time_limit: Duration::from_secs(600), ..ReproConfig::default() };
    let t = Instant::now();
    let report = run_repro(&cfg);
    eprintln!("reproduction run took {:.1}s", t.elapsed().as_secs_f64());

    let c2_secs = ["01-index", "02-abel-g1", "03-kernels-g1"].iter().filter_map(|id| report.timings.get(*id)).sum::<f64>();
    let mut c2 = matched(&report, &["02-abel-g1", "03-kernels-g1"]);
    c2.pass &= c2_secs < 300.0;

    let mut chain_ids: Vec<String> = with_ids_prefixed(&report, "06-");
    chain_ids.extend(with_ids_prefixed(&report, "07-"));
    let chain_refs: Vec<&str> = chain_ids.iter().map(String::as_str).collect();
    let mut c4 = matched(&report, &chain_refs);
    c4.pass &= report.chain.levels.len() > cfg.required_depth;

    let mut quotient_ids = with_ids_prefixed(&report, "10-");
    quotient_ids.push("09-q-fingerprint".into());
    let quotient_refs: Vec<&str> = quotient_ids.iter().map(String::as_str).collect();
    let mut c6 = matched(&report, &quotient_refs);
    c6.pass &= quotient_ids.len() > cfg.required_depth;

    let verdicts = [
        ("index of the first tower group", index_criterion(&cfg)),
        ("abelianizations of G1 and its index-3 kernels", c2),
        ("kernel pattern under G2 and containment in H1", matched(&report, &["04-select-g2", "05-pattern-g2"])),
        ("chain to the required depth with commutator checks", c4),
        ("triangle group kernels and an epimorphism from its [0,0] kernel", triangle_criterion(&cfg)),
        ("normal-closure quotients and the Q fingerprint", c6),
        ("certified epimorphism from G1 onto T", matched(&report, &["08-epi-triangle"])),
        ("surface tower identities", tower_criterion()),
        ("property suites", property_criterion(&report)),
    ];
    let mut failed = 0;
    for (i, (name, v)) in verdicts.iter().enumerate() {
        println!("criterion {}: {} {name}: {}", i + 1, if v.pass { "PASS" } else { "FAIL" }, v.detail);
        failed += usize::from(!v.pass);
    }
    println!("{} of {} criteria pass", verdicts.len() - failed, verdicts.len());
    if failed > 0 {
        std::process::exit(1);
    }
}
