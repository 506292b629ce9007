//! End-to-end checks on the first two levels of the tower and on the
//! reproduction plumbing. Deep levels are covered by the acceptance run.

use std::time::Duration;

use fptower::cache::ArtifactCache;
use fptower::coset::{todd_coxeter, EnumerationLimits};
use fptower::quotient::{
    descend_chain, prime_index_normal_subgroups, same_multiset, tower_pattern, ChainBudget, ChainSelector, Tower,
};
use fptower::repro::{run_chain, run_repro, ChainReportFile, OutputFormat, ReproConfig, Status, CHAIN_SCHEMA};
use fptower::rewrite::{parse_sidecar, TietzeBudget};
use fptower::{parse_pres_file, AbelianInvariants, CosetTable};

fn brackets(list: &[&str]) -> Vec<AbelianInvariants> {
    list.iter().map(|s| AbelianInvariants::from_brackets(s).unwrap()).collect()
}

fn temp_dir(name: &str) -> std::path::PathBuf {
    let dir = std::env::temp_dir().join(format!("fptower-{name}-{}", std::process::id()));
    let _ = std::fs::remove_dir_all(&dir);
    dir
}

#[test]
fn first_two_levels() {
    let cfg = ReproConfig::default();
    let mut tower = Tower::new(cfg.gamma_bar.clone());
    let g1 = tower.add_subgroup(None, "G1", &cfg.g1_generators, &cfg.limits, &cfg.tietze).unwrap();
    assert_eq!(tower.get(g1).index_in_parent(), 288);
    assert!(tower.get(g1).invariants.is_elementary_33());

    let selector = ChainSelector { first: cfg.g1_generators[..1].to_vec(), later: Vec::new() };
    let chain = descend_chain(&mut tower, g1, 1, &selector, &ChainBudget::default());
    assert_eq!(chain.levels.len(), 2);
    let [l1, l2] = &chain.levels[..] else { unreachable!() };
    assert!(same_multiset(&l1.pattern, &brackets(&["[0,0]", "[3,21]", "[3,3]", "[3,3]"])));
    assert!(same_multiset(&l2.pattern, &tower_pattern()));
    assert_eq!(l2.h_contained_in_previous, Some(true));
    assert!(l1.commutator.holds && l2.commutator.holds);
    assert_eq!(tower.get(l2.record).index_in_root, 864);
    assert!(tower.contains(l2.record, &cfg.g1_generators[0]));
    for &k in &l2.kernels {
        assert_eq!(tower.get(k).index_in_root, 2592);
    }
}

#[test]
fn triangle_group_kernels() {
    let cfg = ReproConfig::default();
    let mut tower = Tower::new(cfg.triangle.clone());
    let kernels = prime_index_normal_subgroups(&mut tower, None, 3).unwrap();
    let pattern: Vec<AbelianInvariants> = kernels.iter().map(|&k| tower.get(k).invariants.clone()).collect();
    assert!(same_multiset(&pattern, &brackets(&["[0,0]", "[3,3]", "[3,3]", "[3,3]"])));
    // the translation subgroup comes first in kernel order
    assert_eq!(tower.get(kernels[0]).invariants.to_string(), "[0,0]");
}

#[test]
fn triangle_group_is_infinite() {
    let cfg = ReproConfig::default();
    let err = todd_coxeter(&cfg.triangle, &[], &EnumerationLimits::with_max(5_000)).unwrap_err();
    assert!(err.to_string().contains("5000"));
}

#[test]
fn forced_limit_makes_the_run_inconclusive() {
    let cfg = ReproConfig { limits: EnumerationLimits::with_max(100), tower_levels: 5, ..ReproConfig::default() };
    let report = run_repro(&cfg);
    assert_eq!(report.get("01-index").unwrap().status, Status::Inconclusive);
    assert_ne!(report.exit_code(), 0);
    assert_eq!(report.get("12-tower-identities").unwrap().status, Status::Match);
    assert_eq!(report.get("11-triangle-pattern").unwrap().status, Status::Match);
    assert!(report.render(OutputFormat::Md).contains("| 01-index |"));
    let csv = report.render(OutputFormat::Csv);
    assert!(csv.lines().next().unwrap().starts_with("id,status"));
}

#[test]
fn config_validation() {
    let mut cfg = ReproConfig::default();
    assert!(cfg.validate().is_ok());
    cfg.required_depth = 5;
    cfg.stretch_depth = 4;
    assert!(cfg.validate().is_err());
    assert!("yaml".parse::<OutputFormat>().is_err());
    assert_eq!("json".parse::<OutputFormat>(), Ok(OutputFormat::Json));
}

#[test]
fn chain_report_and_artifacts() {
    let out = temp_dir("chain");
    let cache = temp_dir("cache");
    let cfg = ReproConfig {
        out_dir: Some(out.clone()),
        cache_dir: Some(cache.clone()),
        stretch_time_limit: Duration::from_secs(600),
        ..ReproConfig::default()
    };
    let report = run_chain(&cfg, 1).unwrap();
    assert_eq!(report.schema, CHAIN_SCHEMA);
    assert_eq!(report.levels.len(), 2);
    assert_eq!(report.levels[1].label, "G2");
    assert_eq!(report.levels[1].kernel_multiset, ["[3,3]", "[3,3]", "[3,3]", "[7,0,0]"]);
    assert_eq!(report.levels[1].pattern_matches, Some(true));
    let back = ChainReportFile::from_json(&report.to_json()).unwrap();
    assert_eq!(back.to_json(), report.to_json());
    assert!(ChainReportFile::from_json(&report.to_json().replace(CHAIN_SCHEMA, "other/1")).is_err());

    // saved presentation, sidecar and table read back consistently
    let dir = out.join("artifacts");
    let root = &cfg.gamma_bar;
    let g1 = parse_pres_file(&std::fs::read_to_string(dir.join("G1.pres")).unwrap()).unwrap();
    assert!(g1.ngens() >= 2);
    let table = CosetTable::from_text(&std::fs::read_to_string(dir.join("G1.table")).unwrap(), root).unwrap();
    assert_eq!(table.index(), 288);
    let sidecar = parse_sidecar(&std::fs::read_to_string(dir.join("G1.sidecar")).unwrap(), root).unwrap();
    assert_eq!(sidecar.len(), g1.ngens());
    assert!(sidecar.iter().all(|(_, w)| table.contains(w)));
    let m = fptower::IntMatrix::from_market_str(&std::fs::read_to_string(dir.join("G1-relations.mtx")).unwrap()).unwrap();
    assert_eq!(m.ncols(), 289);

    // the cached rerun reproduces the report apart from timings
    let cached = run_chain(&cfg, 1).unwrap();
    assert_eq!(strip_seconds(&cached), strip_seconds(&report));
    assert!(ArtifactCache::new(&cache).unwrap().dir().read_dir().unwrap().count() > 0);
    let _ = std::fs::remove_dir_all(out);
    let _ = std::fs::remove_dir_all(cache);
}

fn strip_seconds(r: &ChainReportFile) -> String {
    let mut r = r.clone();
    for l in &mut r.levels {
        l.seconds = 0.0;
    }
    r.to_json()
}

#[test]
fn tietze_budget_keeps_the_group() {
    let cfg = ReproConfig::default();
    let tight = TietzeBudget { max_passes: 1, ..TietzeBudget::default() };
    let mut tower = Tower::new(cfg.gamma_bar.clone());
    let g1 = tower.add_subgroup(None, "G1", &cfg.g1_generators, &cfg.limits, &tight).unwrap();
    assert!(tower.get(g1).tietze_invariant());
}
