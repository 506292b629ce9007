//! `fptower`: command-line access to coset enumeration, abelian invariants,
//! index-3 normal subgroups, the subgroup chain, fingerprints, the surface
//! tower table and the full reproduction run.

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use fptower::cache::{ArtifactCache, CACHE_ENV};
use fptower::coset::{todd_coxeter, EnumerationLimits, Strategy};
use fptower::error::EnumerationError;
use fptower::finite::{default_probes, small_groups};
use fptower::fingerprint::fingerprint;
use fptower::quotient::{prime_index_normal_subgroups, Tower};
use fptower::repro::{run_chain, run_repro, OutputFormat, ReproConfig};
use fptower::rewrite::rs_exponent_matrix;
use fptower::surface::{check_tower, TowerRow};
use fptower::{abelian_invariants, parse_any, parse_word_list, Presentation, Word};

/// Exit status when a coset enumeration hits its limit.
const EXIT_LIMIT: u8 = 2;
const EXIT_USAGE: u8 = 64;

#[derive(Parser)]
#[command(name = "fptower", version, about = "Finitely presented group tower computations")]
struct Cli {
    #[command(flatten)]
    global: Global,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Global {
    /// Maximum number of live cosets in any enumeration.
    #[arg(long, global = true, default_value_t = 2_000_000)]
    limit: usize,
    /// Candidate budget for epimorphism and conjugacy searches.
    #[arg(long, global = true, default_value_t = 100_000)]
    budget: usize,
    /// Directory for reports and artifacts.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Output format: md, json or csv.
    #[arg(long, global = true, default_value = "md")]
    format: OutputFormat,
    /// Artifact cache directory.
    #[arg(long, global = true, env = CACHE_ENV)]
    cache: Option<PathBuf>,
    /// Use Felsch (definition-first) enumeration instead of HLT.
    #[arg(long, global = true)]
    felsch: bool,
}

impl Global {
    fn limits(&self) -> EnumerationLimits {
        let strategy = if self.felsch { Strategy::Felsch } else { Strategy::Hlt };
        EnumerationLimits { strategy, ..EnumerationLimits::with_max(self.limit) }
    }
}

#[derive(Args)]
struct Input {
    /// Presentation file (`gens:`/`rel:` lines or `<a,b | ...>`). `abel` also
    /// accepts a chain label such as `G2` or `H1`.
    pres: PathBuf,
    /// Subgroup generators, comma separated, in the presentation's alphabet.
    #[arg(long, conflicts_with = "subgroup_file")]
    subgroup: Option<String>,
    /// File of subgroup generators, one per line.
    #[arg(long)]
    subgroup_file: Option<PathBuf>,
}

#[derive(Subcommand)]
enum Command {
    /// Enumerate the cosets of a subgroup and print the index.
    Enum {
        #[command(flatten)]
        input: Input,
        /// Write the coset table to this file.
        #[arg(long)]
        save: Option<PathBuf>,
    },
    /// Abelian invariants of the group or of a finite-index subgroup.
    Abel {
        #[command(flatten)]
        input: Input,
    },
    /// Index-3 normal subgroups with their abelian invariants.
    Normal3 {
        #[command(flatten)]
        input: Input,
    },
    /// Descend the chain of index-3 subgroups from the first tower group.
    Chain {
        #[arg(long, default_value_t = 3)]
        depth: usize,
    },
    /// Homomorphism and epimorphism counts into small finite groups.
    Fingerprint {
        pres: PathBuf,
        /// Probe all groups up to this order instead of the default battery.
        #[arg(long)]
        max_order: Option<usize>,
    },
    /// Invariants of the surface tower.
    Tower {
        #[arg(long, default_value_t = 10)]
        levels: u32,
    },
    /// Run every experiment and report the verdicts.
    Repro {
        /// Levels past this depth are attempted but not required.
        #[arg(long, default_value_t = 9)]
        stretch_depth: usize,
        #[arg(long, default_value_t = 300)]
        stretch_seconds: u64,
    },
}

struct Failure {
    code: u8,
    message: String,
}

impl<E: std::fmt::Display> From<E> for Failure {
    fn from(e: E) -> Self {
        Failure { code: 1, message: e.to_string() }
    }
}

fn main() -> ExitCode {
    env_logger::init();
    let cli = Cli::parse();
    match run(&cli) {
        Ok(code) => ExitCode::from(code),
        Err(f) => {
            eprintln!("fptower: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}

fn run(cli: &Cli) -> Result<u8, Failure> {
    let g = &cli.global;
    match &cli.command {
        Command::Enum { input, save } => {
            let (pres, gens) = load(input)?;
            let table = todd_coxeter(&pres, &gens, &g.limits()).map_err(limit_failure)?;
            if let Some(path) = save {
                std::fs::write(path, table.to_text(&pres))?;
            }
            emit(g, &format!("index {}\n", table.index()), &serde_json::json!({ "index": table.index() }).to_string(), &format!("index\n{}\n", table.index()))?;
        }
        Command::Abel { input } => {
            if let Some((label, inv)) = chain_label(g, &input.pres)? {
                let json = serde_json::json!({ "label": label, "invariants": inv }).to_string();
                emit(g, &format!("{inv}\n"), &json, &format!("label,invariants\n{label},\"{inv}\"\n"))?;
                return Ok(0);
            }
            let (pres, gens) = load(input)?;
            let (inv, index) = if input.subgroup.is_none() && input.subgroup_file.is_none() {
                (abelian_invariants(&pres), None)
            } else {
                let table = todd_coxeter(&pres, &gens, &g.limits()).map_err(limit_failure)?;
                let m = rs_exponent_matrix(&pres, &table);
                (fptower::abelian::invariants_of_matrix(&m), Some(table.index()))
            };
            let md = match index {
                Some(i) => format!("{inv} (index {i})\n"),
                None => format!("{inv}\n"),
            };
            let json = serde_json::json!({ "invariants": inv.to_string(), "index": index }).to_string();
            emit(g, &md, &json, &format!("invariants,index\n\"{inv}\",{}\n", index.map(|i| i.to_string()).unwrap_or_default()))?;
        }
        Command::Normal3 { input } => {
            let (pres, gens) = load(input)?;
            let mut tower = Tower::new(pres).with_cache(cache(g));
            let at = if gens.is_empty() {
                None
            } else {
                Some(tower.add_subgroup(None, "H", &gens, &g.limits(), &Default::default()).map_err(limit_failure)?)
            };
            let kernels = prime_index_normal_subgroups(&mut tower, at, 3)?;
            let mut md = String::from("| kernel | images | invariants |\n|---|---|---|\n");
            let mut csv = String::from("kernel,images,invariants\n");
            let mut rows = Vec::new();
            for k in kernels {
                let r = tower.get(k);
                let images = r.epi.as_ref().map(|e| e.images.clone()).unwrap_or_default();
                md.push_str(&format!("| {} | {:?} | {} |\n", r.label, images, r.invariants));
                csv.push_str(&format!("{},\"{:?}\",\"{}\"\n", r.label, images, r.invariants));
                rows.push(serde_json::json!({ "label": r.label, "images": images, "invariants": r.invariants.to_string() }));
            }
            emit(g, &md, &serde_json::to_string_pretty(&rows)?, &csv)?;
        }
        Command::Chain { depth } => {
            let cfg = config(g, *depth.max(&3), std::time::Duration::MAX);
            let report = run_chain(&cfg, *depth)?;
            let mut md = String::from("| level | group | index | invariants | kernels | H contained | commutator | seconds |\n|---|---|---|---|---|---|---|---|\n");
            let mut csv = String::from("level,group,index,invariants,kernels,h_contained,commutator,seconds\n");
            for l in &report.levels {
                let kernels = l.kernel_multiset.join(" ");
                md.push_str(&format!(
                    "| {} | {} | {} | {} | {} | {:?} | {} | {:.2} |\n",
                    l.level, l.label, l.index_in_root, l.abelian_invariants, kernels, l.h_contained_in_previous, l.commutator_check, l.seconds
                ));
                csv.push_str(&format!(
                    "{},{},{},\"{}\",\"{}\",{:?},{},{:.3}\n",
                    l.level, l.label, l.index_in_root, l.abelian_invariants, kernels, l.h_contained_in_previous, l.commutator_check, l.seconds
                ));
            }
            if let Some(why) = &report.stopped {
                md.push_str(&format!("\nstopped: {why}\n"));
            }
            if let Some(dir) = &g.out {
                std::fs::create_dir_all(dir)?;
                std::fs::write(dir.join("chain-report.json"), report.to_json())?;
            }
            emit(g, &md, &report.to_json(), &csv)?;
        }
        Command::Fingerprint { pres, max_order } => {
            let pres = read_pres(pres)?;
            let probes = match max_order {
                Some(n) => small_groups(*n),
                None => default_probes(),
            };
            let report = fingerprint(&pres, &probes);
            let mut md = String::from("| probe | order | homs | epis |\n|---|---|---|---|\n");
            let mut csv = String::from("probe,order,homs,epis\n");
            for e in &report.entries {
                md.push_str(&format!("| {} | {} | {} | {} |\n", e.probe, e.order, e.homs, e.epis));
                csv.push_str(&format!("\"{}\",{},{},{}\n", e.probe, e.order, e.homs, e.epis));
            }
            emit(g, &md, &serde_json::to_string_pretty(&report)?, &csv)?;
        }
        Command::Tower { levels } => {
            if *levels == 0 {
                return Err(Failure { code: EXIT_USAGE, message: "--levels must be at least 1".into() });
            }
            let check = check_tower(*levels);
            let (md, json, csv) = tower_table(&check.rows);
            emit(g, &md, &json, &csv)?;
            if !check.passed() {
                return Err(Failure { code: 3, message: check.failures.join("; ") });
            }
        }
        Command::Repro { stretch_depth, stretch_seconds } => {
            let cfg = config(g, *stretch_depth, std::time::Duration::from_secs(*stretch_seconds));
            cfg.validate().map_err(|m| Failure { code: EXIT_USAGE, message: m })?;
            let report = run_repro(&cfg);
            if let Some(dir) = &g.out {
                report.write_to(dir)?;
            }
            print!("{}", report.render(g.format));
            return Ok(report.exit_code() as u8);
        }
    }
    Ok(0)
}

/// Resolves `G<n>` or `H<n>` to the abelian invariants of that chain
/// member, when no file of that name exists.
fn chain_label(g: &Global, arg: &Path) -> Result<Option<(String, String)>, Failure> {
    let label = arg.to_string_lossy();
    if arg.exists() || label.len() < 2 || !(label.starts_with('G') || label.starts_with('H')) {
        return Ok(None);
    }
    let Ok(n) = label[1..].parse::<usize>() else { return Ok(None) };
    if n == 0 {
        return Err(Failure { code: EXIT_USAGE, message: format!("no chain member {label}") });
    }
    let report = run_chain(&config(g, n, std::time::Duration::MAX), n - 1)?;
    let found = report.levels.iter().find_map(|l| {
        if l.label == label {
            return Some(l.abelian_invariants.clone());
        }
        l.kernels.iter().find(|k| k.label == label).map(|k| k.invariants.clone())
    });
    match found {
        Some(inv) => Ok(Some((label.into_owned(), inv))),
        None => Err(Failure { code: 1, message: format!("chain stopped before {label}") }),
    }
}

fn config(g: &Global, stretch_depth: usize, stretch: std::time::Duration) -> ReproConfig {
    let mut cfg = ReproConfig::default();
    cfg.limits = g.limits();
    cfg.epi_budget = g.budget;
    cfg.conjugator_budget = g.budget;
    cfg.stretch_depth = stretch_depth;
    cfg.stretch_time_limit = stretch;
    cfg.out_dir = g.out.clone();
    cfg.cache_dir = g.cache.clone();
    cfg
}

fn cache(g: &Global) -> Option<ArtifactCache> {
    g.cache.as_ref().and_then(|d| ArtifactCache::new(d).ok())
}

fn limit_failure(e: EnumerationError) -> Failure {
    Failure { code: EXIT_LIMIT, message: e.to_string() }
}

fn read_pres(path: &Path) -> Result<Presentation, Failure> {
    let text = std::fs::read_to_string(path).map_err(|e| Failure::from(format!("{}: {e}", path.display())))?;
    Ok(parse_any(&text)?)
}

fn load(input: &Input) -> Result<(Presentation, Vec<Word>), Failure> {
    let pres = read_pres(&input.pres)?;
    let text = match (&input.subgroup, &input.subgroup_file) {
        (Some(s), _) => s.clone(),
        (None, Some(p)) => std::fs::read_to_string(p)?,
        (None, None) => String::new(),
    };
    let gens = parse_word_list(&text, pres.names())?;
    Ok((pres, gens))
}

/// Prints the rendering selected by `--format`.
fn emit(g: &Global, md: &str, json: &str, csv: &str) -> Result<(), Failure> {
    let text = match g.format {
        OutputFormat::Md => md,
        OutputFormat::Json => json,
        OutputFormat::Csv => csv,
    };
    print!("{text}");
    if !text.ends_with('\n') {
        println!();
    }
    Ok(())
}

fn tower_table(rows: &[TowerRow]) -> (String, String, String) {
    let mut md = String::from("| n | K^2(X~) | chi(X~) | K^2/chi | 9 - K^2/chi | K^2(S) | chi(S) | c2(S) |\n|---|---|---|---|---|---|---|---|\n");
    let mut csv = String::from("n,k2_resolved,chi_resolved,ratio,gap,k2_smooth,chi_smooth,c2_smooth\n");
    let mut json = Vec::new();
    for r in rows {
        let gap = num_rational::BigRational::from_integer(9.into()) - &r.ratio;
        md.push_str(&format!(
            "| {} | {} | {} | {} | {} | {} | {} | {} |\n",
            r.level, r.resolved.k2, r.resolved.chi, r.ratio, gap, r.smooth.k2, r.smooth.chi, r.smooth.c2()
        ));
        csv.push_str(&format!(
            "{},{},{},{},{},{},{},{}\n",
            r.level, r.resolved.k2, r.resolved.chi, r.ratio, gap, r.smooth.k2, r.smooth.chi, r.smooth.c2()
        ));
        json.push(serde_json::json!({
            "level": r.level,
            "resolved": { "k2": r.resolved.k2.to_string(), "chi": r.resolved.chi.to_string() },
            "smooth": { "k2": r.smooth.k2.to_string(), "chi": r.smooth.chi.to_string(), "c2": r.smooth.c2().to_string() },
            "ratio": r.ratio.to_string(),
            "gap": gap.to_string(),
            "residual": r.residual.to_string(),
        }));
    }
    (md, serde_json::to_string_pretty(&json).expect("json"), csv)
}
