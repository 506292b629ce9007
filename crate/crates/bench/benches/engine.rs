use criterion::{black_box, criterion_group, criterion_main, Criterion};
use fptower::abelian::invariants_of_matrix;
use fptower::coset::{todd_coxeter, EnumerationLimits};
use fptower::finite::small_groups;
use fptower::fingerprint::fingerprint;
use fptower::quotient::{prime_index_normal_subgroups, Tower};
use fptower::repro::ReproConfig;
use fptower::rewrite::{reidemeister_schreier, rs_exponent_matrix, tietze_simplify, TietzeBudget};
use fptower::smith_normal_form;
use fptower::surface::check_tower;
use fptower_bench::{lcg_matrix, tower_root};

fn enumeration(c: &mut Criterion) {
    let (root, gens) = tower_root();
    let hlt = EnumerationLimits::with_max(100_000);
    let felsch = EnumerationLimits::felsch(100_000);
    c.bench_function("todd_coxeter G1 hlt", |b| b.iter(|| todd_coxeter(&root, black_box(&gens), &hlt).unwrap()));
    c.bench_function("todd_coxeter G1 felsch", |b| b.iter(|| todd_coxeter(&root, black_box(&gens), &felsch).unwrap()));
}

fn rewriting(c: &mut Criterion) {
    let (root, gens) = tower_root();
    let table = todd_coxeter(&root, &gens, &EnumerationLimits::default()).unwrap();
    c.bench_function("reidemeister_schreier G1", |b| b.iter(|| reidemeister_schreier(&root, black_box(&table))));
    c.bench_function("abelian invariants G1 via RS matrix", |b| {
        b.iter(|| invariants_of_matrix(&rs_exponent_matrix(&root, black_box(&table))))
    });
    let sp = reidemeister_schreier(&root, &table);
    let mut group = c.benchmark_group("slow");
    group.sample_size(10);
    group.bench_function("tietze G1", |b| b.iter(|| tietze_simplify(black_box(&sp), &TietzeBudget::default())));
    group.bench_function("index-3 kernels of G1", |b| {
        b.iter(|| {
            let mut tower = Tower::new(root.clone());
            let g1 = tower.add_subgroup(None, "G1", &gens, &EnumerationLimits::default(), &TietzeBudget::default()).unwrap();
            prime_index_normal_subgroups(&mut tower, Some(g1), 3).unwrap()
        })
    });
    group.finish();
}

fn linear_algebra(c: &mut Criterion) {
    let m = lcg_matrix(40, 40, 1);
    c.bench_function("smith_normal_form 40x40 with transforms", |b| b.iter(|| smith_normal_form(black_box(&m), true)));
    c.bench_function("smith_normal_form 40x40 diagonal only", |b| b.iter(|| smith_normal_form(black_box(&m), false)));
}

fn quotients(c: &mut Criterion) {
    let cfg = ReproConfig::default();
    let probes = small_groups(24);
    c.bench_function("fingerprint T' up to order 24", |b| b.iter(|| fingerprint(black_box(&cfg.triangle_prime), &probes)));
    c.bench_function("tower identities to 40 levels", |b| b.iter(|| check_tower(black_box(40))));
}

criterion_group!(benches, enumeration, rewriting, linear_algebra, quotients);
criterion_main!(benches);
