//! Deterministic property suites shared by the property tests and the
//! acceptance runner. Each suite returns the list of failing cases.

#![allow(dead_code)]

use std::collections::{HashSet, VecDeque};

use fptower::coset::{todd_coxeter, EnumerationLimits};
use fptower::matrix::{smith_diagonal, smith_normal_form, IntMatrix};
use fptower::words::{commutator, conjugate, cyclic_reduce, free_reduce, is_freely_reduced, Letter};
use fptower::{Integer, Presentation, Word};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn random_matrix(rng: &mut ChaCha8Rng) -> IntMatrix {
    let rows = rng.gen_range(1..=6);
    let cols = rng.gen_range(1..=6);
    let bound = *[3i64, 10, 100].choose(rng).unwrap();
    let density = rng.gen_range(0.2..1.0);
    let mut m: Vec<Vec<i64>> = (0..rows)
        .map(|_| (0..cols).map(|_| if rng.gen_bool(density) { rng.gen_range(-bound..=bound) } else { 0 }).collect())
        .collect();
    // sometimes force a dependent row
    if rows >= 2 && rng.gen_bool(0.3) {
        let k = rng.gen_range(-3..=3);
        m[rows - 1] = m[0].iter().map(|x| x * k).collect();
    }
    IntMatrix::from_i64(&m)
}

fn square_det_is_unit(m: &IntMatrix) -> bool {
    m.nrows() == m.ncols() && m.determinant().is_unit()
}

fn permuted(m: &IntMatrix, rng: &mut ChaCha8Rng) -> IntMatrix {
    let dense = m.to_dense();
    let mut rows: Vec<usize> = (0..m.nrows()).collect();
    let mut cols: Vec<usize> = (0..m.ncols()).collect();
    rows.shuffle(rng);
    cols.shuffle(rng);
    let out: Vec<Vec<Integer>> = rows.iter().map(|&i| cols.iter().map(|&j| dense[i][j].clone()).collect()).collect();
    IntMatrix::from_dense_with_cols(&out, m.ncols())
}

/// `UAV = D`, unimodular `U` and `V`, a divisor chain on a non-negative
/// diagonal, agreement with the sparse route, invariance under row and
/// column permutations.
pub fn snf_suite(cases: usize, seed: u64) -> Vec<String> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut failures = Vec::new();
    for case in 0..cases {
        let a = random_matrix(&mut rng);
        let r = smith_normal_form(&a, true);
        let (u, v) = (r.u.clone().unwrap(), r.v.clone().unwrap());
        let mut why = Vec::new();
        if u.mul(&a).mul(&v) != r.d {
            why.push("UAV != D");
        }
        if !square_det_is_unit(&u) || !square_det_is_unit(&v) {
            why.push("transform not unimodular");
        }
        if !r.d.is_diagonal() {
            why.push("D not diagonal");
        }
        let diag = &r.diagonal;
        if diag.iter().any(|d| d.is_zero() || d.is_negative()) {
            why.push("non-positive invariant factor");
        }
        if diag.windows(2).any(|p| !p[1].is_divisible_by(&p[0])) {
            why.push("divisor chain broken");
        }
        if (0..a.nrows().min(a.ncols())).any(|i| i >= r.rank && !r.d.get(i, i).is_zero()) {
            why.push("non-zero entry past the rank");
        }
        if smith_diagonal(&a) != *diag {
            why.push("sparse and dense diagonals differ");
        }
        if smith_normal_form(&permuted(&a, &mut rng), false).diagonal != *diag {
            why.push("not permutation invariant");
        }
        if !why.is_empty() {
            failures.push(format!("matrix {case} {:?}: {}", a.to_dense(), why.join(", ")));
        }
    }
    failures
}

/// A presentation together with permutations satisfying its relators
/// that are known to give a faithful image.
pub struct OracleCase {
    pub name: String,
    pub pres: Presentation,
    pub perms: Vec<Vec<usize>>,
}

fn cycle(n: usize, shift: usize) -> Vec<usize> {
    (0..n).map(|i| (i + shift) % n).collect()
}

fn transposition(n: usize, a: usize, b: usize) -> Vec<usize> {
    let mut p: Vec<usize> = (0..n).collect();
    p.swap(a, b);
    p
}

fn from_cycles(n: usize, cycles: &[&[usize]]) -> Vec<usize> {
    let mut p: Vec<usize> = (0..n).collect();
    for c in cycles {
        for i in 0..c.len() {
            p[c[i]] = c[(i + 1) % c.len()];
        }
    }
    p
}

fn w(g: usize) -> Word {
    Word::generator(g)
}

/// Twenty finite presentations with faithful permutation models.
pub fn oracle_cases() -> Vec<OracleCase> {
    let mut out = Vec::new();
    for n in [1usize, 7, 12] {
        out.push(OracleCase {
            name: format!("C{n}"),
            pres: Presentation::with_rank("x", 1, [w(0).pow(n as i64)]),
            perms: vec![cycle(n, 1)],
        });
    }
    for n in 3..=10usize {
        let a: Vec<usize> = (0..n).map(|i| (n - i) % n).collect();
        let b: Vec<usize> = (0..n).map(|i| (n + 1 - i) % n).collect();
        out.push(OracleCase {
            name: format!("D{n}"),
            pres: Presentation::with_rank("r", 2, [w(0).pow(2), w(1).pow(2), w(0).mul(&w(1)).pow(n as i64)]),
            perms: vec![a, b],
        });
    }
    for (m, n) in [(2usize, 3usize), (3, 3), (4, 6)] {
        let x: Vec<usize> = (0..m + n).map(|i| if i < m { (i + 1) % m } else { i }).collect();
        let y: Vec<usize> = (0..m + n).map(|i| if i < m { i } else { m + (i - m + 1) % n }).collect();
        out.push(OracleCase {
            name: format!("C{m}xC{n}"),
            pres: Presentation::with_rank("x", 2, [w(0).pow(m as i64), w(1).pow(n as i64), commutator(&w(0), &w(1))]),
            perms: vec![x, y],
        });
    }
    for n in 3..=5usize {
        let k = n - 1;
        let mut rels = Vec::new();
        for i in 0..k {
            rels.push(w(i).pow(2));
            for j in i + 1..k {
                let e = if j == i + 1 { 3 } else { 2 };
                rels.push(w(i).mul(&w(j)).pow(e));
            }
        }
        out.push(OracleCase {
            name: format!("S{n} (Coxeter)"),
            pres: Presentation::with_rank("s", k, rels),
            perms: (0..k).map(|i| transposition(n, i, i + 1)).collect(),
        });
    }
    // von Dyck groups (2,3,k): A4, S4, A5
    let vd = |k: i64| Presentation::with_rank("a", 2, [w(0).pow(2), w(1).pow(3), w(0).mul(&w(1)).pow(k)]);
    out.push(OracleCase { name: "A4".into(), pres: vd(3), perms: vec![from_cycles(4, &[&[0, 1], &[2, 3]]), from_cycles(4, &[&[0, 1, 2]])] });
    out.push(OracleCase { name: "S4".into(), pres: vd(4), perms: vec![from_cycles(4, &[&[0, 1]]), from_cycles(4, &[&[1, 2, 3]])] });
    out.push(OracleCase {
        name: "A5".into(),
        pres: vd(5),
        perms: vec![from_cycles(5, &[&[0, 1], &[2, 3]]), from_cycles(5, &[&[0, 2, 4]])],
    });
    out
}

fn compose(p: &[usize], q: &[usize]) -> Vec<usize> {
    // apply p, then q
    p.iter().map(|&i| q[i]).collect()
}

fn perm_inverse(p: &[usize]) -> Vec<usize> {
    let mut inv = vec![0; p.len()];
    for (i, &j) in p.iter().enumerate() {
        inv[j] = i;
    }
    inv
}

fn evaluate(word: &Word, perms: &[Vec<usize>]) -> Vec<usize> {
    let n = perms[0].len();
    word.letters().iter().fold((0..n).collect(), |acc: Vec<usize>, &l| {
        let g = &perms[(l.unsigned_abs() - 1) as usize];
        if l > 0 {
            compose(&acc, g)
        } else {
            compose(&acc, &perm_inverse(g))
        }
    })
}

/// Size of the group generated by `perms`, by breadth-first search of the
/// Cayley graph.
pub fn cayley_order(perms: &[Vec<usize>]) -> usize {
    let n = perms[0].len();
    let id: Vec<usize> = (0..n).collect();
    let mut seen = HashSet::from([id.clone()]);
    let mut queue = VecDeque::from([id]);
    while let Some(x) = queue.pop_front() {
        for g in perms {
            let y = compose(&x, g);
            if seen.insert(y.clone()) {
                queue.push_back(y);
            }
        }
    }
    seen.len()
}

fn element_order(p: &[usize]) -> usize {
    let id: Vec<usize> = (0..p.len()).collect();
    let mut x = p.to_vec();
    let mut k = 1;
    while x != id {
        x = compose(&x, p);
        k += 1;
    }
    k
}

/// Coset tables against the Cayley oracle: group order, index of the cyclic
/// subgroup on the first generator, relator traces at every coset, bijective
/// columns, and HLT/Felsch agreement.
pub fn coset_suite() -> Vec<String> {
    let mut failures = Vec::new();
    for case in oracle_cases() {
        let mut why = Vec::new();
        let n = case.perms[0].len();
        let id: Vec<usize> = (0..n).collect();
        if case.pres.relators().iter().any(|r| evaluate(r, &case.perms) != id) {
            why.push("model violates a relator".to_string());
        }
        let order = cayley_order(&case.perms);
        let sub = vec![w(0)];
        let sub_index = order / element_order(&case.perms[0]);
        for (gens, expected) in [(&[][..], order), (&sub[..], sub_index)] {
            let hlt = todd_coxeter(&case.pres, gens, &EnumerationLimits::with_max(100_000));
            let felsch = todd_coxeter(&case.pres, gens, &EnumerationLimits::felsch(100_000));
            match (hlt, felsch) {
                (Ok(h), Ok(f)) => {
                    if h.index() != expected || f.index() != expected {
                        why.push(format!("index {} / {} (oracle {expected})", h.index(), f.index()));
                    }
                    for t in [&h, &f] {
                        if !t.check_laws(&case.pres) {
                            why.push("table laws fail".into());
                        }
                        if !gens.iter().all(|g| t.contains(g)) {
                            why.push("subgroup generator not in coset 0".into());
                        }
                        for c in 0..t.index() {
                            for g in 0..case.pres.ngens() {
                                let l = (g + 1) as Letter;
                                if t.entry(t.entry(c, l), -l) != c {
                                    why.push(format!("column {g} not bijective at {c}"));
                                }
                            }
                            if case.pres.relators().iter().any(|r| t.trace(r, c) != c) {
                                why.push(format!("relator does not close at coset {c}"));
                            }
                        }
                    }
                }
                (h, f) => why.push(format!("enumeration failed: {:?} / {:?}", h.err(), f.err())),
            }
        }
        if !why.is_empty() {
            why.dedup();
            failures.push(format!("{}: {}", case.name, why.join("; ")));
        }
    }
    failures
}

pub fn random_letters(rng: &mut ChaCha8Rng, ngens: usize, max_len: usize) -> Vec<Letter> {
    let len = rng.gen_range(0..=max_len);
    (0..len)
        .map(|_| {
            let g = rng.gen_range(1..=ngens as Letter);
            if rng.gen_bool(0.5) {
                g
            } else {
                -g
            }
        })
        .collect()
}

fn raw_sums(letters: &[Letter], ngens: usize) -> Vec<i64> {
    let mut out = vec![0; ngens];
    for &l in letters {
        out[(l.unsigned_abs() - 1) as usize] += l.signum() as i64;
    }
    out
}

/// Free reduction and the algebraic identities of words.
pub fn word_suite(cases: usize, seed: u64) -> Vec<String> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut failures = Vec::new();
    let id = Word::identity();
    for case in 0..cases {
        let ngens = rng.gen_range(1..=4);
        let raw = random_letters(&mut rng, ngens, 30);
        let x = free_reduce(&raw, ngens).unwrap();
        let y = Word::reduce(random_letters(&mut rng, ngens, 12));
        let z = Word::reduce(random_letters(&mut rng, ngens, 12));
        let k = rng.gen_range(-4i64..=4);
        let m = rng.gen_range(-4i64..=4);
        let (core, c) = cyclic_reduce(&x);
        let checks = [
            ("reduced", is_freely_reduced(x.letters())),
            ("idempotent", Word::reduce(x.letters().iter().copied()) == x),
            ("length", x.len() <= raw.len() && x.len() % 2 == raw.len() % 2),
            ("exponent sums", x.exponent_sums(ngens) == raw_sums(&raw, ngens)),
            ("double inverse", x.inverse().inverse() == x),
            ("inverse cancels", x.mul(&x.inverse()) == id && x.inverse().mul(&x) == id),
            ("inverse of product", x.mul(&y).inverse() == y.inverse().mul(&x.inverse())),
            ("associative", x.mul(&y).mul(&z) == x.mul(&y.mul(&z))),
            ("powers add", x.pow(k).mul(&x.pow(m)) == x.pow(k + m)),
            ("conjugation composes", conjugate(&conjugate(&x, &y), &z) == conjugate(&x, &y.mul(&z))),
            ("commutator inverse", commutator(&x, &y).inverse() == commutator(&y, &x)),
            ("commutator as conjugate", commutator(&x, &y) == x.inverse().mul(&conjugate(&x, &y))),
            ("cyclic core", core.is_cyclically_reduced() && conjugate(&core, &c) == x),
        ];
        for (name, ok) in checks {
            if !ok {
                failures.push(format!("case {case} {name}: {raw:?}"));
            }
        }
    }
    failures
}
