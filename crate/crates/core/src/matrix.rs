//! Exact integer matrices and Smith normal form.

use std::collections::BTreeSet;
use std::fmt::Write as _;

use crate::error::{FormatError, LinalgError};
use crate::integer::Integer;

/// Sparse row storage, column indices sorted, no stored zeros.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct IntMatrix {
    rows: usize,
    cols: usize,
    data: Vec<Vec<(usize, Integer)>>,
}

impl IntMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        IntMatrix { rows, cols, data: vec![Vec::new(); rows] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.data[i].push((i, Integer::one()));
        }
        m
    }

    pub fn from_dense(rows: &[Vec<Integer>]) -> Self {
        let cols = rows.first().map(Vec::len).unwrap_or(0);
        Self::from_dense_with_cols(rows, cols)
    }

    pub fn from_dense_with_cols(rows: &[Vec<Integer>], cols: usize) -> Self {
        let data = rows
            .iter()
            .map(|r| {
                assert_eq!(r.len(), cols);
                r.iter().enumerate().filter(|(_, v)| !v.is_zero()).map(|(j, v)| (j, v.clone())).collect()
            })
            .collect();
        IntMatrix { rows: rows.len(), cols, data }
    }

    pub fn from_i64(rows: &[Vec<i64>]) -> Self {
        let cols = rows.first().map(Vec::len).unwrap_or(0);
        let dense: Vec<Vec<Integer>> = rows.iter().map(|r| r.iter().map(|&v| Integer::from(v)).collect()).collect();
        Self::from_dense_with_cols(&dense, cols)
    }

    /// Builds from per-row sparse entries; duplicate columns are summed.
    pub fn from_sparse_rows(cols: usize, rows: Vec<Vec<(usize, Integer)>>) -> Self {
        let data = rows
            .into_iter()
            .map(|mut r| {
                r.sort_by_key(|e| e.0);
                let mut out: Vec<(usize, Integer)> = Vec::with_capacity(r.len());
                for (j, v) in r {
                    assert!(j < cols);
                    match out.last_mut() {
                        Some((k, acc)) if *k == j => *acc = &*acc + &v,
                        _ => out.push((j, v)),
                    }
                }
                out.retain(|e| !e.1.is_zero());
                out
            })
            .collect::<Vec<_>>();
        IntMatrix { rows: data.len(), cols, data }
    }

    pub fn nrows(&self) -> usize {
        self.rows
    }

    pub fn ncols(&self) -> usize {
        self.cols
    }

    pub fn row(&self, i: usize) -> &[(usize, Integer)] {
        &self.data[i]
    }

    pub fn nnz(&self) -> usize {
        self.data.iter().map(Vec::len).sum()
    }

    pub fn get(&self, i: usize, j: usize) -> Integer {
        match self.data[i].binary_search_by_key(&j, |e| e.0) {
            Ok(k) => self.data[i][k].1.clone(),
            Err(_) => Integer::zero(),
        }
    }

    pub fn to_dense(&self) -> Vec<Vec<Integer>> {
        let mut out = vec![vec![Integer::zero(); self.cols]; self.rows];
        for (i, r) in self.data.iter().enumerate() {
            for (j, v) in r {
                out[i][*j] = v.clone();
            }
        }
        out
    }

    pub fn transpose(&self) -> IntMatrix {
        let mut rows = vec![Vec::new(); self.cols];
        for (i, r) in self.data.iter().enumerate() {
            for (j, v) in r {
                rows[*j].push((i, v.clone()));
            }
        }
        IntMatrix { rows: self.cols, cols: self.rows, data: rows }
    }

    pub fn mul(&self, other: &IntMatrix) -> IntMatrix {
        assert_eq!(self.cols, other.rows);
        let mut out = Vec::with_capacity(self.rows);
        for r in &self.data {
            let mut acc: Vec<Integer> = vec![Integer::zero(); other.cols];
            for (k, a) in r {
                for (j, b) in &other.data[*k] {
                    acc[*j] = &acc[*j] + &(a * b);
                }
            }
            out.push(acc.into_iter().enumerate().filter(|(_, v)| !v.is_zero()).collect());
        }
        IntMatrix { rows: self.rows, cols: other.cols, data: out }
    }

    pub fn is_diagonal(&self) -> bool {
        self.data.iter().enumerate().all(|(i, r)| r.iter().all(|(j, _)| *j == i))
    }

    /// Exact determinant by fraction-free (Bareiss) elimination.
    pub fn determinant(&self) -> Integer {
        assert_eq!(self.rows, self.cols, "determinant of a non-square matrix");
        let n = self.rows;
        if n == 0 {
            return Integer::one();
        }
        let mut a = self.to_dense();
        let mut sign = false;
        let mut prev = Integer::one();
        for k in 0..n {
            if a[k][k].is_zero() {
                match (k + 1..n).find(|&i| !a[i][k].is_zero()) {
                    Some(i) => {
                        a.swap(i, k);
                        sign = !sign;
                    }
                    None => return Integer::zero(),
                }
            }
            for i in k + 1..n {
                for j in k + 1..n {
                    let v = &(&a[i][j] * &a[k][k]) - &(&a[i][k] * &a[k][j]);
                    a[i][j] = &v / &prev;
                }
                a[i][k] = Integer::zero();
            }
            prev = a[k][k].clone();
        }
        let d = a[n - 1][n - 1].clone();
        if sign {
            -d
        } else {
            d
        }
    }

    /// Plain text: `rows cols` header, then `i j v` triplets (1-based).
    pub fn to_market_string(&self) -> String {
        let mut s = format!("{} {}\n", self.rows, self.cols);
        for (i, r) in self.data.iter().enumerate() {
            for (j, v) in r {
                let _ = writeln!(s, "{} {} {}", i + 1, j + 1, v);
            }
        }
        s
    }

    pub fn from_market_str(text: &str) -> Result<Self, FormatError> {
        let bad = |m: &str| FormatError::Malformed { what: "matrix", message: m.to_string() };
        let mut lines = text.lines().filter(|l| !l.trim().is_empty() && !l.starts_with('%'));
        let head: Vec<usize> = lines
            .next()
            .ok_or_else(|| bad("empty"))?
            .split_whitespace()
            .map(|t| t.parse().map_err(|_| bad("bad header")))
            .collect::<Result<_, _>>()?;
        if head.len() != 2 {
            return Err(bad("header needs `rows cols`"));
        }
        let mut rows = vec![Vec::new(); head[0]];
        for line in lines {
            let t: Vec<&str> = line.split_whitespace().collect();
            if t.len() != 3 {
                return Err(bad("expected `i j v`"));
            }
            let i: usize = t[0].parse().map_err(|_| bad("bad row"))?;
            let j: usize = t[1].parse().map_err(|_| bad("bad column"))?;
            let v: Integer = t[2].parse().map_err(|_| bad("bad value"))?;
            if i == 0 || j == 0 || i > head[0] || j > head[1] {
                return Err(bad("index out of range"));
            }
            rows[i - 1].push((j - 1, v));
        }
        Ok(Self::from_sparse_rows(head[1], rows))
    }
}

/// `U * A * V = D` with `D` diagonal, `d_1 | d_2 | ... | d_r`, all positive.
#[derive(Clone, Debug)]
pub struct SnfResult {
    pub d: IntMatrix,
    pub u: Option<IntMatrix>,
    pub v: Option<IntMatrix>,
    pub rank: usize,
    pub diagonal: Vec<Integer>,
}

/// Dense Smith normal form, optionally accumulating `U` and `V`.
pub fn smith_normal_form(a: &IntMatrix, transforms: bool) -> SnfResult {
    let m = a.nrows();
    let n = a.ncols();
    let mut s = DenseSnf {
        a: a.to_dense(),
        u: transforms.then(|| IntMatrix::identity(m).to_dense()),
        v: transforms.then(|| IntMatrix::identity(n).to_dense()),
        m,
        n,
    };
    let rank = s.run();
    s.repair_chain(rank);
    let diagonal: Vec<Integer> = (0..rank).map(|i| s.a[i][i].clone()).collect();
    SnfResult {
        d: IntMatrix::from_dense_with_cols(&s.a, n),
        u: s.u.map(|u| IntMatrix::from_dense_with_cols(&u, m)),
        v: s.v.map(|v| IntMatrix::from_dense_with_cols(&v, n)),
        rank,
        diagonal,
    }
}

struct DenseSnf {
    a: Vec<Vec<Integer>>,
    u: Option<Vec<Vec<Integer>>>,
    v: Option<Vec<Vec<Integer>>>,
    m: usize,
    n: usize,
}

impl DenseSnf {
    fn swap_rows(&mut self, i: usize, j: usize) {
        if i != j {
            self.a.swap(i, j);
            if let Some(u) = &mut self.u {
                u.swap(i, j);
            }
        }
    }

    fn swap_cols(&mut self, i: usize, j: usize) {
        if i != j {
            for r in &mut self.a {
                r.swap(i, j);
            }
            if let Some(v) = &mut self.v {
                for r in v.iter_mut() {
                    r.swap(i, j);
                }
            }
        }
    }

    /// row_i += q * row_j
    fn add_row(&mut self, i: usize, j: usize, q: &Integer) {
        for k in 0..self.n {
            if !self.a[j][k].is_zero() {
                let t = &self.a[j][k] * q;
                self.a[i][k] = &self.a[i][k] + &t;
            }
        }
        if let Some(u) = &mut self.u {
            for k in 0..u[j].len() {
                if !u[j][k].is_zero() {
                    let t = &u[j][k] * q;
                    u[i][k] = &u[i][k] + &t;
                }
            }
        }
    }

    /// col_i += q * col_j
    fn add_col(&mut self, i: usize, j: usize, q: &Integer) {
        for r in &mut self.a {
            if !r[j].is_zero() {
                let t = &r[j] * q;
                r[i] = &r[i] + &t;
            }
        }
        if let Some(v) = &mut self.v {
            for r in v.iter_mut() {
                if !r[j].is_zero() {
                    let t = &r[j] * q;
                    r[i] = &r[i] + &t;
                }
            }
        }
    }

    fn negate_row(&mut self, i: usize) {
        for x in &mut self.a[i] {
            *x = -&*x;
        }
        if let Some(u) = &mut self.u {
            for x in &mut u[i] {
                *x = -&*x;
            }
        }
    }

    fn min_in(&self, t: usize, rows: impl Iterator<Item = usize>, cols: &[usize]) -> Option<(usize, usize)> {
        let mut best: Option<(usize, usize)> = None;
        for i in rows {
            for &j in cols {
                let x = &self.a[i][j];
                if x.is_zero() {
                    continue;
                }
                let better = match best {
                    None => true,
                    Some((bi, bj)) => x.cmp_abs(&self.a[bi][bj]) == std::cmp::Ordering::Less,
                };
                if better {
                    best = Some((i, j));
                    if x.is_unit() {
                        return best;
                    }
                }
            }
        }
        let _ = t;
        best
    }

    fn run(&mut self) -> usize {
        let mut t = 0;
        while t < self.m.min(self.n) {
            let cols: Vec<usize> = (t..self.n).collect();
            let Some((pi, pj)) = self.min_in(t, t..self.m, &cols) else { break };
            self.swap_rows(t, pi);
            self.swap_cols(t, pj);
            loop {
                let mut clean = true;
                for i in t + 1..self.m {
                    if !self.a[i][t].is_zero() {
                        let q = -self.a[i][t].div_round(&self.a[t][t]);
                        self.add_row(i, t, &q);
                        clean &= self.a[i][t].is_zero();
                    }
                }
                for j in t + 1..self.n {
                    if !self.a[t][j].is_zero() {
                        let q = -self.a[t][j].div_round(&self.a[t][t]);
                        self.add_col(j, t, &q);
                        clean &= self.a[t][j].is_zero();
                    }
                }
                if !clean {
                    // a smaller remainder sits in row t or column t
                    let mut best = (t, t);
                    for i in t + 1..self.m {
                        if !self.a[i][t].is_zero() && self.a[i][t].cmp_abs(&self.a[best.0][best.1]).is_lt() {
                            best = (i, t);
                        }
                    }
                    for j in t + 1..self.n {
                        if !self.a[t][j].is_zero() && self.a[t][j].cmp_abs(&self.a[best.0][best.1]).is_lt() {
                            best = (t, j);
                        }
                    }
                    self.swap_rows(t, best.0);
                    self.swap_cols(t, best.1);
                    continue;
                }
                let pivot = self.a[t][t].clone();
                let bad = (t + 1..self.m)
                    .find(|&i| (t + 1..self.n).any(|j| !self.a[i][j].is_divisible_by(&pivot)));
                match bad {
                    Some(i) => self.add_row(t, i, &Integer::one()),
                    None => break,
                }
            }
            if self.a[t][t].is_negative() {
                self.negate_row(t);
            }
            t += 1;
        }
        t
    }

    /// Enforces `d_i | d_{i+1}` with 2x2 gcd/lcm transforms. A no-op when the
    /// elimination already produced a chain.
    fn repair_chain(&mut self, rank: usize) {
        for i in 0..rank {
            for j in i + 1..rank {
                let a = self.a[i][i].clone();
                let b = self.a[j][j].clone();
                if b.is_divisible_by(&a) {
                    continue;
                }
                let (g, s, t) = a.extended_gcd(&b);
                let a1 = &a / &g;
                let b1 = &b / &g;
                // U2 = [[s, t], [-b1, a1]], V2 = [[1, -t*b1], [1, s*a1]]
                if let Some(u) = &mut self.u {
                    let ri = u[i].clone();
                    let rj = u[j].clone();
                    for k in 0..ri.len() {
                        u[i][k] = &(&s * &ri[k]) + &(&t * &rj[k]);
                        u[j][k] = &(&(-&b1) * &ri[k]) + &(&a1 * &rj[k]);
                    }
                }
                if let Some(v) = &mut self.v {
                    let tb = -&(&t * &b1);
                    let sa = &s * &a1;
                    for r in v.iter_mut() {
                        let ci = r[i].clone();
                        let cj = r[j].clone();
                        r[i] = &ci + &cj;
                        r[j] = &(&ci * &tb) + &(&cj * &sa);
                    }
                }
                self.a[i][i] = g;
                self.a[j][j] = &(&a * &b).abs() / &self.a[i][i];
            }
        }
    }
}

/// Non-zero invariant factors only, via sparse unit-pivot elimination
/// followed by a dense Smith form of what remains.
pub fn smith_diagonal(a: &IntMatrix) -> Vec<Integer> {
    let mut e = SparseEliminator::new(a);
    let units = e.eliminate_units();
    let (rest, rest_cols) = e.remainder();
    let mut diag = vec![Integer::one(); units];
    if !rest.is_empty() {
        let dense = IntMatrix::from_dense_with_cols(&rest, rest_cols);
        let r = smith_normal_form(&dense, false);
        diag.extend(r.diagonal);
    }
    diag
}

struct SparseEliminator {
    cols: usize,
    rows: Vec<Vec<(usize, Integer)>>,
    active: Vec<bool>,
    col_rows: Vec<Vec<usize>>,
    col_count: Vec<usize>,
    queue: BTreeSet<(usize, usize)>,
    col_done: Vec<bool>,
}

impl SparseEliminator {
    fn new(a: &IntMatrix) -> Self {
        let rows: Vec<Vec<(usize, Integer)>> = (0..a.nrows()).map(|i| a.row(i).to_vec()).collect();
        let mut col_rows = vec![Vec::new(); a.ncols()];
        let mut col_count = vec![0; a.ncols()];
        let mut queue = BTreeSet::new();
        for (i, r) in rows.iter().enumerate() {
            for (j, _) in r {
                col_rows[*j].push(i);
                col_count[*j] += 1;
            }
            if !r.is_empty() {
                queue.insert((r.len(), i));
            }
        }
        SparseEliminator {
            cols: a.ncols(),
            active: vec![true; rows.len()],
            rows,
            col_rows,
            col_count,
            queue,
            col_done: vec![false; a.ncols()],
        }
    }

    fn eliminate_units(&mut self) -> usize {
        let mut count = 0;
        let mut parked: Vec<(usize, usize)> = Vec::new();
        while let Some(&(len, r)) = self.queue.iter().next() {
            self.queue.remove(&(len, r));
            if !self.active[r] || self.rows[r].len() != len {
                continue;
            }
            let pivot = self.rows[r]
                .iter()
                .filter(|(_, v)| v.is_unit())
                .min_by_key(|(j, _)| (self.col_count[*j], *j))
                .map(|(j, v)| (*j, v.clone()));
            let Some((pc, pv)) = pivot else {
                parked.push((len, r));
                continue;
            };
            self.pivot(r, pc, &pv);
            count += 1;
            // parked rows may have gained a unit entry
            for (l, pr) in parked.drain(..) {
                if self.active[pr] && self.rows[pr].len() == l {
                    self.queue.insert((l, pr));
                }
            }
        }
        count
    }

    fn pivot(&mut self, r: usize, pc: usize, pv: &Integer) {
        self.active[r] = false;
        self.col_done[pc] = true;
        let prow = std::mem::take(&mut self.rows[r]);
        for (j, _) in &prow {
            self.col_count[*j] -= 1;
        }
        let others: Vec<usize> = std::mem::take(&mut self.col_rows[pc]);
        for i in others {
            if !self.active[i] {
                continue;
            }
            let Ok(k) = self.rows[i].binary_search_by_key(&pc, |e| e.0) else { continue };
            // row_i -= (a_i,pc / pv) * prow, pv = ±1
            let factor = if pv.is_negative() { -&self.rows[i][k].1 } else { self.rows[i][k].1.clone() };
            let old = std::mem::take(&mut self.rows[i]);
            let new = axpy(&old, &prow, &factor);
            for (j, _) in &old {
                self.col_count[*j] -= 1;
            }
            for (j, _) in &new {
                self.col_count[*j] += 1;
                if old.binary_search_by_key(j, |e| e.0).is_err() {
                    self.col_rows[*j].push(i);
                }
            }
            if !new.is_empty() {
                self.queue.insert((new.len(), i));
            } else {
                self.active[i] = false;
            }
            self.rows[i] = new;
        }
    }

    fn remainder(&self) -> (Vec<Vec<Integer>>, usize) {
        let live_cols: Vec<usize> = (0..self.cols).filter(|&j| !self.col_done[j] && self.col_count[j] > 0).collect();
        let mut pos = vec![usize::MAX; self.cols];
        for (k, &j) in live_cols.iter().enumerate() {
            pos[j] = k;
        }
        let mut out = Vec::new();
        for (i, r) in self.rows.iter().enumerate() {
            if !self.active[i] || r.is_empty() {
                continue;
            }
            let mut dense = vec![Integer::zero(); live_cols.len()];
            for (j, v) in r {
                dense[pos[*j]] = v.clone();
            }
            out.push(dense);
        }
        (out, live_cols.len())
    }
}

/// `a - factor * b` on sorted sparse rows.
fn axpy(a: &[(usize, Integer)], b: &[(usize, Integer)], factor: &Integer) -> Vec<(usize, Integer)> {
    let mut out = Vec::with_capacity(a.len() + b.len());
    let (mut i, mut j) = (0, 0);
    while i < a.len() || j < b.len() {
        let ca = a.get(i).map(|e| e.0).unwrap_or(usize::MAX);
        let cb = b.get(j).map(|e| e.0).unwrap_or(usize::MAX);
        if ca < cb {
            out.push(a[i].clone());
            i += 1;
        } else if cb < ca {
            out.push((cb, -&(factor * &b[j].1)));
            j += 1;
        } else {
            let v = &a[i].1 - &(factor * &b[j].1);
            if !v.is_zero() {
                out.push((ca, v));
            }
            i += 1;
            j += 1;
        }
    }
    out
}

pub fn is_prime(p: u64) -> bool {
    if p < 2 {
        return false;
    }
    let mut d = 2;
    while d * d <= p {
        if p % d == 0 {
            return false;
        }
        d += 1;
    }
    true
}

fn check_prime(p: u64) -> Result<(), LinalgError> {
    if is_prime(p) {
        Ok(())
    } else {
        Err(LinalgError::NotPrime(p))
    }
}

fn mod_inverse(a: u64, p: u64) -> u64 {
    // p prime, a != 0
    let mut r = 1u64;
    let mut b = a % p;
    let mut e = p - 2;
    while e > 0 {
        if e & 1 == 1 {
            r = (r as u128 * b as u128 % p as u128) as u64;
        }
        b = (b as u128 * b as u128 % p as u128) as u64;
        e >>= 1;
    }
    r
}

/// Reduced row echelon form over `F_p`; returns the pivot columns.
fn rref_mod_p(a: &IntMatrix, p: u64) -> (Vec<Vec<u64>>, Vec<usize>) {
    let n = a.ncols();
    let mut rows: Vec<Vec<u64>> = (0..a.nrows())
        .map(|i| {
            let mut r = vec![0u64; n];
            for (j, v) in a.row(i) {
                r[*j] = v.mod_u64(p);
            }
            r
        })
        .filter(|r| r.iter().any(|&x| x != 0))
        .collect();
    let mut pivots = Vec::new();
    let mut top = 0;
    for c in 0..n {
        let Some(k) = (top..rows.len()).find(|&i| rows[i][c] != 0) else { continue };
        rows.swap(top, k);
        let inv = mod_inverse(rows[top][c], p);
        for x in rows[top].iter_mut() {
            *x = (*x as u128 * inv as u128 % p as u128) as u64;
        }
        let prow = rows[top].clone();
        for (i, r) in rows.iter_mut().enumerate() {
            if i != top && r[c] != 0 {
                let f = r[c];
                for (x, y) in r.iter_mut().zip(&prow) {
                    *x = ((*x as u128 + (p - f) as u128 * *y as u128) % p as u128) as u64;
                }
            }
        }
        pivots.push(c);
        top += 1;
        if top == rows.len() {
            break;
        }
    }
    rows.truncate(top);
    (rows, pivots)
}

/// Rank over the field with `p` elements.
pub fn mod_p_rank(a: &IntMatrix, p: u64) -> Result<usize, LinalgError> {
    check_prime(p)?;
    Ok(rref_mod_p(a, p).1.len())
}

/// Basis of `{v : A v = 0 (mod p)}`, one vector per free column, each with
/// a 1 in its free column (reduced echelon basis; deterministic).
pub fn nullspace_mod_p(a: &IntMatrix, p: u64) -> Result<Vec<Vec<u64>>, LinalgError> {
    check_prime(p)?;
    let n = a.ncols();
    let (rows, pivots) = rref_mod_p(a, p);
    let mut is_pivot = vec![false; n];
    for &c in &pivots {
        is_pivot[c] = true;
    }
    let mut basis = Vec::new();
    for f in (0..n).filter(|&c| !is_pivot[c]) {
        let mut v = vec![0u64; n];
        v[f] = 1;
        for (r, &pc) in rows.iter().zip(&pivots) {
            v[pc] = (p - r[f] % p) % p;
        }
        basis.push(v);
    }
    Ok(basis)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn m(rows: &[Vec<i64>]) -> IntMatrix {
        IntMatrix::from_i64(rows)
    }

    fn check(a: &IntMatrix) -> SnfResult {
        let r = smith_normal_form(a, true);
        let u = r.u.as_ref().unwrap();
        let v = r.v.as_ref().unwrap();
        assert_eq!(u.mul(a).mul(v), r.d);
        assert!(r.d.is_diagonal());
        assert!(u.determinant().is_unit());
        assert!(v.determinant().is_unit());
        for w in r.diagonal.windows(2) {
            assert!(w[1].is_divisible_by(&w[0]));
        }
        assert!(r.diagonal.iter().all(|d| !d.is_negative() && !d.is_zero()));
        r
    }

    #[test]
    fn diag_2_3_becomes_1_6() {
        let r = check(&m(&[vec![2, 0], vec![0, 3]]));
        assert_eq!(r.diagonal, vec![Integer::from(1), Integer::from(6)]);
    }

    #[test]
    fn triangle_group_matrix() {
        let a = m(&[vec![3, 0], vec![0, 3], vec![3, 3]]);
        let r = check(&a);
        assert_eq!(r.diagonal, vec![Integer::from(3), Integer::from(3)]);
        assert_eq!(smith_diagonal(&a), r.diagonal);
    }

    #[test]
    fn zero_matrix() {
        let a = IntMatrix::zeros(3, 2);
        let r = check(&a);
        assert_eq!(r.rank, 0);
        assert_eq!(r.u.unwrap(), IntMatrix::identity(3));
        assert_eq!(r.v.unwrap(), IntMatrix::identity(2));
        assert!(smith_diagonal(&a).is_empty());
    }

    #[test]
    fn repair_pass_transforms() {
        // elimination never produces this, so drive the repair directly
        let mut s = DenseSnf {
            a: vec![vec![Integer::from(4), Integer::zero()], vec![Integer::zero(), Integer::from(6)]],
            u: Some(IntMatrix::identity(2).to_dense()),
            v: Some(IntMatrix::identity(2).to_dense()),
            m: 2,
            n: 2,
        };
        let orig = IntMatrix::from_dense(&s.a);
        s.repair_chain(2);
        let d = IntMatrix::from_dense(&s.a);
        let u = IntMatrix::from_dense(s.u.as_ref().unwrap());
        let v = IntMatrix::from_dense(s.v.as_ref().unwrap());
        assert_eq!(u.mul(&orig).mul(&v), d);
        assert_eq!(s.a[0][0], Integer::from(2));
        assert_eq!(s.a[1][1], Integer::from(12));
        assert!(u.determinant().is_unit() && v.determinant().is_unit());
    }

    #[test]
    fn big_entries_stay_exact() {
        let big: Integer = "340282366920938463463374607431768211457".parse().unwrap();
        let a = IntMatrix::from_dense(&[vec![big.clone(), Integer::zero()], vec![Integer::zero(), Integer::from(2)]]);
        let r = check(&a);
        // odd big entry is coprime to 2
        assert_eq!(r.diagonal[0], Integer::one());
        assert_eq!(r.diagonal[1], &big * &Integer::from(2));
    }

    #[test]
    fn mod_p_ranks() {
        assert_eq!(mod_p_rank(&IntMatrix::identity(3), 5).unwrap(), 3);
        assert_eq!(mod_p_rank(&m(&[vec![3, 0], vec![0, 3]]), 3).unwrap(), 0);
        assert_eq!(mod_p_rank(&m(&[vec![3, 0], vec![0, 3]]), 2).unwrap(), 2);
        assert_eq!(mod_p_rank(&IntMatrix::identity(2), 4), Err(LinalgError::NotPrime(4)));
    }

    #[test]
    fn nullspace_vectors_solve() {
        let a = m(&[vec![1, 1, 1], vec![3, 0, 6]]);
        let ns = nullspace_mod_p(&a, 3).unwrap();
        assert_eq!(ns.len(), 2);
        for v in &ns {
            for i in 0..a.nrows() {
                let s: i64 = a.row(i).iter().map(|(j, x)| x.to_i64().unwrap() * v[*j] as i64).sum();
                assert_eq!(s.rem_euclid(3), 0);
            }
        }
    }

    #[test]
    fn market_round_trip() {
        let a = m(&[vec![1, 0, -2], vec![0, 0, 0], vec![5, 7, 0]]);
        let s = a.to_market_string();
        assert!(s.starts_with("3 3\n"));
        assert_eq!(IntMatrix::from_market_str(&s).unwrap(), a);
    }

    #[test]
    fn determinant_small() {
        assert_eq!(m(&[vec![2, 1], vec![7, 4]]).determinant(), Integer::from(1));
        assert_eq!(m(&[vec![0, 1], vec![1, 0]]).determinant(), Integer::from(-1));
        assert_eq!(m(&[vec![1, 2, 3], vec![4, 5, 6], vec![7, 8, 10]]).determinant(), Integer::from(-3));
    }
}
