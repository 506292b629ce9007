//! Small finite groups as Cayley tables, built from permutations or from
//! direct, semidirect and metacyclic constructions.

use std::collections::HashMap;
use std::sync::OnceLock;

use crate::coset::{todd_coxeter, EnumerationLimits};
use crate::parse::parse_presentation;

/// A finite group with elements `0..order`, identity `0`.
#[derive(Clone)]
pub struct FiniteGroup {
    name: String,
    n: usize,
    mul: Vec<u16>,
    inv: Vec<u16>,
    /// A small generating set.
    gens: Vec<usize>,
}

impl std::fmt::Debug for FiniteGroup {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{} (order {})", self.name, self.n)
    }
}

impl FiniteGroup {
    /// From a full multiplication table with identity `0`.
    fn from_table(name: String, n: usize, mul: Vec<u16>) -> Self {
        let mut inv = vec![0u16; n];
        for a in 0..n {
            inv[a] = (0..n).find(|&b| mul[a * n + b] == 0).expect("group table") as u16;
        }
        let mut g = FiniteGroup { name, n, mul, inv, gens: Vec::new() };
        g.gens = g.greedy_generators();
        g
    }

    /// Closure of permutation generators; products compose left to right.
    pub fn from_permutations(name: &str, gens: &[Vec<usize>]) -> Self {
        let degree = gens.first().map(Vec::len).unwrap_or(0);
        let id: Vec<usize> = (0..degree).collect();
        let mut elems = vec![id.clone()];
        let mut index: HashMap<Vec<usize>, usize> = HashMap::from([(id, 0)]);
        let mut i = 0;
        while i < elems.len() {
            for g in gens {
                let p: Vec<usize> = elems[i].iter().map(|&x| g[x]).collect();
                if !index.contains_key(&p) {
                    index.insert(p.clone(), elems.len());
                    elems.push(p);
                }
            }
            i += 1;
        }
        let n = elems.len();
        let mut mul = vec![0u16; n * n];
        for a in 0..n {
            for b in 0..n {
                let p: Vec<usize> = elems[a].iter().map(|&x| elems[b][x]).collect();
                mul[a * n + b] = index[&p] as u16;
            }
        }
        Self::from_table(name.to_string(), n, mul)
    }

    pub fn cyclic(n: usize) -> Self {
        let gen: Vec<usize> = (0..n).map(|i| (i + 1) % n).collect();
        Self::from_permutations(&format!("C{n}"), &[gen])
    }

    pub fn symmetric(n: usize) -> Self {
        let cycle: Vec<usize> = (0..n).map(|i| (i + 1) % n).collect();
        let mut swap: Vec<usize> = (0..n).collect();
        if n > 1 {
            swap.swap(0, 1);
        }
        Self::from_permutations(&format!("S{n}"), &[cycle, swap])
    }

    pub fn alternating5() -> Self {
        Self::from_permutations("A5", &[vec![1, 2, 3, 4, 0], vec![1, 2, 0, 3, 4]])
    }

    /// `PSL(2,7)` acting on the 7 points of the Fano plane.
    pub fn psl27() -> Self {
        let a = vec![1, 2, 3, 4, 5, 6, 0];
        // (1 2)(3 6)
        let b = vec![0, 2, 1, 6, 4, 5, 3];
        Self::from_permutations("PSL(2,7)", &[a, b])
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn order(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn mul(&self, a: usize, b: usize) -> usize {
        self.mul[a * self.n + b] as usize
    }

    #[inline]
    pub fn inv(&self, a: usize) -> usize {
        self.inv[a] as usize
    }

    pub fn generators(&self) -> &[usize] {
        &self.gens
    }

    /// Right-regular permutation of each generator.
    pub fn permutation_generators(&self) -> Vec<Vec<usize>> {
        self.gens.iter().map(|&g| (0..self.n).map(|x| self.mul(x, g)).collect()).collect()
    }

    pub fn element_order(&self, a: usize) -> usize {
        let mut x = a;
        let mut k = 1;
        while x != 0 {
            x = self.mul(x, a);
            k += 1;
        }
        k
    }

    /// Size of the subgroup generated by `elems`.
    pub fn generated_order(&self, elems: &[usize]) -> usize {
        let mut seen = vec![false; self.n];
        seen[0] = true;
        let mut stack = vec![0usize];
        let mut count = 1;
        while let Some(x) = stack.pop() {
            for &g in elems {
                let y = self.mul(x, g);
                if !seen[y] {
                    seen[y] = true;
                    count += 1;
                    stack.push(y);
                }
            }
        }
        count
    }

    fn greedy_generators(&self) -> Vec<usize> {
        let mut by_order: Vec<usize> = (1..self.n).collect();
        by_order.sort_by_key(|&a| (std::cmp::Reverse(self.element_order(a)), a));
        let mut gens = Vec::new();
        let mut size = 1;
        while size < self.n {
            // the element that enlarges the subgroup most
            let mut best = (size, usize::MAX);
            for &a in &by_order {
                let mut trial = gens.clone();
                trial.push(a);
                let s = self.generated_order(&trial);
                if s > best.0 {
                    best = (s, a);
                }
            }
            gens.push(best.1);
            size = best.0;
        }
        gens
    }

    /// Conjugacy classes as (representative, size), ordered by representative.
    pub fn conjugacy_classes(&self) -> Vec<(usize, usize)> {
        let mut class_of = vec![usize::MAX; self.n];
        let mut out = Vec::new();
        for a in 0..self.n {
            if class_of[a] != usize::MAX {
                continue;
            }
            let mut size = 0;
            for g in 0..self.n {
                let c = self.mul(self.mul(self.inv(g), a), g);
                if class_of[c] == usize::MAX {
                    class_of[c] = a;
                    size += 1;
                }
            }
            out.push((a, size));
        }
        out
    }

    pub fn is_abelian(&self) -> bool {
        (0..self.n).all(|a| (0..self.n).all(|b| self.mul(a, b) == self.mul(b, a)))
    }

    pub fn direct_product(g: &FiniteGroup, h: &FiniteGroup) -> FiniteGroup {
        let n = g.n * h.n;
        let mut mul = vec![0u16; n * n];
        for a in 0..n {
            for b in 0..n {
                let (a1, a2) = (a / h.n, a % h.n);
                let (b1, b2) = (b / h.n, b % h.n);
                mul[a * n + b] = (g.mul(a1, b1) * h.n + h.mul(a2, b2)) as u16;
            }
        }
        Self::from_table(format!("{}x{}", wrap(&g.name), wrap(&h.name)), n, mul)
    }

    /// `N x| C_m` where the generator of `C_m` acts by `phi`, `phi^m = 1`.
    pub fn semidirect(nrm: &FiniteGroup, m: usize, phi: &[usize], label: &str) -> FiniteGroup {
        let k = nrm.n;
        let n = k * m;
        // phi_pow[i][x] = phi^i(x)
        let mut phi_pow = vec![(0..k).collect::<Vec<usize>>()];
        for i in 1..m {
            phi_pow.push(phi_pow[i - 1].iter().map(|&x| phi[x]).collect());
        }
        // element (x, i) encoded as i * k + x; (x1,i1)(x2,i2) = (x1 phi^i1(x2), i1+i2)
        let mut mul = vec![0u16; n * n];
        for a in 0..n {
            for b in 0..n {
                let (i1, x1) = (a / k, a % k);
                let (i2, x2) = (b / k, b % k);
                let x = nrm.mul(x1, phi_pow[i1][x2]);
                mul[a * n + b] = (((i1 + i2) % m) * k + x) as u16;
            }
        }
        Self::from_table(format!("{}:C{}[{}]", wrap(&nrm.name), m, label), n, mul)
    }

    /// Group of `<a,b | a^m, b^k = a^s, b^-1 a b = a^r>` when it has order `m*k`.
    pub fn metacyclic(m: usize, k: usize, r: usize, s: usize) -> Option<FiniteGroup> {
        let text = format!("<a,b | a^{m}, b^{k}*a^-{s}, b^-1*a*b*a^-{r}>");
        let pres = parse_presentation(&text).ok()?;
        let table = todd_coxeter(&pres, &[], &EnumerationLimits::with_max(4 * m * k + 64)).ok()?;
        if table.index() != m * k {
            return None;
        }
        let perms = table.permutation_representation();
        Some(Self::from_permutations(&format!("M({m},{k},{r},{s})"), &perms))
    }

    /// Extends a generator assignment to a homomorphism into `h`, if it is one.
    fn extend_hom(&self, images: &[usize], h: &FiniteGroup) -> Option<Vec<usize>> {
        let mut img = vec![usize::MAX; self.n];
        img[0] = 0;
        let mut queue = vec![0usize];
        let mut i = 0;
        while i < queue.len() {
            let x = queue[i];
            i += 1;
            for (&g, &gi) in self.gens.iter().zip(images) {
                let y = self.mul(x, g);
                let v = h.mul(img[x], gi);
                if img[y] == usize::MAX {
                    img[y] = v;
                    queue.push(y);
                } else if img[y] != v {
                    return None;
                }
            }
        }
        Some(img)
    }

    /// All automorphisms, each as a permutation of the elements.
    pub fn automorphisms(&self) -> Vec<Vec<usize>> {
        let orders: Vec<usize> = (0..self.n).map(|a| self.element_order(a)).collect();
        let mut out = Vec::new();
        let mut choice = vec![0usize; self.gens.len()];
        self.search_images(self, &orders, &orders, 0, &mut choice, &mut |img| {
            out.push(img);
            true
        });
        out
    }

    /// Backtracks over generator images with matching orders, reporting
    /// every bijective homomorphism. The callback returns `false` to stop.
    fn search_images(
        &self,
        h: &FiniteGroup,
        my_orders: &[usize],
        h_orders: &[usize],
        depth: usize,
        choice: &mut Vec<usize>,
        found: &mut dyn FnMut(Vec<usize>) -> bool,
    ) -> bool {
        if depth == self.gens.len() {
            if let Some(img) = self.extend_hom(choice, h) {
                let mut seen = vec![false; h.n];
                if img.iter().all(|&v| !std::mem::replace(&mut seen[v], true)) {
                    return found(img);
                }
            }
            return true;
        }
        let want = my_orders[self.gens[depth]];
        for c in 0..h.n {
            if h_orders[c] == want {
                choice[depth] = c;
                if !self.search_images(h, my_orders, h_orders, depth + 1, choice, found) {
                    return false;
                }
            }
        }
        true
    }

    fn invariant_key(&self) -> Vec<usize> {
        let mut hist = vec![0usize; self.n + 1];
        for a in 0..self.n {
            hist[self.element_order(a)] += 1;
        }
        let center = (0..self.n).filter(|&a| (0..self.n).all(|b| self.mul(a, b) == self.mul(b, a))).count();
        let mut classes: Vec<usize> = self.conjugacy_classes().iter().map(|c| c.1).collect();
        classes.sort_unstable();
        let mut key = vec![self.n, center, classes.len()];
        key.extend(hist);
        key.extend(classes);
        key
    }

    pub fn is_isomorphic(&self, h: &FiniteGroup) -> bool {
        if self.invariant_key() != h.invariant_key() {
            return false;
        }
        let mine: Vec<usize> = (0..self.n).map(|a| self.element_order(a)).collect();
        let theirs: Vec<usize> = (0..h.n).map(|a| h.element_order(a)).collect();
        let mut any = false;
        let mut choice = vec![0usize; self.gens.len()];
        self.search_images(h, &mine, &theirs, 0, &mut choice, &mut |_| {
            any = true;
            false
        });
        any
    }
}

fn wrap(name: &str) -> String {
    if name.contains(['x', ':']) {
        format!("({name})")
    } else {
        name.to_string()
    }
}

/// Number of isomorphism classes of groups of order `1..=24`.
pub const SMALL_GROUP_COUNTS: [usize; 24] = [1, 1, 1, 2, 1, 2, 1, 5, 2, 2, 1, 5, 1, 2, 1, 14, 1, 5, 1, 5, 2, 2, 1, 15];

/// One representative of every group of order at most `max_order` (<= 24),
/// in order of size.
pub fn small_groups(max_order: usize) -> Vec<FiniteGroup> {
    assert!(max_order <= 24, "constructions cover orders up to 24");
    let all = all_small_groups();
    all.iter().filter(|g| g.order() <= max_order).cloned().collect()
}

fn all_small_groups() -> &'static Vec<FiniteGroup> {
    static CELL: OnceLock<Vec<FiniteGroup>> = OnceLock::new();
    CELL.get_or_init(|| {
        let mut by_order: Vec<Vec<FiniteGroup>> = vec![Vec::new(); 25];
        for n in 1..=24 {
            let mut cands: Vec<FiniteGroup> = vec![FiniteGroup::cyclic(n)];
            for d in 2..n {
                if n % d != 0 {
                    continue;
                }
                let e = n / d;
                if d <= e {
                    for g in &by_order[d] {
                        for h in &by_order[e] {
                            cands.push(FiniteGroup::direct_product(g, h));
                        }
                    }
                }
                // N x| C_d with |N| = e
                for nrm in &by_order[e] {
                    for (i, phi) in nrm.automorphisms().iter().enumerate() {
                        let mut p = phi.clone();
                        for _ in 1..d {
                            p = p.iter().map(|&x| phi[x]).collect();
                        }
                        if p.iter().enumerate().all(|(x, &y)| x == y) && phi.iter().enumerate().any(|(x, &y)| x != y) {
                            cands.push(FiniteGroup::semidirect(nrm, d, phi, &format!("aut{i}")));
                        }
                    }
                }
                // non-split cyclic extensions of cyclic groups
                for r in 1..e {
                    for s in (0..e).step_by(1) {
                        if let Some(g) = FiniteGroup::metacyclic(e, d, r, s) {
                            cands.push(g);
                        }
                    }
                }
            }
            let mut reps: Vec<FiniteGroup> = Vec::new();
            for c in cands {
                if c.order() == n && !reps.iter().any(|r| r.is_isomorphic(&c)) {
                    reps.push(c);
                }
            }
            by_order[n] = reps;
        }
        by_order.into_iter().flatten().collect()
    })
}

/// The default probe battery: all groups of order up to 24, then S5, A5, PSL(2,7).
pub fn default_probes() -> Vec<FiniteGroup> {
    let mut out = small_groups(24);
    out.push(FiniteGroup::symmetric(5));
    out.push(FiniteGroup::alternating5());
    out.push(FiniteGroup::psl27());
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn named_orders() {
        assert_eq!(FiniteGroup::symmetric(5).order(), 120);
        assert_eq!(FiniteGroup::alternating5().order(), 60);
        assert_eq!(FiniteGroup::psl27().order(), 168);
        assert_eq!(FiniteGroup::symmetric(3).conjugacy_classes().len(), 3);
        assert!(FiniteGroup::cyclic(6).is_isomorphic(&FiniteGroup::direct_product(
            &FiniteGroup::cyclic(2),
            &FiniteGroup::cyclic(3)
        )));
        assert!(!FiniteGroup::cyclic(4).is_isomorphic(&FiniteGroup::direct_product(
            &FiniteGroup::cyclic(2),
            &FiniteGroup::cyclic(2)
        )));
    }

    #[test]
    fn quaternion_is_metacyclic() {
        let q8 = FiniteGroup::metacyclic(4, 2, 3, 2).unwrap();
        assert_eq!(q8.order(), 8);
        assert_eq!((0..8).filter(|&a| q8.element_order(a) == 2).count(), 1);
    }

    #[test]
    fn battery_matches_known_counts() {
        let gs = small_groups(24);
        let mut counts = [0usize; 24];
        for g in &gs {
            counts[g.order() - 1] += 1;
        }
        assert_eq!(counts, SMALL_GROUP_COUNTS);
        let mut names: Vec<&str> = gs.iter().map(|g| g.name()).collect();
        names.sort_unstable();
        names.dedup();
        assert_eq!(names.len(), gs.len());
    }
}
