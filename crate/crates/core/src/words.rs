//! Freely reduced words over a signed alphabet.
//!
//! A letter is a non-zero `i32`: `g + 1` stands for generator `g` and
//! `-(g + 1)` for its inverse. Names only live in a [`Presentation`]'s
//! symbol table.
//!
//! [`Presentation`]: crate::presentation::Presentation

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::WordError;

/// Signed generator reference.
pub type Letter = i32;

/// Letter for generator `index`, raised to `+1` or `-1`.
#[inline]
pub fn letter(index: usize, positive: bool) -> Letter {
    let l = index as Letter + 1;
    if positive {
        l
    } else {
        -l
    }
}

/// Generator index a letter refers to.
#[inline]
pub fn generator_of(l: Letter) -> usize {
    (l.unsigned_abs() - 1) as usize
}

/// Coset-table column of a letter: `2g` for `g`, `2g + 1` for `g^-1`.
#[inline]
pub fn column_of(l: Letter) -> usize {
    let g = generator_of(l);
    if l > 0 {
        2 * g
    } else {
        2 * g + 1
    }
}

/// Inverse of [`column_of`].
#[inline]
pub fn letter_of_column(col: usize) -> Letter {
    letter(col / 2, col % 2 == 0)
}

/// A freely reduced word. The empty word is the identity.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Default, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Word(Vec<Letter>);

impl Word {
    pub fn identity() -> Self {
        Word(Vec::new())
    }

    /// Freely reduces an arbitrary letter sequence. Letters must be non-zero.
    pub fn reduce<I: IntoIterator<Item = Letter>>(letters: I) -> Self {
        let mut out: Vec<Letter> = Vec::new();
        for l in letters {
            debug_assert!(l != 0);
            push_reduced(&mut out, l);
        }
        Word(out)
    }

    /// Single generator (or inverse).
    pub fn generator(index: usize) -> Self {
        Word(vec![letter(index, true)])
    }

    pub fn letters(&self) -> &[Letter] {
        &self.0
    }

    pub fn into_letters(self) -> Vec<Letter> {
        self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn inverse(&self) -> Word {
        Word(self.0.iter().rev().map(|&l| -l).collect())
    }

    /// Reduced product `self * other`.
    pub fn mul(&self, other: &Word) -> Word {
        let mut out = self.0.clone();
        for &l in &other.0 {
            push_reduced(&mut out, l);
        }
        Word(out)
    }

    /// `self^n`; negative exponents invert.
    pub fn pow(&self, n: i64) -> Word {
        let base = if n < 0 { self.inverse() } else { self.clone() };
        let mut out = Word::identity();
        for _ in 0..n.unsigned_abs() {
            out = out.mul(&base);
        }
        out
    }

    /// Largest generator index used, plus one.
    pub fn rank_needed(&self) -> usize {
        self.0.iter().map(|&l| generator_of(l) + 1).max().unwrap_or(0)
    }

    /// Signed exponent sum of each generator.
    pub fn exponent_sums(&self, ngens: usize) -> Vec<i64> {
        let mut sums = vec![0i64; ngens];
        for &l in &self.0 {
            sums[generator_of(l)] += l.signum() as i64;
        }
        sums
    }

    pub fn is_cyclically_reduced(&self) -> bool {
        match (self.0.first(), self.0.last()) {
            (Some(&a), Some(&b)) => self.0.len() == 1 || a != -b,
            _ => true,
        }
    }
}

impl fmt::Debug for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Word{:?}", self.0)
    }
}

#[inline]
pub(crate) fn push_reduced(out: &mut Vec<Letter>, l: Letter) {
    if out.last() == Some(&-l) {
        out.pop();
    } else {
        out.push(l);
    }
}

/// True when no letter is zero and no letter sits next to its inverse.
pub fn is_freely_reduced(letters: &[Letter]) -> bool {
    letters.iter().all(|&l| l != 0) && letters.windows(2).all(|p| p[0] != -p[1])
}

/// Free reduction with a range check against a rank-`ngens` alphabet.
pub fn free_reduce(letters: &[Letter], ngens: usize) -> Result<Word, WordError> {
    for (pos, &l) in letters.iter().enumerate() {
        if l == 0 || generator_of(l) >= ngens {
            return Err(WordError::UnknownGenerator { letter: l, position: pos });
        }
    }
    Ok(Word::reduce(letters.iter().copied()))
}

pub fn invert(w: &Word) -> Word {
    w.inverse()
}

/// `x^g = g^-1 x g`.
pub fn conjugate(x: &Word, g: &Word) -> Word {
    g.inverse().mul(x).mul(g)
}

/// `(x, y) = x^-1 y^-1 x y`.
pub fn commutator(x: &Word, y: &Word) -> Word {
    x.inverse().mul(&y.inverse()).mul(x).mul(y)
}

/// Strips matching letters from both ends. Returns `(core, c)` with
/// `w = c^-1 * core * c`, i.e. `w` is the conjugate `core^c`.
pub fn cyclic_reduce(w: &Word) -> (Word, Word) {
    let l = w.letters();
    let mut i = 0;
    let mut j = l.len();
    while j - i >= 2 && l[i] == -l[j - 1] {
        i += 1;
        j -= 1;
    }
    let core = Word(l[i..j].to_vec());
    // w = l[..i] * core * l[j..], and l[j..] = (l[..i])^-1
    let conj = Word(l[j..].to_vec());
    (core, conj)
}

/// Canonical representative of the class of a cyclically reduced word
/// under rotation and inversion. Used to detect duplicate relators.
pub fn cyclic_canonical(w: &[Letter]) -> Vec<Letter> {
    if w.is_empty() {
        return Vec::new();
    }
    let inv: Vec<Letter> = w.iter().rev().map(|&l| -l).collect();
    let a = least_rotation(w);
    let b = least_rotation(&inv);
    a.min(b)
}

fn least_rotation(w: &[Letter]) -> Vec<Letter> {
    // Booth's algorithm
    let n = w.len();
    let s: Vec<Letter> = w.iter().chain(w.iter()).copied().collect();
    let mut f = vec![usize::MAX; 2 * n];
    let mut k = 0usize;
    for j in 1..2 * n {
        let sj = s[j];
        let mut i = f[j - k - 1];
        while i != usize::MAX && sj != s[k + i + 1] {
            if sj < s[k + i + 1] {
                k = j - i - 1;
            }
            i = f[i];
        }
        if i == usize::MAX && sj != s[k] {
            if sj < s[k] {
                k = j;
            }
            f[j - k] = usize::MAX;
        } else {
            f[j - k] = if i == usize::MAX { 0 } else { i + 1 };
        }
    }
    s[k..k + n].to_vec()
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    const U: Letter = 1;
    const W: Letter = 2;

    fn brute_reduce(s: &[Letter]) -> Vec<Letter> {
        let mut v = s.to_vec();
        loop {
            let pos = v.windows(2).position(|p| p[0] == -p[1]);
            match pos {
                Some(i) => {
                    v.drain(i..i + 2);
                }
                None => return v,
            }
        }
    }

    #[test]
    fn free_reduce_examples() {
        assert_eq!(free_reduce(&[U, -U, W], 2).unwrap().letters(), &[W]);
        assert!(free_reduce(&[], 2).unwrap().is_empty());
        let raw = [U, W, -W, U, U, -U];
        assert_eq!(free_reduce(&raw, 2).unwrap().letters(), &[U, U]);
        assert_eq!(brute_reduce(&raw), vec![U, U]);
    }

    #[test]
    fn free_reduce_rejects_unknown_generator() {
        let err = free_reduce(&[U, 3], 2).unwrap_err();
        assert_eq!(err, WordError::UnknownGenerator { letter: 3, position: 1 });
        assert!(free_reduce(&[0], 2).is_err());
    }

    #[test]
    fn invert_examples() {
        let w = Word::reduce([U, -W]);
        assert_eq!(invert(&w).letters(), &[W, -U]);
        assert!(invert(&Word::identity()).is_empty());
        assert!(w.mul(&invert(&w)).is_empty());
    }

    #[test]
    fn conjugate_examples() {
        let w = Word::generator(1);
        let u = Word::generator(0);
        assert_eq!(conjugate(&w, &Word::identity()), w);
        assert_eq!(conjugate(&w, &u).letters(), &[-U, W, U]);
        let uw = Word::reduce([U, W]);
        assert_eq!(conjugate(&w, &uw).letters(), &[-W, -U, W, U, W]);
    }

    #[test]
    fn commutator_examples() {
        let u = Word::generator(0);
        let w = Word::generator(1);
        assert!(commutator(&u, &u).is_empty());
        assert_eq!(commutator(&u, &w).letters(), &[-U, -W, U, W]);
        assert_eq!(commutator(&u, &w.inverse()).letters(), &[-U, W, U, -W]);
    }

    #[test]
    fn cyclic_reduce_examples() {
        let (core, c) = cyclic_reduce(&Word::reduce([-U, W, U]));
        assert_eq!(core.letters(), &[W]);
        assert_eq!(c.letters(), &[U]);

        let (core, c) = cyclic_reduce(&Word::generator(1));
        assert_eq!(core.letters(), &[W]);
        assert!(c.is_empty());

        // (u w u^-1)^2 = u w w u^-1, cyclic core w w
        let m = Word::reduce([U, W, -U]);
        let sq = m.mul(&m);
        let (core, c) = cyclic_reduce(&sq);
        assert_eq!(core.len(), 2);
        assert_eq!(conjugate(&core, &c), sq);
    }

    #[test]
    fn canonical_form_identifies_rotations_and_inverses() {
        let a = [U, W, W, -U, W];
        let rot = [W, -U, W, U, W];
        let inv: Vec<Letter> = a.iter().rev().map(|&l| -l).collect();
        assert_eq!(cyclic_canonical(&a), cyclic_canonical(&rot));
        assert_eq!(cyclic_canonical(&a), cyclic_canonical(&inv));
        assert_ne!(cyclic_canonical(&a), cyclic_canonical(&[U, W, W, W, W]));
    }

    fn raw_letters(max_len: usize) -> impl Strategy<Value = Vec<Letter>> {
        prop::collection::vec(prop_oneof![Just(1), Just(-1), Just(2), Just(-2), Just(3), Just(-3)], 0..=max_len)
    }

    proptest! {
        #[test]
        fn reduction_matches_brute_force(s in raw_letters(64)) {
            let w = Word::reduce(s.iter().copied());
            let brute = brute_reduce(&s);
            prop_assert_eq!(w.letters(), brute.as_slice());
            prop_assert_eq!(Word::reduce(w.letters().iter().copied()), w.clone());
            prop_assert_eq!(w.len() % 2, s.len() % 2);
        }

        #[test]
        fn booth_matches_brute_minimum(s in raw_letters(12)) {
            prop_assume!(!s.is_empty());
            let brute = (0..s.len())
                .map(|k| s[k..].iter().chain(s[..k].iter()).copied().collect::<Vec<_>>())
                .min()
                .unwrap();
            prop_assert_eq!(least_rotation(&s), brute);
        }

        #[test]
        fn length_subadditive(s in raw_letters(32), t in raw_letters(32)) {
            let st: Vec<Letter> = s.iter().chain(t.iter()).copied().collect();
            let a = Word::reduce(s.iter().copied());
            let b = Word::reduce(t.iter().copied());
            prop_assert!(Word::reduce(st).len() <= a.len() + b.len());
        }

        #[test]
        fn word_identities(x in raw_letters(16), y in raw_letters(16)) {
            let x = Word::reduce(x);
            let y = Word::reduce(y);
            prop_assert_eq!(conjugate(&conjugate(&x, &y), &y.inverse()), x.clone());
            prop_assert_eq!(commutator(&x, &y), commutator(&y, &x).inverse());
            let (core, c) = cyclic_reduce(&x);
            prop_assert!(core.is_cyclically_reduced());
            prop_assert_eq!(conjugate(&core, &c), x);
        }
    }
}
