//! Exact model of the Euclidean (3,3,3) triangle group as affine isometries
//! `z -> w^k z + t` of the Eisenstein integers, and a search for
//! epimorphisms from a presented group onto it.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use serde::{Deserialize, Serialize};

use crate::abelian::exponent_matrix;
use crate::integer::Integer;
use crate::matrix::{nullspace_mod_p, smith_normal_form, IntMatrix};
use crate::presentation::Presentation;
use crate::words::{generator_of, Word};

/// `a + b*w` with `w^2 = -1 - w`.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Default, Serialize, Deserialize)]
pub struct EisensteinInt {
    pub a: Integer,
    pub b: Integer,
}

impl EisensteinInt {
    pub fn new(a: impl Into<Integer>, b: impl Into<Integer>) -> Self {
        EisensteinInt { a: a.into(), b: b.into() }
    }

    pub fn zero() -> Self {
        Self::default()
    }

    pub fn one() -> Self {
        Self::new(1, 0)
    }

    pub fn omega() -> Self {
        Self::new(0, 1)
    }

    /// `1 - w`, the prime above 3.
    pub fn one_minus_omega() -> Self {
        Self::new(1, -1)
    }

    pub fn is_zero(&self) -> bool {
        self.a.is_zero() && self.b.is_zero()
    }

    /// `a^2 - ab + b^2`.
    pub fn norm(&self) -> Integer {
        &(&(&self.a * &self.a) - &(&self.a * &self.b)) + &(&self.b * &self.b)
    }

    /// Multiplication by `w^k`.
    pub fn rotate(&self, k: u8) -> Self {
        let mut z = self.clone();
        for _ in 0..k % 3 {
            // w (a + b w) = -b + (a - b) w
            z = EisensteinInt { a: -&z.b, b: &z.a - &z.b };
        }
        z
    }

    /// True when `1 - w` divides `self`, i.e. `a + b = 0 mod 3`.
    pub fn divisible_by_one_minus_omega(&self) -> bool {
        (&self.a + &self.b).mod_u64(3) == 0
    }

    /// `self / (1 - w)`, exact; callers check divisibility first.
    pub fn div_one_minus_omega(&self) -> Self {
        // 1/(1 - w) = (2 + w)/3
        let p = self * &EisensteinInt::new(2, 1);
        let three = Integer::from(3);
        debug_assert!(p.a.is_divisible_by(&three) && p.b.is_divisible_by(&three));
        EisensteinInt { a: &p.a / &three, b: &p.b / &three }
    }
}

impl Add for &EisensteinInt {
    type Output = EisensteinInt;
    fn add(self, o: &EisensteinInt) -> EisensteinInt {
        EisensteinInt { a: &self.a + &o.a, b: &self.b + &o.b }
    }
}

impl Sub for &EisensteinInt {
    type Output = EisensteinInt;
    fn sub(self, o: &EisensteinInt) -> EisensteinInt {
        EisensteinInt { a: &self.a - &o.a, b: &self.b - &o.b }
    }
}

impl Neg for &EisensteinInt {
    type Output = EisensteinInt;
    fn neg(self) -> EisensteinInt {
        EisensteinInt { a: -&self.a, b: -&self.b }
    }
}

impl Mul for &EisensteinInt {
    type Output = EisensteinInt;
    fn mul(self, o: &EisensteinInt) -> EisensteinInt {
        let bd = &self.b * &o.b;
        EisensteinInt { a: &(&self.a * &o.a) - &bd, b: &(&(&self.a * &o.b) + &(&self.b * &o.a)) - &bd }
    }
}

impl fmt::Display for EisensteinInt {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match (self.a.is_zero(), self.b.is_zero()) {
            (_, true) => write!(f, "{}", self.a),
            (true, false) => write!(f, "{}w", self.b),
            _ if self.b.is_negative() => write!(f, "{}-{}w", self.a, self.b.abs()),
            _ => write!(f, "{}+{}w", self.a, self.b),
        }
    }
}

impl fmt::Debug for EisensteinInt {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

/// `z -> w^k z + t`.
#[derive(Clone, PartialEq, Eq, Hash, Debug, Serialize, Deserialize)]
pub struct AffineIsometry {
    pub t: EisensteinInt,
    pub k: u8,
}

impl AffineIsometry {
    pub fn identity() -> Self {
        AffineIsometry { t: EisensteinInt::zero(), k: 0 }
    }

    pub fn new(t: EisensteinInt, k: u8) -> Self {
        AffineIsometry { t, k: k % 3 }
    }

    /// The generator `x`: rotation about 0.
    pub fn x() -> Self {
        Self::new(EisensteinInt::zero(), 1)
    }

    /// The generator `y`: rotation about 1.
    pub fn y() -> Self {
        Self::new(EisensteinInt::one_minus_omega(), 1)
    }

    pub fn is_identity(&self) -> bool {
        self.k == 0 && self.t.is_zero()
    }

    /// `self ∘ other`: apply `other` first.
    pub fn compose(&self, other: &AffineIsometry) -> AffineIsometry {
        AffineIsometry::new(&other.t.rotate(self.k) + &self.t, self.k + other.k)
    }

    pub fn inverse(&self) -> AffineIsometry {
        let k = (3 - self.k) % 3;
        AffineIsometry::new(-&self.t.rotate(k), k)
    }

    pub fn apply(&self, z: &EisensteinInt) -> EisensteinInt {
        &z.rotate(self.k) + &self.t
    }

    /// 1, 3, or `None` for infinite order.
    pub fn order(&self) -> Option<u32> {
        if self.is_identity() {
            Some(1)
        } else if self.k != 0 {
            Some(3)
        } else {
            None
        }
    }

    /// Fixed point of a rotation, when it is an Eisenstein integer.
    pub fn center(&self) -> Option<EisensteinInt> {
        // z = w^k z + t  =>  z = t / (1 - w^k)
        if self.k == 0 {
            return None;
        }
        let den = &EisensteinInt::one() - &EisensteinInt::one().rotate(self.k);
        // divide t by den in Z[w]: t * conj(den) / N(den), N(den) = 3
        let conj = EisensteinInt::new(&den.a - &den.b, -&den.b);
        let p = &self.t * &conj;
        let n = den.norm();
        (p.a.is_divisible_by(&n) && p.b.is_divisible_by(&n)).then(|| EisensteinInt { a: &p.a / &n, b: &p.b / &n })
    }

    /// Membership in the triangle group: the translation part lies in `(1 - w)Z[w]`.
    pub fn in_triangle_group(&self) -> bool {
        self.t.divisible_by_one_minus_omega()
    }
}

impl fmt::Display for AffineIsometry {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {})", self.t, self.k)
    }
}

/// Image of a word under a generator assignment.
pub fn evaluate(w: &Word, images: &[AffineIsometry]) -> AffineIsometry {
    let mut acc = AffineIsometry::identity();
    for &l in w.letters() {
        let g = &images[generator_of(l)];
        acc = if l > 0 { acc.compose(g) } else { acc.compose(&g.inverse()) };
    }
    acc
}

/// True when every relator maps to the identity.
pub fn is_homomorphism(pres: &Presentation, images: &[AffineIsometry]) -> bool {
    images.len() == pres.ngens() && pres.relators().iter().all(|r| evaluate(r, images).is_identity())
}

/// Certifies that the images generate the whole triangle group: some image
/// rotates, and the translation subgroup of the image is all of
/// `(1 - w)Z[w]` (2x2 Hermite determinant +-1 after dividing by `1 - w`).
pub fn surjectivity_check(images: &[AffineIsometry]) -> bool {
    if images.iter().any(|g| !g.in_triangle_group()) {
        return false;
    }
    let Some(r) = images.iter().find(|g| g.k != 0) else { return false };
    let r = if r.k == 1 { r.clone() } else { r.compose(r) };
    // transversal {1, r, r^2} of the translation subgroup
    let reps = [AffineIsometry::identity(), r.clone(), r.compose(&r)];
    let mut translations = Vec::new();
    for rep in &reps {
        for g in images {
            let p = rep.compose(g);
            let back = &reps[p.k as usize];
            let s = p.compose(&back.inverse());
            debug_assert_eq!(s.k, 0);
            translations.push(s.t.clone());
            translations.push(s.t.rotate(1));
        }
    }
    lattice_determinant(&translations.iter().map(EisensteinInt::div_one_minus_omega).collect::<Vec<_>>())
        .is_unit()
}

/// Index of the Z-span of the vectors in `Z^2` (0 when not of full rank).
fn lattice_determinant(vs: &[EisensteinInt]) -> Integer {
    let rows: Vec<Vec<Integer>> = vs.iter().map(|v| vec![v.a.clone(), v.b.clone()]).collect();
    if rows.is_empty() {
        return Integer::zero();
    }
    let snf = smith_normal_form(&IntMatrix::from_dense_with_cols(&rows, 2), false);
    if snf.rank < 2 {
        Integer::zero()
    } else {
        &snf.diagonal[0] * &snf.diagonal[1]
    }
}

#[derive(Clone, Debug)]
pub enum EpiSearch {
    Found(Vec<AffineIsometry>),
    /// Budget exhausted without a certified assignment; not a proof of absence.
    Inconclusive { candidates_tried: usize },
}

/// Search for a certified epimorphism onto the triangle group.
///
/// The rotation parts form a homomorphism to `Z/3`, read off the mod-3
/// nullspace of the exponent matrix. For each such choice the translation
/// parts solve a homogeneous `Z[w]`-linear system; its integer kernel is
/// enumerated by increasing coefficient size until `budget` candidates
/// have been tried.
pub fn find_epi_to_triangle(pres: &Presentation, budget: usize) -> EpiSearch {
    let n = pres.ngens();
    let mut tried = 0;
    let systems: Vec<(Vec<u8>, Vec<Vec<Integer>>)> = rotation_parts(pres)
        .into_iter()
        .map(|rho| {
            let k = translation_kernel(pres, &rho);
            (rho, k)
        })
        .filter(|(_, k)| !k.is_empty())
        .collect();
    // shells of growing radius, interleaved across the rotation choices
    for radius in 1..=64 {
        for (rho, kernel) in &systems {
            for coeffs in shell(kernel.len(), radius) {
                if tried >= budget {
                    return EpiSearch::Inconclusive { candidates_tried: tried };
                }
                tried += 1;
                let images = assemble(n, rho, kernel, &coeffs);
                if surjectivity_check(&images) && is_homomorphism(pres, &images) {
                    return EpiSearch::Found(images);
                }
            }
        }
    }
    EpiSearch::Inconclusive { candidates_tried: tried }
}

/// Non-zero homomorphisms to `Z/3` up to sign, in a fixed order.
fn rotation_parts(pres: &Presentation) -> Vec<Vec<u8>> {
    let basis = nullspace_mod_p(&exponent_matrix(pres), 3).expect("3 is prime");
    let r = basis.len();
    let mut out = Vec::new();
    let total = 3usize.pow(r as u32);
    for code in 1..total {
        let mut c = vec![0u64; r];
        let mut x = code;
        for ci in c.iter_mut() {
            *ci = (x % 3) as u64;
            x /= 3;
        }
        // keep one of each {v, -v}: first non-zero coefficient equal to 1
        if c.iter().find(|&&v| v != 0) != Some(&1) {
            continue;
        }
        let mut v = vec![0u8; pres.ngens()];
        for (ci, b) in c.iter().zip(&basis) {
            for (vi, bi) in v.iter_mut().zip(b) {
                *vi = ((*vi as u64 + ci * bi) % 3) as u8;
            }
        }
        out.push(v.clone());
        out.push(v.iter().map(|&x| (3 - x) % 3).collect());
    }
    out
}

/// Integer basis of translation parts `s_g` (coordinates `a, b` per
/// generator) making every relator translate by zero, with rotations fixed.
/// Translation parts are `(1 - w) s_g`; the equations are `Z[w]`-linear so
/// the common factor drops out.
fn translation_kernel(pres: &Presentation, rho: &[u8]) -> Vec<Vec<Integer>> {
    let n = pres.ngens();
    let mut rows: Vec<Vec<Integer>> = Vec::new();
    for r in pres.relators() {
        // coefficient of s_g in the relator's translation: a sum of +-w^j
        let mut coef = vec![EisensteinInt::zero(); n];
        let mut k = 0u8;
        for &l in r.letters() {
            let g = generator_of(l);
            if l > 0 {
                coef[g] = &coef[g] + &EisensteinInt::one().rotate(k);
                k = (k + rho[g]) % 3;
            } else {
                // (t, j)^-1 = (-w^{-j} t, -j)
                k = (k + 3 - rho[g]) % 3;
                coef[g] = &coef[g] - &EisensteinInt::one().rotate(k);
            }
        }
        // c * (a + b w) = (ca - cb_w b) + (...)w, written as two integer rows
        let mut re = vec![Integer::zero(); 2 * n];
        let mut im = vec![Integer::zero(); 2 * n];
        for g in 0..n {
            let c = &coef[g];
            let one = c * &EisensteinInt::one();
            let w = c * &EisensteinInt::omega();
            re[2 * g] = one.a;
            im[2 * g] = one.b;
            re[2 * g + 1] = w.a;
            im[2 * g + 1] = w.b;
        }
        rows.push(re);
        rows.push(im);
    }
    if rows.is_empty() {
        return (0..2 * n)
            .map(|i| (0..2 * n).map(|j| Integer::from((i == j) as i64)).collect())
            .collect();
    }
    let a = IntMatrix::from_dense_with_cols(&rows, 2 * n);
    let snf = smith_normal_form(&a, true);
    let v = snf.v.expect("transforms requested").to_dense();
    (snf.rank..2 * n).map(|j| v.iter().map(|row| row[j].clone()).collect()).collect()
}

fn assemble(n: usize, rho: &[u8], kernel: &[Vec<Integer>], coeffs: &[i64]) -> Vec<AffineIsometry> {
    (0..n)
        .map(|g| {
            let mut a = Integer::zero();
            let mut b = Integer::zero();
            for (c, v) in coeffs.iter().zip(kernel) {
                if *c != 0 {
                    let c = Integer::from(*c);
                    a = &a + &(&c * &v[2 * g]);
                    b = &b + &(&c * &v[2 * g + 1]);
                }
            }
            AffineIsometry::new(&EisensteinInt { a, b } * &EisensteinInt::one_minus_omega(), rho[g])
        })
        .collect()
}

/// Integer vectors of max-norm exactly `r`, ordered by L1 norm then
/// lexicographically.
fn shell(dim: usize, r: i64) -> Vec<Vec<i64>> {
    let mut out = Vec::new();
    if dim == 0 {
        return out;
    }
    let mut cur = vec![-r; dim];
    loop {
        if cur.iter().map(|c| c.abs()).max() == Some(r) {
            out.push(cur.clone());
        }
        let mut i = 0;
        while i < dim {
            if cur[i] < r {
                cur[i] += 1;
                break;
            }
            cur[i] = -r;
            i += 1;
        }
        if i == dim {
            break;
        }
    }
    out.sort_by_key(|v| (v.iter().map(|c| c.abs()).sum::<i64>(), v.clone()));
    out
}
