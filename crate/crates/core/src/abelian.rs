//! Abelianization: exponent-sum matrices and their invariants.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::integer::Integer;
use crate::matrix::{smith_diagonal, IntMatrix};
use crate::presentation::Presentation;
use crate::words::generator_of;

/// `Z^free_rank x Z/t_1 x ... x Z/t_k` with `t_1 | t_2 | ...` and every `t_i >= 2`.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct AbelianInvariants {
    pub torsion: Vec<Integer>,
    pub free_rank: usize,
}

impl AbelianInvariants {
    /// From the non-zero diagonal of a Smith form and the column count.
    pub fn from_diagonal(diagonal: &[Integer], ngens: usize) -> Self {
        let torsion = diagonal.iter().filter(|d| !d.is_unit()).cloned().collect();
        AbelianInvariants { torsion, free_rank: ngens - diagonal.len() }
    }

    pub fn trivial() -> Self {
        AbelianInvariants { torsion: Vec::new(), free_rank: 0 }
    }

    /// Parses the bracket notation, e.g. `[7,0,0]`.
    pub fn from_brackets(s: &str) -> Option<Self> {
        let inner = s.trim().strip_prefix('[')?.strip_suffix(']')?;
        let mut torsion = Vec::new();
        let mut free_rank = 0;
        for part in inner.split(',').map(str::trim).filter(|p| !p.is_empty()) {
            let v: Integer = part.parse().ok()?;
            if v.is_zero() {
                free_rank += 1;
            } else if free_rank > 0 || v.is_unit() || v.is_negative() {
                return None;
            } else {
                torsion.push(v);
            }
        }
        Some(AbelianInvariants { torsion, free_rank })
    }

    /// Order of the group, `None` when infinite.
    pub fn order(&self) -> Option<Integer> {
        (self.free_rank == 0).then(|| self.torsion.iter().fold(Integer::one(), |a, t| &a * t))
    }

    /// Dimension of `A / pA` over the field with `p` elements.
    pub fn p_rank(&self, p: u64) -> usize {
        self.free_rank + self.torsion.iter().filter(|t| t.mod_u64(p) == 0).count()
    }

    pub fn is_elementary_33(&self) -> bool {
        self.free_rank == 0 && self.torsion == [Integer::from(3), Integer::from(3)]
    }
}

impl fmt::Display for AbelianInvariants {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("[")?;
        let zeros = std::iter::repeat_n("0".to_string(), self.free_rank);
        let parts: Vec<String> = self.torsion.iter().map(|t| t.to_string()).chain(zeros).collect();
        f.write_str(&parts.join(","))?;
        f.write_str("]")
    }
}

impl fmt::Debug for AbelianInvariants {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

/// One row per relator, one column per generator, entries are exponent sums.
pub fn exponent_matrix(pres: &Presentation) -> IntMatrix {
    let rows = pres
        .relators()
        .iter()
        .map(|r| {
            let mut row: Vec<(usize, Integer)> = Vec::new();
            for &l in r.letters() {
                let sign = if l > 0 { 1 } else { -1 };
                row.push((generator_of(l), Integer::from(sign)));
            }
            row
        })
        .collect();
    IntMatrix::from_sparse_rows(pres.ngens(), rows)
}

pub fn abelian_invariants(pres: &Presentation) -> AbelianInvariants {
    invariants_of_matrix(&exponent_matrix(pres))
}

/// Invariants of the cokernel of `Z^rows -> Z^cols`.
pub fn invariants_of_matrix(m: &IntMatrix) -> AbelianInvariants {
    AbelianInvariants::from_diagonal(&smith_diagonal(m), m.ncols())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::parse::parse_presentation;

    #[test]
    fn triangle_exponents() {
        let t = parse_presentation("<x,y | x^3, y^3, (x*y)^3>").unwrap();
        assert_eq!(exponent_matrix(&t), IntMatrix::from_i64(&[vec![3, 0], vec![0, 3], vec![3, 3]]));
        assert_eq!(abelian_invariants(&t).to_string(), "[3,3]");
        let tp = parse_presentation("<x,y | x^3, y^3, (x*y)^3*(y*x)^3>").unwrap();
        assert_eq!(exponent_matrix(&tp).get(2, 0), Integer::from(6));
        assert_eq!(abelian_invariants(&tp).to_string(), "[3,3]");
    }

    #[test]
    fn free_group() {
        let f = Presentation::free(2);
        assert_eq!(exponent_matrix(&f).nrows(), 0);
        assert_eq!(abelian_invariants(&f).to_string(), "[0,0]");
    }

    #[test]
    fn rendering() {
        let a = AbelianInvariants { torsion: vec![Integer::from(3), Integer::from(21)], free_rank: 2 };
        assert_eq!(a.to_string(), "[3,21,0,0]");
        assert_eq!(AbelianInvariants::from_brackets("[3,21,0,0]"), Some(a));
        assert_eq!(AbelianInvariants::from_brackets("[7,0,0]").unwrap().p_rank(3), 2);
        assert_eq!(AbelianInvariants::trivial().to_string(), "[]");
        assert!(AbelianInvariants::from_brackets("[0,3]").is_none());
    }
}
