//! Numerical invariants of the surface tower: triple covers, the closed
//! forms for `X~_n` and `S_n`, and distances to the Bogomolov-Miyaoka-Yau
//! line. Everything is exact.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};

use crate::error::TowerError;

/// `K^2` and `chi` of a surface; `c2` follows from Noether's formula.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct SurfaceInvariants {
    pub k2: BigInt,
    pub chi: BigInt,
}

impl SurfaceInvariants {
    pub fn new(k2: impl Into<BigInt>, chi: impl Into<BigInt>) -> Self {
        SurfaceInvariants { k2: k2.into(), chi: chi.into() }
    }

    pub fn c1sq(&self) -> BigInt {
        self.k2.clone()
    }

    pub fn c2(&self) -> BigInt {
        BigInt::from(12) * &self.chi - &self.k2
    }
}

/// Branch data of a cyclic triple cover: `n` triples of cusps and `m`
/// triples of `1/3(1,1)` points.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct CoverBranchData {
    pub n: u64,
    pub m: u64,
}

/// `chi(Y) = 3 chi - 2n - m`, `K_Y^2 = 3 K^2 + 3m`.
pub fn triple_cover_invariants(base: &SurfaceInvariants, branch: CoverBranchData) -> SurfaceInvariants {
    let three = BigInt::from(3);
    SurfaceInvariants {
        k2: &three * &base.k2 + &three * BigInt::from(branch.m),
        chi: &three * &base.chi - BigInt::from(2 * branch.n) - BigInt::from(branch.m),
    }
}

/// One level of the tower.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TowerRow {
    pub level: u32,
    /// The resolution `X~_n`.
    pub resolved: SurfaceInvariants,
    /// The smooth cover `S_n`.
    pub smooth: SurfaceInvariants,
    /// `9 chi - 18 - K^2` for `X~_n`.
    pub residual: BigInt,
    /// `K^2 / chi` for `X~_n`.
    pub ratio: BigRational,
    /// `(p_g, q)` of `S_n`, known only at the first level.
    pub smooth_pg_q: Option<(u32, u32)>,
}

fn pow3(e: u32) -> BigInt {
    num_traits::pow(BigInt::from(3), e as usize)
}

/// Closed-form invariants of level `level >= 1`. The first level is a pair
/// of known constants; the formulas hold from level 2 on.
pub fn tower_row(level: u32) -> Result<TowerRow, TowerError> {
    let (resolved, smooth, pg_q) = match level {
        0 => return Err(TowerError::LevelOutOfRange(level)),
        1 => (SurfaceInvariants::new(2, 2), SurfaceInvariants::new(9, 1), Some((1, 1))),
        n => (
            SurfaceInvariants::new(pow3(n), pow3(n - 2) + 2),
            SurfaceInvariants::new(pow3(n + 1), pow3(n - 1)),
            None,
        ),
    };
    let residual = BigInt::from(9) * &resolved.chi - 18 - &resolved.k2;
    let ratio = BigRational::new(resolved.k2.clone(), resolved.chi.clone());
    Ok(TowerRow { level, resolved, smooth, residual, ratio, smooth_pg_q: pg_q })
}

/// Position of a surface relative to the line `K^2 = 9 chi`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BmyDiagnostics {
    /// `K^2 - 9 chi`; zero on the line itself.
    pub residual_line: BigInt,
    pub c2: BigInt,
    /// `c1^2 - 3 c2 + 72`; zero on the parallel line `K^2 = 9 chi - 18`.
    pub c1sq_minus_3c2_plus_72: BigInt,
    pub ratio: BigRational,
}

pub fn bmy_diagnostics(inv: &SurfaceInvariants) -> Result<BmyDiagnostics, TowerError> {
    if inv.chi.is_zero() {
        return Err(TowerError::ZeroChi);
    }
    let c2 = inv.c2();
    Ok(BmyDiagnostics {
        residual_line: &inv.k2 - BigInt::from(9) * &inv.chi,
        c1sq_minus_3c2_plus_72: inv.c1sq() - BigInt::from(3) * &c2 + 72,
        c2,
        ratio: BigRational::new(inv.k2.clone(), inv.chi.clone()),
    })
}

/// Outcome of [`check_tower`]: the rows and every identity that failed.
#[derive(Clone, Debug)]
pub struct TowerCheck {
    pub rows: Vec<TowerRow>,
    pub failures: Vec<String>,
}

impl TowerCheck {
    pub fn passed(&self) -> bool {
        self.failures.is_empty()
    }
}

/// Checks the tower identities for levels `1..=levels`:
/// closed forms against the cover recurrences (`X~_n -> X~_{n+1}` with
/// branch `(2,0)`, `X~_n -> S_n` with `(3,0)`, and `X~_1 -> X~_2` with
/// `(1,1)`), both lines, and monotone convergence of `K^2/chi` to 9 with a
/// gap below `12 / 2^(n-2)`.
pub fn check_tower(levels: u32) -> TowerCheck {
    let rows: Vec<TowerRow> = (1..=levels).map(|n| tower_row(n).expect("levels start at 1")).collect();
    let mut failures = Vec::new();
    let mut fail = |n: u32, what: &str| failures.push(format!("level {n}: {what}"));
    let nine = BigRational::from_integer(BigInt::from(9));
    let mut iterated = rows[0].resolved.clone();
    for (i, row) in rows.iter().enumerate().skip(1) {
        let n = row.level;
        let branch = if n == 2 { CoverBranchData { n: 1, m: 1 } } else { CoverBranchData { n: 2, m: 0 } };
        iterated = triple_cover_invariants(&iterated, branch);
        if iterated != row.resolved {
            fail(n, "closed form for X~ disagrees with the iterated cover");
        }
        if triple_cover_invariants(&row.resolved, CoverBranchData { n: 3, m: 0 }) != row.smooth {
            fail(n, "S is not the (3,0) cover of X~");
        }
        if !row.residual.is_zero() {
            fail(n, "X~ is off the line K^2 = 9 chi - 18");
        }
        let d = bmy_diagnostics(&row.resolved).expect("chi is positive");
        if !d.c1sq_minus_3c2_plus_72.is_zero() {
            fail(n, "c1^2 - 3 c2 + 72 is not zero");
        }
        let gap = &nine - &row.ratio;
        let eps = BigRational::new(BigInt::from(12), num_traits::pow(BigInt::from(2), (n - 2) as usize));
        if gap <= BigRational::zero() || gap >= eps {
            fail(n, "ratio gap outside (0, 12/2^(n-2))");
        }
        if i >= 2 && row.ratio <= rows[i - 1].ratio {
            fail(n, "ratio did not increase");
        }
    }
    for row in &rows {
        let d = bmy_diagnostics(&row.smooth).expect("chi is positive");
        if !d.residual_line.is_zero() {
            fail(row.level, "S is off the line K^2 = 9 chi");
        }
        if row.smooth.chi < BigInt::one() || row.resolved.chi < BigInt::one() {
            fail(row.level, "chi below 1");
        }
    }
    TowerCheck { rows, failures }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn triple_covers() {
        let base = SurfaceInvariants::new(2, 2);
        assert_eq!(triple_cover_invariants(&base, CoverBranchData { n: 1, m: 1 }), SurfaceInvariants::new(9, 3));
        assert_eq!(triple_cover_invariants(&base, CoverBranchData { n: 0, m: 0 }), SurfaceInvariants::new(6, 6));
        let x5 = tower_row(5).unwrap().resolved;
        assert_eq!(triple_cover_invariants(&x5, CoverBranchData { n: 3, m: 0 }), SurfaceInvariants::new(729, 81));
    }

    #[test]
    fn rows() {
        assert_eq!(tower_row(0), Err(TowerError::LevelOutOfRange(0)));
        let r1 = tower_row(1).unwrap();
        assert_eq!((r1.resolved, r1.smooth), (SurfaceInvariants::new(2, 2), SurfaceInvariants::new(9, 1)));
        let r2 = tower_row(2).unwrap();
        assert_eq!(r2.resolved, SurfaceInvariants::new(9, 3));
        assert!(r2.residual.is_zero());
        let r5 = tower_row(5).unwrap();
        assert_eq!(r5.resolved, SurfaceInvariants::new(243, 29));
        assert_eq!(r5.smooth, SurfaceInvariants::new(729, 81));
        assert_eq!(tower_row(9).unwrap().ratio, BigRational::new(19683.into(), 2189.into()));
        let r10 = tower_row(10).unwrap();
        assert_eq!(r10.ratio, BigRational::new(59049.into(), 6563.into()));
        let gap = BigRational::from_integer(9.into()) - r10.ratio;
        assert!(gap < BigRational::new(1.into(), 100.into()));
    }

    #[test]
    fn diagnostics() {
        let d = bmy_diagnostics(&SurfaceInvariants::new(9, 1)).unwrap();
        assert!(d.residual_line.is_zero());
        assert_eq!(d.c2, BigInt::from(3));
        assert_eq!(bmy_diagnostics(&SurfaceInvariants::new(1, 0)), Err(TowerError::ZeroChi));
        let x = tower_row(7).unwrap().resolved;
        assert!(bmy_diagnostics(&x).unwrap().c1sq_minus_3c2_plus_72.is_zero());
    }

    #[test]
    fn forty_levels() {
        let check = check_tower(40);
        assert!(check.passed(), "{:?}", check.failures);
        assert_eq!(check.rows.len(), 40);
    }
}
