//! Finite-quotient fingerprints: exact homomorphism and epimorphism counts
//! from a presented group into a battery of small finite groups.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::finite::FiniteGroup;
use crate::presentation::Presentation;
use crate::words::{generator_of, Letter};

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ProbeCount {
    pub probe: String,
    pub order: usize,
    pub homs: u64,
    pub epis: u64,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FingerprintReport {
    pub entries: Vec<ProbeCount>,
}

impl FingerprintReport {
    /// Probes on which two reports differ.
    pub fn differences<'a>(&'a self, other: &'a FingerprintReport) -> Vec<(&'a ProbeCount, &'a ProbeCount)> {
        self.entries.iter().zip(&other.entries).filter(|(a, b)| a != b).collect()
    }

    pub fn agrees_with(&self, other: &FingerprintReport) -> bool {
        self.entries.len() == other.entries.len() && self.differences(other).is_empty()
    }
}

/// Counts for every probe; probes run in parallel, output keeps probe order.
pub fn fingerprint(pres: &Presentation, probes: &[FiniteGroup]) -> FingerprintReport {
    let entries = probes
        .par_iter()
        .map(|g| {
            let (homs, epis) = count_homomorphisms(pres, g);
            ProbeCount { probe: g.name().to_string(), order: g.order(), homs, epis }
        })
        .collect();
    FingerprintReport { entries }
}

/// `(homomorphisms, epimorphisms)` from the presented group into `g`.
///
/// Backtracks over generator images, checking each relator as soon as all
/// of its generators are assigned. The first generator only ranges over
/// conjugacy class representatives, weighted by class size.
pub fn count_homomorphisms(pres: &Presentation, g: &FiniteGroup) -> (u64, u64) {
    let n = pres.ngens();
    if n == 0 {
        let trivial = g.order() == 1;
        return (1, trivial as u64);
    }
    // relators grouped by the deepest generator they mention
    let mut at_depth: Vec<Vec<&[Letter]>> = vec![Vec::new(); n];
    for r in pres.relators() {
        let deepest = r.letters().iter().map(|&l| generator_of(l)).max().unwrap();
        at_depth[deepest].push(r.letters());
    }
    let classes = g.conjugacy_classes();
    let mut homs = 0u64;
    let mut epis = 0u64;
    let mut images = vec![0usize; n];
    for &(rep, size) in &classes {
        images[0] = rep;
        if !relators_hold(g, &at_depth[0], &images) {
            continue;
        }
        let (h, e) = extend(g, &at_depth, &mut images, 1);
        homs += h * size as u64;
        epis += e * size as u64;
    }
    (homs, epis)
}

fn extend(g: &FiniteGroup, at_depth: &[Vec<&[Letter]>], images: &mut [usize], depth: usize) -> (u64, u64) {
    if depth == images.len() {
        let epi = g.generated_order(images) == g.order();
        return (1, epi as u64);
    }
    let mut total = (0, 0);
    for x in 0..g.order() {
        images[depth] = x;
        if relators_hold(g, &at_depth[depth], images) {
            let (h, e) = extend(g, at_depth, images, depth + 1);
            total.0 += h;
            total.1 += e;
        }
    }
    total
}

fn relators_hold(g: &FiniteGroup, rels: &[&[Letter]], images: &[usize]) -> bool {
    rels.iter().all(|r| {
        let mut acc = 0usize;
        for &l in r.iter() {
            let x = images[generator_of(l)];
            acc = g.mul(acc, if l > 0 { x } else { g.inv(x) });
        }
        acc == 0
    })
}
