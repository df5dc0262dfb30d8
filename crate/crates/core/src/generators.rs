//! Seeded instance families and basis-pair sampling.
//!
//! All randomness comes from `ChaCha8Rng::seed_from_u64(seed)`; the identifier
//! [`RNG_ID`] is written into generated instance files.

use std::fmt;
use std::str::FromStr;

use rand::seq::{index, IndexedRandom};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{input, Error, Result};
use crate::matroid::{all_bases, basis_unchecked, BasisPairInstance, Matroid};
use crate::set::{ElementSet, GroundSet};
use crate::split::{HyperedgeConstraint, SplitRepresentation};

pub const RNG_ID: &str = "chacha8-seed_from_u64/v1";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Family {
    Uniform,
    SparsePaving,
    Paving,
    ElementarySplit,
    K4,
}

impl Family {
    pub const ALL: [Family; 5] = [
        Family::Uniform,
        Family::SparsePaving,
        Family::Paving,
        Family::ElementarySplit,
        Family::K4,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Family::Uniform => "uniform",
            Family::SparsePaving => "sparse-paving",
            Family::Paving => "paving",
            Family::ElementarySplit => "elementary-split",
            Family::K4 => "k4",
        }
    }
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Family {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Family::ALL
            .into_iter()
            .find(|f| f.name() == s)
            .ok_or_else(|| Error::Input(format!("unknown family {s:?}")))
    }
}

/// Parameters of one generated instance.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GeneratorConfig {
    pub family: Family,
    pub n: usize,
    pub r: usize,
    pub seed: u64,
    /// Target number of hyperedges.
    pub density: usize,
    /// Hyperedges placed before any sampling; they count towards `density`.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub forced: Vec<HyperedgeConstraint>,
}

impl GeneratorConfig {
    pub fn new(family: Family, n: usize, r: usize, seed: u64, density: usize) -> Self {
        GeneratorConfig {
            family,
            n,
            r,
            seed,
            density,
            forced: Vec::new(),
        }
    }

    pub fn generate(&self) -> Result<SplitRepresentation> {
        match self.family {
            Family::Uniform => gen_uniform(self.n, self.r),
            Family::K4 => Ok(k4()),
            Family::SparsePaving => {
                paving_family(self.n, self.r, self.seed, self.density, &self.forced, true)
            }
            Family::Paving => paving_family(self.n, self.r, self.seed, self.density, &self.forced, false),
            Family::ElementarySplit => split_family(self.n, self.r, self.seed, self.density, &self.forced),
        }
    }
}

fn attempts(density: usize) -> usize {
    100 + 50 * density
}

fn random_subset(rng: &mut ChaCha8Rng, n: usize, size: usize) -> ElementSet {
    index::sample(rng, n, size).into_iter().collect()
}

pub fn gen_uniform(n: usize, r: usize) -> Result<SplitRepresentation> {
    GroundSet::new(n)?;
    if r > n {
        return input(format!("rank {r} exceeds ground set size {n}"));
    }
    SplitRepresentation::uniform(n, r)
}

fn paving_family(
    n: usize,
    r: usize,
    seed: u64,
    density: usize,
    forced: &[HyperedgeConstraint],
    sparse: bool,
) -> Result<SplitRepresentation> {
    GroundSet::new(n)?;
    if r < 2 || r + 1 > n {
        return input(format!("paving families need 2 <= r <= n - 1, got n = {n}, r = {r}"));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut accepted: Vec<HyperedgeConstraint> = forced.to_vec();
    for _ in 0..attempts(density) {
        if accepted.len() >= density {
            break;
        }
        let size = if sparse { r } else { rng.random_range(r..n) };
        let h = random_subset(&mut rng, n, size);
        if accepted.iter().all(|c| (c.elements & h).len() + 2 <= r) {
            accepted.push(HyperedgeConstraint::new(h, r - 1));
        }
    }
    let rep = SplitRepresentation::new(n, r, accepted)?;
    rep.ensure_valid()?;
    Ok(rep)
}

/// Sparse paving: `density` circuit-hyperplanes of size `r`, pairwise meeting in at
/// most `r - 2` elements, accepted greedily from random samples.
pub fn gen_sparse_paving(n: usize, r: usize, seed: u64, density: usize) -> Result<SplitRepresentation> {
    paving_family(n, r, seed, density, &[], true)
}

/// Paving: like [`gen_sparse_paving`] with hyperedge sizes drawn from `r..n`.
pub fn gen_paving(n: usize, r: usize, seed: u64, density: usize) -> Result<SplitRepresentation> {
    paving_family(n, r, seed, density, &[], false)
}

fn split_family(
    n: usize,
    r: usize,
    seed: u64,
    density: usize,
    forced: &[HyperedgeConstraint],
) -> Result<SplitRepresentation> {
    GroundSet::new(n)?;
    if r < 1 || r > n {
        return input(format!("elementary split families need 1 <= r <= n, got n = {n}, r = {r}"));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut accepted: Vec<HyperedgeConstraint> = forced.to_vec();
    if r >= 2 {
        for _ in 0..attempts(density) {
            if accepted.len() >= density {
                break;
            }
            let bound = rng.random_range(1..r);
            let max_size = (n - 1).min(n - r + bound);
            if bound + 1 > max_size {
                continue;
            }
            let size = rng.random_range(bound + 1..=max_size);
            let h = random_subset(&mut rng, n, size);
            let fits = accepted
                .iter()
                .all(|c| c.elements != h && (c.elements & h).len() + r <= c.bound + bound);
            if fits {
                accepted.push(HyperedgeConstraint::new(h, bound));
            }
        }
    }
    let rep = SplitRepresentation::new(n, r, accepted)?;
    rep.ensure_valid()?;
    rep.normalize()
}

/// Elementary split: random `(H, r_H)` with `1 <= r_H <= r - 1` and `r_H < |H|`,
/// accepted when (H1) and (H2) still hold.
pub fn gen_elementary_split(n: usize, r: usize, seed: u64, density: usize) -> Result<SplitRepresentation> {
    split_family(n, r, seed, density, &[])
}

/// The graphic matroid of `K4`, edges `0=ab 1=ac 2=ad 3=bc 4=bd 5=cd`, as its four
/// triangles with bound 2.
pub fn k4() -> SplitRepresentation {
    SplitRepresentation::from_lists(6, 3, &[(&[0, 1, 3], 2), (&[0, 2, 4], 2), (&[1, 2, 5], 2), (&[3, 4, 5], 2)])
        .expect("K4 is a valid representation")
}

fn targets<M: Matroid + ?Sized>(m: &M, bases: &[ElementSet], a1: ElementSet, a2: ElementSet) -> Vec<BasisPairInstance> {
    let union = a1 | a2;
    let common = a1 & a2;
    bases
        .iter()
        .filter(|&&b1| b1.is_subset(union) && common.is_subset(b1))
        .filter_map(|&b1| {
            let b2 = (union - b1) | common;
            basis_unchecked(m, b2).then(|| BasisPairInstance::new(a1, a2, b1, b2))
        })
        .collect()
}

/// Every compatible instance: all ordered start pairs of bases and every compatible
/// target pair. With `disjoint_only`, only start pairs with `A1 ∩ A2 = ∅`.
pub fn all_compatible_pairs<M: Matroid + ?Sized>(m: &M, disjoint_only: bool) -> Vec<BasisPairInstance> {
    let bases = all_bases(m);
    let mut out = Vec::new();
    for &a1 in &bases {
        for &a2 in &bases {
            if disjoint_only && !a1.is_disjoint(a2) {
                continue;
            }
            out.extend(targets(m, &bases, a1, a2));
        }
    }
    out
}

/// `count` random compatible instances: random bases `A1`, `A2`, then a random
/// compatible target.
pub fn gen_compatible_pairs<M: Matroid + ?Sized>(m: &M, seed: u64, count: usize) -> Vec<BasisPairInstance> {
    if count == 0 {
        return Vec::new();
    }
    let bases = all_bases(m);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::with_capacity(count);
    for _ in 0..count {
        let (Some(&a1), Some(&a2)) = (bases.choose(&mut rng), bases.choose(&mut rng)) else {
            break;
        };
        let options = targets(m, &bases, a1, a2);
        if let Some(&p) = options.choose(&mut rng) {
            out.push(p);
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matroid::{compatible, is_basis};

    fn set<const N: usize>(e: [usize; N]) -> ElementSet {
        ElementSet::from(e)
    }

    #[test]
    fn uniform_edge_cases() {
        let u = gen_uniform(3, 0).unwrap();
        assert!(u.is_independent(ElementSet::EMPTY));
        assert!(!u.is_independent(set([0])));
        let free = gen_uniform(5, 5).unwrap();
        assert_eq!(all_bases(&free), vec![ElementSet::full(5)]);
        assert!(gen_uniform(3, 4).is_err());
    }

    #[test]
    fn forced_sparse_paving_gives_e1() {
        let mut cfg = GeneratorConfig::new(Family::SparsePaving, 6, 3, 11, 1);
        cfg.forced = vec![HyperedgeConstraint::new(set([0, 1, 2]), 2)];
        let rep = cfg.generate().unwrap();
        assert_eq!(rep, SplitRepresentation::from_lists(6, 3, &[(&[0, 1, 2], 2)]).unwrap());
    }

    #[test]
    fn density_zero_is_uniform() {
        for family in [Family::SparsePaving, Family::Paving, Family::ElementarySplit] {
            let rep = GeneratorConfig::new(family, 6, 3, 1, 0).generate().unwrap();
            assert!(rep.constraints().is_empty());
        }
    }

    #[test]
    fn outputs_validate_and_are_deterministic() {
        for seed in 0..40 {
            for family in [Family::SparsePaving, Family::Paving, Family::ElementarySplit] {
                let cfg = GeneratorConfig::new(family, 8, 4, seed, 3);
                let a = cfg.generate().unwrap();
                assert!(a.validate().is_empty());
                assert_eq!(a, cfg.generate().unwrap());
            }
        }
        let rep = gen_elementary_split(8, 4, 3, 3).unwrap();
        assert!(rep.is_nonredundant());
    }

    #[test]
    fn sparse_paving_circuits() {
        for seed in 0..10 {
            let rep = gen_sparse_paving(7, 3, seed, 4).unwrap();
            for x in rep.ground().subsets() {
                if x.len() + 1 == rep.rank() {
                    assert!(rep.is_independent(x));
                }
                if x.len() == rep.rank() && !rep.is_independent(x) {
                    assert!(x.iter().all(|e| rep.is_independent(x.without(e))));
                }
            }
        }
    }

    #[test]
    fn k4_named() {
        let k = k4();
        assert!(k.validate().is_empty());
        assert!(!is_basis(&k, set([0, 1, 3])).unwrap());
        assert!(is_basis(&k, set([0, 1, 5])).unwrap());
    }

    #[test]
    fn compatible_pairs() {
        let u = gen_uniform(4, 2).unwrap();
        let all = all_compatible_pairs(&u, false);
        assert!(all.contains(&BasisPairInstance::swap(set([0, 1]), set([2, 3]))));
        assert!(all.iter().all(compatible));
        let e1 = SplitRepresentation::from_lists(6, 3, &[(&[0, 1, 2], 2)]).unwrap();
        let disjoint = all_compatible_pairs(&e1, true);
        for p in &disjoint {
            assert!(p.a1.is_disjoint(p.a2));
            assert_eq!(p.a1 | p.a2, ElementSet::full(6));
            p.check_bases(&e1).unwrap();
        }
        assert!(gen_compatible_pairs(&e1, 3, 0).is_empty());
        let sampled = gen_compatible_pairs(&e1, 3, 25);
        assert_eq!(sampled.len(), 25);
        assert!(sampled.iter().all(|p| compatible(p) && p.check_bases(&e1).is_ok()));
        assert_eq!(sampled, gen_compatible_pairs(&e1, 3, 25));
    }
}
