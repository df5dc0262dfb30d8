//! Brute-force ground truth over explicit independence oracles.
//!
//! Every search here is exponential and guarded by [`OracleCaps`].

use std::collections::{HashMap, VecDeque};
use std::fmt;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::de::{self, Deserializer, Visitor};
use serde::{Deserialize, Serialize, Serializer};

use crate::error::{input, Error, Result};
use crate::matroid::{all_bases, basis_unchecked, exchange_unchecked, matroid_rank, BasisPairInstance, ExchangeSequence, Matroid};
use crate::set::{Element, ElementSet};

/// Limits on brute-force searches.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct OracleCaps {
    /// Maximum number of visited search nodes.
    pub max_nodes: usize,
    /// Maximum rank for the depth-first searches.
    pub max_rank: usize,
    /// Maximum ground set size for exhaustive subset checks.
    pub max_subset_elements: usize,
}

impl Default for OracleCaps {
    fn default() -> Self {
        OracleCaps {
            max_nodes: 1_000_000,
            max_rank: 6,
            max_subset_elements: 12,
        }
    }
}

/// An exchange distance; `Infinite` when the target is unreachable.
///
/// Serializes as a number or the string `"infinite"`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Distance {
    Finite(usize),
    Infinite,
}

impl Distance {
    pub fn finite(self) -> Option<usize> {
        match self {
            Distance::Finite(d) => Some(d),
            Distance::Infinite => None,
        }
    }

    pub fn is_finite(self) -> bool {
        matches!(self, Distance::Finite(_))
    }
}

impl fmt::Display for Distance {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Distance::Finite(d) => write!(f, "{d}"),
            Distance::Infinite => f.write_str("infinite"),
        }
    }
}

impl Serialize for Distance {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            Distance::Finite(d) => s.serialize_u64(*d as u64),
            Distance::Infinite => s.serialize_str("infinite"),
        }
    }
}

impl<'de> Deserialize<'de> for Distance {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        struct V;
        impl Visitor<'_> for V {
            type Value = Distance;

            fn expecting(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                f.write_str("a non-negative integer or \"infinite\"")
            }

            fn visit_u64<E: de::Error>(self, v: u64) -> std::result::Result<Distance, E> {
                Ok(Distance::Finite(v as usize))
            }

            fn visit_i64<E: de::Error>(self, v: i64) -> std::result::Result<Distance, E> {
                usize::try_from(v)
                    .map(Distance::Finite)
                    .map_err(|_| E::custom("negative distance"))
            }

            fn visit_str<E: de::Error>(self, v: &str) -> std::result::Result<Distance, E> {
                if v == "infinite" {
                    Ok(Distance::Infinite)
                } else {
                    Err(E::invalid_value(de::Unexpected::Str(v), &self))
                }
            }
        }
        d.deserialize_any(V)
    }
}

fn require_bases<M: Matroid + ?Sized>(m: &M, pair: &BasisPairInstance) -> Result<()> {
    if !pair.support().is_subset(m.ground()) {
        return input("basis pair uses elements outside the ground set");
    }
    pair.check_bases(m)
}

/// Breadth-first distances from `(a1, a2)` to every reachable pair.
///
/// A reachable pair `(X1, X2)` always has `X1 ∪ X2 = a1 ∪ a2` and
/// `X1 ∩ X2 = a1 ∩ a2`, so the map is keyed by `X1` alone.
pub fn bf_distances_from<M: Matroid + ?Sized>(
    m: &M,
    a1: ElementSet,
    a2: ElementSet,
    caps: &OracleCaps,
) -> Result<HashMap<ElementSet, usize>> {
    if !basis_unchecked(m, a1) || !basis_unchecked(m, a2) {
        return input(format!("({a1}, {a2}) is not a pair of bases"));
    }
    let union = a1 | a2;
    let common = a1 & a2;
    let mut dist = HashMap::from([(a1, 0usize)]);
    let mut queue = VecDeque::from([a1]);
    while let Some(x1) = queue.pop_front() {
        let x2 = (union - x1) | common;
        let d = dist[&x1];
        for x in x1 - x2 {
            for y in x2 - x1 {
                let next = x1.without(x).with(y);
                if dist.contains_key(&next) || !exchange_unchecked(m, x1, x2, x, y) {
                    continue;
                }
                if dist.len() >= caps.max_nodes {
                    return Err(Error::Capacity(format!(
                        "breadth-first search exceeded {} nodes",
                        caps.max_nodes
                    )));
                }
                dist.insert(next, d + 1);
                queue.push_back(next);
            }
        }
    }
    Ok(dist)
}

/// Minimum number of symmetric exchanges from `(A1, A2)` to `(B1, B2)`.
pub fn bf_exchange_distance<M: Matroid + ?Sized>(
    m: &M,
    pair: &BasisPairInstance,
    caps: &OracleCaps,
) -> Result<Distance> {
    require_bases(m, pair)?;
    let dist = bf_distances_from(m, pair.a1, pair.a2, caps)?;
    let target_reachable = (pair.b1 | pair.b2) == (pair.a1 | pair.a2)
        && (pair.b1 & pair.b2) == (pair.a1 & pair.a2);
    Ok(match dist.get(&pair.b1) {
        Some(&d) if target_reachable => Distance::Finite(d),
        _ => Distance::Infinite,
    })
}

/// Length of a longest strictly monotone exchange sequence, by memoized depth-first search.
///
/// A state is determined by the current first basis: the exchanged-out elements are
/// `A1 - A1'` and the exchanged-in elements `A1' - A1`.
pub fn bf_longest_monotone<M: Matroid + ?Sized>(
    m: &M,
    pair: &BasisPairInstance,
    caps: &OracleCaps,
) -> Result<usize> {
    require_bases(m, pair)?;
    let r = pair.a1.len();
    if r > caps.max_rank {
        return Err(Error::Capacity(format!(
            "rank {r} exceeds the depth-first search cap {}",
            caps.max_rank
        )));
    }
    let common = pair.a1 & pair.a2;
    let x_pool = (pair.a1 & pair.b2) - common;
    let y_pool = (pair.a2 & pair.b1) - common;
    let union = pair.a1 | pair.a2;

    struct Search<'a, M: ?Sized> {
        m: &'a M,
        union: ElementSet,
        common: ElementSet,
        x_pool: ElementSet,
        y_pool: ElementSet,
        memo: HashMap<ElementSet, usize>,
        max_nodes: usize,
    }

    impl<M: Matroid + ?Sized> Search<'_, M> {
        fn longest(&mut self, a1: ElementSet) -> Result<usize> {
            if let Some(&v) = self.memo.get(&a1) {
                return Ok(v);
            }
            if self.memo.len() >= self.max_nodes {
                return Err(Error::Capacity(format!(
                    "monotone search exceeded {} nodes",
                    self.max_nodes
                )));
            }
            let a2 = (self.union - a1) | self.common;
            let mut best = 0;
            for x in a1 & self.x_pool {
                for y in a2 & self.y_pool {
                    if exchange_unchecked(self.m, a1, a2, x, y) {
                        best = best.max(1 + self.longest(a1.without(x).with(y))?);
                    }
                }
            }
            self.memo.insert(a1, best);
            Ok(best)
        }
    }

    Search {
        m,
        union,
        common,
        x_pool,
        y_pool,
        memo: HashMap::new(),
        max_nodes: caps.max_nodes,
    }
    .longest(pair.a1)
}

/// Orderings `a_1..a_r` of `A` and `b_1..b_r` of `B`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CyclicOrdering {
    pub a: Vec<Element>,
    pub b: Vec<Element>,
}

impl CyclicOrdering {
    /// Whether `{a_1..a_i, b_{i+1}..b_r}` and `{b_1..b_i, a_{i+1}..a_r}` are bases for
    /// every `i = 0..=r`.
    pub fn is_valid<M: Matroid + ?Sized>(&self, m: &M) -> bool {
        let r = self.a.len();
        if self.b.len() != r {
            return false;
        }
        (0..=r).all(|i| {
            let first: ElementSet = self.a[..i].iter().chain(&self.b[i..]).copied().collect();
            let second: ElementSet = self.b[..i].iter().chain(&self.a[i..]).copied().collect();
            basis_unchecked(m, first) && basis_unchecked(m, second)
        })
    }

    /// Reads an ordering off an exchange sequence from `(A, B)` to `(B, A)`: the
    /// exchanged elements in order, followed by `A ∩ B`.
    pub fn from_exchanges(a: ElementSet, b: ElementSet, seq: &ExchangeSequence) -> CyclicOrdering {
        let common = (a & b).to_vec();
        CyclicOrdering {
            a: seq.steps.iter().map(|s| s.x).chain(common.iter().copied()).collect(),
            b: seq.steps.iter().map(|s| s.y).chain(common).collect(),
        }
    }
}

/// Backtracking search for a valid [`CyclicOrdering`] of the bases `a` and `b`.
///
/// Validity of a prefix only depends on the sets `{a_1..a_i}` and `{b_1..b_i}`, so
/// dead prefixes are memoized as set pairs.
pub fn gabow_ordering<M: Matroid + ?Sized>(
    m: &M,
    a: ElementSet,
    b: ElementSet,
    caps: &OracleCaps,
) -> Result<Option<CyclicOrdering>> {
    if !a.is_subset(m.ground()) || !b.is_subset(m.ground()) {
        return input("sets outside the ground set");
    }
    if !basis_unchecked(m, a) || !basis_unchecked(m, b) {
        return input(format!("{a} and {b} are not both bases"));
    }
    if a.len() > caps.max_rank {
        return Err(Error::Capacity(format!(
            "rank {} exceeds the backtracking cap {}",
            a.len(),
            caps.max_rank
        )));
    }

    struct Search<'a, M: ?Sized> {
        m: &'a M,
        a: ElementSet,
        b: ElementSet,
        dead: std::collections::HashSet<(ElementSet, ElementSet)>,
        order_a: Vec<Element>,
        order_b: Vec<Element>,
    }

    impl<M: Matroid + ?Sized> Search<'_, M> {
        fn extend(&mut self, pa: ElementSet, pb: ElementSet) -> bool {
            if pa == self.a {
                return true;
            }
            if self.dead.contains(&(pa, pb)) {
                return false;
            }
            for x in self.a - pa {
                for y in self.b - pb {
                    let (na, nb) = (pa.with(x), pb.with(y));
                    let first = na | (self.b - nb);
                    let second = nb | (self.a - na);
                    if first.len() != self.a.len() || second.len() != self.a.len() {
                        continue;
                    }
                    if basis_unchecked(self.m, first) && basis_unchecked(self.m, second) {
                        self.order_a.push(x);
                        self.order_b.push(y);
                        if self.extend(na, nb) {
                            return true;
                        }
                        self.order_a.pop();
                        self.order_b.pop();
                    }
                }
            }
            self.dead.insert((pa, pb));
            false
        }
    }

    let mut search = Search {
        m,
        a,
        b,
        dead: Default::default(),
        order_a: Vec::new(),
        order_b: Vec::new(),
    };
    if !search.extend(ElementSet::EMPTY, ElementSet::EMPTY) {
        return Ok(None);
    }
    let ordering = CyclicOrdering {
        a: search.order_a,
        b: search.order_b,
    };
    debug_assert!(ordering.is_valid(m));
    Ok(Some(ordering))
}

/// Whether `(A1, A2)` can reach `(B1, B2)` at all, i.e. the two pairs are equivalent
/// under sequences of symmetric exchanges.
pub fn white2_equivalent<M: Matroid + ?Sized>(
    m: &M,
    pair: &BasisPairInstance,
    caps: &OracleCaps,
) -> Result<bool> {
    Ok(bf_exchange_distance(m, pair, caps)?.is_finite())
}

/// Outcome of an equitability check.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "status", rename_all = "snake_case")]
pub enum Equitability {
    /// Every subset has a balanced splitting basis.
    Equitable,
    /// Only the sampled subsets were checked.
    NoCounterexampleFound { samples: usize },
    /// No splitting basis `B` with `⌊|X|/2⌋ ≤ |B ∩ X| ≤ ⌈|X|/2⌉`.
    Counterexample { subset: ElementSet },
    /// The ground set is not the disjoint union of two bases.
    NotPartitionable,
}

fn splitting_bases<M: Matroid + ?Sized>(m: &M) -> Vec<ElementSet> {
    let ground = m.ground();
    if ground.len() != 2 * matroid_rank(m) {
        return Vec::new();
    }
    all_bases(m)
        .into_iter()
        .filter(|&b| basis_unchecked(m, ground - b))
        .collect()
}

fn balanced(splitting: &[ElementSet], x: ElementSet) -> bool {
    let lo = x.len() / 2;
    let hi = x.len().div_ceil(2);
    splitting.iter().any(|&b| (lo..=hi).contains(&(b & x).len()))
}

/// Exhaustive check that every `X ⊆ S` has a basis `B` with `S - B` a basis and
/// `⌊|X|/2⌋ ≤ |B ∩ X| ≤ ⌈|X|/2⌉`. Only one of `X`, `S - X` is examined.
pub fn equitable_check<M: Matroid + ?Sized>(m: &M, caps: &OracleCaps) -> Result<Equitability> {
    let ground = m.ground();
    if ground.len() > caps.max_subset_elements {
        return Err(Error::Capacity(format!(
            "{} elements exceed the exhaustive equitability cap {}",
            ground.len(),
            caps.max_subset_elements
        )));
    }
    let splitting = splitting_bases(m);
    if splitting.is_empty() {
        return Ok(Equitability::NotPartitionable);
    }
    for x in ground.subsets() {
        if x.bits() > (ground - x).bits() {
            continue;
        }
        if !balanced(&splitting, x) {
            return Ok(Equitability::Counterexample { subset: x });
        }
    }
    Ok(Equitability::Equitable)
}

/// Equitability on `samples` random subsets drawn with a seeded generator. A clean
/// run is reported as [`Equitability::NoCounterexampleFound`].
pub fn equitable_sampled<M: Matroid + ?Sized>(m: &M, seed: u64, samples: usize) -> Result<Equitability> {
    let splitting = splitting_bases(m);
    if splitting.is_empty() {
        return Ok(Equitability::NotPartitionable);
    }
    let ground = m.ground().to_vec();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for _ in 0..samples {
        let x: ElementSet = ground
            .iter()
            .copied()
            .filter(|_| rng.random_bool(0.5))
            .collect();
        if !balanced(&splitting, x) {
            return Ok(Equitability::Counterexample { subset: x });
        }
    }
    Ok(Equitability::NoCounterexampleFound { samples })
}

/// A bijection `φ: A → B` with `A - e + φ(e)` and `B - φ(e) + e` bases for all `e`,
/// as `(e, φ(e))` sorted by `e`, or `None` if none exists.
pub fn base_orderable_pair<M: Matroid + ?Sized>(
    m: &M,
    a: ElementSet,
    b: ElementSet,
) -> Option<Vec<(Element, Element)>> {
    let left = a.to_vec();
    let right = b.to_vec();
    if left.len() != right.len() {
        return None;
    }
    let adj: Vec<Vec<usize>> = left
        .iter()
        .map(|&e| {
            right
                .iter()
                .enumerate()
                .filter(|&(_, &f)| {
                    e == f || (basis_unchecked(m, a.without(e).with(f)) && basis_unchecked(m, b.without(f).with(e)))
                })
                .map(|(j, _)| j)
                .collect()
        })
        .collect();

    fn augment(u: usize, adj: &[Vec<usize>], seen: &mut [bool], match_right: &mut [Option<usize>]) -> bool {
        for &v in &adj[u] {
            if seen[v] {
                continue;
            }
            seen[v] = true;
            if match_right[v].is_none_or(|w| augment(w, adj, seen, match_right)) {
                match_right[v] = Some(u);
                return true;
            }
        }
        false
    }

    let mut match_right: Vec<Option<usize>> = vec![None; right.len()];
    for u in 0..left.len() {
        let mut seen = vec![false; right.len()];
        if !augment(u, &adj, &mut seen, &mut match_right) {
            return None;
        }
    }
    let mut pairs: Vec<(Element, Element)> = match_right
        .iter()
        .enumerate()
        .map(|(v, u)| (left[u.expect("perfect matching")], right[v]))
        .collect();
    pairs.sort_unstable();
    Some(pairs)
}

/// Whether every pair of bases admits a bijection as in [`base_orderable_pair`].
/// Returns the first failing pair otherwise.
pub fn base_orderability_witness<M: Matroid + ?Sized>(m: &M) -> Option<(ElementSet, ElementSet)> {
    let bases = all_bases(m);
    for (i, &a) in bases.iter().enumerate() {
        for &b in &bases[i + 1..] {
            if base_orderable_pair(m, a, b).is_none() {
                return Some((a, b));
            }
        }
    }
    None
}

pub fn is_base_orderable<M: Matroid + ?Sized>(m: &M) -> bool {
    base_orderability_witness(m).is_none()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::split::SplitRepresentation;

    fn set<const N: usize>(e: [usize; N]) -> ElementSet {
        ElementSet::from(e)
    }

    fn e1() -> SplitRepresentation {
        SplitRepresentation::from_lists(6, 3, &[(&[0, 1, 2], 2)]).unwrap()
    }

    fn k4() -> SplitRepresentation {
        SplitRepresentation::from_lists(6, 3, &[(&[0, 1, 3], 2), (&[0, 2, 4], 2), (&[1, 2, 5], 2), (&[3, 4, 5], 2)])
            .unwrap()
    }

    fn u(n: usize, r: usize) -> SplitRepresentation {
        SplitRepresentation::uniform(n, r).unwrap()
    }

    #[test]
    fn distances() {
        let caps = OracleCaps::default();
        let p = BasisPairInstance::new(set([0, 1, 3]), set([2, 4, 5]), set([0, 1, 3]), set([2, 4, 5]));
        assert_eq!(bf_exchange_distance(&e1(), &p, &caps).unwrap(), Distance::Finite(0));
        let swap = BasisPairInstance::swap(set([0, 1]), set([2, 3]));
        assert_eq!(bf_exchange_distance(&u(4, 2), &swap, &caps).unwrap(), Distance::Finite(2));
        let p = BasisPairInstance::new(set([0, 1, 3]), set([2, 4, 5]), set([0, 1, 4]), set([2, 3, 5]));
        assert_eq!(bf_exchange_distance(&e1(), &p, &caps).unwrap(), Distance::Finite(1));
        let bad = BasisPairInstance::new(set([0, 1]), set([2, 3]), set([0, 1]), set([1, 2]));
        assert_eq!(bf_exchange_distance(&u(4, 2), &bad, &caps).unwrap(), Distance::Infinite);
        assert!(!white2_equivalent(&u(4, 2), &bad, &caps).unwrap());
        assert!(white2_equivalent(&u(4, 2), &swap, &caps).unwrap());
        let tiny = OracleCaps { max_nodes: 1, ..caps };
        assert!(matches!(bf_exchange_distance(&u(4, 2), &swap, &tiny), Err(Error::Capacity(_))));
    }

    #[test]
    fn distance_serde() {
        assert_eq!(serde_json::to_string(&Distance::Finite(3)).unwrap(), "3");
        assert_eq!(serde_json::to_string(&Distance::Infinite).unwrap(), "\"infinite\"");
        assert_eq!(serde_json::from_str::<Distance>("\"infinite\"").unwrap(), Distance::Infinite);
        assert_eq!(serde_json::from_str::<Distance>("4").unwrap(), Distance::Finite(4));
        assert!(serde_json::from_str::<Distance>("\"far\"").is_err());
    }

    #[test]
    fn longest_monotone() {
        let caps = OracleCaps::default();
        let p = BasisPairInstance::new(set([0, 1, 3]), set([2, 4, 5]), set([0, 1, 4]), set([2, 3, 5]));
        assert_eq!(bf_longest_monotone(&e1(), &p, &caps).unwrap(), 1);
        let swap = BasisPairInstance::swap(set([0, 1, 2]), set([3, 4, 5]));
        assert_eq!(bf_longest_monotone(&u(6, 3), &swap, &caps).unwrap(), 3);
        assert_eq!(bf_longest_monotone(&u(6, 3), &swap.reversed().reversed(), &caps).unwrap(), 3);
    }

    #[test]
    fn gabow() {
        let caps = OracleCaps::default();
        let o = gabow_ordering(&u(4, 2), set([0, 1]), set([2, 3]), &caps).unwrap().unwrap();
        assert_eq!(o, CyclicOrdering { a: vec![0, 1], b: vec![2, 3] });
        let o = gabow_ordering(&u(2, 1), set([0]), set([1]), &caps).unwrap().unwrap();
        assert_eq!(o, CyclicOrdering { a: vec![0], b: vec![1] });
        let k = k4();
        let o = gabow_ordering(&k, set([0, 1, 5]), set([2, 3, 4]), &caps).unwrap().unwrap();
        assert!(o.is_valid(&k));
        let broken = CyclicOrdering { a: vec![0, 1, 5], b: vec![2, 3, 4] };
        assert!(!broken.is_valid(&k));
    }

    #[test]
    fn equitability() {
        let caps = OracleCaps::default();
        assert_eq!(equitable_check(&u(4, 2), &caps).unwrap(), Equitability::Equitable);
        assert_eq!(equitable_check(&k4(), &caps).unwrap(), Equitability::Equitable);
        assert_eq!(equitable_check(&u(5, 2), &caps).unwrap(), Equitability::NotPartitionable);
        assert_eq!(
            equitable_sampled(&k4(), 7, 50).unwrap(),
            Equitability::NoCounterexampleFound { samples: 50 }
        );
    }

    #[test]
    fn base_orderability() {
        assert!(base_orderable_pair(&u(4, 2), set([0, 1]), set([1, 2])).is_some());
        assert!(is_base_orderable(&e1()));
        assert!(!is_base_orderable(&k4()));
        let (a, b) = base_orderability_witness(&k4()).unwrap();
        assert!(a.is_disjoint(b));
    }
}
