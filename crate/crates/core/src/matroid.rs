//! Independence oracles and the basis/exchange predicates built on them.

use serde::{Deserialize, Serialize};

use crate::error::{input, internal, Error, Result};
use crate::set::{Element, ElementSet};

/// Default ground-set cap for [`connected_components`].
pub const DEFAULT_COMPONENT_CAP: usize = 16;

/// A matroid given by an independence oracle.
///
/// `is_independent` is only ever queried with subsets of `ground()`. Implementations
/// must make the empty set independent and be closed under taking subsets; the
/// augmentation property is checked by the test suite, not here.
pub trait Matroid {
    fn ground(&self) -> ElementSet;

    fn is_independent(&self, set: ElementSet) -> bool;
}

impl<M: Matroid + ?Sized> Matroid for &M {
    fn ground(&self) -> ElementSet {
        (**self).ground()
    }

    fn is_independent(&self, set: ElementSet) -> bool {
        (**self).is_independent(set)
    }
}

/// An oracle backed by a closure; mostly useful for tests and ad-hoc matroids.
pub struct FnMatroid<F> {
    ground: ElementSet,
    independent: F,
}

impl<F: Fn(ElementSet) -> bool> FnMatroid<F> {
    pub fn new(ground: ElementSet, independent: F) -> Self {
        FnMatroid {
            ground,
            independent,
        }
    }
}

impl<F: Fn(ElementSet) -> bool> Matroid for FnMatroid<F> {
    fn ground(&self) -> ElementSet {
        self.ground
    }

    fn is_independent(&self, set: ElementSet) -> bool {
        (self.independent)(set)
    }
}

fn check_range<M: Matroid + ?Sized>(m: &M, set: ElementSet, what: &str) -> Result<()> {
    let outside = set - m.ground();
    if outside.is_empty() {
        Ok(())
    } else {
        input(format!("{what} contains elements {outside} outside the ground set"))
    }
}

pub(crate) fn basis_unchecked<M: Matroid + ?Sized>(m: &M, set: ElementSet) -> bool {
    m.is_independent(set)
        && (m.ground() - set)
            .iter()
            .all(|e| !m.is_independent(set.with(e)))
}

/// `X` is independent and no `X + e` is.
pub fn is_basis<M: Matroid + ?Sized>(m: &M, set: ElementSet) -> Result<bool> {
    check_range(m, set, "set")?;
    Ok(basis_unchecked(m, set))
}

pub(crate) fn rank_unchecked<M: Matroid + ?Sized>(m: &M, set: ElementSet) -> usize {
    let mut independent = ElementSet::EMPTY;
    for e in set {
        if m.is_independent(independent.with(e)) {
            independent.insert(e);
        }
    }
    independent.len()
}

/// Size of a maximum independent subset of `set`, by greedy augmentation.
pub fn oracle_rank<M: Matroid + ?Sized>(m: &M, set: ElementSet) -> Result<usize> {
    check_range(m, set, "set")?;
    Ok(rank_unchecked(m, set))
}

/// Rank of the whole matroid.
pub fn matroid_rank<M: Matroid + ?Sized>(m: &M) -> usize {
    rank_unchecked(m, m.ground())
}

/// Every basis of `m`, in colexicographic order.
pub fn all_bases<M: Matroid + ?Sized>(m: &M) -> Vec<ElementSet> {
    let r = matroid_rank(m);
    m.ground()
        .subsets_of_size(r)
        .filter(|&b| m.is_independent(b))
        .collect()
}

/// One symmetric exchange: `x` leaves the first basis, `y` enters it.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct ExchangeStep {
    pub x: Element,
    pub y: Element,
}

impl ExchangeStep {
    pub fn new(x: Element, y: Element) -> Self {
        debug_assert_ne!(x, y);
        ExchangeStep { x, y }
    }

    /// Applies the step to `(first, second)` without any validity check.
    pub fn apply(self, first: ElementSet, second: ElementSet) -> (ElementSet, ElementSet) {
        (
            first.without(self.x).with(self.y),
            second.with(self.x).without(self.y),
        )
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct ExchangeSequence {
    pub steps: Vec<ExchangeStep>,
}

impl ExchangeSequence {
    pub fn new(steps: Vec<ExchangeStep>) -> Self {
        ExchangeSequence { steps }
    }

    pub fn len(&self) -> usize {
        self.steps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.steps.is_empty()
    }

    pub fn from_pairs(pairs: &[(Element, Element)]) -> Self {
        ExchangeSequence::new(pairs.iter().map(|&(x, y)| ExchangeStep::new(x, y)).collect())
    }

    /// Applies every step to `(first, second)` without checking validity.
    pub fn apply(&self, first: ElementSet, second: ElementSet) -> (ElementSet, ElementSet) {
        self.steps
            .iter()
            .fold((first, second), |(a, b), step| step.apply(a, b))
    }
}

impl FromIterator<ExchangeStep> for ExchangeSequence {
    fn from_iter<I: IntoIterator<Item = ExchangeStep>>(iter: I) -> Self {
        ExchangeSequence::new(iter.into_iter().collect())
    }
}

/// A start pair `(a1, a2)` and a target pair `(b1, b2)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct BasisPairInstance {
    #[serde(rename = "A1")]
    pub a1: ElementSet,
    #[serde(rename = "A2")]
    pub a2: ElementSet,
    #[serde(rename = "B1")]
    pub b1: ElementSet,
    #[serde(rename = "B2")]
    pub b2: ElementSet,
}

impl BasisPairInstance {
    pub fn new(a1: ElementSet, a2: ElementSet, b1: ElementSet, b2: ElementSet) -> Self {
        BasisPairInstance { a1, a2, b1, b2 }
    }

    /// The pair `(A, B) -> (B, A)`.
    pub fn swap(a: ElementSet, b: ElementSet) -> Self {
        BasisPairInstance::new(a, b, b, a)
    }

    /// The same pairs, start and target exchanged.
    pub fn reversed(&self) -> Self {
        BasisPairInstance::new(self.b1, self.b2, self.a1, self.a2)
    }

    /// `r - |A1 ∩ B1|`, the trivial lower bound on the exchange distance.
    pub fn lower_bound(&self) -> usize {
        self.a1.len() - (self.a1 & self.b1).len()
    }

    /// Restriction of all four sets to `part`.
    pub fn restrict(&self, part: ElementSet) -> Self {
        BasisPairInstance::new(
            self.a1 & part,
            self.a2 & part,
            self.b1 & part,
            self.b2 & part,
        )
    }

    /// All four sets with `t` removed.
    pub fn minus(&self, t: ElementSet) -> Self {
        BasisPairInstance::new(self.a1 - t, self.a2 - t, self.b1 - t, self.b2 - t)
    }

    pub fn support(&self) -> ElementSet {
        self.a1 | self.a2 | self.b1 | self.b2
    }

    /// Checks that all four sets are bases of `m`.
    pub fn check_bases<M: Matroid + ?Sized>(&self, m: &M) -> Result<()> {
        for (name, set) in [
            ("A1", self.a1),
            ("A2", self.a2),
            ("B1", self.b1),
            ("B2", self.b2),
        ] {
            if !is_basis(m, set)? {
                return input(format!("{name} = {set} is not a basis"));
            }
        }
        Ok(())
    }
}

/// `A1 ∩ A2 = B1 ∩ B2` and `A1 ∪ A2 = B1 ∪ B2`.
pub fn compatible(pair: &BasisPairInstance) -> bool {
    pair.a1 & pair.a2 == pair.b1 & pair.b2 && pair.a1 | pair.a2 == pair.b1 | pair.b2
}

pub(crate) fn exchange_unchecked<M: Matroid + ?Sized>(
    m: &M,
    a1: ElementSet,
    a2: ElementSet,
    x: Element,
    y: Element,
) -> bool {
    let (n1, n2) = ExchangeStep { x, y }.apply(a1, a2);
    basis_unchecked(m, n1) && basis_unchecked(m, n2)
}

/// Both `A1 - x + y` and `A2 + x - y` are bases.
pub fn symmetric_exchange_valid<M: Matroid + ?Sized>(
    m: &M,
    a1: ElementSet,
    a2: ElementSet,
    x: Element,
    y: Element,
) -> Result<bool> {
    check_range(m, a1 | a2, "basis pair")?;
    if !(a1 - a2).contains(x) {
        return input(format!("x = {x} is not in A1 - A2"));
    }
    if !(a2 - a1).contains(y) {
        return input(format!("y = {y} is not in A2 - A1"));
    }
    Ok(exchange_unchecked(m, a1, a2, x, y))
}

/// Smallest `e ∈ A - B` such that `A - e + f` is a basis.
///
/// Such an element always exists for bases `A, B` and `f ∈ B - A`; failing to find
/// one means the oracle is not a matroid.
pub fn co_exchange_find<M: Matroid + ?Sized>(
    m: &M,
    a: ElementSet,
    b: ElementSet,
    f: Element,
) -> Result<Element> {
    check_range(m, a | b, "bases")?;
    if !(b - a).contains(f) {
        return input(format!("f = {f} is not in B - A"));
    }
    (a - b)
        .iter()
        .find(|&e| basis_unchecked(m, a.without(e).with(f)))
        .ok_or_else(|| {
            Error::Internal(format!(
                "co-exchange failed for A = {a}, B = {b}, f = {f}: oracle is not a matroid"
            ))
        })
}

/// Replays `seq` from `(A1, A2)` and checks that every step is a symmetric exchange
/// and that the final pair is `(B1, B2)`.
pub fn verify_sequence<M: Matroid + ?Sized>(
    m: &M,
    pair: &BasisPairInstance,
    seq: &ExchangeSequence,
) -> Result<bool> {
    for step in &seq.steps {
        if !m.ground().contains(step.x) || !m.ground().contains(step.y) {
            return input(format!(
                "step ({}, {}) refers to elements outside the ground set",
                step.x, step.y
            ));
        }
    }
    if !basis_unchecked(m, pair.a1) || !basis_unchecked(m, pair.a2) {
        return Ok(false);
    }
    let (mut first, mut second) = (pair.a1, pair.a2);
    for step in &seq.steps {
        if !(first - second).contains(step.x) || !(second - first).contains(step.y) {
            return Ok(false);
        }
        if !exchange_unchecked(m, first, second, step.x, step.y) {
            return Ok(false);
        }
        (first, second) = step.apply(first, second);
    }
    Ok(first == pair.b1 && second == pair.b2)
}

/// Classes of "lies on a common circuit", found by enumerating circuits.
///
/// Loops and coloops come out as singletons. Components are sorted by their
/// smallest element.
pub fn connected_components<M: Matroid + ?Sized>(m: &M, cap: usize) -> Result<Vec<ElementSet>> {
    let ground = m.ground();
    if ground.len() > cap {
        return Err(Error::Capacity(format!(
            "circuit enumeration on {} elements exceeds the cap of {cap}",
            ground.len()
        )));
    }
    let mut parent: Vec<usize> = (0..ground.span()).collect();
    fn find(parent: &mut [usize], mut e: usize) -> usize {
        while parent[e] != e {
            parent[e] = parent[parent[e]];
            e = parent[e];
        }
        e
    }
    for set in ground.subsets() {
        if set.len() < 2 || m.is_independent(set) {
            continue;
        }
        let minimal = set.iter().all(|e| m.is_independent(set.without(e)));
        if !minimal {
            continue;
        }
        let mut members = set.iter();
        let root = members.next().expect("circuit has elements");
        for e in members {
            let (a, b) = (find(&mut parent, root), find(&mut parent, e));
            if a != b {
                parent[a.max(b)] = a.min(b);
            }
        }
    }
    let mut components: Vec<ElementSet> = Vec::new();
    let mut index_of_root = vec![usize::MAX; ground.span()];
    for e in ground {
        let root = find(&mut parent, e);
        if index_of_root[root] == usize::MAX {
            index_of_root[root] = components.len();
            components.push(ElementSet::EMPTY);
        }
        components[index_of_root[root]].insert(e);
    }
    Ok(components)
}

/// `M / T`: ground `S - T`, with `X` independent iff `X ∪ T` is independent in `M`.
#[derive(Debug, Clone)]
pub struct Contraction<M> {
    inner: M,
    contracted: ElementSet,
}

impl<M: Matroid> Contraction<M> {
    pub fn contracted(&self) -> ElementSet {
        self.contracted
    }

    pub fn inner(&self) -> &M {
        &self.inner
    }
}

impl<M: Matroid> Matroid for Contraction<M> {
    fn ground(&self) -> ElementSet {
        self.inner.ground() - self.contracted
    }

    fn is_independent(&self, set: ElementSet) -> bool {
        self.inner.is_independent(set | self.contracted)
    }
}

pub fn contract_oracle<M: Matroid>(m: M, t: ElementSet) -> Result<Contraction<M>> {
    check_range(&m, t, "contracted set")?;
    if !m.is_independent(t) {
        return input(format!("cannot contract the dependent set {t}"));
    }
    Ok(Contraction {
        inner: m,
        contracted: t,
    })
}

/// Checks the exchange axioms that are cheap to state over an explicit basis list.
/// Exponential; for tests and the harness only.
pub fn check_matroid_axioms<M: Matroid + ?Sized>(m: &M) -> Result<()> {
    if !m.is_independent(ElementSet::EMPTY) {
        return internal("the empty set is dependent");
    }
    let ground = m.ground();
    for set in ground.subsets() {
        if m.is_independent(set) {
            if let Some(e) = set.iter().find(|&e| !m.is_independent(set.without(e))) {
                return internal(format!("{set} is independent but {set} - {e} is not"));
            }
        }
    }
    let independent: Vec<ElementSet> = ground.subsets().filter(|&s| m.is_independent(s)).collect();
    for &small in &independent {
        for &large in &independent {
            if small.len() < large.len()
                && (large - small)
                    .iter()
                    .all(|e| !m.is_independent(small.with(e)))
            {
                return internal(format!("augmentation fails for {small} and {large}"));
            }
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    /// E1: n = 6, r = 3, hyperedge {0,1,2} with bound 2.
    fn e1() -> impl Matroid {
        FnMatroid::new(ElementSet::full(6), |x: ElementSet| {
            x.len() <= 3 && (x & ElementSet::from([0, 1, 2])).len() <= 2
        })
    }

    fn uniform(r: usize, n: usize) -> impl Matroid {
        FnMatroid::new(ElementSet::full(n), move |x: ElementSet| x.len() <= r)
    }

    fn brute_rank<M: Matroid>(m: &M, z: ElementSet) -> usize {
        z.subsets()
            .filter(|&s| m.is_independent(s))
            .map(ElementSet::len)
            .max()
            .unwrap()
    }

    fn set<const N: usize>(e: [usize; N]) -> ElementSet {
        ElementSet::from(e)
    }

    #[test]
    fn is_basis_examples() {
        assert!(is_basis(&e1(), set([0, 1, 3])).unwrap());
        assert!(!is_basis(&e1(), set([0, 1, 2])).unwrap());
        assert!(is_basis(&uniform(2, 4), set([0, 1])).unwrap());
        assert!(!is_basis(&uniform(2, 4), set([0])).unwrap());
        assert!(matches!(is_basis(&e1(), set([0, 7])), Err(Error::Input(_))));
    }

    #[test]
    fn rank_examples_match_brute_force() {
        let m = e1();
        assert_eq!(brute_rank(&m, set([0, 1, 2])), 2);
        assert_eq!(oracle_rank(&m, set([0, 1, 2])).unwrap(), 2);
        assert_eq!(oracle_rank(&m, ElementSet::EMPTY).unwrap(), 0);
        assert_eq!(oracle_rank(&uniform(2, 4), set([0, 1, 2])).unwrap(), 2);
        for z in ElementSet::full(6).subsets() {
            assert_eq!(oracle_rank(&m, z).unwrap(), brute_rank(&m, z));
        }
    }

    #[test]
    fn compatibility_examples() {
        let p = BasisPairInstance::new(set([0, 1, 3]), set([2, 4, 5]), set([0, 1, 4]), set([2, 3, 5]));
        assert!(compatible(&p));
        let q = BasisPairInstance::new(set([0, 1]), set([2, 3]), set([0, 1]), set([0, 3]));
        assert!(!compatible(&q));
        let id = BasisPairInstance::new(set([0, 1]), set([2, 3]), set([0, 1]), set([2, 3]));
        assert!(compatible(&id));
    }

    #[test]
    fn symmetric_exchange_examples() {
        let (a1, a2) = (set([0, 1, 3]), set([2, 4, 5]));
        assert!(symmetric_exchange_valid(&e1(), a1, a2, 3, 4).unwrap());
        assert!(!symmetric_exchange_valid(&e1(), a1, a2, 3, 2).unwrap());
        assert!(symmetric_exchange_valid(&uniform(2, 4), set([0, 1]), set([2, 3]), 0, 2).unwrap());
        assert!(symmetric_exchange_valid(&e1(), a1, a2, 2, 4).is_err());
        assert!(symmetric_exchange_valid(&e1(), a1, a2, 3, 1).is_err());
    }

    #[test]
    fn co_exchange_examples() {
        assert_eq!(co_exchange_find(&e1(), set([0, 1, 3]), set([2, 4, 5]), 4).unwrap(), 0);
        assert_eq!(co_exchange_find(&uniform(2, 4), set([0, 1]), set([2, 3]), 2).unwrap(), 0);
        assert_eq!(co_exchange_find(&e1(), set([0, 1, 3]), set([0, 2, 4]), 2).unwrap(), 1);
        assert!(co_exchange_find(&e1(), set([0, 1, 3]), set([0, 2, 4]), 0).is_err());
        // an oracle that is not a matroid: nothing non-empty is independent beyond A itself
        let broken = FnMatroid::new(ElementSet::full(4), |x: ElementSet| {
            x.is_subset(set([0, 1])) || x.is_subset(set([2, 3]))
        });
        assert!(matches!(
            co_exchange_find(&broken, set([0, 1]), set([2, 3]), 2),
            Err(Error::Internal(_))
        ));
    }

    #[test]
    fn verify_sequence_examples() {
        let p = BasisPairInstance::new(set([0, 1, 3]), set([2, 4, 5]), set([0, 1, 4]), set([2, 3, 5]));
        assert!(verify_sequence(&e1(), &p, &ExchangeSequence::from_pairs(&[(3, 4)])).unwrap());
        assert!(!verify_sequence(&e1(), &p, &ExchangeSequence::from_pairs(&[(3, 2)])).unwrap());
        assert!(!verify_sequence(&e1(), &p, &ExchangeSequence::default()).unwrap());
        let id = BasisPairInstance::new(p.a1, p.a2, p.a1, p.a2);
        assert!(verify_sequence(&e1(), &id, &ExchangeSequence::default()).unwrap());
        assert!(verify_sequence(&e1(), &p, &ExchangeSequence::from_pairs(&[(3, 9)])).is_err());
        // a step whose x is not in the current first basis
        assert!(!verify_sequence(&e1(), &p, &ExchangeSequence::from_pairs(&[(2, 4)])).unwrap());
    }

    #[test]
    fn components_examples() {
        assert_eq!(connected_components(&uniform(2, 4), 16).unwrap(), vec![ElementSet::full(4)]);
        let sum = FnMatroid::new(ElementSet::full(4), |x: ElementSet| {
            (x & set([0, 1])).len() <= 1 && (x & set([2, 3])).len() <= 1
        });
        assert_eq!(connected_components(&sum, 16).unwrap(), vec![set([0, 1]), set([2, 3])]);
        // loops and coloops
        let free_and_loop = FnMatroid::new(ElementSet::full(3), |x: ElementSet| !x.contains(2));
        assert_eq!(
            connected_components(&free_and_loop, 16).unwrap(),
            vec![set([0]), set([1]), set([2])]
        );
        assert!(matches!(
            connected_components(&uniform(2, 17), 16),
            Err(Error::Capacity(_))
        ));
    }

    #[test]
    fn contraction_examples() {
        let m = e1();
        let same = contract_oracle(&m, ElementSet::EMPTY).unwrap();
        for x in ElementSet::full(6).subsets() {
            assert_eq!(same.is_independent(x), m.is_independent(x));
        }
        let u = uniform(2, 4);
        let c = contract_oracle(&u, set([0])).unwrap();
        assert_eq!(c.ground(), set([1, 2, 3]));
        for x in c.ground().subsets() {
            assert_eq!(c.is_independent(x), x.len() <= 1);
        }
        let c = contract_oracle(&m, set([3])).unwrap();
        assert_eq!(c.ground(), set([0, 1, 2, 4, 5]));
        for x in c.ground().subsets() {
            assert_eq!(c.is_independent(x), x.len() <= 2, "{x}");
        }
        assert!(contract_oracle(&m, set([0, 1, 2])).is_err());
    }

    #[test]
    fn axioms_hold_for_examples_and_fail_for_broken_oracle() {
        check_matroid_axioms(&e1()).unwrap();
        check_matroid_axioms(&uniform(2, 5)).unwrap();
        let broken = FnMatroid::new(ElementSet::full(4), |x: ElementSet| {
            x.is_subset(set([0, 1])) || x.len() <= 1
        });
        assert!(check_matroid_axioms(&broken).is_err());
    }

    #[test]
    fn all_bases_of_uniform() {
        assert_eq!(all_bases(&uniform(2, 4)).len(), 6);
        assert_eq!(all_bases(&uniform(0, 3)), vec![ElementSet::EMPTY]);
    }
}
