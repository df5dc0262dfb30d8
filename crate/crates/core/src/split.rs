//! Hypergraph representations of elementary split matroids.
//!
//! A representation is a rank `r` together with hyperedges `H_i` and bounds `r_i`;
//! a set `X` is independent iff `|X| <= r` and `|X ∩ H_i| <= r_i` for every `i`.
//! It describes a matroid when
//!
//! * (H1) `|H_i ∩ H_j| <= r_i + r_j - r` for all `i < j`, and
//! * (H2) `|S - H_i| + r_i >= r` for all `i`.
//!
//! It is non-redundant when additionally every `r_i <= r - 1` and `|H_i| >= r_i + 1`.
//! The ground set is a subset of `0..size`; contraction removes elements from it
//! instead of relabelling, so minors keep the labels of the original matroid.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{input, internal, Result};
use crate::matroid::{basis_unchecked, Matroid};
use crate::set::{ElementSet, GroundSet};

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct HyperedgeConstraint {
    pub elements: ElementSet,
    pub bound: usize,
}

impl HyperedgeConstraint {
    pub fn new(elements: ElementSet, bound: usize) -> Self {
        HyperedgeConstraint { elements, bound }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct SplitRepresentation {
    size: usize,
    ground: ElementSet,
    rank: usize,
    constraints: Vec<HyperedgeConstraint>,
}

/// A failed (H1) or (H2) inequality.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "condition")]
pub enum Violation {
    /// `|H_i ∩ H_j| > r_i + r_j - r`.
    H1 {
        i: usize,
        j: usize,
        intersection: usize,
        allowed: i64,
    },
    /// `|S - H_i| + r_i < r`.
    H2 { i: usize, slack: usize, rank: usize },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::H1 {
                i,
                j,
                intersection,
                allowed,
            } => write!(
                f,
                "(H1) fails for hyperedges {i} and {j}: |H_{i} ∩ H_{j}| = {intersection} > {allowed}"
            ),
            Violation::H2 { i, slack, rank } => write!(
                f,
                "(H2) fails for hyperedge {i}: |S - H_{i}| + r_{i} = {slack} < {rank}"
            ),
        }
    }
}

/// Indices of the hyperedges at which a set is tight.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TightnessReport {
    pub set: ElementSet,
    pub tight_indices: Vec<usize>,
}

impl SplitRepresentation {
    /// Builds a representation on the full ground set `0..size`.
    ///
    /// Only structural checks happen here (ranges, proper non-empty hyperedges,
    /// `rank <= size`); (H1) and (H2) are reported by [`Self::validate`].
    pub fn new(size: usize, rank: usize, constraints: Vec<HyperedgeConstraint>) -> Result<Self> {
        let ground = GroundSet::new(size)?.all();
        if rank > size {
            return input(format!("rank {rank} exceeds the ground set size {size}"));
        }
        for (i, c) in constraints.iter().enumerate() {
            if !c.elements.is_subset(ground) {
                return input(format!(
                    "hyperedge {i} = {} leaves the ground set 0..{size}",
                    c.elements
                ));
            }
            if c.elements.is_empty() || c.elements == ground {
                return input(format!(
                    "hyperedge {i} = {} must be a proper non-empty subset of the ground set",
                    c.elements
                ));
            }
        }
        Ok(SplitRepresentation {
            size,
            ground,
            rank,
            constraints,
        })
    }

    /// Convenience constructor from `(elements, bound)` lists.
    pub fn from_lists(size: usize, rank: usize, hyperedges: &[(&[usize], usize)]) -> Result<Self> {
        let ground = GroundSet::new(size)?;
        let constraints = hyperedges
            .iter()
            .map(|&(elements, bound)| {
                Ok(HyperedgeConstraint::new(
                    ElementSet::try_from_slice(elements, ground)?,
                    bound,
                ))
            })
            .collect::<Result<Vec<_>>>()?;
        SplitRepresentation::new(size, rank, constraints)
    }

    /// The uniform matroid `U(rank, size)`.
    pub fn uniform(size: usize, rank: usize) -> Result<Self> {
        SplitRepresentation::new(size, rank, Vec::new())
    }

    /// Size of the label space `0..size`; the ground set may be smaller after contraction.
    pub fn size(&self) -> usize {
        self.size
    }

    pub fn ground(&self) -> ElementSet {
        self.ground
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn constraints(&self) -> &[HyperedgeConstraint] {
        &self.constraints
    }

    pub fn hyperedge(&self, i: usize) -> ElementSet {
        self.constraints[i].elements
    }

    pub fn bound(&self, i: usize) -> usize {
        self.constraints[i].bound
    }

    /// `|F ∩ H_i| = r_i`.
    pub fn is_tight(&self, set: ElementSet, i: usize) -> bool {
        (set & self.constraints[i].elements).len() == self.constraints[i].bound
    }

    /// Every (H1) and (H2) failure, in index order.
    pub fn validate(&self) -> Vec<Violation> {
        let r = self.rank as i64;
        let mut violations = Vec::new();
        for (i, ci) in self.constraints.iter().enumerate() {
            for (j, cj) in self.constraints.iter().enumerate().skip(i + 1) {
                let intersection = (ci.elements & cj.elements).len();
                let allowed = ci.bound as i64 + cj.bound as i64 - r;
                if intersection as i64 > allowed {
                    violations.push(Violation::H1 {
                        i,
                        j,
                        intersection,
                        allowed,
                    });
                }
            }
        }
        for (i, c) in self.constraints.iter().enumerate() {
            let slack = (self.ground - c.elements).len() + c.bound;
            if slack < self.rank {
                violations.push(Violation::H2 {
                    i,
                    slack,
                    rank: self.rank,
                });
            }
        }
        violations
    }

    pub fn ensure_valid(&self) -> Result<()> {
        let violations = self.validate();
        if violations.is_empty() {
            Ok(())
        } else {
            let msg: Vec<String> = violations.iter().map(ToString::to_string).collect();
            input(msg.join("; "))
        }
    }

    /// Drops the constraints that can never bind (`r_i >= r` or `|H_i| <= r_i`),
    /// keeping the rest in input order.
    pub fn normalize(&self) -> Result<SplitRepresentation> {
        self.ensure_valid()?;
        Ok(self.normalized_unchecked())
    }

    fn normalized_unchecked(&self) -> SplitRepresentation {
        let constraints = self
            .constraints
            .iter()
            .filter(|c| c.bound < self.rank && c.elements.len() > c.bound)
            .cloned()
            .collect();
        SplitRepresentation {
            constraints,
            ..self.clone()
        }
    }

    /// (H3) and (H4) hold for every constraint.
    pub fn is_nonredundant(&self) -> bool {
        self.constraints
            .iter()
            .all(|c| c.bound < self.rank && c.elements.len() > c.bound)
    }

    /// Every set of size `r - 1` is independent. Assumes a non-redundant representation.
    pub fn is_paving(&self) -> bool {
        debug_assert!(self.is_nonredundant());
        self.constraints.iter().all(|c| c.bound + 1 == self.rank)
    }

    fn check_range(&self, set: ElementSet) -> Result<()> {
        if set.is_subset(self.ground) {
            Ok(())
        } else {
            input(format!(
                "{} lies outside the ground set {}",
                set - self.ground,
                self.ground
            ))
        }
    }

    /// Independence test with a range check.
    pub fn independent(&self, set: ElementSet) -> Result<bool> {
        self.check_range(set)?;
        Ok(self.is_independent(set))
    }

    /// `min{r, |Z|, min_i |Z - H_i| + r_i}`.
    pub fn rank_of(&self, set: ElementSet) -> Result<usize> {
        self.check_range(set)?;
        Ok(self
            .constraints
            .iter()
            .map(|c| (set - c.elements).len() + c.bound)
            .fold(self.rank.min(set.len()), usize::min))
    }

    pub fn tight_hyperedges(&self, set: ElementSet) -> TightnessReport {
        let tight_indices: Vec<usize> = (0..self.constraints.len())
            .filter(|&i| self.is_tight(set, i))
            .collect();
        if cfg!(debug_assertions) && set.len() == self.rank && set.is_subset(self.ground) {
            if !tight_indices.is_empty() {
                debug_assert!(
                    basis_unchecked(self, set),
                    "{set} is tight at {tight_indices:?} but not a basis"
                );
            }
            for (a, &i) in tight_indices.iter().enumerate() {
                for &j in &tight_indices[a + 1..] {
                    let (hi, hj) = (self.hyperedge(i), self.hyperedge(j));
                    debug_assert!(
                        (hi & hj).is_subset(set) && set.is_subset(hi | hj),
                        "{set} is tight at {i} and {j} but not sandwiched"
                    );
                }
            }
        }
        TightnessReport { set, tight_indices }
    }

    /// `M / T`: rank `r - |T|`, constraints `(H_i - T, r_i - |H_i ∩ T|)`, normalized.
    pub fn contract(&self, t: ElementSet) -> Result<SplitRepresentation> {
        self.check_range(t)?;
        if !self.is_independent(t) {
            return input(format!("cannot contract the dependent set {t}"));
        }
        let mut constraints = Vec::with_capacity(self.constraints.len());
        for c in &self.constraints {
            let removed = (c.elements & t).len();
            let Some(bound) = c.bound.checked_sub(removed) else {
                return internal(format!(
                    "bound of {} went negative contracting the independent set {t}",
                    c.elements
                ));
            };
            constraints.push(HyperedgeConstraint::new(c.elements - t, bound));
        }
        let contracted = SplitRepresentation {
            size: self.size,
            ground: self.ground - t,
            rank: self.rank - t.len(),
            constraints,
        };
        if !contracted.validate().is_empty() {
            return internal(format!(
                "contraction by {t} broke (H1)/(H2): {:?}",
                contracted.validate()
            ));
        }
        Ok(contracted.normalized_unchecked())
    }

    /// Representation of `M | part` where `part` is a union of connected components.
    ///
    /// Obtained by contracting `rest_basis`, a basis of the remaining elements, which
    /// turns the rest into loops, and then dropping those loops.
    pub(crate) fn separator_minor(
        &self,
        part: ElementSet,
        rest_basis: ElementSet,
    ) -> Result<SplitRepresentation> {
        let contracted = self.contract(rest_basis)?;
        let dropped = contracted.ground - part;
        if let Some(e) = dropped.iter().find(|&e| contracted.is_independent(ElementSet::singleton(e))) {
            return internal(format!(
                "element {e} is not a loop after contracting {rest_basis}; {part} is not a separator"
            ));
        }
        let restricted = SplitRepresentation {
            size: self.size,
            ground: part,
            rank: contracted.rank,
            constraints: contracted
                .constraints
                .iter()
                .map(|c| HyperedgeConstraint::new(c.elements & part, c.bound))
                .collect(),
        };
        let violations = restricted.validate();
        if !violations.is_empty() {
            return internal(format!("restriction to {part} broke (H1)/(H2): {violations:?}"));
        }
        Ok(restricted.normalized_unchecked())
    }
}

impl Matroid for SplitRepresentation {
    fn ground(&self) -> ElementSet {
        self.ground
    }

    fn is_independent(&self, set: ElementSet) -> bool {
        set.len() <= self.rank
            && self
                .constraints
                .iter()
                .all(|c| (set & c.elements).len() <= c.bound)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matroid::{contract_oracle, is_basis, oracle_rank};

    fn set<const N: usize>(e: [usize; N]) -> ElementSet {
        ElementSet::from(e)
    }

    fn e1() -> SplitRepresentation {
        SplitRepresentation::from_lists(6, 3, &[(&[0, 1, 2], 2)]).unwrap()
    }

    fn k4() -> SplitRepresentation {
        SplitRepresentation::from_lists(
            6,
            3,
            &[(&[0, 1, 3], 2), (&[0, 2, 4], 2), (&[1, 2, 5], 2), (&[3, 4, 5], 2)],
        )
        .unwrap()
    }

    #[test]
    fn structural_errors() {
        assert!(SplitRepresentation::from_lists(4, 5, &[]).is_err());
        assert!(SplitRepresentation::from_lists(4, 2, &[(&[0, 4], 1)]).is_err());
        assert!(SplitRepresentation::from_lists(4, 2, &[(&[], 1)]).is_err());
        assert!(SplitRepresentation::from_lists(4, 2, &[(&[0, 1, 2, 3], 1)]).is_err());
    }

    #[test]
    fn validate_examples() {
        assert!(e1().validate().is_empty());
        assert!(k4().validate().is_empty());
        let bad = SplitRepresentation::from_lists(6, 3, &[(&[0, 1, 2], 2), (&[0, 1, 3], 2)]).unwrap();
        assert_eq!(
            bad.validate(),
            vec![Violation::H1 {
                i: 0,
                j: 1,
                intersection: 2,
                allowed: 1
            }]
        );
        let h2 = SplitRepresentation::from_lists(4, 3, &[(&[0, 1, 2], 1)]).unwrap();
        assert_eq!(
            h2.validate(),
            vec![Violation::H2 {
                i: 0,
                slack: 2,
                rank: 3
            }]
        );
        assert!(bad.normalize().is_err());
    }

    #[test]
    fn normalize_examples() {
        assert_eq!(e1().normalize().unwrap(), e1());
        let loose = SplitRepresentation::from_lists(5, 2, &[(&[0, 1, 2], 2)]).unwrap();
        assert!(loose.normalize().unwrap().constraints().is_empty());
        let small = SplitRepresentation::from_lists(5, 3, &[(&[0, 1], 2)]).unwrap();
        assert!(small.normalize().unwrap().constraints().is_empty());
    }

    #[test]
    fn independence_examples() {
        assert!(e1().independent(set([0, 1, 3])).unwrap());
        assert!(!e1().independent(set([0, 1, 2])).unwrap());
        assert!(!k4().independent(set([0, 1, 3])).unwrap());
        assert!(e1().independent(set([0, 9])).is_err());
    }

    #[test]
    fn rank_examples() {
        assert_eq!(e1().rank_of(set([0, 1, 2])).unwrap(), 2);
        assert_eq!(e1().rank_of(ElementSet::full(6)).unwrap(), 3);
        assert_eq!(e1().rank_of(set([0, 1])).unwrap(), 2);
        for rep in [e1(), k4()] {
            for z in ElementSet::full(6).subsets() {
                assert_eq!(rep.rank_of(z).unwrap(), oracle_rank(&rep, z).unwrap(), "{z}");
            }
        }
    }

    #[test]
    fn tightness_examples() {
        assert_eq!(e1().tight_hyperedges(set([0, 1, 3])).tight_indices, vec![0]);
        assert_eq!(k4().tight_hyperedges(set([0, 1, 2])).tight_indices, vec![0, 1, 2]);
        let u = SplitRepresentation::uniform(4, 2).unwrap();
        assert!(u.tight_hyperedges(set([0, 1])).tight_indices.is_empty());
        assert!(is_basis(&k4(), set([0, 1, 2])).unwrap());
    }

    #[test]
    fn contraction_examples() {
        assert_eq!(e1().contract(ElementSet::EMPTY).unwrap(), e1());
        let c = e1().contract(set([0])).unwrap();
        assert_eq!(c.ground(), set([1, 2, 3, 4, 5]));
        assert_eq!(c.rank(), 2);
        assert_eq!(c.constraints(), &[HyperedgeConstraint::new(set([1, 2]), 1)]);
        let c = e1().contract(set([3])).unwrap();
        assert_eq!(c.ground(), set([0, 1, 2, 4, 5]));
        assert_eq!(c.rank(), 2);
        assert!(c.constraints().is_empty());
        assert!(e1().contract(set([0, 1, 2])).is_err());

        for t in [set([0]), set([3]), set([0, 3]), set([1, 4])] {
            let rep = e1().contract(t).unwrap();
            let oracle = contract_oracle(e1(), t).unwrap();
            for x in rep.ground().subsets() {
                assert_eq!(rep.is_independent(x), oracle.is_independent(x));
            }
        }
    }

    #[test]
    fn separator_minor_of_direct_sum() {
        // U(1,2) on {0,1} plus U(1,3) on {2,3,4}
        let rep = SplitRepresentation::from_lists(
            5,
            2,
            &[(&[0, 1], 1), (&[2, 3, 4], 1)],
        )
        .unwrap();
        assert!(rep.validate().is_empty());
        let minor = rep.separator_minor(set([2, 3, 4]), set([0])).unwrap();
        assert_eq!(minor.ground(), set([2, 3, 4]));
        assert_eq!(minor.rank(), 1);
        assert!(minor.constraints().is_empty());
        assert!(rep.separator_minor(set([2, 3, 4]), ElementSet::EMPTY).is_err());
    }
}
