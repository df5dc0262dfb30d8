//! Shortest symmetric exchange sequences in elementary split matroids.
//!
//! The solver contracts the common part of the two start bases, splits the rest into
//! connected components, and in every component grows a longest strictly monotone
//! sequence. A component where that sequence stops short is finished by the
//! `d + 1` step schedule of its [`BlockingCertificate`]; every other component needs
//! exactly its share of the lower bound.

mod certificate;
mod monotone;

use std::cell::Cell;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

pub use certificate::{
    build_certificate, final_schedule, find_blocking_quadruple, BlockingCertificate, BlockingQuadruple,
    PivotCase, ScheduleClasses, Symmetry,
};
pub use monotone::{extend_plus_two, greedy_monotone, monotone_fixpoint, Extension, MonotoneState, RewriteTemplate};

use crate::error::{input, internal, Error, Result};
use crate::matroid::{
    compatible, connected_components, verify_sequence, BasisPairInstance, ExchangeSequence, ExchangeStep, Matroid,
    DEFAULT_COMPONENT_CAP,
};
use crate::set::ElementSet;
use crate::split::SplitRepresentation;

/// Independence oracle of a representation that counts its queries.
#[derive(Debug)]
pub struct SplitOracle<'a> {
    rep: &'a SplitRepresentation,
    queries: Cell<u64>,
}

impl<'a> SplitOracle<'a> {
    pub fn new(rep: &'a SplitRepresentation) -> Self {
        SplitOracle {
            rep,
            queries: Cell::new(0),
        }
    }

    pub fn representation(&self) -> &'a SplitRepresentation {
        self.rep
    }

    pub fn queries(&self) -> u64 {
        self.queries.get()
    }
}

impl Matroid for SplitOracle<'_> {
    fn ground(&self) -> ElementSet {
        self.rep.ground()
    }

    fn is_independent(&self, set: ElementSet) -> bool {
        self.queries.set(self.queries.get() + 1);
        self.rep.is_independent(set)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SolveResult {
    pub distance: usize,
    pub lower_bound: usize,
    pub monotone_length: usize,
    pub sequence: ExchangeSequence,
    /// Present exactly when `distance = lower_bound + 1`.
    pub certificate: Option<BlockingCertificate>,
    /// Independence queries spent by this solve, excluding solver setup.
    pub oracle_queries: u64,
}

/// A normalized representation with its connected components precomputed.
#[derive(Debug, Clone)]
pub struct Solver {
    rep: SplitRepresentation,
    components: Option<Vec<ElementSet>>,
    setup_queries: u64,
}

struct Piece {
    rep: SplitRepresentation,
    pair: BasisPairInstance,
}

struct Outcome {
    sequence: Vec<ExchangeStep>,
    monotone_length: usize,
    certificate: Option<BlockingCertificate>,
    queries: u64,
}

impl Solver {
    /// Validates and normalizes `rep`. Components are computed when the ground set
    /// has at most [`DEFAULT_COMPONENT_CAP`] elements; larger matroids are solved whole.
    pub fn new(rep: &SplitRepresentation) -> Result<Self> {
        Solver::with_component_cap(rep, DEFAULT_COMPONENT_CAP)
    }

    pub fn with_component_cap(rep: &SplitRepresentation, cap: usize) -> Result<Self> {
        let rep = rep.normalize()?;
        let oracle = SplitOracle::new(&rep);
        let components = match connected_components(&oracle, cap) {
            Ok(c) => Some(c),
            Err(Error::Capacity(_)) => None,
            Err(e) => return Err(e),
        };
        let setup_queries = oracle.queries();
        Ok(Solver {
            rep,
            components,
            setup_queries,
        })
    }

    /// The normalized representation the solver works with.
    pub fn representation(&self) -> &SplitRepresentation {
        &self.rep
    }

    pub fn components(&self) -> Option<&[ElementSet]> {
        self.components.as_deref()
    }

    pub fn setup_queries(&self) -> u64 {
        self.setup_queries
    }

    fn check_pair(&self, pair: &BasisPairInstance) -> Result<()> {
        if !pair.support().is_subset(self.rep.ground()) {
            return input(format!(
                "basis pair uses elements outside the ground set {}",
                self.rep.ground()
            ));
        }
        pair.check_bases(&self.rep)?;
        if !compatible(pair) {
            return Err(Error::Infeasible(format!(
                "({}, {}) and ({}, {}) differ in intersection or union",
                pair.a1, pair.a2, pair.b1, pair.b2
            )));
        }
        Ok(())
    }

    fn pieces(&self, pair: &BasisPairInstance) -> Result<Vec<Piece>> {
        let t = pair.a1 & pair.a2;
        let contracted = self.rep.contract(t)?;
        let local = pair.minus(t);
        let parts: Vec<ElementSet> = match &self.components {
            Some(components) if components.len() > 1 => components
                .iter()
                .map(|&c| c - t)
                .filter(|c| !(local.a1 - local.b1).is_disjoint(*c))
                .collect(),
            _ => {
                return Ok(vec![Piece {
                    rep: contracted,
                    pair: local,
                }])
            }
        };
        parts
            .into_iter()
            .map(|part| {
                Ok(Piece {
                    rep: contracted.separator_minor(part, local.a1 - part)?,
                    pair: local.restrict(part),
                })
            })
            .collect()
    }

    fn run(&self, pair: &BasisPairInstance, finish: bool) -> Result<Outcome> {
        self.check_pair(pair)?;
        let mut out = Outcome {
            sequence: Vec::new(),
            monotone_length: 0,
            certificate: None,
            queries: 0,
        };
        for piece in self.pieces(pair)? {
            if piece.pair.a1 == piece.pair.b1 {
                continue;
            }
            if piece.rep.constraints().is_empty() {
                let leaving = piece.pair.a1 - piece.pair.b1;
                let entering = piece.pair.b1 - piece.pair.a1;
                out.sequence
                    .extend(leaving.iter().zip(entering).map(|(x, y)| ExchangeStep::new(x, y)));
                out.monotone_length += leaving.len();
                continue;
            }
            let oracle = SplitOracle::new(&piece.rep);
            let state = monotone_fixpoint(&oracle, piece.pair)?;
            out.monotone_length += state.len();
            out.sequence.extend(state.steps().steps);
            if finish && !state.is_complete() {
                if out.certificate.is_some() {
                    return internal("more than one component is blocked");
                }
                let quad = find_blocking_quadruple(&oracle, &state)?;
                let cert = build_certificate(&oracle, &state, &quad)?;
                out.sequence.extend(final_schedule(&oracle, &cert)?.steps);
                out.certificate = Some(cert);
            }
            out.queries += oracle.queries();
        }
        Ok(out)
    }

    /// A shortest symmetric exchange sequence from `(A1, A2)` to `(B1, B2)`.
    pub fn solve(&self, pair: &BasisPairInstance) -> Result<SolveResult> {
        let out = self.run(pair, true)?;
        let lower_bound = pair.lower_bound();
        let sequence = ExchangeSequence::new(out.sequence);
        let check = SplitOracle::new(&self.rep);
        if !verify_sequence(&check, pair, &sequence)? {
            return internal(format!("produced sequence {sequence:?} does not transform the pair"));
        }
        let expected = lower_bound + usize::from(out.certificate.is_some());
        if sequence.len() != expected {
            return internal(format!(
                "produced {} exchanges, expected {expected} (lower bound {lower_bound})",
                sequence.len()
            ));
        }
        Ok(SolveResult {
            distance: sequence.len(),
            lower_bound,
            monotone_length: out.monotone_length,
            sequence,
            certificate: out.certificate,
            oracle_queries: out.queries + check.queries(),
        })
    }

    /// A longest strictly monotone exchange sequence starting at `(A1, A2)`.
    pub fn longest_monotone(&self, pair: &BasisPairInstance) -> Result<ExchangeSequence> {
        Ok(ExchangeSequence::new(self.run(pair, false)?.sequence))
    }
}

/// One-shot [`Solver::solve`].
pub fn solve(rep: &SplitRepresentation, pair: &BasisPairInstance) -> Result<SolveResult> {
    Solver::new(rep)?.solve(pair)
}

/// One-shot [`Solver::longest_monotone`].
pub fn longest_monotone(rep: &SplitRepresentation, pair: &BasisPairInstance) -> Result<ExchangeSequence> {
    Solver::new(rep)?.longest_monotone(pair)
}

/// Matroid classes with a known guaranteed monotone length.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum MatroidClass {
    Split,
    BaseOrderableSplit,
    Paving,
}

impl MatroidClass {
    /// Guaranteed monotone length for rank `r` and `k = |A1 ∩ B1|`.
    pub fn monotone_bound(self, r: usize, k: usize) -> usize {
        match self {
            MatroidClass::Split => r.saturating_sub(3 * k),
            MatroidClass::BaseOrderableSplit => r.saturating_sub(2 * k),
            MatroidClass::Paving => r.saturating_sub(k + 2),
        }
    }
}

impl fmt::Display for MatroidClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            MatroidClass::Split => "split",
            MatroidClass::BaseOrderableSplit => "base-orderable-split",
            MatroidClass::Paving => "paving",
        })
    }
}

impl FromStr for MatroidClass {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "split" => Ok(MatroidClass::Split),
            "base-orderable-split" => Ok(MatroidClass::BaseOrderableSplit),
            "paving" => Ok(MatroidClass::Paving),
            other => input(format!("unknown matroid class {other:?}")),
        }
    }
}

/// Whether the longest monotone sequence reaches the class bound. Paving is checked
/// against the representation; base orderability is taken on trust.
pub fn monotone_bound_check(
    rep: &SplitRepresentation,
    pair: &BasisPairInstance,
    class: MatroidClass,
) -> Result<bool> {
    let solver = Solver::new(rep)?;
    if class == MatroidClass::Paving && !solver.representation().is_paving() {
        return input("the representation is not paving");
    }
    let length = solver.longest_monotone(pair)?.len();
    let k = (pair.a1 & pair.b1).len();
    Ok(length >= class.monotone_bound(rep.rank(), k))
}

#[cfg(test)]
mod tests {
    use super::*;

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

    #[test]
    fn e1_single_exchange() {
        let p = BasisPairInstance::new(set([0, 1, 3]), set([2, 4, 5]), set([0, 1, 4]), set([2, 3, 5]));
        let r = solve(&e1(), &p).unwrap();
        assert_eq!(r.distance, 1);
        assert_eq!(r.lower_bound, 1);
        assert_eq!(r.sequence, ExchangeSequence::from_pairs(&[(3, 4)]));
        assert!(r.certificate.is_none());
    }

    #[test]
    fn uniform_swap() {
        let rep = SplitRepresentation::uniform(4, 2).unwrap();
        let r = solve(&rep, &BasisPairInstance::swap(set([0, 1]), set([2, 3]))).unwrap();
        assert_eq!(r.distance, 2);
        assert_eq!(r.monotone_length, 2);
    }

    #[test]
    fn identity_is_free() {
        let p = BasisPairInstance::new(set([0, 1, 3]), set([2, 4, 5]), set([0, 1, 3]), set([2, 4, 5]));
        let r = solve(&e1(), &p).unwrap();
        assert_eq!(r.distance, 0);
        assert!(r.sequence.is_empty());
    }

    #[test]
    fn incompatible_is_infeasible() {
        let p = BasisPairInstance::new(set([0, 1, 3]), set([2, 4, 5]), set([0, 1, 4]), set([2, 3, 4]));
        assert!(matches!(solve(&e1(), &p), Err(Error::Input(_)) | Err(Error::Infeasible(_))));
        let p = BasisPairInstance::new(set([0, 1, 3]), set([2, 4, 5]), set([0, 3, 4]), set([1, 2, 5]));
        assert!(solve(&e1(), &p).is_ok());
        let p = BasisPairInstance::new(set([0, 1, 3]), set([0, 4, 5]), set([0, 1, 4]), set([0, 3, 5]));
        assert!(solve(&e1(), &p).is_ok());
        let p = BasisPairInstance::new(set([0, 1, 3]), set([2, 4, 5]), set([0, 3, 4]), set([0, 2, 5]));
        assert!(matches!(solve(&e1(), &p), Err(Error::Infeasible(_))));
    }

    #[test]
    fn k4_some_pair_needs_one_more() {
        let rep = k4();
        let solver = Solver::new(&rep).unwrap();
        let bases = crate::matroid::all_bases(&rep);
        let mut blocked = 0;
        for &a1 in &bases {
            for &a2 in &bases {
                for &b1 in &bases {
                    let b2 = ((a1 | a2) - b1) | (a1 & a2);
                    let p = BasisPairInstance::new(a1, a2, b1, b2);
                    if b2.len() != 3 || !compatible(&p) || !bases.contains(&b2) {
                        continue;
                    }
                    let r = solver.solve(&p).unwrap();
                    assert_eq!(r.monotone_length, solver.longest_monotone(&p).unwrap().len());
                    if r.certificate.is_some() {
                        blocked += 1;
                        assert_eq!(r.distance, r.lower_bound + 1);
                    } else {
                        assert_eq!(r.distance, r.lower_bound);
                    }
                }
            }
        }
        assert!(blocked > 0);
    }

    #[test]
    fn class_bounds() {
        assert_eq!(MatroidClass::Split.monotone_bound(4, 1), 1);
        assert_eq!(MatroidClass::Split.monotone_bound(4, 2), 0);
        assert_eq!(MatroidClass::BaseOrderableSplit.monotone_bound(4, 1), 2);
        assert_eq!(MatroidClass::Paving.monotone_bound(4, 1), 1);
        assert_eq!("paving".parse::<MatroidClass>().unwrap(), MatroidClass::Paving);
        assert!("matroid".parse::<MatroidClass>().is_err());
    }
}
