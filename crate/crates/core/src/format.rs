//! JSON instance and report files.
//!
//! Keys are emitted in declaration order and all numbers are integers, so the
//! same instance always serializes to the same bytes.

use serde::{Deserialize, Serialize};

use crate::error::{input, Error, Result};
use crate::generators::{GeneratorConfig, RNG_ID};
use crate::matroid::{BasisPairInstance, ExchangeSequence};
use crate::oracle::{CyclicOrdering, Distance, Equitability};
use crate::set::{Element, ElementSet};
use crate::solver::{BlockingCertificate, PivotCase, SolveResult, Symmetry};
use crate::split::{HyperedgeConstraint, SplitRepresentation};

/// Provenance of a generated instance.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GeneratorHeader {
    pub rng: String,
    pub config: GeneratorConfig,
}

impl GeneratorHeader {
    pub fn new(config: GeneratorConfig) -> Self {
        GeneratorHeader {
            rng: RNG_ID.to_string(),
            config,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InstanceFile {
    pub name: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub generator: Option<GeneratorHeader>,
    pub ground_set_size: usize,
    pub rank: usize,
    pub hyperedges: Vec<HyperedgeConstraint>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub pairs: Vec<BasisPairInstance>,
}

impl InstanceFile {
    pub fn new(name: impl Into<String>, rep: &SplitRepresentation, pairs: Vec<BasisPairInstance>) -> Result<Self> {
        if rep.ground() != ElementSet::full(rep.size()) {
            return input("only representations on a full ground set 0..n can be written");
        }
        Ok(InstanceFile {
            name: name.into(),
            generator: None,
            ground_set_size: rep.size(),
            rank: rep.rank(),
            hyperedges: rep.constraints().to_vec(),
            pairs,
        })
    }

    pub fn with_generator(mut self, config: GeneratorConfig) -> Self {
        self.generator = Some(GeneratorHeader::new(config));
        self
    }

    /// The representation, with structural checks only; see [`SplitRepresentation::validate`].
    pub fn representation(&self) -> Result<SplitRepresentation> {
        SplitRepresentation::new(self.ground_set_size, self.rank, self.hyperedges.clone())
    }

    /// The listed pairs, checked to lie in the ground set and to have `rank` elements each.
    pub fn checked_pairs(&self) -> Result<Vec<BasisPairInstance>> {
        let ground = ElementSet::full(self.ground_set_size);
        for (i, p) in self.pairs.iter().enumerate() {
            if !p.support().is_subset(ground) {
                return input(format!("pair {i} uses elements outside 0..{}", self.ground_set_size));
            }
            for s in [p.a1, p.a2, p.b1, p.b2] {
                if s.len() != self.rank {
                    return input(format!("pair {i} has a set {s} of size {} != rank {}", s.len(), self.rank));
                }
            }
        }
        Ok(self.pairs.clone())
    }

    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::Input(format!("malformed instance file: {e}")))
    }

    pub fn to_json(&self) -> String {
        to_json(self)
    }
}

pub(crate) fn to_json<T: Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("report types serialize");
    s.push('\n');
    s
}

/// Condensed view of a [`BlockingCertificate`].
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CertificateSummary {
    pub hyperedges: [ElementSet; 4],
    pub gap: usize,
    pub final_steps: usize,
    pub pivot: Element,
    pub pivot_case: PivotCase,
    pub pivot_memberships: usize,
    pub symmetry: Symmetry,
}

impl From<&BlockingCertificate> for CertificateSummary {
    fn from(c: &BlockingCertificate) -> Self {
        CertificateSummary {
            hyperedges: c.hyperedge_sets,
            gap: c.gap,
            final_steps: c.gap + 1,
            pivot: c.pivot,
            pivot_case: c.pivot_case,
            pivot_memberships: c.pivot_memberships,
            symmetry: c.symmetry,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CrossCheck {
    pub bf_distance: Distance,
    pub bf_longest_monotone: usize,
    pub agrees: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SolveRecord {
    pub pair: BasisPairInstance,
    pub distance: usize,
    pub lower_bound: usize,
    pub sequence: ExchangeSequence,
    pub monotone_length: usize,
    pub certificate: Option<CertificateSummary>,
    pub oracle_queries: u64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub cross_check: Option<CrossCheck>,
    pub elapsed_us: u64,
}

impl SolveRecord {
    pub fn new(pair: BasisPairInstance, result: &SolveResult, elapsed_us: u64) -> Self {
        SolveRecord {
            pair,
            distance: result.distance,
            lower_bound: result.lower_bound,
            sequence: result.sequence.clone(),
            monotone_length: result.monotone_length,
            certificate: result.certificate.as_ref().map(CertificateSummary::from),
            oracle_queries: result.oracle_queries,
            cross_check: None,
            elapsed_us,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DistanceRecord {
    pub pair: BasisPairInstance,
    pub distance: Distance,
    pub elapsed_us: u64,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct MonotoneRecord {
    pub pair: BasisPairInstance,
    pub length: usize,
    pub sequence: ExchangeSequence,
    pub bf_length: Option<usize>,
    pub elapsed_us: u64,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GabowRecord {
    pub a: ElementSet,
    pub b: ElementSet,
    pub ordering: Option<CyclicOrdering>,
    pub from_solver: Option<CyclicOrdering>,
    pub valid: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct White2Record {
    pub pair: BasisPairInstance,
    pub compatible: bool,
    pub equivalent: bool,
    pub consistent: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct EquitableRecord {
    pub result: Equitability,
    pub skipped: bool,
}

/// Output of one CLI command on one instance file.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ReportFile<R> {
    pub instance: String,
    pub command: String,
    pub records: Vec<R>,
}

impl<R: Serialize> ReportFile<R> {
    pub fn to_json(&self) -> String {
        to_json(self)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::generators::{k4, Family};
    use crate::solver::solve;

    #[test]
    fn instance_round_trip_is_byte_exact() {
        let cfg = GeneratorConfig::new(Family::SparsePaving, 8, 4, 7, 5);
        let rep = cfg.generate().unwrap();
        let pairs = crate::generators::gen_compatible_pairs(&rep, 1, 3);
        let file = InstanceFile::new("sp", &rep, pairs).unwrap().with_generator(cfg);
        let text = file.to_json();
        let back = InstanceFile::from_json(&text).unwrap();
        assert_eq!(back, file);
        assert_eq!(back.to_json(), text);
        assert_eq!(back.representation().unwrap(), rep);
    }

    #[test]
    fn parses_hand_written_instance() {
        let text = r#"{
            "name": "e1",
            "ground_set_size": 6,
            "rank": 3,
            "hyperedges": [{"elements": [0, 1, 2], "bound": 2}],
            "pairs": [{"A1": [0, 1, 3], "A2": [2, 4, 5], "B1": [0, 1, 4], "B2": [2, 3, 5]}]
        }"#;
        let file = InstanceFile::from_json(text).unwrap();
        let rep = file.representation().unwrap();
        let pairs = file.checked_pairs().unwrap();
        assert_eq!(solve(&rep, &pairs[0]).unwrap().distance, 1);
    }

    #[test]
    fn rejects_bad_files() {
        assert!(InstanceFile::from_json("{").is_err());
        let out_of_range = r#"{"name": "x", "ground_set_size": 3, "rank": 1,
            "hyperedges": [], "pairs": [{"A1": [5], "A2": [1], "B1": [5], "B2": [1]}]}"#;
        assert!(InstanceFile::from_json(out_of_range).unwrap().checked_pairs().is_err());
        let repeated = r#"{"name": "x", "ground_set_size": 3, "rank": 1,
            "hyperedges": [{"elements": [0, 0], "bound": 1}]}"#;
        assert!(InstanceFile::from_json(repeated).is_err());
    }

    #[test]
    fn report_carries_certificate_summary() {
        let rep = k4();
        let pair = BasisPairInstance::new(
            ElementSet::from([0, 1, 4]),
            ElementSet::from([2, 3, 5]),
            ElementSet::from([0, 2, 3]),
            ElementSet::from([1, 4, 5]),
        );
        let result = solve(&rep, &pair).unwrap();
        let record = SolveRecord::new(pair, &result, 0);
        let summary = record.certificate.as_ref().unwrap();
        assert_eq!(summary.final_steps, 3);
        let report = ReportFile {
            instance: "k4".into(),
            command: "solve".into(),
            records: vec![record],
        };
        let back: ReportFile<SolveRecord> = serde_json::from_str(&report.to_json()).unwrap();
        assert_eq!(back, report);
    }
}
