//! Python bindings. Sets cross the boundary as lists of element indices.

use bx::format::{CertificateSummary, InstanceFile};
use bx::generators::{all_compatible_pairs, Family, GeneratorConfig};
use bx::oracle::{self, Distance, Equitability, OracleCaps};
use bx::{BasisPairInstance, Element, ElementSet, Error, GroundSet, HyperedgeConstraint};
use pyo3::create_exception;
use pyo3::exceptions::{PyException, PyRuntimeError, PyValueError};
use pyo3::prelude::*;

create_exception!(basis_exchange, InfeasibleError, PyException);
create_exception!(basis_exchange, CapacityError, PyException);

fn py_err(e: Error) -> PyErr {
    match e {
        Error::Input(m) => PyValueError::new_err(m),
        Error::Infeasible(m) => InfeasibleError::new_err(m),
        Error::Internal(m) => PyRuntimeError::new_err(m),
        Error::Capacity(m) => CapacityError::new_err(m),
    }
}

fn set_of(elements: &[Element], n: usize) -> PyResult<ElementSet> {
    let ground = GroundSet::new(n).map_err(py_err)?;
    ElementSet::try_from_slice(elements, ground).map_err(py_err)
}

fn caps(max_nodes: usize, max_rank: usize) -> OracleCaps {
    OracleCaps {
        max_nodes,
        max_rank,
        ..OracleCaps::default()
    }
}

/// A split matroid given by its elementary split representation.
#[pyclass(name = "SplitRepresentation", module = "basis_exchange", frozen, skip_from_py_object)]
#[derive(Clone)]
struct PySplit {
    inner: bx::SplitRepresentation,
}

impl PySplit {
    fn set(&self, elements: &[Element]) -> PyResult<ElementSet> {
        set_of(elements, self.inner.size())
    }

    fn pair(&self, a1: Vec<Element>, a2: Vec<Element>, b1: Vec<Element>, b2: Vec<Element>) -> PyResult<BasisPairInstance> {
        Ok(BasisPairInstance::new(self.set(&a1)?, self.set(&a2)?, self.set(&b1)?, self.set(&b2)?))
    }
}

#[pymethods]
impl PySplit {
    /// `hyperedges` is a list of `(elements, bound)`.
    #[new]
    fn new(n: usize, rank: usize, hyperedges: Vec<(Vec<Element>, usize)>) -> PyResult<Self> {
        let constraints = hyperedges
            .iter()
            .map(|(h, b)| Ok(HyperedgeConstraint::new(set_of(h, n)?, *b)))
            .collect::<PyResult<Vec<_>>>()?;
        let inner = bx::SplitRepresentation::new(n, rank, constraints).map_err(py_err)?;
        Ok(PySplit { inner })
    }

    /// Uniform matroid `U(rank, n)`.
    #[staticmethod]
    fn uniform(n: usize, rank: usize) -> PyResult<Self> {
        Ok(PySplit {
            inner: bx::SplitRepresentation::uniform(n, rank).map_err(py_err)?,
        })
    }

    #[staticmethod]
    fn k4() -> Self {
        PySplit {
            inner: bx::generators::k4(),
        }
    }

    /// Seeded instance of `family` (uniform, sparse-paving, paving, elementary-split, k4).
    #[staticmethod]
    #[pyo3(signature = (family, n, r, seed=0, density=0))]
    fn generate(family: &str, n: usize, r: usize, seed: u64, density: usize) -> PyResult<Self> {
        let family: Family = family.parse().map_err(py_err)?;
        let inner = GeneratorConfig::new(family, n, r, seed, density)
            .generate()
            .map_err(py_err)?;
        Ok(PySplit { inner })
    }

    /// Parses an instance file; returns the representation and its listed pairs.
    #[staticmethod]
    fn from_json(text: &str) -> PyResult<(Self, Vec<[Vec<Element>; 4]>)> {
        let file = InstanceFile::from_json(text).map_err(py_err)?;
        let inner = file.representation().map_err(py_err)?;
        let pairs = file.checked_pairs().map_err(py_err)?;
        Ok((PySplit { inner }, pairs.iter().map(pair_lists).collect()))
    }

    #[pyo3(signature = (name = "instance"))]
    fn to_json(&self, name: &str) -> PyResult<String> {
        Ok(InstanceFile::new(name, &self.inner, Vec::new()).map_err(py_err)?.to_json())
    }

    #[getter]
    fn n(&self) -> usize {
        self.inner.size()
    }

    #[getter]
    fn rank(&self) -> usize {
        self.inner.rank()
    }

    #[getter]
    fn hyperedges(&self) -> Vec<(Vec<Element>, usize)> {
        self.inner
            .constraints()
            .iter()
            .map(|c| (c.elements.to_vec(), c.bound))
            .collect()
    }

    /// Failed (H1)/(H2) conditions, as messages.
    fn validate(&self) -> Vec<String> {
        self.inner.validate().iter().map(ToString::to_string).collect()
    }

    fn is_independent(&self, elements: Vec<Element>) -> PyResult<bool> {
        self.inner.independent(self.set(&elements)?).map_err(py_err)
    }

    fn rank_of(&self, elements: Vec<Element>) -> PyResult<usize> {
        self.inner.rank_of(self.set(&elements)?).map_err(py_err)
    }

    fn contract(&self, elements: Vec<Element>) -> PyResult<Self> {
        let inner = self.inner.contract(self.set(&elements)?).map_err(py_err)?;
        Ok(PySplit { inner })
    }

    fn bases(&self) -> Vec<Vec<Element>> {
        bx::all_bases(&self.inner).into_iter().map(ElementSet::to_vec).collect()
    }

    /// Every compatible pair `(A1, A2, B1, B2)`.
    fn compatible_pairs(&self) -> Vec<[Vec<Element>; 4]> {
        all_compatible_pairs(&self.inner, false).iter().map(pair_lists).collect()
    }

    fn __repr__(&self) -> String {
        format!(
            "SplitRepresentation(n={}, rank={}, hyperedges={})",
            self.inner.size(),
            self.inner.rank(),
            self.inner.constraints().len()
        )
    }
}

fn pair_lists(p: &BasisPairInstance) -> [Vec<Element>; 4] {
    [p.a1.to_vec(), p.a2.to_vec(), p.b1.to_vec(), p.b2.to_vec()]
}

fn steps(seq: &bx::ExchangeSequence) -> Vec<(Element, Element)> {
    seq.steps.iter().map(|s| (s.x, s.y)).collect()
}

#[pyclass(name = "SolveResult", module = "basis_exchange", frozen, get_all)]
struct PySolveResult {
    distance: usize,
    lower_bound: usize,
    monotone_length: usize,
    /// `(x, y)` pairs: `x` leaves the first basis, `y` enters it.
    sequence: Vec<(Element, Element)>,
    oracle_queries: u64,
    /// JSON summary of the blocking certificate, if the pair needed one extra exchange.
    certificate: Option<String>,
}

#[pymethods]
impl PySolveResult {
    fn __repr__(&self) -> String {
        format!(
            "SolveResult(distance={}, lower_bound={}, sequence={:?})",
            self.distance, self.lower_bound, self.sequence
        )
    }
}

/// Precomputes components of a representation for repeated solves.
#[pyclass(name = "Solver", module = "basis_exchange", frozen)]
struct PySolver {
    inner: bx::Solver,
    rep: PySplit,
}

#[pymethods]
impl PySolver {
    #[new]
    fn new(rep: &PySplit) -> PyResult<Self> {
        Ok(PySolver {
            inner: bx::Solver::new(&rep.inner).map_err(py_err)?,
            rep: rep.clone(),
        })
    }

    /// Shortest symmetric exchange sequence from `(a1, a2)` to `(b1, b2)`.
    fn solve(&self, a1: Vec<Element>, a2: Vec<Element>, b1: Vec<Element>, b2: Vec<Element>) -> PyResult<PySolveResult> {
        let pair = self.rep.pair(a1, a2, b1, b2)?;
        let r = self.inner.solve(&pair).map_err(py_err)?;
        let certificate = r
            .certificate
            .as_ref()
            .map(|c| serde_json::to_string(&CertificateSummary::from(c)).expect("summary serializes"));
        Ok(PySolveResult {
            distance: r.distance,
            lower_bound: r.lower_bound,
            monotone_length: r.monotone_length,
            sequence: steps(&r.sequence),
            oracle_queries: r.oracle_queries,
            certificate,
        })
    }

    /// Longest strictly monotone sequence from `(a1, a2)` towards `(b1, b2)`.
    fn longest_monotone(
        &self,
        a1: Vec<Element>,
        a2: Vec<Element>,
        b1: Vec<Element>,
        b2: Vec<Element>,
    ) -> PyResult<Vec<(Element, Element)>> {
        let pair = self.rep.pair(a1, a2, b1, b2)?;
        Ok(steps(&self.inner.longest_monotone(&pair).map_err(py_err)?))
    }
}

#[pyfunction]
fn solve(rep: &PySplit, a1: Vec<Element>, a2: Vec<Element>, b1: Vec<Element>, b2: Vec<Element>) -> PyResult<PySolveResult> {
    PySolver::new(rep)?.solve(a1, a2, b1, b2)
}

/// Whether the sequence transforms `(a1, a2)` into `(b1, b2)` by symmetric exchanges.
#[pyfunction]
fn verify_sequence(
    rep: &PySplit,
    a1: Vec<Element>,
    a2: Vec<Element>,
    b1: Vec<Element>,
    b2: Vec<Element>,
    sequence: Vec<(Element, Element)>,
) -> PyResult<bool> {
    let pair = rep.pair(a1, a2, b1, b2)?;
    bx::verify_sequence(&rep.inner, &pair, &bx::ExchangeSequence::from_pairs(&sequence)).map_err(py_err)
}

/// Breadth-first exchange distance; `None` when unreachable.
#[pyfunction]
#[pyo3(signature = (rep, a1, a2, b1, b2, max_nodes = OracleCaps::default().max_nodes))]
fn bf_exchange_distance(
    rep: &PySplit,
    a1: Vec<Element>,
    a2: Vec<Element>,
    b1: Vec<Element>,
    b2: Vec<Element>,
    max_nodes: usize,
) -> PyResult<Option<usize>> {
    let pair = rep.pair(a1, a2, b1, b2)?;
    let caps = caps(max_nodes, OracleCaps::default().max_rank);
    Ok(match oracle::bf_exchange_distance(&rep.inner, &pair, &caps).map_err(py_err)? {
        Distance::Finite(d) => Some(d),
        Distance::Infinite => None,
    })
}

#[pyfunction]
#[pyo3(signature = (rep, a1, a2, b1, b2, max_rank = OracleCaps::default().max_rank))]
fn bf_longest_monotone(
    rep: &PySplit,
    a1: Vec<Element>,
    a2: Vec<Element>,
    b1: Vec<Element>,
    b2: Vec<Element>,
    max_rank: usize,
) -> PyResult<usize> {
    let pair = rep.pair(a1, a2, b1, b2)?;
    let caps = caps(OracleCaps::default().max_nodes, max_rank);
    oracle::bf_longest_monotone(&rep.inner, &pair, &caps).map_err(py_err)
}

/// Orderings `(a_1..a_r, b_1..b_r)` with every mixed prefix/suffix a basis, or `None`.
#[pyfunction]
fn gabow_ordering(rep: &PySplit, a: Vec<Element>, b: Vec<Element>) -> PyResult<Option<(Vec<Element>, Vec<Element>)>> {
    let found = oracle::gabow_ordering(&rep.inner, rep.set(&a)?, rep.set(&b)?, &OracleCaps::default())
        .map_err(py_err)?;
    Ok(found.map(|o| (o.a, o.b)))
}

/// `"equitable"`, `"not_partitionable"` or `"counterexample"` with the offending subset.
#[pyfunction]
fn equitable_check(rep: &PySplit) -> PyResult<(String, Option<Vec<Element>>)> {
    let result = oracle::equitable_check(&rep.inner, &OracleCaps::default()).map_err(py_err)?;
    Ok(match result {
        Equitability::Equitable => ("equitable".into(), None),
        Equitability::NotPartitionable => ("not_partitionable".into(), None),
        Equitability::Counterexample { subset } => ("counterexample".into(), Some(subset.to_vec())),
        Equitability::NoCounterexampleFound { .. } => ("no_counterexample_found".into(), None),
    })
}

#[pyfunction]
fn compatible(a1: Vec<Element>, a2: Vec<Element>, b1: Vec<Element>, b2: Vec<Element>) -> PyResult<bool> {
    let n = [&a1, &a2, &b1, &b2]
        .iter()
        .flat_map(|v| v.iter())
        .max()
        .map_or(0, |&e| e + 1);
    let set = |v: &[Element]| set_of(v, n);
    Ok(bx::compatible(&BasisPairInstance::new(set(&a1)?, set(&a2)?, set(&b1)?, set(&b2)?)))
}

#[pymodule]
fn basis_exchange(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PySplit>()?;
    m.add_class::<PySolver>()?;
    m.add_class::<PySolveResult>()?;
    m.add("InfeasibleError", m.py().get_type::<InfeasibleError>())?;
    m.add("CapacityError", m.py().get_type::<CapacityError>())?;
    m.add_function(wrap_pyfunction!(solve, m)?)?;
    m.add_function(wrap_pyfunction!(verify_sequence, m)?)?;
    m.add_function(wrap_pyfunction!(bf_exchange_distance, m)?)?;
    m.add_function(wrap_pyfunction!(bf_longest_monotone, m)?)?;
    m.add_function(wrap_pyfunction!(gabow_ordering, m)?)?;
    m.add_function(wrap_pyfunction!(equitable_check, m)?)?;
    m.add_function(wrap_pyfunction!(compatible, m)?)?;
    Ok(())
}
