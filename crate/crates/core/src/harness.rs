//! Acceptance checks: the solver and its structural guarantees against the
//! brute-force oracles, over a seeded instance corpus.

use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::format::InstanceFile;
use crate::generators::{all_compatible_pairs, k4, Family, GeneratorConfig};
use crate::matroid::{
    all_bases, compatible, contract_oracle, is_basis, oracle_rank, verify_sequence, BasisPairInstance, Matroid,
};
use crate::oracle::{
    bf_distances_from, bf_exchange_distance, bf_longest_monotone, equitable_check, gabow_ordering,
    is_base_orderable, white2_equivalent, CyclicOrdering, Distance, Equitability, OracleCaps,
};
use crate::set::ElementSet;
use crate::solver::{MatroidClass, MonotoneState, SolveResult, Solver};
use crate::split::SplitRepresentation;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Scale {
    Smoke,
    Small,
    Full,
}

impl Scale {
    /// Number of generated instances besides `K4`.
    pub fn instance_count(self) -> u64 {
        match self {
            Scale::Smoke => 20,
            Scale::Small => 200,
            Scale::Full => 400,
        }
    }
}

impl fmt::Display for Scale {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Scale::Smoke => "smoke",
            Scale::Small => "small",
            Scale::Full => "full",
        })
    }
}

impl FromStr for Scale {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "smoke" => Ok(Scale::Smoke),
            "small" => Ok(Scale::Small),
            "full" => Ok(Scale::Full),
            other => Err(Error::Input(format!("unknown scale {other:?}"))),
        }
    }
}

#[derive(Debug, Clone)]
pub struct CorpusInstance {
    pub name: String,
    pub config: Option<GeneratorConfig>,
    pub rep: SplitRepresentation,
}

impl CorpusInstance {
    fn file(&self, pairs: Vec<BasisPairInstance>) -> InstanceFile {
        let file = InstanceFile::new(&self.name, &self.rep, pairs).expect("corpus instances use a full ground set");
        match &self.config {
            Some(cfg) => file.with_generator(cfg.clone()),
            None => file,
        }
    }
}

/// Seeded instances with `n <= 8` and `r <= 4`, plus `K4`.
pub fn corpus(scale: Scale) -> Vec<CorpusInstance> {
    let mut out = vec![CorpusInstance {
        name: "k4".into(),
        config: Some(GeneratorConfig::new(Family::K4, 6, 3, 0, 4)),
        rep: k4(),
    }];
    for i in 0..scale.instance_count() {
        let n = 4 + (i % 5) as usize;
        let r = 1 + ((i / 5) as usize) % 4.min(n - 1);
        let family = match (i % 4, r) {
            (_, 1) => Family::ElementarySplit,
            (1, _) => Family::SparsePaving,
            (2, _) => Family::Paving,
            _ => Family::ElementarySplit,
        };
        let density = 1 + ((i / 3) % 6) as usize;
        let config = GeneratorConfig::new(family, n, r, 0x5eed_0000 + i, density);
        let rep = config.generate().expect("corpus parameters are in range");
        out.push(CorpusInstance {
            name: format!("{}-{i:03}", family.name()),
            config: Some(config),
            rep,
        });
    }
    out
}

/// A failing case, serialized for replay.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FailureCase {
    pub criterion: usize,
    pub message: String,
    pub instance: InstanceFile,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CriterionReport {
    pub id: usize,
    pub title: String,
    pub passed: bool,
    /// Number of individual checks performed.
    pub checked: usize,
    pub failures: usize,
    pub detail: String,
    pub first_failure: Option<FailureCase>,
}

impl fmt::Display for CriterionReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "criterion {} [{}] {}: {} checks, {} failures; {}",
            self.id,
            if self.passed { "PASS" } else { "FAIL" },
            self.title,
            self.checked,
            self.failures,
            self.detail
        )
    }
}

#[derive(Debug, Default)]
struct Tally {
    checked: usize,
    failures: usize,
    first: Option<FailureCase>,
}

impl Tally {
    fn check(&mut self, ok: bool, fail: impl FnOnce() -> FailureCase) {
        self.checked += 1;
        if !ok {
            self.failures += 1;
            if self.first.is_none() {
                self.first = Some(fail());
            }
        }
    }

    fn merge(&mut self, other: Tally) {
        self.checked += other.checked;
        self.failures += other.failures;
        if self.first.is_none() {
            self.first = other.first;
        }
    }

    fn report(self, id: usize, title: &str, extra_ok: bool, detail: String) -> CriterionReport {
        CriterionReport {
            id,
            title: title.to_string(),
            passed: self.failures == 0 && self.checked > 0 && extra_ok,
            checked: self.checked,
            failures: self.failures,
            detail,
            first_failure: self.first,
        }
    }
}

pub type SolveFn = dyn Fn(&Solver, &BasisPairInstance) -> Result<SolveResult> + Sync;

fn default_solve(solver: &Solver, pair: &BasisPairInstance) -> Result<SolveResult> {
    solver.solve(pair)
}

/// Runs the acceptance criteria with a pluggable solve function.
pub struct Harness<'a> {
    scale: Scale,
    caps: OracleCaps,
    solve: &'a SolveFn,
}

#[derive(Debug, Default)]
struct PairSweep {
    distance: Tally,
    monotone: Tally,
    bounds: Tally,
    certificates: Tally,
    blocked_runs: usize,
    odd_pivot_runs: usize,
    other_certificate_failures: usize,
    orderable_pairs: usize,
    paving_pairs: usize,
}

impl PairSweep {
    fn merge(&mut self, o: PairSweep) {
        self.distance.merge(o.distance);
        self.monotone.merge(o.monotone);
        self.bounds.merge(o.bounds);
        self.certificates.merge(o.certificates);
        self.blocked_runs += o.blocked_runs;
        self.odd_pivot_runs += o.odd_pivot_runs;
        self.other_certificate_failures += o.other_certificate_failures;
        self.orderable_pairs += o.orderable_pairs;
        self.paving_pairs += o.paving_pairs;
    }
}

impl<'a> Harness<'a> {
    pub fn new(scale: Scale) -> Harness<'static> {
        Harness {
            scale,
            caps: OracleCaps::default(),
            solve: &default_solve,
        }
    }

    pub fn with_solve(scale: Scale, solve: &'a SolveFn) -> Self {
        Harness {
            scale,
            caps: OracleCaps::default(),
            solve,
        }
    }

    pub fn caps(mut self, caps: OracleCaps) -> Self {
        self.caps = caps;
        self
    }

    /// All nine criteria, in order.
    pub fn run(&self) -> Vec<CriterionReport> {
        let corpus = corpus(self.scale);
        let sweep = self.pair_sweep(&corpus);
        let n_inst = corpus.len();
        let mut reports = Vec::with_capacity(9);
        let PairSweep {
            distance,
            monotone,
            bounds,
            certificates,
            blocked_runs,
            odd_pivot_runs,
            other_certificate_failures,
            orderable_pairs,
            paving_pairs,
        } = sweep;
        reports.push(distance.report(
            1,
            "solver distance equals breadth-first distance",
            n_inst >= self.scale.instance_count() as usize,
            format!("{n_inst} instances, every compatible pair"),
        ));
        reports.push(self.tightness_on_k4());
        reports.push(monotone.report(
            3,
            "longest monotone length equals brute force",
            true,
            format!("{n_inst} instances"),
        ));
        reports.push(self.gabow(&corpus));
        reports.push(self.white2(&corpus));
        reports.push(self.equitable(&corpus));
        reports.push(bounds.report(
            7,
            "monotone length meets the class bounds",
            orderable_pairs > 0 && paving_pairs > 0,
            format!("{orderable_pairs} pairs in base orderable instances, {paving_pairs} pairs in paving instances"),
        ));
        reports.push(self.representation_layer(&corpus));
        reports.push(certificates.report(
            9,
            "blocked-path certificates are well formed",
            blocked_runs > 0,
            format!(
                "{blocked_runs} blocked runs, {odd_pivot_runs} with a pivot in an odd number of blocking hyperedges, \
                 {other_certificate_failures} with any other violation"
            ),
        ));
        reports
    }

    fn pair_sweep(&self, corpus: &[CorpusInstance]) -> PairSweep {
        let parts: Vec<PairSweep> = corpus.par_iter().map(|inst| self.sweep_instance(inst)).collect();
        let mut total = PairSweep::default();
        for p in parts {
            total.merge(p);
        }
        total
    }

    fn sweep_instance(&self, inst: &CorpusInstance) -> PairSweep {
        let mut out = PairSweep::default();
        let rep = &inst.rep;
        let r = rep.rank();
        let fail = |id: usize, pair: BasisPairInstance, msg: String| FailureCase {
            criterion: id,
            message: msg,
            instance: inst.file(vec![pair]),
        };
        let solver = match Solver::new(rep) {
            Ok(s) => s,
            Err(e) => {
                let empty = || FailureCase {
                    criterion: 1,
                    message: format!("solver setup failed: {e}"),
                    instance: inst.file(Vec::new()),
                };
                out.distance.check(false, empty);
                return out;
            }
        };
        let orderable = is_base_orderable(rep);
        let paving = solver.representation().is_paving();
        for pair in all_compatible_pairs(rep, false) {
            let k = (pair.a1 & pair.b1).len();
            let lb = pair.lower_bound();
            let result = (self.solve)(&solver, &pair);
            let bf = bf_exchange_distance(rep, &pair, &self.caps);
            let distance_ok = match (&result, &bf) {
                (Ok(res), Ok(Distance::Finite(d))) => {
                    let replays = verify_sequence(rep, &pair, &res.sequence).unwrap_or(false);
                    res.distance == *d
                        && res.sequence.len() == res.distance
                        && replays
                        && res.distance <= r.min(lb + 1)
                }
                _ => false,
            };
            out.distance.check(distance_ok, || {
                fail(1, pair, format!("solver {:?} vs breadth-first {:?}", result.as_ref().map(|r| r.distance), bf))
            });

            let monotone = solver.longest_monotone(&pair);
            let bf_mono = bf_longest_monotone(rep, &pair, &self.caps);
            let monotone_ok = match (&monotone, &bf_mono) {
                (Ok(seq), Ok(len)) => {
                    let (xs, ys): (Vec<_>, Vec<_>) = seq.steps.iter().map(|s| (s.x, s.y)).unzip();
                    seq.len() == *len && MonotoneState::from_sequences(rep, pair, xs, ys).is_some()
                }
                _ => false,
            };
            out.monotone.check(monotone_ok, || {
                fail(3, pair, format!("solver {:?} vs brute force {:?}", monotone.as_ref().map(|s| s.len()), bf_mono))
            });

            if let Ok(seq) = &monotone {
                let len = seq.len();
                let mut bound_check = |class: MatroidClass| {
                    let bound = class.monotone_bound(r, k);
                    out.bounds.check(len >= bound, || {
                        fail(7, pair, format!("{class} bound {bound} but monotone length {len}"))
                    });
                };
                bound_check(MatroidClass::Split);
                if orderable {
                    out.orderable_pairs += 1;
                    bound_check(MatroidClass::BaseOrderableSplit);
                }
                if paving {
                    out.paving_pairs += 1;
                    bound_check(MatroidClass::Paving);
                }
            }

            if let Ok(res) = &result {
                if let Some(cert) = &res.certificate {
                    out.blocked_runs += 1;
                    if cert.pivot_memberships % 2 == 1 {
                        out.odd_pivot_runs += 1;
                    }
                    let (mut problems, parity) = certificate_problems(rep, &pair, res);
                    if !problems.is_empty() {
                        out.other_certificate_failures += 1;
                    }
                    problems.extend(parity);
                    out.certificates
                        .check(problems.is_empty(), || fail(9, pair, problems.join("; ")));
                }
            }
        }
        out
    }

    fn tightness_on_k4(&self) -> CriterionReport {
        let rep = k4();
        let inst = CorpusInstance {
            name: "k4".into(),
            config: None,
            rep: rep.clone(),
        };
        let mut tally = Tally::default();
        let mut above = 0;
        let solver = Solver::new(&rep).expect("K4 is valid");
        for pair in all_compatible_pairs(&rep, false) {
            let Ok(Distance::Finite(d)) = bf_exchange_distance(&rep, &pair, &self.caps) else {
                tally.check(false, || FailureCase {
                    criterion: 2,
                    message: "breadth-first search failed on a compatible pair".into(),
                    instance: inst.file(vec![pair]),
                });
                continue;
            };
            if d != pair.lower_bound() + 1 {
                continue;
            }
            above += 1;
            let res = (self.solve)(&solver, &pair);
            let ok = matches!(&res, Ok(r) if r.distance == d && r.certificate.is_some());
            tally.check(ok, || FailureCase {
                criterion: 2,
                message: format!("breadth-first distance {d}, solver {:?}", res.map(|r| r.distance)),
                instance: inst.file(vec![pair]),
            });
        }
        tally.report(
            2,
            "K4 attains lower bound + 1 and the solver matches",
            above > 0,
            format!("{above} pairs at lower bound + 1"),
        )
    }

    fn gabow(&self, corpus: &[CorpusInstance]) -> CriterionReport {
        let parts: Vec<Tally> = corpus
            .par_iter()
            .map(|inst| {
                let mut tally = Tally::default();
                let rep = &inst.rep;
                let Ok(solver) = Solver::new(rep) else {
                    tally.check(false, || FailureCase {
                        criterion: 4,
                        message: "solver setup failed".into(),
                        instance: inst.file(Vec::new()),
                    });
                    return tally;
                };
                let bases = all_bases(rep);
                for &a in &bases {
                    for &b in &bases {
                        let pair = BasisPairInstance::swap(a, b);
                        let res = (self.solve)(&solver, &pair);
                        let from_solver = res.as_ref().ok().map(|r| CyclicOrdering::from_exchanges(a, b, &r.sequence));
                        let solver_ok = matches!(&res, Ok(r) if r.distance == rep.rank() - (a & b).len())
                            && from_solver.as_ref().is_some_and(|o| o.is_valid(rep) && o.a.len() == rep.rank());
                        let searched = gabow_ordering(rep, a, b, &self.caps);
                        let search_ok = matches!(&searched, Ok(Some(o)) if o.is_valid(rep));
                        tally.check(solver_ok && search_ok, || FailureCase {
                            criterion: 4,
                            message: format!("solver ordering {from_solver:?}, search {searched:?}"),
                            instance: inst.file(vec![pair]),
                        });
                    }
                }
                tally
            })
            .collect();
        let mut tally = Tally::default();
        parts.into_iter().for_each(|t| tally.merge(t));
        tally.report(
            4,
            "swap sequences give cyclic orderings and search finds one",
            true,
            format!("{} instances, all ordered basis pairs", corpus.len()),
        )
    }

    fn white2(&self, corpus: &[CorpusInstance]) -> CriterionReport {
        let parts: Vec<Tally> = corpus
            .par_iter()
            .map(|inst| {
                let mut tally = Tally::default();
                let rep = &inst.rep;
                let bases = all_bases(rep);
                for &a1 in &bases {
                    for &a2 in &bases {
                        let reach = match bf_distances_from(rep, a1, a2, &self.caps) {
                            Ok(r) => r,
                            Err(e) => {
                                tally.check(false, || FailureCase {
                                    criterion: 5,
                                    message: format!("breadth-first search failed: {e}"),
                                    instance: inst.file(Vec::new()),
                                });
                                continue;
                            }
                        };
                        let (union, common) = (a1 | a2, a1 & a2);
                        for &b1 in &bases {
                            for &b2 in &bases {
                                let pair = BasisPairInstance::new(a1, a2, b1, b2);
                                let finite = reach.contains_key(&b1) && b2 == (union - b1) | common;
                                tally.check(finite == compatible(&pair), || FailureCase {
                                    criterion: 5,
                                    message: format!("finite distance {finite}, compatible {}", compatible(&pair)),
                                    instance: inst.file(vec![pair]),
                                });
                            }
                        }
                    }
                }
                if let (Some(&a), Some(&b)) = (bases.first(), bases.last()) {
                    let probe = BasisPairInstance::new(a, b, b, b);
                    let ok = white2_equivalent(rep, &probe, &self.caps).ok() == Some(compatible(&probe));
                    tally.check(ok, || FailureCase {
                        criterion: 5,
                        message: "white2_equivalent disagrees with compatibility".into(),
                        instance: inst.file(vec![probe]),
                    });
                }
                tally
            })
            .collect();
        let mut tally = Tally::default();
        parts.into_iter().for_each(|t| tally.merge(t));
        tally.report(
            5,
            "finite distance iff compatible",
            true,
            format!("{} instances, all quadruples of bases", corpus.len()),
        )
    }

    fn equitable(&self, corpus: &[CorpusInstance]) -> CriterionReport {
        let mut tally = Tally::default();
        let mut partitionable = 0;
        for inst in corpus {
            match equitable_check(&inst.rep, &self.caps) {
                Ok(Equitability::NotPartitionable) => {}
                other => {
                    partitionable += 1;
                    tally.check(other == Ok(Equitability::Equitable), || FailureCase {
                        criterion: 6,
                        message: format!("{other:?}"),
                        instance: inst.file(Vec::new()),
                    });
                }
            }
        }
        tally.report(
            6,
            "partitionable instances are equitable",
            partitionable > 0,
            format!("{partitionable} partitionable instances, exhaustive over subsets"),
        )
    }

    fn representation_layer(&self, corpus: &[CorpusInstance]) -> CriterionReport {
        let parts: Vec<Tally> = corpus
            .par_iter()
            .map(|inst| {
                let problems = representation_problems(&inst.rep);
                Tally {
                    checked: problems.checked,
                    failures: problems.failures,
                    first: problems.first.map(|message| FailureCase {
                        criterion: 8,
                        message,
                        instance: inst.file(Vec::new()),
                    }),
                }
            })
            .collect();
        let mut tally = Tally::default();
        parts.into_iter().for_each(|t| tally.merge(t));
        tally.report(
            8,
            "rank formula, tight sets and contraction agree with the oracle",
            true,
            format!("{} instances, exhaustive", corpus.len()),
        )
    }
}

struct Problems {
    checked: usize,
    failures: usize,
    first: Option<String>,
}

impl Problems {
    fn check(&mut self, ok: bool, msg: impl FnOnce() -> String) {
        self.checked += 1;
        if !ok {
            self.failures += 1;
            if self.first.is_none() {
                self.first = Some(msg());
            }
        }
    }
}

fn representation_problems(rep: &SplitRepresentation) -> Problems {
    let mut p = Problems {
        checked: 0,
        failures: 0,
        first: None,
    };
    let normalized = match rep.normalize() {
        Ok(n) => n,
        Err(e) => {
            p.check(false, || format!("normalization failed: {e}"));
            return p;
        }
    };
    let ground = rep.ground();
    let r = rep.rank();
    for z in ground.subsets() {
        let formula = rep.rank_of(z).ok();
        let greedy = oracle_rank(rep, z).ok();
        p.check(formula.is_some() && formula == greedy, || {
            format!("rank of {z}: formula {formula:?}, oracle {greedy:?}")
        });
    }
    for f in ground.subsets_of_size(r) {
        let tight: Vec<usize> = (0..normalized.constraints().len())
            .filter(|&i| normalized.is_tight(f, i))
            .collect();
        if !tight.is_empty() {
            p.check(is_basis(&normalized, f).unwrap_or(false), || {
                format!("{f} is tight at {tight:?} but not a basis")
            });
        }
        for (a, &i) in tight.iter().enumerate() {
            for &j in &tight[a + 1..] {
                let (hi, hj) = (normalized.hyperedge(i), normalized.hyperedge(j));
                p.check((hi & hj).is_subset(f) && f.is_subset(hi | hj), || {
                    format!("{f} is tight at {i} and {j} but not between their intersection and union")
                });
            }
        }
    }
    for t in ground.subsets() {
        if t.len() > 2 || !rep.is_independent(t) {
            continue;
        }
        let (Ok(minor), Ok(oracle)) = (rep.contract(t), contract_oracle(rep, t)) else {
            p.check(false, || format!("contracting {t} failed"));
            continue;
        };
        for x in (ground - t).subsets() {
            p.check(minor.is_independent(x) == oracle.is_independent(x), || {
                format!("after contracting {t}, {x} differs between representation and oracle")
            });
        }
    }
    p
}

/// Independent re-check of a blocked solve: structural problems, and separately a
/// pivot lying in an even number of the blocking hyperedges.
fn certificate_problems(
    rep: &SplitRepresentation,
    pair: &BasisPairInstance,
    res: &SolveResult,
) -> (Vec<String>, Option<String>) {
    let mut problems = Vec::new();
    let Some(cert) = &res.certificate else {
        return (problems, None);
    };
    let hs = cert.hyperedge_sets;
    let [a1p, a2p] = cert.start;
    let [b1, b2] = cert.target;
    let d = cert.gap;
    for i in 0..4 {
        for j in i + 1..4 {
            if hs[i] == hs[j] || cert.quadruple.hyperedges[i] == cert.quadruple.hyperedges[j] {
                problems.push(format!("blocking hyperedges {} and {} coincide", i + 1, j + 1));
            }
        }
    }
    let meets = |s: ElementSet, h: ElementSet| (s & h).len();
    for (name, set, idx) in [("A1'", a1p, [0, 2]), ("B1", b1, [0, 2]), ("A2'", a2p, [1, 3]), ("B2", b2, [1, 3])] {
        let [i, j] = idx;
        if meets(set, hs[i]) != cert.hyperedge_bounds[i] || meets(set, hs[j]) != cert.hyperedge_bounds[j] {
            problems.push(format!("{name} is not tight at hyperedges {} and {}", i + 1, j + 1));
        }
    }
    let class = |a: usize, b: usize| {
        let mut inside = ElementSet::full(rep.size());
        let mut outside = ElementSet::EMPTY;
        for (k, &h) in hs.iter().enumerate() {
            if k == a || k == b {
                inside = inside & h;
            } else {
                outside = outside | h;
            }
        }
        inside - outside
    };
    let common = pair.a1 & pair.a2;
    let leaving = (a1p & b2) - common;
    let entering = (a2p & b1) - common;
    if !leaving.is_subset(class(0, 1) | class(2, 3)) || !entering.is_subset(class(0, 3) | class(1, 2)) {
        problems.push("exchange classes do not cover the remaining elements".into());
    }
    let sizes = [
        (leaving & class(0, 1)).len(),
        (leaving & class(2, 3)).len(),
        (entering & class(0, 3)).len(),
        (entering & class(1, 2)).len(),
    ];
    if d == 0 || d % 2 == 1 {
        problems.push(format!("gap {d} is not positive and even"));
    }
    if sizes.iter().any(|&s| 2 * s != d) {
        problems.push(format!("class sizes {sizes:?} differ from d/2 = {}", d / 2));
    }
    let k = ((pair.a1 & pair.b1) - common).len();
    if d > 2 * k {
        problems.push(format!("gap {d} exceeds 2|A1 ∩ B1| = {}", 2 * k));
    }
    let pivot_count = hs.iter().filter(|h| h.contains(cert.pivot)).count();
    if !((a1p & b1) | (a2p & b2)).contains(cert.pivot) {
        problems.push(format!("pivot {} is not kept by either side", cert.pivot));
    }
    let parity = (pivot_count % 2 == 0)
        .then(|| format!("pivot {} lies in {pivot_count} blocking hyperedges", cert.pivot));
    if res.distance - res.monotone_length != d + 1 {
        problems.push(format!(
            "final schedule has {} steps, expected {}",
            res.distance - res.monotone_length,
            d + 1
        ));
    }
    (problems, parity)
}
