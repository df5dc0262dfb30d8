//! Blocked configurations: the four hyperedges that stop a maximal monotone sequence,
//! and the `d + 1` step schedule that finishes the transformation around them.

use serde::{Deserialize, Serialize};

use super::monotone::MonotoneState;
use super::SplitOracle;
use crate::error::{input, internal, Result};
use crate::matroid::{
    basis_unchecked, co_exchange_find, exchange_unchecked, verify_sequence, BasisPairInstance,
    ExchangeSequence, ExchangeStep,
};
use crate::set::{Element, ElementSet};
use crate::split::SplitRepresentation;

/// Hyperedge indices `H1..H4` witnessing that no single exchange extends the sequence,
/// together with the elements that exposed them.
///
/// `A1' - x + y` violates `H1`, `A2' + x' - y` violates `H2`, `A1' - x' + y'` violates
/// `H3` and `A2' + x - y'` violates `H4`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct BlockingQuadruple {
    pub hyperedges: [usize; 4],
    pub x: Element,
    pub y: Element,
    pub x_prime: Element,
    pub y_prime: Element,
}

/// Relabelling that carries a blocked configuration into a normal form.
///
/// Applied in the order side swap, time reversal, rotation. On hyperedge labels
/// `(H1, H2, H3, H4)` the side swap acts as `(H2, H3, H4, H1)`, the reversal as
/// `(H1, H4, H3, H2)` and the rotation as `(H3, H4, H1, H2)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
pub struct Symmetry {
    pub swap_sides: bool,
    pub reverse: bool,
    pub rotate: bool,
}

impl Symmetry {
    pub fn all() -> impl Iterator<Item = Symmetry> {
        (0..8u8).map(|bits| Symmetry {
            swap_sides: bits & 1 != 0,
            reverse: bits & 2 != 0,
            rotate: bits & 4 != 0,
        })
    }
}

/// Where the pivot sits relative to the normalized hyperedges.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum PivotCase {
    /// Only in `H1`.
    OnlyFirst,
    /// In `H1 ∩ H3` but not `H2`.
    FirstAndThird,
}

/// The exchange classes `E, F, G, H` of the normalized frame, each of size `d / 2`,
/// in the order the schedule consumes them.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ScheduleClasses {
    pub e: Vec<Element>,
    pub f: Vec<Element>,
    pub g: Vec<Element>,
    pub h: Vec<Element>,
}

/// Everything needed to replay the final `d + 1` exchanges of a blocked instance.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct BlockingCertificate {
    pub quadruple: BlockingQuadruple,
    pub hyperedge_sets: [ElementSet; 4],
    pub hyperedge_bounds: [usize; 4],
    /// `(A1', A2')`, the pair reached by the monotone prefix.
    pub start: [ElementSet; 2],
    /// `(B1, B2)`.
    pub target: [ElementSet; 2],
    /// `d = |A1' - B1|`.
    pub gap: usize,
    pub symmetry: Symmetry,
    pub frame_hyperedges: [usize; 4],
    pub pivot: Element,
    pub pivot_case: PivotCase,
    /// Number of `H1..H4` containing the pivot.
    pub pivot_memberships: usize,
    pub classes: ScheduleClasses,
}

fn first_violated(rep: &SplitRepresentation, set: ElementSet) -> Option<usize> {
    rep.constraints()
        .iter()
        .position(|c| (set & c.elements).len() > c.bound)
}

fn violated(rep: &SplitRepresentation, set: ElementSet, what: &str) -> Result<usize> {
    match first_violated(rep, set) {
        Some(i) => Ok(i),
        None => internal(format!("{what} = {set} is independent although no exchange was valid")),
    }
}

/// `(H_a ∩ H_b) - (H_c ∪ H_d)` for positions `a, b` of `h` and `c, d` the other two.
fn pair_class(rep: &SplitRepresentation, h: [usize; 4], a: usize, b: usize) -> ElementSet {
    let mut inside = rep.ground();
    let mut outside = ElementSet::EMPTY;
    for (pos, &idx) in h.iter().enumerate() {
        if pos == a || pos == b {
            inside = inside & rep.hyperedge(idx);
        } else {
            outside = outside | rep.hyperedge(idx);
        }
    }
    inside - outside
}

fn memberships(rep: &SplitRepresentation, h: [usize; 4], e: Element) -> [bool; 4] {
    h.map(|i| rep.hyperedge(i).contains(e))
}

/// Reads off the blocking hyperedges of a maximal, unfinished monotone state.
///
/// Fails with an input error if the state is complete or some exchange is still
/// available, and with an internal error if the hyperedges found do not have the
/// expected shape.
pub fn find_blocking_quadruple(oracle: &SplitOracle<'_>, state: &MonotoneState) -> Result<BlockingQuadruple> {
    let rep = oracle.representation();
    if state.is_complete() {
        return input("the monotone sequence already reaches the target pair");
    }
    let (a1, a2) = state.current();
    let p = state.instance();
    for x in state.x_candidates() {
        for y in state.y_candidates() {
            if exchange_unchecked(oracle, a1, a2, x, y) {
                return input(format!("the exchange ({x}, {y}) still extends the sequence"));
            }
        }
    }
    let Some(x) = state.x_candidates().min() else {
        return internal("no element left to exchange although the target is not reached");
    };
    let y = co_exchange_find(oracle, a2, p.b2, x)?;
    let h1 = violated(rep, a1.without(x).with(y), "A1' - x + y")?;
    let x_prime = co_exchange_find(oracle, a1, p.b1, y)?;
    let h2 = violated(rep, a2.with(x_prime).without(y), "A2' + x' - y")?;
    let y_prime = co_exchange_find(oracle, a2, p.b2, x_prime)?;
    let h3 = violated(rep, a1.without(x_prime).with(y_prime), "A1' - x' + y'")?;
    let h4 = violated(rep, a2.with(x).without(y_prime), "A2' + x - y'")?;
    let h = [h1, h2, h3, h4];
    let quad = BlockingQuadruple {
        hyperedges: h,
        x,
        y,
        x_prime,
        y_prime,
    };

    for i in 0..4 {
        for j in i + 1..4 {
            if h[i] == h[j] {
                return internal(format!("blocking hyperedges are not distinct: {h:?}"));
            }
        }
    }
    for (set, name, idx) in [(a1, "A1'", [h1, h3]), (a2, "A2'", [h2, h4])] {
        for i in idx {
            if !rep.is_tight(set, i) {
                return internal(format!("{name} = {set} is not tight at hyperedge {i}"));
            }
        }
    }
    for (e, name, a, b) in [(x, "x", 2, 3), (x_prime, "x'", 0, 1), (y, "y", 0, 3), (y_prime, "y'", 1, 2)] {
        if !pair_class(rep, h, a, b).contains(e) {
            return internal(format!(
                "{name} = {e} is not in H{}{} for blocking hyperedges {h:?}",
                a + 1,
                b + 1
            ));
        }
    }
    Ok(quad)
}

#[derive(Debug, Clone, Copy)]
struct Frame {
    p1: ElementSet,
    p2: ElementSet,
    q1: ElementSet,
    q2: ElementSet,
    h: [usize; 4],
}

impl Frame {
    fn transform(self, sym: Symmetry) -> Frame {
        let mut f = self;
        if sym.swap_sides {
            f = Frame {
                p1: f.p2,
                p2: f.p1,
                q1: f.q2,
                q2: f.q1,
                h: [f.h[1], f.h[2], f.h[3], f.h[0]],
            };
        }
        if sym.reverse {
            f = Frame {
                p1: f.q1,
                p2: f.q2,
                q1: f.p1,
                q2: f.p2,
                h: [f.h[0], f.h[3], f.h[2], f.h[1]],
            };
        }
        if sym.rotate {
            f.h = [f.h[2], f.h[3], f.h[0], f.h[1]];
        }
        f
    }

    fn classes(&self, rep: &SplitRepresentation) -> ScheduleClasses {
        let leaving = self.p1 & self.q2;
        let entering = self.p2 & self.q1;
        ScheduleClasses {
            e: (leaving & pair_class(rep, self.h, 0, 1)).to_vec(),
            f: (entering & pair_class(rep, self.h, 0, 3)).to_vec(),
            g: (leaving & pair_class(rep, self.h, 2, 3)).to_vec(),
            h: (entering & pair_class(rep, self.h, 1, 2)).to_vec(),
        }
    }
}

fn raw_frame(cert: &BlockingCertificate) -> Frame {
    Frame {
        p1: cert.start[0],
        p2: cert.start[1],
        q1: cert.target[0],
        q2: cert.target[1],
        h: cert.quadruple.hyperedges,
    }
}

fn pivot_case(rep: &SplitRepresentation, h: [usize; 4], z: Element) -> Option<PivotCase> {
    match memberships(rep, h, z) {
        [true, false, false, false] => Some(PivotCase::OnlyFirst),
        [true, false, true, _] => Some(PivotCase::FirstAndThird),
        _ => None,
    }
}

/// Checks the structure of a blocked configuration and searches for a pivot and a
/// relabelling whose schedule finishes the transformation in `d + 1` exchanges.
///
/// Pivots lying in an odd number of the four hyperedges are tried first.
pub fn build_certificate(
    oracle: &SplitOracle<'_>,
    state: &MonotoneState,
    quad: &BlockingQuadruple,
) -> Result<BlockingCertificate> {
    let rep = oracle.representation();
    let p = *state.instance();
    let (a1, a2) = state.current();
    let h = quad.hyperedges;
    for &i in &h {
        if i >= rep.constraints().len() {
            return input(format!("hyperedge index {i} out of range"));
        }
    }
    for i in 0..4 {
        for j in i + 1..4 {
            if h[i] == h[j] {
                return internal(format!("blocking hyperedges are not distinct: {h:?}"));
            }
        }
    }
    for (set, name, idx) in [
        (a1, "A1'", [h[0], h[2]]),
        (p.a1, "A1", [h[0], h[2]]),
        (p.b1, "B1", [h[0], h[2]]),
        (a2, "A2'", [h[1], h[3]]),
        (p.a2, "A2", [h[1], h[3]]),
        (p.b2, "B2", [h[1], h[3]]),
    ] {
        for i in idx {
            if !rep.is_tight(set, i) {
                return internal(format!("{name} = {set} is not tight at hyperedge {i}"));
            }
        }
    }
    let common = p.a1 & p.a2;
    let leaving = (a1 & p.b2) - common;
    let entering = (a2 & p.b1) - common;
    let h12 = pair_class(rep, h, 0, 1);
    let h34 = pair_class(rep, h, 2, 3);
    let h14 = pair_class(rep, h, 0, 3);
    let h23 = pair_class(rep, h, 1, 2);
    if !leaving.is_subset(h12 | h34) {
        return internal(format!("A1' ∩ B2 = {leaving} is not covered by H12 ∪ H34"));
    }
    if !entering.is_subset(h14 | h23) {
        return internal(format!("A2' ∩ B1 = {entering} is not covered by H14 ∪ H23"));
    }
    let d = (a1 - p.b1).len();
    if d == 0 || !d.is_multiple_of(2) {
        return internal(format!("remaining gap d = {d} is not a positive even number"));
    }
    let sizes = [
        (leaving & h12).len(),
        (leaving & h34).len(),
        (entering & h14).len(),
        (entering & h23).len(),
    ];
    if sizes.iter().any(|&s| s != d / 2) {
        return internal(format!("exchange classes have sizes {sizes:?}, expected {} each", d / 2));
    }
    if d > 2 * (p.a1 & p.b1).len() {
        return internal(format!(
            "gap d = {d} exceeds twice |A1 ∩ B1| = {}",
            (p.a1 & p.b1).len()
        ));
    }
    let h13 = rep.hyperedge(h[0]) ^ rep.hyperedge(h[2]);
    let h24 = rep.hyperedge(h[1]) ^ rep.hyperedge(h[3]);
    for (&x, &y) in state.xs().iter().zip(state.ys()) {
        for e in [x, y] {
            if !(h13 & h24).contains(e) {
                return internal(format!("prefix element {e} is outside (H1 △ H3) ∩ (H2 △ H4)"));
            }
        }
        if memberships(rep, h, x) != memberships(rep, h, y) {
            return internal(format!("prefix exchange ({x}, {y}) splits the blocking hyperedges"));
        }
    }

    let raw = Frame {
        p1: a1,
        p2: a2,
        q1: p.b1,
        q2: p.b2,
        h,
    };
    let pivots = (((a1 & p.b1) | (a2 & p.b2)) - common).to_vec();
    let mut candidates = Vec::new();
    for &z in &pivots {
        let count = memberships(rep, h, z).iter().filter(|&&b| b).count();
        for sym in Symmetry::all() {
            let frame = raw.transform(sym);
            if !(frame.p1 & frame.q1).contains(z) {
                continue;
            }
            if let Some(case) = pivot_case(rep, frame.h, z) {
                candidates.push((count % 2 == 0, z, sym, case, count, frame));
            }
        }
    }
    candidates.sort_by_key(|&(even, z, sym, case, _, _)| {
        (even, z, sym.swap_sides, sym.reverse, sym.rotate, case == PivotCase::FirstAndThird)
    });
    let mut last_failure = None;
    for (_, z, sym, case, count, frame) in candidates {
        let cert = BlockingCertificate {
            quadruple: *quad,
            hyperedge_sets: h.map(|i| rep.hyperedge(i)),
            hyperedge_bounds: h.map(|i| rep.bound(i)),
            start: [a1, a2],
            target: [p.b1, p.b2],
            gap: d,
            symmetry: sym,
            frame_hyperedges: frame.h,
            pivot: z,
            pivot_case: case,
            pivot_memberships: count,
            classes: frame.classes(rep),
        };
        match final_schedule(oracle, &cert) {
            Ok(_) => return Ok(cert),
            Err(e) => last_failure = Some(e),
        }
    }
    internal(match last_failure {
        Some(e) => format!("no pivot yields a valid schedule; last attempt: {e}"),
        None => format!("no pivot candidate in {:?} fits the blocking hyperedges {h:?}", pivots),
    })
}

/// Schedule in the normalized frame, as `(x, y)` pairs.
fn frame_steps(cert: &BlockingCertificate) -> Vec<(Element, Element)> {
    let c = &cert.classes;
    let k = c.e.len();
    let z = cert.pivot;
    let mut steps = vec![(z, c.f[0])];
    let (first, second) = match cert.pivot_case {
        PivotCase::OnlyFirst => (&c.g, &c.e),
        PivotCase::FirstAndThird => (&c.e, &c.g),
    };
    for j in 0..k {
        steps.push((first[j], c.h[j]));
        if j + 1 < k {
            steps.push((second[j], c.f[j + 1]));
        }
    }
    steps.push((second[k - 1], z));
    steps
}

/// Replays the certificate's schedule, checking every intermediate pair, and maps
/// it back to the original labelling. The result moves `start` to `target` in
/// `gap + 1` exchanges.
pub fn final_schedule(oracle: &SplitOracle<'_>, cert: &BlockingCertificate) -> Result<ExchangeSequence> {
    let rep = oracle.representation();
    let frame = raw_frame(cert).transform(cert.symmetry);
    if frame.h != cert.frame_hyperedges {
        return input(format!(
            "frame hyperedges {:?} do not match the relabelled quadruple {:?}",
            cert.frame_hyperedges, frame.h
        ));
    }
    let k = cert.gap / 2;
    let c = &cert.classes;
    if k == 0 || [&c.e, &c.f, &c.g, &c.h].iter().any(|v| v.len() != k) {
        return input(format!("exchange classes must all have size {k}"));
    }
    if !(frame.p1 & frame.q1).contains(cert.pivot) {
        return input(format!("pivot {} is not kept by the first basis", cert.pivot));
    }
    let (mut s1, mut s2) = (frame.p1, frame.p2);
    let [t1, t2, t3, t4] = frame.h;
    for (step_no, (x, y)) in frame_steps(cert).into_iter().enumerate() {
        let k = step_no + 1;
        if !(s1 - s2).contains(x) || !(s2 - s1).contains(y) {
            return internal(format!("step {k} ({x}, {y}) does not exchange across the pair"));
        }
        (s1, s2) = ExchangeStep::new(x, y).apply(s1, s2);
        if !basis_unchecked(oracle, s1) || !basis_unchecked(oracle, s2) {
            return internal(format!("step {k} ({x}, {y}) leaves the bases ({s1}, {s2})"));
        }
        if cfg!(debug_assertions) {
            let (i1, i2) = match cert.pivot_case {
                PivotCase::OnlyFirst => (t1, if k % 2 == 1 { t2 } else { t4 }),
                PivotCase::FirstAndThird => (if k % 2 == 1 { t1 } else { t3 }, t2),
            };
            if !rep.is_tight(s1, i1) || !rep.is_tight(s2, i2) {
                return internal(format!(
                    "after step {k} the pair ({s1}, {s2}) is not tight at hyperedges {i1}, {i2}"
                ));
            }
        }
    }
    if s1 != frame.q1 || s2 != frame.q2 {
        return internal(format!("schedule ends at ({s1}, {s2}) instead of the target"));
    }

    let mut steps: Vec<(Element, Element)> = frame_steps(cert);
    if cert.symmetry.reverse {
        steps.reverse();
        steps.iter_mut().for_each(|s| *s = (s.1, s.0));
    }
    if cert.symmetry.swap_sides {
        steps.iter_mut().for_each(|s| *s = (s.1, s.0));
    }
    let seq = ExchangeSequence::from_pairs(&steps);
    let pair = BasisPairInstance::new(cert.start[0], cert.start[1], cert.target[0], cert.target[1]);
    if !verify_sequence(oracle, &pair, &seq)? {
        return internal("mapped schedule does not replay on the original pair");
    }
    Ok(seq)
}
