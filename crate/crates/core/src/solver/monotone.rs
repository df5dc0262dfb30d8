//! Strictly monotone exchange sequences: greedy growth and the length-two extension step.

use serde::{Deserialize, Serialize};

use crate::error::{input, internal, Result};
use crate::matroid::{basis_unchecked, exchange_unchecked, BasisPairInstance, ExchangeSequence, ExchangeStep, Matroid};
use crate::set::{Element, ElementSet};

/// Sequences `x_1..x_s` and `y_1..y_s` such that exchanging `x_i` for `y_i` one after the
/// other keeps both sides bases, with every `x_i ∈ A1 ∩ B2` and `y_i ∈ A2 ∩ B1`.
///
/// `a1`/`a2` are the bases reached after all `s` exchanges.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MonotoneState {
    instance: BasisPairInstance,
    xs: Vec<Element>,
    ys: Vec<Element>,
    a1: ElementSet,
    a2: ElementSet,
}

impl MonotoneState {
    pub fn new(instance: BasisPairInstance) -> Self {
        MonotoneState {
            instance,
            xs: Vec::new(),
            ys: Vec::new(),
            a1: instance.a1,
            a2: instance.a2,
        }
    }

    /// Builds a state from explicit sequences, or `None` if they are not strictly monotone.
    pub fn from_sequences<M: Matroid + ?Sized>(
        m: &M,
        instance: BasisPairInstance,
        xs: Vec<Element>,
        ys: Vec<Element>,
    ) -> Option<Self> {
        if !satisfies_monotone_condition(m, &instance, &xs, &ys, 0) {
            return None;
        }
        let mut state = MonotoneState::new(instance);
        for (&x, &y) in xs.iter().zip(&ys) {
            state.push(x, y);
        }
        Some(state)
    }

    pub fn instance(&self) -> &BasisPairInstance {
        &self.instance
    }

    pub fn xs(&self) -> &[Element] {
        &self.xs
    }

    pub fn ys(&self) -> &[Element] {
        &self.ys
    }

    /// `(A1', A2')`.
    pub fn current(&self) -> (ElementSet, ElementSet) {
        (self.a1, self.a2)
    }

    pub fn len(&self) -> usize {
        self.xs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.xs.is_empty()
    }

    /// `A1' = B1`.
    pub fn is_complete(&self) -> bool {
        self.a1 == self.instance.b1
    }

    /// `|A1' - B1|`.
    pub fn remaining(&self) -> usize {
        (self.a1 - self.instance.b1).len()
    }

    /// Elements that may still leave the first basis: `A1' ∩ B2` minus the shared part.
    pub fn x_candidates(&self) -> ElementSet {
        (self.a1 & self.instance.b2) - self.common()
    }

    /// Elements that may still enter the first basis: `A2' ∩ B1` minus the shared part.
    pub fn y_candidates(&self) -> ElementSet {
        (self.a2 & self.instance.b1) - self.common()
    }

    fn common(&self) -> ElementSet {
        self.instance.a1 & self.instance.a2
    }

    fn push(&mut self, x: Element, y: Element) {
        self.xs.push(x);
        self.ys.push(y);
        (self.a1, self.a2) = ExchangeStep::new(x, y).apply(self.a1, self.a2);
    }

    pub fn steps(&self) -> ExchangeSequence {
        self.xs
            .iter()
            .zip(&self.ys)
            .map(|(&x, &y)| ExchangeStep::new(x, y))
            .collect()
    }
}

/// Checks the strictly monotone condition for `(xs, ys)` against `instance`, assuming the
/// prefixes shorter than `from + 1` are already known to be fine.
pub(crate) fn satisfies_monotone_condition<M: Matroid + ?Sized>(
    m: &M,
    instance: &BasisPairInstance,
    xs: &[Element],
    ys: &[Element],
    from: usize,
) -> bool {
    if xs.len() != ys.len() {
        return false;
    }
    let common = instance.a1 & instance.a2;
    let x_pool = (instance.a1 & instance.b2) - common;
    let y_pool = (instance.a2 & instance.b1) - common;
    let mut seen_x = ElementSet::EMPTY;
    let mut seen_y = ElementSet::EMPTY;
    let (mut first, mut second) = (instance.a1, instance.a2);
    for (i, (&x, &y)) in xs.iter().zip(ys).enumerate() {
        if !x_pool.contains(x) || !y_pool.contains(y) || seen_x.contains(x) || seen_y.contains(y) {
            return false;
        }
        seen_x.insert(x);
        seen_y.insert(y);
        (first, second) = ExchangeStep::new(x, y).apply(first, second);
        if i >= from && !(basis_unchecked(m, first) && basis_unchecked(m, second)) {
            return false;
        }
    }
    true
}

/// Appends the lexicographically smallest valid exchange `(x, y)` until none is left.
pub fn greedy_monotone<M: Matroid + ?Sized>(m: &M, mut state: MonotoneState) -> MonotoneState {
    'grow: loop {
        for x in state.x_candidates() {
            for y in state.y_candidates() {
                if exchange_unchecked(m, state.a1, state.a2, x, y) {
                    state.push(x, y);
                    continue 'grow;
                }
            }
        }
        return state;
    }
}

/// The eight rewrites that lengthen a maximal monotone sequence by two.
///
/// Each rewrite replaces the `i`-th exchange on one side and appends two exchanges,
/// using `x, x'` from `A1' ∩ B2` and `y, y'` from `A2' ∩ B1`. The names record which
/// membership pattern of `x_i` (cases 1, 2) or `y_i` (cases 3, 4) the rewrite targets.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum RewriteTemplate {
    /// `x_i ← x'`, append `(x, y), (x_i, y')`.
    XOutsideH1H3InH2,
    /// `x_i ← x`, append `(x', y'), (x_i, y)`.
    XOutsideH1H3InH4,
    /// `x_i ← x`, append `(x', y), (x_i, y')`.
    XInH2H4OutsideH1,
    /// `x_i ← x'`, append `(x, y'), (x_i, y)`.
    XInH2H4InH1,
    /// `y_i ← y`, append `(x', y'), (x, y_i)`.
    YInH1H3OutsideH2,
    /// `y_i ← y'`, append `(x, y), (x', y_i)`.
    YInH1H3InH2,
    /// `y_i ← y`, append `(x, y'), (x', y_i)`.
    YOutsideH2H4InH1,
    /// `y_i ← y'`, append `(x', y), (x, y_i)`.
    YOutsideH2H4OutsideH1,
}

impl RewriteTemplate {
    pub const ALL: [RewriteTemplate; 8] = [
        RewriteTemplate::XOutsideH1H3InH2,
        RewriteTemplate::XOutsideH1H3InH4,
        RewriteTemplate::XInH2H4OutsideH1,
        RewriteTemplate::XInH2H4InH1,
        RewriteTemplate::YInH1H3OutsideH2,
        RewriteTemplate::YInH1H3InH2,
        RewriteTemplate::YOutsideH2H4InH1,
        RewriteTemplate::YOutsideH2H4OutsideH1,
    ];

    /// Rewritten `(xs, ys)` for position `i` and the chosen `x, x', y, y'`.
    pub fn apply(
        self,
        xs: &[Element],
        ys: &[Element],
        i: usize,
        [x, xp, y, yp]: [Element; 4],
    ) -> (Vec<Element>, Vec<Element>) {
        use RewriteTemplate::*;
        let mut new_x = xs.to_vec();
        let mut new_y = ys.to_vec();
        let (xi, yi) = (xs[i], ys[i]);
        match self {
            XOutsideH1H3InH2 => {
                new_x[i] = xp;
                new_x.extend([x, xi]);
                new_y.extend([y, yp]);
            }
            XOutsideH1H3InH4 => {
                new_x[i] = x;
                new_x.extend([xp, xi]);
                new_y.extend([yp, y]);
            }
            XInH2H4OutsideH1 => {
                new_x[i] = x;
                new_x.extend([xp, xi]);
                new_y.extend([y, yp]);
            }
            XInH2H4InH1 => {
                new_x[i] = xp;
                new_x.extend([x, xi]);
                new_y.extend([yp, y]);
            }
            YInH1H3OutsideH2 => {
                new_x.extend([xp, x]);
                new_y[i] = y;
                new_y.extend([yp, yi]);
            }
            YInH1H3InH2 => {
                new_x.extend([x, xp]);
                new_y[i] = yp;
                new_y.extend([y, yi]);
            }
            YOutsideH2H4InH1 => {
                new_x.extend([x, xp]);
                new_y[i] = y;
                new_y.extend([yp, yi]);
            }
            YOutsideH2H4OutsideH1 => {
                new_x.extend([xp, x]);
                new_y[i] = yp;
                new_y.extend([y, yi]);
            }
        }
        (new_x, new_y)
    }
}

/// Outcome of [`extend_plus_two`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Extension {
    Extended {
        state: MonotoneState,
        position: usize,
        template: RewriteTemplate,
    },
    Blocked,
}

/// Tries every rewrite template at every position with every choice of
/// `x ≠ x'` in `A1' ∩ B2` and `y ≠ y'` in `A2' ∩ B1`, returning the first rewrite
/// whose sequences are again strictly monotone.
///
/// Scan order: position ascending, then `(x, x', y, y')` lexicographically, then
/// template order.
pub fn extend_plus_two<M: Matroid + ?Sized>(m: &M, state: &MonotoneState) -> Result<Extension> {
    if state.is_complete() {
        return input("the monotone sequence already reaches the target pair");
    }
    let xs_free = state.x_candidates().to_vec();
    let ys_free = state.y_candidates().to_vec();
    for i in 0..state.len() {
        for &x in &xs_free {
            for &xp in &xs_free {
                if xp == x {
                    continue;
                }
                for &y in &ys_free {
                    for &yp in &ys_free {
                        if yp == y {
                            continue;
                        }
                        for template in RewriteTemplate::ALL {
                            let (new_x, new_y) = template.apply(&state.xs, &state.ys, i, [x, xp, y, yp]);
                            if satisfies_monotone_condition(m, &state.instance, &new_x, &new_y, i) {
                                let extended = MonotoneState::from_sequences(m, state.instance, new_x, new_y);
                                let Some(extended) = extended else {
                                    return internal("accepted rewrite failed the full monotone check");
                                };
                                return Ok(Extension::Extended {
                                    state: extended,
                                    position: i,
                                    template,
                                });
                            }
                        }
                    }
                }
            }
        }
    }
    Ok(Extension::Blocked)
}

/// Alternates greedy growth and two-step extension until neither applies.
pub fn monotone_fixpoint<M: Matroid + ?Sized>(m: &M, instance: BasisPairInstance) -> Result<MonotoneState> {
    let r = instance.a1.len();
    let mut state = MonotoneState::new(instance);
    for _ in 0..=r {
        state = greedy_monotone(m, state);
        if state.is_complete() {
            return Ok(state);
        }
        match extend_plus_two(m, &state)? {
            Extension::Extended { state: longer, .. } => state = longer,
            Extension::Blocked => return Ok(state),
        }
    }
    internal(format!("monotone extension did not settle within {} rounds", r + 1))
}
