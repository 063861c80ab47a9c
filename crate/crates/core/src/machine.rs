//! Finite-state runs of elements under one-sided multiplication.
//!
//! Right multiplication by a plus word only ever touches the minus word of
//! an element: for `e = p·m` (plus part `p`, minus part `m`) and a plus word
//! `y`, `e·y = p·(m·y)`, and `p` never collides with anything, so
//! `e·y = 0 ⟺ m·y = 0` and `e·y` regains the unit’s minus part exactly when
//! `m·y` does. The run of an element under plus letters is therefore a
//! deterministic machine whose states are minus stacks, plus two absorbing
//! states: `Dead` (the product hit zero) and `Escaped` (a right letter
//! landed on the plus word, after which no further right letter can produce
//! zero or empty the stack again).
//!
//! Feeding a letter pops or replaces the top of the stack, so every state
//! reachable from stack `m` is a prefix of `m` with at most one replaced
//! top letter — the state space is finite and small, which makes each
//! one-sided decision in this crate exact reachability, not a bounded
//! heuristic.
//!
//! Left multiplication is the time-symmetric mirror: run the mirrored
//! element on the mirrored presentation and reverse the witness.

use std::collections::{HashSet, VecDeque};

use crate::presentation::{Gen, Outcome, Presentation, Side};
use crate::rewrite::NormalForm;

/// State of an element's run under right multiplication by plus letters.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum RunState {
    Dead,
    Escaped,
    Stack(Vec<Gen>),
}

impl RunState {
    /// The run of a normal form; only its minus word matters.
    pub fn of(nf: &NormalForm) -> RunState {
        match nf {
            NormalForm::Zero => RunState::Dead,
            NormalForm::Pair { minus, .. } => RunState::Stack(minus.clone()),
        }
    }

    pub fn alive(&self) -> bool {
        !matches!(self, RunState::Dead)
    }
}

/// Feeds one right letter, cascading right-valued outcomes down the stack.
pub fn step_right(pres: &Presentation, state: &RunState, r: Gen) -> RunState {
    debug_assert_eq!(r.side, Side::Right);
    let stack = match state {
        RunState::Dead => return RunState::Dead,
        RunState::Escaped => return RunState::Escaped,
        RunState::Stack(stack) => stack,
    };
    let mut stack = stack.clone();
    let mut incoming = r;
    loop {
        let top = match stack.last() {
            None => return RunState::Escaped,
            Some(&top) => top,
        };
        match pres.outcome(top, incoming) {
            Outcome::Zero => return RunState::Dead,
            Outcome::One => {
                stack.pop();
                return RunState::Stack(stack);
            }
            Outcome::Gen(g) if g.side == Side::Left => {
                stack.pop();
                stack.push(g);
                return RunState::Stack(stack);
            }
            Outcome::Gen(g) => {
                stack.pop();
                incoming = g;
            }
        }
    }
}

/// Flips a letter to the mirror presentation (same index, opposite side).
pub fn mirror_letter(g: Gen) -> Gen {
    Gen { side: g.side.flipped(), index: g.index }
}

/// Mirrors a word: reversal with flipped sides. `mirror(uv) = mirror(v) mirror(u)`.
pub fn mirror_letters(letters: &[Gen]) -> Vec<Gen> {
    letters.iter().rev().copied().map(mirror_letter).collect()
}

/// Mirrors a normal form into the mirror presentation.
pub fn mirror_nf(nf: &NormalForm) -> NormalForm {
    match nf {
        NormalForm::Zero => NormalForm::Zero,
        NormalForm::Pair { plus, minus } => NormalForm::Pair {
            plus: mirror_letters(minus),
            minus: mirror_letters(plus),
        },
    }
}

/// Breadth-first search for a shortest plus word driving `start` into
/// `target`. Letters are tried in declaration order, so the witness is the
/// lexicographically least among the shortest. `cap` bounds the word length.
pub fn shortest_right_word_to(
    pres: &Presentation,
    start: RunState,
    target: impl Fn(&RunState) -> bool,
    cap: Option<usize>,
) -> Option<Vec<Gen>> {
    if target(&start) {
        return Some(Vec::new());
    }
    let mut seen: HashSet<RunState> = HashSet::new();
    seen.insert(start.clone());
    let mut queue: VecDeque<(RunState, Vec<Gen>)> = VecDeque::new();
    queue.push_back((start, Vec::new()));
    while let Some((state, word)) = queue.pop_front() {
        if cap.is_some_and(|c| word.len() >= c) {
            continue;
        }
        for r in pres.right_gens() {
            let next = step_right(pres, &state, r);
            let mut next_word = word.clone();
            next_word.push(r);
            if target(&next) {
                return Some(next_word);
            }
            if seen.insert(next.clone()) {
                queue.push_back((next, next_word));
            }
        }
    }
    None
}

/// Product-run BFS over a pair of states; used for separation and for
/// bounded follower-set membership.
pub fn shortest_right_word_to_pair(
    pres: &Presentation,
    start: (RunState, RunState),
    target: impl Fn(&RunState, &RunState) -> bool,
    cap: Option<usize>,
) -> Option<Vec<Gen>> {
    if target(&start.0, &start.1) {
        return Some(Vec::new());
    }
    let mut seen: HashSet<(RunState, RunState)> = HashSet::new();
    seen.insert(start.clone());
    let mut queue: VecDeque<((RunState, RunState), Vec<Gen>)> = VecDeque::new();
    queue.push_back((start, Vec::new()));
    while let Some(((a, b), word)) = queue.pop_front() {
        if cap.is_some_and(|c| word.len() >= c) {
            continue;
        }
        for r in pres.right_gens() {
            let na = step_right(pres, &a, r);
            let nb = step_right(pres, &b, r);
            let mut next_word = word.clone();
            next_word.push(r);
            if target(&na, &nb) {
                return Some(next_word);
            }
            if seen.insert((na.clone(), nb.clone())) {
                queue.push_back(((na, nb), next_word));
            }
        }
    }
    None
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::presentation::catalog;
    use crate::rewrite::{multiply, reduce, Word};

    #[test]
    fn run_tracks_right_multiplication() {
        let p = catalog("polycyclic2").unwrap();
        let e = reduce(&p, &Word::parse(&p, "ρ λ λ′").unwrap()).unwrap();
        let mut state = RunState::of(&e);
        let mut acc = e.clone();
        for text in ["ρ′", "ρ", "ρ"] {
            let r = p.lookup(text).unwrap();
            state = step_right(&p, &state, r);
            acc = multiply(&p, &acc, &reduce(&p, &Word(vec![r])).unwrap());
            match &state {
                RunState::Dead => assert!(acc.is_zero()),
                RunState::Escaped | RunState::Stack(_) => assert!(!acc.is_zero()),
            }
            if let RunState::Stack(stack) = &state {
                assert_eq!(stack.as_slice(), acc.minus());
            }
        }
        // ρλλ′ · ρ′ρρ = ρ·ρ: escaped, alive forever.
        assert_eq!(state, RunState::Escaped);
    }

    #[test]
    fn mirror_round_trip() {
        let p = catalog("example4").unwrap();
        let e = reduce(&p, &Word::parse(&p, "ρ ρ″ λ″").unwrap()).unwrap();
        assert_eq!(mirror_nf(&mirror_nf(&e)), e);
        let m = p.mirror();
        // Mirror of a product is the reversed product of mirrors.
        let f = reduce(&p, &Word::parse(&p, "λ ρ′").unwrap()).unwrap();
        let lhs = mirror_nf(&multiply(&p, &e, &f));
        let rhs = multiply(&m, &mirror_nf(&f), &mirror_nf(&e));
        assert_eq!(lhs, rhs);
    }
}
