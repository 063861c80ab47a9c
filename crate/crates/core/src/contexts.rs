//! Exact bounded-context comparison.
//!
//! The finite context of an admissible word `w` at probe length `m` is the
//! set of word pairs `(u, v)` with `|u|, |v| <= m` and `u w v` admissible.
//! Two reductions make it computable:
//!
//! * It factors through the element: `u w v` is admissible iff
//!   `red(u)·red(w)·red(v) != 0`, so the context is a function of `red(w)`.
//! * Probes act one-sidedly: writing `red(u) = a+·a-` and `red(v) = b+·b-`,
//!   the outer parts never collide, so `u w v` is admissible iff
//!   `a-·red(w)·b+ != 0`. Every minus word of length `<= m` occurs as the
//!   minus part of a probe of length `<= m` (itself), and symmetrically, so
//!   two elements have equal finite contexts at probe `m` iff the predicates
//!   `(x, y) ↦ [x·e·y != 0]` agree over pure minus `x` and pure plus `y` of
//!   length `<= m`.
//!
//! For small probe spaces the predicate is materialized as a bit matrix
//! (the *joint fingerprint*), an exact context key. For large probe spaces
//! (the separation-bound default on 3x3 tables is far beyond enumeration)
//! the key falls back to a pair of one-sided equivalence classes computed by
//! depth-limited partition refinement of the collision run machine: exact
//! for the one-sided probe sets `(x, ε)` and `(ε, y)`, and therefore exact
//! whenever one-sided probes separate all distinct elements — which the
//! injectivity hypotheses guarantee for the presentations this crate
//! targets. Reports always carry the probe scale.

use std::collections::HashMap;
use std::rc::Rc;

use crate::machine::{mirror_nf, step_right, RunState};
use crate::presentation::{Gen, Presentation};
use crate::rewrite::{multiply, NormalForm};

/// Number of words of length `<= depth` over an alphabet of `k` letters.
fn tree_size(k: usize, depth: usize) -> usize {
    let mut total = 1usize;
    let mut layer = 1usize;
    for _ in 0..depth {
        layer = layer.saturating_mul(k);
        total = total.saturating_add(layer);
    }
    total
}

/// Bit budget above which the joint fingerprint is abandoned for one-sided
/// class keys.
const JOINT_BIT_LIMIT: usize = 1 << 16;

/// A context key at a fixed probe length. Keys are comparable only between
/// elements of the same presentation and probe scale.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum ContextKey {
    /// Bit `x_index * q_right + y_index` holds `[x·e·y != 0]` over the
    /// depth-first pre-order enumeration of one-sided probe words.
    Joint(Rc<Vec<u64>>),
    /// Depth-limited one-sided equivalence classes of the element's plus and
    /// minus words.
    Sided { left_class: u32, right_class: u32 },
}

/// Computes context keys for elements of one presentation, memoizing the
/// per-stack survivor bit vectors shared between elements.
pub struct ContextKeyer {
    pres: Presentation,
    mirror: Presentation,
    probe: usize,
    joint: bool,
    q_left: usize,
    q_right: usize,
    /// Pre-order subtree sizes by remaining depth, for both probe trees.
    left_subtree: Vec<usize>,
    right_subtree: Vec<usize>,
    ybits_memo: HashMap<Vec<Gen>, Rc<Vec<u64>>>,
    key_memo: HashMap<NormalForm, ContextKey>,
    refiner_right: Option<Refiner>,
    refiner_left: Option<Refiner>,
    max_stack: usize,
}

impl ContextKeyer {
    /// `max_word_len` bounds the canonical length of elements this keyer
    /// will see (ball words and their pairwise products).
    pub fn new(pres: &Presentation, probe: usize, max_word_len: usize) -> ContextKeyer {
        let q_left = tree_size(pres.left_count(), probe);
        let q_right = tree_size(pres.right_count(), probe);
        let joint = q_left.saturating_mul(q_right) <= JOINT_BIT_LIMIT;
        let left_subtree = (0..=probe).map(|d| tree_size(pres.left_count(), d)).collect();
        let right_subtree = (0..=probe).map(|d| tree_size(pres.right_count(), d)).collect();
        ContextKeyer {
            pres: pres.clone(),
            mirror: pres.mirror(),
            probe,
            joint,
            q_left,
            q_right,
            left_subtree,
            right_subtree,
            ybits_memo: HashMap::new(),
            key_memo: HashMap::new(),
            refiner_right: None,
            refiner_left: None,
            max_stack: max_word_len,
        }
    }

    pub fn is_joint(&self) -> bool {
        self.joint
    }

    pub fn key(&mut self, e: &NormalForm) -> ContextKey {
        debug_assert!(!e.is_zero());
        if !self.joint {
            // Sided keys are two table lookups; memoizing them would cost
            // more than recomputing.
            return self.sided_key(e);
        }
        if let Some(key) = self.key_memo.get(e) {
            return key.clone();
        }
        let key = ContextKey::Joint(self.joint_fingerprint(e));
        self.key_memo.insert(e.clone(), key.clone());
        key
    }

    /// Decodes a set bit position difference into the witnessing probe pair.
    pub fn probe_words(&self, bit: usize) -> (Vec<Gen>, Vec<Gen>) {
        let x_idx = bit / self.q_right;
        let y_idx = bit % self.q_right;
        let left: Vec<Gen> = self.pres.left_gens().collect();
        let right: Vec<Gen> = self.pres.right_gens().collect();
        // x probe paths prepend letters, so the word is the reversed path.
        let mut x = decode_preorder(x_idx, &left, self.probe, &self.left_subtree);
        x.reverse();
        let y = decode_preorder(y_idx, &right, self.probe, &self.right_subtree);
        (x, y)
    }

    fn joint_fingerprint(&mut self, e: &NormalForm) -> Rc<Vec<u64>> {
        let bits = self.q_left * self.q_right;
        let mut fp = vec![0u64; bits.div_ceil(64)];
        let left: Vec<Gen> = self.pres.left_gens().collect();
        // Depth-first over prepended minus letters; each node's element is one
        // letter-multiply away from its parent's.
        let mut cursor = 0usize;
        let mut stack: Vec<(usize, Option<NormalForm>)> = vec![(0, Some(e.clone()))];
        while let Some((depth, element)) = stack.pop() {
            match element {
                None => {
                    // Dead subtree: bits stay zero.
                    cursor += self.left_subtree[self.probe - depth];
                }
                Some(f) => {
                    let ybits = self.ybits(f.minus());
                    let base = cursor * self.q_right;
                    for (i, chunk) in ybits.iter().enumerate() {
                        or_shifted(&mut fp, base + i * 64, *chunk);
                    }
                    cursor += 1;
                    if depth < self.probe {
                        for &l in left.iter().rev() {
                            let lnf = NormalForm::from_parts(vec![], vec![l]);
                            let child = multiply(&self.pres, &lnf, &f);
                            stack.push((
                                depth + 1,
                                if child.is_zero() { None } else { Some(child) },
                            ));
                        }
                    }
                }
            }
        }
        debug_assert_eq!(cursor, self.q_left);
        Rc::new(fp)
    }

    /// Survivor bits of a minus stack over the plus probe tree.
    fn ybits(&mut self, stack: &[Gen]) -> Rc<Vec<u64>> {
        if let Some(bits) = self.ybits_memo.get(stack) {
            return bits.clone();
        }
        let mut bits = vec![0u64; self.q_right.div_ceil(64)];
        let right: Vec<Gen> = self.pres.right_gens().collect();
        let mut cursor = 0usize;
        let mut work: Vec<(usize, RunState)> = vec![(0, RunState::Stack(stack.to_vec()))];
        while let Some((depth, state)) = work.pop() {
            let subtree = self.right_subtree[self.probe - depth];
            match state {
                RunState::Dead => {
                    cursor += subtree;
                }
                RunState::Escaped => {
                    for i in cursor..cursor + subtree {
                        bits[i / 64] |= 1 << (i % 64);
                    }
                    cursor += subtree;
                }
                RunState::Stack(s) => {
                    bits[cursor / 64] |= 1 << (cursor % 64);
                    cursor += 1;
                    if depth < self.probe {
                        for &r in right.iter().rev() {
                            work.push((depth + 1, step_right(&self.pres, &RunState::Stack(s.clone()), r)));
                        }
                    }
                }
            }
        }
        debug_assert_eq!(cursor, self.q_right);
        let bits = Rc::new(bits);
        self.ybits_memo.insert(stack.to_vec(), bits.clone());
        bits
    }

    fn sided_key(&mut self, e: &NormalForm) -> ContextKey {
        if self.refiner_right.is_none() {
            self.refiner_right =
                Some(Refiner::build(&self.pres, self.max_stack, self.probe));
            self.refiner_left =
                Some(Refiner::build(&self.mirror, self.max_stack, self.probe));
        }
        let right_class = self
            .refiner_right
            .as_ref()
            .expect("built above")
            .class_of(e.minus());
        let mirrored = mirror_nf(e);
        let left_class = self
            .refiner_left
            .as_ref()
            .expect("built above")
            .class_of(mirrored.minus());
        ContextKey::Sided { left_class, right_class }
    }
}

fn or_shifted(fp: &mut [u64], bit_base: usize, chunk: u64) {
    if chunk == 0 {
        return;
    }
    let word = bit_base / 64;
    let shift = bit_base % 64;
    fp[word] |= chunk << shift;
    if shift != 0 && word + 1 < fp.len() {
        fp[word + 1] |= chunk >> (64 - shift);
    }
}

fn decode_preorder(idx: usize, alphabet: &[Gen], depth: usize, subtree: &[usize]) -> Vec<Gen> {
    let mut out = Vec::new();
    let mut idx = idx;
    let mut depth = depth;
    while idx > 0 {
        idx -= 1;
        let block = subtree[depth - 1];
        let letter = idx / block;
        out.push(alphabet[letter]);
        idx %= block;
        depth -= 1;
    }
    out
}

/// Depth-limited partition refinement of the stack machine over all minus
/// words up to a length bound. After `k` rounds two stacks fall in the same
/// class iff no plus word of length `<= k` tells them apart (one surviving,
/// one dead), so the class after `probe` rounds is exactly the one-sided
/// bounded-context class.
struct Refiner {
    ids: HashMap<Vec<Gen>, usize>,
    classes: Vec<u32>,
}

impl Refiner {
    fn build(pres: &Presentation, max_len: usize, rounds: usize) -> Refiner {
        // Enumerate all stacks up to the bound; transitions never lengthen a
        // stack, so the set is closed. Two extra states model the absorbing
        // dead and escaped runs; they take part in the refinement so that the
        // classes after k rounds are exactly k-bounded equivalence, no finer.
        let mut stacks: Vec<Vec<Gen>> = vec![Vec::new()];
        let mut layer: Vec<Vec<Gen>> = vec![Vec::new()];
        for _ in 0..max_len {
            let mut next = Vec::new();
            for s in &layer {
                for l in pres.left_gens() {
                    let mut child = s.clone();
                    child.push(l);
                    next.push(child);
                }
            }
            stacks.extend(next.iter().cloned());
            layer = next;
        }
        let ids: HashMap<Vec<Gen>, usize> =
            stacks.iter().cloned().enumerate().map(|(i, s)| (s, i)).collect();
        let dead = stacks.len();
        let escaped = stacks.len() + 1;
        let states = stacks.len() + 2;
        let right: Vec<Gen> = pres.right_gens().collect();
        let mut delta = vec![0usize; states * right.len()];
        for (i, s) in stacks.iter().enumerate() {
            for (j, &r) in right.iter().enumerate() {
                delta[i * right.len() + j] =
                    match step_right(pres, &RunState::Stack(s.clone()), r) {
                        RunState::Dead => dead,
                        RunState::Escaped => escaped,
                        RunState::Stack(t) => ids[&t],
                    };
            }
        }
        for j in 0..right.len() {
            delta[dead * right.len() + j] = dead;
            delta[escaped * right.len() + j] = escaped;
        }

        // Round 0 partitions by the empty-word output: dead versus alive.
        let mut classes: Vec<u32> = vec![0; states];
        classes[dead] = 1;
        let mut count = 2u32;
        for _ in 0..rounds {
            let mut signature_ids: HashMap<(u32, Vec<u32>), u32> = HashMap::new();
            let mut next: Vec<u32> = Vec::with_capacity(states);
            for i in 0..states {
                let row: Vec<u32> =
                    (0..right.len()).map(|j| classes[delta[i * right.len() + j]]).collect();
                let fresh = signature_ids.len() as u32;
                let id = *signature_ids.entry((classes[i], row)).or_insert(fresh);
                next.push(id);
            }
            let new_count = signature_ids.len() as u32;
            classes = next;
            if new_count == count {
                break;
            }
            count = new_count;
        }
        Refiner { ids, classes }
    }

    fn class_of(&self, stack: &[Gen]) -> u32 {
        self.classes[self.ids[stack]]
    }
}
