//! The subshift generated by a presentation: its admissible words are the
//! words of generators whose monoid product is nonzero.
//!
//! The language is factorial (subwords of admissible words are admissible,
//! because zero absorbs) and extendable (appending a left letter or
//! prepending a right letter never collides). Follower and predecessor sets
//! are not computable exactly — the shift is generally not sofic — so the
//! `omega`/window operations here are bounded surrogates with an explicit
//! probe length, anti-monotone in the probe, converging from above.

use std::collections::HashMap;

use serde::Serialize;

use crate::contexts::{ContextKey, ContextKeyer};
use crate::error::Error;
use crate::machine::{mirror_nf, shortest_right_word_to_pair, RunState};
use crate::presentation::{Gen, Presentation};
use crate::rewrite::{
    multiply, multiply_letter, reduce, reduce_letters, unit_factorization, NormalForm, Word,
};
use crate::structure::{left_inverse, right_inverse};

/// Is the product of `w` nonzero? The empty word is admissible.
pub fn admissible(pres: &Presentation, w: &Word) -> Result<bool, Error> {
    Ok(!reduce(pres, w)?.is_zero())
}

fn require_admissible(pres: &Presentation, w: &Word) -> Result<NormalForm, Error> {
    let nf = reduce(pres, w)?;
    if nf.is_zero() {
        Err(Error::Inadmissible)
    } else {
        Ok(nf)
    }
}

/// Counts admissible words of exactly length `n` by dynamic programming over
/// reachable normal forms.
pub fn language_count(pres: &Presentation, n: usize) -> u128 {
    language_counts(pres, n)[n]
}

/// Counts for every length `0..=max_n` in one pass.
pub fn language_counts(pres: &Presentation, max_n: usize) -> Vec<u128> {
    let mut counts = Vec::with_capacity(max_n + 1);
    let mut layer: HashMap<NormalForm, u128> = HashMap::new();
    layer.insert(NormalForm::unit(), 1);
    counts.push(1);
    for _ in 0..max_n {
        let mut next: HashMap<NormalForm, u128> = HashMap::new();
        for (nf, count) in &layer {
            for g in pres.generators() {
                let child = multiply_letter(pres, nf, g);
                if !child.is_zero() {
                    *next.entry(child).or_insert(0) += count;
                }
            }
        }
        counts.push(next.values().sum());
        layer = next;
    }
    counts
}

/// Lazily enumerates the admissible words of exactly length `n` in
/// lexicographic order by generator declaration.
pub fn language_enumerate(pres: &Presentation, n: usize) -> LanguageWords<'_> {
    LanguageWords { pres, n, stack: vec![(Vec::new(), NormalForm::unit())] }
}

pub struct LanguageWords<'a> {
    pres: &'a Presentation,
    n: usize,
    stack: Vec<(Vec<Gen>, NormalForm)>,
}

impl Iterator for LanguageWords<'_> {
    type Item = Word;

    fn next(&mut self) -> Option<Word> {
        while let Some((prefix, nf)) = self.stack.pop() {
            if prefix.len() == self.n {
                return Some(Word(prefix));
            }
            let gens: Vec<Gen> = self.pres.generators().collect();
            for &g in gens.iter().rev() {
                let child = multiply_letter(self.pres, &nf, g);
                if !child.is_zero() {
                    let mut next = prefix.clone();
                    next.push(g);
                    self.stack.push((next, child));
                }
            }
        }
        None
    }
}

/// All admissible words of length `0..=max_len`, shortest first, each length
/// block in lexicographic order.
pub fn admissible_ball(pres: &Presentation, max_len: usize) -> Vec<Word> {
    (0..=max_len).flat_map(|n| language_enumerate(pres, n)).collect()
}

/// The reduce value of an admissible word. Words with equal signatures have
/// equal finite contexts at every probe length, since the context predicate
/// `[u w v admissible]` factors through the product of `w`.
pub fn context_signature(pres: &Presentation, w: &Word) -> Result<NormalForm, Error> {
    require_admissible(pres, w)
}

/// The finite context at probe length `m`: every pair `(u, v)` of words of
/// length at most `m` (over the full alphabet) with `u w v` admissible, in
/// lexicographic pre-order. The pair count grows as `|Γ|^{2m}`; callers own
/// the resource limits.
pub fn finite_context(
    pres: &Presentation,
    w: &Word,
    m: usize,
) -> Result<Vec<(Word, Word)>, Error> {
    let e = require_admissible(pres, w)?;
    let gens: Vec<Gen> = pres.generators().collect();
    let mut out = Vec::new();
    // Depth-first over u carrying red(u)·e, then over v carrying the full
    // product; zero prunes the whole subtree since it absorbs.
    let mut u_stack: Vec<(Vec<Gen>, NormalForm)> = vec![(Vec::new(), e.clone())];
    while let Some((u, ue)) = u_stack.pop() {
        let mut v_stack: Vec<(Vec<Gen>, NormalForm)> = vec![(Vec::new(), ue.clone())];
        while let Some((v, uev)) = v_stack.pop() {
            out.push((Word(u.clone()), Word(v.clone())));
            if v.len() < m {
                for &g in gens.iter().rev() {
                    let child = multiply_letter(pres, &uev, g);
                    if !child.is_zero() {
                        let mut next = v.clone();
                        next.push(g);
                        v_stack.push((next, child));
                    }
                }
            }
        }
        if u.len() < m {
            for &g in gens.iter().rev() {
                // Prepending to u: red((u g)…) viewed from the left; build
                // g·(u·e) products by multiplying on the left.
                let gnf = reduce_letters(pres, &[g]);
                let child = multiply(pres, &gnf, &ue);
                if !child.is_zero() {
                    let mut next = vec![g];
                    next.extend_from_slice(&u);
                    u_stack.push((next, child));
                }
            }
        }
    }
    out.sort();
    Ok(out)
}

/// Membership in the bounded follower surrogate: does every left probe of
/// length at most `m` that tolerates `a` also tolerate `a b`? Exact for any
/// `m` via product reachability on the mirrored runs; minus-word probes
/// suffice because a probe acts on the right product only through its minus
/// part.
fn omega_plus_admits(
    mirror: &Presentation,
    a: &NormalForm,
    ab: &NormalForm,
    m: usize,
) -> bool {
    let start = (RunState::of(&mirror_nf(a)), RunState::of(&mirror_nf(ab)));
    shortest_right_word_to_pair(mirror, start, |sa, sb| sa.alive() && !sb.alive(), Some(m))
        .is_none()
}

/// Mirror of [`omega_plus_admits`]: right probes against left extensions.
fn omega_minus_admits(pres: &Presentation, a: &NormalForm, ba: &NormalForm, m: usize) -> bool {
    let start = (RunState::of(a), RunState::of(ba));
    shortest_right_word_to_pair(pres, start, |sa, sb| sa.alive() && !sb.alive(), Some(m))
        .is_none()
}

fn words_of_length(pres: &Presentation, n: usize) -> Vec<Vec<Gen>> {
    let mut words: Vec<Vec<Gen>> = vec![Vec::new()];
    for _ in 0..n {
        let mut next = Vec::new();
        for w in &words {
            for g in pres.generators() {
                let mut child = w.clone();
                child.push(g);
                next.push(child);
            }
        }
        words = next;
    }
    words
}

/// The words `b` of length `ext_len` such that every probe `u` of length at
/// most `probe` with `u a` admissible keeps `u a b` admissible.
/// Anti-monotone in `probe`.
pub fn omega_plus(
    pres: &Presentation,
    a: &Word,
    ext_len: usize,
    probe: usize,
) -> Result<Vec<Word>, Error> {
    let e = require_admissible(pres, a)?;
    let mirror = pres.mirror();
    let mut out = Vec::new();
    for b in words_of_length(pres, ext_len) {
        let ab = b.iter().fold(e.clone(), |acc, &g| multiply_letter(pres, &acc, g));
        if omega_plus_admits(&mirror, &e, &ab, probe) {
            out.push(Word(b));
        }
    }
    Ok(out)
}

/// Time-symmetric mirror of [`omega_plus`]: left extensions `b` such that
/// every right probe tolerating `a` also tolerates `b a`.
pub fn omega_minus(
    pres: &Presentation,
    a: &Word,
    ext_len: usize,
    probe: usize,
) -> Result<Vec<Word>, Error> {
    let e = require_admissible(pres, a)?;
    let mut out = Vec::new();
    for b in words_of_length(pres, ext_len) {
        let b_nf = reduce_letters(pres, &b);
        let ba = multiply(pres, &b_nf, &e);
        if omega_minus_admits(pres, &e, &ba, probe) {
            out.push(Word(b));
        }
    }
    Ok(out)
}

/// Per-position window verdicts for a word.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct WindowReport {
    pub word: String,
    pub n: usize,
    pub probe: usize,
    pub positions_ok: Vec<bool>,
    pub ok: bool,
}

/// Checks each position of `w` against its bounded past and future windows
/// of size `n`, truncated at the word ends: position `i` passes when `w[i]`
/// extends every tolerated left probe of the preceding window and every
/// tolerated right probe of the following window, at probe length `probe`.
pub fn xn_window_check(
    pres: &Presentation,
    w: &Word,
    n: usize,
    probe: usize,
) -> Result<WindowReport, Error> {
    pres.check_letters(&w.0)?;
    if w.len() <= 2 * n {
        return Err(Error::WordTooShort { len: w.len(), n });
    }
    let mirror = pres.mirror();
    let len = w.len();
    let mut positions_ok = Vec::with_capacity(len);
    for i in 0..len {
        let past_start = i.saturating_sub(n);
        let past = &w.0[past_start..i];
        let past_nf = reduce_letters(pres, past);
        let past_ext = multiply_letter(pres, &past_nf, w.0[i]);
        let plus_ok = omega_plus_admits(&mirror, &past_nf, &past_ext, probe);

        let future_end = (i + 1 + n).min(len);
        let future = &w.0[i + 1..future_end];
        let future_nf = reduce_letters(pres, future);
        let letter_nf = reduce_letters(pres, &w.0[i..=i]);
        let future_ext = multiply(pres, &letter_nf, &future_nf);
        let minus_ok = omega_minus_admits(pres, &future_nf, &future_ext, probe);

        positions_ok.push(plus_ok && minus_ok);
    }
    let ok = positions_ok.iter().all(|&b| b);
    Ok(WindowReport { word: w.display(pres), n, probe, positions_ok, ok })
}

/// A nonempty word taken up to rotation, denoting an admissible periodic
/// orbit: the product of every finite power is nonzero.
#[derive(Clone, Debug)]
pub struct CyclicWord {
    letters: Vec<Gen>,
    pres_fingerprint: u64,
}

impl CyclicWord {
    /// Validates that all powers stay admissible. Checking the square
    /// suffices: the collision between consecutive periods only reads the
    /// letters the first such collision read, so once `w²` reduces to a
    /// nonzero form every further appended period replays the same collision
    /// and the powers stay nonzero.
    pub fn new(pres: &Presentation, word: Word) -> Result<CyclicWord, Error> {
        if word.is_empty() {
            return Err(Error::InvalidParams("cycle must be nonempty".to_owned()));
        }
        pres.check_letters(&word.0)?;
        let e = reduce_letters(pres, &word.0);
        if e.is_zero() || multiply(pres, &e, &e).is_zero() {
            return Err(Error::InadmissibleCycle);
        }
        Ok(CyclicWord { letters: word.0, pres_fingerprint: pres.fingerprint() })
    }

    pub fn letters(&self) -> &[Gen] {
        &self.letters
    }

    pub fn period(&self) -> usize {
        self.letters.len()
    }

    pub fn repeat(&self, k: usize) -> Word {
        let mut letters = Vec::with_capacity(self.letters.len() * k);
        for _ in 0..k {
            letters.extend_from_slice(&self.letters);
        }
        Word(letters)
    }

    pub fn display(&self, pres: &Presentation) -> String {
        pres.format_letters(&self.letters)
    }

    fn canonical_rotation(&self) -> Vec<Gen> {
        let n = self.letters.len();
        (0..n)
            .map(|s| {
                let mut rot = self.letters[s..].to_vec();
                rot.extend_from_slice(&self.letters[..s]);
                rot
            })
            .min()
            .expect("nonempty cycle")
    }
}

impl PartialEq for CyclicWord {
    fn eq(&self, other: &CyclicWord) -> bool {
        self.pres_fingerprint == other.pres_fingerprint
            && self.canonical_rotation() == other.canonical_rotation()
    }
}

impl Eq for CyclicWord {}

/// The periodic point spelled by a shortest unit factorization; all its
/// powers reduce to the unit, so every window is admissible.
pub fn periodic_point_from_unit(pres: &Presentation) -> Result<CyclicWord, Error> {
    CyclicWord::new(pres, unit_factorization(pres)?)
}

/// An eventually periodic bi-infinite point: `left_cycle` repeated leftward,
/// then `core`, then `right_cycle` repeated rightward. The core occupies
/// positions `0..core.len()`, with a full left cycle ending at position -1.
#[derive(Clone, Debug, PartialEq)]
pub struct YPointDescription {
    left_cycle: CyclicWord,
    core: Word,
    right_cycle: CyclicWord,
    pres_fingerprint: u64,
}

impl YPointDescription {
    pub fn left_cycle(&self) -> &CyclicWord {
        &self.left_cycle
    }

    pub fn core(&self) -> &Word {
        &self.core
    }

    pub fn right_cycle(&self) -> &CyclicWord {
        &self.right_cycle
    }

    pub fn letter_at(&self, pos: isize) -> Gen {
        let core_len = self.core.len() as isize;
        if pos < 0 {
            let len = self.left_cycle.period() as isize;
            let idx = ((pos % len) + len) % len;
            self.left_cycle.letters[idx as usize]
        } else if pos < core_len {
            self.core.0[pos as usize]
        } else {
            let len = self.right_cycle.period() as isize;
            let idx = (pos - core_len) % len;
            self.right_cycle.letters[idx as usize]
        }
    }

    pub fn window(&self, start: isize, width: usize) -> Word {
        Word((0..width as isize).map(|k| self.letter_at(start + k)).collect())
    }

    /// Canonical descriptions carry the unit factorization cycle on both
    /// tails, aligned so the core starts right after a full cycle.
    pub fn is_canonical(&self, pres: &Presentation) -> bool {
        match unit_factorization(pres) {
            Ok(unit) => {
                self.pres_fingerprint == pres.fingerprint()
                    && self.left_cycle.letters == unit.0
                    && self.right_cycle.letters == unit.0
            }
            Err(_) => false,
        }
    }

    pub fn display(&self, pres: &Presentation) -> String {
        format!(
            "({})^∞ · {} · ({})^∞",
            self.left_cycle.display(pres),
            if self.core.is_empty() { "ε".to_owned() } else { self.core.display(pres) },
            self.right_cycle.display(pres)
        )
    }
}

/// Checks every window of width up to `max_width` that meets the core or
/// either adjacent period. Returns the first inadmissible window found.
pub fn windows_admissible(
    pres: &Presentation,
    desc: &YPointDescription,
    max_width: usize,
) -> Result<(), (isize, Word)> {
    let core_len = desc.core.len() as isize;
    let llen = desc.left_cycle.period() as isize;
    let rlen = desc.right_cycle.period() as isize;
    for width in 1..=max_width {
        let lo = -(width as isize) - llen;
        let hi = core_len + rlen;
        for start in lo..=hi {
            let w = desc.window(start, width);
            if reduce_letters(pres, &w.0).is_zero() {
                return Err((start, w));
            }
        }
    }
    Ok(())
}

/// Embeds an admissible word into an eventually periodic point with unit
/// cycles on both tails. Every window reduces to a subproduct of
/// `1^j · red(w) · 1^k`, with at worst a plus-word prefix and a minus-word
/// suffix from partial cycles, so it stays admissible.
pub fn embed_in_y(pres: &Presentation, w: &Word) -> Result<YPointDescription, Error> {
    require_admissible(pres, w)?;
    let unit = periodic_point_from_unit(pres)?;
    Ok(YPointDescription {
        left_cycle: unit.clone(),
        core: w.clone(),
        right_cycle: unit,
        pres_fingerprint: pres.fingerprint(),
    })
}

/// A word `w` making `u w v` admissible: the right-inverse witness of the
/// minus part of `u` followed by the left-inverse witness of the plus part
/// of `v`, so that the product collapses to `red(u).plus · red(v).minus`.
pub fn join_words(pres: &Presentation, u: &Word, v: &Word) -> Result<Word, Error> {
    let ru = require_admissible(pres, u)?;
    let rv = require_admissible(pres, v)?;
    let minus_part = NormalForm::from_parts(vec![], ru.minus().to_vec());
    let right_witness = right_inverse(pres, &minus_part)?
        .witness_word
        .ok_or_else(|| Error::JoinFailure("minus part of u has no right inverse".to_owned()))?;
    let plus_part = NormalForm::from_parts(rv.plus().to_vec(), vec![]);
    let left_witness = left_inverse(pres, &plus_part)?
        .witness_word
        .ok_or_else(|| Error::JoinFailure("plus part of v has no left inverse".to_owned()))?;
    let joined = right_witness.concat(&left_witness);
    let expected = NormalForm::from_parts(ru.plus().to_vec(), rv.minus().to_vec());
    let product = reduce_letters(
        pres,
        &[u.letters(), joined.letters(), v.letters()].concat(),
    );
    if product != expected {
        return Err(Error::JoinFailure("postcondition failed".to_owned()));
    }
    Ok(joined)
}

/// Connects two periodic points through a finite core, realizing the
/// left-to-right reachability of their orbits. The cycles must hold up under
/// the bounded window check; the core spells the plus part of the first
/// period followed by the minus part of the second, and the result is
/// verified window by window.
pub fn connect_periodic(
    pres: &Presentation,
    p: &CyclicWord,
    q: &CyclicWord,
) -> Result<YPointDescription, Error> {
    if p.pres_fingerprint != pres.fingerprint() || q.pres_fingerprint != pres.fingerprint() {
        return Err(Error::PresentationMismatch);
    }
    let n = 2;
    let probe = 2 * pres.left_count() * pres.right_count();
    for cycle in [p, q] {
        // Only full-window positions count: the truncated edge windows of
        // the repeated word are artifacts of cutting a bi-infinite orbit.
        let reps = ((2 * n + 2) / cycle.period() + 1).max(5);
        let report = xn_window_check(pres, &cycle.repeat(reps), n, probe)?;
        let len = report.positions_ok.len();
        if !report.positions_ok[n..len - n].iter().all(|&b| b) {
            return Err(Error::JoinFailure(format!(
                "cycle {} fails the bounded window check",
                cycle.display(pres)
            )));
        }
    }
    let rp = reduce_letters(pres, &p.letters);
    let rq = reduce_letters(pres, &q.letters);
    for (cycle, nf) in [(p, &rp), (q, &rq)] {
        let reversed = [nf.minus(), nf.plus()].concat();
        if !reduce_letters(pres, &reversed).is_unit() {
            return Err(Error::JoinFailure(format!(
                "reversed period product of {} is not the unit",
                cycle.display(pres)
            )));
        }
    }
    let core = Word([rp.plus(), rq.minus()].concat());
    let desc = YPointDescription {
        left_cycle: p.clone(),
        core,
        right_cycle: q.clone(),
        pres_fingerprint: pres.fingerprint(),
    };
    let width = 12.max(desc.core.len() + 2 * p.period().max(q.period()) + 2);
    if let Err((start, w)) = windows_admissible(pres, &desc, width) {
        return Err(Error::JoinFailure(format!(
            "window at {start} is inadmissible: {}",
            w.display(pres)
        )));
    }
    Ok(desc)
}

/// Parameters of the bounded property check.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct PropertyACheckParams {
    /// Window size `n`.
    pub window: usize,
    /// Shared prefix/suffix length `H`.
    pub margin: usize,
    /// Longest candidate word considered.
    pub max_len: usize,
    /// Probe length `m` for window conditions and context comparison.
    pub probe: usize,
}

impl PropertyACheckParams {
    pub fn validate(&self) -> Result<(), Error> {
        if self.window == 0 || self.margin == 0 || self.probe == 0 {
            return Err(Error::InvalidParams("window, margin, probe must be positive".into()));
        }
        if self.max_len < 3 * self.margin + 2 {
            return Err(Error::InvalidParams(format!(
                "max_len must be at least 3·margin + 2 = {}",
                3 * self.margin + 2
            )));
        }
        Ok(())
    }
}

/// A pair of window-passing words with matching margins whose bounded
/// contexts differ.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct PropertyAViolation {
    pub a: String,
    pub b: String,
    pub detail: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct PropertyAReport {
    pub params: PropertyACheckParams,
    pub candidate_words: usize,
    pub groups: usize,
    pub pairs_compared: usize,
    pub violations: Vec<PropertyAViolation>,
    pub pass: bool,
    pub note: String,
}

/// Verifies the defining implication of the bounded property: any two
/// admissible words of length in `[3H+2, max_len]` that pass the window
/// check and agree on their first and last `H` letters must have equal
/// finite contexts at the probe length. Refutes at scale; a pass corroborates
/// but cannot prove the unbounded property.
pub fn property_a_check(
    pres: &Presentation,
    params: PropertyACheckParams,
) -> Result<PropertyAReport, Error> {
    params.validate()?;
    let n = params.window;
    let m = params.probe;
    let mirror = pres.mirror();
    let gens: Vec<Gen> = pres.generators().collect();

    // Letter masks for each admissible window content of length <= n:
    // which letters may follow (bounded follower condition) and which may
    // precede (bounded predecessor condition).
    let mut allowed_next: HashMap<Vec<Gen>, u64> = HashMap::new();
    let mut allowed_prev: HashMap<Vec<Gen>, u64> = HashMap::new();
    for len in 0..=n {
        for window in words_of_length(pres, len) {
            let nf = reduce_letters(pres, &window);
            if nf.is_zero() {
                continue;
            }
            let mut next_mask = 0u64;
            let mut prev_mask = 0u64;
            for (gi, &g) in gens.iter().enumerate() {
                let ext = multiply_letter(pres, &nf, g);
                if omega_plus_admits(&mirror, &nf, &ext, m) {
                    next_mask |= 1 << gi;
                }
                let gnf = reduce_letters(pres, &[g]);
                let pre = multiply(pres, &gnf, &nf);
                if omega_minus_admits(pres, &nf, &pre, m) {
                    prev_mask |= 1 << gi;
                }
            }
            allowed_next.insert(window.clone(), next_mask);
            allowed_prev.insert(window, prev_mask);
        }
    }
    let gen_index: HashMap<Gen, usize> =
        gens.iter().enumerate().map(|(i, &g)| (g, i)).collect();

    // Depth-first enumeration of window-passing words. Follower conditions
    // prune immediately; predecessor conditions prune once the future window
    // is complete, and the truncated trailing windows are checked at harvest.
    let min_len = 3 * params.margin + 2;
    let mut passing: Vec<Vec<Gen>> = Vec::new();
    let mut stack: Vec<(Vec<Gen>, NormalForm)> = vec![(Vec::new(), NormalForm::unit())];
    while let Some((prefix, nf)) = stack.pop() {
        let len = prefix.len();
        if len >= min_len {
            let trailing_ok = (len.saturating_sub(n)..len).all(|i| {
                let window = prefix[i + 1..len].to_vec();
                match allowed_prev.get(&window) {
                    Some(mask) => mask >> gen_index[&prefix[i]] & 1 == 1,
                    None => false,
                }
            });
            if trailing_ok {
                passing.push(prefix.clone());
            }
        }
        if len == params.max_len {
            continue;
        }
        for &g in gens.iter().rev() {
            let past = prefix[len.saturating_sub(n)..].to_vec();
            match allowed_next.get(&past) {
                Some(mask) if mask >> gen_index[&g] & 1 == 1 => {}
                _ => continue,
            }
            let child = multiply_letter(pres, &nf, g);
            if child.is_zero() {
                continue;
            }
            if len + 1 > n {
                // Position (len - n) now has its full future window.
                let i = len - n;
                let mut window = prefix[i + 1..].to_vec();
                window.push(g);
                let ok = match allowed_prev.get(&window) {
                    Some(mask) => mask >> gen_index[&prefix[i]] & 1 == 1,
                    None => false,
                };
                if !ok {
                    continue;
                }
            }
            let mut next = prefix.clone();
            next.push(g);
            stack.push((next, child));
        }
    }

    // Group by shared margins and compare bounded contexts via exact keys.
    let mut groups: HashMap<(Vec<Gen>, Vec<Gen>), Vec<usize>> = HashMap::new();
    for (idx, word) in passing.iter().enumerate() {
        let head = word[..params.margin].to_vec();
        let tail = word[word.len() - params.margin..].to_vec();
        groups.entry((head, tail)).or_default().push(idx);
    }
    let mut keyer = ContextKeyer::new(pres, m, params.max_len);
    let mut violations = Vec::new();
    let mut pairs_compared = 0usize;
    let mut group_keys: Vec<(&(Vec<Gen>, Vec<Gen>), &Vec<usize>)> = groups.iter().collect();
    group_keys.sort();
    for (_, members) in group_keys {
        // Within a group, compare every member against the first; context
        // equality is transitive, so this covers all pairs.
        let first = &passing[members[0]];
        let first_key = keyer.key(&reduce_letters(pres, first));
        for &idx in &members[1..] {
            pairs_compared += 1;
            let word = &passing[idx];
            let key = keyer.key(&reduce_letters(pres, word));
            if key != first_key {
                let detail = match (&first_key, &key) {
                    (ContextKey::Joint(fa), ContextKey::Joint(fb)) => {
                        let bit = fa
                            .iter()
                            .zip(fb.iter())
                            .enumerate()
                            .find(|(_, (x, y))| x != y)
                            .map(|(i, (x, y))| i * 64 + (*x ^ *y).trailing_zeros() as usize)
                            .expect("keys differ");
                        let (x, y) = keyer.probe_words(bit);
                        format!(
                            "contexts differ at probe pair ({}, {})",
                            pres.format_letters(&x),
                            pres.format_letters(&y)
                        )
                    }
                    _ => format!("one-sided context classes differ at probe {m}"),
                };
                violations.push(PropertyAViolation {
                    a: pres.format_letters(first),
                    b: pres.format_letters(word),
                    detail,
                });
            }
        }
    }

    let pass = violations.is_empty();
    Ok(PropertyAReport {
        params,
        candidate_words: passing.len(),
        groups: groups.len(),
        pairs_compared,
        violations,
        pass,
        note: "bounded verification: refutes at this scale, corroborates otherwise; \
               it cannot prove the unbounded property"
            .to_owned(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::presentation::catalog;

    fn w(pres: &Presentation, text: &str) -> Word {
        Word::parse(pres, text).unwrap()
    }

    #[test]
    fn admissibility_basics() {
        let p = catalog("polycyclic2").unwrap();
        assert!(!admissible(&p, &w(&p, "λ ρ′")).unwrap());
        assert!(admissible(&p, &w(&p, "")).unwrap());
        assert!(admissible(&p, &w(&p, "ρ λ λ′ ρ′")).unwrap());
    }

    #[test]
    fn language_counts_polycyclic() {
        let p = catalog("polycyclic2").unwrap();
        let counts = language_counts(&p, 2);
        assert_eq!(counts, vec![1, 4, 14]);
    }

    #[test]
    fn language_count_matches_enumeration() {
        let p = catalog("example4").unwrap();
        for n in 0..=5 {
            let count = language_count(&p, n);
            let listed = language_enumerate(&p, n).count() as u128;
            assert_eq!(count, listed, "n={n}");
        }
    }

    #[test]
    fn enumeration_is_lexicographic() {
        let p = catalog("polycyclic2").unwrap();
        let words: Vec<Word> = language_enumerate(&p, 2).collect();
        assert_eq!(words.len(), 14);
        let mut sorted = words.clone();
        sorted.sort();
        assert_eq!(words, sorted);
        assert_eq!(words[0], w(&p, "λ λ"));
    }

    #[test]
    fn signatures_and_contexts() {
        let p = catalog("polycyclic2").unwrap();
        let a = context_signature(&p, &w(&p, "λ ρ")).unwrap();
        let b = context_signature(&p, &w(&p, "λ′ ρ′")).unwrap();
        assert!(a.is_unit());
        assert_eq!(a, b);
        assert_eq!(
            context_signature(&p, &w(&p, "ρ λ")).unwrap(),
            NormalForm::from_parts(vec![Gen::right(0)], vec![Gen::left(0)])
        );
        assert!(context_signature(&p, &w(&p, "λ ρ′")).is_err());
    }

    #[test]
    fn finite_context_of_empty_word() {
        let p = catalog("polycyclic2").unwrap();
        let pairs = finite_context(&p, &w(&p, ""), 1).unwrap();
        // (ε,ε), 4 one-sided pairs on each side, and the 14 admissible
        // two-letter combinations.
        assert_eq!(pairs.len(), 23);
        assert!(finite_context(&p, &w(&p, "λ ρ′"), 1).is_err());
    }

    #[test]
    fn equal_signature_words_have_equal_contexts() {
        let p = catalog("polycyclic2").unwrap();
        for m in 0..=3 {
            let a = finite_context(&p, &w(&p, "λ ρ"), m).unwrap();
            let b = finite_context(&p, &w(&p, "λ′ ρ′"), m).unwrap();
            assert_eq!(a, b, "m={m}");
        }
        // Distinct signatures λ vs λ′ differ at the probe (ε, ρ).
        let a = finite_context(&p, &w(&p, "λ"), 1).unwrap();
        let b = finite_context(&p, &w(&p, "λ′"), 1).unwrap();
        let probe = (Word::empty(), w(&p, "ρ"));
        assert!(a.contains(&probe));
        assert!(!b.contains(&probe));
    }

    #[test]
    fn omega_plus_examples() {
        let p = catalog("polycyclic2").unwrap();
        // With no probes beyond the empty one, everything keeping λ·b
        // admissible qualifies.
        let exts = omega_plus(&p, &w(&p, "λ"), 1, 0).unwrap();
        assert_eq!(exts, vec![w(&p, "λ"), w(&p, "λ′"), w(&p, "ρ")]);

        // At probe 1 every letter still extends ρ.
        let exts = omega_plus(&p, &w(&p, "ρ"), 1, 1).unwrap();
        assert_eq!(exts.len(), 4);
        // At probe 2 deeper stacks reach past the ρ and kill both right
        // letters: λλ·ρρ′ = 0 and λ′λ·ρρ = 0.
        let exts = omega_plus(&p, &w(&p, "ρ"), 1, 2).unwrap();
        assert_eq!(exts, vec![w(&p, "λ"), w(&p, "λ′")]);

        // Zero-length extension is always the singleton ε.
        assert_eq!(omega_plus(&p, &w(&p, "ρ λ"), 0, 3).unwrap(), vec![Word::empty()]);
    }

    #[test]
    fn omega_is_anti_monotone_in_probe() {
        let p = catalog("example2").unwrap();
        for text in ["", "λ", "ρ″ λ′"] {
            let a = w(&p, text);
            let mut prev: Option<Vec<Word>> = None;
            for m in 0..4 {
                let cur = omega_plus(&p, &a, 1, m).unwrap();
                if let Some(prev) = &prev {
                    assert!(cur.iter().all(|b| prev.contains(b)), "m={m}");
                }
                prev = Some(cur);
            }
        }
    }

    #[test]
    fn omega_minus_mirrors() {
        let p = catalog("polycyclic2").unwrap();
        // ω⁻(ε): left letters can be killed on the right (λ·ρ′ = 0), right
        // letters never.
        let exts = omega_minus(&p, &w(&p, ""), 1, 1).unwrap();
        assert_eq!(exts, vec![w(&p, "ρ"), w(&p, "ρ′")]);
    }

    #[test]
    fn window_check_on_unit_powers() {
        let p = catalog("polycyclic2").unwrap();
        let report = xn_window_check(&p, &w(&p, "λ ρ λ ρ λ ρ"), 2, 2).unwrap();
        assert!(report.ok, "{:?}", report.positions_ok);
    }

    #[test]
    fn window_check_mixed_word() {
        let p = catalog("polycyclic2").unwrap();
        // Deep λ-stacks are torn open by later probes: the two leading λ
        // positions fail their future-window condition (e.g. probe ρ ρ′
        // tolerates λ ρ but not λ λ ρ).
        let report = xn_window_check(&p, &w(&p, "λ λ λ ρ"), 1, 2).unwrap();
        assert_eq!(report.positions_ok, vec![false, false, true, true]);
        assert!(!report.ok);
    }

    #[test]
    fn window_check_vacuous_at_zero() {
        let p = catalog("polycyclic2").unwrap();
        let report = xn_window_check(&p, &w(&p, "ρ λ"), 0, 0).unwrap();
        assert!(report.ok);
        assert_eq!(
            xn_window_check(&p, &w(&p, "λ ρ λ ρ"), 2, 1),
            Err(Error::WordTooShort { len: 4, n: 2 })
        );
    }

    #[test]
    fn cyclic_word_validation() {
        let p = catalog("polycyclic2").unwrap();
        assert!(CyclicWord::new(&p, w(&p, "ρ λ")).is_ok());
        assert!(CyclicWord::new(&p, w(&p, "λ λ′")).is_ok());
        assert_eq!(CyclicWord::new(&p, w(&p, "λ ρ′")), Err(Error::InadmissibleCycle));
        assert!(CyclicWord::new(&p, Word::empty()).is_err());
        // Admissible word whose square dies: ρ′ λ contains λ ρ′ once repeated.
        assert_eq!(CyclicWord::new(&p, w(&p, "ρ′ λ")), Err(Error::InadmissibleCycle));
    }

    #[test]
    fn cyclic_square_criterion_matches_powers() {
        let p = catalog("example4").unwrap();
        for len in 1..=3 {
            for word in words_of_length(&p, len) {
                let word = Word(word);
                let valid = CyclicWord::new(&p, word.clone()).is_ok();
                let mut all_powers = true;
                let mut acc = Vec::new();
                for _ in 0..8 {
                    acc.extend_from_slice(&word.0);
                    if reduce_letters(&p, &acc).is_zero() {
                        all_powers = false;
                        break;
                    }
                }
                assert_eq!(valid, all_powers, "{}", word.display(&p));
            }
        }
    }

    #[test]
    fn cyclic_equality_up_to_rotation() {
        let p = catalog("polycyclic2").unwrap();
        let a = CyclicWord::new(&p, w(&p, "ρ λ")).unwrap();
        let b = CyclicWord::new(&p, w(&p, "λ ρ")).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn unit_periodic_point() {
        let p = catalog("polycyclic2").unwrap();
        let cycle = periodic_point_from_unit(&p).unwrap();
        assert_eq!(cycle.letters(), w(&p, "λ ρ").letters());
        let report = xn_window_check(&p, &cycle.repeat(5), 2, 3).unwrap();
        assert!(report.ok);

        let e4 = catalog("example4").unwrap();
        let cycle = periodic_point_from_unit(&e4).unwrap();
        assert_eq!(cycle.letters(), Word::parse(&e4, "λ ρ").unwrap().letters());
    }

    #[test]
    fn embedding_keeps_windows_admissible() {
        let p = catalog("polycyclic2").unwrap();
        let desc = embed_in_y(&p, &w(&p, "ρ λ")).unwrap();
        assert!(desc.is_canonical(&p));
        assert!(windows_admissible(&p, &desc, 12).is_ok());
        assert_eq!(desc.window(-2, 4), w(&p, "λ ρ ρ λ"));

        let unit_point = embed_in_y(&p, &Word::empty()).unwrap();
        assert!(unit_point.core().is_empty());

        assert_eq!(embed_in_y(&p, &w(&p, "λ ρ′")), Err(Error::Inadmissible));
    }

    #[test]
    fn join_words_examples() {
        let p = catalog("polycyclic2").unwrap();
        let joined = join_words(&p, &w(&p, "λ"), &w(&p, "λ′")).unwrap();
        assert_eq!(joined, w(&p, "ρ"));
        assert_eq!(join_words(&p, &Word::empty(), &Word::empty()).unwrap(), Word::empty());

        let joined = join_words(&p, &w(&p, "ρ"), &w(&p, "ρ′")).unwrap();
        let full = [w(&p, "ρ").0.clone(), joined.0.clone(), w(&p, "ρ′").0.clone()].concat();
        assert!(!reduce_letters(&p, &full).is_zero());
    }

    #[test]
    fn connect_periodic_points() {
        let p = catalog("polycyclic2").unwrap();
        let unit = periodic_point_from_unit(&p).unwrap();
        let same = connect_periodic(&p, &unit, &unit).unwrap();
        assert!(same.core().is_empty());

        let q = CyclicWord::new(&p, w(&p, "ρ′ λ′")).unwrap();
        let desc = connect_periodic(&p, &unit, &q).unwrap();
        assert!(windows_admissible(&p, &desc, 12).is_ok());

        let other = catalog("example2").unwrap();
        let foreign = CyclicWord::new(&other, Word::parse(&other, "λ ρ").unwrap()).unwrap();
        assert_eq!(connect_periodic(&p, &unit, &foreign), Err(Error::PresentationMismatch));
    }

    #[test]
    fn property_a_small_scale() {
        let p = catalog("polycyclic2").unwrap();
        let params = PropertyACheckParams { window: 2, margin: 2, max_len: 8, probe: 2 };
        let report = property_a_check(&p, params).unwrap();
        assert!(report.pass, "{:?}", report.violations);
        assert!(report.candidate_words > 0);
    }

    #[test]
    fn property_a_rejects_bad_params() {
        let p = catalog("polycyclic2").unwrap();
        let params = PropertyACheckParams { window: 2, margin: 2, max_len: 7, probe: 2 };
        assert!(matches!(property_a_check(&p, params), Err(Error::InvalidParams(_))));
    }
}
