//! Rebuilding the monoid from symbolic data at bounded scale.
//!
//! Admissible words up to a length bound are partitioned by their bounded
//! contexts (not by their products — the point of the certificate is a
//! genuine two-sided comparison between the symbolic object and the
//! algebraic one). Concatenation induces a partial product on the classes,
//! and the certificate checks that mapping each class to the product of a
//! representative is a homomorphism, injective, and surjective over the
//! normal forms of the same radius.

use std::collections::HashMap;

use serde::Serialize;

use crate::contexts::{ContextKey, ContextKeyer};
use crate::error::Error;
use crate::presentation::{Gen, Presentation};
use crate::rewrite::{multiply, reduce_letters, unit_factorization, NormalForm, Word};
use crate::subshift::{admissible_ball, embed_in_y, YPointDescription};

/// The class of an eventually periodic point with canonical unit tails: the
/// product of its core. The flanking cycles contribute unit factors only, so
/// the core's product is the class invariant.
pub fn y_class_of(pres: &Presentation, y: &YPointDescription) -> Result<NormalForm, Error> {
    if !y.is_canonical(pres) {
        return Err(Error::NonCanonical);
    }
    Ok(reduce_letters(pres, &y.core().0))
}

/// Multiplies two classes and, when the product is nonzero, returns a point
/// witnessing it: unit tails around `core1 ++ unit ++ core2`. The witness
/// core reduces exactly to the product, so it is admissible precisely when
/// the product is nonzero.
pub fn symbolic_product(
    pres: &Presentation,
    y1: &YPointDescription,
    y2: &YPointDescription,
) -> Result<(NormalForm, Option<YPointDescription>), Error> {
    let a = y_class_of(pres, y1)?;
    let b = y_class_of(pres, y2)?;
    let product = multiply(pres, &a, &b);
    if product.is_zero() {
        return Ok((NormalForm::Zero, None));
    }
    let unit = unit_factorization(pres)?;
    let core = y1.core().concat(&unit).concat(y2.core());
    let witness = embed_in_y(pres, &core)?;
    Ok((product, Some(witness)))
}

/// One context class of the word ball.
#[derive(Clone, Debug, Serialize)]
pub struct ClassData {
    pub id: u32,
    /// Lexicographically least member word.
    pub representative: String,
    /// Number of ball words in the class.
    pub size: usize,
    /// Product of the representative, in `plus|minus` form.
    pub normal_form: String,
    #[serde(skip)]
    pub representative_word: Word,
    #[serde(skip)]
    pub signatures: Vec<NormalForm>,
}

/// Product table entry: the class containing the concatenation, zero, or
/// undefined when the concatenation's context has no representative in the
/// ball (the table is partial by construction).
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum ProductEntry {
    Zero,
    Class(u32),
    Undefined,
}

/// A witness that the class product is not well defined at this scale:
/// `u` and `u_prime` share a class but concatenating `v` (on the stated
/// side) separates them.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ScaleDiagnostic {
    pub u: String,
    pub u_prime: String,
    pub v: String,
    pub side: String,
    pub detail: String,
}

/// Partition of the admissible ball by bounded contexts, with the induced
/// partial product.
pub struct ContextClassTable {
    pub word_len: usize,
    pub probe: usize,
    classes: Vec<ClassData>,
    key_to_class: HashMap<ContextKey, u32>,
    product: Vec<ProductEntry>,
    scale_diagnostic: Option<ScaleDiagnostic>,
    distinct_signatures: usize,
    keyer: ContextKeyer,
    pres_fingerprint: u64,
}

/// Serializable summary of a table (the full product matrix is omitted; its
/// consistency is what [`certify_isomorphism`] reports).
#[derive(Clone, Debug, Serialize)]
pub struct TableSummary {
    pub word_len: usize,
    pub probe: usize,
    /// Whether classes were keyed by the joint probe-pair bit matrix or by
    /// one-sided bounded equivalence classes (large probe spaces).
    pub joint_keys: bool,
    pub class_count: usize,
    pub distinct_signatures: usize,
    pub ball_words: usize,
    pub classes: Vec<ClassData>,
    pub scale_diagnostic: Option<ScaleDiagnostic>,
}

impl ContextClassTable {
    pub fn classes(&self) -> &[ClassData] {
        &self.classes
    }

    pub fn class_count(&self) -> usize {
        self.classes.len()
    }

    pub fn distinct_signatures(&self) -> usize {
        self.distinct_signatures
    }

    pub fn scale_diagnostic(&self) -> Option<&ScaleDiagnostic> {
        self.scale_diagnostic.as_ref()
    }

    pub fn product(&self, a: u32, b: u32) -> ProductEntry {
        self.product[a as usize * self.classes.len() + b as usize]
    }

    /// The class containing a word, if its context is represented in the
    /// ball. Inadmissible words belong to no class.
    pub fn class_of_word(&mut self, pres: &Presentation, w: &Word) -> Option<u32> {
        if pres.fingerprint() != self.pres_fingerprint {
            return None;
        }
        let nf = reduce_letters(pres, &w.0);
        if nf.is_zero() {
            return None;
        }
        self.key_to_class.get(&self.keyer.key(&nf)).copied()
    }

    pub fn summary(&self, ball_words: usize) -> TableSummary {
        TableSummary {
            word_len: self.word_len,
            probe: self.probe,
            joint_keys: self.keyer.is_joint(),
            class_count: self.classes.len(),
            distinct_signatures: self.distinct_signatures,
            ball_words,
            classes: self.classes.clone(),
            scale_diagnostic: self.scale_diagnostic.clone(),
        }
    }

    pub fn ball_word_count(&self) -> usize {
        self.classes.iter().map(|c| c.size).sum()
    }
}

/// Partitions all admissible words of length at most `word_len` by their
/// bounded context at probe length `probe`, builds the concatenation product
/// on the classes, and checks the product's well-definedness during
/// construction. A failed check does not abort: the diagnostic is carried in
/// the table so that the (necessarily invalid) certificate can still be
/// produced for degenerate scales.
pub fn reconstruct_ball(pres: &Presentation, word_len: usize, probe: usize) -> ContextClassTable {
    let ball = admissible_ball(pres, word_len);
    let mut keyer = ContextKeyer::new(pres, probe, 2 * word_len);

    // Group ball words by signature, then signatures by context key.
    let mut sig_order: Vec<NormalForm> = Vec::new();
    let mut sig_words: HashMap<NormalForm, Vec<usize>> = HashMap::new();
    for (idx, word) in ball.iter().enumerate() {
        let sig = reduce_letters(pres, &word.0);
        debug_assert!(!sig.is_zero());
        sig_words.entry(sig.clone()).or_insert_with(|| {
            sig_order.push(sig.clone());
            Vec::new()
        });
        sig_words.get_mut(&sig).expect("inserted above").push(idx);
    }

    let mut key_to_class: HashMap<ContextKey, u32> = HashMap::new();
    let mut class_sigs: Vec<Vec<NormalForm>> = Vec::new();
    let mut class_members: Vec<Vec<usize>> = Vec::new();
    for sig in &sig_order {
        let key = keyer.key(sig);
        let id = *key_to_class.entry(key).or_insert_with(|| {
            class_sigs.push(Vec::new());
            class_members.push(Vec::new());
            (class_sigs.len() - 1) as u32
        });
        class_sigs[id as usize].push(sig.clone());
        class_members[id as usize].extend_from_slice(&sig_words[sig]);
    }

    // Well-definedness of the class product, checked at signature level
    // (contexts factor through signatures): two same-class signatures must
    // stay together under concatenation with any third signature on either
    // side. The first violating triple is reported as a scale diagnostic.
    let mut scale_diagnostic = None;
    'outer: for sigs in class_sigs.iter().filter(|s| s.len() > 1) {
        let base = &sigs[0];
        for other in &sigs[1..] {
            for v in &sig_order {
                for (side, a, b) in
                    [("right", base, other), ("left", base, other)]
                {
                    let (pa, pb) = if side == "right" {
                        (multiply(pres, a, v), multiply(pres, b, v))
                    } else {
                        (multiply(pres, v, a), multiply(pres, v, b))
                    };
                    let consistent = match (pa.is_zero(), pb.is_zero()) {
                        (true, true) => true,
                        (false, false) => keyer.key(&pa) == keyer.key(&pb),
                        _ => false,
                    };
                    if !consistent {
                        let fmt = |nf: &NormalForm| {
                            nf.canonical_word()
                                .map(|w| w.display(pres))
                                .unwrap_or_default()
                        };
                        scale_diagnostic = Some(ScaleDiagnostic {
                            u: fmt(a),
                            u_prime: fmt(b),
                            v: fmt(v),
                            side: side.to_owned(),
                            detail: "same-class words separate under concatenation; \
                                     the probe scale is too small"
                                .to_owned(),
                        });
                        break 'outer;
                    }
                }
            }
        }
    }

    // Deterministic class data: representative is the lexicographically
    // least member word.
    let mut classes: Vec<ClassData> = Vec::new();
    for (id, members) in class_members.iter().enumerate() {
        let representative = members
            .iter()
            .map(|&i| &ball[i])
            .min()
            .expect("classes are nonempty")
            .clone();
        let nf = reduce_letters(pres, &representative.0);
        classes.push(ClassData {
            id: id as u32,
            representative: representative.display(pres),
            size: members.len(),
            normal_form: nf.display(pres),
            representative_word: representative,
            signatures: class_sigs[id].clone(),
        });
    }

    // The induced product: the class of the concatenation of representatives,
    // or zero, or undefined when that context never occurs in the ball.
    let count = classes.len();
    let mut product = vec![ProductEntry::Undefined; count * count];
    for a in 0..count {
        let sig_a = reduce_letters(pres, &classes[a].representative_word.0);
        for b in 0..count {
            let sig_b = reduce_letters(pres, &classes[b].representative_word.0);
            let p = multiply(pres, &sig_a, &sig_b);
            product[a * count + b] = if p.is_zero() {
                ProductEntry::Zero
            } else {
                match key_to_class.get(&keyer.key(&p)) {
                    Some(&c) => ProductEntry::Class(c),
                    None => ProductEntry::Undefined,
                }
            };
        }
    }

    ContextClassTable {
        word_len,
        probe,
        classes,
        key_to_class,
        product,
        scale_diagnostic,
        distinct_signatures: sig_order.len(),
        keyer,
        pres_fingerprint: pres.fingerprint(),
    }
}

/// Outcome of checking the class-to-element mapping.
#[derive(Clone, Debug, Serialize)]
pub struct IsoCertificate {
    pub word_len: usize,
    pub probe: usize,
    pub class_count: usize,
    pub distinct_signatures: usize,
    pub homomorphism_ok: bool,
    pub injective_ok: bool,
    pub surjective_at_scale_ok: bool,
    pub valid: bool,
    pub scale_diagnostic: Option<ScaleDiagnostic>,
    pub mapping: Vec<MappingEntry>,
}

#[derive(Clone, Debug, Serialize)]
pub struct MappingEntry {
    pub class: u32,
    pub representative: String,
    pub normal_form: String,
}

/// Certifies that mapping each context class to the product of its
/// representative is an isomorphism at this scale: a homomorphism over the
/// whole defined product table, injective (distinct classes carry distinct
/// normal forms, and distinct normal forms in the ball have distinct bounded
/// contexts), and surjective onto the normal forms of canonical length
/// within the ball radius.
pub fn certify_isomorphism(pres: &Presentation, table: &ContextClassTable) -> IsoCertificate {
    let count = table.class_count();
    let values: Vec<NormalForm> = table
        .classes()
        .iter()
        .map(|c| reduce_letters(pres, &c.representative_word.0))
        .collect();

    let mut homomorphism_ok = true;
    for a in 0..count {
        for b in 0..count {
            let algebraic = multiply(pres, &values[a], &values[b]);
            match table.product(a as u32, b as u32) {
                ProductEntry::Zero => {
                    if !algebraic.is_zero() {
                        homomorphism_ok = false;
                    }
                }
                ProductEntry::Class(c) => {
                    if values[c as usize] != algebraic {
                        homomorphism_ok = false;
                    }
                }
                ProductEntry::Undefined => {}
            }
        }
    }

    // Injectivity at scale: every class holds exactly one signature. That
    // both directions hold then follows: distinct classes map to distinct
    // normal forms, and every pair of distinct ball normal forms is
    // separated by some bounded probe.
    let injective_ok = table.classes().iter().all(|c| c.signatures.len() == 1)
        && table.scale_diagnostic().is_none();

    // Surjectivity at scale: every normal form of canonical length within
    // the radius is the image of some class. Each such form is reduced from
    // its own canonical word, which lies in the ball.
    let mut image: HashMap<&NormalForm, ()> = HashMap::new();
    for v in &values {
        image.insert(v, ());
    }
    let mut surjective_at_scale_ok = true;
    'surj: for plus_len in 0..=table.word_len {
        for minus_len in 0..=(table.word_len - plus_len) {
            for plus in pure_words_of(pres, true, plus_len) {
                for minus in pure_words_of(pres, false, minus_len) {
                    let nf = NormalForm::from_parts(plus.clone(), minus);
                    if !image.contains_key(&nf) {
                        surjective_at_scale_ok = false;
                        break 'surj;
                    }
                }
            }
        }
    }

    let valid = homomorphism_ok && injective_ok && surjective_at_scale_ok;
    IsoCertificate {
        word_len: table.word_len,
        probe: table.probe,
        class_count: count,
        distinct_signatures: table.distinct_signatures(),
        homomorphism_ok,
        injective_ok,
        surjective_at_scale_ok,
        valid,
        scale_diagnostic: table.scale_diagnostic().cloned(),
        mapping: table
            .classes()
            .iter()
            .map(|c| MappingEntry {
                class: c.id,
                representative: c.representative.clone(),
                normal_form: c.normal_form.clone(),
            })
            .collect(),
    }
}

fn pure_words_of(pres: &Presentation, plus: bool, len: usize) -> Vec<Vec<Gen>> {
    let alphabet: Vec<Gen> =
        if plus { pres.right_gens().collect() } else { pres.left_gens().collect() };
    let mut words: Vec<Vec<Gen>> = vec![Vec::new()];
    for _ in 0..len {
        let mut next = Vec::new();
        for w in &words {
            for &g in &alphabet {
                let mut child = w.clone();
                child.push(g);
                next.push(child);
            }
        }
        words = next;
    }
    words
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::presentation::catalog;
    use crate::rewrite::reduce;
    use crate::subshift::{connect_periodic, periodic_point_from_unit, CyclicWord};

    fn w(pres: &Presentation, text: &str) -> Word {
        Word::parse(pres, text).unwrap()
    }

    #[test]
    fn y_class_examples() {
        let p = catalog("polycyclic2").unwrap();
        let y = embed_in_y(&p, &w(&p, "ρ λ")).unwrap();
        assert_eq!(y_class_of(&p, &y).unwrap(), reduce(&p, &w(&p, "ρ λ")).unwrap());

        let unit_point = embed_in_y(&p, &Word::empty()).unwrap();
        assert!(y_class_of(&p, &unit_point).unwrap().is_unit());

        let same_class = embed_in_y(&p, &w(&p, "λ ρ")).unwrap();
        assert!(y_class_of(&p, &same_class).unwrap().is_unit());
    }

    #[test]
    fn y_class_rejects_non_canonical() {
        let p = catalog("polycyclic2").unwrap();
        let unit = periodic_point_from_unit(&p).unwrap();
        let q = CyclicWord::new(&p, w(&p, "ρ′ λ′")).unwrap();
        let desc = connect_periodic(&p, &unit, &q).unwrap();
        assert_eq!(y_class_of(&p, &desc), Err(Error::NonCanonical));
    }

    #[test]
    fn symbolic_product_examples() {
        let p = catalog("polycyclic2").unwrap();
        let y_l = embed_in_y(&p, &w(&p, "λ")).unwrap();
        let y_r = embed_in_y(&p, &w(&p, "ρ")).unwrap();
        let (product, witness) = symbolic_product(&p, &y_l, &y_r).unwrap();
        assert!(product.is_unit());
        let witness = witness.unwrap();
        assert_eq!(witness.core(), &w(&p, "λ λ ρ ρ"));

        let y_rp = embed_in_y(&p, &w(&p, "ρ′")).unwrap();
        let (product, witness) = symbolic_product(&p, &y_l, &y_rp).unwrap();
        assert!(product.is_zero());
        assert!(witness.is_none());

        // Unit point is a right identity on classes.
        let unit_point = embed_in_y(&p, &Word::empty()).unwrap();
        let (product, _) = symbolic_product(&p, &y_l, &unit_point).unwrap();
        assert_eq!(product, y_class_of(&p, &y_l).unwrap());
    }

    #[test]
    fn ball_classes_match_signatures_at_scale() {
        let p = catalog("polycyclic2").unwrap();
        let mut table = reconstruct_ball(&p, 4, 4);
        assert!(table.scale_diagnostic().is_none());
        assert_eq!(table.class_count(), table.distinct_signatures());

        // λ · ρ′ is the zero product.
        let a = table.class_of_word(&p, &w(&p, "λ")).unwrap();
        let b = table.class_of_word(&p, &w(&p, "ρ′")).unwrap();
        assert_eq!(table.product(a, b), ProductEntry::Zero);

        // λ · ρ lands in the unit class.
        let unit_class = table.class_of_word(&p, &Word::empty()).unwrap();
        let r = table.class_of_word(&p, &w(&p, "ρ")).unwrap();
        match table.product(a, r) {
            ProductEntry::Class(c) => assert_eq!(c, unit_class),
            other => panic!("expected unit class, got {other:?}"),
        }
    }

    #[test]
    fn trivial_ball_is_single_class() {
        let p = catalog("polycyclic2").unwrap();
        let table = reconstruct_ball(&p, 0, 4);
        assert_eq!(table.class_count(), 1);
        assert_eq!(table.classes()[0].representative, "");
    }

    #[test]
    fn certificate_valid_at_scale() {
        let p = catalog("polycyclic2").unwrap();
        // The probe must exceed the ball radius: pure plus powers of lengths
        // 4 and 8 have equal contexts at probe 4 (no shorter probe reaches
        // the difference), so products leaving the ball would collide with
        // ball classes and break the homomorphism check. The separation
        // bound 2·|L|·|R| = 8 is adequate.
        let table = reconstruct_ball(&p, 4, 8);
        let cert = certify_isomorphism(&p, &table);
        assert!(cert.homomorphism_ok);
        assert!(cert.injective_ok);
        assert!(cert.surjective_at_scale_ok);
        assert!(cert.valid);
    }

    #[test]
    fn small_probe_merges_deep_plus_powers() {
        let p = catalog("polycyclic2").unwrap();
        // At probe 4 no probe pair separates ρρρρ from ρρρρρ: left probes of
        // length at most 4 die or escape on both, and right probes never
        // collide with a pure plus word. The ball at radius 6 therefore
        // merges distinct normal forms and the certificate must degrade.
        let mut table = reconstruct_ball(&p, 6, 4);
        let a = table.class_of_word(&p, &w(&p, "ρ ρ ρ ρ")).unwrap();
        let b = table.class_of_word(&p, &w(&p, "ρ ρ ρ ρ ρ")).unwrap();
        assert_eq!(a, b);
        assert!(table.scale_diagnostic().is_some());
        let cert = certify_isomorphism(&p, &table);
        assert!(!cert.injective_ok);
        assert!(!cert.valid);
    }

    #[test]
    fn zero_probe_collapses_and_fails() {
        let p = catalog("polycyclic2").unwrap();
        let table = reconstruct_ball(&p, 3, 0);
        assert_eq!(table.class_count(), 1);
        assert!(table.scale_diagnostic().is_some());
        let cert = certify_isomorphism(&p, &table);
        assert!(!cert.injective_ok);
        assert!(!cert.valid);
    }

    #[test]
    fn mapping_is_constant_on_classes_and_equals_signature() {
        let p = catalog("example4").unwrap();
        let table = reconstruct_ball(&p, 3, 4);
        assert!(table.scale_diagnostic().is_none());
        for class in table.classes() {
            assert_eq!(class.signatures.len(), 1);
            let nf = reduce_letters(&p, &class.representative_word.0);
            assert_eq!(nf, class.signatures[0]);
        }
    }

    #[test]
    fn symbolic_product_is_associative_on_samples() {
        let p = catalog("polycyclic2").unwrap();
        let cores = ["", "λ", "ρ", "ρ λ", "λ λ′", "ρ′ ρ"];
        let points: Vec<YPointDescription> =
            cores.iter().map(|t| embed_in_y(&p, &w(&p, t)).unwrap()).collect();
        for a in &points {
            for b in &points {
                for c in &points {
                    let left = match symbolic_product(&p, a, b).unwrap() {
                        (_, Some(ab)) => symbolic_product(&p, &ab, c).unwrap().0,
                        (nf, None) => {
                            assert!(nf.is_zero());
                            NormalForm::Zero
                        }
                    };
                    let right = match symbolic_product(&p, b, c).unwrap() {
                        (_, Some(bc)) => symbolic_product(&p, a, &bc).unwrap().0,
                        (nf, None) => {
                            assert!(nf.is_zero());
                            NormalForm::Zero
                        }
                    };
                    assert_eq!(left, right);
                }
            }
        }
    }
}
