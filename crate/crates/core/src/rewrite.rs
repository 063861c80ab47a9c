//! The confluent, length-reducing rewriting engine.
//!
//! A redex is a left generator immediately followed by a right generator;
//! it rewrites to the table outcome (`1` is the empty word, `0` absorbs the
//! whole word). Left-hand sides are two-letter `LR` words over disjoint
//! alphabets, so no critical pairs exist and every rewrite order reaches the
//! same normal form: zero, or an `R*` word followed by an `L*` word.

use std::collections::{HashMap, VecDeque};

use crate::error::Error;
use crate::presentation::{Gen, Outcome, Presentation, Side};

/// A finite word over the generators of one presentation.
#[derive(Clone, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Word(pub Vec<Gen>);

impl Word {
    pub fn empty() -> Word {
        Word(Vec::new())
    }

    pub fn letters(&self) -> &[Gen] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn concat(&self, other: &Word) -> Word {
        let mut letters = self.0.clone();
        letters.extend_from_slice(&other.0);
        Word(letters)
    }

    pub fn parse(pres: &Presentation, text: &str) -> Result<Word, Error> {
        Ok(Word(pres.parse_letters(text)?))
    }

    pub fn display(&self, pres: &Presentation) -> String {
        pres.format_letters(&self.0)
    }
}

impl From<Vec<Gen>> for Word {
    fn from(letters: Vec<Gen>) -> Word {
        Word(letters)
    }
}

/// The unique normal form of a word: the absorbing zero, or the pair of a
/// plus word over the right generators and a minus word over the left ones.
/// `Pair { plus: ε, minus: ε }` is the unit.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum NormalForm {
    Zero,
    Pair { plus: Vec<Gen>, minus: Vec<Gen> },
}

impl NormalForm {
    pub fn unit() -> NormalForm {
        NormalForm::Pair { plus: Vec::new(), minus: Vec::new() }
    }

    pub fn from_parts(plus: Vec<Gen>, minus: Vec<Gen>) -> NormalForm {
        debug_assert!(plus.iter().all(|g| g.side == Side::Right));
        debug_assert!(minus.iter().all(|g| g.side == Side::Left));
        NormalForm::Pair { plus, minus }
    }

    pub fn is_zero(&self) -> bool {
        matches!(self, NormalForm::Zero)
    }

    pub fn is_unit(&self) -> bool {
        matches!(self, NormalForm::Pair { plus, minus } if plus.is_empty() && minus.is_empty())
    }

    pub fn plus(&self) -> &[Gen] {
        match self {
            NormalForm::Zero => &[],
            NormalForm::Pair { plus, .. } => plus,
        }
    }

    pub fn minus(&self) -> &[Gen] {
        match self {
            NormalForm::Zero => &[],
            NormalForm::Pair { minus, .. } => minus,
        }
    }

    /// `plus ++ minus`; reducing it returns this normal form. Zero has no
    /// word representative in the admissible language.
    pub fn canonical_word(&self) -> Result<Word, Error> {
        match self {
            NormalForm::Zero => Err(Error::ZeroWord),
            NormalForm::Pair { plus, minus } => {
                let mut letters = plus.clone();
                letters.extend_from_slice(minus);
                Ok(Word(letters))
            }
        }
    }

    pub fn canonical_len(&self) -> usize {
        self.plus().len() + self.minus().len()
    }

    /// Serializes as `0` or `<plus>|<minus>`; `|` alone is the unit.
    pub fn display(&self, pres: &Presentation) -> String {
        match self {
            NormalForm::Zero => "0".to_owned(),
            NormalForm::Pair { plus, minus } => {
                format!("{}|{}", pres.format_letters(plus), pres.format_letters(minus))
            }
        }
    }
}

/// Reduces a word to its normal form by a single left-to-right scan with a
/// pushback stack: letters are pushed, and each right letter collides with
/// the minus stack until it is absorbed, cancelled, or lands on the plus
/// side. Linear time in the length of `w`.
pub fn reduce(pres: &Presentation, w: &Word) -> Result<NormalForm, Error> {
    pres.check_letters(&w.0)?;
    Ok(reduce_letters(pres, &w.0))
}

/// Reduction over pre-validated letters.
pub(crate) fn reduce_letters(pres: &Presentation, letters: &[Gen]) -> NormalForm {
    let mut plus: Vec<Gen> = Vec::new();
    let mut minus: Vec<Gen> = Vec::new();
    for &g in letters {
        match g.side {
            Side::Left => minus.push(g),
            Side::Right => {
                if !push_right(pres, &mut plus, &mut minus, g) {
                    return NormalForm::Zero;
                }
            }
        }
    }
    NormalForm::Pair { plus, minus }
}

/// Collides one right letter against the running `plus ++ minus` normal
/// form. Returns false when the collision reaches zero.
fn push_right(pres: &Presentation, plus: &mut Vec<Gen>, minus: &mut Vec<Gen>, r: Gen) -> bool {
    let mut incoming = r;
    loop {
        let top = match minus.last() {
            // No minus letters left: the right letter lands on the plus word.
            None => {
                plus.push(incoming);
                return true;
            }
            Some(&top) => top,
        };
        match pres.outcome(top, incoming) {
            Outcome::Zero => return false,
            Outcome::One => {
                minus.pop();
                return true;
            }
            Outcome::Gen(g) if g.side == Side::Left => {
                minus.pop();
                minus.push(g);
                return true;
            }
            Outcome::Gen(g) => {
                // Right-valued outcome keeps colliding with the next top.
                minus.pop();
                incoming = g;
            }
        }
    }
}

/// The monoid product. Equals `reduce(word(a) ++ word(b))`: the minus word of
/// `a` collides with the plus word of `b` letter by letter.
pub fn multiply(pres: &Presentation, a: &NormalForm, b: &NormalForm) -> NormalForm {
    let (NormalForm::Pair { plus: ap, minus: am }, NormalForm::Pair { plus: bp, minus: bm }) =
        (a, b)
    else {
        return NormalForm::Zero;
    };
    let mut plus = ap.clone();
    let mut minus = am.clone();
    for &r in bp {
        if !push_right(pres, &mut plus, &mut minus, r) {
            return NormalForm::Zero;
        }
    }
    minus.extend_from_slice(bm);
    NormalForm::Pair { plus, minus }
}

/// Right-multiplies by a single generator.
pub(crate) fn multiply_letter(pres: &Presentation, a: &NormalForm, g: Gen) -> NormalForm {
    let NormalForm::Pair { plus, minus } = a else { return NormalForm::Zero };
    let mut plus = plus.clone();
    let mut minus = minus.clone();
    match g.side {
        Side::Left => minus.push(g),
        Side::Right => {
            if !push_right(pres, &mut plus, &mut minus, g) {
                return NormalForm::Zero;
            }
        }
    }
    NormalForm::Pair { plus, minus }
}

/// A shortest nonempty word whose product is the unit, found by
/// breadth-first search over the normal forms reachable by appending single
/// generators; ties break by declaration order. For this rule class the
/// result is a two-letter word `l r` with `T(l, r) = 1` whenever any `1`
/// entry exists.
pub fn unit_factorization(pres: &Presentation) -> Result<Word, Error> {
    // A reduction can only erase the last two letters through a `1` entry, so
    // without one the unit is unreachable and the search would be futile.
    let has_one = pres
        .left_gens()
        .any(|l| pres.right_gens().any(|r| pres.outcome(l, r) == Outcome::One));
    if !has_one {
        return Err(Error::UnitNotExpressible);
    }

    let bound = 2 * pres.left_count() * pres.right_count();
    let mut seen: HashMap<NormalForm, ()> = HashMap::new();
    let mut queue: VecDeque<(NormalForm, Vec<Gen>)> = VecDeque::new();
    queue.push_back((NormalForm::unit(), Vec::new()));
    seen.insert(NormalForm::unit(), ());
    while let Some((nf, word)) = queue.pop_front() {
        if word.len() >= bound {
            continue;
        }
        for g in pres.generators() {
            let next = multiply_letter(pres, &nf, g);
            if next.is_zero() {
                continue;
            }
            let mut next_word = word.clone();
            next_word.push(g);
            if next.is_unit() {
                return Ok(Word(next_word));
            }
            if seen.insert(next.clone(), ()).is_none() {
                queue.push_back((next, next_word));
            }
        }
    }
    Err(Error::UnitNotExpressible)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::presentation::catalog;

    fn w(pres: &Presentation, text: &str) -> Word {
        Word::parse(pres, text).unwrap()
    }

    fn red(pres: &Presentation, text: &str) -> NormalForm {
        reduce(pres, &w(pres, text)).unwrap()
    }

    #[test]
    fn empty_word_is_unit() {
        let p = catalog("polycyclic2").unwrap();
        assert!(red(&p, "").is_unit());
    }

    #[test]
    fn matched_pair_cancels() {
        let p = catalog("polycyclic2").unwrap();
        assert!(red(&p, "λ ρ").is_unit());
    }

    #[test]
    fn mismatched_pair_annihilates() {
        let p = catalog("polycyclic2").unwrap();
        assert!(red(&p, "λ ρ′").is_zero());
    }

    #[test]
    fn nested_pairs_cancel() {
        let p = catalog("polycyclic2").unwrap();
        assert!(red(&p, "λ λ′ ρ′ ρ").is_unit());
    }

    #[test]
    fn irreducible_word_keeps_shape() {
        let p = catalog("polycyclic2").unwrap();
        let nf = red(&p, "ρ λ");
        assert_eq!(nf.plus(), &[Gen::right(0)]);
        assert_eq!(nf.minus(), &[Gen::left(0)]);
    }

    #[test]
    fn generator_valued_rule() {
        let p = catalog("example4").unwrap();
        let nf = red(&p, "λ ρ′");
        assert_eq!(nf, NormalForm::from_parts(vec![], vec![Gen::left(0)]));
    }

    #[test]
    fn multiply_unit_laws_and_zero() {
        let p = catalog("polycyclic2").unwrap();
        let unit = NormalForm::unit();
        let x = red(&p, "ρ λ′");
        assert_eq!(multiply(&p, &unit, &x), x);
        assert_eq!(multiply(&p, &x, &unit), x);
        assert_eq!(multiply(&p, &unit, &NormalForm::Zero), NormalForm::Zero);
        assert_eq!(multiply(&p, &NormalForm::Zero, &x), NormalForm::Zero);
    }

    #[test]
    fn multiply_collides_minus_against_plus() {
        let p = catalog("polycyclic2").unwrap();
        let l = red(&p, "λ");
        let r = red(&p, "ρ");
        let rp = red(&p, "ρ′");
        assert!(multiply(&p, &l, &r).is_unit());
        assert!(multiply(&p, &l, &rp).is_zero());
    }

    #[test]
    fn multiply_chains_through_generator_outcomes() {
        let p = catalog("example4").unwrap();
        let l = red(&p, "λ");
        let probe = red(&p, "ρ′ ρ″");
        // λ·ρ′ = λ, then λ·ρ″ = 0.
        assert!(multiply(&p, &l, &probe).is_zero());
    }

    #[test]
    fn canonical_word_round_trips() {
        let p = catalog("polycyclic2").unwrap();
        assert_eq!(NormalForm::unit().canonical_word().unwrap(), Word::empty());
        let nf = red(&p, "ρ λ");
        let back = nf.canonical_word().unwrap();
        assert_eq!(back, w(&p, "ρ λ"));
        assert_eq!(reduce(&p, &back).unwrap(), nf);
        assert_eq!(NormalForm::Zero.canonical_word(), Err(Error::ZeroWord));
    }

    #[test]
    fn unit_factorization_polycyclic() {
        let p = catalog("polycyclic2").unwrap();
        let u = unit_factorization(&p).unwrap();
        assert_eq!(u, w(&p, "λ ρ"));
    }

    #[test]
    fn unit_factorization_prefers_declaration_order() {
        let p = catalog("example2").unwrap();
        // λρ and λρ′ are both unit entries; (λ, ρ) comes first.
        assert_eq!(unit_factorization(&p).unwrap(), w(&p, "λ ρ"));
    }

    #[test]
    fn unit_factorization_fails_without_one_entry() {
        let p = Presentation::parse("left: a\nright: x\na x = 0\n").unwrap();
        assert_eq!(unit_factorization(&p), Err(Error::UnitNotExpressible));
    }

    #[test]
    fn reduce_rejects_foreign_letters() {
        let p = catalog("polycyclic2").unwrap();
        let bad = Word(vec![Gen::left(7)]);
        assert_eq!(reduce(&p, &bad), Err(Error::ForeignLetter));
    }
}
