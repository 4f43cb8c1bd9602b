use std::collections::BTreeMap;

use thiserror::Error;

use super::Formula;
use crate::bits::{self, HistorySet, Words};
use crate::frame::{Alphabet, EventId, Frame, HistoryId};

/// Default bound on the number of valuations `valid_on_frame` enumerates.
pub const DEFAULT_VALUATION_LIMIT: u64 = 1 << 24;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum LogicError {
    #[error("search space too large: {size} valuations exceed the limit {limit}")]
    SearchSpaceTooLarge { size: u128, limit: u64 },
    #[error("unknown event {0}")]
    UnknownEvent(String),
}

/// Partial map from atoms to history sets; absent atoms are false everywhere.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Valuation {
    map: BTreeMap<String, HistorySet>,
}

impl Valuation {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn with(mut self, atom: impl Into<String>, set: HistorySet) -> Self {
        self.set(atom, set);
        self
    }

    pub fn set(&mut self, atom: impl Into<String>, set: HistorySet) {
        self.map.insert(atom.into(), set);
    }

    pub fn get(&self, atom: &str) -> Option<&HistorySet> {
        self.map.get(atom)
    }

    pub fn iter(&self) -> impl Iterator<Item = (&str, &HistorySet)> {
        self.map.iter().map(|(k, v)| (k.as_str(), v))
    }

    /// Whether every set ranges over the histories of `frame`.
    pub fn fits(&self, frame: &Frame) -> bool {
        self.map.values().all(|s| s.universe() == frame.len())
    }
}

/// `F, V, h ⊨ φ`, by direct recursion on the semantic clauses.
pub fn satisfies(frame: &Frame, v: &Valuation, h: HistoryId, f: &Formula) -> bool {
    match f {
        Formula::Bool(b) => *b,
        Formula::Atom(p) => v.get(p).is_some_and(|s| s.contains(h)),
        Formula::Not(g) => !satisfies(frame, v, h, g),
        Formula::And(a, b) => satisfies(frame, v, h, a) && satisfies(frame, v, h, b),
        Formula::Or(a, b) => satisfies(frame, v, h, a) || satisfies(frame, v, h, b),
        Formula::Implies(a, b) => !satisfies(frame, v, h, a) || satisfies(frame, v, h, b),
        Formula::K(g) => frame
            .histories()
            .filter(|&h2| frame.accessible(h, h2))
            .all(|h2| satisfies(frame, v, h2, g)),
        Formula::After(e, g) => frame.extend(h, *e).is_some_and(|he| satisfies(frame, v, he, g)),
    }
}

struct Ext<'a> {
    frame: &'a Frame,
    atoms: &'a [(&'a str, Words)],
    full: Words,
}

impl Ext<'_> {
    fn eval(&self, f: &Formula) -> Words {
        let zero = || -> Words { smallvec::smallvec![0; self.full.len()] };
        match f {
            Formula::Bool(true) => self.full.clone(),
            Formula::Bool(false) => zero(),
            Formula::Atom(p) => self
                .atoms
                .iter()
                .find(|(name, _)| name == p)
                .map_or_else(zero, |(_, w)| w.clone()),
            Formula::Not(g) => {
                let mut w = self.eval(g);
                for (x, m) in w.iter_mut().zip(&self.full) {
                    *x = !*x & m;
                }
                w
            }
            Formula::And(a, b) => self.zip(a, b, |x, y| x & y),
            Formula::Or(a, b) => self.zip(a, b, |x, y| x | y),
            Formula::Implies(a, b) => {
                let mut w = self.zip(a, b, |x, y| !x | y);
                for (x, m) in w.iter_mut().zip(&self.full) {
                    *x &= m;
                }
                w
            }
            Formula::K(g) => {
                let inner = self.eval(g);
                let mut w = zero();
                for h in self.frame.histories() {
                    if bits::is_subset(self.frame.row(h), &inner) {
                        bits::insert(&mut w, h.index());
                    }
                }
                w
            }
            Formula::After(e, g) => {
                let inner = self.eval(g);
                let mut w = zero();
                for h in self.frame.histories() {
                    if self
                        .frame
                        .extend(h, *e)
                        .is_some_and(|he| bits::contains(&inner, he.index()))
                    {
                        bits::insert(&mut w, h.index());
                    }
                }
                w
            }
        }
    }

    fn zip(&self, a: &Formula, b: &Formula, op: impl Fn(u64, u64) -> u64) -> Words {
        let mut x = self.eval(a);
        let y = self.eval(b);
        for (p, q) in x.iter_mut().zip(&y) {
            *p = op(*p, *q);
        }
        x
    }
}

/// `{h | F, V, h ⊨ φ}`, computed bottom-up on bit rows.
pub fn extension(frame: &Frame, v: &Valuation, f: &Formula) -> HistorySet {
    let atoms: Vec<(&str, Words)> = v.iter().map(|(k, s)| (k, Words::from_slice(s.words()))).collect();
    let ext = Ext {
        frame,
        atoms: &atoms,
        full: Words::from_slice(frame.full_set().words()),
    };
    HistorySet::from_words(frame.len(), &ext.eval(f))
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ModelCheck {
    pub valid: bool,
    /// First history in canonical order where the formula is false.
    pub failing: Option<HistoryId>,
}

pub fn valid_on_model(frame: &Frame, v: &Valuation, f: &Formula) -> ModelCheck {
    let failing = extension(frame, v, f).complement().iter().next();
    ModelCheck {
        valid: failing.is_none(),
        failing,
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FrameCheck {
    pub valid: bool,
    /// First valuation (in enumeration order) and history refuting the formula.
    pub countermodel: Option<(Valuation, HistoryId)>,
    pub valuations_checked: u64,
}

/// Number of valuations over the atoms of `f` on `frame`.
pub fn valuation_count(frame: &Frame, f: &Formula) -> u128 {
    let bits = f.atoms().len() as u32 * frame.len() as u32;
    if bits >= 128 {
        u128::MAX
    } else {
        1u128 << bits
    }
}

pub fn valid_on_frame(frame: &Frame, f: &Formula) -> Result<FrameCheck, LogicError> {
    valid_on_frame_with_limit(frame, f, DEFAULT_VALUATION_LIMIT)
}

/// Validity under every valuation of the atoms occurring in `f`. Valuation
/// `k` gives atom `i` (in sorted order) the histories whose index `j` has bit
/// `i·|H| + j` of `k` set.
pub fn valid_on_frame_with_limit(frame: &Frame, f: &Formula, limit: u64) -> Result<FrameCheck, LogicError> {
    let size = valuation_count(frame, f);
    if size > limit as u128 {
        return Err(LogicError::SearchSpaceTooLarge { size, limit });
    }
    let names: Vec<&str> = f.atoms().into_iter().collect();
    let n = frame.len();
    let words = frame.words();
    let full = Words::from_slice(frame.full_set().words());
    let mut atoms: Vec<(&str, Words)> = names.iter().map(|&p| (p, smallvec::smallvec![0; words])).collect();
    for k in 0..size as u64 {
        for (i, (_, w)) in atoms.iter_mut().enumerate() {
            w.iter_mut().for_each(|x| *x = 0);
            for j in 0..n {
                if (k >> (i * n + j)) & 1 == 1 {
                    bits::insert(w, j);
                }
            }
        }
        let ext = Ext {
            frame,
            atoms: &atoms,
            full: full.clone(),
        };
        let value = ext.eval(f);
        if let Some(h) = bits::first_difference(&full, &value) {
            let mut v = Valuation::new();
            for (p, w) in &atoms {
                v.set(*p, HistorySet::from_words(n, w));
            }
            return Ok(FrameCheck {
                valid: false,
                countermodel: Some((v, HistoryId::from_index(h))),
                valuations_checked: k + 1,
            });
        }
    }
    Ok(FrameCheck {
        valid: true,
        countermodel: None,
        valuations_checked: size as u64,
    })
}

/// `⟨e⟩Lp → Lp ∨ L◇p ∨ ⟨e⟩L◇p`, with `◇` expanded over `alphabet`.
pub fn star_axiom(e: EventId, alphabet: &Alphabet) -> Result<Formula, LogicError> {
    if e.index() >= alphabet.len() {
        return Err(LogicError::UnknownEvent(format!("#{}", e.index())));
    }
    let p = || Formula::atom("p");
    Ok(Formula::implies(
        Formula::after(e, Formula::l(p())),
        Formula::or(
            Formula::or(Formula::l(p()), Formula::l(Formula::dia(alphabet, p()))),
            Formula::after(e, Formula::l(Formula::dia(alphabet, p()))),
        ),
    ))
}

pub fn star_axiom_named(event: &str, alphabet: &Alphabet) -> Result<Formula, LogicError> {
    let e = alphabet
        .lookup(event)
        .ok_or_else(|| LogicError::UnknownEvent(event.to_string()))?;
    star_axiom(e, alphabet)
}

/// `◇Lp → L◇p`.
pub fn spr_axiom(alphabet: &Alphabet) -> Formula {
    let p = || Formula::atom("p");
    Formula::implies(
        Formula::dia(alphabet, Formula::l(p())),
        Formula::l(Formula::dia(alphabet, p())),
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;
    use crate::logic::parse_formula;

    fn set(f: &Frame, refs: &[&str]) -> HistorySet {
        HistorySet::from_ids(f.len(), refs.iter().map(|r| f.resolve(r).unwrap()))
    }

    #[test]
    fn after_on_fig1a() {
        let f = fixtures::fig1a();
        let v = Valuation::new().with("p", set(&f, &["e1.e3"]));
        let phi = parse_formula("<e3> p", f.alphabet()).unwrap();
        assert!(satisfies(&f, &v, f.resolve("e1").unwrap(), &phi));
        assert!(!satisfies(&f, &v, f.resolve("e2").unwrap(), &phi));
    }

    #[test]
    fn knowledge_on_fig3b() {
        let f = fixtures::fig3b();
        let v = Valuation::new().with("p", set(&f, &["e3"]));
        let kp = parse_formula("K p", f.alphabet()).unwrap();
        assert!(satisfies(&f, &v, f.resolve("e2").unwrap(), &kp));
        assert!(!satisfies(&f, &v, f.resolve("e1").unwrap(), &kp));
    }

    #[test]
    fn tautologies() {
        for fx in fixtures::all() {
            let f = fx.frame();
            let taut = parse_formula("p | !p", f.alphabet()).unwrap();
            assert!(valid_on_model(&f, &Valuation::new(), &taut).valid);
            assert!(valid_on_frame(&f, &taut).unwrap().valid);
            let v = Valuation::new().with("p", f.full_set());
            assert!(valid_on_model(&f, &v, &Formula::k(Formula::atom("p"))).valid);
        }
    }

    #[test]
    fn star_on_fig1a_and_fig3d() {
        let f = fixtures::fig1a();
        for e in f.events() {
            assert!(valid_on_frame(&f, &star_axiom(e, f.alphabet()).unwrap()).unwrap().valid);
        }
        // the only local-recall failure on fig3d is at event e1
        let g = fixtures::fig3d();
        let e2 = star_axiom_named("e2", g.alphabet()).unwrap();
        assert!(valid_on_frame(&g, &e2).unwrap().valid);
        let star = star_axiom_named("e1", g.alphabet()).unwrap();
        let check = valid_on_frame(&g, &star).unwrap();
        assert!(!check.valid);
        let (v, h) = check.countermodel.unwrap();
        assert!(!satisfies(&g, &v, h, &star));
        let model = valid_on_model(&g, &v, &star);
        assert_eq!(model.failing, Some(h));
    }

    #[test]
    fn star_shapes() {
        let one = Alphabet::new(["e1"]).unwrap();
        let e1 = EventId::from_index(0);
        assert_eq!(
            star_axiom(e1, &one).unwrap().display(&one).to_string(),
            "<e1> L p -> L p | L <e1> p | <e1> L <e1> p"
        );
        let two = Alphabet::new(["e1", "e2"]).unwrap();
        assert_eq!(
            star_axiom(e1, &two).unwrap().display(&two).to_string(),
            "<e1> L p -> L p | L (<e1> p | <e2> p) | <e1> L (<e1> p | <e2> p)"
        );
        assert!(star_axiom_named("e3", &two).is_err());
        assert!(star_axiom(EventId::from_index(2), &two).is_err());
    }

    #[test]
    fn spr_shapes() {
        let one = Alphabet::new(["e1"]).unwrap();
        assert_eq!(spr_axiom(&one).display(&one).to_string(), "<e1> L p -> L <e1> p");
        let two = Alphabet::new(["e1", "e2"]).unwrap();
        assert_eq!(
            spr_axiom(&two).display(&two).to_string(),
            "<e1> L p | <e2> L p -> L (<e1> p | <e2> p)"
        );
        let none = Alphabet::new(Vec::<String>::new()).unwrap();
        assert_eq!(
            spr_axiom(&none),
            Formula::implies(Formula::Bool(false), Formula::l(Formula::Bool(false)))
        );
    }

    #[test]
    fn guard() {
        let f = fixtures::fig1a();
        let phi = parse_formula("p & q & r", f.alphabet()).unwrap();
        assert_eq!(valuation_count(&f, &phi), 1 << 15);
        assert!(matches!(
            valid_on_frame_with_limit(&f, &phi, 1000),
            Err(LogicError::SearchSpaceTooLarge {
                size: 32768,
                limit: 1000
            })
        ));
    }
}
