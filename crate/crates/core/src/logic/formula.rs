use std::collections::BTreeSet;
use std::fmt;

use crate::frame::{Alphabet, EventId};

/// ETL formula. `L`, `[e]`, `◇` and `□` are expanded into these constructors
/// when built; `Or` and `Implies` are kept for readable countermodels.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Formula {
    Bool(bool),
    Atom(String),
    Not(Box<Formula>),
    And(Box<Formula>, Box<Formula>),
    Or(Box<Formula>, Box<Formula>),
    Implies(Box<Formula>, Box<Formula>),
    K(Box<Formula>),
    /// `⟨e⟩φ`: `he` exists and satisfies `φ`.
    After(EventId, Box<Formula>),
}

impl Formula {
    pub fn atom(name: impl Into<String>) -> Formula {
        Formula::Atom(name.into())
    }

    #[allow(clippy::should_implement_trait)]
    pub fn not(f: Formula) -> Formula {
        Formula::Not(Box::new(f))
    }

    pub fn and(a: Formula, b: Formula) -> Formula {
        Formula::And(Box::new(a), Box::new(b))
    }

    pub fn or(a: Formula, b: Formula) -> Formula {
        Formula::Or(Box::new(a), Box::new(b))
    }

    pub fn implies(a: Formula, b: Formula) -> Formula {
        Formula::Implies(Box::new(a), Box::new(b))
    }

    pub fn k(f: Formula) -> Formula {
        Formula::K(Box::new(f))
    }

    /// `L φ = ¬K¬φ`.
    pub fn l(f: Formula) -> Formula {
        Formula::not(Formula::k(Formula::not(f)))
    }

    pub fn after(e: EventId, f: Formula) -> Formula {
        Formula::After(e, Box::new(f))
    }

    /// `[e]φ = ¬⟨e⟩¬φ`.
    pub fn after_box(e: EventId, f: Formula) -> Formula {
        Formula::not(Formula::after(e, Formula::not(f)))
    }

    /// `⋁_e ⟨e⟩φ`, folded left in alphabet order; `false` for no events.
    pub fn dia(alphabet: &Alphabet, f: Formula) -> Formula {
        alphabet
            .ids()
            .map(|e| Formula::after(e, f.clone()))
            .reduce(Formula::or)
            .unwrap_or(Formula::Bool(false))
    }

    /// `⋀_e [e]φ`, folded left in alphabet order; `true` for no events.
    pub fn box_all(alphabet: &Alphabet, f: Formula) -> Formula {
        alphabet
            .ids()
            .map(|e| Formula::after_box(e, f.clone()))
            .reduce(Formula::and)
            .unwrap_or(Formula::Bool(true))
    }

    /// Atom names occurring in the formula, sorted.
    pub fn atoms(&self) -> BTreeSet<&str> {
        let mut out = BTreeSet::new();
        self.collect_atoms(&mut out);
        out
    }

    fn collect_atoms<'a>(&'a self, out: &mut BTreeSet<&'a str>) {
        match self {
            Formula::Bool(_) => {}
            Formula::Atom(p) => {
                out.insert(p);
            }
            Formula::Not(f) | Formula::K(f) | Formula::After(_, f) => f.collect_atoms(out),
            Formula::And(a, b) | Formula::Or(a, b) | Formula::Implies(a, b) => {
                a.collect_atoms(out);
                b.collect_atoms(out);
            }
        }
    }

    /// Events mentioned by `⟨e⟩` subformulas.
    pub fn events(&self) -> BTreeSet<EventId> {
        let mut out = BTreeSet::new();
        let mut stack = vec![self];
        while let Some(f) = stack.pop() {
            match f {
                Formula::Bool(_) | Formula::Atom(_) => {}
                Formula::Not(g) | Formula::K(g) => stack.push(g),
                Formula::After(e, g) => {
                    out.insert(*e);
                    stack.push(g);
                }
                Formula::And(a, b) | Formula::Or(a, b) | Formula::Implies(a, b) => {
                    stack.push(a);
                    stack.push(b);
                }
            }
        }
        out
    }

    pub fn size(&self) -> usize {
        match self {
            Formula::Bool(_) | Formula::Atom(_) => 1,
            Formula::Not(f) | Formula::K(f) | Formula::After(_, f) => 1 + f.size(),
            Formula::And(a, b) | Formula::Or(a, b) | Formula::Implies(a, b) => 1 + a.size() + b.size(),
        }
    }

    /// Concrete syntax accepted by [`super::parse_formula`]. `¬K¬` prints as
    /// `L` and `¬⟨e⟩¬` as `[e]`.
    pub fn display<'a>(&'a self, alphabet: &'a Alphabet) -> FormulaDisplay<'a> {
        FormulaDisplay {
            formula: self,
            alphabet,
        }
    }
}

pub struct FormulaDisplay<'a> {
    formula: &'a Formula,
    alphabet: &'a Alphabet,
}

const IMPLIES: u8 = 1;
const OR: u8 = 2;
const AND: u8 = 3;
const UNARY: u8 = 4;

impl FormulaDisplay<'_> {
    fn write(&self, f: &mut fmt::Formatter<'_>, formula: &Formula, min: u8) -> fmt::Result {
        let level = match formula {
            Formula::Implies(..) => IMPLIES,
            Formula::Or(..) => OR,
            Formula::And(..) => AND,
            _ => UNARY,
        };
        if level < min {
            f.write_str("(")?;
            self.write(f, formula, 0)?;
            return f.write_str(")");
        }
        match formula {
            Formula::Bool(b) => write!(f, "{b}"),
            Formula::Atom(p) => f.write_str(p),
            Formula::Not(inner) => match inner.as_ref() {
                Formula::K(g) if matches!(g.as_ref(), Formula::Not(_)) => {
                    let Formula::Not(body) = g.as_ref() else { unreachable!() };
                    f.write_str("L ")?;
                    self.write(f, body, UNARY)
                }
                Formula::After(e, g) if matches!(g.as_ref(), Formula::Not(_)) => {
                    let Formula::Not(body) = g.as_ref() else { unreachable!() };
                    write!(f, "[{}] ", self.alphabet.name(*e))?;
                    self.write(f, body, UNARY)
                }
                _ => {
                    f.write_str("!")?;
                    self.write(f, inner, UNARY)
                }
            },
            Formula::K(g) => {
                f.write_str("K ")?;
                self.write(f, g, UNARY)
            }
            Formula::After(e, g) => {
                write!(f, "<{}> ", self.alphabet.name(*e))?;
                self.write(f, g, UNARY)
            }
            Formula::And(a, b) => {
                self.write(f, a, AND)?;
                f.write_str(" & ")?;
                self.write(f, b, UNARY)
            }
            Formula::Or(a, b) => {
                self.write(f, a, OR)?;
                f.write_str(" | ")?;
                self.write(f, b, AND)
            }
            Formula::Implies(a, b) => {
                self.write(f, a, OR)?;
                f.write_str(" -> ")?;
                self.write(f, b, IMPLIES)
            }
        }
    }
}

impl fmt::Display for FormulaDisplay<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.write(f, self.formula, 0)
    }
}
